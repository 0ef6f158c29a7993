//! Plug-in conditional entropies, CMI atoms and exact oracles for
//! finite-order Markov chains and the two-state HMM.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observers::MAX_CONTEXT_TABLE;
use crate::sources::{HmmParams, MarkovChainParams, SymbolSequence};

/// Dense count tables above this many cells switch to a hash map.
const DENSE_LIMIT: usize = 1 << 22;

/// Fewer scored positions than this many per possible context is flagged.
const SAMPLES_PER_CONTEXT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Plugin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub order: usize,
    /// Bits.
    pub value: f64,
    /// Distinct contexts observed.
    pub n_contexts: usize,
    pub n_positions: usize,
    pub estimator: Estimator,
    /// Fewer than ten positions per possible context.
    pub undersampled: bool,
    /// No context occurs twice, so the estimate is trivially 0.
    pub no_repeats: bool,
}

/// `-sum p log2 p`, ignoring zero cells.
pub fn entropy_bits(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

pub fn binary_entropy(p: f64) -> f64 {
    entropy_bits(&[p, 1.0 - p])
}

fn xlogx(c: u64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.log2()
    }
}

fn n_contexts_for(alphabet: usize, m: usize) -> Result<usize> {
    let mut n = 1usize;
    for _ in 0..m {
        n = n.checked_mul(alphabet).filter(|&c| c <= MAX_CONTEXT_TABLE).ok_or_else(|| {
            Error::param("order", format!("alphabet {alphabet}^{m} exceeds the 2^26 context cap"))
        })?;
    }
    Ok(n)
}

/// Plug-in `H(X_t | X_{t-m..t-1})` over positions `t >= start` (`start >= m`).
fn conditional_entropy_from(seq: &SymbolSequence, m: usize, start: usize) -> Result<EntropyEstimate> {
    let a = seq.alphabet_size() as usize;
    let n_ctx = n_contexts_for(a, m)?;
    let symbols = seq.symbols();
    if start >= symbols.len() {
        return Err(Error::NoScoredSteps {
            burn_in: start,
            len: symbols.len(),
        });
    }
    let n_positions = symbols.len() - start;
    // Context of position t is built from symbols[t-m..t], most recent least significant.
    let ctx_at = |t: usize| symbols[t - m..t].iter().fold(0usize, |c, &s| c * a + s as usize);

    let (sum_joint, sum_ctx, n_seen, max_ctx_count);
    if n_ctx * a <= DENSE_LIMIT {
        let mut joint = vec![0u64; n_ctx * a];
        let mut ctx_counts = vec![0u64; n_ctx];
        let mut ctx = if start > 0 { ctx_at(start) } else { 0 };
        for t in start..symbols.len() {
            let s = symbols[t] as usize;
            joint[ctx * a + s] += 1;
            ctx_counts[ctx] += 1;
            if m > 0 {
                ctx = (ctx * a + s) % n_ctx;
            }
        }
        sum_joint = joint.iter().map(|&c| xlogx(c)).sum::<f64>();
        sum_ctx = ctx_counts.iter().map(|&c| xlogx(c)).sum::<f64>();
        n_seen = ctx_counts.iter().filter(|&&c| c > 0).count();
        max_ctx_count = ctx_counts.iter().copied().max().unwrap_or(0);
    } else {
        let mut joint: HashMap<(usize, u8), u64> = HashMap::new();
        let mut ctx_counts: HashMap<usize, u64> = HashMap::new();
        let mut ctx = ctx_at(start);
        for t in start..symbols.len() {
            let s = symbols[t];
            *joint.entry((ctx, s)).or_default() += 1;
            *ctx_counts.entry(ctx).or_default() += 1;
            ctx = (ctx * a + s as usize) % n_ctx;
        }
        sum_joint = joint.values().map(|&c| xlogx(c)).sum::<f64>();
        sum_ctx = ctx_counts.values().map(|&c| xlogx(c)).sum::<f64>();
        n_seen = ctx_counts.len();
        max_ctx_count = ctx_counts.values().copied().max().unwrap_or(0);
    }
    let raw = (sum_ctx - sum_joint) / n_positions as f64;
    Ok(EntropyEstimate {
        order: m,
        value: raw.clamp(0.0, (a as f64).log2()),
        n_contexts: n_seen,
        n_positions,
        estimator: Estimator::Plugin,
        undersampled: n_positions < SAMPLES_PER_CONTEXT.saturating_mul(n_ctx),
        no_repeats: max_ctx_count <= 1,
    })
}

/// Plug-in estimate of `H(X_t | previous m symbols)` over positions `t >= m`.
pub fn empirical_conditional_entropy(seq: &SymbolSequence, m: usize) -> Result<EntropyEstimate> {
    conditional_entropy_from(seq, m, m)
}

/// `H(order m-1) - H(order m)`, both over positions `t >= m`.
pub fn cmi_atom(seq: &SymbolSequence, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::param("m", "atoms start at m = 1"));
    }
    let lo = conditional_entropy_from(seq, m - 1, m)?;
    let hi = conditional_entropy_from(seq, m, m)?;
    Ok(lo.value - hi.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmiAtomSeries {
    /// `H_0 .. H_M`, all over positions `t >= M`.
    pub entropies: Vec<EntropyEstimate>,
    /// Atoms for `m = 1..=M`.
    pub atoms_raw: Vec<f64>,
    pub atoms: Vec<f64>,
    /// Running sums of clamped atoms.
    pub partial_sums: Vec<f64>,
    /// `H_0 - H_M`, the sum of raw atoms.
    pub truncated_excess_entropy: f64,
}

impl CmiAtomSeries {
    pub fn max_order(&self) -> usize {
        self.atoms.len()
    }

    pub fn undersampled(&self) -> bool {
        self.entropies.iter().any(|e| e.undersampled)
    }

    /// CSV columns: m, atom_raw, atom_clamped, partial_sum.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["m", "atom_raw", "atom_clamped", "partial_sum"])?;
        for row in self.csv_rows(&[]) {
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Rows in (m, atom_raw, atom_clamped, partial_sum) order with leading key cells.
    pub fn csv_rows(&self, keys: &[&str]) -> Vec<Vec<String>> {
        (0..self.atoms.len())
            .map(|i| {
                let mut row: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
                row.extend([
                    (i + 1).to_string(),
                    self.atoms_raw[i].to_string(),
                    self.atoms[i].to_string(),
                    self.partial_sums[i].to_string(),
                ]);
                row
            })
            .collect()
    }
}

/// Atoms for `m = 1..=max_order`, computed on a common window so they sum to
/// `H_0 - H_M` up to floating-point addition.
pub fn excess_entropy_truncated(seq: &SymbolSequence, max_order: usize) -> Result<CmiAtomSeries> {
    if max_order == 0 {
        return Err(Error::param("max_order", "must be at least 1"));
    }
    let entropies = (0..=max_order)
        .map(|m| conditional_entropy_from(seq, m, max_order))
        .collect::<Result<Vec<_>>>()?;
    let atoms_raw: Vec<f64> = entropies.windows(2).map(|w| w[0].value - w[1].value).collect();
    let atoms: Vec<f64> = atoms_raw.iter().map(|a| a.max(0.0)).collect();
    let partial_sums = atoms
        .iter()
        .scan(0.0, |acc, a| {
            *acc += a;
            Some(*acc)
        })
        .collect();
    Ok(CmiAtomSeries {
        truncated_excess_entropy: entropies[0].value - entropies[max_order].value,
        entropies,
        atoms_raw,
        atoms,
        partial_sums,
    })
}

// ---------------------------------------------------------------------------
// Exact oracles

fn check_stochastic(p: &[Vec<f64>]) -> Result<()> {
    let n = p.len();
    if n == 0 {
        return Err(Error::NotStochastic("empty matrix".into()));
    }
    for (i, row) in p.iter().enumerate() {
        if row.len() != n {
            return Err(Error::NotStochastic(format!("row {i} has {} entries, expected {n}", row.len())));
        }
        if row.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return Err(Error::NotStochastic(format!("row {i} has an entry outside [0,1]")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::NotStochastic(format!("row {i} sums to {sum}")));
        }
    }
    Ok(())
}

fn reachable_from(p: &[Vec<f64>], start: usize, reverse: bool) -> Vec<bool> {
    let n = p.len();
    let mut seen = vec![false; n];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            let w = if reverse { p[j][i] } else { p[i][j] };
            if w > 0.0 && !seen[j] {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen
}

/// Stationary law of an irreducible chain. Reducible chains are rejected
/// because their stationary law is not unique.
pub fn stationary_distribution(p: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_stochastic(p)?;
    let n = p.len();
    if !reachable_from(p, 0, false).iter().all(|&x| x) || !reachable_from(p, 0, true).iter().all(|&x| x) {
        return Err(Error::NonErgodic("transition graph is not strongly connected".into()));
    }
    // Solve pi (P - I) = 0 with the last equation replaced by sum(pi) = 1.
    let mut a = vec![vec![0.0; n + 1]; n];
    for (i, row) in a.iter_mut().enumerate() {
        for j in 0..n {
            row[j] = p[j][i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    a[n - 1] = vec![1.0; n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty range");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::NonErgodic("singular stationary system".into()));
        }
        a.swap(col, pivot);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for c in col..=n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
    }
    Ok((0..n).map(|i| (a[i][n] / a[i][i]).max(0.0)).collect())
}

/// `sum_i pi_i H(P[i, .])` for an irreducible chain.
pub fn markov_entropy_rate(p: &[Vec<f64>]) -> Result<f64> {
    let pi = stationary_distribution(p)?;
    Ok(pi.iter().zip(p).map(|(w, row)| w * entropy_bits(row)).sum())
}

/// Transition matrix of an order-K chain lifted to its `A^K` contexts.
fn lifted_transition(params: &MarkovChainParams) -> Result<Vec<Vec<f64>>> {
    params.validate()?;
    let a = params.alphabet_size;
    let n_ctx = n_contexts_for(a, params.order)?;
    if n_ctx > 4096 {
        return Err(Error::param("order", "exact oracle limited to 4096 contexts"));
    }
    let mut p = vec![vec![0.0; n_ctx]; n_ctx];
    for (ctx, row) in params.next.iter().enumerate() {
        for (s, &q) in row.iter().enumerate() {
            p[ctx][(ctx * a + s) % n_ctx] += q;
        }
    }
    Ok(p)
}

/// Stationary law over contexts of an order-K chain.
pub fn markov_chain_stationary(params: &MarkovChainParams) -> Result<Vec<f64>> {
    if params.order == 0 {
        params.validate()?;
        return Ok(vec![1.0]);
    }
    stationary_distribution(&lifted_transition(params)?)
}

/// Exact stationary `H(X_t | previous m symbols)` for `m = 0..=max_order`.
pub fn markov_chain_conditional_entropies(params: &MarkovChainParams, max_order: usize) -> Result<Vec<f64>> {
    let pi = markov_chain_stationary(params)?;
    let a = params.alphabet_size;
    let k = params.order;
    let rate: f64 = pi.iter().zip(&params.next).map(|(w, row)| w * entropy_bits(row)).sum();
    let mut out = Vec::with_capacity(max_order + 1);
    for m in 0..=max_order.min(k) {
        // The last m digits of a K-context are ctx mod A^m.
        let n_m = a.pow(m as u32);
        let mut joint = vec![0.0; n_m * a];
        for (ctx, (&w, row)) in pi.iter().zip(&params.next).enumerate() {
            for (s, &q) in row.iter().enumerate() {
                joint[(ctx % n_m) * a + s] += w * q;
            }
        }
        let ctx_marg: Vec<f64> = joint.chunks(a).map(|c| c.iter().sum()).collect();
        out.push(entropy_bits(&joint) - entropy_bits(&ctx_marg));
    }
    out.resize(max_order + 1, rate);
    Ok(out)
}

/// Entropy rate of an order-K chain; equals its order-K conditional entropy.
pub fn markov_chain_entropy_rate(params: &MarkovChainParams) -> Result<f64> {
    Ok(*markov_chain_conditional_entropies(params, params.order)?.last().expect("nonempty"))
}

fn hmm_checked_stationary(params: &HmmParams) -> Result<[f64; 2]> {
    params.validate()?;
    let t: Vec<Vec<f64>> = params.transition.iter().map(|r| r.to_vec()).collect();
    let pi = stationary_distribution(&t)?;
    Ok([pi[0], pi[1]])
}

/// Exact block entropy `H(Y_1..Y_len)` of the stationary HMM output,
/// by forward recursion over all `2^len` output words.
fn hmm_block_entropy(params: &HmmParams, pi: [f64; 2], len: usize) -> f64 {
    if len == 0 {
        return 0.0;
    }
    // alpha[word][state] = P(word, hidden state at the last position).
    let mut alpha: Vec<[f64; 2]> = (0..2)
        .map(|y| [pi[0] * params.emission[0][y], pi[1] * params.emission[1][y]])
        .collect();
    for _ in 1..len {
        let mut next = Vec::with_capacity(alpha.len() * 2);
        for a in &alpha {
            let pred = [
                a[0] * params.transition[0][0] + a[1] * params.transition[1][0],
                a[0] * params.transition[0][1] + a[1] * params.transition[1][1],
            ];
            for y in 0..2 {
                next.push([pred[0] * params.emission[0][y], pred[1] * params.emission[1][y]]);
            }
        }
        alpha = next;
    }
    let word_probs: Vec<f64> = alpha.iter().map(|a| a[0] + a[1]).collect();
    entropy_bits(&word_probs)
}

/// Exact stationary `H(Y_t | Y_{t-m..t-1})` of the HMM output, `m <= 20`.
pub fn hmm_conditional_entropy(params: &HmmParams, m: usize) -> Result<f64> {
    if m > 20 {
        return Err(Error::param("m", "exact enumeration limited to m <= 20"));
    }
    let pi = hmm_checked_stationary(params)?;
    Ok(hmm_block_entropy(params, pi, m + 1) - hmm_block_entropy(params, pi, m))
}

/// Exact stationary `H(Y_t | Y_{t-1})` from the joint law of consecutive
/// (hidden, output) pairs.
pub fn hmm_pair_conditional_entropy(params: &HmmParams) -> Result<f64> {
    let pi = hmm_checked_stationary(params)?;
    let (t, e) = (&params.transition, &params.emission);
    let mut joint = [0.0; 4];
    for s0 in 0..2 {
        for s1 in 0..2 {
            for y0 in 0..2 {
                for y1 in 0..2 {
                    joint[y0 * 2 + y1] += pi[s0] * e[s0][y0] * t[s0][s1] * e[s1][y1];
                }
            }
        }
    }
    let marg = [joint[0] + joint[1], joint[2] + joint[3]];
    Ok(entropy_bits(&joint) - entropy_bits(&marg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observers::MarkovObserver;
    use crate::sources::{gen_hmm, gen_iid, gen_markov_chain};
    use crate::evaluation::average_log_loss;
    use proptest::prelude::*;

    fn raw(symbols: Vec<u8>, a: u32) -> SymbolSequence {
        SymbolSequence::from_raw(symbols, a, "test").unwrap()
    }

    fn flip_chain(n: usize, seed: u64) -> SymbolSequence {
        gen_markov_chain(&MarkovChainParams::binary_flip(0.1), n, seed).unwrap()
    }

    #[test]
    fn deterministic_sequence_has_zero_entropy() {
        let seq = raw(vec![0; 5000], 2);
        for m in 0..5 {
            assert_eq!(empirical_conditional_entropy(&seq, m).unwrap().value, 0.0);
        }
    }

    #[test]
    fn fair_coin_order_zero() {
        let seq = gen_iid(&[0.5, 0.5], 100_000, 3).unwrap();
        let h = empirical_conditional_entropy(&seq, 0).unwrap();
        assert!((h.value - 1.0).abs() <= 0.005);
        assert!(!h.undersampled && !h.no_repeats);
    }

    #[test]
    fn flip_chain_entropy_and_atoms() {
        let seq = flip_chain(100_000, 4);
        let hb = binary_entropy(0.1);
        assert!((hb - 0.4690).abs() < 5e-5);
        assert!((empirical_conditional_entropy(&seq, 1).unwrap().value - hb).abs() <= 0.01);
        assert!((cmi_atom(&seq, 1).unwrap() - (1.0 - hb)).abs() <= 0.01);
        assert!(cmi_atom(&seq, 2).unwrap().abs() <= 0.01);
        let series = excess_entropy_truncated(&seq, 3).unwrap();
        assert!((series.truncated_excess_entropy - (1.0 - hb)).abs() <= 0.01);
        assert!(series.atoms[1..].iter().all(|&a| a <= 0.01));
    }

    #[test]
    fn iid_atoms_vanish() {
        let seq = gen_iid(&[0.3, 0.7], 100_000, 5).unwrap();
        for m in 1..=4 {
            assert!(cmi_atom(&seq, m).unwrap().abs() <= 0.01, "m={m}");
        }
        assert!(excess_entropy_truncated(&seq, 4).unwrap().truncated_excess_entropy <= 0.01);
    }

    #[test]
    fn alternation_has_one_bit_of_excess_entropy() {
        // Odd length so the scored window t >= 1 holds 500 of each symbol.
        let seq = raw((0..1001).map(|t| (t % 2) as u8).collect(), 2);
        let series = excess_entropy_truncated(&seq, 1).unwrap();
        assert_eq!(series.truncated_excess_entropy, 1.0);
        assert_eq!(series.entropies[1].value, 0.0);
    }

    #[test]
    fn undersampling_is_flagged() {
        let seq = gen_iid(&[0.5, 0.5], 200, 6).unwrap();
        let h = empirical_conditional_entropy(&seq, 12).unwrap();
        assert!(h.undersampled);
        assert!(h.value.is_finite());
        let single = raw(vec![0, 1, 1, 0, 1], 2);
        assert!(empirical_conditional_entropy(&single, 4).unwrap().no_repeats);
        assert!(empirical_conditional_entropy(&single, 5).is_err());
        assert!(cmi_atom(&single, 0).is_err());
    }

    #[test]
    fn sparse_counts_match_dense() {
        // 256-symbol alphabet at order 3 exceeds the dense limit.
        let bytes: Vec<u8> = (0..20_000u32).map(|i| (i.wrapping_mul(2654435761) >> 13) as u8 % 7).collect();
        let wide = raw(bytes.clone(), 256);
        let narrow = raw(bytes, 7);
        for m in 0..=3 {
            let a = empirical_conditional_entropy(&wide, m).unwrap().value;
            let b = empirical_conditional_entropy(&narrow, m).unwrap().value;
            assert!((a - b).abs() < 1e-9, "m={m}: {a} vs {b}");
        }
    }

    #[test]
    fn csv_layout() {
        let seq = flip_chain(2000, 1);
        let mut buf = Vec::new();
        excess_entropy_truncated(&seq, 2).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("m,atom_raw,atom_clamped,partial_sum\n1,"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn oracle_examples() {
        let flip = vec![vec![0.9, 0.1], vec![0.1, 0.9]];
        assert!((markov_entropy_rate(&flip).unwrap() - binary_entropy(0.1)).abs() < 1e-12);
        let identity = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(matches!(markov_entropy_rate(&identity), Err(Error::NonErgodic(_))));
        let coin = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        assert!((markov_entropy_rate(&coin).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(markov_entropy_rate(&[vec![0.5, 0.6], vec![0.5, 0.5]]), Err(Error::NotStochastic(_))));
    }

    #[test]
    fn stationary_law_of_asymmetric_chain() {
        // Two-state chain: pi_0 = b / (a + b).
        let p = vec![vec![0.7, 0.3], vec![0.1, 0.9]];
        let pi = stationary_distribution(&p).unwrap();
        assert!((pi[0] - 0.25).abs() < 1e-12 && (pi[1] - 0.75).abs() < 1e-12);
        // Periodic but irreducible chains have a unique stationary law.
        let cycle = vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]];
        let pi = stationary_distribution(&cycle).unwrap();
        assert!(pi.iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn lifted_chain_matches_first_order_formula() {
        let params = MarkovChainParams::binary_flip(0.1);
        let h = markov_chain_conditional_entropies(&params, 3).unwrap();
        assert!((h[0] - 1.0).abs() < 1e-12);
        for &v in &h[1..] {
            assert!((v - binary_entropy(0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn order_two_chain_oracle_against_enumeration() {
        let p_one = [0.1, 0.7, 0.4, 0.85];
        let params = MarkovChainParams::binary(2, &p_one);
        let h = markov_chain_conditional_entropies(&params, 3).unwrap();
        // Independent oracle: iterate the distribution over 2-contexts to convergence.
        let mut pi = [0.25f64; 4];
        for _ in 0..10_000 {
            let mut next = [0.0; 4];
            for c in 0..4 {
                next[(c * 2) % 4] += pi[c] * (1.0 - p_one[c]);
                next[(c * 2 + 1) % 4] += pi[c] * p_one[c];
            }
            pi = next;
        }
        let rate: f64 = (0..4).map(|c| pi[c] * binary_entropy(p_one[c])).sum();
        let p1: f64 = (0..4).map(|c| pi[c] * p_one[c]).sum();
        assert!((h[0] - binary_entropy(p1)).abs() < 1e-10);
        assert!((h[2] - rate).abs() < 1e-10 && (h[3] - rate).abs() < 1e-10);
        assert!(h[1] >= h[2] - 1e-12 && h[0] >= h[1] - 1e-12);
    }

    #[test]
    fn order_k_atoms_vanish_beyond_k() {
        let order2 = MarkovChainParams::binary(2, &[0.1, 0.7, 0.4, 0.85]);
        let order3 = MarkovChainParams::binary(3, &[0.05, 0.6, 0.3, 0.9, 0.2, 0.75, 0.5, 0.95]);
        for (params, seed) in [(order2, 11), (order3, 12)] {
            let seq = gen_markov_chain(&params, 100_000, seed).unwrap();
            let series = excess_entropy_truncated(&seq, 6).unwrap();
            for &a in &series.atoms_raw[params.order..] {
                assert!(a <= 0.01, "order {}: atom {a}", params.order);
            }
            let exact = markov_chain_conditional_entropies(&params, 6).unwrap();
            let e_exact = exact[0] - exact[6];
            assert!((series.truncated_excess_entropy - e_exact).abs() <= 0.02);
        }
    }

    #[test]
    fn online_markov_loss_tracks_plugin_entropy() {
        let sources = [
            gen_iid(&[0.5, 0.5], 100_000, 21).unwrap(),
            flip_chain(100_000, 22),
            gen_markov_chain(&MarkovChainParams::binary(2, &[0.1, 0.7, 0.4, 0.85]), 100_000, 23).unwrap(),
        ];
        for seq in &sources {
            for order in 0..=2 {
                let mut obs = MarkovObserver::new(order, 1.0, 2).unwrap();
                let loss = average_log_loss(&mut obs, seq, order).unwrap().avg_loss;
                let h = empirical_conditional_entropy(seq, order).unwrap().value;
                assert!((loss - h).abs() <= 0.03, "order {order}: {loss} vs {h}");
            }
        }
    }

    #[test]
    fn hmm_pair_oracle() {
        let params = HmmParams::default();
        let exact = hmm_pair_conditional_entropy(&params).unwrap();
        assert!((exact - hmm_conditional_entropy(&params, 1).unwrap()).abs() < 1e-12);
        let seq = gen_hmm(&params, 50_000, 31).unwrap();
        let h1 = empirical_conditional_entropy(&seq, 1).unwrap().value;
        assert!((h1 - exact).abs() <= 0.02, "{h1} vs {exact}");
        // Noise-free emissions reduce to the hidden chain.
        let clear = HmmParams {
            transition: [[0.9, 0.1], [0.3, 0.7]],
            emission: [[1.0, 0.0], [0.0, 1.0]],
        };
        let t = vec![vec![0.9, 0.1], vec![0.3, 0.7]];
        assert!((hmm_pair_conditional_entropy(&clear).unwrap() - markov_entropy_rate(&t).unwrap()).abs() < 1e-12);
        let stuck = HmmParams {
            transition: [[1.0, 0.0], [0.0, 1.0]],
            ..HmmParams::default()
        };
        assert!(hmm_pair_conditional_entropy(&stuck).is_err());
    }

    #[test]
    fn hmm_conditional_entropies_decrease() {
        let params = HmmParams::default();
        let h: Vec<f64> = (0..10).map(|m| hmm_conditional_entropy(&params, m).unwrap()).collect();
        assert!((h[0] - 1.0).abs() < 1e-12);
        assert!(h.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    proptest! {
        #[test]
        fn telescoping_is_exact(
            symbols in proptest::collection::vec(0u8..3, 20..400),
            max_order in 1usize..5,
        ) {
            let seq = raw(symbols, 3);
            let series = excess_entropy_truncated(&seq, max_order).unwrap();
            let sum: f64 = series.atoms_raw.iter().sum();
            let direct = series.entropies[0].value - series.entropies[max_order].value;
            prop_assert!((sum - direct).abs() <= 1e-12);
            prop_assert!(series.partial_sums.windows(2).all(|w| w[1] >= w[0]));
            for e in &series.entropies {
                prop_assert!(e.value >= 0.0 && e.value <= 3f64.log2() + 1e-12);
            }
        }
    }
}
