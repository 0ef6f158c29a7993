//! Loss, regret and CAA statistics over a finite observer set.
//!
//! The best observer in the configured set defines `L*`, so every regret
//! is relative to that set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observers::{Codelength, ObserverSpec, SequentialObserver};
use crate::sources::SymbolSequence;

/// Finite-sample estimate of an observer's average loss on one sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub observer: ObserverSpec,
    /// Bits per scored symbol.
    pub avg_loss: f64,
    pub n_scored: usize,
    pub burn_in: usize,
    /// [`SymbolSequence::fingerprint`] of the scored sequence.
    pub sequence_id: u64,
}

impl LossReport {
    /// Codelength as loss: every symbol is scored, no burn-in.
    pub fn from_codelength(codelength: &Codelength, sequence: &SymbolSequence) -> Self {
        LossReport {
            observer: ObserverSpec::Coder {
                coder: codelength.coder,
            },
            avg_loss: codelength.bits_per_symbol,
            n_scored: sequence.len(),
            burn_in: 0,
            sequence_id: sequence.fingerprint(),
        }
    }
}

/// Online log-loss: one left-to-right pass; positions `t >= burn_in` are
/// scored with `-log2 P(x_t)` before the observer sees `x_t`.
pub fn average_log_loss<O>(observer: &mut O, sequence: &SymbolSequence, burn_in: usize) -> Result<LossReport>
where
    O: SequentialObserver + ?Sized,
{
    if burn_in >= sequence.len() {
        return Err(Error::NoScoredSteps {
            burn_in,
            len: sequence.len(),
        });
    }
    if observer.alphabet_size() != sequence.alphabet_size() as usize {
        return Err(Error::param(
            "observer",
            format!(
                "alphabet size {} does not match sequence alphabet {}",
                observer.alphabet_size(),
                sequence.alphabet_size()
            ),
        ));
    }
    let symbols = sequence.symbols();
    for &s in &symbols[..burn_in] {
        observer.update(s);
    }
    let mut total = 0.0;
    for &s in &symbols[burn_in..] {
        total -= observer.prob(s).log2();
        observer.update(s);
    }
    let n_scored = symbols.len() - burn_in;
    Ok(LossReport {
        observer: observer.spec(),
        avg_loss: total / n_scored as f64,
        n_scored,
        burn_in,
        sequence_id: sequence.fingerprint(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretEntry {
    pub observer: ObserverSpec,
    pub avg_loss: f64,
    pub regret: f64,
}

/// Per-observer loss and regret `L(A) - L*` with `L*` the best loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTable {
    pub entries: Vec<RegretEntry>,
    pub l_star: f64,
}

impl RegretTable {
    /// Builds the table from raw (observer, loss) pairs.
    pub fn from_losses(losses: Vec<(ObserverSpec, f64)>) -> Result<Self> {
        if losses.is_empty() {
            return Err(Error::param("reports", "need at least one observer"));
        }
        if losses.iter().any(|(_, l)| !l.is_finite()) {
            return Err(Error::param("reports", "losses must be finite"));
        }
        let l_star = losses.iter().map(|(_, l)| *l).fold(f64::INFINITY, f64::min);
        let entries = losses
            .into_iter()
            .map(|(observer, avg_loss)| RegretEntry {
                observer,
                avg_loss,
                regret: avg_loss - l_star,
            })
            .collect();
        Ok(RegretTable { entries, l_star })
    }

    pub fn regrets(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.regret).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Regret table from reports that must share one sequence and burn-in.
pub fn regret_table(reports: &[LossReport]) -> Result<RegretTable> {
    let first = reports
        .first()
        .ok_or_else(|| Error::param("reports", "need at least one report"))?;
    if reports
        .iter()
        .any(|r| r.sequence_id != first.sequence_id || r.burn_in != first.burn_in)
    {
        return Err(Error::MismatchedReports);
    }
    RegretTable::from_losses(reports.iter().map(|r| (r.observer.clone(), r.avg_loss)).collect())
}

/// Variance and max-gap of regret under a prior over observers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaaResult {
    /// Bits squared.
    pub variance: f64,
    /// Bits.
    pub max_gap: f64,
    pub prior: Vec<f64>,
}

pub fn uniform_prior(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn check_prior(prior: &[f64], n: usize) -> Result<()> {
    if prior.len() != n {
        return Err(Error::InvalidPrior(format!("{} weights for {n} observers", prior.len())));
    }
    if prior.iter().any(|&w| !(0.0..=1.0).contains(&w)) {
        return Err(Error::InvalidPrior("weights must lie in [0, 1]".into()));
    }
    let sum: f64 = prior.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidPrior(format!("weights sum to {sum}")));
    }
    Ok(())
}

/// `Var_{A ~ prior}[R(A)]`, uniform when `prior` is `None`, plus the gap.
pub fn caa_variance(table: &RegretTable, prior: Option<&[f64]>) -> Result<CaaResult> {
    let prior = match prior {
        Some(p) => p.to_vec(),
        None => uniform_prior(table.len()),
    };
    check_prior(&prior, table.len())?;
    let regrets = table.regrets();
    let mean: f64 = prior.iter().zip(&regrets).map(|(w, r)| w * r).sum();
    let variance = prior
        .iter()
        .zip(&regrets)
        .map(|(w, r)| w * (r - mean) * (r - mean))
        .sum();
    Ok(CaaResult {
        variance,
        max_gap: caa_max(table),
        prior,
    })
}

/// `sup_{A,B} |R(A) - R(B)|`; equals the largest regret since the best
/// observer has regret 0.
pub fn caa_max(table: &RegretTable) -> f64 {
    let regrets = table.regrets();
    let hi = regrets.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = regrets.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Two observers with loss gap `delta_l` and prior mass `p` on the weaker:
/// `p (1 - p) delta_l^2`.
pub fn two_alg_closed_form(delta_l: f64, p: f64) -> Result<f64> {
    if delta_l.is_nan() || delta_l < 0.0 {
        return Err(Error::param("delta_l", format!("{delta_l} must be nonnegative")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} outside [0, 1]")));
    }
    Ok(p * (1.0 - p) * delta_l * delta_l)
}

/// Mean and sample standard deviation across replicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return MeanStd { mean: f64::NAN, std: f64::NAN, n };
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        MeanStd { mean, std, n }
    }
}
