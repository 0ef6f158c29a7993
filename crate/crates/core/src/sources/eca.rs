use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Wrap,
}

/// Elementary cellular automaton run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcaSpec {
    pub rule: u32,
    pub width: usize,
    pub steps: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl EcaSpec {
    pub fn validate(&self) -> Result<u8> {
        let rule = u8::try_from(self.rule)
            .map_err(|_| Error::param("rule", format!("{} not in [0, 255]", self.rule)))?;
        if self.width < 2 * self.steps + 1 {
            return Err(Error::param(
                "width",
                format!("{} < 2 * steps + 1 = {}", self.width, 2 * self.steps + 1),
            ));
        }
        Ok(rule)
    }
}

/// Output bit for each neighbourhood, indexed by `left << 2 | centre << 1 | right`.
pub fn rule_table(rule: u8) -> [u8; 8] {
    std::array::from_fn(|i| (rule >> i) & 1)
}

/// One synchronous update of a periodic row.
pub fn step_wrapped(table: &[u8; 8], row: &[u8]) -> Vec<u8> {
    let w = row.len();
    (0..w)
        .map(|i| {
            let l = row[(i + w - 1) % w];
            let c = row[i];
            let r = row[(i + 1) % w];
            table[usize::from(l << 2 | c << 1 | r)]
        })
        .collect()
}

/// An initial-row window around a target column and the target's value
/// after `steps` updates.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionInstance {
    pub column: usize,
    /// Initial cells at offsets `-radius..=radius` from `column`.
    pub window: Vec<u8>,
    pub target: u8,
}

#[derive(Debug, Clone)]
pub struct EcaRun {
    pub spec: EcaSpec,
    pub seed: u64,
    /// `grid[t]` is the row after `t` updates; `grid[0]` is i.i.d. fair.
    pub grid: Vec<Vec<u8>>,
}

impl EcaRun {
    pub fn initial_row(&self) -> &[u8] {
        &self.grid[0]
    }

    pub fn final_row(&self) -> &[u8] {
        &self.grid[self.spec.steps]
    }

    /// Prediction instances at columns spaced `2 * steps + 1` apart, so the
    /// light cones of distinct targets never overlap.
    pub fn instances(&self, radius: usize) -> Vec<PredictionInstance> {
        let k = self.spec.steps;
        let w = self.spec.width;
        let spacing = 2 * k + 1;
        let row = self.initial_row();
        (0..w / spacing)
            .map(|i| {
                let column = i * spacing + k;
                let window = (0..=2 * radius)
                    .map(|j| row[(column + w - radius + j) % w])
                    .collect();
                PredictionInstance {
                    column,
                    window,
                    target: self.final_row()[column],
                }
            })
            .collect()
    }
}

/// Evolves an i.i.d. fair initial row for `spec.steps` updates with
/// periodic boundary.
pub fn gen_eca(spec: &EcaSpec, seed: u64) -> Result<EcaRun> {
    let rule = spec.validate()?;
    let mut rng = rng_from_seed(seed);
    let initial: Vec<u8> = (0..spec.width).map(|_| u8::from(rng.random::<bool>())).collect();
    Ok(evolve(spec.clone(), seed, rule, initial))
}

/// Same as [`gen_eca`] from a caller-supplied initial row.
pub fn gen_eca_from_row(spec: &EcaSpec, initial: Vec<u8>) -> Result<EcaRun> {
    let rule = spec.validate()?;
    if initial.len() != spec.width || initial.iter().any(|&b| b > 1) {
        return Err(Error::param("initial", "row must be `width` bits"));
    }
    Ok(evolve(spec.clone(), 0, rule, initial))
}

fn evolve(spec: EcaSpec, seed: u64, rule: u8, initial: Vec<u8>) -> EcaRun {
    let table = rule_table(rule);
    let mut grid = Vec::with_capacity(spec.steps + 1);
    grid.push(initial);
    for t in 0..spec.steps {
        let next = step_wrapped(&table, &grid[t]);
        grid.push(next);
    }
    EcaRun { spec, seed, grid }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_table_entries() {
        assert_eq!(rule_table(90)[0b101], 0);
        assert_eq!(rule_table(110)[0b110], 1);
        assert_eq!(rule_table(30), [0, 1, 1, 1, 1, 0, 0, 0]);
        assert_eq!(rule_table(0), [0; 8]);
    }

    #[test]
    fn rule_90_single_seed_is_pascal_mod_2() {
        let spec = EcaSpec {
            rule: 90,
            width: 21,
            steps: 2,
            boundary: Boundary::Wrap,
        };
        let mut row = vec![0; 21];
        row[10] = 1;
        let run = gen_eca_from_row(&spec, row).unwrap();
        let ones: Vec<usize> = (0..21).filter(|&i| run.grid[2][i] == 1).collect();
        assert_eq!(ones, vec![8, 12]);
    }

    #[test]
    fn rule_90_is_additive() {
        let spec = EcaSpec {
            rule: 90,
            width: 64,
            steps: 20,
            boundary: Boundary::Wrap,
        };
        for seed in 0..10 {
            let x = gen_eca(&spec, seed).unwrap();
            let y = gen_eca(&spec, seed + 100).unwrap();
            let xy: Vec<u8> = x.grid[0].iter().zip(&y.grid[0]).map(|(a, b)| a ^ b).collect();
            let z = gen_eca_from_row(&spec, xy).unwrap();
            for t in 0..=20 {
                for i in 0..64 {
                    assert_eq!(z.grid[t][i], x.grid[t][i] ^ y.grid[t][i]);
                }
            }
        }
    }

    #[test]
    fn instances_cover_disjoint_light_cones() {
        let spec = EcaSpec {
            rule: 110,
            width: 41 * 5 + 3,
            steps: 20,
            boundary: Boundary::Wrap,
        };
        let run = gen_eca(&spec, 3).unwrap();
        let inst = run.instances(20);
        assert_eq!(inst.len(), 5);
        assert_eq!(inst[1].column, 41 + 20);
        assert_eq!(inst[1].window.len(), 41);
        assert_eq!(inst[1].window[0], run.grid[0][41]);
        assert_eq!(inst[1].target, run.grid[20][61]);
        let narrow = run.instances(2);
        assert_eq!(narrow[1].window, run.grid[0][59..=63].to_vec());
    }

    #[test]
    fn errors() {
        let bad_rule = EcaSpec {
            rule: 256,
            width: 100,
            steps: 3,
            boundary: Boundary::Wrap,
        };
        assert!(gen_eca(&bad_rule, 0).is_err());
        let narrow = EcaSpec {
            rule: 30,
            width: 6,
            steps: 3,
            boundary: Boundary::Wrap,
        };
        assert!(gen_eca(&narrow, 0).is_err());
    }
}
