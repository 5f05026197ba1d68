//! Instance generators: pigeonhole formulas and seeded random formulas.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formula::{Clause, Formula, Lit, Var, WeightedClause};

#[derive(Debug, Error, PartialEq)]
pub enum InstanceError {
    #[error("pigeonhole instances need at least one hole")]
    NoHoles,
    #[error("invalid parameter: {0}")]
    Invalid(String),
}

/// Variable for "pigeon `i` sits in hole `j`" (both 1-based) with `n` holes.
pub fn pigeon_var(n: u32, i: u32, j: u32) -> Var {
    Var::new((i - 1) * n + j)
}

/// `n + 1` pigeons in `n` holes as plain MaxSAT.
///
/// One clause per pigeon saying it sits somewhere, then for every hole and
/// every pair of pigeons a clause forbidding both in that hole.
pub fn pigeonhole(n: u32) -> Result<Formula, InstanceError> {
    if n == 0 {
        return Err(InstanceError::NoHoles);
    }
    let pigeons = n + 1;
    let mut clauses = Vec::new();
    for i in 1..=pigeons {
        clauses.push(Clause::new((1..=n).map(|j| pigeon_var(n, i, j).pos())));
    }
    for j in 1..=n {
        for i in 1..=pigeons {
            for k in i + 1..=pigeons {
                clauses.push(Clause::new([
                    pigeon_var(n, i, j).neg(),
                    pigeon_var(n, k, j).neg(),
                ]));
            }
        }
    }
    Ok(Formula::unweighted(pigeons * n, clauses).expect("indices in range"))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RandomParams {
    pub num_vars: u32,
    pub num_clauses: usize,
    /// Clause lengths are uniform in `1..=max_len` (capped by `num_vars`).
    pub max_len: usize,
    /// Soft weights are uniform in `1..=max_weight`.
    pub max_weight: u64,
    /// Probability that a clause is hard.
    pub hard_fraction: f64,
    pub seed: u64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            num_vars: 10,
            num_clauses: 20,
            max_len: 3,
            max_weight: 1,
            hard_fraction: 0.0,
            seed: 0,
        }
    }
}

/// A random formula; the same parameters always give the same formula.
pub fn random_formula(p: &RandomParams) -> Result<Formula, InstanceError> {
    if p.max_len == 0 || p.max_weight == 0 {
        return Err(InstanceError::Invalid("max_len and max_weight must be positive".into()));
    }
    if !(0.0..=1.0).contains(&p.hard_fraction) {
        return Err(InstanceError::Invalid("hard_fraction must lie in [0, 1]".into()));
    }
    if p.num_vars == 0 && p.num_clauses > 0 {
        return Err(InstanceError::Invalid("clauses need at least one variable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut clauses = Vec::with_capacity(p.num_clauses);
    for _ in 0..p.num_clauses {
        let len = rng.gen_range(1..=p.max_len.min(p.num_vars as usize));
        let vars = sample(&mut rng, p.num_vars as usize, len);
        let clause = Clause::new(
            vars.iter()
                .map(|v| Lit::new(Var::new(v as u32 + 1), rng.gen_bool(0.5))),
        );
        clauses.push(if rng.gen_bool(p.hard_fraction) {
            WeightedClause::hard(clause)
        } else {
            WeightedClause::soft(clause, rng.gen_range(1..=p.max_weight))
        });
    }
    Formula::new(p.num_vars, clauses).map_err(|e| InstanceError::Invalid(e.to_string()))
}
