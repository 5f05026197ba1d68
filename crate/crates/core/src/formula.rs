//! Weighted clause databases covering plain, partial, weighted and weighted
//! partial MaxSAT, plus assignment evaluation.
//!
//! Hard clauses are stored with [`Weight::Hard`] rather than with the numeric
//! sentinel; the sentinel (`top`) is only materialised when writing WCNF.

use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A propositional variable, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// Creates the variable with the given 1-based index.
    ///
    /// # Panics
    ///
    /// If `index` is zero.
    pub fn new(index: u32) -> Var {
        assert!(index >= 1, "variable indices are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    /// 0-based position, handy for indexing arrays.
    pub fn idx0(self) -> usize {
        (self.0 - 1) as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A literal, packed as `2 * (var - 1) + negated`.
///
/// The derived ordering therefore sorts by `(var, negated)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit((var.0 - 1) * 2 + negated as u32)
    }

    pub fn from_code(code: usize) -> Lit {
        Lit(code as u32)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn var(self) -> Var {
        Var(self.0 / 2 + 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Parses a non-zero DIMACS integer.
    pub fn from_dimacs(value: i64) -> Option<Lit> {
        if value == 0 || value.unsigned_abs() > u32::MAX as u64 / 2 {
            return None;
        }
        Some(Lit::new(Var(value.unsigned_abs() as u32), value < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var().0 as i64;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "~")?;
        }
        write!(f, "{}", self.var())
    }
}

/// A disjunction of literals, kept sorted with duplicates removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Clause {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    /// Builds a clause from DIMACS integers. Panics on `0`.
    pub fn from_dimacs(lits: &[i64]) -> Clause {
        Clause::new(
            lits.iter()
                .map(|&l| Lit::from_dimacs(l).expect("non-zero literal")),
        )
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    /// True when the clause contains some literal together with its complement.
    pub fn is_tautology(&self) -> bool {
        // sorted by (var, negated), so complements are adjacent
        self.lits.windows(2).any(|w| w[0].var() == w[1].var())
    }

    pub fn max_var(&self) -> Option<Var> {
        self.lits.last().map(|l| l.var())
    }

    pub fn is_satisfied(&self, a: &Assignment) -> bool {
        self.lits.iter().any(|&l| a.lit_value(l))
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Soft(u64),
    Hard,
}

impl Weight {
    pub fn is_hard(self) -> bool {
        matches!(self, Weight::Hard)
    }

    pub fn soft(self) -> Option<u64> {
        match self {
            Weight::Soft(w) => Some(w),
            Weight::Hard => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeightedClause {
    pub clause: Clause,
    pub weight: Weight,
}

impl WeightedClause {
    pub fn soft(clause: Clause, weight: u64) -> WeightedClause {
        WeightedClause {
            clause,
            weight: Weight::Soft(weight),
        }
    }

    pub fn hard(clause: Clause) -> WeightedClause {
        WeightedClause {
            clause,
            weight: Weight::Hard,
        }
    }
}

/// The four MaxSAT problem classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain MaxSAT: unit weights, no hard clauses.
    Ms,
    /// Partial MaxSAT: unit soft weights plus hard clauses.
    Pms,
    /// Weighted MaxSAT: arbitrary soft weights, no hard clauses.
    Wms,
    /// Weighted partial MaxSAT.
    Wpms,
}

impl Variant {
    pub fn has_hard(self) -> bool {
        matches!(self, Variant::Pms | Variant::Wpms)
    }

    /// The class an instance moves to once hard clauses are added.
    pub fn with_hard(self) -> Variant {
        match self {
            Variant::Ms | Variant::Pms => Variant::Pms,
            Variant::Wms | Variant::Wpms => Variant::Wpms,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Ms => "MS",
            Variant::Pms => "PMS",
            Variant::Wms => "WMS",
            Variant::Wpms => "WPMS",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("clause {clause} references variable {var} but the formula has {num_vars} variables")]
    VarOutOfRange { clause: usize, var: u32, num_vars: u32 },
    #[error("clause {clause} has soft weight 0")]
    ZeroWeight { clause: usize },
    #[error("sum of soft weights overflows 64 bits")]
    WeightOverflow,
    #[error("top {top} does not exceed the soft weight sum {sum}")]
    TopTooSmall { top: u64, sum: u64 },
}

/// A weighted CNF formula.
///
/// `top` always exceeds the sum of the soft weights, so an assignment
/// violating a hard clause can never beat one that does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    num_vars: u32,
    clauses: Vec<WeightedClause>,
    top: u64,
}

impl Formula {
    /// Builds a formula with `top` set to one more than the soft weight sum.
    pub fn new(num_vars: u32, clauses: Vec<WeightedClause>) -> Result<Formula, FormulaError> {
        let sum = check_clauses(num_vars, &clauses)?;
        let top = sum.checked_add(1).ok_or(FormulaError::WeightOverflow)?;
        Ok(Formula {
            num_vars,
            clauses,
            top,
        })
    }

    pub fn with_top(
        num_vars: u32,
        clauses: Vec<WeightedClause>,
        top: u64,
    ) -> Result<Formula, FormulaError> {
        let sum = check_clauses(num_vars, &clauses)?;
        if top <= sum {
            return Err(FormulaError::TopTooSmall { top, sum });
        }
        Ok(Formula {
            num_vars,
            clauses,
            top,
        })
    }

    /// Plain MaxSAT formula with every clause at weight 1.
    pub fn unweighted(num_vars: u32, clauses: Vec<Clause>) -> Result<Formula, FormulaError> {
        Formula::new(
            num_vars,
            clauses
                .into_iter()
                .map(|c| WeightedClause::soft(c, 1))
                .collect(),
        )
    }

    pub fn empty() -> Formula {
        Formula {
            num_vars: 0,
            clauses: Vec::new(),
            top: 1,
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[WeightedClause] {
        &self.clauses
    }

    pub fn top(&self) -> u64 {
        self.top
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> {
        (1..=self.num_vars).map(Var)
    }

    pub fn soft_weight_sum(&self) -> u64 {
        // checked at construction
        self.clauses.iter().filter_map(|c| c.weight.soft()).sum()
    }

    pub fn num_hard(&self) -> usize {
        self.clauses.iter().filter(|c| c.weight.is_hard()).count()
    }

    pub fn num_soft(&self) -> usize {
        self.clauses.len() - self.num_hard()
    }

    /// Classification derived from the clause set.
    pub fn variant(&self) -> Variant {
        let hard = self.clauses.iter().any(|c| c.weight.is_hard());
        let unit = self
            .clauses
            .iter()
            .all(|c| matches!(c.weight, Weight::Hard | Weight::Soft(1)));
        match (hard, unit) {
            (false, true) => Variant::Ms,
            (true, true) => Variant::Pms,
            (false, false) => Variant::Wms,
            (true, false) => Variant::Wpms,
        }
    }

    pub fn evaluate(&self, a: &Assignment) -> Evaluation {
        let mut eval = Evaluation::default();
        for wc in &self.clauses {
            if wc.clause.is_satisfied(a) {
                continue;
            }
            match wc.weight {
                Weight::Hard => eval.hard_violations += 1,
                Weight::Soft(w) => eval.soft_unsat_weight += w,
            }
        }
        eval
    }

    /// Appends `extra_hard` as hard clauses over `new_num_vars` variables.
    ///
    /// Soft weights are untouched, so the result keeps the same `top`; the
    /// variant moves to its partial counterpart when anything was added.
    pub fn lift_to_partial(
        &self,
        extra_hard: Vec<Clause>,
        new_num_vars: u32,
    ) -> Result<Formula, FormulaError> {
        let num_vars = new_num_vars.max(self.num_vars);
        let mut clauses = self.clauses.clone();
        clauses.extend(extra_hard.into_iter().map(WeightedClause::hard));
        Formula::with_top(num_vars, clauses, self.top)
    }

    /// The clauses as a sorted multiset, for order-insensitive comparison.
    pub fn clause_multiset(&self) -> Vec<WeightedClause> {
        let mut v = self.clauses.clone();
        v.sort_unstable();
        v
    }
}

fn check_clauses(num_vars: u32, clauses: &[WeightedClause]) -> Result<u64, FormulaError> {
    let mut sum: u64 = 0;
    for (i, wc) in clauses.iter().enumerate() {
        if let Some(v) = wc.clause.max_var() {
            if v.index() > num_vars {
                return Err(FormulaError::VarOutOfRange {
                    clause: i,
                    var: v.index(),
                    num_vars,
                });
            }
        }
        if let Weight::Soft(w) = wc.weight {
            if w == 0 {
                return Err(FormulaError::ZeroWeight { clause: i });
            }
            sum = sum.checked_add(w).ok_or(FormulaError::WeightOverflow)?;
        }
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Evaluation {
    pub hard_violations: usize,
    pub soft_unsat_weight: u64,
}

/// A total assignment to variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn all_false(num_vars: u32) -> Assignment {
        Assignment {
            values: vec![false; num_vars as usize],
        }
    }

    /// Decodes the low `num_vars` bits of `bits`, bit `i` holding `x_{i+1}`.
    pub fn from_bits(num_vars: u32, bits: u64) -> Assignment {
        Assignment {
            values: (0..num_vars).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value(&self, v: Var) -> bool {
        self.values[v.idx0()]
    }

    pub fn set(&mut self, v: Var, value: bool) {
        self.values[v.idx0()] = value;
    }

    pub fn lit_value(&self, l: Lit) -> bool {
        self.values[l.var().idx0()] != l.is_negated()
    }

    /// Keeps only the first `num_vars` variables.
    pub fn truncated(&self, num_vars: u32) -> Assignment {
        Assignment {
            values: self.values[..num_vars as usize].to_vec(),
        }
    }

    /// DIMACS-style literal list, e.g. `1 -2 3`.
    pub fn to_dimacs(&self) -> String {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if b {
                    format!("{}", i + 1)
                } else {
                    format!("-{}", i + 1)
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub fn example1() -> Formula {
        Formula::unweighted(
            3,
            vec![
                Clause::from_dimacs(&[1, 2]),
                Clause::from_dimacs(&[-1, 2]),
                Clause::from_dimacs(&[-2]),
                Clause::from_dimacs(&[3, 2]),
                Clause::from_dimacs(&[-3, 2]),
            ],
        )
        .unwrap()
    }

    pub fn example4() -> Formula {
        Formula::new(
            3,
            vec![
                WeightedClause::soft(Clause::from_dimacs(&[1, 2]), 1),
                WeightedClause::soft(Clause::from_dimacs(&[-1, 2]), 1),
                WeightedClause::soft(Clause::from_dimacs(&[-2]), 5),
                WeightedClause::hard(Clause::from_dimacs(&[-3, 2])),
                WeightedClause::hard(Clause::from_dimacs(&[3, 2])),
            ],
        )
        .unwrap()
    }

    #[test]
    fn literal_encoding() {
        let l = Lit::from_dimacs(-3).unwrap();
        assert_eq!(l.var(), Var::new(3));
        assert!(l.is_negated());
        assert_eq!(!!l, l);
        assert_eq!((!l).to_dimacs(), 3);
        assert!(Lit::from_dimacs(0).is_none());
        assert!(Var::new(1).pos() < Var::new(1).neg());
        assert!(Var::new(1).neg() < Var::new(2).pos());
    }

    #[test]
    fn clause_normalization() {
        let c = Clause::from_dimacs(&[3, -1, 3, 2]);
        assert_eq!(
            c.lits().iter().map(|l| l.to_dimacs()).collect::<Vec<_>>(),
            vec![-1, 2, 3]
        );
        assert!(!c.is_tautology());
        assert!(Clause::from_dimacs(&[2, -1, -2]).is_tautology());
    }

    #[test]
    fn evaluate_example1() {
        let f = example1();
        let a = Assignment::new(vec![false, true, false]);
        assert_eq!(
            f.evaluate(&a),
            Evaluation {
                hard_violations: 0,
                soft_unsat_weight: 1
            }
        );
    }

    #[test]
    fn evaluate_example4() {
        let f = example4();
        let a = Assignment::new(vec![false, true, false]);
        assert_eq!(
            f.evaluate(&a),
            Evaluation {
                hard_violations: 0,
                soft_unsat_weight: 5
            }
        );
        // x2 = 0 breaks exactly one of the two hard clauses
        let a = Assignment::new(vec![false, false, false]);
        assert_eq!(f.evaluate(&a).hard_violations, 1);
    }

    #[test]
    fn evaluate_empty() {
        let f = Formula::empty();
        assert_eq!(f.evaluate(&Assignment::all_false(0)), Evaluation::default());
        let f = Formula::new(2, vec![]).unwrap();
        assert_eq!(
            f.evaluate(&Assignment::new(vec![true, false])),
            Evaluation::default()
        );
    }

    #[test]
    fn tautologies_always_satisfied() {
        let f = Formula::unweighted(1, vec![Clause::from_dimacs(&[1, -1])]).unwrap();
        for b in [false, true] {
            assert_eq!(f.evaluate(&Assignment::new(vec![b])).soft_unsat_weight, 0);
        }
    }

    #[test]
    fn variants() {
        assert_eq!(example1().variant(), Variant::Ms);
        assert_eq!(example4().variant(), Variant::Wpms);
        assert_eq!(Formula::empty().variant(), Variant::Ms);
        let wms = Formula::new(
            1,
            vec![WeightedClause::soft(Clause::from_dimacs(&[1]), 3)],
        )
        .unwrap();
        assert_eq!(wms.variant(), Variant::Wms);
    }

    #[test]
    fn lift_follows_problem_transformations() {
        let ms = example1();
        let lifted = ms
            .lift_to_partial(
                vec![Clause::from_dimacs(&[-3]), Clause::from_dimacs(&[-1, 3])],
                3,
            )
            .unwrap();
        assert_eq!(lifted.variant(), Variant::Pms);
        assert_eq!(lifted.num_hard(), 2);
        assert_eq!(lifted.top(), ms.top());
        assert_eq!(&lifted.clauses()[..5], ms.clauses());

        let wms = Formula::new(
            2,
            vec![
                WeightedClause::soft(Clause::from_dimacs(&[1]), 3),
                WeightedClause::soft(Clause::from_dimacs(&[-1, 2]), 1),
            ],
        )
        .unwrap();
        let lifted = wms
            .lift_to_partial(vec![Clause::from_dimacs(&[-1, 3])], 3)
            .unwrap();
        assert_eq!(lifted.variant(), Variant::Wpms);
        assert_eq!(lifted.num_vars(), 3);

        assert_eq!(ms.lift_to_partial(vec![], 3).unwrap(), ms);
    }

    #[test]
    fn lift_rejects_out_of_range() {
        let err = example1()
            .lift_to_partial(vec![Clause::from_dimacs(&[5])], 4)
            .unwrap_err();
        assert!(matches!(err, FormulaError::VarOutOfRange { var: 5, .. }));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Formula::new(1, vec![WeightedClause::soft(Clause::from_dimacs(&[1]), 0)]),
            Err(FormulaError::ZeroWeight { clause: 0 })
        );
        assert_eq!(
            Formula::new(
                1,
                vec![
                    WeightedClause::soft(Clause::from_dimacs(&[1]), u64::MAX),
                    WeightedClause::soft(Clause::from_dimacs(&[-1]), 1)
                ]
            ),
            Err(FormulaError::WeightOverflow)
        );
        assert_eq!(
            Formula::with_top(1, vec![WeightedClause::soft(Clause::from_dimacs(&[1]), 4)], 4),
            Err(FormulaError::TopTooSmall { top: 4, sum: 4 })
        );
    }
}
