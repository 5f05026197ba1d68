//! Lex-leader symmetry-breaking predicates.
//!
//! For a symmetry `p` and the variable order `x1 < x2 < ...`, the predicate
//! admits exactly the assignments `a` with
//! `(a(x_i1), ..., a(x_ik)) <=lex (a(p(x_i1)), ..., a(p(x_ik)))` over the
//! support of `p`. Prefix equality is tracked by fresh chain variables.
//! Positions whose equality already follows from earlier positions are
//! skipped, and the encoding stops at the first position where equality is
//! impossible.

use std::ops::Range;

use crate::formula::{Clause, Formula, Lit, Var};
use crate::perm::Permutation;

/// Clauses for one generator, referencing auxiliary variables from
/// `next_aux` upwards.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexLeader {
    pub clauses: Vec<Clause>,
    pub aux_vars: u32,
}

/// Variable equivalences known to hold along an equal prefix.
struct Equivalences {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl Equivalences {
    fn new(num_vars: usize) -> Self {
        Equivalences {
            parent: (0..num_vars).collect(),
            parity: vec![false; num_vars],
        }
    }

    fn find(&mut self, v: usize) -> (usize, bool) {
        let p = self.parent[v];
        if p == v {
            return (v, false);
        }
        let (root, par) = self.find(p);
        self.parent[v] = root;
        self.parity[v] ^= par;
        (root, self.parity[v])
    }

    fn root_of(&mut self, l: Lit) -> (usize, bool) {
        let (r, p) = self.find(l.var().idx0());
        (r, p ^ l.is_negated())
    }

    /// `Some(true)` if `a == b` is implied, `Some(false)` if `a == ~b` is.
    fn relation(&mut self, a: Lit, b: Lit) -> Option<bool> {
        let (ra, pa) = self.root_of(a);
        let (rb, pb) = self.root_of(b);
        (ra == rb).then_some(pa == pb)
    }

    fn join(&mut self, a: Lit, b: Lit) {
        let (ra, pa) = self.root_of(a);
        let (rb, pb) = self.root_of(b);
        if ra != rb {
            self.parent[ra] = rb;
            self.parity[ra] = pa ^ pb;
        }
    }
}

fn guarded(guard: Option<Lit>, lits: impl IntoIterator<Item = Lit>) -> Clause {
    Clause::new(guard.map(|e| !e).into_iter().chain(lits))
}

/// Encodes `x <=lex p(x)` over the support of `p`.
pub fn lex_leader(p: &Permutation, next_aux: u32) -> LexLeader {
    let mut out = LexLeader::default();
    let mut eq = Equivalences::new(p.num_vars() as usize);
    let mut guard: Option<Lit> = None;
    let mut pending: Option<(Lit, Lit)> = None;

    for v in p.support() {
        let l = v.pos();
        let m = p.image(l);
        let rel = eq.relation(l, m);
        if rel == Some(true) {
            continue;
        }
        if let Some((pl, pm)) = pending.take() {
            let e = Var::new(next_aux + out.aux_vars).pos();
            out.aux_vars += 1;
            out.clauses.push(guarded(guard, [!pl, !pm, e]));
            out.clauses.push(guarded(guard, [pl, pm, e]));
            guard = Some(e);
        }
        out.clauses.push(guarded(guard, [!l, m]));
        if rel == Some(false) {
            break;
        }
        eq.join(l, m);
        pending = Some((l, m));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SbpResult {
    /// All predicate clauses, in generator order.
    pub clauses: Vec<Clause>,
    pub aux_vars: u32,
    /// Range of `clauses` contributed by each generator.
    pub per_generator: Vec<Range<usize>>,
}

/// An instance with predicates appended as hard clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Augmented {
    pub formula: Formula,
    pub sbp: SbpResult,
}

impl Augmented {
    /// Number of clauses added.
    pub fn cls_sbp(&self) -> usize {
        self.sbp.clauses.len()
    }

    /// `sbp: generators=G clauses=C auxvars=A`
    pub fn summary(&self) -> String {
        format!(
            "sbp: generators={} clauses={} auxvars={}",
            self.sbp.per_generator.len(),
            self.sbp.clauses.len(),
            self.sbp.aux_vars
        )
    }
}

/// Appends the lex-leader predicates of every generator to `f` as hard
/// clauses, numbering auxiliary variables after `f`'s variables.
pub fn generate_sbps(f: &Formula, generators: &[Permutation]) -> Augmented {
    let mut sbp = SbpResult::default();
    for p in generators {
        let frag = lex_leader(p, f.num_vars() + sbp.aux_vars + 1);
        let start = sbp.clauses.len();
        sbp.clauses.extend(frag.clauses);
        sbp.aux_vars += frag.aux_vars;
        sbp.per_generator.push(start..sbp.clauses.len());
    }
    let formula = f
        .lift_to_partial(sbp.clauses.clone(), f.num_vars() + sbp.aux_vars)
        .expect("predicates only use original and fresh variables");
    Augmented { formula, sbp }
}
