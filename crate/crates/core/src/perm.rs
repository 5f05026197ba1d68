//! Phase-consistent literal permutations and small group computations.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::formula::{Clause, Formula, Lit, Var, WeightedClause};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("literal map is not a bijection")]
    NotBijective,
    #[error("literal map is not phase-consistent at {0}")]
    PhaseInconsistent(Lit),
    #[error("variable {0} outside 1..={1}")]
    OutOfRange(u32, u32),
    #[error("cannot parse cycle notation: {0}")]
    Syntax(String),
}

/// A bijection on the `2n` literals of `n` variables with `p(~l) = ~p(l)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<Lit>,
}

impl Permutation {
    pub fn identity(num_vars: u32) -> Permutation {
        Permutation {
            image: (0..2 * num_vars as usize).map(Lit::from_code).collect(),
        }
    }

    /// `images[code]` is the image of the literal with that code.
    pub fn from_images(images: Vec<Lit>) -> Result<Permutation, PermError> {
        let n = images.len();
        if n % 2 == 1 {
            return Err(PermError::NotBijective);
        }
        let mut seen = vec![false; n];
        for &l in &images {
            if l.code() >= n || std::mem::replace(&mut seen[l.code()], true) {
                return Err(PermError::NotBijective);
            }
        }
        for (code, &img) in images.iter().enumerate() {
            let l = Lit::from_code(code);
            if images[(!l).code()] != !img {
                return Err(PermError::PhaseInconsistent(l));
            }
        }
        Ok(Permutation { image: images })
    }

    /// Signed variable permutation given by the images of positive literals;
    /// variables not listed are fixed.
    pub fn from_var_images(num_vars: u32, pairs: &[(Var, Lit)]) -> Result<Permutation, PermError> {
        let mut images: Vec<Lit> = (0..2 * num_vars as usize).map(Lit::from_code).collect();
        for &(v, l) in pairs {
            for x in [v, l.var()] {
                if x.index() > num_vars {
                    return Err(PermError::OutOfRange(x.index(), num_vars));
                }
            }
            images[v.pos().code()] = l;
            images[v.neg().code()] = !l;
        }
        Permutation::from_images(images)
    }

    /// Parses disjoint-cycle notation such as `(x1 x3)(~x1 ~x3)`.
    pub fn parse_cycles(num_vars: u32, text: &str) -> Result<Permutation, PermError> {
        let syntax = || PermError::Syntax(text.to_string());
        let mut images: Vec<Option<Lit>> = vec![None; 2 * num_vars as usize];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body_start = rest.strip_prefix('(').ok_or_else(syntax)?;
            let close = body_start.find(')').ok_or_else(syntax)?;
            let body = &body_start[..close];
            rest = body_start[close + 1..].trim_start();
            let lits: Vec<Lit> = body
                .split_whitespace()
                .map(|tok| parse_lit(tok, num_vars).ok_or_else(syntax))
                .collect::<Result<_, _>>()?;
            for (i, &l) in lits.iter().enumerate() {
                let next = lits[(i + 1) % lits.len()];
                if images[l.code()].replace(next).is_some() {
                    return Err(PermError::NotBijective);
                }
            }
        }
        Permutation::from_images(
            images
                .into_iter()
                .enumerate()
                .map(|(code, l)| l.unwrap_or(Lit::from_code(code)))
                .collect(),
        )
    }

    pub fn num_vars(&self) -> u32 {
        (self.image.len() / 2) as u32
    }

    pub fn image(&self, l: Lit) -> Lit {
        self.image[l.code()]
    }

    pub fn images(&self) -> &[Lit] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(c, l)| l.code() == c)
    }

    /// Variables whose positive literal is moved, in ascending order.
    pub fn support(&self) -> Vec<Var> {
        (1..=self.num_vars())
            .map(Var::new)
            .filter(|&v| self.image(v.pos()) != v.pos())
            .collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = self.image.clone();
        for (code, &l) in self.image.iter().enumerate() {
            inv[l.code()] = Lit::from_code(code);
        }
        Permutation { image: inv }
    }

    /// `self` followed by `other`: `l -> other(self(l))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            image: self.image.iter().map(|&l| other.image(l)).collect(),
        }
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        Clause::new(c.lits().iter().map(|&l| self.image(l)))
    }
}

fn parse_lit(tok: &str, num_vars: u32) -> Option<Lit> {
    let (neg, rest) = match tok.strip_prefix('~') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let idx: u32 = rest.strip_prefix('x')?.parse().ok()?;
    (1..=num_vars)
        .contains(&idx)
        .then(|| Lit::new(Var::new(idx), neg))
}

impl fmt::Display for Permutation {
    /// Disjoint cycles, started from `x1..xn` and then `~x1..~xn`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.num_vars();
        let starts = (1..=n)
            .map(|i| Var::new(i).pos())
            .chain((1..=n).map(|i| Var::new(i).neg()));
        let mut seen = vec![false; self.image.len()];
        let mut any = false;
        for start in starts {
            if seen[start.code()] || self.image(start) == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut l = start;
            let mut first = true;
            while !seen[l.code()] {
                seen[l.code()] = true;
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{l}")?;
                l = self.image(l);
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Maps every clause of `f` through `p`; weights and clause order are kept.
pub fn apply(p: &Permutation, f: &Formula) -> Formula {
    let clauses = f
        .clauses()
        .iter()
        .map(|wc| WeightedClause {
            clause: p.apply_clause(&wc.clause),
            weight: wc.weight,
        })
        .collect();
    Formula::with_top(f.num_vars(), clauses, f.top()).expect("permutation keeps variable range")
}

/// True iff `p` maps the weighted clause multiset of `f` onto itself.
pub fn validate_on_formula(p: &Permutation, f: &Formula) -> bool {
    if p.num_vars() != f.num_vars() {
        return false;
    }
    apply(p, f).clause_multiset() == f.clause_multiset()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupOrder {
    Exact(usize),
    /// The closure grew past the enumeration limit.
    Exceeds(usize),
}

/// All elements of the group generated by `gens`, or `None` once more than
/// `limit` elements have been found.
pub fn group_elements(
    gens: &[Permutation],
    num_vars: u32,
    limit: usize,
) -> Option<HashSet<Permutation>> {
    let id = Permutation::identity(num_vars);
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(p) = queue.pop_front() {
        for g in gens {
            let q = p.then(g);
            if !seen.contains(&q) {
                if seen.len() >= limit {
                    return None;
                }
                seen.insert(q.clone());
                queue.push_back(q);
            }
        }
    }
    Some(seen)
}

/// Order of the generated group by breadth-first closure.
pub fn group_order(gens: &[Permutation], num_vars: u32, limit: usize) -> GroupOrder {
    match group_elements(gens, num_vars, limit) {
        Some(s) => GroupOrder::Exact(s.len()),
        None => GroupOrder::Exceeds(limit),
    }
}
