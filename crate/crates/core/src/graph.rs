//! Colored graph encodings of weighted CNF formulas.
//!
//! Vertex layout is fixed: the positive literal of `x_j` is vertex `j - 1`,
//! its complement is vertex `V + j - 1`, and clause vertices follow in clause
//! order. Literal vertices carry color 0. In [`EncodeMode::ClauseVertex`]
//! soft weight classes get colors `1..=k` in ascending weight order and hard
//! clauses get `k + 1`. Text dumps print colors and vertices 1-based.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{Formula, Lit, Var, Variant, Weight};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexKind {
    PositiveLiteral(Var),
    NegativeLiteral(Var),
    /// Index into the formula's clause list.
    Clause(usize),
    /// Vertex of a graph not built from a formula.
    Other,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum EncodeMode {
    /// Binary clauses become literal-literal edges; only valid for plain MaxSAT.
    EdgeOptimized,
    /// Every clause becomes a vertex colored by its weight class.
    #[default]
    ClauseVertex,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge-optimized encoding requires a plain MaxSAT instance, got {0}")]
    ModeVariant(Variant),
}

pub const LITERAL_COLOR: u32 = 0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    num_vars: u32,
    colors: Vec<u32>,
    adj: Vec<Vec<u32>>,
    provenance: Vec<VertexKind>,
    num_edges: usize,
}

impl ColoredGraph {
    /// Builds a graph from explicit colors and edges. Self-loops are dropped
    /// and parallel edges merged.
    pub fn from_edges(colors: Vec<u32>, edges: &[(usize, usize)]) -> ColoredGraph {
        let provenance = vec![VertexKind::Other; colors.len()];
        Self::build(0, colors, provenance, edges.iter().copied())
    }

    fn build(
        num_vars: u32,
        colors: Vec<u32>,
        provenance: Vec<VertexKind>,
        edges: impl Iterator<Item = (usize, usize)>,
    ) -> ColoredGraph {
        let n = colors.len();
        let set: BTreeSet<(usize, usize)> = edges
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            assert!(v < n, "edge endpoint {v} out of range");
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        ColoredGraph {
            num_vars,
            colors,
            adj,
            provenance,
            num_edges: set.len(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn provenance(&self, v: usize) -> VertexKind {
        self.provenance[v]
    }

    /// Vertex representing `l`.
    pub fn literal_vertex(&self, l: Lit) -> usize {
        let j = l.var().idx0();
        if l.is_negated() {
            self.num_vars as usize + j
        } else {
            j
        }
    }

    /// Literal represented by vertex `v`, if any.
    pub fn vertex_literal(&self, v: usize) -> Option<Lit> {
        match self.provenance.get(v)? {
            VertexKind::PositiveLiteral(x) => Some(x.pos()),
            VertexKind::NegativeLiteral(x) => Some(x.neg()),
            _ => None,
        }
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (u, a) in self.adj.iter().enumerate() {
            out.extend(a.iter().map(|&v| v as usize).filter(|&v| v > u).map(|v| (u, v)));
        }
        out
    }

    /// Number of vertices per color.
    pub fn color_histogram(&self) -> BTreeMap<u32, usize> {
        let mut h = BTreeMap::new();
        for &c in &self.colors {
            *h.entry(c).or_insert(0) += 1;
        }
        h
    }

    /// `p edge N M`, then `n <vertex> <color>` lines, then `e <u> <v>` lines.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p edge {} {}", self.num_vertices(), self.num_edges);
        for (v, c) in self.colors.iter().enumerate() {
            let _ = writeln!(out, "n {} {}", v + 1, c + 1);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }

    /// Checks that `map` (vertex -> vertex) is a color-preserving automorphism.
    pub fn is_automorphism(&self, map: &[usize]) -> bool {
        let n = self.num_vertices();
        if map.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for (v, &w) in map.iter().enumerate() {
            if w >= n || seen[w] || self.colors[v] != self.colors[w] {
                return false;
            }
            seen[w] = true;
        }
        self.adj.iter().enumerate().all(|(u, a)| {
            a.iter()
                .all(|&v| self.has_edge(map[u], map[v as usize]))
        })
    }
}

/// Builds the colored graph of `f`.
pub fn encode(f: &Formula, mode: EncodeMode) -> Result<ColoredGraph, GraphError> {
    let nv = f.num_vars() as usize;
    let mut colors = vec![LITERAL_COLOR; 2 * nv];
    let mut provenance: Vec<VertexKind> = f
        .vars()
        .map(VertexKind::PositiveLiteral)
        .chain(f.vars().map(VertexKind::NegativeLiteral))
        .collect();
    let lit_vertex = |l: Lit| {
        let j = l.var().idx0();
        if l.is_negated() {
            nv + j
        } else {
            j
        }
    };
    let mut edges: Vec<(usize, usize)> = (0..nv).map(|j| (j, nv + j)).collect();

    match mode {
        EncodeMode::EdgeOptimized => {
            let variant = f.variant();
            if variant != Variant::Ms {
                return Err(GraphError::ModeVariant(variant));
            }
            for (i, wc) in f.clauses().iter().enumerate() {
                let lits = wc.clause.lits();
                if lits.len() == 2 {
                    edges.push((lit_vertex(lits[0]), lit_vertex(lits[1])));
                } else {
                    let cv = colors.len();
                    colors.push(1);
                    provenance.push(VertexKind::Clause(i));
                    edges.extend(lits.iter().map(|&l| (lit_vertex(l), cv)));
                }
            }
        }
        EncodeMode::ClauseVertex => {
            let soft: BTreeSet<u64> = f.clauses().iter().filter_map(|c| c.weight.soft()).collect();
            let class: BTreeMap<u64, u32> =
                soft.iter().enumerate().map(|(i, &w)| (w, i as u32 + 1)).collect();
            let hard_color = soft.len() as u32 + 1;
            for (i, wc) in f.clauses().iter().enumerate() {
                let cv = colors.len();
                colors.push(match wc.weight {
                    Weight::Soft(w) => class[&w],
                    Weight::Hard => hard_color,
                });
                provenance.push(VertexKind::Clause(i));
                edges.extend(wc.clause.lits().iter().map(|&l| (lit_vertex(l), cv)));
            }
        }
    }
    Ok(ColoredGraph::build(
        f.num_vars(),
        colors,
        provenance,
        edges.into_iter(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::tests::{example1, example4};
    use crate::formula::{Clause, WeightedClause};

    fn one_based(g: &ColoredGraph) -> Vec<(usize, usize)> {
        g.edges().into_iter().map(|(u, v)| (u + 1, v + 1)).collect()
    }

    #[test]
    fn example1_edge_optimized() {
        let g = encode(&example1(), EncodeMode::EdgeOptimized).unwrap();
        assert_eq!(g.num_vertices(), 7);
        assert_eq!(g.num_edges(), 8);
        let mut expected = vec![(1, 4), (2, 5), (3, 6), (1, 2), (2, 4), (2, 3), (2, 6), (5, 7)];
        expected.sort();
        assert_eq!(one_based(&g), expected);
        assert_eq!(g.provenance(6), VertexKind::Clause(2));
        assert_eq!(g.color_histogram(), BTreeMap::from([(0, 6), (1, 1)]));
    }

    #[test]
    fn example4_clause_vertex() {
        let g = encode(&example4(), EncodeMode::ClauseVertex).unwrap();
        assert_eq!(g.num_vertices(), 11);
        assert_eq!(g.num_edges(), 12);
        // weight 1 -> color 1, weight 5 -> 2, hard -> 3
        assert_eq!(
            g.color_histogram(),
            BTreeMap::from([(0, 6), (1, 2), (2, 1), (3, 2)])
        );
        let mut expected = vec![
            (1, 4),
            (2, 5),
            (3, 6),
            (1, 7),
            (2, 7),
            (4, 8),
            (2, 8),
            (5, 9),
            (6, 10),
            (2, 10),
            (3, 11),
            (2, 11),
        ];
        expected.sort();
        assert_eq!(one_based(&g), expected);
    }

    #[test]
    fn edge_mode_rejects_weighted() {
        assert_eq!(
            encode(&example4(), EncodeMode::EdgeOptimized),
            Err(GraphError::ModeVariant(Variant::Wpms))
        );
    }

    #[test]
    fn single_var_no_clauses() {
        let f = Formula::new(1, vec![]).unwrap();
        for mode in [EncodeMode::EdgeOptimized, EncodeMode::ClauseVertex] {
            let g = encode(&f, mode).unwrap();
            assert_eq!(g.num_vertices(), 2);
            assert_eq!(g.edges(), vec![(0, 1)]);
        }
        let g = encode(&Formula::empty(), EncodeMode::ClauseVertex).unwrap();
        assert_eq!(g.num_vertices(), 0);
        assert!(g.color_histogram().is_empty());
    }

    #[test]
    fn tautological_binary_merges_with_complement_edge() {
        let f = Formula::unweighted(1, vec![Clause::from_dimacs(&[1, -1])]).unwrap();
        let g = encode(&f, EncodeMode::EdgeOptimized).unwrap();
        assert_eq!(g.num_edges(), 1);
        let g = encode(&f, EncodeMode::ClauseVertex).unwrap();
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.num_edges(), 3);
    }

    #[test]
    fn weight_classes_ascending() {
        let f = Formula::new(
            1,
            vec![
                WeightedClause::soft(Clause::from_dimacs(&[1]), 7),
                WeightedClause::soft(Clause::from_dimacs(&[-1]), 2),
                WeightedClause::hard(Clause::from_dimacs(&[1, -1])),
            ],
        )
        .unwrap();
        let g = encode(&f, EncodeMode::ClauseVertex).unwrap();
        assert_eq!(&g.colors()[2..], &[2, 1, 3]);
    }

    #[test]
    fn dump_format() {
        let f = Formula::unweighted(1, vec![Clause::from_dimacs(&[1])]).unwrap();
        let g = encode(&f, EncodeMode::ClauseVertex).unwrap();
        assert_eq!(g.to_dimacs(), "p edge 3 2\nn 1 1\nn 2 1\nn 3 2\ne 1 2\ne 1 3\n");
    }

    #[test]
    fn automorphism_check() {
        let g = encode(&example1(), EncodeMode::EdgeOptimized).unwrap();
        let mut map: Vec<usize> = (0..7).collect();
        map.swap(2, 5);
        assert!(g.is_automorphism(&map));
        let mut map: Vec<usize> = (0..7).collect();
        map.swap(0, 1);
        assert!(!g.is_automorphism(&map));
        let mut map: Vec<usize> = (0..7).collect();
        map.swap(0, 6);
        assert!(!g.is_automorphism(&map));
    }
}
