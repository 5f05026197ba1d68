//! Automorphism search on colored graphs by individualization and
//! refinement, and translation of graph automorphisms into literal
//! permutations.
//!
//! The search walks a first path down the search tree, then revisits each
//! level of that path bottom-up. At level `k` every vertex `w` of the target
//! cell that is not yet known to share an orbit with an explored vertex is
//! individualized, and its subtree is searched for one leaf equivalent to the
//! first leaf. Every such leaf yields an automorphism fixing the first `k`
//! individualized vertices, so the collected maps generate the whole
//! color-preserving automorphism group.

use std::collections::BTreeSet;

use crate::formula::{Formula, Lit, Var};
use crate::graph::{encode, ColoredGraph, EncodeMode, GraphError};
use crate::perm::{validate_on_formula, PermError, Permutation};

/// Ordered partition of the vertex set.
///
/// Cells occupy contiguous ranges of `lab`; a cell is named by the position
/// of its first element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coloring {
    lab: Vec<u32>,
    cell_of: Vec<u32>,
    cell_end: Vec<u32>,
}

impl Coloring {
    /// The partition induced by vertex colors, cells ordered by color.
    pub fn from_colors(g: &ColoredGraph) -> Coloring {
        let mut lab: Vec<u32> = (0..g.num_vertices() as u32).collect();
        lab.sort_by_key(|&v| (g.color(v as usize), v));
        let mut c = Coloring {
            lab,
            cell_of: vec![0; g.num_vertices()],
            cell_end: vec![0; g.num_vertices()],
        };
        let mut start = 0;
        while start < c.lab.len() {
            let color = g.color(c.lab[start] as usize);
            let mut end = start;
            while end < c.lab.len() && g.color(c.lab[end] as usize) == color {
                end += 1;
            }
            c.set_cell(start, end);
            start = end;
        }
        c
    }

    /// Builds a coloring from explicit cells, which must partition `0..n`.
    pub fn from_cells(cells: &[Vec<usize>]) -> Coloring {
        let n: usize = cells.iter().map(Vec::len).sum();
        let mut c = Coloring {
            lab: Vec::with_capacity(n),
            cell_of: vec![u32::MAX; n],
            cell_end: vec![0; n],
        };
        for cell in cells {
            let start = c.lab.len();
            let mut sorted = cell.clone();
            sorted.sort_unstable();
            c.lab.extend(sorted.iter().map(|&v| v as u32));
            c.set_cell(start, c.lab.len());
        }
        assert!(c.cell_of.iter().all(|&x| x != u32::MAX), "cells must cover all vertices");
        c
    }

    fn set_cell(&mut self, start: usize, end: usize) {
        self.cell_end[start] = end as u32;
        for &v in &self.lab[start..end] {
            self.cell_of[v as usize] = start as u32;
        }
    }

    fn starts(&self) -> impl Iterator<Item = usize> + '_ {
        let mut s = 0;
        std::iter::from_fn(move || {
            (s < self.lab.len()).then(|| {
                let cur = s;
                s = self.cell_end[s] as usize;
                cur
            })
        })
    }

    /// Cells in order, each listed by ascending vertex id.
    pub fn cells(&self) -> Vec<Vec<usize>> {
        self.starts().map(|s| self.cell_vertices(s)).collect()
    }

    fn cell_vertices(&self, start: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.lab[start..self.cell_end[start] as usize]
            .iter()
            .map(|&x| x as usize)
            .collect();
        v.sort_unstable();
        v
    }

    pub fn num_cells(&self) -> usize {
        self.starts().count()
    }

    pub fn is_discrete(&self) -> bool {
        self.num_cells() == self.lab.len()
    }

    pub fn same_cell(&self, u: usize, v: usize) -> bool {
        self.cell_of[u] == self.cell_of[v]
    }

    /// Splits `v` off its cell as a singleton placed first; returns its position.
    fn individualize(&mut self, v: usize) -> usize {
        let start = self.cell_of[v] as usize;
        let end = self.cell_end[start] as usize;
        let pos = start + self.lab[start..end].iter().position(|&x| x as usize == v).unwrap();
        self.lab.swap(start, pos);
        self.set_cell(start, start + 1);
        if end > start + 1 {
            self.set_cell(start + 1, end);
        }
        start
    }

    /// First smallest non-singleton cell, by position.
    fn target_cell(&self) -> Option<usize> {
        self.starts()
            .filter(|&s| self.cell_end[s] as usize - s > 1)
            .min_by_key(|&s| (self.cell_end[s] as usize - s, s))
    }
}

/// Refines `c` in place to an equitable coloring, using the cells starting
/// at `splitters` as the initial work list. Returns the refinement trace,
/// an isomorphism-invariant record of the splits performed.
fn refine_in_place(g: &ColoredGraph, c: &mut Coloring, splitters: &[usize]) -> Vec<u32> {
    let n = c.lab.len();
    let mut trace = Vec::new();
    let mut queue: BTreeSet<usize> = splitters.iter().copied().collect();
    let mut counts = vec![0u32; n];
    let mut touched: Vec<usize> = Vec::new();

    while let Some(s) = queue.pop_first() {
        let e = c.cell_end[s] as usize;
        for i in s..e {
            for &u in g.neighbors(c.lab[i] as usize) {
                let u = u as usize;
                if counts[u] == 0 {
                    touched.push(u);
                }
                counts[u] += 1;
            }
        }
        let mut cells: Vec<usize> = touched.iter().map(|&u| c.cell_of[u] as usize).collect();
        cells.sort_unstable();
        cells.dedup();

        for cs in cells {
            let ce = c.cell_end[cs] as usize;
            if ce - cs == 1 {
                continue;
            }
            c.lab[cs..ce].sort_unstable_by_key(|&v| (counts[v as usize], v));
            if counts[c.lab[cs] as usize] == counts[c.lab[ce - 1] as usize] {
                continue;
            }
            trace.extend([s as u32, cs as u32]);
            let mut frags: Vec<(usize, usize)> = Vec::new();
            let mut fs = cs;
            for i in cs + 1..=ce {
                if i == ce || counts[c.lab[i] as usize] != counts[c.lab[fs] as usize] {
                    frags.push((fs, i));
                    trace.extend([counts[c.lab[fs] as usize], (i - fs) as u32]);
                    fs = i;
                }
            }
            for &(a, b) in &frags {
                c.set_cell(a, b);
            }
            if queue.contains(&cs) {
                queue.extend(frags.iter().map(|f| f.0));
            } else {
                // all fragments but the first largest one
                let largest = frags
                    .iter()
                    .enumerate()
                    .max_by_key(|(i, f)| (f.1 - f.0, std::cmp::Reverse(*i)))
                    .map(|(i, _)| i)
                    .unwrap();
                queue.extend(
                    frags
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != largest)
                        .map(|(_, f)| f.0),
                );
            }
        }
        for u in touched.drain(..) {
            counts[u] = 0;
        }
    }
    trace
}

/// The coarsest equitable coloring refining `c`.
pub fn refine(g: &ColoredGraph, c: &Coloring) -> Coloring {
    let mut out = c.clone();
    let starts: Vec<usize> = out.starts().collect();
    refine_in_place(g, &mut out, &starts);
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search tree nodes created (individualizations).
    pub nodes: u64,
    /// Calls to the refinement procedure.
    pub refinements: u64,
    /// Automorphisms dropped because they are not phase-consistent.
    pub phase_rejected: u64,
    /// Permutations dropped because they do not map the formula to itself.
    pub formula_rejected: u64,
}

/// Generators of a symmetry group, as literal permutations.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorSet {
    pub generators: Vec<Permutation>,
    /// Vertex-level automorphism each generator was read off.
    pub vertex_maps: Vec<Vec<usize>>,
    pub stats: SearchStats,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Keeps only the first `n` generators.
    pub fn truncate(&mut self, n: usize) {
        self.generators.truncate(n);
        self.vertex_maps.truncate(n);
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

struct Level {
    coloring: Coloring,
    target: usize,
    verts: Vec<usize>,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    path: Vec<Level>,
    /// Trace of the refinement that produced the first-path node at depth `d + 1`.
    traces: Vec<Vec<u32>>,
    first_leaf: Vec<u32>,
    stats: SearchStats,
}

impl Search<'_> {
    fn child(&mut self, c: &Coloring, v: usize) -> (Coloring, Vec<u32>) {
        let mut child = c.clone();
        let s = child.individualize(v);
        self.stats.nodes += 1;
        self.stats.refinements += 1;
        let trace = refine_in_place(self.g, &mut child, &[s]);
        (child, trace)
    }

    /// Looks for a leaf below `c` (at `depth`) equivalent to the first leaf.
    fn descend(&mut self, depth: usize, c: Coloring) -> Option<Vec<usize>> {
        if c.is_discrete() {
            let mut map = vec![0; c.lab.len()];
            for (a, b) in self.first_leaf.iter().zip(&c.lab) {
                map[*a as usize] = *b as usize;
            }
            return self.g.is_automorphism(&map).then_some(map);
        }
        let target = c.target_cell()?;
        if depth >= self.path.len() || target != self.path[depth].target {
            return None;
        }
        for u in c.cell_vertices(target) {
            let (child, trace) = self.child(&c, u);
            if trace != self.traces[depth] {
                continue;
            }
            if let Some(m) = self.descend(depth + 1, child) {
                return Some(m);
            }
        }
        None
    }
}

/// All generators of the color-preserving automorphism group of `g`, as
/// vertex maps, together with search statistics.
pub fn vertex_automorphisms(g: &ColoredGraph) -> (Vec<Vec<usize>>, SearchStats) {
    let n = g.num_vertices();
    let mut root = Coloring::from_colors(g);
    let starts: Vec<usize> = root.starts().collect();
    refine_in_place(g, &mut root, &starts);
    let mut search = Search {
        g,
        path: Vec::new(),
        traces: Vec::new(),
        first_leaf: Vec::new(),
        stats: SearchStats {
            refinements: 1,
            ..SearchStats::default()
        },
    };

    let mut cur = root;
    while let Some(target) = cur.target_cell() {
        let verts = cur.cell_vertices(target);
        let (child, trace) = search.child(&cur, verts[0]);
        search.path.push(Level {
            coloring: cur,
            target,
            verts,
        });
        search.traces.push(trace);
        cur = child;
    }
    search.first_leaf = cur.lab;

    let mut generators: Vec<Vec<usize>> = Vec::new();
    let mut orbits = UnionFind::new(n);
    for level in (0..search.path.len()).rev() {
        let verts = search.path[level].verts.clone();
        let coloring = search.path[level].coloring.clone();
        let mut explored = vec![verts[0]];
        for &w in &verts[1..] {
            let rw = orbits.find(w);
            if explored.iter().any(|&u| orbits.find(u) == rw) {
                continue;
            }
            explored.push(w);
            let (child, trace) = search.child(&coloring, w);
            if trace != search.traces[level] {
                continue;
            }
            if let Some(map) = search.descend(level + 1, child) {
                for (v, &img) in map.iter().enumerate() {
                    orbits.union(v, img);
                }
                generators.push(map);
            }
        }
    }
    (generators, search.stats)
}

/// Restricts a vertex automorphism of a formula graph to the literal vertices.
pub fn to_literal_permutation(
    g: &ColoredGraph,
    vertex_map: &[usize],
) -> Result<Permutation, PermError> {
    let nv = g.num_vars();
    let mut images: Vec<Lit> = Vec::with_capacity(2 * nv as usize);
    let lit_of = |l: Lit| -> Result<Lit, PermError> {
        g.vertex_literal(vertex_map[g.literal_vertex(l)])
            .ok_or(PermError::NotBijective)
    };
    for v in (1..=nv).map(Var::new) {
        let p = lit_of(v.pos())?;
        let q = lit_of(v.neg())?;
        if q != !p {
            return Err(PermError::PhaseInconsistent(v.pos()));
        }
        images.extend([p, q]);
    }
    Permutation::from_images(images)
}

/// Automorphism group generators of `g` as literal permutations.
///
/// Identity and duplicate permutations are dropped, as are maps that are
/// not phase-consistent.
pub fn find_automorphisms(g: &ColoredGraph) -> GeneratorSet {
    let (maps, mut stats) = vertex_automorphisms(g);
    let mut out = GeneratorSet::default();
    for map in maps {
        match to_literal_permutation(g, &map) {
            Ok(p) if p.is_identity() || out.generators.contains(&p) => {}
            Ok(p) => {
                out.generators.push(p);
                out.vertex_maps.push(map);
            }
            Err(_) => stats.phase_rejected += 1,
        }
    }
    out.stats = stats;
    out
}

/// Encodes `f`, searches its graph and keeps the generators that map `f`
/// onto itself.
pub fn detect_symmetries(f: &Formula, mode: EncodeMode) -> Result<GeneratorSet, GraphError> {
    let g = encode(f, mode)?;
    let mut gs = find_automorphisms(&g);
    let mut keep = GeneratorSet {
        stats: gs.stats,
        ..GeneratorSet::default()
    };
    for (p, m) in gs.generators.drain(..).zip(gs.vertex_maps.drain(..)) {
        if validate_on_formula(&p, f) {
            keep.generators.push(p);
            keep.vertex_maps.push(m);
        } else {
            keep.stats.formula_rejected += 1;
        }
    }
    Ok(keep)
}
