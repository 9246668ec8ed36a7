//! Coloured trivalent graphs and their 3j state sums.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;

use super::ring::Ring;
use super::StateSumError;

/// A symmetric table of vertex weights `|a b c|`, stored under the sorted
/// triple. Missing entries read as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeJTable<R> {
    colors: usize,
    entries: BTreeMap<[usize; 3], R>,
}

fn sorted(t: [usize; 3]) -> [usize; 3] {
    let mut t = t;
    t.sort_unstable();
    t
}

impl<R: Ring> ThreeJTable<R> {
    pub fn empty(colors: usize) -> Self {
        ThreeJTable {
            colors,
            entries: BTreeMap::new(),
        }
    }

    pub fn color_count(&self) -> usize {
        self.colors
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> R {
        self.entries
            .get(&sorted([a, b, c]))
            .cloned()
            .unwrap_or_else(R::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&[usize; 3], &R)> {
        self.entries.iter()
    }

    /// `Σ_a |a a a|`, the state sum of a single circle.
    pub fn circle_sum(&self) -> R {
        (0..self.colors).fold(R::zero(), |acc, a| acc.add(&self.get(a, a, a)))
    }
}

/// Symmetric closure of `partial`; two entries for the same unordered
/// triple must agree.
pub fn complete_table<R: Ring>(
    partial: &[([usize; 3], R)],
    colors: usize,
) -> Result<ThreeJTable<R>, StateSumError> {
    let mut t = ThreeJTable::<R>::empty(colors);
    for (triple, value) in partial {
        if let Some(&c) = triple.iter().find(|&&c| c >= colors) {
            return Err(StateSumError::ColorRange { color: c, colors });
        }
        let key = sorted(*triple);
        match t.entries.get(&key) {
            Some(existing) if existing != value => {
                return Err(StateSumError::TableConflict {
                    triple: key,
                    first: existing.to_string(),
                    second: value.to_string(),
                })
            }
            _ => {
                t.entries.insert(key, value.clone());
            }
        }
    }
    Ok(t)
}

/// Vertices `0..vertices`; an edge `(u, u)` is a loop and counts twice
/// towards the degree of `u`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrivalentGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
    circles: usize,
}

impl TrivalentGraph {
    pub fn new(
        vertices: usize,
        edges: Vec<(usize, usize)>,
        circles: usize,
    ) -> Result<Self, StateSumError> {
        let mut degree = vec![0usize; vertices];
        for &(u, v) in &edges {
            if u >= vertices || v >= vertices {
                return Err(StateSumError::VertexRange(u.max(v)));
            }
            degree[u] += 1;
            degree[v] += 1;
        }
        if let Some((v, &d)) = degree.iter().enumerate().find(|(_, &d)| d != 3) {
            return Err(StateSumError::Degree { vertex: v, degree: d });
        }
        let edges = edges
            .into_iter()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        Ok(TrivalentGraph {
            vertices,
            edges,
            circles,
        })
    }

    pub fn empty() -> Self {
        TrivalentGraph::default()
    }

    pub fn circle() -> Self {
        TrivalentGraph {
            circles: 1,
            ..Default::default()
        }
    }

    /// Two vertices joined by three parallel edges.
    pub fn theta() -> Self {
        TrivalentGraph::new(2, vec![(0, 1); 3], 0).expect("theta is trivalent")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn circle_count(&self) -> usize {
        self.circles
    }

    /// Colour slots: one per edge, then one per circle.
    pub fn slots(&self) -> usize {
        self.edges.len() + self.circles
    }

    fn incidence(&self) -> Vec<[usize; 3]> {
        let mut inc = vec![Vec::with_capacity(3); self.vertices];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            inc[u].push(i);
            inc[v].push(i);
        }
        inc.into_iter().map(|v| [v[0], v[1], v[2]]).collect()
    }

    /// Relabelled so that isomorphic graphs compare equal.
    pub fn canonical(&self) -> TrivalentGraph {
        let n = self.vertices;
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            let mut e: Vec<(usize, usize)> = self
                .edges
                .iter()
                .map(|&(u, v)| {
                    let (a, b) = (perm[u], perm[v]);
                    (a.min(b), a.max(b))
                })
                .collect();
            e.sort_unstable();
            if best.as_ref().is_none_or(|b| e < *b) {
                best = Some(e);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        TrivalentGraph {
            vertices: n,
            edges: best.unwrap_or_default(),
            circles: self.circles,
        }
    }

    pub fn is_isomorphic(&self, other: &TrivalentGraph) -> bool {
        self.vertices == other.vertices
            && self.circles == other.circles
            && self.edges.len() == other.edges.len()
            && self.canonical() == other.canonical()
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| p[i] < p[i + 1]) else {
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}

impl fmt::Display for TrivalentGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self.edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        write!(
            f,
            "V{} E[{}] O{}",
            self.vertices,
            edges.join(","),
            self.circles
        )
    }
}

/// Disjoint union; the wedge point carries no vertex weight.
pub fn wedge(g1: &TrivalentGraph, g2: &TrivalentGraph) -> TrivalentGraph {
    let off = g1.vertices;
    let mut edges = g1.edges.clone();
    edges.extend(g2.edges.iter().map(|&(u, v)| (u + off, v + off)));
    TrivalentGraph {
        vertices: g1.vertices + g2.vertices,
        edges,
        circles: g1.circles + g2.circles,
    }
}

/// Product of `|a b c|` over vertices times `|c c c|` over circles.
pub fn eval_coloring<R: Ring>(
    g: &TrivalentGraph,
    coloring: &[usize],
    t: &ThreeJTable<R>,
) -> Result<R, StateSumError> {
    if coloring.len() != g.slots() {
        return Err(StateSumError::Coloring {
            expected: g.slots(),
            found: coloring.len(),
        });
    }
    if let Some(&c) = coloring.iter().find(|&&c| c >= t.color_count()) {
        return Err(StateSumError::ColorRange {
            color: c,
            colors: t.color_count(),
        });
    }
    Ok(eval_unchecked(&g.incidence(), g.edges.len(), coloring, &Dense::new(t)))
}

/// Flat `n³` copy of a table for the summation loop.
struct Dense<R> {
    n: usize,
    values: Vec<R>,
    zero: Vec<bool>,
}

impl<R: Ring> Dense<R> {
    fn new(t: &ThreeJTable<R>) -> Self {
        let n = t.color_count();
        let mut values = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    values.push(t.get(a, b, c));
                }
            }
        }
        let zero = values.iter().map(Ring::is_zero).collect();
        Dense { n, values, zero }
    }

    fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.n + b) * self.n + c
    }
}

fn eval_unchecked<R: Ring>(
    incidence: &[[usize; 3]],
    edge_count: usize,
    coloring: &[usize],
    t: &Dense<R>,
) -> R {
    let mut acc = R::one();
    for inc in incidence {
        let i = t.index(coloring[inc[0]], coloring[inc[1]], coloring[inc[2]]);
        if t.zero[i] {
            return R::zero();
        }
        acc = acc.mul(&t.values[i]);
    }
    for &c in &coloring[edge_count..] {
        acc = acc.mul(&t.values[t.index(c, c, c)]);
    }
    acc
}

/// Weights due once slot `d` is coloured: vertex triples whose largest slot
/// is `d`, or the circle occupying slot `d`.
struct Schedule {
    due: Vec<Vec<[usize; 3]>>,
}

impl Schedule {
    fn new(g: &TrivalentGraph) -> Self {
        let mut due = vec![Vec::new(); g.slots()];
        for inc in g.incidence() {
            let last = inc.iter().copied().max().expect("trivalent");
            due[last].push(inc);
        }
        for c in g.edges.len()..g.slots() {
            due[c].push([c, c, c]);
        }
        Schedule { due }
    }

    /// Multiplies in the weights due at depth `d`; `None` once a weight vanishes.
    fn step<R: Ring>(&self, d: usize, acc: &R, coloring: &[usize], t: &Dense<R>) -> Option<R> {
        let mut acc = acc.clone();
        for inc in &self.due[d] {
            let i = t.index(coloring[inc[0]], coloring[inc[1]], coloring[inc[2]]);
            if t.zero[i] {
                return None;
            }
            acc = acc.mul(&t.values[i]);
        }
        Some(acc)
    }

    fn sum_from<R: Ring>(&self, d: usize, acc: &R, coloring: &mut [usize], t: &Dense<R>) -> R {
        if d == coloring.len() {
            return acc.clone();
        }
        let mut total = R::zero();
        for c in 0..t.n {
            coloring[d] = c;
            if let Some(next) = self.step(d, acc, coloring, t) {
                total = total.add(&self.sum_from(d + 1, &next, coloring, t));
            }
        }
        total
    }

    /// Sum over colourings whose first `prefix_len` slots, read as a base-`n`
    /// number with slot 0 most significant, lie in `range`.
    fn sum_prefixes<R: Ring>(&self, prefix_len: usize, range: std::ops::Range<u64>, t: &Dense<R>) -> R {
        let mut coloring = vec![0usize; self.due.len()];
        let mut total = R::zero();
        'prefix: for p in range {
            let mut rest = p;
            for slot in (0..prefix_len).rev() {
                coloring[slot] = (rest % t.n as u64) as usize;
                rest /= t.n as u64;
            }
            let mut acc = R::one();
            for d in 0..prefix_len {
                match self.step(d, &acc, &coloring, t) {
                    Some(next) => acc = next,
                    None => continue 'prefix,
                }
            }
            total = total.add(&self.sum_from(prefix_len, &acc, &mut coloring, t));
        }
        total
    }
}

/// Sum over every colouring of [`eval_coloring`], accumulating vertex
/// weights along a depth-first walk of the colouring tree.
pub fn state_sum<R: Ring>(g: &TrivalentGraph, t: &ThreeJTable<R>) -> R {
    if t.color_count() == 0 {
        return if g.slots() == 0 { R::one() } else { R::zero() };
    }
    Schedule::new(g).sum_prefixes(0, 0..1, &Dense::new(t))
}

/// Splits the colouring space by the colours of the leading slots into
/// `jobs` contiguous blocks summed on a dedicated pool, then adds the partial
/// sums in block order.
pub fn state_sum_parallel<R: Ring>(
    g: &TrivalentGraph,
    t: &ThreeJTable<R>,
    jobs: usize,
) -> Result<R, StateSumError> {
    let jobs = jobs.max(1);
    let n = t.color_count();
    if jobs == 1 || n <= 1 || g.slots() == 0 {
        return Ok(state_sum(g, t));
    }
    let mut prefix_len = 0;
    let mut prefixes = 1u64;
    while prefixes < jobs as u64 && prefix_len < g.slots() {
        prefix_len += 1;
        prefixes *= n as u64;
    }
    let block = prefixes.div_ceil(jobs as u64).max(1);
    let schedule = Schedule::new(g);
    let dense = Dense::new(t);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| StateSumError::Pool(e.to_string()))?;
    let partials: Vec<R> = pool.install(|| {
        (0..jobs as u64)
            .into_par_iter()
            .map(|j| {
                let start = (j * block).min(prefixes);
                let end = ((j + 1) * block).min(prefixes);
                schedule.sum_prefixes(prefix_len, start..end, &dense)
            })
            .collect()
    });
    Ok(partials.iter().fold(R::zero(), |acc, x| acc.add(x)))
}

/// All trivalent multigraphs with loops on `vertices` vertices, up to
/// isomorphism, with no circle components.
pub fn enumerate_trivalent(vertices: usize) -> Vec<TrivalentGraph> {
    if vertices % 2 == 1 {
        return Vec::new();
    }
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (u..vertices).map(move |v| (u, v)))
        .collect();
    let edge_count = 3 * vertices / 2;
    let mut found = BTreeSet::new();
    let mut chosen = Vec::with_capacity(edge_count);
    let mut degree = vec![0usize; vertices];
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        left: usize,
        chosen: &mut Vec<(usize, usize)>,
        degree: &mut [usize],
        found: &mut BTreeSet<TrivalentGraph>,
        n: usize,
    ) {
        if left == 0 {
            if degree.iter().all(|&d| d == 3) {
                let g = TrivalentGraph {
                    vertices: n,
                    edges: chosen.clone(),
                    circles: 0,
                };
                found.insert(g.canonical());
            }
            return;
        }
        for i in start..pairs.len() {
            let (u, v) = pairs[i];
            let need = if u == v { 2 } else { 1 };
            if degree[u] + need > 3 || (u != v && degree[v] + 1 > 3) {
                continue;
            }
            degree[u] += 1;
            degree[v] += 1;
            chosen.push((u, v));
            rec(pairs, i, left - 1, chosen, degree, found, n);
            chosen.pop();
            degree[u] -= 1;
            degree[v] -= 1;
        }
    }
    rec(&pairs, 0, edge_count, &mut chosen, &mut degree, &mut found, vertices);
    found.into_iter().collect()
}

/// Every graph with at most `max_vertices` vertices and at most
/// `max_circles` circles, up to isomorphism.
pub fn enumerate_graphs(max_vertices: usize, max_circles: usize) -> Vec<TrivalentGraph> {
    let mut out = Vec::new();
    for n in (0..=max_vertices).step_by(2) {
        for g in enumerate_trivalent(n) {
            for c in 0..=max_circles {
                out.push(TrivalentGraph {
                    circles: c,
                    ..g.clone()
                });
            }
        }
    }
    out
}

/// Parses `v <id>`, `e <v1> <v2> [<p1> <p2>]` and `circle` lines.
pub fn parse_graph(text: &str) -> Result<TrivalentGraph, StateSumError> {
    let mut ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut circles = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| StateSumError::Syntax {
            line: i + 1,
            message,
        };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["v", id] => {
                let next = ids.len();
                if ids.insert(id.to_string(), next).is_some() {
                    return Err(syntax(format!("duplicate vertex {id:?}")));
                }
            }
            ["e", a, b, ports @ ..] if ports.is_empty() || ports.len() == 2 => {
                for p in ports {
                    p.parse::<u8>()
                        .map_err(|_| syntax(format!("bad port {p:?}")))?;
                }
                let look = |v: &str| {
                    ids.get(v)
                        .copied()
                        .ok_or_else(|| syntax(format!("unknown vertex {v:?}")))
                };
                edges.push((look(a)?, look(b)?));
            }
            ["circle"] => circles += 1,
            _ => return Err(syntax(format!("unrecognised line {line:?}"))),
        }
    }
    TrivalentGraph::new(ids.len(), edges, circles)
}
