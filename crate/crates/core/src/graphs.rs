//! Stable dual graphs: construction, canonical labeling, isomorphisms,
//! automorphism counts, edge contraction and enumeration.
//!
//! A graph is stored as a list of vertices (genus, sorted legs) and a list of
//! edges `(u, v)` with `u <= v`; a loop is an edge with `u == v`. Half-edge
//! `2i` sits at `edges[i].0` and half-edge `2i + 1` at `edges[i].1`. Legs are
//! identified with their marking label `1..=n`.
//!
//! Canonical text encoding: every vertex as `(genus|legs)` in canonical
//! order, then `;`, then the sorted edge list `u-v` joined by commas. For
//! example the loop graph of `M_{1,1}` is `(0|1);0-0`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{LazyLock, Mutex};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StableGraph {
    genera: Vec<u32>,
    legs: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
}

/// Open loci of `M_{g,n}`, each described by a predicate on dual graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusKind {
    All,
    Treelike,
    CompactType,
    Smooth,
}

impl LocusKind {
    pub fn contains(self, graph: &StableGraph) -> bool {
        match self {
            LocusKind::All => true,
            LocusKind::Treelike => graph.is_treelike(),
            LocusKind::CompactType => graph.is_tree(),
            LocusKind::Smooth => graph.num_edges() == 0,
        }
    }
}

impl std::str::FromStr for LocusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(LocusKind::All),
            "treelike" | "tl" => Ok(LocusKind::Treelike),
            "compact_type" | "compact-type" | "ct" => Ok(LocusKind::CompactType),
            "smooth" => Ok(LocusKind::Smooth),
            other => Err(Error::Parse(format!("unknown locus {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusFlags {
    pub is_tree: bool,
    pub is_treelike: bool,
}

/// An isomorphism between two graphs, given on vertices and half-edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphIso {
    pub vertex: Vec<usize>,
    pub half_edge: Vec<usize>,
}

/// Result of contracting a set of edges.
#[derive(Clone, Debug)]
pub struct Contraction {
    pub graph: StableGraph,
    /// Vertex of the original graph to vertex of the contracted graph.
    pub vertex: Vec<usize>,
    /// Half-edge of the original graph to half-edge of the contracted graph,
    /// `None` for half-edges of contracted edges.
    pub half_edge: Vec<Option<usize>>,
}

pub fn is_stable_type(g: u32, n: u32) -> bool {
    2 * g + n > 2
}

fn check_stable_type(g: u32, n: u32) -> Result<()> {
    if is_stable_type(g, n) {
        Ok(())
    } else {
        Err(Error::Unstable { g, n })
    }
}

pub fn dimension(g: u32, n: u32) -> u32 {
    (3 * g + n).saturating_sub(3)
}

impl StableGraph {
    /// Validates connectivity, stability and the leg labeling.
    pub fn new(genera: Vec<u32>, legs: Vec<Vec<u32>>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if genera.is_empty() || genera.len() != legs.len() {
            return Err(Error::InvalidGraph("vertex data length mismatch".into()));
        }
        let nv = genera.len();
        let mut legs = legs;
        for l in legs.iter_mut() {
            l.sort_unstable();
        }
        let mut edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        if edges.iter().any(|&(_, v)| v >= nv) {
            return Err(Error::InvalidGraph("edge endpoint out of range".into()));
        }
        edges.sort_unstable();
        let graph = StableGraph { genera, legs, edges };

        let mut all_legs: Vec<u32> = graph.legs.iter().flatten().copied().collect();
        all_legs.sort_unstable();
        if all_legs.iter().enumerate().any(|(i, &l)| l != i as u32 + 1) {
            return Err(Error::InvalidGraph(format!("legs must be 1..n exactly once, got {all_legs:?}")));
        }
        if !graph.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        for v in 0..nv {
            if !is_stable_type(graph.genera[v], graph.valence(v)) {
                return Err(Error::InvalidGraph(format!("vertex {v} is unstable")));
            }
        }
        Ok(graph)
    }

    /// The edgeless graph of the open part `M_{g,n}`.
    pub fn smooth(g: u32, n: u32) -> Result<Self> {
        check_stable_type(g, n)?;
        Ok(StableGraph { genera: vec![g], legs: vec![(1..=n).collect()], edges: vec![] })
    }

    fn is_connected(&self) -> bool {
        let nv = self.num_vertices();
        let mut uf = UnionFind::new(nv);
        for &(u, v) in &self.edges {
            uf.union(u, v);
        }
        (0..nv).all(|v| uf.find(v) == uf.find(0))
    }

    pub fn num_vertices(&self) -> usize {
        self.genera.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn h1(&self) -> u32 {
        (self.num_edges() + 1 - self.num_vertices()) as u32
    }

    pub fn genus(&self) -> u32 {
        self.genera.iter().sum::<u32>() + self.h1()
    }

    pub fn num_markings(&self) -> u32 {
        self.legs.iter().map(|l| l.len() as u32).sum()
    }

    pub fn vertex_genus(&self, v: usize) -> u32 {
        self.genera[v]
    }

    pub fn vertex_legs(&self, v: usize) -> &[u32] {
        &self.legs[v]
    }

    pub fn genera(&self) -> &[u32] {
        &self.genera
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Number of legs plus edge half-edges at `v`.
    pub fn valence(&self, v: usize) -> u32 {
        let he = self.edges.iter().map(|&(a, b)| (a == v) as u32 + (b == v) as u32).sum::<u32>();
        self.legs[v].len() as u32 + he
    }

    pub fn loops_at(&self, v: usize) -> u32 {
        self.edges.iter().filter(|&&(a, b)| a == v && b == v).count() as u32
    }

    /// Dimension `3g(v) - 3 + n(v)` of the vertex moduli space.
    pub fn vertex_dim(&self, v: usize) -> u32 {
        dimension(self.genera[v], self.valence(v))
    }

    pub fn half_edge_vertex(&self, h: usize) -> usize {
        let (u, v) = self.edges[h / 2];
        if h % 2 == 0 {
            u
        } else {
            v
        }
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..2 * self.num_edges()).filter(|&h| self.half_edge_vertex(h) == v).collect()
    }

    pub fn leg_vertex(&self, marking: u32) -> usize {
        self.legs.iter().position(|l| l.contains(&marking)).expect("marking present")
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.iter().filter(|&&e| e == key).count()
    }

    pub fn is_tree(&self) -> bool {
        self.h1() == 0
    }

    /// All cycles have length at most one: removing loops leaves a tree.
    pub fn is_treelike(&self) -> bool {
        let non_loops = self.edges.iter().filter(|&&(u, v)| u != v).count();
        non_loops + 1 == self.num_vertices()
    }

    pub fn classify(&self) -> LocusFlags {
        LocusFlags { is_tree: self.is_tree(), is_treelike: self.is_treelike() }
    }

    fn vertex_key(&self, v: usize) -> (u32, Vec<u32>, u32, u32) {
        (self.genera[v], self.legs[v].clone(), self.valence(v), self.loops_at(v))
    }

    /// Isomorphism-invariant vertex colors from iterated neighborhood refinement.
    fn refined_colors(&self) -> Vec<usize> {
        let nv = self.num_vertices();
        let keys: Vec<_> = (0..nv).map(|v| self.vertex_key(v)).collect();
        let mut colors = rank(&keys);
        loop {
            let sigs: Vec<(usize, Vec<(usize, usize)>)> = (0..nv)
                .map(|v| {
                    let mut nb: Vec<(usize, usize)> = (0..nv)
                        .filter(|&u| u != v)
                        .map(|u| (colors[u], self.multiplicity(u, v)))
                        .filter(|&(_, m)| m > 0)
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let next = rank(&sigs);
            let before = colors.iter().collect::<BTreeSet<_>>().len();
            let after = next.iter().collect::<BTreeSet<_>>().len();
            colors = next;
            if after == before {
                return colors;
            }
        }
    }

    fn relabeled(&self, perm: &[usize]) -> StableGraph {
        let nv = self.num_vertices();
        let mut genera = vec![0; nv];
        let mut legs = vec![Vec::new(); nv];
        for v in 0..nv {
            genera[perm[v]] = self.genera[v];
            legs[perm[v]] = self.legs[v].clone();
        }
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (perm[u], perm[v]);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        edges.sort_unstable();
        StableGraph { genera, legs, edges }
    }

    /// Canonical representative together with every vertex relabeling
    /// (old index to new index) that produces it.
    pub fn canonical_labelings(&self) -> (StableGraph, Vec<Vec<usize>>) {
        let colors = self.refined_colors();
        let nv = self.num_vertices();
        let mut order: Vec<usize> = (0..nv).collect();
        order.sort_by_key(|&v| colors[v]);
        let classes: Vec<Vec<usize>> = order
            .iter()
            .copied()
            .chunk_by(|&v| colors[v])
            .into_iter()
            .map(|(_, grp)| grp.collect())
            .collect();

        let mut best: Option<StableGraph> = None;
        let mut perms: Vec<Vec<usize>> = Vec::new();
        let class_orders: Vec<Vec<Vec<usize>>> =
            classes.iter().map(|c| c.iter().copied().permutations(c.len()).collect()).collect();
        for choice in cartesian(&class_orders) {
            let mut perm = vec![0; nv];
            for (new, &old) in choice.iter().flatten().enumerate() {
                perm[old] = new;
            }
            let cand = self.relabeled(&perm);
            match &best {
                Some(b) if cand > *b => {}
                Some(b) if cand == *b => perms.push(perm),
                _ => {
                    best = Some(cand);
                    perms = vec![perm];
                }
            }
        }
        (best.expect("at least one labeling"), perms)
    }

    pub fn canonical_form(&self) -> StableGraph {
        self.canonical_labelings().0
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical_form() == *self
    }

    /// Vertex bijections `self -> other` preserving genus, legs and edge
    /// multiplicities.
    pub fn vertex_isomorphisms(&self, other: &StableGraph) -> Vec<Vec<usize>> {
        let nv = self.num_vertices();
        if nv != other.num_vertices() || self.num_edges() != other.num_edges() {
            return vec![];
        }
        let ka: Vec<_> = (0..nv).map(|v| self.vertex_key(v)).collect();
        let kb: Vec<_> = (0..nv).map(|v| other.vertex_key(v)).collect();
        let ma: Vec<Vec<usize>> = (0..nv).map(|u| (0..nv).map(|v| self.multiplicity(u, v)).collect()).collect();
        let mb: Vec<Vec<usize>> = (0..nv).map(|u| (0..nv).map(|v| other.multiplicity(u, v)).collect()).collect();

        let mut out = Vec::new();
        let mut map = vec![usize::MAX; nv];
        let mut used = vec![false; nv];
        fn rec(
            v: usize,
            nv: usize,
            ka: &[(u32, Vec<u32>, u32, u32)],
            kb: &[(u32, Vec<u32>, u32, u32)],
            ma: &[Vec<usize>],
            mb: &[Vec<usize>],
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if v == nv {
                out.push(map.clone());
                return;
            }
            for w in 0..nv {
                if used[w] || ka[v] != kb[w] {
                    continue;
                }
                if (0..v).any(|u| ma[v][u] != mb[w][map[u]]) {
                    continue;
                }
                used[w] = true;
                map[v] = w;
                rec(v + 1, nv, ka, kb, ma, mb, map, used, out);
                used[w] = false;
            }
        }
        rec(0, nv, &ka, &kb, &ma, &mb, &mut map, &mut used, &mut out);
        out
    }

    /// Full isomorphisms `self -> other`, on vertices and half-edges.
    pub fn isomorphisms(&self, other: &StableGraph) -> Vec<GraphIso> {
        let mut out = Vec::new();
        for vmap in self.vertex_isomorphisms(other) {
            // Edges of `self` grouped by image endpoint pair, matched with the
            // edges of `other` on that pair.
            let mut groups: Vec<((usize, usize), Vec<usize>, Vec<usize>)> = Vec::new();
            for (i, &(u, v)) in self.edges.iter().enumerate() {
                let (a, b) = (vmap[u], vmap[v]);
                let key = if a <= b { (a, b) } else { (b, a) };
                match groups.iter_mut().find(|g| g.0 == key) {
                    Some(g) => g.1.push(i),
                    None => groups.push((key, vec![i], vec![])),
                }
            }
            for grp in groups.iter_mut() {
                grp.2 = (0..other.num_edges()).filter(|&j| other.edges[j] == grp.0).collect();
            }
            // Per group: every bijection, and both orientations of each loop.
            let per_group: Vec<Vec<Vec<(usize, usize, bool)>>> = groups
                .iter()
                .map(|(key, src, dst)| {
                    let is_loop = key.0 == key.1;
                    let mut options = Vec::new();
                    for p in dst.iter().copied().permutations(dst.len()) {
                        let flips: Vec<Vec<bool>> = if is_loop {
                            cartesian(&vec![vec![false, true]; src.len()])
                        } else {
                            vec![vec![false; src.len()]]
                        };
                        for f in flips {
                            options.push(src.iter().zip(&p).zip(&f).map(|((&s, &d), &fl)| (s, d, fl)).collect());
                        }
                    }
                    options
                })
                .collect();
            for combo in cartesian(&per_group) {
                let mut he = vec![0; 2 * self.num_edges()];
                for (s, d, flip) in combo.into_iter().flatten() {
                    let (u, _) = self.edges[s];
                    let straight = if u == self.edges[s].1 { !flip } else { vmap[u] == other.edges[d].0 };
                    if straight {
                        he[2 * s] = 2 * d;
                        he[2 * s + 1] = 2 * d + 1;
                    } else {
                        he[2 * s] = 2 * d + 1;
                        he[2 * s + 1] = 2 * d;
                    }
                }
                out.push(GraphIso { vertex: vmap.clone(), half_edge: he });
            }
        }
        out
    }

    /// Order of the automorphism group acting on vertices and half-edges,
    /// legs fixed pointwise.
    pub fn automorphism_count(&self) -> u64 {
        let vertex_auts = self.vertex_isomorphisms(self).len() as u64;
        let mut edge_factor = 1u64;
        for ((u, v), grp) in &self.edges.iter().chunk_by(|&&e| e) {
            let m = grp.count() as u64;
            edge_factor *= (1..=m).product::<u64>();
            if u == v {
                edge_factor *= 1 << m;
            }
        }
        vertex_auts * edge_factor
    }

    /// Contracts every edge whose `keep` flag is false.
    pub fn contract(&self, keep: &[bool]) -> Contraction {
        let nv = self.num_vertices();
        let mut uf = UnionFind::new(nv);
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if !keep[i] {
                uf.union(u, v);
            }
        }
        let mut comp_index: HashMap<usize, usize> = HashMap::new();
        let mut vertex = vec![0; nv];
        for v in 0..nv {
            let root = uf.find(v);
            let next = comp_index.len();
            vertex[v] = *comp_index.entry(root).or_insert(next);
        }
        let nc = comp_index.len();
        let mut genera = vec![0u32; nc];
        let mut legs = vec![Vec::new(); nc];
        let mut sizes = vec![0i64; nc];
        let mut internal = vec![0i64; nc];
        for v in 0..nv {
            genera[vertex[v]] += self.genera[v];
            legs[vertex[v]].extend_from_slice(&self.legs[v]);
            sizes[vertex[v]] += 1;
        }
        for (i, &(u, _)) in self.edges.iter().enumerate() {
            if !keep[i] {
                internal[vertex[u]] += 1;
            }
        }
        for c in 0..nc {
            genera[c] += (internal[c] - sizes[c] + 1) as u32;
            legs[c].sort_unstable();
        }
        let mut edges = Vec::new();
        let mut half_edge = vec![None; 2 * self.num_edges()];
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if !keep[i] {
                continue;
            }
            let j = edges.len();
            let (a, b) = (vertex[u], vertex[v]);
            if a <= b {
                edges.push((a, b));
                half_edge[2 * i] = Some(2 * j);
                half_edge[2 * i + 1] = Some(2 * j + 1);
            } else {
                edges.push((b, a));
                half_edge[2 * i] = Some(2 * j + 1);
                half_edge[2 * i + 1] = Some(2 * j);
            }
        }
        Contraction { graph: StableGraph { genera, legs, edges }, vertex, half_edge }
    }

    pub fn encode(&self) -> String {
        let mut s = String::new();
        for v in 0..self.num_vertices() {
            s.push_str(&format!("({}|{})", self.genera[v], self.legs[v].iter().join(",")));
        }
        s.push(';');
        s.push_str(&self.edges.iter().map(|(u, v)| format!("{u}-{v}")).join(","));
        s
    }

    /// Parses the text encoding; the result is validated but not re-canonicalized.
    pub fn decode(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("graph encoding {text:?}: {m}"));
        let (verts, edges) = text.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let mut genera = Vec::new();
        let mut legs = Vec::new();
        for chunk in verts.split(')').filter(|c| !c.is_empty()) {
            let body = chunk.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let (g, l) = body.split_once('|').ok_or_else(|| bad("expected '|'"))?;
            genera.push(g.parse().map_err(|_| bad("bad genus"))?);
            let l: Vec<u32> = if l.is_empty() {
                vec![]
            } else {
                l.split(',').map(|x| x.parse().map_err(|_| bad("bad leg"))).collect::<Result<_>>()?
            };
            legs.push(l);
        }
        let mut es = Vec::new();
        for e in edges.split(',').filter(|e| !e.is_empty()) {
            let (u, v) = e.split_once('-').ok_or_else(|| bad("bad edge"))?;
            es.push((u.parse().map_err(|_| bad("bad edge"))?, v.parse().map_err(|_| bad("bad edge"))?));
        }
        StableGraph::new(genera, legs, es)
    }
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Cartesian product of a list of option lists; one empty tuple for no lists.
pub(crate) fn cartesian<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for list in lists {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                list.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn rank<T: Ord + Clone>(keys: &[T]) -> Vec<usize> {
    let distinct: Vec<T> = keys.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    keys.iter().map(|k| distinct.binary_search(k).unwrap()).collect()
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Graphs by edge count, per (g, n); level `e` holds every canonical graph with `e` edges.
static GRAPH_LEVELS: LazyLock<Mutex<HashMap<(u32, u32), Vec<Vec<StableGraph>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Every graph obtained by un-contracting one edge: a loop at a vertex of
/// positive genus, or a split of one vertex into two joined by an edge.
fn one_edge_refinements(graph: &StableGraph) -> Vec<StableGraph> {
    let mut out = Vec::new();
    let nv = graph.num_vertices();
    for v in 0..nv {
        if graph.genera[v] > 0 {
            let mut genera = graph.genera.clone();
            genera[v] -= 1;
            let mut edges = graph.edges.clone();
            edges.push((v, v));
            if let Ok(g) = StableGraph::new(genera, graph.legs.clone(), edges) {
                out.push(g);
            }
        }
        let legs = &graph.legs[v];
        let hes = graph.half_edges_at(v);
        let items = legs.len() + hes.len();
        for g1 in 0..=graph.genera[v] {
            for mask in 0u64..(1 << items) {
                let mut new_legs = graph.legs.clone();
                new_legs.push(Vec::new());
                new_legs[v].clear();
                for (i, &l) in legs.iter().enumerate() {
                    new_legs[if mask >> i & 1 == 1 { nv } else { v }].push(l);
                }
                let mut edges = graph.edges.clone();
                for (j, &h) in hes.iter().enumerate() {
                    if mask >> (legs.len() + j) & 1 == 1 {
                        let e = &mut edges[h / 2];
                        if h % 2 == 0 {
                            e.0 = nv;
                        } else {
                            e.1 = nv;
                        }
                    }
                }
                edges.push((v, nv));
                let mut genera = graph.genera.clone();
                genera[v] -= g1;
                genera.push(g1);
                if let Ok(g) = StableGraph::new(genera, new_legs, edges) {
                    out.push(g);
                }
            }
        }
    }
    out
}

fn levels_up_to(g: u32, n: u32, max_edges: usize) -> Vec<Vec<StableGraph>> {
    let mut cache = GRAPH_LEVELS.lock().unwrap();
    let levels = cache.entry((g, n)).or_insert_with(|| vec![vec![StableGraph::smooth(g, n).unwrap()]]);
    while levels.len() <= max_edges {
        let mut next = BTreeSet::new();
        for graph in levels.last().unwrap() {
            for refined in one_edge_refinements(graph) {
                next.insert(refined.canonical_form());
            }
        }
        levels.push(next.into_iter().collect());
    }
    levels[..=max_edges].to_vec()
}

/// One canonical representative per isomorphism class of stable graphs of
/// type (g, n) with at most `codim_max` edges, sorted by canonical encoding.
pub fn enumerate_stable_graphs(g: u32, n: u32, codim_max: u32) -> Result<Vec<StableGraph>> {
    check_stable_type(g, n)?;
    let dim = dimension(g, n);
    if codim_max > dim {
        return Err(Error::DegreeOutOfRange { g, n, degree: codim_max, dim });
    }
    let mut all: Vec<StableGraph> = levels_up_to(g, n, codim_max as usize).into_iter().flatten().collect();
    all.sort_by_cached_key(|gr| gr.encode());
    Ok(all)
}

/// Canonical graphs of type (g, n) with exactly `edges` edges.
pub fn graphs_with_edges(g: u32, n: u32, edges: usize) -> Vec<StableGraph> {
    if !is_stable_type(g, n) || edges > dimension(g, n) as usize {
        return vec![];
    }
    levels_up_to(g, n, edges).pop().unwrap()
}

/// Snapshot of the in-memory enumeration cache, for persistence.
pub fn graph_cache_snapshot() -> Vec<((u32, u32), Vec<Vec<StableGraph>>)> {
    let cache = GRAPH_LEVELS.lock().unwrap();
    let mut out: Vec<_> = cache.iter().map(|(k, v)| (*k, v.clone())).collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Installs previously persisted levels; entries already present win.
pub fn graph_cache_install(g: u32, n: u32, levels: Vec<Vec<StableGraph>>) {
    let mut cache = GRAPH_LEVELS.lock().unwrap();
    let entry = cache.entry((g, n)).or_default();
    if levels.len() > entry.len() {
        *entry = levels;
    }
}

pub fn graph_cache_clear() {
    GRAPH_LEVELS.lock().unwrap().clear();
}
