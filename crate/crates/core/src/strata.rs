//! Decorated strata and tautological classes as rational combinations of them.
//!
//! The class `[S]` of a decorated stratum `S = (Γ, α)` is the pushforward of
//! the monomial `α` along the gluing map `M_Γ -> M_{g,n}`, with no `1/|Aut Γ|`
//! prefactor. Automorphism factors always appear in explicit coefficients.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, Mutex, RwLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::{dimension, graphs_with_edges, StableGraph};
use crate::rational::{format_q, parse_q, Q};

/// Decorations on a labeled graph: ψ exponents on legs (indexed by marking
/// minus one) and on edge half-edges, and a κ multiset per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decoration {
    pub leg_psi: Vec<u32>,
    pub half_edge_psi: Vec<u32>,
    pub kappa: Vec<Vec<u32>>,
}

impl Decoration {
    pub fn empty(graph: &StableGraph) -> Self {
        Decoration {
            leg_psi: vec![0; graph.num_markings() as usize],
            half_edge_psi: vec![0; 2 * graph.num_edges()],
            kappa: vec![Vec::new(); graph.num_vertices()],
        }
    }

    pub fn local_degree(&self, graph: &StableGraph, v: usize) -> u32 {
        let legs: u32 = graph.vertex_legs(v).iter().map(|&l| self.leg_psi[l as usize - 1]).sum();
        let hes: u32 = graph.half_edges_at(v).iter().map(|&h| self.half_edge_psi[h]).sum();
        legs + hes + self.kappa[v].iter().sum::<u32>()
    }

    pub fn fits(&self, graph: &StableGraph) -> bool {
        (0..graph.num_vertices()).all(|v| self.local_degree(graph, v) <= graph.vertex_dim(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DecoratedStratum {
    graph: StableGraph,
    leg_psi: Vec<u32>,
    /// Per canonical edge: exponent at the first endpoint, at the second.
    edge_psi: Vec<(u32, u32)>,
    kappa: Vec<Vec<u32>>,
}

static LABELINGS: LazyLock<RwLock<HashMap<StableGraph, Arc<(StableGraph, Vec<Vec<usize>>)>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

pub(crate) fn cached_labelings(graph: &StableGraph) -> Arc<(StableGraph, Vec<Vec<usize>>)> {
    if let Some(hit) = LABELINGS.read().unwrap().get(graph) {
        return hit.clone();
    }
    let value = Arc::new(graph.canonical_labelings());
    LABELINGS.write().unwrap().insert(graph.clone(), value.clone());
    value
}

impl DecoratedStratum {
    /// Canonicalizes a decorated labeled graph. Returns `None` when some
    /// vertex carries more than its dimension, i.e. the class vanishes.
    pub fn from_labeled(graph: &StableGraph, dec: &Decoration) -> Option<Self> {
        if !dec.fits(graph) {
            return None;
        }
        let labelings = cached_labelings(graph);
        let (canon, perms) = (&labelings.0, &labelings.1);
        let mut best: Option<(Vec<(usize, usize, u32, u32)>, Vec<Vec<u32>>)> = None;
        for perm in perms {
            let mut kappa = vec![Vec::new(); graph.num_vertices()];
            for (v, k) in dec.kappa.iter().enumerate() {
                let mut k = k.clone();
                k.sort_unstable();
                kappa[perm[v]] = k;
            }
            let mut edges: Vec<(usize, usize, u32, u32)> = graph
                .edges()
                .iter()
                .enumerate()
                .map(|(i, &(u, v))| {
                    let (a, b) = (perm[u], perm[v]);
                    let (pa, pb) = (dec.half_edge_psi[2 * i], dec.half_edge_psi[2 * i + 1]);
                    if a < b {
                        (a, b, pa, pb)
                    } else if a > b {
                        (b, a, pb, pa)
                    } else {
                        (a, b, pa.min(pb), pa.max(pb))
                    }
                })
                .collect();
            edges.sort_unstable();
            let cand = (edges, kappa);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
        }
        let (edges, kappa) = best?;
        Some(DecoratedStratum {
            graph: canon.clone(),
            leg_psi: dec.leg_psi.clone(),
            edge_psi: edges.iter().map(|&(_, _, a, b)| (a, b)).collect(),
            kappa,
        })
    }

    pub fn undecorated(graph: &StableGraph) -> Self {
        DecoratedStratum::from_labeled(graph, &Decoration::empty(graph)).expect("no decorations")
    }

    pub fn fundamental(g: u32, n: u32) -> Result<Self> {
        Ok(DecoratedStratum::undecorated(&StableGraph::smooth(g, n)?))
    }

    pub fn psi(g: u32, n: u32, marking: u32) -> Result<Self> {
        if marking == 0 || marking > n {
            return Err(Error::Unsupported(format!("no marking {marking} on M_{{{g},{n}}}")));
        }
        let graph = StableGraph::smooth(g, n)?;
        let mut dec = Decoration::empty(&graph);
        dec.leg_psi[marking as usize - 1] = 1;
        DecoratedStratum::from_labeled(&graph, &dec)
            .ok_or(Error::DegreeOutOfRange { g, n, degree: 1, dim: dimension(g, n) })
    }

    pub fn kappa(g: u32, n: u32, indices: &[u32]) -> Result<Self> {
        let graph = StableGraph::smooth(g, n)?;
        let mut dec = Decoration::empty(&graph);
        dec.kappa[0] = indices.to_vec();
        let degree = indices.iter().sum();
        DecoratedStratum::from_labeled(&graph, &dec)
            .ok_or(Error::DegreeOutOfRange { g, n, degree, dim: dimension(g, n) })
    }

    pub fn graph(&self) -> &StableGraph {
        &self.graph
    }

    pub fn leg_psi(&self) -> &[u32] {
        &self.leg_psi
    }

    pub fn edge_psi(&self) -> &[(u32, u32)] {
        &self.edge_psi
    }

    pub fn kappa_at(&self, v: usize) -> &[u32] {
        &self.kappa[v]
    }

    pub fn g(&self) -> u32 {
        self.graph.genus()
    }

    pub fn n(&self) -> u32 {
        self.graph.num_markings()
    }

    /// The decoration in the labeled form used by `from_labeled`.
    pub fn decoration(&self) -> Decoration {
        Decoration {
            leg_psi: self.leg_psi.clone(),
            half_edge_psi: self.edge_psi.iter().flat_map(|&(a, b)| [a, b]).collect(),
            kappa: self.kappa.clone(),
        }
    }

    pub fn codim(&self) -> u32 {
        self.graph.num_edges() as u32
            + self.leg_psi.iter().sum::<u32>()
            + self.edge_psi.iter().map(|&(a, b)| a + b).sum::<u32>()
            + self.kappa.iter().flatten().sum::<u32>()
    }

    /// ψ exponents of every marking of the vertex moduli space at `v`:
    /// its legs followed by its edge half-edges.
    pub fn vertex_psi(&self, v: usize) -> Vec<u32> {
        let dec = self.decoration();
        let mut out: Vec<u32> = self.graph.vertex_legs(v).iter().map(|&l| self.leg_psi[l as usize - 1]).collect();
        out.extend(self.graph.half_edges_at(v).iter().map(|&h| dec.half_edge_psi[h]));
        out
    }

    pub fn has_decorations(&self) -> bool {
        self.codim() as usize != self.graph.num_edges()
    }

    pub fn to_json(&self) -> StratumJson {
        let mut psi = BTreeMap::new();
        for (i, &p) in self.leg_psi.iter().enumerate() {
            if p > 0 {
                psi.insert((i + 1).to_string(), p);
            }
        }
        for (i, &(a, b)) in self.edge_psi.iter().enumerate() {
            if a > 0 {
                psi.insert(format!("h{}", 2 * i), a);
            }
            if b > 0 {
                psi.insert(format!("h{}", 2 * i + 1), b);
            }
        }
        let kappa = self
            .kappa
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_empty())
            .map(|(v, k)| (v.to_string(), k.clone()))
            .collect();
        StratumJson { graph: self.graph.encode(), psi, kappa }
    }

    pub fn from_json(json: &StratumJson) -> Result<Self> {
        let graph = StableGraph::decode(&json.graph)?;
        let mut dec = Decoration::empty(&graph);
        for (key, &p) in &json.psi {
            let slot = match key.strip_prefix('h') {
                Some(h) => dec.half_edge_psi.get_mut(h.parse::<usize>().map_err(|_| Error::Parse(key.clone()))?),
                None => key
                    .parse::<usize>()
                    .ok()
                    .filter(|&i| i >= 1)
                    .and_then(|i| dec.leg_psi.get_mut(i - 1)),
            };
            *slot.ok_or_else(|| Error::Parse(format!("unknown psi slot {key:?}")))? = p;
        }
        for (key, k) in &json.kappa {
            let v: usize = key.parse().map_err(|_| Error::Parse(key.clone()))?;
            *dec.kappa.get_mut(v).ok_or_else(|| Error::Parse(format!("unknown vertex {key:?}")))? = k.clone();
        }
        DecoratedStratum::from_labeled(&graph, &dec)
            .ok_or_else(|| Error::Parse(format!("decoration exceeds a vertex dimension on {}", json.graph)))
    }
}

impl fmt::Display for DecoratedStratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.graph)?;
        let j = self.to_json();
        if !j.psi.is_empty() {
            let parts: Vec<String> = j.psi.iter().map(|(k, v)| format!("psi{k}^{v}")).collect();
            write!(f, " {}", parts.join(" "))?;
        }
        for (v, k) in &j.kappa {
            let parts: Vec<String> = k.iter().map(|a| format!("kappa{a}")).collect();
            write!(f, " v{v}:{}", parts.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumJson {
    pub graph: String,
    #[serde(default)]
    pub psi: BTreeMap<String, u32>,
    #[serde(default)]
    pub kappa: BTreeMap<String, Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(flatten)]
    pub stratum: StratumJson,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TautClassJson {
    pub g: u32,
    pub n: u32,
    pub degree: u32,
    pub terms: Vec<TermJson>,
}

/// A rational combination of decorated strata of one codimension on `M_{g,n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TautClass {
    g: u32,
    n: u32,
    degree: u32,
    terms: BTreeMap<DecoratedStratum, Q>,
}

impl TautClass {
    pub fn zero(g: u32, n: u32, degree: u32) -> Self {
        TautClass { g, n, degree, terms: BTreeMap::new() }
    }

    pub fn from_stratum(stratum: DecoratedStratum) -> Self {
        let mut c = TautClass::zero(stratum.g(), stratum.n(), stratum.codim());
        c.terms.insert(stratum, Q::one());
        c
    }

    pub fn fundamental(g: u32, n: u32) -> Result<Self> {
        Ok(TautClass::from_stratum(DecoratedStratum::fundamental(g, n)?))
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<DecoratedStratum, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, stratum: &DecoratedStratum) -> Q {
        self.terms.get(stratum).cloned().unwrap_or_else(Q::zero)
    }

    /// Adds `coeff * [stratum]`; the stratum must be canonical and of matching type.
    pub fn add_term(&mut self, stratum: DecoratedStratum, coeff: Q) {
        debug_assert_eq!(stratum.codim(), self.degree);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(stratum) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_compatible(&self, other: &TautClass) -> Result<()> {
        if (self.g, self.n, self.degree) != (other.g, other.n, other.degree) {
            return Err(Error::Mismatch(format!(
                "(g, n, degree) = ({}, {}, {}) vs ({}, {}, {})",
                self.g, self.n, self.degree, other.g, other.n, other.degree
            )));
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, coeff: &Q, other: &TautClass) -> Result<()> {
        self.check_compatible(other)?;
        for (s, c) in &other.terms {
            self.add_term(s.clone(), c * coeff);
        }
        Ok(())
    }

    pub fn scaled(&self, coeff: &Q) -> TautClass {
        let mut out = TautClass::zero(self.g, self.n, self.degree);
        if !coeff.is_zero() {
            out.terms = self.terms.iter().map(|(s, c)| (s.clone(), c * coeff)).collect();
        }
        out
    }

    pub fn plus(&self, other: &TautClass) -> Result<TautClass> {
        let mut out = self.clone();
        out.add_scaled(&Q::one(), other)?;
        Ok(out)
    }

    pub fn minus(&self, other: &TautClass) -> Result<TautClass> {
        let mut out = self.clone();
        out.add_scaled(&-Q::one(), other)?;
        Ok(out)
    }

    /// Keeps only the terms whose stratum satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&DecoratedStratum) -> bool) -> TautClass {
        let mut out = TautClass::zero(self.g, self.n, self.degree);
        out.terms = self.terms.iter().filter(|(s, _)| keep(s)).map(|(s, c)| (s.clone(), c.clone())).collect();
        out
    }

    pub fn to_json(&self) -> TautClassJson {
        TautClassJson {
            g: self.g,
            n: self.n,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(s, c)| TermJson { stratum: s.to_json(), coeff: format_q(c) })
                .collect(),
        }
    }

    pub fn from_json(json: &TautClassJson) -> Result<Self> {
        let mut out = TautClass::zero(json.g, json.n, json.degree);
        for t in &json.terms {
            let s = DecoratedStratum::from_json(&t.stratum)?;
            if (s.g(), s.n(), s.codim()) != (json.g, json.n, json.degree) {
                return Err(Error::Mismatch(format!("term {} does not live in degree {}", t.stratum.graph, json.degree)));
            }
            out.add_term(s, parse_q(&t.coeff)?);
        }
        Ok(out)
    }
}

impl fmt::Display for TautClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (s, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:>12}  {}", format_q(c), s)?;
        }
        Ok(())
    }
}

/// Linear combination of classes sharing `(g, n, degree)`.
pub fn combine(pairs: &[(Q, TautClass)]) -> Result<TautClass> {
    let first = pairs.first().ok_or_else(|| Error::Mismatch("empty combination".into()))?;
    let mut out = TautClass::zero(first.1.g, first.1.n, first.1.degree);
    for (c, x) in pairs {
        out.add_scaled(c, x)?;
    }
    Ok(out)
}

/// A class with one component per codimension `0..=dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedClass {
    g: u32,
    n: u32,
    parts: Vec<TautClass>,
}

impl MixedClass {
    pub fn zero(g: u32, n: u32) -> Self {
        let parts = (0..=dimension(g, n)).map(|d| TautClass::zero(g, n, d)).collect();
        MixedClass { g, n, parts }
    }

    pub fn one(g: u32, n: u32) -> Result<Self> {
        let mut m = MixedClass::zero(g, n);
        m.parts[0] = TautClass::fundamental(g, n)?;
        Ok(m)
    }

    pub fn from_parts(g: u32, n: u32, parts: Vec<TautClass>) -> Result<Self> {
        let mut m = MixedClass::zero(g, n);
        for p in parts {
            if p.g != g || p.n != n {
                return Err(Error::Mismatch("mixed class parts on different spaces".into()));
            }
            if p.degree as usize >= m.parts.len() {
                if p.is_zero() {
                    continue;
                }
                return Err(Error::DegreeOutOfRange { g, n, degree: p.degree, dim: dimension(g, n) });
            }
            let d = p.degree as usize;
            m.parts[d].add_scaled(&Q::one(), &p)?;
        }
        Ok(m)
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn part(&self, degree: u32) -> &TautClass {
        &self.parts[degree as usize]
    }

    pub fn parts(&self) -> &[TautClass] {
        &self.parts
    }

    pub fn max_degree(&self) -> u32 {
        self.parts.len() as u32 - 1
    }

    pub fn plus(&self, other: &MixedClass) -> Result<MixedClass> {
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| a.plus(b)).collect::<Result<_>>()?;
        Ok(MixedClass { g: self.g, n: self.n, parts })
    }

    pub fn scaled(&self, c: &Q) -> MixedClass {
        MixedClass { g: self.g, n: self.n, parts: self.parts.iter().map(|p| p.scaled(c)).collect() }
    }

    pub fn filter(&self, mut keep: impl FnMut(&DecoratedStratum) -> bool) -> MixedClass {
        MixedClass { g: self.g, n: self.n, parts: self.parts.iter().map(|p| p.filter(&mut keep)).collect() }
    }
}

/// Integer partitions of `total` into positive parts, each sorted ascending.
pub(crate) fn partitions(total: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            let mut p = prefix.clone();
            p.reverse();
            out.push(p);
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            prefix.push(part);
            rec(rest - part, part, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, &mut Vec::new(), &mut out);
    out
}

/// Weak compositions of `total` into `parts` nonnegative summands.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every decoration of `graph` of total decoration degree `budget` that
/// respects the per-vertex dimension bound.
pub(crate) fn decorations_of_degree(graph: &StableGraph, budget: u32) -> Vec<Decoration> {
    let nv = graph.num_vertices();
    let mut out = Vec::new();
    for split in compositions(budget, nv) {
        if (0..nv).any(|v| split[v] > graph.vertex_dim(v)) {
            continue;
        }
        let per_vertex: Vec<Vec<(Vec<u32>, Vec<u32>)>> = (0..nv)
            .map(|v| {
                let slots = graph.vertex_legs(v).len() + graph.half_edges_at(v).len();
                let mut options = Vec::new();
                for kdeg in 0..=split[v] {
                    for kap in partitions(kdeg) {
                        for psi in compositions(split[v] - kdeg, slots) {
                            options.push((kap.clone(), psi));
                        }
                    }
                }
                options
            })
            .collect();
        for choice in crate::graphs::cartesian(&per_vertex) {
            let mut dec = Decoration::empty(graph);
            for (v, (kap, psi)) in choice.into_iter().enumerate() {
                dec.kappa[v] = kap;
                let legs = graph.vertex_legs(v);
                for (i, &l) in legs.iter().enumerate() {
                    dec.leg_psi[l as usize - 1] = psi[i];
                }
                for (j, h) in graph.half_edges_at(v).into_iter().enumerate() {
                    dec.half_edge_psi[h] = psi[legs.len() + j];
                }
            }
            out.push(dec);
        }
    }
    out
}

static GENERATORS: LazyLock<Mutex<HashMap<(u32, u32, u32), Arc<Vec<DecoratedStratum>>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// All canonical decorated strata of codimension `d` on `M_{g,n}` obeying the
/// per-vertex degree bound, sorted and without duplicates.
pub fn generators(g: u32, n: u32, d: u32) -> Result<Arc<Vec<DecoratedStratum>>> {
    if !crate::graphs::is_stable_type(g, n) {
        return Err(Error::Unstable { g, n });
    }
    let dim = dimension(g, n);
    if d > dim {
        return Err(Error::DegreeOutOfRange { g, n, degree: d, dim });
    }
    if let Some(hit) = GENERATORS.lock().unwrap().get(&(g, n, d)) {
        return Ok(hit.clone());
    }
    let mut set = BTreeSet::new();
    for e in 0..=d as usize {
        for graph in graphs_with_edges(g, n, e) {
            for dec in decorations_of_degree(&graph, d - e as u32) {
                if let Some(s) = DecoratedStratum::from_labeled(&graph, &dec) {
                    set.insert(s);
                }
            }
        }
    }
    let list = Arc::new(set.into_iter().collect::<Vec<_>>());
    GENERATORS.lock().unwrap().insert((g, n, d), list.clone());
    Ok(list)
}
