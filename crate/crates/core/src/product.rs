//! Products of decorated strata.
//!
//! For strata with underlying graphs `A` and `B` the product is a sum over
//! graphs `Γ` carrying an `A`-structure and a `B`-structure (a set of edges
//! whose complement contracts to `A`, together with an isomorphism, and
//! likewise for `B`) whose edge sets cover `Γ`. Each pair contributes
//! `1/|Aut Γ|` times the pulled back decorations, times `-ψ_h - ψ_h'` for
//! every edge used by both structures.
//!
//! `multiply_by_divisor_fast` handles a degree-one factor by splitting
//! vertices of the other stratum directly; it shares no code with the
//! general route and serves as a cross-check.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, RwLock};

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{cartesian, dimension, graphs_with_edges, StableGraph};
use crate::rational::{q, Q};
use crate::strata::{Decoration, DecoratedStratum, MixedClass, TautClass};

type Poly = HashMap<Decoration, Q>;

/// How the half-edges and vertices of a factor graph sit inside `Γ`.
#[derive(Clone, Debug)]
struct Side {
    /// Factor half-edge to `Γ` half-edge.
    half_edge: Vec<usize>,
    /// Factor vertex to the `Γ` vertices contracted onto it.
    vertices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
struct Structure {
    a: Side,
    b: Side,
    /// Edges of `Γ` used by both structures.
    excess: Vec<usize>,
}

#[derive(Clone, Debug)]
struct GraphProduct {
    graph: StableGraph,
    weight: Q,
    structures: Vec<Structure>,
}

/// Every `factor`-structure on `gamma`: the edge mask kept and the embedding.
fn sides(gamma: &StableGraph, factor: &StableGraph) -> Vec<(u64, Side)> {
    let ne = gamma.num_edges();
    let mut out = Vec::new();
    for mask in 0u64..(1 << ne) {
        if mask.count_ones() as usize != factor.num_edges() {
            continue;
        }
        let keep: Vec<bool> = (0..ne).map(|i| mask >> i & 1 == 1).collect();
        let c = gamma.contract(&keep);
        if c.graph.num_vertices() != factor.num_vertices() {
            continue;
        }
        for iso in c.graph.isomorphisms(factor) {
            let mut half_edge = vec![0; 2 * factor.num_edges()];
            for (h, img) in c.half_edge.iter().enumerate() {
                if let Some(ch) = img {
                    half_edge[iso.half_edge[*ch]] = h;
                }
            }
            let mut vertices = vec![Vec::new(); factor.num_vertices()];
            for (w, &cv) in c.vertex.iter().enumerate() {
                vertices[iso.vertex[cv]].push(w);
            }
            out.push((mask, Side { half_edge, vertices }));
        }
    }
    out
}

fn graph_products(a: &StableGraph, b: &StableGraph) -> Vec<GraphProduct> {
    let (g, n) = (a.genus(), a.num_markings());
    let (ea, eb) = (a.num_edges(), b.num_edges());
    let mut out = Vec::new();
    for e in ea.max(eb)..=ea + eb {
        for gamma in graphs_with_edges(g, n, e) {
            if gamma.h1() < a.h1().max(b.h1()) {
                continue;
            }
            let sa = sides(&gamma, a);
            if sa.is_empty() {
                continue;
            }
            let sb = sides(&gamma, b);
            let full = (1u64 << e) - 1;
            let mut structures = Vec::new();
            for (ma, side_a) in &sa {
                for (mb, side_b) in &sb {
                    if ma | mb != full {
                        continue;
                    }
                    let both = ma & mb;
                    let excess = (0..e).filter(|i| both >> i & 1 == 1).collect();
                    structures.push(Structure { a: side_a.clone(), b: side_b.clone(), excess });
                }
            }
            if !structures.is_empty() {
                let weight = Q::new(1.into(), gamma.automorphism_count().into());
                out.push(GraphProduct { graph: gamma, weight, structures });
            }
        }
    }
    out
}

static GRAPH_PRODUCTS: LazyLock<RwLock<HashMap<(StableGraph, StableGraph), Arc<Vec<GraphProduct>>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

fn cached_graph_products(a: &StableGraph, b: &StableGraph) -> Arc<Vec<GraphProduct>> {
    let key = (a.clone(), b.clone());
    if let Some(hit) = GRAPH_PRODUCTS.read().unwrap().get(&key) {
        return hit.clone();
    }
    let value = Arc::new(graph_products(a, b));
    GRAPH_PRODUCTS.write().unwrap().insert(key, value.clone());
    value
}

fn mul_dec(x: &Decoration, y: &Decoration) -> Decoration {
    let mut kappa = x.kappa.clone();
    for (k, extra) in kappa.iter_mut().zip(&y.kappa) {
        k.extend_from_slice(extra);
        k.sort_unstable();
    }
    Decoration {
        leg_psi: x.leg_psi.iter().zip(&y.leg_psi).map(|(a, b)| a + b).collect(),
        half_edge_psi: x.half_edge_psi.iter().zip(&y.half_edge_psi).map(|(a, b)| a + b).collect(),
        kappa,
    }
}

fn mul_poly(x: &Poly, y: &Poly, graph: &StableGraph) -> Poly {
    let mut out = Poly::new();
    for (dx, cx) in x {
        for (dy, cy) in y {
            let d = mul_dec(dx, dy);
            if !d.fits(graph) {
                continue;
            }
            *out.entry(d).or_insert_with(Q::zero) += cx * cy;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Pullback of a stratum's decoration along a structure: ψ classes follow
/// their half-edges, `κ_a` at a vertex becomes the sum over its preimages.
fn pullback(s: &DecoratedStratum, side: &Side, gamma: &StableGraph) -> Poly {
    let mut base = Decoration::empty(gamma);
    base.leg_psi = s.leg_psi().to_vec();
    let dec = s.decoration();
    for (h, &p) in dec.half_edge_psi.iter().enumerate() {
        base.half_edge_psi[side.half_edge[h]] += p;
    }
    let mut choices: Vec<Vec<(usize, u32)>> = Vec::new();
    for (v, ks) in dec.kappa.iter().enumerate() {
        for &a in ks {
            choices.push(side.vertices[v].iter().map(|&w| (w, a)).collect());
        }
    }
    let mut out = Poly::new();
    for pick in cartesian(&choices) {
        let mut d = base.clone();
        for (w, a) in pick {
            d.kappa[w].push(a);
        }
        for k in d.kappa.iter_mut() {
            k.sort_unstable();
        }
        if d.fits(gamma) {
            *out.entry(d).or_insert_with(Q::zero) += Q::one();
        }
    }
    out
}

fn excess_factor(gamma: &StableGraph, edge: usize) -> Poly {
    let mut out = Poly::new();
    for h in [2 * edge, 2 * edge + 1] {
        let mut d = Decoration::empty(gamma);
        d.half_edge_psi[h] = 1;
        *out.entry(d).or_insert_with(Q::zero) -= Q::one();
    }
    out
}

fn multiply_strata_uncached(sa: &DecoratedStratum, sb: &DecoratedStratum) -> TautClass {
    let (g, n) = (sa.g(), sa.n());
    let degree = sa.codim() + sb.codim();
    let mut out = TautClass::zero(g, n, degree);
    if degree > dimension(g, n) {
        return out;
    }
    for gp in cached_graph_products(sa.graph(), sb.graph()).iter() {
        let mut acc = Poly::new();
        for st in &gp.structures {
            let mut p = mul_poly(&pullback(sa, &st.a, &gp.graph), &pullback(sb, &st.b, &gp.graph), &gp.graph);
            for &e in &st.excess {
                if p.is_empty() {
                    break;
                }
                p = mul_poly(&p, &excess_factor(&gp.graph, e), &gp.graph);
            }
            for (d, c) in p {
                *acc.entry(d).or_insert_with(Q::zero) += c;
            }
        }
        for (d, c) in acc {
            if c.is_zero() {
                continue;
            }
            if let Some(s) = DecoratedStratum::from_labeled(&gp.graph, &d) {
                out.add_term(s, c * &gp.weight);
            }
        }
    }
    out
}

static STRATUM_PRODUCTS: LazyLock<RwLock<HashMap<(DecoratedStratum, DecoratedStratum), Arc<TautClass>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// `[sa] · [sb]`, memoized per ordered pair.
pub fn multiply_strata(sa: &DecoratedStratum, sb: &DecoratedStratum) -> Result<Arc<TautClass>> {
    if (sa.g(), sa.n()) != (sb.g(), sb.n()) {
        return Err(Error::Mismatch(format!(
            "strata on M_{{{},{}}} and M_{{{},{}}}",
            sa.g(),
            sa.n(),
            sb.g(),
            sb.n()
        )));
    }
    let key = (sa.clone(), sb.clone());
    if let Some(hit) = STRATUM_PRODUCTS.read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let value = Arc::new(multiply_strata_uncached(sa, sb));
    STRATUM_PRODUCTS.write().unwrap().insert(key, value.clone());
    Ok(value)
}

pub fn product_cache_clear() {
    STRATUM_PRODUCTS.write().unwrap().clear();
    GRAPH_PRODUCTS.write().unwrap().clear();
}

/// Product of two classes on the same `M_{g,n}`. The result has degree
/// `deg x + deg y` and is zero beyond the dimension.
pub fn multiply(x: &TautClass, y: &TautClass) -> Result<TautClass> {
    if (x.g(), x.n()) != (y.g(), y.n()) {
        return Err(Error::Mismatch("factors live on different moduli spaces".into()));
    }
    let degree = x.degree() + y.degree();
    let mut out = TautClass::zero(x.g(), x.n(), degree);
    if degree > dimension(x.g(), x.n()) || x.is_zero() || y.is_zero() {
        return Ok(out);
    }
    let pairs: Vec<(&DecoratedStratum, &Q, &DecoratedStratum, &Q)> = x
        .terms()
        .iter()
        .flat_map(|(sa, ca)| y.terms().iter().map(move |(sb, cb)| (sa, ca, sb, cb)))
        .collect();
    let parts: Vec<(Q, Arc<TautClass>)> = pairs
        .par_iter()
        .map(|&(sa, ca, sb, cb)| Ok((ca * cb, multiply_strata(sa, sb)?)))
        .collect::<Result<_>>()?;
    for (c, p) in parts {
        out.add_scaled(&c, &p)?;
    }
    Ok(out)
}

/// Product of mixed-degree classes, truncated at the dimension.
pub fn mixed_multiply(x: &MixedClass, y: &MixedClass) -> Result<MixedClass> {
    if (x.g(), x.n()) != (y.g(), y.n()) {
        return Err(Error::Mismatch("factors live on different moduli spaces".into()));
    }
    let (g, n) = (x.g(), x.n());
    let mut out = MixedClass::zero(g, n);
    for a in x.parts().iter().filter(|p| !p.is_zero()) {
        for b in y.parts().iter().filter(|p| !p.is_zero()) {
            if a.degree() + b.degree() > dimension(g, n) {
                continue;
            }
            out = out.plus(&MixedClass::from_parts(g, n, vec![multiply(a, b)?])?)?;
        }
    }
    Ok(out)
}

/// A degree-one generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divisor {
    Psi(u32),
    Kappa1,
    /// Class of an undecorated one-edge graph.
    Boundary(StableGraph),
}

impl Divisor {
    pub fn from_stratum(s: &DecoratedStratum) -> Result<Self> {
        if s.codim() != 1 {
            return Err(Error::Unsupported(format!("{s} is not a divisor")));
        }
        if s.graph().num_edges() == 1 {
            return Ok(Divisor::Boundary(s.graph().clone()));
        }
        if s.kappa_at(0) == [1] {
            return Ok(Divisor::Kappa1);
        }
        let i = s.leg_psi().iter().position(|&p| p == 1).expect("codimension one");
        Ok(Divisor::Psi(i as u32 + 1))
    }

    pub fn to_stratum(&self, g: u32, n: u32) -> Result<DecoratedStratum> {
        match self {
            Divisor::Psi(i) => DecoratedStratum::psi(g, n, *i),
            Divisor::Kappa1 => DecoratedStratum::kappa(g, n, &[1]),
            Divisor::Boundary(graph) => {
                if graph.num_edges() != 1 || (graph.genus(), graph.num_markings()) != (g, n) {
                    return Err(Error::InvalidGraph(format!("{graph} is not a boundary divisor of M_{{{g},{n}}}")));
                }
                Ok(DecoratedStratum::undecorated(graph))
            }
        }
    }
}

/// A labeled graph given by edges carrying their two ψ exponents.
struct Labeled {
    genera: Vec<u32>,
    legs: Vec<Vec<u32>>,
    edges: Vec<(usize, usize, u32, u32)>,
    leg_psi: Vec<u32>,
    kappa: Vec<Vec<u32>>,
}

impl Labeled {
    fn from_stratum(s: &DecoratedStratum) -> Self {
        let graph = s.graph();
        let nv = graph.num_vertices();
        Labeled {
            genera: graph.genera().to_vec(),
            legs: (0..nv).map(|v| graph.vertex_legs(v).to_vec()).collect(),
            edges: graph.edges().iter().zip(s.edge_psi()).map(|(&(u, v), &(a, b))| (u, v, a, b)).collect(),
            leg_psi: s.leg_psi().to_vec(),
            kappa: (0..nv).map(|v| s.kappa_at(v).to_vec()).collect(),
        }
    }

    /// Builds the graph, reports the new index of edge `marked`, and
    /// canonicalizes the decorated stratum.
    fn finish(mut self, marked: usize) -> Result<(StableGraph, usize, Option<DecoratedStratum>)> {
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        for e in self.edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0, e.3, e.2);
            }
        }
        order.sort_by_key(|&i| (self.edges[i].0, self.edges[i].1));
        let edges: Vec<_> = order.iter().map(|&i| self.edges[i]).collect();
        let graph = StableGraph::new(self.genera, self.legs, edges.iter().map(|e| (e.0, e.1)).collect())?;
        let mut dec = Decoration::empty(&graph);
        dec.leg_psi = self.leg_psi;
        dec.kappa = self.kappa;
        for (i, e) in edges.iter().enumerate() {
            dec.half_edge_psi[2 * i] = e.2;
            dec.half_edge_psi[2 * i + 1] = e.3;
        }
        let new_marked = order.iter().position(|&i| i == marked).expect("marked edge present");
        let s = DecoratedStratum::from_labeled(&graph, &dec);
        Ok((graph, new_marked, s))
    }
}

/// Number of isomorphisms from `graph` with every edge but `edge`
/// contracted onto the one-edge graph `target`.
fn divisor_matches(graph: &StableGraph, edge: usize, target: &StableGraph) -> usize {
    let keep: Vec<bool> = (0..graph.num_edges()).map(|i| i == edge).collect();
    graph.contract(&keep).graph.isomorphisms(target).len()
}

/// Every way of distributing the κ factors of `kappa` onto two vertices.
fn split_kappa(kappa: &[u32]) -> Vec<(Vec<u32>, Vec<u32>)> {
    let m = kappa.len();
    (0u64..(1 << m))
        .map(|mask| {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, &a) in kappa.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    r.push(a);
                } else {
                    l.push(a);
                }
            }
            (l, r)
        })
        .collect()
}

fn boundary_times_stratum(s: &DecoratedStratum, target: &StableGraph, out: &mut TautClass, coeff: &Q) -> Result<()> {
    let graph = s.graph();
    let nv = graph.num_vertices();

    // Existing edges: excess intersection.
    for f in 0..graph.num_edges() {
        let count = divisor_matches(graph, f, target);
        if count == 0 {
            continue;
        }
        for side in [0, 1] {
            let mut dec = s.decoration();
            dec.half_edge_psi[2 * f + side] += 1;
            if let Some(t) = DecoratedStratum::from_labeled(graph, &dec) {
                out.add_term(t, -coeff * q(count as i64));
            }
        }
    }

    // New loop at a vertex of positive genus. The loop flip is both an
    // automorphism and a second isomorphism onto the target.
    for v in 0..nv {
        if graph.vertex_genus(v) == 0 {
            continue;
        }
        let mut lab = Labeled::from_stratum(s);
        lab.genera[v] -= 1;
        lab.edges.push((v, v, 0, 0));
        let marked = lab.edges.len() - 1;
        let (g2, f, t) = lab.finish(marked)?;
        let count = divisor_matches(&g2, f, target);
        if let (Some(t), true) = (t, count > 0) {
            out.add_term(t, coeff * Q::new((count as i64).into(), 2.into()));
        }
    }

    // Splitting a vertex in two, joined by the new edge.
    for v in 0..nv {
        let legs = graph.vertex_legs(v).to_vec();
        let hes = graph.half_edges_at(v);
        let items = legs.len() + hes.len();
        let gv = graph.vertex_genus(v);
        for mask in 0u64..(1 << items) {
            // Unordered: the first item stays on the original vertex.
            if items > 0 && mask & 1 == 1 {
                continue;
            }
            let size2 = mask.count_ones();
            let size1 = items as u32 - size2;
            for g1 in 0..=gv {
                let g2 = gv - g1;
                if items == 0 && g1 > g2 {
                    continue;
                }
                if 2 * g1 + size1 + 1 < 3 || 2 * g2 + size2 + 1 < 3 {
                    continue;
                }
                let stab = if items == 0 && g1 == g2 { 2 } else { 1 };
                for (k1, k2) in split_kappa(s.kappa_at(v)) {
                    let mut lab = Labeled::from_stratum(s);
                    let w = lab.genera.len();
                    lab.genera[v] = g1;
                    lab.genera.push(g2);
                    lab.kappa[v] = k1;
                    lab.kappa.push(k2);
                    let mut stay = Vec::new();
                    let mut moved = Vec::new();
                    for (i, &l) in legs.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            moved.push(l);
                        } else {
                            stay.push(l);
                        }
                    }
                    lab.legs[v] = stay;
                    lab.legs.push(moved);
                    for (j, &h) in hes.iter().enumerate() {
                        if mask >> (legs.len() + j) & 1 == 1 {
                            let e = &mut lab.edges[h / 2];
                            if h % 2 == 0 {
                                e.0 = w;
                            } else {
                                e.1 = w;
                            }
                        }
                    }
                    lab.edges.push((v, w, 0, 0));
                    let marked = lab.edges.len() - 1;
                    let (g2raph, f, t) = lab.finish(marked)?;
                    let count = divisor_matches(&g2raph, f, target);
                    if let (Some(t), true) = (t, count > 0) {
                        out.add_term(t, coeff * Q::new((count as i64).into(), stab.into()));
                    }
                }
            }
        }
    }
    Ok(())
}

/// `x · D` for a divisor `D`, computed without the general product.
pub fn multiply_by_divisor_fast(x: &TautClass, d: &Divisor) -> Result<TautClass> {
    let (g, n) = (x.g(), x.n());
    d.to_stratum(g, n)?;
    let mut out = TautClass::zero(g, n, x.degree() + 1);
    if x.degree() + 1 > dimension(g, n) {
        return Ok(out);
    }
    for (s, c) in x.terms() {
        match d {
            Divisor::Psi(i) => {
                let mut dec = s.decoration();
                dec.leg_psi[*i as usize - 1] += 1;
                if let Some(t) = DecoratedStratum::from_labeled(s.graph(), &dec) {
                    out.add_term(t, c.clone());
                }
            }
            Divisor::Kappa1 => {
                for v in 0..s.graph().num_vertices() {
                    let mut dec = s.decoration();
                    dec.kappa[v].push(1);
                    dec.kappa[v].sort_unstable();
                    if let Some(t) = DecoratedStratum::from_labeled(s.graph(), &dec) {
                        out.add_term(t, c.clone());
                    }
                }
            }
            Divisor::Boundary(target) => boundary_times_stratum(s, target, &mut out, c)?,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::evaluate;
    use crate::strata::generators;

    fn boundary(genera: Vec<u32>, legs: Vec<Vec<u32>>, edges: Vec<(usize, usize)>) -> TautClass {
        TautClass::from_stratum(DecoratedStratum::undecorated(&StableGraph::new(genera, legs, edges).unwrap()))
    }

    #[test]
    fn disjoint_boundary_divisors_meet_in_caterpillar() {
        let d12 = boundary(vec![0, 0], vec![vec![1, 2], vec![3, 4, 5]], vec![(0, 1)]);
        let d45 = boundary(vec![0, 0], vec![vec![1, 2, 3], vec![4, 5]], vec![(0, 1)]);
        let p = multiply(&d12, &d45).unwrap();
        let cat = boundary(vec![0, 0, 0], vec![vec![1, 2], vec![3], vec![4, 5]], vec![(0, 1), (1, 2)]);
        assert_eq!(p, cat);
        assert_eq!(evaluate(&p).unwrap(), q(1));
    }

    #[test]
    fn self_intersection_of_boundary_divisor() {
        let d12 = boundary(vec![0, 0], vec![vec![1, 2], vec![3, 4, 5]], vec![(0, 1)]);
        let sq = multiply(&d12, &d12).unwrap();
        assert!(sq.terms().keys().all(|s| s.graph().num_edges() == 1));
        assert_eq!(evaluate(&sq).unwrap(), q(-1));
    }

    #[test]
    fn kappa_times_fundamental() {
        let k = TautClass::from_stratum(DecoratedStratum::kappa(0, 5, &[1]).unwrap());
        let one = TautClass::fundamental(0, 5).unwrap();
        assert_eq!(multiply(&one, &k).unwrap(), k);
        assert_eq!(evaluate(&multiply(&k, &k).unwrap()).unwrap(), q(5));
    }

    #[test]
    fn loop_squared_on_m12_integrates_to_zero() {
        let lp = boundary(vec![0], vec![vec![1, 2]], vec![(0, 0)]);
        let sq = multiply(&lp, &lp).unwrap();
        assert_eq!(evaluate(&sq).unwrap(), q(0));
        let banana = StableGraph::new(vec![0, 0], vec![vec![1], vec![2]], vec![(0, 1), (0, 1)]).unwrap();
        assert_eq!(sq.coefficient(&DecoratedStratum::undecorated(&banana)), q(4));
    }

    #[test]
    fn fast_path_matches_general_product() {
        for (g, n) in [(0, 5), (1, 2), (1, 3)] {
            let gens = generators(g, n, 1).unwrap();
            for a in gens.iter() {
                for b in gens.iter() {
                    let x = TautClass::from_stratum(a.clone());
                    let general = multiply(&x, &TautClass::from_stratum(b.clone())).unwrap();
                    let fast = multiply_by_divisor_fast(&x, &Divisor::from_stratum(b).unwrap()).unwrap();
                    assert_eq!(general, fast, "{a} * {b} on M_{{{g},{n}}}");
                }
            }
        }
    }

    #[test]
    fn products_commute_on_degree_one() {
        let gens = generators(1, 3, 1).unwrap();
        for a in gens.iter() {
            for b in gens.iter() {
                assert_eq!(multiply_strata(a, b).unwrap(), multiply_strata(b, a).unwrap());
            }
        }
    }

    #[test]
    fn associativity_on_m06() {
        let gens = generators(0, 6, 1).unwrap();
        for a in gens.iter().take(4) {
            for b in gens.iter().skip(3).take(4) {
                let (x, y) = (TautClass::from_stratum(a.clone()), TautClass::from_stratum(b.clone()));
                let xy = multiply(&x, &y).unwrap();
                for c in gens.iter().step_by(3) {
                    let z = TautClass::from_stratum(c.clone());
                    let left = evaluate(&multiply(&xy, &z).unwrap()).unwrap();
                    let right = evaluate(&multiply(&x, &multiply(&y, &z).unwrap()).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }
}
