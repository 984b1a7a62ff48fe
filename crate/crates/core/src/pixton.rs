//! Pixton's classes `P_g^{d,k}(A)` from weightings mod `r`, together with
//! Hain's divisor, the quadratic form `Q(A)`, the loop factor `Δ` and the
//! exponential of mixed-degree classes.
//!
//! The mixed class is
//!
//! ```text
//! Σ_{Γ, w} r^{-h¹(Γ)} / |Aut Γ| · ξ_Γ*[ Π_v exp(-k² κ₁(v)) Π_i exp(A_i² ψ_i)
//!     Π_{e = (h, h')} (1 - exp(-w(h) w(h') (ψ_h + ψ_h'))) / (ψ_h + ψ_h') ]
//! ```
//!
//! taking the constant term in `r`. A weighting assigns residues in
//! `0..r` to half-edges: `A_i` on leg `i`, opposite residues on the two
//! halves of an edge, and total `k(2g(v) - 2 + n(v))` around each vertex.

use std::collections::HashMap;
use std::sync::{LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::{dimension, graphs_with_edges, is_stable_type, StableGraph, UnionFind};
use crate::product::mixed_multiply;
use crate::rational::{binomial, factorial, q, Q};
use crate::strata::{compositions, DecoratedStratum, Decoration, MixedClass, TautClass};

/// Ramification data `(g, n, k, A)` with `Σ A_i = k(2g - 2 + n)`; the
/// zero/pole orders are `a_i = A_i - k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RamificationData {
    g: u32,
    n: u32,
    k: i64,
    big_a: Vec<i64>,
}

impl RamificationData {
    #[allow(non_snake_case)]
    pub fn from_A(g: u32, n: u32, k: i64, A: Vec<i64>) -> Result<Self> {
        if !is_stable_type(g, n) {
            return Err(Error::Unstable { g, n });
        }
        if A.len() != n as usize {
            return Err(Error::Ramification(format!("expected {n} entries, got {}", A.len())));
        }
        let target = k * (2 * g as i64 - 2 + n as i64);
        let sum: i64 = A.iter().sum();
        if sum != target {
            return Err(Error::Ramification(format!("entries of A sum to {sum}, expected k(2g-2+n) = {target}")));
        }
        Ok(RamificationData { g, n, k, big_a: A })
    }

    pub fn from_a(g: u32, n: u32, k: i64, a: Vec<i64>) -> Result<Self> {
        if a.len() != n as usize {
            return Err(Error::Ramification(format!("expected {n} entries, got {}", a.len())));
        }
        let target = k * (2 * g as i64 - 2);
        let sum: i64 = a.iter().sum();
        if sum != target {
            return Err(Error::Ramification(format!("entries of a sum to {sum}, expected k(2g-2) = {target}")));
        }
        RamificationData::from_A(g, n, k, a.iter().map(|x| x + k).collect())
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    #[allow(non_snake_case)]
    pub fn A(&self) -> &[i64] {
        &self.big_a
    }

    pub fn a(&self) -> Vec<i64> {
        self.big_a.iter().map(|x| x - self.k).collect()
    }

    /// Data for `(a + b, k_a + k_b)`.
    pub fn sum(&self, other: &RamificationData) -> Result<Self> {
        if (self.g, self.n) != (other.g, other.n) {
            return Err(Error::Mismatch("ramification data of different types".into()));
        }
        let big_a = self.big_a.iter().zip(&other.big_a).map(|(x, y)| x + y).collect();
        RamificationData::from_A(self.g, self.n, self.k + other.k, big_a)
    }

    /// Moduli above this are safely in the polynomial range.
    pub fn residue_threshold(&self) -> i64 {
        let s: i64 = self.big_a.iter().map(|x| x.abs()).sum();
        2 * (s + self.k.abs() * (2 * self.g as i64 - 2 + self.n as i64)) + 3
    }

    /// Required residue of the edge half-edges around each vertex.
    pub fn vertex_demands(&self, graph: &StableGraph) -> Vec<i64> {
        (0..graph.num_vertices())
            .map(|v| {
                let nv = graph.valence(v) as i64;
                let legs: i64 = graph.vertex_legs(v).iter().map(|&l| self.big_a[l as usize - 1]).sum();
                self.k * (2 * graph.vertex_genus(v) as i64 - 2 + nv) - legs
            })
            .collect()
    }
}

/// Parametrization of the admissible weightings of a graph: the residue on
/// the first half of edge `e` is `(constant[e] + Σ_j coefficient[e][j] f_j) mod r`
/// for free variables `f_j ∈ 0..r`, one per edge outside a spanning tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightingSystem {
    pub constant: Vec<i64>,
    pub coefficient: Vec<Vec<i64>>,
    pub free_edges: Vec<usize>,
}

impl WeightingSystem {
    pub fn new(graph: &StableGraph, demands: &[i64]) -> Self {
        let nv = graph.num_vertices();
        let ne = graph.num_edges();
        let mut uf = UnionFind::new(nv);
        let mut in_tree = vec![false; ne];
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if u != v && uf.find(u) != uf.find(v) {
                uf.union(u, v);
                in_tree[e] = true;
            }
        }
        let free_edges: Vec<usize> = (0..ne).filter(|&e| !in_tree[e]).collect();
        let h = free_edges.len();
        let mut constant = vec![0i64; ne];
        let mut coefficient = vec![vec![0i64; h]; ne];
        for (j, &e) in free_edges.iter().enumerate() {
            coefficient[e][j] = 1;
        }

        // Root the tree at vertex 0 and solve from the leaves up.
        let mut parent_edge = vec![usize::MAX; nv];
        let mut order = vec![0usize];
        let mut seen = vec![false; nv];
        seen[0] = true;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for (e, &(a, b)) in graph.edges().iter().enumerate() {
                if !in_tree[e] || (a != v && b != v) {
                    continue;
                }
                let w = if a == v { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e;
                    order.push(w);
                }
            }
        }
        for &v in order.iter().skip(1).rev() {
            let p = parent_edge[v];
            // Σ_{e: first end v} u_e - Σ_{e: second end v} u_e ≡ demand(v)
            let mut c = demands[v];
            let mut coef = vec![0i64; h];
            for (e, &(a, b)) in graph.edges().iter().enumerate() {
                if e == p || a == b {
                    continue;
                }
                let sign = if a == v { 1 } else if b == v { -1 } else { continue };
                c -= sign * constant[e];
                for j in 0..h {
                    coef[j] -= sign * coefficient[e][j];
                }
            }
            let sign = if graph.edges()[p].0 == v { 1 } else { -1 };
            constant[p] = sign * c;
            coefficient[p] = coef.iter().map(|x| sign * x).collect();
        }
        WeightingSystem { constant, coefficient, free_edges }
    }

    pub fn h1(&self) -> usize {
        self.free_edges.len()
    }

    /// Residue on the first half of every edge for given free values.
    pub fn residues(&self, free: &[i64], r: i64) -> Vec<i64> {
        self.constant
            .iter()
            .zip(&self.coefficient)
            .map(|(c, coef)| (c + coef.iter().zip(free).map(|(a, f)| a * f).sum::<i64>()).rem_euclid(r))
            .collect()
    }
}

static BERNOULLI: LazyLock<RwLock<Vec<Q>>> = LazyLock::new(|| RwLock::new(vec![Q::one()]));

/// Bernoulli numbers with `B_1 = -1/2`.
fn bernoulli(k: usize) -> Q {
    if let Some(b) = BERNOULLI.read().unwrap().get(k) {
        return b.clone();
    }
    let mut table = BERNOULLI.write().unwrap();
    while table.len() <= k {
        let m = table.len() as u32;
        let mut s = Q::zero();
        for (j, b) in table.iter().enumerate() {
            s += Q::from_integer(binomial(m + 1, j as u32)) * b;
        }
        table.push(-s / Q::from_integer(BigInt::from(m + 1)));
    }
    table[k].clone()
}

/// `Σ_{f=0}^{N-1} f^k` by Faulhaber's formula.
pub fn power_sum(k: u32, n: i64) -> BigInt {
    let nn = Q::from_integer(BigInt::from(n));
    let mut s = Q::zero();
    let mut pow = Q::one();
    let mut powers = vec![Q::one()];
    for _ in 0..=k {
        pow *= &nn;
        powers.push(pow.clone());
    }
    for j in 0..=k {
        s += Q::from_integer(binomial(k + 1, j)) * bernoulli(j as usize) * &powers[(k + 1 - j) as usize];
    }
    let s = s / Q::from_integer(BigInt::from(k + 1));
    debug_assert!(s.is_integer());
    s.to_integer()
}

fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Σ_w Π_e (u_e (r - u_e))^{m_e + 1}` over all admissible weightings; the
/// innermost free variable is summed in closed form per residue chamber.
fn raw_weighting_sum(system: &WeightingSystem, powers: &[u32], r: i64) -> BigInt {
    let h = system.h1();
    let ne = powers.len();
    if h == 0 {
        let u = system.residues(&[], r);
        return (0..ne).map(|e| BigInt::from(u[e] * (r - u[e])).pow(powers[e] + 1)).product();
    }
    let mut total = BigInt::zero();
    let mut outer = vec![0i64; h - 1];
    loop {
        let mut free = outer.clone();
        free.push(0);
        let base = system.residues(&free, r);
        let slope: Vec<i64> = (0..ne).map(|e| system.coefficient[e][h - 1]).collect();
        let mut cuts = vec![0, r];
        for e in 0..ne {
            match slope[e] {
                1 if base[e] > 0 => cuts.push(r - base[e]),
                -1 if base[e] + 1 < r => cuts.push(base[e] + 1),
                _ => {}
            }
        }
        cuts.sort_unstable();
        cuts.dedup();
        for win in cuts.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let mut poly = vec![BigInt::one()];
            for e in 0..ne {
                let s = slope[e];
                let alpha = (base[e] + s * lo).rem_euclid(r) - s * lo;
                // (α + s f)(r - α - s f)
                let quad = vec![
                    BigInt::from(alpha * (r - alpha)),
                    BigInt::from(s * (r - 2 * alpha)),
                    BigInt::from(-s * s),
                ];
                for _ in 0..=powers[e] {
                    poly = poly_mul(&poly, &quad);
                }
            }
            for (k, c) in poly.iter().enumerate() {
                if !c.is_zero() {
                    total += c * (power_sum(k as u32, hi) - power_sum(k as u32, lo));
                }
            }
        }
        // advance the outer odometer
        let mut i = 0;
        loop {
            if i == outer.len() {
                return total;
            }
            outer[i] += 1;
            if outer[i] < r {
                break;
            }
            outer[i] = 0;
            i += 1;
        }
    }
}

fn edge_prefactor(powers: &[u32]) -> Q {
    powers
        .iter()
        .map(|&m| {
            let sign = if m % 2 == 0 { 1 } else { -1 };
            Q::new(BigInt::from(sign), factorial(m + 1))
        })
        .product()
}

/// `r^{-h¹} Σ_w Π_e [(ψ_h + ψ_h')^{m_e}] (1 - exp(-w(h)w(h')(ψ_h + ψ_h')))/(ψ_h + ψ_h')`,
/// the coefficient of `Π_e (ψ_h + ψ_h')^{m_e}`.
pub fn weighting_sum(graph: &StableGraph, data: &RamificationData, powers: &[u32], r: i64) -> Result<Q> {
    if powers.len() != graph.num_edges() {
        return Err(Error::Mismatch("one ψ power per edge expected".into()));
    }
    let bound = data.residue_threshold();
    if r <= bound {
        return Err(Error::ModulusTooSmall { r, bound });
    }
    let system = WeightingSystem::new(graph, &data.vertex_demands(graph));
    let raw = raw_weighting_sum(&system, powers, r);
    let scale = BigInt::from(r).pow(system.h1() as u32);
    Ok(Q::new(raw, scale) * edge_prefactor(powers))
}

/// A polynomial in `r` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RPolynomial {
    pub coefficients: Vec<Q>,
}

impl RPolynomial {
    /// Newton interpolation through the given points.
    pub fn interpolate(samples: &[(i64, Q)]) -> Self {
        let xs: Vec<Q> = samples.iter().map(|(x, _)| q(*x)).collect();
        let mut dd: Vec<Q> = samples.iter().map(|(_, y)| y.clone()).collect();
        let m = samples.len();
        for level in 1..m {
            for i in (level..m).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        // Expand Σ dd[i] Π_{j<i} (r - x_j) by Horner from the top.
        let mut coeffs: Vec<Q> = vec![Q::zero(); m.max(1)];
        for i in (0..m).rev() {
            // coeffs = coeffs * (r - x_i) + dd[i]
            let mut next = vec![Q::zero(); m.max(1)];
            for (d, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if d + 1 < next.len() {
                    next[d + 1] += c;
                }
                next[d] -= c * &xs[i];
            }
            next[0] += &dd[i];
            coeffs = next;
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RPolynomial { coefficients: coeffs }
    }

    pub fn eval(&self, r: i64) -> Q {
        let x = q(r);
        self.coefficients.iter().rev().fold(Q::zero(), |acc, c| acc * &x + c)
    }

    pub fn constant_term(&self) -> Q {
        self.coefficients.first().cloned().unwrap_or_else(Q::zero)
    }
}

/// Interpolates the first `degree_bound + 1` samples and returns the
/// constant term; every further sample must lie on the interpolant.
pub fn interpolate_constant_term(samples: &[(i64, Q)], degree_bound: usize) -> Result<Q> {
    if samples.len() < degree_bound + 1 {
        return Err(Error::Threshold(format!(
            "{} samples cannot pin a polynomial of degree {degree_bound}",
            samples.len()
        )));
    }
    let poly = RPolynomial::interpolate(&samples[..degree_bound + 1]);
    for (r, y) in &samples[degree_bound + 1..] {
        let got = poly.eval(*r);
        if &got != y {
            return Err(Error::Threshold(format!("sample at r = {r} is {y}, interpolant gives {got}")));
        }
    }
    Ok(poly.constant_term())
}

/// Extra samples beyond the degree bound, used as a consistency check.
pub const SURPLUS_SAMPLES: usize = 2;

/// Constant term in `r` of `weighting_sum`, sampling `r` at consecutive
/// integers starting `offset + 1` above the threshold.
pub fn edge_constant_term(graph: &StableGraph, data: &RamificationData, powers: &[u32], offset: i64) -> Result<Q> {
    let bound: usize = powers.iter().map(|&m| 2 * (m as usize + 1)).sum::<usize>() + graph.h1() as usize + 2;
    let r0 = data.residue_threshold();
    let samples = (0..bound + 1 + SURPLUS_SAMPLES)
        .map(|i| {
            let r = r0 + offset + 1 + i as i64;
            weighting_sum(graph, data, powers, r).map(|v| (r, v))
        })
        .collect::<Result<Vec<_>>>()?;
    interpolate_constant_term(&samples, bound)
}

fn pow_i(base: i64, e: u32) -> Q {
    Q::from_integer(BigInt::from(base).pow(e))
}

fn graph_terms(graph: &StableGraph, data: &RamificationData, d: u32, offset: i64) -> Result<Vec<(DecoratedStratum, Q)>> {
    let e = graph.num_edges() as u32;
    let nv = graph.num_vertices();
    let n = data.n() as usize;
    let aut = Q::new(BigInt::one(), BigInt::from(graph.automorphism_count()));
    let k2 = data.k() * data.k();
    let mut acc: HashMap<Decoration, Q> = HashMap::new();
    for edge_total in 0..=d - e {
        for powers in compositions(edge_total, e as usize) {
            // skip edge powers that cannot fit at their endpoints
            if graph.edges().iter().enumerate().any(|(i, &(u, v))| {
                let cap = if u == v { graph.vertex_dim(u) } else { graph.vertex_dim(u) + graph.vertex_dim(v) };
                powers[i] > cap
            }) {
                continue;
            }
            let edge_coeff = edge_constant_term(graph, data, &powers, offset)?;
            if edge_coeff.is_zero() {
                continue;
            }
            let rest = d - e - edge_total;
            // split each (ψ_h + ψ_h')^m
            let splits: Vec<Vec<(u32, u32, Q)>> = powers
                .iter()
                .map(|&m| (0..=m).map(|i| (i, m - i, Q::from_integer(binomial(m, i)))).collect())
                .collect();
            for split in crate::graphs::cartesian(&splits) {
                for leg_total in 0..=rest {
                    let kappa_total = rest - leg_total;
                    for leg in compositions(leg_total, n) {
                        let leg_coeff: Q = leg
                            .iter()
                            .enumerate()
                            .map(|(i, &p)| pow_i(data.A()[i], 2 * p) / Q::from_integer(factorial(p)))
                            .product();
                        if leg_coeff.is_zero() {
                            continue;
                        }
                        for kap in compositions(kappa_total, nv) {
                            let kap_coeff: Q = kap
                                .iter()
                                .map(|&j| pow_i(-k2, j) / Q::from_integer(factorial(j)))
                                .product();
                            if kap_coeff.is_zero() {
                                continue;
                            }
                            let mut dec = Decoration::empty(graph);
                            dec.leg_psi = leg.clone();
                            let mut c = &edge_coeff * &leg_coeff * &kap_coeff;
                            for (i, (a, b, bin)) in split.iter().enumerate() {
                                dec.half_edge_psi[2 * i] = *a;
                                dec.half_edge_psi[2 * i + 1] = *b;
                                c *= bin;
                            }
                            for (v, &j) in kap.iter().enumerate() {
                                dec.kappa[v] = vec![1; j as usize];
                            }
                            if !dec.fits(graph) {
                                continue;
                            }
                            *acc.entry(dec).or_insert_with(Q::zero) += c;
                        }
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for (dec, c) in acc {
        if c.is_zero() {
            continue;
        }
        if let Some(s) = DecoratedStratum::from_labeled(graph, &dec) {
            out.push((s, c * &aut));
        }
    }
    Ok(out)
}

/// `P_g^{d,k}(A)` with `r` sampled starting `offset + 1` above the threshold.
pub fn pixton_class_window(data: &RamificationData, d: u32, offset: i64) -> Result<TautClass> {
    let (g, n) = (data.g(), data.n());
    let dim = dimension(g, n);
    if d > dim {
        return Err(Error::DegreeOutOfRange { g, n, degree: d, dim });
    }
    let graphs: Vec<StableGraph> = (0..=d as usize).flat_map(|e| graphs_with_edges(g, n, e)).collect();
    let parts: Vec<Vec<(DecoratedStratum, Q)>> =
        graphs.par_iter().map(|graph| graph_terms(graph, data, d, offset)).collect::<Result<_>>()?;
    let mut out = TautClass::zero(g, n, d);
    for (s, c) in parts.into_iter().flatten() {
        out.add_term(s, c);
    }
    Ok(out)
}

pub fn pixton_class(data: &RamificationData, d: u32) -> Result<TautClass> {
    pixton_class_window(data, d, 0)
}

/// All degrees of `P_g^{•,k}(A)`.
pub fn pixton_mixed(data: &RamificationData) -> Result<MixedClass> {
    let dim = dimension(data.g(), data.n());
    let parts = (0..=dim).map(|d| pixton_class(data, d)).collect::<Result<Vec<_>>>()?;
    MixedClass::from_parts(data.g(), data.n(), parts)
}

/// Separating boundary divisors, each once, with vertex 0 as the `(g', P)` side.
fn separating_divisors(g: u32, n: u32) -> Vec<StableGraph> {
    graphs_with_edges(g, n, 1).into_iter().filter(|gr| gr.is_tree()).collect()
}

/// `x = a_P - (2g' - 1) k` for the side at `vertex` of a separating divisor.
pub fn separating_weight(graph: &StableGraph, vertex: usize, data: &RamificationData) -> i64 {
    let a = data.a();
    let a_p: i64 = graph.vertex_legs(vertex).iter().map(|&l| a[l as usize - 1]).sum();
    a_p - (2 * graph.vertex_genus(vertex) as i64 - 1) * data.k()
}

/// Hain's divisor
/// `-(k²/2) κ₁ + ½ Σ_j (a_j + k)² ψ_j - ½ Σ (a_P - (2g' - 1)k)² δ_{g'}^P`,
/// where `δ` is the locus class `[Γ] / |Aut Γ|`.
pub fn hain_divisor(data: &RamificationData) -> Result<TautClass> {
    let (g, n) = (data.g(), data.n());
    let half = Q::new(BigInt::one(), BigInt::from(2));
    let k = data.k();
    let mut out = TautClass::zero(g, n, 1);
    if dimension(g, n) == 0 {
        return Ok(out);
    }
    out.add_term(DecoratedStratum::kappa(g, n, &[1])?, -q(k * k) * &half);
    let a = data.a();
    for j in 0..n {
        out.add_term(DecoratedStratum::psi(g, n, j + 1)?, q((a[j as usize] + k).pow(2)) * &half);
    }
    for graph in separating_divisors(g, n) {
        let x = separating_weight(&graph, 0, data);
        let aut = q(graph.automorphism_count() as i64);
        out.add_term(DecoratedStratum::undecorated(&graph), -q(x * x) * &half / aut);
    }
    Ok(out)
}

/// `Q(A)`: twice Hain's divisor, a class supported on trees.
pub fn q_form(data: &RamificationData) -> Result<TautClass> {
    Ok(hain_divisor(data)?.scaled(&q(2)))
}

/// Single-vertex terms of a mixed class with no κ and no leg ψ.
pub fn irreducible_part(x: &MixedClass) -> MixedClass {
    x.filter(|s| {
        s.graph().num_vertices() == 1 && s.kappa_at(0).is_empty() && s.leg_psi().iter().all(|&p| p == 0)
    })
}

/// `Δ` up to `max_degree`: the single-vertex, loop-only part of Pixton's
/// class, which does not depend on `(A, k)`.
pub fn delta_factor(g: u32, n: u32, max_degree: u32) -> Result<MixedClass> {
    let data = RamificationData::from_A(g, n, 0, vec![0; n as usize])?;
    let dim = dimension(g, n);
    let top = max_degree.min(dim);
    let parts = (0..=top).map(|d| pixton_class(&data, d)).collect::<Result<Vec<_>>>()?;
    Ok(irreducible_part(&MixedClass::from_parts(g, n, parts)?))
}

/// `exp(x)` truncated at the dimension. A degree-0 part must vanish or be
/// the fundamental class, which is then ignored.
pub fn exp_class(x: &MixedClass) -> Result<MixedClass> {
    let (g, n) = (x.g(), x.n());
    let zero_part = x.part(0);
    if !zero_part.is_zero() && *zero_part != TautClass::fundamental(g, n)? {
        return Err(Error::Unsupported("exp of a class whose degree-0 part is not 0 or 1".into()));
    }
    let positive = x.filter(|s| s.codim() > 0);
    let mut out = MixedClass::one(g, n)?;
    let mut power = MixedClass::one(g, n)?;
    for j in 1..=dimension(g, n) {
        power = mixed_multiply(&power, &positive)?;
        if power.parts().iter().all(|p| p.is_zero()) {
            break;
        }
        out = out.plus(&power.scaled(&Q::new(BigInt::one(), factorial(j))))?;
    }
    Ok(out)
}
