//! Intersection numbers: ψ integrals by the Dijkgraaf–Verlinde–Verlinde
//! recursion, κ-to-ψ conversion, evaluation of top-degree classes and the
//! intersection pairing between complementary degrees.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graphs::{dimension, is_stable_type};
use crate::linalg;
use crate::product::multiply;
use crate::rational::{frac, Q};
use crate::strata::{generators, DecoratedStratum, TautClass};

/// A monomial `τ_{d_1} ⋯ τ_{d_n}` in genus `g`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PsiMonomial {
    pub g: u32,
    pub exponents: Vec<u32>,
}

static WK: LazyLock<RwLock<HashMap<(u32, Vec<u32>), Q>>> = LazyLock::new(|| RwLock::new(HashMap::new()));

fn double_factorial(n: i64) -> BigInt {
    let mut out = BigInt::one();
    let mut k = n;
    while k > 1 {
        out *= BigInt::from(k);
        k -= 2;
    }
    out
}

/// `⟨τ_{d_1} ⋯ τ_{d_n}⟩_g`, zero on unstable input or degree mismatch.
fn wk(g: u32, mut d: Vec<u32>) -> Q {
    let n = d.len() as u32;
    if !is_stable_type(g, n) || d.iter().sum::<u32>() != dimension(g, n) {
        return Q::zero();
    }
    if (g, n) == (0, 3) {
        return Q::one();
    }
    if (g, n) == (1, 1) {
        return frac(1, 24);
    }
    d.sort_unstable();
    if let Some(hit) = WK.read().unwrap().get(&(g, d.clone())) {
        return hit.clone();
    }

    // Peel off the largest exponent as τ_{k+1}.
    let top = d.pop().expect("nonempty");
    let k = top as i64 - 1;
    let rest = d.clone();
    let mut sum = Q::zero();

    for j in 0..rest.len() {
        let dj = rest[j] as i64;
        let weight = double_factorial(2 * k + 2 * dj + 1) / double_factorial(2 * dj - 1);
        let mut next = rest.clone();
        next[j] = (dj + k) as u32;
        sum += Q::from_integer(weight) * wk(g, next);
    }
    if k >= 1 {
        let half = frac(1, 2);
        for a in 0..k {
            let b = k - 1 - a;
            let weight = Q::from_integer(double_factorial(2 * a + 1) * double_factorial(2 * b + 1)) * &half;
            if g >= 1 {
                let mut next = rest.clone();
                next.push(a as u32);
                next.push(b as u32);
                sum += &weight * wk(g - 1, next);
            }
            for g1 in 0..=g {
                for mask in 0u64..(1 << rest.len()) {
                    let mut left = vec![a as u32];
                    let mut right = vec![b as u32];
                    for (i, &x) in rest.iter().enumerate() {
                        if mask >> i & 1 == 1 {
                            left.push(x);
                        } else {
                            right.push(x);
                        }
                    }
                    let l = wk(g1, left);
                    if l.is_zero() {
                        continue;
                    }
                    sum += &weight * l * wk(g - g1, right);
                }
            }
        }
    }
    let value = sum / Q::from_integer(double_factorial(2 * k + 3));
    d.push(top);
    d.sort_unstable();
    WK.write().unwrap().insert((g, d), value.clone());
    value
}

/// Witten–Kontsevich intersection number of a ψ monomial.
pub fn psi_integral(m: &PsiMonomial) -> Result<Q> {
    let n = m.exponents.len() as u32;
    if !is_stable_type(m.g, n) {
        return Err(Error::Unstable { g: m.g, n });
    }
    Ok(wk(m.g, m.exponents.clone()))
}

pub fn wk_cache_entries() -> Vec<(u32, Vec<u32>, Q)> {
    let mut out: Vec<_> = WK.read().unwrap().iter().map(|((g, d), v)| (*g, d.clone(), v.clone())).collect();
    out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    out
}

pub fn wk_cache_install(entries: impl IntoIterator<Item = (u32, Vec<u32>, Q)>) {
    let mut cache = WK.write().unwrap();
    for (g, mut d, v) in entries {
        d.sort_unstable();
        cache.entry((g, d)).or_insert(v);
    }
}

pub fn wk_cache_len() -> usize {
    WK.read().unwrap().len()
}

pub fn wk_cache_clear() {
    WK.write().unwrap().clear();
}

/// Set partitions of `0..m`, as lists of blocks.
fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(i: usize, m: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == m {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(i);
            rec(i + 1, m, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![i]);
        rec(i + 1, m, blocks, out);
        blocks.pop();
    }
    rec(0, m, &mut Vec::new(), &mut out);
    out
}

static KAPPA_PSI: LazyLock<RwLock<HashMap<(u32, Vec<u32>, Vec<u32>), Q>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// `∫ κ_{b_1} ⋯ κ_{b_m} ψ_1^{d_1} ⋯ ψ_n^{d_n}` over `M_{g,n}`, with
/// `κ_b = π_*(ψ_{n+1}^{b+1})`. Uses
/// `κ_{b_1} ⋯ κ_{b_m} = Σ_P (-1)^{m-|P|} π_*(Π_{B ∈ P} ψ^{b_B + 1})`
/// over set partitions `P` of the κ factors, `b_B` the sum over a block.
pub fn kappa_psi_integral(g: u32, kappa: &[u32], psi: &[u32]) -> Result<Q> {
    let n = psi.len() as u32;
    if !is_stable_type(g, n) {
        return Err(Error::Unstable { g, n });
    }
    if kappa.iter().sum::<u32>() + psi.iter().sum::<u32>() != dimension(g, n) {
        return Ok(Q::zero());
    }
    if kappa.is_empty() {
        return Ok(wk(g, psi.to_vec()));
    }
    let mut kk = kappa.to_vec();
    kk.sort_unstable();
    let mut pp = psi.to_vec();
    pp.sort_unstable();
    let key = (g, kk.clone(), pp.clone());
    if let Some(hit) = KAPPA_PSI.read().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let m = kk.len();
    let mut total = Q::zero();
    for partition in set_partitions(m) {
        let mut exps = pp.clone();
        for block in &partition {
            exps.push(block.iter().map(|&i| kk[i]).sum::<u32>() + 1);
        }
        let term = wk(g, exps);
        if (m - partition.len()) % 2 == 0 {
            total += term;
        } else {
            total -= term;
        }
    }
    KAPPA_PSI.write().unwrap().insert(key, total.clone());
    Ok(total)
}

/// Integral of one decorated stratum of top degree: the product of its vertex
/// integrals (the gluing pushforward preserves degree).
pub fn evaluate_stratum(s: &DecoratedStratum) -> Q {
    let graph = s.graph();
    let mut out = Q::one();
    for v in 0..graph.num_vertices() {
        let value = kappa_psi_integral(graph.vertex_genus(v), s.kappa_at(v), &s.vertex_psi(v))
            .expect("vertices of stable graphs are stable");
        if value.is_zero() {
            return value;
        }
        out *= value;
    }
    out
}

/// Degree of a class of top codimension `3g - 3 + n`.
pub fn evaluate(x: &TautClass) -> Result<Q> {
    let dim = dimension(x.g(), x.n());
    if x.degree() != dim {
        return Err(Error::DegreeOutOfRange { g: x.g(), n: x.n(), degree: x.degree(), dim });
    }
    Ok(x.terms().iter().map(|(s, c)| c * evaluate_stratum(s)).sum())
}

/// Intersection pairing between generators of degree `d` and of the
/// complementary degree.
#[derive(Clone, Debug)]
pub struct PairingMatrix {
    pub g: u32,
    pub n: u32,
    pub degree: u32,
    pub rows: Arc<Vec<DecoratedStratum>>,
    pub columns: Arc<Vec<DecoratedStratum>>,
    pub entries: Vec<Vec<Q>>,
    pub rank: usize,
    /// Pivot columns of an echelon form of `entries`.
    pub pivots: Vec<usize>,
    row_index: HashMap<DecoratedStratum, usize>,
}

impl PairingMatrix {
    pub fn row_of(&self, s: &DecoratedStratum) -> Option<usize> {
        self.row_index.get(s).copied()
    }

    /// Pairings of a degree-`d` class against every column generator.
    pub fn pairing_vector(&self, x: &TautClass) -> Result<Vec<Q>> {
        if (x.g(), x.n(), x.degree()) != (self.g, self.n, self.degree) {
            return Err(Error::Mismatch("class and pairing matrix differ in (g, n, degree)".into()));
        }
        let mut out = vec![Q::zero(); self.columns.len()];
        for (s, c) in x.terms() {
            let row = self
                .row_of(s)
                .ok_or_else(|| Error::Mismatch(format!("stratum {s} is not a generator")))?;
            for (o, e) in out.iter_mut().zip(&self.entries[row]) {
                if !e.is_zero() {
                    *o += c * e;
                }
            }
        }
        Ok(out)
    }
}

static PAIRINGS: LazyLock<Mutex<HashMap<(u32, u32, u32), Arc<PairingMatrix>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn build_pairing(g: u32, n: u32, d: u32) -> Result<PairingMatrix> {
    let dim = dimension(g, n);
    let rows = generators(g, n, d)?;
    let columns = generators(g, n, dim - d)?;
    let entries: Vec<Vec<Q>> = rows
        .par_iter()
        .map(|r| {
            let rc = TautClass::from_stratum(r.clone());
            columns
                .iter()
                .map(|c| {
                    let prod = multiply(&rc, &TautClass::from_stratum(c.clone()))?;
                    evaluate(&prod)
                })
                .collect::<Result<Vec<Q>>>()
        })
        .collect::<Result<_>>()?;
    let echelon = linalg::echelon(&entries);
    let row_index = rows.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(PairingMatrix { g, n, degree: d, rank: echelon.pivots.len(), pivots: echelon.pivots, rows, columns, entries, row_index })
}

/// Pairing matrix of `generators(g, n, d)` against the complementary degree;
/// cached per `(g, n, d)`.
pub fn pairing_matrix(g: u32, n: u32, d: u32) -> Result<Arc<PairingMatrix>> {
    if !is_stable_type(g, n) {
        return Err(Error::Unstable { g, n });
    }
    let dim = dimension(g, n);
    if d > dim {
        return Err(Error::DegreeOutOfRange { g, n, degree: d, dim });
    }
    if let Some(hit) = PAIRINGS.lock().unwrap().get(&(g, n, d)) {
        return Ok(hit.clone());
    }
    let m = Arc::new(build_pairing(g, n, d)?);
    PAIRINGS.lock().unwrap().insert((g, n, d), m.clone());
    Ok(m)
}

/// Pairings of a class of any degree against the generators of the
/// complementary degree. Classes beyond the dimension pair to nothing.
pub fn pairing_vector(x: &TautClass) -> Result<Vec<Q>> {
    let dim = dimension(x.g(), x.n());
    if x.degree() > dim {
        return Ok(vec![]);
    }
    pairing_matrix(x.g(), x.n(), x.degree())?.pairing_vector(x)
}
