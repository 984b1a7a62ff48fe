//! Locus restriction, equality and span membership modulo the pairing, and
//! the named verification bundles.
//!
//! Equality verdicts are only ever "equal modulo the kernel of the pairing
//! with complementary-degree generators"; inequality and independence
//! verdicts come with explicit witnesses and are absolute.

use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphs::{dimension, LocusKind, StableGraph};
use crate::integrate::{pairing_matrix, pairing_vector};
use crate::linalg::{self, Solution};
use crate::pixton::{delta_factor, exp_class, irreducible_part, pixton_class, pixton_mixed, q_form, RamificationData};
use crate::product::{mixed_multiply, multiply};
use crate::rational::{format_q, frac, Q};
use crate::strata::{generators, DecoratedStratum, MixedClass, TautClass};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "pass-mod-pairing-kernel")]
    PassModPairingKernel,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Fail
    }

    /// Conjunction: any failure fails, any kernel caveat is kept.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::PassModPairingKernel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: Value,
    pub verdict: Verdict,
    pub witness: Value,
    pub runtime_ms: u64,
}

impl CheckReport {
    fn new(name: &str, parameters: Value, verdict: Verdict, witness: Value, start: Instant) -> Self {
        CheckReport {
            name: name.to_string(),
            parameters,
            verdict,
            witness,
            runtime_ms: start.elapsed().as_millis() as u64,
        }
    }
}

/// Drops every term whose graph lies outside `locus`.
pub fn restrict(x: &TautClass, locus: LocusKind) -> TautClass {
    x.filter(|s| locus.contains(s.graph()))
}

/// Generators of degree `d` supported on the complement of `locus`.
pub fn off_locus_generators(g: u32, n: u32, d: u32, locus: LocusKind) -> Result<Vec<DecoratedStratum>> {
    Ok(generators(g, n, d)?.iter().filter(|s| !locus.contains(s.graph())).cloned().collect())
}

fn data_json(d: &RamificationData) -> Value {
    json!({"g": d.g(), "n": d.n(), "k": d.k(), "A": d.A(), "a": d.a()})
}

fn first_nonzero(x: &TautClass, v: &[Q]) -> Result<Option<Value>> {
    let Some(i) = v.iter().position(|c| !c.is_zero()) else {
        return Ok(None);
    };
    let m = pairing_matrix(x.g(), x.n(), x.degree())?;
    Ok(Some(json!({"generator": m.columns[i].to_json(), "pairing": format_q(&v[i])})))
}

/// Zero test against every generator of complementary degree.
pub fn is_zero_mod_pairing(x: &TautClass) -> Result<CheckReport> {
    let start = Instant::now();
    let params = json!({"g": x.g(), "n": x.n(), "degree": x.degree(), "terms": x.len()});
    if x.is_zero() {
        return Ok(CheckReport::new("zero-mod-pairing", params, Verdict::Pass, json!({"literally_zero": true}), start));
    }
    if x.degree() > dimension(x.g(), x.n()) {
        return Ok(CheckReport::new("zero-mod-pairing", params, Verdict::Pass, json!({"beyond_dimension": true}), start));
    }
    let v = pairing_vector(x)?;
    Ok(match first_nonzero(x, &v)? {
        None => CheckReport::new("zero-mod-pairing", params, Verdict::PassModPairingKernel, json!({}), start),
        Some(w) => CheckReport::new("zero-mod-pairing", params, Verdict::Fail, w, start),
    })
}

/// Result of a span test: the report and, on success, the coefficients.
#[derive(Clone, Debug)]
pub struct SpanResult {
    pub report: CheckReport,
    pub coefficients: Option<Vec<Q>>,
}

/// Solves `⟨x - Σ λ_s s, c⟩ = 0` for every complementary generator `c`.
/// A failure carries a complementary class `y` with `⟨s, y⟩ = 0` for all
/// `s` and `⟨x, y⟩ ≠ 0`.
pub fn in_span_mod_pairing(x: &TautClass, span: &[DecoratedStratum]) -> Result<SpanResult> {
    let start = Instant::now();
    let (g, n, d) = (x.g(), x.n(), x.degree());
    let params = json!({"g": g, "n": n, "degree": d, "span_size": span.len()});
    for s in span {
        if (s.g(), s.n(), s.codim()) != (g, n, d) {
            return Err(Error::Mismatch(format!("span element {s} is not in degree {d} of M_{{{g},{n}}}")));
        }
    }
    let dim = dimension(g, n);
    if d > dim {
        let lambda = vec![Q::zero(); span.len()];
        let report = CheckReport::new("in-span-mod-pairing", params, Verdict::Pass, json!({"beyond_dimension": true}), start);
        return Ok(SpanResult { report, coefficients: Some(lambda) });
    }
    let m = pairing_matrix(g, n, d)?;
    let target = m.pairing_vector(x)?;
    let columns: Vec<Vec<Q>> =
        span.iter().map(|s| m.pairing_vector(&TautClass::from_stratum(s.clone()))).collect::<Result<_>>()?;
    let rows: Vec<Vec<Q>> = (0..m.columns.len()).map(|c| columns.iter().map(|v| v[c].clone()).collect()).collect();
    match linalg::solve(&rows, &target, span.len()) {
        Solution::Solved(lambda) => {
            let witness = json!({
                "coefficients": span.iter().zip(&lambda).map(|(s, l)| json!({"stratum": s.to_json(), "coeff": format_q(l)})).collect::<Vec<_>>(),
            });
            let report = CheckReport::new("in-span-mod-pairing", params, Verdict::PassModPairingKernel, witness, start);
            Ok(SpanResult { report, coefficients: Some(lambda) })
        }
        Solution::Inconsistent(y) => {
            let value = linalg::dot(&y, &target);
            let test_class: Vec<Value> = y
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| json!({"stratum": m.columns[i].to_json(), "coeff": format_q(c)}))
                .collect();
            let witness = json!({"complementary_class": test_class, "pairing_with_class": format_q(&value)});
            let report = CheckReport::new("in-span-mod-pairing", params, Verdict::Fail, witness, start);
            Ok(SpanResult { report, coefficients: None })
        }
    }
}

/// `2^{-g} P_g^{g,k}(A)`.
pub fn drc(data: &RamificationData) -> Result<TautClass> {
    let g = data.g();
    Ok(pixton_class(data, g)?.scaled(&Q::new(1.into(), num_bigint::BigInt::from(2).pow(g))))
}

/// `D_a · D_b` against `D_a · D_{a+b}`: on the full space a raw equality
/// test, on a smaller locus membership of the difference in the span of
/// generators supported off the locus.
pub fn check_multiplicativity(a: &RamificationData, b: &RamificationData, locus: LocusKind) -> Result<CheckReport> {
    let start = Instant::now();
    let (g, n) = (a.g(), a.n());
    let dim = dimension(g, n);
    if 2 * g > dim {
        return Err(Error::DegreeOutOfRange { g, n, degree: 2 * g, dim });
    }
    let ab = a.sum(b)?;
    let da = drc(a)?;
    let left = multiply(&da, &drc(b)?)?;
    let right = multiply(&da, &drc(&ab)?)?;
    let diff = left.minus(&right)?;
    let params = json!({"a": data_json(a), "b": data_json(b), "locus": format!("{locus:?}").to_lowercase()});
    let (verdict, witness) = if locus == LocusKind::All {
        let r = is_zero_mod_pairing(&diff)?;
        (r.verdict, r.witness)
    } else {
        let span = off_locus_generators(g, n, 2 * g, locus)?;
        let r = in_span_mod_pairing(&diff, &span)?;
        (r.report.verdict, r.report.witness)
    };
    Ok(CheckReport::new("multiplicativity", params, verdict, witness, start))
}

fn degree_part(m: &MixedClass, d: u32) -> TautClass {
    m.part(d).clone()
}

/// `P^{tl} = exp(Q) Δ` modulo non-treelike strata and `exp(P¹) = Σ P^d`
/// modulo non-tree strata, in every degree, plus the degree-one pin
/// `[P¹]_{tree} = Q`.
pub fn check_exp_identities(data: &RamificationData) -> Result<CheckReport> {
    let start = Instant::now();
    let (g, n) = (data.g(), data.n());
    let dim = dimension(g, n);
    let p = pixton_mixed(data)?;
    let q = q_form(data)?;
    let delta = irreducible_part(&p);
    let delta_free = delta_factor(g, n, dim)?;
    let delta_independent = delta == delta_free;

    let mut verdict = if delta_independent { Verdict::Pass } else { Verdict::Fail };
    let pin = restrict(p.part(1.min(dim)), LocusKind::CompactType);
    let pin_ok = dim == 0 || pin == q;
    if !pin_ok {
        verdict = Verdict::Fail;
    }

    let qm = MixedClass::from_parts(g, n, vec![q.clone()])?;
    let tl_side = mixed_multiply(&exp_class(&qm)?, &delta)?;
    let p1 = MixedClass::from_parts(g, n, vec![p.part(1.min(dim)).clone()])?;
    let ct_side = if dim == 0 { MixedClass::one(g, n)? } else { exp_class(&p1)? };

    let mut degrees = Vec::new();
    for d in 0..=dim {
        let x = degree_part(&p, d).minus(&degree_part(&tl_side, d))?;
        let tl = in_span_mod_pairing(&x, &off_locus_generators(g, n, d, LocusKind::Treelike)?)?;
        let y = degree_part(&ct_side, d).minus(&degree_part(&p, d))?;
        let ct = in_span_mod_pairing(&y, &off_locus_generators(g, n, d, LocusKind::CompactType)?)?;
        verdict = verdict.and(tl.report.verdict).and(ct.report.verdict);
        degrees.push(json!({
            "degree": d,
            "treelike": tl.report.verdict,
            "compact_type": ct.report.verdict,
            "treelike_witness": if tl.report.verdict.passed() { Value::Null } else { tl.report.witness },
            "compact_type_witness": if ct.report.verdict.passed() { Value::Null } else { ct.report.witness },
        }));
    }
    let witness = json!({"degree_one_pin": pin_ok, "delta_independent_of_data": delta_independent, "degrees": degrees});
    Ok(CheckReport::new("exp-identities", data_json(data), verdict, witness, start))
}

/// Degree-one tree part of `P` against `Q(A)`, coefficient by coefficient.
pub fn check_hain_pin(data: &RamificationData) -> Result<CheckReport> {
    let start = Instant::now();
    let p1 = restrict(&pixton_class(data, 1)?, LocusKind::CompactType);
    let q = q_form(data)?;
    let diff = p1.minus(&q)?;
    let verdict = if diff.is_zero() { Verdict::Pass } else { Verdict::Fail };
    Ok(CheckReport::new("hain-pin", data_json(data), verdict, json!({"difference": diff.to_json()}), start))
}

/// `P_g^{g+1,k}(A)` vanishes modulo the pairing.
pub fn check_gplus1(data: &RamificationData) -> Result<CheckReport> {
    let start = Instant::now();
    let (g, n) = (data.g(), data.n());
    let dim = dimension(g, n);
    if g + 1 > dim {
        let witness = json!({"beyond_dimension": true});
        return Ok(CheckReport::new("gplus1", data_json(data), Verdict::Pass, witness, start));
    }
    let r = is_zero_mod_pairing(&pixton_class(data, g + 1)?)?;
    Ok(CheckReport::new("gplus1", data_json(data), r.verdict, r.witness, start))
}

/// The divisor of irreducible nodal curves on `M_{g,n}`: the loop graph
/// class divided by its two automorphisms.
pub fn delta_irr(g: u32, n: u32) -> Result<TautClass> {
    if g == 0 {
        return Err(Error::Unsupported("no irreducible boundary divisor in genus 0".into()));
    }
    let graph = StableGraph::new(vec![g - 1], vec![(1..=n).collect()], vec![(0, 0)])?;
    Ok(TautClass::from_stratum(DecoratedStratum::undecorated(&graph)).scaled(&frac(1, 2)))
}

/// The genus-one counterexample: `g = 1, n = 3, k = 0`, `a = (2, 4, -6)`,
/// `b = (-3, -1, 4)`. Five reports: inequality on the full space, support
/// of the difference on the banana strata, nontriviality on the treelike
/// locus, `Δ_irr² = 0`, and independence of `I₁, I₂, I₃`.
pub fn check_genus_one_counterexample() -> Result<Vec<CheckReport>> {
    let (g, n) = (1, 3);
    let a = RamificationData::from_a(g, n, 0, vec![2, 4, -6])?;
    let b = RamificationData::from_a(g, n, 0, vec![-3, -1, 4])?;
    let ab = a.sum(&b)?;
    let params = json!({"a": data_json(&a), "b": data_json(&b)});
    let (da, db, dab) = (drc(&a)?, drc(&b)?, drc(&ab)?);
    let left = multiply(&da, &db)?;
    let right = multiply(&da, &dab)?;
    let mut reports = Vec::new();

    // (i) the two sides differ
    let start = Instant::now();
    let m = pairing_matrix(g, n, 2)?;
    let (vl, vr) = (m.pairing_vector(&left)?, m.pairing_vector(&right)?);
    let differing = (0..vl.len()).find(|&i| vl[i] != vr[i]);
    let (verdict, witness) = match differing {
        Some(i) => (
            Verdict::Pass,
            json!({"generator": m.columns[i].to_json(), "left": format_q(&vl[i]), "right": format_q(&vr[i])}),
        ),
        None => (Verdict::Fail, json!({"note": "pairing vectors agree"})),
    };
    reports.push(CheckReport::new("inequality", params.clone(), verdict, witness, start));

    // (ii) the difference is supported on the three banana components
    let start = Instant::now();
    let diff = left.minus(&right)?;
    let bananas = off_locus_generators(g, n, 2, LocusKind::Treelike)?;
    let span = in_span_mod_pairing(&diff, &bananas)?;
    let verdict = if bananas.len() == 3 { span.report.verdict } else { Verdict::Fail };
    let witness = json!({"components": bananas.len(), "solution": span.report.witness});
    reports.push(CheckReport::new("support", params.clone(), verdict, witness, start));

    // (iii) both sides stay nonzero on the treelike locus
    let start = Instant::now();
    let m1 = pairing_matrix(g, n, 2)?;
    let mut verdict = Verdict::Pass;
    let mut sides = Vec::new();
    for (label, side) in [("left", &left), ("right", &right)] {
        let restricted = restrict(side, LocusKind::Treelike);
        let v = m1.pairing_vector(&restricted)?;
        let hit = (0..v.len()).find(|&i| !v[i].is_zero() && LocusKind::Treelike.contains(m1.columns[i].graph()));
        let off_span = in_span_mod_pairing(side, &bananas)?;
        if hit.is_none() {
            verdict = Verdict::Fail;
        }
        sides.push(json!({
            "side": label,
            "treelike_witness": hit.map(|i| json!({"generator": m1.columns[i].to_json(), "pairing": format_q(&v[i])})),
            "outside_banana_span": !off_span.report.verdict.passed(),
        }));
    }
    reports.push(CheckReport::new("nontriviality", params.clone(), verdict, json!({"sides": sides}), start));

    // (iv) Δ_irr² = 0
    let start = Instant::now();
    let di = delta_irr(g, n)?;
    let sq = is_zero_mod_pairing(&multiply(&di, &di)?)?;
    reports.push(CheckReport::new("delta-irr-square", params.clone(), sq.verdict, sq.witness, start));

    // (v) I₁, I₂, I₃ are independent
    let start = Instant::now();
    let db_minus = db.minus(&dab)?;
    let i1 = multiply(&da, &db_minus)?;
    let i2 = multiply(&da, &di)?;
    let i3 = multiply(&di, &db_minus)?;
    let vectors = [&i1, &i2, &i3].iter().map(|x| m.pairing_vector(x)).collect::<Result<Vec<_>>>()?;
    let ech = linalg::echelon(&vectors);
    let verdict = if ech.pivots.len() == 3 { Verdict::Pass } else { Verdict::Fail };
    let pivots: Vec<Value> = ech.pivots.iter().map(|&c| m.columns[c].to_json()).map(|s| json!(s)).collect();
    let witness = json!({"rank": ech.pivots.len(), "pivot_generators": pivots});
    reports.push(CheckReport::new("independence", params, verdict, witness, start));

    Ok(reports)
}
