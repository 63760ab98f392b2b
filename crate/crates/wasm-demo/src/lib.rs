//! Browser demo bindings: a small JSON-in/JSON-out facade over the core
//! library, exported through `wasm-bindgen` for the static page in `www/`.
//!
//! Three operations are exposed, each sized for interactive use over small
//! primes:
//!
//! - [`conic_points`] — classify one conic and enumerate its points,
//! - [`grid_incidences`] — seeded grid-versus-circles incidence experiment
//!   with bound ratios,
//! - [`pinned_values`] — the best-pin distance-value count for a random
//!   planar set.
//!
//! Every exported function returns a JSON string (the page parses it) and
//! reports failures as thrown strings. The `*_impl` functions carry the
//! actual logic and are exercised by native tests; the exported wrappers only
//! convert errors to `JsValue`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fpconics::apps::{pinned_distance_best_with, DistancePolynomial};
use fpconics::bounds::{self, BoundId, BoundParams};
use fpconics::curves::{Circle, Conic, ConicKind};
use fpconics::field::PrimeField;
use fpconics::harness::random_point_set;
use fpconics::incidence::{incidence_counts_per_curve, incidence_histogram, CurveFamily, PointSet};
use fpconics::proj::AffinePoint;

/// Largest prime the browser demo accepts. Point enumeration is linear in p
/// per curve, but the page draws a p × p grid, so keep p small enough that a
/// canvas cell is still visible.
const MAX_PRIME: u64 = 499;

fn field_for(p: u64) -> Result<PrimeField, String> {
    if p > MAX_PRIME {
        return Err(format!(
            "the demo draws the full p × p grid; pick a prime at most {MAX_PRIME} (got {p})"
        ));
    }
    PrimeField::new(p).map_err(|e| e.to_string())
}

fn point_pair(pt: &AffinePoint) -> Value {
    json!([pt.x().value(), pt.y().value()])
}

fn kind_label(kind: ConicKind) -> &'static str {
    match kind {
        ConicKind::Ellipse => "ellipse",
        ConicKind::Parabola => "parabola",
        ConicKind::Hyperbola => "hyperbola",
        ConicKind::Degenerate => "degenerate",
    }
}

// ---- conic classification ------------------------------------------------

fn conic_points_impl(p: u64, coeffs: [u64; 6]) -> Result<Value, String> {
    let f = field_for(p)?;
    let [a, b, c, d, e, ff] = coeffs.map(|v| f.elem(v));
    let conic = Conic::new(a, b, c, d, e, ff).map_err(|e| e.to_string())?;
    let class = conic.classify();
    let affine: Vec<Value> = conic.enumerate_affine().iter().map(point_pair).collect();
    let infinity: Vec<String> = conic
        .points_at_infinity()
        .iter()
        .map(|q| format!("{q:?}"))
        .collect();
    let projective = affine.len() + infinity.len();
    Ok(json!({
        "p": p,
        "coeffs": conic.coeffs().map(|v| v.value()),
        "kind": kind_label(class.kind),
        "rank": class.rank,
        "nondegenerate": conic.is_nondegenerate(),
        "affine": affine,
        "infinity": infinity,
        "projectivePoints": projective,
        "expected": if conic.is_nondegenerate() { json!(p + 1) } else { Value::Null },
    }))
}

/// Classify the conic aX² + bXY + cY² + dX + eY + f over F_p and list its
/// affine points and points at infinity. Throws a string on invalid input.
#[wasm_bindgen]
pub fn conic_points(p: u64, a: u64, b: u64, c: u64, d: u64, e: u64, f: u64) -> Result<String, JsValue> {
    conic_points_impl(p, [a, b, c, d, e, f])
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}

// ---- grid incidence experiment -------------------------------------------

fn sample_circles(
    f: PrimeField,
    count: usize,
    seed: u64,
) -> Result<Vec<Circle>, String> {
    let p = f.p();
    let population = (p as u128) * (p as u128) * ((p - 1) as u128);
    if count as u128 > population {
        return Err(format!(
            "only {population} distinct circles exist over F_{p}; asked for {count}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: BTreeSet<(u64, u64, u64)> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let cx = rng.random_range(0..p);
        let cy = rng.random_range(0..p);
        let r = rng.random_range(1..p);
        if seen.insert((cx, cy, r)) {
            let center = AffinePoint::xy(f, cx, cy);
            out.push(Circle::new(center, f.elem(r)).map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

fn bound_report(id: BoundId, params: &BoundParams, measured: u64) -> Result<Value, String> {
    let value = bounds::evaluate(id, params).map_err(|e| e.to_string())?;
    let (applicable, violations) =
        bounds::applicability(id, params).map_err(|e| e.to_string())?;
    let total = value.total_f64();
    let ratio = if applicable && total > 0.0 {
        json!(measured as f64 / total)
    } else {
        Value::Null
    };
    Ok(json!({
        "name": id.name(),
        "value": total,
        "applicable": applicable,
        "violations": violations,
        "ratio": ratio,
    }))
}

fn grid_incidences_impl(
    p: u64,
    size_a: u64,
    size_b: u64,
    circles: u64,
    seed: u64,
) -> Result<Value, String> {
    let f = field_for(p)?;
    if size_a == 0 || size_b == 0 {
        return Err("both grid side lengths must be positive".into());
    }
    if size_a > p || size_b > p {
        return Err(format!("grid sides must be at most p = {p}"));
    }
    if circles == 0 || circles > 2_000 {
        return Err("pick between 1 and 2000 circles".into());
    }
    let coords: Vec<(u64, u64)> = (0..size_a)
        .flat_map(|x| (0..size_b).map(move |y| (x, y)))
        .collect();
    let points = PointSet::from_xy(f, &coords);
    let family =
        CurveFamily::circles(f, sample_circles(f, circles as usize, seed)?).map_err(|e| e.to_string())?;
    let profile = incidence_histogram(&points, &family).map_err(|e| e.to_string())?;
    let counts = incidence_counts_per_curve(&points, &family).map_err(|e| e.to_string())?;

    let circle_rows: Vec<Value> = family
        .as_circles()
        .expect("family was built from circles")
        .iter()
        .zip(&counts)
        .map(|(c, n)| {
            json!({
                "center": point_pair(c.center()),
                "r": c.r().value(),
                "count": n,
                "points": c.points().iter().map(point_pair).collect::<Vec<_>>(),
            })
        })
        .collect();

    let params = BoundParams::new()
        .size_p(points.len() as u128)
        .size_c(family.len() as u128)
        .size_a(size_a as u128)
        .size_b(size_b as u128)
        .p(p as u128)
        .q(p as u128)
        .d(2);
    let reports = vec![
        bound_report(BoundId::CircParSmall, &params, profile.total)?,
        bound_report(BoundId::TrivialCircParKst, &params, profile.total)?,
    ];

    Ok(json!({
        "p": p,
        "sizeP": points.len(),
        "sizeC": family.len(),
        "incidences": profile.total,
        "maxRichness": profile.max_richness(),
        "histogram": profile.compact(),
        "points": points.points().iter().map(point_pair).collect::<Vec<_>>(),
        "circles": circle_rows,
        "bounds": reports,
    }))
}

/// Run one seeded incidence experiment: an `size_a` × `size_b` coordinate
/// grid against `circles` distinct random circles over F_p. Returns measured
/// incidences, the richness histogram, per-circle point lists for drawing,
/// and measured/bound ratios for the grid and general point–circle bounds.
#[wasm_bindgen]
pub fn grid_incidences(
    p: u64,
    size_a: u64,
    size_b: u64,
    circles: u64,
    seed: u64,
) -> Result<String, JsValue> {
    grid_incidences_impl(p, size_a, size_b, circles, seed)
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}

// ---- pinned distance values ----------------------------------------------

fn polynomial_for(name: &str) -> Result<(DistancePolynomial, &'static str), String> {
    match name {
        "sum-squares" => Ok((DistancePolynomial::SumSquares, "x^2+y^2")),
        "product" => Ok((DistancePolynomial::Product, "xy")),
        "parabola-dist" => Ok((DistancePolynomial::ParabolaDist, "y+x^2")),
        other => Err(format!(
            "unknown distance polynomial '{other}'; expected sum-squares, product, or parabola-dist"
        )),
    }
}

fn pinned_values_impl(
    p: u64,
    count: u64,
    seed: u64,
    poly: &str,
    override_congruence: bool,
) -> Result<Value, String> {
    let _ = field_for(p)?;
    if !(2..=2_000).contains(&count) {
        return Err("pick between 2 and 2000 points".into());
    }
    let (poly, label) = polynomial_for(poly)?;
    let e = random_point_set(p, 2, count as usize, seed, 0).map_err(|e| e.to_string())?;
    let result =
        pinned_distance_best_with(&e, &poly, override_congruence).map_err(|e| e.to_string())?;
    Ok(json!({
        "p": p,
        "sizeE": e.len(),
        "poly": label,
        "pin": point_pair(&result.pin),
        "valueCount": result.values.len(),
        "ratio": result.ratio,
        "violations": result.violations,
        "values": result.values.iter().map(|v| v.value()).collect::<Vec<_>>(),
        "points": e.points().iter().map(point_pair).collect::<Vec<_>>(),
    }))
}

/// Sample `count` distinct random points of F_p² from `seed`, then report the
/// pin maximizing the number of distinct distance-polynomial values it sees,
/// together with the measured-over-bound ratio. `poly` is one of
/// `"sum-squares"`, `"product"`, `"parabola-dist"`. Set `override_congruence`
/// to evaluate even when p ≢ 3 (mod 4), outside the congruence class the
/// matching lower bound is stated for.
#[wasm_bindgen]
pub fn pinned_values(
    p: u64,
    count: u64,
    seed: u64,
    poly: &str,
    override_congruence: bool,
) -> Result<String, JsValue> {
    pinned_values_impl(p, count, seed, poly, override_congruence)
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e))
}
