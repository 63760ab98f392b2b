//! Distance-set, polynomial-image, and conic-counting applications.
//!
//! Each operation computes its value set *exactly* over the field (no
//! sampling, no approximation) and pairs it with the matching catalog
//! lower bound, so callers can report measured/bound ratios. Tie-breaking
//! is always lexicographic for reproducibility.

use crate::bounds::{self, BoundId, BoundParams, BoundValue};
use crate::curves::Conic;
use crate::field::Fp;
use crate::incidence::PointSet;
use crate::proj::{collinear_affine, AffinePoint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AppError {
    #[error("the point set {0} must be nonempty")]
    EmptySet(&'static str),
    #[error("expected points of dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("point sets live in different fields")]
    FieldMismatch,
    #[error("the first set must lie on the plane z = 0")]
    NotPlanar,
    #[error(
        "p = {p} is 1 mod 4; the pinned lower bound is stated for p = 3 mod 4 — \
         pass the explicit override to evaluate anyway"
    )]
    CongruenceGate { p: u64 },
    #[error("polynomial arity {expected} does not match input dimension {got}")]
    Arity { expected: usize, got: usize },
}

/// A polynomial distance function applied to coordinate differences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DistancePolynomial {
    /// x² + y², the usual planar quadrance.
    SumSquares,
    /// xy.
    Product,
    /// y + x².
    ParabolaDist,
    /// Σᵢ vᵢ² in any dimension.
    QuadranceD,
    Custom(CustomPolynomial),
}

/// Sparse polynomial in `arity` variables with signed integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CustomPolynomial {
    monomials: Vec<(i64, Vec<u32>)>,
    arity: usize,
    degree: u32,
}

impl CustomPolynomial {
    pub fn new(arity: usize, monomials: Vec<(i64, Vec<u32>)>) -> Result<CustomPolynomial, AppError> {
        let mut degree = 0;
        for (_, exps) in &monomials {
            if exps.len() != arity {
                return Err(AppError::Arity {
                    expected: arity,
                    got: exps.len(),
                });
            }
            degree = degree.max(exps.iter().sum());
        }
        Ok(CustomPolynomial {
            monomials,
            arity,
            degree,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Total degree, fixed at construction.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn eval(&self, v: &[Fp]) -> Fp {
        let field = v[0].field();
        let mut acc = field.zero();
        for (coeff, exps) in &self.monomials {
            let mut term = field.elem_i64(*coeff);
            for (value, &e) in v.iter().zip(exps) {
                term *= value.pow(e as u64);
            }
            acc += term;
        }
        acc
    }
}

impl DistancePolynomial {
    /// Required input dimension; `None` means any dimension works.
    pub fn arity(&self) -> Option<usize> {
        match self {
            DistancePolynomial::SumSquares
            | DistancePolynomial::Product
            | DistancePolynomial::ParabolaDist => Some(2),
            DistancePolynomial::QuadranceD => None,
            DistancePolynomial::Custom(c) => Some(c.arity()),
        }
    }

    /// Evaluate on a coordinate vector (typically a difference of points).
    pub fn value(&self, v: &[Fp]) -> Result<Fp, AppError> {
        if let Some(arity) = self.arity() {
            if v.len() != arity {
                return Err(AppError::Arity {
                    expected: arity,
                    got: v.len(),
                });
            }
        }
        if v.is_empty() {
            return Err(AppError::Arity {
                expected: 1,
                got: 0,
            });
        }
        Ok(match self {
            DistancePolynomial::SumSquares => v[0] * v[0] + v[1] * v[1],
            DistancePolynomial::Product => v[0] * v[1],
            DistancePolynomial::ParabolaDist => v[1] + v[0] * v[0],
            DistancePolynomial::QuadranceD => {
                let mut acc = v[0] * v[0];
                for c in &v[1..] {
                    acc += *c * *c;
                }
                acc
            }
            DistancePolynomial::Custom(c) => c.eval(v),
        })
    }
}

/// Best pin and its value set for a pinned distance function.
#[derive(Clone, Debug, PartialEq)]
pub struct PinnedResult {
    /// The maximizing pin; lexicographically smallest among maximizers.
    pub pin: AffinePoint,
    /// f(pin − E), exactly.
    pub values: BTreeSet<Fp>,
    /// |values| / |E|^{8/15}, the measured-over-bound ratio.
    pub ratio: f64,
    /// Violated hypotheses of the matching lower bound, if any.
    pub violations: Vec<String>,
}

/// Maximize |f(pin − E)| over pins in E. Requires p ≡ 3 (mod 4), the
/// congruence under which the lower bound is stated; see
/// [`pinned_distance_best_with`] to evaluate in the other congruence class.
pub fn pinned_distance_best(
    e: &PointSet,
    f: &DistancePolynomial,
) -> Result<PinnedResult, AppError> {
    pinned_distance_best_with(e, f, false)
}

/// As [`pinned_distance_best`], with `override_congruence` skipping the
/// p ≡ 3 (mod 4) gate.
pub fn pinned_distance_best_with(
    e: &PointSet,
    f: &DistancePolynomial,
    override_congruence: bool,
) -> Result<PinnedResult, AppError> {
    if e.is_empty() {
        return Err(AppError::EmptySet("E"));
    }
    if e.dim() != 2 {
        return Err(AppError::Dimension {
            expected: 2,
            got: e.dim(),
        });
    }
    let field = e.field();
    if !field.is_three_mod_four() && !override_congruence {
        return Err(AppError::CongruenceGate { p: field.p() });
    }
    let mut best: Option<(AffinePoint, BTreeSet<Fp>)> = None;
    // Points are stored sorted, so the first strict maximum is the
    // lexicographically smallest maximizing pin.
    for pin in e.iter() {
        let mut values = BTreeSet::new();
        for q in e.iter() {
            let diff = pin.sub(q);
            values.insert(f.value(diff.coords())?);
        }
        if best.as_ref().is_none_or(|(_, v)| values.len() > v.len()) {
            best = Some((pin.clone(), values));
        }
    }
    let (pin, values) = best.expect("E is nonempty");
    let params = BoundParams::new()
        .size_p(e.len() as u128)
        .p(field.p() as u128);
    let lower = bounds::evaluate(BoundId::PinnedLower815, &params)
        .expect("sizeP is present")
        .total;
    let ratio = (bounds::rat_u128(values.len() as u128) / lower)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    let (_, violations) =
        bounds::applicability(BoundId::PinnedLower815, &params).expect("sizeP and p are present");
    Ok(PinnedResult {
        pin,
        values,
        ratio,
        violations,
    })
}

/// A caller-supplied level-curve family: for each pin and attained value t,
/// the plane conics covering {x on z = 0 : f(x − pin) = t}.
pub trait PlanarDistanceFamily {
    /// f(x − pin) for a planar x = (x₁, x₂, 0) and a pin in 3-space.
    fn value(&self, x: &AffinePoint, pin: &AffinePoint) -> Fp;
    /// Conics covering the level set; may be empty when t is unattained.
    fn conics_for(&self, pin: &AffinePoint, t: Fp) -> Vec<Conic>;
    /// Caveats to surface in reports.
    fn notes(&self) -> Vec<&'static str> {
        Vec::new()
    }
}

/// f(v) = v₁² + v₂² + v₃²; level sets restricted to the plane are circles.
pub struct QuadranceCircles;

impl PlanarDistanceFamily for QuadranceCircles {
    fn value(&self, x: &AffinePoint, pin: &AffinePoint) -> Fp {
        let c = pin.coords();
        let vx = x.x() - c[0];
        let vy = x.y() - c[1];
        vx * vx + vy * vy + c[2] * c[2]
    }

    fn conics_for(&self, pin: &AffinePoint, t: Fp) -> Vec<Conic> {
        let f = t.field();
        let c = pin.coords();
        let two = f.elem(2);
        // (x−p₁)² + (y−p₂)² = t − p₃², expanded into conic coefficients.
        let constant = c[0] * c[0] + c[1] * c[1] + c[2] * c[2] - t;
        vec![Conic::new(
            f.one(),
            f.zero(),
            f.one(),
            -(two * c[0]),
            -(two * c[1]),
            constant,
        )
        .expect("leading coefficient is 1")]
    }
}

/// f(v) = (v₁v₂)² + v₃². The planar restriction has degree 4, so the level
/// set is covered by a pair of hyperbola translates
/// (x−p₁)(y−p₂) = ±s with s² = t − p₃², not by a single degree-2 curve.
pub struct SquaredProductHyperbolas;

impl PlanarDistanceFamily for SquaredProductHyperbolas {
    fn value(&self, x: &AffinePoint, pin: &AffinePoint) -> Fp {
        let c = pin.coords();
        let prod = (x.x() - c[0]) * (x.y() - c[1]);
        prod * prod + c[2] * c[2]
    }

    fn conics_for(&self, pin: &AffinePoint, t: Fp) -> Vec<Conic> {
        let f = t.field();
        let c = pin.coords();
        let rhs = t - c[2] * c[2];
        let Some(s) = rhs.sqrt() else {
            return Vec::new();
        };
        let roots = if s.is_zero() { vec![s] } else { vec![s, -s] };
        roots
            .into_iter()
            .map(|r| {
                // (x−p₁)(y−p₂) = r ⟺ xy − p₂x − p₁y + (p₁p₂ − r) = 0.
                Conic::new(
                    f.zero(),
                    f.one(),
                    f.zero(),
                    -c[1],
                    -c[0],
                    c[0] * c[1] - r,
                )
                .expect("xy coefficient is 1")
            })
            .collect()
    }

    fn notes(&self) -> Vec<&'static str> {
        vec![
            "planar restriction of (xy)²+z² has degree 4, not 2; level sets are \
             covered by the hyperbola pair (x-p1)(y-p2) = ±sqrt(t-p3²)",
            "when t = p3² the covering curve degenerates to the two axis-parallel lines",
        ]
    }
}

#[derive(Clone, Debug)]
pub struct PlanarDistanceResult {
    /// f(E − F), exactly.
    pub values: BTreeSet<Fp>,
    /// Exact incidence count between E (as planar points) and the union of
    /// the per-pin level-curve families.
    pub incidences: u128,
    /// |E| · |F|.
    pub pairs: u128,
    /// Whether incidences ≥ pairs, the covering property the count relies on.
    pub covered: bool,
    pub notes: Vec<&'static str>,
}

/// Distance values between a planar set E (on z = 0 in 3-space) and an
/// arbitrary set F in 3-space, together with exact incidence accounting for
/// the level-curve family that witnesses them.
pub fn planar_two_set_distances(
    e: &PointSet,
    f_set: &PointSet,
    family: &dyn PlanarDistanceFamily,
) -> Result<PlanarDistanceResult, AppError> {
    if e.dim() != 3 {
        return Err(AppError::Dimension {
            expected: 3,
            got: e.dim(),
        });
    }
    if f_set.dim() != 3 {
        return Err(AppError::Dimension {
            expected: 3,
            got: f_set.dim(),
        });
    }
    if e.field() != f_set.field() {
        return Err(AppError::FieldMismatch);
    }
    if e.iter().any(|pt| !pt.coords()[2].is_zero()) {
        return Err(AppError::NotPlanar);
    }
    let planar: Vec<AffinePoint> = e
        .iter()
        .map(|pt| AffinePoint::new(vec![pt.coords()[0], pt.coords()[1]]))
        .collect();
    let mut values = BTreeSet::new();
    let mut incidences: u128 = 0;
    for pin in f_set.iter() {
        let mut attained = BTreeSet::new();
        for x in &planar {
            attained.insert(family.value(x, pin));
        }
        for &t in &attained {
            for conic in family.conics_for(pin, t) {
                incidences += planar.iter().filter(|x| conic.contains_affine(x)).count() as u128;
            }
        }
        values.extend(attained);
    }
    let pairs = e.len() as u128 * f_set.len() as u128;
    Ok(PlanarDistanceResult {
        values,
        incidences,
        pairs,
        covered: incidences >= pairs,
        notes: family.notes(),
    })
}

#[derive(Clone, Debug)]
pub struct ImageResult {
    /// f(E) = {f(e) : e ∈ E}, exactly.
    pub image: BTreeSet<Fp>,
    /// E + F, exactly.
    pub sumset: PointSet,
    /// E with axis points removed (differs from E only for the product
    /// polynomial, whose image bound prunes the coordinate axes).
    pub pruned_e: PointSet,
    /// The evaluated image lower bound at (|E|, |F|, |E+F|).
    pub bound: BoundValue,
    /// |image| / bound, the measured-over-bound ratio.
    pub ratio: f64,
    /// Violated hypotheses: the sumset-size cap, and for the product
    /// polynomial the axis condition (axes must hold at most |E|/2 points).
    pub violations: Vec<String>,
}

/// Exact polynomial image f(E), sumset E+F, and the matching lower bound.
pub fn polynomial_image_check(
    e: &PointSet,
    f_set: &PointSet,
    poly: &DistancePolynomial,
) -> Result<ImageResult, AppError> {
    if e.is_empty() {
        return Err(AppError::EmptySet("E"));
    }
    if f_set.is_empty() {
        return Err(AppError::EmptySet("F"));
    }
    for s in [e, f_set] {
        if s.dim() != 2 {
            return Err(AppError::Dimension {
                expected: 2,
                got: s.dim(),
            });
        }
    }
    if e.field() != f_set.field() {
        return Err(AppError::FieldMismatch);
    }
    let field = e.field();

    let mut image = BTreeSet::new();
    for pt in e.iter() {
        image.insert(poly.value(pt.coords())?);
    }

    let mut sums = Vec::with_capacity(e.len() * f_set.len());
    for x in e.iter() {
        for y in f_set.iter() {
            sums.push(x.add(y));
        }
    }
    let sumset = PointSet::new(field, 2, sums).expect("sums stay planar");

    let pruned_e = if *poly == DistancePolynomial::Product {
        let kept: Vec<AffinePoint> = e
            .iter()
            .filter(|pt| !pt.x().is_zero() && !pt.y().is_zero())
            .cloned()
            .collect();
        PointSet::new(field, 2, kept).expect("subset of a valid set")
    } else {
        e.clone()
    };

    let params = BoundParams::new()
        .size_p(e.len() as u128)
        .size_c(f_set.len() as u128)
        .size_a(sumset.len() as u128)
        .p(field.p() as u128);
    let bound = bounds::evaluate(BoundId::ImageLower, &params).expect("sizes are present");
    let (_, mut violations) =
        bounds::applicability(BoundId::ImageLower, &params).expect("sizes are present");
    if *poly == DistancePolynomial::Product && 2 * pruned_e.len() < e.len() {
        violations.push("coordinate axes hold more than |E|/2 points of E".to_string());
    }
    let ratio = (bounds::rat_u128(image.len() as u128) / &bound.total)
        .to_f64()
        .unwrap_or(f64::INFINITY);
    Ok(ImageResult {
        image,
        sumset,
        pruned_e,
        bound,
        ratio,
        violations,
    })
}

/// Σᵢ (xᵢ − yᵢ)².
pub fn quadrance(x: &AffinePoint, y: &AffinePoint) -> Fp {
    let d = x.sub(y);
    let mut acc = d.coords()[0] * d.coords()[0];
    for c in &d.coords()[1..] {
        acc += *c * *c;
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceSetResult {
    /// Δ(E, F) = {quadrance(x, y) : x ∈ E, y ∈ F}, exactly.
    pub distances: BTreeSet<Fp>,
    /// The pin in F maximizing |Δ(pin, E)|; lexicographically smallest
    /// among maximizers; None when either set is empty.
    pub best_pin: Option<AffinePoint>,
    /// Δ(best_pin, E).
    pub best_pinned: BTreeSet<Fp>,
}

/// Exact distance set between E and F in d-space, plus the best pinned
/// distance set over pins in F.
pub fn distance_set(
    e: &PointSet,
    f_set: &PointSet,
    d: usize,
) -> Result<DistanceSetResult, AppError> {
    for s in [e, f_set] {
        if s.dim() != d {
            return Err(AppError::Dimension {
                expected: d,
                got: s.dim(),
            });
        }
    }
    if e.field() != f_set.field() {
        return Err(AppError::FieldMismatch);
    }
    let mut distances = BTreeSet::new();
    let mut best: Option<(AffinePoint, BTreeSet<Fp>)> = None;
    for pin in f_set.iter() {
        let mut pinned = BTreeSet::new();
        for x in e.iter() {
            pinned.insert(quadrance(x, pin));
        }
        distances.extend(pinned.iter().copied());
        if best.as_ref().is_none_or(|(_, v)| pinned.len() > v.len()) {
            best = Some((pin.clone(), pinned));
        }
    }
    let (best_pin, best_pinned) = match best {
        Some((pin, set)) => (Some(pin), set),
        None => (None, BTreeSet::new()),
    };
    Ok(DistanceSetResult {
        distances,
        best_pin,
        best_pinned,
    })
}

#[derive(Clone, Debug)]
pub struct BeckReport {
    /// Largest number of collinear points of P.
    pub max_collinear: u64,
    /// Exact number of distinct nondegenerate conics containing at least
    /// five points of P.
    pub conic_count: u64,
    /// Exact number of ordered 5-tuples of distinct points in general
    /// position (no three collinear).
    pub gp_five_tuples: u128,
    /// The |P|^{20/7} lower-bound value for comparison.
    pub lower_bound_value: BigRational,
    pub notes: Vec<&'static str>,
}

/// Count the distinct nondegenerate conics spanned by 5-rich point tuples.
///
/// Every 5-point subset in general position determines a unique conic; a
/// line meets a nondegenerate conic in at most two points, so *every*
/// 5-subset of such a conic's points is in general position and the
/// general-position enumeration misses no 5-rich conic. Practical for
/// |P| up to roughly 40 (hundreds of thousands of subsets).
pub fn beck_conic_count(p_set: &PointSet) -> Result<BeckReport, AppError> {
    if p_set.dim() != 2 {
        return Err(AppError::Dimension {
            expected: 2,
            got: p_set.dim(),
        });
    }
    let pts = p_set.points();
    let n = pts.len();

    let mut max_collinear = if n <= 1 { n as u64 } else { 2 };
    for i in 0..n {
        for j in i + 1..n {
            let mut on_line = 2u64;
            for (k, pt) in pts.iter().enumerate() {
                if k != i && k != j && collinear_affine(&pts[i], &pts[j], pt) {
                    on_line += 1;
                }
            }
            max_collinear = max_collinear.max(on_line);
        }
    }

    // Collinear-triple bitmap (i < j < k) for pruning; falls back to direct
    // evaluation when the cube would be large.
    let bitmap = if n <= 128 {
        let mut bm = vec![false; n * n * n];
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    bm[(i * n + j) * n + k] = collinear_affine(&pts[i], &pts[j], &pts[k]);
                }
            }
        }
        Some(bm)
    } else {
        None
    };
    let tri = |i: usize, j: usize, k: usize| match &bitmap {
        Some(bm) => bm[(i * n + j) * n + k],
        None => collinear_affine(&pts[i], &pts[j], &pts[k]),
    };

    let mut conics: BTreeSet<Conic> = BTreeSet::new();
    let mut gp_subsets: u128 = 0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if tri(i, j, k) {
                    continue;
                }
                for l in k + 1..n {
                    if tri(i, j, l) || tri(i, k, l) || tri(j, k, l) {
                        continue;
                    }
                    for m in l + 1..n {
                        if tri(i, j, m)
                            || tri(i, k, m)
                            || tri(i, l, m)
                            || tri(j, k, m)
                            || tri(j, l, m)
                            || tri(k, l, m)
                        {
                            continue;
                        }
                        gp_subsets += 1;
                        let five = [
                            pts[i].clone(),
                            pts[j].clone(),
                            pts[k].clone(),
                            pts[l].clone(),
                            pts[m].clone(),
                        ];
                        let conic = Conic::through_five(&five)
                            .expect("five distinct planar points")
                            .expect("no three are collinear");
                        if conic.is_nondegenerate() {
                            conics.insert(conic);
                        }
                    }
                }
            }
        }
    }

    let lower_bound_value = bounds::evaluate(
        BoundId::BeckLower207,
        &BoundParams::new().size_p(n as u128),
    )
    .expect("sizeP is present")
    .total;

    let mut notes = Vec::new();
    if n < 5 {
        notes.push("fewer than five points: no conic can contain five of them");
    }
    Ok(BeckReport {
        max_collinear,
        conic_count: conics.len() as u64,
        gp_five_tuples: gp_subsets * 120,
        lower_bound_value,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn fp(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Deterministic test-data generator (same texture as the other modules).
    struct Lcg(u64);

    impl Lcg {
        fn next(&mut self) -> u64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            self.0 >> 33
        }

        fn points(&mut self, f: PrimeField, dim: usize, count: usize) -> PointSet {
            let pts = (0..count)
                .map(|_| {
                    AffinePoint::new((0..dim).map(|_| f.elem(self.next() % f.p())).collect())
                })
                .collect();
            PointSet::new(f, dim, pts).unwrap()
        }
    }

    fn brute_best_pin(e: &PointSet, f: &DistancePolynomial) -> (AffinePoint, usize) {
        let mut best: Option<(AffinePoint, usize)> = None;
        for pin in e.iter() {
            let mut vals = BTreeSet::new();
            for q in e.iter() {
                vals.insert(f.value(pin.sub(q).coords()).unwrap());
            }
            if best.as_ref().is_none_or(|(_, n)| vals.len() > *n) {
                best = Some((pin.clone(), vals.len()));
            }
        }
        best.unwrap()
    }

    #[test]
    fn pinned_single_point() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(0, 0)]);
        let r = pinned_distance_best(&e, &DistancePolynomial::SumSquares).unwrap();
        assert_eq!(r.pin, AffinePoint::xy(f, 0, 0));
        assert_eq!(r.values.len(), 1);
        assert!(r.values.contains(&f.zero()));
        assert!((r.ratio - 1.0).abs() < 1e-12, "1 / 1^{{8/15}} = 1");
    }

    #[test]
    fn pinned_full_plane_over_f5_by_exhaustion() {
        // Over F_5 the squares are {0,1,4}; pairwise sums attain all five
        // residues, so from any pin of the full plane the quadrance set is
        // the whole field: |values| = 5 (exhaustively recounted here).
        let f = fp(5);
        let all: Vec<(u64, u64)> = (0..5).flat_map(|x| (0..5).map(move |y| (x, y))).collect();
        let e = PointSet::from_xy(f, &all);
        // p = 5 ≡ 1 (mod 4): the gate must refuse without the override.
        assert_eq!(
            pinned_distance_best(&e, &DistancePolynomial::SumSquares).unwrap_err(),
            AppError::CongruenceGate { p: 5 }
        );
        let r = pinned_distance_best_with(&e, &DistancePolynomial::SumSquares, true).unwrap();
        assert_eq!(r.values.len(), 5);
        let (brute_pin, brute_n) = brute_best_pin(&e, &DistancePolynomial::SumSquares);
        assert_eq!((r.pin.clone(), r.values.len()), (brute_pin, brute_n));
        assert!(
            !r.violations.is_empty(),
            "25 > 5^{{15/13}} and 5 ≡ 1 (mod 4) must both be flagged"
        );
    }

    #[test]
    fn pinned_matches_brute_force_on_seeded_sets() {
        let f = fp(31); // 31 ≡ 3 (mod 4)
        let mut rng = Lcg(0xfeed5eed);
        for _ in 0..100 {
            let e = rng.points(f, 2, 60);
            for poly in [
                DistancePolynomial::SumSquares,
                DistancePolynomial::Product,
                DistancePolynomial::ParabolaDist,
            ] {
                let r = pinned_distance_best(&e, &poly).unwrap();
                let (bp, bn) = brute_best_pin(&e, &poly);
                assert_eq!(r.pin, bp);
                assert_eq!(r.values.len(), bn);
                // Per-pin invariants: 1 ≤ |f(pin−E)| ≤ |E|.
                assert!(!r.values.is_empty() && r.values.len() <= e.len());
            }
        }
    }

    #[test]
    fn pinned_rejects_empty_set() {
        let f = fp(7);
        let e = PointSet::new(f, 2, vec![]).unwrap();
        assert_eq!(
            pinned_distance_best(&e, &DistancePolynomial::SumSquares).unwrap_err(),
            AppError::EmptySet("E")
        );
    }

    #[test]
    fn custom_polynomial_matches_builtin() {
        let f = fp(31);
        let custom = DistancePolynomial::Custom(
            CustomPolynomial::new(2, vec![(1, vec![2, 0]), (1, vec![0, 2])]).unwrap(),
        );
        if let DistancePolynomial::Custom(c) = &custom {
            assert_eq!(c.degree(), 2);
        }
        let mut rng = Lcg(42);
        for _ in 0..200 {
            let v = [f.elem(rng.next() % 31), f.elem(rng.next() % 31)];
            assert_eq!(
                custom.value(&v).unwrap(),
                DistancePolynomial::SumSquares.value(&v).unwrap()
            );
        }
        assert_eq!(
            custom.value(&[f.one()]).unwrap_err(),
            AppError::Arity {
                expected: 2,
                got: 1
            }
        );
    }

    fn planar_set(f: PrimeField, coords: &[(u64, u64)]) -> PointSet {
        let pts = coords
            .iter()
            .map(|&(x, y)| AffinePoint::new(vec![f.elem(x), f.elem(y), f.zero()]))
            .collect();
        PointSet::new(f, 3, pts).unwrap()
    }

    #[test]
    fn planar_single_pin_reduces_to_pinned_quadrance() {
        let f = fp(11);
        let mut rng = Lcg(7);
        let e = planar_set(
            f,
            &(0..14)
                .map(|_| (rng.next() % 11, rng.next() % 11))
                .collect::<Vec<_>>(),
        );
        let pin = planar_set(f, &[(3, 4)]);
        let r = planar_two_set_distances(&e, &pin, &QuadranceCircles).unwrap();
        // Same values as the 2-dimensional quadrance from (3,4).
        let direct: BTreeSet<Fp> = e
            .iter()
            .map(|pt| {
                let dx = pt.coords()[0] - f.elem(3);
                let dy = pt.coords()[1] - f.elem(4);
                dx * dx + dy * dy
            })
            .collect();
        assert_eq!(r.values, direct);
        assert!(r.covered);
        assert_eq!(r.incidences, e.len() as u128, "circles partition E by value");
    }

    #[test]
    fn planar_squared_product_matches_brute_force() {
        let f = fp(11);
        let mut rng = Lcg(0xabc);
        let e = planar_set(
            f,
            &(0..15)
                .map(|_| (rng.next() % 11, rng.next() % 11))
                .collect::<Vec<_>>(),
        );
        let f_pts: Vec<AffinePoint> = (0..10)
            .map(|_| {
                AffinePoint::new(vec![
                    f.elem(rng.next() % 11),
                    f.elem(rng.next() % 11),
                    f.elem(rng.next() % 11),
                ])
            })
            .collect();
        let f_set = PointSet::new(f, 3, f_pts).unwrap();
        let fam = SquaredProductHyperbolas;
        let r = planar_two_set_distances(&e, &f_set, &fam).unwrap();
        let mut brute = BTreeSet::new();
        for x in e.iter() {
            for y in f_set.iter() {
                let d = x.sub(y);
                let prod = d.coords()[0] * d.coords()[1];
                brute.insert(prod * prod + d.coords()[2] * d.coords()[2]);
            }
        }
        assert_eq!(r.values, brute);
        assert!(
            r.covered,
            "hyperbola pair covers each point: {} < {}",
            r.incidences, r.pairs
        );
        assert!(r.notes.iter().any(|s| s.contains("degree 4")));
    }

    #[test]
    fn planar_empty_f_gives_empty_values() {
        let f = fp(11);
        let e = planar_set(f, &[(1, 2), (3, 4)]);
        let empty = PointSet::new(f, 3, vec![]).unwrap();
        let r = planar_two_set_distances(&e, &empty, &QuadranceCircles).unwrap();
        assert!(r.values.is_empty());
        assert!(r.covered, "0 >= 0");
    }

    #[test]
    fn planar_rejects_off_plane_points() {
        let f = fp(11);
        let mut pts = vec![AffinePoint::new(vec![f.one(), f.one(), f.one()])];
        pts.push(AffinePoint::new(vec![f.zero(), f.zero(), f.zero()]));
        let e = PointSet::new(f, 3, pts).unwrap();
        let f_set = planar_set(f, &[(0, 0)]);
        assert_eq!(
            planar_two_set_distances(&e, &f_set, &QuadranceCircles).unwrap_err(),
            AppError::NotPlanar
        );
    }

    #[test]
    fn image_constant_on_a_circle() {
        let f = fp(13);
        let on_circle: Vec<(u64, u64)> = (0..13)
            .flat_map(|x| (0..13).map(move |y| (x, y)))
            .filter(|&(x, y)| (x * x + y * y) % 13 == 3)
            .collect();
        assert!(on_circle.len() >= 5);
        let e = PointSet::from_xy(f, &on_circle);
        let f_set = PointSet::from_xy(f, &[(1, 1)]);
        let r = polynomial_image_check(&e, &f_set, &DistancePolynomial::SumSquares).unwrap();
        assert_eq!(r.image.len(), 1);
        assert!(r.image.contains(&f.elem(3)));
    }

    #[test]
    fn image_of_axes_under_product_is_zero() {
        let f = fp(11);
        let e = PointSet::from_xy(f, &[(0, 1), (0, 5), (3, 0), (7, 0), (0, 0)]);
        let f_set = PointSet::from_xy(f, &[(1, 1)]);
        let r = polynomial_image_check(&e, &f_set, &DistancePolynomial::Product).unwrap();
        assert_eq!(r.image.len(), 1);
        assert!(r.image.contains(&f.zero()));
        assert!(r.pruned_e.is_empty());
        assert!(
            r.violations.iter().any(|v| v.contains("axes")),
            "axis condition must be flagged: {:?}",
            r.violations
        );
    }

    #[test]
    fn image_and_sumset_match_brute_force() {
        let f = fp(31);
        let mut rng = Lcg(0x1234);
        for _ in 0..20 {
            let e = rng.points(f, 2, 20);
            let f_set = rng.points(f, 2, 20);
            let r = polynomial_image_check(&e, &f_set, &DistancePolynomial::ParabolaDist).unwrap();
            let brute_image: BTreeSet<Fp> = e
                .iter()
                .map(|pt| pt.y() + pt.x() * pt.x())
                .collect();
            assert_eq!(r.image, brute_image);
            let mut brute_sum = BTreeSet::new();
            for x in e.iter() {
                for y in f_set.iter() {
                    brute_sum.insert((x.x() + y.x(), x.y() + y.y()));
                }
            }
            assert_eq!(r.sumset.len(), brute_sum.len());
            assert!(r.sumset.len() >= e.len().max(f_set.len()));
        }
    }

    #[test]
    fn image_rejects_empty_inputs() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(1, 1)]);
        let empty = PointSet::new(f, 2, vec![]).unwrap();
        assert_eq!(
            polynomial_image_check(&empty, &e, &DistancePolynomial::Product).unwrap_err(),
            AppError::EmptySet("E")
        );
        assert_eq!(
            polynomial_image_check(&e, &empty, &DistancePolynomial::Product).unwrap_err(),
            AppError::EmptySet("F")
        );
    }

    #[test]
    fn distance_set_origin_and_full_plane() {
        let f = fp(7);
        let origin = PointSet::from_xy(f, &[(0, 0)]);
        let r = distance_set(&origin, &origin, 2).unwrap();
        assert_eq!(r.distances.len(), 1);
        assert!(r.distances.contains(&f.zero()));

        // E = F = F_3²: all three quadrances are attained.
        let f3 = fp(3);
        let all: Vec<(u64, u64)> = (0..3).flat_map(|x| (0..3).map(move |y| (x, y))).collect();
        let plane = PointSet::from_xy(f3, &all);
        let r = distance_set(&plane, &plane, 2).unwrap();
        let expected: BTreeSet<Fp> = [0, 1, 2].into_iter().map(|v| f3.elem(v)).collect();
        assert_eq!(r.distances, expected);
    }

    #[test]
    fn distance_set_symmetry_and_oracle() {
        let f = fp(11);
        let mut rng = Lcg(99);
        for _ in 0..10 {
            let e = rng.points(f, 3, 12);
            let g = rng.points(f, 3, 9);
            let r = distance_set(&e, &g, 3).unwrap();
            let r_swapped = distance_set(&g, &e, 3).unwrap();
            assert_eq!(r.distances, r_swapped.distances, "Δ(E,F) = Δ(F,E)");
            let mut brute = BTreeSet::new();
            for x in e.iter() {
                for y in g.iter() {
                    brute.insert(quadrance(x, y));
                }
            }
            assert_eq!(r.distances, brute);
            // The best pin is a member of F and its set recomputes.
            let pin = r.best_pin.clone().unwrap();
            assert!(g.contains(&pin));
            let pinned: BTreeSet<Fp> = e.iter().map(|x| quadrance(x, &pin)).collect();
            assert_eq!(r.best_pinned, pinned);
        }
    }

    #[test]
    fn distance_set_dimension_mismatch() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(1, 1)]);
        let g = PointSet::new(f, 3, vec![AffinePoint::new(vec![f.one(); 3])]).unwrap();
        assert!(matches!(
            distance_set(&e, &g, 2).unwrap_err(),
            AppError::Dimension { expected: 2, got: 3 }
        ));
    }

    #[test]
    fn beck_five_points_on_a_parabola() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(0, 0), (1, 1), (2, 4), (3, 2), (4, 2)]);
        let r = beck_conic_count(&e).unwrap();
        assert_eq!(r.conic_count, 1, "exactly the parabola y = x²");
        assert_eq!(r.gp_five_tuples, 120);
        assert_eq!(r.max_collinear, 2);
        assert!(r.notes.is_empty());
    }

    #[test]
    fn beck_collinear_triple_blocks_the_only_subset() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)]);
        let r = beck_conic_count(&e).unwrap();
        assert_eq!(r.conic_count, 0);
        assert_eq!(r.gp_five_tuples, 0);
        assert_eq!(r.max_collinear, 3);
    }

    #[test]
    fn beck_small_sets_note() {
        let f = fp(7);
        let e = PointSet::from_xy(f, &[(0, 0), (1, 2), (3, 4)]);
        let r = beck_conic_count(&e).unwrap();
        assert_eq!(r.conic_count, 0);
        assert_eq!(r.max_collinear, 2);
        assert!(r.notes.iter().any(|s| s.contains("fewer than five")));
    }

    /// Independent recount: fit every 5-subset (no pruning), dedup, then
    /// verify 5-richness by explicit membership counting against P.
    fn beck_oracle(p_set: &PointSet) -> u64 {
        let pts = p_set.points();
        let n = pts.len();
        let mut candidates: BTreeSet<Conic> = BTreeSet::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        for m in l + 1..n {
                            let five = [
                                pts[i].clone(),
                                pts[j].clone(),
                                pts[k].clone(),
                                pts[l].clone(),
                                pts[m].clone(),
                            ];
                            if let Ok(Some(c)) = Conic::through_five(&five) {
                                if c.is_nondegenerate() {
                                    candidates.insert(c);
                                }
                            }
                        }
                    }
                }
            }
        }
        candidates
            .into_iter()
            .filter(|c| pts.iter().filter(|pt| c.contains_affine(pt)).count() >= 5)
            .count() as u64
    }

    #[test]
    fn beck_cartesian_grid_matches_oracle() {
        let f = fp(101);
        let coords: Vec<(u64, u64)> = [2u64, 3, 5, 7]
            .iter()
            .flat_map(|&x| [11u64, 13, 17, 19].iter().map(move |&y| (x, y)))
            .collect();
        let e = PointSet::from_xy(f, &coords);
        let r = beck_conic_count(&e).unwrap();
        assert_eq!(r.conic_count, beck_oracle(&e));
        assert_eq!(r.max_collinear, 4, "grid rows and columns");
        // Ordered-tuple invariants.
        let n = e.len() as u128;
        assert!(r.gp_five_tuples <= n * (n - 1) * (n - 2) * (n - 3) * (n - 4));
        let clamped = bounds::evaluate(
            BoundId::Gp5TupleLower,
            &BoundParams::new()
                .size_p(e.len() as u128)
                .max_collinear(r.max_collinear as u128),
        )
        .unwrap()
        .total;
        assert!(
            bounds::rat_u128(r.gp_five_tuples) >= clamped,
            "exact tuple count dominates the clamped product form"
        );
    }

    #[test]
    fn beck_random_sets_match_oracle() {
        let f = fp(31);
        let mut rng = Lcg(0xbeef);
        for _ in 0..5 {
            let e = rng.points(f, 2, 12);
            let r = beck_conic_count(&e).unwrap();
            assert_eq!(r.conic_count, beck_oracle(&e));
        }
    }
}
