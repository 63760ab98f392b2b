//! Exact incidence counting between finite point sets and families of curves,
//! incidence histograms, k-rich curve extraction, and the dualities that turn
//! circle/parabola/hyperbola/sphere incidences into point-line and
//! point-hyperplane incidences.
//!
//! Two counting routes are provided: a naive double loop over field elements
//! (the reference), and an optimized engine that packs point monomials and
//! curve coefficients into flat residue arrays and accumulates widening
//! products, one modular reduction per (point, curve) pair. With the
//! `parallel` feature the optimized engine splits the curve loop across a
//! rayon pool; the reduction is an exact integer sum, so results are
//! identical at any thread count.

use crate::curves::{Circle, Conic, Hyperbola, Mobius, Parabola, Sphere};
use crate::field::{mulmod, Fp, PrimeField};
use crate::proj::{AffinePoint, Hyperplane, Line};
use std::collections::BTreeMap;
use thiserror::Error;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IncidenceError {
    #[error("point has dimension {got}, expected {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("points and curves live over different fields")]
    FieldMismatch,
    #[error("family mixes objects of different dimensions")]
    MixedDimensions,
    #[error("the origin must be excluded before dualizing")]
    OriginPresent,
    #[error("richness threshold must be at least 1")]
    ZeroRichness,
}

/// A finite set of distinct points of F_p^d, kept sorted so every consumer
/// sees a deterministic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: PrimeField,
    dim: usize,
    points: Vec<AffinePoint>,
}

impl PointSet {
    /// Sorts, deduplicates, and validates dimensions and fields.
    pub fn new(
        field: PrimeField,
        dim: usize,
        mut points: Vec<AffinePoint>,
    ) -> Result<PointSet, IncidenceError> {
        for pt in &points {
            if pt.dim() != dim {
                return Err(IncidenceError::Dimension {
                    expected: dim,
                    got: pt.dim(),
                });
            }
            if pt.field() != field {
                return Err(IncidenceError::FieldMismatch);
            }
        }
        points.sort();
        points.dedup();
        Ok(PointSet { field, dim, points })
    }

    /// Planar point set from raw residue pairs.
    pub fn from_xy(field: PrimeField, coords: &[(u64, u64)]) -> PointSet {
        let points = coords
            .iter()
            .map(|&(x, y)| AffinePoint::xy(field, x, y))
            .collect();
        PointSet::new(field, 2, points).expect("xy points are planar by construction")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[AffinePoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &AffinePoint> {
        self.points.iter()
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        self.points.binary_search(pt).is_ok()
    }

    /// The translate {p + v : p in self}.
    pub fn translate(&self, v: &AffinePoint) -> PointSet {
        let points = self.points.iter().map(|p| p.add(v)).collect();
        PointSet::new(self.field, self.dim, points).expect("translation preserves shape")
    }

    /// Remove one point if present (used when a pin must be excluded).
    pub fn without(&self, pt: &AffinePoint) -> PointSet {
        let points = self
            .points
            .iter()
            .filter(|p| *p != pt)
            .cloned()
            .collect();
        PointSet::new(self.field, self.dim, points).expect("subset keeps shape")
    }
}

/// Which kind of curve a family holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyKind {
    Lines,
    Conics,
    Circles,
    Parabolas,
    Hyperbolas,
    MobiusGraphs,
    Spheres,
    Hyperplanes,
}

impl FamilyKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyKind::Lines => "lines",
            FamilyKind::Conics => "conics",
            FamilyKind::Circles => "circles",
            FamilyKind::Parabolas => "parabolas",
            FamilyKind::Hyperbolas => "hyperbolas",
            FamilyKind::MobiusGraphs => "mobius",
            FamilyKind::Spheres => "spheres",
            FamilyKind::Hyperplanes => "hyperplanes",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Curves {
    Lines(Vec<Line>),
    Conics(Vec<Conic>),
    Circles(Vec<Circle>),
    Parabolas(Vec<Parabola>),
    Hyperbolas(Vec<Hyperbola>),
    MobiusGraphs(Vec<Mobius>),
    Spheres(Vec<Sphere>),
    Hyperplanes(Vec<Hyperplane>),
}

/// A deduplicated family of curves of one kind over one field.
///
/// Deduplication is by each type's identity: canonical coefficient vectors
/// for lines/conics/Möbius maps, defining parameters for circles, parabolas,
/// hyperbolas and spheres, and raw (normal, offset) tuples for hyperplanes
/// (see [`Hyperplane`] for why).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveFamily {
    field: PrimeField,
    dim: usize,
    curves: Curves,
}

macro_rules! family_ctor {
    ($name:ident, $ty:ty, $variant:ident, $dim:expr) => {
        pub fn $name(field: PrimeField, mut v: Vec<$ty>) -> Result<CurveFamily, IncidenceError> {
            v.sort();
            v.dedup();
            let dim = $dim(&v)?;
            for item in &v {
                if item.field() != field {
                    return Err(IncidenceError::FieldMismatch);
                }
            }
            Ok(CurveFamily {
                field,
                dim,
                curves: Curves::$variant(v),
            })
        }
    };
}

fn planar<T>(_: &[T]) -> Result<usize, IncidenceError> {
    Ok(2)
}

impl CurveFamily {
    family_ctor!(lines, Line, Lines, planar);
    family_ctor!(conics, Conic, Conics, planar);
    family_ctor!(circles, Circle, Circles, planar);
    family_ctor!(parabolas, Parabola, Parabolas, planar);
    family_ctor!(hyperbolas, Hyperbola, Hyperbolas, planar);
    family_ctor!(mobius_graphs, Mobius, MobiusGraphs, planar);

    pub fn spheres(field: PrimeField, mut v: Vec<Sphere>) -> Result<CurveFamily, IncidenceError> {
        v.sort();
        v.dedup();
        let dim = uniform_dim(v.iter().map(|s| s.dim()))?;
        for s in &v {
            if s.center().field() != field {
                return Err(IncidenceError::FieldMismatch);
            }
        }
        Ok(CurveFamily {
            field,
            dim,
            curves: Curves::Spheres(v),
        })
    }

    pub fn hyperplanes(
        field: PrimeField,
        mut v: Vec<Hyperplane>,
    ) -> Result<CurveFamily, IncidenceError> {
        v.sort();
        v.dedup();
        let dim = uniform_dim(v.iter().map(|h| h.dim()))?;
        for h in &v {
            if h.offset().field() != field {
                return Err(IncidenceError::FieldMismatch);
            }
        }
        Ok(CurveFamily {
            field,
            dim,
            curves: Curves::Hyperplanes(v),
        })
    }

    pub fn kind(&self) -> FamilyKind {
        match &self.curves {
            Curves::Lines(_) => FamilyKind::Lines,
            Curves::Conics(_) => FamilyKind::Conics,
            Curves::Circles(_) => FamilyKind::Circles,
            Curves::Parabolas(_) => FamilyKind::Parabolas,
            Curves::Hyperbolas(_) => FamilyKind::Hyperbolas,
            Curves::MobiusGraphs(_) => FamilyKind::MobiusGraphs,
            Curves::Spheres(_) => FamilyKind::Spheres,
            Curves::Hyperplanes(_) => FamilyKind::Hyperplanes,
        }
    }

    pub fn len(&self) -> usize {
        match &self.curves {
            Curves::Lines(v) => v.len(),
            Curves::Conics(v) => v.len(),
            Curves::Circles(v) => v.len(),
            Curves::Parabolas(v) => v.len(),
            Curves::Hyperbolas(v) => v.len(),
            Curves::MobiusGraphs(v) => v.len(),
            Curves::Spheres(v) => v.len(),
            Curves::Hyperplanes(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Dimension of the ambient space the curves live in.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_lines(&self) -> Option<&[Line]> {
        match &self.curves {
            Curves::Lines(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_conics(&self) -> Option<&[Conic]> {
        match &self.curves {
            Curves::Conics(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_circles(&self) -> Option<&[Circle]> {
        match &self.curves {
            Curves::Circles(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_parabolas(&self) -> Option<&[Parabola]> {
        match &self.curves {
            Curves::Parabolas(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_hyperbolas(&self) -> Option<&[Hyperbola]> {
        match &self.curves {
            Curves::Hyperbolas(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_mobius_graphs(&self) -> Option<&[Mobius]> {
        match &self.curves {
            Curves::MobiusGraphs(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_spheres(&self) -> Option<&[Sphere]> {
        match &self.curves {
            Curves::Spheres(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_hyperplanes(&self) -> Option<&[Hyperplane]> {
        match &self.curves {
            Curves::Hyperplanes(v) => Some(v),
            _ => None,
        }
    }

    /// Does curve `i` pass through `pt`? Reference-path membership test.
    pub fn contains(&self, i: usize, pt: &AffinePoint) -> bool {
        match &self.curves {
            Curves::Lines(v) => v[i].contains_affine(pt),
            Curves::Conics(v) => v[i].contains_affine(pt),
            Curves::Circles(v) => v[i].contains(pt),
            Curves::Parabolas(v) => v[i].contains(pt),
            Curves::Hyperbolas(v) => v[i].contains(pt),
            Curves::MobiusGraphs(v) => v[i].graph_contains(pt),
            Curves::Spheres(v) => v[i].contains(pt),
            Curves::Hyperplanes(v) => v[i].contains(pt),
        }
    }
}

fn uniform_dim(dims: impl Iterator<Item = usize>) -> Result<usize, IncidenceError> {
    let mut out = None;
    for d in dims {
        match out {
            None => out = Some(d),
            Some(prev) if prev != d => return Err(IncidenceError::MixedDimensions),
            _ => {}
        }
    }
    // An empty sphere/hyperplane family defaults to the plane.
    Ok(out.unwrap_or(2))
}

fn check_compat(points: &PointSet, family: &CurveFamily) -> Result<(), IncidenceError> {
    if points.field() != family.field() {
        return Err(IncidenceError::FieldMismatch);
    }
    if points.dim() != family.dim() && !family.is_empty() {
        return Err(IncidenceError::Dimension {
            expected: family.dim(),
            got: points.dim(),
        });
    }
    Ok(())
}

/// Reference incidence count: a plain double loop over field-element
/// arithmetic. Quadratic and slow on purpose — the optimized engine is
/// checked against it.
pub fn count_incidences_naive(
    points: &PointSet,
    family: &CurveFamily,
) -> Result<u64, IncidenceError> {
    check_compat(points, family)?;
    let mut total = 0u64;
    for i in 0..family.len() {
        for pt in points.iter() {
            if family.contains(i, pt) {
                total += 1;
            }
        }
    }
    Ok(total)
}

/// Packed representation: per-point monomial rows and per-curve coefficient
/// rows of the same stride, plus a per-curve constant. A pair is incident
/// exactly when the dot product plus the constant vanishes mod p.
struct Packed {
    stride: usize,
    /// stride × |P| monomials, canonical residues.
    pts: Vec<u64>,
    /// stride × |C| coefficients, canonical residues.
    coefs: Vec<u64>,
    /// |C| constants.
    consts: Vec<u64>,
}

fn pack(points: &PointSet, family: &CurveFamily) -> Packed {
    let p = points.field().p();
    let neg = |x: Fp| (-x).value();
    match &family.curves {
        Curves::Lines(v) => Packed {
            stride: 2,
            pts: points
                .iter()
                .flat_map(|q| [q.x().value(), q.y().value()])
                .collect(),
            coefs: v
                .iter()
                .flat_map(|l| [l.a().value(), l.b().value()])
                .collect(),
            consts: v.iter().map(|l| l.c().value()).collect(),
        },
        Curves::Conics(v) => Packed {
            stride: 5,
            pts: points
                .iter()
                .flat_map(|q| {
                    let (x, y) = (q.x().value(), q.y().value());
                    [
                        mulmod(x, x, p),
                        mulmod(x, y, p),
                        mulmod(y, y, p),
                        x,
                        y,
                    ]
                })
                .collect(),
            coefs: v
                .iter()
                .flat_map(|c| {
                    let k = c.coeffs();
                    [k[0].value(), k[1].value(), k[2].value(), k[3].value(), k[4].value()]
                })
                .collect(),
            consts: v.iter().map(|c| c.coeffs()[5].value()).collect(),
        },
        Curves::Circles(v) => Packed {
            // s − 2c₁x − 2c₂y + (c₁² + c₂² − r), with s = x² + y².
            stride: 3,
            pts: points
                .iter()
                .flat_map(|q| {
                    let (x, y) = (q.x().value(), q.y().value());
                    [(mulmod(x, x, p) + mulmod(y, y, p)) % p, x, y]
                })
                .collect(),
            coefs: v
                .iter()
                .flat_map(|c| {
                    let two = c.r().field().elem(2);
                    [1u64, neg(two * c.center().x()), neg(two * c.center().y())]
                })
                .collect(),
            consts: v
                .iter()
                .map(|c| {
                    let (a, b) = (c.center().x(), c.center().y());
                    (a * a + b * b - c.r()).value()
                })
                .collect(),
        },
        Curves::Parabolas(v) => Packed {
            // a·x² + b·x − y + c = 0.
            stride: 3,
            pts: points
                .iter()
                .flat_map(|q| {
                    let (x, y) = (q.x().value(), q.y().value());
                    [mulmod(x, x, p), x, y]
                })
                .collect(),
            coefs: v
                .iter()
                .flat_map(|pb| {
                    let [a, b, _] = pb.coeffs();
                    [a.value(), b.value(), p - 1]
                })
                .collect(),
            consts: v.iter().map(|pb| pb.coeffs()[2].value()).collect(),
        },
        Curves::Hyperbolas(v) => Packed {
            // xy − b·x − a·y + (ab − c) = 0.
            stride: 3,
            pts: points
                .iter()
                .flat_map(|q| {
                    let (x, y) = (q.x().value(), q.y().value());
                    [mulmod(x, y, p), x, y]
                })
                .collect(),
            coefs: v
                .iter()
                .flat_map(|h| {
                    let [a, b, _] = h.coeffs();
                    [1u64, neg(b), neg(a)]
                })
                .collect(),
            consts: v
                .iter()
                .map(|h| {
                    let [a, b, c] = h.coeffs();
                    (a * b - c).value()
                })
                .collect(),
        },
        Curves::MobiusGraphs(v) => Packed {
            // c·xy + d·y − a·x − b = 0 (fails automatically at the pole).
            stride: 3,
            pts: points
                .iter()
                .flat_map(|q| {
                    let (x, y) = (q.x().value(), q.y().value());
                    [mulmod(x, y, p), x, y]
                })
                .collect(),
            coefs: v
                .iter()
                .flat_map(|m| {
                    let [a, _, c, d] = m.coeffs();
                    [c.value(), neg(a), d.value()]
                })
                .collect(),
            consts: v.iter().map(|m| neg(m.coeffs()[1])).collect(),
        },
        Curves::Spheres(v) => {
            let d = family.dim();
            Packed {
                // Σxᵢ² − 2Σcᵢxᵢ + (Σcᵢ² − r) = 0.
                stride: d + 1,
                pts: points
                    .iter()
                    .flat_map(|q| {
                        let mut row = Vec::with_capacity(d + 1);
                        let mut s = 0u64;
                        for c in q.coords() {
                            s = (s + mulmod(c.value(), c.value(), p)) % p;
                        }
                        row.push(s);
                        row.extend(q.coords().iter().map(|c| c.value()));
                        row
                    })
                    .collect(),
                coefs: v
                    .iter()
                    .flat_map(|s| {
                        let two = s.r().field().elem(2);
                        let mut row = Vec::with_capacity(d + 1);
                        row.push(1u64);
                        row.extend(s.center().coords().iter().map(|&c| neg(two * c)));
                        row
                    })
                    .collect(),
                consts: v
                    .iter()
                    .map(|s| {
                        let mut acc = -s.r();
                        for &c in s.center().coords() {
                            acc += c * c;
                        }
                        acc.value()
                    })
                    .collect(),
            }
        }
        Curves::Hyperplanes(v) => {
            let d = family.dim();
            Packed {
                stride: d,
                pts: points
                    .iter()
                    .flat_map(|q| q.coords().iter().map(|c| c.value()).collect::<Vec<_>>())
                    .collect(),
                coefs: v
                    .iter()
                    .flat_map(|h| h.normal().iter().map(|c| c.value()).collect::<Vec<_>>())
                    .collect(),
                consts: v.iter().map(|h| h.offset().value()).collect(),
            }
        }
    }
}

/// Inner kernel: incidences of one packed curve against all packed points.
/// Terms are products of canonical residues (< p ≤ 2³¹ − 1 each, so every
/// product < 2⁶²); the u128 accumulator cannot overflow for any realistic
/// stride, and a single reduction decides membership.
#[inline]
fn count_one<const S: usize>(pts: &[u64], coef: &[u64], konst: u64, p: u64) -> u64 {
    let mut hits = 0u64;
    let p128 = p as u128;
    for chunk in pts.chunks_exact(S) {
        let mut acc = konst as u128;
        for i in 0..S {
            acc += coef[i] as u128 * chunk[i] as u128;
        }
        if acc.is_multiple_of(p128) {
            hits += 1;
        }
    }
    hits
}

fn count_one_dyn(pts: &[u64], coef: &[u64], konst: u64, p: u64, stride: usize) -> u64 {
    let mut hits = 0u64;
    let p128 = p as u128;
    for chunk in pts.chunks_exact(stride) {
        let mut acc = konst as u128;
        for (c, x) in coef.iter().zip(chunk) {
            acc += *c as u128 * *x as u128;
        }
        if acc.is_multiple_of(p128) {
            hits += 1;
        }
    }
    hits
}

fn per_curve_counts(packed: &Packed, p: u64) -> Vec<u64> {
    let Packed {
        stride,
        pts,
        coefs,
        consts,
    } = packed;
    let stride = *stride;
    let run = |i: usize| -> u64 {
        let coef = &coefs[i * stride..(i + 1) * stride];
        let konst = consts[i];
        match stride {
            2 => count_one::<2>(pts, coef, konst, p),
            3 => count_one::<3>(pts, coef, konst, p),
            5 => count_one::<5>(pts, coef, konst, p),
            s => count_one_dyn(pts, coef, konst, p, s),
        }
    };
    #[cfg(feature = "parallel")]
    {
        (0..consts.len()).into_par_iter().map(run).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..consts.len()).map(run).collect()
    }
}

/// Exact incidences of each curve with the point set, in family order.
pub fn incidence_counts_per_curve(
    points: &PointSet,
    family: &CurveFamily,
) -> Result<Vec<u64>, IncidenceError> {
    check_compat(points, family)?;
    if family.is_empty() {
        return Ok(Vec::new());
    }
    let packed = pack(points, family);
    Ok(per_curve_counts(&packed, points.field().p()))
}

/// Total number of incident (point, curve) pairs, I(P, C).
pub fn count_incidences(points: &PointSet, family: &CurveFamily) -> Result<u64, IncidenceError> {
    Ok(incidence_counts_per_curve(points, family)?.iter().sum())
}

/// Distribution of incidence counts over a family.
#[derive(Clone, Debug, PartialEq)]
pub struct IncidenceProfile {
    /// k ↦ number of curves with exactly k incidences (k = 0 included).
    pub histogram: BTreeMap<u64, u64>,
    /// Σ over curves of their incidence count = I(P, C).
    pub total: u64,
    pub num_points: u64,
    pub num_curves: u64,
    /// The dyadic cutoff Δ used when converting rich-curve estimates into an
    /// incidence bound. Recorded by the caller that chose it; never computed
    /// here.
    pub delta: Option<f64>,
}

impl IncidenceProfile {
    /// Number of curves with at least k incidences.
    pub fn rich_count(&self, k: u64) -> u64 {
        self.histogram
            .iter()
            .filter(|(kk, _)| **kk >= k)
            .map(|(_, c)| c)
            .sum()
    }

    /// Largest k with a nonempty bucket.
    pub fn max_richness(&self) -> u64 {
        self.histogram
            .iter()
            .rev()
            .find(|(_, c)| **c > 0)
            .map(|(k, _)| *k)
            .unwrap_or(0)
    }

    /// Compact "k:count" rendering, ascending in k, zero bucket included.
    pub fn compact(&self) -> String {
        self.histogram
            .iter()
            .map(|(k, c)| format!("{k}:{c}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Attach the dyadic cutoff chosen by the caller.
    pub fn with_delta(mut self, delta: f64) -> IncidenceProfile {
        self.delta = Some(delta);
        self
    }
}

pub fn incidence_histogram(
    points: &PointSet,
    family: &CurveFamily,
) -> Result<IncidenceProfile, IncidenceError> {
    let counts = incidence_counts_per_curve(points, family)?;
    let mut histogram = BTreeMap::new();
    let mut total = 0u64;
    for c in &counts {
        *histogram.entry(*c).or_insert(0) += 1;
        total += *c;
    }
    Ok(IncidenceProfile {
        histogram,
        total,
        num_points: points.len() as u64,
        num_curves: family.len() as u64,
        delta: None,
    })
}

/// The subfamily of curves incident to at least k points.
#[derive(Clone, Debug)]
pub struct RichFamily {
    pub k: u64,
    pub family: CurveFamily,
}

pub fn rich_curves(
    points: &PointSet,
    family: &CurveFamily,
    k: u64,
) -> Result<RichFamily, IncidenceError> {
    if k == 0 {
        return Err(IncidenceError::ZeroRichness);
    }
    let counts = incidence_counts_per_curve(points, family)?;
    let keep = |i: usize| counts[i] >= k;
    let curves = match &family.curves {
        Curves::Lines(v) => Curves::Lines(filter_idx(v, keep)),
        Curves::Conics(v) => Curves::Conics(filter_idx(v, keep)),
        Curves::Circles(v) => Curves::Circles(filter_idx(v, keep)),
        Curves::Parabolas(v) => Curves::Parabolas(filter_idx(v, keep)),
        Curves::Hyperbolas(v) => Curves::Hyperbolas(filter_idx(v, keep)),
        Curves::MobiusGraphs(v) => Curves::MobiusGraphs(filter_idx(v, keep)),
        Curves::Spheres(v) => Curves::Spheres(filter_idx(v, keep)),
        Curves::Hyperplanes(v) => Curves::Hyperplanes(filter_idx(v, keep)),
    };
    Ok(RichFamily {
        k,
        family: CurveFamily {
            field: family.field,
            dim: family.dim,
            curves,
        },
    })
}

fn filter_idx<T: Clone>(v: &[T], keep: impl Fn(usize) -> bool) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, x)| x.clone())
        .collect()
}

/// Point-to-line dual of a planar point set, plus the points the duality
/// had to exclude.
#[derive(Clone, Debug)]
pub struct DualLines {
    /// (source point, its dual line), in point order.
    pub pairs: Vec<(AffinePoint, Line)>,
    /// Points the map is not defined on, in point order.
    pub excluded: Vec<AffinePoint>,
}

impl DualLines {
    /// The dual lines as a (deduplicated) family.
    pub fn line_family(&self, field: PrimeField) -> CurveFamily {
        CurveFamily::lines(field, self.pairs.iter().map(|(_, l)| *l).collect())
            .expect("dual lines share the field")
    }

    /// Number of distinct dual lines (collisions collapse here).
    pub fn distinct_lines(&self) -> usize {
        let mut v: Vec<Line> = self.pairs.iter().map(|(_, l)| *l).collect();
        v.sort();
        v.dedup();
        v.len()
    }
}

/// Point-to-hyperplane dual (sphere geometry), plus exclusions.
#[derive(Clone, Debug)]
pub struct DualHyperplanes {
    pub pairs: Vec<(AffinePoint, Hyperplane)>,
    pub excluded: Vec<AffinePoint>,
}

impl DualHyperplanes {
    pub fn hyperplane_family(&self, field: PrimeField) -> CurveFamily {
        CurveFamily::hyperplanes(field, self.pairs.iter().map(|(_, h)| h.clone()).collect())
            .expect("dual hyperplanes share the field")
    }
}

/// Circle duality pinned at the origin: α ↦ the line
/// −2α₁X − 2α₂Y + (α₁² + α₂²) = 0.
///
/// A point α lies on the circle through the origin with center q exactly
/// when q lies on the dual line of α. Errors when the origin is present
/// (its dual would be the zero line); no other exclusions.
pub fn circle_dual(points: &PointSet) -> Result<DualLines, IncidenceError> {
    require_planar(points)?;
    let f = points.field();
    let two = f.elem(2);
    let mut pairs = Vec::with_capacity(points.len());
    for q in points.iter() {
        if q.is_origin() {
            return Err(IncidenceError::OriginPresent);
        }
        let (x, y) = (q.x(), q.y());
        let line = Line::new(-(two * x), -(two * y), x * x + y * y)
            .expect("nonzero point gives nonzero coefficients");
        pairs.push((q.clone(), line));
    }
    Ok(DualLines {
        pairs,
        excluded: Vec::new(),
    })
}

/// Parabola duality pinned at the origin: α ↦ the line α₁²X + α₁Y − α₂ = 0,
/// so that α lies on y = ax² + bx exactly when (a, b) lies on the dual line.
///
/// Points with α₁ = 0 (the origin included) are excluded and reported, not
/// an error: no parabola through the origin meets the y-axis again.
pub fn parabola_dual(points: &PointSet) -> Result<DualLines, IncidenceError> {
    require_planar(points)?;
    let mut pairs = Vec::new();
    let mut excluded = Vec::new();
    for q in points.iter() {
        let (x, y) = (q.x(), q.y());
        if x.is_zero() {
            excluded.push(q.clone());
            continue;
        }
        let line = Line::new(x * x, x, -y).expect("x ≠ 0");
        pairs.push((q.clone(), line));
    }
    Ok(DualLines { pairs, excluded })
}

/// Hyperbola duality pinned at `pin` = (q₁, q₂): with x′ = α₁ − q₁ and
/// y′ = α₂ − q₂, the point α maps to the line x′X + y′Y + x′y′ = 0, and the
/// hyperbola (x − a)(y − b) = c through the pin maps to the dual point
/// (q₂ − b, q₁ − a).
///
/// Points on the pin's horizontal or vertical line (x′ = 0 or y′ = 0) are
/// excluded and reported: no hyperbola with c ≠ 0 through the pin can reach
/// them.
pub fn hyperbola_dual(points: &PointSet, pin: &AffinePoint) -> Result<DualLines, IncidenceError> {
    require_planar(points)?;
    if pin.dim() != 2 {
        return Err(IncidenceError::Dimension {
            expected: 2,
            got: pin.dim(),
        });
    }
    let mut pairs = Vec::new();
    let mut excluded = Vec::new();
    for q in points.iter() {
        let xp = q.x() - pin.x();
        let yp = q.y() - pin.y();
        if xp.is_zero() || yp.is_zero() {
            excluded.push(q.clone());
            continue;
        }
        let line = Line::new(xp, yp, xp * yp).expect("both offsets nonzero");
        pairs.push((q.clone(), line));
    }
    Ok(DualLines { pairs, excluded })
}

/// The dual point of a hyperbola through `pin`, when it passes through it.
pub fn hyperbola_dual_point(h: &Hyperbola, pin: &AffinePoint) -> Option<AffinePoint> {
    if !h.contains(pin) {
        return None;
    }
    let [a, b, _] = h.coeffs();
    Some(AffinePoint::new(vec![pin.y() - b, pin.x() - a]))
}

/// Sphere duality pinned at the origin in F_p^d: α ↦ the hyperplane
/// −2α·X + Σαᵢ² = 0. A point x lies on H_α exactly when α lies on the
/// sphere centered x through the origin. Injective on (normal, offset)
/// tuples; errors when the origin is present.
pub fn sphere_dual(points: &PointSet) -> Result<DualHyperplanes, IncidenceError> {
    let f = points.field();
    let two = f.elem(2);
    let mut pairs = Vec::with_capacity(points.len());
    for q in points.iter() {
        if q.is_origin() {
            return Err(IncidenceError::OriginPresent);
        }
        let normal: Vec<Fp> = q.coords().iter().map(|&c| -(two * c)).collect();
        let mut norm2 = f.zero();
        for &c in q.coords() {
            norm2 += c * c;
        }
        let h = Hyperplane::new(normal, norm2).expect("nonzero point, odd p");
        pairs.push((q.clone(), h));
    }
    Ok(DualHyperplanes {
        pairs,
        excluded: Vec::new(),
    })
}

/// The center of a circle through the origin (its dual point), when the
/// circle does pass through the origin.
pub fn circle_dual_point(c: &Circle) -> Option<AffinePoint> {
    let (a, b) = (c.center().x(), c.center().y());
    if (a * a + b * b - c.r()).is_zero() {
        Some(c.center().clone())
    } else {
        None
    }
}

fn require_planar(points: &PointSet) -> Result<(), IncidenceError> {
    if points.dim() != 2 {
        return Err(IncidenceError::Dimension {
            expected: 2,
            got: points.dim(),
        });
    }
    Ok(())
}
