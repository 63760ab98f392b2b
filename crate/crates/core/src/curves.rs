//! Conics over F_p and their distinguished subfamilies: circles, parabolas,
//! hyperbolas, Möbius-transformation graphs, and spheres in higher dimension.
//!
//! A conic is the zero set of aX² + bXY + cY² + dXZ + eYZ + fZ² in PG(2, p),
//! stored as the canonical coefficient vector (first nonzero coefficient 1).
//! Equality of conics means equality of equations up to scale — two distinct
//! equations are distinct conics even if they happen to share every F_p
//! point, which can occur only for tiny p.

use crate::field::{Fp, Matrix, PrimeField};
use crate::proj::{collinear_affine, AffinePoint, ProjPoint, ProjTransform};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CurveError {
    #[error("all six conic coefficients are zero")]
    ZeroConic,
    #[error("a circle needs a nonzero squared radius")]
    ZeroRadius,
    #[error("a parabola needs a nonzero leading coefficient")]
    ZeroLeadingCoeff,
    #[error("a hyperbola needs a nonzero product constant")]
    ZeroProduct,
    #[error("Möbius coefficients must satisfy ad − bc ≠ 0")]
    SingularMobius,
    #[error("the graph of an affine map (c = 0) is a line, not a conic")]
    AffineMobius,
    #[error("conic is degenerate, so it is not a Möbius graph")]
    DegenerateConic,
    #[error("conic misses [0:1:0] or [1:0:0], so it is not a Möbius graph")]
    MissingInfinityPoints,
    #[error("expected exactly 5 points, got {0}")]
    FivePointArity(usize),
    #[error("the five points must be pairwise distinct")]
    DuplicatePoints,
    #[error("points must be planar (dimension 2)")]
    NotPlanar,
}

/// How a conic sits in the plane. For nondegenerate conics the kind is read
/// off the number of points at infinity (0 / 1 / 2).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConicKind {
    Ellipse,
    Parabola,
    Hyperbola,
    Degenerate,
}

/// Classification report: kind, rank of the symmetric coefficient matrix,
/// and the exact number of points at infinity.
///
/// `infinity_points` is in {0, 1, 2} whenever the quadratic part is nonzero
/// (always true for rank 3); a degenerate conic containing the whole line at
/// infinity has p + 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConicClass {
    pub kind: ConicKind,
    pub rank: usize,
    pub infinity_points: usize,
}

/// A conic: canonical coefficients (a, b, c, d, e, f) of
/// aX² + bXY + cY² + dXZ + eYZ + fZ².
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Conic {
    c: [Fp; 6],
}

impl fmt::Debug for Conic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Conic[{},{},{},{},{},{}]",
            self.c[0].value(),
            self.c[1].value(),
            self.c[2].value(),
            self.c[3].value(),
            self.c[4].value(),
            self.c[5].value()
        )
    }
}

impl Conic {
    /// Canonicalizes the coefficient vector; errors when all six are zero.
    pub fn new(a: Fp, b: Fp, c: Fp, d: Fp, e: Fp, f: Fp) -> Result<Conic, CurveError> {
        let coeffs = [a, b, c, d, e, f];
        let lead = coeffs
            .iter()
            .copied()
            .find(|x| !x.is_zero())
            .ok_or(CurveError::ZeroConic)?;
        let inv = lead.inverse().unwrap();
        Ok(Conic {
            c: coeffs.map(|x| x * inv),
        })
    }

    pub fn coeffs(&self) -> [Fp; 6] {
        self.c
    }

    pub fn field(&self) -> PrimeField {
        self.c[0].field()
    }

    /// a x² + b xy + c y² + d x + e y + f.
    pub fn eval_affine(&self, x: Fp, y: Fp) -> Fp {
        let [a, b, c, d, e, f] = self.c;
        a * x * x + b * x * y + c * y * y + d * x + e * y + f
    }

    pub fn eval_proj(&self, pt: &ProjPoint) -> Fp {
        let [a, b, c, d, e, f] = self.c;
        let (x, y, z) = (pt.x(), pt.y(), pt.z());
        a * x * x + b * x * y + c * y * y + d * x * z + e * y * z + f * z * z
    }

    pub fn contains_affine(&self, pt: &AffinePoint) -> bool {
        self.eval_affine(pt.x(), pt.y()).is_zero()
    }

    pub fn contains_proj(&self, pt: &ProjPoint) -> bool {
        self.eval_proj(pt).is_zero()
    }

    /// The symmetric 3×3 coefficient matrix (characteristic ≠ 2 lets us halve
    /// the cross terms).
    pub fn sym_matrix(&self) -> Matrix {
        let f = self.field();
        let inv2 = f.elem(2).inverse().unwrap();
        let [a, b, c, d, e, ff] = self.c;
        Matrix::from_rows(&[
            vec![a, b * inv2, d * inv2],
            vec![b * inv2, c, e * inv2],
            vec![d * inv2, e * inv2, ff],
        ])
        .unwrap()
    }

    pub fn rank(&self) -> usize {
        self.sym_matrix().rank()
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.sym_matrix().det().is_zero()
    }

    /// The conic's points on the line Z = 0, sorted and deduplicated.
    pub fn points_at_infinity(&self) -> Vec<ProjPoint> {
        let f = self.field();
        let [a, b, c, ..] = self.c;
        if a.is_zero() && b.is_zero() && c.is_zero() {
            // Quadratic part vanishes: the whole line at infinity is on the conic.
            return ProjPoint::enumerate(f)
                .into_iter()
                .filter(|q| q.is_infinite())
                .collect();
        }
        let mut out = Vec::new();
        if a.is_zero() {
            out.push(ProjPoint::infinity_x(f));
        }
        // Points [x : 1 : 0] solve a x² + b x + c = 0.
        if !a.is_zero() {
            let disc = b * b - f.elem(4) * a * c;
            if let Some(r) = disc.sqrt() {
                let inv = (f.elem(2) * a).inverse().unwrap();
                let x1 = (-b + r) * inv;
                let x2 = (-b - r) * inv;
                out.push(ProjPoint::new(x1, f.one(), f.zero()).unwrap());
                if x1 != x2 {
                    out.push(ProjPoint::new(x2, f.one(), f.zero()).unwrap());
                }
            }
        } else if !b.is_zero() {
            let x = -c * b.inverse().unwrap();
            out.push(ProjPoint::new(x, f.one(), f.zero()).unwrap());
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn classify(&self) -> ConicClass {
        let rank = self.rank();
        let infinity_points = self.points_at_infinity().len();
        let kind = if rank < 3 {
            ConicKind::Degenerate
        } else {
            match infinity_points {
                0 => ConicKind::Ellipse,
                1 => ConicKind::Parabola,
                2 => ConicKind::Hyperbola,
                n => unreachable!("nondegenerate conic with {n} points at infinity"),
            }
        };
        ConicClass {
            kind,
            rank,
            infinity_points,
        }
    }

    /// All affine points, by solving the fiber quadratic over each x.
    /// Exact for degenerate conics too (vertical-line fibers included).
    pub fn enumerate_affine(&self) -> Vec<AffinePoint> {
        let f = self.field();
        let p = f.p();
        let [a, b, c, d, e, ff] = self.c;
        let mut out = Vec::new();
        for xv in 0..p {
            let x = f.elem(xv);
            // c·y² + (b·x + e)·y + (a·x² + d·x + f) = 0
            let qa = c;
            let qb = b * x + e;
            let qc = a * x * x + d * x + ff;
            if !qa.is_zero() {
                let disc = qb * qb - f.elem(4) * qa * qc;
                if let Some(r) = disc.sqrt() {
                    let inv = (f.elem(2) * qa).inverse().unwrap();
                    let y1 = (-qb + r) * inv;
                    let y2 = (-qb - r) * inv;
                    out.push(AffinePoint::new(vec![x, y1]));
                    if y1 != y2 {
                        out.push(AffinePoint::new(vec![x, y2]));
                    }
                }
            } else if !qb.is_zero() {
                let y = -qc * qb.inverse().unwrap();
                out.push(AffinePoint::new(vec![x, y]));
            } else if qc.is_zero() {
                for yv in 0..p {
                    out.push(AffinePoint::new(vec![x, f.elem(yv)]));
                }
            }
        }
        out.sort();
        out
    }

    /// All projective points (affine points plus points at infinity).
    pub fn enumerate_projective(&self) -> Vec<ProjPoint> {
        let mut out: Vec<ProjPoint> = self
            .enumerate_affine()
            .iter()
            .map(ProjPoint::from_affine)
            .collect();
        out.extend(self.points_at_infinity());
        out.sort();
        out
    }

    /// The unique conic through five planar points in general position.
    ///
    /// Errors on arity or duplicate points; returns `None` when some three
    /// points are collinear. Otherwise the 5×6 linear system has a
    /// one-dimensional kernel and the resulting conic is nondegenerate.
    pub fn through_five(pts: &[AffinePoint]) -> Result<Option<Conic>, CurveError> {
        if pts.len() != 5 {
            return Err(CurveError::FivePointArity(pts.len()));
        }
        if pts.iter().any(|p| p.dim() != 2) {
            return Err(CurveError::NotPlanar);
        }
        for i in 0..5 {
            for j in i + 1..5 {
                if pts[i] == pts[j] {
                    return Err(CurveError::DuplicatePoints);
                }
            }
        }
        for i in 0..5 {
            for j in i + 1..5 {
                for k in j + 1..5 {
                    if collinear_affine(&pts[i], &pts[j], &pts[k]) {
                        return Ok(None);
                    }
                }
            }
        }
        let f = pts[0].field();
        let rows: Vec<Vec<Fp>> = pts
            .iter()
            .map(|pt| {
                let (x, y) = (pt.x(), pt.y());
                vec![x * x, x * y, y * y, x, y, f.one()]
            })
            .collect();
        let m = Matrix::from_rows(&rows).unwrap();
        let ns = m.nullspace();
        // Five points, no three collinear: two distinct conics through them
        // would share a component or violate Bézout, so the kernel is a line.
        assert_eq!(ns.len(), 1, "general-position points determine one conic");
        let v = &ns[0];
        let conic = Conic::new(v[0], v[1], v[2], v[3], v[4], v[5]).expect("kernel vector nonzero");
        debug_assert!(conic.is_nondegenerate());
        Ok(Some(conic))
    }

    /// Image conic under a projective transformation: x on C iff T(x) on the
    /// result (congruence Q ↦ (M⁻¹)ᵀ Q M⁻¹).
    pub fn transformed(&self, t: &ProjTransform) -> Conic {
        let minv = t.matrix().inverse().expect("transform matrix invertible");
        let q = self.sym_matrix();
        let qp = minv.transpose().mul(&q).mul(&minv);
        let two = self.field().elem(2);
        Conic::new(
            qp[(0, 0)],
            two * qp[(0, 1)],
            qp[(1, 1)],
            two * qp[(0, 2)],
            two * qp[(1, 2)],
            qp[(2, 2)],
        )
        .expect("congruent image of a nonzero form is nonzero")
    }
}

/// A Möbius transformation x ↦ (ax + b)/(cx + d) with ad − bc ≠ 0, stored
/// canonically (first nonzero of (a, b, c, d) scaled to 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mobius {
    a: Fp,
    b: Fp,
    c: Fp,
    d: Fp,
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Mobius[({}x+{})/({}x+{})]",
            self.a.value(),
            self.b.value(),
            self.c.value(),
            self.d.value()
        )
    }
}

impl Mobius {
    pub fn new(a: Fp, b: Fp, c: Fp, d: Fp) -> Result<Mobius, CurveError> {
        if (a * d - b * c).is_zero() {
            return Err(CurveError::SingularMobius);
        }
        let lead = [a, b, c, d].into_iter().find(|x| !x.is_zero()).unwrap();
        let inv = lead.inverse().unwrap();
        Ok(Mobius {
            a: a * inv,
            b: b * inv,
            c: c * inv,
            d: d * inv,
        })
    }

    pub fn coeffs(&self) -> [Fp; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    pub fn det(&self) -> Fp {
        self.a * self.d - self.b * self.c
    }

    /// True when c = 0, i.e. the map is affine and its graph is a line.
    pub fn is_affine(&self) -> bool {
        self.c.is_zero()
    }

    /// Evaluate; `None` exactly at the pole x = −d/c.
    pub fn apply(&self, x: Fp) -> Option<Fp> {
        let den = self.c * x + self.d;
        if den.is_zero() {
            return None;
        }
        Some((self.a * x + self.b) * den.inverse().unwrap())
    }

    /// The affine graph {(x, m(x)) : cx + d ≠ 0}, sorted.
    pub fn graph(&self) -> Vec<AffinePoint> {
        let f = self.field();
        let mut out = Vec::new();
        for xv in 0..f.p() {
            let x = f.elem(xv);
            if let Some(y) = self.apply(x) {
                out.push(AffinePoint::new(vec![x, y]));
            }
        }
        out
    }

    /// Does (x, y) lie on the graph? Equivalent to y(cx + d) = ax + b, which
    /// is never satisfied at the pole because ad − bc ≠ 0.
    pub fn graph_contains(&self, pt: &AffinePoint) -> bool {
        let (x, y) = (pt.x(), pt.y());
        (y * (self.c * x + self.d) - (self.a * x + self.b)).is_zero()
    }

    /// The conic cXY + dYZ − aXZ − bZ² whose affine points are exactly the
    /// graph. Errors when c = 0 (the graph is a line, and the would-be conic
    /// is degenerate).
    pub fn to_conic(&self) -> Result<Conic, CurveError> {
        if self.c.is_zero() {
            return Err(CurveError::AffineMobius);
        }
        let f = self.field();
        Ok(Conic::new(f.zero(), self.c, f.zero(), -self.a, self.d, -self.b)
            .expect("c is nonzero"))
    }

    /// Inverse direction of the graph equivalence: a nondegenerate conic
    /// through both [1:0:0] and [0:1:0] is the graph of a unique Möbius map.
    pub fn from_conic(conic: &Conic) -> Result<Mobius, CurveError> {
        if !conic.is_nondegenerate() {
            return Err(CurveError::DegenerateConic);
        }
        let [a, b, c, d, e, f] = conic.coeffs();
        // [1:0:0] on the conic forces a = 0; [0:1:0] forces c = 0.
        if !a.is_zero() || !c.is_zero() {
            return Err(CurveError::MissingInfinityPoints);
        }
        debug_assert!(!b.is_zero(), "rank-3 conic with a = c = 0 has b ≠ 0");
        let binv = b.inverse().unwrap();
        // Normalized: XY + d'XZ + e'YZ + f'Z², graph of y = (−d'x − f')/(x + e').
        let (dn, en, fn_) = (d * binv, e * binv, f * binv);
        Mobius::new(-dn, -fn_, b.field().one(), en)
    }

    /// All Möbius transformations over the field (canonical forms),
    /// p³ − p of them.
    pub fn enumerate(field: PrimeField) -> Vec<Mobius> {
        let p = field.p();
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    for d in 0..p {
                        let m = Mobius {
                            a: field.elem(a),
                            b: field.elem(b),
                            c: field.elem(c),
                            d: field.elem(d),
                        };
                        if m.is_canonical() && !m.det().is_zero() {
                            out.push(m);
                        }
                    }
                }
            }
        }
        out
    }

    fn is_canonical(&self) -> bool {
        [self.a, self.b, self.c, self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .map(|x| x.value() == 1)
            .unwrap_or(false)
    }
}

/// A circle (x − c₁)² + (y − c₂)² = r with r ≠ 0 (r is the squared radius;
/// nonzero keeps the conic nondegenerate).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Circle {
    center: AffinePoint,
    r: Fp,
}

impl Circle {
    pub fn new(center: AffinePoint, r: Fp) -> Result<Circle, CurveError> {
        if center.dim() != 2 {
            return Err(CurveError::NotPlanar);
        }
        if r.is_zero() {
            return Err(CurveError::ZeroRadius);
        }
        Ok(Circle { center, r })
    }

    pub fn center(&self) -> &AffinePoint {
        &self.center
    }

    pub fn r(&self) -> Fp {
        self.r
    }

    pub fn field(&self) -> PrimeField {
        self.r.field()
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        let dx = pt.x() - self.center.x();
        let dy = pt.y() - self.center.y();
        (dx * dx + dy * dy - self.r).is_zero()
    }

    pub fn to_conic(&self) -> Conic {
        let f = self.r.field();
        let (a, b) = (self.center.x(), self.center.y());
        let two = f.elem(2);
        Conic::new(
            f.one(),
            f.zero(),
            f.one(),
            -(two * a),
            -(two * b),
            a * a + b * b - self.r,
        )
        .expect("leading coefficient is 1")
    }

    pub fn points(&self) -> Vec<AffinePoint> {
        self.to_conic().enumerate_affine()
    }
}

/// A parabola y = ax² + bx + c with a ≠ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parabola {
    a: Fp,
    b: Fp,
    c: Fp,
}

impl Parabola {
    pub fn new(a: Fp, b: Fp, c: Fp) -> Result<Parabola, CurveError> {
        if a.is_zero() {
            return Err(CurveError::ZeroLeadingCoeff);
        }
        Ok(Parabola { a, b, c })
    }

    pub fn coeffs(&self) -> [Fp; 3] {
        [self.a, self.b, self.c]
    }

    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        let x = pt.x();
        (self.a * x * x + self.b * x + self.c - pt.y()).is_zero()
    }

    pub fn to_conic(&self) -> Conic {
        let f = self.a.field();
        Conic::new(self.a, f.zero(), f.zero(), self.b, -f.one(), self.c)
            .expect("leading coefficient nonzero")
    }

    /// Exactly p points, one per x.
    pub fn points(&self) -> Vec<AffinePoint> {
        let f = self.a.field();
        (0..f.p())
            .map(|xv| {
                let x = f.elem(xv);
                AffinePoint::new(vec![x, self.a * x * x + self.b * x + self.c])
            })
            .collect()
    }
}

/// A hyperbola (x − a)(y − b) = c with c ≠ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperbola {
    a: Fp,
    b: Fp,
    c: Fp,
}

impl Hyperbola {
    pub fn new(a: Fp, b: Fp, c: Fp) -> Result<Hyperbola, CurveError> {
        if c.is_zero() {
            return Err(CurveError::ZeroProduct);
        }
        Ok(Hyperbola { a, b, c })
    }

    pub fn coeffs(&self) -> [Fp; 3] {
        [self.a, self.b, self.c]
    }

    pub fn field(&self) -> PrimeField {
        self.c.field()
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        ((pt.x() - self.a) * (pt.y() - self.b) - self.c).is_zero()
    }

    /// xy − bx − ay + (ab − c) = 0.
    pub fn to_conic(&self) -> Conic {
        let f = self.a.field();
        Conic::new(
            f.zero(),
            f.one(),
            f.zero(),
            -self.b,
            -self.a,
            self.a * self.b - self.c,
        )
        .expect("cross coefficient is 1")
    }

    /// Exactly p − 1 points, one per x ≠ a.
    pub fn points(&self) -> Vec<AffinePoint> {
        let f = self.a.field();
        (0..f.p())
            .filter_map(|xv| {
                let x = f.elem(xv);
                let dx = x - self.a;
                if dx.is_zero() {
                    return None;
                }
                Some(AffinePoint::new(vec![x, self.b + self.c * dx.inverse().unwrap()]))
            })
            .collect()
    }
}

/// A sphere Σ(xᵢ − cᵢ)² = r in F_p^d, d ≥ 2. r = 0 is allowed (isotropic
/// spheres are nonempty over finite fields).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sphere {
    center: AffinePoint,
    r: Fp,
}

impl Sphere {
    pub fn new(center: AffinePoint, r: Fp) -> Result<Sphere, CurveError> {
        if center.dim() < 2 {
            return Err(CurveError::NotPlanar);
        }
        Ok(Sphere { center, r })
    }

    pub fn center(&self) -> &AffinePoint {
        &self.center
    }

    pub fn r(&self) -> Fp {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        assert_eq!(pt.dim(), self.dim(), "dimension mismatch");
        let mut acc = -self.r;
        for (&x, &c) in pt.coords().iter().zip(self.center.coords()) {
            let d = x - c;
            acc += d * d;
        }
        acc.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use std::collections::HashSet;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    /// Every canonical conic over the field (one per projective class).
    fn all_conics(field: PrimeField) -> Vec<Conic> {
        let p = field.p();
        let mut out = Vec::new();
        // First nonzero coefficient pinned to 1.
        for lead in 0..6usize {
            let free = 5 - lead;
            let mut idx = vec![0u64; free];
            loop {
                let mut coeffs = vec![field.zero(); lead];
                coeffs.push(field.one());
                for &v in &idx {
                    coeffs.push(field.elem(v));
                }
                out.push(Conic {
                    c: [coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5]],
                });
                // Odometer increment.
                let mut i = 0;
                loop {
                    if i == free {
                        break;
                    }
                    idx[i] += 1;
                    if idx[i] < p {
                        break;
                    }
                    idx[i] = 0;
                    i += 1;
                }
                if i == free {
                    break;
                }
            }
        }
        out
    }

    #[test]
    fn conic_space_has_projective_count() {
        for p in [3u64, 5] {
            let n = all_conics(f(p)).len() as u64;
            assert_eq!(n, p.pow(5) + p.pow(4) + p.pow(3) + p.pow(2) + p + 1);
        }
    }

    #[test]
    fn classification_examples() {
        let f7 = f(7);
        let circle = Circle::new(AffinePoint::xy(f7, 1, 2), f7.elem(3)).unwrap();
        let cls = circle.to_conic().classify();
        assert_eq!(
            cls,
            ConicClass { kind: ConicKind::Ellipse, rank: 3, infinity_points: 0 },
            "p ≡ 3 (mod 4): circles have no points at infinity"
        );

        let f5 = f(5);
        let circle5 = Circle::new(AffinePoint::xy(f5, 0, 0), f5.elem(1)).unwrap();
        let cls5 = circle5.to_conic().classify();
        assert_eq!(
            cls5,
            ConicClass { kind: ConicKind::Hyperbola, rank: 3, infinity_points: 2 },
            "p ≡ 1 (mod 4): circles behave like hyperbolas"
        );

        let par = Parabola::new(f7.elem(2), f7.elem(1), f7.elem(5)).unwrap();
        assert_eq!(
            par.to_conic().classify(),
            ConicClass { kind: ConicKind::Parabola, rank: 3, infinity_points: 1 }
        );

        let hyp = Hyperbola::new(f7.elem(3), f7.elem(4), f7.elem(2)).unwrap();
        assert_eq!(
            hyp.to_conic().classify(),
            ConicClass { kind: ConicKind::Hyperbola, rank: 3, infinity_points: 2 }
        );

        // x² + y² = 0 over F_7: a single point, rank 2.
        let point_conic =
            Conic::new(f7.one(), f7.zero(), f7.one(), f7.zero(), f7.zero(), f7.zero()).unwrap();
        let cls = point_conic.classify();
        assert_eq!(cls.kind, ConicKind::Degenerate);
        assert_eq!(cls.rank, 2);
        assert_eq!(cls.infinity_points, 0);
        assert_eq!(point_conic.enumerate_affine().len(), 1);

        // xy = 0: two crossing lines, two points at infinity.
        let cross = Conic::new(f7.zero(), f7.one(), f7.zero(), f7.zero(), f7.zero(), f7.zero())
            .unwrap();
        assert_eq!(
            cross.classify(),
            ConicClass { kind: ConicKind::Degenerate, rank: 2, infinity_points: 2 }
        );

        // x² = 0: a double line, rank 1.
        let dbl = Conic::new(f7.one(), f7.zero(), f7.zero(), f7.zero(), f7.zero(), f7.zero())
            .unwrap();
        assert_eq!(dbl.classify().rank, 1);
        assert_eq!(dbl.classify().infinity_points, 1);

        // Vanishing quadratic part: x + 1 = 0 times the line at infinity.
        let degenerate_inf =
            Conic::new(f7.zero(), f7.zero(), f7.zero(), f7.one(), f7.zero(), f7.one()).unwrap();
        let cls = degenerate_inf.classify();
        assert_eq!(cls.kind, ConicKind::Degenerate);
        assert_eq!(cls.infinity_points, 8, "whole line at infinity is on the conic");
    }

    #[test]
    fn nondegenerate_conics_have_p_plus_1_points_small() {
        for p in [3u64, 5] {
            let field = f(p);
            for conic in all_conics(field) {
                if conic.is_nondegenerate() {
                    let pts = conic.enumerate_projective();
                    assert_eq!(pts.len() as u64, p + 1, "{conic:?}");
                    let set: HashSet<_> = pts.iter().collect();
                    assert_eq!(set.len() as u64, p + 1);
                }
            }
        }
    }

    #[test]
    fn enumeration_matches_grid_scan() {
        // Oracle: O(p²) brute-force scan, checked against the per-fiber solver.
        let field = f(101);
        let mut seed = 7u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            seed >> 33
        };
        let mut tested = 0;
        while tested < 100 {
            let coeffs: Vec<Fp> = (0..6).map(|_| field.elem(next())).collect();
            let Ok(conic) = Conic::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5])
            else {
                continue;
            };
            tested += 1;
            let fast: Vec<AffinePoint> = conic.enumerate_affine();
            let mut slow = Vec::new();
            for x in 0..101u64 {
                for y in 0..101 {
                    let pt = AffinePoint::xy(field, x, y);
                    if conic.contains_affine(&pt) {
                        slow.push(pt);
                    }
                }
            }
            assert_eq!(fast, slow, "{conic:?}");
        }
    }

    #[test]
    fn five_point_fit_examples() {
        let field = f(101);
        // Five points of y = x² recover exactly x² − y = 0.
        let pts: Vec<AffinePoint> = [0u64, 1, 2, 3, 4]
            .iter()
            .map(|&x| AffinePoint::xy(field, x, x * x))
            .collect();
        let conic = Conic::through_five(&pts).unwrap().unwrap();
        let expected = Parabola::new(field.one(), field.zero(), field.zero())
            .unwrap()
            .to_conic();
        assert_eq!(conic, expected);

        // Three collinear points: no conic in general position.
        let collinear_pts = vec![
            AffinePoint::xy(field, 0, 0),
            AffinePoint::xy(field, 1, 1),
            AffinePoint::xy(field, 2, 2),
            AffinePoint::xy(field, 3, 5),
            AffinePoint::xy(field, 4, 7),
        ];
        assert_eq!(Conic::through_five(&collinear_pts).unwrap(), None);

        // Duplicates are a usage error.
        let dup = vec![pts[0].clone(), pts[0].clone(), pts[1].clone(), pts[2].clone(), pts[3].clone()];
        assert_eq!(Conic::through_five(&dup).unwrap_err(), CurveError::DuplicatePoints);
        assert!(matches!(
            Conic::through_five(&pts[0..4]),
            Err(CurveError::FivePointArity(4))
        ));
    }

    #[test]
    fn five_point_fit_roundtrip_random() {
        // Draw a nondegenerate conic, pick 5 of its points in general
        // position, refit, and compare canonical forms.
        let field = f(101);
        let mut seed = 99u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            seed >> 33
        };
        let mut done = 0;
        while done < 200 {
            let coeffs: Vec<Fp> = (0..6).map(|_| field.elem(next())).collect();
            let Ok(conic) = Conic::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5])
            else {
                continue;
            };
            if !conic.is_nondegenerate() {
                continue;
            }
            let pts = conic.enumerate_affine();
            if pts.len() < 5 {
                continue;
            }
            // Points on a nondegenerate conic are automatically in general
            // position (a line meets the conic at most twice).
            let sample: Vec<AffinePoint> = (0..5)
                .map(|i| pts[(i * pts.len()) / 7 % pts.len()].clone())
                .collect();
            let mut distinct = sample.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() < 5 {
                continue;
            }
            done += 1;
            let refit = Conic::through_five(&sample).unwrap().unwrap();
            assert_eq!(refit, conic);
        }
    }

    #[test]
    fn mobius_group_order_and_conic_subfamily() {
        // |PGL₂(F_p)| = p³ − p; those with c ≠ 0 number p²(p − 1), matching
        // the graph-conic family.
        for p in [3u64, 5] {
            let field = f(p);
            let all = Mobius::enumerate(field);
            assert_eq!(all.len() as u64, p * p * p - p);
            let with_pole = all.iter().filter(|m| !m.is_affine()).count() as u64;
            assert_eq!(with_pole, p * p * (p - 1));
        }
    }

    #[test]
    fn mobius_conic_roundtrip_exhaustive() {
        for p in [3u64, 5] {
            let field = f(p);
            for m in Mobius::enumerate(field) {
                if m.is_affine() {
                    assert_eq!(m.to_conic().unwrap_err(), CurveError::AffineMobius);
                    continue;
                }
                let conic = m.to_conic().unwrap();
                assert!(conic.is_nondegenerate(), "{m:?}");
                assert!(conic.contains_proj(&ProjPoint::infinity_x(field)));
                assert!(conic.contains_proj(&ProjPoint::infinity_y(field)));
                // Affine points of the conic are exactly the graph.
                assert_eq!(conic.enumerate_affine(), {
                    let mut g = m.graph();
                    g.sort();
                    g
                });
                assert_eq!(Mobius::from_conic(&conic).unwrap(), m);
            }
        }
    }

    #[test]
    fn mobius_from_conic_rejections() {
        let f7 = f(7);
        // Degenerate: xy = 0.
        let cross =
            Conic::new(f7.zero(), f7.one(), f7.zero(), f7.zero(), f7.zero(), f7.zero()).unwrap();
        assert_eq!(Mobius::from_conic(&cross).unwrap_err(), CurveError::DegenerateConic);
        // Nondegenerate but missing the two infinity points: a circle at p ≡ 3.
        let circ = Circle::new(AffinePoint::xy(f7, 0, 0), f7.one()).unwrap().to_conic();
        assert_eq!(
            Mobius::from_conic(&circ).unwrap_err(),
            CurveError::MissingInfinityPoints
        );
    }

    #[test]
    fn mobius_pole_and_values() {
        let f7 = f(7);
        // x ↦ (2x + 3)/(x + 4): pole at x = 3.
        let m = Mobius::new(f7.elem(2), f7.elem(3), f7.elem(1), f7.elem(4)).unwrap();
        assert_eq!(m.apply(f7.elem(3)), None);
        for x in 0..7u64 {
            if x == 3 {
                continue;
            }
            let y = m.apply(f7.elem(x)).unwrap();
            assert!(m.graph_contains(&AffinePoint::xy(f7, x, y.value())));
        }
        assert_eq!(m.graph().len(), 6);
        assert_eq!(
            Mobius::new(f7.elem(2), f7.elem(4), f7.elem(1), f7.elem(2)).unwrap_err(),
            CurveError::SingularMobius
        );
    }

    #[test]
    fn special_family_membership_agrees_with_conic() {
        let f7 = f(7);
        let f5 = f(5);
        for (cx, cy, r) in [(0u64, 0u64, 1u64), (3, 4, 2), (1, 6, 6)] {
            let c7 = Circle::new(AffinePoint::xy(f7, cx, cy), f7.elem(r)).unwrap();
            let conic = c7.to_conic();
            for x in 0..7u64 {
                for y in 0..7 {
                    let pt = AffinePoint::xy(f7, x, y);
                    assert_eq!(c7.contains(&pt), conic.contains_affine(&pt));
                }
            }
        }
        let par = Parabola::new(f5.elem(2), f5.elem(0), f5.elem(3)).unwrap();
        let pc = par.to_conic();
        let hyp = Hyperbola::new(f5.elem(1), f5.elem(2), f5.elem(3)).unwrap();
        let hc = hyp.to_conic();
        for x in 0..5u64 {
            for y in 0..5 {
                let pt = AffinePoint::xy(f5, x, y);
                assert_eq!(par.contains(&pt), pc.contains_affine(&pt));
                assert_eq!(hyp.contains(&pt), hc.contains_affine(&pt));
            }
        }
    }

    #[test]
    fn special_family_point_counts() {
        let f7 = f(7);
        let f5 = f(5);
        // Circles: p + 1 affine points when p ≡ 3 (mod 4), p − 1 when p ≡ 1.
        let c7 = Circle::new(AffinePoint::xy(f7, 2, 5), f7.elem(1)).unwrap();
        assert_eq!(c7.points().len(), 8);
        let c5 = Circle::new(AffinePoint::xy(f5, 0, 0), f5.elem(1)).unwrap();
        assert_eq!(c5.points().len(), 4);
        // Parabolas: exactly p. Hyperbolas: exactly p − 1.
        let par = Parabola::new(f7.elem(1), f7.elem(0), f7.elem(0)).unwrap();
        assert_eq!(par.points().len(), 7);
        assert_eq!(par.to_conic().enumerate_affine().len(), 7);
        let hyp = Hyperbola::new(f7.elem(0), f7.elem(0), f7.elem(1)).unwrap();
        assert_eq!(hyp.points().len(), 6);
        assert_eq!(hyp.to_conic().enumerate_affine().len(), 6);
    }

    #[test]
    fn constructor_rejections() {
        let f7 = f(7);
        assert_eq!(
            Circle::new(AffinePoint::xy(f7, 0, 0), f7.zero()).unwrap_err(),
            CurveError::ZeroRadius
        );
        assert_eq!(
            Parabola::new(f7.zero(), f7.one(), f7.one()).unwrap_err(),
            CurveError::ZeroLeadingCoeff
        );
        assert_eq!(
            Hyperbola::new(f7.one(), f7.one(), f7.zero()).unwrap_err(),
            CurveError::ZeroProduct
        );
        assert!(Conic::new(f7.zero(), f7.zero(), f7.zero(), f7.zero(), f7.zero(), f7.zero())
            .is_err());
    }

    #[test]
    fn transformed_conic_preserves_incidence_and_rank() {
        let field = f(11);
        let mut seed = 4242u64;
        let mut next = move || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            seed >> 33
        };
        let pts = ProjPoint::enumerate(field);
        let mut done = 0;
        while done < 40 {
            let m = Matrix::from_rows(&[
                vec![field.elem(next()), field.elem(next()), field.elem(next())],
                vec![field.elem(next()), field.elem(next()), field.elem(next())],
                vec![field.elem(next()), field.elem(next()), field.elem(next())],
            ])
            .unwrap();
            let Ok(t) = ProjTransform::new(m) else { continue };
            let coeffs: Vec<Fp> = (0..6).map(|_| field.elem(next())).collect();
            let Ok(conic) = Conic::new(coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5])
            else {
                continue;
            };
            done += 1;
            let image = conic.transformed(&t);
            assert_eq!(conic.rank(), image.rank());
            for pt in &pts {
                assert_eq!(conic.contains_proj(pt), image.contains_proj(&t.apply(pt)));
            }
        }
    }

    #[test]
    fn sphere_membership() {
        let f7 = f(7);
        let s = Sphere::new(
            AffinePoint::new(vec![f7.elem(1), f7.elem(2), f7.elem(3)]),
            f7.elem(0),
        )
        .unwrap();
        // Isotropic sphere of radius 0 contains more than its center over F_7:
        // (1,2,3) + (1,2,3) has norm 1+4+9 = 14 ≡ 0.
        assert!(s.contains(&AffinePoint::new(vec![f7.elem(2), f7.elem(4), f7.elem(6)])));
        assert!(s.contains(&AffinePoint::new(vec![f7.elem(1), f7.elem(2), f7.elem(3)])));
        // (1,2,4) differs by (0,0,1), norm 1 ≠ 0.
        assert!(!s.contains(&AffinePoint::new(vec![f7.elem(1), f7.elem(2), f7.elem(4)])));
        assert!(Sphere::new(AffinePoint::new(vec![f7.elem(1)]), f7.one()).is_err());
    }
}
