//! The projective plane PG(2, p) — points, lines, and projective
//! transformations — together with plain affine points and affine hyperplanes
//! in arbitrary dimension.
//!
//! Projective points and lines are stored in canonical form (a distinguished
//! scalar multiple), so derived equality and hashing mean genuine projective
//! equality.

use crate::field::{Fp, Matrix, PrimeField};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProjError {
    #[error("the zero vector does not represent a projective object")]
    ZeroVector,
    #[error("the two points must be distinct")]
    SamePoint,
    #[error("transformation matrix is singular")]
    Singular,
    #[error("expected dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// A point of affine space F_p^d. Coordinates are canonical residues;
/// ordering is lexicographic, so sorted point lists are deterministic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePoint {
    coords: Vec<Fp>,
}

impl fmt::Debug for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coords.iter().map(|c| c.value().to_string()).collect();
        write!(f, "({})", cs.join(", "))
    }
}

impl AffinePoint {
    pub fn new(coords: Vec<Fp>) -> AffinePoint {
        assert!(!coords.is_empty(), "a point needs at least one coordinate");
        debug_assert!(coords.windows(2).all(|w| w[0].p() == w[1].p()));
        AffinePoint { coords }
    }

    /// Planar point from raw residues.
    pub fn xy(field: PrimeField, x: u64, y: u64) -> AffinePoint {
        AffinePoint::new(vec![field.elem(x), field.elem(y)])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn field(&self) -> PrimeField {
        self.coords[0].field()
    }

    pub fn coords(&self) -> &[Fp] {
        &self.coords
    }

    /// First coordinate (planar convention).
    pub fn x(&self) -> Fp {
        self.coords[0]
    }

    /// Second coordinate (planar convention).
    pub fn y(&self) -> Fp {
        self.coords[1]
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Componentwise difference (dimensions must match).
    pub fn sub(&self, other: &AffinePoint) -> AffinePoint {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        AffinePoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a - b)
                .collect(),
        )
    }

    /// Componentwise sum (dimensions must match).
    pub fn add(&self, other: &AffinePoint) -> AffinePoint {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        AffinePoint::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| a + b)
                .collect(),
        )
    }
}

/// A point of the projective plane PG(2, p), stored with its last nonzero
/// coordinate scaled to 1 (so equality and hashing are projective).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    x: Fp,
    y: Fp,
    z: Fp,
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}:{}]", self.x.value(), self.y.value(), self.z.value())
    }
}

impl ProjPoint {
    /// Canonicalizes a homogeneous triple; errors on (0,0,0).
    pub fn new(x: Fp, y: Fp, z: Fp) -> Result<ProjPoint, ProjError> {
        let scale = if !z.is_zero() {
            z
        } else if !y.is_zero() {
            y
        } else if !x.is_zero() {
            x
        } else {
            return Err(ProjError::ZeroVector);
        };
        let inv = scale.inverse().unwrap();
        Ok(ProjPoint {
            x: x * inv,
            y: y * inv,
            z: z * inv,
        })
    }

    pub fn from_affine(pt: &AffinePoint) -> ProjPoint {
        assert_eq!(pt.dim(), 2, "projective plane embeds planar points");
        let one = pt.field().one();
        ProjPoint {
            x: pt.x(),
            y: pt.y(),
            z: one,
        }
    }

    pub fn x(&self) -> Fp {
        self.x
    }

    pub fn y(&self) -> Fp {
        self.y
    }

    pub fn z(&self) -> Fp {
        self.z
    }

    pub fn field(&self) -> PrimeField {
        self.x.field()
    }

    pub fn is_infinite(&self) -> bool {
        self.z.is_zero()
    }

    /// The affine part, when there is one.
    pub fn to_affine(&self) -> Option<AffinePoint> {
        if self.is_infinite() {
            None
        } else {
            Some(AffinePoint::new(vec![self.x, self.y]))
        }
    }

    /// The point [0:1:0] (vertical direction).
    pub fn infinity_y(field: PrimeField) -> ProjPoint {
        ProjPoint {
            x: field.zero(),
            y: field.one(),
            z: field.zero(),
        }
    }

    /// The point [1:0:0] (horizontal direction).
    pub fn infinity_x(field: PrimeField) -> ProjPoint {
        ProjPoint {
            x: field.one(),
            y: field.zero(),
            z: field.zero(),
        }
    }

    /// All p² + p + 1 points, in lexicographic order of canonical triples.
    pub fn enumerate(field: PrimeField) -> Vec<ProjPoint> {
        let p = field.p();
        let mut out = Vec::with_capacity((p * p + p + 1) as usize);
        for x in 0..p {
            for y in 0..p {
                for z in 0..p {
                    let candidate = ProjPoint {
                        x: field.elem(x),
                        y: field.elem(y),
                        z: field.elem(z),
                    };
                    if (x, y, z) != (0, 0, 0) && candidate.is_canonical() {
                        out.push(candidate);
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn is_canonical(&self) -> bool {
        if !self.z.is_zero() {
            self.z.value() == 1
        } else if !self.y.is_zero() {
            self.y.value() == 1
        } else {
            self.x.value() == 1
        }
    }
}

/// A line of PG(2, p): coefficients (a, b, c) of aX + bY + cZ = 0, stored
/// with the first nonzero coefficient scaled to 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Line {
    a: Fp,
    b: Fp,
    c: Fp,
}

impl fmt::Debug for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}:{}:{}>", self.a.value(), self.b.value(), self.c.value())
    }
}

impl Line {
    /// Canonicalizes the coefficient triple; errors on (0,0,0).
    pub fn new(a: Fp, b: Fp, c: Fp) -> Result<Line, ProjError> {
        let scale = if !a.is_zero() {
            a
        } else if !b.is_zero() {
            b
        } else if !c.is_zero() {
            c
        } else {
            return Err(ProjError::ZeroVector);
        };
        let inv = scale.inverse().unwrap();
        Ok(Line {
            a: a * inv,
            b: b * inv,
            c: c * inv,
        })
    }

    pub fn a(&self) -> Fp {
        self.a
    }

    pub fn b(&self) -> Fp {
        self.b
    }

    pub fn c(&self) -> Fp {
        self.c
    }

    pub fn field(&self) -> PrimeField {
        self.a.field()
    }

    /// The line Z = 0.
    pub fn at_infinity(field: PrimeField) -> Line {
        Line {
            a: field.zero(),
            b: field.zero(),
            c: field.one(),
        }
    }

    pub fn is_at_infinity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn contains(&self, pt: &ProjPoint) -> bool {
        (self.a * pt.x() + self.b * pt.y() + self.c * pt.z()).is_zero()
    }

    pub fn contains_affine(&self, pt: &AffinePoint) -> bool {
        (self.a * pt.x() + self.b * pt.y() + self.c).is_zero()
    }

    /// The unique line through two distinct points (cross product of
    /// representatives); errors when the points coincide.
    pub fn through(p: &ProjPoint, q: &ProjPoint) -> Result<Line, ProjError> {
        if p == q {
            return Err(ProjError::SamePoint);
        }
        let a = p.y() * q.z() - p.z() * q.y();
        let b = p.z() * q.x() - p.x() * q.z();
        let c = p.x() * q.y() - p.y() * q.x();
        Line::new(a, b, c).map_err(|_| ProjError::SamePoint)
    }

    /// The affine line through two distinct planar points.
    pub fn through_affine(p: &AffinePoint, q: &AffinePoint) -> Result<Line, ProjError> {
        Line::through(&ProjPoint::from_affine(p), &ProjPoint::from_affine(q))
    }

    /// All p² + p + 1 lines.
    pub fn enumerate(field: PrimeField) -> Vec<Line> {
        ProjPoint::enumerate(field)
            .into_iter()
            .map(|pt| Line::new(pt.x(), pt.y(), pt.z()).unwrap())
            .collect()
    }
}

/// Are three projective points collinear? (3×3 determinant test.)
pub fn collinear(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> bool {
    let det = p.x() * (q.y() * r.z() - q.z() * r.y()) - p.y() * (q.x() * r.z() - q.z() * r.x())
        + p.z() * (q.x() * r.y() - q.y() * r.x());
    det.is_zero()
}

/// Are three planar affine points collinear?
pub fn collinear_affine(p: &AffinePoint, q: &AffinePoint, r: &AffinePoint) -> bool {
    collinear(
        &ProjPoint::from_affine(p),
        &ProjPoint::from_affine(q),
        &ProjPoint::from_affine(r),
    )
}

/// An affine hyperplane in F_p^d: the solution set of n·x + offset = 0.
///
/// Equality is componentwise on (normal, offset) — deliberately *not* up to
/// scalar — because the sphere duality produces hyperplanes whose defining
/// tuples matter (distinct sphere centers can give the same solution set when
/// the normal is isotropic). Use [`Hyperplane::canonical`] for set-level
/// deduplication.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hyperplane {
    normal: Vec<Fp>,
    offset: Fp,
}

impl fmt::Debug for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ns: Vec<String> = self.normal.iter().map(|c| c.value().to_string()).collect();
        write!(f, "H[{} | {}]", ns.join(", "), self.offset.value())
    }
}

impl Hyperplane {
    /// Errors when the normal vector is zero.
    pub fn new(normal: Vec<Fp>, offset: Fp) -> Result<Hyperplane, ProjError> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(ProjError::ZeroVector);
        }
        Ok(Hyperplane { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[Fp] {
        &self.normal
    }

    pub fn offset(&self) -> Fp {
        self.offset
    }

    pub fn contains(&self, pt: &AffinePoint) -> bool {
        assert_eq!(pt.dim(), self.dim(), "dimension mismatch");
        let mut acc = self.offset;
        for (&n, &x) in self.normal.iter().zip(pt.coords()) {
            acc += n * x;
        }
        acc.is_zero()
    }

    /// Scales so the first nonzero coefficient of (normal, offset) is 1:
    /// two hyperplanes with the same solution set get the same canonical
    /// form. Lossy for identity purposes (see type docs).
    pub fn canonical(&self) -> Hyperplane {
        let lead = self
            .normal
            .iter()
            .copied()
            .find(|c| !c.is_zero())
            .expect("normal is nonzero by construction");
        let inv = lead.inverse().unwrap();
        Hyperplane {
            normal: self.normal.iter().map(|&c| c * inv).collect(),
            offset: self.offset * inv,
        }
    }
}

/// An element of PGL(3, p) acting on PG(2, p), stored as an invertible 3×3
/// matrix scaled so its first nonzero entry (row-major) is 1.
#[derive(Clone, PartialEq, Eq)]
pub struct ProjTransform {
    m: Matrix,
}

impl fmt::Debug for ProjTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ProjTransform {:?}", self.m)
    }
}

impl ProjTransform {
    /// Wraps an invertible 3×3 matrix; errors when singular or mis-shaped.
    pub fn new(m: Matrix) -> Result<ProjTransform, ProjError> {
        if m.rows() != 3 || m.cols() != 3 {
            return Err(ProjError::Dimension {
                expected: 3,
                got: m.rows().max(m.cols()),
            });
        }
        if m.det().is_zero() {
            return Err(ProjError::Singular);
        }
        Ok(ProjTransform { m: canonical_scale(m) })
    }

    pub fn identity(field: PrimeField) -> ProjTransform {
        ProjTransform {
            m: Matrix::identity(field, 3),
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn field(&self) -> PrimeField {
        self.m.field()
    }

    pub fn apply(&self, pt: &ProjPoint) -> ProjPoint {
        let v = self.m.apply(&[pt.x(), pt.y(), pt.z()]);
        ProjPoint::new(v[0], v[1], v[2]).expect("invertible map keeps vectors nonzero")
    }

    /// Image of a planar affine point, unless it is sent to infinity.
    pub fn apply_affine(&self, pt: &AffinePoint) -> Option<AffinePoint> {
        self.apply(&ProjPoint::from_affine(pt)).to_affine()
    }

    /// self ∘ other (apply `other` first).
    pub fn compose(&self, other: &ProjTransform) -> ProjTransform {
        ProjTransform {
            m: canonical_scale(self.m.mul(&other.m)),
        }
    }

    pub fn inverse(&self) -> ProjTransform {
        ProjTransform {
            m: canonical_scale(self.m.inverse().expect("stored matrix is invertible")),
        }
    }

    /// Pushes a line forward: q on L iff T(q) on the returned line
    /// (coefficient row vector times M⁻¹).
    pub fn transform_line(&self, line: &Line) -> Line {
        let inv = self.m.inverse().expect("stored matrix is invertible");
        let l = [line.a(), line.b(), line.c()];
        let mut out = [self.field().zero(); 3];
        for j in 0..3 {
            let mut acc = self.field().zero();
            for i in 0..3 {
                acc += l[i] * inv[(i, j)];
            }
            out[j] = acc;
        }
        Line::new(out[0], out[1], out[2]).expect("invertible map keeps covectors nonzero")
    }
}

fn canonical_scale(m: Matrix) -> Matrix {
    let mut lead = None;
    'outer: for i in 0..3 {
        for j in 0..3 {
            if !m[(i, j)].is_zero() {
                lead = Some(m[(i, j)]);
                break 'outer;
            }
        }
    }
    let inv = lead.expect("invertible matrix is nonzero").inverse().unwrap();
    let mut out = m;
    for i in 0..3 {
        for j in 0..3 {
            out[(i, j)] *= inv;
        }
    }
    out
}

/// The projective transformation sending `q1` to [0:1:0] and `q2` to [1:0:0].
///
/// Built deterministically: the matrix with columns (q2, q1, q3) is inverted,
/// where q3 is the lexicographically smallest projective point making the
/// columns independent. Errors when the two anchors coincide.
pub fn two_point_normalization(q1: &ProjPoint, q2: &ProjPoint) -> Result<ProjTransform, ProjError> {
    if q1 == q2 {
        return Err(ProjError::SamePoint);
    }
    let field = q1.field();
    for q3 in ProjPoint::enumerate(field) {
        let a = Matrix::from_rows(&[
            vec![q2.x(), q1.x(), q3.x()],
            vec![q2.y(), q1.y(), q3.y()],
            vec![q2.z(), q1.z(), q3.z()],
        ])
        .expect("3x3 shape");
        if a.det().is_zero() {
            continue;
        }
        let t = ProjTransform {
            m: canonical_scale(a.inverse().expect("nonzero determinant")),
        };
        return Ok(t);
    }
    unreachable!("two distinct points always extend to a frame")
}
