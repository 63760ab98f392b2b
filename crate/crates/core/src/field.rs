//! Exact arithmetic over a prime field F_p, plus the small dense matrices and
//! linear solving the geometry layers need.
//!
//! Residues are kept canonical in `[0, p)` at all times. The modulus is
//! validated to be an odd prime on construction; everything downstream
//! assumes characteristic ≠ 2 (conic classification divides by 2).

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, MulAssign, Neg, Sub, SubAssign};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("the field of characteristic 2 is not supported; the modulus must be an odd prime")]
    EvenModulus,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("bad matrix shape for {op}: {rows}x{cols}")]
    Shape {
        rows: usize,
        cols: usize,
        op: &'static str,
    },
}

/// A validated odd prime modulus. Cheap to copy; hands out [`Fp`] elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Validates that `p` is an odd prime (deterministic Miller–Rabin, exact
    /// for all u64) and returns the field.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p == 2 {
            return Err(FieldError::EvenModulus);
        }
        if !is_prime_u64(p) {
            return Err(FieldError::NotPrime(p));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// The residue of p mod 4 (3 exactly when −1 is a non-square).
    pub fn residue_mod4(&self) -> u64 {
        self.p % 4
    }

    pub fn is_three_mod_four(&self) -> bool {
        self.p % 4 == 3
    }

    /// Canonical element from any u64 (reduced mod p).
    pub fn elem(&self, v: u64) -> Fp {
        Fp {
            v: v % self.p,
            p: self.p,
        }
    }

    /// Canonical element from a signed value (Euclidean remainder).
    pub fn elem_i64(&self, v: i64) -> Fp {
        Fp {
            v: v.rem_euclid(self.p as i64) as u64,
            p: self.p,
        }
    }

    pub fn zero(&self) -> Fp {
        self.elem(0)
    }

    pub fn one(&self) -> Fp {
        self.elem(1)
    }

    /// All field elements in increasing residue order.
    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        let p = self.p;
        (0..p).map(move |v| Fp { v, p })
    }

    /// The smallest quadratic non-residue (needs p odd, which is guaranteed).
    pub fn nonresidue(&self) -> Fp {
        self.elements()
            .skip(2)
            .find(|a| a.legendre() == -1)
            .expect("every odd prime field has a non-residue")
    }
}

/// An element of F_p: a canonical residue that remembers its modulus.
///
/// Mixing elements of different fields in arithmetic is a logic error and is
/// checked in debug builds.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp {
    v: u64,
    p: u64,
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Fp {
    pub fn value(self) -> u64 {
        self.v
    }

    pub fn p(self) -> u64 {
        self.p
    }

    pub fn field(self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn is_zero(self) -> bool {
        self.v == 0
    }

    /// Multiplicative inverse by extended Euclid; errors on zero.
    pub fn inverse(self) -> Result<Fp, FieldError> {
        if self.v == 0 {
            return Err(FieldError::ZeroInverse);
        }
        Ok(Fp {
            v: inv_mod(self.v, self.p),
            p: self.p,
        })
    }

    /// Binary exponentiation, with 0^0 = 1.
    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self.v;
        let mut acc: u64 = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base, self.p);
            }
            base = mulmod(base, base, self.p);
            e >>= 1;
        }
        Fp { v: acc, p: self.p }
    }

    /// Legendre symbol via Euler's criterion: 0 for zero, +1 for a nonzero
    /// square, −1 for a non-square.
    pub fn legendre(self) -> i32 {
        if self.v == 0 {
            return 0;
        }
        let e = self.pow((self.p - 1) / 2);
        if e.v == 1 {
            1
        } else {
            -1
        }
    }

    /// Canonical square root: `Some(r)` with r ≤ p − r when `self` is a
    /// square, `None` otherwise. Tonelli–Shanks, with the fast exponent path
    /// for p ≡ 3 (mod 4).
    pub fn sqrt(self) -> Option<Fp> {
        let p = self.p;
        if self.v == 0 {
            return Some(self);
        }
        if self.legendre() != 1 {
            return None;
        }
        let r = if p % 4 == 3 {
            self.pow((p + 1) / 4).v
        } else {
            tonelli_shanks(self.v, p)
        };
        let r = r.min(p - r);
        Some(Fp { v: r, p })
    }
}

macro_rules! same_field {
    ($a:expr, $b:expr) => {
        debug_assert_eq!($a.p, $b.p, "elements of different fields combined");
    };
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, rhs: Fp) -> Fp {
        same_field!(self, rhs);
        let mut v = self.v + rhs.v;
        if v >= self.p {
            v -= self.p;
        }
        Fp { v, p: self.p }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, rhs: Fp) -> Fp {
        same_field!(self, rhs);
        let v = if self.v >= rhs.v {
            self.v - rhs.v
        } else {
            self.v + self.p - rhs.v
        };
        Fp { v, p: self.p }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, rhs: Fp) -> Fp {
        same_field!(self, rhs);
        Fp {
            v: mulmod(self.v, rhs.v, self.p),
            p: self.p,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            v: if self.v == 0 { 0 } else { self.p - self.v },
            p: self.p,
        }
    }
}

impl AddAssign for Fp {
    fn add_assign(&mut self, rhs: Fp) {
        *self = *self + rhs;
    }
}

impl SubAssign for Fp {
    fn sub_assign(&mut self, rhs: Fp) {
        *self = *self - rhs;
    }
}

impl MulAssign for Fp {
    fn mul_assign(&mut self, rhs: Fp) {
        *self = *self * rhs;
    }
}

#[inline]
pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Extended Euclid on (p, a); p prime and a ≠ 0 guarantee gcd 1.
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}

fn powmod(mut base: u64, mut e: u64, p: u64) -> u64 {
    base %= p;
    let mut acc: u64 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    acc
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    // p ≡ 1 (mod 4), a a nonzero square. Write p − 1 = q·2^s with q odd.
    let mut q = p - 1;
    let mut s = 0u32;
    while q.is_multiple_of(2) {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    r
}

/// Deterministic Miller–Rabin, exact for every u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    // This base set is a proven witness set for all n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Row-major dense matrix over F_p. Sized for the geometry here (tiny
/// systems: 3×3 transforms, 5×6 conic fits), not for numerics at scale.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<Fp>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} mod {}", self.rows, self.cols, self.p)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| self[(r, c)].value().to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Outcome of solving a linear system A·x = b over F_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinearSolution {
    Unique(Vec<Fp>),
    /// A particular solution plus a basis of the kernel.
    Affine {
        particular: Vec<Fp>,
        basis: Vec<Vec<Fp>>,
    },
    Inconsistent,
}

impl Matrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            p: field.p(),
            data: vec![field.zero(); rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m[(i, i)] = field.one();
        }
        m
    }

    /// Builds from rows; errors on ragged or empty input.
    pub fn from_rows(rows: &[Vec<Fp>]) -> Result<Matrix, FieldError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(FieldError::Shape {
                rows: r,
                cols: c,
                op: "from_rows",
            });
        }
        let p = rows[0][0].p();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            for &x in row {
                debug_assert_eq!(x.p(), p, "matrix entries from different fields");
                data.push(x);
            }
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            p,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> PrimeField {
        PrimeField { p: self.p }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let f = self.field();
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn apply(&self, v: &[Fp]) -> Vec<Fp> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.field().zero();
                for j in 0..self.cols {
                    acc += self[(i, j)] * v[j];
                }
                acc
            })
            .collect()
    }

    /// Row echelon form; returns (echelon matrix, pivot columns, det scale).
    /// `det_scale` accumulates the sign of row swaps as a field element so
    /// the determinant can be read off the diagonal for square input.
    fn echelon(&self) -> (Matrix, Vec<usize>, Fp) {
        let f = self.field();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut sign = f.one();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    let tmp = m[(row, c)];
                    m[(row, c)] = m[(pr, c)];
                    m[(pr, c)] = tmp;
                }
                sign = -sign;
            }
            let inv = m[(row, col)].inverse().unwrap();
            for r in row + 1..m.rows {
                let factor = m[(r, col)] * inv;
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let sub = factor * m[(row, c)];
                    m[(r, c)] -= sub;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots, sign)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn det(&self) -> Fp {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let (e, pivots, sign) = self.echelon();
        if pivots.len() < self.rows {
            return self.field().zero();
        }
        let mut d = sign;
        for i in 0..self.rows {
            d *= e[(i, i)];
        }
        d
    }

    /// Inverse via Gauss–Jordan on [A | I]; `None` when singular.
    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let f = self.field();
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = f.one();
        }
        let aug = aug.reduced_echelon();
        for i in 0..n {
            if aug[(i, i)].is_zero() {
                return None;
            }
        }
        let mut out = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = aug[(i, n + j)];
            }
        }
        Some(out)
    }

    /// Reduced row echelon form (pivots normalized to 1, cleared upward).
    pub fn reduced_echelon(&self) -> Matrix {
        let (mut m, pivots, _) = self.echelon();
        for (row, &col) in pivots.iter().enumerate().rev() {
            let inv = m[(row, col)].inverse().unwrap();
            for c in 0..m.cols {
                m[(row, c)] *= inv;
            }
            for r in 0..row {
                let factor = m[(r, col)];
                if factor.is_zero() {
                    continue;
                }
                for c in 0..m.cols {
                    let sub = factor * m[(row, c)];
                    m[(r, c)] -= sub;
                }
            }
        }
        m
    }

    /// A basis of the right kernel {x : A·x = 0}.
    pub fn nullspace(&self) -> Vec<Vec<Fp>> {
        let f = self.field();
        let r = self.reduced_echelon();
        // In reduced echelon form each nonzero row leads with a 1 in its
        // pivot column.
        let mut pivot_of_col = vec![None; self.cols];
        for row in 0..self.rows {
            if let Some(col) = (0..self.cols).find(|&c| !r[(row, c)].is_zero()) {
                pivot_of_col[col] = Some(row);
            }
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for col in 0..self.cols {
                if let Some(prow) = pivot_of_col[col] {
                    v[col] = -r[(prow, free)];
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Solves A·x = b, classifying the solution set.
    pub fn solve(&self, rhs: &[Fp]) -> LinearSolution {
        assert_eq!(self.rows, rhs.len(), "rhs length mismatch");
        let f = self.field();
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = rhs[i];
        }
        let r = aug.reduced_echelon();
        // Inconsistent iff some row reads [0 … 0 | nonzero].
        for i in 0..self.rows {
            if (0..self.cols).all(|j| r[(i, j)].is_zero()) && !r[(i, self.cols)].is_zero() {
                return LinearSolution::Inconsistent;
            }
        }
        let mut pivot_of_col = vec![None; self.cols];
        let mut row = 0;
        for col in 0..self.cols {
            if row < self.rows && !r[(row, col)].is_zero() {
                pivot_of_col[col] = Some(row);
                row += 1;
            }
        }
        let mut particular = vec![f.zero(); self.cols];
        for col in 0..self.cols {
            if let Some(prow) = pivot_of_col[col] {
                particular[col] = r[(prow, self.cols)];
            }
        }
        let basis = self.nullspace();
        if basis.is_empty() {
            LinearSolution::Unique(particular)
        } else {
            LinearSolution::Affine { particular, basis }
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Fp;
    fn index(&self, (r, c): (usize, usize)) -> &Fp {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Fp {
        &mut self.data[r * self.cols + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn modulus_validation() {
        assert_eq!(PrimeField::new(2).unwrap_err(), FieldError::EvenModulus);
        for bad in [0u64, 1, 4, 9, 15, 91, 561, 1_000_000] {
            assert!(matches!(PrimeField::new(bad), Err(FieldError::NotPrime(_))), "{bad}");
        }
        for good in [3u64, 5, 7, 101, 10_007, 2_147_483_647] {
            assert!(PrimeField::new(good).is_ok(), "{good}");
        }
    }

    #[test]
    fn primality_against_trial_division() {
        let trial = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..2000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_primes() {
        for p in [3u64, 5, 7] {
            let f = f(p);
            let els: Vec<Fp> = f.elements().collect();
            for &a in &els {
                assert_eq!(a + f.zero(), a);
                assert_eq!(a * f.one(), a);
                assert_eq!(a + (-a), f.zero());
                if !a.is_zero() {
                    assert_eq!(a * a.inverse().unwrap(), f.one());
                }
                for &b in &els {
                    assert_eq!(a + b, b + a);
                    assert_eq!(a * b, b * a);
                    assert_eq!(a - b, a + (-b));
                    for &c in &els {
                        assert_eq!((a + b) + c, a + (b + c));
                        assert_eq!((a * b) * c, a * (b * c));
                        assert_eq!(a * (b + c), a * b + a * c);
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_matches_fermat_power() {
        // Independent route: a^(p−2) is the inverse by Fermat's little theorem.
        let f = f(10_007);
        for a in (1..10_007u64).step_by(97) {
            let x = f.elem(a);
            assert_eq!(x.inverse().unwrap(), x.pow(10_007 - 2));
        }
        let g = PrimeField::new(2_147_483_647).unwrap();
        for a in [1u64, 2, 65_537, 1_234_567_891, 2_147_483_646] {
            let x = g.elem(a);
            assert_eq!(x * x.inverse().unwrap(), g.one());
        }
    }

    #[test]
    fn legendre_matches_square_tables() {
        // Oracle: enumerate squares directly, then compare symbol values.
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let f = f(p);
            let squares: std::collections::HashSet<u64> =
                (1..p).map(|a| (a * a) % p).collect();
            for a in 0..p {
                let expected = if a == 0 {
                    0
                } else if squares.contains(&a) {
                    1
                } else {
                    -1
                };
                assert_eq!(f.elem(a).legendre(), expected, "a = {a}, p = {p}");
            }
        }
    }

    #[test]
    fn sqrt_exhaustive_both_congruence_classes() {
        for p in [3u64, 7, 11, 19, 5, 13, 17, 29, 101, 103] {
            let f = f(p);
            for a in f.elements() {
                match a.sqrt() {
                    Some(r) => {
                        assert_eq!(r * r, a, "sqrt({a}) = {r} mod {p}");
                        assert!(r.value() <= p - r.value() || r.is_zero(), "canonical root");
                    }
                    None => assert_eq!(a.legendre(), -1),
                }
            }
        }
    }

    #[test]
    fn nonresidue_is_smallest() {
        assert_eq!(f(7).nonresidue().value(), 3);
        assert_eq!(f(5).nonresidue().value(), 2);
        assert_eq!(f(17).nonresidue().value(), 3);
    }

    #[test]
    fn matrix_product_and_inverse_roundtrip() {
        let f7 = f(7);
        let a = Matrix::from_rows(&[
            vec![f7.elem(1), f7.elem(2), f7.elem(3)],
            vec![f7.elem(0), f7.elem(1), f7.elem(4)],
            vec![f7.elem(5), f7.elem(6), f7.elem(0)],
        ])
        .unwrap();
        let inv = a.inverse().expect("invertible");
        assert_eq!(a.mul(&inv), Matrix::identity(f7, 3));
        assert_eq!(inv.mul(&a), Matrix::identity(f7, 3));
        // det(A)·det(A⁻¹) = 1
        assert_eq!(a.det() * inv.det(), f7.one());
    }

    #[test]
    fn det_agrees_with_cofactor_expansion_3x3() {
        // Independent oracle for 3×3 determinants.
        let f11 = f(11);
        let cofactor = |m: &Matrix| {
            let g = |r: usize, c: usize| m[(r, c)];
            g(0, 0) * (g(1, 1) * g(2, 2) - g(1, 2) * g(2, 1))
                - g(0, 1) * (g(1, 0) * g(2, 2) - g(1, 2) * g(2, 0))
                + g(0, 2) * (g(1, 0) * g(2, 1) - g(1, 1) * g(2, 0))
        };
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f11.elem(seed >> 33)
        };
        for _ in 0..200 {
            let m = Matrix::from_rows(&[
                vec![next(), next(), next()],
                vec![next(), next(), next()],
                vec![next(), next(), next()],
            ])
            .unwrap();
            assert_eq!(m.det(), cofactor(&m));
        }
    }

    #[test]
    fn singular_matrix_has_no_inverse_and_low_rank() {
        let f5 = f(5);
        let m = Matrix::from_rows(&[
            vec![f5.elem(1), f5.elem(2)],
            vec![f5.elem(2), f5.elem(4)], // 2 × row 0
        ])
        .unwrap();
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_none());
        assert!(m.det().is_zero());
    }

    #[test]
    fn solve_unique_affine_inconsistent() {
        let f7 = f(7);
        // Unique: x + y = 3, x − y = 1 → x = 2, y = 1.
        let a = Matrix::from_rows(&[
            vec![f7.elem(1), f7.elem(1)],
            vec![f7.elem(1), -f7.elem(1)],
        ])
        .unwrap();
        match a.solve(&[f7.elem(3), f7.elem(1)]) {
            LinearSolution::Unique(x) => {
                assert_eq!(x, vec![f7.elem(2), f7.elem(1)]);
            }
            other => panic!("expected unique, got {other:?}"),
        }
        // Affine: single equation x + 2y = 1 in two unknowns.
        let b = Matrix::from_rows(&[vec![f7.elem(1), f7.elem(2)]]).unwrap();
        match b.solve(&[f7.elem(1)]) {
            LinearSolution::Affine { particular, basis } => {
                assert_eq!(basis.len(), 1);
                assert_eq!(particular[0] + f7.elem(2) * particular[1], f7.elem(1));
                let v = &basis[0];
                assert_eq!(v[0] + f7.elem(2) * v[1], f7.zero());
                assert!(!(v[0].is_zero() && v[1].is_zero()));
            }
            other => panic!("expected affine, got {other:?}"),
        }
        // Inconsistent: x + y = 1 and x + y = 2.
        let c = Matrix::from_rows(&[
            vec![f7.elem(1), f7.elem(1)],
            vec![f7.elem(1), f7.elem(1)],
        ])
        .unwrap();
        assert_eq!(c.solve(&[f7.elem(1), f7.elem(2)]), LinearSolution::Inconsistent);
    }

    #[test]
    fn nullspace_vectors_annihilate() {
        let f101 = f(101);
        let mut seed = 99u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            f101.elem(seed >> 33)
        };
        let mut found_rank5 = 0;
        while found_rank5 < 20 {
            let rows: Vec<Vec<Fp>> = (0..5).map(|_| (0..6).map(|_| next()).collect()).collect();
            let m = Matrix::from_rows(&rows).unwrap();
            if m.rank() != 5 {
                continue;
            }
            found_rank5 += 1;
            let ns = m.nullspace();
            assert_eq!(ns.len(), 1, "rank-5 5×6 has a 1-dim kernel");
            let v = &ns[0];
            assert!(v.iter().any(|x| !x.is_zero()));
            for row in &rows {
                let mut acc = f101.zero();
                for (a, b) in row.iter().zip(v) {
                    acc += *a * *b;
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn elem_i64_wraps_negative() {
        let f7 = f(7);
        assert_eq!(f7.elem_i64(-1).value(), 6);
        assert_eq!(f7.elem_i64(-7).value(), 0);
        assert_eq!(f7.elem_i64(15).value(), 1);
    }
}
