//! A uniform, constant-free catalog of the incidence and lower-bound
//! formulas, evaluated exactly.
//!
//! Every catalog entry stores its exponents as printed rationals (unreduced
//! where the source writes them unreduced, e.g. 12/27), evaluates each
//! additive term with implicit constant 1, and reports hypothesis violations
//! instead of silently clamping. Fractional powers are rounded once, to 40
//! fractional decimal digits, and every subsequent sum/min/comparison is
//! exact rational arithmetic on those rounded values, so orderings are
//! reproducible. Explicitly printed constants (the 1/2, 1/8, 1/144 factors
//! of the distance-set bounds) are kept verbatim.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoundError {
    #[error("unknown bound name {0:?}; valid names: {1}")]
    UnknownName(String, String),
    #[error("bound {bound} needs magnitude {symbol}")]
    MissingMagnitude {
        bound: &'static str,
        symbol: &'static str,
    },
    #[error("bound {bound}: magnitude {symbol} must be positive here (division)")]
    DivisionByZero {
        bound: &'static str,
        symbol: &'static str,
    },
    #[error("bound {bound}: magnitude {symbol} must be an integer for this check")]
    NonInteger {
        bound: &'static str,
        symbol: &'static str,
    },
}

/// Identifier of one bound formula. The stable string names (used by the
/// CLI and report columns) are listed under [`BoundId::name`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    TrivialConicKst,
    TrivialCircParKst,
    VinhPointLine,
    SdZCartesian,
    RichLinesCartesian,
    RichMobiusCartesian,
    MobiusRich,
    RichConicPinnedPair,
    RichConic,
    ConicSmall,
    ConicCartesian,
    CircParSmall,
    CircParCartesian,
    PachSharirReal,
    ConicLargeQ,
    SphereLargeQ,
    CilrrSphere,
    KlpSphere,
    RichPointsSdZ,
    RichCircles,
    RichLinesLarge,
    RichMobiusLarge,
    VinhHyperplane,
    KohSunOdd,
    KohSunEven,
    PinnedLower815,
    PlanarDistanceLower,
    ImageLower,
    DistSetLower,
    BeckLower207,
    Gp5TupleLower,
}

impl BoundId {
    pub const ALL: [BoundId; 31] = [
        BoundId::TrivialConicKst,
        BoundId::TrivialCircParKst,
        BoundId::VinhPointLine,
        BoundId::SdZCartesian,
        BoundId::RichLinesCartesian,
        BoundId::RichMobiusCartesian,
        BoundId::MobiusRich,
        BoundId::RichConicPinnedPair,
        BoundId::RichConic,
        BoundId::ConicSmall,
        BoundId::ConicCartesian,
        BoundId::CircParSmall,
        BoundId::CircParCartesian,
        BoundId::PachSharirReal,
        BoundId::ConicLargeQ,
        BoundId::SphereLargeQ,
        BoundId::CilrrSphere,
        BoundId::KlpSphere,
        BoundId::RichPointsSdZ,
        BoundId::RichCircles,
        BoundId::RichLinesLarge,
        BoundId::RichMobiusLarge,
        BoundId::VinhHyperplane,
        BoundId::KohSunOdd,
        BoundId::KohSunEven,
        BoundId::PinnedLower815,
        BoundId::PlanarDistanceLower,
        BoundId::ImageLower,
        BoundId::DistSetLower,
        BoundId::BeckLower207,
        BoundId::Gp5TupleLower,
    ];

    /// Stable name used by the CLI and in report columns.
    pub fn name(self) -> &'static str {
        match self {
            BoundId::TrivialConicKst => "eq4",
            BoundId::TrivialCircParKst => "eq5",
            BoundId::VinhPointLine => "thm5.1",
            BoundId::SdZCartesian => "thm3.1",
            BoundId::RichLinesCartesian => "cor3.3",
            BoundId::RichMobiusCartesian => "cor3.4",
            BoundId::MobiusRich => "thm2.1",
            BoundId::RichConicPinnedPair => "eq2.2",
            BoundId::RichConic => "eq2.3",
            BoundId::ConicSmall => "thm1.1",
            BoundId::ConicCartesian => "thm1.2",
            BoundId::CircParSmall => "thm1.3",
            BoundId::CircParCartesian => "thm1.4",
            BoundId::PachSharirReal => "thm1.5",
            BoundId::ConicLargeQ => "thm1.6",
            BoundId::SphereLargeQ => "thm1.7",
            BoundId::CilrrSphere => "cilrr",
            BoundId::KlpSphere => "klp",
            BoundId::RichPointsSdZ => "cor4.1",
            BoundId::RichCircles => "rich-circles",
            BoundId::RichLinesLarge => "cor5.2",
            BoundId::RichMobiusLarge => "cor5.3",
            BoundId::VinhHyperplane => "thm5.4",
            BoundId::KohSunOdd => "koh-sun-odd",
            BoundId::KohSunEven => "koh-sun-even",
            BoundId::PinnedLower815 => "thm6.1",
            BoundId::PlanarDistanceLower => "thm6.2",
            BoundId::ImageLower => "thm6.4",
            BoundId::DistSetLower => "thm6.7",
            BoundId::BeckLower207 => "thm6.8",
            BoundId::Gp5TupleLower => "gp5",
        }
    }

    pub fn from_name(name: &str) -> Result<BoundId, BoundError> {
        BoundId::ALL
            .iter()
            .find(|id| id.name() == name)
            .copied()
            .ok_or_else(|| {
                let valid = BoundId::ALL
                    .iter()
                    .map(|id| id.name())
                    .collect::<Vec<_>>()
                    .join(", ");
                BoundError::UnknownName(name.to_string(), valid)
            })
    }

    /// One-line summary of what the formula bounds.
    pub fn describe(self) -> &'static str {
        match self {
            BoundId::TrivialConicKst => {
                "Kővári–Sós–Turán ceiling for point-conic incidences (min of two branches)"
            }
            BoundId::TrivialCircParKst => {
                "Kővári–Sós–Turán ceiling for point-circle/parabola/hyperbola incidences"
            }
            BoundId::VinhPointLine => "point-line incidences over F_q, main term |P||L|/q",
            BoundId::SdZCartesian => "point-line incidences for Cartesian-product points",
            BoundId::RichLinesCartesian => "k-rich lines against a Cartesian-product point set",
            BoundId::RichMobiusCartesian => {
                "k-rich Möbius graphs against a Cartesian-product point set"
            }
            BoundId::MobiusRich => "k-rich Möbius graphs against a small planar point set",
            BoundId::RichConicPinnedPair => "k-rich conics through a fixed pair of points",
            BoundId::RichConic => "k-rich conics against a small planar point set",
            BoundId::ConicSmall => "point-conic incidences for small point sets",
            BoundId::ConicCartesian => {
                "point-conic incidences for Cartesian-product points (rich-conic form when k is set)"
            }
            BoundId::CircParSmall => {
                "point-circle/parabola/hyperbola incidences for small point sets"
            }
            BoundId::CircParCartesian => {
                "point-circle/parabola/hyperbola incidences for Cartesian-product points"
            }
            BoundId::PachSharirReal => "real-plane point-conic incidence benchmark",
            BoundId::ConicLargeQ => "point-conic incidences over F_q for large sets",
            BoundId::SphereLargeQ => "point-sphere incidences over F_q^d (q ≡ 3 mod 4)",
            BoundId::CilrrSphere => "point-sphere incidence benchmark with q^{d/2} error term",
            BoundId::KlpSphere => "point-sphere incidence benchmark for small sphere sets",
            BoundId::RichPointsSdZ => "k-rich points with respect to a small line set",
            BoundId::RichCircles => "k-rich circles against a small planar point set",
            BoundId::RichLinesLarge => "k-rich lines over F_q, k above |P|/q",
            BoundId::RichMobiusLarge => "k-rich Möbius graphs over F_q, k above max{2, |P|/q}",
            BoundId::VinhHyperplane => "point-hyperplane incidences over F_q^d",
            BoundId::KohSunOdd => "distance-set lower bound in odd dimension (piecewise)",
            BoundId::KohSunEven => "distance-set lower bound in even dimension (piecewise)",
            BoundId::PinnedLower815 => "pinned algebraic distance lower bound |E|^{8/15}",
            BoundId::PlanarDistanceLower => {
                "two-set algebraic distance lower bound, one set planar"
            }
            BoundId::ImageLower => "polynomial image lower bound via sumset incidences",
            BoundId::DistSetLower => "distance-set lower bound for comparable-size sets",
            BoundId::BeckLower207 => "Beck-type conic-count lower bound |P|^{20/7}",
            BoundId::Gp5TupleLower => {
                "count of general-position 5-tuples, product form with collinearity losses"
            }
        }
    }
}

/// Role symbols for the magnitudes a formula reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sym {
    /// |P| or |E| — the point-set size.
    P,
    /// |C|, |L|, |S|, |T|, |H| or |F| — the curve-family / second-set size.
    C,
    /// |A|, or the sumset size |E+F| for the image bound.
    A,
    /// |B|.
    B,
    /// richness threshold k.
    K,
    /// the prime p (small-set hypotheses).
    Pp,
    /// the field order q (large-set bounds).
    Q,
}

impl Sym {
    fn label(self) -> &'static str {
        match self {
            Sym::P => "P",
            Sym::C => "C",
            Sym::A => "A",
            Sym::B => "B",
            Sym::K => "k",
            Sym::Pp => "p",
            Sym::Q => "q",
        }
    }

    fn param_name(self) -> &'static str {
        match self {
            Sym::P => "sizeP",
            Sym::C => "sizeC",
            Sym::A => "sizeA",
            Sym::B => "sizeB",
            Sym::K => "k",
            Sym::Pp => "p",
            Sym::Q => "q",
        }
    }
}

/// Exponent of one factor: (num/den) + (d_num/d_den)·d, stored exactly as
/// printed (12/27 stays 12/27).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exp {
    pub num: i64,
    pub den: u64,
    pub d_num: i64,
    pub d_den: u64,
}

const fn e(num: i64, den: u64) -> Exp {
    Exp {
        num,
        den,
        d_num: 0,
        d_den: 1,
    }
}

const fn ed(num: i64, den: u64, d_num: i64, d_den: u64) -> Exp {
    Exp {
        num,
        den,
        d_num,
        d_den,
    }
}

impl Exp {
    fn is_constant(&self) -> bool {
        self.d_num == 0
    }

    fn resolve(&self, d: Option<&BigRational>) -> Option<BigRational> {
        let base = big_ratio(self.num, self.den);
        if self.d_num == 0 {
            return Some(base);
        }
        let dval = d?;
        Some(base + big_ratio(self.d_num, self.d_den) * dval)
    }
}

impl fmt::Display for Exp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d_num == 0 {
            if self.den == 1 {
                return write!(f, "{}", self.num);
            }
            return write!(f, "{}/{}", self.num, self.den);
        }
        // Affine in d; all catalog entries share one denominator.
        let l = lcm(self.den, self.d_den);
        let dn = self.d_num * (l / self.d_den) as i64;
        let cn = self.num * (l / self.den) as i64;
        let d_part = if dn == 1 {
            "d".to_string()
        } else {
            format!("{dn}d")
        };
        let core = match cn.cmp(&0) {
            Ordering::Equal => d_part,
            Ordering::Greater => format!("({d_part}+{cn})"),
            Ordering::Less => format!("({d_part}-{})", -cn),
        };
        if l == 1 {
            write!(f, "{core}")
        } else {
            write!(f, "{core}/{l}")
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub sym: Sym,
    pub exp: Exp,
}

const fn fa(sym: Sym, exp: Exp) -> Factor {
    Factor { sym, exp }
}

/// One additive term: coeff × Π magnitudeᵉ.
#[derive(Clone, Debug)]
pub struct TermDef {
    pub coeff_num: u64,
    pub coeff_den: u64,
    pub factors: Vec<Factor>,
}

impl TermDef {
    fn plain(factors: Vec<Factor>) -> TermDef {
        TermDef {
            coeff_num: 1,
            coeff_den: 1,
            factors,
        }
    }

    fn scaled(coeff_num: u64, coeff_den: u64, factors: Vec<Factor>) -> TermDef {
        TermDef {
            coeff_num,
            coeff_den,
            factors,
        }
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if self.coeff_num != 1 || self.coeff_den != 1 {
            if self.coeff_den == 1 {
                parts.push(format!("{}", self.coeff_num));
            } else {
                parts.push(format!("({}/{})", self.coeff_num, self.coeff_den));
            }
        }
        for f in &self.factors {
            let exp = &f.exp;
            if exp.is_constant() && exp.num == 1 && exp.den == 1 {
                parts.push(f.sym.label().to_string());
            } else if exp.is_constant() && exp.num < 0 && exp.den == 1 && exp.num == -1 {
                parts.push(format!("{}^-1", f.sym.label()));
            } else {
                parts.push(format!("{}^{{{}}}", f.sym.label(), exp));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join(" ")
        }
    }
}

#[derive(Clone, Debug)]
pub struct BranchDef {
    pub label: &'static str,
    pub terms: Vec<TermDef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combine {
    /// total = sum of all terms (single branch).
    Sum,
    /// total = min over branches of each branch's term sum.
    Min,
}

/// Full formula shape for one catalog entry, introspectable for
/// exponent-fidelity checks.
#[derive(Clone, Debug)]
pub struct BoundDef {
    pub combine: Combine,
    pub branches: Vec<BranchDef>,
}

/// Named magnitudes. All extended-precision nonnegative rationals; a bound
/// only requires the ones its formula and hypotheses read.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundParams {
    pub size_p: Option<BigRational>,
    pub size_c: Option<BigRational>,
    pub size_a: Option<BigRational>,
    pub size_b: Option<BigRational>,
    pub k: Option<BigRational>,
    pub p: Option<BigRational>,
    pub q: Option<BigRational>,
    pub d: Option<BigRational>,
    pub max_collinear: Option<BigRational>,
}

pub fn rat_u128(v: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn big_ratio(num: i64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl BoundParams {
    pub fn new() -> BoundParams {
        BoundParams::default()
    }

    pub fn size_p(mut self, v: u128) -> Self {
        self.size_p = Some(rat_u128(v));
        self
    }

    pub fn size_c(mut self, v: u128) -> Self {
        self.size_c = Some(rat_u128(v));
        self
    }

    pub fn size_a(mut self, v: u128) -> Self {
        self.size_a = Some(rat_u128(v));
        self
    }

    pub fn size_b(mut self, v: u128) -> Self {
        self.size_b = Some(rat_u128(v));
        self
    }

    pub fn k(mut self, v: u128) -> Self {
        self.k = Some(rat_u128(v));
        self
    }

    pub fn p(mut self, v: u128) -> Self {
        self.p = Some(rat_u128(v));
        self
    }

    pub fn q(mut self, v: u128) -> Self {
        self.q = Some(rat_u128(v));
        self
    }

    pub fn d(mut self, v: u128) -> Self {
        self.d = Some(rat_u128(v));
        self
    }

    pub fn max_collinear(mut self, v: u128) -> Self {
        self.max_collinear = Some(rat_u128(v));
        self
    }

    pub fn size_p_rat(mut self, v: BigRational) -> Self {
        self.size_p = Some(v);
        self
    }

    pub fn size_c_rat(mut self, v: BigRational) -> Self {
        self.size_c = Some(v);
        self
    }

    fn get(&self, sym: Sym, bound: &'static str) -> Result<&BigRational, BoundError> {
        let v = match sym {
            Sym::P => &self.size_p,
            Sym::C => &self.size_c,
            Sym::A => &self.size_a,
            Sym::B => &self.size_b,
            Sym::K => &self.k,
            Sym::Pp => &self.p,
            Sym::Q => &self.q,
        };
        v.as_ref().ok_or(BoundError::MissingMagnitude {
            bound,
            symbol: sym.param_name(),
        })
    }
}

/// Evaluated bound: additive terms (of the winning branch for min-bounds),
/// their exact sum, and the dominant term's label.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundValue {
    pub terms: Vec<(String, BigRational)>,
    pub total: BigRational,
    pub dominant: String,
    /// Which branch/range produced the value, for piecewise and min forms.
    pub branch: Option<String>,
}

impl BoundValue {
    pub fn total_f64(&self) -> f64 {
        self.total.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Decimal digits kept after the point when rounding a fractional power.
pub const POWER_FRACTIONAL_DIGITS: u32 = 40;

fn pow_scale() -> BigUint {
    BigUint::from(10u32).pow(POWER_FRACTIONAL_DIGITS)
}

/// Floor of r^(1/m) at the declared precision, for r ≥ 0.
fn nth_root_rounded(r: &BigRational, m: u64) -> BigRational {
    debug_assert!(!r.is_negative());
    let scale = pow_scale();
    // (numer · scale^m / denom) has an exact mth root equal to root·scale.
    let scaled = r.numer().to_biguint().expect("nonnegative")
        * scale.pow(u32::try_from(m).expect("tiny root index"))
        / r.denom().to_biguint().expect("positive denominator");
    let root = scaled.nth_root(u32::try_from(m).expect("tiny root index"));
    BigRational::new(BigInt::from(root), BigInt::from(scale))
}

/// base^(num/den) with den > 0 and base ≥ 0, exact for integer exponents and
/// rounded to the declared precision otherwise. Negative exponents invert
/// first, so base must be positive for them.
fn pow_rounded(
    base: &BigRational,
    num: &BigInt,
    den: &BigInt,
    bound: &'static str,
    symbol: &'static str,
) -> Result<BigRational, BoundError> {
    debug_assert!(den.is_positive());
    if num.is_zero() {
        return Ok(BigRational::one());
    }
    if base.is_zero() {
        if num.is_negative() {
            return Err(BoundError::DivisionByZero { bound, symbol });
        }
        return Ok(BigRational::zero());
    }
    let n = i32::try_from(num.to_i64().expect("catalog exponents are small"))
        .expect("catalog exponents are small");
    let powered = base.pow(n);
    let m = den.to_u64().expect("catalog exponents are small");
    if m == 1 {
        return Ok(powered);
    }
    Ok(nth_root_rounded(&powered, m))
}

fn eval_term(
    term: &TermDef,
    params: &BoundParams,
    bound: &'static str,
) -> Result<BigRational, BoundError> {
    let mut acc = big_ratio(term.coeff_num as i64, term.coeff_den);
    for f in &term.factors {
        let magnitude = params.get(f.sym, bound)?;
        if magnitude.is_negative() {
            // Magnitudes are sizes; negatives are a caller bug surfaced as zero-division semantics.
            return Err(BoundError::DivisionByZero {
                bound,
                symbol: f.sym.param_name(),
            });
        }
        let exp = f.exp.resolve(params.d.as_ref()).ok_or(
            BoundError::MissingMagnitude {
                bound,
                symbol: "d",
            },
        )?;
        let exp = exp.reduced();
        acc *= pow_rounded(magnitude, exp.numer(), exp.denom(), bound, f.sym.param_name())?;
    }
    Ok(acc)
}

fn eval_branch(
    branch: &BranchDef,
    params: &BoundParams,
    bound: &'static str,
) -> Result<(Vec<(String, BigRational)>, BigRational), BoundError> {
    let mut terms = Vec::with_capacity(branch.terms.len());
    let mut total = BigRational::zero();
    for t in &branch.terms {
        let v = eval_term(t, params, bound)?;
        total += &v;
        terms.push((t.label(), v));
    }
    Ok((terms, total))
}

fn dominant_of(terms: &[(String, BigRational)]) -> String {
    let mut best: Option<&(String, BigRational)> = None;
    for t in terms {
        // Strict comparison: the earliest maximal term is the dominant one.
        if best.is_none_or(|b| t.1 > b.1) {
            best = Some(t);
        }
    }
    best.map(|(l, _)| l.clone()).unwrap_or_else(|| "1".to_string())
}

/// The formula shape for an id. For the Cartesian conic bound the shape
/// depends on whether a richness threshold is supplied (`with_k`); for the
/// piecewise distance bounds all ranges are listed and evaluation selects
/// one.
pub fn definition(id: BoundId, with_k: bool) -> BoundDef {
    use BoundId::*;
    use Sym::*;
    let sum = |terms: Vec<TermDef>| BoundDef {
        combine: Combine::Sum,
        branches: vec![BranchDef {
            label: "sum",
            terms,
        }],
    };
    match id {
        ConicSmall => sum(vec![
            TermDef::plain(vec![fa(P, e(23, 27)), fa(C, e(23, 27))]),
            TermDef::plain(vec![fa(P, e(13, 9)), fa(C, e(12, 27))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
        ]),
        ConicCartesian => {
            if with_k {
                sum(vec![
                    TermDef::plain(vec![fa(A, e(6, 1)), fa(B, e(5, 1)), fa(K, e(-7, 1))]),
                    TermDef::plain(vec![fa(A, e(4, 1)), fa(B, e(4, 1)), fa(K, e(-4, 1))]),
                ])
            } else {
                sum(vec![
                    TermDef::plain(vec![fa(A, e(3, 4)), fa(B, e(5, 8)), fa(C, e(7, 8))]),
                    TermDef::plain(vec![fa(A, e(1, 2)), fa(B, e(3, 4)), fa(C, e(1, 4))]),
                    TermDef::plain(vec![fa(C, e(1, 1))]),
                ])
            }
        }
        CircParSmall => sum(vec![
            TermDef::plain(vec![fa(P, e(15, 19)), fa(C, e(15, 19))]),
            TermDef::plain(vec![fa(P, e(23, 19)), fa(C, e(4, 19))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
        ]),
        CircParCartesian => sum(vec![
            TermDef::plain(vec![fa(A, e(4, 5)), fa(B, e(3, 5)), fa(C, e(4, 5))]),
            TermDef::plain(vec![fa(A, e(6, 5)), fa(B, e(7, 5)), fa(C, e(1, 5))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
        ]),
        PachSharirReal => sum(vec![
            TermDef::plain(vec![fa(P, e(5, 9)), fa(C, e(8, 9))]),
            TermDef::plain(vec![fa(P, e(1, 1))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
        ]),
        ConicLargeQ => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![fa(Q, e(1, 5)), fa(P, e(4, 5)), fa(C, e(4, 5))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
        ]),
        SphereLargeQ => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![
                fa(Q, ed(-1, 3, 1, 3)),
                fa(P, e(2, 3)),
                fa(C, e(2, 3)),
            ]),
        ]),
        CilrrSphere => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![fa(Q, ed(0, 1, 1, 2)), fa(P, e(1, 2)), fa(C, e(1, 2))]),
        ]),
        KlpSphere => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![
                fa(Q, ed(-1, 2, 1, 2)),
                fa(P, e(1, 2)),
                fa(C, e(1, 2)),
            ]),
        ]),
        MobiusRich | RichConicPinnedPair | RichCircles => sum(vec![
            TermDef::plain(vec![fa(P, e(15, 4)), fa(K, e(-19, 4))]),
            TermDef::plain(vec![fa(P, e(2, 1)), fa(K, e(-2, 1))]),
        ]),
        RichConic => sum(vec![
            TermDef::plain(vec![fa(P, e(23, 4)), fa(K, e(-27, 4))]),
            TermDef::plain(vec![fa(P, e(4, 1)), fa(K, e(-4, 1))]),
        ]),
        SdZCartesian => sum(vec![
            TermDef::plain(vec![fa(A, e(3, 4)), fa(B, e(1, 2)), fa(C, e(3, 4))]),
            TermDef::plain(vec![fa(C, e(1, 1))]),
            TermDef::plain(vec![fa(A, e(1, 1)), fa(B, e(1, 1))]),
        ]),
        RichLinesCartesian => sum(vec![
            TermDef::plain(vec![fa(A, e(3, 1)), fa(B, e(2, 1)), fa(K, e(-4, 1))]),
            TermDef::plain(vec![fa(A, e(1, 1)), fa(B, e(1, 1)), fa(K, e(-1, 1))]),
        ]),
        RichMobiusCartesian => sum(vec![
            TermDef::plain(vec![fa(A, e(4, 1)), fa(B, e(3, 1)), fa(K, e(-5, 1))]),
            TermDef::plain(vec![fa(A, e(2, 1)), fa(B, e(2, 1)), fa(K, e(-2, 1))]),
        ]),
        RichPointsSdZ => sum(vec![
            TermDef::plain(vec![fa(C, e(11, 4)), fa(K, e(-15, 4))]),
            TermDef::plain(vec![fa(C, e(1, 1)), fa(K, e(-1, 1))]),
        ]),
        RichLinesLarge => sum(vec![TermDef::plain(vec![
            fa(Q, e(1, 1)),
            fa(P, e(1, 1)),
            fa(K, e(-2, 1)),
        ])]),
        RichMobiusLarge => sum(vec![TermDef::plain(vec![
            fa(Q, e(1, 1)),
            fa(P, e(2, 1)),
            fa(K, e(-3, 1)),
        ])]),
        VinhPointLine => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![fa(Q, e(1, 2)), fa(P, e(1, 2)), fa(C, e(1, 2))]),
        ]),
        VinhHyperplane => sum(vec![
            TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, e(-1, 1))]),
            TermDef::plain(vec![
                fa(Q, ed(-1, 2, 1, 2)),
                fa(P, e(1, 2)),
                fa(C, e(1, 2)),
            ]),
        ]),
        PinnedLower815 => sum(vec![TermDef::plain(vec![fa(P, e(8, 15))])]),
        BeckLower207 => sum(vec![TermDef::plain(vec![fa(P, e(20, 7))])]),
        TrivialConicKst => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "via-curves",
                    terms: vec![
                        TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(4, 5))]),
                        TermDef::plain(vec![fa(C, e(1, 1))]),
                    ],
                },
                BranchDef {
                    label: "via-points",
                    terms: vec![
                        TermDef::plain(vec![fa(P, e(1, 2)), fa(C, e(1, 1))]),
                        TermDef::plain(vec![fa(P, e(1, 1))]),
                    ],
                },
            ],
        },
        TrivialCircParKst => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "via-curves",
                    terms: vec![
                        TermDef::plain(vec![fa(P, e(1, 1)), fa(C, e(2, 3))]),
                        TermDef::plain(vec![fa(C, e(1, 1))]),
                    ],
                },
                BranchDef {
                    label: "via-points",
                    terms: vec![
                        TermDef::plain(vec![fa(P, e(1, 2)), fa(C, e(1, 1))]),
                        TermDef::plain(vec![fa(P, e(1, 1))]),
                    ],
                },
            ],
        },
        PlanarDistanceLower => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "balanced",
                    terms: vec![TermDef::plain(vec![fa(P, e(4, 23)), fa(C, e(4, 23))])],
                },
                BranchDef {
                    label: "second-moment",
                    terms: vec![TermDef::plain(vec![fa(C, e(5, 4)), fa(P, e(-1, 1))])],
                },
                BranchDef {
                    label: "conic-budget",
                    terms: vec![TermDef::plain(vec![fa(P, e(20, 7)), fa(C, e(-1, 1))])],
                },
                BranchDef {
                    label: "saturation",
                    terms: vec![TermDef::plain(vec![fa(P, e(1, 1))])],
                },
            ],
        },
        ImageLower => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "first",
                    terms: vec![TermDef::plain(vec![
                        fa(P, e(19, 15)),
                        fa(C, e(4, 15)),
                        fa(A, e(-1, 1)),
                    ])],
                },
                BranchDef {
                    label: "second",
                    terms: vec![TermDef::plain(vec![
                        fa(P, e(19, 4)),
                        fa(C, e(15, 4)),
                        fa(A, e(-23, 4)),
                    ])],
                },
                BranchDef {
                    label: "saturation",
                    terms: vec![TermDef::plain(vec![fa(P, e(1, 1))])],
                },
            ],
        },
        DistSetLower => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "field",
                    terms: vec![TermDef::plain(vec![fa(Q, e(1, 1))])],
                },
                BranchDef {
                    label: "product",
                    terms: vec![TermDef::plain(vec![
                        fa(P, e(1, 2)),
                        fa(C, e(1, 2)),
                        fa(Q, ed(1, 2, -1, 2)),
                    ])],
                },
            ],
        },
        KohSunOdd => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "half-field",
                    terms: vec![TermDef::scaled(1, 2, vec![fa(Q, e(1, 1))])],
                },
                // Low range: |E| < q^{(d−1)/2}.
                BranchDef {
                    label: "low",
                    terms: vec![TermDef::scaled(
                        1,
                        8,
                        vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, ed(1, 1, -1, 1))],
                    )],
                },
                // Mid range: q^{(d−1)/2} ≤ |E| < q^{(d+1)/2}.
                BranchDef {
                    label: "mid",
                    terms: vec![TermDef::scaled(
                        1,
                        8,
                        vec![fa(C, e(1, 1)), fa(Q, ed(1, 2, -1, 2))],
                    )],
                },
                // High range: q^{(d+1)/2} ≤ |E| ≤ q^d.
                BranchDef {
                    label: "high",
                    terms: vec![TermDef::scaled(
                        1,
                        2,
                        vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, ed(0, 1, -1, 1))],
                    )],
                },
            ],
        },
        KohSunEven => BoundDef {
            combine: Combine::Min,
            branches: vec![
                BranchDef {
                    label: "field/144",
                    terms: vec![TermDef::scaled(1, 144, vec![fa(Q, e(1, 1))])],
                },
                // Mid range: (1/144)·|F|/(2 q^{(d−1)/2}).
                BranchDef {
                    label: "mid",
                    terms: vec![TermDef::scaled(
                        1,
                        288,
                        vec![fa(C, e(1, 1)), fa(Q, ed(1, 2, -1, 2))],
                    )],
                },
                // High range: (1/144)·2|E||F|/q^d.
                BranchDef {
                    label: "high",
                    terms: vec![TermDef::scaled(
                        2,
                        144,
                        vec![fa(P, e(1, 1)), fa(C, e(1, 1)), fa(Q, ed(0, 1, -1, 1))],
                    )],
                },
            ],
        },
        Gp5TupleLower => BoundDef {
            // Product of linear factors; evaluated bespoke, shape recorded
            // for introspection only.
            combine: Combine::Sum,
            branches: vec![BranchDef {
                label: "product",
                terms: vec![TermDef::plain(vec![fa(P, e(5, 1))])],
            }],
        },
    }
}

/// Exact value of the bound formula at the given magnitudes.
pub fn evaluate(id: BoundId, params: &BoundParams) -> Result<BoundValue, BoundError> {
    let name = id.name();
    match id {
        BoundId::Gp5TupleLower => {
            let p = params.get(Sym::P, name)?.clone();
            let l = params
                .max_collinear
                .as_ref()
                .ok_or(BoundError::MissingMagnitude {
                    bound: name,
                    symbol: "maxCollinear",
                })?
                .clone();
            let one = BigRational::one();
            let factors = [
                p.clone(),
                &p - &one,
                &p - &l,
                &p - big_ratio(3, 1) * &l,
                &p - big_ratio(6, 1) * &l,
            ];
            let value = if factors.iter().any(|f| f.is_negative()) {
                BigRational::zero()
            } else {
                factors.iter().product()
            };
            Ok(BoundValue {
                terms: vec![("P(P-1)(P-L)(P-3L)(P-6L)".to_string(), value.clone())],
                total: value,
                dominant: "P(P-1)(P-L)(P-3L)(P-6L)".to_string(),
                branch: None,
            })
        }
        BoundId::KohSunOdd | BoundId::KohSunEven => evaluate_koh_sun(id, params),
        _ => {
            let def = definition(id, params.k.is_some());
            match def.combine {
                Combine::Sum => {
                    let (terms, total) = eval_branch(&def.branches[0], params, name)?;
                    Ok(BoundValue {
                        dominant: dominant_of(&terms),
                        terms,
                        total,
                        branch: None,
                    })
                }
                Combine::Min => {
                    type Branch<'a> = (Vec<(String, BigRational)>, BigRational, &'a str);
                    let mut best: Option<Branch> = None;
                    for b in &def.branches {
                        let (terms, total) = eval_branch(b, params, name)?;
                        let better = match &best {
                            None => true,
                            Some((_, t, _)) => total < *t,
                        };
                        if better {
                            best = Some((terms, total, b.label));
                        }
                    }
                    let (terms, total, label) = best.expect("min bounds have branches");
                    Ok(BoundValue {
                        dominant: dominant_of(&terms),
                        terms,
                        total,
                        branch: Some(label.to_string()),
                    })
                }
            }
        }
    }
}

/// Piecewise distance-set bounds: pick the |E| range, then take the min of
/// the half-field term and the range's product term.
fn evaluate_koh_sun(id: BoundId, params: &BoundParams) -> Result<BoundValue, BoundError> {
    let name = id.name();
    let e_size = params.get(Sym::P, name)?.clone();
    let q = params.get(Sym::Q, name)?.clone();
    let d = params
        .d
        .as_ref()
        .ok_or(BoundError::MissingMagnitude {
            bound: name,
            symbol: "d",
        })?
        .clone();
    if !d.is_integer() {
        return Err(BoundError::NonInteger {
            bound: name,
            symbol: "d",
        });
    }
    let dv = d.to_integer().to_i64().expect("small dimension");
    // |E| < q^{(d−1)/2} ⟺ |E|² < q^{d−1}; |E| < q^{(d+1)/2} ⟺ |E|² < q^{d+1}.
    let e2 = &e_size * &e_size;
    let range = if e2 < q.pow(i32::try_from(dv - 1).expect("small dimension")) {
        "low"
    } else if e2 < q.pow(i32::try_from(dv + 1).expect("small dimension")) {
        "mid"
    } else {
        "high"
    };
    let def = definition(id, false);
    let field_branch = &def.branches[0];
    let range_branch = def
        .branches
        .iter()
        .find(|b| b.label == range)
        .unwrap_or(field_branch);
    let (field_terms, field_total) = eval_branch(field_branch, params, name)?;
    let (range_terms, range_total) = eval_branch(range_branch, params, name)?;
    // The even-d low range has only the q/144 floor.
    let low_without_product = id == BoundId::KohSunEven && range == "low";
    let (terms, total, side) = if low_without_product || field_total <= range_total {
        (field_terms, field_total, field_branch.label)
    } else {
        (range_terms, range_total, range_branch.label)
    };
    Ok(BoundValue {
        dominant: dominant_of(&terms),
        terms,
        total,
        branch: Some(format!("range {range}, min side {side}")),
    })
}

// ---- hypothesis checking ----------------------------------------------

/// a ≤ b^{num/den} with everything nonnegative, checked exactly as
/// a^den ≤ b^num.
fn le_pow(a: &BigRational, b: &BigRational, num: i32, den: i32) -> bool {
    a.pow(den) <= b.pow(num)
}

fn residue_of(
    v: &BigRational,
    modulus: u64,
    bound: &'static str,
    symbol: &'static str,
) -> Result<u64, BoundError> {
    if !v.is_integer() {
        return Err(BoundError::NonInteger { bound, symbol });
    }
    let m = BigInt::from(modulus);
    let r = ((v.to_integer() % &m) + &m) % &m;
    Ok(r.to_u64().expect("residue fits"))
}

/// Hypothesis check: true plus an empty list when every hypothesis holds
/// under the unit-constant reading (every ≪ is ≤ with constant 1, recorded
/// in the violation strings; ∼ means within factor 2).
pub fn applicability(
    id: BoundId,
    params: &BoundParams,
) -> Result<(bool, Vec<String>), BoundError> {
    let name = id.name();
    let mut violations = Vec::new();
    let mut check = |ok: bool, clause: &str| {
        if !ok {
            violations.push(clause.to_string());
        }
    };

    // Shared clauses.
    let small_set = |v: &BigRational, sym: &str, p: &BigRational| {
        (le_pow(v, p, 15, 13), format!("{sym} <= p^{{15/13}} (constant 1)"))
    };

    match id {
        BoundId::ConicSmall | BoundId::CircParSmall | BoundId::BeckLower207 => {
            let p_size = params.get(Sym::P, name)?;
            let p = params.get(Sym::Pp, name)?;
            let (ok, clause) = small_set(p_size, "|P|", p);
            check(ok, &clause);
        }
        BoundId::PinnedLower815 => {
            let p_size = params.get(Sym::P, name)?;
            let p = params.get(Sym::Pp, name)?;
            let (ok, clause) = small_set(p_size, "|E|", p);
            check(ok, &clause);
            check(
                residue_of(p, 4, name, "p")? == 3,
                "p == 3 (mod 4)",
            );
        }
        BoundId::RichCircles => {
            let p_size = params.get(Sym::P, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            let (ok, clause) = small_set(p_size, "|P|", p);
            check(ok, &clause);
            check(*k >= rat_u128(3), "k >= 3");
            check(residue_of(p, 4, name, "p")? == 3, "p == 3 (mod 4)");
        }
        BoundId::MobiusRich => {
            let p_size = params.get(Sym::P, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            let (ok, clause) = small_set(p_size, "|P|", p);
            check(ok, &clause);
            check(*k >= rat_u128(3), "k >= 3");
        }
        BoundId::RichConicPinnedPair | BoundId::RichConic => {
            let p_size = params.get(Sym::P, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            let (ok, clause) = small_set(p_size, "|P|", p);
            check(ok, &clause);
            check(*k >= rat_u128(5), "k >= 5");
        }
        BoundId::RichPointsSdZ => {
            let l_size = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            let (ok, clause) = small_set(l_size, "|L|", p);
            check(ok, &clause);
            check(*k >= rat_u128(2), "k >= 2");
        }
        BoundId::ConicCartesian => {
            let a = params.get(Sym::A, name)?;
            let b = params.get(Sym::B, name)?;
            let c = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            check(a <= b, "|A| <= |B|");
            check(a * c <= p * p, "|A||C| <= p^2 (constant 1)");
            if let Some(k) = &params.k {
                check(*k >= rat_u128(5), "k >= 5");
            }
        }
        BoundId::SdZCartesian => {
            let a = params.get(Sym::A, name)?;
            let b = params.get(Sym::B, name)?;
            let c = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            check(a <= b, "|A| <= |B|");
            check(a * c <= p * p, "|A||L| <= p^2 (constant 1)");
        }
        BoundId::RichLinesCartesian => {
            let a = params.get(Sym::A, name)?;
            let b = params.get(Sym::B, name)?;
            let c = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            check(a <= b, "|A| <= |B|");
            check(a * c <= p * p, "|A||L| <= p^2 (constant 1)");
            check(*k >= rat_u128(2), "k >= 2");
        }
        BoundId::RichMobiusCartesian => {
            let a = params.get(Sym::A, name)?;
            let b = params.get(Sym::B, name)?;
            let c = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            let k = params.get(Sym::K, name)?;
            check(a <= b, "|A| <= |B|");
            check(a * c <= p * p, "|A||T| <= p^2 (constant 1)");
            check(*k >= rat_u128(3), "k >= 3");
        }
        BoundId::CircParCartesian => {
            let a = params.get(Sym::A, name)?;
            let c = params.get(Sym::C, name)?;
            let p = params.get(Sym::Pp, name)?;
            check(a * c <= p * p, "|A||C| <= p^2 (constant 1)");
        }
        BoundId::SphereLargeQ => {
            let q = params.get(Sym::Q, name)?;
            check(residue_of(q, 4, name, "q")? == 3, "q == 3 (mod 4)");
        }
        BoundId::KlpSphere => {
            let p_size = params.get(Sym::P, name)?;
            let s = params.get(Sym::C, name)?;
            let q = params.get(Sym::Q, name)?;
            let d = int_param(params, name)?;
            check(
                p_size * s <= q.pow(i32::try_from(d - 1).expect("small dimension")),
                "|P||S| <= q^{d-1}",
            );
        }
        BoundId::RichLinesLarge => {
            let p_size = params.get(Sym::P, name)?;
            let q = params.get(Sym::Q, name)?;
            let k = params.get(Sym::K, name)?;
            check(k * q > *p_size, "k > |P|/q");
        }
        BoundId::RichMobiusLarge => {
            let p_size = params.get(Sym::P, name)?;
            let q = params.get(Sym::Q, name)?;
            let k = params.get(Sym::K, name)?;
            check(*k > rat_u128(2), "k > 2");
            check(k * q > *p_size, "k > |P|/q");
        }
        BoundId::KohSunOdd => {
            let e_size = params.get(Sym::P, name)?;
            let q = params.get(Sym::Q, name)?;
            let d = int_param(params, name)?;
            check(d >= 3 && d % 2 == 1, "d odd, d >= 3");
            check(
                le_pow(e_size, q, i32::try_from(d).expect("small dimension"), 1),
                "|E| <= q^d",
            );
        }
        BoundId::KohSunEven => {
            let e_size = params.get(Sym::P, name)?;
            let f_size = params.get(Sym::C, name)?;
            let q = params.get(Sym::Q, name)?;
            let d = int_param(params, name)?;
            check(d >= 2 && d % 2 == 0, "d even, d >= 2");
            check(
                e_size * f_size
                    >= rat_u128(16) * q.pow(i32::try_from(d).expect("small dimension")),
                "|E||F| >= 16 q^d",
            );
            check(
                le_pow(e_size, q, i32::try_from(d).expect("small dimension"), 1),
                "|E| <= q^d",
            );
        }
        BoundId::ImageLower => {
            let sum = params.get(Sym::A, name)?;
            let p = params.get(Sym::Pp, name)?;
            check(
                le_pow(sum, p, 15, 13),
                "|E+F| <= p^{15/13} (constant 1)",
            );
        }
        BoundId::DistSetLower => {
            let e_size = params.get(Sym::P, name)?;
            let f_size = params.get(Sym::C, name)?;
            let q = params.get(Sym::Q, name)?;
            let d = int_param(params, name)?;
            let two = rat_u128(2);
            check(
                e_size <= &(&two * f_size) && f_size <= &(&two * e_size),
                "|E| ~ |F| (within factor 2 by convention)",
            );
            // |E| ≤ q^{(d+1)/2} ⟺ |E|² ≤ q^{d+1}, and the same for |F|.
            let cap = q.pow(i32::try_from(d + 1).expect("small dimension"));
            check((e_size * e_size) <= cap, "|E| <= q^{(d+1)/2}");
            check((f_size * f_size) <= cap, "|F| <= q^{(d+1)/2}");
        }
        BoundId::Gp5TupleLower => {
            let p_size = params.get(Sym::P, name)?;
            let l = params
                .max_collinear
                .as_ref()
                .ok_or(BoundError::MissingMagnitude {
                    bound: name,
                    symbol: "maxCollinear",
                })?;
            check(
                &(rat_u128(6) * l) < p_size,
                "6·maxCollinear < |P| (otherwise the product clamps to 0)",
            );
        }
        BoundId::TrivialConicKst
        | BoundId::TrivialCircParKst
        | BoundId::PachSharirReal
        | BoundId::ConicLargeQ
        | BoundId::CilrrSphere
        | BoundId::VinhPointLine
        | BoundId::VinhHyperplane
        | BoundId::PlanarDistanceLower => {}
    }
    Ok((violations.is_empty(), violations))
}

fn int_param(params: &BoundParams, bound: &'static str) -> Result<i64, BoundError> {
    let d = params.d.as_ref().ok_or(BoundError::MissingMagnitude {
        bound,
        symbol: "d",
    })?;
    if !d.is_integer() {
        return Err(BoundError::NonInteger { bound, symbol: "d" });
    }
    Ok(d.to_integer().to_i64().expect("small dimension"))
}

/// Interpretation conventions a report should carry alongside the numbers.
pub fn convention_notes(id: BoundId) -> Vec<&'static str> {
    let mut notes = vec!["all implicit constants taken as 1; compare ratios, not pass/fail"];
    match id {
        BoundId::DistSetLower => {
            notes.push("'~' read as: sizes within a factor of 2 of each other")
        }
        BoundId::KohSunOdd | BoundId::KohSunEven => {
            notes.push("piecewise by the |E| range; printed constants kept verbatim")
        }
        BoundId::ConicSmall => notes.push("second exponent kept unreduced as printed: 12/27"),
        _ => {}
    }
    notes
}

// ---- comparison ---------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ImprovementReport {
    pub a: BoundId,
    pub b: BoundId,
    pub value_a: BoundValue,
    pub value_b: BoundValue,
    /// The smaller bound, None when equal.
    pub smaller: Option<BoundId>,
    /// larger/smaller as an exact ratio (1 when equal or when the smaller
    /// total is zero).
    pub factor: BigRational,
    /// True when the ordering was decided by exact exponent arithmetic
    /// (pure power products), not by rounded power values.
    pub exact_ordering: bool,
}

/// Evaluate two bounds at the same magnitudes and report which is smaller.
/// Single-term pure power products are ordered exactly by clearing exponent
/// denominators; everything else compares the (exact) rounded-power totals.
pub fn improvement_range(
    a: BoundId,
    b: BoundId,
    params: &BoundParams,
) -> Result<ImprovementReport, BoundError> {
    let value_a = evaluate(a, params)?;
    let value_b = evaluate(b, params)?;
    let exact = match (single_power_product(a, params), single_power_product(b, params)) {
        (Some(ta), Some(tb)) => compare_products_exact(&ta, &tb, params, a.name())?,
        _ => None,
    };
    let (ordering, exact_ordering) = match exact {
        Some(o) => (o, true),
        None => (value_a.total.cmp(&value_b.total), false),
    };
    let smaller = match ordering {
        Ordering::Less => Some(a),
        Ordering::Greater => Some(b),
        Ordering::Equal => None,
    };
    let (hi, lo) = if ordering == Ordering::Greater {
        (&value_a.total, &value_b.total)
    } else {
        (&value_b.total, &value_a.total)
    };
    let factor = if lo.is_zero() {
        BigRational::one()
    } else {
        hi / lo
    };
    Ok(ImprovementReport {
        a,
        b,
        value_a,
        value_b,
        smaller,
        factor,
        exact_ordering,
    })
}

fn single_power_product(id: BoundId, params: &BoundParams) -> Option<TermDef> {
    if id == BoundId::Gp5TupleLower {
        return None; // product of differences, not a power product
    }
    let def = definition(id, params.k.is_some());
    if def.combine == Combine::Sum && def.branches.len() == 1 && def.branches[0].terms.len() == 1 {
        Some(def.branches[0].terms[0].clone())
    } else {
        None
    }
}

/// Exact ordering of coeff·Π mᵉ terms: raise both sides to the lcm of all
/// exponent denominators, turning them into exact rational products.
fn compare_products_exact(
    ta: &TermDef,
    tb: &TermDef,
    params: &BoundParams,
    bound: &'static str,
) -> Result<Option<Ordering>, BoundError> {
    let mut denominators: Vec<u64> = Vec::new();
    let mut sides = Vec::new();
    for t in [ta, tb] {
        let mut resolved = Vec::new();
        for f in &t.factors {
            let exp = match f.exp.resolve(params.d.as_ref()) {
                Some(e) => e.reduced(),
                None => return Ok(None),
            };
            denominators.push(exp.denom().to_u64().expect("small exponent"));
            resolved.push((f.sym, exp));
        }
        sides.push(resolved);
    }
    let l = denominators.iter().fold(1u64, |acc, d| lcm(acc, *d));
    let l_i = i64::try_from(l).expect("small lcm");
    let mut values = Vec::new();
    for (t, resolved) in [ta, tb].into_iter().zip(&sides) {
        let mut acc = big_ratio(t.coeff_num as i64, t.coeff_den)
            .pow(i32::try_from(l_i).expect("small lcm"));
        for (sym, exp) in resolved {
            let m = params.get(*sym, bound)?;
            let int_exp = (exp * BigRational::from_integer(BigInt::from(l_i)))
                .to_integer()
                .to_i32()
                .expect("small exponent");
            if m.is_zero() && int_exp < 0 {
                return Err(BoundError::DivisionByZero {
                    bound,
                    symbol: sym.param_name(),
                });
            }
            if m.is_zero() {
                acc = if int_exp == 0 { acc } else { BigRational::zero() };
            } else {
                acc *= m.pow(int_exp);
            }
        }
        values.push(acc);
    }
    Ok(Some(values[0].cmp(&values[1])))
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(mut a: u64, mut b: u64) -> u64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    a / gcd(a, b) * b
}

/// The dyadic cutoff used when converting the rich-conic estimate into an
/// incidence bound: max{5, |P|^{23/27} / |C|^{4/27}}.
pub fn dyadic_cutoff_conics(size_p: u64, size_c: u64) -> f64 {
    if size_c == 0 {
        return 5.0;
    }
    let p = rat_u128(size_p as u128);
    let c = rat_u128(size_c as u128);
    let num = pow_rounded(&p, &BigInt::from(23), &BigInt::from(27), "delta", "sizeP")
        .expect("positive base");
    let den = pow_rounded(&c, &BigInt::from(4), &BigInt::from(27), "delta", "sizeC")
        .expect("positive base");
    let v = (num / den).to_f64().unwrap_or(f64::INFINITY);
    v.max(5.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u128) -> BigRational {
        rat_u128(v)
    }

    #[test]
    fn conic_small_unit_sizes() {
        let params = BoundParams::new().size_p(1).size_c(1);
        let v = evaluate(BoundId::ConicSmall, &params).unwrap();
        assert_eq!(v.terms.len(), 3);
        for (_, t) in &v.terms {
            assert_eq!(*t, BigRational::one());
        }
        assert_eq!(v.total, n(3));
    }

    #[test]
    fn conic_small_exponents_as_printed() {
        let def = definition(BoundId::ConicSmall, false);
        let terms = &def.branches[0].terms;
        let exps: Vec<Vec<(Sym, i64, u64)>> = terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .map(|f| (f.sym, f.exp.num, f.exp.den))
                    .collect()
            })
            .collect();
        assert_eq!(
            exps,
            vec![
                vec![(Sym::P, 23, 27), (Sym::C, 23, 27)],
                vec![(Sym::P, 13, 9), (Sym::C, 12, 27)],
                vec![(Sym::C, 1, 1)],
            ],
            "exponents must match the printed form, 12/27 unreduced"
        );
    }

    #[test]
    fn circ_par_small_power_of_two_is_exact() {
        // (2^19)^{15/19} = 2^15 exactly: the exponent denominator cancels, so
        // the root extraction is of a perfect power and rounds to the exact
        // value. First term = 2^15 · 2^15 = 2^30 = 1073741824.
        let params = BoundParams::new().size_p(1 << 19).size_c(1 << 19);
        let v = evaluate(BoundId::CircParSmall, &params).unwrap();
        assert_eq!(v.terms[0].1, n(1_073_741_824));
    }

    #[test]
    fn trivial_kst_picks_smaller_branch() {
        // P = 100, C = 10: via-points gives 10·10 + 100 = 200 exactly, which
        // beats via-curves (100·10^{4/5} + 10 > 600).
        let params = BoundParams::new().size_p(100).size_c(10);
        let v = evaluate(BoundId::TrivialConicKst, &params).unwrap();
        assert_eq!(v.total, n(200));
        assert_eq!(v.branch.as_deref(), Some("via-points"));
        assert_eq!(v.dominant, "P^{1/2} C");
        // Totals remain the sum of the reported terms.
        let sum: BigRational = v.terms.iter().map(|(_, t)| t.clone()).sum();
        assert_eq!(sum, v.total);
    }

    #[test]
    fn applicability_examples() {
        // |P| = p² violates the small-set hypothesis.
        let params = BoundParams::new().size_p(101 * 101).size_c(10).p(101);
        let (ok, viol) = applicability(BoundId::ConicSmall, &params).unwrap();
        assert!(!ok);
        assert_eq!(viol, vec!["|P| <= p^{15/13} (constant 1)".to_string()]);

        // k = 2 fails k > 2.
        let params = BoundParams::new().size_p(50).q(101).k(2);
        let (ok, viol) = applicability(BoundId::RichMobiusLarge, &params).unwrap();
        assert!(!ok);
        assert!(viol.iter().any(|v| v == "k > 2"));

        // |A| = |B| = 4, |C| = 16, p = 101: 64 <= 10201.
        let params = BoundParams::new().size_a(4).size_b(4).size_c(16).p(101);
        let (ok, viol) = applicability(BoundId::ConicCartesian, &params).unwrap();
        assert!(ok, "violations: {viol:?}");
    }

    #[test]
    fn missing_and_zero_magnitudes_error() {
        let params = BoundParams::new().size_p(10);
        assert_eq!(
            evaluate(BoundId::ConicSmall, &params).unwrap_err(),
            BoundError::MissingMagnitude {
                bound: "thm1.1",
                symbol: "sizeC"
            }
        );
        let params = BoundParams::new().size_p(10).size_c(10).q(0);
        assert_eq!(
            evaluate(BoundId::ConicLargeQ, &params).unwrap_err(),
            BoundError::DivisionByZero {
                bound: "thm1.6",
                symbol: "q"
            }
        );
    }

    #[test]
    fn koh_sun_odd_ranges_and_values() {
        // d = 3, q = 7. Low range: |E| = 3 < q^1; min{7/2, 3·5/(8·49)} = 15/392.
        let params = BoundParams::new().size_p(3).size_c(5).q(7).d(3);
        let v = evaluate(BoundId::KohSunOdd, &params).unwrap();
        assert_eq!(v.total, BigRational::new(BigInt::from(15), BigInt::from(392)));
        assert_eq!(v.branch.as_deref(), Some("range low, min side low"));

        // Mid range: |E| = 10, q^1 <= 10 < q^2; min{7/2, 5/(8·7)} = 5/56.
        let params = BoundParams::new().size_p(10).size_c(5).q(7).d(3);
        let v = evaluate(BoundId::KohSunOdd, &params).unwrap();
        assert_eq!(v.total, BigRational::new(BigInt::from(5), BigInt::from(56)));

        // High range with a huge product: the q/2 side wins.
        let params = BoundParams::new().size_p(300).size_c(300).q(7).d(3);
        let v = evaluate(BoundId::KohSunOdd, &params).unwrap();
        assert_eq!(v.total, BigRational::new(BigInt::from(7), BigInt::from(2)));
        assert_eq!(v.branch.as_deref(), Some("range high, min side half-field"));

        // Parity hypothesis.
        let params = BoundParams::new().size_p(3).size_c(5).q(7).d(4);
        let (ok, viol) = applicability(BoundId::KohSunOdd, &params).unwrap();
        assert!(!ok);
        assert!(viol.iter().any(|v| v.contains("d odd")));
    }

    #[test]
    fn koh_sun_even_low_range_is_field_floor() {
        // d = 2, q = 9 is not prime but the catalog is arithmetic-only; use q = 13.
        // |E| = 2 < q^{1/2}? 4 < 13 yes. Value must be q/144 regardless of |F|.
        let params = BoundParams::new().size_p(2).size_c(10_000).q(13).d(2);
        let v = evaluate(BoundId::KohSunEven, &params).unwrap();
        assert_eq!(v.total, BigRational::new(BigInt::from(13), BigInt::from(144)));
        let (_, viol) = applicability(BoundId::KohSunEven, &params).unwrap();
        assert!(viol.is_empty(), "2·10000 >= 16·169 holds: {viol:?}");
    }

    #[test]
    fn improvement_window_for_conics() {
        // |C| = |P|^{5/2} sits inside the improvement window.
        let params = BoundParams::new().size_p(1 << 20).size_c(1 << 50);
        let rep = improvement_range(BoundId::ConicSmall, BoundId::TrivialConicKst, &params)
            .unwrap();
        assert_eq!(rep.smaller, Some(BoundId::ConicSmall));
        assert!(rep.factor > BigRational::one());

        // |C| = |P| sits far outside; the trivial bound wins.
        let params = BoundParams::new().size_p(1 << 20).size_c(1 << 20);
        let rep = improvement_range(BoundId::ConicSmall, BoundId::TrivialConicKst, &params)
            .unwrap();
        assert_eq!(rep.smaller, Some(BoundId::TrivialConicKst));

        // Any id against itself is equal.
        let rep = improvement_range(BoundId::ConicSmall, BoundId::ConicSmall, &params).unwrap();
        assert_eq!(rep.smaller, None);
        assert_eq!(rep.factor, BigRational::one());
    }

    #[test]
    fn exact_ordering_for_power_products() {
        // |P|^{8/15} vs |P|^{20/7} at P = 2: decided by exponent arithmetic.
        let params = BoundParams::new().size_p(2).p(7).max_collinear(1);
        let rep =
            improvement_range(BoundId::PinnedLower815, BoundId::BeckLower207, &params).unwrap();
        assert!(rep.exact_ordering);
        assert_eq!(rep.smaller, Some(BoundId::PinnedLower815));
    }

    #[test]
    fn gp5_product_and_clamp() {
        let params = BoundParams::new().size_p(10).max_collinear(1);
        let v = evaluate(BoundId::Gp5TupleLower, &params).unwrap();
        assert_eq!(v.total, n(10 * 9 * 9 * 7 * 4));

        let params = BoundParams::new().size_p(10).max_collinear(2);
        let v = evaluate(BoundId::Gp5TupleLower, &params).unwrap();
        assert_eq!(v.total, BigRational::zero(), "negative factor clamps to 0");
        let (ok, _) = applicability(BoundId::Gp5TupleLower, &params).unwrap();
        assert!(!ok);
    }

    #[test]
    fn monotone_in_numerator_magnitudes() {
        // Richer inputs never lower a bound that reads them upstairs.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as u128 % 5000 + 1
        };
        for _ in 0..40 {
            let p0 = next();
            let c0 = next();
            let base = BoundParams::new().size_p(p0).size_c(c0);
            let bumped_p = BoundParams::new().size_p(p0 + next()).size_c(c0);
            let bumped_c = BoundParams::new().size_p(p0).size_c(c0 + next());
            for id in [
                BoundId::ConicSmall,
                BoundId::CircParSmall,
                BoundId::TrivialConicKst,
                BoundId::PachSharirReal,
            ] {
                let v0 = evaluate(id, &base).unwrap().total;
                assert!(evaluate(id, &bumped_p).unwrap().total >= v0, "{id:?} in P");
                assert!(evaluate(id, &bumped_c).unwrap().total >= v0, "{id:?} in C");
            }
        }
    }

    #[test]
    fn root_precision_brackets_the_true_value() {
        // The rounded sqrt(2) must satisfy y² ≤ 2 < (y + 10⁻⁴⁰)².
        let two = n(2);
        let y = nth_root_rounded(&two, 2);
        let ulp = BigRational::new(BigInt::from(1), BigInt::from(pow_scale()));
        assert!(&y * &y <= two);
        let y1 = &y + &ulp;
        assert!(&y1 * &y1 > two);
    }

    #[test]
    fn stable_names_round_trip() {
        for id in BoundId::ALL {
            assert_eq!(BoundId::from_name(id.name()).unwrap(), id);
            assert!(!id.describe().is_empty());
        }
        let err = BoundId::from_name("thm9.9").unwrap_err();
        assert!(matches!(err, BoundError::UnknownName(..)));
        assert!(err.to_string().contains("thm1.1"));
    }

    #[test]
    fn cartesian_conic_switches_on_k() {
        let incidence = BoundParams::new().size_a(8).size_b(16).size_c(64);
        let v = evaluate(BoundId::ConicCartesian, &incidence).unwrap();
        assert_eq!(v.terms.len(), 3);

        let rich = BoundParams::new().size_a(8).size_b(16).size_c(64).k(5);
        let v = evaluate(BoundId::ConicCartesian, &rich).unwrap();
        assert_eq!(v.terms.len(), 2);
        // |A|⁶|B|⁵/k⁷ + |A|⁴|B|⁴/k⁴ at A=8, B=16, k=5 (exact rationals).
        let t0 = n(8u128.pow(6) * 16u128.pow(5)) / n(5u128.pow(7));
        let t1 = n(8u128.pow(4) * 16u128.pow(4)) / n(5u128.pow(4));
        assert_eq!(v.terms[0].1, t0);
        assert_eq!(v.terms[1].1, t1);
        assert_eq!(v.total, t0 + t1);
    }

    #[test]
    fn sphere_bound_uses_dimension_in_exponent() {
        // q^{(d−1)/3} at q = 64, d = 4: 64 = 2^6, (d−1)/3 = 1 → 64 exactly.
        let params = BoundParams::new().size_p(1).size_c(1).q(64).d(4);
        let v = evaluate(BoundId::SphereLargeQ, &params).unwrap();
        // main term 1·1/64, error term 64^1·1·1.
        assert_eq!(v.terms[1].1, n(64));
        assert_eq!(v.dominant, v.terms[1].0);
        // Label renders the affine exponent.
        assert!(v.terms[1].0.contains("(d-1)/3"), "label: {}", v.terms[1].0);
    }

    #[test]
    fn dist_set_lower_field_saturation() {
        let params = BoundParams::new().size_p(1000).size_c(1200).q(5).d(3);
        let v = evaluate(BoundId::DistSetLower, &params).unwrap();
        assert_eq!(v.total, n(5), "the q branch saturates");
        let (ok, viol) = applicability(BoundId::DistSetLower, &params).unwrap();
        assert!(!ok, "sets exceed q^{{(d+1)/2}} = 25: {viol:?}");
        let params = BoundParams::new().size_p(20).size_c(25).q(5).d(3);
        let (ok, _) = applicability(BoundId::DistSetLower, &params).unwrap();
        assert!(ok);
    }

    #[test]
    fn dyadic_cutoff_floors_at_five() {
        assert_eq!(dyadic_cutoff_conics(1, 1000), 5.0);
        let big = dyadic_cutoff_conics(100_000, 2);
        assert!(big > 5.0);
    }

    #[test]
    fn convention_notes_present() {
        assert!(convention_notes(BoundId::DistSetLower)
            .iter()
            .any(|s| s.contains("factor of 2")));
        assert!(!convention_notes(BoundId::VinhPointLine).is_empty());
    }
}
