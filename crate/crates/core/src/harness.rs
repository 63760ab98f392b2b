//! Experiment configuration, deterministic instance generation, experiment
//! execution, and report emission.
//!
//! A fixed `(seed, trial)` pair fully determines each instance: trial i
//! draws from substream i of a seeded ChaCha stream cipher RNG, so runs are
//! reproducible across machines and thread counts, and parallel execution
//! returns rows in trial order.

use crate::bounds::{self, BoundError, BoundId, BoundParams};
use crate::curves::{Circle, Conic, Hyperbola, Mobius, Parabola};
use crate::field::{Fp, PrimeField};
use crate::incidence::{
    count_incidences, incidence_histogram, CurveFamily, FamilyKind, PointSet,
};
use crate::proj::{AffinePoint, Line};
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("{0}")]
    Usage(String),
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

impl From<BoundError> for HarnessError {
    fn from(e: BoundError) -> HarnessError {
        usage(e.to_string())
    }
}

/// How the point set of an experiment is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointGenerator {
    /// `count` distinct uniform points of F_p².
    RandomUniform { count: usize },
    /// A × B for random A, B ⊆ F_p with the given sizes.
    CartesianProduct { size_a: usize, size_b: usize },
    /// `count` distinct points on one random curve of the given kind.
    OnCurve { kind: FamilyKind, count: usize },
    /// A × B for arithmetic progressions A, B (structured, coset-like).
    CosetLike { size_a: usize, size_b: usize },
}

/// How the curve family of an experiment is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyGenerator {
    /// `count` random valid curves of the kind; duplicates collapse.
    Random { kind: FamilyKind, count: usize },
    /// Nondegenerate conics xy + ax² + by² + cx + dy + e with each
    /// coefficient ranging over an independent random set of `set_size`
    /// field elements (≤ set_size⁵ curves).
    CoefficientProduct { set_size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub prime: u64,
    pub generator: PointGenerator,
    pub family: FamilyGenerator,
    pub seed: u64,
    pub trials: u64,
    /// Stable bound names to evaluate per row.
    pub bounds: Vec<BoundId>,
    /// Richness threshold passed to k-dependent bounds.
    pub richness: Option<u64>,
    pub threads: Option<usize>,
    /// Record wall-clock timings in rows (suppress for byte-identical reruns).
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(prime: u64, generator: PointGenerator, family: FamilyGenerator) -> Self {
        ExperimentConfig {
            prime,
            generator,
            family,
            seed: 0,
            trials: 1,
            bounds: Vec::new(),
            richness: None,
            threads: None,
            timing: true,
        }
    }
}

/// One bound evaluated against one measured instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub id: BoundId,
    /// Evaluated bound total as a decimal.
    pub value: f64,
    pub applicable: bool,
    pub violations: Vec<String>,
    /// measured / value; present only when the bound is applicable.
    pub ratio: Option<f64>,
}

/// One experiment trial, ready for emission.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub trial: u64,
    pub prime: u64,
    pub instance: String,
    pub size_p: usize,
    pub size_c: usize,
    pub incidences: u64,
    pub max_richness: u64,
    /// Compact histogram "k:count;…" over nonzero richness levels.
    pub histogram: String,
    pub bounds: Vec<BoundReport>,
    pub wall_ms: Option<f64>,
}

// ---- generation ---------------------------------------------------------

fn field_for(prime: u64) -> Result<PrimeField, HarnessError> {
    PrimeField::new(prime).map_err(|e| usage(format!("prime {prime}: {e}")))
}

fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// `count` distinct field elements, sorted.
fn distinct_elems(f: PrimeField, count: usize, rng: &mut ChaCha8Rng) -> Vec<Fp> {
    let mut set = BTreeSet::new();
    while set.len() < count {
        set.insert(rng.random_range(0..f.p()));
    }
    set.into_iter().map(|v| f.elem(v)).collect()
}

fn product_points(f: PrimeField, a: &[Fp], b: &[Fp]) -> PointSet {
    let pts = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| AffinePoint::new(vec![x, y])))
        .collect();
    PointSet::new(f, 2, pts).expect("product points are planar")
}

fn require_planar_kind(kind: FamilyKind) -> Result<(), HarnessError> {
    match kind {
        FamilyKind::Spheres | FamilyKind::Hyperplanes => Err(usage(format!(
            "the experiment harness generates planar instances; {} need a dimension",
            kind.as_str()
        ))),
        _ => Ok(()),
    }
}

fn random_line(f: PrimeField, rng: &mut ChaCha8Rng) -> Line {
    loop {
        let a = f.elem(rng.random_range(0..f.p()));
        let b = f.elem(rng.random_range(0..f.p()));
        let c = f.elem(rng.random_range(0..f.p()));
        if a.is_zero() && b.is_zero() {
            continue;
        }
        return Line::new(a, b, c).expect("coefficients are not all zero");
    }
}

fn random_conic(f: PrimeField, rng: &mut ChaCha8Rng) -> Conic {
    loop {
        let c: Vec<Fp> = (0..6).map(|_| f.elem(rng.random_range(0..f.p()))).collect();
        if let Ok(conic) = Conic::new(c[0], c[1], c[2], c[3], c[4], c[5]) {
            if conic.is_nondegenerate() {
                return conic;
            }
        }
    }
}

fn random_circle(f: PrimeField, rng: &mut ChaCha8Rng) -> Circle {
    let center = AffinePoint::xy(f, rng.random_range(0..f.p()), rng.random_range(0..f.p()));
    let r = f.elem(rng.random_range(1..f.p()));
    Circle::new(center, r).expect("nonzero radius")
}

fn random_parabola(f: PrimeField, rng: &mut ChaCha8Rng) -> Parabola {
    Parabola::new(
        f.elem(rng.random_range(1..f.p())),
        f.elem(rng.random_range(0..f.p())),
        f.elem(rng.random_range(0..f.p())),
    )
    .expect("nonzero leading coefficient")
}

fn random_hyperbola(f: PrimeField, rng: &mut ChaCha8Rng) -> Hyperbola {
    Hyperbola::new(
        f.elem(rng.random_range(0..f.p())),
        f.elem(rng.random_range(0..f.p())),
        f.elem(rng.random_range(1..f.p())),
    )
    .expect("nonzero product constant")
}

fn random_mobius(f: PrimeField, rng: &mut ChaCha8Rng) -> Mobius {
    loop {
        let m: Vec<Fp> = (0..4).map(|_| f.elem(rng.random_range(0..f.p()))).collect();
        if let Ok(mob) = Mobius::new(m[0], m[1], m[2], m[3]) {
            return mob;
        }
    }
}

/// Number of distinct valid curves of the kind over F_p, saturating (the
/// checks only compare requested counts against it).
fn kind_population(kind: FamilyKind, p: u128) -> u128 {
    let pow = |e: u32| p.checked_pow(e).unwrap_or(u128::MAX);
    match kind {
        FamilyKind::Lines => pow(2).saturating_add(p),
        FamilyKind::Conics => (2..=5)
            .map(pow)
            .fold(p.saturating_add(1), |acc, t| acc.saturating_add(t)),
        FamilyKind::Circles | FamilyKind::Parabolas | FamilyKind::Hyperbolas => {
            pow(2).saturating_mul(p - 1)
        }
        FamilyKind::MobiusGraphs => pow(3) - p,
        FamilyKind::Spheres | FamilyKind::Hyperplanes => 0,
    }
}

fn random_family(
    f: PrimeField,
    kind: FamilyKind,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CurveFamily, HarnessError> {
    require_planar_kind(kind)?;
    if count as u128 > kind_population(kind, f.p() as u128) {
        return Err(usage(format!(
            "requested {count} {} but only {} exist over F_{}",
            kind.as_str(),
            kind_population(kind, f.p() as u128),
            f.p()
        )));
    }
    let family = match kind {
        FamilyKind::Lines => {
            CurveFamily::lines(f, (0..count).map(|_| random_line(f, rng)).collect())
        }
        FamilyKind::Conics => {
            CurveFamily::conics(f, (0..count).map(|_| random_conic(f, rng)).collect())
        }
        FamilyKind::Circles => {
            CurveFamily::circles(f, (0..count).map(|_| random_circle(f, rng)).collect())
        }
        FamilyKind::Parabolas => {
            CurveFamily::parabolas(f, (0..count).map(|_| random_parabola(f, rng)).collect())
        }
        FamilyKind::Hyperbolas => {
            CurveFamily::hyperbolas(f, (0..count).map(|_| random_hyperbola(f, rng)).collect())
        }
        FamilyKind::MobiusGraphs => {
            CurveFamily::mobius_graphs(f, (0..count).map(|_| random_mobius(f, rng)).collect())
        }
        FamilyKind::Spheres | FamilyKind::Hyperplanes => unreachable!("rejected above"),
    };
    Ok(family.expect("generated curves share the field"))
}

fn line_affine_points(line: &Line) -> Vec<AffinePoint> {
    let f = line.a().field();
    let p = f.p();
    let mut pts = Vec::new();
    if !line.b().is_zero() {
        let inv = line.b().inverse().expect("nonzero");
        for xv in 0..p {
            let x = f.elem(xv);
            pts.push(AffinePoint::new(vec![x, -((line.a() * x + line.c()) * inv)]));
        }
    } else if !line.a().is_zero() {
        let x = -(line.c() * line.a().inverse().expect("nonzero"));
        for yv in 0..p {
            pts.push(AffinePoint::new(vec![x, f.elem(yv)]));
        }
    }
    pts.sort();
    pts
}

fn on_curve_points(
    f: PrimeField,
    kind: FamilyKind,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PointSet, HarnessError> {
    require_planar_kind(kind)?;
    let candidates = match kind {
        FamilyKind::Lines => line_affine_points(&random_line(f, rng)),
        FamilyKind::Conics => random_conic(f, rng).enumerate_affine(),
        FamilyKind::Circles => random_circle(f, rng).points(),
        FamilyKind::Parabolas => random_parabola(f, rng).points(),
        FamilyKind::Hyperbolas => random_hyperbola(f, rng).points(),
        FamilyKind::MobiusGraphs => random_mobius(f, rng).graph(),
        FamilyKind::Spheres | FamilyKind::Hyperplanes => unreachable!("rejected above"),
    };
    if count > candidates.len() {
        return Err(usage(format!(
            "requested {count} points on a random {} with only {} points over F_{}",
            kind.as_str(),
            candidates.len(),
            f.p()
        )));
    }
    let chosen = rand::seq::index::sample(rng, candidates.len(), count)
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect();
    PointSet::new(f, 2, chosen).map_err(|e| usage(e.to_string()))
}

fn generate_points(
    f: PrimeField,
    generator: &PointGenerator,
    rng: &mut ChaCha8Rng,
) -> Result<PointSet, HarnessError> {
    let p = f.p();
    match generator {
        PointGenerator::RandomUniform { count } => {
            let population = (p as u128) * (p as u128);
            if *count as u128 > population {
                return Err(usage(format!(
                    "requested {count} points but F_{p}² has only {population}"
                )));
            }
            let mut set = BTreeSet::new();
            while set.len() < *count {
                set.insert((rng.random_range(0..p), rng.random_range(0..p)));
            }
            let coords: Vec<(u64, u64)> = set.into_iter().collect();
            Ok(PointSet::from_xy(f, &coords))
        }
        PointGenerator::CartesianProduct { size_a, size_b } => {
            for (label, size) in [("sizeA", size_a), ("sizeB", size_b)] {
                if *size as u64 > p {
                    return Err(usage(format!("{label} = {size} exceeds the field size {p}")));
                }
            }
            let a = distinct_elems(f, *size_a, rng);
            let b = distinct_elems(f, *size_b, rng);
            Ok(product_points(f, &a, &b))
        }
        PointGenerator::OnCurve { kind, count } => on_curve_points(f, *kind, *count, rng),
        PointGenerator::CosetLike { size_a, size_b } => {
            for (label, size) in [("sizeA", size_a), ("sizeB", size_b)] {
                if *size as u64 > p {
                    return Err(usage(format!("{label} = {size} exceeds the field size {p}")));
                }
            }
            let mut progression = |len: usize| {
                let start = rng.random_range(0..p);
                let step = rng.random_range(1..p);
                (0..len as u64)
                    .map(|i| f.elem(start) + f.elem(step) * f.elem(i % p))
                    .collect::<Vec<Fp>>()
            };
            let a = progression(*size_a);
            let b = progression(*size_b);
            Ok(product_points(f, &a, &b))
        }
    }
}

fn generate_family(
    f: PrimeField,
    family: &FamilyGenerator,
    rng: &mut ChaCha8Rng,
) -> Result<CurveFamily, HarnessError> {
    match family {
        FamilyGenerator::Random { kind, count } => random_family(f, *kind, *count, rng),
        FamilyGenerator::CoefficientProduct { set_size } => {
            if *set_size as u64 > f.p() {
                return Err(usage(format!(
                    "coefficient set size {set_size} exceeds the field size {}",
                    f.p()
                )));
            }
            let sets: Vec<Vec<Fp>> = (0..5).map(|_| distinct_elems(f, *set_size, rng)).collect();
            let one = f.one();
            let mut conics = Vec::new();
            for &a in &sets[0] {
                for &b in &sets[1] {
                    for &c in &sets[2] {
                        for &d in &sets[3] {
                            for &e in &sets[4] {
                                // xy + a x² + b y² + c x + d y + e.
                                let conic = Conic::new(a, one, b, c, d, e)
                                    .expect("xy coefficient is 1");
                                if conic.is_nondegenerate() {
                                    conics.push(conic);
                                }
                            }
                        }
                    }
                }
            }
            CurveFamily::conics(f, conics).map_err(|e| usage(e.to_string()))
        }
    }
}

/// `count` distinct uniform points of F_p^dim for substream (seed, stream).
pub fn random_point_set(
    prime: u64,
    dim: usize,
    count: usize,
    seed: u64,
    stream: u64,
) -> Result<PointSet, HarnessError> {
    let f = field_for(prime)?;
    if dim == 0 {
        return Err(usage("dimension must be at least 1"));
    }
    let population = (0..dim)
        .try_fold(1u128, |acc, _| acc.checked_mul(f.p() as u128))
        .unwrap_or(u128::MAX);
    if count as u128 > population {
        return Err(usage(format!(
            "requested {count} points but F_{}^{dim} has only {population}",
            f.p()
        )));
    }
    let mut rng = rng_for(seed, stream);
    let mut set: BTreeSet<Vec<u64>> = BTreeSet::new();
    while set.len() < count {
        set.insert((0..dim).map(|_| rng.random_range(0..f.p())).collect());
    }
    let pts = set
        .into_iter()
        .map(|v| AffinePoint::new(v.into_iter().map(|c| f.elem(c)).collect()))
        .collect();
    PointSet::new(f, dim, pts).map_err(|e| usage(e.to_string()))
}

/// Deterministic instance for one trial index.
pub fn generate_trial(
    config: &ExperimentConfig,
    trial: u64,
) -> Result<(PointSet, CurveFamily), HarnessError> {
    let f = field_for(config.prime)?;
    let mut rng = rng_for(config.seed, trial);
    let points = generate_points(f, &config.generator, &mut rng)?;
    let family = generate_family(f, &config.family, &mut rng)?;
    Ok((points, family))
}

/// The instance of trial 0 (the whole run is deterministic per trial index).
pub fn generate(config: &ExperimentConfig) -> Result<(PointSet, CurveFamily), HarnessError> {
    generate_trial(config, 0)
}

// ---- execution ----------------------------------------------------------

fn descriptor(config: &ExperimentConfig) -> String {
    let gen = match &config.generator {
        PointGenerator::RandomUniform { count } => format!("uniform-{count}"),
        PointGenerator::CartesianProduct { size_a, size_b } => {
            format!("cartesian-{size_a}x{size_b}")
        }
        PointGenerator::OnCurve { kind, count } => {
            format!("on-{}-{count}", kind.as_str())
        }
        PointGenerator::CosetLike { size_a, size_b } => format!("coset-{size_a}x{size_b}"),
    };
    let fam = match &config.family {
        FamilyGenerator::Random { kind, count } => format!("random-{}-{count}", kind.as_str()),
        FamilyGenerator::CoefficientProduct { set_size } => {
            format!("coefficient-product-{set_size}")
        }
    };
    format!("{gen} / {fam}")
}

fn run_trial(config: &ExperimentConfig, trial: u64) -> Result<ReportRow, HarnessError> {
    let (points, family) = generate_trial(config, trial)?;
    let started = Instant::now();
    let mut profile =
        incidence_histogram(&points, &family).map_err(|e| usage(e.to_string()))?;
    let wall = started.elapsed();
    if family.kind() == FamilyKind::Conics {
        let delta = bounds::dyadic_cutoff_conics(points.len() as u64, family.len() as u64);
        profile = profile.with_delta(delta);
    }

    let mut params = BoundParams::new()
        .size_p(points.len() as u128)
        .size_c(family.len() as u128)
        .p(config.prime as u128)
        .q(config.prime as u128)
        .d(2);
    match &config.generator {
        PointGenerator::CartesianProduct { size_a, size_b }
        | PointGenerator::CosetLike { size_a, size_b } => {
            params = params.size_a(*size_a as u128).size_b(*size_b as u128);
        }
        _ => {}
    }
    if let Some(k) = config.richness {
        params = params.k(k as u128);
    }

    let mut reports = Vec::with_capacity(config.bounds.len());
    for &id in &config.bounds {
        let value = bounds::evaluate(id, &params)?;
        let (applicable, violations) = bounds::applicability(id, &params)?;
        let ratio = if applicable && !value.total_f64().is_nan() && value.total_f64() > 0.0 {
            Some(
                (bounds::rat_u128(profile.total as u128) / &value.total)
                    .to_f64()
                    .unwrap_or(f64::INFINITY),
            )
        } else {
            None
        };
        reports.push(BoundReport {
            id,
            value: value.total_f64(),
            applicable,
            violations,
            ratio,
        });
    }

    Ok(ReportRow {
        trial,
        prime: config.prime,
        instance: descriptor(config),
        size_p: points.len(),
        size_c: family.len(),
        incidences: profile.total,
        max_richness: profile.max_richness(),
        histogram: profile.compact(),
        bounds: reports,
        wall_ms: config.timing.then_some(wall.as_secs_f64() * 1e3),
    })
}

/// Run all trials; rows come back ordered by trial index regardless of the
/// thread count.
pub fn run(config: &ExperimentConfig) -> Result<Vec<ReportRow>, HarnessError> {
    let trials: Vec<u64> = (0..config.trials).collect();
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let work = || -> Result<Vec<ReportRow>, HarnessError> {
            trials.par_iter().map(|&t| run_trial(config, t)).collect()
        };
        match config.threads {
            Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| usage(format!("thread pool: {e}")))?
                .install(work),
            _ => work(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        trials.iter().map(|&t| run_trial(config, t)).collect()
    }
}

/// Time the optimized counting kernel on a uniform instance.
#[derive(Clone, Debug)]
pub struct BenchReport {
    pub size_p: usize,
    pub size_c: usize,
    pub incidences: u64,
    pub wall_s: f64,
    pub threads: usize,
}

pub fn bench_counting(
    prime: u64,
    size_p: usize,
    size_c: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<BenchReport, HarnessError> {
    let config = ExperimentConfig {
        seed,
        threads,
        ..ExperimentConfig::new(
            prime,
            PointGenerator::RandomUniform { count: size_p },
            FamilyGenerator::Random {
                kind: FamilyKind::Conics,
                count: size_c,
            },
        )
    };
    let (points, family) = generate(&config)?;
    let count_once = || -> Result<(u64, f64), HarnessError> {
        let started = Instant::now();
        let total = count_incidences(&points, &family).map_err(|e| usage(e.to_string()))?;
        Ok((total, started.elapsed().as_secs_f64()))
    };
    #[cfg(feature = "parallel")]
    let ((incidences, wall_s), effective) = match threads {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| usage(format!("thread pool: {e}")))?;
            (pool.install(count_once)?, n)
        }
        _ => (count_once()?, rayon::current_num_threads()),
    };
    #[cfg(not(feature = "parallel"))]
    let ((incidences, wall_s), effective) = (count_once()?, 1);
    Ok(BenchReport {
        size_p: points.len(),
        size_c: family.len(),
        incidences,
        wall_s,
        threads: effective,
    })
}

// ---- configuration files ------------------------------------------------

/// Parse a named curve kind.
pub fn parse_kind(s: &str) -> Result<FamilyKind, HarnessError> {
    match s {
        "lines" => Ok(FamilyKind::Lines),
        "conics" => Ok(FamilyKind::Conics),
        "circles" => Ok(FamilyKind::Circles),
        "parabolas" => Ok(FamilyKind::Parabolas),
        "hyperbolas" => Ok(FamilyKind::Hyperbolas),
        "mobius" => Ok(FamilyKind::MobiusGraphs),
        "spheres" => Ok(FamilyKind::Spheres),
        "hyperplanes" => Ok(FamilyKind::Hyperplanes),
        other => Err(usage(format!(
            "unknown curve kind {other:?}; expected lines, conics, circles, parabolas, \
             hyperbolas, mobius, spheres, or hyperplanes"
        ))),
    }
}

/// Parse a comma-separated list of stable bound names.
pub fn parse_bound_list(s: &str) -> Result<Vec<BoundId>, HarnessError> {
    s.split(',')
        .map(str::trim)
        .filter(|part| !part.is_empty())
        .map(|part| BoundId::from_name(part).map_err(HarnessError::from))
        .collect()
}

/// Flat key=value experiment configuration.
///
/// Keys (one per line; `#` starts a comment):
/// `prime`, `generator` (uniform|cartesian|on-curve|coset), `count`,
/// `size-a`, `size-b`, `curve` (kind for on-curve), `family`
/// (random|coefficient-product), `family-kind`, `family-count`, `set-size`,
/// `seed`, `trials`, `bounds` (comma-separated names), `k`, `threads`,
/// `timing` (true|false).
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let mut prime = None;
    let mut generator_name = None;
    let mut count = None;
    let mut size_a = None;
    let mut size_b = None;
    let mut curve_kind = None;
    let mut family_name = None;
    let mut family_kind = None;
    let mut family_count = None;
    let mut set_size = None;
    let mut seed = 0u64;
    let mut trials = 1u64;
    let mut bounds = Vec::new();
    let mut richness = None;
    let mut threads = None;
    let mut timing = true;

    fn num<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
    where
        T::Err: fmt::Display,
    {
        value
            .parse()
            .map_err(|e| usage(format!("config key {key}: {e}")))
    }

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "prime" => prime = Some(num::<u64>(key, value)?),
            "generator" => generator_name = Some(value.to_string()),
            "count" => count = Some(num::<usize>(key, value)?),
            "size-a" => size_a = Some(num::<usize>(key, value)?),
            "size-b" => size_b = Some(num::<usize>(key, value)?),
            "curve" => curve_kind = Some(parse_kind(value)?),
            "family" => family_name = Some(value.to_string()),
            "family-kind" => family_kind = Some(parse_kind(value)?),
            "family-count" => family_count = Some(num::<usize>(key, value)?),
            "set-size" => set_size = Some(num::<usize>(key, value)?),
            "seed" => seed = num::<u64>(key, value)?,
            "trials" => trials = num::<u64>(key, value)?,
            "bounds" => bounds = parse_bound_list(value)?,
            "k" => richness = Some(num::<u64>(key, value)?),
            "threads" => threads = Some(num::<usize>(key, value)?),
            "timing" => timing = num::<bool>(key, value)?,
            other => return Err(usage(format!("unknown config key {other:?}"))),
        }
    }

    let prime = prime.ok_or_else(|| usage("config needs a prime"))?;
    let generator = match generator_name.as_deref() {
        Some("uniform") => PointGenerator::RandomUniform {
            count: count.ok_or_else(|| usage("generator uniform needs count"))?,
        },
        Some("cartesian") => PointGenerator::CartesianProduct {
            size_a: size_a.ok_or_else(|| usage("generator cartesian needs size-a"))?,
            size_b: size_b.ok_or_else(|| usage("generator cartesian needs size-b"))?,
        },
        Some("on-curve") => PointGenerator::OnCurve {
            kind: curve_kind.ok_or_else(|| usage("generator on-curve needs curve"))?,
            count: count.ok_or_else(|| usage("generator on-curve needs count"))?,
        },
        Some("coset") => PointGenerator::CosetLike {
            size_a: size_a.ok_or_else(|| usage("generator coset needs size-a"))?,
            size_b: size_b.ok_or_else(|| usage("generator coset needs size-b"))?,
        },
        Some(other) => {
            return Err(usage(format!(
                "unknown generator {other:?}; expected uniform, cartesian, on-curve, or coset"
            )))
        }
        None => return Err(usage("config needs a generator")),
    };
    let family = match family_name.as_deref() {
        Some("random") => FamilyGenerator::Random {
            kind: family_kind.unwrap_or(FamilyKind::Conics),
            count: family_count.ok_or_else(|| usage("family random needs family-count"))?,
        },
        Some("coefficient-product") => FamilyGenerator::CoefficientProduct {
            set_size: set_size.ok_or_else(|| usage("family coefficient-product needs set-size"))?,
        },
        Some(other) => {
            return Err(usage(format!(
                "unknown family {other:?}; expected random or coefficient-product"
            )))
        }
        None => return Err(usage("config needs a family")),
    };
    Ok(ExperimentConfig {
        prime,
        generator,
        family,
        seed,
        trials,
        bounds,
        richness,
        threads,
        timing,
    })
}

// ---- emission -----------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<ReportFormat, HarnessError> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(usage(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn has_timing(rows: &[ReportRow]) -> bool {
    rows.iter().any(|r| r.wall_ms.is_some())
}

/// RFC-4180-style CSV: header plus one line per row, '\n' line ends, ratios
/// with 6 fractional digits. The wall-time column appears only when timing
/// was recorded, so `timing = false` reruns are byte-identical.
pub fn emit_csv(rows: &[ReportRow]) -> String {
    let mut header: Vec<String> = [
        "trial",
        "prime",
        "instance",
        "sizeP",
        "sizeC",
        "incidences",
        "maxRichness",
        "histogram",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let bound_names: Vec<&'static str> = rows
        .first()
        .map(|r| r.bounds.iter().map(|b| b.id.name()).collect())
        .unwrap_or_default();
    for name in &bound_names {
        header.push(format!("{name}_value"));
        header.push(format!("{name}_applicable"));
        header.push(format!("{name}_violations"));
        header.push(format!("{name}_ratio"));
    }
    let timing = has_timing(rows);
    if timing {
        header.push("wallMs".to_string());
    }
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let mut fields = vec![
            row.trial.to_string(),
            row.prime.to_string(),
            csv_escape(&row.instance),
            row.size_p.to_string(),
            row.size_c.to_string(),
            row.incidences.to_string(),
            row.max_richness.to_string(),
            csv_escape(&row.histogram),
        ];
        for b in &row.bounds {
            fields.push(format!("{:.6}", b.value));
            fields.push(b.applicable.to_string());
            fields.push(csv_escape(&b.violations.join("; ")));
            fields.push(match b.ratio {
                Some(r) => format!("{r:.6}"),
                None => String::new(),
            });
        }
        if timing {
            fields.push(match row.wall_ms {
                Some(w) => format!("{w:.3}"),
                None => String::new(),
            });
        }
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// JSON array of row objects with stable key names.
pub fn emit_json(rows: &[ReportRow]) -> String {
    let timing = has_timing(rows);
    let array: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let bounds: Vec<serde_json::Value> = row
                .bounds
                .iter()
                .map(|b| {
                    serde_json::json!({
                        "name": b.id.name(),
                        "value": b.value,
                        "applicable": b.applicable,
                        "violations": b.violations,
                        "ratio": b.ratio,
                    })
                })
                .collect();
            let mut obj = serde_json::json!({
                "trial": row.trial,
                "prime": row.prime,
                "instance": row.instance,
                "sizeP": row.size_p,
                "sizeC": row.size_c,
                "incidences": row.incidences,
                "maxRichness": row.max_richness,
                "histogram": row.histogram,
                "bounds": bounds,
            });
            if timing {
                obj["wallMs"] = serde_json::json!(row.wall_ms);
            }
            obj
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&array).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn emit(rows: &[ReportRow], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => emit_csv(rows),
        ReportFormat::Json => emit_json(rows),
    }
}
