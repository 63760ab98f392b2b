//! Incidence geometry of points against conics and their relatives over a
//! prime field F_p.
//!
//! The crate is organized bottom-up:
//!
//! - [`field`] — exact arithmetic in F_p, small dense matrices, linear solving;
//! - [`proj`] — the projective plane PG(2, p): points, lines, transformations,
//!   plus affine points and hyperplanes in arbitrary dimension;
//! - [`curves`] — conics and their distinguished subfamilies (circles,
//!   parabolas, hyperbolas, Möbius graphs, spheres), classification, and the
//!   conic ↔ Möbius-graph equivalence;
//! - [`incidence`] — exact incidence counting between point sets and curve
//!   families, incidence histograms, k-rich curve extraction, and the
//!   point/curve dualities that turn circles, parabolas, hyperbolas and
//!   spheres into lines and hyperplanes;
//! - [`bounds`] — an evaluable catalog of incidence and distance-set bounds
//!   with exact rational exponents, applicability checks, and comparisons;
//! - [`apps`] — pinned distance sets, two-set planar distances, polynomial
//!   images, higher-dimensional distance sets, and Beck-type conic counting;
//! - [`harness`] — seeded experiment configs, point/family generators, and
//!   CSV/JSON report emission for comparing measured counts against bounds;
//! - [`checks`] — exhaustive small-prime and randomized verification suites
//!   shared by the CLI invariant runner and the acceptance tests.
//!
//! All counting is exact integer arithmetic; nothing is sampled unless a
//! generator is explicitly asked to sample.

pub mod field;
pub mod proj;
pub mod curves;
pub mod incidence;
pub mod bounds;
pub mod apps;
pub mod harness;
pub mod checks;
