//! Deterministic chaos game for contractive affine iterated function systems.
//!
//! * [`ifs`]: affine maps, orbits, certified attractor point clouds, Hausdorff distance.
//! * [`words`]: symbol drivers (Champernowne, de Bruijn, separating blocks, seeded random)
//!   and sliding-window word coverage.
//! * [`constructions`]: rate functions, covering words `σ(d, m)`, the slow-driver
//!   schedule and its block stream.
//! * [`metrics`]: recovery times, covering/packing estimates, box dimension, rate
//!   diagnostics.
//! * [`harness`]: experiment configuration, presets and report emission.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod error;
pub mod harness;
pub mod ifs;
pub mod metrics;
pub mod words;

pub use error::{Error, Result};
pub use ifs::{AffineMap, AttractorCloud, IfsSystem, Orbit};
pub use words::{DriverStream, Symbol, Word};
