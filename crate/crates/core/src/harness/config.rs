//! Experiment configuration in TOML.
//!
//! ```toml
//! schema_version = 1
//! name = "cantor-champernowne"
//! seed = 0
//! x0 = [[0.0], [1.0], [5.0]]
//!
//! [ifs]
//! maps = [
//!     { matrix = [[0.3333333333333333]], offset = [0.0] },
//!     { matrix = [[0.3333333333333333]], offset = [0.6666666666666666] },
//! ]
//!
//! [driver]
//! kind = "champernowne"          # de_bruijn | example4 | random | literal | slow
//!
//! [eps]
//! kind = "geometric"             # list | chain | schedule
//! a = 1.0
//! r = 0.3333333333333333
//! m_lo = 8
//! m_hi = 12
//!
//! [cloud]
//! kind = "sampled"               # example4_fixture | points
//! resolution = 1e-7
//!
//! [caps]
//! orbit = 100000000
//! ```
//!
//! Optional sections: `[dimension]` (`a`, `r`, `m_lo`, `m_hi`) and
//! `[output]` (`dir`, `cache`). `[caps]` also takes `certify` (search each
//! radius again at `eps − resolution`). Unknown keys are rejected.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::constructions::{RateFunction, DEFAULT_MIN_OUTSIDE};
use crate::error::{Error, Result};
use crate::ifs::{AffineMap, IfsSystem, DEFAULT_POINT_BUDGET};
use crate::words::{Symbol, MAX_ALPHABET};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub x0: Vec<Vec<f64>>,
    pub ifs: IfsSpec,
    pub driver: DriverSpec,
    pub eps: EpsSpec,
    pub cloud: CloudSpec,
    pub caps: Caps,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<ScaleSpec>,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    pub maps: Vec<MapSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    /// Matrix rows.
    pub matrix: Vec<Vec<f64>>,
    pub offset: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriverSpec {
    Champernowne {},
    DeBruijn {},
    Example4 {
        z: f64,
    },
    /// Uses the top-level seed.
    Random {},
    /// A finite word; running past its end is an error.
    Literal {
        symbols: Vec<Symbol>,
    },
    Slow {
        psi: PsiSpec,
        k_max: usize,
        step_cap: u64,
        #[serde(default = "default_min_outside")]
        min_outside: usize,
        #[serde(default)]
        tail: TailKind,
    },
}

fn default_min_outside() -> usize {
    DEFAULT_MIN_OUTSIDE
}

/// Driver continuing a slow driver after its last block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    #[default]
    Champernowne,
    DeBruijn,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiSpec {
    Power {
        z: f64,
    },
    Iterexp {
        n: u32,
    },
    Bounding {
        x0: Vec<f64>,
    },
    /// `[eps, psi(eps)]` pairs.
    Table {
        points: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EpsSpec {
    /// `a·r^m` for `m_lo ..= m_hi`.
    Geometric {
        a: f64,
        r: f64,
        m_lo: u32,
        m_hi: u32,
    },
    List {
        values: Vec<f64>,
    },
    /// Per start point, `c_m(x0) + resolution` with
    /// `c_m(x0) = L^m·(diam A + d(x0, A))` from the cloud's upper bounds.
    Chain {
        m_lo: u32,
        m_hi: u32,
    },
    /// `3·C_{m_k}` for every block of a slow driver.
    Schedule {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CloudSpec {
    Sampled {
        resolution: f64,
        #[serde(default = "default_point_budget")]
        point_budget: usize,
    },
    /// `{0} ∪ {2^-n : n ≤ n_max}`, the exact attractor of `{x/2, 1}` up to
    /// `2^-n_max`.
    Example4Fixture { n_max: u32 },
    /// A caller-certified subset of the attractor within `resolution` of it.
    Points {
        points: Vec<Vec<f64>>,
        resolution: f64,
    },
}

fn default_point_budget() -> usize {
    DEFAULT_POINT_BUDGET
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Caps {
    /// Largest orbit index searched for each recovery time.
    pub orbit: u64,
    #[serde(default)]
    pub certify: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub a: f64,
    pub r: f64,
    pub m_lo: u32,
    pub m_hi: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.dir.is_none() && self.cache.is_none()
    }
}

/// Parses and validates a configuration, reporting every violation found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    /// Canonical TOML form; `parse_config` of it yields `self` again.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config values are representable in TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            errs.push(format!(
                "schema_version must be {SCHEMA_VERSION}, got {}",
                self.schema_version
            ));
        }
        if self.name.trim().is_empty() {
            errs.push("name must not be empty".into());
        }
        match self.ifs.build() {
            Ok(_) => {}
            Err(Error::Config(e)) => errs.extend(e),
            Err(e) => errs.push(e.to_string()),
        }
        let dim = self.ifs.maps.first().map(|m| m.offset.len());
        let k = self.ifs.maps.len();

        if self.x0.is_empty() {
            errs.push("x0 needs at least one start point".into());
        }
        for (i, x) in self.x0.iter().enumerate() {
            if Some(x.len()) != dim {
                errs.push(format!(
                    "x0[{i}] has dimension {}, expected {}",
                    x.len(),
                    dim.unwrap_or(0)
                ));
            }
            if x.iter().any(|v| !v.is_finite()) {
                errs.push(format!("x0[{i}] has a non-finite coordinate"));
            }
        }

        self.validate_driver(k, dim, &mut errs);
        self.validate_eps(&mut errs);

        match &self.cloud {
            CloudSpec::Sampled {
                resolution,
                point_budget,
            } => {
                if !(*resolution > 0.0 && resolution.is_finite()) {
                    errs.push(format!(
                        "cloud.resolution must be positive, got {resolution}"
                    ));
                }
                if *point_budget == 0 {
                    errs.push("cloud.point_budget must be positive".into());
                }
            }
            CloudSpec::Example4Fixture { n_max } => {
                if *n_max > 1000 {
                    errs.push(format!("cloud.n_max = {n_max} is beyond double precision"));
                }
                if dim != Some(1) {
                    errs.push("cloud kind example4_fixture needs a one-dimensional IFS".into());
                }
            }
            CloudSpec::Points { points, resolution } => {
                if points.is_empty() {
                    errs.push("cloud.points must not be empty".into());
                }
                if points
                    .iter()
                    .any(|p| Some(p.len()) != dim || p.iter().any(|v| !v.is_finite()))
                {
                    errs.push("cloud.points must be finite points of the IFS dimension".into());
                }
                if !(*resolution >= 0.0 && resolution.is_finite()) {
                    errs.push(format!(
                        "cloud.resolution must be non-negative, got {resolution}"
                    ));
                }
            }
        }

        if self.caps.orbit == 0 {
            errs.push("caps.orbit must be positive".into());
        }
        if let Some(s) = &self.dimension {
            if !(s.a > 0.0 && s.a.is_finite()) || !(s.r > 0.0 && s.r < 1.0) || s.m_lo > s.m_hi {
                errs.push(format!(
                    "dimension schedule a={}, r={}, m={}..={} is invalid",
                    s.a, s.r, s.m_lo, s.m_hi
                ));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    fn validate_driver(&self, k: usize, dim: Option<usize>, errs: &mut Vec<String>) {
        match &self.driver {
            DriverSpec::Champernowne {} | DriverSpec::Random {} => {}
            DriverSpec::DeBruijn {} => {
                if k < 2 {
                    errs.push("driver de_bruijn needs at least two maps".into());
                }
            }
            DriverSpec::Example4 { z } => {
                if !(*z > 0.0 && z.is_finite()) {
                    errs.push(format!("driver.z must be positive, got {z}"));
                }
                if k != 2 {
                    errs.push("driver example4 needs exactly two maps".into());
                }
            }
            DriverSpec::Literal { symbols } => {
                if symbols.is_empty() {
                    errs.push("driver.symbols must not be empty".into());
                }
                if let Some(s) = symbols.iter().find(|&&s| s == 0 || usize::from(s) > k) {
                    errs.push(format!("driver symbol {s} is outside 1..={k}"));
                }
            }
            DriverSpec::Slow {
                psi,
                k_max,
                step_cap,
                tail,
                ..
            } => {
                if *k_max == 0 {
                    errs.push("driver.k_max must be at least 1".into());
                }
                if *step_cap == 0 {
                    errs.push("driver.step_cap must be positive".into());
                }
                if *tail == TailKind::DeBruijn && k < 2 {
                    errs.push("driver.tail de_bruijn needs at least two maps".into());
                }
                match psi {
                    PsiSpec::Bounding { x0 } => {
                        if Some(x0.len()) != dim || x0.iter().any(|v| !v.is_finite()) {
                            errs.push(
                                "driver.psi.x0 must be a finite point of the IFS dimension".into(),
                            );
                        }
                    }
                    other => {
                        if let Err(e) = other.to_rate_without_cloud().and_then(|r| r.validate()) {
                            errs.push(format!("driver.psi: {e}"));
                        }
                    }
                }
            }
        }
        if k > MAX_ALPHABET {
            errs.push(format!("at most {MAX_ALPHABET} maps are supported"));
        }
    }

    fn validate_eps(&self, errs: &mut Vec<String>) {
        match &self.eps {
            EpsSpec::Geometric { a, r, m_lo, m_hi } => {
                if !(*a > 0.0 && a.is_finite()) {
                    errs.push(format!("eps.a must be positive, got {a}"));
                }
                if !(*r > 0.0 && *r < 1.0) {
                    errs.push(format!(
                        "eps.r must lie in (0, 1) for a strictly decreasing schedule, got {r}"
                    ));
                }
                if m_lo > m_hi {
                    errs.push(format!("eps.m_lo = {m_lo} exceeds eps.m_hi = {m_hi}"));
                }
            }
            EpsSpec::List { values } => {
                if values.is_empty() {
                    errs.push("eps.values must not be empty".into());
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    errs.push("eps.values must be positive and finite".into());
                }
                if values.windows(2).any(|w| w[1] >= w[0]) {
                    errs.push("eps.values must be strictly decreasing".into());
                }
            }
            EpsSpec::Chain { m_lo, m_hi } => {
                if m_lo > m_hi {
                    errs.push(format!("eps.m_lo = {m_lo} exceeds eps.m_hi = {m_hi}"));
                }
            }
            EpsSpec::Schedule {} => {
                if !matches!(self.driver, DriverSpec::Slow { .. }) {
                    errs.push("eps kind schedule needs a slow driver".into());
                }
            }
        }
    }
}

impl IfsSpec {
    pub fn from_system(ifs: &IfsSystem) -> Self {
        Self {
            maps: ifs
                .maps()
                .iter()
                .map(|m| MapSpec {
                    matrix: m.matrix_rows(),
                    offset: m.offset().to_vec(),
                })
                .collect(),
        }
    }

    /// Builds the system, collecting one message per offending map.
    pub fn build(&self) -> Result<IfsSystem> {
        if self.maps.is_empty() {
            return Err(Error::Config(vec!["ifs.maps must not be empty".into()]));
        }
        let mut errs = Vec::new();
        let mut maps = Vec::with_capacity(self.maps.len());
        for (i, m) in self.maps.iter().enumerate() {
            match AffineMap::new(m.matrix.clone(), m.offset.clone()) {
                Ok(map) => maps.push(map),
                Err(e) => errs.push(format!("ifs.maps[{i}]: {e}")),
            }
        }
        if !errs.is_empty() {
            return Err(Error::Config(errs));
        }
        IfsSystem::new(maps).map_err(|e| Error::Config(vec![format!("ifs: {e}")]))
    }
}

impl PsiSpec {
    /// The rate function, except for `bounding`, which needs the cloud.
    pub(crate) fn to_rate_without_cloud(&self) -> Result<RateFunction> {
        match self {
            PsiSpec::Power { z } => RateFunction::power(*z),
            PsiSpec::Iterexp { n } => RateFunction::iterexp(*n),
            PsiSpec::Table { points } => {
                RateFunction::table(points.iter().map(|p| (p[0], p[1])).collect())
            }
            PsiSpec::Bounding { .. } => {
                Err(Error::InvalidInput("bounding rate needs a cloud".into()))
            }
        }
    }
}
