//! Shipped experiment presets.

use super::config::{
    Caps, CloudSpec, DriverSpec, EpsSpec, ExperimentConfig, IfsSpec, OutputSpec, PsiSpec,
    ScaleSpec, TailKind, SCHEMA_VERSION,
};
use crate::ifs::IfsSystem;

pub const PRESET_NAMES: [&str; 7] = [
    "cantor-champernowne",
    "cantor-debruijn",
    "sierpinski-debruijn",
    "example4-z1",
    "example4-z05",
    "slow-power-z1",
    "segment-dimension",
];

/// The preset called `name`, if there is one.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let third = 1.0 / 3.0;
    let config = match name {
        "cantor-champernowne" => base(
            name,
            &IfsSystem::cantor(),
            DriverSpec::Champernowne {},
            vec![vec![0.0], vec![1.0], vec![5.0]],
            EpsSpec::Geometric {
                a: 1.0,
                r: third,
                m_lo: 8,
                m_hi: 12,
            },
            sampled(1e-7),
            Some(ScaleSpec {
                a: 1.0,
                r: third,
                m_lo: 1,
                m_hi: 13,
            }),
        ),
        "cantor-debruijn" => base(
            name,
            &IfsSystem::cantor(),
            DriverSpec::DeBruijn {},
            vec![vec![-1.0], vec![0.0], vec![0.5], vec![1.0], vec![2.0]],
            EpsSpec::Chain { m_lo: 2, m_hi: 12 },
            sampled(1e-7),
            None,
        ),
        "sierpinski-debruijn" => base(
            name,
            &IfsSystem::sierpinski(),
            DriverSpec::DeBruijn {},
            vec![
                vec![0.0, 0.0],
                vec![0.5, 0.3],
                vec![1.0, 1.0],
                vec![-0.5, 0.5],
            ],
            EpsSpec::Chain { m_lo: 1, m_hi: 9 },
            sampled(1e-3),
            Some(ScaleSpec {
                a: 1.0,
                r: 0.5,
                m_lo: 1,
                m_hi: 8,
            }),
        ),
        "example4-z1" => base(
            name,
            &IfsSystem::example4(),
            DriverSpec::Example4 { z: 1.0 },
            vec![vec![-1.0], vec![0.0], vec![0.3], vec![1.0], vec![2.0]],
            EpsSpec::Geometric {
                a: 1.0,
                r: 0.5,
                m_lo: 3,
                m_hi: 12,
            },
            CloudSpec::Example4Fixture { n_max: 15 },
            None,
        ),
        "example4-z05" => base(
            name,
            &IfsSystem::example4(),
            DriverSpec::Example4 { z: 0.5 },
            vec![vec![-1.0], vec![0.0], vec![0.3], vec![1.0], vec![2.0]],
            EpsSpec::Geometric {
                a: 1.0,
                r: 0.5,
                m_lo: 10,
                m_hi: 16,
            },
            CloudSpec::Example4Fixture { n_max: 19 },
            None,
        ),
        "slow-power-z1" => {
            let mut c = base(
                name,
                &IfsSystem::cantor(),
                DriverSpec::Slow {
                    psi: PsiSpec::Power { z: 1.0 },
                    k_max: 5,
                    step_cap: 5_000_000,
                    min_outside: crate::constructions::DEFAULT_MIN_OUTSIDE,
                    tail: TailKind::Champernowne,
                },
                [-1.0, -0.5, 0.0, 0.3, 0.5, 1.0, 1.5, 2.0]
                    .iter()
                    .map(|&x| vec![x])
                    .collect(),
                EpsSpec::Schedule {},
                sampled(1e-8),
                None,
            );
            c.caps.orbit = 6_000_000;
            c
        }
        "segment-dimension" => base(
            name,
            &IfsSystem::segment(),
            DriverSpec::Champernowne {},
            vec![vec![0.0]],
            EpsSpec::Geometric {
                a: 0.25,
                r: 0.5,
                m_lo: 0,
                m_hi: 6,
            },
            sampled(1e-5),
            Some(ScaleSpec {
                a: 1.0,
                r: 0.5,
                m_lo: 1,
                m_hi: 14,
            }),
        ),
        _ => return None,
    };
    Some(config)
}

fn sampled(resolution: f64) -> CloudSpec {
    CloudSpec::Sampled {
        resolution,
        point_budget: crate::ifs::DEFAULT_POINT_BUDGET,
    }
}

fn base(
    name: &str,
    ifs: &IfsSystem,
    driver: DriverSpec,
    x0: Vec<Vec<f64>>,
    eps: EpsSpec,
    cloud: CloudSpec,
    dimension: Option<ScaleSpec>,
) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        name: name.to_string(),
        seed: 0,
        x0,
        ifs: IfsSpec::from_system(ifs),
        driver,
        eps,
        cloud,
        caps: Caps {
            orbit: 100_000_000,
            certify: true,
        },
        dimension,
        output: OutputSpec::default(),
    }
}
