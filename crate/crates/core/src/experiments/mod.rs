//! Drivers that assemble balls, rays and shift-space partitions into audits
//! with machine-readable reports.

mod audits;
mod lemmas;
mod report;
mod sample;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cayley::{
    estimate_delta, regular_tree_ball_size, CayleyBall, DeltaParams, HyperbolicityEstimate,
};
use crate::error::{Error, Result};
use crate::group::{GroupOracle, Preset};
use crate::rational::Rational;

pub use audits::{
    audit_asdim_boundary, audit_claim, audit_free_shift, audit_hyperfiniteness_witness,
    audit_lemma_bound,
};
pub use lemmas::{audit_substitution, audit_tubular};
pub use report::{Assertion, ExperimentReport, Status, Table, REPORT_SCHEMA_VERSION};
pub use sample::{exact_sigma, schreier_distance, BoundaryMetricSample, SchreierDistance};

/// Everything a run depends on; echoed verbatim into every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Preset name or presentation file path.
    pub group: String,
    /// Letter order of the alphabet, as symbols.
    pub letter_order: String,
    pub ball_radius: usize,
    pub vertex_cap: usize,
    pub delta_params: DeltaParams,
    pub delta_override: Option<Rational>,
    /// Periodic bases of the sampled rays.
    pub eta: Vec<String>,
    pub zeta: Option<String>,
    pub r: usize,
    /// Length `N` of the σ̂ truncations.
    pub depth: usize,
    /// Horizon `M` of the lex-least search.
    pub horizon: usize,
    pub margin: usize,
    /// Minimum overlap for truncated `ρ_s`.
    pub min_window: usize,
    pub seed: u64,
    /// Rays sampled by the free-shift audit.
    pub sample: usize,
    pub filtration: Vec<usize>,
    /// Largest segment replaced by the substitution audit.
    pub max_segment: usize,
}

impl RunConfig {
    /// Shipped scales for a preset.
    pub fn for_preset(preset: Preset) -> Self {
        let oracle = preset.oracle();
        let letter_order: String = oracle.alphabet().symbols().iter().collect();
        let base = RunConfig {
            group: preset.name().into(),
            letter_order,
            ball_radius: 6,
            vertex_cap: crate::cayley::DEFAULT_VERTEX_CAP,
            delta_params: DeltaParams::new(4, 30_000, 1),
            delta_override: None,
            eta: vec!["a".into(), "ab".into()],
            zeta: None,
            r: 1,
            depth: 8,
            horizon: 16,
            margin: 4,
            min_window: 8,
            seed: 1,
            sample: 100,
            filtration: vec![0, 1, 2, 4, 8],
            max_segment: 5,
        };
        match preset {
            Preset::F2 => base,
            Preset::F3 => RunConfig {
                ball_radius: 5,
                delta_params: DeltaParams::new(3, 40_000, 1),
                eta: vec!["a".into(), "abc".into()],
                ..base
            },
            Preset::Z2Z3 => RunConfig {
                ball_radius: 8,
                eta: vec!["ab".into(), "aB".into()],
                depth: 6,
                horizon: 12,
                ..base
            },
            Preset::Genus2 => RunConfig {
                delta_params: DeltaParams {
                    bigon_cap: 64,
                    ..DeltaParams::new(6, 20_000, 1)
                },
                eta: vec!["ac".into(), "abc".into()],
                depth: 4,
                horizon: 4,
                margin: 2,
                min_window: 2,
                ..base
            },
        }
    }
}

/// Where the ball-size bound `M_{5δ}` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MSource {
    /// Counted in the ball.
    Ball,
    /// `5δ` exceeds the ball radius; the regular-tree ball size bounds it.
    RegularTree,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaInfo {
    pub measured: HyperbolicityEstimate,
    pub override_value: Option<Rational>,
    /// `max(measured slimness, override)`.
    pub used: Rational,
    pub m: u128,
    pub m_source: MSource,
}

impl DeltaInfo {
    /// `⌈2δ⌉`, the slack of the lex-least search.
    pub fn slack(&self) -> usize {
        self.used.scale(2).ceil() as usize
    }

    pub fn m_squared(&self) -> u128 {
        self.m.saturating_mul(self.m)
    }
}

/// A group with its ball and the constants every audit uses.
pub struct GroupContext {
    pub config: RunConfig,
    pub ball: CayleyBall,
    pub delta: DeltaInfo,
}

impl GroupContext {
    pub fn new(oracle: Arc<GroupOracle>, config: RunConfig) -> Result<Self> {
        if config.vertex_cap == 0 {
            return Err(Error::Config("vertex cap must be positive".into()));
        }
        let ball = CayleyBall::build(oracle, config.ball_radius, config.vertex_cap)?;
        let measured = estimate_delta(&ball, config.delta_params)?;
        let used = match config.delta_override {
            Some(o) if o > measured.delta_slim => o,
            _ => measured.delta_slim,
        };
        let k = used.scale(5).floor() as usize;
        let (m, m_source) = if k <= ball.radius() {
            (ball.ball_size(k)? as u128, MSource::Ball)
        } else {
            (
                regular_tree_ball_size(ball.oracle().alphabet().len(), k),
                MSource::RegularTree,
            )
        };
        Ok(GroupContext {
            delta: DeltaInfo {
                measured,
                override_value: config.delta_override,
                used,
                m,
                m_source,
            },
            config,
            ball,
        })
    }

    pub fn preset(preset: Preset) -> Result<Self> {
        GroupContext::new(Arc::new(preset.oracle()), RunConfig::for_preset(preset))
    }

    pub fn oracle(&self) -> &GroupOracle {
        self.ball.oracle()
    }

    /// Exact σ is available: the family's normal forms are its geodesics.
    pub fn exact_mode(&self) -> bool {
        self.oracle().has_geodesic_normal_form()
    }
}
