//! Verification campaigns: a JSON configuration in, JSON-lines reports out.
//!
//! ```json
//! {
//!   "seed": 42,
//!   "trials": 50,
//!   "tol": 1e-9,
//!   "mode": "both",
//!   "identities": [
//!     { "id": "thmrn", "params": { "n": 3 } },
//!     { "id": "cornew", "params": { "m": [2, 2] }, "trials": 10 },
//!     { "id": "kawanaka", "params": { "n": 2, "D": 4 } }
//!   ]
//! }
//! ```
//!
//! Every top-level field is optional and acts as a default for the entries,
//! which may override `seed`, `trials`, `tol` and `mode`. `params` takes
//! the bounds `n`, `N`, `m`, `D` and `r` that the identity accepts (see
//! `list-identities`). `mode` is `numeric`, `exact` or `both`; `both` runs
//! whichever of the two the identity supports.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use theta_forge::registry::{self, IdentityInfo, Mode, Params, Point, RegistryError, TrialOutcome};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_TRIALS: u64 = 10;
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeChoice {
    Numeric,
    Exact,
    Both,
}

impl ModeChoice {
    fn modes(self) -> &'static [Mode] {
        match self {
            ModeChoice::Numeric => &[Mode::Numeric],
            ModeChoice::Exact => &[Mode::Exact],
            ModeChoice::Both => &[Mode::Numeric, Mode::Exact],
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Campaign {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub tol: Option<f64>,
    pub mode: Option<ModeChoice>,
    #[serde(default)]
    pub identities: Vec<Entry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub id: String,
    #[serde(default)]
    pub params: Params,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub tol: Option<f64>,
    pub mode: Option<ModeChoice>,
}

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Run(RegistryError),
}

impl CampaignError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CampaignError::Config(_) => 2,
            CampaignError::Run(_) => 3,
        }
    }
}

/// One fully resolved identity run.
#[derive(Debug, Clone)]
pub struct Job {
    pub info: IdentityInfo,
    pub mode: Mode,
    pub params: Params,
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub id: String,
    pub mode: Mode,
    pub params: Params,
    pub seed: u64,
    pub trials: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_pass: Option<bool>,
    pub pass: bool,
    pub worst_point: Option<WorstPoint>,
    pub ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstPoint {
    pub trial: u64,
    #[serde(flatten)]
    pub values: Point,
}

impl IdentityReport {
    /// The report as one JSON line.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }

    /// The JSON line with the timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> String {
        IdentityReport { ms: 0, ..self.clone() }.to_json()
    }
}

pub fn parse_campaign(text: &str) -> Result<Campaign, CampaignError> {
    serde_json::from_str(text).map_err(|e| CampaignError::Config(e.to_string()))
}

/// Resolves every entry before anything runs, so configuration mistakes
/// surface first.
pub fn plan(c: &Campaign) -> Result<Vec<Job>, CampaignError> {
    let mut jobs = Vec::new();
    for e in &c.identities {
        let info = registry::lookup(&e.id).map_err(|err| CampaignError::Config(err.to_string()))?;
        let params = info.resolve(&e.params).map_err(|err| CampaignError::Config(err.to_string()))?;
        let choice = e.mode.or(c.mode).unwrap_or(ModeChoice::Both);
        let modes: Vec<Mode> = choice.modes().iter().copied().filter(|m| info.supports(*m)).collect();
        if modes.is_empty() {
            return Err(CampaignError::Config(format!(
                "identity `{}` supports only {:?}",
                info.id,
                info.modes.iter().map(|m| m.as_str()).collect::<Vec<_>>()
            )));
        }
        let tol = e.tol.or(c.tol).unwrap_or(DEFAULT_TOL);
        if !(tol >= 0.0) {
            return Err(CampaignError::Config(format!("tolerance {tol} must be nonnegative")));
        }
        let trials = if info.sampled {
            e.trials.or(c.trials).unwrap_or(DEFAULT_TRIALS)
        } else {
            1
        };
        for mode in modes {
            jobs.push(Job {
                info: info.clone(),
                mode,
                params: params.clone(),
                seed: e.seed.or(c.seed).unwrap_or(DEFAULT_SEED),
                trials,
                tol,
            });
        }
    }
    // Reports come out ordered by id; entries sharing an id keep their
    // configuration order.
    jobs.sort_by(|a, b| a.info.id.cmp(b.info.id));
    Ok(jobs)
}

/// Runs one job; trials run in parallel but each draws from its own
/// substream, so the report does not depend on scheduling.
pub fn run_job(job: &Job) -> Result<IdentityReport, CampaignError> {
    let start = Instant::now();
    let outcomes: Vec<TrialOutcome> = (0..job.trials)
        .into_par_iter()
        .map(|k| registry::run_trial(&job.info, job.mode, &job.params, job.seed, k))
        .collect::<Result<_, _>>()
        .map_err(CampaignError::Run)?;
    let ms = start.elapsed().as_millis() as u64;
    let mut report = IdentityReport {
        id: job.info.id.to_string(),
        mode: job.mode,
        params: job.params.clone(),
        seed: job.seed,
        trials: job.trials,
        tol: None,
        max_residual: None,
        exact_pass: None,
        pass: true,
        worst_point: None,
        ms,
    };
    match job.mode {
        Mode::Numeric => {
            let mut worst: Option<(u64, f64, Point)> = None;
            for (k, o) in outcomes.into_iter().enumerate() {
                if let TrialOutcome::Residual { residual, point } = o {
                    if worst.as_ref().map_or(true, |w| residual > w.1) {
                        worst = Some((k as u64, residual, point));
                    }
                }
            }
            let max = worst.as_ref().map_or(0.0, |w| w.1);
            report.tol = Some(job.tol);
            report.max_residual = Some(max);
            report.pass = max < job.tol;
            report.worst_point = worst.map(|(trial, _, values)| WorstPoint { trial, values });
        }
        Mode::Exact => {
            let failure = outcomes.into_iter().enumerate().find_map(|(k, o)| match o {
                TrialOutcome::Exact { pass: false, point } => Some((k as u64, point)),
                _ => None,
            });
            report.pass = failure.is_none();
            report.exact_pass = Some(report.pass);
            report.worst_point = failure.map(|(trial, values)| WorstPoint { trial, values });
        }
    }
    Ok(report)
}

/// Outcome of a whole campaign: the reports produced, in configuration
/// order, and the process exit code.
#[derive(Debug)]
pub struct CampaignResult {
    pub reports: Vec<IdentityReport>,
    pub errors: Vec<CampaignError>,
    pub exit_code: i32,
}

/// Runs every job, calling `emit` on each report as it is produced.
pub fn run_campaign(c: &Campaign, mut emit: impl FnMut(&IdentityReport)) -> Result<CampaignResult, CampaignError> {
    let jobs = plan(c)?;
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for job in &jobs {
        match run_job(job) {
            Ok(r) => {
                emit(&r);
                reports.push(r);
            }
            Err(e) => errors.push(e),
        }
    }
    let exit_code = if !errors.is_empty() {
        3
    } else if reports.iter().any(|r| !r.pass) {
        1
    } else {
        0
    };
    Ok(CampaignResult {
        reports,
        errors,
        exit_code,
    })
}
