//! Randomized verification campaigns over the polygamy checks.
//!
//! A campaign is a list of jobs, each pairing one inequality with a state source and
//! α/μ grids. Items are enumerated in a fixed order (job, state, α, μ) and evaluated
//! in parallel; results are collected by item index, so the report does not depend
//! on the thread count.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::MAX_QUBITS;
use crate::measures::{AlphaParam, MuParam, ALPHA_MIN};
use crate::polygamy::{
    check_eq19_mixed, check_eq19_pure, check_eq1_eq2, check_eq24, check_eq8, check_lemma1,
    CheckMode, InequalityId, InequalityReport, PartitionSpec, Verdict, MAX_MIXED_RANK,
};
use crate::roof::OptBudget;
use crate::states::{
    ginibre_random_mixed, haar_random_pure, named_state, NamedState, RngSeed, State,
};

pub const REPORT_FILE: &str = "report.jsonl";
pub const SUMMARY_FILE: &str = "summary.json";

/// Where the states of a job come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StateSource {
    /// Haar-random pure states.
    Haar { n_qubits: usize, count: usize },
    /// Induced-measure mixed states; state `i` has rank `ranks[i % ranks.len()]`.
    Ginibre {
        n_qubits: usize,
        ranks: Vec<usize>,
        count: usize,
    },
    /// Named pure states such as `"ghz:3"`.
    Named { names: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub inequality: InequalityId,
    pub states: StateSource,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub mus: Vec<f64>,
    #[serde(default)]
    pub mode: CheckMode,
    /// Overrides the campaign seed for this job's states.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub seed: u64,
    #[serde(default)]
    pub budget: OptBudget,
    #[serde(default)]
    pub jobs: Vec<JobConfig>,
}

fn config_error(location: String, message: impl Into<String>) -> Error {
    Error::Parse {
        location,
        message: message.into(),
    }
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig = serde_json::from_str(text).map_err(|e| {
            config_error(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Checks every job, reporting the first problem with its field path.
    pub fn validate(&self) -> Result<()> {
        self.budget
            .validate()
            .map_err(|e| config_error("budget".into(), e.to_string()))?;
        for (j, job) in self.jobs.iter().enumerate() {
            job.validate(&format!("jobs[{j}]"))?;
        }
        Ok(())
    }
}

/// The α range a job requires.
#[derive(Debug, Clone, Copy, PartialEq)]
enum AlphaRule {
    None,
    Analytic,
    Subunit,
    Lemma,
}

impl JobConfig {
    fn pure(&self) -> bool {
        !matches!(self.states, StateSource::Ginibre { .. })
    }

    fn validate(&self, at: &str) -> Result<()> {
        let n_values = self.source_qubits(at)?;
        let id = self.inequality;
        let need_n = |ok: bool, what: &str| -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(config_error(
                    format!("{at}.states"),
                    format!("{id} needs {what}"),
                ))
            }
        };
        let rule = match id {
            InequalityId::Eq1 | InequalityId::Eq2 => {
                need_n(
                    self.pure() && n_values.iter().all(|&n| n >= 3),
                    "pure states on 3..=6 qubits",
                )?;
                AlphaRule::None
            }
            InequalityId::Eq8 => {
                need_n(n_values.iter().all(|&n| n == 2), "two-qubit states")?;
                AlphaRule::Subunit
            }
            InequalityId::Lemma1 => {
                need_n(n_values.iter().all(|&n| n == 2), "two-qubit states")?;
                AlphaRule::Analytic
            }
            InequalityId::Eq19Pure => {
                need_n(
                    self.pure() && n_values.iter().all(|&n| n >= 3),
                    "pure states on 3..=6 qubits",
                )?;
                self.pure_rule()
            }
            InequalityId::Eq19Mixed => {
                need_n(n_values.iter().all(|&n| n == 3), "three-qubit states")?;
                self.mixed_ranks(at)?;
                AlphaRule::Lemma
            }
            InequalityId::Eq24 => {
                if self.pure() {
                    need_n(
                        n_values.iter().all(|&n| n >= 3),
                        "pure states on 3..=6 qubits",
                    )?;
                    self.pure_rule()
                } else {
                    need_n(n_values.iter().all(|&n| n == 3), "three-qubit mixed states")?;
                    self.mixed_ranks(at)?;
                    AlphaRule::Lemma
                }
            }
        };

        if rule == AlphaRule::None {
            if !self.alphas.is_empty() {
                return Err(config_error(
                    format!("{at}.alphas"),
                    format!("{id} takes no alpha values"),
                ));
            }
        } else if self.alphas.is_empty() {
            return Err(config_error(
                format!("{at}.alphas"),
                format!("{id} needs at least one alpha"),
            ));
        }
        for (k, &alpha) in self.alphas.iter().enumerate() {
            let loc = format!("{at}.alphas[{k}]");
            let param =
                AlphaParam::new(alpha).map_err(|e| config_error(loc.clone(), e.to_string()))?;
            let checked = match rule {
                AlphaRule::None => Ok(param),
                AlphaRule::Analytic => param.require_analytic(),
                AlphaRule::Lemma => param.require_lemma_range(),
                AlphaRule::Subunit if param.value() >= ALPHA_MIN && param.value() < 1.0 => {
                    Ok(param)
                }
                AlphaRule::Subunit => Err(Error::AlphaRange {
                    alpha,
                    range: "[(sqrt7-1)/2, 1)",
                }),
            };
            checked.map_err(|e| {
                let why = if rule == AlphaRule::Lemma && self.mode == CheckMode::Certified {
                    format!("{e} (required by {id} in {:?} mode)", self.mode)
                } else {
                    e.to_string()
                };
                config_error(loc, why)
            })?;
        }

        if id == InequalityId::Eq24 {
            if self.mus.is_empty() {
                return Err(config_error(
                    format!("{at}.mus"),
                    "eq24 needs at least one mu",
                ));
            }
        } else if !self.mus.is_empty() {
            return Err(config_error(
                format!("{at}.mus"),
                format!("{id} takes no mu values"),
            ));
        }
        for (k, &mu) in self.mus.iter().enumerate() {
            MuParam::new(mu).map_err(|e| config_error(format!("{at}.mus[{k}]"), e.to_string()))?;
        }
        Ok(())
    }

    fn pure_rule(&self) -> AlphaRule {
        match self.mode {
            CheckMode::Certified => AlphaRule::Lemma,
            CheckMode::Optimized => AlphaRule::Analytic,
        }
    }

    fn mixed_ranks(&self, at: &str) -> Result<()> {
        if let StateSource::Ginibre { ranks, .. } = &self.states {
            if let Some(k) = ranks.iter().position(|&r| r > MAX_MIXED_RANK) {
                return Err(config_error(
                    format!("{at}.states.ranks[{k}]"),
                    format!("{} supports rank <= {MAX_MIXED_RANK}", self.inequality),
                ));
            }
        }
        Ok(())
    }

    /// Register sizes the source produces, after validating the source itself.
    fn source_qubits(&self, at: &str) -> Result<Vec<usize>> {
        let at = format!("{at}.states");
        let check_n = |n: usize| -> Result<()> {
            if (1..=MAX_QUBITS).contains(&n) {
                Ok(())
            } else {
                Err(config_error(
                    format!("{at}.n_qubits"),
                    format!("{n} outside 1..={MAX_QUBITS}"),
                ))
            }
        };
        match &self.states {
            StateSource::Haar { n_qubits, .. } => {
                check_n(*n_qubits)?;
                Ok(vec![*n_qubits])
            }
            StateSource::Ginibre {
                n_qubits, ranks, ..
            } => {
                check_n(*n_qubits)?;
                if ranks.is_empty() {
                    return Err(config_error(
                        format!("{at}.ranks"),
                        "at least one rank required",
                    ));
                }
                for (k, &r) in ranks.iter().enumerate() {
                    if r == 0 || r > 1 << n_qubits {
                        return Err(config_error(
                            format!("{at}.ranks[{k}]"),
                            format!("rank {r} outside 1..={}", 1usize << n_qubits),
                        ));
                    }
                }
                Ok(vec![*n_qubits])
            }
            StateSource::Named { names } => names
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let loc = format!("{at}.names[{k}]");
                    let name: NamedState = s
                        .parse()
                        .map_err(|e: Error| config_error(loc.clone(), e.to_string()))?;
                    let psi = named_state(name).map_err(|e| config_error(loc, e.to_string()))?;
                    Ok(psi.n_qubits())
                })
                .collect(),
        }
    }

    fn state_count(&self) -> usize {
        match &self.states {
            StateSource::Haar { count, .. } | StateSource::Ginibre { count, .. } => *count,
            StateSource::Named { names } => names.len(),
        }
    }

    /// State `index` of the source and its descriptor.
    fn state(&self, campaign_seed: u64, index: usize) -> Result<(State, String, RngSeed)> {
        let seed = RngSeed(self.seed.unwrap_or(campaign_seed)).offset(index as u64);
        Ok(match &self.states {
            StateSource::Haar { n_qubits, .. } => (
                State::Pure(haar_random_pure(*n_qubits, seed)?),
                format!("haar:n={n_qubits}:seed={}", seed.0),
                seed,
            ),
            StateSource::Ginibre {
                n_qubits, ranks, ..
            } => {
                let rank = ranks[index % ranks.len()];
                (
                    State::Mixed(ginibre_random_mixed(*n_qubits, rank, seed)?),
                    format!("ginibre:n={n_qubits}:rank={rank}:seed={}", seed.0),
                    seed,
                )
            }
            StateSource::Named { names } => {
                let name: NamedState = names[index].parse()?;
                (State::Pure(named_state(name)?), name.to_string(), seed)
            }
        })
    }
}

/// One unit of work.
#[derive(Debug, Clone, Copy)]
struct Item {
    job: usize,
    state: usize,
    alpha: Option<f64>,
    mu: Option<f64>,
}

fn enumerate_items(config: &CampaignConfig) -> Vec<Item> {
    let mut items = Vec::new();
    for (j, job) in config.jobs.iter().enumerate() {
        let alphas: Vec<Option<f64>> = if job.alphas.is_empty() {
            vec![None]
        } else {
            job.alphas.iter().copied().map(Some).collect()
        };
        let mus: Vec<Option<f64>> = if job.mus.is_empty() {
            vec![None]
        } else {
            job.mus.iter().copied().map(Some).collect()
        };
        for s in 0..job.state_count() {
            for &alpha in &alphas {
                for &mu in &mus {
                    items.push(Item {
                        job: j,
                        state: s,
                        alpha,
                        mu,
                    });
                }
            }
        }
    }
    items
}

fn run_item(config: &CampaignConfig, item: Item) -> Result<InequalityReport> {
    let job = &config.jobs[item.job];
    let (state, descriptor, seed) = job.state(config.seed, item.state)?;
    let alpha = item.alpha.map(AlphaParam::new).transpose()?;
    // The optimizer seed depends only on the state and α, so checks sharing them agree.
    let budget = config
        .budget
        .with_seed(seed.offset(item.alpha.map_or(0, f64::to_bits)));
    let n = state.n_qubits();
    let part = PartitionSpec::first(n)?;
    let need_alpha = || alpha.ok_or_else(|| Error::Parameter("missing alpha".into()));
    let pure = |s: &State| match s {
        State::Pure(p) => Ok(p.clone()),
        State::Mixed(_) => Err(Error::Parameter(format!(
            "{} needs a pure state",
            job.inequality
        ))),
    };
    let report = match job.inequality {
        InequalityId::Eq1 | InequalityId::Eq2 => check_eq1_eq2(&pure(&state)?, &part)?,
        InequalityId::Eq8 => check_eq8(&state.density(), need_alpha()?, &budget)?,
        InequalityId::Lemma1 => check_lemma1(&state.density(), need_alpha()?, &budget)?,
        InequalityId::Eq19Pure => {
            check_eq19_pure(&pure(&state)?, &part, need_alpha()?, job.mode, &budget)?
        }
        InequalityId::Eq19Mixed => {
            check_eq19_mixed(&state.density(), &part, need_alpha()?, &budget)?
        }
        InequalityId::Eq24 => {
            let mu = MuParam::new(
                item.mu
                    .ok_or_else(|| Error::Parameter("missing mu".into()))?,
            )?;
            check_eq24(&state, &part, need_alpha()?, mu, job.mode, &budget)?
        }
    };
    Ok(report.with_state(descriptor))
}

/// Per-inequality totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityStats {
    pub checks: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub worst_margin: Option<f64>,
    pub worst_state: Option<String>,
}

impl InequalityStats {
    fn new() -> Self {
        Self {
            checks: 0,
            verdicts: verdict_counts(),
            worst_margin: None,
            worst_state: None,
        }
    }

    fn add(&mut self, r: &InequalityReport) {
        self.checks += 1;
        *self.verdicts.entry(r.verdict.to_string()).or_default() += 1;
        if self.worst_margin.is_none_or(|w| r.margin < w) {
            self.worst_margin = Some(r.margin);
            self.worst_state = Some(r.state.clone());
        }
    }
}

fn verdict_counts() -> BTreeMap<String, usize> {
    [
        Verdict::Holds,
        Verdict::Consistent,
        Verdict::Violation,
        Verdict::Inconclusive,
    ]
    .iter()
    .map(|v| (v.to_string(), 0))
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub seed: u64,
    pub checks: usize,
    pub verdicts: BTreeMap<String, usize>,
    pub worst_margin: Option<f64>,
    pub per_inequality: BTreeMap<String, InequalityStats>,
    pub threads: usize,
    pub wall_time_s: f64,
}

impl CampaignSummary {
    pub fn violations(&self) -> usize {
        self.verdicts[&Verdict::Violation.to_string()]
    }
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub reports: Vec<InequalityReport>,
    pub summary: CampaignSummary,
}

impl CampaignOutcome {
    /// JSON-lines report body, one report per line in item order.
    pub fn report_body(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&serde_json::to_string(r).expect("reports serialize"));
            out.push('\n');
        }
        out
    }

    /// Writes `report.jsonl` and `summary.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut w = BufWriter::new(fs::File::create(dir.join(REPORT_FILE))?);
        w.write_all(self.report_body().as_bytes())?;
        w.flush()?;
        let summary = serde_json::to_string_pretty(&self.summary).expect("summary serializes");
        fs::write(dir.join(SUMMARY_FILE), summary + "\n")?;
        Ok(())
    }
}

/// Runs every item of a validated campaign on the current rayon pool.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    config.validate()?;
    let start = Instant::now();
    let items = enumerate_items(config);
    let reports = items
        .par_iter()
        .map(|&item| run_item(config, item))
        .collect::<Result<Vec<_>>>()?;

    let mut verdicts = verdict_counts();
    let mut per_inequality = BTreeMap::new();
    let mut worst_margin: Option<f64> = None;
    for r in &reports {
        *verdicts.entry(r.verdict.to_string()).or_default() += 1;
        per_inequality
            .entry(r.inequality.to_string())
            .or_insert_with(InequalityStats::new)
            .add(r);
        worst_margin = Some(worst_margin.map_or(r.margin, |w| w.min(r.margin)));
    }
    let summary = CampaignSummary {
        seed: config.seed,
        checks: reports.len(),
        verdicts,
        worst_margin,
        per_inequality,
        threads: rayon::current_num_threads(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok(CampaignOutcome { reports, summary })
}

/// Runs a campaign on a dedicated pool of `threads` workers.
pub fn run_campaign_with_threads(
    config: &CampaignConfig,
    threads: usize,
) -> Result<CampaignOutcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    pool.install(|| run_campaign(config))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<CampaignConfig> {
        CampaignConfig::from_json(text)
    }

    #[test]
    fn empty_campaign() {
        let c = parse(r#"{"seed": 1, "jobs": []}"#).unwrap();
        let out = run_campaign(&c).unwrap();
        assert_eq!(out.summary.checks, 0);
        assert_eq!(out.report_body(), "");
        assert_eq!(out.summary.violations(), 0);
    }

    #[test]
    fn zero_count_job() {
        let c = parse(r#"{"seed": 1, "jobs": [{"inequality": "eq2", "states": {"kind": "haar", "n_qubits": 3, "count": 0}}]}"#)
            .unwrap();
        assert_eq!(run_campaign(&c).unwrap().summary.checks, 0);
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq19pure", "states": {"kind": "haar", "n_qubits": 3, "count": 2}, "alphas": [1.0, 2.5]}]}"#,
                "jobs[0].alphas[1]",
            ),
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq8", "states": {"kind": "ginibre", "n_qubits": 2, "ranks": [2, 5], "count": 2}, "alphas": [0.9]}]}"#,
                "jobs[0].states.ranks[1]",
            ),
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq2", "states": {"kind": "named", "names": ["ghz:3", "zz"]}}]}"#,
                "jobs[0].states.names[1]",
            ),
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq24", "states": {"kind": "haar", "n_qubits": 3, "count": 1}, "alphas": [1.0], "mus": [1.5]}]}"#,
                "jobs[0].mus[0]",
            ),
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq2", "states": {"kind": "haar", "n_qubits": 2, "count": 1}}]}"#,
                "jobs[0].states",
            ),
            (
                r#"{"seed": 1, "jobs": [{"inequality": "eq8", "states": {"kind": "ginibre", "n_qubits": 2, "ranks": [2], "count": 1}, "alphas": [1.1]}]}"#,
                "jobs[0].alphas[0]",
            ),
            (r#"{"seed": 1, "budget": {"restarts": 0}}"#, "budget"),
        ];
        for (text, want) in cases {
            match parse(text) {
                Err(Error::Parse { location, .. }) => assert_eq!(location, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        match parse("{\"seed\": 1,\n \"jobz\": []}") {
            Err(Error::Parse { location, .. }) => {
                assert!(location.starts_with("line 2"), "{location}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_follow_item_order() {
        let c = parse(
            r#"{"seed": 7, "jobs": [
                {"inequality": "eq2", "states": {"kind": "named", "names": ["ghz:3", "w:3", "product:4"]}},
                {"inequality": "eq19pure", "states": {"kind": "haar", "n_qubits": 3, "count": 3}, "alphas": [0.9, 1.2]},
                {"inequality": "eq24", "states": {"kind": "haar", "n_qubits": 3, "count": 2}, "alphas": [1.2], "mus": [0, 0.5, 1]}
            ]}"#,
        )
        .unwrap();
        let out = run_campaign(&c).unwrap();
        assert_eq!(out.summary.checks, 3 + 6 + 6);
        let states: Vec<&str> = out.reports[..3].iter().map(|r| r.state.as_str()).collect();
        assert_eq!(states, ["ghz:3", "w:3", "product:4"]);
        assert_eq!(out.reports[3].alpha, Some(0.9));
        assert_eq!(out.reports[4].alpha, Some(1.2));
        assert_eq!(out.reports[3].state, out.reports[4].state);
        assert_eq!(out.summary.violations(), 0);
        assert_eq!(out.summary.per_inequality["eq24"].checks, 6);

        // μ = 1 matches the eq19 report for the same state and α.
        let eq19 = &out.reports[4];
        let eq24 = &out.reports[11];
        assert_eq!(eq24.mu, Some(1.0));
        assert_eq!(eq19.state, eq24.state);
        assert_eq!(eq19.margin.to_bits(), eq24.margin.to_bits());
    }

    #[test]
    fn thread_count_does_not_change_the_report() {
        let c = parse(
            r#"{"seed": 3, "budget": {"restarts": 3}, "jobs": [
                {"inequality": "lemma1", "states": {"kind": "ginibre", "n_qubits": 2, "ranks": [2, 3], "count": 3}, "alphas": [0.9, 1.2]},
                {"inequality": "eq19mixed", "states": {"kind": "ginibre", "n_qubits": 3, "ranks": [2], "count": 1}, "alphas": [0.9]}
            ]}"#,
        )
        .unwrap();
        let one = run_campaign_with_threads(&c, 1).unwrap();
        let four = run_campaign_with_threads(&c, 4).unwrap();
        assert_eq!(one.report_body(), four.report_body());
        assert_eq!(one.summary.violations(), 0);
    }

    #[test]
    fn writes_report_and_summary() {
        let c = parse(r#"{"seed": 1, "jobs": [{"inequality": "eq1", "states": {"kind": "named", "names": ["w:3"]}}]}"#)
            .unwrap();
        let out = run_campaign(&c).unwrap();
        let dir = tempfile::tempdir().unwrap();
        out.write(dir.path()).unwrap();
        let body = fs::read_to_string(dir.path().join(REPORT_FILE)).unwrap();
        assert_eq!(body.lines().count(), 1);
        let r: InequalityReport = serde_json::from_str(body.trim()).unwrap();
        assert_eq!(r.state, "w:3");
        let s: CampaignSummary =
            serde_json::from_str(&fs::read_to_string(dir.path().join(SUMMARY_FILE)).unwrap())
                .unwrap();
        assert_eq!(s.checks, 1);
    }
}
