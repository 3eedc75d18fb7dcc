//! Command implementations behind the `reoa` binary.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use reoa::campaign::{run_campaign, CampaignConfig, CampaignSummary};
use reoa::lemma::{
    critical_point_scan, emit_figure_data, scan_sign, FigureGrid, FigureId, LemmaFunction,
    ScanDomain, DEFAULT_STEP_1D, DEFAULT_STEP_2D, DEFAULT_TOLERANCE,
};
use reoa::measures::{
    concurrence_mixed_2q, concurrence_pure_bipartition, renyi_entanglement_2q, renyi_entropy,
    AlphaParam,
};
use reoa::roof::{coa_exact, reoa as reoa_bound, OptBudget};
use reoa::states::{load_state, named_state, NamedState, RngSeed, State};
use reoa::{Error, Result};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "reoa",
    version,
    about = "Rényi-α entanglement of assistance and polygamy checks"
)]
pub struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate concurrence, CoA, Rényi entropy, Rényi entanglement and REoA of a state.
    Measure(MeasureArgs),
    /// Scan the sign of an auxiliary function of the subadditivity lemma.
    Scan(ScanArgs),
    /// Write the data behind the lemma figures as CSV.
    Figures(FiguresArgs),
    /// Run a verification campaign from a JSON config.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BudgetArgs {
    /// Optimizer restarts per roof optimization.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Sweep cap per restart.
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Stop a restart when a sweep gains less than this.
    #[arg(long)]
    pub tol: Option<f64>,
}

impl BudgetArgs {
    fn apply(&self, mut budget: OptBudget) -> OptBudget {
        if let Some(r) = self.restarts {
            budget.restarts = r;
        }
        if let Some(s) = self.max_sweeps {
            budget.max_sweeps = s;
        }
        if let Some(t) = self.tol {
            budget.tol = t;
        }
        budget
    }
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    /// State file (JSON).
    #[arg(long, conflicts_with = "named", required_unless_present = "named")]
    pub state: Option<PathBuf>,
    /// Named state: bell, ghz:N, w:N, product:N.
    #[arg(long)]
    pub named: Option<String>,
    /// Bipartition such as `0|12`; defaults to qubit 0 against the rest.
    #[arg(long)]
    pub partition: Option<String>,
    /// Rényi order (repeatable).
    #[arg(long = "alpha", default_values_t = [1.0])]
    pub alphas: Vec<f64>,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanTarget {
    G,
    #[value(name = "h-D1")]
    HD1,
    #[value(name = "h-D2")]
    HD2,
    M,
    #[value(name = "critical-h")]
    CriticalH,
    #[value(name = "critical-m")]
    CriticalM,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(value_enum)]
    pub target: ScanTarget,
    /// Grid step (sign scans: 1e-4..=1e-1; critical scans: at most 1e-2).
    #[arg(long)]
    pub step: Option<f64>,
    /// Allowed wrong-sign magnitude.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,
    /// Directory for per-point CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    /// Figure ids (comma separated or repeated); all when omitted.
    #[arg(long = "id", value_delimiter = ',')]
    pub ids: Vec<String>,
    /// Output directory.
    #[arg(long, default_value = "figures")]
    pub out: PathBuf,
    /// Grid step for every axis (defaults: 1e-3 for curves, 1e-2 for surfaces).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Campaign config (JSON).
    pub config: PathBuf,
    /// Directory for report.jsonl and summary.json.
    #[arg(long, default_value = "reoa-report")]
    pub out: PathBuf,
    /// Overrides the campaign seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replaces the α grid of every job that takes one (repeatable).
    #[arg(long = "alpha")]
    pub alphas: Vec<f64>,
    /// Replaces the μ grid of every eq24 job (repeatable).
    #[arg(long = "mu")]
    pub mus: Vec<f64>,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

/// Parses `"0|12"` into sorted sides.
pub fn parse_partition(text: &str, n_qubits: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    let bad = |why: String| Error::Partition(format!("'{text}': {why}"));
    let (a, b) = text
        .split_once('|')
        .ok_or_else(|| bad("expected A|B".into()))?;
    let side = |s: &str| -> Result<Vec<usize>> {
        let mut v = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| bad(format!("'{c}' is not a qubit index")))
            })
            .collect::<Result<Vec<_>>>()?;
        v.sort_unstable();
        Ok(v)
    };
    let (a, b) = (side(a)?, side(b)?);
    let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
    all.sort_unstable();
    if a.is_empty() || b.is_empty() || all != (0..n_qubits).collect::<Vec<_>>() {
        return Err(bad(format!(
            "sides must be non-empty and cover 0..{n_qubits} exactly once"
        )));
    }
    Ok((a, b))
}

fn finite_or_null(v: Option<f64>) -> Value {
    v.map_or(Value::Null, |x| json!(x))
}

/// Measures of one state as a JSON object.
pub fn cmd_measure(args: &MeasureArgs) -> Result<Value> {
    let (state, label) = match (&args.state, &args.named) {
        (Some(path), _) => (load_state(path)?, path.display().to_string()),
        (None, Some(name)) => {
            let parsed: NamedState = name.parse()?;
            (State::Pure(named_state(parsed)?), parsed.to_string())
        }
        (None, None) => {
            return Err(Error::Parameter(
                "either --state or --named is required".into(),
            ))
        }
    };
    let n = state.n_qubits();
    if n < 2 {
        return Err(Error::Partition("measures need at least two qubits".into()));
    }
    let (side_a, side_b) = match &args.partition {
        Some(p) => parse_partition(p, n)?,
        None => (vec![0], (1..n).collect()),
    };
    let alphas = args
        .alphas
        .iter()
        .map(|&a| AlphaParam::new(a))
        .collect::<Result<Vec<_>>>()?;
    let budget = args
        .budget
        .apply(OptBudget::default())
        .with_seed(RngSeed(args.seed));
    budget.validate()?;

    let mut out = json!({
        "state": label,
        "n_qubits": n,
        "partition": {"a": side_a, "b": side_b},
    });
    let mut rows = Vec::new();
    match &state {
        State::Pure(psi) => {
            let c = if side_a.len() == 1 {
                Some(concurrence_pure_bipartition(psi, &side_a)?)
            } else {
                None
            };
            out["kind"] = json!("pure");
            out["concurrence"] = finite_or_null(c);
            out["coa"] = finite_or_null(c);
            let red = psi.reduced(&side_a)?;
            for &alpha in &alphas {
                let s = renyi_entropy(&red, alpha)?;
                // A pure state is its own only decomposition.
                rows.push(json!({
                    "alpha": alpha.value(),
                    "renyi_entropy": s,
                    "renyi_entanglement": s,
                    "reoa_lower_bound": s,
                    "reoa_converged": true,
                }));
            }
        }
        State::Mixed(rho) => {
            if n != 2 {
                return Err(Error::Partition(format!(
                    "mixed-state measures need two qubits, got {n}"
                )));
            }
            out["kind"] = json!("mixed");
            out["concurrence"] = json!(concurrence_mixed_2q(rho)?);
            out["coa"] = json!(coa_exact(rho)?);
            let red = rho.reduced(&side_a)?;
            for &alpha in &alphas {
                let mut row = json!({
                    "alpha": alpha.value(),
                    "renyi_entropy": renyi_entropy(&red, alpha)?,
                    "renyi_entanglement": Value::Null,
                    "reoa_lower_bound": Value::Null,
                });
                if alpha.has_analytic_formula() {
                    let bound = reoa_bound(rho, alpha, &budget)?;
                    row["renyi_entanglement"] = json!(renyi_entanglement_2q(rho, alpha)?);
                    row["reoa_lower_bound"] = json!(bound.value);
                    row["reoa_converged"] = json!(bound.converged);
                }
                rows.push(row);
            }
        }
    }
    out["alphas"] = Value::Array(rows);
    Ok(out)
}

/// Result of `scan`: a JSON summary and whether the claimed signs held.
pub struct ScanOutcome {
    pub summary: Value,
    pub violated: bool,
}

fn write_contours(path: &Path, report: &reoa::lemma::CriticalReport) -> Result<()> {
    let mut text = String::from("partial,alpha,x\n");
    for (name, points) in [("x", &report.contour_x), ("alpha", &report.contour_alpha)] {
        for p in points.iter() {
            text.push_str(&format!("{name},{:.16e},{:.16e}\n", p.alpha, p.x));
        }
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn cmd_scan(args: &ScanArgs) -> Result<ScanOutcome> {
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir)?;
    }
    let csv = |name: &str| {
        args.out
            .as_ref()
            .map(|d| d.join(format!("scan-{name}.csv")))
    };
    let sign = |f: LemmaFunction, d: ScanDomain, default: f64, name: &str| -> Result<ScanOutcome> {
        let path = csv(name);
        let r = scan_sign(
            f,
            d,
            args.step.unwrap_or(default),
            args.tol,
            path.as_deref(),
        )?;
        Ok(ScanOutcome {
            violated: r.violations > 0,
            summary: serde_json::to_value(&r).expect("report serializes"),
        })
    };
    let critical = |f: LemmaFunction, domains: &[ScanDomain], name: &str| -> Result<ScanOutcome> {
        let step = args.step.unwrap_or(5e-3);
        let mut reports = Vec::new();
        let mut violated = false;
        for &d in domains {
            let r = critical_point_scan(f, d, step)?;
            if let Some(dir) = &args.out {
                write_contours(&dir.join(format!("scan-{name}-{d}.csv")), &r)?;
            }
            violated |= r.has_common_point();
            reports.push(json!({
                "function": f,
                "domain": d,
                "step": r.step,
                "contour_x_points": r.contour_x.len(),
                "contour_alpha_points": r.contour_alpha.len(),
                "common_cells": r.common_cells,
            }));
        }
        Ok(ScanOutcome {
            summary: Value::Array(reports),
            violated,
        })
    };
    match args.target {
        ScanTarget::G => sign(LemmaFunction::G, ScanDomain::D, DEFAULT_STEP_2D, "g"),
        ScanTarget::HD1 => sign(LemmaFunction::H, ScanDomain::D1, DEFAULT_STEP_1D, "h-D1"),
        ScanTarget::HD2 => sign(LemmaFunction::H, ScanDomain::D2, DEFAULT_STEP_1D, "h-D2"),
        ScanTarget::M => sign(LemmaFunction::M, ScanDomain::D3, DEFAULT_STEP_1D, "m"),
        ScanTarget::CriticalH => critical(
            LemmaFunction::H,
            &[ScanDomain::D1, ScanDomain::D2],
            "critical-h",
        ),
        ScanTarget::CriticalM => critical(LemmaFunction::M, &[ScanDomain::D3], "critical-m"),
    }
}

/// Writes the requested figure files plus `manifest.json`; returns the manifest.
pub fn cmd_figures(args: &FiguresArgs) -> Result<Value> {
    let ids: Vec<FigureId> = if args.ids.is_empty() {
        FigureId::ALL.to_vec()
    } else {
        args.ids.iter().map(|s| s.parse()).collect::<Result<_>>()?
    };
    let grid = match args.step {
        Some(s) => FigureGrid {
            step_1d: s,
            step_2d: s,
        },
        None => FigureGrid::default(),
    };
    fs::create_dir_all(&args.out)?;
    let files = ids
        .iter()
        .map(|&id| emit_figure_data(id, &args.out, &grid))
        .collect::<Result<Vec<_>>>()?;
    let manifest = json!({ "grid": grid, "figures": files });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(args.out.join("manifest.json"), text + "\n")?;
    Ok(manifest)
}

/// Loads, overrides and validates a campaign config.
pub fn load_campaign(args: &VerifyArgs) -> Result<CampaignConfig> {
    let mut config = CampaignConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.budget = args.budget.apply(config.budget);
    for job in &mut config.jobs {
        if !args.alphas.is_empty() && !job.alphas.is_empty() {
            job.alphas = args.alphas.clone();
        }
        if !args.mus.is_empty() && !job.mus.is_empty() {
            job.mus = args.mus.clone();
        }
    }
    config.validate()?;
    Ok(config)
}

/// Runs a campaign, writes its report files and returns the summary.
pub fn cmd_verify(args: &VerifyArgs) -> Result<CampaignSummary> {
    let config = load_campaign(args)?;
    let outcome = run_campaign(&config)?;
    outcome.write(&args.out)?;
    Ok(outcome.summary)
}

/// Runs a parsed command line, printing results to `stdout`; returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<u8> {
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("json serializes");
    match &cli.command {
        Command::Measure(args) => {
            writeln!(stdout, "{}", pretty(&cmd_measure(args)?))?;
            Ok(EXIT_OK)
        }
        Command::Scan(args) => {
            let outcome = cmd_scan(args)?;
            writeln!(stdout, "{}", pretty(&outcome.summary))?;
            Ok(if outcome.violated {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            })
        }
        Command::Figures(args) => {
            let manifest = cmd_figures(args)?;
            writeln!(stdout, "{}", pretty(&manifest))?;
            Ok(EXIT_OK)
        }
        Command::Verify(args) => {
            let summary = cmd_verify(args)?;
            eprintln!(
                "verify: {} checks, {} violations, {:.2} s",
                summary.checks,
                summary.violations(),
                summary.wall_time_s
            );
            writeln!(
                stdout,
                "{}",
                pretty(&serde_json::to_value(&summary).expect("summary serializes"))
            )?;
            Ok(if summary.violations() > 0 {
                EXIT_VIOLATION
            } else {
                EXIT_OK
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions() {
        assert_eq!(parse_partition("0|12", 3).unwrap(), (vec![0], vec![1, 2]));
        assert_eq!(parse_partition("20|1", 3).unwrap(), (vec![0, 2], vec![1]));
        for bad in ["012", "0|1", "0|11", "|012", "0|1x"] {
            assert!(parse_partition(bad, 3).is_err(), "{bad}");
        }
    }

    #[test]
    fn measure_named_states() {
        let args = |name: &str, alpha: f64, part: Option<&str>| MeasureArgs {
            state: None,
            named: Some(name.into()),
            partition: part.map(String::from),
            alphas: vec![alpha],
            seed: 0,
            budget: BudgetArgs {
                restarts: Some(2),
                max_sweeps: None,
                tol: None,
            },
        };
        let bell = cmd_measure(&args("bell", 1.2, None)).unwrap();
        assert!((bell["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((bell["alphas"][0]["renyi_entanglement"].as_f64().unwrap() - 1.0).abs() < 1e-12);

        let prod = cmd_measure(&args("product:3", 0.9, None)).unwrap();
        assert_eq!(prod["concurrence"].as_f64().unwrap(), 0.0);
        assert!(prod["alphas"][0]["renyi_entropy"].as_f64().unwrap().abs() < 1e-12);

        let w = cmd_measure(&args("w:3", 1.0, Some("0|12"))).unwrap();
        let c = w["concurrence"].as_f64().unwrap();
        assert!((c - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-9);
    }

    #[test]
    fn exit_codes_for_errors() {
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::Parameter("x".into())), EXIT_USAGE);
    }
}
