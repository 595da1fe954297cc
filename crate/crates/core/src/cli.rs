//! Command-line front end: one command per process, artifacts under the output directory.

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::config::RunConfig;
use crate::energy::{energy, fiber};
use crate::error::{Error, Result};
use crate::io;
use crate::params::{classify_regime, ensure_valid, TheoremId};
use crate::radial::{RadialGrid, StatePair};
use crate::riesz::RieszKernel;
use crate::solver::{self, GnWhich, SolveReport};
use crate::thresholds::{h_eval, h_prime, h_profile, threshold_report, GNConstants, ThresholdReport};
use crate::verify::{nonexistence_scan, random_trial_states, verify_solution};

#[derive(Debug, Parser)]
#[command(name = "choquard-lab", version, about = "Normalized solutions of doubly coupled Choquard systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the `out` key.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; results are reproducible at a fixed count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Directory with `u.csv` and `v.csv` (fiber, verify).
    #[arg(long, global = true)]
    pub state: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Regime of the exponent configuration.
    Classify,
    /// Landscape, coupling thresholds and side conditions.
    Thresholds,
    /// Constrained critical point for an existence regime.
    Solve,
    /// Fiber profile of a state.
    Fiber,
    /// h(s) and h'(s) on the configured s-range.
    Hscan,
    /// Gagliardo-Nirenberg constant estimates.
    Gn,
    /// Verification suite for a state, or the nonexistence scan.
    Verify,
    /// Ground-state level over the configured beta and rho grids.
    Probe,
}

struct Run {
    config: RunConfig,
    out: PathBuf,
    state: Option<PathBuf>,
    kernel: Option<(Arc<RieszKernel>, String)>,
}

impl Run {
    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn kernel(&mut self) -> Result<Arc<RieszKernel>> {
        if self.kernel.is_none() {
            let grid = Arc::new(RadialGrid::new(self.config.grid));
            let alpha = crate::params::to_f64(self.config.params.alpha);
            let k = match &self.config.kernel_cache {
                Some(dir) => RieszKernel::cached(dir, grid, alpha)?,
                None => RieszKernel::build(grid, alpha)?,
            };
            let hash = k.content_hash();
            self.kernel = Some((Arc::new(k), hash));
        }
        Ok(self.kernel.as_ref().unwrap().0.clone())
    }

    fn header(&self) -> String {
        io::header_text(&self.config, self.kernel.as_ref().map(|(_, h)| h.as_str()))
    }

    fn hash(&self) -> Option<String> {
        self.kernel.as_ref().map(|(_, h)| h.clone())
    }

    fn gn(&mut self) -> Result<GNConstants> {
        if let Some(gn) = self.config.gn_override {
            return Ok(gn);
        }
        let k = self.kernel()?;
        let c = &self.config;
        solver::estimate_gn_constants(&k.grid, &k, &c.params, &c.solver, c.gn_refine_iters)
    }

    fn thresholds(&mut self) -> Result<ThresholdReport> {
        let gn = self.gn()?;
        threshold_report(&self.config.params, &gn)
    }

    fn load_state(&mut self) -> Result<Option<StatePair>> {
        let Some(dir) = self.state.clone() else { return Ok(None) };
        let k = self.kernel()?;
        let p = &self.config.params;
        Ok(Some(io::read_state(&dir, &k.grid, p.rho1, p.rho2)?))
    }

    fn write_json<T: serde::Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.path(name);
        io::write_json(&path, &self.config, self.hash().as_deref(), value)?;
        Ok(path)
    }
}

fn report_paths(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_classify(run: &mut Run) -> Result<()> {
    let p = &run.config.params;
    ensure_valid(p)?;
    let c = classify_regime(p);
    let doc = json!({
        "theorem_id": c.theorem_id,
        "character": c.character,
        "regimes": {
            "p+q": c.sum_regime,
            "2r1": c.r1_regime,
            "2r2": c.r2_regime,
            "p+q=2r1": c.sum_equals_2r1,
        },
        "side_conditions": c.side_conditions,
        "notes": c.notes,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    report_paths(&[run.write_json("classify.json", &doc)?]);
    Ok(())
}

fn violated(report: &ThresholdReport) -> Option<String> {
    let bad: Vec<&str> = report
        .side_conditions_resolved
        .iter()
        .filter(|s| s.holds == Some(false))
        .map(|s| s.name.as_str())
        .collect();
    (!bad.is_empty()).then(|| bad.join(", "))
}

fn cmd_thresholds(run: &mut Run) -> Result<()> {
    ensure_valid(&run.config.params)?;
    let report = run.thresholds()?;
    let c = &run.config;
    let exps = c.params.exponents();
    let rows: Vec<Vec<f64>> = h_profile(&report.coeffs, &exps, c.s_range.0, c.s_range.1, c.s_samples)
        .into_iter()
        .map(|(s, h)| vec![s, h])
        .collect();
    let csv = run.path("h_profile.csv");
    io::write_numeric_csv(&csv, &run.header(), &["s", "h"], &rows)?;
    report_paths(&[run.write_json("thresholds.json", &report)?, csv]);
    match violated(&report) {
        Some(list) => Err(Error::SideConditionViolated(list)),
        None => Ok(()),
    }
}

fn cmd_hscan(run: &mut Run) -> Result<()> {
    ensure_valid(&run.config.params)?;
    let gn = run.gn()?;
    let c = &run.config;
    let coeffs = crate::thresholds::coeffs(&c.params, &gn);
    let exps = c.params.exponents();
    let rows: Vec<Vec<f64>> = crate::roots::log_grid(c.s_range.0, c.s_range.1, c.s_samples)
        .into_iter()
        .map(|s| vec![s, h_eval(&coeffs, &exps, s), h_prime(&coeffs, &exps, s)])
        .collect();
    let csv = run.path("hscan.csv");
    io::write_numeric_csv(&csv, &run.header(), &["s", "h", "dh"], &rows)?;
    report_paths(&[csv]);
    Ok(())
}

fn cmd_gn(run: &mut Run) -> Result<()> {
    ensure_valid(&run.config.params)?;
    if let Some(gn) = run.config.gn_override {
        report_paths(&[run.write_json("gn.json", &json!({ "constants": gn }))?]);
        return Ok(());
    }
    let k = run.kernel()?;
    let c = &run.config;
    let estimates = [GnWhich::Pq, GnWhich::R1, GnWhich::R2]
        .into_iter()
        .map(|w| solver::estimate_gn_constant(&k.grid, &k, &c.params, w, &c.solver, c.gn_refine_iters))
        .collect::<Result<Vec<_>>>()?;
    let constants = GNConstants {
        c_pq: estimates[0].constant,
        c_r1: estimates[1].constant,
        c_r2: estimates[2].constant,
        provenance: crate::thresholds::Provenance::Estimated,
    };
    let doc = json!({ "constants": constants, "estimates": estimates });
    report_paths(&[run.write_json("gn.json", &doc)?]);
    Ok(())
}

fn write_solve_artifacts(run: &Run, report: &SolveReport) -> Result<Vec<PathBuf>> {
    let header = run.header();
    let log = run.path("iterations.csv");
    io::write_iteration_log(&log, &header, &report.log)?;
    let state = run.path("state");
    io::write_state(&state, &header, &report.state)?;
    Ok(vec![run.write_json("solve.json", report)?, log, state.join("u.csv"), state.join("v.csv")])
}

fn cmd_solve(run: &mut Run) -> Result<()> {
    let params = run.config.params.clone();
    ensure_valid(&params)?;
    let class = classify_regime(&params);
    if class.theorem_id == TheoremId::T1_3 {
        return Err(Error::WrongRegime {
            expected: "LocalMin or MountainPass".into(),
            got: "T1_3: no existence claim; run nonexistence scan".into(),
        });
    }
    let k = run.kernel()?;
    let cfg = run.config.solver.clone();
    let start = solver::init_ansatz(&k.grid, &params, &cfg)?;
    let report = match solver::solve(&start, &params, &k, &cfg) {
        Ok(r) => r,
        Err(Error::MaxIters(r)) => {
            report_paths(&write_solve_artifacts(run, &r)?);
            return Err(Error::MaxIters(r));
        }
        Err(e) => return Err(e),
    };
    let mut paths = write_solve_artifacts(run, &report)?;
    match run.thresholds() {
        Ok(th) => {
            let v = verify_solution(&report, &th, &params, cfg.el_tolerance);
            println!("verdict {:?}, verification {}", report.verdict, if v.all_pass { "pass" } else { "FAIL" });
            paths.push(run.write_json("verify.json", &v)?);
        }
        Err(e) => {
            println!("verdict {:?}, verification skipped: {e}", report.verdict);
            paths.push(run.write_json("verify.json", &json!({ "skipped": e.to_string() }))?);
        }
    }
    report_paths(&paths);
    Ok(())
}

fn cmd_fiber(run: &mut Run) -> Result<()> {
    let params = run.config.params.clone();
    ensure_valid(&params)?;
    let state = match run.load_state()? {
        Some(s) => s,
        None => {
            let k = run.kernel()?;
            solver::init_ansatz(&k.grid, &params, &run.config.solver)?
        }
    };
    let k = run.kernel()?;
    let b = energy(&state, &params, &k)?;
    let c = &run.config;
    let prof = fiber(&b, &params, Some(classify_regime(&params).theorem_id), c.t_range, c.t_samples);
    let rows: Vec<Vec<f64>> = (0..prof.t.len()).map(|i| vec![prof.t[i], prof.psi[i], prof.dpsi[i], prof.ddpsi[i]]).collect();
    let csv = run.path("fiber.csv");
    io::write_numeric_csv(&csv, &run.header(), &["t", "psi", "dpsi", "ddpsi"], &rows)?;
    let doc = json!({
        "breakdown": prof.breakdown,
        "critical": prof.critical,
        "expected_count": prof.expected_count,
        "unexpected_count": prof.unexpected_count,
    });
    report_paths(&[csv, run.write_json("fiber.json", &doc)?]);
    Ok(())
}

fn cmd_verify(run: &mut Run) -> Result<()> {
    let params = run.config.params.clone();
    ensure_valid(&params)?;
    if classify_regime(&params).theorem_id == TheoremId::T1_3 {
        let k = run.kernel()?;
        let c = &run.config;
        let mut states = random_trial_states(&k.grid, &params, c.trial_states, c.trial_seed)?;
        if let Some(s) = run.load_state()? {
            states.insert(0, s);
        }
        let k = run.kernel()?;
        let scan = nonexistence_scan(&params, &k, &states)?;
        println!(
            "nonexistence scan over {} states: {}",
            scan.states.len(),
            match scan.witness {
                None => "all fibers positive".to_string(),
                Some(i) => format!("witness at state {i}"),
            }
        );
        report_paths(&[run.write_json("nonexistence_scan.json", &scan)?]);
        return Ok(());
    }
    let state = run
        .load_state()?
        .ok_or_else(|| Error::Config("verify needs --state outside the nonexistence regime".into()))?;
    let tol = run.config.solver.el_tolerance;
    let k = run.kernel()?;
    let report = solver::assess(&state, &params, &k, tol)?;
    let th = run.thresholds()?;
    let v = verify_solution(&report, &th, &params, tol);
    for c in &v.checks {
        let verdict = match c.verdict {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "n/a",
        };
        println!("{verdict:4} {} = {:e}", c.name, c.value);
    }
    report_paths(&[run.write_json("verify.json", &v)?]);
    Ok(())
}

fn cmd_probe(run: &mut Run) -> Result<()> {
    ensure_valid(&run.config.params)?;
    let cells: Vec<(f64, f64, f64)> = run
        .config
        .probe_rho
        .iter()
        .flat_map(|&(a, b)| run.config.probe_beta.iter().map(move |&beta| (a, b, beta)))
        .collect();
    let k = run.kernel()?;
    let table = solver::mass_monotonicity_probe(&run.config.params, &k, &run.config.solver, &cells)?;
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|c| {
            vec![
                io::fmt_f64(c.rho1),
                io::fmt_f64(c.rho2),
                io::fmt_f64(c.beta),
                io::fmt_f64(c.m),
                c.iterations.to_string(),
                format!("{:?}", c.verdict),
            ]
        })
        .collect();
    let csv = run.path("probe.csv");
    io::write_csv(&csv, &run.header(), &["rho1", "rho2", "beta", "m", "iterations", "verdict"], &rows)?;
    report_paths(&[csv]);
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let path = cli.config.as_deref().ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    let config = RunConfig::from_file(path)?;
    let out = cli.out.clone().unwrap_or_else(|| config.out_dir.clone());
    let mut run = Run { config, out, state: cli.state.clone(), kernel: None };
    match cli.command {
        Command::Classify => cmd_classify(&mut run),
        Command::Thresholds => cmd_thresholds(&mut run),
        Command::Solve => cmd_solve(&mut run),
        Command::Fiber => cmd_fiber(&mut run),
        Command::Hscan => cmd_hscan(&mut run),
        Command::Gn => cmd_gn(&mut run),
        Command::Verify => cmd_verify(&mut run),
        Command::Probe => cmd_probe(&mut run),
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
