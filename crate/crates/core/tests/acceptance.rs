use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use choquard_lab::energy::{energy, gradient, DEFAULT_T_RANGE, DEFAULT_T_SAMPLES};
use choquard_lab::params::{classify_regime, rat, Character, TheoremId};
use choquard_lab::radial::{GridSpec, RadialGrid, StatePair};
use choquard_lab::riesz::{extended_spec, semigroup_check, RieszKernel};
use choquard_lab::roots;
use choquard_lab::solver::{self, SolverConfig, Verdict};
use choquard_lab::thresholds::{self, threshold_report};
use choquard_lab::verify::{nonexistence_scan, random_trial_states, verify_solution};
use choquard_lab::ProblemParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn params(p: &str, q: &str, r1: &str, r2: &str) -> ProblemParams {
    ProblemParams::with_exponents(3, rat("1"), rat(p), rat(q), rat(r1), rat(r2))
}

fn case_a() -> ProblemParams {
    let mut p = params("1.4", "1.4", "1.5", "1.5");
    p.beta = 0.5;
    p.kappa = 0.1;
    p
}

fn kernel(spec: GridSpec, alpha: f64) -> RieszKernel {
    RieszKernel::build(Arc::new(RadialGrid::new(spec)), alpha).unwrap()
}

fn newton_ball_potential() -> Outcome {
    let start = Instant::now();
    let spec = GridSpec { panels: 64, grading: 0, ..GridSpec::standard(3, 16.0) };
    let k = kernel(spec, 2.0);
    let grid = k.grid.clone();
    let f: Vec<f64> = grid.nodes.iter().map(|&r| if r < 1.0 { 1.0 } else { 0.0 }).collect();
    let at0 = k.apply_at(&f, 0.0);
    let at2 = k.apply_at(&f, 2.0);
    let secs = start.elapsed().as_secs_f64();
    let e0 = (at0 - 0.5).abs() / 0.5;
    let e2 = (at2 - 1.0 / 6.0).abs() * 6.0;
    outcome(
        grid.len() == 1024 && e0 <= 1e-3 && e2 <= 1e-3 && secs <= 30.0,
        format!("M={} rel err r=0: {e0:.2e}, r=2: {e2:.2e}, {secs:.2}s", grid.len()),
    )
}

fn semigroup() -> Outcome {
    let mut devs = Vec::new();
    let mut sizes = Vec::new();
    for panels in [42, 84, 168] {
        let spec = extended_spec(GridSpec { panels, ..GridSpec::standard(3, 16.0) });
        let grid = Arc::new(RadialGrid::new(spec));
        let f: Vec<f64> = grid.nodes.iter().map(|r| (-r * r).exp()).collect();
        devs.push(semigroup_check(&grid, 1.0, &f).unwrap());
        sizes.push(grid.len());
    }
    let pass = sizes[0] >= 1024 && devs[0] <= 5e-3 && devs[1] < devs[0] && devs[2] < devs[1];
    outcome(pass, format!("alpha=1, M={sizes:?}, deviation {}", devs.iter().map(|d| format!("{d:.2e}")).collect::<Vec<_>>().join(" > ")))
}

fn gaussian_pair(grid: &Arc<RadialGrid>, a: f64, b: f64) -> StatePair {
    let u = grid.nodes.iter().map(|r| (-a * r * r).exp()).collect();
    let v = grid.nodes.iter().map(|r| (-b * r * r).exp()).collect();
    choquard_lab::radial::normalize_mass(&StatePair::new(grid.clone(), u, v, 1.0, 1.0)).unwrap()
}

fn fiber_identity() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let p = case_a();
    let b = energy(&gaussian_pair(&k.grid, 0.6, 0.9), &p, &k).unwrap();
    let ts = roots::log_grid(DEFAULT_T_RANGE.0, DEFAULT_T_RANGE.1, DEFAULT_T_SAMPLES);
    let mut worst = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_scaled = 0.0f64;
    let mut largest = 0.0f64;
    for &t in &ts {
        let pz = b.dilated(&p, t).pohozaev;
        let d = (t * b.dpsi(&p, t) - pz).abs();
        worst = worst.max(d);
        if t <= 1.0 {
            worst_unit = worst_unit.max(d);
        }
        worst_scaled = worst_scaled.max(d / (t * t).max(1.0));
        largest = largest.max(pz.abs());
    }
    let tol = 1e-13 * b.kinetic.abs();
    outcome(
        worst <= tol,
        format!(
            "max |t Psi'(t) - P(t)| = {worst:.2e} vs bound {tol:.2e}; over t<=1: {worst_unit:.2e}; \
             divided by max(t^2,1): {worst_scaled:.2e}; largest |P(t)| = {largest:.2e}, one ulp of it {:.2e}",
            largest * f64::EPSILON
        ),
    )
}

fn gradient_consistency() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let grid = k.grid.clone();
    let p = case_a();
    let states = random_trial_states(&grid, &p, 5, 21).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let h = 1e-4;
    let mut worst = 0.0f64;
    for s in &states {
        let g = gradient(s, &p, &k).unwrap();
        for _ in 0..20 {
            let du: Vec<f64> = s.u.iter().map(|x| x * rng.gen_range(-0.5..0.5)).collect();
            let dv: Vec<f64> = s.v.iter().map(|x| x * rng.gen_range(-0.5..0.5)).collect();
            let exact: f64 = g.gu.iter().zip(&du).chain(g.gv.iter().zip(&dv)).map(|(a, b)| a * b).sum();
            let shifted = |sgn: f64| {
                let u = s.u.iter().zip(&du).map(|(a, b)| a + sgn * h * b).collect();
                let v = s.v.iter().zip(&dv).map(|(a, b)| a + sgn * h * b).collect();
                energy(&StatePair::new(grid.clone(), u, v, 1.0, 1.0), &p, &k).unwrap().energy
            };
            let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
            worst = worst.max(((fd - exact) / exact).abs());
        }
    }
    outcome(worst <= 1e-5, format!("5 states x 20 directions, h={h:e}, worst relative error {worst:.2e}"))
}

fn case_a_end_to_end() -> Outcome {
    let start = Instant::now();
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let p = case_a();
    let cfg = SolverConfig::default();
    let init = solver::init_ansatz(&k.grid, &p, &cfg).unwrap();
    let r = match solver::solve(&init, &p, &k, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("solver error: {e}")),
    };
    let secs = start.elapsed().as_secs_f64();
    let b = &r.breakdown;
    let ratio = b.pohozaev.abs() / b.kinetic;
    let level = -p.kappa * p.rho1 * p.rho2;
    let kind = r.fiber_kind;
    let pass = r.verdict == Verdict::Converged
        && r.log.len() - 1 <= 5000
        && b.energy < level
        && ratio <= 1e-4
        && r.mu1 > 0.0
        && r.mu2 > 0.0
        && r.fiber_critical_count == 1
        && kind == Some(choquard_lab::energy::FiberKind::Plus)
        && secs <= 300.0;
    outcome(
        pass,
        format!(
            "{:?} in {} iterations, J={:.5} (level {level}), |P|/T={ratio:.1e}, mu=({:.4}, {:.4}), {} fiber point(s) {kind:?}, {secs:.1}s",
            r.verdict,
            r.log.len() - 1,
            b.energy,
            r.mu1,
            r.mu2,
            r.fiber_critical_count
        ),
    )
}

fn mountain_pass_end_to_end() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 4.0), 1.0);
    let mut p = params("2", "2", "2.5", "2.5");
    p.lambda1 = 100.0;
    p.lambda2 = 100.0;
    p.beta = 0.1;
    p.kappa = 0.1;
    let class = classify_regime(&p);
    let cfg = SolverConfig::default();
    let gn = solver::estimate_gn_constants(&k.grid, &k, &p, &cfg, 200).unwrap();
    let a3 = thresholds::coeffs(&p, &gn).a3;
    let init = solver::init_ansatz(&k.grid, &p, &cfg).unwrap();
    let r = match solver::solve(&init, &p, &k, &cfg) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("solver error: {e}")),
    };
    let b = &r.breakdown;
    let level = -p.kappa * p.rho1 * p.rho2;
    let th = threshold_report(&p, &gn).unwrap();
    let v = verify_solution(&r, &th, &p, cfg.el_tolerance);
    let pass = class.theorem_id == TheoremId::T1_5
        && class.character == Some(Character::MountainPass)
        && 0.5 - a3 > 0.0
        && r.verdict == Verdict::Converged
        && r.fiber_kind == Some(choquard_lab::energy::FiberKind::Minus)
        && r.fiber_critical_count == 1
        && b.energy > level
        && r.mu1 > 0.0
        && r.mu2 > 0.0
        && v.all_pass;
    outcome(
        pass,
        format!(
            "{:?}, 1/2-A3={:.3}, {:?} with {} fiber point(s), J={:.4} (level {level}), mu=({:.3}, {:.3}), |P|/T={:.1e}, suite {}",
            class.theorem_id,
            0.5 - a3,
            r.fiber_kind,
            r.fiber_critical_count,
            b.energy,
            r.mu1,
            r.mu2,
            b.pohozaev.abs() / b.kinetic,
            if v.all_pass { "pass" } else { "fail" }
        ),
    )
}

fn landscape_geometry() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let mut p = params("1.6", "1.6", "2.5", "2.5");
    let class = classify_regime(&p);
    let gn = solver::estimate_gn_constants(&k.grid, &k, &p, &SolverConfig::default(), 200).unwrap();
    let b0 = thresholds::beta0(&p, &gn, &class).unwrap().beta0;
    p.beta = 0.5 * b0;
    let k0 = thresholds::kappa0_at_beta(&p, &gn, &class, p.beta).unwrap();
    p.kappa = 0.5 * k0;
    let c = thresholds::coeffs(&p, &gn);
    let e = p.exponents();
    let l = thresholds::landscape(&c, &e, &class).unwrap();
    let (Some(s0), Some(s1), Some(s2), Some(t0), Some(t1)) = (l.s0, l.s1, l.s2, l.t0, l.t1) else {
        return outcome(false, format!("incomplete landscape {l:?}"));
    };
    let grid = roots::log_grid(s1 * 1e-3, 10.0 * s2, 10_000);
    let changes = roots::sign_changes(|s| thresholds::h_prime(&c, &e, s), &grid).len();
    let level = c.kappa_rho;
    let e0 = (thresholds::h_eval(&c, &e, t0) - level).abs();
    let e1 = (thresholds::h_eval(&c, &e, t1) - level).abs();
    let pass = class.theorem_id == TheoremId::T1_4
        && changes == 2
        && s1 < s0
        && s0 < s2
        && thresholds::h_eval(&c, &e, s2) > level
        && t0 < t1
        && e0 <= 1e-10
        && e1 <= 1e-10;
    outcome(
        pass,
        format!(
            "beta={:.4e} (beta0 {b0:.4e}), kappa={:.4e}; {changes} sign changes of h', s1={s1:.4} s0={s0:.4} s2={s2:.4}, T0={t0:.4} T1={t1:.4}, |h-level| {e0:.1e}/{e1:.1e}",
            p.beta, p.kappa
        ),
    )
}

fn nonexistence_scan_check() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let mut p = params("2", "2", "2", "2");
    p.lambda1 = 0.01;
    p.lambda2 = 0.01;
    p.beta = 0.01;
    p.kappa = 0.1;
    let gn = solver::estimate_gn_constants(&k.grid, &k, &p, &SolverConfig::default(), 200).unwrap();
    let holds = thresholds::nonexistence_value(&p, &gn);
    let states = random_trial_states(&k.grid, &p, 50, 31).unwrap();
    let scan = nonexistence_scan(&p, &k, &states).unwrap();

    // λ₁ that makes the first state's t² coefficient vanish, nudged past it
    let b = energy(&states[0], &p, &k).unwrap();
    let e = p.exponents();
    let rest = b.kinetic - 2.0 * (p.lambda2 * b.d2 / (2.0 * e.r2) + p.beta * b.dpq);
    let mut bad = p.clone();
    bad.lambda1 = rest / (b.d1 / e.r1) * (1.0 + 1e-8);
    let violated = thresholds::nonexistence_value(&bad, &gn);
    let bad_scan = nonexistence_scan(&bad, &k, &states).unwrap();
    let witness = bad_scan.witness;
    let wb = witness.map(|i| energy(&states[i], &bad, &k).unwrap());
    let p_ratio = wb.map(|w| (w.pohozaev / w.kinetic).abs()).unwrap_or(f64::NAN);
    let pass = classify_regime(&p).theorem_id == TheoremId::T1_3
        && holds > 0.0
        && scan.states.len() == 50
        && scan.all_positive
        && violated <= 0.0
        && witness.is_some()
        && p_ratio <= 1e-6;
    outcome(
        pass,
        format!(
            "inequality value {holds:.4}; 50 states all positive: {}; lambda1={:.4} gives value {violated:.3}, witness {witness:?} with |P|/T={p_ratio:.1e}",
            scan.all_positive, bad.lambda1
        ),
    )
}

fn monotonicity_probes() -> Outcome {
    let k = kernel(GridSpec::tailed(3, 30.0), 1.0);
    let p = case_a();
    let cfg = SolverConfig::default();
    let tol = cfg.el_tolerance;
    let betas = [0.3, 0.5, 0.7];
    let cells: Vec<(f64, f64, f64)> = betas.iter().map(|&b| (1.0, 1.0, b)).chain([(0.8, 0.9, 0.5)]).collect();
    let t = match solver::mass_monotonicity_probe(&p, &k, &cfg, &cells) {
        Ok(t) => t,
        Err(e) => return outcome(false, format!("probe error: {e}")),
    };
    let converged = t.iter().all(|c| c.verdict == Verdict::Converged);
    let beta_ok = t[1].m <= t[0].m && t[2].m <= t[1].m;
    let rho_ok = t[1].m <= t[3].m + 2.0 * tol;
    outcome(
        converged && beta_ok && rho_ok,
        format!(
            "m(beta=0.3,0.5,0.7) = {:.5}, {:.5}, {:.5}; m(1,1)={:.5} vs m(0.8,0.9)={:.5}",
            t[0].m, t[1].m, t[2].m, t[1].m, t[3].m
        ),
    )
}

fn run_solve(bin: &str, config: &Path, out: &Path) -> std::io::Result<bool> {
    let status = Command::new(bin)
        .args(["solve", "--threads", "4", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .stdout(std::process::Stdio::null())
        .status()?;
    Ok(status.success())
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_choquard-lab");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("case_a.cfg");
    std::fs::write(
        &config,
        "N = 3\nalpha = 1\np = 1.4\nq = 1.4\nr1 = 1.5\nr2 = 1.5\nbeta = 0.5\nkappa = 0.1\n",
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let ok = run_solve(bin, &config, &a).unwrap() && run_solve(bin, &config, &b).unwrap();
    if !ok {
        return outcome(false, "solve command failed".into());
    }
    let la = std::fs::read(a.join("iterations.csv")).unwrap();
    let lb = std::fs::read(b.join("iterations.csv")).unwrap();
    let lines = la.iter().filter(|&&c| c == b'\n').count();
    outcome(la == lb, format!("two runs at --threads 4: {} bytes, {lines} lines, identical: {}", la.len(), la == lb))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("newton_ball_potential", newton_ball_potential),
        ("riesz_semigroup", semigroup),
        ("fiber_identity", fiber_identity),
        ("gradient_consistency", gradient_consistency),
        ("case_a_end_to_end", case_a_end_to_end),
        ("mountain_pass_end_to_end", mountain_pass_end_to_end),
        ("landscape_geometry", landscape_geometry),
        ("nonexistence_scan", nonexistence_scan_check),
        ("monotonicity_probes", monotonicity_probes),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let o = f();
        let line = format!("{} criterion {:2} {name}: {}\n", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !o.pass {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
