//! Normalized ground-state search: projected descent for local minimizers,
//! fiber-reduced descent for mountain-pass points, and GN quotient estimation.

use std::sync::Arc;

use serde::Serialize;

use crate::energy::{
    energy, energy_and_gradient, el_residual_from, fiber_max, multipliers_from, CriticalPoint, EnergyBreakdown,
    FiberKind, Gradient, DEFAULT_T_RANGE, DEFAULT_T_SAMPLES,
};
use crate::error::{Error, Result};
use crate::params::{classify_regime, Character, ProblemParams, TheoremId};
use crate::radial::{normalize_mass, RadialGrid, StatePair};
use crate::riesz::RieszKernel;
use crate::thresholds::{GNConstants, Provenance};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub step_init: f64,
    /// Step multiplier on a rejected trial, in `(0,1)`.
    pub backtrack: f64,
    /// Stop when `el_residual` and `|P|/T` are both below this.
    pub el_tolerance: f64,
    /// Relative change in `J` counted as no progress.
    pub stagnation_tol: f64,
    /// Consecutive no-progress iterations before stopping.
    pub stagnation_window: usize,
    /// Gaussian widths and centers `exp(-(r-c)²/w²)` of the initial pair.
    pub width_u: f64,
    pub width_v: f64,
    pub center_u: f64,
    pub center_v: f64,
    /// Lower bound on the shift of the `S + σW` preconditioner.
    pub shift_floor: f64,
    /// Kinetic radius bounding the initial well, when the landscape provides one.
    pub well_radius: Option<f64>,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step_init: 1.0,
            backtrack: 0.5,
            el_tolerance: 1e-5,
            stagnation_tol: 1e-15,
            stagnation_window: 50,
            width_u: 2.0,
            width_v: 2.0,
            center_u: 0.0,
            center_v: 0.0,
            shift_floor: 1e-2,
            well_radius: None,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            bad.push("backtrack outside (0,1)".to_string());
        }
        for (name, v) in [
            ("step_init", self.step_init),
            ("el_tolerance", self.el_tolerance),
            ("stagnation_tol", self.stagnation_tol),
            ("width_u", self.width_u),
            ("width_v", self.width_v),
            ("shift_floor", self.shift_floor),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                bad.push(format!("{name} <= 0"));
            }
        }
        if self.max_iters == 0 {
            bad.push("max_iters = 0".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(bad.join("; ")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterRecord {
    pub k: usize,
    #[serde(rename = "J")]
    pub energy: f64,
    #[serde(rename = "P")]
    pub pohozaev: f64,
    pub residual: f64,
    pub step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Converged,
    Stagnated,
    MaxIters,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub state: StatePair,
    pub breakdown: EnergyBreakdown,
    pub mu1: f64,
    pub mu2: f64,
    pub residual: f64,
    pub log: Vec<IterRecord>,
    /// Critical point of the final state's own fiber nearest `t = 1`.
    pub fiber_point: Option<CriticalPoint>,
    pub fiber_kind: Option<FiberKind>,
    pub fiber_critical_count: usize,
    pub regime: TheoremId,
    pub verdict: Verdict,
    /// Index into `log` where the mountain-pass polish begins.
    pub polish_start: Option<usize>,
    pub masses: (f64, f64),
}

/// Positive Gaussian pair on the torus; for a LocalMin regime with a known well it is
/// widened until `√T` sits below 0.9 of the well radius.
pub fn init_ansatz(grid: &Arc<RadialGrid>, params: &ProblemParams, config: &SolverConfig) -> Result<StatePair> {
    let build = |scale: f64| -> Result<StatePair> {
        let (wu, wv) = (config.width_u * scale, config.width_v * scale);
        let u = grid.nodes.iter().map(|r| (-((r - config.center_u) / wu).powi(2)).exp().max(1e-300)).collect();
        let v = grid.nodes.iter().map(|r| (-((r - config.center_v) / wv).powi(2)).exp().max(1e-300)).collect();
        normalize_mass(&StatePair::new(grid.clone(), u, v, params.rho1, params.rho2))
    };
    let mut state = build(1.0)?;
    if let Some(well) = config.well_radius {
        let mut scale = 1.0;
        for _ in 0..60 {
            if state.kinetic().sqrt() < 0.9 * well {
                break;
            }
            scale *= 1.25;
            state = build(scale)?;
        }
    }
    Ok(state)
}

/// Riemannian direction for one component: `P⁻¹g` with the mass-normal part removed
/// in the `P = S + σW` metric.
fn tangent_direction(grid: &RadialGrid, x: &[f64], g: &[f64], sigma: f64) -> Vec<f64> {
    let d = grid.solve_shifted(sigma, g);
    let wx: Vec<f64> = x.iter().zip(&grid.weights).map(|(a, w)| a * w).collect();
    let n = grid.solve_shifted(sigma, &wx);
    let num: f64 = wx.iter().zip(&d).map(|(a, b)| a * b).sum();
    let den: f64 = wx.iter().zip(&n).map(|(a, b)| a * b).sum();
    let c = if den > 0.0 { num / den } else { 0.0 };
    d.iter().zip(&n).map(|(a, b)| a - c * b).collect()
}

struct Eval {
    state: StatePair,
    breakdown: EnergyBreakdown,
    grad: Gradient,
    mu: (f64, f64),
    residual: f64,
}

fn evaluate(state: StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<Eval> {
    let (breakdown, grad) = energy_and_gradient(&state, params, kernel)?;
    let mu = multipliers_from(&state, &grad);
    let residual = el_residual_from(&state, &grad, breakdown.kinetic, mu.0, mu.1);
    Ok(Eval { state, breakdown, grad, mu, residual })
}

fn directions(ev: &Eval, floor: f64) -> (Vec<f64>, Vec<f64>) {
    let g = &ev.state.grid;
    let du = tangent_direction(g, &ev.state.u, &ev.grad.gu, ev.mu.0.max(floor));
    let dv = tangent_direction(g, &ev.state.v, &ev.grad.gv, ev.mu.1.max(floor));
    (du, dv)
}

/// `|x - τd|` renormalized onto the torus.
fn retract(state: &StatePair, du: &[f64], dv: &[f64], tau: f64) -> Result<StatePair> {
    let u = state.u.iter().zip(du).map(|(a, d)| (a - tau * d).abs()).collect();
    let v = state.v.iter().zip(dv).map(|(a, d)| (a - tau * d).abs()).collect();
    normalize_mass(&StatePair::new(state.grid.clone(), u, v, state.rho1, state.rho2))
}

fn converged(ev: &Eval, tol: f64) -> bool {
    ev.residual < tol && ev.breakdown.pohozaev.abs() < tol * ev.breakdown.kinetic
}

fn finish(
    ev: Eval,
    params: &ProblemParams,
    log: Vec<IterRecord>,
    verdict: Verdict,
    polish_start: Option<usize>,
) -> Result<SolveReport> {
    let regime = classify_regime(params).theorem_id;
    let crit = crate::energy::critical_points(
        &ev.breakdown,
        params,
        DEFAULT_T_RANGE.0,
        DEFAULT_T_RANGE.1,
        DEFAULT_T_SAMPLES,
    );
    let nearest = crit
        .iter()
        .min_by(|a, b| a.t.ln().abs().total_cmp(&b.t.ln().abs()))
        .copied();
    let masses = ev.state.masses();
    let report = SolveReport {
        breakdown: ev.breakdown,
        mu1: ev.mu.0,
        mu2: ev.mu.1,
        residual: ev.residual,
        log,
        fiber_point: nearest,
        fiber_kind: nearest.map(|c| c.kind),
        fiber_critical_count: crit.len(),
        regime,
        verdict,
        polish_start,
        masses,
        state: ev.state,
    };
    if verdict == Verdict::MaxIters {
        return Err(Error::MaxIters(Box::new(report)));
    }
    Ok(report)
}

/// Report for a given state without iterating; `Converged` when it already meets `tol`.
pub fn assess(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel, tol: f64) -> Result<SolveReport> {
    let ev = evaluate(state.clone(), params, kernel)?;
    let verdict = if converged(&ev, tol) { Verdict::Converged } else { Verdict::Stagnated };
    let log = vec![record(0, &ev, 0.0)];
    finish(ev, params, log, verdict, None)
}

fn record(k: usize, ev: &Eval, step: f64) -> IterRecord {
    IterRecord { k, energy: ev.breakdown.energy, pohozaev: ev.breakdown.pohozaev, residual: ev.residual, step }
}

/// Projected descent on `J` over the mass torus with backtracking on `J`.
pub fn local_minimize(
    state: &StatePair,
    params: &ProblemParams,
    kernel: &RieszKernel,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let mut ev = evaluate(normalize_mass(&state.abs())?, params, kernel)?;
    let mut log = vec![record(0, &ev, 0.0)];
    let mut tau = config.step_init;
    let mut idle = 0;
    for k in 1..=config.max_iters {
        if converged(&ev, config.el_tolerance) {
            return finish(ev, params, log, Verdict::Converged, None);
        }
        let (du, dv) = directions(&ev, config.shift_floor);
        let slope: f64 = du.iter().zip(&ev.grad.gu).map(|(a, b)| a * b).sum::<f64>()
            + dv.iter().zip(&ev.grad.gv).map(|(a, b)| a * b).sum::<f64>();
        let j0 = ev.breakdown.energy;
        let mut trial_tau = (tau * 2.0).min(config.step_init);
        let next = loop {
            let cand = retract(&ev.state, &du, &dv, trial_tau)?;
            let b = energy(&cand, params, kernel)?;
            if !b.energy.is_finite() {
                return Err(Error::Diverged(format!("non-finite energy at iteration {k}")));
            }
            if b.energy < j0 - 1e-4 * trial_tau * slope.max(0.0) || (b.energy < j0 && trial_tau < 1e-8) {
                break Some(cand);
            }
            trial_tau *= config.backtrack;
            if trial_tau < 1e-14 * config.step_init {
                break None;
            }
        };
        let Some(next) = next else {
            return finish(ev, params, log, Verdict::Stagnated, None);
        };
        tau = trial_tau;
        ev = evaluate(next, params, kernel)?;
        if let Some(well) = config.well_radius {
            if ev.breakdown.kinetic.sqrt() > 2.0 * well {
                return Err(Error::Diverged(format!(
                    "kinetic radius {:e} left the well of radius {well:e}",
                    ev.breakdown.kinetic.sqrt()
                )));
            }
        }
        let dj = (j0 - ev.breakdown.energy).abs();
        idle = if dj <= config.stagnation_tol * j0.abs().max(1e-300) { idle + 1 } else { 0 };
        log.push(record(k, &ev, tau));
        if idle >= config.stagnation_window {
            let verdict = if converged(&ev, config.el_tolerance) { Verdict::Converged } else { Verdict::Stagnated };
            return finish(ev, params, log, verdict, None);
        }
    }
    let verdict = if converged(&ev, config.el_tolerance) { Verdict::Converged } else { Verdict::MaxIters };
    finish(ev, params, log, verdict, None)
}

/// Drift of the fiber maximum from `t = 1` tolerated before the state is resampled.
const RESAMPLE_DRIFT: f64 = 1e-10;

/// The state, moved by resampled dilation onto its fiber maximum when that maximum
/// has drifted from `t = 1`, together with the analytic `max_t Ψ`.
fn to_fiber_max(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<(StatePair, f64)> {
    let b = energy(state, params, kernel)?;
    let cp = fiber_max(&b, params)?;
    if (cp.t - 1.0).abs() <= RESAMPLE_DRIFT {
        return Ok((state.clone(), cp.psi));
    }
    let moved = normalize_mass(&state.dilate_spectral(cp.t))?;
    let e = fiber_max(&energy(&moved, params, kernel)?, params)?.psi;
    Ok((moved, e))
}

/// `∇P` as `2∇J` of the problem with weights `λᵢ·2γ_{rᵢ}/2`, `β(γ_p+γ_q)/2` and no coupling.
fn pohozaev_gradient(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<Gradient> {
    let e = params.exponents();
    let mut scaled = params.clone();
    scaled.lambda1 *= e.gamma_r1;
    scaled.lambda2 *= e.gamma_r2;
    scaled.beta *= e.gamma_pq() / 2.0;
    scaled.kappa = 0.0;
    let (_, g) = energy_and_gradient(state, &scaled, kernel)?;
    Ok(Gradient { gu: g.gu.iter().map(|x| 2.0 * x).collect(), gv: g.gv.iter().map(|x| 2.0 * x).collect() })
}

/// Tangent directions with `flip` times the `P`-metric component along `P⁻¹∇P` removed:
/// `flip = 1` keeps the fiber maximum in place to first order, `flip = 2` reflects
/// that component so the step ascends along the unstable mode.
fn fiber_directions(
    ev: &Eval,
    params: &ProblemParams,
    kernel: &RieszKernel,
    floor: f64,
    flip: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (du, dv) = directions(ev, floor);
    let gp = pohozaev_gradient(&ev.state, params, kernel)?;
    let g = &ev.state.grid;
    let (s1, s2) = (ev.mu.0.max(floor), ev.mu.1.max(floor));
    let nu = tangent_direction(g, &ev.state.u, &gp.gu, s1);
    let nv = tangent_direction(g, &ev.state.v, &gp.gv, s2);
    let pair = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let num = pair(&gp.gu, &du) + pair(&gp.gv, &dv);
    let den = pair(&gp.gu, &nu) + pair(&gp.gv, &nv);
    if !(den > 0.0) {
        return Ok((du, dv));
    }
    let c = flip * num / den;
    Ok((
        du.iter().zip(&nu).map(|(a, b)| a - c * b).collect(),
        dv.iter().zip(&nv).map(|(a, b)| a - c * b).collect(),
    ))
}

/// Descent on `E(u,v) = max_t Ψ(t)` by alternating fiber maximization and projected steps.
///
/// When `E` stops decreasing the remaining iterations polish with reflected steps
/// accepted on decrease of the residual; the log switches from `E` to `J` there.
pub fn mountain_pass_reduced(
    state: &StatePair,
    params: &ProblemParams,
    kernel: &RieszKernel,
    config: &SolverConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let (start, mut e_cur) = to_fiber_max(&normalize_mass(&state.abs())?, params, kernel)?;
    let mut ev = evaluate(start, params, kernel)?;
    let mut log = vec![IterRecord { energy: e_cur, ..record(0, &ev, 0.0) }];
    let mut tau = config.step_init;
    let mut idle = 0;
    let mut k = 0;
    while k < config.max_iters {
        if converged(&ev, config.el_tolerance) {
            return finish(ev, params, log, Verdict::Converged, None);
        }
        k += 1;
        let (du, dv) = fiber_directions(&ev, params, kernel, config.shift_floor, 1.0)?;
        let mut trial_tau = (tau * 2.0).min(config.step_init);
        let next = loop {
            let stepped = retract(&ev.state, &du, &dv, trial_tau)?;
            match to_fiber_max(&stepped, params, kernel) {
                Ok((cand, e)) if e < e_cur => break Some((cand, e)),
                Ok(_) | Err(Error::FiberDegenerate(_)) => {}
                Err(err) => return Err(err),
            }
            trial_tau *= config.backtrack;
            if trial_tau < 1e-14 * config.step_init {
                break None;
            }
        };
        let Some((next, e)) = next else { break };
        tau = trial_tau;
        let de = (e_cur - e).abs();
        idle = if de <= config.stagnation_tol * e_cur.abs().max(1e-300) { idle + 1 } else { 0 };
        e_cur = e;
        ev = evaluate(next, params, kernel)?;
        log.push(IterRecord { energy: e_cur, ..record(k, &ev, tau) });
        if idle >= config.stagnation_window {
            break;
        }
    }
    let polish_start = log.len();
    tau = config.step_init;
    while k < config.max_iters {
        if converged(&ev, config.el_tolerance) {
            return finish(ev, params, log, Verdict::Converged, Some(polish_start));
        }
        k += 1;
        let (du, dv) = fiber_directions(&ev, params, kernel, config.shift_floor, 2.0)?;
        let mut trial_tau = (tau * 2.0).min(config.step_init);
        let next = loop {
            let cand = evaluate(retract(&ev.state, &du, &dv, trial_tau)?, params, kernel)?;
            if cand.residual < ev.residual {
                break Some(cand);
            }
            trial_tau *= config.backtrack;
            if trial_tau < 1e-6 * config.step_init {
                break None;
            }
        };
        let Some(next) = next else {
            return finish(ev, params, log, Verdict::Stagnated, Some(polish_start));
        };
        tau = trial_tau;
        ev = next;
        log.push(record(k, &ev, tau));
    }
    let verdict = if converged(&ev, config.el_tolerance) { Verdict::Converged } else { Verdict::MaxIters };
    finish(ev, params, log, verdict, Some(polish_start))
}

/// Dispatches on the regime's character.
pub fn solve(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel, config: &SolverConfig) -> Result<SolveReport> {
    let class = classify_regime(params);
    match class.character {
        Some(Character::LocalMin) => local_minimize(state, params, kernel, config),
        Some(Character::MountainPass) => mountain_pass_reduced(state, params, kernel, config),
        _ => Err(Error::WrongRegime { expected: "LocalMin or MountainPass".into(), got: class.theorem_id.to_string() }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GnWhich {
    Pq,
    R1,
    R2,
}

/// Exponents `(a, b, γ_a+γ_b, tied)` of the GN quotient; `tied` pairs a function with itself.
fn gn_exponents(params: &ProblemParams, which: GnWhich) -> (f64, f64, f64, bool) {
    let e = params.exponents();
    match which {
        GnWhich::Pq => (e.p, e.q, e.gamma_pq(), false),
        GnWhich::R1 => (e.r1, e.r1, 2.0 * e.gamma_r1, true),
        GnWhich::R2 => (e.r2, e.r2, 2.0 * e.gamma_r2, true),
    }
}

/// `(T_u+T_v)^{g/2}(|u|²+|v|²)^{(a+b-g)/2} / ∫(I_α∗|u|^a)|v|^b`.
pub fn gn_quotient(u: &[f64], v: &[f64], grid: &RadialGrid, kernel: &RieszKernel, a: f64, b: f64, g: f64) -> f64 {
    gn_quotient_grad(u, v, grid, kernel, a, b, g, false).0
}

#[allow(clippy::too_many_arguments)]
fn gn_quotient_grad(
    u: &[f64],
    v: &[f64],
    grid: &RadialGrid,
    kernel: &RieszKernel,
    a: f64,
    b: f64,
    g: f64,
    want_grad: bool,
) -> (f64, Vec<f64>, Vec<f64>) {
    let ua: Vec<f64> = u.iter().map(|x| x.abs().powf(a)).collect();
    let vb: Vec<f64> = v.iter().map(|x| x.abs().powf(b)).collect();
    let pot_u = kernel.apply_values(&ua);
    let d = grid.dot(&vb, &pot_u);
    let t = grid.grad_norm_sq(u) + grid.grad_norm_sq(v);
    let m = grid.dot(u, u) + grid.dot(v, v);
    let k = (a + b - g) / 2.0;
    let q = t.powf(g / 2.0) * m.powf(k) / d;
    if !want_grad {
        return (q, Vec::new(), Vec::new());
    }
    let pot_v = kernel.apply_values(&vb);
    let (su, sv) = (grid.stiffness_apply(u), grid.stiffness_apply(v));
    let n = grid.len();
    let mut gu = vec![0.0; n];
    let mut gv = vec![0.0; n];
    for i in 0..n {
        let w = grid.weights[i];
        let dpu = a * u[i].signum() * u[i].abs().powf(a - 1.0) * pot_v[i] * w;
        let dpv = b * v[i].signum() * v[i].abs().powf(b - 1.0) * pot_u[i] * w;
        gu[i] = q * (g / 2.0 * 2.0 * su[i] / t + k * 2.0 * w * u[i] / m - dpu / d);
        gv[i] = q * (g / 2.0 * 2.0 * sv[i] / t + k * 2.0 * w * v[i] / m - dpv / d);
    }
    (q, gu, gv)
}

#[derive(Clone, Debug, Serialize)]
pub struct GnEstimate {
    pub which: GnWhich,
    pub constant: f64,
    pub quotient: f64,
    pub width_ratio: f64,
    /// Quotient after each accepted refinement step.
    pub history: Vec<f64>,
    pub provenance: Provenance,
}

/// `1/min Q` over Gaussian pairs of varying width ratio followed by preconditioned descent.
pub fn estimate_gn_constant(
    grid: &Arc<RadialGrid>,
    kernel: &RieszKernel,
    params: &ProblemParams,
    which: GnWhich,
    config: &SolverConfig,
    refine_iters: usize,
) -> Result<GnEstimate> {
    crate::params::ensure_valid(params)?;
    let (a, b, g, tied) = gn_exponents(params, which);
    let w0 = config.width_u;
    let gauss = |w: f64| -> Vec<f64> { grid.nodes.iter().map(|r| (-(r / w).powi(2)).exp()).collect() };
    let u0 = gauss(w0);
    let ratios: Vec<f64> = if tied { vec![1.0] } else { (-8..=8).map(|k| 1.25f64.powi(k)).collect() };
    let mut best = (f64::INFINITY, 1.0, u0.clone(), u0.clone());
    for &ratio in &ratios {
        let v = gauss(w0 * ratio);
        let q = gn_quotient(&u0, &v, grid, kernel, a, b, g);
        if q < best.0 {
            best = (q, ratio, u0.clone(), v);
        }
    }
    let (mut q, ratio, mut u, mut v) = best;
    let mut history = vec![q];
    let mut tau = config.step_init;
    for _ in 0..refine_iters {
        let (_, gu, gv) = gn_quotient_grad(&u, &v, grid, kernel, a, b, g, true);
        let (gu, gv) = if tied {
            let s: Vec<f64> = gu.iter().zip(&gv).map(|(x, y)| x + y).collect();
            (s.clone(), s)
        } else {
            (gu, gv)
        };
        let du = grid.solve_shifted(1.0, &gu);
        let dv = grid.solve_shifted(1.0, &gv);
        let scale = q.max(f64::MIN_POSITIVE);
        let mut trial = (tau * 2.0).min(1e3);
        let mut accepted = None;
        while trial > 1e-12 {
            let nu: Vec<f64> = u.iter().zip(&du).map(|(x, d)| (x - trial * d / scale).abs()).collect();
            let nv: Vec<f64> = if tied {
                nu.clone()
            } else {
                v.iter().zip(&dv).map(|(x, d)| (x - trial * d / scale).abs()).collect()
            };
            let nq = gn_quotient(&nu, &nv, grid, kernel, a, b, g);
            if nq.is_finite() && nq < q {
                accepted = Some((nq, nu, nv));
                break;
            }
            trial *= config.backtrack;
        }
        let Some((nq, nu, nv)) = accepted else { break };
        let done = (q - nq) <= 1e-10 * q;
        tau = trial;
        q = nq;
        u = nu;
        v = nv;
        history.push(q);
        if done {
            break;
        }
    }
    Ok(GnEstimate { which, constant: 1.0 / q, quotient: q, width_ratio: ratio, history, provenance: Provenance::Estimated })
}

/// All three constants with provenance `Estimated`.
pub fn estimate_gn_constants(
    grid: &Arc<RadialGrid>,
    kernel: &RieszKernel,
    params: &ProblemParams,
    config: &SolverConfig,
    refine_iters: usize,
) -> Result<GNConstants> {
    let c = |w| estimate_gn_constant(grid, kernel, params, w, config, refine_iters).map(|e| e.constant);
    Ok(GNConstants { c_pq: c(GnWhich::Pq)?, c_r1: c(GnWhich::R1)?, c_r2: c(GnWhich::R2)?, provenance: Provenance::Estimated })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeCell {
    pub rho1: f64,
    pub rho2: f64,
    pub beta: f64,
    pub m: f64,
    pub iterations: usize,
    pub verdict: Verdict,
}

/// One solve per `(ρ₁, ρ₂, β)` cell, each from the configured ansatz.
pub fn mass_monotonicity_probe(
    params: &ProblemParams,
    kernel: &RieszKernel,
    config: &SolverConfig,
    cells: &[(f64, f64, f64)],
) -> Result<Vec<ProbeCell>> {
    let grid = kernel.grid.clone();
    cells
        .iter()
        .map(|&(rho1, rho2, beta)| {
            let mut p = params.clone();
            p.rho1 = rho1;
            p.rho2 = rho2;
            p.beta = beta;
            crate::params::ensure_valid(&p)?;
            let start = init_ansatz(&grid, &p, config)?;
            let r = solve(&start, &p, kernel, config)?;
            Ok(ProbeCell { rho1, rho2, beta, m: r.breakdown.energy, iterations: r.log.len() - 1, verdict: r.verdict })
        })
        .collect()
}
