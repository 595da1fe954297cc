//! Pass/fail checks of a solve against the regime's conclusions, and the fiber-wise
//! Pohozaev scan for the nonexistence regime.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::energy::{energy, FiberKind, DEFAULT_T_RANGE, DEFAULT_T_SAMPLES};
use crate::error::Result;
use crate::params::{Character, ProblemParams, TheoremId};
use crate::radial::{normalize_mass, RadialGrid, StatePair};
use crate::riesz::RieszKernel;
use crate::roots;
use crate::solver::SolveReport;
use crate::thresholds::{LandscapeShape, ThresholdReport};

/// Nodes with `|u| ≤ TAIL·max|u|` are left out of the positivity check.
pub const TAIL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    /// `None` when the check does not apply to the regime.
    pub verdict: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub regime: TheoremId,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

impl VerificationReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn check(name: &str, value: f64, tolerance: f64, verdict: Option<bool>, note: &str) -> Check {
    Check { name: name.into(), value, tolerance, verdict, note: note.into() }
}

/// Smallest nodal value relative to the component's maximum, over nodes outside the tail.
pub fn min_relative_value(x: &[f64]) -> f64 {
    let top = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    if top == 0.0 {
        return 0.0;
    }
    x.iter()
        .filter(|a| a.abs() > TAIL * top)
        .map(|a| a / top)
        .fold(f64::INFINITY, f64::min)
}

pub fn verify_solution(
    solve: &SolveReport,
    thresholds: &ThresholdReport,
    params: &ProblemParams,
    el_tolerance: f64,
) -> VerificationReport {
    let b = &solve.breakdown;
    let character = thresholds.regime.character;
    let level = -params.kappa * params.rho1 * params.rho2;
    let mut checks = Vec::new();

    let ratio = b.pohozaev / b.kinetic;
    checks.push(check("pohozaev_zero", ratio, el_tolerance, Some(ratio.abs() <= el_tolerance), "|P|/T"));

    let mu = solve.mu1.min(solve.mu2);
    checks.push(check("multipliers_positive", mu, 0.0, Some(mu > 0.0), "min(mu1, mu2)"));

    let pos = min_relative_value(&solve.state.u).min(min_relative_value(&solve.state.v));
    checks.push(check("positivity", pos, TAIL, Some(pos > 0.0), "min nodal value / max outside the tail"));

    let want = match character {
        Some(Character::LocalMin) => Some(FiberKind::Plus),
        Some(Character::MountainPass) => Some(FiberKind::Minus),
        _ => None,
    };
    let ddpsi = solve.fiber_point.map(|c| c.ddpsi).unwrap_or(f64::NAN);
    checks.push(check(
        "fiber_classification",
        ddpsi,
        0.0,
        want.map(|w| solve.fiber_kind == Some(w)),
        &format!("Psi'' at the fiber critical point nearest t=1; expected {want:?}"),
    ));

    let gap = b.energy - level;
    checks.push(check(
        "energy_below_neg_kappa",
        gap,
        0.0,
        (character == Some(Character::LocalMin)).then_some(gap < 0.0),
        "J + kappa*rho1*rho2",
    ));
    checks.push(check(
        "energy_above_neg_kappa",
        gap,
        0.0,
        (character == Some(Character::MountainPass)).then_some(gap > 0.0),
        "J + kappa*rho1*rho2",
    ));

    let l = &thresholds.landscape;
    let geometry = match l.shape {
        Some(LandscapeShape::DoubleCritical) => match (l.s1, l.s0, l.s2) {
            (Some(a), Some(b), Some(c)) => Some(a < b && b < c),
            _ => Some(false),
        },
        Some(_) => Some(l.s0.is_some_and(|s| s > 0.0)),
        None => None,
    };
    checks.push(check(
        "landscape_geometry",
        l.s0.unwrap_or(f64::NAN),
        0.0,
        geometry,
        "s1 < s0 < s2 for double-critical landscapes, s0 > 0 otherwise",
    ));

    let nonex = thresholds.nonexistence_value;
    checks.push(check(
        "nonexistence_flag",
        nonex.unwrap_or(f64::NAN),
        0.0,
        nonex.map(|v| v > 0.0),
        "nonexistence inequality value; applies only to the fully mass-critical regime",
    ));

    let all_pass = checks.iter().all(|c| c.verdict != Some(false));
    VerificationReport { regime: thresholds.regime.theorem_id, checks, all_pass }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateScan {
    /// `min_t t·Ψ'(t)` over the sample grid.
    pub min_t_dpsi: f64,
    /// `T - 2(λ₁D₁/2r₁ + λ₂D₂/2r₂ + βD_pq)`, the coefficient of `t²` in `t·Ψ'(t)`
    /// when every exponent is mass critical.
    pub critical_bracket: Option<f64>,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonexistenceScan {
    pub states: Vec<StateScan>,
    pub all_positive: bool,
    /// Index of the first state whose fiber attains `P ≤ 0`.
    pub witness: Option<usize>,
    pub note: String,
}

/// Checks that no sampled fiber has a Pohozaev zero; a necessary condition only.
pub fn nonexistence_scan(params: &ProblemParams, kernel: &RieszKernel, trial_states: &[StatePair]) -> Result<NonexistenceScan> {
    let ts = roots::log_grid(DEFAULT_T_RANGE.0, DEFAULT_T_RANGE.1, DEFAULT_T_SAMPLES);
    let e = params.exponents();
    let critical = e.gamma_r1 == 1.0 && e.gamma_r2 == 1.0 && e.gamma_pq() == 2.0;
    let mut states = Vec::with_capacity(trial_states.len());
    for s in trial_states {
        let b = energy(s, params, kernel)?;
        let min_t_dpsi = ts.iter().map(|&t| b.t_dpsi(params, t)).fold(f64::INFINITY, f64::min);
        let critical_bracket = critical.then(|| {
            b.kinetic
                - 2.0
                    * (params.lambda1 * b.d1 / (2.0 * e.r1) + params.lambda2 * b.d2 / (2.0 * e.r2)
                        + params.beta * b.dpq)
        });
        states.push(StateScan { min_t_dpsi, critical_bracket, positive: min_t_dpsi > 0.0 });
    }
    let witness = states.iter().position(|s| !s.positive);
    Ok(NonexistenceScan {
        all_positive: witness.is_none(),
        witness,
        states,
        note: "fiber-wise Pohozaev positivity over sampled states; a necessary condition, not a proof".into(),
    })
}

/// `n` positive random states on the torus: Gaussian mixtures with random widths, centers and weights.
pub fn random_trial_states(grid: &Arc<RadialGrid>, params: &ProblemParams, n: usize, seed: u64) -> Result<Vec<StatePair>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let terms: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(0.1..1.0), rng.gen_range(0.3..3.0), rng.gen_range(0.0..3.0)))
            .collect();
        grid.nodes
            .iter()
            .map(|r| {
                terms.iter().map(|(a, w, c)| a * (-((r - c) / w).powi(2)).exp()).sum::<f64>().max(1e-300)
            })
            .collect()
    };
    (0..n)
        .map(|_| {
            let u = mix(&mut rng);
            let v = mix(&mut rng);
            normalize_mass(&StatePair::new(grid.clone(), u, v, params.rho1, params.rho2))
        })
        .collect()
}
