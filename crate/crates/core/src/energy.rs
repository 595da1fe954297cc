//! Energy, Pohozaev functional, fiber map in the dilation parameter, discrete
//! gradient, Lagrange multipliers and Euler–Lagrange residual.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{ExponentInfo, ProblemParams, TheoremId};
use crate::radial::StatePair;
use crate::riesz::RieszKernel;
use crate::roots;

/// The five dilation-independent integrals together with `J` and `P`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    #[serde(rename = "T")]
    pub kinetic: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "D2")]
    pub d2: f64,
    #[serde(rename = "Dpq")]
    pub dpq: f64,
    #[serde(rename = "L")]
    pub coupling: f64,
    #[serde(rename = "J")]
    pub energy: f64,
    #[serde(rename = "P")]
    pub pohozaev: f64,
}

/// Scalar weights that turn a breakdown into `Ψ`: the exponents `2γ_{r₁}, 2γ_{r₂}, γ_p+γ_q`
/// and the physical coefficients.
#[derive(Clone, Copy, Debug)]
pub struct FiberCoeffs {
    pub e1: f64,
    pub e2: f64,
    pub ep: f64,
    pub lam1: f64,
    pub lam2: f64,
    pub beta: f64,
    pub kappa: f64,
    pub r1: f64,
    pub r2: f64,
}

impl FiberCoeffs {
    pub fn new(params: &ProblemParams) -> Self {
        let e = params.exponents();
        Self {
            e1: 2.0 * e.gamma_r1,
            e2: 2.0 * e.gamma_r2,
            ep: e.gamma_pq(),
            lam1: params.lambda1,
            lam2: params.lambda2,
            beta: params.beta,
            kappa: params.kappa,
            r1: e.r1,
            r2: e.r2,
        }
    }
}

impl EnergyBreakdown {
    fn assemble(kinetic: f64, d1: f64, d2: f64, dpq: f64, coupling: f64, c: &FiberCoeffs) -> Self {
        let mut b = Self { kinetic, d1, d2, dpq, coupling, energy: 0.0, pohozaev: 0.0 };
        let [k, a, bb, cc] = b.terms(c);
        b.energy = 0.5 * k - a - bb - cc - c.kappa * coupling;
        b.pohozaev = k - c.e1 * a - c.e2 * bb - c.ep * cc;
        b
    }

    /// `[T, λ₁D₁/2r₁, λ₂D₂/2r₂, βD_pq]`; every fiber quantity is a combination of these.
    fn terms(&self, c: &FiberCoeffs) -> [f64; 4] {
        [
            self.kinetic,
            c.lam1 * self.d1 / (2.0 * c.r1),
            c.lam2 * self.d2 / (2.0 * c.r2),
            c.beta * self.dpq,
        ]
    }

    /// Breakdown of `t⋄(u,v)` from the exact dilation exponents.
    pub fn dilated(&self, params: &ProblemParams, t: f64) -> Self {
        let c = FiberCoeffs::new(params);
        Self::assemble(
            t * t * self.kinetic,
            t.powf(c.e1) * self.d1,
            t.powf(c.e2) * self.d2,
            t.powf(c.ep) * self.dpq,
            self.coupling,
            &c,
        )
    }

    pub fn psi(&self, params: &ProblemParams, t: f64) -> f64 {
        self.dilated(params, t).energy
    }

    /// `t·Ψ'(t)`, identical to `P_β(t⋄(u,v))`.
    pub fn t_dpsi(&self, params: &ProblemParams, t: f64) -> f64 {
        self.dilated(params, t).pohozaev
    }

    /// Term-wise derivative of `Ψ`.
    pub fn dpsi(&self, params: &ProblemParams, t: f64) -> f64 {
        let c = FiberCoeffs::new(params);
        let [k, a, b, cc] = self.terms(&c);
        t * k - c.e1 * a * t.powf(c.e1 - 1.0) - c.e2 * b * t.powf(c.e2 - 1.0) - c.ep * cc * t.powf(c.ep - 1.0)
    }

    /// `t²·Ψ''(t)`.
    pub fn t2_ddpsi(&self, params: &ProblemParams, t: f64) -> f64 {
        let c = FiberCoeffs::new(params);
        let [k, a, b, cc] = self.dilated(params, t).terms(&c);
        k - c.e1 * (c.e1 - 1.0) * a - c.e2 * (c.e2 - 1.0) * b - c.ep * (c.ep - 1.0) * cc
    }

    pub fn ddpsi(&self, params: &ProblemParams, t: f64) -> f64 {
        self.t2_ddpsi(params, t) / (t * t)
    }
}

/// Nonlinear densities and their potentials for one state.
struct Densities {
    u_r1: Vec<f64>,
    v_r2: Vec<f64>,
    v_q: Vec<f64>,
    pot_u_r1: Vec<f64>,
    pot_v_r2: Vec<f64>,
    pot_u_p: Vec<f64>,
    pot_v_q: Vec<f64>,
}

fn powers(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|a| a.abs().powf(s)).collect()
}

/// `sign(x)|x|^{s-1}`, the derivative of `|x|^s / s`.
fn signed_powers(x: &[f64], s: f64) -> Vec<f64> {
    x.iter().map(|&a| if a == 0.0 { 0.0 } else { a.signum() * a.abs().powf(s - 1.0) }).collect()
}

fn densities(state: &StatePair, e: &ExponentInfo, kernel: &RieszKernel) -> Densities {
    let u_r1 = powers(&state.u, e.r1);
    let v_r2 = powers(&state.v, e.r2);
    let v_q = powers(&state.v, e.q);
    let pot_u_r1 = kernel.apply_values(&u_r1);
    let pot_v_r2 = kernel.apply_values(&v_r2);
    let pot_u_p = kernel.apply_values(&powers(&state.u, e.p));
    let pot_v_q = kernel.apply_values(&v_q);
    Densities { u_r1, v_r2, v_q, pot_u_r1, pot_v_r2, pot_u_p, pot_v_q }
}

fn check_grid(state: &StatePair, kernel: &RieszKernel) -> Result<()> {
    if state.grid.spec == kernel.grid.spec && state.u.len() == kernel.len() {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

fn breakdown_from(state: &StatePair, params: &ProblemParams, d: &Densities) -> EnergyBreakdown {
    let g = &state.grid;
    EnergyBreakdown::assemble(
        state.kinetic(),
        g.dot(&d.u_r1, &d.pot_u_r1),
        g.dot(&d.v_r2, &d.pot_v_r2),
        g.dot(&d.v_q, &d.pot_u_p),
        g.dot(&state.u, &state.v),
        &FiberCoeffs::new(params),
    )
}

pub fn energy(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<EnergyBreakdown> {
    check_grid(state, kernel)?;
    let d = densities(state, &params.exponents(), kernel);
    Ok(breakdown_from(state, params, &d))
}

pub fn pohozaev(breakdown: &EnergyBreakdown, params: &ProblemParams) -> f64 {
    breakdown.dilated(params, 1.0).pohozaev
}

/// Gradient of the discrete energy with respect to nodal values (not divided by weights).
#[derive(Clone, Debug)]
pub struct Gradient {
    pub gu: Vec<f64>,
    pub gv: Vec<f64>,
}

/// Energy breakdown and gradient from a single set of kernel applications.
pub fn energy_and_gradient(
    state: &StatePair,
    params: &ProblemParams,
    kernel: &RieszKernel,
) -> Result<(EnergyBreakdown, Gradient)> {
    check_grid(state, kernel)?;
    let e = params.exponents();
    let d = densities(state, &e, kernel);
    let breakdown = breakdown_from(state, params, &d);
    let g = &state.grid;
    let su = g.stiffness_apply(&state.u);
    let sv = g.stiffness_apply(&state.v);
    let du_r1 = signed_powers(&state.u, e.r1);
    let dv_r2 = signed_powers(&state.v, e.r2);
    let du_p = signed_powers(&state.u, e.p);
    let dv_q = signed_powers(&state.v, e.q);
    let (l1, l2, b, k) = (params.lambda1, params.lambda2, params.beta, params.kappa);
    let m = g.len();
    let mut gu = vec![0.0; m];
    let mut gv = vec![0.0; m];
    for i in 0..m {
        let w = g.weights[i];
        gu[i] = su[i]
            - w * (l1 * d.pot_u_r1[i] * du_r1[i] + b * e.p * du_p[i] * d.pot_v_q[i] + k * state.v[i]);
        gv[i] = sv[i]
            - w * (l2 * d.pot_v_r2[i] * dv_r2[i] + b * e.q * dv_q[i] * d.pot_u_p[i] + k * state.u[i]);
    }
    Ok((breakdown, Gradient { gu, gv }))
}

pub fn gradient(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<Gradient> {
    energy_and_gradient(state, params, kernel).map(|(_, g)| g)
}

/// `μᵢ = -(1/ρᵢ²)⟨∂ᵢJ, uᵢ⟩`.
pub fn multipliers_from(state: &StatePair, grad: &Gradient) -> (f64, f64) {
    let pu: f64 = grad.gu.iter().zip(&state.u).map(|(g, x)| g * x).sum();
    let pv: f64 = grad.gv.iter().zip(&state.v).map(|(g, x)| g * x).sum();
    (-pu / (state.rho1 * state.rho1), -pv / (state.rho2 * state.rho2))
}

pub fn multipliers(state: &StatePair, params: &ProblemParams, kernel: &RieszKernel) -> Result<(f64, f64)> {
    let g = gradient(state, params, kernel)?;
    Ok(multipliers_from(state, &g))
}

/// `‖∇(J + μ₁|u|²/2 + μ₂|v|²/2)‖ / √T` in the weighted nodal norm.
pub fn el_residual_from(state: &StatePair, grad: &Gradient, kinetic: f64, mu1: f64, mu2: f64) -> f64 {
    let g = &state.grid;
    let mut acc = 0.0;
    for i in 0..g.len() {
        let w = g.weights[i];
        let ru = grad.gu[i] + mu1 * w * state.u[i];
        let rv = grad.gv[i] + mu2 * w * state.v[i];
        acc += (ru * ru + rv * rv) / w;
    }
    acc.sqrt() / kinetic.sqrt()
}

pub fn el_residual(
    state: &StatePair,
    params: &ProblemParams,
    kernel: &RieszKernel,
    mu1: f64,
    mu2: f64,
) -> Result<f64> {
    let (b, g) = energy_and_gradient(state, params, kernel)?;
    Ok(el_residual_from(state, &g, b.kinetic, mu1, mu2))
}

/// Sign of `Ψ''` at a fiber critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiberKind {
    Plus,
    Zero,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub t: f64,
    pub psi: f64,
    pub ddpsi: f64,
    pub kind: FiberKind,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberProfile {
    pub breakdown: EnergyBreakdown,
    pub t: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub ddpsi: Vec<f64>,
    pub critical: Vec<CriticalPoint>,
    pub expected_count: Option<usize>,
    /// Set when the critical-point count contradicts the regime's expected fiber shape.
    pub unexpected_count: Option<String>,
}

/// Number of fiber critical points the regime predicts for every fiber.
pub fn expected_critical_count(id: TheoremId) -> Option<usize> {
    use TheoremId::*;
    match id {
        T1_3 => Some(0),
        T1_4 | T1_9 | T1_10 | T1_11 | T1_13 => Some(2),
        OutOfScope => None,
        _ => Some(1),
    }
}

pub const DEFAULT_T_RANGE: (f64, f64) = (1e-3, 1e3);
pub const DEFAULT_T_SAMPLES: usize = 512;

/// Critical points of `Ψ` in `[lo, hi]`, found on a log grid of `samples` points and refined.
pub fn critical_points(
    breakdown: &EnergyBreakdown,
    params: &ProblemParams,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Vec<CriticalPoint> {
    let f = |t: f64| breakdown.t_dpsi(params, t);
    roots::roots_in(f, lo, hi, samples, 1e-13)
        .into_iter()
        .map(|t| {
            let dd = breakdown.ddpsi(params, t);
            let scale = breakdown.kinetic.abs().max(f64::MIN_POSITIVE);
            let kind = if dd.abs() <= 1e-9 * scale {
                FiberKind::Zero
            } else if dd > 0.0 {
                FiberKind::Plus
            } else {
                FiberKind::Minus
            };
            CriticalPoint { t, psi: breakdown.psi(params, t), ddpsi: dd, kind }
        })
        .collect()
}

pub fn fiber(
    breakdown: &EnergyBreakdown,
    params: &ProblemParams,
    regime: Option<TheoremId>,
    t_range: (f64, f64),
    samples: usize,
) -> FiberProfile {
    let t = roots::log_grid(t_range.0, t_range.1, samples);
    let psi = t.iter().map(|&x| breakdown.psi(params, x)).collect();
    let dpsi = t.iter().map(|&x| breakdown.dpsi(params, x)).collect();
    let ddpsi = t.iter().map(|&x| breakdown.ddpsi(params, x)).collect();
    let critical = critical_points(breakdown, params, t_range.0, t_range.1, samples);
    let expected_count = regime.and_then(expected_critical_count);
    let unexpected_count = match expected_count {
        Some(n) if n != critical.len() => Some(format!(
            "found {} fiber critical points, regime predicts {n}",
            critical.len()
        )),
        _ => None,
    };
    FiberProfile { breakdown: *breakdown, t, psi, dpsi, ddpsi, critical, expected_count, unexpected_count }
}

/// `t_β`: the fiber maximum, i.e. the critical point with `Ψ'' < 0` of largest `Ψ`.
pub fn fiber_max(breakdown: &EnergyBreakdown, params: &ProblemParams) -> Result<CriticalPoint> {
    let (lo, hi) = (1e-6, 1e6);
    critical_points(breakdown, params, lo, hi, 2048)
        .into_iter()
        .filter(|c| c.kind == FiberKind::Minus)
        .max_by(|a, b| a.psi.total_cmp(&b.psi))
        .ok_or_else(|| Error::FiberDegenerate(format!("no local maximum of Psi on [{lo:e}, {hi:e}]")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::rat;
    use crate::radial::{normalize_mass, GridSpec, RadialGrid};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn case_a() -> ProblemParams {
        let mut p = ProblemParams::with_exponents(3, rat("1"), rat("1.4"), rat("1.4"), rat("1.5"), rat("1.5"));
        p.beta = 0.5;
        p.kappa = 0.1;
        p
    }

    fn setup() -> (Arc<RadialGrid>, RieszKernel) {
        let grid = Arc::new(RadialGrid::new(GridSpec { panels: 22, ..GridSpec::standard(3, 12.0) }));
        let k = RieszKernel::build(grid.clone(), 1.0).unwrap();
        (grid, k)
    }

    fn gaussian_pair(grid: &Arc<RadialGrid>, a: f64, b: f64) -> StatePair {
        let u = grid.nodes.iter().map(|r| (-a * r * r).exp()).collect();
        let v = grid.nodes.iter().map(|r| (-b * r * r).exp()).collect();
        normalize_mass(&StatePair::new(grid.clone(), u, v, 1.0, 1.0)).unwrap()
    }

    fn random_state(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> StatePair {
        let (a, b) = (rng.gen_range(0.2..1.5), rng.gen_range(0.2..1.5));
        let (c, d) = (rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3));
        let u = grid.nodes.iter().map(|r| (-a * r * r).exp() * (1.0 + c * (r).cos())).collect();
        let v = grid.nodes.iter().map(|r| (-b * r * r).exp() * (1.0 + d * (2.0 * r).sin())).collect();
        normalize_mass(&StatePair::new(grid.clone(), u, v, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn zero_fields_have_zero_integrals() {
        let (grid, k) = setup();
        let z = StatePair::new(grid.clone(), vec![0.0; grid.len()], vec![0.0; grid.len()], 1.0, 1.0);
        let b = energy(&z, &case_a(), &k).unwrap();
        assert_eq!((b.kinetic, b.d1, b.d2, b.dpq, b.coupling, b.energy, b.pohozaev), (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn decoupled_v_enters_through_kinetic_only() {
        let (grid, k) = setup();
        let mut p = case_a();
        p.beta = 0.0;
        p.kappa = 0.0;
        p.lambda2 = 0.0;
        let s1 = gaussian_pair(&grid, 0.5, 0.5);
        let s2 = gaussian_pair(&grid, 0.5, 1.3);
        let (b1, b2) = (energy(&s1, &p, &k).unwrap(), energy(&s2, &p, &k).unwrap());
        let dv = 0.5 * (grid.grad_norm_sq(&s2.v) - grid.grad_norm_sq(&s1.v));
        assert!((b2.energy - b1.energy - dv).abs() < 1e-13);
    }

    #[test]
    fn pure_kinetic_pohozaev_equals_kinetic() {
        let (grid, k) = setup();
        let mut p = case_a();
        p.lambda1 = 0.0;
        p.lambda2 = 0.0;
        p.beta = 0.0;
        let b = energy(&gaussian_pair(&grid, 0.7, 0.4), &p, &k).unwrap();
        assert_eq!(pohozaev(&b, &p), b.kinetic);
        assert!(b.kinetic > 0.0);
    }

    #[test]
    fn breakdown_identities_and_fiber_at_one() {
        let (grid, k) = setup();
        let p = case_a();
        let b = energy(&gaussian_pair(&grid, 0.6, 0.9), &p, &k).unwrap();
        let e = p.exponents();
        let j = b.kinetic / 2.0 - b.d1 / (2.0 * 1.5) - b.d2 / (2.0 * 1.5) - 0.5 * b.dpq - 0.1 * b.coupling;
        let pz = b.kinetic - e.gamma_r1 / 1.5 * b.d1 - e.gamma_r2 / 1.5 * b.d2 - 0.5 * e.gamma_pq() * b.dpq;
        assert!((b.energy - j).abs() < 1e-14 * j.abs().max(1.0));
        assert!((b.pohozaev - pz).abs() < 1e-14 * b.kinetic);
        assert_eq!(b.psi(&p, 1.0), b.energy);
        assert_eq!(b.dpsi(&p, 1.0), b.pohozaev);
        assert!(b.coupling.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn fiber_identity_is_exact() {
        let (grid, k) = setup();
        let p = case_a();
        let b = energy(&gaussian_pair(&grid, 0.6, 0.9), &p, &k).unwrap();
        for t in roots::log_grid(1e-3, 1e3, 512) {
            let lhs = t * b.dpsi(&p, t);
            let rhs = b.dilated(&p, t).pohozaev;
            assert!((lhs - rhs).abs() <= 1e-13 * b.kinetic.abs() * t * t.max(1.0), "t={t}");
        }
        let tiny = b.psi(&p, 1e-80);
        assert!((tiny + p.kappa * b.coupling).abs() < 1e-6);
    }

    #[test]
    fn case_a_fiber_has_single_plus_point() {
        let (grid, k) = setup();
        let p = case_a();
        let b = energy(&gaussian_pair(&grid, 0.6, 0.9), &p, &k).unwrap();
        let prof = fiber(&b, &p, Some(TheoremId::T1_1), DEFAULT_T_RANGE, DEFAULT_T_SAMPLES);
        assert_eq!(prof.critical.len(), 1);
        assert_eq!(prof.critical[0].kind, FiberKind::Plus);
        assert!(prof.unexpected_count.is_none());
        let t0 = prof.critical[0].t;
        for (t, d) in prof.t.iter().zip(&prof.dpsi) {
            if *t > t0 * 1.01 {
                assert!(*d > 0.0);
            }
        }
    }

    #[test]
    fn dilation_pohozaev_cross_validates_with_resampling() {
        let (grid, k) = setup();
        let p = case_a();
        let s = gaussian_pair(&grid, 0.6, 0.9);
        let b = energy(&s, &p, &k).unwrap();
        for t in [0.8, 1.25] {
            let analytic = b.dilated(&p, t).pohozaev;
            let resampled = energy(&s.dilate(t), &p, &k).unwrap().pohozaev;
            assert!(((analytic - resampled) / analytic).abs() < 1e-3, "t={t}: {analytic} vs {resampled}");
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let (grid, k) = setup();
        let p = case_a();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let s = random_state(&grid, &mut rng);
            let g = gradient(&s, &p, &k).unwrap();
            for _ in 0..20 {
                let du: Vec<f64> = s.u.iter().map(|x| x * rng.gen_range(-0.5..0.5)).collect();
                let dv: Vec<f64> = s.v.iter().map(|x| x * rng.gen_range(-0.5..0.5)).collect();
                let exact: f64 = g.gu.iter().zip(&du).chain(g.gv.iter().zip(&dv)).map(|(a, b)| a * b).sum();
                let best = [1e-3, 1e-4, 1e-5]
                    .iter()
                    .map(|&h| {
                        let shifted = |sgn: f64| {
                            let u = s.u.iter().zip(&du).map(|(a, b)| a + sgn * h * b).collect();
                            let v = s.v.iter().zip(&dv).map(|(a, b)| a + sgn * h * b).collect();
                            energy(&StatePair::new(grid.clone(), u, v, 1.0, 1.0), &p, &k).unwrap().energy
                        };
                        let fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
                        ((fd - exact) / exact).abs()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-5, "relative error {best}");
            }
        }
    }

    #[test]
    fn multipliers_even_and_laplacian_sign() {
        let (grid, k) = setup();
        let p = case_a();
        let s = gaussian_pair(&grid, 0.6, 0.9);
        let (m1, m2) = multipliers(&s, &p, &k).unwrap();
        let neg = StatePair::new(grid.clone(), s.u.iter().map(|x| -x).collect(), s.v.iter().map(|x| -x).collect(), 1.0, 1.0);
        let (n1, n2) = multipliers(&neg, &p, &k).unwrap();
        assert!((m1 - n1).abs() < 1e-12 * m1.abs() && (m2 - n2).abs() < 1e-12 * m2.abs());
        let mut free = p.clone();
        free.lambda1 = 0.0;
        free.lambda2 = 0.0;
        free.beta = 0.0;
        free.kappa = 0.0;
        let (f1, _) = multipliers(&s, &free, &k).unwrap();
        let rayleigh = grid.grad_norm_sq(&s.u) / grid.dot(&s.u, &s.u);
        assert!((f1 + rayleigh).abs() < 1e-12 * rayleigh);
    }

    #[test]
    fn residual_positive_on_random_state() {
        let (grid, k) = setup();
        let p = case_a();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&grid, &mut rng);
        let (m1, m2) = multipliers(&s, &p, &k).unwrap();
        assert!(el_residual(&s, &p, &k, m1, m2).unwrap() > 0.0);
    }

    #[test]
    fn expected_counts() {
        assert_eq!(expected_critical_count(TheoremId::T1_1), Some(1));
        assert_eq!(expected_critical_count(TheoremId::T1_3), Some(0));
        assert_eq!(expected_critical_count(TheoremId::T1_9), Some(2));
        assert_eq!(expected_critical_count(TheoremId::OutOfScope), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn symmetrization_lowers_energy(seed in 0u64..1000) {
            let (grid, k) = setup();
            let p = case_a();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = random_state(&grid, &mut rng);
            let flipped = StatePair::new(
                grid.clone(),
                s.u.iter().enumerate().map(|(i, x)| if i % 7 == 0 { -x } else { *x }).collect(),
                s.v.iter().enumerate().map(|(i, x)| if i % 5 == 0 { -x } else { *x }).collect(),
                1.0,
                1.0,
            );
            let j = energy(&flipped, &p, &k).unwrap().energy;
            let ja = energy(&flipped.abs(), &p, &k).unwrap().energy;
            prop_assert!(ja <= j + 1e-13 * j.abs());
        }

        #[test]
        fn fiber_limits(t in 1e-3f64..1e3) {
            let b = EnergyBreakdown { kinetic: 2.0, d1: 0.4, d2: 0.3, dpq: 0.2, coupling: 0.5, energy: 0.0, pohozaev: 0.0 };
            let p = case_a();
            let lhs = t * b.dpsi(&p, t);
            let rhs = b.dilated(&p, t).pohozaev;
            prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.abs().max(b.kinetic));
        }
    }
}
