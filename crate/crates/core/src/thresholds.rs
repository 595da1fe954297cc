//! The landscape function `h(s)`, its coefficients, and the per-regime
//! thresholds `s₀, β₀, κ₀` with their side conditions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{classify_regime, cond, ExponentInfo, ProblemParams, RegimeClass, SideCondition, TheoremId};
use crate::roots;

const RTOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Estimated,
    UserSupplied,
}

/// Gagliardo–Nirenberg-type constants `C(N,p,q)`, `C(N,r₁,r₁)`, `C(N,r₂,r₂)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GNConstants {
    pub c_pq: f64,
    pub c_r1: f64,
    pub c_r2: f64,
    pub provenance: Provenance,
}

impl GNConstants {
    pub fn supplied(c_pq: f64, c_r1: f64, c_r2: f64) -> Self {
        Self { c_pq, c_r1, c_r2, provenance: Provenance::UserSupplied }
    }

    pub fn unit() -> Self {
        Self::supplied(1.0, 1.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LandscapeCoeffs {
    #[serde(rename = "A1")]
    pub a1: f64,
    #[serde(rename = "A2")]
    pub a2: f64,
    #[serde(rename = "A3")]
    pub a3: f64,
    pub kappa_rho: f64,
}

/// `(ρ₁²+ρ₂²)^{(p+q-γ_p-γ_q)/2}`, the mass factor multiplying `βC(N,p,q)` in `A₃`.
pub fn mass_factor(params: &ProblemParams) -> f64 {
    let e = params.exponents();
    (params.rho1.powi(2) + params.rho2.powi(2)).powf((e.p + e.q - e.gamma_pq()) / 2.0)
}

pub fn coeffs(params: &ProblemParams, gn: &GNConstants) -> LandscapeCoeffs {
    let e = params.exponents();
    let a1 = params.lambda1 / (2.0 * e.r1) * gn.c_r1 * 2f64.powf(e.r1) * params.rho1.powf(2.0 * (e.r1 - e.gamma_r1));
    let a2 = params.lambda2 / (2.0 * e.r2) * gn.c_r2 * 2f64.powf(e.r2) * params.rho2.powf(2.0 * (e.r2 - e.gamma_r2));
    let a3 = params.beta * gn.c_pq * mass_factor(params);
    LandscapeCoeffs { a1, a2, a3, kappa_rho: params.kappa * params.rho1 * params.rho2 }
}

/// Landscape exponents `2γ_{r₁}, 2γ_{r₂}, γ_p+γ_q`.
#[derive(Clone, Copy, Debug)]
struct Ex {
    e1: f64,
    e2: f64,
    ep: f64,
    g1: f64,
    g2: f64,
}

impl Ex {
    fn of(e: &ExponentInfo) -> Self {
        Self { e1: 2.0 * e.gamma_r1, e2: 2.0 * e.gamma_r2, ep: e.gamma_pq(), g1: e.gamma_r1, g2: e.gamma_r2 }
    }
}

pub fn h_eval(c: &LandscapeCoeffs, exps: &ExponentInfo, s: f64) -> f64 {
    let x = Ex::of(exps);
    0.5 * s * s - c.a1 * s.powf(x.e1) - c.a2 * s.powf(x.e2) - c.a3 * s.powf(x.ep) - c.kappa_rho
}

pub fn h_prime(c: &LandscapeCoeffs, exps: &ExponentInfo, s: f64) -> f64 {
    let x = Ex::of(exps);
    s - x.e1 * c.a1 * s.powf(x.e1 - 1.0) - x.e2 * c.a2 * s.powf(x.e2 - 1.0) - x.ep * c.a3 * s.powf(x.ep - 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LandscapeShape {
    MonotoneWell,
    SingleHump,
    DoubleCritical,
}

pub fn shape_of(id: TheoremId) -> Option<LandscapeShape> {
    use TheoremId::*;
    match id {
        T1_1 | T1_2 | T1_7 | T1_8 => Some(LandscapeShape::MonotoneWell),
        T1_5 | T1_6 | T1_12 | T1_14 | T1_15 => Some(LandscapeShape::SingleHump),
        T1_4 | T1_9 | T1_10 | T1_11 | T1_13 => Some(LandscapeShape::DoubleCritical),
        T1_3 | OutOfScope => None,
    }
}

/// Critical-point structure of `h` for one regime.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Landscape {
    pub s0: Option<f64>,
    pub s_star: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    #[serde(rename = "T0")]
    pub t0: Option<f64>,
    #[serde(rename = "T1")]
    pub t1: Option<f64>,
    pub shape: Option<LandscapeShape>,
    pub notes: Vec<String>,
}

/// Solves `Σ cᵢ s^{kᵢ} = target` for a sum of power terms that is monotone in `s`.
fn solve_power_sum(terms: &[(f64, f64)], target: f64) -> Result<f64> {
    let g = |s: f64| terms.iter().map(|(c, k)| c * s.powf(*k)).sum::<f64>() - target;
    let g1 = g(1.0);
    if g1 == 0.0 {
        return Ok(1.0);
    }
    let other = roots::expand_up(g, 2.0, -g1.signum(), 1000)
        .or_else(|| roots::expand_down(g, 0.5, -g1.signum(), 1000))
        .ok_or_else(|| Error::RootNotBracketed(format!("power sum never reaches {target}")))?;
    let (a, b) = if other > 1.0 { (other * 0.5, other) } else { (other, other * 2.0) };
    roots::bracketed(g, a, b, RTOL)
}

/// `s₀` of the regime, the auxiliary `s_*` where one is defined, and notes.
fn s0_for(class: &RegimeClass, c: &LandscapeCoeffs, x: &Ex) -> Result<(Option<f64>, Option<f64>, Vec<String>)> {
    use TheoremId::*;
    let merged = class.sum_equals_2r1;
    let (a1, a2, a3) = (c.a1, c.a2, c.a3);
    let (e1, e2, ep, g1, g2) = (x.e1, x.e2, x.ep, x.g1, x.g2);
    let notes = Vec::new();
    let s0 = match class.theorem_id {
        T1_1 if merged => (e1 * (a1 + a2 + a3)).powf(1.0 / (2.0 - e1)),
        T1_1 => solve_power_sum(&[(e1 * (a1 + a2), e1 - 2.0), (ep * a3, ep - 2.0)], 1.0)?,
        T1_2 => (a3 * ep / (1.0 - 2.0 * (a1 + a2))).powf(1.0 / (2.0 - ep)),
        T1_3 | OutOfScope => return Ok((None, None, notes)),
        T1_4 => ((2.0 - ep) / (e1 * (e1 - ep) * (a1 + a2))).powf(1.0 / (e1 - 2.0)),
        T1_5 => ((1.0 - 2.0 * a3) / (e1 * (a1 + a2))).powf(1.0 / (e1 - 2.0)),
        T1_6 if merged => (1.0 / (e1 * (a1 + a2 + a3))).powf(1.0 / (e1 - 2.0)),
        T1_6 => solve_power_sum(&[(e1 * (a1 + a2), e1 - 2.0), (ep * a3, ep - 2.0)], 1.0)?,
        T1_7 if merged => solve_power_sum(&[(e1 * (a1 + a3), e1 - 2.0), (e2 * a2, e2 - 2.0)], 1.0)?,
        T1_7 => solve_power_sum(&[(e1 * a1, e1 - 2.0), (e2 * a2, e2 - 2.0), (ep * a3, ep - 2.0)], 1.0)?,
        T1_8 if merged => ((1.0 - 2.0 * a2) / (e1 * (a1 + a3))).powf(1.0 / (e1 - 2.0)),
        T1_8 => solve_power_sum(&[(e1 * a1, e1 - 2.0), (ep * a3, ep - 2.0)], 1.0 - 2.0 * a2)?,
        T1_9 => {
            let a1p = e1 * (e1 - ep) * a1;
            let a2p = e2 * (e2 - ep) * a2;
            ((1.0 - g1) * a1p / ((g2 - 1.0) * a2p)).powf(1.0 / (e2 - e1))
        }
        T1_10 => ((1.0 - g1) / ((g2 - g1) * e2 * a2)).powf(1.0 / (e2 - 2.0)),
        T1_11 => ((2.0 - ep) * (1.0 - 2.0 * a1) / ((e2 - ep) * e2 * a2)).powf(1.0 / (e2 - 2.0)),
        T1_12 => ((1.0 - 2.0 * (a1 + a3)) / (e2 * a2)).powf(1.0 / (e2 - 2.0)),
        T1_13 => {
            let s_star = solve_power_sum(&[((e1 - ep) * e1 * a1, e1 - 2.0), ((e2 - ep) * e2 * a2, e2 - 2.0)], 2.0 - ep)?;
            let s0 = ((2.0 - ep) / ((e2 - ep) * e2 * a2)).powf(1.0 / (e2 - 2.0));
            return Ok((Some(s0), Some(s_star), notes));
        }
        T1_14 => solve_power_sum(&[(e1 * a1, e1 - 2.0), (e2 * a2, e2 - 2.0)], 1.0 - 2.0 * a3)?,
        T1_15 if merged => solve_power_sum(&[(e1 * (a1 + a3), e1 - 2.0), (e2 * a2, e2 - 2.0)], 1.0)?,
        T1_15 => solve_power_sum(&[(e1 * a1, e1 - 2.0), (e2 * a2, e2 - 2.0), (ep * a3, ep - 2.0)], 1.0)?,
    };
    if !(s0.is_finite() && s0 > 0.0) {
        return Err(Error::RootNotBracketed(format!("s0 = {s0} for {}", class.theorem_id)));
    }
    Ok((Some(s0), None, notes))
}

pub fn landscape(c: &LandscapeCoeffs, exps: &ExponentInfo, class: &RegimeClass) -> Result<Landscape> {
    let x = Ex::of(exps);
    let (s0, s_star, notes) = s0_for(class, c, &x)?;
    let shape = shape_of(class.theorem_id);
    let mut out = Landscape { s0, s_star, shape, notes, ..Default::default() };
    if shape == Some(LandscapeShape::DoubleCritical) {
        let s0 = s0.expect("double-critical regimes define s0");
        let hp = |s: f64| h_prime(c, exps, s);
        let level = |s: f64| h_eval(c, exps, s) - c.kappa_rho;
        if hp(s0) > 0.0 {
            let lo = roots::expand_down(hp, s0 * 0.5, -1.0, 2000);
            let hi = roots::expand_up(hp, s0 * 2.0, -1.0, 2000);
            if let (Some(lo), Some(hi)) = (lo, hi) {
                let s1 = roots::bracketed(hp, lo, s0, RTOL)?;
                let s2 = roots::bracketed(hp, s0, hi, RTOL)?;
                out.s1 = Some(s1);
                out.s2 = Some(s2);
                if level(s2) > 0.0 && level(s1) < 0.0 {
                    out.t0 = Some(roots::bracketed(level, s1, s2, RTOL)?);
                    let top = roots::expand_up(level, s2 * 2.0, -1.0, 2000)
                        .ok_or_else(|| Error::RootNotBracketed("h never returns below kappa*rho1*rho2".into()))?;
                    out.t1 = Some(roots::bracketed(level, s2, top, RTOL)?);
                }
            }
        }
    }
    Ok(out)
}

/// `(s^{2-ep} - e1 A1 s^{e1-ep} - e2 A2 s^{e2-ep}) / (ep C Mf)`: largest β keeping `h'(s) > 0`.
fn beta_slope(c: &LandscapeCoeffs, x: &Ex, s: f64, cm: f64) -> f64 {
    (s.powf(2.0 - x.ep) - x.e1 * c.a1 * s.powf(x.e1 - x.ep) - x.e2 * c.a2 * s.powf(x.e2 - x.ep)) / (x.ep * cm)
}

/// `(½s^{2-ep} - A1 s^{e1-ep} - A2 s^{e2-ep}) / (C Mf)`: largest β keeping `h(s) > -κρ₁ρ₂` at level 0.
fn beta_energy(c: &LandscapeCoeffs, x: &Ex, s: f64, cm: f64) -> f64 {
    (0.5 * s.powf(2.0 - x.ep) - c.a1 * s.powf(x.e1 - x.ep) - c.a2 * s.powf(x.e2 - x.ep)) / cm
}

/// `U` of the implicit β-equation for `p+q ≤ 2r₁ < (2N+2α+4)/N < 2r₂`.
fn u_value(c: &LandscapeCoeffs, x: &Ex) -> f64 {
    ((1.0 - x.g1) / ((x.g2 - x.g1) * x.e2 * c.a2)).powf(1.0 / (x.g2 - 1.0))
}

/// Solves `U = β·X·U^{ep/2} + Y·U^{γ₁}` for β by bisection; the right side increases in β.
fn beta_from_u(c: &LandscapeCoeffs, x: &Ex, cm: f64) -> Result<f64> {
    let u = u_value(c, x);
    let xc = (x.e2 - x.ep) / (x.e2 - 2.0) * x.ep * cm * u.powf(x.ep / 2.0);
    let yc = (x.g2 - x.g1) / (x.g2 - 1.0) * x.e1 * c.a1 * u.powf(x.g1);
    let f = |beta: f64| beta * xc + yc - u;
    if f(0.0) >= 0.0 {
        return Err(Error::SideConditionViolated(format!(
            "implicit beta equation has no positive root: U={u:e} does not exceed its beta-free part {yc:e}"
        )));
    }
    let hi = roots::expand_up(f, 1.0, 1.0, 2000)
        .ok_or_else(|| Error::RootNotBracketed("implicit beta equation".into()))?;
    roots::bracketed(f, 0.0, hi, 1e-15)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BetaThreshold {
    pub beta0: f64,
    /// `(name, value)` of every candidate; `beta0` is the minimum of those marked in the regime's definition.
    pub parts: Vec<(String, f64)>,
}

/// `β₀` for the regimes whose landscape has a well followed by a hump.
pub fn beta0(params: &ProblemParams, gn: &GNConstants, class: &RegimeClass) -> Result<BetaThreshold> {
    use TheoremId::*;
    let id = class.theorem_id;
    if !id.has_coupling_thresholds() {
        return Err(Error::WrongRegime { expected: "T1_4|T1_9|T1_10|T1_11|T1_13".into(), got: id.to_string() });
    }
    let c = coeffs(params, gn);
    let exps = params.exponents();
    let x = Ex::of(&exps);
    let cm = gn.c_pq * mass_factor(params);
    let (s0, _, _) = s0_for(class, &c, &x)?;
    let s0 = s0.expect("threshold regimes define s0");
    let sc = resolve_conditions(class, &c, &x, Some(s0), None);
    if let Some(bad) = sc.iter().find(|s| s.holds == Some(false) && is_standing(&s.name)) {
        return Err(Error::SideConditionViolated(bad.name.clone()));
    }
    let slope = beta_slope(&c, &x, s0, cm);
    let energy = beta_energy(&c, &x, s0, cm);
    let (parts, take): (Vec<(String, f64)>, usize) = match id {
        T1_4 | T1_11 => (vec![("beta1".into(), slope), ("beta2".into(), energy)], 2),
        T1_9 | T1_10 => {
            let b1 = beta_from_u(&c, &x, cm)?;
            (vec![("beta1".into(), b1), ("beta2".into(), slope), ("beta3".into(), energy)], 3)
        }
        T1_13 => {
            let denom = (x.e1 - x.ep) * cm * x.ep;
            let b3 = (x.e1 - 2.0) * ((2.0 - x.ep) / (2.0 * (x.e1 - x.ep) * x.e1 * c.a1)).powf((2.0 - x.ep) / (x.e1 - 2.0)) / denom;
            let b4 = (x.e1 - 2.0) * ((2.0 - x.ep) / (2.0 * (x.e2 - x.ep) * x.e2 * c.a2)).powf((2.0 - x.ep) / (x.e2 - 2.0)) / denom;
            (
                vec![("beta1".into(), slope), ("beta2".into(), energy), ("beta3".into(), b3), ("beta4".into(), b4)],
                2,
            )
        }
        _ => unreachable!(),
    };
    let beta0 = parts[..take].iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    if !(beta0 > 0.0) {
        return Err(Error::NonPositive(format!("beta0 = {beta0:e}")));
    }
    Ok(BetaThreshold { beta0, parts })
}

/// `(½s₀² - A₁s₀^{e1} - A₂s₀^{e2} - βC Mf s₀^{ep}) / (2ρ₁ρ₂)` at a given β.
pub fn kappa0_at_beta(params: &ProblemParams, gn: &GNConstants, class: &RegimeClass, beta: f64) -> Result<f64> {
    let c = coeffs(params, gn);
    let x = Ex::of(&params.exponents());
    let (s0, _, _) = s0_for(class, &c, &x)?;
    let s0 = s0.ok_or_else(|| Error::WrongRegime { expected: "regime with s0".into(), got: class.theorem_id.to_string() })?;
    let a3 = beta * gn.c_pq * mass_factor(params);
    let num = 0.5 * s0 * s0 - c.a1 * s0.powf(x.e1) - c.a2 * s0.powf(x.e2) - a3 * s0.powf(x.ep);
    if !(num > 1e-12 * 0.5 * s0 * s0) {
        return Err(Error::NonPositive(format!("kappa0 numerator = {num:e} at beta = {beta:e}")));
    }
    Ok(num / (2.0 * params.rho1 * params.rho2))
}

/// `κ₀` with `A̅₃` built from `β₀`.
pub fn kappa0(params: &ProblemParams, gn: &GNConstants, class: &RegimeClass, beta0: f64) -> Result<f64> {
    kappa0_at_beta(params, gn, class, beta0)
}

/// `1 - (2N/(N+α+2))C(N,r₁,r₁)2^{(N+α+2)/N}(λ₁ρ₁^{(2α+4)/N} + λ₂ρ₂^{(2α+4)/N}) - 2βC(N,p,q)(ρ₁²+ρ₂²)^{(α+2)/N}`.
pub fn nonexistence_value(params: &ProblemParams, gn: &GNConstants) -> f64 {
    let n = params.dim as f64;
    let a = crate::params::to_f64(params.alpha);
    let k = (2.0 * a + 4.0) / n;
    1.0 - 2.0 * n / (n + a + 2.0)
        * gn.c_r1
        * 2f64.powf((n + a + 2.0) / n)
        * (params.lambda1 * params.rho1.powf(k) + params.lambda2 * params.rho2.powf(k))
        - 2.0 * params.beta * gn.c_pq * (params.rho1.powi(2) + params.rho2.powi(2)).powf((a + 2.0) / n)
}

pub fn nonexistence_check(params: &ProblemParams, gn: &GNConstants) -> Result<bool> {
    let id = classify_regime(params).theorem_id;
    if id != TheoremId::T1_3 {
        return Err(Error::WrongRegime { expected: "T1_3".into(), got: id.to_string() });
    }
    Ok(nonexistence_value(params, gn) > 0.0)
}

/// Conditions on `A₁, A₂, A₃` alone, as opposed to the coupling bounds.
fn is_standing(name: &str) -> bool {
    name != cond::BETA_BELOW_BETA0 && name != cond::KAPPA_BELOW_KAPPA0
}

fn coupling_product(c: &LandscapeCoeffs, x: &Ex) -> f64 {
    ((x.g2 - x.g1) / (x.g2 - 1.0) * x.e1 * c.a1).powf(x.g2 - 1.0)
        * ((x.g2 - x.g1) / (1.0 - x.g1) * x.e2 * c.a2).powf(1.0 - x.g1)
}

fn resolve_conditions(
    class: &RegimeClass,
    c: &LandscapeCoeffs,
    x: &Ex,
    s0: Option<f64>,
    couplings: Option<(bool, bool)>,
) -> Vec<SideCondition> {
    class
        .side_conditions
        .iter()
        .map(|sc| {
            let at = |f: &dyn Fn(f64) -> bool| s0.map(f);
            let holds = match sc.name.as_str() {
                cond::HALF_MINUS_A1_A2 => Some(0.5 - (c.a1 + c.a2) > 0.0),
                cond::HALF_MINUS_A3 => Some(0.5 - c.a3 > 0.0),
                cond::HALF_MINUS_A2 => Some(0.5 - c.a2 > 0.0),
                cond::HALF_MINUS_A1 => Some(0.5 - c.a1 > 0.0),
                cond::HALF_MINUS_A1_A3 => Some(0.5 - (c.a1 + c.a3) > 0.0),
                cond::F_S0_BELOW => at(&|s| {
                    let f = x.e1 * (x.e1 - x.ep) * c.a1 * s.powf(x.e1 - 2.0)
                        + x.e2 * (x.e2 - x.ep) * c.a2 * s.powf(x.e2 - 2.0);
                    f < 2.0 - x.ep
                }),
                cond::G_S0_POSITIVE => at(&|s| {
                    s.powf(2.0 - x.ep) - x.e1 * c.a1 * s.powf(x.e1 - x.ep) - x.e2 * c.a2 * s.powf(x.e2 - x.ep) > 0.0
                }),
                cond::HALF_S0_POSITIVE => at(&|s| 0.5 * s * s - c.a1 * s.powf(x.e1) - c.a2 * s.powf(x.e2) > 0.0),
                cond::S0_POHOZAEV_POSITIVE => {
                    at(&|s| s * s - x.e1 * c.a1 * s.powf(x.e1) - x.e2 * c.a2 * s.powf(x.e2) > 0.0)
                }
                cond::COUPLING_PRODUCT => Some(coupling_product(c, x) < 1.0),
                cond::SCALED_S0_POSITIVE => {
                    at(&|s| 1.0 - x.e1 * c.a1 * s.powf(x.e1 - 2.0) - x.e2 * c.a2 * s.powf(x.e2 - 2.0) > 0.0)
                }
                cond::BETA_BELOW_BETA0 => couplings.map(|(b, _)| b),
                cond::KAPPA_BELOW_KAPPA0 => couplings.map(|(_, k)| k),
                _ => None,
            };
            SideCondition { name: sc.name.clone(), holds }
        })
        .collect()
}

/// Every named predicate of the regime evaluated with the supplied constants.
pub fn check_side_conditions(params: &ProblemParams, gn: &GNConstants, class: &RegimeClass) -> Vec<SideCondition> {
    let c = coeffs(params, gn);
    let x = Ex::of(&params.exponents());
    let s0 = s0_for(class, &c, &x).ok().and_then(|(s, _, _)| s);
    let couplings = if class.theorem_id.has_coupling_thresholds() {
        beta0(params, gn, class).ok().map(|b| {
            let k = kappa0_at_beta(params, gn, class, params.beta).map(|k| params.kappa < k).unwrap_or(false);
            (params.beta < b.beta0, k)
        })
    } else {
        None
    };
    let mut out = resolve_conditions(class, &c, &x, s0, couplings);
    if class.theorem_id == TheoremId::T1_3 {
        for sc in &mut out {
            if sc.name == cond::NONEXISTENCE {
                sc.holds = Some(nonexistence_value(params, gn) > 0.0);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdReport {
    pub regime: RegimeClass,
    pub gn: GNConstants,
    pub coeffs: LandscapeCoeffs,
    pub landscape: Landscape,
    pub beta0: Option<f64>,
    pub beta_parts: Vec<(String, f64)>,
    /// κ₀ with `A̅₃` at `β₀`; `None` when its numerator is not positive.
    pub kappa0: Option<f64>,
    /// κ₀ with `A₃` at the configured β.
    pub kappa0_at_beta: Option<f64>,
    pub side_conditions_resolved: Vec<SideCondition>,
    pub nonexistence_value: Option<f64>,
    pub notes: Vec<String>,
}

pub fn threshold_report(params: &ProblemParams, gn: &GNConstants) -> Result<ThresholdReport> {
    let regime = classify_regime(params);
    let c = coeffs(params, gn);
    let exps = params.exponents();
    let mut notes = regime.notes.clone();
    let landscape = if regime.theorem_id == TheoremId::OutOfScope {
        Landscape::default()
    } else {
        landscape(&c, &exps, &regime)?
    };
    let mut beta0_v = None;
    let mut beta_parts = Vec::new();
    let mut kappa0_v = None;
    let mut kappa0_b = None;
    if regime.theorem_id.has_coupling_thresholds() {
        match beta0(params, gn, &regime) {
            Ok(b) => {
                beta0_v = Some(b.beta0);
                beta_parts = b.parts;
                match kappa0(params, gn, &regime, b.beta0) {
                    Ok(k) => kappa0_v = Some(k),
                    Err(e) => notes.push(format!("kappa0 at beta0 unavailable: {e}")),
                }
            }
            Err(e) => notes.push(format!("beta0 unavailable: {e}")),
        }
        match kappa0_at_beta(params, gn, &regime, params.beta) {
            Ok(k) => kappa0_b = Some(k),
            Err(e) => notes.push(format!("kappa0 at configured beta unavailable: {e}")),
        }
        notes.push("kappa<kappa0 is evaluated against kappa0 at the configured beta".into());
    }
    notes.extend(landscape.notes.iter().cloned());
    if gn.provenance == Provenance::Estimated {
        notes.push("GN constants are numerical lower bounds; thresholds are not guaranteed conservative".into());
    }
    let nonexistence = (regime.theorem_id == TheoremId::T1_3).then(|| nonexistence_value(params, gn));
    Ok(ThresholdReport {
        side_conditions_resolved: check_side_conditions(params, gn, &regime),
        regime,
        gn: *gn,
        coeffs: c,
        landscape,
        beta0: beta0_v,
        beta_parts,
        kappa0: kappa0_v,
        kappa0_at_beta: kappa0_b,
        nonexistence_value: nonexistence,
        notes,
    })
}

/// `(s, h(s))` on a log grid, for plotting.
pub fn h_profile(c: &LandscapeCoeffs, exps: &ExponentInfo, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    roots::log_grid(lo, hi, n).into_iter().map(|s| (s, h_eval(c, exps, s))).collect()
}
