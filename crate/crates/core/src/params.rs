//! Problem parameters, scaling exponents and the fifteen-case regime classifier.

use std::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for every exponent so that regime boundaries
/// (`p+q = 2r₁`, `r₁ = r₂`, `2r₂ = (2N+2α+4)/N`) are decided without epsilon.
pub type Rat = Ratio<i64>;

/// Parses `"2"`, `"1.4"`, `"5/3"` or `"0.5/3"` into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let den = parse_decimal(den)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(parse_decimal(num)? / den);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Result<Rat> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a decimal or fraction: {text:?}"));
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(Error::Parse(format!("too many decimal places in {text:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: i64 = if digits.is_empty() { 0 } else { digits.parse().map_err(|_| bad())? };
    let denom = 10i64.pow(frac_part.len() as u32);
    let value = Rat::new(numer, denom);
    Ok(if neg { -value } else { value })
}

/// Shorthand for tests and examples; panics on malformed input.
pub fn rat(text: &str) -> Rat {
    parse_rat(text).expect("valid rational literal")
}

pub fn to_f64(x: Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn ser_rat<S: Serializer>(x: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProblemParams {
    #[serde(rename = "N")]
    pub dim: u32,
    #[serde(serialize_with = "ser_rat")]
    pub alpha: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub p: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub q: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub r1: Rat,
    #[serde(serialize_with = "ser_rat")]
    pub r2: Rat,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
    pub kappa: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl ProblemParams {
    /// Parameters with unit weights, couplings and masses; callers override fields.
    pub fn with_exponents(dim: u32, alpha: Rat, p: Rat, q: Rat, r1: Rat, r2: Rat) -> Self {
        Self {
            dim,
            alpha,
            p,
            q,
            r1,
            r2,
            lambda1: 1.0,
            lambda2: 1.0,
            beta: 1.0,
            kappa: 1.0,
            rho1: 1.0,
            rho2: 1.0,
        }
    }

    pub fn exponents(&self) -> ExponentInfo {
        ExponentInfo::new(self)
    }

    fn n(&self) -> Rat {
        Rat::from_integer(self.dim as i64)
    }

    /// `(2N+2α)/N`, the lower end of the admissible range for `p+q`.
    pub fn mass_lower(&self) -> Rat {
        (self.n() * 2 + self.alpha * 2) / self.n()
    }

    /// `(2N+2α+4)/N`, where kinetic and nonlocal terms scale identically.
    pub fn mass_crit(&self) -> Rat {
        (self.n() * 2 + self.alpha * 2 + 4) / self.n()
    }

    /// `(2N+2α)/(N-2)`.
    pub fn mass_upper(&self) -> Rat {
        (self.n() * 2 + self.alpha * 2) / (self.n() - 2)
    }
}

/// Floating-point view of the exponents together with the derived `γ_s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentInfo {
    pub dim: f64,
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub r1: f64,
    pub r2: f64,
    pub gamma_p: f64,
    pub gamma_q: f64,
    pub gamma_r1: f64,
    pub gamma_r2: f64,
    pub mass_crit: f64,
    pub mass_lower: f64,
    pub mass_upper: f64,
}

impl ExponentInfo {
    pub fn new(params: &ProblemParams) -> Self {
        let dim = params.dim as f64;
        let alpha = to_f64(params.alpha);
        let g = |s: Rat| gamma_exact(params.dim, params.alpha, s);
        Self {
            dim,
            alpha,
            p: to_f64(params.p),
            q: to_f64(params.q),
            r1: to_f64(params.r1),
            r2: to_f64(params.r2),
            gamma_p: g(params.p),
            gamma_q: g(params.q),
            gamma_r1: g(params.r1),
            gamma_r2: g(params.r2),
            mass_crit: to_f64(params.mass_crit()),
            mass_lower: to_f64(params.mass_lower()),
            mass_upper: if params.dim > 2 { to_f64(params.mass_upper()) } else { f64::INFINITY },
        }
    }

    /// `γ_p + γ_q`, the exponent of the cross term under dilation.
    pub fn gamma_pq(&self) -> f64 {
        self.gamma_p + self.gamma_q
    }
}

fn gamma_exact(dim: u32, alpha: Rat, s: Rat) -> f64 {
    let n = Rat::from_integer(dim as i64);
    to_f64((n * s - n - alpha) / 2)
}

/// `γ_s = (N s − N − α)/2`.
pub fn gamma_of(params: &ProblemParams, s: f64) -> f64 {
    let n = params.dim as f64;
    (n * s - n - to_f64(params.alpha)) / 2.0
}

/// Returns every violated admissibility inequality by name; empty means admissible.
pub fn validate_params(params: &ProblemParams) -> Vec<String> {
    let mut violations = Vec::new();
    if !(params.dim == 3 || params.dim == 4) {
        violations.push(format!("N={} not in {{3,4}}", params.dim));
        return violations;
    }
    let n = Rat::from_integer(params.dim as i64);
    if params.alpha <= Rat::zero() || params.alpha >= n {
        violations.push("alpha not in (0,N)".to_string());
        return violations;
    }
    let lower = (n + params.alpha) / n;
    let upper = (n + params.alpha) / (n - 2);
    for (name, value) in [("p", params.p), ("q", params.q), ("r1", params.r1), ("r2", params.r2)] {
        if value <= lower {
            violations.push(format!("{name} <= (N+alpha)/N"));
        }
        if value >= upper {
            violations.push(format!("{name} >= (N+alpha)/(N-2)"));
        }
    }
    if params.p + params.q > params.r1 * 2 {
        violations.push("p+q > 2r1".to_string());
    }
    if params.r1 > params.r2 {
        violations.push("2r1 > 2r2".to_string());
    }
    for (name, value) in [
        ("lambda1", params.lambda1),
        ("lambda2", params.lambda2),
        ("beta", params.beta),
        ("kappa", params.kappa),
        ("rho1", params.rho1),
        ("rho2", params.rho2),
    ] {
        if !(value > 0.0 && value.is_finite()) {
            violations.push(format!("{name} <= 0"));
        }
    }
    violations
}

pub fn ensure_valid(params: &ProblemParams) -> Result<()> {
    let violations = validate_params(params);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidParams(violations))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TheoremId {
    T1_1,
    T1_2,
    T1_3,
    T1_4,
    T1_5,
    T1_6,
    T1_7,
    T1_8,
    T1_9,
    T1_10,
    T1_11,
    T1_12,
    T1_13,
    T1_14,
    T1_15,
    OutOfScope,
}

impl TheoremId {
    pub const ALL: [TheoremId; 15] = [
        TheoremId::T1_1,
        TheoremId::T1_2,
        TheoremId::T1_3,
        TheoremId::T1_4,
        TheoremId::T1_5,
        TheoremId::T1_6,
        TheoremId::T1_7,
        TheoremId::T1_8,
        TheoremId::T1_9,
        TheoremId::T1_10,
        TheoremId::T1_11,
        TheoremId::T1_12,
        TheoremId::T1_13,
        TheoremId::T1_14,
        TheoremId::T1_15,
    ];

    pub fn character(self) -> Option<Character> {
        use TheoremId::*;
        match self {
            T1_3 => Some(Character::Nonexistence),
            T1_5 | T1_6 | T1_12 | T1_14 | T1_15 => Some(Character::MountainPass),
            OutOfScope => None,
            _ => Some(Character::LocalMin),
        }
    }

    /// Cases whose landscape has a local well followed by a hump, governed by `β₀, κ₀`.
    pub fn has_coupling_thresholds(self) -> bool {
        use TheoremId::*;
        matches!(self, T1_4 | T1_9 | T1_10 | T1_11 | T1_13)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Position of an exponent sum relative to the mass-critical value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MassRegime {
    Sub,
    Critical,
    Super,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Character {
    LocalMin,
    MountainPass,
    Nonexistence,
}

/// Named side condition; `holds` stays `None` until thresholds resolve it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideCondition {
    pub name: String,
    pub holds: Option<bool>,
}

/// Canonical side-condition names shared by the classifier and the threshold module.
pub mod cond {
    pub const HALF_MINUS_A1_A2: &str = "1/2-(A1+A2)>0";
    pub const HALF_MINUS_A3: &str = "1/2-A3>0";
    pub const HALF_MINUS_A2: &str = "1/2-A2>0";
    pub const HALF_MINUS_A1: &str = "1/2-A1>0";
    pub const HALF_MINUS_A1_A3: &str = "1/2-(A1+A3)>0";
    pub const NONEXISTENCE: &str = "nonexistence_inequality>0";
    pub const F_S0_BELOW: &str = "f(s0)<2-gp-gq";
    pub const G_S0_POSITIVE: &str = "g(s0)>0";
    pub const HALF_S0_POSITIVE: &str = "s0^2/2-A1*s0^e1-A2*s0^e2>0";
    pub const S0_POHOZAEV_POSITIVE: &str = "s0^2-e1*A1*s0^e1-e2*A2*s0^e2>0";
    pub const COUPLING_PRODUCT: &str = "coupling_product<1";
    pub const SCALED_S0_POSITIVE: &str = "1-e1*A1*s0^(e1-2)-e2*A2*s0^(e2-2)>0";
    pub const BETA_BELOW_BETA0: &str = "beta<beta0";
    pub const KAPPA_BELOW_KAPPA0: &str = "kappa<kappa0";
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegimeClass {
    pub theorem_id: TheoremId,
    pub sum_regime: MassRegime,
    pub r1_regime: MassRegime,
    pub r2_regime: MassRegime,
    pub character: Option<Character>,
    /// `p+q = 2r₁` exactly; selects the merged landscape formulas.
    pub sum_equals_2r1: bool,
    pub side_conditions: Vec<SideCondition>,
    pub notes: Vec<String>,
}

fn compare(x: Rat, crit: Rat) -> MassRegime {
    use std::cmp::Ordering::*;
    match x.cmp(&crit) {
        Less => MassRegime::Sub,
        Equal => MassRegime::Critical,
        Greater => MassRegime::Super,
    }
}

fn side_condition_names(id: TheoremId) -> &'static [&'static str] {
    use cond::*;
    use TheoremId::*;
    match id {
        T1_2 => &[HALF_MINUS_A1_A2],
        T1_3 => &[NONEXISTENCE],
        T1_4 => &[BETA_BELOW_BETA0, KAPPA_BELOW_KAPPA0],
        T1_5 => &[HALF_MINUS_A3],
        T1_8 => &[HALF_MINUS_A2],
        T1_9 => &[
            F_S0_BELOW,
            G_S0_POSITIVE,
            HALF_S0_POSITIVE,
            COUPLING_PRODUCT,
            BETA_BELOW_BETA0,
            KAPPA_BELOW_KAPPA0,
        ],
        T1_10 => &[
            S0_POHOZAEV_POSITIVE,
            HALF_S0_POSITIVE,
            COUPLING_PRODUCT,
            BETA_BELOW_BETA0,
            KAPPA_BELOW_KAPPA0,
        ],
        T1_11 => &[HALF_MINUS_A1, BETA_BELOW_BETA0, KAPPA_BELOW_KAPPA0],
        T1_12 => &[HALF_MINUS_A1_A3],
        T1_13 => &[SCALED_S0_POSITIVE, BETA_BELOW_BETA0, KAPPA_BELOW_KAPPA0],
        T1_14 => &[HALF_MINUS_A3],
        _ => &[],
    }
}

/// Maps the `(p+q, 2r₁, 2r₂)` triple onto one of the fifteen existence/nonexistence cases.
///
/// Equalities are exact comparisons of the rational inputs.
pub fn classify_regime(params: &ProblemParams) -> RegimeClass {
    use MassRegime::*;
    use TheoremId::*;

    let crit = params.mass_crit();
    let sum = params.p + params.q;
    let two_r1 = params.r1 * 2;
    let two_r2 = params.r2 * 2;
    let sum_regime = compare(sum, crit);
    let r1_regime = compare(two_r1, crit);
    let r2_regime = compare(two_r2, crit);
    let merged = sum == two_r1;

    let admissible = validate_params(params).is_empty() && sum > params.mass_lower();
    let theorem_id = if !admissible {
        OutOfScope
    } else if params.r1 == params.r2 {
        match (sum_regime, r1_regime) {
            (Sub, Sub) => T1_1,
            (Sub, Critical) => T1_2,
            (Critical, Critical) => T1_3,
            (Sub, Super) => T1_4,
            (Critical, Super) => T1_5,
            (Super, Super) => T1_6,
            _ => OutOfScope,
        }
    } else {
        match (sum_regime, r1_regime, r2_regime) {
            (Sub, Sub, Sub) => T1_7,
            (Sub, Sub, Critical) => T1_8,
            (Sub, Sub, Super) if merged => T1_10,
            (Sub, Sub, Super) => T1_9,
            (Sub, Critical, Super) => T1_11,
            (Critical, Critical, Super) => T1_12,
            (Sub, Super, Super) => T1_13,
            (Critical, Super, Super) => T1_14,
            (Super, Super, Super) => T1_15,
            _ => OutOfScope,
        }
    };

    let mut notes = Vec::new();
    if theorem_id == OutOfScope {
        notes.push("no existence or nonexistence claim covers this exponent triple".to_string());
    }
    if matches!(theorem_id, T1_1 | T1_2) {
        let alt_lower = (Rat::from_integer(2 * params.dim as i64) + params.alpha * 2) / params.alpha;
        if sum <= alt_lower {
            notes.push(format!(
                "p+q={sum} lies at or below (2N+2alpha)/alpha={alt_lower}; under that alternative lower \
                 bound this case would not apply, the lab uses (2N+2alpha)/N"
            ));
        }
    }
    if theorem_id == T1_6 {
        notes.push(
            "(2N+2alpha+4)/N < p+q <= 2r1=2r2 classified as the r1=r2 supercritical case; \
             an alternative reading files this range under r1<r2"
                .to_string(),
        );
    }
    if theorem_id == T1_8 && merged {
        notes.push(
            "merged case: s0 derived from h'(s)=(1-2A2)s-2g_r1(A1+A3)s^(2g_r1-1)=0; the \
             closed form with (1-2A3)/(A1+A2) does not solve that equation"
                .to_string(),
        );
    }

    RegimeClass {
        theorem_id,
        sum_regime,
        r1_regime,
        r2_regime,
        character: theorem_id.character(),
        sum_equals_2r1: merged,
        side_conditions: side_condition_names(theorem_id)
            .iter()
            .map(|name| SideCondition { name: name.to_string(), holds: None })
            .collect(),
        notes,
    }
}
