//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::params::{parse_rat, ProblemParams, Rat};
use crate::radial::GridSpec;
use crate::solver::SolverConfig;
use crate::thresholds::GNConstants;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridLayout {
    Standard,
    Tailed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ProblemParams,
    pub layout: GridLayout,
    pub grid: GridSpec,
    pub solver: SolverConfig,
    pub t_range: (f64, f64),
    pub t_samples: usize,
    pub s_range: (f64, f64),
    pub s_samples: usize,
    pub probe_beta: Vec<f64>,
    pub probe_rho: Vec<(f64, f64)>,
    pub gn_override: Option<GNConstants>,
    pub gn_refine_iters: usize,
    pub trial_states: usize,
    pub trial_seed: u64,
    pub out_dir: PathBuf,
    pub kernel_cache: Option<PathBuf>,
}

struct Entries(BTreeMap<String, String>);

impl Entries {
    fn take(&mut self, key: &str) -> Option<String> {
        self.0.remove(key)
    }

    fn required(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| Error::Config(format!("missing key {key}")))
    }

    fn num<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::Parse(format!("{key} = {v:?}"))),
        }
    }

    fn rat(&mut self, key: &str) -> Result<Rat> {
        parse_rat(&self.required(key)?)
    }
}

fn parse_list(key: &str, text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| x.trim().parse().map_err(|_| Error::Parse(format!("{key}: bad entry {x:?}"))))
        .collect()
}

fn parse_pairs(key: &str, text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|pair| {
            let (a, b) = pair
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("{key}: expected rho1:rho2, got {pair:?}")))?;
            let a = a.trim().parse().map_err(|_| Error::Parse(format!("{key}: {a:?}")))?;
            let b = b.trim().parse().map_err(|_| Error::Parse(format!("{key}: {b:?}")))?;
            Ok((a, b))
        })
        .collect()
}

/// Splits the text into key/value pairs; `#` starts a comment.
pub fn parse_pairs_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", n + 1)));
        }
        if map.insert(k.clone(), v).is_some() {
            return Err(Error::Config(format!("duplicate key {k}")));
        }
    }
    Ok(map)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut e = Entries(parse_pairs_text(text)?);

        let dim: u32 = e.required("N")?.parse().map_err(|_| Error::Parse("N must be a positive integer".into()))?;
        let mut params = ProblemParams::with_exponents(dim, e.rat("alpha")?, e.rat("p")?, e.rat("q")?, e.rat("r1")?, e.rat("r2")?);
        params.lambda1 = e.num("lambda1", 1.0)?;
        params.lambda2 = e.num("lambda2", 1.0)?;
        params.beta = e.num("beta", 1.0)?;
        params.kappa = e.num("kappa", 1.0)?;
        params.rho1 = e.num("rho1", 1.0)?;
        params.rho2 = e.num("rho2", 1.0)?;

        let radius: f64 = e.num("R", 30.0)?;
        let layout = match e.take("grid").as_deref() {
            None | Some("tailed") => GridLayout::Tailed,
            Some("standard") => GridLayout::Standard,
            Some(other) => return Err(Error::Config(format!("grid = {other:?}; expected standard or tailed"))),
        };
        let base = match layout {
            GridLayout::Standard => GridSpec::standard(dim, radius),
            GridLayout::Tailed => GridSpec::tailed(dim, radius),
        };
        let grid = GridSpec {
            order: e.num("order", base.order)?,
            panels: e.num("panels", base.panels)?,
            grading: e.num("grading", base.grading)?,
            outer_panels: e.num("outer_panels", base.outer_panels)?,
            outer_ratio: e.num("outer_ratio", base.outer_ratio)?,
            ..base
        };
        if let Some(m) = e.take("M") {
            let m: usize = m.parse().map_err(|_| Error::Parse(format!("M = {m:?}")))?;
            if m != grid.node_count() {
                return Err(Error::Config(format!(
                    "M = {m} but the panel layout gives {} nodes",
                    grid.node_count()
                )));
            }
        }
        if !(radius > 0.0 && radius.is_finite()) || grid.order == 0 || grid.panels == 0 || grid.outer_ratio <= 1.0 {
            return Err(Error::Config("grid needs R > 0, order >= 1, panels >= 1, outer_ratio > 1".into()));
        }

        let d = SolverConfig::default();
        let well_radius = match e.take("well_radius") {
            None => None,
            Some(v) => Some(v.parse().map_err(|_| Error::Parse(format!("well_radius = {v:?}")))?),
        };
        let solver = SolverConfig {
            max_iters: e.num("max_iters", d.max_iters)?,
            step_init: e.num("step_init", d.step_init)?,
            backtrack: e.num("backtrack", d.backtrack)?,
            el_tolerance: e.num("el_tolerance", d.el_tolerance)?,
            stagnation_tol: e.num("stagnation_tol", d.stagnation_tol)?,
            stagnation_window: e.num("stagnation_window", d.stagnation_window)?,
            width_u: e.num("width_u", d.width_u)?,
            width_v: e.num("width_v", d.width_v)?,
            center_u: e.num("center_u", d.center_u)?,
            center_v: e.num("center_v", d.center_v)?,
            shift_floor: e.num("shift_floor", d.shift_floor)?,
            well_radius,
            seed: e.num("seed", d.seed)?,
        };
        solver.validate()?;

        let t_range = (e.num("t_min", 1e-3)?, e.num("t_max", 1e3)?);
        let s_range = (e.num("s_min", 1e-3)?, e.num("s_max", 10.0)?);
        if !(t_range.0 > 0.0 && t_range.0 < t_range.1) || !(s_range.0 > 0.0 && s_range.0 < s_range.1) {
            return Err(Error::Config("t and s ranges need 0 < min < max".into()));
        }
        let t_samples = e.num("t_samples", 512)?;
        let s_samples = e.num("s_samples", 1000)?;

        let probe_beta = match e.take("probe_beta") {
            Some(v) => parse_list("probe_beta", &v)?,
            None => vec![params.beta],
        };
        let probe_rho = match e.take("probe_rho") {
            Some(v) => parse_pairs("probe_rho", &v)?,
            None => vec![(params.rho1, params.rho2)],
        };

        let gn: Vec<Option<f64>> = ["gn_c_pq", "gn_c_r1", "gn_c_r2"]
            .iter()
            .map(|k| e.take(k).map(|v| v.parse().map_err(|_| Error::Parse(format!("{k} = {v:?}")))).transpose())
            .collect::<Result<_>>()?;
        let gn_override = match gn[..] {
            [Some(a), Some(b), Some(c)] => Some(GNConstants::supplied(a, b, c)),
            [None, None, None] => None,
            _ => return Err(Error::Config("gn_c_pq, gn_c_r1, gn_c_r2 must be given together".into())),
        };

        let cfg = RunConfig {
            params,
            layout,
            grid,
            solver,
            t_range,
            t_samples,
            s_range,
            s_samples,
            probe_beta,
            probe_rho,
            gn_override,
            gn_refine_iters: e.num("gn_refine_iters", 200)?,
            trial_states: e.num("trial_states", 50)?,
            trial_seed: e.num("trial_seed", 0)?,
            out_dir: PathBuf::from(e.take("out").unwrap_or_else(|| "out".into())),
            kernel_cache: e.take("kernel_cache").map(PathBuf::from),
        };
        if let Some(k) = e.0.keys().next() {
            return Err(Error::Config(format!("unknown key {k}")));
        }
        Ok(cfg)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Every key with its resolved value, defaults included, in a fixed order.
    pub fn resolved(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let s = &self.solver;
        let g = &self.grid;
        let mut out: Vec<(&str, String)> = vec![
            ("N", p.dim.to_string()),
            ("alpha", p.alpha.to_string()),
            ("p", p.p.to_string()),
            ("q", p.q.to_string()),
            ("r1", p.r1.to_string()),
            ("r2", p.r2.to_string()),
            ("lambda1", p.lambda1.to_string()),
            ("lambda2", p.lambda2.to_string()),
            ("beta", p.beta.to_string()),
            ("kappa", p.kappa.to_string()),
            ("rho1", p.rho1.to_string()),
            ("rho2", p.rho2.to_string()),
            ("grid", if self.layout == GridLayout::Tailed { "tailed" } else { "standard" }.into()),
            ("R", g.radius.to_string()),
            ("M", g.node_count().to_string()),
            ("order", g.order.to_string()),
            ("panels", g.panels.to_string()),
            ("grading", g.grading.to_string()),
            ("outer_panels", g.outer_panels.to_string()),
            ("outer_ratio", g.outer_ratio.to_string()),
            ("max_iters", s.max_iters.to_string()),
            ("step_init", s.step_init.to_string()),
            ("backtrack", s.backtrack.to_string()),
            ("el_tolerance", s.el_tolerance.to_string()),
            ("stagnation_tol", s.stagnation_tol.to_string()),
            ("stagnation_window", s.stagnation_window.to_string()),
            ("width_u", s.width_u.to_string()),
            ("width_v", s.width_v.to_string()),
            ("center_u", s.center_u.to_string()),
            ("center_v", s.center_v.to_string()),
            ("shift_floor", s.shift_floor.to_string()),
        ];
        if let Some(w) = s.well_radius {
            out.push(("well_radius", w.to_string()));
        }
        out.extend([
            ("seed", s.seed.to_string()),
            ("t_min", self.t_range.0.to_string()),
            ("t_max", self.t_range.1.to_string()),
            ("t_samples", self.t_samples.to_string()),
            ("s_min", self.s_range.0.to_string()),
            ("s_max", self.s_range.1.to_string()),
            ("s_samples", self.s_samples.to_string()),
            ("probe_beta", self.probe_beta.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(",")),
            (
                "probe_rho",
                self.probe_rho.iter().map(|(a, b)| format!("{a}:{b}")).collect::<Vec<_>>().join(","),
            ),
        ]);
        if let Some(gn) = &self.gn_override {
            out.push(("gn_c_pq", gn.c_pq.to_string()));
            out.push(("gn_c_r1", gn.c_r1.to_string()));
            out.push(("gn_c_r2", gn.c_r2.to_string()));
        }
        out.extend([
            ("gn_refine_iters", self.gn_refine_iters.to_string()),
            ("trial_states", self.trial_states.to_string()),
            ("trial_seed", self.trial_seed.to_string()),
            ("out", self.out_dir.display().to_string()),
        ]);
        if let Some(c) = &self.kernel_cache {
            out.push(("kernel_cache", c.display().to_string()));
        }
        out.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn resolved_text(&self) -> String {
        self.resolved().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}
