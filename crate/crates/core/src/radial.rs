//! Radial grids on `[0, R]` ⊂ ℝ^N, fields on them, and the discrete kinetic form.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Surface area of the unit sphere in ℝ^n, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => 2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0),
    }
}

/// Composite Gauss–Legendre layout.
///
/// `[0,R]` is cut into `panels` equal panels; the first is split geometrically
/// `grading` more times towards the origin. Optionally `outer_panels` panels with
/// geometric ratio `outer_ratio` extend the grid past `R`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: u32,
    pub radius: f64,
    pub order: usize,
    pub panels: usize,
    pub grading: usize,
    #[serde(default)]
    pub outer_panels: usize,
    #[serde(default = "default_ratio")]
    pub outer_ratio: f64,
}

fn default_ratio() -> f64 {
    2.0
}

impl GridSpec {
    /// `M = 1024` nodes on `[0, radius]`.
    pub fn standard(dim: u32, radius: f64) -> Self {
        Self { dim, radius, order: 16, panels: 62, grading: 2, outer_panels: 0, outer_ratio: 2.0 }
    }

    /// `M = 1024` nodes: 52 uniform panels on `[0, radius]` and 10 geometric panels of
    /// ratio 1.5 beyond, for fields with slowly decaying tails.
    pub fn tailed(dim: u32, radius: f64) -> Self {
        Self { dim, radius, order: 16, panels: 52, grading: 2, outer_panels: 10, outer_ratio: 1.5 }
    }

    pub fn node_count(&self) -> usize {
        self.order * (self.panels + self.grading + self.outer_panels)
    }

    fn breaks(&self) -> Vec<f64> {
        let h = self.radius / self.panels as f64;
        let mut breaks = vec![0.0];
        for k in (1..=self.grading).rev() {
            breaks.push(h / 2f64.powi(k as i32));
        }
        for i in 1..=self.panels {
            breaks.push(if i == self.panels { self.radius } else { h * i as f64 });
        }
        let mut last = self.radius;
        for _ in 0..self.outer_panels {
            last *= self.outer_ratio;
            breaks.push(last);
        }
        breaks
    }

    /// Largest radius covered by the grid.
    pub fn extent(&self) -> f64 {
        self.radius * self.outer_ratio.powi(self.outer_panels as i32)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    pub spec: GridSpec,
    pub nodes: Vec<f64>,
    /// `ω_{N-1} r_i^{N-1}` times the 1D rule weight.
    pub weights: Vec<f64>,
    /// Panel endpoints, starting at 0.
    pub breaks: Vec<f64>,
    /// Exact shell measure `ω(r_{i+1}^N - r_i^N)/N` between consecutive nodes; the
    /// last entry also absorbs the slab out to the grid extent.
    shell: Vec<f64>,
}

impl RadialGrid {
    pub fn new(spec: GridSpec) -> Self {
        let (x, w) = gauss_legendre(spec.order);
        let omega = sphere_area(spec.dim);
        let n = spec.dim as i32;
        let breaks = spec.breaks();
        let mut nodes = Vec::with_capacity(spec.node_count());
        let mut weights = Vec::with_capacity(spec.node_count());
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let half = 0.5 * (b - a);
            for (xi, wi) in x.iter().zip(&w) {
                let r = 0.5 * (a + b) + half * xi;
                nodes.push(r);
                weights.push(omega * r.powi(n - 1) * wi * half);
            }
        }
        let mut shell: Vec<f64> = nodes
            .windows(2)
            .map(|p| omega * (p[1].powi(n) - p[0].powi(n)) / spec.dim as f64)
            .collect();
        // one-sided difference carried over the slab between the last node and the extent
        let last = *nodes.last().unwrap();
        if let Some(end) = shell.last_mut() {
            *end += omega * (spec.extent().powi(n) - last.powi(n)) / spec.dim as f64;
        }
        Self { spec, nodes, weights, breaks, shell }
    }

    pub fn standard(dim: u32, radius: f64) -> Arc<Self> {
        Arc::new(Self::new(GridSpec::standard(dim, radius)))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn dim(&self) -> u32 {
        self.spec.dim
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        f.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn dot(&self, f: &[f64], g: &[f64]) -> f64 {
        f.iter().zip(g).zip(&self.weights).map(|((a, b), w)| a * b * w).sum()
    }

    pub fn l2_norm(&self, f: &[f64]) -> f64 {
        self.dot(f, f).sqrt()
    }

    /// Coupling `c_i = m_i / h_i²` of the P1 stiffness between nodes `i` and `i+1`.
    fn cell_coupling(&self, i: usize) -> f64 {
        let h = self.nodes[i + 1] - self.nodes[i];
        self.shell[i] / (h * h)
    }

    /// `|∇u|₂²` from P1 differences with exact shell measures; zero slope below the
    /// first node (even extension) and the last one-sided slope out to the extent.
    pub fn grad_norm_sq(&self, u: &[f64]) -> f64 {
        (0..self.len() - 1)
            .map(|i| {
                let d = u[i + 1] - u[i];
                self.cell_coupling(i) * d * d
            })
            .sum()
    }

    /// `S u` where `uᵀSu = grad_norm_sq(u)`; this is the gradient of `½|∇u|₂²`.
    pub fn stiffness_apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut out = vec![0.0; m];
        for i in 0..m - 1 {
            let c = self.cell_coupling(i) * (u[i] - u[i + 1]);
            out[i] += c;
            out[i + 1] -= c;
        }
        out
    }

    /// Solves `(S + σW) x = b`, with `W` the diagonal of quadrature weights.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let m = self.len();
        let mut diag: Vec<f64> = self.weights.iter().map(|w| sigma * w).collect();
        let mut off = vec![0.0; m.saturating_sub(1)];
        for i in 0..m - 1 {
            let c = self.cell_coupling(i);
            diag[i] += c;
            diag[i + 1] += c;
            off[i] = -c;
        }
        thomas(&off, &diag, &off, b)
    }
}

/// Tridiagonal solve; `lower[i]` couples rows `i+1, i`, `upper[i]` rows `i, i+1`.
fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = if n > 1 { upper[0] / diag[0] } else { 0.0 };
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// A radial function sampled at the grid nodes.
#[derive(Clone, Debug)]
pub struct RadialField {
    pub grid: Arc<RadialGrid>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Self {
        assert_eq!(grid.len(), values.len());
        Self { grid, values }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes.iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn l2_norm(&self) -> f64 {
        self.grid.l2_norm(&self.values)
    }

    pub fn grad_norm_sq(&self) -> f64 {
        self.grid.grad_norm_sq(&self.values)
    }

    /// `|u|` at the outermost node is below `tol` relative to the field's maximum.
    pub fn decays(&self, tol: f64) -> bool {
        let peak = self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        self.values.last().is_none_or(|x| x.abs() <= tol * peak.max(f64::MIN_POSITIVE))
    }

    pub fn dilate(&self, t: f64) -> RadialField {
        RadialField { grid: self.grid.clone(), values: dilate_values(&self.grid, &self.values, t) }
    }
}

pub fn l2_norm(f: &RadialField) -> f64 {
    f.l2_norm()
}

pub fn grad_norm_sq(f: &RadialField) -> f64 {
    f.grad_norm_sq()
}

/// Monotone piecewise-cubic Hermite interpolant.
#[derive(Clone, Debug)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n);
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / (x[i + 1] - x[i])).collect();
        let mut m = vec![0.0; n];
        m[0] = delta[0];
        m[n - 1] = delta[n - 2];
        for i in 1..n - 1 {
            m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
        }
        for i in 0..n - 1 {
            if delta[i] == 0.0 {
                m[i] = 0.0;
                m[i + 1] = 0.0;
                continue;
            }
            let a = m[i] / delta[i];
            let b = m[i + 1] / delta[i];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m[i] = tau * a * delta[i];
                m[i + 1] = tau * b * delta[i];
            }
        }
        Self { x, y, slopes: m }
    }

    pub fn with_slopes(mut self, first: Option<f64>, last: Option<f64>) -> Self {
        if let Some(s) = first {
            self.slopes[0] = s;
        }
        if let Some(s) = last {
            let n = self.slopes.len();
            self.slopes[n - 1] = s;
        }
        self
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&xi| xi <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.slopes[i] + h01 * self.y[i + 1] + h11 * h * self.slopes[i + 1]
    }
}

/// Interpolant of nodal values with a flat even extension at `r = 0` and the
/// boundary value held up to the grid extent.
pub fn interpolant(grid: &RadialGrid, u: &[f64]) -> MonotoneCubic {
    let (r1, r2) = (grid.nodes[0], grid.nodes[1]);
    let center = (u[0] * r2 * r2 - u[1] * r1 * r1) / (r2 * r2 - r1 * r1);
    let mut x = Vec::with_capacity(u.len() + 2);
    let mut y = Vec::with_capacity(u.len() + 2);
    x.push(0.0);
    y.push(center);
    x.extend_from_slice(&grid.nodes);
    y.extend_from_slice(u);
    let extent = grid.spec.extent();
    if extent > *grid.nodes.last().unwrap() {
        x.push(extent);
        y.push(*u.last().unwrap());
    }
    MonotoneCubic::new(x, y).with_slopes(Some(0.0), None)
}

/// `t^{N/2} u(t r_i)` resampled through the monotone interpolant, zero past the extent.
pub fn dilate_values(grid: &RadialGrid, u: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return u.to_vec();
    }
    let interp = interpolant(grid, u);
    let scale = t.powf(grid.dim() as f64 / 2.0);
    let extent = grid.spec.extent();
    grid.nodes
        .iter()
        .map(|&r| {
            let tr = t * r;
            if tr > extent {
                0.0
            } else {
                scale * interp.eval(tr)
            }
        })
        .collect()
}

/// `t^{N/2} u(t r_i)` resampled by barycentric Lagrange interpolation on each panel's
/// Gauss nodes, zero past the extent.
pub fn dilate_values_spectral(grid: &RadialGrid, u: &[f64], t: f64) -> Vec<f64> {
    if t == 1.0 {
        return u.to_vec();
    }
    let n = grid.spec.order;
    let (x, _) = gauss_legendre(n);
    let bw: Vec<f64> = (0..n)
        .map(|j| 1.0 / (0..n).filter(|&k| k != j).map(|k| x[j] - x[k]).product::<f64>())
        .collect();
    let scale = t.powf(grid.dim() as f64 / 2.0);
    let extent = grid.spec.extent();
    grid.nodes
        .iter()
        .map(|&r| {
            let tr = t * r;
            if tr > extent {
                return 0.0;
            }
            let p = grid.breaks.partition_point(|&b| b <= tr).clamp(1, grid.breaks.len() - 1) - 1;
            let (a, b) = (grid.breaks[p], grid.breaks[p + 1]);
            let xi = (2.0 * tr - a - b) / (b - a);
            let vals = &u[p * n..(p + 1) * n];
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n {
                let d = xi - x[j];
                if d == 0.0 {
                    return scale * vals[j];
                }
                let c = bw[j] / d;
                num += c * vals[j];
                den += c;
            }
            scale * num / den
        })
        .collect()
}

pub fn dilate(f: &RadialField, t: f64) -> RadialField {
    f.dilate(t)
}

/// A pair `(u, v)` on one grid with its target masses.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub grid: Arc<RadialGrid>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub rho1: f64,
    pub rho2: f64,
}

impl StatePair {
    pub fn new(grid: Arc<RadialGrid>, u: Vec<f64>, v: Vec<f64>, rho1: f64, rho2: f64) -> Self {
        assert_eq!(grid.len(), u.len());
        assert_eq!(grid.len(), v.len());
        Self { grid, u, v, rho1, rho2 }
    }

    pub fn masses(&self) -> (f64, f64) {
        (self.grid.l2_norm(&self.u), self.grid.l2_norm(&self.v))
    }

    pub fn kinetic(&self) -> f64 {
        self.grid.grad_norm_sq(&self.u) + self.grid.grad_norm_sq(&self.v)
    }

    pub fn dilate(&self, t: f64) -> StatePair {
        StatePair {
            grid: self.grid.clone(),
            u: dilate_values(&self.grid, &self.u, t),
            v: dilate_values(&self.grid, &self.v, t),
            rho1: self.rho1,
            rho2: self.rho2,
        }
    }

    /// Dilation through [`dilate_values_spectral`].
    pub fn dilate_spectral(&self, t: f64) -> StatePair {
        StatePair {
            grid: self.grid.clone(),
            u: dilate_values_spectral(&self.grid, &self.u, t),
            v: dilate_values_spectral(&self.grid, &self.v, t),
            rho1: self.rho1,
            rho2: self.rho2,
        }
    }

    pub fn abs(&self) -> StatePair {
        StatePair {
            grid: self.grid.clone(),
            u: self.u.iter().map(|x| x.abs()).collect(),
            v: self.v.iter().map(|x| x.abs()).collect(),
            rho1: self.rho1,
            rho2: self.rho2,
        }
    }

    pub fn u_field(&self) -> RadialField {
        RadialField::new(self.grid.clone(), self.u.clone())
    }

    pub fn v_field(&self) -> RadialField {
        RadialField::new(self.grid.clone(), self.v.clone())
    }
}

/// Rescales each component onto `|u|₂ = ρ₁`, `|v|₂ = ρ₂`.
pub fn normalize_mass(state: &StatePair) -> Result<StatePair> {
    let (nu, nv) = state.masses();
    if nu == 0.0 || !nu.is_finite() {
        return Err(Error::ZeroField("u"));
    }
    if nv == 0.0 || !nv.is_finite() {
        return Err(Error::ZeroField("v"));
    }
    let (a, b) = (state.rho1 / nu, state.rho2 / nv);
    Ok(StatePair {
        grid: state.grid.clone(),
        u: state.u.iter().map(|x| x * a).collect(),
        v: state.v.iter().map(|x| x * b).collect(),
        rho1: state.rho1,
        rho2: state.rho2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // mpmath: sqrt((pi/2)^{3/2}) and 3 (pi/2)^{3/2}
    const GAUSS_L2: f64 = 1.403_104_145_534_216;
    const GAUSS_GRAD: f64 = 5.906_103_729_645_907;

    fn gaussian(grid: &Arc<RadialGrid>) -> RadialField {
        RadialField::from_fn(grid.clone(), |r| (-r * r).exp())
    }

    #[test]
    fn spectral_dilation_of_gaussian() {
        let grid = RadialGrid::standard(3, 12.0);
        let f = gaussian(&grid);
        for t in [0.7, 1.3, 2.0] {
            let got = dilate_values_spectral(&grid, &f.values, t);
            for (r, g) in grid.nodes.iter().zip(&got) {
                let exact = t.powf(1.5) * (-(t * r).powi(2)).exp();
                assert!((g - exact).abs() < 1e-12, "t={t} r={r}");
            }
        }
    }

    #[test]
    fn ball_volume_and_moments() {
        for dim in [3u32, 4] {
            let grid = RadialGrid::new(GridSpec::standard(dim, 2.5));
            assert_eq!(grid.len(), 1024);
            let omega = sphere_area(dim);
            let n = dim as f64;
            for k in 0..12 {
                let got: f64 = grid.nodes.iter().zip(&grid.weights).map(|(r, w)| r.powi(k) * w).sum();
                let exact = omega * 2.5f64.powf(k as f64 + n) / (k as f64 + n);
                assert!(((got - exact) / exact).abs() < 1e-12, "dim={dim} k={k}");
            }
            assert!(grid.nodes.windows(2).all(|p| p[0] < p[1]));
            assert!(grid.weights.iter().all(|&w| w > 0.0));
        }
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn norms_of_simple_fields() {
        let grid = RadialGrid::standard(3, 2.0);
        let zero = RadialField::new(grid.clone(), vec![0.0; grid.len()]);
        assert_eq!(zero.l2_norm(), 0.0);
        let one = RadialField::from_fn(grid.clone(), |_| 1.0);
        assert!((one.l2_norm() - (4.0 * PI * 8.0 / 3.0f64).sqrt()).abs() < 1e-12);
        assert_eq!(one.grad_norm_sq(), 0.0);
    }

    #[test]
    fn gaussian_norms_match_closed_form() {
        let grid = RadialGrid::standard(3, 12.0);
        let g = gaussian(&grid);
        assert!((g.l2_norm() - GAUSS_L2).abs() < 1e-10 * GAUSS_L2);
        assert!(((g.grad_norm_sq() - GAUSS_GRAD) / GAUSS_GRAD).abs() < 1e-3);
        assert!(g.decays(1e-10));
    }

    #[test]
    fn linear_field_gradient() {
        let spec = GridSpec { panels: 126, ..GridSpec::standard(3, 1.0) };
        let grid = Arc::new(RadialGrid::new(spec));
        assert_eq!(grid.len(), 2048);
        let f = RadialField::from_fn(grid, |r| r);
        let exact = 4.0 * PI / 3.0;
        let got = f.grad_norm_sq();
        assert!(((got - exact) / exact).abs() < 1e-4, "{got} vs {exact}");
    }

    #[test]
    fn stiffness_is_gradient_of_half_kinetic() {
        let grid = RadialGrid::standard(3, 6.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = grid.nodes.iter().map(|r| (-r * r / 3.0).exp() + 0.01 * rng.gen::<f64>()).collect();
        let v: Vec<f64> = (0..grid.len()).map(|_| rng.gen::<f64>() - 0.5).collect();
        let su = grid.stiffness_apply(&u);
        let lhs: f64 = su.iter().zip(&v).map(|(a, b)| a * b).sum();
        let eps = 1e-6;
        let plus: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = u.iter().zip(&v).map(|(a, b)| a - eps * b).collect();
        let fd = (grid.grad_norm_sq(&plus) - grid.grad_norm_sq(&minus)) / (4.0 * eps);
        assert!((lhs - fd).abs() < 1e-7 * lhs.abs().max(1.0));
    }

    #[test]
    fn shifted_solve_inverts() {
        let grid = RadialGrid::standard(4, 5.0);
        let b: Vec<f64> = grid.nodes.iter().map(|r| r.sin()).collect();
        let x = grid.solve_shifted(0.7, &b);
        let sx = grid.stiffness_apply(&x);
        for i in 0..grid.len() {
            let back = sx[i] + 0.7 * grid.weights[i] * x[i];
            assert!((back - b[i]).abs() < 1e-9 * (1.0 + b[i].abs()), "i={i}");
        }
    }

    #[test]
    fn normalize_mass_examples() {
        let grid = RadialGrid::standard(3, 10.0);
        let g = gaussian(&grid).values;
        let state = StatePair::new(grid.clone(), g.clone(), g.clone(), 1.0, 1.0);
        let on = normalize_mass(&state).unwrap();
        let again = normalize_mass(&on).unwrap();
        for (a, b) in on.u.iter().zip(&again.u) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1e-300));
        }
        let doubled = StatePair::new(grid.clone(), on.u.iter().map(|x| 2.0 * x).collect(), on.v.clone(), 1.0, 1.0);
        let back = normalize_mass(&doubled).unwrap();
        for (a, b) in back.u.iter().zip(&on.u) {
            assert!((a - b).abs() < 1e-14 * a.abs().max(1e-300));
        }
        let zero = StatePair::new(grid.clone(), vec![0.0; grid.len()], g, 1.0, 1.0);
        assert!(matches!(normalize_mass(&zero), Err(Error::ZeroField("u"))));
    }

    #[test]
    fn dilation_identity_and_invariance() {
        let grid = RadialGrid::standard(3, 12.0);
        let g = gaussian(&grid);
        assert_eq!(g.dilate(1.0).values, g.values);
        for t in [0.5, 0.8, 1.3, 2.0] {
            let d = g.dilate(t);
            assert!(((d.l2_norm() - g.l2_norm()) / g.l2_norm()).abs() < 1e-6, "t={t}");
        }
        let d = g.dilate(1.5);
        let ratio = d.grad_norm_sq() / (2.25 * g.grad_norm_sq());
        assert!((ratio - 1.0).abs() < 1e-4, "{ratio}");
    }

    #[test]
    fn dilation_composes() {
        let grid = RadialGrid::standard(3, 12.0);
        let g = gaussian(&grid);
        let ab = g.dilate(1.2).dilate(0.9);
        let direct = g.dilate(1.08);
        let diff: Vec<f64> = ab.values.iter().zip(&direct.values).map(|(a, b)| a - b).collect();
        assert!(grid.l2_norm(&diff) / direct.l2_norm() < 1e-5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn random_positive_fields_project_to_unit_mass(seed in 0u64..10_000, rho1 in 0.1f64..5.0, rho2 in 0.1f64..5.0) {
            let grid = RadialGrid::standard(3, 8.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: Vec<f64> = (0..grid.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let v: Vec<f64> = (0..grid.len()).map(|_| rng.gen::<f64>() + 1e-3).collect();
            let s = normalize_mass(&StatePair::new(grid, u, v, rho1, rho2)).unwrap();
            let (a, b) = s.masses();
            prop_assert!((a - rho1).abs() < 1e-12 * rho1);
            prop_assert!((b - rho2).abs() < 1e-12 * rho2);
        }

        #[test]
        fn interpolant_is_monotone_on_monotone_data(seed in 0u64..10_000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut x = vec![0.0];
            let mut y = vec![1.0];
            for _ in 0..20 {
                x.push(x.last().unwrap() + rng.gen_range(0.01..1.0));
                y.push(y.last().unwrap() - rng.gen_range(0.0..1.0));
            }
            let c = MonotoneCubic::new(x.clone(), y);
            let mut prev = f64::INFINITY;
            for k in 0..=2000 {
                let t = x[x.len() - 1] * k as f64 / 2000.0;
                let val = c.eval(t);
                prop_assert!(val <= prev + 1e-12);
                prev = val;
            }
        }
    }
}
