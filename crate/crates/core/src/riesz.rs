//! Dense radial Riesz kernel: angular averages of `c_{N,α}|x-y|^{α-N}`, with the
//! singular self-interaction supplied by the exact potential of a small ball.

use std::f64::consts::PI;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::quadrature::{adaptive, GaussRule};
use crate::radial::{sphere_area, GridSpec, RadialField, RadialGrid};

const CACHE_MAGIC: &[u8; 8] = b"CHQRIESZ";
const CACHE_VERSION: u32 = 1;
const ANGULAR_ORDER: usize = 12;

/// `Γ((N-α)/2) / (2^α π^{N/2} Γ(α/2))`.
pub fn riesz_constant(dim: u32, alpha: f64) -> f64 {
    let n = dim as f64;
    gamma((n - alpha) / 2.0) / (2f64.powf(alpha) * PI.powf(n / 2.0) * gamma(alpha / 2.0))
}

/// `(a^e - b^e)/e` for `a > b ≥ 0`, continuous through `e = 0`.
fn pow_diff(a: f64, b: f64, e: f64) -> f64 {
    if b == 0.0 {
        return if e > 0.0 { a.powf(e) / e } else { f64::INFINITY };
    }
    let l = (a / b).ln();
    if e == 0.0 {
        l
    } else {
        b.powf(e) * (e * l).exp_m1() / e
    }
}

/// Mean of `|r e - s ω|^{α-N}` over the unit sphere, by graded Gauss–Legendre in the polar angle.
pub fn angular_average_numeric(dim: u32, alpha: f64, r: f64, s: f64) -> f64 {
    let rule = GaussRule::new(ANGULAR_ORDER);
    let n = dim as f64;
    let expo = (alpha - n) / 2.0;
    let diff2 = (r - s) * (r - s);
    let rs4 = 4.0 * r * s;
    let integrand = |theta: f64| {
        let half = (0.5 * theta).sin();
        (diff2 + rs4 * half * half).powf(expo) * theta.sin().powi(dim as i32 - 2)
    };
    let delta = (r - s).abs() / (r * s).sqrt();
    let mut breaks = vec![0.0];
    let mut t = delta.min(PI / 4.0);
    while t < PI {
        breaks.push(t);
        t *= 2.0;
    }
    breaks.push(PI);
    let total: f64 = breaks.windows(2).map(|w| rule.integrate(w[0], w[1], integrand)).sum();
    sphere_area(dim - 1) / sphere_area(dim) * total
}

/// Mean of `|r e - s ω|^{α-N}` over the unit sphere for `r ≠ s`.
pub fn angular_average(dim: u32, alpha: f64, r: f64, s: f64) -> f64 {
    let (lo, hi) = if r <= s { (r, s) } else { (s, r) };
    if lo == 0.0 {
        return hi.powf(alpha - dim as f64);
    }
    if dim == 3 {
        pow_diff(hi + lo, hi - lo, alpha - 1.0) / (2.0 * lo * hi)
    } else {
        angular_average_numeric(dim, alpha, lo, hi)
    }
}

/// `(I_α ∗ 1_{B_b})(r)` for `0 ≤ r < b`.
pub fn ball_potential(dim: u32, alpha: f64, b: f64, r: f64) -> f64 {
    let c = riesz_constant(dim, alpha);
    let f = |theta: f64| {
        let (sn, cs) = theta.sin_cos();
        let rho = -r * cs + (b * b - r * r * sn * sn).max(0.0).sqrt();
        rho.max(0.0).powf(alpha) * sn.powi(dim as i32 - 2)
    };
    let tol = 1e-14;
    let integral = adaptive(&f, 0.0, 0.5 * PI, tol) + adaptive(&f, 0.5 * PI, PI, tol);
    c / alpha * sphere_area(dim - 1) * integral
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelMeta {
    pub angular_order: usize,
    pub singularity: String,
}

#[derive(Clone, Debug)]
pub struct RieszKernel {
    pub grid: Arc<RadialGrid>,
    pub alpha: f64,
    /// Row-major `M × M`.
    pub matrix: Vec<f64>,
    pub meta: KernelMeta,
}

impl RieszKernel {
    pub fn build(grid: Arc<RadialGrid>, alpha: f64) -> Result<Self> {
        let dim = grid.dim();
        if !(alpha > 0.0 && alpha < dim as f64) {
            return Err(Error::InvalidAlpha { alpha, dim });
        }
        let m = grid.len();
        let c = riesz_constant(dim, alpha);
        let nodes = &grid.nodes;
        let upper: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|i| ((i + 1)..m).map(|j| c * angular_average(dim, alpha, nodes[i], nodes[j])).collect())
            .collect();
        let mut matrix = vec![0.0; m * m];
        for (i, row) in upper.iter().enumerate() {
            for (k, &g) in row.iter().enumerate() {
                let j = i + 1 + k;
                matrix[i * m + j] = g;
                matrix[j * m + i] = g;
            }
        }
        let order = grid.spec.order;
        let breaks = &grid.breaks;
        let diag: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|i| {
                // local ball ending one panel past the node's own panel
                let top = (i / order + 2).min(breaks.len() - 1);
                let b = breaks[top];
                let end = top * order;
                let row = &matrix[i * m..i * m + end];
                let off: f64 = row
                    .iter()
                    .zip(&grid.weights)
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, (k, w))| k * w)
                    .sum();
                (ball_potential(dim, alpha, b, nodes[i]) - off) / grid.weights[i]
            })
            .collect();
        for (i, d) in diag.into_iter().enumerate() {
            matrix[i * m + i] = d;
        }
        Ok(Self {
            grid,
            alpha,
            matrix,
            meta: KernelMeta {
                angular_order: ANGULAR_ORDER,
                singularity: "local ball-potential subtraction on the diagonal".to_string(),
            },
        })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.len() + j]
    }

    fn check(&self, grid: &RadialGrid) -> Result<()> {
        if grid.spec == self.grid.spec && grid.len() == self.len() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `(I_α ∗ f)(r_i) = Σ_j K_ij f_j w_j` on raw nodal values.
    pub fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        let m = self.len();
        assert_eq!(f.len(), m);
        let fw: Vec<f64> = f.iter().zip(&self.grid.weights).map(|(a, w)| a * w).collect();
        self.matrix
            .par_chunks(m)
            .map(|row| row.iter().zip(&fw).map(|(k, x)| k * x).sum())
            .collect()
    }

    pub fn apply(&self, f: &RadialField) -> Result<RadialField> {
        self.check(&f.grid)?;
        Ok(RadialField::new(self.grid.clone(), self.apply_values(&f.values)))
    }

    /// `(I_α ∗ f)(r)` at an off-grid radius by direct quadrature over the nodes.
    pub fn apply_at(&self, f: &[f64], r: f64) -> f64 {
        let dim = self.grid.dim();
        let c = riesz_constant(dim, self.alpha);
        self.grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .zip(f)
            .map(|((&s, w), fx)| c * angular_average(dim, self.alpha, r, s) * w * fx)
            .sum()
    }

    /// `Σ_ij a_i K_ij b_j w_i w_j`.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        let kb = self.apply_values(b);
        self.grid.dot(a, &kb)
    }

    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.header_bytes());
        for x in &self.matrix {
            h.update(x.to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn header_bytes(&self) -> Vec<u8> {
        header_for(&self.grid.spec, self.alpha)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = self.header_bytes();
        bytes.reserve(self.matrix.len() * 8);
        for x in &self.matrix {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let mut file = fs::File::create(path)?;
        file.write_all(&bytes)?;
        Ok(())
    }

    /// Reads a cached kernel; the header must match `(grid spec, α)` exactly.
    pub fn load(path: &Path, grid: Arc<RadialGrid>, alpha: f64) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        let header = header_for(&grid.spec, alpha);
        if bytes.len() < header.len() || bytes[..header.len()] != header[..] {
            return Err(Error::Cache(format!("header mismatch in {}", path.display())));
        }
        let m = grid.len();
        let body = &bytes[header.len()..];
        if body.len() != m * m * 8 {
            return Err(Error::Cache(format!("expected {} entries, file has {} bytes", m * m, body.len())));
        }
        let matrix = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(Self {
            grid,
            alpha,
            matrix,
            meta: KernelMeta {
                angular_order: ANGULAR_ORDER,
                singularity: "local ball-potential subtraction on the diagonal".to_string(),
            },
        })
    }

    /// Loads from `dir` when a matching file exists, otherwise builds and stores it.
    pub fn cached(dir: &Path, grid: Arc<RadialGrid>, alpha: f64) -> Result<Self> {
        let path = cache_path(dir, &grid.spec, alpha);
        if path.exists() {
            if let Ok(k) = Self::load(&path, grid.clone(), alpha) {
                return Ok(k);
            }
        }
        let kernel = Self::build(grid, alpha)?;
        fs::create_dir_all(dir)?;
        kernel.save(&path)?;
        Ok(kernel)
    }
}

fn header_for(spec: &GridSpec, alpha: f64) -> Vec<u8> {
    let mut out = Vec::with_capacity(80);
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&spec.dim.to_le_bytes());
    out.extend_from_slice(&spec.radius.to_le_bytes());
    for n in [spec.order, spec.panels, spec.grading, spec.outer_panels] {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    out.extend_from_slice(&spec.outer_ratio.to_le_bytes());
    out.extend_from_slice(&alpha.to_le_bytes());
    out.extend_from_slice(&(ANGULAR_ORDER as u64).to_le_bytes());
    out
}

pub fn cache_path(dir: &Path, spec: &GridSpec, alpha: f64) -> PathBuf {
    let digest = Sha256::digest(header_for(spec, alpha));
    let tag: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    dir.join(format!("riesz_N{}_M{}_{tag}.bin", spec.dim, spec.node_count()))
}

pub fn build_kernel(grid: Arc<RadialGrid>, alpha: f64) -> Result<RieszKernel> {
    RieszKernel::build(grid, alpha)
}

pub fn apply(kernel: &RieszKernel, f: &RadialField) -> Result<RadialField> {
    kernel.apply(f)
}

/// `D_pq = ∫(I_α ∗ |f|^p)|g|^q`.
pub fn nonlocal_pair(kernel: &RieszKernel, f: &RadialField, g: &RadialField, p: f64, q: f64) -> Result<f64> {
    kernel.check(&f.grid)?;
    kernel.check(&g.grid)?;
    let fp: Vec<f64> = f.values.iter().map(|x| x.abs().powf(p)).collect();
    let gq: Vec<f64> = g.values.iter().map(|x| x.abs().powf(q)).collect();
    Ok(kernel.bilinear(&gq, &fp))
}

/// Grid whose inner part is `spec` and whose geometric outer panels reach `2^20 R`.
pub fn extended_spec(spec: GridSpec) -> GridSpec {
    GridSpec { outer_panels: 20, outer_ratio: 2.0, ..spec }
}

/// Relative L² deviation between `I_α f` and `I_{α/2}(I_{α/2} f)` over `r ≤ R/2`.
pub fn semigroup_check(grid: &Arc<RadialGrid>, alpha: f64, f: &[f64]) -> Result<f64> {
    if f.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let full = RieszKernel::build(grid.clone(), alpha)?;
    let half = RieszKernel::build(grid.clone(), alpha / 2.0)?;
    let direct = full.apply_values(f);
    let twice = half.apply_values(&half.apply_values(f));
    let cutoff = 0.5 * grid.spec.radius;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &r) in grid.nodes.iter().enumerate() {
        if r <= cutoff {
            let d = direct[i] - twice[i];
            num += grid.weights[i] * d * d;
            den += grid.weights[i] * direct[i] * direct[i];
        }
    }
    Ok((num / den).sqrt())
}
