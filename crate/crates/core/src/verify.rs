//! Independent checks on the spectra engine.
//!
//! The stationary covariance is obtained algebraically from the Lyapunov
//! equation `M C + C M^dag = D` and compared against the frequency integral
//! `(1/2pi) int U D U^dag d omega` evaluated with the per-frequency inverse.
//! `C[i][j] = <V_i V_j^dag>`, so the occupation `<x^dag x>` of mode `k` sits
//! at `C[k+4][k+4]`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dynamics::{
    build_bare, build_supermode, check_stability, eigenvalues, CMatrix8, DriftSystem, DIM, HALF,
};
use crate::error::{Error, Result};
use crate::params::{ChannelId, NoiseChannel, PhysicalConfig};
use crate::spectra::{susceptibility, thermal_spectrum, transmission};

pub const PSD_TOL: f64 = 1e-12;

/// Input-noise diffusion matrix `D = L Corr L^dag`.
#[derive(Debug, Clone)]
pub struct DiffusionMatrix {
    pub d: CMatrix8,
}

impl DiffusionMatrix {
    /// Uses each channel's own occupation.
    pub fn new(sys: &DriftSystem) -> Self {
        Self::with_occupations(sys, |ch| ch.occupation)
    }

    /// Occupation per channel supplied by `occ`. Annihilation rows pair as
    /// `<xi xi^dag> = N + 1`, creation rows as `<xi^dag xi> = N`; the
    /// cross blocks vanish.
    pub fn with_occupations(sys: &DriftSystem, occ: impl Fn(&NoiseChannel) -> f64) -> Self {
        let l = &sys.input_map;
        let mut d = CMatrix8::zeros();
        for (c, ch) in sys.channels.iter().enumerate() {
            let n = occ(ch);
            for i in 0..DIM {
                for j in 0..DIM {
                    let upper = i < HALF;
                    if upper != (j < HALF) {
                        continue;
                    }
                    let w = if upper { n + 1.0 } else { n };
                    d[(i, j)] += l[(i, c)] * l[(j, c)].conj() * w;
                }
            }
        }
        DiffusionMatrix { d }
    }

    pub fn hermitian_defect(&self) -> f64 {
        (self.d - self.d.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.d + self.d.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().min()
    }

    /// Hermitian and positive semidefinite to `PSD_TOL` relative to `max |D|`.
    pub fn is_psd(&self) -> bool {
        let scale = self.d.camax().max(1.0);
        self.hermitian_defect() <= PSD_TOL * scale && self.min_eigenvalue() >= -PSD_TOL * scale
    }
}

#[derive(Debug, Clone)]
pub struct CovarianceReport {
    pub c: CMatrix8,
    /// `max |M C + C M^dag - D|`.
    pub residual: f64,
    pub d_max: f64,
}

impl CovarianceReport {
    /// `<x^dag x>` for mode `k` in `0..4`.
    pub fn occupation(&self, k: usize) -> f64 {
        self.c[(k + HALF, k + HALF)].re
    }

    pub fn relative_residual(&self) -> f64 {
        if self.d_max > 0.0 {
            self.residual / self.d_max
        } else {
            self.residual
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "residual": self.residual,
            "relative_residual": self.relative_residual(),
            "occupations": (0..HALF).map(|k| self.occupation(k)).collect::<Vec<_>>(),
        })
    }
}

/// Solves `M C + C M^dag = D` as the 64-unknown linear system
/// `(I (x) M + conj(M) (x) I) vec(C) = vec(D)`.
pub fn solve_lyapunov(m: &CMatrix8, d: &CMatrix8) -> Result<CovarianceReport> {
    let n = DIM;
    let mut a = DMatrix::<Complex64>::zeros(n * n, n * n);
    for col in 0..n {
        for row in 0..n {
            let r = col * n + row;
            for k in 0..n {
                // (M C)[row][col] = sum_k M[row][k] C[k][col]
                a[(r, col * n + k)] += m[(row, k)];
                // (C M^dag)[row][col] = sum_k C[row][k] conj(M[col][k])
                a[(r, k * n + row)] += m[(col, k)].conj();
            }
        }
    }
    let rhs = DMatrix::from_iterator(n * n, 1, d.iter().copied());
    let x = a.lu().solve(&rhs).ok_or(Error::LyapunovSingular)?;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::LyapunovSingular);
    }
    let c = CMatrix8::from_iterator(x.iter().copied());
    let residual = (m * c + c * m.adjoint() - d).camax();
    Ok(CovarianceReport {
        c,
        residual,
        d_max: d.camax(),
    })
}

/// Stationary covariance of a stable system with its default occupations.
pub fn lyapunov_covariance(sys: &DriftSystem) -> Result<CovarianceReport> {
    covariance_with(sys, &DiffusionMatrix::new(sys))
}

pub fn covariance_with(sys: &DriftSystem, diffusion: &DiffusionMatrix) -> Result<CovarianceReport> {
    let report = check_stability(sys)?;
    if !report.stable {
        return Err(Error::Unstable {
            min_real_part: report.min_real_part,
        });
    }
    solve_lyapunov(&sys.m, &diffusion.d)
}

/// Tail mass beyond the grid above which the quadrature is not trusted.
pub const MAX_TAIL_FRACTION: f64 = 1e-4;

/// Frequency grid graded toward the poles of `U`. Each eigenvalue `lambda`
/// of `M` puts a pole at `Im(lambda) - i Re(lambda)`; the step at `omega` is
/// `du` times the distance to the nearest pole, so adjacent steps differ by
/// at most a factor `1 / (1 - du)`.
pub fn parseval_grid(m: &CMatrix8, half_width: f64, du: f64) -> Result<Vec<f64>> {
    if !(du > 0.0 && du < 1.0 && half_width > 0.0) {
        return Err(Error::Precondition("grid needs 0 < du < 1 and half_width > 0".into()));
    }
    let poles: Vec<Complex64> = eigenvalues(m)?
        .into_iter()
        .map(|l| Complex64::new(l.im, -l.re.abs().max(f64::MIN_POSITIVE)))
        .collect();
    let scale = |w: f64| {
        poles
            .iter()
            .map(|p| (Complex64::new(w, 0.0) - p).norm())
            .fold(f64::INFINITY, f64::min)
    };
    let mut grid = vec![-half_width];
    let mut w = -half_width;
    while w < half_width {
        let step = du * scale(w);
        // fold a short remainder into the final step
        w = if w + 1.5 * step >= half_width { half_width } else { w + step };
        grid.push(w);
    }
    Ok(grid)
}

pub const DEFAULT_HALF_WIDTH: f64 = 1e5;
pub const DEFAULT_DU: f64 = 4e-3;

#[derive(Debug, Clone)]
pub struct ParsevalReport {
    /// Per diagonal entry of `C`: (Lyapunov value, quadrature value).
    pub entries: Vec<(f64, f64)>,
    pub max_mismatch: f64,
    pub tail_fraction: f64,
    pub points: usize,
}

impl ParsevalReport {
    pub fn to_json(&self) -> Value {
        json!({
            "max_mismatch": self.max_mismatch,
            "tail_fraction": self.tail_fraction,
            "points": self.points,
            "lyapunov": self.entries.iter().map(|e| e.0).collect::<Vec<_>>(),
            "quadrature": self.entries.iter().map(|e| e.1).collect::<Vec<_>>(),
        })
    }
}

/// Diagonal of `U(omega) D U(omega)^dag`.
fn spectral_diagonal(sys: &DriftSystem, d: &CMatrix8, omega: f64) -> Result<[f64; DIM]> {
    let u = susceptibility(sys, omega)?.u;
    let s = u * d * u.adjoint();
    Ok(std::array::from_fn(|i| s[(i, i)].re))
}

/// Composite Simpson rule on a nonuniform grid; an odd interval count
/// closes with one trapezoid.
fn simpson(x: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    let mut sum = 0.0;
    let mut k = 0;
    while k + 2 < x.len() {
        let (h0, h1) = (x[k + 1] - x[k], x[k + 2] - x[k + 1]);
        let h = h0 + h1;
        sum += h / 6.0
            * ((2.0 - h1 / h0) * f(k) + h * h / (h0 * h1) * f(k + 1) + (2.0 - h0 / h1) * f(k + 2));
        k += 2;
    }
    if k + 1 < x.len() {
        sum += 0.5 * (f(k) + f(k + 1)) * (x[k + 1] - x[k]);
    }
    sum
}

/// Compares every diagonal entry of the Lyapunov covariance with the
/// Simpson-rule frequency integral over `grid`, closed with `1/omega^2`
/// tails beyond both ends. Mismatch is relative per entry; entries that
/// vanish are compared against the largest diagonal entry instead.
pub fn parseval_check(sys: &DriftSystem, grid: &[f64]) -> Result<ParsevalReport> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Precondition(
            "quadrature grid must be strictly increasing with at least two points".into(),
        ));
    }
    let diffusion = DiffusionMatrix::new(sys);
    let cov = covariance_with(sys, &diffusion)?;
    let values = grid
        .par_iter()
        .map(|&w| spectral_diagonal(sys, &diffusion.d, w))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let two_pi = 2.0 * std::f64::consts::PI;
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    let lyap: Vec<f64> = (0..DIM).map(|i| cov.c[(i, i)].re).collect();
    let scale = lyap.iter().fold(0.0f64, |a, &b| a.max(b.abs()));

    let mut entries = Vec::with_capacity(DIM);
    let mut max_mismatch = 0.0f64;
    let mut tail_fraction = 0.0f64;
    for i in 0..DIM {
        let body = simpson(grid, |k| values[k][i]);
        let tail = values[0][i] * first.abs() + values[grid.len() - 1][i] * last.abs();
        let total = (body + tail) / two_pi;
        if total.abs() > 0.0 {
            tail_fraction = tail_fraction.max((tail / two_pi / total).abs());
        }
        let denom = if lyap[i].abs() > 1e-12 * scale {
            lyap[i].abs()
        } else {
            scale
        };
        max_mismatch = max_mismatch.max((total - lyap[i]).abs() / denom);
        entries.push((lyap[i], total));
    }
    if tail_fraction > MAX_TAIL_FRACTION {
        return Err(Error::InsufficientCoverage {
            tail_fraction,
            limit: MAX_TAIL_FRACTION,
        });
    }
    Ok(ParsevalReport {
        entries,
        max_mismatch,
        tail_fraction,
        points: grid.len(),
    })
}

/// Parseval check on the default pole-clustered grid.
pub fn parseval_default(sys: &DriftSystem) -> Result<ParsevalReport> {
    let grid = parseval_grid(&sys.m, DEFAULT_HALF_WIDTH, DEFAULT_DU)?;
    parseval_check(sys, &grid)
}

#[derive(Debug, Clone)]
pub struct SingleModeLimit {
    /// Interior local maxima of `T_R` found on the grid.
    pub peaks: usize,
    pub peak_omega: f64,
    pub peak_value: f64,
    /// Largest `|S2|` seen; must be exactly zero.
    pub s2_max: f64,
    pub passed: bool,
}

impl SingleModeLimit {
    pub fn to_json(&self) -> Value {
        json!({
            "peaks": self.peaks,
            "peak_omega": self.peak_omega,
            "peak_value": self.peak_value,
            "s2_max": self.s2_max,
            "passed": self.passed,
        })
    }
}

/// Points in the single-mode scan over `omega_m +- 60 gamma_m`.
pub const LIMIT_SCAN_POINTS: usize = 4001;

/// With one mechanical resonator `T_R` shows one transparency peak near
/// `omega_m` and the second noise path carries nothing.
pub fn limit_check_single_mode(cfg: &PhysicalConfig) -> Result<SingleModeLimit> {
    if cfg.two_resonators {
        return Err(Error::Precondition(
            "single-mode limit check needs two_resonators = false".into(),
        ));
    }
    let sys = build_bare(cfg)?;
    let half = 60.0 * cfg.gamma_m();
    let n = LIMIT_SCAN_POINTS;
    let grid: Vec<f64> = (0..n)
        .map(|k| cfg.omega_m - half + 2.0 * half * k as f64 / (n - 1) as f64)
        .collect();
    let rows = grid
        .par_iter()
        .map(|&w| {
            let u = susceptibility(&sys, w)?;
            Ok((transmission(&u, cfg.kappa_ex).0, thermal_spectrum(&u, cfg)?.s2))
        })
        .collect::<Vec<Result<(f64, f64)>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let t: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let peaks = (1..n - 1).filter(|&k| t[k] > t[k - 1] && t[k] >= t[k + 1]).count();
    let best = (0..n).max_by(|&a, &b| t[a].total_cmp(&t[b])).unwrap_or(0);
    let s2_max = rows.iter().fold(0.0f64, |a, r| a.max(r.1.abs()));
    Ok(SingleModeLimit {
        peaks,
        peak_omega: grid[best],
        peak_value: t[best],
        s2_max,
        passed: peaks == 1 && s2_max == 0.0,
    })
}

#[derive(Debug, Clone)]
pub struct BasisConsistency {
    /// `(omega, T_R bare, T_R supermode, relative deviation)`.
    pub points: Vec<(f64, f64, f64, f64)>,
    pub max_deviation: f64,
}

impl BasisConsistency {
    pub fn to_json(&self) -> Value {
        json!({
            "points": self.points.iter().map(|p| json!({
                "omega": p.0, "t_r_bare": p.1, "t_r_supermode": p.2, "deviation": p.3,
            })).collect::<Vec<_>>(),
            "max_deviation": self.max_deviation,
        })
    }
}

/// Relative `T_R` deviation between the two bases at `omega_m -+ J_m`.
pub fn basis_consistency(cfg: &PhysicalConfig) -> Result<BasisConsistency> {
    let bare = build_bare(cfg)?;
    let sup = build_supermode(cfg)?;
    let mut points = Vec::new();
    let mut max_deviation = 0.0f64;
    for w in [cfg.omega_m - cfg.j_m, cfg.omega_m + cfg.j_m] {
        let tb = transmission(&susceptibility(&bare, w)?, cfg.kappa_ex).0;
        let ts = transmission(&susceptibility(&sup, w)?, cfg.kappa_ex).0;
        let dev = (tb - ts).abs() / tb.abs().max(f64::MIN_POSITIVE);
        max_deviation = max_deviation.max(dev);
        points.push((w, tb, ts, dev));
    }
    Ok(BasisConsistency {
        points,
        max_deviation,
    })
}

/// Occupation override that silences every channel except `MechCommon`.
pub fn common_reservoir_only(ch: &NoiseChannel) -> f64 {
    if ch.id == ChannelId::MechCommon {
        ch.occupation
    } else {
        0.0
    }
}
