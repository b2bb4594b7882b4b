//! Frequency-domain response `U(omega) = (M - i omega I)^-1` and the output
//! spectra read from it.
//!
//! Thermal spectra are reported per thermal quantum (divided by `N_th`);
//! vacuum and total output spectra are absolute.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{check_stability, Basis, CMatrix8, DriftSystem};
use crate::error::{Error, Result};
use crate::params::PhysicalConfig;

// Row/column positions in the fluctuation vector.
pub const A_R: usize = 0;
pub const A_L: usize = 1;
/// `b_1` in the bare basis, `b_+` in the supermode basis.
pub const B1: usize = 2;
/// `b_2` in the bare basis, `b_-` in the supermode basis.
pub const B2: usize = 3;
pub const A_R_DAG: usize = 4;
pub const A_L_DAG: usize = 5;
pub const B1_DAG: usize = 6;
pub const B2_DAG: usize = 7;

/// Condition estimate above which `M - i omega I` is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone)]
pub struct Susceptibility {
    pub omega: f64,
    pub basis: Basis,
    pub u: CMatrix8,
    /// 1-norm condition number of `M - i omega I`.
    pub condition: f64,
}

impl Susceptibility {
    fn at(&self, row: usize, col: usize) -> Complex64 {
        self.u[(row, col)]
    }

    fn sq(&self, row: usize, col: usize) -> f64 {
        self.u[(row, col)].norm_sqr()
    }

    /// `max |(M - i omega I) U - I|`.
    pub fn residual(&self, m: &CMatrix8) -> f64 {
        let a = shifted(m, self.omega);
        (a * self.u - CMatrix8::identity()).camax()
    }
}

fn shifted(m: &CMatrix8, omega: f64) -> CMatrix8 {
    m - CMatrix8::identity() * Complex64::new(0.0, omega)
}

fn norm1(a: &CMatrix8) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `(M - i omega I) U = I` by LU factorization with partial pivoting.
pub fn susceptibility(sys: &DriftSystem, omega: f64) -> Result<Susceptibility> {
    let a = shifted(&sys.m, omega);
    let lu = a.lu();
    let u = lu
        .solve(&CMatrix8::identity())
        .ok_or(Error::ResonantSingularity {
            omega,
            condition: f64::INFINITY,
        })?;
    let condition = norm1(&a) * norm1(&u);
    if condition.is_nan() || condition > MAX_CONDITION {
        return Err(Error::ResonantSingularity { omega, condition });
    }
    Ok(Susceptibility {
        omega,
        basis: sys.basis,
        u,
        condition,
    })
}

/// `(T_R, T_L)`, probe transmission in each propagation direction.
pub fn transmission(u: &Susceptibility, kappa_ex: f64) -> (f64, f64) {
    let one = Complex64::new(1.0, 0.0);
    let t_r = (kappa_ex * u.at(A_R, A_R) - one).norm_sqr() + kappa_ex.powi(2) * u.sq(A_R, A_R_DAG);
    let t_l = (kappa_ex * u.at(A_L, A_L) - one).norm_sqr() + kappa_ex.powi(2) * u.sq(A_L, A_L_DAG);
    (t_r, t_l)
}

/// `(R_R, R_L)`: light leaving port R (L) that entered from the opposite direction.
pub fn reflection(u: &Susceptibility, kappa_ex: f64) -> (f64, f64) {
    let k2 = kappa_ex.powi(2);
    let r_r = k2 * (u.sq(A_R, A_L) + u.sq(A_R, A_L_DAG));
    let r_l = k2 * (u.sq(A_L, A_R) + u.sq(A_L, A_R_DAG));
    (r_r, r_l)
}

/// Bare-basis thermal output per thermal quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpectrum {
    pub s_r_th: f64,
    pub s_l_th: f64,
    /// Noise reaching port R through `b_1`, weighted by the full `gamma_m`.
    pub s1: f64,
    /// Noise reaching port R through `b_2`.
    pub s2: f64,
}

/// Thermal output spectra in the bare basis, divided by `N_th`.
///
/// The common-reservoir term adds the two mechanical amplitudes coherently,
/// `|U_{r,b1} + U_{r,b2}|^2`; this sum is where the two noise paths interfere.
pub fn thermal_spectrum(u: &Susceptibility, cfg: &PhysicalConfig) -> Result<ThermalSpectrum> {
    if u.basis != Basis::Bare {
        return Err(Error::Precondition(
            "path-resolved thermal spectrum needs a bare-basis susceptibility".into(),
        ));
    }
    let (kex, g0, gin) = (cfg.kappa_ex, cfg.gamma_0, cfg.gamma_in);
    let port = |r: usize| {
        let common = (u.at(r, B1) + u.at(r, B2)).norm_sqr() + (u.at(r, B1_DAG) + u.at(r, B2_DAG)).norm_sqr();
        let private = u.sq(r, B1) + u.sq(r, B2) + u.sq(r, B1_DAG) + u.sq(r, B2_DAG);
        kex * g0 * common + kex * gin * private
    };
    let path = |b: usize, b_dag: usize| kex * cfg.gamma_m() * (u.sq(A_R, b) + u.sq(A_R, b_dag));
    Ok(ThermalSpectrum {
        s_r_th: port(A_R),
        s_l_th: port(A_L),
        s1: path(B1, B1_DAG),
        s2: path(B2, B2_DAG),
    })
}

/// Bright/dark decomposition of the thermal output, per thermal quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupermodeThermal {
    pub r_plus: f64,
    pub r_minus: f64,
    pub l_plus: f64,
    pub l_minus: f64,
}

impl SupermodeThermal {
    pub fn s_r_th(&self) -> f64 {
        self.r_plus + self.r_minus
    }

    pub fn s_l_th(&self) -> f64 {
        self.l_plus + self.l_minus
    }
}

pub fn supermode_thermal(u: &Susceptibility, cfg: &PhysicalConfig) -> Result<SupermodeThermal> {
    if u.basis != Basis::Supermode {
        return Err(Error::Precondition(
            "bright/dark decomposition needs a supermode-basis susceptibility".into(),
        ));
    }
    let kex = cfg.kappa_ex;
    let plus = |r: usize| kex * cfg.gamma_plus() * (u.sq(r, B1) + u.sq(r, B1_DAG));
    let minus = |r: usize| kex * cfg.gamma_in * (u.sq(r, B2) + u.sq(r, B2_DAG));
    Ok(SupermodeThermal {
        r_plus: plus(A_R),
        r_minus: minus(A_R),
        l_plus: plus(A_L),
        l_minus: minus(A_L),
    })
}

/// `(S_R,vac, S_L,vac)`: output noise driven by the zero-point part of every input.
pub fn vacuum_spectrum(u: &Susceptibility, cfg: &PhysicalConfig) -> (f64, f64) {
    let (kex, k0) = (cfg.kappa_ex, cfg.kappa_0);
    let port = |r: usize| {
        let optical = (kex * kex + kex * k0) * (u.sq(r, A_R_DAG) + u.sq(r, A_L_DAG));
        let mechanical = match u.basis {
            Basis::Bare => {
                kex * cfg.gamma_0 * (u.at(r, B1_DAG) + u.at(r, B2_DAG)).norm_sqr()
                    + kex * cfg.gamma_in * (u.sq(r, B1_DAG) + u.sq(r, B2_DAG))
            }
            Basis::Supermode => {
                kex * cfg.gamma_plus() * u.sq(r, B1_DAG) + kex * cfg.gamma_in * u.sq(r, B2_DAG)
            }
        };
        optical + mechanical
    };
    (port(A_R), port(A_L))
}

/// `10 log10(T_R / T_L)`. `T_L = 0` gives `+inf` (or NaN if `T_R` is 0 too).
pub fn isolation_db(t_r: f64, t_l: f64) -> f64 {
    if t_l <= 0.0 {
        return if t_r > 0.0 { f64::INFINITY } else { f64::NAN };
    }
    10.0 * (t_r / t_l).log10()
}

/// Basis-specific noise decomposition, per thermal quantum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decomposition {
    Paths { s1: f64, s2: f64 },
    Supermodes { s_plus: f64, s_minus: f64 },
}

/// Flat input spectra injected at the two ports.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InputSpectra {
    pub s_r_in: f64,
    pub s_l_in: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectraPoint {
    pub omega: f64,
    pub t_r: f64,
    pub t_l: f64,
    pub r_r: f64,
    pub r_l: f64,
    /// Per thermal quantum.
    pub s_r_th: f64,
    /// Per thermal quantum.
    pub s_l_th: f64,
    pub decomposition: Decomposition,
    pub s_r_vac: f64,
    pub s_l_vac: f64,
    /// Absolute output spectra for the injected inputs.
    pub s_r_out: f64,
    pub s_l_out: f64,
    pub isolation_db: f64,
    pub n_th: f64,
}

impl SpectraPoint {
    pub fn evaluate(u: &Susceptibility, cfg: &PhysicalConfig, inputs: InputSpectra) -> Result<Self> {
        let (t_r, t_l) = transmission(u, cfg.kappa_ex);
        let (r_r, r_l) = reflection(u, cfg.kappa_ex);
        let (s_r_vac, s_l_vac) = vacuum_spectrum(u, cfg);
        let (s_r_th, s_l_th, decomposition) = match u.basis {
            Basis::Bare => {
                let th = thermal_spectrum(u, cfg)?;
                (th.s_r_th, th.s_l_th, Decomposition::Paths { s1: th.s1, s2: th.s2 })
            }
            Basis::Supermode => {
                let th = supermode_thermal(u, cfg)?;
                (
                    th.s_r_th(),
                    th.s_l_th(),
                    Decomposition::Supermodes {
                        s_plus: th.r_plus,
                        s_minus: th.r_minus,
                    },
                )
            }
        };
        let mut point = SpectraPoint {
            omega: u.omega,
            t_r,
            t_l,
            r_r,
            r_l,
            s_r_th,
            s_l_th,
            decomposition,
            s_r_vac,
            s_l_vac,
            s_r_out: 0.0,
            s_l_out: 0.0,
            isolation_db: isolation_db(t_r, t_l),
            n_th: cfg.n_th,
        };
        (point.s_r_out, point.s_l_out) = compose_output(&point, inputs.s_r_in, inputs.s_l_in);
        Ok(point)
    }

    /// `S_R,out / N_th`, the normalized noise output.
    pub fn s_r_out_per_nth(&self) -> f64 {
        self.s_r_out / self.n_th
    }

    pub fn s_l_out_per_nth(&self) -> f64 {
        self.s_l_out / self.n_th
    }
}

/// `S_out = T S_in(same port) + R S_in(opposite port) + N_th S_th + S_vac`, for both ports.
pub fn compose_output(p: &SpectraPoint, s_r_in: f64, s_l_in: f64) -> (f64, f64) {
    let s_r = p.t_r * s_r_in + p.r_r * s_l_in + p.n_th * p.s_r_th + p.s_r_vac;
    let s_l = p.t_l * s_l_in + p.r_l * s_r_in + p.n_th * p.s_l_th + p.s_l_vac;
    (s_r, s_l)
}

/// All spectra at a single frequency.
pub fn spectra_at(
    sys: &DriftSystem,
    cfg: &PhysicalConfig,
    omega: f64,
    inputs: InputSpectra,
) -> Result<SpectraPoint> {
    SpectraPoint::evaluate(&susceptibility(sys, omega)?, cfg, inputs)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepOptions {
    /// Sweep even if the drift matrix has a non-positive eigenvalue real part.
    pub allow_unstable: bool,
    pub inputs: InputSpectra,
}

#[derive(Debug, Clone)]
pub struct SpectraBundle {
    pub basis: Basis,
    pub points: Vec<SpectraPoint>,
    /// Set when the system was swept despite failing the stability check.
    pub unstable: bool,
}

impl SpectraBundle {
    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.omega)
    }
}

/// Evaluates every spectrum on `grid`. Points are independent and computed
/// in parallel; results keep grid order, and the first failing point (in
/// grid order) is reported.
pub fn sweep(
    sys: &DriftSystem,
    cfg: &PhysicalConfig,
    grid: &[f64],
    opts: SweepOptions,
) -> Result<SpectraBundle> {
    let report = check_stability(sys)?;
    if !report.stable && !opts.allow_unstable {
        return Err(Error::Unstable {
            min_real_part: report.min_real_part,
        });
    }
    let results: Vec<Result<SpectraPoint>> = grid
        .par_iter()
        .map(|&w| spectra_at(sys, cfg, w, opts.inputs))
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SpectraBundle {
        basis: sys.basis,
        points,
        unstable: !report.stable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{build_bare, build_supermode};
    use crate::dynamics::DIM;
    use crate::params::GlMode;

    fn fig2(two: bool) -> PhysicalConfig {
        PhysicalConfig {
            omega_m: 5.0,
            kappa_0: 1.0,
            kappa_ex: 1.0,
            delta_0: 5.0,
            j_s: 0.1,
            j_m: 0.01,
            gamma_0: 5e-4,
            gamma_in: 5e-8,
            g_r: Complex64::new(0.1, 0.0),
            g_l_mode: GlMode::Derived,
            n_th: 1e5,
            two_resonators: two,
        }
    }

    fn bare_cavity() -> PhysicalConfig {
        PhysicalConfig {
            j_s: 0.0,
            j_m: 0.0,
            gamma_0: 0.0,
            g_r: Complex64::new(0.0, 0.0),
            ..fig2(true)
        }
    }

    #[test]
    fn decoupled_susceptibility_is_scalar() {
        let cfg = bare_cavity();
        let sys = build_bare(&cfg).unwrap();
        let w = 4.7;
        let u = susceptibility(&sys, w).unwrap();
        let expect = Complex64::new(1.0, 0.0) / Complex64::new(cfg.kappa() / 2.0, cfg.omega_m - w);
        assert!((u.u[(0, 0)] - expect).norm() < 1e-15);
        for i in 0..DIM {
            for j in 0..DIM {
                if i != j {
                    assert_eq!(u.u[(i, j)].norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn inversion_residual_at_resonance() {
        let sys = build_bare(&fig2(true)).unwrap();
        let u = susceptibility(&sys, 5.0).unwrap();
        assert!(u.residual(&sys.m) < 1e-10);
    }

    #[test]
    fn singular_shift_is_reported() {
        // undamped, uncoupled mechanics: M - i omega_m I is exactly singular
        let cfg = PhysicalConfig {
            gamma_in: 0.0,
            ..bare_cavity()
        };
        let sys = build_bare(&cfg).unwrap();
        match susceptibility(&sys, cfg.omega_m) {
            Err(Error::ResonantSingularity { omega, .. }) => assert_eq!(omega, cfg.omega_m),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn critically_coupled_cavity_extinguishes() {
        let sys = build_bare(&bare_cavity()).unwrap();
        let u = susceptibility(&sys, 5.0).unwrap();
        let (t_r, t_l) = transmission(&u, 1.0);
        assert!(t_r < 1e-28 && t_l < 1e-28);
    }

    #[test]
    fn far_off_resonance_passes_through() {
        let cfg = fig2(true);
        let sys = build_bare(&cfg).unwrap();
        let u = susceptibility(&sys, 5.0 + 1e6).unwrap();
        let (t_r, t_l) = transmission(&u, 1.0);
        let (r_r, r_l) = reflection(&u, 1.0);
        let (v_r, _) = vacuum_spectrum(&u, &cfg);
        assert!((t_r - 1.0).abs() < 1e-5 && (t_l - 1.0).abs() < 1e-5);
        assert!(r_r < 1e-12 && r_l < 1e-12 && v_r < 1e-12);
    }

    #[test]
    fn no_reflection_without_backscattering() {
        let cfg = PhysicalConfig {
            j_s: 0.0,
            ..fig2(true)
        };
        let sys = build_bare(&cfg).unwrap();
        for w in [4.99, 5.0, 5.01] {
            let u = susceptibility(&sys, w).unwrap();
            assert_eq!(reflection(&u, 1.0), (0.0, 0.0));
        }
    }

    #[test]
    fn thermal_needs_matching_basis() {
        let cfg = fig2(true);
        let bare = susceptibility(&build_bare(&cfg).unwrap(), 5.0).unwrap();
        let sup = susceptibility(&build_supermode(&cfg).unwrap(), 5.0).unwrap();
        assert!(thermal_spectrum(&sup, &cfg).is_err());
        assert!(supermode_thermal(&bare, &cfg).is_err());
    }

    #[test]
    fn no_mechanical_damping_no_thermal_noise() {
        let cfg = PhysicalConfig {
            gamma_0: 0.0,
            gamma_in: 0.0,
            ..fig2(true)
        };
        let u = susceptibility(&build_supermode(&cfg).unwrap(), 4.99).unwrap();
        let th = supermode_thermal(&u, &cfg).unwrap();
        assert_eq!((th.r_plus, th.r_minus), (0.0, 0.0));
    }

    #[test]
    fn optics_decoupled_from_mechanics_has_no_mechanical_vacuum() {
        let cfg = PhysicalConfig {
            g_r: Complex64::new(0.0, 0.0),
            ..fig2(true)
        };
        let u = susceptibility(&build_bare(&cfg).unwrap(), 5.0).unwrap();
        for col in [B1_DAG, B2_DAG] {
            assert_eq!(u.u[(A_R, col)].norm(), 0.0);
        }
        let th = thermal_spectrum(&u, &cfg).unwrap();
        assert_eq!(th.s_r_th, 0.0);
    }

    #[test]
    fn bright_mode_dominates_above_resonance() {
        let cfg = fig2(true);
        let u = susceptibility(&build_supermode(&cfg).unwrap(), 5.01).unwrap();
        let th = supermode_thermal(&u, &cfg).unwrap();
        assert!(th.r_plus > 1e3 * th.r_minus, "{th:?}");
    }

    #[test]
    fn isolation_edge_cases() {
        assert_eq!(isolation_db(0.3, 0.3), 0.0);
        assert!((isolation_db(1.0, 1e-5) - 50.0).abs() < 1e-12);
        assert_eq!(isolation_db(1.0, 0.0), f64::INFINITY);
        assert!(isolation_db(0.0, 0.0).is_nan());
    }

    #[test]
    fn noise_only_output_is_thermal_plus_vacuum() {
        let cfg = fig2(true);
        let sys = build_bare(&cfg).unwrap();
        let p = spectra_at(&sys, &cfg, 4.99, InputSpectra::default()).unwrap();
        assert_eq!(p.s_r_out, cfg.n_th * p.s_r_th + p.s_r_vac);
        assert_eq!(p.s_l_out, cfg.n_th * p.s_l_th + p.s_l_vac);
    }

    #[test]
    fn pass_through_of_injected_signal() {
        let cfg = PhysicalConfig {
            n_th: 0.0,
            ..bare_cavity()
        };
        let sys = build_bare(&cfg).unwrap();
        let inputs = InputSpectra {
            s_r_in: 1.0,
            s_l_in: 0.0,
        };
        let p = spectra_at(&sys, &cfg, 5.0 + 1e7, inputs).unwrap();
        assert!((p.s_r_out - 1.0).abs() < 1e-9);
        assert!(p.s_l_out < 1e-12);
    }

    #[test]
    fn sweep_single_point_matches_direct_call() {
        let cfg = fig2(true);
        let sys = build_bare(&cfg).unwrap();
        let b = sweep(&sys, &cfg, &[4.995], SweepOptions::default()).unwrap();
        let p = spectra_at(&sys, &cfg, 4.995, InputSpectra::default()).unwrap();
        assert_eq!(b.points, vec![p]);
        assert!(!b.unstable);
    }

    #[test]
    fn sweep_rejects_unstable_without_override() {
        let cfg = PhysicalConfig {
            omega_m: 0.1,
            delta_0: 0.1,
            g_r: Complex64::new(0.01, 0.0),
            j_m: 2e-4,
            j_s: 1.0,
            gamma_0: 1e-5,
            gamma_in: 1e-9,
            ..fig2(true)
        };
        let sys = build_bare(&cfg).unwrap();
        assert!(matches!(
            sweep(&sys, &cfg, &[0.1], SweepOptions::default()),
            Err(Error::Unstable { .. })
        ));
        let b = sweep(
            &sys,
            &cfg,
            &[0.1],
            SweepOptions {
                allow_unstable: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(b.unstable);
        assert_eq!(b.points.len(), 1);
    }

    #[test]
    fn empty_sweep() {
        let cfg = fig2(true);
        let sys = build_bare(&cfg).unwrap();
        let b = sweep(&sys, &cfg, &[], SweepOptions::default()).unwrap();
        assert!(b.points.is_empty());
    }
}
