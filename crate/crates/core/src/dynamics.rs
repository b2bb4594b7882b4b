//! Drift matrix and noise-input map of the linearized Langevin equations
//! `dV/dt = -M V + V_in`, in the bare and the bright/dark supermode basis.
//!
//! The fluctuation vector is ordered
//! `(a_R, a_L, b_1, b_2, a_R^dag, a_L^dag, b_1^dag, b_2^dag)`; in the
//! supermode basis `(b_+, b_-)` replace `(b_1, b_2)`.

use nalgebra::{DMatrix, SMatrix, Schur};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::params::{ChannelId, NoiseChannel, PhysicalConfig};

pub type CMatrix8 = SMatrix<Complex64, 8, 8>;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub const DIM: usize = 8;
/// Number of undaggered modes; row `i + HALF` is the conjugate of row `i`.
pub const HALF: usize = 4;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Bare,
    Supermode,
}

impl Basis {
    pub fn name(self) -> &'static str {
        match self {
            Basis::Bare => "bare",
            Basis::Supermode => "supermode",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DriftSystem {
    pub basis: Basis,
    pub m: CMatrix8,
    /// `8 x channels.len()`. Entry `(i, c)` multiplies channel `c`'s
    /// annihilation operator for `i < 4` and its creation operator for `i >= 4`.
    pub input_map: DMatrix<Complex64>,
    pub channels: Vec<NoiseChannel>,
}

impl DriftSystem {
    pub fn channel_index(&self, id: ChannelId) -> Option<usize> {
        self.channels.iter().position(|c| c.id == id)
    }

    /// Amplitude with which channel `id` enters row `row` of `V_in`.
    pub fn input_weight(&self, row: usize, id: ChannelId) -> Complex64 {
        self.channel_index(id)
            .map(|c| self.input_map[(row, c)])
            .unwrap_or(ZERO)
    }

    /// Max-norm of `M - Sigma M^* Sigma`, zero for a physical doubled-space matrix.
    pub fn conjugation_defect(&self) -> f64 {
        conjugation_defect(&self.m)
    }

    pub fn to_json(&self) -> Value {
        let pairs = |rows: usize, cols: usize, at: &dyn Fn(usize, usize) -> Complex64| {
            (0..rows)
                .map(|i| {
                    (0..cols)
                        .map(|j| {
                            let z = at(i, j);
                            json!([z.re, z.im])
                        })
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>()
        };
        json!({
            "basis": self.basis.name(),
            "m": pairs(DIM, DIM, &|i, j| self.m[(i, j)]),
            "input_map": pairs(DIM, self.channels.len(), &|i, j| self.input_map[(i, j)]),
            "channels": self.channels.iter().map(|c| json!({
                "id": c.id.name(),
                "rate": c.rate,
                "occupation": c.occupation,
                "is_signal_port": c.is_signal_port,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Index permutation exchanging each mode with its conjugate.
pub fn conjugate_partner(i: usize) -> usize {
    (i + HALF) % DIM
}

pub fn conjugation_defect(m: &CMatrix8) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..DIM {
        for j in 0..DIM {
            let mirrored = m[(conjugate_partner(i), conjugate_partner(j))].conj();
            worst = worst.max((m[(i, j)] - mirrored).norm());
        }
    }
    worst
}

/// Completes the daggered half from the undaggered rows: `M[i+4][j^] = conj(M[i][j])`.
fn mirror(top: &[[Complex64; DIM]; HALF]) -> CMatrix8 {
    let mut m = CMatrix8::zeros();
    for i in 0..HALF {
        for j in 0..DIM {
            m[(i, j)] = top[i][j];
            m[(conjugate_partner(i), conjugate_partner(j))] = top[i][j].conj();
        }
    }
    m
}

fn assemble_inputs(top: &[(usize, ChannelId, f64)], channels: &[NoiseChannel]) -> DMatrix<Complex64> {
    let mut map = DMatrix::zeros(DIM, channels.len());
    for &(row, id, amp) in top {
        let c = channels
            .iter()
            .position(|ch| ch.id == id)
            .expect("channel registered");
        map[(row, c)] = re(amp);
        map[(conjugate_partner(row), c)] = re(amp);
    }
    map
}

fn optical_channels(cfg: &PhysicalConfig) -> Vec<NoiseChannel> {
    vec![
        NoiseChannel::new(ChannelId::OptInR, cfg.kappa_ex, cfg.n_th),
        NoiseChannel::new(ChannelId::OptVacR, cfg.kappa_0, cfg.n_th),
        NoiseChannel::new(ChannelId::OptInL, cfg.kappa_ex, cfg.n_th),
        NoiseChannel::new(ChannelId::OptVacL, cfg.kappa_0, cfg.n_th),
    ]
}

fn optical_inputs(cfg: &PhysicalConfig) -> Vec<(usize, ChannelId, f64)> {
    let (ex, vac) = (cfg.kappa_ex.sqrt(), cfg.kappa_0.sqrt());
    vec![
        (0, ChannelId::OptInR, ex),
        (0, ChannelId::OptVacR, vac),
        (1, ChannelId::OptInL, ex),
        (1, ChannelId::OptVacL, vac),
    ]
}

/// Drift system in the bare `(b_1, b_2)` basis.
///
/// Without the second resonator, `b_2` keeps only its own frequency, its
/// private decay `gamma_in` and the matching private input; it is fully
/// decoupled from everything else.
pub fn build_bare(cfg: &PhysicalConfig) -> Result<DriftSystem> {
    cfg.validate()?;
    let wm = cfg.omega_m;
    let half_kappa = cfg.kappa() / 2.0;
    let half_gm = cfg.gamma_m() / 2.0;
    let g_r = cfg.g_r;
    let g_l = cfg.g_l();

    let (mech_mix, mech_cr, b2_diag) = if cfg.two_resonators {
        (
            I * cfg.j_m + re(cfg.gamma_0 / 2.0),
            I * cfg.j_m,
            Complex64::new(half_gm, wm),
        )
    } else {
        (ZERO, ZERO, Complex64::new(cfg.gamma_in / 2.0, wm))
    };

    let opt = Complex64::new(half_kappa, wm);
    let top = [
        // a_R
        [opt, I * cfg.j_s, -I * g_r, ZERO, ZERO, ZERO, -I * g_r, ZERO],
        // a_L
        [I * cfg.j_s, opt, -I * g_l, ZERO, ZERO, ZERO, -I * g_l, ZERO],
        // b_1
        [
            -I * g_r.conj(),
            -I * g_l.conj(),
            Complex64::new(half_gm, wm),
            mech_mix,
            -I * g_r,
            -I * g_l,
            ZERO,
            mech_cr,
        ],
        // b_2
        [ZERO, ZERO, mech_mix, b2_diag, ZERO, ZERO, mech_cr, ZERO],
    ];
    let m = mirror(&top);

    let mut channels = optical_channels(cfg);
    channels.extend([
        NoiseChannel::new(ChannelId::MechCommon, cfg.gamma_0, cfg.n_th),
        NoiseChannel::new(ChannelId::MechPrivate1, cfg.gamma_in, cfg.n_th),
        NoiseChannel::new(ChannelId::MechPrivate2, cfg.gamma_in, cfg.n_th),
    ]);
    let mut inputs = optical_inputs(cfg);
    inputs.push((2, ChannelId::MechCommon, cfg.gamma_0.sqrt()));
    inputs.push((2, ChannelId::MechPrivate1, cfg.gamma_in.sqrt()));
    inputs.push((3, ChannelId::MechPrivate2, cfg.gamma_in.sqrt()));
    if cfg.two_resonators {
        inputs.push((3, ChannelId::MechCommon, cfg.gamma_0.sqrt()));
    }
    let input_map = assemble_inputs(&inputs, &channels);

    Ok(DriftSystem {
        basis: Basis::Bare,
        m,
        input_map,
        channels,
    })
}

/// Drift system in the bright/dark basis `b_± = (b_1 ± b_2)/sqrt(2)`.
///
/// The mechanical coupling enters only as the frequency splitting
/// `omega_± = omega_m ± J_m` (its counter-rotating part is dropped), while the
/// optomechanical counter-rotating terms are kept. The bright mode decays at
/// `gamma_in + 2 gamma_0` and alone sees the common reservoir, with amplitude
/// `sqrt(2 gamma_0)`; the dark mode decays at `gamma_in` only.
pub fn build_supermode(cfg: &PhysicalConfig) -> Result<DriftSystem> {
    cfg.validate()?;
    if !cfg.two_resonators {
        return Err(Error::Precondition(
            "supermodes require two mechanical resonators".into(),
        ));
    }
    let wm = cfg.omega_m;
    let opt = Complex64::new(cfg.kappa() / 2.0, wm);
    let gr = cfg.g_r / std::f64::consts::SQRT_2;
    let gl = cfg.g_l() / std::f64::consts::SQRT_2;
    let bright = Complex64::new(cfg.gamma_plus() / 2.0, wm + cfg.j_m);
    let dark = Complex64::new(cfg.gamma_in / 2.0, wm - cfg.j_m);

    let top = [
        [opt, I * cfg.j_s, -I * gr, -I * gr, ZERO, ZERO, -I * gr, -I * gr],
        [I * cfg.j_s, opt, -I * gl, -I * gl, ZERO, ZERO, -I * gl, -I * gl],
        [-I * gr.conj(), -I * gl.conj(), bright, ZERO, -I * gr, -I * gl, ZERO, ZERO],
        [-I * gr.conj(), -I * gl.conj(), ZERO, dark, -I * gr, -I * gl, ZERO, ZERO],
    ];
    let m = mirror(&top);

    let mut channels = optical_channels(cfg);
    channels.extend([
        NoiseChannel::new(ChannelId::MechCommon, cfg.gamma_0, cfg.n_th),
        NoiseChannel::new(ChannelId::SupBrightPrivate, cfg.gamma_in, cfg.n_th),
        NoiseChannel::new(ChannelId::SupDarkPrivate, cfg.gamma_in, cfg.n_th),
    ]);
    let mut inputs = optical_inputs(cfg);
    inputs.push((2, ChannelId::MechCommon, (2.0 * cfg.gamma_0).sqrt()));
    inputs.push((2, ChannelId::SupBrightPrivate, cfg.gamma_in.sqrt()));
    inputs.push((3, ChannelId::SupDarkPrivate, cfg.gamma_in.sqrt()));
    let input_map = assemble_inputs(&inputs, &channels);

    Ok(DriftSystem {
        basis: Basis::Supermode,
        m,
        input_map,
        channels,
    })
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub min_real_part: f64,
    pub stable: bool,
}

impl StabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "stable": self.stable,
            "min_real_part": self.min_real_part,
            "eigenvalues": self.eigenvalues.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
        })
    }
}

/// Relative floor on `min Re(lambda)` below which a system counts as unstable.
pub const STABILITY_RTOL: f64 = 1e-12;

pub fn eigenvalues(m: &CMatrix8) -> Result<Vec<Complex64>> {
    let schur = Schur::try_new(*m, f64::EPSILON, 10_000).ok_or(Error::EigenNonConvergence)?;
    let (_, t) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..DIM).map(|i| t[(i, i)]).collect();
    if ev.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

/// Stable iff every eigenvalue of `M` has a real part above
/// `STABILITY_RTOL * max|lambda|`.
pub fn check_stability(sys: &DriftSystem) -> Result<StabilityReport> {
    let eigenvalues = eigenvalues(&sys.m)?;
    let min_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    let scale = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(StabilityReport {
        stable: min_real_part > STABILITY_RTOL * scale,
        min_real_part,
        eigenvalues,
    })
}
