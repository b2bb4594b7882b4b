//! Physical parameters of the resonator/mechanics network.
//!
//! Every rate, frequency and coupling is expressed in units of the intrinsic
//! optical decay rate `kappa_0`, which is therefore fixed to 1. The only SI
//! quantity in the crate is the input of [`thermal_occupation`].

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// How the counter-propagating effective coupling `G_L` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GlMode {
    /// `G_L = i J_s G_R / (-kappa/2 - i omega_m)`.
    Derived,
    Explicit(Complex64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConfig {
    pub omega_m: f64,
    pub kappa_0: f64,
    pub kappa_ex: f64,
    /// Bare pump detuning `omega_c - omega_p`. The static mechanical
    /// displacement pins the effective detuning to `omega_m`, so this value
    /// only enters the steady-state solver.
    pub delta_0: f64,
    pub j_s: f64,
    pub j_m: f64,
    /// Decay of each mechanical resonator into the shared reservoir.
    pub gamma_0: f64,
    /// Decay of each mechanical resonator into its private reservoir.
    pub gamma_in: f64,
    pub g_r: Complex64,
    pub g_l_mode: GlMode,
    pub n_th: f64,
    pub two_resonators: bool,
}

impl PhysicalConfig {
    pub fn validate(&self) -> Result<()> {
        fn finite(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, "must be finite"))
            }
        }
        for (name, v) in [
            ("omega_m", self.omega_m),
            ("kappa_0", self.kappa_0),
            ("kappa_ex", self.kappa_ex),
            ("delta_0", self.delta_0),
            ("j_s", self.j_s),
            ("j_m", self.j_m),
            ("gamma_0", self.gamma_0),
            ("gamma_in", self.gamma_in),
            ("n_th", self.n_th),
        ] {
            finite(name, v)?;
        }
        if !(self.g_r.re.is_finite() && self.g_r.im.is_finite()) {
            return Err(Error::invalid("g_r", "must be finite"));
        }
        if let GlMode::Explicit(g) = self.g_l_mode {
            if !(g.re.is_finite() && g.im.is_finite()) {
                return Err(Error::invalid("g_l_mode", "must be finite"));
            }
        }
        if self.kappa_0 != 1.0 {
            return Err(Error::invalid(
                "kappa_0",
                format!("is the unit of all rates and must be 1, got {}", self.kappa_0),
            ));
        }
        if self.omega_m <= 0.0 {
            return Err(Error::invalid("omega_m", "must be > 0"));
        }
        for (name, v) in [
            ("kappa_ex", self.kappa_ex),
            ("gamma_0", self.gamma_0),
            ("gamma_in", self.gamma_in),
            ("n_th", self.n_th),
        ] {
            if v < 0.0 {
                return Err(Error::invalid(name, "must be >= 0"));
            }
        }
        Ok(())
    }

    /// Total optical decay `kappa_ex + kappa_0`.
    pub fn kappa(&self) -> f64 {
        self.kappa_ex + self.kappa_0
    }

    /// Total mechanical decay `gamma_0 + gamma_in`.
    pub fn gamma_m(&self) -> f64 {
        self.gamma_0 + self.gamma_in
    }

    /// Bright-mode decay `gamma_in + 2 gamma_0`.
    pub fn gamma_plus(&self) -> f64 {
        self.gamma_in + 2.0 * self.gamma_0
    }

    /// Mechanical coupling actually in effect (zero without the second resonator).
    pub fn j_m_eff(&self) -> f64 {
        if self.two_resonators {
            self.j_m
        } else {
            0.0
        }
    }

    pub fn g_l(&self) -> Complex64 {
        match self.g_l_mode {
            GlMode::Derived => derive_g_l(self),
            GlMode::Explicit(g) => g,
        }
    }

    /// Serializes to the `key = value` config format read by [`PhysicalConfig::parse`].
    pub fn to_kv_string(&self) -> String {
        let g_l = match self.g_l_mode {
            GlMode::Derived => "derived".to_string(),
            GlMode::Explicit(g) => format_complex(g),
        };
        format!(
            "omega_m = {:?}\nkappa_0 = {:?}\nkappa_ex = {:?}\ndelta_0 = {:?}\nj_s = {:?}\n\
             j_m = {:?}\ngamma_0 = {:?}\ngamma_in = {:?}\ng_r = {}\ng_l_mode = {}\n\
             n_th = {:?}\ntwo_resonators = {}\n",
            self.omega_m,
            self.kappa_0,
            self.kappa_ex,
            self.delta_0,
            self.j_s,
            self.j_m,
            self.gamma_0,
            self.gamma_in,
            format_complex(self.g_r),
            g_l,
            self.n_th,
            self.two_resonators,
        )
    }

    /// Parses the flat `key = value` config format.
    ///
    /// Lines are `key = value`; `#` starts a comment. Keys are the field
    /// names of [`PhysicalConfig`]. Complex values are written `re+imj`.
    /// `kappa_0` (default 1), `delta_0` (default `omega_m`), `g_l_mode`
    /// (default `derived`) and `two_resonators` (default `true`) may be
    /// omitted; all other keys are required. Unknown or repeated keys are
    /// errors.
    pub fn parse(text: &str) -> Result<Self> {
        let mut omega_m = None;
        let mut kappa_0 = None;
        let mut kappa_ex = None;
        let mut delta_0 = None;
        let mut j_s = None;
        let mut j_m = None;
        let mut gamma_0 = None;
        let mut gamma_in = None;
        let mut g_r = None;
        let mut g_l_mode = None;
        let mut n_th = None;
        let mut two_resonators = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
                line,
                msg: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            let real = |v: &str| -> Result<f64> {
                v.parse::<f64>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{key}`: cannot parse `{v}` as a real number"),
                })
            };
            fn set<T>(slot: &mut Option<T>, v: T, key: &str, line: usize) -> Result<()> {
                if slot.replace(v).is_some() {
                    return Err(Error::Parse {
                        line,
                        msg: format!("duplicate key `{key}`"),
                    });
                }
                Ok(())
            }
            match key {
                "omega_m" => set(&mut omega_m, real(value)?, key, line)?,
                "kappa_0" => set(&mut kappa_0, real(value)?, key, line)?,
                "kappa_ex" => set(&mut kappa_ex, real(value)?, key, line)?,
                "delta_0" => set(&mut delta_0, real(value)?, key, line)?,
                "j_s" => set(&mut j_s, real(value)?, key, line)?,
                "j_m" => set(&mut j_m, real(value)?, key, line)?,
                "gamma_0" => set(&mut gamma_0, real(value)?, key, line)?,
                "gamma_in" => set(&mut gamma_in, real(value)?, key, line)?,
                "n_th" => set(&mut n_th, real(value)?, key, line)?,
                "g_r" => {
                    let c = parse_complex(value).ok_or_else(|| Error::Parse {
                        line,
                        msg: format!("`g_r`: cannot parse `{value}` as complex (re+imj)"),
                    })?;
                    set(&mut g_r, c, key, line)?
                }
                "g_l_mode" => {
                    let mode = if value.eq_ignore_ascii_case("derived") {
                        GlMode::Derived
                    } else {
                        let v = value.strip_prefix("explicit:").unwrap_or(value).trim();
                        GlMode::Explicit(parse_complex(v).ok_or_else(|| Error::Parse {
                            line,
                            msg: format!(
                                "`g_l_mode`: expected `derived` or a complex value, got `{value}`"
                            ),
                        })?)
                    };
                    set(&mut g_l_mode, mode, key, line)?
                }
                "two_resonators" => {
                    let b = match value {
                        "true" | "1" => true,
                        "false" | "0" => false,
                        _ => {
                            return Err(Error::Parse {
                                line,
                                msg: format!("`two_resonators`: expected true/false, got `{value}`"),
                            })
                        }
                    };
                    set(&mut two_resonators, b, key, line)?
                }
                other => {
                    return Err(Error::UnknownKey {
                        key: other.to_string(),
                        line,
                    })
                }
            }
        }

        let omega_m = omega_m.ok_or(Error::MissingKey("omega_m"))?;
        let cfg = PhysicalConfig {
            omega_m,
            kappa_0: kappa_0.unwrap_or(1.0),
            kappa_ex: kappa_ex.ok_or(Error::MissingKey("kappa_ex"))?,
            delta_0: delta_0.unwrap_or(omega_m),
            j_s: j_s.ok_or(Error::MissingKey("j_s"))?,
            j_m: j_m.ok_or(Error::MissingKey("j_m"))?,
            gamma_0: gamma_0.ok_or(Error::MissingKey("gamma_0"))?,
            gamma_in: gamma_in.ok_or(Error::MissingKey("gamma_in"))?,
            g_r: g_r.ok_or(Error::MissingKey("g_r"))?,
            g_l_mode: g_l_mode.unwrap_or(GlMode::Derived),
            n_th: n_th.ok_or(Error::MissingKey("n_th"))?,
            two_resonators: two_resonators.unwrap_or(true),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl fmt::Display for PhysicalConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_kv_string())
    }
}

/// Formats a complex number as `re+imj` with round-trip precision.
pub fn format_complex(c: Complex64) -> String {
    let sign = if c.im.is_sign_negative() { "-" } else { "+" };
    format!("{:?}{}{:?}j", c.re, sign, c.im.abs())
}

/// Parses `re+imj`, `re-imj`, a bare real, or a bare imaginary `imj`.
pub fn parse_complex(s: &str) -> Option<Complex64> {
    let s = s.trim();
    let Some(body) = s.strip_suffix(['j', 'J']) else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    // split at the last sign that is not a leading sign or an exponent sign
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let re = body[..i].trim().parse::<f64>().ok()?;
            let im_str = body[i..].trim();
            let im = match im_str {
                "+" => 1.0,
                "-" => -1.0,
                _ => im_str.parse::<f64>().ok()?,
            };
            Some(Complex64::new(re, im))
        }
        None => {
            let im = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                _ => body.parse::<f64>().ok()?,
            };
            Some(Complex64::new(0.0, im))
        }
    }
}

/// Counter-propagating coupling induced by backscattering:
/// `G_L = i J_s G_R / (-kappa/2 - i omega_m)`.
pub fn derive_g_l(cfg: &PhysicalConfig) -> Complex64 {
    I * cfg.j_s * cfg.g_r / optical_pole(cfg)
}

fn optical_pole(cfg: &PhysicalConfig) -> Complex64 {
    Complex64::new(-cfg.kappa() / 2.0, -cfg.omega_m)
}

/// Mean fields of the driven system under the factorization assumption.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BareSteadyState {
    pub alpha_r: Complex64,
    pub alpha_l: Complex64,
    /// `beta_1^* + beta_1`; only this quadrature is fixed by the equations.
    pub beta1_quadrature: f64,
    pub beta2: Complex64,
    pub pump: Complex64,
    pub bare_coupling: f64,
}

impl BareSteadyState {
    /// Effective couplings `(G_R, G_L) = g (alpha_R, alpha_L)`.
    pub fn effective_couplings(&self) -> (Complex64, Complex64) {
        (
            self.bare_coupling * self.alpha_r,
            self.bare_coupling * self.alpha_l,
        )
    }

    /// Residuals of the four steady-state relations, each scaled to be
    /// dimensionless: the two optical mean-field equations, the detuning
    /// constraint `omega_m = delta_0 - g (beta_1^* + beta_1)`, and the
    /// undamped second-resonator balance `omega_m beta_2 + J_m (beta_1^* + beta_1) = 0`.
    pub fn residuals(&self, cfg: &PhysicalConfig) -> [f64; 4] {
        let eff_detuning = cfg.delta_0 - self.bare_coupling * self.beta1_quadrature;
        let diag = Complex64::new(-cfg.kappa() / 2.0, -eff_detuning);
        let scale = self.pump.norm().max(1.0);
        let r_opt = diag * self.alpha_r - I * cfg.j_s * self.alpha_l - I * self.pump;
        let l_opt = diag * self.alpha_l - I * cfg.j_s * self.alpha_r;
        let detuning = eff_detuning - cfg.omega_m;
        let b2 = cfg.omega_m * self.beta2 + cfg.j_m_eff() * self.beta1_quadrature;
        let qscale = self.beta1_quadrature.abs().max(1.0);
        [
            r_opt.norm() / scale,
            l_opt.norm() / scale,
            detuning.abs() / cfg.delta_0.abs().max(cfg.omega_m),
            b2.norm() / (cfg.omega_m * qscale),
        ]
    }
}

/// Closed-form steady state for a pump amplitude and single-photon coupling.
///
/// The single-photon coupling is real; a common phase of the optical
/// amplitudes drops out of every spectrum.
pub fn steady_state(cfg: &PhysicalConfig, pump: Complex64, bare_g: f64) -> Result<BareSteadyState> {
    cfg.validate()?;
    if cfg.kappa() <= 0.0 {
        return Err(Error::Precondition("total optical decay must be > 0".into()));
    }
    if !bare_g.is_finite() {
        return Err(Error::invalid("bare_g", "must be finite"));
    }
    let offset = cfg.delta_0 - cfg.omega_m;
    let beta1_quadrature = if offset == 0.0 {
        0.0
    } else if bare_g == 0.0 {
        return Err(Error::Precondition(
            "bare coupling g = 0 with delta_0 != omega_m leaves the displacement quadrature undefined"
                .into(),
        ));
    } else {
        offset / bare_g
    };

    let pole = optical_pole(cfg);
    let alpha_r = I * pump / (pole + cfg.j_s * cfg.j_s / pole);
    let alpha_l = I * cfg.j_s * alpha_r / pole;
    let beta2 = Complex64::new(-(cfg.j_m_eff() / cfg.omega_m) * beta1_quadrature, 0.0);

    Ok(BareSteadyState {
        alpha_r,
        alpha_l,
        beta1_quadrature,
        beta2,
        pump,
        bare_coupling: bare_g,
    })
}

/// Bose-Einstein occupation `1 / (exp(hbar omega / k_B T) - 1)` from SI inputs.
pub fn thermal_occupation(omega_m_si: f64, temperature: f64) -> Result<f64> {
    if !omega_m_si.is_finite() || omega_m_si <= 0.0 {
        return Err(Error::invalid("omega_m_si", "must be > 0"));
    }
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::invalid("temperature", "must be > 0"));
    }
    let x = HBAR * omega_m_si / (K_B * temperature);
    Ok(1.0 / x.exp_m1())
}

/// Identity of an input-noise operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChannelId {
    OptInR,
    OptVacR,
    OptInL,
    OptVacL,
    MechCommon,
    MechPrivate1,
    MechPrivate2,
    SupBrightPrivate,
    SupDarkPrivate,
}

impl ChannelId {
    pub fn name(self) -> &'static str {
        match self {
            ChannelId::OptInR => "opt_in_r",
            ChannelId::OptVacR => "opt_vac_r",
            ChannelId::OptInL => "opt_in_l",
            ChannelId::OptVacL => "opt_vac_l",
            ChannelId::MechCommon => "mech_common",
            ChannelId::MechPrivate1 => "mech_private_1",
            ChannelId::MechPrivate2 => "mech_private_2",
            ChannelId::SupBrightPrivate => "sup_bright_private",
            ChannelId::SupDarkPrivate => "sup_dark_private",
        }
    }

    pub fn is_optical(self) -> bool {
        matches!(
            self,
            ChannelId::OptInR | ChannelId::OptVacR | ChannelId::OptInL | ChannelId::OptVacL
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseChannel {
    pub id: ChannelId,
    /// Decay rate through this channel.
    pub rate: f64,
    /// `<xi^dag xi>`: `N_th` for mechanical reservoirs, 0 for optical ones.
    pub occupation: f64,
    pub is_signal_port: bool,
}

impl NoiseChannel {
    pub fn new(id: ChannelId, rate: f64, n_th: f64) -> Self {
        NoiseChannel {
            id,
            rate,
            occupation: if id.is_optical() { 0.0 } else { n_th },
            is_signal_port: matches!(id, ChannelId::OptInR | ChannelId::OptInL),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> PhysicalConfig {
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
            two_resonators: true,
        }
    }

    #[test]
    fn g_l_vanishes_without_backscattering() {
        let cfg = PhysicalConfig { j_s: 0.0, ..base() };
        assert_eq!(derive_g_l(&cfg), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn g_l_magnitude() {
        // |i * 0.1 * 0.1 / (-1 - 5i)| = 0.01 / sqrt(26)
        let g = derive_g_l(&base()).norm();
        assert!((g - 0.01 / 26f64.sqrt()).abs() < 1e-16);
        assert!((g - 1.961e-3).abs() < 1e-6);
        let strong = PhysicalConfig { j_s: 1.0, ..base() };
        assert!((derive_g_l(&strong).norm() - 0.1 / 26f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn derived_quantities() {
        let cfg = base();
        assert_eq!(cfg.kappa(), 2.0);
        assert_eq!(cfg.gamma_m(), 5e-4 + 5e-8);
        assert_eq!(cfg.gamma_plus(), 5e-8 + 1e-3);
        let one = PhysicalConfig {
            two_resonators: false,
            ..cfg
        };
        assert_eq!(one.j_m_eff(), 0.0);
    }

    #[test]
    fn validation_rejects_bad_values() {
        for cfg in [
            PhysicalConfig { omega_m: 0.0, ..base() },
            PhysicalConfig { kappa_ex: -1.0, ..base() },
            PhysicalConfig { gamma_0: -1e-3, ..base() },
            PhysicalConfig { n_th: -1.0, ..base() },
            PhysicalConfig { kappa_0: 2.0, ..base() },
            PhysicalConfig { j_s: f64::NAN, ..base() },
        ] {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert!(base().validate().is_ok());
    }

    #[test]
    fn undriven_cavity_is_empty() {
        let ss = steady_state(&base(), Complex64::new(0.0, 0.0), 1e-3).unwrap();
        assert_eq!(ss.alpha_r, Complex64::new(0.0, 0.0));
        assert_eq!(ss.alpha_l, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn operating_point_has_no_static_displacement() {
        let ss = steady_state(&base(), Complex64::new(10.0, 0.0), 1e-3).unwrap();
        assert_eq!(ss.beta1_quadrature, 0.0);
        assert_eq!(ss.beta2.norm(), 0.0);
    }

    #[test]
    fn no_backscattering_means_no_counter_propagating_field() {
        let cfg = PhysicalConfig { j_s: 0.0, ..base() };
        let ss = steady_state(&cfg, Complex64::new(10.0, 0.0), 1e-3).unwrap();
        assert_eq!(ss.alpha_l, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn steady_state_satisfies_fixed_point_equations() {
        let cfg = base();
        let pump = Complex64::new(10.0, 0.0);
        let unit = steady_state(&cfg, pump, 1.0).unwrap();
        let g = 0.1 / unit.alpha_r.norm();
        let ss = steady_state(&cfg, pump, g).unwrap();
        let (g_r, g_l) = ss.effective_couplings();
        assert!((g_r.norm() - 0.1).abs() < 1e-15);
        // G_L from the mean fields equals the backscattering relation applied to G_R
        let derived = derive_g_l(&PhysicalConfig { g_r, ..cfg });
        assert!((g_l - derived).norm() < 1e-16);
        let r = ss.residuals(&cfg);
        assert!(r.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-12, "{r:?}");

        // off the operating point the displacement is finite and still consistent
        let shifted = PhysicalConfig { delta_0: 5.3, ..cfg };
        let ss = steady_state(&shifted, pump, g).unwrap();
        assert!((ss.beta1_quadrature - 0.3 / g).abs() < 1e-9);
        assert!(ss.residuals(&shifted).iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn zero_coupling_off_operating_point_rejected() {
        let cfg = PhysicalConfig { delta_0: 5.5, ..base() };
        assert!(matches!(
            steady_state(&cfg, Complex64::new(1.0, 0.0), 0.0),
            Err(Error::Precondition(_))
        ));
        assert!(steady_state(&base(), Complex64::new(1.0, 0.0), 0.0).is_ok());
    }

    #[test]
    fn room_temperature_occupation() {
        let n = thermal_occupation(2.0 * std::f64::consts::PI * 60e6, 300.0).unwrap();
        assert!((n / 1e5 - 1.0).abs() < 0.05, "{n}");
    }

    #[test]
    fn occupation_limits() {
        let omega = 2.0 * std::f64::consts::PI * 1e9;
        let t = HBAR * omega / (K_B * 2f64.ln());
        assert!((thermal_occupation(omega, t).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(thermal_occupation(1e15, 1e-3).unwrap(), 0.0);
        assert!(thermal_occupation(0.0, 300.0).is_err());
        assert!(thermal_occupation(1e6, -1.0).is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.1+0.2j"), Some(Complex64::new(0.1, 0.2)));
        assert_eq!(parse_complex("1e-3-2e-4j"), Some(Complex64::new(1e-3, -2e-4)));
        assert_eq!(parse_complex("-1.5e+2+3j"), Some(Complex64::new(-150.0, 3.0)));
        assert_eq!(parse_complex("0.5"), Some(Complex64::new(0.5, 0.0)));
        assert_eq!(parse_complex("-2j"), Some(Complex64::new(0.0, -2.0)));
        assert_eq!(parse_complex("abc"), None);
        let c = Complex64::new(-0.1, -1e-8);
        assert_eq!(parse_complex(&format_complex(c)), Some(c));
    }

    #[test]
    fn config_file_parsing() {
        let text = "# fig2\nomega_m = 5\nkappa_ex = 1 # external\nj_s = 0.1\nj_m = 0.01\n\
                    gamma_0 = 5e-4\ngamma_in = 5e-8\ng_r = 0.1+0j\nn_th = 1e5\n";
        let cfg = PhysicalConfig::parse(text).unwrap();
        assert_eq!(cfg, base());
        assert_eq!(PhysicalConfig::parse(&cfg.to_kv_string()).unwrap(), cfg);

        let explicit = format!("{text}g_l_mode = explicit:0.001-0.002j\n");
        let cfg = PhysicalConfig::parse(&explicit).unwrap();
        assert_eq!(cfg.g_l_mode, GlMode::Explicit(Complex64::new(0.001, -0.002)));
    }

    #[test]
    fn config_file_errors() {
        let bad = "omega_m = 5\nfoo = 1\n";
        match PhysicalConfig::parse(bad) {
            Err(Error::UnknownKey { key, line }) => {
                assert_eq!(key, "foo");
                assert_eq!(line, 2);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            PhysicalConfig::parse("omega_m = 5\nomega_m = 6\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            PhysicalConfig::parse("omega_m = five\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            PhysicalConfig::parse("omega_m = 5\n"),
            Err(Error::MissingKey(_))
        ));
        assert!(matches!(
            PhysicalConfig::parse("omega_m\n"),
            Err(Error::Parse { .. })
        ));
    }
}
