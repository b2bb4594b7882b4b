use crate::error::{Error, Result};
use crate::params::PhysicalConfig;

/// Unit of the frequency offsets and of the `omega_norm` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Kappa0,
    GammaM,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Kappa0 => "kappa0",
            Units::GammaM => "gamma_m",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "kappa0" | "kappa_0" => Some(Units::Kappa0),
            "gamma_m" | "gammam" => Some(Units::GammaM),
            _ => None,
        }
    }

    pub fn scale(self, cfg: &PhysicalConfig) -> f64 {
        match self {
            Units::Kappa0 => cfg.kappa_0,
            Units::GammaM => cfg.gamma_m(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Linear,
    /// Dense near zero offset: `offset = width * sinh(t)` with `t` uniform.
    LogCluster { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub spacing: Spacing,
}

impl Span {
    pub fn linear(lo: f64, hi: f64, points: usize) -> Self {
        Span {
            lo,
            hi,
            points,
            spacing: Spacing::Linear,
        }
    }

    fn offsets(&self) -> Vec<f64> {
        let n = self.points;
        let frac = |k: usize| if n > 1 { k as f64 / (n - 1) as f64 } else { 0.0 };
        match self.spacing {
            Spacing::Linear => (0..n).map(|k| self.lo + (self.hi - self.lo) * frac(k)).collect(),
            Spacing::LogCluster { width } => {
                let (a, b) = ((self.lo / width).asinh(), (self.hi / width).asinh());
                (0..n).map(|k| width * (a + (b - a) * frac(k)).sinh()).collect()
            }
        }
    }
}

/// Frequency grid as offsets from `omega_m`, in `units`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    pub spans: Vec<Span>,
    pub units: Units,
}

impl FrequencyGrid {
    pub fn new(spans: Vec<Span>, units: Units) -> Self {
        FrequencyGrid { spans, units }
    }

    /// Absolute frequencies, merged, sorted and free of duplicates.
    pub fn omegas(&self, cfg: &PhysicalConfig) -> Vec<f64> {
        let scale = self.units.scale(cfg);
        let mut out: Vec<f64> = self
            .spans
            .iter()
            .flat_map(|s| s.offsets())
            .map(|off| cfg.omega_m + off * scale)
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `(omega - omega_m) / unit`.
    pub fn normalize(&self, cfg: &PhysicalConfig, omega: f64) -> f64 {
        (omega - cfg.omega_m) / self.units.scale(cfg)
    }

    /// `lo:hi:points[:units]`, a single linear span.
    pub fn parse(spec: &str, default_units: Units) -> Result<Self> {
        let bad = |msg: &str| Error::Parse {
            line: 0,
            msg: format!("grid `{spec}`: {msg}"),
        };
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad("expected lo:hi:points[:units]"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad lower bound"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad upper bound"))?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad("bad point count"))?;
        let units = match parts.get(3) {
            Some(u) => Units::parse(u.trim()).ok_or_else(|| bad("units must be kappa0 or gamma_m"))?,
            None => default_units,
        };
        if !(lo.is_finite() && hi.is_finite()) || hi < lo || (points > 1 && hi == lo) {
            return Err(bad("need finite lo < hi"));
        }
        Ok(FrequencyGrid::new(vec![Span::linear(lo, hi, points)], units))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::GlMode;
    use num_complex::Complex64;

    fn cfg() -> PhysicalConfig {
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
    fn merged_grid_is_strictly_increasing() {
        let g = FrequencyGrid::new(
            vec![
                Span::linear(-1.0, 1.0, 21),
                Span::linear(-0.5, 0.5, 11),
                Span {
                    lo: -0.2,
                    hi: 0.3,
                    points: 50,
                    spacing: Spacing::LogCluster { width: 0.01 },
                },
            ],
            Units::Kappa0,
        );
        let w = g.omegas(&cfg());
        assert!(w.windows(2).all(|p| p[1] > p[0]));
        assert_eq!(w[0], 4.0);
        assert_eq!(*w.last().unwrap(), 6.0);
    }

    #[test]
    fn cluster_is_dense_at_center() {
        let s = Span {
            lo: -1.0,
            hi: 1.0,
            points: 101,
            spacing: Spacing::LogCluster { width: 0.01 },
        };
        let off = s.offsets();
        assert!((off[50]).abs() < 1e-15);
        // a uniform grid would step by 0.02 everywhere
        assert!(off[51] - off[50] < 2e-3);
        assert!(off[100] - off[99] > 0.05);
        assert!((off[0] + 1.0).abs() < 1e-12 && (off[100] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_units_scale_offsets() {
        let c = cfg();
        let g = FrequencyGrid::parse("-40:0:3:gamma_m", Units::Kappa0).unwrap();
        let w = g.omegas(&c);
        assert_eq!(w.len(), 3);
        assert!((w[0] - (5.0 - 40.0 * c.gamma_m())).abs() < 1e-15);
        assert!((g.normalize(&c, w[0]) + 40.0).abs() < 1e-9);
    }

    #[test]
    fn grid_spec_errors() {
        for bad in ["1:2", "a:2:3", "2:1:5", "0:1:5:hz", "0:1:x"] {
            assert!(FrequencyGrid::parse(bad, Units::Kappa0).is_err(), "{bad}");
        }
        let single = FrequencyGrid::parse("0:0:1", Units::Kappa0).unwrap();
        assert_eq!(single.omegas(&cfg()), vec![5.0]);
        let empty = FrequencyGrid::parse("0:1:0", Units::Kappa0).unwrap();
        assert!(empty.omegas(&cfg()).is_empty());
    }
}
