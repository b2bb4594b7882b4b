use num_complex::Complex64;

use super::grid::{FrequencyGrid, Spacing, Span, Units};
use crate::dynamics::Basis;
use crate::params::{GlMode, PhysicalConfig};

/// Thermal occupation used by every preset; noise columns are normalized by it.
pub const PRESET_N_TH: f64 = 1e5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Fig2One,
    Fig2Two,
    Fig3,
    Fig4One,
    Fig4Two,
    Fig5Resolved,
    Fig5Unresolved,
}

impl PresetName {
    pub const ALL: [PresetName; 7] = [
        PresetName::Fig2One,
        PresetName::Fig2Two,
        PresetName::Fig3,
        PresetName::Fig4One,
        PresetName::Fig4Two,
        PresetName::Fig5Resolved,
        PresetName::Fig5Unresolved,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetName::Fig2One => "fig2_one",
            PresetName::Fig2Two => "fig2_two",
            PresetName::Fig3 => "fig3",
            PresetName::Fig4One => "fig4_one",
            PresetName::Fig4Two => "fig4_two",
            PresetName::Fig5Resolved => "fig5_resolved",
            PresetName::Fig5Unresolved => "fig5_unresolved",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.name() == s)
    }
}

/// Which drift-matrix basis (or both) a run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisChoice {
    Bare,
    Supermode,
    Both,
}

impl BasisChoice {
    pub fn bases(self) -> Vec<Basis> {
        match self {
            BasisChoice::Bare => vec![Basis::Bare],
            BasisChoice::Supermode => vec![Basis::Supermode],
            BasisChoice::Both => vec![Basis::Bare, Basis::Supermode],
        }
    }
}

#[derive(Debug, Clone)]
pub struct Preset {
    pub name: PresetName,
    pub config: PhysicalConfig,
    pub grid: FrequencyGrid,
    pub basis: BasisChoice,
    /// Columns a plot of this preset shows.
    pub outputs: &'static [&'static str],
}

/// Sideband-resolved parameters: `omega_m = 5`.
fn resolved(two_resonators: bool, j_s: f64) -> PhysicalConfig {
    PhysicalConfig {
        omega_m: 5.0,
        kappa_0: 1.0,
        kappa_ex: 1.0,
        delta_0: 5.0,
        j_s,
        j_m: 0.01,
        gamma_0: 5e-4,
        gamma_in: 5e-8,
        g_r: Complex64::new(0.1, 0.0),
        g_l_mode: GlMode::Derived,
        n_th: PRESET_N_TH,
        two_resonators,
    }
}

/// Sideband-unresolved parameters: `omega_m = 0.1`.
fn unresolved(two_resonators: bool, j_s: f64) -> PhysicalConfig {
    PhysicalConfig {
        omega_m: 0.1,
        kappa_0: 1.0,
        kappa_ex: 1.0,
        delta_0: 0.1,
        j_s,
        j_m: 0.0002,
        gamma_0: 1e-5,
        gamma_in: 1e-9,
        g_r: Complex64::new(0.01, 0.0),
        g_l_mode: GlMode::Derived,
        n_th: PRESET_N_TH,
        two_resonators,
    }
}

/// `+-60 gamma_m` clustered on `omega_m`, with coarse wings out to `+-wing`,
/// all expressed in `kappa_0`.
fn kappa_axis(cfg: &PhysicalConfig, wing: f64) -> FrequencyGrid {
    let core = 60.0 * cfg.gamma_m();
    FrequencyGrid::new(
        vec![
            Span {
                lo: -core,
                hi: core,
                points: 4001,
                spacing: Spacing::LogCluster {
                    width: 2.0 * cfg.gamma_m(),
                },
            },
            Span::linear(-wing, wing, 401),
        ],
        Units::Kappa0,
    )
}

fn gamma_axis(lo: f64, hi: f64) -> FrequencyGrid {
    FrequencyGrid::new(vec![Span::linear(lo, hi, 4001)], Units::GammaM)
}

const TRANSMISSION_AND_NOISE: &[&str] = &["T_R", "T_L", "S_R_out"];

pub fn preset(name: PresetName) -> Preset {
    let (config, grid, basis, outputs): (_, _, _, &'static [&'static str]) = match name {
        PresetName::Fig2One => {
            let c = resolved(false, 0.1);
            (c, kappa_axis(&c, 0.5), BasisChoice::Bare, TRANSMISSION_AND_NOISE)
        }
        PresetName::Fig2Two => {
            let c = resolved(true, 0.1);
            (c, kappa_axis(&c, 0.5), BasisChoice::Bare, TRANSMISSION_AND_NOISE)
        }
        PresetName::Fig3 => (
            resolved(true, 0.1),
            gamma_axis(-40.0, 0.0),
            BasisChoice::Both,
            &["S1", "S2", "S_plus", "S_minus", "S_R_th"],
        ),
        PresetName::Fig4One => {
            let c = unresolved(false, 0.1);
            (c, kappa_axis(&c, 0.5), BasisChoice::Bare, TRANSMISSION_AND_NOISE)
        }
        PresetName::Fig4Two => {
            let c = unresolved(true, 0.1);
            (c, kappa_axis(&c, 0.5), BasisChoice::Bare, TRANSMISSION_AND_NOISE)
        }
        PresetName::Fig5Resolved => (
            resolved(true, 1.0),
            gamma_axis(-40.0, 40.0),
            BasisChoice::Bare,
            &["T_R", "T_L", "isolation_db"],
        ),
        PresetName::Fig5Unresolved => (
            unresolved(true, 0.45),
            gamma_axis(-40.0, 40.0),
            BasisChoice::Bare,
            &["T_R", "T_L", "isolation_db"],
        ),
    };
    Preset {
        name,
        config,
        grid,
        basis,
        outputs,
    }
}

pub fn by_name(name: &str) -> Option<Preset> {
    PresetName::parse(name).map(preset)
}
