use num_complex::Complex64;
use proptest::prelude::*;

use omnr_core::dynamics::{build_bare, build_supermode, conjugation_defect, eigenvalues, CMatrix8, HALF};
use omnr_core::params::{derive_g_l, ChannelId, GlMode, PhysicalConfig};
use omnr_core::spectra::{
    spectra_at, susceptibility, sweep, thermal_spectrum, InputSpectra, SweepOptions, A_R, B1, B1_DAG, B2,
    B2_DAG,
};
use omnr_core::verify::DiffusionMatrix;

prop_compose! {
    fn config()(
        omega_m in 0.05f64..8.0,
        kappa_ex in 0.2f64..3.0,
        detune in -0.2f64..0.2,
        j_s in 0.0f64..1.0,
        j_m_frac in 0.0f64..0.01,
        gamma_0_frac in 0.0f64..1e-3,
        gamma_in_frac in 1e-6f64..1e-3,
        g_mag in 0.0f64..0.1,
        g_phase in 0.0f64..std::f64::consts::TAU,
        n_th in 0.0f64..1e5,
        two_resonators in any::<bool>(),
    ) -> PhysicalConfig {
        PhysicalConfig {
            omega_m,
            kappa_0: 1.0,
            kappa_ex,
            delta_0: omega_m * (1.0 + detune),
            j_s,
            j_m: j_m_frac * omega_m,
            gamma_0: gamma_0_frac * omega_m,
            gamma_in: gamma_in_frac * omega_m,
            g_r: Complex64::from_polar(g_mag * omega_m.min(1.0), g_phase),
            g_l_mode: GlMode::Derived,
            n_th,
            two_resonators,
        }
    }
}

fn two_resonator_config() -> impl Strategy<Value = PhysicalConfig> {
    config().prop_map(|c| PhysicalConfig {
        two_resonators: true,
        ..c
    })
}

/// Exchanges the two optical directions: indices 0 <-> 1 and 4 <-> 5.
fn swap_directions(m: &CMatrix8) -> CMatrix8 {
    let p = [1, 0, 2, 3, 5, 4, 6, 7];
    CMatrix8::from_fn(|i, j| m[(p[i], p[j])])
}

/// Bare matrix with the counter-rotating part of the mechanical coupling removed.
fn rotating_wave_bare(c: &PhysicalConfig) -> CMatrix8 {
    let mut m = build_bare(c).unwrap().m;
    for (i, j) in [(2, 7), (3, 6), (6, 3), (7, 2)] {
        m[(i, j)] = Complex64::new(0.0, 0.0);
    }
    m
}

/// `b_+- = (b_1 +- b_2)/sqrt(2)` on both halves of the doubled space.
fn mixing() -> CMatrix8 {
    let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut t = CMatrix8::identity();
    for base in [2, 2 + HALF] {
        t[(base, base)] = s;
        t[(base, base + 1)] = s;
        t[(base + 1, base)] = s;
        t[(base + 1, base + 1)] = -s;
    }
    t
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn doubled_space_symmetry(c in config()) {
        prop_assert_eq!(conjugation_defect(&build_bare(&c).unwrap().m), 0.0);
        if c.two_resonators {
            prop_assert_eq!(conjugation_defect(&build_supermode(&c).unwrap().m), 0.0);
        }
    }

    #[test]
    fn eigenvalues_in_conjugate_pairs(c in config()) {
        let ev = eigenvalues(&build_bare(&c).unwrap().m).unwrap();
        let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for z in &ev {
            let partner = ev.iter().map(|y| (y - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-9 * scale, "{z} has no partner");
        }
    }

    #[test]
    fn direction_exchange_symmetry(c in config(), g_l in (0.0f64..0.1, 0.0f64..6.3)) {
        let g_l = Complex64::from_polar(g_l.0, g_l.1);
        let fwd = PhysicalConfig { g_l_mode: GlMode::Explicit(g_l), ..c };
        let rev = PhysicalConfig { g_r: g_l, g_l_mode: GlMode::Explicit(c.g_r), ..c };
        let a = build_bare(&fwd).unwrap().m;
        let b = build_bare(&rev).unwrap().m;
        prop_assert_eq!(swap_directions(&a), b);
    }

    #[test]
    fn reciprocity_when_couplings_match(c in config(), dw in -0.5f64..0.5) {
        let c = PhysicalConfig { g_l_mode: GlMode::Explicit(c.g_r), ..c };
        let sys = build_bare(&c).unwrap();
        let w = c.omega_m + dw * c.kappa();
        if let Ok(p) = spectra_at(&sys, &c, w, InputSpectra::default()) {
            prop_assert!((p.t_r - p.t_l).abs() <= 1e-12 * p.t_r.max(1.0), "{} vs {}", p.t_r, p.t_l);
        }
    }

    #[test]
    fn supermode_is_rotating_wave_bare_in_mixed_basis(c in two_resonator_config()) {
        let t = mixing();
        let expected = t * rotating_wave_bare(&c) * t;
        let got = build_supermode(&c).unwrap().m;
        let scale = expected.iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!((got - expected).iter().all(|z| z.norm() <= 1e-14 * scale));
    }

    #[test]
    fn dark_mode_never_sees_common_reservoir(c in two_resonator_config()) {
        let sys = build_supermode(&c).unwrap();
        prop_assert_eq!(sys.input_weight(3, ChannelId::MechCommon), Complex64::new(0.0, 0.0));
        prop_assert_eq!(sys.input_weight(3 + HALF, ChannelId::MechCommon), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn diffusion_is_psd(c in config()) {
        prop_assert!(DiffusionMatrix::new(&build_bare(&c).unwrap()).is_psd());
        if c.two_resonators {
            prop_assert!(DiffusionMatrix::new(&build_supermode(&c).unwrap()).is_psd());
        }
    }

    #[test]
    fn inversion_residual(c in config(), dw in -0.2f64..0.2) {
        let sys = build_bare(&c).unwrap();
        if let Ok(u) = susceptibility(&sys, c.omega_m + dw) {
            // backward-stable LU: residual grows at most like eps * condition
            let r = u.residual(&sys.m);
            prop_assert!(r <= 64.0 * f64::EPSILON * u.condition, "{r} at condition {}", u.condition);
            if u.condition < 1e5 {
                prop_assert!(r < 1e-10);
            }
        }
    }

    #[test]
    fn interference_bound_and_path_identity(c in two_resonator_config(), dw in -0.05f64..0.05) {
        let sys = build_bare(&c).unwrap();
        let Ok(u) = susceptibility(&sys, c.omega_m + dw) else { return Ok(()); };
        let x = &u.u;
        let sq = |j: usize| x[(A_R, j)].norm_sqr();
        let kg0 = c.kappa_ex * c.gamma_0;
        let coherent = kg0 * (x[(A_R, B1)] + x[(A_R, B2)]).norm_sqr();
        let incoherent = 2.0 * kg0 * (sq(B1) + sq(B2));
        prop_assert!(coherent <= incoherent * (1.0 + 1e-12) + 1e-300);

        let th = thermal_spectrum(&u, &c).unwrap();
        let total = c.kappa_ex * c.gamma_m() * (sq(B1) + sq(B2) + sq(B1_DAG) + sq(B2_DAG));
        prop_assert!((th.s1 + th.s2 - total).abs() <= 1e-13 * total.max(f64::MIN_POSITIVE));
        prop_assert!(th.s_r_th <= 2.0 * (th.s1 + th.s2) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn spectral_densities_non_negative(c in config(), dw in -0.5f64..0.5) {
        let sys = build_bare(&c).unwrap();
        if let Ok(p) = spectra_at(&sys, &c, c.omega_m + dw, InputSpectra { s_r_in: 1.0, s_l_in: 1.0 }) {
            for s in [p.t_r, p.t_l, p.r_r, p.r_l, p.s_r_th, p.s_l_th, p.s_r_vac, p.s_l_vac, p.s_r_out, p.s_l_out] {
                prop_assert!(s >= -1e-14);
            }
        }
    }

    #[test]
    fn sweep_is_order_independent(c in config(), seed in any::<u64>()) {
        let sys = build_bare(&c).unwrap();
        let opts = SweepOptions { allow_unstable: true, ..Default::default() };
        let grid: Vec<f64> = (0..24).map(|k| c.omega_m - 0.3 + 0.025 * k as f64).collect();
        let mut shuffled = grid.clone();
        // Fisher-Yates driven by a small LCG
        let mut s = seed | 1;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let (Ok(a), Ok(b)) = (sweep(&sys, &c, &grid, opts), sweep(&sys, &c, &shuffled, opts)) else {
            return Ok(());
        };
        for p in &b.points {
            let q = a.points.iter().find(|q| q.omega == p.omega).unwrap();
            prop_assert_eq!(p, q);
        }
    }

    #[test]
    fn one_resonator_is_decoupled_two_resonator_block(c in config()) {
        let one = build_bare(&PhysicalConfig { two_resonators: false, ..c }).unwrap().m;
        let mut two = build_bare(&PhysicalConfig { two_resonators: true, j_m: 0.0, ..c }).unwrap().m;
        // drop the shared-reservoir cross damping between b_1 and b_2
        for (i, j) in [(2, 3), (3, 2), (6, 7), (7, 6)] {
            two[(i, j)] = Complex64::new(0.0, 0.0);
        }
        let keep = [0, 1, 2, 4, 5, 6];
        for &i in &keep {
            for &j in &keep {
                prop_assert_eq!(one[(i, j)], two[(i, j)], "entry ({}, {})", i, j);
            }
        }
    }

    #[test]
    fn derived_g_l_bound(c in config()) {
        let bound = c.j_s * c.g_r.norm() / (c.kappa() / 2.0);
        prop_assert!(derive_g_l(&c).norm() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn config_text_round_trip(c in config(), explicit in proptest::option::of((-1.0f64..1.0, -1.0f64..1.0))) {
        let c = PhysicalConfig {
            g_l_mode: explicit.map_or(GlMode::Derived, |(re, im)| GlMode::Explicit(Complex64::new(re, im))),
            ..c
        };
        prop_assert_eq!(PhysicalConfig::parse(&c.to_kv_string()).unwrap(), c);
    }
}
