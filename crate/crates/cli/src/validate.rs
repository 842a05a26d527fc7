//! Named verification suites behind the `validate` subcommand.
//!
//! Each check records its expected value, the computed value and the
//! tolerance so the report is machine-readable: one CSV line per check.

use hybridlink::presets::{self, db_to_linear, Turbulence};
use hybridlink::specfun::{
    fox_h, fox_h_with_plan, gamma, meijer_g, plan_contour, FoxHParams, MeijerGParams,
};
use hybridlink::{DetectionType, HybridLink, ModulationSpec};

pub struct Check {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    /// Relative tolerance.
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        if self.expected == 0.0 {
            // bound check: the computed quantity must stay below tolerance
            self.got.abs() <= self.tolerance
        } else {
            (self.got - self.expected).abs() <= self.tolerance * self.expected.abs()
        }
    }
}

pub fn report_lines(checks: &[Check]) -> String {
    let mut out = String::from("name,expected,got,tolerance,status\n");
    for c in checks {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.3e},{}\n",
            c.name,
            c.expected,
            c.got,
            c.tolerance,
            if c.passed() { "pass" } else { "FAIL" }
        ));
    }
    out
}

pub fn suite(name: &str) -> Result<Vec<Check>, String> {
    match name {
        "identities" => Ok(identities()),
        "mixtures" => Ok(mixtures()),
        "oracles" => Ok(oracles()),
        "paper-values" => Ok(paper_values()),
        "all" => {
            let mut all = identities();
            all.extend(mixtures());
            all.extend(oracles());
            all.extend(paper_values());
            Ok(all)
        }
        other => Err(format!(
            "unknown suite `{other}` (expected identities|mixtures|oracles|paper-values|all)"
        )),
    }
}

fn identities() -> Vec<Check> {
    let mut checks = Vec::new();

    let exp_params = MeijerGParams::new(1, 0, vec![], vec![0.0]).unwrap();
    for &z in &[0.1f64, 1.0, 10.0] {
        checks.push(Check {
            name: format!("meijer_g_exp_reduction_z{z}"),
            expected: (-z).exp(),
            got: meijer_g(&exp_params, z).unwrap_or(f64::NAN),
            tolerance: 1e-10,
        });
    }
    for m in 1..=3i32 {
        let params = MeijerGParams::new(1, 1, vec![1.0 - m as f64], vec![0.0]).unwrap();
        for &z in &[0.1f64, 1.0, 10.0] {
            checks.push(Check {
                name: format!("meijer_g_binomial_reduction_m{m}_z{z}"),
                expected: gamma(m as f64) * (1.0 + z).powi(-m),
                got: meijer_g(&params, z).unwrap_or(f64::NAN),
                tolerance: 1e-10,
            });
        }
    }

    // Fox-H with unit coefficients reduces to Meijer-G (seeded draws)
    let mut state = 0x1d3a_7157_u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut drawn = 0;
    while drawn < 20 {
        let b0 = next() * 1.5;
        let b1 = b0 + 0.3 + next();
        let a0 = 1.0 + next();
        let z = 0.2 + 2.0 * next();
        let Ok(g_params) = MeijerGParams::new(2, 1, vec![a0, a0 + 1.0], vec![b0, b1]) else {
            continue;
        };
        let h_params = FoxHParams::new(
            2,
            1,
            vec![(a0, 1.0), (a0 + 1.0, 1.0)],
            vec![(b0, 1.0), (b1, 1.0)],
        )
        .unwrap();
        checks.push(Check {
            name: format!("fox_h_unit_coefficient_reduction_{drawn}"),
            expected: meijer_g(&g_params, z).unwrap_or(f64::NAN),
            got: fox_h(&h_params, z).unwrap_or(f64::NAN),
            tolerance: 1e-9,
        });
        drawn += 1;
    }

    // contour-shift invariance on a BER kernel
    let params = FoxHParams::new(
        4,
        1,
        vec![(0.5, 1.0), (1.0, 1.0), (2.0, 1.0)],
        vec![(0.0, 1.0), (1.0, 1.0), (2.064, 1.0), (1.342, 1.0)],
    )
    .unwrap();
    for &z in &[0.05, 0.7] {
        let plan = plan_contour(&params, z).unwrap();
        let base = fox_h_with_plan(&params, z, plan.clone()).unwrap_or(f64::NAN);
        let (lo, hi) = params.pole_strip();
        for &shift in &[-0.1, 0.1] {
            let mut moved = plan.clone();
            moved.abscissa = (plan.abscissa + shift).clamp(
                lo + 0.2 * (plan.abscissa - lo),
                hi - 0.2 * (hi - plan.abscissa),
            );
            checks.push(Check {
                name: format!("contour_shift_invariance_z{z}_shift{shift}"),
                expected: base,
                got: fox_h_with_plan(&params, z, moved).unwrap_or(f64::NAN),
                tolerance: 1e-8,
            });
        }
    }

    checks
}

fn mixtures() -> Vec<Check> {
    let mut checks = Vec::new();
    for (kappa, mu, m) in [(5.0, 1u32, 2u32), (10.0, 2, 1), (1.0, 1, 1), (2.0, 3, 4)] {
        let params = hybridlink::RfParams::new(kappa, mu, m, 1.0).unwrap();
        let mix = params.mixture();
        let weight_sum: f64 = mix.components.iter().map(|c| c.weight).sum();
        checks.push(Check {
            name: format!("mixture_weight_sum_k{kappa}_mu{mu}_m{m}"),
            expected: 1.0,
            got: weight_sum,
            tolerance: 1e-12,
        });
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let g = 1e-3 * (20.0f64 / 1e-3).powf(i as f64 / 49.0);
            let direct = params.pdf_hypergeometric(g).unwrap();
            let via_mix = mix.pdf(g).unwrap();
            worst = worst.max((direct - via_mix).abs() / direct.abs().max(1e-300));
        }
        checks.push(Check {
            name: format!("mixture_pdf_max_rel_dev_k{kappa}_mu{mu}_m{m}"),
            expected: 0.0,
            got: worst,
            tolerance: 1e-10,
        });
    }
    checks
}

fn oracles() -> Vec<Check> {
    let mut checks = Vec::new();
    let mu = db_to_linear(20.0);
    let rf = presets::rician_shadowed(db_to_linear(10.0));

    // closed-form BER vs the unified CDF quadrature
    for (turb, det, spec, label) in [
        (
            Turbulence::Strong,
            DetectionType::ImDd,
            ModulationSpec::ook(),
            "strong_imdd_ook",
        ),
        (
            Turbulence::Strong,
            DetectionType::Hd,
            ModulationSpec::psk(2).unwrap(),
            "strong_hd_bpsk",
        ),
        (
            Turbulence::Moderate,
            DetectionType::Hd,
            ModulationSpec::qam(16).unwrap(),
            "moderate_hd_16qam",
        ),
        (
            Turbulence::Weak,
            DetectionType::Hd,
            ModulationSpec::psk(4).unwrap(),
            "weak_hd_qpsk",
        ),
    ] {
        let ch = turb.channel(1.0, det, mu);
        checks.push(Check {
            name: format!("fso_ber_vs_quadrature_{label}"),
            expected: spec.avg_ber_from_cdf(|g| ch.cdf(g)).unwrap_or(f64::NAN),
            got: ch.avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 1e-6,
        });
        let link = HybridLink::new(ch, rf.clone());
        checks.push(Check {
            name: format!("sc_ber_vs_quadrature_{label}"),
            expected: spec
                .avg_ber_from_cdf(|g| link.sc_cdf(g))
                .unwrap_or(f64::NAN),
            got: link.sc_avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 1e-6,
        });
    }

    for (params, label) in [
        (
            presets::rician_shadowed(db_to_linear(10.0)),
            "rician_shadowed",
        ),
        (presets::kappa_mu_shadowed(db_to_linear(20.0)), "kappa_mu"),
    ] {
        let mix = params.mixture();
        for (spec, mod_label) in [
            (ModulationSpec::ook(), "ook"),
            (ModulationSpec::psk(2).unwrap(), "bpsk"),
        ] {
            checks.push(Check {
                name: format!("rf_ber_vs_quadrature_{label}_{mod_label}"),
                expected: spec.avg_ber_from_cdf(|g| mix.cdf(g)).unwrap_or(f64::NAN),
                got: mix.avg_ber(&spec).unwrap_or(f64::NAN),
                tolerance: 1e-6,
            });
        }
    }

    // bivariate MRC CDF vs the convolution oracle
    let link = HybridLink::new(
        Turbulence::Moderate.channel(1.0, DetectionType::Hd, db_to_linear(10.0)),
        presets::rician_shadowed(db_to_linear(10.0)),
    );
    for &g in &[2.0, 5.0, 10.0] {
        checks.push(Check {
            name: format!("mrc_cdf_vs_convolution_g{g}"),
            expected: link.mrc_cdf_oracle(g).unwrap_or(f64::NAN),
            got: link.mrc_cdf(g).unwrap_or(f64::NAN),
            tolerance: 1e-5,
        });
    }

    checks
}

fn paper_values() -> Vec<Check> {
    let mut checks = Vec::new();

    // single FSO, strong turbulence, 20 dB
    let mu = db_to_linear(20.0);
    for (det, spec, label, want) in [
        (DetectionType::ImDd, ModulationSpec::ook(), "ook", 7.48e-2),
        (
            DetectionType::Hd,
            ModulationSpec::psk(2).unwrap(),
            "bpsk",
            7.05e-3,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::psk(4).unwrap(),
            "qpsk",
            1.29e-2,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::qam(16).unwrap(),
            "16qam",
            4.09e-2,
        ),
    ] {
        let ch = Turbulence::Strong.channel(1.0, det, mu);
        checks.push(Check {
            name: format!("paper_fso_strong_20db_{label}"),
            expected: want,
            got: ch.avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 0.02,
        });
    }

    // single RF, kappa-mu shadowed, 20 dB
    let mix = presets::kappa_mu_shadowed(db_to_linear(20.0)).mixture();
    for (spec, label, want) in [
        (ModulationSpec::ook(), "ook", 1.25e-3),
        (ModulationSpec::psk(2).unwrap(), "bpsk", 3.63e-4),
        (ModulationSpec::psk(4).unwrap(), "qpsk", 1.25e-3),
        (ModulationSpec::qam(16).unwrap(), "16qam", 1.12e-2),
    ] {
        checks.push(Check {
            name: format!("paper_rf_20db_{label}"),
            expected: want,
            got: mix.avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 0.02,
        });
    }

    // hybrid regressions; the published values correspond to an RF branch
    // at 10 dB (their reported 15 dB label does not reproduce them)
    let rf = presets::rician_shadowed(db_to_linear(10.0));
    for (det, spec, label, want) in [
        (DetectionType::ImDd, ModulationSpec::ook(), "ook", 5.60e-3),
        (
            DetectionType::Hd,
            ModulationSpec::psk(2).unwrap(),
            "bpsk",
            2.92e-4,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::psk(4).unwrap(),
            "qpsk",
            1.12e-3,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::qam(16).unwrap(),
            "16qam",
            1.29e-2,
        ),
    ] {
        let link = HybridLink::new(
            Turbulence::Strong.channel(1.0, det, db_to_linear(20.0)),
            rf.clone(),
        );
        checks.push(Check {
            name: format!("paper_mrc_strong_20db_{label}"),
            expected: want,
            got: link.mrc_avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 0.05,
        });
    }
    for (det, spec, label, want) in [
        (DetectionType::ImDd, ModulationSpec::ook(), "ook", 1.85e-3),
        (
            DetectionType::Hd,
            ModulationSpec::psk(2).unwrap(),
            "bpsk",
            2.78e-5,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::psk(4).unwrap(),
            "qpsk",
            1.15e-4,
        ),
        (
            DetectionType::Hd,
            ModulationSpec::qam(16).unwrap(),
            "16qam",
            1.46e-3,
        ),
    ] {
        let link = HybridLink::new(
            Turbulence::Weak.channel(1.0, det, db_to_linear(30.0)),
            rf.clone(),
        );
        checks.push(Check {
            name: format!("paper_sc_weak_30db_{label}"),
            expected: want,
            got: link.sc_avg_ber(&spec).unwrap_or(f64::NAN),
            tolerance: 0.03,
        });
    }

    checks
}
