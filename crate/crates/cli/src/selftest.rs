//! `szilard selftest`: closed-form oracle suite plus the pinned Monte Carlo
//! calibration, one PASS/FAIL line per check.

use crate::{CliError, Result};
use engine::{
    alpha_for_temperature, erasure_cost_closed_form, run_cycle, theoretical_energy_trace, Backend,
    CycleConfig, EngineParams, Step, Subsystem, Variant,
};
use metrology::{McExperiment, McMode, NoiseParams};
use qcore::{von_neumann_entropy, DensityMatrix};

/// (kT peV, ground population, erasure cost peV, thermalization angle rad).
const GIBBS_ORACLE: [(f64, f64, f64, f64); 3] = [
    (1.33, 0.8786368980846981, 2.3133172483715003, 0.7116676426708347),
    (2.51, 0.7405719432248065, 1.9498132319009422, 1.0688372302364855),
    (10.91, 0.5600399698855059, 1.4745000180822236, 1.450425922379137),
];

const ENTROPY_ORACLE: f64 = 0.36968535132718383;
const TWO_HBAR_OMEGA: f64 = 2.6328478276;

struct Tally {
    failed: usize,
}

impl Tally {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        if ok {
            println!("PASS {name}: {detail}");
        } else {
            self.failed += 1;
            println!("FAIL {name}: {detail}");
        }
    }
}

pub fn cmd_selftest() -> Result<()> {
    let mut t = Tally { failed: 0 };

    for (kt, p_g, erase, alpha) in GIBBS_ORACLE {
        let params = EngineParams::standard(kt)?;
        let got = params.ground_population();
        t.check(
            &format!("gibbs_population kT={kt}"),
            (got - p_g).abs() < 1e-12,
            format!("p_ground {got:.16} vs {p_g:.16}"),
        );
        let got = erasure_cost_closed_form(&params);
        t.check(
            &format!("erasure_closed_form kT={kt}"),
            (got - erase).abs() < 1e-12,
            format!("{got:.16} vs {erase:.16} peV"),
        );
        let got = alpha_for_temperature(&params);
        t.check(
            &format!("thermalization_angle kT={kt}"),
            (got - alpha).abs() < 1e-12,
            format!("{got:.16} vs {alpha:.16} rad"),
        );
    }

    let rho = DensityMatrix::from_probabilities(&[0.87861, 0.12139]).map_err(CliError::from)?;
    let s = von_neumann_entropy(&rho);
    t.check(
        "binary_entropy",
        (s - ENTROPY_ORACLE).abs() < 1e-12,
        format!("{s:.17} vs {ENTROPY_ORACLE:.17} nats"),
    );

    for variant in [Variant::A, Variant::B, Variant::C] {
        for (kt, ..) in GIBBS_ORACLE {
            let params = EngineParams::standard(kt)?;
            let cfg = CycleConfig::for_variant(variant);
            let run = run_cycle(&cfg, &params, Backend::Ideal)?;
            let gain = run.ledger.weight_work_gain;
            t.check(
                &format!("weight_gain variant={} kT={kt}", variant.label()),
                (gain - TWO_HBAR_OMEGA).abs() < 1e-9,
                format!("{gain:.10} vs 2ℏω = {TWO_HBAR_OMEGA:.10} peV"),
            );
            let erase = run.ledger.erasure_cost;
            let closed = erasure_cost_closed_form(&params);
            t.check(
                &format!("erasure_ledger variant={} kT={kt}", variant.label()),
                (erase - closed).abs() < 1e-9,
                format!("ledger {erase:.12} vs closed form {closed:.12} peV"),
            );
            let theory = theoretical_energy_trace(&cfg, &params)?;
            let mut worst: f64 = 0.0;
            for (si, &step) in Step::ALL.iter().enumerate() {
                for sub in Subsystem::ALL {
                    worst = worst.max((run.ledger.energy(step, sub) - theory[si][sub.index()]).abs());
                }
            }
            t.check(
                &format!("theory_trace variant={} kT={kt}", variant.label()),
                worst < 1e-9,
                format!("max |ledger - theory| = {worst:.3e} peV"),
            );
        }
    }

    // Variant d never thermalizes; every subsystem must hold +ℏω throughout.
    {
        let params = EngineParams::standard(1.33)?;
        let run = run_cycle(&CycleConfig::for_variant(Variant::D), &params, Backend::Ideal)?;
        let mut worst: f64 = 0.0;
        for step in Step::ALL {
            for sub in Subsystem::ALL {
                worst = worst.max((run.ledger.energy(step, sub) - params.hbar_omega()).abs());
            }
        }
        t.check(
            "variant_d_fixed_point",
            worst < 1e-9,
            format!("max |E - ℏω| = {worst:.3e} peV"),
        );
    }

    // Pinned calibration: the noise model is tuned so every per-step,
    // per-subsystem energy bar lands at 0.1 +/- 0.05 peV.
    {
        let params = EngineParams::standard(1.33)?;
        let exp = McExperiment {
            config: CycleConfig::for_variant(Variant::A),
            params,
            mode: McMode::Ideal,
        };
        let bars = metrology::monte_carlo_errorbars(&exp, &NoiseParams::calibrated(), 300, 11)?;
        let energies: Vec<_> = bars.iter().filter(|b| b.label.starts_with("energy:")).collect();
        let lo = energies.iter().map(|b| b.std).fold(f64::INFINITY, f64::min);
        let hi = energies.iter().map(|b| b.std).fold(0.0f64, f64::max);
        t.check(
            "mc_calibration",
            energies.len() == 20 && lo >= 0.05 && hi <= 0.15,
            format!("{} energy bars in [{lo:.4}, {hi:.4}] peV (want within [0.05, 0.15])", energies.len()),
        );
    }

    if t.failed > 0 {
        return Err(CliError::Internal(format!("{} selftest check(s) failed", t.failed)));
    }
    println!("selftest: all checks passed");
    Ok(())
}
