//! Acceptance suite: every numbered criterion at its stated tolerance, one
//! PASS/FAIL line per criterion (run with `--nocapture` to see them).

use engine::{
    erasure_cost_closed_form, run_cycle, theoretical_energy_trace, Backend, CycleConfig,
    CyclePulses, EngineParams, Step, Subsystem, Variant,
};
use metrology::{McExperiment, McMode, NoiseParams, WEIGHT_FEEDBACK_LABEL};
use nmr_sim::{MoleculeSpec, Relaxation};
use pulse_opt::{compile_cycle, gradient_fd_relative_error, CompileSettings, OptimizationProblem};
use qcore::{fidelity, UnitaryOp};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

const TEMPS: [f64; 3] = [1.33, 2.51, 10.91];

struct Criteria {
    results: Vec<(usize, bool, String, String)>,
}

impl Criteria {
    fn record(&mut self, n: usize, name: &str, ok: bool, detail: String) {
        self.results.push((n, ok, name.to_string(), detail));
    }

    fn finish(mut self) {
        self.results.sort_by_key(|r| r.0);
        let mut failed = 0;
        for (n, ok, name, detail) in &self.results {
            let verdict = if *ok { "PASS" } else { "FAIL" };
            println!("{verdict} criterion {n} ({name}): {detail}");
            if !ok {
                failed += 1;
            }
        }
        assert_eq!(failed, 0, "{failed} acceptance criteria failed");
    }
}

fn ideal_run(variant: Variant, kt: f64) -> engine::CycleRun {
    let params = EngineParams::standard(kt).unwrap();
    run_cycle(&CycleConfig::for_variant(variant), &params, Backend::Ideal).unwrap()
}

fn pulse_run(
    variant: Variant,
    kt: f64,
    molecule: &MoleculeSpec,
    pulses: &CyclePulses,
    relaxation: Relaxation,
) -> engine::CycleRun {
    let params = EngineParams::standard(kt).unwrap();
    let backend = Backend::Pulse { molecule, pulses, relaxation };
    run_cycle(&CycleConfig::for_variant(variant), &params, backend).unwrap()
}

/// Worst-case single-qubit Uhlmann fidelity between two runs over all steps
/// and subsystems.
fn min_reduced_fidelity(a: &engine::CycleRun, b: &engine::CycleRun) -> f64 {
    let mut min = 1.0f64;
    for step in Step::ALL {
        for sub in Subsystem::ALL {
            let f = fidelity(&a.reduced(step, sub), &b.reduced(step, sub)).unwrap();
            min = min.min(f);
        }
    }
    min
}

#[test]
fn acceptance() {
    let mut c = Criteria { results: Vec::new() };

    // 1: erasure energies at the three temperatures, closed form, < 1 s.
    {
        let t0 = Instant::now();
        let paper = [2.3, 1.9, 1.5];
        let mut ok = true;
        let mut costs = Vec::new();
        for (&kt, &quoted) in TEMPS.iter().zip(&paper) {
            let params = EngineParams::standard(kt).unwrap();
            let run = ideal_run(Variant::A, kt);
            let closed = erasure_cost_closed_form(&params);
            ok &= (run.ledger.erasure_cost - closed).abs() < 1e-6;
            ok &= (closed - quoted).abs() <= 0.1;
            costs.push(format!("{closed:.6}"));
        }
        let dt = t0.elapsed();
        ok &= dt.as_secs_f64() < 1.0;
        c.record(
            1,
            "erasure energies",
            ok,
            format!("{{{}}} peV in {:.0} ms", costs.join(", "), dt.as_secs_f64() * 1e3),
        );
    }

    // 2: weight gains exactly one lifting quantum, near the measured ~2.5 peV.
    {
        let params = EngineParams::standard(1.33).unwrap();
        let run = ideal_run(Variant::A, 1.33);
        let gain = run.ledger.weight_work_gain;
        let gap = params.gap();
        let ok = (gain - gap).abs() < 1e-9 && (gain - 2.5).abs() <= 0.2;
        c.record(
            2,
            "weight work gain",
            ok,
            format!("gain {gain:.6} peV vs 2ℏω {gap:.6} peV (measured reference ≈ 2.5 peV)"),
        );
    }

    // 3: weight entropy flat across feedback; noisy kT·ΔS small.
    {
        let mut ok = true;
        let mut worst_ideal = 0.0f64;
        let mut worst_noisy = 0.0f64;
        for kt in TEMPS {
            let run = ideal_run(Variant::A, kt);
            let ds = run.ledger.weight_entropy_change_feedback_nats;
            worst_ideal = worst_ideal.max(ds.abs());
            ok &= ds.abs() < 1e-9;

            let params = EngineParams::standard(kt).unwrap();
            let exp = McExperiment {
                config: CycleConfig::for_variant(Variant::A),
                params,
                mode: McMode::Ideal,
            };
            let bars =
                metrology::monte_carlo_errorbars(&exp, &NoiseParams::calibrated(), 200, 5).unwrap();
            let kt_ds = bars
                .iter()
                .find(|b| b.label == WEIGHT_FEEDBACK_LABEL)
                .map(|b| b.mean)
                .unwrap();
            worst_noisy = worst_noisy.max(kt_ds.abs());
            ok &= kt_ds.abs() <= 0.2;
        }
        c.record(
            3,
            "weight entropy across feedback",
            ok,
            format!(
                "ideal |ΔS| ≤ {worst_ideal:.2e} nats, calibrated-noise |kT·ΔS| ≤ {worst_noisy:.4} peV"
            ),
        );
    }

    // 5 first (it owns the compilation the other pulse criteria reuse).
    let t_compile = Instant::now();
    let molecule = MoleculeSpec::synthetic4();
    let params133 = EngineParams::standard(1.33).unwrap();
    let (pulses, compile_report) =
        compile_cycle(&molecule, &params133, &CompileSettings::defaults(42)).unwrap();
    {
        let mut min_fid = 1.0f64;
        for variant in [Variant::A, Variant::B, Variant::C, Variant::D] {
            let ideal = ideal_run(variant, 1.33);
            let pulsed = pulse_run(variant, 1.33, &molecule, &pulses, Relaxation::Off);
            min_fid = min_fid.min(min_reduced_fidelity(&ideal, &pulsed));
        }
        let dt = t_compile.elapsed();
        let ok = min_fid >= 0.999 && dt.as_secs_f64() < 600.0;
        let worst_gate = compile_report
            .gates
            .iter()
            .map(|g| g.fidelity)
            .fold(1.0f64, f64::min);
        c.record(
            5,
            "pulse-mode state fidelities",
            ok,
            format!(
                "min state fidelity {min_fid:.6} over variants a-d (gate fidelities ≥ {worst_gate:.6}) in {:.0} s incl. compilation",
                dt.as_secs_f64()
            ),
        );
    }

    // 4: isolation, variant d: flat energies ideal (1e-9) and pulse (0.05).
    {
        let flatness = |run: &engine::CycleRun| -> f64 {
            let mut worst = 0.0f64;
            for sub in Subsystem::ALL {
                let first = run.ledger.energy(Step::Init, sub);
                for step in Step::ALL {
                    worst = worst.max((run.ledger.energy(step, sub) - first).abs());
                }
            }
            worst
        };
        let ideal_dev = flatness(&ideal_run(Variant::D, 1.33));
        let pulse_dev = flatness(&pulse_run(
            Variant::D,
            1.33,
            &molecule,
            &pulses,
            Relaxation::Off,
        ));
        let ok = ideal_dev < 1e-9 && pulse_dev < 0.05;
        c.record(
            4,
            "variant d isolation",
            ok,
            format!("energy drift: ideal {ideal_dev:.2e} peV, pulse {pulse_dev:.4} peV"),
        );
    }

    // 6: three routes to the erasure cost agree at random temperatures.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let kt = rng.gen_range(0.1..100.0);
            let params = EngineParams::standard(kt).unwrap();
            let run = ideal_run(Variant::A, kt);
            let a = run.ledger.erasure_cost;
            let b = run.ledger.measurement_memory_drop;
            let d = params.gap() * params.ground_population();
            worst = worst.max((a - b).abs()).max((a - d).abs()).max((b - d).abs());
        }
        c.record(
            6,
            "ledger identity",
            worst < 1e-9,
            format!("max spread between the three routes {worst:.2e} peV over 50 temperatures"),
        );
    }

    // 7: executor energies match the closed-form trace at random temperatures.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(321);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let kt = rng.gen_range(0.1..100.0);
            let params = EngineParams::standard(kt).unwrap();
            let cfg = CycleConfig::for_variant(Variant::A);
            let run = run_cycle(&cfg, &params, Backend::Ideal).unwrap();
            let theory = theoretical_energy_trace(&cfg, &params).unwrap();
            for (si, &step) in Step::ALL.iter().enumerate() {
                for sub in Subsystem::ALL {
                    worst = worst
                        .max((run.ledger.energy(step, sub) - theory[si][sub.index()]).abs());
                }
            }
        }
        c.record(
            7,
            "theory-trace oracle",
            worst < 1e-9,
            format!("max |executor - closed form| {worst:.2e} peV over 50 temperatures"),
        );
    }

    // 8: analytic gradient vs finite differences on random 2-spin problems.
    {
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        let mut worst = 0.0f64;
        for i in 0..10 {
            let offsets = vec![
                rng.gen_range(-3000.0..3000.0),
                rng.gen_range(-3000.0..3000.0),
            ];
            let j = rng.gen_range(20.0..80.0);
            let m = MoleculeSpec::new(offsets, 0.0, &[(0, 1, j)], vec![10.0; 2], vec![1.0; 2])
                .unwrap();
            let rot = |rng: &mut ChaCha8Rng| {
                engine::rotation_axis(
                    rng.gen_range(0.0..std::f64::consts::PI),
                    rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
                )
            };
            let target = UnitaryOp::new(qcore::kron(&rot(&mut rng), &rot(&mut rng))).unwrap();
            let mut problem = OptimizationProblem::new(m, target, 5e-3, 40);
            problem.seed = 1000 + i;
            let err = gradient_fd_relative_error(&problem).unwrap();
            worst = worst.max(err);
        }
        c.record(
            8,
            "optimizer gradient check",
            worst < 1e-4,
            format!("max relative error {worst:.2e} over 10 random 2-spin problems"),
        );
    }

    // 9: relaxation (T1 = 10 s, T2 = 1 s) barely dents a ~0.14 s sequence.
    {
        let mut min_fid = 1.0f64;
        for variant in [Variant::A, Variant::B, Variant::C, Variant::D] {
            let ideal = ideal_run(variant, 1.33);
            let relaxed = pulse_run(variant, 1.33, &molecule, &pulses, Relaxation::On);
            min_fid = min_fid.min(min_reduced_fidelity(&ideal, &relaxed));
        }
        c.record(
            9,
            "relaxation scale",
            min_fid >= 0.99,
            format!(
                "min state fidelity {min_fid:.6} with relaxation on over a {:.3} s sequence",
                pulses.total_duration()
            ),
        );
    }

    // 10: the calibrated noise setting yields 0.1 +/- 0.05 peV energy bars.
    {
        let exp = McExperiment {
            config: CycleConfig::for_variant(Variant::A),
            params: params133,
            mode: McMode::Ideal,
        };
        let bars =
            metrology::monte_carlo_errorbars(&exp, &NoiseParams::calibrated(), 300, 11).unwrap();
        let energies: Vec<f64> = bars
            .iter()
            .filter(|b| b.label.starts_with("energy:"))
            .map(|b| b.std)
            .collect();
        let lo = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = energies.iter().copied().fold(0.0f64, f64::max);
        let ok = energies.len() == 20 && lo >= 0.05 && hi <= 0.15;
        c.record(
            10,
            "Monte Carlo calibration",
            ok,
            format!("{} energy bars within [{lo:.4}, {hi:.4}] peV (target 0.1 ± 0.05)", energies.len()),
        );
    }

    c.finish();
}
