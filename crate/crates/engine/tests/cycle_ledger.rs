use engine::{
    alpha_for_temperature, erasure_cost_closed_form, ideal_gate_unitary, run_cycle, thermal_state,
    theoretical_energy_trace, theoretical_reduced_states, Backend, CycleConfig, CycleGateId,
    EngineParams, Step, Subsystem, Variant,
};
use proptest::prelude::*;
use qcore::{fidelity, DensityMatrix};

const HBAR_OMEGA: f64 = 1.3164239138;

fn run_ideal(kt: f64) -> engine::CycleRun {
    let params = EngineParams::standard(kt).unwrap();
    let config = CycleConfig::for_variant(Variant::A);
    run_cycle(&config, &params, Backend::Ideal).unwrap()
}

#[test]
fn alpha_matches_pinned_values() {
    // alpha = 2 arccos(sqrt(p_ground)), evaluated independently.
    for (kt, want) in [
        (1.33, 0.7116676426708347),
        (2.51, 1.0688372302364855),
        (10.91, 1.450425922379137),
    ] {
        let params = EngineParams::standard(kt).unwrap();
        assert!((alpha_for_temperature(&params) - want).abs() < 1e-12, "kt={kt}");
    }
}

#[test]
fn thermal_state_populations() {
    for (kt, p) in [
        (1.33, 0.8786368980846981),
        (2.51, 0.7405719432248065),
        (10.91, 0.5600399698855059),
    ] {
        let params = EngineParams::standard(kt).unwrap();
        let rho = thermal_state(&params);
        assert!((rho.populations()[0] - p).abs() < 1e-12, "kt={kt}");
    }
}

#[test]
fn rx_then_dephase_reaches_gibbs() {
    // Rx(alpha) on a pure ground state followed by full dephasing must land
    // exactly on the Gibbs state; the cycle relies on this identity.
    let params = EngineParams::standard(2.51).unwrap();
    let run = run_ideal(2.51);
    let p = run.reduced(Step::Thermalization, Subsystem::Particle);
    let gibbs = thermal_state(&params);
    assert!(qcore::max_abs_diff(p.matrix(), gibbs.matrix()) < 1e-12);
}

#[test]
fn ledger_matches_theory_trace() {
    for kt in [1.33, 2.51, 10.91, 0.2, 50.0] {
        let params = EngineParams::standard(kt).unwrap();
        let config = CycleConfig::for_variant(Variant::B);
        let run = run_cycle(&config, &params, Backend::Ideal).unwrap();
        let theory = theoretical_energy_trace(&config, &params).unwrap();
        for (record, expected) in run.ledger.steps.iter().zip(&theory) {
            for q in 0..4 {
                assert!(
                    (record.energy[q] - expected[q]).abs() < 1e-9,
                    "kt={kt} step={:?} q={q}: {} vs {}",
                    record.step,
                    record.energy[q],
                    expected[q]
                );
            }
        }
    }
}

#[test]
fn reduced_states_match_theory() {
    let params = EngineParams::standard(1.33).unwrap();
    let config = CycleConfig::for_variant(Variant::A);
    let run = run_cycle(&config, &params, Backend::Ideal).unwrap();
    let theory = theoretical_reduced_states(&config, &params).unwrap();
    for (i, &step) in Step::ALL.iter().enumerate() {
        for sub in Subsystem::ALL {
            let got = run.reduced(step, sub);
            let want = &theory[i][sub.index()];
            assert!(
                fidelity(&got, want).unwrap() > 1.0 - 1e-10,
                "step={step:?} sub={sub:?}"
            );
        }
    }
}

#[test]
fn ledger_identities_three_routes() {
    // erasure cost == measurement memory drop == closed form, computed three
    // independent ways.
    for kt in [1.33, 2.51, 10.91] {
        let params = EngineParams::standard(kt).unwrap();
        let run = run_ideal(kt);
        let closed = erasure_cost_closed_form(&params);
        assert!((run.ledger.erasure_cost - closed).abs() < 1e-9, "kt={kt}");
        assert!(
            (run.ledger.measurement_memory_drop - closed).abs() < 1e-9,
            "kt={kt}"
        );
        let x = HBAR_OMEGA * (params.omega() / 2000.0) / kt;
        assert!((closed - HBAR_OMEGA * (1.0 + x.tanh())).abs() < 1e-9, "kt={kt}");
    }
}

#[test]
fn pinned_erasure_costs() {
    for (kt, want) in [
        (1.33, 2.3133172483715003),
        (2.51, 1.9498132319009422),
        (10.91, 1.4745000180822236),
    ] {
        let params = EngineParams::standard(kt).unwrap();
        assert!((erasure_cost_closed_form(&params) - want).abs() < 1e-12, "kt={kt}");
    }
}

#[test]
fn weight_gains_full_gap_deterministically() {
    for kt in [0.0, 1.33, 10.91, 1000.0] {
        let run = run_ideal(kt);
        assert!((run.ledger.weight_work_gain - 2.0 * HBAR_OMEGA).abs() < 1e-9, "kt={kt}");
        // W ends exactly excited: the feedback is deterministic.
        let w = run.reduced(Step::Feedback, Subsystem::Weight);
        assert!((w.populations()[1] - 1.0).abs() < 1e-10, "kt={kt}");
    }
}

#[test]
fn memory_unchanged_by_feedback() {
    let run = run_ideal(2.51);
    let before = run.reduced(Step::Measurement, Subsystem::Memory);
    let after = run.reduced(Step::Feedback, Subsystem::Memory);
    assert!(qcore::max_abs_diff(before.matrix(), after.matrix()) < 1e-10);
}

#[test]
fn final_state_is_product_with_reset_memory() {
    // After erasure M is back in its reference (excited) state and the
    // measurement record has moved to A.
    let run = run_ideal(1.33);
    let m = run.reduced(Step::Erasure, Subsystem::Memory);
    assert!((m.populations()[1] - 1.0).abs() < 1e-10);
    let a = run.reduced(Step::Erasure, Subsystem::Ancilla);
    let m_before = run.reduced(Step::Feedback, Subsystem::Memory);
    assert!(qcore::max_abs_diff(a.matrix(), m_before.matrix()) < 1e-10);
    // Whole register is diagonal -> purity of the full state equals the
    // product of subsystem purities only if it is a product state.
    let full = run.state_after(Step::Erasure);
    let product: f64 = Subsystem::ALL
        .iter()
        .map(|&s| run.reduced(Step::Erasure, s).purity())
        .product();
    assert!((full.purity() - product).abs() < 1e-9);
}

#[test]
fn variant_d_is_fixed_point() {
    // All-excited with no thermalization: every gate acts trivially on the
    // populations, so the energy trace is flat at +hw for every subsystem.
    let params = EngineParams::standard(2.51).unwrap();
    let config = CycleConfig::for_variant(Variant::D);
    let run = run_cycle(&config, &params, Backend::Ideal).unwrap();
    assert_eq!(run.ledger.steps.len(), 5);
    for record in &run.ledger.steps {
        for q in 0..4 {
            assert!((record.energy[q] - HBAR_OMEGA).abs() < 1e-9, "{:?}", record.step);
        }
    }
    assert!(theoretical_energy_trace(&config, &params).is_err());
}

#[test]
fn entropy_variation_weight_feedback_is_zero_ideal() {
    // The weight goes pure ground -> pure excited: zero entropy change.
    let run = run_ideal(1.33);
    assert!(run.ledger.weight_entropy_change_feedback_nats.abs() < 1e-9);
    assert!(run.ledger.entropy_variation_weight_feedback.abs() < 1e-9);
}

#[test]
fn gate_unitaries_are_involutions_except_rx() {
    let params = EngineParams::standard(1.33).unwrap();
    for id in [
        CycleGateId::MeasureCnot,
        CycleGateId::FeedbackCswap,
        CycleGateId::EraseSwap,
    ] {
        let u = ideal_gate_unitary(id, &params);
        let sq = u.compose(&u).unwrap();
        assert!(
            qcore::max_abs_diff(sq.matrix(), &qcore::identity(16)) < 1e-10,
            "{id:?}"
        );
    }
}

#[test]
fn pulse_backend_missing_pulse_errors() {
    let params = EngineParams::standard(1.33).unwrap();
    let config = CycleConfig::for_variant(Variant::A);
    let molecule = nmr_sim::MoleculeSpec::synthetic4();
    let pulses = engine::CyclePulses::new();
    let backend = Backend::Pulse {
        molecule: &molecule,
        pulses: &pulses,
        relaxation: nmr_sim::Relaxation::Off,
    };
    let err = run_cycle(&config, &params, backend).unwrap_err();
    assert!(matches!(err, engine::EngineError::MissingPulse(_)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ledger_identities_hold_over_temperature(kt in 0.1f64..100.0) {
        let params = EngineParams::standard(kt).unwrap();
        let config = CycleConfig::for_variant(Variant::C);
        let run = run_cycle(&config, &params, Backend::Ideal).unwrap();
        let closed = erasure_cost_closed_form(&params);
        prop_assert!((run.ledger.erasure_cost - closed).abs() < 1e-8);
        prop_assert!((run.ledger.measurement_memory_drop - closed).abs() < 1e-8);
        prop_assert!((run.ledger.weight_work_gain - 2.0 * HBAR_OMEGA).abs() < 1e-8);
        // Heat extracted by the particle equals its energy rise to the Gibbs
        // value.
        let expect_heat = HBAR_OMEGA * (1.0 - (HBAR_OMEGA / kt).tanh());
        prop_assert!((run.ledger.heat_extracted - expect_heat).abs() < 1e-8);
        let total = |s: Step| -> f64 {
            Subsystem::ALL.iter().map(|&q| run.ledger.energy(s, q)).sum()
        };
        let feedback_injection = total(Step::Feedback) - total(Step::Measurement);
        // The CSwap branch conserves register energy; the rotation branch
        // flips P ground -> excited, injecting 2hw with weight p_ground.
        let expected = 2.0 * HBAR_OMEGA * params.ground_population();
        prop_assert!((feedback_injection - expected).abs() < 1e-8);
    }

    #[test]
    fn thermal_state_entropy_consistent(kt in 0.05f64..200.0) {
        let params = EngineParams::standard(kt).unwrap();
        let rho = thermal_state(&params);
        let p = params.ground_population();
        let expect = -(p * p.ln() + (1.0 - p) * (1.0 - p).ln());
        prop_assert!((qcore::von_neumann_entropy(&rho) - expect).abs() < 1e-10);
    }
}

#[test]
fn pinned_entropy_value() {
    let rho = DensityMatrix::from_probabilities(&[0.87861, 0.12139]).unwrap();
    assert!((qcore::von_neumann_entropy(&rho) - 0.36968535132718383).abs() < 1e-12);
}
