use engine::{run_cycle, Backend, CycleConfig, CycleGateId, CyclePulses, EngineParams, Step, Subsystem, Variant};
use nmr_sim::{MoleculeSpec, PulseSequence, Relaxation};

fn main() {
    let molecule = MoleculeSpec::synthetic4();
    let params = EngineParams::standard(1.33).unwrap();
    let mut pulses = CyclePulses::new();
    for id in CycleGateId::ALL {
        let p = PulseSequence::from_file(format!("/tmp/szr/pulses/{}.pulse", id.label())).unwrap();
        pulses.insert(id, p);
    }
    for variant in [Variant::A, Variant::D] {
        let cfg = CycleConfig::for_variant(variant);
        let ideal = run_cycle(&cfg, &params, Backend::Ideal).unwrap();
        let relaxed = run_cycle(
            &cfg,
            &params,
            Backend::Pulse { molecule: &molecule, pulses: &pulses, relaxation: Relaxation::On },
        )
        .unwrap();
        println!("variant {}", variant.label());
        for step in Step::ALL {
            let mut line = format!("  {:<16}", step.label());
            for sub in Subsystem::ALL {
                let f = qcore::fidelity(&ideal.reduced(step, sub), &relaxed.reduced(step, sub)).unwrap();
                line.push_str(&format!(" {}={:.5}", sub.label(), f));
            }
            println!("{line}");
        }
    }
}
