use engine::{ideal_gate_unitary, run_cycle, Backend, CycleConfig, CycleGateId, EngineParams, Step, Variant};
use nmr_sim::{propagate, MoleculeSpec, Relaxation};
use pulse_opt::{optimize, OptimizationProblem};
use qcore::DensityMatrix;

fn main() {
    let molecule = MoleculeSpec::synthetic4();
    let params = EngineParams::standard(1.33).unwrap();
    let id = CycleGateId::FeedbackCswap;
    let target = ideal_gate_unitary(id, &params);

    // Probe inputs: the ideal state entering the feedback step for variants a/d.
    let probes: Vec<DensityMatrix> = [Variant::A, Variant::D]
        .iter()
        .map(|&v| {
            let run = run_cycle(&CycleConfig::for_variant(v), &params, Backend::Ideal).unwrap();
            run.state_after(Step::Measurement).clone()
        })
        .collect();

    let weight: f64 = std::env::var("DBG_W").ok().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let polish: usize = std::env::var("DBG_POLISH").ok().and_then(|s| s.parse().ok()).unwrap_or(200);
    for seed in [42u64, 142] {
        let mut problem = OptimizationProblem::new(molecule.clone(), target.clone(), 28e-3, 140);
        problem.fidelity_goal = 0.9995;
        problem.max_iterations = 2000;
        problem.seed = seed.wrapping_add(2); // match compile_cycle's per-gate offset
        problem.probes = probes
            .iter()
            .map(|p| {
                let out = p.apply_unitary(&target).unwrap();
                (p.matrix().clone(), out.into_matrix())
            })
            .collect();
        problem.polish_iterations = polish;
        problem.probe_weight = weight;
        let t0 = std::time::Instant::now();
        let rep = optimize(&problem).unwrap();
        let mut line = format!(
            "seed {seed}: gate_fid={:.6} iters={} t={:.0}s",
            rep.achieved_fidelity,
            rep.iterations,
            t0.elapsed().as_secs_f64()
        );
        for (pi, probe) in probes.iter().enumerate() {
            let relaxed = propagate(probe, &molecule, &rep.pulse, Relaxation::On).unwrap();
            let ideal = probe.apply_unitary(&target).unwrap();
            let mut worst: f64 = 1.0;
            for q in 0..4 {
                let a = relaxed.partial_trace(&[q]).unwrap();
                let b = ideal.partial_trace(&[q]).unwrap();
                worst = worst.min(qcore::fidelity(&a, &b).unwrap());
            }
            line.push_str(&format!(" probe{pi}_minfid={worst:.5}"));
        }
        println!("{line}");
    }
}
