use engine::EngineParams;
use nmr_sim::MoleculeSpec;
use pulse_opt::{compile_cycle, CompileSettings};
use std::time::Instant;

fn main() {
    let molecule = MoleculeSpec::synthetic4();
    let params = EngineParams::standard(1.33).unwrap();
    let settings = CompileSettings::defaults(42);
    let t = Instant::now();
    match compile_cycle(&molecule, &params, &settings) {
        Ok((pulses, report)) => {
            for g in &report.gates {
                println!("{:20} fid={:.6} iters={} attempts={}", g.gate.label(), g.fidelity, g.iterations, g.attempts);
            }
            println!("total pulse duration {:.3}s, compiled in {:.1}s", pulses.total_duration(), t.elapsed().as_secs_f64());
        }
        Err(e) => println!("FAILED after {:.1}s: {e}", t.elapsed().as_secs_f64()),
    }
}
