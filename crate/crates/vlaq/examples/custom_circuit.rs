//! Round trip through the circuit text format and the state dump format.
//!
//! The text format is one gate per line, `name targets [| controls]
//! [@ params]`, zero-based qubits, `#` comments. The dump format is a
//! small binary header plus interleaved little-endian components, written
//! the same way from either storage layout.

use vlaq::generators::BenchKind;
use vlaq::harness::{run, RunConfig};
use vlaq::state::{Precision, StateVector};
use vlaq::Circuit;

const TEXT: &str = "\
# prepare |110> then rotate the middle qubit
qubits 3
x 1
x 2
ry 1 @ 0.7853981633974483
cx 1 0 | 2
";

fn main() -> vlaq::Result<()> {
    let dir = std::env::temp_dir().join("vlaq-custom-circuit");
    std::fs::create_dir_all(&dir)?;
    let circuit_path = dir.join("circuit.txt");
    let dump_path = dir.join("final.qst");
    std::fs::write(&circuit_path, TEXT)?;

    let parsed = Circuit::parse("custom", TEXT)?;
    println!("parsed {} gates on {} qubits", parsed.len(), parsed.n);
    println!("serialized back:\n{}", parsed.to_text());

    let cfg = RunConfig {
        circuit_file: Some(circuit_path.clone()),
        precision: Precision::Double,
        verify: true,
        dump_state: Some(dump_path.clone()),
        ..RunConfig::default()
    };
    let output = run(&cfg)?;
    let report = &output.reports[0];
    println!(
        "ran from {}: expectation {:.9}, verify diff {:.1e}",
        circuit_path.display(),
        report.expectation,
        report.verify.unwrap().max_abs_diff
    );

    let sv = StateVector::<f64>::load(&dump_path)?;
    println!("reloaded dump ({} qubits):", sv.n_qubits());
    for i in 0..sv.len() {
        let a = sv.amplitude(i);
        if a.norm() > 1e-12 {
            println!("  |{i:03b}>  {:+.6} {:+.6}i", a.re, a.im);
        }
    }

    // A bench run can dump the same way; reload and compare norms.
    let mut ghz_cfg = RunConfig::with_bench(BenchKind::Ghz, 3);
    ghz_cfg.precision = Precision::Double;
    ghz_cfg.dump_state = Some(dir.join("ghz.qst"));
    run(&ghz_cfg)?;
    let ghz = StateVector::<f64>::load(dir.join("ghz.qst"))?;
    println!("ghz dump norm^2 = {}", ghz.norm_sq());
    Ok(())
}
