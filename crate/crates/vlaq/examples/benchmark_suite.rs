//! All six benchmark families through the harness, side by side.
//!
//! Also prints the low/high gate census: a gate is "low" when its lowest
//! target falls inside the first `lanes` positions, i.e. the gates that go
//! irregular once a vector covers that many amplitudes. For a GHZ chain
//! the split is exactly (lanes, n - lanes).

use vlaq::generators::{count_gate_ops, BenchKind};
use vlaq::harness::{render_comparison, run, RunConfig};

fn main() -> vlaq::Result<()> {
    let n = 10;
    let mut outputs = Vec::new();
    println!("family census at threshold 4 (n = {n}):");
    for kind in BenchKind::ALL {
        let circuit = kind.build(n, 1, Some(4))?;
        let (low, high) = count_gate_ops(&circuit, 4);
        println!(
            "  {:<10} {:>4} gates: {:>3} low, {:>3} high",
            kind.name(),
            circuit.len(),
            low,
            high
        );

        let mut cfg = RunConfig::with_bench(kind, n);
        cfg.depth = Some(4);
        cfg.verify = true;
        outputs.push(run(&cfg)?);
    }

    // Relabel rows by family for the table.
    for (output, kind) in outputs.iter_mut().zip(BenchKind::ALL) {
        output.summary.config = kind.name().into();
    }
    println!();
    print!("{}", render_comparison(&outputs));
    println!();
    println!("max|diff| is each run verified against the scalar baseline");
    Ok(())
}
