//! Gate fusion: fewer, fatter gates and the arithmetic-intensity dial.
//!
//! Vertical fusion multiplies out runs of gates on identical qubit sets.
//! Horizontal fusion tensors disjoint single-layer gates together up to a
//! width limit f. Each fused width has a closed-form arithmetic intensity;
//! picking f is a trade between that intensity, the cache footprint of the
//! fused matrix, and the machine's flops-per-byte balance.

use vlaq::fusion::{closed_form_ai, plan_fusion, recommend_f};
use vlaq::gate;
use vlaq::state::{LaneConfig, Precision};
use vlaq::Circuit;

fn main() -> vlaq::Result<()> {
    // Eight disjoint rotations in one layer, then a repeat of the same
    // qubit: vertical collapses the repeat, horizontal packs the layer.
    let mut c = Circuit::new("demo", 8);
    c.push(gate::rz(3, 0.4))?;
    c.push(gate::rz(3, 0.3))?; // same qubit: vertical target
    for q in 0..8u32 {
        if q != 3 {
            c.push(gate::ry(q, 0.1 + q as f64 / 10.0))?;
        }
    }

    for f in 1..=4 {
        let plan = plan_fusion(&c, f)?;
        let stats = plan.stats();
        println!(
            "f={f}: {} -> {} gates (widest {})",
            stats.before, stats.after, stats.max_f
        );
    }

    println!();
    let plan = plan_fusion(&c, 3)?;
    print!("{}", plan.to_text());

    println!();
    println!("closed-form AI by fused width (4 lanes):");
    for f in 1..=6 {
        println!("  f={f}: {:.4} flops/byte", closed_form_ai(f, 4));
    }

    // recommend_f: largest width whose matrix + staging buffer fit the
    // cache budget and whose AI does not overshoot the machine balance.
    let cfg = LaneConfig::from_lanes(4, Precision::Single)?;
    println!();
    for (budget, balance) in [(32 * 1024, 1.9), (32 * 1024, 0.5), (256, 10.0)] {
        println!(
            "budget {budget:>6} B, balance {balance:>4}: recommend f = {}",
            recommend_f(cfg, budget, balance)
        );
    }
    Ok(())
}
