//! Worker threads split the block range; results do not depend on the
//! split.
//!
//! Each iteration of a gate kernel owns whole lane blocks, so workers
//! write disjoint state slices and need no synchronization beyond the
//! final counter merge. The state and the merged counters are bitwise
//! identical for every worker count; only the wall time moves.

use std::time::Instant;

use vlaq::generators::qft;
use vlaq::state::{LaneConfig, Layout, Precision, StateVector};
use vlaq::vla::Engine;
use vlaq::VectorCounters;

fn main() -> vlaq::Result<()> {
    let n = 18u32;
    let lanes = 4usize;
    let circuit = qft(n)?;
    println!("qft({n}), {} gates, lanes={lanes}", circuit.len());

    let mut baseline: Option<(Vec<u64>, VectorCounters)> = None;
    for workers in [1usize, 2, 4, 8] {
        let engine =
            Engine::new(LaneConfig::from_lanes(lanes, Precision::Single)?).with_workers(workers)?;
        let mut sv = StateVector::<f32>::zero(n, Layout::Blocked { lanes })?;
        let mut ctr = VectorCounters::default();
        let t = Instant::now();
        engine.apply_circuit(&mut sv, &circuit, &mut ctr)?;
        let ms = t.elapsed().as_secs_f64() * 1e3;

        let bits: Vec<u64> = sv.data().iter().map(|x| x.to_bits() as u64).collect();
        match &baseline {
            None => baseline = Some((bits, ctr)),
            Some((expect_bits, expect_ctr)) => {
                assert_eq!(&bits, expect_bits, "state must not depend on workers");
                assert_eq!(&ctr, expect_ctr, "counters must not depend on workers");
            }
        }
        println!(
            "workers={workers}: {ms:8.2} ms, {} vector ops, state bitwise-stable",
            ctr.vector_ops
        );
    }
    Ok(())
}
