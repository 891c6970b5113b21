//! How low-qubit gates turn into predicate masks.
//!
//! A gate on qubit p pairs amplitudes whose indices differ in bit p. Once
//! p falls inside the lane index (2^p < lanes), the partners sit in the
//! same vector register and the kernel splits each block into masked
//! sub-iterations: one mask selects the lanes holding "bit p = 0", its
//! shifted copies select the partners, and low control qubits knock out
//! lanes where the control bit is 0.

use vlaq::mask::MaskSet;
use vlaq::state::{LaneConfig, Precision};

fn show(cfg: LaneConfig, low_targets: &[u32], low_controls: &[u32]) {
    let set = MaskSet::build(cfg, low_targets, low_controls).unwrap();
    println!(
        "lanes={} targets={:?} controls={:?}  ->  active {} lane(s) per mask{}",
        cfg.num_vals(),
        low_targets,
        low_controls,
        set.active,
        if set.degenerate() { "  [scalar fallback]" } else { "" }
    );
    for (mask, pattern) in set.masks.iter().zip(&set.patterns) {
        println!(
            "    pattern {:>2}: {:0width$b}",
            pattern,
            mask.bits(),
            width = cfg.num_vals()
        );
    }
}

fn main() {
    let four = LaneConfig::from_lanes(4, Precision::Single).unwrap();
    show(four, &[], &[]);
    show(four, &[0], &[]);
    show(four, &[1], &[]);
    show(four, &[1, 0], &[]);
    show(four, &[0], &[1]);

    println!();
    let sixteen = LaneConfig::from_lanes(16, Precision::Single).unwrap();
    show(sixteen, &[2], &[]);
    show(sixteen, &[0, 3], &[1]);

    // The masks are pairwise disjoint and their union is exactly the
    // lanes whose control bits are satisfied; without low controls that
    // union is every lane.
    let set = MaskSet::build(sixteen, &[0, 3], &[1]).unwrap();
    let mut seen = 0u64;
    for mask in &set.masks {
        assert_eq!(seen & mask.bits(), 0, "masks overlap");
        seen |= mask.bits();
    }
    println!();
    println!(
        "union for targets [0,3], control [1]: {seen:016b} (control bit 1 set)"
    );
}
