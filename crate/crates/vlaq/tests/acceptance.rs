//! Acceptance gate: each test pins one externally visible claim about the
//! engine, with hand-derived expectations wherever the number can be
//! worked out by hand. Tests share a mutex so the timing checks see a
//! quiet machine; each prints a one-line verdict with measured figures.

use std::sync::Mutex;
use std::time::Instant;

use vlaq::fusion::{closed_form_ai, plan_fusion};
use vlaq::gate::{self, Gate, GateMatrix};
use vlaq::generators::{count_gate_ops, ghz, qft, synthetic, BenchKind};
use vlaq::harness::{self, RunConfig};
use vlaq::mask::MaskSet;
use vlaq::reference;
use vlaq::rng::Lcg64;
use vlaq::state::{max_abs_diff, LaneConfig, Layout, Precision, Scalar, StateVector};
use vlaq::vla::Engine;
use vlaq::{Circuit, VectorCounters};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

/// Family builder with per-family work caps so the whole grid stays fast.
/// Every circuit is still the genuine article, just sized for a test run.
fn family_circuit(kind: BenchKind, n: u32) -> Circuit {
    let depth = match kind {
        BenchKind::Grover => Some(6),
        BenchKind::Qrc => Some(4),
        BenchKind::Qv => Some(n.min(8) as usize),
        BenchKind::Synthetic => Some(4),
        _ => None,
    };
    kind.build_with(n, 1, depth, true).unwrap()
}

fn blocked<T: Scalar>(n: u32, lanes: usize) -> StateVector<T> {
    StateVector::zero(n, Layout::Blocked { lanes }).unwrap()
}

fn oracle_grid<T: Scalar>() -> (f64, usize) {
    let tol = T::PRECISION.state_tolerance();
    let mut worst = 0.0f64;
    let mut runs = 0usize;
    for kind in BenchKind::ALL {
        for n in [6u32, 8, 10, 12] {
            let circuit = family_circuit(kind, n);
            let mut oracle = StateVector::<T>::zero(n, Layout::Interleaved).unwrap();
            reference::apply_circuit(&mut oracle, &circuit, &mut VectorCounters::default())
                .unwrap();
            for lanes in [2usize, 4, 8, 16] {
                let engine =
                    Engine::new(LaneConfig::from_lanes(lanes, T::PRECISION).unwrap());
                for f in [1usize, 2, 3, 4] {
                    let plan = plan_fusion(&circuit, f).unwrap();
                    let mut sv = blocked::<T>(n, lanes);
                    engine
                        .apply_gates(&mut sv, &plan.to_gates(), &mut VectorCounters::default())
                        .unwrap();
                    let diff = max_abs_diff(&sv, &oracle).unwrap();
                    assert!(
                        diff <= tol,
                        "{} n={n} lanes={lanes} f={f}: diff {diff:e} over {tol:e}",
                        kind.name()
                    );
                    worst = worst.max(diff);
                    runs += 1;
                }
            }
        }
    }
    (worst, runs)
}

#[test]
fn a01_vector_engine_matches_scalar_oracle_across_grid() {
    let _g = serial();
    let t0 = Instant::now();
    let (w32, r32) = oracle_grid::<f32>();
    let (w64, r64) = oracle_grid::<f64>();
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 120.0, "grid took {secs:.1} s, budget 120 s");
    println!(
        "pass: oracle equivalence over {} runs (6 families x 4 sizes x 4 lane widths x 4 fuse \
         widths x 2 precisions), worst diff single {w32:.2e} of 1e-6, double {w64:.2e} of 1e-12, \
         {secs:.1} s",
        r32 + r64
    );
}

#[test]
fn a02_measured_ai_matches_closed_form() {
    let _g = serial();
    // 12 one-qubit gates on positions 4..16: high at 4 lanes, and 12 packs
    // evenly into fused widths 1, 2 and 3.
    let circuit = synthetic(16, 1).unwrap();
    let engine = Engine::new(LaneConfig::from_lanes(4, Precision::Single).unwrap());
    let mut line = String::new();
    for (f, frozen) in [(1usize, 0.4375f64), (2, 0.9375), (3, 1.9375)] {
        let closed = closed_form_ai(f, 4);
        assert_eq!(closed, frozen, "closed form drifted at f={f}");
        let plan = plan_fusion(&circuit, f).unwrap();
        let gates = plan.to_gates();
        assert!(
            gates.iter().all(|g| g.targets.len() == f),
            "packing must give uniform width {f}"
        );
        let mut sv = blocked::<f32>(16, 4);
        let mut ctr = VectorCounters::default();
        engine.apply_gates(&mut sv, &gates, &mut ctr).unwrap();
        let ai = ctr.arithmetic_intensity();
        let rel = (ai - closed).abs() / closed;
        assert!(
            rel <= 0.10,
            "f={f}: measured AI {ai} vs closed form {closed} ({:.2}% off)",
            rel * 100.0
        );
        line.push_str(&format!(" f={f}: {closed} vs {ai:.4};"));
    }
    println!("pass: closed-form AI matches measured counters within 10% at 4 lanes:{line}");
}

#[test]
fn a03_one_qubit_kernel_costs_28_flops_per_pair() {
    let _g = serial();
    let n = 10u32;
    let pairs = 1u64 << (n - 1);
    for target in [9u32, 0] {
        let g = gate::hadamard(target);
        let mut sv = blocked::<f32>(n, 4);
        let mut ctr = VectorCounters::default();
        Engine::new(LaneConfig::from_lanes(4, Precision::Single).unwrap())
            .apply_gate(&mut sv, &g, &mut ctr)
            .unwrap();
        assert_eq!(ctr.flops, 28 * pairs, "vector path, target {target}");

        let mut plain = StateVector::<f32>::zero(n, Layout::Interleaved).unwrap();
        let mut ref_ctr = VectorCounters::default();
        reference::apply_gate(&mut plain, &g, &mut ref_ctr).unwrap();
        assert_eq!(ref_ctr.flops, 28 * pairs, "scalar path, target {target}");
    }
    println!(
        "pass: one-qubit kernel spends exactly 28 flops per amplitude pair on both engines, \
         high or low target"
    );
}

#[test]
fn a04_predicate_mask_tables_match_hand_traces() {
    let _g = serial();
    let bits = |m: &MaskSet| m.masks.iter().map(|p| p.bits()).collect::<Vec<u64>>();
    let cfg4 = LaneConfig::from_lanes(4, Precision::Single).unwrap();
    let build = |cfg, targets: &[u32]| MaskSet::build(cfg, targets, &[]).unwrap();

    // 4 lanes, every low-target set, masks written out by hand.
    let m = build(cfg4, &[]);
    assert_eq!(bits(&m), vec![0b1111]);
    assert_eq!(m.active, 4);
    let m = build(cfg4, &[0]);
    assert_eq!(bits(&m), vec![0b0101, 0b1010]);
    assert_eq!(m.patterns, vec![0, 1]);
    assert_eq!(m.active, 2);
    let m = build(cfg4, &[1]);
    assert_eq!(bits(&m), vec![0b0011, 0b1100]);
    assert_eq!(m.patterns, vec![0, 2]);
    assert_eq!(m.active, 2);
    let m = build(cfg4, &[0, 1]);
    assert_eq!(bits(&m), vec![0b0001, 0b0010, 0b0100, 0b1000]);
    assert_eq!(m.patterns, vec![0, 1, 2, 3]);
    assert_eq!(m.active, 1);
    assert!(m.degenerate());

    // 16 lanes: two hand traces, then every subset of the low positions
    // must partition the block.
    let cfg16 = LaneConfig::from_lanes(16, Precision::Single).unwrap();
    let m = build(cfg16, &[2]);
    assert_eq!(bits(&m), vec![0x0F0F, 0xF0F0]);
    assert_eq!(m.active, 8);
    let m = build(cfg16, &[0, 3]);
    assert_eq!(bits(&m), vec![0x0055, 0x00AA, 0x5500, 0xAA00]);
    assert_eq!(m.patterns, vec![0, 1, 8, 9]);
    assert_eq!(m.active, 4);

    for sel in 0u32..16 {
        let targets: Vec<u32> = (0..4).filter(|b| sel >> b & 1 == 1).collect();
        let l = targets.len() as u32;
        let m = build(cfg16, &targets);
        assert_eq!(m.masks.len(), 1 << l);
        assert_eq!(m.active, 1 << (4 - l));
        let mut seen = 0u64;
        for pm in &m.masks {
            assert_eq!(pm.bits().count_ones(), m.active, "uneven mask for {targets:?}");
            assert_eq!(seen & pm.bits(), 0, "masks overlap for {targets:?}");
            seen |= pm.bits();
        }
        assert_eq!(seen, 0xFFFF, "masks miss lanes for {targets:?}");
    }

    // One active lane per mask carries no parallel work: the engine must
    // take the scalar path instead of issuing single-lane vector ops.
    let mut rng = Lcg64::new(3);
    let g = Gate::new(
        "u",
        vec![0, 1],
        vec![],
        GateMatrix::random_unitary(2, &mut rng).unwrap(),
    )
    .unwrap();
    let mut sv = blocked::<f32>(8, 4);
    let mut ctr = VectorCounters::default();
    Engine::new(cfg4).apply_gate(&mut sv, &g, &mut ctr).unwrap();
    assert_eq!(ctr.vector_ops, 0, "degenerate masks must not issue vector ops");
    assert!(ctr.scalar_ops > 0);
    println!(
        "pass: mask tables at 4 and 16 lanes match hand traces, every set partitions the \
         block, single-active-lane sets fall back to scalar"
    );
}

#[test]
fn a05_avl_hits_both_extremes_and_stays_bounded() {
    let _g = serial();
    // All targets high: every predicate is full, AVL is the lane count.
    let high = synthetic(12, 2).unwrap();
    for lanes in [2usize, 4, 8, 16] {
        let engine = Engine::new(LaneConfig::from_lanes(lanes, Precision::Single).unwrap());
        let mut sv = blocked::<f32>(12, lanes);
        let mut ctr = VectorCounters::default();
        engine.apply_circuit(&mut sv, &high, &mut ctr).unwrap();
        assert_eq!(ctr.avl(), lanes as f64, "high-only circuit at {lanes} lanes");
    }

    // H on qubit 0 at 4 lanes: partners share a register, so each mask
    // keeps 2 of 4 lanes.
    let engine = Engine::new(LaneConfig::from_lanes(4, Precision::Single).unwrap());
    let mut sv = blocked::<f32>(10, 4);
    let mut ctr = VectorCounters::default();
    engine.apply_gate(&mut sv, &gate::hadamard(0), &mut ctr).unwrap();
    assert_eq!(ctr.avl(), 2.0, "H on qubit 0 at 4 lanes");

    // Mixed random circuits never leave [1, lanes].
    for seed in 1u64..=6 {
        let mut rng = Lcg64::new(seed);
        let mut c = Circuit::new("mix", 8);
        for i in 0..20 {
            let q = rng.next_below(8) as u32;
            c.push(Gate::new(
                format!("u{i}"),
                vec![q],
                vec![],
                GateMatrix::random_unitary(1, &mut rng).unwrap(),
            )
            .unwrap())
            .unwrap();
        }
        for lanes in [4usize, 8, 16] {
            let engine = Engine::new(LaneConfig::from_lanes(lanes, Precision::Single).unwrap());
            let mut sv = blocked::<f32>(8, lanes);
            let mut ctr = VectorCounters::default();
            engine.apply_circuit(&mut sv, &c, &mut ctr).unwrap();
            if ctr.vector_ops > 0 {
                let avl = ctr.avl();
                assert!(
                    (1.0..=lanes as f64).contains(&avl),
                    "seed {seed} lanes {lanes}: AVL {avl}"
                );
            }
        }
    }
    println!(
        "pass: AVL equals the lane count on high-only circuits, 2.0 for H(q0) at 4 lanes, \
         and stays within [1, lanes] on mixed circuits"
    );
}

#[test]
fn a06_ghz_census_counts_low_and_high_gates() {
    let _g = serial();
    for n in 8u32..=32 {
        let c = ghz(n).unwrap();
        let total = c.len() as u64;
        assert_eq!(total, n as u64);
        for nv in [2u32, 4, 8, 16] {
            let (low, high) = count_gate_ops(&c, nv);
            if n >= nv {
                assert_eq!(
                    (low, high),
                    (nv as u64, total - nv as u64),
                    "ghz({n}) at threshold {nv}"
                );
            } else {
                // Fewer qubits than lanes: every target sits below the
                // threshold, so all gates land in the low bucket.
                assert_eq!((low, high), (total, 0), "ghz({n}) at threshold {nv}");
            }
        }
    }
    println!(
        "pass: GHZ census gives exactly (nv, N-nv) low/high gates for N in 8..=32, nv in \
         {{2,4,8,16}} (all-low when N < nv)"
    );
}

#[test]
fn a07_analytic_ghz_and_qft_states() {
    let _g = serial();
    let engine = Engine::new(LaneConfig::from_lanes(4, Precision::Double).unwrap());
    let run = |c: &Circuit| {
        let plan = plan_fusion(c, 3).unwrap();
        let mut sv = blocked::<f64>(c.n, 4);
        engine
            .apply_gates(&mut sv, &plan.to_gates(), &mut VectorCounters::default())
            .unwrap();
        sv
    };
    let mut worst = 0.0f64;
    for n in [4u32, 8, 12] {
        let len = 1usize << n;

        // GHZ: equal real halves on the first and last basis state.
        let sv = run(&ghz(n).unwrap());
        let half = std::f64::consts::FRAC_1_SQRT_2;
        for i in 0..len {
            let expect = if i == 0 || i == len - 1 { half } else { 0.0 };
            let a = sv.amplitude(i);
            let d = ((a.re - expect).powi(2) + a.im.powi(2)).sqrt();
            assert!(d <= 1e-6, "ghz({n}) amplitude {i}: off by {d:e}");
            worst = worst.max(d);
        }

        // QFT of |x>: flat magnitude 1/sqrt(len), phase 2*pi*x*j/len.
        let mut x = 0usize;
        let mut rng = Lcg64::new(11 + n as u64);
        while x == 0 {
            x = rng.next_below(len);
        }
        let mut c = Circuit::new("qft-basis", n);
        for b in 0..n {
            if x >> b & 1 == 1 {
                c.push(gate::pauli_x(b)).unwrap();
            }
        }
        for g in qft(n).unwrap().gates {
            c.push(g).unwrap();
        }
        let sv = run(&c);
        let scale = 1.0 / (len as f64).sqrt();
        for j in 0..len {
            let phi = std::f64::consts::TAU * (x as f64) * (j as f64) / len as f64;
            let a = sv.amplitude(j);
            let dre = a.re - scale * phi.cos();
            let dim = a.im - scale * phi.sin();
            let d = (dre * dre + dim * dim).sqrt();
            assert!(d <= 1e-6, "qft({n}) of |{x}>, amplitude {j}: off by {d:e}");
            worst = worst.max(d);
        }
    }
    println!(
        "pass: GHZ and QFT states match their closed forms within 1e-6 up to 12 qubits \
         (worst {worst:.1e})"
    );
}

#[test]
fn a08_wall_time_doubles_per_added_qubit() {
    let _g = serial();
    let t0 = Instant::now();
    let wall = |n: u32, reps: usize| {
        let mut cfg = RunConfig::with_bench(BenchKind::Synthetic, n);
        cfg.reps = reps;
        cfg.max_fuse = 1;
        harness::run(&cfg).unwrap().summary.wall_ms_min
    };
    let times: Vec<(u32, f64)> = (20u32..=24).map(|n| (n, wall(n, 2))).collect();
    let mut shown = String::new();
    for w in times.windows(2) {
        let (n, t_n) = w[0];
        let (_, t_next) = w[1];
        let mut ratio = t_next / t_n;
        if !(1.6..=2.6).contains(&ratio) {
            // Noisy box: remeasure the offending pair with more samples.
            ratio = wall(n + 1, 4) / wall(n, 4);
        }
        assert!(
            (1.6..=2.6).contains(&ratio),
            "t({})/t({n}) = {ratio:.2}, outside [1.6, 2.6]",
            n + 1
        );
        shown.push_str(&format!(" {:.2}", ratio));
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 300.0, "timing sweep took {secs:.0} s, budget 300 s");
    println!(
        "pass: wall time grows with the state, ratios t(n+1)/t(n) for n in 20..=23:{shown} \
         (band [1.6, 2.6], {secs:.0} s)"
    );
}

#[test]
fn a09_worker_count_never_changes_results() {
    let _g = serial();
    let plan = plan_fusion(&qft(14).unwrap(), 3).unwrap();
    let gates = plan.to_gates();
    let cfg = LaneConfig::from_lanes(4, Precision::Double).unwrap();
    let tol = Precision::Double.state_tolerance();
    let mut base: Option<(StateVector<f64>, VectorCounters)> = None;
    let mut bitwise = true;
    for workers in [1usize, 2, 4, 8] {
        let engine = Engine::new(cfg).with_workers(workers).unwrap();
        let mut sv = blocked::<f64>(14, 4);
        let mut ctr = VectorCounters::default();
        engine.apply_gates(&mut sv, &gates, &mut ctr).unwrap();
        match &base {
            None => base = Some((sv, ctr)),
            Some((b_sv, b_ctr)) => {
                let diff = max_abs_diff(&sv, b_sv).unwrap();
                assert!(diff <= tol, "workers={workers}: diff {diff:e}");
                assert_eq!(ctr.flops, b_ctr.flops, "workers={workers}: flop counter");
                bitwise &= sv.data() == b_sv.data();
            }
        }
    }
    println!(
        "pass: workers 1/2/4/8 give states within 1e-12 and identical flop counters \
         (bitwise-identical: {bitwise})"
    );
}

#[test]
fn a10_fusion_preserves_states_and_irr_grows_with_lanes() {
    let _g = serial();
    // The fused plan must act exactly like the gate list it came from.
    let engine = Engine::new(LaneConfig::from_lanes(4, Precision::Single).unwrap());
    let mut worst = 0.0f64;
    for kind in BenchKind::ALL {
        let circuit = family_circuit(kind, 10);
        let mut plain = blocked::<f32>(10, 4);
        engine
            .apply_circuit(&mut plain, &circuit, &mut VectorCounters::default())
            .unwrap();
        for f in [2usize, 3, 4] {
            let plan = plan_fusion(&circuit, f).unwrap();
            let mut fused = blocked::<f32>(10, 4);
            engine
                .apply_gates(&mut fused, &plan.to_gates(), &mut VectorCounters::default())
                .unwrap();
            let diff = max_abs_diff(&fused, &plain).unwrap();
            assert!(diff <= 1e-6, "{} f={f}: diff {diff:e}", kind.name());
            worst = worst.max(diff);
        }
    }

    // Wider registers retire more scalar work per op when everything
    // vectorizes: on a high-only circuit IRR is exactly the lane count.
    let high = synthetic(12, 2).unwrap();
    let ref_ops = reference::gates_scalar_ops(12, &high.gates);
    let mut irrs = Vec::new();
    for lanes in [2usize, 4, 8] {
        let engine = Engine::new(LaneConfig::from_lanes(lanes, Precision::Single).unwrap());
        let mut sv = blocked::<f32>(12, lanes);
        let mut ctr = VectorCounters::default();
        engine.apply_circuit(&mut sv, &high, &mut ctr).unwrap();
        let irr = ctr.irr(ref_ops);
        if let Some(&last) = irrs.last() {
            assert!(irr > last, "IRR fell from {last} to {irr} going to {lanes} lanes");
        }
        assert_eq!(irr, lanes as f64, "high-only IRR at {lanes} lanes");
        irrs.push(irr);
    }
    println!(
        "pass: fused plans match unfused states within 1e-6 on all families (worst \
         {worst:.1e}); IRR over lanes 2/4/8 = {irrs:?}"
    );
}
