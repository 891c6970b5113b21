//! Lane predicate masks.
//!
//! With `numVals = 2^S` lanes per block, the low `S` bits of a basis index
//! select the lane and the rest select the block. A gate whose targets all
//! sit at positions `>= S` pairs whole blocks with whole blocks and needs no
//! masking. A target at position `p < S` instead pairs lanes *within* a
//! block, which the kernels express through predicates rather than shuffles:
//!
//! * collect the low target bits into `tmp = OR(1 << p)`;
//! * the base predicate selects lanes with every `tmp` bit clear (and every
//!   low *control* bit set, when controls sit below `S`);
//! * shifting the base bitmap left by a low-bit pattern yields the predicate
//!   for lanes holding that pattern.
//!
//! The `2^l` shifted masks for `l` low targets partition the control-
//! satisfying lanes; each holds `2^(S - l - lc)` active lanes. When
//! `l + lc = S` each mask keeps a single lane and predication degenerates,
//! which is the signal to drop to the scalar fallback path.

use crate::error::{Error, Result};
use crate::state::LaneConfig;

/// Bitmap over the lanes of one block, bit `i` = lane `i` active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredMask {
    bits: u64,
    lanes: u32,
}

impl PredMask {
    pub fn new(bits: u64, lanes: u32) -> Self {
        debug_assert!(lanes <= 64);
        debug_assert!(lanes == 64 || bits < (1u64 << lanes));
        PredMask { bits, lanes }
    }

    pub fn all(lanes: u32) -> Self {
        let bits = if lanes == 64 { u64::MAX } else { (1u64 << lanes) - 1 };
        PredMask { bits, lanes }
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn lanes(self) -> u32 {
        self.lanes
    }

    /// Number of active lanes.
    pub fn active(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_full(self) -> bool {
        self.active() == self.lanes
    }

    #[inline]
    pub fn contains(self, lane: u32) -> bool {
        (self.bits >> lane) & 1 == 1
    }

    /// Active lane indices, ascending.
    pub fn iter_active(self) -> impl Iterator<Item = u32> {
        let bits = self.bits;
        (0..self.lanes).filter(move |&l| (bits >> l) & 1 == 1)
    }

    /// The mask shifted to select lanes carrying low-bit pattern `pattern`
    /// instead of pattern zero. Only meaningful on a base mask whose active
    /// lanes all have the pattern bits clear.
    pub fn shifted(self, pattern: u64) -> Self {
        PredMask {
            bits: self.bits << pattern,
            lanes: self.lanes,
        }
    }
}

/// The mask family a gate needs at a given lane count.
#[derive(Debug, Clone)]
pub struct MaskSet {
    /// `masks[p]` selects lanes whose low-target bits spell pattern index
    /// `p`; index order follows the gate's low matrix bits, ascending.
    pub masks: Vec<PredMask>,
    /// `patterns[p]`: the lane-bit pattern masks[p] selects, i.e. the lane
    /// offset between a base lane and its pattern-`p` partner.
    pub patterns: Vec<u64>,
    /// Active lanes in every mask: `2^(S - l - lc)`.
    pub active: u32,
}

impl MaskSet {
    /// Builds the masks for `low_targets` (positions `< S`, in matrix-bit
    /// order) and `low_controls`, all positions within one block.
    pub fn build(cfg: LaneConfig, low_targets: &[u32], low_controls: &[u32]) -> Result<MaskSet> {
        let s = cfg.lane_bits();
        let nv = cfg.num_vals() as u32;
        for &p in low_targets.iter().chain(low_controls) {
            if p >= s {
                return Err(Error::QubitOutOfRange {
                    position: p as usize,
                    n: s,
                });
            }
        }
        let l = low_targets.len() as u32;
        let lc = low_controls.len() as u32;
        debug_assert!(l + lc <= s);

        let tmp: u64 = low_targets.iter().map(|&p| 1u64 << p).sum();
        let tmp_c: u64 = low_controls.iter().map(|&p| 1u64 << p).sum();

        let mut base_bits = 0u64;
        for lane in 0..nv as u64 {
            if lane & tmp == 0 && lane & tmp_c == tmp_c {
                base_bits |= 1 << lane;
            }
        }
        let base = PredMask::new(base_bits, nv);

        let count = 1usize << l;
        let mut masks = Vec::with_capacity(count);
        let mut patterns = Vec::with_capacity(count);
        for p in 0..count {
            let pattern: u64 = (0..l)
                .filter(|j| (p >> j) & 1 == 1)
                .map(|j| 1u64 << low_targets[j as usize])
                .sum();
            masks.push(base.shifted(pattern));
            patterns.push(pattern);
        }
        let active = 1u32 << (s - l - lc);
        debug_assert!(masks.iter().all(|m| m.active() == active));
        Ok(MaskSet {
            masks,
            patterns,
            active,
        })
    }

    /// True when each mask keeps a single lane: predication would carry no
    /// parallel work, so kernels switch to the scalar path.
    pub fn degenerate(&self) -> bool {
        self.active == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Precision;

    fn cfg(lanes: usize) -> LaneConfig {
        LaneConfig::from_lanes(lanes, Precision::Single).unwrap()
    }

    #[test]
    fn no_low_bits_gives_one_full_mask() {
        let set = MaskSet::build(cfg(4), &[], &[]).unwrap();
        assert_eq!(set.masks.len(), 1);
        assert!(set.masks[0].is_full());
        assert_eq!(set.active, 4);
        assert!(!set.degenerate());
    }

    #[test]
    fn single_low_target_splits_even_and_odd_lanes() {
        // Target at position 0, four lanes: base mask 0b0101, partner 0b1010.
        let set = MaskSet::build(cfg(4), &[0], &[]).unwrap();
        assert_eq!(set.masks[0].bits(), 0b0101);
        assert_eq!(set.masks[1].bits(), 0b1010);
        assert_eq!(set.patterns, vec![0, 1]);
        assert_eq!(set.active, 2);
    }

    #[test]
    fn low_target_at_position_one() {
        // Target at position 1, four lanes: lanes {0,1} vs {2,3}.
        let set = MaskSet::build(cfg(4), &[1], &[]).unwrap();
        assert_eq!(set.masks[0].bits(), 0b0011);
        assert_eq!(set.masks[1].bits(), 0b1100);
        assert_eq!(set.patterns, vec![0, 2]);
    }

    #[test]
    fn two_low_targets_partition_into_singletons() {
        let set = MaskSet::build(cfg(4), &[0, 1], &[]).unwrap();
        assert_eq!(set.masks.len(), 4);
        let bits: Vec<u64> = set.masks.iter().map(|m| m.bits()).collect();
        assert_eq!(bits, vec![0b0001, 0b0010, 0b0100, 0b1000]);
        assert_eq!(set.active, 1);
        assert!(set.degenerate());
    }

    #[test]
    fn matrix_bit_order_is_respected() {
        // Targets [1, 0]: matrix bit 0 is lane bit 1, matrix bit 1 is lane
        // bit 0. Pattern index 1 (bit 0 set) must select lane pattern 0b10.
        let set = MaskSet::build(cfg(4), &[1, 0], &[]).unwrap();
        assert_eq!(set.patterns, vec![0b00, 0b10, 0b01, 0b11]);
    }

    #[test]
    fn low_control_restricts_all_masks() {
        // Control at 0, target at 1, eight lanes: only odd lanes are live.
        // Base keeps odd lanes with bit 1 clear, {1, 5}; partner {3, 7}.
        let set = MaskSet::build(cfg(8), &[1], &[0]).unwrap();
        assert_eq!(set.masks[0].bits(), 0b0010_0010);
        assert_eq!(set.masks[1].bits(), 0b1000_1000);
        assert_eq!(set.active, 2);
    }

    #[test]
    fn masks_partition_the_control_satisfying_lanes() {
        let set = MaskSet::build(cfg(8), &[0, 2], &[1]).unwrap();
        let mut seen = 0u64;
        for m in &set.masks {
            assert_eq!(seen & m.bits(), 0, "masks overlap");
            seen |= m.bits();
        }
        // Lanes with bit 1 set: 0b11001100... for 8 lanes: 0xCC.
        assert_eq!(seen, 0b1100_1100);
    }

    #[test]
    fn active_iterates_ascending() {
        let m = PredMask::new(0b1010, 4);
        assert_eq!(m.iter_active().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(m.active(), 2);
        assert!(!m.is_full());
        assert!(PredMask::all(4).is_full());
    }
}
