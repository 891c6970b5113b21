//! Gather-free staging buffer for irregular gates.
//!
//! When a gate has targets below the lane boundary, its row pairs live in
//! the *same* block at different lane offsets, and a straightforward vector
//! kernel would need cross-lane gathers to line them up. The load buffer
//! sidesteps that: each matrix row's lanes are first copied, under that
//! row's predicate, into a dedicated buffer row at their original lane
//! positions. Because the predicates of any two rows differ by a constant
//! lane shift, the compute phase can then reach row `m_in` partners from row
//! `m_out` lanes with a plain shifted (unit-stride) access into the buffer,
//! no gather instruction anywhere.
//!
//! The buffer covers one iteration's working set: `2^k` rows of `numVals`
//! complex values. For the fusion widths and lane counts this crate
//! entertains that is a few KiB, which is the point: buffer traffic stays in
//! the nearest cache and is tallied separately from state traffic.

use crate::mask::PredMask;
use crate::metrics::VectorCounters;
use crate::state::Scalar;

/// Staging storage: `rows` rows of `lanes` complex values, split into a
/// real and an imaginary plane per row.
#[derive(Debug)]
pub struct LoadBuffer<T: Scalar> {
    lanes: usize,
    re: Vec<T>,
    im: Vec<T>,
}

impl<T: Scalar> LoadBuffer<T> {
    pub fn new(rows: usize, lanes: usize) -> Self {
        LoadBuffer {
            lanes,
            re: vec![T::zero(); rows * lanes],
            im: vec![T::zero(); rows * lanes],
        }
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    /// Bytes the buffer occupies, the figure budget checks care about.
    pub fn footprint_bytes(&self) -> usize {
        2 * self.re.len() * std::mem::size_of::<T>()
    }

    /// Masked copy of one state block's active lanes into buffer row `row`.
    ///
    /// `block` is the blocked-layout slice of one block: `lanes` real parts
    /// then `lanes` imaginary parts. Counts two predicated vector loads of
    /// state memory; the mirrored buffer writes are charged to
    /// `buffer_bytes` only, they are register-to-cache traffic, not issued
    /// state accesses.
    #[inline]
    pub fn fill_row(
        &mut self,
        row: usize,
        block: &[T],
        mask: PredMask,
        ctr: &mut VectorCounters,
    ) {
        debug_assert_eq!(block.len(), 2 * self.lanes);
        let dst_re = &mut self.re[row * self.lanes..(row + 1) * self.lanes];
        let dst_im = &mut self.im[row * self.lanes..(row + 1) * self.lanes];
        for lane in mask.iter_active() {
            let lane = lane as usize;
            dst_re[lane] = block[lane];
            dst_im[lane] = block[self.lanes + lane];
        }
        let active = mask.active() as u64;
        let lanes = mask.lanes() as u64;
        let complex_bytes = T::PRECISION.complex_bytes() as u64;
        ctr.vector_op(active, lanes);
        ctr.vector_op(active, lanes);
        ctr.mem_bytes += 2 * active * complex_bytes;
        ctr.buffer_bytes += 2 * active * complex_bytes;
    }

    /// Complex value at `(row, lane)`.
    #[inline]
    pub fn at(&self, row: usize, lane: usize) -> (T, T) {
        let idx = row * self.lanes + lane;
        (self.re[idx], self.im[idx])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::MaskSet;
    use crate::state::{LaneConfig, Precision};

    #[test]
    fn fill_copies_only_active_lanes() {
        let cfg = LaneConfig::from_lanes(4, Precision::Double).unwrap();
        let set = MaskSet::build(cfg, &[0], &[]).unwrap();
        let block: Vec<f64> = vec![10.0, 11.0, 12.0, 13.0, 20.0, 21.0, 22.0, 23.0];
        let mut buf = LoadBuffer::<f64>::new(2, 4);
        let mut ctr = VectorCounters::default();
        buf.fill_row(0, &block, set.masks[0], &mut ctr);
        buf.fill_row(1, &block, set.masks[1], &mut ctr);

        // Row 0 holds even lanes, row 1 odd lanes, both at original offsets.
        assert_eq!(buf.at(0, 0), (10.0, 20.0));
        assert_eq!(buf.at(0, 2), (12.0, 22.0));
        assert_eq!(buf.at(0, 1), (0.0, 0.0), "inactive lane untouched");
        assert_eq!(buf.at(1, 1), (11.0, 21.0));
        assert_eq!(buf.at(1, 3), (13.0, 23.0));
    }

    #[test]
    fn fill_counts_loads_and_both_byte_pools() {
        let cfg = LaneConfig::from_lanes(8, Precision::Single).unwrap();
        let set = MaskSet::build(cfg, &[1], &[]).unwrap();
        let block = vec![0.0f32; 16];
        let mut buf = LoadBuffer::<f32>::new(2, 8);
        let mut ctr = VectorCounters::default();
        buf.fill_row(0, &block, set.masks[0], &mut ctr);
        assert_eq!(ctr.vector_ops, 2);
        assert_eq!(ctr.active_lane_sum, 2 * 4);
        assert_eq!(ctr.partial_mask_ops, 2);
        // 2 component accesses, 4 active lanes, 8 bytes per complex.
        assert_eq!(ctr.mem_bytes, 2 * 4 * 8);
        assert_eq!(ctr.buffer_bytes, 2 * 4 * 8);
    }

    #[test]
    fn footprint_counts_both_planes() {
        let buf = LoadBuffer::<f32>::new(4, 8);
        assert_eq!(buf.footprint_bytes(), 2 * 4 * 8 * 4);
    }
}
