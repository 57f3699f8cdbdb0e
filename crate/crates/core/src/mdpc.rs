//! Multidimensional parity-check codes, MDPC(nD/mL).
//!
//! `K = m^n` data bits sit in the `m^n` corner of an `n`-dimensional hypercube
//! of side `m + 1`. Every cell with at least one coordinate equal to `m` is a
//! parity cell, giving `R = (m + 1)^n - m^n`. After encoding, every
//! axis-aligned line of `m + 1` cells has even parity, parity-on-parity cells
//! included.
//!
//! The decoder is the iterative failed-dimension-marker (FDM) scheme: each
//! cell's FDM counts the failing lines through it; while the largest FDM is at
//! least 2, every cell holding that maximum is flipped.

use crate::error::CodecError;

/// Default iteration cap for [`MdpcCode::decode`].
pub const DEFAULT_MAX_ITERATIONS: usize = 10;

// (m+1)^n above this is refused to keep blocks addressable in memory.
const MAX_BLOCK_CELLS: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MdpcStatus {
    ErrorFree,
    Corrected,
    Uncorrectable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpcBlock {
    pub n: u32,
    pub m: usize,
    /// Row-major cells of the `(m + 1)^n` hypercube, axis 0 most significant.
    pub cells: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpcDecoded {
    pub data: Vec<u8>,
    pub status: MdpcStatus,
    /// Flip rounds performed.
    pub iterations: usize,
    /// Total cells flipped across all rounds.
    pub flips: usize,
}

/// An MDPC(nD/mL) code with its cell layout precomputed.
#[derive(Debug, Clone)]
pub struct MdpcCode {
    n: u32,
    m: usize,
    strides: Vec<usize>,
    cells: usize,
    data_cells: Vec<usize>,
}

impl MdpcCode {
    pub fn new(m: usize, n: u32) -> Result<Self, CodecError> {
        if m < 2 || n < 2 {
            return Err(CodecError::Dimensions(format!(
                "MDPC needs m >= 2 and n >= 2, got m={m}, n={n}"
            )));
        }
        let side = m + 1;
        let cells = (0..n)
            .try_fold(1usize, |acc, _| acc.checked_mul(side))
            .filter(|&c| c <= MAX_BLOCK_CELLS)
            .ok_or_else(|| {
                CodecError::Dimensions(format!("MDPC block (m+1)^n = {side}^{n} is too large"))
            })?;
        let strides: Vec<usize> = (0..n).map(|a| side.pow(n - 1 - a)).collect();

        let k = m.pow(n);
        let mut data_cells = Vec::with_capacity(k);
        let mut digits = vec![0usize; n as usize];
        for _ in 0..k {
            data_cells.push(digits.iter().zip(&strides).map(|(d, s)| d * s).sum());
            for d in digits.iter_mut().rev() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Ok(MdpcCode {
            n,
            m,
            strides,
            cells,
            data_cells,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Data bits, `m^n`.
    pub fn k(&self) -> usize {
        self.data_cells.len()
    }

    /// Parity bits, `(m + 1)^n - m^n`.
    pub fn r(&self) -> usize {
        self.cells - self.k()
    }

    /// Block size in cells, `(m + 1)^n`.
    pub fn len(&self) -> usize {
        self.cells
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Guaranteed correctable bit errors, `2^(n-1) - 1`.
    pub fn correction_capability(&self) -> usize {
        (1usize << (self.n - 1)) - 1
    }

    /// Cell indices holding data bits, in data order.
    pub fn data_cells(&self) -> &[usize] {
        &self.data_cells
    }

    pub fn encode(&self, data: &[u8]) -> Result<MdpcBlock, CodecError> {
        if data.len() != self.k() {
            return Err(CodecError::Length {
                expected: self.k(),
                actual: data.len(),
            });
        }
        let mut cells = vec![0u8; self.cells];
        for (&cell, &bit) in self.data_cells.iter().zip(data) {
            cells[cell] = bit & 1;
        }
        self.fill_parity(&mut cells);
        Ok(MdpcBlock {
            n: self.n,
            m: self.m,
            cells,
        })
    }

    /// Writes all parity cells of a block whose data cells are already set.
    pub fn fill_parity(&self, cells: &mut [u8]) {
        let side = self.m + 1;
        // Axis by axis over every line; later-axis parity cells are still zero
        // at this point and get filled from already-even hyperplanes.
        for &stride in &self.strides {
            for base in self.line_bases(stride) {
                let parity = (0..self.m).fold(0u8, |acc, i| acc ^ cells[base + i * stride]);
                cells[base + (side - 1) * stride] = parity;
            }
        }
    }

    fn line_bases(&self, stride: usize) -> impl Iterator<Item = usize> + '_ {
        let side = self.m + 1;
        let block = stride * side;
        (0..self.cells / block).flat_map(move |outer| (0..stride).map(move |inner| outer * block + inner))
    }

    /// Per-cell count of failing parity lines through that cell.
    pub fn failed_dimension_markers(&self, cells: &[u8]) -> Vec<u8> {
        let mut fdm = vec![0u8; self.cells];
        self.accumulate_fdm(cells, &mut fdm);
        fdm
    }

    fn accumulate_fdm(&self, cells: &[u8], fdm: &mut [u8]) {
        fdm.fill(0);
        let side = self.m + 1;
        for &stride in &self.strides {
            for base in self.line_bases(stride) {
                let parity = (0..side).fold(0u8, |acc, i| acc ^ cells[base + i * stride]);
                if parity != 0 {
                    for i in 0..side {
                        fdm[base + i * stride] += 1;
                    }
                }
            }
        }
    }

    /// True when every line has even parity.
    pub fn is_codeword(&self, cells: &[u8]) -> bool {
        let side = self.m + 1;
        self.strides.iter().all(|&stride| {
            self.line_bases(stride)
                .all(|base| (0..side).fold(0u8, |acc, i| acc ^ cells[base + i * stride]) == 0)
        })
    }

    /// Runs the FDM decoder on `cells` in place. Returns status, flip rounds
    /// and total flips.
    pub fn decode_in_place(&self, cells: &mut [u8], max_iterations: usize) -> (MdpcStatus, usize, usize) {
        assert_eq!(cells.len(), self.cells, "block size does not match the code");
        let mut fdm = vec![0u8; self.cells];
        let mut iterations = 0;
        let mut flips = 0;
        loop {
            self.accumulate_fdm(cells, &mut fdm);
            let max = fdm.iter().copied().max().unwrap_or(0);
            if max < 2 {
                let status = match (max, flips) {
                    (0, 0) => MdpcStatus::ErrorFree,
                    (0, _) => MdpcStatus::Corrected,
                    _ => MdpcStatus::Uncorrectable,
                };
                return (status, iterations, flips);
            }
            if iterations == max_iterations {
                return (MdpcStatus::Uncorrectable, iterations, flips);
            }
            for (cell, &marker) in cells.iter_mut().zip(&fdm) {
                if marker == max {
                    *cell ^= 1;
                    flips += 1;
                }
            }
            iterations += 1;
        }
    }

    pub fn decode(&self, block: &MdpcBlock, max_iterations: usize) -> Result<MdpcDecoded, CodecError> {
        if block.n != self.n || block.m != self.m || block.cells.len() != self.cells {
            return Err(CodecError::Dimensions(format!(
                "block is MDPC({}D/{}L) with {} cells, decoder is MDPC({}D/{}L)",
                block.n,
                block.m,
                block.cells.len(),
                self.n,
                self.m
            )));
        }
        let mut cells = block.cells.clone();
        let (status, iterations, flips) = self.decode_in_place(&mut cells, max_iterations);
        Ok(MdpcDecoded {
            data: self.extract_data(&cells),
            status,
            iterations,
            flips,
        })
    }

    pub fn extract_data(&self, cells: &[u8]) -> Vec<u8> {
        self.data_cells.iter().map(|&c| cells[c]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sizes() {
        let c = MdpcCode::new(2, 2).unwrap();
        assert_eq!((c.k(), c.r()), (4, 5));
        let c = MdpcCode::new(3, 2).unwrap();
        assert_eq!((c.k(), c.r()), (9, 7));
        let c = MdpcCode::new(2, 3).unwrap();
        assert_eq!((c.k(), c.r()), (8, 19));
        assert_eq!(c.correction_capability(), 3);
    }

    #[test]
    fn rejects_degenerate_dimensions() {
        assert!(MdpcCode::new(1, 2).is_err());
        assert!(MdpcCode::new(4, 1).is_err());
        let c = MdpcCode::new(2, 2).unwrap();
        assert_eq!(
            c.encode(&[1, 0, 1]).unwrap_err(),
            CodecError::Length { expected: 4, actual: 3 }
        );
    }

    #[test]
    fn zero_data_gives_zero_parity() {
        let block = MdpcCode::new(2, 2).unwrap().encode(&[0; 4]).unwrap();
        assert!(block.cells.iter().all(|&b| b == 0));
    }

    #[test]
    fn single_one_in_2x2() {
        // Layout [d00 d01 p0; d10 d11 p1; c0 c1 corner].
        let block = MdpcCode::new(2, 2).unwrap().encode(&[1, 0, 0, 0]).unwrap();
        assert_eq!(block.cells, vec![1, 0, 1, 0, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn single_error_has_fdm_two_only_at_error() {
        let code = MdpcCode::new(4, 2).unwrap();
        let mut block = code.encode(&[1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0, 0, 1, 0, 1]).unwrap();
        block.cells[7] ^= 1;
        let fdm = code.failed_dimension_markers(&block.cells);
        for (i, &f) in fdm.iter().enumerate() {
            assert_eq!(f == 2, i == 7);
        }
    }

    #[test]
    fn clean_block_decodes_without_flips() {
        let code = MdpcCode::new(5, 3).unwrap();
        let data: Vec<u8> = (0..125).map(|i| (i % 3 == 0) as u8).collect();
        let out = code.decode(&code.encode(&data).unwrap(), DEFAULT_MAX_ITERATIONS).unwrap();
        assert_eq!(out.status, MdpcStatus::ErrorFree);
        assert_eq!((out.iterations, out.flips), (0, 0));
        assert_eq!(out.data, data);
    }

    #[test]
    fn two_errors_in_one_row_stall() {
        let code = MdpcCode::new(4, 2).unwrap();
        let data = vec![0u8; 16];
        let mut block = code.encode(&data).unwrap();
        block.cells[5] ^= 1;
        block.cells[7] ^= 1;
        let out = code.decode(&block, DEFAULT_MAX_ITERATIONS).unwrap();
        assert_eq!(out.status, MdpcStatus::Uncorrectable);
        assert_eq!(out.flips, 0);
    }

    #[test]
    fn three_d_corrects_up_to_three_errors_at_fixed_pattern() {
        let code = MdpcCode::new(3, 3).unwrap();
        let data: Vec<u8> = (0..27).map(|i| (i % 2) as u8).collect();
        let clean = code.encode(&data).unwrap();
        let mut block = clean.clone();
        for &p in &[0usize, 21, 42] {
            block.cells[p] ^= 1;
        }
        let out = code.decode(&block, DEFAULT_MAX_ITERATIONS).unwrap();
        assert_eq!(out.status, MdpcStatus::Corrected);
        assert_eq!(out.data, data);
    }

    proptest! {
        #[test]
        fn every_line_even_after_encode(m in 2usize..7, n in 2u32..5, seed in any::<u64>()) {
            let code = MdpcCode::new(m, n).unwrap();
            let data: Vec<u8> = (0..code.k()).map(|i| ((seed >> (i % 64)) & 1) as u8).collect();
            let block = code.encode(&data).unwrap();
            prop_assert!(code.is_codeword(&block.cells));
            prop_assert_eq!(code.extract_data(&block.cells), data);
        }

        #[test]
        fn flips_only_happen_when_max_fdm_reaches_two(m in 2usize..6, errs in proptest::collection::vec(0usize..49, 0..4)) {
            let code = MdpcCode::new(m, 2).unwrap();
            let mut cells = code.encode(&vec![0; code.k()]).unwrap().cells;
            for e in errs {
                cells[e % code.len()] ^= 1;
            }
            let max = code.failed_dimension_markers(&cells).into_iter().max().unwrap();
            let (status, _, flips) = code.decode_in_place(&mut cells, DEFAULT_MAX_ITERATIONS);
            if max < 2 {
                prop_assert_eq!(flips, 0);
            }
            if status != MdpcStatus::Uncorrectable {
                prop_assert!(code.is_codeword(&cells));
            }
        }
    }
}
