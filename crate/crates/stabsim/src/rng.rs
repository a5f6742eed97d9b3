//! Integer-only seeded PRNG used everywhere randomness is needed, so that
//! every run is reproducible bit-exactly from a single `--seed`.

/// splitmix64 generator.
///
/// Chosen for cross-language reproducibility: the whole state is one `u64`
/// and the output sequence is fixed by the seed, with no floating point
/// anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Next raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, bound)` by modulo reduction.
    ///
    /// The bias is irrelevant at the bounds used here (tiny domains vs 2^64)
    /// and keeping the scheme to a single `%` makes it trivial to reproduce
    /// in another language. Panics if `bound == 0`.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        self.next_u64() % bound
    }

    /// Uniform nonzero `bits`-bit mask, i.e. a draw from `[1, 2^bits - 1]`.
    ///
    /// Masking to `bits` bits is exact (power-of-two range) and zero is
    /// rejected by redrawing, so the result is unbiased.
    pub fn next_nonzero_mask(&mut self, bits: u32) -> u64 {
        assert!((1..=63).contains(&bits), "bits must be in 1..=63");
        let mask = (1u64 << bits) - 1;
        loop {
            let x = self.next_u64() & mask;
            if x != 0 {
                return x;
            }
        }
    }

    /// Derives an independent stream for subtask `index`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut root = SplitMix64::new(seed);
        let a = root.next_u64();
        SplitMix64::new(a ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}
