//! Keyed ordering of embedding slots.
//!
//! The generator only decides *which* pixel pair is visited next; it never
//! touches sample values. SplitMix64 is used because its recurrence is a
//! handful of wrapping integer operations and reproduces bit-for-bit on any
//! platform.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// Shared secret driving the slot order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct StegoKey {
    pub seed: u64,
}

impl StegoKey {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn from_passphrase(passphrase: &[u8]) -> Self {
        Self::new(derive_seed(passphrase))
    }
}

impl From<u64> for StegoKey {
    fn from(seed: u64) -> Self {
        Self::new(seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// FNV-1a (64-bit) of a passphrase.
pub fn derive_seed(passphrase: &[u8]) -> u64 {
    passphrase
        .iter()
        .fold(FNV_OFFSET, |h, &b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

/// A bijection on `[0, n)` giving the visiting order of slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotPermutation {
    order: Vec<usize>,
}

impl SlotPermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().copied()
    }
}

/// Fisher–Yates from the top index down, `j = next_u64() mod (i + 1)`.
///
/// Modulo reduction (not rejection) keeps the draw count fixed at `n - 1`;
/// the bias is at most `n / 2^64`.
pub fn permutation(n: usize, key: StegoKey) -> SlotPermutation {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(key.seed);
    for i in (1..n).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        order.swap(i, j);
    }
    SlotPermutation { order }
}
