//! Seeded random streams.
//!
//! Every stochastic object (a network, a realization, a scaling-study sample)
//! draws from its own [`Pcg64`] stream derived from a master seed and an
//! index, so results never depend on how work is scheduled.

pub use rand_pcg::Pcg64;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 64-bit seed for child `index` of `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// RNG seeded from a plain 64-bit seed.
pub fn seeded(seed: u64) -> Pcg64 {
    let state = ((mix64(seed) as u128) << 64) | mix64(seed ^ 0xa076_1d64_78bd_642f) as u128;
    Pcg64::new(state, 0xda3e_39cb_94b9_5bdb)
}

/// Independent stream `index` under `master`; PCG stream selection keeps
/// streams disjoint even when the state words collide.
pub fn stream(master: u64, index: u64) -> Pcg64 {
    let state = ((mix64(master) as u128) << 64) | derive_seed(master, index) as u128;
    Pcg64::new(state, ((index as u128) << 1) | 1)
}
