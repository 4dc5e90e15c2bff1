use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// Generator behind every trajectory: xoshiro256++ with a 2²⁵⁶ − 1 period.
pub type StreamRng = Xoshiro256PlusPlus;

/// Independent stream for `seed`.
///
/// The 64-bit seed is expanded to the 256-bit state with SplitMix64, so
/// consecutive seeds (`base_seed + i` in an ensemble) give decorrelated
/// streams. Streams that must be provably disjoint can instead be derived
/// from one seed with [`Xoshiro256PlusPlus::jump`], which advances by 2¹²⁸.
pub fn stream(seed: u64) -> StreamRng {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}
