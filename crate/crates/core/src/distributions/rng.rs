use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

/// Counter-based generator; one per task, never shared.
pub type StreamRng = ChaCha8Rng;

/// Generator for stream `stream_id` under `seed`. The same pair always
/// yields the same sequence regardless of thread scheduling.
pub fn rng_stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Folds a path of identifiers (replicate, group, chain, ...) into a single
/// stream id with splitmix64 mixing.
pub fn stream_id(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = splitmix(h);
    }
    h
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn draw_normal<R: Rng + ?Sized>(rng: &mut R, mu: f64, sigma: f64) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    mu + sigma * z
}

pub fn draw_uniform<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    a + (b - a) * rng.random::<f64>()
}

/// Gamma draw with `shape` and `scale`.
pub fn draw_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64) -> f64 {
    Gamma::new(shape, scale).expect("gamma parameters must be positive").sample(rng)
}

pub fn draw_beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    Beta::new(a, b).expect("beta parameters must be positive").sample(rng)
}
