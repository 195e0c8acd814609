//! Seeded, splittable random streams.
//!
//! Every stochastic routine takes a 64-bit seed. Work is cut into fixed-size
//! chunks and chunk `k` draws from the stream keyed by `(seed, k)`, so results
//! do not depend on how many worker threads happen to run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The generator used everywhere in the crate.
pub type Stream = ChaCha8Rng;

/// Number of draws handled by a single stream in chunked Monte Carlo loops.
pub const CHUNK: usize = 1 << 14;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable child seed for `(parent, index)`.
pub fn split_seed(parent: u64, index: u64) -> u64 {
    splitmix64(splitmix64(parent) ^ splitmix64(index.wrapping_add(0x632b_e59b_d9b4_e019)))
}

/// Independent stream `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> Stream {
    Stream::seed_from_u64(split_seed(seed, index))
}

/// Runs `f` over `total` draws cut into [`CHUNK`]-sized pieces, in parallel.
///
/// `f` receives the chunk's own stream and the number of draws it owns. The
/// returned vector is in chunk order.
pub fn par_chunks<T, F>(total: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut Stream, usize) -> T + Sync,
{
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = CHUNK.min(total - k * CHUNK);
            let mut rng = stream(seed, k as u64);
            f(&mut rng, len)
        })
        .collect()
}

/// Parallel hit counter: `f` reports how many of its draws were hits.
pub fn par_count<F>(total: usize, seed: u64, f: F) -> u64
where
    F: Fn(&mut Stream, usize) -> u64 + Sync,
{
    par_chunks(total, seed, f).into_iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).map(|_| stream(7, 3).random()).collect();
        let b: Vec<u64> = (0..8).map(|_| stream(7, 3).random()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_indices_diverge() {
        let a: u64 = stream(7, 0).random();
        let b: u64 = stream(7, 1).random();
        let c: u64 = stream(8, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn chunk_results_cover_total() {
        let lens = par_chunks(3 * CHUNK + 5, 1, |_, len| len);
        assert_eq!(lens, vec![CHUNK, CHUNK, CHUNK, 5]);
        assert!(par_chunks(0, 1, |_, len| len).is_empty());
    }
}
