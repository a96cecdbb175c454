//! Benchmark fixtures shared by the criterion targets.

use sdoflab::sampling::derive_seed;
use sdoflab::{construct_wth_scheme, sample_realization, stack, ChannelRealization, LinearScheme, RationalGrid, StackedChannel, SystemDims};

/// A realization, its stacked form and the aligned-noise scheme built on it.
pub fn fixture(n: usize, k: usize, seed: u64) -> (ChannelRealization, StackedChannel, LinearScheme) {
    let grid = RationalGrid::default();
    let dims = SystemDims::new(n, k, 2).expect("valid dims");
    let r = sample_realization(dims, derive_seed(seed, 0), grid).expect("realization");
    let s = construct_wth_scheme(r.legitimate(), derive_seed(seed, 1), grid).expect("scheme");
    let c = stack(&r);
    (r, c, s)
}
