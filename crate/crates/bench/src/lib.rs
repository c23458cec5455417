// SPDX-License-Identifier: MIT OR Apache-2.0

//! Shared inputs for the criterion benchmarks.

use rnsp_core::rng::stream_rng;
use rnsp_core::{Model, Series};

/// A reproducible sample path of `model`.
pub fn sample_path(model: Model, seed: u64) -> Series {
    model.generate(&mut stream_rng(seed, 0)).0
}

/// `n` i.i.d. standard normal observations, built from consecutive null paths.
pub fn gaussian_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut stream = 0;
    while out.len() < n {
        let path = Model::PlainGauss.generate(&mut stream_rng(seed, stream)).0;
        out.extend_from_slice(path.values());
        stream += 1;
    }
    out.truncate(n);
    out
}
