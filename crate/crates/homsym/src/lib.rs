//! Generalized-homogeneous (dilation-symmetric) shallow neural networks.
//!
//! A function `h` is `d`-homogeneous of degree `nu` when `h(d(s)x) = e^{nu s} h(x)`
//! for a linear dilation group `d(s) = exp(s*G)`. Such symmetry turns any local
//! approximation into a global one: a network trained near the unit sphere
//! extrapolates along dilation orbits. This crate provides
//!
//! - linear dilation groups, canonical homogeneous norms, projectors and
//!   gradients ([`dilation`]);
//! - conventional and homogeneous shallow networks with least-squares output
//!   training and homogenization of trained nets ([`networks`]);
//! - data-driven identification of the homogeneity degree and of the dilation
//!   generator from a trained network ([`symmetry`]);
//! - worked application harnesses: rigid-body dynamics identification,
//!   scale-invariant glyph recognition, and homogeneous-norm refinement
//!   ([`apps`]).
//!
//! See the `examples/` directory for one runnable program per capability and
//! the `homsym` binary for a thin command-line front end.

pub mod apps;
pub mod cli;
pub mod dilation;
pub mod error;
pub mod io;
pub mod networks;
pub mod symmetry;

pub use dilation::{check_monotonicity, Dilation, Generator, HomogeneousNorm, NormBounds, WeightedNorm};
pub use error::{Error, Result};
pub use networks::{Activation, HomNet, LabeledDataset, Model, ShallowNet, Shell};

/// Internal parallelism, capped by the `HOMSYM_THREADS` environment variable.
pub(crate) mod parallel {
    use std::sync::OnceLock;

    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();

    /// Runs `f` inside the capped pool when `HOMSYM_THREADS` is set,
    /// otherwise on the default global pool.
    pub fn run<R: Send>(f: impl FnOnce() -> R + Send) -> R {
        let pool = POOL.get_or_init(|| {
            std::env::var("HOMSYM_THREADS")
                .ok()
                .and_then(|v| v.parse::<usize>().ok())
                .map(|n| {
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(n.max(1))
                        .build()
                        .expect("failed to build thread pool")
                })
        });
        match pool {
            Some(p) => p.install(f),
            None => f(),
        }
    }
}
