//! Progressive sampling from two populations and its Monte Carlo engine.

mod component;
mod rng;
mod sampling;
mod simulate;
mod theory;

pub use component::{standardize, ComponentKind, ComponentSpec, Population};
pub use rng::{substream_seed, ReplicationStream, STREAM_VERSION};
pub use sampling::{mixture_draw, progressive_sample, SamplePath, PATH_CAP};
pub use simulate::{
    replicate, simulate, simulate_with_threads, summarize, ProcessKind, SimulationConfig,
    SimulationReport, DEFAULT_MAX_OBSERVATIONS,
};
pub use theory::{
    mixture_draw_variance_exact, theoretical_variance_mixture, theoretical_variance_pathmean,
    variance_decomposition, VarianceDecomposition,
};
