//! Morphological amoebas: image-adaptive structuring elements grown by Dijkstra
//! on the 8-connected pixel graph, biased rank selection, and the iterated amoeba
//! median filter (AMF) and amoeba active contour (AAC) drivers.

pub mod amoeba;
pub mod filter;
pub mod metric;
pub mod rank;

pub use amoeba::{compute_amoeba, Amoeba, AmoebaBuilder};
pub use filter::{aac_step, amf_step, run_iterations, AmoebaSet, DriverConfig, Mode, Snapshot};
pub use metric::{AmoebaMetric, MetricKind};
pub use rank::{rank_select, BiasKind, BiasSpec, ResolvedBias};
