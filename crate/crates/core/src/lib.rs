pub mod bounds;
pub mod cover;
pub mod error;
pub mod generate;
pub mod graph;
pub mod prooflab;
pub mod rng;
pub mod robustness;
pub mod scalar;
pub mod spectra;
pub mod suite;

pub use error::{Error, Result};
pub use graph::{Graph, InducedSubgraph};

pub type EdgeWeights = graph::EdgeWeights<f64>;
pub type VertexWeighting = graph::VertexWeighting<f64>;
pub type SymMatrix = spectra::SymMatrix<f64>;
pub type Spectrum = spectra::Spectrum<f64>;
pub use bounds::BoundVerdict;
