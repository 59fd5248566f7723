//! Finite categories with size functors, higher-rank graphs, Zappa-Szép
//! actions of groupoids, and the passage between a generalized higher-rank
//! graph and the product `X ⋈ G` it decomposes into.

pub mod decompose;
pub mod degree;
pub mod doc;
pub mod fincat;
pub mod fixtures;
pub mod fuzz;
pub mod kgraph;
pub mod laws;
pub mod product;
pub mod zsaction;

pub use degree::Degree;
