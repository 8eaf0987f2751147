//! Tropical principal component analysis over the space of ultrametrics.
//!
//! Everything in this crate works in the max-plus semiring on the tropical
//! projective torus `R^e / R1`. Equidistant phylogenetic trees enter through
//! their cophenetic vectors, which are exactly the points of the tropical
//! linear space of ultrametrics. On top of that the crate provides tropical
//! polytopes (projection, types, cells), Fermat-Weber points through a small
//! dense simplex solver, and the Markov chain Monte Carlo search for the
//! best-fit tropical polytope with a fixed number of vertices.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and thread pools live in the `troppca` companion crate.
#![no_std]

extern crate alloc;

pub mod error;
pub mod fermat_weber;
pub mod lp;
pub mod mcmc;
pub mod polytope;
pub mod rng;
pub mod sim;
pub mod tree;
pub mod tropical;
pub mod ultrametric;

pub use error::{Error, Result};
pub use fermat_weber::{fermat_weber, pull_into_hull, FermatWeberResult};
pub use mcmc::{fit, metropolis_accept, objective, propose, statistics, FitStatistics, Init, McmcConfig, PcaFit};
pub use polytope::{origin_in_hull, OriginWitness, Projection, TropicalPolytope, TypeVector};
pub use tree::RootedTree;
pub use tropical::{trop_add, trop_dist, trop_scale, trop_vec_add, TropicalPoint, TOLERANCE};
pub use ultrametric::{is_ultrametric, topologies_equal, topology_of, LeafPairIndex, TreeTopology, Ultrametric};
