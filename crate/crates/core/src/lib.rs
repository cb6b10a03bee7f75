//! Chern-connection apparatus of Finsler structures in local coordinates:
//! fundamental and Cartan tensors, nonlinear and Chern connections, hh- and
//! hv-curvature, horizontal covariant derivatives, and sampled certificates
//! of symmetry, Berwald / Landsberg type and constant flag curvature.
//!
//! All derivatives come from truncated Taylor arithmetic ([`ad::Jet`]).

pub mod ad;
pub mod cli;
pub mod connection;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod metrics;
pub mod report;
pub mod symmetry;
pub mod tensor;
pub mod tolerance;

pub use error::{Error, Result};
