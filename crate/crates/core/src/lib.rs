//! Exact, finite-scale computations on the boundaries of Cayley graphs.
//!
//! Everything here works on finite windows of an infinite space: balls of a
//! Cayley graph, truncated rays, finite tails of sequences. Every statement
//! about a limit is returned as a monotone certificate that can be replayed,
//! never as a bare boolean.
//!
//! Module map:
//! - [`metric`]: Gromov products, horofunctions and the hyperbolicity
//!   constant of a finite metric window.
//! - [`cayley`]: free groups and lattices, word metrics, BFS balls.
//! - [`rays`]: truncated rays and their geodesic classification.
//! - [`boundary`]: divergence certificates, horofunction profiles, the
//!   metric/Gromov equivalences and the quotient between them.
//! - [`action`]: the boundary action and the invariant-mean defect probe.

pub mod action;
pub mod boundary;
pub mod cayley;
pub mod error;
pub mod exact;
pub mod metric;
pub mod par;
pub mod rays;

pub use error::{Error, Result};
pub use exact::{Exact, HalfExact};
pub use rays::Verdict;
