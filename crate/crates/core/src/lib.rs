//! Exact desk-scale simulation of N-partner quantum secret sharing under
//! optimal individual eavesdropping.
//!
//! The crate builds the post-attack multiqubit states, computes the mutual
//! information available to authorized and unauthorized coalitions,
//! constructs CHSH and Mermin-Klyshko Bell operators, and maximizes Bell
//! values over measurement settings, including the double-violation search
//! over overlapping qubit subsets.
//!
//! Modules:
//! - [`qlinalg`]: dense complex linear algebra over qubit registers
//!   (tensor products, partial traces, Hermitian eigensolving).
//! - [`states`]: GHZ states, the x/y/z multiqubit basis family,
//!   conditional preparation, and the eavesdropping isometry.
//! - [`infotheory`]: Shannon entropies, Born-rule joint distributions and
//!   coalition mutual informations.
//! - [`bell`]: Bell operators, the Horodecki criterion, setting
//!   optimization and the overlapping-subset search.
//! - [`analysis`]: closed forms for the maximal Bell values of the
//!   post-attack states, the security equivalence, and scenario reports.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here can be shared and sent across threads.

pub mod analysis;
pub mod bell;
pub mod error;
pub mod infotheory;
pub mod qlinalg;
pub mod states;
pub mod tolerances;

pub use error::{Error, Result};
