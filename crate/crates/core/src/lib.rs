//! Maximal pairwise concurrence of translationally invariant qubit rings.
//!
//! A ring of `N` qubits with a fixed number `p` of up-spins admits
//! translationally invariant pure states built from superpositions of
//! necklace configurations. This crate computes the maximal concurrence
//! between nearest (and qth) neighbors over such states by four mutually
//! checking routes:
//!
//! - [`ow`]: the restricted problem with no adjacent up-spins, solved as an
//!   eigenproblem and by its closed form,
//! - [`lagrange`]: the p = 2 multiplier method reducing to a tridiagonal
//!   root problem,
//! - [`xxz`]: exact unrestricted maximization via ground states of an XXZ
//!   Hamiltonian family swept over a linearization parameter `s`,
//! - [`oracle`]: direct nonlinear ascent on the amplitude sphere.
//!
//! [`stability`] decides whether the restricted optimum survives as a local
//! maximum of the unrestricted problem, and [`qneighbor`] reduces qth-neighbor
//! maximization to nearest-neighbor problems on smaller rings.

pub mod basis;
pub mod eigen;
pub mod error;
pub mod lagrange;
pub mod oracle;
pub mod ow;
pub mod qneighbor;
pub mod quadratic;
pub mod rdm;
pub mod rng;
pub mod stability;
pub mod xxz;

pub use basis::{BasisState, Necklace, SymmetricBasis};
pub use error::{Error, Result};
pub use rdm::{concurrence, single_site_entropy, two_site_rdm, AmplitudeVector, TwoSiteRdm};
pub use xxz::{cmax_exact, sweep, SweepGrid, SweepResult};
