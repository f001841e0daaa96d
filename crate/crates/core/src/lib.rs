//! Optoacoustic coupling between Laguerre-Gaussian cavity modes and mirror
//! surface acoustic modes, and the fidelity of transferring a coherent optical
//! state into the acoustic mode.
//!
//! [`coupling`] evaluates the dimensionless overlap ξ analytically and by
//! direct quadrature; [`search`] and [`sweep`] scan it over mode orders and
//! produce the datasets written by [`output`].
#![allow(clippy::excessive_precision)]

pub mod config;
pub mod coupling;
pub mod error;
pub mod modes;
pub mod output;
pub mod quadrature;
pub mod search;
pub mod specfun;
pub mod sweep;
pub mod transfer;
