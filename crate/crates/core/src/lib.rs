#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Spectral heat kernels on finite products of circles and SU(2).
//!
//! Densities of symmetric Gaussian semigroups generated by bi-invariant
//! Laplacians and their left-invariant, form-comparable perturbations are
//! computed from Peter-Weyl expansions with certified truncation bounds. On top
//! of that sit derivative seminorms, property scans for small-time Gaussian
//! estimates, and space-time mollification diagnostics.

pub mod cli;
pub mod error;
pub mod exec;
pub mod group;
pub mod heatkernel;
pub mod linalg;
pub mod mollify;
pub mod operators;
pub mod seminorms;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
