//! Two-dimensional solvers for the ideal induction equation.
//!
//! The central scheme is a constrained-transport spectral difference method
//! (`ctsd`) advanced in time with ADER (`ader`), which keeps the magnetic
//! field exactly divergence free. Three discontinuous Galerkin variants
//! (`rkdg`) serve as comparisons, and `analysis` provides the diagnostics used
//! to tell them apart. `driver` wires everything into reproducible
//! experiments with CSV output.

pub mod ader;
pub mod analysis;
pub mod basis;
pub mod ctsd;
pub mod driver;
pub mod error;
pub mod grid;
pub mod rkdg;

pub use error::{Error, Result};
