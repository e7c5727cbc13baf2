//! Multi-equation econometrics toolkit.
//!
//! Estimates single-equation probit and OLS models, bivariate probit
//! models with correlated latent errors, and two-equation SUR systems by
//! feasible generalized least squares. The [`inference`] module provides
//! standard errors, t-tests, AIC model comparison, the Breusch-Pagan
//! independence test and ROC AUC. The [`datamodel`] module ingests
//! business-record CSV files and builds design matrices from a small
//! formula language, and [`synthetic`] generates seeded known-parameter
//! populations for parameter-recovery validation.

pub mod datamodel;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod numerics;
pub mod synthetic;

pub use error::{Error, Result};

// Re-exported so downstream consumers name the same matrix types.
pub use nalgebra;
