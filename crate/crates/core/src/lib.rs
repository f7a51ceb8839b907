//! Probability space of the generalized symmetric tequila (GST) model.
//!
//! `n` players each reveal a fair binary cause; player `i` then fires
//! (drinks) with a probability that depends only on how many causes agree
//! with its own. This crate decides which probability vectors give every
//! cause influence over every effect while keeping effects pairwise
//! independent, and probes the geometry of that solution set.

pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod model;
pub mod poly;
pub mod points;
pub mod quadform;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use error::{GstError, Result};
pub use scalar::{Mode, Rational, Scalar};
