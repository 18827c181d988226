//! Beltrami coefficients on the unit disk built from twisted annular
//! layers, and two-sided certification of asymptotic Teichmüller distances
//! between them.
//!
//! Upper bounds come from sup-norms and boundary dilatations of explicit
//! representatives; lower bounds come from pairings against named
//! degenerating families of holomorphic quadratic differentials.

pub mod asymptotic;
pub mod beltrami;
pub mod certify;
pub mod error;
pub mod geodesic;
pub mod geometry;
pub mod metric;
pub mod quad;
pub mod reich;
pub mod report;

pub use error::{Error, Result};
