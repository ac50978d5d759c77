//! Finite Haar groupoids and their weak pullbacks.
//!
//! A finite groupoid is given by explicit tables. Haar systems, unit space
//! measures and disintegrations are exact rational weights, so every measure
//! identity is checked as an equality of fractions.

pub mod constructions;
pub mod error;
pub mod groupoid;
pub mod haar;
pub mod io;
pub mod measure;
pub mod pullback;
pub mod weight;

pub use error::{Error, Result};
pub use groupoid::{ElementId, FiniteGroupoid, GroupoidHom, ValidationReport};
pub use haar::{HaarGroupoid, HaarSystem, ModularFunction};
pub use measure::{FiniteMap, FiniteMeasure, MeasureSystem};
pub use weight::Weight;
