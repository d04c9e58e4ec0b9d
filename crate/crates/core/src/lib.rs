//! Vershik dynamics on ordered Bratteli diagrams at finite truncation:
//! path spaces, tail-invariant measures, graph approximants of the suspension
//! solenoid, martingale decompositions of cylinder functions, the cohomological
//! obstructions to `g∘φ - g = h`, a constructive solver, and the weighted
//! crossed-product algebra with its traces.

pub mod algebra;
pub mod builtin;
pub mod cli;
pub mod cohomology;
pub mod diagram;
pub mod error;
pub mod function;
pub mod io;
pub mod linalg;
pub mod martingale;
pub mod measures;
pub mod paths;
pub mod scalar;
pub mod solenoid;
pub mod solver;
pub mod space;

pub use diagram::{DiagramSpec, Extreme, Level, OrderedDiagram};
pub use error::{Error, Result};
pub use paths::{FinitePath, LazyPath, PathTable, Tail};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = num_rational::BigRational;

pub type RatFunction = function::CylinderFunction<Rational>;
pub type RealFunction = function::CylinderFunction<f64>;
pub type RatElement = algebra::AlgebraElement<Rational>;
pub type RealElement = algebra::AlgebraElement<f64>;
