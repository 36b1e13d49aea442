//! Moving frames and constant-breadth curve pairs on strict Walker 3-manifolds.
//!
//! The metric is `g = 2 dx dz + dy² + f(y, z) dz²` on the global chart `(x, y, z)`.
//! [`metric`] evaluates `g`, its connection and cross product; [`curve`] and [`frenet`]
//! handle curves and Frenet frames; [`darboux`] adapts frames to timelike surfaces;
//! [`breadth`] integrates the coefficient systems of constant-breadth pairs, evaluates
//! their closed-form solutions and verifies assembled pairs.

// comparisons are written so that NaN falls into the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod breadth;
pub mod config;
pub mod curve;
pub mod darboux;
pub mod error;
pub mod expr;
pub mod field;
pub mod frenet;
pub mod io;
pub mod metric;
pub mod ode;
pub mod pipeline;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use expr::{Formula, ParseError};
pub use field::ScalarField2;
pub use metric::{CausalCharacter, ChristoffelTable, Point, Tangent, WalkerMetric};
