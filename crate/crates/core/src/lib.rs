//! Free-field realisation of the q-deformed Virasoro algebra on a truncated
//! Fock space, with numerical certification of its exchange relations and
//! evaluation of screened four-point functions.
//!
//! Module map:
//! - [`qspecial`]: Pochhammer symbols, q-Gamma/Beta, theta, 2phi1, Jackson integrals, brackets.
//! - [`series`]: truncated Laurent series and two-variable coefficient tables.
//! - [`fock`]: Heisenberg modes, charged Fock states, exponential vertex operators.
//! - [`voa`]: the named currents and vertex operators, involutions, structure functions.
//! - [`relations`]: identity checkers returning [`CheckReport`]s.
//! - [`correlators`]: two-point and four-point functions, connection matrices.

pub mod correlators;
pub mod error;
pub mod fock;
pub mod qspecial;
pub mod relations;
pub mod report;
pub mod series;
pub mod voa;

pub use num_complex::Complex64;

pub use error::{Direction, Error, Result};
pub use fock::{FockState, NormalOrderedVertex, OperatorProduct, Partition};
pub use qspecial::{BracketParams, QParams, SeriesControl};
pub use report::{CheckReport, Location, ParamRecord, Status, TruncationRecord};
pub use series::{CoeffTable, LaurentSeries};
pub use voa::{Involution, OperatorSum, Sign, StructureFamily};
pub use relations::CheckConfig;
pub use correlators::{ConnectionMatrix, CorrelatorParams, MatrixVariant};
