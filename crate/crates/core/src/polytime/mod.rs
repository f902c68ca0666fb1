//! Exact polynomials over the hierarchy times, elementary Schur polynomials,
//! Schur functions of Young diagrams and Hirota bilinear derivatives.
//!
//! Every coefficient is an exact rational. The hatted derivative sets weight
//! the time in slot `j` of a side by `1/j`; a [`WeightedVar`] carries that
//! weight explicitly so the same routines serve both the plain Schur factors
//! of the moment matrix and the hatted bilinear operators.

mod hirota;
mod poly;
mod schur;
mod text;
mod timevar;

pub use hirota::{
    apply_terms, bilinear_from_tables, hirota_apply, schur_derivatives, schur_hirota_apply, schur_operator_terms,
    HirotaError, HirotaMonomial,
};
pub use poly::{poly_det, Exponents, MultiPoly};
pub use schur::{
    chain_vars, conjugate_identity_check, elementary_schur, schur_of_diagram, schur_table, InvalidDiagram,
    YoungDiagram,
};
pub use text::{parse_poly, parse_poly_infer, ParseError};
pub use timevar::{TimePoint, TimeSet, TimeVar, WeightedVar, Weighting};
