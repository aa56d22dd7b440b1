//! Virasoro and Neveu–Schwarz superalgebras: brackets, enveloping-algebra normal
//! ordering, Verma modules, singular vectors and truncated representation matrices.

mod matrix;
mod solve;
mod symbols;
mod uea;
mod verma;

pub use matrix::{matrix_to_json, operator_matrix, q_matrix, vector_field_element, GrassmannMatrix, TruncatedBasis};
pub use solve::{
    fit_rational_function, fit_singular_relations, nullspace, rref, solve_coefficients, solve_singular_params,
    FittedRelations, Poly, RationalFunction, SingularTemplate, Solution, SolveReport, WeightName,
};
pub use symbols::{bracket, Algebra, Family, GeneratorSymbol, LieElement, Ns2Table};
pub use uea::{
    is_pbw_ordered, monomial_is_odd, monomial_mode2, monomial_to_string, normal_order_monomial, parse_monomial,
    Monomial, UEAElement,
};
pub use verma::{pbw_basis, SingularReport, VermaModule, VermaVector, Weights};

use crate::error::{Error, Result};

/// Accepts `vir`/`virasoro`, `ns1`, `ns2` (standard table) and `ns2-printed`.
pub fn parse_algebra(s: &str) -> Result<Algebra> {
    match s.trim().to_ascii_lowercase().as_str() {
        "vir" | "virasoro" => Ok(Algebra::Virasoro),
        "ns1" | "n1" | "n=1" => Ok(Algebra::Ns1),
        "ns2" | "n2" | "n=2" | "ns2-standard" => Ok(Algebra::Ns2(Ns2Table::Standard)),
        "ns2-printed" => Ok(Algebra::Ns2(Ns2Table::Printed)),
        other => Err(Error::Usage(format!("unknown algebra '{other}'"))),
    }
}
