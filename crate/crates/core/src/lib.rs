//! Numerical verification toolkit for the quotient of the round sphere by a
//! linear deck transformation: the centralizer of the deck matrix inside
//! `sl(n+1)`, projective maps and their descent, and Randers geodesics.

pub mod error;
pub mod liealg;
pub mod numkernel;
pub mod quotient;
pub mod randers;
pub mod sampling;
pub mod sphere;

pub use error::{Error, Result};
pub use liealg::{
    build_deck_matrix, centralizer, centralizer_with_tol, classify_block_form, classify_flow,
    dimension_report, BlockForm, BlockFormMatrix, CentralizerBasis, DeckMatrix, DimensionReport,
};
pub use numkernel::{Matrix, Vector};
pub use quotient::{canonical_representative, descends, same_quotient_map, QuotientSpace};
pub use randers::{
    curves_projectively_equal, evaluate_f, integrate_geodesic, validate_finsler, GeodesicCurve,
    RandersData,
};
pub use sphere::{apply, map_great_circle, ProjectiveMap, SpherePoint};
