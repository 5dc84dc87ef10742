//! Cauchy data: curves with a prescribed field, case classification and the
//! potential pairs that solve the geometric Cauchy problem.

mod catalog;
mod classify;
mod curve;
mod potentials;

pub use curve::{
    curve_from_samples, differentiate, principal_normal, read_curve_csv, Ambient, CurveData,
    CurveFn, CurvePoint, FieldFill, FieldKind,
};
pub use catalog::{catalog_curve, lookup, CatalogEntry, CurveSpec, CATALOG};
pub use classify::{classify, CaseKind, CaseReport, MinMax, CLASSIFY_SAMPLES, HYPOTHESIS_TOL};
pub use potentials::{
    cmc_frame, cmc_loop_potential, potential_cmc_noncharacteristic, potential_cmc_null,
    potential_psph_characteristic, potential_psph_noncharacteristic,
    potential_revolution_timelike, psph_invariants, psph_loop_potential, CauchyPotential,
    ComplexFn, CurveMap, Isometry, Placement, PsphInvariants, ScalarFn,
};
