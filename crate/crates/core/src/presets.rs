//! Named models used by tests, benches and the CLI.

use crate::clock::{build_clock, ClockSpec};
use num_complex::Complex64;

use crate::constraint::{build_model, ConstraintModel, SystemSpec, TOL_MATCH};
use crate::framechange::{mirrored_model, ThreeFrameModel};
use crate::linalg::{pauli_x, real_diag, CMat};

/// Clock `{0,1,2,3}` on the circle `t_max = 2π`.
pub fn m1_clock() -> ClockSpec {
    ClockSpec::compact_integers(0, 3)
}

/// `Ĥ_S = diag(-1, -2)`.
pub fn m1_system() -> CMat {
    real_diag(&[-1.0, -2.0])
}

/// Clock `{-2,…,2}` on the circle `t_max = 2π`.
pub fn m2_clock() -> ClockSpec {
    ClockSpec::compact_integers(-2, 2)
}

/// `Ĥ_S = σ_x`.
pub fn m2_system() -> CMat {
    pauli_x()
}

/// Model M1: 8-dimensional kinematical space, both system levels matched.
pub fn m1() -> ConstraintModel {
    build_model(build_clock(m1_clock()).expect("valid clock"), SystemSpec::new(m1_system()).expect("hermitian"), TOL_MATCH)
        .expect("valid model")
}

/// Model M2: 10-dimensional kinematical space, `Π_σSC = I_S`.
pub fn m2() -> ConstraintModel {
    build_model(build_clock(m2_clock()).expect("valid clock"), SystemSpec::new(m2_system()).expect("hermitian"), TOL_MATCH)
        .expect("valid model")
}

/// `Ĥ_S = R diag(-2, -3) R†` with `R = e^{-0.35 i σ_x}`, so the position basis is not an energy basis.
pub fn three_frame_system() -> CMat {
    let r = (pauli_x() * Complex64::new(0.0, -0.35)).exp();
    &r * real_diag(&[-2.0, -3.0]) * r.adjoint()
}

/// Clocks A and B both `{0,1,2,3}` on `t_max = 2π` around [`three_frame_system`]; seven kernel triples.
pub fn three_frame() -> ThreeFrameModel {
    mirrored_model(&m1_clock(), three_frame_system(), TOL_MATCH).expect("valid model")
}

pub fn by_name(name: &str) -> Option<(ClockSpec, CMat)> {
    match name {
        "M1" | "m1" => Some((m1_clock(), m1_system())),
        "M2" | "m2" => Some((m2_clock(), m2_system())),
        _ => None,
    }
}
