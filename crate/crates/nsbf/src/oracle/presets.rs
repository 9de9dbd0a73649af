//! Built-in example problems used by the test suites and shipped configs.

use alloc::format;
use core::f64::consts::{E, PI};

use super::{BoundaryConstants, OracleError, PotentialSpec, ProblemSetup};
use crate::c64;

/// q = x² on (0,1), h = 10, H = π.
pub fn ex1() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("x^2", 1.0).unwrap(),
        BoundaryConstants::real(10.0, PI),
    )
}

/// q = eˣ on (0,π), h = 10, H = π (first Paine potential).
pub fn ex2() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("exp(x)", PI).unwrap(),
        BoundaryConstants::real(10.0, PI),
    )
}

/// q = eˣ + πi on (0,π), h = 10, H = π.
pub fn ex2_complex() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("exp(x)+pi*i", PI).unwrap(),
        BoundaryConstants::real(10.0, PI),
    )
}

/// q = (x^{π/2}+π)cos(8x) + π² − i√5 on (0,π), h = √2, H = −e.
pub fn ex3() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("powcos8", PI).unwrap(),
        BoundaryConstants::real(2.0_f64.sqrt(), -E),
    )
}

/// q = 2i cos(2x) on (0,π), h = 0.7, H = i.
pub fn ex4() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("mathieu(2)", PI).unwrap(),
        BoundaryConstants::new(c64(0.7, 0.0), c64(0.0, 1.0)),
    )
}

/// q = eˣ + i/(x+0.1)² on (0,π), h = 1−i, H = e^i.
pub fn ex5() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("paine2_imag", PI).unwrap(),
        BoundaryConstants::new(c64(1.0, -1.0), c64(1.0_f64.cos(), 1.0_f64.sin())),
    )
}

/// q = |3−|x²−3|| + i|cos 2x| on (0,π), h = e^{2i}, H = π−i.
pub fn ex6() -> ProblemSetup {
    ProblemSetup::new(
        PotentialSpec::builtin("nonsmooth_abs", PI).unwrap(),
        BoundaryConstants::new(c64(2.0_f64.cos(), 2.0_f64.sin()), c64(PI, -1.0)),
    )
}

/// Same problem as [`ex3`]; conventionally paired with multiplier data.
pub fn ex7() -> ProblemSetup {
    ex3()
}

/// Same problem as [`ex4`]; conventionally paired with multiplier data.
pub fn ex8() -> ProblemSetup {
    ex4()
}

/// Lookup by the conventional name `ex1`..`ex8`.
pub fn by_name(name: &str) -> Result<ProblemSetup, OracleError> {
    Ok(match name {
        "ex1" => ex1(),
        "ex2" => ex2(),
        "ex2_complex" | "ex2b" => ex2_complex(),
        "ex3" => ex3(),
        "ex4" => ex4(),
        "ex5" => ex5(),
        "ex6" => ex6(),
        "ex7" => ex7(),
        "ex8" => ex8(),
        _ => {
            return Err(OracleError::InvalidData(format!(
                "unknown example name {name}"
            )))
        }
    })
}
