//! Potential definitions and boundary constants.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::OracleError;
use crate::c64;
use crate::spline::CubicSpline;

/// The complex Robin constants `h` (at `x = 0`) and `H` (at `x = b`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConstants {
    pub h: Complex64,
    pub big_h: Complex64,
}

impl BoundaryConstants {
    pub fn new(h: Complex64, big_h: Complex64) -> Self {
        Self { h, big_h }
    }

    pub fn real(h: f64, big_h: f64) -> Self {
        Self::new(c64(h, 0.0), c64(big_h, 0.0))
    }

    pub fn is_real(&self) -> bool {
        self.h.im == 0.0 && self.big_h.im == 0.0
    }

    pub fn conj(&self) -> Self {
        Self::new(self.h.conj(), self.big_h.conj())
    }
}

/// Built-in closed-form potentials, addressable by a string id.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinPotential {
    /// "zero": q = 0
    Zero,
    /// "x^2"
    XSquared,
    /// "exp(x)": the first Paine potential
    Exp,
    /// "exp(x)+pi*i"
    ExpPlusPiI,
    /// "powcos8": (x^(pi/2) + pi) cos(8x) + pi^2 - i sqrt(5)
    PowCos8,
    /// "mathieu(s)": i s cos(2x)
    Mathieu { s: f64 },
    /// "paine2_imag": exp(x) + i/(x+0.1)^2 (both Paine potentials)
    Paine2Imag,
    /// "nonsmooth_abs": |3 - |x^2 - 3|| + i |cos 2x|
    NonsmoothAbs,
}

impl BuiltinPotential {
    pub fn parse(id: &str) -> Result<Self, OracleError> {
        let id = id.trim();
        Ok(match id {
            "zero" | "0" => Self::Zero,
            "x^2" => Self::XSquared,
            "exp(x)" => Self::Exp,
            "exp(x)+pi*i" => Self::ExpPlusPiI,
            "powcos8" => Self::PowCos8,
            "paine2_imag" => Self::Paine2Imag,
            "nonsmooth_abs" => Self::NonsmoothAbs,
            _ => {
                if let Some(rest) = id.strip_prefix("mathieu(").and_then(|r| r.strip_suffix(')')) {
                    let s: f64 = rest
                        .parse()
                        .map_err(|_| OracleError::InvalidPotential(format!("bad parameter: {id}")))?;
                    Self::Mathieu { s }
                } else {
                    return Err(OracleError::InvalidPotential(format!("unknown id: {id}")));
                }
            }
        })
    }

    pub fn id(&self) -> String {
        match self {
            Self::Zero => "zero".to_string(),
            Self::XSquared => "x^2".to_string(),
            Self::Exp => "exp(x)".to_string(),
            Self::ExpPlusPiI => "exp(x)+pi*i".to_string(),
            Self::PowCos8 => "powcos8".to_string(),
            Self::Mathieu { s } => format!("mathieu({s})"),
            Self::Paine2Imag => "paine2_imag".to_string(),
            Self::NonsmoothAbs => "nonsmooth_abs".to_string(),
        }
    }

    fn eval(&self, x: f64) -> Complex64 {
        match self {
            Self::Zero => Complex64::default(),
            Self::XSquared => c64(x * x, 0.0),
            Self::Exp => c64(x.exp(), 0.0),
            Self::ExpPlusPiI => c64(x.exp(), PI),
            Self::PowCos8 => c64((x.powf(PI / 2.0) + PI) * (8.0 * x).cos() + PI * PI, -5.0_f64.sqrt()),
            Self::Mathieu { s } => c64(0.0, s * (2.0 * x).cos()),
            Self::Paine2Imag => c64(x.exp(), 1.0 / ((x + 0.1) * (x + 0.1))),
            Self::NonsmoothAbs => c64((3.0 - (x * x - 3.0).abs()).abs(), (2.0 * x).cos().abs()),
        }
    }

    fn is_real(&self) -> bool {
        matches!(self, Self::Zero | Self::XSquared | Self::Exp)
    }

    /// For potentials of the form `real(x) + i c`: the constant `c`.
    /// Lets the generator reuse the real-line eigenvalue finder and shift.
    fn constant_im_shift(&self) -> Option<f64> {
        match self {
            Self::Zero | Self::XSquared | Self::Exp => Some(0.0),
            Self::ExpPlusPiI => Some(PI),
            Self::PowCos8 => Some(-(5.0_f64.sqrt())),
            Self::Mathieu { s } => {
                if *s == 0.0 {
                    Some(0.0)
                } else {
                    None
                }
            }
            Self::Paine2Imag | Self::NonsmoothAbs => None,
        }
    }

}

/// Description of the potential `q` on `[0, b]`.
#[derive(Debug, Clone)]
pub struct PotentialSpec {
    kind: PotentialKind,
    b: f64,
}

#[derive(Debug, Clone)]
enum PotentialKind {
    ClosedForm(BuiltinPotential),
    Tabulated {
        re: CubicSpline,
        im: CubicSpline,
        table: Vec<(f64, Complex64)>,
    },
    /// Real part of a built-in (internal, for the eigenvalue shift trick).
    RealPartOf(BuiltinPotential),
    /// Complex conjugate of a built-in (equivariance tests).
    ConjOf(BuiltinPotential),
}

impl PotentialSpec {
    pub fn closed_form(p: BuiltinPotential, b: f64) -> Result<Self, OracleError> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(OracleError::InvalidPotential("b must be positive".into()));
        }
        Ok(Self {
            kind: PotentialKind::ClosedForm(p),
            b,
        })
    }

    pub fn builtin(id: &str, b: f64) -> Result<Self, OracleError> {
        Self::closed_form(BuiltinPotential::parse(id)?, b)
    }

    /// Tabulated potential; requires ascending abscissae covering `[0, b]`
    /// with spacing at most `b/256` and finite values.
    pub fn tabulated(points: &[(f64, Complex64)], b: f64) -> Result<Self, OracleError> {
        if !(b > 0.0) || !b.is_finite() {
            return Err(OracleError::InvalidPotential("b must be positive".into()));
        }
        if points.len() < 2 {
            return Err(OracleError::InvalidPotential("need at least 2 points".into()));
        }
        if points[0].0 > 0.0 || points.last().unwrap().0 < b {
            return Err(OracleError::InvalidPotential(
                "table must cover [0, b]".into(),
            ));
        }
        let max_gap = b / 256.0;
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(OracleError::InvalidPotential("x must be ascending".into()));
            }
            if w[1].0 - w[0].0 > max_gap * (1.0 + 1e-12) {
                return Err(OracleError::InvalidPotential(format!(
                    "table spacing {} exceeds b/256 = {}",
                    w[1].0 - w[0].0,
                    max_gap
                )));
            }
        }
        if points.iter().any(|(_, v)| !v.is_finite()) {
            return Err(OracleError::InvalidPotential("non-finite value".into()));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let re: Vec<f64> = points.iter().map(|p| p.1.re).collect();
        let im: Vec<f64> = points.iter().map(|p| p.1.im).collect();
        Ok(Self {
            kind: PotentialKind::Tabulated {
                re: CubicSpline::natural(&xs, &re),
                im: CubicSpline::natural(&xs, &im),
                table: points.to_vec(),
            },
            b,
        })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.kind {
            PotentialKind::ClosedForm(p) => p.eval(x),
            PotentialKind::Tabulated { re, im, .. } => c64(re.eval(x), im.eval(x)),
            PotentialKind::RealPartOf(p) => c64(p.eval(x).re, 0.0),
            PotentialKind::ConjOf(p) => p.eval(x).conj(),
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self.kind, PotentialKind::Tabulated { .. })
    }

    pub fn is_real(&self) -> bool {
        match &self.kind {
            PotentialKind::ClosedForm(p) => p.is_real(),
            PotentialKind::Tabulated { table, .. } => table.iter().all(|(_, v)| v.im == 0.0),
            PotentialKind::RealPartOf(_) => true,
            PotentialKind::ConjOf(p) => p.is_real(),
        }
    }

    /// `Some(c)` when `q(x) = Re q(x) + i c`; the real-part problem then has
    /// the same eigenvalues shifted by `-i c`.
    pub fn constant_im_shift(&self) -> Option<f64> {
        match &self.kind {
            PotentialKind::ClosedForm(p) => p.constant_im_shift(),
            PotentialKind::ConjOf(p) => p.constant_im_shift().map(|c| -c),
            _ => None,
        }
    }

    /// The potential `Re q(x)`, when available in closed form.
    pub fn real_part(&self) -> Option<Self> {
        match &self.kind {
            PotentialKind::ClosedForm(p) if p.is_real() => Some(self.clone()),
            PotentialKind::ClosedForm(p) | PotentialKind::ConjOf(p) => Some(Self {
                kind: PotentialKind::RealPartOf(p.clone()),
                b: self.b,
            }),
            PotentialKind::RealPartOf(_) => Some(self.clone()),
            PotentialKind::Tabulated { .. } => None,
        }
    }

    /// The potential `conj(q(x))`.
    pub fn conj(&self) -> Self {
        match &self.kind {
            PotentialKind::ClosedForm(p) => Self {
                kind: PotentialKind::ConjOf(p.clone()),
                b: self.b,
            },
            PotentialKind::ConjOf(p) => Self {
                kind: PotentialKind::ClosedForm(p.clone()),
                b: self.b,
            },
            PotentialKind::Tabulated { table, .. } => {
                let conj_table: Vec<(f64, Complex64)> =
                    table.iter().map(|(x, v)| (*x, v.conj())).collect();
                Self::tabulated(&conj_table, self.b).expect("conj of valid table is valid")
            }
            PotentialKind::RealPartOf(p) => Self {
                kind: PotentialKind::RealPartOf(p.clone()),
                b: self.b,
            },
        }
    }

    /// Coarse bound on `sup |q|`, sampled; used for search hints only.
    pub fn sup_estimate(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..=128 {
            let x = self.b * i as f64 / 128.0;
            m = m.max(self.eval(x).norm());
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_roundtrip() {
        for id in [
            "zero",
            "x^2",
            "exp(x)",
            "exp(x)+pi*i",
            "powcos8",
            "mathieu(2)",
            "paine2_imag",
            "nonsmooth_abs",
        ] {
            let p = BuiltinPotential::parse(id).unwrap();
            assert_eq!(p.id(), id);
        }
        assert!(BuiltinPotential::parse("nope").is_err());
        assert!(BuiltinPotential::parse("mathieu(x)").is_err());
    }

    #[test]
    fn eval_spot_checks() {
        let q = PotentialSpec::builtin("x^2", 1.0).unwrap();
        assert_eq!(q.eval(0.5), c64(0.25, 0.0));
        let q = PotentialSpec::builtin("mathieu(2)", PI).unwrap();
        assert_eq!(q.eval(0.0), c64(0.0, 2.0));
        assert!((q.eval(PI / 2.0) - c64(0.0, -2.0)).norm() < 1e-15);
        let q = PotentialSpec::builtin("paine2_imag", PI).unwrap();
        assert!((q.eval(0.0) - c64(1.0, 100.0)).norm() < 1e-12);
    }

    #[test]
    fn tabulated_matches_closed_form() {
        let b = 1.0;
        let n = 400;
        let pts: Vec<(f64, Complex64)> = (0..=n)
            .map(|i| {
                let x = b * i as f64 / n as f64;
                (x, c64(x * x, -x))
            })
            .collect();
        let q = PotentialSpec::tabulated(&pts, b).unwrap();
        for i in 0..=37 {
            let x = b * i as f64 / 37.0;
            assert!((q.eval(x) - c64(x * x, -x)).norm() < 1e-6);
        }
        assert!(!q.is_real());
    }

    #[test]
    fn tabulated_validation() {
        // too sparse
        let pts: Vec<(f64, Complex64)> = (0..=10)
            .map(|i| (i as f64 / 10.0, Complex64::default()))
            .collect();
        assert!(PotentialSpec::tabulated(&pts, 1.0).is_err());
        // does not cover [0, b]
        let pts: Vec<(f64, Complex64)> = (0..=300)
            .map(|i| (0.5 + 0.5 * i as f64 / 300.0, Complex64::default()))
            .collect();
        assert!(PotentialSpec::tabulated(&pts, 1.0).is_err());
    }

    #[test]
    fn shift_and_real_part() {
        let q = PotentialSpec::builtin("exp(x)+pi*i", PI).unwrap();
        assert_eq!(q.constant_im_shift(), Some(PI));
        let rp = q.real_part().unwrap();
        assert!(rp.is_real());
        assert_eq!(rp.eval(1.0), c64(1.0_f64.exp(), 0.0));

        let q = PotentialSpec::builtin("powcos8", PI).unwrap();
        assert_eq!(q.constant_im_shift(), Some(-(5.0_f64.sqrt())));
        let rp = q.real_part().unwrap();
        assert!(rp.is_real());
        assert_eq!(rp.eval(0.3).re, q.eval(0.3).re);

        let q = PotentialSpec::builtin("mathieu(2)", PI).unwrap();
        assert_eq!(q.constant_im_shift(), None);
    }

    #[test]
    fn conj_flips_imaginary_part() {
        let q = PotentialSpec::builtin("mathieu(2)", PI).unwrap();
        let qc = q.conj();
        assert_eq!(qc.eval(0.3), q.eval(0.3).conj());
    }
}
