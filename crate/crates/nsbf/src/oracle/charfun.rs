//! Solutions of the differential equation and characteristic functions.
//!
//! `phi_h`, `S` carry initial conditions at `x = 0`; `psi_H`, `T` at
//! `x = b`. The characteristic functions are
//! `Δ(ρ) = φ_h'(ρ,b) + H φ_h(ρ,b)` (zeros = spectrum of the Robin problem)
//! and `Δ⁰(ρ) = S'(ρ,b) + H S(ρ,b) = ψ_H(ρ,0)` (Dirichlet-at-0 problem).

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use num_complex::Complex64;

use super::integrate::{dp5_integrate, dp5_integrate_path, hf_transfer_matrix, Tolerances};
use super::{OracleError, ProblemSetup};
use crate::c64;

/// Fixed grid used for tabulated potentials instead of step adaptivity.
const TABULATED_STEPS: usize = 1 << 14;

/// `|ρ| b` beyond which closed-form potentials switch to the
/// high-frequency propagator.
const HF_THRESHOLD: f64 = 40.0;

/// Value and x-derivative of a solution at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionSample {
    pub value: Complex64,
    pub derivative: Complex64,
}

/// Which of the four distinguished solutions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    /// `φ_h`: value 1, slope `h` at `x = 0`.
    PhiH,
    /// `S`: value 0, slope 1 at `x = 0`.
    S,
    /// `ψ_H`: value 1, slope `-H` at `x = b`.
    PsiH,
    /// `T`: value 0, slope 1 at `x = b`.
    T,
}

/// A characteristic-function value together with the value obtained from
/// the opposite-endpoint formula.
#[derive(Debug, Clone, Copy)]
pub struct CharValue {
    pub value: Complex64,
    pub cross_check: Complex64,
}

impl CharValue {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.cross_check).norm()
            / self.value.norm().max(self.cross_check.norm()).max(1e-300)
    }
}

/// Multiplier constant `β_k = φ_h(ρ_k, b)` with the `1/ψ_H(ρ_k, 0)`
/// cross-check. A discrepancy above ~1e-7 flags an inaccurate eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct MultiplierConstant {
    pub value: Complex64,
    pub cross_check: Complex64,
}

impl MultiplierConstant {
    pub fn discrepancy(&self) -> f64 {
        (self.value - self.cross_check).norm()
            / self.value.norm().max(self.cross_check.norm()).max(1e-300)
    }
}

fn fixed_steps(setup: &ProblemSetup) -> Option<usize> {
    setup.potential.is_tabulated().then_some(TABULATED_STEPS)
}

fn use_hf(setup: &ProblemSetup, rho: Complex64) -> bool {
    !setup.potential.is_tabulated() && rho.norm() * setup.b() > HF_THRESHOLD
}

/// Evaluates one solution (value and derivative) on a sorted grid.
///
/// Integration starts at the endpoint carrying the initial conditions and
/// visits every grid point; local tolerance is ~1e-11 relative for
/// closed-form potentials, a fixed 2^14-step grid for tabulated ones.
pub fn integrate_solution(
    setup: &ProblemSetup,
    rho: Complex64,
    which: SolutionKind,
    x_eval: &[f64],
) -> Result<Vec<SolutionSample>, OracleError> {
    let b = setup.b();
    if x_eval.windows(2).any(|w| w[1] < w[0]) {
        return Err(OracleError::InvalidData("x_eval must be ascending".into()));
    }
    if x_eval.iter().any(|&x| !(0.0..=b + 1e-12).contains(&x)) {
        return Err(OracleError::InvalidData("x_eval outside [0, b]".into()));
    }
    let lambda = rho * rho;
    let q = &setup.potential;
    let f = |x: f64, y: &[Complex64; 2]| [y[1], y[0] * (q.eval(x) - lambda)];

    let (start, y0): (f64, [Complex64; 2]) = match which {
        SolutionKind::PhiH => (0.0, [c64(1.0, 0.0), setup.constants.h]),
        SolutionKind::S => (0.0, [Complex64::default(), c64(1.0, 0.0)]),
        SolutionKind::PsiH => (b, [c64(1.0, 0.0), -setup.constants.big_h]),
        SolutionKind::T => (b, [Complex64::default(), c64(1.0, 0.0)]),
    };

    let forward = matches!(which, SolutionKind::PhiH | SolutionKind::S);
    let mut path: Vec<f64> = Vec::with_capacity(x_eval.len() + 1);
    path.push(start);
    if forward {
        path.extend_from_slice(x_eval);
    } else {
        path.extend(x_eval.iter().rev());
    }

    let states = dp5_integrate_path(&f, &path, y0, Tolerances::tight(), fixed_steps(setup))?;
    let mut samples: Vec<SolutionSample> = states[1..]
        .iter()
        .map(|s| SolutionSample {
            value: s[0],
            derivative: s[1],
        })
        .collect();
    if !forward {
        samples.reverse();
    }
    Ok(samples)
}

/// `(φ_h, φ_h', S, S')` at `x = b`.
pub(crate) fn forward_states(
    setup: &ProblemSetup,
    lambda: Complex64,
    tol: Tolerances,
) -> Result<[Complex64; 4], OracleError> {
    let b = setup.b();
    let h = setup.constants.h;
    let rho = super::dataset::sqrt_upper(lambda);
    let q = &setup.potential;
    if use_hf(setup, rho) {
        let u = |x: f64| q.eval(x) - lambda;
        let m = hf_transfer_matrix(&u, 0.0, b, tol)?;
        Ok([
            m[0][0] + m[0][1] * h,
            m[1][0] + m[1][1] * h,
            m[0][1],
            m[1][1],
        ])
    } else {
        let f = |x: f64, y: &[Complex64; 4]| {
            let u = q.eval(x) - lambda;
            [y[1], y[0] * u, y[3], y[2] * u]
        };
        dp5_integrate(
            &f,
            0.0,
            b,
            [c64(1.0, 0.0), h, Complex64::default(), c64(1.0, 0.0)],
            tol,
            fixed_steps(setup),
        )
    }
}

/// `(ψ_H, ψ_H', T, T')` at `x = 0`.
pub(crate) fn backward_states(
    setup: &ProblemSetup,
    lambda: Complex64,
    tol: Tolerances,
) -> Result<[Complex64; 4], OracleError> {
    let b = setup.b();
    let big_h = setup.constants.big_h;
    let rho = super::dataset::sqrt_upper(lambda);
    let q = &setup.potential;
    if use_hf(setup, rho) {
        let u = |x: f64| q.eval(x) - lambda;
        let m = hf_transfer_matrix(&u, b, 0.0, tol)?;
        Ok([
            m[0][0] - m[0][1] * big_h,
            m[1][0] - m[1][1] * big_h,
            m[0][1],
            m[1][1],
        ])
    } else {
        let f = |x: f64, y: &[Complex64; 4]| {
            let u = q.eval(x) - lambda;
            [y[1], y[0] * u, y[3], y[2] * u]
        };
        dp5_integrate(
            &f,
            b,
            0.0,
            [c64(1.0, 0.0), -big_h, Complex64::default(), c64(1.0, 0.0)],
            tol,
            fixed_steps(setup),
        )
    }
}

/// `(Δ(ρ), Δ⁰(ρ))` from one forward pass.
pub(crate) fn char_pair(
    setup: &ProblemSetup,
    lambda: Complex64,
    tol: Tolerances,
) -> Result<(Complex64, Complex64), OracleError> {
    let st = forward_states(setup, lambda, tol)?;
    let big_h = setup.constants.big_h;
    Ok((st[1] + big_h * st[0], st[3] + big_h * st[2]))
}

/// `(Δ(ρ), Δ⁰(ρ))` on a fixed integration grid.
///
/// A fixed grid makes the discretization error a smooth function of λ, so
/// a whole spectrum computed this way is consistent with one (slightly
/// perturbed) problem instead of carrying incoherent per-eigenvalue
/// jitter. Root refinement uses this for its tight evaluations.
pub(crate) fn char_pair_fixed(
    setup: &ProblemSetup,
    lambda: Complex64,
    steps: usize,
) -> Result<(Complex64, Complex64), OracleError> {
    let b = setup.b();
    let h = setup.constants.h;
    let big_h = setup.constants.big_h;
    let q = &setup.potential;
    let f = |x: f64, y: &[Complex64; 4]| {
        let u = q.eval(x) - lambda;
        [y[1], y[0] * u, y[3], y[2] * u]
    };
    let st = dp5_integrate(
        &f,
        0.0,
        b,
        [c64(1.0, 0.0), h, Complex64::default(), c64(1.0, 0.0)],
        Tolerances::tight(),
        Some(steps),
    )?;
    Ok((st[1] + big_h * st[0], st[3] + big_h * st[2]))
}

/// Characteristic function `Δ(ρ) = φ_h'(ρ,b) + H φ_h(ρ,b)`.
pub fn char_delta(setup: &ProblemSetup, rho: Complex64) -> Result<Complex64, OracleError> {
    Ok(char_pair(setup, rho * rho, Tolerances::tight())?.0)
}

/// `Δ(ρ)` together with the cross-check `-(ψ_H'(ρ,0) - h ψ_H(ρ,0))`.
pub fn char_delta_checked(
    setup: &ProblemSetup,
    rho: Complex64,
) -> Result<CharValue, OracleError> {
    let value = char_delta(setup, rho)?;
    let back = backward_states(setup, rho * rho, Tolerances::tight())?;
    let cross_check = -(back[1] - setup.constants.h * back[0]);
    Ok(CharValue { value, cross_check })
}

/// Characteristic function `Δ⁰(ρ) = S'(ρ,b) + H S(ρ,b)`.
pub fn char_delta0(setup: &ProblemSetup, rho: Complex64) -> Result<Complex64, OracleError> {
    Ok(char_pair(setup, rho * rho, Tolerances::tight())?.1)
}

/// `Δ⁰(ρ)` together with the cross-check `ψ_H(ρ,0)`.
pub fn char_delta0_checked(
    setup: &ProblemSetup,
    rho: Complex64,
) -> Result<CharValue, OracleError> {
    let value = char_delta0(setup, rho)?;
    let back = backward_states(setup, rho * rho, Tolerances::tight())?;
    Ok(CharValue {
        value,
        cross_check: back[0],
    })
}

/// Multiplier constant `β_k = φ_h(ρ_k, b)`, cross-checked against
/// `1/ψ_H(ρ_k, 0)`.
pub fn multiplier_constant(
    setup: &ProblemSetup,
    rho_k: Complex64,
) -> Result<MultiplierConstant, OracleError> {
    let lambda = rho_k * rho_k;
    let fwd = forward_states(setup, lambda, Tolerances::tight())?;
    let back = backward_states(setup, lambda, Tolerances::tight())?;
    if back[0].norm() < 1e-200 {
        return Err(OracleError::InvalidData(
            "psi_H(rho_k, 0) vanished; rho_k is not a simple Robin eigenvalue".into(),
        ));
    }
    Ok(MultiplierConstant {
        value: fwd[0],
        cross_check: back[0].inv(),
    })
}

/// Norming constant `α_k = ∫₀ᵇ φ_h²(ρ_k, x) dx`, accumulated as an extra
/// quadrature component of the adaptive integration.
pub fn norming_constant(
    setup: &ProblemSetup,
    rho_k: Complex64,
) -> Result<Complex64, OracleError> {
    let lambda = rho_k * rho_k;
    let q = &setup.potential;
    let f = |x: f64, y: &[Complex64; 3]| [y[1], y[0] * (q.eval(x) - lambda), y[0] * y[0]];
    let y = dp5_integrate(
        &f,
        0.0,
        setup.b(),
        [c64(1.0, 0.0), setup.constants.h, Complex64::default()],
        Tolerances::new(1e-10, 1e-12),
        fixed_steps(setup),
    )?;
    Ok(y[2])
}

/// Weyl function `M(ρ) = -Δ⁰(ρ)/Δ(ρ)`.
pub fn weyl_value(setup: &ProblemSetup, rho: Complex64) -> Result<Complex64, OracleError> {
    let (delta, delta0) = char_pair(setup, rho * rho, Tolerances::tight())?;
    if delta.norm() < 1e-12 * delta0.norm().max(1.0) {
        return Err(OracleError::PoleProximity { rho });
    }
    Ok(-delta0 / delta)
}

/// `dΔ/dρ` by central differences with step `1e-6 (1 + |ρ|)`.
///
/// This is the oracle-side derivative; the inverse pipeline has its own
/// series form.
pub fn char_delta_derivative(
    setup: &ProblemSetup,
    rho: Complex64,
) -> Result<Complex64, OracleError> {
    let e = 1e-6 * (1.0 + rho.norm());
    let plus = char_delta(setup, rho + e)?;
    let minus = char_delta(setup, rho - e)?;
    Ok((plus - minus) / (2.0 * e))
}
