//! Spectral datasets: the inputs of the four inverse problems, generated
//! by the forward engine, plus the deterministic noise model.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::charfun::{char_pair, char_pair_fixed, multiplier_constant, norming_constant, weyl_value};
use super::eigen::{find_complex_zeros, scan_real, Rect};
use super::integrate::Tolerances;
use super::potential::{BoundaryConstants, PotentialSpec};
use super::{OracleError, ProblemSetup};
use crate::c64;

/// Square root with the `Im ρ >= 0` branch convention.
pub fn sqrt_upper(lambda: Complex64) -> Complex64 {
    let r = lambda.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Which inverse problem a dataset feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Two spectra.
    Ip1,
    /// Weyl function samples.
    Ip2,
    /// One spectrum plus multiplier constants.
    Ip3,
    /// One spectrum plus norming constants.
    Ip4,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::Ip1 => "IP1",
            ProblemKind::Ip2 => "IP2",
            ProblemKind::Ip3 => "IP3",
            ProblemKind::Ip4 => "IP4",
        }
    }

    pub fn parse(s: &str) -> Result<Self, OracleError> {
        match s {
            "IP1" | "ip1" => Ok(ProblemKind::Ip1),
            "IP2" | "ip2" => Ok(ProblemKind::Ip2),
            "IP3" | "ip3" => Ok(ProblemKind::Ip3),
            "IP4" | "ip4" => Ok(ProblemKind::Ip4),
            _ => Err(OracleError::InvalidData(format!("unknown problem kind {s}"))),
        }
    }
}

/// Input data of an inverse problem.
///
/// `rho_k` are the singular numbers (Im >= 0) of the Robin problem;
/// `mu_k` those of the Dirichlet-at-0 companion (IP1 only); `beta_k` the
/// multiplier constants (IP3); `alpha_k` the norming constants (IP4);
/// `weyl_points`/`weyl_values` the Weyl samples (IP2).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDataset {
    pub problem_kind: ProblemKind,
    pub b: f64,
    pub rho_k: Vec<Complex64>,
    pub mu_k: Vec<Complex64>,
    pub beta_k: Vec<Complex64>,
    pub alpha_k: Vec<Complex64>,
    pub weyl_points: Vec<Complex64>,
    pub weyl_values: Vec<Complex64>,
    pub noise_sigma: f64,
}

impl SpectralDataset {
    pub fn empty(problem_kind: ProblemKind, b: f64) -> Self {
        Self {
            problem_kind,
            b,
            rho_k: Vec::new(),
            mu_k: Vec::new(),
            beta_k: Vec::new(),
            alpha_k: Vec::new(),
            weyl_points: Vec::new(),
            weyl_values: Vec::new(),
            noise_sigma: 0.0,
        }
    }

    /// Checks the per-kind length and branch invariants.
    pub fn validate(&self) -> Result<(), OracleError> {
        if !(self.b > 0.0) {
            return Err(OracleError::InvalidData("b must be positive".into()));
        }
        let err = |m: &str| Err(OracleError::InvalidData(m.into()));
        match self.problem_kind {
            ProblemKind::Ip1 => {
                if self.rho_k.is_empty() || self.rho_k.len() != self.mu_k.len() {
                    return err("IP1 needs equally many rho_k and mu_k");
                }
            }
            ProblemKind::Ip2 => {
                if self.weyl_points.len() != self.weyl_values.len() || self.weyl_points.len() < 2 {
                    return err("IP2 needs at least 2 Weyl samples");
                }
            }
            ProblemKind::Ip3 => {
                if self.rho_k.is_empty() || self.rho_k.len() != self.beta_k.len() {
                    return err("IP3 needs equally many rho_k and beta_k");
                }
            }
            ProblemKind::Ip4 => {
                if self.rho_k.is_empty() || self.rho_k.len() != self.alpha_k.len() {
                    return err("IP4 needs equally many rho_k and alpha_k");
                }
            }
        }
        if self
            .rho_k
            .iter()
            .chain(self.mu_k.iter())
            .any(|r| r.im < -1e-14)
        {
            return err("singular numbers must satisfy Im >= 0");
        }
        Ok(())
    }

    /// Deterministic perturbation `λ_k -> λ_k + σ sin((k+1)π/37)` applied
    /// to the eigenvalue lists (`rho_k`, and `mu_k` for IP1); the singular
    /// numbers are recomputed on the `Im >= 0` branch. Weyl samples and
    /// the constants are not touched.
    pub fn add_noise(&self, sigma: f64) -> SpectralDataset {
        let perturb = |seq: &[Complex64]| -> Vec<Complex64> {
            seq.iter()
                .enumerate()
                .map(|(k, rho)| {
                    let lambda = rho * rho + sigma * (((k + 1) as f64) * PI / 37.0).sin();
                    sqrt_upper(lambda)
                })
                .collect()
        };
        let mut out = self.clone();
        out.rho_k = perturb(&self.rho_k);
        if self.problem_kind == ProblemKind::Ip1 {
            out.mu_k = perturb(&self.mu_k);
        }
        out.noise_sigma = sigma;
        out
    }

    /// Conjugated dataset: inputs of the conjugated problem.
    pub fn conj(&self) -> SpectralDataset {
        let flip = |seq: &[Complex64]| -> Vec<Complex64> {
            seq.iter().map(|v| v.conj()).collect()
        };
        // conj(ρ) may land in the lower half-plane; re-normalize since all
        // fitted quantities are even in ρ.
        let flip_upper = |seq: &[Complex64]| -> Vec<Complex64> {
            seq.iter()
                .map(|v| {
                    let c = v.conj();
                    if c.im < 0.0 {
                        -c
                    } else {
                        c
                    }
                })
                .collect()
        };
        SpectralDataset {
            problem_kind: self.problem_kind,
            b: self.b,
            rho_k: flip_upper(&self.rho_k),
            mu_k: flip_upper(&self.mu_k),
            beta_k: flip(&self.beta_k),
            alpha_k: flip(&self.alpha_k),
            weyl_points: flip(&self.weyl_points),
            weyl_values: flip(&self.weyl_values),
            noise_sigma: self.noise_sigma,
        }
    }
}

/// Weyl-sampling layout for IP2 generation: `count` fit points
/// log-spaced on `[lo, hi]` followed by `probe_count` uniform points used
/// for truncation-order selection.
#[derive(Debug, Clone, Copy)]
pub struct WeylSampling {
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    pub probe_count: usize,
}

impl Default for WeylSampling {
    fn default() -> Self {
        Self {
            count: 2000,
            lo: 0.01,
            hi: 1000.0,
            probe_count: 20,
        }
    }
}

/// Which of the two spectra to compute.
enum WhichSpectrum {
    Robin,
    Dirichlet0,
}

/// Generates the dataset of the requested kind for a known problem.
/// `count` is the number of eigenvalue entries (IP1/IP3/IP4) and is
/// ignored for IP2, which uses `weyl`.
pub fn generate_dataset(
    setup: &ProblemSetup,
    kind: ProblemKind,
    count: usize,
    weyl: Option<&WeylSampling>,
) -> Result<SpectralDataset, OracleError> {
    let mut ds = SpectralDataset::empty(kind, setup.b());
    match kind {
        ProblemKind::Ip1 => {
            ds.rho_k = spectrum(setup, WhichSpectrum::Robin, count)?;
            ds.mu_k = spectrum(setup, WhichSpectrum::Dirichlet0, count)?;
        }
        ProblemKind::Ip3 => {
            ds.rho_k = spectrum(setup, WhichSpectrum::Robin, count)?;
            for &rho in &ds.rho_k {
                ds.beta_k.push(multiplier_constant(setup, rho)?.value);
            }
        }
        ProblemKind::Ip4 => {
            ds.rho_k = spectrum(setup, WhichSpectrum::Robin, count)?;
            for &rho in &ds.rho_k {
                ds.alpha_k.push(norming_constant(setup, rho)?);
            }
        }
        ProblemKind::Ip2 => {
            let w = weyl.copied().unwrap_or_default();
            let mut pts = Vec::with_capacity(w.count + w.probe_count);
            let (llo, lhi) = (w.lo.log10(), w.hi.log10());
            for i in 0..w.count {
                let t = if w.count == 1 {
                    0.0
                } else {
                    i as f64 / (w.count - 1) as f64
                };
                pts.push(c64(10.0_f64.powf(llo + t * (lhi - llo)), 0.0));
            }
            for j in 0..w.probe_count {
                let t = if w.probe_count == 1 {
                    0.0
                } else {
                    j as f64 / (w.probe_count - 1) as f64
                };
                pts.push(c64(w.lo + t * (w.hi - w.lo), 0.0));
            }
            for z in pts {
                let (z_used, m) = weyl_with_nudge(setup, z)?;
                ds.weyl_points.push(z_used);
                ds.weyl_values.push(m);
            }
        }
    }
    ds.validate()?;
    Ok(ds)
}

/// Weyl value with a deterministic nudge off poles.
fn weyl_with_nudge(
    setup: &ProblemSetup,
    z: Complex64,
) -> Result<(Complex64, Complex64), OracleError> {
    let mut zz = z;
    for _ in 0..4 {
        match weyl_value(setup, zz) {
            Ok(m) => return Ok((zz, m)),
            Err(OracleError::PoleProximity { .. }) => {
                zz *= 1.0000037;
            }
            Err(e) => return Err(e),
        }
    }
    Err(OracleError::PoleProximity { rho: z })
}

fn lambda_min_hint(setup: &ProblemSetup) -> f64 {
    let h = setup.constants.h.norm();
    let big_h = setup.constants.big_h.norm();
    let q_sup = setup.potential.sup_estimate();
    -((h + big_h + 2.0) * (h + big_h + 2.0)) - q_sup - 10.0
}

fn spectrum(
    setup: &ProblemSetup,
    which: WhichSpectrum,
    count: usize,
) -> Result<Vec<Complex64>, OracleError> {
    if count == 0 {
        return Err(OracleError::InvalidData("count must be positive".into()));
    }
    // Self-adjoint problems and constant-imaginary-shift potentials reduce
    // to a real-line scan; everything else runs the argument principle.
    if setup.is_selfadjoint() {
        let lambdas = real_spectrum(setup, &which, count)?;
        return Ok(lambdas.into_iter().map(|l| sqrt_upper(c64(l, 0.0))).collect());
    }
    if setup.constants.is_real() {
        if let (Some(shift), Some(re_pot)) = (
            setup.potential.constant_im_shift(),
            setup.potential.real_part(),
        ) {
            let re_setup = ProblemSetup::new(re_pot, setup.constants);
            let lambdas = real_spectrum(&re_setup, &which, count)?;
            return Ok(lambdas
                .into_iter()
                .map(|l| sqrt_upper(c64(l, shift)))
                .collect());
        }
    }
    complex_spectrum(setup, &which, count)
}

/// Fixed grid for the tight refinement evaluations: ~10 steps per
/// oscillation of the largest eigenfunction requested, with a generous
/// floor. Shared across one spectrum so the discretization error stays a
/// smooth function of λ.
fn refine_steps(setup: &ProblemSetup, count: usize) -> usize {
    let b = setup.b();
    let rho_top = (count as f64 + 2.0) * PI / b
        + setup.constants.h.norm()
        + setup.constants.big_h.norm()
        + setup.potential.sup_estimate().sqrt();
    let per_osc = (b * rho_top / core::f64::consts::TAU * 24.0).ceil() as usize;
    per_osc.clamp(2048, 1 << 16)
}

fn real_spectrum(
    setup: &ProblemSetup,
    which: &WhichSpectrum,
    count: usize,
) -> Result<Vec<f64>, OracleError> {
    let hint = lambda_min_hint(setup);
    let b = setup.b();
    let steps = refine_steps(setup, count);
    let mut f = |lambda: f64, tight: bool| -> Result<f64, OracleError> {
        let pair = if tight {
            char_pair_fixed(setup, c64(lambda, 0.0), steps)?
        } else {
            char_pair(setup, c64(lambda, 0.0), Tolerances::loose())?
        };
        Ok(match which {
            WhichSpectrum::Robin => pair.0.re,
            WhichSpectrum::Dirichlet0 => pair.1.re,
        })
    };
    scan_real(&mut f, count, hint, b)
}

fn complex_spectrum(
    setup: &ProblemSetup,
    which: &WhichSpectrum,
    count: usize,
) -> Result<Vec<Complex64>, OracleError> {
    // Skeleton spectrum: the zero potential with the real parts of the
    // constants is self-adjoint and locates the search region.
    let skeleton_setup = ProblemSetup::new(
        PotentialSpec::builtin("zero", setup.b())?,
        BoundaryConstants::real(setup.constants.h.re, setup.constants.big_h.re),
    );
    let skeleton = real_spectrum(&skeleton_setup, which, count)?;

    let im_size = {
        let mut m = 0.0_f64;
        for i in 0..=64 {
            let x = setup.b() * i as f64 / 64.0;
            m = m.max(setup.potential.eval(x).im.abs());
        }
        m
    };
    let margin = 3.0
        + 2.0 * (im_size + setup.constants.h.im.abs() + setup.constants.big_h.im.abs())
        + setup.potential.sup_estimate();

    let steps = refine_steps(setup, count);
    let mut f = |lambda: Complex64, tight: bool| -> Result<Complex64, OracleError> {
        let pair = if tight {
            char_pair_fixed(setup, lambda, steps)?
        } else {
            char_pair(setup, lambda, Tolerances::loose())?
        };
        Ok(match which {
            WhichSpectrum::Robin => pair.0,
            WhichSpectrum::Dirichlet0 => pair.1,
        })
    };

    let gap = (PI / setup.b()) * (PI / setup.b());
    let mut re_hi = skeleton[count - 1] + margin;
    for attempt in 0..5 {
        let rect = Rect::new(skeleton[0] - margin, re_hi, -margin, margin);
        match find_complex_zeros(&mut f, rect, count) {
            Ok(zeros) => return Ok(zeros.into_iter().map(sqrt_upper).collect()),
            Err(OracleError::InsufficientZeros { .. }) if attempt < 4 => {
                re_hi += gap * (2 * count) as f64 * 0.5;
            }
            Err(e) => return Err(e),
        }
    }
    Err(OracleError::InsufficientZeros {
        found: 0,
        requested: count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::presets;

    #[test]
    fn free_spectra_closed_forms() {
        // q=0, h=H=0, b=pi: λ_k = k², μ_k² = (k+1/2)².
        let setup = ProblemSetup::new(
            PotentialSpec::builtin("zero", PI).unwrap(),
            BoundaryConstants::real(0.0, 0.0),
        );
        let ds = generate_dataset(&setup, ProblemKind::Ip1, 10, None).unwrap();
        for (k, rho) in ds.rho_k.iter().enumerate() {
            assert!(
                (rho - c64(k as f64, 0.0)).norm() < 1e-10 * (1.0 + k as f64),
                "rho_{k} = {rho}"
            );
        }
        for (k, mu) in ds.mu_k.iter().enumerate() {
            let expect = k as f64 + 0.5;
            assert!((mu - c64(expect, 0.0)).norm() < 1e-10 * expect, "mu_{k} = {mu}");
        }
    }

    #[test]
    fn noise_model_exact_formula() {
        let setup = ProblemSetup::new(
            PotentialSpec::builtin("zero", PI).unwrap(),
            BoundaryConstants::real(0.0, 0.0),
        );
        let ds = generate_dataset(&setup, ProblemKind::Ip1, 5, None).unwrap();
        // sigma = 0 is the identity
        let same = ds.add_noise(0.0);
        assert_eq!(same.rho_k, ds.rho_k);
        assert_eq!(same.mu_k, ds.mu_k);

        let sigma = 1e-3;
        let noisy = ds.add_noise(sigma);
        for k in 0..5 {
            let expect = ds.rho_k[k] * ds.rho_k[k] + sigma * (((k + 1) as f64) * PI / 37.0).sin();
            let got = noisy.rho_k[k] * noisy.rho_k[k];
            assert!((got - expect).norm() < 1e-14 * (1.0 + expect.norm()));
        }
        assert_eq!(noisy.noise_sigma, sigma);
    }

    #[test]
    fn noise_k36_is_fixed_point() {
        // sin(37π/37) = 0: the 37th entry is untouched.
        let rho: Vec<Complex64> = (0..40).map(|k| c64(k as f64 + 0.3, 0.0)).collect();
        let mut ds = SpectralDataset::empty(ProblemKind::Ip3, PI);
        ds.rho_k = rho.clone();
        ds.beta_k = vec![c64(1.0, 0.0); 40];
        let noisy = ds.add_noise(0.5);
        assert!((noisy.rho_k[36] - rho[36]).norm() < 1e-13);
        assert!((noisy.rho_k[0] - rho[0]).norm() > 1e-5);
    }

    #[test]
    fn validation_catches_mismatch() {
        let mut ds = SpectralDataset::empty(ProblemKind::Ip1, 1.0);
        ds.rho_k = vec![c64(1.0, 0.0)];
        assert!(ds.validate().is_err());
        ds.mu_k = vec![c64(0.5, 0.0)];
        assert!(ds.validate().is_ok());
    }

    #[test]
    fn example1_spectra_have_expected_scale() {
        // q = x², b = 1, h = 10, H = π: all eigenvalues real positive-ish,
        // tail spacing near (π/b)² (2k+1).
        let setup = presets::by_name("ex1").unwrap();
        let ds = generate_dataset(&setup, ProblemKind::Ip1, 10, None).unwrap();
        assert_eq!(ds.rho_k.len(), 10);
        for rho in &ds.rho_k {
            assert!(rho.im.abs() < 1e-9, "expected real singular numbers");
        }
        let lam: Vec<f64> = ds.rho_k.iter().map(|r| (r * r).re).collect();
        assert!(lam.windows(2).all(|w| w[1] > w[0]));
        // Self-convergence: rerun with the same API must reproduce bits.
        let ds2 = generate_dataset(&setup, ProblemKind::Ip1, 10, None).unwrap();
        assert_eq!(ds.rho_k, ds2.rho_k);
    }
}
