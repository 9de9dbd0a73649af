//! Spherical Bessel functions of the first kind for complex arguments.
//!
//! Every NSBF partial sum is built from `j_n(z)` with `z = ρx` or
//! `z = ρ(x-b)`, so these evaluations sit on the hot path of both
//! reconstruction steps. Orders up to a few hundred and `|z|` up to a few
//! thousand must come out with ~1e-12 relative accuracy.
//!
//! Strategy: upward recurrence from the closed forms of `j_0`, `j_1` while
//! the order stays below the turning point `n ≈ |z|` (stable there), and
//! Miller-style downward recurrence from a padded start order otherwise,
//! normalized against whichever of `j_0`, `j_1` is larger in magnitude.
//! Near `z = 0` a short ascending series is used instead.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::c64;

/// Failures of the special-function evaluations.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecFunError {
    /// sinh/cosh-scale magnitude exceeds the floating-point range.
    /// Carries the lowest order at which the overflow occurs.
    Overflow { order: usize },
    /// The argument contains NaN or infinity.
    NonFinite,
}

impl fmt::Display for SpecFunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecFunError::Overflow { order } => {
                write!(f, "spherical Bessel evaluation overflows at order {order}")
            }
            SpecFunError::NonFinite => write!(f, "non-finite complex argument"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SpecFunError {}

/// cosh(710) overflows f64; stay a little below.
const IM_LIMIT: f64 = 700.0;

/// Below this magnitude the ascending series is used for every order.
/// Chosen so the series and recurrence branches agree to ~1e-13 at the
/// switch point (see tests).
const SMALL_Z: f64 = 1e-4;

/// `(cos z, sin z)` for complex `z`.
pub fn trig_pair(z: Complex64) -> Result<(Complex64, Complex64), SpecFunError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    if z.im.abs() > IM_LIMIT {
        return Err(SpecFunError::Overflow { order: 0 });
    }
    let (sx, cx) = z.re.sin_cos();
    let sh = z.im.sinh();
    let ch = z.im.cosh();
    Ok((c64(cx * ch, -sx * sh), c64(sx * ch, cx * sh)))
}

/// `j_0(z), ..., j_{n_max}(z)` for complex `z`.
///
/// Exact limits at `z = 0`: `j_0 = 1`, `j_n = 0` for `n >= 1`.
pub fn sph_bessel_j_seq(n_max: usize, z: Complex64) -> Result<Vec<Complex64>, SpecFunError> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpecFunError::NonFinite);
    }
    if z.im.abs() > IM_LIMIT {
        return Err(SpecFunError::Overflow { order: 0 });
    }
    let a0 = z.norm();
    if a0 < SMALL_Z {
        return Ok(small_z_series(n_max, z));
    }

    let (cz, sz) = trig_pair(z)?;
    let j0 = sz / z;
    let j1 = sz / (z * z) - cz / z;
    if !j0.is_finite() || !j1.is_finite() {
        return Err(SpecFunError::Overflow { order: 0 });
    }
    if n_max == 0 {
        return Ok(vec![j0]);
    }
    if (n_max as f64) + 2.0 < a0 {
        upward(n_max, z, j0, j1)
    } else {
        Ok(downward(n_max, z, j0, j1))
    }
}

/// Four-term ascending series per order, valid for tiny `|z|`:
/// `j_n(z) = z^n/(2n+1)!! · Σ_k (-z²/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))`.
fn small_z_series(n_max: usize, z: Complex64) -> Vec<Complex64> {
    let half_z2 = z * z * 0.5;
    let mut out = Vec::with_capacity(n_max + 1);
    // lead = z^n / (2n+1)!!, advanced by lead *= z / (2n+3).
    let mut lead = c64(1.0, 0.0);
    for n in 0..=n_max {
        let d1 = (2 * n + 3) as f64;
        let d2 = (2 * n + 5) as f64;
        let d3 = (2 * n + 7) as f64;
        let series = c64(1.0, 0.0) - half_z2 / d1 + half_z2 * half_z2 / (2.0 * d1 * d2)
            - half_z2 * half_z2 * half_z2 / (6.0 * d1 * d2 * d3);
        out.push(lead * series);
        lead = lead * z / d1;
    }
    out
}

fn upward(
    n_max: usize,
    z: Complex64,
    j0: Complex64,
    j1: Complex64,
) -> Result<Vec<Complex64>, SpecFunError> {
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(j0);
    out.push(j1);
    for n in 1..n_max {
        let next = out[n] * ((2 * n + 1) as f64) / z - out[n - 1];
        if !next.is_finite() {
            return Err(SpecFunError::Overflow { order: n + 1 });
        }
        out.push(next);
    }
    Ok(out)
}

fn downward(n_max: usize, z: Complex64, j0: Complex64, j1: Complex64) -> Vec<Complex64> {
    let a0 = z.norm();
    let start = miller_start(a0, n_max);

    let mut out = vec![Complex64::default(); n_max + 1];
    let mut above = Complex64::default(); // f_{k+2}
    let mut curr = c64(1e-250, 0.0); // f_{k+1}
    if start <= n_max {
        out[start] = curr;
    }
    let mut k = start;
    while k > 0 {
        k -= 1;
        let f = curr * ((2 * k + 3) as f64) / z - above;
        if k <= n_max {
            out[k] = f;
        }
        above = curr;
        curr = f;
        // Rescale before the unnormalized recurrence overflows.
        if curr.re.abs() > 1e250 || curr.im.abs() > 1e250 {
            let s = 1e-250;
            curr *= s;
            above *= s;
            for v in out.iter_mut().skip(k) {
                *v *= s;
            }
        }
    }

    // Normalize against the larger of j0, j1; they have no common zeros.
    let scale = if j0.norm() >= j1.norm() {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// Start order for the downward recurrence, adapted from the classic
/// backward-recurrence start estimates so that order `n_max` carries
/// ~15 significant digits. Never below `n_max + 16`.
fn miller_start(a0: f64, n_max: usize) -> usize {
    let floor = n_max + 16;
    let m1 = msta1(a0, 200);
    let m = if m1 < n_max {
        msta2(a0, n_max, 16).unwrap_or(n_max + a0 as usize + 32)
    } else {
        m1
    };
    m.max(floor)
}

/// Magnitude envelope of j_n in decimal digits.
fn envj(n: f64, x: f64) -> f64 {
    let n = n.max(1.0);
    0.5 * (6.28 * n).log10() - n * (1.36 * x / n).log10()
}

/// First estimate: order where the magnitude has dropped `mp` digits.
fn msta1(x: f64, mp: i32) -> usize {
    let a0 = x.abs();
    let mut n0 = (1.1 * a0) as i32 + 1;
    let mut f0 = envj(n0 as f64, a0) - mp as f64;
    let mut n1 = n0 + 5;
    let mut f1 = envj(n1 as f64, a0) - mp as f64;
    for _ in 0..20 {
        let nn = n1 - ((n1 - n0) as f64 / (1.0 - f0 / f1)) as i32;
        let f = envj(nn as f64, a0) - mp as f64;
        if (nn - n1).abs() < 1 {
            return nn.max(0) as usize;
        }
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    (1.1 * a0) as usize + 220
}

/// Refined estimate: start order giving `mp` significant digits at order `n`.
fn msta2(x: f64, n: usize, mp: i32) -> Option<usize> {
    let a0 = x.abs();
    let hmp = 0.5 * mp as f64;
    let ejn = envj(n as f64, a0);
    let (obj, mut n0) = if ejn <= hmp {
        (mp as f64, (1.1 * a0) as i32 + 1)
    } else {
        (hmp + ejn, n as i32)
    };
    let mut f0 = envj(n0 as f64, a0) - obj;
    let mut n1 = n0 + 5;
    let mut f1 = envj(n1 as f64, a0) - obj;
    for _ in 0..20 {
        let nn = n1 - ((n1 - n0) as f64 / (1.0 - f0 / f1)) as i32;
        let f = envj(nn as f64, a0) - obj;
        if (nn - n1).abs() < 1 {
            return Some((nn + 10).max(0) as usize);
        }
        n0 = n1;
        f0 = f1;
        n1 = nn;
        f1 = f;
    }
    None
}
