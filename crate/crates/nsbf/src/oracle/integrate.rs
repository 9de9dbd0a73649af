//! ODE integrators for the forward problem.
//!
//! Two schemes back the solution evaluations:
//!
//! * an adaptive embedded Dormand-Prince 5(4) pair on the first-order
//!   complex system, used everywhere by default (fixed-step mode for
//!   tabulated potentials);
//! * a high-frequency propagator for `|ρ| b` large: piecewise "frozen"
//!   coefficient plus a first-order Magnus correction in the interaction
//!   picture, with the oscillatory integrals done in closed form. Its cost
//!   per digit is essentially independent of `|ρ|`, which keeps Weyl-data
//!   generation at `ρ ~ 1000` tractable.

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use super::OracleError;
use crate::c64;

/// Integration tolerances.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerances {
    pub const fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Default forward-solve accuracy.
    pub const fn tight() -> Self {
        Self::new(1e-11, 1e-13)
    }

    /// Cheaper accuracy for bracketing scans and winding numbers.
    pub const fn loose() -> Self {
        Self::new(1e-8, 1e-10)
    }

    /// Extra accuracy for root polishing.
    pub const fn refine() -> Self {
        Self::new(3e-13, 1e-14)
    }
}

const SAFETY: f64 = 0.9;
const MIN_SCALE: f64 = 0.2;
const MAX_SCALE: f64 = 5.0;

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b5 - b4, applied to the seven stages for the error estimate.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[inline]
fn axpy<const N: usize>(
    y: &[Complex64; N],
    h: f64,
    coef: &[f64],
    k: &[[Complex64; N]],
) -> [Complex64; N] {
    let mut out = *y;
    for (c, ki) in coef.iter().zip(k) {
        if *c == 0.0 {
            continue;
        }
        let ch = c * h;
        for i in 0..N {
            out[i] += ki[i] * ch;
        }
    }
    out
}

/// One DP5 step attempt; returns (y_new, error_norm, k7).
#[inline]
fn dp5_step<const N: usize, F: Fn(f64, &[Complex64; N]) -> [Complex64; N]>(
    f: &F,
    x: f64,
    y: &[Complex64; N],
    h: f64,
    k1: &[Complex64; N],
    tol: Tolerances,
) -> ([Complex64; N], f64, [Complex64; N]) {
    let k2 = f(x + h / 5.0, &axpy(y, h, &A2, core::slice::from_ref(k1)));
    let ks2 = [*k1, k2];
    let k3 = f(x + 3.0 * h / 10.0, &axpy(y, h, &A3, &ks2));
    let ks3 = [*k1, k2, k3];
    let k4 = f(x + 4.0 * h / 5.0, &axpy(y, h, &A4, &ks3));
    let ks4 = [*k1, k2, k3, k4];
    let k5 = f(x + 8.0 * h / 9.0, &axpy(y, h, &A5, &ks4));
    let ks5 = [*k1, k2, k3, k4, k5];
    let k6 = f(x + h, &axpy(y, h, &A6, &ks5));
    let ks6 = [*k1, k2, k3, k4, k5, k6];
    let y_new = axpy(y, h, &B5, &ks6);
    let k7 = f(x + h, &y_new);
    let ks7 = [*k1, k2, k3, k4, k5, k6, k7];

    let mut err_sq = 0.0;
    for i in 0..N {
        let mut e = Complex64::default();
        for (c, ki) in ERR.iter().zip(&ks7) {
            e += ki[i] * *c;
        }
        e *= h;
        let sc = tol.abs + tol.rel * y[i].norm().max(y_new[i].norm());
        let r = e.norm() / sc;
        err_sq += r * r;
    }
    (y_new, (err_sq / N as f64).sqrt(), k7)
}

/// Integrates `y' = f(x, y)` from `x0` to `x1` (either direction).
/// With `fixed_steps`, runs that many equal steps without step control.
pub(crate) fn dp5_integrate<const N: usize, F: Fn(f64, &[Complex64; N]) -> [Complex64; N]>(
    f: &F,
    x0: f64,
    x1: f64,
    y0: [Complex64; N],
    tol: Tolerances,
    fixed_steps: Option<usize>,
) -> Result<[Complex64; N], OracleError> {
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }

    if let Some(steps) = fixed_steps {
        let h = span / steps as f64;
        let mut y = y0;
        let mut x = x0;
        let mut k1 = f(x, &y);
        for _ in 0..steps {
            let (y_new, _, k7) = dp5_step(f, x, &y, h, &k1, tol);
            y = y_new;
            k1 = k7;
            x += h;
        }
        return Ok(y);
    }

    let dir = span.signum();
    let mut y = y0;
    let mut x = x0;
    let mut k1 = f(x, &y);
    // Initial step: conservative fraction of the span.
    let mut h = dir * (span.abs() / 64.0).min(0.1);
    let h_floor = 1e-14 * (span.abs() + x0.abs() + 1.0);

    loop {
        let remaining = x1 - x;
        if remaining == 0.0 || remaining.abs() < h_floor {
            return Ok(y);
        }
        let mut clamped = false;
        if h.abs() >= remaining.abs() {
            h = remaining;
            clamped = true;
        }
        let (y_new, err, k7) = dp5_step(f, x, &y, h, &k1, tol);
        if err <= 1.0 || h.abs() <= h_floor {
            x += h;
            y = y_new;
            k1 = k7;
            if clamped {
                return Ok(y);
            }
        }
        let scale = if err <= 1e-30 {
            MAX_SCALE
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_SCALE, MAX_SCALE)
        };
        h *= scale;
        if h.abs() < h_floor {
            if err > 1.0 {
                return Err(OracleError::StepSizeUnderflow { x });
            }
            h = dir * h_floor;
        }
    }
}

/// Integrates while collecting the state at every point of `path`
/// (monotone in the direction of integration, first entry = start).
pub(crate) fn dp5_integrate_path<const N: usize, F: Fn(f64, &[Complex64; N]) -> [Complex64; N]>(
    f: &F,
    path: &[f64],
    y0: [Complex64; N],
    tol: Tolerances,
    fixed_steps: Option<usize>,
) -> Result<alloc::vec::Vec<[Complex64; N]>, OracleError> {
    let mut out = alloc::vec::Vec::with_capacity(path.len());
    let mut y = y0;
    out.push(y);
    for w in path.windows(2) {
        // Fixed-step budget split proportionally across segments.
        let seg_steps = fixed_steps.map(|n| {
            let total: f64 = path.last().unwrap() - path[0];
            let frac = if total == 0.0 {
                1.0
            } else {
                ((w[1] - w[0]) / total).abs()
            };
            ((n as f64 * frac).ceil() as usize).max(2)
        });
        y = dp5_integrate(f, w[0], w[1], y, tol, seg_steps)?;
        out.push(y);
    }
    Ok(out)
}

/// `cosh(w)` and `sinh(w)/w`, stable near `w = 0`.
fn cosh_sinhc(w: Complex64) -> (Complex64, Complex64) {
    if w.norm() < 1e-4 {
        let w2 = w * w;
        let ch = c64(1.0, 0.0) + w2 * 0.5 + w2 * w2 / 24.0;
        let shc = c64(1.0, 0.0) + w2 / 6.0 + w2 * w2 / 120.0;
        (ch, shc)
    } else {
        (w.cosh(), w.sinh() / w)
    }
}

/// 2x2 transfer matrix of one high-frequency step over `[a, a+h]`.
///
/// The coefficient `u(x) = q(x) - λ` is split into its two-point Gauss
/// average `ū` (propagated exactly through cosh/sinh) and a linear
/// remainder handled by a first-order Magnus term whose oscillatory
/// integrals are evaluated in closed form.
fn hf_step_matrix<U: Fn(f64) -> Complex64>(u: &U, a: f64, h: f64) -> [[Complex64; 2]; 2] {
    const GAUSS_OFF: f64 = 0.28867513459481287; // sqrt(3)/6
    let g1 = a + h * (0.5 - GAUSS_OFF);
    let g2 = a + h * (0.5 + GAUSS_OFF);
    let u1 = u(g1);
    let u2 = u(g2);
    let ubar = (u1 + u2) * 0.5;
    // du/dx of the linear model through the Gauss nodes.
    let slope = (u2 - u1) / (g2 - g1);

    let nu = ubar.sqrt();
    let w = nu * h;
    let (ch, shc) = cosh_sinhc(w);
    let s = shc * h; // sinh(νh)/ν
    let m = [[ch, s], [ubar * s, ch]];

    // Interaction integrals with ξ = 2νh:
    //   Is/(2ν)  = h³ [(cosh ξ + 1)/(2ξ²) - sinh ξ/ξ³]
    //   Ic/(2ν²) = 2h⁴ [sinh ξ/(2ξ³) - (cosh ξ - 1)/ξ⁴]
    //   Ic/2     = h² [(1/2) sinh ξ/ξ - (cosh ξ - 1)/ξ²] / 2
    let xi = w * 2.0;
    let (is_over_2nu, ic, ic_over_2nu2) = if xi.norm() < 0.5 {
        let x2 = xi * xi;
        let x4 = x2 * x2;
        let x6 = x4 * x2;
        // series established against the closed forms in tests
        let x8 = x4 * x4;
        let is_2nu = (c64(1.0 / 12.0, 0.0) + x2 / 80.0 + x4 / 2016.0 + x6 / 103680.0
            + x8 / 8870400.0)
            * h
            * h
            * h;
        let ic = (x2 / 24.0 + x4 / 360.0 + x6 / 13440.0 + x8 / 907200.0) * h * h;
        let ic_2nu2 = (c64(1.0 / 12.0, 0.0) + x2 / 180.0 + x4 / 6720.0 + x6 / 453600.0
            + x8 / 47900160.0)
            * h
            * h
            * h
            * h;
        (is_2nu, ic, ic_2nu2)
    } else {
        let chx = xi.cosh();
        let shx = xi.sinh();
        let x2 = xi * xi;
        let x3 = x2 * xi;
        let x4 = x2 * x2;
        let is_2nu = ((chx + 1.0) / (x2 * 2.0) - shx / x3) * h * h * h;
        let ic = (shx / (xi * 2.0) - (chx - 1.0) / x2) * h * h;
        let ic_2nu2 = (shx / (x3 * 2.0) - (chx - 1.0) / x4) * 2.0 * h * h * h * h;
        (is_2nu, ic, ic_2nu2)
    };

    let o11 = -slope * is_over_2nu;
    let o12 = -slope * ic_over_2nu2;
    let o21 = slope * ic * 0.5;

    // exp of the traceless matrix Ω = [[o11, o12], [o21, -o11]].
    let mu = (o11 * o11 + o12 * o21).sqrt();
    let (emu_ch, emu_shc) = cosh_sinhc(mu);
    let e = [
        [emu_ch + emu_shc * o11, emu_shc * o12],
        [emu_shc * o21, emu_ch - emu_shc * o11],
    ];

    // M(h) · exp(Ω)
    [
        [
            m[0][0] * e[0][0] + m[0][1] * e[1][0],
            m[0][0] * e[0][1] + m[0][1] * e[1][1],
        ],
        [
            m[1][0] * e[0][0] + m[1][1] * e[1][0],
            m[1][0] * e[0][1] + m[1][1] * e[1][1],
        ],
    ]
}

fn mat_mul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    [
        [
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
        ],
        [
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        ],
    ]
}

fn mat_err(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2], tol: Tolerances) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let sc = tol.abs + tol.rel * a[i][j].norm().max(b[i][j].norm());
            worst = worst.max((a[i][j] - b[i][j]).norm() / sc);
        }
    }
    worst
}

/// Fundamental 2x2 transfer matrix of `y'' = (q - λ) y` over `[x0, x1]`
/// via adaptive high-frequency steps (step doubling with Richardson
/// extrapolation). Cost is nearly independent of `|λ|`.
pub(crate) fn hf_transfer_matrix<U: Fn(f64) -> Complex64>(
    u: &U,
    x0: f64,
    x1: f64,
    tol: Tolerances,
) -> Result<[[Complex64; 2]; 2], OracleError> {
    let span = x1 - x0;
    let mut total = [
        [c64(1.0, 0.0), Complex64::default()],
        [Complex64::default(), c64(1.0, 0.0)],
    ];
    if span == 0.0 {
        return Ok(total);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut h = span / 64.0;
    let h_floor = 1e-13 * (span.abs() + 1.0);

    loop {
        let remaining = x1 - x;
        if remaining.abs() < h_floor {
            return Ok(total);
        }
        let mut clamped = false;
        if h.abs() >= remaining.abs() {
            h = remaining;
            clamped = true;
        }
        let full = hf_step_matrix(u, x, h);
        let half1 = hf_step_matrix(u, x, h * 0.5);
        let half2 = hf_step_matrix(u, x + h * 0.5, h * 0.5);
        let fine = mat_mul(&half2, &half1);
        let err = mat_err(&full, &fine, tol);
        if err <= 1.0 || h.abs() <= h_floor {
            // Richardson extrapolation of the 4th-order pair.
            let mut step = fine;
            for i in 0..2 {
                for j in 0..2 {
                    step[i][j] += (fine[i][j] - full[i][j]) / 15.0;
                }
            }
            total = mat_mul(&step, &total);
            x += h;
            if clamped {
                return Ok(total);
            }
        }
        let scale = if err <= 1e-30 {
            4.0
        } else {
            (SAFETY * err.powf(-0.2)).clamp(0.25, 4.0)
        };
        h *= scale;
        if h.abs() < h_floor {
            if err > 1.0 {
                return Err(OracleError::StepSizeUnderflow { x });
            }
            h = dir * h_floor;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn dp5_reproduces_trig_solution() {
        // y'' = -y with y(0)=1, y'(0)=0 => y = cos(x)
        let f = |_x: f64, y: &[Complex64; 2]| [y[1], -y[0]];
        let y = dp5_integrate(&f, 0.0, PI, [c64(1.0, 0.0), c64(0.0, 0.0)], Tolerances::tight(), None)
            .unwrap();
        assert!((y[0] - c64(-1.0, 0.0)).norm() < 1e-10);
        assert!(y[1].norm() < 1e-10);
    }

    #[test]
    fn dp5_backward_direction() {
        // integrate cos from pi back to 0
        let f = |_x: f64, y: &[Complex64; 2]| [y[1], -y[0]];
        let y = dp5_integrate(
            &f,
            PI,
            0.0,
            [c64(-1.0, 0.0), c64(0.0, 0.0)],
            Tolerances::tight(),
            None,
        )
        .unwrap();
        assert!((y[0] - c64(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn dp5_complex_exponential() {
        // y' = i y => y = e^{ix}
        let f = |_x: f64, y: &[Complex64; 1]| [y[0] * c64(0.0, 1.0)];
        let y = dp5_integrate(&f, 0.0, 3.0, [c64(1.0, 0.0)], Tolerances::tight(), None).unwrap();
        assert!((y[0] - c64(3.0_f64.cos(), 3.0_f64.sin())).norm() < 1e-10);
    }

    #[test]
    fn dp5_path_matches_single_shot() {
        let f = |x: f64, y: &[Complex64; 2]| [y[1], y[0] * c64(x * x - 4.0, 0.5)];
        let path = [0.0, 0.3, 1.1, 2.0];
        let states = dp5_integrate_path(
            &f,
            &path,
            [c64(1.0, 0.0), c64(0.3, -0.1)],
            Tolerances::tight(),
            None,
        )
        .unwrap();
        let direct = dp5_integrate(
            &f,
            0.0,
            2.0,
            [c64(1.0, 0.0), c64(0.3, -0.1)],
            Tolerances::tight(),
            None,
        )
        .unwrap();
        assert!((states[3][0] - direct[0]).norm() < 1e-9);
    }

    #[test]
    fn hf_oscillatory_integrals_match_series() {
        // Closed forms vs series across the switch point.
        for &xin in &[0.49, 0.51] {
            let h = 0.01;
            let xi = c64(xin, 0.3 * xin);
            let chx = xi.cosh();
            let shx = xi.sinh();
            let x2 = xi * xi;
            let x4 = x2 * x2;
            let x6 = x4 * x2;
            let x8 = x4 * x4;
            let closed_is = ((chx + 1.0) / (x2 * 2.0) - shx / (x2 * xi)) * h * h * h;
            let series_is = (c64(1.0 / 12.0, 0.0) + x2 / 80.0 + x4 / 2016.0 + x6 / 103680.0
                + x8 / 8870400.0)
                * h
                * h
                * h;
            assert!(
                (closed_is - series_is).norm() / closed_is.norm() < 1e-7,
                "Is mismatch at xi={xi}"
            );
            let closed_ic = (shx / (xi * 2.0) - (chx - 1.0) / x2) * h * h;
            let series_ic = (x2 / 24.0 + x4 / 360.0 + x6 / 13440.0 + x8 / 907200.0) * h * h;
            assert!((closed_ic - series_ic).norm() / closed_ic.norm() < 1e-7);
            let closed_ic2 = (shx / (x2 * xi * 2.0) - (chx - 1.0) / x4) * 2.0 * h * h * h * h;
            let series_ic2 = (c64(1.0 / 12.0, 0.0) + x2 / 180.0 + x4 / 6720.0 + x6 / 453600.0
                + x8 / 47900160.0)
                * h
                * h
                * h
                * h;
            assert!((closed_ic2 - series_ic2).norm() / closed_ic2.norm() < 1e-7);
        }
    }

    #[test]
    fn hf_matches_dp5_on_moderate_frequency() {
        // y'' = (q - λ) y with q = e^x on [0, pi], λ = 400 (ρ = 20).
        let lambda = c64(400.0, 0.0);
        let u = |x: f64| c64(x.exp(), 0.0) - lambda;
        let f = |x: f64, y: &[Complex64; 2]| [y[1], y[0] * u(x)];
        let m = hf_transfer_matrix(&u, 0.0, PI, Tolerances::tight()).unwrap();
        let y0 = [c64(1.0, 0.0), c64(2.0, -1.0)];
        let via_hf = [
            m[0][0] * y0[0] + m[0][1] * y0[1],
            m[1][0] * y0[0] + m[1][1] * y0[1],
        ];
        let via_dp5 = dp5_integrate(&f, 0.0, PI, y0, Tolerances::tight(), None).unwrap();
        assert!(
            (via_hf[0] - via_dp5[0]).norm() / via_dp5[0].norm() < 1e-8,
            "{via_hf:?} vs {via_dp5:?}"
        );
        assert!((via_hf[1] - via_dp5[1]).norm() / via_dp5[1].norm() < 1e-8);
    }

    #[test]
    fn hf_wronskian_preserved_at_high_frequency() {
        // det of the transfer matrix must stay 1 (Wronskian of the system).
        let lambda = c64(1.0e6, 0.0); // ρ = 1000
        let u = |x: f64| c64(x.exp(), 1.0 / ((x + 0.1) * (x + 0.1))) - lambda;
        let m = hf_transfer_matrix(&u, 0.0, PI, Tolerances::tight()).unwrap();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert!(
            (det - c64(1.0, 0.0)).norm() < 1e-9,
            "det drifted: {det}"
        );
    }

    #[test]
    fn hf_self_convergence_at_high_frequency() {
        let lambda = c64(640000.0, 0.0); // ρ = 800
        let u = |x: f64| c64(x.exp(), 0.0) - lambda;
        let coarse = hf_transfer_matrix(&u, 0.0, PI, Tolerances::new(1e-9, 1e-11)).unwrap();
        let fine = hf_transfer_matrix(&u, 0.0, PI, Tolerances::new(1e-12, 1e-14)).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let rel = (coarse[i][j] - fine[i][j]).norm() / fine[i][j].norm().max(1e-30);
                assert!(rel < 1e-7, "entry ({i},{j}) rel {rel}");
            }
        }
    }
}
