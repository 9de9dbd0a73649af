//! Natural cubic spline interpolation on a sorted grid.
//!
//! Used to turn tabulated potentials into smooth callables for the ODE
//! integrators. Real-valued; complex data is handled as two splines.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;

/// Natural cubic spline through `(x_i, y_i)` with `x` strictly increasing.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the spline; panics if fewer than 2 points or `x` not strictly
    /// increasing.
    pub fn natural(x: &[f64], y: &[f64]) -> Self {
        assert!(x.len() >= 2 && x.len() == y.len());
        for w in x.windows(2) {
            assert!(w[1] > w[0], "spline abscissae must be strictly increasing");
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for interior second derivatives.
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                sub[i] = h0 / 6.0;
                diag[i] = (h0 + h1) / 3.0;
                sup[i] = h1 / 6.0;
                rhs[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
            }
            // Thomas algorithm on indices 1..n-1.
            for i in 2..n - 1 {
                let w = sub[i] / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
            }
        }
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        }
    }

    fn segment(&self, t: f64) -> usize {
        // partition_point returns the first index with x > t.
        let i = self.x.partition_point(|&v| v <= t);
        i.clamp(1, self.x.len() - 1) - 1
    }

    /// Value at `t`; cubic extension outside the knot range.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative at `t`.
    pub fn deriv(&self, t: f64) -> f64 {
        let i = self.segment(t);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let a = (x1 - t) / h;
        let b = (t - x0) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|&v| 2.0 * v - 1.0).collect();
        let s = CubicSpline::natural(&x, &y);
        for i in 0..30 {
            let t = i as f64 * 0.09;
            assert!((s.eval(t) - (2.0 * t - 1.0)).abs() < 1e-12);
            assert!((s.deriv(t) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolates_smooth_function() {
        let n = 257;
        let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| (3.0 * v).sin()).collect();
        let s = CubicSpline::natural(&x, &y);
        for i in 0..100 {
            let t = 0.005 + 0.0099 * i as f64;
            assert!(
                (s.eval(t) - (3.0 * t).sin()).abs() < 1e-7,
                "t={t}: {} vs {}",
                s.eval(t),
                (3.0 * t).sin()
            );
        }
    }

    #[test]
    fn hits_knots_exactly() {
        let x = [0.0, 0.5, 1.3, 2.0];
        let y = [1.0, -0.4, 2.2, 0.1];
        let s = CubicSpline::natural(&x, &y);
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-14);
        }
    }
}
