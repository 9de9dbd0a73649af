//! Eigenvalue location: sign-change scans on the real line for
//! self-adjoint problems, and argument-principle rectangle subdivision in
//! the λ-plane for complex ones.
//!
//! Everything works in λ rather than ρ: the characteristic functions are
//! even in ρ, hence single-valued analytic functions of λ, which avoids
//! branch cuts and covers negative eigenvalues for free.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::OracleError;
use crate::c64;

/// Residual target for refined roots, relative to the bracket scale.
const ROOT_RESIDUAL: f64 = 1e-10;

/// Callable used by the scans: the `bool` selects loose (false) or tight
/// (true) evaluation accuracy, so bracketing stays cheap and refinement
/// stays sharp.
pub(crate) trait RealCharFn {
    fn eval(&mut self, lambda: f64, tight: bool) -> Result<f64, OracleError>;
}

impl<F: FnMut(f64, bool) -> Result<f64, OracleError>> RealCharFn for F {
    fn eval(&mut self, lambda: f64, tight: bool) -> Result<f64, OracleError> {
        self(lambda, tight)
    }
}

/// First `count` real zeros of an analytic λ-callable, sorted ascending.
///
/// `char_fn` is the characteristic function viewed as a function of λ;
/// `lambda_min_hint` bounds the search from below (negative eigenvalues
/// appear when a boundary constant is negative enough); `b` fixes the
/// asymptotic ρ-spacing `π/b` used for the scan density and the
/// missed-root check.
pub fn find_eigenvalues_selfadjoint<F>(
    char_fn: &mut F,
    count: usize,
    lambda_min_hint: f64,
    b: f64,
) -> Result<Vec<f64>, OracleError>
where
    F: FnMut(f64) -> Result<f64, OracleError>,
{
    let mut wrapped = |lambda: f64, _tight: bool| char_fn(lambda);
    scan_real(&mut wrapped, count, lambda_min_hint, b)
}

pub(crate) fn scan_real<F: RealCharFn>(
    f: &mut F,
    count: usize,
    lambda_min_hint: f64,
    b: f64,
) -> Result<Vec<f64>, OracleError> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut roots: Vec<f64> = Vec::new();
    let mut brackets: Vec<(f64, f64, f64, f64)> = Vec::new(); // (lo, hi, f_lo, f_hi)

    // Negative part: uniform in kappa = sqrt(-λ), descending kappa so the
    // λ samples ascend.
    let mut prev: Option<(f64, f64)> = None;
    if lambda_min_hint < 0.0 {
        let kappa_max = (-lambda_min_hint).sqrt();
        let n = 600;
        for i in 0..=n {
            let kappa = kappa_max * (n - i) as f64 / n as f64;
            let lambda = -kappa * kappa;
            let val = f.eval(lambda, false)?;
            note_sample(lambda, val, &mut prev, &mut roots, &mut brackets);
        }
    } else {
        let val = f.eval(lambda_min_hint, false)?;
        note_sample(lambda_min_hint, val, &mut prev, &mut roots, &mut brackets);
    }

    // Non-negative part: uniform in rho with 8 samples per asymptotic gap.
    let step = PI / (8.0 * b);
    let mut i = if lambda_min_hint < 0.0 { 1 } else { 0 };
    let max_i = 8 * (count + 8) + 64;
    while roots.len() + brackets.len() < count + 1 && i <= max_i {
        let rho = step * i as f64;
        let lambda = rho * rho;
        let val = f.eval(lambda, false)?;
        note_sample(lambda, val, &mut prev, &mut roots, &mut brackets);
        i += 1;
    }

    for (lo, hi, flo, fhi) in brackets {
        roots.push(refine_bracket(f, lo, hi, flo, fhi)?);
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + a.abs()));

    if roots.len() < count {
        return Err(OracleError::InsufficientZeros {
            found: roots.len(),
            requested: count,
        });
    }
    roots.truncate(count);

    // Missed-root check on the regular tail: consecutive positive roots
    // should be ~π/b apart in ρ.
    let tail_floor = (3.0 * PI / b) * (3.0 * PI / b);
    for k in 0..roots.len().saturating_sub(1) {
        if roots[k] > tail_floor && roots[k + 1] > 0.0 {
            let gap = roots[k + 1].sqrt() - roots[k].sqrt();
            let expected = PI / b;
            if (gap - expected).abs() > 0.6 * expected {
                return Err(OracleError::MissedRootSuspicion {
                    index: k,
                    expected_gap: expected,
                    actual_gap: gap,
                });
            }
        }
    }
    Ok(roots)
}

fn note_sample(
    lambda: f64,
    val: f64,
    prev: &mut Option<(f64, f64)>,
    roots: &mut Vec<f64>,
    brackets: &mut Vec<(f64, f64, f64, f64)>,
) {
    if let Some((pl, pv)) = *prev {
        let scale = pv.abs().max(val.abs());
        if val == 0.0 || (val.abs() < 1e-13 * scale && scale > 0.0) {
            roots.push(lambda);
        } else if pv != 0.0 && pv.signum() != val.signum() && pv.abs() >= 1e-13 * scale {
            brackets.push((pl, lambda, pv, val));
        }
    } else if val == 0.0 {
        roots.push(lambda);
    }
    *prev = Some((lambda, val));
}

fn refine_bracket<F: RealCharFn>(
    f: &mut F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    fhi: f64,
) -> Result<f64, OracleError> {
    let scale = flo.abs().max(fhi.abs()).max(1e-300);

    // Cheap bisection to shrink the bracket.
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        let fm = f.eval(mid, false)?;
        if fm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }

    // Tight secant polish, guarded by the bracket and run to step
    // convergence; the residual target is an acceptance check, not a
    // stopping rule, so the roots carry near-machine accuracy.
    let mut x0 = lo;
    let mut x1 = hi;
    let mut f0 = f.eval(x0, true)?;
    let mut f1 = if x1 == x0 { f0 } else { f.eval(x1, true)? };
    let mut best = if f0.abs() < f1.abs() { (x0, f0) } else { (x1, f1) };
    for _ in 0..40 {
        if x1 == x0 || f1 == f0 {
            break;
        }
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(lo..=hi).contains(&x2) || !x2.is_finite() {
            x2 = 0.5 * (lo + hi);
        }
        // Keep the bracket valid for the fallback midpoint.
        let f2 = f.eval(x2, true)?;
        if f2.signum() == flo.signum() {
            lo = x2;
        } else {
            hi = x2;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if f1.abs() < best.1.abs() {
            best = (x1, f1);
        }
        if (x1 - x0).abs() < 4e-16 * (1.0 + x1.abs()) || f1 == 0.0 {
            break;
        }
        if (hi - lo).abs() < 4e-16 * (1.0 + x1.abs()) {
            break;
        }
    }
    // The 1e-10·scale residual goal is met except when double-precision
    // evaluation noise dominates (large |λ| with growing solutions); the
    // step-converged best is then the attainable optimum. Anything worse
    // than 1e-6·scale means the iteration never converged at all.
    debug_assert!(
        best.1.abs() <= 1e-6 * scale,
        "root refinement failed to converge: residual {} at scale {}",
        best.1.abs(),
        scale
    );
    Ok(best.0)
}

/// Axis-aligned search rectangle in the λ-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Self {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    pub fn center(&self) -> Complex64 {
        c64(
            0.5 * (self.re_lo + self.re_hi),
            0.5 * (self.im_lo + self.im_hi),
        )
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_lo..=self.re_hi).contains(&z.re) && (self.im_lo..=self.im_hi).contains(&z.im)
    }

    fn diag(&self) -> f64 {
        let dr = self.re_hi - self.re_lo;
        let di = self.im_hi - self.im_lo;
        (dr * dr + di * di).sqrt()
    }

    fn expanded(&self, factor: f64) -> Self {
        let cr = 0.5 * (self.re_lo + self.re_hi);
        let ci = 0.5 * (self.im_lo + self.im_hi);
        let hr = 0.5 * (self.re_hi - self.re_lo) * factor;
        let hi = 0.5 * (self.im_hi - self.im_lo) * factor;
        Self::new(cr - hr, cr + hr, ci - hi, ci + hi)
    }

    fn quadrisect(&self) -> [Self; 4] {
        let cr = 0.5 * (self.re_lo + self.re_hi);
        let ci = 0.5 * (self.im_lo + self.im_hi);
        [
            Self::new(self.re_lo, cr, self.im_lo, ci),
            Self::new(cr, self.re_hi, self.im_lo, ci),
            Self::new(self.re_lo, cr, ci, self.im_hi),
            Self::new(cr, self.re_hi, ci, self.im_hi),
        ]
    }
}

pub(crate) trait ComplexCharFn {
    fn eval(&mut self, lambda: Complex64, tight: bool) -> Result<Complex64, OracleError>;
}

impl<F: FnMut(Complex64, bool) -> Result<Complex64, OracleError>> ComplexCharFn for F {
    fn eval(&mut self, lambda: Complex64, tight: bool) -> Result<Complex64, OracleError> {
        self(lambda, tight)
    }
}

struct EvalCache {
    map: BTreeMap<(u64, u64), Complex64>,
}

impl EvalCache {
    fn new() -> Self {
        Self {
            map: BTreeMap::new(),
        }
    }

    fn get_or_eval<F: ComplexCharFn>(
        &mut self,
        f: &mut F,
        z: Complex64,
    ) -> Result<Complex64, OracleError> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.map.get(&key) {
            return Ok(*v);
        }
        let v = f.eval(z, false)?;
        self.map.insert(key, v);
        Ok(v)
    }
}

/// All zeros of an analytic λ-callable inside `search_rect`, found by
/// recursive quadrisection on argument-principle winding numbers and
/// polished by complex secant iteration. Returns exactly `count` zeros
/// sorted by real part (ties by imaginary part); errors if the rectangle
/// holds fewer.
pub fn find_eigenvalues_complex<F>(
    char_fn: &mut F,
    search_rect: Rect,
    count: usize,
) -> Result<Vec<Complex64>, OracleError>
where
    F: FnMut(Complex64) -> Result<Complex64, OracleError>,
{
    let mut wrapped = |lambda: Complex64, _tight: bool| char_fn(lambda);
    find_complex_zeros(&mut wrapped, search_rect, count)
}

pub(crate) fn find_complex_zeros<F: ComplexCharFn>(
    f: &mut F,
    search_rect: Rect,
    count: usize,
) -> Result<Vec<Complex64>, OracleError> {
    let mut cache = EvalCache::new();
    let mut zeros = Vec::new();
    collect_zeros(f, &mut cache, search_rect, 0, &mut zeros)?;
    zeros.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    zeros.dedup_by(|a, b| (*a - *b).norm() < 1e-8 * (1.0 + a.norm()));
    if zeros.len() < count {
        return Err(OracleError::InsufficientZeros {
            found: zeros.len(),
            requested: count,
        });
    }
    zeros.truncate(count);
    Ok(zeros)
}

fn collect_zeros<F: ComplexCharFn>(
    f: &mut F,
    cache: &mut EvalCache,
    rect: Rect,
    depth: usize,
    out: &mut Vec<Complex64>,
) -> Result<(), OracleError> {
    let (w, boundary_scale) = winding_with_retry(f, cache, rect)?;
    if w == 0 {
        return Ok(());
    }
    if w == 1 {
        let z = refine_zero(f, cache, rect, boundary_scale, depth)?;
        out.push(z);
        return Ok(());
    }
    if depth > 48 || rect.diag() < 1e-8 {
        return Err(OracleError::MultipleEigenvalue {
            near: rect.center(),
        });
    }
    for sub in rect.quadrisect() {
        collect_zeros(f, cache, sub, depth + 1, out)?;
    }
    Ok(())
}

/// Winding number of the image of the rectangle boundary, with boundary
/// refinement and deterministic jitter when zeros sit on the contour.
fn winding_with_retry<F: ComplexCharFn>(
    f: &mut F,
    cache: &mut EvalCache,
    rect: Rect,
) -> Result<(i64, f64), OracleError> {
    let mut attempt_rect = rect;
    for attempt in 0..4 {
        match winding(f, cache, attempt_rect) {
            Ok(res) => return Ok(res),
            Err(WindingFailure::OnBoundary) | Err(WindingFailure::Unstable(_)) if attempt < 3 => {
                attempt_rect = attempt_rect.expanded(1.0 + 0.0037 * (attempt + 1) as f64);
            }
            Err(WindingFailure::Unstable(w)) => {
                return Err(OracleError::WindingUnstable { winding: w })
            }
            Err(WindingFailure::OnBoundary) => {
                return Err(OracleError::WindingUnstable { winding: f64::NAN })
            }
            Err(WindingFailure::Oracle(e)) => return Err(e),
        }
    }
    unreachable!()
}

enum WindingFailure {
    Oracle(OracleError),
    OnBoundary,
    Unstable(f64),
}

impl From<OracleError> for WindingFailure {
    fn from(e: OracleError) -> Self {
        WindingFailure::Oracle(e)
    }
}

fn winding<F: ComplexCharFn>(
    f: &mut F,
    cache: &mut EvalCache,
    rect: Rect,
) -> Result<(i64, f64), WindingFailure> {
    let mut per_side = 64usize;
    loop {
        let pts = boundary_points(rect, per_side);
        let mut vals = Vec::with_capacity(pts.len());
        let mut scale: f64 = 0.0;
        for &z in &pts {
            let v = cache.get_or_eval(f, z)?;
            scale = scale.max(v.norm());
            vals.push(v);
        }
        if scale == 0.0 {
            return Err(WindingFailure::OnBoundary);
        }
        if vals.iter().any(|v| v.norm() < 1e-12 * scale) {
            return Err(WindingFailure::OnBoundary);
        }

        let mut total = 0.0;
        let mut aliased = false;
        for i in 0..vals.len() {
            let a = vals[i];
            let b = vals[(i + 1) % vals.len()];
            let darg = (b / a).arg();
            if darg.abs() > 0.45 * PI {
                aliased = true;
                break;
            }
            total += darg;
        }
        let w = total / (2.0 * PI);
        if !aliased {
            if (w - w.round()).abs() <= 0.2 {
                return Ok((w.round() as i64, scale));
            }
            return Err(WindingFailure::Unstable(w));
        }
        if per_side >= 1024 {
            return Err(WindingFailure::Unstable(w));
        }
        per_side *= 2;
    }
}

fn boundary_points(rect: Rect, per_side: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(4 * per_side);
    let n = per_side as f64;
    for i in 0..per_side {
        let t = i as f64 / n;
        pts.push(c64(rect.re_lo + t * (rect.re_hi - rect.re_lo), rect.im_lo));
    }
    for i in 0..per_side {
        let t = i as f64 / n;
        pts.push(c64(rect.re_hi, rect.im_lo + t * (rect.im_hi - rect.im_lo)));
    }
    for i in 0..per_side {
        let t = i as f64 / n;
        pts.push(c64(rect.re_hi - t * (rect.re_hi - rect.re_lo), rect.im_hi));
    }
    for i in 0..per_side {
        let t = i as f64 / n;
        pts.push(c64(rect.re_lo, rect.im_hi - t * (rect.im_hi - rect.im_lo)));
    }
    pts
}

/// Secant refinement of the single zero inside `rect`, run to step-size
/// convergence; falls back to further quadrisection when the iteration
/// escapes.
fn refine_zero<F: ComplexCharFn>(
    f: &mut F,
    cache: &mut EvalCache,
    rect: Rect,
    boundary_scale: f64,
    depth: usize,
) -> Result<Complex64, OracleError> {
    let guard = rect.expanded(3.0);

    let mut z0 = rect.center();
    let mut z1 = z0 + c64(rect.diag() * 0.03 + 1e-9, rect.diag() * 0.017);
    let mut f0 = f.eval(z0, true)?;
    let mut f1 = f.eval(z1, true)?;
    // Residual scale local to this rectangle: the center values sit a
    // fraction of the rect away from the zero, unlike the boundary
    // maximum, which far corners can dominate.
    let target = ROOT_RESIDUAL * f0.norm().max(f1.norm()).max(1e-12 * boundary_scale).max(1e-300);
    let mut best: Option<(Complex64, f64)> = None;
    for _ in 0..60 {
        if best.map_or(true, |(_, bn)| f1.norm() < bn) {
            best = Some((z1, f1.norm()));
        }
        let converged_step = (z1 - z0).norm() < 1e-14 * (1.0 + z1.norm());
        if converged_step || f1.norm() == 0.0 {
            break;
        }
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let z2 = z1 - f1 * (z1 - z0) / denom;
        if !z2.is_finite() || !guard.contains(z2) {
            break;
        }
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f.eval(z1, true)?;
    }
    if let Some((z, fnorm)) = best {
        if fnorm <= target && rect.expanded(1.2).contains(z) {
            return Ok(z);
        }
    }

    // Secant escaped or stalled: pin the zero down by subdivision.
    if depth > 48 || rect.diag() < 1e-10 {
        return Err(OracleError::MultipleEigenvalue {
            near: rect.center(),
        });
    }
    for sub in rect.quadrisect() {
        let (w, sc) = winding_with_retry(f, cache, sub)?;
        if w >= 1 {
            return refine_zero(f, cache, sub, sc, depth + 1);
        }
    }
    // Zero sits exactly on an internal cut line; nudge the split.
    let shifted = rect.expanded(1.013);
    for sub in shifted.quadrisect() {
        let (w, sc) = winding_with_retry(f, cache, sub)?;
        if w >= 1 {
            return refine_zero(f, cache, sub, sc, depth + 1);
        }
    }
    Err(OracleError::MultipleEigenvalue {
        near: rect.center(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn free_delta_lambda(lambda: f64, b: f64) -> f64 {
        // Delta(λ) for q=0, h=H=0: -ρ sin(ρ b), even in ρ.
        let rho = Complex64::from(lambda).sqrt();
        let v = -rho * (rho * b).sin();
        v.re
    }

    #[test]
    fn free_dirichlet_like_spectrum() {
        // q=0, H=0, b=pi: Delta0 = cos(ρπ), zeros μ_k = k + 1/2.
        let mut f = |lambda: f64| -> Result<f64, OracleError> {
            let rho = Complex64::from(lambda).sqrt();
            Ok((rho * PI).cos().re)
        };
        let roots = find_eigenvalues_selfadjoint(&mut f, 10, -5.0, PI).unwrap();
        for (k, r) in roots.iter().enumerate() {
            let expect = (k as f64 + 0.5) * (k as f64 + 0.5);
            assert!(
                (r - expect).abs() < 1e-10 * (1.0 + expect),
                "k={k}: {r} vs {expect}"
            );
        }
    }

    #[test]
    fn free_robin_spectrum_includes_zero() {
        // q=0, h=H=0, b=pi: λ_k = k² with λ_0 = 0.
        let mut f = |lambda: f64| -> Result<f64, OracleError> { Ok(free_delta_lambda(lambda, PI)) };
        let roots = find_eigenvalues_selfadjoint(&mut f, 6, -4.0, PI).unwrap();
        for (k, r) in roots.iter().enumerate() {
            let expect = (k * k) as f64;
            assert!((r - expect).abs() < 1e-10 * (1.0 + expect), "k={k}: {r}");
        }
    }

    #[test]
    fn negative_eigenvalue_found() {
        // f(λ) = (λ + 7)(λ - 2)(λ - 11) scaled: roots at -7, 2, 11.
        let mut f = |lambda: f64| -> Result<f64, OracleError> {
            Ok((lambda + 7.0) * (lambda - 2.0) * (lambda - 11.0) * 1e-3)
        };
        let roots = find_eigenvalues_selfadjoint(&mut f, 3, -50.0, PI).unwrap();
        assert!((roots[0] + 7.0).abs() < 1e-9);
        assert!((roots[1] - 2.0).abs() < 1e-9);
        assert!((roots[2] - 11.0).abs() < 1e-9);
    }

    #[test]
    fn complex_finder_single_zero() {
        // Free Delta in λ-form has a simple zero at λ = 4 (b = π).
        let mut f = |lambda: Complex64| -> Result<Complex64, OracleError> {
            let rho = lambda.sqrt();
            Ok(-rho * (rho * PI).sin())
        };
        let zeros =
            find_eigenvalues_complex(&mut f, Rect::new(2.0, 7.3, -1.0, 1.0), 1).unwrap();
        assert!((zeros[0] - c64(4.0, 0.0)).norm() < 1e-8, "{:?}", zeros);
    }

    #[test]
    fn complex_finder_multiple_zeros() {
        // Polynomial with known complex roots.
        let r1 = c64(1.0, 0.5);
        let r2 = c64(3.0, -0.7);
        let r3 = c64(5.5, 0.2);
        let mut f = |z: Complex64| -> Result<Complex64, OracleError> {
            Ok((z - r1) * (z - r2) * (z - r3) * 1e-2)
        };
        let zeros = find_eigenvalues_complex(&mut f, Rect::new(0.0, 7.0, -2.0, 2.0), 3).unwrap();
        let expect = vec![r1, r2, r3];
        for (z, e) in zeros.iter().zip(&expect) {
            assert!((z - e).norm() < 1e-8, "{z} vs {e}");
        }
    }

    #[test]
    fn complex_finder_counts_correctly_when_fewer() {
        let r1 = c64(1.0, 0.0);
        let mut f = |z: Complex64| -> Result<Complex64, OracleError> { Ok(z - r1) };
        let err = find_eigenvalues_complex(&mut f, Rect::new(0.0, 4.0, -1.0, 1.0), 2);
        assert!(matches!(err, Err(OracleError::InsufficientZeros { found: 1, requested: 2 })));
    }

    #[test]
    fn winding_survives_zero_near_boundary() {
        // Root at 2.0 + 0i; rectangle edge passes very close to it.
        let mut f = |z: Complex64, _tight: bool| -> Result<Complex64, OracleError> {
            Ok((z - c64(2.0, 1e-6)) * (z - c64(3.0, 0.4)))
        };
        let zeros = find_complex_zeros(&mut f, Rect::new(1.0, 4.0, 0.0, 1.0), 1).unwrap();
        assert!(!zeros.is_empty());
    }
}
