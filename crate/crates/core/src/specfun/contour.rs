//! Integration of Mellin–Barnes integrands along vertical lines.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quad::{integrate_vec, Tolerance};
use crate::scalar::{lit, to_f64, Real};

/// Outcome of a line integral `∫_{−∞}^{∞} f(τ) dτ`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineIntegral<T> {
    pub value: Complex<T>,
    /// Largest |τ| reached before the tail was dropped.
    pub height: T,
}

/// Integrates `f` over the real line with panels that double in width away
/// from the origin. `width` is the scale of the central peak; integration in
/// each direction stops once two consecutive panels add less than
/// `tail_rel` of the running integral.
pub(crate) fn line_integral<T: Real, F>(
    mut f: F,
    width: T,
    rel: f64,
    tail_rel: f64,
    max_height: T,
) -> Result<LineIntegral<T>>
where
    F: FnMut(T) -> Complex<T>,
{
    let tail: T = lit(tail_rel);
    let panel_tol = Tolerance {
        abs: 0.0,
        rel,
        max_intervals: 400,
    };
    let mut total = Complex::new(T::zero(), T::zero());
    let mut height = T::zero();
    for dir in [T::one(), -T::one()] {
        let mut lo = T::zero();
        let mut hi = width;
        let mut quiet = 0;
        let mut panels = 0;
        loop {
            let mut g = |t: T| {
                let v = f(dir * t);
                if v.re.is_finite() && v.im.is_finite() {
                    [v.re, v.im]
                } else {
                    [T::zero(), T::zero()]
                }
            };
            // Absolute floor relative to what has been accumulated so far keeps
            // the tail panels from chasing noise.
            let scale = total.norm().max(width * lit(1e-3));
            let tol = Tolerance {
                abs: to_f64(scale) * tail_rel * 1e-2,
                ..panel_tol
            };
            let est = integrate_vec(&mut g, lo, hi, &[], tol)?;
            let piece = Complex::new(est.value[0], est.value[1]);
            total = total + piece;
            panels += 1;
            height = height.max(hi);
            if piece.norm() <= tail * total.norm() && panels >= 3 {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
            if hi >= max_height {
                return Err(Error::NonConvergence {
                    function: "Mellin-Barnes line integral",
                    detail: format!(
                        "tail still contributes {:e} of the integral at height {}",
                        to_f64(piece.norm() / total.norm().max(T::min_positive_value())),
                        to_f64(hi)
                    ),
                    abscissa: vec![],
                    height: vec![to_f64(hi)],
                });
            }
            let w = hi - lo;
            lo = hi;
            hi = hi + w * lit(2.0);
        }
    }
    Ok(LineIntegral {
        value: total,
        height,
    })
}

/// Picks the abscissa inside `(lo, hi)` that minimizes `phi`. Infinite ends
/// are replaced by a bracket that is widened until `phi` starts to grow.
pub(crate) fn minimize_on_gap<T: Real, F>(mut phi: F, lo: T, hi: T) -> T
where
    F: FnMut(T) -> T,
{
    let eval = |phi: &mut F, c: T| {
        let v = phi(c);
        if v.is_nan() {
            T::infinity()
        } else {
            v
        }
    };
    let (mut a, mut b) = (lo, hi);
    if a.is_infinite() && b.is_infinite() {
        a = lit(-8.0);
        b = lit(8.0);
    }
    if a.is_infinite() {
        let mut w: T = lit(8.0);
        loop {
            let far = b - w;
            let near = b - w * lit(0.5);
            if eval(&mut phi, far) > eval(&mut phi, near) || w > lit(4096.0) {
                a = far;
                break;
            }
            w = w * lit(2.0);
        }
    } else if b.is_infinite() {
        let mut w: T = lit(8.0);
        loop {
            let far = a + w;
            let near = a + w * lit(0.5);
            if eval(&mut phi, far) > eval(&mut phi, near) || w > lit(4096.0) {
                b = far;
                break;
            }
            w = w * lit(2.0);
        }
    }
    // Stay clear of the poles that bound the gap.
    let margin = (b - a) * lit(0.01);
    let lo_c = if lo.is_finite() { a + margin } else { a };
    let hi_c = if hi.is_finite() { b - margin } else { b };

    let n = 48;
    let step = (hi_c - lo_c) / crate::scalar::from_usize(n);
    let mut best = 0;
    let mut best_v = T::infinity();
    let grid: Vec<T> = (0..=n)
        .map(|i| lo_c + step * crate::scalar::from_usize(i))
        .collect();
    for (i, &c) in grid.iter().enumerate() {
        let v = eval(&mut phi, c);
        if v < best_v {
            best_v = v;
            best = i;
        }
    }
    if !best_v.is_finite() {
        return (lo_c + hi_c) * lit(0.5);
    }
    // golden-section refinement on the neighbouring cells
    let mut x0 = grid[best.saturating_sub(1)];
    let mut x3 = grid[(best + 1).min(n)];
    let g: T = lit(0.618_033_988_749_894_8);
    let mut x1 = x3 - g * (x3 - x0);
    let mut x2 = x0 + g * (x3 - x0);
    let mut f1 = eval(&mut phi, x1);
    let mut f2 = eval(&mut phi, x2);
    for _ in 0..40 {
        if f1 < f2 {
            x3 = x2;
            x2 = x1;
            f2 = f1;
            x1 = x3 - g * (x3 - x0);
            f1 = eval(&mut phi, x1);
        } else {
            x0 = x1;
            x1 = x2;
            f1 = f2;
            x2 = x0 + g * (x3 - x0);
            f2 = eval(&mut phi, x2);
        }
    }
    let c = (x1 + x2) * lit(0.5);
    if eval(&mut phi, c) <= best_v {
        c
    } else {
        grid[best]
    }
}

/// Width of the central peak of `exp(phi)` at its minimum along the real
/// axis, from the curvature of `Re ln|integrand|` across the line.
pub(crate) fn peak_width<T: Real>(curvature: T) -> T {
    let lo: T = lit(0.05);
    let hi: T = lit(50.0);
    if curvature > T::zero() && curvature.is_finite() {
        curvature.sqrt().recip().max(lo).min(hi)
    } else {
        T::one()
    }
}
