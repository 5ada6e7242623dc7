//! Bivariate Meijer-G function as a double Mellin–Barnes integral
//!
//! `G(x, y) = (1/2πi)² ∬ Φ_o(s + t) Φ_1(s) Φ_2(t) x^s y^t ds dt`,
//!
//! where each `Φ` is the kernel of the corresponding univariate block.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::contour::{line_integral, minimize_on_gap, peak_width};
use super::meijer::MeijerGSpec;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, tol, Real};

/// Outer block coupling both variables plus one block per variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivariateGSpec<T> {
    pub outer: MeijerGSpec<T>,
    pub first: MeijerGSpec<T>,
    pub second: MeijerGSpec<T>,
}

const MAX_ARGUMENT: f64 = 1e8;

impl<T: Real> BivariateGSpec<T> {
    pub fn new(outer: MeijerGSpec<T>, first: MeijerGSpec<T>, second: MeijerGSpec<T>) -> Result<Self> {
        let spec = Self {
            outer,
            first,
            second,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        for block in [&self.outer, &self.first, &self.second] {
            block.check_orders()?;
            block.check_separation()?;
        }
        Ok(())
    }

    /// Parameters of `y^α G(x, y)`.
    pub fn shifted_y(&self, alpha: T) -> Self {
        Self {
            outer: self.outer.shifted(alpha),
            first: self.first.clone(),
            second: self.second.shifted(alpha),
        }
    }

    /// Parameters of `x^α G(x, y)`.
    pub fn shifted_x(&self, alpha: T) -> Self {
        Self {
            outer: self.outer.shifted(alpha),
            first: self.first.shifted(alpha),
            second: self.second.clone(),
        }
    }

    fn ln_envelope(&self, cs: T, ct: T) -> T {
        self.outer.ln_envelope(cs + ct) + self.first.ln_envelope(cs) + self.second.ln_envelope(ct)
    }
}

/// `G(x, y)`.
pub fn bivariate_meijer_g<T: Real>(spec: &BivariateGSpec<T>, x: T, y: T) -> Result<T> {
    bivariate_meijer_g_scaled(spec, x, y, T::zero())
}

/// `G(x, y) · e^{−ln_scale}`.
pub fn bivariate_meijer_g_scaled<T: Real>(
    spec: &BivariateGSpec<T>,
    x: T,
    y: T,
    ln_scale: T,
) -> Result<T> {
    spec.check()?;
    for (name, v) in [("x", x), ("y", y)] {
        if !(v > T::zero()) || !v.is_finite() {
            return Err(Error::domain(
                "bivariate_meijer_g",
                format!("{} = {} must be positive", name, v),
            ));
        }
    }
    let fail = |detail: String, cs: T, ct: T, heights: Vec<f64>| Error::NonConvergence {
        function: "bivariate_meijer_g",
        detail,
        abscissa: vec![to_f64(cs), to_f64(ct)],
        height: heights,
    };
    let nan = T::nan();
    if x > lit(MAX_ARGUMENT) || y > lit(MAX_ARGUMENT) {
        return Err(fail(
            format!(
                "arguments ({}, {}) lie outside the supported range (0, {:e}]",
                x, y, MAX_ARGUMENT
            ),
            nan,
            nan,
            vec![],
        ));
    }
    for block in [&spec.outer, &spec.first, &spec.second] {
        if !(block.delta() > T::zero()) {
            return Err(fail(
                "a block does not decay along vertical lines".into(),
                nan,
                nan,
                vec![],
            ));
        }
    }

    let (lo_o, hi_o) = spec.outer.gap();
    let (lo_1, hi_1) = spec.first.gap();
    let (lo_2, hi_2) = spec.second.gap();
    let s_lo = lo_1.max(lo_o - hi_2);
    let s_hi = hi_1.min(hi_o - lo_2);
    if !(s_lo < s_hi) {
        return Err(fail(
            "no pair of vertical lines separates all pole families".into(),
            nan,
            nan,
            vec![],
        ));
    }
    let (lx, ly) = (x.ln(), y.ln());
    let phi = |cs: T, ct: T| spec.ln_envelope(cs, ct) + cs * lx + ct * ly;
    let t_range = |cs: T| (lo_2.max(lo_o - cs), hi_2.min(hi_o - cs));
    let best_t = |cs: T| {
        let (a, b) = t_range(cs);
        minimize_on_gap(|ct| phi(cs, ct), a, b)
    };
    let cs = minimize_on_gap(
        |cs| {
            let (a, b) = t_range(cs);
            if a < b {
                phi(cs, best_t(cs))
            } else {
                T::infinity()
            }
        },
        s_lo,
        s_hi,
    );
    let ct = best_t(cs);
    let phi_c = phi(cs, ct);
    if !phi_c.is_finite() {
        return Err(fail("integrand is not finite at the abscissae".into(), cs, ct, vec![]));
    }
    let h: T = lit(1e-3);
    let curv_s = (phi(cs + h, ct) - phi_c - phi_c + phi(cs - h, ct)) / (h * h);
    let curv_t = (phi(cs, ct + h) - phi_c - phi_c + phi(cs, ct - h)) / (h * h);
    let (ws, wt) = (peak_width(curv_s), peak_width(curv_t));

    let mut err: Option<Error> = None;
    let mut max_inner_height = T::zero();
    let inner_rel = to_f64(tol::<T>(1e-10));
    let inner_tail = to_f64(tol::<T>(1e-12));
    let outer_rel = to_f64(tol::<T>(1e-8));
    let outer_tail = to_f64(tol::<T>(1e-10));
    let max_height: T = lit(1e4);
    let outer_fn = |ts: T| -> Complex<T> {
        if err.is_some() {
            return Complex::new(T::zero(), T::zero());
        }
        let s = Complex::new(cs, ts);
        let k1 = match spec.first.ln_kernel(s) {
            Ok(Some(v)) => v,
            Ok(None) => return Complex::new(T::zero(), T::zero()),
            Err(e) => {
                err = Some(e);
                return Complex::new(T::zero(), T::zero());
            }
        };
        let base = k1 + s * lx - phi_c;
        let mut inner_err = None;
        let inner = |tt: T| -> Complex<T> {
            let t = Complex::new(ct, tt);
            let ko = spec.outer.ln_kernel(s + t);
            let k2 = spec.second.ln_kernel(t);
            match (ko, k2) {
                (Ok(Some(a)), Ok(Some(b))) => (base + a + b + t * ly).exp(),
                (Err(e), _) | (_, Err(e)) => {
                    inner_err.get_or_insert(e);
                    Complex::new(T::zero(), T::zero())
                }
                _ => Complex::new(T::zero(), T::zero()),
            }
        };
        match line_integral(inner, wt, inner_rel, inner_tail, max_height) {
            Ok(li) => {
                if let Some(e) = inner_err {
                    err = Some(e);
                }
                max_inner_height = max_inner_height.max(li.height);
                li.value
            }
            Err(e) => {
                err = Some(e);
                Complex::new(T::zero(), T::zero())
            }
        }
    };
    let outer = line_integral(outer_fn, ws, outer_rel, outer_tail, max_height);
    let heights = |hs: T| vec![to_f64(hs), to_f64(max_inner_height)];
    let outer = match outer {
        Ok(v) => v,
        Err(Error::NonConvergence { detail, .. }) => {
            return Err(fail(detail, cs, ct, heights(max_height)))
        }
        Err(e) => return Err(e),
    };
    if let Some(e) = err {
        return Err(match e {
            Error::NonConvergence { detail, .. } => fail(detail, cs, ct, heights(outer.height)),
            other => other,
        });
    }
    let re = outer.value.re;
    let im = outer.value.im;
    let floor = ws * wt * lit(1e-10);
    if im.abs() > lit::<T>(1e-8) * re.abs() + floor {
        return Err(Error::Consistency {
            function: "bivariate_meijer_g",
            detail: format!(
                "imaginary part {:e} against real part {:e} at abscissae ({}, {})",
                to_f64(im),
                to_f64(re),
                to_f64(cs),
                to_f64(ct)
            ),
        });
    }
    let value = re * (phi_c - ln_scale).exp() / (T::TAU() * T::TAU());
    if !value.is_finite() {
        return Err(fail(
            "value overflows; supply a log scale".into(),
            cs,
            ct,
            heights(outer.height),
        ));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::meijer_g;

    fn block(m: usize, n: usize, a: &[f64], b: &[f64]) -> MeijerGSpec<f64> {
        MeijerGSpec::new(m, n, a.to_vec(), b.to_vec()).unwrap()
    }

    // ∫ x^{α−1} e^{−ωx} G(σ₁x) e^{−σ₂x} dx collapses to a univariate G.
    #[test]
    fn exponential_block_absorbs() {
        let alpha = 1.3;
        let spec = BivariateGSpec::new(
            block(0, 1, &[1.0 - alpha], &[]),
            block(2, 0, &[], &[0.4, -0.4]),
            block(1, 0, &[], &[0.0]),
        )
        .unwrap();
        for (x, y) in [(0.7, 0.4), (2.5, 1.5), (0.05, 3.0)] {
            let got = bivariate_meijer_g(&spec, x, y).unwrap();
            let reduced = block(2, 1, &[1.0 - alpha], &[0.4, -0.4]);
            let want = (1.0_f64 + y).powf(-alpha) * meijer_g(&reduced, x / (1.0 + y)).unwrap();
            assert!(((got - want) / want).abs() < 1e-7, "{x} {y}: {got} vs {want}");
        }
    }

    #[test]
    fn huge_argument_is_refused() {
        let spec = BivariateGSpec::new(
            block(0, 1, &[-0.3], &[]),
            block(1, 0, &[], &[0.0]),
            block(1, 0, &[], &[0.0]),
        )
        .unwrap();
        match bivariate_meijer_g(&spec, 2e8, 1.0) {
            Err(Error::NonConvergence { abscissa, .. }) => assert_eq!(abscissa.len(), 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn y_shift() {
        let spec = BivariateGSpec::new(
            block(0, 1, &[-0.3], &[]),
            block(2, 0, &[], &[0.4, -0.4]),
            block(1, 0, &[], &[0.0]),
        )
        .unwrap();
        let (x, y) = (0.9_f64, 0.6_f64);
        let lhs = y.powf(0.7) * bivariate_meijer_g(&spec, x, y).unwrap();
        let rhs = bivariate_meijer_g(&spec.shifted_y(0.7), x, y).unwrap();
        assert!(((lhs - rhs) / rhs).abs() < 1e-7);
    }
}
