//! Univariate Meijer-G function for real parameters and positive argument.
//!
//! `G^{m,n}_{p,q}(x | a; b) = (1/2πi) ∫ Φ(s) x^s ds` with
//! `Φ(s) = Π_{j<m} Γ(b_j − s) Π_{k<n} Γ(1 − a_k + s) / (Π_{k≥n} Γ(a_k − s) Π_{j≥m} Γ(1 − b_j + s))`.
//!
//! Two evaluation paths are provided: the residue (Slater) series over the
//! poles of `Γ(b_j − s)`, and direct quadrature along a vertical line that
//! separates the two pole families.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::contour::{line_integral, minimize_on_gap, peak_width};
use super::gamma::{ln_gamma_complex, ln_gamma_signed};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

/// Parameter block of a Meijer-G function. `p = a.len()`, `q = b.len()`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeijerGSpec<T> {
    pub m: usize,
    pub n: usize,
    pub a: Vec<T>,
    pub b: Vec<T>,
}

/// Evaluation path for [`meijer_g_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Series when it converges without cancellation, contour otherwise.
    Auto,
    Series,
    Contour,
}

/// Value of a Meijer-G evaluation with the path that produced it.
#[derive(Debug, Clone, Copy)]
pub struct GEvaluation<T> {
    pub value: T,
    pub method: Method,
    /// Contour abscissa, when the contour path was used.
    pub abscissa: Option<T>,
    /// Largest |Im s| visited on the contour.
    pub height: Option<T>,
}

const INTEGER_TOL: f64 = 1e-10;
const COLLISION_TOL: f64 = 1e-7;
const PERTURBATION: f64 = 1e-6;
const MAX_CANCELLATION: f64 = 1e3;
/// Split double poles cancel by construction at the `1/ε` level.
const MAX_CANCELLATION_SPLIT: f64 = 1e8;
const MAX_TERMS: usize = 20_000;

fn positive_integer<T: Real>(d: T) -> bool {
    let r = d.round();
    r >= T::one() && (d - r).abs() <= lit::<T>(INTEGER_TOL) * r.max(T::one())
}

fn nonpositive_integer<T: Real>(d: T) -> bool {
    let r = d.round();
    r <= T::zero() && (d - r).abs() <= lit::<T>(INTEGER_TOL) * r.abs().max(T::one())
}

impl<T: Real> MeijerGSpec<T> {
    pub fn new(m: usize, n: usize, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        let spec = Self { m, n, a, b };
        spec.check_orders()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.a.len()
    }

    pub fn q(&self) -> usize {
        self.b.len()
    }

    pub(crate) fn check_orders(&self) -> Result<()> {
        if self.m > self.q() || self.n > self.p() {
            return Err(Error::InvalidParameter(format!(
                "Meijer-G orders m={}, n={} exceed q={}, p={}",
                self.m,
                self.n,
                self.q(),
                self.p()
            )));
        }
        if self.a.iter().chain(&self.b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "Meijer-G parameters must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Reports a pole shared by `Γ(b_j − s)` and `Γ(1 − a_k + s)`, which no
    /// contour can separate.
    pub fn check_separation(&self) -> Result<()> {
        for (k, &ak) in self.a[..self.n].iter().enumerate() {
            for (j, &bj) in self.b[..self.m].iter().enumerate() {
                if positive_integer(ak - bj) {
                    return Err(Error::PoleCollision {
                        a_index: k,
                        a: to_f64(ak),
                        b_index: j,
                        b: to_f64(bj),
                    });
                }
            }
        }
        Ok(())
    }

    /// Parameters of `x^α G(x)`, which is again a Meijer-G of the same orders.
    pub fn shifted(&self, alpha: T) -> Self {
        Self {
            m: self.m,
            n: self.n,
            a: self.a.iter().map(|&v| v + alpha).collect(),
            b: self.b.iter().map(|&v| v + alpha).collect(),
        }
    }

    /// Parameters of `G(1/x)` written as a Meijer-G in `x`.
    pub fn inverted(&self) -> Self {
        Self {
            m: self.n,
            n: self.m,
            a: self.b.iter().map(|&v| T::one() - v).collect(),
            b: self.a.iter().map(|&v| T::one() - v).collect(),
        }
    }

    /// Exponential decay rate parameter of `|Φ(c + iτ)|` in `|τ|`; the
    /// vertical-line integral converges absolutely when it is positive.
    pub fn delta(&self) -> T {
        from_usize::<T>(self.m + self.n) - from_usize::<T>(self.p() + self.q()) * lit(0.5)
    }

    /// Open interval of abscissas that separate the pole families.
    pub fn gap(&self) -> (T, T) {
        let lo = self.a[..self.n]
            .iter()
            .map(|&v| v - T::one())
            .fold(T::neg_infinity(), T::max);
        let hi = self.b[..self.m].iter().copied().fold(T::infinity(), T::min);
        (lo, hi)
    }

    /// `ln Φ(s)`, or `None` where a denominator gamma has a pole.
    pub(crate) fn ln_kernel(&self, s: Complex<T>) -> Result<Option<Complex<T>>> {
        let one = Complex::from(T::one());
        let mut acc = Complex::new(T::zero(), T::zero());
        for &bj in &self.b[..self.m] {
            acc = acc + ln_gamma_complex(Complex::from(bj) - s)?;
        }
        for &ak in &self.a[..self.n] {
            acc = acc + ln_gamma_complex(one - ak + s)?;
        }
        for &ak in &self.a[self.n..] {
            match ln_gamma_complex(Complex::from(ak) - s) {
                Ok(v) => acc = acc - v,
                Err(Error::Pole { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        for &bj in &self.b[self.m..] {
            match ln_gamma_complex(one - bj + s) {
                Ok(v) => acc = acc - v,
                Err(Error::Pole { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(acc))
    }

    /// Upper envelope of `ln |Φ(c)|` on the real axis inside the gap.
    /// Reciprocal gammas at negative arguments are bounded through the
    /// reflection formula with `|sin| ≤ 1`, which keeps the function smooth.
    pub(crate) fn ln_envelope(&self, c: T) -> T {
        let env_recip = |w: T| -> T {
            if w >= lit(0.5) {
                -ln_gamma_signed(w).map(|v| v.0).unwrap_or(T::infinity())
            } else {
                ln_gamma_signed(T::one() - w)
                    .map(|v| v.0)
                    .unwrap_or(T::neg_infinity())
                    - T::PI().ln()
            }
        };
        let lg = |w: T| ln_gamma_signed(w).map(|v| v.0).unwrap_or(T::infinity());
        let mut acc = T::zero();
        for &bj in &self.b[..self.m] {
            acc = acc + lg(bj - c);
        }
        for &ak in &self.a[..self.n] {
            acc = acc + lg(T::one() - ak + c);
        }
        for &ak in &self.a[self.n..] {
            acc = acc + env_recip(ak - c);
        }
        for &bj in &self.b[self.m..] {
            acc = acc + env_recip(T::one() - bj + c);
        }
        acc
    }
}

/// `G^{m,n}_{p,q}(x | a; b)` with the automatic path choice.
pub fn meijer_g<T: Real>(spec: &MeijerGSpec<T>, x: T) -> Result<T> {
    meijer_g_with(spec, x, T::zero(), Method::Auto).map(|e| e.value)
}

/// `G(x) · e^{−ln_scale}`, for values that would overflow or underflow.
pub fn meijer_g_scaled<T: Real>(spec: &MeijerGSpec<T>, x: T, ln_scale: T) -> Result<T> {
    meijer_g_with(spec, x, ln_scale, Method::Auto).map(|e| e.value)
}

/// `G(x) · e^{−ln_scale}` through the requested path.
pub fn meijer_g_with<T: Real>(
    spec: &MeijerGSpec<T>,
    x: T,
    ln_scale: T,
    method: Method,
) -> Result<GEvaluation<T>> {
    spec.check_orders()?;
    if !(x > T::zero()) || !x.is_finite() {
        return Err(Error::domain("meijer_g", format!("x = {} must be positive", x)));
    }
    spec.check_separation()?;
    match method {
        Method::Series => series_any(spec, x, ln_scale, true),
        Method::Contour => contour(spec, x, ln_scale),
        Method::Auto => {
            if !has_collision(spec) || !has_collision(&spec.inverted()) {
                if let Ok(v) = series_any(spec, x, ln_scale, false) {
                    return Ok(v);
                }
            }
            let contour_err = match contour(spec, x, ln_scale) {
                Ok(v) => return Ok(v),
                Err(e) => e,
            };
            series_any(spec, x, ln_scale, true).map_err(|_| contour_err)
        }
    }
}

/// Right-family poles that coincide or nearly coincide (double poles).
fn has_collision<T: Real>(spec: &MeijerGSpec<T>) -> bool {
    collision_offsets(spec).iter().any(|&k| k != 0)
}

/// For each `b_j` (j < m) the number of earlier right-family parameters it
/// collides with modulo the integers.
fn collision_offsets<T: Real>(spec: &MeijerGSpec<T>) -> Vec<usize> {
    let bs = &spec.b[..spec.m];
    (0..bs.len())
        .map(|h| {
            (0..h)
                .filter(|&j| {
                    let d = bs[j] - bs[h];
                    (d - d.round()).abs() < lit::<T>(COLLISION_TOL) * d.abs().max(T::one())
                })
                .count()
        })
        .collect()
}

fn series_any<T: Real>(
    spec: &MeijerGSpec<T>,
    x: T,
    ln_scale: T,
    allow_perturbation: bool,
) -> Result<GEvaluation<T>> {
    let (p, q) = (spec.p(), spec.q());
    let direct_ok = p < q || (p == q && x < lit(0.5));
    let inverted_ok = p > q || (p == q && x > lit(2.0));
    let attempt = |s: &MeijerGSpec<T>, arg: T| {
        if has_collision(s) {
            if allow_perturbation {
                series_perturbed(s, arg, ln_scale)
            } else {
                Err(Error::PoleCollision {
                    a_index: 0,
                    a: f64::NAN,
                    b_index: 0,
                    b: f64::NAN,
                })
            }
        } else {
            slater_series(s, arg, ln_scale, MAX_CANCELLATION)
        }
    };
    let value = if direct_ok {
        attempt(spec, x)?
    } else if inverted_ok {
        attempt(&spec.inverted(), x.recip())?
    } else {
        return Err(Error::NonConvergence {
            function: "meijer_g series",
            detail: format!("series does not converge for p = q at x = {}", x),
            abscissa: vec![],
            height: vec![],
        });
    };
    Ok(GEvaluation {
        value,
        method: Method::Series,
        abscissa: None,
        height: None,
    })
}

/// Double poles handled by splitting them with `±ε` offsets, averaging the
/// two signs and Richardson-extrapolating `ε → 0` from `ε` and `2ε`.
fn series_perturbed<T: Real>(spec: &MeijerGSpec<T>, x: T, ln_scale: T) -> Result<T> {
    let offsets = collision_offsets(spec);
    let eps: T = lit(PERTURBATION);
    let at = |h: T| -> Result<T> {
        let mut s = spec.clone();
        for (j, &k) in offsets.iter().enumerate() {
            s.b[j] = s.b[j] + h * from_usize(k);
        }
        slater_series(&s, x, ln_scale, MAX_CANCELLATION_SPLIT)
    };
    let avg = |h: T| -> Result<T> { Ok((at(h)? + at(-h)?) * lit(0.5)) };
    let a1 = avg(eps)?;
    let a2 = avg(eps + eps)?;
    Ok((a1 * lit(4.0) - a2) / lit(3.0))
}

/// Sum of residues at the simple poles `s = b_h + l`, `h < m`, `l ≥ 0`.
fn slater_series<T: Real>(spec: &MeijerGSpec<T>, x: T, ln_scale: T, max_cancel: f64) -> Result<T> {
    let lx = x.ln();
    let m = spec.m;
    let mut total = T::zero();
    let mut max_term = T::zero();
    let tiny: T = lit(1e-17);
    for h in 0..m {
        let bh = spec.b[h];
        // Past every parameter offset the term ratio no longer turns, so a
        // small decreasing term ends the family. Below it terms may vanish
        // (denominator poles) or dip and grow again (Γ(b_j − b_h − l)).
        let warmup = spec.b[..h]
            .iter()
            .chain(&spec.b[h + 1..])
            .chain(&spec.a[spec.n..])
            .map(|&v| to_f64(v - bh))
            .fold(0.0f64, f64::max)
            .ceil() as usize
            + 2;
        let mut zeros = 0usize;
        let mut prev = T::infinity();
        let mut sum_h = T::zero();
        // Π_{j≠h} Γ(b_j − b_h − l) carried as (log magnitude, sign) and
        // updated by the recurrence, which keeps near-integer gaps accurate
        let mut left = (T::zero(), T::one());
        for (j, &bj) in spec.b[..m].iter().enumerate() {
            if j != h {
                let (g, sg) = ln_gamma_signed(bj - bh)?;
                left = (left.0 + g, left.1 * sg);
            }
        }
        let mut l = 0usize;
        loop {
            if l > MAX_TERMS {
                return Err(Error::NonConvergence {
                    function: "meijer_g series",
                    detail: format!("no convergence after {} terms at x = {}", MAX_TERMS, x),
                    abscissa: vec![],
                    height: vec![],
                });
            }
            let term = residue_term(spec, h, l, left, lx, ln_scale)?;
            for (j, &bj) in spec.b[..m].iter().enumerate() {
                if j != h {
                    let w = (bj - bh) - from_usize::<T>(l + 1);
                    left = (left.0 - w.abs().ln(), left.1 * w.signum());
                }
            }
            let mag = term.abs();
            if !mag.is_finite() {
                return Err(Error::NonConvergence {
                    function: "meijer_g series",
                    detail: "series term overflowed".into(),
                    abscissa: vec![],
                    height: vec![],
                });
            }
            sum_h = sum_h + term;
            max_term = max_term.max(mag);
            if mag == T::zero() {
                zeros += 1;
                if zeros > 64 && l > warmup {
                    break;
                }
            } else {
                zeros = 0;
                let decreasing = mag <= prev;
                let small = mag <= tiny * sum_h.abs().max(max_term * tiny);
                if decreasing && small && l > warmup {
                    break;
                }
            }
            prev = mag;
            l += 1;
        }
        total = total + sum_h;
    }
    if max_term > lit::<T>(max_cancel) * total.abs() {
        return Err(Error::NonConvergence {
            function: "meijer_g series",
            detail: format!(
                "cancellation: largest term {:e} against sum {:e}",
                to_f64(max_term),
                to_f64(total)
            ),
            abscissa: vec![],
            height: vec![],
        });
    }
    Ok(total)
}

/// `(−1)^l / l! · Π' Γ(…) · x^{b_h + l} · e^{−ln_scale}` at the pole
/// `s = b_h + l`; `left` holds the product over the other right-family
/// parameters.
fn residue_term<T: Real>(
    spec: &MeijerGSpec<T>,
    h: usize,
    l: usize,
    left: (T, T),
    lx: T,
    ln_scale: T,
) -> Result<T> {
    let (m, n) = (spec.m, spec.n);
    let bh = spec.b[h];
    let lf: T = from_usize(l);
    let mut ln_mag = (bh + lf) * lx - ln_scale - ln_gamma_signed(lf + T::one())?.0 + left.0;
    let mut sign = if l % 2 == 0 { left.1 } else { -left.1 };
    for &ak in &spec.a[..n] {
        let (g, sg) = ln_gamma_signed((T::one() - ak + bh) + lf)?;
        ln_mag = ln_mag + g;
        sign = sign * sg;
    }
    for &ak in &spec.a[n..] {
        let w = (ak - bh) - lf;
        if nonpositive_integer(w) {
            return Ok(T::zero());
        }
        let (g, sg) = ln_gamma_signed(w)?;
        ln_mag = ln_mag - g;
        sign = sign * sg;
    }
    for &bj in &spec.b[m..] {
        let w = (T::one() - bj + bh) + lf;
        if nonpositive_integer(w) {
            return Ok(T::zero());
        }
        let (g, sg) = ln_gamma_signed(w)?;
        ln_mag = ln_mag - g;
        sign = sign * sg;
    }
    Ok(sign * ln_mag.exp())
}

fn contour<T: Real>(spec: &MeijerGSpec<T>, x: T, ln_scale: T) -> Result<GEvaluation<T>> {
    let (lo, hi) = spec.gap();
    let fail = |detail: String, c: Option<T>, h: Option<T>| Error::NonConvergence {
        function: "meijer_g contour",
        detail,
        abscissa: c.map(to_f64).into_iter().collect(),
        height: h.map(to_f64).into_iter().collect(),
    };
    if !(spec.delta() > T::zero()) {
        return Err(fail(
            format!(
                "integrand does not decay along vertical lines (m+n-(p+q)/2 = {})",
                to_f64(spec.delta())
            ),
            None,
            None,
        ));
    }
    if !(lo < hi) {
        return Err(fail(
            format!(
                "pole families interleave: left poles reach {} and right poles start at {}",
                to_f64(lo),
                to_f64(hi)
            ),
            None,
            None,
        ));
    }
    let lx = x.ln();
    let phi = |c: T| spec.ln_envelope(c) + c * lx;
    let c = minimize_on_gap(phi, lo, hi);
    let phi_c = phi(c);
    if !phi_c.is_finite() {
        return Err(fail("integrand is not finite on the contour".into(), Some(c), None));
    }
    let dh = ((hi - lo).min(lit(1.0)) * lit(1e-3)).max(lit(1e-6));
    let curvature = (phi(c + dh) - phi_c - phi_c + phi(c - dh)) / (dh * dh);
    let width = peak_width(curvature);

    let mut err = None;
    let integrand = |tau: T| -> Complex<T> {
        let s = Complex::new(c, tau);
        match spec.ln_kernel(s) {
            Ok(Some(v)) => (v + s * lx - phi_c).exp(),
            Ok(None) => Complex::new(T::zero(), T::zero()),
            Err(e) => {
                err.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        }
    };
    let rel = to_f64(crate::scalar::tol::<T>(1e-12));
    let tail = to_f64(crate::scalar::tol::<T>(1e-14));
    let li = line_integral(integrand, width, rel, tail, lit(1e5)).map_err(|e| match e {
        Error::NonConvergence { detail, height, .. } => Error::NonConvergence {
            function: "meijer_g contour",
            detail,
            abscissa: vec![to_f64(c)],
            height,
        },
        other => other,
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    let re = li.value.re;
    let im = li.value.im;
    let floor = width * lit(1e-13);
    if im.abs() > lit::<T>(1e-8) * re.abs() + floor {
        return Err(Error::Consistency {
            function: "meijer_g contour",
            detail: format!(
                "imaginary part {:e} against real part {:e} at abscissa {}",
                to_f64(im),
                to_f64(re),
                to_f64(c)
            ),
        });
    }
    let value = re * (phi_c - ln_scale).exp() / T::TAU();
    if !value.is_finite() {
        return Err(fail("value overflows; supply a log scale".into(), Some(c), Some(li.height)));
    }
    Ok(GEvaluation {
        value,
        method: Method::Contour,
        abscissa: Some(c),
        height: Some(li.height),
    })
}
