//! Mixture-Gamma fading envelopes.
//!
//! The envelope PDF is `f(x) = Σ 2 a_n x^{2b_n − 1} e^{−c x²}` on `x ≥ 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};
use crate::specfun::{ln_gamma, regularized_lower_gamma};

/// Largest supported number of terms in the Rice expansion.
pub const MAX_RICE_TERMS: usize = 60;

const NORMALIZATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MgTerm<T> {
    pub a: T,
    pub b: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureGamma<T> {
    pub terms: Vec<MgTerm<T>>,
    pub c: T,
    #[serde(default)]
    pub label: String,
}

impl<T: Real> MixtureGamma<T> {
    /// Builds and validates a mixture.
    pub fn new(terms: Vec<MgTerm<T>>, c: T, label: impl Into<String>) -> Result<Self> {
        let mg = Self {
            terms,
            c,
            label: label.into(),
        };
        mg.validate()?;
        Ok(mg)
    }

    /// Checks positivity of all parameters and that the PDF integrates to one.
    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::InvalidParameter("mixture has no terms".into()));
        }
        if !(self.c > T::zero()) || !self.c.is_finite() {
            return Err(Error::InvalidParameter(format!("rate c = {} must be positive", self.c)));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.a > T::zero()) || !(t.b > T::zero()) || !t.a.is_finite() || !t.b.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "term {i}: a = {}, b = {} must both be positive",
                    t.a, t.b
                )));
            }
        }
        let total = self.weights()?.into_iter().fold(T::zero(), |s, w| s + w);
        let tol: T = lit(NORMALIZATION_TOL);
        if (total - T::one()).abs() > tol.max(T::epsilon() * lit(64.0)) {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {} instead of 1",
                total
            )));
        }
        Ok(())
    }

    /// Mixing probabilities `w_n = a_n c^{−b_n} Γ(b_n)` of the squared
    /// envelope's Gamma components.
    pub fn weights(&self) -> Result<Vec<T>> {
        let lc = self.c.ln();
        self.terms
            .iter()
            .map(|t| Ok((t.a.ln() - t.b * lc + ln_gamma(t.b)?).exp()))
            .collect()
    }
}

/// Rice envelope with unit power and linear K-factor `k_r`, truncated to
/// `n_terms` terms and renormalized.
pub fn mg_from_rice<T: Real>(k_r: T, n_terms: usize) -> Result<MixtureGamma<T>> {
    if !(k_r >= T::zero()) || !k_r.is_finite() {
        return Err(Error::domain("mg_from_rice", format!("K-factor {} must be non-negative", k_r)));
    }
    if n_terms == 0 {
        return Err(Error::domain("mg_from_rice", "at least one term is required"));
    }
    if n_terms > MAX_RICE_TERMS {
        return Err(Error::domain(
            "mg_from_rice",
            format!(
                "{n_terms} terms requested; factorial growth limits the expansion to {MAX_RICE_TERMS}, \
                 and 20 terms already resolve K-factors up to about 10 dB"
            ),
        ));
    }
    let c = T::one() + k_r;
    let lc = c.ln();
    // ln δ_n = (n−1) ln K + n ln(1+K) − K − 2 ln Γ(n)
    let mut ln_delta = Vec::with_capacity(n_terms);
    for n in 1..=n_terms {
        let nf: T = from_usize(n);
        let lk = if n == 1 {
            T::zero()
        } else if k_r == T::zero() {
            T::neg_infinity()
        } else {
            (nf - T::one()) * k_r.ln()
        };
        ln_delta.push(lk + nf * lc - k_r - lit::<T>(2.0) * ln_gamma(nf)?);
    }
    // Σ δ_n c^{−n} Γ(n), accumulated relative to its largest term
    let ln_w: Vec<T> = ln_delta
        .iter()
        .enumerate()
        .map(|(i, &ld)| {
            let nf: T = from_usize(i + 1);
            Ok(ld - nf * lc + ln_gamma(nf)?)
        })
        .collect::<Result<_>>()?;
    let peak = ln_w.iter().copied().fold(T::neg_infinity(), T::max);
    let ln_norm = peak + ln_w.iter().fold(T::zero(), |s, &v| s + (v - peak).exp()).ln();
    let terms = ln_delta
        .iter()
        .enumerate()
        .filter(|(_, ld)| ld.is_finite())
        .map(|(i, &ld)| MgTerm {
            a: (ld - ln_norm).exp(),
            b: from_usize(i + 1),
        })
        .filter(|t| t.a > T::zero())
        .collect();
    MixtureGamma::new(terms, c, format!("rice(K={}, N={})", k_r, n_terms))
}

/// Nakagami-m envelope with unit power.
pub fn mg_from_nakagami<T: Real>(m: T) -> Result<MixtureGamma<T>> {
    if !(m >= lit(0.5)) || !m.is_finite() {
        return Err(Error::domain("mg_from_nakagami", format!("m = {} must be at least 0.5", m)));
    }
    let a = (m * m.ln() - ln_gamma(m)?).exp();
    MixtureGamma::new(vec![MgTerm { a, b: m }], m, format!("nakagami(m={})", m))
}

/// Envelope PDF.
pub fn mg_pdf<T: Real>(mg: &MixtureGamma<T>, x: T) -> T {
    if x < T::zero() {
        return T::zero();
    }
    let two: T = lit(2.0);
    if x == T::zero() {
        return mg.terms.iter().fold(T::zero(), |s, t| {
            let e = two * t.b - T::one();
            s + if e > T::zero() {
                T::zero()
            } else if e == T::zero() {
                two * t.a
            } else {
                T::infinity()
            }
        });
    }
    let lx = x.ln();
    let cx2 = mg.c * x * x;
    mg.terms.iter().fold(T::zero(), |s, t| {
        s + two * (t.a.ln() + (two * t.b - T::one()) * lx - cx2).exp()
    })
}

/// Envelope CDF `Σ a_n c^{−b_n} γ(b_n, c x²)`.
pub fn mg_cdf<T: Real>(mg: &MixtureGamma<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let w = mg.weights()?;
    let cx2 = mg.c * x * x;
    let mut sum = T::zero();
    for (t, wn) in mg.terms.iter().zip(w) {
        sum = sum + wn * regularized_lower_gamma(t.b, cx2)?;
    }
    Ok(sum.min(T::one()))
}

/// `E[X^l] = Σ a_n c^{−(b_n + l/2)} Γ(b_n + l/2)`.
pub fn mg_moment<T: Real>(mg: &MixtureGamma<T>, l: T) -> Result<T> {
    if !(l >= T::zero()) {
        return Err(Error::domain("mg_moment", format!("order {} must be non-negative", l)));
    }
    let lc = mg.c.ln();
    let half: T = lit(0.5);
    let mut sum = T::zero();
    for t in &mg.terms {
        let s = t.b + half * l;
        sum = sum + (t.a.ln() - s * lc + ln_gamma(s)?).exp();
    }
    Ok(sum)
}
