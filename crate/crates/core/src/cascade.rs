//! Cascaded RIS magnitude `A = Σ_{i=1}^{M} |h_{A,i}| |h_{R,i}|` and its
//! generalized-K approximation matched on the second, fourth and sixth
//! moments.

use serde::{Deserialize, Serialize};

use crate::channel::{mg_moment, MixtureGamma};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};
use crate::specfun::{ln_bessel_k, ln_gamma, meijer_g_scaled, MeijerGSpec};

/// Generalized-K law with PDF `4Ξ^{k+m}/(Γ(k)Γ(m)) x^{k+m−1} K_{k−m}(2Ξx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeFit<T> {
    pub k: T,
    pub m: T,
    pub xi: T,
    /// Second moment of the fitted magnitude.
    pub omega: T,
    /// Number of reflecting elements.
    #[serde(rename = "M")]
    pub elements: usize,
}

impl<T: Real> CascadeFit<T> {
    /// Fit from the per-hop envelopes of `elements` identical elements.
    pub fn from_links(
        mg_a: &MixtureGamma<T>,
        mg_r: &MixtureGamma<T>,
        elements: usize,
    ) -> Result<Self> {
        let mu = cascade_moments(mg_a, mg_r, elements, 6)?;
        fit_cascade(mu[2], mu[4], mu[6], elements)
    }

    /// `ln Γ(k) + ln Γ(m)`.
    pub fn ln_norm(&self) -> Result<T> {
        Ok(ln_gamma(self.k)? + ln_gamma(self.m)?)
    }

    /// Generalized-K moment `E[A^l] = Γ(k + l/2) Γ(m + l/2) / (Γ(k) Γ(m) Ξ^l)`.
    pub fn moment(&self, l: T) -> Result<T> {
        let h = l * lit(0.5);
        Ok((ln_gamma(self.k + h)? + ln_gamma(self.m + h)? - self.ln_norm()? - l * self.xi.ln())
            .exp())
    }
}

/// `E[(XY)^l]` for independent envelopes.
pub fn product_moment<T: Real>(
    mg_a: &MixtureGamma<T>,
    mg_r: &MixtureGamma<T>,
    l: T,
) -> Result<T> {
    Ok(mg_moment(mg_a, l)? * mg_moment(mg_r, l)?)
}

/// Integer moments `μ(0..=l_max)` of a sum of `elements` i.i.d. products.
pub fn cascade_moments<T: Real>(
    mg_a: &MixtureGamma<T>,
    mg_r: &MixtureGamma<T>,
    elements: usize,
    l_max: usize,
) -> Result<Vec<T>> {
    let chi = (0..=l_max)
        .map(|l| product_moment(mg_a, mg_r, from_usize(l)))
        .collect::<Result<Vec<T>>>()?;
    let per_element = vec![chi; elements];
    sum_moments(&per_element, l_max)
}

/// Integer moments of a sum of independent terms, from each term's moment
/// list, by repeated binomial convolution. Accumulation happens on the log
/// scale, so only moments beyond the range of `T` overflow.
pub fn sum_moments<T: Real>(per_element: &[Vec<T>], l_max: usize) -> Result<Vec<T>> {
    if per_element.is_empty() {
        return Err(Error::InvalidParameter("at least one element is required".into()));
    }
    let ln_binom = |l: usize, i: usize| -> Result<T> {
        Ok(ln_gamma(from_usize::<T>(l + 1))?
            - ln_gamma(from_usize::<T>(i + 1))?
            - ln_gamma(from_usize::<T>(l - i + 1))?)
    };
    let to_ln = |v: &Vec<T>| -> Result<Vec<T>> {
        if v.len() <= l_max {
            return Err(Error::InvalidParameter(format!(
                "element moment list has {} entries, {} needed",
                v.len(),
                l_max + 1
            )));
        }
        v[..=l_max]
            .iter()
            .map(|&x| {
                if x > T::zero() {
                    Ok(x.ln())
                } else {
                    Err(Error::InvalidParameter(format!("moment {} is not positive", x)))
                }
            })
            .collect()
    };
    let mut acc = to_ln(&per_element[0])?;
    for elem in &per_element[1..] {
        let e = to_ln(elem)?;
        let mut next = Vec::with_capacity(l_max + 1);
        for l in 0..=l_max {
            let logs = (0..=l)
                .map(|i| Ok(ln_binom(l, i)? + acc[l - i] + e[i]))
                .collect::<Result<Vec<T>>>()?;
            let peak = logs.iter().copied().fold(T::neg_infinity(), T::max);
            let s = logs.iter().fold(T::zero(), |s, &v| s + (v - peak).exp());
            next.push(peak + s.ln());
        }
        acc = next;
    }
    Ok(acc.into_iter().map(|v| v.exp()).collect())
}

/// Generalized-K parameters matching `(μ2, μ4, μ6)`, ordered `k ≥ m`.
pub fn fit_cascade<T: Real>(mu2: T, mu4: T, mu6: T, elements: usize) -> Result<CascadeFit<T>> {
    let echo = |detail: String| Error::InconsistentMoments {
        detail,
        mu2: to_f64(mu2),
        mu4: to_f64(mu4),
        mu6: to_f64(mu6),
    };
    if !(mu2 > T::zero() && mu4 > T::zero() && mu6 > T::zero()) {
        return Err(echo("moments must be positive".into()));
    }
    if mu4 < mu2 * mu2 || mu6 * mu2 < mu4 * mu4 {
        return Err(echo("moments violate the Cauchy-Schwarz inequalities".into()));
    }
    // The fit is homogeneous: work with μ2 = 1.
    let r4 = mu4 / (mu2 * mu2);
    let r6 = mu6 / (mu2 * mu2 * mu2);
    let two: T = lit(2.0);
    let a = r6 + r4 - two * r4 * r4;
    let b = r6 - lit::<T>(4.0) * r4 * r4 + lit::<T>(3.0) * r4;
    let c = two * r4;
    let mut disc = b * b - lit::<T>(4.0) * a * c;
    if disc < T::zero() {
        // rounding around the double root of double-Rayleigh-like inputs
        if disc > -(b * b) * T::epsilon() * lit(64.0) {
            disc = T::zero();
        } else {
            return Err(echo(format!(
                "negative discriminant {} (a = {}, b = {}, c = {})",
                disc, a, b, c
            )));
        }
    }
    if !(a > T::zero()) {
        return Err(echo(format!("quadratic leading coefficient {} is not positive", a)));
    }
    let sq = disc.sqrt();
    // numerically stable pair of roots
    let q = -(b + b.signum() * sq) / two;
    let (r1, r2) = (q / a, c / q);
    let (k, m) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    if !(m > T::zero()) || !k.is_finite() {
        return Err(echo(format!("non-positive shape parameters ({}, {})", k, m)));
    }
    Ok(CascadeFit {
        k,
        m,
        xi: (k * m / mu2).sqrt(),
        omega: mu2,
        elements,
    })
}

/// PDF of the fitted magnitude.
pub fn pdf_ar<T: Real>(fit: &CascadeFit<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let s = fit.k + fit.m;
    let ln = lit::<T>(4.0).ln() + s * fit.xi.ln() - fit.ln_norm()? + (s - T::one()) * x.ln()
        + ln_bessel_k(fit.k - fit.m, lit::<T>(2.0) * fit.xi * x)?;
    Ok(ln.exp())
}

/// Meijer-G block of the CDF: `G^{2,1}_{1,3}(· | 1; k, m, 0)`.
pub(crate) fn cdf_spec<T: Real>(fit: &CascadeFit<T>) -> MeijerGSpec<T> {
    MeijerGSpec {
        m: 2,
        n: 1,
        a: vec![T::one()],
        b: vec![fit.k, fit.m, T::zero()],
    }
}

/// CDF of the fitted magnitude, `G^{2,1}_{1,3}(Ξ²x² | 1; k, m, 0) / (Γ(k)Γ(m))`.
pub fn cdf_ar<T: Real>(fit: &CascadeFit<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let z = fit.xi * fit.xi * x * x;
    let v = meijer_g_scaled(&cdf_spec(fit), z, fit.ln_norm()?)?;
    Ok(v.max(T::zero()).min(T::one()))
}
