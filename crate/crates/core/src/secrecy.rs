//! SNR statistics of the legitimate and eavesdropper links and the secrecy
//! metrics built on them, each with a closed form and a quadrature twin.
//!
//! `γ_B = ρ_B A²` with `A` the fitted cascade magnitude and `γ_E = ρ_E |h_E|²`
//! with `|h_E|` a mixture-Gamma envelope.

use serde::{Deserialize, Serialize};

use crate::cascade::{cdf_ar, pdf_ar, CascadeFit};
use crate::channel::MixtureGamma;
use crate::error::{Error, Result};
use crate::quad::{integrate_semi_infinite, Tolerance};
use crate::scalar::{lit, to_f64, Real};
use crate::specfun::{
    bivariate_meijer_g_scaled, ln_bessel_k, meijer_g_scaled, regularized_lower_gamma,
    regularized_upper_gamma, BivariateGSpec, MeijerGSpec,
};

/// Average received SNRs `ρ_B = P_B/σ_B²` and `ρ_E = P_E/σ_E²` (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget<T> {
    pub rho_b: T,
    pub rho_e: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn new(rho_b: T, rho_e: T) -> Result<Self> {
        for (name, v) in [("rho_b", rho_b), ("rho_e", rho_e)] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self { rho_b, rho_e })
    }

    pub fn from_db(rho_b_db: T, rho_e_db: T) -> Result<Self> {
        Self::new(db_to_linear(rho_b_db), db_to_linear(rho_e_db))
    }
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

/// Which set of formulas to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Formulas consistent with the underlying distributions.
    #[default]
    Corrected,
    /// Formulas exactly as printed in the source derivation: the eavesdropper
    /// rate `c_E` is dropped, the legitimate PDF carries a halved argument, the
    /// eavesdropper capacity uses the printed `G^{1,4}_{4,3}` form, and the
    /// full-CSI rate subtracts the second printed integral directly.
    PaperLiteral,
}

/// Closed form or numerical integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Path {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecrecyConfig<T> {
    pub fit: CascadeFit<T>,
    pub mg_e: MixtureGamma<T>,
    pub budget: LinkBudget<T>,
    #[serde(default)]
    pub variant: Variant,
}

impl<T: Real> SecrecyConfig<T> {
    pub fn new(fit: CascadeFit<T>, mg_e: MixtureGamma<T>, budget: LinkBudget<T>) -> Result<Self> {
        mg_e.validate()?;
        Ok(Self {
            fit,
            mg_e,
            budget,
            variant: Variant::Corrected,
        })
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    fn literal(&self) -> bool {
        self.variant == Variant::PaperLiteral
    }

    /// Rate applied to `x/ρ_E` in the eavesdropper SNR law.
    fn rate_e(&self) -> T {
        if self.literal() {
            T::one()
        } else {
            self.mg_e.c
        }
    }

    /// `Ξ²/ρ_B`, the natural scale of `γ_B`.
    fn z_b(&self) -> T {
        self.fit.xi * self.fit.xi / self.budget.rho_b
    }
}

fn quad_tol() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-10,
        max_intervals: 4000,
    }
}

/// Integrates `f` over `[0, ∞)` and surfaces the first error `f` reports.
fn integrate_checked<T: Real, F>(mut f: F, scale: T) -> Result<T>
where
    F: FnMut(T) -> Result<T>,
{
    let mut err = None;
    let v = integrate_semi_infinite(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        },
        T::zero(),
        scale,
        quad_tol(),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

fn log2_1p<T: Real>(x: T) -> T {
    x.ln_1p() / T::LN_2()
}

/// `F_{γB}(x) = F_A(√(x/ρ_B))`.
pub fn gamma_b_cdf<T: Real>(cfg: &SecrecyConfig<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    cdf_ar(&cfg.fit, (x / cfg.budget.rho_b).sqrt())
}

/// `f_{γB}(x) = (2/(Γ(k)Γ(m))) z^{(k+m)/2} x^{(k+m)/2−1} K_{k−m}(2√(z x))`
/// with `z = Ξ²/ρ_B` (`z/2` inside the Bessel function for the literal variant).
pub fn gamma_b_pdf<T: Real>(cfg: &SecrecyConfig<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let f = &cfg.fit;
    let s0 = (f.k + f.m) * lit(0.5);
    let z = cfg.z_b();
    let zk = if cfg.literal() { z * lit(0.5) } else { z };
    let two: T = lit(2.0);
    let ln = two.ln() - f.ln_norm()? + s0 * z.ln() + (s0 - T::one()) * x.ln()
        + ln_bessel_k(f.k - f.m, two * (zk * x).sqrt())?;
    Ok(ln.exp())
}

/// `F_{γE}(x) = Σ a_n c_E^{−b_n} γ(b_n, c_E x/ρ_E)`.
pub fn gamma_e_cdf<T: Real>(cfg: &SecrecyConfig<T>, x: T) -> Result<T> {
    if x <= T::zero() {
        return Ok(T::zero());
    }
    let u = cfg.rate_e() * x / cfg.budget.rho_e;
    let mut s = T::zero();
    for (t, w) in cfg.mg_e.terms.iter().zip(cfg.mg_e.weights()?) {
        s = s + w * regularized_lower_gamma(t.b, u)?;
    }
    Ok(s)
}

/// `1 − F_{γE}(x)` without cancellation in the upper tail.
fn gamma_e_ccdf<T: Real>(cfg: &SecrecyConfig<T>, x: T) -> Result<T> {
    let u = cfg.rate_e() * x.max(T::zero()) / cfg.budget.rho_e;
    let mut s = T::zero();
    for (t, w) in cfg.mg_e.terms.iter().zip(cfg.mg_e.weights()?) {
        s = s + w * regularized_upper_gamma(t.b, u)?;
    }
    Ok(s)
}

/// `f_{γE}(x) = Σ a_n ρ_E^{−b_n} x^{b_n−1} e^{−c_E x/ρ_E}`.
pub fn gamma_e_pdf<T: Real>(cfg: &SecrecyConfig<T>, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    let rho = cfg.budget.rho_e;
    // the literal form keeps c_E in the power but not in the exponent
    let base = if cfg.literal() { rho * cfg.mg_e.c } else { rho };
    let u = cfg.rate_e() * x / rho;
    let (lb, lx) = (base.ln(), x.ln());
    cfg.mg_e.terms.iter().fold(T::zero(), |s, t| {
        s + (t.a.ln() - t.b * lb + (t.b - T::one()) * lx - u).exp()
    })
}

/// Mean of `γ_B`, used to place quadrature nodes.
fn scale_b<T: Real>(cfg: &SecrecyConfig<T>) -> T {
    cfg.budget.rho_b * cfg.fit.omega
}

fn scale_e<T: Real>(cfg: &SecrecyConfig<T>) -> T {
    cfg.budget.rho_e / cfg.rate_e() * cfg.mg_e.terms.iter().map(|t| t.b).fold(T::zero(), T::max)
}

fn check_probability<T: Real>(p: T, function: &'static str) -> Result<T> {
    let tol: T = lit(1e-6);
    if p < -tol || p > T::one() + tol || !p.is_finite() {
        return Err(Error::Consistency {
            function,
            detail: format!("probability {} lies outside [0, 1]", p),
        });
    }
    Ok(p.max(T::zero()).min(T::one()))
}

/// Probability of zero secrecy capacity `P_l = Pr(γ_E ≥ γ_B)`, which is also
/// the information-leakage probability without eavesdropper CSI.
pub fn prob_zero_secrecy<T: Real>(cfg: &SecrecyConfig<T>, path: Path) -> Result<T> {
    let p = match path {
        Path::ClosedForm => {
            let f = &cfg.fit;
            let arg = cfg.z_b() * cfg.budget.rho_e / cfg.rate_e();
            let ln_norm = f.ln_norm()?;
            let lc = cfg.mg_e.c.ln();
            let mut s = T::zero();
            for t in &cfg.mg_e.terms {
                let spec = MeijerGSpec {
                    m: 2,
                    n: 2,
                    a: vec![T::one(), T::one() - t.b],
                    b: vec![f.k, f.m, T::zero()],
                };
                s = s + meijer_g_scaled(&spec, arg, ln_norm - t.a.ln() + t.b * lc)?;
            }
            s
        }
        Path::Quadrature if cfg.literal() => integrate_checked(
            |x| Ok(gamma_b_cdf(cfg, x)? * gamma_e_pdf(cfg, x)),
            scale_e(cfg),
        )?,
        // Pr(γ_B ≤ γ_E) = ∫ f_{γB}(x) Pr(γ_E ≥ x) dx needs no Meijer-G.
        Path::Quadrature => integrate_checked(
            |x| Ok(gamma_b_pdf(cfg, x)? * gamma_e_ccdf(cfg, x)?),
            scale_b(cfg).min(scale_e(cfg)),
        )?,
    };
    if cfg.literal() {
        return Ok(p);
    }
    check_probability(p, "prob_zero_secrecy")
}

/// Ergodic capacity `E[log₂(1 + γ_B)]` of the legitimate link.
pub fn ergodic_capacity_b<T: Real>(cfg: &SecrecyConfig<T>, path: Path) -> Result<T> {
    let f = &cfg.fit;
    match path {
        Path::ClosedForm => {
            let spec = MeijerGSpec {
                m: 4,
                n: 1,
                a: vec![T::zero(), T::one()],
                b: vec![f.k, f.m, T::zero(), T::zero()],
            };
            Ok(meijer_g_scaled(&spec, cfg.z_b(), f.ln_norm()?)? / T::LN_2())
        }
        Path::Quadrature => {
            let rho = cfg.budget.rho_b;
            integrate_checked(
                |a| Ok(log2_1p(rho * a * a) * pdf_ar(f, a)?),
                f.omega.sqrt(),
            )
        }
    }
}

/// Ergodic capacity `E[log₂(1 + γ_E)]` of the eavesdropper link.
pub fn ergodic_capacity_e<T: Real>(cfg: &SecrecyConfig<T>, path: Path) -> Result<T> {
    match path {
        Path::ClosedForm => {
            let c = cfg.mg_e.c;
            let arg = cfg.budget.rho_e / c;
            let lc = c.ln();
            let mut s = T::zero();
            for t in &cfg.mg_e.terms {
                let spec = if cfg.literal() {
                    MeijerGSpec {
                        m: 1,
                        n: 4,
                        a: vec![T::zero(), T::zero(), T::one() - t.b, -t.b],
                        b: vec![T::zero(), -t.b, -T::one()],
                    }
                } else {
                    // ∫ u^{b−1} e^{−u} ln(1 + ρu/c) du
                    MeijerGSpec {
                        m: 1,
                        n: 3,
                        a: vec![T::one(), T::one(), T::one() - t.b],
                        b: vec![T::one(), T::zero()],
                    }
                };
                s = s + meijer_g_scaled(&spec, arg, t.b * lc - t.a.ln())?;
            }
            Ok(s / T::LN_2())
        }
        Path::Quadrature => {
            integrate_checked(|x| Ok(log2_1p(x) * gamma_e_pdf(cfg, x)), scale_e(cfg))
        }
    }
}

/// Average secrecy rate without eavesdropper CSI, `E[C_B] − E[C_E]`.
pub fn avg_secrecy_rate_partial<T: Real>(cfg: &SecrecyConfig<T>, path: Path) -> Result<T> {
    Ok(ergodic_capacity_b(cfg, path)? - ergodic_capacity_e(cfg, path)?)
}

/// `∫ log₂(1+x) f_{γB}(x) F_{γE}(x) dx` as a bivariate Meijer-G.
fn full_first_term<T: Real>(cfg: &SecrecyConfig<T>) -> Result<T> {
    let f = &cfg.fit;
    let s0 = (f.k + f.m) * lit(0.5);
    let rho_e = cfg.budget.rho_e;
    let rate = cfg.rate_e();
    let x = rho_e / rate;
    let mut y = cfg.z_b() * rho_e / rate;
    // the literal form halves the second argument but keeps the prefactor
    let mut ln_extra = T::zero();
    if cfg.literal() {
        y = y * lit(0.5);
        ln_extra = s0 * lit::<T>(2.0).ln();
    }
    let lc = cfg.mg_e.c.ln();
    let mut s = T::zero();
    for t in &cfg.mg_e.terms {
        // y^{s0} G(x, y) absorbed by shifting the y-dependent blocks
        let spec = BivariateGSpec {
            outer: MeijerGSpec {
                m: 1,
                n: 1,
                a: vec![T::one() - t.b, T::one()],
                b: vec![T::zero()],
            },
            first: log_block(),
            second: MeijerGSpec {
                m: 2,
                n: 0,
                a: vec![],
                b: vec![f.k, f.m],
            },
        };
        let ln_scale = f.ln_norm()? - t.a.ln() + t.b * lc - ln_extra;
        s = s + bivariate_meijer_g_scaled(&spec, x, y, ln_scale)?;
    }
    Ok(s / T::LN_2())
}

/// `∫ log₂(1+x) f_{γE}(x) F_{γB}(x) dx` as a bivariate Meijer-G.
fn full_second_term<T: Real>(cfg: &SecrecyConfig<T>) -> Result<T> {
    let f = &cfg.fit;
    let rho_e = cfg.budget.rho_e;
    let rate = cfg.rate_e();
    let x = rho_e / rate;
    let y = cfg.z_b() * rho_e / rate;
    let c = cfg.mg_e.c;
    let mut s = T::zero();
    for t in &cfg.mg_e.terms {
        let spec = BivariateGSpec {
            outer: MeijerGSpec {
                m: 0,
                n: 1,
                a: vec![T::one() - t.b],
                b: vec![],
            },
            first: log_block(),
            second: MeijerGSpec {
                m: 2,
                n: 1,
                a: vec![T::one()],
                b: vec![f.k, f.m, T::zero()],
            },
        };
        // printed prefactor (ρ_E c_E)^{−b}; the consistent one is c_E^{−b}
        let ln_pref = if cfg.literal() {
            -t.b * (rho_e * c).ln()
        } else {
            -t.b * c.ln()
        };
        s = s + bivariate_meijer_g_scaled(&spec, x, y, f.ln_norm()? - t.a.ln() - ln_pref)?;
    }
    Ok(s / T::LN_2())
}

/// `ln(1 + x) = G^{1,2}_{2,2}(x | 1, 1; 1, 0)`.
fn log_block<T: Real>() -> MeijerGSpec<T> {
    MeijerGSpec {
        m: 1,
        n: 2,
        a: vec![T::one(), T::one()],
        b: vec![T::one(), T::zero()],
    }
}

/// Average secrecy rate with full CSI, `E[max(C_B − C_E, 0)]`.
///
/// Splitting over the event `γ_B > γ_E` gives
/// `∫ log₂(1+x) f_{γB} F_{γE} dx − ∫ log₂(1+x) f_{γE} (1 − F_{γB}) dx`.
/// The literal variant subtracts `∫ log₂(1+x) f_{γE} F_{γB} dx` instead.
pub fn avg_secrecy_rate_full<T: Real>(cfg: &SecrecyConfig<T>, path: Path) -> Result<T> {
    let v = match path {
        Path::ClosedForm => {
            let i1 = full_first_term(cfg)?;
            let i2 = full_second_term(cfg)?;
            if cfg.literal() {
                i1 - i2
            } else {
                i1 + i2 - ergodic_capacity_e(cfg, Path::ClosedForm)?
            }
        }
        Path::Quadrature => {
            let i1 = integrate_checked(
                |x| Ok(log2_1p(x) * gamma_b_pdf(cfg, x)? * gamma_e_cdf(cfg, x)?),
                scale_b(cfg),
            )?;
            let i2 = integrate_checked(
                |x| {
                    let fb = gamma_b_cdf(cfg, x)?;
                    let w = if cfg.literal() { fb } else { T::one() - fb };
                    Ok(log2_1p(x) * gamma_e_pdf(cfg, x) * w)
                },
                scale_e(cfg),
            )?;
            i1 - i2
        }
    };
    if !cfg.literal() && v < lit(-1e-6) {
        return Err(Error::Consistency {
            function: "avg_secrecy_rate_full",
            detail: format!("negative average of a non-negative rate: {}", to_f64(v)),
        });
    }
    Ok(if cfg.literal() { v } else { v.max(T::zero()) })
}
