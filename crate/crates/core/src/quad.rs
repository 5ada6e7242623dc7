//! Adaptive Gauss–Kronrod quadrature.
//!
//! The integrator works on fixed-size vectors of reals so that a complex
//! integrand is handled as `[re, im]` and shares abscissae between both parts.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-10,
            rel: 1e-8,
            max_intervals: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance {
            abs,
            rel,
            ..Default::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Estimate<T, const N: usize> {
    pub value: [T; N],
    pub error: T,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Panel<T, const N: usize> {
    a: T,
    b: T,
    value: [T; N],
    error: T,
}

fn max_abs<T: Real, const N: usize>(v: &[T; N]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn kronrod<T: Real, const N: usize, F>(f: &mut F, a: T, b: T) -> Panel<T, N>
where
    F: FnMut(T) -> [T; N],
{
    let center = (a + b) * lit(0.5);
    let half = (b - a) * lit(0.5);
    let mut kron = [T::zero(); N];
    let mut gauss = [T::zero(); N];

    let fc = f(center);
    for i in 0..N {
        kron[i] = fc[i] * lit(WGK[7]);
        gauss[i] = fc[i] * lit(WG[3]);
    }
    for j in 0..7 {
        let dx = half * lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kron[i] = kron[i] + s * lit(WGK[j]);
            if j % 2 == 1 {
                gauss[i] = gauss[i] + s * lit(WG[j / 2]);
            }
        }
    }
    let mut err = T::zero();
    for i in 0..N {
        kron[i] = kron[i] * half;
        gauss[i] = gauss[i] * half;
        err = err.max((kron[i] - gauss[i]).abs());
    }
    Panel {
        a,
        b,
        value: kron,
        error: err,
    }
}

/// Integrates a vector-valued function over `[a, b]`, pre-split at `breaks`.
pub fn integrate_vec<T: Real, const N: usize, F>(
    mut f: F,
    a: T,
    b: T,
    breaks: &[T],
    tolerance: Tolerance,
) -> Result<Estimate<T, N>>
where
    F: FnMut(T) -> [T; N],
{
    let mut cuts = vec![a];
    cuts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    cuts.push(b);
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite break points"));

    let mut panels: Vec<Panel<T, N>> = cuts
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&mut f, w[0], w[1]))
        .collect();
    let mut evaluations = panels.len() * 15;

    let abs_tol: T = lit(tolerance.abs);
    let rel_tol: T = lit(tolerance.rel);
    let floor = T::epsilon() * lit(50.0);
    loop {
        let mut total = [T::zero(); N];
        let mut err = T::zero();
        let mut worst = 0;
        for (idx, p) in panels.iter().enumerate() {
            for i in 0..N {
                total[i] = total[i] + p.value[i];
            }
            err = err + p.error;
            if p.error > panels[worst].error {
                worst = idx;
            }
        }
        let target = abs_tol.max(rel_tol * max_abs(&total));
        if err <= target || err <= floor * max_abs(&total) {
            return Ok(Estimate {
                value: total,
                error: err,
                evaluations,
            });
        }
        if panels.len() >= tolerance.max_intervals {
            return Err(Error::NonConvergence {
                function: "adaptive quadrature",
                detail: format!(
                    "error estimate {:e} above target {:e} after {} panels",
                    crate::scalar::to_f64(err),
                    crate::scalar::to_f64(target),
                    panels.len()
                ),
                abscissa: vec![],
                height: vec![],
            });
        }
        let p = panels.swap_remove(worst);
        let mid = (p.a + p.b) * lit(0.5);
        if !(mid > p.a && mid < p.b) {
            // Interval cannot be split further; accept its estimate.
            let mut frozen = p;
            frozen.error = T::zero();
            panels.push(frozen);
            continue;
        }
        panels.push(kronrod(&mut f, p.a, mid));
        panels.push(kronrod(&mut f, mid, p.b));
        evaluations += 30;
    }
}

/// Integrates a real function over `[a, b]`.
pub fn integrate<T: Real, F>(mut f: F, a: T, b: T, tolerance: Tolerance) -> Result<T>
where
    F: FnMut(T) -> T,
{
    integrate_vec(|x| [f(x)], a, b, &[], tolerance).map(|e| e.value[0])
}

/// Integrates a real function over `[a, ∞)` through `x = a + scale·t/(1−t)`.
///
/// `scale` should sit near the bulk of the integrand so the mapped function is
/// not squeezed against either end of `(0, 1)`.
pub fn integrate_semi_infinite<T: Real, F>(
    mut f: F,
    a: T,
    scale: T,
    tolerance: Tolerance,
) -> Result<T>
where
    F: FnMut(T) -> T,
{
    let one = T::one();
    let breaks: Vec<T> = [0.1, 0.25, 0.5, 0.75, 0.9].iter().map(|&t| lit(t)).collect();
    let g = |t: T| {
        let u = one - t;
        let x = a + scale * t / u;
        let y = f(x) * scale / (u * u);
        [if y.is_finite() { y } else { T::zero() }]
    };
    integrate_vec(g, T::zero(), one, &breaks, tolerance).map(|e| e.value[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x: f64| x.powi(5) - 2.0 * x, 0.0, 2.0, Tolerance::default()).unwrap();
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_tail() {
        let v = integrate_semi_infinite(|x: f64| (-x * x).exp(), 0.0, 1.0, Tolerance::new(1e-14, 1e-12))
            .unwrap();
        assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ x^{-1/2} dx = 2
        let v = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, Tolerance::new(1e-10, 1e-10)).unwrap();
        assert!((v - 2.0).abs() < 1e-8);
    }

    #[test]
    fn complex_pair_shares_nodes() {
        let e = integrate_vec(
            |t: f64| [t.cos(), t.sin()],
            0.0,
            std::f64::consts::PI,
            &[],
            Tolerance::new(1e-14, 1e-14),
        )
        .unwrap();
        assert!(e.value[0].abs() < 1e-13);
        assert!((e.value[1] - 2.0).abs() < 1e-13);
    }

    #[test]
    fn works_in_single_precision() {
        let v = integrate(|x: f32| x.exp(), 0.0, 1.0, Tolerance::new(1e-6, 1e-6)).unwrap();
        assert!((v - (std::f32::consts::E - 1.0)).abs() < 1e-5);
    }
}
