//! Log-gamma on the real line and the complex plane.
//!
//! Both variants shift the argument upward until Stirling's series converges
//! to machine precision and then undo the shift with the recurrence. Arguments
//! left of `Re z = 1/2` go through the reflection formula.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// `B_{2k} / (2k (2k − 1))` for k = 1..8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

const SHIFT_RADIUS: f64 = 15.0;

/// Taylor coefficients of `1/Γ(1 + x)` about zero.
pub(super) const RGAMMA_TAYLOR: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -1.250_493_482_142_670_657e-6,
    1.133_027_231_981_695_882e-6,
    -2.056_338_416_977_607_104e-7,
    6.116_095_104_481_415_818e-9,
    5.002_007_644_469_222_930e-9,
    -1.181_274_570_487_020_145e-9,
    1.043_426_711_691_100_511e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783e-14,
    -5.348_122_539_423_017_982e-15,
    1.226_778_628_238_260_790e-15,
    -1.181_259_301_697_458_770e-16,
    1.186_692_254_751_600_333e-18,
    1.412_380_655_318_031_782e-18,
    -2.298_745_684_435_370_207e-19,
    1.714_406_321_927_337_433e-20,
];


fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}

/// `sin(πx)` with the argument reduced before multiplying by π, so it is exact
/// at integers and accurate near them.
pub fn sin_pi<T: Real>(x: T) -> T {
    let two: T = lit(2.0);
    let half: T = lit(0.5);
    let mut r = x - two * (x / two).round();
    if r > half {
        r = T::one() - r;
    } else if r < -half {
        r = -T::one() - r;
    }
    (T::PI() * r).sin()
}

fn stirling_real<T: Real>(x: T) -> T {
    let half: T = lit(0.5);
    let inv = x.recip();
    let inv2 = inv * inv;
    let mut series = T::zero();
    let mut pow = inv;
    for c in STIRLING {
        series = series + pow * lit(c);
        pow = pow * inv2;
    }
    (x - half) * x.ln() - x + (T::TAU()).ln() * half + series
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)` for real `x`.
pub fn ln_gamma_signed<T: Real>(x: T) -> Result<(T, T)> {
    if x.is_nan() {
        return Err(Error::domain("ln_gamma", "NaN argument"));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole {
            function: "ln_gamma",
            value: crate::scalar::to_f64(x),
        });
    }
    if x < lit(0.5) {
        // Γ(x) Γ(1 − x) = π / sin(πx)
        let s = sin_pi(x);
        let (lg, _) = ln_gamma_signed(T::one() - x)?;
        let sign = if s < T::zero() { -T::one() } else { T::one() };
        return Ok((T::PI().ln() - s.abs().ln() - lg, sign));
    }
    let radius: T = lit(SHIFT_RADIUS);
    if x < radius {
        // Γ(x) = (x − 1)⋯(x − n) Γ(1 + μ) with |μ| ≤ 1/2
        let n = x.round() - T::one();
        let mu = x - n - T::one();
        let mut prod = T::one();
        let mut z = x;
        for _ in 0..crate::scalar::to_f64(n) as usize {
            z = z - T::one();
            prod = prod * z;
        }
        return Ok(((prod / rgamma_one_plus(mu)).ln(), T::one()));
    }
    Ok((stirling_real(x), T::one()))
}

/// `1/Γ(1 + μ)` from its Taylor series, for |μ| ≤ 1/2.
pub(super) fn rgamma_one_plus<T: Real>(mu: T) -> T {
    RGAMMA_TAYLOR
        .iter()
        .rev()
        .fold(T::zero(), |acc, &c| acc * mu + lit(c))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain(
            "ln_gamma",
            format!("real log-gamma needs x > 0, got {x}"),
        ));
    }
    ln_gamma_signed(x).map(|(v, _)| v)
}

/// `Γ(x)` for any real `x` that is not a pole.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    let (lg, sign) = ln_gamma_signed(x)?;
    Ok(sign * lg.exp())
}

/// `1/Γ(x)`, which is entire: zero at the poles of `Γ`.
pub fn rgamma<T: Real>(x: T) -> T {
    if is_nonpositive_integer(x) {
        return T::zero();
    }
    match ln_gamma_signed(x) {
        Ok((lg, sign)) => sign * (-lg).exp(),
        Err(_) => T::zero(),
    }
}

fn stirling_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let half: T = lit(0.5);
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex::new(T::zero(), T::zero());
    let mut pow = inv;
    for c in STIRLING {
        series = series + pow * lit::<T>(c);
        pow = pow * inv2;
    }
    (z - half) * z.ln() - z + Complex::from(T::TAU().ln() * half) + series
}

/// `ln sin(πz)` for `Im z ≥ 0`, continuous in the closed upper half plane.
fn ln_sin_pi_upper<T: Real>(z: Complex<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let pi = T::PI();
    let w = (i * z * (pi + pi)).exp();
    -i * z * pi + (Complex::from(T::one()) - w).ln() - Complex::from(lit::<T>(2.0).ln())
        + i * (pi * lit(0.5))
}

/// Principal branch of `ln Γ(z)`: analytic on the plane cut along the
/// non-positive real axis and real on the positive real axis.
pub fn ln_gamma_complex<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.re.is_nan() || z.im.is_nan() {
        return Err(Error::domain("ln_gamma_complex", "NaN argument"));
    }
    if z.im == T::zero() && is_nonpositive_integer(z.re) {
        return Err(Error::Pole {
            function: "ln_gamma_complex",
            value: crate::scalar::to_f64(z.re),
        });
    }
    if z.im < T::zero() {
        return ln_gamma_complex(z.conj()).map(|v| v.conj());
    }
    if z.re < lit(0.5) {
        let one = Complex::from(T::one());
        let reflected = ln_gamma_complex(one - z)?;
        return Ok(Complex::from(T::PI().ln()) - ln_sin_pi_upper(z) - reflected);
    }
    let radius: T = lit(SHIFT_RADIUS);
    let mut w = z;
    let mut logs = Complex::new(T::zero(), T::zero());
    while w.norm() < radius {
        logs = logs + w.ln();
        w = w + T::one();
    }
    Ok(stirling_complex(w) - logs)
}
