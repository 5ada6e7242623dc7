//! Monte Carlo oracle for the cascade and the secrecy metrics.
//!
//! Samples are drawn in fixed-size chunks. Chunk `i` uses the ChaCha8 stream
//! `i` of a generator seeded with `seed`, and chunk statistics are merged in
//! chunk order, so estimates depend only on `(seed, n_samples)` and never on
//! the number of worker threads.

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Gamma;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::MixtureGamma;
use crate::error::{Error, Result};
use crate::secrecy::LinkBudget;

/// Samples per chunk; part of the reproducibility contract.
pub const CHUNK: u64 = 1 << 16;

/// Smallest sample count accepted by [`estimate_metrics`].
pub const MIN_SAMPLES: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    /// Sample standard deviation over `√n_samples`.
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Draws from a mixture-Gamma envelope: pick component `n` with probability
/// `a_n c^{−b_n} Γ(b_n)`, then return `√G` with `G ~ Gamma(b_n, rate c)`.
#[derive(Debug, Clone)]
pub struct MgSampler {
    cumulative: Vec<f64>,
    components: Vec<Gamma<f64>>,
}

impl MgSampler {
    pub fn new(mg: &MixtureGamma<f64>) -> Result<Self> {
        let w = mg.weights()?;
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cumulative = w
            .iter()
            .map(|x| {
                acc += x / total;
                acc
            })
            .collect();
        let components = mg
            .terms
            .iter()
            .map(|t| {
                Gamma::new(t.b, 1.0 / mg.c)
                    .map_err(|e| Error::InvalidParameter(format!("gamma component: {e}")))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            cumulative,
            components,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self
            .cumulative
            .partition_point(|&c| c < u)
            .min(self.components.len() - 1);
        self.components[i].sample(rng).sqrt()
    }
}

/// One envelope draw.
pub fn sample_mg_envelope<R: Rng + ?Sized>(mg: &MixtureGamma<f64>, rng: &mut R) -> Result<f64> {
    Ok(MgSampler::new(mg)?.sample(rng))
}

/// `Σ_{i=1}^{M} X_i Y_i` with independent envelope draws.
pub fn sample_cascade<R: Rng + ?Sized>(
    hop_a: &MgSampler,
    hop_r: &MgSampler,
    elements: usize,
    rng: &mut R,
) -> Result<f64> {
    if elements == 0 {
        return Err(Error::InvalidParameter(
            "the surface needs at least one element".into(),
        ));
    }
    Ok((0..elements)
        .map(|_| hop_a.sample(rng) * hop_r.sample(rng))
        .sum())
}

/// Running mean and sum of squared deviations, merged exactly across chunks.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, o: &Moments) {
        if o.n == 0 {
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * self.n as f64 * o.n as f64 / n as f64;
        self.n = n;
    }

    fn estimate(&self, seed: u64) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            value: self.mean,
            std_error: (var / self.n as f64).sqrt(),
            n_samples: self.n,
            seed,
        }
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Runs `body` over all chunks on `workers` threads (0 = rayon default) and
/// folds the per-chunk results in chunk order.
fn run_chunks<S, F>(n_samples: u64, workers: usize, body: F) -> Result<Vec<S>>
where
    S: Send,
    F: Fn(u64, u64) -> Result<S> + Sync + Send,
{
    let chunks = n_samples.div_ceil(CHUNK);
    let job = || {
        (0..chunks)
            .into_par_iter()
            .map(|i| {
                let len = CHUNK.min(n_samples - i * CHUNK);
                body(i, len)
            })
            .collect::<Result<Vec<S>>>()
    };
    if workers == 0 {
        job()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(job)
    }
}

/// Inputs of a secrecy simulation: both hops of every element, the element
/// count, the eavesdropper envelope and the link budget.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub hop_a: MixtureGamma<f64>,
    pub hop_r: MixtureGamma<f64>,
    pub elements: usize,
    pub eve: MixtureGamma<f64>,
    pub budget: LinkBudget<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McMetrics {
    pub p_leak: McEstimate,
    pub c_s_full: McEstimate,
    pub r_s_partial: McEstimate,
    pub capacity_b: McEstimate,
    pub capacity_e: McEstimate,
}

/// Estimates every secrecy metric from `n_samples` joint draws of
/// `γ_B = ρ_B A²` and `γ_E = ρ_E |h_E|²`.
pub fn estimate_metrics(
    scenario: &Scenario,
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<McMetrics> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} samples are required, got {n_samples}"
        )));
    }
    if scenario.elements == 0 {
        return Err(Error::InvalidParameter(
            "the surface needs at least one element".into(),
        ));
    }
    let sa = MgSampler::new(&scenario.hop_a)?;
    let sr = MgSampler::new(&scenario.hop_r)?;
    let se = MgSampler::new(&scenario.eve)?;
    let LinkBudget { rho_b, rho_e } = scenario.budget;
    let parts = run_chunks(n_samples, workers, |chunk, len| {
        let mut rng = chunk_rng(seed, chunk);
        let mut m = [Moments::default(); 5];
        for _ in 0..len {
            let a = sample_cascade(&sa, &sr, scenario.elements, &mut rng)?;
            let h = se.sample(&mut rng);
            let gb = rho_b * a * a;
            let ge = rho_e * h * h;
            let cb = gb.ln_1p() / std::f64::consts::LN_2;
            let ce = ge.ln_1p() / std::f64::consts::LN_2;
            m[0].push(if gb <= ge { 1.0 } else { 0.0 });
            m[1].push((cb - ce).max(0.0));
            m[2].push(cb - ce);
            m[3].push(cb);
            m[4].push(ce);
        }
        Ok(m)
    })?;
    let mut total = [Moments::default(); 5];
    for p in &parts {
        for (t, x) in total.iter_mut().zip(p) {
            t.merge(x);
        }
    }
    Ok(McMetrics {
        p_leak: total[0].estimate(seed),
        c_s_full: total[1].estimate(seed),
        r_s_partial: total[2].estimate(seed),
        capacity_b: total[3].estimate(seed),
        capacity_e: total[4].estimate(seed),
    })
}

/// Estimates `E[A^l]` of the exact cascade for each requested order.
pub fn estimate_cascade_moments(
    hop_a: &MixtureGamma<f64>,
    hop_r: &MixtureGamma<f64>,
    elements: usize,
    orders: &[i32],
    n_samples: u64,
    seed: u64,
    workers: usize,
) -> Result<Vec<McEstimate>> {
    let sa = MgSampler::new(hop_a)?;
    let sr = MgSampler::new(hop_r)?;
    let parts = run_chunks(n_samples, workers, |chunk, len| {
        let mut rng = chunk_rng(seed, chunk);
        let mut m = vec![Moments::default(); orders.len()];
        for _ in 0..len {
            let a = sample_cascade(&sa, &sr, elements, &mut rng)?;
            for (mi, &l) in m.iter_mut().zip(orders) {
                mi.push(a.powi(l));
            }
        }
        Ok(m)
    })?;
    let mut total = vec![Moments::default(); orders.len()];
    for p in &parts {
        for (t, x) in total.iter_mut().zip(p) {
            t.merge(x);
        }
    }
    Ok(total.iter().map(|m| m.estimate(seed)).collect())
}

/// Draws `n` values of `ρ_B A²` and `ρ_E |h_E|²` (for empirical CDF checks).
pub fn sample_snrs(scenario: &Scenario, n: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let sa = MgSampler::new(&scenario.hop_a)?;
    let sr = MgSampler::new(&scenario.hop_r)?;
    let se = MgSampler::new(&scenario.eve)?;
    let mut rng = chunk_rng(seed, 0);
    let mut b = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n);
    for _ in 0..n {
        let a = sample_cascade(&sa, &sr, scenario.elements, &mut rng)?;
        let h = se.sample(&mut rng);
        b.push(scenario.budget.rho_b * a * a);
        e.push(scenario.budget.rho_e * h * h);
    }
    Ok((b, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{mg_cdf, mg_from_nakagami};

    #[test]
    fn rayleigh_power() {
        let mg = mg_from_nakagami(1.0).unwrap();
        let s = MgSampler::new(&mg).unwrap();
        let mut rng = chunk_rng(7, 0);
        let mut m = Moments::default();
        for _ in 0..200_000 {
            let x = s.sample(&mut rng);
            m.push(x * x);
        }
        let e = m.estimate(7);
        assert!((e.value - 1.0).abs() < 3.0 * e.std_error + 1e-12);
    }

    #[test]
    fn nakagami_ks() {
        let mg = mg_from_nakagami(3.0).unwrap();
        let s = MgSampler::new(&mg).unwrap();
        let mut rng = chunk_rng(11, 0);
        let n = 20_000;
        let mut xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = mg_cdf(&mg, x).unwrap();
                (f - i as f64 / n as f64).abs().max((f - (i + 1) as f64 / n as f64).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS distance {d}");
    }

    #[test]
    fn same_stream_same_samples() {
        let mg = mg_from_nakagami(2.0).unwrap();
        let s = MgSampler::new(&mg).unwrap();
        let a: Vec<f64> = {
            let mut r = chunk_rng(3, 5);
            (0..10).map(|_| s.sample(&mut r)).collect()
        };
        let b: Vec<f64> = {
            let mut r = chunk_rng(3, 5);
            (0..10).map(|_| s.sample(&mut r)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn zero_elements_rejected() {
        let mg = mg_from_nakagami(1.0).unwrap();
        let s = MgSampler::new(&mg).unwrap();
        assert!(sample_cascade(&s, &s, 0, &mut chunk_rng(1, 0)).is_err());
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut one = Moments::default();
        xs.iter().for_each(|&x| one.push(x));
        let mut parts = Moments::default();
        for c in xs.chunks(64) {
            let mut m = Moments::default();
            c.iter().for_each(|&x| m.push(x));
            parts.merge(&m);
        }
        assert!((one.mean - parts.mean).abs() < 1e-12);
        assert!((one.m2 - parts.m2).abs() < 1e-9);
    }
}
