use rispls_core::cascade::cascade_moments;
use rispls_core::mcsim::{estimate_cascade_moments, estimate_metrics, sample_snrs, Scenario};
use rispls_core::secrecy::{db_to_linear, gamma_b_cdf, gamma_e_cdf, LinkBudget, SecrecyConfig};
use rispls_core::{mg_from_nakagami, mg_from_rice, CascadeFit};

fn scenario(elements: usize, rho_b_db: f64, rho_e_db: f64) -> Scenario {
    let hop = mg_from_rice(db_to_linear(5.0), 20).unwrap();
    Scenario {
        hop_a: hop.clone(),
        hop_r: hop,
        elements,
        eve: mg_from_nakagami(3.0).unwrap(),
        budget: LinkBudget::from_db(rho_b_db, rho_e_db).unwrap(),
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let sc = scenario(4, 0.0, 0.0);
    let n = 200_000;
    let one = estimate_metrics(&sc, n, 42, 1).unwrap();
    let three = estimate_metrics(&sc, n, 42, 3).unwrap();
    let pool = estimate_metrics(&sc, n, 42, 0).unwrap();
    assert_eq!(one, three);
    assert_eq!(one, pool);
    let other = estimate_metrics(&sc, n, 43, 1).unwrap();
    assert_ne!(one.c_s_full.value, other.c_s_full.value);
}

#[test]
fn too_few_samples_are_rejected() {
    assert!(estimate_metrics(&scenario(4, 0.0, 0.0), 9_999, 1, 1).is_err());
}

#[test]
fn double_rayleigh_mean() {
    let ray = mg_from_nakagami(1.0).unwrap();
    let est = estimate_cascade_moments(&ray, &ray, 1, &[1], 1_000_000, 5, 0).unwrap();
    let want = std::f64::consts::PI / 4.0;
    assert!((est[0].value - want).abs() <= 3.0 * est[0].std_error, "{:?}", est[0]);
}

#[test]
fn cascade_power_matches_moment_sum() {
    let hop = mg_from_rice(db_to_linear(5.0), 20).unwrap();
    let mu = cascade_moments(&hop, &hop, 4, 2).unwrap();
    let est = estimate_cascade_moments(&hop, &hop, 4, &[2], 1_000_000, 9, 0).unwrap();
    assert!((est[0].value - mu[2]).abs() <= 3.0 * est[0].std_error, "{:?} vs {}", est[0], mu[2]);
}

#[test]
fn metric_estimates_are_ordered() {
    let m = estimate_metrics(&scenario(2, -3.0, 2.0), 100_000, 17, 0).unwrap();
    assert!((0.0..=1.0).contains(&m.p_leak.value));
    assert!(m.c_s_full.value >= m.r_s_partial.value);
    assert!((m.r_s_partial.value - (m.capacity_b.value - m.capacity_e.value)).abs() < 1e-12);
    assert_eq!(m.p_leak.n_samples, 100_000);
    assert_eq!(m.p_leak.seed, 17);
}

#[test]
fn vanishing_eavesdropper() {
    let m = estimate_metrics(&scenario(4, 0.0, -90.0), 100_000, 3, 0).unwrap();
    assert_eq!(m.p_leak.value, 0.0);
    assert!((m.c_s_full.value - m.r_s_partial.value).abs() < 1e-6);
}

/// Empirical CDF at the quartiles and the 5%/95% points against the analytic
/// CDF, within three binomial standard errors.
fn check_quantiles(samples: &mut [f64], cdf: impl Fn(f64) -> f64) {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
        let x = samples[(q * n) as usize];
        let empirical = samples.partition_point(|&v| v <= x) as f64 / n;
        let sigma = (empirical * (1.0 - empirical) / n).sqrt();
        let f = cdf(x);
        assert!((f - empirical).abs() <= 3.0 * sigma, "q={q}: F({x}) = {f}, empirical {empirical}");
    }
}

#[test]
fn snr_cdfs_match_samples() {
    let sc = scenario(4, 0.0, 0.0);
    let fit = CascadeFit::from_links(&sc.hop_a, &sc.hop_r, 4).unwrap();
    let cfg = SecrecyConfig::new(fit, sc.eve.clone(), sc.budget).unwrap();
    let (mut b, mut e) = sample_snrs(&sc, 100_000, 2024).unwrap();
    check_quantiles(&mut b, |x| gamma_b_cdf(&cfg, x).unwrap());
    check_quantiles(&mut e, |x| gamma_e_cdf(&cfg, x).unwrap());
}
