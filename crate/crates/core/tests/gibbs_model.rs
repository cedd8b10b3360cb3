use regen_mcmc::accum::{ratio_estimate, MeanStd};
use regen_mcmc::bounds::bax_block_bound;
use regen_mcmc::models::gibbs::drift_function;
use regen_mcmc::models::GibbsNormalModel;
use regen_mcmc::regen::{sample_tour_from, RunOptions, SplitKernel, TourStream};
use regen_mcmc::seed::{domain_id, stream_rng};

const SEED: u64 = 0x61bb5;

fn model(a: f64) -> GibbsNormalModel {
    GibbsNormalModel::new(50, a).unwrap()
}

#[test]
fn conditional_moments_of_one_sweep() {
    let m = model(5.0);
    let mut rng = stream_rng(SEED, domain_id("conditional"), 0);
    let sq: MeanStd = (0..1_000_000).map(|_| m.sample_transition(&2.0, &mut rng).powi(2)).collect();
    assert!((sq.mean() - 1.125).abs() <= 4.0 * sq.stderr(), "{}", sq.mean());
    let first: MeanStd = (0..1_000_000).map(|_| m.sample_transition(&3.0, &mut rng)).collect();
    assert!(first.mean().abs() <= 4.0 * first.stderr(), "{}", first.mean());
}

#[test]
fn posterior_marginal_is_stationary() {
    let m = model(5.0);
    let mut rng = stream_rng(SEED, domain_id("stationary"), 0);
    let mut mu = m.sample_stationary(&mut rng);
    // Independent restarts every 1000 steps keep the stderr honest.
    let mut batches = MeanStd::new();
    for _ in 0..1000 {
        mu = m.sample_transition(&mu, &mut rng);
        let mut acc = 0.0;
        for _ in 0..1000 {
            mu = m.sample_transition(&mu, &mut rng);
            acc += mu * mu;
        }
        batches.push(acc / 1000.0);
        mu = m.sample_stationary(&mut rng);
    }
    let target = 50.0 / 47.0;
    assert!((batches.mean() - target).abs() <= 4.0 * batches.stderr(), "{}", batches.mean());
}

#[test]
fn two_step_sampler_matches_collapsed_sampler() {
    let collapsed = model(5.0);
    let literal = model(5.0).with_two_step_sampler(true);
    let mut rng = stream_rng(SEED, domain_id("two-step"), 0);
    let a: MeanStd = (0..400_000).map(|_| collapsed.sample_transition(&1.5, &mut rng).powi(2)).collect();
    let b: MeanStd = (0..400_000).map(|_| literal.sample_transition(&1.5, &mut rng).powi(2)).collect();
    let se = (a.stderr().powi(2) + b.stderr().powi(2)).sqrt();
    assert!((a.mean() - b.mean()).abs() <= 4.0 * se);
}

#[test]
fn pointwise_minorization_and_crossing() {
    for a in [2.0, 5.0, 100.0] {
        let m = model(a);
        let h = m.minorization().h_a;
        let ratio = m.transition_density(a, h) / m.transition_density(0.0, h);
        assert!((ratio - 1.0).abs() < 1e-12, "a {a}: {ratio}");
        let mut rng = stream_rng(SEED, domain_id("minorant"), a.to_bits());
        for _ in 0..10_000 {
            use rand::Rng;
            let x = rng.random_range(-a..=a);
            let y = rng.random_range(-3.0 * a..=3.0 * a);
            assert!(m.p_min(y) <= m.transition_density(x, y) * (1.0 + 1e-12));
            assert_eq!(m.transition_density(x, y), m.transition_density(x, -y));
        }
    }
}

/// `V(X_{n∧S}) λ^{-(n∧S)}` from `x = 2a`, with `S` the hitting time of `J`.
#[test]
fn drift_supermartingale_from_outside_small_set() {
    for a in [2.0, 5.0] {
        let m = model(a);
        let lambda = m.drift().lambda;
        let horizon = 20;
        let paths = 100_000;
        let mut rng = stream_rng(SEED, domain_id("supermartingale"), a.to_bits());
        let mut values = vec![vec![0.0; paths]; horizon + 1];
        for p in 0..paths {
            let mut x = 2.0 * a;
            let mut stopped_at = None;
            for (n, row) in values.iter_mut().enumerate() {
                if stopped_at.is_none() && m.in_small_set(&x) {
                    stopped_at = Some(n);
                }
                let k = stopped_at.unwrap_or(n) as i32;
                row[p] = drift_function(x) * lambda.powi(-k);
                if stopped_at.is_none() {
                    x = m.sample_transition(&x, &mut rng);
                }
            }
        }
        for n in 0..horizon {
            let diff: MeanStd = values[n + 1].iter().zip(&values[n]).map(|(b, a)| b - a).collect();
            assert!(
                diff.mean() <= 4.0 * diff.stderr().max(1e-12),
                "a {a}, n {n}: increment {} ± {}",
                diff.mean(),
                diff.stderr()
            );
        }
    }
}

#[test]
fn bax_bound_dominates_simulated_tour_sums() {
    let a = 5.0;
    let m = model(a);
    let params = m.drift_params().unwrap();
    let obs = GibbsNormalModel::observable();
    for (i, x) in [0.0, 0.5 * a, a, 2.0 * a, 4.0 * a].into_iter().enumerate() {
        let mut rng = stream_rng(SEED, domain_id("bax"), i as u64);
        let v_x = drift_function(x);
        let sums: MeanStd = (0..100_000)
            .map(|_| {
                let tour = sample_tour_from(&m, x, &obs, &RunOptions::default(), &mut rng).unwrap();
                tour.block_sum_v.unwrap() - v_x
            })
            .collect();
        let bound = bax_block_bound(v_x, &params, m.in_small_set(&x)).unwrap();
        assert!(
            sums.mean() <= bound + 4.0 * sums.stderr(),
            "x {x}: simulated {} ± {} vs bound {bound}",
            sums.mean(),
            sums.stderr()
        );
    }
}

/// `Eτ²/m = 1 + 2 E_π(T - 1)`, with `T` the first regeneration of a chain
/// started from the posterior marginal.
#[test]
fn square_block_identity_for_tour_lengths() {
    for a in [5.0, 100.0] {
        let m = model(a);
        let obs = GibbsNormalModel::observable();
        let mut rng = stream_rng(SEED, domain_id("square-block"), a.to_bits());
        let (mut len, mut len_sq) = (Vec::new(), Vec::new());
        for tour in TourStream::new(&m, &obs, RunOptions::default(), &mut rng).take(200_000) {
            let l = tour.unwrap().length as f64;
            len.push(l);
            len_sq.push(l * l);
        }
        let (lhs, lhs_se) = ratio_estimate(&len_sq, &len);
        let rhs_stats: MeanStd = (0..200_000)
            .map(|_| {
                let x = m.sample_stationary(&mut rng);
                let tour = sample_tour_from(&m, x, &obs, &RunOptions::default(), &mut rng).unwrap();
                1.0 + 2.0 * (tour.length as f64 - 1.0)
            })
            .collect();
        let se = (lhs_se.powi(2) + rhs_stats.stderr().powi(2)).sqrt();
        assert!(
            (lhs - rhs_stats.mean()).abs() <= 4.0 * se,
            "a {a}: {lhs} vs {} (se {se})",
            rhs_stats.mean()
        );
    }
}

#[test]
fn table_one_constants() {
    let m5 = model(5.0);
    let m100 = model(100.0);
    assert!((m5.truth().m - 1.1072).abs() < 1e-4);
    assert!((m100.truth().m - 6.5043).abs() < 1e-4);
    assert!((m5.minorization().beta - 0.9032).abs() < 1e-4);
    assert!((m100.minorization().beta - 0.1537).abs() < 1e-4);
    let t500 = GibbsNormalModel::new(500, 5.0).unwrap();
    assert!((t500.truth().sigma_as_sq - 1.00604).abs() < 1e-5);
}
