mod common;

use common::{brute_force_gae, random_buffer};
use kanppo::nn::Rng;
use kanppo::rl::{compute_gae, normalize_advantages, td_error, RolloutBuffer, Transition};

#[test]
fn recursion_matches_explicit_sum() {
    let mut rng = Rng::new(21);
    for trial in 0..200 {
        let len = 1 + (rng.next_u64() % 64) as usize;
        let p_end = [0.0, 0.05, 0.2, 0.6][trial % 4];
        let buffer = random_buffer(&mut rng, len, p_end);
        let gamma = rng.uniform(0.8, 1.0);
        let lambda = rng.uniform(0.0, 1.0);
        let got = compute_gae(&buffer, gamma, lambda).unwrap();
        let want = brute_force_gae(&buffer, gamma, lambda);
        for (t, (a, b)) in got.advantages.iter().zip(&want).enumerate() {
            assert!((a - b).abs() <= 1e-12, "trial {trial} t={t}: {a} vs {b}");
        }
        for ((ret, adv), tr) in got.returns.iter().zip(&got.advantages).zip(buffer.transitions()) {
            assert_eq!(*ret, adv + tr.value);
        }
    }
}

#[test]
fn zero_lambda_is_one_step_td() {
    let mut rng = Rng::new(22);
    for _ in 0..50 {
        let buffer = random_buffer(&mut rng, 40, 0.2);
        let got = compute_gae(&buffer, 0.99, 0.0).unwrap();
        let ts = buffer.transitions();
        for (t, tr) in ts.iter().enumerate() {
            let next = if tr.truncated {
                tr.truncation_value
            } else if t + 1 < ts.len() {
                ts[t + 1].value
            } else {
                buffer.bootstrap_value
            };
            assert_eq!(got.advantages[t], td_error(tr.reward, tr.value, next, tr.terminated, 0.99));
        }
    }
}

#[test]
fn unit_lambda_gamma_is_return_minus_value() {
    let rewards = [1.0, 2.0, 3.0, 4.0];
    let ts: Vec<Transition<f64>> = rewards
        .iter()
        .enumerate()
        .map(|(i, &r)| Transition {
            obs: vec![0.0],
            action: vec![0.0],
            reward: r,
            terminated: i == 3,
            truncated: false,
            value: 0.5,
            log_prob: 0.0,
            truncation_value: 0.0,
        })
        .collect();
    let adv = compute_gae(&RolloutBuffer::from_transitions(ts, 100.0), 1.0, 1.0).unwrap();
    assert_eq!(adv.advantages, vec![9.5, 8.5, 6.5, 3.5]);
}

#[test]
fn normalized_advantages_are_standard() {
    let mut rng = Rng::new(23);
    let buffer = random_buffer(&mut rng, 64, 0.1);
    let mut adv = compute_gae(&buffer, 0.99, 0.95).unwrap();
    normalize_advantages(&mut adv);
    let n = adv.advantages.len() as f64;
    let mean = adv.advantages.iter().sum::<f64>() / n;
    let var = adv.advantages.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    assert!(mean.abs() < 1e-12);
    assert!((var.sqrt() - 1.0).abs() < 1e-9);
}

#[test]
fn empty_buffer_is_rejected() {
    assert!(compute_gae(&RolloutBuffer::<f64>::new(4), 0.99, 0.95).is_err());
}
