#![allow(dead_code)]

use rand::Rng;
use uncertain_priors::Distribution;

/// Exhaustive minimum of `Σ w_m·|c(m)|` over injective maps `c` from the
/// messages to binary strings, for at most 8 messages.
///
/// Only the lengths matter. There are `2^j` strings of length `j`, so
/// the search assigns every message a length class without exceeding any
/// class's capacity, over all subsets (dynamic programming on bitmasks).
/// Lengths `≥ n` never help: fewer than `n` other messages exist, and there
/// are `2^n − 1 ≥ n` strings shorter than `n`, so a shorter one is always
/// free.
#[allow(clippy::needless_range_loop)]
pub fn brute_force_one_to_one_cost(weights: &[u64]) -> u64 {
    let n = weights.len();
    assert!((1..=8).contains(&n));
    let full = (1usize << n) - 1;
    let subset_weight: Vec<u64> = (0..=full)
        .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]).sum())
        .collect();
    let mut best = vec![u64::MAX; full + 1];
    best[0] = 0;
    for length in 0..n as u32 {
        let capacity = 1usize << length;
        let mut next = best.clone();
        for mask in 0..=full {
            if best[mask] == u64::MAX {
                continue;
            }
            let free = full & !mask;
            let mut sub = free;
            while sub > 0 {
                if (sub.count_ones() as usize) <= capacity {
                    let cost = best[mask] + length as u64 * subset_weight[sub];
                    let target = mask | sub;
                    if cost < next[target] {
                        next[target] = cost;
                    }
                }
                sub = (sub - 1) & free;
            }
        }
        best = next;
    }
    best[full]
}

/// Integer weights, at least one positive, and the distribution they induce.
pub fn random_weighted<R: Rng>(rng: &mut R, max_len: usize) -> (Vec<u64>, Distribution) {
    let n = rng.random_range(1..=max_len);
    loop {
        let weights: Vec<u64> = (0..n)
            .map(|_| if rng.random_bool(0.15) { 0 } else { rng.random_range(1..=1000) })
            .collect();
        let total: u64 = weights.iter().sum();
        if total > 0 {
            let probs = weights.iter().map(|&w| w as f64 / total as f64).collect();
            return (weights, Distribution::new(probs, None).unwrap());
        }
    }
}

/// Varied test distributions: flat, spiky and geometric.
pub fn random_distribution<R: Rng>(rng: &mut R, max_len: usize) -> Distribution {
    let n = rng.random_range(1..=max_len);
    let raw: Vec<f64> = match rng.random_range(0..3) {
        0 => (0..n).map(|_| rng.random::<f64>() + 1e-6).collect(),
        1 => (0..n).map(|_| rng.random::<f64>().powi(8) + 1e-12).collect(),
        _ => {
            let ratio: f64 = rng.random_range(0.01..0.999);
            (0..n).map(|i| ratio.powi(i as i32)).collect()
        }
    };
    let total: f64 = raw.iter().sum();
    Distribution::new(raw.into_iter().map(|x| x / total).collect(), None).unwrap()
}

#[test]
fn brute_force_small_cases() {
    assert_eq!(brute_force_one_to_one_cost(&[5]), 0);
    // Uniform over four: lengths 0, 1, 1, 2.
    assert_eq!(brute_force_one_to_one_cost(&[1, 1, 1, 1]), 4);
    assert_eq!(brute_force_one_to_one_cost(&[10, 1, 1]), 2);
    assert_eq!(brute_force_one_to_one_cost(&[1, 10, 1]), 2);
}
