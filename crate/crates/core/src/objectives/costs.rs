use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `d × n` cost matrix with entries drawn independently from `U(1, 3)`.
pub fn uniform_random_costs(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..d)
        .map(|_| (0..n).map(|_| rng.gen_range(1.0..=3.0)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_and_determinism() {
        let a = uniform_random_costs(500, 2, 7);
        assert_eq!(a.len(), 2);
        assert!(a.iter().flatten().all(|&c| (1.0..=3.0).contains(&c)));
        assert_eq!(a, uniform_random_costs(500, 2, 7));
        assert_ne!(a, uniform_random_costs(500, 2, 8));
        assert!(uniform_random_costs(0, 1, 1)[0].is_empty());
    }
}
