use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::Rational;
use crate::cnf::Formula;
use crate::error::SearchError;
use crate::search::{count_with, OrderingSource, SearchConfig};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiEstimate {
    pub samples: u64,
    pub mean: f64,
    /// Standard error of the mean (sample deviation over `√samples`).
    pub std_error: f64,
    /// The mean as an exact fraction.
    #[serde(serialize_with = "super::serialize_rational")]
    pub exact_mean: Rational,
    pub min: u64,
    pub max: u64,
}

/// Monte Carlo estimate of `ψ(r)`: the mean number of surviving viable
/// leaves over independently seeded orderings.
///
/// Per-sample seeds come from a ChaCha8 stream keyed by `seed`, so the
/// result does not depend on thread scheduling.
pub fn estimate_psi(
    f: &Formula,
    t: usize,
    samples: u64,
    seed: u64,
) -> Result<PsiEstimate, SearchError> {
    if samples == 0 {
        return Err(SearchError::Internal("zero samples requested".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..samples).map(|_| rng.gen()).collect();
    let leaves: Vec<u64> = seeds
        .par_iter()
        .map(|&s| {
            count_with(f, &SearchConfig::new(t, OrderingSource::Seeded(s)))
                .map(|(_, st)| st.leaves_visited)
        })
        .collect::<Result<_, _>>()?;
    let total: u128 = leaves.iter().map(|&x| x as u128).sum();
    let k = samples as f64;
    let mean = total as f64 / k;
    let var = if samples > 1 {
        leaves
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (k - 1.0)
    } else {
        0.0
    };
    Ok(PsiEstimate {
        samples,
        mean,
        std_error: (var / k).sqrt(),
        exact_mean: Rational::new(BigInt::from(total), BigInt::from(samples)),
        min: leaves.iter().copied().min().unwrap_or(0),
        max: leaves.iter().copied().max().unwrap_or(0),
    })
}
