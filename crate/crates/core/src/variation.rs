//! Variation operators: exact-`ℓ` mutation, biased uniform crossover, and the
//! binomial step-size sampler.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::bitstring::BitString;
use crate::error::{check_probability, Error, Result};

/// Samples `ℓ ~ B(n, p)`.
pub fn sample_binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<usize> {
    check_probability(p)?;
    if n == 0 {
        return Err(Error::EmptyBitString);
    }
    // Degenerate cases short-circuit without touching the stream.
    if p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n);
    }
    let dist = Binomial::new(n as u64, p).map_err(|_| Error::InvalidProbability(p))?;
    Ok(dist.sample(rng) as usize)
}

/// Reusable scratch for `mut_ℓ`: flips a uniformly random `ℓ`-subset of positions
/// in `O(ℓ)` by a partial Fisher–Yates pass over a persistent index array.
///
/// The array is never reset between calls. A partial Fisher–Yates pass picks
/// a uniform ordered sample of distinct entries from any arrangement, so the
/// leftover order from earlier calls does not bias the next subset.
#[derive(Clone, Debug)]
pub struct Mutator {
    indices: Vec<usize>,
}

impl Mutator {
    pub fn new(n: usize) -> Self {
        Self {
            indices: (0..n).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.indices.len()
    }

    /// Flips exactly `ell` distinct uniformly chosen positions of `x` in place.
    pub fn flip_random_subset<R: Rng + ?Sized>(&mut self, x: &mut BitString, ell: usize, rng: &mut R) -> Result<()> {
        let n = self.indices.len();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: x.len(),
            });
        }
        if ell > n {
            return Err(Error::StepSizeTooLarge { ell, n });
        }
        // A uniform ℓ-subset is the complement of a uniform (n − ℓ)-subset,
        // so large steps flip everything and then restore n − ℓ positions.
        let picks = if 2 * ell > n {
            x.complement_in_place();
            n - ell
        } else {
            ell
        };
        for i in 0..picks {
            let j = rng.random_range(i..n);
            self.indices.swap(i, j);
            x.flip(self.indices[i]);
        }
        Ok(())
    }
}

/// `mut_ℓ(x)`: a copy of `x` with exactly `ell` uniformly chosen bits flipped.
pub fn mutate<R: Rng + ?Sized>(x: &BitString, ell: usize, rng: &mut R) -> Result<BitString> {
    let mut y = x.clone();
    Mutator::new(x.len()).flip_random_subset(&mut y, ell, rng)?;
    Ok(y)
}

/// Precomputed `cross_c(x, x')` for repeated sampling with the same parents.
///
/// Positions where the parents agree produce the same bit whichever parent
/// it is taken from, so only the `k` differing positions matter. Taking each
/// of them independently with probability `c` is the same as drawing
/// `m ~ B(k, c)` and then a uniform `m`-subset, which costs `O(ck)` instead
/// of `O(k)` per offspring.
#[derive(Clone, Debug, Default)]
pub struct CrossoverPlan {
    differing: Vec<usize>,
}

impl CrossoverPlan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Prepares the plan for parents `x` and `xprime`.
    pub fn prepare(&mut self, x: &BitString, xprime: &BitString) -> Result<()> {
        x.diff_positions_into(xprime, &mut self.differing)
    }

    /// Positions where the parents differ, in no particular order.
    pub fn differing(&self) -> &[usize] {
        &self.differing
    }

    /// Overwrites `out` with one offspring. Returns how many differing
    /// positions were taken from `xprime`; zero means the offspring equals `x`.
    pub fn sample_into<R: Rng + ?Sized>(
        &mut self,
        x: &BitString,
        c: f64,
        rng: &mut R,
        out: &mut BitString,
    ) -> Result<usize> {
        check_probability(c)?;
        out.copy_from(x);
        let k = self.differing.len();
        if k == 0 {
            return Ok(0);
        }
        let taken = sample_binomial(k, c, rng)?;
        for i in 0..taken {
            let j = rng.random_range(i..k);
            self.differing.swap(i, j);
            out.flip(self.differing[i]);
        }
        Ok(taken)
    }
}

/// `cross_c(x, x')`: each position independently from `xprime` with probability `c`, else from `x`.
pub fn crossover<R: Rng + ?Sized>(x: &BitString, xprime: &BitString, c: f64, rng: &mut R) -> Result<BitString> {
    check_probability(c)?;
    let mut plan = CrossoverPlan::new();
    plan.prepare(x, xprime)?;
    let mut out = x.clone();
    plan.sample_into(x, c, rng, &mut out)?;
    Ok(out)
}
