//! Population-size control: static, fitness-dependent and self-adjusting λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rounds λ to its closest integer, halves rounding up.
pub fn round_lambda(lambda: f64) -> usize {
    let floor = lambda.floor();
    let rounded = if lambda - floor < 0.5 { floor } else { floor + 1.0 };
    (rounded as usize).max(1)
}

/// `⌈√(n / (n - f))⌉`, computed exactly in integers.
pub fn lambda_star(n: usize, fitness: usize) -> Result<usize> {
    if fitness >= n {
        return Err(Error::AtOptimum);
    }
    Ok(lambda_star_for_distance(n, n - fitness))
}

/// Smallest `k` with `k² · d ≥ n`, i.e. `⌈√(n/d)⌉` for `1 ≤ d ≤ n`.
pub(crate) fn lambda_star_for_distance(n: usize, distance: usize) -> usize {
    debug_assert!(distance >= 1 && distance <= n);
    let (n, d) = (n as u128, distance as u128);
    let mut k = ((n as f64 / d as f64).sqrt().ceil() as u128).max(1);
    while k > 1 && (k - 1) * (k - 1) * d >= n {
        k -= 1;
    }
    while k * k * d < n {
        k += 1;
    }
    k as usize
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ControlMode {
    /// λ fixed for the whole run.
    Static { lambda: f64 },
    /// λ = ⌈√(n/(n−f(x)))⌉, recomputed from the incumbent's fitness.
    FitnessDependent,
    /// The 1/r success rule: divide by `F` on success, multiply by `F^{1/(r−1)}` otherwise.
    SelfAdjusting,
}

#[derive(Clone, Debug)]
pub struct LambdaController {
    mode: ControlMode,
    lambda: f64,
    n: usize,
    update_strength: f64,
    success_ratio: f64,
    growth: f64,
}

impl LambdaController {
    /// Static λ in `[1, n]`.
    pub fn fixed(n: usize, lambda: f64) -> Result<Self> {
        check_n(n)?;
        check_lambda(n, lambda)?;
        Ok(Self {
            mode: ControlMode::Static { lambda },
            lambda,
            n,
            update_strength: 1.0,
            success_ratio: 5.0,
            growth: 1.0,
        })
    }

    /// λ starts at 1 and follows the incumbent's fitness via [`LambdaController::sync_distance`].
    pub fn fitness_dependent(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self {
            mode: ControlMode::FitnessDependent,
            lambda: 1.0,
            n,
            update_strength: 1.0,
            success_ratio: 5.0,
            growth: 1.0,
        })
    }

    pub fn self_adjusting(n: usize, update_strength: f64, success_ratio: f64, lambda0: f64) -> Result<Self> {
        check_n(n)?;
        if !(update_strength.is_finite() && update_strength > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "update strength F must be a finite real > 1, got {update_strength}"
            )));
        }
        if !(success_ratio.is_finite() && success_ratio >= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "success-rule denominator r must be a finite real >= 2, got {success_ratio}"
            )));
        }
        check_lambda(n, lambda0)?;
        Ok(Self {
            mode: ControlMode::SelfAdjusting,
            lambda: lambda0,
            n,
            update_strength,
            success_ratio,
            growth: update_strength.powf(1.0 / (success_ratio - 1.0)),
        })
    }

    pub fn mode(&self) -> ControlMode {
        self.mode
    }

    /// Current real-valued λ.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// λ rounded to the offspring count used by both phases.
    pub fn offspring_count(&self) -> usize {
        round_lambda(self.lambda).min(self.n)
    }

    pub fn update_strength(&self) -> f64 {
        self.update_strength
    }

    pub fn success_ratio(&self) -> f64 {
        self.success_ratio
    }

    /// Multiplier applied to λ after a non-successful iteration.
    pub fn growth_factor(&self) -> f64 {
        self.growth
    }

    pub fn at_upper_barrier(&self) -> bool {
        self.lambda >= self.n as f64
    }

    /// Applies the success rule. Only meaningful in self-adjusting mode;
    /// the other modes ignore it.
    pub fn update_self_adjusting(&mut self, success: bool) {
        if self.mode != ControlMode::SelfAdjusting {
            return;
        }
        self.lambda = if success {
            (self.lambda / self.update_strength).max(1.0)
        } else {
            (self.lambda * self.growth).min(self.n as f64)
        };
    }

    /// Recomputes λ* for the fitness-dependent mode. `distance` is `n − f(x)`.
    pub fn sync_distance(&mut self, distance: usize) -> Result<()> {
        if self.mode != ControlMode::FitnessDependent {
            return Ok(());
        }
        if distance == 0 {
            return Err(Error::AtOptimum);
        }
        if distance > self.n {
            return Err(Error::InvalidParameter(format!(
                "distance {distance} exceeds n = {}",
                self.n
            )));
        }
        self.lambda = lambda_star_for_distance(self.n, distance) as f64;
        Ok(())
    }

    /// Post-iteration update for whichever mode is active.
    pub fn observe(&mut self, success: bool, distance: Option<usize>) -> Result<()> {
        match self.mode {
            ControlMode::Static { .. } => Ok(()),
            ControlMode::SelfAdjusting => {
                self.update_self_adjusting(success);
                Ok(())
            }
            ControlMode::FitnessDependent => match distance {
                Some(d) => self.sync_distance(d),
                None => Err(Error::InvalidConfig(
                    "the fitness-dependent controller needs absolute OneMax values".into(),
                )),
            },
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::EmptyBitString)
    } else {
        Ok(())
    }
}

fn check_lambda(n: usize, lambda: f64) -> Result<()> {
    if lambda.is_finite() && (1.0..=n as f64).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("λ must lie in [1, {n}], got {lambda}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding_examples() {
        assert_eq!(round_lambda(2.49), 2);
        assert_eq!(round_lambda(2.5), 3);
        assert_eq!(round_lambda(1.0), 1);
        assert_eq!(round_lambda(7.999), 8);
    }

    #[test]
    fn lambda_star_examples() {
        assert_eq!(lambda_star(100, 0).unwrap(), 1);
        assert_eq!(lambda_star(100, 99).unwrap(), 10);
        assert_eq!(lambda_star(1000, 990).unwrap(), 10);
        assert!(matches!(lambda_star(100, 100), Err(Error::AtOptimum)));
    }

    #[test]
    fn lambda_star_matches_float_formula_off_squares() {
        // n/d = 2, 10, 20 -> 1.414.., 3.16.., 4.47..
        assert_eq!(lambda_star(400, 200).unwrap(), 2);
        assert_eq!(lambda_star(400, 360).unwrap(), 4);
        assert_eq!(lambda_star(400, 380).unwrap(), 5);
    }

    #[test]
    fn barriers() {
        let mut c = LambdaController::self_adjusting(50, 1.5, 5.0, 1.0).unwrap();
        c.update_self_adjusting(true);
        assert_eq!(c.lambda(), 1.0);

        let mut c = LambdaController::self_adjusting(50, 1.5, 5.0, 50.0).unwrap();
        c.update_self_adjusting(false);
        assert_eq!(c.lambda(), 50.0);
        assert!(c.at_upper_barrier());
    }

    #[test]
    fn growth_step_value() {
        let mut c = LambdaController::self_adjusting(100, 1.5, 5.0, 4.0).unwrap();
        c.update_self_adjusting(false);
        // 4 * 1.5^(1/4)
        assert!((c.lambda() - 4.426_727_678_8).abs() < 1e-9, "{}", c.lambda());
        assert_eq!(c.offspring_count(), 4);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(LambdaController::self_adjusting(10, 1.0, 5.0, 1.0).is_err());
        assert!(LambdaController::self_adjusting(10, 1.5, 1.5, 1.0).is_err());
        assert!(LambdaController::self_adjusting(10, 1.5, 5.0, 11.0).is_err());
        assert!(LambdaController::fixed(10, 0.5).is_err());
        assert!(LambdaController::fixed(0, 1.0).is_err());
    }

    #[test]
    fn static_and_fitness_dependent_modes() {
        let mut s = LambdaController::fixed(100, 3.0).unwrap();
        s.observe(true, Some(10)).unwrap();
        s.observe(false, Some(10)).unwrap();
        assert_eq!(s.lambda(), 3.0);

        let mut f = LambdaController::fitness_dependent(100).unwrap();
        f.observe(false, Some(1)).unwrap();
        assert_eq!(f.lambda(), 10.0);
        assert!(f.observe(false, None).is_err());
        assert!(matches!(f.sync_distance(0), Err(Error::AtOptimum)));
    }

    proptest! {
        #[test]
        fn self_adjusting_stays_in_bounds(successes in proptest::collection::vec(any::<bool>(), 0..400), f in 1.01f64..4.0, r in 2.0f64..8.0, n in 1usize..500) {
            let mut c = LambdaController::self_adjusting(n, f, r, 1.0).unwrap();
            for s in successes {
                c.update_self_adjusting(s);
                prop_assert!(c.lambda() >= 1.0 && c.lambda() <= n as f64);
                prop_assert!(c.offspring_count() >= 1 && c.offspring_count() <= n);
            }
        }

        #[test]
        fn consecutive_failures_grow_geometrically(k in 0i32..40, f in 1.01f64..2.5) {
            let lambda0 = 2.0;
            let mut c = LambdaController::self_adjusting(1_000_000, f, 5.0, lambda0).unwrap();
            for _ in 0..k {
                c.update_self_adjusting(false);
            }
            let expected = lambda0 * f.powf(k as f64 / 4.0);
            prop_assert!((c.lambda() - expected).abs() <= 1e-9 * expected);
        }

        #[test]
        fn one_success_four_failures_is_identity(f in 1.01f64..3.0, lambda0 in 10.0f64..1000.0) {
            let mut c = LambdaController::self_adjusting(1_000_000, f, 5.0, lambda0).unwrap();
            c.update_self_adjusting(true);
            for _ in 0..4 {
                c.update_self_adjusting(false);
            }
            prop_assert!((c.lambda() - lambda0).abs() <= 1e-9 * lambda0);
        }

        #[test]
        fn lambda_star_is_ceiling_of_root(n in 1usize..100_000, frac in 0.0f64..1.0) {
            let f = ((n as f64) * frac).floor() as usize;
            let f = f.min(n - 1);
            let k = lambda_star(n, f).unwrap();
            let d = n - f;
            prop_assert!(k * k * d >= n);
            prop_assert!(k == 1 || (k - 1) * (k - 1) * d < n);
            prop_assert!(k <= (n as f64).sqrt().ceil() as usize);
        }
    }
}
