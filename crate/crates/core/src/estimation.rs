//! MMSE channel estimation from a block of identical pilot symbols.
//!
//! With `T_τ` pilots of amplitude `x_τ` (`x_τ² = P`) the received pilots are
//! `y(t) = H·x_τ + w(t)`, and the conditional-mean estimate depends on them only
//! through their average `ȳ`:
//!
//! ```text
//! Ĥ = x_τ · C · (P·C + I/T_τ)⁻¹ · ȳ
//! Ĉ = P · C · (P·C + I/T_τ)⁻¹ · C        (covariance of Ĥ)
//! C̃ = (1/T_τ) · (P·C + I/T_τ)⁻¹ · C      (covariance of H̃ = H − Ĥ)
//! V = I + P·C̃                             (per-symbol effective noise)
//! ```

use crate::error::{Error, Result};
use crate::linalg::{check_spd, cholesky, solve_spd, Matrix, SymMatrix};

/// Second-order statistics of the channel `H ~ N(0, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelStats {
    c: SymMatrix,
}

impl ChannelStats {
    /// Rejects covariances whose smallest eigenvalue is below `-tol`, with the
    /// default scale-relative tolerance.
    pub fn new(c: SymMatrix) -> Result<Self> {
        let tol = c.default_pd_tolerance();
        let report = check_spd(&c, tol);
        if !report.is_psd {
            return Err(Error::NotPsd {
                min_eigenvalue: report.min_eigenvalue,
                tolerance: tol,
            });
        }
        Ok(ChannelStats { c })
    }

    pub fn covariance(&self) -> &SymMatrix {
        &self.c
    }

    /// Number of receive antennas.
    pub fn antennas(&self) -> usize {
        self.c.dim()
    }
}

/// Per-symbol power `P` and coherence block length `T`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkBudget {
    power: f64,
    block_length: u64,
}

impl LinkBudget {
    /// `power` must be finite and non-negative; `block_length` at least 2.
    pub fn new(power: f64, block_length: u64) -> Result<Self> {
        if !power.is_finite() || power < 0.0 {
            return Err(Error::InvalidBudget(format!(
                "power must be finite and non-negative, got {power}"
            )));
        }
        if block_length < 2 {
            return Err(Error::InvalidBudget(format!(
                "block length must be at least 2, got {block_length}"
            )));
        }
        Ok(LinkBudget {
            power,
            block_length,
        })
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn block_length(&self) -> u64 {
        self.block_length
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        LinkBudget::new(power, self.block_length)
    }
}

/// Number of pilot symbols at the start of each block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TrainingPlan {
    pub t_tau: u64,
}

impl TrainingPlan {
    pub fn new(t_tau: u64) -> Self {
        TrainingPlan { t_tau }
    }

    /// Data symbols left in a block of the given budget.
    pub fn data_symbols(&self, budget: &LinkBudget) -> u64 {
        budget.block_length().saturating_sub(self.t_tau)
    }

    fn require_training(&self, budget: &LinkBudget) -> Result<()> {
        if self.t_tau < 1 {
            return Err(Error::InvalidPlan {
                t_tau: self.t_tau as i64,
                block_length: budget.block_length(),
                reason: "at least one training symbol is required",
            });
        }
        Ok(())
    }
}

/// Estimate, error and effective-noise covariances for one `(C, P, T_τ)`.
#[derive(Clone, Debug)]
pub struct EstimatorStats {
    pub c_hat: SymMatrix,
    pub c_tilde: SymMatrix,
    pub v: SymMatrix,
}

impl EstimatorStats {
    pub fn compute(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<Self> {
        let c_tilde = error_covariance(stats, budget, plan)?;
        let c_hat = estimated_covariance(stats, budget, plan)?;
        let v = c_tilde.scale(budget.power()).add_identity(1.0);
        Ok(EstimatorStats { c_hat, c_tilde, v })
    }
}

/// `P·C + I/T_τ`, which is PD for every PSD `C` once `T_τ ≥ 1`.
pub fn training_gram(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<SymMatrix> {
    plan.require_training(budget)?;
    Ok(stats
        .c
        .scale(budget.power())
        .add_identity(1.0 / plan.t_tau as f64))
}

/// `C̃ = (1/T_τ)(P·C + I/T_τ)⁻¹·C`.
pub fn error_covariance(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<SymMatrix> {
    let gram = training_gram(stats, budget, plan)?;
    let x = solve_spd(&gram, stats.c.as_matrix())?;
    Ok(SymMatrix::symmetrize(x.scale(1.0 / plan.t_tau as f64)))
}

/// `Ĉ = P·C·(P·C + I/T_τ)⁻¹·C`.
pub fn estimated_covariance(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<SymMatrix> {
    let gram = training_gram(stats, budget, plan)?;
    let x = solve_spd(&gram, stats.c.as_matrix())?;
    let c_hat = stats.c.as_matrix().matmul(&x)?.scale(budget.power());
    Ok(SymMatrix::symmetrize(c_hat))
}

/// `V = I + P·C̃`.
pub fn effective_noise(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<SymMatrix> {
    Ok(error_covariance(stats, budget, plan)?
        .scale(budget.power())
        .add_identity(1.0))
}

/// Received pilot vectors and the pilot amplitude that produced them.
#[derive(Clone, Debug)]
pub struct TrainingObservation {
    pub y_list: Vec<Vec<f64>>,
    pub x_tau: f64,
}

impl TrainingObservation {
    pub fn t_tau(&self) -> usize {
        self.y_list.len()
    }
}

/// Linear MMSE receiver for a fixed `(C, P, T_τ)`: `Ĥ = G·ȳ` with
/// `G = x_τ·C·(P·C + I/T_τ)⁻¹`.
#[derive(Clone, Debug)]
pub struct MmseEstimator {
    gain: Matrix,
    x_tau: f64,
    t_tau: u64,
}

impl MmseEstimator {
    /// Pilot amplitude is `+√P`.
    pub fn new(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<Self> {
        Self::with_pilot(stats, budget, plan, budget.power().sqrt())
    }

    pub fn with_pilot(
        stats: &ChannelStats,
        budget: &LinkBudget,
        plan: &TrainingPlan,
        x_tau: f64,
    ) -> Result<Self> {
        let p = budget.power();
        if (x_tau * x_tau - p).abs() > 1e-12 * p {
            return Err(Error::InvalidConfig(format!(
                "pilot amplitude {x_tau} does not satisfy x_tau^2 = P = {p}"
            )));
        }
        let gram = training_gram(stats, budget, plan)?;
        // (A⁻¹C)ᵀ = C·A⁻¹ since both factors are symmetric.
        let gain = solve_spd(&gram, stats.c.as_matrix())?
            .transpose()
            .scale(x_tau);
        Ok(MmseEstimator {
            gain,
            x_tau,
            t_tau: plan.t_tau,
        })
    }

    pub fn pilot(&self) -> f64 {
        self.x_tau
    }

    pub fn gain(&self) -> &Matrix {
        &self.gain
    }

    /// Estimate from the already-averaged pilot observation `ȳ`.
    pub fn estimate_from_mean(&self, y_mean: &[f64]) -> Result<Vec<f64>> {
        self.gain.mul_vec(y_mean)
    }

    pub fn estimate(&self, obs: &TrainingObservation) -> Result<Vec<f64>> {
        if obs.y_list.len() as u64 != self.t_tau {
            return Err(Error::DimensionMismatch {
                expected: self.t_tau as usize,
                actual: obs.y_list.len(),
            });
        }
        let m = self.gain.rows();
        let mut mean = vec![0.0; m];
        for y in &obs.y_list {
            if y.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    actual: y.len(),
                });
            }
            for (acc, v) in mean.iter_mut().zip(y) {
                *acc += v;
            }
        }
        let n = obs.y_list.len() as f64;
        mean.iter_mut().for_each(|v| *v /= n);
        self.estimate_from_mean(&mean)
    }
}

/// `Ĥ = x_τ·C·(P·C + I/T_τ)⁻¹·ȳ` for one set of pilot observations.
pub fn mmse_estimate(stats: &ChannelStats, budget: &LinkBudget, obs: &TrainingObservation) -> Result<Vec<f64>> {
    if obs.y_list.is_empty() {
        return Err(Error::InvalidPlan {
            t_tau: 0,
            block_length: budget.block_length(),
            reason: "at least one training observation is required",
        });
    }
    let plan = TrainingPlan::new(obs.y_list.len() as u64);
    MmseEstimator::with_pilot(stats, budget, &plan, obs.x_tau)?.estimate(obs)
}

/// `C` is strictly PD (Cholesky succeeds at the default tolerance).
pub fn is_strictly_pd(stats: &ChannelStats) -> bool {
    cholesky(&stats.c).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(c: f64) -> ChannelStats {
        ChannelStats::new(SymMatrix::from_diagonal(&[c])).unwrap()
    }

    fn example_c() -> ChannelStats {
        ChannelStats::new(SymMatrix::from_rows(&[[0.7426, -0.7222], [-0.7222, 6.4075]]).unwrap()).unwrap()
    }

    fn rel_fro(a: &SymMatrix, b: &SymMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn scalar_unit_case() {
        let s = scalar(1.0);
        let b = LinkBudget::new(1.0, 10).unwrap();
        let p = TrainingPlan::new(1);
        assert!((error_covariance(&s, &b, &p).unwrap()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((estimated_covariance(&s, &b, &p).unwrap()[(0, 0)] - 0.5).abs() < 1e-14);
        assert!((effective_noise(&s, &b, &p).unwrap()[(0, 0)] - 1.5).abs() < 1e-14);
    }

    #[test]
    fn zero_training_rejected() {
        let s = scalar(1.0);
        let b = LinkBudget::new(1.0, 10).unwrap();
        let err = error_covariance(&s, &b, &TrainingPlan::new(0)).unwrap_err();
        assert!(matches!(err, Error::InvalidPlan { t_tau: 0, .. }));
        assert!(estimated_covariance(&s, &b, &TrainingPlan::new(0)).is_err());
        assert!(effective_noise(&s, &b, &TrainingPlan::new(0)).is_err());
    }

    #[test]
    fn long_training_removes_error() {
        let s = example_c();
        let b = LinkBudget::new(1.0, 10).unwrap();
        let ct = error_covariance(&s, &b, &TrainingPlan::new(1_000_000_000)).unwrap();
        assert!(ct.frobenius_norm() <= 1e-6 * s.covariance().frobenius_norm());
        let v = effective_noise(&s, &b, &TrainingPlan::new(1_000_000_000)).unwrap();
        assert!(rel_fro(&v, &SymMatrix::identity(2)) < 1e-8);
    }

    #[test]
    fn vanishing_power_keeps_prior() {
        let s = example_c();
        let b = LinkBudget::new(1e-12, 10).unwrap();
        let ct = error_covariance(&s, &b, &TrainingPlan::new(3)).unwrap();
        let c = s.covariance();
        for i in 0..2 {
            for j in 0..2 {
                assert!((ct[(i, j)] - c[(i, j)]).abs() <= 1e-9 * c[(i, j)].abs());
            }
        }
    }

    #[test]
    fn zero_power_estimate_is_zero() {
        let s = example_c();
        let b = LinkBudget::new(0.0, 10).unwrap();
        let ch = estimated_covariance(&s, &b, &TrainingPlan::new(4)).unwrap();
        assert_eq!(ch.frobenius_norm(), 0.0);
    }

    #[test]
    fn zero_channel_gives_identity_noise() {
        let s = ChannelStats::new(SymMatrix::zeros(3)).unwrap();
        let b = LinkBudget::new(5.0, 10).unwrap();
        let v = effective_noise(&s, &b, &TrainingPlan::new(2)).unwrap();
        assert_eq!(v, SymMatrix::identity(3));
    }

    #[test]
    fn decomposition_on_example() {
        let s = example_c();
        let b = LinkBudget::new(100.0, 100).unwrap();
        let e = EstimatorStats::compute(&s, &b, &TrainingPlan::new(4)).unwrap();
        let sum = e.c_hat.add(&e.c_tilde).unwrap();
        assert!(rel_fro(&sum, s.covariance()) <= 1e-12);
    }

    #[test]
    fn estimate_zero_observation() {
        let s = example_c();
        let b = LinkBudget::new(4.0, 10).unwrap();
        let obs = TrainingObservation {
            y_list: vec![vec![0.0, 0.0]; 3],
            x_tau: 2.0,
        };
        assert_eq!(mmse_estimate(&s, &b, &obs).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn estimate_noiseless_scalar_halves() {
        let s = scalar(1.0);
        let b = LinkBudget::new(1.0, 10).unwrap();
        let h = 0.8;
        let obs = TrainingObservation {
            y_list: vec![vec![h * 1.0]],
            x_tau: 1.0,
        };
        let est = mmse_estimate(&s, &b, &obs).unwrap();
        assert!((est[0] - h / 2.0).abs() < 1e-15);
    }

    #[test]
    fn estimate_rejects_bad_dimensions() {
        let s = example_c();
        let b = LinkBudget::new(1.0, 10).unwrap();
        let obs = TrainingObservation {
            y_list: vec![vec![0.0, 0.0, 1.0]],
            x_tau: 1.0,
        };
        assert!(matches!(
            mmse_estimate(&s, &b, &obs),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
    }

    #[test]
    fn estimate_rejects_wrong_pilot_amplitude() {
        let s = example_c();
        let b = LinkBudget::new(4.0, 10).unwrap();
        let obs = TrainingObservation {
            y_list: vec![vec![0.0, 0.0]],
            x_tau: 1.0,
        };
        assert!(matches!(mmse_estimate(&s, &b, &obs), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn budget_validation() {
        assert!(LinkBudget::new(-1.0, 10).is_err());
        assert!(LinkBudget::new(f64::NAN, 10).is_err());
        assert!(LinkBudget::new(1.0, 1).is_err());
        assert!(LinkBudget::new(0.0, 2).is_ok());
    }

    #[test]
    fn indefinite_channel_rejected() {
        let c = SymMatrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(ChannelStats::new(c), Err(Error::NotPsd { .. })));
    }
}
