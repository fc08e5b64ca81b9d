//! Worst-case capacity of the training-based SIMO block, in bits.
//!
//! With `T_τ` pilots and `T_d = T − T_τ` data symbols at full power `P`:
//!
//! ```text
//! 𝒞(T_τ) = T_d · ( log₂ det(P·C + I) − log₂ det(P·C̃ + I) )
//! ```
//!
//! The general form for a data covariance `X_d` with eigenvalues `σ_i` is
//!
//! ```text
//! I = log₂ det(X_d ⊗ C + I) − log₂ det(X_d ⊗ C̃ + I)
//!   = Σ_i Σ_j [ log₂(1 + σ_i·λ_j(C)) − log₂(1 + σ_i·λ_j(C̃)) ]
//! ```
//!
//! and the constant spectrum `σ_i = P` maximizes it under `Σ σ_i = T_d·P`.
//!
//! The log-determinants carry no ½ factor even though `H` is real-valued;
//! values match the closed form above verbatim.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{error_covariance, ChannelStats, LinkBudget, TrainingPlan};
use crate::linalg::{cholesky, log_det, sym_eigen, SymMatrix};

/// Largest `T_d·m` for which the Kronecker form is materialized.
pub const MAX_DIRECT_KRONECKER_DIM: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CapacityValue {
    /// `-∞` at `T_τ = 0`.
    pub bits_per_block: f64,
    pub bits_per_symbol: f64,
}

impl CapacityValue {
    fn new(bits_per_block: f64, budget: &LinkBudget) -> Self {
        CapacityValue {
            bits_per_block,
            bits_per_symbol: bits_per_block / budget.block_length() as f64,
        }
    }
}

/// The two log-determinant terms of the capacity, per data symbol, in bits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogTerms {
    /// `log₂ det(P·C + I)` (or its high-power stand-in `log₂ det(P·C)`).
    pub signal: f64,
    /// `log₂ det(P·C̃ + I)` (or `m·log₂(1 + 1/T_τ)`).
    pub error: f64,
}

impl LogTerms {
    pub fn gap(&self) -> f64 {
        self.signal - self.error
    }
}

fn check_plan_range(plan: &TrainingPlan, budget: &LinkBudget) -> Result<()> {
    if plan.t_tau > budget.block_length() {
        return Err(Error::InvalidPlan {
            t_tau: plan.t_tau as i64,
            block_length: budget.block_length(),
            reason: "more training symbols than the block holds",
        });
    }
    Ok(())
}

/// Exact per-data-symbol log terms for `1 ≤ T_τ`.
pub fn capacity_log_terms(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<LogTerms> {
    let p = budget.power();
    let c_tilde = error_covariance(stats, budget, plan)?;
    let signal = log_det(&stats.covariance().scale(p).add_identity(1.0))? / LN_2;
    let error = log_det(&c_tilde.scale(p).add_identity(1.0))? / LN_2;
    Ok(LogTerms { signal, error })
}

/// Worst-case capacity for `0 ≤ T_τ ≤ T`.
///
/// `T_τ = T` is exactly zero and `T_τ = 0` is `-∞` (no channel knowledge).
pub fn capacity(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<CapacityValue> {
    check_plan_range(plan, budget)?;
    if plan.t_tau == 0 {
        return Ok(CapacityValue::new(f64::NEG_INFINITY, budget));
    }
    if plan.t_tau == budget.block_length() {
        return Ok(CapacityValue::new(0.0, budget));
    }
    let terms = capacity_log_terms(stats, budget, plan)?;
    let t_d = plan.data_symbols(budget) as f64;
    Ok(CapacityValue::new(t_d * terms.gap(), budget))
}

/// Eigenvalues `σ_1..σ_{T_d}` of the data-symbol covariance `X_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputSpectrum {
    sigmas: Vec<f64>,
}

impl InputSpectrum {
    pub fn new(sigmas: Vec<f64>) -> Result<Self> {
        if sigmas.is_empty() {
            return Err(Error::InvalidConfig("input spectrum is empty".into()));
        }
        if let Some(bad) = sigmas.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::InvalidConfig(format!(
                "input spectrum entries must be finite and non-negative, got {bad}"
            )));
        }
        Ok(InputSpectrum { sigmas })
    }

    /// Every data symbol at power `power`.
    pub fn equal_power(t_d: usize, power: f64) -> Result<Self> {
        Self::new(vec![power; t_d])
    }

    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn total_power(&self) -> f64 {
        self.sigmas.iter().sum()
    }
}

fn check_error_dim(stats: &ChannelStats, c_tilde: &SymMatrix) -> Result<()> {
    if c_tilde.dim() != stats.antennas() {
        return Err(Error::DimensionMismatch {
            expected: stats.antennas(),
            actual: c_tilde.dim(),
        });
    }
    Ok(())
}

/// Mutual information between Gaussian data and output through the spectral
/// form, in bits.
pub fn mutual_information_kronecker(
    spectrum: &InputSpectrum,
    stats: &ChannelStats,
    c_tilde: &SymMatrix,
) -> Result<f64> {
    check_error_dim(stats, c_tilde)?;
    let channel = sym_eigen(stats.covariance())?.values;
    let error = sym_eigen(c_tilde)?.values;
    let mut nats = 0.0;
    for &sigma in spectrum.sigmas() {
        for (&lc, &le) in channel.iter().zip(&error) {
            nats += (sigma * lc).ln_1p() - (sigma * le).ln_1p();
        }
    }
    Ok(nats / LN_2)
}

/// Spectral mutual information for a full data covariance `X_d`.
pub fn mutual_information_input_covariance(
    x_d: &SymMatrix,
    stats: &ChannelStats,
    c_tilde: &SymMatrix,
) -> Result<f64> {
    let eig = sym_eigen(x_d)?;
    let tol = x_d.default_pd_tolerance();
    if eig.min_value() < -tol {
        return Err(Error::NotPsd {
            min_eigenvalue: eig.min_value(),
            tolerance: tol,
        });
    }
    let sigmas = eig.values.into_iter().map(|s| s.max(0.0)).collect();
    mutual_information_kronecker(&InputSpectrum::new(sigmas)?, stats, c_tilde)
}

/// `log₂ det(X_d ⊗ C + I) − log₂ det(X_d ⊗ C̃ + I)` with both Kronecker
/// products materialized. Limited to `T_d·m ≤` [`MAX_DIRECT_KRONECKER_DIM`].
pub fn mutual_information_kronecker_direct(
    x_d: &SymMatrix,
    stats: &ChannelStats,
    c_tilde: &SymMatrix,
) -> Result<f64> {
    check_error_dim(stats, c_tilde)?;
    let n = x_d.dim() * stats.antennas();
    if n > MAX_DIRECT_KRONECKER_DIM {
        return Err(Error::InvalidConfig(format!(
            "direct Kronecker form limited to T_d*m <= {MAX_DIRECT_KRONECKER_DIM}, got {n}"
        )));
    }
    let x = x_d.as_matrix();
    let signal = SymMatrix::symmetrize(x.kron(stats.covariance().as_matrix())).add_identity(1.0);
    let error = SymMatrix::symmetrize(x.kron(c_tilde.as_matrix())).add_identity(1.0);
    Ok((log_det(&signal)? - log_det(&error)?) / LN_2)
}

/// High-power log terms `log₂ det(P·C)` and `m·log₂(1 + 1/T_τ)`.
pub fn high_power_log_terms(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<LogTerms> {
    check_plan_range(plan, budget)?;
    if plan.t_tau == 0 {
        return Err(Error::InvalidPlan {
            t_tau: 0,
            block_length: budget.block_length(),
            reason: "at least one training symbol is required",
        });
    }
    let scaled = stats.covariance().scale(budget.power());
    let signal = cholesky(&scaled)?.log_det() / LN_2;
    let m = stats.antennas() as f64;
    let error = m * (1.0 / plan.t_tau as f64).ln_1p() / LN_2;
    Ok(LogTerms { signal, error })
}

/// `(T − T_τ)(log₂ det(P·C) − m·log₂(1/T_τ + 1))`. Needs strictly PD `C`.
pub fn capacity_high_power_approx(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<f64> {
    let terms = high_power_log_terms(stats, budget, plan)?;
    Ok(plan.data_symbols(budget) as f64 * terms.gap())
}

/// `‖C̃ − C‖_F / ‖C‖_F`: 0 when training has taught nothing, 1 when `C̃ = 0`.
pub fn error_floor_low_power(stats: &ChannelStats, budget: &LinkBudget, plan: &TrainingPlan) -> Result<f64> {
    let c = stats.covariance();
    let c_tilde = error_covariance(stats, budget, plan)?;
    let norm = c.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(c_tilde.sub(c)?.frobenius_norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference;

    fn scalar(c: f64) -> ChannelStats {
        ChannelStats::new(SymMatrix::from_diagonal(&[c])).unwrap()
    }

    #[test]
    fn boundaries() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(100.0, 100).unwrap();
        let full = capacity(&s, &b, &TrainingPlan::new(100)).unwrap();
        assert_eq!(full.bits_per_block, 0.0);
        assert!(full.bits_per_block.is_sign_positive());
        let none = capacity(&s, &b, &TrainingPlan::new(0)).unwrap();
        assert_eq!(none.bits_per_block, f64::NEG_INFINITY);
        assert!(matches!(
            capacity(&s, &b, &TrainingPlan::new(101)),
            Err(Error::InvalidPlan { t_tau: 101, .. })
        ));
    }

    #[test]
    fn scalar_closed_form() {
        let v = capacity(&scalar(1.0), &LinkBudget::new(1.0, 10).unwrap(), &TrainingPlan::new(1)).unwrap();
        // 9·(1 − log₂ 1.5), 40-digit reference
        assert!((v.bits_per_block - 3.735_337_493_509_594_4).abs() < 1e-12);
        assert!((v.bits_per_symbol - 0.373_533_749_350_959_44).abs() < 1e-13);
    }

    #[test]
    fn zero_channel_has_zero_capacity() {
        let s = ChannelStats::new(SymMatrix::zeros(3)).unwrap();
        let b = LinkBudget::new(10.0, 20).unwrap();
        for t in 1..=20 {
            assert_eq!(capacity(&s, &b, &TrainingPlan::new(t)).unwrap().bits_per_block, 0.0);
        }
    }

    #[test]
    fn equal_power_spectrum_matches_capacity() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(100.0, 100).unwrap();
        let plan = TrainingPlan::new(4);
        let ct = error_covariance(&s, &b, &plan).unwrap();
        let spec = InputSpectrum::equal_power(96, 100.0).unwrap();
        let mi = mutual_information_kronecker(&spec, &s, &ct).unwrap();
        let cap = capacity(&s, &b, &plan).unwrap().bits_per_block;
        assert!((mi - cap).abs() <= 1e-9 * cap.abs().max(1.0));
    }

    #[test]
    fn zero_spectrum_has_zero_information() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(1.0, 10).unwrap();
        let ct = error_covariance(&s, &b, &TrainingPlan::new(2)).unwrap();
        let spec = InputSpectrum::new(vec![0.0; 8]).unwrap();
        assert_eq!(mutual_information_kronecker(&spec, &s, &ct).unwrap(), 0.0);
    }

    #[test]
    fn direct_kronecker_agrees_with_spectral() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(3.0, 10).unwrap();
        let ct = error_covariance(&s, &b, &TrainingPlan::new(2)).unwrap();
        let x = SymMatrix::from_rows(&[[2.0, 0.5, 0.1], [0.5, 3.0, -0.4], [0.1, -0.4, 4.0]]).unwrap();
        let direct = mutual_information_kronecker_direct(&x, &s, &ct).unwrap();
        let spectral = mutual_information_input_covariance(&x, &s, &ct).unwrap();
        assert!((direct - spectral).abs() < 1e-9);
    }

    #[test]
    fn direct_kronecker_size_limit() {
        let s = reference::ten_antenna();
        let ct = s.covariance().scale(0.1);
        let x = SymMatrix::identity(7);
        assert!(matches!(
            mutual_information_kronecker_direct(&x, &s, &ct),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn spectrum_dimension_mismatch() {
        let s = reference::two_antenna();
        let spec = InputSpectrum::equal_power(3, 1.0).unwrap();
        assert!(matches!(
            mutual_information_kronecker(&spec, &s, &SymMatrix::identity(3)),
            Err(Error::DimensionMismatch { expected: 2, actual: 3 })
        ));
        assert!(InputSpectrum::new(vec![1.0, -0.5]).is_err());
    }

    #[test]
    fn high_power_scalar() {
        let v = capacity_high_power_approx(&scalar(1.0), &LinkBudget::new(1e6, 10).unwrap(), &TrainingPlan::new(1))
            .unwrap();
        let expected = 9.0 * (1e6f64.log2() - 1.0);
        assert!((v - expected).abs() < 1e-9);
        assert!((v - 170.39).abs() < 0.01);
    }

    #[test]
    fn high_power_needs_definite_channel() {
        let s = ChannelStats::new(SymMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let b = LinkBudget::new(1e6, 10).unwrap();
        assert!(matches!(
            capacity_high_power_approx(&s, &b, &TrainingPlan::new(1)),
            Err(Error::NotPositiveDefinite { .. })
        ));
        // the exact formula is still fine
        assert!(capacity(&s, &b, &TrainingPlan::new(1)).unwrap().bits_per_block > 0.0);
    }

    #[test]
    fn high_power_terms_close_to_exact() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(1e6, 100).unwrap();
        for t in [1, 2, 4, 10, 50, 99] {
            let plan = TrainingPlan::new(t);
            let exact = capacity_log_terms(&s, &b, &plan).unwrap();
            let approx = high_power_log_terms(&s, &b, &plan).unwrap();
            assert!((approx.signal - exact.signal).abs() <= 0.01 * exact.signal.abs());
            assert!((approx.error - exact.error).abs() <= 0.01 * exact.error.abs());
        }
    }

    #[test]
    fn high_power_error_shrinks_with_power() {
        let s = reference::two_antenna();
        let plan = TrainingPlan::new(4);
        let err = |p: f64| {
            let b = LinkBudget::new(p, 100).unwrap();
            (capacity_high_power_approx(&s, &b, &plan).unwrap() - capacity(&s, &b, &plan).unwrap().bits_per_block)
                .abs()
        };
        assert!(err(1e4) > err(1e6));
    }

    #[test]
    fn error_floor_cases() {
        let s = reference::two_antenna();
        let b = LinkBudget::new(1e-12, 100).unwrap();
        assert!(error_floor_low_power(&s, &b, &TrainingPlan::new(1)).unwrap() <= 1e-9);

        let b = LinkBudget::new(1e6, 100).unwrap();
        let far = error_floor_low_power(&s, &b, &TrainingPlan::new(1_000_000)).unwrap();
        assert!(far > 1.0 - 1e-9 && far <= 1.0);

        let f = error_floor_low_power(&scalar(1.0), &LinkBudget::new(1.0, 10).unwrap(), &TrainingPlan::new(1)).unwrap();
        assert_eq!(f, 0.5);
    }
}
