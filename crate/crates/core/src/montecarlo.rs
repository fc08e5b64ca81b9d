//! Seeded Monte Carlo checks of the estimator statistics and of the
//! equal-power optimality of the data covariance.
//!
//! # Random numbers
//!
//! All randomness comes from [`SimRng`]: xoshiro256++ seeded from a `u64`
//! through SplitMix64 (the reference seeding procedure of the xoshiro family).
//! Uniforms on `[0, 1)` take the top 53 bits of one `next_u64` output times
//! `2⁻⁵³`. Standard normals use the Marsaglia polar method: draw
//! `u, v = 2·U − 1` until `0 < s = u² + v² < 1`, return `u·√(−2 ln s / s)` and
//! keep `v·√(−2 ln s / s)` for the next call.
//!
//! Everything here runs on one thread, so a report depends only on its
//! configuration.

use rand_xoshiro::rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::capacity::{mutual_information_kronecker, InputSpectrum};
use crate::error::{Error, Result};
use crate::estimation::{error_covariance, ChannelStats, LinkBudget, MmseEstimator, TrainingPlan};
use crate::linalg::{cholesky, sym_eigen, LowerTriangularFactor, Matrix, SymMatrix};

/// Reproducible generator for every stochastic routine in the crate.
#[derive(Clone, Debug)]
pub struct SimRng {
    inner: Xoshiro256PlusPlus,
    spare_normal: Option<f64>,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        SimRng {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let mul = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * mul);
                return u * mul;
            }
        }
    }

    pub fn fill_standard_normal(&mut self, out: &mut [f64]) {
        for z in out {
            *z = self.standard_normal();
        }
    }
}

/// `L·z` with `z` a vector of independent standard normals.
pub fn sample_gaussian_vector(chol_factor: &LowerTriangularFactor, rng: &mut SimRng) -> Vec<f64> {
    let mut z = vec![0.0; chol_factor.dim()];
    rng.fill_standard_normal(&mut z);
    chol_factor.apply(&z)
}

/// Draws from `N(0, C)` through a square root `F` with `F·Fᵀ = C`: the
/// Cholesky factor when `C` is PD, otherwise `U·diag(√λ⁺)` from the
/// eigendecomposition.
#[derive(Clone, Debug)]
pub struct GaussianSampler {
    root: SamplerRoot,
}

#[derive(Clone, Debug)]
enum SamplerRoot {
    Cholesky(LowerTriangularFactor),
    Eigen(Matrix),
}

impl GaussianSampler {
    pub fn new(covariance: &SymMatrix) -> Result<Self> {
        if let Ok(l) = cholesky(covariance) {
            return Ok(GaussianSampler {
                root: SamplerRoot::Cholesky(l),
            });
        }
        let eig = sym_eigen(covariance)?;
        let mut root = eig.vectors;
        let n = covariance.dim();
        for j in 0..n {
            let scale = eig.values[j].max(0.0).sqrt();
            for i in 0..n {
                root[(i, j)] *= scale;
            }
        }
        Ok(GaussianSampler {
            root: SamplerRoot::Eigen(root),
        })
    }

    pub fn dim(&self) -> usize {
        match &self.root {
            SamplerRoot::Cholesky(l) => l.dim(),
            SamplerRoot::Eigen(r) => r.rows(),
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> Vec<f64> {
        match &self.root {
            SamplerRoot::Cholesky(l) => sample_gaussian_vector(l, rng),
            SamplerRoot::Eigen(r) => {
                let mut z = vec![0.0; r.cols()];
                rng.fill_standard_normal(&mut z);
                r.mul_vec(&z).expect("square root")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub seed: u64,
    pub num_trials: u64,
    pub stats: ChannelStats,
    pub budget: LinkBudget,
    pub plan: TrainingPlan,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimReport {
    pub seed: u64,
    pub num_trials: u64,
    pub t_tau: u64,
    pub power: f64,
    pub empirical_c_hat: SymMatrix,
    pub empirical_c_tilde: SymMatrix,
    pub analytic_c_tilde: SymMatrix,
    /// Estimate of `E[Ĥ·H̃ᵀ]`.
    pub cross_cov: Matrix,
    /// Standard error of each `cross_cov` entry.
    pub cross_cov_std_err: Matrix,
    pub frobenius_rel_err_c_tilde: f64,
}

/// Runs `num_trials` independent training phases. Each trial draws
/// `H ~ N(0, C)`, `T_τ` noise vectors `w(t) ~ N(0, I)`, forms
/// `y(t) = H·x_τ + w(t)`, estimates `Ĥ` and accumulates second moments of
/// `Ĥ` and `H̃ = H − Ĥ` about the known zero mean.
pub fn run_estimation_sim(config: &SimConfig) -> Result<SimReport> {
    if config.num_trials < 1 {
        return Err(Error::InvalidConfig("num_trials must be at least 1".into()));
    }
    let stats = &config.stats;
    let m = stats.antennas();
    let t_tau = config.plan.t_tau;
    let estimator = MmseEstimator::new(stats, &config.budget, &config.plan)?;
    let analytic_c_tilde = error_covariance(stats, &config.budget, &config.plan)?;
    let sampler = GaussianSampler::new(stats.covariance())?;
    let x_tau = estimator.pilot();

    let mut rng = SimRng::new(config.seed);
    let mut sum_hat = Matrix::zeros(m, m);
    let mut sum_tilde = Matrix::zeros(m, m);
    let mut sum_cross = Matrix::zeros(m, m);
    let mut sum_cross_sq = Matrix::zeros(m, m);
    let mut w = vec![0.0; m];
    let mut y_mean = vec![0.0; m];
    let mut h_tilde = vec![0.0; m];

    for _ in 0..config.num_trials {
        let h = sampler.sample(&mut rng);
        y_mean.iter_mut().for_each(|v| *v = 0.0);
        for _ in 0..t_tau {
            rng.fill_standard_normal(&mut w);
            for i in 0..m {
                y_mean[i] += h[i] * x_tau + w[i];
            }
        }
        y_mean.iter_mut().for_each(|v| *v /= t_tau as f64);
        let h_hat = estimator.estimate_from_mean(&y_mean)?;
        for i in 0..m {
            h_tilde[i] = h[i] - h_hat[i];
        }
        for i in 0..m {
            for j in 0..m {
                sum_hat[(i, j)] += h_hat[i] * h_hat[j];
                sum_tilde[(i, j)] += h_tilde[i] * h_tilde[j];
                let z = h_hat[i] * h_tilde[j];
                sum_cross[(i, j)] += z;
                sum_cross_sq[(i, j)] += z * z;
            }
        }
    }

    let n = config.num_trials as f64;
    let empirical_c_hat = SymMatrix::symmetrize(sum_hat.scale(1.0 / n));
    let empirical_c_tilde = SymMatrix::symmetrize(sum_tilde.scale(1.0 / n));
    let cross_cov = sum_cross.scale(1.0 / n);
    let mut cross_cov_std_err = Matrix::zeros(m, m);
    if config.num_trials > 1 {
        for i in 0..m {
            for j in 0..m {
                let mean = cross_cov[(i, j)];
                let var = (sum_cross_sq[(i, j)] - n * mean * mean) / (n - 1.0);
                cross_cov_std_err[(i, j)] = (var.max(0.0) / n).sqrt();
            }
        }
    }
    let diff = empirical_c_tilde.sub(&analytic_c_tilde)?.frobenius_norm();
    let norm = analytic_c_tilde.frobenius_norm();
    let frobenius_rel_err_c_tilde = if norm > 0.0 { diff / norm } else { diff };

    Ok(SimReport {
        seed: config.seed,
        num_trials: config.num_trials,
        t_tau,
        power: config.budget.power(),
        empirical_c_hat,
        empirical_c_tilde,
        analytic_c_tilde,
        cross_cov,
        cross_cov_std_err,
        frobenius_rel_err_c_tilde,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleOutcome {
    pub max_random_mi: f64,
    pub equal_power_mi: f64,
    pub spectra_evaluated: u64,
}

impl OracleOutcome {
    /// No sampled spectrum beat equal power by more than `tolerance`.
    pub fn equal_power_dominates(&self, tolerance: f64) -> bool {
        self.max_random_mi <= self.equal_power_mi + tolerance
    }
}

/// Scales nonnegative draws so they sum to `total`.
pub fn normalize_spectrum(draws: &[f64], total: f64) -> Result<InputSpectrum> {
    let sum: f64 = draws.iter().sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(Error::InvalidConfig("spectrum draws sum to zero".into()));
    }
    InputSpectrum::new(draws.iter().map(|d| d * total / sum).collect())
}

/// Brute-force check that no trace-constrained data spectrum beats equal
/// power: draws `num_spectra` spectra of `t_d` uniforms normalized to sum
/// `t_d·P` and reports the best mutual information found.
pub fn amgm_oracle(
    stats: &ChannelStats,
    c_tilde: &SymMatrix,
    power: f64,
    t_d: usize,
    num_spectra: u64,
    rng: &mut SimRng,
) -> Result<OracleOutcome> {
    if t_d < 2 {
        return Err(Error::InvalidConfig("oracle needs at least two data symbols".into()));
    }
    if num_spectra < 1 {
        return Err(Error::InvalidConfig("oracle needs at least one spectrum".into()));
    }
    let total = t_d as f64 * power;
    let equal_power_mi =
        mutual_information_kronecker(&InputSpectrum::equal_power(t_d, power)?, stats, c_tilde)?;
    let mut max_random_mi = f64::NEG_INFINITY;
    let mut draws = vec![0.0; t_d];
    for _ in 0..num_spectra {
        let spectrum = loop {
            draws.iter_mut().for_each(|d| *d = rng.uniform());
            if let Ok(s) = normalize_spectrum(&draws, total) {
                break s;
            }
        };
        let mi = mutual_information_kronecker(&spectrum, stats, c_tilde)?;
        max_random_mi = max_random_mi.max(mi);
    }
    Ok(OracleOutcome {
        max_random_mi,
        equal_power_mi,
        spectra_evaluated: num_spectra,
    })
}
