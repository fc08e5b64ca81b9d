//! Exhaustive search for the capacity-maximizing number of pilots.
//!
//! Every integer `T_τ ∈ [1, T]` is evaluated; the curve is not assumed to be
//! unimodal. Ties within `1e-12·|max|` resolve to the smaller `T_τ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{capacity, capacity_high_power_approx};
use crate::error::{Error, Result};
use crate::estimation::{ChannelStats, LinkBudget, TrainingPlan};

pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t_tau: u64,
    pub bits_per_block: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityCurve {
    pub block_length: u64,
    pub entries: Vec<CurvePoint>,
    pub argmax_t_tau: u64,
    pub max_bits: f64,
}

impl CapacityCurve {
    /// Builds the curve and its summary from entries in ascending `t_tau` order.
    pub fn from_entries(block_length: u64, entries: Vec<CurvePoint>) -> Result<Self> {
        let values: Vec<f64> = entries.iter().map(|e| e.bits_per_block).collect();
        let (idx, max_bits) = argmax_with_ties(&values)
            .ok_or_else(|| Error::InvalidConfig("capacity curve is empty".into()))?;
        Ok(CapacityCurve {
            block_length,
            argmax_t_tau: entries[idx].t_tau,
            max_bits,
            entries,
        })
    }

    pub fn bits_per_symbol(&self, point: &CurvePoint) -> f64 {
        point.bits_per_block / self.block_length as f64
    }
}

/// Index of the first value within `TIE_TOLERANCE·|max|` of the maximum, and
/// the maximum itself. NaNs are never selected.
pub fn argmax_with_ties(values: &[f64]) -> Option<(usize, f64)> {
    let max = values
        .iter()
        .copied()
        .filter(|v| !v.is_nan())
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))?;
    let floor = max - TIE_TOLERANCE * max.abs();
    let idx = values.iter().position(|&v| v >= floor)?;
    Some((idx, max))
}

/// Capacity at every `T_τ ∈ [1, T]`, evaluated in parallel and assembled in
/// ascending order.
pub fn sweep(stats: &ChannelStats, budget: &LinkBudget) -> Result<CapacityCurve> {
    let entries = (1..=budget.block_length())
        .into_par_iter()
        .map(|t_tau| {
            capacity(stats, budget, &TrainingPlan::new(t_tau)).map(|v| CurvePoint {
                t_tau,
                bits_per_block: v.bits_per_block,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    CapacityCurve::from_entries(budget.block_length(), entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticReport {
    pub argmax_exact: u64,
    pub argmax_high_p_approx: u64,
    pub high_p_agreement: bool,
}

/// Compares the exact optimum against the optimum of the high-power
/// approximation, both found exhaustively.
pub fn asymptotic_report(stats: &ChannelStats, budget: &LinkBudget) -> Result<AsymptoticReport> {
    let exact = sweep(stats, budget)?.argmax_t_tau;
    let approx_values = (1..=budget.block_length())
        .into_par_iter()
        .map(|t| capacity_high_power_approx(stats, budget, &TrainingPlan::new(t)))
        .collect::<Result<Vec<_>>>()?;
    let (idx, _) = argmax_with_ties(&approx_values).expect("nonempty sweep");
    let approx = idx as u64 + 1;
    Ok(AsymptoticReport {
        argmax_exact: exact,
        argmax_high_p_approx: approx,
        high_p_agreement: exact == approx,
    })
}

/// Optimal `T_τ` for each power in a strictly ascending list.
pub fn argmax_trend(stats: &ChannelStats, budget: &LinkBudget, powers: &[f64]) -> Result<Vec<(f64, u64)>> {
    if powers.is_empty() {
        return Err(Error::InvalidConfig("power list is empty".into()));
    }
    if powers.iter().any(|p| p.is_nan() || *p <= 0.0) {
        return Err(Error::InvalidConfig("powers must be positive".into()));
    }
    if powers.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("powers must be strictly ascending".into()));
    }
    powers
        .iter()
        .map(|&p| Ok((p, sweep(stats, &budget.with_power(p)?)?.argmax_t_tau)))
        .collect()
}
