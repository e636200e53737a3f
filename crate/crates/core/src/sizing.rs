//! Roulette-wheel capacity sizing.
//!
//! Each round: count how often each line's unconstrained flow exceeds its
//! rating, put every eligible line whose congestion frequency exceeds the
//! threshold on a wheel with area proportional to that frequency, spin the
//! wheel once per such line, and raise each line by `hits × ΔF`. Growth stops
//! when nothing eligible is congested, when the marginal expected-cost saving
//! per MW no longer exceeds the marginal investment per MW, or at the
//! iteration cap.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loadflow::FlowSolution;
use crate::network::ActiveNetwork;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CongestionStats {
    /// Congested-run count per network line.
    pub counts: Vec<usize>,
    pub runs: usize,
}

impl CongestionStats {
    pub fn new(lines: usize) -> Self {
        Self {
            counts: vec![0; lines],
            runs: 0,
        }
    }

    pub fn probability(&self, line: usize) -> f64 {
        if self.runs == 0 {
            0.0
        } else {
            self.counts[line] as f64 / self.runs as f64
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|j| self.probability(j)).collect()
    }

    pub fn merge(&mut self, other: &CongestionStats) {
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += o;
        }
        self.runs += other.runs;
    }
}

/// Records one retained run: a line is congested when |flow| > rating.
pub fn accumulate_congestion(stats: &mut CongestionStats, flows: &FlowSolution, network: &ActiveNetwork) {
    for ((count, line), f) in stats.counts.iter_mut().zip(network.lines()).zip(&flows.flows) {
        if line.in_service && f.abs() > line.capacity_mw {
            *count += 1;
        }
    }
    stats.runs += 1;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouletteWheel {
    /// `(line index, share)`; shares sum to 1.
    pub segments: Vec<(usize, f64)>,
}

impl RouletteWheel {
    /// Index into `segments` where a pointer at `u ∈ [0, 1)` stops.
    pub fn land(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (k, (_, share)) in self.segments.iter().enumerate() {
            acc += share;
            if u < acc {
                return k;
            }
        }
        self.segments.len() - 1
    }
}

/// Wheel over eligible lines with congestion probability strictly above
/// `threshold`.
pub fn build_wheel(stats: &CongestionStats, eligible: &[bool], threshold: f64) -> Result<RouletteWheel> {
    let picked: Vec<(usize, f64)> = stats
        .probabilities()
        .into_iter()
        .enumerate()
        .filter(|&(j, p)| eligible[j] && p > threshold)
        .collect();
    if picked.is_empty() {
        return Err(Error::NoEligibleLines);
    }
    let total: f64 = picked.iter().map(|(_, p)| p).sum();
    Ok(RouletteWheel {
        segments: picked.into_iter().map(|(j, p)| (j, p / total)).collect(),
    })
}

/// Spins once per segment. Returns the new capacities and per-line hit
/// counts `m_j`; each capacity becomes `F_j + m_j · ΔF`.
pub fn spin_and_update<R: Rng + ?Sized>(
    wheel: &RouletteWheel,
    rng: &mut R,
    capacities: &[f64],
    delta_f: f64,
) -> (Vec<f64>, Vec<usize>) {
    let mut hits = vec![0usize; capacities.len()];
    for _ in 0..wheel.segments.len() {
        let k = wheel.land(rng.random::<f64>());
        hits[wheel.segments[k].0] += 1;
    }
    let updated = capacities
        .iter()
        .zip(&hits)
        .map(|(&f, &m)| f + m as f64 * delta_f)
        .collect();
    (updated, hits)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingRecord {
    /// Σ line ratings, MW.
    pub network_capacity: f64,
    /// Expected cost, k$.
    pub ec: f64,
    /// Transmission investment, k$.
    pub t_inv: f64,
    pub mec: Option<f64>,
    pub mi: Option<f64>,
    /// Eligible lines above the congestion threshold at this capacity.
    pub congested_lines: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SizingTrace {
    pub records: Vec<SizingRecord>,
}

/// `(MEC, MI)` between the last two records, k$/MW.
pub fn marginal_quantities(trace: &SizingTrace) -> Result<(f64, f64)> {
    let [.., prev, last] = trace.records.as_slice() else {
        return Err(Error::TraceTooShort);
    };
    let d_f = last.network_capacity - prev.network_capacity;
    if d_f == 0.0 {
        return Err(Error::ZeroCapacityChange);
    }
    Ok(((last.ec - prev.ec) / d_f, (last.t_inv - prev.t_inv) / d_f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingConfig {
    /// Capacity step per wheel hit, MW.
    pub delta_f: f64,
    pub congestion_threshold: f64,
    pub max_iterations: usize,
}

impl Default for SizingConfig {
    fn default() -> Self {
        Self {
            delta_f: 5.0,
            congestion_threshold: 0.1,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// No eligible line above the congestion threshold.
    Uncongested,
    /// Marginal expected-cost saving fell to or below marginal investment.
    MarginalCrossing,
    IterationCap,
}

/// What the evaluator reports for one set of capacities.
#[derive(Debug, Clone)]
pub struct SizingEvaluation<T> {
    pub ec: f64,
    pub t_inv: f64,
    pub stats: CongestionStats,
    /// Anything else the caller wants back from the final iteration.
    pub detail: T,
}

#[derive(Debug, Clone)]
pub struct SizingOutcome<T> {
    pub capacities: Vec<f64>,
    pub trace: SizingTrace,
    pub stop: StopReason,
    /// Update rounds performed.
    pub iterations: usize,
    pub last: SizingEvaluation<T>,
}

/// Runs evaluate → stop checks → wheel → spin until a stopping rule fires.
/// Only lines flagged in `eligible` are ever resized.
pub fn sizing_loop<T, E, R>(
    initial: Vec<f64>,
    eligible: &[bool],
    config: &SizingConfig,
    rng: &mut R,
    network_capacity: impl Fn(&[f64]) -> f64,
    mut evaluate: E,
) -> Result<SizingOutcome<T>>
where
    E: FnMut(&[f64]) -> Result<SizingEvaluation<T>>,
    R: Rng + ?Sized,
{
    assert_eq!(initial.len(), eligible.len(), "one eligibility flag per line");
    if !(config.delta_f > 0.0) {
        return Err(Error::InvalidInput(format!("delta_f must be positive, got {}", config.delta_f)));
    }
    let mut capacities = initial;
    let mut trace = SizingTrace::default();
    let mut iterations = 0;
    loop {
        let eval = evaluate(&capacities)?;
        let congested_lines = eval
            .stats
            .probabilities()
            .iter()
            .zip(eligible)
            .filter(|(&p, &e)| e && p > config.congestion_threshold)
            .count();
        trace.records.push(SizingRecord {
            network_capacity: network_capacity(&capacities),
            ec: eval.ec,
            t_inv: eval.t_inv,
            mec: None,
            mi: None,
            congested_lines,
        });

        if trace.records.len() >= 2 {
            let (mec, mi) = marginal_quantities(&trace)?;
            let last = trace.records.last_mut().expect("just pushed");
            last.mec = Some(mec);
            last.mi = Some(mi);
        }
        let last = trace.records.last().expect("just pushed");
        let stop = if congested_lines == 0 {
            Some(StopReason::Uncongested)
        } else if matches!((last.mec, last.mi), (Some(mec), Some(mi)) if -mec <= mi) {
            Some(StopReason::MarginalCrossing)
        } else if iterations >= config.max_iterations {
            Some(StopReason::IterationCap)
        } else {
            None
        };
        if let Some(stop) = stop {
            return Ok(SizingOutcome {
                capacities,
                trace,
                stop,
                iterations,
                last: eval,
            });
        }

        let wheel = build_wheel(&eval.stats, eligible, config.congestion_threshold)?;
        capacities = spin_and_update(&wheel, rng, &capacities, config.delta_f).0;
        iterations += 1;
    }
}
