//! Fitness of one chromosome: build its network, prepare every
//! (scenario, contingency) flow solution once, then run the sizing loop,
//! re-assessing the cached flows against each new set of ratings.
//!
//! Flows ignore ratings, so only the nodal accounting depends on capacity.
//! Each Monte Carlo slot keeps the admissible states it has drawn so far; an
//! evaluation walks them in order and takes the first one that is valid at
//! the current ratings, drawing more on demand. That is plain rejection
//! sampling from a fixed per-slot stream, so results do not depend on how
//! many sizing rounds came before.

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EvalConfig, UpgradePolicy};
use crate::adequacy::{AdequacySample, ExpectationReport};
use crate::contingency::{ContingencyMode, ContingencyModel, OutageState};
use crate::cost::{self, CostBreakdown};
use crate::dispatch::{merit_order_dispatch, select_slack, DispatchResult};
use crate::error::{Error, Result};
use crate::loadflow::{solve, FlowSolution};
use crate::network::{apply_plan, scenario_demand, ActiveNetwork, Chromosome, GeneratorSpec, LineStatus, NetworkCase, MONTHS};
use crate::rng::{self, TAG_SAMPLES, TAG_SPIN};
use crate::sizing::{accumulate_congestion, sizing_loop, CongestionStats, SizingEvaluation, SizingTrace, StopReason};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineOutcome {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    pub status: LineStatus,
    pub length_km: f64,
    pub base_capacity_mw: f64,
    pub capacity_mw: f64,
    pub congestion_probability: f64,
}

fn line_outcomes(network: &ActiveNetwork, congestion: Option<&[f64]>) -> Vec<LineOutcome> {
    network
        .lines()
        .iter()
        .enumerate()
        .map(|(j, l)| LineOutcome {
            id: l.id,
            from_bus: l.from as u32 + 1,
            to_bus: l.to as u32 + 1,
            status: l.status,
            length_km: l.length_km,
            base_capacity_mw: l.base_capacity_mw,
            capacity_mw: l.capacity_mw,
            congestion_probability: congestion.map_or(0.0, |c| c[j]),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingSummary {
    pub stop: StopReason,
    pub iterations: usize,
    pub trace: SizingTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitnessRecord {
    pub chromosome: Chromosome,
    pub feasible: bool,
    /// Why an infeasible chromosome was rejected.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub lines: Vec<LineOutcome>,
    pub breakdown: Option<CostBreakdown>,
    pub expectations: Option<ExpectationReport>,
    pub sizing: Option<SizingSummary>,
    /// Draws discarded (islanding, too few units, invalid) at the final ratings.
    pub rejected_draws: usize,
}

impl FitnessRecord {
    pub fn infeasible(chromosome: Chromosome, note: impl Into<String>, lines: Vec<LineOutcome>) -> Self {
        Self {
            chromosome,
            feasible: false,
            note: Some(note.into()),
            lines,
            breakdown: None,
            expectations: None,
            sizing: None,
            rejected_draws: 0,
        }
    }

    /// Objective in k$; `+∞` when infeasible.
    pub fn j(&self) -> f64 {
        self.breakdown.map_or(f64::INFINITY, |b| b.j)
    }
}

/// One-shot adequacy figures for a fixed network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyAssessment {
    pub mode: ContingencyMode,
    pub lines: Vec<LineOutcome>,
    pub expectations: ExpectationReport,
    pub breakdown: CostBreakdown,
    pub retained_samples: usize,
    pub rejected_draws: usize,
}

struct Scenario {
    month: u32,
    demand: Vec<f64>,
    total: f64,
}

/// Everything about a sampled state that does not depend on ratings.
struct Prepared {
    flows: FlowSolution,
    served: Vec<f64>,
    curtailed: Vec<f64>,
    generation: Vec<f64>,
    ego: BTreeMap<u32, f64>,
    /// Raw draws consumed by the slot up to and including this state.
    draws: usize,
}

struct Slot {
    scenario: usize,
    rng: Option<ChaCha8Rng>,
    states: Vec<Prepared>,
    draws: usize,
}

/// Result of assessing one set of ratings.
struct Assessment {
    expectations: ExpectationReport,
    stats: CongestionStats,
    edns_cost: f64,
    egns_cost: f64,
    ewl_cost: f64,
    t_inv: f64,
    retained: usize,
    rejected: usize,
}

impl Assessment {
    fn ec(&self) -> f64 {
        self.edns_cost + self.egns_cost + self.ewl_cost
    }
}

pub struct Evaluator<'a> {
    case: &'a NetworkCase,
    config: EvalConfig,
    scenarios: Vec<Scenario>,
    g_inv: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(case: &'a NetworkCase, config: EvalConfig) -> Result<Self> {
        if config.sampler.mode == ContingencyMode::Mcs && config.sampler.n_mcs == 0 {
            return Err(Error::InvalidInput("n_mcs must be at least 1".into()));
        }
        let months: Vec<u32> = match config.sampler.mode {
            ContingencyMode::Mcs => (1..=MONTHS as u32).collect(),
            ContingencyMode::N1 | ContingencyMode::N2 => vec![case.peak_month()],
        };
        let scenarios = months
            .into_iter()
            .map(|month| {
                let demand = scenario_demand(case, month)?;
                let total = demand.iter().sum();
                Ok(Scenario { month, demand, total })
            })
            .collect::<Result<Vec<_>>>()?;
        let g_inv = cost::generation_investment(case, &base_dispatch(case)?);
        Ok(Self {
            case,
            config,
            scenarios,
            g_inv,
        })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.config
    }

    /// Generation investment, identical for every chromosome, k$.
    pub fn generation_investment(&self) -> f64 {
        self.g_inv
    }

    fn eligible(&self, network: &ActiveNetwork) -> Vec<bool> {
        network
            .lines()
            .iter()
            .map(|l| self.config.policy == UpgradePolicy::Wel || l.status == LineStatus::Candidate)
            .collect()
    }

    /// Reason the intact network cannot be operated, if any.
    fn intact_problem(&self, network: &ActiveNetwork) -> Option<String> {
        let model = ContingencyModel::new(self.case, network);
        let intact = OutageState::intact();
        if model.online_count(&intact) < model.min_online {
            Some("fewer generators than the minimum online".into())
        } else if model.is_islanded(&intact) {
            Some("intact network leaves a demand or generator bus unconnected".into())
        } else {
            None
        }
    }

    /// Sizes the chromosome's network and prices the result. Chromosomes
    /// whose intact network is disconnected come back infeasible.
    pub fn evaluate(&self, chromosome: &Chromosome) -> Result<FitnessRecord> {
        let network = apply_plan(self.case, chromosome)?;
        if let Some(problem) = self.intact_problem(&network) {
            return Ok(FitnessRecord::infeasible(
                chromosome.clone(),
                problem,
                line_outcomes(&network, None),
            ));
        }
        let key = rng::bits_key(&chromosome.bits);
        let mut bank = self.bank(&network, key)?;
        let eligible = self.eligible(&network);
        let mut spin = rng::stream(self.config.sampler.seed, &[TAG_SPIN, key], 0);
        let outcome = sizing_loop(
            network.capacities(),
            &eligible,
            &self.config.sizing,
            &mut spin,
            |c| c.iter().sum(),
            |caps| {
                let a = self.assess_with(&mut bank, &network.with_capacities(caps))?;
                Ok(SizingEvaluation {
                    ec: a.ec(),
                    t_inv: a.t_inv,
                    stats: a.stats.clone(),
                    detail: a,
                })
            },
        )?;
        let sized = network.with_capacities(&outcome.capacities);
        let a = outcome.last.detail;
        Ok(FitnessRecord {
            chromosome: chromosome.clone(),
            feasible: true,
            note: None,
            lines: line_outcomes(&sized, Some(&a.stats.probabilities())),
            breakdown: Some(cost::objective(a.edns_cost, a.egns_cost, a.ewl_cost, a.t_inv, self.g_inv)),
            expectations: Some(a.expectations),
            sizing: Some(SizingSummary {
                stop: outcome.stop,
                iterations: outcome.iterations,
                trace: outcome.trace,
            }),
            rejected_draws: a.rejected,
        })
    }

    /// Like [`Evaluator::evaluate`], but any runtime failure (for example an
    /// exhausted resample budget) also yields an infeasible record.
    pub fn evaluate_or_infeasible(&self, chromosome: &Chromosome) -> Result<FitnessRecord> {
        match self.evaluate(chromosome) {
            Ok(r) => Ok(r),
            Err(e @ Error::ChromosomeLength { .. }) => Err(e),
            Err(e) => {
                log::debug!("chromosome {chromosome} infeasible: {e}");
                let lines = apply_plan(self.case, chromosome)
                    .map(|n| line_outcomes(&n, None))
                    .unwrap_or_default();
                Ok(FitnessRecord::infeasible(chromosome.clone(), e.to_string(), lines))
            }
        }
    }

    /// Adequacy of the chromosome's network at fixed ratings (its base
    /// ratings unless `capacities` is given), without sizing.
    pub fn assess(&self, chromosome: &Chromosome, capacities: Option<&[f64]>) -> Result<AdequacyAssessment> {
        let mut network = apply_plan(self.case, chromosome)?;
        if let Some(caps) = capacities {
            if caps.len() != network.lines().len() {
                return Err(Error::InvalidInput(format!(
                    "{} capacities for {} lines",
                    caps.len(),
                    network.lines().len()
                )));
            }
            network = network.with_capacities(caps);
        }
        if let Some(problem) = self.intact_problem(&network) {
            return Err(Error::InvalidInput(problem));
        }
        let mut bank = self.bank(&network, rng::bits_key(&chromosome.bits))?;
        let a = self.assess_with(&mut bank, &network)?;
        let probabilities = a.stats.probabilities();
        Ok(AdequacyAssessment {
            mode: self.config.sampler.mode,
            lines: line_outcomes(&network, Some(&probabilities)),
            breakdown: cost::objective(a.edns_cost, a.egns_cost, a.ewl_cost, a.t_inv, self.g_inv),
            expectations: a.expectations,
            retained_samples: a.retained,
            rejected_draws: a.rejected,
        })
    }

    fn bank(&self, network: &ActiveNetwork, key: u64) -> Result<Vec<Slot>> {
        let sampler = &self.config.sampler;
        match sampler.mode {
            ContingencyMode::Mcs => Ok((0..self.scenarios.len())
                .flat_map(|s| {
                    let month = u64::from(self.scenarios[s].month);
                    (0..sampler.n_mcs).map(move |k| Slot {
                        scenario: s,
                        rng: Some(rng::stream(sampler.seed, &[TAG_SAMPLES, key, month], k as u64)),
                        states: Vec::new(),
                        draws: 0,
                    })
                })
                .collect()),
            mode => {
                let model = ContingencyModel::new(self.case, network);
                let states = model.enumerate(mode);
                if states.is_empty() {
                    return Err(Error::NoAdmissibleStates);
                }
                states
                    .iter()
                    .map(|state| {
                        Ok(Slot {
                            scenario: 0,
                            rng: None,
                            states: vec![self.prepare(network, state, &self.scenarios[0], 1)?],
                            draws: 1,
                        })
                    })
                    .collect()
            }
        }
    }

    /// Draws until one more admissible state is cached. Returns false for
    /// enumerated slots, which hold exactly one state.
    fn extend(&self, network: &ActiveNetwork, slot: &mut Slot) -> Result<bool> {
        let Some(rng) = slot.rng.as_mut() else {
            return Ok(false);
        };
        let model = ContingencyModel::new(self.case, network);
        let budget = self.config.sampler.max_resamples;
        while slot.draws < budget {
            let state = model.draw(rng);
            slot.draws += 1;
            if model.is_admissible(&state) {
                let p = self.prepare(network, &state, &self.scenarios[slot.scenario], slot.draws)?;
                slot.states.push(p);
                return Ok(true);
            }
        }
        Err(Error::ResampleExhausted { budget })
    }

    fn prepare(&self, network: &ActiveNetwork, state: &OutageState, scenario: &Scenario, draws: usize) -> Result<Prepared> {
        let online: Vec<&GeneratorSpec> = self
            .case
            .generators
            .iter()
            .filter(|g| !state.generators_out.contains(&g.id))
            .collect();
        let dispatch = merit_order_dispatch(&online, scenario.total)?;
        let shed = if scenario.total > 0.0 {
            dispatch.deficit / scenario.total
        } else {
            0.0
        };
        let served: Vec<f64> = scenario.demand.iter().map(|d| d * (1.0 - shed)).collect();
        let curtailed: Vec<f64> = scenario.demand.iter().map(|d| d * shed).collect();

        let mut generation = vec![0.0; network.bus_count()];
        for g in &online {
            generation[g.bus as usize - 1] += dispatch.outputs.get(&g.id).copied().unwrap_or(0.0);
        }
        let slack = select_slack(&online, self.case.nominal_slack_generator())?.bus as usize - 1;
        let injections: Vec<f64> = generation.iter().zip(&served).map(|(g, d)| g - d).collect();
        let flows = solve(&network.with_outages(&state.lines_out), &injections, slack)?;
        let ego = self
            .case
            .generators
            .iter()
            .filter(|g| state.generators_out.contains(&g.id))
            .map(|g| (g.id, g.capacity_mw))
            .collect();
        Ok(Prepared {
            flows,
            served,
            curtailed,
            generation,
            ego,
            draws,
        })
    }

    fn assess_with(&self, slots: &mut [Slot], network: &ActiveNetwork) -> Result<Assessment> {
        let n_scen = self.scenarios.len();
        let mut dns = vec![0.0; n_scen];
        let mut gns = vec![0.0; n_scen];
        let mut wl = vec![0.0; n_scen];
        let mut ego: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
        let mut counts = vec![0usize; n_scen];
        let mut stats = CongestionStats::new(network.lines().len());
        let mut rejected = 0;

        for slot in slots.iter_mut() {
            let mut k = 0;
            let picked = loop {
                if k == slot.states.len() && !self.extend(network, slot)? {
                    break None;
                }
                let p = &slot.states[k];
                let sample = AdequacySample::assess(network, &p.flows, &p.served, &p.curtailed, &p.generation, BTreeMap::new());
                if sample.valid {
                    break Some((k, sample));
                }
                k += 1;
            };
            let Some((k, sample)) = picked else {
                rejected += 1;
                continue;
            };
            let p = &slot.states[k];
            let s = slot.scenario;
            rejected += p.draws - 1;
            counts[s] += 1;
            dns[s] += sample.system_dns;
            gns[s] += sample.system_gns;
            wl[s] += sample.wheeling_loss;
            for (&id, &mw) in &p.ego {
                ego.entry(id).or_insert_with(|| vec![0.0; n_scen])[s] += mw;
            }
            accumulate_congestion(&mut stats, &p.flows, network);
        }
        if counts.iter().any(|&c| c == 0) {
            return Err(Error::NoAdmissibleStates);
        }

        let mut report = ExpectationReport::zeros(self.case.generators.iter().map(|g| g.id));
        report.simulated_months = self.scenarios.iter().map(|s| s.month).collect();
        for m in 0..MONTHS {
            // Deterministic modes simulate one scenario that stands in for every month.
            let s = if n_scen == MONTHS { m } else { 0 };
            let c = counts[s] as f64;
            report.edns[m] = dns[s] / c;
            report.egns[m] = gns[s] / c;
            report.ewl[m] = wl[s] / c;
            for (id, per) in &ego {
                report.ego.get_mut(id).expect("known generator")[m] = per[s] / c;
            }
        }

        let costs = &self.case.costs;
        Ok(Assessment {
            edns_cost: cost::edns_cost(&report.edns, costs)?,
            egns_cost: cost::egns_cost(&report.egns, &report.ego, costs, &self.case.generators)?,
            ewl_cost: cost::ewl_cost(&report.ewl, costs)?,
            t_inv: cost::transmission_investment(network, costs, self.case.options.operating_term),
            expectations: report,
            stats,
            retained: counts.iter().sum(),
            rejected,
        })
    }
}

/// Monthly merit-order dispatch with every unit available.
pub fn base_dispatch(case: &NetworkCase) -> Result<Vec<DispatchResult>> {
    let all: Vec<&GeneratorSpec> = case.generators.iter().collect();
    (1..=MONTHS as u32)
        .map(|m| merit_order_dispatch(&all, scenario_demand(case, m)?.iter().sum()))
        .collect()
}

pub fn evaluate_chromosome(case: &NetworkCase, chromosome: &Chromosome, config: &EvalConfig) -> Result<FitnessRecord> {
    Evaluator::new(case, config.clone())?.evaluate(chromosome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contingency::SamplerConfig;
    use crate::test_support::tiny_case;

    fn config(mode: ContingencyMode, n_mcs: usize) -> EvalConfig {
        EvalConfig {
            sampler: SamplerConfig {
                mode,
                n_mcs,
                seed: 17,
                max_resamples: 1000,
            },
            ..EvalConfig::default()
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let case = tiny_case();
        let c = Chromosome::new(vec![true]);
        let a = evaluate_chromosome(&case, &c, &config(ContingencyMode::Mcs, 50)).unwrap();
        let b = evaluate_chromosome(&case, &c, &config(ContingencyMode::Mcs, 50)).unwrap();
        assert_eq!(a, b);
        assert!(a.feasible);
        let bd = a.breakdown.unwrap();
        assert!((bd.j - (bd.ec + bd.t_inv + bd.g_inv)).abs() < 1e-9);
    }

    #[test]
    fn sized_lines_meet_policy() {
        let case = tiny_case();
        let c = Chromosome::new(vec![true]);
        let mut cfg = config(ContingencyMode::N1, 1);
        cfg.policy = UpgradePolicy::Nl;
        let r = evaluate_chromosome(&case, &c, &cfg).unwrap();
        for l in &r.lines {
            if l.status == LineStatus::Existing {
                assert_eq!(l.capacity_mw, l.base_capacity_mw);
            }
            assert!(l.capacity_mw >= l.base_capacity_mw);
        }
    }

    #[test]
    fn wrong_length_is_an_error() {
        let case = tiny_case();
        let e = evaluate_chromosome(&case, &Chromosome::zeros(2), &config(ContingencyMode::Mcs, 5));
        assert!(matches!(e, Err(Error::ChromosomeLength { expected: 1, got: 2 })));
    }

    #[test]
    fn stranded_generator_is_infeasible() {
        let mut case = tiny_case();
        // Without line 2, demand bus 3 hangs off the candidate alone.
        case.lines.remove(1);
        let r = evaluate_chromosome(&case, &Chromosome::zeros(1), &config(ContingencyMode::Mcs, 5)).unwrap();
        assert!(!r.feasible);
        assert_eq!(r.j(), f64::INFINITY);
        let r = evaluate_chromosome(&case, &Chromosome::ones(1), &config(ContingencyMode::Mcs, 5)).unwrap();
        assert!(r.feasible);
    }

    #[test]
    fn deterministic_mode_replicates_peak_month() {
        let mut case = tiny_case();
        case.ldc.monthly_multipliers[4] = 1.2;
        let ev = Evaluator::new(&case, config(ContingencyMode::N1, 1)).unwrap();
        let a = ev.assess(&Chromosome::ones(1), None).unwrap();
        assert_eq!(a.expectations.simulated_months, vec![5]);
        assert!(a.expectations.edns.iter().all(|&v| v == a.expectations.edns[0]));
    }

    #[test]
    fn assessment_without_outages_matches_direct_flow() {
        // No outages and plenty of capacity: nothing unserved, nothing lost.
        let mut case = tiny_case();
        for l in &mut case.lines {
            l.forced_outage_rate = 0.0;
            l.base_capacity_mw = 1000.0;
        }
        let ev = Evaluator::new(&case, config(ContingencyMode::Mcs, 3)).unwrap();
        let a = ev.assess(&Chromosome::ones(1), None).unwrap();
        assert!(a.expectations.edns.iter().all(|&v| v.abs() < 1e-9));
        assert!(a.expectations.ewl.iter().all(|&v| v == 0.0));
        assert_eq!(a.retained_samples, 36);
        assert_eq!(a.rejected_draws, 0);
    }
}
