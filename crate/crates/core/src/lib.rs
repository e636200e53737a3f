//! Probabilistic transmission expansion planning.
//!
//! A case file describes buses, existing and candidate lines, generators,
//! a monthly load curve and cost rates. A binary chromosome selects which
//! candidate lines to build; each selection is sized by a roulette-wheel
//! capacity loop driven by Monte Carlo (or N-1 / N-2) adequacy assessment
//! on DC load flows, and priced. A genetic algorithm searches selections for
//! the lowest total cost.

pub mod adequacy;
pub mod contingency;
pub mod cost;
pub mod dispatch;
pub mod error;
pub mod graph;
pub mod loadflow;
pub mod network;
pub mod planner;
pub mod rng;
pub mod sizing;

pub use contingency::{ContingencyMode, SamplerConfig};
pub use error::{Error, Result};
pub use network::{apply_plan, load_case, read_case, ActiveNetwork, Chromosome, NetworkCase};
pub use planner::{evaluate_chromosome, EvalConfig, Evaluator, FitnessRecord, GaConfig, PlanResult, UpgradePolicy};
pub use sizing::SizingConfig;

#[cfg(test)]
pub(crate) mod test_support {
    use crate::network::*;

    /// Existing, fault-free, effectively unrated line of 10 km.
    pub(crate) fn line(id: u32, from: u32, to: u32, reactance: f64) -> ActiveLine {
        ActiveLine {
            id,
            from: from as usize - 1,
            to: to as usize - 1,
            reactance,
            length_km: 10.0,
            forced_outage_rate: 0.0,
            status: LineStatus::Existing,
            base_capacity_mw: 1e9,
            capacity_mw: 1e9,
            in_service: true,
        }
    }

    /// Buses `1..=demand.len()`, bus 1 slack.
    pub(crate) fn network_with_demand(demand: &[f64], lines: Vec<ActiveLine>) -> ActiveNetwork {
        let buses = demand
            .iter()
            .enumerate()
            .map(|(i, &d)| Bus {
                id: i as u32 + 1,
                base_demand: d,
                is_slack: i == 0,
            })
            .collect();
        ActiveNetwork::new(buses, lines).expect("well-formed test network")
    }

    pub(crate) fn network(n: usize, lines: Vec<ActiveLine>) -> ActiveNetwork {
        network_with_demand(&vec![0.0; n], lines)
    }

    pub(crate) fn generator(id: u32, bus: u32, capacity_mw: f64, operating_cost: f64) -> GeneratorSpec {
        GeneratorSpec {
            id,
            bus,
            capacity_mw,
            forced_outage_rate: 0.0,
            capital_cost: 0.0,
            operating_cost,
            revenue_loss_rate: 0.0,
            is_new: false,
        }
    }

    pub(crate) fn tiny_case() -> NetworkCase {
        let bus = |id, d, s| Bus { id, base_demand: d, is_slack: s };
        let line = |id, f, t, status, cap| LineSpec {
            id,
            from_bus: f,
            to_bus: t,
            length_km: 10.0,
            reactance: 0.1,
            forced_outage_rate: 0.05,
            status,
            base_capacity_mw: cap,
        };
        NetworkCase {
            buses: vec![bus(1, 0.0, true), bus(2, 100.0, false), bus(3, 50.0, false)],
            lines: vec![
                line(1, 1, 2, LineStatus::Existing, 80.0),
                line(2, 2, 3, LineStatus::Existing, 60.0),
                line(3, 1, 3, LineStatus::Candidate, 5.0),
            ],
            generators: vec![GeneratorSpec {
                id: 1,
                bus: 1,
                capacity_mw: 200.0,
                forced_outage_rate: 0.0,
                capital_cost: 0.0,
                operating_cost: 0.00002,
                revenue_loss_rate: 0.01,
                is_new: false,
            }],
            ldc: LoadDurationCurve {
                monthly_multipliers: vec![1.0; 12],
            },
            costs: CostParameters {
                c_edns: vec![1.0; 12],
                c_egns: vec![0.5; 12],
                c_ewl: vec![0.1; 12],
                c_t2: 0.0,
                hours_per_month: 730.0,
            },
            options: CaseOptions {
                min_online_generators: 1,
                operating_term: false,
            },
        }
    }
}
