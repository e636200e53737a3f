//! Monetary aggregation. Everything is computed in k$ and reported in M$.
//!
//! Unit table:
//!
//! | quantity                       | unit       |
//! |--------------------------------|------------|
//! | capacity, demand, EDNS/EGNS/EWL | MW        |
//! | C_EDNS, C_EGNS, C_EWL, C_rl    | k$/MWh     |
//! | C_T1 (line capital rate)       | k$/km      |
//! | C_T2 (line O&M rate)           | k$/MW/km   |
//! | C_G1 (generator capital)       | k$/kW, ×1000 per MW |
//! | C_G2 (generator operating)     | k$/kWh, ×1000 per MWh |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dispatch::DispatchResult;
use crate::error::{Error, Result};
use crate::network::{ActiveNetwork, CostParameters, GeneratorSpec, LineStatus, NetworkCase, MONTHS};

const KW_PER_MW: f64 = 1000.0;

fn monthly_cost(values: &[f64], rates: &[f64], hours: f64, what: &str) -> Result<f64> {
    if values.len() != MONTHS || rates.len() != MONTHS {
        return Err(Error::InvalidInput(format!(
            "{what}: expected {MONTHS} monthly values, got {} values and {} rates",
            values.len(),
            rates.len()
        )));
    }
    Ok(hours * values.iter().zip(rates).map(|(v, c)| v * c).sum::<f64>())
}

pub fn edns_cost(edns: &[f64], costs: &CostParameters) -> Result<f64> {
    monthly_cost(edns, &costs.c_edns, costs.hours_per_month, "EDNS")
}

/// Unserved-generation cost plus revenue lost on generators cut off from
/// the network (`ego` holds MW per month per generator id).
pub fn egns_cost(
    egns: &[f64],
    ego: &BTreeMap<u32, Vec<f64>>,
    costs: &CostParameters,
    generators: &[GeneratorSpec],
) -> Result<f64> {
    let mut total = monthly_cost(egns, &costs.c_egns, costs.hours_per_month, "EGNS")?;
    for (id, outage) in ego {
        let g = generators
            .iter()
            .find(|g| g.id == *id)
            .ok_or_else(|| Error::InvalidInput(format!("EGO for unknown generator {id}")))?;
        if outage.len() != MONTHS {
            return Err(Error::InvalidInput(format!("EGO for generator {id} needs {MONTHS} months")));
        }
        total += costs.hours_per_month * g.revenue_loss_rate * outage.iter().sum::<f64>();
    }
    Ok(total)
}

pub fn ewl_cost(ewl: &[f64], costs: &CostParameters) -> Result<f64> {
    monthly_cost(ewl, &costs.c_ewl, costs.hours_per_month, "EWL")
}

/// Fitted capital rate of a line of `capacity` MW, k$/km.
pub fn line_capital_rate(capacity: f64) -> f64 {
    0.35 * capacity + 0.19
}

/// `(1 − FOR) / FOR`; lines with FOR = 0 get 0.
pub fn operating_cost_factor(forced_outage_rate: f64) -> f64 {
    if forced_outage_rate > 0.0 {
        (1.0 - forced_outage_rate) / forced_outage_rate
    } else {
        0.0
    }
}

/// Capital on new lines at their final rating, capital on the added rating
/// of upgraded existing lines, plus (optionally) the operating term over
/// every line.
pub fn transmission_investment(network: &ActiveNetwork, costs: &CostParameters, operating_term: bool) -> f64 {
    network
        .lines()
        .iter()
        .map(|l| {
            let capital = match l.status {
                LineStatus::Candidate => line_capital_rate(l.capacity_mw) * l.length_km,
                LineStatus::Existing => {
                    let added = l.capacity_mw - l.base_capacity_mw;
                    if added > 0.0 {
                        line_capital_rate(added) * l.length_km
                    } else {
                        0.0
                    }
                }
            };
            let operating = if operating_term {
                costs.c_t2 * l.length_km * l.capacity_mw * operating_cost_factor(l.forced_outage_rate)
            } else {
                0.0
            };
            capital + operating
        })
        .sum()
}

/// Capital on new generators plus operating cost of `dispatch` (one entry
/// per month).
pub fn generation_investment(case: &NetworkCase, dispatch: &[DispatchResult]) -> f64 {
    let capital: f64 = case
        .generators
        .iter()
        .filter(|g| g.is_new)
        .map(|g| g.capital_cost * g.capacity_mw * KW_PER_MW)
        .sum();
    let operating: f64 = case
        .generators
        .iter()
        .map(|g| {
            let energy: f64 = dispatch.iter().map(|d| d.outputs.get(&g.id).copied().unwrap_or(0.0)).sum();
            g.operating_cost * KW_PER_MW * energy
        })
        .sum();
    capital + case.costs.hours_per_month * operating
}

/// All monetary components of one plan, k$.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub edns_cost: f64,
    pub egns_cost: f64,
    pub ewl_cost: f64,
    pub ec: f64,
    pub t_inv: f64,
    pub g_inv: f64,
    pub j: f64,
}

pub fn objective(edns_cost: f64, egns_cost: f64, ewl_cost: f64, t_inv: f64, g_inv: f64) -> CostBreakdown {
    let ec = edns_cost + egns_cost + ewl_cost;
    CostBreakdown {
        edns_cost,
        egns_cost,
        ewl_cost,
        ec,
        t_inv,
        g_inv,
        j: ec + t_inv + g_inv,
    }
}

/// k$ → M$.
pub fn to_musd(k_usd: f64) -> f64 {
    k_usd / 1000.0
}
