//! Merit-order dispatch and slack replacement.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::GeneratorSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchResult {
    /// MW per generator id.
    pub outputs: BTreeMap<u32, f64>,
    /// Demand left unmet once every online unit runs at capacity.
    pub deficit: f64,
}

impl DispatchResult {
    pub fn total_output(&self) -> f64 {
        self.outputs.values().sum()
    }
}

fn merit_key(g: &GeneratorSpec) -> (f64, u32, u32) {
    (g.operating_cost, g.bus, g.id)
}

/// Fills units in ascending operating cost (then bus id) until demand is met.
pub fn merit_order_dispatch(online: &[&GeneratorSpec], total_demand: f64) -> Result<DispatchResult> {
    if online.is_empty() {
        return Err(Error::NoGenerators);
    }
    if !(total_demand >= 0.0) {
        return Err(Error::InvalidInput(format!("demand {total_demand} MW is negative")));
    }
    let mut order: Vec<&GeneratorSpec> = online.to_vec();
    order.sort_by(|a, b| merit_key(a).partial_cmp(&merit_key(b)).expect("finite costs"));

    let mut remaining = total_demand;
    let mut outputs = BTreeMap::new();
    for g in order {
        let p = remaining.min(g.capacity_mw).max(0.0);
        remaining -= p;
        outputs.insert(g.id, p);
    }
    Ok(DispatchResult {
        outputs,
        deficit: remaining.max(0.0),
    })
}

/// The nominal slack if it is online, otherwise the largest online unit
/// (lowest bus id on ties).
pub fn select_slack<'a>(
    online: &[&'a GeneratorSpec],
    nominal_slack: Option<u32>,
) -> Result<&'a GeneratorSpec> {
    if let Some(g) = nominal_slack.and_then(|id| online.iter().find(|g| g.id == id)) {
        return Ok(g);
    }
    online
        .iter()
        .copied()
        .max_by(|a, b| {
            a.capacity_mw
                .partial_cmp(&b.capacity_mw)
                .expect("finite capacities")
                .then_with(|| b.bus.cmp(&a.bus))
                .then_with(|| b.id.cmp(&a.id))
        })
        .ok_or(Error::NoGenerators)
}
