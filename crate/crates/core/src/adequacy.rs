//! Nodal demand-not-served / generation-not-served accounting, wheeling
//! loss, sample validity and probability-weighted expectations.
//!
//! At every bus the solved (unconstrained) flows are split into incoming and
//! outgoing by their sign at that bus, and each line can move at most its
//! rating:
//!
//! ```text
//! DIFF_s = D_s − Σ_in min(|f|, cap) + Σ_out min(|f|, cap) − G_s
//! DNS_s  = max(DIFF_s, 0)      GNS_s = max(−DIFF_s, 0)
//! ```

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loadflow::FlowSolution;
use crate::network::{ActiveNetwork, MONTHS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalBalance {
    pub diff: Vec<f64>,
    pub dns: Vec<f64>,
    pub gns: Vec<f64>,
}

impl NodalBalance {
    pub fn from_diff(diff: Vec<f64>) -> Self {
        let dns = diff.iter().map(|&d| d.max(0.0)).collect();
        let gns = diff.iter().map(|&d| (-d).max(0.0)).collect();
        Self { diff, dns, gns }
    }
}

pub fn nodal_balance(
    network: &ActiveNetwork,
    flows: &FlowSolution,
    demand: &[f64],
    generation: &[f64],
) -> NodalBalance {
    let mut diff: Vec<f64> = demand.iter().zip(generation).map(|(d, g)| d - g).collect();
    for (line, &f) in network.lines().iter().zip(&flows.flows) {
        if !line.in_service || f == 0.0 {
            continue;
        }
        let moved = f.abs().min(line.capacity_mw);
        let (sender, receiver) = if f > 0.0 { (line.from, line.to) } else { (line.to, line.from) };
        diff[sender] += moved;
        diff[receiver] -= moved;
    }
    NodalBalance::from_diff(diff)
}

/// System DNS and GNS.
pub fn system_totals(nodal: &NodalBalance) -> (f64, f64) {
    (nodal.dns.iter().sum(), nodal.gns.iter().sum())
}

/// Total overload across congested lines, MW.
pub fn wheeling_loss(network: &ActiveNetwork, flows: &FlowSolution) -> f64 {
    overloads(network, flows).sum()
}

fn overloads<'a>(network: &'a ActiveNetwork, flows: &'a FlowSolution) -> impl Iterator<Item = f64> + 'a {
    network
        .lines()
        .iter()
        .zip(&flows.flows)
        .filter(|(l, f)| l.in_service && f.abs() > l.capacity_mw)
        .map(|(l, f)| f.abs() - l.capacity_mw)
}

/// Adequacy figures for one (scenario, contingency) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacySample {
    pub nodal: NodalBalance,
    /// Demand shed before the flow solve because online capacity fell short.
    pub curtailed: Vec<f64>,
    /// Σ DNS_s plus all curtailment.
    pub system_dns: f64,
    pub system_gns: f64,
    pub wheeling_loss: f64,
    /// Capacity of each generator cut off from the network, MW.
    pub ego: BTreeMap<u32, f64>,
    pub valid: bool,
}

impl AdequacySample {
    /// `served` is the demand the flows were solved against; `curtailed` is
    /// what was shed on top of it.
    pub fn assess(
        network: &ActiveNetwork,
        flows: &FlowSolution,
        served: &[f64],
        curtailed: &[f64],
        generation: &[f64],
        ego: BTreeMap<u32, f64>,
    ) -> Self {
        let nodal = nodal_balance(network, flows, served, generation);
        let (dns, gns) = system_totals(&nodal);
        let mut sample = Self {
            nodal,
            curtailed: curtailed.to_vec(),
            system_dns: dns + curtailed.iter().sum::<f64>(),
            system_gns: gns,
            wheeling_loss: wheeling_loss(network, flows),
            ego,
            valid: false,
        };
        let full: Vec<f64> = served.iter().zip(curtailed).map(|(s, c)| s + c).collect();
        sample.valid = is_valid_sample(&sample, &full, generation);
        sample
    }

    /// DNS at bus `s`, curtailment included.
    pub fn bus_dns(&self, s: usize) -> f64 {
        self.nodal.dns[s] + self.curtailed.get(s).copied().unwrap_or(0.0)
    }
}

/// `0 ≤ DNS < D` and `0 ≤ GNS < G` system-wide, and `DNS_s < D_s`,
/// `GNS_s < G_s` at every bus that carries demand (resp. generation).
pub fn is_valid_sample(sample: &AdequacySample, demand: &[f64], generation: &[f64]) -> bool {
    fn below(x: f64, bound: f64) -> bool {
        x >= 0.0 && (x < bound || (bound == 0.0 && x == 0.0))
    }
    let d_total: f64 = demand.iter().sum();
    let g_total: f64 = generation.iter().sum();
    if !below(sample.system_dns, d_total) || !below(sample.system_gns, g_total) {
        return false;
    }
    (0..demand.len()).all(|s| {
        (demand[s] <= 0.0 || sample.bus_dns(s) < demand[s])
            && (generation[s] <= 0.0 || sample.nodal.gns[s] < generation[s])
    })
}

/// Probability-weighted sum over `(value, probability)` pairs.
pub fn expectation(samples: &[(f64, f64)]) -> Result<f64> {
    if let Some(&(_, p)) = samples.iter().find(|(_, p)| !(*p >= 0.0)) {
        return Err(Error::InvalidInput(format!("negative probability {p}")));
    }
    let total: f64 = samples.iter().map(|(_, p)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::ProbabilitiesNotNormalized(total));
    }
    Ok(samples.iter().map(|(v, p)| v * p).sum())
}

/// Expected DNS/GNS/WL per month (MW) and expected generator outage per
/// generator per month. Months not simulated carry the values of the
/// simulated scenario they stand in for.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationReport {
    pub edns: Vec<f64>,
    pub egns: Vec<f64>,
    pub ewl: Vec<f64>,
    pub ego: BTreeMap<u32, Vec<f64>>,
    /// Months actually simulated (1-based).
    pub simulated_months: Vec<u32>,
}

impl ExpectationReport {
    pub fn zeros(generator_ids: impl IntoIterator<Item = u32>) -> Self {
        Self {
            edns: vec![0.0; MONTHS],
            egns: vec![0.0; MONTHS],
            ewl: vec![0.0; MONTHS],
            ego: generator_ids.into_iter().map(|id| (id, vec![0.0; MONTHS])).collect(),
            simulated_months: Vec::new(),
        }
    }

    fn mean(values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }

    /// Average over the twelve months.
    pub fn edns_mean(&self) -> f64 {
        Self::mean(&self.edns)
    }

    pub fn egns_mean(&self) -> f64 {
        Self::mean(&self.egns)
    }

    pub fn ewl_mean(&self) -> f64 {
        Self::mean(&self.ewl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loadflow::solve;
    use crate::test_support::{line, network};

    fn capped(id: u32, from: u32, to: u32, cap: f64) -> crate::network::ActiveLine {
        let mut l = line(id, from, to, 0.1);
        l.capacity_mw = cap;
        l
    }

    #[test]
    fn incoming_line_caps_delivery() {
        // Bus 2 draws 50 MW but only 40 MW of a 60 MW flow gets through.
        let net = network(2, vec![capped(1, 1, 2, 40.0)]);
        let flows = FlowSolution {
            angles: vec![0.0, -6.0],
            flows: vec![60.0],
            injections: vec![60.0, -60.0],
        };
        let nodal = nodal_balance(&net, &flows, &[10.0, 50.0], &[70.0, 0.0]);
        assert!((nodal.diff[1] - 10.0).abs() < 1e-12);
        assert!((nodal.dns[1] - 10.0).abs() < 1e-12);
        assert_eq!(nodal.gns[1], 0.0);
    }

    #[test]
    fn worked_example_classification() {
        let nodal = NodalBalance::from_diff(vec![-25.0, 0.0, 9.02, 15.83, 0.0]);
        assert_eq!(nodal.gns, vec![25.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(nodal.dns, vec![0.0, 0.0, 9.02, 15.83, 0.0]);
        let (dns, gns) = system_totals(&nodal);
        assert!((dns - 24.85).abs() < 1e-12);
        assert_eq!(gns, 25.0);
        assert_eq!(system_totals(&NodalBalance::from_diff(vec![0.0; 3])), (0.0, 0.0));
    }

    #[test]
    fn wheeling_loss_sums_overloads() {
        let net = network(3, vec![capped(1, 1, 2, 50.0), capped(2, 2, 3, 25.0), capped(3, 1, 3, 100.0)]);
        let flows = FlowSolution {
            angles: vec![0.0; 3],
            flows: vec![77.85, -40.83, 60.0],
            injections: vec![0.0; 3],
        };
        assert!((wheeling_loss(&net, &flows) - 43.68).abs() < 1e-12);

        let one = network(2, vec![capped(1, 1, 2, 100.0)]);
        let f = |x: f64| FlowSolution { angles: vec![0.0; 2], flows: vec![x], injections: vec![0.0; 2] };
        assert_eq!(wheeling_loss(&one, &f(110.0)), 10.0);
        assert_eq!(wheeling_loss(&one, &f(100.0)), 0.0);
    }

    #[test]
    fn unconstrained_lines_leave_no_mismatch() {
        let net = network(
            4,
            vec![line(1, 1, 2, 0.1), line(2, 2, 3, 0.2), line(3, 3, 4, 0.3), line(4, 4, 1, 0.4), line(5, 1, 3, 0.5)],
        );
        let demand = [0.0, 30.0, 50.0, 20.0];
        let generation = [70.0, 30.0, 0.0, 0.0];
        let inj: Vec<f64> = generation.iter().zip(&demand).map(|(g, d)| g - d).collect();
        let flows = solve(&net, &inj, 0).unwrap();
        let nodal = nodal_balance(&net, &flows, &demand, &generation);
        assert!(nodal.diff.iter().all(|d| d.abs() < 1e-9));
    }

    #[test]
    fn capacity_increase_can_shift_shortfall_to_sending_bus() {
        // Generator at 1 feeds demand at 3 through pass-through bus 2. Raising
        // the rating of 2→3 alone moves a shortfall onto bus 2, so per-bus DNS
        // is not monotone in line capacity even with flows fixed.
        let net = network(3, vec![capped(1, 1, 2, 5.0), capped(2, 2, 3, 5.0)]);
        let flows = solve(&net, &[100.0, 0.0, -100.0], 0).unwrap();
        let before = nodal_balance(&net, &flows, &[0.0, 0.0, 100.0], &[100.0, 0.0, 0.0]);
        let wider = net.with_capacities(&[5.0, 10.0]);
        let after = nodal_balance(&wider, &flows, &[0.0, 0.0, 100.0], &[100.0, 0.0, 0.0]);
        assert_eq!(before.dns[1], 0.0);
        assert_eq!(after.dns[1], 5.0);
        assert!(wheeling_loss(&wider, &flows) < wheeling_loss(&net, &flows));
    }

    fn sample_with(dns: Vec<f64>, gns: Vec<f64>) -> AdequacySample {
        let diff = dns.iter().zip(&gns).map(|(d, g)| d - g).collect();
        let nodal = NodalBalance::from_diff(diff);
        let (sd, sg) = system_totals(&nodal);
        AdequacySample {
            curtailed: vec![0.0; nodal.diff.len()],
            nodal,
            system_dns: sd,
            system_gns: sg,
            wheeling_loss: 0.0,
            ego: BTreeMap::new(),
            valid: true,
        }
    }

    #[test]
    fn validity_rules() {
        let demand = [0.0, 40.0, 60.0];
        let generation = [100.0, 0.0, 0.0];
        assert!(is_valid_sample(&sample_with(vec![0.0; 3], vec![0.0; 3]), &demand, &generation));
        // Bus 3 entirely unserved.
        assert!(!is_valid_sample(
            &sample_with(vec![0.0, 0.0, 60.0], vec![60.0, 0.0, 0.0]),
            &demand,
            &generation
        ));
        // Everything unserved.
        assert!(!is_valid_sample(
            &sample_with(vec![0.0, 40.0, 60.0], vec![100.0, 0.0, 0.0]),
            &demand,
            &generation
        ));
        assert!(is_valid_sample(
            &sample_with(vec![0.0, 10.0, 20.0], vec![30.0, 0.0, 0.0]),
            &demand,
            &generation
        ));
    }

    #[test]
    fn curtailment_counts_toward_bus_dns() {
        let mut s = sample_with(vec![0.0, 0.0, 0.0], vec![0.0; 3]);
        s.curtailed = vec![0.0, 40.0, 0.0];
        s.system_dns = 40.0;
        assert!(!is_valid_sample(&s, &[0.0, 40.0, 60.0], &[60.0, 0.0, 0.0]));
    }

    #[test]
    fn expectation_weights() {
        assert_eq!(expectation(&[(10.0, 0.5), (0.0, 0.5)]).unwrap(), 5.0);
        assert_eq!(expectation(&[(7.25, 1.0)]).unwrap(), 7.25);
        assert!(matches!(
            expectation(&[(1.0, 0.5), (1.0, 0.4)]),
            Err(Error::ProbabilitiesNotNormalized(_))
        ));
        assert!(expectation(&[(1.0, -0.5), (1.0, 1.5)]).is_err());
    }

    #[test]
    fn exhaustive_three_line_expectation() {
        // Three lines with FOR 0.1, 0.2, 0.3 each carry 10, 20, 30 MW of DNS
        // when out; DNS adds up. E[DNS] = 0.1·10 + 0.2·20 + 0.3·30 = 14.
        let fors = [0.1, 0.2, 0.3];
        let loss = [10.0, 20.0, 30.0];
        let states: Vec<(f64, f64)> = (0..8u32)
            .map(|mask| {
                let mut p = 1.0;
                let mut v = 0.0;
                for k in 0..3 {
                    if mask >> k & 1 == 1 {
                        p *= fors[k];
                        v += loss[k];
                    } else {
                        p *= 1.0 - fors[k];
                    }
                }
                (v, p)
            })
            .collect();
        assert!((expectation(&states).unwrap() - 14.0).abs() < 1e-12);
    }
}
