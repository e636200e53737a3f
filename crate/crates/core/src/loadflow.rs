//! DC load flow on an [`ActiveNetwork`], ignoring line ratings.
//!
//! Injections are generation-positive. The slack row and column are removed
//! and the reduced susceptance system is solved by dense Cholesky. Line flow
//! is `(δ_from − δ_to) / x`, so a bus's net outflow equals its injection:
//! `P_s = Σ_j (δ_s − δ_j) / x_sj`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::components;
use crate::network::ActiveNetwork;

/// Relative balance tolerance on injections.
pub const BALANCE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSolution {
    /// Bus angles, slack fixed at exactly 0.
    pub angles: Vec<f64>,
    /// Signed MW per network line, positive from→to; 0 for lines out of service.
    pub flows: Vec<f64>,
    pub injections: Vec<f64>,
}

/// Solves for angles and flows. Buses outside the slack's island must carry
/// no injection; they are left at angle 0.
pub fn solve(network: &ActiveNetwork, injections: &[f64], slack: usize) -> Result<FlowSolution> {
    let n = network.bus_count();
    if injections.len() != n {
        return Err(Error::InvalidInput(format!(
            "{} injections for {n} buses",
            injections.len()
        )));
    }
    if slack >= n {
        return Err(Error::InvalidInput(format!("slack index {slack} out of range")));
    }
    let net: f64 = injections.iter().sum();
    let gross: f64 = injections.iter().map(|p| p.abs()).sum();
    if net.abs() > BALANCE_TOLERANCE * gross {
        return Err(Error::UnbalancedInjections { net, gross });
    }

    let mut islands = components(n, network.in_service_edges());
    let in_slack_island: Vec<bool> = (0..n).map(|b| islands.same(b, slack)).collect();
    let stray = BALANCE_TOLERANCE * gross.max(1.0);
    if let Some(bus) = (0..n).find(|&b| !in_slack_island[b] && injections[b].abs() > stray) {
        return Err(Error::SingularSystem { bus: bus as u32 + 1 });
    }

    // Position of each bus in the reduced system.
    let mut reduced = vec![usize::MAX; n];
    let mut m = 0;
    for b in 0..n {
        if b != slack && in_slack_island[b] {
            reduced[b] = m;
            m += 1;
        }
    }

    let mut angles = vec![0.0; n];
    if m > 0 {
        let mut b_mat = DMatrix::<f64>::zeros(m, m);
        for line in network.lines().iter().filter(|l| l.in_service) {
            let y = 1.0 / line.reactance;
            let (i, j) = (reduced[line.from], reduced[line.to]);
            if i != usize::MAX {
                b_mat[(i, i)] += y;
            }
            if j != usize::MAX {
                b_mat[(j, j)] += y;
            }
            if i != usize::MAX && j != usize::MAX {
                b_mat[(i, j)] -= y;
                b_mat[(j, i)] -= y;
            }
        }
        let rhs = DVector::from_iterator(
            m,
            (0..n).filter(|&b| reduced[b] != usize::MAX).map(|b| injections[b]),
        );
        let theta = b_mat
            .cholesky()
            .ok_or(Error::SingularSystem { bus: slack as u32 + 1 })?
            .solve(&rhs);
        for b in 0..n {
            if reduced[b] != usize::MAX {
                angles[b] = theta[reduced[b]];
            }
        }
    }

    let flows = network
        .lines()
        .iter()
        .map(|l| {
            if l.in_service {
                (angles[l.from] - angles[l.to]) / l.reactance
            } else {
                0.0
            }
        })
        .collect();

    Ok(FlowSolution {
        angles,
        flows,
        injections: injections.to_vec(),
    })
}

/// Largest nodal mismatch `|P_s − Σ_j (δ_s − δ_j)/x_sj|` over all buses, MW.
pub fn flow_residual(network: &ActiveNetwork, solution: &FlowSolution) -> f64 {
    let mut computed = vec![0.0; network.bus_count()];
    for line in network.lines().iter().filter(|l| l.in_service) {
        let f = (solution.angles[line.from] - solution.angles[line.to]) / line.reactance;
        computed[line.from] += f;
        computed[line.to] -= f;
    }
    computed
        .iter()
        .zip(&solution.injections)
        .map(|(c, p)| (p - c).abs())
        .fold(0.0, f64::max)
}
