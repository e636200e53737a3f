use proptest::prelude::*;
use tep_core::adequacy::{nodal_balance, system_totals};
use tep_core::loadflow::{flow_residual, solve};
use tep_core::network::{ActiveLine, ActiveNetwork, Bus, LineStatus};

#[derive(Debug, Clone)]
struct Grid {
    network: ActiveNetwork,
    demand: Vec<f64>,
    generation: Vec<f64>,
}

impl Grid {
    fn injections(&self) -> Vec<f64> {
        self.generation.iter().zip(&self.demand).map(|(g, d)| g - d).collect()
    }
}

fn build(n: usize, edges: &[(usize, usize, f64, f64)]) -> ActiveNetwork {
    let buses = (0..n)
        .map(|i| Bus {
            id: i as u32 + 1,
            base_demand: 0.0,
            is_slack: i == 0,
        })
        .collect();
    let lines = edges
        .iter()
        .enumerate()
        .map(|(k, &(from, to, x, cap))| ActiveLine {
            id: k as u32 + 1,
            from,
            to,
            reactance: x,
            length_km: 1.0,
            forced_outage_rate: 0.0,
            status: LineStatus::Existing,
            base_capacity_mw: cap,
            capacity_mw: cap,
            in_service: true,
        })
        .collect();
    ActiveNetwork::new(buses, lines).unwrap()
}

/// Random spanning tree plus extra chords, balanced demand and generation.
fn grid() -> impl Strategy<Value = Grid> {
    (2usize..=8).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
        let extra = prop::collection::vec((0..n, 0..n), 0..6);
        let line_params = prop::collection::vec((0.01f64..1.0, 0.0f64..150.0), n - 1 + 6);
        let demand = prop::collection::vec(0.0f64..100.0, n);
        let share = prop::collection::vec(0.0f64..1.0, n);
        (Just(n), parents, extra, line_params, demand, share).prop_map(|(n, parents, extra, params, demand, share)| {
            let mut pairs: Vec<(usize, usize)> = parents.into_iter().enumerate().map(|(i, p)| (i + 1, p)).collect();
            pairs.extend(extra.into_iter().filter(|(a, b)| a != b));
            let edges: Vec<_> = pairs
                .iter()
                .zip(&params)
                .map(|(&(a, b), &(x, cap))| (a, b, x, cap))
                .collect();
            // Generation proportional to random shares, scaled to total demand.
            let total: f64 = demand.iter().sum();
            let weight: f64 = share.iter().sum::<f64>().max(1e-9);
            let generation = share.iter().map(|s| total * s / weight).collect();
            Grid {
                network: build(n, &edges),
                demand,
                generation,
            }
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solver_satisfies_nodal_balance(g in grid()) {
        let inj = g.injections();
        let sol = solve(&g.network, &inj, 0).unwrap();
        prop_assert!(flow_residual(&g.network, &sol) <= 1e-6);
        prop_assert_eq!(sol.angles[0], 0.0);
        let mut out = vec![0.0; inj.len()];
        for (l, f) in g.network.lines().iter().zip(&sol.flows) {
            out[l.from] += f;
            out[l.to] -= f;
        }
        for (o, p) in out.iter().zip(&inj) {
            prop_assert!((o - p).abs() <= 1e-6);
        }
    }

    #[test]
    fn solver_is_linear(g in grid(), a in -3.0f64..3.0, b in -3.0f64..3.0, perm in any::<u64>()) {
        let p1 = g.injections();
        // A second balanced vector: rotate the first.
        let k = (perm as usize) % p1.len();
        let mut p2 = p1.clone();
        p2.rotate_left(k);
        let combo: Vec<f64> = p1.iter().zip(&p2).map(|(x, y)| a * x + b * y).collect();
        let s1 = solve(&g.network, &p1, 0).unwrap();
        let s2 = solve(&g.network, &p2, 0).unwrap();
        let s = solve(&g.network, &combo, 0).unwrap();
        let scale = s1.flows.iter().chain(&s2.flows).fold(1.0f64, |m, f| m.max(f.abs())) * (a.abs() + b.abs()).max(1.0);
        for j in 0..s.flows.len() {
            let expect = a * s1.flows[j] + b * s2.flows[j];
            prop_assert!((s.flows[j] - expect).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn system_dns_equals_system_gns(g in grid()) {
        let sol = solve(&g.network, &g.injections(), 0).unwrap();
        let nodal = nodal_balance(&g.network, &sol, &g.demand, &g.generation);
        let (dns, gns) = system_totals(&nodal);
        let total: f64 = g.demand.iter().sum();
        prop_assert!((dns - gns).abs() <= 1e-6 * total.max(1.0));
    }

    #[test]
    fn raising_ratings_never_raises_wheeling_loss(g in grid(), bump in prop::collection::vec(0.0f64..50.0, 12)) {
        let sol = solve(&g.network, &g.injections(), 0).unwrap();
        let caps: Vec<f64> = g.network.capacities().iter().zip(bump.iter().cycle()).map(|(c, d)| c + d).collect();
        let wider = g.network.with_capacities(&caps);
        let before = tep_core::adequacy::wheeling_loss(&g.network, &sol);
        let after = tep_core::adequacy::wheeling_loss(&wider, &sol);
        prop_assert!(after <= before + 1e-9);
    }
}
