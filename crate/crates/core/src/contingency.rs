//! Contingency states: seeded Monte Carlo outage sampling with islanding and
//! minimum-online-generator rejection, and deterministic N-1 / N-2
//! enumeration.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dispatch::select_slack;
use crate::error::{Error, Result};
use crate::graph::components;
use crate::network::{ActiveNetwork, GeneratorSpec, NetworkCase};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContingencyMode {
    Mcs,
    N1,
    N2,
}

impl fmt::Display for ContingencyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContingencyMode::Mcs => "mcs",
            ContingencyMode::N1 => "n1",
            ContingencyMode::N2 => "n2",
        })
    }
}

impl FromStr for ContingencyMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mcs" => Ok(ContingencyMode::Mcs),
            "n1" | "n-1" => Ok(ContingencyMode::N1),
            "n2" | "n-2" => Ok(ContingencyMode::N2),
            other => Err(format!("unknown contingency mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub mode: ContingencyMode,
    /// Retained Monte Carlo samples per load scenario.
    pub n_mcs: usize,
    pub seed: u64,
    /// Draws allowed per retained sample before giving up.
    pub max_resamples: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            mode: ContingencyMode::Mcs,
            n_mcs: 1000,
            seed: 0,
            max_resamples: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageState {
    pub lines_out: BTreeSet<u32>,
    pub generators_out: BTreeSet<u32>,
    pub weight: f64,
}

impl OutageState {
    pub fn intact() -> Self {
        Self {
            lines_out: BTreeSet::new(),
            generators_out: BTreeSet::new(),
            weight: 1.0,
        }
    }
}

/// True when the in-service lines leave a demand bus or an online
/// generator's bus outside the island of the (effective) slack generator.
/// With no generator online everything counts as islanded.
pub fn is_islanded(
    network: &ActiveNetwork,
    generators: &[GeneratorSpec],
    nominal_slack: Option<u32>,
    outage: &OutageState,
) -> bool {
    let online: Vec<&GeneratorSpec> = generators
        .iter()
        .filter(|g| !outage.generators_out.contains(&g.id))
        .collect();
    let Ok(slack) = select_slack(&online, nominal_slack) else {
        return true;
    };
    let reference = slack.bus as usize - 1;
    let mut islands = components(
        network.bus_count(),
        network
            .lines()
            .iter()
            .filter(|l| !outage.lines_out.contains(&l.id))
            .map(|l| (l.from, l.to)),
    );
    let demand_stranded = network
        .buses()
        .iter()
        .enumerate()
        .any(|(i, b)| b.base_demand > 0.0 && !islands.same(i, reference));
    demand_stranded || online.iter().any(|g| !islands.same(g.bus as usize - 1, reference))
}

/// Outage model of one active network.
#[derive(Debug, Clone, Copy)]
pub struct ContingencyModel<'a> {
    pub network: &'a ActiveNetwork,
    pub generators: &'a [GeneratorSpec],
    pub nominal_slack: Option<u32>,
    pub min_online: usize,
}

impl<'a> ContingencyModel<'a> {
    pub fn new(case: &'a NetworkCase, network: &'a ActiveNetwork) -> Self {
        Self {
            network,
            generators: &case.generators,
            nominal_slack: case.nominal_slack_generator(),
            min_online: case.options.min_online_generators,
        }
    }

    /// One unfiltered draw: each line, then each generator, is out iff a
    /// uniform draw on [0, 1) falls below its forced outage rate.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> OutageState {
        let mut state = OutageState::intact();
        for line in self.network.lines() {
            if rng.random::<f64>() < line.forced_outage_rate {
                state.lines_out.insert(line.id);
            }
        }
        for g in self.generators {
            if rng.random::<f64>() < g.forced_outage_rate {
                state.generators_out.insert(g.id);
            }
        }
        state
    }

    pub fn online_count(&self, state: &OutageState) -> usize {
        self.generators
            .iter()
            .filter(|g| !state.generators_out.contains(&g.id))
            .count()
    }

    pub fn is_islanded(&self, state: &OutageState) -> bool {
        is_islanded(self.network, self.generators, self.nominal_slack, state)
    }

    /// Enough generators online and nothing that matters stranded.
    pub fn is_admissible(&self, state: &OutageState) -> bool {
        self.online_count(state) >= self.min_online && !self.is_islanded(state)
    }

    /// Draws until an admissible state appears. Returns the state and the
    /// number of rejected draws.
    pub fn sample_state<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        max_resamples: usize,
    ) -> Result<(OutageState, usize)> {
        for rejected in 0..max_resamples {
            let state = self.draw(rng);
            if self.is_admissible(&state) {
                return Ok((state, rejected));
            }
        }
        Err(Error::ResampleExhausted { budget: max_resamples })
    }

    /// All admissible single (N-1) or double (N-2) element outages over
    /// lines and generators, equally weighted. Monte Carlo mode yields the
    /// intact state alone.
    pub fn enumerate(&self, mode: ContingencyMode) -> Vec<OutageState> {
        #[derive(Clone, Copy)]
        enum Element {
            Line(u32),
            Gen(u32),
        }
        let elements: Vec<Element> = self
            .network
            .lines()
            .iter()
            .map(|l| Element::Line(l.id))
            .chain(self.generators.iter().map(|g| Element::Gen(g.id)))
            .collect();
        let apply = |state: &mut OutageState, e: Element| match e {
            Element::Line(id) => {
                state.lines_out.insert(id);
            }
            Element::Gen(id) => {
                state.generators_out.insert(id);
            }
        };

        let mut states = Vec::new();
        match mode {
            ContingencyMode::Mcs => states.push(OutageState::intact()),
            ContingencyMode::N1 => {
                for &e in &elements {
                    let mut s = OutageState::intact();
                    apply(&mut s, e);
                    states.push(s);
                }
            }
            ContingencyMode::N2 => {
                for (i, &a) in elements.iter().enumerate() {
                    for &b in &elements[i + 1..] {
                        let mut s = OutageState::intact();
                        apply(&mut s, a);
                        apply(&mut s, b);
                        states.push(s);
                    }
                }
            }
        }
        states.retain(|s| self.is_admissible(s));
        let w = 1.0 / states.len().max(1) as f64;
        for s in &mut states {
            s.weight = w;
        }
        states
    }
}
