//! Planning case data model, case-file loading and validation, and
//! application of a chromosome to obtain a concrete network.
//!
//! Units throughout: capacities and demands in MW, lengths in km, cost
//! rates as documented on [`CostParameters`] and [`GeneratorSpec`].
//! Reactances are in whatever consistent unit the case uses; flows come out
//! of the solver in MW because angles are left unscaled.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::components;

pub const MONTHS: usize = 12;
pub const HOURS_PER_MONTH: f64 = 730.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bus {
    pub id: u32,
    /// Average demand at full load-curve level, MW.
    pub base_demand: f64,
    #[serde(default)]
    pub is_slack: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineStatus {
    Existing,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineSpec {
    pub id: u32,
    pub from_bus: u32,
    pub to_bus: u32,
    pub length_km: f64,
    pub reactance: f64,
    pub forced_outage_rate: f64,
    pub status: LineStatus,
    /// Existing rating, or the starting rating of a candidate once built.
    pub base_capacity_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub id: u32,
    pub bus: u32,
    pub capacity_mw: f64,
    pub forced_outage_rate: f64,
    /// k$/kW
    pub capital_cost: f64,
    /// k$/kWh
    pub operating_cost: f64,
    /// k$/MWh of capacity cut off from the network.
    pub revenue_loss_rate: f64,
    #[serde(default)]
    pub is_new: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadDurationCurve {
    /// One multiplier per month applied uniformly to every bus's base demand.
    pub monthly_multipliers: Vec<f64>,
}

fn default_hours() -> f64 {
    HOURS_PER_MONTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostParameters {
    /// k$/MWh per month.
    pub c_edns: Vec<f64>,
    /// k$/MWh per month.
    pub c_egns: Vec<f64>,
    /// k$/MWh per month.
    pub c_ewl: Vec<f64>,
    /// Line operating and maintenance rate, k$/MW/km.
    pub c_t2: f64,
    #[serde(default = "default_hours")]
    pub hours_per_month: f64,
}

fn default_min_online() -> usize {
    2
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseOptions {
    #[serde(default = "default_min_online")]
    pub min_online_generators: usize,
    /// Include the line operating term in transmission investment.
    #[serde(default = "default_true")]
    pub operating_term: bool,
}

impl Default for CaseOptions {
    fn default() -> Self {
        Self {
            min_online_generators: default_min_online(),
            operating_term: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkCase {
    pub buses: Vec<Bus>,
    pub lines: Vec<LineSpec>,
    pub generators: Vec<GeneratorSpec>,
    pub ldc: LoadDurationCurve,
    pub costs: CostParameters,
    #[serde(default)]
    pub options: CaseOptions,
}

/// Outcome of one named case invariant.
#[derive(Debug, Clone)]
pub struct InvariantCheck {
    pub name: &'static str,
    /// `(field path, message)` when the invariant is violated.
    pub failure: Option<(String, String)>,
}

impl InvariantCheck {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

type Check = std::result::Result<(), (String, String)>;

fn fail(path: impl Into<String>, msg: impl Into<String>) -> Check {
    Err((path.into(), msg.into()))
}

fn check_monthly(path: &str, values: &[f64], positive_le_one: bool) -> Check {
    if values.len() != MONTHS {
        return fail(path, format!("expected {MONTHS} entries, found {}", values.len()));
    }
    for (i, &v) in values.iter().enumerate() {
        let ok = if positive_le_one {
            v > 0.0 && v <= 1.0
        } else {
            v >= 0.0 && v.is_finite()
        };
        if !ok {
            let range = if positive_le_one { "(0, 1]" } else { "[0, inf)" };
            return fail(format!("{path}[{i}]"), format!("{v} is outside {range}"));
        }
    }
    Ok(())
}

impl NetworkCase {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let case = Self::parse(text)?;
        case.validate()?;
        Ok(case)
    }

    /// Parses without checking invariants.
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("case serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Evaluates every case invariant, in a fixed order.
    pub fn invariant_checks(&self) -> Vec<InvariantCheck> {
        let checks: [(&'static str, Check); 10] = [
            ("bus ids unique and contiguous", self.check_bus_ids()),
            ("exactly one slack bus", self.check_slack()),
            ("bus demands nonnegative", self.check_demands()),
            ("line fields", self.check_lines()),
            ("generator fields", self.check_generators()),
            ("load duration curve", check_monthly("ldc.monthly_multipliers", &self.ldc.monthly_multipliers, true)),
            ("cost parameters", self.check_costs()),
            ("options", self.check_options()),
            ("network connectivity", self.check_connectivity()),
            ("generation covers peak demand", self.check_adequacy()),
        ];
        checks
            .into_iter()
            .map(|(name, outcome)| InvariantCheck {
                name,
                failure: outcome.err(),
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self.invariant_checks().into_iter().find_map(|c| c.failure) {
            Some((path, message)) => Err(Error::Validation { path, message }),
            None => Ok(()),
        }
    }

    fn check_bus_ids(&self) -> Check {
        if self.buses.is_empty() {
            return fail("buses", "case has no buses");
        }
        let mut seen = HashSet::new();
        for (i, bus) in self.buses.iter().enumerate() {
            if !seen.insert(bus.id) {
                return fail(format!("buses[{i}].id"), format!("duplicate bus id {}", bus.id));
            }
        }
        let n = self.buses.len() as u32;
        for (i, bus) in self.buses.iter().enumerate() {
            if bus.id != i as u32 + 1 {
                return fail(
                    format!("buses[{i}].id"),
                    format!("bus ids must run 1..={n} in order, found {}", bus.id),
                );
            }
        }
        Ok(())
    }

    fn check_slack(&self) -> Check {
        match self.buses.iter().filter(|b| b.is_slack).count() {
            1 => Ok(()),
            k => fail("buses.is_slack", format!("expected exactly one slack bus, found {k}")),
        }
    }

    fn check_demands(&self) -> Check {
        for (i, bus) in self.buses.iter().enumerate() {
            if !(bus.base_demand >= 0.0 && bus.base_demand.is_finite()) {
                return fail(format!("buses[{i}].base_demand"), "demand must be a nonnegative number");
            }
        }
        Ok(())
    }

    fn has_bus(&self, id: u32) -> bool {
        id >= 1 && id as usize <= self.buses.len()
    }

    fn check_lines(&self) -> Check {
        let mut seen = HashSet::new();
        for (i, line) in self.lines.iter().enumerate() {
            let at = |field: &str| format!("lines[{i}].{field}");
            if !seen.insert(line.id) {
                return fail(at("id"), format!("duplicate line id {}", line.id));
            }
            if !self.has_bus(line.from_bus) {
                return fail(at("from_bus"), format!("unknown bus {}", line.from_bus));
            }
            if !self.has_bus(line.to_bus) {
                return fail(at("to_bus"), format!("unknown bus {}", line.to_bus));
            }
            if line.from_bus == line.to_bus {
                return fail(at("to_bus"), "line endpoints must differ");
            }
            if !(line.length_km > 0.0 && line.length_km.is_finite()) {
                return fail(at("length_km"), "length must be positive");
            }
            if !(line.reactance > 0.0 && line.reactance.is_finite()) {
                return fail(at("reactance"), "reactance must be positive");
            }
            if !(0.0..1.0).contains(&line.forced_outage_rate) {
                return fail(at("forced_outage_rate"), "forced outage rate must lie in [0, 1)");
            }
            if !(line.base_capacity_mw >= 0.0 && line.base_capacity_mw.is_finite()) {
                return fail(at("base_capacity_mw"), "capacity must be nonnegative");
            }
        }
        Ok(())
    }

    fn check_generators(&self) -> Check {
        if self.generators.is_empty() {
            return fail("generators", "case has no generators");
        }
        let mut seen = HashSet::new();
        for (i, g) in self.generators.iter().enumerate() {
            let at = |field: &str| format!("generators[{i}].{field}");
            if !seen.insert(g.id) {
                return fail(at("id"), format!("duplicate generator id {}", g.id));
            }
            if !self.has_bus(g.bus) {
                return fail(at("bus"), format!("unknown bus {}", g.bus));
            }
            if !(g.capacity_mw > 0.0 && g.capacity_mw.is_finite()) {
                return fail(at("capacity_mw"), "capacity must be positive");
            }
            if !(0.0..1.0).contains(&g.forced_outage_rate) {
                return fail(at("forced_outage_rate"), "forced outage rate must lie in [0, 1)");
            }
            for (field, v) in [
                ("operating_cost", g.operating_cost),
                ("capital_cost", g.capital_cost),
                ("revenue_loss_rate", g.revenue_loss_rate),
            ] {
                if !(v >= 0.0 && v.is_finite()) {
                    return fail(at(field), "cost must be nonnegative");
                }
            }
        }
        Ok(())
    }

    fn check_costs(&self) -> Check {
        check_monthly("costs.c_edns", &self.costs.c_edns, false)?;
        check_monthly("costs.c_egns", &self.costs.c_egns, false)?;
        check_monthly("costs.c_ewl", &self.costs.c_ewl, false)?;
        if !(self.costs.c_t2 >= 0.0 && self.costs.c_t2.is_finite()) {
            return fail("costs.c_t2", "rate must be nonnegative");
        }
        if self.costs.hours_per_month != HOURS_PER_MONTH {
            return fail("costs.hours_per_month", format!("must be {HOURS_PER_MONTH}"));
        }
        Ok(())
    }

    fn check_options(&self) -> Check {
        let k = self.options.min_online_generators;
        if k == 0 || k > self.generators.len().max(1) {
            return fail(
                "options.min_online_generators",
                format!("must lie in 1..={}", self.generators.len()),
            );
        }
        Ok(())
    }

    /// Existing lines must tie together every bus that has demand or an
    /// existing generator; new-generator buses may hang on candidates only,
    /// but every bus must be reachable once all candidates are built.
    fn check_connectivity(&self) -> Check {
        if self.check_bus_ids().is_err() || self.check_lines().is_err() {
            return fail("lines", "skipped: bus or line fields invalid");
        }
        let n = self.buses.len();
        let idx = |id: u32| id as usize - 1;
        let mut existing = components(
            n,
            self.lines
                .iter()
                .filter(|l| l.status == LineStatus::Existing)
                .map(|l| (idx(l.from_bus), idx(l.to_bus))),
        );
        let mut required: BTreeSet<usize> = self
            .buses
            .iter()
            .filter(|b| b.base_demand > 0.0 || b.is_slack)
            .map(|b| idx(b.id))
            .collect();
        required.extend(
            self.generators
                .iter()
                .filter(|g| !g.is_new && self.has_bus(g.bus))
                .map(|g| idx(g.bus)),
        );
        if let Some(&root) = required.iter().next() {
            if let Some(&bad) = required.iter().find(|&&b| !existing.same(root, b)) {
                return fail(
                    "lines",
                    format!("existing lines leave bus {} disconnected from bus {}", bad + 1, root + 1),
                );
            }
        }
        let mut full = components(n, self.lines.iter().map(|l| (idx(l.from_bus), idx(l.to_bus))));
        if let Some(bad) = (1..n).find(|&b| !full.same(0, b)) {
            return fail("lines", format!("bus {} is unreachable even with every candidate built", bad + 1));
        }
        Ok(())
    }

    fn check_adequacy(&self) -> Check {
        let capacity: f64 = self.generators.iter().map(|g| g.capacity_mw).sum();
        let peak = self.peak_total_demand();
        if capacity < peak {
            return fail(
                "generators",
                format!("total capacity {capacity} MW is below peak demand {peak} MW"),
            );
        }
        Ok(())
    }

    pub fn base_total_demand(&self) -> f64 {
        self.buses.iter().map(|b| b.base_demand).sum()
    }

    pub fn peak_total_demand(&self) -> f64 {
        let peak = self.ldc.monthly_multipliers.iter().copied().fold(0.0, f64::max);
        peak * self.base_total_demand()
    }

    /// Month (1-based) with the largest multiplier; earliest on ties.
    pub fn peak_month(&self) -> u32 {
        let mut best = 0;
        for (i, &m) in self.ldc.monthly_multipliers.iter().enumerate() {
            if m > self.ldc.monthly_multipliers[best] {
                best = i;
            }
        }
        best as u32 + 1
    }

    pub fn slack_bus(&self) -> u32 {
        self.buses.iter().find(|b| b.is_slack).map_or(1, |b| b.id)
    }

    /// Generator sitting at the slack bus (lowest id if several).
    pub fn nominal_slack_generator(&self) -> Option<u32> {
        let slack = self.slack_bus();
        self.generators
            .iter()
            .filter(|g| g.bus == slack)
            .map(|g| g.id)
            .min()
    }

    pub fn candidate_lines(&self) -> impl Iterator<Item = &LineSpec> {
        self.lines.iter().filter(|l| l.status == LineStatus::Candidate)
    }

    pub fn candidate_count(&self) -> usize {
        self.candidate_lines().count()
    }

    pub fn generator(&self, id: u32) -> Option<&GeneratorSpec> {
        self.generators.iter().find(|g| g.id == id)
    }
}

pub fn load_case(path: impl AsRef<Path>) -> Result<NetworkCase> {
    let case = read_case(path)?;
    case.validate()?;
    if case.options.operating_term {
        for l in case.lines.iter().filter(|l| l.forced_outage_rate == 0.0) {
            log::warn!("line {} has FOR = 0; its operating cost factor is taken as 0", l.id);
        }
    }
    Ok(case)
}

/// Reads and parses a case file without checking invariants.
pub fn read_case(path: impl AsRef<Path>) -> Result<NetworkCase> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    NetworkCase::parse(&text)
}

/// Per-bus demand for `month` (1-based).
pub fn scenario_demand(case: &NetworkCase, month: u32) -> Result<Vec<f64>> {
    if !(1..=MONTHS as u32).contains(&month) {
        return Err(Error::MonthOutOfRange(month));
    }
    let m = case.ldc.monthly_multipliers[month as usize - 1];
    Ok(case.buses.iter().map(|b| b.base_demand * m).collect())
}

/// Build decision per candidate line, in case-file order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Chromosome {
    pub bits: Vec<bool>,
}

impl Chromosome {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(vec![false; len])
    }

    pub fn ones(len: usize) -> Self {
        Self::new(vec![true; len])
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn selected(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Chromosome `k` of the `2^len` enumeration; bit `i` is bit `i` of `k`.
    pub fn from_index(k: u64, len: usize) -> Self {
        Self::new((0..len).map(|i| (k >> i) & 1 == 1).collect())
    }
}

impl fmt::Display for Chromosome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Chromosome> for String {
    fn from(c: Chromosome) -> Self {
        c.to_string()
    }
}

impl TryFrom<String> for Chromosome {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

impl std::str::FromStr for Chromosome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("chromosome strings hold only 0/1, found {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Chromosome::new)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveLine {
    pub id: u32,
    /// Bus indices (bus id − 1).
    pub from: usize,
    pub to: usize,
    pub reactance: f64,
    pub length_km: f64,
    pub forced_outage_rate: f64,
    pub status: LineStatus,
    pub base_capacity_mw: f64,
    pub capacity_mw: f64,
    pub in_service: bool,
}

/// Buses plus every existing line and the selected candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveNetwork {
    buses: Vec<Bus>,
    lines: Vec<ActiveLine>,
    slack: usize,
}

impl ActiveNetwork {
    /// Assembles a network directly; bus ids must be `1..=n` in order.
    pub fn new(buses: Vec<Bus>, lines: Vec<ActiveLine>) -> Result<Self> {
        for (i, b) in buses.iter().enumerate() {
            if b.id != i as u32 + 1 {
                return Err(Error::validation(format!("buses[{i}].id"), "bus ids must run 1..=n"));
            }
        }
        let slack = buses
            .iter()
            .position(|b| b.is_slack)
            .ok_or_else(|| Error::validation("buses.is_slack", "no slack bus"))?;
        for (i, l) in lines.iter().enumerate() {
            if l.from >= buses.len() || l.to >= buses.len() || l.from == l.to {
                return Err(Error::validation(format!("lines[{i}]"), "bad endpoints"));
            }
            if !(l.reactance > 0.0) {
                return Err(Error::validation(format!("lines[{i}].reactance"), "must be positive"));
            }
        }
        Ok(Self { buses, lines, slack })
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn lines(&self) -> &[ActiveLine] {
        &self.lines
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn slack_index(&self) -> usize {
        self.slack
    }

    pub fn capacities(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.capacity_mw).collect()
    }

    /// Total network capacity, the sum of line ratings.
    pub fn network_capacity(&self) -> f64 {
        self.lines.iter().map(|l| l.capacity_mw).sum()
    }

    pub fn with_capacities(&self, capacities: &[f64]) -> Self {
        assert_eq!(capacities.len(), self.lines.len(), "one capacity per line");
        let mut next = self.clone();
        for (line, &c) in next.lines.iter_mut().zip(capacities) {
            line.capacity_mw = c;
        }
        next
    }

    /// Copy with the listed line ids taken out of service.
    pub fn with_outages(&self, lines_out: &BTreeSet<u32>) -> Self {
        let mut next = self.clone();
        for line in &mut next.lines {
            line.in_service = !lines_out.contains(&line.id);
        }
        next
    }

    pub(crate) fn in_service_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.lines.iter().filter(|l| l.in_service).map(|l| (l.from, l.to))
    }
}

/// Existing lines always; candidate `i` iff bit `i` is set, starting from
/// its base rating.
pub fn apply_plan(case: &NetworkCase, chromosome: &Chromosome) -> Result<ActiveNetwork> {
    let expected = case.candidate_count();
    if chromosome.len() != expected {
        return Err(Error::ChromosomeLength {
            expected,
            got: chromosome.len(),
        });
    }
    let mut candidate = 0;
    let mut lines = Vec::with_capacity(case.lines.len());
    for spec in &case.lines {
        let keep = match spec.status {
            LineStatus::Existing => true,
            LineStatus::Candidate => {
                candidate += 1;
                chromosome.bits[candidate - 1]
            }
        };
        if keep {
            lines.push(ActiveLine {
                id: spec.id,
                from: spec.from_bus as usize - 1,
                to: spec.to_bus as usize - 1,
                reactance: spec.reactance,
                length_km: spec.length_km,
                forced_outage_rate: spec.forced_outage_rate,
                status: spec.status,
                base_capacity_mw: spec.base_capacity_mw,
                capacity_mw: spec.base_capacity_mw,
                in_service: true,
            });
        }
    }
    ActiveNetwork::new(case.buses.clone(), lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::tiny_case;

    fn failure_path(case: &NetworkCase) -> String {
        match case.validate() {
            Err(Error::Validation { path, .. }) => path,
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn tiny_case_is_valid() {
        tiny_case().validate().unwrap();
    }

    #[test]
    fn eleven_month_ldc_is_rejected() {
        let mut case = tiny_case();
        case.ldc.monthly_multipliers.pop();
        assert_eq!(failure_path(&case), "ldc.monthly_multipliers");
    }

    #[test]
    fn duplicate_bus_is_rejected() {
        let mut case = tiny_case();
        case.buses[2].id = 2;
        assert_eq!(failure_path(&case), "buses[2].id");
    }

    #[test]
    fn line_invariants() {
        let mut case = tiny_case();
        case.lines[0].to_bus = 1;
        assert_eq!(failure_path(&case), "lines[0].to_bus");

        let mut case = tiny_case();
        case.lines[1].forced_outage_rate = 1.0;
        assert_eq!(failure_path(&case), "lines[1].forced_outage_rate");

        let mut case = tiny_case();
        case.lines[2].reactance = 0.0;
        assert_eq!(failure_path(&case), "lines[2].reactance");
    }

    #[test]
    fn two_slack_buses_rejected() {
        let mut case = tiny_case();
        case.buses[1].is_slack = true;
        assert_eq!(failure_path(&case), "buses.is_slack");
    }

    #[test]
    fn disconnected_existing_network_rejected() {
        let mut case = tiny_case();
        case.lines[1].status = LineStatus::Candidate;
        assert_eq!(failure_path(&case), "lines");
    }

    #[test]
    fn inadequate_generation_rejected() {
        let mut case = tiny_case();
        case.generators[0].capacity_mw = 100.0;
        assert_eq!(failure_path(&case), "generators");
    }

    #[test]
    fn unknown_field_is_parse_error() {
        let mut value: serde_json::Value = serde_json::from_str(&tiny_case().to_json_string()).unwrap();
        value["buses"][0]["voltage"] = 1.0.into();
        assert!(matches!(
            NetworkCase::from_json_str(&value.to_string()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn apply_plan_selects_candidates() {
        let case = tiny_case();
        let none = apply_plan(&case, &Chromosome::zeros(1)).unwrap();
        assert_eq!(none.lines().len(), 2);
        let all = apply_plan(&case, &Chromosome::ones(1)).unwrap();
        assert_eq!(all.lines().len(), 3);
        assert_eq!(all.lines()[2].capacity_mw, 5.0);
        assert!(matches!(
            apply_plan(&case, &Chromosome::zeros(2)),
            Err(Error::ChromosomeLength { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn scenario_demand_scales_base() {
        let mut case = tiny_case();
        case.ldc.monthly_multipliers[3] = 0.8;
        assert_eq!(scenario_demand(&case, 1).unwrap(), vec![0.0, 100.0, 50.0]);
        assert_eq!(scenario_demand(&case, 4).unwrap(), vec![0.0, 80.0, 40.0]);
        assert!(matches!(scenario_demand(&case, 13), Err(Error::MonthOutOfRange(13))));
        assert!(matches!(scenario_demand(&case, 0), Err(Error::MonthOutOfRange(0))));
    }

    #[test]
    fn chromosome_string_form() {
        let c = Chromosome::new(vec![true, false, true]);
        assert_eq!(c.to_string(), "101");
        assert_eq!(Chromosome::try_from("101".to_string()).unwrap(), c);
        assert!(Chromosome::try_from("10x".to_string()).is_err());
        assert_eq!(Chromosome::from_index(5, 4).to_string(), "1010");
    }

    #[test]
    fn peak_month_first_on_ties() {
        let mut case = tiny_case();
        case.ldc.monthly_multipliers = vec![0.5; 12];
        case.ldc.monthly_multipliers[6] = 0.9;
        case.ldc.monthly_multipliers[8] = 0.9;
        assert_eq!(case.peak_month(), 7);
    }
}
