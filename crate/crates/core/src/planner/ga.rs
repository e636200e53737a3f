//! Genetic search over candidate-line selections: binary tournament, uniform
//! crossover, bit-flip mutation and elitism. Fitness is cached per
//! chromosome and new chromosomes are evaluated in parallel.

use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::evaluate::{Evaluator, FitnessRecord};
use super::{EvalConfig, UpgradePolicy};
use crate::contingency::ContingencyMode;
use crate::error::{Error, Result};
use crate::network::{Chromosome, NetworkCase};
use crate::rng::{self, TAG_GA};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub population_size: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means 1 / chromosome length.
    pub mutation_rate: Option<f64>,
    pub tournament_size: usize,
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 10,
            generations: 20,
            crossover_rate: 0.9,
            mutation_rate: None,
            tournament_size: 2,
            elitism_count: 1,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn check(&self) -> Result<()> {
        if self.population_size == 0 {
            return Err(Error::InvalidInput("population must be at least 1".into()));
        }
        if self.tournament_size == 0 {
            return Err(Error::InvalidInput("tournament size must be at least 1".into()));
        }
        if self.elitism_count >= self.population_size {
            return Err(Error::InvalidInput(format!(
                "elitism {} must be below population {}",
                self.elitism_count, self.population_size
            )));
        }
        for (name, p) in [("crossover", Some(self.crossover_rate)), ("mutation", self.mutation_rate)] {
            if let Some(p) = p {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidInput(format!("{name} rate {p} outside [0, 1]")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationSummary {
    pub generation: usize,
    /// Best objective found so far, k$; `None` while nothing is feasible.
    pub best_j: Option<f64>,
    pub feasible: usize,
    /// Distinct chromosomes evaluated so far.
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub mode: ContingencyMode,
    pub policy: UpgradePolicy,
    pub best: FitnessRecord,
    pub history: Vec<GenerationSummary>,
    pub evaluations: usize,
}

struct Search<'e, 'c> {
    evaluator: &'e Evaluator<'c>,
    cache: HashMap<Chromosome, FitnessRecord>,
}

impl Search<'_, '_> {
    /// Evaluates anything not yet cached and returns the population's J values.
    fn fitness(&mut self, population: &[Chromosome]) -> Result<Vec<f64>> {
        let mut fresh: Vec<&Chromosome> = Vec::new();
        for c in population {
            if !self.cache.contains_key(c) && !fresh.contains(&c) {
                fresh.push(c);
            }
        }
        let evaluator = self.evaluator;
        let records: Vec<FitnessRecord> = fresh
            .par_iter()
            .map(|c| evaluator.evaluate_or_infeasible(c))
            .collect::<Result<_>>()?;
        for r in records {
            self.cache.insert(r.chromosome.clone(), r);
        }
        Ok(population.iter().map(|c| self.cache[c].j()).collect())
    }
}

fn random_chromosome(rng: &mut ChaCha8Rng, len: usize) -> Chromosome {
    Chromosome::new((0..len).map(|_| rng.random_bool(0.5)).collect())
}

/// Index of the best individual; lowest index wins ties.
fn best_index(fitness: &[f64]) -> usize {
    (0..fitness.len())
        .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)))
        .expect("non-empty population")
}

fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64], size: usize) -> usize {
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..size {
        let k = rng.random_range(0..fitness.len());
        if fitness[k].total_cmp(&fitness[winner]).is_lt() {
            winner = k;
        }
    }
    winner
}

fn uniform_crossover(rng: &mut ChaCha8Rng, a: &Chromosome, b: &Chromosome) -> (Chromosome, Chromosome) {
    let mut x = a.clone();
    let mut y = b.clone();
    for i in 0..x.len() {
        if rng.random_bool(0.5) {
            std::mem::swap(&mut x.bits[i], &mut y.bits[i]);
        }
    }
    (x, y)
}

fn mutate(rng: &mut ChaCha8Rng, c: &mut Chromosome, rate: f64) {
    for bit in &mut c.bits {
        if rng.random_bool(rate) {
            *bit = !*bit;
        }
    }
}

fn summary(generation: usize, fitness: &[f64], best: f64, evaluations: usize) -> GenerationSummary {
    GenerationSummary {
        generation,
        best_j: best.is_finite().then_some(best),
        feasible: fitness.iter().filter(|j| j.is_finite()).count(),
        evaluations,
    }
}

/// Runs the search and returns the best chromosome seen with its full
/// evaluation.
pub fn run(case: &NetworkCase, ga: &GaConfig, eval: &EvalConfig) -> Result<PlanResult> {
    ga.check()?;
    let len = case.candidate_count();
    let evaluator = Evaluator::new(case, eval.clone())?;
    let mutation = ga
        .mutation_rate
        .unwrap_or(if len == 0 { 0.0 } else { 1.0 / len as f64 });
    let mut rng = rng::stream(ga.seed, &[TAG_GA], 0);
    let mut search = Search {
        evaluator: &evaluator,
        cache: HashMap::new(),
    };

    let mut population: Vec<Chromosome> = (0..ga.population_size)
        .map(|_| random_chromosome(&mut rng, len))
        .collect();
    let mut fitness = search.fitness(&population)?;
    let b = best_index(&fitness);
    let mut best = (population[b].clone(), fitness[b]);
    let mut history = vec![summary(0, &fitness, best.1, search.cache.len())];

    for generation in 1..=ga.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));
        let mut next: Vec<Chromosome> = order[..ga.elitism_count]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < ga.population_size {
            let p1 = &population[tournament(&mut rng, &fitness, ga.tournament_size)];
            let p2 = &population[tournament(&mut rng, &fitness, ga.tournament_size)];
            let (mut c1, mut c2) = if rng.random_bool(ga.crossover_rate) {
                uniform_crossover(&mut rng, p1, p2)
            } else {
                (p1.clone(), p2.clone())
            };
            mutate(&mut rng, &mut c1, mutation);
            mutate(&mut rng, &mut c2, mutation);
            next.push(c1);
            if next.len() < ga.population_size {
                next.push(c2);
            }
        }
        population = next;
        fitness = search.fitness(&population)?;
        let b = best_index(&fitness);
        if fitness[b] < best.1 {
            best = (population[b].clone(), fitness[b]);
        }
        history.push(summary(generation, &fitness, best.1, search.cache.len()));
        log::info!(
            "generation {generation}: best J = {:.3} k$, {} evaluated",
            best.1,
            search.cache.len()
        );
    }

    let evaluations = search.cache.len();
    let best = search.cache.remove(&best.0).expect("best chromosome was evaluated");
    Ok(PlanResult {
        mode: eval.sampler.mode,
        policy: eval.policy,
        best,
        history,
        evaluations,
    })
}
