use rayon::prelude::*;

use super::chromosome::{crossover, fitness, mutate, Chromosome};
use super::GaConfig;
use crate::error::{Error, Result};
use crate::rng::substream2;

/// Stream key for the mutations that seed the initial population.
const INIT_STREAM: u64 = u64::MAX;

/// The unmutated snap followed by `K_ind - 1` copies mutated once each.
pub fn initial_population(snap: &Chromosome, ga: &GaConfig) -> Vec<Chromosome> {
    let mut pop = Vec::with_capacity(ga.k_ind);
    pop.push(snap.clone());
    pop.extend((1..ga.k_ind).map(|i| mutate(snap, &mut substream2(ga.seed, INIT_STREAM, i as u64))));
    pop
}

#[derive(Debug, Clone)]
pub struct EvolveOutcome {
    pub best: Chromosome,
    pub best_fitness: f64,
    /// Best-ever fitness: entry 0 for the initial population, then one per generation.
    pub trace: Vec<f64>,
    pub generations: usize,
}

fn evaluate(pop: &[Chromosome]) -> Result<Vec<f64>> {
    pop.par_iter().map(fitness).collect()
}

/// Generational loop.
///
/// Each generation keeps the `K_p` fittest individuals (ties to the lower
/// index) as parents, mates them in ranked pairs (1,2), (3,4), ... and fills
/// the population back to `K_ind`. A child that beats both its parents enters
/// as is; any other child is mutated once and the mutant enters whatever its
/// fitness. Stops at `fitness_tol` or after `K_ite` generations and returns
/// the best individual ever seen.
pub fn evolve(initial: Vec<Chromosome>, ga: &GaConfig) -> Result<EvolveOutcome> {
    ga.validate()?;
    let Some(first) = initial.first() else {
        return Err(Error::Contract("empty initial population".into()));
    };
    if initial.iter().any(|c| c.layout() != first.layout()) {
        return Err(Error::Contract("initial population mixes window layouts".into()));
    }

    let mut pop = initial;
    let mut fits = evaluate(&pop)?;
    let start = argmin(&fits);
    let mut best = pop[start].clone();
    let mut best_fitness = fits[start];
    let mut trace = vec![best_fitness];
    let mut generations = 0;

    while generations < ga.k_ite && best_fitness > ga.fitness_tol {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fits[a].total_cmp(&fits[b]).then(a.cmp(&b)));
        let parents: Vec<(Chromosome, f64)> =
            order.iter().take(ga.k_p).map(|&i| (pop[i].clone(), fits[i])).collect();

        let pairs = (parents.len() / 2).max(1);
        let offspring_count = ga.k_ind.saturating_sub(parents.len());
        let mut children = Vec::with_capacity(offspring_count + 1);
        let mut p = 0;
        while children.len() < offspring_count {
            let (ia, ib) = if parents.len() >= 2 { (2 * (p % pairs), 2 * (p % pairs) + 1) } else { (0, 0) };
            let (a, fa) = &parents[ia];
            let (b, fb) = &parents[ib];
            let (c1, c2) = crossover(a, b)?;
            let bar = fa.min(*fb);
            children.push((c1, bar));
            children.push((c2, bar));
            p += 1;
        }
        children.truncate(offspring_count);

        let gen = generations as u64;
        let base = parents.len();
        let admitted: Vec<(Chromosome, f64)> = children
            .into_par_iter()
            .enumerate()
            .map(|(i, (child, bar))| {
                let f = fitness(&child)?;
                if f < bar {
                    return Ok((child, f));
                }
                let mutant = mutate(&child, &mut substream2(ga.seed, gen, (base + i) as u64));
                let fm = fitness(&mutant)?;
                Ok((mutant, fm))
            })
            .collect::<Result<_>>()?;

        pop.clear();
        fits.clear();
        for (c, f) in parents.into_iter().chain(admitted) {
            pop.push(c);
            fits.push(f);
        }
        let i = argmin(&fits);
        if fits[i] < best_fitness {
            best_fitness = fits[i];
            best = pop[i].clone();
        }
        generations += 1;
        trace.push(best_fitness);
    }

    Ok(EvolveOutcome { best, best_fitness, trace, generations })
}

fn argmin(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}
