use std::cmp::Ordering;
use std::time::Instant;

use super::evaluator::{minimize_suite, Evaluator};
use super::{Algorithm, GenerationBudget, GenerationReport, Timeline};
use crate::bytecode::CompiledModule;
use crate::runtime::EngineError;
use crate::search::{crossover, mutate_suite, sample_random_testcase, RngStream, SearchConfig, SearchContext};
use crate::testcase::TestSuite;

/// Upper bound on the number of tests in an initial random suite.
pub const INITIAL_SUITE_SIZE_CAP: usize = 10;

#[derive(Debug, Clone)]
struct Individual {
    suite: TestSuite,
    fitness: f64,
    coverage: f64,
}

impl Individual {
    /// Lower fitness first, then fewer statements.
    fn better_than(&self, other: &Individual) -> bool {
        rank(self, other) == Ordering::Less
    }
}

fn rank(a: &Individual, b: &Individual) -> Ordering {
    a.fitness
        .total_cmp(&b.fitness)
        .then_with(|| a.suite.size().cmp(&b.suite.size()))
}

fn random_suite(ctx: &SearchContext, rng: &mut RngStream) -> TestSuite {
    let cap = ctx.cfg.max_suite_size.min(INITIAL_SUITE_SIZE_CAP);
    let n = 1 + rng.below(cap);
    TestSuite::new(
        (0..n)
            .map(|_| sample_random_testcase(ctx, rng))
            .filter(|t| !t.is_empty())
            .collect(),
    )
}

fn tournament<'p>(pop: &'p [Individual], size: usize, rng: &mut RngStream) -> &'p Individual {
    let mut best = &pop[rng.below(pop.len())];
    for _ in 1..size {
        let c = &pop[rng.below(pop.len())];
        if c.better_than(best) {
            best = c;
        }
    }
    best
}

/// Tracks the suite with the highest coverage seen so far (ties go to the
/// lower fitness, then the smaller suite).
struct BestByCoverage(Option<Individual>);

impl BestByCoverage {
    fn offer(&mut self, ind: &Individual) {
        let replace = match &self.0 {
            None => true,
            Some(b) => match ind.coverage.total_cmp(&b.coverage) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => rank(ind, b) == Ordering::Less,
            },
        };
        if replace {
            self.0 = Some(ind.clone());
        }
    }
}

/// Generational GA over whole test suites minimizing the suite fitness.
pub fn whole_suite_generate(
    cm: &CompiledModule,
    cfg: &SearchConfig,
    budget: GenerationBudget,
) -> Result<GenerationReport, EngineError> {
    let start = Instant::now();
    let pool = cm.pool_for(cfg.use_annotations);
    let ctx = SearchContext::new(&pool, &cm.constants, cfg);
    let mut rng = RngStream::from_seed(cfg.seed);
    let mut ev = Evaluator::new(cm, cfg)?;
    let baseline = ev.evaluate(&TestSuite::default())?;
    let mut timeline = Timeline::new(start, baseline.coverage);
    let mut archive = BestByCoverage(None);

    let evaluate = |ev: &mut Evaluator, suite: TestSuite| -> Result<Individual, EngineError> {
        let e = ev.evaluate(&suite)?;
        Ok(Individual {
            suite,
            fitness: e.fitness,
            coverage: e.coverage,
        })
    };

    let mut population = Vec::with_capacity(cfg.population);
    for _ in 0..cfg.population {
        let ind = evaluate(&mut ev, random_suite(&ctx, &mut rng))?;
        archive.offer(&ind);
        timeline.record(ind.coverage);
        population.push(ind);
    }
    population.sort_by(rank);
    let mut fitness_history = vec![population[0].fitness];
    let mut iterations = 0u64;

    while population[0].fitness > 0.0 && !budget.exhausted(iterations, start) {
        let mut next: Vec<Individual> = population.iter().take(cfg.elitism).cloned().collect();
        while next.len() < cfg.population {
            let p1 = tournament(&population, cfg.tournament_size, &mut rng);
            let p2 = tournament(&population, cfg.tournament_size, &mut rng);
            let (o1, o2) = if rng.chance(cfg.crossover_rate) {
                crossover(&p1.suite, &p2.suite, &mut rng)
            } else {
                (p1.suite.clone(), p2.suite.clone())
            };
            for offspring in [o1, o2] {
                if next.len() >= cfg.population {
                    break;
                }
                let mut mutated = mutate_suite(&offspring, &ctx, &mut rng);
                if mutated.is_empty() {
                    mutated = random_suite(&ctx, &mut rng);
                }
                let ind = evaluate(&mut ev, mutated)?;
                archive.offer(&ind);
                timeline.record(ind.coverage);
                next.push(ind);
            }
        }
        next.sort_by(rank);
        population = next;
        iterations += 1;
        fitness_history.push(population[0].fitness);
        ev.retain(population.iter().flat_map(|i| i.suite.tests.iter()));
        log::debug!(
            "generation {iterations}: best fitness {:.9}, best coverage {:.4}",
            population[0].fitness,
            timeline.best()
        );
    }

    let best = archive.0.expect("population is never empty");
    let best_suite = minimize_suite(&best.suite, &mut ev)?;
    let final_eval = ev.evaluate(&best_suite)?;
    debug_assert_eq!(final_eval.coverage, best.coverage);
    Ok(GenerationReport {
        algorithm: Algorithm::WholeSuite,
        use_annotations: cfg.use_annotations,
        seed: cfg.seed,
        best_suite,
        final_coverage: final_eval.coverage,
        final_fitness: final_eval.fitness,
        timeline: timeline.finish(final_eval.coverage),
        iterations,
        executions: ev.executions,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        fitness_history,
        passing_tests: 0,
        failing_tests: 0,
    })
}
