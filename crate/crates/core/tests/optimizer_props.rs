use std::collections::BTreeSet;

use cellplan::eval::{EvalSettings, Evaluator};
use cellplan::optimizer::{
    init_population, nsga2_run, real_crossover, real_mutation, select_survivors, Chromosome,
    DimPolicy, GaParams, Member, PlanMode, Problem, Score,
};
use cellplan::scenario::{build_pixel_grid, sample_users, PixelGrid, Scenario, UserSet};
use cellplan::{scenarios, sizing, Deployment, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dominated_by(a: &[f64], b: &[f64]) -> bool {
    b.iter().zip(a).all(|(x, y)| x <= y) && b.iter().zip(a).any(|(x, y)| x < y)
}

/// Reference survivor choice: rank each point by peeling, compute crowding
/// per front by direct neighbour lookup, sort, and keep the first `n`.
fn reference_survivors(v: &[Vec<f64>], n: usize) -> BTreeSet<usize> {
    let mut front = vec![usize::MAX; v.len()];
    let mut k = 0;
    while front.contains(&usize::MAX) {
        let open: Vec<usize> = (0..v.len()).filter(|&i| front[i] == usize::MAX).collect();
        for &i in &open {
            if !open.iter().any(|&j| dominated_by(&v[i], &v[j])) {
                front[i] = k;
            }
        }
        k += 1;
    }
    let mut crowd = vec![0.0f64; v.len()];
    for f in 0..k {
        let m: Vec<usize> = (0..v.len()).filter(|&i| front[i] == f).collect();
        for obj in 0..v[0].len() {
            let mut o = m.clone();
            o.sort_by(|&a, &b| v[a][obj].total_cmp(&v[b][obj]).then(a.cmp(&b)));
            let span = v[o[o.len() - 1]][obj] - v[o[0]][obj];
            for p in 0..o.len() {
                if p == 0 || p == o.len() - 1 {
                    crowd[o[p]] = f64::INFINITY;
                } else if span > 0.0 {
                    crowd[o[p]] += (v[o[p + 1]][obj] - v[o[p - 1]][obj]) / span;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| {
        front[a]
            .cmp(&front[b])
            .then(crowd[b].total_cmp(&crowd[a]))
            .then(a.cmp(&b))
    });
    order.into_iter().take(n).collect()
}

fn tagged_member(tag: usize, objectives: Vec<f64>) -> Member {
    let dep = Deployment::new(vec![Point::new(tag as f64, 0.0)], vec![]);
    Member {
        chromosome: Chromosome::cell(dep),
        score: Score {
            objectives: objectives.clone(),
            penalized: objectives,
            penalty: 0.0,
            f1: 0,
            f2: 0.0,
            f3: None,
            n_wbs: 1,
            n_ubs: 0,
        },
    }
}

#[test]
fn survivors_match_reference_sorter() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let size = rng.random_range(2..80);
        let n = rng.random_range(1..=size);
        let v: Vec<Vec<f64>> = (0..size)
            .map(|_| vec![rng.random_range(0..12) as f64, rng.random_range(0.0..10.0)])
            .collect();
        let members = v.iter().enumerate().map(|(i, o)| tagged_member(i, o.clone())).collect();
        let got: BTreeSet<usize> = select_survivors(members, n)
            .members
            .iter()
            .map(|m| m.chromosome.deployment.wbs[0].x as usize)
            .collect();
        assert_eq!(got, reference_survivors(&v, n));
    }
}

struct Fixture {
    scenario: Scenario,
    users: UserSet,
    grid: PixelGrid,
}

fn desk() -> Fixture {
    let mut scenario = scenarios::bundled("scenario1")
        .unwrap()
        .unwrap()
        .with_user_total(200);
    scenario.ga.n_pop = 16;
    scenario.ga.n_iterations = 12;
    let users = sample_users(&scenario, 4);
    let grid = build_pixel_grid(&scenario, scenario.area.pixel_size_m).unwrap();
    Fixture {
        scenario,
        users,
        grid,
    }
}

fn problem(f: &Fixture) -> Problem<'_> {
    let ev = Evaluator::new(&f.scenario, &f.users, &f.grid, EvalSettings::default());
    Problem::new(ev, PlanMode::Cell, sizing::size(&f.scenario))
}

#[test]
fn runs_are_deterministic_for_a_seed() {
    let f = desk();
    let p = problem(&f);
    let a = nsga2_run(&p, &f.scenario.ga, 5);
    let b = nsga2_run(&p, &f.scenario.ga, 5);
    assert_eq!(a.population, b.population);
    assert_eq!(a.history, b.history);
    let c = nsga2_run(&p, &f.scenario.ga, 6);
    assert_ne!(a.history, c.history);
}

#[test]
fn zero_iterations_returns_the_ranked_initial_population() {
    let f = desk();
    let p = problem(&f);
    let params = GaParams {
        n_iterations: 0,
        ..f.scenario.ga.clone()
    };
    let r = nsga2_run(&p, &params, 9);
    assert_eq!(r.history.len(), 1);
    assert_eq!(r.evaluations, params.n_pop);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let init: BTreeSet<String> = init_population(&p, &params, &mut rng)
        .iter()
        .map(|c| format!("{:?}", c.deployment))
        .collect();
    let got: BTreeSet<String> = r
        .population
        .members
        .iter()
        .map(|m| format!("{:?}", m.chromosome.deployment))
        .collect();
    assert_eq!(init, got);
}

#[test]
fn first_front_trades_cost_against_unsatisfied_users() {
    let f = desk();
    let p = problem(&f);
    let r = nsga2_run(&p, &f.scenario.ga, 2);
    let mut front: Vec<&Member> = r.population.first_front();
    assert!(!front.is_empty());
    front.sort_by(|a, b| a.score.penalized[1].total_cmp(&b.score.penalized[1]));
    for w in front.windows(2) {
        assert!(w[1].score.penalized[0] <= w[0].score.penalized[0]);
    }
    // best values never regress under elitism
    for w in r.history.windows(2) {
        assert!(w[1].best_f1 <= w[0].best_f1);
        assert!(w[1].best_f2 <= w[0].best_f2);
    }
}

#[test]
fn operators_keep_chromosomes_valid() {
    let f = desk();
    let p = problem(&f);
    let bounds = p.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let pop = init_population(&p, &f.scenario.ga, &mut rng);
    for i in 0..2000 {
        let a = &pop[rng.random_range(0..pop.len())];
        let b = &pop[rng.random_range(0..pop.len())];
        let policy = if i % 2 == 0 {
            DimPolicy::MinDim
        } else {
            DimPolicy::MaxDim
        };
        let (c1, c2) = real_crossover(a, b, 0.15, policy, &bounds, &mut rng).unwrap();
        let m = real_mutation(&c1, 0.15, &bounds, 0.3, p.min_total(), &mut rng);
        for c in [&c1, &c2, &m] {
            assert!(c.deployment.within(&bounds));
            assert!(!c.deployment.wbs.is_empty());
        }
        assert!(m.n_total() >= p.min_total());
    }
}
