use cellplan::backhaul::{fiber_cost, repair_assignment};
use cellplan::scenario::CostParams;
use cellplan::Point;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Written out term by term over the full 0/1 connection matrix.
fn reference_cost(
    wbs: &[Point],
    faps: &[Point],
    co: Point,
    connect: &[Vec<u8>],
    select: &[u8],
    c: &CostParams,
) -> f64 {
    let mut total = 0.0;
    for (b, row) in connect.iter().enumerate() {
        for (f, &x) in row.iter().enumerate() {
            let dx = wbs[b].x - faps[f].x;
            let dy = wbs[b].y - faps[f].y;
            total += f64::from(x) * c.c_d * (dx * dx + dy * dy).sqrt();
        }
    }
    for (f, &z) in select.iter().enumerate() {
        let dx = faps[f].x - co.x;
        let dy = faps[f].y - co.y;
        total += f64::from(z) * (c.c_s + c.c_f * (dx * dx + dy * dy).sqrt());
    }
    total
}

#[test]
fn fiber_cost_matches_reference_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..50 {
        let n_w = rng.random_range(0..8);
        let n_f = rng.random_range(1..6);
        let mut pt = || Point::new(rng.random_range(0.0..500.0), rng.random_range(0.0..500.0));
        let wbs: Vec<Point> = (0..n_w).map(|_| pt()).collect();
        let faps: Vec<Point> = (0..n_f).map(|_| pt()).collect();
        let co = pt();
        let costs = CostParams {
            c_s: rng.random_range(0.0..1.0),
            c_f: rng.random_range(0.0..0.1),
            c_d: rng.random_range(0.0..0.1),
            ..CostParams::default()
        };
        let assignment: Vec<Option<usize>> = (0..n_w)
            .map(|_| rng.random_bool(0.9).then(|| rng.random_range(0..n_f)))
            .collect();
        let selected: Vec<bool> = (0..n_f).map(|_| rng.random_bool(0.5)).collect();
        let connect: Vec<Vec<u8>> = assignment
            .iter()
            .map(|a| (0..n_f).map(|f| u8::from(*a == Some(f))).collect())
            .collect();
        let select: Vec<u8> = selected.iter().map(|&s| u8::from(s)).collect();
        let got = fiber_cost(&wbs, &faps, co, &assignment, &selected, &costs).total;
        let want = reference_cost(&wbs, &faps, co, &connect, &select, &costs);
        assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
    }
}

proptest! {
    #[test]
    fn fiber_cost_is_permutation_invariant(
        w in prop::collection::vec((0.0f64..500.0, 0.0f64..500.0), 1..8),
        f in prop::collection::vec((0.0f64..500.0, 0.0f64..500.0), 1..6),
        rot_w in 0usize..8, rot_f in 0usize..6,
    ) {
        let wbs: Vec<Point> = w.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let faps: Vec<Point> = f.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let co = Point::new(250.0, 250.0);
        let costs = CostParams::default();
        let (assignment, selected) = repair_assignment(&wbs, &faps, 4);
        let base = fiber_cost(&wbs, &faps, co, &assignment, &selected, &costs).total;

        let (nw, nf) = (wbs.len(), faps.len());
        let pw = |i: usize| (i + rot_w) % nw;
        let pf = |i: usize| (i + rot_f) % nf;
        let mut wbs2 = wbs.clone();
        let mut a2 = assignment.clone();
        for i in 0..nw {
            wbs2[pw(i)] = wbs[i];
            a2[pw(i)] = assignment[i].map(pf);
        }
        let mut faps2 = faps.clone();
        let mut s2 = selected.clone();
        for i in 0..nf {
            faps2[pf(i)] = faps[i];
            s2[pf(i)] = selected[i];
        }
        let permuted = fiber_cost(&wbs2, &faps2, co, &a2, &s2, &costs).total;
        prop_assert!((base - permuted).abs() <= 1e-9 * base.max(1.0));
    }

    #[test]
    fn repair_never_exceeds_capacity(
        w in prop::collection::vec((0.0f64..500.0, 0.0f64..500.0), 0..20),
        f in prop::collection::vec((0.0f64..500.0, 0.0f64..500.0), 1..6),
        cap in 1u32..5,
    ) {
        let wbs: Vec<Point> = w.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let faps: Vec<Point> = f.iter().map(|&(x, y)| Point::new(x, y)).collect();
        let (assignment, selected) = repair_assignment(&wbs, &faps, cap);
        for fi in 0..faps.len() {
            let load = assignment.iter().filter(|a| **a == Some(fi)).count();
            prop_assert!(load as u32 <= cap);
            prop_assert_eq!(load > 0, selected[fi]);
        }
        let unassigned = assignment.iter().filter(|a| a.is_none()).count();
        prop_assert_eq!(unassigned, wbs.len().saturating_sub(cap as usize * faps.len()));
    }
}
