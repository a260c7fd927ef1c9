use cellplan::radio::{
    line_of_sight, monte_carlo_coverage, p_los, path_loss_db, LinkKind, LinkModel, LinkState,
};
use cellplan::scenario::{build_pixel_grid, RadioParams, Scenario};
use cellplan::{Point, Rect};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn path_loss_and_los_probability_are_monotone() {
    let r = RadioParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(1.0..2000.0);
        let b: f64 = rng.random_range(1.0..2000.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        assert!(p_los(lo, r.a_los) >= p_los(hi, r.a_los));
        for kind in [LinkKind::Access, LinkKind::Backhaul] {
            for state in [LinkState::Los, LinkState::Nlos] {
                assert!(
                    path_loss_db(&r, lo, state, kind, 0.0) <= path_loss_db(&r, hi, state, kind, 0.0)
                );
            }
        }
    }
    for kind in [LinkKind::Access, LinkKind::Backhaul] {
        for state in [LinkState::Los, LinkState::Nlos] {
            assert_eq!(path_loss_db(&r, 1.0, state, kind, 0.0), 70.0);
        }
    }
}

#[test]
fn coverage_probability_agrees_with_monte_carlo() {
    let r = RadioParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 1_000_000;
    for _ in 0..20 {
        let kind = if rng.random_bool(0.5) {
            LinkKind::Access
        } else {
            LinkKind::Backhaul
        };
        let d = rng.random_range(1.0..250.0);
        let model = LinkModel::new(&r, kind);
        let mean = model.mean_sinr(d, rng.random_bool(0.2), 0.0);
        // thresholds near the mean keep the probability away from 0 and 1
        let gamma = mean.mixture_db() + rng.random_range(-8.0..8.0);
        let sigma = r.sigma(kind);
        let exact = mean.coverage_probability(gamma, sigma);
        let mc = monte_carlo_coverage(&mean, gamma, sigma, draws, &mut rng);
        let se = (exact * (1.0 - exact) / draws as f64).sqrt().max(1e-9);
        assert!(
            (exact - mc).abs() <= 3.0 * se + 1e-12,
            "d={d} gamma={gamma}: exact {exact} vs mc {mc} (se {se})"
        );
    }
}

fn grid_scenario(obstacles: Vec<Rect>) -> Scenario {
    let json = serde_json::json!({
        "area": {"x_min": 0.0, "x_max": 100.0, "y_min": 0.0, "y_max": 100.0},
        "subareas": [{"region": {"x_min": 0.0, "x_max": 100.0, "y_min": 0.0, "y_max": 100.0},
                      "user_count": 0}],
        "obstacles": obstacles,
    });
    Scenario::from_json(&json.to_string()).unwrap()
}

/// Shortest distance between segment `a→b` and rectangle `r` (0 if they meet).
fn segment_rect_distance(a: &Point, b: &Point, r: &Rect) -> f64 {
    let steps = 2000;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let p = Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y));
        let dx = (r.x_min - p.x).max(0.0).max(p.x - r.x_max);
        let dy = (r.y_min - p.y).max(0.0).max(p.y - r.y_max);
        best = best.min(dx.hypot(dy));
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn los_is_symmetric_and_respects_continuous_geometry(
        ax in 0.0f64..100.0, ay in 0.0f64..100.0, bx in 0.0f64..100.0, by in 0.0f64..100.0,
        ox in 0u8..8, oy in 0u8..8, ow in 1u8..3, oh in 1u8..3,
    ) {
        let o = Rect::new(
            f64::from(ox) * 10.0 + 10.0,
            f64::from(ox + ow) * 10.0 + 10.0,
            f64::from(oy) * 10.0 + 10.0,
            f64::from(oy + oh) * 10.0 + 10.0,
        );
        let s = grid_scenario(vec![o]);
        let g = build_pixel_grid(&s, 10.0).unwrap();
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        let los = line_of_sight(&a, &b, &g);
        prop_assert_eq!(los, line_of_sight(&b, &a, &g));
        // the rasterized path stays within one pixel diagonal of the segment
        // between the two cell centers, so a wide margin guarantees a clear path
        let ca = g.centers[g.index(g.cell_of(&a).0, g.cell_of(&a).1)];
        let cb = g.centers[g.index(g.cell_of(&b).0, g.cell_of(&b).1)];
        if segment_rect_distance(&ca, &cb, &o) > 10.0 * std::f64::consts::SQRT_2 {
            prop_assert!(los);
        }
    }

    #[test]
    fn a_full_height_wall_blocks_every_crossing(
        ay in 0.0f64..100.0, by in 0.0f64..100.0, ax in 0.0f64..40.0, bx in 60.0f64..100.0,
    ) {
        let s = grid_scenario(vec![Rect::new(40.0, 60.0, 0.0, 100.0)]);
        let g = build_pixel_grid(&s, 10.0).unwrap();
        prop_assert!(!line_of_sight(&Point::new(ax, ay), &Point::new(bx, by), &g));
    }
}
