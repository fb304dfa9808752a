use prioplan_core::geometry::{point_avoids_regions, Disc, Point, RegionSet, Workspace};
use proptest::prelude::*;

fn grid() -> impl Strategy<Value = Workspace> {
    (4usize..20, 4usize..20, prop::collection::vec(0.0f64..1.0, 400), 0.05f64..0.5).prop_map(|(w, h, noise, res)| {
        let occ = (0..w * h).map(|k| noise[k % noise.len()] < 0.15).collect();
        Workspace::new(occ, w, h, res, Point::new(-1.0, 0.5)).unwrap()
    })
}

fn inside(ws: &Workspace) -> impl Strategy<Value = Point> {
    let (o, m) = (ws.origin(), ws.max_corner());
    (o.x..m.x, o.y..m.y).prop_map(|(x, y)| Point::new(x, y))
}

proptest! {
    #[test]
    fn disc_free_is_monotone_in_radius((ws, c) in grid().prop_flat_map(|w| { let s = inside(&w); (Just(w), s) }), r1 in 0.01f64..2.0, dr in 0.0f64..1.0) {
        if ws.disc_free(c, r1 + dr) {
            prop_assert!(ws.disc_free(c, r1));
        }
    }

    #[test]
    fn zero_length_sweep_is_a_disc((ws, c) in grid().prop_flat_map(|w| { let s = inside(&w); (Just(w), s) }), r in 0.01f64..1.5) {
        prop_assert_eq!(ws.swept_disc_free(c, c, r), ws.disc_free(c, r));
    }

    #[test]
    fn region_avoidance_is_symmetric(cx in -5.0f64..5.0, cy in -5.0f64..5.0, r in 0.01f64..2.0,
                                     dx in -5.0f64..5.0, dy in -5.0f64..5.0, rd in 0.01f64..2.0) {
        let a = Point::new(cx, cy);
        let b = Point::new(dx, dy);
        let one = RegionSet::from_discs(vec![Disc { center: b, radius: rd }]);
        let other = RegionSet::from_discs(vec![Disc { center: a, radius: r }]);
        prop_assert_eq!(point_avoids_regions(a, r, &one), point_avoids_regions(b, rd, &other));
    }
}

/// Points of the closed disc on a fine polar lattice, plus its boundary.
fn disc_samples(c: Point, r: f64, step: f64) -> Vec<Point> {
    let mut out = vec![c];
    let rings = (r / step).ceil() as usize;
    for k in 1..=rings {
        let rho = (k as f64 * step).min(r);
        let m = ((2.0 * std::f64::consts::PI * rho / step).ceil() as usize).max(8);
        for s in 0..m {
            let a = 2.0 * std::f64::consts::PI * s as f64 / m as f64;
            out.push(Point::new(c.x + rho * a.cos(), c.y + rho * a.sin()));
        }
    }
    out
}

#[test]
fn free_discs_really_are_free() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let mut free_cases = 0;
    for _ in 0..100 {
        let (w, h) = (rng.gen_range(5..25), rng.gen_range(5..25));
        let res = rng.gen_range(0.05..0.4);
        let occ = (0..w * h).map(|_| rng.gen_bool(0.1)).collect();
        let ws = Workspace::new(occ, w, h, res, Point::new(0.0, 0.0)).unwrap();
        let c = Point::new(rng.gen_range(0.0..w as f64 * res), rng.gen_range(0.0..h as f64 * res));
        let r = rng.gen_range(0.02..1.0) * res * 4.0;
        if !ws.disc_free(c, r) {
            continue;
        }
        free_cases += 1;
        for p in disc_samples(c, r, res / 10.0) {
            assert!(ws.point_free(p) || p.x == ws.max_corner().x || p.y == ws.max_corner().y, "{p:?} in occupied cell");
        }
    }
    assert!(free_cases > 10);
}
