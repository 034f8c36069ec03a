use super::*;
use crate::geometry::verify_packing;
use crate::rational::rat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn item(id: &str, w: (i64, i64), d: (i64, i64), h: (i64, i64)) -> Item {
    Item::new(id, rat(w.0, w.1), rat(d.0, d.1), rat(h.0, h.1))
}

fn verify_result(result: &AsymptoticResult, items: &[Item]) {
    let table = ItemTable::new(items.to_vec()).unwrap();
    let report = verify_packing(&result.packing, &table).unwrap();
    assert!(report.feasible, "violations: {:?}", report.violations);
    assert_eq!(
        result.packing.placements.len(),
        items.len(),
        "every item must be placed exactly once"
    );
    assert!(result.report.tall_not_sliced, "tall item crossed an integer plane");
    assert!(
        result.report.overflow_volume <= result.report.overflow_bound,
        "overflow {} above its bound {}",
        result.report.overflow_volume,
        result.report.overflow_bound
    );
}

#[test]
fn classify_rect_is_a_partition() {
    let delta = rat(1, 24);
    let mu = &delta * &delta * &delta * &delta;
    let mut rng = ChaCha8Rng::seed_from_u64(0xc1a5);
    for _ in 0..500 {
        // Mix scales so every class is reachable.
        let pick = |rng: &mut ChaCha8Rng| -> Rat {
            match rng.gen_range(0..4) {
                0 => rat(rng.gen_range(1..=24), 24),
                1 => rat(rng.gen_range(1..=100), 100_000_000),
                2 => rat(rng.gen_range(1..=100), 3000),
                _ => rat(rng.gen_range(1..=100), 100),
            }
        };
        let w = pick(&mut rng).min(rat(1, 1));
        let d = pick(&mut rng).min(rat(1, 1));
        let class = classify_rect(&w, &d, &delta, &mu);
        // Re-derive the class from the definitions and compare.
        let w_mid = w >= mu && w < delta;
        let d_mid = d >= mu && d < delta;
        let expect = if w_mid || d_mid {
            Class2D::Intermediate
        } else if w >= delta && d >= delta {
            Class2D::Big
        } else if w < mu && d >= delta {
            Class2D::Vertical
        } else if w >= delta && d < mu {
            Class2D::Horizontal
        } else {
            Class2D::Tiny
        };
        assert_eq!(class, expect, "w={w} d={d}");
    }
}

#[test]
fn delta_without_band_mass_is_adjusted_epsilon() {
    // eps = 1/4 adjusts to 1/24; no rect has a side in [delta^4, delta).
    let rects = vec![SliceRect { item_index: 0, w: rat(1, 2), d: rat(1, 2), count: 4 }];
    let delta = compute_delta(&rects, &rat(1, 4)).unwrap();
    assert_eq!(delta, rat(1, 24));
    let empty = compute_delta(&[], &rat(1, 4)).unwrap();
    assert_eq!(empty, rat(1, 24));
}

#[test]
fn delta_skips_adversarial_band() {
    // All mass sits inside [ (1/24)^4, 1/24 ), forcing the second candidate.
    let rects = vec![SliceRect { item_index: 0, w: rat(1, 100), d: rat(1, 2), count: 10 }];
    let delta = compute_delta(&rects, &rat(1, 4)).unwrap();
    assert!(delta < rat(1, 100_000));
    let d4 = &delta * &delta * &delta * &delta;
    // The rect side must not lie in the chosen band.
    assert!(rat(1, 100) >= delta || rat(1, 100) < d4);
}

#[test]
fn slicing_counts_are_ceilings() {
    // Two items of rounded height 1 with slice height 1/4.
    let items = vec![item("a", (1, 1), (1, 1), (4, 5)), item("b", (1, 1), (1, 1), (4, 5))];
    let rounded = round_instance_heights(&items, 4, TailVariant::IdentityTail).unwrap();
    let (rects, params) = build_sliced_2d_instance(&rounded.rounded, &rat(1, 4)).unwrap();
    assert_eq!(params.slice_height, rat(1, 4));
    assert_eq!(rects[0].count, 4);
    assert_eq!(rects[1].count, 4);

    // An exact multiple stays exact: rounded height 1/2, slice height 1/8.
    let items = vec![item("a", (1, 1), (1, 1), (1, 2)), item("b", (1, 1), (1, 1), (1, 2))];
    let (rects, params) = build_sliced_2d_instance(&items, &rat(1, 4)).unwrap();
    assert_eq!(params.slice_height, rat(1, 8));
    assert_eq!(rects[0].count, 4);

    assert!(build_sliced_2d_instance(&[], &rat(1, 4)).is_err());
}

#[test]
fn slice_count_matches_independent_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x511ce);
    let items: Vec<Item> = (0..40)
        .map(|i| {
            Item::new(
                format!("r{i:02}"),
                rat(rng.gen_range(1..=64), 64),
                rat(rng.gen_range(1..=64), 64),
                rat(rng.gen_range(1..=64), 64),
            )
        })
        .collect();
    let rounded = round_instance_heights(&items, 4, TailVariant::IdentityTail).unwrap();
    let (rects, params) = build_sliced_2d_instance(&rounded.rounded, &rat(1, 4)).unwrap();
    let total: u64 = rects.iter().map(|r| r.count).sum();
    let expect: u64 = rounded
        .rounded
        .iter()
        .map(|i| crate::rational::ceil_u64(&(&i.h / &params.slice_height)).max(1))
        .sum();
    assert_eq!(total, expect);
}

#[test]
fn single_item_stays_small() {
    let items = vec![item("solo", (1, 2), (1, 2), (1, 2))];
    let result = solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Heuristic).unwrap();
    verify_result(&result, &items);
    assert!(result.packing.used_bins() <= 2, "used {}", result.packing.used_bins());
    assert_eq!(result.report.overflow_volume, rint(0));
}

#[test]
fn cube_copies_round_to_unit_height() {
    // 0.6-cubes round to height 1 and stack one per unit of configuration
    // height.
    let items: Vec<Item> = (0..6)
        .map(|i| item(&format!("c{i}"), (3, 5), (3, 5), (3, 5)))
        .collect();
    let result = solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Heuristic).unwrap();
    verify_result(&result, &items);
}

#[test]
fn empty_instance_is_empty() {
    let result = solve_asymptotic_bp(&[], &rat(1, 4), &ContainerSource::Heuristic).unwrap();
    assert_eq!(result.packing.used_bins(), 0);
}

#[test]
fn rejects_bad_epsilon() {
    let items = vec![item("a", (1, 2), (1, 2), (1, 2))];
    assert!(solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Heuristic).is_ok());
    assert!(solve_asymptotic_bp(&items, &rat(2, 5), &ContainerSource::Heuristic).is_err());
    assert!(solve_asymptotic_bp(&items, &rat(1, 2), &ContainerSource::Heuristic).is_err());
}

#[test]
fn thin_and_tiny_items_flow_through_algorithms() {
    // delta = 1/24, mu = 1/331776: make vertical, horizontal, tiny and
    // intermediate items explicitly.
    let mu_den = 331_776i64;
    let mut items = vec![
        // vertical: w < mu, d >= delta
        Item::new("v0", rat(1, 2 * mu_den), rat(1, 2), rat(1, 2)),
        Item::new("v1", rat(1, 2 * mu_den), rat(1, 2), rat(1, 3)),
        Item::new("v2", rat(1, 3 * mu_den), rat(2, 3), rat(1, 5)),
        // horizontal: w >= delta, d < mu
        Item::new("h0", rat(1, 2), rat(1, 2 * mu_den), rat(1, 2)),
        Item::new("h1", rat(1, 3), rat(1, 2 * mu_den), rat(1, 6)),
        // tiny
        Item::new("t0", rat(1, 2 * mu_den), rat(1, 2 * mu_den), rat(1, 2)),
        Item::new("t1", rat(1, 2 * mu_den), rat(1, 2 * mu_den), rat(1, 8)),
        // intermediate: w in [mu, delta)
        Item::new("m0", rat(1, 100), rat(1, 2), rat(1, 2)),
    ];
    // And a couple of big items.
    items.push(item("b0", (1, 2), (1, 2), (1, 2)));
    items.push(item("b1", (1, 3), (2, 3), (1, 4)));
    let result = solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Heuristic).unwrap();
    verify_result(&result, &items);
    assert!(result.report.intermediate_volume.is_positive());
}

#[test]
fn explicit_descriptor_round_trip() {
    // Four 0.5-cubes; rounded heights 1/2; slice height 1/32; 16 slices
    // each. One configuration with a 2x2 grid of big containers used with
    // multiplicity 16 covers the 64 slices.
    let items: Vec<Item> = (0..4)
        .map(|i| item(&format!("c{i}"), (1, 2), (1, 2), (1, 2)))
        .collect();
    let text = r#"{
        "big_types": [["0.5", "0.5"]],
        "configurations": [{
            "multiplicity": "16",
            "containers": [
                {"kind": "big", "index": 0, "x": "0",   "y": "0",   "w": "0.5", "d": "0.5"},
                {"kind": "big", "index": 0, "x": "0.5", "y": "0",   "w": "0.5", "d": "0.5"},
                {"kind": "big", "index": 0, "x": "0",   "y": "0.5", "w": "0.5", "d": "0.5"},
                {"kind": "big", "index": 0, "x": "0.5", "y": "0.5", "w": "0.5", "d": "0.5"}
            ]
        }]
    }"#;
    let plan = parse_container_plan(text).unwrap();
    let result =
        solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Explicit(plan)).unwrap();
    verify_result(&result, &items);
    assert_eq!(result.packing.used_bins(), 1);

    // An inadequate multiplicity is rejected.
    let starved = text.replace("\"multiplicity\": \"16\"", "\"multiplicity\": \"2\"");
    let plan = parse_container_plan(&starved).unwrap();
    assert!(solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Explicit(plan)).is_err());
}

#[test]
fn random_instances_verify_and_stay_tall_not_sliced() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa57_2026);
    for eps in [rat(1, 4), rat(1, 6)] {
        for round in 0..3 {
            let n = rng.gen_range(20..=80);
            let items: Vec<Item> = (0..n)
                .map(|i| {
                    Item::new(
                        format!("x{round}_{i:03}"),
                        rat(rng.gen_range(1..=64), 64),
                        rat(rng.gen_range(1..=64), 64),
                        rat(rng.gen_range(1..=64), 64),
                    )
                })
                .collect();
            let result = solve_asymptotic_bp(&items, &eps, &ContainerSource::Heuristic).unwrap();
            verify_result(&result, &items);
        }
    }
}
