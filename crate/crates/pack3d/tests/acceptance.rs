//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its measured statistics (visible with `--nocapture`). Every
//! tolerance is pinned in code; comparisons are exact rational comparisons
//! unless a criterion states a numeric tolerance.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pack3d::absolute::{
    enumerate_slot_packings, gap_assign, rotation_5approx, solve_absolute_bp, solve_absolute_sp,
    AbsParams, Slot,
};
use pack3d::asymptotic::{
    config_lp_solve, simplex_solve, solve_asymptotic_bp, Cmp, Configuration2D, Container2D,
    ContainerKind, ContainerSource, Demands, LpProblem, TypeSpaces,
};
use pack3d::gen::{generate_instance, Family};
use pack3d::geometry::{
    total_volume, verify_packing, BinSpec, Item, ItemTable, Packing, PackingKind,
};
use pack3d::harmonic::{
    harmonic_constant_k, harmonic_constant_truncated, harmonic_round, TailVariant,
};
use pack3d::mvbb::{solve_mvbb, MvbbMode, MvbbParams};
use pack3d::oracle::{oracle_opt_bins, OracleLimits};
use pack3d::rational::{harmonic_number, parse_rational, rat, rint, Rat};
use pack3d::strip_transform::{align_stack_tall, cut_strip_to_bins, CutMode};
use pack3d::subroutines::{
    licheng_height_bound, licheng_strip, nfdh_2d, nfdh_fits, volume_bin_pack, LichengBackend,
    LichengMode, Rect2D,
};

fn assert_within(elapsed: Duration, cap: Duration, criterion: &str) {
    assert!(
        elapsed <= cap,
        "{criterion}: took {elapsed:?}, budget {cap:?}"
    );
}

fn check_feasible(packing: &Packing, items: &[Item], context: &str) {
    let table = ItemTable::new(items.to_vec()).unwrap();
    let report = verify_packing(packing, &table).unwrap();
    assert!(report.feasible, "{context}: violations {:?}", report.violations);
    if matches!(packing.kind, PackingKind::Bins) {
        assert_eq!(packing.placements.len(), items.len(), "{context}: items dropped");
    }
}

fn random_items(rng: &mut ChaCha8Rng, tag: &str, n: usize, denom: i64) -> Vec<Item> {
    (0..n)
        .map(|i| {
            Item::new(
                format!("{tag}{i:04}"),
                rat(rng.gen_range(1..=denom), denom),
                rat(rng.gen_range(1..=denom), denom),
                rat(rng.gen_range(1..=denom), denom),
            )
        })
        .collect()
}

/// Criterion 1: the truncated harmonic constant matches the literature
/// value 1.69103 to 1e-5, in under a millisecond.
#[test]
fn criterion_01_harmonic_constant() {
    let start = Instant::now();
    let value = harmonic_constant_truncated(6);
    let target = parse_rational("1.69103").unwrap();
    let diff = if value > target { &value - &target } else { &target - &value };
    assert!(diff < rat(1, 100_000), "|T_inf - 1.69103| = {diff}");
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_millis(1), "criterion 1");
    println!("criterion 1 (harmonic constant): PASS — T_inf(6 terms) within 1e-5, {elapsed:?}");
}

/// Criterion 2: 10^4 seeded sequences with sum at most 1 keep their
/// harmonically rounded sum below T_k for k in {4, 12, 42}, exactly.
#[test]
fn criterion_02_harmonic_sum_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x2a);
    let t_k: Vec<(u64, Rat)> = [4u64, 12, 42]
        .into_iter()
        .map(|k| (k, harmonic_constant_k(k)))
        .collect();
    let mut checked = 0u64;
    for _ in 0..10_000 {
        let m = rng.gen_range(1..=16);
        let raw: Vec<Rat> = (0..m).map(|_| rat(rng.gen_range(1..=64), 64)).collect();
        let sum: Rat = raw.iter().cloned().sum();
        let alphas: Vec<Rat> = if sum > rint(1) {
            raw.iter().map(|a| a / &sum).collect()
        } else {
            raw
        };
        for (k, bound) in &t_k {
            let rounded: Rat = alphas
                .iter()
                .map(|a| harmonic_round(a, *k, TailVariant::IdentityTail).unwrap())
                .sum();
            assert!(
                &rounded <= bound,
                "sum f_{k} = {rounded} exceeds T_{k} = {bound}"
            );
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(5), "criterion 2");
    println!("criterion 2 (harmonic sum bound): PASS — {checked} sums within T_k, {elapsed:?}");
}

/// Criterion 3: layered strip heights respect 4v + 8h_max (general) and
/// 3v + 8h_max (half-thin) on 10^3 seeded instances with n up to 200.
#[test]
fn criterion_03_licheng_bounds() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x3a);
    for case in 0..1000 {
        let n = rng.gen_range(1..=200);
        let items = random_items(&mut rng, &format!("c3_{case}_"), n, 64);
        let strip = licheng_strip(&items, LichengMode::General).unwrap();
        let table = ItemTable::new(items.clone()).unwrap();
        let report = verify_packing(&strip, &table).unwrap();
        assert!(report.feasible);
        assert_eq!(strip.placements.len(), items.len());
        let height = report.strip_height.unwrap();
        assert!(
            height <= licheng_height_bound(&items, LichengMode::General),
            "case {case}: general bound violated"
        );

        let thin: Vec<Item> = items
            .iter()
            .filter(|i| i.w <= rat(1, 2) || i.d <= rat(1, 2))
            .cloned()
            .collect();
        let strip = licheng_strip(&thin, LichengMode::HalfThin).unwrap();
        let table = ItemTable::new(thin.clone()).unwrap();
        let report = verify_packing(&strip, &table).unwrap();
        assert!(report.feasible);
        let height = report.strip_height.unwrap_or_else(|| rint(0));
        assert!(
            height <= licheng_height_bound(&thin, LichengMode::HalfThin),
            "case {case}: half-thin bound violated"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(30), "criterion 3");
    println!("criterion 3 (layered strip bounds): PASS — 1000 instances, both modes, {elapsed:?}");
}

/// Criterion 4: 10^4 random instances passing the area certificate all fit
/// within the box height under NFDH.
#[test]
fn criterion_04_nfdh_certificate() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x4a);
    let mut certified = 0u64;
    let mut attempts = 0u64;
    while certified < 10_000 {
        attempts += 1;
        let n = rng.gen_range(1..=30);
        let rects: Vec<Rect2D> = (0..n)
            .map(|i| {
                Rect2D::new(
                    format!("r{attempts}_{i}"),
                    rat(rng.gen_range(1..=32), 64),
                    rat(rng.gen_range(1..=32), 64),
                )
            })
            .collect();
        if !nfdh_fits(&rint(1), &rint(1), &rects) {
            continue;
        }
        certified += 1;
        let (_, height) = nfdh_2d(&rects, &rint(1)).unwrap();
        assert!(height <= rint(1), "certified set exceeded the box");
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "criterion 4");
    println!(
        "criterion 4 (NFDH certificate): PASS — {certified} certified sets fit ({attempts} sampled), {elapsed:?}"
    );
}

/// Criterion 5: the volume packer stays within 8v + 18 bins on 10^3 random
/// instances.
#[test]
fn criterion_05_volume_packing_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a);
    for case in 0..1000 {
        let n = rng.gen_range(1..=80);
        let items = random_items(&mut rng, &format!("c5_{case}_"), n, 32);
        let cut = volume_bin_pack(&items).unwrap();
        check_feasible(&cut.bins, &items, "volume_bin_pack");
        let bound = rat(8, 1) * total_volume(items.iter()) + rint(18);
        assert!(
            rint(cut.bins.used_bins() as i64) <= bound,
            "case {case}: {} bins above 8v+18 = {bound}",
            cut.bins.used_bins()
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(30), "criterion 5");
    println!("criterion 5 (volume packing): PASS — 1000 instances within 8v+18, {elapsed:?}");
}

/// Criterion 6: every packing emitted by every solver across a shared
/// corpus passes the verifier.
#[test]
fn criterion_06_feasibility_blanket() {
    let start = Instant::now();
    let params = AbsParams::default();
    let backend = LichengBackend;
    let mut packings = 0u64;
    for (f_idx, family) in Family::ALL.iter().enumerate() {
        for seed in 0..4u64 {
            let n = 4 + 7 * (seed as usize + f_idx);
            let items = generate_instance(*family, n, 1000 + seed, 64);

            let cut = volume_bin_pack(&items).unwrap();
            check_feasible(&cut.bins, &items, "volume");
            packings += 1;

            let strip = licheng_strip(&items, LichengMode::General).unwrap();
            check_feasible(&strip, &items, "licheng");
            packings += 1;

            let res = solve_absolute_bp(&items, &params, &backend).unwrap();
            check_feasible(&res.packing, &items, "absolute");
            packings += 1;

            let sp = solve_absolute_sp(&items, &params, &backend).unwrap();
            check_feasible(&sp.strip, &items, "absolute-sp");
            packings += 1;

            let rot = rotation_5approx(&items, &params).unwrap();
            check_feasible(&rot.packing, &items, "rotation");
            packings += 1;

            let asym = solve_asymptotic_bp(&items, &rat(1, 4), &ContainerSource::Heuristic).unwrap();
            check_feasible(&asym.packing, &items, "asymptotic");
            packings += 1;

            let mv = solve_mvbb(
                &items,
                &MvbbParams { epsilon: rat(1, 4), mode: MvbbMode::Aptas, delta: None },
                &backend,
            )
            .unwrap();
            check_feasible(&mv.packing, &items, "mvbb");
            packings += 1;
        }
    }
    let elapsed = start.elapsed();
    println!("criterion 6 (feasibility blanket): PASS — {packings} packings verified, {elapsed:?}");
}

/// Criterion 7: 100 seeded asymptotic runs (n up to 500, eps in {1/4, 1/6})
/// hold the tall-not-sliced property before the cut; the epsilon-layers cut
/// itself rejects any sliced item taller than eps, so success certifies
/// both halves.
#[test]
fn criterion_07_tall_not_sliced() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a);
    let mut runs = 0u64;
    for eps in [rat(1, 4), rat(1, 6)] {
        for _ in 0..50 {
            let n = rng.gen_range(50..=500);
            let items = random_items(&mut rng, &format!("c7_{runs}_"), n, 64);
            let result = solve_asymptotic_bp(&items, &eps, &ContainerSource::Heuristic).unwrap();
            assert!(result.report.tall_not_sliced, "run {runs}: tall item sliced");
            check_feasible(&result.packing, &items, "asymptotic");
            assert!(
                result.report.overflow_volume <= result.report.overflow_bound,
                "run {runs}: overflow accounting violated"
            );
            runs += 1;
        }
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(300), "criterion 7");
    println!("criterion 7 (tall-not-sliced): PASS — {runs} pipeline runs, {elapsed:?}");
}

/// Criterion 8: the alignment gap of 10^3 random rounded stacks stays
/// within H_{1/eps} - 3/2, exactly.
#[test]
fn criterion_08_alignment_gap_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x8a);
    for case in 0..1000 {
        let inv_eps = *[4u64, 6, 8, 12].get(rng.gen_range(0..4)).unwrap();
        let eps = Rat::new(1.into(), inv_eps.into());
        let n = rng.gen_range(1..=40);
        let mut heights: Vec<Rat> = (0..n)
            .map(|_| {
                // Harmonically rounded heights: 1/q for q < 1/eps, or a
                // short tail value.
                let q = rng.gen_range(1..=inv_eps + 4);
                if q < inv_eps {
                    Rat::new(1.into(), q.into())
                } else {
                    rat(rng.gen_range(1..=16), (16 * inv_eps) as i64)
                }
            })
            .collect();
        heights.sort_by(|a, b| b.cmp(a));
        let items: Vec<(String, Rat)> = heights
            .into_iter()
            .enumerate()
            .map(|(i, h)| (format!("s{case}_{i}"), h))
            .collect();
        let stack = align_stack_tall(&items, &eps).unwrap();
        let bound = harmonic_number(inv_eps) - rat(3, 2);
        assert!(
            stack.gap_total <= bound,
            "case {case}: gap {} above H - 3/2 = {bound}",
            stack.gap_total
        );
        // Intervals are disjoint and ordered, and no tall item crosses an
        // integer plane.
        for win in stack.placements.windows(2) {
            assert!(&win[0].1 + &win[0].2 <= win[1].1);
        }
        let (ok, witnesses) = pack3d::strip_transform::check_tall_not_sliced_intervals(
            stack
                .placements
                .iter()
                .map(|(id, z, h)| (id.clone(), z.clone(), h.clone())),
            &eps,
        );
        assert!(ok, "case {case}: sliced tall items {witnesses:?}");
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(5), "criterion 8");
    println!("criterion 8 (alignment gap): PASS — 1000 stacks within H_(1/eps) - 3/2, {elapsed:?}");
}

/// Criterion 9: oracle ratio checks on 500 sampled instances with at most
/// 5 items on the 1/12 grid.
#[test]
fn criterion_09_oracle_ratios() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a);
    let limits = OracleLimits::default();
    let params = AbsParams::default();
    let backend = LichengBackend;
    let mut accepted_guesses = 0u64;
    for case in 0..500 {
        let n = rng.gen_range(1..=5);
        let items = random_items(&mut rng, &format!("c9_{case}_"), n, 12);
        let (opt, witness) = oracle_opt_bins(&items, &BinSpec::unit(), 5, false, &limits)
            .unwrap()
            .expect("n bins always suffice");
        check_feasible(&witness, &items, "oracle witness");

        let rot = rotation_5approx(&items, &params).unwrap();
        check_feasible(&rot.packing, &items, "rotation");
        assert!(
            rot.packing.used_bins() <= 5 * opt,
            "case {case}: rotation used {} bins, 5*OPT = {}",
            rot.packing.used_bins(),
            5 * opt
        );

        let cut = volume_bin_pack(&items).unwrap();
        check_feasible(&cut.bins, &items, "volume");
        let bound = rat(8, 1) * total_volume(items.iter()) + rint(18);
        assert!(rint(cut.bins.used_bins() as i64) <= bound);

        let abs = solve_absolute_bp(&items, &params, &backend).unwrap();
        check_feasible(&abs.packing, &items, "absolute");
        if let Some(k) = abs.bound.k_accepted {
            accepted_guesses += 1;
            assert!(
                abs.packing.used_bins() as u64 <= 13 * k as u64 + 3,
                "case {case}: absolute used {} bins with accepted k = {k}",
                abs.packing.used_bins()
            );
        }
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(600), "criterion 9");
    println!(
        "criterion 9 (oracle ratios): PASS — 500 instances, {accepted_guesses} accepted absolute guesses, {elapsed:?}"
    );
}

/// Criterion 10: the branch-and-bound slot assignment equals the
/// exhaustive optimum on 200 random instances with up to 12 items and up
/// to 3 slots.
#[test]
fn criterion_10_gap_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x10a);
    for case in 0..200 {
        let slot_count = rng.gen_range(1..=3);
        let mut slots = Vec::new();
        for b in 0..slot_count {
            let lo = rat(rng.gen_range(0..=4), 10);
            let hi = &lo + rat(rng.gen_range(1..=5), 10);
            let footprints = if rng.gen_bool(0.4) {
                vec![pack3d::absolute::Footprint {
                    x: rat(0, 1),
                    y: rat(0, 1),
                    w: rat(rng.gen_range(2..=5), 10),
                    d: rat(rng.gen_range(2..=5), 10),
                }]
            } else {
                Vec::new()
            };
            slots.push(Slot { bin: b, lo, hi: hi.min(rint(1)), footprints });
        }
        let n = rng.gen_range(1..=12);
        let items: Vec<Item> = (0..n)
            .map(|i| {
                Item::new(
                    format!("g{case}_{i}"),
                    rat(rng.gen_range(6..=10), 10),
                    rat(rng.gen_range(6..=10), 10),
                    rat(rng.gen_range(1..=4), 20),
                )
            })
            .collect();
        let assignment = gap_assign(&slots, &items, 8).unwrap();
        let best = exhaustive_gap(&slots, &items);
        assert_eq!(
            assignment.packed_volume, best,
            "case {case}: branch-and-bound missed the optimum"
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(60), "criterion 10");
    println!("criterion 10 (GAP exactness): PASS — 200 instances match exhaustive search, {elapsed:?}");
}

/// Plain exhaustive reference for the slot assignment: every item tries
/// every slot (or none) with only capacity/fit feasibility checks.
fn exhaustive_gap(slots: &[Slot], items: &[Item]) -> Rat {
    fn recurse(slots: &[Slot], items: &[Item], idx: usize, capacity: &mut Vec<Rat>) -> Rat {
        if idx == items.len() {
            return rint(0);
        }
        let mut best = recurse(slots, items, idx + 1, capacity);
        let item = &items[idx];
        for (s, slot) in slots.iter().enumerate() {
            if capacity[s] >= item.h && slot.base_position(&item.w, &item.d).is_some() {
                capacity[s] -= &item.h;
                let value = item.volume() + recurse(slots, items, idx + 1, capacity);
                capacity[s] += &item.h;
                if value > best {
                    best = value;
                }
            }
        }
        best
    }
    let mut capacity: Vec<Rat> = slots.iter().map(|s| s.height()).collect();
    recurse(slots, items, 0, &mut capacity)
}

/// Criterion 11: basic LP solutions are exact vertices; the hand-solved
/// three-configuration example reproduces objective 3.
#[test]
fn criterion_11_config_lp() {
    let start = Instant::now();
    // Hand example: configurations {(1,0), (0,1), (1,1)} with demands
    // (3, 2) have optimum 3.
    let spaces = TypeSpaces {
        big: vec![(rat(1, 2), rat(1, 2)), (rat(1, 3), rat(1, 3))],
        widths: vec![],
        depths: vec![],
    };
    let mu = rat(1, 16);
    let config = |counts: &[(usize, u64)]| -> Configuration2D {
        let mut containers = Vec::new();
        let mut y = rat(0, 1);
        for &(t, count) in counts {
            let (w, d) = spaces.big[t].clone();
            let mut x = rat(0, 1);
            for _ in 0..count {
                containers.push(Container2D {
                    kind: ContainerKind::Big(t),
                    x: x.clone(),
                    y: y.clone(),
                    w: w.clone(),
                    d: d.clone(),
                });
                x += &w;
            }
            y += &d;
        }
        Configuration2D { containers }
    };
    let configs = vec![config(&[(0, 1)]), config(&[(1, 1)]), config(&[(0, 1), (1, 1)])];
    for c in &configs {
        c.validate(&spaces, &mu).unwrap();
    }
    let demands = Demands {
        big_counts: vec![rint(3), rint(2)],
        vertical_widths: vec![],
        horizontal_depths: vec![],
        tiny_area: rat(0, 1),
    };
    let outcome = config_lp_solve(&configs, &spaces, &demands, &mu).unwrap();
    assert_eq!(outcome.objective, rint(3), "hand example objective");

    // 100 random covering LPs: exact satisfaction and vertex property.
    let mut rng = ChaCha8Rng::seed_from_u64(0x11a);
    for case in 0..100 {
        let n = rng.gen_range(2..=7);
        let m = rng.gen_range(1..=5);
        let mut rows = Vec::new();
        for _ in 0..m {
            let mut coeffs: Vec<Rat> = (0..n).map(|_| rint(rng.gen_range(0..=3))).collect();
            let j = rng.gen_range(0..n);
            if coeffs[j] == rint(0) {
                coeffs[j] = rint(1);
            }
            rows.push((coeffs, Cmp::Ge, rint(rng.gen_range(0..=8))));
        }
        let problem = LpProblem { objective: vec![rint(1); n], rows: rows.clone() };
        let solution = simplex_solve(&problem)
            .unwrap()
            .unwrap_or_else(|| panic!("case {case} unexpectedly infeasible"));
        for (coeffs, _, b) in &rows {
            let lhs: Rat = coeffs.iter().zip(&solution.x).map(|(c, x)| c * x).sum();
            assert!(lhs >= *b, "case {case}: constraint violated exactly");
        }
        let nonzeros = solution.x.iter().filter(|x| **x != rint(0)).count();
        assert!(nonzeros <= m, "case {case}: {nonzeros} nonzeros exceed {m} constraints");
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(10), "criterion 11");
    println!("criterion 11 (config LP): PASS — hand example = 3, 100 random vertices exact, {elapsed:?}");
}

/// Criterion 12: bounding-box volumes dominate both lower bounds on the
/// corpus, and a single item is boxed within (1+eps)^3 of its own volume.
#[test]
fn criterion_12_mvbb_sanity() {
    let start = Instant::now();
    let backend = LichengBackend;
    let eps = rat(1, 4);
    for (f_idx, family) in Family::ALL.iter().enumerate() {
        for seed in 0..3u64 {
            let items = generate_instance(*family, 6 + 4 * f_idx, 2000 + seed, 64);
            for mode in [MvbbMode::Aptas, MvbbMode::Absolute3] {
                let result = solve_mvbb(
                    &items,
                    &MvbbParams { epsilon: eps.clone(), mode, delta: None },
                    &backend,
                )
                .unwrap();
                check_feasible(&result.packing, &items, "mvbb");
                assert!(
                    result.volume >= result.lower_bound,
                    "box volume below the lower bound"
                );
                let lb = total_volume(items.iter());
                assert!(result.volume >= lb);
            }
        }
    }
    // Single item: the anchored grid contains the exact dimensions, so the
    // aptas box is within (1+eps)^3 of the item volume (here: exact).
    let single = vec![Item::new("solo", rat(3, 7), rat(2, 5), rat(1, 3))];
    let result = solve_mvbb(
        &single,
        &MvbbParams { epsilon: eps.clone(), mode: MvbbMode::Aptas, delta: None },
        &backend,
    )
    .unwrap();
    let item_volume = single[0].volume();
    let growth = rint(1) + &eps;
    let cap = &item_volume * &growth * &growth * &growth;
    assert!(result.volume >= item_volume && result.volume <= cap);
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(60), "criterion 12");
    println!("criterion 12 (MVBB sanity): PASS — corpus boxes dominate lower bounds, {elapsed:?}");
}

/// Criterion 13: the naive cut uses at most 2*ceil(H) bins on 10^3 random
/// strips.
#[test]
fn criterion_13_naive_cut_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x13a);
    for case in 0..1000 {
        let n = rng.gen_range(1..=60);
        let items = random_items(&mut rng, &format!("c13_{case}_"), n, 32);
        let strip = licheng_strip(&items, LichengMode::General).unwrap();
        let table = ItemTable::new(items.clone()).unwrap();
        let height = verify_packing(&strip, &table).unwrap().strip_height.unwrap();
        let cut = cut_strip_to_bins(&strip, &table, CutMode::NaiveDouble).unwrap();
        check_feasible(&cut.bins, &items, "naive cut");
        let cap = 2 * pack3d::rational::ceil_u64(&height).max(1);
        assert!(
            cut.bins.used_bins() as u64 <= cap,
            "case {case}: {} bins above 2*ceil(H) = {cap}",
            cut.bins.used_bins()
        );
    }
    let elapsed = start.elapsed();
    assert_within(elapsed, Duration::from_secs(5), "criterion 13");
    println!("criterion 13 (naive cut): PASS — 1000 strips within 2*ceil(H), {elapsed:?}");
}

/// Companion check for criterion 9's slot machinery: the enumerator's
/// first candidates are canonical (pushed) placements.
#[test]
fn slot_enumeration_emits_canonical_first() {
    let cube = Item::new("cube", rat(3, 5), rat(3, 5), rat(3, 5));
    let mut first: Option<Vec<(Rat, Rat, Rat)>> = None;
    enumerate_slot_packings(std::slice::from_ref(&cube), 1, 6, 100_000, |candidate| {
        first = Some(
            candidate
                .placements
                .iter()
                .map(|p| (p.x.clone(), p.y.clone(), p.z.clone()))
                .collect(),
        );
        std::ops::ControlFlow::Break(())
    })
    .unwrap();
    assert_eq!(first.unwrap(), vec![(rint(0), rint(0), rint(0))]);

    // Two fat cubes cannot share one bin: the stream is empty.
    let other = Item::new("other", rat(3, 5), rat(3, 5), rat(3, 5));
    let emitted = enumerate_slot_packings(&[cube, other], 1, 6, 1_000_000, |_| {
        std::ops::ControlFlow::Continue(())
    })
    .unwrap();
    assert_eq!(emitted, 0);
}
