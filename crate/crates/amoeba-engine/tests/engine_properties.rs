use amoeba_engine::{
    aac_step, compute_amoeba, run_iterations, AmoebaMetric, AmoebaSet, BiasSpec, DriverConfig, Mode, ResolvedBias,
};
use field_core::ScalarField;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(rng: &mut ChaCha8Rng, w: usize, h: usize, scale: f64) -> ScalarField {
    ScalarField::from_fn(w, h, 1.0, |_, _| (rng.gen::<f64>() * scale).round()).unwrap()
}

fn metric(l1: bool, beta: f64) -> AmoebaMetric {
    if l1 {
        AmoebaMetric::l1(beta)
    } else {
        AmoebaMetric::l2(beta)
    }
}

fn bias_of(kind: u8, v: f64) -> BiasSpec {
    match kind {
        0 => BiasSpec::NONE,
        1 => BiasSpec::fixed_offset(v * 4.0),
        2 => BiasSpec::quantile(0.5 + 0.45 * v),
        _ => BiasSpec::quadratic(v * 0.05),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn monotone_maps_commute(seed in any::<u64>(), l1 in any::<bool>(), beta in 0.01f64..0.5, rho in 1.0f64..3.5, kind in 0u8..4, v in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, 10, 9, 20.0);
        let u = random_field(&mut rng, 10, 9, 50.0);
        let m = |x: f64| if x < 10.0 { 2.0 * x - 3.0 } else { 17.0 + 0.5 * (x - 10.0) };
        let met = metric(l1, beta);
        let bias = bias_of(kind, v);
        let lhs = aac_step(&f, &u.map(m).unwrap(), &met, rho, &bias).unwrap();
        let rhs = aac_step(&f, &u, &met, rho, &bias).unwrap().map(m).unwrap();
        prop_assert_eq!(lhs.values(), rhs.values());
    }

    #[test]
    fn flat_amoebas_are_point_symmetric(rho in 0.5f64..4.5, x in 5usize..7, y in 5usize..7) {
        let f = ScalarField::filled(12, 12, 1.0, 1.0).unwrap();
        let c = f.index(x, y);
        let a = compute_amoeba(&f, &AmoebaMetric::l2(1.0), rho, c);
        let off: Vec<(isize, isize)> = a.members.iter().map(|&(i, _)| {
            let (px, py) = f.coords(i);
            (px as isize - x as isize, py as isize - y as isize)
        }).collect();
        for &(dx, dy) in &off {
            prop_assert!(off.contains(&(-dx, -dy)));
        }
        let b = compute_amoeba(&f, &AmoebaMetric::l2(1.0), rho, f.index(x - 1, y));
        prop_assert_eq!(a.len(), b.len());
    }

    #[test]
    fn radius_growth_is_monotone(seed in any::<u64>(), r1 in 0.5f64..3.0, dr in 0.0f64..2.0, l1 in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, 11, 11, 10.0);
        let met = metric(l1, 0.2);
        let small = compute_amoeba(&f, &met, r1, 60);
        let big = compute_amoeba(&f, &met, r1 + dr, 60);
        for &(i, _) in &small.members {
            prop_assert!(big.contains(i));
        }
    }

    #[test]
    fn distances_are_shortest_paths(seed in any::<u64>(), rho in 1.0f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, 11, 11, 10.0);
        let met = AmoebaMetric::l2(0.3);
        let a = compute_amoeba(&f, &met, rho, 60);
        prop_assert_eq!(a.members[0], (60, 0.0));
        let dist = |i: usize| a.members.iter().find(|m| m.0 == i).map(|m| m.1);
        for &(i, d) in a.members.iter().skip(1) {
            prop_assert!(d <= rho);
            let (x, y) = f.coords(i);
            let mut best = f64::INFINITY;
            for dy in -1isize..=1 {
                for dx in -1isize..=1 {
                    let (nx, ny) = (x as isize + dx, y as isize + dy);
                    if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx > 10 || ny > 10 {
                        continue;
                    }
                    let j = f.index(nx as usize, ny as usize);
                    if let Some(dj) = dist(j) {
                        let len = if dx != 0 && dy != 0 { 2f64.sqrt() } else { 1.0 };
                        best = best.min(dj + met.edge_weight(len, f.values()[i] - f.values()[j]));
                    }
                }
            }
            prop_assert!((best - d).abs() < 1e-12, "member {} stored {} best {}", i, d, best);
        }
    }

    #[test]
    fn comparison_principle(seed in any::<u64>(), kind in 0u8..4, v in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, 9, 9, 20.0);
        let u = random_field(&mut rng, 9, 9, 30.0);
        let bump = random_field(&mut rng, 9, 9, 5.0);
        let w = u.with_values(u.values().iter().zip(bump.values()).map(|(a, b)| a + b).collect()).unwrap();
        let met = AmoebaMetric::l1(0.1);
        let bias = bias_of(kind, v);
        let a = aac_step(&f, &u, &met, 2.5, &bias).unwrap();
        let b = aac_step(&f, &w, &met, 2.5, &bias).unwrap();
        prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
    }

    #[test]
    fn bias_ordering(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_field(&mut rng, 9, 9, 20.0);
        let u = random_field(&mut rng, 9, 9, 30.0);
        let set = AmoebaSet::compute(&f, &AmoebaMetric::l2(0.1), 2.0).unwrap();
        let lo = set.filter(&u, &ResolvedBias::FixedOffset(-1.0)).unwrap();
        let mid = set.filter(&u, &ResolvedBias::FixedOffset(0.0)).unwrap();
        let hi = set.filter(&u, &ResolvedBias::FixedOffset(1.0)).unwrap();
        for i in 0..u.len() {
            prop_assert!(lo.values()[i] <= mid.values()[i] && mid.values()[i] <= hi.values()[i]);
        }
    }
}

#[test]
fn erosion_bias_never_raises_the_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = ScalarField::filled(32, 32, 1.0, 0.0).unwrap();
    let u = random_field(&mut rng, 32, 32, 100.0);
    let cfg = DriverConfig {
        mode: Mode::Aac,
        iterations: 5,
        metric: AmoebaMetric::l2(1.0),
        rho: 2.0,
        bias: BiasSpec::fixed_offset(-2.0),
        snapshot_every: 1,
    };
    let interior_mean = |s: &ScalarField| {
        let mut acc = 0.0;
        for y in 2..30 {
            for x in 2..30 {
                acc += s.get(x, y);
            }
        }
        acc / (28.0 * 28.0)
    };
    let snaps = run_iterations(&cfg, &f, Some(&u)).unwrap();
    let mut prev = interior_mean(&u);
    for s in &snaps {
        let m = interior_mean(&s.field);
        assert!(m <= prev + 1e-12);
        prev = m;
    }
}

#[test]
fn aac_on_flat_pilot_keeps_interior_ramp() {
    let f = ScalarField::filled(16, 16, 1.0, 3.0).unwrap();
    let u = ScalarField::from_fn(16, 16, 1.0, |x, y| x as f64 + 0.25 * y as f64).unwrap();
    let cfg = DriverConfig { mode: Mode::Aac, iterations: 3, metric: AmoebaMetric::l1(1.0), rho: 2.0, bias: BiasSpec::NONE, snapshot_every: 0 };
    let out = &run_iterations(&cfg, &f, Some(&u)).unwrap()[0].field;
    for y in 6..10 {
        for x in 6..10 {
            assert_eq!(out.get(x, y), u.get(x, y));
        }
    }
}
