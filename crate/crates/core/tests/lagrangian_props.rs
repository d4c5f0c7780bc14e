use nharmonic::geometry::Dimension;
use nharmonic::lagrangian::{
    random_variable_energy, sphere_energy_t, two_point_energy_closed_form, RandomVariable, SphericalHomothety,
    TwoPointVariable,
};
use nharmonic::nitsche::alpha_n;
use nharmonic::quad::QuadOptions;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

proptest! {
    #[test]
    fn homotheties_compose(l in 0.05f64..20.0, m in 0.05f64..20.0, theta in 0.0f64..std::f64::consts::PI) {
        let (a, b) = (SphericalHomothety::new(l).unwrap(), SphericalHomothety::new(m).unwrap());
        let ab = SphericalHomothety::new(l * m).unwrap();
        prop_assert!((a.phi(b.phi(theta)) - ab.phi(theta)).abs() <= 1e-12);
    }
}

#[test]
fn homothety_beats_the_constant_stretch_on_a_grid() {
    for n in 4..=7u32 {
        let nf = n as f64;
        let threshold = ((nf - 1.0) / (nf - 3.0)).sqrt();
        for i in 1..=4 {
            let alpha = threshold * (1.0 + 0.25 * i as f64);
            let cap = ((nf - 3.0) / (nf - 1.0)).sqrt() * alpha;
            for j in 1..=4 {
                let lambda = 1.0 + (cap - 1.0) * j as f64 / 4.0;
                let value = sphere_energy_t(alpha, lambda, dim(n), QuadOptions::tight()).unwrap();
                let constant = (alpha * alpha + nf - 1.0).powf(nf / 2.0);
                assert!(value < constant, "n = {n}, alpha = {alpha}, lambda = {lambda}: {value} >= {constant}");
            }
        }
    }
}

/// Random nonnegative distribution with mean at least one.
fn random_distribution(rng: &mut ChaCha8Rng) -> RandomVariable {
    let atoms = rng.gen_range(1..=6usize);
    let weights: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut values: Vec<f64> = (0..atoms).map(|_| rng.gen_range(0.0..5.0)).collect();
    let mean: f64 = values.iter().zip(&weights).map(|(v, w)| v * w / total).sum();
    if mean < 1.0 {
        let shift = rng.gen_range(1.0..1.5) / mean.max(1e-3);
        values.iter_mut().for_each(|v| *v *= shift);
        if values.iter().zip(&weights).map(|(v, w)| v * w / total).sum::<f64>() < 1.0 {
            values.iter_mut().for_each(|v| *v += 1.0);
        }
    }
    let mut atoms: Vec<(f64, f64)> = values.into_iter().zip(weights.into_iter().map(|w| w / total)).collect();
    // Close the probabilities exactly.
    let rest: f64 = atoms[1..].iter().map(|a| a.1).sum();
    atoms[0].1 = 1.0 - rest;
    RandomVariable::Discrete(atoms)
}

#[test]
fn jensen_floor_below_the_critical_stretch() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=8u32);
        let nf = n as f64;
        let alpha = rng.gen_range(0.05..alpha_n(dim(n)).min(5.0));
        let x = random_distribution(&mut rng);
        let e = random_variable_energy(alpha, dim(n), &x).unwrap();
        let floor = (alpha * alpha + nf - 1.0).powf(nf / 2.0);
        assert!(e >= floor * (1.0 - 1e-12), "n = {n}, alpha = {alpha}, {x:?}");
    }
}

#[test]
fn two_point_variable_is_optimal_above_the_critical_stretch() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..10_000 {
        let n = rng.gen_range(4..=8u32);
        let alpha = alpha_n(dim(n)) * rng.gen_range(1.0001..4.0);
        let floor = two_point_energy_closed_form(alpha, dim(n)).unwrap();
        let x = random_distribution(&mut rng);
        let e = random_variable_energy(alpha, dim(n), &x).unwrap();
        assert!(e >= floor * (1.0 - 1e-12), "n = {n}, alpha = {alpha}, {x:?}");
    }
    for n in 4..=8u32 {
        let alpha = 1.7 * alpha_n(dim(n));
        let x = RandomVariable::TwoPoint(TwoPointVariable::optimal(alpha, dim(n)).unwrap());
        let e = random_variable_energy(alpha, dim(n), &x).unwrap();
        let closed = two_point_energy_closed_form(alpha, dim(n)).unwrap();
        assert!((e - closed).abs() <= 1e-12 * closed, "n = {n}: {e} vs {closed}");
    }
}
