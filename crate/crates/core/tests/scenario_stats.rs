//! Sample moments of the generators against closed forms, plus containment.

use proptest::prelude::*;

use ca3d::scenario::{generate_cns_uniform, generate_hotspot_gus, generate_random_gus, sample_cns_ppp};
use ca3d::{Point2, Region, Task};

fn moments(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// |sample mean - mu| within 3 standard errors of a sample with variance `var`.
fn within_3se(xs: &[f64], mu: f64, var: f64) -> bool {
    let (mean, _) = moments(xs);
    (mean - mu).abs() <= 3.0 * (var / xs.len() as f64).sqrt()
}

#[test]
fn hotspot_radial_moments() {
    let region = Region::square(4000.0).unwrap();
    let c = Point2::new(2000.0, 2000.0);
    let r = 800.0;
    let users = generate_hotspot_gus(&region, 10_000, c, r, Task::reference(), 9).unwrap();
    // Uniform on a disk: r^2 / R^2 ~ U(0, 1).
    let u: Vec<f64> = users.iter().map(|g| g.position.distance(&c).powi(2) / (r * r)).collect();
    assert!(within_3se(&u, 0.5, 1.0 / 12.0));
    let xs: Vec<f64> = users.iter().map(|g| g.position.x - c.x).collect();
    assert!(within_3se(&xs, 0.0, r * r / 4.0));
}

#[test]
fn random_user_moments() {
    let region = Region::new(3000.0, 1000.0, Point2::new(-500.0, 200.0)).unwrap();
    let users = generate_random_gus(&region, 10_000, Task::reference(), 4);
    let xs: Vec<f64> = users.iter().map(|g| g.position.x).collect();
    let ys: Vec<f64> = users.iter().map(|g| g.position.y).collect();
    assert!(within_3se(&xs, 1000.0, 3000.0f64.powi(2) / 12.0));
    assert!(within_3se(&ys, 700.0, 1000.0f64.powi(2) / 12.0));
}

#[test]
fn uniform_capacity_moments() {
    let region = Region::square(1000.0).unwrap();
    let nodes = generate_cns_uniform(&region, 10_000, 2e9, 10e9, 6).unwrap();
    let caps: Vec<f64> = nodes.iter().map(|n| n.capacity).collect();
    assert!(within_3se(&caps, 6e9, 8e9f64.powi(2) / 12.0));
    let (_, var) = moments(&caps);
    assert!((var / (8e9f64.powi(2) / 12.0) - 1.0).abs() < 0.05);
}

#[test]
fn ppp_count_is_poisson() {
    let region = Region::square(1000.0).unwrap();
    let lambda = 50e-6;
    let counts: Vec<f64> = (0..10_000)
        .map(|s| sample_cns_ppp(&region, lambda, 6e9, s).unwrap().len() as f64)
        .collect();
    let mu = lambda * region.area();
    assert!(within_3se(&counts, mu, mu));
    let (_, var) = moments(&counts);
    assert!((var / mu - 1.0).abs() < 0.05);
    let all = sample_cns_ppp(&region, lambda, 6e9, 1).unwrap();
    assert!(all.iter().all(|n| n.capacity == 6e9));
}

proptest! {
    #[test]
    fn hotspot_contained(
        cx in -500.0f64..2500.0, cy in -500.0f64..2500.0, r in 50.0f64..1500.0, count in 0usize..200, seed: u64,
    ) {
        let region = Region::square(2000.0).unwrap();
        let c = Point2::new(cx, cy);
        match generate_hotspot_gus(&region, count, c, r, Task::reference(), seed) {
            Ok(users) => {
                prop_assert_eq!(users.len(), count);
                for u in &users {
                    prop_assert!(region.contains(&u.position));
                    prop_assert!(u.position.distance(&c) <= r * (1.0 + 1e-12));
                }
                let again = generate_hotspot_gus(&region, count, c, r, Task::reference(), seed).unwrap();
                prop_assert_eq!(users, again);
            }
            Err(_) => prop_assert!(region.distance_to(&c) >= r),
        }
    }

    #[test]
    fn generators_contained_and_deterministic(w in 10.0f64..5000.0, h in 10.0f64..5000.0, seed: u64) {
        let region = Region::new(w, h, Point2::new(-w / 3.0, 7.0)).unwrap();
        let users = generate_random_gus(&region, 50, Task::reference(), seed);
        prop_assert!(users.iter().all(|u| region.contains(&u.position)));
        prop_assert_eq!(&users, &generate_random_gus(&region, 50, Task::reference(), seed));
        let nodes = generate_cns_uniform(&region, 50, 1e9, 3e9, seed).unwrap();
        prop_assert!(nodes.iter().all(|n| region.contains(&n.position) && (1e9..=3e9).contains(&n.capacity)));
        prop_assert_eq!(&nodes, &generate_cns_uniform(&region, 50, 1e9, 3e9, seed).unwrap());
        let ppp = sample_cns_ppp(&region, 20e-6, 5e9, seed).unwrap();
        prop_assert!(ppp.iter().all(|n| region.contains(&n.position)));
        prop_assert_eq!(&ppp, &sample_cns_ppp(&region, 20e-6, 5e9, seed).unwrap());
    }
}
