#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tangentlab::compact_sets::Point;
use tangentlab::{AxisBox, PointCloudSet};

/// Random polynomial in `t` and `s` of total degree at most 4, plus an
/// optional trig term, with moderate coefficients.
pub fn random_generator(rng: &mut ChaCha8Rng, s: &str) -> String {
    let mut terms = Vec::new();
    for i in 0..=4u32 {
        for j in 0..=(4 - i) {
            if rng.gen_bool(0.35) {
                let c: f64 = rng.gen_range(-1.0..1.0);
                terms.push(format!("{c:.3}*t^{i}*{s}^{j}"));
            }
        }
    }
    if rng.gen_bool(0.6) {
        let (a, b): (f64, f64) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let func = if rng.gen_bool(0.5) { "sin" } else { "cos" };
        terms.push(format!("{func}({a:.3}*t + {b:.3}*{s})"));
    }
    if terms.is_empty() {
        terms.push(format!("t*{s}"));
    }
    terms.join(" + ")
}

/// Random C² curve component on `[0, 1]`.
pub fn random_component(rng: &mut ChaCha8Rng) -> String {
    let mut s = format!("{:.3}", rng.gen_range(-1.0..1.0));
    for k in 1..=4 {
        let c: f64 = rng.gen_range(-1.0..1.0);
        s.push_str(&format!(" + {c:.3}*t^{k}"));
    }
    let w: f64 = rng.gen_range(0.5..3.0);
    let c: f64 = rng.gen_range(-0.5..0.5);
    s.push_str(&format!(" + {c:.3}*sin({w:.3}*t)"));
    s
}

/// A bump vanishing at both ends of `[0, 1]`, for same-endpoint perturbations.
pub fn random_bump(rng: &mut ChaCha8Rng) -> String {
    let c: f64 = rng.gen_range(-1.0..1.0);
    let d: f64 = rng.gen_range(-1.0..1.0);
    format!("({c:.3} + {d:.3}*t)*t*(1 - t)")
}

pub fn square() -> AxisBox {
    AxisBox::cube(2, -1.0, 1.0).unwrap()
}

pub fn random_cloud(rng: &mut ChaCha8Rng, max_points: usize) -> PointCloudSet {
    let n = rng.gen_range(1..=max_points);
    let points: Vec<Point> = (0..n)
        .map(|_| [rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0), 0.0])
        .collect();
    PointCloudSet::new(square(), 0.01, points).unwrap()
}

/// Random nonempty subset of the `m x m` grid on `[-1, 1]^2`.
pub fn random_grid_subset(rng: &mut ChaCha8Rng, m: usize, density: f64) -> PointCloudSet {
    let h = 2.0 / (m - 1) as f64;
    let mut points: Vec<Point> = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if rng.gen_bool(density) {
                points.push([-1.0 + h * i as f64, -1.0 + h * j as f64, 0.0]);
            }
        }
    }
    if points.is_empty() {
        points.push([0.0, 0.0, 0.0]);
    }
    PointCloudSet::new(square(), h, points).unwrap()
}

/// Euclidean distance computed independently of the library.
pub fn oracle_dist(a: &Point, b: &Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}
