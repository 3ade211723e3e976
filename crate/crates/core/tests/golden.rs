use std::f64::consts::{PI, TAU};

use reeb_forcing::geodesic::{self, CurvatureProfile};

const LENGTH: f64 = TAU;

fn curvature(t: f64) -> f64 {
    1.0 + 0.5 * (TAU * t / LENGTH).cos()
}

/// Zeros of `y'' + K y = 0`, `y(0) = 0`, on `(0, horizon]` from the Prüfer
/// angle `phi' = cos^2 phi + K sin^2 phi`.
fn prufer_count(horizon: f64, step: f64) -> (u64, f64) {
    let n = (horizon / step).round() as u64;
    let h = horizon / n as f64;
    let f = |t: f64, p: f64| p.cos().powi(2) + curvature(t) * p.sin().powi(2);
    let mut phi = 0.0;
    for i in 0..n {
        let t = i as f64 * h;
        let k1 = f(t, phi);
        let k2 = f(t + h / 2.0, phi + h / 2.0 * k1);
        let k3 = f(t + h / 2.0, phi + h / 2.0 * k2);
        let k4 = f(t + h, phi + h * k3);
        phi += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    ((phi / PI).floor() as u64, phi)
}

#[test]
fn cosine_profile_zero_count() {
    let profile = CurvatureProfile::cosine("cosine", 1.0, 0.5, LENGTH).unwrap();
    let horizon = 100.0 * profile.length;
    let step = profile.default_step();
    let count = geodesic::verified_zero_count(&profile, horizon, step).unwrap();
    let (oracle, phi) = prufer_count(horizon, step / 10.0);
    assert_eq!(count, 200);
    assert_eq!(oracle, count);
    assert!((phi / PI - 200.0).abs() > 0.05, "golden value sits too close to a zero");
    let half = geodesic::verified_zero_count(&profile, horizon / 2.0, step).unwrap();
    assert_eq!(half, prufer_count(horizon / 2.0, step / 10.0).0);
    assert_eq!(half, 100);
}

#[test]
fn sampled_profile_matches_analytic() {
    let n = 512;
    let samples: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let t = LENGTH * i as f64 / n as f64;
            (t, curvature(t))
        })
        .collect();
    let sampled = CurvatureProfile::sampled("sampled", LENGTH, samples).unwrap();
    let exact = CurvatureProfile::cosine("cosine", 1.0, 0.5, LENGTH).unwrap();
    let h = exact.default_step();
    let horizon = 100.0 * LENGTH;
    assert_eq!(
        geodesic::sturm_zero_count(&sampled, horizon, h).unwrap(),
        geodesic::sturm_zero_count(&exact, horizon, h).unwrap()
    );
}
