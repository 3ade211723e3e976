use reeb_forcing::oracle::{self, ConstantRotation, LinearizedFlow};
use reeb_forcing::star::{self, Arc};
use reeb_forcing::{OrbitSpec, Surd};

fn s(t: &str) -> Surd {
    t.parse().unwrap()
}

#[test]
fn winding_bands_contain_exact_indices() {
    let mut cases: Vec<(String, Box<dyn LinearizedFlow>, OrbitSpec, u64)> = Vec::new();
    for ratio in ["(0+1*sqrt(2))/1", "(1+1*sqrt(5))/2", "(0+1*sqrt(3))/2", "(-2+1*sqrt(7))/1"] {
        let r = s(ratio);
        let a = r.to_f64();
        let (p, q) = star::ellipsoid_orbits(&r).unwrap().orbits();
        for k in [1, 2] {
            cases.push((format!("P' {ratio} k={k}"), Box::new(ConstantRotation::ellipsoid_p(a, 1.0).unwrap()), p.clone(), k));
            cases.push((format!("Q' {ratio} k={k}"), Box::new(ConstantRotation::ellipsoid_q(a, 1.0).unwrap()), q.clone(), k));
        }
    }
    for (t1, t2) in [("(-1+1*sqrt(2))/1", "(0+1*sqrt(2))/1"), ("(1-1*sqrt(5))/2", "(0+1*sqrt(2))/1")] {
        let profile = oracle::quadratic_model_profile(&s(t1), &s(t2), 401).unwrap();
        let (h1, h2) = star::hopf_binding_orbits(&profile).unwrap();
        cases.push((format!("H1 {t1}"), Box::new(ConstantRotation::binding_h1(&profile).unwrap()), h1.clone(), 3));
        cases.push((format!("H2 {t2}"), Box::new(ConstantRotation::binding_h2(&profile).unwrap()), h2.clone(), 2));
    }
    assert_eq!(cases.len(), 20);
    for (name, flow, orbit, k) in &cases {
        let est = oracle::numeric_cz(flow.as_ref(), *k).unwrap();
        let cz = orbit.cz(*k).unwrap();
        assert!(est.contains(cz), "{name}: band {:?} misses {cz}", est.band);
        assert!((cz as f64 - est.two_delta).abs() < 2.0, "{name}");
        assert!(!est.resonant, "{name}");
    }
}

#[test]
fn verification_across_sign_patterns() {
    for (t1, t2, max_p) in [
        ("(-1+1*sqrt(2))/1", "(0+1*sqrt(2))/1", 4),
        ("(0+1*sqrt(2))/1", "(-1+1*sqrt(2))/1", 3),
        ("(1-1*sqrt(5))/2", "(0+1*sqrt(2))/1", 3),
    ] {
        let profile = oracle::quadratic_model_profile(&s(t1), &s(t2), 801).unwrap();
        let report = oracle::verify_profile(&profile, max_p).unwrap();
        assert!(report.all_ok, "{t1}, {t2}: {report:?}");
        assert!(report.missed.is_empty() && report.extra.is_empty());
        for f in &report.families {
            assert_eq!(f.reconstructed, Some(f.cls));
            assert_eq!(f.linking, (f.cls.q, f.cls.p));
            assert!(f.surface_residual < 1e-9);
        }
    }
    let mixed = oracle::quadratic_model_profile(&s("(1-1*sqrt(5))/2"), &Surd::sqrt(2), 801).unwrap();
    let report = oracle::verify_profile(&mixed, 2).unwrap();
    assert!(report.families.iter().any(|f| f.arc == Arc::T1Endpoint));
    assert!(report.families.iter().any(|f| f.arc == Arc::First));
}

#[test]
fn tampered_profile_is_caught() {
    let mut profile = oracle::quadratic_model_profile(&s("(-1+1*sqrt(2))/1"), &Surd::sqrt(2), 401).unwrap();
    profile.theta2 = s("(0+1*sqrt(3))/1");
    assert!(oracle::verify_profile(&profile, 3).is_err());
    let truncated = {
        let mut p = oracle::quadratic_model_profile(&s("(-1+1*sqrt(2))/1"), &Surd::sqrt(2), 401).unwrap();
        for x in p.samples.iter_mut().filter(|x| x.t > 0.5) {
            x.dx = x.dx.max(-1.0);
        }
        p
    };
    assert!(oracle::verify_profile(&truncated, 3).map_or(true, |r| !r.all_ok));
}
