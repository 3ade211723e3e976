use std::path::PathBuf;

use reeb_forcing::cli::{run_with_env, CommandResult, Outcome, EXIT_INPUT, EXIT_NUMERICAL, EXIT_USAGE};
use reeb_forcing::geodesic::SatelliteClass;
use reeb_forcing::intersection::AsymptoticMap;
use reeb_forcing::oracle::VerifyReport;
use reeb_forcing::star::{ForcedOrbit, TorusOrbitFamily};
use reeb_forcing::{Fraction, OrbitSpec};
use serde_json::Value;

fn go(args: &[&str]) -> Outcome {
    run_with_env(std::iter::once("reeb-forcing").chain(args.iter().copied()), None)
}

fn ok(args: &[&str]) -> CommandResult {
    let o = go(args);
    assert_eq!(o.code, 0, "{args:?}: {}", o.stderr);
    assert!(o.stderr.is_empty());
    serde_json::from_str(&o.stdout).unwrap()
}

fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> T {
    serde_json::from_value(v.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("reeb-forcing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn documented_examples() {
    let r = ok(&["forcing", "hopf", "--theta1", "( -1+1*sqrt(2))/1", "--theta2", "(0+1*sqrt(2))/1", "--max-p", "2"]);
    let classes: Vec<Fraction> = parse(&r.payload["classes"]);
    assert_eq!(classes, vec![Fraction { p: 1, q: 1 }, Fraction { p: 2, q: 1 }]);
    assert_eq!(r.inputs["theta1"], "(-1+1*sqrt(2))/1");

    let r = ok(&["cz", "--theta", "(1+1*sqrt(2))/1", "--k", "1"]);
    assert_eq!(r.payload["cz"], 5);

    let bad = go(&["cz", "--theta", "1/2", "--k", "2"]);
    assert_eq!(bad.code, EXIT_INPUT);
    assert!(bad.stdout.is_empty());
    assert!(bad.stderr.contains("resonant"), "{}", bad.stderr);
}

#[test]
fn exit_codes() {
    assert_eq!(go(&["cz", "--theta", "(1+1*sqrt(2))/1", "--frobnicate"]).code, EXIT_USAGE);
    assert_eq!(go(&[]).code, EXIT_USAGE);
    assert_eq!(go(&["forcing"]).code, EXIT_USAGE);
    assert_eq!(go(&["cz", "--theta", "sqrt(2"]).code, EXIT_INPUT);
    assert_eq!(go(&["openbook-growth", "--matrix", "1,1,0,1"]).code, EXIT_INPUT);
    assert_eq!(go(&["angenent", "--rho", "1/3"]).code, EXIT_INPUT);
    assert_eq!(go(&["classify-star", "--profile", "/nonexistent/profile.json"]).code, EXIT_INPUT);
    let numerical = go(&["geodesic-rho", "--constant", "0.0001", "--horizon", "2"]);
    assert_eq!(numerical.code, EXIT_NUMERICAL, "{}", numerical.stderr);
    let help = go(&["forcing", "--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("hopf"));
}

#[test]
fn payloads_round_trip_into_input_types() {
    let r = ok(&["cz", "--theta", "(1+1*sqrt(2))/1", "--max-k", "3"]);
    let orbit: OrbitSpec = parse(&r.payload["orbit"]);
    assert_eq!(orbit.cz(1).unwrap(), 5);

    let r = ok(&["classify-star", "--theta1", "(-1+1*sqrt(2))/1", "--theta2", "(0+1*sqrt(2))/1", "--max-p", "3"]);
    let fam: Vec<TorusOrbitFamily> = parse(&r.payload["families"]);
    assert_eq!(fam.len(), 4);
    let binding: Vec<OrbitSpec> = parse(&r.payload["binding"]);
    assert_eq!(binding[0].cz(1).unwrap(), 3);

    let r = ok(&["forcing", "hopf", "--theta1", "(0-1*sqrt(2))/1", "--theta2", "(0-1*sqrt(2))/2", "--max-p", "1"]);
    let orbits: Vec<ForcedOrbit> = parse(&r.payload["orbits"]);
    let cls: Vec<(i64, i64)> = orbits.iter().map(|o| (o.cls.p, o.cls.q)).collect();
    assert_eq!(cls, vec![(-1, 1), (0, 1), (1, -1), (1, 0), (1, 1)]);

    let r = ok(&["angenent", "--rho", "(0+1*sqrt(2))/2", "--max", "5"]);
    let sats: Vec<SatelliteClass> = parse(&r.payload["classes"]);
    assert!(sats.iter().all(|s| s.p > 0 && s.q > 0));

    let orbit = OrbitSpec::elliptic("A", "(1+1*sqrt(2))/3".parse().unwrap());
    let u = AsymptoticMap::trivial_cylinder(orbit.clone(), 2).unwrap();
    let v = AsymptoticMap::plane(orbit, 1).unwrap();
    let path = scratch("maps.json");
    std::fs::write(&path, serde_json::json!({ "u": u, "v": v, "iota": 0 }).to_string()).unwrap();
    let r = ok(&["intersect", "star", "--input", path.to_str().unwrap()]);
    let back: AsymptoticMap = parse(&r.payload["u"]);
    assert_eq!(back, u);
    assert!(r.payload["star"].is_string());

    let prof = scratch("profile.json");
    std::fs::write(&prof, r#"{"theta1": "(-1+1*sqrt(2))/1", "theta2": "(0+1*sqrt(2))/1"}"#).unwrap();
    let r = ok(&["oracle", "verify", "--profile", prof.to_str().unwrap(), "--max-p", "2"]);
    let report: VerifyReport = parse(&r.payload);
    assert!(report.all_ok);
    assert_eq!(report.families.len(), 2);
}

#[test]
fn config_merges_with_flags() {
    let cfg = scratch("defaults.toml");
    std::fs::write(
        &cfg,
        "format = \"tsv\"\n[forcing.hopf]\ntheta1 = \"-1+sqrt(2)\"\ntheta2 = \"sqrt(2)\"\nmax_p = 3\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let o = go(&["--config", c, "forcing", "hopf"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.contains("payload.classes.2.p\t3\n"), "{}", o.stdout);
    let o = go(&["--config", c, "forcing", "hopf", "--max-p", "2", "--format", "json"]);
    let r: CommandResult = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(r.payload["classes"].as_array().unwrap().len(), 2);
    assert_eq!(r.inputs["max_p"], "2");

    std::fs::write(&cfg, "[cz]\nbogus_flag = 1\n").unwrap();
    assert_eq!(go(&["--config", c, "cz", "--hyperbolic", "1"]).code, EXIT_USAGE);
    std::fs::write(&cfg, "not toml [").unwrap();
    assert_eq!(go(&["--config", c, "cz", "--hyperbolic", "1"]).code, EXIT_INPUT);
}

#[test]
fn precision_is_recorded() {
    let a: CommandResult = serde_json::from_str(
        &run_with_env(["reeb-forcing", "oracle", "ellipsoid", "--ratio", "(0+1*sqrt(2))/1", "--max-k", "1"], Some("64")).stdout,
    )
    .unwrap();
    assert_eq!(a.provenance.precision_bits, 64);
    let b = go(&["--precision-bits", "300", "oracle", "ellipsoid", "--ratio", "(0+1*sqrt(2))/1", "--max-k", "1"]);
    let b: CommandResult = serde_json::from_str(&b.stdout).unwrap();
    assert_eq!(b.provenance.precision_bits, 300);
    assert_eq!(run_with_env(["reeb-forcing", "cz", "--hyperbolic", "1"], Some("12")).code, EXIT_INPUT);
}

#[test]
fn trajectory_dump() {
    let prof = scratch("flow-profile.json");
    std::fs::write(&prof, r#"{"theta1": "(-1+1*sqrt(2))/1", "theta2": "(0+1*sqrt(2))/1"}"#).unwrap();
    let dump = scratch("traj.csv");
    let r = ok(&[
        "oracle", "flow", "--profile", prof.to_str().unwrap(), "--t", "0.5", "--duration", "1", "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(r.payload["max_residual"].as_f64().unwrap() < 1e-9);
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().next(), Some("t,r1,theta1,r2,theta2"));
    assert_eq!(text.lines().count(), 1002);
}

#[test]
fn no_command_accepts_a_seed() {
    for cmd in [
        vec!["cz", "--hyperbolic", "1"],
        vec!["angenent", "--rho", "(0+1*sqrt(2))/2"],
        vec!["openbook-growth"],
        vec!["oracle", "detect", "--slope", "0.5"],
    ] {
        let mut args = cmd.clone();
        args.extend(["--seed", "1"]);
        assert_eq!(go(&args).code, EXIT_USAGE, "{args:?}");
    }
}
