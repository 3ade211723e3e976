//! Command-line front end. Every command prints one JSON document (or a
//! flattened TSV rendering of it) built from a [`CommandResult`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cz::OrbitSpec;
use crate::error::{Error, Result};
use crate::farey::Fraction;
use crate::geodesic::{self, CurvatureProfile};
use crate::intersection::{self, AsymptoticMap};
use crate::open_book::{self, MonodromyMatrix};
use crate::oracle::{self, ConstantRotation, LinearHamiltonian, SturmLinearization};
use crate::star::{self, GammaProfile};
use crate::surd::Surd;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

pub const PRECISION_ENV: &str = "REEB_FORCING_PRECISION";
pub const DEFAULT_PRECISION_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub version: String,
    pub modules: Vec<String>,
    pub precision_bits: u32,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandResult {
    pub command: Vec<String>,
    pub inputs: BTreeMap<String, String>,
    pub payload: Value,
    pub provenance: Provenance,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Tsv,
}

#[derive(Parser, Debug)]
#[command(name = "reeb-forcing", version, about = "Index, intersection and orbit-forcing computations")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// TOML file supplying defaults for any flag; explicit flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fixed-point bits used when surds enter floating-point code.
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conley-Zehnder index of an iterated orbit.
    Cz(CzArgs),
    /// Intersection-number bookkeeping.
    #[command(subcommand)]
    Intersect(IntersectCmd),
    /// Torus families and contact homology of a star-shaped model surface.
    ClassifyStar(ClassifyArgs),
    /// Orbits forced by a binding link.
    #[command(subcommand)]
    Forcing(ForcingCmd),
    /// Rotation number of a closed geodesic from its curvature profile.
    GeodesicRho(GeodesicArgs),
    /// Satellite classes forced by a rotation number.
    Angenent(AngenentArgs),
    /// Periodic-orbit growth of an open book with linear monodromy.
    OpenbookGrowth(OpenBookArgs),
    /// Floating-point cross-checks.
    #[command(subcommand)]
    Oracle(OracleCmd),
}

#[derive(Args, Debug)]
struct CzArgs {
    /// Rotation number of an elliptic orbit.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "hyperbolic", required_unless_present = "hyperbolic")]
    theta: Option<String>,
    /// Index of a hyperbolic orbit.
    #[arg(long, allow_hyphen_values = true)]
    hyperbolic: Option<i64>,
    /// Cover multiplicity.
    #[arg(long, default_value_t = 1)]
    k: u64,
    /// Also tabulate covers `1..=max-k`.
    #[arg(long)]
    max_k: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum IntersectCmd {
    /// `[U]*[V]` from a JSON file `{"u": map, "v": map, "iota": n}`.
    Star {
        #[arg(long)]
        input: PathBuf,
    },
    /// Lower bound for branched covers of a trivial cylinder.
    Bound {
        #[arg(long, allow_hyphen_values = true)]
        theta_plus: String,
        #[arg(long, allow_hyphen_values = true)]
        theta_minus: String,
        #[arg(long)]
        k_plus: u64,
        /// Comma-separated negative-end multiplicities.
        #[arg(long, value_delimiter = ',')]
        k_minus: Vec<u64>,
    },
}

#[derive(Args, Debug)]
struct ThetaPair {
    /// JSON profile file with `theta1`, `theta2` and optional samples.
    #[arg(long, conflicts_with_all = ["theta1", "theta2"])]
    profile: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true, requires = "theta2")]
    theta1: Option<String>,
    #[arg(long, allow_hyphen_values = true, requires = "theta1")]
    theta2: Option<String>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    thetas: ThetaPair,
    #[arg(long, default_value_t = 5)]
    max_p: u64,
}

#[derive(Subcommand, Debug)]
enum ForcingCmd {
    /// Torus classes forced by the Hopf link `H1 u H2`.
    Hopf {
        #[command(flatten)]
        thetas: ThetaPair,
        #[arg(long, default_value_t = 5)]
        max_p: u64,
    },
    /// Indices and linking of the ellipsoid orbits for `a/b = ratio`.
    Ellipsoid {
        #[arg(long, allow_hyphen_values = true)]
        ratio: String,
        #[arg(long, default_value_t = 10)]
        max_k: u64,
    },
    /// Homology relative to a link of two torus-knot leaves, in a target class.
    TorusLink {
        #[command(flatten)]
        thetas: ThetaPair,
        /// Class `p,q` of the first link component.
        #[arg(long, allow_hyphen_values = true)]
        t1: String,
        #[arg(long, allow_hyphen_values = true)]
        t2: String,
        #[arg(long, allow_hyphen_values = true)]
        target: String,
    },
}

#[derive(Args, Debug)]
struct GeodesicArgs {
    /// Curvature profile: CSV (`L,<length>`, `t,K`, rows) or JSON.
    #[arg(long, conflicts_with = "constant", required_unless_present = "constant")]
    profile: Option<PathBuf>,
    /// Constant curvature instead of a profile file.
    #[arg(long, allow_hyphen_values = true)]
    constant: Option<f64>,
    /// Length when `--constant` is used.
    #[arg(long, default_value_t = std::f64::consts::TAU)]
    length: f64,
    /// Integration horizon in multiples of the length.
    #[arg(long, default_value_t = 10000.0)]
    horizon: f64,
    /// Integration step; defaults to length/256.
    #[arg(long)]
    step: Option<f64>,
    /// Also compare the zero count of the `k`-fold lift with its index.
    #[arg(long)]
    k: Option<u64>,
}

#[derive(Args, Debug)]
struct AngenentArgs {
    #[arg(long, allow_hyphen_values = true)]
    rho: String,
    #[arg(long, default_value_t = 10)]
    max: u64,
}

#[derive(Args, Debug)]
struct OpenBookArgs {
    /// Entries `a,b,c,d` of the monodromy matrix.
    #[arg(long, default_value = "2,1,1,1")]
    matrix: String,
    #[arg(long, default_value_t = 12)]
    max_period: u64,
    /// Return-time bound of the binding neighbourhood.
    #[arg(long, default_value_t = 1.0)]
    return_bound: f64,
    /// Irrational binding parameter for the binding index table.
    #[arg(long, allow_hyphen_values = true)]
    binding: Option<String>,
    /// Include Nielsen class labels up to this period.
    #[arg(long)]
    labels: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum OracleCmd {
    /// Numerically confirm every torus family of a sampled profile.
    Verify {
        /// JSON profile; without samples a quadratic model curve is generated.
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_p: u64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
    },
    /// Integrate the model flow through the torus over `gamma(t)`.
    Flow {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        duration: f64,
        #[arg(long, default_value_t = oracle::DEFAULT_STEP)]
        step: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        angle1: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        angle2: f64,
        #[arg(long, default_value_t = 401)]
        samples: usize,
        /// Write the trajectory as CSV to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Rational reconstruction of a measured slope.
    Detect {
        #[arg(long, allow_hyphen_values = true)]
        slope: f64,
        #[arg(long, default_value_t = 100)]
        max_den: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Winding and linking estimates on the ellipsoid with `a/b = ratio`.
    Ellipsoid {
        #[arg(long, allow_hyphen_values = true)]
        ratio: String,
        #[arg(long, default_value_t = 3)]
        max_k: u64,
    },
    /// Winding estimate for the lift of a closed geodesic.
    GeodesicCz {
        #[arg(long, conflicts_with = "constant", required_unless_present = "constant")]
        profile: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        constant: Option<f64>,
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        length: f64,
        #[arg(long, default_value_t = 1)]
        k: u64,
    },
}

struct Ctx {
    precision_bits: u32,
    inputs: BTreeMap<String, String>,
    modules: Vec<&'static str>,
    tolerances: BTreeMap<String, f64>,
}

impl Ctx {
    fn surd(&mut self, name: &str, text: &str) -> Result<Surd> {
        let s: Surd = text.parse()?;
        self.inputs.insert(name.to_string(), s.to_string());
        Ok(s)
    }

    fn input(&mut self, name: &str, value: impl ToString) {
        self.inputs.insert(name.to_string(), value.to_string());
    }

    fn uses(&mut self, module: &'static str) {
        if !self.modules.contains(&module) {
            self.modules.push(module);
        }
    }

    fn tol(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }

    fn float(&self, s: &Surd) -> f64 {
        s.to_f64_with_precision(self.precision_bits)
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Io(e.to_string()))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::parse("JSON input", &path.display().to_string(), e.to_string()))
}

fn parse_class(name: &str, text: &str) -> Result<Fraction> {
    let bad = || Error::parse("class", text, format!("{name} must be `p,q`"));
    let (p, q) = text.split_once(',').ok_or_else(bad)?;
    let p = p.trim().parse().map_err(|_| bad())?;
    let q = q.trim().parse().map_err(|_| bad())?;
    Ok(Fraction { p, q })
}

fn load_profile(ctx: &mut Ctx, pair: &ThetaPair) -> Result<GammaProfile> {
    let profile = match (&pair.profile, &pair.theta1, &pair.theta2) {
        (Some(path), _, _) => {
            ctx.input("profile", path.display());
            read_json::<GammaProfile>(path)?
        }
        (None, Some(a), Some(b)) => GammaProfile::new(a.parse()?, b.parse()?)?,
        _ => return Err(Error::InvalidInput("give --profile or both --theta1 and --theta2".into())),
    };
    ctx.input("theta1", &profile.theta1);
    ctx.input("theta2", &profile.theta2);
    Ok(profile)
}

fn load_curvature(ctx: &mut Ctx, path: Option<&PathBuf>, constant: Option<f64>, length: f64) -> Result<CurvatureProfile> {
    if let Some(path) = path {
        ctx.input("profile", path.display());
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        if path.extension().is_some_and(|e| e == "json") {
            let p: CurvatureProfile = read_json(path)?;
            p.validate()?;
            return Ok(p);
        }
        return CurvatureProfile::from_csv(name, read_text(path)?.as_bytes());
    }
    let k = constant.ok_or_else(|| Error::InvalidInput("give --profile or --constant".into()))?;
    ctx.input("constant", k);
    ctx.input("length", length);
    CurvatureProfile::constant("constant", k, length)
}

fn sampled_profile(ctx: &mut Ctx, path: &Path, samples: usize) -> Result<GammaProfile> {
    ctx.input("profile", path.display());
    let p: GammaProfile = read_json(path)?;
    ctx.input("theta1", &p.theta1);
    ctx.input("theta2", &p.theta2);
    if p.samples.is_empty() {
        ctx.input("samples", samples);
        oracle::quadratic_model_profile(&p.theta1, &p.theta2, samples)
    } else {
        Ok(p)
    }
}

fn cz_row(orbit: &OrbitSpec, k: u64) -> Result<Value> {
    Ok(json!({
        "k": k,
        "cz": orbit.cz(k)?,
        "alpha_minus": orbit.alpha_minus(k)?,
        "alpha_plus": orbit.alpha_plus(k)?,
        "parity": orbit.parity(k)?,
        "sft_good": orbit.sft_good(k)?,
    }))
}

fn cmd_cz(ctx: &mut Ctx, a: &CzArgs) -> Result<Value> {
    ctx.uses("cz");
    let orbit = match (&a.theta, a.hyperbolic) {
        (Some(t), _) => OrbitSpec::elliptic("orbit", ctx.surd("theta", t)?),
        (None, Some(n)) => {
            ctx.input("hyperbolic", n);
            OrbitSpec::hyperbolic("orbit", n)
        }
        _ => return Err(Error::InvalidInput("give --theta or --hyperbolic".into())),
    };
    orbit.validate()?;
    ctx.input("k", a.k);
    let mut out = cz_row(&orbit, a.k)?;
    out["orbit"] = to_value(&orbit)?;
    if let Some(m) = a.max_k {
        ctx.input("max_k", m);
        out["table"] = Value::Array((1..=m).map(|k| cz_row(&orbit, k)).collect::<Result<_>>()?);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct StarInput {
    u: AsymptoticMap,
    v: AsymptoticMap,
    #[serde(default)]
    iota: i64,
}

fn cmd_intersect(ctx: &mut Ctx, c: &IntersectCmd) -> Result<Value> {
    ctx.uses("intersection");
    ctx.uses("cz");
    match c {
        IntersectCmd::Star { input } => {
            ctx.input("input", input.display());
            let inp: StarInput = read_json(input)?;
            inp.u.validate()?;
            inp.v.validate()?;
            let st = intersection::star(&inp.u, &inp.v, inp.iota)?;
            Ok(json!({
                "u": to_value(&inp.u)?,
                "v": to_value(&inp.v)?,
                "iota": inp.iota,
                "omega": intersection::omega_total(&inp.u, &inp.v)?,
                "delta": intersection::delta_total(&inp.u, &inp.v)?,
                "star": st.to_string(),
            }))
        }
        IntersectCmd::Bound {
            theta_plus,
            theta_minus,
            k_plus,
            k_minus,
        } => {
            let tp = ctx.surd("theta_plus", theta_plus)?;
            let tm = ctx.surd("theta_minus", theta_minus)?;
            ctx.input("k_plus", k_plus);
            let km: Vec<String> = k_minus.iter().map(|k| k.to_string()).collect();
            ctx.input("k_minus", km.join(","));
            to_value(&intersection::branched_cover_bound(&tp, &tm, *k_plus, k_minus)?)
        }
    }
}

fn cmd_classify(ctx: &mut Ctx, a: &ClassifyArgs) -> Result<Value> {
    ctx.uses("star");
    ctx.uses("farey");
    let profile = load_profile(ctx, &a.thetas)?;
    ctx.input("max_p", a.max_p);
    let families = star::classify_orbits(&profile, a.max_p)?;
    let (case, _) = star::admissible_classes(&profile.theta1, &profile.theta2, a.max_p)?;
    let (h1, h2) = star::hopf_binding_orbits(&profile)?;
    let cch = star::cch_hopf_complement(&profile, a.max_p)?;
    Ok(json!({
        "sign_case": to_value(&case)?,
        "families": to_value(&families)?,
        "binding": [to_value(&h1)?, to_value(&h2)?],
        "homology": to_value(&cch)?,
    }))
}

fn cmd_forcing(ctx: &mut Ctx, c: &ForcingCmd) -> Result<Value> {
    ctx.uses("star");
    ctx.uses("farey");
    match c {
        ForcingCmd::Hopf { thetas, max_p } => {
            let profile = load_profile(ctx, thetas)?;
            ctx.input("max_p", max_p);
            let orbits = star::forcing_hopf(&profile.theta1, &profile.theta2, *max_p)?;
            let classes: Vec<Fraction> = orbits.iter().map(|o| o.cls).collect();
            Ok(json!({ "classes": to_value(&classes)?, "orbits": to_value(&orbits)? }))
        }
        ForcingCmd::Ellipsoid { ratio, max_k } => {
            ctx.uses("cz");
            let r = ctx.surd("ratio", ratio)?;
            ctx.input("max_k", max_k);
            let e = star::ellipsoid_orbits(&r)?;
            let (p, q) = e.orbits();
            let rows = (1..=*max_k)
                .map(|k| {
                    Ok(json!({
                        "k": k,
                        "cz_p": p.cz(k)?,
                        "cz_q": q.cz(k)?,
                        "linking_p_q": e.linking(k),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(json!({ "orbits": [to_value(&p)?, to_value(&q)?], "table": rows }))
        }
        ForcingCmd::TorusLink {
            thetas,
            t1,
            t2,
            target,
        } => {
            let profile = load_profile(ctx, thetas)?;
            let (c1, c2, ct) = (parse_class("t1", t1)?, parse_class("t2", t2)?, parse_class("target", target)?);
            ctx.input("t1", c1);
            ctx.input("t2", c2);
            ctx.input("target", ct);
            to_value(&star::example3_cch(&profile, c1, c2, ct)?)
        }
    }
}

fn cmd_geodesic(ctx: &mut Ctx, a: &GeodesicArgs) -> Result<Value> {
    ctx.uses("geodesic");
    let profile = load_curvature(ctx, a.profile.as_ref(), a.constant, a.length)?;
    ctx.input("horizon", a.horizon);
    let step = a.step.unwrap_or_else(|| profile.default_step());
    ctx.tol("step", step);
    ctx.tol("rho_convergence", geodesic::RHO_CONVERGENCE);
    let est = geodesic::rho_with_step(&profile, a.horizon * profile.length, step)?;
    let mut out = json!({
        "name": profile.name,
        "length": profile.length,
        "rho": to_value(&est)?,
    });
    if let Some(k) = a.k {
        ctx.input("k", k);
        ctx.tol("resonance", geodesic::RESONANCE_TOL);
        let count = geodesic::verified_zero_count(&profile, 2.0 * profile.length * k as f64, step)?;
        out["dictionary"] = json!({
            "zero_count": count,
            "check": to_value(&geodesic::cz_zero_dictionary(count, k, est.rho)?)?,
        });
    }
    Ok(out)
}

fn cmd_angenent(ctx: &mut Ctx, a: &AngenentArgs) -> Result<Value> {
    ctx.uses("geodesic");
    ctx.uses("star");
    let rho = ctx.surd("rho", &a.rho)?;
    ctx.input("max", a.max);
    let table = geodesic::angenent_table(&rho, a.max)?;
    let (t1, t2) = geodesic::angenent_thetas(&rho)?;
    Ok(json!({
        "theta1": t1.to_string(),
        "theta2": t2.to_string(),
        "classes": to_value(&table)?,
    }))
}

fn cmd_open_book(ctx: &mut Ctx, a: &OpenBookArgs) -> Result<Value> {
    ctx.uses("open_book");
    let m: MonodromyMatrix = a.matrix.parse()?;
    ctx.input("matrix", &m);
    ctx.input("max_period", a.max_period);
    ctx.input("return_bound", a.return_bound);
    let report = open_book::growth_report(&m, a.max_period)?;
    let actions = open_book::action_counts(&m, a.max_period, a.return_bound)?;
    let mut out = json!({
        "growth": to_value(&report)?,
        "actions": to_value(&actions)?,
    });
    if let Some(t) = &a.binding {
        ctx.uses("cz");
        let t = ctx.surd("binding", t)?;
        let cz = (1..=a.max_period).map(|k| open_book::binding_cz(&t, k)).collect::<Result<Vec<_>>>()?;
        out["binding_cz"] = to_value(&cz)?;
    }
    if let Some(kmax) = a.labels {
        ctx.input("labels", kmax);
        let mut labels = Vec::new();
        for k in 1..=kmax {
            labels.extend(open_book::class_labels(&m, k)?);
        }
        out["labels"] = to_value(&labels)?;
    }
    Ok(out)
}

fn cmd_oracle(ctx: &mut Ctx, c: &OracleCmd) -> Result<Value> {
    ctx.uses("oracle");
    match c {
        OracleCmd::Verify { profile, max_p, samples } => {
            ctx.uses("star");
            let p = sampled_profile(ctx, profile, *samples)?;
            ctx.input("max_p", max_p);
            ctx.tol("surface", oracle::SURFACE_TOL);
            ctx.tol("step", oracle::DEFAULT_STEP);
            ctx.tol("linking_confidence", oracle::MIN_LINKING_CONFIDENCE);
            let report = oracle::verify_profile(&p, *max_p)?;
            if !report.all_ok {
                return Err(Error::Numerical(format!(
                    "verification failed: {}",
                    serde_json::to_string(&report).unwrap_or_default()
                )));
            }
            to_value(&report)
        }
        OracleCmd::Flow {
            profile,
            t,
            duration,
            step,
            angle1,
            angle2,
            samples,
            dump,
        } => {
            let p = sampled_profile(ctx, profile, *samples)?;
            ctx.input("t", t);
            ctx.input("duration", duration);
            ctx.input("angles", format!("{angle1},{angle2}"));
            ctx.tol("step", *step);
            ctx.tol("surface", oracle::SURFACE_TOL);
            let traj = oracle::integrate_model_flow(&p, *t, (*angle1, *angle2), *duration, *step)?;
            if let Some(path) = dump {
                ctx.input("dump", path.display());
                let f = fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                traj.write_csv(f)?;
            }
            let (first, last) = (traj.states[0], *traj.last());
            let (d1, d2) = (last.theta1 - first.theta1, last.theta2 - first.theta2);
            Ok(json!({
                "steps": traj.states.len() - 1,
                "step": traj.step,
                "max_residual": traj.max_residual,
                "max_radius_drift": traj.max_radius_drift,
                "final": to_value(&last)?,
                "slope": if d1 != 0.0 { Some(d2 / d1) } else { None },
            }))
        }
        OracleCmd::Detect { slope, max_den, tol } => {
            ctx.input("slope", slope);
            ctx.input("max_den", max_den);
            ctx.tol("slope", *tol);
            Ok(json!({ "class": to_value(&oracle::detect_closed_orbit(*slope, *max_den, *tol))? }))
        }
        OracleCmd::Ellipsoid { ratio, max_k } => {
            ctx.uses("cz");
            let r = ctx.surd("ratio", ratio)?;
            ctx.input("max_k", max_k);
            ctx.tol("surface", oracle::SURFACE_TOL);
            ctx.tol("linking_confidence", oracle::MIN_LINKING_CONFIDENCE);
            let (a, b) = (ctx.float(&r), 1.0);
            LinearHamiltonian::ellipsoid(a, b)?;
            let (p_spec, _) = star::ellipsoid_orbits(&r)?.orbits();
            let flow = ConstantRotation::ellipsoid_p(a, b)?;
            let q = oracle::closed_polyline(&oracle::trace_ellipsoid_q(a, b)?);
            let mut rows = Vec::new();
            for k in 1..=*max_k {
                let est = oracle::numeric_cz(&flow, k)?;
                let exact = p_spec.cz(k)?;
                let pk = oracle::closed_polyline(&oracle::trace_ellipsoid_p(a, b, k)?);
                let lk = oracle::numeric_linking(&pk, &q)?;
                rows.push(json!({
                    "k": k,
                    "cz": exact,
                    "numeric": to_value(&est)?,
                    "band_contains_cz": est.contains(exact),
                    "linking": to_value(&lk)?,
                }));
            }
            Ok(json!({ "table": rows }))
        }
        OracleCmd::GeodesicCz {
            profile,
            constant,
            length,
            k,
        } => {
            ctx.uses("geodesic");
            let p = load_curvature(ctx, profile.as_ref(), *constant, *length)?;
            ctx.input("k", k);
            to_value(&oracle::numeric_cz(&SturmLinearization { profile: p }, *k)?)
        }
    }
}

fn tsv_lines(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                tsv_lines(&key, x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                tsv_lines(&format!("{prefix}.{i}"), x, out);
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}\t{s}\n")),
        Value::Null => out.push_str(&format!("{prefix}\t\n")),
        other => out.push_str(&format!("{prefix}\t{other}\n")),
    }
}

fn render(result: &CommandResult, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(result).map_err(|e| Error::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Tsv => {
            let mut s = String::new();
            tsv_lines("", &to_value(result)?, &mut s);
            Ok(s)
        }
    }
}

const GLOBAL_VALUE_FLAGS: [&str; 3] = ["--format", "--config", "--precision-bits"];
const NESTED: [&str; 3] = ["intersect", "forcing", "oracle"];

fn flag_value<'a>(argv: &'a [String], flag: &str) -> Option<&'a str> {
    let eq = format!("{flag}=");
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == flag {
            argv.get(i + 1).map(String::as_str)
        } else {
            a.strip_prefix(&eq)
        }
    })
}

fn command_path(argv: &[String]) -> Vec<String> {
    let mut path = Vec::new();
    let mut i = 1;
    while i < argv.len() {
        let a = &argv[i];
        if GLOBAL_VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if a.starts_with('-') {
            if path.is_empty() {
                i += 1;
                continue;
            }
            break;
        }
        path.push(a.clone());
        if path.len() == 2 || !NESTED.contains(&path[0].as_str()) {
            break;
        }
        i += 1;
    }
    path
}

fn toml_flag_value(v: &toml::Value) -> Option<String> {
    match v {
        toml::Value::String(s) => Some(s.clone()),
        toml::Value::Integer(n) => Some(n.to_string()),
        toml::Value::Float(x) => Some(x.to_string()),
        toml::Value::Array(a) => Some(a.iter().filter_map(toml_flag_value).collect::<Vec<_>>().join(",")),
        _ => None,
    }
}

fn append_table(argv: &mut Vec<String>, table: &toml::Table) {
    for (key, v) in table {
        if v.is_table() {
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        let present = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v {
            toml::Value::Boolean(true) => argv.push(flag),
            toml::Value::Boolean(false) => {}
            other => {
                if let Some(s) = toml_flag_value(other) {
                    argv.push(flag);
                    argv.push(s);
                }
            }
        }
    }
}

/// Appends flags from the `--config` file that the command line leaves
/// unset. Top-level keys set global flags; `[cmd]` and `[cmd.sub]` tables
/// set flags of that command.
fn merge_config(mut argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = flag_value(&argv, "--config").map(PathBuf::from) else {
        return Ok(argv);
    };
    let text = read_text(&path)?;
    let table: toml::Table =
        toml::from_str(&text).map_err(|e| Error::parse("config", &path.display().to_string(), e.to_string()))?;
    let cmd = command_path(&argv);
    append_table(&mut argv, &table);
    let mut cur = &table;
    for name in &cmd {
        match cur.get(name).and_then(toml::Value::as_table) {
            Some(t) => {
                append_table(&mut argv, t);
                cur = t;
            }
            None => break,
        }
    }
    Ok(argv)
}

fn precision_from(cli: Option<u32>, env: Option<&str>) -> Result<u32> {
    let bits = match (cli, env) {
        (Some(b), _) => b,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| Error::parse("precision", s, format!("{PRECISION_ENV} must be a bit count")))?,
        (None, None) => DEFAULT_PRECISION_BITS,
    };
    if !(53..=4096).contains(&bits) {
        return Err(Error::InvalidInput(format!("precision {bits} must lie in 53..=4096 bits")));
    }
    Ok(bits)
}

fn failure(e: &Error) -> Outcome {
    Outcome {
        code: if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT },
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    }
}

/// Runs one invocation; `argv[0]` is the program name. Reads the precision
/// from the environment.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let env = std::env::var(PRECISION_ENV).ok();
    run_with_env(argv, env.as_deref())
}

/// As [`run`], with the precision variable passed explicitly.
pub fn run_with_env<I, S>(argv: I, precision_env: Option<&str>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let merged = match merge_config(argv.clone()) {
        Ok(a) => a,
        Err(e) => return failure(&e),
    };
    let cli = match Cli::try_parse_from(&merged) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let precision_bits = match precision_from(cli.precision_bits, precision_env) {
        Ok(b) => b,
        Err(e) => return failure(&e),
    };
    let mut ctx = Ctx {
        precision_bits,
        inputs: BTreeMap::new(),
        modules: vec!["surd"],
        tolerances: BTreeMap::new(),
    };
    let payload = match &cli.command {
        Command::Cz(a) => cmd_cz(&mut ctx, a),
        Command::Intersect(c) => cmd_intersect(&mut ctx, c),
        Command::ClassifyStar(a) => cmd_classify(&mut ctx, a),
        Command::Forcing(c) => cmd_forcing(&mut ctx, c),
        Command::GeodesicRho(a) => cmd_geodesic(&mut ctx, a),
        Command::Angenent(a) => cmd_angenent(&mut ctx, a),
        Command::OpenbookGrowth(a) => cmd_open_book(&mut ctx, a),
        Command::Oracle(c) => cmd_oracle(&mut ctx, c),
    };
    let payload = match payload {
        Ok(p) => p,
        Err(e) => return failure(&e),
    };
    let version = env!("CARGO_PKG_VERSION").to_string();
    let result = CommandResult {
        command: argv.iter().skip(1).cloned().collect(),
        inputs: ctx.inputs,
        payload,
        provenance: Provenance {
            modules: ctx.modules.iter().map(|m| format!("{m}@{version}")).collect(),
            version,
            precision_bits,
            tolerances: ctx.tolerances,
        },
    };
    match render(&result, cli.format) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => failure(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run_with_env(std::iter::once("reeb-forcing").chain(args.iter().copied()), None)
    }

    fn payload(o: &Outcome) -> Value {
        assert_eq!(o.code, 0, "{}", o.stderr);
        serde_json::from_str::<Value>(&o.stdout).unwrap()["payload"].clone()
    }

    #[test]
    fn cz_examples() {
        let o = go(&["cz", "--theta", "(1+1*sqrt(2))/1", "--k", "1"]);
        assert_eq!(payload(&o)["cz"], 5);
        let bad = go(&["cz", "--theta", "1/2", "--k", "2"]);
        assert_eq!(bad.code, EXIT_INPUT);
        assert!(bad.stderr.contains("resonant"));
    }

    #[test]
    fn forcing_example() {
        let o = go(&[
            "forcing",
            "hopf",
            "--theta1",
            "( -1+1*sqrt(2))/1",
            "--theta2",
            "(0+1*sqrt(2))/1",
            "--max-p",
            "2",
        ]);
        let p = payload(&o);
        let classes: Vec<Fraction> = serde_json::from_value(p["classes"].clone()).unwrap();
        assert_eq!(classes, vec![Fraction { p: 1, q: 1 }, Fraction { p: 2, q: 1 }]);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(go(&["cz", "--bogus"]).code, EXIT_USAGE);
        assert_eq!(go(&["nonsense"]).code, EXIT_USAGE);
        let help = go(&["--help"]);
        assert_eq!(help.code, 0);
        assert!(help.stdout.contains("openbook-growth"));
    }

    #[test]
    fn tsv_and_precision() {
        let o = go(&["--format", "tsv", "cz", "--hyperbolic", "2", "--k", "3"]);
        assert!(o.stdout.contains("payload.cz\t6\n"), "{}", o.stdout);
        let e = run_with_env(["reeb-forcing", "cz", "--hyperbolic", "1"], Some("lots"));
        assert_eq!(e.code, EXIT_INPUT);
        let ok = run_with_env(["reeb-forcing", "cz", "--hyperbolic", "1"], Some("256"));
        assert!(ok.stdout.contains("\"precision_bits\": 256"));
    }

    #[test]
    fn negative_values() {
        assert_eq!(payload(&go(&["cz", "--hyperbolic", "-3", "--k", "2"]))["cz"], -6);
        let o = go(&["forcing", "hopf", "--theta1", "-1+sqrt(2)", "--theta2", "sqrt(2)", "--max-p", "1"]);
        assert_eq!(payload(&o)["classes"].as_array().unwrap().len(), 1);
    }

    #[test]
    fn config_path_detection() {
        let argv: Vec<String> = ["x", "--format", "tsv", "oracle", "detect", "--slope", "0.5"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(command_path(&argv), vec!["oracle", "detect"]);
    }
}
