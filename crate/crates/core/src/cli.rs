//! Command-line front end: one JSON input schema, one JSON report per run.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::adlv::{adlv_enumerate, adlv_hn_compare, LatticeClass};
use crate::deformnum::two_slope_report;
use crate::eltype::{b_set, el_kottwitz, el_mazur, el_newton, el_sigma_hodge, el_type, is_mu_ordinary};
use crate::error::Error;
use crate::hodgenewton::{el_realization, hn_decompose, hn_levis, hn_reducible, LeviPartition};
use crate::io::{crystal_json, kottwitz_json, matrix_json, polygon_json, type_json, InputFile, RingHeader};
use crate::isocrystal::{hodge_polygon, kottwitz_point, newton_polygon, slope_decomposition};
use crate::polygon::{format_rational, lies_above};
use crate::selftest::run_selftest;

#[derive(Debug, Parser)]
#[command(name = "fcrystal", version, about = "Exact computations with F-crystals over truncated Witt vectors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file (standard input when omitted).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report file (standard output when omitted).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Override the ring precision N of the input.
    #[arg(long, global = true)]
    pub precision: Option<u32>,
    /// Window radius c for the ADLV commands.
    #[arg(long, global = true)]
    pub window: Option<u32>,
    /// Seed for the self-test.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Newton polygon (and the EL Newton polygon when `el` is given).
    Newton,
    /// Hodge polygon.
    Hodge,
    /// Kottwitz point.
    Kottwitz,
    /// Check that the Newton polygon lies above the Hodge polygon.
    Mazur,
    /// EL type (d, f).
    ElType,
    /// Whether ν equals μ̄.
    MuOrdinary,
    /// The set B(G, μ) for the input type.
    Bset,
    /// Hodge-Newton reducibility for the given partition.
    HnCheck,
    /// The coarsest-to-finest Levi partition cutting at every contact break.
    HnLevis,
    /// Hodge-Newton decomposition into factor crystals.
    HnDecompose,
    /// σ-orbits of labelled weight spaces.
    ElRealize,
    /// Affine Deligne-Lusztig lattices in a window.
    Adlv,
    /// Window counts for G and for the Levi of a Hodge-Newton decomposition.
    AdlvHn,
    /// Deformation-space numerics of a two-slope μ-ordinary datum.
    Deform,
    /// Deterministic self-test.
    Selftest,
    /// Slope decomposition into isoclinic components.
    Decompose,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Newton => "newton",
            Command::Hodge => "hodge",
            Command::Kottwitz => "kottwitz",
            Command::Mazur => "mazur",
            Command::ElType => "el-type",
            Command::MuOrdinary => "mu-ordinary",
            Command::Bset => "bset",
            Command::HnCheck => "hn-check",
            Command::HnLevis => "hn-levis",
            Command::HnDecompose => "hn-decompose",
            Command::ElRealize => "el-realize",
            Command::Adlv => "adlv",
            Command::AdlvHn => "adlv-hn",
            Command::Deform => "deform",
            Command::Selftest => "selftest",
            Command::Decompose => "decompose",
        }
    }
}

/// Exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Debug)]
enum Failure {
    Io(String),
    Parse(Error),
    Run(Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Io(_) | Failure::Parse(_) => EXIT_IO,
            Failure::Run(e) if e.is_precision() => EXIT_PRECISION,
            Failure::Run(_) => EXIT_DOMAIN,
        }
    }

    fn body(&self) -> Value {
        match self {
            Failure::Io(msg) => json!({"error": "Io", "message": msg}),
            Failure::Parse(e) => json!({"error": "Parse", "message": e.to_string()}),
            Failure::Run(e) => json!({"error": e.kind(), "message": e.to_string()}),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Runs one command and writes its report; returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    let mut report = Map::new();
    report.insert("command".into(), json!(cli.command.name()));
    report.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    let code = match execute(cli) {
        Ok((ring, body)) => {
            if let Some(r) = ring {
                report.insert("ring".into(), json!(r));
            }
            report.extend(body);
            EXIT_OK
        }
        Err(f) => {
            if let Value::Object(m) = f.body() {
                report.extend(m);
            }
            f.code()
        }
    };
    match write_report(cli.output.as_deref(), &Value::Object(report)) {
        Ok(()) => code,
        Err(msg) => {
            eprintln!("fcrystal: {msg}");
            EXIT_IO
        }
    }
}

fn write_report(path: Option<&Path>, report: &Value) -> std::result::Result<(), String> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    text.push('\n');
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        return out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| e.to_string());
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    tmp.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    tmp.persist(path).map_err(|e| format!("{}: {}", path.display(), e.error))?;
    Ok(())
}

fn read_input(cli: &Cli) -> Outcome<InputFile> {
    let text = match &cli.input {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
            s
        }
    };
    let mut input = InputFile::parse(&text).map_err(Failure::Parse)?;
    if let Some(n) = cli.precision {
        input.override_precision(n);
    }
    Ok(input)
}

type Body = Map<String, Value>;

fn obj(v: Value) -> Body {
    match v {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

fn execute(cli: &Cli) -> Outcome<(Option<RingHeader>, Body)> {
    if cli.command == Command::Selftest {
        let rep = run_selftest(cli.seed.unwrap_or(0));
        let body = obj(serde_json::to_value(&rep).map_err(|e| Failure::Io(e.to_string()))?);
        return if rep.passed {
            Ok((None, body))
        } else {
            Err(Failure::Run(Error::InvariantViolation(format!("self-test failed: {}", Value::Object(body)))))
        };
    }
    let input = read_input(cli)?;
    let ring = input.ring.clone();
    let window = cli.window.unwrap_or(1);
    let body = match cli.command {
        Command::Newton => with_min_precision(&input, newton)?,
        Command::Hodge => with_min_precision(&input, hodge)?,
        Command::Kottwitz => with_min_precision(&input, kottwitz)?,
        Command::Mazur => with_min_precision(&input, mazur)?,
        Command::ElType => with_min_precision(&input, el_type_cmd)?,
        Command::MuOrdinary => with_min_precision(&input, mu_ordinary)?,
        Command::HnCheck => with_min_precision(&input, hn_check)?,
        Command::HnLevis => with_min_precision(&input, hn_levis_cmd)?,
        Command::Bset => bset(&input)?,
        Command::HnDecompose => hn_decompose_cmd(&input)?,
        Command::ElRealize => el_realize(&input)?,
        Command::Adlv => adlv(&input, window)?,
        Command::AdlvHn => adlv_hn(&input, window)?,
        Command::Deform => deform(&input)?,
        Command::Decompose => decompose(&input)?,
        Command::Selftest => unreachable!(),
    };
    Ok((ring, body))
}

type Job = fn(&InputFile) -> crate::Result<Body>;

/// Runs the job and adds the least precision from which every smaller
/// budget up to the given one reproduces the same answer.
fn with_min_precision(input: &InputFile, job: Job) -> Outcome<Body> {
    let mut body = job(input)?;
    let Some(n) = input.ring.as_ref().map(|r| r.precision) else {
        return Ok(body);
    };
    let mut min = n;
    for k in (1..n).rev() {
        let mut lower = input.clone();
        lower.override_precision(k);
        match job(&lower) {
            Ok(b) if b == body => min = k,
            _ => break,
        }
    }
    body.insert("min_precision".into(), json!(min));
    Ok(body)
}

fn newton(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let mut out = obj(json!({"newton": polygon_json(&newton_polygon(sx.crystal())?)}));
    if sx.m() > 1 {
        out.insert("el_newton".into(), polygon_json(&el_newton(&sx)?));
    }
    Ok(out)
}

fn hodge(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let mut out = obj(json!({"hodge": polygon_json(&hodge_polygon(sx.crystal())?)}));
    if sx.m() > 1 {
        out.insert("mu_bar".into(), polygon_json(&el_sigma_hodge(&el_type(&sx)?)));
    }
    Ok(out)
}

fn kottwitz(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let mut out = obj(json!({"kottwitz": kottwitz_json(&kottwitz_point(sx.crystal())?)}));
    if sx.m() > 1 {
        out.insert("el_kottwitz".into(), kottwitz_json(&el_kottwitz(&sx)?));
    }
    Ok(out)
}

fn mazur(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let nu = newton_polygon(sx.crystal())?;
    let hodge = hodge_polygon(sx.crystal())?;
    let holds = lies_above(&nu, &hodge)? && nu.total_rise() == hodge.total_rise();
    let mut out = obj(json!({"newton": polygon_json(&nu), "hodge": polygon_json(&hodge), "holds": holds}));
    if sx.m() > 1 {
        out.insert("el_holds".into(), json!(el_mazur(&sx)?));
    }
    Ok(out)
}

fn el_type_cmd(input: &InputFile) -> crate::Result<Body> {
    let t = el_type(&input.structure()?)?;
    Ok(obj(json!({"type": type_json(&t), "mu_bar": polygon_json(&el_sigma_hodge(&t))})))
}

fn mu_ordinary(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let nu = el_newton(&sx)?;
    let mu = el_sigma_hodge(&el_type(&sx)?);
    Ok(obj(json!({"mu_ordinary": is_mu_ordinary(&sx)?, "nu": polygon_json(&nu), "mu_bar": polygon_json(&mu)})))
}

/// ν from the structure; μ̄ from `mu` when given, else from the EL type.
fn nu_mu(input: &InputFile) -> crate::Result<(crate::eltype::ELStructure, crate::polygon::ConvexPolygon, crate::polygon::ConvexPolygon)> {
    let sx = input.structure()?;
    let nu = el_newton(&sx)?;
    let mu = match input.mu()? {
        Some(mu) => mu,
        None => el_sigma_hodge(&el_type(&sx)?),
    };
    Ok((sx, nu, mu))
}

fn hn_check(input: &InputFile) -> crate::Result<Body> {
    let part = input.partition()?.ok_or_else(|| Error::InvalidInput("missing field `partition`".into()))?;
    let (_, nu, mu) = nu_mu(input)?;
    Ok(obj(json!({
        "reducible": hn_reducible(&nu, &mu, &part)?,
        "partition": part,
        "nu": polygon_json(&nu),
        "mu_bar": polygon_json(&mu),
    })))
}

fn hn_levis_cmd(input: &InputFile) -> crate::Result<Body> {
    let (_, nu, mu) = nu_mu(input)?;
    Ok(obj(json!({"partition": hn_levis(&nu, &mu)?, "nu": polygon_json(&nu), "mu_bar": polygon_json(&mu)})))
}

fn partition_or_levis(input: &InputFile) -> crate::Result<LeviPartition> {
    if let Some(p) = input.partition()? {
        return Ok(p);
    }
    let (_, nu, mu) = nu_mu(input)?;
    hn_levis(&nu, &mu)?.ok_or(Error::NotHNReducible)
}

fn bset(input: &InputFile) -> crate::Result<Body> {
    let t = match input.el_type()? {
        Some(t) => t,
        None => el_type(&input.structure()?)?,
    };
    let set: Vec<Value> = b_set(&t)?.iter().map(polygon_json).collect();
    Ok(obj(json!({"type": type_json(&t), "b_set": set})))
}

fn hn_decompose_cmd(input: &InputFile) -> crate::Result<Body> {
    let sx = input.structure()?;
    let part = partition_or_levis(input)?;
    let rep = hn_decompose(&sx, &part)?;
    let factors: Vec<Value> = rep
        .factors
        .iter()
        .map(|f| {
            let st = &f.structure;
            json!({
                "nu": polygon_json(&f.nu),
                "mu_bar": polygon_json(&f.mu_bar),
                "type": type_json(&f.el_type),
                "crystal": crystal_json(st.crystal(), Some((st.m(), st.grading()))),
                "el": {"m": st.m(), "grading": st.grading()},
                "basis": matrix_json(&f.basis),
            })
        })
        .collect();
    Ok(obj(json!({
        "partition": rep.partition,
        "factors": factors,
        "isogeny_denominator": rep.isogeny_denominator,
    })))
}

fn el_realize(input: &InputFile) -> crate::Result<Body> {
    let w = input.weights.as_ref().ok_or_else(|| Error::InvalidInput("missing field `weights`".into()))?;
    let orbits: Vec<Value> =
        el_realization(&w.dims, &w.sigma)?.into_iter().map(|(m, n)| json!({"m": m, "n": n})).collect();
    Ok(obj(json!({"orbits": orbits})))
}

fn class_json(c: &LatticeClass) -> Value {
    let hnf: Vec<Vec<Vec<String>>> =
        c.hnf.iter().map(|row| row.iter().map(|e| e.iter().map(|v| v.to_string()).collect()).collect()).collect();
    json!({"denominator": c.denominator, "hnf": hnf})
}

fn require_mu(input: &InputFile) -> crate::Result<crate::polygon::ConvexPolygon> {
    input.mu()?.ok_or_else(|| Error::InvalidInput("missing field `mu`".into()))
}

fn adlv(input: &InputFile, window: u32) -> crate::Result<Body> {
    let mu = require_mu(input)?;
    let res = if input.el.is_some() {
        let sx = input.structure()?;
        adlv_enumerate(sx.crystal(), &mu, window, Some(&sx))?
    } else {
        adlv_enumerate(&input.crystal()?, &mu, window, None)?
    };
    let classes: Vec<Value> = res.classes.iter().map(class_json).collect();
    Ok(obj(json!({
        "window": res.window,
        "count": res.count(),
        "classes": classes,
        "complete_in_window": res.complete_in_window,
        "candidates": res.candidates,
    })))
}

fn adlv_hn(input: &InputFile, window: u32) -> crate::Result<Body> {
    let sx = input.structure()?;
    let part = partition_or_levis(input)?;
    let mu = require_mu(input)?;
    let cmp = adlv_hn_compare(&sx, &part, &mu, window)?;
    Ok(obj(json!({
        "window": window,
        "partition": part,
        "count_g": cmp.count_g,
        "count_m": cmp.count_m,
        "equal": cmp.equal,
    })))
}

fn deform(input: &InputFile) -> crate::Result<Body> {
    let (t1, t2) = match input.types()? {
        Some(ts) if ts.len() == 2 => (ts[0].clone(), ts[1].clone()),
        Some(ts) => return Err(Error::InvalidInput(format!("`types` needs exactly two entries, got {}", ts.len()))),
        None => {
            let sx = input.structure()?;
            let part = partition_or_levis(input)?;
            let rep = hn_decompose(&sx, &part)?;
            if rep.factors.len() != 2 {
                return Err(Error::InvalidInput(format!(
                    "a two-slope datum is required, found {} factors",
                    rep.factors.len()
                )));
            }
            (rep.factors[0].el_type.clone(), rep.factors[1].el_type.clone())
        }
    };
    let r = two_slope_report(&t1, &t2)?;
    Ok(obj(json!({
        "type1": type_json(&r.type1),
        "type2": type_json(&r.type2),
        "f_prime": r.f_prime,
        "d_prime_max": r.d_prime_max,
        "defspace_dim": r.defspace_dim,
        "rigid_factors": r.rigid_factors,
        "lubin_tate_bound": r.lubin_tate_bound(),
    })))
}

fn decompose(input: &InputFile) -> crate::Result<Body> {
    let x = input.crystal()?;
    let d = slope_decomposition(&x)?;
    let comps: Vec<Value> = d
        .components
        .iter()
        .map(|c| {
            json!({
                "slope": format_rational(&c.slope),
                "height": c.height(),
                "crystal": crystal_json(&c.crystal, None),
                "basis": matrix_json(&c.basis),
            })
        })
        .collect();
    Ok(obj(json!({"components": comps, "isogeny_denominator": d.isogeny_denominator, "guard": d.guard})))
}
