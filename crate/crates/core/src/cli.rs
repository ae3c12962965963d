//! Command-line front end. Every command reads one JSON payload and writes
//! one JSON document; failures are JSON error objects with exit code 2 for
//! malformed input and 1 for mathematical preconditions.

use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::discriminant::{
    admissible_subsets, bifurcation_newton, critical_points_counts, discriminant_multiplicity, newton_ci_discriminant,
    newton_discriminant_hypersurface, resultant_multiplicity, CoefficientSpec,
};
use crate::error::Error;
use crate::fiber::{fiber_polytope, mixed_fiber_polytope};
use crate::io::{
    config_from_json, int_to_json, list, pair_from_json, polytope_from_json, polytope_to_json, q_to_json,
    spec_from_json, split_from_json, table_to_json, SchemaError,
};
use crate::obstruction::{degree_from_table, dual_defect_report, obstruction_table, PointConfiguration};
use crate::oracle::{critical_point_oracle, univariate_discriminant};
use crate::polytope::Polytope;
use crate::rational::{factorial, Q};
use crate::selftest;
use crate::volume::{mixed_volume, mixed_volume_pairs};

#[derive(Parser, Debug)]
#[command(name = "polydisc", version, about = "Exact Newton polytopes of discriminants and mixed fiber polytopes")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON payload file ("-" for stdin).
    #[arg(long = "in", global = true, value_name = "FILE")]
    input: Option<PathBuf>,

    /// Inline JSON payload; a point configuration, or a list of them.
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<String>,

    /// Treat every coefficient as an independent variable.
    #[arg(long, global = true)]
    universal: bool,

    /// Divide discriminant Newton polytopes by their multiplicity.
    #[arg(long, global = true)]
    reduced: bool,

    #[arg(long, global = true, value_enum, default_value_t = Normalization::Lebesgue)]
    normalization: Normalization,

    /// Spaces per indentation level; 0 prints compact JSON.
    #[arg(long = "json-indent", global = true, default_value_t = 2, value_name = "N")]
    json_indent: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Normalization {
    /// MV(P, .., P) = Vol(P).
    Lebesgue,
    /// MV(S, .., S) = 1 for the standard simplex S.
    Lattice,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convex hull of a point set.
    Hull,
    /// Mixed volume of m polytopes in R^m.
    MixedVolume,
    /// Mixed volume of m polytope pairs sharing a recession cone.
    MixedVolumePairs,
    /// Fiber polytope of a split polytope.
    Fiber,
    /// Mixed fiber polytope of k + 1 split polytopes over R^k.
    MixedFiber,
    /// Milnor numbers c and Euler obstructions e over the face poset.
    EulerTable,
    /// Degree of the A-discriminant.
    Degree,
    /// Degree and the combinatorial dual defect tests.
    DualDefect,
    /// Newton polytope of the discriminant of one family.
    DiscriminantNewton,
    /// Newton polytope of a complete intersection discriminant.
    CiDiscriminant,
    /// Newton polytopes of the bifurcation set components.
    BifurcationNewton,
    /// Multiplicity of the sparse resultant.
    ResultantMultiplicity,
    /// Critical point counts of the height on curves and surfaces.
    CriticalPoints {
        /// Also solve the critical systems for this many random draws.
        #[arg(long, default_value_t = 0)]
        verify: u64,
    },
    /// Explicit discriminant of a univariate configuration.
    OracleDisc,
    /// Run the acceptance criteria and print a pass/fail table.
    Selftest {
        /// Run a single criterion.
        #[arg(long)]
        only: Option<u8>,
    },
}

#[derive(Debug)]
enum Failure {
    Schema(SchemaError),
    Usage(String),
    Math(Error),
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Failure::Schema(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Math(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Schema(_) | Failure::Usage(_) => 2,
            Failure::Math(_) => 1,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Schema(e) => ("Schema", e.to_string()),
            Failure::Usage(m) => ("Usage", m.clone()),
            Failure::Math(e) => (e.kind(), e.to_string()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

/// Output of a run: what goes to stdout and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
}

fn render(v: &Value, indent: usize) -> String {
    if indent == 0 {
        return v.to_string();
    }
    let pad = vec![b' '; indent];
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, serde_json::ser::PrettyFormatter::with_indent(&pad));
    v.serialize(&mut ser).expect("serializing a Value cannot fail");
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { code: 0, stdout: e.to_string() };
            }
            let f = Failure::Usage(e.to_string().trim().to_string());
            return Outcome { code: f.exit_code(), stdout: render(&f.to_json(), 2) };
        }
    };
    if let Command::Selftest { only } = cli.command {
        return run_selftest(only);
    }
    match dispatch(&cli) {
        Ok(v) => Outcome { code: 0, stdout: render(&v, cli.json_indent) },
        Err(f) => Outcome { code: f.exit_code(), stdout: render(&f.to_json(), cli.json_indent) },
    }
}

fn run_selftest(only: Option<u8>) -> Outcome {
    let reports = match only {
        Some(id) => vec![selftest::run_criterion(id)],
        None => selftest::run_all(),
    };
    let mut out: Vec<String> = reports.iter().map(|r| r.line()).collect();
    let failed = reports.iter().filter(|r| !r.passed).count();
    out.push(format!("{} passed, {failed} failed", reports.len() - failed));
    Outcome { code: if failed == 0 { 0 } else { 1 }, stdout: out.join("\n") }
}

fn payload(cli: &Cli) -> Result<Value, Failure> {
    let text = match (&cli.input, &cli.config) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either --in or --config, not both".into())),
        (Some(path), None) if path.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("reading stdin: {e}")))?;
            s
        }
        (Some(path), None) => {
            std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?
        }
        (None, Some(inline)) => inline.clone(),
        (None, None) => return Err(Failure::Usage("no input; pass --in FILE or --config JSON".into())),
    };
    serde_json::from_str(&text)
        .map_err(|e| Failure::Schema(SchemaError { path: "input".into(), message: format!("invalid JSON: {e}") }))
}

fn configs(v: &Value) -> Result<Vec<PointConfiguration>, Failure> {
    Ok(list(v, "configs", "input")?.into_iter().map(|(p, x)| config_from_json(x, &p)).collect::<Result<_, _>>()?)
}

fn specs(cli: &Cli, v: &Value) -> Result<Vec<CoefficientSpec>, Failure> {
    if cli.universal {
        return Ok(CoefficientSpec::universal_family(&configs(v)?));
    }
    Ok(list(v, "specs", "input")?.into_iter().map(|(p, x)| spec_from_json(x, &p)).collect::<Result<_, _>>()?)
}

fn scaled(cli: &Cli, mv: Q, m: usize) -> Value {
    let (value, name) = match cli.normalization {
        Normalization::Lebesgue => (mv, "lebesgue"),
        Normalization::Lattice => (mv * Q::from_integer(factorial(m)), "lattice"),
    };
    json!({ "mixed_volume": q_to_json(&value), "normalization": name })
}

fn big(x: &BigInt) -> Value {
    int_to_json(x)
}

fn dispatch(cli: &Cli) -> Result<Value, Failure> {
    let v = payload(cli)?;
    let out = match &cli.command {
        Command::Hull => {
            let pts = match &v {
                Value::Object(o) if o.contains_key("points") || o.contains_key("vertices") => v.clone(),
                Value::Array(_) => v.clone(),
                _ => return Err(SchemaError { path: "input".into(), message: "expected a point array".into() }.into()),
            };
            polytope_to_json(&polytope_from_json(&pts, "input")?)
        }
        Command::MixedVolume => {
            let ps: Vec<Polytope> = list(&v, "polytopes", "input")?
                .into_iter()
                .map(|(p, x)| polytope_from_json(x, &p))
                .collect::<Result<_, _>>()?;
            scaled(cli, mixed_volume(&ps)?, ps.len())
        }
        Command::MixedVolumePairs => {
            let pairs: Vec<_> = list(&v, "pairs", "input")?
                .into_iter()
                .map(|(p, x)| pair_from_json(x, &p))
                .collect::<Result<_, _>>()?;
            scaled(cli, mixed_volume_pairs(&pairs)?, pairs.len())
        }
        Command::Fiber => {
            let d = split_from_json(&v, "input")?;
            json!({ "fiber_polytope": polytope_to_json(&fiber_polytope(&d)) })
        }
        Command::MixedFiber => {
            let ds: Vec<_> = list(&v, "splits", "input")?
                .into_iter()
                .map(|(p, x)| split_from_json(x, &p))
                .collect::<Result<_, _>>()?;
            json!({ "mixed_fiber_polytope": polytope_to_json(&mixed_fiber_polytope(&ds)?) })
        }
        Command::EulerTable => {
            let a = config_from_json(&v, "input")?;
            table_to_json(&a, &obstruction_table(&a)?)
        }
        Command::Degree => {
            let a = config_from_json(&v, "input")?;
            let d = degree_from_table(&a, &obstruction_table(&a)?);
            json!({ "degree": big(&d), "dual_defect": d == BigInt::from(0) })
        }
        Command::DualDefect => {
            let a = config_from_json(&v, "input")?;
            let r = dual_defect_report(&a)?;
            json!({
                "degree": big(&r.degree),
                "dual_defect": r.degree_zero,
                "two_parallel_hyperplanes": r.two_hyperplanes,
                "iterated_circuit": r.iterated_circuit,
            })
        }
        Command::DiscriminantNewton => {
            let spec = if cli.universal {
                CoefficientSpec::universal(config_from_json(&v, "input")?)
            } else {
                spec_from_json(&v, "input")?
            };
            let newton = newton_discriminant_hypersurface(&spec, cli.reduced)?;
            json!({
                "newton_polytope": polytope_to_json(&newton),
                "reduced": cli.reduced,
                "multiplicity": big(&discriminant_multiplicity(spec.config())),
            })
        }
        Command::CiDiscriminant => {
            let ss = specs(cli, &v)?;
            let parts: Vec<PointConfiguration> = ss.iter().map(|s| s.config().clone()).collect();
            let adm: Vec<Value> =
                admissible_subsets(&parts)?.into_iter().map(|(j, c)| json!({ "subset": j, "codim": c })).collect();
            json!({
                "newton_polytope": polytope_to_json(&newton_ci_discriminant(&ss, cli.reduced)?),
                "reduced": cli.reduced,
                "admissible_subsets": adm,
            })
        }
        Command::BifurcationNewton => {
            let b = bifurcation_newton(&specs(cli, &v)?, cli.reduced)?;
            let factors: Vec<Value> = b
                .factors
                .iter()
                .map(
                    |f| json!({ "subset": f.subset, "faces": f.faces, "newton_polytope": polytope_to_json(&f.newton) }),
                )
                .collect();
            json!({ "factors": factors, "newton_polytope": polytope_to_json(&b.newton), "reduced": cli.reduced })
        }
        Command::ResultantMultiplicity => {
            let r = resultant_multiplicity(&configs(&v)?)?;
            json!({
                "trivial": r.trivial,
                "minimal_subset": r.minimal_subset,
                "d1": big(&r.d1),
                "d2": big(&r.d2),
                "multiplicity": big(&r.multiplicity),
            })
        }
        Command::CriticalPoints { verify } => {
            let delta = polytope_from_json(&v, "input")?;
            let c = critical_points_counts(&delta)?;
            let mut out = json!({ "curve": big(&c.curve), "surface": big(&c.surface) });
            if *verify > 0 {
                let draws: Vec<Value> = (0..*verify)
                    .map(|seed| {
                        critical_point_oracle(&delta, seed)
                            .map(|o| json!({ "seed": seed, "curve": o.curve, "surface": o.surface }))
                    })
                    .collect::<Result<_, _>>()?;
                out["oracle"] = Value::Array(draws);
            }
            out
        }
        Command::OracleDisc => {
            let a = config_from_json(&v, "input")?;
            let d = univariate_discriminant(&a)?;
            let terms: Vec<Value> =
                d.poly.terms().rev().map(|(e, c)| json!({ "exponent": e, "coeff": big(c) })).collect();
            json!({
                "terms": terms,
                "newton_polytope": polytope_to_json(&d.newton),
                "degree": d.degree,
                "multiplicity": d.multiplicity,
            })
        }
        Command::Selftest { .. } => unreachable!("handled before dispatch"),
    };
    Ok(out)
}

/// Caps the worker pool at POLYDISC_THREADS when it is set.
pub fn init_threads() {
    if let Some(n) = std::env::var("POLYDISC_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}
