//! `solvbase`: build the named matrices and groups, verify base-size claims
//! and certificates, scan the numeric bounds and reproduce the result tables.
//!
//! Exit status: 0 verified, 1 refuted, 2 inconclusive (a cap was hit),
//! 3 usage or input error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use solvbase::basesize::{Certificate, Verdict};
use solvbase::bounds::{below_gluck_manz, case2_n5, gluck_manz, sinbase_row, Denominator};
use solvbase::constructions::{
    conjugator_diag_z, conjugator_igrekl, conjugator_irrtog, gl23_in_gl29, gl29_xy, gl32_matrices, gr_z, matrix_big_a,
    matrix_small_a, orbit_witnesses, prop_ni1_xyz, quaternion_normalizer, singer_normalizer, GrVariant, OrbitScheme,
    SingerModel,
};
use solvbase::gf::Field;
use solvbase::linalg::Matrix;
use solvbase::scenarios::{self, RunOptions, ScenarioError};
use solvbase::semilinear::MatGroup;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

// Writes to stdout, ignoring a closed pipe (`solvbase --list | head`).
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

const EXIT_REFUTED: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "solvbase", version, about = "Base sizes of solvable matrix groups over small finite fields")]
struct Cli {
    /// Print every registered scenario with the statement it checks.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Clone)]
struct RunFlags {
    /// Master seed; every random search derives its own stream from it.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Random conjugator samples per search.
    #[arg(long, global = true, default_value_t = 200)]
    trials: usize,
    #[arg(long, global = true, default_value_t = solvbase::semilinear::DEFAULT_CLOSURE_CAP)]
    closure_cap: usize,
    #[arg(long, global = true, default_value_t = solvbase::basesize::DEFAULT_INDEX_CAP)]
    index_cap: usize,
    #[arg(long, global = true, default_value_t = solvbase::basesize::DEFAULT_WORK_CAP)]
    work_cap: u64,
    /// Accepted for compatibility; work runs sequentially and output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a named matrix or group.
    Construct(ConstructArgs),
    /// Run a scenario or re-check certificates from a file.
    Verify {
        /// Scenario name, or path to a certificate file (one certificate or an array).
        target: String,
        /// Also write the certificates to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact bound tables.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Re-run a result table at desk scale.
    Reproduce {
        /// `irred` or `tab`.
        table: String,
        /// Row labels to keep, comma separated (all when absent; an empty list gives an empty report).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        rows: Option<Vec<String>>,
        /// Largest field order to include.
        #[arg(long, default_value_t = 9)]
        q: u32,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    /// One of the tags printed by `construct --help`:
    /// eq-igrek, eq-adef, eq-thesin, eq-thesin-normalizer, lemma-irrtog-y, lemma-diag-z, lemma-igrekl,
    /// prop-ni1, eq-orb, eq-orb2, eq-GRzdef1, eq-GRzdef2, eq-GRzdefq23, eq-GRzdefq23mr,
    /// eq-GRzdefcase221, eq-GRzdefcase222, gl23-in-gl29, lemma-rtdiagfield-2-xy, lemma-rtdiagfield-3,
    /// quaternion-normalizer
    tag: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    a: Option<u32>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    j1: Option<usize>,
    /// First rows of the 2x2 blocks, comma separated.
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<usize>,
    /// Extend by the Frobenius automorphism where that makes sense.
    #[arg(long)]
    phi: bool,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// The Singer-normaliser fixed-point test a^2/b ≥ 1 for 4 ≤ n ≤ nmax, q ≤ qmax, both denominators.
    Sinbase {
        #[arg(long, default_value_t = 8)]
        nmax: u64,
        #[arg(long, default_value_t = 16)]
        qmax: u64,
    },
    /// |S| < q^(9n/4)/2.8 for a solvable S ≤ GL_n(q), against the Singer normaliser order.
    GluckManz {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        q: u64,
    },
    /// (25^2 + 500^2 + 624^2)/((1/10) q^12) for q ≤ qmax.
    Case2N5 {
        #[arg(long, default_value_t = 9)]
        qmax: u64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Construction(#[from] solvbase::constructions::ConstructionError),
    #[error(transparent)]
    Field(#[from] solvbase::gf::GfError),
    #[error(transparent)]
    Semi(#[from] solvbase::semilinear::SemiError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(v) => ExitCode::from(exit_code(v)),
        Err(e) => {
            eprintln!("solvbase: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn exit_code(v: Verdict) -> u8 {
    match v {
        Verdict::Verified => 0,
        Verdict::Refuted => EXIT_REFUTED,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn options(f: &RunFlags) -> RunOptions {
    RunOptions { seed: f.seed, trials: f.trials, closure_cap: f.closure_cap, index_cap: f.index_cap, work_cap: f.work_cap }
}

fn dispatch(cli: Cli) -> Result<Verdict, CliError> {
    if cli.list {
        list(cli.run.format);
        return Ok(Verdict::Verified);
    }
    let opts = options(&cli.run);
    let format = cli.run.format;
    match cli.command {
        None => Err(CliError::Usage("no command given; try --help".into())),
        Some(Command::Construct(args)) => construct(&args, format),
        Some(Command::Verify { target, out }) => verify(&target, out.as_deref(), &opts, format),
        Some(Command::Bounds { which }) => bounds(&which, format),
        Some(Command::Reproduce { table, rows, q }) => {
            let rows: Option<Vec<String>> = rows.map(|r| r.into_iter().filter(|s| !s.is_empty()).collect());
            let report = scenarios::reproduce(&table, rows.as_deref(), q, &opts).map_err(|e| match e {
                ScenarioError::Unknown(t) => {
                    CliError::Usage(format!("unknown table {t:?}; expected one of {:?}", scenarios::TABLES))
                }
                e => e.into(),
            })?;
            match format {
                Format::Json => out!("{}", serde_json::to_string_pretty(&report).expect("report serialises")),
                Format::Text => {
                    out!("table\trow\tscenario\tclaimed\tcomputed\tverdict\tnote");
                    for r in &report.rows {
                        out!(
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            r.table,
                            r.row,
                            r.scenario,
                            r.claimed,
                            r.computed,
                            verdict_word(r.verdict),
                            r.note
                        );
                    }
                    out!("overall\t{}\t{} rows", verdict_word(report.verdict()), report.rows.len());
                }
            }
            Ok(report.verdict())
        }
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Verified => "verified",
        Verdict::Refuted => "refuted",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn list(format: Format) {
    let all = scenarios::registry();
    match format {
        Format::Json => {
            let v: Vec<Value> = all
                .iter()
                .map(|s| json!({ "name": s.name, "anchor": s.anchor, "subgroup": s.subgroup.tag, "params": scenarios::params_text(&s.subgroup) }))
                .collect();
            out!("{}", serde_json::to_string_pretty(&v).expect("list serialises"));
        }
        Format::Text => {
            for s in &all {
                out!("{}\t{}", s.name, s.anchor);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// verify

fn verify(target: &str, out: Option<&Path>, opts: &RunOptions, format: Format) -> Result<Verdict, CliError> {
    let path = Path::new(target);
    let from_file = scenarios::find(target).is_err() && path.exists();
    let (verdict, certificates, lines) = if from_file {
        let text = std::fs::read_to_string(path)?;
        let certs = scenarios::parse_certificates(&text).map_err(|e| CliError::Parse(format!("{target}: {e}")))?;
        if certs.is_empty() {
            return Err(CliError::Parse(format!("{target}: no certificates")));
        }
        let mut verdict = Verdict::Verified;
        let mut lines = Vec::new();
        let mut again = Vec::new();
        for c in &certs {
            let (v, recomputed, computed) = scenarios::verify_certificate(c, opts)?;
            verdict = verdict.and(v);
            lines.push(json!({
                "case": c.case,
                "claim": scenarios::describe_claim(&c.claim),
                "computed": computed,
                "verdict": v,
            }));
            again.push(recomputed);
        }
        (verdict, again, lines)
    } else {
        let outcome = scenarios::run_named(target, opts).map_err(|e| match e {
            ScenarioError::Unknown(n) => {
                CliError::Usage(format!("{n:?} is neither a registered scenario nor a readable file (see --list)"))
            }
            e => e.into(),
        })?;
        let lines = outcome
            .lines
            .iter()
            .map(|l| json!({ "case": outcome.scenario, "claim": l.claim, "computed": l.computed, "verdict": l.verdict }))
            .collect();
        (outcome.verdict, outcome.certificates, lines)
    };
    if let Some(p) = out {
        std::fs::write(p, certificates_json(&certificates) + "\n")?;
    }
    match format {
        Format::Json => out!("{}", certificates_json(&certificates)),
        Format::Text => {
            for l in &lines {
                out!(
                    "{}\t{}\t{}\t{}",
                    l["case"].as_str().unwrap_or_default(),
                    l["claim"].as_str().unwrap_or_default(),
                    l["computed"].as_str().unwrap_or_default(),
                    l["verdict"].as_str().unwrap_or_default()
                );
            }
            out!("verdict\t{}", verdict_word(verdict));
        }
    }
    Ok(verdict)
}

fn certificates_json(certs: &[Certificate]) -> String {
    serde_json::to_string_pretty(certs).expect("certificates serialise")
}

// ---------------------------------------------------------------------------
// bounds

fn bounds(which: &BoundsCommand, format: Format) -> Result<Verdict, CliError> {
    match *which {
        BoundsCommand::Sinbase { nmax, qmax } => {
            let mut rows = Vec::new();
            for n in 4..=nmax {
                for q in 2..=qmax {
                    if solvbase::gf::prime_power(q).is_none() {
                        continue;
                    }
                    for den in [Denominator::QMinusOne, Denominator::NMinusOne] {
                        let r = sinbase_row(n, q, den);
                        rows.push(json!({
                            "n": n,
                            "q": q,
                            "denominator": if den == Denominator::QMinusOne { "q-1" } else { "n-1" },
                            "a": r.a.to_string(),
                            "b": format!("{}^({}/2)/{}", q, n * n, 2 * n),
                            "verdict": if r.fails { "a^2/b>=1" } else { "a^2/b<1" },
                            "ratio": format!("({})/{}^({}/2)", r.scaled, q, n * n),
                        }));
                    }
                }
            }
            match format {
                Format::Json => out!("{}", serde_json::to_string_pretty(&rows).expect("rows serialise")),
                Format::Text => {
                    out!("n\tq\tdenominator\ta\tb\tverdict\tratio");
                    for r in &rows {
                        let s = |k: &str| match &r[k] {
                            Value::String(s) => s.clone(),
                            v => v.to_string(),
                        };
                        out!(
                            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                            s("n"),
                            s("q"),
                            s("denominator"),
                            s("a"),
                            s("b"),
                            s("verdict"),
                            s("ratio")
                        );
                    }
                }
            }
            Ok(Verdict::Verified)
        }
        BoundsCommand::GluckManz { n, q } => {
            if n == 0 || solvbase::gf::prime_power(q).is_none() {
                return Err(CliError::Usage(format!("need n ≥ 1 and q a prime power, got n = {n}, q = {q}")));
            }
            let bound = gluck_manz(n, q);
            let singer = num_bigint::BigUint::from(n) * (num_bigint::BigUint::from(q).pow(n as u32) - 1u32);
            let below = below_gluck_manz(&singer, n, q);
            let v = json!({
                "n": n,
                "q": q,
                "bound": bound.to_string(),
                "bound_approx": bound.approx(),
                "singer_normalizer_order": singer.to_string(),
                "below": below,
            });
            match format {
                Format::Json => out!("{}", serde_json::to_string_pretty(&v).expect("serialises")),
                Format::Text => {
                    out!("q^(9n/4)/2.8 = {} ≈ {:.6e}", bound, bound.approx());
                    out!("n(q^n - 1) = {singer}: {}", if below { "below the bound" } else { "NOT below the bound" });
                }
            }
            Ok(Verdict::from_bool(below))
        }
        BoundsCommand::Case2N5 { qmax } => {
            let rows: Vec<Value> = (2..=qmax)
                .filter(|&q| solvbase::gf::prime_power(q).is_some())
                .map(|q| {
                    let v = case2_n5(q);
                    json!({ "q": q, "value": v.to_string(), "below_one": v < num_rational::BigRational::from_integer(1.into()) })
                })
                .collect();
            match format {
                Format::Json => out!("{}", serde_json::to_string_pretty(&rows).expect("serialises")),
                Format::Text => {
                    out!("(25^2 + 500^2 + 624^2) / ((1/10) q^12) = 639001 * 10 / q^12");
                    out!("q\tvalue\t< 1");
                    for r in &rows {
                        out!("{}\t{}\t{}", r["q"], r["value"].as_str().unwrap_or_default(), r["below_one"]);
                    }
                }
            }
            Ok(Verdict::Verified)
        }
    }
}

// ---------------------------------------------------------------------------
// construct

fn need<T: Copy>(v: Option<T>, name: &str, tag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{tag} needs --{name}")))
}

fn field(q: Option<u32>, default: u32) -> Result<Arc<Field>, CliError> {
    Ok(Arc::new(Field::of_order(q.unwrap_or(default))?))
}

/// Named matrices plus, for groups, the order and generators.
struct Dump {
    field: u32,
    matrices: Vec<(String, Matrix)>,
    notes: Vec<(String, String)>,
}

impl Dump {
    fn new(f: &Field) -> Dump {
        Dump { field: f.order(), matrices: Vec::new(), notes: Vec::new() }
    }

    fn mat(mut self, name: impl Into<String>, m: Matrix) -> Dump {
        self.matrices.push((name.into(), m));
        self
    }

    fn note(mut self, k: &str, v: impl ToString) -> Dump {
        self.notes.push((k.into(), v.to_string()));
        self
    }

    fn group(mut self, g: &MatGroup) -> Dump {
        self.notes.push(("order".into(), g.order().map_or("not enumerated".into(), |o| o.to_string())));
        for (i, x) in g.gens.iter().enumerate() {
            self.notes.push((format!("gen{}", i + 1), x.to_text()));
        }
        self
    }
}

fn construct(args: &ConstructArgs, format: Format) -> Result<Verdict, CliError> {
    let tag = args.tag.as_str();
    let dump = build_dump(args)?;
    match format {
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("tag".into(), json!(tag));
            obj.insert("q".into(), json!(dump.field));
            for (k, m) in &dump.matrices {
                obj.insert(k.clone(), json!(m.to_text()));
            }
            for (k, v) in &dump.notes {
                obj.insert(k.clone(), json!(v));
            }
            out!("{}", serde_json::to_string_pretty(&Value::Object(obj)).expect("serialises"));
        }
        Format::Text => {
            out!("{tag} over GF({})", dump.field);
            for (k, m) in &dump.matrices {
                out!("{k} = [{}]", m.to_text());
            }
            for (k, v) in &dump.notes {
                out!("{k}: {v}");
            }
        }
    }
    Ok(Verdict::Verified)
}

fn build_dump(args: &ConstructArgs) -> Result<Dump, CliError> {
    let tag = args.tag.as_str();
    let n = || need(args.n, "n", tag);
    let m = || need(args.m, "m", tag);
    let gr = |f: &Arc<Field>, variant: GrVariant| -> Result<Dump, CliError> {
        let nn = n()?;
        Ok(Dump::new(f).mat("z", gr_z(f, nn, &variant)?).note("variant", format!("{variant:?}")))
    };
    match tag {
        "eq-igrek" => {
            let f = field(args.q, 3)?;
            let a = matrix_big_a(&f, n()?);
            let inv = a.inverse().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Dump::new(&f).mat("A", a).mat("A^-1", inv))
        }
        "eq-adef" => {
            let f = field(args.q, 3)?;
            Ok(Dump::new(&f).mat("a", matrix_small_a(&f, n()?, m()?)?))
        }
        "eq-thesin" | "eq-thesin-normalizer" => {
            let f = field(args.q, 5)?;
            let model = SingerModel::gl2(&f, args.a)?;
            let mut d = Dump::new(&f)
                .note("a", model.a.unwrap_or_default())
                .mat("basis", model.basis_matrix().expect("2-dimensional model"))
                .mat("generator", model.generator())
                .mat("normalizing", model.normalizing_element());
            if tag == "eq-thesin-normalizer" {
                d = d.group(&singer_normalizer(&model)?);
            }
            Ok(d)
        }
        "lemma-irrtog-y" => {
            let f = field(args.q, 3)?;
            let nn = n()?;
            let (_, y) = conjugator_irrtog(&[Matrix::identity(nn, &f)], nn)?;
            Ok(Dump::new(&f).note("det", y.det()).mat("y", y))
        }
        "lemma-diag-z" => {
            let f = field(args.q, 3)?;
            Ok(Dump::new(&f).mat("z", conjugator_diag_z(&f, n()?, m()?)?))
        }
        "lemma-igrekl" => {
            let f = field(args.q, 3)?;
            let (mm, k) = (m()?, need(args.k, "k", tag)?);
            let parts = vec![Matrix::identity(mm, &f); k];
            Ok(Dump::new(&f).mat("x", conjugator_igrekl(&parts)?))
        }
        "prop-ni1" => {
            let f = field(args.q, 4)?;
            let (x, y, z) = prop_ni1_xyz(&f, n()?)?;
            Ok(Dump::new(&f).mat("x", x).mat("y", y).mat("z", z))
        }
        "eq-orb" | "eq-orb2" => {
            let f = field(args.q, 5)?;
            let scheme =
                if tag == "eq-orb" { OrbitScheme::Orb { m: m()? } } else { OrbitScheme::Orb2 { l: need(args.l, "l", tag)? } };
            let zs = orbit_witnesses(&f, scheme, n()?)?;
            Ok(zs.into_iter().enumerate().fold(Dump::new(&f), |d, (i, z)| d.mat(format!("z{}", i + 1), z)))
        }
        "eq-GRzdef1" => {
            let f = field(args.q, 4)?;
            gr(&f, GrVariant::Def1 { m: m()?, r: need(args.r, "r", tag)? })
        }
        "eq-GRzdef2" => gr(&field(args.q, 4)?, GrVariant::Def2),
        "eq-GRzdefq23" => gr(&field(args.q, 4)?, GrVariant::Q23 { m: m()?, blocks: args.blocks.clone() }),
        "eq-GRzdefq23mr" => {
            gr(&field(args.q, 4)?, GrVariant::Q23mr { d: need(args.d, "d", tag)?, blocks: args.blocks.clone() })
        }
        "eq-GRzdefcase221" => gr(&field(args.q, 4)?, GrVariant::Case221),
        "eq-GRzdefcase222" => gr(&field(args.q, 4)?, GrVariant::Case222 { m: m()?, j1: need(args.j1, "j1", tag)? }),
        "gl23-in-gl29" => {
            let g = gl23_in_gl29(args.phi)?;
            let f = g.ambient.field.clone();
            Ok(Dump::new(&f).group(&g))
        }
        "lemma-rtdiagfield-2-xy" => {
            let (f, w, x, y) = gl29_xy()?;
            Ok(Dump::new(&f).note("omega", w).mat("x", x).mat("y", y))
        }
        "lemma-rtdiagfield-3" => {
            let (f, t, x, c) = gl32_matrices()?;
            Ok(Dump::new(&f).mat("t", t).mat("x", x).mat("c", c))
        }
        "quaternion-normalizer" => {
            let f = field(args.q, 5)?;
            Ok(Dump::new(&f).group(&quaternion_normalizer(&f)?))
        }
        other => Err(CliError::Usage(format!("unknown construction tag {other:?}"))),
    }
}
