//! Command-line front end: validation, integrals and invariants of Hopf
//! algebras, module-category queries, Frobenius algebra checks, Morita
//! context construction and Hopf reconstruction, skeletal-data handling,
//! and state-sum evaluation, with machine-readable reports.

use clap::{Args, Parser, Subcommand, ValueEnum};
use morita_ssum::bicolored::ContextSkeletal;
use morita_ssum::fixtures;
use morita_ssum::frobenius::{regular_from_hopf, FrobeniusData};
use morita_ssum::hopf::{Side, StructuredBialgebra};
use morita_ssum::mat::Mat;
use morita_ssum::morita::build_context;
use morita_ssum::repcat::{Representation, SimpleTable};
use morita_ssum::report::{Check, Checks};
use morita_ssum::scalar::{Rat, Scalar, ScalarJson, Tol, C64};
use morita_ssum::skeletal::extract_from_words;
use morita_ssum::statesum::{flat_bundle_oracle, state_sum, EvalOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "morita-ssum", version, about = "Workbench for finite semisimple spherical tensor categories")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Scalar backend
    #[arg(long, global = true, value_enum, default_value = "exact")]
    scalar: Backend,
    /// Comparison tolerance for the complex backend
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Worker threads for the state-sum evaluator
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Report format
    #[arg(long, global = true, value_enum, default_value = "json")]
    report: ReportFormat,
    /// Single-threaded, bit-stable evaluation
    #[arg(long, global = true, default_value_t = false)]
    deterministic: bool,
    /// Write the report (or the produced object) to a file
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Backend {
    Exact,
    Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Hopf-algebra structure checks and invariants
    Hopf {
        #[command(subcommand)]
        op: HopfOp,
    },
    /// Queries on the module category of a Hopf algebra
    Category {
        #[command(subcommand)]
        op: CategoryOp,
    },
    /// Frobenius algebras inside a module category
    Frobenius {
        #[command(subcommand)]
        op: FrobeniusOp,
    },
    /// Morita contexts and Hopf reconstruction
    Morita {
        #[command(subcommand)]
        op: MoritaOp,
    },
    /// Skeletal category data
    Skeletal {
        #[command(subcommand)]
        op: SkeletalOp,
    },
    /// State-sum invariant of a closed oriented 3-manifold
    Invariant {
        /// Skeletal data file/name, or a context summary produced by `morita build`
        data: String,
        /// Triangulation file or bundled name
        triangulation: String,
        /// Evaluate the two-color sum over a Morita context
        #[arg(long, default_value_t = false)]
        bicolored: bool,
        /// Vertex colors as a string over {A, B}
        #[arg(long)]
        labels: Option<String>,
    },
    /// Independent enumeration oracles
    Oracle {
        #[command(subcommand)]
        op: OracleOp,
    },
}

#[derive(Subcommand)]
enum HopfOp {
    /// Verify all structure axioms
    Validate { file: String },
    /// Solve for the one-sided integrals
    Integrals {
        file: String,
        #[arg(long, value_enum, default_value = "left")]
        side: CliSide,
    },
    /// The normalized integral ratio; equals the dimension when nonzero
    Invariant { file: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum CliSide {
    Left,
    Right,
}

#[derive(Subcommand)]
enum CategoryOp {
    /// List the simple modules
    Irreps { file: String },
    /// Quantum dimensions and the global dimension
    Dims { file: String },
}

#[derive(Subcommand)]
enum FrobeniusOp {
    /// Verify the axioms of a stored Frobenius algebra
    Check { file: String },
    /// Build and classify the regular Frobenius algebra of a Hopf algebra
    Regular { file: String },
}

#[derive(Subcommand)]
enum MoritaOp {
    /// Build the two-object context of the regular algebra and verify it
    Build {
        file: String,
        /// Which Frobenius algebra to use (only `regular` is bundled)
        #[arg(default_value = "regular")]
        algebra: String,
    },
    /// Reconstruct the dual Hopf-algebra pair from a depth-two context
    Reconstruct {
        file: String,
        #[arg(default_value = "regular")]
        algebra: String,
    },
}

#[derive(Subcommand)]
enum SkeletalOp {
    /// Verify fusion-rule and associator invariants
    Validate { file: String },
    /// Extract skeletal data from the module category of a Hopf algebra
    Extract { file: String },
}

#[derive(Subcommand)]
enum OracleOp {
    /// |Hom(pi1, G)| / |G| by exhaustive enumeration
    FlatBundles { pi1: String, group: String },
}

#[derive(Serialize)]
struct Report {
    config: ConfigOut,
    checks: Vec<Check>,
    values: serde_json::Map<String, Value>,
}

#[derive(Serialize, Clone)]
struct ConfigOut {
    scalar: String,
    tol: f64,
    threads: usize,
    report: String,
    deterministic: bool,
}

/// Summary written by `morita build`; enough to rebuild the context.
#[derive(Serialize, Deserialize)]
struct ContextFile {
    source: ContextSource,
    summary: Value,
}

#[derive(Serialize, Deserialize)]
struct ContextSource {
    hopf: String,
    algebra: String,
}

struct Outcome {
    checks: Checks,
    values: serde_json::Map<String, Value>,
    /// object payload written to --out instead of the report
    artifact: Option<Value>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = Tol::new(cli.config.tol);
    if cli.config.threads > 0 || cli.config.deterministic {
        let n = if cli.config.deterministic { 1 } else { cli.config.threads.max(1) };
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
    }
    let result = match cli.config.scalar {
        Backend::Exact => run::<Rat>(&cli.command, &cli.config, tol),
        Backend::Complex => run::<C64>(&cli.command, &cli.config, tol),
    };
    match result {
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(outcome) => {
            let config = ConfigOut {
                scalar: match cli.config.scalar {
                    Backend::Exact => "exact".into(),
                    Backend::Complex => "complex".into(),
                },
                tol: cli.config.tol,
                threads: if cli.config.deterministic { 1 } else { cli.config.threads },
                report: match cli.config.report {
                    ReportFormat::Json => "json".into(),
                    ReportFormat::Text => "text".into(),
                },
                deterministic: cli.config.deterministic,
            };
            let pass = outcome.checks.all_pass();
            let report = Report { config, checks: outcome.checks.list.clone(), values: outcome.values };
            let rendered = match cli.config.report {
                ReportFormat::Json => serde_json::to_string_pretty(&report).unwrap(),
                ReportFormat::Text => render_text(&report),
            };
            match (&cli.config.out, &outcome.artifact) {
                (Some(path), Some(artifact)) => {
                    if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(artifact).unwrap()) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                    println!("{rendered}");
                }
                (Some(path), None) => {
                    if let Err(e) = std::fs::write(path, &rendered) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(2);
                    }
                }
                (None, _) => println!("{rendered}"),
            }
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn render_text(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "backend={} tol={} threads={} deterministic={}\n",
        report.config.scalar, report.config.tol, report.config.threads, report.config.deterministic
    ));
    for (k, v) in &report.values {
        out.push_str(&format!("{k} = {v}\n"));
    }
    for c in &report.checks {
        out.push_str(&format!(
            "[{}] {} residual={:.3e}\n",
            if c.pass { "pass" } else { "FAIL" },
            c.name,
            c.residual
        ));
    }
    out
}

fn scalar_value<S: Scalar>(s: &S) -> Value {
    serde_json::to_value(s.to_json()).unwrap()
}

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(20260810)
}

fn run<S: Scalar>(cmd: &Command, config: &ConfigArgs, tol: Tol) -> Result<Outcome, String> {
    let mut values = serde_json::Map::new();
    let mut checks = Checks::new::<S>(tol);
    let mut artifact = None;
    match cmd {
        Command::Hopf { op } => match op {
            HopfOp::Validate { file } => {
                let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                checks = h.validate(tol);
                values.insert("name".into(), json!(h.name));
                values.insert("dimension".into(), json!(h.n));
            }
            HopfOp::Integrals { file, side } => {
                let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                let side = match side {
                    CliSide::Left => Side::Left,
                    CliSide::Right => Side::Right,
                };
                let pair = h.find_integrals(side).map_err(|e| e.to_string())?;
                let (ss, css) = h.semisimplicity_test(&pair, &tol);
                checks.add_bool("semisimple", ss);
                checks.add_bool("cosemisimple", css);
                values.insert(
                    "lambda".into(),
                    Value::Array(pair.lambda.vec().iter().map(scalar_value).collect()),
                );
                values.insert(
                    "phi".into(),
                    Value::Array(pair.phi.vec().iter().map(scalar_value).collect()),
                );
            }
            HopfOp::Invariant { file } => {
                let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                let pair = h.find_integrals(Side::Left).map_err(|e| e.to_string())?;
                let v = h.dimension_invariant(&pair).map_err(|e| e.to_string())?;
                let residual = v.sub(&S::from_i64(h.n as i64)).abs();
                checks.add("matches_dimension", residual);
                values.insert("invariant".into(), scalar_value(&v));
            }
        },
        Command::Category { op } => {
            let file = match op {
                CategoryOp::Irreps { file } | CategoryOp::Dims { file } => file,
            };
            let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
            let table = SimpleTable::irreps(&h, tol, &mut rng()).map_err(|e| e.to_string())?;
            let dims: Vec<usize> = table.simples.iter().map(|s| s.dim).collect();
            values.insert("simple_dimensions".into(), json!(dims));
            match op {
                CategoryOp::Irreps { .. } => {
                    values.insert("count".into(), json!(table.len()));
                }
                CategoryOp::Dims { .. } => {
                    let g = table.global_dimension();
                    let residual = g.sub(&S::from_i64(h.n as i64)).abs();
                    checks.add("global_dimension_matches", residual);
                    values.insert("global_dimension".into(), scalar_value(&g));
                }
            }
        }
        Command::Frobenius { op } => match op {
            FrobeniusOp::Check { file } => {
                let (h, f) = load_frobenius::<S>(file)?;
                checks.add("intertwiners", f.intertwiner_residual(&h));
                checks.extend(f.check_axioms(tol).map_err(|e| e.to_string())?);
                let c = f.classify_in(&h, &tol);
                values.insert("canonical".into(), json!(c.canonical));
                values.insert("normalized".into(), json!(c.normalized));
                values.insert("irreducible".into(), json!(c.irreducible));
                values.insert("lambda1".into(), scalar_value(&c.lambda1));
                values.insert("lambda2".into(), scalar_value(&c.lambda2));
                values.insert("product".into(), scalar_value(&c.product));
            }
            FrobeniusOp::Regular { file } => {
                let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                let pair = h.find_integrals(Side::Left).map_err(|e| e.to_string())?;
                let (f, agreement) = regular_from_hopf(&h, &pair).map_err(|e| e.to_string())?;
                checks.add("multiplication_routes_agree", agreement);
                checks.add("intertwiners", f.intertwiner_residual(&h));
                checks.extend(f.check_axioms(tol).map_err(|e| e.to_string())?);
                let c = f.classify_in(&h, &tol);
                values.insert("lambda1".into(), scalar_value(&c.lambda1));
                values.insert("lambda2".into(), scalar_value(&c.lambda2));
                values.insert("product".into(), scalar_value(&c.product));
                values.insert("irreducible".into(), json!(c.irreducible));
                artifact = Some(frobenius_to_json(file, &f));
            }
        },
        Command::Morita { op } => match op {
            MoritaOp::Build { file, algebra } => {
                let ctx = build_ctx::<S>(file, algebra, tol)?;
                checks.extend(ctx.checks.clone());
                checks.add_bool("depth_two", ctx.depth_two);
                checks.add_bool("irreducible", ctx.irreducible);
                let summary = serde_json::to_value(ctx.summary()).unwrap();
                values.insert("summary".into(), summary.clone());
                artifact = Some(
                    serde_json::to_value(ContextFile {
                        source: ContextSource { hopf: file.clone(), algebra: algebra.clone() },
                        summary,
                    })
                    .unwrap(),
                );
            }
            MoritaOp::Reconstruct { file, algebra } => {
                let ctx = build_ctx::<S>(file, algebra, tol)?;
                let href = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                let rec = ctx.reconstruct(Some(&href), &mut rng()).map_err(|e| e.to_string())?;
                checks.extend(rec.checks.clone());
                values.insert("dim_a".into(), json!(rec.a_hopf.n));
                values.insert("dim_b".into(), json!(rec.b_hopf.n));
                if let Some(m) = rec.matched {
                    checks.add_bool("structure_constants_match", m);
                }
                artifact = Some(serde_json::to_value(rec.a_hopf.to_json()).unwrap());
            }
        },
        Command::Skeletal { op } => match op {
            SkeletalOp::Validate { file } => {
                let d = fixtures::resolve_skeletal::<S>(file).map_err(|e| e.to_string())?;
                checks = d.validate(tol);
                values.insert("labels".into(), json!(d.names));
                values.insert("dsq".into(), scalar_value(&d.dsq()));
            }
            SkeletalOp::Extract { file } => {
                let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
                let table = SimpleTable::irreps(&h, tol, &mut rng()).map_err(|e| e.to_string())?;
                let ctx = morita_ssum::repcat::WordCtx::new(table);
                let d = extract_from_words(&ctx).map_err(|e| e.to_string())?;
                checks = d.validate(tol);
                values.insert("labels".into(), json!(d.names));
                values.insert("dsq".into(), scalar_value(&d.dsq()));
                artifact = Some(serde_json::to_value(d.to_json()).unwrap());
            }
        },
        Command::Invariant { data, triangulation, bicolored, labels } => {
            let tri = fixtures::resolve_triangulation(triangulation).map_err(|e| e.to_string())?;
            let opts = EvalOptions { parallel: !config.deterministic, ..Default::default() };
            if *bicolored {
                let text = std::fs::read_to_string(data)
                    .map_err(|e| format!("cannot read context file {data}: {e}"))?;
                let ctx_file: ContextFile =
                    serde_json::from_str(&text).map_err(|e| format!("bad context file: {e}"))?;
                if S::EXACT {
                    return Err("the two-color sum needs the complex backend (--scalar complex)".into());
                }
                let ctx = build_ctx::<S>(&ctx_file.source.hopf, &ctx_file.source.algebra, tol)?;
                let skel = ContextSkeletal::extract(&ctx, &mut rng()).map_err(|e| e.to_string())?;
                let colors = parse_labels(labels.as_deref(), tri.n_vertices)?;
                let v = state_sum(&tri, &skel, &colors, &opts).map_err(|e| e.to_string())?;
                values.insert("invariant".into(), scalar_value(&v));
                // cross-check against the uniform coloring
                let base = state_sum(&tri, &skel, &vec![0; tri.n_vertices], &opts)
                    .map_err(|e| e.to_string())?;
                checks.add("labeling_independence", v.sub(&base).abs());
            } else {
                let d = fixtures::resolve_skeletal::<S>(data).map_err(|e| e.to_string())?;
                let vchecks = d.validate(tol);
                if !vchecks.all_pass() {
                    checks.extend(vchecks);
                }
                let v = state_sum(&tri, &d, &vec![0; tri.n_vertices], &opts)
                    .map_err(|e| e.to_string())?;
                values.insert("invariant".into(), scalar_value(&v));
                println!("{}", v);
            }
        }
        Command::Oracle { op } => match op {
            OracleOp::FlatBundles { pi1, group } => {
                let g = morita_ssum::groups::GroupTable::by_name(group).map_err(|e| e.to_string())?;
                let v = flat_bundle_oracle::<S>(pi1, &g).map_err(|e| e.to_string())?;
                values.insert("value".into(), scalar_value(&v));
                println!("{}", v);
            }
        },
    }
    Ok(Outcome { checks, values, artifact })
}

fn parse_labels(labels: Option<&str>, n: usize) -> Result<Vec<usize>, String> {
    match labels {
        None => Ok(vec![0; n]),
        Some(s) => {
            let out: Result<Vec<usize>, String> = s
                .chars()
                .map(|c| match c.to_ascii_uppercase() {
                    'A' => Ok(0),
                    'B' => Ok(1),
                    other => Err(format!("bad label character `{other}`")),
                })
                .collect();
            let out = out?;
            if out.len() != n {
                return Err(format!("expected {n} labels, got {}", out.len()));
            }
            Ok(out)
        }
    }
}

fn build_ctx<S: Scalar>(
    file: &str,
    algebra: &str,
    tol: Tol,
) -> Result<morita_ssum::morita::MoritaContext<S>, String> {
    if algebra != "regular" {
        return Err(format!("unknown algebra `{algebra}`; only `regular` is bundled"));
    }
    let h = fixtures::resolve_hopf::<S>(file).map_err(|e| e.to_string())?;
    let table = SimpleTable::irreps(&h, tol, &mut rng()).map_err(|e| e.to_string())?;
    let pair = h.find_integrals(Side::Left).map_err(|e| e.to_string())?;
    let (frob, _) = regular_from_hopf(&h, &pair).map_err(|e| e.to_string())?;
    build_context(table, frob, tol, &mut rng()).map_err(|e| e.to_string())
}

// --- Frobenius algebra files ------------------------------------------------

#[derive(Serialize, Deserialize)]
struct FrobeniusJson {
    category_ref: String,
    q: QJson,
    v: Vec<ScalarJson>,
    vprime: Vec<ScalarJson>,
    w: Vec<Vec<ScalarJson>>,
    wprime: Vec<Vec<ScalarJson>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum QJson {
    Named(String),
    Explicit { dim: usize, action: Vec<Vec<Vec<ScalarJson>>> },
}

fn frobenius_to_json<S: Scalar>(category_ref: &str, f: &FrobeniusData<S>) -> Value {
    let row = |m: &Mat<S>, i: usize| -> Vec<ScalarJson> {
        (0..m.cols).map(|j| m.at(i, j).to_json()).collect()
    };
    let dense = |m: &Mat<S>| -> Vec<Vec<ScalarJson>> { (0..m.rows).map(|i| row(m, i)).collect() };
    serde_json::to_value(FrobeniusJson {
        category_ref: category_ref.to_string(),
        q: QJson::Named("regular".into()),
        v: f.v.vec().iter().map(|s| s.to_json()).collect(),
        vprime: f.vprime.vec().iter().map(|s| s.to_json()).collect(),
        w: dense(&f.w),
        wprime: dense(&f.wprime),
    })
    .unwrap()
}

fn load_frobenius<S: Scalar>(file: &str) -> Result<(StructuredBialgebra<S>, FrobeniusData<S>), String> {
    let text = std::fs::read_to_string(file).map_err(|e| format!("cannot read {file}: {e}"))?;
    let j: FrobeniusJson = serde_json::from_str(&text).map_err(|e| format!("bad file: {e}"))?;
    let h = fixtures::resolve_hopf::<S>(&j.category_ref).map_err(|e| e.to_string())?;
    let q = match &j.q {
        QJson::Named(name) if name == "regular" => Representation::regular(&h),
        QJson::Named(other) => return Err(format!("unknown object `{other}`")),
        QJson::Explicit { dim, action } => {
            let mats: Result<Vec<Mat<S>>, String> = action
                .iter()
                .map(|m| {
                    let mut out: Mat<S> = Mat::zero(*dim, *dim);
                    for (i, r) in m.iter().enumerate() {
                        for (k, v) in r.iter().enumerate() {
                            out.set(i, k, S::from_json(v).map_err(|e| e.to_string())?);
                        }
                    }
                    Ok(out)
                })
                .collect();
            Representation { dim: *dim, action: mats? }
        }
    };
    let parse_vec = |v: &[ScalarJson], rows: usize, cols: usize| -> Result<Mat<S>, String> {
        if v.len() != rows * cols {
            return Err("vector length mismatch".into());
        }
        let mut m: Mat<S> = Mat::zero(rows, cols);
        for (i, x) in v.iter().enumerate() {
            m.set(i / cols, i % cols, S::from_json(x).map_err(|e| e.to_string())?);
        }
        Ok(m)
    };
    let parse_dense = |rows: &[Vec<ScalarJson>]| -> Result<Mat<S>, String> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m: Mat<S> = Mat::zero(r, c);
        for (i, rr) in rows.iter().enumerate() {
            for (j, x) in rr.iter().enumerate() {
                m.set(i, j, S::from_json(x).map_err(|e| e.to_string())?);
            }
        }
        Ok(m)
    };
    let d = q.dim;
    let f = FrobeniusData {
        q,
        v: parse_vec(&j.v, d, 1)?,
        vprime: parse_vec(&j.vprime, 1, d)?,
        w: parse_dense(&j.w)?,
        wprime: parse_dense(&j.wprime)?,
    };
    Ok((h, f))
}
