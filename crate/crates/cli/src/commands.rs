use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;
use serde_json::{json, Map, Value};

use koszul_core::ainfinity::{
    check_module_stasheff, check_module_unitality, check_morphism, check_morphism_unitality, check_stasheff,
    check_strict_unitality, CheckReport, DgaAsAInfinity, TableAInfinity,
};
use koszul_core::hom::{check_duality, dual_complex, DgAlgebra};
use koszul_core::iwasawa::{
    betti_numbers, compare_with_symmetric, sample_filtration_laws, BettiRoute, FilteredIwasawaTruncation,
    PValuedGroupSpec, Valuation,
};
use koszul_core::json::{self as kj, document, report_to_json};
use koszul_core::model::{ext_algebra, minimal_model, ModelInput};
use koszul_core::Prime;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] koszul_core::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: invalid JSON at line {line}, column {column}: {message}")]
    Json { path: String, line: usize, column: usize, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// What a command produced: the artifact text, the verdict, and a few
/// human-readable lines for standard error.
pub struct Outcome {
    pub artifact: String,
    pub passed: bool,
    pub summary: Vec<String>,
}

/// The exact configuration of a run, recorded in every artifact.
#[derive(Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<BettiRoute>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checker: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgebraKind {
    /// Symmetric algebra S(V), dim V = d, through its Koszul resolution.
    Sv,
    /// F_p[x]/(x^n), through the normalized bar resolution.
    Xn,
    /// F_p[X_1..X_d]/(X)^n, through the normalized bar resolution.
    Truncated,
}

impl AlgebraKind {
    fn name(self) -> &'static str {
        match self {
            AlgebraKind::Sv => "sv",
            AlgebraKind::Xn => "xn",
            AlgebraKind::Truncated => "truncated",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Bar,
    Koszul,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Checker {
    All,
    Stasheff,
    Unitality,
    Morphism,
    Module,
}

impl Checker {
    fn name(self) -> &'static str {
        match self {
            Checker::All => "all",
            Checker::Stasheff => "stasheff",
            Checker::Unitality => "unitality",
            Checker::Morphism => "morphism",
            Checker::Module => "module",
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write the artifact here instead of standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Seed for randomized sampling; recorded in the artifact.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct MinimalModelArgs {
    #[arg(long, value_enum)]
    pub algebra: AlgebraKind,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
    /// Highest arity of the transferred operations.
    #[arg(long, default_value_t = 4)]
    pub nmax: usize,
    /// Length of the bar resolution (xn, truncated).
    #[arg(long, default_value_t = 4)]
    pub length: usize,
    /// Total-degree cap of the polynomial ring (sv); defaults to d + 1.
    #[arg(long)]
    pub cap: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct BettiArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub p: u32,
    /// Highest cohomological degree; defaults to d.
    #[arg(long)]
    pub imax: Option<usize>,
    #[arg(long, value_enum, default_value = "both")]
    pub resolution: Route,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ExtArgs {
    #[arg(long, value_enum)]
    pub algebra: AlgebraKind,
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 2)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
    /// Highest cohomological degree; defaults to d for sv and 2 otherwise.
    #[arg(long)]
    pub imax: Option<usize>,
    /// Length of the bar resolution; defaults to imax + 2.
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub cap: Option<u32>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GrArgs {
    /// Rank of the group; may be omitted when --weights is given.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub p: u32,
    /// Truncation: the algebra is F_p[b_1..b_d]/(b)^N.
    #[arg(long = "truncation", short = 'N', default_value_t = 4)]
    pub truncation: u32,
    /// Comma-separated valuations of the basis, such as "1,3/2"; all 1 by default.
    #[arg(long)]
    pub weights: Option<String>,
    /// Number of sampled elements and pairs for the filtration laws.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// A JSON document of kind ainfinity, minimal-model, morphism or module.
    pub input: PathBuf,
    /// Highest arity to check; defaults to the n_max recorded in the input.
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long, value_enum, default_value = "all")]
    pub checker: Checker,
    /// Write the parsed structure back out to this path.
    #[arg(long)]
    pub reserialize: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct DualizeArgs {
    /// A JSON document of kind complex.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

fn odd_prime(p: u32) -> Result<Prime, CliError> {
    Prime::odd(p).map_err(|_| CliError::Usage(format!("p must be an odd prime (got {p})")))
}

fn positive_d(d: usize) -> Result<usize, CliError> {
    if d == 0 {
        return Err(CliError::Usage("d must be at least 1".into()));
    }
    Ok(d)
}

fn model_input(kind: AlgebraKind, d: usize, n: u32, length: usize, cap: Option<u32>) -> Result<ModelInput, CliError> {
    if kind != AlgebraKind::Sv {
        if n < 2 {
            return Err(CliError::Usage("n must be at least 2".into()));
        }
        if length < 3 {
            return Err(CliError::Usage("length must be at least 3".into()));
        }
    }
    Ok(match kind {
        AlgebraKind::Sv => ModelInput::Koszul { d: positive_d(d)?, cap: cap.unwrap_or(d as u32 + 1) },
        AlgebraKind::Xn => ModelInput::PowerOfVariable { n, length },
        AlgebraKind::Truncated => ModelInput::TruncatedPolynomial { d: positive_d(d)?, n, length },
    })
}

fn finish(mut doc: Map<String, Value>, config: &RunConfig, passed: bool) -> String {
    doc.insert("config".into(), serde_json::to_value(config).expect("config serializes"));
    doc.insert("passed".into(), json!(passed));
    kj::to_string(&Value::Object(doc))
}

fn verdict(name: &str, r: &CheckReport) -> String {
    let head = format!("{name}: {} ({} tensors)", if r.passed { "PASS" } else { "FAIL" }, r.tensors_checked);
    match r.violations.first() {
        Some(v) => format!("{head}, {} violations, first at arity {} on {:?}", r.violation_count, v.arity, v.inputs),
        None => head,
    }
}

fn read_json(path: &Path) -> Result<Value, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn nonzero_constants(maps: &std::collections::BTreeMap<usize, koszul_core::ainfinity::OperationTable>, prefix: &str, from: usize, to: usize) -> Value {
    let counts: Map<String, Value> = (from..=to)
        .map(|n| (format!("{prefix}{n}"), json!(maps.get(&n).map_or(0, |t| t.values().map(|v| v.iter().count()).sum::<usize>()))))
        .collect();
    Value::Object(counts)
}

pub fn run_minimal_model(args: &MinimalModelArgs) -> Result<Outcome, CliError> {
    let p = odd_prime(args.p)?;
    if args.nmax < 2 {
        return Err(CliError::Usage("nmax must be at least 2".into()));
    }
    let input = model_input(args.algebra, args.d, args.n, args.length, args.cap)?;
    let sv = args.algebra == AlgebraKind::Sv;
    let config = RunConfig {
        command: "minimal-model",
        algebra: Some(args.algebra.name()),
        p: Some(args.p),
        d: (args.algebra != AlgebraKind::Xn).then_some(args.d),
        n: (!sv).then_some(args.n),
        n_max: Some(args.nmax),
        length: (!sv).then_some(args.length),
        cap: match input {
            ModelInput::Koszul { cap, .. } => Some(cap),
            _ => None,
        },
        seed: args.common.seed,
        ..Default::default()
    };
    let model = minimal_model(p, input, args.nmax)?;
    let h = &model.transfer.minimal;
    let stasheff = check_stasheff(h, args.nmax);
    let morphism = check_morphism(h, &DgaAsAInfinity(&model.end), &model.transfer.morphism, args.nmax);
    let unitality = check_strict_unitality(h, args.nmax);
    let passed = stasheff.passed && morphism.passed && unitality.passed;

    let mut doc = document("minimal-model");
    doc.insert("ainfinity".into(), kj::ainfinity_to_json(h));
    doc.insert("certified_window".into(), json!([0, model.certified_through]));
    doc.insert("ext_dims".into(), json!(h.space.dims()));
    doc.insert("end_dims".into(), json!(model.end.space().dims()));
    doc.insert("higher_operations".into(), nonzero_constants(&h.maps, "m", 3, args.nmax));
    doc.insert("morphism_components".into(), nonzero_constants(&model.transfer.morphism.maps, "f", 1, args.nmax));
    doc.insert(
        "checks".into(),
        json!({
            "stasheff": report_to_json(&stasheff),
            "morphism": report_to_json(&morphism),
            "unitality": report_to_json(&unitality),
        }),
    );
    let higher: Vec<String> = (3..=args.nmax).map(|n| format!("m{n}: {}", h.nonzero_count(n))).collect();
    let summary = vec![
        format!("Ext dims {:?}, certified through degree {}", h.space.dims(), model.certified_through),
        format!("nonzero higher operations: {}", higher.join(", ")),
        verdict("stasheff", &stasheff),
        verdict("morphism", &morphism),
        verdict("unitality", &unitality),
    ];
    Ok(Outcome { artifact: finish(doc, &config, passed), passed, summary })
}

pub fn run_betti(args: &BettiArgs) -> Result<Outcome, CliError> {
    let p = odd_prime(args.p)?;
    let d = positive_d(args.d)?;
    let i_max = args.imax.unwrap_or(d);
    let route = match args.resolution {
        Route::Bar => BettiRoute::Bar,
        Route::Koszul => BettiRoute::Koszul,
        Route::Both => BettiRoute::Both,
    };
    let config = RunConfig {
        command: "betti",
        p: Some(args.p),
        d: Some(d),
        i_max: Some(i_max),
        resolution: Some(route),
        seed: args.common.seed,
        ..Default::default()
    };
    let table = betti_numbers(d, p, i_max, route)?;
    let passed = table.matches_binomials() && table.agreement() != Some(false);
    let cell = |v: &Option<Vec<usize>>, i: usize| v.as_ref().map(|v| v[i]);
    let summary = vec![
        format!("expected {:?}", table.expected),
        format!("bar {:?}", table.bar),
        format!("koszul {:?}", table.koszul),
        format!(
            "certified through degree {}; agreement {}; matches binomials {}",
            table.certified_through,
            table.agreement().map_or("n/a".to_string(), |a| a.to_string()),
            table.matches_binomials()
        ),
    ];
    let artifact = match args.format {
        Format::Json => {
            let rows: Vec<Value> = (0..=i_max)
                .map(|i| {
                    json!({
                        "i": i,
                        "binomial": table.expected[i],
                        "bar": cell(&table.bar, i),
                        "koszul": cell(&table.koszul, i),
                        "certified": i <= table.certified_through,
                    })
                })
                .collect();
            let mut doc = document("betti");
            doc.insert("rows".into(), Value::Array(rows));
            doc.insert("certified_through".into(), json!(table.certified_through));
            doc.insert("bar_truncation".into(), json!(table.truncation));
            doc.insert("agreement".into(), json!(table.agreement()));
            doc.insert("matches_binomials".into(), json!(table.matches_binomials()));
            finish(doc, &config, passed)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["i", "binomial", "bar", "koszul", "certified"])?;
            let text = |x: Option<usize>| x.map_or(String::new(), |x| x.to_string());
            for i in 0..=i_max {
                w.write_record([
                    i.to_string(),
                    table.expected[i].to_string(),
                    text(cell(&table.bar, i)),
                    text(cell(&table.koszul, i)),
                    if i <= table.certified_through { "certified" } else { "uncertified" }.to_string(),
                ])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?).expect("csv output is utf-8")
        }
    };
    Ok(Outcome { artifact, passed, summary })
}

pub fn run_ext(args: &ExtArgs) -> Result<Outcome, CliError> {
    let p = odd_prime(args.p)?;
    let sv = args.algebra == AlgebraKind::Sv;
    let i_max = args.imax.unwrap_or(if sv { args.d } else { 2 });
    let length = args.length.unwrap_or(i_max + 2);
    let input = model_input(args.algebra, args.d, args.n, length, args.cap)?;
    let config = RunConfig {
        command: "ext",
        algebra: Some(args.algebra.name()),
        p: Some(args.p),
        d: (args.algebra != AlgebraKind::Xn).then_some(args.d),
        n: (!sv).then_some(args.n),
        length: (!sv).then_some(length),
        cap: match input {
            ModelInput::Koszul { cap, .. } => Some(cap),
            _ => None,
        },
        i_max: Some(i_max),
        seed: args.common.seed,
        ..Default::default()
    };
    let ext = ext_algebra(p, input, i_max)?;
    let failures = ext.anticommutation_failures();
    let not_generated = ext.degrees_not_generated();
    // the exterior-algebra claims only apply to S(V)
    let passed = !sv || (failures.is_empty() && not_generated.is_empty());
    let products: Vec<Value> = ext
        .products
        .iter()
        .flat_map(|(a, b, out)| {
            out.iter().map(move |&(k, c)| json!({"in": [[a.0, a.1], [b.0, b.1]], "out": [a.0 + b.0, k], "c": c}))
        })
        .collect();
    let mut doc = document("ext");
    doc.insert("dims".into(), json!(ext.dims));
    doc.insert("internal_degrees".into(), json!(ext.internal));
    doc.insert("products".into(), Value::Array(products));
    doc.insert("unit".into(), json!(ext.unit.map(|u| [u.0 as i64, u.1 as i64])));
    doc.insert("certified_window".into(), json!([0, ext.certified_through]));
    doc.insert("anticommutation_failures".into(), json!(failures));
    doc.insert("degrees_not_generated_in_degree_one".into(), json!(not_generated));
    let summary = vec![
        format!("Ext dims {:?} (certified through degree {})", ext.dims, ext.certified_through),
        format!("degree-one pairs failing anticommutation: {}", failures.len()),
        format!("degrees not generated by Ext^1: {not_generated:?}"),
    ];
    Ok(Outcome { artifact: finish(doc, &config, passed), passed, summary })
}

fn parse_weights(text: &str) -> Result<Vec<Valuation>, CliError> {
    text.split(',')
        .map(|w| {
            w.trim().parse::<Ratio<i64>>().map_err(|_| CliError::Usage(format!("bad weight {w:?}; expected an integer or a/b")))
        })
        .collect()
}

pub fn run_gr(args: &GrArgs) -> Result<Outcome, CliError> {
    let p = odd_prime(args.p)?;
    let weights = match (&args.weights, args.d) {
        (Some(w), d) => {
            let w = parse_weights(w)?;
            if d.is_some_and(|d| d != w.len()) {
                return Err(CliError::Usage(format!("--d {} disagrees with {} weights", d.unwrap_or(0), w.len())));
            }
            w
        }
        (None, Some(d)) => vec![Ratio::from_integer(1); positive_d(d)?],
        (None, None) => return Err(CliError::Usage("give --d or --weights".into())),
    };
    if args.truncation == 0 {
        return Err(CliError::Usage("the truncation N must be at least 1".into()));
    }
    let config = RunConfig {
        command: "gr",
        p: Some(args.p),
        d: Some(weights.len()),
        n: Some(args.truncation),
        weights: Some(weights.iter().map(ToString::to_string).collect()),
        samples: Some(args.samples),
        seed: args.common.seed,
        ..Default::default()
    };
    let spec = PValuedGroupSpec::new(p, weights)?;
    let t = FilteredIwasawaTruncation::new(spec, args.truncation)?;
    let gr = t.gr_algebra();
    let cmp = compare_with_symmetric(&gr);
    let laws = sample_filtration_laws(&t, args.samples, args.common.seed)?;
    let passed = cmp.passed() && laws.passed();

    let expected: std::collections::BTreeMap<&Valuation, usize> = cmp.dims.iter().map(|(v, _, want)| (v, *want)).collect();
    let pieces: Vec<Value> = gr
        .weights()
        .map(|v| {
            json!({
                "weight": v.to_string(),
                "dim": gr.dim(v),
                "certified": gr.is_certified(v),
                "symmetric_dim": expected.get(v),
            })
        })
        .collect();
    let coords = |g: &Vec<u128>| g.iter().map(ToString::to_string).collect::<Vec<_>>();
    let mut doc = document("gr");
    doc.insert("pieces".into(), Value::Array(pieces));
    doc.insert("certified_below".into(), json!(t.certified_below().to_string()));
    doc.insert(
        "comparison".into(),
        json!({
            "dims_match": cmp.dims_match,
            "structure_match": cmp.structure_match,
            "pairs_checked": cmp.pairs_checked,
            "first_mismatch": cmp.first_mismatch,
        }),
    );
    doc.insert(
        "laws".into(),
        json!({
            "seed": laws.seed,
            "power_samples": laws.power_samples,
            "power_failures": laws.power_failures.iter().map(coords).collect::<Vec<_>>(),
            "product_samples": laws.product_samples,
            "product_failures": laws.product_failures,
        }),
    );
    let summary = vec![
        format!(
            "gr dims {}",
            gr.weights()
                .map(|v| format!("{v}:{}{}", gr.dim(v), if gr.is_certified(v) { "" } else { " (uncertified)" }))
                .collect::<Vec<_>>()
                .join(" ")
        ),
        format!(
            "comparison with S(g): dims {}, structure {} ({} pairs)",
            cmp.dims_match, cmp.structure_match, cmp.pairs_checked
        ),
        format!(
            "laws (seed {}): power {}/{} ok, products {}/{} ok",
            laws.seed,
            laws.power_samples - laws.power_failures.len(),
            laws.power_samples,
            laws.product_samples - laws.product_failures.len(),
            laws.product_samples
        ),
    ];
    Ok(Outcome { artifact: finish(doc, &config, passed), passed, summary })
}

fn want(checker: Checker, which: Checker) -> bool {
    checker == Checker::All || checker == which
}

pub fn run_check(args: &CheckArgs) -> Result<Outcome, CliError> {
    let doc = read_json(&args.input)?;
    kj::check_schema(&doc, "$")?;
    let kind = doc.get("kind").and_then(Value::as_str).unwrap_or("").to_string();
    let config = RunConfig {
        command: "check",
        n_max: args.nmax,
        checker: Some(args.checker.name()),
        input: Some(args.input.display().to_string()),
        seed: args.common.seed,
        ..Default::default()
    };
    let mut checks = Map::new();
    let mut summary = Vec::new();
    let mut record = |name: &str, r: CheckReport| {
        summary.push(verdict(name, &r));
        checks.insert(name.to_string(), report_to_json(&r));
    };
    let unsupported = |what: &str| CliError::Usage(format!("checker {} does not apply to a {what}", args.checker.name()));
    let (reserialized, n_max) = match kind.as_str() {
        "ainfinity" | "minimal-model" => {
            let body = if kind == "ainfinity" { &doc } else { doc.get("ainfinity").unwrap_or(&Value::Null) };
            let a: TableAInfinity = kj::ainfinity_from_json(body)?;
            let n = args.nmax.unwrap_or(a.n_max);
            if matches!(args.checker, Checker::Morphism | Checker::Module) {
                return Err(unsupported("single A∞-structure"));
            }
            if want(args.checker, Checker::Stasheff) {
                record("stasheff", check_stasheff(&a, n));
            }
            if want(args.checker, Checker::Unitality) && a.unit.is_some() {
                record("unitality", check_strict_unitality(&a, n));
            }
            (kj::ainfinity_to_json(&a), n)
        }
        "morphism" => {
            let (s, t, f) = kj::morphism_from_json(&doc)?;
            let n = args.nmax.unwrap_or(f.n_max);
            if args.checker == Checker::Module {
                return Err(unsupported("morphism"));
            }
            if want(args.checker, Checker::Stasheff) {
                record("source_stasheff", check_stasheff(&s, n));
                record("target_stasheff", check_stasheff(&t, n));
            }
            if want(args.checker, Checker::Morphism) {
                record("morphism", check_morphism(&s, &t, &f, n));
            }
            if want(args.checker, Checker::Unitality) && s.unit.is_some() && t.unit.is_some() {
                record("unitality", check_morphism_unitality(&s, &t, &f, n));
            }
            (kj::morphism_to_json(&s, &t, &f), n)
        }
        "module" => {
            let (a, m) = kj::module_from_json(&doc)?;
            let n = args.nmax.unwrap_or(m.n_max);
            if args.checker == Checker::Morphism {
                return Err(unsupported("module"));
            }
            if want(args.checker, Checker::Stasheff) {
                record("algebra_stasheff", check_stasheff(&a, n));
            }
            if want(args.checker, Checker::Module) {
                record("module", check_module_stasheff(&a, &m, n));
            }
            if want(args.checker, Checker::Unitality) && a.unit.is_some() {
                record("unitality", check_module_unitality(&a, &m, n));
            }
            (kj::module_to_json(&a, &m), n)
        }
        other => return Err(CliError::Usage(format!("$.kind: cannot check a document of kind {other:?}"))),
    };
    let passed = checks.values().all(|r| r["passed"] == json!(true));
    let text = kj::to_string(&reserialized);
    let mut out = document("check-report");
    out.insert("input_kind".into(), json!(kind));
    out.insert("n_max".into(), json!(n_max));
    out.insert("checks".into(), Value::Object(checks));
    if let Some(path) = &args.reserialize {
        let original = std::fs::read_to_string(&args.input).unwrap_or_default();
        let identical = kind != "minimal-model" && original == text;
        out.insert("reserialized_identical".into(), json!(identical));
        summary.push(format!("re-serialization identical to input: {identical}"));
        crate::output::write_atomic(path, text.as_bytes())
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    }
    Ok(Outcome { artifact: finish(out, &config, passed), passed, summary })
}

pub fn run_dualize(args: &DualizeArgs) -> Result<Outcome, CliError> {
    let doc = read_json(&args.input)?;
    let c = kj::complex_from_json(&doc)?;
    let config = RunConfig {
        command: "dualize",
        p: Some(c.prime().value()),
        input: Some(args.input.display().to_string()),
        seed: args.common.seed,
        ..Default::default()
    };
    let report = check_duality(&c)?;
    let passed = report.passed();
    let mut out = document("duality");
    out.insert("dual".into(), kj::complex_to_json(&dual_complex(&c)));
    out.insert(
        "report".into(),
        json!({
            "bijective": report.bijective,
            "commutes_with_d": report.commutes_with_d,
            "multiplicative": report.multiplicative,
            "unital": report.unital,
            "pairs_checked": report.pairs_checked,
        }),
    );
    let summary = vec![format!(
        "End(I)^op -> End(P): bijective {}, chain map {}, multiplicative {}, unital {} ({} pairs)",
        report.bijective, report.commutes_with_d, report.multiplicative, report.unital, report.pairs_checked
    )];
    Ok(Outcome { artifact: finish(out, &config, passed), passed, summary })
}
