use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use ghk_core::decompose::{decompose, verify_iso};
use ghk_core::doc::{ActionDoc, CategoryDoc, DocKind, SkeletonDoc};
use ghk_core::fincat::{load, transversal, verify_size_lemmas, FinCategory, SizeFunctor};
use ghk_core::fuzz::{run_campaign, write_corpus, CampaignParams};
use ghk_core::kgraph::validate_kgraph;
use ghk_core::laws::{
    check_atom_degree, check_cancellative, check_cancellative_both, check_equidivisible, check_levi_equivalence,
    check_r_condition, check_wfp, CancelSide, LawReport,
};
use ghk_core::product::build_product;
use ghk_core::zsaction::validate_action;
use ghk_core::Degree;

const EXIT_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_USAGE: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ghk",
    version,
    about = "Checks finite categories with size functors, k-graphs and Zappa-Szép actions"
)]
struct Cli {
    /// Write the full JSON report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a category, skeleton or action document.
    Validate { doc: PathBuf },
    /// Run one law checker.
    Check(CheckArgs),
    /// Product windows of an action.
    Product {
        #[command(subcommand)]
        command: ProductCommand,
    },
    /// Split a category into a k-graph, a groupoid and an action.
    Decompose {
        doc: PathBuf,
        /// Output directory for the linked documents.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Build a product window, decompose it, and compare.
    Roundtrip {
        doc: PathBuf,
        #[arg(long)]
        bound: String,
    },
    /// Generate and check random actions.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Subcommand)]
enum ProductCommand {
    Build {
        doc: PathBuf,
        #[arg(long)]
        bound: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LawArg {
    Wfp,
    Equidiv,
    CancelLeft,
    Cancel,
    RCond,
    Levi,
    Atoms,
    Lemmas,
}

#[derive(Debug, Args)]
struct CheckArgs {
    law: LawArg,
    doc: PathBuf,
    /// Degree window, as `n` or `n1,...,nk`; needed for skeleton and action
    /// documents.
    #[arg(long)]
    bound: Option<String>,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_objects: usize,
    #[arg(long, default_value_t = 4)]
    max_edges: usize,
    #[arg(long, default_value_t = 4)]
    max_group: u32,
    #[arg(long, default_value_t = 3)]
    path_bound: u32,
    #[arg(long, default_value_t = 2)]
    product_bound: u32,
}

#[derive(Debug, Serialize)]
struct InputRef {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunReport {
    command: String,
    inputs: Vec<InputRef>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<Vec<u32>>,
    status: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    results: Value,
}

/// An error that ends the run with a particular exit status.
struct Fatal {
    code: u8,
    err: anyhow::Error,
}

fn invalid(err: impl Into<anyhow::Error>) -> Fatal {
    Fatal { code: EXIT_INVALID, err: err.into() }
}

fn usage(err: impl Into<anyhow::Error>) -> Fatal {
    Fatal { code: EXIT_USAGE, err: err.into() }
}

struct Ctx {
    inputs: Vec<InputRef>,
    bound: Option<Vec<u32>>,
    summary: Vec<String>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<Value, Fatal> {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display())).map_err(invalid)?;
        self.inputs.push(InputRef { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display())).map_err(invalid)
    }

    fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }
}

fn parse_as<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T, Fatal> {
    serde_json::from_value(v).with_context(|| format!("not a valid {what} document")).map_err(invalid)
}

fn parse_bound(raw: &str, k: usize) -> Result<Degree, Fatal> {
    let parts: Vec<u32> = raw
        .split(',')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(anyhow!("bad bound `{raw}`: {e}")))?;
    match parts.len() {
        1 => Ok(Degree::from_vec(vec![parts[0]; k])),
        n if n == k => Ok(Degree::from_vec(parts)),
        n => Err(usage(anyhow!("bound `{raw}` has {n} components, rank is {k}"))),
    }
}

fn sniff(v: &Value) -> Result<DocKind, Fatal> {
    DocKind::sniff(v).ok_or_else(|| invalid(anyhow!("cannot tell the document kind")))
}

/// The category and size functor described by a document, building a window
/// first for skeleton and action documents.
fn category_of(ctx: &mut Ctx, doc: &Path, bound: Option<&str>) -> Result<(FinCategory, Option<SizeFunctor>), Fatal> {
    let v = ctx.read(doc)?;
    match sniff(&v)? {
        DocKind::Category => {
            let d: CategoryDoc = parse_as(v, "category")?;
            let out = load(&d).map_err(invalid)?;
            ctx.bound = out.0.bound().map(|b| b.as_slice().to_vec());
            Ok(out)
        }
        DocKind::Skeleton => {
            let d: SkeletonDoc = parse_as(v, "skeleton")?;
            let kg = validate_kgraph(&d).map_err(invalid)?;
            let raw = bound.ok_or_else(|| usage(anyhow!("--bound is required for a skeleton document")))?;
            let b = parse_bound(raw, kg.rank())?;
            ctx.bound = Some(b.as_slice().to_vec());
            let (cat, size) = kg.truncation(&b).map_err(invalid)?;
            Ok((cat, Some(size)))
        }
        DocKind::Action => {
            let d: ActionDoc = parse_as(v, "action")?;
            let a = validate_action(&d).map_err(invalid)?;
            let raw = bound.ok_or_else(|| usage(anyhow!("--bound is required for an action document")))?;
            let b = parse_bound(raw, a.kgraph().rank())?;
            ctx.bound = Some(b.as_slice().to_vec());
            let p = build_product(&a, &b).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
            Ok((p.category, Some(p.size)))
        }
    }
}

fn need_size(size: Option<SizeFunctor>) -> Result<SizeFunctor, Fatal> {
    size.ok_or_else(|| invalid(anyhow!("this check needs a `size` section")))
}

fn summarize(ctx: &mut Ctx, r: &LawReport) {
    let law = serde_json::to_string(&r.law).unwrap_or_default();
    let law = law.trim_matches('"');
    if r.holds {
        ctx.say(format!("{law}: holds"));
    } else {
        ctx.say(format!("{law}: fails with {} witness(es)", r.witnesses.len()));
        for w in r.witnesses.iter().take(5) {
            ctx.say(format!("  {}", serde_json::to_string(w).unwrap_or_default()));
        }
    }
}

fn cmd_validate(ctx: &mut Ctx, doc: &Path) -> Result<(bool, Value), Fatal> {
    let v = ctx.read(doc)?;
    let kind = sniff(&v)?;
    let results = match kind {
        DocKind::Category => {
            let d: CategoryDoc = parse_as(v, "category")?;
            let (cat, size) = load(&d).map_err(invalid)?;
            ctx.say(format!(
                "category: {} objects, {} arrows, {} invertible{}",
                cat.object_count(),
                cat.arrow_count(),
                cat.invertibles().len(),
                if size.is_some() { ", size functor valid" } else { "" }
            ));
            json!({"kind": "category", "objects": cat.object_count(), "arrows": cat.arrow_count(),
                   "invertibles": cat.invertibles().len(), "size_functor": size.map(|s| s.rank())})
        }
        DocKind::Skeleton => {
            let d: SkeletonDoc = parse_as(v, "skeleton")?;
            let kg = validate_kgraph(&d).map_err(invalid)?;
            ctx.say(format!("skeleton: rank {}, {} objects, {} edges", kg.rank(), kg.object_count(), kg.edge_count()));
            json!({"kind": "skeleton", "k": kg.rank(), "objects": kg.object_count(), "edges": kg.edge_count()})
        }
        DocKind::Action => {
            let d: ActionDoc = parse_as(v, "action")?;
            let a = validate_action(&d).map_err(invalid)?;
            ctx.say(format!(
                "action: rank {}, {} edges, groupoid of {} arrows",
                a.kgraph().rank(),
                a.kgraph().edge_count(),
                a.groupoid().arrow_count()
            ));
            json!({"kind": "action", "k": a.kgraph().rank(), "edges": a.kgraph().edge_count(),
                   "groupoid_arrows": a.groupoid().arrow_count()})
        }
    };
    Ok((true, results))
}

fn cmd_check(ctx: &mut Ctx, args: &CheckArgs) -> Result<(bool, Value), Fatal> {
    let (cat, size) = category_of(ctx, &args.doc, args.bound.as_deref())?;
    let report = match args.law {
        LawArg::Wfp => check_wfp(&cat, &need_size(size)?),
        LawArg::Equidiv => check_equidivisible(&cat),
        LawArg::CancelLeft => check_cancellative(&cat, CancelSide::Left),
        LawArg::Cancel => check_cancellative_both(&cat),
        LawArg::RCond => {
            let size = need_size(size)?;
            let xs = transversal(&cat, &size).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
            check_r_condition(&cat, &xs)
        }
        LawArg::Levi => check_levi_equivalence(&cat, &need_size(size)?).map_err(usage)?,
        LawArg::Atoms => check_atom_degree(&cat, &need_size(size)?),
        LawArg::Lemmas => {
            let failures = verify_size_lemmas(&cat, &need_size(size)?);
            if failures.is_empty() {
                ctx.say("lemmas: hold");
            } else {
                ctx.say(format!("lemmas: {} failure(s)", failures.len()));
            }
            return Ok((
                failures.is_empty(),
                json!({"law": "lemmas", "holds": failures.is_empty(), "failures": failures}),
            ));
        }
    };
    summarize(ctx, &report);
    Ok((report.holds, serde_json::to_value(&report).expect("report serializes")))
}

fn write_json(path: &Path, v: &impl Serialize) -> Result<(), Fatal> {
    let body = serde_json::to_string_pretty(v).expect("serializable") + "\n";
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display())).map_err(usage)
}

fn cmd_product_build(ctx: &mut Ctx, doc: &Path, bound: &str, out: &Path) -> Result<(bool, Value), Fatal> {
    let v = ctx.read(doc)?;
    let d: ActionDoc = parse_as(v, "action")?;
    let a = validate_action(&d).map_err(invalid)?;
    let b = parse_bound(bound, a.kgraph().rank())?;
    ctx.bound = Some(b.as_slice().to_vec());
    let p = build_product(&a, &b).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
    write_json(out, &p.doc)?;
    ctx.say(format!("product window {b}: {} arrows written to {}", p.len(), out.display()));
    Ok((true, json!({"arrows": p.len(), "composites": p.doc.compose.len()})))
}

fn cmd_decompose(ctx: &mut Ctx, doc: &Path, out: &Path) -> Result<(bool, Value), Fatal> {
    let v = ctx.read(doc)?;
    let d: CategoryDoc = parse_as(v, "category")?;
    let (cat, size) = load(&d).map_err(invalid)?;
    let size = need_size(size)?;
    ctx.bound = cat.bound().map(|b| b.as_slice().to_vec());
    let dec = match decompose(&cat, &size) {
        Ok(dec) => dec,
        Err(e) => {
            ctx.say(format!("decompose: {e}"));
            return Ok((false, json!({"error": e.to_string()})));
        }
    };
    let iso = verify_iso(&cat, &size, &dec).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display())).map_err(usage)?;
    write_json(&out.join("action.json"), &dec.action_doc)?;
    write_json(&out.join("skeleton.json"), &dec.action_doc.kgraph)?;
    write_json(&out.join("groupoid.json"), &dec.action_doc.groupoid)?;
    write_json(&out.join("theta.json"), &dec.theta_doc(&cat))?;
    ctx.say(format!(
        "transversal of {} atoms, groupoid of {} arrows; theta {} on {} arrows",
        dec.transversal.len(),
        dec.action.groupoid().arrow_count(),
        if iso.holds() { "is an isomorphism" } else { "is NOT an isomorphism" },
        iso.arrows
    ));
    Ok((iso.holds(), json!({"transversal": dec.theta_doc(&cat).transversal, "iso": iso})))
}

fn cmd_roundtrip(ctx: &mut Ctx, doc: &Path, bound: &str) -> Result<(bool, Value), Fatal> {
    let v = ctx.read(doc)?;
    let d: ActionDoc = parse_as(v, "action")?;
    let a = validate_action(&d).map_err(invalid)?;
    let b = parse_bound(bound, a.kgraph().rank())?;
    ctx.bound = Some(b.as_slice().to_vec());
    let p = build_product(&a, &b).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
    let dec = match decompose(&p.category, &p.size) {
        Ok(dec) => dec,
        Err(e) => {
            ctx.say(format!("decompose: {e}"));
            return Ok((false, json!({"error": e.to_string()})));
        }
    };
    let iso = verify_iso(&p.category, &p.size, &dec).map_err(|e| Fatal { code: EXIT_FAILED, err: e.into() })?;
    if iso.holds() {
        ctx.say(format!("theta bijective on {} arrows", iso.arrows));
    } else {
        ctx.say(format!("theta is not an isomorphism: {}", iso.witnesses.join("; ")));
    }
    Ok((iso.holds(), json!({"iso": iso, "recovered": dec.action_doc})))
}

fn cmd_fuzz(ctx: &mut Ctx, a: &FuzzArgs) -> Result<(bool, Value), Fatal> {
    if a.count == 0 {
        return Err(usage(anyhow!("--count must be positive")));
    }
    if matches!(a.k, Some(0)) {
        return Err(usage(anyhow!("--k must be positive")));
    }
    let params = CampaignParams {
        first_seed: a.seed,
        count: a.count,
        max_objects: a.max_objects.max(1),
        max_edges: a.max_edges,
        k: a.k,
        max_group: a.max_group.max(1),
        path_bound: a.path_bound,
        product_bound: a.product_bound,
    };
    let report = run_campaign(&params);
    ctx.say(format!("{} seeds, {} valid actions, {} failure(s)", report.seeds, report.valid, report.failures.len()));
    for f in &report.failures {
        ctx.say(format!("  seed {}: {} ({})", f.seed, f.check, f.detail));
    }
    if !report.clean() {
        if let Some(dir) = std::env::var_os("GHK_CORPUS_DIR") {
            let written = write_corpus(Path::new(&dir), &report).map_err(usage)?;
            ctx.say(format!("wrote {} counterexample(s)", written.len()));
        }
    }
    Ok((report.clean(), json!({"params": params, "report": report})))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Check(_) => "check",
        Command::Product { .. } => "product build",
        Command::Decompose { .. } => "decompose",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Fuzz(_) => "fuzz",
    }
}

fn dispatch(ctx: &mut Ctx, cli: &Cli) -> Result<(bool, Value), Fatal> {
    match &cli.command {
        Command::Validate { doc } => cmd_validate(ctx, doc),
        Command::Check(args) => cmd_check(ctx, args),
        Command::Product { command: ProductCommand::Build { doc, bound, out } } => {
            cmd_product_build(ctx, doc, bound, out)
        }
        Command::Decompose { doc, out } => cmd_decompose(ctx, doc, out),
        Command::Roundtrip { doc, bound } => cmd_roundtrip(ctx, doc, bound),
        Command::Fuzz(args) => cmd_fuzz(ctx, args),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let mut ctx = Ctx { inputs: Vec::new(), bound: None, summary: Vec::new() };
    let (status, error, results) = match dispatch(&mut ctx, &cli) {
        Ok((true, v)) => (0, None, v),
        Ok((false, v)) => (EXIT_FAILED, None, v),
        Err(Fatal { code, err }) => (code, Some(format!("{err:#}")), Value::Null),
    };
    for line in &ctx.summary {
        println!("{line}");
    }
    if let Some(e) = &error {
        eprintln!("error: {e}");
    }
    if let Some(path) = &cli.json {
        let report = RunReport {
            command: command_name(&cli.command).to_string(),
            inputs: ctx.inputs,
            bound: ctx.bound,
            status,
            error,
            results,
        };
        let body = serde_json::to_string_pretty(&report)? + "\n";
        if let Err(e) = std::fs::write(path, body) {
            bail!("writing {}: {e}", path.display());
        }
    }
    Ok(status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
