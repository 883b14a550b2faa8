use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use coinv_core::glue::{lattice_facts, table2_build, ClassTag};
use coinv_core::irr::{build_irr, sg_set};
use coinv_core::isometry::discriminant_action;
use coinv_core::lattice::rat_to_string;
use coinv_verify::cache::Cache;
use coinv_verify::expect::Expectations;
use coinv_verify::pipeline::{cached_aut, cached_centralizer, cached_orthogonal, run_class, ClassReport, Options, Stage};
use coinv_verify::report::{emit_report, Report, SCHEMA_VERSION};
use coinv_verify::VerifyError;
use rayon::prelude::*;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "coinv", version, about = "Coinvariant lattice orbifold computations and their verification")]
struct Cli {
    /// Directory for cached group computations.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Seed for the randomized Schreier-Sims runs.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for running classes in parallel (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Expectations file replacing the built-in one.
    #[arg(long, global = true)]
    expectations: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The lattice construction of a class, with its structural facts.
    Build { class: ClassTag },
    /// Generators and order of O(L).
    Aut { class: ClassTag },
    /// Generators and order of the centralizer of g in O(L).
    Centralizer { class: ClassTag },
    /// The discriminant form of L and the image of C(g) in its orthogonal group.
    Discform { class: ClassTag },
    /// Orthogonal group of the discriminant form or of the module of irreducibles.
    OrthogonalGroup { target: Target, class: ClassTag },
    /// The module of irreducibles with a census of its q-values.
    IrrSpace { class: ClassTag },
    /// Run the checks for one group of published values.
    Verify {
        what: Verify,
        /// Restrict to one class.
        #[arg(long)]
        class: Option<ClassTag>,
        /// Also run the index-3 and index-4 subgroup searches (slow).
        #[arg(long)]
        deep: bool,
    },
    /// Run every check and write report.md and report.json.
    Report {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        deep: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Disc,
    Irr,
}

#[derive(Clone, Copy, ValueEnum)]
enum Verify {
    /// Lattice facts, O(L) and C(g).
    Table2,
    /// Discriminant forms and orbit claims.
    Table3,
    /// Modules of irreducibles and their orthogonal groups.
    Table4,
    /// Identification of the automorphism group.
    Theorem,
}

struct Ctx {
    cache: Cache,
    seed: u64,
    exp: Expectations,
}

fn print_json(v: &Value) -> Result<(), VerifyError> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

fn run_classes(ctx: &Ctx, classes: &[ClassTag], opts: &Options) -> Result<Vec<ClassReport>, VerifyError> {
    classes
        .par_iter()
        .map(|&c| {
            let e = ctx.exp.get(c).ok_or_else(|| VerifyError::Expectations(format!("no entry for class {c}")))?;
            run_class(c, e, &ctx.cache, opts)
        })
        .collect()
}

fn print_summary(reports: &[ClassReport]) {
    for r in reports {
        for c in &r.checks {
            let status = if c.pass { "PASS" } else { "FAIL" };
            let exp = c.expected.as_deref().map(|e| format!(" (expected {e})")).unwrap_or_default();
            println!("{status} {} {}: {}{exp}", r.class.name(), c.label, c.computed);
        }
    }
}

fn run(cli: Cli) -> Result<bool, VerifyError> {
    let exp = match &cli.expectations {
        Some(p) => Expectations::load(p)?,
        None => Expectations::builtin(),
    };
    let cache = match &cli.cache {
        Some(d) => Cache::at(d)?,
        None => Cache::disabled(),
    };
    let ctx = Ctx { cache, seed: cli.seed, exp };
    match cli.cmd {
        Command::Build { class } => {
            let b = table2_build(class);
            let strs = |v: &[num_rational::BigRational]| v.iter().map(rat_to_string).collect::<Vec<_>>();
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "root_type": b.spec.root_type(),
                "n": b.n,
                "lattice": b.l.to_json(),
                "g": b.g.to_json(),
                "chi": strs(&b.chi),
                "gamma": strs(&b.gamma),
                "lambda_e": strs(&b.lambda_e),
                "facts": lattice_facts(&b)?,
            }))?;
        }
        Command::Aut { class } => {
            let b = table2_build(class);
            let (g, search_order, chain_order, _) = cached_aut(&b, &ctx.cache)?;
            let gens: Vec<_> = g.generators().iter().map(|x| x.to_json()).collect();
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "order": g.order().to_string(),
                "search_order": search_order.to_string(),
                "chain_order": chain_order.to_string(),
                "generators": gens,
            }))?;
        }
        Command::Centralizer { class } => {
            let b = table2_build(class);
            let (g, _, _, _) = cached_aut(&b, &ctx.cache)?;
            let (c, _) = cached_centralizer(&b, &g, &ctx.cache)?;
            let gens: Vec<_> = c.group.generators().iter().map(|x| x.to_json()).collect();
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "order": c.group.order().to_string(),
                "class_size": c.class_size,
                "generators": gens,
            }))?;
        }
        Command::Discform { class } => {
            let b = table2_build(class);
            let (g, _, _, _) = cached_aut(&b, &ctx.cache)?;
            let (c, _) = cached_centralizer(&b, &g, &ctx.cache)?;
            let da = discriminant_action(&c.group, &b.l, ctx.seed)?;
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "module": da.module.to_json(),
                "order": da.module.size(),
                "centralizer_image_order": da.image.order().to_string(),
                "kernel_order": da.kernel_order.to_string(),
                "centralizer_images": da.maps,
            }))?;
        }
        Command::OrthogonalGroup { target, class } => {
            let b = table2_build(class);
            let m = match target {
                Target::Disc => std::sync::Arc::new(b.l.discriminant()?.module),
                Target::Irr => build_irr(&b)?.module,
            };
            let (o, _) = cached_orthogonal(&m, ctx.seed, &ctx.cache)?;
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "module": m.to_json(),
                "order": o.chain_order.to_string(),
                "search_order": o.search_order.to_string(),
                "chain_order": o.chain_order.to_string(),
                "generators": o.group.generators(),
            }))?;
        }
        Command::IrrSpace { class } => {
            let irr = build_irr(&table2_build(class))?;
            let m = &irr.module;
            let den = m.den();
            let census: Vec<Value> = m
                .q_census()
                .into_iter()
                .map(|(o, q, n)| {
                    let q = num_rational::BigRational::new(q.into(), den.into());
                    json!({ "order": o, "q": rat_to_string(&q), "count": n })
                })
                .collect();
            let sets = sg_set(&irr);
            print_json(&json!({
                "schema_version": SCHEMA_VERSION,
                "class": class,
                "module": m.to_json(),
                "order": m.size(),
                "q_census": census,
                "sg_size": sets.sg.len(),
                "vacuum_label": irr.unlabel(irr.vacuum_grade_one()),
            }))?;
        }
        Command::Verify { what, class, deep } => {
            let upto = match what {
                Verify::Table2 => Stage::Lattice,
                Verify::Table3 => Stage::Discriminant,
                Verify::Table4 => Stage::Irreducibles,
                Verify::Theorem => Stage::Automorphisms,
            };
            let classes: Vec<ClassTag> = class.map(|c| vec![c]).unwrap_or_else(|| ClassTag::ALL.to_vec());
            let reports = run_classes(&ctx, &classes, &Options { seed: ctx.seed, upto, deep })?;
            print_summary(&reports);
            return Ok(reports.iter().all(ClassReport::passed));
        }
        Command::Report { out, deep } => {
            let opts = Options { seed: ctx.seed, upto: Stage::Automorphisms, deep };
            let report = Report::new(run_classes(&ctx, &ClassTag::ALL, &opts)?);
            emit_report(&report, &ctx.exp, &out)?;
            print_summary(&report.classes);
            return Ok(report.all_passed);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
