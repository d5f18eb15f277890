//! Command-line front door for the composition-product kernel:
//! enumeration, composite evaluation, diagram verification, and bar or
//! cobar export.

use clap::{Args, Parser, Subcommand, ValueEnum};
use opkernel::bar::{
    bar, bar_with_fault, check_cosimplicial_identities, check_simplicial_identities, cobar,
    dimension_table, reduced_bar, simplicial_json, BarFault,
};
use opkernel::category::{Backend, BackendKind};
use opkernel::combinatorics::{enumerate_level_trees, FinSet};
use opkernel::error::Error;
use opkernel::monoid::{
    ass_monoid, check_bimodule, check_minimal_axioms, check_module, check_monoid, com_monoid,
    standard_augmentation, unit_bimodule, unit_monoid, validate_augmentation, wrong_side_action,
    Augmentation, Module, Monoid, Side,
};
use opkernel::pseudomonoid::{check_coherence, CompositionStructure};
use opkernel::report::Report;
use opkernel::symseq::{SeqMor, SymmetricSequence};
use std::io::Write;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "opkernel", version, about = "composition products, operads and bar constructions over exact backends")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Qvect,
    Pset,
    #[value(name = "op-pset")]
    OpPset,
}

impl BackendArg {
    fn kind(self) -> BackendKind {
        match self {
            BackendArg::Qvect => BackendKind::QVect,
            BackendArg::Pset => BackendKind::PSet,
            BackendArg::OpPset => BackendKind::OpPSet,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MonoidName {
    Com,
    Ass,
    #[value(name = "com-pset")]
    ComPset,
    Unit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VerifyTarget {
    Coherence,
    Monoid,
    Module,
    Bimodule,
    Simplicial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mutation {
    /// Swap two summand components of a unit insertion.
    Iota,
    /// Swap two columns of the binary multiplication.
    M2,
    /// Build s_0 with the unit in the wrong slot.
    S0,
    /// Use the side-confused binary action on a module.
    ModuleSide,
    /// Break the augmentation at arity one.
    Augmentation,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate level trees on a canonical label set.
    Trees(TreesArgs),
    /// Evaluate a composition product and tabulate summand sizes.
    Compose(ComposeArgs),
    /// Run a diagram verifier and emit a JSON report.
    Verify(VerifyArgs),
    /// Build a bar (or cobar) construction and export it.
    Bar(BarArgs),
}

#[derive(Args)]
struct TreesArgs {
    /// Number of labels (the canonical set {1..size}).
    #[arg(long)]
    size: usize,
    /// Number of internal levels.
    #[arg(long)]
    level: usize,
    /// Emit the DOT rendering of one tree (by index) instead of chains.
    #[arg(long)]
    dot: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct ComposeArgs {
    /// Built-in sequence names, outermost first: com, ass, unit, or
    /// const:N for a constant N-sized value.
    #[arg(long = "seq")]
    seqs: Vec<String>,
    /// JSON file with {"sequences": [...]} instead of built-ins.
    #[arg(long)]
    file: Option<std::path::PathBuf>,
    /// Evaluation set size.
    #[arg(long)]
    size: usize,
    #[arg(long, value_enum, default_value = "qvect")]
    backend: BackendArg,
    /// Truncation bound for the built-in sequences.
    #[arg(long, default_value_t = 4)]
    bound: usize,
    /// Write the CSV table here (defaults to stdout).
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
    /// Also dump the indexed decomposition as JSON.
    #[arg(long)]
    json: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    target: VerifyTarget,
    #[arg(long, value_enum, default_value = "qvect")]
    backend: BackendArg,
    /// Base seed for random samples (overridden by OPKERNEL_SEED).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Built-in monoid for the monoid/module/bimodule/simplicial targets.
    #[arg(long, value_enum, default_value = "com")]
    monoid: MonoidName,
    /// Largest product arity checked.
    #[arg(long, default_value_t = 4)]
    max_n: usize,
    /// Largest evaluation-set size (the structure bound).
    #[arg(long, default_value_t = 3)]
    max_size: usize,
    /// Number of random sample sequences for the coherence target.
    #[arg(long, default_value_t = 3)]
    samples: usize,
    /// Size cap for random sample sequences.
    #[arg(long, default_value_t = 2)]
    size_cap: usize,
    /// Bar degrees for the simplicial target.
    #[arg(long, default_value_t = 3)]
    degrees: usize,
    /// Inject a single-point corruption before checking.
    #[arg(long, value_enum)]
    mutate: Option<Mutation>,
    /// Write the JSON report here (defaults to stdout).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct BarArgs {
    /// Built-in monoid.
    #[arg(long, value_enum, default_value = "com")]
    monoid: MonoidName,
    /// Use the unit bimodule as both coefficients.
    #[arg(long)]
    reduced: bool,
    /// Build the cosimplicial cobar of this pointed cooperad instead.
    #[arg(long, value_enum)]
    cooperad: Option<MonoidName>,
    /// Maximal degree.
    #[arg(long, default_value_t = 3)]
    degrees: usize,
    /// Largest evaluation-set size.
    #[arg(long, default_value_t = 3)]
    size: usize,
    /// Write the construction as JSON.
    #[arg(long)]
    json: Option<std::path::PathBuf>,
    /// Write the dimension table as CSV (defaults to stdout).
    #[arg(long)]
    csv: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Truncation { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cli: Cli) -> opkernel::Result<ExitCode> {
    match cli.command {
        Command::Trees(args) => cmd_trees(args),
        Command::Compose(args) => cmd_compose(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Bar(args) => cmd_bar(args),
    }
}

fn emit(out: &Option<std::path::PathBuf>, content: &str) -> opkernel::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| Error::Parse(format!("cannot write stdout: {e}")))
        }
    }
}

fn cmd_trees(args: TreesArgs) -> opkernel::Result<ExitCode> {
    let a = FinSet::canonical(args.size);
    let trees = enumerate_level_trees(&a, args.level)?;
    let mut content = String::new();
    if let Some(index) = args.dot {
        let tree = trees
            .get(index)
            .ok_or_else(|| Error::domain(format!("tree index {index} out of range")))?;
        content.push_str(&tree.to_dot());
    } else {
        content.push_str(&format!("count {}\n", trees.len()));
        for t in &trees {
            content.push_str(&serde_json::to_string(t.chain()).expect("chains serialize"));
            content.push('\n');
        }
    }
    emit(&args.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn builtin_sequence(
    name: &str,
    backend: Backend,
    bound: usize,
) -> opkernel::Result<SymmetricSequence> {
    if let Some(size) = name.strip_prefix("const:") {
        let size: usize = size
            .parse()
            .map_err(|_| Error::Parse(format!("bad constant size in {name:?}")))?;
        let obj = backend.free_atom(size, "c")?;
        return SymmetricSequence::constant(backend, &obj, bound, name);
    }
    match name {
        "com" => SymmetricSequence::constant(backend, &backend.unit(), bound, "com"),
        "unit" => SymmetricSequence::unit(backend, bound),
        "ass" => {
            let cs = CompositionStructure::new(backend, bound);
            Ok(ass_monoid(&cs)?.carrier)
        }
        other => Err(Error::Parse(format!("unknown sequence {other:?}"))),
    }
}

fn cmd_compose(args: ComposeArgs) -> opkernel::Result<ExitCode> {
    let backend = Backend::new(args.backend.kind());
    let bound = args.bound.max(args.size);
    let (seqs, names): (Vec<SymmetricSequence>, Vec<String>) = if let Some(path) = &args.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let value: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| Error::Parse(format!("bad JSON: {e}")))?;
        let list = value
            .get("sequences")
            .and_then(|s| s.as_array())
            .or_else(|| value.as_array())
            .ok_or_else(|| Error::Parse("expected a sequences array".into()))?;
        let seqs: Vec<SymmetricSequence> = list
            .iter()
            .map(SymmetricSequence::from_json)
            .collect::<opkernel::Result<_>>()?;
        let names = seqs.iter().map(|s| s.name().to_string()).collect();
        (seqs, names)
    } else {
        if args.seqs.is_empty() {
            return Err(Error::Parse("no sequences given: use --seq or --file".into()));
        }
        let seqs: Vec<SymmetricSequence> = args
            .seqs
            .iter()
            .map(|n| builtin_sequence(n, backend, bound))
            .collect::<opkernel::Result<_>>()?;
        (seqs, args.seqs.clone())
    };
    let ctx = opkernel::compprod::ComposeCtx::new(backend, args.size);
    let a = FinSet::canonical(args.size);
    let co = ctx.compose(&seqs, &a)?;
    let key = names.join("*");
    let mut csv = String::from("sequences,set_size,chain,size\n");
    for term in &co.terms {
        let chain = serde_json::to_string(term.tree.chain()).expect("chains serialize");
        csv.push_str(&format!(
            "{key},{},\"{}\",{}\n",
            args.size,
            chain.replace('"', "\"\""),
            term.object.size()
        ));
    }
    csv.push_str(&format!("{key},{},total,{}\n", args.size, co.total.size()));
    emit(&args.csv, &csv)?;
    if let Some(path) = &args.json {
        let dump = serde_json::to_string_pretty(&co.index_json()).expect("index serializes");
        emit(&Some(path.clone()), &dump)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn effective_seed(flag: u64) -> u64 {
    std::env::var("OPKERNEL_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(flag)
}

struct NamedMonoid {
    cs: CompositionStructure,
    monoid: Monoid<CompositionStructure>,
}

fn builtin_monoid(
    name: MonoidName,
    backend: BackendKind,
    bound: usize,
) -> opkernel::Result<NamedMonoid> {
    let backend = match name {
        MonoidName::ComPset => BackendKind::OpPSet,
        MonoidName::Ass => BackendKind::QVect,
        _ => backend,
    };
    let cs = CompositionStructure::new(Backend::new(backend), bound);
    let monoid = match name {
        MonoidName::Com | MonoidName::ComPset => com_monoid(&cs)?,
        MonoidName::Ass => ass_monoid(&cs)?,
        MonoidName::Unit => unit_monoid(&cs)?,
    };
    Ok(NamedMonoid { cs, monoid })
}

fn finish_report(report: Report, out: &Option<std::path::PathBuf>) -> opkernel::Result<ExitCode> {
    let json = serde_json::to_string_pretty(&report.to_json()).expect("reports serialize");
    emit(out, &format!("{json}\n"))?;
    Ok(if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_verify(args: VerifyArgs) -> opkernel::Result<ExitCode> {
    let seed = effective_seed(args.seed);
    match args.target {
        VerifyTarget::Coherence => {
            let backend = Backend::new(args.backend.kind());
            let cs = CompositionStructure::new(backend, args.max_size);
            let samples: Vec<SymmetricSequence> = (0..args.samples as u64)
                .map(|i| {
                    SymmetricSequence::random(backend, args.max_size, args.size_cap, seed * 101 + i)
                })
                .collect::<opkernel::Result<_>>()?;
            let report = if args.mutate == Some(Mutation::Iota) {
                let bad = cs.with_corrupted_iota();
                check_coherence(&bad, &samples, args.max_n)?
            } else {
                check_coherence(&cs, &samples, args.max_n)?
            };
            finish_report(report, &args.out)
        }
        VerifyTarget::Monoid => {
            let named = builtin_monoid(args.monoid, args.backend.kind(), args.max_size)?;
            let mut mo = named.monoid;
            if args.mutate == Some(Mutation::M2) {
                mo = corrupt_m2(&mo)?;
            }
            let minimal = check_minimal_axioms(&named.cs, &mo)?;
            let full = check_monoid(&named.cs, &mo, args.max_n)?;
            finish_report(Report::merged(vec![minimal, full]), &args.out)
        }
        VerifyTarget::Module => {
            let named = builtin_monoid(args.monoid, args.backend.kind(), args.max_size)?;
            let mo = &named.monoid;
            let action = if args.mutate == Some(Mutation::ModuleSide) {
                wrong_side_action(&named.cs, mo)?
            } else {
                mo.m2.clone()
            };
            let mut reports = Vec::new();
            for side in [Side::Left, Side::Right] {
                let md = Module {
                    side,
                    carrier: mo.carrier.clone(),
                    action: action.clone(),
                };
                reports.push(check_module(&named.cs, &md, mo, args.max_n)?);
            }
            finish_report(Report::merged(reports), &args.out)
        }
        VerifyTarget::Bimodule => {
            let named = builtin_monoid(args.monoid, args.backend.kind(), args.max_size)?;
            let mo = &named.monoid;
            let mut aug = standard_augmentation(&named.cs, mo)?;
            if args.mutate == Some(Mutation::Augmentation) {
                aug = corrupt_augmentation(&named.cs, &aug)?;
            }
            let validation = validate_augmentation(&named.cs, mo, &aug)?;
            if !validation.all_passed() {
                return finish_report(validation, &args.out);
            }
            let bd = unit_bimodule(&named.cs, mo, &aug)?;
            let report = check_bimodule(&named.cs, &bd, mo, mo, args.max_n)?;
            finish_report(Report::merged(vec![validation, report]), &args.out)
        }
        VerifyTarget::Simplicial => {
            let named = builtin_monoid(args.monoid, args.backend.kind(), args.max_size)?;
            let mo = &named.monoid;
            let aug = standard_augmentation(&named.cs, mo)?;
            if named.cs.backend().kind() == BackendKind::OpPSet {
                let mut reports = Vec::new();
                for m in 1..=args.max_size {
                    let c = cobar(&named.cs, mo, &aug, args.degrees, m)?;
                    reports.push(check_cosimplicial_identities(&c)?);
                }
                return finish_report(Report::merged(reports), &args.out);
            }
            let fault = (args.mutate == Some(Mutation::S0)).then_some(BarFault::DegeneracyUnitSlot);
            let bd = unit_bimodule(&named.cs, mo, &aug)?;
            let right = opkernel::monoid::bimodule_side(&bd, Side::Right);
            let left = opkernel::monoid::bimodule_side(&bd, Side::Left);
            let s = bar_with_fault(&named.cs, &right, mo, &left, args.degrees, fault)?;
            let report = check_simplicial_identities(&named.cs, &s)?;
            finish_report(report, &args.out)
        }
    }
}

/// Swap two genuinely different columns of some component of the binary
/// multiplication; on carriers where every column is equal (the
/// unit-valued operad) fall back to doubling one column so the
/// corruption is never a silent no-op.
fn corrupt_m2(
    mo: &Monoid<CompositionStructure>,
) -> opkernel::Result<Monoid<CompositionStructure>> {
    let mut comps = mo.m2.comps().to_vec();
    for (idx, comp) in comps.iter().enumerate() {
        if let Some(m) = comp.matrix() {
            for i in 0..m.cols() {
                for j in i + 1..m.cols() {
                    if m.col(i) != m.col(j) {
                        let mut out = comps.clone();
                        out[idx] = comp.with_swapped_columns(i, j)?;
                        return Ok(Monoid {
                            carrier: mo.carrier.clone(),
                            m2: SeqMor::new(mo.m2.src().clone(), mo.m2.dst().clone(), out)?,
                            eta: mo.eta.clone(),
                        });
                    }
                }
            }
        }
    }
    let target = comps
        .iter()
        .position(|c| c.src().size() >= 1 && c.matrix().is_some_and(|m| m.nnz() > 0))
        .ok_or_else(|| Error::domain("no component to corrupt"))?;
    let backend = Backend::new(comps[target].backend());
    let m = comps[target].matrix().unwrap();
    let cols: Vec<Vec<(u32, opkernel::category::Rat)>> = (0..m.cols())
        .map(|c| {
            m.col(c)
                .iter()
                .map(|(r, v)| {
                    if c == 0 {
                        (*r, v * &opkernel::category::rat(2, 1))
                    } else {
                        (*r, v.clone())
                    }
                })
                .collect()
        })
        .collect();
    let corrupted = opkernel::category::QMat::from_cols(m.rows(), cols);
    comps[target] =
        backend.mor_from_matrix(comps[target].src(), comps[target].dst(), corrupted)?;
    Ok(Monoid {
        carrier: mo.carrier.clone(),
        m2: SeqMor::new(mo.m2.src().clone(), mo.m2.dst().clone(), comps)?,
        eta: mo.eta.clone(),
    })
}

fn corrupt_augmentation(
    cs: &CompositionStructure,
    aug: &Augmentation<CompositionStructure>,
) -> opkernel::Result<Augmentation<CompositionStructure>> {
    let backend = cs.backend();
    let mut comps = aug.eps.comps().to_vec();
    let first = &comps[0];
    let corrupted = match first.matrix() {
        Some(m) => backend.mor_from_matrix(
            first.src(),
            first.dst(),
            m.scale(&opkernel::category::rat(2, 1)),
        )?,
        None => {
            // Pointed backends: collapse the arity-one component.
            backend.zero_map(first.src(), &backend.initial())?;
            return Err(Error::Capability(
                "augmentation corruption is a matrix mutation".into(),
            ));
        }
    };
    comps[0] = corrupted;
    Ok(Augmentation {
        eps: SeqMor::new(aug.eps.src().clone(), aug.eps.dst().clone(), comps)?,
    })
}

fn cmd_bar(args: BarArgs) -> opkernel::Result<ExitCode> {
    if let Some(name) = args.cooperad {
        let named = builtin_monoid(name, BackendKind::OpPSet, args.size.max(1))?;
        if named.cs.backend().kind() != BackendKind::OpPSet {
            return Err(Error::Capability(
                "cobar constructions need the opposite pointed backend".into(),
            ));
        }
        let aug = standard_augmentation(&named.cs, &named.monoid)?;
        let mut csv = String::from("degree");
        for m in 1..=args.size {
            csv.push_str(&format!(",size_{m}"));
        }
        csv.push('\n');
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); args.degrees + 1];
        for m in 1..=args.size {
            let c = cobar(&named.cs, &named.monoid, &aug, args.degrees, m)?;
            for (n, ob) in c.objects.iter().enumerate() {
                rows[n].push(ob.size());
            }
        }
        for (n, row) in rows.iter().enumerate() {
            csv.push_str(&n.to_string());
            for v in row {
                csv.push_str(&format!(",{v}"));
            }
            csv.push('\n');
        }
        emit(&args.csv, &csv)?;
        return Ok(ExitCode::SUCCESS);
    }

    let named = builtin_monoid(args.monoid, BackendKind::QVect, args.size.max(1))?;
    let mo = &named.monoid;
    let s = if args.reduced {
        let aug = standard_augmentation(&named.cs, mo)?;
        reduced_bar(&named.cs, mo, &aug, args.degrees)?
    } else {
        let right = Module {
            side: Side::Right,
            carrier: mo.carrier.clone(),
            action: mo.m2.clone(),
        };
        let left = Module {
            side: Side::Left,
            carrier: mo.carrier.clone(),
            action: mo.m2.clone(),
        };
        bar(&named.cs, &right, mo, &left, args.degrees)?
    };
    let table = dimension_table(&s, args.size)?;
    let mut csv = String::from("degree");
    for m in 1..=args.size {
        csv.push_str(&format!(",size_{m}"));
    }
    csv.push('\n');
    for (n, row) in table.iter().enumerate() {
        csv.push_str(&n.to_string());
        for v in row {
            csv.push_str(&format!(",{v}"));
        }
        csv.push('\n');
    }
    emit(&args.csv, &csv)?;
    if let Some(path) = &args.json {
        let dump =
            serde_json::to_string_pretty(&simplicial_json(&s, args.size)?).expect("serializes");
        emit(&Some(path.clone()), &dump)?;
    }
    Ok(ExitCode::SUCCESS)
}
