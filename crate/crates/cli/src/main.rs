//! Command-line front end: run the engines, translate between them, verify
//! the translations, check termination, and generate hard instances.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error,
//! 3 budget exhausted under `--strict`.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;

use saturachase::bridge::{
    encode_eqsat_to_chase, encode_skolem_to_eqsat, verify_chase_equiv, verify_skolem_equiv, ChaseVerifyConfig, Report,
};
use saturachase::chase::{
    parse_dependencies, parse_instance, run_skolem_chase, run_standard_chase, write_dependencies, write_instance,
    ChaseConfig, ChaseStatus, Dependency, Instance, Scheduler,
};
use saturachase::egraph::{parse_egraph, to_dot, write_egraph, EGraph};
use saturachase::eqsat::{eqsat, Limits, Status};
use saturachase::generators::{parse_pcp, parse_tm, pcp_start_term, pcp_to_trs, srs_to_trs, string_to_term, tm_to_srs};
use saturachase::term::{parse_term_infer, parse_trs, write_trs, Term, Trs};
use saturachase::termination::{build_wtdg, dependency_position_graph, expand_degenerate};

#[derive(Parser)]
#[command(
    name = "saturachase",
    version,
    about = "Equality saturation and the chase, side by side"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equality saturation.
    Eqsat {
        #[command(subcommand)]
        action: EqsatCmd,
    },
    /// The standard chase.
    Chase {
        #[command(subcommand)]
        action: ChaseCmd,
    },
    /// The Skolem chase.
    Skolem {
        #[command(subcommand)]
        action: SkolemCmd,
    },
    /// Translate a problem from one engine to the other.
    Encode {
        #[command(subcommand)]
        action: EncodeCmd,
    },
    /// Run both sides of a translation and compare the results.
    Verify {
        #[command(subcommand)]
        action: VerifyCmd,
    },
    /// Weak term acyclicity of a TRS, or weak acyclicity of dependencies.
    CheckAcyclic(AcyclicArgs),
    /// Rewrite systems from Turing machines and Post correspondence problems.
    Gen {
        #[command(subcommand)]
        action: GenCmd,
    },
    /// Graphviz output.
    Export {
        #[command(subcommand)]
        action: ExportCmd,
    },
}

#[derive(Subcommand)]
enum EqsatCmd {
    /// Saturate a term or E-graph under a TRS
    Run(EqsatRunArgs),
}

#[derive(Subcommand)]
enum ChaseCmd {
    /// Chase an instance with TGDs and EGDs
    Run(ChaseRunArgs),
}

#[derive(Subcommand)]
enum SkolemCmd {
    /// Skolem chase in rounds
    Run(SkolemRunArgs),
}

#[derive(Subcommand)]
enum EncodeCmd {
    /// Dependencies and an instance to a TRS and a start term.
    Skolem2eqsat(SkolemEncodeArgs),
    /// A TRS and an E-graph to dependencies and an instance.
    Eqsat2chase(ChaseEncodeArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Saturation of the encoded program against the Skolem chase.
    Skolem(VerifySkolemArgs),
    /// Saturation against fair standard chase runs of the encoded TRS.
    Chase(VerifyChaseArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    /// Encode a Turing machine as a string rewriting system.
    Tm(GenTmArgs),
    /// Encode a Post correspondence problem.
    Pcp(GenPcpArgs),
}

#[derive(Subcommand)]
enum ExportCmd {
    /// An E-graph, or the dependency graph of a TRS or dependency file.
    Dot(ExportDotArgs),
}

#[derive(Args)]
struct GraphInput {
    /// Start from the E-graph of a single term.
    #[arg(long, conflicts_with = "egraph")]
    term: Option<PathBuf>,
    /// Start from an E-graph file.
    #[arg(long)]
    egraph: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct LimitArgs {
    /// Maximum number of saturation rounds.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    /// Give up once the E-graph has more nodes than this.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    node_cap: u64,
}

impl LimitArgs {
    fn limits(self) -> Limits {
        Limits {
            budget: self.budget as usize,
            node_cap: self.node_cap as usize,
        }
    }
}

#[derive(Args)]
struct EqsatRunArgs {
    #[arg(long)]
    trs: PathBuf,
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    limits: LimitArgs,
    /// Write the saturated E-graph here.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Write the saturated E-graph as DOT here.
    #[arg(long)]
    dot: Option<PathBuf>,
    /// Exit with status 3 if the budget runs out.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedulerArg {
    #[value(name = "egd_fair")]
    EgdFair,
    Fifo,
    Random,
}

#[derive(Args)]
struct ChaseRunArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value = "egd_fair")]
    scheduler: SchedulerArg,
    /// Seed for the random scheduler; only the first is used.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,
    /// Maximum number of chase steps.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SkolemRunArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// Maximum number of rounds.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct SkolemEncodeArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ChaseEncodeArgs {
    #[arg(long)]
    trs: PathBuf,
    #[command(flatten)]
    input: GraphInput,
    /// Write the dependencies here instead of stdout.
    #[arg(long)]
    deps_out: Option<PathBuf>,
    /// Write the instance here instead of stdout.
    #[arg(long)]
    instance_out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifySkolemArgs {
    #[arg(long)]
    deps: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    #[command(flatten)]
    limits: LimitArgs,
    /// Round budget for the Skolem chase; defaults to `--budget`.
    #[arg(long)]
    chase_budget: Option<usize>,
}

#[derive(Args)]
struct VerifyChaseArgs {
    #[arg(long)]
    trs: PathBuf,
    #[command(flatten)]
    input: GraphInput,
    #[command(flatten)]
    limits: LimitArgs,
    /// Seeds of the random fair schedulers run next to the EGD-fair one.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    /// Step budget for each chase run.
    #[arg(long, default_value_t = 100_000)]
    chase_budget: usize,
}

#[derive(Args)]
struct AcyclicArgs {
    #[arg(long, conflicts_with = "deps", required_unless_present = "deps")]
    trs: Option<PathBuf>,
    #[arg(long)]
    deps: Option<PathBuf>,
    /// Write the dependency graph as DOT here.
    #[arg(long)]
    dot: Option<PathBuf>,
}

#[derive(Args)]
struct GenTmArgs {
    /// Machine description file.
    #[arg(long)]
    tm: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenPcpArgs {
    /// One `pair <word> : <word>` per line.
    #[arg(long)]
    pcp: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportDotArgs {
    #[arg(long)]
    trs: Option<PathBuf>,
    #[arg(long)]
    deps: Option<PathBuf>,
    #[command(flatten)]
    input: GraphInput,
    /// Output file; stdout if absent.
    #[arg(long)]
    dot: Option<PathBuf>,
}

/// How a command ended, short of an error.
enum Outcome {
    Ok,
    VerifyFailed,
    Budget,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_trs(path: &Path) -> Result<Trs> {
    parse_trs(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_deps(path: &Path) -> Result<Vec<Dependency>> {
    parse_dependencies(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn load_term(path: &Path) -> Result<Term> {
    Ok(parse_term_infer(&read(path)?)
        .map_err(|e| anyhow!("{}: {e}", path.display()))?
        .0)
}

fn load_graph(input: &GraphInput, trs: Option<&Trs>) -> Result<EGraph> {
    let g = match (&input.term, &input.egraph) {
        (Some(p), None) => {
            let t = load_term(p)?;
            let mut sig = trs.map(|r| r.signature().clone()).unwrap_or_default();
            t.infer_signature(&mut sig)
                .map_err(|e| anyhow!("{}: {e}", p.display()))?;
            EGraph::from_term_with(sig, &t)?.0
        }
        (None, Some(p)) => {
            parse_egraph(&read(p)?)
                .map_err(|e| anyhow!("{}: {e}", p.display()))?
                .egraph
        }
        _ => bail!("give exactly one of --term and --egraph"),
    };
    match trs {
        Some(r) => Ok(g.with_signature(r.signature())?),
        None => Ok(g),
    }
}

fn budget_outcome(exhausted: bool) -> Outcome {
    if exhausted {
        Outcome::Budget
    } else {
        Outcome::Ok
    }
}

fn eqsat_run(a: EqsatRunArgs) -> Result<Outcome> {
    let trs = load_trs(&a.trs)?;
    let g = load_graph(&a.input, Some(&trs))?;
    let out = eqsat(&trs, &g, a.limits.limits())?;
    println!(
        "status={} classes={} nodes={}",
        out.status,
        out.egraph.class_count(),
        out.egraph.node_count()
    );
    if let Some(p) = &a.output {
        write(p, &write_egraph(&out.egraph))?;
    }
    if let Some(p) = &a.dot {
        write(p, &to_dot(&out.egraph))?;
    }
    Ok(budget_outcome(a.strict && out.status == Status::BudgetExceeded))
}

fn chase_run(a: ChaseRunArgs) -> Result<Outcome> {
    let deps = load_deps(&a.deps)?;
    let inst = load_instance(&a.instance)?;
    let scheduler = match a.scheduler {
        SchedulerArg::EgdFair => Scheduler::EgdFair,
        SchedulerArg::Fifo => Scheduler::Fifo,
        SchedulerArg::Random => Scheduler::Random(*a.seeds.first().ok_or_else(|| anyhow!("--seeds is empty"))?),
    };
    let out = run_standard_chase(&deps, &inst, ChaseConfig::new(scheduler, a.budget as usize))?;
    println!(
        "status={} scheduler={scheduler} steps={} atoms={}",
        out.status,
        out.steps.len(),
        out.instance.len()
    );
    if let Some(p) = &a.output {
        write(p, &write_instance(&out.instance))?;
    }
    Ok(budget_outcome(a.strict && out.status == ChaseStatus::BudgetExceeded))
}

fn skolem_run(a: SkolemRunArgs) -> Result<Outcome> {
    let deps = load_deps(&a.deps)?;
    let inst = load_instance(&a.instance)?;
    let out = run_skolem_chase(&deps, &inst, a.budget as usize)?;
    println!("status={} atoms={}", out.status, out.instance.len());
    if let Some(p) = &a.output {
        write(p, &write_instance(&out.instance))?;
    }
    Ok(budget_outcome(a.strict && out.status == ChaseStatus::BudgetExceeded))
}

fn encode_skolem(a: SkolemEncodeArgs) -> Result<Outcome> {
    let deps = load_deps(&a.deps)?;
    let inst = load_instance(&a.instance)?;
    let enc = encode_skolem_to_eqsat(&deps, &inst)?;
    let text = format!("{}; start {}\n", write_trs(&enc.trs), enc.term);
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn encode_chase(a: ChaseEncodeArgs) -> Result<Outcome> {
    let trs = load_trs(&a.trs)?;
    let g = load_graph(&a.input, Some(&trs))?;
    let enc = encode_eqsat_to_chase(&trs, &g)?;
    let deps = write_dependencies(&enc.deps);
    let inst = write_instance(&enc.instance);
    match (&a.deps_out, &a.instance_out) {
        (None, None) => print!("; dependencies\n{deps}; instance\n{inst}"),
        (d, i) => {
            emit(d.as_deref(), &deps)?;
            emit(i.as_deref(), &inst)?;
        }
    }
    Ok(Outcome::Ok)
}

fn finish_report(report: &Report, name: &str) -> Outcome {
    print!("{report}");
    println!("{}", report.summary(name));
    if report.passed() {
        Outcome::Ok
    } else {
        Outcome::VerifyFailed
    }
}

fn verify_skolem(a: VerifySkolemArgs) -> Result<Outcome> {
    let deps = load_deps(&a.deps)?;
    let inst = load_instance(&a.instance)?;
    let limits = a.limits.limits();
    let rounds = a.chase_budget.unwrap_or(limits.budget);
    let report = verify_skolem_equiv(&deps, &inst, limits, rounds)?;
    Ok(finish_report(&report, "skolem_equiv"))
}

fn verify_chase(a: VerifyChaseArgs) -> Result<Outcome> {
    let trs = load_trs(&a.trs)?;
    let g = load_graph(&a.input, Some(&trs))?;
    let config = ChaseVerifyConfig {
        limits: a.limits.limits(),
        chase_budget: a.chase_budget,
        seeds: a.seeds,
    };
    let report = verify_chase_equiv(&trs, &g, &config)?;
    Ok(finish_report(&report, "chase_equiv"))
}

fn check_acyclic(a: AcyclicArgs) -> Result<Outcome> {
    let (graph, key) = match (&a.trs, &a.deps) {
        (Some(p), None) => {
            let trs = expand_degenerate(&load_trs(p)?)?;
            (build_wtdg(&trs)?, "weak_term_acyclic")
        }
        (None, Some(p)) => (dependency_position_graph(&load_deps(p)?), "weakly_acyclic"),
        _ => bail!("give exactly one of --trs and --deps"),
    };
    match graph.special_cycle() {
        None => println!("{key}=true"),
        Some(w) => println!("{key}=false witness={w}"),
    }
    if let Some(p) = &a.dot {
        write(p, &graph.to_dot())?;
    }
    Ok(Outcome::Ok)
}

fn gen_tm(a: GenTmArgs) -> Result<Outcome> {
    let tm = parse_tm(&read(&a.tm)?).map_err(|e| anyhow!("{}: {e}", a.tm.display()))?;
    let srs = tm_to_srs(&tm);
    let trs = srs_to_trs(&srs)?;
    info!("{} string rules", srs.rules.len());
    let text = format!("{}; start {}\n", write_trs(&trs), string_to_term(&tm.initial_config()));
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn gen_pcp(a: GenPcpArgs) -> Result<Outcome> {
    let p = parse_pcp(&read(&a.pcp)?).map_err(|e| anyhow!("{}: {e}", a.pcp.display()))?;
    let trs = pcp_to_trs(&p)?;
    let text = format!("{}; start {}\n", write_trs(&trs), pcp_start_term());
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn export_dot(a: ExportDotArgs) -> Result<Outcome> {
    let dot = match (&a.trs, &a.deps, a.input.term.is_some() || a.input.egraph.is_some()) {
        (Some(p), None, false) => build_wtdg(&expand_degenerate(&load_trs(p)?)?)?.to_dot(),
        (None, Some(p), false) => dependency_position_graph(&load_deps(p)?).to_dot(),
        (None, None, true) => to_dot(&load_graph(&a.input, None)?),
        _ => bail!("give exactly one of --trs, --deps, --term and --egraph"),
    };
    emit(a.dot.as_deref(), &dot)?;
    Ok(Outcome::Ok)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Eqsat {
            action: EqsatCmd::Run(a),
        } => eqsat_run(a),
        Command::Chase {
            action: ChaseCmd::Run(a),
        } => chase_run(a),
        Command::Skolem {
            action: SkolemCmd::Run(a),
        } => skolem_run(a),
        Command::Encode { action } => match action {
            EncodeCmd::Skolem2eqsat(a) => encode_skolem(a),
            EncodeCmd::Eqsat2chase(a) => encode_chase(a),
        },
        Command::Verify { action } => match action {
            VerifyCmd::Skolem(a) => verify_skolem(a),
            VerifyCmd::Chase(a) => verify_chase(a),
        },
        Command::CheckAcyclic(a) => check_acyclic(a),
        Command::Gen { action } => match action {
            GenCmd::Tm(a) => gen_tm(a),
            GenCmd::Pcp(a) => gen_pcp(a),
        },
        Command::Export {
            action: ExportCmd::Dot(a),
        } => export_dot(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SATURACHASE_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerifyFailed) => ExitCode::from(1),
        Ok(Outcome::Budget) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
