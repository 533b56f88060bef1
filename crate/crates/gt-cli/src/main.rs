//! gt-workbench: solvers, perturbation checks, negotiation simulation and
//! dataset reports on the command line.
//!
//! Exit codes: 0 success, 1 runtime or protocol failure, 2 input error.
//! Output is deterministic: identical invocations (and seeds, for the
//! seeded modes) produce byte-identical bytes.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use gt_core::allocation::AllocationInstance;
use gt_core::belief::UpdateParams;
use gt_core::dataset;
use gt_core::exact::{format_rational, parse_rational, Rational};
use gt_core::game_core::{self, NormalFormGame, Strictness};
use gt_core::metrics::{self, OutcomeMetrics};
use gt_core::negotiation::{
    self, run_session, serialize_transcript, serve_agent, Agent, AlwaysAcceptAgent, ExternalAgent,
    GreedyAgent, NegotiationConfig, ScriptedAgent, SessionOutcome, Termination,
};
use gt_core::rng::SplitMix64;
use gt_core::tree_game::{self, backward_induction, GameTree, SolvedNode};
use gt_core::Side;
use std::io::Write;
use std::process::ExitCode;
use std::time::Duration;

const SEED_ENV: &str = "GT_WORKBENCH_SEED";

#[derive(Parser)]
#[command(name = "gt-workbench")]
#[command(about = "Game-theory solvers and a negotiation simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a normal-form game: equilibria, Pareto set, dominance.
    Solve(SolveArgs),
    /// Solve an extensive-form game by backward induction.
    Tree(TreeArgs),
    /// Transform payoffs and verify equilibrium invariance.
    Perturb(PerturbArgs),
    /// Run negotiation sessions over allocation instances.
    Negotiate(NegotiateArgs),
    /// Rank, filter and report over a record corpus.
    Dataset(DatasetArgs),
    /// Speak the agent wire protocol on stdin/stdout.
    Agent(AgentArgs),
}

#[derive(Args)]
struct GameSource {
    /// Built-in game name.
    #[arg(long, conflicts_with = "file")]
    catalog: Option<String>,
    /// Path to a game file.
    #[arg(long)]
    file: Option<String>,
    /// Jackpot for the split_steal catalog game.
    #[arg(long)]
    jackpot: Option<String>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: GameSource,
    /// Emit CSV instead of structured text.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct TreeArgs {
    /// Built-in tree name.
    #[arg(long, conflicts_with = "file")]
    catalog: Option<String>,
    /// Path to a tree literal file.
    #[arg(long)]
    file: Option<String>,
}

#[derive(Args)]
struct PerturbArgs {
    #[command(flatten)]
    source: GameSource,
    /// Verify equilibrium invariance against this game instead of
    /// transforming (catalog name or file path).
    #[arg(long)]
    verify: Option<String>,
    #[arg(long, default_value = "1")]
    scale_row: String,
    #[arg(long, default_value = "0")]
    shift_row: String,
    #[arg(long, default_value = "1")]
    scale_col: String,
    #[arg(long, default_value = "0")]
    shift_col: String,
    /// Add seeded integer noise to every payoff instead of an affine
    /// transform, then verify the result.
    #[arg(long)]
    random: bool,
    /// Noise magnitude for --random.
    #[arg(long, default_value_t = 3)]
    magnitude: i64,
    /// Seed for --random; falls back to GT_WORKBENCH_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct NegotiateArgs {
    /// One instance as `counts | row values | col values`.
    #[arg(long, conflicts_with = "records")]
    instance: Option<String>,
    /// Path to a record corpus; every valid record is played.
    #[arg(long)]
    records: Option<String>,
    /// Row and column agents: scripted, greedy, accept or
    /// external:<command line>.
    #[arg(long, default_value = "scripted,scripted")]
    agents: String,
    #[arg(long, default_value = "1")]
    lambda: String,
    #[arg(long, default_value = "1")]
    gamma: String,
    #[arg(long, default_value_t = 20)]
    max_rounds: u32,
    #[arg(long, default_value_t = 16)]
    concession_round: u32,
    #[arg(long, default_value = "row")]
    first_mover: String,
    /// Greedy agent acceptance slack.
    #[arg(long, default_value_t = 2)]
    slack: u64,
    /// Per-message timeout for external agents, in seconds.
    #[arg(long, default_value_t = 30)]
    timeout_secs: u64,
    /// Print the full transcript of every session.
    #[arg(long)]
    transcripts: bool,
    /// Include belief snapshots in printed transcripts.
    #[arg(long)]
    beliefs: bool,
}

#[derive(Args)]
struct DatasetArgs {
    /// Path to a record corpus.
    #[arg(long, required_unless_present = "synthesize")]
    records: Option<String>,
    /// Keep only records with an envy-free allocation before reporting.
    #[arg(long)]
    ef_filter: bool,
    /// Print the n hardest records with a difficulty column.
    #[arg(long)]
    top: Option<usize>,
    /// Print the cumulative human-baseline table.
    #[arg(long)]
    baseline: bool,
    /// Print the best-possible outcome per record plus the mean row.
    #[arg(long)]
    best: bool,
    /// Generate a hard synthetic corpus of this size and print it.
    #[arg(long)]
    synthesize: Option<usize>,
    /// Difficulty floor for --synthesize.
    #[arg(long, default_value_t = -4)]
    min_difficulty: i64,
    /// Seed for --synthesize; falls back to GT_WORKBENCH_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AgentArgs {
    /// scripted, greedy or accept.
    #[arg(long)]
    policy: String,
    #[arg(long, default_value = "1")]
    lambda: String,
    #[arg(long, default_value = "1")]
    gamma: String,
    #[arg(long, default_value_t = 2)]
    slack: u64,
}

/// Input problems exit 2, runtime failures exit 1.
enum CliError {
    Input(anyhow::Error),
    Runtime(anyhow::Error),
}

fn input_err(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Tree(args) => cmd_tree(args),
        Command::Perturb(args) => cmd_perturb(args),
        Command::Negotiate(args) => cmd_negotiate(args),
        Command::Dataset(args) => cmd_dataset(args),
        Command::Agent(args) => cmd_agent(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var(SEED_ENV).ok().and_then(|v| v.parse().ok()))
        .unwrap_or(0)
}

fn load_game(source: &GameSource) -> Result<NormalFormGame, CliError> {
    match (&source.catalog, &source.file) {
        (Some(name), None) => {
            if name == "split_steal" {
                if let Some(jackpot) = &source.jackpot {
                    let jackpot = parse_rational(jackpot).map_err(|e| input_err(anyhow!(e)))?;
                    return game_core::split_steal(jackpot).map_err(input_err);
                }
            }
            game_core::catalog_game(name).map_err(input_err)
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {path}"))
                .map_err(CliError::Input)?;
            game_core::parse_game(&text).map_err(input_err)
        }
        _ => Err(input_err(anyhow!(
            "provide exactly one of --catalog or --file"
        ))),
    }
}

fn load_game_by_spec(spec: &str) -> Result<NormalFormGame, CliError> {
    if game_core::catalog_names().contains(&spec) {
        game_core::catalog_game(spec).map_err(input_err)
    } else {
        let text = std::fs::read_to_string(spec)
            .with_context(|| format!("`{spec}` is neither a catalog name nor a readable file"))
            .map_err(CliError::Input)?;
        game_core::parse_game(&text).map_err(input_err)
    }
}

fn profile_label(game: &NormalFormGame, profile: &game_core::StrategyProfile) -> String {
    format!(
        "({}, {})",
        game.actions(Side::Row)[profile.row],
        game.actions(Side::Col)[profile.col]
    )
}

fn strictness_label(s: Strictness) -> &'static str {
    match s {
        Strictness::Strict => "strict",
        Strictness::Weak => "weak",
    }
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let game = load_game(&args.source)?;
    let report = game_core::pure_nash_equilibria(&game);
    let dominant_row = game_core::dominant_strategy(&game, Side::Row);
    let dominant_col = game_core::dominant_strategy(&game, Side::Col);
    let elimination = game_core::iterated_elimination(&game);
    let mut out = String::new();

    if args.csv {
        out.push_str("section,row,col,detail\n");
        for (p, s) in &report.equilibria {
            out.push_str(&format!(
                "equilibrium,{},{},{}\n",
                game.actions(Side::Row)[p.row],
                game.actions(Side::Col)[p.col],
                strictness_label(*s)
            ));
        }
        for p in &report.pareto_optimal {
            out.push_str(&format!(
                "pareto_optimal,{},{},\n",
                game.actions(Side::Row)[p.row],
                game.actions(Side::Col)[p.col]
            ));
        }
        for p in &report.pareto_optimal_equilibria {
            out.push_str(&format!(
                "pareto_optimal_equilibrium,{},{},\n",
                game.actions(Side::Row)[p.row],
                game.actions(Side::Col)[p.col]
            ));
        }
    } else {
        out.push_str(&format!("game: {}\n", game.name()));
        out.push_str(&format!(
            "row_actions: {}\n",
            game.actions(Side::Row).join("; ")
        ));
        out.push_str(&format!(
            "col_actions: {}\n",
            game.actions(Side::Col).join("; ")
        ));
        out.push_str("equilibria:\n");
        if report.equilibria.is_empty() {
            out.push_str("  (none)\n");
        }
        for (p, s) in &report.equilibria {
            out.push_str(&format!(
                "  {} {}\n",
                profile_label(&game, p),
                strictness_label(*s)
            ));
        }
        out.push_str("pareto_optimal:\n");
        for p in &report.pareto_optimal {
            out.push_str(&format!("  {}\n", profile_label(&game, p)));
        }
        out.push_str("pareto_optimal_equilibria:\n");
        if report.pareto_optimal_equilibria.is_empty() {
            out.push_str("  (none)\n");
        }
        for p in &report.pareto_optimal_equilibria {
            out.push_str(&format!("  {}\n", profile_label(&game, p)));
        }
        for (side, dominant) in [(Side::Row, &dominant_row), (Side::Col, &dominant_col)] {
            match dominant {
                Some((action, s)) => out.push_str(&format!(
                    "dominant_{side}: {} {}\n",
                    game.actions(side)[*action],
                    strictness_label(*s)
                )),
                None => out.push_str(&format!("dominant_{side}: (none)\n")),
            }
        }
        out.push_str("elimination_trace:\n");
        if elimination.trace.is_empty() {
            out.push_str("  (no strictly dominated actions)\n");
        }
        for step in &elimination.trace {
            out.push_str(&format!(
                "  remove {} {} (dominated by {})\n",
                step.side,
                game.actions(step.side)[step.action],
                game.actions(step.side)[step.dominated_by]
            ));
        }
        out.push_str(&format!(
            "reduced_shape: {}x{}\n",
            elimination.reduced.rows(),
            elimination.reduced.cols()
        ));
        // Flag the dilemma structure: dominant strategies that settle on
        // an equilibrium outside the Pareto set.
        let all_ne_inefficient =
            !report.equilibria.is_empty() && report.pareto_optimal_equilibria.is_empty();
        if all_ne_inefficient && dominant_row.is_some() && dominant_col.is_some() {
            out.push_str(
                "note: prisoners-dilemma structure (dominant-strategy equilibrium is not Pareto-optimal)\n",
            );
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_tree(args: TreeArgs) -> Result<(), CliError> {
    let tree: GameTree = match (&args.catalog, &args.file) {
        (Some(name), None) => tree_game::catalog_tree(name).map_err(input_err)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {path}"))
                .map_err(CliError::Input)?;
            tree_game::parse_tree(&text).map_err(input_err)?
        }
        _ => {
            return Err(input_err(anyhow!(
                "provide exactly one of --catalog or --file"
            )))
        }
    };
    let solved = backward_induction(&tree);
    let mut out = String::new();
    out.push_str(&format!("players: {}\n", solved.players.join("; ")));
    out.push_str("decisions:\n");
    fn walk(node: &SolvedNode, path: &str, out: &mut String) {
        if let SolvedNode::Decision {
            mover,
            values,
            chosen,
            children,
        } = node
        {
            let here = if path.is_empty() { "root" } else { path };
            out.push_str(&format!(
                "  {here} ({mover}): choose {} -> values {}, {}\n",
                children[*chosen].0,
                format_rational(&values[0]),
                format_rational(&values[1])
            ));
            for (label, child) in children {
                let next = if path.is_empty() {
                    label.clone()
                } else {
                    format!("{path}/{label}")
                };
                walk(child, &next, out);
            }
        }
    }
    walk(&solved.root, "", &mut out);
    out.push_str(&format!(
        "principal_path: {}\n",
        solved.principal_path.join(" -> ")
    ));
    out.push_str(&format!(
        "outcome: {}, {}\n",
        format_rational(&solved.outcome[0]),
        format_rational(&solved.outcome[1])
    ));
    print!("{out}");
    Ok(())
}

fn cmd_perturb(args: PerturbArgs) -> Result<(), CliError> {
    let game = load_game(&args.source)?;
    let (second, emit_game) = if let Some(other) = &args.verify {
        (load_game_by_spec(other)?, false)
    } else if args.random {
        let mut rng = SplitMix64::new(resolve_seed(args.seed));
        let noisy = apply_noise(&game, &mut rng, args.magnitude).map_err(input_err)?;
        (noisy, true)
    } else {
        let parse = |s: &str| parse_rational(s).map_err(|e| input_err(anyhow!(e)));
        let transform = game_core::AffineTransform {
            scale_row: parse(&args.scale_row)?,
            shift_row: parse(&args.shift_row)?,
            scale_col: parse(&args.scale_col)?,
            shift_col: parse(&args.shift_col)?,
        };
        let transformed =
            game_core::ne_invariant_transform(&game, &transform).map_err(input_err)?;
        (transformed, true)
    };
    let verdict = game_core::verify_ne_invariance(&game, &second).map_err(input_err)?;
    let mut out = String::new();
    if emit_game {
        out.push_str(&game_core::serialize_game(&second));
    }
    out.push_str(&format!("invariant: {}\n", verdict.invariant));
    let render = |game: &NormalFormGame, set: &[game_core::StrategyProfile]| {
        if set.is_empty() {
            "(none)".to_string()
        } else {
            set.iter()
                .map(|p| profile_label(game, p))
                .collect::<Vec<_>>()
                .join(" ")
        }
    };
    out.push_str(&format!("ne_first: {}\n", render(&game, &verdict.ne_first)));
    out.push_str(&format!(
        "ne_second: {}\n",
        render(&second, &verdict.ne_second)
    ));
    print!("{out}");
    Ok(())
}

fn apply_noise(
    game: &NormalFormGame,
    rng: &mut SplitMix64,
    magnitude: i64,
) -> Result<NormalFormGame, game_core::GameError> {
    let payoffs = (0..game.rows())
        .map(|r| {
            (0..game.cols())
                .map(|c| {
                    let (u, v) = game.payoff_pair(r, c);
                    (
                        u + Rational::from_integer(rng.in_range(-magnitude, magnitude).into()),
                        v + Rational::from_integer(rng.in_range(-magnitude, magnitude).into()),
                    )
                })
                .collect()
        })
        .collect();
    NormalFormGame::new(
        game.name(),
        game.actions(Side::Row).to_vec(),
        game.actions(Side::Col).to_vec(),
        payoffs,
    )
}

enum AgentSpec {
    Scripted,
    Greedy,
    Accept,
    External(Vec<String>),
}

fn parse_agent_spec(text: &str) -> Result<AgentSpec, CliError> {
    let text = text.trim();
    if let Some(command) = text.strip_prefix("external:") {
        let parts: Vec<String> = command.split_whitespace().map(|s| s.to_string()).collect();
        if parts.is_empty() {
            return Err(input_err(anyhow!("external agent needs a command")));
        }
        return Ok(AgentSpec::External(parts));
    }
    match text {
        "scripted" => Ok(AgentSpec::Scripted),
        "greedy" => Ok(AgentSpec::Greedy),
        "accept" => Ok(AgentSpec::Accept),
        other => Err(input_err(anyhow!(
            "unknown agent spec `{other}` (scripted, greedy, accept, external:<command>)"
        ))),
    }
}

fn build_agent(
    spec: &AgentSpec,
    instance: &AllocationInstance,
    side: Side,
    params: &UpdateParams,
    slack: u64,
    timeout: Duration,
) -> Box<dyn Agent> {
    let valuation = instance.valuation(side).clone();
    match spec {
        AgentSpec::Scripted => Box::new(ScriptedAgent::new(valuation, params.clone())),
        AgentSpec::Greedy => Box::new(GreedyAgent::new(valuation, slack)),
        AgentSpec::Accept => Box::new(AlwaysAcceptAgent::new(valuation)),
        AgentSpec::External(command) => {
            Box::new(ExternalAgent::new(command.clone(), valuation, timeout))
        }
    }
}

fn cmd_negotiate(args: NegotiateArgs) -> Result<(), CliError> {
    let instances: Vec<AllocationInstance> = if let Some(line) = &args.instance {
        let parsed = dataset::parse_records(line);
        if let Some(d) = parsed.diagnostics.first() {
            return Err(input_err(anyhow!("bad instance: {}", d.message)));
        }
        parsed.records.iter().map(|r| r.instance()).collect()
    } else if let Some(path) = &args.records {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {path}"))
            .map_err(CliError::Input)?;
        let parsed = dataset::parse_records(&text);
        for d in &parsed.diagnostics {
            eprintln!("line {}: {}", d.line, d.message);
        }
        if parsed.records.is_empty() {
            return Err(input_err(anyhow!("no valid records")));
        }
        parsed.records.iter().map(|r| r.instance()).collect()
    } else {
        return Err(input_err(anyhow!("provide --instance or --records")));
    };

    let specs: Vec<&str> = args.agents.splitn(2, ',').collect();
    if specs.len() != 2 {
        return Err(input_err(anyhow!(
            "--agents needs two comma-separated specs"
        )));
    }
    let spec_row = parse_agent_spec(specs[0])?;
    let spec_col = parse_agent_spec(specs[1])?;
    let params = UpdateParams::new(
        parse_rational(&args.lambda).map_err(|e| input_err(anyhow!(e)))?,
        parse_rational(&args.gamma).map_err(|e| input_err(anyhow!(e)))?,
    )
    .map_err(input_err)?;
    let config = NegotiationConfig {
        max_rounds: args.max_rounds,
        concession_round: args.concession_round,
        first_mover: args
            .first_mover
            .parse::<Side>()
            .map_err(|e| input_err(anyhow!(e)))?,
        params_row: params.clone(),
        params_col: params.clone(),
    };
    let timeout = Duration::from_secs(args.timeout_secs);

    let mut outcomes: Vec<OutcomeMetrics> = Vec::new();
    let mut protocol_failure = false;
    let mut out = String::new();
    for (index, instance) in instances.iter().enumerate() {
        let mut row = build_agent(&spec_row, instance, Side::Row, &params, args.slack, timeout);
        let mut col = build_agent(&spec_col, instance, Side::Col, &params, args.slack, timeout);
        let transcript = run_session(instance, row.as_mut(), col.as_mut(), &config)
            .map_err(|e| input_err(anyhow!(e.to_string())))?;
        let m = metrics::score_outcome(instance, &transcript);
        out.push_str(&format!(
            "instance {}: {}\n",
            index + 1,
            dataset::format_instance_line(instance)
        ));
        match &transcript.outcome {
            SessionOutcome::Agreed(a) => out.push_str(&format!(
                "outcome: agreed {}\n",
                negotiation::format_allocation(a)
            )),
            SessionOutcome::NoAgreement => out.push_str("outcome: no_agreement\n"),
        }
        if let Termination::Protocol { side, message } = &transcript.termination {
            out.push_str(&format!("protocol_error: {side}: {message}\n"));
            protocol_failure = true;
        }
        out.push_str(&format!("metrics: {}\n", m.to_csv_row()));
        if args.transcripts {
            out.push_str("transcript:\n");
            for line in serialize_transcript(&transcript, args.beliefs).lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        outcomes.push(m);
    }
    out.push_str(&format!("aggregate: count={}\n", outcomes.len()));
    out.push_str(metrics::OUTCOME_CSV_HEADER);
    out.push('\n');
    let summary = metrics::aggregate_outcomes(&outcomes).map_err(|e| input_err(anyhow!(e)))?;
    out.push_str(&summary.to_csv_row());
    out.push('\n');
    print!("{out}");
    if protocol_failure {
        return Err(CliError::Runtime(anyhow!(
            "one or more sessions aborted with a protocol error"
        )));
    }
    Ok(())
}

fn cmd_dataset(args: DatasetArgs) -> Result<(), CliError> {
    if let Some(n) = args.synthesize {
        let records = dataset::synthesize_hard_set(n, resolve_seed(args.seed), args.min_difficulty);
        print!("{}", dataset::serialize_records(&records));
        return Ok(());
    }
    let path = args.records.as_ref().expect("clap enforces records");
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {path}"))
        .map_err(CliError::Input)?;
    let parsed = dataset::parse_records(&text);
    for d in &parsed.diagnostics {
        eprintln!("line {}: {}", d.line, d.message);
    }
    if parsed.records.is_empty() {
        return Err(input_err(anyhow!("no records")));
    }
    let records = if args.ef_filter {
        dataset::ef_filter(&parsed.records)
    } else {
        parsed.records.clone()
    };
    let mut out = String::new();
    out.push_str(&format!(
        "records: {} valid, {} rejected, {} after filters\n",
        parsed.records.len(),
        parsed.diagnostics.len(),
        records.len()
    ));
    if let Some(n) = args.top {
        out.push_str("# difficulty | counts | row values | col values\n");
        for record in dataset::rank_by_difficulty(&records, n) {
            out.push_str(&format!(
                "{} | {}\n",
                record.difficulty(),
                dataset::format_instance_line(&record.instance())
            ));
        }
    }
    if args.baseline {
        let table = dataset::human_baseline(&records).map_err(|e| input_err(anyhow!(e)))?;
        out.push_str(&table.to_csv());
    }
    if args.best {
        out.push_str("index,score_row,score_col,total\n");
        let mut totals = Vec::new();
        for (index, record) in records.iter().enumerate() {
            match dataset::best_possible(record) {
                Ok(best) => {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        index + 1,
                        best.score_row,
                        best.score_col,
                        best.total
                    ));
                    totals.push(best);
                }
                Err(_) => out.push_str(&format!("{},,,no_envy_free_allocation\n", index + 1)),
            }
        }
        if !totals.is_empty() {
            let n = totals.len() as f64;
            let mean = |f: &dyn Fn(&dataset::BestOutcome) -> u64| {
                totals.iter().map(|b| f(b) as f64).sum::<f64>() / n
            };
            out.push_str(&format!(
                "mean,{:.2},{:.2},{:.2}\n",
                mean(&|b| b.score_row),
                mean(&|b| b.score_col),
                mean(&|b| b.total)
            ));
        }
    }
    print!("{out}");
    Ok(())
}

fn cmd_agent(args: AgentArgs) -> Result<(), CliError> {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut input = stdin.lock();
    let mut output = stdout.lock();
    let result = match args.policy.as_str() {
        "scripted" => {
            let params = UpdateParams::new(
                parse_rational(&args.lambda).map_err(|e| input_err(anyhow!(e)))?,
                parse_rational(&args.gamma).map_err(|e| input_err(anyhow!(e)))?,
            )
            .map_err(input_err)?;
            serve_agent(
                move |_setup, valuation| ScriptedAgent::new(valuation, params),
                &mut input,
                &mut output,
            )
        }
        "greedy" => serve_agent(
            move |_setup, valuation| GreedyAgent::new(valuation, args.slack),
            &mut input,
            &mut output,
        ),
        "accept" => serve_agent(
            |_setup, valuation| AlwaysAcceptAgent::new(valuation),
            &mut input,
            &mut output,
        ),
        other => return Err(input_err(anyhow!("unknown policy `{other}`"))),
    };
    output.flush().ok();
    result.map_err(|e| CliError::Runtime(anyhow!(e.to_string())))
}
