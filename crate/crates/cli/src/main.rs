use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use epirat_core::elimination::{outcome_from, render_trace, Mode, NotionProfile};
use epirat_core::epistemic::{EpistemicModel, Event, ModelClass};
use epirat_core::format::{parse_game_document, render_game};
use epirat_core::game::{Game, Restriction};
use epirat_core::harness::dump::{parse_counterexample, render_elimination, render_report};
use epirat_core::harness::generate::{generate_game, generate_model, GeneratorConfig};
use epirat_core::harness::suites::{
    find_monotonicity_violation, pearce_mismatch, suite_characterization, suite_corollary,
    suite_lemma_inc, suite_monotonicity, suite_pearce, suite_tarski, suite_theorem1,
    suite_theorem1_iii,
};
use epirat_core::harness::verify::{
    find_theorem2_witness, verify_corollary1, verify_corollary2, verify_theorem1_i,
    verify_theorem1_ii, verify_theorem1_iii, verify_theorem2, BeliefClass, Claim, Counterexample,
};
use epirat_core::harness::{replay, VerificationReport};
use epirat_core::lattice::{all_restrictions, check_inclusion_lemma, lattice_log2_size};
use epirat_core::model_format::{parse_model, render_model, validation_report};
use epirat_core::optimality::Notion;
use epirat_core::{elimination::EliminationOperator, Error};

#[derive(Parser)]
#[command(
    name = "epirat",
    version,
    about = "Iterated elimination and epistemic rationality on finite games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate T (global) or U (local) from the full game to its outcome.
    Eliminate {
        #[arg(long)]
        game: PathBuf,
        /// One notion for everyone, or a comma-separated list per player.
        #[arg(long)]
        notion: String,
        #[arg(long, value_enum, default_value = "global")]
        mode: ModeArg,
        /// Print every stage with the reason for each removal.
        #[arg(long)]
        trace: bool,
        /// Write a key=value record of the run.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Evaluate events of an epistemic model.
    Epistemic {
        #[arg(long)]
        game: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "brp")]
        profile: String,
        #[command(subcommand)]
        query: Query,
    },
    /// Check a claim on one instance (with --game) or on a seeded suite.
    Verify {
        #[arg(value_enum)]
        claim: ClaimArg,
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Notion profile; suites without one run every applicable notion.
        #[arg(long)]
        profile: Option<String>,
        /// Joint strategy for thm2, e.g. `U,L`; searched for when absent.
        #[arg(long)]
        joint: Option<String>,
        #[arg(long, value_enum, default_value = "correlated")]
        belief_class: BeliefArg,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Re-run the counterexamples stored in a dump; exit 1 if any reproduces.
    Replay { dump: PathBuf },
    /// Print a seeded random game or model in the text formats.
    Generate {
        #[arg(value_enum)]
        what: GenerateArg,
        #[arg(long)]
        seed: u64,
        /// Player count or range, e.g. `2` or `2-3`.
        #[arg(long, default_value = "2-3")]
        players: String,
        #[arg(long, default_value = "1-4")]
        strategies: String,
        #[arg(long, default_value = "1-8")]
        states: String,
        /// Integer payoff range.
        #[arg(long, default_value = "0-3")]
        payoffs: String,
        #[arg(long, value_enum, default_value = "belief")]
        class: ClassArg,
        /// Game for `generate model`; defaults to the game with the same seed and flags.
        #[arg(long)]
        game: Option<PathBuf>,
        /// Lift the default size caps.
        #[arg(long)]
        uncapped: bool,
    },
}

#[derive(Subcommand)]
enum Query {
    /// The event RAT(profile) and its projection.
    Rat,
    /// box* of an event: `rat`, `all`, or state labels like `a,b`.
    Commonbox { event: String },
    /// Which of properties (i)-(iii) each correspondence has.
    Validate,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Global,
    Local,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ClaimArg {
    Thm1i,
    Thm1ii,
    Thm1iii,
    Thm2,
    Cor1,
    Cor2,
    Pearce,
    LemmaInc,
    Monotonicity,
    Tarski,
    Characterization,
}

#[derive(Clone, Copy, ValueEnum)]
enum BeliefArg {
    Point,
    Independent,
    Correlated,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateArg {
    Game,
    Model,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Belief,
    Knowledge,
}

const MONOTONIC: [Notion; 4] = [
    Notion::Sd,
    Notion::Msd,
    Notion::BrPoint,
    Notion::BrCorrelated,
];
const ALL_TWO_SIDED: [Notion; 6] = [
    Notion::Sd,
    Notion::Wd,
    Notion::Msd,
    Notion::Mwd,
    Notion::BrPoint,
    Notion::BrCorrelated,
];

type CliResult<T> = Result<T, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn core<T>(r: Result<T, Error>) -> CliResult<T> {
    r.map_err(|e| e.to_string())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_game(path: &Path) -> CliResult<(Game, Option<Restriction>)> {
    let doc = parse_game_document(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((doc.game, doc.restriction))
}

fn load_model(game: &Game, path: &Path) -> CliResult<EpistemicModel> {
    parse_model(game, &read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Eliminate {
            game,
            notion,
            mode,
            trace,
            dump,
        } => {
            let (game, start) = load_game(&game)?;
            let profile = core(NotionProfile::parse(&notion, game.num_players()))?;
            let mode = match mode {
                ModeArg::Global => Mode::Global,
                ModeArg::Local => Mode::Local,
            };
            let start = start.unwrap_or_else(|| game.full());
            let result = core(outcome_from(&profile, &game, mode, &start))?;
            if trace {
                print!("{}", render_trace(&game, &result));
            } else {
                println!("outcome: {}", game.show(result.outcome()));
            }
            if let Some(path) = dump {
                write(&path, &render_elimination(&game, &profile, mode, &result))?;
            }
            Ok(true)
        }
        Command::Epistemic {
            game,
            model,
            profile,
            query,
        } => {
            let (game, _) = load_game(&game)?;
            let model = load_model(&game, &model)?;
            epistemic(&game, &model, &profile, query)
        }
        Command::Verify {
            claim,
            game,
            model,
            profile,
            joint,
            belief_class,
            samples,
            seed,
            dump,
        } => {
            let args = VerifyArgs {
                claim,
                profile,
                joint,
                belief_class,
                samples,
                seed,
            };
            let reports = match game {
                Some(path) => {
                    let (game, _) = load_game(&path)?;
                    let model = model.map(|m| load_model(&game, &m)).transpose()?;
                    verify_single(&args, &game, model.as_ref())?
                }
                None if model.is_some() => return Err("--model needs --game".into()),
                None => verify_suite(&args)?,
            };
            for r in &reports {
                print_report(r);
            }
            if let Some(path) = dump {
                let text: Vec<String> = reports.iter().map(render_report).collect();
                write(&path, &text.join("\n"))?;
            }
            Ok(reports.iter().all(VerificationReport::holds))
        }
        Command::Replay { dump } => {
            let text = read(&dump)?;
            let mut reproduced = 0;
            let mut total = 0;
            for record in text.split("\n\n").filter(|r| r.contains("cx.claim=")) {
                let cx = core(parse_counterexample(record))?;
                let again = core(replay(&cx))?;
                total += 1;
                reproduced += usize::from(again);
                println!(
                    "{}: {}",
                    cx.claim,
                    if again {
                        "reproduced"
                    } else {
                        "not reproduced"
                    }
                );
            }
            if total == 0 {
                println!("no counterexamples in {}", dump.display());
            }
            Ok(reproduced == 0)
        }
        Command::Generate {
            what,
            seed,
            players,
            strategies,
            states,
            payoffs,
            class,
            game,
            uncapped,
        } => {
            let (p_lo, p_hi) = range(&players)?;
            let (s_lo, s_hi) = range(&strategies)?;
            let (w_lo, w_hi) = range(&states)?;
            let (v_lo, v_hi) = range(&payoffs)?;
            let mut cfg = GeneratorConfig::default()
                .with_seed(seed)
                .with_players(p_lo, p_hi)
                .with_strategies(s_lo, s_hi)
                .with_states(w_lo, w_hi)
                .with_integer_payoffs(v_lo as i64, v_hi as i64)
                .with_target(match class {
                    ClassArg::Belief => ModelClass::Belief,
                    ClassArg::Knowledge => ModelClass::Knowledge,
                });
            cfg.uncapped = uncapped;
            core(cfg.validate())?;
            let game = match game {
                Some(path) => load_game(&path)?.0,
                None => core(generate_game(&cfg))?,
            };
            match what {
                GenerateArg::Game => print!("{}", render_game(&game)),
                GenerateArg::Model => print!(
                    "{}",
                    render_model(&game, &core(generate_model(&cfg, &game))?)
                ),
            }
            Ok(true)
        }
    }
}

fn range(text: &str) -> CliResult<(usize, usize)> {
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad range `{text}`"))
    };
    match text.split_once('-') {
        Some((lo, hi)) => Ok((parse(lo)?, parse(hi)?)),
        None => parse(text).map(|v| (v, v)),
    }
}

/// State labels separated by whitespace; a token that is not a label is
/// split further on commas.
fn parse_event(model: &EpistemicModel, text: &str) -> CliResult<Event> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let frame = model.frame();
    let mut e = Event::empty(model.num_states());
    for token in inner.split_whitespace() {
        let labels: Vec<&str> = match frame.state_index(token) {
            Some(_) => vec![token],
            None => token.split(',').filter(|l| !l.is_empty()).collect(),
        };
        for label in labels {
            let w = frame
                .state_index(label)
                .ok_or_else(|| format!("unknown state `{label}`"))?;
            e.insert(w);
        }
    }
    Ok(e)
}

fn epistemic(game: &Game, model: &EpistemicModel, profile: &str, query: Query) -> CliResult<bool> {
    let frame = model.frame();
    if let Query::Validate = query {
        print!("{}", validation_report(model));
        return Ok(model.class() != ModelClass::Invalid);
    }
    if model.class() == ModelClass::Invalid {
        eprint!("{}", validation_report(model));
        return Err("the model is not a belief model".into());
    }
    let profile = core(NotionProfile::parse(profile, game.num_players()))?;
    match query {
        Query::Rat => {
            let rat = core(model.rat_event(game, &profile))?;
            println!("RAT({profile}) = {}", frame.render_event(&rat));
            println!(
                "restriction: {}",
                game.show(&model.restriction_of_event(&rat))
            );
        }
        Query::Commonbox { event } => {
            let e = match event.as_str() {
                "rat" => core(model.rat_event(game, &profile))?,
                "all" => model.full_event(),
                other => parse_event(model, other)?,
            };
            let cb = core(model.common_box_chain(&e))?;
            let name = if model.class() == ModelClass::Knowledge {
                "K*"
            } else {
                "B*"
            };
            println!("E = {}", frame.render_event(&e));
            for (k, step) in cb.chain.iter().enumerate() {
                println!("box^{} E = {}", k + 1, frame.render_event(step));
            }
            match cb.stabilized_at {
                Some(k) => println!("stable from k = {k}"),
                None => println!("chain repeats without stabilizing"),
            }
            println!("{name} E = {}", frame.render_event(&cb.event));
            println!("evident: {}", core(model.is_evident(&cb.event))?);
            println!(
                "restriction: {}",
                game.show(&model.restriction_of_event(&cb.event))
            );
        }
        Query::Validate => unreachable!(),
    }
    Ok(true)
}

struct VerifyArgs {
    claim: ClaimArg,
    profile: Option<String>,
    joint: Option<String>,
    belief_class: BeliefArg,
    samples: Option<usize>,
    seed: u64,
}

impl VerifyArgs {
    fn class(&self) -> BeliefClass {
        match self.belief_class {
            BeliefArg::Point => BeliefClass::Point,
            BeliefArg::Independent => BeliefClass::Independent,
            BeliefArg::Correlated => BeliefClass::Correlated,
        }
    }

    /// Uniform notions requested for a suite, or `defaults`.
    fn notions(&self, defaults: &[Notion]) -> CliResult<Vec<Notion>> {
        match &self.profile {
            None => Ok(defaults.to_vec()),
            Some(p) => p
                .split(',')
                .map(|t| core(t.trim().parse::<Notion>()))
                .collect(),
        }
    }

    fn profile(&self, game: &Game, default: Notion) -> CliResult<NotionProfile> {
        match &self.profile {
            None => Ok(NotionProfile::uniform(default, game.num_players())),
            Some(p) => core(NotionProfile::parse(p, game.num_players())),
        }
    }
}

fn need_model(model: Option<&EpistemicModel>) -> CliResult<&EpistemicModel> {
    model.ok_or_else(|| "this claim needs --model".to_string())
}

fn parse_joint(game: &Game, text: &str) -> CliResult<Vec<usize>> {
    let labels: Vec<&str> = text.split(',').map(str::trim).collect();
    if labels.len() != game.num_players() {
        return Err(format!("`{text}` does not name one strategy per player"));
    }
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            game.strategy_index(i, l)
                .ok_or_else(|| format!("unknown strategy `{l}` for player {}", i + 1))
        })
        .collect()
}

fn verify_single(
    args: &VerifyArgs,
    game: &Game,
    model: Option<&EpistemicModel>,
) -> CliResult<Vec<VerificationReport>> {
    let started = std::time::Instant::now();
    let single = |claim: &str, failure: Option<Counterexample>, instances: usize| match failure {
        None => VerificationReport {
            claim: claim.to_string(),
            instances_checked: instances,
            verdict: epirat_core::harness::Verdict::HoldsOnAll,
            counterexample: None,
            seed: None,
            runtime: started.elapsed(),
        },
        Some(cx) => VerificationReport {
            claim: claim.to_string(),
            instances_checked: instances,
            verdict: epirat_core::harness::Verdict::Counterexample,
            counterexample: Some(Box::new(cx)),
            seed: None,
            runtime: started.elapsed(),
        },
    };
    Ok(match args.claim {
        ClaimArg::Thm1i => vec![core(verify_theorem1_i(
            game,
            need_model(model)?,
            &args.profile(game, Notion::BrPoint)?,
        ))?],
        ClaimArg::Thm1ii => vec![core(verify_theorem1_ii(
            game,
            need_model(model)?,
            &args.profile(game, Notion::BrPoint)?,
        ))?],
        ClaimArg::Thm1iii => vec![core(verify_theorem1_iii(
            game,
            &args.profile(game, Notion::BrPoint)?,
        ))?],
        ClaimArg::Thm2 => {
            let profile = args.profile(game, Notion::Wd)?;
            let joint = match &args.joint {
                Some(text) => Some(parse_joint(game, text)?),
                None => core(find_theorem2_witness(game, &profile))?,
            };
            match joint {
                Some(s) => {
                    println!(
                        "joint strategy {} meets the hypothesis",
                        game.show_joint(&s)
                    );
                    vec![core(verify_theorem2(game, &profile, &s))?]
                }
                None => {
                    println!("no joint strategy meets the hypothesis");
                    vec![single("thm2", None, game.joint_strategies().len())]
                }
            }
        }
        ClaimArg::Cor1 => vec![core(verify_corollary1(game, need_model(model)?))?],
        ClaimArg::Cor2 => vec![core(verify_corollary2(
            game,
            need_model(model)?,
            args.class(),
        ))?],
        ClaimArg::Pearce => {
            let points = if lattice_log2_size(game) <= 12 {
                core(all_restrictions(game, 12))?
            } else {
                let mut rng =
                    <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(args.seed);
                (0..args.samples.unwrap_or(500))
                    .map(|_| epirat_core::lattice::random_restriction(game, &mut rng))
                    .collect()
            };
            let mut failure = None;
            for g in &points {
                if core(pearce_mismatch(game, g))? {
                    let mut cx = Counterexample::bare(
                        Claim::Pearce,
                        game,
                        format!("U_brc and U_msd disagree at {}", game.show(g)),
                    );
                    cx.restriction = Some(g.clone());
                    failure = Some(cx);
                    break;
                }
            }
            vec![single("pearce", failure, points.len())]
        }
        ClaimArg::LemmaInc => {
            let pairs = match &args.profile {
                None => vec![(Notion::BrPoint, Notion::Sd), (Notion::Msd, Notion::Msd)],
                Some(text) => {
                    let (a, b) = text
                        .split_once(',')
                        .ok_or("lemma-inc takes --profile FIRST,SECOND")?;
                    vec![(core(a.trim().parse())?, core(b.trim().parse())?)]
                }
            };
            let mut out = Vec::new();
            for (a, b) in pairs {
                let profile = NotionProfile::uniform(a, game.num_players());
                let op1 = core(EliminationOperator::new(
                    game,
                    profile.clone(),
                    Mode::Global,
                ))?;
                let op2 = core(EliminationOperator::local(game, b))?;
                let label = format!("lemma-inc[T_{a},U_{b}]");
                let failure = match check_inclusion_lemma(
                    &op1,
                    &op2,
                    game,
                    args.samples.unwrap_or(64),
                    args.seed,
                ) {
                    Ok(r) if r.conclusion_holds => None,
                    Ok(r) => Some(format!(
                        "{} is not included in {}",
                        game.show(&r.op1_outcome),
                        game.show(&r.op2_outcome)
                    )),
                    Err(Error::PremiseViolated { premise, witness }) => Some(format!(
                        "premise fails at {}: {premise}",
                        game.show(&witness)
                    )),
                    Err(e) => return Err(e.to_string()),
                };
                let failure = failure.map(|note| {
                    let mut cx = Counterexample::bare(Claim::LemmaInc, game, note);
                    cx.profile = Some(profile);
                    cx.secondary = Some(b);
                    cx.instance_seed = Some(args.seed);
                    cx
                });
                out.push(single(&label, failure, 1));
            }
            out
        }
        ClaimArg::Monotonicity => {
            let mut out = Vec::new();
            for notion in args.notions(&MONOTONIC)? {
                let witness = core(find_monotonicity_violation(game, notion))?;
                out.push(single(
                    &format!("monotonicity[{notion}]"),
                    witness.map(|w| w.counterexample(game, notion)),
                    1,
                ));
            }
            out
        }
        ClaimArg::Tarski => {
            let mut out = Vec::new();
            for notion in args.notions(&MONOTONIC)? {
                let failure = core(epirat_core::harness::suites::tarski_mismatch(game, notion))?
                    .map(|(lhs, rhs)| {
                        let mut cx = Counterexample::bare(
                            Claim::Tarski,
                            game,
                            "iterated outcome differs from the largest fixpoint",
                        );
                        cx.profile = Some(NotionProfile::uniform(notion, game.num_players()));
                        cx.lhs = lhs;
                        cx.rhs = rhs;
                        cx
                    });
                out.push(single(&format!("tarski[{notion}]"), failure, 1));
            }
            out
        }
        ClaimArg::Characterization => {
            let model = need_model(model)?;
            let mut failure = None;
            let n = model.num_states();
            if n > 20 {
                return Err("characterization on a single model enumerates all events; use at most 20 states".into());
            }
            for mask in 0..(1u64 << n) {
                let e = Event::from_mask(n, mask);
                if let Some(note) = core(epirat_core::harness::suites::characterization_mismatch(
                    model, &e,
                ))? {
                    let mut cx = Counterexample::bare(Claim::Characterization, game, note);
                    cx.model = Some(model.clone());
                    cx.event = Some(e);
                    failure = Some(cx);
                    break;
                }
            }
            vec![single("characterization", failure, 1 << n)]
        }
    })
}

fn verify_suite(args: &VerifyArgs) -> CliResult<Vec<VerificationReport>> {
    let seed = args.seed;
    let samples = |default: usize| args.samples.unwrap_or(default);
    let mut out = Vec::new();
    match args.claim {
        ClaimArg::Thm1i | ClaimArg::Thm1ii => {
            let class = if args.claim == ClaimArg::Thm1i {
                ModelClass::Belief
            } else {
                ModelClass::Knowledge
            };
            for notion in args.notions(&MONOTONIC)? {
                out.push(core(suite_theorem1(notion, class, samples(1000), seed))?);
            }
        }
        ClaimArg::Thm1iii => {
            for notion in args.notions(&ALL_TWO_SIDED)? {
                out.push(core(suite_theorem1_iii(notion, samples(200), seed))?);
            }
        }
        ClaimArg::Thm2 => return Err("thm2 needs --game".into()),
        ClaimArg::Cor1 => out.push(core(suite_corollary(None, samples(1000), seed))?),
        ClaimArg::Cor2 => out.push(core(suite_corollary(
            Some(args.class()),
            samples(1000),
            seed,
        ))?),
        ClaimArg::Pearce => out.push(core(suite_pearce(samples(500), 4, seed))?),
        ClaimArg::LemmaInc => {
            out.push(core(suite_lemma_inc(
                Notion::BrPoint,
                Notion::Sd,
                samples(200),
                seed,
            ))?);
            out.push(core(suite_lemma_inc(
                Notion::Msd,
                Notion::Msd,
                samples(200),
                seed,
            ))?);
        }
        ClaimArg::Monotonicity => {
            for notion in args.notions(&MONOTONIC)? {
                out.push(core(suite_monotonicity(notion, samples(1000), seed))?);
            }
        }
        ClaimArg::Tarski => {
            for notion in args.notions(&MONOTONIC)? {
                out.push(core(suite_tarski(notion, samples(30), seed))?);
            }
        }
        ClaimArg::Characterization => {
            out.push(core(suite_characterization(4, samples(500), seed))?)
        }
    }
    Ok(out)
}

fn print_report(r: &VerificationReport) {
    let verdict = if r.holds() {
        "holds-on-all"
    } else {
        "counterexample"
    };
    let seed = r.seed.map_or("none".to_string(), |s| s.to_string());
    println!(
        "{}: {verdict} ({} instances, seed {seed}, {:.2?})",
        r.claim, r.instances_checked, r.runtime
    );
    if let Some(cx) = &r.counterexample {
        println!("  {}", cx.note);
        if let Some(s) = &cx.joint {
            if cx.claim == Claim::Thm2 {
                println!("  joint strategy: {}", cx.game.show_joint(s));
            }
        }
        if let Some(seed) = cx.instance_seed {
            println!("  instance seed: {seed}");
        }
        if let Some(m) = &cx.model {
            for line in render_model(&cx.game, m).lines() {
                println!("  | {line}");
            }
        }
    }
}
