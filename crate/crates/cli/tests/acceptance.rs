//! Acceptance criteria 1-12, one line each. Runs as a plain binary so the
//! lines are always printed; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epirat_core::elimination::{outcome_restriction, Mode, NotionProfile};
use epirat_core::epistemic::{thm1iii_model, ModelClass};
use epirat_core::format::parse_game;
use epirat_core::game::{Game, OpponentProfile, Player, Rational, StrategyId, StrategySet};
use epirat_core::harness::dump::parse_counterexample;
use epirat_core::harness::generate::{generate_game, instance_seed, GeneratorConfig};
use epirat_core::harness::replay;
use epirat_core::harness::suites::{
    all_2x2_games, find_monotonicity_violation, suite_characterization, suite_lemma_inc,
    suite_monotonicity, suite_pearce, suite_tarski, suite_theorem1, suite_theorem1_iii,
};
use epirat_core::harness::verify::{local_inclusion_sides, verify_local_inclusion};
use epirat_core::optimality::{
    holds, solve_br_lp, solve_dominance_lp, BestResponseVerdict, DominanceMode, DominanceVerdict,
    Notion,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn games_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn epirat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epirat"))
        .args(args)
        .output()
        .expect("run epirat")
}

fn load(name: &str) -> Game {
    parse_game(&std::fs::read_to_string(games_dir().join(name)).unwrap()).unwrap()
}

fn weak_dominance_game() -> Game {
    load("weak_dominance.game")
}

fn all_best_responses_game() -> Game {
    load("all_best_responses.game")
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn c1_local_weak_outcome() -> Outcome {
    let path = games_dir().join("weak_dominance.game");
    let path = path.to_str().unwrap();
    for notion in ["wd", "mwd"] {
        let out = epirat(&[
            "eliminate",
            "--game",
            path,
            "--notion",
            notion,
            "--mode",
            "local",
        ]);
        let stdout = String::from_utf8_lossy(&out.stdout);
        ensure(
            out.status.code() == Some(0),
            format!("{notion}: exit {:?}", out.status.code()),
        )?;
        ensure(
            stdout.trim() == "outcome: ({D},{R})",
            format!("{notion}: got `{}`", stdout.trim()),
        )?;
    }
    Ok("wd and mwd local outcomes are ({D},{R})".into())
}

fn c2_predicate_facts() -> Outcome {
    let g = weak_dominance_game();
    let set = |ids: &[usize]| ids.iter().copied().collect::<StrategySet>();
    let profiles = |ids: &[usize]| ids.iter().map(|&s| vec![s]).collect::<Vec<_>>();
    let wd = |i, s, own, opp: &[OpponentProfile]| holds(Notion::Wd, &g, i, s, own, opp).unwrap();
    ensure(
        wd(0, 0, set(&[0, 1]), &profiles(&[0])),
        "wd_1(U,{U,D},{L}) should hold",
    )?;
    ensure(
        wd(1, 0, set(&[0, 1]), &profiles(&[0])),
        "wd_2(L,{L,R},{U}) should hold",
    )?;
    ensure(
        !wd(0, 0, set(&[0, 1]), &profiles(&[0, 1])),
        "wd_1(U,{U,D},{L,R}) should fail",
    )?;
    Ok("wd_1(U,{U,D},{L}), wd_2(L,{L,R},{U}) true; wd_1(U,{U,D},{L,R}) false".into())
}

fn c3_theorem2_reproduction() -> Outcome {
    let path = games_dir().join("weak_dominance.game");
    let dump = std::env::temp_dir().join(format!("epirat-thm2-{}.dump", std::process::id()));
    let out = epirat(&[
        "verify",
        "thm2",
        "--game",
        path.to_str().unwrap(),
        "--profile",
        "wd",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(
        out.status.code() == Some(1),
        format!("exit {:?}, expected 1", out.status.code()),
    )?;
    ensure(
        stdout.contains("joint strategy (U,L) meets the hypothesis"),
        "witness (U,L) not found",
    )?;
    let text = std::fs::read_to_string(&dump).map_err(|e| e.to_string())?;
    let cx = parse_counterexample(&text).map_err(|e| e.to_string())?;
    ensure(
        cx.joint == Some(vec![0, 0]),
        "payload joint strategy is not (U,L)",
    )?;
    let model = cx.model.as_ref().ok_or("payload has no model")?;
    let singleton = model
        .correspondences()
        .iter()
        .all(|p| (0..model.num_states()).all(|w| p.at(w).len() == 1 && p.at(w).contains(w)));
    ensure(singleton, "model correspondences are not P_i(w) = {w}")?;
    ensure(
        cx.game.show(&cx.rhs) == "({D},{R})",
        "T_wd outcome in payload is not ({D},{R})",
    )?;
    ensure(
        replay(&cx).map_err(|e| e.to_string())?,
        "payload does not replay",
    )?;
    let again = epirat(&["replay", dump.to_str().unwrap()]);
    ensure(
        again.status.code() == Some(1),
        "`epirat replay` did not reproduce",
    )?;
    let _ = std::fs::remove_file(&dump);
    Ok("found (U,L), singleton model, exit 1, payload replays".into())
}

fn c4_best_response_game() -> Outcome {
    let g = all_best_responses_game();
    let n = 2;
    let brp = NotionProfile::uniform(Notion::BrPoint, n);
    let t_br = outcome_restriction(&brp, &g, Mode::Global).unwrap();
    ensure(t_br == g.full(), format!("T_br^inf = {}", g.show(&t_br)))?;
    let u =
        |notion| outcome_restriction(&NotionProfile::uniform(notion, n), &g, Mode::Local).unwrap();
    let (u_wd, u_mwd) = (u(Notion::Wd), u(Notion::Mwd));
    for (name, r) in [("wd", &u_wd), ("mwd", &u_mwd)] {
        ensure(
            r.is_subset(&g.full()) && r != &g.full(),
            format!("U_{name}^inf = {} is not proper", g.show(r)),
        )?;
    }
    let model = thm1iii_model(&g, &brp).unwrap();
    let rat = model.rat_event(&g, &brp).unwrap();
    let k = model.restriction_of_event(&model.common_box(&rat).unwrap());
    ensure(k == t_br, format!("G_K*RAT(br) = {}", g.show(&k)))?;
    for local in [Notion::Wd, Notion::Mwd] {
        let check = local_inclusion_sides(&g, &model, Notion::BrPoint, local, true).unwrap();
        ensure(
            !check.holds(),
            format!("G_K*RAT(br) is included in U_{local}^inf"),
        )?;
        let report = verify_local_inclusion(&g, &model, Notion::BrPoint, local).unwrap();
        ensure(
            !report.holds(),
            format!("verify_local_inclusion({local}) reports holds"),
        )?;
    }
    Ok(format!(
        "T_br^inf = full; U_wd^inf = {}, U_mwd^inf = {}; G_K*RAT(br) = T_br^inf, in neither",
        g.show(&u_wd),
        g.show(&u_mwd)
    ))
}

const MONOTONIC: [Notion; 4] = [
    Notion::Sd,
    Notion::Msd,
    Notion::BrPoint,
    Notion::BrCorrelated,
];

fn c5_theorem1_suites() -> Outcome {
    let mut total = 0;
    for notion in MONOTONIC {
        for class in [ModelClass::Belief, ModelClass::Knowledge] {
            let r = suite_theorem1(notion, class, 1000, 11).map_err(|e| e.to_string())?;
            ensure(
                r.holds(),
                format!("{}: {:?}", r.claim, r.counterexample.map(|c| c.note)),
            )?;
            ensure(r.instances_checked >= 1000, "fewer than 1000 instances")?;
            total += r.instances_checked;
        }
    }
    Ok(format!(
        "{total} instances over sd, msd, brp, brc on belief and knowledge models"
    ))
}

fn c6_theorem1_iii_suite() -> Outcome {
    let notions = [
        Notion::Sd,
        Notion::Wd,
        Notion::Msd,
        Notion::Mwd,
        Notion::BrPoint,
        Notion::BrCorrelated,
    ];
    for notion in notions {
        let r = suite_theorem1_iii(notion, 200, 12).map_err(|e| e.to_string())?;
        ensure(
            r.holds(),
            format!("{}: {:?}", r.claim, r.counterexample.map(|c| c.note)),
        )?;
    }
    Ok("200 games for each of sd, wd, msd, mwd, brp, brc".into())
}

fn c7_lemma_inc() -> Outcome {
    for (a, b) in [(Notion::BrPoint, Notion::Sd), (Notion::Msd, Notion::Msd)] {
        let r = suite_lemma_inc(a, b, 200, 13).map_err(|e| e.to_string())?;
        ensure(
            r.holds(),
            format!("{}: {:?}", r.claim, r.counterexample.map(|c| c.note)),
        )?;
    }
    Ok("(T_brp, U_sd) and (T_msd, U_msd) on 200 games each".into())
}

fn c8_monotonicity() -> Outcome {
    let games = all_2x2_games(&[0, 1, 2]);
    for notion in MONOTONIC {
        for g in &games {
            if let Some(w) = find_monotonicity_violation(g, notion).map_err(|e| e.to_string())? {
                return Err(format!("{notion} fails on a 2x2 game: {w:?}"));
            }
        }
        let r = suite_monotonicity(notion, 1000, 14).map_err(|e| e.to_string())?;
        ensure(
            r.holds(),
            format!("{}: {:?}", r.claim, r.counterexample.map(|c| c.note)),
        )?;
    }
    let g = weak_dominance_game();
    let w = find_monotonicity_violation(&g, Notion::Wd)
        .map_err(|e| e.to_string())?
        .ok_or("no wd witness on the weak-dominance game")?;
    ensure(
        (w.player, w.strategy) == (0, 0)
            && g.show(&w.smaller) == "({U,D},{L})"
            && g.show(&w.larger) == "({U,D},{L,R})",
        format!("unexpected wd witness {w:?}"),
    )?;
    let found = all_2x2_games(&[0, 1])
        .into_iter()
        .filter(|h| matches!(find_monotonicity_violation(h, Notion::Wd), Ok(Some(_))))
        .any(|h| h == g);
    ensure(
        found,
        "the wd search over 0/1 games misses the weak-dominance game",
    )?;
    Ok(format!(
        "all {} 2x2 games in {{0,1,2}} plus 1000 random per notion; wd witness U on {{L}} <= {{L,R}}",
        games.len()
    ))
}

fn c9_pearce() -> Outcome {
    let r = suite_pearce(500, 4, 15).map_err(|e| e.to_string())?;
    ensure(r.holds(), format!("{:?}", r.counterexample.map(|c| c.note)))?;
    Ok(format!("{} restrictions of 500 games", r.instances_checked))
}

fn c10_characterizations() -> Outcome {
    let r = suite_characterization(4, 500, 16).map_err(|e| e.to_string())?;
    ensure(r.holds(), format!("{:?}", r.counterexample.map(|c| c.note)))?;
    Ok(format!("{} (model, event) pairs", r.instances_checked))
}

fn c11_tarski() -> Outcome {
    for notion in MONOTONIC {
        let r = suite_tarski(notion, 60, 17).map_err(|e| e.to_string())?;
        ensure(
            r.holds(),
            format!("{}: {:?}", r.claim, r.counterexample.map(|c| c.note)),
        )?;
    }
    Ok("60 games per notion, lattices up to 2^12".into())
}

/// All weight vectors with entries `k/12` summing to one.
fn grid(dim: usize) -> Vec<Vec<Rational>> {
    fn rec(left: i64, slots: usize, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            rec(left - k, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    rec(12, dim, &mut Vec::new(), &mut raw);
    raw.into_iter()
        .map(|v| {
            v.into_iter()
                .map(|k| Rational::new(k.into(), 12.into()))
                .collect()
        })
        .collect()
}

fn mixed_payoff(
    g: &Game,
    i: Player,
    weights: &[(StrategyId, Rational)],
    o: &OpponentProfile,
) -> Rational {
    weights
        .iter()
        .fold(int(0), |acc, (s, w)| acc + w * g.payoff_against(i, *s, o))
}

fn dominates(
    g: &Game,
    i: Player,
    s: StrategyId,
    weights: &[(StrategyId, Rational)],
    opponents: &[OpponentProfile],
    mode: DominanceMode,
) -> bool {
    let diffs: Vec<Rational> = opponents
        .iter()
        .map(|o| mixed_payoff(g, i, weights, o) - g.payoff_against(i, s, o))
        .collect();
    match mode {
        DominanceMode::Strict => diffs.iter().all(|d| d > &int(0)),
        DominanceMode::Weak => {
            diffs.iter().all(|d| d >= &int(0)) && diffs.iter().any(|d| d > &int(0))
        }
    }
}

fn best_reply_to(
    g: &Game,
    i: Player,
    s: StrategyId,
    own: StrategySet,
    belief: &[(OpponentProfile, Rational)],
) -> bool {
    let value = |t: StrategyId| {
        belief
            .iter()
            .fold(int(0), |acc, (o, w)| acc + w * g.payoff_against(i, t, o))
    };
    let mine = value(s);
    own.iter().all(|t| mine >= value(t))
}

fn c12_lp_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(18);
    let (mut positive, mut negative_grid) = (0, 0);
    for k in 0..600u64 {
        let cfg = GeneratorConfig::default()
            .with_seed(instance_seed(18, k))
            .with_strategies(1, 4);
        let g = generate_game(&cfg).map_err(|e| e.to_string())?;
        let i = rng.gen_range(0..g.num_players());
        let s = rng.gen_range(0..g.num_strategies(i));
        let mut opp = g.full();
        for j in (0..g.num_players()).filter(|&j| j != i) {
            let full = StrategySet::full(g.num_strategies(j)).bits();
            let mask = loop {
                let m = rng.gen::<u64>() & full;
                if m != 0 {
                    break m;
                }
            };
            opp.set_component(j, StrategySet::from_bits(mask));
        }
        let opponents = opp.opponents_product(i);
        let support = loop {
            let m = rng.gen::<u64>() & StrategySet::full(g.num_strategies(i)).bits();
            if m != 0 {
                break StrategySet::from_bits(m);
            }
        };
        for mode in [DominanceMode::Strict, DominanceMode::Weak] {
            match solve_dominance_lp(&g, i, s, support, &opponents, mode)
                .map_err(|e| e.to_string())?
            {
                DominanceVerdict::Dominated { witness, .. } => {
                    let weights: Vec<_> = witness
                        .weights()
                        .iter()
                        .map(|(s, w)| (*s, w.clone()))
                        .collect();
                    let total = weights.iter().fold(int(0), |a, (_, w)| a + w);
                    ensure(total == int(1), "witness weights do not sum to 1")?;
                    ensure(
                        weights
                            .iter()
                            .all(|(t, w)| support.contains(*t) && w >= &int(0)),
                        "witness outside support",
                    )?;
                    ensure(
                        dominates(&g, i, s, &weights, &opponents, mode),
                        format!("{mode:?} witness fails at instance {k}"),
                    )?;
                    positive += 1;
                }
                DominanceVerdict::NotDominated if support.len() <= 6 => {
                    let ids: Vec<StrategyId> = support.iter().collect();
                    for w in grid(ids.len()) {
                        let weights: Vec<_> = ids.iter().copied().zip(w).collect();
                        ensure(
                            !dominates(&g, i, s, &weights, &opponents, mode),
                            format!("grid refutes {mode:?} verdict at instance {k}"),
                        )?;
                    }
                    negative_grid += 1;
                }
                DominanceVerdict::NotDominated => {}
            }
        }
        let own = support;
        match solve_br_lp(&g, i, s, own, &opponents).map_err(|e| e.to_string())? {
            BestResponseVerdict::BestResponse(belief) => {
                let atoms = belief.atoms();
                let total = atoms.iter().fold(int(0), |a, (_, w)| a + w);
                ensure(
                    total == int(1)
                        && atoms
                            .iter()
                            .all(|(o, w)| w >= &int(0) && opponents.contains(o)),
                    "belief is not a distribution on G_-i",
                )?;
                ensure(
                    best_reply_to(&g, i, s, own, &atoms),
                    format!("belief witness fails at instance {k}"),
                )?;
                positive += 1;
            }
            BestResponseVerdict::NotBestResponse if opponents.len() <= 6 => {
                for w in grid(opponents.len()) {
                    let belief: Vec<_> = opponents.iter().cloned().zip(w).collect();
                    ensure(
                        !best_reply_to(&g, i, s, own, &belief),
                        format!("grid refutes br verdict at instance {k}"),
                    )?;
                }
                negative_grid += 1;
            }
            BestResponseVerdict::NotBestResponse => {}
        }
    }
    Ok(format!("{positive} witnesses re-verified exactly, {negative_grid} negative verdicts survive the 1/12 grid"))
}

fn main() {
    let criteria: [Criterion; 12] = [
        (
            "local wd/mwd outcome on the weak-dominance game",
            c1_local_weak_outcome,
        ),
        ("weak-dominance predicate facts", c2_predicate_facts),
        (
            "singleton-model counterexample for wd",
            c3_theorem2_reproduction,
        ),
        (
            "best-response game versus U_wd and U_mwd",
            c4_best_response_game,
        ),
        (
            "common belief/knowledge inclusion suites",
            c5_theorem1_suites,
        ),
        ("constructed knowledge model suite", c6_theorem1_iii_suite),
        ("comparison lemma suite", c7_lemma_inc),
        ("predicate monotonicity", c8_monotonicity),
        ("U_brc = U_msd", c9_pearce),
        ("common-box characterizations", c10_characterizations),
        ("Tarski agreement", c11_tarski),
        ("exact LP verdicts", c12_lp_exactness),
    ];
    let started = Instant::now();
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!(
                "criterion {:>2}: PASS  {name}: {detail} [{:.2?}]",
                k + 1,
                t.elapsed()
            ),
            Err(why) => {
                failed += 1;
                println!(
                    "criterion {:>2}: FAIL  {name}: {why} [{:.2?}]",
                    k + 1,
                    t.elapsed()
                );
            }
        }
    }
    println!(
        "acceptance: {} of 12 passed in {:.2?}",
        12 - failed,
        started.elapsed()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
