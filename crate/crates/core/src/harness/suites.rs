//! Seeded property suites over random games and models.
//!
//! Every suite walks instances `k = 0..samples` with per-instance seeds from
//! [`instance_seed`], stops at the first violation and reports it with a
//! replayable payload.

use std::cell::RefCell;
use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generate::{generate_game, generate_model, instance_seed, GeneratorConfig};
use super::verify::{
    theorem1_i_sides, theorem1_ii_sides, theorem1_iii_sides, verify_corollary1, verify_corollary2,
    BeliefClass, Claim, Counterexample, VerificationReport,
};
use crate::elimination::{outcome_restriction, u_local, EliminationOperator, Mode, NotionProfile};
use crate::epistemic::{EpistemicModel, Event, GameModel, ModelClass, PossibilityCorrespondence};
use crate::error::{Error, Result};
use crate::game::{Game, Player, Rational, Restriction, StrategyId, StrategySet};
use crate::lattice::{
    check_inclusion_lemma, iterate_to_outcome, post_fixpoints, random_restriction, FnOperator,
};
use crate::optimality::{
    holds, solve_br_lp, solve_dominance_lp, BestResponseVerdict, DominanceMode, DominanceVerdict,
    Notion,
};

fn instance_config(seed: u64, k: usize) -> GeneratorConfig {
    GeneratorConfig::default().with_seed(instance_seed(seed, k as u64))
}

fn with_instance(mut cx: Counterexample, seed: u64, k: usize) -> Counterexample {
    cx.instance_seed = Some(instance_seed(seed, k as u64));
    cx
}

/// Theorem 1 part (i) on belief models (`class = Belief`) or part (ii) on
/// knowledge models, over random games of up to 3 players and 4 strategies
/// and models of up to 8 states.
pub fn suite_theorem1(
    notion: Notion,
    class: ModelClass,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let claim = match class {
        ModelClass::Knowledge => Claim::Thm1ii,
        ModelClass::Belief => Claim::Thm1i,
        ModelClass::Invalid => {
            return Err(Error::InvalidArgument(
                "no theorem for invalid models".into(),
            ))
        }
    };
    let label = format!("{claim}[{notion}]");
    for k in 0..samples {
        let mut cfg = instance_config(seed, k).with_target(class);
        if notion == Notion::BrIndependent {
            cfg = cfg.with_players(2, 2);
        }
        let game = generate_game(&cfg)?;
        let model = generate_model(&cfg, &game)?;
        let profile = NotionProfile::uniform(notion, game.num_players());
        let check = match claim {
            Claim::Thm1i => theorem1_i_sides(&game, &model, &profile)?,
            _ => theorem1_ii_sides(&game, &model, &profile)?,
        };
        if !check.holds() {
            let note = format!(
                "{} is not included in {}",
                game.show(&check.lhs),
                game.show(&check.rhs)
            );
            let mut cx = Counterexample::bare(claim, &game, note);
            cx.model = Some(model);
            cx.profile = Some(profile);
            cx.lhs = check.lhs;
            cx.rhs = check.rhs;
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                Some(seed),
                started,
                with_instance(cx, seed, k),
            ));
        }
    }
    Ok(VerificationReport::pass(
        label,
        samples,
        Some(seed),
        started,
    ))
}

/// The best-response corollaries on random models, alternating belief and
/// knowledge targets; knowledge models are checked on both parts.
/// `class = None` selects point beliefs against `U_sd`, otherwise the given
/// belief class against `U_msd`.
pub fn suite_corollary(
    class: Option<BeliefClass>,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let label = match class {
        None => "cor1".to_string(),
        Some(c) => format!("cor2[{}]", c.notion()),
    };
    for k in 0..samples {
        let target = if k % 2 == 0 {
            ModelClass::Belief
        } else {
            ModelClass::Knowledge
        };
        let mut cfg = instance_config(seed, k).with_target(target);
        if class == Some(BeliefClass::Independent) {
            cfg = cfg.with_players(2, 2);
        }
        let game = generate_game(&cfg)?;
        let model = generate_model(&cfg, &game)?;
        let report = match class {
            None => verify_corollary1(&game, &model)?,
            Some(c) => verify_corollary2(&game, &model, c)?,
        };
        if let Some(cx) = report.counterexample {
            let cx = with_instance(*cx, seed, k);
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                Some(seed),
                started,
                cx,
            ));
        }
    }
    Ok(VerificationReport::pass(
        label,
        samples,
        Some(seed),
        started,
    ))
}

/// Theorem 1 part (iii) on random games; any notion, monotonic or not.
pub fn suite_theorem1_iii(notion: Notion, samples: usize, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let label = format!("thm1.iii[{notion}]");
    for k in 0..samples {
        let mut cfg = instance_config(seed, k);
        if notion == Notion::BrIndependent {
            cfg = cfg.with_players(2, 2);
        }
        let game = generate_game(&cfg)?;
        let profile = NotionProfile::uniform(notion, game.num_players());
        let (check, model) = theorem1_iii_sides(&game, &profile)?;
        if !check.holds() {
            let note = format!(
                "{} is not included in {}",
                game.show(&check.lhs),
                game.show(&check.rhs)
            );
            let mut cx = Counterexample::bare(Claim::Thm1iii, &game, note);
            cx.model = Some(model);
            cx.profile = Some(profile);
            cx.lhs = check.lhs;
            cx.rhs = check.rhs;
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                Some(seed),
                started,
                with_instance(cx, seed, k),
            ));
        }
    }
    Ok(VerificationReport::pass(
        label,
        samples,
        Some(seed),
        started,
    ))
}

/// The comparison lemma for `T_first` (global) against `U_second` (local).
/// Games have up to 3 players and 3 strategies so that most lattices are
/// checked pointwise in full.
pub fn suite_lemma_inc(
    first: Notion,
    second: Notion,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let label = format!("lemma-inc[T_{first},U_{second}]");
    for k in 0..samples {
        let cfg = instance_config(seed, k).with_strategies(1, 3);
        let game = generate_game(&cfg)?;
        let profile = NotionProfile::uniform(first, game.num_players());
        let op1 = EliminationOperator::new(&game, profile.clone(), Mode::Global)?;
        let op2 = EliminationOperator::local(&game, second)?;
        let sub_seed = instance_seed(seed, k as u64);
        let failure = match check_inclusion_lemma(&op1, &op2, &game, 32, sub_seed) {
            Ok(r) if r.conclusion_holds => None,
            Ok(r) => Some((
                format!(
                    "{} is not included in {}",
                    game.show(&r.op1_outcome),
                    game.show(&r.op2_outcome)
                ),
                r.op1_outcome,
                r.op2_outcome,
            )),
            Err(Error::PremiseViolated { premise, witness }) => Some((
                format!("premise fails: {premise}"),
                witness.clone(),
                witness,
            )),
            Err(e) => return Err(e),
        };
        if let Some((note, lhs, rhs)) = failure {
            let mut cx = Counterexample::bare(Claim::LemmaInc, &game, note);
            cx.profile = Some(profile);
            cx.secondary = Some(second);
            cx.lhs = lhs;
            cx.rhs = rhs;
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                Some(seed),
                started,
                with_instance(cx, seed, k),
            ));
        }
    }
    Ok(VerificationReport::pass(
        label,
        samples,
        Some(seed),
        started,
    ))
}

/// A failure of predicate monotonicity: `phi_i(s, H_i, smaller_-i)` holds
/// while `phi_i(s, H_i, larger_-i)` does not.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotonicityWitness {
    pub player: Player,
    pub strategy: StrategyId,
    pub smaller: Restriction,
    pub larger: Restriction,
}

impl MonotonicityWitness {
    pub fn counterexample(&self, game: &Game, notion: Notion) -> Counterexample {
        let i = self.player;
        let note = format!(
            "{notion}_{}({}, H, {}) holds but fails on the larger {}",
            i + 1,
            game.label(i, self.strategy),
            game.show(&self.smaller),
            game.show(&self.larger)
        );
        let mut cx = Counterexample::bare(Claim::Monotonicity, game, note);
        let mut joint = vec![0; game.num_players()];
        joint[i] = self.strategy;
        cx.joint = Some(joint);
        cx.player = Some(i);
        cx.secondary = Some(notion);
        cx.lhs = self.smaller.clone();
        cx.rhs = self.larger.clone();
        cx
    }
}

/// Restrictions with `H_i` at `i` and a non-empty set everywhere else, in
/// increasing order of the packed component masks.
fn opponent_restrictions(game: &Game, i: Player) -> Vec<Restriction> {
    let mut out = vec![game.full()];
    for j in (0..game.num_players()).filter(|&j| j != i) {
        let full = StrategySet::full(game.num_strategies(j)).bits();
        out = (1..=full)
            .flat_map(|mask| {
                out.iter().map(move |r| {
                    let mut r = r.clone();
                    r.set_component(j, StrategySet::from_bits(mask));
                    r
                })
            })
            .collect();
    }
    out
}

/// Searches all pairs of non-empty opponent restrictions for a violation
/// of predicate monotonicity, player by player and strategy by strategy.
pub fn find_monotonicity_violation(
    game: &Game,
    notion: Notion,
) -> Result<Option<MonotonicityWitness>> {
    for i in 0..game.num_players() {
        let candidates = opponent_restrictions(game, i);
        let own = game.strategies(i);
        for s in own.iter() {
            let verdicts = candidates
                .iter()
                .map(|r| holds(notion, game, i, s, own, &r.opponents_product(i)))
                .collect::<Result<Vec<_>>>()?;
            for (b, larger) in candidates.iter().enumerate() {
                if verdicts[b] {
                    continue;
                }
                if let Some(a) =
                    (0..candidates.len()).find(|&a| verdicts[a] && candidates[a].is_subset(larger))
                {
                    return Ok(Some(MonotonicityWitness {
                        player: i,
                        strategy: s,
                        smaller: candidates[a].clone(),
                        larger: larger.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// All two-player games of the given shape in which both players share the
/// payoff table `t`, for every table over `pool`. Each player's predicate
/// depends only on that player's own table, so these games exercise every
/// single-player instance of every game of that shape.
pub fn shared_table_games(rows: usize, cols: usize, pool: &[i64]) -> Vec<Game> {
    let cells = rows * cols;
    let total = pool.len().pow(cells as u32);
    let labels: Vec<Vec<String>> = vec![
        (0..rows).map(|r| format!("r{}", r + 1)).collect(),
        (0..cols).map(|c| format!("c{}", c + 1)).collect(),
    ];
    (0..total)
        .map(|mut code| {
            let table: Vec<i64> = (0..cells)
                .map(|_| {
                    let v = pool[code % pool.len()];
                    code /= pool.len();
                    v
                })
                .collect();
            Game::from_fn(labels.clone(), |_, joint| {
                Rational::from_integer(table[joint[0] * cols + joint[1]].into())
            })
            .expect("well-formed table")
        })
        .collect()
}

/// Every 2x2 game with payoffs drawn from `pool`, in table order.
pub fn all_2x2_games(pool: &[i64]) -> Vec<Game> {
    let tables: Vec<Vec<i64>> = (0..pool.len().pow(4))
        .map(|mut code| {
            (0..4)
                .map(|_| {
                    let v = pool[code % pool.len()];
                    code /= pool.len();
                    v
                })
                .collect()
        })
        .collect();
    let labels = [&["U", "D"][..], &["L", "R"][..]];
    let mut games = Vec::with_capacity(tables.len() * tables.len());
    for a in &tables {
        for b in &tables {
            games.push(Game::from_integers(&labels, &[a, b]).expect("2x2 table"));
        }
    }
    games
}

/// Predicate monotonicity for `notion`: exhaustive over every player's
/// table in 2x2 and 2x3 games with payoffs in `{0,1,2}`, then `samples`
/// random games with random comparable opponent sets.
pub fn suite_monotonicity(notion: Notion, samples: usize, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let label = format!("monotonicity[{notion}]");
    let mut checked = 0;
    for (rows, cols) in [(2, 2), (2, 3)] {
        for game in shared_table_games(rows, cols, &[0, 1, 2]) {
            checked += 1;
            if let Some(w) = find_monotonicity_violation(&game, notion)? {
                let cx = w.counterexample(&game, notion);
                return Ok(VerificationReport::fail(
                    label,
                    checked,
                    Some(seed),
                    started,
                    cx,
                ));
            }
        }
    }
    for k in 0..samples {
        let cfg = instance_config(seed, k).with_strategies(2, 4);
        let game = generate_game(&cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, k as u64) ^ 0x5eed);
        checked += 1;
        for _ in 0..4 {
            let i = rng.gen_range(0..game.num_players());
            let s = rng.gen_range(0..game.num_strategies(i));
            let (smaller, larger) = random_opponent_pair(&game, i, &mut rng);
            let own = game.strategies(i);
            if holds(notion, &game, i, s, own, &smaller.opponents_product(i))?
                && !holds(notion, &game, i, s, own, &larger.opponents_product(i))?
            {
                let w = MonotonicityWitness {
                    player: i,
                    strategy: s,
                    smaller,
                    larger,
                };
                let cx = with_instance(w.counterexample(&game, notion), seed, k);
                return Ok(VerificationReport::fail(
                    label,
                    checked,
                    Some(seed),
                    started,
                    cx,
                ));
            }
        }
    }
    Ok(VerificationReport::pass(
        label,
        checked,
        Some(seed),
        started,
    ))
}

fn random_nonempty_submask(mask: u64, rng: &mut impl Rng) -> u64 {
    loop {
        let sub = rng.gen::<u64>() & mask;
        if sub != 0 {
            return sub;
        }
    }
}

fn random_opponent_pair(game: &Game, i: Player, rng: &mut impl Rng) -> (Restriction, Restriction) {
    let mut smaller = game.full();
    let mut larger = game.full();
    for j in (0..game.num_players()).filter(|&j| j != i) {
        let big = random_nonempty_submask(StrategySet::full(game.num_strategies(j)).bits(), rng);
        larger.set_component(j, StrategySet::from_bits(big));
        smaller.set_component(j, StrategySet::from_bits(random_nonempty_submask(big, rng)));
    }
    (smaller, larger)
}

/// Whether `U_brc(G)` and `U_msd(G)` differ, or the two LPs disagree on
/// some strategy of `G` with a non-empty opponent set.
pub fn pearce_mismatch(game: &Game, g: &Restriction) -> Result<bool> {
    let n = game.num_players();
    let brc = u_local(&NotionProfile::uniform(Notion::BrCorrelated, n), game, g)?;
    let msd = u_local(&NotionProfile::uniform(Notion::Msd, n), game, g)?;
    if brc != msd {
        return Ok(true);
    }
    for i in 0..n {
        let opponents = g.opponents_product(i);
        if opponents.is_empty() {
            continue;
        }
        let own = g.component(i);
        for s in own.iter() {
            let best = matches!(
                solve_br_lp(game, i, s, own, &opponents)?,
                BestResponseVerdict::BestResponse(_)
            );
            let dominated = matches!(
                solve_dominance_lp(game, i, s, own, &opponents, DominanceMode::Strict)?,
                DominanceVerdict::Dominated { .. }
            );
            if best == dominated {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// `U_brc = U_msd` on the full game and `per_game - 1` random restrictions
/// of each of `samples` random games with 2-3 players and up to 4 strategies.
pub fn suite_pearce(samples: usize, per_game: usize, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut checked = 0;
    for k in 0..samples {
        let game = generate_game(&instance_config(seed, k))?;
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, k as u64));
        let mut points = vec![game.full()];
        points.extend((1..per_game.max(1)).map(|_| random_restriction(&game, &mut rng)));
        for g in points {
            checked += 1;
            if pearce_mismatch(&game, &g)? {
                let n = game.num_players();
                let note = format!("U_brc and U_msd disagree at {}", game.show(&g));
                let mut cx = Counterexample::bare(Claim::Pearce, &game, note);
                cx.lhs = u_local(&NotionProfile::uniform(Notion::BrCorrelated, n), &game, &g)?;
                cx.rhs = u_local(&NotionProfile::uniform(Notion::Msd, n), &game, &g)?;
                cx.restriction = Some(g);
                return Ok(VerificationReport::fail(
                    "pearce",
                    checked,
                    Some(seed),
                    started,
                    with_instance(cx, seed, k),
                ));
            }
        }
    }
    Ok(VerificationReport::pass(
        "pearce",
        checked,
        Some(seed),
        started,
    ))
}

/// Player, strategy and opponent components of one predicate call.
type CacheKey = (Player, StrategyId, Vec<u64>);

/// `T_phi` with each predicate evaluation memoized on the opponent
/// restriction, for brute-force lattice sweeps.
pub fn memoized_global_operator<'g>(
    game: &'g Game,
    notion: Notion,
) -> FnOperator<impl Fn(&Restriction) -> Restriction + 'g> {
    let cache: RefCell<HashMap<CacheKey, bool>> = RefCell::new(HashMap::new());
    FnOperator::new(format!("T[{notion}]"), move |g: &Restriction| {
        let mut out = g.clone();
        for i in 0..game.num_players() {
            let opp_key: Vec<u64> = (0..game.num_players())
                .map(|j| if j == i { 0 } else { g.component(j).bits() })
                .collect();
            let kept = g
                .component(i)
                .iter()
                .filter(|&s| {
                    let key = (i, s, opp_key.clone());
                    if let Some(&v) = cache.borrow().get(&key) {
                        return v;
                    }
                    let v = holds(
                        notion,
                        game,
                        i,
                        s,
                        game.strategies(i),
                        &g.opponents_product(i),
                    )
                    .expect("supported notion");
                    cache.borrow_mut().insert(key, v);
                    v
                })
                .collect();
            out.set_component(i, kept);
        }
        out
    })
    .claiming(notion.is_monotonic(), true)
}

/// Compares the iterated outcome of the library's `T_phi` with the union of
/// all post-fixpoints found by brute force. Returns both on mismatch.
pub fn tarski_mismatch(game: &Game, notion: Notion) -> Result<Option<(Restriction, Restriction)>> {
    let profile = NotionProfile::uniform(notion, game.num_players());
    let iterated = outcome_restriction(&profile, game, Mode::Global)?;
    let op = memoized_global_operator(game, notion);
    if iterate_to_outcome(&op, &game.full())?.outcome() != &iterated {
        return Ok(Some((iterated, game.full())));
    }
    let posts = post_fixpoints(&op, game, 12)?;
    let union = posts
        .iter()
        .fold(Restriction::all_empty(game.num_players()), |acc, g| {
            acc.join(g)
        });
    if union != iterated || posts.iter().any(|g| !g.is_subset(&iterated)) {
        return Ok(Some((iterated, union)));
    }
    Ok(None)
}

/// Tarski agreement on random games whose lattice has at most `2^12`
/// elements.
pub fn suite_tarski(notion: Notion, samples: usize, seed: u64) -> Result<VerificationReport> {
    let started = Instant::now();
    let label = format!("tarski[{notion}]");
    for k in 0..samples {
        let mut cfg = instance_config(seed, k);
        if notion == Notion::BrIndependent {
            cfg = cfg.with_players(2, 2);
        }
        let game = generate_game(&cfg)?;
        if let Some((lhs, rhs)) = tarski_mismatch(&game, notion)? {
            let note = format!(
                "iterated outcome {} but largest fixpoint {}",
                game.show(&lhs),
                game.show(&rhs)
            );
            let mut cx = Counterexample::bare(Claim::Tarski, &game, note);
            cx.profile = Some(NotionProfile::uniform(notion, game.num_players()));
            cx.lhs = lhs;
            cx.rhs = rhs;
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                Some(seed),
                started,
                with_instance(cx, seed, k),
            ));
        }
    }
    Ok(VerificationReport::pass(
        label,
        samples,
        Some(seed),
        started,
    ))
}

/// Checks the common-box characterizations for `E`: on belief models
/// `box* E` is the largest evident event inside `box E` and the chain
/// `box^k E` descends; on knowledge models `box* E` is also the largest
/// evident event inside `E` itself and lies within `E`.
pub fn characterization_mismatch(model: &EpistemicModel, e: &Event) -> Result<Option<String>> {
    let chain = model.common_box_chain(e)?;
    let common = &chain.event;
    let boxed = model.box_event(e)?;
    let via_evident = model.largest_evident_inside(&boxed)?;
    if &via_evident != common {
        return Ok(Some(format!(
            "box* E = {} but the largest evident event inside box E is {}",
            model.frame().render_event(common),
            model.frame().render_event(&via_evident)
        )));
    }
    if chain.stabilized_at.is_none() || chain.chain.windows(2).any(|w| !w[1].is_subset(&w[0])) {
        return Ok(Some("the chain box^k E does not descend".into()));
    }
    if model.class() == ModelClass::Knowledge {
        let inside = model.largest_evident_inside(e)?;
        if &inside != common {
            return Ok(Some(format!(
                "K* E = {} but the largest evident event inside E is {}",
                model.frame().render_event(common),
                model.frame().render_event(&inside)
            )));
        }
        if !common.is_subset(e) {
            return Ok(Some("K* E is not inside E".into()));
        }
    }
    Ok(None)
}

/// Every serial, coherent correspondence on `states` states, found by
/// filtering all maps from states to non-empty events.
pub fn all_belief_correspondences(states: usize) -> Vec<PossibilityCorrespondence> {
    let choices = (1u64 << states) - 1;
    let total = choices.pow(states as u32);
    (0..total)
        .filter_map(|mut code| {
            let cells = (0..states)
                .map(|_| {
                    let mask = code % choices + 1;
                    code /= choices;
                    Event::from_mask(states, mask)
                })
                .collect();
            let p = PossibilityCorrespondence::new(cells).expect("cells fit");
            (p.class() != ModelClass::Invalid).then_some(p)
        })
        .collect()
}

fn trivial_game(players: usize) -> Game {
    let labels = (0..players).map(|_| vec!["x".to_string()]).collect();
    Game::from_fn(labels, |_, _| Rational::from_integer(0.into())).expect("one-strategy game")
}

fn trivial_frame(game: &Game, states: usize) -> Result<GameModel> {
    GameModel::new(
        game,
        (0..states).map(|w| format!("w{w}")).collect(),
        vec![vec![0; states]; game.num_players()],
    )
}

fn characterization_failure(
    game: &Game,
    model: EpistemicModel,
    e: Event,
    note: String,
    checked: usize,
    seed: Option<u64>,
    started: Instant,
) -> VerificationReport {
    let mut cx = Counterexample::bare(Claim::Characterization, game, note);
    cx.model = Some(model);
    cx.event = Some(e);
    VerificationReport::fail("characterization", checked, seed, started, cx)
}

/// The characterizations for every event of every two-player model whose
/// correspondences are belief correspondences on at most `max_states`
/// states, then every event (or 64 sampled events above 8 states) of
/// `samples` random models of 5-12 states, alternating belief and
/// knowledge targets.
pub fn suite_characterization(
    max_states: usize,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let game = trivial_game(2);
    let mut checked = 0;
    for states in 1..=max_states {
        let all = all_belief_correspondences(states);
        let frame = trivial_frame(&game, states)?;
        for p in &all {
            for q in &all {
                let model = frame
                    .clone()
                    .with_correspondences(vec![p.clone(), q.clone()])?;
                for mask in 0..(1u64 << states) {
                    let e = Event::from_mask(states, mask);
                    checked += 1;
                    if let Some(note) = characterization_mismatch(&model, &e)? {
                        return Ok(characterization_failure(
                            &game, model, e, note, checked, None, started,
                        ));
                    }
                }
            }
        }
    }
    for k in 0..samples {
        let target = if k % 2 == 0 {
            ModelClass::Belief
        } else {
            ModelClass::Knowledge
        };
        let cfg = instance_config(seed, k)
            .with_states(5, 12)
            .with_target(target);
        let g = generate_game(&cfg)?;
        let model = generate_model(&cfg, &g)?;
        let n = model.num_states();
        let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, k as u64));
        let masks: Vec<u64> = if n <= 8 {
            (0..(1u64 << n)).collect()
        } else {
            (0..64)
                .map(|_| rng.gen::<u64>() & ((1u64 << n) - 1))
                .collect()
        };
        for mask in masks {
            let e = Event::from_mask(n, mask);
            checked += 1;
            if let Some(note) = characterization_mismatch(&model, &e)? {
                let mut report =
                    characterization_failure(&g, model, e, note, checked, Some(seed), started);
                if let Some(cx) = report.counterexample.as_mut() {
                    cx.instance_seed = Some(instance_seed(seed, k as u64));
                }
                return Ok(report);
            }
        }
    }
    Ok(VerificationReport::pass(
        "characterization",
        checked,
        Some(seed),
        started,
    ))
}
