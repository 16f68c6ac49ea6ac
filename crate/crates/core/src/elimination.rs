//! The global operator `T_phi` and the local operator `U_phi`.
//!
//! Both keep `s_i in G_i` exactly when `phi_i(s_i, A_i, G_-i)` holds; the
//! global operator takes the alternatives `A_i` from the initial strategy
//! set `H_i`, the local one from the current `G_i`. All failing strategies
//! are removed in the same stage.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::game::{Game, Player, Restriction, StrategyId, StrategySet};
use crate::lattice::{iterate_to_outcome, EliminationTrace, RestrictionOperator};
use crate::optimality::{evaluate, Evaluation, Notion, Reason};

/// One optimality notion per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NotionProfile(Vec<Notion>);

impl NotionProfile {
    pub fn new(notions: Vec<Notion>) -> Self {
        NotionProfile(notions)
    }

    pub fn uniform(notion: Notion, players: usize) -> Self {
        NotionProfile(vec![notion; players])
    }

    /// Parses `wd` (same notion for everyone) or `sd,brp,..` (one per player).
    pub fn parse(text: &str, players: usize) -> Result<Self> {
        let notions = text
            .split(',')
            .map(|t| t.trim().parse::<Notion>())
            .collect::<Result<Vec<_>>>()?;
        match notions.len() {
            1 => Ok(NotionProfile::uniform(notions[0], players)),
            k if k == players => Ok(NotionProfile(notions)),
            k => Err(Error::InvalidArgument(format!(
                "profile lists {k} notions for {players} players"
            ))),
        }
    }

    pub fn notions(&self) -> &[Notion] {
        &self.0
    }

    pub fn notion(&self, i: Player) -> Notion {
        self.0[i]
    }

    pub fn is_monotonic(&self) -> bool {
        self.0.iter().all(|n| n.is_monotonic())
    }

    pub fn validate_for(&self, game: &Game) -> Result<()> {
        if self.0.len() != game.num_players() {
            return Err(Error::InvalidArgument(format!(
                "profile has {} notions for a {}-player game",
                self.0.len(),
                game.num_players()
            )));
        }
        self.0
            .iter()
            .try_for_each(|n| n.check_supported(game.num_players()))
    }
}

impl fmt::Display for NotionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(|n| n.name()).collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Global,
    Local,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Global => "global",
            Mode::Local => "local",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Mode::Global),
            "local" => Ok(Mode::Local),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// A strategy removed in some stage, with the witness from the predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub player: Player,
    pub strategy: StrategyId,
    pub reason: Reason,
}

/// One application of `T_phi` or `U_phi`, with the reasons for each removal.
pub fn step(
    profile: &NotionProfile,
    game: &Game,
    g: &Restriction,
    mode: Mode,
) -> Result<(Restriction, Vec<Elimination>)> {
    profile.validate_for(game)?;
    let mut next = g.clone();
    let mut removed = Vec::new();
    for i in 0..game.num_players() {
        let current = g.component(i);
        if current.is_empty() {
            continue;
        }
        let alternatives = match mode {
            Mode::Global => game.strategies(i),
            Mode::Local => current,
        };
        let opponents = g.opponents_product(i);
        let mut kept = StrategySet::empty();
        for s in current.iter() {
            match evaluate(profile.notion(i), game, i, s, alternatives, &opponents)? {
                Evaluation::Holds(_) => kept.insert(s),
                Evaluation::Fails(reason) => removed.push(Elimination {
                    player: i,
                    strategy: s,
                    reason,
                }),
            }
        }
        next.set_component(i, kept);
    }
    Ok((next, removed))
}

/// `T_phi(G)`.
pub fn t_global(profile: &NotionProfile, game: &Game, g: &Restriction) -> Result<Restriction> {
    step(profile, game, g, Mode::Global).map(|(next, _)| next)
}

/// `U_phi(G)`.
pub fn u_local(profile: &NotionProfile, game: &Game, g: &Restriction) -> Result<Restriction> {
    step(profile, game, g, Mode::Local).map(|(next, _)| next)
}

/// `T_phi` or `U_phi` as a lattice operator over a fixed game.
#[derive(Clone, Debug)]
pub struct EliminationOperator<'g> {
    game: &'g Game,
    profile: NotionProfile,
    mode: Mode,
    name: String,
}

impl<'g> EliminationOperator<'g> {
    pub fn new(game: &'g Game, profile: NotionProfile, mode: Mode) -> Result<Self> {
        profile.validate_for(game)?;
        let prefix = match mode {
            Mode::Global => "T",
            Mode::Local => "U",
        };
        let name = format!("{prefix}[{profile}]");
        Ok(EliminationOperator {
            game,
            profile,
            mode,
            name,
        })
    }

    pub fn global(game: &'g Game, notion: Notion) -> Result<Self> {
        Self::new(
            game,
            NotionProfile::uniform(notion, game.num_players()),
            Mode::Global,
        )
    }

    pub fn local(game: &'g Game, notion: Notion) -> Result<Self> {
        Self::new(
            game,
            NotionProfile::uniform(notion, game.num_players()),
            Mode::Local,
        )
    }

    pub fn profile(&self) -> &NotionProfile {
        &self.profile
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn game(&self) -> &Game {
        self.game
    }
}

impl RestrictionOperator for EliminationOperator<'_> {
    fn name(&self) -> &str {
        &self.name
    }

    fn apply(&self, g: &Restriction) -> Restriction {
        // The profile was validated against the game on construction.
        step(&self.profile, self.game, g, self.mode)
            .expect("validated elimination step")
            .0
    }

    fn claimed_monotonic(&self) -> bool {
        self.mode == Mode::Global && self.profile.is_monotonic()
    }

    fn claimed_contracting(&self) -> bool {
        true
    }
}

/// The iterated elimination from `H` with per-stage removals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOutcome {
    pub trace: EliminationTrace,
    /// `removed[k]` lists the strategies dropped between stages `k` and `k + 1`.
    pub removed: Vec<Vec<Elimination>>,
}

impl EliminationOutcome {
    pub fn outcome(&self) -> &Restriction {
        self.trace.outcome()
    }
}

pub fn outcome(profile: &NotionProfile, game: &Game, mode: Mode) -> Result<EliminationOutcome> {
    outcome_from(profile, game, mode, &game.full())
}

/// Iterates from `start` instead of the full game.
pub fn outcome_from(
    profile: &NotionProfile,
    game: &Game,
    mode: Mode,
    start: &Restriction,
) -> Result<EliminationOutcome> {
    if !game.is_restriction(start) {
        return Err(Error::InvalidArgument(
            "start is not a restriction of the game".into(),
        ));
    }
    let op = EliminationOperator::new(game, profile.clone(), mode)?;
    let trace = iterate_to_outcome(&op, start)?;
    let removed = trace.stages[..trace.stages.len() - 1]
        .iter()
        .map(|g| step(profile, game, g, mode).map(|(_, removed)| removed))
        .collect::<Result<Vec<_>>>()?;
    Ok(EliminationOutcome { trace, removed })
}

/// Shorthand for the outcome restriction only.
pub fn outcome_restriction(
    profile: &NotionProfile,
    game: &Game,
    mode: Mode,
) -> Result<Restriction> {
    let op = EliminationOperator::new(game, profile.clone(), mode)?;
    Ok(iterate_to_outcome(&op, &game.full())?.outcome().clone())
}

pub fn describe_reason(game: &Game, player: Player, reason: &Reason) -> String {
    match reason {
        Reason::PureDominator(by) => format!("dominated by {}", game.label(player, *by)),
        Reason::MixedDominator(m) if m.weights().len() == 1 => {
            let by = m.weights().keys().next().expect("one atom");
            format!("dominated by {}", game.label(player, *by))
        }
        Reason::MixedDominator(m) => {
            let parts: Vec<String> = m
                .weights()
                .iter()
                .map(|(s, w)| format!("{}*{}", w, game.label(player, *s)))
                .collect();
            format!("dominated by {}", parts.join("+"))
        }
        Reason::NoSupportingBelief => "no supporting belief".to_string(),
    }
}

/// Human-readable trace: one block per stage.
pub fn render_trace(game: &Game, result: &EliminationOutcome) -> String {
    let mut out = String::new();
    for (k, g) in result
        .trace
        .stages
        .iter()
        .enumerate()
        .take(result.trace.stabilized_at + 1)
    {
        out.push_str(&format!("stage {k}: {}\n", game.show(g)));
        if let Some(removed) = result.removed.get(k) {
            for e in removed {
                out.push_str(&format!(
                    "  player {} drops {}: {}\n",
                    e.player + 1,
                    game.label(e.player, e.strategy),
                    describe_reason(game, e.player, &e.reason)
                ));
            }
        }
    }
    out.push_str(&format!("outcome: {}\n", game.show(result.outcome())));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn apt() -> Game {
        Game::from_integers(&[&["U", "D"], &["L", "R"]], &[&[1, 0, 1, 1], &[1, 1, 0, 1]]).unwrap()
    }

    fn closing() -> Game {
        Game::from_integers(&[&["U", "D"], &["L", "R"]], &[&[1, 1, 1, 0], &[0, 0, 0, 0]]).unwrap()
    }

    fn pd() -> Game {
        Game::from_integers(&[&["C", "D"], &["C", "D"]], &[&[3, 0, 5, 1], &[3, 5, 0, 1]]).unwrap()
    }

    #[test]
    fn global_wd_single_step() {
        let g = apt();
        let p = NotionProfile::uniform(Notion::Wd, 2);
        let next = t_global(&p, &g, &g.full()).unwrap();
        assert_eq!(g.show(&next), "({D},{R})");
    }

    #[test]
    fn local_wd_outcome_on_counterexample_game() {
        let g = apt();
        for n in [Notion::Wd, Notion::Mwd] {
            let r = outcome(&NotionProfile::uniform(n, 2), &g, Mode::Local).unwrap();
            assert_eq!(g.show(r.outcome()), "({D},{R})");
            assert!(r.trace.stabilized_at <= 2);
        }
    }

    #[test]
    fn prisoners_dilemma_sd() {
        let g = pd();
        let p = NotionProfile::uniform(Notion::Sd, 2);
        assert_eq!(g.show(&t_global(&p, &g, &g.full()).unwrap()), "({D},{D})");
        let r = outcome(&p, &g, Mode::Global).unwrap();
        assert_eq!(r.removed[0].len(), 2);
        assert_eq!(r.removed[0][0].reason, Reason::PureDominator(1));
    }

    #[test]
    fn all_empty_maps_to_all_empty() {
        let g = apt();
        for n in [Notion::Sd, Notion::Wd, Notion::Msd, Notion::BrCorrelated] {
            let p = NotionProfile::uniform(n, 2);
            let e = Restriction::all_empty(2);
            assert_eq!(t_global(&p, &g, &e).unwrap(), e);
            assert_eq!(u_local(&p, &g, &e).unwrap(), e);
        }
    }

    #[test]
    fn closing_game_outcomes() {
        let g = closing();
        let brp = outcome(
            &NotionProfile::uniform(Notion::BrPoint, 2),
            &g,
            Mode::Global,
        )
        .unwrap();
        assert_eq!(brp.outcome(), &g.full());
        let wd = u_local(&NotionProfile::uniform(Notion::Wd, 2), &g, &g.full()).unwrap();
        assert_eq!(g.show(&wd), "({U},{L,R})");
    }

    #[test]
    fn singletons_are_local_fixpoints() {
        let g = apt();
        for n in [
            Notion::Sd,
            Notion::Wd,
            Notion::Msd,
            Notion::Mwd,
            Notion::BrPoint,
            Notion::BrCorrelated,
        ] {
            let p = NotionProfile::uniform(n, 2);
            for joint in g.joint_strategies() {
                let gs = Restriction::singleton(&joint);
                assert_eq!(u_local(&p, &g, &gs).unwrap(), gs, "{n}");
            }
        }
    }

    #[test]
    fn mixed_dominance_eliminates_middle_row_first() {
        let g = Game::from_integers(
            &[&["T", "M", "B"], &["L", "R"]],
            &[&[3, 0, 1, 1, 0, 3], &[0, 0, 0, 0, 0, 0]],
        )
        .unwrap();
        let r = outcome(&NotionProfile::uniform(Notion::Msd, 2), &g, Mode::Global).unwrap();
        assert_eq!(r.removed[0].len(), 1);
        assert_eq!(r.removed[0][0].strategy, 1);
        assert_eq!(g.show(&r.trace.stages[1]), "({T,B},{L,R})");
        assert!(render_trace(&g, &r).contains("player 1 drops M: dominated by 1/2*T+1/2*B"));
    }

    #[test]
    fn heterogeneous_profiles_and_parsing() {
        let p = NotionProfile::parse("sd,brp", 2).unwrap();
        assert_eq!(p.notions(), [Notion::Sd, Notion::BrPoint]);
        assert_eq!(
            NotionProfile::parse("wd", 3).unwrap(),
            NotionProfile::uniform(Notion::Wd, 3)
        );
        assert!(NotionProfile::parse("sd,sd", 3).is_err());
        let g = apt();
        assert!(t_global(&p, &g, &g.full()).is_ok());
        let three = Game::from_integers(&[&["a"], &["b"], &["c"]], &[&[0], &[0], &[0]]).unwrap();
        assert!(matches!(
            EliminationOperator::global(&three, Notion::BrIndependent),
            Err(Error::UnsupportedNotion { .. })
        ));
    }
}
