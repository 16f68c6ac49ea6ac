//! Single-instance checks of the inclusions relating common belief or
//! knowledge of rationality to iterated elimination.

use std::fmt;
use std::time::{Duration, Instant};

use crate::elimination::{outcome_restriction, Mode, NotionProfile};
use crate::epistemic::{thm1iii_model, thm2_model, EpistemicModel, Event, ModelClass};
use crate::error::{Error, Result};
use crate::game::{Game, JointStrategy, Player, Restriction, StrategyId};
use crate::optimality::{holds, Notion};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Claim {
    /// `G_{RAT & B*RAT} <= T^inf` for monotonic profiles on belief models.
    Thm1i,
    /// `G_{K*RAT} <= T^inf` for monotonic profiles on knowledge models.
    Thm1ii,
    /// `T^inf <= G_{K*RAT}` in the constructed standard knowledge model.
    Thm1iii,
    /// A joint strategy outside `T^inf` that is common knowledge of
    /// rationality in the singleton model.
    Thm2,
    /// `G_{RAT(brp) & B*RAT(brp)} <= U_sd^inf`.
    Cor1i,
    /// `G_{K*RAT(brp)} <= U_sd^inf`.
    Cor1ii,
    /// `G_{RAT(br) & B*RAT(br)} <= U_msd^inf`.
    Cor2i,
    /// `G_{K*RAT(br)} <= U_msd^inf`.
    Cor2ii,
    /// The best-response inclusions against `U` for an arbitrary local notion.
    LocalInclusion,
    LemmaInc,
    Pearce,
    Monotonicity,
    Tarski,
    Characterization,
}

impl Claim {
    pub fn id(self) -> &'static str {
        match self {
            Claim::Thm1i => "thm1.i",
            Claim::Thm1ii => "thm1.ii",
            Claim::Thm1iii => "thm1.iii",
            Claim::Thm2 => "thm2",
            Claim::Cor1i => "cor1.i",
            Claim::Cor1ii => "cor1.ii",
            Claim::Cor2i => "cor2.i",
            Claim::Cor2ii => "cor2.ii",
            Claim::LocalInclusion => "local-inclusion",
            Claim::LemmaInc => "lemma-inc",
            Claim::Pearce => "pearce",
            Claim::Monotonicity => "monotonicity",
            Claim::Tarski => "tarski",
            Claim::Characterization => "characterization",
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HoldsOnAll,
    Counterexample,
}

/// Everything needed to re-run a failing instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub claim: Claim,
    pub game: Game,
    pub model: Option<EpistemicModel>,
    pub profile: Option<NotionProfile>,
    /// Local notion for `LocalInclusion`, second operator for `LemmaInc`.
    pub secondary: Option<Notion>,
    pub joint: Option<JointStrategy>,
    /// Input restriction for pointwise claims.
    pub restriction: Option<Restriction>,
    pub player: Option<Player>,
    pub event: Option<Event>,
    /// The sides of the failed inclusion `lhs <= rhs` (or equality).
    pub lhs: Restriction,
    pub rhs: Restriction,
    pub instance_seed: Option<u64>,
    pub note: String,
}

impl Counterexample {
    /// A payload with only the claim and game filled in.
    pub fn bare(claim: Claim, game: &Game, note: impl Into<String>) -> Self {
        Counterexample {
            claim,
            game: game.clone(),
            model: None,
            profile: None,
            secondary: None,
            joint: None,
            restriction: None,
            player: None,
            event: None,
            lhs: game.full(),
            rhs: game.full(),
            instance_seed: None,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub claim: String,
    pub instances_checked: usize,
    pub verdict: Verdict,
    pub counterexample: Option<Box<Counterexample>>,
    pub seed: Option<u64>,
    pub runtime: Duration,
}

impl VerificationReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsOnAll
    }

    pub(crate) fn pass(
        claim: impl Into<String>,
        instances: usize,
        seed: Option<u64>,
        started: Instant,
    ) -> Self {
        VerificationReport {
            claim: claim.into(),
            instances_checked: instances,
            verdict: Verdict::HoldsOnAll,
            counterexample: None,
            seed,
            runtime: started.elapsed(),
        }
    }

    pub(crate) fn fail(
        claim: impl Into<String>,
        instances: usize,
        seed: Option<u64>,
        started: Instant,
        cx: Counterexample,
    ) -> Self {
        VerificationReport {
            claim: claim.into(),
            instances_checked: instances,
            verdict: Verdict::Counterexample,
            counterexample: Some(Box::new(cx)),
            seed,
            runtime: started.elapsed(),
        }
    }
}

/// Both sides of an inclusion check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionCheck {
    pub lhs: Restriction,
    pub rhs: Restriction,
}

impl InclusionCheck {
    pub fn holds(&self) -> bool {
        self.lhs.is_subset(&self.rhs)
    }
}

fn require_monotonic(profile: &NotionProfile) -> Result<()> {
    if let Some(n) = profile.notions().iter().find(|n| !n.is_monotonic()) {
        return Err(Error::NonMonotonicProfile(format!(
            "`{n}` is not monotonic; the inclusion is only claimed for sd, msd and best response"
        )));
    }
    Ok(())
}

fn require_belief(model: &EpistemicModel) -> Result<()> {
    if model.class() == ModelClass::Invalid {
        return Err(Error::InvalidModel("not a belief model".into()));
    }
    Ok(())
}

/// `RAT & B*RAT`, the event that rationality holds and is common belief.
pub fn true_common_belief(model: &EpistemicModel, rat: &Event) -> Result<Event> {
    Ok(rat.intersection(&model.common_box(rat)?))
}

/// `G_{RAT & B*RAT}` and `T^inf`.
pub fn theorem1_i_sides(
    game: &Game,
    model: &EpistemicModel,
    profile: &NotionProfile,
) -> Result<InclusionCheck> {
    require_monotonic(profile)?;
    require_belief(model)?;
    let rat = model.rat_event(game, profile)?;
    let event = true_common_belief(model, &rat)?;
    Ok(InclusionCheck {
        lhs: model.restriction_of_event(&event),
        rhs: outcome_restriction(profile, game, Mode::Global)?,
    })
}

/// `G_{K*RAT}` and `T^inf`.
pub fn theorem1_ii_sides(
    game: &Game,
    model: &EpistemicModel,
    profile: &NotionProfile,
) -> Result<InclusionCheck> {
    require_monotonic(profile)?;
    model.require_knowledge()?;
    let rat = model.rat_event(game, profile)?;
    Ok(InclusionCheck {
        lhs: model.restriction_of_event(&model.common_box(&rat)?),
        rhs: outcome_restriction(profile, game, Mode::Global)?,
    })
}

/// `T^inf` and `G_{K*RAT}` in the constructed model.
pub fn theorem1_iii_sides(
    game: &Game,
    profile: &NotionProfile,
) -> Result<(InclusionCheck, EpistemicModel)> {
    let model = thm1iii_model(game, profile)?;
    let rat = model.rat_event(game, profile)?;
    let k = model.common_box(&rat)?;
    Ok((
        InclusionCheck {
            lhs: outcome_restriction(profile, game, Mode::Global)?,
            rhs: model.restriction_of_event(&k),
        },
        model,
    ))
}

fn single(
    claim: Claim,
    game: &Game,
    model: Option<&EpistemicModel>,
    profile: &NotionProfile,
    check: InclusionCheck,
    started: Instant,
) -> VerificationReport {
    if check.holds() {
        VerificationReport::pass(claim.id(), 1, None, started)
    } else {
        let note = format!(
            "{} is not included in {}",
            game.show(&check.lhs),
            game.show(&check.rhs)
        );
        VerificationReport::fail(
            claim.id(),
            1,
            None,
            started,
            Counterexample {
                claim,
                game: game.clone(),
                model: model.cloned(),
                profile: Some(profile.clone()),
                secondary: None,
                joint: None,
                restriction: None,
                player: None,
                event: None,
                lhs: check.lhs,
                rhs: check.rhs,
                instance_seed: None,
                note,
            },
        )
    }
}

pub fn verify_theorem1_i(
    game: &Game,
    model: &EpistemicModel,
    profile: &NotionProfile,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let check = theorem1_i_sides(game, model, profile)?;
    Ok(single(
        Claim::Thm1i,
        game,
        Some(model),
        profile,
        check,
        started,
    ))
}

pub fn verify_theorem1_ii(
    game: &Game,
    model: &EpistemicModel,
    profile: &NotionProfile,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let check = theorem1_ii_sides(game, model, profile)?;
    Ok(single(
        Claim::Thm1ii,
        game,
        Some(model),
        profile,
        check,
        started,
    ))
}

pub fn verify_theorem1_iii(game: &Game, profile: &NotionProfile) -> Result<VerificationReport> {
    let started = Instant::now();
    let (check, model) = theorem1_iii_sides(game, profile)?;
    Ok(single(
        Claim::Thm1iii,
        game,
        Some(&model),
        profile,
        check,
        started,
    ))
}

/// Checks the hypothesis on `s`: it lies outside `T^inf`, yet each `s_i`
/// satisfies `phi_i(s_i, H_i, {s_-i})`. On success returns `T^inf`.
pub fn theorem2_hypothesis(
    game: &Game,
    profile: &NotionProfile,
    s: &[StrategyId],
) -> Result<Restriction> {
    profile.validate_for(game)?;
    if s.len() != game.num_players()
        || s.iter()
            .enumerate()
            .any(|(i, &x)| x >= game.num_strategies(i))
    {
        return Err(Error::InvalidArgument(
            "joint strategy does not fit the game".into(),
        ));
    }
    let limit = outcome_restriction(profile, game, Mode::Global)?;
    if limit.contains_joint(s) {
        return Err(Error::HypothesisNotMet(format!(
            "{} survives the elimination {}",
            game.show_joint(s),
            game.show(&limit)
        )));
    }
    let point = Restriction::singleton(s);
    for (i, &s_i) in s.iter().enumerate() {
        if !holds(
            profile.notion(i),
            game,
            i,
            s_i,
            game.strategies(i),
            &point.opponents_product(i),
        )? {
            return Err(Error::HypothesisNotMet(format!(
                "player {}'s {} is not {}-optimal against {}",
                i + 1,
                game.label(i, s[i]),
                profile.notion(i),
                game.show_opponents(i, &point.opponents_product(i)[0])
            )));
        }
    }
    Ok(limit)
}

/// First joint strategy (in table order) satisfying the hypothesis.
pub fn find_theorem2_witness(
    game: &Game,
    profile: &NotionProfile,
) -> Result<Option<JointStrategy>> {
    for s in game.joint_strategies() {
        match theorem2_hypothesis(game, profile, &s) {
            Ok(_) => return Ok(Some(s)),
            Err(Error::HypothesisNotMet(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// `G_{K*RAT}` in the singleton model, against `T^inf`.
pub fn theorem2_sides(
    game: &Game,
    profile: &NotionProfile,
) -> Result<(InclusionCheck, EpistemicModel)> {
    let model = thm2_model(game)?;
    let rat = model.rat_event(game, profile)?;
    let k = model.common_box(&rat)?;
    Ok((
        InclusionCheck {
            lhs: model.restriction_of_event(&k),
            rhs: outcome_restriction(profile, game, Mode::Global)?,
        },
        model,
    ))
}

/// Confirms that `s` breaks `G_{K*RAT} <= T^inf` in the singleton model.
///
/// The expected result is a report with verdict `Counterexample` carrying
/// `s`. A `HoldsOnAll` verdict means the construction failed to separate.
pub fn verify_theorem2(
    game: &Game,
    profile: &NotionProfile,
    s: &[StrategyId],
) -> Result<VerificationReport> {
    let started = Instant::now();
    theorem2_hypothesis(game, profile, s)?;
    let (check, model) = theorem2_sides(game, profile)?;
    let separated = check.lhs.contains_joint(s) && !check.rhs.contains_joint(s);
    if !separated {
        return Ok(VerificationReport::pass(Claim::Thm2.id(), 1, None, started));
    }
    let note = format!(
        "{} is common knowledge of rationality but outside {}",
        game.show_joint(s),
        game.show(&check.rhs)
    );
    Ok(VerificationReport::fail(
        Claim::Thm2.id(),
        1,
        None,
        started,
        Counterexample {
            claim: Claim::Thm2,
            game: game.clone(),
            model: Some(model),
            profile: Some(profile.clone()),
            secondary: None,
            joint: Some(s.to_vec()),
            restriction: None,
            player: None,
            event: None,
            lhs: check.lhs,
            rhs: check.rhs,
            instance_seed: None,
            note,
        },
    ))
}

/// The belief classes a best-response notion can use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BeliefClass {
    Point,
    Independent,
    Correlated,
}

impl BeliefClass {
    pub fn notion(self) -> Notion {
        match self {
            BeliefClass::Point => Notion::BrPoint,
            BeliefClass::Independent => Notion::BrIndependent,
            BeliefClass::Correlated => Notion::BrCorrelated,
        }
    }
}

/// `G_{RAT(br) & B*RAT(br)}` (or `G_{K*RAT(br)}` when `knowledge`) against
/// `U_local^inf`.
pub fn local_inclusion_sides(
    game: &Game,
    model: &EpistemicModel,
    best_response: Notion,
    local: Notion,
    knowledge: bool,
) -> Result<InclusionCheck> {
    require_belief(model)?;
    if knowledge {
        model.require_knowledge()?;
    }
    let br = NotionProfile::uniform(best_response, game.num_players());
    let rat = model.rat_event(game, &br)?;
    let event = if knowledge {
        model.common_box(&rat)?
    } else {
        true_common_belief(model, &rat)?
    };
    Ok(InclusionCheck {
        lhs: model.restriction_of_event(&event),
        rhs: outcome_restriction(
            &NotionProfile::uniform(local, game.num_players()),
            game,
            Mode::Local,
        )?,
    })
}

fn verify_local_pair(
    game: &Game,
    model: &EpistemicModel,
    best_response: Notion,
    local: Notion,
    claims: (Claim, Claim),
) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut parts = vec![(claims.0, false)];
    if model.class() == ModelClass::Knowledge {
        parts.push((claims.1, true));
    }
    let label = if model.class() == ModelClass::Knowledge {
        format!("{}+{}", claims.0, claims.1)
    } else {
        claims.0.id().to_string()
    };
    for (k, (claim, knowledge)) in parts.iter().enumerate() {
        let check = local_inclusion_sides(game, model, best_response, local, *knowledge)?;
        if !check.holds() {
            let note = format!(
                "{} is not included in U_{local}^inf = {}",
                game.show(&check.lhs),
                game.show(&check.rhs)
            );
            return Ok(VerificationReport::fail(
                label,
                k + 1,
                None,
                started,
                Counterexample {
                    claim: *claim,
                    game: game.clone(),
                    model: Some(model.clone()),
                    profile: Some(NotionProfile::uniform(best_response, game.num_players())),
                    secondary: Some(local),
                    joint: None,
                    restriction: None,
                    player: None,
                    event: None,
                    lhs: check.lhs,
                    rhs: check.rhs,
                    instance_seed: None,
                    note,
                },
            ));
        }
    }
    Ok(VerificationReport::pass(label, parts.len(), None, started))
}

/// Point-belief rationality against iterated strict dominance: part (i) on
/// any belief model, part (ii) as well when the model is a knowledge model.
pub fn verify_corollary1(game: &Game, model: &EpistemicModel) -> Result<VerificationReport> {
    verify_local_pair(
        game,
        model,
        Notion::BrPoint,
        Notion::Sd,
        (Claim::Cor1i, Claim::Cor1ii),
    )
}

/// Best-response rationality (any belief class) against iterated strict
/// dominance by mixed strategies.
pub fn verify_corollary2(
    game: &Game,
    model: &EpistemicModel,
    class: BeliefClass,
) -> Result<VerificationReport> {
    class.notion().check_supported(game.num_players())?;
    verify_local_pair(
        game,
        model,
        class.notion(),
        Notion::Msd,
        (Claim::Cor2i, Claim::Cor2ii),
    )
}

/// The same inclusions with an arbitrary local notion; with `wd` or `mwd`
/// they can fail.
pub fn verify_local_inclusion(
    game: &Game,
    model: &EpistemicModel,
    best_response: Notion,
    local: Notion,
) -> Result<VerificationReport> {
    verify_local_pair(
        game,
        model,
        best_response,
        local,
        (Claim::LocalInclusion, Claim::LocalInclusion),
    )
}

/// Re-runs the check recorded in `cx`. Returns `true` when the violation
/// reproduces.
pub fn replay(cx: &Counterexample) -> Result<bool> {
    let game = &cx.game;
    let missing = |what: &str| Error::InvalidArgument(format!("payload has no {what}"));
    let model = || cx.model.as_ref().ok_or_else(|| missing("model"));
    let profile = || cx.profile.as_ref().ok_or_else(|| missing("profile"));
    let secondary = || cx.secondary.ok_or_else(|| missing("second notion"));
    Ok(match cx.claim {
        Claim::Thm1i => !theorem1_i_sides(game, model()?, profile()?)?.holds(),
        Claim::Thm1ii => !theorem1_ii_sides(game, model()?, profile()?)?.holds(),
        Claim::Thm1iii => !theorem1_iii_sides(game, profile()?)?.0.holds(),
        Claim::Thm2 => {
            let s = cx.joint.as_ref().ok_or_else(|| missing("joint strategy"))?;
            verify_theorem2(game, profile()?, s)?.verdict == Verdict::Counterexample
        }
        Claim::Cor1i | Claim::Cor1ii | Claim::Cor2i | Claim::Cor2ii | Claim::LocalInclusion => {
            let local = match cx.claim {
                Claim::Cor1i | Claim::Cor1ii => Notion::Sd,
                Claim::Cor2i | Claim::Cor2ii => Notion::Msd,
                _ => secondary()?,
            };
            let model = model()?;
            let br = profile()?.notion(0);
            let parts: &[bool] = match cx.claim {
                Claim::Cor1i | Claim::Cor2i => &[false],
                Claim::Cor1ii | Claim::Cor2ii => &[true],
                _ if model.class() == ModelClass::Knowledge => &[false, true],
                _ => &[false],
            };
            let mut violated = false;
            for &knowledge in parts {
                violated |= !local_inclusion_sides(game, model, br, local, knowledge)?.holds();
            }
            violated
        }
        Claim::Pearce => {
            let g = cx
                .restriction
                .as_ref()
                .ok_or_else(|| missing("restriction"))?;
            super::suites::pearce_mismatch(game, g)?
        }
        Claim::LemmaInc => {
            let op1 = crate::elimination::EliminationOperator::new(
                game,
                profile()?.clone(),
                Mode::Global,
            )?;
            let op2 = crate::elimination::EliminationOperator::local(game, secondary()?)?;
            match crate::lattice::check_inclusion_lemma(
                &op1,
                &op2,
                game,
                64,
                cx.instance_seed.unwrap_or(0),
            ) {
                Ok(report) => !report.conclusion_holds,
                Err(Error::PremiseViolated { .. }) => true,
                Err(e) => return Err(e),
            }
        }
        Claim::Monotonicity => {
            let i = cx.player.ok_or_else(|| missing("player"))?;
            let s = cx.joint.as_ref().ok_or_else(|| missing("strategy"))?[i];
            let notion = secondary()?;
            let own = game.strategies(i);
            holds(notion, game, i, s, own, &cx.lhs.opponents_product(i))?
                && !holds(notion, game, i, s, own, &cx.rhs.opponents_product(i))?
        }
        Claim::Tarski => super::suites::tarski_mismatch(game, profile()?.notion(0))?.is_some(),
        Claim::Characterization => {
            let e = cx.event.as_ref().ok_or_else(|| missing("event"))?;
            super::suites::characterization_mismatch(model()?, e)?.is_some()
        }
    })
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

    fn all(n: Notion) -> NotionProfile {
        NotionProfile::uniform(n, 2)
    }

    #[test]
    fn theorem1_on_singleton_model() {
        let g = apt();
        let m = thm2_model(&g).unwrap();
        assert!(verify_theorem1_i(&g, &m, &all(Notion::Sd)).unwrap().holds());
        assert!(verify_theorem1_ii(&g, &m, &all(Notion::Sd))
            .unwrap()
            .holds());
        assert!(matches!(
            verify_theorem1_i(&g, &m, &all(Notion::Wd)),
            Err(Error::NonMonotonicProfile(_))
        ));
    }

    #[test]
    fn theorem1_iii_equality_on_closing_game() {
        let g = closing();
        let (check, _) = theorem1_iii_sides(&g, &all(Notion::BrPoint)).unwrap();
        assert_eq!(check.lhs, check.rhs);
        assert_eq!(check.lhs, g.full());
        assert!(verify_theorem1_iii(&apt(), &all(Notion::Wd))
            .unwrap()
            .holds());
    }

    #[test]
    fn theorem2_on_counterexample_game() {
        let g = apt();
        for n in [Notion::Wd, Notion::Mwd] {
            assert_eq!(
                find_theorem2_witness(&g, &all(n)).unwrap(),
                Some(vec![0, 0])
            );
            let report = verify_theorem2(&g, &all(n), &[0, 0]).unwrap();
            assert_eq!(report.verdict, Verdict::Counterexample);
            let cx = report.counterexample.unwrap();
            assert!(replay(&cx).unwrap());
            assert_eq!(g.show(&cx.rhs), "({D},{R})");
        }
        assert!(matches!(
            verify_theorem2(&g, &all(Notion::Sd), &[0, 0]),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn corollaries_on_small_games() {
        let g = closing();
        let m = thm1iii_model(&g, &all(Notion::BrPoint)).unwrap();
        assert!(verify_corollary1(&g, &m).unwrap().holds());
        assert!(verify_corollary2(&g, &m, BeliefClass::Correlated)
            .unwrap()
            .holds());
        for local in [Notion::Wd, Notion::Mwd] {
            let r = verify_local_inclusion(&g, &m, Notion::BrPoint, local).unwrap();
            assert!(!r.holds());
            assert!(replay(r.counterexample.as_ref().unwrap()).unwrap());
        }

        let p = pd();
        let m = thm2_model(&p).unwrap();
        let rat = m.rat_event(&p, &all(Notion::BrPoint)).unwrap();
        assert_eq!(rat, Event::from_states(4, [3]));
        assert!(verify_corollary1(&p, &m).unwrap().holds());
    }

    #[test]
    fn independent_class_needs_two_players() {
        let g = Game::from_integers(&[&["a"], &["b"], &["c"]], &[&[0], &[0], &[0]]).unwrap();
        let m = thm2_model(&g).unwrap();
        assert!(matches!(
            verify_corollary2(&g, &m, BeliefClass::Independent),
            Err(Error::UnsupportedNotion { .. })
        ));
    }
}
