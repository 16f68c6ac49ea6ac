//! Optimality predicates `phi_i(s_i, G_i, G_-i)`: strict and weak dominance
//! by pure or mixed strategies, and best response to point or correlated
//! beliefs.
//!
//! Every predicate follows the literal quantifier structure of its
//! definition, including on empty sets:
//!
//! * with `G_-i` empty, any `s'_i` strictly dominates vacuously, so `sd` and
//!   `msd` fail whenever `G_i` is non-empty; weak dominance needs a strict
//!   gain somewhere, so `wd` and `mwd` hold; no belief exists, so every
//!   best-response notion fails;
//! * with `G_i` empty there is no dominator, and every belief is a best
//!   response against the empty set of alternatives.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{
    Belief, Game, MixedStrategy, OpponentProfile, Player, Rational, StrategyId, StrategySet,
};
use crate::lp::{LinearProgram, LpOutcome, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Notion {
    /// Not strictly dominated by a pure strategy.
    Sd,
    /// Not weakly dominated by a pure strategy.
    Wd,
    /// Not strictly dominated by a mixed strategy.
    Msd,
    /// Not weakly dominated by a mixed strategy.
    Mwd,
    /// Best response to some point belief.
    BrPoint,
    /// Best response to some correlated belief.
    BrCorrelated,
    /// Best response to some independent belief; two-player games only,
    /// where it coincides with `BrCorrelated`.
    BrIndependent,
}

impl Notion {
    pub const ALL: [Notion; 7] = [
        Notion::Sd,
        Notion::Wd,
        Notion::Msd,
        Notion::Mwd,
        Notion::BrPoint,
        Notion::BrCorrelated,
        Notion::BrIndependent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Notion::Sd => "sd",
            Notion::Wd => "wd",
            Notion::Msd => "msd",
            Notion::Mwd => "mwd",
            Notion::BrPoint => "brp",
            Notion::BrCorrelated => "brc",
            Notion::BrIndependent => "bri",
        }
    }

    /// Whether the predicate is monotonic in the opponent set.
    pub fn is_monotonic(self) -> bool {
        !matches!(self, Notion::Wd | Notion::Mwd)
    }

    pub fn is_best_response(self) -> bool {
        matches!(
            self,
            Notion::BrPoint | Notion::BrCorrelated | Notion::BrIndependent
        )
    }

    pub fn check_supported(self, players: usize) -> Result<()> {
        if self == Notion::BrIndependent && players != 2 {
            return Err(Error::UnsupportedNotion {
                notion: self.name().into(),
                players,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sd" => Notion::Sd,
            "wd" => Notion::Wd,
            "msd" => Notion::Msd,
            "mwd" => Notion::Mwd,
            "br" | "brp" => Notion::BrPoint,
            "brc" => Notion::BrCorrelated,
            "bri" => Notion::BrIndependent,
            other => return Err(Error::InvalidArgument(format!("unknown notion `{other}`"))),
        })
    }
}

/// Why a strategy fails its predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    PureDominator(StrategyId),
    MixedDominator(MixedStrategy),
    NoSupportingBelief,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluation {
    /// Best-response notions report the supporting belief.
    Holds(Option<Belief>),
    Fails(Reason),
}

impl Evaluation {
    pub fn holds(&self) -> bool {
        matches!(self, Evaluation::Holds(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominanceMode {
    Strict,
    Weak,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominanceVerdict {
    /// `margin` is the optimal epsilon (strict) or total slack (weak).
    Dominated {
        witness: MixedStrategy,
        margin: Rational,
    },
    NotDominated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BestResponseVerdict {
    BestResponse(Belief),
    NotBestResponse,
}

/// Truth value of `notion` for `s_i` against the alternatives `own` and
/// the opponent profiles `opponents`.
pub fn holds(
    notion: Notion,
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &[OpponentProfile],
) -> Result<bool> {
    evaluate(notion, game, i, s_i, own, opponents).map(|e| e.holds())
}

/// Like [`holds`], with the failing witness or the supporting belief.
pub fn evaluate(
    notion: Notion,
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &[OpponentProfile],
) -> Result<Evaluation> {
    notion.check_supported(game.num_players())?;
    if opponents.is_empty() {
        return Ok(match notion {
            Notion::Sd | Notion::Msd => match own.iter().next() {
                Some(first) if notion == Notion::Sd => {
                    Evaluation::Fails(Reason::PureDominator(first))
                }
                Some(first) => {
                    Evaluation::Fails(Reason::MixedDominator(MixedStrategy::pure(i, first)))
                }
                None => Evaluation::Holds(None),
            },
            Notion::Wd | Notion::Mwd => Evaluation::Holds(None),
            _ => Evaluation::Fails(Reason::NoSupportingBelief),
        });
    }
    match notion {
        Notion::Sd => Ok(
            match pure_dominator(game, i, s_i, own, opponents, DominanceMode::Strict) {
                Some(by) => Evaluation::Fails(Reason::PureDominator(by)),
                None => Evaluation::Holds(None),
            },
        ),
        Notion::Wd => Ok(
            match pure_dominator(game, i, s_i, own, opponents, DominanceMode::Weak) {
                Some(by) => Evaluation::Fails(Reason::PureDominator(by)),
                None => Evaluation::Holds(None),
            },
        ),
        Notion::Msd | Notion::Mwd => {
            if own.is_empty() {
                return Ok(Evaluation::Holds(None));
            }
            let mode = if notion == Notion::Msd {
                DominanceMode::Strict
            } else {
                DominanceMode::Weak
            };
            // A pure dominator is a degenerate mixed one, and a best reply
            // to a point belief cannot be strictly dominated.
            if let Some(by) = pure_dominator(game, i, s_i, own, opponents, mode) {
                return Ok(Evaluation::Fails(Reason::MixedDominator(
                    MixedStrategy::pure(i, by),
                )));
            }
            if mode == DominanceMode::Strict && point_belief(game, i, s_i, own, opponents).is_some()
            {
                return Ok(Evaluation::Holds(None));
            }
            Ok(
                match solve_dominance_lp(game, i, s_i, own, opponents, mode)? {
                    DominanceVerdict::Dominated { witness, .. } => {
                        Evaluation::Fails(Reason::MixedDominator(witness))
                    }
                    DominanceVerdict::NotDominated => Evaluation::Holds(None),
                },
            )
        }
        Notion::BrPoint => Ok(point_belief(game, i, s_i, own, opponents)
            .map_or(Evaluation::Fails(Reason::NoSupportingBelief), |o| {
                Evaluation::Holds(Some(Belief::Point(o.clone())))
            })),
        Notion::BrCorrelated | Notion::BrIndependent => {
            if let Some(o) = point_belief(game, i, s_i, own, opponents) {
                let belief =
                    Belief::correlated(vec![(o.clone(), Rational::from_integer(1.into()))])?;
                let belief = if notion == Notion::BrIndependent {
                    as_independent(game, i, belief)
                } else {
                    belief
                };
                return Ok(Evaluation::Holds(Some(belief)));
            }
            Ok(match solve_br_lp(game, i, s_i, own, opponents)? {
                BestResponseVerdict::BestResponse(belief) => {
                    let belief = if notion == Notion::BrIndependent {
                        as_independent(game, i, belief)
                    } else {
                        belief
                    };
                    Evaluation::Holds(Some(belief))
                }
                BestResponseVerdict::NotBestResponse => {
                    Evaluation::Fails(Reason::NoSupportingBelief)
                }
            })
        }
    }
}

/// First opponent profile against which `s_i` is a best reply within `own`.
fn point_belief<'a>(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &'a [OpponentProfile],
) -> Option<&'a OpponentProfile> {
    opponents.iter().find(|o| {
        let mine = game.payoff_against(i, s_i, o);
        own.iter().all(|alt| mine >= game.payoff_against(i, alt, o))
    })
}

/// With a single opponent a correlated belief is a mixed strategy.
fn as_independent(game: &Game, i: Player, belief: Belief) -> Belief {
    let opponent = if i == 0 { 1 } else { 0 };
    debug_assert_eq!(game.num_players(), 2);
    let weights = belief
        .atoms()
        .into_iter()
        .map(|(profile, w)| (profile[0], w));
    match MixedStrategy::new(opponent, weights) {
        Ok(m) => Belief::Independent(vec![m]),
        Err(_) => belief,
    }
}

/// First `s'` in `own` (in index order) dominating `s_i` over `opponents`.
/// Weak dominance never compares `s_i` with itself.
pub fn pure_dominator(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &[OpponentProfile],
    mode: DominanceMode,
) -> Option<StrategyId> {
    own.iter().find(|&alt| match mode {
        DominanceMode::Strict => opponents
            .iter()
            .all(|o| game.payoff_against(i, alt, o) > game.payoff_against(i, s_i, o)),
        DominanceMode::Weak => {
            alt != s_i
                && opponents
                    .iter()
                    .all(|o| game.payoff_against(i, alt, o) >= game.payoff_against(i, s_i, o))
                && opponents
                    .iter()
                    .any(|o| game.payoff_against(i, alt, o) > game.payoff_against(i, s_i, o))
        }
    })
}

/// Builds the mixed-dominance LP. Variables are the mixture weights over
/// `support` (in index order) followed by epsilon (strict) or one slack per
/// opponent profile (weak).
pub fn dominance_program(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    support: StrategySet,
    opponents: &[OpponentProfile],
    mode: DominanceMode,
) -> Result<LinearProgram> {
    if opponents.is_empty() {
        return Err(Error::EmptyOpponentSet);
    }
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let strategies: Vec<StrategyId> = support.iter().collect();
    let k = strategies.len();
    let zero = Rational::zero;
    let extra = match mode {
        DominanceMode::Strict => 1,
        DominanceMode::Weak => opponents.len(),
    };
    let mut lp = LinearProgram::new(k + extra);
    let mut objective = vec![zero(); k + extra];
    for c in objective.iter_mut().skip(k) {
        *c = Rational::one();
    }
    lp.maximize(objective)?;
    if mode == DominanceMode::Strict {
        lp.set_free(k);
    }
    for (row, o) in opponents.iter().enumerate() {
        let mut coeffs: Vec<Rational> = strategies
            .iter()
            .map(|&s| game.payoff_against(i, s, o).clone())
            .collect();
        coeffs.resize(k + extra, zero());
        let target = game.payoff_against(i, s_i, o).clone();
        match mode {
            DominanceMode::Strict => {
                coeffs[k] = -Rational::one();
                lp.add_constraint(coeffs, Relation::Ge, target)?;
            }
            DominanceMode::Weak => {
                coeffs[k + row] = -Rational::one();
                lp.add_constraint(coeffs, Relation::Eq, target)?;
            }
        }
    }
    let mut simplex = vec![Rational::one(); k];
    simplex.resize(k + extra, zero());
    lp.add_constraint(simplex, Relation::Eq, Rational::one())?;
    Ok(lp)
}

/// Is `s_i` dominated by a mixture over `support` against `opponents`?
pub fn solve_dominance_lp(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    support: StrategySet,
    opponents: &[OpponentProfile],
    mode: DominanceMode,
) -> Result<DominanceVerdict> {
    let lp = dominance_program(game, i, s_i, support, opponents, mode)?;
    match lp.solve() {
        LpOutcome::Optimal { value, point } => {
            if value.is_positive() {
                let witness = MixedStrategy::new(i, support.iter().zip(point))?;
                Ok(DominanceVerdict::Dominated {
                    witness,
                    margin: value,
                })
            } else {
                Ok(DominanceVerdict::NotDominated)
            }
        }
        // Weak mode pins every slack at zero or above, which no mixture may
        // meet when the support omits `s_i`.
        LpOutcome::Infeasible => Ok(DominanceVerdict::NotDominated),
        LpOutcome::Unbounded => unreachable!("payoffs bound the dominance objective"),
    }
}

/// Builds the best-response feasibility LP over beliefs on `opponents`
/// (one variable per profile, in the given order).
pub fn best_response_program(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &[OpponentProfile],
) -> Result<LinearProgram> {
    if opponents.is_empty() {
        return Err(Error::EmptyOpponentSet);
    }
    let m = opponents.len();
    let mut lp = LinearProgram::new(m);
    for alt in own.iter().filter(|&alt| alt != s_i) {
        let coeffs = opponents
            .iter()
            .map(|o| game.payoff_against(i, s_i, o) - game.payoff_against(i, alt, o))
            .collect();
        lp.add_constraint(coeffs, Relation::Ge, Rational::zero())?;
    }
    lp.add_constraint(vec![Rational::one(); m], Relation::Eq, Rational::one())?;
    Ok(lp)
}

/// Is `s_i` a best response within `own` to some correlated belief over
/// `opponents`?
pub fn solve_br_lp(
    game: &Game,
    i: Player,
    s_i: StrategyId,
    own: StrategySet,
    opponents: &[OpponentProfile],
) -> Result<BestResponseVerdict> {
    let lp = best_response_program(game, i, s_i, own, opponents)?;
    match lp.solve() {
        LpOutcome::Optimal { point, .. } => {
            let belief = Belief::correlated(opponents.iter().cloned().zip(point))?;
            Ok(BestResponseVerdict::BestResponse(belief))
        }
        LpOutcome::Infeasible => Ok(BestResponseVerdict::NotBestResponse),
        LpOutcome::Unbounded => unreachable!("feasibility program has a zero objective"),
    }
}
