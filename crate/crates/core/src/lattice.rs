//! Operators on the lattice of restrictions of a game: iteration to the
//! outcome, brute-force largest fixpoints, and monotonicity probing.
//!
//! Iteration always starts from a given element and stops at the first
//! stage `k` with `T(stage_k) = stage_k`. On a finite lattice a contracting
//! operator reaches it after at most `sum_i |G_i|` strict steps, so stages
//! are plain natural numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, Restriction, StrategySet};

/// An operator `T` on the restrictions of a fixed game.
///
/// The `claimed_*` flags are metadata only; nothing here trusts them.
pub trait RestrictionOperator {
    fn name(&self) -> &str;

    fn apply(&self, g: &Restriction) -> Restriction;

    fn claimed_monotonic(&self) -> bool {
        false
    }

    fn claimed_contracting(&self) -> bool {
        false
    }
}

impl<T: RestrictionOperator + ?Sized> RestrictionOperator for &T {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn apply(&self, g: &Restriction) -> Restriction {
        (**self).apply(g)
    }

    fn claimed_monotonic(&self) -> bool {
        (**self).claimed_monotonic()
    }

    fn claimed_contracting(&self) -> bool {
        (**self).claimed_contracting()
    }
}

/// Wraps a closure as an operator.
pub struct FnOperator<F> {
    name: String,
    f: F,
    monotonic: bool,
    contracting: bool,
}

impl<F: Fn(&Restriction) -> Restriction> FnOperator<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        FnOperator {
            name: name.into(),
            f,
            monotonic: false,
            contracting: false,
        }
    }

    pub fn claiming(mut self, monotonic: bool, contracting: bool) -> Self {
        self.monotonic = monotonic;
        self.contracting = contracting;
        self
    }
}

impl<F: Fn(&Restriction) -> Restriction> RestrictionOperator for FnOperator<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn apply(&self, g: &Restriction) -> Restriction {
        (self.f)(g)
    }

    fn claimed_monotonic(&self) -> bool {
        self.monotonic
    }

    fn claimed_contracting(&self) -> bool {
        self.contracting
    }
}

pub fn identity_operator() -> FnOperator<impl Fn(&Restriction) -> Restriction> {
    FnOperator::new("identity", |g: &Restriction| g.clone()).claiming(true, true)
}

pub fn constant_operator(value: Restriction) -> FnOperator<impl Fn(&Restriction) -> Restriction> {
    FnOperator::new("constant", move |_: &Restriction| value.clone()).claiming(true, false)
}

/// The stages `T^0 = start, T^1, ..` up to and including the first repeat.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    pub stages: Vec<Restriction>,
    /// Least `k` with `stages[k + 1] == stages[k]`.
    pub stabilized_at: usize,
}

impl EliminationTrace {
    pub fn outcome(&self) -> &Restriction {
        &self.stages[self.stabilized_at]
    }
}

/// Iterates `op` from `start` with the default budget of
/// `1 + sum_i |start_i|` applications.
pub fn iterate_to_outcome<O: RestrictionOperator + ?Sized>(
    op: &O,
    start: &Restriction,
) -> Result<EliminationTrace> {
    let budget = 1 + start.components().iter().map(|s| s.len()).sum::<usize>();
    iterate_with_budget(op, start, budget)
}

pub fn iterate_with_budget<O: RestrictionOperator + ?Sized>(
    op: &O,
    start: &Restriction,
    budget: usize,
) -> Result<EliminationTrace> {
    let mut stages = vec![start.clone()];
    for stage in 0..budget {
        let current = &stages[stage];
        let next = op.apply(current);
        if !next.is_subset(current) {
            return Err(Error::NonContractingStep {
                operator: op.name().to_string(),
                stage,
            });
        }
        let done = next == *current;
        stages.push(next);
        if done {
            return Ok(EliminationTrace {
                stages,
                stabilized_at: stage,
            });
        }
    }
    Err(Error::IterationBudgetExceeded { budget })
}

/// Default cap on the number of restrictions enumerated, as a power of two.
pub const DEFAULT_LOG2_BUDGET: usize = 20;

/// `log2` of the number of restrictions of `game`.
pub fn lattice_log2_size(game: &Game) -> usize {
    game.strategy_counts().iter().sum()
}

/// Every restriction of `game`, or `BudgetExceeded` when there are more than
/// `2^log2_budget`.
pub fn all_restrictions(game: &Game, log2_budget: usize) -> Result<Vec<Restriction>> {
    let counts = game.strategy_counts();
    let total = lattice_log2_size(game);
    if total > log2_budget || total >= 63 {
        return Err(Error::BudgetExceeded {
            log2_size: total,
            log2_budget,
        });
    }
    Ok((0..1u64 << total)
        .map(|code| decode_restriction(&counts, code))
        .collect())
}

/// Packs the components of a restriction into consecutive bit ranges.
fn decode_restriction(counts: &[usize], mut code: u64) -> Restriction {
    let sets = counts
        .iter()
        .map(|&m| {
            let set = StrategySet::from_bits(code & ((1u64 << m) - 1));
            code >>= m;
            set
        })
        .collect();
    Restriction::new(sets)
}

/// All post-fixpoints `G <= T(G)`.
pub fn post_fixpoints<O: RestrictionOperator + ?Sized>(
    op: &O,
    game: &Game,
    log2_budget: usize,
) -> Result<Vec<Restriction>> {
    Ok(all_restrictions(game, log2_budget)?
        .into_iter()
        .filter(|g| g.is_subset(&op.apply(g)))
        .collect())
}

/// The join of all post-fixpoints, by exhaustive enumeration.
pub fn largest_fixpoint_bruteforce<O: RestrictionOperator + ?Sized>(
    op: &O,
    game: &Game,
) -> Result<Restriction> {
    largest_fixpoint_with_budget(op, game, DEFAULT_LOG2_BUDGET)
}

pub fn largest_fixpoint_with_budget<O: RestrictionOperator + ?Sized>(
    op: &O,
    game: &Game,
    log2_budget: usize,
) -> Result<Restriction> {
    Ok(post_fixpoints(op, game, log2_budget)?
        .iter()
        .fold(Restriction::all_empty(game.num_players()), |acc, g| {
            acc.join(g)
        }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonotonicityProbe {
    /// No violation among this many pairs.
    Pass { pairs: usize },
    /// `smaller <= larger` but `T(smaller)` is not below `T(larger)`.
    Counterexample {
        smaller: Restriction,
        larger: Restriction,
    },
}

impl MonotonicityProbe {
    pub fn passed(&self) -> bool {
        matches!(self, MonotonicityProbe::Pass { .. })
    }
}

/// Uniformly random restriction of `game`.
pub fn random_restriction(game: &Game, rng: &mut impl Rng) -> Restriction {
    Restriction::new(
        game.strategy_counts()
            .iter()
            .map(|&m| StrategySet::from_bits(rng.gen::<u64>() & StrategySet::full(m).bits()))
            .collect(),
    )
}

/// Uniformly random restriction below `top`.
pub fn random_subrestriction(top: &Restriction, rng: &mut impl Rng) -> Restriction {
    Restriction::new(
        top.components()
            .iter()
            .map(|set| StrategySet::from_bits(rng.gen::<u64>() & set.bits()))
            .collect(),
    )
}

/// Samples `samples` comparable pairs `G <= G'` and checks
/// `T(G) <= T(G')`. Passing is evidence, not proof.
pub fn probe_monotonicity<O: RestrictionOperator + ?Sized>(
    op: &O,
    game: &Game,
    samples: usize,
    seed: u64,
) -> MonotonicityProbe {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let larger = random_restriction(game, &mut rng);
        let smaller = random_subrestriction(&larger, &mut rng);
        if !op.apply(&smaller).is_subset(&op.apply(&larger)) {
            return MonotonicityProbe::Counterexample { smaller, larger };
        }
    }
    MonotonicityProbe::Pass { pairs: samples }
}

/// Checks every comparable pair of the lattice.
pub fn check_monotonicity_exhaustive<O: RestrictionOperator + ?Sized>(
    op: &O,
    game: &Game,
    log2_budget: usize,
) -> Result<MonotonicityProbe> {
    let counts = game.strategy_counts();
    let all = all_restrictions(game, log2_budget)?;
    let images: Vec<Restriction> = all.iter().map(|g| op.apply(g)).collect();
    let mut pairs = 0;
    for (code, larger) in all.iter().enumerate() {
        let code = code as u64;
        // Walk the submasks of `code`.
        let mut sub = code;
        loop {
            pairs += 1;
            if !images[sub as usize].is_subset(&images[code as usize]) {
                return Ok(MonotonicityProbe::Counterexample {
                    smaller: decode_restriction(&counts, sub),
                    larger: larger.clone(),
                });
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & code;
        }
    }
    Ok(MonotonicityProbe::Pass { pairs })
}

/// Evidence for the comparison lemma: if `T1(G) <= T2(G)` everywhere, `T1`
/// is monotonic and `T2` is contracting, then `T1^inf <= T2^inf`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InclusionReport {
    /// Restrictions on which `T1(G) <= T2(G)` and `T2(G) <= G` were checked.
    pub pointwise_checked: usize,
    /// Whether those were all restrictions of the game.
    pub exhaustive: bool,
    pub op1_monotonicity: MonotonicityProbe,
    pub op1_outcome: Restriction,
    pub op2_outcome: Restriction,
    pub op1_trace_len: usize,
    pub op2_trace_len: usize,
    /// `T1^inf <= T2^inf`.
    pub conclusion_holds: bool,
}

/// Lattices up to this size are checked pointwise in full.
pub const EXHAUSTIVE_POINTWISE_LOG2: usize = 10;

pub fn check_inclusion_lemma<A, B>(
    op1: &A,
    op2: &B,
    game: &Game,
    samples: usize,
    seed: u64,
) -> Result<InclusionReport>
where
    A: RestrictionOperator + ?Sized,
    B: RestrictionOperator + ?Sized,
{
    let exhaustive = lattice_log2_size(game) <= EXHAUSTIVE_POINTWISE_LOG2;
    let points = if exhaustive {
        all_restrictions(game, EXHAUSTIVE_POINTWISE_LOG2)?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = vec![game.full()];
        points.extend((1..samples).map(|_| random_restriction(game, &mut rng)));
        points
    };
    for g in &points {
        let image2 = op2.apply(g);
        if !image2.is_subset(g) {
            return Err(Error::PremiseViolated {
                premise: format!("{} is contracting", op2.name()),
                witness: g.clone(),
            });
        }
        if !op1.apply(g).is_subset(&image2) {
            return Err(Error::PremiseViolated {
                premise: format!("{}(G) <= {}(G)", op1.name(), op2.name()),
                witness: g.clone(),
            });
        }
    }

    let op1_monotonicity = if exhaustive {
        check_monotonicity_exhaustive(op1, game, EXHAUSTIVE_POINTWISE_LOG2)?
    } else {
        probe_monotonicity(op1, game, samples, seed.wrapping_add(1))
    };
    if let MonotonicityProbe::Counterexample { smaller, .. } = &op1_monotonicity {
        return Err(Error::PremiseViolated {
            premise: format!("{} is monotonic", op1.name()),
            witness: smaller.clone(),
        });
    }

    let top = game.full();
    let trace1 = iterate_to_outcome(op1, &top)?;
    let trace2 = iterate_to_outcome(op2, &top).map_err(|e| match e {
        Error::NonContractingStep { stage, .. } => Error::PremiseViolated {
            premise: format!("{} is contracting at stage {stage}", op2.name()),
            witness: top.clone(),
        },
        other => other,
    })?;
    let op1_outcome = trace1.outcome().clone();
    let op2_outcome = trace2.outcome().clone();
    Ok(InclusionReport {
        pointwise_checked: points.len(),
        exhaustive,
        op1_monotonicity,
        conclusion_holds: op1_outcome.is_subset(&op2_outcome),
        op1_outcome,
        op2_outcome,
        op1_trace_len: trace1.stages.len(),
        op2_trace_len: trace2.stages.len(),
    })
}
