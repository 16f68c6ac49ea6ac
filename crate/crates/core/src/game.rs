//! Finite strategic games with exact payoffs, restrictions of a game, and
//! the belief/mixed-strategy machinery used to lift payoffs to expectations.
//!
//! Players and strategies are addressed by zero-based indices. Labels are
//! kept only for input and output; label order fixes iteration order.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;
pub type Player = usize;
pub type StrategyId = usize;

/// One strategy per player, in player order.
pub type JointStrategy = Vec<StrategyId>;

/// One strategy per opponent of some player `i`, in player order with `i`
/// left out.
pub type OpponentProfile = Vec<StrategyId>;

/// Most strategies a single player may have.
pub const MAX_STRATEGIES: usize = 64;

/// A subset of one player's strategies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct StrategySet(u64);

impl StrategySet {
    pub const fn empty() -> Self {
        StrategySet(0)
    }

    /// The set `{0, .., count - 1}`.
    pub fn full(count: usize) -> Self {
        assert!(count <= MAX_STRATEGIES);
        if count == MAX_STRATEGIES {
            StrategySet(u64::MAX)
        } else {
            StrategySet((1u64 << count) - 1)
        }
    }

    pub fn singleton(s: StrategyId) -> Self {
        assert!(s < MAX_STRATEGIES);
        StrategySet(1u64 << s)
    }

    pub const fn from_bits(bits: u64) -> Self {
        StrategySet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn contains(self, s: StrategyId) -> bool {
        s < MAX_STRATEGIES && self.0 & (1u64 << s) != 0
    }

    pub fn insert(&mut self, s: StrategyId) {
        assert!(s < MAX_STRATEGIES);
        self.0 |= 1u64 << s;
    }

    pub fn remove(&mut self, s: StrategyId) {
        if s < MAX_STRATEGIES {
            self.0 &= !(1u64 << s);
        }
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: StrategySet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: StrategySet) -> StrategySet {
        StrategySet(self.0 | other.0)
    }

    pub fn intersection(self, other: StrategySet) -> StrategySet {
        StrategySet(self.0 & other.0)
    }

    /// Members in increasing order.
    pub fn iter(self) -> impl Iterator<Item = StrategyId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let s = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(s)
            }
        })
    }
}

impl FromIterator<StrategyId> for StrategySet {
    fn from_iter<I: IntoIterator<Item = StrategyId>>(iter: I) -> Self {
        let mut set = StrategySet::empty();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

impl fmt::Debug for StrategySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A finite n-player strategic game with rational payoffs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    labels: Vec<Vec<String>>,
    strides: Vec<usize>,
    /// `payoffs[i][k]` is player `i`'s payoff at the joint strategy with
    /// flat index `k` (last player varies fastest).
    payoffs: Vec<Vec<Rational>>,
}

impl Game {
    /// Builds a game from strategy labels and per-player payoff tables in
    /// flat (last-player-fastest) order.
    pub fn new(labels: Vec<Vec<String>>, payoffs: Vec<Vec<Rational>>) -> Result<Game> {
        let n = labels.len();
        if n < 2 {
            return Err(Error::Validation(format!(
                "a game needs at least 2 players, got {n}"
            )));
        }
        for (i, set) in labels.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Validation(format!(
                    "player {} has no strategies",
                    i + 1
                )));
            }
            if set.len() > MAX_STRATEGIES {
                return Err(Error::Validation(format!(
                    "player {} has {} strategies, at most {MAX_STRATEGIES} are supported",
                    i + 1,
                    set.len()
                )));
            }
            for (a, label) in set.iter().enumerate() {
                if set[..a].contains(label) {
                    return Err(Error::Validation(format!(
                        "duplicate strategy label `{label}` for player {}",
                        i + 1
                    )));
                }
            }
        }
        let mut strides = vec![1; n];
        for i in (0..n - 1).rev() {
            strides[i] = strides[i + 1] * labels[i + 1].len();
        }
        let cells = strides[0] * labels[0].len();
        if payoffs.len() != n || payoffs.iter().any(|p| p.len() != cells) {
            return Err(Error::Validation(format!(
                "expected {n} payoff tables of {cells} entries each"
            )));
        }
        Ok(Game {
            labels,
            strides,
            payoffs,
        })
    }

    /// Builds a game by evaluating `payoff(player, joint)` on every joint
    /// strategy.
    pub fn from_fn(
        labels: Vec<Vec<String>>,
        mut payoff: impl FnMut(Player, &[StrategyId]) -> Rational,
    ) -> Result<Game> {
        let n = labels.len();
        let sizes: Vec<usize> = labels.iter().map(Vec::len).collect();
        let mut payoffs = vec![Vec::new(); n];
        for joint in product_of_sizes(&sizes) {
            for (i, table) in payoffs.iter_mut().enumerate() {
                table.push(payoff(i, &joint));
            }
        }
        Game::new(labels, payoffs)
    }

    /// Convenience constructor from integer payoff tables, used mostly by
    /// tests and generators.
    pub fn from_integers(labels: &[&[&str]], payoffs: &[&[i64]]) -> Result<Game> {
        let labels = labels
            .iter()
            .map(|set| set.iter().map(|s| s.to_string()).collect())
            .collect();
        let payoffs = payoffs
            .iter()
            .map(|table| {
                table
                    .iter()
                    .map(|&v| Rational::from_integer(v.into()))
                    .collect()
            })
            .collect();
        Game::new(labels, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.labels.len()
    }

    pub fn num_strategies(&self, i: Player) -> usize {
        self.labels[i].len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn labels(&self, i: Player) -> &[String] {
        &self.labels[i]
    }

    pub fn label(&self, i: Player, s: StrategyId) -> &str {
        &self.labels[i][s]
    }

    pub fn strategy_index(&self, i: Player, label: &str) -> Option<StrategyId> {
        self.labels[i].iter().position(|l| l == label)
    }

    /// `H_i`, the initial strategy set of player `i`.
    pub fn strategies(&self, i: Player) -> StrategySet {
        StrategySet::full(self.labels[i].len())
    }

    /// The top element of the restriction lattice.
    pub fn full(&self) -> Restriction {
        Restriction::new(
            (0..self.num_players())
                .map(|i| self.strategies(i))
                .collect(),
        )
    }

    pub fn payoff(&self, i: Player, joint: &[StrategyId]) -> &Rational {
        let k: usize = joint.iter().zip(&self.strides).map(|(s, w)| s * w).sum();
        &self.payoffs[i][k]
    }

    /// `p_i(s_i, s_{-i})`.
    pub fn payoff_against(
        &self,
        i: Player,
        s_i: StrategyId,
        opponents: &[StrategyId],
    ) -> &Rational {
        debug_assert_eq!(opponents.len() + 1, self.num_players());
        let mut k = s_i * self.strides[i];
        for (slot, s) in opponents.iter().enumerate() {
            let j = if slot < i { slot } else { slot + 1 };
            k += s * self.strides[j];
        }
        &self.payoffs[i][k]
    }

    /// Every joint strategy of the game, last player varying fastest.
    pub fn joint_strategies(&self) -> Vec<JointStrategy> {
        product_of_sizes(&self.strategy_counts())
    }

    pub fn is_restriction(&self, g: &Restriction) -> bool {
        g.num_players() == self.num_players()
            && g.components()
                .iter()
                .enumerate()
                .all(|(i, set)| set.is_subset(self.strategies(i)))
    }

    /// Renders `G` as `({a,b},{x})` using strategy labels.
    pub fn show(&self, g: &Restriction) -> String {
        let parts: Vec<String> = g
            .components()
            .iter()
            .enumerate()
            .map(|(i, set)| {
                let names: Vec<&str> = set.iter().map(|s| self.label(i, s)).collect();
                format!("{{{}}}", names.join(","))
            })
            .collect();
        format!("({})", parts.join(","))
    }

    pub fn show_joint(&self, joint: &[StrategyId]) -> String {
        let names: Vec<&str> = joint
            .iter()
            .enumerate()
            .map(|(i, &s)| self.label(i, s))
            .collect();
        format!("({})", names.join(","))
    }

    /// Renders an opponent profile of player `i`.
    pub fn show_opponents(&self, i: Player, opponents: &[StrategyId]) -> String {
        let names: Vec<&str> = opponents
            .iter()
            .enumerate()
            .map(|(slot, &s)| self.label(if slot < i { slot } else { slot + 1 }, s))
            .collect();
        format!("({})", names.join(","))
    }
}

/// Cartesian product `{0..sizes[0]} x ... x {0..sizes[k]}`, last index fastest.
fn product_of_sizes(sizes: &[usize]) -> Vec<Vec<usize>> {
    product_of_lists(
        &sizes
            .iter()
            .map(|&m| (0..m).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn product_of_lists(lists: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(lists.len())];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len());
        for prefix in &out {
            for &x in list {
                let mut row = prefix.clone();
                row.push(x);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// Inserts `s_i` at position `i` of an opponent profile.
pub fn compose(i: Player, s_i: StrategyId, opponents: &[StrategyId]) -> JointStrategy {
    let mut joint = Vec::with_capacity(opponents.len() + 1);
    joint.extend_from_slice(&opponents[..i]);
    joint.push(s_i);
    joint.extend_from_slice(&opponents[i..]);
    joint
}

/// Drops player `i`'s component of a joint strategy.
pub fn opponents_of(joint: &[StrategyId], i: Player) -> OpponentProfile {
    joint
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &s)| s)
        .collect()
}

/// A restriction `(G_1, .., G_n)` of some game. Components may be empty.
///
/// The restriction does not borrow its game; [`Game::is_restriction`]
/// checks that it fits one.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction {
    sets: Vec<StrategySet>,
}

impl Restriction {
    pub fn new(sets: Vec<StrategySet>) -> Self {
        Restriction { sets }
    }

    pub fn all_empty(players: usize) -> Self {
        Restriction {
            sets: vec![StrategySet::empty(); players],
        }
    }

    /// `G_s`: one strategy per player.
    pub fn singleton(joint: &[StrategyId]) -> Self {
        Restriction {
            sets: joint.iter().map(|&s| StrategySet::singleton(s)).collect(),
        }
    }

    pub fn num_players(&self) -> usize {
        self.sets.len()
    }

    pub fn component(&self, i: Player) -> StrategySet {
        self.sets[i]
    }

    pub fn components(&self) -> &[StrategySet] {
        &self.sets
    }

    pub fn set_component(&mut self, i: Player, set: StrategySet) {
        self.sets[i] = set;
    }

    /// Componentwise inclusion, the lattice order.
    pub fn is_subset(&self, other: &Restriction) -> bool {
        self.sets.len() == other.sets.len()
            && self
                .sets
                .iter()
                .zip(&other.sets)
                .all(|(a, b)| a.is_subset(*b))
    }

    pub fn meet(&self, other: &Restriction) -> Restriction {
        Restriction::new(
            self.sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.intersection(*b))
                .collect(),
        )
    }

    pub fn join(&self, other: &Restriction) -> Restriction {
        Restriction::new(
            self.sets
                .iter()
                .zip(&other.sets)
                .map(|(a, b)| a.union(*b))
                .collect(),
        )
    }

    pub fn has_empty_component(&self) -> bool {
        self.sets.iter().any(|s| s.is_empty())
    }

    pub fn is_all_empty(&self) -> bool {
        self.sets.iter().all(|s| s.is_empty())
    }

    pub fn contains_joint(&self, joint: &[StrategyId]) -> bool {
        joint.len() == self.sets.len()
            && joint
                .iter()
                .zip(&self.sets)
                .all(|(&s, set)| set.contains(s))
    }

    /// `G_{-i}`: the product of all components except `i`. Empty when any
    /// of those components is empty.
    pub fn opponents_product(&self, i: Player) -> Vec<OpponentProfile> {
        let lists: Vec<Vec<usize>> = self
            .sets
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, set)| set.iter().collect())
            .collect();
        product_of_lists(&lists)
    }

    /// `G_1 x .. x G_n`.
    pub fn joint_strategies(&self) -> Vec<JointStrategy> {
        let lists: Vec<Vec<usize>> = self.sets.iter().map(|set| set.iter().collect()).collect();
        product_of_lists(&lists)
    }
}

impl fmt::Debug for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Restriction").field(&self.sets).finish()
    }
}

/// A probability distribution over a subset of one player's strategies.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MixedStrategy {
    owner: Player,
    weights: BTreeMap<StrategyId, Rational>,
}

impl MixedStrategy {
    /// Zero weights are dropped; the rest must be non-negative and sum to 1.
    pub fn new(
        owner: Player,
        weights: impl IntoIterator<Item = (StrategyId, Rational)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (s, w) in weights {
            if w < Rational::zero() {
                return Err(Error::Validation(format!(
                    "negative weight {w} on strategy {s}"
                )));
            }
            if !w.is_zero() {
                *map.entry(s).or_insert_with(Rational::zero) += w;
            }
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::Validation(format!(
                "mixed strategy weights sum to {total}, not 1"
            )));
        }
        Ok(MixedStrategy {
            owner,
            weights: map,
        })
    }

    pub fn pure(owner: Player, s: StrategyId) -> Self {
        MixedStrategy {
            owner,
            weights: BTreeMap::from([(s, Rational::one())]),
        }
    }

    pub fn owner(&self) -> Player {
        self.owner
    }

    pub fn weight(&self, s: StrategyId) -> Rational {
        self.weights.get(&s).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn weights(&self) -> &BTreeMap<StrategyId, Rational> {
        &self.weights
    }

    pub fn support(&self) -> StrategySet {
        self.weights.keys().copied().collect()
    }
}

/// What a player believes the opponents play.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Belief {
    Point(OpponentProfile),
    /// One mixed strategy per opponent, in player order.
    Independent(Vec<MixedStrategy>),
    /// A distribution over opponent profiles.
    Correlated(Vec<(OpponentProfile, Rational)>),
}

impl Belief {
    /// Validated correlated belief; zero-weight atoms are dropped.
    pub fn correlated(
        atoms: impl IntoIterator<Item = (OpponentProfile, Rational)>,
    ) -> Result<Belief> {
        let mut merged: BTreeMap<OpponentProfile, Rational> = BTreeMap::new();
        for (profile, w) in atoms {
            if w < Rational::zero() {
                return Err(Error::Validation(format!("negative belief weight {w}")));
            }
            if !w.is_zero() {
                *merged.entry(profile).or_insert_with(Rational::zero) += w;
            }
        }
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::Validation(format!(
                "belief weights sum to {total}, not 1"
            )));
        }
        Ok(Belief::Correlated(merged.into_iter().collect()))
    }

    /// The belief as a distribution over opponent profiles.
    pub fn atoms(&self) -> Vec<(OpponentProfile, Rational)> {
        match self {
            Belief::Point(profile) => vec![(profile.clone(), Rational::one())],
            Belief::Correlated(atoms) => atoms.clone(),
            Belief::Independent(mixes) => {
                let mut out = vec![(Vec::new(), Rational::one())];
                for m in mixes {
                    let mut next = Vec::new();
                    for (prefix, p) in &out {
                        for (s, w) in m.weights() {
                            let mut profile = prefix.clone();
                            profile.push(*s);
                            next.push((profile, p * w));
                        }
                    }
                    out = next;
                }
                out
            }
        }
    }

    /// True when every atom with positive weight lies in `opponents`.
    pub fn supported_within(&self, opponents: &[OpponentProfile]) -> bool {
        self.atoms()
            .iter()
            .all(|(profile, _)| opponents.contains(profile))
    }
}

/// Player `i`'s own play: a pure strategy or a mixture.
#[derive(Clone, Copy, Debug)]
pub enum Play<'a> {
    Pure(StrategyId),
    Mixed(&'a MixedStrategy),
}

/// Exact expected payoff of `play` for player `i` against `belief`.
pub fn expected_payoff(game: &Game, i: Player, play: Play<'_>, belief: &Belief) -> Rational {
    let own: Vec<(StrategyId, Rational)> = match play {
        Play::Pure(s) => vec![(s, Rational::one())],
        Play::Mixed(m) => m.weights().iter().map(|(s, w)| (*s, w.clone())).collect(),
    };
    let mut total = Rational::zero();
    for (profile, p) in belief.atoms() {
        for (s, w) in &own {
            total += &p * w * game.payoff_against(i, *s, &profile);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn apt_game() -> Game {
        Game::from_integers(&[&["U", "D"], &["L", "R"]], &[&[1, 0, 1, 1], &[1, 1, 0, 1]]).unwrap()
    }

    #[test]
    fn payoff_indexing_matches_table() {
        let g = apt_game();
        assert_eq!(g.payoff(0, &[0, 1]), &r(0, 1));
        assert_eq!(g.payoff(1, &[1, 0]), &r(0, 1));
        assert_eq!(g.payoff_against(1, 0, &[1]), &r(0, 1));
        assert_eq!(g.payoff_against(0, 1, &[1]), &r(1, 1));
    }

    #[test]
    fn opponents_product_cases() {
        let g = apt_game();
        assert_eq!(g.full().opponents_product(0), vec![vec![0], vec![1]]);

        let three = Restriction::new(vec![
            StrategySet::full(2),
            StrategySet::from_iter([0, 1]),
            StrategySet::singleton(0),
        ]);
        assert_eq!(three.opponents_product(0), vec![vec![0, 0], vec![1, 0]]);

        let hole = Restriction::new(vec![
            StrategySet::full(2),
            StrategySet::empty(),
            StrategySet::full(2),
        ]);
        assert!(hole.opponents_product(0).is_empty());
    }

    #[test]
    fn rejects_bad_games() {
        let one = Game::from_integers(&[&["a"]], &[&[1]]);
        assert!(matches!(one, Err(Error::Validation(_))));
        let dup = Game::from_integers(&[&["a", "a"], &["x"]], &[&[1, 1], &[1, 1]]);
        assert!(matches!(dup, Err(Error::Validation(_))));
        let short = Game::from_integers(&[&["a", "b"], &["x"]], &[&[1], &[1, 1]]);
        assert!(matches!(short, Err(Error::Validation(_))));
    }

    #[test]
    fn expected_payoff_examples() {
        let g = apt_game();
        assert_eq!(
            expected_payoff(&g, 0, Play::Pure(0), &Belief::Point(vec![0])),
            r(1, 1)
        );

        // p_1: T=(3,0), B=(0,3); half/half against half/half
        let g = Game::from_integers(&[&["T", "B"], &["L", "R"]], &[&[3, 0, 0, 3], &[0, 0, 0, 0]])
            .unwrap();
        let mix = MixedStrategy::new(0, [(0, r(1, 2)), (1, r(1, 2))]).unwrap();
        let belief = Belief::correlated([(vec![0], r(1, 2)), (vec![1], r(1, 2))]).unwrap();
        assert_eq!(expected_payoff(&g, 0, Play::Mixed(&mix), &belief), r(3, 2));
    }

    #[test]
    fn independent_belief_multiplies() {
        let g = Game::from_fn(
            vec![
                vec!["a".into()],
                vec!["x".into(), "y".into()],
                vec!["p".into(), "q".into()],
            ],
            |_, joint| Rational::from_integer((joint[1] * 2 + joint[2]).into()),
        )
        .unwrap();
        let b = Belief::Independent(vec![
            MixedStrategy::new(1, [(0, r(1, 4)), (1, r(3, 4))]).unwrap(),
            MixedStrategy::new(2, [(0, r(1, 2)), (1, r(1, 2))]).unwrap(),
        ]);
        // E = 1/4*(0+1)/2 + 3/4*(2+3)/2 = 1/8 + 15/8
        assert_eq!(expected_payoff(&g, 0, Play::Pure(0), &b), r(2, 1));
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(0, [(0, r(1, 2))]).is_err());
        assert!(MixedStrategy::new(0, [(0, r(3, 2)), (1, r(-1, 2))]).is_err());
        let m = MixedStrategy::new(0, [(0, r(1, 1)), (1, r(0, 1))]).unwrap();
        assert_eq!(m.support(), StrategySet::singleton(0));
    }

    #[test]
    fn compose_and_split() {
        assert_eq!(compose(1, 7, &[3, 4]), vec![3, 7, 4]);
        assert_eq!(opponents_of(&[3, 7, 4], 1), vec![3, 4]);
    }
}
