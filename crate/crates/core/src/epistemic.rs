//! Finite epistemic models for games.
//!
//! A [`GameModel`] is a state space with one strategy map per player; an
//! [`EpistemicModel`] adds one possibility correspondence per player. The
//! class of a model (belief, knowledge or invalid) is computed from the
//! correspondences, never declared.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::elimination::{outcome_restriction, Mode, NotionProfile};
use crate::error::{Error, Result};
use crate::game::{Game, Player, Restriction, StrategyId, StrategySet};
use crate::optimality::holds;

/// A set of states.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Event(FixedBitSet);

impl Event {
    pub fn empty(states: usize) -> Self {
        Event(FixedBitSet::with_capacity(states))
    }

    pub fn full(states: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(states);
        bits.insert_range(..);
        Event(bits)
    }

    pub fn from_states(states: usize, members: impl IntoIterator<Item = usize>) -> Self {
        let mut e = Event::empty(states);
        for w in members {
            e.insert(w);
        }
        e
    }

    /// The event whose members are the set bits of `mask`.
    pub fn from_mask(states: usize, mask: u64) -> Self {
        Event::from_states(states, (0..states).filter(|w| mask >> w & 1 == 1))
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, w: usize) -> bool {
        self.0.contains(w)
    }

    pub fn insert(&mut self, w: usize) {
        self.0.insert(w);
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_subset(&self, other: &Event) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn intersection(&self, other: &Event) -> Event {
        let mut out = self.0.clone();
        out.intersect_with(&other.0);
        Event(out)
    }

    pub fn union(&self, other: &Event) -> Event {
        let mut out = self.0.clone();
        out.union_with(&other.0);
        Event(out)
    }

    pub fn complement(&self) -> Event {
        let mut out = self.0.clone();
        out.toggle_range(..);
        Event(out)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelClass {
    Knowledge,
    Belief,
    Invalid,
}

impl ModelClass {
    pub fn name(self) -> &'static str {
        match self {
            ModelClass::Knowledge => "knowledge",
            ModelClass::Belief => "belief",
            ModelClass::Invalid => "invalid",
        }
    }
}

/// `P : states -> events`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PossibilityCorrespondence {
    cells: Vec<Event>,
}

impl PossibilityCorrespondence {
    pub fn new(cells: Vec<Event>) -> Result<Self> {
        let n = cells.len();
        if let Some(bad) = cells.iter().position(|c| c.universe() != n) {
            return Err(Error::InvalidModel(format!(
                "possibility set of state {bad} ranges over {} states, expected {n}",
                cells[bad].universe()
            )));
        }
        Ok(PossibilityCorrespondence { cells })
    }

    /// `P(w) = {w}` for every state.
    pub fn identity(states: usize) -> Self {
        PossibilityCorrespondence {
            cells: (0..states)
                .map(|w| Event::from_states(states, [w]))
                .collect(),
        }
    }

    /// Every state of a block sees exactly its block.
    pub fn from_partition(states: usize, blocks: &[Event]) -> Result<Self> {
        let mut cells = vec![None; states];
        for block in blocks {
            for w in block.iter() {
                if cells[w].replace(block.clone()).is_some() {
                    return Err(Error::InvalidModel(format!("state {w} lies in two blocks")));
                }
            }
        }
        let cells = cells
            .into_iter()
            .enumerate()
            .map(|(w, c)| c.ok_or_else(|| Error::InvalidModel(format!("state {w} is in no block"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(PossibilityCorrespondence { cells })
    }

    pub fn num_states(&self) -> usize {
        self.cells.len()
    }

    pub fn at(&self, w: usize) -> &Event {
        &self.cells[w]
    }

    pub fn cells(&self) -> &[Event] {
        &self.cells
    }

    /// Property (i): every possibility set is non-empty.
    pub fn is_serial(&self) -> bool {
        self.cells.iter().all(|c| !c.is_empty())
    }

    /// Property (ii): `w' in P(w)` implies `P(w') = P(w)`.
    pub fn is_coherent(&self) -> bool {
        self.cells
            .iter()
            .all(|c| c.iter().all(|v| self.cells[v] == *c))
    }

    /// Property (iii): `w in P(w)`.
    pub fn is_reflexive(&self) -> bool {
        self.cells.iter().enumerate().all(|(w, c)| c.contains(w))
    }

    pub fn class(&self) -> ModelClass {
        match (self.is_serial() && self.is_coherent(), self.is_reflexive()) {
            (true, true) => ModelClass::Knowledge,
            (true, false) => ModelClass::Belief,
            _ => ModelClass::Invalid,
        }
    }

    /// The distinct possibility sets, in order of first occurrence.
    pub fn blocks(&self) -> Vec<Event> {
        let mut out: Vec<Event> = Vec::new();
        for c in &self.cells {
            if !out.contains(c) {
                out.push(c.clone());
            }
        }
        out
    }

    /// The partition `{P(w)}` of a knowledge correspondence; `None` when the
    /// sets do not partition the state space.
    pub fn partition(&self) -> Option<Vec<Event>> {
        let blocks = self.blocks();
        let n = self.num_states();
        let mut covered = Event::empty(n);
        for b in &blocks {
            if b.is_empty() || !b.intersection(&covered).is_empty() {
                return None;
            }
            covered = covered.union(b);
        }
        (covered == Event::full(n)).then_some(blocks)
    }
}

/// A model for a restriction: states with one strategy map per player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameModel {
    states: Vec<String>,
    /// `maps[i][w]` is player `i`'s strategy at state `w`.
    maps: Vec<Vec<StrategyId>>,
}

impl GameModel {
    pub fn new(game: &Game, states: Vec<String>, maps: Vec<Vec<StrategyId>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::EmptyStateSpace);
        }
        for (k, label) in states.iter().enumerate() {
            if states[..k].contains(label) {
                return Err(Error::InvalidModel(format!(
                    "duplicate state label `{label}`"
                )));
            }
        }
        if maps.len() != game.num_players() {
            return Err(Error::InvalidModel(format!(
                "{} strategy maps for a {}-player game",
                maps.len(),
                game.num_players()
            )));
        }
        for (i, map) in maps.iter().enumerate() {
            if map.len() != states.len() {
                return Err(Error::InvalidModel(format!(
                    "strategy map of player {} is not total",
                    i + 1
                )));
            }
            if let Some(&s) = map.iter().find(|&&s| s >= game.num_strategies(i)) {
                return Err(Error::InvalidModel(format!(
                    "player {} has no strategy {s}",
                    i + 1
                )));
            }
        }
        Ok(GameModel { states, maps })
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_players(&self) -> usize {
        self.maps.len()
    }

    pub fn state_labels(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }

    /// `s_i(w)`.
    pub fn strategy(&self, i: Player, w: usize) -> StrategyId {
        self.maps[i][w]
    }

    pub fn full_event(&self) -> Event {
        Event::full(self.num_states())
    }

    /// `G_E = (s_1(E_1), .., s_n(E_n))`.
    pub fn restriction_of(&self, events: &[Event]) -> Restriction {
        assert_eq!(events.len(), self.num_players());
        Restriction::new(
            events
                .iter()
                .enumerate()
                .map(|(i, e)| e.iter().map(|w| self.maps[i][w]).collect::<StrategySet>())
                .collect(),
        )
    }

    /// `G_E` with the same event for every player.
    pub fn restriction_of_event(&self, event: &Event) -> Restriction {
        self.restriction_of(&vec![event.clone(); self.num_players()])
    }

    /// The joint strategy played at `w`.
    pub fn joint_at(&self, w: usize) -> Vec<StrategyId> {
        self.maps.iter().map(|m| m[w]).collect()
    }

    pub fn with_correspondences(
        self,
        correspondences: Vec<PossibilityCorrespondence>,
    ) -> Result<EpistemicModel> {
        EpistemicModel::new(self, correspondences)
    }

    pub fn render_event(&self, e: &Event) -> String {
        let names: Vec<&str> = e.iter().map(|w| self.states[w].as_str()).collect();
        format!("{{{}}}", names.join(" "))
    }
}

/// The standard model of `G`: states are the joint strategies of `G`, and
/// each strategy map is a projection.
pub fn standard_model(game: &Game, g: &Restriction) -> Result<GameModel> {
    if g.has_empty_component() {
        return Err(Error::EmptyStateSpace);
    }
    let joints = g.joint_strategies();
    let states = joints
        .iter()
        .map(|j| {
            j.iter()
                .enumerate()
                .map(|(i, &s)| game.label(i, s))
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    let maps = (0..game.num_players())
        .map(|i| joints.iter().map(|j| j[i]).collect())
        .collect();
    GameModel::new(game, states, maps)
}

/// A model with one possibility correspondence per player.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpistemicModel {
    frame: GameModel,
    correspondences: Vec<PossibilityCorrespondence>,
    class: ModelClass,
}

impl EpistemicModel {
    pub fn new(frame: GameModel, correspondences: Vec<PossibilityCorrespondence>) -> Result<Self> {
        if correspondences.len() != frame.num_players() {
            return Err(Error::InvalidModel(format!(
                "{} correspondences for {} players",
                correspondences.len(),
                frame.num_players()
            )));
        }
        if let Some(i) = correspondences
            .iter()
            .position(|p| p.num_states() != frame.num_states())
        {
            return Err(Error::InvalidModel(format!(
                "correspondence of player {} covers the wrong number of states",
                i + 1
            )));
        }
        let classes: Vec<ModelClass> = correspondences.iter().map(|p| p.class()).collect();
        let class = if classes.iter().all(|&c| c == ModelClass::Knowledge) {
            ModelClass::Knowledge
        } else if classes.iter().all(|&c| c != ModelClass::Invalid) {
            ModelClass::Belief
        } else {
            ModelClass::Invalid
        };
        Ok(EpistemicModel {
            frame,
            correspondences,
            class,
        })
    }

    pub fn frame(&self) -> &GameModel {
        &self.frame
    }

    pub fn class(&self) -> ModelClass {
        self.class
    }

    pub fn num_states(&self) -> usize {
        self.frame.num_states()
    }

    pub fn num_players(&self) -> usize {
        self.frame.num_players()
    }

    pub fn correspondence(&self, i: Player) -> &PossibilityCorrespondence {
        &self.correspondences[i]
    }

    pub fn correspondences(&self) -> &[PossibilityCorrespondence] {
        &self.correspondences
    }

    pub fn restriction_of(&self, events: &[Event]) -> Restriction {
        self.frame.restriction_of(events)
    }

    pub fn restriction_of_event(&self, event: &Event) -> Restriction {
        self.frame.restriction_of_event(event)
    }

    pub fn full_event(&self) -> Event {
        self.frame.full_event()
    }

    fn require_valid(&self) -> Result<()> {
        if self.class == ModelClass::Invalid {
            let bad: Vec<String> = self
                .correspondences
                .iter()
                .enumerate()
                .filter(|(_, p)| p.class() == ModelClass::Invalid)
                .map(|(i, p)| format!("player {} ({})", i + 1, property_summary(p)))
                .collect();
            return Err(Error::InvalidModel(format!(
                "not a belief model: {}",
                bad.join(", ")
            )));
        }
        Ok(())
    }

    pub fn require_knowledge(&self) -> Result<()> {
        self.require_valid()?;
        if self.class != ModelClass::Knowledge {
            return Err(Error::InvalidModel("not a knowledge model".into()));
        }
        Ok(())
    }

    fn box_unchecked(&self, e: &Event) -> Event {
        let n = self.num_states();
        Event::from_states(
            n,
            (0..n).filter(|&w| self.correspondences.iter().all(|p| p.at(w).is_subset(e))),
        )
    }

    /// `box E`: the states where every player's possibility set lies in `E`.
    pub fn box_event(&self, e: &Event) -> Result<Event> {
        self.require_valid()?;
        Ok(self.box_unchecked(e))
    }

    /// `box^k E` for `k >= 1`.
    pub fn box_power(&self, e: &Event, k: usize) -> Result<Event> {
        self.require_valid()?;
        assert!(k >= 1);
        let mut x = self.box_unchecked(e);
        for _ in 1..k {
            x = self.box_unchecked(&x);
        }
        Ok(x)
    }

    /// `box* E`, the intersection of `box^k E` over all `k >= 1`.
    pub fn common_box(&self, e: &Event) -> Result<Event> {
        self.common_box_chain(e).map(|c| c.event)
    }

    /// `box* E` together with the chain `box^1 E, box^2 E, ..` up to its
    /// first repetition. The chain is eventually periodic on a finite state
    /// space, so intersecting the distinct values seen is exact.
    pub fn common_box_chain(&self, e: &Event) -> Result<CommonBox> {
        self.require_valid()?;
        let mut chain = vec![self.box_unchecked(e)];
        loop {
            let next = self.box_unchecked(chain.last().expect("non-empty chain"));
            if chain.contains(&next) {
                let stabilized_at = (chain.last() == Some(&next)).then_some(chain.len());
                let event = chain
                    .iter()
                    .fold(self.full_event(), |acc, x| acc.intersection(x));
                return Ok(CommonBox {
                    event,
                    chain,
                    stabilized_at,
                });
            }
            chain.push(next);
        }
    }

    /// `F` is evident when `F <= box F`.
    pub fn is_evident(&self, f: &Event) -> Result<bool> {
        self.require_valid()?;
        Ok(f.is_subset(&self.box_unchecked(f)))
    }

    /// The largest evident event inside `E`: iterate `F <- F & box F` from `E`.
    pub fn largest_evident_inside(&self, e: &Event) -> Result<Event> {
        self.require_valid()?;
        let mut f = e.clone();
        loop {
            let next = f.intersection(&self.box_unchecked(&f));
            if next == f {
                return Ok(f);
            }
            f = next;
        }
    }

    /// `RAT(phi)`: the states where every player `i` satisfies
    /// `phi_i(s_i(w), H_i, (G_{P_i(w)})_-i)`.
    pub fn rat_event(&self, game: &Game, profile: &NotionProfile) -> Result<Event> {
        self.require_valid()?;
        profile.validate_for(game)?;
        let n = self.num_states();
        let mut cache: HashMap<(Player, StrategyId, &Event), bool> = HashMap::new();
        let mut rat = Event::empty(n);
        'states: for w in 0..n {
            for i in 0..self.num_players() {
                let s = self.frame.strategy(i, w);
                let cell = self.correspondences[i].at(w);
                let ok = match cache.get(&(i, s, cell)) {
                    Some(&ok) => ok,
                    None => {
                        let believed = self.restriction_of_event(cell);
                        let opponents = believed.opponents_product(i);
                        let ok = holds(
                            profile.notion(i),
                            game,
                            i,
                            s,
                            game.strategies(i),
                            &opponents,
                        )?;
                        cache.insert((i, s, cell), ok);
                        ok
                    }
                };
                if !ok {
                    continue 'states;
                }
            }
            rat.insert(w);
        }
        Ok(rat)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonBox {
    pub event: Event,
    /// `chain[k]` is `box^{k+1} E`.
    pub chain: Vec<Event>,
    /// Number of distinct chain elements when the chain became constant;
    /// `None` if it entered a longer cycle (never for belief models).
    pub stabilized_at: Option<usize>,
}

/// `"(i) yes, (ii) no, (iii) yes"`-style summary.
pub fn property_summary(p: &PossibilityCorrespondence) -> String {
    let yn = |b: bool| if b { "yes" } else { "no" };
    format!(
        "(i) {}, (ii) {}, (iii) {}",
        yn(p.is_serial()),
        yn(p.is_coherent()),
        yn(p.is_reflexive())
    )
}

/// Standard model of `H` where every player's possibility set is
/// `F = T_phi^inf` (as a set of states) inside `F` and its complement
/// outside. The result is a knowledge model, also when `F` is empty or
/// everything.
pub fn thm1iii_model(game: &Game, profile: &NotionProfile) -> Result<EpistemicModel> {
    let frame = standard_model(game, &game.full())?;
    let limit = outcome_restriction(profile, game, Mode::Global)?;
    let n = frame.num_states();
    let inside = Event::from_states(
        n,
        (0..n).filter(|&w| limit.contains_joint(&frame.joint_at(w))),
    );
    let outside = inside.complement();
    let cells: Vec<Event> = (0..n)
        .map(|w| {
            if inside.contains(w) {
                inside.clone()
            } else {
                outside.clone()
            }
        })
        .collect();
    let p = PossibilityCorrespondence::new(cells)?;
    frame.with_correspondences(vec![p; game.num_players()])
}

/// Standard model of `H` with `P_i(w) = {w}` for all players.
pub fn thm2_model(game: &Game) -> Result<EpistemicModel> {
    let frame = standard_model(game, &game.full())?;
    let p = PossibilityCorrespondence::identity(frame.num_states());
    frame.with_correspondences(vec![p; game.num_players()])
}
