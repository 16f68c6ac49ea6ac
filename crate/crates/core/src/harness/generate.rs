//! Seeded random games and epistemic models.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::epistemic::{EpistemicModel, Event, GameModel, ModelClass, PossibilityCorrespondence};
use crate::error::{Error, Result};
use crate::game::{Game, Rational, MAX_STRATEGIES};

/// Default desk-scale caps, lifted by [`GeneratorConfig::uncapped`].
pub const MAX_PLAYERS: usize = 4;
pub const MAX_STRATEGIES_PER_PLAYER: usize = 5;
pub const MAX_STATES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Inclusive range of player counts.
    pub players: (usize, usize),
    /// Inclusive range of strategies per player.
    pub strategies: (usize, usize),
    pub payoff_pool: Vec<Rational>,
    /// Inclusive range of model sizes.
    pub states: (usize, usize),
    pub target: ModelClass,
    pub uncapped: bool,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            players: (2, 3),
            strategies: (1, 4),
            payoff_pool: (0..4).map(|v| Rational::from_integer(v.into())).collect(),
            states: (1, 8),
            target: ModelClass::Belief,
            uncapped: false,
        }
    }
}

impl GeneratorConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_players(mut self, lo: usize, hi: usize) -> Self {
        self.players = (lo, hi);
        self
    }

    pub fn with_strategies(mut self, lo: usize, hi: usize) -> Self {
        self.strategies = (lo, hi);
        self
    }

    pub fn with_states(mut self, lo: usize, hi: usize) -> Self {
        self.states = (lo, hi);
        self
    }

    pub fn with_target(mut self, target: ModelClass) -> Self {
        self.target = target;
        self
    }

    pub fn with_integer_payoffs(mut self, lo: i64, hi: i64) -> Self {
        self.payoff_pool = (lo..=hi)
            .map(|v| Rational::from_integer(v.into()))
            .collect();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        let ordered = |(lo, hi): (usize, usize)| lo <= hi;
        if !ordered(self.players) || self.players.0 < 2 {
            return bad("player range must be non-empty and start at 2 or more");
        }
        if !ordered(self.strategies) || self.strategies.0 < 1 || self.strategies.1 > MAX_STRATEGIES
        {
            return bad("strategy range must be non-empty within 1..=64");
        }
        if !ordered(self.states) || self.states.0 < 1 {
            return bad("state range must be non-empty and start at 1 or more");
        }
        if self.payoff_pool.is_empty() {
            return bad("payoff pool is empty");
        }
        if self.target == ModelClass::Invalid {
            return bad("models are generated as belief or knowledge models");
        }
        if !self.uncapped
            && (self.players.1 > MAX_PLAYERS
                || self.strategies.1 > MAX_STRATEGIES_PER_PLAYER
                || self.states.1 > MAX_STATES)
        {
            return bad("size above desk-scale caps (players 4, strategies 5, states 12)");
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Seed of the `k`-th instance of a suite run with `base`.
pub fn instance_seed(base: u64, k: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";

pub fn generate_game(config: &GeneratorConfig) -> Result<Game> {
    config.validate()?;
    generate_game_with(config, &mut config.rng())
}

pub fn generate_game_with(config: &GeneratorConfig, rng: &mut impl Rng) -> Result<Game> {
    let n = rng.gen_range(config.players.0..=config.players.1);
    let labels: Vec<Vec<String>> = (0..n)
        .map(|i| {
            let m = rng.gen_range(config.strategies.0..=config.strategies.1);
            (0..m)
                .map(|s| format!("{}{}", LETTERS[i % LETTERS.len()] as char, s + 1))
                .collect()
        })
        .collect();
    Game::from_fn(labels, |_, _| {
        config
            .payoff_pool
            .choose(rng)
            .expect("non-empty pool")
            .clone()
    })
}

pub fn generate_model(config: &GeneratorConfig, game: &Game) -> Result<EpistemicModel> {
    config.validate()?;
    // Decorrelate from the game drawn with the same seed.
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(config.seed, u64::MAX));
    generate_model_with(config, game, &mut rng)
}

pub fn generate_model_with(
    config: &GeneratorConfig,
    game: &Game,
    rng: &mut impl Rng,
) -> Result<EpistemicModel> {
    let states = rng.gen_range(config.states.0..=config.states.1);
    let labels = (0..states).map(|w| format!("w{w}")).collect();
    let maps = (0..game.num_players())
        .map(|i| {
            (0..states)
                .map(|_| rng.gen_range(0..game.num_strategies(i)))
                .collect()
        })
        .collect();
    let frame = GameModel::new(game, labels, maps)?;
    let correspondences = (0..game.num_players())
        .map(|_| match config.target {
            ModelClass::Knowledge => random_knowledge_correspondence(states, rng),
            _ => random_belief_correspondence(states, rng),
        })
        .collect();
    frame.with_correspondences(correspondences)
}

/// Each state gets a random block label; blocks are the label classes.
pub fn random_knowledge_correspondence(
    states: usize,
    rng: &mut impl Rng,
) -> PossibilityCorrespondence {
    let blocks_wanted = rng.gen_range(1..=states);
    let labels: Vec<usize> = (0..states)
        .map(|_| rng.gen_range(0..blocks_wanted))
        .collect();
    let blocks: Vec<Event> = (0..blocks_wanted)
        .map(|b| Event::from_states(states, (0..states).filter(|&w| labels[w] == b)))
        .filter(|e| !e.is_empty())
        .collect();
    PossibilityCorrespondence::from_partition(states, &blocks)
        .expect("label classes partition the states")
}

/// Partitions a random non-empty subset `S` of the states into blocks;
/// members of `S` see their own block, every other state sees a random
/// block. This yields exactly the serial, coherent correspondences.
pub fn random_belief_correspondence(
    states: usize,
    rng: &mut impl Rng,
) -> PossibilityCorrespondence {
    let mut order: Vec<usize> = (0..states).collect();
    order.shuffle(rng);
    let support = rng.gen_range(1..=states);
    let inner = &order[..support];
    let blocks_wanted = rng.gen_range(1..=support);
    let mut labels = vec![usize::MAX; states];
    // The first `blocks_wanted` members seed distinct blocks.
    for (k, &w) in inner.iter().enumerate() {
        labels[w] = if k < blocks_wanted {
            k
        } else {
            rng.gen_range(0..blocks_wanted)
        };
    }
    let blocks: Vec<Event> = (0..blocks_wanted)
        .map(|b| Event::from_states(states, inner.iter().copied().filter(|&w| labels[w] == b)))
        .collect();
    let cells = (0..states)
        .map(|w| {
            if labels[w] == usize::MAX {
                blocks[rng.gen_range(0..blocks_wanted)].clone()
            } else {
                blocks[labels[w]].clone()
            }
        })
        .collect();
    PossibilityCorrespondence::new(cells).expect("cells range over the state space")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{parse_game, render_game};

    #[test]
    fn deterministic_under_seed() {
        let cfg = GeneratorConfig::default()
            .with_seed(1)
            .with_players(2, 2)
            .with_strategies(2, 3);
        let a = generate_game(&cfg).unwrap();
        let b = generate_game(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.num_players(), 2);
        assert!((2..=3).contains(&a.num_strategies(0)));
        assert_eq!(parse_game(&render_game(&a)).unwrap(), a);
        assert_eq!(
            generate_model(&cfg, &a).unwrap(),
            generate_model(&cfg, &a).unwrap()
        );
    }

    #[test]
    fn generated_models_have_requested_class() {
        for seed in 0..200 {
            let cfg = GeneratorConfig::default().with_seed(seed);
            let game = generate_game(&cfg).unwrap();
            let k = generate_model(&cfg.clone().with_target(ModelClass::Knowledge), &game).unwrap();
            assert_eq!(k.class(), ModelClass::Knowledge);
            assert!(k.correspondences().iter().all(|p| p.partition().is_some()));
            let b = generate_model(&cfg, &game).unwrap();
            assert_ne!(b.class(), ModelClass::Invalid);
        }
    }

    #[test]
    fn belief_generator_reaches_non_reflexive_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let hits = (0..100)
            .filter(|_| random_belief_correspondence(4, &mut rng).class() == ModelClass::Belief)
            .count();
        assert!(hits > 20);
    }

    #[test]
    fn config_validation() {
        assert!(GeneratorConfig::default()
            .with_players(1, 2)
            .validate()
            .is_err());
        assert!(GeneratorConfig::default()
            .with_strategies(3, 2)
            .validate()
            .is_err());
        assert!(GeneratorConfig::default()
            .with_states(1, 40)
            .validate()
            .is_err());
        let mut big = GeneratorConfig::default().with_states(1, 40);
        big.uncapped = true;
        assert!(big.validate().is_ok());
        let mut empty = GeneratorConfig::default();
        empty.payoff_pool.clear();
        assert!(empty.validate().is_err());
    }

    #[test]
    fn instance_seeds_differ() {
        let seeds: std::collections::HashSet<u64> =
            (0..1000).map(|k| instance_seed(42, k)).collect();
        assert_eq!(seeds.len(), 1000);
    }
}
