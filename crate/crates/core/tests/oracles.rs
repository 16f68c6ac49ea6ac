//! Elimination results against naive re-implementations.

use epirat_core::elimination::{outcome_restriction, t_global, u_local, Mode, NotionProfile};
use epirat_core::format::parse_game;
use epirat_core::game::{Game, Player, Rational, Restriction, StrategyId, StrategySet};
use epirat_core::harness::generate::{generate_game, instance_seed, GeneratorConfig};
use epirat_core::optimality::Notion;

fn load(name: &str) -> Game {
    let path = format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_game(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Does `t` beat `s` against every opponent profile of `g`?
fn beats(
    game: &Game,
    g: &Restriction,
    i: Player,
    t: StrategyId,
    s: StrategyId,
    strict: bool,
) -> bool {
    let opp = g.opponents_product(i);
    let diffs = opp
        .iter()
        .map(|o| game.payoff_against(i, t, o) - game.payoff_against(i, s, o));
    let diffs: Vec<_> = diffs.collect();
    let zero = Rational::from_integer(0.into());
    if strict {
        diffs.iter().all(|d| *d > zero)
    } else {
        diffs.iter().all(|d| *d >= zero) && diffs.iter().any(|d| *d > zero)
    }
}

/// One simultaneous round of pure dominance, with dominators drawn from
/// `G_i` (local) or `H_i` (global).
fn naive_round(game: &Game, g: &Restriction, strict: bool, local: bool) -> Restriction {
    if g.has_empty_component() {
        return g.clone();
    }
    let mut next = g.clone();
    for i in 0..game.num_players() {
        let pool = if local {
            g.component(i)
        } else {
            game.strategies(i)
        };
        let kept: StrategySet = g
            .component(i)
            .iter()
            .filter(|&s| {
                !pool
                    .iter()
                    .any(|t| t != s && beats(game, g, i, t, s, strict))
            })
            .collect();
        next.set_component(i, kept);
    }
    next
}

fn naive_outcome(game: &Game, strict: bool, local: bool) -> Restriction {
    let mut g = game.full();
    loop {
        let next = naive_round(game, &g, strict, local);
        if next == g {
            return g;
        }
        g = next;
    }
}

#[test]
fn pure_dominance_matches_naive_rounds() {
    for k in 0..300 {
        let cfg = GeneratorConfig::default()
            .with_seed(instance_seed(7, k))
            .with_players(2, 3)
            .with_strategies(1, 4)
            .with_integer_payoffs(0, 3);
        let game = generate_game(&cfg).unwrap();
        let n = game.num_players();
        for (notion, strict) in [(Notion::Sd, true), (Notion::Wd, false)] {
            let p = NotionProfile::uniform(notion, n);
            assert_eq!(
                outcome_restriction(&p, &game, Mode::Local).unwrap(),
                naive_outcome(&game, strict, true),
                "{notion} local, instance {k}"
            );
            let g = game.full();
            assert_eq!(
                t_global(&p, &game, &g).unwrap(),
                naive_round(&game, &g, strict, false)
            );
            assert_eq!(
                u_local(&p, &game, &g).unwrap(),
                naive_round(&game, &g, strict, true)
            );
        }
        let p = NotionProfile::uniform(Notion::Sd, n);
        assert_eq!(
            outcome_restriction(&p, &game, Mode::Global).unwrap(),
            naive_outcome(&game, true, false),
            "sd global, instance {k}"
        );
    }
}

#[test]
fn prisoners_dilemma_reduces_to_defection_everywhere() {
    let game = load("prisoners_dilemma.game");
    let dd = Restriction::singleton(&[1, 1]);
    for notion in [
        Notion::Sd,
        Notion::Wd,
        Notion::Msd,
        Notion::Mwd,
        Notion::BrPoint,
        Notion::BrCorrelated,
    ] {
        for mode in [Mode::Global, Mode::Local] {
            let p = NotionProfile::uniform(notion, 2);
            assert_eq!(
                outcome_restriction(&p, &game, mode).unwrap(),
                dd,
                "{notion} {mode:?}"
            );
        }
    }
}

#[test]
fn middle_row_needs_a_mixture() {
    let game = load("mixed_dominance.game");
    let sd =
        outcome_restriction(&NotionProfile::uniform(Notion::Sd, 2), &game, Mode::Local).unwrap();
    assert_eq!(sd.component(0).len(), 3);
    let msd =
        outcome_restriction(&NotionProfile::uniform(Notion::Msd, 2), &game, Mode::Local).unwrap();
    assert_eq!(game.show(&msd), "({T,B},{L,R})");
    let brp = outcome_restriction(
        &NotionProfile::uniform(Notion::BrPoint, 2),
        &game,
        Mode::Global,
    )
    .unwrap();
    assert_eq!(brp, msd);
}
