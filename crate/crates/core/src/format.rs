//! Text format for games and restrictions.
//!
//! ```text
//! # comments run to end of line
//! players: 2
//! strategies 1: U D
//! strategies 2: L R
//! payoff 1: U L = 1
//! payoff 2: U L = 1/2
//! payoff 1: D R = 0.75
//! restrict 1: D
//! restrict 2:
//! ```
//!
//! Players are numbered from 1 in the file. Payoff values are integers,
//! fractions `p/q` or finite decimals, all converted exactly.

use num_bigint::BigInt;
use num_traits::{Num, Zero};

use crate::error::{Error, Result};
use crate::game::{Game, Rational, Restriction, StrategySet};

/// A parsed game together with an optional restriction given by
/// `restrict` lines.
#[derive(Clone, Debug)]
pub struct GameDocument {
    pub game: Game,
    pub restriction: Option<Restriction>,
}

/// Parses a rational written as an integer, `p/q`, or a finite decimal.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_integer(num.trim())?;
        let den = parse_integer(den.trim())?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }
    let (negative, body) = match text.as_bytes()[0] {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .bytes()
        .chain(frac_part.bytes())
        .all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let magnitude = BigInt::from_str_radix(&digits, 10).ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = Rational::new(magnitude, scale);
    Some(if negative { -value } else { value })
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['-', '+']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str_radix(text.strip_prefix('+').unwrap_or(text), 10).ok()
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(text: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (k, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((offset + s + 1, &text[s..k]));
            }
        } else if start.is_none() {
            start = Some(k);
        }
    }
    if let Some(s) = start {
        out.push((offset + s + 1, &text[s..]));
    }
    out
}

pub(crate) fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

/// Splits `keyword [index]: rest` into its parts. Returns the column of
/// `rest` too.
pub(crate) fn directive(
    line: &str,
    line_no: usize,
) -> Result<(String, Option<usize>, &str, usize)> {
    let Some((head, rest)) = line.split_once(':') else {
        let col = line.len() - line.trim_start().len() + 1;
        return Err(Error::parse(line_no, col, "expected `keyword: ...`"));
    };
    let head_tokens = tokens(head, 0);
    let (keyword, index) = match head_tokens.as_slice() {
        [(_, k)] => (k.to_string(), None),
        [(_, k), (col, idx)] => {
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(line_no, *col, format!("bad index `{idx}`")))?;
            if idx == 0 {
                return Err(Error::parse(line_no, *col, "indices start at 1"));
            }
            (k.to_string(), Some(idx))
        }
        _ => return Err(Error::parse(line_no, 1, "malformed directive head")),
    };
    Ok((keyword, index, rest, head.len() + 1))
}

fn check_label(label: &str, line: usize, col: usize) -> Result<()> {
    if label.contains(['=', ':', '{', '}', '>', ',']) {
        return Err(Error::parse(line, col, format!("invalid label `{label}`")));
    }
    Ok(())
}

/// Parses a game, ignoring `restrict` lines.
pub fn parse_game(source: &str) -> Result<Game> {
    parse_game_document(source).map(|doc| doc.game)
}

pub fn parse_game_document(source: &str) -> Result<GameDocument> {
    let mut players: Option<usize> = None;
    let mut labels: Vec<Option<Vec<String>>> = Vec::new();
    let mut payoff_lines = Vec::new();
    let mut restrict_lines = Vec::new();

    for (k, raw) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (keyword, index, rest, rest_col) = directive(line, line_no)?;
        match (keyword.as_str(), index) {
            ("players", None) => {
                if players.is_some() {
                    return Err(Error::parse(line_no, 1, "duplicate `players` line"));
                }
                let toks = tokens(rest, rest_col);
                let [(col, count)] = toks.as_slice() else {
                    return Err(Error::parse(line_no, rest_col, "expected a player count"));
                };
                let n: usize = count.parse().map_err(|_| {
                    Error::parse(line_no, *col, format!("bad player count `{count}`"))
                })?;
                if n < 2 {
                    return Err(Error::Validation(format!(
                        "a game needs at least 2 players, got {n}"
                    )));
                }
                players = Some(n);
                labels = vec![None; n];
            }
            ("strategies", Some(i)) => {
                let n =
                    players.ok_or_else(|| Error::parse(line_no, 1, "`players` must come first"))?;
                if i > n {
                    return Err(Error::parse(line_no, 1, format!("player {i} out of range")));
                }
                if labels[i - 1].is_some() {
                    return Err(Error::parse(
                        line_no,
                        1,
                        format!("duplicate strategies for player {i}"),
                    ));
                }
                let mut set = Vec::new();
                for (col, label) in tokens(rest, rest_col) {
                    check_label(label, line_no, col)?;
                    set.push(label.to_string());
                }
                labels[i - 1] = Some(set);
            }
            ("payoff", Some(i)) => payoff_lines.push((line_no, i, rest, rest_col)),
            ("restrict", Some(i)) => restrict_lines.push((line_no, i, rest, rest_col)),
            _ => {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("unknown directive `{keyword}`"),
                ));
            }
        }
    }

    let n = players.ok_or_else(|| Error::Validation("missing `players` line".into()))?;
    let labels: Vec<Vec<String>> = labels
        .into_iter()
        .enumerate()
        .map(|(i, set)| {
            set.ok_or_else(|| Error::Validation(format!("missing strategies for player {}", i + 1)))
        })
        .collect::<Result<_>>()?;
    // Validates labels and sizes before payoffs are placed.
    let sizes: Vec<usize> = labels.iter().map(Vec::len).collect();
    let cells: usize = sizes.iter().product();
    let placeholder = Game::new(labels.clone(), vec![vec![Rational::zero(); cells]; n])?;

    let mut tables: Vec<Vec<Option<Rational>>> = vec![vec![None; cells]; n];
    for (line_no, i, rest, rest_col) in payoff_lines {
        if i > n {
            return Err(Error::parse(line_no, 1, format!("player {i} out of range")));
        }
        let Some((lhs, rhs)) = rest.split_once('=') else {
            return Err(Error::parse(
                line_no,
                rest_col,
                "expected `s1 .. sn = value`",
            ));
        };
        let toks = tokens(lhs, rest_col);
        if toks.len() != n {
            return Err(Error::parse(
                line_no,
                rest_col,
                format!("expected {n} strategy labels"),
            ));
        }
        let mut joint = Vec::with_capacity(n);
        for (j, (col, label)) in toks.iter().enumerate() {
            let s = placeholder.strategy_index(j, label).ok_or_else(|| {
                Error::parse(
                    line_no,
                    *col,
                    format!("unknown strategy `{label}` for player {}", j + 1),
                )
            })?;
            joint.push(s);
        }
        let value_col = rest_col + lhs.len() + 1;
        let value = parse_rational(rhs).ok_or_else(|| {
            Error::parse(
                line_no,
                value_col,
                format!("bad payoff value `{}`", rhs.trim()),
            )
        })?;
        let k = flat_index(&joint, &sizes);
        if tables[i - 1][k].is_some() {
            return Err(Error::parse(line_no, 1, "duplicate payoff entry"));
        }
        tables[i - 1][k] = Some(value);
    }

    let mut payoffs = Vec::with_capacity(n);
    for (i, table) in tables.into_iter().enumerate() {
        let mut row = Vec::with_capacity(cells);
        for (k, v) in table.into_iter().enumerate() {
            match v {
                Some(v) => row.push(v),
                None => {
                    let joint = unflatten(k, &sizes);
                    return Err(Error::Validation(format!(
                        "missing payoff for player {} at {}",
                        i + 1,
                        placeholder.show_joint(&joint)
                    )));
                }
            }
        }
        payoffs.push(row);
    }
    let game = Game::new(labels, payoffs)?;

    let restriction = if restrict_lines.is_empty() {
        None
    } else {
        let mut g = game.full();
        let mut seen = vec![false; n];
        for (line_no, i, rest, rest_col) in restrict_lines {
            if i > n {
                return Err(Error::parse(line_no, 1, format!("player {i} out of range")));
            }
            if std::mem::replace(&mut seen[i - 1], true) {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("duplicate restriction for player {i}"),
                ));
            }
            let mut set = StrategySet::empty();
            for (col, label) in tokens(rest, rest_col) {
                let s = game.strategy_index(i - 1, label).ok_or_else(|| {
                    Error::parse(line_no, col, format!("unknown strategy `{label}`"))
                })?;
                set.insert(s);
            }
            g.set_component(i - 1, set);
        }
        Some(g)
    };

    Ok(GameDocument { game, restriction })
}

fn flat_index(joint: &[usize], sizes: &[usize]) -> usize {
    joint.iter().zip(sizes).fold(0, |acc, (s, m)| acc * m + s)
}

fn unflatten(mut k: usize, sizes: &[usize]) -> Vec<usize> {
    let mut joint = vec![0; sizes.len()];
    for (slot, m) in joint.iter_mut().zip(sizes).rev() {
        *slot = k % m;
        k /= m;
    }
    joint
}

/// Canonical text form of a game. `parse_game(&render_game(g)) == g`.
pub fn render_game(game: &Game) -> String {
    let n = game.num_players();
    let mut out = format!("players: {n}\n");
    for i in 0..n {
        out.push_str(&format!(
            "strategies {}: {}\n",
            i + 1,
            game.labels(i).join(" ")
        ));
    }
    for i in 0..n {
        for joint in game.joint_strategies() {
            let names: Vec<&str> = joint
                .iter()
                .enumerate()
                .map(|(j, &s)| game.label(j, s))
                .collect();
            out.push_str(&format!(
                "payoff {}: {} = {}\n",
                i + 1,
                names.join(" "),
                game.payoff(i, &joint)
            ));
        }
    }
    out
}

/// `restrict` lines for `g`, one per player, empty components included.
pub fn render_restriction(game: &Game, g: &Restriction) -> String {
    let mut out = String::new();
    for (i, set) in g.components().iter().enumerate() {
        let names: Vec<&str> = set.iter().map(|s| game.label(i, s)).collect();
        if names.is_empty() {
            out.push_str(&format!("restrict {}:\n", i + 1));
        } else {
            out.push_str(&format!("restrict {}: {}\n", i + 1, names.join(" ")));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const APT: &str = "\
# weak dominance counterexample
players: 2
strategies 1: U D
strategies 2: L R
payoff 1: U L = 1
payoff 1: U R = 0
payoff 1: D L = 1
payoff 1: D R = 1
payoff 2: U L = 1
payoff 2: U R = 1
payoff 2: D L = 0
payoff 2: D R = 1
";

    #[test]
    fn parses_two_by_two() {
        let g = parse_game(APT).unwrap();
        assert_eq!(g.num_players(), 2);
        assert_eq!(g.labels(0), ["U", "D"]);
        assert_eq!(g.payoff(0, &[0, 1]), &Rational::from_integer(0.into()));
        assert_eq!(g.payoff(1, &[1, 0]), &Rational::from_integer(0.into()));
    }

    #[test]
    fn rational_forms() {
        let r = |n: i64, d: i64| Rational::new(n.into(), d.into());
        assert_eq!(parse_rational("0.5"), Some(r(1, 2)));
        assert_eq!(parse_rational("-1.25"), Some(r(-5, 4)));
        assert_eq!(parse_rational("3/6"), Some(r(1, 2)));
        assert_eq!(parse_rational("-7"), Some(r(-7, 1)));
        assert_eq!(parse_rational(".5"), Some(r(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("1e3"), None);
        assert_eq!(parse_rational("."), None);
    }

    #[test]
    fn one_player_is_rejected() {
        let err = parse_game("players: 1\nstrategies 1: a\npayoff 1: a = 0\n").unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn missing_payoff_is_reported() {
        let src = APT.replace("payoff 2: D R = 1\n", "");
        let err = parse_game(&src).unwrap_err();
        assert!(
            matches!(err, Error::Validation(ref m) if m.contains("(D,R)")),
            "{err}"
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let src = APT.replace("payoff 1: D R = 1", "payoff 1: D X = 1");
        match parse_game(&src).unwrap_err() {
            Error::Parse { line, column, .. } => {
                assert_eq!(line, 8);
                assert_eq!(column, 13);
            }
            other => panic!("unexpected {other}"),
        }
        match parse_game(&APT.replace("= 0\n", "= zero\n")).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 6),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        let src = APT.replace("strategies 2: L R", "strategies 2: L L");
        assert!(matches!(parse_game(&src), Err(Error::Validation(_))));
    }

    #[test]
    fn restriction_lines() {
        let src = format!("{APT}restrict 1: D\nrestrict 2:\n");
        let doc = parse_game_document(&src).unwrap();
        let g = doc.restriction.unwrap();
        assert_eq!(doc.game.show(&g), "({D},{})");
        assert_eq!(
            render_restriction(&doc.game, &g),
            "restrict 1: D\nrestrict 2:\n"
        );
    }

    #[test]
    fn render_round_trip_with_fractions() {
        let src = APT.replace("payoff 2: D R = 1", "payoff 2: D R = -2.125");
        let g = parse_game(&src).unwrap();
        let text = render_game(&g);
        assert!(text.contains("= -17/8"));
        assert_eq!(parse_game(&text).unwrap(), g);
    }
}
