//! Text format for epistemic models over a game.
//!
//! ```text
//! states: s1 s2 s3
//! map 1: s1 -> U
//! map 2: s1 -> L
//! poss 1: s1 -> {s1 s2}
//! poss 2: s3 -> {}
//! ```
//!
//! Every state needs a `map` and a `poss` line for every player. Empty
//! possibility sets are accepted so that invalid correspondences can be
//! loaded and diagnosed.

use crate::epistemic::{
    property_summary, EpistemicModel, Event, GameModel, PossibilityCorrespondence,
};
use crate::error::{Error, Result};
use crate::format::{directive, strip_comment};
use crate::game::Game;

fn split_arrow(rest: &str, line: usize, col: usize) -> Result<(String, String)> {
    let Some((lhs, rhs)) = rest.split_once("->") else {
        return Err(Error::parse(line, col, "expected `state -> value`"));
    };
    let lhs = lhs.trim();
    if lhs.is_empty() || lhs.contains(char::is_whitespace) {
        return Err(Error::parse(line, col, format!("bad state `{lhs}`")));
    }
    Ok((lhs.to_string(), rhs.trim().to_string()))
}

pub fn parse_model(game: &Game, source: &str) -> Result<EpistemicModel> {
    let n = game.num_players();
    let mut states: Option<Vec<String>> = None;
    let mut maps: Vec<Vec<Option<usize>>> = Vec::new();
    let mut cells: Vec<Vec<Option<Event>>> = Vec::new();

    for (k, raw) in source.lines().enumerate() {
        let line_no = k + 1;
        let line = strip_comment(raw);
        if line.trim().is_empty() {
            continue;
        }
        let (keyword, index, rest, rest_col) = directive(line, line_no)?;
        if keyword == "states" && index.is_none() {
            if states.is_some() {
                return Err(Error::parse(line_no, 1, "duplicate `states` line"));
            }
            let labels: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            if labels.iter().any(|l| l.contains(['{', '}'])) {
                return Err(Error::parse(
                    line_no,
                    rest_col,
                    "state labels may not contain braces",
                ));
            }
            maps = vec![vec![None; labels.len()]; n];
            cells = vec![vec![None; labels.len()]; n];
            states = Some(labels);
            continue;
        }
        let Some(labels) = states.as_ref() else {
            return Err(Error::parse(line_no, 1, "`states` must come first"));
        };
        let Some(i) = index.filter(|&i| i <= n) else {
            return Err(Error::parse(
                line_no,
                1,
                "missing or out-of-range player index",
            ));
        };
        let (state, value) = split_arrow(rest, line_no, rest_col)?;
        let w = labels
            .iter()
            .position(|l| *l == state)
            .ok_or_else(|| Error::parse(line_no, rest_col, format!("unknown state `{state}`")))?;
        match keyword.as_str() {
            "map" => {
                let s = game.strategy_index(i - 1, &value).ok_or_else(|| {
                    Error::parse(
                        line_no,
                        rest_col,
                        format!("unknown strategy `{value}` for player {i}"),
                    )
                })?;
                if maps[i - 1][w].replace(s).is_some() {
                    return Err(Error::parse(
                        line_no,
                        1,
                        format!("duplicate map entry for `{state}`"),
                    ));
                }
            }
            "poss" => {
                let inner = value
                    .strip_prefix('{')
                    .and_then(|v| v.strip_suffix('}'))
                    .ok_or_else(|| Error::parse(line_no, rest_col, "expected `{state ...}`"))?;
                let mut e = Event::empty(labels.len());
                for name in inner.split_whitespace() {
                    let v = labels.iter().position(|l| l == name).ok_or_else(|| {
                        Error::parse(line_no, rest_col, format!("unknown state `{name}`"))
                    })?;
                    e.insert(v);
                }
                if cells[i - 1][w].replace(e).is_some() {
                    return Err(Error::parse(
                        line_no,
                        1,
                        format!("duplicate poss entry for `{state}`"),
                    ));
                }
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("unknown directive `{other}`"),
                ))
            }
        }
    }

    let labels = states.ok_or(Error::EmptyStateSpace)?;
    let maps = maps
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.into_iter()
                .enumerate()
                .map(|(w, s)| {
                    s.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "no map entry for player {} at `{}`",
                            i + 1,
                            labels[w]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let correspondences = cells
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let c = c
                .into_iter()
                .enumerate()
                .map(|(w, e)| {
                    e.ok_or_else(|| {
                        Error::InvalidModel(format!(
                            "no poss entry for player {} at `{}`",
                            i + 1,
                            labels[w]
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            PossibilityCorrespondence::new(c)
        })
        .collect::<Result<Vec<_>>>()?;
    GameModel::new(game, labels, maps)?.with_correspondences(correspondences)
}

/// Which of properties (i)-(iii) each correspondence satisfies.
pub fn validation_report(model: &EpistemicModel) -> String {
    let mut out = String::new();
    for (i, p) in model.correspondences().iter().enumerate() {
        out.push_str(&format!(
            "player {}: {} -> {}\n",
            i + 1,
            property_summary(p),
            p.class().name()
        ));
    }
    out.push_str(&format!("model: {}\n", model.class().name()));
    out
}

pub fn render_model(game: &Game, model: &EpistemicModel) -> String {
    let frame = model.frame();
    let labels = frame.state_labels();
    let mut out = format!("states: {}\n", labels.join(" "));
    for i in 0..model.num_players() {
        for (w, label) in labels.iter().enumerate() {
            out.push_str(&format!(
                "map {}: {} -> {}\n",
                i + 1,
                label,
                game.label(i, frame.strategy(i, w))
            ));
        }
    }
    for (i, p) in model.correspondences().iter().enumerate() {
        for (w, label) in labels.iter().enumerate() {
            out.push_str(&format!(
                "poss {}: {} -> {}\n",
                i + 1,
                label,
                frame.render_event(p.at(w))
            ));
        }
    }
    out
}
