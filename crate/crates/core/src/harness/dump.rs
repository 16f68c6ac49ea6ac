//! Line-oriented `key=value` records for reports, counterexamples and
//! elimination runs. Field order is fixed so dumps can be diffed.
//!
//! Multi-line payloads (the game and model files) are stored one line per
//! key, as `cx.game.0=...`, `cx.game.1=...` and so on. Restrictions use one
//! key per player holding space-separated labels.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::verify::{Claim, Counterexample, Verdict, VerificationReport};
use crate::elimination::{describe_reason, EliminationOutcome, Mode, NotionProfile};
use crate::epistemic::{EpistemicModel, Event};
use crate::error::{Error, Result};
use crate::format::{parse_game, render_game};
use crate::game::{Game, Restriction, StrategySet};
use crate::model_format::{parse_model, render_model};
use crate::optimality::Notion;

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        const ALL: [Claim; 14] = [
            Claim::Thm1i,
            Claim::Thm1ii,
            Claim::Thm1iii,
            Claim::Thm2,
            Claim::Cor1i,
            Claim::Cor1ii,
            Claim::Cor2i,
            Claim::Cor2ii,
            Claim::LocalInclusion,
            Claim::LemmaInc,
            Claim::Pearce,
            Claim::Monotonicity,
            Claim::Tarski,
            Claim::Characterization,
        ];
        ALL.into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown claim `{s}`")))
    }
}

#[derive(Default)]
struct Writer(String);

impl Writer {
    fn put(&mut self, key: &str, value: impl std::fmt::Display) {
        self.0.push_str(&format!("{key}={value}\n"));
    }

    fn block(&mut self, key: &str, text: &str) {
        for (k, line) in text.lines().enumerate() {
            self.put(&format!("{key}.{k}"), line);
        }
    }

    fn restriction(&mut self, key: &str, game: &Game, r: &Restriction) {
        for (i, set) in r.components().iter().enumerate() {
            let labels: Vec<&str> = set.iter().map(|s| game.label(i, s)).collect();
            self.put(&format!("{key}.{}", i + 1), labels.join(" "));
        }
    }
}

fn render_counterexample_into(w: &mut Writer, cx: &Counterexample) {
    let game = &cx.game;
    w.put("cx.claim", cx.claim);
    w.put("cx.note", &cx.note);
    if let Some(seed) = cx.instance_seed {
        w.put("cx.instance_seed", seed);
    }
    if let Some(p) = &cx.profile {
        w.put("cx.profile", p);
    }
    if let Some(n) = cx.secondary {
        w.put("cx.secondary", n);
    }
    if let Some(i) = cx.player {
        w.put("cx.player", i + 1);
    }
    if let Some(joint) = &cx.joint {
        let labels: Vec<&str> = joint
            .iter()
            .enumerate()
            .map(|(i, &s)| game.label(i, s))
            .collect();
        w.put("cx.joint", labels.join(" "));
    }
    if let Some(r) = &cx.restriction {
        w.restriction("cx.restriction", game, r);
    }
    w.restriction("cx.lhs", game, &cx.lhs);
    w.restriction("cx.rhs", game, &cx.rhs);
    if let (Some(e), Some(m)) = (&cx.event, &cx.model) {
        let labels: Vec<&str> = e
            .iter()
            .map(|s| m.frame().state_labels()[s].as_str())
            .collect();
        w.put("cx.event", labels.join(" "));
    }
    w.block("cx.game", &render_game(game));
    if let Some(m) = &cx.model {
        w.block("cx.model", &render_model(game, m));
    }
}

pub fn render_counterexample(cx: &Counterexample) -> String {
    let mut w = Writer::default();
    render_counterexample_into(&mut w, cx);
    w.0
}

/// The report without its runtime, which is not reproducible.
pub fn render_report(report: &VerificationReport) -> String {
    let mut w = Writer::default();
    w.put("kind", "verification");
    w.put("claim", &report.claim);
    w.put("instances", report.instances_checked);
    w.put(
        "verdict",
        match report.verdict {
            Verdict::HoldsOnAll => "holds-on-all",
            Verdict::Counterexample => "counterexample",
        },
    );
    match report.seed {
        Some(s) => w.put("seed", s),
        None => w.put("seed", "none"),
    }
    if let Some(cx) = &report.counterexample {
        render_counterexample_into(&mut w, cx);
    }
    w.0
}

pub fn render_elimination(
    game: &Game,
    profile: &NotionProfile,
    mode: Mode,
    result: &EliminationOutcome,
) -> String {
    let mut w = Writer::default();
    w.put("kind", "elimination");
    w.put("profile", profile);
    w.put("mode", mode.name());
    w.put("stabilized_at", result.trace.stabilized_at);
    for (k, g) in result
        .trace
        .stages
        .iter()
        .enumerate()
        .take(result.trace.stabilized_at + 1)
    {
        w.put(&format!("stage.{k}"), game.show(g));
        for (r, e) in result.removed.get(k).into_iter().flatten().enumerate() {
            w.put(
                &format!("stage.{k}.removed.{r}"),
                format!(
                    "player {} {} {}",
                    e.player + 1,
                    game.label(e.player, e.strategy),
                    describe_reason(game, e.player, &e.reason)
                ),
            );
        }
    }
    w.put("outcome", game.show(result.outcome()));
    w.0
}

fn parse_records(src: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (k, line) in src.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(k + 1, 1, "expected `key=value`"));
        };
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::parse(k + 1, 1, format!("duplicate key `{key}`")));
        }
    }
    Ok(out)
}

fn block(records: &BTreeMap<String, String>, key: &str) -> Option<String> {
    let mut lines = Vec::new();
    while let Some(line) = records.get(&format!("{key}.{}", lines.len())) {
        lines.push(line.as_str());
    }
    (!lines.is_empty()).then(|| lines.join("\n") + "\n")
}

fn restriction(
    records: &BTreeMap<String, String>,
    key: &str,
    game: &Game,
) -> Result<Option<Restriction>> {
    if !records.contains_key(&format!("{key}.1")) {
        return Ok(None);
    }
    let mut sets = Vec::new();
    for i in 0..game.num_players() {
        let value = records
            .get(&format!("{key}.{}", i + 1))
            .ok_or_else(|| Error::InvalidArgument(format!("missing `{key}.{}`", i + 1)))?;
        let mut set = StrategySet::empty();
        for label in value.split_whitespace() {
            let s = game.strategy_index(i, label).ok_or_else(|| {
                Error::InvalidArgument(format!("unknown strategy `{label}` in `{key}`"))
            })?;
            set.insert(s);
        }
        sets.push(set);
    }
    Ok(Some(Restriction::new(sets)))
}

fn event(model: &EpistemicModel, value: &str) -> Result<Event> {
    let mut e = Event::empty(model.num_states());
    for label in value.split_whitespace() {
        let w = model
            .frame()
            .state_index(label)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown state `{label}`")))?;
        e.insert(w);
    }
    Ok(e)
}

/// Reads the `cx.*` records of a report or counterexample dump.
pub fn parse_counterexample(src: &str) -> Result<Counterexample> {
    let records = parse_records(src)?;
    let get = |key: &str| records.get(key).map(String::as_str);
    let claim: Claim = get("cx.claim")
        .ok_or_else(|| Error::InvalidArgument("dump has no counterexample".into()))?
        .parse()?;
    let game = parse_game(
        &block(&records, "cx.game")
            .ok_or_else(|| Error::InvalidArgument("dump has no game".into()))?,
    )?;
    let mut cx = Counterexample::bare(claim, &game, get("cx.note").unwrap_or_default());
    if let Some(m) = block(&records, "cx.model") {
        cx.model = Some(parse_model(&game, &m)?);
    }
    if let Some(p) = get("cx.profile") {
        cx.profile = Some(NotionProfile::parse(p, game.num_players())?);
    }
    if let Some(n) = get("cx.secondary") {
        cx.secondary = Some(n.parse::<Notion>()?);
    }
    if let Some(seed) = get("cx.instance_seed") {
        cx.instance_seed = Some(
            seed.parse()
                .map_err(|_| Error::InvalidArgument("bad instance seed".into()))?,
        );
    }
    if let Some(p) = get("cx.player") {
        let i: usize = p
            .parse()
            .map_err(|_| Error::InvalidArgument("bad player".into()))?;
        if i == 0 || i > game.num_players() {
            return Err(Error::InvalidArgument("player out of range".into()));
        }
        cx.player = Some(i - 1);
    }
    if let Some(j) = get("cx.joint") {
        let labels: Vec<&str> = j.split_whitespace().collect();
        if labels.len() != game.num_players() {
            return Err(Error::InvalidArgument(
                "joint strategy has the wrong length".into(),
            ));
        }
        cx.joint = Some(
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    game.strategy_index(i, l)
                        .ok_or_else(|| Error::InvalidArgument(format!("unknown strategy `{l}`")))
                })
                .collect::<Result<_>>()?,
        );
    }
    cx.restriction = restriction(&records, "cx.restriction", &game)?;
    if let Some(r) = restriction(&records, "cx.lhs", &game)? {
        cx.lhs = r;
    }
    if let Some(r) = restriction(&records, "cx.rhs", &game)? {
        cx.rhs = r;
    }
    if let Some(e) = get("cx.event") {
        let model = cx
            .model
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("event without model".into()))?;
        cx.event = Some(event(model, e)?);
    }
    Ok(cx)
}
