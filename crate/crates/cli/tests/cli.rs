use std::process::{Command, Output};

fn games(name: &str) -> String {
    format!("{}/../../games/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn epirat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epirat"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn mixed_trace_names_the_dominating_mixture() {
    let g = games("mixed_dominance.game");
    let out = epirat(&["eliminate", "--game", &g, "--notion", "msd", "--trace"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "stage 0: ({T,M,B},{L,R})\n  player 1 drops M: dominated by 1/2*T+1/2*B\n\
         stage 1: ({T,B},{L,R})\noutcome: ({T,B},{L,R})\n"
    );
}

#[test]
fn global_weak_dominance_keeps_the_full_game_top() {
    let g = games("weak_dominance.game");
    let out = epirat(&["eliminate", "--game", &g, "--notion", "sd"]);
    assert_eq!(stdout(&out).trim(), "outcome: ({U,D},{L,R})");
}

#[test]
fn singleton_model_is_knowledge_class() {
    let out = epirat(&[
        "epistemic",
        "--game",
        &games("weak_dominance.game"),
        "--model",
        &games("weak_dominance_singleton.model"),
        "validate",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).ends_with("model: knowledge\n"));
}

#[test]
fn generation_is_deterministic_and_parseable() {
    let a = epirat(&["generate", "game", "--seed", "42"]);
    let b = epirat(&["generate", "game", "--seed", "42"]);
    assert_eq!(a.stdout, b.stdout);
    let path = std::env::temp_dir().join(format!("epirat-gen-{}.game", std::process::id()));
    std::fs::write(&path, &a.stdout).unwrap();
    let out = epirat(&[
        "eliminate",
        "--game",
        path.to_str().unwrap(),
        "--notion",
        "brp",
    ]);
    let _ = std::fs::remove_file(&path);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn suites_report_and_errors_exit_two() {
    let out = epirat(&["verify", "pearce", "--samples", "20", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("pearce: holds-on-all"));
    let out = epirat(&["eliminate", "--game", "/nonexistent.game", "--notion", "sd"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
}
