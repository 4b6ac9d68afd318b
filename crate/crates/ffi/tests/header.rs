use std::path::PathBuf;
use std::process::Command;

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/ergomfg.h")
}

#[test]
fn header_declares_the_exports() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "typedef struct ErgomfgProblem ErgomfgProblem",
        "ergomfg_problem_new",
        "ergomfg_problem_free",
        "ergomfg_ergodic_cost",
        "ergomfg_stationary_mean",
        "ergomfg_solve_control",
        "ergomfg_hjb_lambda",
        "ergomfg_find_equilibria",
        "ergomfg_string_free",
        "ergomfg_last_error",
        "ERGOMFG_STATUS_NO_BRACKET",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(status) = Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(header())
        .status()
    else {
        eprintln!("no C compiler, skipped");
        return;
    };
    assert!(status.success());
}
