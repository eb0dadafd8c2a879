use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn programs(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../programs");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn mgtc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mgtc")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn eval_prints_value_sets() {
    assert_eq!(stdout(&mgtc(&["eval", "7/2"])), "{3}\n");
    assert_eq!(stdout(&mgtc(&["eval", "0..2"])), "{0,1,2}\n");
    assert_eq!(stdout(&mgtc(&["eval", "2+c"])), "{}\n");
}

#[test]
fn tightness_messages() {
    assert_eq!(stdout(&mgtc(&["tight", &programs("rooms.mg")])), "NOT TIGHT: cycle in/3 -> in/3\n");
    assert_eq!(stdout(&mgtc(&["tight", &programs("tpr.mg")])), "TIGHT\n");
    let dot = stdout(&mgtc(&["tight", &programs("tpr.mg"), "--format", "dot"]));
    assert!(dot.starts_with("digraph") && dot.contains("\"q/2\" -> \"p/1\""));
}

#[test]
fn locally_tight_on_running_example() {
    let out = mgtc(&["locally-tight", &programs("rooms.mg"), "--input", &programs("exinp.in")]);
    assert_eq!(stdout(&out), "LOCALLY TIGHT\n");
}

#[test]
fn equivalence_exit_codes() {
    let args = |second: &str| {
        mgtc(&[
            "verify",
            "equiv",
            &programs("rooms.mg"),
            &programs(second),
            "--assume",
            &programs("as.fo"),
            "--domain",
            &programs("dom.json"),
        ])
    };
    let same = args("rooms2.mg");
    assert_eq!(same.status.code(), Some(0));
    let r = report(&same);
    assert_eq!(r["schema"], "mgtc.report/1");
    assert_eq!(r["verdict"], "holds");
    assert!(r["counterexample"].is_null());
    assert!(r["universe"]["symbols"].as_array().unwrap().len() == 4);
    let different = args("rooms_no_inertia.mg");
    assert_eq!(different.status.code(), Some(1));
    assert!(report(&different)["counterexample"]["input"].is_object());
}

#[test]
fn main_lemma_on_toy_theory() {
    let run = |interp: &str| {
        mgtc(&[
            "verify",
            "main-lemma",
            &programs("toy.fo"),
            "--intensional",
            "p/1",
            "--let",
            "a=0",
            "--let",
            "b=1",
            "--interp",
            interp,
        ])
    };
    let i = run("p(0)");
    assert_eq!(i.status.code(), Some(0));
    assert_eq!(report(&i)["conditions"]["stable"], true);
    let j = run("p(0). p(1)");
    assert_eq!(j.status.code(), Some(2));
    let r = report(&j);
    assert_eq!(r["conditions"]["stable"], false);
    assert_eq!(r["conditions"]["satisfies_completion"], true);
}

#[test]
fn theorem2_report() {
    let dir = std::env::temp_dir().join(format!("mgtc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let public = dir.join("p.atoms");
    let facts = std::fs::read_to_string(programs("exinp.in")).unwrap().replace("#let h = 2.", "");
    let out = std::fs::read_to_string(programs("out.atoms")).unwrap();
    std::fs::write(&public, format!("{facts}\n{out}")).unwrap();
    let o = mgtc(&[
        "verify",
        "thm2",
        &programs("rooms.mg"),
        "--input",
        &programs("exinp.in"),
        "--public",
        public.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = report(&o);
    for c in ["a_io_model", "b_up_satisfies_valuated_completion", "c_valuated_satisfies_completion"] {
        assert_eq!(r["conditions"][c], true, "{c}");
    }
}

#[test]
fn usage_errors_exit_with_three() {
    assert_eq!(mgtc(&["bogus"]).status.code(), Some(3));
    assert_eq!(mgtc(&["tight", "/nonexistent.mg"]).status.code(), Some(3));
    let o = mgtc(&["eval", "7/"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expected"));
}

#[test]
fn output_is_deterministic() {
    let args = ["complete", &programs("tpr.mg"), "--format", "json"];
    let first = mgtc(&args);
    assert_eq!(first.stdout, mgtc(&args).stdout);
    let sample = ["sample", "program", "--seed", "11"];
    assert_eq!(mgtc(&sample).stdout, mgtc(&sample).stdout);
}

#[test]
fn iomodels_of_running_example() {
    let o = mgtc(&["iomodels", &programs("rooms.mg"), "--input", &programs("exinp.in"), "--format", "json"]);
    let models: Vec<Vec<String>> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(models.len(), 1);
    assert_eq!(models[0].iter().filter(|a| a.starts_with("in(")).count(), 6);
}
