use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use popmatch::{is_popular, parse_instance, parse_matching, stable_k, serialize_matching};
use tempfile::TempDir;

const PAIR: &str = "model one-sided\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1 > b2\n";
const TRIPLE: &str = "model one-sided\nagents a1 a2 a3\njobs b1 b2 b3\n\
    a1 : b1 > b2 > b3\na2 : b1 > b2 > b3\na3 : b1 > b2 > b3\n";
const TIE_I: &str = "model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b1 > b2\na2 : b1 > b2\n";
const TIE_J: &str = "model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b2 > b1\na2 : b1 > b2\n";
const TIES: &str = "model two-sided-ties k=2\nagents a1 a2\njobs b1 b2\na1 : [b1 b2]\na2 : b1 > b2\n\
    b1 : a1 > a2\nb2 : [a1 a2]\n";

fn popmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popmatch")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn solve_exit_codes() {
    let d = TempDir::new().unwrap();
    let o = popmatch(&["solve", s(&file(&d, "pair", PAIR))]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = popmatch(&["solve", s(&file(&d, "triple", TRIPLE))]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "NONE\n");
    let o = popmatch(&["solve", s(&file(&d, "bad", "model one-sided\nagents a1\n"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn verify_reports_witness() {
    let d = TempDir::new().unwrap();
    let i = file(&d, "i", TIE_I);
    let good = file(&d, "good", "a1 b1\na2 b2\n");
    let bad = file(&d, "bad", "a1 b2\n");
    for extra in [&[][..], &["--oracle"][..]] {
        let mut args = vec!["verify", s(&i), s(&good)];
        args.extend_from_slice(extra);
        let o = popmatch(&args);
        assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "POPULAR\n"));
        let mut args = vec!["verify", s(&i), s(&bad)];
        args.extend_from_slice(extra);
        let o = popmatch(&args);
        assert_eq!(o.status.code(), Some(2));
        let text = stdout(&o);
        assert!(text.starts_with("NOT POPULAR\nmargin: "));
        assert!(text.contains("condition: path-from-unmatched"));
        let better = text.split("better:\n").nth(1).unwrap();
        let inst = parse_instance(TIE_I).unwrap();
        assert!(parse_matching(&inst, better).is_ok());
    }
}

#[test]
fn robust_pair_and_multi() {
    let d = TempDir::new().unwrap();
    let (i, j) = (file(&d, "i", TIE_I), file(&d, "j", TIE_J));
    let o = popmatch(&["robust", s(&i), s(&j)]);
    assert_eq!(o.status.code(), Some(0));
    let inst = parse_instance(TIE_I).unwrap();
    let m = parse_matching(&inst, &stdout(&o)).unwrap();
    for t in [TIE_I, TIE_J] {
        assert!(is_popular(&parse_instance(t).unwrap(), &m).unwrap().is_popular());
    }
    let o = popmatch(&["robust", s(&i), s(&j), "--multi", s(&i)]);
    assert_eq!(o.status.code(), Some(0));
    let far = file(&d, "far", "model two-sided-one-tie\nagents a1 a2\njobs b1 b2\na1 : b2 > b1\na2 : b2 > b1\n");
    let o = popmatch(&["robust", s(&i), s(&far)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn stablek_report() {
    let d = TempDir::new().unwrap();
    let o = popmatch(&["stablek", "--factor", s(&file(&d, "t", TIES))]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let inst = parse_instance(TIES).unwrap();
    assert!(text.starts_with(&serialize_matching(&inst, &stable_k(&inst).unwrap())));
    assert!(text.contains("# blocking-pairs: 0\n"));
    assert!(text.contains("# unpopularity-factor: 1 (k = 2)\n"));
    let o = popmatch(&["stablek", "--factor", "--cap", "2", s(&file(&d, "t", TIES))]);
    assert!(stdout(&o).contains("skipped-cap"));
    let o = popmatch(&["stablek", s(&file(&d, "p", PAIR))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unpopularity_and_hybrid() {
    let d = TempDir::new().unwrap();
    let o = popmatch(&["unpopularity", s(&file(&d, "t", TRIPLE)), s(&file(&d, "m", "a1 b1\na2 b2\na3 b3\n"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("factor: "));
    let (i, j) = (file(&d, "i", TIE_I), file(&d, "j", TIE_J));
    let o = popmatch(&["hybrid", s(&i), s(&j), "--edge", "a1:b2"]);
    assert_eq!(o.status.code(), Some(0));
    let h = parse_instance(&stdout(&o)).unwrap();
    assert_eq!(h.agent_prefs(0).items().collect::<Vec<_>>(), vec![0, 1]);
    let o = popmatch(&["hybrid", s(&i), s(&j), "--edge", "a2:b1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = popmatch(&["hybrid", s(&i), s(&j), "--edge", "a1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn gen_is_deterministic_and_parses() {
    let args = ["gen", "--model", "two-sided-ties", "--tie-max", "3", "--agents", "6", "--seed", "42"];
    let (a, b) = (popmatch(&args), popmatch(&args));
    assert_eq!(a.stdout, b.stdout);
    let inst = parse_instance(&stdout(&a)).unwrap();
    assert!((0..6).all(|v| inst.agent_prefs(v).max_tie() <= 3 && inst.job_prefs(v).max_tie() <= 3));
    let o = popmatch(&["gen", "--model", "one-sided", "--agents", "3", "--jobs", "4", "--density", "1"]);
    assert_eq!(parse_instance(&stdout(&o)).unwrap().num_edges(), 12);
    let o = popmatch(&["gen", "--model", "one-sided", "--agents", "3", "--tie-max", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = popmatch(&["gen", "--model", "one-sided", "--agents", "3", "--density", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn batch_is_reproducible_across_threads() {
    let d = TempDir::new().unwrap();
    let run = |name: &str, threads: &str| {
        let out = d.path().join(name);
        let o = popmatch(&[
            "batch", "--model", "one-sided", "--n", "3..4", "--trials", "5", "--task", "robust", "--seed", "9",
            "--threads", threads, "--out", s(&out),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (fs::read(out).unwrap(), o.stdout)
    };
    let (a, sa) = run("a.csv", "1");
    let (b, sb) = run("b.csv", "4");
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().next(), Some("id,model,n,m,seed,outcome"));
    assert_eq!(text.lines().count(), 11);
    assert_eq!(String::from_utf8(sa).unwrap().lines().count(), 2);
}

#[test]
fn batch_edge_cases() {
    let d = TempDir::new().unwrap();
    let out = d.path().join("e.csv");
    let o = popmatch(&["batch", "--model", "one-sided", "--n", "5..3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&out).unwrap(), "id,model,n,m,seed,outcome\n");
    let o = popmatch(&[
        "batch", "--model", "two-sided-one-tie", "--n", "9", "--trials", "2", "--out", s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().skip(1).filter(|l| l.ends_with(",skipped-cap")).count(), 2);
    let o = popmatch(&[
        "batch", "--model", "two-sided-ties", "--n", "3", "--trials", "2", "--task", "factor", "--timing", "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("id,model,n,m,seed,outcome,wall_ms\n"));
    assert!(text.contains(",two-sided-ties k=2,"));
    let o = popmatch(&["batch", "--model", "two-sided-ties", "--n", "3", "--task", "robust", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
}
