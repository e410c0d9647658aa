use std::path::Path;

use cartier_cli::run;
use cartier_core::{gallery::gallery, parse_scene, Sheaf};

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn xcartier(args: &[&str]) -> Run {
    let argv: Vec<String> = std::iter::once("xcartier").chain(args.iter().copied()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write_gallery(dir: &Path, name: &str, p: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let r = xcartier(&["gallery", name, "--p", p, "--out", path.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.err);
    path.to_str().unwrap().to_string()
}

#[test]
fn fk_p5_lists_k_2_to_4() {
    let r = xcartier(&["fk", "--p", "5"]);
    assert_eq!(r.code, 0, "{}", r.out);
    for k in 2..=4 {
        assert!(r.out.contains(&format!("[PASS] p=5 k={k}: F_k = 0")), "{}", r.out);
    }
    assert!(r.out.contains("F_1 = T1^4"));
}

#[test]
fn fk_single_k_json() {
    let r = xcartier(&["fk", "--p", "3", "--k", "2", "--json"]);
    assert_eq!(r.code, 0);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["overall"], "pass");
    assert!(v["entries"][0].get("elapsed").is_none());
}

#[test]
fn roundtrip_g2_emits_negated_scene() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = write_gallery(dir.path(), "g2_a1_rank2", "3");
    let r = xcartier(&["roundtrip", "--scene", &g2, "--json"]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["report"]["overall"], "pass");
    let scene = parse_scene(&v["scene"].to_string()).unwrap();
    let expected = gallery("g2_a1_rank2", 3).unwrap().higgs().unwrap().negated();
    assert_eq!(scene.sheaf, Some(Sheaf::Higgs(expected)));
}

#[test]
fn icartier_rejects_non_nilpotent_field() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = write_gallery(dir.path(), "g2_a1_rank2", "3");
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&g2).unwrap()).unwrap();
    v["sheaf"]["charts"]["A"] = serde_json::json!([[["0", "1"], ["1", "0"]]]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let r = xcartier(&["icartier", "--scene", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("nilpotency"), "{}", r.err);
    assert!(r.out.is_empty());
}

#[test]
fn transforms_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = write_gallery(dir.path(), "g2_a1_rank2", "5");
    let flat = dir.path().join("flat.json");
    let back = dir.path().join("back.json");
    let r = xcartier(&["icartier", "--scene", &g2, "--out", flat.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("eps = -1"));
    let r = xcartier(&["pcurv", "--scene", flat.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("[[0, 4], [0, 0]]"), "{}", r.out);
    let r = xcartier(&["cartier", "--scene", flat.to_str().unwrap(), "--out", back.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.out);
    let scene = parse_scene(&std::fs::read_to_string(back).unwrap()).unwrap();
    let expected = gallery("g2_a1_rank2", 5).unwrap().higgs().unwrap().negated();
    assert_eq!(scene.higgs().unwrap(), &expected);
}

#[test]
fn roundtrip_on_projective_line() {
    let dir = tempfile::tempdir().unwrap();
    let g5 = write_gallery(dir.path(), "g5_p1_uniformizing", "3");
    let r = xcartier(&["roundtrip", "--scene", &g5]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("[PASS] gauge-isomorphic to (E, -theta)"), "{}", r.out);
}

#[test]
fn lemma_defaults_to_projective_line() {
    let r = xcartier(&["lemma", "--p", "3"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("U0/U1"));
}

#[test]
fn identity_commands_pass() {
    assert_eq!(xcartier(&["taylor", "--p", "5", "--trials", "5", "--seed", "7"]).code, 0);
    assert_eq!(xcartier(&["wilson"]).code, 0);
    assert_eq!(xcartier(&["wilson", "--p", "11"]).code, 0);
}

#[test]
fn output_is_deterministic() {
    let a = xcartier(&["taylor", "--p", "3", "--trials", "10", "--seed", "42", "--json"]);
    let b = xcartier(&["taylor", "--p", "3", "--trials", "10", "--seed", "42", "--json"]);
    assert_eq!(a.out, b.out);
    let dir = tempfile::tempdir().unwrap();
    let g6 = write_gallery(dir.path(), "g6_a2_rank3", "5");
    let a = xcartier(&["roundtrip", "--scene", &g6, "--json"]);
    let b = xcartier(&["roundtrip", "--scene", &g6, "--json"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.out, b.out);
}

#[test]
fn errors_exit_2() {
    assert_eq!(xcartier(&["frobnicate"]).code, 2);
    assert_eq!(xcartier(&["gallery", "g9_nope"]).code, 2);
    assert_eq!(xcartier(&["gallery", "g2_a1_rank2", "--p", "2"]).code, 2);
    assert_eq!(xcartier(&["gallery", "g6_a2_rank3_exp3", "--p", "3"]).code, 2);
    let r = xcartier(&["icartier"]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("--scene"));
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"p\": 3").unwrap();
    assert_eq!(xcartier(&["icartier", "--scene", broken.to_str().unwrap()]).code, 2);
}

#[test]
fn roundtrip_refuses_flat_scene() {
    let dir = tempfile::tempdir().unwrap();
    let g2 = write_gallery(dir.path(), "g2_a1_rank2", "3");
    let flat = dir.path().join("flat.json");
    assert_eq!(xcartier(&["icartier", "--scene", &g2, "--out", flat.to_str().unwrap()]).code, 0);
    let r = xcartier(&["roundtrip", "--scene", flat.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("no Higgs sheaf"), "{}", r.err);
}

#[test]
fn help_exits_0() {
    let r = xcartier(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("verify-all"));
}
