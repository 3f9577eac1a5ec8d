use serde_json::Value;
use std::process::{Command, Output};

fn projconst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_projconst"))
        .args(args)
        .env_remove(projconst::runtime::CACHE_DIR_VAR)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = projconst(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn float(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn lebesgue_prints_a_bare_number() {
    let out = projconst(&["lebesgue", "--m", "1"]);
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    // L_1 = 1/3 + 2√3/π.
    assert!((v - (1.0 / 3.0 + 2.0 * 3f64.sqrt() / std::f64::consts::PI)).abs() < 1e-10);
    let plus = json(&["lebesgue", "--m", "2", "--plus", "--format", "json"]);
    assert!((float(&plus, "value") - v).abs() < 1e-9);
}

#[test]
fn proj_exact_kernel_in_both_formats() {
    let v = json(&["proj", "--frequency", "natural", "--support", "range:0,4", "--method", "exact_kernel", "--out", "json"]);
    let want = json(&["lebesgue", "--m", "4", "--plus", "--format", "json"]);
    assert!((float(&v, "value") - float(&want, "value")).abs() < 1e-9);
    assert_eq!(v["method"], "exact_kernel");
    assert_eq!(v["support_size"], 5);

    let out = projconst(&["proj", "--frequency", "natural", "--support", "range:0,4", "--method", "exact_kernel", "--out", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("value,stderr,samples,method"));
    assert!(lines.next().unwrap().contains("exact_kernel"));
}

#[test]
fn proj_qindep_uses_the_bessel_form() {
    let v = json(&["proj", "--frequency", "qindep", "--support", "upto:2", "--out", "json"]);
    assert_eq!(v["method"], "closed_form_l1");
    assert!((float(&v, "value") - 4.0 / std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn proj_sampling_is_seeded() {
    let args = ["--seed", "99", "--samples", "20000", "proj", "--frequency", "logn", "--support", "upto:30", "--method", "mc", "--out", "json"];
    let a = projconst(&args);
    let b = projconst(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(float(&v, "bracket_lo") <= float(&v, "value") + 3.0 * float(&v, "stderr"));
    assert!(float(&v, "value") <= float(&v, "bracket_hi") + 3.0 * float(&v, "stderr"));
    assert_eq!(v["seed"], 99);
}

#[test]
fn count_and_write_then_read_back() {
    let v = json(&["count", "--family", "lambda_exact", "--params", "p=1,m=2,n=3"]);
    assert_eq!(v["count"], 6);
    assert_eq!(json(&["count", "--family", "prime_pi", "--params", "x=100"])["count"], 25);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sphere.txt");
    let p = path.to_str().unwrap();
    json(&["count", "--family", "sphere", "--params", "m=2,n=2", "--write", p]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# dim=2 family=sphere"));
    assert_eq!(text.lines().count(), 1 + 13);
    let s = json(&["sidon", "--support", &format!("file:{p}"), "--budget", "8"]);
    assert!(float(&s, "lower") >= 1.0);
    assert!(float(&s, "lower") <= float(&s, "upper"));
    assert!((float(&s, "upper") - 13f64.sqrt()).abs() < 1e-12);
}

#[test]
fn sidon_reports_a_witness() {
    let v = json(&["sidon", "--support", "range:0,15", "--out", "json"]);
    let lower = float(&v, "lower");
    assert!(lower >= 8f64.sqrt() / 1.01, "{lower}");
    let coefs = v["witness_coefficients"].as_array().unwrap();
    assert_eq!(coefs.len(), 16);
    let l1: f64 = coefs.iter().map(|c| c[0].as_f64().unwrap().hypot(c[1].as_f64().unwrap())).sum();
    assert!((l1 / float(&v, "sup_certificate") - lower).abs() < 1e-9);
}

#[test]
fn constants_closed_forms() {
    let v = json(&["constants", "--name", "proj_l1_complex", "--n", "2"]);
    assert!((float(&v, "value") - 4.0 / std::f64::consts::PI).abs() < 1e-10);
    let b = json(&["constants", "--name", "proj_box_exact", "--d", "1,2"]);
    let l1 = json(&["lebesgue", "--m", "1", "--format", "json"]);
    let l2 = json(&["lebesgue", "--m", "2", "--format", "json"]);
    assert!((float(&b, "value") - float(&l1, "value") * float(&l2, "value")).abs() < 1e-9);
}

#[test]
fn experiments_are_listed_and_run() {
    let out = projconst(&["list-experiments"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["lozinski", "logp-limit", "harper", "babenko", "limit-formula", "landau", "weissler"] {
        assert!(text.contains(name), "{name} missing");
    }
    let help = String::from_utf8(projconst(&["--help"]).stdout).unwrap();
    assert!(help.contains("HAAR_CACHE_DIR") && help.contains("lozinski"));

    let out = projconst(&["experiment", "lozinski", "--format", "csv"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,computed,stderr,reference,ratio");
    assert_eq!(csv.lines().count(), 1 + 9);
}

#[test]
fn bad_input_exits_with_two() {
    for args in [
        &["proj", "--frequency", "natural", "--support", "upto:8", "--method", "bogus"][..],
        &["experiment", "nope"][..],
        &["count", "--family", "lambda_exact", "--params", "p=7,m=1,n=1"][..],
        &["sidon", "--support", "file:/nonexistent/set.txt"][..],
    ] {
        let out = projconst(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn cache_dir_is_populated() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_projconst"))
        .args(["lebesgue", "--m", "7"])
        .env(projconst::runtime::CACHE_DIR_VAR, dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let cached = std::fs::read_to_string(dir.path().join("lebesgue.json")).unwrap();
    assert!(cached.contains('7'));
}
