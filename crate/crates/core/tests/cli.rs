use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

const IDS: [&str; 49] = [
    "quat_algebra", "inner_axioms", "P1", "P2", "polar", "right_linear", "Ad1", "LPro", "lft_mul",
    "lft_mul_op", "rgt_mul_op", "sc_mul_aj_op", "N_S_sym", "Y_real_symmetric", "preqn_a", "preqn_b",
    "preqn_c", "csadj_gen", "reg_pt", "pre_set_a", "pre_set_c", "def_con", "pr01", "pr01_rho",
    "S_spectrum", "Pr2", "pr00_resol", "pr00_neq1", "Gen_Von_neq", "def_minus", "iso_a", "iso_b",
    "iso_d", "def_int_ext", "d_i_e", "I_U", "Cay_Prn_a", "Cay_Prn_b", "Cay_Prn_d", "Cay_Prn_e",
    "Cay_inv", "Cay_Prn1", "ess_Cay", "cor_self_adjoint_unitary", "cor1", "remark", "Pro_lft",
    "basis_invariance", "chi_embedding",
];

fn qcayley(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcayley"))
        .current_dir(dir)
        .env_remove("QCAYLEY_TOL")
        .args(args)
        .output()
        .expect("spawn qcayley")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn read(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(name)).unwrap()).unwrap()
}

fn real_entries(op: &Value) -> Vec<Vec<f64>> {
    op["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|row| {
            row.as_array()
                .unwrap()
                .iter()
                .map(|q| {
                    let q = q.as_array().unwrap();
                    assert!(q[1..].iter().all(|c| c.as_f64().unwrap() == 0.0));
                    q[0].as_f64().unwrap()
                })
                .collect()
        })
        .collect()
}

#[test]
fn gen_writes_a_real_symmetric_orthogonal_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&qcayley(dir.path(), &["gen", "--thetas", "0.7,1.1", "--out", "a.json"]));
    assert_eq!(v["n"], 4);
    assert_eq!(v["flags"]["in_y"], true);
    let m = real_entries(&read(dir.path(), "a.json"));
    assert_eq!(m.len(), 4);
    for i in 0..4 {
        for j in 0..4 {
            assert!((m[i][j] - m[j][i]).abs() < 1e-15);
            let dot: f64 = (0..4).map(|k| m[i][k] * m[j][k]).sum();
            assert!((dot - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
        }
    }
}

#[test]
fn gen_quarter_turn_is_the_swap() {
    let dir = tempfile::tempdir().unwrap();
    let half_pi = std::f64::consts::FRAC_PI_2.to_string();
    let v = json(&qcayley(dir.path(), &["gen", "--thetas", &half_pi]));
    let m = real_entries(&v["operator"]);
    let want = [[0.0, 1.0], [1.0, 0.0]];
    for i in 0..2 {
        for j in 0..2 {
            assert!((m[i][j] - want[i][j]).abs() < 1e-12);
        }
    }
}

#[test]
fn gen_signs_and_perm() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&qcayley(dir.path(), &["gen", "--thetas", "0", "--signs", "-1", "--perm", "1,0"]));
    let m = real_entries(&v["operator"]);
    // rotation block first, then the -1
    let want = [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]];
    assert_eq!(m, want.map(|r| r.to_vec()).to_vec());
}

#[test]
fn gen_without_blocks_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcayley(dir.path(), &["gen"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "InvalidArgument");
    assert!(out.stdout.is_empty());
}

#[test]
fn spectrum_defect_and_cayley_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    json(&qcayley(p, &["gen", "--thetas", "0.7", "--out", "a.json"]));

    let s = json(&qcayley(p, &["sspectrum", "a.json"]));
    let spheres = s["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 2);
    for (sph, re) in spheres.iter().zip([-1.0, 1.0]) {
        assert!((sph["re"].as_f64().unwrap() - re).abs() < 1e-9);
        assert!(sph["im_norm"].as_f64().unwrap().abs() < 1e-9);
    }
    assert_eq!(s["all_pairs_within_tol"], true);

    let d = json(&qcayley(p, &["defect", "a.json", "--q", "0,1,1,1"]));
    assert_eq!(d["regular"], true);
    assert_eq!(d["d"], 0);
    assert!(d["c_q"].as_f64().unwrap() >= 3f64.sqrt() - 1e-9);

    assert!(qcayley(p, &["cayley", "a.json", "--lambda", "0.5,1,2,0.5", "--out", "pair.json"]).status.success());
    let pair = read(p, "pair.json");
    assert_eq!(pair["residuals"]["range_of_i_minus_u_is_domain"], true);
    assert!(pair["residuals"]["isometry"].as_f64().unwrap() < 1e-9);

    let inv = json(&qcayley(p, &["inv-cayley", "pair.json"]));
    assert!(inv["residuals"]["round_trip"].as_f64().unwrap() < 1e-8);
    let a = real_entries(&read(p, "a.json"));
    let back = &inv["operator"]["entries"];
    for i in 0..2 {
        for j in 0..2 {
            let q = back[i][j].as_array().unwrap();
            assert!((q[0].as_f64().unwrap() - a[i][j]).abs() < 1e-8);
            assert!(q[1..].iter().all(|c| c.as_f64().unwrap().abs() < 1e-8));
        }
    }
}

#[test]
fn real_lambda_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    json(&qcayley(dir.path(), &["gen", "--thetas", "0.7", "--out", "a.json"]));
    let out = qcayley(dir.path(), &["cayley", "a.json", "--lambda", "1,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "InvalidLambda");
}

#[test]
fn inverse_of_the_identity_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let id = r#"{"n":2,"entries":[[[1,0,0,0],[0,0,0,0]],[[0,0,0,0],[1,0,0,0]]]}"#;
    std::fs::write(dir.path().join("u.json"), id).unwrap();
    let out = qcayley(dir.path(), &["inv-cayley", "u.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["detail"].is_string());
}

#[test]
fn verify_covers_every_suite_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qcayley(dir.path(), &["verify", "--seed", "42", "--trials", "200", "--out", "r.json"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let r = read(dir.path(), "r.json");
    assert_eq!(r["all_pass"], true);
    let props = r["propositions"].as_object().unwrap();
    let mut want: Vec<&str> = IDS.to_vec();
    want.sort();
    let mut got: Vec<&str> = props.keys().map(String::as_str).collect();
    got.sort();
    assert_eq!(got, want);
    for (id, p) in props {
        assert_eq!(p["pass"], true, "{id}: {p}");
        assert!(p["trials"].as_u64().unwrap() >= 1, "{id}");
        assert_eq!(p["violations"], 0, "{id}");
    }
}

#[test]
fn verify_single_trial_runs_every_suite() {
    let dir = tempfile::tempdir().unwrap();
    let r = json(&qcayley(dir.path(), &["verify", "--trials", "1", "--max-dim", "3"]));
    let props = r["propositions"].as_object().unwrap();
    assert_eq!(props.len(), IDS.len());
    assert!(props.values().all(|p| p["trials"].as_u64().unwrap() >= 1));
}

#[test]
fn verify_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "--seed", "7", "--trials", "5", "--max-dim", "4"];
    let a = qcayley(dir.path(), &args);
    let b = qcayley(dir.path(), &args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = qcayley(dir.path(), &["verify", "--seed", "8", "--trials", "5", "--max-dim", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn verify_rejects_corrupt_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{bad").unwrap();
    let out = qcayley(dir.path(), &["verify", "--input", "bad.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "Malformed");
}

#[test]
fn tolerance_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    json(&qcayley(dir.path(), &["gen", "--thetas", "0.7", "--out", "a.json"]));
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_qcayley"))
            .current_dir(dir.path())
            .env("QCAYLEY_TOL", tol)
            .args(["sspectrum", "a.json"])
            .output()
            .unwrap()
    };
    assert_eq!(json(&run("1e-6"))["tol"], 1e-6);
    assert_eq!(json(&qcayley(dir.path(), &["sspectrum", "a.json"]))["tol"], 1e-9);
    assert_eq!(run("nope").status.code(), Some(2));
    let flag = qcayley(dir.path(), &["sspectrum", "a.json", "--tol", "1e-4"]);
    assert_eq!(json(&flag)["tol"], 1e-4);
}

#[test]
fn basis_check_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.json"), r#"{"n":3,"entries":[[[1,0,0,0],[0,0,0,0],[0,0,0,0]],[[0,0,0,0],[2,0,0,0],[0,0,0,0]],[[0,0,0,0],[0,0,0,0],[3,0,0,0]]]}"#).unwrap();
    let v = json(&qcayley(dir.path(), &["basis-check", "standard", "standard", "--operator", "a.json"]));
    assert_eq!(v["compatible"], true);
    assert!(v["cross_imag"].as_f64().unwrap() < 1e-12);
}

#[test]
fn inverse_reuses_the_pair_lambda_and_basis() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    json(&qcayley(p, &["gen", "--thetas", "1.1", "--out", "a.json"]));
    std::fs::write(p.join("b.json"), "[[[0,0,1,0],[0,0,0,0]],[[0,0,0,0],[0,0,1,0]]]").unwrap();
    let args = ["cayley", "a.json", "--basis", "b.json", "--lambda", "-0.3,0.5,-2,1", "--relax-lambda", "--out", "pair.json"];
    assert!(qcayley(p, &args).status.success());
    let pair = read(p, "pair.json");
    assert!(pair["basis"].is_array());
    let inv = json(&qcayley(p, &["inv-cayley", "pair.json"]));
    assert_eq!(inv["lambda"], pair["lambda"]);
    assert_eq!(inv["basis"], pair["basis"]);
    assert!(inv["residuals"]["round_trip"].as_f64().unwrap() < 1e-8);
    assert!(inv["residuals"]["forward_round_trip"].as_f64().unwrap() < 1e-8);
}
