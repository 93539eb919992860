//! End-to-end runs of the installed binary: JSON payloads, exit codes,
//! error naming and seeded determinism.

use std::path::Path;
use std::process::{Command, Output};

use chronoglass::channel::KrausMap;
use chronoglass::matcore::{gates, max_mixed, ComplexMatrix};
use chronoglass::{io, ComplexMatrix as M};
use num_complex::Complex64;
use serde_json::Value;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_chronoglass")
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, Value, Output) {
    let out = Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    let parsed: Value =
        serde_json::from_slice(&out.stdout).expect("stdout is a single JSON document");
    (code, parsed, out)
}

fn write_fixture(dir: &Path, name: &str, m: &ComplexMatrix) {
    io::write_matrix(&dir.join(name), m).unwrap();
}

#[test]
fn swap_kernel_applies_the_plain_transpose() {
    let dir = tempfile::tempdir().unwrap();
    let m = gates::s().matmul(&gates::h());
    write_fixture(dir.path(), "m.json", &m);
    write_fixture(dir.path(), "swap.json", &gates::swap(2));
    let (code, result, _) = run_in(dir.path(), &["gtrans", "apply", "--w", "swap.json", "--m", "m.json"]);
    assert_eq!(code, 0);
    assert_eq!(result["status"], "ok");
    let got = as_matrix(&result["payload"]["matrix"]);
    assert!(got.approx_eq(&m.transpose(), 1e-14));
}

#[test]
fn compat_reports_the_image_channel() {
    let dir = tempfile::tempdir().unwrap();
    io::write_channel(&dir.path().join("h_unitary.json"), &KrausMap::unitary(&gates::h()).unwrap())
        .unwrap();
    write_fixture(dir.path(), "cnot.json", &gates::cnot_flipped());
    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "compat", "--channel", "h_unitary.json", "--w", "cnot.json"],
    );
    assert_eq!(code, 0);
    assert_eq!(result["payload"]["compatible"], true);
    let kraus = as_matrix(&result["payload"]["image"]["terms"][0]["kraus"]);
    assert!(kraus.approx_eq(&gates::x().matmul(&gates::h()), 1e-12));
}

#[test]
fn damping_is_incompatible_with_the_transpose_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let g: f64 = 0.5;
    let k0 = ComplexMatrix::diagonal(&[
        Complex64::new(1.0, 0.0),
        Complex64::new((1.0 - g).sqrt(), 0.0),
    ]);
    let mut k1 = ComplexMatrix::zeros(2, 2);
    k1.set(0, 1, Complex64::new(g.sqrt(), 0.0));
    let damp = KrausMap::channel(vec![k0, k1]).unwrap();
    io::write_channel(&dir.path().join("damp.json"), &damp).unwrap();
    write_fixture(dir.path(), "swap.json", &gates::swap(2));
    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "compat", "--channel", "damp.json", "--w", "swap.json"],
    );
    assert_eq!(code, 1);
    assert_eq!(result["status"], "predicate_false");
    assert_eq!(result["payload"]["compatible"], false);
}

#[test]
fn partial_compat_accepts_cz_under_the_swap_kernel() {
    let dir = tempfile::tempdir().unwrap();
    io::write_channel(&dir.path().join("cz.json"), &KrausMap::unitary(&gates::cz()).unwrap())
        .unwrap();
    write_fixture(dir.path(), "f.json", &gates::swap(2));
    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "compat", "--channel", "cz.json", "--w", "f.json", "--partial", "B"],
    );
    assert_eq!(code, 0);
    assert_eq!(result["payload"]["compatible"], true);
}

#[test]
fn prep_compat_admits_only_the_flat_state_for_the_swap_kernel() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "f.json", &gates::swap(2));
    write_fixture(dir.path(), "pi.json", &max_mixed(2));
    let mut ground = ComplexMatrix::zeros(2, 2);
    ground.set(0, 0, Complex64::new(1.0, 0.0));
    write_fixture(dir.path(), "ground.json", &ground);

    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "prep-compat", "--w", "f.json", "--sigma", "pi.json"],
    );
    assert_eq!(code, 0);
    assert!(as_matrix(&result["payload"]["tau"]).approx_eq(&max_mixed(2), 1e-10));

    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "prep-compat", "--w", "f.json", "--sigma", "ground.json"],
    );
    assert_eq!(code, 1);
    assert_eq!(result["payload"]["compatible"], false);
}

#[test]
fn ds_hits_the_depolarizing_pin_and_echoes_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    io::write_channel(
        &dir.path().join("depol2.json"),
        &KrausMap::completely_depolarizing(2).unwrap(),
    )
    .unwrap();
    let (code, result, _) = run_in(
        dir.path(),
        &["measure", "ds", "--channel", "depol2.json", "--seed", "7"],
    );
    assert_eq!(code, 0);
    let value = result["payload"]["value"].as_f64().unwrap();
    assert!((value - 0.86603).abs() < 1e-5);
    assert_eq!(result["seed"], 7);
}

#[test]
fn diamond_returns_two_for_orthogonal_unitaries() {
    let dir = tempfile::tempdir().unwrap();
    // Choi block of the difference map id - Ad_Z, kept trace-normalized.
    let id = KrausMap::identity(2).unwrap().choi();
    let z = KrausMap::unitary(&gates::z()).unwrap().choi();
    let diff = chronoglass::channel::ChoiMatrix::new(2, 2, id.matrix().sub_m(z.matrix())).unwrap();
    let text = io::choi_to_json(&diff);
    std::fs::write(dir.path().join("diff.json"), text).unwrap();
    let (code, result, _) = run_in(dir.path(), &["measure", "diamond", "--choi", "diff.json"]);
    assert_eq!(code, 0);
    let value = result["payload"]["value"].as_f64().unwrap();
    assert!((value - 2.0).abs() < 1e-4);
    assert!(result["payload"]["certificate"].as_f64().unwrap() < 1e-4);
}

#[test]
fn ubb_is_reproducible_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "cnot.json", &gates::cnot_flipped());
    let args = ["gtrans", "ubb", "--w", "cnot.json", "--seed", "3"];
    let (code, result, first) = run_in(dir.path(), &args);
    assert_eq!(code, 0);
    assert!(result["payload"]["residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(result["payload"]["unital_kernel_verified"], true);
    assert_eq!(result["seed"], 3);
    let (_, _, second) = run_in(dir.path(), &args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn corrupted_files_are_rejected_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("broken.json"), "{\"rows\": 2,").unwrap();
    write_fixture(dir.path(), "swap.json", &gates::swap(2));
    let (code, result, _) = run_in(
        dir.path(),
        &["gtrans", "apply", "--w", "swap.json", "--m", "broken.json"],
    );
    assert_eq!(code, 2);
    assert_eq!(result["status"], "input_error");
    let diag = result["diagnostics"][0].as_str().unwrap();
    assert!(diag.contains("broken.json"), "diagnostic should name the file: {diag}");
}

#[test]
fn dimension_mismatches_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "m.json", &gates::h());
    write_fixture(dir.path(), "w.json", &gates::swap(3));
    let (code, result, _) = run_in(dir.path(), &["gtrans", "apply", "--w", "w.json", "--m", "m.json"]);
    assert_eq!(code, 2);
    let diag = result["diagnostics"][0].as_str().unwrap();
    assert!(diag.contains("kernel"), "diagnostic should name the kernel: {diag}");
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (code, result, _) = run_in(dir.path(), &["gtrans", "ubb", "--w", "x.json", "--bogus"]);
    assert_eq!(code, 2);
    assert_eq!(result["status"], "input_error");
}

#[test]
fn rot_perfect_separates_hadamard_from_a_hermitian_mix() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path(), "h.json", &gates::h());
    let mix = ComplexMatrix::identity(2)
        .add_m(&gates::x().matmul(&gates::z()).scale(Complex64::new(0.0, 1.0)))
        .scale_re(1.0 / 2f64.sqrt());
    write_fixture(dir.path(), "mix.json", &mix);
    let (code, result, _) = run_in(dir.path(), &["tensor", "rot-perfect", "--m", "h.json"]);
    assert_eq!(code, 0);
    assert_eq!(result["payload"]["rotationally_perfect"], true);
    let (code, result, _) = run_in(dir.path(), &["tensor", "rot-perfect", "--m", "mix.json"]);
    assert_eq!(code, 1);
    assert_eq!(result["payload"]["rotationally_perfect"], false);
}

fn as_matrix(v: &Value) -> M {
    let parsed: io::MatrixJson = serde_json::from_value(v.clone()).unwrap();
    parsed.to_matrix().unwrap()
}
