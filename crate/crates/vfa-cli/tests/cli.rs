//! End-to-end tests of the `vf` binary: artifact determinism, report
//! verification, and the subcommand plumbing.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn vf() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vf"))
}

fn ok(output: &Output) {
    assert!(
        output.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
}

fn write_config(dir: &Path, noise: bool) -> PathBuf {
    let noise_section = if noise {
        "[noise]\nsnr_db = 5.5\nseed = 1015\nthreshold_grid = 40\n\n\
         [transform]\nform = \"bank\"\nbank = \"raised-cosine\"\nk = 9\nsquared = false\n"
    } else {
        "[transform]\nform = \"rihaczek\"\n"
    };
    let text = format!(
        "[graph]\nkind = \"swiss-roll\"\nn = 40\nalpha = 100.0\nkappa = 5\nseed = 15\n\n\
         [[signal.components]]\nfrom = 1\nto = 20\neigen_index = 30\namplitude = 2.0\npeak_normalize = true\n\n\
         [[signal.components]]\nfrom = 21\nto = 40\neigen_index = 4\namplitude = 1.0\npeak_normalize = true\n\n\
         {noise_section}"
    );
    let path = dir.join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), false);
    for sub in ["a", "b"] {
        let out = vf()
            .args(["run"])
            .arg(&config)
            .arg("--out")
            .arg(dir.path().join(sub))
            .output()
            .unwrap();
        ok(&out);
    }
    for name in ["graph.csv", "graph.json", "signal.csv", "energy.csv", "marginals.csv", "report.json"]
    {
        let a = std::fs::read(dir.path().join("a").join(name)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn verify_passes_fresh_reports_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), false);
    let out_dir = dir.path().join("run");
    ok(&vf().args(["run"]).arg(&config).arg("--out").arg(&out_dir).output().unwrap());
    let report_path = out_dir.join("report.json");
    let verify = vf().args(["verify"]).arg(&report_path).output().unwrap();
    ok(&verify);
    assert!(String::from_utf8_lossy(&verify.stdout).contains("PASS"));

    // perturb a recorded value: verification must fail on that check
    let mut report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    report["checks"][0]["value"] = serde_json::json!(0.5);
    std::fs::write(&report_path, serde_json::to_string_pretty(&report).unwrap()).unwrap();
    let verify = vf().args(["verify"]).arg(&report_path).output().unwrap();
    assert_eq!(verify.status.code(), Some(2));
    let stdout = String::from_utf8_lossy(&verify.stdout);
    assert!(stdout.contains("FAIL"), "{stdout}");
    assert!(stdout.contains("vertex-marginal-error"), "{stdout}");
}

#[test]
fn denoising_run_reports_snr_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), true);
    let out_dir = dir.path().join("run");
    ok(&vf().args(["run"]).arg(&config).arg("--out").arg(&out_dir).output().unwrap());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let snr_in = report["metrics"]["snr_in_db"].as_f64().unwrap();
    let snr_out = report["metrics"]["snr_out_db"].as_f64().unwrap();
    assert!((snr_in - 5.5).abs() < 1e-9);
    assert!(snr_out >= snr_in, "tuned threshold can never lose to doing nothing");
    assert!(out_dir.join("filtered.csv").exists());
    assert!(out_dir.join("noisy.csv").exists());
    ok(&vf().args(["verify"]).arg(out_dir.join("report.json")).output().unwrap());
}

#[test]
fn subcommand_chain_gen_eig_gft_lgft_filter() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    ok(&vf()
        .args(["gen", "--kind", "swiss-roll", "-n", "30", "--kappa", "5", "--seed", "15"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let graph = out.join("graph");
    ok(&vf().args(["eig", "--graph"]).arg(&graph).arg("--out").arg(&out).output().unwrap());
    assert!(out.join("eigenvalues.csv").exists());
    assert!(out.join("eigenvectors.csv").exists());

    // synthesize a signal from one eigenvector column
    let (labels, vectors) = vfa::io::read_matrix(&out.join("eigenvectors.csv")).unwrap();
    assert_eq!(labels.len(), 30);
    let x = vectors.column(7).to_owned();
    let signal = out.join("signal.csv");
    vfa::io::write_signal(&signal, &x).unwrap();

    ok(&vf()
        .args(["gft", "--graph"])
        .arg(&graph)
        .arg("--signal")
        .arg(&signal)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let spectrum = vfa::io::read_signal(&out.join("spectrum.csv")).unwrap();
    // eigenvector input: spectrum is the 8th unit vector
    for (k, v) in spectrum.iter().enumerate() {
        let expect = if k == 7 { 1.0 } else { 0.0 };
        assert!((v - expect).abs() < 1e-9, "spectrum[{k}] = {v}");
    }

    let lgft_out = dir.path().join("lgft");
    ok(&vf()
        .args(["lgft", "--graph"])
        .arg(&graph)
        .arg("--signal")
        .arg(&signal)
        .args(["--use-bank", "--bank", "raised-cosine", "-k", "9", "--reassign"])
        .arg("--out")
        .arg(&lgft_out)
        .output()
        .unwrap());
    assert!(lgft_out.join("map.csv").exists());
    assert!(lgft_out.join("map.meta.json").exists());
    assert!(lgft_out.join("marginals.csv").exists());
    let map = vfa::io::read_map(&lgft_out.join("map")).unwrap();
    // reassigned map: exactly one nonzero per row
    for row in map.matrix.rows() {
        assert!(row.iter().filter(|v| **v != 0.0).count() <= 1);
    }

    let filter_out = dir.path().join("filter");
    ok(&vf()
        .args(["filter", "--graph"])
        .arg(&graph)
        .arg("--signal")
        .arg(&signal)
        .args(["--bank", "raised-cosine", "-k", "9", "--threshold", "0.001"])
        .arg("--snr-ref")
        .arg(&signal)
        .arg("--out")
        .arg(&filter_out)
        .output()
        .unwrap());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(filter_out.join("filter_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["K"], 9);
    assert!(report["snr_out"].as_f64().unwrap() > 30.0, "clean input should survive thresholding");
}

#[test]
fn optimize_tau_and_frame_bounds_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("artifacts");
    ok(&vf()
        .args(["gen", "--kind", "path", "-n", "24"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap());
    let graph = out.join("graph");
    let x = vfa::signal::random_signal(24, 4);
    let signal = out.join("signal.csv");
    vfa::io::write_signal(&signal, &x).unwrap();

    let tau_out = dir.path().join("tau");
    let output = vf()
        .args(["optimize-tau", "--graph"])
        .arg(&graph)
        .arg("--signal")
        .arg(&signal)
        .args(["--tau0", "1.0", "--alpha", "2.0"])
        .arg("--out")
        .arg(&tau_out)
        .output()
        .unwrap();
    ok(&output);
    let trace = std::fs::read_to_string(tau_out.join("tau_trace.csv")).unwrap();
    assert!(trace.lines().count() > 3);
    assert!(trace.starts_with("iteration,tau,measure"));

    let output = vf()
        .args(["frame-bounds", "--graph"])
        .arg(&graph)
        .args(["--bank", "meyer", "-k", "7"])
        .output()
        .unwrap();
    ok(&output);
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("\"parseval_frame\":true"), "{stdout}");
}

#[test]
fn shipped_configs_run_and_verify() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(&configs).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let name = path.file_stem().unwrap().to_string_lossy().to_string();
        let out = dir.path().join(&name);
        ok(&vf().args(["run"]).arg(&path).arg("--out").arg(&out).output().unwrap());
        let verify = vf().args(["verify"]).arg(out.join("report.json")).output().unwrap();
        ok(&verify);
        assert!(
            !String::from_utf8_lossy(&verify.stdout).contains("FAIL"),
            "{name}: verification failed"
        );
    }
}

#[test]
fn config_errors_are_precise_and_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[graph]\nkind = \"path\"\nn = 10\n\n\
         [[signal.components]]\nfrom = 1\nto = 6\neigen_index = 2\n\n\
         [[signal.components]]\nfrom = 6\nto = 10\neigen_index = 3\n\n\
         [transform]\nform = \"rihaczek\"\n",
    )
    .unwrap();
    let output = vf().args(["run"]).arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("signal.components[1]"), "{stderr}");

    // TOML syntax errors surface with line information
    std::fs::write(&bad, "[graph\nkind = \"path\"\n").unwrap();
    let output = vf().args(["run"]).arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("line 1") || stderr.contains("TOML"), "{stderr}");
}
