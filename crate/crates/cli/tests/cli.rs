use std::path::Path;
use std::process::{Command, Output};

use isacjam_cli::experiment::{Scenario, TRACE_HEADER};
use isacjam_cli::persist::load_sequence;
use isacjam_cli::{preset, resolve, Overrides};

fn isacjam(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isacjam"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn presets_lists_every_preset() {
    let o = isacjam(&["presets"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["table3-pprj", "table3-rrj", "desk-pprj", "desk-rrj", "convergence", "desk-ser"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "preset = \"desk-pprj\"\nrhoo = 0.1\n");
    let o = isacjam(&["design", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`rhoo`"));

    let cfg = write_config(dir.path(), "preset = \"desk-pprj\"\nlength = 63\n");
    assert_eq!(code(&isacjam(&["design", &cfg])), 2);
    let cfg = write_config(dir.path(), "");
    assert_eq!(code(&isacjam(&["design", &cfg, "--preset", "nope"])), 2);
    assert_eq!(code(&isacjam(&["design", &cfg, "--override", "gamma=0.5"])), 2);
    assert_eq!(code(&isacjam(&["design", "/nonexistent/scenario.toml"])), 2);
    assert_eq!(code(&isacjam(&["frobnicate"])), 2);
}

#[test]
fn numerical_failure_exits_with_3_and_names_the_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "preset = \"desk-pprj\"\na_max_ratio = 1e300\n");
    let out = dir.path().join("out");
    let o = isacjam(&["design", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("iteration 1"));
}

#[test]
fn design_files_reload_bit_exact_and_evaluate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "preset = \"desk-rrj\"\n");
    let out = dir.path().join("design");
    let out_s = out.to_str().unwrap();
    let o = isacjam(&["design", &cfg_path, "--out-dir", out_s, "--seed", "5", "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let cfg = resolve(
        "preset = \"desk-rrj\"\n",
        &Overrides {
            seed: Some(5),
            output: Some(out_s.to_string()),
            ..Default::default()
        },
    )
    .unwrap();
    let design = Scenario::new(&cfg).unwrap().proposed().unwrap();
    let x = load_sequence(&out.join("x.txt")).unwrap();
    let w = load_sequence(&out.join("w.txt")).unwrap();
    assert_eq!(x.config_hash.as_deref(), Some(cfg.hash().as_str()));
    for (a, b) in x.samples.iter().zip(design.x.iter()).chain(w.samples.iter().zip(design.w.iter())) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }
    let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), design.trace.iterations() + 1);

    let o = isacjam(&["evaluate", &cfg_path, "--out-dir", out_s, "--seed", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("evaluation.csv").exists());
    assert!(String::from_utf8_lossy(&o.stdout).contains("PSLR"));

    // A different seed is a different config; the saved pair does not belong to it.
    let o = isacjam(&["evaluate", &cfg_path, "--out-dir", out_s, "--seed", "6"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn experiment_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "preset = \"desk-pprj\"\nexperiment = \"beta_sweep\"\nser_trials = 50\n",
    );
    let run = |name: &str, seed: &str, threads: &str| {
        let out = dir.path().join(name);
        let o = isacjam(&["experiment", &cfg, "--out-dir", out.to_str().unwrap(), "--seed", seed, "--threads", threads]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("beta_sweep.csv")).unwrap()
    };
    let a = run("a", "3", "1");
    let b = run("b", "3", "3");
    let c = run("c", "4", "1");
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn resolved_config_written_with_outputs_reloads_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = write_config(dir.path(), "preset = \"convergence\"\n");
    let out = dir.path().join("conv");
    let o = isacjam(&["experiment", &cfg_path, "--out-dir", out.to_str().unwrap(), "--override", "max_iter=50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let saved = std::fs::read_to_string(out.join("config.toml")).unwrap();
    let back = resolve(&saved, &Overrides::default()).unwrap();
    assert_eq!(back.max_iter, 50);
    assert_eq!(back.preset, "convergence");
    let mut expect = preset("convergence").unwrap();
    expect.max_iter = 50;
    expect.output = out.display().to_string();
    assert_eq!(back, expect);
    let csv = std::fs::read_to_string(out.join("convergence.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), TRACE_HEADER.join(","));
}
