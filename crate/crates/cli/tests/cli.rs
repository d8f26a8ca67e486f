use std::fs;
use std::path::Path;
use std::process::Command;

fn lowmach(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_lowmach"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.cfg");
    fs::write(
        &path,
        format!("resolution = 32\nt_final = 0.05\noutputs = 5\n{extra}"),
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_qhd_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "preset = random-Hs(3,4)\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(
        lowmach(&["run-qhd", "--config", &cfg, "--out", s(&a), "--seed", "11"]).0,
        0
    );
    assert_eq!(
        lowmach(&["run-qhd", "--config", &cfg, "--out", s(&b), "--seed", "11"]).0,
        0
    );
    let ta = fs::read(a.join("qhd.csv")).unwrap();
    assert_eq!(ta, fs::read(b.join("qhd.csv")).unwrap());
    assert_eq!(
        fs::read(a.join("qhd_final.snap")).unwrap(),
        fs::read(b.join("qhd_final.snap")).unwrap()
    );
    assert_eq!(String::from_utf8(ta).unwrap().lines().count(), 7);
    let echoed = fs::read_to_string(a.join("config.txt")).unwrap();
    assert!(echoed.contains("preset = random-Hs(3,11)"));
    assert!(fs::read_to_string(a.join("qhd_final.snap.meta"))
        .unwrap()
        .contains("resolution = 32"));
}

#[test]
fn sweep_default_has_three_rows_and_per_run_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("sweep");
    assert_eq!(lowmach(&["sweep", "--out", s(&out), "--workers", "2"]).0, 0);
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(
        lines[0],
        "eps,sup_H,sup_H_minus_floor,sup_strong_gap,fitted_rate,C_fit,M_fit"
    );
    assert_eq!(lines.len(), 4);
    for eps in ["0.2", "0.1", "0.05"] {
        let trace = fs::read_to_string(out.join(format!("eps_{eps}")).join("trace.csv")).unwrap();
        assert!(trace
            .starts_with("t,E,H,comp_velocity,comp_pressure,comp_quantum,strong_gap,weak_gap_1,"));
        assert_eq!(trace.lines().count(), 52);
    }
}

#[test]
fn sweep_is_identical_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "preset = two-mode-resonant\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(
        lowmach(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            s(&a),
            "--workers",
            "1",
            "--eps",
            "0.3,0.2,0.1"
        ])
        .0,
        0
    );
    assert_eq!(
        lowmach(&[
            "sweep",
            "--config",
            &cfg,
            "--out",
            s(&b),
            "--workers",
            "3",
            "--eps",
            "0.3,0.2,0.1"
        ])
        .0,
        0
    );
    assert_eq!(
        fs::read(a.join("report.csv")).unwrap(),
        fs::read(b.join("report.csv")).unwrap()
    );
    for eps in ["0.3", "0.2", "0.1"] {
        let p = format!("eps_{eps}/trace.csv");
        assert_eq!(fs::read(a.join(&p)).unwrap(), fs::read(b.join(&p)).unwrap());
    }
}

#[test]
fn every_subcommand_writes_its_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = small_config(tmp.path(), "dimension = 2\neuler_initial = shear\n");
    let cases = [
        (
            "run-euler",
            "euler.csv",
            "t,kinetic_energy,relative_divergence,max_velocity",
        ),
        ("run-limit", "limit.csv", "t,V_norm,V_H1,v_kinetic"),
        (
            "filter",
            "filter.csv",
            "t,V_norm,V_minus_Vbar,gap_norm,source_bound",
        ),
        (
            "entropy",
            "trace.csv",
            "t,E,H,comp_velocity,comp_pressure,comp_quantum,strong_gap,weak_gap_1",
        ),
    ];
    for (cmd, file, header) in cases {
        let out = tmp.path().join(cmd);
        let (code, err) = lowmach(&[cmd, "--config", &cfg, "--out", s(&out)]);
        assert_eq!(code, 0, "{cmd}: {err}");
        let text = fs::read_to_string(out.join(file)).unwrap();
        assert!(
            text.starts_with(header),
            "{cmd}: {}",
            text.lines().next().unwrap()
        );
        assert_eq!(text.lines().count(), 7, "{cmd}");
    }
    let triples = fs::read_to_string(tmp.path().join("run-limit/resonant_triples.csv")).unwrap();
    assert!(triples.starts_with("k0,k1,m0,m1,l0,l1,sigma_m,sigma_l,sigma_k"));
}

#[test]
fn check_passes_on_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("check");
    assert_eq!(lowmach(&["check", "--out", s(&out)]).0, 0);
    let text = fs::read_to_string(out.join("check.csv")).unwrap();
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("true")));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_eq!(lowmach(&["frobnicate"]).0, 1);
    assert_eq!(lowmach(&["sweep", "--workers", "many"]).0, 1);
    assert_eq!(lowmach(&["--help"]).0, 0);

    assert_eq!(
        lowmach(&["sweep", "--eps", "0.1,0.2", "--out", s(&out)]).0,
        2
    );
    assert_eq!(
        lowmach(&["entropy", "--preset", "vortex", "--out", s(&out)]).0,
        2
    );
    assert_eq!(
        lowmach(&["entropy", "--config", s(&tmp.path().join("missing.cfg"))]).0,
        2
    );
    let bad = small_config(tmp.path(), "colour = red\n");
    assert_eq!(
        lowmach(&["entropy", "--config", &bad, "--out", s(&out)]).0,
        2
    );

    let vacuum = small_config(tmp.path(), "coefficients = sigma 1 0 4 0\n");
    assert_eq!(
        lowmach(&[
            "entropy",
            "--config",
            &vacuum,
            "--eps",
            "0.5",
            "--out",
            s(&out)
        ])
        .0,
        3
    );

    let perturbed = small_config(tmp.path(), "coefficients = sigma 1 0 0.5 0\n");
    let (code, err) = lowmach(&[
        "check",
        "--config",
        &perturbed,
        "--eps",
        "0.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 4, "{err}");
    assert!(err.contains("energy_bound"));
}

#[test]
fn plot_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("plots");
    let sweep = tmp.path().join("report.csv");
    fs::write(
        &sweep,
        "eps,sup_H,sup_H_minus_floor,sup_strong_gap,fitted_rate,C_fit,M_fit\n\
         0.2,4e-3,1.5e-3,1e-14,NaN,1,2\n0.1,1.2e-3,2.9e-4,1e-14,2.4,1,1.7\n0.05,2.8e-4,6.6e-5,1e-14,2.1,1,0.5\n",
    )
    .unwrap();
    assert_eq!(lowmach(&["plot", s(&sweep), "--out", s(&out)]).0, 0);
    let first = fs::read(out.join("report.svg")).unwrap();
    assert_eq!(
        String::from_utf8_lossy(&first).matches("<circle").count(),
        3
    );
    assert_eq!(lowmach(&["plot", s(&sweep), "--out", s(&out)]).0, 0);
    assert_eq!(first, fs::read(out.join("report.svg")).unwrap());

    let empty = tmp.path().join("empty.csv");
    fs::write(
        &empty,
        "t,E,H,comp_velocity,comp_pressure,comp_quantum,strong_gap\n",
    )
    .unwrap();
    assert_ne!(lowmach(&["plot", s(&empty), "--out", s(&out)]).0, 0);
    assert!(!out.join("empty.svg").exists());
}
