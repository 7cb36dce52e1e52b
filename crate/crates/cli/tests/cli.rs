//! End-to-end tests of the binary: exit codes, CSV shape and determinism.

use std::io::Write;
use std::process::Command;

fn hyplyap() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyplyap"))
}

fn write_cfg(name: &str, text: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("hyplyap-test-{name}-{}.cfg", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
    path
}

#[test]
fn bad_config_exits_1_with_diagnostics() {
    let cfg = write_cfg("bad", "model = linear2x2\ncfl = 1.2\nwhatever = 3\n");
    let out = hyplyap()
        .args(["run", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cfl"), "stderr: {err}");
    assert!(err.contains("whatever"), "stderr: {err}");
}

#[test]
fn unreadable_config_exits_1() {
    let out = hyplyap()
        .args(["run", "--config", "/nonexistent/nope.cfg"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_blowup_exits_3() {
    // A gigantic forcing amplitude pushes the state past the blow-up limit
    // within a few steps.
    let cfg = write_cfg("blowup", "J = 32\nT = 2\namp = 1e20\n");
    let out = hyplyap()
        .args(["run", "--preset", "linear-4.1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("blow-up"), "stderr: {err}");
}

#[test]
fn run_produces_decaying_csv() {
    let cfg = write_cfg("small-run", "J = 50\nT = 2\n");
    let out = hyplyap()
        .args(["run", "--preset", "linear-4.1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with("n,") {
            assert_eq!(line, "n,t,L,L_up,S,l2_state");
            continue;
        }
        let fields: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(fields.len(), 6);
        rows.push(fields);
    }
    assert!(rows.len() > 10);
    for r in &rows {
        assert!(r[2] <= r[3] * (1.0 + 1e-12), "L > L_up in row {r:?}");
    }
    let first = rows.first().unwrap();
    let last = rows.last().unwrap();
    assert!(last[2] < first[2], "no decay: {} -> {}", first[2], last[2]);
}

#[test]
fn run_output_is_deterministic() {
    let cfg = write_cfg("det", "J = 64\nT = 1\n");
    let run = || {
        hyplyap()
            .args(["run", "--preset", "linear-4.1", "--config"])
            .arg(&cfg)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn strict_mode_flags_bad_gain() {
    // k21 = 0.95 exceeds e^{-mu} and breaks the boundary condition.
    let cfg = write_cfg("badgain", "J = 64\nT = 1\nk21 = 0.95\n");
    let out = hyplyap()
        .args(["check", "--preset", "linear-4.1", "--strict", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let ok = hyplyap()
        .args(["check", "--preset", "linear-4.1", "--strict", "--config"])
        .arg(write_cfg("okgain", "J = 64\nT = 1\n"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn check_reports_verdicts_and_rates() {
    let cfg = write_cfg("check", "J = 200\nT = 1\n");
    let out = hyplyap()
        .args(["check", "--preset", "linear-4.1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("theta (positive definite)"));
    assert!(text.contains("verdict = pass"));
    assert!(text.contains("eta closed form"));
    assert!(text.contains("machine-readable:"));
    // Closed-form rate at J = 200, CFL 0.75 rounds to the published 0.44862.
    let eta_line = text.lines().find(|l| l.starts_with("eta_closed,")).unwrap();
    let eta: f64 = eta_line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((eta - 0.44862).abs() < 5e-5);
}

#[test]
fn custom_table_respects_config() {
    let cfg = write_cfg(
        "table",
        "model = custom-table\ncfl = 0.5\nT = 0.5\nmu = 0.4\nxi = 0.1\namp = 0\n",
    );
    let out = hyplyap()
        .args(["table", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# norms: max_n / sqrt(dt*sum)"));
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("J,"))
        .collect();
    assert_eq!(rows.len(), 4);
    for (row, cells) in rows.iter().zip([200usize, 400, 800, 1600]) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), cells);
        // The emitted eta equals the closed-form value bit for bit.
        let eta: f64 = fields[4].parse().unwrap();
        assert_eq!(eta, hyplyap::table_eta(cells, 0.5, 0.4, 0.1));
    }
}

#[test]
fn table_markdown_renders_rows() {
    let cfg = write_cfg(
        "tablemd",
        "model = custom-table\ncfl = 0.75\nT = 0.25\nmu = 0.575\nxi = 0.125\n",
    );
    let out = hyplyap()
        .args(["table", "--markdown", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("| J | Linf_diff | L2_diff | mu | eta |"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn sv_sweep_emits_mu_blocks() {
    let cfg = write_cfg("sv", "J = 50\nT = 0.5\nrecord-stride = 10\n");
    let out = hyplyap()
        .args(["sv", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("mu,n,t,L,L_up,S,l2_state"));
    for mu in ["0.1,", "0.3,", "0.575,"] {
        assert!(
            text.lines().any(|l| l.starts_with(mu)),
            "missing {mu} block"
        );
    }
    // Gains 0.75 exceed the admissible bound: the sweep must say so.
    assert!(text.contains("not certified"));
}

#[test]
fn sv_single_mu_when_config_sets_it() {
    let cfg = write_cfg("sv1", "J = 50\nT = 0.5\nmu = 0.3\nrecord-stride = 25\n");
    let out = hyplyap()
        .args(["sv", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("0.3,")));
    assert!(!text.lines().any(|l| l.starts_with("0.1,")));
}

#[test]
fn out_file_matches_stdout() {
    let cfg = write_cfg("outfile", "J = 64\nT = 0.5\n");
    let path = std::env::temp_dir().join(format!("hyplyap-out-{}.csv", std::process::id()));
    let to_file = hyplyap()
        .args(["run", "--preset", "linear-4.1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(to_file.status.code(), Some(0));
    let from_file = std::fs::read(&path).unwrap();
    let stdout = hyplyap()
        .args(["run", "--preset", "linear-4.1", "--config"])
        .arg(&cfg)
        .output()
        .unwrap()
        .stdout;
    assert_eq!(from_file, stdout);
    std::fs::remove_file(&path).ok();
}
