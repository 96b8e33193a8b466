use std::fs;
use std::path::Path;

use esskit::cli::run;

fn esskit(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["esskit".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn compute_three_equal_weights() {
    let dir = tempfile::tempdir().unwrap();
    let t = 1.0 / 3.0;
    let w = write(dir.path(), "w.csv", &format!("w\n{t}\n{t}\n{t}\n0\n0\n"));
    let (code, out, _) = esskit(&["compute", "--weights", &w, "--method", "hr:2", "--method", "hr:inf"]);
    assert_eq!(code, 0);
    assert_eq!(out, "method,value,rate\nhr:2,3,0.6\nhr:inf,3,0.6\n");
}

#[test]
fn compute_accepts_raw_weights_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "# raw\nw_raw\n2\n2\n");
    let out_file = dir.path().join("o.csv");
    let (code, out, _) = esskit(&["compute", "--weights", &w, "--method", "gini", "--out", out_file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "method,value,rate\ngini,2,1\n");
    let file = fs::read_to_string(out_file).unwrap();
    assert!(file.starts_with("# seed=none, version="));
    assert!(file.ends_with(&out));
}

#[test]
fn empty_weights_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "empty.csv", "w\n");
    let (code, out, err) = esskit(&["compute", "--weights", &w, "--method", "hr:2"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: InvalidSize:"), "{err}");
}

#[test]
fn missing_file_is_a_domain_error() {
    let (code, _, err) = esskit(&["compute", "--weights", "/nonexistent/w.csv", "--method", "hr:2"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: Io:"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(esskit(&["frobnicate"]).0, 2);
    assert_eq!(esskit(&["compute", "--weights", "x.csv", "--method", "bogus"]).0, 2);
    assert_eq!(esskit(&["compute", "--weights", "x.csv"]).0, 2);
    assert_eq!(esskit(&["property-check", "--method", "hr:2", "--n", "5", "--nope"]).0, 2);
    assert_eq!(esskit(&[]).0, 2);
    let (code, out, _) = esskit(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("sweep-mean"));
}

#[test]
fn property_check_lp2_is_proper_with_c5_counterexample() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("report.csv");
    let args = ["property-check", "--method", "lp:2", "--n", "5", "--trials", "2000", "--seed", "7", "--csv", csv.to_str().unwrap()];
    let (code, out, _) = esskit(&args);
    assert_eq!(code, 0);
    assert!(out.ends_with("class: Proper\n"), "{out}");
    assert!(out.contains("C5 stability  FAIL  w=["), "{out}");
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("# seed=7, version="));
    assert!(rows.contains("lp:2,5,C5 stability,fail,\"w=["));
    assert_eq!(rows.lines().count(), 2 + 5);
    let (_, again, _) = esskit(&args);
    assert_eq!(out, again);
    assert_eq!(rows, fs::read_to_string(&csv).unwrap());
}

#[test]
fn sweep_then_fit_round_trip_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.txt", "# small\nn_samples=100\nreplications=200\ngrid_step=0.5\nbeta_step=0.5\nseed=5\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let sa = dir.path().join("sa.csv");
    let sb = dir.path().join("sb.csv");
    let run_one = |out: &Path, summary: &Path, extra: &[&str]| {
        let mut args = vec!["sweep-mean", "--config", &cfg, "--out", out.to_str().unwrap(), "--summary", summary.to_str().unwrap()];
        args.extend_from_slice(extra);
        esskit(&args)
    };
    let (code, printed, err) = run_one(&a, &sa, &[]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(run_one(&b, &sb, &["--sequential"]).0, 0);
    let (fa, fb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fa, fb);
    assert_eq!(fs::read(&sa).unwrap(), fs::read(&sb).unwrap());

    let text = String::from_utf8(fa).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("# seed=5, version="));
    assert!(header.contains("config=vary=mean;n_samples=100;replications=200;"));
    assert_eq!(lines.next().unwrap(), "param,ess_teo_rate,beta,ess_h_rate");
    // 5 grid points x (0.2:0.5:49.7, 2 and inf)
    assert_eq!(lines.count(), 5 * 102);
    assert!(text.contains(",inf,"));

    let summary_row = printed.lines().nth(1).unwrap().to_string();
    let beta_star = summary_row.split(',').next().unwrap();
    let (code, out, _) = esskit(&["optimal-beta", "--sweep", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, format!("beta_star\n{beta_star}\n"));
    let (code, out, _) = esskit(&["fit-combo", "--sweep", a.to_str().unwrap()]);
    assert_eq!(code, 0);
    // The CSV carries 10 significant digits, so the refit agrees to about that.
    let refit: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let direct: Vec<f64> = summary_row.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
    for (a, b) in refit.iter().zip(&direct) {
        assert!((a - b).abs() <= 1e-7 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn sweep_flags_override_config_and_bad_config_fails() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "replicates=10\n");
    let out = dir.path().join("s.csv");
    let (code, _, err) = esskit(&["sweep-sigma", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("unknown key 'replicates'"));
    let (code, _, err) = esskit(&[
        "sweep-sigma", "--n-samples", "50", "--replications", "100", "--grid-start", "0.5", "--grid-end", "1",
        "--grid-step", "0.25", "--beta-step", "1", "--center", "mse", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().next().unwrap().contains("vary=sigma;n_samples=50;replications=100;grid=0.5:0.25:1;"));
    assert!(text.lines().next().unwrap().ends_with("center=mse"));
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn collision_oracle_reports_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.csv", "w\n0.5\n0.25\n0.25\n");
    let (code, out, _) = esskit(&["collision-oracle", "--weights", &w, "--r", "20000", "--seed", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# seed=3, version="));
    assert_eq!(lines.next().unwrap(), "mean,std_error,expected,z_score,experiments");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[2], "2.666666667");
    assert!(row[3].parse::<f64>().unwrap() < 4.0);
    assert_eq!(row[4], "20000");
}

#[test]
fn model_select_table() {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "v.csv", "k,V\n0,1\n1,0.2\n2,0.1\n3,0\n");
    let (code, out, _) = esskit(&["model-select", "--curve", &c, "--method", "hr:inf", "--method", "hr:2"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[1], "method,raw,rounded");
    assert_eq!(lines[2], "hr:inf,1.25,1");
    assert!(lines[3].starts_with("hr:2,1.5151515"));
    let gap = write(dir.path(), "gap.csv", "k,V\n0,1\n2,0\n");
    assert_eq!(esskit(&["model-select", "--curve", &gap, "--method", "q"]).0, 1);
    let up = write(dir.path(), "up.csv", "k,V\n0,0\n1,1\n");
    let (code, _, err) = esskit(&["model-select", "--curve", &up, "--method", "q"]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error: NotMonotone:"), "{err}");
}
