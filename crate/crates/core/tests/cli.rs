use std::path::Path;
use std::process::{Command, Output};

fn lieheat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lieheat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_config(text: &str) -> (Output, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.toml");
    std::fs::write(&path, text).unwrap();
    let out = lieheat(&["run", path.to_str().unwrap(), "--threads", "2"]);
    (out, dir)
}

fn example(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_is_stable() {
    let o = lieheat(&["list"]);
    assert!(o.status.success());
    let names: Vec<String> = String::from_utf8(o.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(
        names,
        ["semigroup", "ck_star", "off_diagonal", "decomposition", "minkowski", "norm_equivalence", "mollify"]
    );
}

#[test]
fn describe_documents_parameters() {
    let o = lieheat(&["describe", "off_diagonal"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for needle in ["K", "N", "σ", "A", "α", "T = t_max", "k_points = 24"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
}

#[test]
fn unknown_suite_lists_valid_names() {
    let o = lieheat(&["describe", "heat"]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("heat") && e.contains("semigroup") && e.contains("mollify"), "{e}");
}

#[test]
fn minimal_circle_run_writes_report_and_table() {
    let (o, dir) = run_config(&example("minimal_circle.toml"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out/minimal_circle");
    let csv = std::fs::read_to_string(out.join("semigroup.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("operator,check,value,certificate"));
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        for c in &cells[2..] {
            let v: f64 = c.parse().unwrap();
            assert_eq!(&lieheat::cli::format_f64(v), c, "not round-trip formatted");
        }
    }
    let report: toml::Table = std::fs::read_to_string(out.join("report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["engine"]["version"].as_str(), Some(env!("CARGO_PKG_VERSION")));
    assert_eq!(report["run"]["pass"].as_bool(), Some(true));
    assert_eq!(report["suites"]["semigroup"]["pass"].as_bool(), Some(true));
    assert_eq!(report["config"]["group"]["factors"][0].as_str(), Some("circle"));
}

#[test]
fn echoed_config_reproduces_tables() {
    let (o, dir) = run_config(&example("minimal_circle.toml"));
    assert!(o.status.success());
    let out = dir.path().join("out/minimal_circle");
    let report: toml::Table = std::fs::read_to_string(out.join("report.toml")).unwrap().parse().unwrap();
    let mut echo = report["config"].as_table().unwrap().clone();
    echo.insert("output".into(), toml::Value::Table(toml::toml! { dir = "again" }));
    let (o2, dir2) = run_config(&toml::to_string(&echo).unwrap());
    assert!(o2.status.success(), "{}", stderr(&o2));
    assert_eq!(
        std::fs::read(out.join("semigroup.csv")).unwrap(),
        std::fs::read(dir2.path().join("again/semigroup.csv")).unwrap()
    );
}

#[test]
fn dominance_violation_exits_3() {
    let (o, dir) = run_config(&example("not_comparable.toml"));
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not comparable"), "{}", stderr(&o));
    assert!(!dir.path().join("out/not_comparable/report.toml").exists());
}

#[test]
fn bad_keys_exit_2_and_name_the_key() {
    let cases = [
        ("[group]\nfactors = [\"circle\"]\n[suites.semigroup]\ntee = 1.0\n", "suites.semigroup.tee"),
        ("[group]\nfactors = [\"torus\"]\n[suites.semigroup]\n", "group.factors[0]"),
        ("[group]\nfactors = [\"circle\"]\n[delta]\nweights = [1.0, 2.0]\n[suites.semigroup]\n", "delta.weights"),
        ("[group]\nfactors = [\"su2\"]\n[suites.mollify]\n", "suites.mollify"),
        ("[group]\nfactors = [\"circle\"]\n", "suites"),
        ("[group]\nfactors = [\"su2\"]\n[operator]\na = [[1.0]]\n[suites.semigroup]\n", "operator.a"),
    ];
    for (text, key) in cases {
        let (o, _dir) = run_config(text);
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(&format!("`{key}`")), "{key}: {}", stderr(&o));
    }
}

#[test]
fn infeasible_truncation_exits_3() {
    let (o, _dir) = run_config("[group]\nfactors = [\"su2\"]\n[truncation]\nmax_cutoff = 50.0\n[suites.ck_star]\noperator = \"delta\"\n");
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("truncation infeasible"), "{}", stderr(&o));
}

#[test]
fn failing_suite_exits_1_with_report() {
    let (o, dir) = run_config(
        "[group]\nfactors = [\"circle\"]\n[truncation]\nmax_cutoff = 1e5\n[output]\ndir = \"o\"\n[suites.ck_star]\nt_min = 0.01\nfinal_max = 1e-9\n",
    );
    assert_eq!(o.status.code(), Some(1));
    let report: toml::Table = std::fs::read_to_string(dir.path().join("o/report.toml")).unwrap().parse().unwrap();
    assert_eq!(report["run"]["pass"].as_bool(), Some(false));
    assert_eq!(report["suites"]["ck_star"]["operator"]["final_below_bound"].as_bool(), Some(false));
    assert!(dir.path().join("o/ck_star.csv").exists());
}
