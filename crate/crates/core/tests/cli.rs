use std::process::{Command, Output};

fn qmzv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmzv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn series_csv_is_divisor_sums() {
    let o = qmzv(&["series", "--family", "zbar", "--indices", "2", "--order", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "n,coeff\n0,0\n1,1\n2,3\n3,4\n4,7\n5,6\n");
}

#[test]
fn verify_reports_pass_as_json() {
    let o = qmzv(&[
        "verify", "--identity", "euler-zbar", "--a", "2", "--b", "3", "--order", "50", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "{\"identity\":\"euler-zbar\",\"a\":2,\"b\":3,\"order\":50,\"status\":\"pass\"}\n"
    );
}

#[test]
fn order_zero_is_a_degenerate_pass() {
    let o = qmzv(&["verify", "--identity", "euler-zbar", "--a", "2", "--b", "2", "--order", "0"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn failing_report_exits_one() {
    // q-side gap at q = 99/100 is far above 1e-6
    let o = qmzv(&[
        "limit-check", "--a", "2", "--b", "2", "--cutoff", "200", "--q-tolerance", "1/1000000",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("fail"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qmzv(&["verify", "--identity", "no-such-thing", "--a", "2", "--b", "2"]).status.code(), Some(2));
    assert_eq!(qmzv(&["eval", "--family", "zbar", "--indices", "2", "--q", "0.5", "--cutoff", "3"]).status.code(), Some(2));
    assert_eq!(qmzv(&["verify", "--identity", "euler-zbar", "--a", "2"]).status.code(), Some(2));
    assert_eq!(qmzv(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn domain_errors_exit_three_and_name_the_precondition() {
    let o = qmzv(&["verify", "--identity", "euler-zbar", "--a", "3", "--b", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a <= b"));

    let o = qmzv(&["eval", "--family", "zbar", "--indices", "2", "--q", "3/2", "--cutoff", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(0, 1)"));

    let o = qmzv(&["series", "--family", "zbar", "--indices", "1", "--order", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn eval_is_an_exact_fraction() {
    let o = qmzv(&["eval", "--family", "zbar", "--indices", "2", "--q", "1/2", "--cutoff", "2"]);
    assert_eq!(stdout(&o), "22/9\n");
    let o = qmzv(&["eval", "--family", "zbar", "--indices", "2", "--q", "1/2", "--cutoff", "2", "--format", "json"]);
    assert_eq!(
        stdout(&o),
        "{\"cutoff\":2,\"family\":\"zbar\",\"indices\":[2],\"q\":\"1/2\",\"value\":\"22/9\"}\n"
    );
}

#[test]
fn table_is_deterministic_across_worker_counts() {
    let one = qmzv(&["table", "--max-weight", "4", "--order", "20", "--format", "json", "--jobs", "1"]);
    let many = qmzv(&["table", "--max-weight", "4", "--order", "20", "--format", "json", "--jobs", "4"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
    let parsed: serde_json::Value = serde_json::from_slice(&one.stdout).unwrap();
    assert!(parsed.as_array().unwrap().iter().all(|r| r["status"] == "pass"));
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("qmzv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = qmzv(&[
        "verify", "--identity", "ptilde-yy", "--order", "20", "--format", "json", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(written, "{\"identity\":\"ptilde-yy\",\"order\":20,\"status\":\"pass\"}\n");
    std::fs::remove_dir_all(&dir).unwrap();
}
