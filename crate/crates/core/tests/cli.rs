use std::process::Command;

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ndn-manet"))
}

#[test]
fn invalid_config_exits_nonzero() {
    let out = cli().args(["run", "--nodes", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_config_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "nodes = 50\nwarp = 9\n").unwrap();
    let out = cli().arg("show-config").arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    std::fs::write(&path, "cs = 0\nruns = 3\ntraffic = \"m-1\"\n").unwrap();
    let out = cli()
        .arg("show-config")
        .arg("--config")
        .arg(&path)
        .args(["--cs", "50", "--cwl"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cs = 50"), "{text}");
    assert!(text.contains("runs = 3"), "{text}");
    assert!(text.contains("cwl = true"), "{text}");
    assert!(text.contains("traffic = \"many-to-one\""), "{text}");
}

#[test]
fn run_writes_one_row_per_seed() {
    let out = cli()
        .args(["run", "--topology", "linear-wired", "--nodes", "4", "--duration", "5", "--runs", "3"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("scenario,"));
    assert!(lines[1..].iter().all(|l| l.contains(",linear-wired,")), "{text}");
}

#[test]
fn placement_file_pins_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.toml");
    std::fs::write(&path, "consumers = [0, 1]\nproducers = [48, 49]\n").unwrap();
    let out = cli()
        .args(["run", "--traffic", "m-1", "--duration", "2", "--runs", "1"])
        .arg("--placement-file")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn scripted_replays_print_both_variants() {
    let out = cli().args(["scripted", "retx-multicast"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.contains("fixed") && text.contains("dil"));
}
