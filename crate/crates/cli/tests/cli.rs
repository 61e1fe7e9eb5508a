use std::process::Command;

fn unitcoh() -> Command {
    Command::new(env!("CARGO_BIN_EXE_unitcoh"))
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("unitcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn verify_writes_a_report() {
    let config = scratch("ok.toml");
    let out = scratch("ok.json");
    std::fs::write(&config, "[[entry]]\nlabel = \"Q2(i)\"\np = 2\neisenstein_polys = [[2, 2, 1]]\n").unwrap();
    let status = unitcoh()
        .args(["verify", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["entries"][0]["label"], "Q2(i)");
    assert_eq!(json["summary"]["fail"], 0);
}

#[test]
fn verify_exit_codes() {
    let config = scratch("bad.toml");
    let out = scratch("bad.json");
    std::fs::write(
        &config,
        "[[entry]]\nlabel = \"Q2(i)\"\np = 2\neisenstein_polys = [[2, 2, 1]]\nexpected = { e = 3 }\n",
    )
    .unwrap();
    let run = |config: &std::path::Path| {
        unitcoh().args(["verify", "--config"]).arg(config).arg("--out").arg(&out).output().unwrap()
    };
    assert_eq!(run(&config).status.code(), Some(1));

    std::fs::write(&config, "[[entry]]\nlabel = 3\n").unwrap();
    let o = run(&config);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));
}

#[test]
fn h1_prints_the_group() {
    let o = unitcoh()
        .args(["h1", "--p", "2", "--eisenstein", "-2,0,1", "--level", "0"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("invariant factors of H^1(G, U^0): [2]"), "{text}");
    assert!(text.contains("order of the fundamental class: 2"), "{text}");

    let o = unitcoh()
        .args(["h1", "--p", "5", "--eisenstein", "-5,0,0,1", "--level", "1"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not Galois"));
}
