use std::fs;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_scalinglab"));
    c.env_remove("SCALINGLAB_OUT");
    c
}

fn write_config(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

const DDCURVE: &str = "experiment = \"ddcurve\"\n[ddcurve]\nn = 5\nm = 4\ngrid_points = 6\n";

#[test]
fn subcommand_with_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DDCURVE);
    let out = dir.path().join("out");
    let status = bin()
        .args(["ddcurve", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(["--seed-list", "7,8", "--threads", "2"])
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let manifest = fs::read_to_string(out.join("manifest.toml")).unwrap();
    assert!(manifest.contains("seeds = [7, 8]"), "{manifest}");
    assert!(out.join("ddcurve.csv").exists());
}

#[test]
fn env_var_sets_output_and_flag_beats_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DDCURVE);
    let env_out = dir.path().join("env");
    let ok = bin().arg("run").arg("--config").arg(&cfg).env("SCALINGLAB_OUT", &env_out).output().unwrap().status;
    assert!(ok.success());
    assert!(env_out.join("ddcurve.csv").exists());

    let flag_out = dir.path().join("flag");
    let ok = bin()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&flag_out)
        .env("SCALINGLAB_OUT", dir.path().join("unused"))
        .output()
        .unwrap()
        .status;
    assert!(ok.success());
    assert!(flag_out.join("ddcurve.csv").exists());
    assert!(!dir.path().join("unused").exists());
}

fn failure(config: &str, sub: &str) -> String {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), config);
    let out = bin().arg(sub).arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert!(!out.status.success());
    String::from_utf8(out.stderr).unwrap()
}

#[test]
fn errors_are_distinct_and_name_the_key() {
    let unknown = failure("experiment = \"nope\"\n", "run");
    assert!(unknown.contains("unknown experiment `nope`"), "{unknown}");

    let bad_key = failure("experiment = \"ddcurve\"\n[ddcurve]\nwidth = 3\n", "run");
    assert!(bad_key.contains("invalid key `ddcurve.width`"), "{bad_key}");

    let wrong_section = failure("experiment = \"ddcurve\"\n[predict]\nn = 3\n", "run");
    assert!(wrong_section.contains("`predict`"), "{wrong_section}");

    let mismatch = failure(DDCURVE, "predict");
    assert!(mismatch.contains("invalid key `experiment`"), "{mismatch}");
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), DDCURVE);
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "").unwrap();
    let out = bin().arg("run").arg("--config").arg(&cfg).arg("--out").arg(blocker.join("x")).output().unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("output directory") && err.contains("not writable"), "{err}");
}
