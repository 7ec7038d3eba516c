//! Pins the column layout of every CSV each experiment writes.

mod common;

use common::{csv_bytes, tiny_config};
use scalinglab::{run_experiment, ExperimentKind};

const SCHEMAS: &str = include_str!("golden/schemas.txt");

fn observed() -> String {
    let mut lines = Vec::new();
    for kind in ExperimentKind::ALL {
        let dir = tempfile::tempdir().unwrap();
        run_experiment(&tiny_config(kind, dir.path())).unwrap();
        for (name, bytes) in csv_bytes(dir.path()) {
            let text = String::from_utf8(bytes).unwrap();
            lines.push(format!("{}/{}: {}", kind.name(), name, text.lines().next().unwrap()));
        }
    }
    lines.join("\n") + "\n"
}

#[test]
fn csv_headers_match_golden() {
    let got = observed();
    if std::env::var_os("SCALINGLAB_BLESS").is_some() {
        std::fs::write(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/schemas.txt"), &got).unwrap();
        return;
    }
    assert_eq!(got, SCHEMAS, "rerun with SCALINGLAB_BLESS=1 only if the schema change is intended");
}
