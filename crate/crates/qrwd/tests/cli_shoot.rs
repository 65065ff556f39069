//! The bundled shooting config through the binary.

use std::process::Command;

#[test]
fn bundled_shoot_config_passes_and_echoes_w_star() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/shoot_config.json");
    let out = Command::new(env!("CARGO_BIN_EXE_qrwd"))
        .args(["shoot", "--config", fixture, "--out_dir"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("shoot.json")).unwrap()).unwrap();
    assert_eq!(r["result"]["converged"], true);
    assert_eq!(r["result"]["w_star"].as_array().unwrap().len(), 2);
    assert!(r["result"]["residual_recomputed"].as_f64().unwrap() < 2e-10);
}
