//! The committed header is complete and compiles as C.

use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn exported_functions() -> Vec<String> {
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    src.lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap().trim().to_string())
        .collect()
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/wedge_spectra.h")).unwrap();
    let fns = exported_functions();
    assert!(fns.len() >= 12, "{fns:?}");
    for f in fns {
        assert!(header.contains(&format!("{f}(")), "{f} missing from the header");
    }
    for ty in ["WsStatus", "WsBandSolver", "WsEnergyReport", "WsBandParams"] {
        assert!(header.contains(ty));
    }
}

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "wedge_spectra.h"

int main(void) {
    WsConstants c;
    if (ws_constants(&c) != WS_STATUS_OK) return 1;
    WsBandParams p = ws_band_params_default();
    p.length = 6.0;
    p.n = 8;
    WsBandSolver *s = NULL;
    if (ws_band_solver_new(0.0, 0.0, 1.0, 1.5, &p, &s) != WS_STATUS_OK) return 2;
    double v0, v1;
    if (ws_band_value(s, 0.0, &v0, NULL) != WS_STATUS_OK) return 3;
    if (ws_band_value(s, 1.0, &v1, NULL) != WS_STATUS_OK) return 3;
    ws_band_solver_free(s);
    if (fabs(v1 - v0 - 1.0) > 1e-9) return 4;
    char msg[128];
    if (ws_face_angles(0.0, 0.0, 0.0, 1.0, NULL) != WS_STATUS_NULL_POINTER) return 5;
    if (ws_last_error_message(msg, sizeof msg) == 0) return 6;
    printf("%.6f\n", c.theta0);
    return 0;
}
"#;

fn compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

fn static_lib() -> Option<PathBuf> {
    // integration tests live in target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let dir = exe.parent()?.parent()?;
    let lib = dir.join("libwedge_spectra_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn header_compiles_and_links() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler; skipped");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("probe.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let include = crate_dir().join("include");
    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let Some(lib) = static_lib() else {
        eprintln!("static library not built; link step skipped");
        return;
    };
    let exe = tmp.path().join("probe");
    let link = Command::new(&cc)
        .args(["-std=c99", "-I"])
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "probe exited with {:?}", run.status.code());
    let theta0: f64 = String::from_utf8_lossy(&run.stdout).trim().parse().unwrap();
    assert!((theta0 - 0.5901).abs() < 1e-3);
}
