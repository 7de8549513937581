use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/vi_ffi.h")).unwrap();
    for name in [
        "vi_query_new",
        "vi_query_push_exponent",
        "vi_query_free",
        "vi_invariant",
        "vi_count_maximal",
        "vi_oracle_compare",
        "vi_result_value",
        "vi_result_is_integral",
        "vi_result_terms",
        "vi_result_free",
        "vi_string_free",
        "vi_last_error_message",
        "VI_STATUS_INADMISSIBLE",
        "typedef struct ViQuery ViQuery",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn static_lib() -> Option<PathBuf> {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libvi_ffi.a");
    lib.exists().then_some(lib)
}

fn have(tool: &str) -> bool {
    Command::new(tool).arg("--version").output().is_ok()
}

#[test]
fn c_program_links_and_runs() {
    let Some(lib) = static_lib() else {
        eprintln!("skipping: libvi_ffi.a not built next to the test binary");
        return;
    };
    if !have("cc") {
        eprintln!("skipping: no C compiler");
        return;
    }
    let out_dir = std::env::temp_dir().join(format!("vi_ffi_smoke_{}", std::process::id()));
    std::fs::create_dir_all(&out_dir).unwrap();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(Path::new(&exe)).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "smoke failed: {stdout}");
    assert!(stdout.contains("value 6 terms 6"));
    assert!(stdout.contains("degree condition violated"));
    let _ = std::fs::remove_dir_all(&out_dir);
}
