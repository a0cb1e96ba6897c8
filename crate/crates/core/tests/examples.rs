use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("examples")
        .join(name)
}

#[test]
fn examples_run() {
    for (name, needle) in [
        ("validate_state", "valid false"),
        ("decompositions", "residual"),
        ("negativity", "E_N = 1.442695"),
        ("channels", "valid true"),
        ("measurement", "0.786448"),
        ("fock_oracle", "1.44269504     1.44269504"),
        ("convertibility", "Some(0.505)"),
        ("continuity", "1e6"),
        ("passive", "is passive: true"),
        ("state_files", "round trip exact: true"),
    ] {
        let out = Command::new(example(name))
            .output()
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(
            out.status.success(),
            "{name} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(text.contains(needle), "{name} output lacks {needle:?}:\n{text}");
    }
    let out = Command::new(example("nogo")).arg("50").output().unwrap();
    assert!(String::from_utf8_lossy(&out.stdout).contains("50 trials"));
}
