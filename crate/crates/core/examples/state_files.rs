//! Writes a state in the text format read by the command-line tool and
//! reads it back.

use gaussent::entanglement::ModePartition;
use gaussent::io::StateFile;
use gaussent::{CovarianceMatrix, GaussianState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = GaussianState::centered(CovarianceMatrix::two_mode_squeezed(&[0.5]))?;
    let file = StateFile::from_state(&state)
        .with_partition(Some(ModePartition::split(1, 1)))
        .with_note("source", "two-mode squeezed, r = 0.5");
    let text = file.to_text();
    print!("{text}");

    let dir = std::env::temp_dir().join(format!("gaussent-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("tms.state");
    file.write(&path)?;
    let back = StateFile::read(&path)?;
    println!(
        "round trip exact: {}",
        back.gamma == file.gamma && back.d == file.d
    );
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
