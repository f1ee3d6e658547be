//! Configuration-driven scenario runner for the g2lab suites.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};

pub use config::{ConfigError, Scenario, ScenarioConfig};
pub use report::{summarize, Report};
pub use scenarios::{run, Outcome};

/// Writes `<name>.json` and the extra files of a run into `dir`.
pub fn write_outcome(dir: &Path, name: &str, outcome: &Outcome) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, outcome.report.to_json_string())?;
    written.push(path);
    for (suffix, contents) in &outcome.files {
        let path = dir.join(format!("{name}{suffix}"));
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}
