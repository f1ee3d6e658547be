//! Runs every shipped criterion config and prints one PASS/FAIL line each.

use std::path::Path;
use std::time::Instant;

use g2lab_cli::{run, ScenarioConfig};

const CRITERIA: [(&str, &str, f64); 8] = [
    ("1-verify-torsion.toml", "torsion forms of the transverse ansatz", 10.0),
    ("2-reduce-roundtrip.toml", "reduction round trip and metric splitting", 5.0),
    ("3-check-variation.toml", "first variation against central differences", 10.0),
    ("4-flow-w345.toml", "W345 flow decay rates and monotonicity", 30.0),
    ("5-flow-gh-homogeneous.toml", "GH flow, homogeneous mode", 10.0),
    ("6-flow-gh-grid.toml", "GH flow, 32x32 grid mode", 60.0),
    ("7-curvature-check.toml", "discrete curvature of a conformal metric", 10.0),
    ("8-functional-signs.toml", "signs of the reduced functionals", 5.0),
];

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut failures = Vec::new();
    for (i, (file, title, limit)) in CRITERIA.iter().enumerate() {
        let config = ScenarioConfig::from_path(&dir.join(file)).unwrap();
        let start = Instant::now();
        let outcome = run(&config);
        let elapsed = start.elapsed().as_secs_f64();
        let report = &outcome.report;
        let ok = report.passed() && elapsed < *limit;
        let worst = report
            .worst()
            .map(|c| format!("worst {} = {:.3e}", c.name, c.value))
            .unwrap_or_else(|| "no checks".to_string());
        println!(
            "{} criterion {}: {title} ({worst}; {elapsed:.2} s of {limit:.0} s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1
        );
        for c in report.checks.iter().filter(|c| !c.passed()) {
            println!("    failed check {}: {:e}", c.name, c.value);
        }
        for e in &report.errors {
            println!("    error: {e}");
        }
        if !ok {
            failures.push(i + 1);
        }
    }
    if !failures.is_empty() {
        eprintln!("failed criteria: {failures:?}");
        std::process::exit(1);
    }
}
