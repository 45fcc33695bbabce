//! Acceptance run: every criterion at the full grid, one PASS/FAIL line each.
//!
//! Lines go straight to stdout so they show even when test output is captured.

use std::io::Write;

use geneuler::verify::{run_suites, suites, Level, SuiteReport, VerifyConfig};

const CRITERIA: [(u32, &str, &[&str]); 11] = [
    (1, "normalization over the 60-point grid", &["normalization"]),
    (2, "p.g.f. closed form vs brute force", &["pgf"]),
    (3, "mean and variance closed forms", &["moments"]),
    (4, "m = 0 reduction to the Euler law", &["euler-reduction"]),
    (5, "classical q -> 1 limit", &["classical-limit"]),
    (6, "Wall, Heine, 2phi1 and finite-block identities", &["wall-identities"]),
    (7, "cubic root and the q0 sign flip", &["cubic-root"]),
    (8, "discriminant sign dichotomy", &["discriminant"]),
    (9, "closed-form classifier vs Mandel oracle", &["classifier"]),
    (10, "seeded sampling", &["sampling"]),
    (11, "Wall to Laguerre limit and q-identities", &["q-identities"]),
];

fn detail(r: &SuiteReport) -> String {
    r.properties
        .iter()
        .map(|p| format!("{}[{} pts] {:.2e}/{:.0e}", p.name, p.points, p.max_residual, p.tolerance))
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn acceptance() {
    let registry = suites();
    let cfg = VerifyConfig::new(Level::Full);
    let names: Vec<&'static str> = CRITERIA.iter().flat_map(|c| c.2.iter().copied()).collect();
    let reports = run_suites(&registry, &names, &cfg).unwrap();

    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for (id, what, suites) in CRITERIA {
        let mine: Vec<&SuiteReport> = reports.iter().filter(|r| suites.contains(&r.name)).collect();
        let ok = !mine.is_empty() && mine.iter().all(|r| r.passed());
        let status = if ok { "PASS" } else { "FAIL" };
        let details = mine.iter().map(|r| detail(r)).collect::<Vec<_>>().join("; ");
        writeln!(out, "criterion {id:>2} {status}: {what} ({details})").unwrap();
        if !ok {
            for r in &mine {
                if let Some(p) = r.first_failure() {
                    writeln!(out, "    first failure {}/{} at {}", r.name, p.name, p.worst).unwrap();
                }
            }
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
