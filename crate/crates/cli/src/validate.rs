//! The `validate` subcommand: run the self-check suite and report.

use cascade_cavity::validation::{run_all, ValidationConfig};

use crate::CliError;

pub fn run(cfg: ValidationConfig) -> Result<(), CliError> {
    let outcomes = run_all(&cfg).map_err(CliError::from_model)?;
    let mut hard_failures = 0usize;
    for o in &outcomes {
        if o.hard {
            let tag = if o.passed { "PASS" } else { "FAIL" };
            println!("{tag} {} — {}", o.name, o.detail);
            if !o.passed {
                hard_failures += 1;
            }
        } else {
            let tag = if o.passed { "IN-BAND" } else { "OUT-OF-BAND" };
            println!("BAND {} {tag} — {}", o.name, o.detail);
        }
    }
    let hard_total = outcomes.iter().filter(|o| o.hard).count();
    println!(
        "{} of {hard_total} hard checks passed; band checks are informational",
        hard_total - hard_failures
    );
    if hard_failures > 0 {
        Err(CliError::Validation)
    } else {
        Ok(())
    }
}
