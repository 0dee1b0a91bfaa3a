//! The `simulate` subcommand: propagate, derive observables, write CSVs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use cascade_cavity::report::{
    fmt_sig, observable_csv_row, AMPLITUDE_CSV_HEADER, OBSERVABLE_CSV_HEADER,
};
use cascade_cavity::{
    atoms_reduced, closed_form_amplitudes, initial_amplitudes, observable_records, ode_evolve,
    truncation_cutoff, ClosedFormVariant, ResonancePropagator, WaveFunction,
};

use crate::manifest::{ErrataMode, RunManifest, Solver};
use crate::CliError;

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("writing {}: {e}", path.display()))
}

pub fn run(manifest: &RunManifest) -> Result<(), CliError> {
    let cfg = &manifest.config;
    let n_max = truncation_cutoff(cfg.alpha, cfg.tail_epsilon);
    let wf0 = initial_amplitudes(cfg.alpha, n_max);

    let states: Vec<WaveFunction> = match manifest.solver {
        Solver::Eigen => ResonancePropagator::new(cfg.nonlinearity, n_max)
            .map_err(CliError::from_model)?
            .propagate_grid(&wf0, &cfg.t_grid),
        Solver::Ode => ode_evolve(
            &wf0,
            cfg.nonlinearity,
            cfg.delta1,
            cfg.delta2,
            &cfg.t_grid,
            cfg.ode_tolerance,
        )
        .map_err(CliError::from_model)?,
    };

    let records = observable_records(&states).map_err(CliError::from_model)?;
    let mut w = create(&manifest.out)?;
    writeln!(w, "{OBSERVABLE_CSV_HEADER}").map_err(|e| io_err(&manifest.out, e))?;
    for r in &records {
        writeln!(w, "{}", observable_csv_row(r)).map_err(|e| io_err(&manifest.out, e))?;
    }
    w.flush().map_err(|e| io_err(&manifest.out, e))?;
    eprintln!(
        "wrote {} rows to {} (cutoff N = {n_max}, solver = {:?})",
        records.len(),
        manifest.out.display(),
        manifest.solver
    );

    if let Some(path) = &manifest.dump_amplitudes {
        dump_amplitudes(path, &states)?;
    }
    if let Some(t_request) = manifest.dump_rho {
        dump_rho(&manifest.rho_out, &states, t_request)?;
    }
    if manifest.errata_mode == ErrataMode::Report {
        errata_report(&manifest.errata_out, manifest, &wf0, &states)?;
    }
    Ok(())
}

fn dump_amplitudes(path: &Path, states: &[WaveFunction]) -> Result<(), CliError> {
    let mut w = create(path)?;
    writeln!(w, "{AMPLITUDE_CSV_HEADER}").map_err(|e| io_err(path, e))?;
    for wf in states {
        for n in 0..wf.len() {
            let mut row = vec![fmt_sig(wf.t(), 12), n.to_string()];
            for i in 0..6 {
                let z = wf.amp(i, n);
                row.push(fmt_sig(z.re, 12));
                row.push(fmt_sig(z.im, 12));
            }
            writeln!(w, "{}", row.join(",")).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Two-atom density matrix at the grid time nearest the request, written as
/// re,im interleaved (9 rows x 18 columns).
fn dump_rho(path: &Path, states: &[WaveFunction], t_request: f64) -> Result<(), CliError> {
    let wf = states
        .iter()
        .min_by(|a, b| {
            (a.t() - t_request)
                .abs()
                .partial_cmp(&(b.t() - t_request).abs())
                .unwrap()
        })
        .expect("nonempty grid");
    let rho = atoms_reduced(wf);
    let mut w = create(path)?;
    for r in 0..9 {
        let mut row = Vec::with_capacity(18);
        for c in 0..9 {
            let z = rho.get(r, c);
            row.push(fmt_sig(z.re, 12));
            row.push(fmt_sig(z.im, 12));
        }
        writeln!(w, "{}", row.join(",")).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    eprintln!(
        "wrote two-atom density matrix at gt = {} to {}",
        fmt_sig(wf.t(), 12),
        path.display()
    );
    Ok(())
}

/// Per-time maxima over photon blocks of |analytic - solver| for each of the
/// six coefficients, for both analytic variants.
fn errata_report(
    path: &Path,
    manifest: &RunManifest,
    wf0: &WaveFunction,
    states: &[WaveFunction],
) -> Result<(), CliError> {
    let f = manifest.config.nonlinearity;
    let mut w = create(path)?;
    writeln!(
        w,
        "gt,printed_c1,printed_c2,printed_c3,printed_c4,printed_c5,printed_c6,\
         corrected_c1,corrected_c2,corrected_c3,corrected_c4,corrected_c5,corrected_c6"
    )
    .map_err(|e| io_err(path, e))?;
    for wf in states {
        let mut printed = [0.0f64; 6];
        let mut corrected = [0.0f64; 6];
        for n in 0..=wf0.n_max() {
            let scale = wf0.amp(0, n);
            let blk = wf.block(n);
            let p = closed_form_amplitudes(n as u32, f, wf.t(), ClosedFormVariant::Printed)
                .map_err(CliError::from_model)?;
            let c = closed_form_amplitudes(n as u32, f, wf.t(), ClosedFormVariant::Corrected)
                .map_err(CliError::from_model)?;
            for i in 0..6 {
                printed[i] = printed[i].max((p[i] * scale - blk[i]).norm());
                corrected[i] = corrected[i].max((c[i] * scale - blk[i]).norm());
            }
        }
        let mut row = vec![fmt_sig(wf.t(), 12)];
        row.extend(printed.iter().map(|&x| fmt_sig(x, 12)));
        row.extend(corrected.iter().map(|&x| fmt_sig(x, 12)));
        writeln!(w, "{}", row.join(",")).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    eprintln!("wrote errata comparison to {}", path.display());
    Ok(())
}
