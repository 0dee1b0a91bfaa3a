//! The `spectra` subcommand: per-block coupling and spectral quantities.

use std::io::Write;

use cascade_cavity::report::{fmt_sig, SPECTRA_CSV_HEADER};
use cascade_cavity::{spectral_coefficients, Nonlinearity};

use crate::manifest::apply_out_dir;
use crate::{CliError, DeformationKind, SpectraArgs};

pub fn run(args: &SpectraArgs) -> Result<(), CliError> {
    let eta = args.eta.unwrap_or(Nonlinearity::DEFAULT_LAMB_DICKE);
    let f = match args.f {
        DeformationKind::Constant => Nonlinearity::Constant,
        DeformationKind::Harmonious => Nonlinearity::Harmonious,
        DeformationKind::TrappedIon => Nonlinearity::TrappedIon { lamb_dicke: eta },
    };
    let path = apply_out_dir(args.out.clone());
    let file = std::fs::File::create(&path)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))?;
    let mut w = std::io::BufWriter::new(file);
    let io = |e: std::io::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    writeln!(w, "{SPECTRA_CSV_HEADER}").map_err(io)?;
    for n in 0..=args.n_max {
        let block = f.coupling_strengths(n).map_err(CliError::from_model)?;
        let s = spectral_coefficients(&block).map_err(CliError::from_model)?;
        let values = [
            block.v[0],
            block.v[1],
            block.v[2],
            block.v[3],
            s.x1,
            s.x2,
            s.x3,
            s.x4,
            s.x5,
            s.eta,
            s.beta1,
            s.beta2,
            s.x3_printed,
        ];
        let row: Vec<String> = std::iter::once(n.to_string())
            .chain(values.iter().map(|&x| fmt_sig(x, 12)))
            .collect();
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)?;
    eprintln!(
        "wrote spectra for n = 0..={} to {}",
        args.n_max,
        path.display()
    );
    Ok(())
}
