//! Deterministic text output: the time-series CSV schema and the fixed
//! 12-significant-digit decimal number format shared by every dump.

use crate::observables::ObservableRecord;

/// Header of the observable time-series CSV.
pub const OBSERVABLE_CSV_HEADER: &str = "gt,S_atoms,S_atom1,negativity,mandel_Q,mean_n,S_x,S_y";

/// Header of the per-block spectral CSV.
pub const SPECTRA_CSV_HEADER: &str = "n,V1,V2,V3,V4,x1,x2,x3,x4,x5,eta,beta1,beta2,x3_printed";

/// Header of the amplitude dump CSV.
pub const AMPLITUDE_CSV_HEADER: &str =
    "t,n,re_c1,im_c1,re_c2,im_c2,re_c3,im_c3,re_c4,im_c4,re_c5,im_c5,re_c6,im_c6";

/// Format with exactly `sig` significant digits in plain decimal notation.
///
/// Magnitudes at or above 10^15 fall back to scientific notation; everything
/// this model emits stays far below that.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = sig as i32 - 1 - exponent;
    if !(0..=40).contains(&decimals) {
        return format!("{:.*e}", sig - 1, x);
    }
    format!("{:.*}", decimals as usize, x)
}

/// One CSV row (no trailing newline) in the fixed 12-digit format.
pub fn observable_csv_row(r: &ObservableRecord) -> String {
    [
        r.t,
        r.s_atoms,
        r.s_atom1,
        r.negativity,
        r.mandel_q,
        r.mean_n,
        r.s_x,
        r.s_y,
    ]
    .iter()
    .map(|&x| fmt_sig(x, 12))
    .collect::<Vec<_>>()
    .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_significant_digits() {
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(10.0, 12), "10.0000000000");
        assert_eq!(fmt_sig(0.025, 12), "0.0250000000000");
        assert_eq!(fmt_sig(-1.5, 12), "-1.50000000000");
        assert_eq!(fmt_sig(17.233687939614086, 12), "17.2336879396");
        assert_eq!(fmt_sig(3.0, 4), "3.000");
        // tiny magnitudes stay decimal, huge ones fall back to scientific
        assert_eq!(fmt_sig(-2.5e-13, 12), "-0.000000000000250000000000");
        assert_eq!(fmt_sig(1e30, 12), "1.00000000000e30");
    }

    #[test]
    fn row_shape() {
        let r = ObservableRecord {
            t: 0.0,
            s_atoms: 0.0,
            s_atom1: 0.0,
            negativity: 0.0,
            mandel_q: 0.0,
            mean_n: 10.0,
            s_x: 0.0,
            s_y: 0.0,
        };
        let row = observable_csv_row(&r);
        assert_eq!(
            row.split(',').count(),
            OBSERVABLE_CSV_HEADER.split(',').count()
        );
        assert_eq!(row, "0,0,0,0,0,10.0000000000,0,0");
    }
}
