//! CSV writers shared by the stochastic and master-equation paths, so that
//! outputs from both can be diffed directly.

use std::io::Write;

use crate::observables::{AutocorrelationEstimate, LinewidthEstimate, SpectrumEstimate};
use crate::Result;

/// `n,p` for a photon-number distribution.
pub fn write_distribution<W: Write>(writer: W, distribution: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["n", "p"])?;
    for (n, p) in distribution.iter().enumerate() {
        w.serialize((n, p))?;
    }
    w.flush()?;
    Ok(())
}

/// `tau_ps,re_g1,im_g1,abs_g1`.
pub fn write_g1<W: Write>(writer: W, g1: &AutocorrelationEstimate) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["tau_ps", "re_g1", "im_g1", "abs_g1"])?;
    for (k, z) in g1.values.iter().enumerate() {
        w.serialize((g1.lag(k), z.re, z.im, z.norm()))?;
    }
    w.flush()?;
    Ok(())
}

/// `omega_per_ps,density`.
pub fn write_spectrum<W: Write>(writer: W, spectrum: &SpectrumEstimate) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["omega_per_ps", "density"])?;
    for (omega, s) in spectrum.omega.iter().zip(&spectrum.density) {
        w.serialize((omega, s))?;
    }
    w.flush()?;
    Ok(())
}

/// `method,fwhm_per_ps,center_per_ps,residual,fwhm_error,ci_low,ci_high,fit_points`.
pub fn write_linewidths<W: Write>(writer: W, estimates: &[LinewidthEstimate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "method",
        "fwhm_per_ps",
        "center_per_ps",
        "residual",
        "fwhm_error",
        "ci_low",
        "ci_high",
        "fit_points",
    ])?;
    for e in estimates {
        let (lo, hi) = e.confidence_interval();
        w.serialize((
            e.method.label(),
            e.fwhm,
            e.center,
            e.residual,
            e.fwhm_error,
            lo,
            hi,
            e.fit_points,
        ))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::LinewidthMethod;
    use crate::Complex64;

    fn text(buf: Vec<u8>) -> String {
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn distribution_rows() {
        let mut buf = Vec::new();
        write_distribution(&mut buf, &[0.25, 0.75]).unwrap();
        assert_eq!(text(buf), "n,p\n0,0.25\n1,0.75\n");
    }

    #[test]
    fn g1_rows_carry_lag_in_ps() {
        let g1 = AutocorrelationEstimate::from_unnormalized(
            0.5,
            &[Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_g1(&mut buf, &g1).unwrap();
        assert_eq!(text(buf), "tau_ps,re_g1,im_g1,abs_g1\n0.0,1.0,0.0,1.0\n0.5,0.0,0.5,0.5\n");
    }

    #[test]
    fn linewidth_rows_parse_back() {
        let est = LinewidthEstimate {
            fwhm: 0.1,
            center: -0.02,
            method: LinewidthMethod::LorentzianFit,
            residual: 1e-3,
            fwhm_error: 0.01,
            fit_points: 40,
        };
        let mut buf = Vec::new();
        write_linewidths(&mut buf, &[est]).unwrap();
        let mut r = csv::Reader::from_reader(buf.as_slice());
        let row: (String, f64, f64, f64, f64, f64, f64, usize) =
            r.deserialize().next().unwrap().unwrap();
        assert_eq!(row.0, "lorentzian_fit");
        assert_eq!(row.1, 0.1);
        assert!((row.5 - (0.1 - 0.0196)).abs() < 1e-15);
        assert_eq!(row.7, 40);
    }
}
