//! Table emitters and re-ingestion.
//!
//! Every floating-point value is written with 17 significant digits
//! (`{:.16e}`), which round-trips any `f64` exactly, and no file carries
//! timestamps or other run-dependent data: equal inputs produce
//! byte-identical tables.

use std::io::{BufRead, Write};

use crate::cap::CapSpectrum;
use crate::error::{Error, Result};
use crate::spectrum::{
    cluster_start_index, gap_asymptotic, Cluster, EigenvalueRecord, Spectrum,
};
use crate::stats::SpacingHistogram;

/// Exact header of a spectrum table.
pub const SPECTRUM_HEADER: &str = "n,ell,m,sigma,nu,lambda,delta,rn_gap";
/// Exact header of a per-cluster gap table.
pub const GAP_HEADER: &str = "ell,m,gap_exact,gap_asymptotic";
/// Exact header of a spacing-histogram table.
pub const HISTOGRAM_HEADER: &str = "bin_left,bin_right,count,density";
/// Exact header of a cap-spectrum table.
pub const CAP_HEADER: &str = "m,nu,lambda,residual";

/// The lossless float form every table uses: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt(x: f64) -> String {
    fmt_f64(x)
}

/// Write a spectrum as CSV (see [`SPECTRUM_HEADER`]).
pub fn write_spectrum_csv<W: Write>(mut w: W, spectrum: &Spectrum) -> Result<()> {
    writeln!(w, "{SPECTRUM_HEADER}")?;
    for r in &spectrum.eigenvalues {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.ell,
            r.m,
            fmt(r.sigma),
            fmt(r.nu),
            fmt(r.lambda),
            fmt(r.delta),
            fmt(r.rn_gap)
        )?;
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, line_no: usize, what: &str) -> Result<T> {
    field.trim().parse().map_err(|_| {
        Error::Parse(format!("line {line_no}: cannot parse {what} from {field:?}"))
    })
}

/// Re-ingest a spectrum table written by [`write_spectrum_csv`].
///
/// Validates the header, the index sequence, a single shared `sigma`, and
/// that the rows form complete clusters `0..=ell_max`.
pub fn read_spectrum_csv<R: BufRead>(r: R) -> Result<Spectrum> {
    let mut lines = r.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse("empty spectrum table".into())),
    };
    if header.trim() != SPECTRUM_HEADER {
        return Err(Error::Parse(format!(
            "unexpected header {header:?}, want {SPECTRUM_HEADER:?}"
        )));
    }
    let mut eigenvalues: Vec<EigenvalueRecord> = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse(format!(
                "line {line_no}: expected 8 fields, got {}",
                fields.len()
            )));
        }
        eigenvalues.push(EigenvalueRecord {
            n: parse_field(fields[0], line_no, "n")?,
            ell: parse_field(fields[1], line_no, "ell")?,
            m: parse_field(fields[2], line_no, "m")?,
            sigma: parse_field(fields[3], line_no, "sigma")?,
            nu: parse_field(fields[4], line_no, "nu")?,
            lambda: parse_field(fields[5], line_no, "lambda")?,
            delta: parse_field(fields[6], line_no, "delta")?,
            rn_gap: parse_field(fields[7], line_no, "rn_gap")?,
        });
    }
    if eigenvalues.is_empty() {
        return Err(Error::Parse("spectrum table has no data rows".into()));
    }
    let sigma = eigenvalues[0].sigma;
    let ell_max = eigenvalues.iter().map(|r| r.ell).max().unwrap();
    for (i, r) in eigenvalues.iter().enumerate() {
        if r.n != i as u64 {
            return Err(Error::Parse(format!(
                "row {} carries index {}, expected {}",
                i, r.n, i
            )));
        }
        if r.sigma != sigma {
            return Err(Error::Parse(format!(
                "row {} has sigma {}, expected {}",
                i, r.sigma, sigma
            )));
        }
    }
    let expected = cluster_start_index(ell_max + 1);
    if eigenvalues.len() as u64 != expected {
        return Err(Error::Parse(format!(
            "{} rows do not form complete clusters 0..={ell_max} ({expected} expected)",
            eigenvalues.len()
        )));
    }
    Ok(Spectrum {
        sigma,
        ell_max,
        eigenvalues,
    })
}

/// Write one cluster's Robin–Neumann gaps next to their leading-order
/// predictions (see [`GAP_HEADER`]).
pub fn write_gap_table<W: Write>(mut w: W, cluster: &Cluster) -> Result<()> {
    writeln!(w, "{GAP_HEADER}")?;
    for r in &cluster.entries {
        let asym = gap_asymptotic(r.ell, r.m, r.sigma)?;
        writeln!(w, "{},{},{},{}", r.ell, r.m, fmt(r.rn_gap), fmt(asym))?;
    }
    Ok(())
}

/// Write a spacing histogram (see [`HISTOGRAM_HEADER`]). The final row is
/// the overflow bin: its right edge prints as `inf` and its density as `0`.
pub fn write_histogram_csv<W: Write>(mut w: W, hist: &SpacingHistogram) -> Result<()> {
    writeln!(w, "{HISTOGRAM_HEADER}")?;
    let n = hist.n_samples.max(1) as f64;
    for (i, &count) in hist.counts.iter().enumerate() {
        let left = hist.bin_edges[i];
        let (right, density) = if i + 1 < hist.bin_edges.len() {
            let right = hist.bin_edges[i + 1];
            (right, count as f64 / (n * (right - left)))
        } else {
            (f64::INFINITY, 0.0)
        };
        writeln!(w, "{},{},{},{}", fmt(left), fmt(right), count, fmt(density))?;
    }
    Ok(())
}

/// Write a cap spectrum (see [`CAP_HEADER`]).
pub fn write_cap_csv<W: Write>(mut w: W, spec: &CapSpectrum) -> Result<()> {
    writeln!(w, "{CAP_HEADER}")?;
    for e in &spec.eigenvalues {
        writeln!(
            w,
            "{},{},{},{}",
            e.m,
            fmt(e.nu),
            fmt(e.lambda),
            fmt(e.residual)
        )?;
    }
    Ok(())
}

/// Write `(ν, S_m(ν))` samples of the secular function on a uniform grid,
/// skipping poles (where `ν + m` is an odd integer) and any grid point
/// whose window parity puts it on a pole within one step.
pub fn write_secular_plot<W: Write>(
    mut w: W,
    m: u32,
    nu_min: f64,
    nu_max: f64,
    step: f64,
) -> Result<()> {
    if !(step > 0.0) || !(nu_max > nu_min) || nu_min < 0.0 {
        return Err(Error::domain(format!(
            "plot grid needs 0 <= nu_min < nu_max and step > 0, got [{nu_min}, {nu_max}] / {step}"
        )));
    }
    writeln!(w, "nu,s_m")?;
    let n = ((nu_max - nu_min) / step).floor() as usize + 1;
    for k in 0..n {
        let nu = nu_min + k as f64 * step;
        match crate::secular::secular_s(nu, m)? {
            crate::secular::SecularPoint::Finite(s) if s.is_finite() => {
                writeln!(w, "{},{}", fmt(nu), fmt(s))?;
            }
            _ => {} // pole (or pole-adjacent overflow): leave the gap visible
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{build_spectrum, robin_cluster};
    use crate::stats::{spacing_distribution, BinSpec};

    #[test]
    fn spectrum_round_trip_is_exact() {
        let s = build_spectrum(1.0, 12).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&mut buf, &s).unwrap();
        let back = read_spectrum_csv(buf.as_slice()).unwrap();
        assert_eq!(back.sigma, 1.0);
        assert_eq!(back.ell_max, 12);
        assert_eq!(back.eigenvalues.len(), s.eigenvalues.len());
        for (a, b) in s.eigenvalues.iter().zip(&back.eigenvalues) {
            assert_eq!(a, b, "records must round-trip bit-exactly");
        }
        // Determinism: a second emission is byte-identical.
        let mut buf2 = Vec::new();
        write_spectrum_csv(&mut buf2, &s).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn read_rejects_malformed_tables() {
        assert!(read_spectrum_csv(&b""[..]).is_err());
        assert!(read_spectrum_csv(&b"wrong,header\n"[..]).is_err());
        let good_header = format!("{SPECTRUM_HEADER}\n");
        assert!(read_spectrum_csv(good_header.as_bytes()).is_err()); // no rows
        let bad_row = format!("{SPECTRUM_HEADER}\n0,0,0,1.0,0.5\n");
        assert!(read_spectrum_csv(bad_row.as_bytes()).is_err()); // 5 fields
        let bad_index = format!(
            "{SPECTRUM_HEADER}\n7,0,0,1e0,5e-1,7.5e-1,5e-1,7.5e-1\n"
        );
        assert!(read_spectrum_csv(bad_index.as_bytes()).is_err()); // n != 0
        // One full cluster 0 row parses.
        let ok = format!(
            "{SPECTRUM_HEADER}\n0,0,0,1e0,5e-1,7.5e-1,5e-1,7.5e-1\n"
        );
        let s = read_spectrum_csv(ok.as_bytes()).unwrap();
        assert_eq!(s.ell_max, 0);
        assert_eq!(s.eigenvalues[0].lambda, 0.75);
        // Incomplete cluster is rejected.
        let partial = format!(
            "{SPECTRUM_HEADER}\n0,0,0,1e0,5e-1,7.5e-1,5e-1,7.5e-1\n\
             1,1,1,1e0,1.5e0,3.75e0,5e-1,1.75e0\n\
             2,2,0,1e0,2.5e0,8.75e0,5e-1,2.75e0\n"
        );
        assert!(read_spectrum_csv(partial.as_bytes()).is_err());
    }

    #[test]
    fn gap_table_shape() {
        let c = robin_cluster(10, 1.0).unwrap();
        let mut buf = Vec::new();
        write_gap_table(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], GAP_HEADER);
        assert_eq!(lines.len(), 1 + 6); // cluster 10 has 6 entries
        assert!(lines[1].starts_with("10,0,"));
        assert!(lines[6].starts_with("10,10,"));
    }

    #[test]
    fn histogram_table_shape() {
        let s = build_spectrum(1.0, 20).unwrap();
        let h = spacing_distribution(&s, &BinSpec::new(10, 5.0).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_histogram_csv(&mut buf, &h).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], HISTOGRAM_HEADER);
        assert_eq!(lines.len(), 1 + 11); // 10 finite bins + overflow
        assert!(lines[11].contains(",inf,"), "overflow row: {}", lines[11]);
    }

    #[test]
    fn secular_plot_skips_poles() {
        let mut buf = Vec::new();
        // m = 0: poles at odd nu; grid lands on 1.0 and 3.0 exactly.
        write_secular_plot(&mut buf, 0, 0.0, 4.0, 0.25).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text
            .lines()
            .any(|l| l.starts_with("1.0000000000000000e0,")));
        assert!(text.lines().any(|l| l.starts_with("5.0000000000000000e-1,")));
        // 17 grid nodes, 2 poles, 1 header.
        assert_eq!(text.lines().count(), 1 + 17 - 2);
    }
}
