//! CSV formats: weight vectors, error curves and sweep tables.
//!
//! All readers skip lines starting with `#`, which is where the writers put
//! their provenance header.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::is_harness::{RateTable, SweepResult};
use crate::numeric::{fmt_sig, parse_extended};
use crate::simplex::{normalize, RawWeights, WeightVector};

pub const WEIGHTS_HEADER: &str = "w";
pub const RAW_WEIGHTS_HEADER: &str = "w_raw";
pub const SWEEP_HEADER: &str = "param,ess_teo_rate,beta,ess_h_rate";
pub const SUMMARY_HEADER: &str = "beta_star,a1,a2,residual";

/// `# seed=..., version=..., config=...`
pub fn provenance_header(seed: Option<u64>, config: &str) -> String {
    let seed = seed.map_or_else(|| "none".to_string(), |s| s.to_string());
    format!("# seed={seed}, version={}, config={config}", env!("CARGO_PKG_VERSION"))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(input)
}

fn parse_cell(s: &str, what: &str, line: usize) -> Result<f64> {
    parse_extended(s).ok_or_else(|| Error::InvalidInput(format!("bad {what} '{s}' in record {line}")))
}

/// Contents of a weights file.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightsFile {
    Normalized(WeightVector),
    Raw(RawWeights),
}

impl WeightsFile {
    /// The normalized vector, normalizing raw weights if needed.
    pub fn into_normalized(self) -> Result<WeightVector> {
        match self {
            WeightsFile::Normalized(w) => Ok(w),
            WeightsFile::Raw(r) => normalize(&r),
        }
    }
}

/// Single-column CSV with header `w` (normalized) or `w_raw` (raw).
pub fn read_weights<R: Read>(input: R) -> Result<WeightsFile> {
    let mut rdr = reader(input);
    let header = rdr.headers()?.clone();
    if header.len() != 1 {
        return Err(Error::InvalidInput(format!("expected one column, found {}", header.len())));
    }
    let raw = match &header[0] {
        WEIGHTS_HEADER => false,
        RAW_WEIGHTS_HEADER => true,
        other => return Err(Error::InvalidInput(format!("unexpected weights header '{other}'"))),
    };
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        values.push(parse_cell(&rec[0], "weight", i + 1)?);
    }
    if values.is_empty() {
        return Err(Error::InvalidSize("weights file has no entries".into()));
    }
    Ok(if raw {
        WeightsFile::Raw(RawWeights::new(values)?)
    } else {
        WeightsFile::Normalized(WeightVector::new(values)?)
    })
}

pub fn write_weights<W: Write>(out: &mut W, values: &[f64], raw: bool) -> Result<()> {
    writeln!(out, "{}", if raw { RAW_WEIGHTS_HEADER } else { WEIGHTS_HEADER })?;
    for v in values {
        writeln!(out, "{}", fmt_sig(*v))?;
    }
    Ok(())
}

/// Two-column `k,V` CSV with `k = 0..N` each exactly once (any order).
pub fn read_error_curve<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut rdr = reader(input);
    let header = rdr.headers()?.clone();
    if header.len() != 2 || &header[0] != "k" || &header[1] != "V" {
        return Err(Error::InvalidInput("error curve header must be 'k,V'".into()));
    }
    let mut points = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let k: usize = rec[0]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad k '{}' in record {}", &rec[0], i + 1)))?;
        let v = parse_cell(&rec[1], "V", i + 1)?;
        if points.insert(k, v).is_some() {
            return Err(Error::InvalidInput(format!("duplicate k={k}")));
        }
    }
    for (expected, k) in points.keys().enumerate() {
        if *k != expected {
            return Err(Error::InvalidInput(format!("missing k={expected}")));
        }
    }
    Ok(points.into_values().collect())
}

/// Long-format sweep table, one row per `(param, beta)`.
pub fn write_sweep<W: Write>(out: &mut W, result: &SweepResult, header: &str) -> Result<()> {
    writeln!(out, "{header}")?;
    writeln!(out, "{SWEEP_HEADER}")?;
    let t = &result.rates;
    for (g, &param) in t.params.iter().enumerate() {
        let teo = fmt_sig(t.ess_teo_rate[g]);
        let p = fmt_sig(param);
        for (b, &beta) in t.betas.iter().enumerate() {
            writeln!(out, "{p},{teo},{},{}", fmt_sig(beta), fmt_sig(t.ess_h_rate[g][b]))?;
        }
    }
    Ok(())
}

/// Reads a long-format sweep table back into a [`RateTable`].
pub fn read_sweep<R: Read>(input: R) -> Result<RateTable> {
    let mut rdr = reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != SWEEP_HEADER {
        return Err(Error::InvalidInput(format!("sweep header must be '{SWEEP_HEADER}'")));
    }
    let mut params: Vec<f64> = Vec::new();
    let mut teo: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(f64, f64)>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 1;
        let param = parse_cell(&rec[0], "param", line)?;
        let t = parse_cell(&rec[1], "ess_teo_rate", line)?;
        let beta = parse_cell(&rec[2], "beta", line)?;
        let h = parse_cell(&rec[3], "ess_h_rate", line)?;
        if params.last() != Some(&param) {
            if params.contains(&param) {
                return Err(Error::InvalidInput(format!("rows for param {param} are not contiguous")));
            }
            params.push(param);
            teo.push(t);
            rows.push(Vec::new());
        } else if teo.last() != Some(&t) {
            return Err(Error::InvalidInput(format!("inconsistent ess_teo_rate for param {param}")));
        }
        rows.last_mut().expect("pushed above").push((beta, h));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput("sweep file has no rows".into()));
    }
    let betas: Vec<f64> = rows[0].iter().map(|(b, _)| *b).collect();
    let mut ess_h_rate = Vec::with_capacity(rows.len());
    for (g, row) in rows.into_iter().enumerate() {
        let these: Vec<f64> = row.iter().map(|(b, _)| *b).collect();
        if these != betas {
            return Err(Error::InvalidInput(format!("beta grid differs at param {}", params[g])));
        }
        ess_h_rate.push(row.into_iter().map(|(_, h)| h).collect());
    }
    Ok(RateTable { params, betas, ess_teo_rate: teo, ess_h_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_round_trip() {
        let mut buf = Vec::new();
        write_weights(&mut buf, &[0.5, 0.25, 0.25], false).unwrap();
        let w = read_weights(buf.as_slice()).unwrap().into_normalized().unwrap();
        assert_eq!(w.entries(), &[0.5, 0.25, 0.25]);
        let raw = read_weights("# c\nw_raw\n3\n1\n".as_bytes()).unwrap();
        assert!(matches!(raw, WeightsFile::Raw(_)));
        assert_eq!(raw.into_normalized().unwrap().entries(), &[0.75, 0.25]);
    }

    #[test]
    fn weights_errors() {
        assert!(matches!(read_weights("w\n".as_bytes()), Err(Error::InvalidSize(_))));
        assert!(read_weights("".as_bytes()).is_err());
        assert!(read_weights("x\n1\n".as_bytes()).is_err());
        assert!(read_weights("w\n0.5\n0.6\n".as_bytes()).is_err());
        assert!(read_weights("w\nabc\n".as_bytes()).is_err());
        assert!(matches!(read_weights("w_raw\n0\n0\n".as_bytes()), Err(Error::AllZeroWeights)));
    }

    #[test]
    fn curve_parsing() {
        let v = read_error_curve("k,V\n1,0.5\n0,1\n2,0\n".as_bytes()).unwrap();
        assert_eq!(v, vec![1.0, 0.5, 0.0]);
        assert!(read_error_curve("k,V\n0,1\n0,0.5\n".as_bytes()).is_err());
        assert!(read_error_curve("k,V\n0,1\n2,0\n".as_bytes()).is_err());
        assert!(read_error_curve("k,W\n0,1\n".as_bytes()).is_err());
    }

    #[test]
    fn sweep_parsing_checks_shape() {
        let ok = "# x\nparam,ess_teo_rate,beta,ess_h_rate\n0,1,2,1\n0,1,inf,1\n1,0.5,2,0.6\n1,0.5,inf,0.3\n";
        let t = read_sweep(ok.as_bytes()).unwrap();
        assert_eq!(t.params, vec![0.0, 1.0]);
        assert_eq!(t.betas, vec![2.0, f64::INFINITY]);
        assert_eq!(t.ess_h_rate[1], vec![0.6, 0.3]);
        let ragged = "param,ess_teo_rate,beta,ess_h_rate\n0,1,2,1\n1,0.5,3,0.6\n";
        assert!(read_sweep(ragged.as_bytes()).is_err());
        let split = "param,ess_teo_rate,beta,ess_h_rate\n0,1,2,1\n1,0.5,2,0.6\n0,1,3,1\n";
        assert!(read_sweep(split.as_bytes()).is_err());
    }

    #[test]
    fn header_format() {
        let h = provenance_header(Some(7), "a=1");
        assert!(h.starts_with("# seed=7, version="));
        assert!(h.ends_with(", config=a=1"));
    }
}
