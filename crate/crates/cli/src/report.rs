//! Report rows.
//!
//! CSV output starts with [`CSV_HEADER`]; JSON output is one object per line
//! with the same field names. Absent values are empty in CSV and `null` in
//! JSON.
//!
//! | field          | meaning                                                 |
//! |----------------|---------------------------------------------------------|
//! | `kind`         | `direct`, `refine` or `mp_direct`                       |
//! | `prec`         | `dd`, `td`, `qd`, or `bf` for the BigFloat baseline      |
//! | `long_bits`    | long precision (refine and baseline rows)               |
//! | `n`            | dimension                                               |
//! | `seed`         | generator seed, if known                                |
//! | `time_seconds` | wall clock of factor + solve, or of the whole refinement |
//! | `max_rel_err`  | 17 significant digits                                   |
//! | `iterations`   | refinement corrections applied                          |
//! | `stop_reason`  | `converged`, `max_iter` or `stagnated`                  |
//! | `status`       | `ok` or `failed`                                        |
//! | `reason`       | error text of a failed row                              |

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::CliError;

pub const CSV_HEADER: &str =
    "kind,prec,long_bits,n,seed,time_seconds,max_rel_err,iterations,stop_reason,status,reason";

pub const STATUS_OK: &str = "ok";
pub const STATUS_FAILED: &str = "failed";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub kind: String,
    pub prec: String,
    pub long_bits: Option<u32>,
    pub n: usize,
    pub seed: Option<u64>,
    pub time_seconds: f64,
    pub max_rel_err: Option<String>,
    pub iterations: Option<usize>,
    pub stop_reason: Option<String>,
    pub status: String,
    pub reason: Option<String>,
}

impl Row {
    pub fn new(kind: &str, prec: &str, n: usize, seed: Option<u64>) -> Self {
        Row {
            kind: kind.into(),
            prec: prec.into(),
            long_bits: None,
            n,
            seed,
            time_seconds: 0.0,
            max_rel_err: None,
            iterations: None,
            stop_reason: None,
            status: STATUS_OK.into(),
            reason: None,
        }
    }

    pub fn fail(mut self, reason: impl ToString) -> Self {
        self.status = STATUS_FAILED.into();
        self.reason = Some(reason.to_string());
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

pub fn write_rows<W: Write>(w: W, rows: &[Row], format: Format) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
            out.write_record(CSV_HEADER.split(','))?;
            for r in rows {
                out.serialize(r)?;
            }
            out.flush()?;
        }
        Format::Json => {
            let mut w = w;
            for r in rows {
                serde_json::to_writer(&mut w, r)?;
                writeln!(w)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn read_rows(text: &str, format: Format) -> Result<Vec<Row>, CliError> {
    match format {
        Format::Csv => {
            let mut r = csv::Reader::from_reader(text.as_bytes());
            let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
            if header.join(",") != CSV_HEADER {
                return Err(CliError::Report(format!("unexpected header '{}'", header.join(","))));
            }
            r.deserialize().map(|row| row.map_err(CliError::from)).collect()
        }
        Format::Json => text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).map_err(CliError::from))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Row> {
        let mut a = Row::new("refine", "td", 200, Some(1));
        a.long_bits = Some(424);
        a.time_seconds = 0.25;
        a.max_rel_err = Some("2.5266269128187037e-87".into());
        a.iterations = Some(3);
        a.stop_reason = Some("converged".into());
        let b = Row::new("direct", "dd", 200, None).fail("matrix is singular (zero pivot at step 1)");
        vec![a, b]
    }

    #[test]
    fn encodings_carry_identical_values() {
        let rows = sample();
        let mut csv_out = Vec::new();
        write_rows(&mut csv_out, &rows, Format::Csv).unwrap();
        let mut json_out = Vec::new();
        write_rows(&mut json_out, &rows, Format::Json).unwrap();
        let csv_text = String::from_utf8(csv_out).unwrap();
        assert_eq!(csv_text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(read_rows(&csv_text, Format::Csv).unwrap(), rows);
        assert_eq!(read_rows(std::str::from_utf8(&json_out).unwrap(), Format::Json).unwrap(), rows);
    }

    #[test]
    fn header_written_for_empty_table() {
        let mut out = Vec::new();
        write_rows(&mut out, &[], Format::Csv).unwrap();
        assert_eq!(String::from_utf8(out).unwrap().trim_end(), CSV_HEADER);
    }
}
