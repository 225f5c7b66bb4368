//! Evaluation report output: a human-readable table and a CSV with one
//! record per `(ratio, repeat)` cell.

use std::fmt::Write as _;
use std::io::Write;

use refine_core::eval::EvalReport;

use crate::error::Result;

pub fn format_table(report: &EvalReport) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>6}  {:>7}  {:>17}  {:>17}",
        "ratio", "repeats", "Micro-F1 (%)", "Macro-F1 (%)"
    )
    .unwrap();
    for s in &report.summaries {
        writeln!(
            out,
            "{:>6.2}  {:>7}  {:>8.2} ± {:<6.2}  {:>8.2} ± {:<6.2}",
            s.ratio,
            s.repeats,
            100.0 * s.micro_mean,
            100.0 * s.micro_std,
            100.0 * s.macro_mean,
            100.0 * s.macro_std
        )
        .unwrap();
    }
    out
}

pub fn write_csv(w: impl Write, report: &EvalReport) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["ratio", "repeat", "micro_f1", "macro_f1"])
        .map_err(csv_io)?;
    for c in &report.cells {
        csv.write_record([
            c.ratio.to_string(),
            c.repeat.to_string(),
            c.micro_f1.to_string(),
            c.macro_f1.to_string(),
        ])
        .map_err(csv_io)?;
    }
    csv.flush()?;
    Ok(())
}

pub(crate) fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => e,
        other => std::io::Error::other(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use refine_core::eval::EvalCell;

    fn report() -> EvalReport {
        EvalReport::from_cells(vec![
            EvalCell {
                ratio: 0.5,
                repeat: 0,
                micro_f1: 0.25,
                macro_f1: 0.125,
            },
            EvalCell {
                ratio: 0.5,
                repeat: 1,
                micro_f1: 0.75,
                macro_f1: 0.125,
            },
        ])
    }

    #[test]
    fn csv_has_one_record_per_cell() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &report()).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "ratio,repeat,micro_f1,macro_f1\n0.5,0,0.25,0.125\n0.5,1,0.75,0.125\n"
        );
    }

    #[test]
    fn table_shows_mean_and_std() {
        let t = format_table(&report());
        let row = t.lines().nth(1).unwrap();
        assert!(row.contains("50.00 ± 25.00"), "{row}");
        assert!(row.contains("12.50 ± 0.00"), "{row}");
    }
}
