//! Block-size / power sweep with a per-stage cost breakdown.

use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use refine_core::filter::apply_filter_probed;
use refine_core::{
    rbqr_factorize_with, FilterSpec, GaussianSketch, RbqrParams, SparseMatrix, Stage,
};

use crate::error::Result;
use crate::pipeline::TimingProbe;
use crate::report::csv_io;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub block: usize,
    pub power: usize,
    pub total: Duration,
    /// Exclusive time per stage, indexed like [`Stage::ALL`].
    pub stages: [Duration; Stage::ALL.len()],
}

impl BenchRow {
    pub fn share(&self, stage: Stage) -> f64 {
        let total = self.total.as_secs_f64();
        if total > 0.0 {
            self.stages[stage as usize].as_secs_f64() / total
        } else {
            0.0
        }
    }
}

/// Least-squares line `y = intercept + slope * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len() as f64;
    if xs.len() < 2 || xs.len() != ys.len() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r2,
    })
}

/// Runs every `(block, power)` combination on `m`, filtering with `t` when a
/// filter is given.
pub fn sweep(
    m: &SparseMatrix,
    t: &SparseMatrix,
    base: &RbqrParams,
    filter: Option<&FilterSpec>,
    blocks: &[usize],
    powers: &[usize],
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &block in blocks {
        for &power in powers {
            let params = RbqrParams {
                block: block.min(base.dim),
                power,
                ..*base
            };
            let mut probe = TimingProbe::default();
            let mut sketch = GaussianSketch::new(params.seed);
            let start = Instant::now();
            let f = rbqr_factorize_with(m, &params, &mut sketch, &mut probe)?;
            if let Some(spec) = filter {
                apply_filter_probed(t, &f.embedding, spec, &mut probe)?;
            }
            let total = start.elapsed();
            let stages = Stage::ALL.map(|s| probe.get(s));
            log::info!("b={block} q={power}: {:.3} ms", total.as_secs_f64() * 1e3);
            rows.push(BenchRow {
                block,
                power,
                total,
                stages,
            });
        }
    }
    Ok(rows)
}

/// Per block size, regression of sparse-product time on `q + 1`.
pub fn sparse_vs_power(rows: &[BenchRow]) -> Vec<(usize, Option<LineFit>)> {
    let mut blocks: Vec<usize> = rows.iter().map(|r| r.block).collect();
    blocks.dedup();
    blocks
        .into_iter()
        .map(|b| {
            let (xs, ys): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.block == b)
                .map(|r| {
                    (
                        (r.power + 1) as f64,
                        r.stages[Stage::SparseProduct as usize].as_secs_f64() * 1e3,
                    )
                })
                .unzip();
            (b, fit_line(&xs, &ys))
        })
        .collect()
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = String::new();
    write!(out, "{:>5} {:>3} {:>11}", "b", "q", "total ms").unwrap();
    for s in Stage::ALL {
        write!(out, " {:>8}", format!("{}%", s.name())).unwrap();
    }
    out.push('\n');
    for r in rows {
        write!(
            out,
            "{:>5} {:>3} {:>11.3}",
            r.block,
            r.power,
            r.total.as_secs_f64() * 1e3
        )
        .unwrap();
        for s in Stage::ALL {
            write!(out, " {:>8.1}", 100.0 * r.share(s)).unwrap();
        }
        out.push('\n');
    }
    for (b, fit) in sparse_vs_power(rows) {
        match fit {
            Some(f) => writeln!(
                out,
                "b={b}: sparse ms ~ {:.3} + {:.3} * (q+1), r^2 = {:.3}",
                f.intercept, f.slope, f.r2
            )
            .unwrap(),
            None => writeln!(out, "b={b}: need two or more powers for a fit").unwrap(),
        }
    }
    out
}

pub fn write_csv(w: impl Write, rows: &[BenchRow]) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let mut header = vec!["block".to_string(), "power".into(), "total_s".into()];
    header.extend(Stage::ALL.iter().map(|s| format!("{}_s", s.name())));
    csv.write_record(&header).map_err(csv_io)?;
    for r in rows {
        let mut rec = vec![
            r.block.to_string(),
            r.power.to_string(),
            r.total.as_secs_f64().to_string(),
        ];
        rec.extend(r.stages.iter().map(|d| d.as_secs_f64().to_string()));
        csv.write_record(&rec).map_err(csv_io)?;
    }
    csv.flush()?;
    Ok(())
}
