//! CSV tables derived from an [`EvaluationReport`].

use std::fs;
use std::path::{Path, PathBuf};

use super::report::{EvaluationReport, Measure};
use super::{io_err, HarnessError};
use crate::topology::{Bin, BinnedSeries, TopologySummary};

fn writer(path: &Path) -> Result<csv::Writer<fs::File>, HarnessError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

const HEADER: [&str; 6] = ["bin_low", "bin_high", "mean", "count", "property", "source"];

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn write_series(path: &Path, series: &BinnedSeries, source: &str) -> Result<(), HarnessError> {
    let mut w = writer(path)?;
    w.write_record(HEADER)?;
    for Bin {
        low,
        high,
        mean,
        count,
    } in &series.bins
    {
        w.write_record([
            fmt(*low),
            fmt(*high),
            mean.map(fmt).unwrap_or_default(),
            count.to_string(),
            series.property.clone(),
            source.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes one `<property>__<source>.csv` file per curve of `summary` into
/// `dir` (created if missing) and returns the paths written.
pub fn write_curves(
    summary: &TopologySummary,
    source: &str,
    dir: &Path,
) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    let mut all: Vec<&BinnedSeries> = summary.size_distribution.iter().collect();
    all.extend(&summary.curves);
    for series in all {
        let path = dir.join(format!("{}__{source}.csv", series.property));
        write_series(&path, series, source)?;
        written.push(path);
    }
    let hist = &summary.embeddedness;
    let path = dir.join(format!("embeddedness__{source}.csv"));
    let mut w = writer(&path)?;
    w.write_record(HEADER)?;
    let bins = hist.counts.len();
    for (k, count) in hist.counts.iter().enumerate() {
        let share = *count as f64 / hist.total.max(1) as f64;
        w.write_record([
            fmt(k as f64 / bins as f64),
            fmt((k + 1) as f64 / bins as f64),
            fmt(share),
            count.to_string(),
            "embeddedness".to_string(),
            source.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}

/// Writes `scores.csv`, `ranking.csv` and one file per curve and source
/// under `curves/<regime>/`. Nothing is written for an empty report.
pub fn emit_tables(report: &EvaluationReport, dir: &Path) -> Result<(), HarnessError> {
    if report.result_count() == 0 {
        return Err(HarnessError::EmptyReport);
    }
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let path = dir.join("scores.csv");
    let mut w = writer(&path)?;
    w.write_record(["regime", "sample", "source", "fcc", "ri", "ari", "nmi"])?;
    for regime in &report.regimes {
        for sample in &regime.samples {
            for r in &sample.results {
                let s = r.scores;
                w.write_record([
                    regime.name.clone(),
                    sample.index.to_string(),
                    r.source.clone(),
                    fmt(s.fcc),
                    fmt(s.ri),
                    fmt(s.ari),
                    fmt(s.nmi),
                ])?;
            }
        }
    }
    w.flush().map_err(io_err(&path))?;

    let path = dir.join("ranking.csv");
    let mut w = writer(&path)?;
    let mut header = vec!["regime".to_string(), "source".to_string()];
    for m in Measure::ALL {
        header.push(m.name().to_string());
        header.push(format!("{}_rank", m.name()));
    }
    header.push("ties".into());
    w.write_record(&header)?;
    for regime in &report.regimes {
        for (row, mean) in regime.mean_scores.iter().enumerate() {
            let mut record = vec![regime.name.clone(), mean.source.clone()];
            let mut tied = Vec::new();
            for ranking in &regime.ranking {
                let entry = &ranking.entries[row];
                record.push(fmt(entry.value));
                record.push(entry.rank.to_string());
                if entry.tied {
                    tied.push(ranking.measure.name());
                }
            }
            record.push(tied.join(";"));
            w.write_record(&record)?;
        }
    }
    w.flush().map_err(io_err(&path))?;

    for regime in &report.regimes {
        let curve_dir = dir.join("curves").join(&regime.name);
        for c in &regime.curves {
            write_curves(&c.summary, &c.source, &curve_dir)?;
        }
    }
    Ok(())
}
