use ::csv::Writer;

use super::{BenchRun, MeanMetrics, MeanRatios, Summary};
use crate::error::Result;
use crate::metrics::format_ratio;

pub const CSV_HEADER: [&str; 17] = [
    "instance",
    "origin",
    "strategy",
    "level",
    "min_len",
    "max_len",
    "status",
    "len",
    "paths",
    "avlen",
    "unique",
    "ut",
    "A_S",
    "A_P",
    "E_S",
    "E_P",
    "runtime_ms",
];

const SUMMARY_HEADER: [&str; 15] = [
    "origin", "level", "min_len", "max_len", "instances", "row", "len", "paths", "avlen", "unique", "ut", "A_S",
    "A_P", "E_S", "E_P",
];

fn finish(w: Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Header plus one row per run. `avlen` and `ut` at one decimal, `E_S` and
/// `E_P` at three.
pub fn export_csv(runs: &[BenchRun]) -> Result<String> {
    let mut w = Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in runs {
        w.write_record([
            r.instance.clone(),
            r.origin.to_string(),
            r.strategy.clone(),
            r.level.number().to_string(),
            r.min_length.to_string(),
            r.max_length.to_string(),
            r.status.to_string(),
            r.metrics.total_steps.to_string(),
            r.metrics.path_count.to_string(),
            format_ratio(&r.metrics.avg_length, 1),
            r.metrics.unique_edges.to_string(),
            format_ratio(&r.metrics.duplication_ratio, 1),
            r.activation.singles_activated.to_string(),
            r.activation.pairs_activated.to_string(),
            format_ratio(&r.activation.efficiency_single, 3),
            format_ratio(&r.activation.efficiency_pair, 3),
            r.runtime_ms.to_string(),
        ])?;
    }
    finish(w)
}

pub(crate) fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:.1}"),
        None => "-".into(),
    }
}

fn mean_cells(m: &MeanMetrics) -> Vec<String> {
    let one = |v: f64| format!("{v:.1}");
    let three = |v: f64| format!("{v:.3}");
    vec![
        one(m.len),
        one(m.paths),
        one(m.avlen),
        one(m.unique),
        one(m.ut),
        one(m.a_s),
        one(m.a_p),
        three(m.e_s),
        three(m.e_p),
    ]
}

fn ratio_cells(d: &MeanRatios) -> Vec<String> {
    [d.len, d.paths, d.avlen, d.unique, d.ut, d.a_s, d.a_p, d.e_s, d.e_p]
        .into_iter()
        .map(fmt_opt)
        .collect()
}

/// Three rows per summary: FSMT means, NSR means, and their ratio.
pub fn export_summary_csv(summaries: &[Summary]) -> Result<String> {
    let mut w = Writer::from_writer(Vec::new());
    w.write_record(SUMMARY_HEADER)?;
    for s in summaries {
        let key = [
            s.origin.map_or("all".to_string(), |o| o.to_string()),
            s.level.number().to_string(),
            s.min_length.to_string(),
            s.max_length.to_string(),
            s.instances.to_string(),
        ];
        for (row, cells) in [
            ("fsmt", mean_cells(&s.fsmt)),
            ("nsr", mean_cells(&s.nsr)),
            ("diff", ratio_cells(&s.diff)),
        ] {
            let mut rec: Vec<String> = key.to_vec();
            rec.push(row.into());
            rec.extend(cells);
            w.write_record(&rec)?;
        }
    }
    finish(w)
}
