//! Test-set properties: total steps, path count, average length, distinct
//! edges and the duplication ratio.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use std::collections::HashSet;

use crate::path::TestPath;

pub type Rational = Ratio<u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// `len`: sum of path lengths.
    pub total_steps: u64,
    /// `|P|`
    pub path_count: u64,
    /// `avlen = len / |P|`, zero for an empty set.
    pub avg_length: Rational,
    /// `unique`: distinct edges across all paths.
    pub unique_edges: u64,
    /// `ut = len / unique`, zero for an empty set.
    pub duplication_ratio: Rational,
}

impl MetricsReport {
    pub fn zero() -> Self {
        MetricsReport {
            total_steps: 0,
            path_count: 0,
            avg_length: Rational::from_integer(0),
            unique_edges: 0,
            duplication_ratio: Rational::from_integer(0),
        }
    }
}

fn ratio(num: u64, den: u64) -> Rational {
    if den == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(num, den)
    }
}

pub fn path_set_metrics(paths: &[TestPath]) -> MetricsReport {
    let mut seen = HashSet::new();
    let mut total = 0u64;
    for p in paths {
        total += p.len() as u64;
        for &e in p.edges() {
            seen.insert(e);
        }
    }
    let count = paths.len() as u64;
    let unique = seen.len() as u64;
    MetricsReport {
        total_steps: total,
        path_count: count,
        avg_length: ratio(total, count),
        unique_edges: unique,
        duplication_ratio: ratio(total, unique),
    }
}

/// Renders a non-negative rational with `decimals` digits, rounding half up.
pub fn format_ratio(r: &Rational, decimals: u32) -> String {
    let scale = 10u128.pow(decimals);
    let num = *r.numer() as u128 * scale;
    let den = *r.denom() as u128;
    let scaled = (2 * num + den) / (2 * den);
    if decimals == 0 {
        return scaled.to_string();
    }
    format!(
        "{}.{:0width$}",
        scaled / scale,
        scaled % scale,
        width = decimals as usize
    )
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
