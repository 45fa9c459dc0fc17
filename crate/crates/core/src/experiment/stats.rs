use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-iteration summary across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: Vec<f64>,
    pub q1: Vec<f64>,
    pub median: Vec<f64>,
    pub q3: Vec<f64>,
    pub max: Vec<f64>,
    pub mean: Vec<f64>,
}

impl BoxStats {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStatistics {
    pub runs: usize,
    pub iterations: usize,
    pub pb_db: BoxStats,
    pub pe_db: BoxStats,
    pub cs: BoxStats,
}

/// Linear interpolation between order statistics (the inclusive method) on sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Aggregates `values[run][iteration]` into per-iteration statistics.
pub fn aggregate_boxplot(values: &[Vec<f64>]) -> Result<BoxStats> {
    let first = values
        .first()
        .ok_or_else(|| Error::Empty("no runs to aggregate".into()))?;
    let iterations = first.len();
    if let Some((run, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| v.len() != iterations)
    {
        return Err(Error::Ragged {
            run,
            expected: iterations,
            got: v.len(),
        });
    }
    let mut out = BoxStats {
        min: Vec::with_capacity(iterations),
        q1: Vec::with_capacity(iterations),
        median: Vec::with_capacity(iterations),
        q3: Vec::with_capacity(iterations),
        max: Vec::with_capacity(iterations),
        mean: Vec::with_capacity(iterations),
    };
    let mut column = Vec::with_capacity(values.len());
    for i in 0..iterations {
        column.clear();
        column.extend(values.iter().map(|v| v[i]));
        column.sort_by(f64::total_cmp);
        out.min.push(column[0]);
        out.q1.push(quantile_sorted(&column, 0.25));
        out.median.push(quantile_sorted(&column, 0.5));
        out.q3.push(quantile_sorted(&column, 0.75));
        out.max.push(column[column.len() - 1]);
        out.mean
            .push(column.iter().sum::<f64>() / column.len() as f64);
    }
    Ok(out)
}
