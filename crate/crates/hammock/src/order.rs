//! Pearson correlation utilities and the greedy neighbor-ordering heuristic
//! for choosing the axis sequence.

use std::fmt;

use thiserror::Error;

use crate::dataset::{Column, DataError, Dataset};

#[derive(Debug, Error)]
pub enum OrderError {
    #[error("correlation of '{a}' and '{b}' needs at least 2 complete pairs (got {n})")]
    TooFewPairs { a: String, b: String, n: usize },
    #[error("correlation of '{a}' and '{b}' is undefined: '{constant}' has zero variance on the complete pairs")]
    ZeroVariance {
        a: String,
        b: String,
        constant: String,
    },
    #[error("start variable '{0}' is not in the variable list")]
    StartNotInVars(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// Greedy selection criterion for the next neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMode {
    /// Pick the unused variable with the largest |corr| to the current one.
    MaxCorr,
    /// Pick the unused variable with the smallest squared correlation.
    MinSqCorr,
}

impl std::str::FromStr for OrderMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" | "max_corr" => Ok(OrderMode::MaxCorr),
            "minsq" | "min_sq_corr" => Ok(OrderMode::MinSqCorr),
            other => Err(format!("unknown order mode '{other}' (max|minsq)")),
        }
    }
}

/// Pearson correlation over the rows where both columns are non-missing.
/// Categorical columns enter through their integer codes.
pub fn pairwise_corr(a: &Column, b: &Column) -> Result<f64, OrderError> {
    let pairs: Vec<(f64, f64)> = a
        .cells
        .iter()
        .zip(&b.cells)
        .filter_map(|(ca, cb)| Some((ca.as_f64()?, cb.as_f64()?)))
        .collect();
    if pairs.len() < 2 {
        return Err(OrderError::TooFewPairs {
            a: a.name.clone(),
            b: b.name.clone(),
            n: pairs.len(),
        });
    }
    let n = pairs.len() as f64;
    let mean_a = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_b = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in &pairs {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        let constant = if var_a == 0.0 { &a.name } else { &b.name };
        return Err(OrderError::ZeroVariance {
            a: a.name.clone(),
            b: b.name.clone(),
            constant: constant.clone(),
        });
    }
    Ok(cov / (var_a * var_b).sqrt())
}

/// Symmetric Pearson correlation matrix over pairwise-complete rows.
/// Entries are `None` where the correlation is undefined.
#[derive(Debug, Clone)]
pub struct CorrMatrix {
    pub names: Vec<String>,
    pub entries: Vec<Vec<Option<f64>>>,
}

impl CorrMatrix {
    pub fn compute(ds: &Dataset, vars: &[String]) -> Result<CorrMatrix, OrderError> {
        let cols: Vec<&Column> = vars
            .iter()
            .map(|name| ds.column(name).map_err(OrderError::from))
            .collect::<Result<_, _>>()?;
        let n = cols.len();
        let mut entries = vec![vec![None; n]; n];
        for i in 0..n {
            entries[i][i] = Some(1.0);
            for j in i + 1..n {
                let r = pairwise_corr(cols[i], cols[j]).ok();
                entries[i][j] = r;
                entries[j][i] = r;
            }
        }
        Ok(CorrMatrix {
            names: vars.to_vec(),
            entries,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries[i][j]
    }
}

impl fmt::Display for CorrMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, name) in self.names.iter().enumerate() {
            write!(f, "{name:>12}")?;
            for j in 0..self.names.len() {
                match self.entries[i][j] {
                    Some(r) => write!(f, " {r:6.3}")?,
                    None => write!(f, "      .")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Greedy axis ordering: start with `start`, then repeatedly append the
/// unused variable maximizing |corr| with the current last variable
/// (MaxCorr) or minimizing corr^2 (MinSqCorr). Ties break by position in
/// `vars`.
pub fn greedy_order(
    ds: &Dataset,
    vars: &[String],
    start: &str,
    mode: OrderMode,
) -> Result<Vec<String>, OrderError> {
    let start_idx = vars
        .iter()
        .position(|v| v == start)
        .ok_or_else(|| OrderError::StartNotInVars(start.to_string()))?;
    let matrix = CorrMatrix::compute(ds, vars)?;

    let mut used = vec![false; vars.len()];
    used[start_idx] = true;
    let mut order = vec![start_idx];
    while order.len() < vars.len() {
        let current = *order.last().expect("nonempty");
        let mut best: Option<(usize, f64)> = None;
        for cand in 0..vars.len() {
            if used[cand] {
                continue;
            }
            let r = matrix.get(current, cand).ok_or_else(|| {
                // surface the offending pair; recompute for the exact reason
                match pairwise_corr(
                    ds.column(&vars[current]).expect("validated"),
                    ds.column(&vars[cand]).expect("validated"),
                ) {
                    Err(e) => e,
                    Ok(_) => unreachable!("entry was undefined"),
                }
            })?;
            let score = match mode {
                OrderMode::MaxCorr => r.abs(),
                OrderMode::MinSqCorr => -(r * r),
            };
            // strict inequality keeps the earliest candidate on ties
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((cand, score));
            }
        }
        let (next, _) = best.expect("unused variable remains");
        used[next] = true;
        order.push(next);
    }
    Ok(order.into_iter().map(|i| vars[i].clone()).collect())
}
