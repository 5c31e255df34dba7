use crate::engine::RunTrace;
use crate::{Error, Result};

/// Per-generation rate history of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTrajectories {
    pub max_rate: Vec<f64>,
    /// `rates[g][i]`: rate of operator slot `i` at generation `g`.
    pub rates: Vec<Vec<f64>>,
}

impl RateTrajectories {
    /// The trajectory of one operator slot.
    pub fn slot(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.rates.iter().map(move |r| r[i])
    }
}

pub fn rate_trajectories(trace: &RunTrace) -> Result<RateTrajectories> {
    let mut max_rate = Vec::with_capacity(trace.records.len());
    let mut rates = Vec::with_capacity(trace.records.len());
    for rec in &trace.records {
        match rec.max_rate {
            Some(m) if !rec.rates.is_empty() => {
                max_rate.push(m);
                rates.push(rec.rates.clone());
            }
            _ => return Err(Error::MissingRates),
        }
    }
    if rates.is_empty() {
        return Err(Error::MissingRates);
    }
    Ok(RateTrajectories { max_rate, rates })
}
