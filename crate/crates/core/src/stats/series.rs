use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OverlapPolicy {
    Disjoint,
    /// Windows share time; only meaningful for correlator resolution.
    Overlapping,
}

/// Per-window values of one observable, all windows of the same length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedSeries {
    pub values: Vec<f64>,
    /// Window length in slots or time units.
    pub window_length: f64,
    pub overlap: OverlapPolicy,
}

impl WindowedSeries {
    pub fn new(values: Vec<f64>, window_length: f64, overlap: OverlapPolicy) -> Result<Self> {
        if !(window_length > 0.0) || !window_length.is_finite() {
            return Err(invalid(format!(
                "window length must be positive, got {window_length}"
            )));
        }
        if let Some(i) = values.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("window {i} holds a non-finite value")));
        }
        Ok(Self {
            values,
            window_length,
            overlap,
        })
    }

    pub fn disjoint(values: Vec<f64>, window_length: f64) -> Result<Self> {
        Self::new(values, window_length, OverlapPolicy::Disjoint)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Read the `lost_volume` column of a window CSV. The window length is
    /// the spacing of `t_start` unless given.
    pub fn read_csv<R: std::io::Read>(input: R, window_length: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(input);
        let headers = rdr.headers()?.clone();
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::InsufficientData(format!("missing column {name}")))
        };
        let lost = col("lost_volume")?;
        let start = col("t_start").ok();
        let mut values = Vec::new();
        let mut starts = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i).unwrap_or("").trim().parse::<f64>().map_err(|e| {
                    invalid(format!(
                        "line {}: {e}",
                        rec.position().map_or(0, |p| p.line())
                    ))
                })
            };
            values.push(parse(lost)?);
            if let Some(s) = start {
                starts.push(parse(s)?);
            }
        }
        let length = match window_length {
            Some(l) => l,
            None if starts.len() >= 2 => starts[1] - starts[0],
            None => return Err(invalid("window length not given and not inferable")),
        };
        Self::new(values, length, OverlapPolicy::Disjoint)
    }

    /// Write as `window_index,t_start,lost_volume`, windows back to back from 0.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["window_index", "t_start", "lost_volume"])?;
        for (k, v) in self.values.iter().enumerate() {
            w.write_record([
                k.to_string(),
                (k as f64 * self.window_length).to_string(),
                v.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}
