use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Version tag of the serialized layout.
pub const SCHEMA: &str = "jch-grid/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridAxes {
    /// Cell axes; cells are laid out row-major over them.
    pub grid: Vec<GridAxis>,
    /// Shared time grid, if the cells hold time series.
    pub time: Option<Vec<f64>>,
    /// Names of the quantities stored at each (cell, time) point.
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagStatus {
    Ok,
    /// Value present but a convergence check failed.
    Warning,
    /// No value; the cell's computation failed.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFlag {
    pub status: FlagStatus,
    pub message: String,
}

impl CellFlag {
    pub fn ok() -> Self {
        Self {
            status: FlagStatus::Ok,
            message: String::new(),
        }
    }

    pub fn warning(message: impl Into<String>) -> Self {
        Self {
            status: FlagStatus::Warning,
            message: message.into(),
        }
    }

    pub fn error(message: impl Into<String>) -> Self {
        Self {
            status: FlagStatus::Error,
            message: message.into(),
        }
    }

    /// Single-field rendering for tabular output.
    pub fn label(&self) -> String {
        match self.status {
            FlagStatus::Ok => "ok".into(),
            FlagStatus::Warning => format!("warning: {}", self.message),
            FlagStatus::Error => format!("error: {}", self.message),
        }
    }
}

/// A table of cells, each holding `time × columns` values.
///
/// `values[cell][k · columns.len() + c]` is column `c` at time index `k`
/// (or `k = 0` without a time axis). Failed cells hold `None` throughout
/// and carry an error flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub schema: String,
    /// Echo of everything that produced the values.
    pub params: serde_json::Value,
    pub axes: GridAxes,
    pub values: Vec<Vec<Option<f64>>>,
    pub flags: Vec<CellFlag>,
}

impl GridResult {
    pub fn new(
        params: serde_json::Value,
        axes: GridAxes,
        values: Vec<Vec<Option<f64>>>,
        flags: Vec<CellFlag>,
    ) -> Result<Self> {
        let res = Self {
            schema: SCHEMA.to_string(),
            params,
            axes,
            values,
            flags,
        };
        res.validate()?;
        Ok(res)
    }

    pub fn cell_count(&self) -> usize {
        self.axes.grid.iter().map(|a| a.values.len()).product()
    }

    pub fn row_len(&self) -> usize {
        self.axes.time.as_ref().map_or(1, Vec::len) * self.axes.columns.len()
    }

    /// Grid coordinates of cell `index`.
    pub fn coordinates(&self, index: usize) -> Vec<f64> {
        let mut rest = index;
        let mut coords = vec![0.0; self.axes.grid.len()];
        for (slot, axis) in coords.iter_mut().zip(&self.axes.grid).rev() {
            let n = axis.values.len();
            *slot = axis.values[rest % n];
            rest /= n;
        }
        coords
    }

    /// Column `column` of cell `cell` across the time axis.
    pub fn series(&self, cell: usize, column: usize) -> Vec<Option<f64>> {
        let width = self.axes.columns.len();
        self.values[cell].iter().skip(column).step_by(width).copied().collect()
    }

    pub fn failed_cells(&self) -> usize {
        self.flags.iter().filter(|f| f.status == FlagStatus::Error).count()
    }

    pub fn flagged_cells(&self) -> usize {
        self.flags.iter().filter(|f| f.status != FlagStatus::Ok).count()
    }

    /// Checks that the value table matches the axes and that missing or
    /// non-finite values only occur in flagged cells.
    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA {
            return Err(Error::InvalidInput(format!("unknown schema `{}`", self.schema)));
        }
        if self.axes.columns.is_empty() {
            return Err(Error::InvalidInput("result has no columns".into()));
        }
        let cells = self.cell_count();
        if self.values.len() != cells || self.flags.len() != cells {
            return Err(Error::InvalidInput(format!(
                "expected {cells} cells, got {} value rows and {} flags",
                self.values.len(),
                self.flags.len()
            )));
        }
        let width = self.row_len();
        for (i, (row, flag)) in self.values.iter().zip(&self.flags).enumerate() {
            if row.len() != width {
                return Err(Error::InvalidInput(format!(
                    "cell {i} has {} values, expected {width}",
                    row.len()
                )));
            }
            let clean = row.iter().all(|v| v.is_some_and(f64::is_finite));
            if !clean && flag.status == FlagStatus::Ok {
                return Err(Error::InvalidInput(format!("cell {i} has missing values but no flag")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_three() -> GridResult {
        GridResult::new(
            serde_json::json!({}),
            GridAxes {
                grid: vec![
                    GridAxis {
                        name: "a".into(),
                        values: vec![1.0, 2.0],
                    },
                    GridAxis {
                        name: "b".into(),
                        values: vec![10.0, 20.0, 30.0],
                    },
                ],
                time: None,
                columns: vec!["x".into()],
            },
            (0..6).map(|i| vec![Some(i as f64)]).collect(),
            vec![CellFlag::ok(); 6],
        )
        .unwrap()
    }

    #[test]
    fn coordinates_are_row_major() {
        let r = two_by_three();
        assert_eq!(r.coordinates(0), vec![1.0, 10.0]);
        assert_eq!(r.coordinates(4), vec![2.0, 20.0]);
    }

    #[test]
    fn missing_values_need_a_flag() {
        let mut r = two_by_three();
        r.values[2][0] = None;
        assert!(r.validate().is_err());
        r.flags[2] = CellFlag::error("boom");
        assert!(r.validate().is_ok());
        assert_eq!(r.failed_cells(), 1);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let mut r = two_by_three();
        r.values.pop();
        assert!(r.validate().is_err());
    }
}
