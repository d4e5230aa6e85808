use crate::error::{Error, Result};

/// Uniform grid `x_j = j h`, `j = 0..=n`, on the truncated half line `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub length: f64,
    pub cells: usize,
    pub h: f64,
}

pub const MIN_CELLS: usize = 16;

impl Grid {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParam {
                field: "grid.length",
                reason: format!("must be > 0, got {length}"),
            });
        }
        if cells < MIN_CELLS {
            return Err(Error::InvalidParam {
                field: "grid.cells",
                reason: format!("need at least {MIN_CELLS} cells, got {cells}"),
            });
        }
        Ok(Grid {
            length,
            cells,
            h: length / cells as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.cells + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn x(&self, j: usize) -> f64 {
        if j == self.cells {
            self.length
        } else {
            j as f64 * self.h
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }
}
