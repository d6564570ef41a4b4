//! Coordinate charts: named axis-aligned boxes on which all fields live.

use crate::error::{GeomError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub coord_names: Vec<String>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Chart {
    pub fn new(
        name: &str,
        coord_names: &[&str],
        lower: Vec<f64>,
        upper: Vec<f64>,
    ) -> Result<Chart> {
        let dim = coord_names.len();
        if dim == 0 {
            return Err(GeomError::Config(format!("chart '{name}' must have dim >= 1")));
        }
        if lower.len() != dim || upper.len() != dim {
            return Err(GeomError::Config(format!(
                "chart '{name}': bounds length must equal dim {dim}"
            )));
        }
        for i in 0..dim {
            if !lower[i].is_finite() || !upper[i].is_finite() || lower[i] >= upper[i] {
                return Err(GeomError::Config(format!(
                    "chart '{name}': axis {i} needs finite lower < upper"
                )));
            }
        }
        Ok(Chart {
            name: name.to_string(),
            coord_names: coord_names.iter().map(|s| s.to_string()).collect(),
            lower,
            upper,
        })
    }

    /// Symmetric box [-r, r]^dim.
    pub fn symmetric(name: &str, coord_names: &[&str], r: f64) -> Chart {
        let dim = coord_names.len();
        Chart::new(name, coord_names, vec![-r; dim], vec![r; dim]).expect("valid box")
    }

    pub fn dim(&self) -> usize {
        self.coord_names.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim()
            && p.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::Domain {
                chart: self.name.clone(),
                point: p.to_vec(),
            })
        }
    }

    pub fn check_same(&self, other: &Chart) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(GeomError::ChartMismatch {
                expected: self.name.clone(),
                found: other.name.clone(),
            })
        }
    }

    pub fn index_of(&self, coord: &str) -> Option<usize> {
        self.coord_names.iter().position(|c| c == coord)
    }

    /// Append extra coordinates (used by cone and torus constructions).
    pub fn extend(&self, name: &str, extra: &[(&str, f64, f64)]) -> Chart {
        let mut coord_names = self.coord_names.clone();
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();
        for (c, lo, hi) in extra {
            coord_names.push(c.to_string());
            lower.push(*lo);
            upper.push(*hi);
        }
        Chart {
            name: name.to_string(),
            coord_names,
            lower,
            upper,
        }
    }
}
