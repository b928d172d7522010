use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// `u_N = 0` exactly.
    DirichletZero,
    Free,
}

/// Nodal values of a radial function on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
    boundary: Boundary,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>, boundary: Boundary) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidField(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("non-finite value at node {i}")));
        }
        if boundary == Boundary::DirichletZero && values[grid.intervals()] != 0.0 {
            return Err(Error::InvalidField(format!(
                "dirichlet-zero field has u_N = {}",
                values[grid.intervals()]
            )));
        }
        Ok(RadialField { grid, values, boundary })
    }

    /// Samples `f` at the nodes; a dirichlet-zero field gets `u_N = 0` regardless of `f(j)`.
    pub fn from_fn(grid: RadialGrid, boundary: Boundary, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().into_iter().map(f).collect();
        if boundary == Boundary::DirichletZero {
            values[grid.intervals()] = 0.0;
        }
        Self::new(grid, values, boundary)
    }

    pub fn grid(&self) -> RadialGrid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Largest value and the index where it is attained (first occurrence).
    pub fn max(&self) -> (f64, usize) {
        self.values
            .iter()
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |(m, k), (i, v)| if *v > m { (*v, i) } else { (m, k) })
    }

    pub fn scaled(&self, t: f64) -> RadialField {
        RadialField {
            grid: self.grid,
            values: self.values.iter().map(|v| v * t).collect(),
            boundary: self.boundary,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<RadialField> {
        let mut values: Vec<f64> = self.values.iter().map(|v| f(*v)).collect();
        if self.boundary == Boundary::DirichletZero {
            values[self.grid.intervals()] = 0.0;
        }
        RadialField::new(self.grid, values, self.boundary)
    }

    /// Vanishes at the outer node, so the field is compactly supported in the closed ball.
    pub fn vanishes_at_boundary(&self) -> bool {
        self.values[self.grid.intervals()] == 0.0
    }

    /// Extends by zero to a grid `factor` times larger with the same spacing.
    pub fn extend_by_zero(&self, factor: usize) -> Result<RadialField> {
        if !self.vanishes_at_boundary() {
            return Err(Error::InvalidField("only fields vanishing at r = j extend by zero continuously".into()));
        }
        let grid = self.grid.extended(factor.max(1));
        let mut values = self.values.clone();
        values.resize(grid.len(), 0.0);
        RadialField::new(grid, values, Boundary::DirichletZero)
    }

    /// Writes the two-column CSV `r,u`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "u"])?;
        for (i, v) in self.values.iter().enumerate() {
            wtr.write_record([format_float(self.grid.node(i)), format_float(*v)])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`RadialField::write_csv`]. The nodes must form a uniform grid from 0.
    pub fn read_csv<R: Read>(r: R, boundary: Boundary) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "u" {
            return Err(Error::InvalidField("field CSV header must be `r,u`".into()));
        }
        let (mut rs, mut us) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::InvalidField(format!("{s}: {e}")));
            rs.push(parse(&rec[0])?);
            us.push(parse(&rec[1])?);
        }
        if rs.len() < 2 || rs[0] != 0.0 {
            return Err(Error::InvalidField("field CSV must start at r = 0".into()));
        }
        let grid = RadialGrid::new(*rs.last().unwrap(), rs.len() - 1)?;
        let h = grid.h();
        if rs.iter().enumerate().any(|(i, r)| (r - i as f64 * h).abs() > 1e-9 * grid.radius()) {
            return Err(Error::InvalidField("field CSV nodes are not uniform".into()));
        }
        RadialField::new(grid, us, boundary)
    }
}

/// Shortest decimal representation that round-trips.
fn format_float(v: f64) -> String {
    format!("{v:?}")
}
