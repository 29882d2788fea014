//! Coordinate charts on a dually-flat model.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{IgError, Result};

/// The two affine charts of a dually-flat structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Theta,
    Eta,
}

impl Chart {
    /// Column-name prefix used in CSV output.
    pub fn coord_prefix(self) -> &'static str {
        match self {
            Chart::Theta => "theta",
            Chart::Eta => "eta",
        }
    }
}

/// A coordinate vector tagged with the chart it lives in.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    chart: Chart,
    coords: DVector<f64>,
}

impl ChartPoint {
    pub fn new(chart: Chart, coords: DVector<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(IgError::InvalidInput(
                "chart point needs at least one coordinate".into(),
            ));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(IgError::InvalidInput(
                "chart point coordinates must be finite".into(),
            ));
        }
        Ok(ChartPoint { chart, coords })
    }

    pub fn theta(coords: &[f64]) -> Result<Self> {
        ChartPoint::new(Chart::Theta, DVector::from_column_slice(coords))
    }

    pub fn eta(coords: &[f64]) -> Result<Self> {
        ChartPoint::new(Chart::Eta, DVector::from_column_slice(coords))
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }
}
