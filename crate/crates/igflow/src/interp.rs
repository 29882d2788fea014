//! Cumulative quadrature and monotone cubic (Fritsch–Carlson) resampling.

use crate::error::{IgError, Result};

/// Cumulative trapezoidal integral of sampled values `f` over abscissae
/// `x`; the result starts at 0 and has the same length as the input.
pub fn cumulative_trapezoid(x: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    if x.len() != f.len() {
        return Err(IgError::InvalidInput(
            "abscissae and values must have equal length".into(),
        ));
    }
    let mut out = Vec::with_capacity(x.len());
    if x.is_empty() {
        return Ok(out);
    }
    out.push(0.0);
    for i in 1..x.len() {
        let dx = x[i] - x[i - 1];
        out.push(out[i - 1] + 0.5 * (f[i] + f[i - 1]) * dx);
    }
    Ok(out)
}

/// Shape-preserving slopes for cubic Hermite interpolation
/// (Fritsch–Carlson weighted harmonic mean, clamped endpoints).
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n < 2 {
        return m;
    }
    let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        m[0] = d[0];
        m[1] = d[0];
        return m;
    }
    for i in 1..n - 1 {
        if d[i - 1] * d[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // One-sided three-point endpoint slopes with monotonicity clamping.
    let end_slope = |h0: f64, h1: f64, d0: f64, d1: f64| -> f64 {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end_slope(h[0], h[1], d[0], d[1]);
    m[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

/// Monotone-in-x sampled series that can be evaluated anywhere inside its
/// span by cubic Hermite interpolation.
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(IgError::InvalidInput(
                "x and y must have equal length".into(),
            ));
        }
        if x.len() < 2 {
            return Err(IgError::InsufficientSamples {
                need: 2,
                got: x.len(),
            });
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(IgError::InvalidInput(
                "abscissae must be strictly increasing".into(),
            ));
        }
        Ok(MonotoneCubic {
            x: x.to_vec(),
            y: y.to_vec(),
            m: pchip_slopes(x, y),
        })
    }

    pub fn span(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    pub fn eval(&self, xq: f64) -> Result<f64> {
        let (lo, hi) = self.span();
        if xq < lo || xq > hi {
            return Err(IgError::InvalidInput(format!(
                "query {xq} outside interpolation span [{lo}, {hi}]"
            )));
        }
        // Exact hit on a node keeps resampling of shared grids bit-stable.
        let k = match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => return Ok(self.y[i]),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        };
        let h = self.x[k + 1] - self.x[k];
        let t = (xq - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * self.y[k] + h10 * h * self.m[k] + h01 * self.y[k + 1] + h11 * h * self.m[k + 1])
    }
}

/// Resamples a multi-column series (`columns[c][i]` over `x[i]`) onto new
/// abscissae, interpolating each column independently.
pub fn resample_columns(
    x: &[f64],
    columns: &[Vec<f64>],
    x_new: &[f64],
) -> Result<Vec<Vec<f64>>> {
    columns
        .iter()
        .map(|col| {
            let interp = MonotoneCubic::new(x, col)?;
            x_new.iter().map(|&q| interp.eval(q)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_constant_is_exact() {
        let x: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let f = vec![2.0; x.len()];
        let c = cumulative_trapezoid(&x, &f).unwrap();
        assert!((c.last().unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_empty() {
        assert!(cumulative_trapezoid(&[], &[]).unwrap().is_empty());
    }

    #[test]
    fn pchip_hits_nodes_exactly() {
        let x = [0.0, 1.0, 2.5, 4.0];
        let y = [1.0, 2.0, 0.5, 0.7];
        let c = MonotoneCubic::new(&x, &y).unwrap();
        for (xi, yi) in x.iter().zip(y.iter()) {
            assert_eq!(c.eval(*xi).unwrap(), *yi);
        }
    }

    #[test]
    fn pchip_tracks_smooth_function() {
        let x: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
        let y: Vec<f64> = x.iter().map(|t| (t * 1.3).exp()).collect();
        let c = MonotoneCubic::new(&x, &y).unwrap();
        let mut worst = 0.0f64;
        for i in 0..400 {
            let q = 0.0025 + i as f64 * 0.005;
            if q > 2.0 {
                break;
            }
            worst = worst.max((c.eval(q).unwrap() - (q * 1.3).exp()).abs());
        }
        assert!(worst < 1e-7, "pchip error {worst}");
    }

    #[test]
    fn pchip_respects_monotone_data() {
        // No overshoot between monotone samples.
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, 0.1, 0.9, 1.0];
        let c = MonotoneCubic::new(&x, &y).unwrap();
        for i in 0..=300 {
            let q = i as f64 * 0.01;
            let v = c.eval(q).unwrap();
            assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        }
    }

    #[test]
    fn rejects_unsorted_and_out_of_span() {
        assert!(MonotoneCubic::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        let c = MonotoneCubic::new(&[0.0, 1.0], &[1.0, 2.0]).unwrap();
        assert!(c.eval(1.5).is_err());
    }
}
