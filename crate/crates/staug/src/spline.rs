//! Natural cubic spline interpolation, used for the envelope step of sifting.

use crate::error::{Error, Result};

/// Piecewise cubic through the knots with zero second derivative at both ends.
#[derive(Debug, Clone)]
pub struct NaturalCubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at each knot.
    y2: Vec<f64>,
}

impl NaturalCubicSpline {
    /// Fit the spline. `xs` must be strictly increasing with at least 2 knots.
    pub fn fit(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Shape(format!(
                "{} knot positions but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::DegenerateEnvelope(format!(
                "spline needs at least 2 knots, got {}",
                xs.len()
            )));
        }
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Shape(format!(
                    "knot positions must strictly increase: {} then {}",
                    w[0], w[1]
                )));
            }
        }

        let n = xs.len();
        let mut y2 = vec![0.0; n];
        let mut u = vec![0.0; n];
        // Tridiagonal sweep; natural boundary leaves y2[0] = y2[n-1] = 0.
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * y2[i - 1] + 2.0;
            y2[i] = (sig - 1.0) / p;
            let slope_hi = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
            let slope_lo = (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * (slope_hi - slope_lo) / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        for k in (1..n - 1).rev() {
            y2[k] = y2[k] * y2[k + 1] + u[k];
        }

        Ok(Self { xs, ys, y2 })
    }

    /// Evaluate at `x`. Outside the knot range the boundary segment's cubic is
    /// extended, which for a natural spline tends linear at the ends.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = match self
            .xs
            .binary_search_by(|k| k.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let hstep = x1 - x0;
        let a = (x1 - x) / hstep;
        let b = (x - x0) / hstep;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.y2[i] + (b * b * b - b) * self.y2[i + 1]) * hstep * hstep
                / 6.0
    }
}
