//! Static backgrounds sampled from a two-column text file and interpolated
//! by a clamped cubic spline.
//!
//! File layout:
//!
//! ```text
//! # t-dependence: static
//! -10.0  -0.99
//! -9.9   -0.98
//! ```
//!
//! Blank lines and further `#` comments are ignored. End slopes come from
//! one-sided three-point differences.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
    // second derivatives at the knots
    m: Vec<f64>,
}

impl TabulatedProfile {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Malformed(format!(
                "{} abscissae but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 4 {
            return Err(Error::Malformed("need at least four samples".into()));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Malformed("non-finite sample".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Malformed("abscissae must be strictly increasing".into()));
        }
        let m = clamped_second_derivatives(&xs, &ys);
        Ok(Self { xs, ys, m })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut static_seen = false;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(value) = comment.trim().strip_prefix("t-dependence:") {
                    let value = value.trim();
                    if value != "static" {
                        return Err(Error::Malformed(format!(
                            "unsupported t-dependence '{value}' (only 'static')"
                        )));
                    }
                    static_seen = true;
                }
                continue;
            }
            let mut cols = line.split_whitespace().map(str::parse::<f64>);
            match (cols.next(), cols.next(), cols.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => {
                    xs.push(x);
                    ys.push(y);
                }
                _ => {
                    return Err(Error::Malformed(format!(
                        "line {}: expected two numeric columns",
                        lineno + 1
                    )))
                }
            }
        }
        if !static_seen {
            return Err(Error::Malformed("missing '# t-dependence: static' header".into()));
        }
        Self::new(xs, ys)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# t-dependence: static\n");
        for (x, y) in self.xs.iter().zip(&self.ys) {
            let _ = writeln!(out, "{x:.17e} {y:.17e}");
        }
        out
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], *self.xs.last().unwrap())
    }

    /// `(S, S', S'', S''')` at `x`.
    pub fn eval(&self, x: f64) -> Result<[f64; 4]> {
        let (lo, hi) = self.range();
        if !(lo..=hi).contains(&x) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        let i = match self.xs.partition_point(|&v| v <= x) {
            0 => 0,
            p => (p - 1).min(self.xs.len() - 2),
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let s = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let s1 = (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let s2 = a * m0 + b * m1;
        let s3 = (m1 - m0) / h;
        Ok([s, s1, s2, s3])
    }
}

fn end_slope(x: [f64; 3], y: [f64; 3]) -> f64 {
    let [x0, x1, x2] = x;
    y[0] * (2.0 * x0 - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + y[1] * (x0 - x2) / ((x1 - x0) * (x1 - x2))
        + y[2] * (x0 - x1) / ((x2 - x0) * (x2 - x1))
}

fn clamped_second_derivatives(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let s0 = end_slope([xs[0], xs[1], xs[2]], [ys[0], ys[1], ys[2]]);
    let sn = end_slope([xs[n - 1], xs[n - 2], xs[n - 3]], [ys[n - 1], ys[n - 2], ys[n - 3]]);
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    diag[0] = 2.0 * h[0];
    sup[0] = h[0];
    rhs[0] = 6.0 * (slope[0] - s0);
    for i in 1..n - 1 {
        sub[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        sup[i] = h[i];
        rhs[i] = 6.0 * (slope[i] - slope[i - 1]);
    }
    sub[n - 1] = h[n - 2];
    diag[n - 1] = 2.0 * h[n - 2];
    rhs[n - 1] = 6.0 * (sn - slope[n - 2]);
    // Thomas algorithm
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut m = vec![0.0; n];
    m[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        m[i] = (rhs[i] - sup[i] * m[i + 1]) / diag[i];
    }
    m
}
