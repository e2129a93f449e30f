//! Interpolants used by the crossing analysis.
//!
//! Crossing detection runs on a shape-preserving monotone cubic (no
//! overshoot between samples, so a monotone observable cannot fake extra
//! sign changes); second derivatives come from a natural cubic spline,
//! which is smoother but may overshoot.

use super::FssError;

fn check_grid(x: &[f64], y: &[f64]) -> Result<(), FssError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(FssError::TooFewPoints {
            need: 2,
            got: x.len().min(y.len()),
        });
    }
    if x.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FssError::GridNotIncreasing);
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(FssError::NonFiniteData);
    }
    Ok(())
}

fn find_interval(x: &[f64], t: f64) -> usize {
    // index i with x[i] <= t < x[i+1], clamped to valid intervals
    match x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
        Ok(i) => i.min(x.len() - 2),
        Err(0) => 0,
        Err(i) => (i - 1).min(x.len() - 2),
    }
}

/// Fritsch-Carlson monotone cubic Hermite interpolant.
///
/// Exact at the nodes, reproduces linear data exactly, and preserves
/// monotonicity of the samples on every interval.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, FssError> {
        check_grid(&x, &y)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let sec: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0f64; n];
        if n == 2 {
            slope[0] = sec[0];
            slope[1] = sec[0];
        } else {
            for i in 1..n - 1 {
                if sec[i - 1] * sec[i] <= 0.0 {
                    slope[i] = 0.0;
                } else {
                    // weighted harmonic mean of the neighbouring secants
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    slope[i] = (w1 + w2) / (w1 / sec[i - 1] + w2 / sec[i]);
                }
            }
            slope[0] = endpoint_slope(h[0], h[1], sec[0], sec[1]);
            slope[n - 1] = endpoint_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
        }
        Ok(Self { x, y, slope })
    }

    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = find_interval(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(s);
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = find_interval(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let d00 = (6.0 * s * s - 6.0 * s) / h;
        let d10 = 3.0 * s * s - 4.0 * s + 1.0;
        let d01 = -d00;
        let d11 = 3.0 * s * s - 2.0 * s;
        d00 * self.y[i] + d10 * self.slope[i] + d01 * self.y[i + 1] + d11 * self.slope[i + 1]
    }
}

/// Standard PCHIP one-sided endpoint estimate with monotonicity clipping.
fn endpoint_slope(h0: f64, h1: f64, s0: f64, s1: f64) -> f64 {
    let mut d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if d * s0 <= 0.0 {
        d = 0.0;
    } else if s0 * s1 <= 0.0 && d.abs() > 3.0 * s0.abs() {
        d = 3.0 * s0;
    }
    d
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

/// Natural cubic spline (zero second derivative at the ends); the smooth
/// estimator behind second derivatives.
#[derive(Debug, Clone)]
pub struct NaturalCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>, // second derivatives at the nodes
}

impl NaturalCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, FssError> {
        check_grid(&x, &y)?;
        let n = x.len();
        let mut m = vec![0.0f64; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives
            let mut diag = vec![0.0f64; n - 2];
            let mut upper = vec![0.0f64; n - 2];
            let mut rhs = vec![0.0f64; n - 2];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            // Thomas algorithm; sub-diagonal equals the previous row's upper
            for i in 1..n - 2 {
                let lower = upper[i - 1];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[n - 2] = rhs[n - 3] / diag[n - 3];
            for i in (1..n - 2).rev() {
                m[i] = (rhs[i - 1] - upper[i - 1] * m[i + 1]) / diag[i - 1];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = find_interval(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let i = find_interval(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let i = find_interval(&self.x, t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.m[i] + b * self.m[i + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_data_is_reproduced_exactly() {
        let x: Vec<f64> = (0..8).map(|i| i as f64 * 0.37).collect();
        let y: Vec<f64> = x.iter().map(|&v| 2.5 * v - 1.0).collect();
        let mc = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        for i in 0..70 {
            let t = 0.037 * i as f64;
            assert!((mc.eval(t) - (2.5 * t - 1.0)).abs() < 1e-12, "t={t}");
            assert!((mc.derivative(t) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_at_nodes() {
        let x = vec![0.0, 1.0, 1.5, 3.0, 4.5];
        let y = vec![1.0, -0.3, 0.8, 0.9, -2.0];
        let mc = MonotoneCubic::new(x.clone(), y.clone()).unwrap();
        let nc = NaturalCubic::new(x.clone(), y.clone()).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((mc.eval(*xi) - yi).abs() < 1e-14);
            assert!((nc.eval(*xi) - yi).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(MonotoneCubic::new(vec![0.0, 0.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(MonotoneCubic::new(vec![0.0], vec![1.0]).is_err());
        assert!(NaturalCubic::new(vec![0.0, 1.0], vec![f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn natural_spline_second_derivative_of_cubic_like_data() {
        // y = x^2 has constant second derivative; the natural end
        // conditions are wrong at the boundary but their influence decays
        // geometrically toward the middle
        let x: Vec<f64> = (0..41).map(|i| i as f64 * 0.25).collect();
        let y: Vec<f64> = x.iter().map(|&v| v * v).collect();
        let nc = NaturalCubic::new(x, y).unwrap();
        for i in 18..23 {
            let t = 0.25 * i as f64;
            assert!((nc.second_derivative(t) - 2.0).abs() < 1e-4, "t={t}: {}", nc.second_derivative(t));
        }
    }

    proptest! {
        #[test]
        fn monotone_data_gives_monotone_interpolant(
            raw in proptest::collection::vec(0.01f64..1.0, 4..12),
            steps in proptest::collection::vec(0.05f64..1.0, 4..12),
        ) {
            let n = raw.len().min(steps.len());
            // strictly increasing grid and nondecreasing values
            let mut x = vec![0.0f64];
            let mut y = vec![0.0f64];
            for i in 0..n {
                x.push(x[i] + steps[i]);
                y.push(y[i] + raw[i]);
            }
            let mc = MonotoneCubic::new(x.clone(), y).unwrap();
            let lo = x[0];
            let hi = *x.last().unwrap();
            let mut prev = mc.eval(lo);
            for j in 1..=400 {
                let t = lo + (hi - lo) * j as f64 / 400.0;
                let v = mc.eval(t);
                prop_assert!(v >= prev - 1e-12, "violation at t={t}: {v} < {prev}");
                prev = v;
            }
        }
    }
}
