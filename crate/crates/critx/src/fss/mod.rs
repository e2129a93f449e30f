//! Finite-size-scaling analysis: crossing detection between observable
//! curves at successive sizes, power-law extrapolation of the crossing
//! sequence, derivative and slope fits, exponent algebra, scaling
//! collapse, and the scaled-gap (PRG) baseline.
//!
//! The driving observable O_g(L) is odd in (g - g_c) up to scaling
//! corrections, so curves at two sizes cross at a single point near g_c;
//! g_c is recovered by extrapolating those crossings in L. Gaps are even
//! in (g - g_c) instead, which is why scaled gaps cross twice and the
//! observable crossing is the cleaner tool.

mod interp;

pub use interp::{MonotoneCubic, NaturalCubic};

use nalgebra::{Matrix3, Vector3};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FssError {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("series contains non-finite data")]
    NonFiniteData,
    #[error("crossing needs two different sizes, both series have L={0}")]
    SameLength(usize),
    #[error("series sample different parameters: `{0}` vs `{1}`")]
    ParamMismatch(String, String),
    #[error("bracket [{lo}, {hi}] not covered by the series grids")]
    BracketOutsideGrid { lo: f64, hi: f64 },
    #[error("no sign change inside the bracket")]
    NoSignChange,
    #[error("multiple sign changes inside the bracket: {brackets:?}; narrow the bracket")]
    MultipleSignChanges { brackets: Vec<(f64, f64)> },
    #[error("found {0} scaled-gap roots; at most two are expected")]
    TooManyRoots(usize),
    #[error("evaluation point {0} must be strictly inside the grid")]
    BoundaryEvaluation(f64),
    #[error("derivative order {0} not supported (1 or 2)")]
    UnsupportedOrder(usize),
    #[error("abscissas are degenerate; need distinct sizes")]
    DegenerateAbscissas,
    #[error("power-law fit needs positive values, got {0}")]
    NonPositiveValue(f64),
    #[error("nonlinear fit diverged")]
    FitDiverged,
    #[error("rescaled series share no overlap window")]
    NoOverlap,
    #[error("g_c = {0} lies outside a series grid")]
    GcOutsideGrid(f64),
    #[error("gap series must be nonnegative, found {0}")]
    NegativeGap(f64),
    #[error("invalid exponent input: {0}")]
    InvalidExponent(&'static str),
    #[error("K = {0} is at or beyond the BKT boundary K = 2, where power-law crossings disappear and the method is unreliable")]
    BktBoundary(f64),
}

/// A local observable sampled on a strictly increasing parameter grid at
/// fixed chain length.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub model_tag: String,
    pub l: usize,
    pub param_name: String,
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(
        model_tag: impl Into<String>,
        l: usize,
        param_name: impl Into<String>,
        grid: Vec<f64>,
        values: Vec<f64>,
    ) -> Result<Self, FssError> {
        if grid.len() < 4 || values.len() != grid.len() {
            return Err(FssError::TooFewPoints {
                need: 4,
                got: grid.len().min(values.len()),
            });
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FssError::GridNotIncreasing);
        }
        if grid.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(FssError::NonFiniteData);
        }
        Ok(Self {
            model_tag: model_tag.into(),
            l,
            param_name: param_name.into(),
            grid,
            values,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Shape-preserving interpolant through the samples.
    pub fn interpolate(&self) -> MonotoneCubic {
        // constructor invariants guarantee this cannot fail
        MonotoneCubic::new(self.grid.clone(), self.values.clone()).expect("validated series")
    }
}

/// Intersection of two observable curves at successive sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingPoint {
    pub l_small: usize,
    pub l_large: usize,
    pub g_star: f64,
    pub value_at_crossing: f64,
    pub bracket: (f64, f64),
}

impl CrossingPoint {
    /// Effective size of the pair: the midpoint (L + L') / 2. Extrapolating
    /// against the midpoint absorbs most of the next-order drift of
    /// consecutive-pair crossings.
    pub fn effective_size(&self) -> f64 {
        (self.l_small + self.l_large) as f64 / 2.0
    }
}

/// Result of fitting g*_L = g_c + a L^{-omega}.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub g_c: f64,
    pub amplitude: f64,
    pub exponent: f64,
    /// Covariance of (g_c, amplitude, exponent).
    pub covariance: Matrix3<f64>,
    pub residual_norm: f64,
}

/// Critical exponents with the consistency relations between them.
///
/// rho = (d + zeta) nu - 1 always; on a c = 1 line parametrized by the
/// Luttinger constant K, additionally rho = K/(2-K) and nu = 1/(2-K).
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentSet {
    pub d: f64,
    pub zeta: f64,
    pub nu: f64,
    pub rho: f64,
    pub k: Option<f64>,
}

impl ExponentSet {
    fn validate(&self) -> Result<(), FssError> {
        if let Some(k) = self.k {
            if (self.rho - k / (2.0 - k)).abs() > 1e-12 {
                return Err(FssError::InvalidExponent("rho inconsistent with K/(2-K)"));
            }
            if (self.nu - 1.0 / (2.0 - k)).abs() > 1e-12 {
                return Err(FssError::InvalidExponent("nu inconsistent with 1/(2-K)"));
            }
        }
        Ok(())
    }
}

/// Exponent set from the correlation-length exponent: rho = (d+zeta) nu - 1.
/// On the d = zeta = 1 line the Luttinger parameter K = 2 - 1/nu is filled
/// in when it lands in (0, 2).
pub fn exponent_set_from_nu(d: f64, zeta: f64, nu: f64) -> Result<ExponentSet, FssError> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(FssError::InvalidExponent("nu must be positive and finite"));
    }
    let rho = (d + zeta) * nu - 1.0;
    let k = if d == 1.0 && zeta == 1.0 {
        let k = 2.0 - 1.0 / nu;
        (k > 0.0 && k < 2.0).then_some(k)
    } else {
        None
    };
    let set = ExponentSet { d, zeta, nu, rho, k };
    set.validate()?;
    Ok(set)
}

/// Exponent set from the Luttinger parameter of the c = 1 line:
/// nu = 1/(2-K), rho = K/(2-K). K >= 2 is the BKT boundary and errors out.
pub fn exponent_set_from_k(k: f64) -> Result<ExponentSet, FssError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(FssError::InvalidExponent("K must be positive and finite"));
    }
    if k >= 2.0 {
        return Err(FssError::BktBoundary(k));
    }
    let nu = 1.0 / (2.0 - k);
    let mut set = exponent_set_from_nu(1.0, 1.0, nu)?;
    set.k = Some(k);
    set.validate()?;
    Ok(set)
}

/// Luttinger-parameter estimate from the fitted derivative-scaling
/// exponent b: dO/dg at g_c grows as L^b with b = 2 - 2K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuttingerEstimate {
    pub k: f64,
    /// K >= 1.9 sits close to the BKT point, where crossings flatten out
    /// and the estimate should not be trusted.
    pub near_bkt: bool,
}

pub fn luttinger_from_derivative_exponent(b: f64) -> LuttingerEstimate {
    let k = (2.0 - b) / 2.0;
    LuttingerEstimate {
        k,
        near_bkt: k >= 1.9,
    }
}

/// All sign-change subintervals of `f` on a scan of `n` panels.
fn sign_change_brackets<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    n: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = f(lo);
    for i in 1..=n {
        let x = lo + (hi - lo) * i as f64 / n as f64;
        let fx = f(x);
        if prev_f == 0.0 {
            // the scan landed exactly on a root; treat the surrounding panel
            // as a bracket
            out.push((prev_x, x));
        } else if prev_f * fx < 0.0 {
            out.push((prev_x, x));
        }
        prev_x = x;
        prev_f = fx;
    }
    out
}

/// Bisect a bracketed root down to |dg| <= 1e-12.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    if flo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    0.5 * (lo + hi)
}

/// Strictly containing bracket for a refined root (the root may sit on a
/// scan point, i.e. exactly on the refined bracket's edge).
fn enclose(g_star: f64, lo: f64, hi: f64) -> (f64, f64) {
    let pad = 1e-12f64.max(g_star.abs() * 1e-14);
    (lo.min(g_star - pad), hi.max(g_star + pad))
}

fn common_bracket(
    a: &ObservableSeries,
    b: &ObservableSeries,
    bracket: (f64, f64),
) -> Result<(f64, f64), FssError> {
    let (lo, hi) = bracket;
    let covered = |s: &ObservableSeries| s.grid[0] <= lo && *s.grid.last().unwrap() >= hi;
    if lo >= hi || !covered(a) || !covered(b) {
        return Err(FssError::BracketOutsideGrid { lo, hi });
    }
    Ok(bracket)
}

/// Crossing point of two observable curves inside a bracket.
///
/// The difference of the two monotone-cubic interpolants is scanned for
/// sign changes; exactly one must lie in the bracket. Multiple sign
/// changes are reported as an error carrying all candidate brackets —
/// tie-breaking is the caller's decision, never silent.
pub fn crossing(
    a: &ObservableSeries,
    b: &ObservableSeries,
    bracket: (f64, f64),
) -> Result<CrossingPoint, FssError> {
    if a.l == b.l {
        return Err(FssError::SameLength(a.l));
    }
    if a.param_name != b.param_name {
        return Err(FssError::ParamMismatch(
            a.param_name.clone(),
            b.param_name.clone(),
        ));
    }
    let (lo, hi) = common_bracket(a, b, bracket)?;
    let fa = a.interpolate();
    let fb = b.interpolate();
    let diff = |g: f64| fa.eval(g) - fb.eval(g);
    let brackets = sign_change_brackets(&diff, lo, hi, 512);
    match brackets.len() {
        0 => Err(FssError::NoSignChange),
        1 => {
            let (blo, bhi) = brackets[0];
            let g_star = bisect(&diff, blo, bhi);
            Ok(CrossingPoint {
                l_small: a.l.min(b.l),
                l_large: a.l.max(b.l),
                g_star,
                value_at_crossing: fa.eval(g_star),
                bracket: enclose(g_star, blo, bhi),
            })
        }
        _ => Err(FssError::MultipleSignChanges { brackets }),
    }
}

/// Fit g*_L = g_c + a L^{-omega} to a crossing sequence by
/// Levenberg-Marquardt, seeded from a log-log fit of consecutive
/// differences. The abscissa is the pair midpoint.
pub fn extrapolate_crossings(points: &[CrossingPoint]) -> Result<PowerLawFit, FssError> {
    if points.len() < 4 {
        return Err(FssError::TooFewPoints {
            need: 4,
            got: points.len(),
        });
    }
    let mut data: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.effective_size(), p.g_star))
        .collect();
    data.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    if data.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(FssError::DegenerateAbscissas);
    }
    let ls: Vec<f64> = data.iter().map(|d| d.0).collect();
    let ys: Vec<f64> = data.iter().map(|d| d.1).collect();

    // initial omega from ln|g*_i - g*_{i+1}| ~ -(omega + 1) ln L
    let mut diff_pts = Vec::new();
    for w in data.windows(2) {
        let d = (w[0].1 - w[1].1).abs();
        if d > 0.0 {
            diff_pts.push((w[0].0.ln(), d.ln()));
        }
    }
    let mut omega = if diff_pts.len() >= 2 {
        let slope = simple_regression(&diff_pts).0;
        (-slope - 1.0).clamp(0.2, 8.0)
    } else {
        2.0
    };
    // linear least squares for (g_c, a) at fixed omega
    let (mut g_c, mut amp) = linear_gc_amp(&ls, &ys, omega);

    // Levenberg-Marquardt refinement
    let mut lambda = 1e-3;
    let mut ssr = sum_sq_residuals(&ls, &ys, g_c, amp, omega);
    for _ in 0..400 {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for (l, y) in ls.iter().zip(&ys) {
            let lw = l.powf(-omega);
            let r = y - (g_c + amp * lw);
            let jrow = Vector3::new(1.0, lw, -amp * l.ln() * lw);
            jtj += jrow * jrow.transpose();
            jtr += jrow * r;
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            return Err(FssError::FitDiverged);
        };
        let cand = (g_c + step[0], amp + step[1], omega + step[2]);
        if !cand.0.is_finite() || !cand.1.is_finite() || !cand.2.is_finite() {
            return Err(FssError::FitDiverged);
        }
        let cand_ssr = sum_sq_residuals(&ls, &ys, cand.0, cand.1, cand.2);
        if cand_ssr < ssr {
            let rel_gain = (ssr - cand_ssr) / ssr.max(1e-300);
            g_c = cand.0;
            amp = cand.1;
            omega = cand.2;
            ssr = cand_ssr;
            lambda = (lambda * 0.3).max(1e-12);
            if rel_gain < 1e-14 || step.norm() < 1e-14 {
                break;
            }
        } else {
            lambda *= 3.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    if !ssr.is_finite() {
        return Err(FssError::FitDiverged);
    }

    // covariance = sigma^2 (J^T J)^{-1} at the optimum
    let mut jtj = Matrix3::<f64>::zeros();
    for l in &ls {
        let lw = l.powf(-omega);
        let jrow = Vector3::new(1.0, lw, -amp * l.ln() * lw);
        jtj += jrow * jrow.transpose();
    }
    let dof = (ls.len() as f64 - 3.0).max(1.0);
    let sigma2 = ssr / dof;
    let covariance = jtj
        .try_inverse()
        .map(|inv| inv * sigma2)
        .unwrap_or_else(Matrix3::zeros);

    Ok(PowerLawFit {
        g_c,
        amplitude: amp,
        exponent: omega,
        covariance,
        residual_norm: ssr.sqrt(),
    })
}

fn sum_sq_residuals(ls: &[f64], ys: &[f64], g_c: f64, amp: f64, omega: f64) -> f64 {
    ls.iter()
        .zip(ys)
        .map(|(l, y)| {
            let r = y - (g_c + amp * l.powf(-omega));
            r * r
        })
        .sum()
}

fn linear_gc_amp(ls: &[f64], ys: &[f64], omega: f64) -> (f64, f64) {
    let n = ls.len() as f64;
    let xs: Vec<f64> = ls.iter().map(|l| l.powf(-omega)).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    if det.abs() < 1e-300 {
        return (sy / n, 0.0);
    }
    let amp = (n * sxy - sx * sy) / det;
    let g_c = (sy - amp * sx) / n;
    (g_c, amp)
}

fn simple_regression(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    (slope, (sy - slope * sx) / n)
}

/// Interpolant derivative at an interior point: order 1 differentiates the
/// monotone cubic, order 2 the natural cubic spline (the smoother
/// estimator; shape preservation matters less for curvature).
pub fn derivative(series: &ObservableSeries, order: usize, at: f64) -> Result<f64, FssError> {
    let lo = series.grid[0];
    let hi = *series.grid.last().unwrap();
    if at <= lo || at >= hi {
        return Err(FssError::BoundaryEvaluation(at));
    }
    match order {
        1 => Ok(series.interpolate().derivative(at)),
        2 => {
            let nc = NaturalCubic::new(series.grid.clone(), series.values.clone())?;
            Ok(nc.second_derivative(at))
        }
        other => Err(FssError::UnsupportedOrder(other)),
    }
}

/// Least-squares line y = slope ln L + intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
}

pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<LogSlopeFit, FssError> {
    if points.len() < 3 {
        return Err(FssError::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(l, y)| (l.ln(), y)).collect();
    let (slope, intercept, stderr) = regression_with_stderr(&pts)?;
    Ok(LogSlopeFit {
        slope,
        intercept,
        stderr,
    })
}

/// Least-squares power law y = amplitude * L^exponent (fit in log-log).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSlopeFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub stderr: f64,
}

pub fn fit_power_slope(points: &[(f64, f64)]) -> Result<PowerSlopeFit, FssError> {
    if points.len() < 3 {
        return Err(FssError::TooFewPoints {
            need: 3,
            got: points.len(),
        });
    }
    for &(_, y) in points {
        if !(y > 0.0) {
            return Err(FssError::NonPositiveValue(y));
        }
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(l, y)| (l.ln(), y.ln())).collect();
    let (slope, intercept, stderr) = regression_with_stderr(&pts)?;
    Ok(PowerSlopeFit {
        exponent: slope,
        amplitude: intercept.exp(),
        stderr,
    })
}

fn regression_with_stderr(pts: &[(f64, f64)]) -> Result<(f64, f64, f64), FssError> {
    let n = pts.len() as f64;
    let mean_x: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    if sxx < 1e-300 {
        return Err(FssError::DegenerateAbscissas);
    }
    let (slope, intercept) = simple_regression(pts);
    let ssr: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - slope * p.0 - intercept;
            r * r
        })
        .sum();
    let stderr = (ssr / (n - 2.0).max(1.0) / sxx).sqrt();
    Ok((slope, intercept, stderr))
}

/// Rescale a family of series to (L^{1/nu} (g - g_c), L^{rho/nu} O) and
/// measure how well they collapse: the mean squared spread between the
/// rescaled curves over their common window. Lower is better; exact
/// scaling-form data collapses to ~0.
pub fn scaling_collapse(
    series: &[ObservableSeries],
    g_c: f64,
    rho_over_nu: f64,
    nu: f64,
) -> Result<f64, FssError> {
    if series.len() < 3 {
        return Err(FssError::TooFewPoints {
            need: 3,
            got: series.len(),
        });
    }
    let mut curves = Vec::with_capacity(series.len());
    let mut window_lo = f64::MIN;
    let mut window_hi = f64::MAX;
    for s in series {
        if g_c <= s.grid[0] || g_c >= *s.grid.last().unwrap() {
            return Err(FssError::GcOutsideGrid(g_c));
        }
        let lf = s.l as f64;
        let xs: Vec<f64> = s.grid.iter().map(|&g| lf.powf(1.0 / nu) * (g - g_c)).collect();
        let ys: Vec<f64> = s.values.iter().map(|&o| lf.powf(rho_over_nu) * o).collect();
        window_lo = window_lo.max(xs[0]);
        window_hi = window_hi.min(*xs.last().unwrap());
        curves.push(MonotoneCubic::new(xs, ys)?);
    }
    if window_lo >= window_hi {
        return Err(FssError::NoOverlap);
    }
    let samples = 101;
    let mut total = 0.0;
    for i in 0..samples {
        let x = window_lo + (window_hi - window_lo) * i as f64 / (samples - 1) as f64;
        let vals: Vec<f64> = curves.iter().map(|c| c.eval(x)).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        total += vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
    }
    Ok(total / samples as f64)
}

/// Crossings of the scaled gaps L Delta_L(g): all roots of
/// L_A Delta_A - L_B Delta_B inside the bracket.
///
/// Gaps are even around the transition, so up to two roots are expected;
/// more than two is reported as an error.
pub fn prg_crossing(
    gap_a: &ObservableSeries,
    gap_b: &ObservableSeries,
    bracket: (f64, f64),
) -> Result<Vec<CrossingPoint>, FssError> {
    if gap_a.l == gap_b.l {
        return Err(FssError::SameLength(gap_a.l));
    }
    for s in [gap_a, gap_b] {
        if let Some(&bad) = s.values.iter().find(|&&v| v < 0.0) {
            return Err(FssError::NegativeGap(bad));
        }
    }
    let (lo, hi) = common_bracket(gap_a, gap_b, bracket)?;
    let fa = gap_a.interpolate();
    let fb = gap_b.interpolate();
    let la = gap_a.l as f64;
    let lb = gap_b.l as f64;
    let diff = |g: f64| la * fa.eval(g) - lb * fb.eval(g);
    let brackets = sign_change_brackets(&diff, lo, hi, 512);
    if brackets.is_empty() {
        return Err(FssError::NoSignChange);
    }
    if brackets.len() > 2 {
        return Err(FssError::TooManyRoots(brackets.len()));
    }
    Ok(brackets
        .into_iter()
        .map(|(blo, bhi)| {
            let g_star = bisect(&diff, blo, bhi);
            CrossingPoint {
                l_small: gap_a.l.min(gap_b.l),
                l_large: gap_a.l.max(gap_b.l),
                g_star,
                value_at_crossing: la * fa.eval(g_star),
                bracket: enclose(g_star, blo, bhi),
            }
        })
        .collect())
}
