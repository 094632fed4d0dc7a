//! The transform pair F[f](x) = sup_t f(xt)/(t+1), G[f](x) = inf_t f(xt)(1+1/t)
//! on sampled nonnegative functions, and the least concave majorant.
//!
//! Samples are joined by straight lines and continued past the ends with the
//! end slopes (the right slope clamped to be nonnegative, the left extension
//! clamped at zero). Both transforms of such a piecewise-linear function have
//! closed forms, so nothing here depends on a t-grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction<T> {
    x: Vec<T>,
    f: Vec<T>,
}

impl<T: Real> SampledFunction<T> {
    pub fn new(x: Vec<T>, f: Vec<T>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if x.len() != f.len() {
            return Err(Error::DimMismatch(format!(
                "{} grid points but {} values",
                x.len(),
                f.len()
            )));
        }
        if x.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(x[0] > T::zero()) || x.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "grid must be positive and strictly ascending".into(),
            ));
        }
        if f.iter().any(|&v| v < T::zero()) {
            return Err(Error::InvalidGrid("sampled values must be nonnegative".into()));
        }
        Ok(Self { x, f })
    }

    pub fn from_fn(x: Vec<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let v = x.iter().map(|&t| f(t)).collect();
        Self::new(x, v)
    }

    pub fn grid(&self) -> &[T] {
        &self.x
    }

    pub fn values(&self) -> &[T] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn left_slope(&self) -> T {
        if self.len() < 2 {
            return T::zero();
        }
        ((self.f[1] - self.f[0]) / (self.x[1] - self.x[0])).max(T::zero())
    }

    fn right_slope(&self) -> T {
        let n = self.len();
        if n < 2 {
            return T::zero();
        }
        ((self.f[n - 1] - self.f[n - 2]) / (self.x[n - 1] - self.x[n - 2])).max(T::zero())
    }

    /// The extended piecewise-linear function at y > 0.
    pub fn eval(&self, y: T) -> T {
        let n = self.len();
        if y <= self.x[0] {
            return (self.f[0] - self.left_slope() * (self.x[0] - y)).max(T::zero());
        }
        if y >= self.x[n - 1] {
            return self.f[n - 1] + self.right_slope() * (y - self.x[n - 1]);
        }
        let k = self.x.partition_point(|&v| v <= y);
        let (x0, x1) = (self.x[k - 1], self.x[k]);
        let w = (y - x0) / (x1 - x0);
        self.f[k - 1] * (T::one() - w) + self.f[k] * w
    }

    /// lim_{y→0+} of the extension.
    fn at_zero(&self) -> T {
        (self.f[0] - self.left_slope() * self.x[0]).max(T::zero())
    }

    /// Breakpoints of the extension on (0, ∞), with values.
    fn vertices(&self) -> Vec<(T, T)> {
        let mut v: Vec<(T, T)> = self.x.iter().copied().zip(self.f.iter().copied()).collect();
        let s = self.left_slope();
        if s > T::zero() && self.f[0] < s * self.x[0] {
            v.insert(0, (self.x[0] - self.f[0] / s, T::zero()));
        }
        v
    }
}

/// F[f](x) = sup_{t>0} f(xt)/(t+1).
///
/// On each linear piece y ↦ f(y)·x/(x+y) is monotone, so the supremum sits at a
/// breakpoint or at one of the limits t → 0 (value f(0+)) and t → ∞ (value x·f′(∞)).
pub fn transform_f<T: Real>(f: &SampledFunction<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::BadParams("transform point must be positive".into()));
    }
    let mut best = f.at_zero().max(x * f.right_slope());
    for (y, v) in f.vertices() {
        best = best.max(v * x / (x + y));
    }
    Ok(best)
}

/// G[f](x) = inf_{t>0} f(xt)(1 + 1/t).
///
/// On a piece f(y) = α + βy the objective (α + βy)(x + y)/y is convex in y with
/// stationary point √(αx/β); breakpoints, those points and the limits give the
/// infimum exactly.
pub fn transform_g<T: Real>(f: &SampledFunction<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::BadParams("transform point must be positive".into()));
    }
    let obj = |y: T| f.eval(y) * (x + y) / y;
    let verts = f.vertices();
    let mut best = T::infinity();
    for &(y, _) in &verts {
        best = best.min(obj(y));
    }
    // Pieces: (0, v0], [v_i, v_{i+1}], [v_last, ∞).
    let mut pieces: Vec<(T, T)> = Vec::with_capacity(verts.len() + 1);
    pieces.push((T::zero(), verts[0].0));
    for w in verts.windows(2) {
        pieces.push((w[0].0, w[1].0));
    }
    pieces.push((verts[verts.len() - 1].0, T::infinity()));
    for (lo, hi) in pieces {
        let (beta, alpha) = if hi.is_infinite() {
            let s = f.right_slope();
            (s, f.eval(lo) - s * lo)
        } else if lo == T::zero() {
            let s = (f.eval(hi) - f.at_zero()) / hi;
            (s, f.at_zero())
        } else {
            let s = (f.eval(hi) - f.eval(lo)) / (hi - lo);
            (s, f.eval(lo) - s * lo)
        };
        if alpha > T::zero() && beta > T::zero() {
            let y = (alpha * x / beta).sqrt();
            if y > lo && y < hi {
                best = best.min(obj(y));
            }
        }
        // Limits at the open ends.
        if lo == T::zero() && alpha == T::zero() {
            best = best.min(beta * x);
        }
        if hi.is_infinite() && beta == T::zero() {
            best = best.min(alpha);
        }
    }
    Ok(best.max(T::zero()))
}

/// G[F[f]](x) with F evaluated exactly rather than resampled.
///
/// F[f](y) is the maximum of terms v·y/(y+y_v) (plus f(0+) and y·f′(∞)), so
/// y ↦ F[f](y)(x+y)/y is a maximum of monotone functions and hence
/// quasi-convex; a golden-section search in log y finds its infimum, and the
/// two limits are checked separately.
pub fn round_trip<T: Real>(f: &SampledFunction<T>, x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::BadParams("transform point must be positive".into()));
    }
    let verts = f.vertices();
    let f0 = f.at_zero();
    let sr = f.right_slope();
    let obj = |y: T| -> T {
        let mut m = f0 * (x + y) / y;
        m = m.max(sr * (x + y));
        for &(yv, v) in &verts {
            m = m.max(v * (x + y) / (y + yv));
        }
        m
    };
    let (xlo, xhi) = (f.x[0], f.x[f.len() - 1]);
    let lo = (xlo.min(x) * T::lit(1e-8)).ln();
    let hi = (xhi.max(x) * T::lit(1e8)).ln();
    let (_, mut best) = golden_min(|u: T| obj(u.exp()), lo, hi, 200);
    // y → ∞: every term tends to its coefficient (f′(∞) > 0 diverges).
    if sr == T::zero() {
        let lim = verts.iter().map(|p| p.1).fold(f0, T::max);
        best = best.min(lim);
    }
    // y → 0: diverges unless f(0+) = 0.
    if f0 == T::zero() {
        let mut lim = sr * x;
        for &(yv, v) in &verts {
            lim = lim.max(v * x / yv);
        }
        best = best.min(lim);
    }
    Ok(best)
}

/// Least concave majorant of the samples, evaluated on the same grid.
pub fn concave_hull<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let n = f.len();
    let mut hull: Vec<usize> = Vec::with_capacity(n);
    for k in 0..n {
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // Drop j when it lies on or below the chord i → k.
            let cross = (f.x[j] - f.x[i]) * (f.f[k] - f.f[i]) - (f.f[j] - f.f[i]) * (f.x[k] - f.x[i]);
            if cross >= T::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    let mut out = Vec::with_capacity(n);
    let mut seg = 0;
    for k in 0..n {
        while seg + 1 < hull.len() - 1 && hull[seg + 1] <= k {
            seg += 1;
        }
        let v = if hull.len() == 1 {
            f.f[hull[0]]
        } else {
            let (i, j) = (hull[seg], hull[seg + 1]);
            let w = (f.x[k] - f.x[i]) / (f.x[j] - f.x[i]);
            f.f[i] + (f.f[j] - f.f[i]) * w
        };
        out.push(v.max(f.f[k]));
    }
    SampledFunction::new(f.x.clone(), out)
}

/// F applied at every grid point.
pub fn transform_f_sampled<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let v =
        f.x.iter()
            .map(|&x| transform_f(f, x))
            .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(f.x.clone(), v)
}

/// G applied at every grid point.
pub fn transform_g_sampled<T: Real>(f: &SampledFunction<T>) -> Result<SampledFunction<T>> {
    let v =
        f.x.iter()
            .map(|&x| transform_g(f, x))
            .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(f.x.clone(), v)
}

/// Golden-section minimum of a unimodal function on [lo, hi].
pub fn golden_min<T: Real>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, iters: usize) -> (T, T) {
    let r = T::lit(0.381_966_011_250_105_1);
    let mut x1 = lo + r * (hi - lo);
    let mut x2 = hi - r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Optimizes `f` over t ∈ [lo, hi]: a log-spaced scan (`per_decade` points), then
/// golden-section refinement in log t between the neighbours of the best point.
/// Returns (t, f(t)).
pub fn log_scan_optimize<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    lo: T,
    hi: T,
    per_decade: usize,
    maximize: bool,
    refine_iters: usize,
) -> Result<(T, T)> {
    let grid = crate::enorms::log_grid(lo, hi, per_decade)?;
    let sign = if maximize { -T::one() } else { T::one() };
    let mut vals = Vec::with_capacity(grid.len());
    for &t in &grid {
        vals.push(sign * f(t)?);
    }
    let k = (0..vals.len())
        .min_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(Error::EmptyGrid)?;
    let a = grid[k.saturating_sub(1)].ln();
    let b = grid[(k + 1).min(grid.len() - 1)].ln();
    let mut err = None;
    let (u, v) = golden_min(
        |u: T| match f(u.exp()) {
            Ok(v) => sign * v,
            Err(e) => {
                err.get_or_insert(e);
                T::infinity()
            }
        },
        a,
        b,
        refine_iters,
    );
    if let Some(e) = err {
        return Err(e);
    }
    if v < vals[k] {
        Ok((u.exp(), sign * v))
    } else {
        Ok((grid[k], sign * vals[k]))
    }
}

/// Random test profile on a log grid over [0.01, 100]: f_k = e(x_k)·u_k with
/// e = c₁ + c₂√x concave increasing and u_k ∈ [0.3, 1], pinned to 1 on the two
/// outermost points at each end so the hull of the extension is the point hull.
pub fn random_profile<T: Real, R: rand::Rng + ?Sized>(
    points: usize,
    rng: &mut R,
) -> Result<SampledFunction<T>> {
    if points < 4 {
        return Err(Error::InvalidGrid("need at least 4 points".into()));
    }
    let x = crate::enorms::log_points(T::lit(0.01), T::lit(100.0), points)?;
    let c1 = T::lit(rng.random_range(0.1..2.0));
    let c2 = T::lit(rng.random_range(0.1..2.0));
    let f = x
        .iter()
        .enumerate()
        .map(|(k, &xk)| {
            let u = if k < 2 || k + 2 >= points {
                T::one()
            } else {
                T::lit(rng.random_range(0.3..=1.0))
            };
            (c1 + c2 * xk.sqrt()) * u
        })
        .collect();
    SampledFunction::new(x, f)
}
