//! Central-cut ellipsoid method for maximizing a concave function over a
//! convex set given by a separation oracle. Used on the low-dimensional
//! state spaces of the distance computations.

use crate::scalar::Real;

pub(crate) enum Oracle<T> {
    /// Point is infeasible; every feasible y has a·y ≤ a·x.
    Cut(Vec<T>),
    /// Feasible, with value and a supergradient.
    Value(T, Vec<T>),
}

pub(crate) struct EllipsoidMax<T> {
    pub best_x: Option<Vec<T>>,
    pub lower: T,
    /// max over all ellipsoids of the supergradient bound; ≥ the true optimum.
    pub upper: T,
    pub iterations: usize,
}

pub(crate) fn maximize<T: Real>(
    x0: Vec<T>,
    radius: T,
    tol: T,
    max_iter: usize,
    mut oracle: impl FnMut(&[T]) -> Oracle<T>,
) -> EllipsoidMax<T> {
    let n = x0.len();
    let nf = T::count(n);
    let mut x = x0;
    // Ellipsoid {x + B u : |u| ≤ 1}; keeping the factor B instead of P = BBᵀ
    // avoids the loss of definiteness that plain updates suffer after many
    // nearly parallel cuts.
    let mut b = vec![T::zero(); n * n];
    for i in 0..n {
        b[i * n + i] = radius;
    }
    let mut out = EllipsoidMax {
        best_x: None,
        lower: T::neg_infinity(),
        upper: T::infinity(),
        iterations: 0,
    };
    let expand = nf / (nf * nf - T::one()).sqrt();
    let squeeze = T::one() - ((nf - T::one()) / (nf + T::one())).sqrt();
    let step = T::one() / (nf + T::one());
    for it in 0..max_iter {
        out.iterations = it + 1;
        // a: the cut keeps {y : a·(y − x) ≤ 0}.
        let a = match oracle(&x) {
            Oracle::Cut(a) => a,
            Oracle::Value(v, h) => {
                if v > out.lower {
                    out.lower = v;
                    out.best_x = Some(x.clone());
                }
                let spread = norm(&tmatvec(&b, &h, n));
                out.upper = out.upper.min(v + spread);
                if out.upper - out.lower <= tol {
                    break;
                }
                h.iter().map(|&z| -z).collect()
            }
        };
        let bta = tmatvec(&b, &a, n);
        let len = norm(&bta);
        if !(len > T::zero()) || !len.is_finite() {
            break;
        }
        let gh: Vec<T> = bta.iter().map(|&z| z / len).collect();
        let bg = matvec(&b, &gh, n);
        for i in 0..n {
            x[i] -= step * bg[i];
        }
        // B ← expand · B (I − squeeze ĝĝᵀ).
        for i in 0..n {
            for j in 0..n {
                b[i * n + j] = expand * (b[i * n + j] - squeeze * bg[i] * gh[j]);
            }
        }
    }
    out
}

/// Bᵀv.
fn tmatvec<T: Real>(b: &[T], v: &[T], n: usize) -> Vec<T> {
    (0..n)
        .map(|j| (0..n).fold(T::zero(), |acc, i| acc + b[i * n + j] * v[i]))
        .collect()
}

fn norm<T: Real>(v: &[T]) -> T {
    dot(v, v).sqrt()
}

fn matvec<T: Real>(p: &[T], v: &[T], n: usize) -> Vec<T> {
    (0..n)
        .map(|i| (0..n).fold(T::zero(), |acc, j| acc + p[i * n + j] * v[j]))
        .collect()
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concave_quadratic_on_disc() {
        // max −(x−0.3)² − (y+0.2)² − z² over the unit ball.
        let r = maximize(vec![0.0f64; 3], 1.0, 1e-12, 5000, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 > 1.0 {
                return Oracle::Cut(x.to_vec());
            }
            let v = -(x[0] - 0.3).powi(2) - (x[1] + 0.2).powi(2) - x[2].powi(2);
            Oracle::Value(v, vec![-2.0 * (x[0] - 0.3), -2.0 * (x[1] + 0.2), -2.0 * x[2]])
        });
        assert!(r.lower > -1e-11 && r.upper >= r.lower);
        let x = r.best_x.unwrap();
        assert!((x[0] - 0.3).abs() < 1e-5 && (x[1] + 0.2).abs() < 1e-5);
    }

    #[test]
    fn active_constraint() {
        // max x + y on x² + y² ≤ 1 (n = 2 keeps the update well defined).
        let r = maximize(vec![0.0f64; 2], 1.5, 1e-10, 5000, |x| {
            if x[0] * x[0] + x[1] * x[1] > 1.0 {
                return Oracle::Cut(x.to_vec());
            }
            Oracle::Value(x[0] + x[1], vec![1.0, 1.0])
        });
        assert!((r.lower - 2f64.sqrt()).abs() < 1e-8, "{}", r.lower);
        assert!(r.upper >= 2f64.sqrt() - 1e-12);
    }
}
