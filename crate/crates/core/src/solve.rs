//! Bracketed one-dimensional solvers.

use crate::Scalar;

/// Result of a bracketed search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracketed<T> {
    pub x: T,
    pub iterations: usize,
}

/// Bisection for the root of `f` on `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must not share a sign. Stops when the bracket width
/// falls below `rel_tol * |hi|` (floored at a few ulps of `T`) or after
/// `max_iter` halvings. Returns `None` if the endpoints do not bracket a root.
pub fn bisect<T, F>(f: F, mut lo: T, mut hi: T, rel_tol: f64, max_iter: usize) -> Option<Bracketed<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    let tol = T::rel_floor(rel_tol);
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Some(Bracketed { x: lo, iterations: 0 });
    }
    if f_hi == T::zero() {
        return Some(Bracketed { x: hi, iterations: 0 });
    }
    if f_lo.is_sign_positive() == f_hi.is_sign_positive() {
        return None;
    }
    let lo_negative = f_lo < T::zero();
    let two = T::lit(2.0);

    let mut iterations = 0;
    while iterations < max_iter {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        iterations += 1;
        if f_mid == T::zero() {
            return Some(Bracketed { x: mid, iterations });
        }
        if (f_mid < T::zero()) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= tol * hi.abs().max(lo.abs()) {
            break;
        }
    }
    Some(Bracketed {
        x: lo + (hi - lo) / two,
        iterations,
    })
}

/// Golden-section minimization of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `abs_tol` or after `max_iter`
/// reductions; returns the midpoint of the final bracket.
pub fn golden_section_minimize<T, F>(f: F, mut a: T, mut b: T, abs_tol: T, max_iter: usize) -> Bracketed<T>
where
    T: Scalar,
    F: Fn(T) -> T,
{
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    // 1/phi
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);

    let mut iterations = 0;
    while b - a > abs_tol && iterations < max_iter {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        iterations += 1;
    }
    Bracketed {
        x: a + (b - a) / T::lit(2.0),
        iterations,
    }
}
