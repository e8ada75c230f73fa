//! One-dimensional search primitives shared by the solvers.

/// 1/φ for the golden ratio φ.
const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Stops once the bracket is narrower than `tol` (absolute) or after `max_iter`
/// shrinks. Returns `(x_min, f_min)` for the best point evaluated.
pub(crate) fn golden_section<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa <= fb { (a, fa) } else { (b, fb) };

    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Bisection for the boundary of a monotone predicate on `[lo, hi]`.
///
/// Requires `pred(lo) == false` and `pred(hi) == true`; returns `(lo, hi)` after
/// shrinking to adjacent floating point numbers or `max_iter` halvings.
pub(crate) fn bisect<P>(mut pred: P, mut lo: f64, mut hi: f64, max_iter: usize) -> (f64, f64)
where
    P: FnMut(f64) -> bool,
{
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Minimizes a unimodal function of `ln t` over `[ln t_lo, ln t_hi]` by a coarse
/// scan followed by golden-section refinement between the neighbours of the best
/// scan point. Returns `(t_min, f_min)`.
pub(crate) fn log_scan_golden<F>(
    mut f: F,
    t_lo: f64,
    t_hi: f64,
    points: usize,
    tol: f64,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (s_lo, s_hi) = (t_lo.ln(), t_hi.ln());
    let step = (s_hi - s_lo) / (points - 1) as f64;
    let mut best = (0usize, f64::INFINITY);
    for k in 0..points {
        let v = f((s_lo + step * k as f64).exp());
        if v < best.1 {
            best = (k, v);
        }
    }
    let a = s_lo + step * best.0.saturating_sub(1) as f64;
    let b = s_lo + step * (best.0 + 1).min(points - 1) as f64;
    let (s, v) = golden_section(|s| f(s.exp()), a, b, tol, 200);
    if v <= best.1 {
        (s.exp(), v)
    } else {
        ((s_lo + step * best.0 as f64).exp(), best.1)
    }
}
