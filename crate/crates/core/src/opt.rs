//! Scalar minimization helpers: bisection bracketing and golden-section search.

/// Locate a sign change of `f` between `stable` (where `f < 0`) and
/// `unstable` (where `f >= 0`) to within `x_tol`.
pub fn bisect_boundary(
    f: impl Fn(f64) -> f64,
    mut stable: f64,
    mut unstable: f64,
    x_tol: f64,
) -> f64 {
    debug_assert!(f(stable) < 0.0);
    for _ in 0..200 {
        if (stable - unstable).abs() <= x_tol {
            break;
        }
        let mid = 0.5 * (stable + unstable);
        if f(mid) < 0.0 {
            stable = mid;
        } else {
            unstable = mid;
        }
    }
    stable
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
///
/// Infeasible evaluations may return `f64::INFINITY`; they are simply
/// treated as worse. Returns `(x_min, f_min)`.
pub fn golden_section_min(
    f: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    if b < a {
        std::mem::swap(&mut a, &mut b);
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 1.7) * (x - 1.7) + 0.25, -4.0, 6.0, 1e-10);
        assert!((x - 1.7).abs() < 1e-8);
        assert!((fx - 0.25).abs() < 1e-12);
    }

    #[test]
    fn infinite_walls_are_tolerated() {
        let f = |x: f64| {
            if !(0.0..=1.0).contains(&x) {
                f64::INFINITY
            } else {
                (x - 0.8) * (x - 0.8)
            }
        };
        let (x, _) = golden_section_min(f, -0.5, 1.5, 1e-10);
        assert!((x - 0.8).abs() < 1e-8);
    }

    #[test]
    fn boundary_location() {
        let edge = bisect_boundary(|x| x - 2.5, 0.0, 10.0, 1e-12);
        assert!((edge - 2.5).abs() < 1e-10);
    }
}
