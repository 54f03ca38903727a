use crate::error::{Error, Result};
use crate::scalar::Real;

/// Refines a sign change of `f` on `[lo, hi]` by bisection until the bracket
/// is narrower than `tol`. `f_lo` and `f_hi` are the already-known endpoint
/// values and must have opposite signs.
pub fn bisect<T, F>(mut f: F, mut lo: T, mut hi: T, mut f_lo: T, f_hi: T, tol: T) -> Result<T>
where
    T: Real,
    F: FnMut(T) -> T,
{
    if !(lo < hi) {
        return Err(Error::Bracket(format!("empty bracket [{lo}, {hi}]")));
    }
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}] ({f_lo}, {f_hi})"
        )));
    }
    let two = T::lit(2.0);
    for _ in 0..256 {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            // bracket already at adjacent floats
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cosine_root() {
        let r = bisect(f64::cos, 1.0, 2.0, 1f64.cos(), 2f64.cos(), 1e-14).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn rejects_same_sign_bracket() {
        let err = bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 2.0, 2.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Bracket(_)));
    }

    #[test]
    fn exact_zero_at_endpoint() {
        assert_eq!(bisect(|x: f64| x, 0.0, 1.0, 0.0, 1.0, 1e-12).unwrap(), 0.0);
    }
}
