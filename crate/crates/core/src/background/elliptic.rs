//! Jacobi elliptic functions by the arithmetic-geometric mean (descending
//! Landen transformation). The second argument is the modulus `κ`; the
//! parameter is `m = κ²`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const MAX_STEPS: usize = 40;

fn check_modulus(kappa: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&kappa) {
        return Err(Error::invalid(format!("elliptic modulus {kappa} outside [0, 1]")));
    }
    Ok(kappa * kappa)
}

/// `(sn, cn, dn)(u, κ)`.
pub fn jacobi_sn_cn_dn(u: f64, kappa: f64) -> Result<(f64, f64, f64)> {
    let m = check_modulus(kappa)?;
    Ok(sn_cn_dn_param(u, m))
}

/// `(cn, dn)(u, κ)`.
pub fn jacobi_cn_dn(u: f64, kappa: f64) -> Result<(f64, f64)> {
    let (_, cn, dn) = jacobi_sn_cn_dn(u, kappa)?;
    Ok((cn, dn))
}

/// Same as [`jacobi_sn_cn_dn`] but takes the parameter `m = κ²` and skips
/// validation.
pub(crate) fn sn_cn_dn_param(u: f64, m: f64) -> (f64, f64, f64) {
    if m == 0.0 {
        let (s, c) = u.sin_cos();
        return (s, c, 1.0);
    }
    if m == 1.0 {
        let sech = 1.0 / u.cosh();
        return (u.tanh(), sech, sech);
    }
    let mut a = [0.0f64; MAX_STEPS + 1];
    let mut c = [0.0f64; MAX_STEPS + 1];
    a[0] = 1.0;
    let mut b = (1.0 - m).sqrt();
    c[0] = m.sqrt();
    let mut n = 0;
    while c[n].abs() > f64::EPSILON * a[n] && n < MAX_STEPS {
        let an = a[n];
        a[n + 1] = 0.5 * (an + b);
        c[n + 1] = 0.5 * (an - b);
        b = (an * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for k in (1..=n).rev() {
        phi = 0.5 * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let (s, co) = phi.sin_cos();
    // dn² = (1-m) + m cn² has no cancellation, unlike 1 - m sn²
    let dn = ((1.0 - m) + m * co * co).sqrt();
    (s, co, dn)
}

/// Complete elliptic integral of the first kind `K(κ)`.
pub fn complete_k(kappa: f64) -> Result<f64> {
    let m = check_modulus(kappa)?;
    if m == 1.0 {
        return Ok(f64::INFINITY);
    }
    let mut a = 1.0f64;
    let mut b = (1.0 - m).sqrt();
    for _ in 0..MAX_STEPS {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(FRAC_PI_2 / a)
}
