//! Fourier multipliers and the pseudoproduct.

use num_complex::Complex64;

use super::cutoff::{eta, phi_n};
use super::fft;
use super::field::{PhysicalField, SpectralField};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn transform(f: &PhysicalField) -> SpectralField {
    f.transform()
}

pub fn inverse_transform(f: &SpectralField) -> PhysicalField {
    f.inverse()
}

/// Multiplies bin `j` by `(iξ_j)^order`; odd orders zero the Nyquist bin.
pub fn spatial_derivative(f: &SpectralField, order: u32) -> SpectralField {
    let nyq = f.grid().nyquist_bin();
    let mut out = f.multiplied(|xi| (I * xi).powu(order));
    if order % 2 == 1 {
        out.coeffs_mut()[nyq] = Complex64::new(0.0, 0.0);
    }
    out
}

/// `J^s`: multiplier `(1+ξ²)^{s/2}`.
pub fn bessel_potential(f: &SpectralField, s: f64) -> SpectralField {
    f.multiplied_real(|xi| (1.0 + xi * xi).powf(0.5 * s))
}

/// `D^s`: multiplier `|ξ|^s`. The zero mode is kept for `s = 0` and
/// annihilated otherwise.
pub fn riesz_potential(f: &SpectralField, s: f64) -> SpectralField {
    f.multiplied_real(|xi| {
        if s == 0.0 {
            1.0
        } else if xi == 0.0 {
            0.0
        } else {
            xi.abs().powf(s)
        }
    })
}

/// `P_N`: multiplier `φ_N(ξ)`.
pub fn lp_project(f: &SpectralField, n: f64) -> SpectralField {
    f.multiplied_real(|xi| phi_n(n, xi))
}

/// `P_{≤N} = Σ_{M≤N} P_M`, which telescopes to the multiplier `η(ξ/N)`.
pub fn lp_project_below(f: &SpectralField, n: f64) -> SpectralField {
    f.multiplied_real(|xi| eta(xi / n))
}

/// Airy group `U(t)`: multiplier `e^{itξ³}`, the exact solution operator of
/// `∂_t u + ∂_x³ u = 0`.
pub fn airy_propagate(f: &SpectralField, t: f64) -> SpectralField {
    f.multiplied(|xi| Complex64::from_polar(1.0, t * xi * xi * xi))
}

/// `W_μ(t) = exp((μ∂_x² - ∂_x³)t)`: multiplier `e^{(iξ³ - μξ²)t}`.
pub fn dissipative_propagate(f: &SpectralField, t: f64, mu: f64) -> Result<SpectralField> {
    if mu < 0.0 {
        return Err(Error::invalid(format!("viscosity must be >= 0, got {mu}")));
    }
    if mu > 0.0 && t < 0.0 {
        return Err(Error::invalid("dissipative group runs forward only"));
    }
    if mu == 0.0 {
        return Ok(airy_propagate(f, t));
    }
    Ok(f.multiplied(|xi| Complex64::from_polar((-mu * xi * xi * t).exp(), t * xi * xi * xi)))
}

/// Pseudoproduct `Π_χ(f, g)`: bin `ξ` receives `Σ_{ξ₁} f̂(ξ₁) ĝ(ξ-ξ₁) χ(ξ, ξ₁)`.
///
/// The convolution is linear (no wrap-around), which is the same as
/// zero-padding to length `2n` and truncating back; Nyquist bins are left
/// out. In units of the continuous transform `(1/2π)∫u e^{-iξx}dx` this is
/// the Riemann sum of the defining integral with weight `π/L`.
pub fn pseudoproduct(
    f: &SpectralField,
    g: &SpectralField,
    chi: impl Fn(f64, f64) -> Complex64,
) -> Result<SpectralField> {
    let grid = *f.grid();
    grid.same_as(g.grid())?;
    let n = grid.n();
    let half = (n / 2) as i64;
    let dxi = grid.fundamental();
    let bin = |j: i64| if j >= 0 { j as usize } else { (n as i64 + j) as usize };
    let fc = f.coeffs();
    let gc = g.coeffs();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for j in (1 - half)..half {
        let xi = dxi * j as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        let lo = (1 - half).max(j - half + 1);
        let hi = (half - 1).min(j + half - 1);
        for j1 in lo..=hi {
            let a = fc[bin(j1)];
            let b = gc[bin(j - j1)];
            if a == Complex64::new(0.0, 0.0) || b == Complex64::new(0.0, 0.0) {
                continue;
            }
            acc += a * b * chi(xi, dxi * j1 as f64);
        }
        out[bin(j)] = acc;
    }
    Ok(SpectralField::from_raw(grid, out))
}

/// Dealiased product: both factors are zero-padded to `2n`, multiplied
/// pointwise and truncated back to the grid.
pub fn dealiased_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let grid = *f.grid();
    grid.same_as(g.grid())?;
    let m = 2 * grid.n();
    let a = fft::inverse_real(&fft::resample(f.coeffs(), m));
    let b = fft::inverse_real(&fft::resample(g.coeffs(), m));
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(SpectralField::from_raw(
        grid,
        fft::resample(&fft::forward_real(&prod), grid.n()),
    ))
}

/// `∫ f g dx` for real fields given by their coefficients.
pub fn pairing(f: &SpectralField, g: &SpectralField) -> f64 {
    let grid = f.grid();
    let n = grid.n();
    let fc = f.coeffs();
    let gc = g.coeffs();
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, a) in fc.iter().enumerate() {
        acc += a * gc[(n - k) % n];
    }
    grid.length() * acc.re
}

#[cfg(test)]
mod tests {
    use super::*;

    type Op = Box<dyn Fn(&SpectralField) -> SpectralField>;
    use crate::spectral::cutoff::DyadicBand;
    use crate::spectral::grid::Grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(grid: Grid, seed: u64, band: f64) -> PhysicalField {
        // smooth random field: a few random Gaussian bumps, band-limited by
        // a multiplier so Nyquist content is zero
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = grid.half_length();
        let bumps: Vec<(f64, f64, f64)> = (0..6)
            .map(|_| {
                (
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-0.5 * l..0.5 * l),
                    rng.random_range(0.5..2.0),
                )
            })
            .collect();
        let raw = PhysicalField::from_fn(grid, |x| {
            bumps.iter().map(|&(a, c, w)| a * (-((x - c) / w).powi(2)).exp()).sum()
        });
        raw.transform().multiplied_real(|xi| eta(xi / band)).inverse()
    }

    fn grid() -> Grid {
        Grid::new(20.0, 256).unwrap()
    }

    #[test]
    fn constant_and_cosine_coefficients() {
        let g = grid();
        let c = PhysicalField::from_fn(g, |_| 2.5).transform();
        assert!((c.coeffs()[0] - Complex64::new(2.5, 0.0)).norm() < 1e-14);
        assert!(c.coeffs()[1..].iter().all(|z| z.norm() < 1e-14));
        let xi1 = g.wavenumber(3);
        let c = PhysicalField::from_fn(g, |x| (xi1 * x).cos()).transform();
        assert!((c.coeffs()[3] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((c.coeffs()[g.n() - 3] - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn round_trip_and_parseval() {
        let g = Grid::new(7.0, 512).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..512).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = PhysicalField::new(g, vals.clone()).unwrap();
        let back = f.transform().inverse();
        let err = back
            .values()
            .iter()
            .zip(&vals)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-12);
        let p = f.transform().l2_norm_sq();
        let q = f.l2_norm().powi(2);
        assert!(((p - q) / q).abs() <= 1e-12);
        assert!(f.transform().hermitian_defect() < 1e-15);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid();
        let xi1 = g.wavenumber(4);
        let f = PhysicalField::from_fn(g, |x| (xi1 * x).sin()).transform();
        let d = spatial_derivative(&f, 1).inverse();
        for (j, v) in d.values().iter().enumerate() {
            assert!((v - xi1 * (xi1 * g.x(j)).cos()).abs() < 1e-12);
        }
        let d3 = spatial_derivative(&f, 3);
        let expect = f.coeffs()[4] * (I * xi1).powu(3);
        assert!((d3.coeffs()[4] - expect).norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_sixth_order_differences() {
        // 6th-order central differences on a fine grid as the oracle
        let g = Grid::new(10.0, 256).unwrap();
        let gauss = |x: f64| (-x * x).exp();
        let d = spatial_derivative(&PhysicalField::from_fn(g, gauss).transform(), 1).inverse();
        let h = 1e-3;
        for j in (0..256).step_by(9) {
            let x = g.x(j);
            let fd = (-gauss(x - 3.0 * h) + 9.0 * gauss(x - 2.0 * h) - 45.0 * gauss(x - h) + 45.0 * gauss(x + h)
                - 9.0 * gauss(x + 2.0 * h)
                + gauss(x + 3.0 * h))
                / (60.0 * h);
            let scale = 2.0f64.sqrt() * (-0.5f64).exp();
            assert!((d.values()[j] - fd).abs() <= 1e-8 * scale, "x={x}");
        }
    }

    #[test]
    fn potentials() {
        let g = grid();
        let f = random_field(g, 3, 4.0).transform();
        let id = bessel_potential(&f, 0.0);
        assert_eq!(id, f);
        let back = bessel_potential(&bessel_potential(&f, 1.7), -1.7);
        let err = back
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-12);
        let xi1 = g.wavenumber(5);
        let mode = PhysicalField::from_fn(g, |x| (xi1 * x).cos()).transform();
        let j = bessel_potential(&mode, 2.0);
        assert!((j.coeffs()[5].re - 0.5 * (1.0 + xi1 * xi1)).abs() < 1e-12);
        let r = riesz_potential(&f, -0.5);
        assert_eq!(r.coeffs()[0], Complex64::new(0.0, 0.0));
        let r = riesz_potential(&f, 0.0);
        assert_eq!(r, f);
    }

    #[test]
    fn lp_projection_examples() {
        let g = Grid::new(16.0 * std::f64::consts::PI, 1024).unwrap();
        // ξ_j = j/16, so N = 2 sits on bin 32
        let xi1 = g.wavenumber(32);
        assert_eq!(xi1, 2.0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); g.n()];
        coeffs[32] = Complex64::new(0.5, 0.0);
        coeffs[g.n() - 32] = Complex64::new(0.5, 0.0);
        let mode = SpectralField::new(g, coeffs).unwrap();
        assert_eq!(lp_project(&mode, 2.0), mode);
        let killed = lp_project(&mode, 0.5);
        assert!(killed.coeffs().iter().all(|c| c.norm() == 0.0));
        assert_eq!(lp_project_below(&mode, 4.0), mode);
    }

    #[test]
    fn lp_blocks_reassemble_field() {
        let g = grid();
        let f = random_field(g, 11, 6.0).transform();
        let band = DyadicBand::for_grid(&g);
        let mut sum = f.multiplied_real(|xi| band.low_block(xi));
        for n in band.levels() {
            sum = sum.add(&lp_project(&f, n)).unwrap();
        }
        let err = sum
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err <= 1e-12);
    }

    #[test]
    fn airy_group_properties() {
        let g = grid();
        let f = random_field(g, 5, 4.0).transform();
        let u = airy_propagate(&f, 0.37);
        assert!((u.l2_norm_sq() - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq());
        let back = airy_propagate(&u, -0.37);
        let err = back
            .coeffs()
            .iter()
            .zip(f.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-14);
        let xi1 = g.wavenumber(2);
        let t = 0.8;
        let ratio = u.coeffs()[2] / f.coeffs()[2];
        let _ = ratio;
        let single = airy_propagate(&PhysicalField::from_fn(g, |x| (xi1 * x).cos()).transform(), t);
        let phase = (single.coeffs()[2] / Complex64::new(0.5, 0.0)).arg();
        let expect = Complex64::from_polar(1.0, xi1.powi(3) * t).arg();
        assert!((phase - expect).abs() < 1e-12);
    }

    #[test]
    fn dissipative_group() {
        let g = grid();
        let f = random_field(g, 9, 4.0).transform();
        assert_eq!(dissipative_propagate(&f, 0.3, 0.0).unwrap(), airy_propagate(&f, 0.3));
        assert!(dissipative_propagate(&f, -0.3, 0.1).is_err());
        let mut prev = f.l2_norm_sq();
        for i in 1..10 {
            let n = dissipative_propagate(&f, 0.1 * i as f64, 0.2).unwrap().l2_norm_sq();
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn pseudoproduct_with_unit_symbol_is_product() {
        let g = Grid::new(15.0, 128).unwrap();
        let f = random_field(g, 1, 3.0).transform();
        let h = random_field(g, 2, 3.0).transform();
        let pp = pseudoproduct(&f, &h, |_, _| Complex64::new(1.0, 0.0)).unwrap();
        let dp = dealiased_product(&f, &h).unwrap();
        let err = pp
            .coeffs()
            .iter()
            .zip(dp.coeffs())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err <= 1e-10);
        // and pointwise product of resolved fields
        let prod = f.inverse().mul(&h.inverse()).unwrap();
        let perr = pp
            .inverse()
            .values()
            .iter()
            .zip(prod.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(perr <= 1e-10);
    }

    #[test]
    fn pseudoproduct_duality() {
        // ∫ Π_χ(f,g) h = ∫ f Π_χ₁(h,g) with χ₁(ξ,ξ₁) = conj χ(ξ₁,ξ), for
        // symbols of real operators (χ(-ξ,-ξ₁) = conj χ(ξ,ξ₁)).
        let g = Grid::new(12.0, 64).unwrap();
        let f = random_field(g, 21, 2.5).transform();
        let gg = random_field(g, 22, 2.5).transform();
        let h = random_field(g, 23, 2.5).transform();
        let chi = |xi: f64, xi1: f64| {
            Complex64::new(
                (0.3 * xi).cos() + xi1 * xi1 / (1.0 + xi * xi),
                (0.7 * xi1).sin() + 0.2 * xi,
            )
        };
        let chi1 = |xi: f64, xi1: f64| chi(xi1, xi).conj();
        let lhs = pairing(&pseudoproduct(&f, &gg, chi).unwrap(), &h);
        let rhs = pairing(&f, &pseudoproduct(&h, &gg, chi1).unwrap());
        assert!(((lhs - rhs) / lhs.abs().max(1e-300)).abs() <= 1e-10, "{lhs} {rhs}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn pseudoproduct_bilinear(s1 in 0u64..1000, s2 in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let g = Grid::new(10.0, 32).unwrap();
            let f1 = random_field(g, s1, 2.0).transform();
            let f2 = random_field(g, s1 + 1, 2.0).transform();
            let h = random_field(g, s2, 2.0).transform();
            let chi = |xi: f64, xi1: f64| Complex64::new(xi - xi1, 1.0 + xi1);
            let combo = f1.scaled(a).add(&f2.scaled(b)).unwrap();
            let left = pseudoproduct(&combo, &h, chi).unwrap();
            let right = pseudoproduct(&f1, &h, chi).unwrap().scaled(a)
                .add(&pseudoproduct(&f2, &h, chi).unwrap().scaled(b)).unwrap();
            let scale = left.coeffs().iter().fold(1e-300f64, |m, c| m.max(c.norm()));
            for (x, y) in left.coeffs().iter().zip(right.coeffs()) {
                prop_assert!((x - y).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn multipliers_commute(seed in 0u64..500, s in -2.0f64..2.0, t in -1.0f64..1.0) {
            let g = Grid::new(10.0, 64).unwrap();
            let f = random_field(g, seed, 3.0).transform();
            let ops: Vec<Op> = vec![
                Box::new(move |x| bessel_potential(x, s)),
                Box::new(|x| spatial_derivative(x, 2)),
                Box::new(move |x| airy_propagate(x, t)),
                Box::new(|x| lp_project(x, 2.0)),
                Box::new(|x| dissipative_propagate(x, 0.2, 0.3).unwrap()),
            ];
            for a in &ops {
                for b in &ops {
                    let ab = a(&b(&f));
                    let ba = b(&a(&f));
                    let scale = ab.coeffs().iter().fold(1e-300f64, |m, c| m.max(c.norm()));
                    for (x, y) in ab.coeffs().iter().zip(ba.coeffs()) {
                        prop_assert!((x - y).norm() <= 1e-12 * scale.max(1.0));
                    }
                    prop_assert!(ab.hermitian_defect() <= 1e-12 * scale.max(1.0));
                }
            }
        }
    }
}
