//! The smooth cutoff `η` and the dyadic partitions built from it.
//!
//! `η` is even, equal to 1 on `[-1, 1]`, vanishes outside `[-2, 2]` and is
//! C^∞: on `1 ≤ |ξ| ≤ 2` it is the usual `exp(-1/x)` glue
//! `g(2-|ξ|) / (g(2-|ξ|) + g(|ξ|-1))`.

use super::grid::Grid;

fn glue(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

pub fn eta(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let up = glue(2.0 - a);
        up / (up + glue(a - 1.0))
    }
}

/// `φ(ξ) = η(ξ) - η(2ξ)`, supported in `1/2 ≤ |ξ| ≤ 2`.
pub fn phi(xi: f64) -> f64 {
    eta(xi) - eta(2.0 * xi)
}

/// `φ_N(ξ) = φ(ξ/N)`.
pub fn phi_n(n: f64, xi: f64) -> f64 {
    phi(xi / n)
}

/// Modulation cutoff: `ψ_1 = η`, `ψ_L = φ_L` for `L ≥ 2`.
pub fn psi_l(l: f64, sigma: f64) -> f64 {
    if l <= 1.0 {
        eta(sigma)
    } else {
        phi_n(l, sigma)
    }
}

/// A finite run of homogeneous dyadic numbers `2^min_exp ..= 2^max_exp`.
///
/// Frequencies below `2^min_exp` are collected by a residual low block
/// `η(2ξ/N_min)` so that low block plus all `φ_N` telescopes to
/// `η(ξ/N_max)`, which is 1 on the whole grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicBand {
    pub min_exp: i32,
    pub max_exp: i32,
}

impl DyadicBand {
    /// `N_min` is the largest power of two not above the fundamental `π/L`
    /// (so the low block only sees the zero mode) and `N_max` the largest
    /// power of two not above `2ξ_max`.
    pub fn for_grid(grid: &Grid) -> Self {
        let min_exp = grid.fundamental().log2().floor() as i32;
        let max_exp = (2.0 * grid.xi_max()).log2().floor() as i32;
        Self { min_exp, max_exp }
    }

    pub fn levels(&self) -> impl Iterator<Item = f64> + '_ {
        (self.min_exp..=self.max_exp).map(|e| 2f64.powi(e))
    }

    pub fn n_min(&self) -> f64 {
        2f64.powi(self.min_exp)
    }

    pub fn n_max(&self) -> f64 {
        2f64.powi(self.max_exp)
    }

    pub fn low_block(&self, xi: f64) -> f64 {
        eta(2.0 * xi / self.n_min())
    }

    /// Low block plus every `φ_N` at `ξ`.
    pub fn partition_sum(&self, xi: f64) -> f64 {
        self.low_block(xi) + self.levels().map(|n| phi_n(n, xi)).sum::<f64>()
    }
}

/// Nonhomogeneous modulation levels `1, 2, 4, …` up to the first power of
/// two at or above `max_modulation`.
pub fn modulation_levels(max_modulation: f64) -> Vec<f64> {
    let mut levels = vec![1.0];
    let mut l = 1.0;
    while l < max_modulation {
        l *= 2.0;
        levels.push(l);
    }
    levels
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_constraints() {
        assert_eq!(eta(0.0), 1.0);
        assert_eq!(eta(1.0), 1.0);
        assert_eq!(eta(-1.0), 1.0);
        assert_eq!(eta(2.0), 0.0);
        assert_eq!(eta(3.5), 0.0);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let x = 1.0 + i as f64 / 1000.0;
            let e = eta(x);
            assert!((0.0..=1.0).contains(&e));
            assert!(e <= prev);
            prev = e;
        }
    }

    #[test]
    fn phi_support_and_peak() {
        assert_eq!(phi(1.0), 1.0);
        assert_eq!(phi(0.49), 0.0);
        assert_eq!(phi(2.01), 0.0);
        assert_eq!(phi_n(8.0, 8.0), 1.0);
        assert_eq!(phi_n(8.0, 17.0), 0.0);
    }

    #[test]
    fn grid_band_partitions_unity() {
        for (l, n) in [(50.0, 1024), (3.0, 64), (2.0 * std::f64::consts::PI, 256)] {
            let g = Grid::new(l, n).unwrap();
            let band = DyadicBand::for_grid(&g);
            for xi in g.wavenumbers() {
                assert!((band.partition_sum(xi) - 1.0).abs() <= 1e-12, "xi={xi}");
            }
        }
    }

    #[test]
    fn modulation_levels_cover() {
        let ls = modulation_levels(100.0);
        assert_eq!(ls.last().copied(), Some(128.0));
        assert_eq!(modulation_levels(0.5), vec![1.0]);
    }
}
