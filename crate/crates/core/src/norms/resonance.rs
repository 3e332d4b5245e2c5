//! Resonance function and the multilinear vanishing check for
//! space-time blocks localized near the cubic characteristic.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::{phi_n, psi_l};

/// `Ω = Σ ξ_i³`.
pub fn resonance(xis: &[f64]) -> f64 {
    xis.iter().map(|x| x * x * x).sum()
}

/// For three frequencies with zero sum: `(Σ ξ_i³, -3(ξ₁+ξ₂)ξ₁ξ₂)`.
pub fn resonance_factorized(xis: &[f64]) -> Result<(f64, f64)> {
    if xis.len() != 3 {
        return Err(Error::invalid(format!(
            "factorized resonance needs three frequencies, got {}",
            xis.len()
        )));
    }
    let sum: f64 = xis.iter().sum();
    let scale = xis.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if sum.abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::invalid(format!("frequencies sum to {sum}, not 0")));
    }
    let (a, b) = (xis[0], xis[1]);
    Ok((resonance(xis), -3.0 * (a + b) * a * b))
}

/// A space-time block `P_N Q_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub n: f64,
    pub l: f64,
}

impl Block {
    pub fn new(n: f64, l: f64) -> Self {
        Self { n, l }
    }

    fn weight(&self, xi: f64, tau: f64) -> f64 {
        let a = phi_n(self.n, xi);
        if a == 0.0 {
            return 0.0;
        }
        a * psi_l(self.l, tau - xi * xi * xi)
    }
}

/// Synthetic factors live on the lattice `(i·dξ, j·dτ)`. Each factor has
/// deterministic pseudo-random Hermitian coefficients times its block cutoff;
/// `zero` lists factors that are set identically to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceConfig {
    pub blocks: Vec<Block>,
    pub dxi: f64,
    pub dtau: f64,
    pub seed: u64,
    pub zero: Vec<usize>,
}

impl ResonanceConfig {
    pub fn new(blocks: Vec<Block>) -> Self {
        Self {
            blocks,
            dxi: 1.0,
            dtau: 0.25,
            seed: 0x5eed,
            zero: Vec::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn l_max(&self) -> f64 {
        self.blocks.iter().map(|b| b.l).fold(0.0, f64::max)
    }

    /// `(2⁹k)⁻¹ N₁N₂N₃`.
    pub fn threshold(&self) -> f64 {
        let n = &self.blocks;
        n[0].n * n[1].n * n[2].n / (512.0 * self.k() as f64)
    }

    fn validate(&self) -> Result<()> {
        let k = self.k();
        if k < 3 {
            return Err(Error::invalid(format!("need k >= 3 factors, got {k}")));
        }
        if !(self.dxi > 0.0 && self.dtau > 0.0) {
            return Err(Error::invalid("lattice steps must be positive"));
        }
        let b = &self.blocks;
        if b.iter().any(|b| !(b.n > 0.0) || !(b.l >= 1.0)) {
            return Err(Error::invalid("blocks need N > 0 and L >= 1"));
        }
        if !(b[0].n >= b[1].n && b[1].n >= b[2].n) {
            return Err(Error::invalid("blocks must satisfy N1 >= N2 >= N3"));
        }
        let rest = b[3..].iter().map(|b| b.n).fold(0.0, f64::max);
        if k > 3 && b[2].n < 512.0 * k as f64 * rest {
            return Err(Error::invalid(format!(
                "N3 = {} is below 2^9 k max(N4..Nk) = {}",
                b[2].n,
                512.0 * k as f64 * rest
            )));
        }
        Ok(())
    }

    fn coefficient(&self, factor: usize, i: i64, j: i64) -> Complex64 {
        if self.zero.contains(&factor) {
            return Complex64::new(0.0, 0.0);
        }
        let w = self.blocks[factor].weight(i as f64 * self.dxi, j as f64 * self.dtau);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let flip = i < 0 || (i == 0 && j < 0);
        let (ci, cj) = if flip { (-i, -j) } else { (i, j) };
        let mut key = self.seed ^ (factor as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        key = key.wrapping_mul(31).wrapping_add(ci as u64);
        key = key.wrapping_mul(0x1000_0000_01b3).wrapping_add(cj as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let z = if ci == 0 && cj == 0 {
            Complex64::new(rng.random_range(-1.0..1.0), 0.0)
        } else {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        };
        w * if flip { z.conj() } else { z }
    }

    /// Lattice points where factor `f` is nonzero.
    fn support(&self, f: usize) -> Vec<(i64, i64, Complex64)> {
        let b = self.blocks[f];
        let imax = (2.0 * b.n / self.dxi).ceil() as i64;
        let smax = 2.0 * b.l;
        let mut out = Vec::new();
        for i in -imax..=imax {
            let xi = i as f64 * self.dxi;
            if phi_n(b.n, xi) == 0.0 {
                continue;
            }
            let c = xi * xi * xi;
            let jlo = ((c - smax) / self.dtau).floor() as i64;
            let jhi = ((c + smax) / self.dtau).ceil() as i64;
            for j in jlo..=jhi {
                let v = self.coefficient(f, i, j);
                if v != Complex64::new(0.0, 0.0) {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceReport {
    pub integral: Complex64,
    /// `sup|χ| · Π_{i<k} ‖c_i‖_{ℓ¹} · sup|c_k|`, a bound on `|integral|`.
    pub scale: f64,
    pub l_max: f64,
    pub threshold: f64,
    /// Number of lattice tuples with all factors nonzero.
    pub terms: usize,
}

impl ResonanceReport {
    pub fn magnitude(&self) -> f64 {
        self.integral.norm()
    }

    /// Whether the modulation sizes are below the vanishing threshold.
    pub fn below_threshold(&self) -> bool {
        self.l_max < self.threshold
    }

    pub fn vanishes(&self, rel: f64) -> bool {
        self.magnitude() <= rel * self.scale
    }
}

/// `Σ_{p₁+…+p_k=0} χ(ξ₁+ξ₂, ξ₁) Π c_i(p_i)`: the lattice form of
/// `∫ Π_χ(Q_{L₁}P_{N₁}u₁, Q_{L₂}P_{N₂}u₂) Π_{i≥3} Q_{L_i}P_{N_i}u_i`.
pub fn resonance_vanishing_check(
    config: &ResonanceConfig,
    chi: impl Fn(f64, f64) -> Complex64,
) -> Result<ResonanceReport> {
    config.validate()?;
    let k = config.k();
    let supports: Vec<_> = (0..k - 1)
        .filter(|f| !config.zero.contains(f))
        .map(|f| config.support(f))
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return Err(Error::invalid("a block has no lattice points; refine dxi or dtau"));
    }
    let report = |integral, scale, terms| ResonanceReport {
        integral,
        scale,
        l_max: config.l_max(),
        threshold: config.threshold(),
        terms,
    };
    if !config.zero.is_empty() {
        return Ok(report(Complex64::new(0.0, 0.0), 0.0, 0));
    }
    let last = config.blocks[k - 1];
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0usize;
    let mut chi_sup = 0.0f64;
    let mut idx = vec![0usize; k - 1];
    'outer: loop {
        let (mut si, mut sj) = (0i64, 0i64);
        let mut prod = Complex64::new(1.0, 0.0);
        for (f, &m) in idx.iter().enumerate() {
            let (i, j, c) = supports[f][m];
            si += i;
            sj += j;
            prod *= c;
        }
        if phi_n(last.n, -(si as f64) * config.dxi) != 0.0 {
            let ck = config.coefficient(k - 1, -si, -sj);
            if ck != Complex64::new(0.0, 0.0) {
                let (i1, _, _) = supports[0][idx[0]];
                let (i2, _, _) = supports[1][idx[1]];
                let x1 = i1 as f64 * config.dxi;
                let ch = chi(x1 + i2 as f64 * config.dxi, x1);
                chi_sup = chi_sup.max(ch.norm());
                acc += ch * prod * ck;
                terms += 1;
            }
        }
        for f in (0..k - 1).rev() {
            idx[f] += 1;
            if idx[f] < supports[f].len() {
                continue 'outer;
            }
            idx[f] = 0;
        }
        break;
    }
    if terms == 0 {
        // χ was never evaluated; bound it on the first two supports
        for &(i1, _, _) in &supports[0] {
            for &(i2, _, _) in supports[1].iter().step_by(supports[1].len().div_ceil(64)) {
                let x1 = i1 as f64 * config.dxi;
                chi_sup = chi_sup.max(chi(x1 + i2 as f64 * config.dxi, x1).norm());
            }
        }
    }
    let l1: f64 = supports
        .iter()
        .map(|s| s.iter().map(|(_, _, c)| c.norm()).sum::<f64>())
        .product();
    Ok(report(acc, chi_sup * l1 * std::f64::consts::SQRT_2, terms))
}

/// Moves the last factor to the smallest power-of-two modulation
/// `L ≥ N₁N₂N₃` for which the integral is nonzero, trying up to
/// `max_doublings` further doublings.
pub fn resonance_witness(
    config: &ResonanceConfig,
    chi: impl Fn(f64, f64) -> Complex64 + Copy,
    max_doublings: u32,
) -> Result<(ResonanceConfig, ResonanceReport)> {
    config.validate()?;
    let b = &config.blocks;
    let mut l = (b[0].n * b[1].n * b[2].n).log2().ceil().exp2();
    let mut best = 0.0f64;
    for _ in 0..=max_doublings {
        let mut trial = config.clone();
        let k = trial.k();
        trial.blocks[k - 1].l = l;
        let report = resonance_vanishing_check(&trial, chi)?;
        best = best.max(report.magnitude());
        if report.magnitude() > 1e-6 * report.scale {
            return Ok((trial, report));
        }
        l *= 2.0;
    }
    Err(Error::NoAdmissibleParameters {
        reason: "no resonant witness found".into(),
        residual: best,
    })
}
