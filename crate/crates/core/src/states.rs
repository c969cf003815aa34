//! The even coherent state `𝒩^{1/2}(|α⟩ + |−α⟩)` in three representations.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest tolerated probability outside a truncated number basis.
pub const TRUNCATION_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatState {
    pub alpha: f64,
    /// `𝒩 = 1/(2[1 + e^{−2α²}])`
    pub norm: f64,
}

impl CatState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be finite",
            });
        }
        Ok(CatState {
            alpha,
            norm: 0.5 / (1.0 + (-2.0 * alpha * alpha).exp()),
        })
    }

    /// Only real amplitudes are supported.
    pub fn from_complex(alpha: Complex64) -> Result<Self> {
        if alpha.im != 0.0 {
            return Err(Error::InvalidParameter {
                name: "alpha.im",
                value: alpha.im,
                reason: "cat amplitude must be real",
            });
        }
        Self::new(alpha.re)
    }

    /// `max(30, ⌈α² + 8|α| + 10⌉)`
    pub fn default_n_max(&self) -> usize {
        let a = self.alpha.abs();
        30.max((a * a + 8.0 * a + 10.0).ceil() as usize)
    }

    /// `⟨a†a⟩ = α² tanh(α²)`
    pub fn mean_number(&self) -> f64 {
        let a2 = self.alpha * self.alpha;
        a2 * a2.tanh()
    }
}

/// Truncated photon-number distribution `P_n`, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumberDistribution {
    pub probs: Vec<f64>,
    pub n_max: usize,
}

impl NumberDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Precondition("empty number distribution".into()));
        }
        Ok(NumberDistribution {
            n_max: probs.len() - 1,
            probs,
        })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    }

    /// `Σ_even P_n − Σ_odd P_n`
    pub fn parity_contrast(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(n, p)| if n % 2 == 0 { *p } else { -*p })
            .sum()
    }

    pub fn max_abs_difference(&self, other: &NumberDistribution) -> f64 {
        let len = self.probs.len().max(other.probs.len());
        (0..len)
            .map(|n| {
                let a = self.probs.get(n).copied().unwrap_or(0.0);
                let b = other.probs.get(n).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Truncated density matrix in the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    pub entries: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    pub fn from_matrix(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::Precondition("density matrix must be square and nonempty".into()));
        }
        Ok(FockDensityMatrix { entries })
    }

    pub fn from_distribution(p: &NumberDistribution) -> Self {
        let diag = nalgebra::DVector::from_iterator(p.probs.len(), p.probs.iter().map(|&x| Complex64::new(x, 0.0)));
        FockDensityMatrix {
            entries: DMatrix::from_diagonal(&diag),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n_max(&self) -> usize {
        self.dim() - 1
    }

    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn diagonal(&self) -> NumberDistribution {
        NumberDistribution {
            probs: self.entries.diagonal().iter().map(|z| z.re).collect(),
            n_max: self.n_max(),
        }
    }

    /// `max |ρ − ρ†|`
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Largest modulus of an entry off the diagonal.
    pub fn max_coherence(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let h = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Cheap certificate that every eigenvalue exceeds `−margin`: succeeds
    /// iff `ρ + margin·1` admits a Cholesky factorisation.
    pub fn is_positive_within(&self, margin: f64) -> bool {
        let n = self.dim();
        let mut shifted = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        for i in 0..n {
            shifted[(i, i)] += Complex64::new(margin, 0.0);
        }
        shifted.cholesky().is_some()
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }

    /// Symmetric characteristic function `tr[ρ D(ξ)]`, with the displacement
    /// operator exponentiated in a basis padded well beyond the truncation.
    pub fn qcf(&self, xi: Complex64) -> Complex64 {
        let d = displacement_block(xi, self.dim(), 40);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.entries[(i, j)] * d[(j, i)];
            }
        }
        acc
    }
}

/// Top-left `dim × dim` block of `exp(ξa† − ξ*a)` computed in `dim + pad` levels.
pub fn displacement_block(xi: Complex64, dim: usize, pad: usize) -> DMatrix<Complex64> {
    let big = dim + pad;
    let mut generator = DMatrix::<Complex64>::zeros(big, big);
    for n in 0..big - 1 {
        let s = ((n + 1) as f64).sqrt();
        generator[(n + 1, n)] = xi * s;
        generator[(n, n + 1)] = -xi.conj() * s;
    }
    generator.exp().view((0, 0), (dim, dim)).into_owned()
}

/// `ln n!` for `n = 0..=n_max`.
pub(crate) fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for n in 1..=n_max {
        acc += (n as f64).ln();
        out.push(acc);
    }
    out
}

/// Symmetric-ordered characteristic function of the cat,
/// `𝒩 e^{−|ξ|²/2}[e^{α(ξ−ξ*)} + e^{−α(ξ−ξ*)} + e^{−2α²}(e^{α(ξ+ξ*)} + e^{−α(ξ+ξ*)})]`.
pub fn cat_qcf(xi: Complex64, cat: &CatState) -> Complex64 {
    let a = cat.alpha;
    let gauss = (-0.5 * xi.norm_sqr()).exp();
    // α(ξ − ξ*) = 2iα Im ξ, α(ξ + ξ*) = 2α Re ξ
    let phase = 2.0 * (2.0 * a * xi.im).cos();
    let u = 2.0 * a * xi.re;
    let cross = (u - 2.0 * a * a).exp() + (-u - 2.0 * a * a).exp();
    Complex64::new(cat.norm * gauss * (phase + cross), 0.0)
}

/// Coherent-state amplitudes `e^{−α²/2} αⁿ/√n!`.
fn coherent_amplitudes(alpha: f64, n_max: usize) -> Vec<f64> {
    let lf = ln_factorials(n_max);
    (0..=n_max)
        .map(|n| {
            if n == 0 {
                (-0.5 * alpha * alpha).exp()
            } else if alpha == 0.0 {
                0.0
            } else {
                let mag = (-0.5 * alpha * alpha + n as f64 * alpha.abs().ln() - 0.5 * lf[n]).exp();
                if alpha < 0.0 && n % 2 == 1 {
                    -mag
                } else {
                    mag
                }
            }
        })
        .collect()
}

fn check_truncation(probs: &[f64]) -> Result<()> {
    let leaked = 1.0 - probs.iter().sum::<f64>();
    if leaked > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            n_max: probs.len() - 1,
            leaked,
        });
    }
    Ok(())
}

/// `P_n = 4𝒩 e^{−α²} α^{2n}/n!` for even n, zero for odd n.
pub fn cat_number_distribution(cat: &CatState, n_max: usize) -> Result<NumberDistribution> {
    let c = coherent_amplitudes(cat.alpha, n_max);
    let probs: Vec<f64> = c
        .iter()
        .enumerate()
        .map(|(n, cn)| if n % 2 == 0 { 4.0 * cat.norm * cn * cn } else { 0.0 })
        .collect();
    check_truncation(&probs)?;
    Ok(NumberDistribution { probs, n_max })
}

pub fn cat_density_matrix(cat: &CatState, n_max: usize) -> Result<FockDensityMatrix> {
    let c = coherent_amplitudes(cat.alpha, n_max);
    let psi: Vec<f64> = c
        .iter()
        .enumerate()
        .map(|(n, cn)| if n % 2 == 0 { 2.0 * cat.norm.sqrt() * cn } else { 0.0 })
        .collect();
    check_truncation(&psi.iter().map(|x| x * x).collect::<Vec<_>>())?;
    let entries = DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| Complex64::new(psi[i] * psi[j], 0.0));
    Ok(FockDensityMatrix { entries })
}
