//! Vacuum-mediated coherent (`Ω_ij`) and dissipative (`Γ_ij`) pair rates.
//!
//! For two identical point dipoles along the unit axis `p` separated by
//! `r_ij` (with `x = k0·r_ij`, `θ` the angle between `p` and the separation):
//!
//! ```text
//! Ω_ij = (3/4)Γ0 [ (1 − 3cos²θ)(sin x/x² + cos x/x³) − sin²θ cos x/x ]
//! Γ_ij = (3/2)Γ0 [ (1 − 3cos²θ)(cos x/x² − sin x/x³) + sin²θ sin x/x ]
//! ```
//!
//! The diagonal is `Ω_jj = 0`, `Γ_jj = Γ0`. For emitters with different axes
//! the same Green-tensor contraction is used with `p_i·p_j` and
//! `(p_i·r̂)(p_j·r̂)` in place of `1` and `cos²θ`.

use nalgebra::DMatrix;

use crate::geometry::{dot, norm, sub, EmitterGeometry, Vec3};
use crate::{Error, Result, C64, K0};

/// Coherent and dissipative coupling matrices in units of `Γ0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    /// `Ω_ij`, zero diagonal.
    pub omega: DMatrix<f64>,
    /// `Γ_ij`, diagonal equal to `gamma0`.
    pub gamma: DMatrix<f64>,
    /// Single-emitter decay rate `Γ0`.
    pub gamma0: f64,
}

impl CouplingMatrices {
    pub fn n(&self) -> usize {
        self.omega.nrows()
    }
}

/// `cos x/x² − sin x/x³`, evaluated by its Taylor series near the origin where
/// the closed form cancels catastrophically.
fn radiative_near_field(x: f64) -> f64 {
    if x < 0.5 {
        // Σ_{n≥1} (−1)^n 2n x^{2n−2} / (2n+1)!
        let x2 = x * x;
        let mut sum = 0.0;
        let mut pow = 1.0; // x^{2n-2}
        let mut fact = 6.0; // (2n+1)!
        for n in 1..=12 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * 2.0 * n as f64 * pow / fact;
            pow *= x2;
            fact *= ((2 * n + 2) * (2 * n + 3)) as f64;
        }
        sum
    } else {
        x.cos() / (x * x) - x.sin() / (x * x * x)
    }
}

/// `sin x / x` with its removable singularity.
fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Pair rates for emitters with arbitrary unit dipole axes `a_i`, `a_j`.
pub fn pair_rates_oriented(
    r_i: &Vec3,
    r_j: &Vec3,
    a_i: &Vec3,
    a_j: &Vec3,
    gamma0: f64,
) -> Result<(f64, f64)> {
    let sep = sub(r_i, r_j);
    let r = norm(&sep);
    if !(r > 0.0) {
        return Err(Error::SingularSeparation { i: 0, j: 1 });
    }
    let rhat = [sep[0] / r, sep[1] / r, sep[2] / r];
    let pp = dot(a_i, a_j);
    let proj = dot(a_i, &rhat) * dot(a_j, &rhat);
    let near = pp - 3.0 * proj; // (1 − 3cos²θ) for parallel dipoles
    let far = pp - proj; // sin²θ for parallel dipoles
    let x = K0 * r;
    let (s, c) = x.sin_cos();
    let omega = 0.75 * gamma0 * (near * (s / (x * x) + c / (x * x * x)) - far * c / x);
    let gamma = 1.5 * gamma0 * (near * radiative_near_field(x) + far * sinc(x));
    Ok((omega, gamma))
}

/// `(Ω_ij, Γ_ij)` for two identical emitters with shared dipole axis.
pub fn pair_rates(r_i: &Vec3, r_j: &Vec3, dipole_axis: &Vec3, gamma0: f64) -> Result<(f64, f64)> {
    pair_rates_oriented(r_i, r_j, dipole_axis, dipole_axis, gamma0)
}

/// Full `N×N` coupling matrices for a geometry.
pub fn coupling_matrices(geom: &EmitterGeometry, gamma0: f64) -> Result<CouplingMatrices> {
    let n = geom.len();
    let mut omega = DMatrix::zeros(n, n);
    let mut gamma = DMatrix::zeros(n, n);
    for i in 0..n {
        gamma[(i, i)] = gamma0;
        for j in (i + 1)..n {
            let (o, g) = pair_rates_oriented(
                &geom.positions[i],
                &geom.positions[j],
                &geom.dipole_axes[i],
                &geom.dipole_axes[j],
                gamma0,
            )
            .map_err(|_| Error::SingularSeparation { i, j })?;
            omega[(i, j)] = o;
            omega[(j, i)] = o;
            gamma[(i, j)] = g;
            gamma[(j, i)] = g;
        }
    }
    Ok(CouplingMatrices { omega, gamma, gamma0 })
}

/// Largest deviation of `m` from the circulant matrix generated by its first
/// row.
pub fn circulant_deviation(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            dev = dev.max((m[(i, j)] - m[(0, (j + n - i) % n)]).abs());
        }
    }
    dev
}

/// Discrete-Fourier sums `Σ_j row[j] e^{i2πjk/N}` for `k = 0..N−1`: the
/// eigenvalues of the circulant matrix whose first row is `row`.
pub fn circulant_eigenvalues(row: &[f64]) -> Vec<C64> {
    let n = row.len();
    (0..n)
        .map(|k| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| v * C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (j * k % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}

/// Require a circulant matrix (within `tol`) and return the real parts of its
/// DFT eigenvalues.
pub(crate) fn circulant_spectrum(m: &DMatrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let deviation = circulant_deviation(m);
    if deviation > tol {
        return Err(Error::NotCirculant { deviation });
    }
    let row: Vec<f64> = m.row(0).iter().copied().collect();
    Ok(circulant_eigenvalues(&row).into_iter().map(|z| z.re).collect())
}
