//! Dense complex linear-algebra helpers: Schur forms, Sylvester equations,
//! non-Hermitian eigenpairs, restarted GMRES and polynomial roots.

use nalgebra::{DMatrix, Schur};

use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// QR sweeps allowed per matrix row before the Schur iteration is declared
/// non-convergent.
const SCHUR_MAX_ITERATIONS: usize = 1000;

/// Complex Schur decomposition `A = Q T Q†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub q: DMatrix<C64>,
    pub t: DMatrix<C64>,
}

impl SchurForm {
    pub fn new(a: DMatrix<C64>) -> Self {
        let n = a.nrows();
        if n == 0 {
            return Self { q: DMatrix::zeros(0, 0), t: DMatrix::zeros(0, 0) };
        }
        // Entries below machine precision relative to the Frobenius norm are
        // flushed to zero first: this is a backward-stable perturbation, and
        // without it the shifted QR iteration can stall on nearly scalar
        // matrices whose off-diagonal entries sit deep in the subnormal range.
        let cut = a.norm() * f64::EPSILON;
        let a = a.map(|z| if z.norm() < cut { ZERO } else { z });
        let (q, t) = Schur::try_new(a, f64::EPSILON, SCHUR_MAX_ITERATIONS * n)
            .expect("complex Schur iteration did not converge")
            .unpack();
        Self { q, t }
    }

    pub fn dim(&self) -> usize {
        self.t.nrows()
    }

    /// Diagonal of `T`: the eigenvalues.
    pub fn eigenvalues(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.t[(i, i)]).collect()
    }
}

/// Solve `c X + i A X − i X B† = R` for `X`, with `A = Q_a T_a Q_a†` and
/// `B = Q_b T_b Q_b†` given in Schur form (Bartels–Stewart).
///
/// This is the resolvent equation `(c − K) X = R` of the commutator-type
/// superoperator `K(X) = −i(A X − X B†)`.
pub fn solve_commutator_sylvester(c: C64, a: &SchurForm, b: &SchurForm, r: &DMatrix<C64>) -> DMatrix<C64> {
    let (n, m) = (a.dim(), b.dim());
    if n == 0 || m == 0 {
        return DMatrix::zeros(n, m);
    }
    let i = C64::new(0.0, 1.0);
    // Transformed right-hand side R' = Q_a† R Q_b.
    let rp = a.q.adjoint() * r * &b.q;
    // Unknown X' = Q_a† X Q_b satisfies c X' + i T_a X' − i X' V = R', V = T_b† lower.
    let ta = &a.t;
    let tb = &b.t;
    let mut x = DMatrix::<C64>::zeros(n, m);
    let mut rhs = vec![ZERO; n];
    for j in (0..m).rev() {
        for row in 0..n {
            rhs[row] = rp[(row, j)];
        }
        // + i Σ_{k>j} X'_{:,k} V_{kj}, V_{kj} = conj(T_b[j,k])
        for k in (j + 1)..m {
            let v = i * tb[(j, k)].conj();
            if v != ZERO {
                for row in 0..n {
                    rhs[row] += x[(row, k)] * v;
                }
            }
        }
        let shift = c - i * tb[(j, j)].conj();
        // Upper-triangular solve (shift + i T_a) x = rhs.
        for row in (0..n).rev() {
            let mut s = rhs[row];
            for col in (row + 1)..n {
                s -= i * ta[(row, col)] * x[(col, j)];
            }
            x[(row, j)] = s / (shift + i * ta[(row, row)]);
        }
    }
    &a.q * x * b.q.adjoint()
}

/// Eigenvalues and unit-norm right eigenvectors (columns) of a general
/// complex matrix, from its Schur form by triangular back-substitution.
///
/// Near-degenerate diagonal differences are regularized as in LAPACK `trevc`,
/// so degenerate eigenvalues yield vectors inside the eigenspace.
pub fn eig(a: &DMatrix<C64>) -> (Vec<C64>, DMatrix<C64>) {
    let s = SchurForm::new(a.clone());
    let n = s.dim();
    let t = &s.t;
    let scale = t.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let small = scale * f64::EPSILON * n as f64;
    let mut y = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = ZERO;
            for l in (i + 1)..=k {
                acc += t[(i, l)] * y[(l, k)];
            }
            let mut den = t[(i, i)] - lam;
            if den.norm() < small {
                den = C64::new(small, 0.0);
            }
            y[(i, k)] = -acc / den;
        }
    }
    let mut v = &s.q * y;
    for k in 0..n {
        let norm = v.column(k).norm();
        v.column_mut(k).unscale_mut(norm);
    }
    (s.eigenvalues(), v)
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Outcome of a GMRES solve.
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Restarted, right-preconditioned GMRES for `A x = b`.
///
/// `apply` computes `A v`, `precond` an approximation of `A^{-1} v`.
/// Converges when `‖b − A x‖ ≤ tol ‖b‖`.
pub fn gmres(
    apply: impl Fn(&[C64]) -> Vec<C64>,
    precond: impl Fn(&[C64]) -> Vec<C64>,
    b: &[C64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![ZERO; n];
    if bnorm == 0.0 {
        return Ok(GmresOutcome { x, iterations: 0, relative_residual: 0.0 });
    }
    let mut total = 0;
    loop {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        if beta <= tol * bnorm {
            return Ok(GmresOutcome { x, iterations: total, relative_residual: beta / bnorm });
        }
        if total >= max_iter {
            return Err(Error::Solver(format!(
                "GMRES did not converge in {max_iter} iterations (relative residual {:e})",
                beta / bnorm
            )));
        }
        let m = restart.min(max_iter - total).max(1);
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut zs: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut h = vec![vec![ZERO; m]; m + 1];
        let mut cs = vec![ZERO; m];
        let mut sn = vec![ZERO; m];
        let mut g = vec![ZERO; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let z = precond(&basis[j]);
            let mut w = apply(&z);
            zs.push(z);
            // Modified Gram–Schmidt, twice for stability.
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dotc(v, &w);
                    h[i][j] += hij;
                    w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= hij * vk);
                }
            }
            let hnext = norm(&w);
            h[j + 1][j] = C64::new(hnext, 0.0);
            for i in 0..j {
                let t = cs[i].conj() * h[i][j] + sn[i].conj() * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let (a, bb) = (h[j][j], h[j + 1][j]);
            let rr = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if rr == 0.0 {
                cs[j] = C64::new(1.0, 0.0);
                sn[j] = ZERO;
            } else {
                cs[j] = a / rr;
                sn[j] = bb / rr;
            }
            h[j][j] = C64::new(rr, 0.0);
            h[j + 1][j] = ZERO;
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j].conj() * g[j];
            used = j + 1;
            total += 1;
            if g[j + 1].norm() <= tol * bnorm * 0.5 || hnext == 0.0 {
                break;
            }
            basis.push(w.iter().map(|z| z / hnext).collect());
        }
        // Back-substitute the small triangular system.
        let mut y = vec![ZERO; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in (i + 1)..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            x.iter_mut().zip(&zs[k]).for_each(|(xi, zi)| *xi += yk * zi);
        }
    }
}

/// Roots of `Σ_k coeffs[k] z^k` (ascending order) by Durand–Kerner iteration
/// followed by Newton polishing.
pub fn polynomial_roots(coeffs: &[C64]) -> Vec<C64> {
    let deg = coeffs.len() - 1;
    let lead = coeffs[deg];
    let monic: Vec<C64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: C64| monic.iter().rev().fold(ZERO, |acc, c| acc * z + c);
    let deriv = |z: C64| {
        monic.iter().enumerate().skip(1).rev().fold(ZERO, |acc, (k, c)| acc * z + c * k as f64)
    };
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut roots: Vec<C64> =
        (0..deg).map(|k| C64::from_polar(radius * 0.9, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64)).collect();
    for _ in 0..500 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut den = C64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 * radius {
            break;
        }
    }
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*r);
            if d.norm() > 0.0 {
                *r -= eval(*r) / d;
            }
        }
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random(n: usize, m: usize, seed: u64) -> DMatrix<C64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(n, m, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    #[test]
    fn sylvester_solution_satisfies_equation() {
        let a = random(7, 7, 1);
        let b = random(5, 5, 2);
        let r = random(7, 5, 3);
        let c = C64::new(3.0, 1.0);
        let x = solve_commutator_sylvester(c, &SchurForm::new(a.clone()), &SchurForm::new(b.clone()), &r);
        let i = C64::new(0.0, 1.0);
        let lhs = &x * c + (&a * &x) * i - (&x * b.adjoint()) * i;
        assert!((lhs - r).norm() < 1e-12);
    }

    #[test]
    fn eigenpairs_of_random_and_degenerate_matrices() {
        let a = random(12, 12, 4);
        let (vals, vecs) = eig(&a);
        for k in 0..12 {
            let v = vecs.column(k);
            assert!((&a * v - v * vals[k]).norm() < 1e-11);
        }
        // Exactly degenerate spectrum: a normal matrix with a double eigenvalue.
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, -0.5),
            C64::new(1.0, -0.5),
            C64::new(2.0, 0.0),
        ]));
        let q = SchurForm::new(random(3, 3, 5)).q;
        let m = &q * d * q.adjoint();
        let (vals, vecs) = eig(&m);
        for k in 0..3 {
            let v = vecs.column(k);
            assert!((&m * v - v * vals[k]).norm() < 1e-10);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gmres_solves_preconditioned_system() {
        let n = 30;
        let mut a = random(n, n, 6);
        for i in 0..n {
            a[(i, i)] += C64::new(4.0, 0.0);
        }
        let b: Vec<C64> = random(n, 1, 7).iter().copied().collect();
        let apply = |v: &[C64]| (&a * nalgebra::DVector::from_column_slice(v)).iter().copied().collect::<Vec<_>>();
        let jacobi = |v: &[C64]| v.iter().enumerate().map(|(i, z)| z / a[(i, i)]).collect::<Vec<_>>();
        let out = gmres(apply, jacobi, &b, 1e-12, 10, 500).unwrap();
        let res = apply(&out.x);
        let err: f64 = res.iter().zip(&b).map(|(r, b)| (r - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err < 1e-10, "residual {err}");
    }

    #[test]
    fn cubic_roots() {
        // (z − 1)(z − 2i)(z + 3) = z³ + (2 − 2i) z² + (−3 − 4i) z + 6i
        let coeffs = [C64::new(0.0, 6.0), C64::new(-3.0, -4.0), C64::new(2.0, -2.0), C64::new(1.0, 0.0)];
        let mut roots = polynomial_roots(&coeffs);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re));
        let expected = [C64::new(-3.0, 0.0), C64::new(0.0, 2.0), C64::new(1.0, 0.0)];
        for (r, e) in roots.iter().zip(expected) {
            assert!((r - e).norm() < 1e-12, "{r} vs {e}");
        }
    }
}
