//! Implicit propagation on the excitation ladder.
//!
//! When the Hamiltonian conserves the number of electronic excitations and
//! every dissipator either lowers it by exactly one (radiative decay) or
//! preserves it (vibrational relaxation), the Liouvillian is block lower
//! triangular over the blocks `ρ_nm` (rows with `n`, columns with `m`
//! excitations): block `(n, m)` is fed only by itself and by `(n+1, m+1)`.
//! Shifted solves `(c − L) X = B` then reduce to a top-down sweep of
//! Sylvester equations `c X + i H_n X − i X H_m† = …`, solved with complex
//! Schur forms of the per-block effective Hamiltonians; excitation-preserving
//! jumps inside a block are handled by GMRES preconditioned with the same
//! Sylvester solve.
//!
//! Time stepping applies the L-stable Padé approximant `R_{m,m+1}(hL)` of
//! `exp(hL)` through its partial fractions, with step-doubling error control.
//! Each step is exactly trace preserving (`R(0) = 1` and `Tr∘L = 0`), and
//! coherences oscillating far faster than the step are damped rather than
//! resolved — the secular limit the time grid cannot observe anyway.

use nalgebra::{DMatrix, SymmetricEigen};

use super::liouvillian::anticommutator_part;
use super::LiouvillianSpec;
use crate::linalg::{gmres, polynomial_roots, solve_commutator_sylvester, SchurForm};
use crate::quantum_core::SparseOperator;
use crate::{Error, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Relative residual demanded from inner GMRES solves.
const INNER_TOL: f64 = 1e-13;

/// Rectangular sparse block of an operator, mapping one grade to another.
#[derive(Debug, Clone)]
struct RectSparse {
    rows: usize,
    /// `(row, col, value)` sorted by row.
    entries: Vec<(usize, usize, C64)>,
}

impl RectSparse {
    /// `A X`.
    fn left(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.rows, x.ncols());
        for &(r, c, v) in &self.entries {
            for j in 0..x.ncols() {
                out[(r, j)] += v * x[(c, j)];
            }
        }
        out
    }

    /// `out += γ X A†`, i.e. `out[:, r] += γ conj(v) X[:, c]` per entry.
    fn add_right_adjoint(&self, x: &DMatrix<C64>, gamma: f64, out: &mut DMatrix<C64>) {
        for &(r, c, v) in &self.entries {
            let coef = v.conj() * gamma;
            for i in 0..x.nrows() {
                out[(i, r)] += coef * x[(i, c)];
            }
        }
    }
}

/// One diagonalized dissipator channel `γ C ρ C†`, split into grade blocks.
#[derive(Debug, Clone)]
struct Channel {
    rate: f64,
    /// `blocks[g]` maps grade `g` to grade `g + shift`.
    blocks: Vec<Option<RectSparse>>,
}

impl Channel {
    /// `γ C_{src_n→dst_n} X C_{src_m→dst_m}†`, accumulated into `out`.
    fn accumulate(&self, src_n: usize, src_m: usize, x: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        if let (Some(a), Some(b)) = (&self.blocks[src_n], &self.blocks[src_m]) {
            let ax = a.left(x);
            b.add_right_adjoint(&ax, self.rate, out);
        }
    }
}

/// Partial-fraction form of the Padé approximant `R_{m,m+1}(z) = Σ r_i/(z − z_i)`.
#[derive(Debug, Clone)]
pub struct PadeTable {
    pub order: usize,
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
}

impl PadeTable {
    /// Sub-diagonal Padé approximant with numerator degree `m`
    /// (`m = 2` is the Radau IIA stability function, order `2m + 1`).
    pub fn new(m: usize) -> Self {
        let n = m + 1;
        let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
        let p: Vec<f64> = (0..=m).map(|k| fact(m + n - k) * fact(m) / (fact(m + n) * fact(k) * fact(m - k))).collect();
        let q: Vec<f64> = (0..=n)
            .map(|k| {
                let s = if k % 2 == 0 { 1.0 } else { -1.0 };
                s * fact(m + n - k) * fact(n) / (fact(m + n) * fact(k) * fact(n - k))
            })
            .collect();
        let qc: Vec<C64> = q.iter().map(|&v| C64::new(v, 0.0)).collect();
        let poles = polynomial_roots(&qc);
        let eval = |c: &[f64], z: C64| c.iter().rev().fold(ZERO, |acc, &v| acc * z + v);
        let dq: Vec<f64> = q.iter().enumerate().skip(1).map(|(k, &v)| k as f64 * v).collect();
        let residues = poles.iter().map(|&z| eval(&p, z) / eval(&dq, z)).collect();
        Self { order: 2 * m + 1, poles, residues }
    }

    /// Evaluate `R(z)`.
    pub fn eval(&self, z: C64) -> C64 {
        self.poles.iter().zip(&self.residues).map(|(p, r)| r / (z - p)).sum()
    }
}

/// Liouvillian in excitation-graded block form.
#[derive(Debug, Clone)]
pub struct GradedLiouvillian {
    dim: usize,
    /// Basis indices of each grade.
    grades: Vec<Vec<usize>>,
    h_blocks: Vec<DMatrix<C64>>,
    schur: Vec<SchurForm>,
    lowering: Vec<Channel>,
    preserving: Vec<Channel>,
}

/// Grade shift of an operator (all entries must agree), or `None` if mixed.
fn operator_shift(op: &SparseOperator, grade_of: &[usize]) -> Option<Option<i64>> {
    let mut shift = None;
    for (r, c, _) in op.entries() {
        let s = grade_of[r] as i64 - grade_of[c] as i64;
        match shift {
            None => shift = Some(s),
            Some(t) if t != s => return None,
            _ => {}
        }
    }
    Some(shift)
}

impl GradedLiouvillian {
    /// Check whether `spec` has the ladder structure under the grading
    /// `grade_of` (one grade per basis index).
    pub fn compatible(spec: &LiouvillianSpec, grade_of: &[usize]) -> bool {
        if !spec.drives.is_empty() {
            return false;
        }
        if spec.hamiltonian.entries().any(|(r, c, _)| grade_of[r] != grade_of[c]) {
            return false;
        }
        spec.dissipators.iter().all(|d| {
            let mut common: Option<i64> = None;
            for op in &d.collapse_ops {
                match operator_shift(op, grade_of) {
                    None => return false,
                    Some(None) => {}
                    Some(Some(s)) => {
                        if !(s == 0 || s == -1) || common.is_some_and(|c| c != s) {
                            return false;
                        }
                        common = Some(s);
                    }
                }
            }
            true
        })
    }

    pub fn new(spec: &LiouvillianSpec, grade_of: &[usize]) -> Result<Self> {
        spec.validate()?;
        let dim = spec.hamiltonian.dim();
        if grade_of.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: grade_of.len() });
        }
        if !Self::compatible(spec, grade_of) {
            return Err(Error::Configuration(
                "generator does not have excitation-ladder structure (drive, pump or mixed-grade terms)".into(),
            ));
        }
        let top = grade_of.iter().copied().max().unwrap_or(0);
        let mut grades = vec![Vec::new(); top + 1];
        let mut local = vec![0usize; dim];
        for (i, &g) in grade_of.iter().enumerate() {
            local[i] = grades[g].len();
            grades[g].push(i);
        }
        let mut h_eff = spec.hamiltonian.clone();
        for d in &spec.dissipators {
            h_eff = h_eff.add(&anticommutator_part(d, dim)?)?;
        }
        let h_blocks: Vec<DMatrix<C64>> = grades.iter().map(|idx| h_eff.submatrix(idx, idx)).collect();
        let schur = h_blocks.iter().map(|h| SchurForm::new(h.clone())).collect();

        let mut lowering = Vec::new();
        let mut preserving = Vec::new();
        for d in &spec.dissipators {
            let shift = d
                .collapse_ops
                .iter()
                .find_map(|op| operator_shift(op, grade_of).flatten())
                .unwrap_or(0);
            // Diagonalize the rate matrix into independent channels.
            let eig = SymmetricEigen::new(d.rate_matrix.clone());
            let scale = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
            for (k, &rate) in eig.eigenvalues.iter().enumerate() {
                if rate.abs() <= 1e-14 * scale {
                    continue;
                }
                let terms: Vec<(C64, &SparseOperator)> =
                    d.collapse_ops.iter().enumerate().map(|(m, op)| (eig.eigenvectors[(m, k)], op)).collect();
                let c = SparseOperator::linear_combination(dim, &terms)?;
                let mut blocks: Vec<Vec<(usize, usize, C64)>> = vec![Vec::new(); top + 1];
                for (r, col, v) in c.entries() {
                    blocks[grade_of[col]].push((local[r], local[col], v));
                }
                let blocks = blocks
                    .into_iter()
                    .enumerate()
                    .map(|(g, entries)| {
                        let dst = g as i64 + shift;
                        if entries.is_empty() || dst < 0 || dst as usize > top {
                            None
                        } else {
                            Some(RectSparse { rows: grades[dst as usize].len(), entries })
                        }
                    })
                    .collect();
                let ch = Channel { rate, blocks };
                if shift == 0 {
                    preserving.push(ch);
                } else {
                    lowering.push(ch);
                }
            }
        }
        Ok(Self { dim, grades, h_blocks, schur, lowering, preserving })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of grades (`max excitation + 1`).
    pub fn levels(&self) -> usize {
        self.grades.len()
    }

    pub fn grade_dims(&self) -> Vec<usize> {
        self.grades.iter().map(|g| g.len()).collect()
    }

    /// Split a dense matrix into grade blocks, `blocks[n * G + m]`.
    pub fn split(&self, rho: &DMatrix<C64>) -> Vec<DMatrix<C64>> {
        let g = self.levels();
        let mut out = Vec::with_capacity(g * g);
        for n in 0..g {
            for m in 0..g {
                out.push(DMatrix::from_fn(self.grades[n].len(), self.grades[m].len(), |i, j| {
                    rho[(self.grades[n][i], self.grades[m][j])]
                }));
            }
        }
        out
    }

    /// Reassemble a dense matrix from grade blocks.
    pub fn merge(&self, blocks: &[DMatrix<C64>]) -> DMatrix<C64> {
        let g = self.levels();
        let mut rho = DMatrix::zeros(self.dim, self.dim);
        for n in 0..g {
            for m in 0..g {
                let b = &blocks[n * g + m];
                for (i, &a) in self.grades[n].iter().enumerate() {
                    for (j, &c) in self.grades[m].iter().enumerate() {
                        rho[(a, c)] = b[(i, j)];
                    }
                }
            }
        }
        rho
    }

    /// `(c − K_nm) X` with `K_nm X = −i(H_n X − X H_m†)`, plus a uniform
    /// per-excitation detuning folded into `c` by the caller.
    fn sylvester_apply(&self, c: C64, n: usize, m: usize, x: &DMatrix<C64>) -> DMatrix<C64> {
        x * c + (&self.h_blocks[n] * x) * I - (x * self.h_blocks[m].adjoint()) * I
    }

    /// Solve `(c − L)|_{nm} X = rhs` for a single block, where `L|_{nm}`
    /// contains the Hamiltonian/anticommutator part and excitation-preserving
    /// jumps. `detuning` adds `detuning · (excitation number)` to `H`.
    pub fn solve_block(&self, c: C64, n: usize, m: usize, rhs: &DMatrix<C64>, detuning: f64) -> Result<DMatrix<C64>> {
        let c_eff = c + I * detuning * (n as f64 - m as f64);
        let direct = |b: &DMatrix<C64>| solve_commutator_sylvester(c_eff, &self.schur[n], &self.schur[m], b);
        let active: Vec<&Channel> =
            self.preserving.iter().filter(|ch| ch.blocks[n].is_some() && ch.blocks[m].is_some()).collect();
        if active.is_empty() {
            return Ok(direct(rhs));
        }
        let (rows, cols) = (rhs.nrows(), rhs.ncols());
        let to_mat = |v: &[C64]| DMatrix::from_column_slice(rows, cols, v);
        let apply = |v: &[C64]| {
            let x = to_mat(v);
            let mut y = self.sylvester_apply(c_eff, n, m, &x);
            let mut jump = DMatrix::zeros(rows, cols);
            for ch in &active {
                ch.accumulate(n, m, &x, &mut jump);
            }
            y -= jump;
            y.as_slice().to_vec()
        };
        let precond = |v: &[C64]| direct(&to_mat(v)).as_slice().to_vec();
        let out = gmres(apply, precond, rhs.as_slice(), INNER_TOL, 60, 2000)?;
        Ok(to_mat(&out.x))
    }

    /// Basis indices of grade `g`.
    pub fn grade_indices(&self, g: usize) -> &[usize] {
        &self.grades[g]
    }

    /// Dense block `(n, m)` of an operator in the graded basis.
    pub fn operator_block(&self, op: &SparseOperator, n: usize, m: usize) -> DMatrix<C64> {
        op.submatrix(&self.grades[n], &self.grades[m])
    }

    /// Excited-state population to second order in a weak continuous drive,
    /// in the frame rotating at the drive frequency (`drive_detuning` from
    /// the bare transition).
    ///
    /// With `ρ00` the undriven ground-manifold state and `v_up` the
    /// grade-`1 ← 0` block of the drive Hamiltonian, the first-order coherence
    /// solves `(−L)_{10} ρ1 = −i V_up ρ00` and the population block solves
    /// `(−L)_{11} X = −i (V_up ρ1† − ρ1 V_up†)`; the result is `Tr X`.
    pub fn weak_drive_excitation(&self, rho00: &DMatrix<C64>, v_up: &DMatrix<C64>, drive_detuning: f64) -> Result<f64> {
        if self.levels() < 2 {
            return Err(Error::Configuration("weak-drive response needs an excited manifold".into()));
        }
        let (d0, d1) = (self.grades[0].len(), self.grades[1].len());
        if rho00.shape() != (d0, d0) || v_up.shape() != (d1, d0) {
            return Err(Error::DimensionMismatch { expected: d1 * d0, got: v_up.len() });
        }
        let shift = -drive_detuning;
        let rhs10 = (v_up * rho00) * (-I);
        let x10 = self.solve_block(ZERO, 1, 0, &rhs10, shift)?;
        let rhs11 = (v_up * x10.adjoint() - &x10 * v_up.adjoint()) * (-I);
        let x11 = self.solve_block(ZERO, 1, 1, &rhs11, shift)?;
        Ok(x11.trace().re)
    }

    /// Excitation-lowering jump feed into block `(n, m)` from `(n+1, m+1)`.
    fn feed(&self, n: usize, m: usize, x: &[DMatrix<C64>]) -> Option<DMatrix<C64>> {
        let g = self.levels();
        if n + 1 >= g || m + 1 >= g || self.lowering.is_empty() {
            return None;
        }
        let src = &x[(n + 1) * g + (m + 1)];
        let mut out = DMatrix::zeros(self.grades[n].len(), self.grades[m].len());
        for ch in &self.lowering {
            ch.accumulate(n + 1, m + 1, src, &mut out);
        }
        Some(out)
    }

    /// Solve `(c − L) X = B` for all blocks, top excitation first.
    pub fn solve_shifted(&self, c: C64, b: &[DMatrix<C64>]) -> Result<Vec<DMatrix<C64>>> {
        let g = self.levels();
        let mut x: Vec<DMatrix<C64>> = b.iter().map(|m| DMatrix::zeros(m.nrows(), m.ncols())).collect();
        for s in (0..=2 * (g - 1)).rev() {
            for n in 0..g {
                if s < n || s - n >= g {
                    continue;
                }
                let m = s - n;
                let mut rhs = b[n * g + m].clone();
                if let Some(f) = self.feed(n, m, &x) {
                    rhs += f;
                }
                if rhs.iter().all(|v| *v == ZERO) {
                    continue;
                }
                x[n * g + m] = self.solve_block(c, n, m, &rhs, 0.0)?;
            }
        }
        Ok(x)
    }

    /// `L[X]` block-wise (for diagnostics and slope measurements).
    pub fn apply(&self, x: &[DMatrix<C64>]) -> Vec<DMatrix<C64>> {
        let g = self.levels();
        let mut out = Vec::with_capacity(g * g);
        for n in 0..g {
            for m in 0..g {
                let xb = &x[n * g + m];
                let mut y = (&self.h_blocks[n] * xb) * (-I) + (xb * self.h_blocks[m].adjoint()) * I;
                for ch in &self.preserving {
                    ch.accumulate(n, m, xb, &mut y);
                }
                if let Some(f) = self.feed(n, m, x) {
                    y += f;
                }
                out.push(y);
            }
        }
        out
    }

    /// One step `ρ ← R(hL) ρ` for Hermitian `ρ`.
    pub fn step(&self, pade: &PadeTable, h: f64, rho: &[DMatrix<C64>]) -> Result<Vec<DMatrix<C64>>> {
        let g = self.levels();
        let mut acc: Vec<DMatrix<C64>> = rho.iter().map(|m| DMatrix::zeros(m.nrows(), m.ncols())).collect();
        for (z, r) in pade.poles.iter().zip(&pade.residues) {
            if z.im < -1e-12 {
                continue; // covered by the conjugate pole through Hermiticity
            }
            let x = self.solve_shifted(z / h, rho)?;
            let weight = -r / h;
            let real_pole = z.im.abs() <= 1e-12;
            for n in 0..g {
                for m in 0..g {
                    let k = n * g + m;
                    acc[k] += &x[k] * weight;
                    if !real_pole {
                        // (r x)† lives in block (m, n).
                        acc[m * g + n] += (&x[k] * weight).adjoint();
                    }
                }
            }
        }
        Ok(acc)
    }
}

/// Options for ladder propagation.
#[derive(Debug, Clone, Copy)]
pub struct LadderOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Numerator degree of the Padé approximant.
    pub pade_degree: usize,
    pub max_steps: usize,
    pub initial_step: Option<f64>,
}

/// Step counters of a ladder integration.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LadderStats {
    pub accepted: usize,
    pub rejected: usize,
    pub shifted_solves: usize,
}

fn blocks_error(a: &[DMatrix<C64>], b: &[DMatrix<C64>], rtol: f64, atol: f64) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.iter().zip(y.iter()) {
            let sc = atol + rtol * u.norm().max(v.norm());
            sum += ((u - v).norm() / sc).powi(2);
            count += 1;
        }
    }
    (sum / count.max(1) as f64).sqrt()
}

/// Propagate `ρ0` across `t_grid`, calling `observe(i, t_i, ρ_blocks)`.
pub fn integrate(
    gl: &GradedLiouvillian,
    rho0: &DMatrix<C64>,
    t_grid: &[f64],
    opts: &LadderOptions,
    mut observe: impl FnMut(usize, f64, &[DMatrix<C64>]) -> Result<()>,
) -> Result<LadderStats> {
    let pade = PadeTable::new(opts.pade_degree);
    let p = pade.order as f64;
    let mut stats = LadderStats::default();
    let mut rho = gl.split(rho0);
    let mut t = t_grid[0];
    observe(0, t, &rho)?;
    let span = t_grid[t_grid.len() - 1] - t;
    let mut h = opts.initial_step.unwrap_or(span * 1e-3).max(1e-300);
    let solves_per_step = pade.poles.iter().filter(|z| z.im >= -1e-12).count() * 3;
    for (gi, &target) in t_grid.iter().enumerate().skip(1) {
        while t < target {
            if stats.accepted + stats.rejected >= opts.max_steps {
                return Err(Error::Solver(format!("ladder propagation exceeded {} steps at t = {t}", opts.max_steps)));
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let hs = if clipped { remaining } else { h };
            if hs < 1e-14 * t.abs().max(1.0) && !clipped {
                return Err(Error::Stiffness { t, h: hs });
            }
            let big = gl.step(&pade, hs, &rho)?;
            let half = gl.step(&pade, hs / 2.0, &rho)?;
            let two = gl.step(&pade, hs / 2.0, &half)?;
            stats.shifted_solves += solves_per_step;
            let err = blocks_error(&big, &two, opts.rtol, opts.atol) / (2f64.powf(p) - 1.0);
            if err <= 1.0 {
                stats.accepted += 1;
                t = if clipped { target } else { t + hs };
                rho = two;
                let fac = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-1.0 / (p + 1.0))).clamp(0.2, 4.0) };
                h = hs.max(if clipped { h } else { 0.0 }) * fac;
            } else {
                stats.rejected += 1;
                h = hs * (0.9 * err.powf(-1.0 / (p + 1.0))).clamp(0.1, 0.9);
            }
        }
        observe(gi, t, &rho)?;
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pade_table_approximates_exponential() {
        for m in [1, 2, 3] {
            let pade = PadeTable::new(m);
            assert_eq!(pade.poles.len(), m + 1);
            assert!((pade.eval(ZERO) - 1.0).norm() < 1e-12);
            let z = C64::new(-0.05, 0.03);
            let err = (pade.eval(z) - z.exp()).norm();
            assert!(err < 10.0 * z.norm().powi(2 * m as i32 + 2), "m = {m}: {err}");
            // L-stability: R → 0 far in the left half-plane.
            assert!(pade.eval(C64::new(-1e8, 3e7)).norm() < 1e-6);
        }
        // Radau IIA(3) real pole.
        let radau = PadeTable::new(2);
        assert!(radau.poles.iter().any(|z| z.im.abs() < 1e-10 && (z.re - 3.637834252744496).abs() < 1e-9));
    }

    #[test]
    fn weak_drive_two_level_lorentzian() {
        use crate::dynamics::Dissipator;
        use crate::quantum_core::{lowering_operator, HilbertLayout};
        let s = lowering_operator(&HilbertLayout::two_level_sites(1), 0).unwrap();
        let mut spec = LiouvillianSpec::new(SparseOperator::zeros(2));
        spec.dissipators.push(Dissipator::single(1.0, s.clone()));
        let gl = GradedLiouvillian::new(&spec, &[0, 1]).unwrap();
        let eta = 1e-3;
        let v_up = gl.operator_block(&s.adjoint().scale(C64::new(eta, 0.0)), 1, 0);
        let rho00 = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
        for delta in [0.0, 0.3, -2.0] {
            let p = gl.weak_drive_excitation(&rho00, &v_up, delta).unwrap();
            let exact = eta * eta / (delta * delta + 0.25);
            assert!((p - exact).abs() < 1e-12 * exact.max(1e-12) + 1e-18, "Δ = {delta}: {p} vs {exact}");
        }
    }
}
