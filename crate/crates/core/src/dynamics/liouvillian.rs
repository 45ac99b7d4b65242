//! Compiled Liouvillian: fast application `dρ/dt = L(t)[ρ]` on column-major
//! dense density matrices and explicit superoperator assembly.

use nalgebra::DMatrix;

use super::{Dissipator, LiouvillianSpec};
use crate::quantum_core::SparseOperator;
use crate::{Error, Result, C64};

const I: C64 = C64::new(0.0, 1.0);

/// `out += α · A · ρ` for column-major `ρ` of dimension `n`.
pub(crate) fn add_left(a: &SparseOperator, rho: &[C64], out: &mut [C64], alpha: C64) {
    let n = a.dim();
    let (rp, ci, va) = (a.row_ptr(), a.col_idx(), a.values());
    for b in 0..n {
        let col = &rho[b * n..(b + 1) * n];
        let dst = &mut out[b * n..(b + 1) * n];
        for r in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for k in rp[r]..rp[r + 1] {
                s += va[k] * col[ci[k]];
            }
            if s != C64::new(0.0, 0.0) {
                dst[r] += alpha * s;
            }
        }
    }
}

/// `out += α · ρ · A` for column-major `ρ`.
pub(crate) fn add_right(a: &SparseOperator, rho: &[C64], out: &mut [C64], alpha: C64) {
    let n = a.dim();
    let (rp, ci, va) = (a.row_ptr(), a.col_idx(), a.values());
    for c in 0..n {
        let src = &rho[c * n..(c + 1) * n];
        for k in rp[c]..rp[c + 1] {
            let b = ci[k];
            let coef = alpha * va[k];
            let dst = &mut out[b * n..(b + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += coef * s;
            }
        }
    }
}

/// `out += α · ρ · A†` for column-major `ρ`.
pub(crate) fn add_right_adjoint(a: &SparseOperator, rho: &[C64], out: &mut [C64], alpha: C64) {
    let n = a.dim();
    let (rp, ci, va) = (a.row_ptr(), a.col_idx(), a.values());
    for b in 0..n {
        for k in rp[b]..rp[b + 1] {
            let c = ci[k];
            let coef = alpha * va[k].conj();
            let src = &rho[c * n..(c + 1) * n];
            let dst = &mut out[b * n..(b + 1) * n];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += coef * s;
            }
        }
    }
}

/// One collapse operator `L_m` together with `K_m = Σ_m' R_mm' L_m'†`, so the
/// jump part of a dissipator reads `Σ_m L_m ρ K_m`.
#[derive(Debug, Clone)]
struct JumpTerm {
    l: SparseOperator,
    k: SparseOperator,
}

/// A time-dependent Hermitian drive `f(t) O + f̄(t) O†`, operator pair stored.
#[derive(Clone)]
struct CompiledDrive {
    envelope: super::Envelope,
    op: SparseOperator,
    op_adj: SparseOperator,
}

/// Precomputed generator of a [`LiouvillianSpec`].
#[derive(Clone)]
pub struct Liouvillian {
    dim: usize,
    h_eff: SparseOperator,
    jumps: Vec<JumpTerm>,
    drives: Vec<CompiledDrive>,
    scratch_len: usize,
}

impl std::fmt::Debug for Liouvillian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Liouvillian")
            .field("dim", &self.dim)
            .field("h_eff_nnz", &self.h_eff.nnz())
            .field("jumps", &self.jumps.len())
            .field("drives", &self.drives.len())
            .finish()
    }
}

/// `−(i/2) Σ_mm' R_mm' L_m† L_m'` for one dissipator.
pub(crate) fn anticommutator_part(d: &Dissipator, dim: usize) -> Result<SparseOperator> {
    let mut terms: Vec<(C64, SparseOperator)> = Vec::new();
    let adj: Vec<SparseOperator> = d.collapse_ops.iter().map(|l| l.adjoint()).collect();
    for (m, lm_adj) in adj.iter().enumerate() {
        for (mp, lmp) in d.collapse_ops.iter().enumerate() {
            let r = d.rate_matrix[(m, mp)];
            if r != C64::new(0.0, 0.0) {
                terms.push((-0.5 * I * r, lm_adj.mul(lmp)?));
            }
        }
    }
    let refs: Vec<(C64, &SparseOperator)> = terms.iter().map(|(c, o)| (*c, o)).collect();
    SparseOperator::linear_combination(dim, &refs)
}

impl Liouvillian {
    pub fn new(spec: &LiouvillianSpec) -> Result<Self> {
        spec.validate()?;
        let dim = spec.hamiltonian.dim();
        let mut h_eff = spec.hamiltonian.clone();
        let mut jumps = Vec::new();
        for d in &spec.dissipators {
            h_eff = h_eff.add(&anticommutator_part(d, dim)?)?;
            let adj: Vec<SparseOperator> = d.collapse_ops.iter().map(|l| l.adjoint()).collect();
            for (m, l) in d.collapse_ops.iter().enumerate() {
                let terms: Vec<(C64, &SparseOperator)> = adj
                    .iter()
                    .enumerate()
                    .filter(|(mp, _)| d.rate_matrix[(m, *mp)] != C64::new(0.0, 0.0))
                    .map(|(mp, a)| (d.rate_matrix[(m, mp)], a))
                    .collect();
                if terms.is_empty() {
                    continue;
                }
                let k = SparseOperator::linear_combination(dim, &terms)?;
                jumps.push(JumpTerm { l: l.clone(), k });
            }
        }
        let drives = spec
            .drives
            .iter()
            .map(|d| CompiledDrive { envelope: d.envelope.clone(), op: d.operator.clone(), op_adj: d.operator.adjoint() })
            .collect();
        Ok(Self { dim, h_eff, jumps, drives, scratch_len: dim * dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_time_dependent(&self) -> bool {
        !self.drives.is_empty()
    }

    /// The static effective Hamiltonian `H − (i/2) Σ R_mm' L_m† L_m'`.
    pub fn effective_hamiltonian(&self) -> &SparseOperator {
        &self.h_eff
    }

    /// `out = L(t)[ρ]`; both slices column-major of length `dim²`.
    pub fn apply_into(&self, t: f64, rho: &[C64], out: &mut [C64], scratch: &mut Vec<C64>) {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        add_left(&self.h_eff, rho, out, -I);
        add_right_adjoint(&self.h_eff, rho, out, I);
        scratch.resize(self.scratch_len, C64::new(0.0, 0.0));
        for j in &self.jumps {
            scratch.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            add_right(&j.k, rho, scratch, C64::new(1.0, 0.0));
            add_left(&j.l, scratch, out, C64::new(1.0, 0.0));
        }
        for d in &self.drives {
            let f = (d.envelope)(t);
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            add_left(&d.op, rho, out, -I * f);
            add_left(&d.op_adj, rho, out, -I * f.conj());
            add_right(&d.op, rho, out, I * f);
            add_right(&d.op_adj, rho, out, I * f.conj());
        }
    }

    /// `L(t)[ρ]` as a new matrix.
    pub fn apply(&self, t: f64, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim, self.dim);
        let mut scratch = Vec::new();
        self.apply_into(t, rho.as_slice(), out.as_mut_slice(), &mut scratch);
        out
    }
}

/// Coherence-sector bookkeeping for superoperator assembly: the set of
/// matrix-element pairs `(a, b)` kept as unknowns.
#[derive(Debug, Clone)]
pub(crate) struct PairIndex {
    pub pairs: Vec<(usize, usize)>,
    lookup: std::collections::HashMap<(usize, usize), usize>,
}

impl PairIndex {
    pub fn new(pairs: Vec<(usize, usize)>) -> Self {
        let lookup = pairs.iter().enumerate().map(|(k, &p)| (p, k)).collect();
        Self { pairs, lookup }
    }

    pub fn all(dim: usize) -> Self {
        Self::new((0..dim).flat_map(|b| (0..dim).map(move |a| (a, b))).collect())
    }

    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.lookup.get(&(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

/// Dense superoperator of a time-independent spec on the unknowns in
/// `index`: `(Lρ)_p = Σ_q S_pq ρ_q`.
///
/// Entries mapping into pairs outside `index` are dropped, so `index` must
/// be invariant under the generator.
pub(crate) fn superoperator_dense(spec: &LiouvillianSpec, index: &PairIndex) -> Result<DMatrix<C64>> {
    if !spec.drives.is_empty() {
        return Err(Error::Configuration("superoperator assembly requires a time-independent spec".into()));
    }
    let dim = spec.hamiltonian.dim();
    let mut h_eff = spec.hamiltonian.clone();
    for d in &spec.dissipators {
        h_eff = h_eff.add(&anticommutator_part(d, dim)?)?;
    }
    let n = index.len();
    let mut s = DMatrix::<C64>::zeros(n, n);
    // Column-oriented views of H_eff for ρ H_eff†: (ρ H†)_{ab} = Σ_c ρ_{ac} conj(H_{bc}).
    for (p, &(a, b)) in index.pairs.iter().enumerate() {
        for (c, h) in h_eff.row(a) {
            if let Some(q) = index.get(c, b) {
                s[(p, q)] += -I * h;
            }
        }
        for (c, h) in h_eff.row(b) {
            if let Some(q) = index.get(a, c) {
                s[(p, q)] += I * h.conj();
            }
        }
    }
    for d in &spec.dissipators {
        for (m, lm) in d.collapse_ops.iter().enumerate() {
            for (mp, lmp) in d.collapse_ops.iter().enumerate() {
                let r = d.rate_matrix[(m, mp)];
                if r == C64::new(0.0, 0.0) {
                    continue;
                }
                // (L_m ρ L_m'†)_{ab} = Σ L_m[a,c] ρ_cd conj(L_m'[b,d]).
                for (a, c, v) in lm.entries() {
                    for (b, dd, w) in lmp.entries() {
                        if let (Some(p), Some(q)) = (index.get(a, b), index.get(c, dd)) {
                            s[(p, q)] += r * v * w.conj();
                        }
                    }
                }
            }
        }
    }
    Ok(s)
}
