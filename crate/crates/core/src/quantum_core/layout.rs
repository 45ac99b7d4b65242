use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use super::SparseOperator;
use crate::{Error, Result, C64};

/// Kind of a tensor factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemKind {
    TwoLevel,
    Boson,
}

impl SubsystemKind {
    fn name(self) -> &'static str {
        match self {
            SubsystemKind::TwoLevel => "two-level system",
            SubsystemKind::Boson => "boson mode",
        }
    }
}

/// Ordered tensor-product structure; the first subsystem varies fastest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertLayout {
    subsystems: Vec<(SubsystemKind, usize)>,
    strides: Vec<usize>,
    total_dim: usize,
}

impl HilbertLayout {
    /// Layout from kinds and local dimensions (`2` for two-level systems,
    /// `n_max + 1 ≥ 2` for bosons).
    pub fn new(kinds: Vec<SubsystemKind>, dims: &[usize]) -> Result<Self> {
        if kinds.len() != dims.len() {
            return Err(Error::DimensionMismatch { expected: kinds.len(), got: dims.len() });
        }
        let mut strides = Vec::with_capacity(dims.len());
        let mut total: usize = 1;
        for (&kind, &dim) in kinds.iter().zip(dims) {
            match kind {
                SubsystemKind::TwoLevel if dim != 2 => {
                    return Err(Error::param("layout", "two-level subsystems have dimension 2"))
                }
                SubsystemKind::Boson if dim < 2 => {
                    return Err(Error::param("layout", "boson subsystems need n_max >= 1"))
                }
                _ => {}
            }
            strides.push(total);
            total = total
                .checked_mul(dim)
                .ok_or_else(|| Error::param("layout", "total dimension overflows"))?;
        }
        Ok(Self { subsystems: kinds.into_iter().zip(dims.iter().copied()).collect(), strides, total_dim: total })
    }

    /// `n` two-level systems.
    pub fn two_level_sites(n: usize) -> Self {
        Self::new(vec![SubsystemKind::TwoLevel; n], &vec![2; n]).expect("valid layout")
    }

    /// `n` two-level systems (sites `0..n`) followed by one boson mode per
    /// molecule (sites `n..2n`) truncated at `n_max` quanta.
    pub fn molecules_with_modes(n: usize, n_max: usize) -> Result<Self> {
        let mut kinds = vec![SubsystemKind::TwoLevel; n];
        kinds.extend(vec![SubsystemKind::Boson; n]);
        let mut dims = vec![2; n];
        dims.extend(vec![n_max + 1; n]);
        Self::new(kinds, &dims)
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn kind(&self, site: usize) -> SubsystemKind {
        self.subsystems[site].0
    }

    pub fn subsystem_dim(&self, site: usize) -> usize {
        self.subsystems[site].1
    }

    /// Indices of all two-level subsystems, in order.
    pub fn two_level_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.kind(s) == SubsystemKind::TwoLevel).collect()
    }

    /// Indices of all boson subsystems, in order.
    pub fn boson_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&s| self.kind(s) == SubsystemKind::Boson).collect()
    }

    pub(crate) fn require(&self, site: usize, kind: SubsystemKind) -> Result<()> {
        if site >= self.len() {
            return Err(Error::param("site", format!("{site} out of range for {} subsystems", self.len())));
        }
        if self.kind(site) != kind {
            return Err(Error::WrongSubsystem { site, expected: kind.name(), found: self.kind(site).name() });
        }
        Ok(())
    }

    /// Local state of `site` in composite basis state `index`.
    pub fn digit(&self, index: usize, site: usize) -> usize {
        (index / self.strides[site]) % self.subsystems[site].1
    }

    /// All local states of composite basis state `index`.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.len()).map(|s| self.digit(index, s)).collect()
    }

    /// Composite index of a list of local states.
    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Number of excited two-level systems in basis state `index`.
    pub fn excitation_number(&self, index: usize) -> usize {
        self.two_level_indices().iter().map(|&s| self.digit(index, s)).sum()
    }

    /// Total vibrational quanta in basis state `index`.
    pub fn vibrational_quanta(&self, index: usize) -> usize {
        self.boson_indices().iter().map(|&s| self.digit(index, s)).sum()
    }

    /// Embed a local operator, given as `(row, col, value)` entries in the
    /// local basis of `site`, as identity ⊗ … ⊗ local ⊗ … ⊗ identity.
    pub fn embed(&self, site: usize, local: &[(usize, usize, C64)]) -> SparseOperator {
        let stride = self.strides[site];
        let mut trips = Vec::with_capacity(self.total_dim * local.len() / self.subsystem_dim(site).max(1));
        for index in 0..self.total_dim {
            let d = self.digit(index, site);
            for &(r, c, v) in local {
                if c == d {
                    trips.push((index + r * stride - c * stride, index, v));
                }
            }
        }
        SparseOperator::from_triplets(self.total_dim, trips)
    }

    /// Identity on the full space.
    pub fn identity(&self) -> SparseOperator {
        SparseOperator::identity(self.total_dim)
    }
}

/// A subset of composite basis states spanning a truncated model space.
#[derive(Debug, Clone)]
pub struct Subspace {
    full_dim: usize,
    states: Vec<usize>,
    position: HashMap<usize, usize>,
}

impl Subspace {
    /// Basis states of `layout` satisfying `keep`, in increasing index order.
    pub fn from_predicate(layout: &HilbertLayout, keep: impl Fn(usize) -> bool) -> Self {
        let states: Vec<usize> = (0..layout.total_dim()).filter(|&i| keep(i)).collect();
        let position = states.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        Self { full_dim: layout.total_dim(), states, position }
    }

    /// The whole space.
    pub fn full(layout: &HilbertLayout) -> Self {
        Self::from_predicate(layout, |_| true)
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn full_dim(&self) -> usize {
        self.full_dim
    }

    /// Full-space index of the `p`-th kept state.
    pub fn state(&self, p: usize) -> usize {
        self.states[p]
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Position of a full-space state in the subspace, if kept.
    pub fn position(&self, full_index: usize) -> Option<usize> {
        self.position.get(&full_index).copied()
    }

    /// Compress a full-space operator onto the subspace (`P O P`).
    pub fn restrict(&self, op: &SparseOperator) -> Result<SparseOperator> {
        if op.dim() != self.full_dim {
            return Err(Error::DimensionMismatch { expected: self.full_dim, got: op.dim() });
        }
        let mut trips = Vec::new();
        for (pr, &r) in self.states.iter().enumerate() {
            for (c, v) in op.row(r) {
                if let Some(pc) = self.position(c) {
                    trips.push((pr, pc, v));
                }
            }
        }
        Ok(SparseOperator::from_triplets(self.dim(), trips))
    }

    /// Restrict a full-space state vector onto the subspace.
    pub fn restrict_vector(&self, psi: &[C64]) -> Vec<C64> {
        self.states.iter().map(|&s| psi[s]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_and_digits_round_trip() {
        let layout = HilbertLayout::molecules_with_modes(2, 2).unwrap();
        assert_eq!(layout.total_dim(), 36);
        for i in 0..36 {
            assert_eq!(layout.index(&layout.digits(i)), i);
        }
        assert_eq!(layout.two_level_indices(), vec![0, 1]);
        assert_eq!(layout.boson_indices(), vec![2, 3]);
        assert_eq!(layout.vibrational_quanta(layout.index(&[1, 0, 2, 1])), 3);
    }

    #[test]
    fn invalid_layouts_rejected() {
        assert!(HilbertLayout::new(vec![SubsystemKind::TwoLevel], &[3]).is_err());
        assert!(HilbertLayout::new(vec![SubsystemKind::Boson], &[1]).is_err());
        assert!(HilbertLayout::new(vec![SubsystemKind::Boson], &[2, 2]).is_err());
    }

    #[test]
    fn restriction_keeps_inner_block() {
        let layout = HilbertLayout::two_level_sites(3);
        let sub = Subspace::from_predicate(&layout, |i| layout.excitation_number(i) <= 1);
        assert_eq!(sub.dim(), 4);
        let s0 = crate::quantum_core::lowering_operator(&layout, 0).unwrap();
        let r = sub.restrict(&s0).unwrap();
        assert_eq!(r.nnz(), 1);
        assert_eq!(sub.position(1), Some(1));
        assert_eq!(sub.position(3), None);
    }
}
