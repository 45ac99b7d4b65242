//! Composite Hilbert spaces, sparse operators and density matrices.
//!
//! Basis convention: subsystems are ordered as listed in the
//! [`HilbertLayout`] and the composite index is little-endian — the first
//! subsystem varies fastest. Electronic states are `|g⟩ = 0`, `|e⟩ = 1`.

mod density;
mod layout;
mod operator;

pub use density::DensityMatrix;
pub use layout::{HilbertLayout, Subspace, SubsystemKind};
pub use operator::SparseOperator;

use nalgebra::DMatrix;

use crate::{Error, Result, C64};

/// Lowering operator `σ = |g⟩⟨e|` on a two-level `site`.
pub fn lowering_operator(layout: &HilbertLayout, site: usize) -> Result<SparseOperator> {
    layout.require(site, SubsystemKind::TwoLevel)?;
    Ok(layout.embed(site, &[(0, 1, C64::new(1.0, 0.0))]))
}

/// Truncated annihilation operator `b` (entries `√n` on the superdiagonal) on
/// a boson `site`.
pub fn boson_annihilation(layout: &HilbertLayout, site: usize) -> Result<SparseOperator> {
    layout.require(site, SubsystemKind::Boson)?;
    let dim = layout.subsystem_dim(site);
    let local: Vec<_> = (1..dim).map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0))).collect();
    Ok(layout.embed(site, &local))
}

/// `Tr(ρ O)`.
pub fn expectation(rho: &DensityMatrix, op: &SparseOperator) -> Result<C64> {
    rho.expectation(op)
}

/// `Tr(ρ O)` for a raw dense matrix, as handed to trajectory observers.
pub fn trace_product(op: &SparseOperator, rho: &DMatrix<C64>) -> Result<C64> {
    if op.dim() != rho.nrows() || !rho.is_square() {
        return Err(Error::DimensionMismatch { expected: op.dim(), got: rho.nrows() });
    }
    Ok(op.entries().map(|(r, c, v)| v * rho[(c, r)]).sum())
}
