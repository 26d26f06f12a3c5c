use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::basis::Basis;
use super::mode::{BasisKet, ModeLabel};
use super::FockError;
use crate::tolerances;

/// Density operator over (ion ⊗ ion ⊗ truncated multimode Fock space).
///
/// Values are immutable; every operation returns a new state.
#[derive(Clone, Debug)]
pub struct JointState {
    pub(crate) basis: Arc<Basis>,
    pub(crate) rho: DMatrix<Complex64>,
}

/// Builds the normalized pure state `|ψ⟩⟨ψ|` from (ket, amplitude) pairs.
/// The mode set is the set of modes occupied by any ket.
pub fn make_state(kets: &[(BasisKet, Complex64)]) -> Result<JointState, FockError> {
    let modes: BTreeSet<ModeLabel> = kets.iter().flat_map(|(k, _)| k.occupations.keys().copied()).collect();
    JointState::from_pure(&modes.into_iter().collect::<Vec<_>>(), kets)
}

impl JointState {
    /// Pure state over an explicit mode set (modes may be unoccupied).
    pub fn from_pure(modes: &[ModeLabel], kets: &[(BasisKet, Complex64)]) -> Result<Self, FockError> {
        Self::from_mixture(modes, &[kets.to_vec()])
    }

    /// Mixture `Σ_c |v_c⟩⟨v_c|` of unnormalized components, rescaled to unit
    /// trace. Relative weights are carried by the component amplitudes.
    pub fn from_mixture(modes: &[ModeLabel], components: &[Vec<(BasisKet, Complex64)>]) -> Result<Self, FockError> {
        if components.iter().all(|c| c.is_empty()) {
            return Err(FockError::EmptyState);
        }
        let basis = Arc::new(Basis::new(modes.to_vec()));
        let dim = basis.dim();
        let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
        for component in components {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            for (ket, amp) in component {
                v[basis.index_of(ket)?] += amp;
            }
            for (i, vi) in v.iter().enumerate().filter(|(_, x)| x.norm_sqr() > 0.0) {
                for (j, vj) in v.iter().enumerate().filter(|(_, x)| x.norm_sqr() > 0.0) {
                    rho[(i, j)] += vi * vj.conj();
                }
            }
        }
        let trace = rho.trace().re;
        if !(trace > 0.0) {
            return Err(FockError::ZeroNorm);
        }
        rho /= Complex64::new(trace, 0.0);
        Ok(Self { basis, rho })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn modes(&self) -> &[ModeLabel] {
        self.basis.modes()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    /// Basis vector at `index`.
    pub fn ket(&self, index: usize) -> BasisKet {
        self.basis.ket(index)
    }

    pub fn index_of(&self, ket: &BasisKet) -> Result<usize, FockError> {
        self.basis.index_of(ket)
    }

    /// Matrix element `⟨bra|ρ|ket⟩`.
    pub fn element(&self, bra: &BasisKet, ket: &BasisKet) -> Result<Complex64, FockError> {
        Ok(self.rho[(self.index_of(bra)?, self.index_of(ket)?)])
    }

    pub fn population(&self, ket: &BasisKet) -> Result<f64, FockError> {
        Ok(self.element(ket, ket)?.re)
    }

    /// Expectation of the number operator of `mode`.
    pub fn mean_photon_number(&self, mode: &ModeLabel) -> Result<f64, FockError> {
        let m = self.basis.mode_index(mode)?;
        Ok((0..self.dim()).map(|i| self.basis.config(i).count_in(m) as f64 * self.rho[(i, i)].re).sum())
    }

    /// Re-embeds the state in a basis that also contains `extra` (in vacuum).
    pub fn extend_modes(&self, extra: &[ModeLabel]) -> JointState {
        let mut modes = self.modes().to_vec();
        modes.extend_from_slice(extra);
        let basis = Arc::new(Basis::new(modes));
        if basis.modes() == self.modes() {
            return self.clone();
        }
        let map: Vec<usize> =
            (0..self.dim()).map(|i| basis.index_of(&self.basis.ket(i)).expect("superset basis")).collect();
        let mut rho = DMatrix::zeros(basis.dim(), basis.dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                rho[(map[i], map[j])] = self.rho[(i, j)];
            }
        }
        JointState { basis, rho }
    }

    /// Largest elementwise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Checks Hermiticity, positivity and trace bound.
    pub fn is_physical(&self) -> bool {
        self.hermiticity_defect() <= tolerances::HERMITIAN
            && self.min_eigenvalue() >= tolerances::PSD_EIGENVALUE
            && self.trace() <= 1.0 + tolerances::TRACE
    }

    /// Frobenius distance between two states on the same basis.
    pub fn distance(&self, other: &JointState) -> f64 {
        assert_eq!(self.modes(), other.modes(), "states live on different bases");
        (&self.rho - &other.rho).norm()
    }

    pub(crate) fn with_matrix(&self, rho: DMatrix<Complex64>) -> JointState {
        JointState { basis: Arc::clone(&self.basis), rho }
    }
}
