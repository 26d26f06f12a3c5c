use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mode::Qubit;
use super::FockError;
use crate::tolerances;

/// Two-qubit ion density matrix, index `ion1 * 2 + ion2` with Down = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct IonState(Matrix4<Complex64>);

impl IonState {
    pub(crate) fn zero_matrix() -> Matrix4<Complex64> {
        Matrix4::zeros()
    }

    pub(crate) fn from_unnormalized(m: Matrix4<Complex64>) -> Self {
        let tr = m.trace().re;
        IonState(m / Complex64::new(tr, 0.0))
    }

    pub fn new(m: Matrix4<Complex64>) -> Result<Self, FockError> {
        let tr = m.trace().re;
        if (tr - 1.0).abs() > tolerances::NORMALIZED_INPUT {
            return Err(FockError::NotNormalized(tr));
        }
        Ok(IonState(m))
    }

    pub fn pure(amplitudes: [Complex64; 4]) -> Result<Self, FockError> {
        let v = Vector4::from(amplitudes);
        let n = v.norm_squared();
        if n == 0.0 {
            return Err(FockError::ZeroNorm);
        }
        Ok(IonState(v * v.adjoint() / Complex64::new(n, 0.0)))
    }

    pub fn bell(target: BellTarget) -> Self {
        IonState::pure(target.amplitudes()).expect("Bell vectors are normalized")
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.0
    }

    pub fn population(&self, ion1: Qubit, ion2: Qubit) -> f64 {
        let i = ion1.bit() * 2 + ion2.bit();
        self.0[(i, i)].re
    }

    pub fn apply(&self, correction: &Correction) -> IonState {
        let u = correction.unitary();
        IonState(u * self.0 * u.adjoint())
    }

    /// `⟨B| C ρ C† |B⟩`.
    pub fn fidelity(&self, target: BellTarget, correction: &Correction) -> f64 {
        let b = Vector4::from(target.amplitudes());
        let rho = self.apply(correction).0;
        (b.adjoint() * rho * b)[(0, 0)].re.clamp(0.0, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BellTarget {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellTarget {
    pub fn amplitudes(self) -> [Complex64; 4] {
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        match self {
            BellTarget::PsiPlus => [z, r, r, z],
            BellTarget::PsiMinus => [z, -r, r, z],
            BellTarget::PhiPlus => [r, z, z, r],
            BellTarget::PhiMinus => [r, z, z, -r],
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BellTarget::PsiPlus => "psi+",
            BellTarget::PsiMinus => "psi-",
            BellTarget::PhiPlus => "phi+",
            BellTarget::PhiMinus => "phi-",
        }
    }
}

/// Local feed-forward: an optional bit flip on ion 2 followed by the phase
/// `e^{iθ}` on `|↑⟩` of ion 1.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    pub phase: f64,
    pub flip: bool,
}

impl Correction {
    pub fn phase(phase: f64) -> Self {
        Self { phase, flip: false }
    }

    pub fn unitary(&self) -> Matrix4<Complex64> {
        let ph = Complex64::from_polar(1.0, self.phase);
        let one = Complex64::new(1.0, 0.0);
        let p = Matrix4::from_diagonal(&Vector4::new(one, one, ph, ph));
        if !self.flip {
            return p;
        }
        let mut x = Matrix4::zeros();
        for (i, j) in [(0, 1), (1, 0), (2, 3), (3, 2)] {
            x[(i, j)] = one;
        }
        p * x
    }
}

pub fn bell_fidelity(ions: &IonState, target: BellTarget, correction: &Correction) -> f64 {
    ions.fidelity(target, correction)
}
