use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, PhotonConfig};
use super::mode::ModeLabel;
use super::state::JointState;
use super::{check_unit_range, FockError};

/// Sparse linear map on the basis, stored by column: `cols[j]` lists the
/// `(row, value)` entries of column `j`.
struct SparseMap {
    cols: Vec<Vec<(usize, Complex64)>>,
}

impl SparseMap {
    /// `Σ_k K_k ρ K_k†`.
    fn conjugate_sum(maps: &[SparseMap], rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = rho.nrows();
        let mut out = DMatrix::<Complex64>::zeros(n, n);
        let mut left = DMatrix::<Complex64>::zeros(n, n);
        for k in maps {
            left.fill(Complex64::new(0.0, 0.0));
            // left = K ρ, accumulated row by row.
            for (j, col) in k.cols.iter().enumerate() {
                for &(i, w) in col {
                    for c in 0..n {
                        let v = rho[(j, c)];
                        if v.re != 0.0 || v.im != 0.0 {
                            left[(i, c)] += w * v;
                        }
                    }
                }
            }
            // out += left K†, accumulated column by column.
            for (j, col) in k.cols.iter().enumerate() {
                for &(l, w) in col {
                    let wc = w.conj();
                    for r in 0..n {
                        let v = left[(r, j)];
                        if v.re != 0.0 || v.im != 0.0 {
                            out[(r, l)] += v * wc;
                        }
                    }
                }
            }
        }
        out
    }
}

/// Photon-number conserving map induced by a 2×2 mode transform on modes
/// (`a`, `b`). Column `c` of `u` is the image of a†_c in the (a†, b†) basis.
fn mode_transform_map(basis: &Basis, a: usize, b: usize, u: &Matrix2<Complex64>) -> SparseMap {
    let one = Complex64::new(1.0, 0.0);
    let image = |m: usize| -> Vec<(usize, Complex64)> {
        if m == a {
            vec![(a, u[(0, 0)]), (b, u[(1, 0)])]
        } else if m == b {
            vec![(a, u[(0, 1)]), (b, u[(1, 1)])]
        } else {
            vec![(m, one)]
        }
    };
    let cols = (0..basis.dim())
        .map(|j| {
            let ions = Basis::ion_index(j);
            basis
                .config(j)
                .transform(image)
                .into_iter()
                .filter(|(_, c)| c.norm_sqr() > 0.0)
                .map(|(cfg, c)| (basis.index(cfg, ions), c))
                .collect()
        })
        .collect();
    SparseMap { cols }
}

/// Applies an arbitrary unitary 2×2 mode transform.
pub fn apply_mode_unitary(
    state: &JointState,
    mode_a: &ModeLabel,
    mode_b: &ModeLabel,
    u: &Matrix2<Complex64>,
) -> Result<JointState, FockError> {
    if mode_a == mode_b {
        return Err(FockError::SameMode(*mode_a));
    }
    let defect = (u.adjoint() * u - Matrix2::identity()).norm();
    if defect > 1e-12 {
        return Err(FockError::NotUnitary(defect));
    }
    let a = state.basis.mode_index(mode_a)?;
    let b = state.basis.mode_index(mode_b)?;
    let map = mode_transform_map(&state.basis, a, b, u);
    Ok(state.with_matrix(SparseMap::conjugate_sum(&[map], &state.rho)))
}

/// Lossless two-mode coupler.
///
/// Creation operators transform as
/// `a† → √T a† + i√(1−T) e^{iφ} b†` and `b† → i√(1−T) e^{−iφ} a† + √T b†`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterSpec {
    pub mode_a: ModeLabel,
    pub mode_b: ModeLabel,
    pub transmissivity: f64,
    pub phase: f64,
}

impl BeamsplitterSpec {
    pub fn new(mode_a: ModeLabel, mode_b: ModeLabel, transmissivity: f64) -> Self {
        Self { mode_a, mode_b, transmissivity, phase: 0.0 }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        Self { phase, ..self }
    }

    /// Column `c` holds the image of the c-th creation operator.
    pub fn mode_matrix(&self) -> Matrix2<Complex64> {
        let t = self.transmissivity.sqrt();
        let r = (1.0 - self.transmissivity).max(0.0).sqrt();
        let i = Complex64::i();
        Matrix2::new(
            Complex64::new(t, 0.0),
            i * r * Complex64::from_polar(1.0, -self.phase),
            i * r * Complex64::from_polar(1.0, self.phase),
            Complex64::new(t, 0.0),
        )
    }

    /// The element that undoes this one.
    pub fn inverse(&self) -> BeamsplitterSpec {
        // The adjoint of the mode matrix equals the matrix with φ → φ + π.
        self.with_phase(self.phase + std::f64::consts::PI)
    }
}

pub fn apply_beamsplitter(state: &JointState, bs: &BeamsplitterSpec) -> Result<JointState, FockError> {
    check_unit_range("transmissivity", bs.transmissivity)?;
    apply_mode_unitary(state, &bs.mode_a, &bs.mode_b, &bs.mode_matrix())
}

/// Single-mode amplitude damping with transmission `p`: each photon survives
/// independently with probability `p`.
pub fn apply_loss(state: &JointState, mode: &ModeLabel, p: f64) -> Result<JointState, FockError> {
    check_unit_range("transmission", p)?;
    let m = state.basis.mode_index(mode)?;
    let basis = &state.basis;
    let kraus: Vec<SparseMap> = (0..=2usize)
        .map(|lost| {
            let cols = (0..basis.dim())
                .map(|j| {
                    let cfg = basis.config(j);
                    let n = cfg.count_in(m);
                    match cfg.remove(m, lost) {
                        Some(out) if lost <= n => {
                            let kept = (n - lost) as i32;
                            let amp = (binomial(n, lost) as f64 * p.powi(kept) * (1.0 - p).powi(lost as i32)).sqrt();
                            if amp > 0.0 {
                                vec![(basis.index(out, Basis::ion_index(j)), amp.into())]
                            } else {
                                Vec::new()
                            }
                        }
                        _ => Vec::new(),
                    }
                })
                .collect();
            SparseMap { cols }
        })
        .collect();
    Ok(state.with_matrix(SparseMap::conjugate_sum(&kraus, &state.rho)))
}

fn binomial(n: usize, k: usize) -> usize {
    match (n, k) {
        (_, 0) => 1,
        (n, k) if k == n => 1,
        (2, 1) => 2,
        _ => (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i),
    }
}

/// Number-operator phase `e^{i n φ}` on `mode`.
pub fn apply_phase(state: &JointState, mode: &ModeLabel, phi: f64) -> Result<JointState, FockError> {
    let m = state.basis.mode_index(mode)?;
    let n = state.dim();
    let counts: Vec<i32> = (0..n).map(|i| state.basis.config(i).count_in(m) as i32).collect();
    let mut rho = state.rho.clone();
    for i in 0..n {
        for j in 0..n {
            let dn = counts[i] - counts[j];
            if dn != 0 {
                rho[(i, j)] *= Complex64::from_polar(1.0, dn as f64 * phi);
            }
        }
    }
    Ok(state.with_matrix(rho))
}

/// Coherent leakage of amplitude `chi` from `from` into `to`, realized as a
/// coupler with transmissivity `1 − χ²`. Power cross-talk is `χ²`
/// (`10·log10 χ²` in dB).
pub fn apply_crosstalk(
    state: &JointState,
    from: &ModeLabel,
    to: &ModeLabel,
    chi: f64,
) -> Result<JointState, FockError> {
    check_unit_range("cross-talk amplitude", chi)?;
    apply_beamsplitter(state, &BeamsplitterSpec::new(*from, *to, 1.0 - chi * chi))
}

/// Total photon count of every basis vector; used by detection.
pub(crate) fn config_counts(basis: &Basis, modes: &[usize]) -> Vec<usize> {
    (0..basis.num_configs())
        .map(|c| {
            let cfg: PhotonConfig = basis.config(c * 4);
            modes.iter().map(|&m| cfg.count_in(m)).sum()
        })
        .collect()
}
