//! Engine versus an independent dense reference over the full ≤2-photon
//! occupation basis: elements are built from annihilation matrices (the
//! coupler as `exp(iG)` of its generator), loss is an explicit Kraus sum
//! and detection a dense POVM.

use nalgebra::DMatrix;
use num_complex::Complex64;
use pme_core::fock::MatchComponent;
use pme_core::{
    apply_beamsplitter, apply_crosstalk, apply_loss, apply_phase, detect, BasisKet, BeamsplitterSpec, Channel,
    DetectorSpec, JointState, ModeLabel, Qubit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M = DMatrix<Complex64>;

const CUT: usize = 3;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Occupation-number vectors with at most two photons in total, ordered
/// by their base-3 encoding, tensored with the 4-dimensional ion space.
struct Dense {
    occ: Vec<Vec<usize>>,
}

impl Dense {
    fn new(n_modes: usize) -> Self {
        let occ = (0..CUT.pow(n_modes as u32))
            .map(|p| (0..n_modes).map(|k| p / CUT.pow(k as u32) % CUT).collect::<Vec<_>>())
            .filter(|o| o.iter().sum::<usize>() <= 2)
            .collect();
        Self { occ }
    }

    fn photon_dim(&self) -> usize {
        self.occ.len()
    }

    fn dim(&self) -> usize {
        4 * self.photon_dim()
    }

    fn index(&self, ions: usize, occ: &[usize]) -> usize {
        ions * self.photon_dim() + self.occ.iter().position(|o| o == occ).expect("occupation in basis")
    }

    /// Annihilation operator on mode `k`, photon space only.
    fn lower(&self, k: usize) -> M {
        let pd = self.photon_dim();
        let mut a = M::zeros(pd, pd);
        for (p, o) in self.occ.iter().enumerate() {
            if o[k] > 0 {
                let mut down = o.clone();
                down[k] -= 1;
                let q = self.occ.iter().position(|x| *x == down).unwrap();
                a[(q, p)] = c((o[k] as f64).sqrt());
            }
        }
        a
    }

    /// `1_ions ⊗ op`.
    fn lift(&self, op: &M) -> M {
        M::identity(4, 4).kronecker(op)
    }

    fn diag_fn(&self, k: usize, f: impl Fn(usize) -> Complex64) -> M {
        let pd = self.photon_dim();
        M::from_diagonal(&nalgebra::DVector::from_iterator(self.dim(), (0..self.dim()).map(|i| f(self.occ[i % pd][k]))))
    }
}

fn expm(g: &M) -> M {
    let norm = g.iter().map(|z| z.norm()).sum::<f64>();
    let mut s = 0;
    while norm / 2f64.powi(s) > 0.25 {
        s += 1;
    }
    let x = g / c(2f64.powi(s));
    let mut term = M::identity(g.nrows(), g.ncols());
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &x / c(k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[derive(Clone, Copy, Debug)]
enum Element {
    Splitter { a: usize, b: usize, t: f64, phi: f64 },
    Loss { m: usize, p: f64 },
    Phase { m: usize, phi: f64 },
    Crosstalk { from: usize, to: usize, chi: f64 },
}

fn splitter_unitary(d: &Dense, a: usize, b: usize, t: f64, phi: f64) -> M {
    let (la, lb) = (d.lower(a), d.lower(b));
    let theta = t.sqrt().acos();
    let e = Complex64::from_polar(1.0, phi);
    let g = (la.adjoint() * &lb * e.conj() + lb.adjoint() * &la * e) * c(theta);
    d.lift(&expm(&(g * Complex64::i())))
}

fn oracle_apply(d: &Dense, rho: &M, el: Element) -> M {
    match el {
        Element::Splitter { a, b, t, phi } => {
            let u = splitter_unitary(d, a, b, t, phi);
            &u * rho * u.adjoint()
        }
        Element::Crosstalk { from, to, chi } => {
            let u = splitter_unitary(d, from, to, 1.0 - chi * chi, 0.0);
            &u * rho * u.adjoint()
        }
        Element::Phase { m, phi } => {
            let u = d.diag_fn(m, |n| Complex64::from_polar(1.0, n as f64 * phi));
            &u * rho * u.adjoint()
        }
        Element::Loss { m, p } => {
            let a = d.lift(&d.lower(m));
            let survive = d.diag_fn(m, |n| c(p.powf(n as f64 / 2.0)));
            let mut out = M::zeros(d.dim(), d.dim());
            let mut ak = M::identity(d.dim(), d.dim());
            let mut fact = 1.0;
            for k in 0..CUT {
                if k > 0 {
                    ak = &a * ak;
                    fact *= k as f64;
                }
                let kraus = &survive * &ak * c(((1.0 - p).powi(k as i32) / fact).sqrt());
                out += &kraus * rho * kraus.adjoint();
            }
            out
        }
    }
}

fn labels(n: usize) -> Vec<ModeLabel> {
    (0..n)
        .map(|i| {
            let base = ModeLabel::new((i / 2) as u8, Channel::Path);
            if i % 2 == 1 {
                base.with_match(MatchComponent::Orthogonal)
            } else {
                base
            }
        })
        .collect()
}

fn random_state(rng: &mut ChaCha8Rng, modes: &[ModeLabel]) -> Vec<(BasisKet, Complex64)> {
    let n_terms = rng.random_range(1..=4);
    (0..n_terms)
        .map(|_| {
            let q = |b: bool| if b { Qubit::Up } else { Qubit::Down };
            let mut ket = BasisKet::new(q(rng.random()), q(rng.random()));
            for _ in 0..rng.random_range(0..=2) {
                ket = ket.with_photon(modes[rng.random_range(0..modes.len())]);
            }
            (ket, Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect()
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Element {
    let two = |rng: &mut ChaCha8Rng| {
        let a = rng.random_range(0..n);
        let b = (a + rng.random_range(1..n)) % n;
        (a, b)
    };
    match rng.random_range(0..4) {
        0 => {
            let (a, b) = two(rng);
            Element::Splitter { a, b, t: rng.random(), phi: rng.random_range(-3.0..3.0) }
        }
        1 => Element::Loss { m: rng.random_range(0..n), p: rng.random() },
        2 => Element::Phase { m: rng.random_range(0..n), phi: rng.random_range(-7.0..7.0) },
        _ => {
            let (from, to) = two(rng);
            Element::Crosstalk { from, to, chi: rng.random() }
        }
    }
}

fn engine_apply(s: &JointState, el: Element, modes: &[ModeLabel]) -> JointState {
    match el {
        Element::Splitter { a, b, t, phi } => {
            apply_beamsplitter(s, &BeamsplitterSpec::new(modes[a], modes[b], t).with_phase(phi)).unwrap()
        }
        Element::Loss { m, p } => apply_loss(s, &modes[m], p).unwrap(),
        Element::Phase { m, phi } => apply_phase(s, &modes[m], phi).unwrap(),
        Element::Crosstalk { from, to, chi } => apply_crosstalk(s, &modes[from], &modes[to], chi).unwrap(),
    }
}

fn dense_index(d: &Dense, ket: &BasisKet, modes: &[ModeLabel]) -> usize {
    let bit = |q: Qubit| usize::from(q == Qubit::Up);
    let occ: Vec<usize> = modes.iter().map(|m| ket.occupation(m) as usize).collect();
    d.index(bit(ket.ion1) * 2 + bit(ket.ion2), &occ)
}

fn embed(state: &JointState, d: &Dense) -> M {
    let modes = state.modes().to_vec();
    let idx: Vec<usize> = (0..state.dim()).map(|i| dense_index(d, &state.ket(i), &modes)).collect();
    let mut rho = M::zeros(d.dim(), d.dim());
    for i in 0..state.dim() {
        for j in 0..state.dim() {
            rho[(idx[i], idx[j])] = state.matrix()[(i, j)];
        }
    }
    rho
}

/// Largest deviations between engine and dense reference.
pub struct OracleReport {
    /// Elementwise density-matrix deviation.
    pub state: f64,
    /// Detection-probability deviation.
    pub probability: f64,
}

/// Runs `circuits` random circuits of up to six elements on two to four
/// modes through both the engine and the dense reference.
pub fn compare_random_circuits(seed: u64, circuits: usize) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut worst, mut worst_p): (f64, f64) = (0.0, 0.0);
    for _ in 0..circuits {
        let n = rng.random_range(2..=4);
        let modes = labels(n);
        let d = Dense::new(n);
        let mut state = JointState::from_pure(&modes, &random_state(&mut rng, &modes)).unwrap();
        let mut rho = embed(&state, &d);
        for _ in 0..rng.random_range(1..=6) {
            let el = random_element(&mut rng, n);
            state = engine_apply(&state, el, &modes);
            rho = oracle_apply(&d, &rho, el);
        }
        let engine = embed(&state, &d);
        let diff = (&engine - &rho).iter().map(|z| z.norm()).fold(0.0, f64::max);
        worst = worst.max(diff);

        let dets: Vec<DetectorSpec> = (0..n)
            .step_by(2)
            .map(|k| DetectorSpec::new(k as u32, modes[k..(k + 2).min(n)].to_vec(), rng.random()))
            .collect();
        let outcomes = detect(&state, &dets).unwrap();
        for o in &outcomes {
            let mut povm = M::identity(d.dim(), d.dim());
            for (bit, det) in dets.iter().enumerate() {
                let mut dark = M::identity(d.dim(), d.dim());
                for m in &det.modes {
                    let k = modes.iter().position(|x| x == m).unwrap();
                    dark *= d.diag_fn(k, |n| c((1.0 - det.efficiency).powi(n as i32)));
                }
                let factor = if o.pattern >> bit & 1 == 1 { M::identity(d.dim(), d.dim()) - dark } else { dark };
                povm *= factor;
            }
            let p = (&povm * &rho).trace().re;
            worst_p = worst_p.max((p - o.probability).abs());
        }
    }
    OracleReport { state: worst, probability: worst_p }
}
