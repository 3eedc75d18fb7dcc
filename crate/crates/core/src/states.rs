//! Pure and mixed multi-qubit states: validation, sampling, named states, and JSON files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, partial_trace, ComplexMatrix, MAX_QUBITS, PSD_CLAMP};

/// Tolerance for the unit-norm, unit-trace, and Hermiticity invariants.
pub const STATE_TOL: f64 = 1e-10;

/// Seed for a deterministic random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Seed for task `index` of a campaign seeded with `self`.
    pub fn offset(self, index: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(index))
    }

    /// Independent stream `stream` of this seed, used for optimizer restarts.
    pub fn stream(self, stream: u64) -> ChaCha8Rng {
        let mut rng = self.rng();
        rng.set_stream(stream);
        rng
    }
}

fn check_qubits(n_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&n_qubits) {
        Ok(())
    } else {
        Err(Error::Parameter(format!(
            "n_qubits = {n_qubits} outside 1..={MAX_QUBITS}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        if amplitudes.len() != dim {
            return Err(Error::Dimension(format!(
                "{n_qubits} qubits need {dim} amplitudes, got {}",
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Parameter("non-finite amplitude".into()));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(Error::Normalization(norm_sqr));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(n_qubits: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Normalization(norm * norm));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(n_qubits, amplitudes)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_qubits: self.n_qubits,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }

    /// Reduced state on the sorted qubit list `keep`, computed from the amplitudes directly.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Dimension(format!(
                "kept qubit list {keep:?} must be non-empty, sorted and distinct"
            )));
        }
        if let Some(&index) = keep.iter().find(|&&q| q >= n) {
            return Err(Error::QubitIndex { index, n_qubits: n });
        }
        let matrix = reduce_vector(&self.amplitudes, n, keep);
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix,
        })
    }
}

/// `tr_{not keep} |v><v|` for a (possibly subnormalized) vector over `n` qubits.
pub(crate) fn reduce_vector(v: &[Complex64], n: usize, keep: &[usize]) -> ComplexMatrix {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let embed = |sub: usize, qubits: &[usize]| -> usize {
        let k = qubits.len();
        (0..k)
            .filter(|pos| sub & (1 << (k - 1 - pos)) != 0)
            .map(|pos| bit(qubits[pos]))
            .sum()
    };
    let kd = 1usize << keep.len();
    let td = 1usize << traced.len();
    let kept_idx: Vec<usize> = (0..kd).map(|s| embed(s, keep)).collect();
    let traced_idx: Vec<usize> = (0..td).map(|s| embed(s, &traced)).collect();
    let mut out = ComplexMatrix::zeros(kd, kd);
    for (i, &ki) in kept_idx.iter().enumerate() {
        for (j, &kj) in kept_idx.iter().enumerate().skip(i) {
            let z: Complex64 = traced_idx
                .iter()
                .map(|&t| v[ki | t] * v[kj | t].conj())
                .sum();
            out[(i, j)] = z;
            out[(j, i)] = z.conj();
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity (eigenvalues ≥ -1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidDensity(format!(
                "{}x{} matrix is not square",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let n_qubits = crate::linalg::qubits_for_dim(matrix.rows()).ok_or_else(|| {
            Error::InvalidDensity(format!("dimension {} is not a power of two", matrix.rows()))
        })?;
        check_qubits(n_qubits)?;
        let herm = matrix.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidDensity(format!("trace {} != 1", tr.re)));
        }
        let eig = herm_eig(&matrix)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -PSD_CLAMP {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self { n_qubits, matrix })
    }

    pub(crate) fn from_trusted(n_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.rows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Result<Self> {
        check_qubits(n_qubits)?;
        let d = 1usize << n_qubits;
        Ok(Self {
            n_qubits,
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues in descending order with drift in `[-1e-10, 0)` clamped to zero.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eig = herm_eig(&self.matrix)?;
        Ok(eig
            .eigenvalues
            .into_iter()
            .map(|l| if l < 0.0 { 0.0 } else { l })
            .collect())
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let matrix = partial_trace(&self.matrix, self.n_qubits, keep)?;
        Ok(DensityMatrix {
            n_qubits: keep.len(),
            matrix,
        })
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n_qubits + other.n_qubits;
        check_qubits(n)?;
        Ok(DensityMatrix {
            n_qubits: n,
            matrix: crate::linalg::kron(&self.matrix, &other.matrix),
        })
    }
}

/// Either kind of state, as read from a state file.
#[derive(Debug, Clone, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(p) => p.n_qubits(),
            State::Mixed(m) => m.n_qubits(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => p.density(),
            State::Mixed(m) => m.clone(),
        }
    }
}

fn standard_complex<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Haar-random pure state: a normalized vector of i.i.d. standard complex Gaussians.
pub fn haar_random_pure(n_qubits: usize, seed: RngSeed) -> Result<PureState> {
    check_qubits(n_qubits)?;
    let mut rng = seed.rng();
    let amps: Vec<Complex64> = (0..1usize << n_qubits)
        .map(|_| standard_complex(&mut rng))
        .collect();
    PureState::normalized(n_qubits, amps)
}

/// Induced-measure mixed state `G G^† / tr(G G^†)` with a `2^n x rank` Ginibre factor.
pub fn ginibre_random_mixed(n_qubits: usize, rank: usize, seed: RngSeed) -> Result<DensityMatrix> {
    check_qubits(n_qubits)?;
    let d = 1usize << n_qubits;
    if rank == 0 || rank > d {
        return Err(Error::Parameter(format!("rank {rank} outside 1..={d}")));
    }
    let mut rng = seed.rng();
    let g: Vec<Complex64> = (0..d * rank).map(|_| standard_complex(&mut rng)).collect();
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let z: Complex64 = (0..rank)
                .map(|k| g[i * rank + k] * g[j * rank + k].conj())
                .sum();
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    let tr = m.trace().re;
    Ok(DensityMatrix::from_trusted(n_qubits, m.scale(1.0 / tr)))
}

/// Textbook states used as fixed test points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedState {
    Ghz(usize),
    W(usize),
    Product(usize),
    Bell,
}

impl FromStr for NamedState {
    type Err = Error;

    /// Accepts `bell`, `ghz:N`, `w:N`, `product:N` (case-insensitive).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "bell" {
            return Ok(NamedState::Bell);
        }
        let (name, n) = lower
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("unknown state name `{s}`")))?;
        let n: usize = n
            .parse()
            .map_err(|_| Error::Parameter(format!("bad qubit count in `{s}`")))?;
        match name {
            "ghz" => Ok(NamedState::Ghz(n)),
            "w" => Ok(NamedState::W(n)),
            "product" => Ok(NamedState::Product(n)),
            _ => Err(Error::Parameter(format!("unknown state name `{s}`"))),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedState::Ghz(n) => write!(f, "ghz:{n}"),
            NamedState::W(n) => write!(f, "w:{n}"),
            NamedState::Product(n) => write!(f, "product:{n}"),
            NamedState::Bell => write!(f, "bell"),
        }
    }
}

pub fn named_state(name: NamedState) -> Result<PureState> {
    let (n, support): (usize, Vec<usize>) = match name {
        NamedState::Bell => (2, vec![0, 3]),
        NamedState::Ghz(n) => {
            check_qubits(n)?;
            if n < 2 {
                return Err(Error::Parameter("GHZ needs at least 2 qubits".into()));
            }
            (n, vec![0, (1 << n) - 1])
        }
        NamedState::W(n) => {
            check_qubits(n)?;
            if n < 2 {
                return Err(Error::Parameter("W needs at least 2 qubits".into()));
            }
            (n, (0..n).map(|q| 1usize << q).collect())
        }
        NamedState::Product(n) => (n, vec![0]),
    };
    check_qubits(n)?;
    let amp = 1.0 / (support.len() as f64).sqrt();
    let mut amps = vec![Complex64::default(); 1 << n];
    for k in support {
        amps[k] = c(amp, 0.0);
    }
    PureState::new(n, amps)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum StateFile {
    Pure {
        n_qubits: usize,
        amplitudes: Vec<[f64; 2]>,
    },
    Density {
        n_qubits: usize,
        entries: Vec<[f64; 2]>,
    },
}

fn to_pairs(zs: &[Complex64]) -> Vec<[f64; 2]> {
    zs.iter().map(|z| [z.re, z.im]).collect()
}

fn from_pairs(ps: &[[f64; 2]]) -> Vec<Complex64> {
    ps.iter().map(|p| c(p[0], p[1])).collect()
}

pub fn state_to_json(state: &State) -> String {
    let file = match state {
        State::Pure(p) => StateFile::Pure {
            n_qubits: p.n_qubits,
            amplitudes: to_pairs(&p.amplitudes),
        },
        State::Mixed(m) => StateFile::Density {
            n_qubits: m.n_qubits,
            entries: to_pairs(m.matrix.entries()),
        },
    };
    serde_json::to_string_pretty(&file).expect("state serialization cannot fail")
}

pub fn state_from_json(text: &str) -> Result<State> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    match file {
        StateFile::Pure {
            n_qubits,
            amplitudes,
        } => {
            check_qubits(n_qubits)?;
            let dim = 1usize << n_qubits;
            if amplitudes.len() != dim {
                return Err(Error::Dimension(format!(
                    "field `amplitudes`: {n_qubits} qubits need {dim} entries, got {}",
                    amplitudes.len()
                )));
            }
            Ok(State::Pure(PureState::new(
                n_qubits,
                from_pairs(&amplitudes),
            )?))
        }
        StateFile::Density { n_qubits, entries } => {
            check_qubits(n_qubits)?;
            let dim = 1usize << n_qubits;
            if entries.len() != dim * dim {
                return Err(Error::Dimension(format!(
                    "field `entries`: {n_qubits} qubits need {} entries, got {}",
                    dim * dim,
                    entries.len()
                )));
            }
            let m = ComplexMatrix::new(dim, dim, from_pairs(&entries))?;
            Ok(State::Mixed(DensityMatrix::new(m)?))
        }
    }
}

pub fn load_state(path: impl AsRef<Path>) -> Result<State> {
    let text = fs::read_to_string(path)?;
    state_from_json(&text)
}

pub fn save_state(state: &State, path: impl AsRef<Path>) -> Result<()> {
    let mut text = state_to_json(state);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_states_have_textbook_amplitudes() {
        let h = 1.0 / 2f64.sqrt();
        let bell = named_state(NamedState::Bell).unwrap();
        assert_eq!(bell.amplitudes()[0], c(h, 0.0));
        assert_eq!(bell.amplitudes()[3], c(h, 0.0));

        let w = named_state(NamedState::W(3)).unwrap();
        let t = 1.0 / 3f64.sqrt();
        for (k, a) in w.amplitudes().iter().enumerate() {
            let want = if [1, 2, 4].contains(&k) { t } else { 0.0 };
            assert_eq!(a.re, want, "index {k}");
        }

        let ghz = named_state(NamedState::Ghz(4)).unwrap();
        assert_eq!(ghz.amplitudes()[0].re, h);
        assert_eq!(ghz.amplitudes()[15].re, h);
        assert_eq!(
            ghz.amplitudes().iter().filter(|z| z.norm() > 0.0).count(),
            2
        );

        let p = named_state(NamedState::Product(3)).unwrap();
        assert_eq!(p.amplitudes()[0].re, 1.0);
    }

    #[test]
    fn named_state_parsing() {
        assert_eq!("GHZ:3".parse::<NamedState>().unwrap(), NamedState::Ghz(3));
        assert_eq!("bell".parse::<NamedState>().unwrap(), NamedState::Bell);
        assert!("cluster:3".parse::<NamedState>().is_err());
        assert!("w:x".parse::<NamedState>().is_err());
        assert!(named_state(NamedState::W(9)).is_err());
    }

    #[test]
    fn haar_is_deterministic_and_normalized() {
        let a = haar_random_pure(3, RngSeed(11)).unwrap();
        let b = haar_random_pure(3, RngSeed(11)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, haar_random_pure(3, RngSeed(12)).unwrap());
        assert!(haar_random_pure(0, RngSeed(1)).is_err());
        assert!(haar_random_pure(7, RngSeed(1)).is_err());
    }

    #[test]
    fn ginibre_rank_one_is_a_projector() {
        let rho = ginibre_random_mixed(2, 1, RngSeed(5)).unwrap();
        let sq = rho.matrix() * rho.matrix();
        assert!(sq.max_abs_diff(rho.matrix()) < 1e-12);
        assert!(ginibre_random_mixed(2, 0, RngSeed(5)).is_err());
        assert!(ginibre_random_mixed(2, 5, RngSeed(5)).is_err());
    }

    #[test]
    fn pure_reduction_matches_partial_trace() {
        let psi = haar_random_pure(4, RngSeed(3)).unwrap();
        for keep in [vec![0], vec![1, 3], vec![0, 2, 3]] {
            let direct = psi.reduced(&keep).unwrap();
            let via = psi.density().reduced(&keep).unwrap();
            assert!(direct.matrix().max_abs_diff(via.matrix()) < 1e-14);
        }
    }

    #[test]
    fn json_rejects_bad_files() {
        let bad_norm =
            r#"{"kind":"pure","n_qubits":1,"amplitudes":[[0.9486832980505138,0],[0,0]]}"#;
        assert!(matches!(
            state_from_json(bad_norm),
            Err(Error::Normalization(_))
        ));

        let seven: Vec<String> = (0..7).map(|_| "[0.0,0.0]".to_string()).collect();
        let bad_dim = format!(
            r#"{{"kind":"pure","n_qubits":3,"amplitudes":[{}]}}"#,
            seven.join(",")
        );
        assert!(matches!(
            state_from_json(&bad_dim),
            Err(Error::Dimension(_))
        ));

        let garbage = "{\n  \"kind\": \"pure\",\n  \"n_qubits\": oops\n}";
        match state_from_json(garbage) {
            Err(Error::Parse { location, .. }) => assert!(location.starts_with("line 3")),
            other => panic!("expected parse error, got {other:?}"),
        }

        let not_psd = r#"{"kind":"density","n_qubits":1,"entries":[[1.5,0],[0,0],[0,0],[-0.5,0]]}"#;
        assert!(matches!(
            state_from_json(not_psd),
            Err(Error::InvalidDensity(_))
        ));
    }
}
