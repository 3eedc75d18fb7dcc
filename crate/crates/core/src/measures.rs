//! Closed-form entropies and entanglement measures.
//!
//! All logarithms are base 2, so a maximally mixed qubit has entropy 1 and
//! `f_alpha(1) = 1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::states::{DensityMatrix, PureState};

/// Lower end of the order range where `f_alpha` is monotone and convex: (√7 − 1)/2.
pub const ALPHA_MIN: f64 = 0.822_875_655_532_295_4;
/// Upper end of the order range covered by the subadditivity lemma: (√13 − 1)/2.
pub const ALPHA_MAX: f64 = 1.302_775_637_731_994_6;

/// Orders closer than this to 1 take the von Neumann / binary-entropy branch.
pub const UNIT_ALPHA_EPS: f64 = 1e-9;

/// Eigenvalues of a density matrix below this are treated as exact zeros when
/// building decompositions and spin-flip spectra.
pub const RANK_TOL: f64 = 1e-12;

/// Arguments within this distance of 0 or 1 evaluate `f_alpha` by its closed forms.
const ENDPOINT_EPS: f64 = 1e-12;

/// Arguments may overshoot `[0, 1]` by this much (rounding in `sqrt(x^2 + y^2)`).
const DOMAIN_SLACK: f64 = 1e-12;

/// Rényi order with its range flags.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AlphaParam {
    alpha: f64,
    in_lemma_range: bool,
    is_subunit: bool,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::AlphaRange {
                alpha,
                range: "(0, inf)",
            });
        }
        Ok(Self {
            alpha,
            in_lemma_range: (ALPHA_MIN..=ALPHA_MAX).contains(&alpha),
            is_subunit: alpha < 1.0,
        })
    }

    pub fn value(self) -> f64 {
        self.alpha
    }

    pub fn in_lemma_range(self) -> bool {
        self.in_lemma_range
    }

    pub fn is_subunit(self) -> bool {
        self.is_subunit
    }

    /// True when the α → 1 limit branch is used.
    pub fn is_unit(self) -> bool {
        (self.alpha - 1.0).abs() < UNIT_ALPHA_EPS
    }

    /// Orders where the two-qubit closed form `E_α = f_α(C)` is valid.
    pub fn has_analytic_formula(self) -> bool {
        self.alpha >= ALPHA_MIN
    }

    pub fn require_analytic(self) -> Result<Self> {
        if self.has_analytic_formula() {
            Ok(self)
        } else {
            Err(Error::AlphaRange {
                alpha: self.alpha,
                range: "[(sqrt7-1)/2, inf)",
            })
        }
    }

    pub fn require_lemma_range(self) -> Result<Self> {
        if self.in_lemma_range {
            Ok(self)
        } else {
            Err(Error::AlphaRange {
                alpha: self.alpha,
                range: "[(sqrt7-1)/2, (sqrt13-1)/2]",
            })
        }
    }
}

impl TryFrom<f64> for AlphaParam {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        AlphaParam::new(alpha)
    }
}

impl From<AlphaParam> for f64 {
    fn from(a: AlphaParam) -> f64 {
        a.alpha
    }
}

/// Exponent of the power-law polygamy inequality, `0 ≤ μ ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct MuParam(f64);

impl MuParam {
    pub fn new(mu: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&mu) {
            Ok(Self(mu))
        } else {
            Err(Error::Domain {
                value: mu,
                domain: "[0, 1]",
            })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `x^μ` with the convention `0^0 = 0`.
    pub fn pow(self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if self.0 == 0.0 {
            1.0
        } else {
            x.powf(self.0)
        }
    }
}

impl TryFrom<f64> for MuParam {
    type Error = Error;

    fn try_from(mu: f64) -> Result<Self> {
        MuParam::new(mu)
    }
}

impl From<MuParam> for f64 {
    fn from(m: MuParam) -> f64 {
        m.0
    }
}

fn xlog2x(p: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

/// Shannon entropy of the two-outcome distribution `(p, 1 - p)` in bits.
pub fn binary_entropy(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Rényi entropy of a probability vector (von Neumann at α = 1).
pub fn renyi_from_spectrum(probs: &[f64], alpha: AlphaParam) -> f64 {
    if alpha.is_unit() {
        return -probs.iter().map(|&p| xlog2x(p)).sum::<f64>();
    }
    let a = alpha.value();
    let s: f64 = probs.iter().filter(|&&p| p > 0.0).map(|&p| p.powf(a)).sum();
    let v = s.log2() / (1.0 - a);
    // log2(1) can round to a tiny negative value with the wrong sign factor.
    if v < 0.0 && v > -1e-15 {
        0.0
    } else {
        v
    }
}

/// `S_α(ρ) = log2(tr ρ^α) / (1 − α)`; dispatches to the von Neumann entropy at α = 1.
pub fn renyi_entropy(rho: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    Ok(renyi_from_spectrum(&rho.spectrum()?, alpha))
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(-rho.spectrum()?.iter().map(|&p| xlog2x(p)).sum::<f64>())
}

fn check_unit_interval(x: f64) -> Result<f64> {
    if x.is_finite() && (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&x) {
        Ok(x.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain {
            value: x,
            domain: "[0, 1]",
        })
    }
}

/// `(Θ(x), Ξ(x)) = (1 + √(1 − x²), 1 − √(1 − x²))`.
pub fn theta_xi(x: f64) -> Result<(f64, f64)> {
    let x = check_unit_interval(x)?;
    let s = (1.0 - x * x).sqrt();
    Ok((1.0 + s, 1.0 - s))
}

/// Eigenvalues `(Θ/2, Ξ/2)` of a qubit reduction with concurrence `x`, with the small one
/// computed as `x² / (2Θ)` to avoid cancellation.
#[inline]
pub(crate) fn half_theta_xi(x: f64) -> (f64, f64) {
    let theta = 1.0 + (1.0 - x * x).sqrt();
    (0.5 * theta, 0.5 * x * x / theta)
}

/// `f_α` without the domain check; `x` must already lie in `[0, 1]`.
#[inline]
pub(crate) fn f_alpha_unchecked(x: f64, alpha: AlphaParam) -> f64 {
    if x <= ENDPOINT_EPS {
        return 0.0;
    }
    if 1.0 - x * x < 1e-14 {
        return 1.0;
    }
    let (big, small) = half_theta_xi(x);
    if alpha.is_unit() {
        return -xlog2x(big) - xlog2x(small);
    }
    let a = alpha.value();
    (big.powf(a) + small.powf(a)).log2() / (1.0 - a)
}

/// Concurrence-to-Rényi-entanglement transfer function.
pub fn f_alpha(x: f64, alpha: AlphaParam) -> Result<f64> {
    Ok(f_alpha_unchecked(check_unit_interval(x)?, alpha))
}

/// Concurrence of `ψ` across the cut `{q} | rest`: `√(2(1 − tr ρ_q²))`.
pub fn concurrence_pure_bipartition(psi: &PureState, part_a: &[usize]) -> Result<f64> {
    Ok(squared_concurrence_bipartition(psi, part_a)?.sqrt())
}

/// `C²` across the cut `{q} | rest`, evaluated without the square root.
pub fn squared_concurrence_bipartition(psi: &PureState, part_a: &[usize]) -> Result<f64> {
    let q = single_qubit(psi.n_qubits(), part_a)?;
    let red = psi.reduced(&[q])?;
    let m = red.matrix();
    let purity = m[(0, 0)].re.powi(2) + m[(1, 1)].re.powi(2) + 2.0 * m[(0, 1)].norm_sqr();
    Ok((2.0 * (1.0 - purity)).clamp(0.0, 1.0))
}

fn single_qubit(n_qubits: usize, part_a: &[usize]) -> Result<usize> {
    match part_a {
        [q] if *q < n_qubits => Ok(*q),
        [q] => Err(Error::QubitIndex {
            index: *q,
            n_qubits,
        }),
        _ => Err(Error::Partition(format!(
            "concurrence needs a single-qubit side, got {part_a:?}"
        ))),
    }
}

/// `2|ad − bc|` for two-qubit amplitudes `(a, b, c, d)`; scales as `‖v‖²` for unnormalized `v`.
#[inline]
pub fn concurrence_2q_amplitudes(v: &[Complex64]) -> f64 {
    debug_assert_eq!(v.len(), 4);
    2.0 * (v[0] * v[3] - v[1] * v[2]).norm()
}

/// `(σy⊗σy) v`.
#[inline]
fn sigma_yy(v: &[Complex64]) -> [Complex64; 4] {
    [-v[3], v[2], v[1], -v[0]]
}

/// Support of a density matrix: eigenvalues above [`RANK_TOL`] and their vectors.
pub(crate) struct Support {
    pub weights: Vec<f64>,
    pub vectors: Vec<Vec<Complex64>>,
}

pub(crate) fn support(rho: &DensityMatrix) -> Result<Support> {
    let eig = herm_eig(rho.matrix())?;
    let mut weights = Vec::new();
    let mut vectors = Vec::new();
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > RANK_TOL {
            weights.push(l);
            vectors.push(eig.eigenvectors.column(k));
        }
    }
    if weights.is_empty() {
        return Err(Error::InvalidDensity(
            "no eigenvalue above rank tolerance".into(),
        ));
    }
    Ok(Support { weights, vectors })
}

/// Symmetric `r x r` matrix `τ_jk = √μ_j √μ_k e_jᵀ (σy⊗σy) e_k` over the support of ρ.
/// Its singular values are the nonzero Wootters λ's.
pub(crate) fn spin_flip_overlap(sup: &Support) -> ComplexMatrix {
    let r = sup.weights.len();
    let mut tau = ComplexMatrix::zeros(r, r);
    for j in 0..r {
        let flipped = sigma_yy(&sup.vectors[j]);
        for k in 0..r {
            let dot: Complex64 = flipped
                .iter()
                .zip(&sup.vectors[k])
                .map(|(a, b)| a * b)
                .sum();
            tau[(j, k)] = dot * (sup.weights[j] * sup.weights[k]).sqrt();
        }
    }
    tau
}

/// Singular values of `a`, descending, from the Hermitian embedding `[[0, a], [a^†, 0]]`.
pub(crate) fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let (r, k) = (a.rows(), a.cols());
    let n = r + k;
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..r {
        for j in 0..k {
            h[(i, r + j)] = a[(i, j)];
            h[(r + j, i)] = a[(i, j)].conj();
        }
    }
    let eig = herm_eig(&h)?;
    Ok(eig.eigenvalues[..r.min(k)]
        .iter()
        .map(|&s| s.max(0.0))
        .collect())
}

/// Descending square roots of the eigenvalues of `ρ ρ̃`, padded to length 4.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubits(rho)?;
    let sup = support(rho)?;
    let sv = singular_values(&spin_flip_overlap(&sup))?;
    let mut out = [0.0; 4];
    out[..sv.len()].copy_from_slice(&sv);
    Ok(out)
}

pub(crate) fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() == 2 {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a two-qubit state, got {} qubits",
            rho.n_qubits()
        )))
    }
}

/// Wootters concurrence `max(0, λ1 − λ2 − λ3 − λ4)`.
pub fn concurrence_mixed_2q(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0))
}

/// Rényi-α entanglement of a two-qubit state via `f_α(C(ρ))`, valid for α ≥ (√7 − 1)/2.
pub fn renyi_entanglement_2q(rho: &DensityMatrix, alpha: AlphaParam) -> Result<f64> {
    let alpha = alpha.require_analytic()?;
    Ok(f_alpha_unchecked(concurrence_mixed_2q(rho)?, alpha))
}

/// `E_α(|ψ⟩) = S_α(ρ_A)` for the side `part_a`.
pub fn renyi_entanglement_pure(
    psi: &PureState,
    part_a: &[usize],
    alpha: AlphaParam,
) -> Result<f64> {
    if part_a.len() >= psi.n_qubits() {
        return Err(Error::Partition(format!(
            "side {part_a:?} leaves nothing to trace out"
        )));
    }
    let red = psi.reduced(part_a)?;
    renyi_entropy(&red, alpha)
}

/// Eigenvalues of a 2x2 Hermitian matrix, descending, clamped at zero.
#[inline]
pub(crate) fn qubit_spectrum(m00: f64, m11: f64, m01: Complex64) -> (f64, f64) {
    let mean = 0.5 * (m00 + m11);
    let half_gap = (0.25 * (m00 - m11).powi(2) + m01.norm_sqr()).sqrt();
    ((mean + half_gap).max(0.0), (mean - half_gap).max(0.0))
}

/// Rényi entropy of a qubit reduction given as a normalized 2x2 block.
#[inline]
pub(crate) fn qubit_renyi(m00: f64, m11: f64, m01: Complex64, alpha: AlphaParam) -> f64 {
    let (a, b) = qubit_spectrum(m00, m11, m01);
    renyi_from_spectrum(&[a, b], alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ginibre_random_mixed, named_state, NamedState, RngSeed};

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn dm(diag: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diag(diag)).unwrap()
    }

    #[test]
    fn range_constants_match_closed_forms() {
        assert_eq!(ALPHA_MIN, (7f64.sqrt() - 1.0) / 2.0);
        assert_eq!(ALPHA_MAX, (13f64.sqrt() - 1.0) / 2.0);
        assert!(alpha(ALPHA_MIN).in_lemma_range());
        assert!(alpha(ALPHA_MAX).in_lemma_range());
        assert!(!alpha(ALPHA_MAX + 1e-15).in_lemma_range());
        assert!(alpha(0.9).is_subunit());
        assert!(!alpha(1.0).is_subunit());
        assert!(AlphaParam::new(0.0).is_err());
        assert!(AlphaParam::new(f64::NAN).is_err());
    }

    #[test]
    fn renyi_entropy_examples() {
        for a in [0.5, 0.9, 1.0, 2.0, 3.7] {
            assert!((renyi_entropy(&dm(&[0.5, 0.5]), alpha(a)).unwrap() - 1.0).abs() < 1e-15);
            assert_eq!(renyi_entropy(&dm(&[1.0, 0.0]), alpha(a)).unwrap(), 0.0);
        }
        // -log2(9/16 + 1/16)
        let want = -(10.0f64 / 16.0).log2();
        assert!((renyi_entropy(&dm(&[0.75, 0.25]), alpha(2.0)).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.678).abs() < 1e-3);
    }

    #[test]
    fn renyi_brackets_von_neumann_near_one() {
        for seed in 0..20 {
            let rho = ginibre_random_mixed(2, 3, RngSeed(seed)).unwrap();
            let vn = von_neumann_entropy(&rho).unwrap();
            let lo = renyi_entropy(&rho, alpha(1.0 + 1e-4)).unwrap();
            let hi = renyi_entropy(&rho, alpha(1.0 - 1e-4)).unwrap();
            assert!(lo <= vn + 1e-12 && vn <= hi + 1e-12, "{lo} {vn} {hi}");
            assert!((hi - lo).abs() < 1e-3);
        }
    }

    #[test]
    fn theta_xi_examples() {
        assert_eq!(theta_xi(0.0).unwrap(), (2.0, 0.0));
        assert_eq!(theta_xi(1.0).unwrap(), (1.0, 1.0));
        let (t, x) = theta_xi(0.6).unwrap();
        assert!((t - 1.8).abs() < 1e-15 && (x - 0.2).abs() < 1e-15);
        assert!(theta_xi(1.1).is_err());
        assert!(theta_xi(-0.1).is_err());
        for k in 0..=1000 {
            let v = k as f64 / 1000.0;
            let (t, x) = theta_xi(v).unwrap();
            assert_eq!(t + x, 2.0, "x = {v}");
            assert!((t * x - v * v).abs() < 1e-14);
        }
    }

    #[test]
    fn f_alpha_endpoints_and_limit() {
        for a in [0.5, ALPHA_MIN, 1.0, 1.2, ALPHA_MAX, 3.0] {
            assert_eq!(f_alpha(0.0, alpha(a)).unwrap(), 0.0);
            assert_eq!(f_alpha(1.0, alpha(a)).unwrap(), 1.0);
        }
        let x = std::f64::consts::FRAC_1_SQRT_2;
        let h2 = binary_entropy((1.0 + (1.0 - x * x).sqrt()) / 2.0);
        assert!((f_alpha(x, alpha(1.0)).unwrap() - h2).abs() < 1e-15);
        for a in [1.0 - 1e-5, 1.0 + 1e-5] {
            assert!((f_alpha(x, alpha(a)).unwrap() - h2).abs() < 1e-4);
        }
        assert!(f_alpha(1.5, alpha(1.2)).is_err());
    }

    #[test]
    fn f_alpha_matches_direct_formula() {
        // Direct transcription with the naive Ξ = 1 - sqrt(1 - x^2).
        for a in [ALPHA_MIN, 0.9, 1.1, ALPHA_MAX] {
            for k in 1..100 {
                let x = k as f64 / 100.0;
                let (t, xi) = theta_xi(x).unwrap();
                let direct = ((t / 2.0).powf(a) + (xi / 2.0).powf(a)).log2() / (1.0 - a);
                assert!((f_alpha(x, alpha(a)).unwrap() - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_concurrence_examples() {
        let bell = named_state(NamedState::Bell).unwrap();
        assert!((concurrence_pure_bipartition(&bell, &[0]).unwrap() - 1.0).abs() < 1e-15);
        let prod = named_state(NamedState::Product(3)).unwrap();
        assert_eq!(concurrence_pure_bipartition(&prod, &[0]).unwrap(), 0.0);
        let w = named_state(NamedState::W(3)).unwrap();
        let want = 2.0 * 2f64.sqrt() / 3.0;
        assert!((concurrence_pure_bipartition(&w, &[0]).unwrap() - want).abs() < 1e-15);
        assert!(matches!(
            concurrence_pure_bipartition(&w, &[0, 1]),
            Err(Error::Partition(_))
        ));
        assert!(concurrence_pure_bipartition(&w, &[3]).is_err());
    }

    #[test]
    fn mixed_concurrence_examples() {
        let bell = named_state(NamedState::Bell).unwrap().density();
        assert!((concurrence_mixed_2q(&bell).unwrap() - 1.0).abs() < 1e-14);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_eq!(concurrence_mixed_2q(&mixed).unwrap(), 0.0);
        let l = wootters_lambdas(&mixed).unwrap();
        for v in l {
            assert!((v - 0.25).abs() < 1e-15);
        }
        let classical = dm(&[0.5, 0.0, 0.0, 0.5]);
        let l = wootters_lambdas(&classical).unwrap();
        assert!((l[0] - 0.5).abs() < 1e-15 && (l[1] - 0.5).abs() < 1e-15);
        assert!(l[2].abs() < 1e-15 && l[3].abs() < 1e-15);
        assert_eq!(concurrence_mixed_2q(&classical).unwrap(), 0.0);
        let three = DensityMatrix::maximally_mixed(3).unwrap();
        assert!(concurrence_mixed_2q(&three).is_err());
    }

    #[test]
    fn wootters_lambdas_match_non_hermitian_route() {
        // λ_i² are the eigenvalues of ρρ̃; compare their sum and sum of squares with traces.
        for seed in 0..50 {
            let rho = ginibre_random_mixed(2, 1 + (seed as usize % 4), RngSeed(seed)).unwrap();
            let tilde = crate::linalg::spin_flip(rho.matrix()).unwrap();
            let prod = rho.matrix() * &tilde;
            let prod2 = &prod * &prod;
            let l = wootters_lambdas(&rho).unwrap();
            let s2: f64 = l.iter().map(|v| v * v).sum();
            let s4: f64 = l.iter().map(|v| v.powi(4)).sum();
            assert!((prod.trace().re - s2).abs() < 1e-12);
            assert!((prod2.trace().re - s4).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_state_mixed_concurrence_agrees_with_amplitude_formula() {
        for seed in 0..50 {
            let psi = crate::states::haar_random_pure(2, RngSeed(seed)).unwrap();
            let direct = concurrence_2q_amplitudes(psi.amplitudes());
            let wootters = concurrence_mixed_2q(&psi.density()).unwrap();
            let bip = concurrence_pure_bipartition(&psi, &[0]).unwrap();
            assert!((direct - wootters).abs() < 1e-12);
            assert!((direct - bip).abs() < 1e-12);
        }
    }

    #[test]
    fn renyi_entanglement_examples() {
        let bell = named_state(NamedState::Bell).unwrap();
        for a in [ALPHA_MIN, 1.0, 1.2, 2.0] {
            assert!(
                (renyi_entanglement_2q(&bell.density(), alpha(a)).unwrap() - 1.0).abs() < 1e-12
            );
        }
        let sep = dm(&[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(renyi_entanglement_2q(&sep, alpha(1.2)).unwrap(), 0.0);
        assert!(matches!(
            renyi_entanglement_2q(&sep, alpha(0.5)),
            Err(Error::AlphaRange { .. })
        ));

        let ghz = named_state(NamedState::Ghz(3)).unwrap();
        assert!((renyi_entanglement_pure(&ghz, &[0], alpha(2.0)).unwrap() - 1.0).abs() < 1e-15);
        let prod = named_state(NamedState::Product(3)).unwrap();
        assert_eq!(
            renyi_entanglement_pure(&prod, &[0], alpha(2.0)).unwrap(),
            0.0
        );
        let w = named_state(NamedState::W(3)).unwrap();
        let want = (9.0f64 / 5.0).log2();
        assert!((renyi_entanglement_pure(&w, &[0], alpha(2.0)).unwrap() - want).abs() < 1e-14);
        assert!((want - 0.848).abs() < 1e-3);
    }

    #[test]
    fn mu_pow_convention() {
        let zero = MuParam::new(0.0).unwrap();
        assert_eq!(zero.pow(0.0), 0.0);
        assert_eq!(zero.pow(0.3), 1.0);
        let half = MuParam::new(0.5).unwrap();
        assert_eq!(half.pow(0.25), 0.5);
        assert!(MuParam::new(1.01).is_err());
        assert!(MuParam::new(-0.01).is_err());
    }
}
