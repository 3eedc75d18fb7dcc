//! Optimization over pure-state decompositions of a mixed state.
//!
//! Every decomposition `ρ = Σ p_i |ψ_i⟩⟨ψ_i|` with `m` elements arises from an
//! `m x r` isometry applied to the weighted eigenvectors `√μ_j |e_j⟩` of ρ. The
//! search works directly on the `m` subnormalized vectors `√p_i |ψ_i⟩`: a
//! two-row unitary rotation keeps `Σ |v_i⟩⟨v_i| = ρ`, and products of such
//! rotations reach every isometry (row phases do not change the decomposition).
//!
//! Max-mode values are always attained by an explicit decomposition, so they
//! are lower bounds on the true maximum; min-mode values are upper bounds on
//! the true minimum.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, herm_eig, ComplexMatrix};
use crate::measures::{
    concurrence_2q_amplitudes, f_alpha_unchecked, qubit_renyi, require_two_qubits,
    spin_flip_overlap, support, wootters_lambdas, AlphaParam, Support,
};
use crate::states::{DensityMatrix, PureState, RngSeed};

/// Coarse samples of the rotation angle over one period before Brent refinement.
const COARSE_STEPS: usize = 6;
/// Angle resolution of the line search; the objective error scales with its square.
const ANGLE_TOL: f64 = 1e-5;
/// Rows with squared norm below this carry no weight in the witness.
const WEIGHT_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptBudget {
    pub restarts: usize,
    /// Sweeps every restart receives before the finalists are chosen.
    pub screen_sweeps: usize,
    /// Restarts that continue up to `max_sweeps` after screening.
    pub finalists: usize,
    pub max_sweeps: usize,
    /// A restart stops once a full sweep improves the objective by less than this.
    pub tol: f64,
    pub seed: RngSeed,
}

impl Default for OptBudget {
    fn default() -> Self {
        Self {
            restarts: 32,
            screen_sweeps: 5,
            finalists: 4,
            max_sweeps: 60,
            tol: 1e-9,
            seed: RngSeed(0),
        }
    }
}

impl OptBudget {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Parameter(
                "budget.restarts must be at least 1".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::Parameter(format!(
                "budget.tol = {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn with_seed(self, seed: RngSeed) -> Self {
        Self { seed, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoofMode {
    Min,
    Max,
}

impl RoofMode {
    fn sign(self) -> f64 {
        match self {
            RoofMode::Min => -1.0,
            RoofMode::Max => 1.0,
        }
    }
}

/// A per-pure-state functional, evaluated on subnormalized vectors.
pub trait PureObjective: Sync {
    /// `‖v‖² · F(v / ‖v‖)`; must return 0 for the zero vector.
    fn weighted(&self, v: &[Complex64]) -> f64;

    /// `F(ψ)` for a normalized state.
    fn value(&self, psi: &[Complex64]) -> f64 {
        self.weighted(psi)
    }
}

/// Two-qubit pure-state concurrence `2|ad − bc|`.
#[derive(Debug, Clone, Copy)]
pub struct Concurrence;

impl PureObjective for Concurrence {
    #[inline]
    fn weighted(&self, v: &[Complex64]) -> f64 {
        concurrence_2q_amplitudes(v)
    }
}

/// Two-qubit pure-state Rényi-α entanglement `f_α(C)`, equal to `S_α(ρ_A)`.
#[derive(Debug, Clone, Copy)]
pub struct RenyiEntanglement {
    pub alpha: AlphaParam,
}

impl PureObjective for RenyiEntanglement {
    #[inline]
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if p < WEIGHT_FLOOR {
            return 0.0;
        }
        let conc = (concurrence_2q_amplitudes(v) / p).min(1.0);
        p * f_alpha_unchecked(conc, self.alpha)
    }
}

/// Rényi-α entropy of one qubit's reduction of an `n`-qubit pure state.
#[derive(Debug, Clone, Copy)]
pub struct QubitRenyiEntropy {
    pub n_qubits: usize,
    pub qubit: usize,
    pub alpha: AlphaParam,
}

impl PureObjective for QubitRenyiEntropy {
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let bit = 1usize << (self.n_qubits - 1 - self.qubit);
        let (mut m00, mut m11, mut m01) = (0.0, 0.0, Complex64::default());
        for i in (0..v.len()).filter(|i| i & bit == 0) {
            let (a, b) = (v[i], v[i | bit]);
            m00 += a.norm_sqr();
            m11 += b.norm_sqr();
            m01 += a * b.conj();
        }
        let p = m00 + m11;
        if p < WEIGHT_FLOOR {
            return 0.0;
        }
        p * qubit_renyi(m00 / p, m11 / p, m01 / p, self.alpha)
    }
}

/// Adapts a closure on normalized states.
pub struct FnObjective<F>(pub F);

impl<F> PureObjective for FnObjective<F>
where
    F: Fn(&[Complex64]) -> f64 + Sync,
{
    fn weighted(&self, v: &[Complex64]) -> f64 {
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if p < WEIGHT_FLOOR {
            return 0.0;
        }
        let s = p.sqrt();
        let psi: Vec<Complex64> = v.iter().map(|z| z / s).collect();
        p * (self.0)(&psi)
    }

    fn value(&self, psi: &[Complex64]) -> f64 {
        (self.0)(psi)
    }
}

/// Weighted list of pure states realizing a density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        if weights.len() != states.len() || weights.is_empty() {
            return Err(Error::Parameter(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if weights.iter().any(|&w| w.is_nan() || w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-10
        {
            return Err(Error::Parameter(
                "weights must be a probability vector".into(),
            ));
        }
        let n = states[0].n_qubits();
        if states.iter().any(|s| s.n_qubits() != n) {
            return Err(Error::Dimension(
                "decomposition mixes register sizes".into(),
            ));
        }
        Ok(Self { weights, states })
    }

    /// Builds from subnormalized vectors, dropping rows that carry no weight.
    fn from_rows(n_qubits: usize, rows: &[Vec<Complex64>]) -> Result<Self> {
        let mut weights = Vec::new();
        let mut states = Vec::new();
        for row in rows {
            let p: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            if p > WEIGHT_FLOOR {
                weights.push(p);
                states.push(PureState::normalized(n_qubits, row.clone())?);
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Self::new(weights, states)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.states[0].amplitudes().len();
        let mut out = ComplexMatrix::zeros(d, d);
        for (w, s) in self.weights.iter().zip(&self.states) {
            out = out.add(&ComplexMatrix::outer(s.amplitudes()).scale(*w));
        }
        out
    }

    /// `Σ p_i F(ψ_i)`.
    pub fn average<O: PureObjective + ?Sized>(&self, objective: &O) -> f64 {
        self.weights
            .iter()
            .zip(&self.states)
            .map(|(w, s)| w * objective.value(s.amplitudes()))
            .sum()
    }
}

/// Outcome of a roof optimization, with the witness decomposition attaining `value`.
#[derive(Debug, Clone)]
pub struct RoofResult {
    pub value: f64,
    pub mode: RoofMode,
    pub decomposition: Decomposition,
    pub restarts_used: usize,
    pub converged: bool,
    /// Objective after each sweep of the winning restart.
    pub history: Vec<f64>,
}

/// Weighted eigenvectors of ρ padded with zero rows to `m = r²` rows.
struct Frame {
    n_qubits: usize,
    dim: usize,
    rank: usize,
    base: Vec<Vec<Complex64>>,
}

impl Frame {
    fn new(rho: &DensityMatrix) -> Result<Self> {
        let sup = support(rho)?;
        Ok(Self::from_support(rho.n_qubits(), rho.dim(), &sup))
    }

    fn from_support(n_qubits: usize, dim: usize, sup: &Support) -> Self {
        let rank = sup.weights.len();
        let m = rank * rank;
        let mut base = vec![vec![Complex64::default(); dim]; m];
        for (row, (w, v)) in base.iter_mut().zip(sup.weights.iter().zip(&sup.vectors)) {
            let s = w.sqrt();
            for (dst, z) in row.iter_mut().zip(v) {
                *dst = z * s;
            }
        }
        Self {
            n_qubits,
            dim,
            rank,
            base,
        }
    }

    fn rows(&self) -> usize {
        self.base.len()
    }

    fn param_len(&self) -> usize {
        let m = self.rows();
        m * (m - 1)
    }
}

/// Numerical rank of ρ (eigenvalues above the rank tolerance).
pub fn numerical_rank(rho: &DensityMatrix) -> Result<usize> {
    Ok(support(rho)?.weights.len())
}

/// `[[c, −e^{−iφ}s], [e^{iφ}s, c]]` applied to rows `a`, `b`.
#[inline]
fn rotate_pair(va: &mut [Complex64], vb: &mut [Complex64], theta: f64, phase: Complex64) {
    let (s, cs) = theta.sin_cos();
    let up = phase.conj() * s;
    let down = phase * s;
    for (x, y) in va.iter_mut().zip(vb.iter_mut()) {
        let (a, b) = (*x, *y);
        *x = a * cs - up * b;
        *y = down * a + b * cs;
    }
}

fn apply_params(rows: &mut [Vec<Complex64>], params: &[f64]) {
    let m = rows.len();
    let mut k = 0;
    for a in 0..m {
        for b in a + 1..m {
            let (theta, phi) = (params[k], params[k + 1]);
            k += 2;
            let (head, tail) = rows.split_at_mut(b);
            rotate_pair(
                &mut head[a],
                &mut tail[0],
                theta,
                Complex64::from_polar(1.0, phi),
            );
        }
    }
}

/// Decomposition obtained by rotating the weighted eigenvectors of ρ.
///
/// `params` holds one `(angle, phase)` pair per row pair `(a, b)`, `a < b`, in
/// lexicographic order over `m = r²` rows, so its length is `m (m − 1)`. All zeros
/// give the eigendecomposition.
pub fn decompositions_from_isometry(rho: &DensityMatrix, params: &[f64]) -> Result<Decomposition> {
    let frame = Frame::new(rho)?;
    if params.len() != frame.param_len() {
        return Err(Error::Parameter(format!(
            "rank {} state needs {} isometry parameters, got {}",
            frame.rank,
            frame.param_len(),
            params.len()
        )));
    }
    let mut rows = frame.base.clone();
    apply_params(&mut rows, params);
    Decomposition::from_rows(frame.n_qubits, &rows)
}

/// Number of isometry parameters [`decompositions_from_isometry`] expects for ρ.
pub fn isometry_param_len(rho: &DensityMatrix) -> Result<usize> {
    Ok(Frame::new(rho)?.param_len())
}

/// Brent's method (parabolic steps with golden-section fallback) maximizing `f` on
/// `[lo, hi]`, starting from the interior point `x` with value `fx`.
fn brent_max(
    mut lo: f64,
    mut hi: f64,
    x: f64,
    fx: f64,
    mut f: impl FnMut(f64) -> f64,
) -> (f64, f64) {
    const GOLD: f64 = 0.381_966_011_250_105_1;
    let (mut x, mut w, mut v) = (x, x, x);
    let (mut fx, mut fw, mut fv) = (-fx, -fx, -fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let tol1 = ANGLE_TOL * 0.5;
        let tol2 = 2.0 * tol1;
        if (x - mid).abs() <= tol2 - 0.5 * (hi - lo) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (lo - x) && p < q * (hi - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - lo < tol2 || hi - u < tol2 {
                    d = tol1.copysign(mid - x);
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= mid { lo - x } else { hi - x };
            d = GOLD * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else {
            x + tol1.copysign(d)
        };
        let fu = -f(u);
        if fu <= fx {
            if u >= x {
                lo = x;
            } else {
                hi = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                lo = u;
            } else {
                hi = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    (x, -fx)
}

struct LocalSearch<'a, O: ?Sized> {
    objective: &'a O,
    sign: f64,
    rows: Vec<Vec<Complex64>>,
    terms: Vec<f64>,
    value: f64,
    history: Vec<f64>,
    converged: bool,
    scratch_a: Vec<Complex64>,
    scratch_b: Vec<Complex64>,
}

impl<'a, O: PureObjective + ?Sized> LocalSearch<'a, O> {
    fn new(objective: &'a O, sign: f64, rows: Vec<Vec<Complex64>>) -> Self {
        let terms: Vec<f64> = rows.iter().map(|r| sign * objective.weighted(r)).collect();
        let value = terms.iter().sum();
        let dim = rows[0].len();
        Self {
            objective,
            sign,
            converged: rows.len() == 1,
            rows,
            terms,
            value,
            history: vec![sign * value],
            scratch_a: vec![Complex64::default(); dim],
            scratch_b: vec![Complex64::default(); dim],
        }
    }

    fn total(&self) -> f64 {
        self.terms.iter().sum()
    }

    /// Signed objective of rows `a`, `b` after rotating them by `theta`.
    fn pair_value(&mut self, a: usize, b: usize, theta: f64, phase: Complex64) -> f64 {
        self.scratch_a.copy_from_slice(&self.rows[a]);
        self.scratch_b.copy_from_slice(&self.rows[b]);
        rotate_pair(&mut self.scratch_a, &mut self.scratch_b, theta, phase);
        self.sign
            * (self.objective.weighted(&self.scratch_a) + self.objective.weighted(&self.scratch_b))
    }

    /// Line search on one rotation coordinate; applies the best angle if it improves.
    fn line_search(&mut self, a: usize, b: usize, phase: Complex64) -> f64 {
        let current = self.terms[a] + self.terms[b];
        let step = PI / COARSE_STEPS as f64;
        let mut best_theta = 0.0;
        let mut best = current;
        for k in 1..COARSE_STEPS {
            let theta = k as f64 * step;
            let v = self.pair_value(a, b, theta, phase);
            if v > best {
                best = v;
                best_theta = theta;
            }
        }

        let (theta, v) = brent_max(
            best_theta - step,
            best_theta + step,
            best_theta,
            best,
            |t| self.pair_value(a, b, t, phase),
        );
        if v > best {
            best = v;
            best_theta = theta;
        }

        if best > current && best_theta != 0.0 {
            let (head, tail) = self.rows.split_at_mut(b);
            rotate_pair(&mut head[a], &mut tail[0], best_theta, phase);
            self.terms[a] = self.sign * self.objective.weighted(&self.rows[a]);
            self.terms[b] = self.sign * self.objective.weighted(&self.rows[b]);
            self.terms[a] + self.terms[b] - current
        } else {
            0.0
        }
    }

    fn sweep(&mut self) {
        let m = self.rows.len();
        let real = c(1.0, 0.0);
        let imag = c(0.0, 1.0);
        for a in 0..m {
            for b in a + 1..m {
                self.line_search(a, b, real);
                self.line_search(a, b, imag);
            }
        }
        // Refresh cached terms so drift from incremental updates cannot accumulate.
        for (t, r) in self.terms.iter_mut().zip(&self.rows) {
            *t = self.sign * self.objective.weighted(r);
        }
    }

    /// Sweeps until `sweep_cap` sweeps are done or a sweep gains less than `tol`.
    fn advance(&mut self, sweep_cap: usize, tol: f64) {
        while !self.converged && self.history.len() <= sweep_cap {
            self.sweep();
            // Only strict improvements are applied, so the total can only drop by
            // rounding in the cache refresh.
            let next = self.total().max(self.value);
            let gain = next - self.value;
            self.value = next;
            self.history.push(self.sign * next);
            self.converged = gain < tol;
        }
    }
}

/// Optimizes `Σ p_i F(ψ_i)` over decompositions of ρ.
pub fn optimize_roof<O: PureObjective + ?Sized>(
    rho: &DensityMatrix,
    objective: &O,
    mode: RoofMode,
    budget: &OptBudget,
) -> Result<RoofResult> {
    optimize_roof_with_starts(rho, objective, mode, budget, &[])
}

/// As [`optimize_roof`], additionally running one local search from each supplied
/// decomposition (given as subnormalized vectors summing to ρ).
pub fn optimize_roof_with_starts<O: PureObjective + ?Sized>(
    rho: &DensityMatrix,
    objective: &O,
    mode: RoofMode,
    budget: &OptBudget,
    warm_starts: &[Vec<Vec<Complex64>>],
) -> Result<RoofResult> {
    budget.validate()?;
    let frame = Frame::new(rho)?;
    let sign = mode.sign();
    let m = frame.rows();

    let mut starts: Vec<Vec<Vec<Complex64>>> = Vec::new();
    for w in warm_starts {
        if w.len() > m || w.iter().any(|r| r.len() != frame.dim) {
            return Err(Error::Dimension(
                "warm start does not fit the decomposition frame".into(),
            ));
        }
        let mut rows = w.clone();
        rows.resize(m, vec![Complex64::default(); frame.dim]);
        starts.push(rows);
    }
    let n_random = if m == 1 { 1 } else { budget.restarts };

    let mut searches: Vec<LocalSearch<O>> = (0..n_random + starts.len())
        .into_par_iter()
        .map(|k| {
            let rows = if k < n_random {
                let mut rng = budget.seed.stream(k as u64);
                let params: Vec<f64> = (0..frame.param_len())
                    .map(|i| {
                        if i % 2 == 0 {
                            rng.random_range(0.0..PI)
                        } else {
                            rng.random_range(0.0..2.0 * PI)
                        }
                    })
                    .collect();
                let mut rows = frame.base.clone();
                apply_params(&mut rows, &params);
                rows
            } else {
                starts[k - n_random].clone()
            };
            let mut search = LocalSearch::new(objective, sign, rows);
            search.advance(budget.screen_sweeps.min(budget.max_sweeps), budget.tol);
            search
        })
        .collect();

    // Continue the most promising restarts; ties go to the lower restart index.
    let mut order: Vec<usize> = (0..searches.len()).collect();
    order.sort_by(|&i, &j| {
        searches[j]
            .value
            .total_cmp(&searches[i].value)
            .then(i.cmp(&j))
    });
    let finalists: Vec<usize> = order.into_iter().take(budget.finalists.max(1)).collect();
    let mut selected: Vec<(usize, &mut LocalSearch<O>)> = searches
        .iter_mut()
        .enumerate()
        .filter(|(k, _)| finalists.contains(k))
        .collect();
    selected
        .par_iter_mut()
        .for_each(|(_, search)| search.advance(budget.max_sweeps, budget.tol));

    let best = searches
        .into_iter()
        .reduce(|best, next| if next.value > best.value { next } else { best })
        .expect("at least one restart");

    let decomposition = Decomposition::from_rows(frame.n_qubits, &best.rows)?;
    let converged = best.converged;
    let value = decomposition.average(objective);
    Ok(RoofResult {
        value,
        mode,
        decomposition,
        restarts_used: n_random + starts.len(),
        converged,
        history: best.history,
    })
}

/// Concurrence of assistance `Σ λ_i` over the spin-flip spectrum.
pub fn coa_exact(rho: &DensityMatrix) -> Result<f64> {
    Ok(wootters_lambdas(rho)?.iter().sum::<f64>().clamp(0.0, 1.0))
}

/// Subnormalized vectors of a decomposition attaining the concurrence of assistance.
///
/// With `τ = W Σ Wᵀ` (Takagi), the rows of `W^†` applied to `√μ_j |e_j⟩` give
/// states with `p_i C_i = σ_i`.
pub fn coa_optimal_rows(rho: &DensityMatrix) -> Result<Vec<Vec<Complex64>>> {
    require_two_qubits(rho)?;
    let sup = support(rho)?;
    let tau = spin_flip_overlap(&sup);
    let w = takagi_vectors(&tau)?;
    let r = sup.weights.len();
    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![Complex64::default(); 4];
        for j in 0..r {
            let coef = w[(j, i)].conj() * sup.weights[j].sqrt();
            for (dst, e) in row.iter_mut().zip(&sup.vectors[j]) {
                *dst += coef * e;
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Decomposition attaining the concurrence of assistance.
pub fn coa_optimal_decomposition(rho: &DensityMatrix) -> Result<Decomposition> {
    Decomposition::from_rows(2, &coa_optimal_rows(rho)?)
}

/// Unitary `W` with `τ conj(w_k) = σ_k w_k` for a complex symmetric `τ`, columns ordered
/// by descending `σ_k`.
fn takagi_vectors(tau: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = tau.rows();
    // Real symmetric embedding [[A, B], [B, -A]] of τ = A + iB; its eigenvector (x; y)
    // for eigenvalue σ > 0 gives a Takagi vector x + iy.
    let mut k = ComplexMatrix::zeros(2 * r, 2 * r);
    for i in 0..r {
        for j in 0..r {
            let z = tau[(i, j)];
            k[(i, j)] = c(z.re, 0.0);
            k[(i, r + j)] = c(z.im, 0.0);
            k[(r + i, j)] = c(z.im, 0.0);
            k[(r + i, r + j)] = c(-z.re, 0.0);
        }
    }
    let eig = herm_eig(&k)?;
    let mut cols: Vec<Vec<Complex64>> = (0..r)
        .map(|col| {
            (0..r)
                .map(|i| {
                    c(
                        eig.eigenvectors[(i, col)].re,
                        eig.eigenvectors[(r + i, col)].re,
                    )
                })
                .collect()
        })
        .collect();

    // Gram-Schmidt; only columns inside the kernel of τ can need repair.
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    let mut fallback = 0;
    for col in cols.iter_mut() {
        let mut v = col.clone();
        loop {
            for b in &basis {
                let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-8 {
                v.iter_mut().for_each(|z| *z /= norm);
                break;
            }
            v = (0..r)
                .map(|i| c(if i == fallback { 1.0 } else { 0.0 }, 0.0))
                .collect();
            fallback += 1;
        }
        basis.push(v);
    }
    let mut w = ComplexMatrix::zeros(r, r);
    for (j, col) in basis.iter().enumerate() {
        for i in 0..r {
            w[(i, j)] = col[i];
        }
    }
    Ok(w)
}

/// Lower bound on the Rényi-α entanglement of assistance of a two-qubit state.
///
/// Besides the random restarts, one local search starts from the decomposition that
/// attains the concurrence of assistance; by convexity of `f_α` that start alone is
/// worth at least `f_α(C^a)`.
pub fn reoa(rho: &DensityMatrix, alpha: AlphaParam, budget: &OptBudget) -> Result<RoofResult> {
    require_two_qubits(rho)?;
    let alpha = alpha.require_analytic()?;
    let warm = coa_optimal_rows(rho)?;
    optimize_roof_with_starts(
        rho,
        &RenyiEntanglement { alpha },
        RoofMode::Max,
        budget,
        &[warm],
    )
}

/// Convex-roof Rényi-α entanglement by direct minimization (upper bound on the true minimum).
pub fn renyi_entanglement_roof(
    rho: &DensityMatrix,
    alpha: AlphaParam,
    budget: &OptBudget,
) -> Result<RoofResult> {
    require_two_qubits(rho)?;
    optimize_roof(rho, &RenyiEntanglement { alpha }, RoofMode::Min, budget)
}
