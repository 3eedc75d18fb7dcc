//! Checks of the polygamy inequalities with verdicts aware of one-sided bounds.
//!
//! Each check reports `lhs` and `rhs` together with what each number certifies
//! about the true quantity: exact, a lower bound (attained by an explicit
//! decomposition or a floor), or an upper bound (a proven ceiling). A violation
//! is only declared when those sides make the comparison conclusive.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{
    f_alpha_unchecked, renyi_entropy, squared_concurrence_bipartition, AlphaParam, MuParam,
};
use crate::roof::{
    coa_exact, numerical_rank, optimize_roof, reoa, OptBudget, QubitRenyiEntropy, RoofMode,
};
use crate::states::{DensityMatrix, PureState, State};

/// Tolerance for comparisons between closed-form quantities.
pub const EXACT_TOL: f64 = 1e-9;
/// Tolerance for comparisons involving an optimizer result.
pub const OPTIMIZER_TOL: f64 = 1e-6;
/// Values this close to zero are treated as zero before raising to the power μ.
pub const ZERO_SNAP: f64 = 1e-12;
/// Largest rank supported by the mixed-state check.
pub const MAX_MIXED_RANK: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InequalityId {
    #[serde(rename = "eq1")]
    Eq1,
    #[serde(rename = "eq2")]
    Eq2,
    #[serde(rename = "eq8")]
    Eq8,
    #[serde(rename = "lemma1")]
    Lemma1,
    #[serde(rename = "eq19pure")]
    Eq19Pure,
    #[serde(rename = "eq19mixed")]
    Eq19Mixed,
    #[serde(rename = "eq24")]
    Eq24,
}

impl InequalityId {
    pub const ALL: [InequalityId; 7] = [
        InequalityId::Eq1,
        InequalityId::Eq2,
        InequalityId::Eq8,
        InequalityId::Lemma1,
        InequalityId::Eq19Pure,
        InequalityId::Eq19Mixed,
        InequalityId::Eq24,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Eq1 => "eq1",
            InequalityId::Eq2 => "eq2",
            InequalityId::Eq8 => "eq8",
            InequalityId::Lemma1 => "lemma1",
            InequalityId::Eq19Pure => "eq19pure",
            InequalityId::Eq19Mixed => "eq19mixed",
            InequalityId::Eq24 => "eq24",
        }
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What a reported number certifies about the true value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSide {
    Exact,
    LowerBound,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "holds")]
    Holds,
    #[serde(rename = "consistent")]
    Consistent,
    #[serde(rename = "VIOLATION")]
    Violation,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Consistent => "consistent",
            Verdict::Violation => "VIOLATION",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict for the claim `lhs ≤ rhs`, where `margin = rhs − lhs`.
///
/// | margin      | lhs side       | rhs side       | verdict      |
/// |-------------|----------------|----------------|--------------|
/// | `≥ −tol`    | exact / upper  | exact / lower  | holds        |
/// | `≥ −tol`    | otherwise      |                | consistent   |
/// | `< −tol`    | exact / lower  | exact / upper  | VIOLATION    |
/// | `< −tol`    | otherwise      |                | inconclusive |
pub fn decide(lhs_side: BoundSide, rhs_side: BoundSide, margin: f64, tol: f64) -> Verdict {
    use BoundSide::*;
    if margin >= -tol {
        if matches!(lhs_side, Exact | UpperBound) && matches!(rhs_side, Exact | LowerBound) {
            Verdict::Holds
        } else {
            Verdict::Consistent
        }
    } else if matches!(lhs_side, Exact | LowerBound) && matches!(rhs_side, Exact | UpperBound) {
        Verdict::Violation
    } else {
        Verdict::Inconclusive
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Right-hand REoA terms replaced by their exact floors `f_α(C^a)`.
    #[default]
    Certified,
    /// Right-hand REoA terms from the max-roof optimizer.
    Optimized,
}

/// The `A₁ | A₂ ⋯ A_n` split: a focus qubit and the partners it is paired with.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionSpec {
    focus: usize,
    partners: Vec<usize>,
}

impl PartitionSpec {
    /// The partners must be exactly the remaining qubits.
    pub fn new(focus: usize, partners: Vec<usize>, n_qubits: usize) -> Result<Self> {
        if focus >= n_qubits {
            return Err(Error::QubitIndex {
                index: focus,
                n_qubits,
            });
        }
        let mut seen = vec![false; n_qubits];
        seen[focus] = true;
        for &p in &partners {
            if p >= n_qubits {
                return Err(Error::QubitIndex { index: p, n_qubits });
            }
            if seen[p] {
                return Err(Error::Partition(format!("qubit {p} listed twice")));
            }
            seen[p] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Partition(format!(
                "partners {partners:?} with focus {focus} do not cover all {n_qubits} qubits"
            )));
        }
        Ok(Self { focus, partners })
    }

    /// Focus qubit 0, partners `1..n`.
    pub fn first(n_qubits: usize) -> Result<Self> {
        Self::new(0, (1..n_qubits).collect(), n_qubits)
    }

    pub fn focus(&self) -> usize {
        self.focus
    }

    pub fn partners(&self) -> &[usize] {
        &self.partners
    }

    fn pair(&self, partner: usize) -> [usize; 2] {
        if self.focus < partner {
            [self.focus, partner]
        } else {
            [partner, self.focus]
        }
    }

    fn check_n(&self, n_qubits: usize) -> Result<()> {
        if self.partners.len() + 1 != n_qubits {
            return Err(Error::Partition(format!(
                "partition covers {} qubits, state has {n_qubits}",
                self.partners.len() + 1
            )));
        }
        Ok(())
    }
}

/// One inequality evaluated on one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub inequality: InequalityId,
    pub state: String,
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CheckMode>,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_side: BoundSide,
    pub rhs_side: BoundSide,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InequalityReport {
    fn new(inequality: InequalityId, n_qubits: usize, sides: &Sides) -> Self {
        let rhs: f64 = sides.rhs_terms.iter().sum();
        let margin = rhs - sides.lhs;
        Self {
            inequality,
            state: String::new(),
            n_qubits,
            alpha: None,
            mu: None,
            mode: None,
            lhs: sides.lhs,
            rhs,
            lhs_side: sides.lhs_side,
            rhs_side: sides.rhs_side,
            margin,
            tolerance: sides.tol,
            verdict: decide(sides.lhs_side, sides.rhs_side, margin, sides.tol),
            note: sides.note.clone(),
        }
    }

    pub fn with_state(mut self, descriptor: impl Into<String>) -> Self {
        self.state = descriptor.into();
        self
    }
}

/// The two sides of `lhs ≤ Σ rhs_terms`.
#[derive(Debug, Clone)]
struct Sides {
    lhs: f64,
    lhs_side: BoundSide,
    rhs_terms: Vec<f64>,
    rhs_side: BoundSide,
    tol: f64,
    note: Option<String>,
}

fn require_qubits(n: usize, lo: usize, hi: usize) -> Result<()> {
    if (lo..=hi).contains(&n) {
        Ok(())
    } else {
        Err(Error::Partition(format!(
            "{n} qubits outside supported {lo}..={hi}"
        )))
    }
}

/// CoA polygamy for squared concurrence: `C²(A₁|rest) ≤ Σ_i C^a(ρ_{A₁A_i})²`.
pub fn check_eq1_eq2(psi: &PureState, part: &PartitionSpec) -> Result<InequalityReport> {
    let n = psi.n_qubits();
    require_qubits(n, 3, crate::linalg::MAX_QUBITS)?;
    part.check_n(n)?;
    let lhs = squared_concurrence_bipartition(psi, &[part.focus])?;
    let rhs_terms = part
        .partners
        .iter()
        .map(|&p| Ok(coa_exact(&psi.reduced(&part.pair(p))?)?.powi(2)))
        .collect::<Result<Vec<f64>>>()?;
    let sides = Sides {
        lhs,
        lhs_side: BoundSide::Exact,
        rhs_terms,
        rhs_side: BoundSide::Exact,
        tol: EXACT_TOL,
        note: None,
    };
    let id = if n == 3 {
        InequalityId::Eq1
    } else {
        InequalityId::Eq2
    };
    Ok(InequalityReport::new(id, n, &sides))
}

fn require_subunit_analytic(alpha: AlphaParam) -> Result<AlphaParam> {
    let alpha = alpha.require_analytic()?;
    if alpha.value() < 1.0 {
        Ok(alpha)
    } else {
        Err(Error::AlphaRange {
            alpha: alpha.value(),
            range: "[(sqrt7-1)/2, 1)",
        })
    }
}

fn two_qubit_marginals(rho: &DensityMatrix, alpha: AlphaParam) -> Result<(f64, f64)> {
    Ok((
        renyi_entropy(&rho.reduced(&[0])?, alpha)?,
        renyi_entropy(&rho.reduced(&[1])?, alpha)?,
    ))
}

/// REoA ceiling for `0 < α < 1`: `E_α^a(ρ_AB) ≤ min{S_α(ρ_A), S_α(ρ_B)}`.
pub fn check_eq8(
    rho: &DensityMatrix,
    alpha: AlphaParam,
    budget: &OptBudget,
) -> Result<InequalityReport> {
    let alpha = require_subunit_analytic(alpha)?;
    let lhs = reoa(rho, alpha, budget)?.value;
    let (sa, sb) = two_qubit_marginals(rho, alpha)?;
    let sides = Sides {
        lhs,
        lhs_side: BoundSide::LowerBound,
        rhs_terms: vec![sa.min(sb)],
        rhs_side: BoundSide::Exact,
        tol: OPTIMIZER_TOL,
        note: None,
    };
    let mut r = InequalityReport::new(InequalityId::Eq8, 2, &sides);
    r.alpha = Some(alpha.value());
    Ok(r)
}

/// Floor `f_α(C^a(ρ)) ≤ E_α^a(ρ)`, checked against the optimizer's lower bound.
///
/// A shortfall cannot refute the floor (the optimizer only bounds from below); it is
/// reported as inconclusive with a note flagging the optimizer.
pub fn check_lemma1(
    rho: &DensityMatrix,
    alpha: AlphaParam,
    budget: &OptBudget,
) -> Result<InequalityReport> {
    let alpha = alpha.require_analytic()?;
    let floor = f_alpha_unchecked(coa_exact(rho)?, alpha);
    let value = reoa(rho, alpha, budget)?.value;
    let mut sides = Sides {
        lhs: floor,
        lhs_side: BoundSide::Exact,
        rhs_terms: vec![value],
        rhs_side: BoundSide::LowerBound,
        tol: OPTIMIZER_TOL,
        note: None,
    };
    if value - floor < -OPTIMIZER_TOL {
        sides.note = Some("optimizer fell short of the certified floor".into());
    }
    let mut r = InequalityReport::new(InequalityId::Lemma1, 2, &sides);
    r.alpha = Some(alpha.value());
    Ok(r)
}

fn eq19_pure_sides(
    psi: &PureState,
    part: &PartitionSpec,
    alpha: AlphaParam,
    mode: CheckMode,
    budget: &OptBudget,
) -> Result<Sides> {
    let n = psi.n_qubits();
    require_qubits(n, 3, crate::linalg::MAX_QUBITS)?;
    part.check_n(n)?;
    let alpha = match mode {
        CheckMode::Certified => alpha.require_lemma_range()?,
        CheckMode::Optimized => alpha.require_analytic()?,
    };
    let lhs = renyi_entropy(&psi.reduced(&[part.focus])?, alpha)?;
    let mut rhs_terms = Vec::with_capacity(part.partners.len());
    for &p in &part.partners {
        let rho = psi.reduced(&part.pair(p))?;
        rhs_terms.push(match mode {
            CheckMode::Certified => f_alpha_unchecked(coa_exact(&rho)?, alpha),
            CheckMode::Optimized => reoa(&rho, alpha, budget)?.value,
        });
    }
    Ok(Sides {
        lhs,
        lhs_side: BoundSide::Exact,
        rhs_terms,
        rhs_side: BoundSide::LowerBound,
        tol: match mode {
            CheckMode::Certified => EXACT_TOL,
            CheckMode::Optimized => OPTIMIZER_TOL,
        },
        note: None,
    })
}

/// REoA polygamy on a pure `n`-qubit state, where the left side is `S_α(ρ_{A₁})`.
pub fn check_eq19_pure(
    psi: &PureState,
    part: &PartitionSpec,
    alpha: AlphaParam,
    mode: CheckMode,
    budget: &OptBudget,
) -> Result<InequalityReport> {
    let sides = eq19_pure_sides(psi, part, alpha, mode, budget)?;
    let mut r = InequalityReport::new(InequalityId::Eq19Pure, psi.n_qubits(), &sides);
    r.alpha = Some(alpha.value());
    r.mode = Some(mode);
    Ok(r)
}

fn eq19_mixed_sides(
    rho: &DensityMatrix,
    part: &PartitionSpec,
    alpha: AlphaParam,
    budget: &OptBudget,
) -> Result<(Sides, Option<CheckMode>)> {
    if rho.n_qubits() != 3 {
        return Err(Error::Partition(format!(
            "mixed-state check supports 3 qubits, got {}",
            rho.n_qubits()
        )));
    }
    part.check_n(3)?;
    let alpha = alpha.require_lemma_range()?;
    let rank = numerical_rank(rho)?;
    if rank > MAX_MIXED_RANK {
        return Err(Error::Parameter(format!(
            "mixed-state check supports rank <= {MAX_MIXED_RANK}, got {rank}"
        )));
    }
    if rank == 1 {
        let eig = crate::linalg::herm_eig(rho.matrix())?;
        let psi = PureState::normalized(3, eig.eigenvectors.column(0))?;
        let sides = eq19_pure_sides(&psi, part, alpha, CheckMode::Certified, budget)?;
        return Ok((sides, Some(CheckMode::Certified)));
    }

    let objective = QubitRenyiEntropy {
        n_qubits: 3,
        qubit: part.focus,
        alpha,
    };
    let lhs = optimize_roof(rho, &objective, RoofMode::Max, budget)?.value;
    let mut rhs_terms = Vec::with_capacity(2);
    let rhs_side = if alpha.is_subunit() && !alpha.is_unit() {
        let s_focus = renyi_entropy(&rho.reduced(&[part.focus])?, alpha)?;
        for &p in &part.partners {
            rhs_terms.push(s_focus.min(renyi_entropy(&rho.reduced(&[p])?, alpha)?));
        }
        BoundSide::UpperBound
    } else {
        for &p in &part.partners {
            rhs_terms.push(f_alpha_unchecked(
                coa_exact(&rho.reduced(&part.pair(p))?)?,
                alpha,
            ));
        }
        BoundSide::LowerBound
    };
    Ok((
        Sides {
            lhs,
            lhs_side: BoundSide::LowerBound,
            rhs_terms,
            rhs_side,
            tol: OPTIMIZER_TOL,
            note: None,
        },
        None,
    ))
}

/// REoA polygamy on a mixed 3-qubit state of rank at most 4.
///
/// The left side is a max-roof lower bound. For `α < 1` the right side uses the
/// ceilings `min{S_α(ρ_{A₁}), S_α(ρ_{A_i})}`, so the check can conclusively fail; for
/// `α ≥ 1` only floors are available and the verdict is consistent or inconclusive.
pub fn check_eq19_mixed(
    rho: &DensityMatrix,
    part: &PartitionSpec,
    alpha: AlphaParam,
    budget: &OptBudget,
) -> Result<InequalityReport> {
    let (sides, mode) = eq19_mixed_sides(rho, part, alpha, budget)?;
    let mut r = InequalityReport::new(InequalityId::Eq19Mixed, 3, &sides);
    r.alpha = Some(alpha.value());
    r.mode = mode;
    Ok(r)
}

fn snap(x: f64) -> f64 {
    if x.abs() <= ZERO_SNAP {
        0.0
    } else {
        x
    }
}

/// μ-th power polygamy: `E^μ(A₁|rest) ≤ Σ_i E^μ(A₁A_i)` for `0 ≤ μ ≤ 1`.
///
/// Reuses the polygamy sides (pure states in `mode`, mixed 3-qubit states via the
/// mixed check) and raises every term to μ with `0^0 = 0`.
pub fn check_eq24(
    state: &State,
    part: &PartitionSpec,
    alpha: AlphaParam,
    mu: MuParam,
    mode: CheckMode,
    budget: &OptBudget,
) -> Result<InequalityReport> {
    let (sides, mode) = match state {
        State::Pure(psi) => (eq19_pure_sides(psi, part, alpha, mode, budget)?, Some(mode)),
        State::Mixed(rho) => eq19_mixed_sides(rho, part, alpha, budget)?,
    };
    let powered = Sides {
        lhs: mu.pow(snap(sides.lhs)),
        rhs_terms: sides.rhs_terms.iter().map(|&t| mu.pow(snap(t))).collect(),
        ..sides
    };
    let mut r = InequalityReport::new(InequalityId::Eq24, state.n_qubits(), &powered);
    r.alpha = Some(alpha.value());
    r.mu = Some(mu.value());
    r.mode = mode;
    Ok(r)
}
