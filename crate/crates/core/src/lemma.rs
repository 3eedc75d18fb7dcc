//! Auxiliary functions behind the subadditivity of `f_α` and grid scans of their signs.
//!
//! * `g_α(x, y) = f_α(x) + f_α(y) − f_α(√(x² + y²))`, non-negative on the quarter disc `D`.
//! * `l_α(x) = [Θ^{α−1} − Ξ^{α−1}] / (√(1 − x²) [Ξ^α + Θ^α])`.
//! * `h_α(x) = dl_α/dx`.
//! * `m_α(x) = 1 − f_α(x) − f_α(√(1 − x²))`, which equals `−g_α(x, √(1 − x²))`.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{f_alpha_unchecked, AlphaParam, ALPHA_MAX, ALPHA_MIN};

/// Number of α values spanning the lemma range in scans of `g`.
pub const G_ALPHA_COUNT: usize = 21;
pub const DEFAULT_STEP_1D: f64 = 1e-3;
pub const DEFAULT_STEP_2D: f64 = 2e-3;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Offset for central differences of `h` and `m`.
pub const FD_DELTA: f64 = 1e-5;

const DOMAIN_SLACK: f64 = 1e-12;

fn domain(value: f64, domain: &'static str) -> Error {
    Error::Domain { value, domain }
}

fn f(x: f64, alpha: AlphaParam) -> f64 {
    f_alpha_unchecked(x.clamp(0.0, 1.0), alpha)
}

/// Subadditivity gap of `f_α` on `D = {x, y ≥ 0, x² + y² ≤ 1}`.
pub fn g_alpha(x: f64, y: f64, alpha: AlphaParam) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(domain(x.min(y), "D = {x, y >= 0, x^2 + y^2 <= 1}"));
    }
    let r2 = x * x + y * y;
    if r2.is_nan() || r2 > 1.0 + DOMAIN_SLACK {
        return Err(domain(r2.sqrt(), "D = {x, y >= 0, x^2 + y^2 <= 1}"));
    }
    Ok(g_unchecked(x, y, alpha))
}

fn g_unchecked(x: f64, y: f64, alpha: AlphaParam) -> f64 {
    f(x, alpha) + f(y, alpha) - f((x * x + y * y).sqrt(), alpha)
}

fn open_unit(x: f64) -> Result<f64> {
    if x > 0.0 && x < 1.0 {
        Ok(x)
    } else {
        Err(domain(x, "(0, 1)"))
    }
}

/// `(Θ, Ξ, √(1 − x²))` with `Ξ = x² / Θ`.
fn theta_xi_s(x: f64) -> (f64, f64, f64) {
    let s = (1.0 - x * x).sqrt();
    let theta = 1.0 + s;
    (theta, x * x / theta, s)
}

pub fn l_alpha(x: f64, alpha: AlphaParam) -> Result<f64> {
    let x = open_unit(x)?;
    let a = alpha.value();
    let (t, xi, s) = theta_xi_s(x);
    Ok((t.powf(a - 1.0) - xi.powf(a - 1.0)) / (s * (xi.powf(a) + t.powf(a))))
}

/// `dl_α/dx` in closed form.
pub fn h_alpha(x: f64, alpha: AlphaParam) -> Result<f64> {
    Ok(h_unchecked(open_unit(x)?, alpha.value()))
}

fn h_unchecked(x: f64, a: f64) -> f64 {
    let (t, xi, s) = theta_xi_s(x);
    let n = t.powf(a - 1.0) - xi.powf(a - 1.0);
    let d = xi.powf(a) + t.powf(a);
    let c2 = s * s;
    a * x * n * n / (c2 * d * d) - (a - 1.0) * x * (t.powf(a - 2.0) + xi.powf(a - 2.0)) / (c2 * d)
        + x * n / (c2 * s * d)
}

/// `lim_{x→1} h_α(x) = 2(α³ − 4α + 3)/3`.
pub fn h_limit_x1(alpha: AlphaParam) -> f64 {
    let a = alpha.value();
    2.0 * (a * a * a - 4.0 * a + 3.0) / 3.0
}

/// `m_α(x) = 1 − f_α(x) − f_α(√(1 − x²))` on `[0, 1]`.
pub fn m_alpha(x: f64, alpha: AlphaParam) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(x, "[0, 1]"));
    }
    Ok(m_unchecked(x, alpha))
}

fn m_unchecked(x: f64, alpha: AlphaParam) -> f64 {
    1.0 - f(x, alpha) - f((1.0 - x * x).max(0.0).sqrt(), alpha)
}

fn alpha_unchecked(a: f64) -> AlphaParam {
    AlphaParam::new(a).expect("grid orders are positive")
}

/// Central difference of `h` in `x`.
pub fn dh_dx(x: f64, alpha: AlphaParam) -> f64 {
    let a = alpha.value();
    (h_unchecked(x + FD_DELTA, a) - h_unchecked(x - FD_DELTA, a)) / (2.0 * FD_DELTA)
}

/// Central difference of `h` in `α`.
pub fn dh_dalpha(x: f64, alpha: AlphaParam) -> f64 {
    let a = alpha.value();
    (h_unchecked(x, a + FD_DELTA) - h_unchecked(x, a - FD_DELTA)) / (2.0 * FD_DELTA)
}

/// Central difference of `m` in `x`.
pub fn dm_dx(x: f64, alpha: AlphaParam) -> f64 {
    (m_unchecked(x + FD_DELTA, alpha) - m_unchecked(x - FD_DELTA, alpha)) / (2.0 * FD_DELTA)
}

/// Central difference of `m` in `α`.
pub fn dm_dalpha(x: f64, alpha: AlphaParam) -> f64 {
    let a = alpha.value();
    let hi = m_unchecked(x, alpha_unchecked(a + FD_DELTA));
    let lo = m_unchecked(x, alpha_unchecked(a - FD_DELTA));
    (hi - lo) / (2.0 * FD_DELTA)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScanDomain {
    /// Quarter disc in `(x, y)`, scanned over α values spanning the lemma range.
    D,
    /// `1 ≤ α ≤ (√13 − 1)/2`, `0 ≤ x ≤ 1`.
    D1,
    /// `(√7 − 1)/2 ≤ α ≤ 1`, `0 ≤ x ≤ 1`.
    D2,
    /// `(√7 − 1)/2 ≤ α ≤ (√13 − 1)/2`, `0 ≤ x ≤ 1`.
    D3,
}

impl ScanDomain {
    pub fn alpha_range(self) -> (f64, f64) {
        match self {
            ScanDomain::D | ScanDomain::D3 => (ALPHA_MIN, ALPHA_MAX),
            ScanDomain::D1 => (1.0, ALPHA_MAX),
            ScanDomain::D2 => (ALPHA_MIN, 1.0),
        }
    }
}

impl fmt::Display for ScanDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ScanDomain::D => "D",
            ScanDomain::D1 => "D1",
            ScanDomain::D2 => "D2",
            ScanDomain::D3 => "D3",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaFunction {
    G,
    H,
    M,
}

impl fmt::Display for LemmaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaFunction::G => "g",
            LemmaFunction::H => "h",
            LemmaFunction::M => "m",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    pub alpha: f64,
}

/// Summary of a sign scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub function: LemmaFunction,
    pub domain: ScanDomain,
    pub step: f64,
    pub tolerance: f64,
    pub points: usize,
    pub min_value: f64,
    pub argmin: GridPoint,
    pub max_value: f64,
    pub argmax: GridPoint,
    /// Points where the value has the wrong sign by more than `tolerance`.
    pub violations: usize,
    pub path: Option<PathBuf>,
}

/// Sign each function is expected to have on each domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Claim {
    NonNegative,
    NonPositive,
}

fn claim_for(function: LemmaFunction, domain: ScanDomain) -> Result<Claim> {
    match (function, domain) {
        (LemmaFunction::G, ScanDomain::D) => Ok(Claim::NonNegative),
        (LemmaFunction::H, ScanDomain::D1) => Ok(Claim::NonPositive),
        (LemmaFunction::H, ScanDomain::D2) => Ok(Claim::NonNegative),
        (LemmaFunction::M, ScanDomain::D3) => Ok(Claim::NonPositive),
        _ => Err(Error::Parameter(format!(
            "no sign claim for {function} on {domain}"
        ))),
    }
}

/// Checks `step` and returns the number of intervals covering a unit length.
fn intervals(step: f64) -> Result<usize> {
    if !(1e-4..=1e-1).contains(&step) {
        return Err(Error::Parameter(format!(
            "step {step} outside [1e-4, 1e-1]"
        )));
    }
    Ok((1.0 / step).round() as usize)
}

/// `n + 1` evenly spaced points from `lo` to `hi` inclusive, `n = ceil((hi − lo)/step)`.
fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step - 1e-9).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| lo + (hi - lo) * i as f64 / n as f64)
        .collect()
}

fn interior(v: Vec<f64>) -> Vec<f64> {
    let n = v.len();
    v.into_iter().skip(1).take(n.saturating_sub(2)).collect()
}

/// α values spanning the lemma range, endpoints included.
pub fn lemma_alpha_grid(count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| {
            if i + 1 == count {
                ALPHA_MAX
            } else {
                ALPHA_MIN + (ALPHA_MAX - ALPHA_MIN) * i as f64 / (count - 1) as f64
            }
        })
        .collect()
}

pub(crate) fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone)]
struct RowStats {
    points: usize,
    min: (f64, GridPoint),
    max: (f64, GridPoint),
    violations: usize,
    csv: String,
}

impl RowStats {
    fn empty() -> Self {
        let p = GridPoint {
            x: f64::NAN,
            y: None,
            alpha: f64::NAN,
        };
        Self {
            points: 0,
            min: (f64::INFINITY, p),
            max: (f64::NEG_INFINITY, p),
            violations: 0,
            csv: String::new(),
        }
    }

    fn push(&mut self, p: GridPoint, v: f64, claim: Claim, tol: f64, write: bool) {
        self.points += 1;
        if v < self.min.0 {
            self.min = (v, p);
        }
        if v > self.max.0 {
            self.max = (v, p);
        }
        let bad = match claim {
            Claim::NonNegative => v < -tol,
            Claim::NonPositive => v > tol,
        };
        if bad {
            self.violations += 1;
        }
        if write {
            self.csv.push_str(&fmt_float(p.alpha));
            self.csv.push(',');
            self.csv.push_str(&fmt_float(p.x));
            if let Some(y) = p.y {
                self.csv.push(',');
                self.csv.push_str(&fmt_float(y));
            }
            self.csv.push(',');
            self.csv.push_str(&fmt_float(v));
            self.csv.push('\n');
        }
    }

    /// Merge keeping the earlier row's extremum on ties.
    fn merge(mut self, other: RowStats) -> RowStats {
        self.points += other.points;
        self.violations += other.violations;
        if other.min.0 < self.min.0 {
            self.min = other.min;
        }
        if other.max.0 > self.max.0 {
            self.max = other.max;
        }
        self.csv.push_str(&other.csv);
        self
    }
}

/// Scans the sign of `function` over a grid of `domain`.
///
/// `g` on `D` covers the full quarter disc (boundary included) for each of
/// [`G_ALPHA_COUNT`] α values; `h` on `D1`/`D2` covers the open interior; `m` on `D3`
/// covers the closed rectangle. When `out` is given every grid value is written as CSV.
pub fn scan_sign(
    function: LemmaFunction,
    domain: ScanDomain,
    step: f64,
    tolerance: f64,
    out: Option<&Path>,
) -> Result<ScanReport> {
    let claim = claim_for(function, domain)?;
    let n = intervals(step)?;
    let write = out.is_some();
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();

    let (header, rows): (&str, Vec<RowStats>) = match function {
        LemmaFunction::G => {
            let alphas = lemma_alpha_grid(G_ALPHA_COUNT);
            let jobs: Vec<(f64, usize)> = alphas
                .iter()
                .flat_map(|&a| (0..=n).map(move |i| (a, i)))
                .collect();
            let rows = jobs
                .par_iter()
                .map(|&(a, i)| {
                    let alpha = alpha_unchecked(a);
                    let mut row = RowStats::empty();
                    let x = xs[i];
                    for &y in xs
                        .iter()
                        .take_while(|&&y| x * x + y * y <= 1.0 + DOMAIN_SLACK)
                    {
                        let p = GridPoint {
                            x,
                            y: Some(y),
                            alpha: a,
                        };
                        row.push(p, g_unchecked(x, y, alpha), claim, tolerance, write);
                    }
                    row
                })
                .collect();
            ("alpha,x,y,g", rows)
        }
        LemmaFunction::H | LemmaFunction::M => {
            let (lo, hi) = domain.alpha_range();
            let (alphas, xs) = if function == LemmaFunction::H {
                (interior(axis(lo, hi, step)), interior(xs.clone()))
            } else {
                (axis(lo, hi, step), xs.clone())
            };
            let rows = alphas
                .par_iter()
                .map(|&a| {
                    let alpha = alpha_unchecked(a);
                    let mut row = RowStats::empty();
                    for &x in &xs {
                        let v = if function == LemmaFunction::H {
                            h_unchecked(x, a)
                        } else {
                            m_unchecked(x, alpha)
                        };
                        row.push(
                            GridPoint {
                                x,
                                y: None,
                                alpha: a,
                            },
                            v,
                            claim,
                            tolerance,
                            write,
                        );
                    }
                    row
                })
                .collect();
            (
                if function == LemmaFunction::H {
                    "alpha,x,h"
                } else {
                    "alpha,x,m"
                },
                rows,
            )
        }
    };

    let total = rows.into_iter().fold(RowStats::empty(), RowStats::merge);
    if let Some(path) = out {
        let mut w = BufWriter::new(File::create(path)?);
        writeln!(w, "{header}")?;
        w.write_all(total.csv.as_bytes())?;
        w.flush()?;
    }
    Ok(ScanReport {
        function,
        domain,
        step: 1.0 / n as f64,
        tolerance,
        points: total.points,
        min_value: total.min.0,
        argmin: total.min.1,
        max_value: total.max.0,
        argmax: total.max.1,
        violations: total.violations,
        path: out.map(Path::to_path_buf),
    })
}

/// Zero contours of both partial derivatives of `h` or `m` over a domain's interior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    pub function: LemmaFunction,
    pub domain: ScanDomain,
    pub step: f64,
    /// Zeros of the x-partial, located by bisection along grid edges.
    pub contour_x: Vec<GridPoint>,
    /// Zeros of the α-partial, located by bisection along grid edges.
    pub contour_alpha: Vec<GridPoint>,
    /// Lower-left corners of grid cells where both partials change sign.
    pub common_cells: Vec<GridPoint>,
}

impl CriticalReport {
    pub fn has_common_point(&self) -> bool {
        !self.common_cells.is_empty()
    }
}

type Partial = fn(f64, AlphaParam) -> f64;

fn bisect(mut lo: f64, mut hi: f64, mut flo: f64, g: impl Fn(f64) -> f64) -> f64 {
    for _ in 0..60 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fm = g(mid);
        if (fm <= 0.0) == (flo <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sign-change cells and contour points of a sampled partial.
fn contours(
    alphas: &[f64],
    xs: &[f64],
    grid: &[Vec<f64>],
    partial: Partial,
) -> (Vec<Vec<bool>>, Vec<GridPoint>) {
    let na = alphas.len();
    let nx = xs.len();
    let straddles = |vals: &[f64]| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut cells = vec![vec![false; nx.saturating_sub(1)]; na.saturating_sub(1)];
    for i in 0..na.saturating_sub(1) {
        for j in 0..nx.saturating_sub(1) {
            cells[i][j] = straddles(&[
                grid[i][j],
                grid[i + 1][j],
                grid[i][j + 1],
                grid[i + 1][j + 1],
            ]);
        }
    }

    let mut points = Vec::new();
    for i in 0..na {
        let alpha = alpha_unchecked(alphas[i]);
        for j in 0..nx.saturating_sub(1) {
            let (u, v) = (grid[i][j], grid[i][j + 1]);
            if (u <= 0.0) != (v <= 0.0) {
                let x = bisect(xs[j], xs[j + 1], u, |x| partial(x, alpha));
                points.push(GridPoint {
                    x,
                    y: None,
                    alpha: alphas[i],
                });
            }
        }
    }
    for j in 0..nx {
        for i in 0..na.saturating_sub(1) {
            let (u, v) = (grid[i][j], grid[i + 1][j]);
            if (u <= 0.0) != (v <= 0.0) {
                let x = xs[j];
                let a = bisect(alphas[i], alphas[i + 1], u, |a| {
                    partial(x, alpha_unchecked(a))
                });
                points.push(GridPoint {
                    x,
                    y: None,
                    alpha: a,
                });
            }
        }
    }
    (cells, points)
}

/// Locates the zero sets of `∂/∂x` and `∂/∂α` of `h` (on `D1`/`D2`) or `m` (on `D3`) on the
/// interior grid and reports cells where both vanish.
pub fn critical_point_scan(
    function: LemmaFunction,
    domain: ScanDomain,
    step: f64,
) -> Result<CriticalReport> {
    if !(step > 0.0 && step <= 1e-2) {
        return Err(Error::Parameter(format!(
            "critical-point step {step} must lie in (0, 1e-2]"
        )));
    }
    let (px, pa): (Partial, Partial) = match (function, domain) {
        (LemmaFunction::H, ScanDomain::D1 | ScanDomain::D2) => (dh_dx, dh_dalpha),
        (LemmaFunction::M, ScanDomain::D3) => (dm_dx, dm_dalpha),
        _ => {
            return Err(Error::Parameter(format!(
                "no critical-point scan for {function} on {domain}"
            )))
        }
    };
    let (lo, hi) = domain.alpha_range();
    let alphas = interior(axis(lo, hi, step));
    let xs = interior(axis(0.0, 1.0, step));

    let sample = |p: Partial| -> Vec<Vec<f64>> {
        alphas
            .par_iter()
            .map(|&a| {
                let alpha = alpha_unchecked(a);
                xs.iter().map(|&x| p(x, alpha)).collect()
            })
            .collect()
    };
    let (cells_x, contour_x) = contours(&alphas, &xs, &sample(px), px);
    let (cells_a, contour_alpha) = contours(&alphas, &xs, &sample(pa), pa);

    let mut common_cells = Vec::new();
    for (i, (rx, ra)) in cells_x.iter().zip(&cells_a).enumerate() {
        for (j, (&cx, &ca)) in rx.iter().zip(ra).enumerate() {
            if cx && ca {
                common_cells.push(GridPoint {
                    x: xs[j],
                    y: None,
                    alpha: alphas[i],
                });
            }
        }
    }
    Ok(CriticalReport {
        function,
        domain,
        step: (hi - lo) / (alphas.len() + 1) as f64,
        contour_x,
        contour_alpha,
        common_cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FigureId {
    #[serde(rename = "1a")]
    Fig1a,
    #[serde(rename = "1b")]
    Fig1b,
    #[serde(rename = "2")]
    Fig2,
    #[serde(rename = "3")]
    Fig3,
    #[serde(rename = "4")]
    Fig4,
    #[serde(rename = "5")]
    Fig5,
    #[serde(rename = "6")]
    Fig6,
    #[serde(rename = "7")]
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 8] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "1a",
            FigureId::Fig1b => "1b",
            FigureId::Fig2 => "2",
            FigureId::Fig3 => "3",
            FigureId::Fig4 => "4",
            FigureId::Fig5 => "5",
            FigureId::Fig6 => "6",
            FigureId::Fig7 => "7",
        }
    }

    pub fn file_name(self) -> String {
        format!("fig{}.csv", self.name())
    }

    fn is_surface(self) -> bool {
        matches!(
            self,
            FigureId::Fig1a | FigureId::Fig1b | FigureId::Fig5 | FigureId::Fig7
        )
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Parameter(format!("unknown figure id '{s}' (expected 1a, 1b, 2..7)"))
            })
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Grid steps for figure data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureGrid {
    pub step_1d: f64,
    pub step_2d: f64,
}

impl Default for FigureGrid {
    fn default() -> Self {
        Self {
            step_1d: DEFAULT_STEP_1D,
            step_2d: 1e-2,
        }
    }
}

/// Description of an emitted figure file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureFile {
    pub id: FigureId,
    pub file: String,
    pub columns: Vec<String>,
    pub rows: usize,
    pub step: f64,
    pub alpha_range: (f64, f64),
    pub x_range: (f64, f64),
}

fn surface(alphas: &[f64], xs: &[f64], v: Partial) -> Vec<Vec<f64>> {
    alphas
        .par_iter()
        .flat_map_iter(|&a| {
            let alpha = alpha_unchecked(a);
            xs.iter()
                .map(move |&x| vec![a, x, v(x, alpha)])
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Column names, rows, α range and x range of one figure.
pub type FigureTable = (Vec<&'static str>, Vec<Vec<f64>>, (f64, f64), (f64, f64));

/// Rows and column names behind one figure.
pub fn figure_data(id: FigureId, grid: &FigureGrid) -> Result<FigureTable> {
    let step = if id.is_surface() {
        grid.step_2d
    } else {
        grid.step_1d
    };
    intervals(step)?;
    let unit_interior = interior(axis(0.0, 1.0, step));
    let h_curve = |a: f64| -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = unit_interior
            .iter()
            .map(|&x| vec![x, h_unchecked(x, a)])
            .collect();
        rows.push(vec![1.0, h_limit_x1(alpha_unchecked(a))]);
        rows
    };
    Ok(match id {
        FigureId::Fig1a | FigureId::Fig1b => {
            let alphas = interior(axis(0.0, 2.0, step));
            let (name, p): (&str, Partial) = if id == FigureId::Fig1a {
                ("dh_dx", dh_dx)
            } else {
                ("dh_dalpha", dh_dalpha)
            };
            (
                vec!["alpha", "x", name],
                surface(&alphas, &unit_interior, p),
                (0.0, 2.0),
                (0.0, 1.0),
            )
        }
        FigureId::Fig2 => (
            vec!["x", "h"],
            h_curve(ALPHA_MAX),
            (ALPHA_MAX, ALPHA_MAX),
            (0.0, 1.0),
        ),
        FigureId::Fig4 => (
            vec!["x", "h"],
            h_curve(ALPHA_MIN),
            (ALPHA_MIN, ALPHA_MIN),
            (0.0, 1.0),
        ),
        FigureId::Fig3 => {
            let rows = axis(1.0, ALPHA_MAX, step)
                .into_iter()
                .map(|a| vec![a, h_limit_x1(alpha_unchecked(a))])
                .collect();
            (
                vec!["alpha", "h_limit_x1"],
                rows,
                (1.0, ALPHA_MAX),
                (1.0, 1.0),
            )
        }
        FigureId::Fig5 => {
            let alphas = axis(ALPHA_MIN, ALPHA_MAX, step);
            (
                vec!["alpha", "x", "dm_dx"],
                surface(&alphas, &unit_interior, dm_dx),
                (ALPHA_MIN, ALPHA_MAX),
                (0.0, 1.0),
            )
        }
        FigureId::Fig6 => {
            let x = std::f64::consts::FRAC_1_SQRT_2;
            let rows = axis(ALPHA_MIN, ALPHA_MAX, step)
                .into_iter()
                .map(|a| vec![a, dm_dalpha(x, alpha_unchecked(a))])
                .collect();
            (
                vec!["alpha", "dm_dalpha"],
                rows,
                (ALPHA_MIN, ALPHA_MAX),
                (x, x),
            )
        }
        FigureId::Fig7 => {
            let alphas = axis(ALPHA_MIN, ALPHA_MAX, step);
            let xs = axis(0.0, 1.0, step);
            (
                vec!["alpha", "x", "m"],
                surface(&alphas, &xs, m_unchecked),
                (ALPHA_MIN, ALPHA_MAX),
                (0.0, 1.0),
            )
        }
    })
}

/// Writes `fig{id}.csv` into `dir`.
pub fn emit_figure_data(id: FigureId, dir: &Path, grid: &FigureGrid) -> Result<FigureFile> {
    let (columns, rows, alpha_range, x_range) = figure_data(id, grid)?;
    let file = id.file_name();
    let mut w = BufWriter::new(File::create(dir.join(&file))?);
    writeln!(w, "{}", columns.join(","))?;
    for row in &rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    w.flush()?;
    Ok(FigureFile {
        id,
        file,
        columns: columns.into_iter().map(String::from).collect(),
        rows: rows.len(),
        step: if id.is_surface() {
            grid.step_2d
        } else {
            grid.step_1d
        },
        alpha_range,
        x_range,
    })
}
