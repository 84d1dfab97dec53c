//! Residuals certifying that `(J, ω = (i/2)∂∂̄φ, Ω = h dz¹∧…∧dzⁿ)` is
//! Calabi-Yau near the chart center with `L` special Lagrangian, to the
//! order the truncation supports.
//!
//! Each derivative costs one degree of meaningful information, so every
//! residual is measured only through the degree its inputs determine:
//! `G` and `M` through `K − 2`, `dω` through `K − 3`, Ricci through `K − 4`.

use std::fmt;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adapted::{ComplexStructureJet, DbarOperators};
use crate::error::{JetError, SolveError};
use crate::jet::{Coeff, Jet, JetMatrix, Mode};
use crate::masolver::{corner_split, HessianJet};
use crate::pipeline::Solution;

/// Named tolerances; one table shared by the certificate, config and tests.
#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances {
    entries: Vec<(&'static str, f64)>,
}

pub const TOLERANCE_NAMES: [&str; 11] = [
    "ma_residual",
    "ricci_residual",
    "nijenhuis_residual",
    "lagrangian_residual",
    "metric_restriction_residual",
    "special_lagrangian_residual",
    "volume_match_residual",
    "corner_identity_residual",
    "structural",
    "psh_margin",
    "fd_slope_margin",
];

impl Tolerances {
    pub fn for_mode(mode: Mode) -> Self {
        let values: [f64; 11] = match mode {
            Mode::Exact => [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5],
            Mode::Binary64 => [
                1e-9, 1e-8, 1e-10, 1e-9, 1e-9, 1e-9, 1e-9, 1e-9, 1e-12, 0.5, 0.5,
            ],
        };
        Tolerances {
            entries: TOLERANCE_NAMES.iter().copied().zip(values).collect(),
        }
    }

    pub fn get(&self, name: &str) -> f64 {
        self.entries
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, v)| *v)
            .unwrap_or(0.0)
    }

    /// Override one entry; unknown names are rejected.
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), String> {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => {
                e.1 = value;
                Ok(())
            }
            None => Err(format!(
                "unknown tolerance `{name}`; known: {}",
                TOLERANCE_NAMES.join(", ")
            )),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.entries.iter().copied()
    }
}

/// Largest coefficient through degree `k`, or 0 if no degree is meaningful.
fn upto<C: Coeff>(j: &Jet<C>, k: Option<usize>) -> f64 {
    k.map_or(0.0, |k| j.max_abs_upto(k))
}

fn order_minus(order: usize, d: usize) -> Option<usize> {
    order.checked_sub(d)
}

/// Largest coefficient of `G` through degree `K − 2`.
pub fn ma_residual<C: Coeff>(s: &Solution<C>) -> f64 {
    upto(&s.state.g, order_minus(s.order(), 2))
}

/// `Ric_ij = −∂_i ∂̄_j log det M`, measured through degree `K − 4`.
pub fn ricci_residual<C: Coeff>(
    hess: &HessianJet<C>,
    ops: &DbarOperators<C>,
) -> Result<f64, SolveError> {
    let det = hess.m.det()?;
    if !det.constant_term().is_pos_real() {
        return Err(SolveError::NonPositiveDeterminant);
    }
    let log = det.log_normalized()?;
    let ric = ops.mixed_second(&log)?;
    let k = order_minus(det.order(), 4);
    Ok(ric.entries().iter().map(|e| upto(e, k)).fold(0.0, f64::max))
}

/// `J² + I` through degree `K`.
pub fn j_squared_residual<C: Coeff>(j: &ComplexStructureJet<C>) -> Result<f64, JetError> {
    let sq = j.jmat.matmul(&j.jmat)?;
    let id = JetMatrix::identity(j.jmat.get(0, 0).space(), sq.rows());
    Ok(sq
        .checked_add(&id)?
        .entries()
        .iter()
        .map(Jet::max_abs)
        .fold(0.0, f64::max))
}

/// `N^k_ij = J^l_i ∂_l J^k_j − J^l_j ∂_l J^k_i − J^k_l (∂_i J^l_j − ∂_j J^l_i)`,
/// through degree `K − 1`.
pub fn nijenhuis_residual<C: Coeff>(jmat: &JetMatrix<C>) -> Result<f64, JetError> {
    let m = jmat.rows();
    let space = jmat.get(0, 0).space().clone();
    let k_max = order_minus(space.order(), 1);
    // dj[l][(k, j)] = ∂_l J^k_j
    let dj: Vec<JetMatrix<C>> = (0..m).map(|l| jmat.map(|e| e.diff(l))).collect();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        for j in i + 1..m {
            for k in 0..m {
                let mut acc = Jet::zero(&space);
                for l in 0..m {
                    acc.add_product(jmat.get(l, i), dj[l].get(k, j))?;
                    acc = &acc - &(jmat.get(l, j) * dj[l].get(k, i));
                    let bracket = dj[i].get(l, j) - dj[j].get(l, i);
                    acc = &acc - &(jmat.get(k, l) * &bracket);
                }
                worst = worst.max(upto(&acc, k_max));
            }
        }
    }
    Ok(worst)
}

/// Largest coefficient of any `∂z^j/∂z̄^k`, all degrees.
pub fn dbar_z_residual<C: Coeff>(
    j: &ComplexStructureJet<C>,
    ops: &DbarOperators<C>,
) -> Result<f64, JetError> {
    let mut worst: f64 = 0.0;
    for k in 0..j.n {
        for z in &j.z {
            worst = worst.max(ops.apply_zbar(k, z)?.max_abs());
        }
    }
    Ok(worst)
}

/// `dz^i(∂_a)` for every coordinate and chart variable.
fn dz<C: Coeff>(j: &ComplexStructureJet<C>) -> Vec<Vec<Jet<C>>> {
    j.z.iter()
        .map(|z| (0..2 * j.n).map(|a| z.diff(a)).collect())
        .collect()
}

/// `ω(U, V) = (i/2) Σ M_ij (dz^i(U) dz̄^j(V) − dz^i(V) dz̄^j(U))` for vectors
/// given by their `dz` values.
fn omega_pair<C: Coeff>(m: &JetMatrix<C>, u: &[Jet<C>], v: &[Jet<C>]) -> Result<Jet<C>, JetError> {
    let n = m.rows();
    let mut acc = Jet::zero(m.get(0, 0).space());
    for i in 0..n {
        for j in 0..n {
            let wedge = &(&u[i] * &v[j].conj()) - &(&v[i] * &u[j].conj());
            acc.add_product(m.get(i, j), &wedge)?;
        }
    }
    Ok(acc.scale(&C::from_ratio(1, 2).mul(&C::imag_unit())))
}

/// Components `ω_ab = ω(∂_a, ∂_b)` in chart coordinates.
pub fn omega_components<C: Coeff>(s: &Solution<C>) -> Result<JetMatrix<C>, JetError> {
    let m = 2 * s.chart.n;
    let d = dz(&s.structure);
    let col = |a: usize| -> Vec<Jet<C>> { d.iter().map(|row| row[a].clone()).collect() };
    JetMatrix::try_from_fn(m, m, |a, b| omega_pair(&s.hessian.m, &col(a), &col(b)))
}

/// `dω` through degree `K − 3`.
pub fn closedness_residual<C: Coeff>(omega: &JetMatrix<C>) -> f64 {
    let m = omega.rows();
    let k = order_minus(omega.get(0, 0).order(), 3);
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            for c in b + 1..m {
                let d = &(&omega.get(b, c).diff(a) - &omega.get(a, c).diff(b))
                    + &omega.get(a, b).diff(c);
                worst = worst.max(upto(&d, k));
            }
        }
    }
    worst
}

/// The four restrictions to `L = {y = t = 0}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestrictionResiduals {
    /// `ω(∂_a, ∂_b)|_L`, through `K − 2`.
    pub lagrangian: f64,
    /// `ω(∂_a, J∂_b)|_L − g_ab`, through `K − 2`.
    pub metric: f64,
    /// `Im(h det(∂z/∂x))|_L`, through `K − 1`.
    pub special_lagrangian: f64,
    /// `h|_L − √det g`, all degrees.
    pub volume: f64,
}

pub fn restriction_checks<C: Coeff>(s: &Solution<C>) -> Result<RestrictionResiduals, SolveError> {
    let n = s.chart.n;
    let order = s.order();
    let fiber = s.chart.fiber_vars();
    let on_l = |j: &Jet<C>| j.restrict_zero(&fiber);
    let d = dz(&s.structure);
    let col = |a: usize| -> Vec<Jet<C>> { d.iter().map(|row| row[a].clone()).collect() };
    // dz^i(J ∂_b) = Σ_c ∂_c z^i J^c_b
    let j_col = |b: usize| -> Result<Vec<Jet<C>>, JetError> {
        d.iter()
            .map(|row| {
                let mut acc = Jet::zero(&s.chart.chart_space);
                for (c, dzc) in row.iter().enumerate() {
                    acc.add_product(dzc, s.structure.jmat.get(c, b))?;
                }
                Ok(acc)
            })
            .collect()
    };
    let k2 = order_minus(order, 2);
    let mut lagrangian: f64 = 0.0;
    let mut metric: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let w = omega_pair(&s.hessian.m, &col(a), &col(b))?;
            lagrangian = lagrangian.max(upto(&on_l(&w), k2));
            let gt = omega_pair(&s.hessian.m, &col(a), &j_col(b)?)?;
            let g = s.chart.lift(s.chart.metric.g.get(a, b))?;
            metric = metric.max(upto(&on_l(&(&gt - &g)), k2));
        }
    }
    let dzdx = JetMatrix::from_fn(n, n, |i, a| d[i][a].clone());
    let vol_form = on_l(&(&s.h.h * &dzdx.det()?));
    let special_lagrangian = upto(&vol_form.im(), order_minus(order, 1));
    let vol = s.chart.lift(&s.chart.metric.vol)?;
    let volume = (&on_l(&s.h.h) - &vol).max_abs();
    Ok(RestrictionResiduals {
        lagrangian,
        metric,
        special_lagrangian,
        volume,
    })
}

/// The affine corner relation at the center, `|M_nn − (|h|² − R)/C_nn|`
/// from `det M = M_nn C_nn + R`, plus `(det M − |h|²)|_L` through `K − 2`.
pub fn corner_identity_residual<C: Coeff>(s: &Solution<C>) -> Result<f64, SolveError> {
    let n = s.chart.n;
    let m = &s.hessian.m;
    let (c, r) = corner_split(m)?;
    let h2 = &s.h.h * &s.h.h.conj();
    let c0 = c.constant_term().inv().ok_or(SolveError::ZeroPivot)?;
    let predicted = h2.constant_term().sub(r.constant_term()).mul(&c0);
    let at_center = m
        .get(n - 1, n - 1)
        .constant_term()
        .sub(&predicted)
        .abs_max();
    let on_l = (&m.det()? - &h2).restrict_zero(&s.chart.fiber_vars());
    Ok(at_center.max(upto(&on_l, order_minus(s.order(), 2))))
}

/// Smallest eigenvalue of a Hermitian matrix via its real symmetric form
/// `[[A, −B], [B, A]]`, whose spectrum is that of `A + iB` doubled.
pub fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64, SolveError> {
    let n = m.nrows();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            asym = asym.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    if asym > 1e-10 {
        return Err(SolveError::NotHermitian(asym));
    }
    let real = DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let (i, j) = (r % n, c % n);
        let e = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        match (r < n, c < n) {
            (true, true) | (false, false) => e.re,
            (true, false) => -e.im,
            (false, true) => e.im,
        }
    });
    Ok(SymmetricEigen::new(real)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Sampling region and size for the pointwise checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSpec {
    pub radius: f64,
    pub count: usize,
    pub seed: u64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            radius: 0.05,
            count: 100,
            seed: 0x5eed,
        }
    }
}

/// Minimum eigenvalue of `M` (truncated to degree `K − 2`) over random points
/// with `|x_i| ≤ r` and `|(y, t)| ≤ r`.
pub fn psh_check<C: Coeff>(
    hess: &HessianJet<C>,
    n: usize,
    spec: &SampleSpec,
) -> Result<f64, SolveError> {
    let order = hess.m.get(0, 0).order();
    let keep = order.saturating_sub(2);
    let m: Vec<Jet<Complex64>> = hess
        .m
        .entries()
        .iter()
        .map(|e| e.truncated(keep).to_binary64())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.radius;
    let mut worst = f64::INFINITY;
    for _ in 0..spec.count {
        let mut point: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-r..=r), 0.0))
            .collect();
        let fiber = loop {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-r..=r)).collect();
            if w.iter().map(|v| v * v).sum::<f64>() <= r * r {
                break w;
            }
        };
        point.extend(fiber.into_iter().map(|v| Complex64::new(v, 0.0)));
        let values: Vec<Complex64> = m.iter().map(|e| e.eval(&point)).collect::<Result<_, _>>()?;
        let mat = DMatrix::from_row_slice(n, n, &values);
        worst = worst.min(hermitian_min_eigenvalue(&mat)?);
    }
    Ok(worst)
}

/// Radii for the finite-difference residual and the fitted slope.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeReport {
    pub radii: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Least-squares slope of `log residual` against `log r`; infinite when
    /// every residual is at the rounding floor.
    pub slope: f64,
}

pub const DEFAULT_SLOPE_RADII: [f64; 5] = [0.2, 0.16, 0.128, 0.1024, 0.08192];
const FD_NOISE_FLOOR: f64 = 1e-12;

/// Fixed unit directions in the chart, covering fiber-only and mixed directions.
fn sample_directions(m: usize) -> Vec<Vec<f64>> {
    let n = m / 2;
    let mut dirs = Vec::new();
    let unit = |v: Vec<f64>| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / norm).collect::<Vec<f64>>()
    };
    dirs.push(unit(
        (0..m).map(|a| if a >= n { 1.0 } else { 0.0 }).collect(),
    ));
    dirs.push(unit((0..m).map(|a| 1.0 + a as f64 / 3.0).collect()));
    dirs.push(unit(
        (0..m)
            .map(|a| if a % 2 == 0 { 1.0 } else { -0.5 })
            .collect(),
    ));
    dirs.push(unit(
        (0..m)
            .map(|a| if a == m - 1 { 1.0 } else { 0.25 })
            .collect(),
    ));
    dirs
}

/// `det(∂∂̄φ) − |h|²` at a point, with the derivatives of `φ` taken by
/// fourth-order central differences of its truncation (step `step`) and the
/// operator coefficients evaluated from their jets.
pub fn fd_ma_residual_at<C: Coeff>(
    s: &Solution<C>,
    point: &[f64],
    step: f64,
) -> Result<f64, SolveError> {
    let n = s.chart.n;
    let m = 2 * n;
    let phi = s.phi.phi.to_binary64();
    let at = |p: &[f64]| -> Result<Complex64, JetError> {
        let p: Vec<Complex64> = p.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        phi.eval(&p)
    };
    let shifted = |moves: &[(usize, f64)]| -> Vec<f64> {
        let mut p = point.to_vec();
        for &(a, d) in moves {
            p[a] += d;
        }
        p
    };
    const W1: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
    const W2: [(f64, f64); 5] = [
        (-2.0, -1.0),
        (-1.0, 16.0),
        (0.0, -30.0),
        (1.0, 16.0),
        (2.0, -1.0),
    ];
    let mut grad = vec![Complex64::new(0.0, 0.0); m];
    for (a, g) in grad.iter_mut().enumerate() {
        for (o, w) in W1 {
            *g += at(&shifted(&[(a, o * step)]))? * w;
        }
        *g /= 12.0 * step;
    }
    let mut hess = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for a in 0..m {
        for b in a..m {
            let mut acc = Complex64::new(0.0, 0.0);
            if a == b {
                for (o, w) in W2 {
                    acc += at(&shifted(&[(a, o * step)]))? * w;
                }
                acc /= 12.0 * step * step;
            } else {
                for (oa, wa) in W1 {
                    for (ob, wb) in W1 {
                        acc += at(&shifted(&[(a, oa * step), (b, ob * step)]))? * (wa * wb);
                    }
                }
                acc /= 144.0 * step * step;
            }
            hess[a][b] = acc;
            hess[b][a] = acc;
        }
    }
    let cp: Vec<Complex64> = point.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let ev = |j: &Jet<C>| j.to_binary64().eval(&cp);
    let mut mat = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for i in 0..n {
        // Z_i φ = Σ_a ζ^a_i φ_a, then Z̄_j of it
        let zi: Vec<Complex64> = s.ops.z[i].iter().map(ev).collect::<Result<_, _>>()?;
        let dzi: Vec<Vec<Complex64>> = (0..m)
            .map(|b| {
                s.ops.z[i]
                    .iter()
                    .map(|c| ev(&c.diff(b)))
                    .collect::<Result<_, _>>()
            })
            .collect::<Result<_, _>>()?;
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for b in 0..m {
                let zb = ev(&s.ops.zbar[j][b])?;
                let mut inner = Complex64::new(0.0, 0.0);
                for a in 0..m {
                    inner += dzi[b][a] * grad[a] + zi[a] * hess[b][a];
                }
                acc += zb * inner;
            }
            mat[(i, j)] = acc;
        }
    }
    let h = ev(&s.h.h)?;
    Ok((mat.determinant() - h * h.conj()).norm())
}

/// Residual of the truncated solution against sampling radius, with its slope.
pub fn fd_slope<C: Coeff>(s: &Solution<C>, radii: &[f64]) -> Result<SlopeReport, SolveError> {
    let m = 2 * s.chart.n;
    let dirs = sample_directions(m);
    let mut residuals = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst: f64 = 0.0;
        for d in &dirs {
            let p: Vec<f64> = d.iter().map(|v| v * r).collect();
            worst = worst.max(fd_ma_residual_at(s, &p, r / 10.0)?);
        }
        residuals.push(worst);
    }
    let slope = if residuals.iter().all(|&v| v <= FD_NOISE_FLOOR) {
        f64::INFINITY
    } else {
        least_squares_slope(radii, &residuals)
    };
    Ok(SlopeReport {
        radii: radii.to_vec(),
        residuals,
        slope,
    })
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    let k = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// How a value is compared with its tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl CheckResult {
    pub fn new(name: &str, value: f64, tolerance: f64, bound: Bound) -> Self {
        let pass = match bound {
            Bound::AtMost => value <= tolerance,
            Bound::AtLeast => value >= tolerance,
        };
        CheckResult {
            name: name.to_string(),
            value,
            tolerance,
            bound,
            pass,
        }
    }
}

/// Pass/fail report of every residual.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub scenario: String,
    pub order: usize,
    pub mode: Mode,
    pub checks: Vec<CheckResult>,
}

pub const CERTIFICATE_MAGIC: &str = "CYCERT 1";

impl Certificate {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{CERTIFICATE_MAGIC}")?;
        writeln!(f, "scenario {}", self.scenario)?;
        writeln!(f, "order {}", self.order)?;
        writeln!(f, "mode {}", self.mode)?;
        for c in &self.checks {
            let op = match c.bound {
                Bound::AtMost => "max",
                Bound::AtLeast => "min",
            };
            writeln!(
                f,
                "residual {} {:.6e} {op} {:.6e} {}",
                c.name,
                c.value,
                c.tolerance,
                if c.pass { "PASS" } else { "FAIL" }
            )?;
        }
        writeln!(f, "result {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Options for [`certificate_report`] beyond the tolerance table.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub tolerances: Tolerances,
    pub samples: SampleSpec,
    pub slope_radii: Vec<f64>,
}

impl VerifyOptions {
    pub fn for_mode(mode: Mode) -> Self {
        VerifyOptions {
            tolerances: Tolerances::for_mode(mode),
            samples: SampleSpec::default(),
            slope_radii: DEFAULT_SLOPE_RADII.to_vec(),
        }
    }
}

/// Run every check on a solution.
pub fn certificate_report<C: Coeff>(
    scenario: &str,
    s: &Solution<C>,
    opts: &VerifyOptions,
) -> Result<Certificate, SolveError> {
    let tol = &opts.tolerances;
    let order = s.order();
    let n = s.chart.n;
    let mut checks = Vec::new();
    let mut at_most = |name: &str, value: f64, key: &str| {
        checks.push(CheckResult::new(name, value, tol.get(key), Bound::AtMost));
    };
    at_most("ma_residual", ma_residual(s), "ma_residual");
    at_most(
        "ricci_residual",
        ricci_residual(&s.hessian, &s.ops)?,
        "ricci_residual",
    );
    at_most(
        "nijenhuis_residual",
        nijenhuis_residual(&s.structure.jmat)?,
        "nijenhuis_residual",
    );
    let r = restriction_checks(s)?;
    at_most("lagrangian_residual", r.lagrangian, "lagrangian_residual");
    at_most(
        "metric_restriction_residual",
        r.metric,
        "metric_restriction_residual",
    );
    at_most(
        "special_lagrangian_residual",
        r.special_lagrangian,
        "special_lagrangian_residual",
    );
    at_most("volume_match_residual", r.volume, "volume_match_residual");
    at_most(
        "corner_identity_residual",
        corner_identity_residual(s)?,
        "corner_identity_residual",
    );
    at_most(
        "j_squared_residual",
        j_squared_residual(&s.structure)?,
        "structural",
    );
    at_most(
        "dbar_z_residual",
        dbar_z_residual(&s.structure, &s.ops)?,
        "structural",
    );
    at_most(
        "hermitian_residual",
        s.hessian.hermitian_residual,
        "structural",
    );
    at_most(
        "omega_closedness_residual",
        closedness_residual(&omega_components(s)?),
        "structural",
    );
    at_most("realness_residual", s.phi.phi.max_imag(), "structural");
    checks.push(CheckResult::new(
        "psh_min_eigenvalue",
        psh_check(&s.hessian, n, &opts.samples)?,
        tol.get("psh_margin"),
        Bound::AtLeast,
    ));
    // Sampling needs floating point; exact runs record the check as vacuous.
    let slope = match C::MODE {
        Mode::Exact => f64::INFINITY,
        Mode::Binary64 => fd_slope(s, &opts.slope_radii)?.slope,
    };
    let slope_min = (order as f64 - 1.0) - tol.get("fd_slope_margin");
    checks.push(CheckResult::new(
        "finite_difference_slope",
        slope,
        slope_min,
        Bound::AtLeast,
    ));
    Ok(Certificate {
        scenario: scenario.to_string(),
        order,
        mode: C::MODE,
        checks,
    })
}
