//! Metric and vector-field ingestion, Christoffel symbols, the orthonormal
//! frame `(Y_1, ..., Y_{n-1}, X)` and the fiber chart `(x, y, t)` on the
//! tangent bundle.

pub mod expr;

use std::sync::Arc;

use crate::error::{JetError, ParseError, SolveError};
use crate::jet::{Coeff, Jet, JetMatrix, Space};

pub use expr::{parse_assignments, Expr};

/// Space of jets on the base manifold, variables `x1..xn`.
pub fn base_space(n: usize, order: usize) -> Arc<Space> {
    Space::new((1..=n).map(|i| format!("x{i}")), order)
}

/// Space of jets on the chart `(x1..xn, y1..y_{n-1}, t)`.
pub fn chart_space(n: usize, order: usize) -> Arc<Space> {
    let vars = (1..=n)
        .map(|i| format!("x{i}"))
        .chain((1..n).map(|i| format!("y{i}")))
        .chain(std::iter::once("t".to_string()));
    Space::new(vars, order)
}

/// A Riemannian metric as a symmetric matrix of jets, with its volume density.
#[derive(Clone, Debug)]
pub struct MetricJet<C: Coeff> {
    pub g: JetMatrix<C>,
    /// `sqrt(det g)`
    pub vol: Jet<C>,
}

impl<C: Coeff> MetricJet<C> {
    /// Validate symmetry and positivity at the center and compute the volume density.
    pub fn new(g: JetMatrix<C>) -> Result<Self, ParseError> {
        let n = g.rows();
        if n == 0 || g.cols() != n {
            return Err(JetError::NotSquare {
                rows: g.rows(),
                cols: g.cols(),
            }
            .into());
        }
        for i in 0..n {
            for j in i + 1..n {
                if g.get(i, j) != g.get(j, i) {
                    return Err(ParseError::NotSymmetric { i: i + 1, j: j + 1 });
                }
            }
        }
        if !is_positive_definite(&g.constant_terms()) {
            return Err(ParseError::NotPositiveDefinite);
        }
        let vol = g.det()?.sqrt()?;
        Ok(MetricJet { g, vol })
    }

    pub fn n(&self) -> usize {
        self.g.rows()
    }

    pub fn space(&self) -> &Arc<Space> {
        self.g.get(0, 0).space()
    }

    /// `g(u, v)` for vector fields given by component jets.
    pub fn inner(&self, u: &[Jet<C>], v: &[Jet<C>]) -> Result<Jet<C>, JetError> {
        let gv = self.g.mul_vec(v)?;
        let mut acc = Jet::zero(self.space());
        for (a, b) in u.iter().zip(&gv) {
            acc.add_product(a, b)?;
        }
        Ok(acc)
    }
}

/// A vector field on the base, by components in `x` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFieldJet<C: Coeff> {
    pub components: Vec<Jet<C>>,
}

impl<C: Coeff> VectorFieldJet<C> {
    pub fn new(components: Vec<Jet<C>>) -> Result<Self, ParseError> {
        if components.iter().all(|c| c.constant_term().is_zero()) {
            return Err(ParseError::VanishingField);
        }
        Ok(VectorFieldJet { components })
    }
}

/// Parse `g11 = ...; g12 = ...` into a metric jet of the given order.
/// Missing entries are zero; `gij` and `gji` may both be given but must agree.
pub fn parse_metric<C: Coeff>(
    src: &str,
    n: usize,
    order: usize,
) -> Result<MetricJet<C>, ParseError> {
    let space = base_space(n, order);
    let mut entries: Vec<Option<Jet<C>>> = vec![None; n * n];
    for a in parse_assignments(src, n)? {
        let (i, j) = metric_index(&a.name, n).ok_or_else(|| ParseError::Syntax {
            offset: a.offset,
            message: format!("expected a metric entry g11..g{n}{n}, found `{}`", a.name),
        })?;
        let value = a.expr.taylor::<C>(&space)?;
        if entries[i * n + j].is_some() {
            return Err(ParseError::Syntax {
                offset: a.offset,
                message: format!("duplicate entry `{}`", a.name),
            });
        }
        entries[i * n + j] = Some(value);
    }
    let g = JetMatrix::from_fn(n, n, |i, j| {
        match (&entries[i * n + j], &entries[j * n + i]) {
            (Some(v), _) | (None, Some(v)) => v.clone(),
            (None, None) => Jet::zero(&space),
        }
    });
    MetricJet::new(g)
}

fn metric_index(name: &str, n: usize) -> Option<(usize, usize)> {
    let digits = name.strip_prefix('g')?.as_bytes();
    if digits.len() != 2 {
        return None;
    }
    let i = (digits[0] as char).to_digit(10)? as usize;
    let j = (digits[1] as char).to_digit(10)? as usize;
    (1..=n).contains(&i).then_some(())?;
    (1..=n).contains(&j).then_some((i - 1, j - 1))
}

/// Parse `X1 = ...; X2 = ...`; missing components are zero.
pub fn parse_vector_field<C: Coeff>(
    src: &str,
    n: usize,
    order: usize,
) -> Result<VectorFieldJet<C>, ParseError> {
    let space = base_space(n, order);
    let mut comps: Vec<Option<Jet<C>>> = vec![None; n];
    for a in parse_assignments(src, n)? {
        let k = a
            .name
            .strip_prefix('X')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|k| (1..=n).contains(k))
            .ok_or_else(|| ParseError::Syntax {
                offset: a.offset,
                message: format!("expected a component X1..X{n}, found `{}`", a.name),
            })?;
        if comps[k - 1].is_some() {
            return Err(ParseError::Syntax {
                offset: a.offset,
                message: format!("duplicate component `{}`", a.name),
            });
        }
        comps[k - 1] = Some(a.expr.taylor(&space)?);
    }
    VectorFieldJet::new(
        comps
            .into_iter()
            .map(|c| c.unwrap_or_else(|| Jet::zero(&space)))
            .collect(),
    )
}

/// Christoffel symbols `gamma[k][a][b]` of the second kind.
#[derive(Clone, Debug)]
pub struct Christoffel<C: Coeff> {
    pub gamma: Vec<Vec<Vec<Jet<C>>>>,
}

impl<C: Coeff> Christoffel<C> {
    pub fn get(&self, k: usize, a: usize, b: usize) -> &Jet<C> {
        &self.gamma[k][a][b]
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.iter().flatten().flatten().all(Jet::is_zero)
    }
}

/// `Γ^k_ab = ½ g^{kl} (∂_a g_lb + ∂_b g_la − ∂_l g_ab)`.
pub fn christoffel<C: Coeff>(m: &MetricJet<C>) -> Result<Christoffel<C>, SolveError> {
    let n = m.n();
    let ginv = m.g.inverse()?;
    let dg: Vec<JetMatrix<C>> = (0..n).map(|l| m.g.map(|e| e.diff(l))).collect();
    let half = C::from_ratio(1, 2);
    let mut gamma = vec![vec![Vec::with_capacity(n); n]; n];
    // first kind: [l; a b]
    let first = |l: usize, a: usize, b: usize| -> Jet<C> {
        &(dg[a].get(l, b) + dg[b].get(l, a)) - dg[l].get(a, b)
    };
    let firsts: Vec<Vec<Vec<Jet<C>>>> = (0..n)
        .map(|l| {
            (0..n)
                .map(|a| (0..n).map(|b| first(l, a, b)).collect())
                .collect()
        })
        .collect();
    for (k, row) in gamma.iter_mut().enumerate() {
        for (a, entry) in row.iter_mut().enumerate() {
            for b in 0..n {
                let mut acc = Jet::zero(m.space());
                for (l, fl) in firsts.iter().enumerate() {
                    acc.add_product(ginv.get(k, l), &fl[a][b])?;
                }
                entry.push(acc.scale(&half));
            }
        }
    }
    Ok(Christoffel { gamma })
}

/// Orthonormal frame whose last column is `X / |X|` and whose other columns
/// come from Gram-Schmidt on the coordinate vectors.
///
/// The coordinate vector with the largest `|g(∂_i, X)| / |∂_i|` at the center
/// is left out, so no projection degenerates at the center.
pub fn gram_schmidt_frame<C: Coeff>(
    m: &MetricJet<C>,
    field: &VectorFieldJet<C>,
) -> Result<JetMatrix<C>, SolveError> {
    let n = m.n();
    let space = m.space().clone();
    let x = &field.components;
    let norm2 = m.inner(x, x)?;
    if norm2.constant_term().is_zero() {
        return Err(ParseError::VanishingField.into());
    }
    let inv_norm = norm2.sqrt()?.reciprocal()?;
    let xhat: Vec<Jet<C>> = x.iter().map(|c| c * &inv_norm).collect();

    let gx = m.g.mul_vec(&xhat)?;
    let skip = (0..n)
        .map(|i| {
            let overlap = gx[i].constant_term().to_c64().norm_sqr();
            let len2 = m.g.get(i, i).constant_term().to_c64().norm();
            overlap / len2
        })
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, s)| {
            if s > best.1 {
                (i, s)
            } else {
                best
            }
        })
        .0;

    let mut columns: Vec<Vec<Jet<C>>> = Vec::with_capacity(n);
    for i in (0..n).filter(|&i| i != skip) {
        let unit: Vec<Jet<C>> = (0..n)
            .map(|a| {
                if a == i {
                    Jet::one(&space)
                } else {
                    Jet::zero(&space)
                }
            })
            .collect();
        let mut u = unit.clone();
        for prev in columns.iter().chain(std::iter::once(&xhat)) {
            let c = m.inner(&unit, prev)?;
            for (ua, pa) in u.iter_mut().zip(prev) {
                *ua = &*ua - &(&c * pa);
            }
        }
        let nn = m.inner(&u, &u)?;
        if nn.constant_term().is_zero() {
            return Err(SolveError::DegenerateFrame(i + 1));
        }
        let inv = nn.sqrt()?.reciprocal()?;
        columns.push(u.iter().map(|c| c * &inv).collect());
    }
    columns.push(xhat);
    Ok(JetMatrix::from_fn(n, n, |r, c| columns[c][r].clone()))
}

/// Constant linear change of coordinates `x = A x̃` applied to the input data.
#[derive(Clone, Debug, PartialEq)]
pub struct Gauge<C> {
    pub matrix: Vec<Vec<C>>,
}

impl<C: Coeff> Gauge<C> {
    pub fn is_identity(&self) -> bool {
        self.matrix.iter().enumerate().all(|(r, row)| {
            row.iter()
                .enumerate()
                .all(|(c, v)| if r == c { *v == C::one() } else { v.is_zero() })
        })
    }
}

/// Linear change of coordinates making the frame at the center equal to the
/// coordinate basis: afterwards `g(0) = δ` and `X(0)` points along `∂/∂x^n`.
pub fn normal_gauge<C: Coeff>(
    m: &MetricJet<C>,
    field: &VectorFieldJet<C>,
) -> Result<(MetricJet<C>, VectorFieldJet<C>, Gauge<C>), SolveError> {
    let frame = gram_schmidt_frame(m, field)?;
    let a = frame.constant_terms();
    let gauge = Gauge { matrix: a.clone() };
    if gauge.is_identity() {
        return Ok((m.clone(), field.clone(), gauge));
    }
    let n = m.n();
    let space = m.space().clone();
    let args: Vec<Jet<C>> = (0..n)
        .map(|k| {
            let mut acc = Jet::zero(&space);
            for (j, akj) in a[k].iter().enumerate() {
                acc = &acc + &Jet::var(&space, j).scale(akj);
            }
            acc
        })
        .collect();
    let constant = |v: &C| Jet::constant(&space, v.clone());
    let a_mat = JetMatrix::from_fn(n, n, |r, c| constant(&a[r][c]));
    let composed = JetMatrix::try_from_fn(n, n, |r, c| m.g.get(r, c).compose(&args))?;
    let g_new = a_mat.transpose().matmul(&composed)?.matmul(&a_mat)?;
    // A⁻¹ = Aᵀ g(0) because Aᵀ g(0) A = I.
    let g0 = JetMatrix::from_fn(n, n, |r, c| constant(m.g.get(r, c).constant_term()));
    let a_inv = a_mat.transpose().matmul(&g0)?;
    let x_composed: Vec<Jet<C>> = field
        .components
        .iter()
        .map(|c| c.compose(&args))
        .collect::<Result<_, _>>()?;
    let x_new = a_inv.mul_vec(&x_composed)?;
    // Symmetrize entrywise; both halves are equal up to the order of summation.
    let g_sym = JetMatrix::from_fn(n, n, |r, c| {
        if r <= c {
            g_new.get(r, c).clone()
        } else {
            g_new.get(c, r).clone()
        }
    });
    Ok((MetricJet::new(g_sym)?, VectorFieldJet::new(x_new)?, gauge))
}

/// Everything about the chart on `TL` that later stages need.
#[derive(Clone, Debug)]
pub struct ChartData<C: Coeff> {
    pub n: usize,
    pub metric: MetricJet<C>,
    pub field: VectorFieldJet<C>,
    /// Columns `Y_1, ..., Y_{n-1}, X/|X|` in `x` coordinates.
    pub frame: JetMatrix<C>,
    pub christoffel: Christoffel<C>,
    pub gauge: Gauge<C>,
    pub chart_space: Arc<Space>,
}

impl<C: Coeff> ChartData<C> {
    pub fn order(&self) -> usize {
        self.chart_space.order()
    }

    pub fn base_space(&self) -> &Arc<Space> {
        self.metric.space()
    }

    /// Chart variable index of `x^i` (zero-based).
    pub fn x_var(&self, i: usize) -> usize {
        i
    }

    /// Chart variable index of the fiber coordinate `w^b`: `y^{b+1}` for
    /// `b < n-1`, and `t` for `b = n-1`.
    pub fn fiber_var(&self, b: usize) -> usize {
        self.n + b
    }

    pub fn t_var(&self) -> usize {
        2 * self.n - 1
    }

    pub fn fiber_vars(&self) -> Vec<usize> {
        (self.n..2 * self.n).collect()
    }

    /// Lift a base jet into the chart.
    pub fn lift(&self, f: &Jet<C>) -> Result<Jet<C>, JetError> {
        let map: Vec<usize> = (0..self.n).collect();
        f.embed(&self.chart_space, &map)
    }

    /// Components of the tangent vector `v = Σ y^i Y_i + t X` in `x` coordinates.
    pub fn tangent_vector(&self) -> Result<Vec<Jet<C>>, JetError> {
        (0..self.n)
            .map(|a| {
                let mut acc = Jet::zero(&self.chart_space);
                for b in 0..self.n {
                    let e = self.lift(self.frame.get(a, b))?;
                    acc.add_product(&e, &Jet::var(&self.chart_space, self.fiber_var(b)))?;
                }
                Ok(acc)
            })
            .collect()
    }

    /// `2 g(v, v)` computed from the metric and frame.
    pub fn energy_from_metric(&self) -> Result<Jet<C>, JetError> {
        let v = self.tangent_vector()?;
        let mut acc = Jet::zero(&self.chart_space);
        for a in 0..self.n {
            for b in 0..self.n {
                let gab = self.lift(self.metric.g.get(a, b))?;
                acc.add_product(&(&gab * &v[a]), &v[b])?;
            }
        }
        Ok(acc.scale_i64(2))
    }
}

/// Assemble the chart: optional normal gauge, frame, Christoffel symbols.
pub fn build_chart<C: Coeff>(
    metric: &MetricJet<C>,
    field: &VectorFieldJet<C>,
    normalize: bool,
) -> Result<ChartData<C>, SolveError> {
    let n = metric.n();
    if field.components.len() != n {
        return Err(JetError::Arity {
            expected: n,
            got: field.components.len(),
        }
        .into());
    }
    let (metric, field, gauge) = if normalize {
        normal_gauge(metric, field)?
    } else {
        let id = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { C::one() } else { C::zero() })
                    .collect()
            })
            .collect();
        (metric.clone(), field.clone(), Gauge { matrix: id })
    };
    let frame = gram_schmidt_frame(&metric, &field)?;
    let christoffel = christoffel(&metric)?;
    let chart_space = chart_space(n, metric.space().order());
    Ok(ChartData {
        n,
        metric,
        field,
        frame,
        christoffel,
        gauge,
        chart_space,
    })
}

/// Sylvester's criterion on a constant real symmetric matrix.
fn is_positive_definite<C: Coeff>(m: &[Vec<C>]) -> bool {
    let n = m.len();
    if m.iter().flatten().any(|v| !v.is_real()) {
        return false;
    }
    (1..=n).all(|k| {
        let sub: Vec<Vec<C>> = m[..k].iter().map(|row| row[..k].to_vec()).collect();
        constant_det(sub).is_pos_real()
    })
}

/// Determinant of a constant matrix by fraction-producing elimination.
pub(crate) fn constant_det<C: Coeff>(mut m: Vec<Vec<C>>) -> C {
    let n = m.len();
    let mut det = C::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else {
            return C::zero();
        };
        if p != k {
            m.swap(p, k);
            det = det.neg();
        }
        det = det.mul(&m[k][k]);
        let inv = m[k][k].inv().expect("nonzero pivot");
        for r in k + 1..n {
            let f = m[r][k].mul(&inv);
            if f.is_zero() {
                continue;
            }
            for c in k..n {
                let v = m[r][c].sub(&f.mul(&m[k][c]));
                m[r][c] = v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::ExactComplex as Q;
    use num_complex::Complex64;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    #[test]
    fn identity_metric_has_unit_volume() {
        let m = parse_metric::<Q>("g11=1; g22=1", 2, 4).unwrap();
        assert_eq!(m.vol, Jet::one(m.space()));
        assert!(m.g.get(0, 1).is_zero());
    }

    #[test]
    fn warped_volume() {
        let m = parse_metric::<Q>("g11=1; g22=(1+x1)*(1+x1)", 2, 5).unwrap();
        let s = m.space().clone();
        assert_eq!(m.vol, Jet::one(&s) + Jet::var(&s, 0));
    }

    #[test]
    fn perturbed_torus_volume_at_center() {
        let m =
            parse_metric::<Complex64>("g11=1+(1/10)*cos(x1); g22=1+(1/10)*cos(x1)", 2, 4).unwrap();
        assert!((m.vol.constant_term().re - 1.1).abs() < 1e-15);
        // exact mode: det = (11/10)^2 is a perfect square
        let m = parse_metric::<Q>("g11=1+(1/10)*cos(x1); g22=1+(1/10)*cos(x1)", 2, 4).unwrap();
        assert_eq!(m.vol.constant_term(), &q(11, 10));
    }

    #[test]
    fn metric_errors() {
        assert_eq!(
            parse_metric::<Q>("g11=1; g12=x1; g21=x2; g22=1", 2, 3).unwrap_err(),
            ParseError::NotSymmetric { i: 1, j: 2 }
        );
        assert_eq!(
            parse_metric::<Q>("g11=1; g22=-1", 2, 3).unwrap_err(),
            ParseError::NotPositiveDefinite
        );
        assert!(matches!(
            parse_metric::<Q>("g11=1; g33=1", 2, 3),
            Err(ParseError::Syntax { .. })
        ));
        assert_eq!(
            parse_vector_field::<Q>("X1 = x1; X2 = 0", 2, 3).unwrap_err(),
            ParseError::VanishingField
        );
    }

    #[test]
    fn flat_christoffels_vanish() {
        let m = parse_metric::<Q>("g11=2; g12=1; g22=5", 2, 4).unwrap();
        assert!(christoffel(&m).unwrap().is_zero());
    }

    #[test]
    fn warped_christoffels() {
        // g = diag(1, (1+x)^2): Γ^2_12 = 1/(1+x), Γ^1_22 = -(1+x)
        let m = parse_metric::<Q>("g11=1; g22=(1+x1)*(1+x1)", 2, 4).unwrap();
        let s = m.space().clone();
        let gam = christoffel(&m).unwrap();
        let x = Jet::<Q>::var(&s, 0);
        let recip = (Jet::one(&s) + x.clone()).reciprocal().unwrap();
        // derivatives lose one degree of information
        assert_eq!(gam.get(1, 0, 1).truncated(3), recip.truncated(3));
        assert_eq!(gam.get(1, 1, 0).truncated(3), recip.truncated(3));
        assert_eq!(
            gam.get(0, 1, 1).truncated(3),
            (-(Jet::one(&s) + x)).truncated(3)
        );
        assert!(gam.get(0, 0, 0).is_zero());
        assert!(gam.get(1, 1, 1).is_zero());
    }

    #[test]
    fn flat_frame_is_coordinate_basis() {
        let m = parse_metric::<Q>("g11=1; g22=1", 2, 3).unwrap();
        let x = parse_vector_field::<Q>("X2 = 2", 2, 3).unwrap();
        let f = gram_schmidt_frame(&m, &x).unwrap();
        assert_eq!(f, JetMatrix::identity(m.space(), 2));
    }

    #[test]
    fn frame_is_orthonormal_for_curved_metric() {
        let m = parse_metric::<Q>(
            "g11=(10+cos(x1))/11; g22=(10+cos(x1))/11; g12=x1*x2/7",
            2,
            5,
        )
        .unwrap();
        let x = parse_vector_field::<Q>("X1 = x2/3; X2 = 1 + x1", 2, 5).unwrap();
        let f = gram_schmidt_frame(&m, &x).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let gij = m.inner(&f.column(i), &f.column(j)).unwrap();
                let expect = if i == j {
                    Jet::one(m.space())
                } else {
                    Jet::zero(m.space())
                };
                assert_eq!(gij, expect, "({i},{j})");
            }
        }
    }

    #[test]
    fn chart_variables() {
        let m = parse_metric::<Q>("g11=1; g22=1", 2, 3).unwrap();
        let x = parse_vector_field::<Q>("X2 = 1", 2, 3).unwrap();
        let chart = build_chart(&m, &x, true).unwrap();
        assert_eq!(chart.chart_space.vars(), &["x1", "x2", "y1", "t"]);
        let v = chart.tangent_vector().unwrap();
        assert_eq!(v[0], Jet::var(&chart.chart_space, 2));
        assert_eq!(v[1], Jet::var(&chart.chart_space, 3));

        let m1 = parse_metric::<Q>("g11=1", 1, 3).unwrap();
        let x1 = parse_vector_field::<Q>("X1 = 1", 1, 3).unwrap();
        let circle = build_chart(&m1, &x1, true).unwrap();
        assert_eq!(circle.chart_space.vars(), &["x1", "t"]);
    }

    #[test]
    fn energy_is_fiber_norm() {
        let m = parse_metric::<Q>("g11=(10+cos(x1))/11; g22=(10+cos(x1))/11", 2, 4).unwrap();
        let x = parse_vector_field::<Q>("X2 = 1", 2, 4).unwrap();
        let chart = build_chart(&m, &x, true).unwrap();
        let s = &chart.chart_space;
        let y = Jet::<Q>::var(s, 2);
        let t = Jet::<Q>::var(s, 3);
        assert_eq!(
            chart.energy_from_metric().unwrap(),
            (&y * &y + &t * &t).scale_i64(2)
        );
    }

    #[test]
    fn normal_gauge_in_binary64() {
        let m =
            parse_metric::<Complex64>("g11=1+(1/10)*cos(x1); g22=1+(1/10)*cos(x1)", 2, 4).unwrap();
        let x = parse_vector_field::<Complex64>("X1 = 1; X2 = 1", 2, 4).unwrap();
        let chart = build_chart(&m, &x, true).unwrap();
        let f0 = chart.frame.constant_terms();
        for (r, row) in f0.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let e = if r == c { 1.0 } else { 0.0 };
                assert!((v - Complex64::new(e, 0.0)).norm() < 1e-14, "{r}{c}: {v}");
            }
        }
        let g0 = chart.metric.g.constant_terms();
        assert!((g0[0][0].re - 1.0).abs() < 1e-14 && g0[0][1].norm() < 1e-14);
    }

    #[test]
    fn exact_gauge_needs_rational_roots() {
        let m = parse_metric::<Q>("g11=1+(1/10)*cos(x1); g22=1+(1/10)*cos(x1)", 2, 4).unwrap();
        let x = parse_vector_field::<Q>("X2 = 1", 2, 4).unwrap();
        assert!(matches!(
            build_chart(&m, &x, true),
            Err(SolveError::Jet(JetError::NotRepresentable(_)))
        ));
    }
}
