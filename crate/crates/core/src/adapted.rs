//! The adapted complex structure on the chart: holomorphic coordinates from
//! the complexified exponential map, the structure tensor `J`, the
//! `∂/∂z`, `∂/∂z̄` operators, the energy potential and holomorphic extension.

use crate::error::{JetError, SolveError};
use crate::geometry::ChartData;
use crate::jet::{Coeff, Jet, JetMatrix, PowerTable};

/// Multiply `c` by `i^d`.
fn times_i_pow<C: Coeff>(c: &C, d: usize) -> C {
    match d % 4 {
        0 => c.clone(),
        1 => c.mul(&C::imag_unit()),
        2 => c.neg(),
        _ => c.mul(&C::imag_unit()).neg(),
    }
}

fn fiber_degree(e: &[u8], n: usize) -> usize {
    e[n..].iter().map(|&p| p as usize).sum()
}

/// `x^k(exp_x(v))` for `v = Σ w^b E_b(x)`, by recursion on the fiber degree.
///
/// Writing the geodesic through `(x, v)` as `γ(s) = Σ_d s^d F_d`, the
/// geodesic equation gives
/// `F_d = -[Γ(F)(DF, DF)]_d / (d(d-1))`, where `D` is the Euler operator in
/// the fiber variables and `[.]_d` takes fiber degree `d`. The right side only
/// involves `F_j` for `j < d`.
pub fn real_exponential<C: Coeff>(chart: &ChartData<C>) -> Result<Vec<Jet<C>>, SolveError> {
    let n = chart.n;
    let space = &chart.chart_space;
    let v = chart.tangent_vector()?;
    let mut f: Vec<Jet<C>> = (0..n)
        .map(|k| &Jet::var(space, chart.x_var(k)) + &v[k])
        .collect();
    if chart.christoffel.is_zero() {
        return Ok(f);
    }
    let euler = |j: &Jet<C>| j.map_terms(|e, c| c.scale_i64(fiber_degree(e, n) as i64));
    for d in 2..=chart.order() {
        let table = PowerTable::new(chart.base_space(), &f)?;
        let df: Vec<Jet<C>> = f.iter().map(euler).collect();
        let mut pairs = vec![vec![Jet::zero(space); n]; n];
        for a in 0..n {
            for b in a..n {
                pairs[a][b] = &df[a] * &df[b];
            }
        }
        let denom = C::from_ratio(-1, (d * (d - 1)) as i64);
        for (k, fk) in f.iter_mut().enumerate() {
            let mut s = Jet::zero(space);
            for a in 0..n {
                for b in a..n {
                    let gamma = chart.christoffel.get(k, a, b);
                    if gamma.is_zero() {
                        continue;
                    }
                    let g = table.apply(gamma)?;
                    let term = if a == b {
                        pairs[a][b].clone()
                    } else {
                        pairs[a][b].scale_i64(2)
                    };
                    s.add_product(&g, &term)?;
                }
            }
            let new = s.filter(|e| fiber_degree(e, n) == d).scale(&denom);
            *fk = &*fk + &new;
        }
    }
    Ok(f)
}

/// Holomorphic coordinates `z^k(x, w) = x^k(exp_x(i v))`: the Taylor series
/// of the geodesic coordinate functions continued to imaginary time.
pub fn complexified_exponential<C: Coeff>(chart: &ChartData<C>) -> Result<Vec<Jet<C>>, SolveError> {
    let n = chart.n;
    Ok(real_exponential(chart)?
        .into_iter()
        .map(|f| f.map_terms(|e, c| times_i_pow(c, fiber_degree(e, n))))
        .collect())
}

/// The adapted complex structure. `jmat[(b, a)]` is `J^b_a`, the `∂_b`
/// component of `J ∂_a`, with rows and columns in chart-variable order.
#[derive(Clone, Debug)]
pub struct ComplexStructureJet<C: Coeff> {
    pub n: usize,
    pub jmat: JetMatrix<C>,
    pub z: Vec<Jet<C>>,
    /// Jacobian of `(Re z, Im z)` with respect to the chart variables.
    pub p: JetMatrix<C>,
    pub p_inv: JetMatrix<C>,
}

/// `J = P⁻¹ J_st P`: the unique structure for which every `z^k` is holomorphic.
pub fn adapted_structure<C: Coeff>(
    chart: &ChartData<C>,
    z: Vec<Jet<C>>,
) -> Result<ComplexStructureJet<C>, SolveError> {
    let n = chart.n;
    let m = 2 * n;
    let re: Vec<Jet<C>> = z.iter().map(Jet::re).collect();
    let im: Vec<Jet<C>> = z.iter().map(Jet::im).collect();
    let p = JetMatrix::from_fn(m, m, |r, a| {
        if r < n {
            re[r].diff(a)
        } else {
            im[r - n].diff(a)
        }
    });
    // J_st P = [-Im rows; Re rows]
    let jst_p = JetMatrix::from_fn(m, m, |r, a| {
        if r < n {
            -p.get(r + n, a)
        } else {
            p.get(r - n, a).clone()
        }
    });
    let p_inv = p.inverse().map_err(singular_jacobian)?;
    let jmat = p_inv.matmul(&jst_p)?;
    Ok(ComplexStructureJet {
        n,
        jmat,
        z,
        p,
        p_inv,
    })
}

fn singular_jacobian(e: JetError) -> SolveError {
    match e {
        JetError::Singular => SolveError::SingularJacobian,
        other => other.into(),
    }
}

impl<C: Coeff> ComplexStructureJet<C> {
    /// Components of `J u` for a vector field `u`.
    pub fn apply(&self, u: &[Jet<C>]) -> Result<Vec<Jet<C>>, JetError> {
        self.jmat.mul_vec(u)
    }
}

/// Which real vector fields `V_i` the operators `½(V_i ∓ i J V_i)` are built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorFrame {
    /// `V_i = ∂/∂(Re z^i)`: genuine coordinate fields, so the operators are
    /// `∂/∂z^i` and `∂/∂z̄^i` exactly and commute.
    Holomorphic,
    /// `V_i = ∂/∂x^i`, the chart coordinate fields.
    Chart,
}

/// First-order operators `Z_i = ½(V_i − iJV_i)` and `Z̄_i = ½(V_i + iJV_i)`,
/// stored as coefficient vectors over the chart partials.
#[derive(Clone, Debug)]
pub struct DbarOperators<C: Coeff> {
    pub frame: OperatorFrame,
    pub z: Vec<Vec<Jet<C>>>,
    pub zbar: Vec<Vec<Jet<C>>>,
}

pub fn dbar_operators<C: Coeff>(
    j: &ComplexStructureJet<C>,
    frame: OperatorFrame,
) -> Result<DbarOperators<C>, SolveError> {
    let n = j.n;
    let space = j.jmat.get(0, 0).space().clone();
    let half = C::from_ratio(1, 2);
    let half_i = half.mul(&C::imag_unit());
    let mut zs = Vec::with_capacity(n);
    let mut zbars = Vec::with_capacity(n);
    for i in 0..n {
        let v: Vec<Jet<C>> = match frame {
            OperatorFrame::Holomorphic => j.p_inv.column(i),
            OperatorFrame::Chart => (0..2 * n)
                .map(|a| {
                    if a == i {
                        Jet::one(&space)
                    } else {
                        Jet::zero(&space)
                    }
                })
                .collect(),
        };
        let w = j.apply(&v)?;
        zs.push(
            v.iter()
                .zip(&w)
                .map(|(v, w)| &v.scale(&half) - &w.scale(&half_i))
                .collect(),
        );
        zbars.push(
            v.iter()
                .zip(&w)
                .map(|(v, w)| &v.scale(&half) + &w.scale(&half_i))
                .collect(),
        );
    }
    Ok(DbarOperators {
        frame,
        z: zs,
        zbar: zbars,
    })
}

fn apply_op<C: Coeff>(coeffs: &[Jet<C>], f: &Jet<C>) -> Result<Jet<C>, JetError> {
    let mut acc = Jet::zero(f.space());
    for (a, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        acc.add_product(c, &f.diff(a))?;
    }
    Ok(acc)
}

impl<C: Coeff> DbarOperators<C> {
    pub fn n(&self) -> usize {
        self.z.len()
    }

    /// `Z_i f`
    pub fn apply_z(&self, i: usize, f: &Jet<C>) -> Result<Jet<C>, JetError> {
        apply_op(&self.z[i], f)
    }

    /// `Z̄_i f`
    pub fn apply_zbar(&self, i: usize, f: &Jet<C>) -> Result<Jet<C>, JetError> {
        apply_op(&self.zbar[i], f)
    }

    /// `Z̄_j Z_i f` for all `i, j`, as the matrix with entry `(i, j)`.
    pub fn mixed_second(&self, f: &Jet<C>) -> Result<JetMatrix<C>, JetError> {
        let n = self.n();
        let first: Vec<Jet<C>> = (0..n)
            .map(|i| self.apply_z(i, f))
            .collect::<Result<_, _>>()?;
        JetMatrix::try_from_fn(n, n, |i, j| self.apply_zbar(j, &first[i]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PotentialKind {
    RhoInitial,
    PhiSolution,
}

/// A Kähler potential with the Cauchy data it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialJet<C: Coeff> {
    pub phi: Jet<C>,
    pub kind: PotentialKind,
    /// `φ(x, y, 0)`
    pub initial_value: Jet<C>,
    /// `∂φ/∂t(x, y, 0)`
    pub initial_slope: Jet<C>,
}

impl<C: Coeff> PotentialJet<C> {
    /// Potential carrying its own `t = 0` data.
    pub fn from_jet(phi: Jet<C>, kind: PotentialKind, t_var: usize) -> Self {
        let initial_value = phi.coefficient_of_power(t_var, 0);
        let initial_slope = phi.coefficient_of_power(t_var, 1);
        PotentialJet {
            phi,
            kind,
            initial_value,
            initial_slope,
        }
    }
}

/// `ρ = 2(Σ (y^i)² + t²)`: twice the energy `g(v, v)` in the orthonormal fiber
/// coordinates.
pub fn energy_potential<C: Coeff>(chart: &ChartData<C>) -> PotentialJet<C> {
    let space = &chart.chart_space;
    let mut rho = Jet::zero(space);
    for v in chart.fiber_vars() {
        let w = Jet::var(space, v);
        rho = &rho + &(&w * &w);
    }
    PotentialJet::from_jet(rho.scale_i64(2), PotentialKind::RhoInitial, chart.t_var())
}

/// A holomorphic function together with how far `∂̄` of it is from zero.
#[derive(Clone, Debug)]
pub struct HolomorphicDensity<C: Coeff> {
    pub h: Jet<C>,
    /// Largest coefficient of any `∂h/∂z̄^k` through degree `K − 1`.
    pub dbar_residual: f64,
}

/// Continue a real-analytic function on the base holomorphically: `h = f(z)`.
pub fn holomorphic_extension<C: Coeff>(
    f: &Jet<C>,
    j: &ComplexStructureJet<C>,
) -> Result<HolomorphicDensity<C>, SolveError> {
    let h = f.compose(&j.z)?;
    let ops = dbar_operators(j, OperatorFrame::Holomorphic)?;
    let order = h.order();
    let mut dbar_residual: f64 = 0.0;
    for k in 0..j.n {
        dbar_residual =
            dbar_residual.max(ops.apply_zbar(k, &h)?.max_abs_upto(order.saturating_sub(1)));
    }
    Ok(HolomorphicDensity { h, dbar_residual })
}
