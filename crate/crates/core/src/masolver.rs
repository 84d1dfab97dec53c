//! Complex Hessian, the Monge-Ampère function `G = det M − |h|²`, and the
//! order-by-order solution of `G = 0` in powers of `t`.

use crate::adapted::{
    ComplexStructureJet, DbarOperators, HolomorphicDensity, PotentialJet, PotentialKind,
};
use crate::error::{JetError, SolveError};
use crate::jet::{Coeff, Jet, JetMatrix, Mode};

/// `M_ij = ∂²φ / ∂z̄^j ∂z^i`.
#[derive(Clone, Debug)]
pub struct HessianJet<C: Coeff> {
    pub m: JetMatrix<C>,
    /// Largest coefficient of `M_ij − conj(M_ji)` through degree `K − 2`.
    pub hermitian_residual: f64,
}

pub fn hermitian_hessian<C: Coeff>(
    phi: &Jet<C>,
    ops: &DbarOperators<C>,
) -> Result<HessianJet<C>, SolveError> {
    let m = ops.mixed_second(phi)?;
    let n = m.rows();
    let k = phi.order().saturating_sub(2);
    let mut hermitian_residual: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let d = m.get(i, j) - &m.get(j, i).conj();
            hermitian_residual = hermitian_residual.max(d.max_abs_upto(k));
        }
    }
    Ok(HessianJet {
        m,
        hermitian_residual,
    })
}

/// The Hessian written out term by term in chart partials,
/// `¼(F_ij + J^t_i J^t_j φ_tt)`, with `J^b_a` the `∂_b` component of `J ∂_{x^a}`.
/// Agrees with [`hermitian_hessian`] over the chart-frame operators through
/// degree `K − 2`; above that the two differ by where truncation cuts products.
pub fn literal_hessian<C: Coeff>(phi: &Jet<C>, j: &ComplexStructureJet<C>) -> JetMatrix<C> {
    let n = j.n;
    let t = 2 * n - 1;
    let xs: Vec<usize> = (0..n).collect();
    let ys: Vec<usize> = (n..t).collect();
    let space = phi.space().clone();
    let i_unit = Jet::constant(&space, C::imag_unit());
    let jm = |b: usize, a: usize| j.jmat.get(b, a);
    let d1 = |a: usize| phi.diff(a);
    let d2 = |a: usize, b: usize| phi.diff(a).diff(b);
    // One group `c [∂_l J^k_i φ_k + J^k_i φ_lk]` summed over k in a block.
    let group = |c: &Jet<C>, l: usize, i: usize, block: &[usize]| -> Jet<C> {
        let mut acc = Jet::zero(&space);
        for &k in block {
            acc = &acc + &(c * &(&(&jm(k, i).diff(l) * &d1(k)) + &(jm(k, i) * &d2(l, k))));
        }
        acc
    };
    let blocks: [&[usize]; 3] = [&xs, &ys, &[t]];
    JetMatrix::from_fn(n, n, |i, jj| {
        let minus_i = -&i_unit;
        let mut f = d2(jj, i);
        // ∂_{x^j} applied to -i J φ
        for block in blocks {
            f = &f + &group(&minus_i, jj, i, block);
        }
        // i J_{x^j} applied to ∂_{x^i} φ − i J_{x^i} φ, one line per block of l
        for lblock in blocks {
            for &l in lblock {
                let c = jm(l, jj);
                f = &f + &(&(&i_unit * c) * &d2(l, i));
                for kblock in blocks {
                    let mut g = group(c, l, i, kblock);
                    if l == t && kblock[0] == t {
                        // J^t_j J^t_i φ_tt is kept outside F
                        g = &g - &(&(c * jm(t, i)) * &d2(t, t));
                    }
                    f = &f + &g;
                }
            }
        }
        let corner = &(jm(t, i) * jm(t, jj)) * &d2(t, t);
        (&f + &corner).scale(&C::from_ratio(1, 4))
    })
}

/// `G = det M − h h̄`.
pub fn build_g<C: Coeff>(
    m: &HessianJet<C>,
    h: &HolomorphicDensity<C>,
) -> Result<Jet<C>, SolveError> {
    Ok(&m.m.det()? - &(&h.h * &h.h.conj()))
}

/// `∂G/∂φ_tt = Σ adj(M)_ji ζ^t_i ζ̄^t_j`, where `ζ^t_i` is the `∂_t` coefficient of `Z_i`.
pub fn pivot_jet<C: Coeff>(
    m: &HessianJet<C>,
    ops: &DbarOperators<C>,
    t_var: usize,
) -> Result<Jet<C>, SolveError> {
    let n = m.m.rows();
    let adj = m.m.adjugate()?;
    let mut acc = Jet::zero(m.m.get(0, 0).space());
    for i in 0..n {
        for j in 0..n {
            let c = &ops.z[i][t_var] * &ops.zbar[j][t_var];
            acc.add_product(adj.get(j, i), &c)?;
        }
    }
    Ok(acc)
}

/// Progress of the solver: `G` and the pivot at the current partial sum.
#[derive(Clone, Debug)]
pub struct MAState<C: Coeff> {
    pub g: Jet<C>,
    pub pivot: Jet<C>,
    /// Highest power of `t` whose coefficient of `φ` has been determined.
    pub stage: usize,
}

/// The pivot on `L` at the chart center; zero means the problem is characteristic.
pub fn pivot_check<C: Coeff>(state: &MAState<C>, t_var: usize) -> Result<C, SolveError> {
    let p = state
        .pivot
        .coefficient_of_power(t_var, 0)
        .constant_term()
        .clone();
    if p.is_zero() {
        return Err(SolveError::ZeroPivot);
    }
    Ok(p)
}

/// Everything the solver needs besides the potential.
pub struct MaProblem<'a, C: Coeff> {
    pub ops: &'a DbarOperators<C>,
    pub h: &'a HolomorphicDensity<C>,
    pub t_var: usize,
}

const NEWTON_BUDGET: usize = 8;
const NEWTON_TOL: f64 = 1e-13;

impl<C: Coeff> MaProblem<'_, C> {
    pub fn state(
        &self,
        phi: &Jet<C>,
        stage: usize,
    ) -> Result<(HessianJet<C>, MAState<C>), SolveError> {
        let m = hermitian_hessian(phi, self.ops)?;
        let g = build_g(&m, self.h)?;
        let pivot = pivot_jet(&m, self.ops, self.t_var)?;
        Ok((m, MAState { g, pivot, stage }))
    }

    fn converged(&self, r: &Jet<C>) -> bool {
        match C::MODE {
            Mode::Exact => r.is_zero(),
            Mode::Binary64 => r.max_abs() <= NEWTON_TOL,
        }
    }

    /// Solve the `t⁰` part of `G = 0` for `φ₂(x, y)`, the coefficient of `t²`.
    ///
    /// On each slice `t⁰`, `det M` is affine in `φ_tt` (the `φ_tt` term of `M`
    /// has rank one), so Newton's method converges in one step up to rounding;
    /// the seed is the constant that solves the corner relation at the center.
    pub fn solve_order_zero(&self, initial: &PotentialJet<C>) -> Result<Jet<C>, SolveError> {
        let t = self.t_var;
        let order = initial.phi.order();
        if order < 2 {
            return Err(SolveError::OrderTooLow { order, min: 2 });
        }
        let keep = order - 2;
        let base = &initial.initial_value + &initial.initial_slope.mul_var(t);
        let with = |phi2: &Jet<C>| &base + &phi2.mul_var_pow(t, 2);

        let (_, state) = self.state(&base, 1)?;
        let p0 = state.pivot.coefficient_of_power(t, 0);
        let p0_center = pivot_check(&state, t)?;
        let g0 = state.g.coefficient_of_power(t, 0);
        // corner relation at the center: G0(0) + 2 φ₂(0) P0(0) = 0
        let seed = g0
            .constant_term()
            .neg()
            .mul(&p0_center.scale_i64(2).inv().ok_or(SolveError::ZeroPivot)?);
        let mut phi2 = Jet::constant(initial.phi.space(), seed);
        let mut p0_inv = p0.reciprocal()?;

        for _ in 0..NEWTON_BUDGET {
            let (_, state) = self.state(&with(&phi2), 2)?;
            let g0 = state.g.coefficient_of_power(t, 0).truncated(keep);
            if self.converged(&g0) {
                return Ok(phi2);
            }
            p0_inv = state
                .pivot
                .coefficient_of_power(t, 0)
                .reciprocal()
                .unwrap_or(p0_inv);
            let step = (&g0 * &p0_inv).scale(&C::from_ratio(1, 2)).truncated(keep);
            phi2 = &phi2 - &step;
        }
        Err(SolveError::NewtonDiverged(NEWTON_BUDGET))
    }

    /// Cauchy-Kovalevskaya recursion: `φ_{m+2} = −R_m / ((m+2)(m+1) P₀)` where
    /// `R_m` is the `t^m` coefficient of `G` and `P₀` the `t⁰` part of the pivot.
    pub fn ck_solve(
        &self,
        initial: &PotentialJet<C>,
    ) -> Result<(PotentialJet<C>, HessianJet<C>, MAState<C>), SolveError> {
        let t = self.t_var;
        let order = initial.phi.order();
        let phi2 = self.solve_order_zero(initial)?;
        let mut phi =
            &(&initial.initial_value + &initial.initial_slope.mul_var(t)) + &phi2.mul_var_pow(t, 2);
        let (_, state) = self.state(&phi, 2)?;
        let p0 = state.pivot.coefficient_of_power(t, 0);
        if p0.constant_term().is_zero() {
            return Err(SolveError::ZeroPivot);
        }
        let p0_inv = p0.reciprocal()?;
        for m in 1..=order.saturating_sub(2) {
            let keep = order - 2 - m;
            let (_, state) = self.state(&phi, m + 1)?;
            let r = state.g.coefficient_of_power(t, m).truncated(keep);
            if r.is_zero() {
                continue;
            }
            let denom = C::from_i64(-(((m + 2) * (m + 1)) as i64))
                .inv()
                .expect("nonzero");
            let next = (&r * &p0_inv).scale(&denom).truncated(keep);
            phi = &phi + &next.mul_var_pow(t, m + 2);
        }
        let (hess, state) = self.state(&phi, order)?;
        let mut solution = PotentialJet::from_jet(phi, PotentialKind::PhiSolution, t);
        solution.initial_value = initial.initial_value.clone();
        solution.initial_slope = initial.initial_slope.clone();
        Ok((solution, hess, state))
    }
}

/// Cofactor expansion of `det M` along the last row and column:
/// `det M = M_nn C_nn + R`. Returns `(C_nn, R)`.
pub fn corner_split<C: Coeff>(m: &JetMatrix<C>) -> Result<(Jet<C>, Jet<C>), JetError> {
    let n = m.rows();
    if n == 1 {
        let space = m.get(0, 0).space();
        return Ok((Jet::one(space), Jet::zero(space)));
    }
    let c = m.minor(n - 1, n - 1).det()?;
    let r = &m.det()? - &(m.get(n - 1, n - 1) * &c);
    Ok((c, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adapted::*;
    use crate::geometry::{build_chart, parse_metric, parse_vector_field, ChartData};
    use crate::jet::ExactComplex as Q;
    use num_complex::Complex64;

    struct Setup<C: Coeff> {
        chart: ChartData<C>,
        j: ComplexStructureJet<C>,
        ops: DbarOperators<C>,
        h: HolomorphicDensity<C>,
    }

    fn setup<C: Coeff>(metric: &str, field: &str, n: usize, k: usize) -> Setup<C> {
        let m = parse_metric::<C>(metric, n, k).unwrap();
        let x = parse_vector_field::<C>(field, n, k).unwrap();
        let chart = build_chart(&m, &x, true).unwrap();
        let j = adapted_structure(&chart, complexified_exponential(&chart).unwrap()).unwrap();
        let ops = dbar_operators(&j, OperatorFrame::Holomorphic).unwrap();
        let h = holomorphic_extension(&chart.metric.vol, &j).unwrap();
        Setup { chart, j, ops, h }
    }

    #[test]
    fn flat_hessians() {
        let s = setup::<Q>("g11=1", "X1=1", 1, 4);
        let rho = energy_potential(&s.chart);
        let m = hermitian_hessian(&rho.phi, &s.ops).unwrap();
        assert_eq!(m.m.get(0, 0), &Jet::one(&s.chart.chart_space));

        let s = setup::<Q>("g11=1; g22=1", "X2=1", 2, 4);
        let rho = energy_potential(&s.chart);
        let m = hermitian_hessian(&rho.phi, &s.ops).unwrap();
        assert_eq!(m.m, JetMatrix::identity(&s.chart.chart_space, 2));
        assert!(build_g(&m, &s.h).unwrap().is_zero());
    }

    #[test]
    fn zero_potential_gives_minus_one() {
        let s = setup::<Q>("g11=1", "X1=1", 1, 4);
        let zero = Jet::zero(&s.chart.chart_space);
        let g = build_g(&hermitian_hessian(&zero, &s.ops).unwrap(), &s.h).unwrap();
        assert_eq!(g, -Jet::one(&s.chart.chart_space));
    }

    #[test]
    fn flat_pivots_are_a_quarter() {
        for (metric, field, n) in [("g11=1", "X1=1", 1), ("g11=1; g22=1", "X2=1", 2)] {
            let s = setup::<Q>(metric, field, n, 4);
            let p = MaProblem {
                ops: &s.ops,
                h: &s.h,
                t_var: s.chart.t_var(),
            };
            let (_, state) = p.state(&energy_potential(&s.chart).phi, 1).unwrap();
            assert_eq!(
                pivot_check(&state, s.chart.t_var()).unwrap(),
                Q::from_ratio(1, 4)
            );
        }
    }

    #[test]
    fn flat_solutions_are_the_energy() {
        let s = setup::<Q>("g11=1; g22=1", "X2=1", 2, 6);
        let p = MaProblem {
            ops: &s.ops,
            h: &s.h,
            t_var: s.chart.t_var(),
        };
        let rho = energy_potential(&s.chart);
        assert_eq!(
            p.solve_order_zero(&rho).unwrap(),
            Jet::constant(&s.chart.chart_space, Q::from_ratio(2, 1))
        );
        let (phi, _, state) = p.ck_solve(&rho).unwrap();
        assert_eq!(phi.phi, rho.phi);
        assert!(state.g.is_zero());
    }

    #[test]
    fn curved_exact_solution_kills_g() {
        let k = 5;
        let s = setup::<Q>("g11=(10+cos(x1))/11; g22=(10+cos(x1))/11", "X2=1", 2, k);
        let t = s.chart.t_var();
        let p = MaProblem {
            ops: &s.ops,
            h: &s.h,
            t_var: t,
        };
        let rho = energy_potential(&s.chart);
        let (phi, hess, state) = p.ck_solve(&rho).unwrap();
        assert!(
            state.g.truncated(k - 2).is_zero(),
            "{:?}",
            state.g.truncated(k - 2)
        );
        assert_eq!(hess.hermitian_residual, 0.0);
        assert_eq!(phi.phi.max_imag(), 0.0);
        // corner value at the center
        assert_eq!(
            phi.phi.coefficient_of_power(t, 2).constant_term(),
            &Q::from_ratio(2, 1)
        );
        // Cauchy data untouched
        assert_eq!(
            phi.phi.coefficient_of_power(t, 0),
            rho.phi.coefficient_of_power(t, 0)
        );
        assert_eq!(
            phi.phi.coefficient_of_power(t, 1),
            rho.phi.coefficient_of_power(t, 1)
        );
    }

    #[test]
    fn step_is_linear_in_the_new_coefficient() {
        let k = 5;
        let s = setup::<Q>("g11=(10+cos(x1))/11; g22=(10+cos(x1))/11", "X2=1", 2, k);
        let t = s.chart.t_var();
        let p = MaProblem {
            ops: &s.ops,
            h: &s.h,
            t_var: t,
        };
        let (phi, _, state) = p.ck_solve(&energy_potential(&s.chart)).unwrap();
        let p0 = state.pivot.coefficient_of_power(t, 0);
        let m = 1;
        let eps = Q::from_ratio(1, 1000);
        let mono = Jet::monomial(&s.chart.chart_space, &[1, 0, 0, 0], eps.clone());
        let bumped = &phi.phi + &mono.mul_var_pow(t, m + 2);
        let (_, st2) = p.state(&bumped, 0).unwrap();
        let diff = &st2.g.coefficient_of_power(t, m) - &state.g.coefficient_of_power(t, m);
        let expect = (&p0 * &mono).scale_i64(((m + 2) * (m + 1)) as i64);
        // nonlinear terms land at t^{2m} or beyond
        assert_eq!(diff.truncated(k - 2 - m), expect.truncated(k - 2 - m));
    }

    #[test]
    fn literal_formula_matches_operators_on_adapted_structure() {
        let s = setup::<Q>(
            "g11=(10+cos(x1))/11; g22=(10+cos(x1))/11",
            "X1=x2/5; X2=1",
            2,
            4,
        );
        let ops = dbar_operators(&s.j, OperatorFrame::Chart).unwrap();
        let phi =
            &energy_potential(&s.chart).phi + &Jet::var(&s.chart.chart_space, 0).mul_var_pow(3, 2);
        // The truncated Leibniz rule only holds below the top degree, so the two
        // expansions agree through the Hessian's meaningful order K - 2.
        let a = literal_hessian(&phi, &s.j);
        let b = ops.mixed_second(&phi).unwrap();
        for (x, y) in a.entries().iter().zip(b.entries()) {
            assert_eq!(x.truncated(2), y.truncated(2));
        }
    }

    #[test]
    fn binary64_perturbed_torus() {
        let k = 6;
        let s = setup::<Complex64>("g11=1+(1/10)*cos(x1); g22=1+(1/10)*cos(x1)", "X2=1", 2, k);
        let t = s.chart.t_var();
        let p = MaProblem {
            ops: &s.ops,
            h: &s.h,
            t_var: t,
        };
        let (phi, _, state) = p.ck_solve(&energy_potential(&s.chart)).unwrap();
        assert!(
            state.g.max_abs_upto(k - 2) < 1e-12,
            "{}",
            state.g.max_abs_upto(k - 2)
        );
        assert!(pivot_check(&state, t).unwrap().re > 0.0);
        assert!(phi.phi.max_imag() < 1e-12);
    }
}
