//! The whole construction from metric and vector field to the solved potential.

use crate::adapted::{
    adapted_structure, complexified_exponential, dbar_operators, energy_potential,
    holomorphic_extension, ComplexStructureJet, DbarOperators, HolomorphicDensity, OperatorFrame,
    PotentialJet,
};
use crate::error::SolveError;
use crate::geometry::{build_chart, ChartData, MetricJet, VectorFieldJet};
use crate::jet::Coeff;
use crate::masolver::{HessianJet, MAState, MaProblem};

#[derive(Clone, Debug)]
pub struct Solution<C: Coeff> {
    pub chart: ChartData<C>,
    pub structure: ComplexStructureJet<C>,
    pub ops: DbarOperators<C>,
    pub h: HolomorphicDensity<C>,
    pub rho: PotentialJet<C>,
    pub phi: PotentialJet<C>,
    pub hessian: HessianJet<C>,
    pub state: MAState<C>,
}

impl<C: Coeff> Solution<C> {
    pub fn order(&self) -> usize {
        self.chart.order()
    }

    pub fn problem(&self) -> MaProblem<'_, C> {
        MaProblem {
            ops: &self.ops,
            h: &self.h,
            t_var: self.chart.t_var(),
        }
    }
}

/// Normal gauge, chart, adapted structure, `h`, and the Cauchy-Kovalevskaya solve.
pub fn solve<C: Coeff>(
    metric: &MetricJet<C>,
    field: &VectorFieldJet<C>,
) -> Result<Solution<C>, SolveError> {
    let order = metric.space().order();
    if order < 2 {
        return Err(SolveError::OrderTooLow { order, min: 2 });
    }
    let chart = build_chart(metric, field, true)?;
    let structure = adapted_structure(&chart, complexified_exponential(&chart)?)?;
    let ops = dbar_operators(&structure, OperatorFrame::Holomorphic)?;
    let h = holomorphic_extension(&chart.metric.vol, &structure)?;
    let rho = energy_potential(&chart);
    let problem = MaProblem {
        ops: &ops,
        h: &h,
        t_var: chart.t_var(),
    };
    let (phi, hessian, state) = problem.ck_solve(&rho)?;
    Ok(Solution {
        chart,
        structure,
        ops,
        h,
        rho,
        phi,
        hessian,
        state,
    })
}
