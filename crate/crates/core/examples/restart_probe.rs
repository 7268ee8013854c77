//! Scratch probe for the rectangle restart experiment (run with
//! `cargo run -p cauchy-mann-core --example restart_probe --release`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use cauchy_mann_core::bvp::{BoundaryCondition, CoefficientField};
use cauchy_mann_core::fixed_point::{CauchyData, FixedPointOperator};
use cauchy_mann_core::geometry::{build_grid, sample_boundary, BoundaryFunction, Domain, Segment};
use cauchy_mann_core::mann::{
    mann_mazya_run, CauchySpace, IterationConfig, Reference, SegmentingSchedule, StoppingRule,
};

fn main() {
    let grid = Arc::new(
        build_grid(Domain::Rectangle { width: 1.0, height: 0.75 }, 129, 97).unwrap(),
    );
    let f = sample_boundary(&grid, Segment::Gamma1, |x| (PI * x).sin()).unwrap();
    let g = BoundaryFunction::zero(&grid, Segment::Gamma1).unwrap();
    let mut extra = BTreeMap::new();
    for seg in [Segment::Gamma3, Segment::Gamma4] {
        extra.insert(
            seg,
            BoundaryCondition::Dirichlet(BoundaryFunction::zero(&grid, seg).unwrap()),
        );
    }
    let data = CauchyData::with_extra(f, g, extra).unwrap();
    let op = FixedPointOperator::new(grid.clone(), CoefficientField::laplace(), data).unwrap();
    let metric = op.star_metric().unwrap();
    let space = CauchySpace::new(&op, &metric);

    let dirichlet_ref =
        sample_boundary(&grid, Segment::Gamma2, |x| (0.75 * PI).cosh() * (PI * x).sin()).unwrap();
    let neumann_ref = sample_boundary(&grid, Segment::Gamma2, |x| {
        PI * (0.75 * PI).sinh() * (PI * x).sin()
    })
    .unwrap();
    let reference = Reference { neumann: Some(neumann_ref), dirichlet: Some(dirichlet_ref.clone()) };
    let phi1 = BoundaryFunction::zero(&grid, Segment::Gamma2).unwrap();

    for (label, restart) in [("plain", None), ("restart-50", Some(50))] {
        let cfg = IterationConfig {
            schedule: SegmentingSchedule::HarmonicAverage,
            max_iter: 500,
            stop: StoppingRule::MaxIterOnly,
            restart_every: restart,
            record_every: 50,
        };
        let t0 = std::time::Instant::now();
        let record = mann_mazya_run(&space, phi1.clone(), &cfg, Some(&reference)).unwrap();
        let dref = dirichlet_ref.norm_l2();
        println!("{label}: {:?} elapsed", t0.elapsed());
        for s in &record.steps {
            println!(
                "  k={:4} rel_dirichlet_err={:.4} residual_star={:.4e}",
                s.k,
                s.err_l2.unwrap() / dref,
                s.residual_star
            );
        }
    }
}
