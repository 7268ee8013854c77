//! The iteration engine: segmenting schedules, the Mann averaging loop around
//! an affine fixed-point operator, stopping rules, restarts, and the
//! regularization family `R_k`.
//!
//! The loop keeps the averaged iterate `φ̂_k` in its O(1)-memory form
//!
//! ```text
//! φ_{k+1} = T(φ̂_k),     φ̂_{k+1} = (1 − d_k) φ̂_k + d_k φ_{k+1}
//! ```
//!
//! which is algebraically identical to averaging the raw iterates with the
//! segmenting matrix generated by the diagonal `d_k` (rows rebuilt from
//! `a_{i+1,j} = (1 − a_{i+1,i+1}) a_{ij}`, each row summing to one). The
//! identity schedule `d_k ≡ 1` reproduces the plain Picard loop bitwise.
//!
//! The residual monitored by the stopping rules is the fixed-point defect
//! `T(φ̂_k) − φ̂_k`, which equals `z − (I − T_l) φ̂_k` for the affine operator
//! of the run, so the discrepancy principle compares exactly the quantity of
//! its definition without extra solves.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fixed_point::{FixedPointOperator, StarMetric};
use crate::geometry::BoundaryFunction;

/// Diagonal sequence `d_k ∈ [0, 1]` generating a segmenting matrix.
#[derive(Clone)]
pub enum SegmentingSchedule {
    /// `d_k ≡ 1`: plain Picard successive approximation.
    Identity,
    /// `d_k = 1/(k+1)`, equivalent to the averaging weights `a_{kj} = 1/k`.
    HarmonicAverage,
    /// Fixed `d_k ≡ c`.
    Constant(f64),
    /// Arbitrary diagonal (validated per step).
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for SegmentingSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentingSchedule::Identity => write!(f, "Identity"),
            SegmentingSchedule::HarmonicAverage => write!(f, "HarmonicAverage"),
            SegmentingSchedule::Constant(c) => write!(f, "Constant({c})"),
            SegmentingSchedule::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl SegmentingSchedule {
    /// Diagonal entry `d_k = a_{k+1,k+1}` for the 1-based step index `k`.
    pub fn d(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        let d = match self {
            SegmentingSchedule::Identity => 1.0,
            SegmentingSchedule::HarmonicAverage => 1.0 / (k as f64 + 1.0),
            SegmentingSchedule::Constant(c) => *c,
            SegmentingSchedule::Custom(f) => f(k),
        };
        assert!((0.0..=1.0).contains(&d), "segmenting diagonal d_{k} = {d} outside [0, 1]");
        d
    }

    pub fn validate(&self) -> Result<()> {
        if let SegmentingSchedule::Constant(c) = self {
            if !(0.0..=1.0).contains(c) {
                return Err(Error::InvalidConfig(format!(
                    "constant schedule {c} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// Whether `Σ d_k (1 − d_k)` diverges (the convergence hypothesis of the
    /// segmenting iteration), decided analytically per kind; `None` when
    /// unknown (custom schedules).
    pub fn divergent_weight_sum(&self) -> Option<bool> {
        match self {
            SegmentingSchedule::Identity => Some(false),
            SegmentingSchedule::HarmonicAverage => Some(true),
            SegmentingSchedule::Constant(c) => Some(*c > 0.0 && *c < 1.0),
            SegmentingSchedule::Custom(_) => None,
        }
    }

    /// First `n` rows of the segmenting matrix generated by this diagonal via
    /// `a_{i+1,j} = (1 − a_{i+1,i+1}) a_{ij}` (test/diagnostic use).
    pub fn matrix_rows(&self, n: usize) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
        rows.push(vec![1.0]);
        for k in 1..n {
            let d = self.d(k);
            let prev = &rows[k - 1];
            let mut row = Vec::with_capacity(k + 1);
            for j in 0..k {
                row.push((1.0 - d) * prev[j]);
            }
            row.push(d);
            rows.push(row);
        }
        rows
    }
}

/// Norm used by a stopping rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopNorm {
    /// The data-space norm (boundary L² on grids, plain ℓ² on the oracle).
    BoundaryL2,
    /// The theory norm (`*` metric on grids, weighted mode norm on the
    /// oracle).
    Star,
}

/// Termination rule of a run.
#[derive(Clone, Debug)]
pub enum StoppingRule {
    /// Stop when `‖φ̂_k − φ̂_{k−1}‖ ≤ tol`.
    SuccessiveDiff { tol: f64, norm: StopNorm },
    /// Discrepancy principle: stop at the first `k` with
    /// `‖z_ε − (I−T_l)φ̂_k‖ ≤ μ·ε` (the `≤` of the definition).
    Discrepancy { mu: f64, epsilon: f64, norm: StopNorm },
    /// Run to `max_iter`.
    MaxIterOnly,
}

impl StoppingRule {
    pub fn validate(&self) -> Result<()> {
        match self {
            StoppingRule::SuccessiveDiff { tol, .. } => {
                if !(*tol > 0.0) {
                    return Err(Error::InvalidConfig("stopping tolerance must be > 0".into()));
                }
            }
            StoppingRule::Discrepancy { mu, epsilon, .. } => {
                if !(*mu > 1.0) {
                    return Err(Error::InvalidConfig(format!(
                        "discrepancy parameter μ = {mu} must exceed 1"
                    )));
                }
                if *mu <= 2.0 {
                    log::warn!(
                        "discrepancy μ = {mu} ≤ 2: the source-condition rate bounds need μ > 2"
                    );
                }
                if !(*epsilon > 0.0) {
                    return Err(Error::InvalidConfig("noise level ε must be > 0".into()));
                }
            }
            StoppingRule::MaxIterOnly => {}
        }
        Ok(())
    }
}

/// Configuration of one iteration run.
#[derive(Clone, Debug)]
pub struct IterationConfig {
    pub schedule: SegmentingSchedule,
    pub max_iter: usize,
    pub stop: StoppingRule,
    /// Reset the averaging state every `m` steps, restarting from the last
    /// raw iterate.
    pub restart_every: Option<usize>,
    /// Record every n-th step (step 1 and the final step are always kept).
    pub record_every: usize,
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.stop.validate()?;
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidConfig("record_every must be at least 1".into()));
        }
        if let Some(m) = self.restart_every {
            if m == 0 {
                return Err(Error::InvalidConfig("restart_every must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// Why a run terminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    SuccessiveDiffReached,
    DiscrepancyReached,
    /// `MaxIterOnly` runs completing their budget.
    Completed,
    /// A stopping rule was configured but never fired within `max_iter`.
    NoConvergence,
}

/// Reference solutions for error tracking during a run.
#[derive(Clone, Default)]
pub struct Reference<E> {
    /// Exact Neumann trace φ̄ (errors in the theory norm and data norm).
    pub neumann: Option<E>,
    /// Exact Dirichlet trace of the solution on Γ2; compared against the
    /// reconstruction `L_n(φ̂_k)` when the space provides it.
    pub dirichlet: Option<E>,
}

/// One recorded step of a run.
#[derive(Clone, Debug)]
pub struct RecordedStep<E> {
    pub k: usize,
    /// Raw iterate φ_k (φ₁ is the initial guess, φ_{k+1} = T(φ̂_k)).
    pub raw: E,
    /// Averaged iterate φ̂_k: the quantity plotted, stopped on, and returned.
    pub averaged: E,
    /// Fixed-point defect ‖T(φ̂_k) − φ̂_k‖ in the theory norm.
    pub residual_star: f64,
    /// Same defect in the data norm.
    pub residual_l2: f64,
    /// ‖φ̂_k − φ̂_{k−1}‖ in the data norm (None at k = 1 and after restarts).
    pub diff_l2: Option<f64>,
    /// Theory-norm distance of φ̂_k to the Neumann reference.
    pub err_star: Option<f64>,
    /// Data-norm error: reconstruction vs. Dirichlet reference when
    /// available, otherwise iterate vs. Neumann reference.
    pub err_l2: Option<f64>,
    /// Step began a restart block.
    pub restart: bool,
}

/// Full record of one run.
#[derive(Clone, Debug)]
pub struct IterationRecord<E> {
    pub steps: Vec<RecordedStep<E>>,
    pub stop_reason: StopReason,
    /// Index of the stopping step (the last step executed).
    pub stop_index: usize,
    /// Final averaged iterate.
    pub final_averaged: E,
}

impl<E> IterationRecord<E> {
    /// Residual monotonicity check (non-increasing within `slack`), over the
    /// recorded steps.
    pub fn residuals_non_increasing(&self, slack: f64) -> bool {
        self.steps
            .windows(2)
            .all(|w| w[1].residual_star <= w[0].residual_star + slack)
    }

    pub fn last(&self) -> &RecordedStep<E> {
        self.steps.last().expect("a run records at least one step")
    }
}

/// Vector-space and operator hooks the engine needs. Implemented by the
/// grid-based Cauchy operator and by the spectral oracle.
pub trait MannSpace {
    type Elem: Clone;

    /// Applies the affine operator; optionally returns the Dirichlet-trace
    /// reconstruction associated with the argument.
    fn apply(&self, x: &Self::Elem) -> Result<Applied<Self::Elem>>;

    /// a·x + b·y.
    fn combine(&self, a: f64, x: &Self::Elem, b: f64, y: &Self::Elem) -> Self::Elem;

    /// Theory norm (the `*` metric / weighted mode norm).
    fn norm_star(&self, x: &Self::Elem) -> Result<f64>;

    /// Data norm (boundary L² / plain ℓ²).
    fn norm_data(&self, x: &Self::Elem) -> f64;
}

/// Result of one operator application.
pub struct Applied<E> {
    pub image: E,
    pub reconstruction: Option<E>,
}

/// Runs the segmenting Mann iteration `(φ₁, A, T)` on any [`MannSpace`].
pub fn mann_mazya_run<S: MannSpace>(
    space: &S,
    phi1: S::Elem,
    cfg: &IterationConfig,
    reference: Option<&Reference<S::Elem>>,
) -> Result<IterationRecord<S::Elem>> {
    cfg.validate()?;
    let mut steps: Vec<RecordedStep<S::Elem>> = Vec::new();
    let mut averaged = phi1.clone();
    let mut raw = phi1;
    let mut prev_averaged: Option<S::Elem> = None;
    let mut schedule_index = 1usize;
    let mut steps_in_block = 0usize;
    let mut restart_flag = false;

    let mut stop_reason = StopReason::NoConvergence;
    let mut stop_index = cfg.max_iter;

    for k in 1..=cfg.max_iter {
        let applied = space.apply(&averaged)?;
        let defect = space.combine(1.0, &applied.image, -1.0, &averaged);
        let residual_l2 = space.norm_data(&defect);
        let diff_l2 = prev_averaged
            .as_ref()
            .map(|p| space.norm_data(&space.combine(1.0, &averaged, -1.0, p)));

        // decide whether this step must be recorded before knowing if we stop
        let record_due = k == 1 || k % cfg.record_every == 0 || restart_flag;

        // stopping decision at step k
        let mut stopping = false;
        match &cfg.stop {
            StoppingRule::SuccessiveDiff { tol, norm } => {
                let d = match (norm, &prev_averaged) {
                    (_, None) => None,
                    (StopNorm::BoundaryL2, Some(_)) => diff_l2,
                    (StopNorm::Star, Some(p)) => {
                        Some(space.norm_star(&space.combine(1.0, &averaged, -1.0, p))?)
                    }
                };
                if let Some(d) = d {
                    if d <= *tol {
                        stopping = true;
                        stop_reason = StopReason::SuccessiveDiffReached;
                    }
                }
            }
            StoppingRule::Discrepancy { mu, epsilon, norm } => {
                let r = match norm {
                    StopNorm::Star => space.norm_star(&defect)?,
                    StopNorm::BoundaryL2 => residual_l2,
                };
                if r <= mu * epsilon {
                    stopping = true;
                    stop_reason = StopReason::DiscrepancyReached;
                }
            }
            StoppingRule::MaxIterOnly => {}
        }
        let is_last = stopping || k == cfg.max_iter;

        if record_due || is_last {
            let residual_star = space.norm_star(&defect)?;
            let (err_star, err_l2) = match reference {
                None => (None, None),
                Some(r) => {
                    let err_star = match &r.neumann {
                        Some(nref) => {
                            Some(space.norm_star(&space.combine(1.0, &averaged, -1.0, nref))?)
                        }
                        None => None,
                    };
                    let err_l2 = match (&r.dirichlet, &applied.reconstruction, &r.neumann) {
                        (Some(dref), Some(rec), _) => {
                            Some(space.norm_data(&space.combine(1.0, rec, -1.0, dref)))
                        }
                        (_, _, Some(nref)) => {
                            Some(space.norm_data(&space.combine(1.0, &averaged, -1.0, nref)))
                        }
                        _ => None,
                    };
                    (err_star, err_l2)
                }
            };
            steps.push(RecordedStep {
                k,
                raw: raw.clone(),
                averaged: averaged.clone(),
                residual_star,
                residual_l2,
                diff_l2,
                err_star,
                err_l2,
                restart: restart_flag,
            });
        }
        restart_flag = false;

        if stopping {
            stop_index = k;
            break;
        }
        if k == cfg.max_iter {
            stop_index = k;
            if matches!(cfg.stop, StoppingRule::MaxIterOnly) {
                stop_reason = StopReason::Completed;
            }
            break;
        }

        // advance to step k+1
        raw = applied.image;
        steps_in_block += 1;
        prev_averaged = Some(averaged.clone());
        if cfg.restart_every.is_some_and(|m| steps_in_block >= m) {
            // restart: last raw iterate becomes the new initial guess
            averaged = raw.clone();
            schedule_index = 1;
            steps_in_block = 0;
            restart_flag = true;
            prev_averaged = None;
        } else {
            let d = cfg.schedule.d(schedule_index);
            averaged = if d == 1.0 {
                raw.clone()
            } else {
                space.combine(1.0 - d, &averaged, d, &raw)
            };
            schedule_index += 1;
        }
    }

    Ok(IterationRecord { final_averaged: averaged, steps, stop_reason, stop_index })
}

/// The regularization family: `R_k(z)` is the k-th *raw* iterate of the run
/// `(φ, A, T_l + z)`, so `R_1 = φ` and `R_{k+1} = T_l(φ̂_k) + z`.
pub fn regularized_reconstruct<S: MannSpace>(
    space: &S,
    z: &S::Elem,
    phi: &S::Elem,
    k: usize,
    schedule: &SegmentingSchedule,
) -> Result<S::Elem> {
    if k == 0 {
        return Err(Error::InvalidConfig("R_k needs k >= 1".into()));
    }
    let mut averaged = phi.clone();
    let mut raw = phi.clone();
    for step in 1..k {
        let image = space.apply(&averaged)?.image;
        let image = space.combine(1.0, &image, 1.0, z);
        raw = image;
        let d = schedule.d(step);
        averaged =
            if d == 1.0 { raw.clone() } else { space.combine(1.0 - d, &averaged, d, &raw) };
    }
    Ok(raw)
}

/// Grid-backed iteration space: the Cauchy fixed-point operator with its `*`
/// metric.
pub struct CauchySpace<'a> {
    pub op: &'a FixedPointOperator,
    pub metric: &'a StarMetric,
}

impl<'a> CauchySpace<'a> {
    pub fn new(op: &'a FixedPointOperator, metric: &'a StarMetric) -> Self {
        Self { op, metric }
    }
}

impl MannSpace for CauchySpace<'_> {
    type Elem = BoundaryFunction;

    fn apply(&self, x: &BoundaryFunction) -> Result<Applied<BoundaryFunction>> {
        let (image, trace) = self.op.apply_t_with_trace(x)?;
        Ok(Applied { image, reconstruction: Some(trace) })
    }

    fn combine(&self, a: f64, x: &BoundaryFunction, b: f64, y: &BoundaryFunction) -> BoundaryFunction {
        BoundaryFunction::linear_comb(a, x, b, y)
    }

    fn norm_star(&self, x: &BoundaryFunction) -> Result<f64> {
        self.metric.norm(x)
    }

    fn norm_data(&self, x: &BoundaryFunction) -> f64 {
        x.norm_l2()
    }
}

/// A linear operator plus a fixed shift, as used by the regularization
/// family `R_k^φ(z)` on grids: applies `T_l x` and leaves adding `z` to the
/// engine.
pub struct LinearCauchySpace<'a> {
    inner: CauchySpace<'a>,
}

impl<'a> LinearCauchySpace<'a> {
    /// `op` must already be a linear part (zero Cauchy data).
    pub fn new(op: &'a FixedPointOperator, metric: &'a StarMetric) -> Self {
        Self { inner: CauchySpace::new(op, metric) }
    }
}

impl MannSpace for LinearCauchySpace<'_> {
    type Elem = BoundaryFunction;

    fn apply(&self, x: &BoundaryFunction) -> Result<Applied<BoundaryFunction>> {
        let image = self.inner.op.apply_t(x)?;
        Ok(Applied { image, reconstruction: None })
    }

    fn combine(&self, a: f64, x: &BoundaryFunction, b: f64, y: &BoundaryFunction) -> BoundaryFunction {
        BoundaryFunction::linear_comb(a, x, b, y)
    }

    fn norm_star(&self, x: &BoundaryFunction) -> Result<f64> {
        self.inner.norm_star(x)
    }

    fn norm_data(&self, x: &BoundaryFunction) -> f64 {
        x.norm_l2()
    }
}

/// Writes a record as CSV with the layout
/// `k,residual_star,residual_l2,diff_l2,err_star,err_l2,restart_flag`.
pub fn write_history_csv<E>(record: &IterationRecord<E>, mut out: impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "k,residual_star,residual_l2,diff_l2,err_star,err_l2,restart_flag")?;
    for s in &record.steps {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.k,
            s.residual_star,
            s.residual_l2,
            opt(s.diff_l2),
            opt(s.err_star),
            opt(s.err_l2),
            u8::from(s.restart)
        )?;
    }
    Ok(())
}

/// Renders a record to a CSV string.
pub fn history_csv_string<E>(record: &IterationRecord<E>) -> String {
    let mut buf = Vec::new();
    write_history_csv(record, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Scalar affine model space for fast engine tests: T(x) = λx + z.
    struct ScalarSpace {
        lambda: f64,
        z: f64,
    }

    impl MannSpace for ScalarSpace {
        type Elem = f64;

        fn apply(&self, x: &f64) -> Result<Applied<f64>> {
            Ok(Applied { image: self.lambda * x + self.z, reconstruction: None })
        }

        fn combine(&self, a: f64, x: &f64, b: f64, y: &f64) -> f64 {
            a * x + b * y
        }

        fn norm_star(&self, x: &f64) -> Result<f64> {
            Ok(x.abs())
        }

        fn norm_data(&self, x: &f64) -> f64 {
            x.abs()
        }
    }

    fn base_cfg(schedule: SegmentingSchedule, max_iter: usize) -> IterationConfig {
        IterationConfig {
            schedule,
            max_iter,
            stop: StoppingRule::MaxIterOnly,
            restart_every: None,
            record_every: 1,
        }
    }

    #[test]
    fn identity_schedule_is_picard_bitwise() {
        let space = ScalarSpace { lambda: 0.73, z: 0.21 };
        let cfg = base_cfg(SegmentingSchedule::Identity, 40);
        let record = mann_mazya_run(&space, 0.1f64, &cfg, None).unwrap();
        let mut x = 0.1f64;
        for step in &record.steps {
            assert_eq!(step.averaged, x, "step {}", step.k);
            x = 0.73 * x + 0.21;
        }
    }

    #[test]
    fn harmonic_schedule_matches_matrix_form() {
        let space = ScalarSpace { lambda: 0.9, z: 0.05 };
        let cfg = base_cfg(SegmentingSchedule::HarmonicAverage, 50);
        let record = mann_mazya_run(&space, 2.0f64, &cfg, None).unwrap();

        // explicit matrix form with a_{kj} = 1/k
        let mut raws = vec![2.0f64];
        let mut max_dev = 0.0f64;
        for step in &record.steps {
            let k = step.k;
            let avg: f64 = raws.iter().sum::<f64>() / k as f64;
            max_dev = max_dev.max((avg - step.averaged).abs());
            raws.push(0.9 * avg + 0.05);
            assert_eq!(raws.len(), k + 1);
        }
        assert!(max_dev <= 1e-12, "max deviation {max_dev}");
    }

    #[test]
    fn segmenting_rows_sum_to_one() {
        for sched in [
            SegmentingSchedule::Identity,
            SegmentingSchedule::HarmonicAverage,
            SegmentingSchedule::Constant(0.3),
        ] {
            for (k, row) in sched.matrix_rows(30).iter().enumerate() {
                let s: f64 = row.iter().sum();
                assert!((s - 1.0).abs() < 1e-12, "row {k} sums to {s}");
                assert!(row.iter().all(|&a| a >= 0.0));
            }
        }
        // harmonic rows are exactly 1/k
        let rows = SegmentingSchedule::HarmonicAverage.matrix_rows(20);
        for (k, row) in rows.iter().enumerate() {
            for &a in row {
                assert!((a - 1.0 / (k as f64 + 1.0)).abs() < 1e-15);
            }
        }
    }

    proptest! {
        #[test]
        fn custom_schedule_rows_sum_to_one(ds in proptest::collection::vec(0.0f64..=1.0, 2..20)) {
            let ds2 = ds.clone();
            let sched = SegmentingSchedule::Custom(Arc::new(move |k| ds2[(k - 1) % ds2.len()]));
            for row in sched.matrix_rows(ds.len()) {
                let s: f64 = row.iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-9);
            }
        }

        #[test]
        fn recursion_equals_matrix_averaging(
            lambda in 0.1f64..0.99,
            d in 0.05f64..0.95,
            x0 in -2.0f64..2.0,
        ) {
            let space = ScalarSpace { lambda, z: 0.1 };
            let cfg = base_cfg(SegmentingSchedule::Constant(d), 30);
            let record = mann_mazya_run(&space, x0, &cfg, None).unwrap();
            let rows = SegmentingSchedule::Constant(d).matrix_rows(31);
            let mut raws = vec![x0];
            for step in &record.steps {
                let k = step.k;
                let avg: f64 = rows[k - 1].iter().zip(&raws).map(|(a, x)| a * x).sum();
                prop_assert!((avg - step.averaged).abs() <= 1e-10);
                raws.push(lambda * step.averaged + 0.1);
            }
        }
    }

    #[test]
    fn residuals_monotone_on_scalar_model() {
        let space = ScalarSpace { lambda: 0.95, z: 0.02 };
        let cfg = base_cfg(SegmentingSchedule::HarmonicAverage, 200);
        let record = mann_mazya_run(&space, 5.0f64, &cfg, None).unwrap();
        assert!(record.residuals_non_increasing(1e-12));
    }

    #[test]
    fn discrepancy_stops_immediately_for_huge_epsilon() {
        let space = ScalarSpace { lambda: 0.9, z: 0.1 };
        let mut cfg = base_cfg(SegmentingSchedule::HarmonicAverage, 100);
        cfg.stop = StoppingRule::Discrepancy { mu: 3.0, epsilon: 1e6, norm: StopNorm::Star };
        let record = mann_mazya_run(&space, 0.0f64, &cfg, None).unwrap();
        assert_eq!(record.stop_index, 1);
        assert_eq!(record.stop_reason, StopReason::DiscrepancyReached);
    }

    #[test]
    fn successive_diff_stops() {
        let space = ScalarSpace { lambda: 0.5, z: 0.5 };
        let mut cfg = base_cfg(SegmentingSchedule::Identity, 1000);
        cfg.stop = StoppingRule::SuccessiveDiff { tol: 1e-6, norm: StopNorm::BoundaryL2 };
        let record = mann_mazya_run(&space, 0.0f64, &cfg, None).unwrap();
        assert_eq!(record.stop_reason, StopReason::SuccessiveDiffReached);
        assert!(record.stop_index < 1000);
        // fixed point of 0.5x + 0.5 is 1
        assert!((record.final_averaged - 1.0).abs() < 1e-5);
    }

    #[test]
    fn no_convergence_reported() {
        let space = ScalarSpace { lambda: 0.999, z: 0.0 };
        let mut cfg = base_cfg(SegmentingSchedule::Identity, 5);
        cfg.stop = StoppingRule::SuccessiveDiff { tol: 1e-12, norm: StopNorm::BoundaryL2 };
        let record = mann_mazya_run(&space, 1.0f64, &cfg, None).unwrap();
        assert_eq!(record.stop_reason, StopReason::NoConvergence);
        assert_eq!(record.stop_index, 5);
    }

    #[test]
    fn restart_resets_to_raw_iterate() {
        let space = ScalarSpace { lambda: 0.9, z: 0.0 };
        let mut cfg = base_cfg(SegmentingSchedule::HarmonicAverage, 12);
        cfg.restart_every = Some(4);
        let record = mann_mazya_run(&space, 1.0f64, &cfg, None).unwrap();
        // at k = 5 the averaged state equals the raw iterate after 4 steps
        let s5 = record.steps.iter().find(|s| s.k == 5).unwrap();
        assert!(s5.restart);
        assert_eq!(s5.averaged, s5.raw);
        assert!(s5.diff_l2.is_none());
    }

    #[test]
    fn restart_equal_to_plain_when_period_exceeds_budget() {
        let space = ScalarSpace { lambda: 0.8, z: 0.3 };
        let plain = base_cfg(SegmentingSchedule::HarmonicAverage, 20);
        let mut restarted = plain.clone();
        restarted.restart_every = Some(20);
        let a = mann_mazya_run(&space, 0.7f64, &plain, None).unwrap();
        let b = mann_mazya_run(&space, 0.7f64, &restarted, None).unwrap();
        for (x, y) in a.steps.iter().zip(&b.steps) {
            assert_eq!(x.averaged, y.averaged);
            assert_eq!(x.restart, y.restart);
        }
    }

    #[test]
    fn regularized_reconstruct_first_element_is_initial_guess() {
        let space = ScalarSpace { lambda: 0.7, z: 0.0 };
        let r1 = regularized_reconstruct(&space, &0.4, &1.5, 1, &SegmentingSchedule::HarmonicAverage)
            .unwrap();
        assert_eq!(r1, 1.5);
        // R_2 = T_l(φ) + z
        let r2 = regularized_reconstruct(&space, &0.4, &1.5, 2, &SegmentingSchedule::HarmonicAverage)
            .unwrap();
        assert!((r2 - (0.7 * 1.5 + 0.4)).abs() < 1e-15);
    }

    #[test]
    fn reconstruct_norm_bound() {
        // ‖R_{k+1}^0(ψ)‖ ≤ k‖ψ‖ for the zero initial guess
        let space = ScalarSpace { lambda: 0.98, z: 0.0 };
        let psi = 0.37;
        for k in 1..=30 {
            let r = regularized_reconstruct(
                &space,
                &psi,
                &0.0,
                k + 1,
                &SegmentingSchedule::HarmonicAverage,
            )
            .unwrap();
            assert!(r.abs() <= k as f64 * psi.abs() + 1e-12, "k = {k}: {r}");
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let cfg = IterationConfig {
            schedule: SegmentingSchedule::Constant(1.5),
            max_iter: 10,
            stop: StoppingRule::MaxIterOnly,
            restart_every: None,
            record_every: 1,
        };
        assert!(cfg.validate().is_err());
        let cfg = IterationConfig {
            schedule: SegmentingSchedule::Identity,
            max_iter: 10,
            stop: StoppingRule::Discrepancy { mu: 0.5, epsilon: 1.0, norm: StopNorm::Star },
            restart_every: None,
            record_every: 1,
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn divergence_flags_per_kind() {
        assert_eq!(SegmentingSchedule::Identity.divergent_weight_sum(), Some(false));
        assert_eq!(SegmentingSchedule::HarmonicAverage.divergent_weight_sum(), Some(true));
        assert_eq!(SegmentingSchedule::Constant(0.5).divergent_weight_sum(), Some(true));
        assert_eq!(SegmentingSchedule::Constant(1.0).divergent_weight_sum(), Some(false));
        assert!(SegmentingSchedule::Custom(Arc::new(|_| 0.5)).divergent_weight_sum().is_none());
    }

    #[test]
    fn csv_layout_is_stable() {
        let space = ScalarSpace { lambda: 0.6, z: 0.2 };
        let record = mann_mazya_run(
            &space,
            0.0f64,
            &base_cfg(SegmentingSchedule::Identity, 3),
            None,
        )
        .unwrap();
        let csv = history_csv_string(&record);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "k,residual_star,residual_l2,diff_l2,err_star,err_l2,restart_flag"
        );
        assert_eq!(csv.lines().count(), 4);
    }
}
