//! The affine fixed-point operator of the Cauchy data-completion problem and
//! the solution-energy metric on Neumann traces.
//!
//! Given Cauchy data (f, g) on Γ1, the sought Neumann trace φ̄ on Γ2 is the
//! fixed point of `T(φ) = L_d(L_n(φ))`:
//!
//! - `L_n(φ)`: solve `Pu = 0` with `u = f` on Γ1 and conormal derivative φ on
//!   Γ2, return the Dirichlet trace on Γ2;
//! - `L_d(ψ)`: solve `Pu = 0` with conormal derivative g on Γ1 and `u = ψ` on
//!   Γ2, return the conormal flux on Γ2.
//!
//! Extra boundary conditions (the rectangle's lateral sides) are imposed in
//! *both* auxiliary problems with the same data. Both problems share one
//! assembled stiffness matrix and keep their factorizations, so applying `T`
//! costs two back-substitutions.
//!
//! The `*` metric is the energy norm of the lifting `W(φ)` that solves the
//! homogeneous-data problem with Neumann data φ on Γ2; `T`'s linear part is
//! non-expansive and self-adjoint in this metric, which the iteration and
//! stopping theory rely on. On the rectangle the Γ2 corner nodes are pinned
//! by the lateral Dirichlet conditions, so the metric (and the iteration) is
//! blind to corner samples; the annulus has no such degenerate nodes.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bvp::{
    conormal_flux, dirichlet_trace, AssembledSystem, BoundaryCondition, CoefficientField,
    PinnedSystem,
};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryFunction, Grid, Segment};

/// Cauchy data on Γ1 plus any extra conditions on additional segments.
#[derive(Clone)]
pub struct CauchyData {
    /// Dirichlet datum on Γ1.
    pub f: BoundaryFunction,
    /// Neumann (conormal) datum on Γ1.
    pub g: BoundaryFunction,
    /// Conditions on further segments (e.g. the rectangle sides), imposed in
    /// both auxiliary problems.
    pub extra_bc: BTreeMap<Segment, BoundaryCondition>,
}

impl CauchyData {
    pub fn new(f: BoundaryFunction, g: BoundaryFunction) -> Result<Self> {
        Self::with_extra(f, g, BTreeMap::new())
    }

    pub fn with_extra(
        f: BoundaryFunction,
        g: BoundaryFunction,
        extra_bc: BTreeMap<Segment, BoundaryCondition>,
    ) -> Result<Self> {
        if f.segment() != Segment::Gamma1 || g.segment() != Segment::Gamma1 {
            return Err(Error::BoundaryMismatch("Cauchy data must live on Γ1".into()));
        }
        if f.len() != g.len() {
            return Err(Error::BoundaryMismatch(
                "Dirichlet and Neumann data have different lengths".into(),
            ));
        }
        if extra_bc.contains_key(&Segment::Gamma1) || extra_bc.contains_key(&Segment::Gamma2) {
            return Err(Error::InvalidConfig(
                "extra conditions may only sit on segments other than Γ1/Γ2".into(),
            ));
        }
        Ok(Self { f, g, extra_bc })
    }

    /// Same condition pattern with all data set to zero (for linear parts and
    /// the `*` metric).
    fn zeroed(&self, grid: &Grid) -> Result<Self> {
        let mut extra = BTreeMap::new();
        for (&seg, cond) in &self.extra_bc {
            let zero = BoundaryFunction::zero(grid, seg)?;
            extra.insert(
                seg,
                match cond {
                    BoundaryCondition::Dirichlet(_) => BoundaryCondition::Dirichlet(zero),
                    BoundaryCondition::Neumann(_) => BoundaryCondition::Neumann(zero),
                },
            );
        }
        Ok(Self {
            f: BoundaryFunction::zero(grid, Segment::Gamma1)?,
            g: BoundaryFunction::zero(grid, Segment::Gamma1)?,
            extra_bc: extra,
        })
    }
}

/// `T(φ) = L_d(L_n(φ))` with cached factorizations of the two mixed
/// problems. Immutable after construction; safe to share across threads.
pub struct FixedPointOperator {
    assembled: Arc<AssembledSystem>,
    /// Dirichlet on Γ1 (+ extra Dirichlet), Neumann on Γ2: the L_n / W solve.
    sys_n: Arc<PinnedSystem>,
    /// Dirichlet on Γ2 (+ extra Dirichlet), Neumann on Γ1: the L_d solve.
    sys_d: Arc<PinnedSystem>,
    data: CauchyData,
}

impl FixedPointOperator {
    pub fn new(grid: Arc<Grid>, coefficients: CoefficientField, data: CauchyData) -> Result<Self> {
        let assembled = AssembledSystem::assemble(grid, coefficients)?;
        Self::with_system(assembled, data)
    }

    pub fn with_system(assembled: Arc<AssembledSystem>, data: CauchyData) -> Result<Self> {
        let grid = assembled.grid().clone();
        let n_gamma1 = grid.segment_nodes(Segment::Gamma1)?.len();
        if data.f.len() != n_gamma1 {
            return Err(Error::BoundaryMismatch(
                "Cauchy data length does not match the grid".into(),
            ));
        }
        for seg in data.extra_bc.keys() {
            if !grid.domain().has_segment(*seg) {
                return Err(Error::UnknownSegment { segment: *seg });
            }
        }
        let extra_dirichlet: Vec<Segment> = data
            .extra_bc
            .iter()
            .filter(|(_, c)| c.is_dirichlet())
            .map(|(s, _)| *s)
            .collect();
        let mut dir_n = vec![Segment::Gamma1];
        dir_n.extend(&extra_dirichlet);
        let mut dir_d = vec![Segment::Gamma2];
        dir_d.extend(&extra_dirichlet);
        let sys_n = PinnedSystem::new(assembled.clone(), &dir_n)?;
        let sys_d = PinnedSystem::new(assembled.clone(), &dir_d)?;
        Ok(Self { assembled, sys_n, sys_d, data })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.assembled.grid()
    }

    pub fn system(&self) -> &Arc<AssembledSystem> {
        &self.assembled
    }

    pub fn data(&self) -> &CauchyData {
        &self.data
    }

    fn bc_n(&self, phi: &BoundaryFunction) -> BTreeMap<Segment, BoundaryCondition> {
        let mut bc = self.data.extra_bc.clone();
        bc.insert(Segment::Gamma1, BoundaryCondition::Dirichlet(self.data.f.clone()));
        bc.insert(Segment::Gamma2, BoundaryCondition::Neumann(phi.clone()));
        bc
    }

    fn bc_d(&self, psi: &BoundaryFunction) -> BTreeMap<Segment, BoundaryCondition> {
        let mut bc = self.data.extra_bc.clone();
        bc.insert(Segment::Gamma1, BoundaryCondition::Neumann(self.data.g.clone()));
        bc.insert(Segment::Gamma2, BoundaryCondition::Dirichlet(psi.clone()));
        bc
    }

    /// `L_n(φ)`: Dirichlet trace on Γ2 of the first auxiliary problem.
    pub fn apply_ln(&self, phi: &BoundaryFunction) -> Result<BoundaryFunction> {
        self.expect_gamma2(phi)?;
        let sol = self.sys_n.solve_bc(&self.bc_n(phi))?;
        dirichlet_trace(&sol, Segment::Gamma2)
    }

    /// `L_d(ψ)`: conormal flux on Γ2 of the second auxiliary problem.
    pub fn apply_ld(&self, psi: &BoundaryFunction) -> Result<BoundaryFunction> {
        self.expect_gamma2(psi)?;
        let sol = self.sys_d.solve_bc(&self.bc_d(psi))?;
        conormal_flux(&sol, Segment::Gamma2)
    }

    /// `T(φ) = L_d(L_n(φ))`.
    pub fn apply_t(&self, phi: &BoundaryFunction) -> Result<BoundaryFunction> {
        let psi = self.apply_ln(phi)?;
        self.apply_ld(&psi)
    }

    /// `T(φ)` together with the intermediate Dirichlet trace `L_n(φ)` (the
    /// reconstruction of `u` on Γ2 at the current iterate).
    pub fn apply_t_with_trace(
        &self,
        phi: &BoundaryFunction,
    ) -> Result<(BoundaryFunction, BoundaryFunction)> {
        let psi = self.apply_ln(phi)?;
        let t = self.apply_ld(&psi)?;
        Ok((t, psi))
    }

    /// Same operator with different Cauchy data, sharing the cached
    /// factorizations. The extra-condition pattern (which segments are
    /// Dirichlet) must match.
    pub fn with_data(&self, data: CauchyData) -> Result<FixedPointOperator> {
        let pattern = |d: &CauchyData| -> Vec<(Segment, bool)> {
            d.extra_bc.iter().map(|(s, c)| (*s, c.is_dirichlet())).collect()
        };
        if pattern(&self.data) != pattern(&data) {
            return Err(Error::InvalidConfig(
                "extra boundary-condition pattern differs from the cached operator".into(),
            ));
        }
        if data.f.len() != self.data.f.len() {
            return Err(Error::BoundaryMismatch(
                "Cauchy data length does not match the grid".into(),
            ));
        }
        Ok(FixedPointOperator {
            assembled: self.assembled.clone(),
            sys_n: self.sys_n.clone(),
            sys_d: self.sys_d.clone(),
            data,
        })
    }

    /// The linear part `T_l`: this operator with all data zeroed, sharing the
    /// cached factorizations.
    pub fn linear_part(&self) -> FixedPointOperator {
        let data = self
            .data
            .zeroed(self.grid())
            .expect("zeroed data is always compatible with the grid");
        FixedPointOperator {
            assembled: self.assembled.clone(),
            sys_n: self.sys_n.clone(),
            sys_d: self.sys_d.clone(),
            data,
        }
    }

    /// The affine term `z = T(0)`.
    pub fn affine_term(&self) -> Result<BoundaryFunction> {
        let zero = BoundaryFunction::zero(self.grid(), Segment::Gamma2)?;
        self.apply_t(&zero)
    }

    /// The `*` metric backed by this operator's first factorization.
    pub fn star_metric(&self) -> Result<StarMetric> {
        let homogeneous = self.data.zeroed(self.grid())?;
        Ok(StarMetric { sys: self.sys_n.clone(), data: homogeneous })
    }

    /// Rayleigh-quotient estimate of the dominant eigenvalue of `T_l` in the
    /// `*` metric (power iteration). Meaningful on coarse grids only: the
    /// true spectrum accumulates at 1 exponentially fast, so on fine grids
    /// the gap sinks below roundoff.
    pub fn dominant_eigenvalue_star(
        &self,
        start: &BoundaryFunction,
        iterations: usize,
    ) -> Result<f64> {
        let lin = self.linear_part();
        let metric = self.star_metric()?;
        let mut v = start.clone();
        let mut rayleigh = 0.0;
        for _ in 0..iterations {
            let tv = lin.apply_t(&v)?;
            let num = metric.inner(&tv, &v)?;
            let den = metric.inner(&v, &v)?;
            if den == 0.0 {
                return Err(Error::InvalidConfig("power iteration started at zero".into()));
            }
            rayleigh = num / den;
            let scale = 1.0 / metric.norm(&tv)?.max(1e-300);
            v = tv.scale(scale);
        }
        Ok(rayleigh)
    }

    /// Dense matrix of `T_l` in the nodal basis of Γ2 (coarse-grid spectral
    /// diagnostics).
    pub fn assemble_dense_linear_map(&self) -> Result<Vec<Vec<f64>>> {
        let lin = self.linear_part();
        let m = self.grid().segment_nodes(Segment::Gamma2)?.len();
        let mut cols = Vec::with_capacity(m);
        for j in 0..m {
            let mut e = BoundaryFunction::zero(self.grid(), Segment::Gamma2)?;
            e.values_mut()[j] = 1.0;
            cols.push(lin.apply_t(&e)?.values().to_vec());
        }
        // rows of the operator matrix
        let mut rows = vec![vec![0.0; m]; m];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..m {
                rows[i][j] = col[i];
            }
        }
        Ok(rows)
    }

    fn expect_gamma2(&self, bf: &BoundaryFunction) -> Result<()> {
        if bf.segment() != Segment::Gamma2 {
            return Err(Error::BoundaryMismatch("iterates must live on Γ2".into()));
        }
        let n = self.grid().segment_nodes(Segment::Gamma2)?.len();
        if bf.len() != n {
            return Err(Error::BoundaryMismatch("iterate length does not match Γ2".into()));
        }
        Ok(())
    }
}

/// Energy metric on Neumann traces: `‖φ‖² = ∫ |∇W(φ)|²` where `W(φ)` solves
/// the homogeneous mixed problem with Neumann data φ on Γ2.
///
/// Since `W(φ)` vanishes on the Dirichlet part, the inner product collapses
/// to the boundary pairing `⟨φ, ψ⟩ = Σ w_i W(φ)_i ψ_i` over the free Γ2
/// nodes, so one application costs a single back-substitution.
pub struct StarMetric {
    sys: Arc<PinnedSystem>,
    data: CauchyData,
}

impl StarMetric {
    /// The lifting `W(φ)` as a nodal field (exposed for energy diagnostics).
    pub fn lift(&self, phi: &BoundaryFunction) -> Result<crate::bvp::DiscreteSolution> {
        let mut bc = self.data.extra_bc.clone();
        bc.insert(Segment::Gamma1, BoundaryCondition::Dirichlet(self.data.f.clone()));
        bc.insert(Segment::Gamma2, BoundaryCondition::Neumann(phi.clone()));
        self.sys.solve_bc(&bc)
    }

    pub fn inner(&self, phi: &BoundaryFunction, psi: &BoundaryFunction) -> Result<f64> {
        if phi.segment() != Segment::Gamma2 || psi.segment() != Segment::Gamma2 {
            return Err(Error::BoundaryMismatch("the * metric pairs Γ2 traces".into()));
        }
        if phi.len() != psi.len() {
            return Err(Error::BoundaryMismatch("trace length mismatch".into()));
        }
        let w = self.lift(phi)?;
        let assembled = self.sys.assembled();
        let nodes = assembled.segment_nodes(Segment::Gamma2);
        let weights = assembled.segment_weights(Segment::Gamma2);
        let mut acc = 0.0;
        for (pos, (&node, &wq)) in nodes.iter().zip(weights).enumerate() {
            if !self.sys.is_pinned(node) {
                acc += wq * w.values()[node] * psi.values()[pos];
            }
        }
        Ok(acc)
    }

    pub fn norm(&self, phi: &BoundaryFunction) -> Result<f64> {
        Ok(self.inner(phi, phi)?.max(0.0).sqrt())
    }

    pub fn distance(&self, a: &BoundaryFunction, b: &BoundaryFunction) -> Result<f64> {
        self.norm(&a.sub(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bvp::energy_inner_product;
    use crate::geometry::{build_grid, sample_boundary, Domain};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    pub(crate) fn rectangle_paper_operator(n1: usize, n2: usize) -> FixedPointOperator {
        let grid = Arc::new(
            build_grid(Domain::Rectangle { width: 1.0, height: 0.75 }, n1, n2).unwrap(),
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
        FixedPointOperator::new(grid, CoefficientField::laplace(), data).unwrap()
    }

    pub(crate) fn annulus_paper_operator(n1: usize, n2: usize) -> FixedPointOperator {
        let grid = Arc::new(
            build_grid(Domain::Annulus { inner_radius: 1.0, outer_radius: 3.0 }, n1, n2).unwrap(),
        );
        let f = sample_boundary(&grid, Segment::Gamma1, |th| th.sin() - (2.0 * th).sin() / 2.0)
            .unwrap();
        let g = BoundaryFunction::zero(&grid, Segment::Gamma1).unwrap();
        let data = CauchyData::new(f, g).unwrap();
        FixedPointOperator::new(grid, CoefficientField::laplace(), data).unwrap()
    }

    fn random_trace(op: &FixedPointOperator, rng: &mut ChaCha8Rng) -> BoundaryFunction {
        let mut bf = BoundaryFunction::zero(op.grid(), Segment::Gamma2).unwrap();
        for v in bf.values_mut() {
            *v = rng.gen_range(-1.0..1.0);
        }
        bf
    }

    #[test]
    fn zero_data_fixed_point_is_zero() {
        let op = rectangle_paper_operator(17, 13).linear_part();
        let zero = BoundaryFunction::zero(op.grid(), Segment::Gamma2).unwrap();
        let t0 = op.apply_t(&zero).unwrap();
        assert!(t0.norm_l2() < 1e-12);
        let ln0 = op.apply_ln(&zero).unwrap();
        assert!(ln0.norm_l2() < 1e-12);
    }

    #[test]
    fn affine_structure() {
        let op = rectangle_paper_operator(17, 13);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p1 = random_trace(&op, &mut rng);
        let p2 = random_trace(&op, &mut rng);

        // L_n(φ1+φ2) − L_n(φ1) − L_n(φ2) + L_n(0) = 0
        let zero = BoundaryFunction::zero(op.grid(), Segment::Gamma2).unwrap();
        let sum = BoundaryFunction::linear_comb(1.0, &p1, 1.0, &p2);
        let lhs = BoundaryFunction::linear_comb(
            1.0,
            &op.apply_ln(&sum).unwrap().sub(&op.apply_ln(&p1).unwrap()),
            -1.0,
            &op.apply_ln(&p2).unwrap().sub(&op.apply_ln(&zero).unwrap()),
        );
        assert!(lhs.norm_l2() < 1e-10, "{}", lhs.norm_l2());

        // T(φ) − T_l(φ) = z independent of φ
        let lin = op.linear_part();
        let z = op.affine_term().unwrap();
        for phi in [&p1, &p2] {
            let diff = op.apply_t(phi).unwrap().sub(&lin.apply_t(phi).unwrap());
            assert!(diff.sub(&z).norm_l2() < 1e-10 * (1.0 + z.norm_l2()));
        }

        // T_l(0) = 0 and z = T(0)
        assert!(lin.apply_t(&zero).unwrap().norm_l2() < 1e-12);
        assert!(op.apply_t(&zero).unwrap().sub(&z).norm_l2() < 1e-14);
    }

    #[test]
    fn ln_of_exact_flux_returns_exact_trace() {
        let op = rectangle_paper_operator(65, 49);
        let grid = op.grid();
        let flux = sample_boundary(grid, Segment::Gamma2, |x| {
            PI * (0.75 * PI).sinh() * (PI * x).sin()
        })
        .unwrap();
        let trace = op.apply_ln(&flux).unwrap();
        let exact =
            sample_boundary(grid, Segment::Gamma2, |x| (0.75 * PI).cosh() * (PI * x).sin())
                .unwrap();
        let rel = trace.distance_l2(&exact) / exact.norm_l2();
        assert!(rel < 1e-3, "relative error {rel}");
    }

    #[test]
    fn ld_of_exact_trace_returns_exact_flux() {
        let op = rectangle_paper_operator(65, 49);
        let grid = op.grid();
        let trace =
            sample_boundary(grid, Segment::Gamma2, |x| (0.75 * PI).cosh() * (PI * x).sin())
                .unwrap();
        let flux = op.apply_ld(&trace).unwrap();
        let exact = sample_boundary(grid, Segment::Gamma2, |x| {
            PI * (0.75 * PI).sinh() * (PI * x).sin()
        })
        .unwrap();
        let rel = flux.distance_l2(&exact) / exact.norm_l2();
        assert!(rel < 2e-3, "relative error {rel}");
    }

    #[test]
    fn annulus_ld_matches_closed_form() {
        let op = annulus_paper_operator(33, 64);
        let grid = op.grid();
        // trace of ū at r = 3: (5/3)sinθ − (41/18)sin2θ
        let trace = sample_boundary(grid, Segment::Gamma2, |th| {
            (5.0 / 3.0) * th.sin() - (41.0 / 18.0) * (2.0 * th).sin()
        })
        .unwrap();
        let flux = op.apply_ld(&trace).unwrap();
        // ∂r ū at r = 3: (4/9)sinθ − (40/27)sin2θ
        let exact = sample_boundary(grid, Segment::Gamma2, |th| {
            (4.0 / 9.0) * th.sin() - (40.0 / 27.0) * (2.0 * th).sin()
        })
        .unwrap();
        let rel = flux.distance_l2(&exact) / exact.norm_l2();
        assert!(rel < 5e-3, "relative error {rel}");
    }

    #[test]
    fn star_metric_axioms() {
        let op = annulus_paper_operator(17, 24);
        let metric = op.star_metric().unwrap();
        let zero = BoundaryFunction::zero(op.grid(), Segment::Gamma2).unwrap();
        assert_eq!(metric.norm(&zero).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let a = random_trace(&op, &mut rng);
            let b = random_trace(&op, &mut rng);
            let na = metric.norm(&a).unwrap();
            let nb = metric.norm(&b).unwrap();
            let ip = metric.inner(&a, &b).unwrap();
            assert!(na > 0.0);
            // symmetry and Cauchy-Schwarz
            let ip2 = metric.inner(&b, &a).unwrap();
            assert!((ip - ip2).abs() <= 1e-10 * na * nb);
            assert!(ip.abs() <= na * nb * (1.0 + 1e-10));
        }
    }

    #[test]
    fn star_inner_matches_energy_of_liftings() {
        let op = annulus_paper_operator(13, 16);
        let metric = op.star_metric().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_trace(&op, &mut rng);
        let b = random_trace(&op, &mut rng);
        let wa = metric.lift(&a).unwrap();
        let wb = metric.lift(&b).unwrap();
        let by_energy = energy_inner_product(&wa, &wb).unwrap();
        let by_pairing = metric.inner(&a, &b).unwrap();
        assert!(
            (by_energy - by_pairing).abs() <= 1e-10 * by_energy.abs().max(1.0),
            "{by_energy} vs {by_pairing}"
        );
    }

    #[test]
    fn linear_part_nonexpansive_sample() {
        let op = rectangle_paper_operator(33, 25);
        let lin = op.linear_part();
        let metric = op.star_metric().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let phi = random_trace(&op, &mut rng);
            let n0 = metric.norm(&phi).unwrap();
            let n1 = metric.norm(&lin.apply_t(&phi).unwrap()).unwrap();
            assert!(n1 <= n0 * (1.0 + 1e-6), "{n1} vs {n0}");
        }
    }

    #[test]
    fn linear_part_self_adjoint_in_star_metric() {
        for op in [rectangle_paper_operator(17, 13), annulus_paper_operator(9, 16)] {
            let lin = op.linear_part();
            let metric = op.star_metric().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            for _ in 0..5 {
                let a = random_trace(&op, &mut rng);
                let b = random_trace(&op, &mut rng);
                let ta = lin.apply_t(&a).unwrap();
                let tb = lin.apply_t(&b).unwrap();
                let lhs = metric.inner(&ta, &b).unwrap();
                let rhs = metric.inner(&a, &tb).unwrap();
                let scale = metric.norm(&a).unwrap() * metric.norm(&b).unwrap();
                assert!((lhs - rhs).abs() <= 1e-8 * scale, "{lhs} vs {rhs} (scale {scale})");
            }
        }
    }

    #[test]
    fn spectrum_contained_in_unit_interval() {
        // Coarse grids: the spectral gap to 1 is resolvable in f64 there.
        let op = rectangle_paper_operator(8, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let start = random_trace(&op, &mut rng);
        let dom = op.dominant_eigenvalue_star(&start, 60).unwrap();
        assert!(dom > 0.0 && dom < 1.0 - 1e-9, "dominant eigenvalue {dom}");

        let op = annulus_paper_operator(9, 16);
        let start = random_trace(&op, &mut rng);
        let dom = op.dominant_eigenvalue_star(&start, 60).unwrap();
        assert!(dom > 0.0 && dom < 1.0 - 1e-8, "dominant eigenvalue {dom}");
    }

    #[test]
    fn mode_one_eigenvalue_matches_analytic() {
        // On the rectangle the first sine mode is an exact invariant
        // direction; its eigenvalue approaches tanh(3π/4)².
        let op = rectangle_paper_operator(33, 25);
        let lin = op.linear_part();
        let metric = op.star_metric().unwrap();
        let e1 = sample_boundary(op.grid(), Segment::Gamma2, |x| (PI * x).sin()).unwrap();
        let te1 = lin.apply_t(&e1).unwrap();
        let lambda = metric.inner(&te1, &e1).unwrap() / metric.inner(&e1, &e1).unwrap();
        let analytic = (0.75 * PI).tanh().powi(2);
        assert!((lambda - analytic).abs() < 1e-2, "{lambda} vs {analytic}");
    }

    #[test]
    fn dense_map_is_consistent_with_apply() {
        let op = annulus_paper_operator(7, 12);
        let lin = op.linear_part();
        let rows = op.assemble_dense_linear_map().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = random_trace(&op, &mut rng);
        let by_apply = lin.apply_t(&phi).unwrap();
        for (i, row) in rows.iter().enumerate() {
            let s: f64 = row.iter().zip(phi.values()).map(|(m, v)| m * v).sum();
            assert!((s - by_apply.values()[i]).abs() < 1e-9);
        }
    }
}
