//! Assembly and solution of mixed boundary value problems for the elliptic
//! operator `P u = -div(A ∇u)` on the two supported grids.
//!
//! The discrete bilinear form is assembled as one symmetric sparse matrix `K`
//! over *all* nodes. The divergence-form terms `a11`, `a22` use a
//! finite-volume five-point scheme (edge fluxes with midpoint-sampled
//! coefficients, half-cells at boundaries); on the annulus the same scheme is
//! applied to the metric-transformed coefficients, which for the Laplacian
//! reduces to the classical polar stencil with `r` and `1/r` factors. When
//! the transformed coefficient matrix has off-diagonal entries, the cross
//! term is added from a bilinear-element quadrature, which keeps `K`
//! symmetric and second-order consistent.
//!
//! Neumann data enters the load vector through the boundary quadrature
//! weights (the finite-volume face lengths); Dirichlet data pins nodes by
//! symmetric elimination. The conormal flux of a computed solution is
//! recovered variationally: at a boundary node `i`, `(K u)_i` equals the
//! boundary functional `∫ (A∇u)·ν v_i`, so dividing by the node weight gives
//! the flux sample that makes the discrete weak identity exact.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryFunction, Domain, Grid, Segment};
use crate::linalg::{Csr, SpdSolver, Triplets};

type CoefFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum CoefKind {
    /// A = a(x)·I: never produces cross terms, on either grid.
    IsotropicScalar,
    /// Diagonal in Cartesian coordinates (cross terms appear on the annulus).
    Diagonal,
    /// Full symmetric matrix.
    Full,
}

/// Symmetric coefficient matrix field `A(x)` with its ellipticity constant.
#[derive(Clone)]
pub struct CoefficientField {
    a11: CoefFn,
    a12: CoefFn,
    a22: CoefFn,
    alpha: f64,
    kind: CoefKind,
}

impl CoefficientField {
    /// The Laplace operator: A = I, α = 1.
    pub fn laplace() -> Self {
        Self {
            a11: Arc::new(|_, _| 1.0),
            a12: Arc::new(|_, _| 0.0),
            a22: Arc::new(|_, _| 1.0),
            alpha: 1.0,
            kind: CoefKind::IsotropicScalar,
        }
    }

    /// A = a(x)·I.
    pub fn isotropic<F>(a: F, alpha: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let a = Arc::new(a);
        let a2 = a.clone();
        Self {
            a11: a,
            a12: Arc::new(|_, _| 0.0),
            a22: a2,
            alpha,
            kind: CoefKind::IsotropicScalar,
        }
    }

    pub fn diagonal<F, G>(a11: F, a22: G, alpha: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            a11: Arc::new(a11),
            a12: Arc::new(|_, _| 0.0),
            a22: Arc::new(a22),
            alpha,
            kind: CoefKind::Diagonal,
        }
    }

    pub fn full<F, G, H>(a11: F, a12: G, a22: H, alpha: f64) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        H: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            a11: Arc::new(a11),
            a12: Arc::new(a12),
            a22: Arc::new(a22),
            alpha,
            kind: CoefKind::Full,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// A(x, y) as [[a11, a12], [a12, a22]].
    pub fn eval(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let a11 = (self.a11)(x, y);
        let a12 = (self.a12)(x, y);
        let a22 = (self.a22)(x, y);
        [[a11, a12], [a12, a22]]
    }

    fn min_eigenvalue(&self, x: f64, y: f64) -> f64 {
        let a = self.eval(x, y);
        let tr = a[0][0] + a[1][1];
        let gap = ((a[0][0] - a[1][1]).powi(2) + 4.0 * a[0][1] * a[0][1]).sqrt();
        0.5 * (tr - gap)
    }

    /// Checks `ξᵀA(x)ξ ≥ α‖ξ‖²` at every grid node by sampling eigenvalues.
    pub fn check_ellipticity(&self, grid: &Grid) -> Result<()> {
        for i2 in 0..grid.n2() {
            for i1 in 0..grid.n1() {
                let (x, y) = grid.position(i1, i2);
                let min_eig = self.min_eigenvalue(x, y);
                if min_eig < self.alpha * (1.0 - 1e-12) {
                    return Err(Error::EllipticityViolated { x, y, min_eig, alpha: self.alpha });
                }
            }
        }
        Ok(())
    }

    /// Coefficient matrix in logical coordinates: the identity map on the
    /// rectangle, `r · J⁻¹ A J⁻ᵀ` on the annulus (metric terms of the polar
    /// form).
    fn logical_eval(&self, grid: &Grid, l1: f64, l2: f64) -> [[f64; 2]; 2] {
        match grid.domain() {
            Domain::Rectangle { .. } => self.eval(l1, l2),
            Domain::Annulus { .. } => {
                let (r, th) = (l1, l2);
                let (s, c) = th.sin_cos();
                let a = self.eval(r * c, r * s);
                // rows of J⁻¹ in the (r, θ) chart
                let row1 = [c, s];
                let row2 = [-s / r, c / r];
                let quad = |u: [f64; 2], v: [f64; 2]| {
                    u[0] * (a[0][0] * v[0] + a[0][1] * v[1])
                        + u[1] * (a[1][0] * v[0] + a[1][1] * v[1])
                };
                [
                    [r * quad(row1, row1), r * quad(row1, row2)],
                    [r * quad(row2, row1), r * quad(row2, row2)],
                ]
            }
        }
    }

    fn has_logical_cross(&self, grid: &Grid) -> bool {
        match grid.domain() {
            Domain::Rectangle { .. } => self.kind == CoefKind::Full,
            Domain::Annulus { .. } => self.kind != CoefKind::IsotropicScalar,
        }
    }
}

/// One boundary condition for a segment.
#[derive(Debug, Clone)]
pub enum BoundaryCondition {
    Dirichlet(BoundaryFunction),
    Neumann(BoundaryFunction),
}

impl BoundaryCondition {
    pub fn data(&self) -> &BoundaryFunction {
        match self {
            BoundaryCondition::Dirichlet(f) | BoundaryCondition::Neumann(f) => f,
        }
    }

    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet(_))
    }
}

/// Complete specification of one mixed boundary value problem.
pub struct MixedBvpSpec {
    pub grid: Arc<Grid>,
    pub coefficients: CoefficientField,
    pub bc: BTreeMap<Segment, BoundaryCondition>,
}

impl MixedBvpSpec {
    pub fn new(
        grid: Arc<Grid>,
        coefficients: CoefficientField,
        bc: BTreeMap<Segment, BoundaryCondition>,
    ) -> Result<Self> {
        let segs = grid.domain().segments();
        if bc.len() != segs.len() || !segs.iter().all(|s| bc.contains_key(s)) {
            return Err(Error::InvalidConfig(
                "every boundary segment needs exactly one condition".into(),
            ));
        }
        if !bc.values().any(|c| c.is_dirichlet()) {
            return Err(Error::SingularSystem);
        }
        for (seg, cond) in &bc {
            let data = cond.data();
            if data.segment() != *seg || data.len() != grid.segment_nodes(*seg)?.len() {
                return Err(Error::BoundaryMismatch(format!(
                    "condition data does not match segment {seg}"
                )));
            }
        }
        Ok(Self { grid, coefficients, bc })
    }
}

/// The assembled symmetric stiffness matrix of a (grid, coefficients) pair,
/// plus the boundary bookkeeping shared by every solve on it.
pub struct AssembledSystem {
    grid: Arc<Grid>,
    coefficients: CoefficientField,
    k: Csr,
    seg_nodes: BTreeMap<Segment, Vec<usize>>,
    seg_weights: BTreeMap<Segment, Vec<f64>>,
    /// For each node, every (segment, position) of a closed segment list the
    /// node belongs to.
    memberships: Vec<Vec<(Segment, usize)>>,
}

impl AssembledSystem {
    pub fn assemble(grid: Arc<Grid>, coefficients: CoefficientField) -> Result<Arc<Self>> {
        coefficients.check_ellipticity(&grid)?;
        let n = grid.node_count();
        let mut t = Triplets::new(n);
        assemble_divergence_part(&grid, &coefficients, &mut t);
        if coefficients.has_logical_cross(&grid) {
            assemble_cross_part(&grid, &coefficients, &mut t);
        }
        let k = t.into_csr();

        let mut seg_nodes = BTreeMap::new();
        let mut seg_weights = BTreeMap::new();
        let mut memberships = vec![Vec::new(); n];
        for &seg in grid.domain().segments() {
            let nodes = grid.segment_nodes(seg)?;
            let weights = grid.segment_weights(seg)?;
            for (pos, &node) in nodes.iter().enumerate() {
                memberships[node].push((seg, pos));
            }
            seg_nodes.insert(seg, nodes);
            seg_weights.insert(seg, weights);
        }
        Ok(Arc::new(Self { grid, coefficients, k, seg_nodes, seg_weights, memberships }))
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn coefficients(&self) -> &CoefficientField {
        &self.coefficients
    }

    pub fn stiffness(&self) -> &Csr {
        &self.k
    }

    pub fn segment_nodes(&self, seg: Segment) -> &[usize] {
        &self.seg_nodes[&seg]
    }

    pub fn segment_weights(&self, seg: Segment) -> &[f64] {
        &self.seg_weights[&seg]
    }
}

fn assemble_divergence_part(grid: &Grid, coef: &CoefficientField, t: &mut Triplets) {
    let (n1, n2) = (grid.n1(), grid.n2());
    let (h1, h2) = (grid.h1(), grid.h2());
    let periodic = grid.is_annulus();

    // direction-1 edges (x on the rectangle, r on the annulus)
    for i2 in 0..n2 {
        let t2 = if periodic {
            h2
        } else if i2 == 0 || i2 == n2 - 1 {
            0.5 * h2
        } else {
            h2
        };
        for i1 in 0..n1 - 1 {
            let (l1a, l2a) = grid.logical(i1, i2);
            let b = coef.logical_eval(grid, l1a + 0.5 * h1, l2a);
            let c = b[0][0] * t2 / h1;
            let (p, q) = (grid.index(i1, i2), grid.index(i1 + 1, i2));
            t.push(p, p, c);
            t.push(q, q, c);
            t.push_sym(p, q, -c);
        }
    }

    // direction-2 edges (y on the rectangle, θ on the annulus, periodic)
    let i2_edges = if periodic { n2 } else { n2 - 1 };
    for i1 in 0..n1 {
        let t1 = if i1 == 0 || i1 == n1 - 1 { 0.5 * h1 } else { h1 };
        for e in 0..i2_edges {
            let i2a = e;
            let i2b = if periodic { (e + 1) % n2 } else { e + 1 };
            let (l1a, l2a) = grid.logical(i1, i2a);
            let b = coef.logical_eval(grid, l1a, l2a + 0.5 * h2);
            let c = b[1][1] * t1 / h2;
            let (p, q) = (grid.index(i1, i2a), grid.index(i1, i2b));
            t.push(p, p, c);
            t.push(q, q, c);
            t.push_sym(p, q, -c);
        }
    }
}

/// Adds the off-diagonal (cross) part of the logical coefficient matrix with
/// a bilinear-element 2x2 Gauss quadrature per cell.
fn assemble_cross_part(grid: &Grid, coef: &CoefficientField, t: &mut Triplets) {
    let (n1, n2) = (grid.n1(), grid.n2());
    let (h1, h2) = (grid.h1(), grid.h2());
    let periodic = grid.is_annulus();
    let g = 0.5 / 3f64.sqrt();
    let gauss = [0.5 - g, 0.5 + g];

    let cells2 = if periodic { n2 } else { n2 - 1 };
    for c1 in 0..n1 - 1 {
        for c2 in 0..cells2 {
            let c2b = if periodic { (c2 + 1) % n2 } else { c2 + 1 };
            let nodes = [
                grid.index(c1, c2),
                grid.index(c1 + 1, c2),
                grid.index(c1, c2b),
                grid.index(c1 + 1, c2b),
            ];
            let (l1o, l2o) = grid.logical(c1, c2);
            let mut local = [[0.0f64; 4]; 4];
            for &gx in &gauss {
                for &gy in &gauss {
                    let b = coef.logical_eval(grid, l1o + gx * h1, l2o + gy * h2);
                    let b12 = b[0][1];
                    if b12 == 0.0 {
                        continue;
                    }
                    let w = 0.25 * h1 * h2 * b12;
                    // gradients of the four bilinear basis functions at (gx, gy)
                    let d1 = [-(1.0 - gy) / h1, (1.0 - gy) / h1, -gy / h1, gy / h1];
                    let d2 = [-(1.0 - gx) / h2, -gx / h2, (1.0 - gx) / h2, gx / h2];
                    for a in 0..4 {
                        for bix in 0..4 {
                            local[a][bix] += w * (d1[a] * d2[bix] + d2[a] * d1[bix]);
                        }
                    }
                }
            }
            for a in 0..4 {
                for bix in 0..4 {
                    if local[a][bix] != 0.0 {
                        t.push(nodes[a], nodes[bix], local[a][bix]);
                    }
                }
            }
        }
    }
}

/// One Dirichlet pinning pattern of an assembled system, with its factorized
/// reduced matrix. Cheap to solve repeatedly for varying boundary data.
pub struct PinnedSystem {
    assembled: Arc<AssembledSystem>,
    dirichlet: Vec<Segment>,
    /// node -> (segment providing the Dirichlet value, position in its node
    /// list); vertical segments win at rectangle corners
    pinned_source: Vec<Option<(Segment, usize)>>,
    unknowns: Vec<usize>,
    reduced: Csr,
    solver: SpdSolver,
}

impl PinnedSystem {
    pub fn new(assembled: Arc<AssembledSystem>, dirichlet: &[Segment]) -> Result<Arc<Self>> {
        if dirichlet.is_empty() {
            return Err(Error::SingularSystem);
        }
        let grid = assembled.grid().clone();
        for &seg in dirichlet {
            if !grid.domain().has_segment(seg) {
                return Err(Error::UnknownSegment { segment: seg });
            }
        }
        let n = grid.node_count();
        let mut pinned_source: Vec<Option<(Segment, usize)>> = vec![None; n];
        // horizontal segments first so that Γ3/Γ4 overwrite shared corners
        let order = [Segment::Gamma1, Segment::Gamma2, Segment::Gamma3, Segment::Gamma4];
        for seg in order {
            if !dirichlet.contains(&seg) {
                continue;
            }
            for (pos, &node) in assembled.segment_nodes(seg).iter().enumerate() {
                pinned_source[node] = Some((seg, pos));
            }
        }
        let unknowns: Vec<usize> = (0..n).filter(|&i| pinned_source[i].is_none()).collect();
        let reduced = assembled.stiffness().restrict(&unknowns);
        let solver = SpdSolver::new(reduced.clone())?;
        let mut d = dirichlet.to_vec();
        d.sort_unstable();
        Ok(Arc::new(Self { assembled, dirichlet: d, pinned_source, unknowns, reduced, solver }))
    }

    pub fn assembled(&self) -> &Arc<AssembledSystem> {
        &self.assembled
    }

    pub fn dirichlet_segments(&self) -> &[Segment] {
        &self.dirichlet
    }

    pub fn unknown_count(&self) -> usize {
        self.unknowns.len()
    }

    /// Whether a node is Dirichlet-pinned under this pattern.
    pub fn is_pinned(&self, node: usize) -> bool {
        self.pinned_source[node].is_some()
    }

    /// Solves for the given boundary conditions. The Dirichlet/Neumann split
    /// of `bc` must match this pinning pattern.
    pub fn solve_bc(
        self: &Arc<Self>,
        bc: &BTreeMap<Segment, BoundaryCondition>,
    ) -> Result<DiscreteSolution> {
        let assembled = &self.assembled;
        let grid = assembled.grid();
        let mut dir: Vec<Segment> =
            bc.iter().filter(|(_, c)| c.is_dirichlet()).map(|(s, _)| *s).collect();
        dir.sort_unstable();
        if dir != self.dirichlet {
            return Err(Error::InvalidConfig(
                "boundary-condition pattern does not match the factorized system".into(),
            ));
        }
        for (seg, cond) in bc {
            if cond.data().len() != assembled.segment_nodes(*seg).len() {
                return Err(Error::BoundaryMismatch(format!("data length mismatch on {seg}")));
            }
        }
        let n = grid.node_count();
        let mut x = vec![0.0f64; n];
        for (node, src) in self.pinned_source.iter().enumerate() {
            if let Some((seg, pos)) = src {
                x[node] = bc[seg].data().values()[*pos];
            }
        }
        let mut b = vec![0.0f64; n];
        for (seg, cond) in bc {
            if let BoundaryCondition::Neumann(g) = cond {
                let nodes = assembled.segment_nodes(*seg);
                let w = assembled.segment_weights(*seg);
                for (pos, &node) in nodes.iter().enumerate() {
                    if self.pinned_source[node].is_none() {
                        b[node] += w[pos] * g.values()[pos];
                    }
                }
            }
        }
        // rhs_u = b_u - (K x_d)_u
        let kx = assembled.stiffness().matvec_alloc(&x);
        let rhs: Vec<f64> = self.unknowns.iter().map(|&i| b[i] - kx[i]).collect();
        let y = self.solver.solve(&rhs)?;
        // residual guard (mostly for the iterative path)
        let mut check = vec![0.0; y.len()];
        self.reduced.matvec(&y, &mut check);
        let rnorm = rhs
            .iter()
            .zip(&check)
            .map(|(r, c)| (r - c) * (r - c))
            .sum::<f64>()
            .sqrt();
        let scale = rhs.iter().map(|r| r * r).sum::<f64>().sqrt().max(1e-300);
        if rnorm > 1e-8 * scale {
            return Err(Error::SolverDivergence(format!(
                "post-solve residual {:.3e} relative to rhs",
                rnorm / scale
            )));
        }
        for (r, &node) in self.unknowns.iter().enumerate() {
            x[node] = y[r];
        }
        Ok(DiscreteSolution {
            values: x,
            ctx: Arc::new(SolveContext { pinned: self.clone(), bc: bc.clone() }),
        })
    }
}

struct SolveContext {
    pinned: Arc<PinnedSystem>,
    bc: BTreeMap<Segment, BoundaryCondition>,
}

/// Nodal solution of one mixed problem, keeping a handle to the assembled
/// system that produced it.
#[derive(Clone)]
pub struct DiscreteSolution {
    values: Vec<f64>,
    ctx: Arc<SolveContext>,
}

/// Assembles and solves one mixed problem from scratch. Repeated solves on
/// the same grid should assemble once and use [`PinnedSystem::solve_bc`].
pub fn solve_mixed(spec: &MixedBvpSpec) -> Result<DiscreteSolution> {
    let assembled = AssembledSystem::assemble(spec.grid.clone(), spec.coefficients.clone())?;
    let dirichlet: Vec<Segment> =
        spec.bc.iter().filter(|(_, c)| c.is_dirichlet()).map(|(s, _)| *s).collect();
    let pinned = PinnedSystem::new(assembled, &dirichlet)?;
    pinned.solve_bc(&spec.bc)
}

impl DiscreteSolution {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.ctx.pinned.assembled().grid()
    }

    pub fn system(&self) -> &Arc<AssembledSystem> {
        self.ctx.pinned.assembled()
    }

    /// a·u + b·v sharing u's system (for bilinearity checks and diagnostics).
    pub fn linear_comb(a: f64, u: &Self, b: f64, v: &Self) -> Result<Self> {
        if !Arc::ptr_eq(u.ctx.pinned.assembled(), v.ctx.pinned.assembled()) {
            return Err(Error::GridMismatch);
        }
        let values = u.values.iter().zip(&v.values).map(|(x, y)| a * x + b * y).collect();
        Ok(Self { values, ctx: u.ctx.clone() })
    }
}

/// Restriction of the nodal values to a boundary segment.
pub fn dirichlet_trace(sol: &DiscreteSolution, segment: Segment) -> Result<BoundaryFunction> {
    let assembled = sol.ctx.pinned.assembled();
    let grid = assembled.grid();
    if !grid.domain().has_segment(segment) {
        return Err(Error::UnknownSegment { segment });
    }
    let values = assembled.segment_nodes(segment).iter().map(|&n| sol.values[n]).collect();
    BoundaryFunction::from_values(grid, segment, values)
}

/// Discrete conormal derivative `(A∇u)·ν` on a segment, recovered from the
/// stiffness residual (consistent flux). Rectangle corner nodes that are
/// pinned by a transverse Dirichlet segment carry an unknown reaction force,
/// so their flux sample falls back to one-sided differences.
pub fn conormal_flux(sol: &DiscreteSolution, segment: Segment) -> Result<BoundaryFunction> {
    let assembled = sol.ctx.pinned.assembled();
    let grid = assembled.grid();
    if !grid.domain().has_segment(segment) {
        return Err(Error::UnknownSegment { segment });
    }
    let ku = assembled.stiffness().matvec_alloc(&sol.values);
    let nodes = assembled.segment_nodes(segment);
    let weights = assembled.segment_weights(segment);
    let mut flux = vec![0.0f64; nodes.len()];
    for (pos, (&node, &w)) in nodes.iter().zip(weights).enumerate() {
        let pinned_elsewhere = match sol.ctx.pinned.pinned_source[node] {
            Some((src, _)) => src != segment,
            None => false,
        };
        if pinned_elsewhere {
            flux[pos] = one_sided_conormal(sol, segment, node);
            continue;
        }
        let mut resid = ku[node];
        for &(other, opos) in &assembled.memberships[node] {
            if other == segment {
                continue;
            }
            if let Some(BoundaryCondition::Neumann(g)) = sol.ctx.bc.get(&other) {
                resid -= assembled.segment_weights(other)[opos] * g.values()[opos];
            }
        }
        flux[pos] = resid / w;
    }
    BoundaryFunction::from_values(grid, segment, flux)
}

/// Second-order one-sided/central gradient at a rectangle boundary node,
/// contracted with the outward conormal of `segment`.
fn one_sided_conormal(sol: &DiscreteSolution, segment: Segment, node: usize) -> f64 {
    let assembled = sol.ctx.pinned.assembled();
    let grid = assembled.grid();
    let n1 = grid.n1();
    let i = node % n1;
    let j = node / n1;
    let u = |i: usize, j: usize| sol.values[grid.index(i, j)];
    let dx = {
        let h = grid.h1();
        if i == 0 {
            (-3.0 * u(0, j) + 4.0 * u(1, j) - u(2, j)) / (2.0 * h)
        } else if i == n1 - 1 {
            (3.0 * u(i, j) - 4.0 * u(i - 1, j) + u(i - 2, j)) / (2.0 * h)
        } else {
            (u(i + 1, j) - u(i - 1, j)) / (2.0 * h)
        }
    };
    let dy = {
        let h = grid.h2();
        let n2 = grid.n2();
        if j == 0 {
            (-3.0 * u(i, 0) + 4.0 * u(i, 1) - u(i, 2)) / (2.0 * h)
        } else if j == n2 - 1 {
            (3.0 * u(i, j) - 4.0 * u(i, j - 1) + u(i, j - 2)) / (2.0 * h)
        } else {
            (u(i, j + 1) - u(i, j - 1)) / (2.0 * h)
        }
    };
    let (x, y) = grid.position(i, j);
    let a = assembled.coefficients().eval(x, y);
    let grad_a = [a[0][0] * dx + a[0][1] * dy, a[1][0] * dx + a[1][1] * dy];
    let nu = match segment {
        Segment::Gamma1 => [0.0, -1.0],
        Segment::Gamma2 => [0.0, 1.0],
        Segment::Gamma3 => [-1.0, 0.0],
        Segment::Gamma4 => [1.0, 0.0],
    };
    grad_a[0] * nu[0] + grad_a[1] * nu[1]
}

/// Stiffness quadratic form `uᵀ K v`, the discrete `∫ A∇u·∇v`.
pub fn energy_inner_product(u: &DiscreteSolution, v: &DiscreteSolution) -> Result<f64> {
    if !Arc::ptr_eq(u.ctx.pinned.assembled(), v.ctx.pinned.assembled()) {
        return Err(Error::GridMismatch);
    }
    let kv = u.system().stiffness().matvec_alloc(&v.values);
    Ok(crate::linalg::dot(&u.values, &kv))
}
