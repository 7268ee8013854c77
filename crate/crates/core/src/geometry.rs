//! Computational domains, structured grids and sampled boundary functions.
//!
//! Two domains are supported: an axis-aligned rectangle with four boundary
//! segments (Γ1 bottom, Γ2 top, Γ3 left, Γ4 right) and an annulus with two
//! (Γ1 inner circle, Γ2 outer circle). Grids are uniform tensor grids; the
//! annulus is periodic in the angular direction with nodes θ_i = 2πi/n2 and
//! no duplicated seam node.
//!
//! Boundary functions are nodal samples on a segment together with
//! composite-trapezoid quadrature weights (periodic trapezoid on circles).
//! On the rectangle the per-segment node lists are the closed edges, so a
//! horizontal segment of a grid with `n1` nodes per row carries `n1` samples
//! including the corner columns. Corner nodes are *owned* by the vertical
//! segments: whenever boundary conditions conflict at a corner, the value of
//! Γ3/Γ4 wins (see [`Grid::owned_segment_of`]).

use std::fmt;

use crate::error::{Error, Result};

/// Boundary segment identifier.
///
/// Rectangle: Γ1 bottom, Γ2 top, Γ3 left, Γ4 right.
/// Annulus: Γ1 inner circle, Γ2 outer circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Segment {
    Gamma1,
    Gamma2,
    Gamma3,
    Gamma4,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Segment::Gamma1 => "Γ1",
            Segment::Gamma2 => "Γ2",
            Segment::Gamma3 => "Γ3",
            Segment::Gamma4 => "Γ4",
        };
        f.write_str(s)
    }
}

/// Supported computational domains.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Rectangle { width: f64, height: f64 },
    Annulus { inner_radius: f64, outer_radius: f64 },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Rectangle { width, height } => {
                if !(width > 0.0 && height > 0.0) {
                    return Err(Error::InvalidDomain(format!(
                        "rectangle needs positive sides, got {width} x {height}"
                    )));
                }
            }
            Domain::Annulus { inner_radius, outer_radius } => {
                if !(inner_radius > 0.0 && inner_radius < outer_radius) {
                    return Err(Error::InvalidDomain(format!(
                        "annulus needs 0 < inner < outer, got {inner_radius}, {outer_radius}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Ordered list of boundary segments of this domain.
    pub fn segments(&self) -> &'static [Segment] {
        match self {
            Domain::Rectangle { .. } => {
                &[Segment::Gamma1, Segment::Gamma2, Segment::Gamma3, Segment::Gamma4]
            }
            Domain::Annulus { .. } => &[Segment::Gamma1, Segment::Gamma2],
        }
    }

    pub fn has_segment(&self, segment: Segment) -> bool {
        self.segments().contains(&segment)
    }
}

/// Uniform tensor grid on a [`Domain`].
///
/// Node indexing: rectangle nodes `(i, j)` map to `j*n1 + i` with `x = i*h1`,
/// `y = j*h2`; annulus nodes `(k, i)` map to `k*n2 + i` with `r = r_in + k*h1`
/// and `θ = i*h2` (angular index fastest, so the matrix bandwidth is `n2`).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: Domain,
    n1: usize,
    n2: usize,
    h1: f64,
    h2: f64,
}

/// Builds a uniform tensor grid.
///
/// For the rectangle `n1`/`n2` count nodes in x/y; for the annulus they count
/// radial/angular nodes.
pub fn build_grid(domain: Domain, n1: usize, n2: usize) -> Result<Grid> {
    domain.validate()?;
    if n1 < 3 || n2 < 3 {
        return Err(Error::TooCoarse { n1, n2 });
    }
    let (h1, h2) = match domain {
        Domain::Rectangle { width, height } => (width / (n1 - 1) as f64, height / (n2 - 1) as f64),
        Domain::Annulus { inner_radius, outer_radius } => (
            (outer_radius - inner_radius) / (n1 - 1) as f64,
            std::f64::consts::TAU / n2 as f64,
        ),
    };
    Ok(Grid { domain, n1, n2, h1, h2 })
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    /// Grid spacing in the first (x or radial) direction.
    pub fn h1(&self) -> f64 {
        self.h1
    }

    /// Grid spacing in the second (y or angular) direction.
    pub fn h2(&self) -> f64 {
        self.h2
    }

    pub fn node_count(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_annulus(&self) -> bool {
        matches!(self.domain, Domain::Annulus { .. })
    }

    /// Flat index of a logical node.
    #[inline]
    pub fn index(&self, i1: usize, i2: usize) -> usize {
        match self.domain {
            Domain::Rectangle { .. } => i2 * self.n1 + i1,
            Domain::Annulus { .. } => i1 * self.n2 + i2,
        }
    }

    /// Physical (x, y) coordinates of a node.
    pub fn position(&self, i1: usize, i2: usize) -> (f64, f64) {
        match self.domain {
            Domain::Rectangle { .. } => (i1 as f64 * self.h1, i2 as f64 * self.h2),
            Domain::Annulus { inner_radius, .. } => {
                let r = inner_radius + i1 as f64 * self.h1;
                let th = i2 as f64 * self.h2;
                (r * th.cos(), r * th.sin())
            }
        }
    }

    /// Logical coordinates of a node: (x, y) on the rectangle, (r, θ) on the
    /// annulus.
    pub fn logical(&self, i1: usize, i2: usize) -> (f64, f64) {
        match self.domain {
            Domain::Rectangle { .. } => (i1 as f64 * self.h1, i2 as f64 * self.h2),
            Domain::Annulus { inner_radius, .. } => {
                (inner_radius + i1 as f64 * self.h1, i2 as f64 * self.h2)
            }
        }
    }

    fn check_segment(&self, segment: Segment) -> Result<()> {
        if self.domain.has_segment(segment) {
            Ok(())
        } else {
            Err(Error::UnknownSegment { segment })
        }
    }

    /// Node indices of the closed segment, in parameter order. Rectangle
    /// corner nodes appear in both the horizontal and the vertical segment
    /// they touch.
    pub fn segment_nodes(&self, segment: Segment) -> Result<Vec<usize>> {
        self.check_segment(segment)?;
        let ids = match self.domain {
            Domain::Rectangle { .. } => match segment {
                Segment::Gamma1 => (0..self.n1).map(|i| self.index(i, 0)).collect(),
                Segment::Gamma2 => (0..self.n1).map(|i| self.index(i, self.n2 - 1)).collect(),
                Segment::Gamma3 => (0..self.n2).map(|j| self.index(0, j)).collect(),
                Segment::Gamma4 => (0..self.n2).map(|j| self.index(self.n1 - 1, j)).collect(),
            },
            Domain::Annulus { .. } => match segment {
                Segment::Gamma1 => (0..self.n2).map(|i| self.index(0, i)).collect(),
                Segment::Gamma2 => (0..self.n2).map(|i| self.index(self.n1 - 1, i)).collect(),
                _ => unreachable!(),
            },
        };
        Ok(ids)
    }

    /// Boundary parameter of each node of the closed segment: x on Γ1/Γ2,
    /// y on Γ3/Γ4, θ on the circles.
    pub fn segment_parameters(&self, segment: Segment) -> Result<Vec<f64>> {
        self.check_segment(segment)?;
        let params = match self.domain {
            Domain::Rectangle { .. } => match segment {
                Segment::Gamma1 | Segment::Gamma2 => {
                    (0..self.n1).map(|i| i as f64 * self.h1).collect()
                }
                Segment::Gamma3 | Segment::Gamma4 => {
                    (0..self.n2).map(|j| j as f64 * self.h2).collect()
                }
            },
            Domain::Annulus { .. } => (0..self.n2).map(|i| i as f64 * self.h2).collect(),
        };
        Ok(params)
    }

    /// Composite trapezoid quadrature weights (arc length) for the closed
    /// segment; periodic trapezoid on circles. Weights sum to the segment
    /// arc length.
    pub fn segment_weights(&self, segment: Segment) -> Result<Vec<f64>> {
        self.check_segment(segment)?;
        let w = match self.domain {
            Domain::Rectangle { .. } => {
                let (n, h) = match segment {
                    Segment::Gamma1 | Segment::Gamma2 => (self.n1, self.h1),
                    Segment::Gamma3 | Segment::Gamma4 => (self.n2, self.h2),
                };
                let mut w = vec![h; n];
                w[0] = 0.5 * h;
                w[n - 1] = 0.5 * h;
                w
            }
            Domain::Annulus { inner_radius, outer_radius } => {
                let r = if segment == Segment::Gamma1 { inner_radius } else { outer_radius };
                vec![r * self.h2; self.n2]
            }
        };
        Ok(w)
    }

    /// Arc length of the segment.
    pub fn segment_arc_length(&self, segment: Segment) -> Result<f64> {
        self.check_segment(segment)?;
        let l = match self.domain {
            Domain::Rectangle { width, height } => match segment {
                Segment::Gamma1 | Segment::Gamma2 => width,
                Segment::Gamma3 | Segment::Gamma4 => height,
            },
            Domain::Annulus { inner_radius, outer_radius } => {
                let r = if segment == Segment::Gamma1 { inner_radius } else { outer_radius };
                std::f64::consts::TAU * r
            }
        };
        Ok(l)
    }

    /// The segment that owns a boundary node. Every boundary node is owned by
    /// exactly one segment; rectangle corners belong to the vertical segments
    /// Γ3/Γ4.
    pub fn owned_segment_of(&self, node: usize) -> Option<Segment> {
        match self.domain {
            Domain::Rectangle { .. } => {
                let i = node % self.n1;
                let j = node / self.n1;
                if i == 0 {
                    Some(Segment::Gamma3)
                } else if i == self.n1 - 1 {
                    Some(Segment::Gamma4)
                } else if j == 0 {
                    Some(Segment::Gamma1)
                } else if j == self.n2 - 1 {
                    Some(Segment::Gamma2)
                } else {
                    None
                }
            }
            Domain::Annulus { .. } => {
                let k = node / self.n2;
                if k == 0 {
                    Some(Segment::Gamma1)
                } else if k == self.n1 - 1 {
                    Some(Segment::Gamma2)
                } else {
                    None
                }
            }
        }
    }

    /// Owned node lists: a disjoint partition of the boundary nodes.
    pub fn owned_segment_nodes(&self, segment: Segment) -> Result<Vec<usize>> {
        self.check_segment(segment)?;
        match self.domain {
            Domain::Rectangle { .. } => {
                let ids = match segment {
                    Segment::Gamma1 => (1..self.n1 - 1).map(|i| self.index(i, 0)).collect(),
                    Segment::Gamma2 => {
                        (1..self.n1 - 1).map(|i| self.index(i, self.n2 - 1)).collect()
                    }
                    Segment::Gamma3 => (0..self.n2).map(|j| self.index(0, j)).collect(),
                    Segment::Gamma4 => (0..self.n2).map(|j| self.index(self.n1 - 1, j)).collect(),
                };
                Ok(ids)
            }
            Domain::Annulus { .. } => self.segment_nodes(segment),
        }
    }
}

/// Sampled real-valued function on one boundary segment, with quadrature
/// weights per node.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    segment: Segment,
    values: Vec<f64>,
    weights: Vec<f64>,
}

/// Samples `func` (a function of the boundary parameter) on the closed
/// segment.
pub fn sample_boundary<F: Fn(f64) -> f64>(
    grid: &Grid,
    segment: Segment,
    func: F,
) -> Result<BoundaryFunction> {
    let params = grid.segment_parameters(segment)?;
    let weights = grid.segment_weights(segment)?;
    let values = params.iter().map(|&p| func(p)).collect();
    Ok(BoundaryFunction { segment, values, weights })
}

impl BoundaryFunction {
    /// Wraps explicit nodal values; `values.len()` must match the closed
    /// segment node count.
    pub fn from_values(grid: &Grid, segment: Segment, values: Vec<f64>) -> Result<Self> {
        let weights = grid.segment_weights(segment)?;
        if values.len() != weights.len() {
            return Err(Error::BoundaryMismatch(format!(
                "{} values for segment {segment} with {} nodes",
                values.len(),
                weights.len()
            )));
        }
        Ok(Self { segment, values, weights })
    }

    pub fn zero(grid: &Grid, segment: Segment) -> Result<Self> {
        let weights = grid.segment_weights(segment)?;
        let values = vec![0.0; weights.len()];
        Ok(Self { segment, values, weights })
    }

    pub fn segment(&self) -> Segment {
        self.segment
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Weighted L² norm on the segment: sqrt(Σ w_i v_i²).
    pub fn norm_l2(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Weighted L² inner product with another function on the same segment.
    pub fn inner_l2(&self, other: &Self) -> f64 {
        assert_compatible(self, other);
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.weights)
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    /// ‖self − other‖ in the weighted L² norm.
    pub fn distance_l2(&self, other: &Self) -> f64 {
        assert_compatible(self, other);
        self.values
            .iter()
            .zip(&other.values)
            .zip(&self.weights)
            .map(|((a, b), w)| w * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// a·x + b·y as a new boundary function.
    pub fn linear_comb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        assert_compatible(x, y);
        let values = x
            .values
            .iter()
            .zip(&y.values)
            .map(|(xv, yv)| a * xv + b * yv)
            .collect();
        Self { segment: x.segment, values, weights: x.weights.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_comb(1.0, self, -1.0, other)
    }

    pub fn scale(&self, a: f64) -> Self {
        let values = self.values.iter().map(|v| a * v).collect();
        Self { segment: self.segment, values, weights: self.weights.clone() }
    }
}

fn assert_compatible(a: &BoundaryFunction, b: &BoundaryFunction) {
    assert_eq!(a.segment, b.segment, "boundary functions live on different segments");
    assert_eq!(a.values.len(), b.values.len(), "boundary functions have different lengths");
}

/// Weighted L² norm of a boundary function (convenience free function).
pub fn boundary_l2_norm(u: &BoundaryFunction) -> f64 {
    u.norm_l2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    fn rect_grid(n1: usize, n2: usize) -> Grid {
        build_grid(Domain::Rectangle { width: 1.0, height: 0.75 }, n1, n2).unwrap()
    }

    fn annulus_grid(n1: usize, n2: usize) -> Grid {
        build_grid(Domain::Annulus { inner_radius: 1.0, outer_radius: 3.0 }, n1, n2).unwrap()
    }

    #[test]
    fn rectangle_node_counts() {
        let g = rect_grid(5, 4);
        assert_eq!(g.node_count(), 20);
        let top = g.segment_nodes(Segment::Gamma2).unwrap();
        assert_eq!(top.len(), 5);
        for &id in &top {
            let j = id / g.n1();
            let (_, y) = g.position(id % g.n1(), j);
            assert!((y - 0.75).abs() < 1e-15);
        }
    }

    #[test]
    fn annulus_node_counts() {
        let g = annulus_grid(4, 8);
        assert_eq!(g.node_count(), 32);
        let outer = g.segment_nodes(Segment::Gamma2).unwrap();
        assert_eq!(outer.len(), 8);
        for &id in &outer {
            let (x, y) = g.position(id / g.n2(), id % g.n2());
            assert!((x.hypot(y) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn paper_scale_gamma2() {
        // 256 nodes on Γ2 of the rectangle when n1 = 256.
        let g = rect_grid(256, 193);
        assert_eq!(g.segment_nodes(Segment::Gamma2).unwrap().len(), 256);
    }

    #[test]
    fn coarse_and_invalid_domains_rejected() {
        assert!(matches!(
            build_grid(Domain::Rectangle { width: 1.0, height: 1.0 }, 2, 5),
            Err(Error::TooCoarse { .. })
        ));
        assert!(matches!(
            build_grid(Domain::Rectangle { width: -1.0, height: 1.0 }, 5, 5),
            Err(Error::InvalidDomain(_))
        ));
        assert!(matches!(
            build_grid(Domain::Annulus { inner_radius: 3.0, outer_radius: 1.0 }, 5, 5),
            Err(Error::InvalidDomain(_))
        ));
    }

    #[test]
    fn unknown_segment_on_annulus() {
        let g = annulus_grid(4, 8);
        assert!(matches!(
            g.segment_nodes(Segment::Gamma3),
            Err(Error::UnknownSegment { segment: Segment::Gamma3 })
        ));
        assert!(sample_boundary(&g, Segment::Gamma4, |_| 0.0).is_err());
    }

    #[test]
    fn sine_samples_at_quarter_points() {
        let g = rect_grid(5, 4);
        let f = sample_boundary(&g, Segment::Gamma1, |x| (PI * x).sin()).unwrap();
        let s = 0.5_f64.sqrt();
        let expected = [0.0, s, 1.0, s, 0.0];
        for (v, e) in f.values().iter().zip(expected) {
            assert!((v - e).abs() < 1e-15, "{v} vs {e}");
        }
    }

    #[test]
    fn zero_function_sampling() {
        let g = annulus_grid(4, 8);
        let f = sample_boundary(&g, Segment::Gamma1, |_| 0.0).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn paper_annulus_dirichlet_data() {
        let g = annulus_grid(4, 8);
        let f = sample_boundary(&g, Segment::Gamma1, |th| th.sin() - (2.0 * th).sin() / 2.0)
            .unwrap();
        let th3 = 3.0 * g.h2();
        assert!((f.values()[3] - (th3.sin() - (2.0 * th3).sin() / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn quadrature_weights_sum_to_arc_length() {
        for (g, segs) in [
            (rect_grid(7, 5), vec![Segment::Gamma1, Segment::Gamma2, Segment::Gamma3, Segment::Gamma4]),
            (annulus_grid(5, 12), vec![Segment::Gamma1, Segment::Gamma2]),
        ] {
            for seg in segs {
                let w = g.segment_weights(seg).unwrap();
                let l = g.segment_arc_length(seg).unwrap();
                let sum: f64 = w.iter().sum();
                assert!((sum - l).abs() <= 1e-12 * l, "{seg}: {sum} vs {l}");
                assert!(w.iter().all(|&x| x > 0.0));
            }
        }
    }

    #[test]
    fn constant_norm_is_sqrt_length() {
        let g = rect_grid(9, 7);
        let one = sample_boundary(&g, Segment::Gamma2, |_| 1.0).unwrap();
        assert!((one.norm_l2() - 1.0).abs() < 1e-13);

        let ga = annulus_grid(5, 16);
        let one = sample_boundary(&ga, Segment::Gamma2, |_| 1.0).unwrap();
        assert!((one.norm_l2() - (6.0 * PI).sqrt()).abs() < 1e-12);
        // c * sqrt(L) for a non-unit constant
        let c = sample_boundary(&ga, Segment::Gamma1, |_| -2.5).unwrap();
        assert!((c.norm_l2() - 2.5 * TAU.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sine_norm_converges_to_half_integral() {
        // ∫₀¹ sin²(πx) dx = 1/2, computed by a fine Simpson rule as oracle.
        let oracle = {
            let n = 2000;
            let h = 1.0 / n as f64;
            let f = |x: f64| (PI * x).sin().powi(2);
            let mut s = f(0.0) + f(1.0);
            for i in 1..n {
                s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            (s * h / 3.0).sqrt()
        };
        let g = rect_grid(129, 5);
        let f = sample_boundary(&g, Segment::Gamma1, |x| (PI * x).sin()).unwrap();
        assert!((f.norm_l2() - oracle).abs() < 1e-4);
        assert!((oracle * oracle - 0.5).abs() < 1e-10);
    }

    #[test]
    fn quadrature_refinement_order_two() {
        // Non-periodic smooth integrand so the trapezoid error is genuinely O(h²).
        let exact = (std::f64::consts::E.powi(2) - 1.0) / 2.0; // ∫₀¹ e^{2x} dx
        let err = |n: usize| {
            let g = rect_grid(n, 4);
            let f = sample_boundary(&g, Segment::Gamma1, |x| x.exp()).unwrap();
            (f.norm_l2().powi(2) - exact).abs()
        };
        let e1 = err(17);
        let e2 = err(33);
        let e3 = err(65);
        let o1 = (e1 / e2).log2();
        let o2 = (e2 / e3).log2();
        assert!(o1 > 1.9 && o2 > 1.9, "orders {o1}, {o2}");
    }

    #[test]
    fn annulus_sampling_rotation_invariance() {
        let g = annulus_grid(4, 16);
        let f = |th: f64| (th.sin() + 0.3 * (3.0 * th).cos()).exp();
        let base = sample_boundary(&g, Segment::Gamma1, f).unwrap();
        let shift = 5;
        let rotated =
            sample_boundary(&g, Segment::Gamma1, |th| f(th + shift as f64 * g.h2())).unwrap();
        for i in 0..g.n2() {
            let j = (i + shift) % g.n2();
            assert!(
                (rotated.values()[i] - base.values()[j]).abs() < 1e-12,
                "rotation mismatch at {i}"
            );
        }
    }

    #[test]
    fn owned_partition_is_disjoint_cover() {
        for g in [rect_grid(6, 5), annulus_grid(4, 9)] {
            let mut seen = std::collections::BTreeMap::new();
            for &seg in g.domain().segments() {
                for id in g.owned_segment_nodes(seg).unwrap() {
                    assert_eq!(g.owned_segment_of(id), Some(seg));
                    assert!(seen.insert(id, seg).is_none(), "node {id} owned twice");
                }
            }
            // every closed-segment node is covered by some owner
            for &seg in g.domain().segments() {
                for id in g.segment_nodes(seg).unwrap() {
                    assert!(seen.contains_key(&id));
                }
            }
        }
    }

    #[test]
    fn linear_comb_and_distance() {
        let g = rect_grid(9, 5);
        let a = sample_boundary(&g, Segment::Gamma2, |x| x).unwrap();
        let b = sample_boundary(&g, Segment::Gamma2, |x| 1.0 - x).unwrap();
        let s = BoundaryFunction::linear_comb(1.0, &a, 1.0, &b);
        let one = sample_boundary(&g, Segment::Gamma2, |_| 1.0).unwrap();
        assert!(s.distance_l2(&one) < 1e-14);
    }
}
