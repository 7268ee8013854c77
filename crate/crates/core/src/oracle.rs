//! Exact sequence-space model of the Cauchy fixed-point operator on a strip,
//! used as ground truth for stopping-index and convergence-rate experiments.
//!
//! On the square with lateral homogeneous Dirichlet walls, sine modes
//! decouple and the operator acts per mode as
//!
//! ```text
//! (Tφ)_j = (α_j/β_j)² φ_j + (j α_j/β_j²) a_j + (1/β_j) b_j,
//! α_j = sinh(j·w), β_j = cosh(j·w),
//! ```
//!
//! where `a_j`/`b_j` are the sine coefficients of the Dirichlet/Neumann data
//! and `w` is the distance between the data boundary and the reconstruction
//! boundary (`w = 2π` for the canonical square). The eigenvalues of the
//! linear part are `λ_j = tanh(j·w)²`, which accumulate at one exponentially
//! fast — the quantitative signature of the severe ill-posedness.
//!
//! Everything here is evaluated in closed form: Picard iterates, residuals
//! and errors are per-mode geometric expressions, so discrepancy stopping
//! indices in the 10⁹ range are found by bisection in milliseconds. The
//! canonical `w = 2π` spectrum collapses to a couple of active modes within
//! any feasible iteration budget, hiding the asymptotic laws; rate
//! experiments therefore default to a thin strip (small `w`), which is the
//! same operator family with a dense spectrum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::mann::{Applied, MannSpace};

/// Logarithmic source filter `f(λ) = (ln(e/λ))^{-p}`, with `f(0) = 0`.
pub fn log_filter(p: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        0.0
    } else {
        (1.0 - lambda.ln()).powf(-p)
    }
}

/// Sine-coefficient vector on the reconstruction boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTrace {
    coeffs: Vec<f64>,
}

impl FourierTrace {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn zero(n: usize) -> Self {
        Self { coeffs: vec![0.0; n] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn linear_comb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        assert_eq!(x.len(), y.len());
        Self {
            coeffs: x
                .coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(xa, ya)| a * xa + b * ya)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::linear_comb(1.0, self, -1.0, other)
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }
}

/// Diagonal (per-sine-mode) realization of the fixed-point operator.
pub struct SpectralOperator {
    width: f64,
    lambdas: Vec<f64>,
    /// 1 − λ_j computed as 4e^{-2jw}/(1+e^{-2jw})², exact to full relative
    /// precision where the naive subtraction underflows.
    gaps: Vec<f64>,
    /// j·α_j/β_j² (multiplies the Dirichlet coefficients a_j)
    gain_a: Vec<f64>,
    /// 1/β_j (multiplies the Neumann coefficients b_j)
    gain_b: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    /// Sobolev weight exponent s of the norm Σ (1+j²)^s φ_j².
    sobolev_s: f64,
}

impl SpectralOperator {
    /// Operator of the canonical square (boundary distance 2π).
    pub fn remark_square(n_modes: usize) -> Self {
        Self::strip(n_modes, std::f64::consts::TAU)
    }

    /// Strip of width `w` with lateral sine modes; same formulas with
    /// `2π` replaced by `w`.
    pub fn strip(n_modes: usize, width: f64) -> Self {
        assert!(width > 0.0 && n_modes > 0);
        let mut lambdas = Vec::with_capacity(n_modes);
        let mut gaps = Vec::with_capacity(n_modes);
        let mut gain_a = Vec::with_capacity(n_modes);
        let mut gain_b = Vec::with_capacity(n_modes);
        for j in 1..=n_modes {
            let e = (-2.0 * j as f64 * width).exp(); // e^{-2jw}
            let tanh = (1.0 - e) / (1.0 + e);
            let inv_cosh = 2.0 * (-(j as f64) * width).exp() / (1.0 + e);
            lambdas.push(tanh * tanh);
            gaps.push(4.0 * e / ((1.0 + e) * (1.0 + e)));
            gain_a.push(j as f64 * tanh * inv_cosh);
            gain_b.push(inv_cosh);
        }
        Self {
            width,
            lambdas,
            gaps,
            gain_a,
            gain_b,
            a: vec![0.0; n_modes],
            b: vec![0.0; n_modes],
            sobolev_s: -0.5,
        }
    }

    pub fn with_cauchy_coefficients(mut self, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != self.n_modes() || b.len() != self.n_modes() {
            return Err(Error::ModeMismatch(a.len().max(b.len()), self.n_modes()));
        }
        self.a = a;
        self.b = b;
        Ok(self)
    }

    pub fn with_sobolev_exponent(mut self, s: f64) -> Self {
        self.sobolev_s = s;
        self
    }

    pub fn n_modes(&self) -> usize {
        self.lambdas.len()
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// 1 − λ_j (1-based mode index).
    pub fn gap(&self, j: usize) -> f64 {
        self.gaps[j - 1]
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn sobolev_exponent(&self) -> f64 {
        self.sobolev_s
    }

    fn check_modes(&self, t: &FourierTrace) -> Result<()> {
        if t.len() != self.n_modes() {
            return Err(Error::ModeMismatch(t.len(), self.n_modes()));
        }
        Ok(())
    }

    /// Per-mode affine map `(Tφ)_j = λ_j φ_j + gain_a_j a_j + gain_b_j b_j`.
    pub fn apply_t(&self, phi: &FourierTrace) -> Result<FourierTrace> {
        self.check_modes(phi)?;
        let coeffs = (0..self.n_modes())
            .map(|i| self.lambdas[i] * phi.coeffs[i] + self.gain_a[i] * self.a[i] + self.gain_b[i] * self.b[i])
            .collect();
        Ok(FourierTrace { coeffs })
    }

    /// Linear part only: `(T_l φ)_j = λ_j φ_j`.
    pub fn apply_linear(&self, phi: &FourierTrace) -> Result<FourierTrace> {
        self.check_modes(phi)?;
        Ok(FourierTrace {
            coeffs: phi.coeffs.iter().zip(&self.lambdas).map(|(c, l)| c * l).collect(),
        })
    }

    /// Affine term `z = T(0)`.
    pub fn affine_term(&self) -> FourierTrace {
        FourierTrace {
            coeffs: (0..self.n_modes())
                .map(|i| self.gain_a[i] * self.a[i] + self.gain_b[i] * self.b[i])
                .collect(),
        }
    }

    /// Mode weight (1+j²)^s of the operator norm.
    pub fn mode_weight(&self, j: usize) -> f64 {
        (1.0 + (j as f64) * (j as f64)).powf(self.sobolev_s)
    }

    /// Weighted norm `sqrt(Σ (1+j²)^s φ_j²)` with this operator's exponent.
    pub fn weighted_norm(&self, phi: &FourierTrace) -> f64 {
        phi.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| self.mode_weight(i + 1) * c * c)
            .sum::<f64>()
            .sqrt()
    }

    /// Sobolev norm with an arbitrary exponent (diagnostics).
    pub fn sobolev_norm(&self, phi: &FourierTrace, s: f64) -> f64 {
        phi.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let j = (i + 1) as f64;
                (1.0 + j * j).powf(s) * c * c
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Per-mode application of the source filter: `(f(I−T_l) ψ)_j =
    /// f(1−λ_j) ψ_j`.
    pub fn source_element(&self, p: f64, psi: &FourierTrace) -> Result<FourierTrace> {
        self.check_modes(psi)?;
        Ok(FourierTrace {
            coeffs: psi
                .coeffs
                .iter()
                .zip(&self.gaps)
                .map(|(c, &t)| log_filter(p, t) * c)
                .collect(),
        })
    }

    /// Gaussian per-mode perturbation rescaled to `‖δ‖ = eps` exactly in the
    /// weighted norm.
    pub fn weighted_noise(&self, eps: f64, rng: &mut ChaCha8Rng) -> FourierTrace {
        let mut coeffs: Vec<f64> = (0..self.n_modes())
            .map(|i| {
                let xi: f64 = StandardNormal.sample(rng);
                xi / self.mode_weight(i + 1).sqrt()
            })
            .collect();
        let norm = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| self.mode_weight(i + 1) * c * c)
            .sum::<f64>()
            .sqrt();
        if norm > 0.0 {
            let s = eps / norm;
            for c in &mut coeffs {
                *c *= s;
            }
        }
        FourierTrace { coeffs }
    }
}

impl MannSpace for SpectralOperator {
    type Elem = FourierTrace;

    fn apply(&self, x: &FourierTrace) -> Result<Applied<FourierTrace>> {
        Ok(Applied { image: self.apply_t(x)?, reconstruction: None })
    }

    fn combine(&self, a: f64, x: &FourierTrace, b: f64, y: &FourierTrace) -> FourierTrace {
        FourierTrace::linear_comb(a, x, b, y)
    }

    fn norm_star(&self, x: &FourierTrace) -> Result<f64> {
        Ok(self.weighted_norm(x))
    }

    fn norm_data(&self, x: &FourierTrace) -> f64 {
        x.l2_norm()
    }
}

/// Closed-form Picard (Maz'ya) run `φ_{k+1} = T_l φ_k + z_ε` from `φ₁ = 0`,
/// tracking residual and error norms as functions of k without iterating.
///
/// Per mode with gap `t`: the residual is `r_k = λ^{k-1} r_1` and the error
/// against the exact fixed point is
/// `e_k = λ^{k-1}(φ₁ − φ̄) + δ (1 − λ^{k-1})/t`.
pub struct PicardClosedForm {
    /// sqrt(weight) · r₁ per mode
    r1w: Vec<f64>,
    /// sqrt(weight) · (φ₁ − φ̄)
    e1w: Vec<f64>,
    /// sqrt(weight) · δ
    noisew: Vec<f64>,
    /// ln λ_j (−∞ allowed when λ = 0)
    log_lambda: Vec<f64>,
    gaps: Vec<f64>,
}

impl PicardClosedForm {
    /// `phibar` is the exact fixed point of the noise-free operator, `noise`
    /// the perturbation of the affine term, `phi1` the initial guess.
    pub fn new(
        op: &SpectralOperator,
        phibar: &FourierTrace,
        phi1: &FourierTrace,
        noise: &FourierTrace,
    ) -> Result<Self> {
        op.check_modes(phibar)?;
        op.check_modes(phi1)?;
        op.check_modes(noise)?;
        let n = op.n_modes();
        let mut r1w = Vec::with_capacity(n);
        let mut e1w = Vec::with_capacity(n);
        let mut noisew = Vec::with_capacity(n);
        let mut log_lambda = Vec::with_capacity(n);
        for i in 0..n {
            let sw = op.mode_weight(i + 1).sqrt();
            let t = op.gaps[i];
            // z_ε = t·φ̄ + δ ; r₁ = z_ε − t·φ₁
            r1w.push(sw * (t * (phibar.coeffs[i] - phi1.coeffs[i]) + noise.coeffs[i]));
            e1w.push(sw * (phi1.coeffs[i] - phibar.coeffs[i]));
            noisew.push(sw * noise.coeffs[i]);
            log_lambda.push((-t).ln_1p());
        }
        Ok(Self { r1w, e1w, noisew, log_lambda, gaps: op.gaps.clone() })
    }

    /// ‖z_ε − (I − T_l) φ_k‖ in the weighted norm.
    pub fn residual_norm(&self, k: u64) -> f64 {
        let km1 = (k - 1) as f64;
        self.r1w
            .iter()
            .zip(&self.log_lambda)
            .map(|(r, ll)| {
                let d = (km1 * ll).exp();
                (r * d) * (r * d)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// ‖φ_k − φ̄‖ in the weighted norm.
    pub fn error_norm(&self, k: u64) -> f64 {
        let km1 = (k - 1) as f64;
        let mut acc = 0.0;
        for i in 0..self.e1w.len() {
            let pow = (km1 * self.log_lambda[i]).exp();
            // (1 − λ^{k-1})/t, stable for tiny t
            let geo = -((km1 * self.log_lambda[i]).exp_m1()) / self.gaps[i];
            let v = self.e1w[i] * pow + self.noisew[i] * geo;
            acc += v * v;
        }
        acc.sqrt()
    }

    /// First k with `residual ≤ μ·ε` (the residual is non-increasing, so
    /// bisection applies); `None` if not reached within `k_max`.
    pub fn discrepancy_index(&self, mu: f64, eps: f64, k_max: u64) -> Option<u64> {
        let target = mu * eps;
        if self.residual_norm(1) <= target {
            return Some(1);
        }
        if self.residual_norm(k_max) > target {
            return None;
        }
        let (mut lo, mut hi) = (1u64, k_max);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.residual_norm(mid) <= target {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}

/// Reference trace satisfying the logarithmic source condition *sharply*:
/// returns ψ with mass `∝ (−ln t_j)^{-1}` per mode (the boundary case of the
/// condition), supported on the well-resolved part of the spectrum, scaled
/// so that the induced affine term `z = (I−T_l) f(I−T_l) ψ` has unit norm.
pub fn sharp_log_source(op: &SpectralOperator, p: f64) -> FourierTrace {
    let t_cut = 0.05;
    let n = op.n_modes();
    let mut psi = vec![0.0; n];
    for i in 0..n {
        let t = op.gaps[i];
        if t > t_cut {
            continue;
        }
        let l = -t.ln(); // > 0 on the support
        // e₁ mass (−ln t)^{-(2p+1)}; ψ = e₁ / f(t) with f(t) = (1−ln t)^{-p}
        let e1 = (l.powf(-(2.0 * p + 1.0)) / op.mode_weight(i + 1)).sqrt();
        psi[i] = e1 * (1.0 + l).powf(p);
    }
    let psi = FourierTrace::new(psi);
    let phibar = op.source_element(p, &psi).expect("mode counts match");
    let z = FourierTrace::new(
        phibar.coeffs.iter().zip(&op.gaps).map(|(c, t)| c * t).collect(),
    );
    let zn = op.weighted_norm(&z);
    assert!(zn > 0.0, "source support is empty; use a thinner strip or more modes");
    psi.scale(1.0 / zn)
}

/// Reference trace *without* source smoothness: per-mode mass `∝ 1/t_j`,
/// the boundary of the space, for which the discrepancy stopping index
/// exhausts its worst-case `ε^{-2}` growth. Scaled to a unit affine term.
pub fn rough_reference(op: &SpectralOperator) -> FourierTrace {
    let n = op.n_modes();
    let mut coeffs = vec![0.0; n];
    for i in 0..n {
        coeffs[i] = (1.0 / (op.gaps[i] * op.mode_weight(i + 1))).sqrt();
    }
    let phibar = FourierTrace::new(coeffs);
    let z = FourierTrace::new(
        phibar.coeffs.iter().zip(&op.gaps).map(|(c, t)| c * t).collect(),
    );
    phibar.scale(1.0 / op.weighted_norm(&z))
}

/// Least-squares slope of y against x.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Slope fit over the stable middle of a sweep: drops two points at each end
/// when enough points exist (asymptotic statements exclude endpoints).
pub fn interior_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() >= 8 {
        least_squares_slope(&points[2..points.len() - 2])
    } else {
        least_squares_slope(points)
    }
}

/// One row of a stopping-index or rate sweep.
#[derive(Debug, Clone)]
pub struct RatePoint {
    pub epsilon: f64,
    pub k_eps: u64,
    pub err: f64,
    pub residual: f64,
}

/// Result of a discrepancy-principle sweep on the rough reference.
#[derive(Debug, Clone)]
pub struct StoppingSweep {
    pub points: Vec<RatePoint>,
    /// Fitted slope of log k(ε) against log ε.
    pub slope_log_k_vs_log_eps: f64,
}

/// Sweeps the discrepancy stopping index over a noise grid for a reference
/// without source smoothness (`k(ε) = O(ε^{-2})` regime).
pub fn stopping_index_sweep(
    op: &SpectralOperator,
    phibar: &FourierTrace,
    eps_grid: &[f64],
    mu: f64,
    seed: u64,
) -> Result<StoppingSweep> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidConfig("empty ε grid".into()));
    }
    let phi1 = FourierTrace::zero(op.n_modes());
    let mut points = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let noise = op.weighted_noise(eps, &mut rng);
        let cf = PicardClosedForm::new(op, phibar, &phi1, &noise)?;
        let k = cf.discrepancy_index(mu, eps, 1 << 40).ok_or_else(|| {
            Error::InvalidConfig(format!("discrepancy not reached for ε = {eps}"))
        })?;
        points.push(RatePoint {
            epsilon: eps,
            k_eps: k,
            err: cf.error_norm(k),
            residual: cf.residual_norm(k),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.epsilon.log10(), (p.k_eps as f64).log10()))
        .collect();
    Ok(StoppingSweep { points, slope_log_k_vs_log_eps: interior_slope(&logs) })
}

/// Full rate experiment under a logarithmic source condition.
#[derive(Debug, Clone)]
pub struct RateTable {
    pub p: f64,
    pub points: Vec<RatePoint>,
    /// Exact-data error curve (k, ‖e_k‖).
    pub exact_curve: Vec<(u64, f64)>,
    /// min and max of ‖e_k‖·(ln k)^p over the observation window.
    pub log_envelope_min: f64,
    pub log_envelope_max: f64,
    /// Fitted slope of log₁₀[k_ε (ln k_ε)^p] against log₁₀(1/ε).
    pub slope_keps_law: f64,
    /// ‖e_{k_ε}‖ / (−ln √ε)^{-p} over the sweep.
    pub err_law_ratios: Vec<f64>,
}

/// Runs exact-data and noisy sweeps for the source element `φ̄ = f(I−T_l)ψ`
/// with initial guess zero; noise is per-mode Gaussian scaled to ε in the
/// operator norm, seeded.
pub fn run_rate_experiment(
    op: &SpectralOperator,
    p: f64,
    psi: &FourierTrace,
    eps_grid: &[f64],
    mu: f64,
    seed: u64,
) -> Result<RateTable> {
    if eps_grid.is_empty() {
        return Err(Error::InvalidConfig("empty ε grid".into()));
    }
    if p < 1.0 {
        return Err(Error::InvalidConfig("rate experiments need p ≥ 1".into()));
    }
    let phibar = op.source_element(p, psi)?;
    let phi1 = FourierTrace::zero(op.n_modes());
    let zero_noise = FourierTrace::zero(op.n_modes());
    let exact = PicardClosedForm::new(op, &phibar, &phi1, &zero_noise)?;

    // exact-data curve over a geometric k grid in [10, 2·10⁴]
    let mut exact_curve = Vec::new();
    let mut k = 10u64;
    while k <= 20_000 {
        exact_curve.push((k, exact.error_norm(k)));
        k = ((k as f64) * 1.25).ceil() as u64;
    }
    let (mut env_min, mut env_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(k, e) in &exact_curve {
        if (100..=10_000).contains(&k) {
            let s = e * (k as f64).ln().powf(p);
            env_min = env_min.min(s);
            env_max = env_max.max(s);
        }
    }

    let mut points = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)));
        let noise = op.weighted_noise(eps, &mut rng);
        let cf = PicardClosedForm::new(op, &phibar, &phi1, &noise)?;
        let k = cf.discrepancy_index(mu, eps, 1 << 40).ok_or_else(|| {
            Error::InvalidConfig(format!("discrepancy not reached for ε = {eps}"))
        })?;
        points.push(RatePoint {
            epsilon: eps,
            k_eps: k,
            err: cf.error_norm(k),
            residual: cf.residual_norm(k),
        });
    }
    let law: Vec<(f64, f64)> = points
        .iter()
        .map(|pt| {
            let kf = pt.k_eps as f64;
            ((1.0 / pt.epsilon).log10(), (kf * kf.ln().powf(p)).log10())
        })
        .collect();
    let err_law_ratios = points
        .iter()
        .map(|pt| pt.err / (-pt.epsilon.sqrt().ln()).powf(-p))
        .collect();
    Ok(RateTable {
        p,
        points,
        exact_curve,
        log_envelope_min: env_min,
        log_envelope_max: env_max,
        slope_keps_law: interior_slope(&law),
        err_law_ratios,
    })
}

/// Semi-convergence study at a relative noise level: error curve of the
/// regularized family `k ↦ ‖R_k(z_ε) − φ̄‖`, its interior minimum, and where
/// the discrepancy principle stops.
#[derive(Debug, Clone)]
pub struct SemiConvergence {
    pub curve: Vec<(u64, f64)>,
    pub min_k: u64,
    pub min_err: f64,
    pub stop_k: u64,
    pub stop_err: f64,
}

pub fn semi_convergence_experiment(
    op: &SpectralOperator,
    p: f64,
    relative_noise: f64,
    mu: f64,
    seed: u64,
) -> Result<SemiConvergence> {
    let psi = sharp_log_source(op, p);
    let phibar = op.source_element(p, &psi)?;
    // ‖z‖ = 1 by the normalization of the source, so ε is the relative level
    let eps = relative_noise;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = op.weighted_noise(eps, &mut rng);
    let phi1 = FourierTrace::zero(op.n_modes());
    let cf = PicardClosedForm::new(op, &phibar, &phi1, &noise)?;

    let mut curve = Vec::new();
    let mut k = 1u64;
    while k <= 10_000_000 {
        curve.push((k, cf.error_norm(k)));
        k = ((k as f64) * 1.3).ceil() as u64;
    }
    let (mut min_k, mut min_err) = (1u64, f64::INFINITY);
    for &(k, e) in &curve {
        if e < min_err {
            min_err = e;
            min_k = k;
        }
    }
    let stop_k = cf
        .discrepancy_index(mu, eps, 1 << 40)
        .ok_or_else(|| Error::InvalidConfig("discrepancy not reached".into()))?;
    Ok(SemiConvergence { curve, min_k, min_err, stop_k, stop_err: cf.error_norm(stop_k) })
}

/// Numerical verification of the scalar filter bounds used by the rate
/// proofs.
#[derive(Debug, Clone)]
pub struct AppendixReport {
    /// Largest observed scaled sup (the single constant realizing the
    /// bounds over the sweep; the analytic limit is 1).
    pub c: f64,
    /// (k, sup_λ f̂(λ)·(ln k)^p) samples.
    pub f_hat_sups: Vec<(usize, f64)>,
    /// (k, sup_λ ĝ(λ)·k·(ln k)^p) samples.
    pub g_hat_sups: Vec<(usize, f64)>,
    /// Smallest second difference of ĥ on the t grid.
    pub min_second_difference: f64,
}

/// Checks, on a λ grid, that `f̂(λ) = (1−λ)^k (ln(e/λ))^{-p} ≤ C (ln k)^{-p}`
/// and `ĝ(λ) = (1−λ)^k λ (ln(e/λ))^{-p} ≤ C k^{-1} (ln k)^{-p}` hold for all
/// requested k with one constant, and that `ĥ(t) = exp(−t^{-1/(2p)})²·t` is
/// convex on a t grid.
///
/// The scaled sups `sup_λ f̂·(ln k)^p` and `sup_λ ĝ·k·(ln k)^p` increase
/// slowly toward the limit 1 (the maximizer sits near `λ ≈ p/(k ln k)`), so
/// the check verifies the hard analytic cap `C = 1` at every k and that the
/// sequences stabilize: the last two decades of k differ by ≤ 15%.
pub fn appendix_bounds_check(
    p: f64,
    k_list: &[usize],
    lambda_grid_points: usize,
) -> Result<AppendixReport> {
    if k_list.iter().any(|&k| k < 2) {
        return Err(Error::InvalidConfig("k values must be ≥ 2 (ln k > 0)".into()));
    }
    let grid: Vec<f64> = (0..=lambda_grid_points)
        .map(|i| i as f64 / lambda_grid_points as f64)
        .collect();
    let sup_of = |k: usize, with_lambda_factor: bool| -> (f64, f64) {
        let mut best = (0.0, 0.0);
        for &l in &grid {
            if l == 0.0 {
                continue; // f̂(0) = 0 by the filter convention
            }
            let mut v = (1.0 - l).powi(k as i32) * log_filter(p, l);
            if with_lambda_factor {
                v *= l;
            }
            if v > best.0 {
                best = (v, l);
            }
        }
        best
    };

    const HARD_CAP: f64 = 1.0;
    let mut f_hat_sups = Vec::new();
    let mut g_hat_sups = Vec::new();
    for &k in k_list {
        let lnk_p = (k as f64).ln().powf(p);
        let (fs, fl) = sup_of(k, false);
        let scaled_f = fs * lnk_p;
        if scaled_f > HARD_CAP {
            return Err(Error::BoundViolated {
                lambda: fl,
                k,
                detail: format!("sup f̂·(ln k)^p = {scaled_f} exceeds C = {HARD_CAP}"),
            });
        }
        f_hat_sups.push((k, scaled_f));
        let (gs, gl) = sup_of(k, true);
        let scaled_g = gs * k as f64 * lnk_p;
        if scaled_g > HARD_CAP {
            return Err(Error::BoundViolated {
                lambda: gl,
                k,
                detail: format!("sup ĝ·k·(ln k)^p = {scaled_g} exceeds C = {HARD_CAP}"),
            });
        }
        g_hat_sups.push((k, scaled_g));
    }
    let c = f_hat_sups
        .iter()
        .chain(&g_hat_sups)
        .map(|&(_, s)| s)
        .fold(0.0f64, f64::max);

    // stabilization: compare the scaled sup at k_max against one decade
    // below (only meaningful once k is large; the approach to the limit is
    // logarithmically slow)
    let k_max = *k_list.iter().max().unwrap();
    if k_max >= 10_000 {
        let probe = |k: usize| sup_of(k, false).0 * (k as f64).ln().powf(p);
        let late = probe(k_max);
        let earlier = probe(k_max / 10);
        let ratio = late / earlier;
        if !(0.8..=1.15).contains(&ratio) {
            return Err(Error::BoundViolated {
                lambda: f64::NAN,
                k: k_max,
                detail: format!("scaled sup not stabilized: decade ratio {ratio}"),
            });
        }
    }

    // convexity of ĥ(t) = exp(−2 t^{-1/(2p)})·t on a log-spaced t grid
    let m = 2000;
    let h_fun = |t: f64| (-2.0 * t.powf(-1.0 / (2.0 * p))).exp() * t;
    let mut min_dd = f64::INFINITY;
    for i in 1..m {
        let t0 = 1e-6 + (1.0 - 1e-6) * (i as f64 - 1.0) / (m as f64);
        let t1 = 1e-6 + (1.0 - 1e-6) * (i as f64) / (m as f64);
        let t2 = 1e-6 + (1.0 - 1e-6) * (i as f64 + 1.0) / (m as f64);
        let dd = h_fun(t0) - 2.0 * h_fun(t1) + h_fun(t2);
        min_dd = min_dd.min(dd);
    }
    if min_dd < -1e-12 {
        return Err(Error::BoundViolated {
            lambda: f64::NAN,
            k: 0,
            detail: format!("ĥ second difference {min_dd} below −1e−12"),
        });
    }
    Ok(AppendixReport { c, f_hat_sups, g_hat_sups, min_second_difference: min_dd })
}

/// Mode-wise inequality and term bounds behind the Sobolev reading of the
/// logarithmic source condition.
#[derive(Debug, Clone)]
pub struct SobolevReport {
    /// (j, ln(e/(1−λ_j)), 4πj − 1) triples.
    pub inequality_samples: Vec<(usize, f64, f64)>,
    /// sup_j (1+j²)^p (4πj−1)^{-2p}: the constant c of the weighted bound.
    pub max_term: f64,
}

/// Verifies `ln(e/(1−λ_j)) ≥ 4πj − 1` for the canonical square operator for
/// j = 1..n, and that the weights `(1+j²)^p (4πj−1)^{-2p}` are uniformly
/// bounded, which turns the source condition into an `H^p` regularity
/// statement. (The bare weight series does not converge — the weights tend
/// to the constant `(4π)^{-2p}`; the content is their boundedness.)
pub fn sobolev_interpretation_check(p: f64, n: usize) -> Result<SobolevReport> {
    let op = SpectralOperator::remark_square(n);
    let mut inequality_samples = Vec::with_capacity(n);
    let mut max_term = 0.0f64;
    for j in 1..=n {
        let lhs = 1.0 - op.gap(j).ln();
        let rhs = 4.0 * std::f64::consts::PI * j as f64 - 1.0;
        if lhs < rhs {
            return Err(Error::InequalityViolated { j });
        }
        inequality_samples.push((j, lhs, rhs));
        let jf = j as f64;
        max_term = max_term.max((1.0 + jf * jf).powf(p) * rhs.powf(-2.0 * p));
    }
    Ok(SobolevReport { inequality_samples, max_term })
}
