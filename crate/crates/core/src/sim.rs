//! Partial-data gradient descent on ridge-regularized least squares.
//!
//! Per-sample loss `f(x; a, y) = ½(aᵀx − y)² + (ρ/2)‖x‖²`, full objective the
//! mean over all `M_total` samples. The Hessian is constant, so μ, L, x* and
//! the optimality gap `½(x − x*)ᵀH(x − x*)` are exact, which makes every
//! bound check below a hard inequality up to roundoff.
//!
//! [`run_descent`] steps `x ← x − g/L` with `g` the mean gradient over the
//! collected set only, then fits the gradient envelope (β₁, β₂) on the
//! trajectory and checks the per-step error bound, the one-step recursion
//! and the unrolled convergence bound at every iterate.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::surrogate::{contraction_factor, convergence_bound, ConvergenceParams};

/// Relative slack for floating-point comparisons in the bound checks.
const CHECK_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticProblem {
    /// M_total × D
    pub features: DMatrix<f64>,
    pub targets: DVector<f64>,
    pub ridge: f64,
    pub mu: f64,
    pub lip: f64,
    pub x_star: DVector<f64>,
    hessian: DMatrix<f64>,
    /// Aᵀy / M
    moment: DVector<f64>,
    row_norms_sq: Vec<f64>,
}

impl QuadraticProblem {
    pub fn from_data(features: DMatrix<f64>, targets: DVector<f64>, ridge: f64) -> Result<Self> {
        if features.nrows() == 0 || features.ncols() == 0 {
            return Err(invalid(
                "features",
                "need at least one sample and one dimension",
            ));
        }
        if targets.len() != features.nrows() {
            return Err(Error::DimensionMismatch {
                what: "targets vs feature rows",
                expected: features.nrows(),
                got: targets.len(),
            });
        }
        if !(ridge > 0.0 && ridge.is_finite()) {
            return Err(invalid("ridge", "must be > 0"));
        }
        let m = features.nrows() as f64;
        let d = features.ncols();
        let hessian = features.transpose() * &features / m + DMatrix::identity(d, d) * ridge;
        let moment = features.transpose() * &targets / m;
        let eig = SymmetricEigen::new(hessian.clone());
        let mu = eig.eigenvalues.min();
        let lip = eig.eigenvalues.max();
        let x_star = hessian
            .clone()
            .cholesky()
            .ok_or_else(|| invalid("ridge", "Hessian is not positive definite"))?
            .solve(&moment);
        let row_norms_sq = features.row_iter().map(|r| r.norm_squared()).collect();
        Ok(Self {
            features,
            targets,
            ridge,
            mu,
            lip: lip.max(mu),
            x_star,
            hessian,
            moment,
            row_norms_sq,
        })
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn m_total(&self) -> usize {
        self.features.nrows()
    }

    pub fn hessian(&self) -> &DMatrix<f64> {
        &self.hessian
    }

    pub fn loss(&self, x: &DVector<f64>) -> f64 {
        let r = &self.features * x - &self.targets;
        0.5 * r.norm_squared() / self.m_total() as f64 + 0.5 * self.ridge * x.norm_squared()
    }

    /// F(x) − F(x*), computed from the exact quadratic form.
    pub fn gap(&self, x: &DVector<f64>) -> f64 {
        let d = x - &self.x_star;
        0.5 * d.dot(&(&self.hessian * &d))
    }

    pub fn full_gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.hessian * x - &self.moment
    }

    pub fn sample_gradient(&self, m: usize, x: &DVector<f64>) -> DVector<f64> {
        let a = self.features.row(m).transpose();
        let r = a.dot(x) - self.targets[m];
        a * r + x * self.ridge
    }

    /// Mean per-sample gradient over `indices`.
    fn mean_gradient(&self, indices: &[usize], x: &DVector<f64>) -> DVector<f64> {
        let mut acc = DVector::zeros(self.dim());
        for &m in indices {
            let a = self.features.row(m);
            let r = a.dot(&x.transpose()) - self.targets[m];
            acc.axpy(r, &a.transpose(), 1.0);
        }
        acc / indices.len() as f64 + x * self.ridge
    }

    /// (maxₘ ‖∇f(x; ξₘ)‖², ‖∇F(x)‖²)
    pub fn gradient_norms(&self, x: &DVector<f64>) -> (f64, f64) {
        let ax = &self.features * x;
        let xx = x.norm_squared();
        let rho = self.ridge;
        let worst = (0..self.m_total())
            .map(|m| {
                let r = ax[m] - self.targets[m];
                r * r * self.row_norms_sq[m] + 2.0 * r * rho * ax[m] + rho * rho * xx
            })
            .fold(0.0, f64::max);
        (worst, self.full_gradient(x).norm_squared())
    }
}

/// Synthetic ridge-regression instance with standard-normal features and a
/// planted linear model plus noise. Deterministic per seed.
pub fn generate_problem(
    dim: usize,
    m_total: usize,
    ridge: f64,
    seed: u64,
) -> Result<QuadraticProblem> {
    if dim == 0 {
        return Err(invalid("dim", "must be >= 1"));
    }
    if m_total == 0 {
        return Err(invalid("m_total", "must be >= 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = DMatrix::from_fn(m_total, dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let planted = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let noise = DVector::from_fn(m_total, |_, _| 0.5 * rng.sample::<f64, _>(StandardNormal));
    let targets = &features * planted + noise;
    QuadraticProblem::from_data(features, targets, ridge)
}

/// Collected sample set split across devices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPartition {
    collected: Vec<usize>,
    devices: Vec<Vec<usize>>,
}

impl DataPartition {
    /// Validate that device sets are disjoint and index into `0..m_total`.
    pub fn new(devices: Vec<Vec<usize>>, m_total: usize) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for &m in devices.iter().flatten() {
            if m >= m_total {
                return Err(invalid(
                    "collected_indices",
                    format!("index {m} out of range"),
                ));
            }
            if !seen.insert(m) {
                return Err(invalid(
                    "collected_indices",
                    format!("sample {m} held twice"),
                ));
            }
        }
        Ok(Self {
            collected: seen.into_iter().collect(),
            devices,
        })
    }

    /// Deal `indices` to `num_devices` devices in turn.
    pub fn round_robin(indices: &[usize], num_devices: usize, m_total: usize) -> Result<Self> {
        if num_devices == 0 {
            return Err(invalid("num_devices", "must be >= 1"));
        }
        let mut devices = vec![Vec::new(); num_devices];
        for (i, &m) in indices.iter().enumerate() {
            devices[i % num_devices].push(m);
        }
        Self::new(devices, m_total)
    }

    /// The first `round(fraction·m_total)` entries of a seeded permutation.
    /// Equal seeds give nested sets as the fraction grows.
    pub fn from_fraction(
        m_total: usize,
        fraction: f64,
        num_devices: usize,
        seed: u64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&fraction) {
            return Err(invalid("fraction", "must lie in [0, 1]"));
        }
        let mut order: Vec<usize> = (0..m_total).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let take = (fraction * m_total as f64).round() as usize;
        Self::round_robin(&order[..take], num_devices, m_total)
    }

    pub fn collected_indices(&self) -> &[usize] {
        &self.collected
    }

    pub fn devices(&self) -> &[Vec<usize>] {
        &self.devices
    }

    pub fn len(&self) -> usize {
        self.collected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.collected.is_empty()
    }
}

/// Aggregated gradient `g = (1/|B|)·Σₖ M_k·g_k` and its error `e = g − ∇F(x)`.
pub fn partial_gradient(
    problem: &QuadraticProblem,
    partition: &DataPartition,
    x: &DVector<f64>,
) -> Result<(DVector<f64>, DVector<f64>)> {
    if partition.is_empty() {
        return Err(Error::EmptyCollection);
    }
    if x.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            what: "iterate vs problem dimension",
            expected: problem.dim(),
            got: x.len(),
        });
    }
    let mut g = DVector::zeros(problem.dim());
    for local in partition.devices().iter().filter(|d| !d.is_empty()) {
        let g_k = problem.mean_gradient(local, x);
        g.axpy(local.len() as f64, &g_k, 1.0);
    }
    g /= partition.len() as f64;
    let e = &g - problem.full_gradient(x);
    Ok((g, e))
}

/// Gradient envelope `maxₘ ‖∇f(x; ξₘ)‖² ≤ β₁ + β₂‖∇F(x)‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub beta1: f64,
    pub beta2: f64,
}

impl Envelope {
    pub fn holds(&self, worst: f64, full: f64) -> bool {
        worst <= (self.beta1 + self.beta2 * full) * (1.0 + CHECK_RTOL) + f64::MIN_POSITIVE
    }
}

/// Operating point at which candidate envelopes are ranked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeTarget {
    pub collected: usize,
    pub rounds: u64,
}

fn rank_envelopes(
    problem: &QuadraticProblem,
    norms: &[(f64, f64)],
    target: EnvelopeTarget,
) -> Result<Envelope> {
    let beta2_max = norms
        .iter()
        .filter(|(_, full)| *full > 1e-300)
        .map(|(worst, full)| worst / full)
        .fold(0.0, f64::max);
    let mut candidates = vec![0.0];
    if beta2_max > 0.0 {
        const STEPS: usize = 96;
        let lo = beta2_max * 1e-8;
        candidates.extend((0..=STEPS).map(|s| lo * (beta2_max / lo).powf(s as f64 / STEPS as f64)));
    }

    let init_gap = problem.gap(&DVector::zeros(problem.dim()));
    let m_total = problem.m_total() as u64;
    let mut best: Option<(f64, Envelope)> = None;
    for beta2 in candidates {
        let beta1 = norms
            .iter()
            .map(|(worst, full)| worst - beta2 * full)
            .fold(0.0, f64::max);
        let params = ConvergenceParams {
            mu: problem.mu,
            lip: problem.lip,
            beta1,
            beta2,
            init_gap,
        };
        let bound = convergence_bound(target.rounds, target.collected as f64, m_total, &params)?;
        if bound.non_contractive {
            continue;
        }
        if best.is_none_or(|(b, _)| bound.value < b) {
            best = Some((bound.value, Envelope { beta1, beta2 }));
        }
    }
    // β₂ = 0 always contracts because μ > 0.
    Ok(best.expect("beta2 = 0 is always contractive").1)
}

/// Fit (β₁, β₂) so the envelope holds at every probe, choosing the pair that
/// minimizes the convergence bound at `target`.
pub fn fit_gradient_envelope(
    problem: &QuadraticProblem,
    probes: &[DVector<f64>],
    target: EnvelopeTarget,
) -> Result<Envelope> {
    if probes.is_empty() {
        return Err(invalid("probe_points", "need at least one probe"));
    }
    let norms: Vec<(f64, f64)> = probes.iter().map(|x| problem.gradient_norms(x)).collect();
    rank_envelopes(problem, &norms, target)
}

/// Points among `points` where the envelope fails.
pub fn envelope_violations(
    problem: &QuadraticProblem,
    env: &Envelope,
    points: &[DVector<f64>],
) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, x)| {
            let (worst, full) = problem.gradient_norms(x);
            !env.holds(worst, full)
        })
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DescentConfig {
    /// Seed for the envelope probes and hold-out points.
    pub seed: u64,
    pub perturbations: usize,
    pub holdout: usize,
    /// Hold-out failures are folded back into the probes at most this often.
    pub max_refits: usize,
    /// Perturbation radius relative to ‖x₀ − x*‖.
    pub perturbation_scale: f64,
}

impl Default for DescentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            perturbations: 100,
            holdout: 1000,
            max_refits: 10,
            perturbation_scale: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryReport {
    pub rounds: u64,
    pub collected: usize,
    pub missing_ratio: f64,
    pub mu: f64,
    pub lip: f64,
    /// F(xᵢ) − F(x*) for i = 0..=rounds
    pub gaps: Vec<f64>,
    /// ‖eᵢ‖²
    pub grad_error_sq: Vec<f64>,
    pub theorem_bound: Vec<f64>,
    /// 4·ratio²·(β₁ + 2β₂·L·gapᵢ)
    pub error_bound: Vec<f64>,
    pub beta1_hat: f64,
    pub beta2_hat: f64,
    pub psi_hat: f64,
    pub psi_contractive: bool,
    pub envelope_validated: bool,
    pub envelope_refits: usize,
    /// Iterates whose gap exceeds the unrolled bound.
    pub bound_violations: usize,
    /// Iterates whose gradient error exceeds the per-step bound.
    pub error_bound_violations: usize,
    /// Steps where gapᵢ₊₁ > Ψ·gapᵢ + 2·ratio²·β₁/L.
    pub recursion_violations: usize,
    /// Full-data runs only: iterates with gapᵢ > (1 − μ/L)ⁱ·gap₀.
    pub contraction_violations: usize,
    pub bound_violated: bool,
}

fn exceeds(lhs: f64, rhs: f64, scale: f64) -> bool {
    lhs > rhs + CHECK_RTOL * rhs.abs().max(scale)
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let n = v.norm();
    if n > 0.0 {
        v / n
    } else {
        v
    }
}

fn perturbed_points(
    rng: &mut ChaCha8Rng,
    anchors: &[DVector<f64>],
    radius: f64,
    count: usize,
) -> Vec<DVector<f64>> {
    (0..count)
        .map(|_| {
            let anchor = &anchors[rng.random_range(0..anchors.len())];
            let r = radius * rng.random::<f64>();
            anchor + random_direction(rng, anchor.len()) * r
        })
        .collect()
}

/// Gradient descent from x₀ = 0 with step 1/L using only the collected samples.
pub fn run_descent(
    problem: &QuadraticProblem,
    partition: &DataPartition,
    rounds: u64,
    cfg: &DescentConfig,
) -> Result<TrajectoryReport> {
    let lip = problem.lip;
    let mu = problem.mu;
    let mut xs = vec![DVector::zeros(problem.dim())];
    let mut errors = Vec::with_capacity(rounds as usize + 1);
    for i in 0..=rounds as usize {
        let (g, e) = partial_gradient(problem, partition, &xs[i])?;
        errors.push(e.norm_squared());
        if i < rounds as usize {
            xs.push(&xs[i] - g / lip);
        }
    }
    let gaps: Vec<f64> = xs.iter().map(|x| problem.gap(x)).collect();
    let gap0 = gaps[0];
    let m_total = problem.m_total();
    let collected = partition.len();
    let target = EnvelopeTarget { collected, rounds };

    // Envelope: iterates plus random perturbations, re-checked on fresh points.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radius = cfg.perturbation_scale * problem.x_star.norm().max(f64::EPSILON);
    let mut probes = xs.clone();
    probes.extend(perturbed_points(&mut rng, &xs, radius, cfg.perturbations));
    let mut norms: Vec<(f64, f64)> = probes.iter().map(|x| problem.gradient_norms(x)).collect();
    let mut env = rank_envelopes(problem, &norms, target)?;
    let mut refits = 0;
    let mut envelope_validated = false;
    loop {
        let holdout = perturbed_points(&mut rng, &xs, radius, cfg.holdout);
        let failed = envelope_violations(problem, &env, &holdout);
        if failed.is_empty() {
            envelope_validated = true;
            break;
        }
        if refits == cfg.max_refits {
            break;
        }
        refits += 1;
        norms.extend(
            failed
                .into_iter()
                .map(|i| problem.gradient_norms(&holdout[i])),
        );
        env = rank_envelopes(problem, &norms, target)?;
    }

    let ratio = (m_total - collected) as f64 / m_total as f64;
    let params = ConvergenceParams {
        mu,
        lip,
        beta1: env.beta1,
        beta2: env.beta2,
        init_gap: gap0,
    };
    let psi = contraction_factor(collected as f64, m_total as u64, &params)?;
    let theorem_bound = (0..=rounds)
        .map(|i| convergence_bound(i, collected as f64, m_total as u64, &params).map(|b| b.value))
        .collect::<Result<Vec<_>>>()?;
    let error_bound: Vec<f64> = gaps
        .iter()
        .map(|g| 4.0 * ratio * ratio * (env.beta1 + 2.0 * env.beta2 * lip * g))
        .collect();

    let scale = gap0 * 1e-3;
    let bound_violations = gaps
        .iter()
        .zip(&theorem_bound)
        .filter(|(g, b)| exceeds(**g, **b, scale))
        .count();
    let error_bound_violations = errors
        .iter()
        .zip(&error_bound)
        .filter(|(e, b)| exceeds(**e, **b, scale * lip))
        .count();
    let floor = 2.0 * ratio * ratio * env.beta1 / lip;
    let recursion_violations = gaps
        .windows(2)
        .filter(|w| exceeds(w[1], psi.value * w[0] + floor, scale))
        .count();
    let contraction_violations = if collected == m_total {
        let rate = 1.0 - mu / lip;
        gaps.iter()
            .enumerate()
            .filter(|(i, g)| exceeds(**g, rate.powi(*i as i32) * gap0, scale))
            .count()
    } else {
        0
    };

    Ok(TrajectoryReport {
        rounds,
        collected,
        missing_ratio: ratio,
        mu,
        lip,
        gaps,
        grad_error_sq: errors,
        theorem_bound,
        error_bound,
        beta1_hat: env.beta1,
        beta2_hat: env.beta2,
        psi_hat: psi.value,
        psi_contractive: !psi.non_contractive,
        envelope_validated,
        envelope_refits: refits,
        bound_violations,
        error_bound_violations,
        recursion_violations,
        contraction_violations,
        bound_violated: bound_violations > 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        let a = generate_problem(5, 200, 0.1, 7).unwrap();
        let b = generate_problem(5, 200, 0.1, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_problem(5, 200, 0.1, 8).unwrap();
        assert_ne!(a.features, c.features);
    }

    #[test]
    fn scalar_problem_curvature() {
        let p = generate_problem(1, 1, 0.3, 2).unwrap();
        let a = p.features[(0, 0)];
        assert!((p.mu - (a * a + 0.3)).abs() < 1e-12);
        assert!((p.lip - p.mu).abs() < 1e-12);
    }

    #[test]
    fn heavy_ridge_flattens_conditioning() {
        let p = generate_problem(4, 50, 1e6, 3).unwrap();
        assert!(p.mu / p.lip > 0.999);
        assert!(p.mu >= 1e6);
    }

    #[test]
    fn gap_matches_loss_difference() {
        let p = generate_problem(3, 40, 0.2, 11).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        let direct = p.loss(&x) - p.loss(&p.x_star);
        assert!((p.gap(&x) - direct).abs() < 1e-10 * (1.0 + direct));
    }

    #[test]
    fn full_collection_has_no_gradient_error() {
        let p = generate_problem(4, 60, 0.1, 5).unwrap();
        let all: Vec<usize> = (0..60).collect();
        let part = DataPartition::round_robin(&all, 3, 60).unwrap();
        let x = DVector::from_vec(vec![1.0, -2.0, 0.5, 0.0]);
        let (g, e) = partial_gradient(&p, &part, &x).unwrap();
        assert!(e.norm() <= 1e-12 * g.norm().max(1.0));
    }

    #[test]
    fn aggregation_does_not_depend_on_the_split() {
        let p = generate_problem(3, 30, 0.1, 9).unwrap();
        let b: Vec<usize> = vec![0, 4, 5, 9, 13, 21, 22, 29];
        let one = DataPartition::round_robin(&b, 1, 30).unwrap();
        let many = DataPartition::round_robin(&b, 5, 30).unwrap();
        let x = DVector::from_vec(vec![0.2, 0.1, -0.7]);
        let (g1, _) = partial_gradient(&p, &one, &x).unwrap();
        let (g5, _) = partial_gradient(&p, &many, &x).unwrap();
        assert!((g1 - g5).norm() < 1e-12);
    }

    #[test]
    fn hand_sized_gradient_error() {
        // m = 4, d = 1, features 1, 2, 3, 4; targets 0; ridge 0.5; B = {0, 1}.
        let features = DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 4.0]);
        let targets = DVector::zeros(4);
        let p = QuadraticProblem::from_data(features, targets, 0.5).unwrap();
        let part = DataPartition::new(vec![vec![0], vec![1]], 4).unwrap();
        let x = DVector::from_vec(vec![2.0]);
        let (g, e) = partial_gradient(&p, &part, &x).unwrap();
        // ∇f_m = a_m²·x + ρx: 2+1, 8+1, 18+1, 32+1
        let g_expected = (3.0 + 9.0) / 2.0;
        let full = (3.0 + 9.0 + 19.0 + 33.0) / 4.0;
        assert!((g[0] - g_expected).abs() < 1e-12);
        assert!((e[0] - (g_expected - full)).abs() < 1e-12);
    }

    #[test]
    fn empty_collection_is_an_error() {
        let p = generate_problem(2, 10, 0.1, 1).unwrap();
        let part = DataPartition::new(vec![vec![], vec![]], 10).unwrap();
        let x = DVector::zeros(2);
        assert_eq!(
            partial_gradient(&p, &part, &x).unwrap_err(),
            Error::EmptyCollection
        );
    }

    #[test]
    fn partition_validation() {
        assert!(DataPartition::new(vec![vec![1, 2], vec![2]], 5).is_err());
        assert!(DataPartition::new(vec![vec![7]], 5).is_err());
        let part = DataPartition::from_fraction(100, 0.25, 4, 3).unwrap();
        assert_eq!(part.len(), 25);
        let bigger = DataPartition::from_fraction(100, 0.5, 4, 3).unwrap();
        assert!(part
            .collected_indices()
            .iter()
            .all(|m| bigger.collected_indices().contains(m)));
    }

    #[test]
    fn identical_samples_admit_unit_beta2() {
        let features = DMatrix::from_fn(6, 2, |_, j| if j == 0 { 1.5 } else { -0.5 });
        let targets = DVector::from_element(6, 0.7);
        let p = QuadraticProblem::from_data(features, targets, 0.2).unwrap();
        let env = Envelope {
            beta1: 0.0,
            beta2: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<DVector<f64>> = (0..50)
            .map(|_| random_direction(&mut rng, 2) * 3.0)
            .collect();
        assert!(envelope_violations(&p, &env, &pts).is_empty());
    }

    #[test]
    fn probing_only_the_optimum_fixes_beta1() {
        let p = generate_problem(3, 50, 0.1, 4).unwrap();
        let probes = vec![p.x_star.clone(), p.x_star.clone()];
        let env = fit_gradient_envelope(
            &p,
            &probes,
            EnvelopeTarget {
                collected: 25,
                rounds: 10,
            },
        )
        .unwrap();
        let expected = (0..50)
            .map(|m| p.sample_gradient(m, &p.x_star).norm_squared())
            .fold(0.0, f64::max);
        assert!((env.beta1 - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn no_rounds_reports_initial_gap() {
        let p = generate_problem(3, 40, 0.1, 6).unwrap();
        let part = DataPartition::from_fraction(40, 0.5, 2, 1).unwrap();
        let rep = run_descent(&p, &part, 0, &DescentConfig::default()).unwrap();
        assert_eq!(rep.gaps.len(), 1);
        assert!((rep.gaps[0] - (p.loss(&DVector::zeros(3)) - p.loss(&p.x_star))).abs() < 1e-9);
    }
}
