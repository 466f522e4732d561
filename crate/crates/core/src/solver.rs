//! C-eigenpairs `(λ, x, y)` of a piezoelectric-type tensor:
//!
//! ```text
//! A y y = λ x,   x A y = λ y,   xᵀx = 1,   yᵀy = 1.
//! ```
//!
//! The largest value maximizes `x A y y` over the product of unit spheres.
//! For fixed `y` the best `x` is `Ayy / ‖Ayy‖`; for fixed `x` the objective is
//! the quadratic form `yᵀ G(x) y` with `G(x) = Σ_i x_i A_i`. Alternating the
//! two gives a monotone ascent that converges to local maximizers.
//!
//! Saddle-type eigenpairs (smaller values, `λ = 0`) are not attractors of any
//! ascent, so [`solve_spectrum`] also runs Gauss–Newton on the full system
//! directly from each random start. Every candidate is polished with
//! [`refine`], mapped to its canonical sign representative and deduplicated.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PiezoError, Result};
use crate::linalg::{dominant_eigenpair, norm, orient};
use crate::tensor::{PiezoTensor, UnitVector};

/// Iteration cap of the Gauss–Newton polish in [`refine`].
pub const REFINE_MAX_ITERS: usize = 50;
/// Iteration cap when Gauss–Newton starts from a raw random point.
pub const SEEK_MAX_ITERS: usize = 200;
/// Consecutive degenerate restarts tolerated by the ascent.
pub const MAX_DEGENERATE_RESTARTS: usize = 10;
/// Distinct eigenvectors sharing one value that mark a continuous family.
pub const FAMILY_MIN_MEMBERS: usize = 5;
/// `σ_min / σ_max` of the system Jacobian below which a root is non-isolated.
pub const RANK_DEFICIENCY_RATIO: f64 = 1e-6;
/// Slack allowed below the grid oracle before [`largest`] reports a miss.
pub const CERTIFY_SLACK: f64 = 1e-6;
/// Angular resolution of the grid oracle used by [`largest`].
pub const CERTIFY_RESOLUTION: usize = 200;

const MAX_HALVINGS: usize = 40;
const POLISH_STEPS: usize = 2;
const RIDGE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub num_starts: usize,
    pub max_outer_iters: usize,
    /// Stop the ascent when the objective changes by less than this
    /// (relative to `max(1, |λ|)`).
    pub ascent_tol: f64,
    /// Target for `max(r1, r2)`, relative to `max(1, ‖A‖_F)`.
    pub refine_tol: f64,
    pub dedup_tol: f64,
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            num_starts: 100,
            max_outer_iters: 500,
            ascent_tol: 1e-12,
            refine_tol: 1e-12,
            dedup_tol: 1e-6,
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_starts(mut self, num_starts: usize) -> Self {
        self.num_starts = num_starts;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_starts == 0 {
            return Err(PiezoError::InvalidConfig("num_starts must be at least 1".into()));
        }
        if self.max_outer_iters == 0 {
            return Err(PiezoError::InvalidConfig("max_outer_iters must be at least 1".into()));
        }
        for (name, v) in [
            ("ascent_tol", self.ascent_tol),
            ("refine_tol", self.refine_tol),
            ("dedup_tol", self.dedup_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(PiezoError::InvalidConfig(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    fn residual_target(&self, a: &PiezoTensor) -> f64 {
        self.refine_tol * a.frobenius_norm().max(1.0)
    }
}

/// Per-pair solver flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairDiagnostics {
    /// `λ = 0`, or the ascent hit `Ayy = 0` repeatedly.
    pub degenerate: bool,
    /// Gauss–Newton could not reach the residual target.
    pub no_progress: bool,
    /// A ridge was added to singular normal equations.
    pub ridge: bool,
    /// Representative of a continuous eigenvector family.
    pub family: bool,
}

impl PairDiagnostics {
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.degenerate {
            out.push("degenerate");
        }
        if self.family {
            out.push("family");
        }
        if self.no_progress {
            out.push("no-progress");
        }
        if self.ridge {
            out.push("ridge");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CEigenPair {
    pub value: f64,
    pub left: UnitVector,
    pub right: UnitVector,
    /// `max(‖Ayy - λx‖, ‖xAy - λy‖)`.
    pub residual: f64,
    pub diagnostics: PairDiagnostics,
}

impl CEigenPair {
    /// Pair with its residual evaluated against `a`.
    pub fn evaluated(a: &PiezoTensor, value: f64, left: UnitVector, right: UnitVector) -> Result<Self> {
        if left.dim() != a.dim() || right.dim() != a.dim() {
            return Err(PiezoError::DimensionMismatch {
                expected: a.dim(),
                found: if left.dim() != a.dim() { left.dim() } else { right.dim() },
            });
        }
        let mut p = CEigenPair {
            value,
            left,
            right,
            residual: 0.0,
            diagnostics: PairDiagnostics::default(),
        };
        let (r1, r2) = residuals(a, &p);
        p.residual = r1.max(r2);
        Ok(p)
    }

    /// The four members of the sign group, starting with `self`.
    pub fn sign_variants(&self) -> [CEigenPair; 4] {
        let mk = |v: f64, x: UnitVector, y: UnitVector| CEigenPair {
            value: v,
            left: x,
            right: y,
            ..self.clone()
        };
        [
            self.clone(),
            mk(self.value, self.left.clone(), self.right.negated()),
            mk(-self.value, self.left.negated(), self.right.clone()),
            mk(-self.value, self.left.negated(), self.right.negated()),
        ]
    }
}

/// Deduplicated canonical eigenpairs, sorted by value descending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSpectrum {
    pub pairs: Vec<CEigenPair>,
    /// How many refined candidates merged into each pair.
    pub basin_counts: Vec<usize>,
    /// Candidates dropped because refinement did not converge.
    pub rejected: usize,
}

impl EigenSpectrum {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    /// Values strictly above `threshold`, one per eigenvector group.
    pub fn positive_values(&self, threshold: f64) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).filter(|&v| v > threshold).collect()
    }
}

/// `(‖Ayy - λx‖₂, ‖xAy - λy‖₂)`.
pub fn residuals(a: &PiezoTensor, p: &CEigenPair) -> (f64, f64) {
    let (x, y, lam) = (p.left.as_slice(), p.right.as_slice(), p.value);
    let ayy = a.contract_yy_unchecked(y);
    let xay = a.contract_xy_unchecked(x, y);
    let r1 = ayy
        .iter()
        .zip(x)
        .map(|(v, xi)| (v - lam * xi).powi(2))
        .sum::<f64>()
        .sqrt();
    let r2 = xay
        .iter()
        .zip(y)
        .map(|(v, yi)| (v - lam * yi).powi(2))
        .sum::<f64>()
        .sqrt();
    (r1, r2)
}

fn check_pair_dims(a: &PiezoTensor, x: &UnitVector, y: &UnitVector) -> Result<()> {
    for d in [x.dim(), y.dim()] {
        if d != a.dim() {
            return Err(PiezoError::DimensionMismatch {
                expected: a.dim(),
                found: d,
            });
        }
    }
    Ok(())
}

fn finish(a: &PiezoTensor, x: Vec<f64>, y: Vec<f64>, diagnostics: PairDiagnostics) -> CEigenPair {
    let value = a.scalar_form_unchecked(&x, &y);
    let mut p = CEigenPair {
        value,
        left: UnitVector::normalized_unchecked(x),
        right: UnitVector::normalized_unchecked(y),
        residual: 0.0,
        diagnostics,
    };
    let (r1, r2) = residuals(a, &p);
    p.residual = r1.max(r2);
    p
}

/// Result of the monotone ascent together with its objective trace.
#[derive(Debug, Clone)]
pub struct AscentTrace {
    pub pair: CEigenPair,
    /// Objective after every half-step (x-update, then y-update).
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// Alternating maximization of `x A y y` from `(x0, y0)`.
pub fn alternating_ascent(a: &PiezoTensor, x0: &UnitVector, y0: &UnitVector, cfg: &SolverConfig) -> Result<CEigenPair> {
    cfg.validate()?;
    check_pair_dims(a, x0, y0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    Ok(ascent_traced(a, x0, y0, cfg, &mut rng).pair)
}

pub(crate) fn ascent_traced<R: Rng + ?Sized>(
    a: &PiezoTensor,
    x0: &UnitVector,
    y0: &UnitVector,
    cfg: &SolverConfig,
    rng: &mut R,
) -> AscentTrace {
    let n = a.dim();
    let zero_thresh = 1e-15 * a.frobenius_norm();
    let mut x = x0.as_slice().to_vec();
    let mut y = y0.as_slice().to_vec();
    let mut obj = a.scalar_form_unchecked(&x, &y);
    let mut trace = vec![obj];
    let mut best: (f64, Vec<f64>, Vec<f64>) = (obj, x.clone(), y.clone());
    let mut restarts = 0;
    let mut iterations = 0;

    while iterations < cfg.max_outer_iters {
        iterations += 1;
        let ayy = a.contract_yy_unchecked(&y);
        let len = norm(&ayy);
        if len <= zero_thresh {
            restarts += 1;
            if restarts >= MAX_DEGENERATE_RESTARTS {
                let (_, bx, by) = best;
                let diagnostics = PairDiagnostics {
                    degenerate: true,
                    ..Default::default()
                };
                return AscentTrace {
                    pair: finish(a, bx, by, diagnostics),
                    objective: trace,
                    iterations,
                };
            }
            x = UnitVector::random(n, rng).into_inner();
            y = UnitVector::random(n, rng).into_inner();
            obj = a.scalar_form_unchecked(&x, &y);
            trace.clear();
            trace.push(obj);
            continue;
        }
        restarts = 0;
        x = ayy.iter().map(|v| v / len).collect();
        trace.push(len);

        let g = a.weighted_slice_sum_unchecked(&x);
        let (mu, mut v) = dominant_eigenpair(&g);
        if mu < 0.0 {
            x.iter_mut().for_each(|c| *c = -*c);
        }
        orient(&mut v, cfg.dedup_tol);
        y = v;
        let next = a.scalar_form_unchecked(&x, &y);
        trace.push(next);
        if next > best.0 {
            best = (next, x.clone(), y.clone());
        }
        let done = (next - obj).abs() < cfg.ascent_tol * next.abs().max(1.0);
        obj = next;
        if done {
            break;
        }
    }
    AscentTrace {
        pair: finish(a, x, y, PairDiagnostics::default()),
        objective: trace,
        iterations,
    }
}

/// Residual vector of the system with `x`, `y` taken unit and `λ = xAyy`.
fn system_residual(a: &PiezoTensor, lam: f64, x: &[f64], y: &[f64]) -> f64 {
    let ayy = a.contract_yy_unchecked(y);
    let xay = a.contract_xy_unchecked(x, y);
    let s: f64 = ayy.iter().zip(x).map(|(v, xi)| (v - lam * xi).powi(2)).sum::<f64>()
        + xay.iter().zip(y).map(|(v, yi)| (v - lam * yi).powi(2)).sum::<f64>();
    s.sqrt()
}

/// Jacobian of `F(λ, x, y) = [Ayy - λx; xAy - λy; xᵀx - 1; yᵀy - 1]`
/// with respect to `(λ, x, y)`: a `(2n + 2) × (2n + 1)` matrix.
pub(crate) fn system_jacobian(a: &PiezoTensor, lam: f64, x: &[f64], y: &[f64]) -> DMatrix<f64> {
    let n = a.dim();
    let mut j = DMatrix::zeros(2 * n + 2, 2 * n + 1);
    let g = a.weighted_slice_sum_unchecked(x);
    // slice_y[(i, k)] = Σ_j a_ijk y_j
    let slice_y = DMatrix::from_fn(n, n, |i, k| (0..n).map(|m| a.get(i, m, k) * y[m]).sum::<f64>());
    for i in 0..n {
        j[(i, 0)] = -x[i];
        j[(i, 1 + i)] = -lam;
        for m in 0..n {
            j[(i, 1 + n + m)] = 2.0 * slice_y[(i, m)];
        }
    }
    for k in 0..n {
        let row = n + k;
        j[(row, 0)] = -y[k];
        for m in 0..n {
            j[(row, 1 + m)] = slice_y[(m, k)];
            j[(row, 1 + n + m)] = g[(m, k)];
        }
        j[(row, 1 + n + k)] -= lam;
    }
    for m in 0..n {
        j[(2 * n, 1 + m)] = 2.0 * x[m];
        j[(2 * n + 1, 1 + n + m)] = 2.0 * y[m];
    }
    j
}

fn system_values(a: &PiezoTensor, lam: f64, x: &[f64], y: &[f64]) -> DVector<f64> {
    let n = a.dim();
    let ayy = a.contract_yy_unchecked(y);
    let xay = a.contract_xy_unchecked(x, y);
    let mut f = DVector::zeros(2 * n + 2);
    for i in 0..n {
        f[i] = ayy[i] - lam * x[i];
        f[n + i] = xay[i] - lam * y[i];
    }
    f[2 * n] = x.iter().map(|v| v * v).sum::<f64>() - 1.0;
    f[2 * n + 1] = y.iter().map(|v| v * v).sum::<f64>() - 1.0;
    f
}

/// Whether the Jacobian at `p` is numerically rank deficient, i.e. the root
/// lies on a continuous family.
pub fn is_non_isolated(a: &PiezoTensor, p: &CEigenPair) -> bool {
    let j = system_jacobian(a, p.value, &p.left, &p.right);
    let sv = j.singular_values();
    let max = sv.max();
    let min = sv.min();
    max == 0.0 || min <= RANK_DEFICIENCY_RATIO * max
}

struct NewtonOutcome {
    x: Vec<f64>,
    y: Vec<f64>,
    residual: f64,
    converged: bool,
    ridge: bool,
}

/// Gauss–Newton with step halving on the overdetermined system. After each
/// step `x`, `y` are renormalized and `λ` reset to `xAyy`.
fn gauss_newton(a: &PiezoTensor, x0: &[f64], y0: &[f64], max_iters: usize, target: f64) -> NewtonOutcome {
    let n = a.dim();
    let mut x = x0.to_vec();
    let mut y = y0.to_vec();
    let mut lam = a.scalar_form_unchecked(&x, &y);
    let mut res = system_residual(a, lam, &x, &y);
    let mut ridge = false;
    let mut polish = 0;

    for _ in 0..max_iters {
        // a couple of extra steps past the target take the residual to roundoff
        if res <= target {
            polish += 1;
            if polish > POLISH_STEPS {
                break;
            }
        }
        let j = system_jacobian(a, lam, &x, &y);
        let f = system_values(a, lam, &x, &y);
        let jt = j.transpose();
        let mut normal = &jt * &j;
        let rhs = -(&jt * f);
        let step = match Cholesky::new(normal.clone()) {
            Some(ch) => ch.solve(&rhs),
            None => {
                ridge = true;
                let bump = RIDGE * normal.diagonal().max().max(1.0);
                for d in 0..normal.nrows() {
                    normal[(d, d)] += bump;
                }
                match Cholesky::new(normal) {
                    Some(ch) => ch.solve(&rhs),
                    None => break,
                }
            }
        };
        if !step.iter().all(|v| v.is_finite()) {
            break;
        }

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut cx: Vec<f64> = (0..n).map(|i| x[i] + t * step[1 + i]).collect();
            let mut cy: Vec<f64> = (0..n).map(|i| y[i] + t * step[1 + n + i]).collect();
            let (nx, ny) = (norm(&cx), norm(&cy));
            if nx > 0.0 && ny > 0.0 && nx.is_finite() && ny.is_finite() {
                cx.iter_mut().for_each(|c| *c /= nx);
                cy.iter_mut().for_each(|c| *c /= ny);
                let clam = a.scalar_form_unchecked(&cx, &cy);
                let cres = system_residual(a, clam, &cx, &cy);
                if cres < res {
                    accepted = Some((cx, cy, clam, cres));
                    break;
                }
            }
            t *= 0.5;
        }
        match accepted {
            Some((cx, cy, clam, cres)) => {
                x = cx;
                y = cy;
                lam = clam;
                res = cres;
            }
            None => break,
        }
    }
    let converged = {
        let probe = CEigenPair {
            value: lam,
            left: UnitVector::normalized_unchecked(x.clone()),
            right: UnitVector::normalized_unchecked(y.clone()),
            residual: 0.0,
            diagnostics: PairDiagnostics::default(),
        };
        let (r1, r2) = residuals(a, &probe);
        r1.max(r2) <= target
    };
    NewtonOutcome {
        x,
        y,
        residual: res,
        converged,
        ridge,
    }
}

/// Polish `p` with Gauss–Newton on the full system. If the residual target
/// is not met within [`REFINE_MAX_ITERS`] iterations the input is returned
/// unchanged with `no_progress` set.
pub fn refine(a: &PiezoTensor, p: &CEigenPair, cfg: &SolverConfig) -> Result<CEigenPair> {
    cfg.validate()?;
    check_pair_dims(a, &p.left, &p.right)?;
    Ok(refine_unchecked(a, p, cfg, REFINE_MAX_ITERS))
}

fn refine_unchecked(a: &PiezoTensor, p: &CEigenPair, cfg: &SolverConfig, max_iters: usize) -> CEigenPair {
    let target = cfg.residual_target(a);
    if p.residual <= target && (p.value - a.scalar_form_unchecked(&p.left, &p.right)).abs() <= target {
        return p.clone();
    }
    let out = gauss_newton(a, &p.left, &p.right, max_iters, target);
    if !out.converged {
        let mut same = p.clone();
        same.diagnostics.no_progress = true;
        same.diagnostics.ridge |= out.ridge;
        return same;
    }
    debug_assert!(out.residual.is_finite());
    let diagnostics = PairDiagnostics {
        ridge: out.ridge,
        degenerate: p.diagnostics.degenerate,
        ..Default::default()
    };
    finish(a, out.x, out.y, diagnostics)
}

/// Sign-group representative: `λ ≥ 0`, first significant component of `y`
/// positive, and for `λ ≈ 0` also the first significant component of `x`.
pub fn canonicalize(p: &CEigenPair, tol: f64) -> CEigenPair {
    let mut x = p.left.as_slice().to_vec();
    let mut y = p.right.as_slice().to_vec();
    let mut value = p.value;
    if value < 0.0 {
        value = -value;
        x.iter_mut().for_each(|c| *c = -*c);
    }
    orient(&mut y, tol);
    let mut diagnostics = p.diagnostics;
    if value.abs() <= tol {
        orient(&mut x, tol);
        value = value.abs();
        diagnostics.degenerate = true;
    }
    CEigenPair {
        value,
        left: UnitVector::normalized_unchecked(x),
        right: UnitVector::normalized_unchecked(y),
        residual: p.residual,
        diagnostics,
    }
}

/// `min` over the sign group of `max(‖x₁ - x₂‖, ‖y₁ - y₂‖)`.
pub fn sign_group_distance(p: &CEigenPair, q: &CEigenPair) -> f64 {
    let (px, py) = (p.left.as_slice(), p.right.as_slice());
    let mut best = f64::INFINITY;
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            let dx = px
                .iter()
                .zip(q.left.iter())
                .map(|(a, b)| (a - sx * b).powi(2))
                .sum::<f64>()
                .sqrt();
            let dy = py
                .iter()
                .zip(q.right.iter())
                .map(|(a, b)| (a - sy * b).powi(2))
                .sum::<f64>()
                .sqrt();
            best = best.min(dx.max(dy));
        }
    }
    best
}

fn same_value(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(1.0)
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (p, q) in a.iter().zip(b) {
        match p.total_cmp(q) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Descending value, then ascending `x`, then ascending `y`.
pub(crate) fn spectrum_order(p: &CEigenPair, q: &CEigenPair) -> std::cmp::Ordering {
    q.value
        .total_cmp(&p.value)
        .then_with(|| lex_cmp(&p.left, &q.left))
        .then_with(|| lex_cmp(&p.right, &q.right))
}

/// Outcome of a single multi-start trial.
fn run_start(a: &PiezoTensor, cfg: &SolverConfig, start: u64) -> Vec<CEigenPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(start);
    let n = a.dim();
    let x0 = UnitVector::random(n, &mut rng);
    let y0 = UnitVector::random(n, &mut rng);

    let ascended = ascent_traced(a, &x0, &y0, cfg, &mut rng).pair;
    let polished = refine_unchecked(a, &ascended, cfg, REFINE_MAX_ITERS);

    let seed = finish(a, x0.into_inner(), y0.into_inner(), PairDiagnostics::default());
    let sought = refine_unchecked(a, &seed, cfg, SEEK_MAX_ITERS);

    [polished, sought]
        .into_iter()
        .filter(|p| !p.diagnostics.no_progress)
        .collect()
}

/// Cluster canonical candidates. Input must already be sorted by
/// [`spectrum_order`].
fn deduplicate(a: &PiezoTensor, candidates: Vec<CEigenPair>, cfg: &SolverConfig) -> (Vec<CEigenPair>, Vec<usize>) {
    let mut reps: Vec<CEigenPair> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    let vec_tol = 100.0 * cfg.dedup_tol;
    for c in candidates {
        let hit = reps
            .iter()
            .rposition(|r| same_value(r.value, c.value, cfg.dedup_tol) && sign_group_distance(r, &c) <= vec_tol);
        match hit {
            Some(i) => {
                counts[i] += 1;
                if c.residual < reps[i].residual && reps[i].diagnostics.family == c.diagnostics.family {
                    let keep = reps[i].diagnostics;
                    reps[i] = c;
                    reps[i].diagnostics.degenerate |= keep.degenerate;
                }
            }
            None => {
                reps.push(c);
                counts.push(1);
            }
        }
    }

    // collapse continuous families: many distinct, non-isolated roots at one value
    let mut out_pairs = Vec::new();
    let mut out_counts = Vec::new();
    let mut i = 0;
    while i < reps.len() {
        let mut end = i + 1;
        while end < reps.len() && same_value(reps[i].value, reps[end].value, cfg.dedup_tol) {
            end += 1;
        }
        let group = &reps[i..end];
        let flat: Vec<usize> = (i..end).filter(|&g| is_non_isolated(a, &reps[g])).collect();
        if flat.len() >= FAMILY_MIN_MEMBERS {
            let mut rep = reps[flat[0]].clone();
            rep.diagnostics.family = true;
            let total: usize = flat.iter().map(|&g| counts[g]).sum();
            for g in i..end {
                if !flat.contains(&g) {
                    out_pairs.push(reps[g].clone());
                    out_counts.push(counts[g]);
                }
            }
            out_pairs.push(rep);
            out_counts.push(total);
        } else {
            out_pairs.extend(group.iter().cloned());
            out_counts.extend_from_slice(&counts[i..end]);
        }
        i = end;
    }

    let mut order: Vec<usize> = (0..out_pairs.len()).collect();
    order.sort_by(|&p, &q| spectrum_order(&out_pairs[p], &out_pairs[q]));
    (
        order.iter().map(|&k| out_pairs[k].clone()).collect(),
        order.iter().map(|&k| out_counts[k]).collect(),
    )
}

/// Multi-start search for all C-eigenpairs, deterministic in `cfg`.
pub fn solve_spectrum(a: &PiezoTensor, cfg: &SolverConfig) -> Result<EigenSpectrum> {
    cfg.validate()?;
    let n = a.dim();
    if a.frobenius_norm() == 0.0 {
        // every unit pair is an eigenpair with λ = 0
        let p = CEigenPair {
            value: 0.0,
            left: UnitVector::basis(n, 0),
            right: UnitVector::basis(n, 0),
            residual: 0.0,
            diagnostics: PairDiagnostics {
                degenerate: true,
                family: true,
                ..Default::default()
            },
        };
        return Ok(EigenSpectrum {
            pairs: vec![p],
            basin_counts: vec![2 * cfg.num_starts],
            rejected: 0,
        });
    }

    let mut candidates = Vec::with_capacity(2 * cfg.num_starts);
    let mut rejected = 0;
    for start in 0..cfg.num_starts as u64 {
        let found = run_start(a, cfg, start);
        rejected += 2 - found.len();
        candidates.extend(found.iter().map(|p| canonicalize(p, cfg.dedup_tol)));
    }
    candidates.sort_by(spectrum_order);
    let (pairs, basin_counts) = deduplicate(a, candidates, cfg);
    Ok(EigenSpectrum {
        pairs,
        basin_counts,
        rejected,
    })
}

/// Largest C-eigenpair, certified against the grid oracle for `n ≤ 3`.
pub fn largest(a: &PiezoTensor, cfg: &SolverConfig) -> Result<CEigenPair> {
    let spectrum = solve_spectrum(a, cfg)?;
    let top = spectrum.pairs.into_iter().next();
    let found = top.as_ref().map_or(f64::NEG_INFINITY, |p| p.value);
    if matches!(a.dim(), 2 | 3) {
        let bound = brute_force_lower_bound(a, CERTIFY_RESOLUTION)?;
        if found < bound - CERTIFY_SLACK {
            return Err(PiezoError::SolverMiss { found, bound });
        }
    }
    top.ok_or(PiezoError::SolverMiss { found, bound: f64::NAN })
}

/// Grid maximization of `‖Ayy‖` (the optimal `x A y y` for fixed `y`) over
/// spherical coordinates of `y`. A lower bound on the largest C-eigenvalue.
pub fn brute_force_lower_bound(a: &PiezoTensor, resolution: usize) -> Result<f64> {
    if resolution == 0 {
        return Err(PiezoError::InvalidConfig("resolution must be positive".into()));
    }
    let pi = std::f64::consts::PI;
    let mut best = 0.0f64;
    match a.dim() {
        2 => {
            for i in 0..resolution {
                let t = pi * i as f64 / resolution as f64;
                let y = [t.cos(), t.sin()];
                best = best.max(norm(&a.contract_yy_unchecked(&y)));
            }
        }
        3 => {
            for i in 0..=resolution {
                let theta = pi * i as f64 / resolution as f64;
                let (st, ct) = theta.sin_cos();
                for j in 0..(2 * resolution) {
                    let phi = pi * j as f64 / resolution as f64;
                    let (sp, cp) = phi.sin_cos();
                    let y = [st * cp, st * sp, ct];
                    best = best.max(norm(&a.contract_yy_unchecked(&y)));
                }
            }
        }
        n => return Err(PiezoError::UnsupportedDimension(n)),
    }
    Ok(best)
}

/// Smallest `max(‖x - x'‖, ‖y - y'‖)` between `p` and any member of the
/// spectrum with a matching value, modulo the sign group.
pub fn nearest_in(spectrum: &EigenSpectrum, p: &CEigenPair, value_tol: f64) -> Option<f64> {
    spectrum
        .pairs
        .iter()
        .filter(|q| (q.value - p.value.abs()).abs() <= value_tol)
        .map(|q| sign_group_distance(q, p))
        .min_by(f64::total_cmp)
}
