//! Fenchel-Rockafellar duality: values, gap, attainment and the LASSO
//! problem with exact recovery of its primal solution set.

mod convex_fn;

pub use convex_fn::{exp_conj, prox_exp, prox_exp_conj, ConvexFn};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector, DEFAULT_TOL, RANK_TOL};
use crate::operators::Operator;
use crate::problem::Triple;
use crate::solution_sets::{solve_affine, Ray, SetDesc, DYKSTRA_TOL};
use crate::splitting::{self, IterOptions};

/// The convex function whose subdifferential is `op`, up to an additive
/// constant, when it has one of the supported closed forms.
pub fn as_convex_fn(op: &Operator) -> Option<ConvexFn> {
    match op {
        Operator::Subdifferential(f) => Some(f.clone()),
        Operator::ShiftedL1 { lambda, shift } => Some(ConvexFn::ScaledL1WithLinear {
            lambda: *lambda,
            c: shift.clone(),
        }),
        Operator::ScaledIdentity { dim, alpha } if *alpha == 1.0 => Some(ConvexFn::QuadPlusConst { b: Vector::zeros(*dim) }),
        Operator::NormalConeAffine { set } => Some(ConvexFn::Indicator { set: set.clone() }),
        Operator::NormalConeBox { lo, hi } => Some(ConvexFn::Indicator {
            set: SetDesc::Box { lo: lo.clone(), hi: hi.clone() },
        }),
        Operator::Zero { dim } => Some(ConvexFn::Indicator { set: SetDesc::Whole { dim: *dim } }),
        _ => None,
    }
}

/// `f(x) + g(Lx) + g*(y) + f*(−L*y)` for the functions behind the
/// operators of `t`; `None` without closed forms.
pub fn duality_gap(t: &Triple, x: &Vector, y: &Vector) -> Option<f64> {
    let f = as_convex_fn(&t.a)?;
    let g = as_convex_fn(&t.b)?;
    Some(primal_value(&f, &g, &t.l, x) + dual_value(&f, &g, &t.l, y)?)
}

/// `f(x) + g(Lx)`.
pub fn primal_value(f: &ConvexFn, g: &ConvexFn, l: &Matrix, x: &Vector) -> f64 {
    f.value(x) + g.value(&(l * x))
}

/// `g*(y) + f*(−L*y)`; `None` when a conjugate has no closed form.
pub fn dual_value(f: &ConvexFn, g: &ConvexFn, l: &Matrix, y: &Vector) -> Option<f64> {
    Some(g.conj_value(y)? + f.conj_value(&(-(l.transpose() * y)))?)
}

/// Outcome of a total-duality run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualityVerdict {
    pub mu: f64,
    pub mu_star: f64,
    pub gap: f64,
    pub primal_attained: bool,
    pub dual_attained: bool,
    pub total: bool,
    pub converged: bool,
    pub iterations: usize,
    pub saddle_residual: f64,
    #[serde(with = "codec::vector")]
    pub x: Vector,
    #[serde(with = "codec::vector")]
    pub y: Vector,
    /// Objective at `x` no larger than at random perturbations; only
    /// evaluated for converged runs.
    pub argmin_certified: Option<bool>,
}

#[derive(Debug, Clone, Copy)]
pub struct DualityOptions {
    pub iter: IterOptions,
    /// Gap and residual threshold for attainment and totality.
    pub tol: f64,
    /// Iterates with larger norm count as divergent.
    pub divergence_bound: f64,
    pub perturbations: usize,
    pub seed: u64,
}

impl Default for DualityOptions {
    fn default() -> Self {
        DualityOptions {
            iter: IterOptions::default(),
            tol: 1e-7,
            divergence_bound: 1e8,
            perturbations: 1000,
            seed: 42,
        }
    }
}

/// The triple `(∂f, L, ∂g)`.
pub fn subdifferential_triple(f: &ConvexFn, g: &ConvexFn, l: &Matrix, sigma: f64, tau: f64) -> Result<Triple> {
    Triple::new(Operator::Subdifferential(f.clone()), l.clone(), Operator::Subdifferential(g.clone()), sigma, tau)
}

/// Runs CP on `(∂f, L, ∂g)` from the origin and evaluates both problems at
/// the limits, each projected onto the closed domain of its objective.
pub fn total_duality_check(
    f: &ConvexFn,
    g: &ConvexFn,
    l: &Matrix,
    sigma: f64,
    tau: f64,
    opts: &DualityOptions,
) -> Result<DualityVerdict> {
    let t = subdifferential_triple(f, g, l, sigma, tau)?;
    let trace = splitting::solve(&t, &Vector::zeros(t.n()), &Vector::zeros(t.m()), &opts.iter)?;
    let (x_raw, y_raw) = trace.split_last();
    let bounded = |v: &Vector| linalg::all_finite(v) && v.norm() <= opts.divergence_bound;
    let primal_dom = f.domain().intersect(&g.domain().preimage(l, RANK_TOL)?, DEFAULT_TOL)?;
    let dual_dom = g.conj_domain().intersect(&f.conj_domain().preimage(&(-l.transpose()), RANK_TOL)?, DEFAULT_TOL)?;
    let x = if bounded(&x_raw) { primal_dom.project(&x_raw, DYKSTRA_TOL)? } else { x_raw.clone() };
    let y = if bounded(&y_raw) { dual_dom.project(&y_raw, DYKSTRA_TOL)? } else { y_raw.clone() };
    let mu = primal_value(f, g, l, &x);
    let mu_star = dual_value(f, g, l, &y).ok_or_else(|| Error::Unsupported("conjugate without closed form".into()))?;
    let gap = mu + mu_star;
    let saddle_residual = if bounded(&x_raw) && bounded(&y_raw) {
        t.saddle_residual(&x_raw, &y_raw)?
    } else {
        f64::INFINITY
    };
    let small = trace.converged && saddle_residual < opts.tol;
    let primal_attained = small && bounded(&x_raw) && mu.is_finite();
    let dual_attained = small && bounded(&y_raw) && mu_star.is_finite();
    let argmin_certified = (trace.converged && mu.is_finite()).then(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        (0..opts.perturbations).all(|i| {
            let scale = 10f64.powi(-((i % 4) as i32) - 1);
            let p = &x + linalg::gaussian(&mut rng, x.len(), scale);
            primal_value(f, g, l, &p) >= mu - 1e-12 * (1.0 + mu.abs())
        })
    });
    Ok(DualityVerdict {
        mu,
        mu_star,
        gap,
        primal_attained,
        dual_attained,
        total: gap.abs() <= opts.tol && primal_attained && dual_attained,
        converged: trace.converged,
        iterations: trace.iterations,
        saddle_residual,
        x,
        y,
        argmin_certified,
    })
}

/// `min ½‖Lx − b‖² + λ‖x‖₁` split as `f = λ‖·‖₁ − <·, L*b>`,
/// `g = ½‖·‖² + ½‖b‖²`.
#[derive(Debug, Clone)]
pub struct LassoInstance {
    pub triple: Triple,
    pub f: ConvexFn,
    pub g: ConvexFn,
    pub b: Vector,
    pub lambda: f64,
}

impl LassoInstance {
    pub fn objective(&self, x: &Vector) -> f64 {
        0.5 * (&self.triple.l * x - &self.b).norm_squared() + self.lambda * x.lp_norm(1)
    }
}

/// LASSO as the triple `(λ∂‖·‖₁ − L*b, L, Id)` with `σ = τ = 0.95/‖L‖`.
pub fn lasso_instance(l: &Matrix, b: &Vector, lambda: f64) -> Result<LassoInstance> {
    check_dim("lasso: rows of L vs b", l.nrows(), b.len())?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let c = l.transpose() * b;
    let a = Operator::ShiftedL1 { lambda, shift: c.clone() };
    let triple = Triple::with_balanced_steps(a, l.clone(), Operator::identity(l.nrows()), 0.95)?;
    Ok(LassoInstance {
        triple,
        f: ConvexFn::ScaledL1WithLinear { lambda, c },
        g: ConvexFn::QuadPlusConst { b: b.clone() },
        b: b.clone(),
        lambda,
    })
}

/// Width of the band around `|ξ| = 1` treated as the boundary.
pub const LASSO_BAND: f64 = 1e-8;

/// `Z = L⁻¹(k) ∩ N_C(L*(b − k)/λ)` with `C = [−1, 1]ⁿ`.
pub fn lasso_solution_set(l: &Matrix, b: &Vector, lambda: f64, k: &Vector) -> Result<SetDesc> {
    check_dim("lasso_solution_set: k", l.nrows(), k.len())?;
    check_dim("lasso_solution_set: b", l.nrows(), b.len())?;
    let n = l.ncols();
    let xi = l.transpose() * (b - k) / lambda;
    let mut rays = Vec::with_capacity(n);
    for (i, &t) in xi.iter().enumerate() {
        rays.push(if (t - 1.0).abs() <= LASSO_BAND {
            Ray::NonNeg
        } else if (t + 1.0).abs() <= LASSO_BAND {
            Ray::NonPos
        } else if t.abs() < 1.0 {
            Ray::Zero
        } else {
            return Err(Error::InvalidDual(format!("|L*(b-k)/lambda| = {} > 1 at coordinate {i}", t.abs())));
        });
    }
    let tol = 1e-7 * (1.0 + k.norm());
    if rays.iter().all(|r| *r == Ray::Zero) {
        if k.norm() > tol {
            return Err(Error::InvalidDual("all coordinates pinned to zero but k ≠ 0".into()));
        }
        return Ok(SetDesc::origin(n));
    }
    let cone = SetDesc::RayProduct { rays };
    if linalg::rank(l, RANK_TOL) == n {
        let x = linalg::lstsq(l, k);
        if (l * &x - k).norm() > tol || !cone.contains(&x, tol) {
            return Err(Error::InvalidDual("least-squares point violates the normal-cone face".into()));
        }
        return Ok(SetDesc::point(x));
    }
    let fiber = solve_affine(l, k, tol, n);
    let z = fiber.intersect(&cone, tol)?;
    if z.is_empty() {
        return Err(Error::InvalidDual("Z_k is empty".into()));
    }
    Ok(z)
}
