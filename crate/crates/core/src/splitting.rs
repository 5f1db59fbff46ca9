//! Chambolle-Pock iteration, the preconditioner `M`, its factors and the
//! reduced operator.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::codec::{self, fmt17};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector};
use crate::problem::Triple;

pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_ITER_TOL: f64 = 1e-9;
/// Number of residuals averaged by the stopping rule.
pub const STOP_WINDOW: usize = 5;

/// One Chambolle-Pock step:
/// `x⁺ = J_{σA}(x − σL*y)`, `y⁺ = J_{τB⁻¹}(y + τL(2x⁺ − x))`.
pub fn cp_step(t: &Triple, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
    check_dim("cp_step x", t.n(), x.len())?;
    check_dim("cp_step y", t.m(), y.len())?;
    let xp = t.a.resolve(t.sigma, &(x - t.lt() * y * t.sigma))?;
    let bar = &xp * 2.0 - x;
    let yp = t.b.inverse().resolve(t.tau, &(y + &t.l * bar * t.tau))?;
    Ok((xp, yp))
}

/// `M(x, y) = (x/σ − L*y, −Lx + y/τ)`.
pub fn preconditioner_apply(t: &Triple, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
    check_dim("preconditioner x", t.n(), x.len())?;
    check_dim("preconditioner y", t.m(), y.len())?;
    Ok((x / t.sigma - t.lt() * y, y / t.tau - &t.l * x))
}

/// The matrix of `M`.
pub fn preconditioner_matrix(t: &Triple) -> Matrix {
    let (n, m) = (t.n(), t.m());
    let mut out = Matrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(&(Matrix::identity(n, n) / t.sigma));
    out.view_mut((0, n), (n, m)).copy_from(&(-t.lt()));
    out.view_mut((n, 0), (m, n)).copy_from(&(-&t.l));
    out.view_mut((n, n), (m, m)).copy_from(&(Matrix::identity(m, m) / t.tau));
    out
}

/// `(A + M)⁻¹(x, y) = (p, J_{τB⁻¹}(2τLp + τy))` with `p = J_{σA}(σx)`.
pub fn resolvent_am(t: &Triple, x: &Vector, y: &Vector) -> Result<(Vector, Vector)> {
    check_dim("resolvent_am x", t.n(), x.len())?;
    check_dim("resolvent_am y", t.m(), y.len())?;
    let p = t.a.resolve(t.sigma, &(x * t.sigma))?;
    let q = t.b.inverse().resolve(t.tau, &((&t.l * &p) * (2.0 * t.tau) + y * t.tau))?;
    Ok((p, q))
}

/// `‖(x, y)‖_M`, with rounding-level negatives clamped to zero.
pub fn m_seminorm(t: &Triple, x: &Vector, y: &Vector) -> Result<f64> {
    let (mx, my) = preconditioner_apply(t, x, y)?;
    let q = x.dot(&mx) + y.dot(&my);
    Ok(q.max(0.0).sqrt())
}

/// How to factor `M = CC*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorRequest {
    /// `R` as the principal square root of `Id − στLL*`.
    Principal,
    /// `R` as a lower-triangular Cholesky factor of `Id − στLL*`.
    Cholesky,
    ScaledIsometry,
    DouglasRachford,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FactorKind {
    General { r: Matrix },
    ScaledIsometry,
    DouglasRachford,
}

/// A factor `C` with `CC* = M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub c: Matrix,
    pub kind: FactorKind,
}

impl Factor {
    /// Dimension of the reduced space.
    pub fn z_dim(&self) -> usize {
        self.c.ncols()
    }

    /// `‖CC* − M‖` in the max norm.
    pub fn certificate(&self, t: &Triple) -> f64 {
        (&self.c * self.c.transpose() - preconditioner_matrix(t)).amax()
    }
}

/// Tolerance for the scaled-isometry and Douglas-Rachford preconditions.
pub const FACTOR_TOL: f64 = 1e-10;

pub fn build_factor(t: &Triple, request: FactorRequest) -> Result<Factor> {
    let (n, m) = (t.n(), t.m());
    let (ss, st) = (t.sigma.sqrt(), t.tau.sqrt());
    match request {
        FactorRequest::Principal | FactorRequest::Cholesky => {
            let rem = Matrix::identity(m, m) - (&t.l * t.lt()) * (t.sigma * t.tau);
            let rem = (&rem + rem.transpose()) * 0.5;
            let r = if request == FactorRequest::Principal {
                linalg::principal_sqrt_psd(&rem, 1e-10)?
            } else {
                linalg::cholesky_psd(&rem, 1e-10)?
            };
            let mut c = Matrix::zeros(n + m, n + m);
            c.view_mut((0, 0), (n, n)).copy_from(&(Matrix::identity(n, n) / ss));
            c.view_mut((n, 0), (m, n)).copy_from(&(&t.l * -ss));
            c.view_mut((n, n), (m, m)).copy_from(&(&r / st));
            Ok(Factor {
                c,
                kind: FactorKind::General { r },
            })
        }
        FactorRequest::ScaledIsometry => {
            let dev = ((&t.l * t.lt()) * (t.sigma * t.tau) - Matrix::identity(m, m)).amax();
            if dev > FACTOR_TOL {
                return Err(Error::Precondition(format!(
                    "scaled isometry needs sigma*tau*L L^T = Id (deviation {dev:e})"
                )));
            }
            let c = linalg::vstack(&[&(Matrix::identity(n, n) / ss), &(&t.l * -ss)]);
            Ok(Factor {
                c,
                kind: FactorKind::ScaledIsometry,
            })
        }
        FactorRequest::DouglasRachford => {
            let is_id = m == n && (&t.l - Matrix::identity(n, n)).amax() == 0.0;
            if !is_id || t.sigma != 1.0 || t.tau != 1.0 {
                return Err(Error::Precondition(
                    "Douglas-Rachford factor needs L = Id and sigma = tau = 1".into(),
                ));
            }
            let c = linalg::vstack(&[&Matrix::identity(n, n), &(-Matrix::identity(n, n))]);
            Ok(Factor {
                c,
                kind: FactorKind::DouglasRachford,
            })
        }
    }
}

/// `T̃w = C*(A + M)⁻¹Cw`.
pub fn reduced_step(t: &Triple, f: &Factor, w: &Vector) -> Result<Vector> {
    check_dim("reduced_step", f.z_dim(), w.len())?;
    check_dim("reduced_step factor rows", t.n() + t.m(), f.c.nrows())?;
    let u = &f.c * w;
    let (p, q) = resolvent_am(t, &u.rows(0, t.n()).into_owned(), &u.rows(t.n(), t.m()).into_owned())?;
    Ok(f.c.transpose() * linalg::concat(&[&p, &q]))
}

/// Full CP iteration or the reduced iteration of a factor.
#[derive(Debug, Clone)]
pub enum Mode {
    Full,
    Reduced(Factor),
}

#[derive(Debug, Clone, Copy)]
pub struct IterOptions {
    pub max_iter: usize,
    pub tol: f64,
    pub keep_iterates: bool,
}

impl Default for IterOptions {
    fn default() -> Self {
        IterOptions {
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_ITER_TOL,
            keep_iterates: false,
        }
    }
}

/// Per-iteration record. In `Full` mode a state is `(x, y)` stacked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterTrace {
    /// Every state from the start, when requested.
    #[serde(skip)]
    pub iterates: Vec<Vector>,
    /// `residuals[k]` is the seminorm (Full) or norm (Reduced) of
    /// `u_{k+1} − u_k`.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    #[serde(with = "codec::vector")]
    pub last: Vector,
    pub n: usize,
}

impl IterTrace {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }

    /// Primal and dual parts of the last Full-mode state.
    pub fn split_last(&self) -> (Vector, Vector) {
        linalg::split(&self.last, self.n)
    }

    /// CSV with header `iter,residual,x1..,y1..` (or `w1..`).
    pub fn write_csv(&self, path: &Path, full: bool) -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let dim = self.last.len();
        let mut header = vec!["iter".to_string(), "residual".to_string()];
        for i in 0..dim {
            header.push(match (full, i < self.n) {
                (true, true) => format!("x{}", i + 1),
                (true, false) => format!("y{}", i - self.n + 1),
                (false, _) => format!("w{}", i + 1),
            });
        }
        writeln!(out, "{}", header.join(","))?;
        for (k, r) in self.residuals.iter().enumerate() {
            let state = self.iterates.get(k + 1).unwrap_or(&self.last);
            let mut row = vec![k.to_string(), fmt17(*r)];
            row.extend(state.iter().map(|v| fmt17(*v)));
            writeln!(out, "{}", row.join(","))?;
        }
        out.flush()
    }
}

/// Fixed-point iteration of the CP operator or of a reduced operator.
///
/// Stops at the first `k` where the mean of the last `STOP_WINDOW`
/// residuals is at most `tol` and the last Euclidean step is at most
/// `tol`; `iterations` is that `k`.
pub fn iterate(t: &Triple, mode: &Mode, start: &Vector, opts: &IterOptions) -> Result<IterTrace> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    let n = t.n();
    let dim = match mode {
        Mode::Full => n + t.m(),
        Mode::Reduced(f) => f.z_dim(),
    };
    check_dim("iterate start", dim, start.len())?;
    let mut u = start.clone();
    let mut trace = IterTrace {
        iterates: Vec::new(),
        residuals: Vec::new(),
        iterations: 0,
        converged: false,
        last: u.clone(),
        n,
    };
    if opts.keep_iterates {
        trace.iterates.push(u.clone());
    }
    let mut window_sum = 0.0;
    for k in 0..opts.max_iter.max(1) {
        let next = match mode {
            Mode::Full => {
                let (x, y) = linalg::split(&u, n);
                let (xp, yp) = cp_step(t, &x, &y)?;
                linalg::concat(&[&xp, &yp])
            }
            Mode::Reduced(f) => reduced_step(t, f, &u)?,
        };
        let diff = &next - &u;
        let step = diff.norm();
        let r = match mode {
            Mode::Full => {
                let (dx, dy) = linalg::split(&diff, n);
                m_seminorm(t, &dx, &dy)?
            }
            Mode::Reduced(_) => step,
        };
        trace.residuals.push(r);
        window_sum += r;
        if k >= STOP_WINDOW {
            window_sum -= trace.residuals[k - STOP_WINDOW];
        }
        let count = (k + 1).min(STOP_WINDOW) as f64;
        u = next;
        if opts.keep_iterates {
            trace.iterates.push(u.clone());
        }
        trace.iterations = k;
        if !linalg::all_finite(&u) {
            break;
        }
        if window_sum.max(0.0) / count <= opts.tol && step <= opts.tol {
            trace.converged = true;
            break;
        }
        if k + 1 == opts.max_iter {
            break;
        }
    }
    trace.last = u;
    Ok(trace)
}

/// Full-mode iteration from `(x, y)`.
pub fn solve(t: &Triple, x: &Vector, y: &Vector, opts: &IterOptions) -> Result<IterTrace> {
    iterate(t, &Mode::Full, &linalg::concat(&[x, y]), opts)
}

/// JSON summary of a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    #[serde(with = "codec::vector")]
    pub x: Vector,
    #[serde(with = "codec::vector")]
    pub y: Vector,
    pub saddle_residual: f64,
}

impl RunSummary {
    pub fn from_trace(t: &Triple, trace: &IterTrace) -> Result<Self> {
        let (x, y) = trace.split_last();
        let saddle_residual = t.saddle_residual(&x, &y)?;
        Ok(RunSummary {
            converged: trace.converged,
            iterations: trace.iterations,
            final_residual: trace.final_residual(),
            x,
            y,
            saddle_residual,
        })
    }
}
