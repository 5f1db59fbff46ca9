//! Brute-force checks that share no code path with the operations they
//! verify: grid saddle scans, multi-start limit clustering, the conditional
//! theorem suite and an active-set quadratic-programming oracle.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector, RANK_TOL};
use crate::problem::{SaddleCandidate, Triple};
use crate::solution_sets::{SetDesc, MEMBERSHIP_TOL};
use crate::splitting::{self, IterOptions};

/// Largest admissible grid.
pub const GRID_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// `(lo, hi, steps)` per dimension.
    pub axes: Vec<(f64, f64, usize)>,
}

impl GridSpec {
    pub fn new(axes: Vec<(f64, f64, usize)>) -> Result<Self> {
        for &(lo, hi, steps) in &axes {
            if steps < 2 || !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidParameter(format!("bad grid axis ({lo}, {hi}, {steps})")));
            }
        }
        let g = GridSpec { axes };
        let points = g.total();
        if points as u128 > GRID_CAP {
            return Err(Error::GridCap { points: points as u128, cap: GRID_CAP });
        }
        Ok(g)
    }

    pub fn uniform(dim: usize, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        Self::new(vec![(lo, hi, steps); dim])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Number of points, saturating.
    pub fn total(&self) -> u64 {
        self.axes.iter().fold(1u64, |acc, a| acc.saturating_mul(a.2 as u64))
    }

    /// Largest spacing over all axes.
    pub fn pitch(&self) -> f64 {
        self.axes.iter().map(|&(lo, hi, s)| (hi - lo) / (s - 1) as f64).fold(0.0, f64::max)
    }

    /// Point with linear index `idx`, first axis fastest.
    pub fn point(&self, mut idx: u64) -> Vector {
        Vector::from_iterator(
            self.dim(),
            self.axes.iter().map(|&(lo, hi, s)| {
                let i = idx % s as u64;
                idx /= s as u64;
                lo + (hi - lo) * i as f64 / (s - 1) as f64
            }),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.total()).map(|i| self.point(i))
    }
}

/// All grid points of `gx × gy` with saddle residual `≤ tol`, sorted by
/// residual then coordinates.
pub fn grid_saddle_scan(t: &Triple, gx: &GridSpec, gy: &GridSpec, tol: f64) -> Result<Vec<SaddleCandidate>> {
    check_dim("grid_saddle_scan x-grid", t.n(), gx.dim())?;
    check_dim("grid_saddle_scan y-grid", t.m(), gy.dim())?;
    let (nx, ny) = (gx.total(), gy.total());
    let points = nx.saturating_mul(ny);
    if points as u128 > GRID_CAP {
        return Err(Error::GridCap { points: points as u128, cap: GRID_CAP });
    }
    let mut found = (0..points)
        .into_par_iter()
        .map(|i| {
            let (x, y) = (gx.point(i % nx), gy.point(i / nx));
            let r = t.saddle_residual(&x, &y)?;
            Ok((r <= tol).then_some(SaddleCandidate { x, y, residual: r }))
        })
        .filter_map(|r: Result<Option<SaddleCandidate>>| r.transpose())
        .collect::<Result<Vec<_>>>()?;
    found.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| cmp_vec(&a.x, &b.x))
            .then_with(|| cmp_vec(&a.y, &b.y))
    });
    Ok(found)
}

fn cmp_vec(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    a.iter().zip(b.iter()).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
}

/// Greedy leader clustering of limit points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitCluster {
    #[serde(with = "codec::vectors")]
    pub representatives: Vec<Vector>,
    pub counts: Vec<usize>,
    /// Largest distance of a member to its representative.
    pub radius: f64,
    /// Clustering threshold.
    pub tol: f64,
}

impl LimitCluster {
    pub fn build(points: &[Vector], tol: f64) -> Self {
        let mut reps: Vec<Vector> = Vec::new();
        let mut counts = Vec::new();
        let mut radius = 0.0_f64;
        for p in points {
            match reps.iter().position(|r| (r - p).norm() <= tol) {
                Some(i) => {
                    counts[i] += 1;
                    radius = radius.max((&reps[i] - p).norm());
                }
                None => {
                    reps.push(p.clone());
                    counts.push(1);
                }
            }
        }
        LimitCluster {
            representatives: reps,
            counts,
            radius,
            tol,
        }
    }

    pub fn count(&self) -> usize {
        self.representatives.len()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultistartReport {
    pub primal: LimitCluster,
    pub dual: LimitCluster,
    /// Runs that did not converge, excluded from the clusters.
    pub failed: usize,
    pub seed: u64,
    #[serde(skip)]
    pub limits: Vec<(Vector, Vector)>,
}

/// CP limits from `n_starts` seeded Gaussian starts, clustered with radius
/// `10·tol`.
pub fn multistart_limits(t: &Triple, n_starts: usize, seed: u64, tol: f64) -> Result<MultistartReport> {
    multistart_limits_with(t, n_starts, seed, &IterOptions { tol, ..IterOptions::default() }, 10.0 * tol)
}

pub fn multistart_limits_with(
    t: &Triple,
    n_starts: usize,
    seed: u64,
    opts: &IterOptions,
    cluster_tol: f64,
) -> Result<MultistartReport> {
    if n_starts == 0 {
        return Err(Error::InvalidParameter("n_starts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<(Vector, Vector)> = (0..n_starts)
        .map(|_| (linalg::gaussian(&mut rng, t.n(), 1.0), linalg::gaussian(&mut rng, t.m(), 1.0)))
        .collect();
    let runs = starts
        .par_iter()
        .map(|(x, y)| splitting::solve(t, x, y, opts))
        .collect::<Result<Vec<_>>>()?;
    let failed = runs.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        log::warn!("multistart: {failed} of {n_starts} runs did not converge");
    }
    let limits: Vec<(Vector, Vector)> = runs.iter().filter(|r| r.converged).map(|r| r.split_last()).collect();
    let xs: Vec<Vector> = limits.iter().map(|p| p.0.clone()).collect();
    let ys: Vec<Vector> = limits.iter().map(|p| p.1.clone()).collect();
    Ok(MultistartReport {
        primal: LimitCluster::build(&xs, cluster_tol),
        dual: LimitCluster::build(&ys, cluster_tol),
        failed,
        seed,
        limits,
    })
}

// ---------------------------------------------------------------------------
// Conditional theorem suite

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Failed,
    NotApplicable,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem_id: String,
    pub hypothesis_holds: bool,
    pub conclusion_verified: bool,
    pub status: Status,
    pub witnesses: Vec<String>,
}

impl TheoremReport {
    fn new(id: &str, hypothesis: bool, conclusion: bool, mut witnesses: Vec<String>) -> Self {
        let status = match (hypothesis, conclusion) {
            (true, true) => Status::Verified,
            (true, false) => Status::Failed,
            (false, _) => Status::NotApplicable,
        };
        if !hypothesis && conclusion {
            witnesses.push("conclusion holds without the hypothesis (the converse is not claimed)".into());
        }
        TheoremReport {
            theorem_id: id.into(),
            hypothesis_holds: hypothesis,
            conclusion_verified: conclusion,
            status,
            witnesses,
        }
    }
}

const SUITE_TOL: f64 = 1e-7;

/// Orthonormal basis of `span(S − S)`; `None` for the empty set.
fn direction_basis(s: &SetDesc) -> Option<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    s.affine_hull(&mut rng, 64).map(|(_, b)| b)
}

/// Orthonormal basis of `span S`.
fn span_basis(s: &SetDesc) -> Option<Matrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (p, b) = s.affine_hull(&mut rng, 64)?;
    let pm = Matrix::from_column_slice(p.len(), 1, p.as_slice());
    Some(linalg::orth(&linalg::hstack(&[&pm, &b]), 1e-9))
}

fn span_dim(m: &Matrix) -> usize {
    if m.ncols() == 0 {
        0
    } else {
        linalg::rank(m, 1e-9)
    }
}

fn max_abs(m: &Matrix) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        m.amax()
    }
}

/// Two-sided membership sampling plus hull-dimension comparison.
pub fn sets_agree(a: &SetDesc, b: &SetDesc, samples: usize, seed: u64, tol: f64) -> bool {
    if a.dim() != b.dim() || a.is_empty() != b.is_empty() {
        return false;
    }
    if a.is_empty() {
        return true;
    }
    let dims = (direction_basis(a).map(|m| span_dim(&m)), direction_basis(b).map(|m| span_dim(&m)));
    if dims.0 != dims.1 {
        return false;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inside = |from: &SetDesc, to: &SetDesc, rng: &mut ChaCha8Rng| {
        from.sample_points(rng, samples, 3.0).iter().all(|p| to.contains(p, tol))
    };
    inside(a, b, &mut rng) && inside(b, a, &mut rng)
}

/// Evaluates hypotheses and conclusions of the paramonotone and
/// common-zero consequences on exact solution sets `z`, `k`.
pub fn conditional_theorem_suite(t: &Triple, z: &SetDesc, k: &SetDesc) -> Vec<TheoremReport> {
    let (n, m) = (t.n(), t.m());
    let para = t.a.paramonotone() && t.b.paramonotone();
    let mut out = Vec::new();
    let (dz, dk) = match (direction_basis(z), direction_basis(k)) {
        (Some(dz), Some(dk)) if z.dim() == n && k.dim() == m => (dz, dk),
        _ => {
            out.push(TheoremReport::new("suite.inputs", false, false, vec!["Z or K empty or of wrong dimension".into()]));
            return out;
        }
    };
    let ltk = t.lt() * &dk;
    let lz = &t.l * &dz;
    let pfx = |s: &str| vec![format!("paramonotone = {para}"), s.to_string()];

    let d = span_dim(&ltk);
    out.push(TheoremReport::new(
        "paramonotone.span_ltk_full_implies_z_singleton",
        para && d == n,
        dz.ncols() == 0,
        pfx(&format!("dim span(L*K − L*K) = {d}, dim span(Z − Z) = {}", dz.ncols())),
    ));
    let d = span_dim(&lz);
    out.push(TheoremReport::new(
        "paramonotone.span_lz_full_implies_k_singleton",
        para && d == m,
        dk.ncols() == 0,
        pfx(&format!("dim span(LZ − LZ) = {d}, dim span(K − K) = {}", dk.ncols())),
    ));
    out.push(TheoremReport::new(
        "paramonotone.span_k_full_implies_z_diff_in_ker_l",
        para && dk.ncols() == m,
        max_abs(&lz) <= SUITE_TOL,
        pfx(&format!("max |L(Z − Z)| = {:e}", max_abs(&lz))),
    ));
    out.push(TheoremReport::new(
        "paramonotone.span_z_full_implies_k_diff_in_ker_lstar",
        para && dz.ncols() == n,
        max_abs(&ltk) <= SUITE_TOL,
        pfx(&format!("max |L*(K − K)| = {:e}", max_abs(&ltk))),
    ));

    // Common zero, decided from the operators alone.
    let tol = 1e-9;
    let zeros = (|| -> Result<(SetDesc, SetDesc)> {
        let zer_a = t.a.inverse().value_at_tol(&Vector::zeros(n), tol)?;
        let zer_b = t.b.inverse().value_at_tol(&Vector::zeros(m), tol)?;
        let lzb = zer_b.preimage(&t.l, tol)?;
        Ok((zer_a.intersect(&lzb, tol)?, zer_a))
    })();
    let (formula, common) = match zeros {
        Ok((f, _)) => {
            let c = !f.is_empty();
            (Some(f), c)
        }
        Err(e) => {
            out.push(TheoremReport::new("common_zero.inputs", false, false, vec![format!("common zero undecidable: {e}")]));
            (None, false)
        }
    };
    let hyp = para && common;
    let cz = |s: String| vec![format!("paramonotone = {para}, common zero = {common}"), s];

    let zero_in_k = k.contains(&Vector::zeros(m), MEMBERSHIP_TOL);
    let formula_ok = formula.as_ref().is_some_and(|f| sets_agree(z, f, 200, 7, 1e-7));
    out.push(TheoremReport::new(
        "common_zero.z_formula_and_zero_in_k",
        hyp,
        formula_ok && zero_in_k,
        cz(format!("Z = zer A ∩ L⁻¹ zer B: {formula_ok}, 0 ∈ K: {zero_in_k}")),
    ));
    let sk = span_basis(k).unwrap_or_else(|| Matrix::zeros(m, 0));
    let ltsk = t.lt() * &sk;
    let cross = max_abs(&(ltsk.transpose() * &dz));
    out.push(TheoremReport::new(
        "common_zero.span_ltk_orthogonal_to_z_diff",
        hyp,
        cross <= SUITE_TOL,
        cz(format!("max |<L*K, Z − Z>| = {cross:e}")),
    ));
    let in_ker = max_abs(&ltsk);
    out.push(TheoremReport::new(
        "common_zero.a_single_valued_implies_k_in_ker_lstar",
        hyp && t.a.single_valued(),
        in_ker <= SUITE_TOL,
        cz(format!("A single-valued = {}, max |L*K| = {in_ker:e}", t.a.single_valued())),
    ));
    let k_zero = sk.ncols() == 0 || max_abs(&sk) == 0.0;
    out.push(TheoremReport::new(
        "common_zero.b_single_valued_implies_k_zero",
        hyp && t.b.single_valued(),
        k_zero && zero_in_k,
        cz(format!("B single-valued = {}, dim span K = {}", t.b.single_valued(), span_dim(&sk))),
    ));
    out.push(TheoremReport::new(
        "common_zero.interior_z_implies_k_in_ker_lstar",
        hyp && dz.ncols() == n,
        in_ker <= SUITE_TOL,
        cz(format!("int Z ≠ ∅ = {}, max |L*K| = {in_ker:e}", dz.ncols() == n)),
    ));
    out
}

// ---------------------------------------------------------------------------
// Quadratic programming oracle

/// Inequality count above which the active-set enumeration refuses.
pub const QP_MAX_INEQ: usize = 16;
const QP_REG: f64 = 1e-12;
const QP_TOL: f64 = 1e-9;

/// `argmin ½‖Gw − h‖²` over the polyhedron `S`, by enumerating active sets
/// and checking KKT conditions. A tiny Tikhonov term makes the minimizer
/// unique; `Gw` is unaffected beyond `O(1e-12)`.
pub fn qp_oracle(g: &Matrix, h: &Vector, s: &SetDesc) -> Result<Vector> {
    let d = g.ncols();
    check_dim("qp_oracle set", d, s.dim())?;
    check_dim("qp_oracle rhs", g.nrows(), h.len())?;
    let (ai, bi, ae, be) = s.to_polyhedron().ok_or(Error::EmptyProjection)?;
    let p = ai.nrows();
    if p > QP_MAX_INEQ {
        return Err(Error::Unsupported(format!("qp oracle limited to {QP_MAX_INEQ} inequalities, got {p}")));
    }
    let gr = linalg::vstack(&[g, &(Matrix::identity(d, d) * QP_REG.sqrt())]);
    let hr = linalg::concat(&[h, &Vector::zeros(d)]);
    let mut subsets: Vec<u32> = (0..(1u32 << p)).collect();
    subsets.sort_by_key(|s| (s.count_ones(), *s));
    for mask in subsets {
        let act: Vec<usize> = (0..p).filter(|i| mask & (1 << i) != 0).collect();
        if act.len() > d {
            continue;
        }
        let rows: Vec<Matrix> = act.iter().map(|&i| ai.rows(i, 1).into_owned()).collect();
        let mut blocks: Vec<&Matrix> = vec![&ae];
        blocks.extend(rows.iter());
        let c = linalg::vstack(&blocks);
        let rhs = linalg::concat(&[&be, &Vector::from_iterator(act.len(), act.iter().map(|&i| bi[i]))]);
        let (w, consistent) = if c.nrows() == 0 {
            (linalg::lstsq(&gr, &hr), true)
        } else {
            let w0 = linalg::lstsq(&c, &rhs);
            if (&c * &w0 - &rhs).norm() > QP_TOL * (1.0 + rhs.norm()) {
                (w0, false)
            } else {
                let null = linalg::null_space(&c, RANK_TOL);
                let w = if null.ncols() == 0 {
                    w0
                } else {
                    let coef = linalg::lstsq(&(&gr * &null), &(&hr - &gr * &w0));
                    w0 + null * coef
                };
                (w, true)
            }
        };
        if !consistent {
            continue;
        }
        if p > 0 && (&ai * &w - &bi).max() > QP_TOL * (1.0 + bi.amax()) {
            continue;
        }
        let grad = gr.transpose() * (&gr * &w - &hr);
        if c.nrows() == 0 {
            if grad.norm() <= QP_TOL * (1.0 + h.norm()) {
                return Ok(w);
            }
            continue;
        }
        let mult = linalg::lstsq(&c.transpose(), &(-&grad));
        let stationary = (c.transpose() * &mult + &grad).norm() <= 1e-7 * (1.0 + h.norm());
        let dual_ok = (0..act.len()).all(|j| mult[ae.nrows() + j] >= -1e-9);
        if stationary && dual_ok {
            return Ok(w);
        }
    }
    Err(Error::Unsupported("qp oracle found no KKT point".into()))
}

/// `P_{Z − ρL*K}(x)` as `z − ρL*k` for the minimizing pair `(z, k) ∈ Z × K`.
pub fn minkowski_projection_oracle(z: &SetDesc, k: &SetDesc, l: &Matrix, rho: f64, x: &Vector) -> Result<Vector> {
    let n = z.dim();
    let g = linalg::hstack(&[&Matrix::identity(n, n), &(l.transpose() * -rho)]);
    let w = qp_oracle(&g, x, &SetDesc::product(&[z.clone(), k.clone()]))?;
    Ok(&g * w)
}

/// Symmetric square root `M^{1/2}` of the preconditioner, from its
/// eigendecomposition.
pub fn m_sqrt(t: &Triple) -> Matrix {
    let (n, m) = (t.n(), t.m());
    let mut mm = Matrix::zeros(n + m, n + m);
    mm.view_mut((0, 0), (n, n)).copy_from(&(Matrix::identity(n, n) / t.sigma));
    mm.view_mut((n, n), (m, m)).copy_from(&(Matrix::identity(m, m) / t.tau));
    mm.view_mut((n, 0), (m, n)).copy_from(&(-&t.l));
    mm.view_mut((0, n), (n, m)).copy_from(&(-t.lt()));
    let e = linalg::sym_eigen(&mm);
    let d = Matrix::from_diagonal(&e.values.map(|v| v.max(0.0).sqrt()));
    &e.vectors * d * e.vectors.transpose()
}

/// `M`-seminorm projection of `u0` onto `Z × K`, returned as the pair and
/// its image under `M^{1/2}`.
pub fn m_projection_oracle(t: &Triple, z: &SetDesc, k: &SetDesc, u0: &Vector) -> Result<(Vector, Vector)> {
    let s = m_sqrt(t);
    let w = qp_oracle(&s, &(&s * u0), &SetDesc::product(&[z.clone(), k.clone()]))?;
    let img = &s * &w;
    Ok((w, img))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Operator;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    #[test]
    fn grid_points_and_cap() {
        let g = GridSpec::uniform(2, -1.0, 1.0, 3).unwrap();
        assert_eq!(g.total(), 9);
        assert_eq!(g.point(0), v(&[-1.0, -1.0]));
        assert_eq!(g.point(5), v(&[1.0, 0.0]));
        assert!((g.pitch() - 1.0).abs() < 1e-15);
        assert!(matches!(GridSpec::uniform(8, 0.0, 1.0, 11), Err(Error::GridCap { .. })));
        assert!(GridSpec::uniform(1, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn zero_identity_scan_accepts_zero_dual_line() {
        // every x is a zero; the dual component must vanish
        let t = Triple::new(Operator::zero(1), Matrix::identity(1, 1), Operator::zero(1), 0.5, 0.5).unwrap();
        let g = GridSpec::uniform(1, -1.0, 1.0, 21).unwrap();
        let found = grid_saddle_scan(&t, &g, &g, 1e-12).unwrap();
        assert_eq!(found.len(), 21);
        assert!(found.iter().all(|c| c.y[0] == 0.0));
    }

    #[test]
    fn subspace_feasibility_scan_is_rectangle() {
        let axis = || SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[1.0, 0.0]));
        let t = Triple::new(Operator::normal_cone(axis()), Matrix::identity(2, 2), Operator::normal_cone(axis()), 0.5, 0.5)
            .unwrap();
        let g = GridSpec::uniform(2, -1.0, 1.0, 5).unwrap();
        let found = grid_saddle_scan(&t, &g, &g, 1e-12).unwrap();
        // Z = x-axis, K = y-axis
        assert_eq!(found.len(), 25);
        assert!(found.iter().all(|c| c.x[1] == 0.0 && c.y[0] == 0.0));
    }

    #[test]
    fn leader_clustering() {
        let pts = vec![v(&[0.0]), v(&[1e-9]), v(&[1.0]), v(&[1.0 + 5e-9])];
        let c = LimitCluster::build(&pts, 1e-8);
        assert_eq!(c.count(), 2);
        assert_eq!(c.counts, vec![2, 2]);
        assert!(c.radius <= 1e-8);
    }

    #[test]
    fn strongly_monotone_has_one_primal_limit() {
        let t = Triple::new(Operator::ScaledIdentity { dim: 2, alpha: 1.0 }, Matrix::identity(2, 2), Operator::identity(2), 0.9, 0.9)
            .unwrap();
        let rep = multistart_limits(&t, 8, 42, 1e-10).unwrap();
        assert_eq!(rep.failed, 0);
        assert_eq!(rep.primal.count(), 1);
        assert!(multistart_limits(&t, 0, 42, 1e-10).is_err());
    }

    #[test]
    fn qp_oracle_box_and_halfplane() {
        let w = qp_oracle(&Matrix::identity(2, 2), &v(&[2.0, -3.0]), &SetDesc::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0]))).unwrap();
        assert!((w - v(&[1.0, 0.0])).norm() < 1e-9);
        let half = SetDesc::polyhedron(Matrix::from_row_slice(1, 2, &[1.0, 1.0]), v(&[1.0]), Matrix::zeros(0, 2), Vector::zeros(0));
        let w = qp_oracle(&Matrix::identity(2, 2), &v(&[2.0, 2.0]), &half).unwrap();
        assert!((w - v(&[0.5, 0.5])).norm() < 1e-9);
    }

    #[test]
    fn minkowski_oracle_on_axes() {
        let x_axis = SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[1.0, 0.0]));
        let y_axis = SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[0.0, 1.0]));
        let p = minkowski_projection_oracle(&x_axis, &y_axis, &Matrix::identity(2, 2), 1.0, &v(&[1.5, -2.5])).unwrap();
        assert!((p - v(&[1.5, -2.5])).norm() < 1e-9);
        let p = minkowski_projection_oracle(&x_axis, &SetDesc::origin(2), &Matrix::identity(2, 2), 1.0, &v(&[1.5, -2.5])).unwrap();
        assert!((p - v(&[1.5, 0.0])).norm() < 1e-9);
    }

    #[test]
    fn m_sqrt_squares_to_preconditioner() {
        let t = Triple::new(Operator::zero(2), Matrix::from_row_slice(1, 2, &[1.0, 2.0]), Operator::zero(1), 0.3, 0.3).unwrap();
        let s = m_sqrt(&t);
        assert!((&s * &s - splitting::preconditioner_matrix(&t)).amax() < 1e-12);
    }

    #[test]
    fn suite_on_zero_identity() {
        // A = 0, B = Id, injective L: Z = ker L = {0}, K = {0}
        let l = Matrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 1.0]);
        let t = Triple::with_balanced_steps(Operator::zero(2), l, Operator::identity(2), 0.9).unwrap();
        let reports = conditional_theorem_suite(&t, &SetDesc::origin(2), &SetDesc::origin(2));
        assert!(reports.iter().all(|r| r.status != Status::Failed), "{reports:#?}");
        let first = &reports[0];
        assert_eq!(first.status, Status::NotApplicable);
        assert!(first.conclusion_verified);
        let bsv = reports.iter().find(|r| r.theorem_id == "common_zero.b_single_valued_implies_k_zero").unwrap();
        assert_eq!(bsv.status, Status::Verified);
    }

    #[test]
    fn suite_flags_wrong_sets() {
        let l = Matrix::identity(2, 2);
        let t = Triple::with_balanced_steps(Operator::zero(2), l, Operator::identity(2), 0.9).unwrap();
        let bogus_k = SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[1.0, 0.0]));
        let reports = conditional_theorem_suite(&t, &SetDesc::origin(2), &bogus_k);
        assert!(reports.iter().any(|r| r.status == Status::Failed));
    }
}
