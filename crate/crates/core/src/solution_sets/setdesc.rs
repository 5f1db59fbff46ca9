//! Exactly representable closed convex sets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector, RANK_TOL};

/// Default membership tolerance (absolute, on residual norms).
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Stopping tolerance for Dykstra cycles.
pub const DYKSTRA_TOL: f64 = 1e-13;
const DYKSTRA_MAX_CYCLES: usize = 200_000;

/// One factor of a product of rays: a closed convex cone in R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ray {
    Zero,
    NonNeg,
    NonPos,
    Free,
}

impl Ray {
    pub fn contains(self, t: f64, tol: f64) -> bool {
        match self {
            Ray::Zero => t.abs() <= tol,
            Ray::NonNeg => t >= -tol,
            Ray::NonPos => t <= tol,
            Ray::Free => true,
        }
    }

    pub fn project(self, t: f64) -> f64 {
        match self {
            Ray::Zero => 0.0,
            Ray::NonNeg => t.max(0.0),
            Ray::NonPos => t.min(0.0),
            Ray::Free => t,
        }
    }

    /// Intersection of two rays.
    pub fn meet(self, other: Ray) -> Ray {
        use Ray::*;
        match (self, other) {
            (Free, r) | (r, Free) => r,
            (Zero, _) | (_, Zero) => Zero,
            (NonNeg, NonNeg) => NonNeg,
            (NonPos, NonPos) => NonPos,
            _ => Zero,
        }
    }

    /// Polar cone `{u : u t <= 0 for all t in the ray}`.
    pub fn polar(self) -> Ray {
        match self {
            Ray::Zero => Ray::Free,
            Ray::NonNeg => Ray::NonPos,
            Ray::NonPos => Ray::NonNeg,
            Ray::Free => Ray::Zero,
        }
    }

    /// Negation of the ray.
    pub fn flip(self) -> Ray {
        match self {
            Ray::NonNeg => Ray::NonPos,
            Ray::NonPos => Ray::NonNeg,
            r => r,
        }
    }

    /// Normal cone of the interval `[lo, hi]` at `t`, or `None` when `t` is
    /// outside. Endpoints are matched within `tol`.
    pub fn normal_of_interval(lo: f64, hi: f64, t: f64, tol: f64) -> Option<Ray> {
        if t < lo - tol || t > hi + tol {
            return None;
        }
        let at_lo = lo.is_finite() && (t - lo).abs() <= tol;
        let at_hi = hi.is_finite() && (t - hi).abs() <= tol;
        Some(match (at_lo, at_hi) {
            (true, true) => Ray::Free,
            (true, false) => Ray::NonPos,
            (false, true) => Ray::NonNeg,
            (false, false) => Ray::Zero,
        })
    }
}

/// A closed convex set in R^n with an exact description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDesc {
    Empty {
        dim: usize,
    },
    Whole {
        dim: usize,
    },
    Point {
        #[serde(with = "codec::vector")]
        point: Vector,
    },
    /// `offset + span(basis)`; basis columns orthonormal, offset orthogonal
    /// to the span.
    Affine {
        #[serde(with = "codec::vector")]
        offset: Vector,
        #[serde(with = "codec::matrix")]
        basis: Matrix,
    },
    /// `{x : a_ineq x <= b_ineq, a_eq x = b_eq}`.
    Polyhedron {
        dim: usize,
        #[serde(with = "codec::matrix")]
        a_ineq: Matrix,
        #[serde(with = "codec::vector")]
        b_ineq: Vector,
        #[serde(with = "codec::matrix")]
        a_eq: Matrix,
        #[serde(with = "codec::vector")]
        b_eq: Vector,
    },
    Box {
        #[serde(with = "codec::lower")]
        lo: Vector,
        #[serde(with = "codec::upper")]
        hi: Vector,
    },
    RayProduct {
        rays: Vec<Ray>,
    },
}

impl SetDesc {
    pub fn point(p: Vector) -> Self {
        SetDesc::Point { point: p }
    }

    pub fn origin(dim: usize) -> Self {
        SetDesc::Point {
            point: Vector::zeros(dim),
        }
    }

    pub fn boxed(lo: Vector, hi: Vector) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds length");
        SetDesc::Box { lo, hi }
    }

    /// `offset + span(spanning)`, orthonormalized. Collapses to `Point` or
    /// `Whole` when the span is trivial or full.
    pub fn affine(offset: Vector, spanning: &Matrix) -> Self {
        let n = offset.len();
        assert_eq!(spanning.nrows(), n, "affine: spanning rows");
        let basis = linalg::orth(spanning, RANK_TOL);
        if basis.ncols() == 0 {
            return SetDesc::Point { point: offset };
        }
        if basis.ncols() == n {
            return SetDesc::Whole { dim: n };
        }
        let offset = &offset - &basis * (basis.transpose() * &offset);
        SetDesc::Affine { offset, basis }
    }

    /// The linear subspace spanned by the columns of `spanning`.
    pub fn subspace(spanning: &Matrix) -> Self {
        Self::affine(Vector::zeros(spanning.nrows()), spanning)
    }

    /// Builds a polyhedron and simplifies it when it has no inequalities.
    pub fn polyhedron(a_ineq: Matrix, b_ineq: Vector, a_eq: Matrix, b_eq: Vector) -> Self {
        let dim = a_ineq.ncols().max(a_eq.ncols());
        let a_ineq = if a_ineq.nrows() == 0 { Matrix::zeros(0, dim) } else { a_ineq };
        let a_eq = if a_eq.nrows() == 0 { Matrix::zeros(0, dim) } else { a_eq };
        SetDesc::Polyhedron {
            dim,
            a_ineq,
            b_ineq,
            a_eq,
            b_eq,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetDesc::Empty { dim } | SetDesc::Whole { dim } | SetDesc::Polyhedron { dim, .. } => *dim,
            SetDesc::Point { point } => point.len(),
            SetDesc::Affine { offset, .. } => offset.len(),
            SetDesc::Box { lo, .. } => lo.len(),
            SetDesc::RayProduct { rays } => rays.len(),
        }
    }

    pub fn is_empty_variant(&self) -> bool {
        matches!(self, SetDesc::Empty { .. })
    }

    /// Emptiness, decided exactly for every variant except `Polyhedron`,
    /// where a Dykstra projection of the origin is attempted.
    pub fn is_empty(&self) -> bool {
        match self {
            SetDesc::Empty { .. } => true,
            SetDesc::Box { lo, hi } => lo.iter().zip(hi.iter()).any(|(l, h)| l > h),
            SetDesc::Polyhedron { dim, .. } => self.project(&Vector::zeros(*dim), DYKSTRA_TOL).is_err(),
            _ => false,
        }
    }

    /// Membership with absolute tolerance `tol` on residuals.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            SetDesc::Empty { .. } => false,
            SetDesc::Whole { .. } => true,
            SetDesc::Point { point } => (x - point).norm() <= tol,
            SetDesc::Affine { offset, basis } => {
                let d = x - offset;
                (&d - basis * (basis.transpose() * &d)).norm() <= tol
            }
            SetDesc::Polyhedron {
                a_ineq,
                b_ineq,
                a_eq,
                b_eq,
                ..
            } => polyhedron_violation(a_ineq, b_ineq, a_eq, b_eq, x) <= tol,
            SetDesc::Box { lo, hi } => (0..x.len()).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
            SetDesc::RayProduct { rays } => rays.iter().zip(x.iter()).all(|(r, t)| r.contains(*t, tol)),
        }
    }

    /// Nearest point of the set. Polyhedra use Dykstra's algorithm with
    /// stopping tolerance `tol` on the per-cycle change.
    pub fn project(&self, x: &Vector, tol: f64) -> Result<Vector> {
        check_dim("project", self.dim(), x.len())?;
        match self {
            SetDesc::Empty { .. } => Err(Error::EmptyProjection),
            SetDesc::Whole { .. } => Ok(x.clone()),
            SetDesc::Point { point } => Ok(point.clone()),
            SetDesc::Affine { offset, basis } => {
                let d = x - offset;
                Ok(offset + basis * (basis.transpose() * d))
            }
            SetDesc::Box { lo, hi } => {
                if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
                    return Err(Error::EmptyProjection);
                }
                Ok(Vector::from_fn(x.len(), |i, _| x[i].max(lo[i]).min(hi[i])))
            }
            SetDesc::RayProduct { rays } => Ok(Vector::from_fn(x.len(), |i, _| rays[i].project(x[i]))),
            SetDesc::Polyhedron {
                a_ineq,
                b_ineq,
                a_eq,
                b_eq,
                ..
            } => dykstra_polyhedron(a_ineq, b_ineq, a_eq, b_eq, x, tol),
        }
    }

    /// Equivalent H-representation. `None` for `Empty`.
    pub fn to_polyhedron(&self) -> Option<(Matrix, Vector, Matrix, Vector)> {
        let n = self.dim();
        match self {
            SetDesc::Empty { .. } => None,
            SetDesc::Whole { .. } => Some((Matrix::zeros(0, n), Vector::zeros(0), Matrix::zeros(0, n), Vector::zeros(0))),
            SetDesc::Point { point } => Some((Matrix::zeros(0, n), Vector::zeros(0), Matrix::identity(n, n), point.clone())),
            SetDesc::Affine { offset, basis } => {
                let comp = linalg::complement(basis, n).transpose();
                let rhs = &comp * offset;
                Some((Matrix::zeros(0, n), Vector::zeros(0), comp, rhs))
            }
            SetDesc::Polyhedron {
                a_ineq,
                b_ineq,
                a_eq,
                b_eq,
                ..
            } => Some((a_ineq.clone(), b_ineq.clone(), a_eq.clone(), b_eq.clone())),
            SetDesc::Box { lo, hi } => {
                let mut ineq = Vec::new();
                let mut eq = Vec::new();
                for i in 0..n {
                    if lo[i] == hi[i] {
                        eq.push((unit(n, i, 1.0), lo[i]));
                        continue;
                    }
                    if hi[i].is_finite() {
                        ineq.push((unit(n, i, 1.0), hi[i]));
                    }
                    if lo[i].is_finite() {
                        ineq.push((unit(n, i, -1.0), -lo[i]));
                    }
                }
                let (ai, bi) = rows_to_system(&ineq, n);
                let (ae, be) = rows_to_system(&eq, n);
                Some((ai, bi, ae, be))
            }
            SetDesc::RayProduct { rays } => {
                let mut ineq = Vec::new();
                let mut eq = Vec::new();
                for (i, r) in rays.iter().enumerate() {
                    match r {
                        Ray::Zero => eq.push((unit(n, i, 1.0), 0.0)),
                        Ray::NonNeg => ineq.push((unit(n, i, -1.0), 0.0)),
                        Ray::NonPos => ineq.push((unit(n, i, 1.0), 0.0)),
                        Ray::Free => {}
                    }
                }
                let (ai, bi) = rows_to_system(&ineq, n);
                let (ae, be) = rows_to_system(&eq, n);
                Some((ai, bi, ae, be))
            }
        }
    }

    /// Canonical simplification: polyhedra without inequalities become
    /// affine sets, infeasible polyhedra become `Empty`.
    pub fn simplified(self, tol: f64) -> SetDesc {
        match self {
            SetDesc::Polyhedron {
                dim,
                a_ineq,
                b_ineq,
                a_eq,
                b_eq,
            } => {
                if a_ineq.nrows() == 0 {
                    return solve_affine(&a_eq, &b_eq, tol, dim);
                }
                let p = SetDesc::Polyhedron {
                    dim,
                    a_ineq,
                    b_ineq,
                    a_eq,
                    b_eq,
                };
                if p.is_empty() {
                    SetDesc::Empty { dim }
                } else {
                    p
                }
            }
            SetDesc::Box { ref lo, ref hi } if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) => {
                SetDesc::Empty { dim: lo.len() }
            }
            other => other,
        }
    }

    /// Intersection. Exact for affine/affine, box/box, ray/ray and
    /// point/anything; everything else becomes a polyhedron.
    pub fn intersect(&self, other: &SetDesc, tol: f64) -> Result<SetDesc> {
        check_dim("intersect", self.dim(), other.dim())?;
        let n = self.dim();
        use SetDesc::*;
        Ok(match (self, other) {
            (Empty { .. }, _) | (_, Empty { .. }) => Empty { dim: n },
            (Whole { .. }, s) | (s, Whole { .. }) => s.clone(),
            (Point { point }, s) | (s, Point { point }) => {
                if s.contains(point, tol) {
                    Point { point: point.clone() }
                } else {
                    Empty { dim: n }
                }
            }
            (Affine { offset: o1, basis: v1 }, Affine { offset: o2, basis: v2 }) => {
                affine_intersection(o1, v1, o2, v2, tol)
            }
            (Box { lo: l1, hi: h1 }, Box { lo: l2, hi: h2 }) => {
                let lo = l1.zip_map(l2, f64::max);
                let hi = h1.zip_map(h2, f64::min);
                if lo.iter().zip(hi.iter()).any(|(l, h)| *l > h + tol) {
                    Empty { dim: n }
                } else {
                    let hi = hi.zip_map(&lo, f64::max);
                    Box { lo, hi }
                }
            }
            (RayProduct { rays: r1 }, RayProduct { rays: r2 }) => RayProduct {
                rays: r1.iter().zip(r2).map(|(a, b)| a.meet(*b)).collect(),
            },
            (a, b) => {
                let (ai1, bi1, ae1, be1) = a.to_polyhedron().expect("nonempty");
                let (ai2, bi2, ae2, be2) = b.to_polyhedron().expect("nonempty");
                SetDesc::polyhedron(
                    linalg::vstack(&[&ai1, &ai2]),
                    linalg::concat(&[&bi1, &bi2]),
                    linalg::vstack(&[&ae1, &ae2]),
                    linalg::concat(&[&be1, &be2]),
                )
                .simplified(tol)
            }
        })
    }

    /// Preimage `{y : g y ∈ self}` under the linear map `g`.
    pub fn preimage(&self, g: &Matrix, tol: f64) -> Result<SetDesc> {
        check_dim("preimage", self.dim(), g.nrows())?;
        let n = g.ncols();
        Ok(match self {
            SetDesc::Empty { .. } => SetDesc::Empty { dim: n },
            SetDesc::Whole { .. } => SetDesc::Whole { dim: n },
            SetDesc::Point { point } => solve_affine(g, point, tol, n),
            SetDesc::Affine { offset, basis } => {
                let comp = linalg::complement(basis, self.dim()).transpose();
                solve_affine(&(&comp * g), &(&comp * offset), tol, n)
            }
            other => {
                let (ai, bi, ae, be) = other.to_polyhedron().expect("nonempty");
                SetDesc::polyhedron(&ai * g, bi, &ae * g, be).simplified(tol)
            }
        })
    }

    /// Image `{g x : x ∈ self}`. Exact for points and affine sets under any
    /// map, and for every variant under an injective map.
    pub fn image(&self, g: &Matrix, tol: f64) -> Result<SetDesc> {
        check_dim("image", self.dim(), g.ncols())?;
        let m = g.nrows();
        match self {
            SetDesc::Empty { .. } => Ok(SetDesc::Empty { dim: m }),
            SetDesc::Point { point } => Ok(SetDesc::point(g * point)),
            SetDesc::Affine { offset, basis } => Ok(SetDesc::affine(g * offset, &(g * basis))),
            SetDesc::Whole { .. } => Ok(SetDesc::affine(Vector::zeros(m), g)),
            other => {
                if linalg::rank(g, RANK_TOL) < g.ncols() {
                    return Err(Error::Unsupported(
                        "image of a polyhedral set under a non-injective map".into(),
                    ));
                }
                let (ai, bi, ae, be) = other.to_polyhedron().expect("nonempty");
                let gp = linalg::pinv(g);
                let range = linalg::orth(g, RANK_TOL);
                let outside = linalg::complement(&range, m).transpose();
                let eq = linalg::vstack(&[&(&ae * &gp), &outside]);
                let rhs = linalg::concat(&[&be, &Vector::zeros(outside.nrows())]);
                Ok(SetDesc::polyhedron(&ai * &gp, bi, eq, rhs).simplified(tol))
            }
        }
    }

    /// `{c x : x ∈ self}`.
    pub fn scale(&self, c: f64) -> SetDesc {
        let n = self.dim();
        if c == 0.0 {
            return if self.is_empty_variant() {
                self.clone()
            } else {
                SetDesc::origin(n)
            };
        }
        match self {
            SetDesc::Empty { .. } | SetDesc::Whole { .. } => self.clone(),
            SetDesc::Point { point } => SetDesc::point(point * c),
            SetDesc::Affine { offset, basis } => SetDesc::Affine {
                offset: offset * c,
                basis: basis.clone(),
            },
            SetDesc::Box { lo, hi } => {
                if c > 0.0 {
                    SetDesc::Box { lo: lo * c, hi: hi * c }
                } else {
                    SetDesc::Box { lo: hi * c, hi: lo * c }
                }
            }
            SetDesc::RayProduct { rays } => SetDesc::RayProduct {
                rays: if c > 0.0 {
                    rays.clone()
                } else {
                    rays.iter().map(|r| r.flip()).collect()
                },
            },
            SetDesc::Polyhedron {
                dim,
                a_ineq,
                b_ineq,
                a_eq,
                b_eq,
            } => SetDesc::Polyhedron {
                dim: *dim,
                a_ineq: a_ineq / c,
                b_ineq: b_ineq.clone(),
                a_eq: a_eq / c,
                b_eq: b_eq.clone(),
            },
        }
    }

    /// `{x + v : x ∈ self}`.
    pub fn translate(&self, v: &Vector) -> SetDesc {
        match self {
            SetDesc::Empty { .. } | SetDesc::Whole { .. } => self.clone(),
            SetDesc::Point { point } => SetDesc::point(point + v),
            SetDesc::Affine { offset, basis } => SetDesc::affine(offset + v, basis),
            SetDesc::Box { lo, hi } => SetDesc::Box { lo: lo + v, hi: hi + v },
            other => {
                let (ai, bi, ae, be) = other.to_polyhedron().expect("nonempty");
                let bi = &bi + &ai * v;
                let be = &be + &ae * v;
                SetDesc::polyhedron(ai, bi, ae, be)
            }
        }
    }

    /// Cartesian product of sets.
    pub fn product(parts: &[SetDesc]) -> SetDesc {
        let n: usize = parts.iter().map(|p| p.dim()).sum();
        if parts.iter().any(|p| p.is_empty_variant()) {
            return SetDesc::Empty { dim: n };
        }
        if parts.iter().all(|p| matches!(p, SetDesc::Whole { .. })) {
            return SetDesc::Whole { dim: n };
        }
        if parts.iter().all(|p| matches!(p, SetDesc::Point { .. })) {
            let pts: Vec<&Vector> = parts
                .iter()
                .map(|p| match p {
                    SetDesc::Point { point } => point,
                    _ => unreachable!(),
                })
                .collect();
            return SetDesc::point(linalg::concat(&pts));
        }
        if parts.iter().all(|p| matches!(p, SetDesc::Box { .. })) {
            let (los, his): (Vec<&Vector>, Vec<&Vector>) = parts
                .iter()
                .map(|p| match p {
                    SetDesc::Box { lo, hi } => (lo, hi),
                    _ => unreachable!(),
                })
                .unzip();
            return SetDesc::Box {
                lo: linalg::concat(&los),
                hi: linalg::concat(&his),
            };
        }
        if parts.iter().all(|p| matches!(p, SetDesc::RayProduct { .. })) {
            let rays = parts
                .iter()
                .flat_map(|p| match p {
                    SetDesc::RayProduct { rays } => rays.clone(),
                    _ => unreachable!(),
                })
                .collect();
            return SetDesc::RayProduct { rays };
        }
        let affine_like = parts.iter().all(|p| {
            matches!(
                p,
                SetDesc::Point { .. } | SetDesc::Affine { .. } | SetDesc::Whole { .. }
            )
        });
        if affine_like {
            let mut offset = Vector::zeros(n);
            let mut cols: Vec<Vector> = Vec::new();
            let mut r0 = 0;
            for p in parts {
                let d = p.dim();
                match p {
                    SetDesc::Point { point } => offset.rows_mut(r0, d).copy_from(point),
                    SetDesc::Affine { offset: o, basis } => {
                        offset.rows_mut(r0, d).copy_from(o);
                        for c in 0..basis.ncols() {
                            let mut col = Vector::zeros(n);
                            col.rows_mut(r0, d).copy_from(&basis.column(c));
                            cols.push(col);
                        }
                    }
                    SetDesc::Whole { .. } => {
                        for c in 0..d {
                            cols.push(unit(n, r0 + c, 1.0));
                        }
                    }
                    _ => unreachable!(),
                }
                r0 += d;
            }
            let spanning = if cols.is_empty() {
                Matrix::zeros(n, 0)
            } else {
                Matrix::from_columns(&cols)
            };
            return SetDesc::affine(offset, &spanning);
        }
        let mut ineq_blocks = Vec::new();
        let mut eq_blocks = Vec::new();
        let mut c0 = 0;
        for p in parts {
            let d = p.dim();
            let (ai, bi, ae, be) = p.to_polyhedron().expect("nonempty");
            let mut wide_i = Matrix::zeros(ai.nrows(), n);
            wide_i.view_mut((0, c0), (ai.nrows(), d)).copy_from(&ai);
            let mut wide_e = Matrix::zeros(ae.nrows(), n);
            wide_e.view_mut((0, c0), (ae.nrows(), d)).copy_from(&ae);
            ineq_blocks.push((wide_i, bi));
            eq_blocks.push((wide_e, be));
            c0 += d;
        }
        let ai = linalg::vstack(&ineq_blocks.iter().map(|(a, _)| a).collect::<Vec<_>>());
        let bi = linalg::concat(&ineq_blocks.iter().map(|(_, b)| b).collect::<Vec<_>>());
        let ae = linalg::vstack(&eq_blocks.iter().map(|(a, _)| a).collect::<Vec<_>>());
        let be = linalg::concat(&eq_blocks.iter().map(|(_, b)| b).collect::<Vec<_>>());
        SetDesc::polyhedron(ai, bi, ae, be)
    }

    /// Orthogonal complement of a linear subspace.
    pub fn orthogonal_complement(&self, tol: f64) -> Result<SetDesc> {
        let n = self.dim();
        match self {
            SetDesc::Whole { .. } => Ok(SetDesc::origin(n)),
            SetDesc::Point { point } if point.norm() <= tol => Ok(SetDesc::Whole { dim: n }),
            SetDesc::Affine { offset, basis } if offset.norm() <= tol => {
                Ok(SetDesc::subspace(&linalg::complement(basis, n)))
            }
            _ => Err(Error::Unsupported("orthogonal complement of a set that is not a linear subspace".into())),
        }
    }

    /// Polar cone `{u : <u, x> <= 0 for all x}` of a closed convex cone.
    pub fn polar_cone(&self, tol: f64) -> Result<SetDesc> {
        match self {
            SetDesc::RayProduct { rays } => Ok(SetDesc::RayProduct {
                rays: rays.iter().map(|r| r.polar()).collect(),
            }),
            SetDesc::Box { lo, hi }
                if lo.iter().zip(hi.iter()).all(|(l, h)| {
                    (*l == 0.0 || *l == f64::NEG_INFINITY) && (*h == 0.0 || *h == f64::INFINITY)
                }) =>
            {
                let rays: Vec<Ray> = lo
                    .iter()
                    .zip(hi.iter())
                    .map(|(l, h)| match (l.is_finite(), h.is_finite()) {
                        (true, true) => Ray::Zero,
                        (true, false) => Ray::NonNeg,
                        (false, true) => Ray::NonPos,
                        (false, false) => Ray::Free,
                    })
                    .collect();
                SetDesc::RayProduct { rays }.polar_cone(tol)
            }
            other => other.orthogonal_complement(tol),
        }
    }

    /// A point of the affine hull and an orthonormal basis of its direction.
    ///
    /// Exact except for `Polyhedron`, where the hull is estimated from the
    /// projections of `samples` seeded Gaussian points.
    pub fn affine_hull<R: Rng>(&self, rng: &mut R, samples: usize) -> Option<(Vector, Matrix)> {
        let n = self.dim();
        match self {
            SetDesc::Empty { .. } => None,
            SetDesc::Whole { .. } => Some((Vector::zeros(n), Matrix::identity(n, n))),
            SetDesc::Point { point } => Some((point.clone(), Matrix::zeros(n, 0))),
            SetDesc::Affine { offset, basis } => Some((offset.clone(), basis.clone())),
            SetDesc::Box { lo, hi } => {
                if self.is_empty() {
                    return None;
                }
                let p = self.project(&Vector::zeros(n), DYKSTRA_TOL).ok()?;
                let cols: Vec<Vector> = (0..n).filter(|&i| lo[i] < hi[i]).map(|i| unit(n, i, 1.0)).collect();
                Some((p, columns_or_empty(&cols, n)))
            }
            SetDesc::RayProduct { rays } => {
                let cols: Vec<Vector> = (0..n)
                    .filter(|&i| rays[i] != Ray::Zero)
                    .map(|i| unit(n, i, 1.0))
                    .collect();
                Some((Vector::zeros(n), columns_or_empty(&cols, n)))
            }
            SetDesc::Polyhedron { .. } => {
                let pts = self.sample_points(rng, samples.max(2 * n + 2), 10.0);
                let first = pts.first()?.clone();
                let diffs: Vec<Vector> = pts.iter().skip(1).map(|p| p - &first).collect();
                let span = columns_or_empty(&diffs, n);
                Some((first, linalg::orth(&span, 1e-6)))
            }
        }
    }

    /// Projections of seeded Gaussian points of standard deviation `scale`
    /// onto the set (empty list for an empty set).
    pub fn sample_points<R: Rng>(&self, rng: &mut R, count: usize, scale: f64) -> Vec<Vector> {
        let n = self.dim();
        (0..count)
            .filter_map(|_| {
                let g = linalg::gaussian(&mut *rng, n, scale);
                self.project(&g, DYKSTRA_TOL).ok()
            })
            .collect()
    }
}

/// Normal cone `N_S(x)` for sets whose normal cones are exactly
/// representable. `Empty` when `x` lies outside `S` (beyond `tol`).
pub fn normal_cone(set: &SetDesc, x: &Vector, tol: f64) -> Result<SetDesc> {
    check_dim("normal_cone", set.dim(), x.len())?;
    let n = x.len();
    if !set.contains(x, tol) {
        return Ok(SetDesc::Empty { dim: n });
    }
    match set {
        SetDesc::Empty { .. } => Ok(SetDesc::Empty { dim: n }),
        SetDesc::Whole { .. } => Ok(SetDesc::origin(n)),
        SetDesc::Point { .. } => Ok(SetDesc::Whole { dim: n }),
        SetDesc::Affine { basis, .. } => Ok(SetDesc::subspace(&linalg::complement(basis, n))),
        SetDesc::Box { lo, hi } => {
            let rays = (0..n)
                .map(|i| Ray::normal_of_interval(lo[i], hi[i], x[i], tol).expect("inside"))
                .collect();
            Ok(SetDesc::RayProduct { rays })
        }
        SetDesc::RayProduct { rays } => {
            let (lo, hi) = ray_bounds(rays);
            normal_cone(&SetDesc::Box { lo, hi }, x, tol)
        }
        SetDesc::Polyhedron { .. } => Err(Error::Unsupported("normal cone of a general polyhedron".into())),
    }
}

/// Exposed face `argmax_{x ∈ S} <u, x>`, i.e. the subdifferential of the
/// support function of `S` at `u`. `Empty` when the supremum is infinite.
pub fn exposed_face(set: &SetDesc, u: &Vector, tol: f64) -> Result<SetDesc> {
    check_dim("exposed_face", set.dim(), u.len())?;
    let n = u.len();
    match set {
        SetDesc::Empty { .. } => Ok(SetDesc::Empty { dim: n }),
        SetDesc::Whole { .. } => Ok(if u.norm() <= tol {
            SetDesc::Whole { dim: n }
        } else {
            SetDesc::Empty { dim: n }
        }),
        SetDesc::Point { .. } => Ok(set.clone()),
        SetDesc::Affine { basis, .. } => Ok(if (basis.transpose() * u).norm() <= tol {
            set.clone()
        } else {
            SetDesc::Empty { dim: n }
        }),
        SetDesc::Box { lo, hi } => {
            let mut flo = Vector::zeros(n);
            let mut fhi = Vector::zeros(n);
            for i in 0..n {
                let (a, b) = if u[i] > tol {
                    (hi[i], hi[i])
                } else if u[i] < -tol {
                    (lo[i], lo[i])
                } else {
                    (lo[i], hi[i])
                };
                if !a.is_finite() && a == b {
                    return Ok(SetDesc::Empty { dim: n });
                }
                flo[i] = a;
                fhi[i] = b;
            }
            Ok(SetDesc::Box { lo: flo, hi: fhi })
        }
        SetDesc::RayProduct { rays } => {
            let (lo, hi) = ray_bounds(rays);
            match exposed_face(&SetDesc::Box { lo, hi }, u, tol)? {
                SetDesc::Box { lo, hi } => Ok(SetDesc::RayProduct {
                    rays: (0..n)
                        .map(|i| match (lo[i].is_finite(), hi[i].is_finite()) {
                            (true, true) => Ray::Zero,
                            (true, false) => Ray::NonNeg,
                            (false, true) => Ray::NonPos,
                            (false, false) => Ray::Free,
                        })
                        .collect(),
                }),
                other => Ok(other),
            }
        }
        SetDesc::Polyhedron { .. } => Err(Error::Unsupported("exposed face of a general polyhedron".into())),
    }
}

/// Support function `sup_{x ∈ S} <u, x>`; `None` when not computable in
/// closed form.
pub fn support_value(set: &SetDesc, u: &Vector, tol: f64) -> Option<f64> {
    let n = u.len();
    match set {
        SetDesc::Empty { .. } => Some(f64::NEG_INFINITY),
        SetDesc::Whole { .. } => Some(if u.norm() <= tol { 0.0 } else { f64::INFINITY }),
        SetDesc::Point { point } => Some(point.dot(u)),
        SetDesc::Affine { offset, basis } => Some(if (basis.transpose() * u).norm() <= tol {
            offset.dot(u)
        } else {
            f64::INFINITY
        }),
        SetDesc::Box { lo, hi } => Some((0..n).map(|i| interval_support(lo[i], hi[i], u[i], tol)).sum()),
        SetDesc::RayProduct { rays } => {
            let (lo, hi) = ray_bounds(rays);
            Some((0..n).map(|i| interval_support(lo[i], hi[i], u[i], tol)).sum())
        }
        SetDesc::Polyhedron { .. } => None,
    }
}

fn interval_support(lo: f64, hi: f64, u: f64, tol: f64) -> f64 {
    if u > tol {
        u * hi
    } else if u < -tol {
        u * lo
    } else if lo.is_finite() && hi.is_finite() {
        (u * hi).max(u * lo)
    } else {
        0.0
    }
}

/// Per-coordinate bounds of a ray product.
pub fn ray_bounds(rays: &[Ray]) -> (Vector, Vector) {
    let n = rays.len();
    let lo = Vector::from_fn(n, |i, _| match rays[i] {
        Ray::Zero | Ray::NonNeg => 0.0,
        _ => f64::NEG_INFINITY,
    });
    let hi = Vector::from_fn(n, |i, _| match rays[i] {
        Ray::Zero | Ray::NonPos => 0.0,
        _ => f64::INFINITY,
    });
    (lo, hi)
}

fn columns_or_empty(cols: &[Vector], n: usize) -> Matrix {
    if cols.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_columns(cols)
    }
}

pub(crate) fn unit(n: usize, i: usize, s: f64) -> Vector {
    let mut e = Vector::zeros(n);
    e[i] = s;
    e
}

fn rows_to_system(rows: &[(Vector, f64)], n: usize) -> (Matrix, Vector) {
    let a = Matrix::from_fn(rows.len(), n, |i, j| rows[i].0[j]);
    let b = Vector::from_iterator(rows.len(), rows.iter().map(|r| r.1));
    (a, b)
}

/// Solution set of `a x = b` as `Empty`, `Point`, `Affine` or `Whole`.
pub fn solve_affine(a: &Matrix, b: &Vector, tol: f64, n: usize) -> SetDesc {
    if a.nrows() == 0 {
        return SetDesc::Whole { dim: n };
    }
    let x0 = linalg::lstsq(a, b);
    let resid = (a * &x0 - b).norm();
    if resid > tol * (1.0 + b.norm() + a.amax()) {
        return SetDesc::Empty { dim: n };
    }
    let ker = linalg::null_space(a, RANK_TOL);
    SetDesc::affine(x0, &ker)
}

fn affine_intersection(o1: &Vector, v1: &Matrix, o2: &Vector, v2: &Matrix, tol: f64) -> SetDesc {
    let n = o1.len();
    let sys = linalg::hstack(&[v1, &(-v2)]);
    let rhs = o2 - o1;
    let coef = if sys.ncols() == 0 { Vector::zeros(0) } else { linalg::lstsq(&sys, &rhs) };
    let resid = if sys.ncols() == 0 { rhs.norm() } else { (&sys * &coef - &rhs).norm() };
    if resid > tol * (1.0 + o1.norm() + o2.norm()) {
        return SetDesc::Empty { dim: n };
    }
    let x0 = o1 + v1 * coef.rows(0, v1.ncols());
    let p1 = Matrix::identity(n, n) - v1 * v1.transpose();
    let p2 = Matrix::identity(n, n) - v2 * v2.transpose();
    let dir = linalg::null_space(&linalg::vstack(&[&p1, &p2]), RANK_TOL);
    SetDesc::affine(x0, &dir)
}

/// Largest normalized constraint violation.
pub fn polyhedron_violation(a_ineq: &Matrix, b_ineq: &Vector, a_eq: &Matrix, b_eq: &Vector, x: &Vector) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..a_ineq.nrows() {
        let row = a_ineq.row(i);
        let rn = row.norm();
        if rn == 0.0 {
            worst = worst.max(-b_ineq[i]);
            continue;
        }
        worst = worst.max((row.dot(&x.transpose()) - b_ineq[i]) / rn);
    }
    for i in 0..a_eq.nrows() {
        let row = a_eq.row(i);
        let rn = row.norm().max(f64::MIN_POSITIVE);
        let r = row.dot(&x.transpose()) - b_eq[i];
        worst = worst.max(if row.norm() == 0.0 { r.abs() } else { r.abs() / rn });
    }
    worst
}

/// Dykstra's algorithm over the halfspaces of `a_ineq x <= b_ineq` and the
/// affine set `a_eq x = b_eq` (projected in closed form).
fn dykstra_polyhedron(
    a_ineq: &Matrix,
    b_ineq: &Vector,
    a_eq: &Matrix,
    b_eq: &Vector,
    x: &Vector,
    tol: f64,
) -> Result<Vector> {
    let n = x.len();
    let eq_set = solve_affine(a_eq, b_eq, 1e-9, n);
    if eq_set.is_empty_variant() {
        return Err(Error::EmptyProjection);
    }
    let project_eq = |v: &Vector| eq_set.project(v, tol).expect("nonempty affine");
    let rows: Vec<(Vector, f64, f64)> = (0..a_ineq.nrows())
        .filter_map(|i| {
            let r = a_ineq.row(i).transpose();
            let nn = r.norm_squared();
            if nn == 0.0 {
                None
            } else {
                Some((r, b_ineq[i], nn))
            }
        })
        .collect();
    if a_ineq.nrows() > rows.len() {
        // zero rows: 0 <= b must hold
        for i in 0..a_ineq.nrows() {
            if a_ineq.row(i).norm() == 0.0 && b_ineq[i] < -tol {
                return Err(Error::EmptyProjection);
            }
        }
    }
    let mut cur = x.clone();
    if rows.is_empty() {
        return Ok(project_eq(&cur));
    }
    let mut inc_half: Vec<Vector> = vec![Vector::zeros(n); rows.len()];
    let mut inc_eq = Vector::zeros(n);
    let scale = 1.0 + x.norm();
    for _cycle in 0..DYKSTRA_MAX_CYCLES {
        let start = cur.clone();
        for (k, (r, b, nn)) in rows.iter().enumerate() {
            let v = &cur + &inc_half[k];
            let excess = r.dot(&v) - b;
            let proj = if excess > 0.0 { &v - r * (excess / nn) } else { v.clone() };
            inc_half[k] = &v - &proj;
            cur = proj;
        }
        let v = &cur + &inc_eq;
        let proj = project_eq(&v);
        inc_eq = &v - &proj;
        cur = proj;
        let change = (&cur - &start).norm();
        if change <= tol * scale {
            let viol = polyhedron_violation(a_ineq, b_ineq, a_eq, b_eq, &cur);
            if viol <= 1e-9 * scale {
                return Ok(cur);
            }
        }
        if !all_small(&cur) {
            return Err(Error::EmptyProjection);
        }
    }
    let viol = polyhedron_violation(a_ineq, b_ineq, a_eq, b_eq, &cur);
    if viol <= 1e-7 * scale {
        Ok(cur)
    } else {
        Err(Error::EmptyProjection)
    }
}

fn all_small(v: &Vector) -> bool {
    v.iter().all(|x| x.is_finite() && x.abs() < 1e12)
}
