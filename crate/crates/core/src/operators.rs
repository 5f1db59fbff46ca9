//! Maximally monotone operators with exact resolvents.

use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::fenchel::ConvexFn;
use crate::linalg::{self, Matrix, Vector, RANK_TOL};
use crate::solution_sets::{exposed_face, normal_cone, solve_affine, Ray, SetDesc, MEMBERSHIP_TOL};

/// A maximally monotone operator on R^dim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum Operator {
    Zero {
        dim: usize,
    },
    /// `x ↦ alpha x`, alpha >= 0.
    ScaledIdentity {
        dim: usize,
        alpha: f64,
    },
    /// `x ↦ M x` with `M + M^T` positive semidefinite.
    Linear {
        #[serde(with = "codec::matrix")]
        m: Matrix,
    },
    /// Normal cone of an affine subspace.
    NormalConeAffine {
        set: SetDesc,
    },
    /// Normal cone of the box `[lo, hi]`.
    NormalConeBox {
        #[serde(with = "codec::lower")]
        lo: Vector,
        #[serde(with = "codec::upper")]
        hi: Vector,
    },
    /// Orthogonal projector onto the span of `basis`.
    Projection {
        #[serde(with = "codec::matrix")]
        basis: Matrix,
    },
    /// `x ↦ {u}`.
    Constant {
        #[serde(with = "codec::vector")]
        u: Vector,
    },
    /// `lambda ∂‖·‖₁ - shift`.
    ShiftedL1 {
        lambda: f64,
        #[serde(with = "codec::vector")]
        shift: Vector,
    },
    Subdifferential(ConvexFn),
    Inverse(Box<Operator>),
    /// Block-diagonal product of operators.
    Product(Vec<Operator>),
}

impl Operator {
    pub fn zero(dim: usize) -> Self {
        Operator::Zero { dim }
    }

    pub fn identity(dim: usize) -> Self {
        Operator::ScaledIdentity { dim, alpha: 1.0 }
    }

    pub fn linear(m: Matrix) -> Self {
        Operator::Linear { m }
    }

    pub fn normal_cone(set: SetDesc) -> Self {
        match set {
            SetDesc::Box { lo, hi } => Operator::NormalConeBox { lo, hi },
            SetDesc::RayProduct { rays } => {
                let (lo, hi) = crate::solution_sets::ray_bounds(&rays);
                Operator::NormalConeBox { lo, hi }
            }
            set => Operator::NormalConeAffine { set },
        }
    }

    pub fn projection(spanning: &Matrix) -> Self {
        Operator::Projection {
            basis: linalg::orth(spanning, RANK_TOL),
        }
    }

    /// The inverse operator. Never simplified: `inverse(inverse(A))` is a
    /// new operator that agrees with `A` behaviorally.
    pub fn inverse(&self) -> Operator {
        Operator::Inverse(Box::new(self.clone()))
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Zero { dim } | Operator::ScaledIdentity { dim, .. } => *dim,
            Operator::Linear { m } => m.nrows(),
            Operator::NormalConeAffine { set } => set.dim(),
            Operator::NormalConeBox { lo, .. } => lo.len(),
            Operator::Projection { basis } => basis.nrows(),
            Operator::Constant { u } => u.len(),
            Operator::ShiftedL1 { shift, .. } => shift.len(),
            Operator::Subdifferential(f) => f.dim(),
            Operator::Inverse(op) => op.dim(),
            Operator::Product(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// Checks parameter conditions and returns a canonical copy
    /// (orthonormal projection bases, simplified sets).
    pub fn validated(&self) -> Result<Operator> {
        let bad = |s: String| Err(Error::InvalidParameter(s));
        Ok(match self {
            Operator::ScaledIdentity { alpha, .. } if !(*alpha >= 0.0 && alpha.is_finite()) => {
                return bad(format!("scaled identity needs alpha >= 0, got {alpha}"))
            }
            Operator::Linear { m } => {
                if m.nrows() != m.ncols() {
                    return bad(format!("linear operator must be square, got {}x{}", m.nrows(), m.ncols()));
                }
                let sym = (m + m.transpose()) * 0.5;
                let ev = linalg::sym_eigen(&sym);
                let floor = -1e-10 * (1.0 + m.amax());
                if let Some(&lmin) = ev.values.as_slice().first() {
                    if lmin < floor {
                        return Err(Error::NotPsd {
                            eigenvalue: lmin,
                            tol: -floor,
                        });
                    }
                }
                self.clone()
            }
            Operator::NormalConeAffine { set } => match set {
                SetDesc::Point { .. } | SetDesc::Affine { .. } | SetDesc::Whole { .. } => self.clone(),
                SetDesc::Box { .. } | SetDesc::RayProduct { .. } => Operator::normal_cone(set.clone()),
                _ => return bad("normal_cone_affine needs a point, affine set or whole space".into()),
            },
            Operator::NormalConeBox { lo, hi } => {
                if lo.len() != hi.len() {
                    return bad("box bounds differ in length".into());
                }
                if lo.iter().zip(hi.iter()).any(|(l, h)| l > h || l.is_nan() || h.is_nan()) {
                    return bad("box has lo > hi".into());
                }
                self.clone()
            }
            Operator::Projection { basis } => Operator::projection(basis),
            Operator::ShiftedL1 { lambda, .. } if !(*lambda > 0.0 && lambda.is_finite()) => {
                return bad(format!("shifted l1 needs lambda > 0, got {lambda}"))
            }
            Operator::Subdifferential(f) => Operator::Subdifferential(f.validated()?),
            Operator::Inverse(op) => Operator::Inverse(Box::new(op.validated()?)),
            Operator::Product(parts) => Operator::Product(parts.iter().map(|p| p.validated()).collect::<Result<_>>()?),
            other => other.clone(),
        })
    }

    /// `J_{γA}(x) = (Id + γA)⁻¹ x`.
    pub fn resolve(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        check_dim("resolve", self.dim(), x.len())?;
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!("resolvent needs gamma > 0, got {gamma}")));
        }
        Ok(match self {
            Operator::Zero { .. } => x.clone(),
            Operator::ScaledIdentity { alpha, .. } => x / (1.0 + gamma * alpha),
            Operator::Linear { m } => {
                let sys = Matrix::identity(m.nrows(), m.ncols()) + m * gamma;
                linalg::solve(&sys, x).expect("I + gamma M is invertible for monotone M")
            }
            Operator::NormalConeAffine { set } => set.project(x, 1e-13)?,
            Operator::NormalConeBox { lo, hi } => Vector::from_fn(x.len(), |i, _| x[i].max(lo[i]).min(hi[i])),
            Operator::Projection { basis } => {
                let pu = basis * (basis.transpose() * x);
                &pu / (1.0 + gamma) + (x - &pu)
            }
            Operator::Constant { u } => x - u * gamma,
            Operator::ShiftedL1 { lambda, shift } => {
                let v = x + shift * gamma;
                soft_threshold(&v, gamma * lambda)
            }
            Operator::Subdifferential(f) => f.prox(gamma, x)?,
            Operator::Inverse(op) => x - op.resolve(1.0 / gamma, &(x / gamma))? * gamma,
            Operator::Product(parts) => {
                let mut out = Vector::zeros(x.len());
                let mut r0 = 0;
                for p in parts {
                    let d = p.dim();
                    let block = p.resolve(gamma, &x.rows(r0, d).into_owned())?;
                    out.rows_mut(r0, d).copy_from(&block);
                    r0 += d;
                }
                out
            }
        })
    }

    /// The set `A x` at the default membership tolerance.
    pub fn value_at(&self, x: &Vector) -> Result<SetDesc> {
        self.value_at_tol(x, MEMBERSHIP_TOL)
    }

    /// The set `A x`; `tol` decides memberships and active faces.
    pub fn value_at_tol(&self, x: &Vector, tol: f64) -> Result<SetDesc> {
        check_dim("value_at", self.dim(), x.len())?;
        let n = x.len();
        Ok(match self {
            Operator::Zero { .. } => SetDesc::origin(n),
            Operator::ScaledIdentity { alpha, .. } => SetDesc::point(x * *alpha),
            Operator::Linear { m } => SetDesc::point(m * x),
            Operator::NormalConeAffine { set } => normal_cone(set, x, tol)?,
            Operator::NormalConeBox { lo, hi } => normal_cone(&SetDesc::Box { lo: lo.clone(), hi: hi.clone() }, x, tol)?,
            Operator::Projection { basis } => SetDesc::point(basis * (basis.transpose() * x)),
            Operator::Constant { u } => SetDesc::point(u.clone()),
            Operator::ShiftedL1 { lambda, shift } => {
                let lo = Vector::from_fn(n, |i, _| if x[i] > tol { *lambda } else { -lambda } - shift[i]);
                let hi = Vector::from_fn(n, |i, _| if x[i] < -tol { -lambda } else { *lambda } - shift[i]);
                SetDesc::Box { lo, hi }
            }
            Operator::Subdifferential(f) => f.subdiff_value(x, tol)?,
            Operator::Inverse(op) => op.preimage_value(x, tol)?,
            Operator::Product(parts) => self.blockwise(parts, x, |p, b| p.value_at_tol(b, tol))?,
        })
    }

    /// The set `A⁻¹ x = {u : x ∈ A u}`.
    fn preimage_value(&self, x: &Vector, tol: f64) -> Result<SetDesc> {
        let n = x.len();
        let all_or_nothing = |ok: bool| {
            if ok {
                SetDesc::Whole { dim: n }
            } else {
                SetDesc::Empty { dim: n }
            }
        };
        Ok(match self {
            Operator::Zero { .. } => all_or_nothing(x.norm() <= tol),
            Operator::ScaledIdentity { alpha, .. } => {
                if *alpha > 0.0 {
                    SetDesc::point(x / *alpha)
                } else {
                    all_or_nothing(x.norm() <= tol)
                }
            }
            Operator::Linear { m } => solve_affine(m, x, tol, n),
            Operator::NormalConeAffine { set } => exposed_face(set, x, tol)?,
            Operator::NormalConeBox { lo, hi } => exposed_face(&SetDesc::Box { lo: lo.clone(), hi: hi.clone() }, x, tol)?,
            Operator::Projection { basis } => {
                let pu = basis * (basis.transpose() * x);
                if (x - &pu).norm() <= tol {
                    SetDesc::affine(x.clone(), &linalg::complement(basis, n))
                } else {
                    SetDesc::Empty { dim: n }
                }
            }
            Operator::Constant { u } => all_or_nothing((x - u).norm() <= tol),
            Operator::ShiftedL1 { lambda, shift } => {
                let mut rays = Vec::with_capacity(n);
                for i in 0..n {
                    let t = (x[i] + shift[i]) / lambda;
                    let r = if (t - 1.0).abs() <= tol {
                        Ray::NonNeg
                    } else if (t + 1.0).abs() <= tol {
                        Ray::NonPos
                    } else if t.abs() < 1.0 {
                        Ray::Zero
                    } else {
                        return Ok(SetDesc::Empty { dim: n });
                    };
                    rays.push(r);
                }
                SetDesc::RayProduct { rays }
            }
            Operator::Subdifferential(f) => f.conj_subdiff_value(x, tol)?,
            Operator::Inverse(op) => op.value_at_tol(x, tol)?,
            Operator::Product(parts) => self.blockwise(parts, x, |p, b| p.preimage_value(b, tol))?,
        })
    }

    fn blockwise(
        &self,
        parts: &[Operator],
        x: &Vector,
        f: impl Fn(&Operator, &Vector) -> Result<SetDesc>,
    ) -> Result<SetDesc> {
        let mut sets = Vec::with_capacity(parts.len());
        let mut r0 = 0;
        for p in parts {
            let d = p.dim();
            sets.push(f(p, &x.rows(r0, d).into_owned())?);
            r0 += d;
        }
        Ok(SetDesc::product(&sets))
    }

    /// Tests `u ∈ A x`.
    pub fn contains(&self, x: &Vector, u: &Vector, tol: f64) -> Result<bool> {
        check_dim("contains", self.dim(), u.len())?;
        Ok(self.value_at_tol(x, tol)?.contains(u, tol))
    }

    /// The graph `{(x, u) : u ∈ A x}` when it is an affine subspace.
    pub fn affine_graph(&self) -> Option<SetDesc> {
        let n = self.dim();
        let eye = Matrix::identity(n, n);
        let z = Matrix::zeros(n, n);
        let (offset, span) = match self {
            Operator::Zero { .. } => (Vector::zeros(2 * n), linalg::vstack(&[&eye, &z])),
            Operator::ScaledIdentity { alpha, .. } => (Vector::zeros(2 * n), linalg::vstack(&[&eye, &(&eye * *alpha)])),
            Operator::Linear { m } => (Vector::zeros(2 * n), linalg::vstack(&[&eye, m])),
            Operator::Projection { basis } => {
                (Vector::zeros(2 * n), linalg::vstack(&[&eye, &(basis * basis.transpose())]))
            }
            Operator::Constant { u } => (linalg::concat(&[&Vector::zeros(n), u]), linalg::vstack(&[&eye, &z])),
            Operator::NormalConeAffine { set } => {
                let (o, v) = match set {
                    SetDesc::Point { point } => (point.clone(), Matrix::zeros(n, 0)),
                    SetDesc::Affine { offset, basis } => (offset.clone(), basis.clone()),
                    SetDesc::Whole { .. } => (Vector::zeros(n), eye.clone()),
                    _ => return None,
                };
                let perp = linalg::complement(&v, n);
                let top = linalg::hstack(&[&v, &Matrix::zeros(n, perp.ncols())]);
                let bottom = linalg::hstack(&[&Matrix::zeros(n, v.ncols()), &perp]);
                (linalg::concat(&[&o, &Vector::zeros(n)]), linalg::vstack(&[&top, &bottom]))
            }
            Operator::Inverse(op) => {
                let g = op.affine_graph()?;
                let swap = linalg::hstack(&[
                    &linalg::vstack(&[&z, &eye]),
                    &linalg::vstack(&[&eye, &z]),
                ]);
                return g.image(&swap, RANK_TOL).ok();
            }
            _ => return None,
        };
        Some(SetDesc::affine(offset, &span))
    }

    /// Paramonotonicity flag. Linear maps are paramonotone exactly when
    /// `ker(M + M^T) ⊆ ker M`.
    pub fn paramonotone(&self) -> bool {
        match self {
            Operator::Linear { m } => {
                let ker = linalg::null_space(&(m + m.transpose()), 1e-10);
                ker.ncols() == 0 || (m * ker).amax() <= 1e-10 * (1.0 + m.amax())
            }
            Operator::Inverse(op) => op.paramonotone(),
            Operator::Product(parts) => parts.iter().all(|p| p.paramonotone()),
            _ => true,
        }
    }

    /// True when `A x` has at most one element for every `x`.
    pub fn single_valued(&self) -> bool {
        match self {
            Operator::Zero { .. }
            | Operator::ScaledIdentity { .. }
            | Operator::Linear { .. }
            | Operator::Projection { .. }
            | Operator::Constant { .. } => true,
            Operator::NormalConeAffine { set } => matches!(set, SetDesc::Whole { .. }),
            Operator::NormalConeBox { lo, hi } => lo.iter().zip(hi.iter()).all(|(l, h)| l.is_infinite() && h.is_infinite()),
            Operator::ShiftedL1 { .. } => false,
            Operator::Subdifferential(f) => f.subdiff_single_valued(),
            Operator::Inverse(op) => op.injective(),
            Operator::Product(parts) => parts.iter().all(|p| p.single_valued()),
        }
    }

    /// True when `A⁻¹` is at most single-valued.
    fn injective(&self) -> bool {
        match self {
            Operator::ScaledIdentity { alpha, .. } => *alpha > 0.0,
            Operator::Linear { m } => linalg::rank(m, RANK_TOL) == m.nrows(),
            Operator::NormalConeAffine { set } => matches!(set, SetDesc::Point { .. }),
            Operator::NormalConeBox { lo, hi } => lo.iter().zip(hi.iter()).all(|(l, h)| l == h),
            Operator::Subdifferential(f) => f.conj_subdiff_single_valued(),
            Operator::Inverse(op) => op.single_valued(),
            Operator::Product(parts) => parts.iter().all(|p| p.injective()),
            _ => self.dim() == 0,
        }
    }
}

/// Componentwise soft thresholding at level `t`.
pub fn soft_threshold(v: &Vector, t: f64) -> Vector {
    v.map(|a| a.signum() * (a.abs() - t).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn skew() -> Matrix {
        Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    fn x_axis() -> Matrix {
        Matrix::from_row_slice(2, 1, &[1.0, 0.0])
    }

    pub(crate) fn catalogue() -> Vec<Operator> {
        vec![
            Operator::zero(2),
            Operator::ScaledIdentity { dim: 2, alpha: 0.7 },
            Operator::linear(skew()),
            Operator::linear(Matrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 0.5])),
            Operator::normal_cone(SetDesc::affine(v(&[0.0, 1.0]), &x_axis())),
            Operator::NormalConeBox { lo: v(&[-1.0, f64::NEG_INFINITY]), hi: v(&[1.0, 0.5]) },
            Operator::projection(&x_axis()),
            Operator::Constant { u: v(&[0.3, -2.0]) },
            Operator::ShiftedL1 { lambda: 0.8, shift: v(&[0.2, -1.0]) },
            Operator::Subdifferential(ConvexFn::ExpPair { flip: false }),
            Operator::Subdifferential(ConvexFn::ExpPair { flip: true }),
            Operator::Product(vec![Operator::zero(1), Operator::ShiftedL1 { lambda: 1.0, shift: v(&[0.0]) }]),
        ]
    }

    fn gaussian(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Vector {
        Vector::from_fn(n, |_, _| s * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
    }

    #[test]
    fn resolvent_examples() {
        let z = Operator::zero(2);
        assert_eq!(z.resolve(1.0, &v(&[3.0, -2.0])).unwrap(), v(&[3.0, -2.0]));
        let l1 = Operator::ShiftedL1 { lambda: 1.0, shift: v(&[0.0, 0.0]) };
        assert_eq!(l1.resolve(1.0, &v(&[2.0, -0.5])).unwrap(), v(&[1.0, 0.0]));
        let p = Operator::projection(&x_axis());
        assert!((p.resolve(1.0, &v(&[2.0, 2.0])).unwrap() - v(&[1.0, 2.0])).norm() < 1e-15);
    }

    #[test]
    fn resolvent_solves_its_inclusion() {
        // (x - p)/gamma must lie in A p
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for op in catalogue() {
            for gamma in [0.5, 1.0, 2.0] {
                for _ in 0..50 {
                    let x = gaussian(&mut rng, 2, 2.0);
                    let p = op.resolve(gamma, &x).unwrap();
                    let u = (&x - &p) / gamma;
                    assert!(op.contains(&p, &u, 1e-7).unwrap(), "{op:?} gamma={gamma} x={x}");
                }
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let inv_zero = Operator::zero(2).inverse();
        assert_eq!(inv_zero.resolve(1.0, &v(&[4.0, -1.0])).unwrap(), v(&[0.0, 0.0]));
        let inv_id = Operator::identity(2).inverse();
        assert!((inv_id.resolve(1.0, &v(&[2.0, 4.0])).unwrap() - v(&[1.0, 2.0])).norm() < 1e-15);
    }

    #[test]
    fn skew_inverse_is_negation() {
        let a = Operator::linear(skew());
        let b = Operator::linear(-skew());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = gaussian(&mut rng, 2, 3.0);
            let lhs = a.inverse().resolve(1.0, &x).unwrap();
            let rhs = b.resolve(1.0, &x).unwrap();
            assert!((lhs - rhs).norm() <= 1e-12);
        }
    }

    #[test]
    fn value_at_examples() {
        assert_eq!(Operator::zero(3).value_at(&v(&[1.0, 2.0, 3.0])).unwrap(), SetDesc::origin(3));
        let bx = Operator::NormalConeBox { lo: v(&[-1.0, -1.0]), hi: v(&[1.0, 1.0]) };
        let val = bx.value_at(&v(&[0.5, -0.2])).unwrap();
        assert!(val.contains(&v(&[0.0, 0.0]), 0.0));
        assert!(!val.contains(&v(&[0.1, 0.0]), 1e-9));
        let nc = Operator::normal_cone(SetDesc::subspace(&x_axis()));
        let val = nc.value_at(&v(&[5.0, 0.0])).unwrap();
        assert!(val.contains(&v(&[0.0, 7.0]), 1e-12));
        assert!(!val.contains(&v(&[1.0, 7.0]), 1e-6));
        assert!(nc.value_at(&v(&[5.0, 1.0])).unwrap().is_empty_variant());
        let c = Operator::Constant { u: v(&[1.0, 2.0]) };
        assert_eq!(c.value_at(&v(&[0.0, 0.0])).unwrap(), SetDesc::point(v(&[1.0, 2.0])));
    }

    #[test]
    fn paramonotone_flags() {
        assert!(!Operator::linear(skew()).paramonotone());
        assert!(!Operator::linear(skew()).inverse().paramonotone());
        assert!(Operator::linear(Matrix::from_row_slice(2, 2, &[2.0, 1.0, -1.0, 0.5])).paramonotone());
        assert!(Operator::linear(Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0])).paramonotone());
        assert!(Operator::projection(&x_axis()).paramonotone());
    }

    #[test]
    fn skew_operator_breaks_paramonotonicity() {
        // (x0, A x0), (x1, A x1) with zero pairing but (x0, A x1) off the graph
        let a = Operator::linear(skew());
        let x0 = v(&[1.0, 0.0]);
        let x1 = v(&[0.0, 0.0]);
        let u0 = skew() * &x0;
        let u1 = skew() * &x1;
        assert!(((&x0 - &x1).dot(&(&u0 - &u1))).abs() < 1e-15);
        assert!(!a.contains(&x0, &u1, 1e-8).unwrap());
    }

    #[test]
    fn affine_graph_of_inverse_swaps() {
        let g = Operator::Constant { u: v(&[1.0, 0.0]) }.inverse().affine_graph().unwrap();
        assert!(g.contains(&v(&[1.0, 0.0, 3.0, -4.0]), 1e-12));
        assert!(!g.contains(&v(&[0.0, 0.0, 3.0, -4.0]), 1e-6));
    }

    #[test]
    fn validation() {
        assert!(Operator::linear(-Matrix::identity(2, 2)).validated().is_err());
        assert!(Operator::ShiftedL1 { lambda: 0.0, shift: v(&[0.0]) }.validated().is_err());
        assert!(Operator::NormalConeBox { lo: v(&[1.0]), hi: v(&[0.0]) }.validated().is_err());
    }

    #[test]
    fn json_round_trip() {
        let op = Operator::Product(vec![Operator::linear(skew()).inverse(), Operator::zero(1)]);
        let s = serde_json::to_string(&op).unwrap();
        let back: Operator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, op);
        let parsed: Operator = serde_json::from_str(r#"{"kind":"scaled_identity","params":{"dim":2,"alpha":1.0}}"#).unwrap();
        assert_eq!(parsed, Operator::identity(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn firm_nonexpansiveness(seed in 0u64..1000, idx in 0usize..12, gamma in 0.1f64..5.0) {
            let op = &catalogue()[idx];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..16 {
                let x1 = gaussian(&mut rng, 2, 3.0);
                let x2 = gaussian(&mut rng, 2, 3.0);
                let j1 = op.resolve(gamma, &x1).unwrap();
                let j2 = op.resolve(gamma, &x2).unwrap();
                let d = &j1 - &j2;
                prop_assert!(d.dot(&(&x1 - &x2)) >= d.norm_squared() - 1e-9);
            }
        }

        #[test]
        fn moreau_resolvent_identity(seed in 0u64..1000, idx in 0usize..12) {
            let op = &catalogue()[idx];
            let inv = op.inverse();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for gamma in [0.5, 1.0, 2.0] {
                let x = gaussian(&mut rng, 2, 3.0);
                let lhs = op.resolve(gamma, &x).unwrap() + inv.resolve(1.0 / gamma, &(&x / gamma)).unwrap() * gamma;
                prop_assert!((lhs - &x).norm() <= 1e-10 * (1.0 + x.norm()));
            }
        }

        #[test]
        fn double_inverse_agrees(seed in 0u64..1000, idx in 0usize..12) {
            let op = &catalogue()[idx];
            let back = op.inverse().inverse();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = gaussian(&mut rng, 2, 3.0);
            let a = op.resolve(0.7, &x).unwrap();
            let b = back.resolve(0.7, &x).unwrap();
            prop_assert!((a - b).norm() <= 1e-10 * (1.0 + x.norm()));
        }
    }
}
