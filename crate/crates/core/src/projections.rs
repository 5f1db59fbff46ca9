//! Closed-form projections onto `Z − ρL*K`, onto the fixed points of the
//! reduced operator, and the `M`-projection onto the saddle set.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Vector, RANK_TOL};
use crate::operators::Operator;
use crate::problem::Triple;
use crate::solution_sets::{SetDesc, DYKSTRA_TOL, MEMBERSHIP_TOL};
use crate::splitting::{Factor, FactorKind, FACTOR_TOL};

/// Tolerance for the resolvent identities.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Solution sets with anchors `z0 ∈ Z`, `k0 ∈ K`.
#[derive(Debug, Clone)]
pub struct ProjectionContext {
    pub z: SetDesc,
    pub k: SetDesc,
    pub l: Matrix,
    pub rho: f64,
    pub z0: Vector,
    pub k0: Vector,
    neg_lk: SetDesc,
}

impl ProjectionContext {
    pub fn new(z: SetDesc, k: SetDesc, l: Matrix, rho: f64, z0: Vector, k0: Vector) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        if !z.contains(&z0, MEMBERSHIP_TOL) {
            return Err(Error::Precondition("anchor z0 is not in Z".into()));
        }
        if !k.contains(&k0, MEMBERSHIP_TOL) {
            return Err(Error::Precondition("anchor k0 is not in K".into()));
        }
        let neg_lk = k.image(&(l.transpose() * -rho), RANK_TOL)?;
        Ok(ProjectionContext {
            z,
            k,
            l,
            rho,
            z0,
            k0,
            neg_lk,
        })
    }

    /// Same sets and anchors with another `ρ`.
    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::new(self.z.clone(), self.k.clone(), self.l.clone(), rho, self.z0.clone(), self.k0.clone())
    }

    /// Same sets with other anchors.
    pub fn with_anchors(&self, z0: Vector, k0: Vector) -> Result<Self> {
        Self::new(self.z.clone(), self.k.clone(), self.l.clone(), self.rho, z0, k0)
    }

    /// The set `−ρL*K`.
    pub fn neg_lk(&self) -> &SetDesc {
        &self.neg_lk
    }

    /// `P_Z`.
    pub fn proj_z(&self, x: &Vector) -> Result<Vector> {
        self.z.project(x, DYKSTRA_TOL)
    }

    fn lt_k0(&self) -> Vector {
        self.l.transpose() * &self.k0
    }

    /// True when `K ∩ ker L* ≠ ∅`, decided by exact intersection.
    pub fn k_meets_ker_lstar(&self) -> Result<bool> {
        let ker = SetDesc::subspace(&linalg::null_space(&self.l.transpose(), RANK_TOL));
        Ok(!self.k.intersect(&ker, MEMBERSHIP_TOL)?.is_empty())
    }
}

/// `P_{Z−ρL*K}(x) = P_Z(x + ρL*k0) + P_{−ρL*K}(x − z0)`.
pub fn proj_z_minus_rho_lk(ctx: &ProjectionContext, x: &Vector) -> Result<Vector> {
    let first = ctx.proj_z(&(x + ctx.lt_k0() * ctx.rho))?;
    let second = ctx.neg_lk.project(&(x - &ctx.z0), DYKSTRA_TOL)?;
    Ok(first + second)
}

/// `J_{ρA}P_{Z−ρL*K}(x)`, checked against `P_Z(x + ρL*k0)` and, when
/// `K ∩ ker L* ≠ ∅`, against `P_Z(x)`.
pub fn resolvent_of_projection(ctx: &ProjectionContext, a: &Operator, x: &Vector) -> Result<Vector> {
    let lhs = a.resolve(ctx.rho, &proj_z_minus_rho_lk(ctx, x)?)?;
    let general = ctx.proj_z(&(x + ctx.lt_k0() * ctx.rho))?;
    check_identity(&lhs, &general)?;
    if ctx.k_meets_ker_lstar()? {
        check_identity(&lhs, &ctx.proj_z(x)?)?;
    }
    Ok(lhs)
}

fn check_identity(lhs: &Vector, rhs: &Vector) -> Result<()> {
    let gap = (lhs - rhs).norm();
    if gap > IDENTITY_TOL * (1.0 + rhs.norm()) {
        return Err(Error::IdentityMismatch {
            lhs: lhs.iter().copied().collect(),
            rhs: rhs.iter().copied().collect(),
            gap,
        });
    }
    Ok(())
}

/// `P_{Fix T̃}(w) = σ^{-1/2} P_{Z−σL*K}(σ^{1/2} w)` for scaled-isometry and
/// Douglas-Rachford factors.
pub fn proj_fix_reduced(t: &Triple, f: &Factor, ctx: &ProjectionContext, w: &Vector) -> Result<Vector> {
    if !matches!(f.kind, FactorKind::ScaledIsometry | FactorKind::DouglasRachford) {
        return Err(Error::Precondition("fixed-point projection needs a scaled-isometry or Douglas-Rachford factor".into()));
    }
    if !(t.a.paramonotone() && t.b.paramonotone()) {
        return Err(Error::NotParamonotone);
    }
    let ctx = if ctx.rho == t.sigma { ctx.clone() } else { ctx.with_rho(t.sigma)? };
    let s = t.sigma.sqrt();
    Ok(proj_z_minus_rho_lk(&ctx, &(w * s))? / s)
}

/// `M`-projection of `(x0, y0)` onto `Fix T`:
/// `p = P_Z(x0 − σL*y0)`, `q = J_{τB⁻¹}(2τLp − τL P_{Z−σL*K}(x0 − σL*y0))`.
///
/// Needs `στLL* = Id` and `K ∩ ker L* ≠ ∅`, certified by exact
/// intersection or by `witness`.
pub fn m_projection_onto_fix_t(
    t: &Triple,
    ctx: &ProjectionContext,
    x0: &Vector,
    y0: &Vector,
    witness: Option<&Vector>,
) -> Result<(Vector, Vector)> {
    let m = t.m();
    let dev = ((&t.l * t.lt()) * (t.sigma * t.tau) - Matrix::identity(m, m)).amax();
    if dev > FACTOR_TOL {
        return Err(Error::Precondition(format!("M-projection needs sigma*tau*L L^T = Id (deviation {dev:e})")));
    }
    if !(t.a.paramonotone() && t.b.paramonotone()) {
        return Err(Error::NotParamonotone);
    }
    let certified = match witness {
        Some(k) => ctx.k.contains(k, MEMBERSHIP_TOL) && (t.lt() * k).norm() <= MEMBERSHIP_TOL,
        None => ctx.k_meets_ker_lstar()?,
    };
    if !certified {
        return Err(Error::Precondition("K ∩ ker L* ≠ ∅ is not certified".into()));
    }
    let ctx = if ctx.rho == t.sigma { ctx.clone() } else { ctx.with_rho(t.sigma)? };
    let v = x0 - t.lt() * y0 * t.sigma;
    let p = ctx.proj_z(&v)?;
    let q = proj_z_minus_rho_lk(&ctx, &v)?;
    let arg = (&t.l * &p) * (2.0 * t.tau) - (&t.l * q) * t.tau;
    let y = t.b.inverse().resolve(t.tau, &arg)?;
    Ok((p, y))
}

/// `P_{ρL*V}(x) = ρL* P_V(Lx/ρ)` for `L` with orthonormal rows.
pub fn scaled_isometry_pushforward_projection(l: &Matrix, rho: f64, v: &SetDesc, x: &Vector) -> Result<Vector> {
    if rho == 0.0 {
        return Err(Error::InvalidParameter("rho must be nonzero".into()));
    }
    let m = l.nrows();
    let dev = (l * l.transpose() - Matrix::identity(m, m)).amax();
    if dev > FACTOR_TOL {
        return Err(Error::Precondition(format!("pushforward needs L L^T = Id (deviation {dev:e})")));
    }
    let pv = v.project(&(l * x / rho), DYKSTRA_TOL)?;
    Ok(l.transpose() * pv * rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn x_axis() -> SetDesc {
        SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[1.0, 0.0]))
    }

    #[test]
    fn trivial_dual_set_reduces_to_pz() {
        let ctx = ProjectionContext::new(x_axis(), SetDesc::origin(2), Matrix::identity(2, 2), 1.0, v(&[0.0, 0.0]), v(&[0.0, 0.0]))
            .unwrap();
        let p = proj_z_minus_rho_lk(&ctx, &v(&[3.0, 4.0])).unwrap();
        assert_eq!(p, v(&[3.0, 0.0]));
        let r = resolvent_of_projection(&ctx, &Operator::normal_cone(x_axis()), &v(&[3.0, 4.0])).unwrap();
        assert_eq!(r, v(&[3.0, 0.0]));
    }

    #[test]
    fn dr_subspaces_give_identity() {
        let y_axis = SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[0.0, 1.0]));
        let ctx = ProjectionContext::new(x_axis(), y_axis, Matrix::identity(2, 2), 1.0, v(&[0.0, 0.0]), v(&[0.0, 0.0])).unwrap();
        let x = v(&[1.5, -2.5]);
        let p = proj_z_minus_rho_lk(&ctx, &x).unwrap();
        assert!((&p - &x).norm() < 1e-12, "{p}");
    }

    #[test]
    fn anchors_do_not_matter() {
        let y_axis = SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[0.0, 1.0]));
        let ctx = ProjectionContext::new(x_axis(), y_axis, Matrix::identity(2, 2), 2.0, v(&[1.0, 0.0]), v(&[0.0, 3.0])).unwrap();
        let other = ctx.with_anchors(v(&[-4.0, 0.0]), v(&[0.0, -1.0])).unwrap();
        let x = v(&[0.3, 0.7]);
        let a = proj_z_minus_rho_lk(&ctx, &x).unwrap();
        let b = proj_z_minus_rho_lk(&other, &x).unwrap();
        assert!((a - b).norm() <= 1e-12);
    }

    #[test]
    fn pushforward_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = linalg::orth(&linalg::gaussian_matrix(&mut rng, 3, 2), 1e-12).transpose();
        let x = linalg::gaussian(&mut rng, 3, 1.0);
        let whole = scaled_isometry_pushforward_projection(&l, 2.0, &SetDesc::Whole { dim: 2 }, &x).unwrap();
        assert!((whole - l.transpose() * (&l * &x)).norm() < 1e-14);
        let pt = scaled_isometry_pushforward_projection(&l, 2.0, &SetDesc::point(v(&[1.0, -1.0])), &x).unwrap();
        assert!((pt - l.transpose() * v(&[2.0, -2.0])).norm() < 1e-14);
        assert!(scaled_isometry_pushforward_projection(&(l * 2.0), 1.0, &SetDesc::Whole { dim: 2 }, &x).is_err());
    }

    #[test]
    fn rejects_bad_anchor() {
        assert!(ProjectionContext::new(x_axis(), SetDesc::origin(2), Matrix::identity(2, 2), 1.0, v(&[0.0, 1.0]), v(&[0.0, 0.0])).is_err());
    }
}
