//! Primal and dual solution sets of structured problems.

mod setdesc;

pub use setdesc::{
    exposed_face, normal_cone, polyhedron_violation, ray_bounds, solve_affine, support_value, Ray, SetDesc,
    DYKSTRA_TOL, MEMBERSHIP_TOL,
};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector, RANK_TOL};
use crate::problem::Triple;

/// `K_x = (−L^{-*}Ax) ∩ (BLx)`; empty exactly when `x` is not a primal
/// solution.
pub fn traverse_k(t: &Triple, x: &Vector) -> Result<SetDesc> {
    traverse_k_tol(t, x, MEMBERSHIP_TOL)
}

pub fn traverse_k_tol(t: &Triple, x: &Vector, tol: f64) -> Result<SetDesc> {
    check_dim("traverse_k", t.n(), x.len())?;
    let ax = t.a.value_at_tol(x, tol)?;
    let blx = t.b.value_at_tol(&(&t.l * x), tol)?;
    let lhs = ax.preimage(&(-t.lt()), tol)?;
    lhs.intersect(&blx, tol)
}

/// `Z_y = L⁻¹B⁻¹y ∩ A⁻¹(−L*y)`, computed as the dual traversal.
pub fn traverse_z(t: &Triple, y: &Vector) -> Result<SetDesc> {
    traverse_z_tol(t, y, MEMBERSHIP_TOL)
}

pub fn traverse_z_tol(t: &Triple, y: &Vector, tol: f64) -> Result<SetDesc> {
    check_dim("traverse_z", t.m(), y.len())?;
    traverse_k_tol(&t.dual(), y, tol)
}

/// The whole primal solution set from one dual solution `k`.
pub fn recover_primal_set(t: &Triple, k: &Vector) -> Result<SetDesc> {
    if !(t.a.paramonotone() && t.b.paramonotone()) {
        return Err(Error::NotParamonotone);
    }
    let z = traverse_z(t, k)?;
    if z.is_empty() {
        return Err(Error::Precondition("k is not a dual solution (Z_k is empty)".into()));
    }
    Ok(z)
}

/// The whole dual solution set from one primal solution `z`.
pub fn recover_dual_set(t: &Triple, z: &Vector) -> Result<SetDesc> {
    if !(t.a.paramonotone() && t.b.paramonotone()) {
        return Err(Error::NotParamonotone);
    }
    let k = traverse_k(t, z)?;
    if k.is_empty() {
        return Err(Error::Precondition("z is not a primal solution (K_z is empty)".into()));
    }
    Ok(k)
}

/// Primal and dual solution sets of `A = N_U`, `B = N_V`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilitySets {
    pub z: SetDesc,
    pub k: SetDesc,
}

/// `Z = U ∩ L⁻¹(V)` and `K = N_{V−LU}(0)` for affine subspaces, polyhedral
/// cones (ray products) and boxes.
pub fn feasibility_sets(u: &SetDesc, v: &SetDesc, l: &Matrix) -> Result<FeasibilitySets> {
    check_dim("feasibility: columns of L", u.dim(), l.ncols())?;
    check_dim("feasibility: rows of L", v.dim(), l.nrows())?;
    let tol = 1e-9;
    let (n, m) = (u.dim(), v.dim());
    let lt = l.transpose();
    let affine_like = |s: &SetDesc| matches!(s, SetDesc::Point { .. } | SetDesc::Affine { .. } | SetDesc::Whole { .. });
    let cone = |s: &SetDesc| matches!(s, SetDesc::RayProduct { .. });

    if affine_like(u) && affine_like(v) {
        let (u0, ub) = affine_parts(u);
        let (v0, vb) = affine_parts(v);
        let dir = linalg::hstack(&[&vb, &(l * &ub)]);
        let dir_basis = linalg::orth(&dir, RANK_TOL);
        let gap = &v0 - l * &u0;
        let normal = &gap - &dir_basis * (dir_basis.transpose() * &gap);
        if normal.norm() > tol * (1.0 + gap.norm()) {
            return Err(Error::Infeasible { certificate: Some(normal) });
        }
        let z = u.intersect(&v.preimage(l, tol)?, tol)?;
        let k = SetDesc::subspace(&linalg::complement(&dir_basis, m));
        return Ok(FeasibilitySets { z, k });
    }

    if cone(u) && cone(v) {
        let z = u.intersect(&v.preimage(l, tol)?, tol)?;
        let u_dual = u.polar_cone(tol)?.scale(-1.0);
        let k = v.polar_cone(tol)?.intersect(&u_dual.preimage(&lt, tol)?, tol)?;
        return Ok(FeasibilitySets { z, k });
    }

    if let (SetDesc::Box { lo: ul, hi: uh }, SetDesc::Box { lo: vl, hi: vh }) = (u, v) {
        let is_id = n == m && (l - Matrix::identity(n, n)).amax() == 0.0;
        if is_id {
            let lo = vl - uh;
            let hi = vh - ul;
            let mut rays = Vec::with_capacity(n);
            for i in 0..n {
                match Ray::normal_of_interval(lo[i], hi[i], 0.0, 0.0) {
                    Some(r) => rays.push(r),
                    None => {
                        let mut cert = Vector::zeros(n);
                        cert[i] = if lo[i] > 0.0 { lo[i] } else { hi[i] };
                        return Err(Error::Infeasible { certificate: Some(cert) });
                    }
                }
            }
            let z = u.intersect(v, tol)?;
            return Ok(FeasibilitySets {
                z,
                k: SetDesc::RayProduct { rays },
            });
        }
        let z = u.intersect(&v.preimage(l, tol)?, tol)?;
        if z.is_empty() {
            return Err(Error::Infeasible { certificate: None });
        }
        if interior_certificate(u, vl, vh, l).is_some() {
            return Ok(FeasibilitySets {
                z,
                k: SetDesc::origin(m),
            });
        }
        return Err(Error::Unsupported(
            "dual set of box feasibility with L ≠ Id and no interior point".into(),
        ));
    }
    Err(Error::Unsupported("feasibility sets need two affine sets, two ray-product cones, or two boxes".into()))
}

/// Product form: `V = V₁ × … × V_n` with stacked `L`.
pub fn feasibility_sets_product(u: &SetDesc, parts: &[(Matrix, SetDesc)]) -> Result<FeasibilitySets> {
    let ls: Vec<&Matrix> = parts.iter().map(|(l, _)| l).collect();
    let vs: Vec<SetDesc> = parts.iter().map(|(_, v)| v.clone()).collect();
    feasibility_sets(u, &SetDesc::product(&vs), &linalg::vstack(&ls))
}

/// A point `x ∈ U` with `Lx` at distance at least `δ > 0` inside the box
/// `[vl, vh]`; it certifies `0 ∈ int(V − LU)`.
pub fn interior_certificate(u: &SetDesc, vl: &Vector, vh: &Vector, l: &Matrix) -> Option<Vector> {
    let width = (vh - vl).amin();
    if !(width > 0.0) {
        return None;
    }
    let delta = if width.is_finite() { 0.25 * width } else { 1.0 };
    let shrunk = SetDesc::Box {
        lo: vl.add_scalar(delta),
        hi: vh.add_scalar(-delta),
    };
    let cand = u.intersect(&shrunk.preimage(l, 1e-9).ok()?, 1e-9).ok()?;
    let x = cand.project(&Vector::zeros(u.dim()), DYKSTRA_TOL).ok()?;
    let lx = l * &x;
    let inside = (0..lx.len()).all(|i| lx[i] >= vl[i] + 0.5 * delta && lx[i] <= vh[i] - 0.5 * delta);
    (inside && u.contains(&x, 1e-9)).then_some(x)
}

fn affine_parts(s: &SetDesc) -> (Vector, Matrix) {
    let n = s.dim();
    match s {
        SetDesc::Point { point } => (point.clone(), Matrix::zeros(n, 0)),
        SetDesc::Affine { offset, basis } => (offset.clone(), basis.clone()),
        SetDesc::Whole { .. } => (Vector::zeros(n), Matrix::identity(n, n)),
        _ => unreachable!("affine_parts on a non-affine set"),
    }
}

/// Both sides of the two common-zero equivalences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommonZeroReport {
    /// `zer A ∩ zer L*BL ≠ ∅`.
    pub zer_a_cap_zer_lbl: bool,
    /// `K ∩ ker L* ≠ ∅`.
    pub k_meets_ker_lstar: bool,
    /// `zer L^{-*}A ∩ zer BL ≠ ∅`.
    pub zer_la_cap_zer_bl: bool,
    /// `0 ∈ K`.
    pub zero_in_k: bool,
}

/// Evaluates each side of both equivalences independently and fails when
/// a pair disagrees. `zer L*BL` needs `B` with an affine graph.
pub fn common_zero_tests(t: &Triple, k_set: &SetDesc) -> Result<CommonZeroReport> {
    let tol = 1e-9;
    let (n, m) = (t.n(), t.m());
    check_dim("common_zero_tests K", m, k_set.dim())?;
    let zer_a = t.a.inverse().value_at_tol(&Vector::zeros(n), tol)?;
    let zer_b = t.b.inverse().value_at_tol(&Vector::zeros(m), tol)?;

    // zer L^{-*}A = zer A, zer BL = L⁻¹(zer B)
    let zer_la_cap_zer_bl = !zer_a.intersect(&zer_b.preimage(&t.l, tol)?, tol)?.is_empty();

    // pairs (z, v): z ∈ zer A, (Lz, v) ∈ gra B, L*v = 0
    let graph = t
        .b
        .affine_graph()
        .ok_or_else(|| Error::Unsupported("zer L*BL needs an operator B with affine graph".into()))?;
    let lift = linalg::hstack(&[
        &linalg::vstack(&[&t.l, &Matrix::zeros(m, n)]),
        &linalg::vstack(&[&Matrix::zeros(m, m), &Matrix::identity(m, m)]),
    ]);
    let pairs = graph.preimage(&lift, tol)?;
    let ker_lt = SetDesc::subspace(&linalg::null_space(t.lt(), RANK_TOL));
    let zs = SetDesc::product(&[zer_a.clone(), ker_lt.clone()]);
    let zer_a_cap_zer_lbl = !pairs.intersect(&zs, tol)?.is_empty();

    let k_meets_ker_lstar = !k_set.intersect(&ker_lt, tol)?.is_empty();
    let zero_in_k = k_set.contains(&Vector::zeros(m), tol);

    let report = CommonZeroReport {
        zer_a_cap_zer_lbl,
        k_meets_ker_lstar,
        zer_la_cap_zer_bl,
        zero_in_k,
    };
    if report.zer_a_cap_zer_lbl != report.k_meets_ker_lstar || report.zer_la_cap_zer_bl != report.zero_in_k {
        return Err(Error::Precondition(format!("common-zero equivalence violated: {report:?}")));
    }
    Ok(report)
}

/// `max |<Lz₀ − Lz₁, k₀ − k₁>|` over all pairs of verified saddle samples.
pub fn skew_check(t: &Triple, samples: &[(Vector, Vector)], tol: f64) -> Result<f64> {
    for (i, (z, k)) in samples.iter().enumerate() {
        let residual = t.saddle_residual(z, k)?;
        if residual > tol {
            return Err(Error::InvalidSample { index: i, residual });
        }
    }
    let lz: Vec<Vector> = samples.iter().map(|(z, _)| &t.l * z).collect();
    let mut worst = 0.0_f64;
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let p = (&lz[i] - &lz[j]).dot(&(&samples[i].1 - &samples[j].1));
            worst = worst.max(p.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Operator;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn skew() -> Matrix {
        Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    fn skew_triple() -> Triple {
        Triple::new(Operator::linear(skew()), Matrix::identity(2, 2), Operator::linear(-skew()), 0.5, 0.5).unwrap()
    }

    fn x_axis() -> SetDesc {
        SetDesc::subspace(&Matrix::from_row_slice(2, 1, &[1.0, 0.0]))
    }

    #[test]
    fn skew_traversal() {
        let k = traverse_k(&skew_triple(), &v(&[1.0, 0.0])).unwrap();
        assert!(matches!(k, SetDesc::Point { ref point } if (point - v(&[0.0, -1.0])).norm() < 1e-14));
        assert!(matches!(recover_primal_set(&skew_triple(), &v(&[0.0, 0.0])), Err(Error::NotParamonotone)));
    }

    #[test]
    fn traversal_duality_on_skew() {
        let t = skew_triple();
        let x = v(&[0.5, -1.5]);
        let kx = traverse_k(&t, &x).unwrap();
        let SetDesc::Point { point: y } = kx else { panic!("point expected") };
        assert!(traverse_z(&t, &y).unwrap().contains(&x, 1e-9));
    }

    #[test]
    fn subspace_feasibility() {
        let fs = feasibility_sets(&x_axis(), &x_axis(), &Matrix::identity(2, 2)).unwrap();
        assert!(fs.z.contains(&v(&[4.0, 0.0]), 1e-12) && !fs.z.contains(&v(&[0.0, 1.0]), 1e-6));
        assert!(fs.k.contains(&v(&[0.0, 3.0]), 1e-12) && !fs.k.contains(&v(&[1.0, 0.0]), 1e-6));
        let t = Triple::new(
            Operator::normal_cone(x_axis()),
            Matrix::identity(2, 2),
            Operator::normal_cone(x_axis()),
            1.0,
            1.0,
        )
        .unwrap();
        let kz = traverse_k(&t, &v(&[2.0, 0.0])).unwrap();
        assert!(kz.contains(&v(&[0.0, -5.0]), 1e-12));
        let z = recover_primal_set(&t, &v(&[0.0, 0.0])).unwrap();
        assert!(z.contains(&v(&[-3.0, 0.0]), 1e-12));
        let r = common_zero_tests(&t, &fs.k).unwrap();
        assert!(r.zer_a_cap_zer_lbl && r.zero_in_k);
    }

    #[test]
    fn common_zero_split_verdict() {
        // A = L = P_U, B ≡ u⊥
        let u = Matrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
        let p = &u * u.transpose();
        let uperp = v(&[0.0, 1.0, 0.0]);
        let t = Triple::new(Operator::projection(&u), p, Operator::Constant { u: uperp.clone() }, 1.0, 1.0).unwrap();
        let z = v(&[0.0, 2.0, -1.0]);
        let k = traverse_k(&t, &z).unwrap();
        assert!(matches!(k, SetDesc::Point { ref point } if (point - &uperp).norm() < 1e-12));
        let r = common_zero_tests(&t, &k).unwrap();
        assert!(r.zer_a_cap_zer_lbl && r.k_meets_ker_lstar);
        assert!(!r.zero_in_k && !r.zer_la_cap_zer_bl);
    }

    #[test]
    fn zero_and_identity() {
        let l = Matrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        let t = Triple::with_balanced_steps(Operator::zero(3), l.clone(), Operator::identity(2), 0.9).unwrap();
        let z = traverse_z(&t, &v(&[0.0, 0.0])).unwrap();
        let ker = linalg::null_space(&l, 1e-12);
        assert!(z.contains(&(ker.column(0) * 2.5), 1e-12));
        assert!(!z.contains(&v(&[1.0, 0.0, 0.0]), 1e-6));
        let r = common_zero_tests(&t, &SetDesc::origin(2)).unwrap();
        assert!(r.zero_in_k);
    }

    #[test]
    fn box_feasibility_and_interior() {
        let u = SetDesc::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0]));
        let touching = SetDesc::boxed(v(&[1.0, 0.0]), v(&[2.0, 1.0]));
        let fs = feasibility_sets(&u, &touching, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(fs.k, SetDesc::RayProduct { rays: vec![Ray::NonPos, Ray::Zero] });
        let overlapping = SetDesc::boxed(v(&[0.5, -1.0]), v(&[2.0, 2.0]));
        let fs = feasibility_sets(&u, &overlapping, &Matrix::identity(2, 2)).unwrap();
        assert_eq!(fs.k, SetDesc::RayProduct { rays: vec![Ray::Zero, Ray::Zero] });
        let l = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let fs = feasibility_sets(&u, &SetDesc::boxed(v(&[0.5]), v(&[1.5])), &l).unwrap();
        assert_eq!(fs.k, SetDesc::origin(1));
        let far = SetDesc::boxed(v(&[3.0, 0.0]), v(&[4.0, 1.0]));
        assert!(matches!(
            feasibility_sets(&u, &far, &Matrix::identity(2, 2)),
            Err(Error::Infeasible { certificate: Some(_) })
        ));
    }

    #[test]
    fn cone_feasibility() {
        // U = R₊ × R, V = {(t, t)} ∩ … as cones: V = R₋ × R₊, L = Id
        let u = SetDesc::RayProduct { rays: vec![Ray::NonNeg, Ray::Free] };
        let vv = SetDesc::RayProduct { rays: vec![Ray::NonPos, Ray::NonNeg] };
        let fs = feasibility_sets(&u, &vv, &Matrix::identity(2, 2)).unwrap();
        assert!(fs.z.contains(&v(&[0.0, 3.0]), 1e-9) && !fs.z.contains(&v(&[1.0, 3.0]), 1e-6));
        // K = V° ∩ U^⊕ = (R₊ × R₋) ∩ (R₊ × {0})
        assert!(fs.k.contains(&v(&[2.0, 0.0]), 1e-9));
        assert!(!fs.k.contains(&v(&[2.0, -1.0]), 1e-6));
    }

    #[test]
    fn infeasible_affine_certificate() {
        let line = SetDesc::affine(v(&[0.0, 1.0]), &Matrix::from_row_slice(2, 1, &[1.0, 0.0]));
        let err = feasibility_sets(&x_axis(), &line, &Matrix::identity(2, 2)).unwrap_err();
        let Error::Infeasible { certificate: Some(c) } = err else { panic!("certificate expected") };
        assert!((c - v(&[0.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn skew_check_rejects_bad_samples() {
        let t = skew_triple();
        let good = (v(&[1.0, 0.0]), v(&[0.0, -1.0]));
        assert_eq!(skew_check(&t, std::slice::from_ref(&good), 1e-9).unwrap(), 0.0);
        let bad = (v(&[1.0, 0.0]), v(&[1.0, 0.0]));
        assert!(matches!(skew_check(&t, &[good, bad], 1e-9), Err(Error::InvalidSample { index: 1, .. })));
    }

    #[test]
    fn feasibility_grid_pairing_vanishes() {
        let u = SetDesc::subspace(&Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
        let vv = SetDesc::subspace(&Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        let t = Triple::new(Operator::normal_cone(u.clone()), Matrix::identity(3, 3), Operator::normal_cone(vv.clone()), 1.0, 1.0)
            .unwrap();
        let fs = feasibility_sets(&u, &vv, &Matrix::identity(3, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let zs = fs.z.sample_points(&mut rng, 6, 3.0);
        let ks = fs.k.sample_points(&mut rng, 6, 3.0);
        let samples: Vec<_> = zs.into_iter().zip(ks).collect();
        assert!(skew_check(&t, &samples, 1e-9).unwrap() <= 1e-12);
    }
}
