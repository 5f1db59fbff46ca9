//! Bundled desk-scale problems with hand-derived solution sets.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::fenchel::{self, ConvexFn, LassoInstance};
use crate::linalg::{self, Matrix, Vector};
use crate::operators::Operator;
use crate::problem::{product_triple, Triple};
use crate::solution_sets::SetDesc;
use crate::splitting::{self, IterOptions};

/// A triple with its exact primal and dual solution sets.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: &'static str,
    pub triple: Triple,
    pub z: SetDesc,
    pub k: SetDesc,
}

fn col(v: &Vector) -> Matrix {
    Matrix::from_column_slice(v.len(), 1, v.as_slice())
}

fn skew2() -> Matrix {
    Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
}

/// `A` a quarter rotation, `L = Id`, `B = −A`; the saddle set is the graph
/// of `−A`, strictly inside `Z × K = ℝ² × ℝ²`.
pub fn skew() -> Result<Instance> {
    let t = Triple::new(Operator::linear(skew2()), Matrix::identity(2, 2), Operator::linear(-skew2()), 0.5, 0.5)?;
    Ok(Instance {
        name: "skew",
        triple: t,
        z: SetDesc::Whole { dim: 2 },
        k: SetDesc::Whole { dim: 2 },
    })
}

/// Affine feasibility in ℝ⁴ → ℝ³ with `L` having orthonormal rows and
/// `σ = τ = 1`, so `στLL* = Id`. `U = p + span{u₁, u₂}`,
/// `V = Lp + span{Lu₂}`; then `Z = p + span{u₂}` and
/// `K = span{Lu₁, Lu₂}^⊥`.
pub fn feasibility_subspaces() -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let l = linalg::orth(&linalg::gaussian_matrix(&mut rng, 4, 3), 1e-12).transpose();
    let p = linalg::gaussian(&mut rng, 4, 1.0);
    let u1 = linalg::gaussian(&mut rng, 4, 1.0);
    let u2 = linalg::gaussian(&mut rng, 4, 1.0);
    let u = SetDesc::affine(p.clone(), &linalg::hstack(&[&col(&u1), &col(&u2)]));
    let v = SetDesc::affine(&l * &p, &col(&(&l * &u2)));
    let t = Triple::new(Operator::normal_cone(u), l.clone(), Operator::normal_cone(v), 1.0, 1.0)?;
    let lu = linalg::hstack(&[&col(&(&l * &u1)), &col(&(&l * &u2))]);
    let k = SetDesc::subspace(&linalg::complement(&linalg::orth(&lu, 1e-12), 3));
    Ok(Instance {
        name: "feasibility-subspaces",
        triple: t,
        z: SetDesc::affine(p, &col(&u2)),
        k,
    })
}

/// Douglas-Rachford form (`L = Id`, `σ = τ = 1`) in ℝ³ with a rotated
/// line `U = Q span{e₁}` inside the plane `V = Q span{e₁, e₂}`:
/// `Z = U`, `K = Q span{e₃}`.
pub fn feasibility_dr() -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = linalg::orth(&linalg::gaussian_matrix(&mut rng, 3, 3), 1e-12);
    let e = |i: usize| col(&q.column(i).into_owned());
    let u = SetDesc::subspace(&e(0));
    let v = SetDesc::subspace(&linalg::hstack(&[&e(0), &e(1)]));
    let t = Triple::new(Operator::normal_cone(u.clone()), Matrix::identity(3, 3), Operator::normal_cone(v), 1.0, 1.0)?;
    Ok(Instance {
        name: "feasibility-dr",
        triple: t,
        z: u,
        k: SetDesc::subspace(&e(2)),
    })
}

/// `U = [0,1]²`, `V = [1,2] × [0,1]`, `L = Id`:
/// `Z = {1} × [0,1]`, `K = ℝ₋ × {0}`.
pub fn boxes() -> Result<Instance> {
    let u = SetDesc::boxed(Vector::from_row_slice(&[0.0, 0.0]), Vector::from_row_slice(&[1.0, 1.0]));
    let v = SetDesc::boxed(Vector::from_row_slice(&[1.0, 0.0]), Vector::from_row_slice(&[2.0, 1.0]));
    let t = Triple::new(Operator::normal_cone(u), Matrix::identity(2, 2), Operator::normal_cone(v), 0.9, 0.9)?;
    Ok(Instance {
        name: "boxes",
        triple: t,
        z: SetDesc::boxed(Vector::from_row_slice(&[1.0, 0.0]), Vector::from_row_slice(&[1.0, 1.0])),
        k: SetDesc::RayProduct {
            rays: vec![crate::solution_sets::Ray::NonPos, crate::solution_sets::Ray::Zero],
        },
    })
}

/// Data of the desk LASSO: `L ∈ ℝ^{5×10}`, `b ∈ ℝ⁵` Gaussian from seed 42,
/// `λ = 0.1‖L*b‖_∞`.
pub fn lasso_desk_data() -> (Matrix, Vector, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let l = linalg::gaussian_matrix(&mut rng, 5, 10);
    let b = linalg::gaussian(&mut rng, 5, 1.0);
    let lambda = 0.1 * (l.transpose() * &b).amax();
    (l, b, lambda)
}

/// Options used to compute reference LASSO limits.
pub fn reference_options() -> IterOptions {
    IterOptions {
        tol: 1e-12,
        max_iter: 2_000_000,
        ..IterOptions::default()
    }
}

fn lasso_with_sets(name: &'static str, l: &Matrix, b: &Vector, lambda: f64) -> Result<(Instance, LassoInstance)> {
    let inst = fenchel::lasso_instance(l, b, lambda)?;
    let trace = splitting::solve(
        &inst.triple,
        &Vector::zeros(l.ncols()),
        &Vector::zeros(l.nrows()),
        &reference_options(),
    )?;
    let (_, k) = trace.split_last();
    let z = fenchel::lasso_solution_set(l, b, lambda, &k)?;
    Ok((
        Instance {
            name,
            triple: inst.triple.clone(),
            z,
            k: SetDesc::point(k),
        },
        inst,
    ))
}

pub fn lasso_desk() -> Result<(Instance, LassoInstance)> {
    let (l, b, lambda) = lasso_desk_data();
    lasso_with_sets("lasso-desk", &l, &b, lambda)
}

/// `min ½(x₁ + x₂ − 2)² + |x₁| + |x₂|`: `Z` is the segment from `(1,0)`
/// to `(0,1)`, `K = {1}`.
pub fn lasso_segment_data() -> (Matrix, Vector, f64) {
    (Matrix::from_row_slice(1, 2, &[1.0, 1.0]), Vector::from_row_slice(&[2.0]), 1.0)
}

pub fn lasso_segment() -> Result<Instance> {
    let (l, b, lambda) = lasso_segment_data();
    let inst = fenchel::lasso_instance(&l, &b, lambda)?;
    let z = SetDesc::polyhedron(
        -Matrix::identity(2, 2),
        Vector::zeros(2),
        Matrix::from_row_slice(1, 2, &[1.0, 1.0]),
        Vector::from_row_slice(&[1.0]),
    );
    Ok(Instance {
        name: "lasso-segment",
        triple: inst.triple,
        z,
        k: SetDesc::point(Vector::from_row_slice(&[1.0])),
    })
}

/// The five paramonotone instances of the rectangle and pairing checks.
pub fn paramonotone_battery() -> Result<Vec<Instance>> {
    Ok(vec![
        feasibility_subspaces()?,
        feasibility_dr()?,
        lasso_desk()?.0,
        lasso_segment()?,
        boxes()?,
    ])
}

/// `A = P_U`, `L = P_U`, `B ≡ u⊥` with `U = span{e₁}`, `u⊥ = e₂`:
/// `Z = U^⊥`, `K = {u⊥}`. `K` meets `ker L*` but misses `0`.
pub fn common_zero_split() -> Result<Instance> {
    let u = Matrix::from_row_slice(3, 1, &[1.0, 0.0, 0.0]);
    let p = &u * u.transpose();
    let uperp = Vector::from_row_slice(&[0.0, 1.0, 0.0]);
    let t = Triple::new(Operator::projection(&u), p, Operator::Constant { u: uperp.clone() }, 1.0, 1.0)?;
    Ok(Instance {
        name: "common-zero-split",
        triple: t,
        z: SetDesc::subspace(&Matrix::from_row_slice(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0])),
        k: SetDesc::point(uperp),
    })
}

/// `A = 0`, `B = Id`: `Z = ker L`, `K = {0}`.
pub fn zero_identity(l: Matrix) -> Result<Instance> {
    let (m, n) = l.shape();
    let kernel = linalg::null_space(&l, linalg::RANK_TOL);
    let t = Triple::with_balanced_steps(Operator::zero(n), l, Operator::identity(m), 0.9)?;
    Ok(Instance {
        name: "zero-identity",
        triple: t,
        z: SetDesc::subspace(&kernel),
        k: SetDesc::origin(m),
    })
}

/// `f = exp(x₁) + exp*(x₂)`, `g = exp(x₁) + exp*(−x₂)`, `L = Id`: the
/// primal value `0` is approached as `x₁ → −∞` but never attained.
pub fn exp_pair() -> (ConvexFn, ConvexFn, Matrix) {
    (ConvexFn::ExpPair { flip: false }, ConvexFn::ExpPair { flip: true }, Matrix::identity(2, 2))
}

/// `x ∈ L⁻¹(V)` for one constraint block `(L, V)`.
pub type ConstraintBlock = (Matrix, SetDesc);

/// Feasibility over `U = {x₃ = 0}` with three constraint blocks
/// `x₁ ∈ [½, 2]`, `(x₂, x₃) ∈ [1,3] × [−1,1]`, `x₁ + x₂ + x₃ ≥ 5/2`.
pub fn three_part_product() -> Result<(Triple, SetDesc, Vec<ConstraintBlock>)> {
    let u = SetDesc::affine(Vector::zeros(3), &Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]));
    let parts = vec![
        (
            Matrix::from_row_slice(1, 3, &[1.0, 0.0, 0.0]),
            SetDesc::boxed(Vector::from_row_slice(&[0.5]), Vector::from_row_slice(&[2.0])),
        ),
        (
            Matrix::from_row_slice(2, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
            SetDesc::boxed(Vector::from_row_slice(&[1.0, -1.0]), Vector::from_row_slice(&[3.0, 1.0])),
        ),
        (
            Matrix::from_row_slice(1, 3, &[1.0, 1.0, 1.0]),
            SetDesc::boxed(Vector::from_row_slice(&[2.5]), Vector::from_row_slice(&[f64::INFINITY])),
        ),
    ];
    let ops = parts.iter().map(|(l, v)| (l.clone(), Operator::normal_cone(v.clone()))).collect();
    let stacked: Vec<&Matrix> = parts.iter().map(|(l, _)| l).collect();
    let norm = linalg::operator_norm(&linalg::vstack(&stacked), 1e-12)?;
    let step = 0.95 / norm;
    let t = product_triple(Operator::normal_cone(u.clone()), ops, step, step)?;
    Ok((t, u, parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution_sets::MEMBERSHIP_TOL;

    fn saddle_samples(inst: &Instance) {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zs = inst.z.sample_points(&mut rng, 10, 2.0);
        let ks = inst.k.sample_points(&mut rng, 10, 2.0);
        for z in &zs {
            for k in &ks {
                let r = inst.triple.saddle_residual(z, k).unwrap();
                assert!(r < 1e-7, "{}: residual {r}", inst.name);
            }
        }
    }

    #[test]
    fn hand_sets_are_saddle_rectangles() {
        for inst in [feasibility_subspaces(), feasibility_dr(), boxes(), lasso_segment(), common_zero_split()] {
            saddle_samples(&inst.unwrap());
        }
        saddle_samples(&zero_identity(Matrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0])).unwrap());
    }

    #[test]
    fn feasibility_instance_is_scaled_isometry() {
        let t = feasibility_subspaces().unwrap().triple;
        let dev = (&t.l * t.lt() * (t.sigma * t.tau) - Matrix::identity(3, 3)).amax();
        assert!(dev < 1e-12);
    }

    #[test]
    fn desk_lasso_sets() {
        let (inst, lasso) = lasso_desk().unwrap();
        let SetDesc::Point { point: k } = &inst.k else { panic!("dual set is a point") };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for z in inst.z.sample_points(&mut rng, 20, 1.0) {
            assert!(inst.triple.saddle_residual(&z, k).unwrap() < 1e-7);
            assert!((&lasso.triple.l * &z - k).norm() < 1e-6);
        }
    }

    #[test]
    fn product_has_feasible_point() {
        let (t, u, parts) = three_part_product().unwrap();
        let x = Vector::from_row_slice(&[1.0, 2.0, 0.0]);
        assert!(u.contains(&x, MEMBERSHIP_TOL));
        for (l, v) in &parts {
            assert!(v.contains(&(l * &x), MEMBERSHIP_TOL));
        }
        assert_eq!(t.m(), 4);
    }
}
