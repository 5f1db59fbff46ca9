//! Closed proper convex functions with exact proximal maps.

use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::Vector;
use crate::operators::soft_threshold;
use crate::solution_sets::{exposed_face, normal_cone, support_value, Ray, SetDesc, MEMBERSHIP_TOL};

/// Convex functions with closed-form values, conjugates and proxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConvexFn {
    /// `lambda ‖x‖₁ - <x, c>`.
    ScaledL1WithLinear {
        lambda: f64,
        #[serde(with = "codec::vector")]
        c: Vector,
    },
    /// `½‖y‖² + ½‖b‖²`.
    QuadPlusConst {
        #[serde(with = "codec::vector")]
        b: Vector,
    },
    Indicator {
        set: SetDesc,
    },
    /// Support function of the box `[lo, hi]`.
    SupportOfBox {
        #[serde(with = "codec::lower")]
        lo: Vector,
        #[serde(with = "codec::upper")]
        hi: Vector,
    },
    /// `exp(x₁) + exp*(s x₂)` with `s = -1` when `flip`.
    ExpPair {
        flip: bool,
    },
}

/// `exp*(t) = t ln t - t`, with `exp*(0) = 0` and `+inf` for `t < 0`.
pub fn exp_conj(t: f64) -> f64 {
    if t > 0.0 {
        t * t.ln() - t
    } else if t == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `argmin_p exp(p) + (p - x)²/(2γ)`.
pub fn prox_exp(gamma: f64, x: f64) -> f64 {
    // root of gamma e^p + p - x, convex increasing; Newton from the right
    let mut p = if x > gamma { x.min((x / gamma).ln()) } else { x };
    for _ in 0..200 {
        let e = gamma * p.exp();
        let step = (e + p - x) / (e + 1.0);
        p -= step;
        if step.abs() <= 1e-15 * (1.0 + p.abs()) {
            break;
        }
    }
    p
}

/// `argmin_p exp*(p) + (p - x)²/(2γ)`, always positive.
pub fn prox_exp_conj(gamma: f64, x: f64) -> f64 {
    // p = e^t with e^t + gamma t = x
    let mut t = if x > 0.0 {
        (x / gamma).min(x.ln().max(0.0))
    } else {
        x / gamma
    };
    for _ in 0..200 {
        let e = t.exp();
        let step = (e + gamma * t - x) / (e + gamma);
        t -= step;
        if step.abs() <= 1e-15 * (1.0 + t.abs()) {
            break;
        }
    }
    t.exp()
}

impl ConvexFn {
    pub fn dim(&self) -> usize {
        match self {
            ConvexFn::ScaledL1WithLinear { c, .. } => c.len(),
            ConvexFn::QuadPlusConst { b } => b.len(),
            ConvexFn::Indicator { set } => set.dim(),
            ConvexFn::SupportOfBox { lo, .. } => lo.len(),
            ConvexFn::ExpPair { .. } => 2,
        }
    }

    pub fn validated(&self) -> Result<ConvexFn> {
        match self {
            ConvexFn::ScaledL1WithLinear { lambda, .. } if !(*lambda > 0.0) => {
                Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")))
            }
            ConvexFn::SupportOfBox { lo, hi } if lo.len() != hi.len() || lo.iter().zip(hi.iter()).any(|(l, h)| l > h) => {
                Err(Error::InvalidParameter("support box needs lo <= hi".into()))
            }
            ConvexFn::Indicator { set } if set.is_empty() => Err(Error::InvalidParameter("indicator of an empty set".into())),
            other => Ok(other.clone()),
        }
    }

    fn sign(&self) -> f64 {
        match self {
            ConvexFn::ExpPair { flip: true } => -1.0,
            _ => 1.0,
        }
    }

    /// Function value, `+inf` outside the domain.
    pub fn value(&self, x: &Vector) -> f64 {
        match self {
            ConvexFn::ScaledL1WithLinear { lambda, c } => lambda * x.lp_norm(1) - x.dot(c),
            ConvexFn::QuadPlusConst { b } => 0.5 * x.norm_squared() + 0.5 * b.norm_squared(),
            ConvexFn::Indicator { set } => indicator(set.contains(x, MEMBERSHIP_TOL)),
            ConvexFn::SupportOfBox { lo, hi } => {
                support_value(&SetDesc::Box { lo: lo.clone(), hi: hi.clone() }, x, 0.0).expect("box")
            }
            ConvexFn::ExpPair { .. } => x[0].exp() + exp_conj(self.sign() * x[1]),
        }
    }

    /// Fenchel conjugate value; `None` when not available in closed form.
    pub fn conj_value(&self, u: &Vector) -> Option<f64> {
        match self {
            ConvexFn::ScaledL1WithLinear { lambda, c } => {
                Some(indicator((u + c).amax() <= lambda + MEMBERSHIP_TOL))
            }
            ConvexFn::QuadPlusConst { b } => Some(0.5 * u.norm_squared() - 0.5 * b.norm_squared()),
            ConvexFn::Indicator { set } => support_value(set, u, MEMBERSHIP_TOL),
            ConvexFn::SupportOfBox { lo, hi } => Some(indicator(
                SetDesc::Box { lo: lo.clone(), hi: hi.clone() }.contains(u, MEMBERSHIP_TOL),
            )),
            ConvexFn::ExpPair { .. } => Some(exp_conj(u[0]) + (self.sign() * u[1]).exp()),
        }
    }

    /// `prox_{γf}(x)`.
    pub fn prox(&self, gamma: f64, x: &Vector) -> Result<Vector> {
        check_dim("prox", self.dim(), x.len())?;
        Ok(match self {
            ConvexFn::ScaledL1WithLinear { lambda, c } => soft_threshold(&(x + c * gamma), gamma * lambda),
            ConvexFn::QuadPlusConst { .. } => x / (1.0 + gamma),
            ConvexFn::Indicator { set } => set.project(x, 1e-13)?,
            ConvexFn::SupportOfBox { lo, hi } => {
                let scaled = x / gamma;
                let p = Vector::from_fn(x.len(), |i, _| scaled[i].max(lo[i]).min(hi[i]));
                x - p * gamma
            }
            ConvexFn::ExpPair { .. } => {
                let s = self.sign();
                Vector::from_vec(vec![prox_exp(gamma, x[0]), s * prox_exp_conj(gamma, s * x[1])])
            }
        })
    }

    /// Closed domain of the function.
    pub fn domain(&self) -> SetDesc {
        let n = self.dim();
        match self {
            ConvexFn::Indicator { set } => set.clone(),
            ConvexFn::ExpPair { flip } => SetDesc::RayProduct {
                rays: vec![Ray::Free, if *flip { Ray::NonPos } else { Ray::NonNeg }],
            },
            _ => SetDesc::Whole { dim: n },
        }
    }

    /// Closed domain of the conjugate.
    pub fn conj_domain(&self) -> SetDesc {
        let n = self.dim();
        match self {
            ConvexFn::ScaledL1WithLinear { lambda, c } => SetDesc::Box {
                lo: c.map(|ci| -lambda - ci),
                hi: c.map(|ci| lambda - ci),
            },
            ConvexFn::SupportOfBox { lo, hi } => SetDesc::Box { lo: lo.clone(), hi: hi.clone() },
            ConvexFn::ExpPair { .. } => SetDesc::RayProduct {
                rays: vec![Ray::NonNeg, Ray::Free],
            },
            ConvexFn::Indicator { set } => match set {
                SetDesc::Whole { .. } => SetDesc::origin(n),
                SetDesc::Affine { basis, .. } => SetDesc::subspace(&crate::linalg::complement(basis, n)),
                SetDesc::RayProduct { .. } => set.polar_cone(0.0).expect("cone"),
                _ => SetDesc::Whole { dim: n },
            },
            ConvexFn::QuadPlusConst { .. } => SetDesc::Whole { dim: n },
        }
    }

    /// `∂f(x)`.
    pub fn subdiff_value(&self, x: &Vector, tol: f64) -> Result<SetDesc> {
        check_dim("subdiff_value", self.dim(), x.len())?;
        let n = x.len();
        Ok(match self {
            ConvexFn::ScaledL1WithLinear { lambda, c } => crate::operators::Operator::ShiftedL1 {
                lambda: *lambda,
                shift: c.clone(),
            }
            .value_at_tol(x, tol)?,
            ConvexFn::QuadPlusConst { .. } => SetDesc::point(x.clone()),
            ConvexFn::Indicator { set } => normal_cone(set, x, tol)?,
            ConvexFn::SupportOfBox { lo, hi } => exposed_face(&SetDesc::Box { lo: lo.clone(), hi: hi.clone() }, x, tol)?,
            ConvexFn::ExpPair { .. } => {
                let s = self.sign();
                let t = s * x[1];
                if t > 0.0 {
                    SetDesc::point(Vector::from_vec(vec![x[0].exp(), s * t.ln()]))
                } else {
                    SetDesc::Empty { dim: n }
                }
            }
        })
    }

    /// `∂f*(u) = (∂f)⁻¹(u)`.
    pub fn conj_subdiff_value(&self, u: &Vector, tol: f64) -> Result<SetDesc> {
        check_dim("conj_subdiff_value", self.dim(), u.len())?;
        let n = u.len();
        Ok(match self {
            ConvexFn::ScaledL1WithLinear { .. } | ConvexFn::SupportOfBox { .. } => {
                normal_cone(&self.conj_domain(), u, tol)?
            }
            ConvexFn::QuadPlusConst { .. } => SetDesc::point(u.clone()),
            ConvexFn::Indicator { set } => exposed_face(set, u, tol)?,
            ConvexFn::ExpPair { .. } => {
                let s = self.sign();
                if u[0] > 0.0 {
                    SetDesc::point(Vector::from_vec(vec![u[0].ln(), s * (s * u[1]).exp()]))
                } else {
                    SetDesc::Empty { dim: n }
                }
            }
        })
    }

    pub fn subdiff_single_valued(&self) -> bool {
        matches!(self, ConvexFn::QuadPlusConst { .. } | ConvexFn::ExpPair { .. })
            || matches!(self, ConvexFn::Indicator { set: SetDesc::Whole { .. } })
    }

    pub fn conj_subdiff_single_valued(&self) -> bool {
        matches!(self, ConvexFn::QuadPlusConst { .. } | ConvexFn::ExpPair { .. })
            || matches!(self, ConvexFn::Indicator { set: SetDesc::Point { .. } })
    }
}

fn indicator(inside: bool) -> f64 {
    if inside {
        0.0
    } else {
        f64::INFINITY
    }
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

    fn catalogue() -> Vec<ConvexFn> {
        vec![
            ConvexFn::ScaledL1WithLinear { lambda: 0.7, c: v(&[0.3, -1.2]) },
            ConvexFn::QuadPlusConst { b: v(&[1.0, 2.0]) },
            ConvexFn::Indicator { set: SetDesc::subspace(&crate::linalg::Matrix::from_row_slice(2, 1, &[1.0, 1.0])) },
            ConvexFn::Indicator { set: SetDesc::boxed(v(&[-1.0, 0.0]), v(&[1.0, 2.0])) },
            ConvexFn::SupportOfBox { lo: v(&[-1.0, 0.0]), hi: v(&[2.0, 0.5]) },
            ConvexFn::ExpPair { flip: false },
            ConvexFn::ExpPair { flip: true },
        ]
    }

    // scalar prox oracle: golden-section search of the prox objective
    fn golden_argmin(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) < f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn exp_proxes_match_golden_section() {
        for &(g, x) in &[(1.0, 0.0), (0.5, 3.0), (2.0, -4.0), (0.1, 10.0), (1.0, 1.0)] {
            let p = prox_exp(g, x);
            let o = golden_argmin(|t| t.exp() + (t - x).powi(2) / (2.0 * g), x - 50.0, x + 1.0);
            assert!((p - o).abs() < 1e-7, "exp g={g} x={x}: {p} vs {o}");
            let q = prox_exp_conj(g, x);
            let o = golden_argmin(|t| exp_conj(t) + (t - x).powi(2) / (2.0 * g), 0.0, x.abs() + 10.0);
            assert!((q - o).abs() < 1e-7, "exp* g={g} x={x}: {q} vs {o}");
        }
    }

    #[test]
    fn exp_conj_branches() {
        assert_eq!(exp_conj(0.0), 0.0);
        assert_eq!(exp_conj(-1e-300), f64::INFINITY);
        assert!((exp_conj(1.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn l1_prox_is_shifted_soft_threshold() {
        let f = ConvexFn::ScaledL1WithLinear { lambda: 1.0, c: v(&[0.5, 0.0]) };
        assert_eq!(f.prox(1.0, &v(&[1.0, -0.5])).unwrap(), v(&[0.5, 0.0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn fenchel_young(seed in 0u64..10_000, idx in 0usize..7) {
            let f = &catalogue()[idx];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Vector::from_fn(2, |_, _| 2.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng));
            let u = Vector::from_fn(2, |_, _| 2.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng));
            let fx = f.value(&x);
            let fu = f.conj_value(&u).unwrap();
            prop_assert!(fx + fu >= x.dot(&u) - 1e-9);
        }

        #[test]
        fn moreau_decomposition(seed in 0u64..10_000, idx in 0usize..7, gamma in 0.2f64..3.0) {
            // prox_{γf}(x) + γ prox_{f*/γ}(x/γ) = x; the conjugate prox comes from
            // the subdifferential identity u ∈ ∂f(p) with u = (x - p)/γ
            let f = &catalogue()[idx];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = Vector::from_fn(2, |_, _| 2.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng));
            let p = f.prox(gamma, &x).unwrap();
            let u = (&x - &p) / gamma;
            prop_assert!(f.subdiff_value(&p, 1e-7).unwrap().contains(&u, 1e-7));
            prop_assert!(f.conj_subdiff_value(&u, 1e-7).unwrap().contains(&p, 1e-7));
            let fy = f.value(&p) + f.conj_value(&u).unwrap();
            prop_assert!((fy - p.dot(&u)).abs() <= 1e-7 * (1.0 + p.dot(&u).abs()));
        }
    }
}
