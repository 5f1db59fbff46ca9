//! Problem triples `0 ∈ Ax + L*BLx`, duality and saddle residuals.

use serde::{Deserialize, Serialize};

use crate::codec;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{self, Matrix, Vector, DEFAULT_TOL};
use crate::operators::Operator;

/// Relative slack allowed in `σ τ ‖L‖² ≤ 1`.
pub const STEP_SLACK: f64 = 1e-9;

/// The problem `(A, L, B)` with step sizes.
#[derive(Debug, Clone)]
pub struct Triple {
    pub a: Operator,
    pub l: Matrix,
    pub b: Operator,
    pub sigma: f64,
    pub tau: f64,
    lt: Matrix,
    l_norm: f64,
}

/// A candidate saddle point with its fixed-point defect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleCandidate {
    #[serde(with = "codec::vector")]
    pub x: Vector,
    #[serde(with = "codec::vector")]
    pub y: Vector,
    pub residual: f64,
}

impl Triple {
    pub fn new(a: Operator, l: Matrix, b: Operator, sigma: f64, tau: f64) -> Result<Self> {
        let norm = linalg::operator_norm(&l, DEFAULT_TOL)?;
        Self::with_norm(a, l, b, sigma, tau, norm)
    }

    /// Builds a triple with `σ = τ = scale/‖L‖` (or `scale` when `L = 0`).
    pub fn with_balanced_steps(a: Operator, l: Matrix, b: Operator, scale: f64) -> Result<Self> {
        let norm = linalg::operator_norm(&l, DEFAULT_TOL)?;
        let s = if norm > 0.0 { scale / norm } else { scale };
        Self::with_norm(a, l, b, s, s, norm)
    }

    fn with_norm(a: Operator, l: Matrix, b: Operator, sigma: f64, tau: f64, norm: f64) -> Result<Self> {
        let a = a.validated()?;
        let b = b.validated()?;
        check_dim("triple: columns of L vs dim A", a.dim(), l.ncols())?;
        check_dim("triple: rows of L vs dim B", b.dim(), l.nrows())?;
        if !(sigma > 0.0 && tau > 0.0 && sigma.is_finite() && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("step sizes must be positive, got sigma={sigma}, tau={tau}")));
        }
        if sigma * tau * norm * norm > 1.0 + STEP_SLACK {
            return Err(Error::StepSize { sigma, tau, norm });
        }
        let lt = l.transpose();
        Ok(Triple {
            a,
            l,
            b,
            sigma,
            tau,
            lt,
            l_norm: norm,
        })
    }

    /// Primal dimension.
    pub fn n(&self) -> usize {
        self.l.ncols()
    }

    /// Dual dimension.
    pub fn m(&self) -> usize {
        self.l.nrows()
    }

    pub fn l_norm(&self) -> f64 {
        self.l_norm
    }

    /// `L*`.
    pub fn lt(&self) -> &Matrix {
        &self.lt
    }

    /// Copy with new step sizes.
    pub fn with_steps(&self, sigma: f64, tau: f64) -> Result<Triple> {
        Self::with_norm(self.a.clone(), self.l.clone(), self.b.clone(), sigma, tau, self.l_norm)
    }

    /// `(B⁻¹, -L*, A⁻¹)` with the step sizes swapped.
    pub fn dual(&self) -> Triple {
        Triple {
            a: self.b.inverse(),
            l: -&self.lt,
            b: self.a.inverse(),
            sigma: self.tau,
            tau: self.sigma,
            lt: -&self.l,
            l_norm: self.l_norm,
        }
    }

    /// `max(‖x − J_{σA}(x − σL*y)‖, ‖y − J_{τB⁻¹}(y + τLx)‖)`.
    pub fn saddle_residual(&self, x: &Vector, y: &Vector) -> Result<f64> {
        check_dim("saddle_residual x", self.n(), x.len())?;
        check_dim("saddle_residual y", self.m(), y.len())?;
        let px = self.a.resolve(self.sigma, &(x - &self.lt * y * self.sigma))?;
        let binv = self.b.inverse();
        let py = binv.resolve(self.tau, &(y + &self.l * x * self.tau))?;
        Ok((x - px).norm().max((y - py).norm()))
    }

    pub fn candidate(&self, x: Vector, y: Vector) -> Result<SaddleCandidate> {
        let residual = self.saddle_residual(&x, &y)?;
        Ok(SaddleCandidate { x, y, residual })
    }
}

/// The product-space problem `0 ∈ Ax + Σ L_j* B_j L_j x` as a single triple
/// with stacked `L` and block-diagonal `B`.
pub fn product_triple(a: Operator, parts: Vec<(Matrix, Operator)>, sigma: f64, tau: f64) -> Result<Triple> {
    if parts.is_empty() {
        return Err(Error::InvalidParameter("product triple needs at least one part".into()));
    }
    let n = a.dim();
    for (l, b) in &parts {
        check_dim("product part: columns of L_j", n, l.ncols())?;
        check_dim("product part: rows of L_j vs dim B_j", b.dim(), l.nrows())?;
    }
    if parts.len() == 1 {
        let (l, b) = parts.into_iter().next().expect("one part");
        return Triple::new(a, l, b, sigma, tau);
    }
    let blocks: Vec<&Matrix> = parts.iter().map(|(l, _)| l).collect();
    let l = linalg::vstack(&blocks);
    let b = Operator::Product(parts.into_iter().map(|(_, b)| b).collect());
    Triple::new(a, l, b, sigma, tau)
}

/// JSON problem description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(rename = "A")]
    pub a: Operator,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none", with = "opt_matrix")]
    pub l: Option<Matrix>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Operator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<PartSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    #[serde(rename = "L", with = "codec::matrix")]
    pub l: Matrix,
    #[serde(rename = "B")]
    pub b: Operator,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    #[serde(with = "codec::vector")]
    pub x: Vector,
    #[serde(with = "codec::vector")]
    pub y: Vector,
}

mod opt_matrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &Option<Matrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
        m.as_ref().map(codec::rows_of).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Matrix>, D::Error> {
        use serde::de::Error as _;
        let rows = Option::<Vec<Vec<f64>>>::deserialize(d)?;
        rows.map(|r| codec::from_rows(&r).map_err(D::Error::custom)).transpose()
    }
}

impl ProblemSpec {
    /// Builds the triple; missing step sizes default to `σ = τ = 0.95/‖L‖`.
    pub fn to_triple(&self, sigma: Option<f64>, tau: Option<f64>) -> Result<Triple> {
        let (l, b) = match (&self.l, &self.b, &self.parts) {
            (Some(l), Some(b), None) => (l.clone(), b.clone()),
            (None, None, Some(parts)) if !parts.is_empty() => {
                if parts.len() == 1 {
                    (parts[0].l.clone(), parts[0].b.clone())
                } else {
                    let ls: Vec<&Matrix> = parts.iter().map(|p| &p.l).collect();
                    for p in parts {
                        check_dim("product part: columns of L_j", self.a.dim(), p.l.ncols())?;
                    }
                    (linalg::vstack(&ls), Operator::Product(parts.iter().map(|p| p.b.clone()).collect()))
                }
            }
            _ => {
                return Err(Error::InvalidParameter(
                    "spec needs either both \"L\" and \"B\" or a nonempty \"parts\" array".into(),
                ))
            }
        };
        let norm = linalg::operator_norm(&l, DEFAULT_TOL)?;
        let default = if norm > 0.0 { 0.95 / norm } else { 1.0 };
        let sigma = sigma.or(self.sigma).unwrap_or(default);
        let tau = tau.or(self.tau).unwrap_or(default);
        Triple::with_norm(self.a.clone(), l, b, sigma, tau, norm)
    }

    /// Start point, zeros unless given.
    pub fn start(&self, t: &Triple) -> Result<(Vector, Vector)> {
        match &self.start {
            Some(s) => {
                check_dim("start x", t.n(), s.x.len())?;
                check_dim("start y", t.m(), s.y.len())?;
                Ok((s.x.clone(), s.y.clone()))
            }
            None => Ok((Vector::zeros(t.n()), Vector::zeros(t.m()))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solution_sets::SetDesc;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn v(x: &[f64]) -> Vector {
        Vector::from_row_slice(x)
    }

    fn skew() -> Matrix {
        Matrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])
    }

    fn skew_triple() -> Triple {
        Triple::new(Operator::linear(skew()), Matrix::identity(2, 2), Operator::linear(-skew()), 0.5, 0.5).unwrap()
    }

    fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vector {
        Vector::from_fn(n, |_, _| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
    }

    #[test]
    fn zero_triple_residual() {
        let t = Triple::new(Operator::zero(2), Matrix::identity(2, 2), Operator::zero(2), 1.0, 1.0).unwrap();
        assert_eq!(t.saddle_residual(&v(&[0.0, 0.0]), &v(&[0.0, 0.0])).unwrap(), 0.0);
        assert_eq!(t.saddle_residual(&v(&[3.0, 1.0]), &v(&[0.0, 0.0])).unwrap(), 0.0);
        assert!(t.saddle_residual(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap() > 0.1);
    }

    #[test]
    fn skew_saddle_set_is_graph_of_minus_a() {
        let t = skew_triple();
        let x = v(&[1.0, 2.0]);
        let y = -skew() * &x;
        assert!(t.saddle_residual(&x, &y).unwrap() <= 1e-12);
        assert!(t.saddle_residual(&x, &(y + v(&[0.5, 0.0]))).unwrap() > 0.1);
    }

    #[test]
    fn skew_dual_triple() {
        let d = skew_triple().dual();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        // B⁻¹ = A and A⁻¹ = B, L* = -Id
        for _ in 0..20 {
            let x = gaussian(&mut rng, 2);
            let lhs = d.a.resolve(0.5, &x).unwrap();
            let rhs = Operator::linear(skew()).resolve(0.5, &x).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
        assert_eq!(d.l, -Matrix::identity(2, 2));
    }

    #[test]
    fn biduality_residuals() {
        let t = Triple::new(
            Operator::ShiftedL1 { lambda: 0.5, shift: v(&[0.1, 0.2, -0.3]) },
            Matrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, -0.2, 1.0, 0.3]),
            Operator::normal_cone(SetDesc::boxed(v(&[-1.0, 0.0]), v(&[1.0, 2.0]))),
            0.6,
            0.6,
        )
        .unwrap();
        let dd = t.dual().dual();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let x = gaussian(&mut rng, 3);
            let y = gaussian(&mut rng, 2);
            let r1 = t.saddle_residual(&x, &y).unwrap();
            let r2 = dd.saddle_residual(&x, &y).unwrap();
            assert!((r1 - r2).abs() <= 1e-10);
            let r3 = t.dual().saddle_residual(&y, &x).unwrap();
            assert!((r1 - r3).abs() <= 1e-10);
        }
    }

    #[test]
    fn step_size_enforced() {
        let l = Matrix::identity(2, 2) * 2.0;
        assert!(matches!(
            Triple::new(Operator::zero(2), l.clone(), Operator::zero(2), 1.0, 1.0),
            Err(Error::StepSize { .. })
        ));
        let t = Triple::new(Operator::zero(2), l, Operator::zero(2), 0.5, 0.5).unwrap();
        let d = t.dual();
        assert!(d.sigma * d.tau * d.l_norm().powi(2) <= 1.0 + STEP_SLACK);
    }

    #[test]
    fn spec_parsing() {
        let s = r#"{"A":{"kind":"zero","params":{"dim":2}},"L":[[1,0],[0,1]],"B":{"kind":"zero","params":{"dim":2}},"sigma":1,"tau":1}"#;
        let spec: ProblemSpec = serde_json::from_str(s).unwrap();
        let t = spec.to_triple(None, None).unwrap();
        assert_eq!((t.n(), t.m(), t.sigma), (2, 2, 1.0));
        let bad = r#"{"A":{"kind":"zero","params":{"dim":2}},"L":[[1,0],[0,1]],"B":{"kind":"zero","params":{"dim":2}},"sigmaa":1}"#;
        assert!(serde_json::from_str::<ProblemSpec>(bad).is_err());
        let missing: ProblemSpec = serde_json::from_str(r#"{"A":{"kind":"zero","params":{"dim":2}}}"#).unwrap();
        assert!(missing.to_triple(None, None).is_err());
    }

    #[test]
    fn product_of_one_part_is_plain() {
        let l = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let b = Operator::normal_cone(SetDesc::boxed(v(&[0.0, 0.0]), v(&[1.0, 1.0])));
        let p = product_triple(Operator::zero(2), vec![(l.clone(), b.clone())], 0.3, 0.3).unwrap();
        assert_eq!(p.l, l);
        assert_eq!(p.b, b.validated().unwrap());
    }

    #[test]
    fn product_blockwise_resolvent() {
        let b1 = Operator::normal_cone(SetDesc::boxed(v(&[0.0]), v(&[1.0])));
        let b2 = Operator::ShiftedL1 { lambda: 1.0, shift: v(&[0.0, 0.5]) };
        let l1 = Matrix::from_row_slice(1, 2, &[1.0, 1.0]);
        let l2 = Matrix::identity(2, 2);
        let p = product_triple(Operator::zero(2), vec![(l1, b1.clone()), (l2, b2.clone())], 0.5, 0.5).unwrap();
        let y = v(&[2.0, -1.0, 3.0]);
        let whole = p.b.inverse().resolve(0.5, &y).unwrap();
        let first = b1.inverse().resolve(0.5, &v(&[2.0])).unwrap();
        let second = b2.inverse().resolve(0.5, &v(&[-1.0, 3.0])).unwrap();
        assert_eq!(whole, linalg::concat(&[&first, &second]));
    }
}
