//! Vector norms on R^n and the matrix norms they induce.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Steps of power iteration used for the spectral norm.
pub const POWER_ITERATIONS: usize = 50;

const POWER_SEED: u64 = 0x05ee_d0f5_107e;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    /// `max_i |x_i|`; induces the maximum absolute row sum.
    #[default]
    Max,
    /// `sum_i |x_i|`; induces the maximum absolute column sum.
    One,
    /// Euclidean; induces the spectral norm.
    Two,
}

impl Norm {
    pub fn vector(self, x: &DVector<f64>) -> f64 {
        match self {
            Norm::Max => x.iter().fold(0.0, |m, v| m.max(v.abs())),
            Norm::One => x.iter().map(|v| v.abs()).sum(),
            Norm::Two => x.norm(),
        }
    }

    pub fn distance(self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        self.vector(&(x - y))
    }

    /// Operator norm of `m` induced by this vector norm. Exact for `Max` and
    /// `One`; for `Two`, a power-iteration estimate from below.
    pub fn matrix(self, m: &DMatrix<f64>) -> f64 {
        match self {
            Norm::Max => m
                .row_iter()
                .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Norm::One => m
                .column_iter()
                .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
                .fold(0.0, f64::max),
            Norm::Two => spectral_norm(m),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::Max => "max",
            Norm::One => "one",
            Norm::Two => "two",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Norm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "inf" | "infinity" => Ok(Norm::Max),
            "one" | "1" | "l1" => Ok(Norm::One),
            "two" | "2" | "l2" | "euclidean" => Ok(Norm::Two),
            other => Err(Error::InvalidInput(format!("unknown norm `{other}`"))),
        }
    }
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.ncols() == 0 || m.iter().all(|v| *v == 0.0) {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut x = DVector::from_fn(m.ncols(), |_, _| rng.random_range(0.5..1.5));
    x /= x.norm();
    let gram = m.transpose() * m;
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let y = &gram * &x;
        let len = y.norm();
        if len == 0.0 {
            break;
        }
        estimate = x.dot(&y);
        x = y / len;
    }
    // one last Rayleigh quotient on the converged direction
    estimate = f64::max(estimate, x.dot(&(&gram * &x)));
    estimate.max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn vector_norms() {
        let x = DVector::from_vec(vec![3.0, -4.0]);
        assert_eq!(Norm::Max.vector(&x), 4.0);
        assert_eq!(Norm::One.vector(&x), 7.0);
        assert_eq!(Norm::Two.vector(&x), 5.0);
    }

    #[test]
    fn induced_norms() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 3.0, 4.0]);
        assert_eq!(Norm::Max.matrix(&m), 7.0);
        assert_eq!(Norm::One.matrix(&m), 6.0);
        // singular values of [[1,-2],[3,4]]: sqrt(15 +- sqrt(125))
        assert_abs_diff_eq!(Norm::Two.matrix(&m), (15.0 + 125f64.sqrt()).sqrt(), epsilon = 1e-12);
        assert_eq!(Norm::Two.matrix(&DMatrix::zeros(3, 3)), 0.0);
    }

    #[test]
    fn induced_norm_bounds_matrix_vector_products() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.5, 0.0, 3.0, 1.0, -2.0, 0.25, 1.0]);
        let x = DVector::from_vec(vec![0.3, -1.2, 0.7]);
        for norm in [Norm::Max, Norm::One, Norm::Two] {
            assert!(norm.vector(&(&m * &x)) <= norm.matrix(&m) * norm.vector(&x) + 1e-12);
        }
    }

    #[test]
    fn parse_names() {
        assert_eq!("max".parse::<Norm>().unwrap(), Norm::Max);
        assert_eq!("1".parse::<Norm>().unwrap(), Norm::One);
        assert_eq!("Two".parse::<Norm>().unwrap(), Norm::Two);
        assert!("frobenius".parse::<Norm>().is_err());
    }
}
