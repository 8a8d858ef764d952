use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Which side of the real axis a spectral parameter approaches from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

/// z = λ ± iε with ε ≥ 0; ε = 0 denotes the boundary value λ ± i0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexEnergy {
    pub lambda: f64,
    pub eps: f64,
    pub side: Side,
}

impl ComplexEnergy {
    pub fn new(lambda: f64, eps: f64, side: Side) -> Result<Self> {
        if !(eps >= 0.0) || !lambda.is_finite() {
            return Err(invalid(format!("complex energy needs finite lambda and eps >= 0 (got {lambda}, {eps})")));
        }
        Ok(Self { lambda, eps, side })
    }

    pub fn real(lambda: f64) -> Self {
        Self { lambda, eps: 0.0, side: Side::Plus }
    }

    pub fn z(&self) -> Complex64 {
        match self.side {
            Side::Plus => Complex64::new(self.lambda, self.eps),
            Side::Minus => Complex64::new(self.lambda, -self.eps),
        }
    }

    /// √z on the branch Im √z > 0, taking the limit from the chosen side when ε = 0.
    pub fn sqrt(&self) -> Complex64 {
        if self.eps == 0.0 {
            if self.lambda > 0.0 {
                let k = self.lambda.sqrt();
                return match self.side {
                    Side::Plus => Complex64::new(k, 0.0),
                    Side::Minus => Complex64::new(-k, 0.0),
                };
            }
            return Complex64::new(0.0, (-self.lambda).sqrt());
        }
        let s = self.z().sqrt();
        if s.im < 0.0 {
            -s
        } else {
            s
        }
    }

    pub fn conj(&self) -> Self {
        let side = match self.side {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        };
        Self { side, ..*self }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_has_positive_imaginary_part() {
        for &(l, e) in &[(1.0, 0.1), (-2.0, 0.3), (4.0, 1e-8), (0.5, 5.0)] {
            for side in [Side::Plus, Side::Minus] {
                let z = ComplexEnergy::new(l, e, side).unwrap();
                let s = z.sqrt();
                assert!(s.im > 0.0);
                assert!((s * s - z.z()).norm() < 1e-12 * z.z().norm().max(1.0));
            }
        }
    }

    #[test]
    fn boundary_values() {
        assert_eq!(ComplexEnergy::real(4.0).sqrt(), Complex64::new(2.0, 0.0));
        let m = ComplexEnergy::new(4.0, 0.0, Side::Minus).unwrap();
        assert_eq!(m.sqrt(), Complex64::new(-2.0, 0.0));
        assert_eq!(ComplexEnergy::real(-1.0).sqrt(), Complex64::new(0.0, 1.0));
        assert!(ComplexEnergy::new(1.0, -0.1, Side::Plus).is_err());
    }
}
