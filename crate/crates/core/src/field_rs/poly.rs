use std::ops::{Add, Mul, Sub};

use super::{FieldError, Fp};

/// Dense univariate polynomial, coefficients lowest degree first.
///
/// Trailing zero coefficients are always trimmed, so the zero polynomial
/// has an empty coefficient list and no degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly<const P: u64> {
    coeffs: Vec<Fp<P>>,
}

impl<const P: u64> Poly<P> {
    pub fn new(mut coeffs: Vec<Fp<P>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_u64s(coeffs: &[u64]) -> Self {
        Self::new(coeffs.iter().copied().map(Fp::new).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// `z^exp`.
    pub fn monomial(exp: usize) -> Self {
        let mut coeffs = vec![Fp::ZERO; exp + 1];
        coeffs[exp] = Fp::ONE;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fp<P>] {
        &self.coeffs
    }

    /// Coefficient of `z^i`, zero past the end.
    pub fn coeff(&self, i: usize) -> Fp<P> {
        self.coeffs.get(i).copied().unwrap_or(Fp::ZERO)
    }

    /// `None` for the zero polynomial (the usual "degree −1").
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Fp<P>) -> Fp<P> {
        self.coeffs.iter().rev().fold(Fp::ZERO, |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: Fp<P>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Euclidean division, returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), FieldError> {
        let d_deg = divisor.degree().ok_or(FieldError::DivisionByZeroPoly)?;
        let lead_inv = divisor.coeffs[d_deg].inv()?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= d_deg {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Fp::ZERO; rem.len() - d_deg];
        for i in (0..quot.len()).rev() {
            let q = rem[i + d_deg] * lead_inv;
            quot[i] = q;
            if q.is_zero() {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= q * dc;
            }
        }
        rem.truncate(d_deg);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Lagrange interpolation through `points`, giving the unique
    /// polynomial of degree below `points.len()`.
    pub fn interpolate(points: &[(Fp<P>, Fp<P>)]) -> Result<Self, FieldError> {
        for (i, (zi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(zj, _)| zj == zi) {
                return Err(FieldError::DuplicatePoint(zi.value()));
            }
        }
        let k = points.len();
        // master = prod_j (z - z_j), lowest degree first
        let mut master = vec![Fp::ZERO; k + 1];
        master[0] = Fp::ONE;
        for (deg, &(zj, _)) in points.iter().enumerate() {
            for c in (0..=deg).rev() {
                let b = master[c];
                master[c + 1] += b;
                master[c] = -(b * zj);
            }
        }
        let mut acc = vec![Fp::ZERO; k];
        let mut basis = vec![Fp::ZERO; k];
        for (i, &(zi, yi)) in points.iter().enumerate() {
            // master / (z - z_i) by synthetic division
            let mut carry = Fp::ZERO;
            for c in (0..k).rev() {
                carry = master[c + 1] + carry * zi;
                basis[c] = carry;
            }
            let denom: Fp<P> = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &(zj, _))| zi - zj).product();
            let w = yi * denom.inv()?;
            for (a, &b) in acc.iter_mut().zip(&basis) {
                *a += w * b;
            }
        }
        Ok(Self::new(acc))
    }
}

impl<const P: u64> Add for &Poly<P> {
    type Output = Poly<P>;
    fn add(self, rhs: Self) -> Poly<P> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<const P: u64> Sub for &Poly<P> {
    type Output = Poly<P>;
    fn sub(self, rhs: Self) -> Poly<P> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<const P: u64> Mul for &Poly<P> {
    type Output = Poly<P>;
    fn mul(self, rhs: Self) -> Poly<P> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Fp::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type F7 = Fp<7>;
    type P7 = Poly<7>;

    fn pts(raw: &[(u64, u64)]) -> Vec<(F7, F7)> {
        raw.iter().map(|&(z, y)| (F7::new(z), F7::new(y))).collect()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(P7::from_u64s(&[2]).eval(F7::new(5)), F7::new(2));
        assert_eq!(P7::from_u64s(&[1, 1]).eval(F7::new(3)), F7::new(4));
        // 3^2 = 9 = 2 mod 7
        assert_eq!(P7::from_u64s(&[0, 0, 1]).eval(F7::new(3)), F7::new(2));
    }

    #[test]
    fn degree_convention() {
        assert_eq!(P7::zero().degree(), None);
        assert_eq!(P7::from_u64s(&[0, 0, 0]).degree(), None);
        assert_eq!(P7::from_u64s(&[1, 0, 3, 0]).degree(), Some(2));
    }

    #[test]
    fn interpolate_examples() {
        assert_eq!(P7::interpolate(&pts(&[(1, 2), (2, 2)])).unwrap(), P7::from_u64s(&[2]));
        assert_eq!(P7::interpolate(&pts(&[(0, 0), (1, 1)])).unwrap(), P7::from_u64s(&[0, 1]));
        // z^2 sampled at 1, 2, 3 gives 1, 4, 2 (mod 7)
        let sq = P7::monomial(2);
        let samples: Vec<_> = (1..=3).map(|z| (F7::new(z), sq.eval(F7::new(z)))).collect();
        assert_eq!(samples, pts(&[(1, 1), (2, 4), (3, 2)]));
        assert_eq!(P7::interpolate(&samples).unwrap(), sq);
    }

    #[test]
    fn interpolate_rejects_duplicates() {
        assert_eq!(
            P7::interpolate(&pts(&[(1, 2), (1, 3)])),
            Err(FieldError::DuplicatePoint(1))
        );
    }

    #[test]
    fn division_by_zero_poly() {
        assert_eq!(P7::monomial(2).div_rem(&P7::zero()), Err(FieldError::DivisionByZeroPoly));
    }

    fn arb_poly(max_len: usize) -> impl Strategy<Value = Poly<65537>> {
        prop::collection::vec(0u64..65537, 0..max_len).prop_map(|c| Poly::from_u64s(&c))
    }

    proptest! {
        #[test]
        fn interpolate_inverts_eval(f in arb_poly(10), extra in 0usize..4) {
            let npts = f.coeffs().len() + extra;
            let samples: Vec<_> = (1..=npts as u64)
                .map(|z| (Fp::new(z), f.eval(Fp::new(z))))
                .collect();
            prop_assert_eq!(Poly::interpolate(&samples).unwrap(), f);
        }

        #[test]
        fn div_rem_reconstructs(a in arb_poly(12), b in arb_poly(6)) {
            prop_assume!(!b.is_zero());
            let (q, r) = a.div_rem(&b).unwrap();
            prop_assert!(r.degree() < b.degree());
            prop_assert_eq!(&(&q * &b) + &r, a);
        }

        #[test]
        fn eval_is_ring_homomorphism(a in arb_poly(8), b in arb_poly(8), z in 0u64..65537) {
            let z = Fp::new(z);
            prop_assert_eq!((&a * &b).eval(z), a.eval(z) * b.eval(z));
            prop_assert_eq!((&a + &b).eval(z), a.eval(z) + b.eval(z));
        }
    }
}
