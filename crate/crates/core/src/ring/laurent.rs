use num_bigint::BigInt;

use super::Ring;

/// Laurent polynomial `sum_k coeffs[k] t^{low + k}`, kept normalized so the
/// first and last stored coefficients are nonzero (zero is `low = 0, []`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Laurent<T> {
    pub low: i64,
    pub coeffs: Vec<T>,
}

/// The ring `R[t, t^{-1}]`.
#[derive(Clone, Debug)]
pub struct LaurentRing<R: Ring> {
    base: R,
}

impl<R: Ring> LaurentRing<R> {
    pub fn new(base: R) -> Self {
        LaurentRing { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn normalize(&self, low: i64, mut coeffs: Vec<R::Elem>) -> Laurent<R::Elem> {
        while coeffs.last().is_some_and(|c| self.base.is_zero(c)) {
            coeffs.pop();
        }
        let lead = coeffs.iter().take_while(|c| self.base.is_zero(c)).count();
        if lead == coeffs.len() {
            return Laurent {
                low: 0,
                coeffs: Vec::new(),
            };
        }
        coeffs.drain(..lead);
        Laurent {
            low: low + lead as i64,
            coeffs,
        }
    }

    /// `c t^k`.
    pub fn monomial(&self, c: R::Elem, k: i64) -> Laurent<R::Elem> {
        self.normalize(k, vec![c])
    }

    pub fn coefficient(&self, a: &Laurent<R::Elem>, k: i64) -> R::Elem {
        let idx = k - a.low;
        if idx < 0 || idx as usize >= a.coeffs.len() {
            self.base.zero()
        } else {
            a.coeffs[idx as usize].clone()
        }
    }

    pub fn terms<'a>(&self, a: &'a Laurent<R::Elem>) -> impl Iterator<Item = (i64, &'a R::Elem)> + 'a {
        let low = a.low;
        a.coeffs.iter().enumerate().map(move |(i, c)| (low + i as i64, c))
    }

    fn combine(
        &self,
        a: &Laurent<R::Elem>,
        b: &Laurent<R::Elem>,
        op: impl Fn(&R::Elem, &R::Elem) -> R::Elem,
    ) -> Laurent<R::Elem> {
        if a.coeffs.is_empty() && b.coeffs.is_empty() {
            return self.zero();
        }
        let lo = match (a.coeffs.is_empty(), b.coeffs.is_empty()) {
            (true, _) => b.low,
            (_, true) => a.low,
            _ => a.low.min(b.low),
        };
        let hi_a = a.low + a.coeffs.len() as i64;
        let hi_b = b.low + b.coeffs.len() as i64;
        let hi = hi_a.max(hi_b);
        let coeffs = (lo..hi)
            .map(|k| op(&self.coefficient(a, k), &self.coefficient(b, k)))
            .collect();
        self.normalize(lo, coeffs)
    }
}

impl<R: Ring> Ring for LaurentRing<R> {
    type Elem = Laurent<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Laurent {
            low: 0,
            coeffs: Vec::new(),
        }
    }

    fn one(&self) -> Self::Elem {
        self.monomial(self.base.one(), 0)
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.combine(a, b, |x, y| self.base.add(x, y))
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.combine(a, b, |x, y| self.base.sub(x, y))
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Laurent {
            low: a.low,
            coeffs: a.coeffs.iter().map(|c| self.base.neg(c)).collect(),
        }
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        if a.coeffs.is_empty() || b.coeffs.is_empty() {
            return self.zero();
        }
        let mut out = vec![self.base.zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                let t = self.base.mul(x, y);
                out[i + j] = self.base.add(&out[i + j], &t);
            }
        }
        self.normalize(a.low + b.low, out)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.is_empty()
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        self.monomial(self.base.from_bigint(v), 0)
    }

    fn from_rational(&self, q: &num_rational::BigRational) -> crate::Result<Self::Elem> {
        Ok(self.monomial(self.base.from_rational(q)?, 0))
    }

    /// Only unit monomials are invertible.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.coeffs.len() != 1 {
            return None;
        }
        self.base.inv(&a.coeffs[0]).map(|c| self.monomial(c, -a.low))
    }

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        if a.coeffs.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms(a)
            .filter(|(_, c)| !self.base.is_zero(c))
            .map(|(k, c)| format!("({})t^{}", self.base.fmt_elem(c), k))
            .collect();
        parts.join(" + ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Rationals;
    use num_rational::BigRational;

    #[test]
    fn t_times_t_inverse_is_one() {
        let l = LaurentRing::new(Rationals);
        let t = l.monomial(BigRational::from_integer(1.into()), 1);
        let tinv = l.inv(&t).unwrap();
        assert!(l.is_one(&l.mul(&t, &tinv)));
        let s = l.add(&t, &tinv);
        assert_eq!(s.low, -1);
        assert_eq!(s.coeffs.len(), 3);
        assert!(l.inv(&s).is_none());
    }
}
