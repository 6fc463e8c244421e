use num_bigint::BigInt;

use crate::ring::Ring;

/// Dense polynomial, coefficients low first, with no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly<T>(pub Vec<T>);

/// The polynomial ring `R[t]`.
#[derive(Clone, Debug)]
pub struct PolyRing<R: Ring> {
    base: R,
}

impl<R: Ring> PolyRing<R> {
    pub fn new(base: R) -> Self {
        PolyRing { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn from_coeffs(&self, mut c: Vec<R::Elem>) -> Poly<R::Elem> {
        while c.last().is_some_and(|x| self.base.is_zero(x)) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(&self, c: R::Elem) -> Poly<R::Elem> {
        self.from_coeffs(vec![c])
    }

    /// `c t^k`.
    pub fn monomial(&self, c: R::Elem, k: usize) -> Poly<R::Elem> {
        let mut v = vec![self.base.zero(); k + 1];
        v[k] = c;
        self.from_coeffs(v)
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self, a: &Poly<R::Elem>) -> Option<usize> {
        a.0.len().checked_sub(1)
    }

    pub fn coefficient(&self, a: &Poly<R::Elem>, k: usize) -> R::Elem {
        a.0.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn eval(&self, a: &Poly<R::Elem>, x: &R::Elem) -> R::Elem {
        let b = &self.base;
        a.0.iter().rev().fold(b.zero(), |acc, c| b.add(&b.mul(&acc, x), c))
    }

    pub fn derivative(&self, a: &Poly<R::Elem>) -> Poly<R::Elem> {
        let c =
            a.0.iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| self.base.scale_i64(c, k as i64))
                .collect();
        self.from_coeffs(c)
    }

    /// `a(t^k)`.
    pub fn dilate(&self, a: &Poly<R::Elem>, k: usize) -> Poly<R::Elem> {
        if a.0.is_empty() {
            return a.clone();
        }
        let mut c = vec![self.base.zero(); (a.0.len() - 1) * k + 1];
        for (i, x) in a.0.iter().enumerate() {
            c[i * k] = x.clone();
        }
        Poly(c)
    }

    /// `a mod t^d`.
    pub fn truncate(&self, a: &Poly<R::Elem>, d: usize) -> Poly<R::Elem> {
        self.from_coeffs(a.0.iter().take(d).cloned().collect())
    }

    /// Product truncated below degree `d`.
    pub fn mul_trunc(&self, a: &Poly<R::Elem>, b: &Poly<R::Elem>, d: usize) -> Poly<R::Elem> {
        if a.0.is_empty() || b.0.is_empty() {
            return Poly(Vec::new());
        }
        let len = (a.0.len() + b.0.len() - 1).min(d);
        let base = &self.base;
        let mut out = vec![base.zero(); len];
        for (i, x) in a.0.iter().enumerate().take(len) {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate().take(len - i) {
                out[i + j] = base.add(&out[i + j], &base.mul(x, y));
            }
        }
        self.from_coeffs(out)
    }

    pub fn map<S: Ring>(
        &self,
        a: &Poly<R::Elem>,
        target: &PolyRing<S>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> Poly<S::Elem> {
        target.from_coeffs(a.0.iter().map(f).collect())
    }

    pub fn scale(&self, a: &Poly<R::Elem>, c: &R::Elem) -> Poly<R::Elem> {
        self.from_coeffs(a.0.iter().map(|x| self.base.mul(x, c)).collect())
    }
}

impl<R: Ring> Ring for PolyRing<R> {
    type Elem = Poly<R::Elem>;

    fn zero(&self) -> Self::Elem {
        Poly(Vec::new())
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.0.len().max(b.0.len());
        let c = (0..n)
            .map(|k| self.base.add(&self.coefficient(a, k), &self.coefficient(b, k)))
            .collect();
        self.from_coeffs(c)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.0.len().max(b.0.len());
        let c = (0..n)
            .map(|k| self.base.sub(&self.coefficient(a, k), &self.coefficient(b, k)))
            .collect();
        self.from_coeffs(c)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        Poly(a.0.iter().map(|x| self.base.neg(x)).collect())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul_trunc(a, b, usize::MAX)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.is_empty()
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        self.constant(self.base.from_bigint(v))
    }

    fn from_rational(&self, q: &num_rational::BigRational) -> crate::Result<Self::Elem> {
        Ok(self.constant(self.base.from_rational(q)?))
    }

    /// Only constant units are invertible.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if a.0.len() != 1 {
            return None;
        }
        self.base.inv(&a.0[0]).map(|c| self.constant(c))
    }

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        let parts: Vec<String> = a.0.iter().map(|c| self.base.fmt_elem(c)).collect();
        format!("[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;

    #[test]
    fn product_and_derivative() {
        let z = PolyRing::new(Integers);
        let f = z.from_coeffs(vec![1.into(), 1.into()]);
        let g = z.pow(&f, 3);
        let c: Vec<i64> = g.0.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 3, 3, 1]);
        let dg = z.derivative(&g);
        assert_eq!(dg, z.scale_i64(&z.pow(&f, 2), 3));
        assert_eq!(z.eval(&g, &2.into()), 27.into());
        assert_eq!(z.degree(&z.dilate(&g, 5)), Some(15));
    }
}
