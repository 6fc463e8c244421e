use std::sync::Arc;

use num_bigint::BigInt;

use super::Ring;

/// Element of `R[x]/(m(x))`, stored as the `deg m` coefficients in the
/// power basis `1, x, ..., x^{r-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtElem<T>(pub Vec<T>);

/// Simple extension `R[x]/(m(x))` of a base ring by a monic polynomial.
#[derive(Clone, Debug)]
pub struct ExtRing<R: Ring> {
    base: R,
    /// Lower coefficients `m_0, ..., m_{r-1}` of the monic modulus.
    modulus: Arc<Vec<R::Elem>>,
}

impl<R: Ring> ExtRing<R> {
    /// `modulus` lists `m_0, ..., m_{r-1}`; the leading coefficient 1 is implicit.
    pub fn new(base: R, modulus: Vec<R::Elem>) -> Self {
        assert!(!modulus.is_empty(), "extension degree must be at least 1");
        ExtRing {
            base,
            modulus: Arc::new(modulus),
        }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len()
    }

    pub fn modulus(&self) -> &[R::Elem] {
        &self.modulus
    }

    /// The class of `x`.
    pub fn generator(&self) -> ExtElem<R::Elem> {
        let mut c = vec![self.base.zero(); self.degree()];
        if self.degree() == 1 {
            c[0] = self.base.neg(&self.modulus[0]);
        } else {
            c[1] = self.base.one();
        }
        ExtElem(c)
    }

    pub fn embed(&self, a: R::Elem) -> ExtElem<R::Elem> {
        let mut c = vec![self.base.zero(); self.degree()];
        c[0] = a;
        ExtElem(c)
    }

    /// Reduce an arbitrary-length coefficient vector modulo `m(x)`.
    pub fn reduce(&self, mut c: Vec<R::Elem>) -> ExtElem<R::Elem> {
        let r = self.degree();
        let b = &self.base;
        while c.len() > r {
            let top = c.pop().expect("non-empty");
            if b.is_zero(&top) {
                continue;
            }
            let shift = c.len() - r;
            for (i, mi) in self.modulus.iter().enumerate() {
                let t = b.mul(&top, mi);
                c[shift + i] = b.sub(&c[shift + i], &t);
            }
        }
        c.resize(r, b.zero());
        ExtElem(c)
    }

    /// `true` when the element lies in the base ring.
    pub fn is_constant(&self, a: &ExtElem<R::Elem>) -> bool {
        a.0[1..].iter().all(|c| self.base.is_zero(c))
    }

    pub fn map_coefficients<S: Ring>(&self, a: &ExtElem<R::Elem>, f: impl Fn(&R::Elem) -> S::Elem) -> ExtElem<S::Elem> {
        ExtElem(a.0.iter().map(f).collect())
    }

    fn solve_unit_pivot(&self, mut m: Vec<Vec<R::Elem>>, mut rhs: Vec<R::Elem>) -> Option<Vec<R::Elem>> {
        let b = &self.base;
        let n = rhs.len();
        for col in 0..n {
            let (piv, inv) = (col..n).find_map(|row| b.inv(&m[row][col]).map(|i| (row, i)))?;
            m.swap(col, piv);
            rhs.swap(col, piv);
            for j in col..n {
                m[col][j] = b.mul(&m[col][j], &inv);
            }
            rhs[col] = b.mul(&rhs[col], &inv);
            for row in 0..n {
                if row == col || b.is_zero(&m[row][col]) {
                    continue;
                }
                let factor = m[row][col].clone();
                for j in col..n {
                    let t = b.mul(&factor, &m[col][j]);
                    m[row][j] = b.sub(&m[row][j], &t);
                }
                let t = b.mul(&factor, &rhs[col]);
                rhs[row] = b.sub(&rhs[row], &t);
            }
        }
        Some(rhs)
    }
}

impl<R: Ring> Ring for ExtRing<R> {
    type Elem = ExtElem<R::Elem>;

    fn zero(&self) -> Self::Elem {
        ExtElem(vec![self.base.zero(); self.degree()])
    }

    fn one(&self) -> Self::Elem {
        self.embed(self.base.one())
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        ExtElem(a.0.iter().zip(&b.0).map(|(x, y)| self.base.add(x, y)).collect())
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        ExtElem(a.0.iter().zip(&b.0).map(|(x, y)| self.base.sub(x, y)).collect())
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        ExtElem(a.0.iter().map(|x| self.base.neg(x)).collect())
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let r = self.degree();
        let base = &self.base;
        if r == 1 {
            return ExtElem(vec![base.mul(&a.0[0], &b.0[0])]);
        }
        let mut prod = vec![base.zero(); 2 * r - 1];
        for (i, x) in a.0.iter().enumerate() {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                let t = base.mul(x, y);
                prod[i + j] = base.add(&prod[i + j], &t);
            }
        }
        self.reduce(prod)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.0.iter().all(|c| self.base.is_zero(c))
    }

    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        self.embed(self.base.from_bigint(v))
    }

    fn from_rational(&self, q: &num_rational::BigRational) -> crate::Result<Self::Elem> {
        Ok(self.embed(self.base.from_rational(q)?))
    }

    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        let r = self.degree();
        if r == 1 {
            return self.base.inv(&a.0[0]).map(|i| ExtElem(vec![i]));
        }
        // Columns of the multiplication-by-a matrix are a, a x, ..., a x^{r-1}.
        let x = self.generator();
        let mut col = a.clone();
        let mut m = vec![vec![self.base.zero(); r]; r];
        for j in 0..r {
            for i in 0..r {
                m[i][j] = col.0[i].clone();
            }
            col = self.mul(&col, &x);
        }
        let mut rhs = vec![self.base.zero(); r];
        rhs[0] = self.base.one();
        self.solve_unit_pivot(m, rhs).map(ExtElem)
    }

    fn fmt_elem(&self, a: &Self::Elem) -> String {
        let parts: Vec<String> = a.0.iter().map(|c| self.base.fmt_elem(c)).collect();
        format!("[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Rationals;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn gaussian_integers_inverse() {
        // Q(i) = Q[x]/(x^2 + 1)
        let k = ExtRing::new(Rationals, vec![q(1), q(0)]);
        let a = ExtElem(vec![q(1), q(2)]);
        let inv = k.inv(&a).unwrap();
        assert!(k.is_one(&k.mul(&a, &inv)));
        let i = k.generator();
        assert_eq!(k.mul(&i, &i), k.from_i64(-1));
    }
}
