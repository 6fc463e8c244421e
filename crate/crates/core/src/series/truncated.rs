use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Power series known modulo `x^D`, where `D` is the number of stored
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<T> {
    pub coeffs: Vec<T>,
}

impl<T> TruncatedSeries<T> {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }
}

/// Truncated power series over `R`; `order` is the default truncation for
/// constructed elements. Binary operations truncate to the smaller order of
/// their operands.
#[derive(Clone, Debug)]
pub struct SeriesRing<R: Ring> {
    base: R,
    order: usize,
}

impl<R: Ring> SeriesRing<R> {
    pub fn new(base: R, order: usize) -> Self {
        assert!(order >= 1, "truncation order must be positive");
        SeriesRing { base, order }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Pad with zeros or cut to the ring's order.
    pub fn from_coeffs(&self, c: Vec<R::Elem>) -> TruncatedSeries<R::Elem> {
        self.with_order(c, self.order)
    }

    pub fn with_order(&self, mut c: Vec<R::Elem>, d: usize) -> TruncatedSeries<R::Elem> {
        c.resize(d, self.base.zero());
        TruncatedSeries { coeffs: c }
    }

    pub fn constant(&self, c: R::Elem) -> TruncatedSeries<R::Elem> {
        self.from_coeffs(vec![c])
    }

    pub fn variable(&self) -> TruncatedSeries<R::Elem> {
        self.from_coeffs(vec![self.base.zero(), self.base.one()])
    }

    pub fn coefficient(&self, a: &TruncatedSeries<R::Elem>, k: usize) -> R::Elem {
        a.coeffs.get(k).cloned().unwrap_or_else(|| self.base.zero())
    }

    pub fn truncate(&self, a: &TruncatedSeries<R::Elem>, d: usize) -> TruncatedSeries<R::Elem> {
        assert!(d <= a.order(), "truncation cannot raise the order");
        TruncatedSeries {
            coeffs: a.coeffs[..d].to_vec(),
        }
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self, a: &TruncatedSeries<R::Elem>) -> Option<usize> {
        a.coeffs.iter().position(|c| !self.base.is_zero(c))
    }

    pub fn scale(&self, a: &TruncatedSeries<R::Elem>, c: &R::Elem) -> TruncatedSeries<R::Elem> {
        TruncatedSeries {
            coeffs: a.coeffs.iter().map(|x| self.base.mul(x, c)).collect(),
        }
    }

    pub fn mul_to(
        &self,
        a: &TruncatedSeries<R::Elem>,
        b: &TruncatedSeries<R::Elem>,
        d: usize,
    ) -> TruncatedSeries<R::Elem> {
        let d = d.min(a.order()).min(b.order());
        let base = &self.base;
        let mut out = vec![base.zero(); d];
        for (i, x) in a.coeffs.iter().enumerate().take(d) {
            if base.is_zero(x) {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate().take(d - i) {
                if base.is_zero(y) {
                    continue;
                }
                out[i + j] = base.add(&out[i + j], &base.mul(x, y));
            }
        }
        TruncatedSeries { coeffs: out }
    }

    /// Multiplicative inverse; needs a unit constant term.
    pub fn inverse(&self, a: &TruncatedSeries<R::Elem>) -> Option<TruncatedSeries<R::Elem>> {
        let base = &self.base;
        let c0inv = base.inv(a.coeffs.first()?)?;
        let d = a.order();
        let mut out: Vec<R::Elem> = Vec::with_capacity(d);
        out.push(c0inv.clone());
        for k in 1..d {
            let mut acc = base.zero();
            for j in 1..=k {
                if !base.is_zero(&a.coeffs[j]) {
                    acc = base.add(&acc, &base.mul(&a.coeffs[j], &out[k - j]));
                }
            }
            out.push(base.neg(&base.mul(&acc, &c0inv)));
        }
        Some(TruncatedSeries { coeffs: out })
    }

    /// `f(h)`; requires `h(0) = 0`. The result has the order of `h`.
    pub fn compose(
        &self,
        f: &TruncatedSeries<R::Elem>,
        h: &TruncatedSeries<R::Elem>,
    ) -> Result<TruncatedSeries<R::Elem>> {
        if h.coeffs.first().is_some_and(|c| !self.base.is_zero(c)) {
            return Err(Error::InvalidParameter("inner series must vanish at 0".into()));
        }
        let d = h.order();
        let used = f.order().min(d);
        let mut acc = self.with_order(Vec::new(), d);
        for k in (0..used).rev() {
            acc = self.mul_to(&acc, h, d);
            acc.coeffs[0] = self.base.add(&acc.coeffs[0], &f.coeffs[k]);
        }
        Ok(acc)
    }

    /// Compositional inverse of `f = c_1 x + ...`; divides only by `c_1`.
    pub fn reversion(&self, f: &TruncatedSeries<R::Elem>) -> Result<TruncatedSeries<R::Elem>> {
        let base = &self.base;
        let d = f.order();
        if d < 2 {
            return Err(Error::InsufficientDegree { have: d, need: 2 });
        }
        if !base.is_zero(&f.coeffs[0]) {
            return Err(Error::InvalidParameter("series must vanish at 0".into()));
        }
        let c1inv = base.inv(&f.coeffs[1]).ok_or(Error::NonUnitLinearTerm)?;
        let fprime = self.derivative(f);
        let mut g = self.with_order(vec![base.zero(), c1inv], d);
        let mut prec = 2usize;
        while prec < d {
            let m = (2 * prec).min(d);
            let gm = self.with_order(g.coeffs[..m.min(g.order())].to_vec(), m);
            let mut fg = self.compose(f, &gm)?;
            fg.coeffs[1] = base.sub(&fg.coeffs[1], &base.one());
            let dm = self.truncate(&gm, m - 1);
            let fpg = self.compose(&fprime, &dm)?;
            let inv = self.inverse(&fpg).ok_or(Error::NonUnitLinearTerm)?;
            // fg has valuation >= prec, so only m - prec terms of inv matter.
            let corr = self.mul_to(&fg, &self.with_order(inv.coeffs, m), m);
            g = self.sub(&gm, &corr);
            prec = m;
        }
        Ok(g)
    }

    /// `d/dx`; the order drops by one.
    pub fn derivative(&self, a: &TruncatedSeries<R::Elem>) -> TruncatedSeries<R::Elem> {
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| self.base.scale_i64(c, k as i64))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// `theta = x d/dx`, acting as `x^k -> k x^k`; the order is unchanged.
    pub fn theta(&self, a: &TruncatedSeries<R::Elem>) -> TruncatedSeries<R::Elem> {
        let coeffs = a
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| self.base.scale_i64(c, k as i64))
            .collect();
        TruncatedSeries { coeffs }
    }

    /// `x * a`; the order grows by one.
    pub fn shift(&self, a: &TruncatedSeries<R::Elem>) -> TruncatedSeries<R::Elem> {
        let mut coeffs = Vec::with_capacity(a.order() + 1);
        coeffs.push(self.base.zero());
        coeffs.extend(a.coeffs.iter().cloned());
        TruncatedSeries { coeffs }
    }

    /// `a(x^k)`, keeping the order of `a`.
    pub fn dilate(&self, a: &TruncatedSeries<R::Elem>, k: usize) -> TruncatedSeries<R::Elem> {
        let d = a.order();
        let mut out = vec![self.base.zero(); d];
        for (i, c) in a.coeffs.iter().enumerate() {
            if i * k >= d {
                break;
            }
            out[i * k] = c.clone();
        }
        TruncatedSeries { coeffs: out }
    }

    /// Evaluate the stored coefficients as a polynomial.
    pub fn eval(&self, a: &TruncatedSeries<R::Elem>, x: &R::Elem) -> R::Elem {
        let b = &self.base;
        a.coeffs.iter().rev().fold(b.zero(), |acc, c| b.add(&b.mul(&acc, x), c))
    }

    pub fn map<S: Ring>(
        &self,
        a: &TruncatedSeries<R::Elem>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> TruncatedSeries<S::Elem> {
        TruncatedSeries {
            coeffs: a.coeffs.iter().map(f).collect(),
        }
    }

    fn zip(
        &self,
        a: &TruncatedSeries<R::Elem>,
        b: &TruncatedSeries<R::Elem>,
        op: impl Fn(&R::Elem, &R::Elem) -> R::Elem,
    ) -> TruncatedSeries<R::Elem> {
        TruncatedSeries {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| op(x, y)).collect(),
        }
    }
}

impl<R: Ring> Ring for SeriesRing<R> {
    type Elem = TruncatedSeries<R::Elem>;

    fn zero(&self) -> Self::Elem {
        self.from_coeffs(Vec::new())
    }
    fn one(&self) -> Self::Elem {
        self.constant(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.base.add(x, y))
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.zip(a, b, |x, y| self.base.sub(x, y))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.map::<R>(a, |x| self.base.neg(x))
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.mul_to(a, b, usize::MAX)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.coeffs.iter().all(|c| self.base.is_zero(c))
    }
    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        self.constant(self.base.from_bigint(v))
    }
    fn from_rational(&self, q: &num_rational::BigRational) -> Result<Self::Elem> {
        Ok(self.constant(self.base.from_rational(q)?))
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.inverse(a)
    }
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        let parts: Vec<String> = a.coeffs.iter().map(|c| self.base.fmt_elem(c)).collect();
        format!("[{}] + O(x^{})", parts.join(", "), a.order())
    }
}
