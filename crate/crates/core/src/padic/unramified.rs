use std::sync::Arc;

use num_bigint::BigInt;

use super::{FiniteField, FqElem, PadicInt, Zpn};
use crate::error::{Error, Result};
use crate::ring::{ExtElem, ExtRing, Ring};

/// Element of `W(F_q)/p^N`: coordinates in `1, x, ..., x^{r-1}` modulo
/// `(p^N, m_N(x))`.
pub type UnramifiedElement = ExtElem<PadicInt>;

#[derive(Debug)]
struct Inner {
    field: FiniteField,
    zpn: Zpn,
    ext: ExtRing<Zpn>,
    /// `x^{p i} mod m_N` for `i < r`, the images of the basis under `sigma`.
    frob_basis: Vec<UnramifiedElement>,
}

/// The unramified ring `W(F_q)/p^N` presented as `(Z/p^N)[x]/(m_N)`.
///
/// `m_N` reduces to the residue field's `m_0` and divides `x^q - x`, so the
/// class of `x` is the Teichmueller lift of the residue class of `x`.
#[derive(Clone, Debug)]
pub struct UnramifiedRing {
    inner: Arc<Inner>,
}

impl UnramifiedRing {
    pub fn new(p: u64, r: usize, prec: u32) -> Result<Self> {
        let field = FiniteField::new(p, r)?;
        Self::over(field, prec)
    }

    /// Build over an existing residue field, reusing its `m_0`.
    pub fn over(field: FiniteField, prec: u32) -> Result<Self> {
        let zpn = Zpn::new(field.p(), prec)?;
        let m0: Vec<PadicInt> = field.modulus().iter().map(|&c| zpn.from_u64(c)).collect();
        let modulus = if field.degree() == 1 {
            m0
        } else {
            teichmueller_minimal_polynomial(&zpn, m0, field.order(), field.p())?
        };
        Self::from_parts(field, zpn, modulus)
    }

    fn from_parts(field: FiniteField, zpn: Zpn, modulus: Vec<PadicInt>) -> Result<Self> {
        let ext = ExtRing::new(zpn, modulus);
        let x = ext.generator();
        if ext.pow(&x, field.order()) != x {
            return Err(Error::ConsistencyFailure(
                "lifted modulus does not divide x^q - x".into(),
            ));
        }
        let xp = ext.pow(&x, field.p());
        let mut frob_basis = Vec::with_capacity(field.degree());
        let mut acc = ext.one();
        for _ in 0..field.degree() {
            frob_basis.push(acc.clone());
            acc = ext.mul(&acc, &xp);
        }
        Ok(UnramifiedRing {
            inner: Arc::new(Inner {
                field,
                zpn,
                ext,
                frob_basis,
            }),
        })
    }

    pub fn p(&self) -> u64 {
        self.inner.field.p()
    }

    pub fn degree(&self) -> usize {
        self.inner.field.degree()
    }

    pub fn q(&self) -> u64 {
        self.inner.field.order()
    }

    pub fn precision(&self) -> u32 {
        self.inner.zpn.precision()
    }

    pub fn zpn(&self) -> &Zpn {
        &self.inner.zpn
    }

    pub fn ext(&self) -> &ExtRing<Zpn> {
        &self.inner.ext
    }

    pub fn residue_field(&self) -> &FiniteField {
        &self.inner.field
    }

    /// Lower coefficients of `m_N`.
    pub fn lifted_modulus(&self) -> &[PadicInt] {
        self.inner.ext.modulus()
    }

    pub fn constant(&self, a: PadicInt) -> UnramifiedElement {
        self.inner.ext.embed(a)
    }

    pub fn from_coefficients(&self, c: &[i128]) -> UnramifiedElement {
        let z = &self.inner.zpn;
        self.inner.ext.reduce(c.iter().map(|&v| z.elem(v)).collect())
    }

    /// The value of `a` when it lies in `Z/p^N`.
    pub fn as_constant(&self, a: &UnramifiedElement) -> Option<PadicInt> {
        self.inner.ext.is_constant(a).then(|| a.0[0])
    }

    /// Reduction mod `p` onto the residue field.
    pub fn reduce(&self, a: &UnramifiedElement) -> FqElem {
        let p = self.p();
        let c: Vec<u64> = a.0.iter().map(|v| v.value() % p).collect();
        self.inner.field.from_coefficients(&c)
    }

    /// The lift of `a` with coordinates in `[0, p)`.
    pub fn naive_lift(&self, a: FqElem) -> UnramifiedElement {
        let z = &self.inner.zpn;
        ExtElem(
            self.inner
                .field
                .coefficients(a)
                .into_iter()
                .map(|c| z.from_u64(c))
                .collect(),
        )
    }

    /// The Teichmueller lift, as the fixed point of `z -> z^q`.
    pub fn teichmueller(&self, a: FqElem) -> UnramifiedElement {
        let ext = &self.inner.ext;
        let mut z = self.naive_lift(a);
        for _ in 0..self.precision() {
            let next = ext.pow(&z, self.q());
            if next == z {
                break;
            }
            z = next;
        }
        z
    }

    /// The Frobenius `sigma`, determined by `x -> x^p`.
    pub fn frobenius(&self, a: &UnramifiedElement) -> UnramifiedElement {
        let ext = &self.inner.ext;
        if self.degree() == 1 {
            return a.clone();
        }
        let mut out = ext.zero();
        for (c, basis) in a.0.iter().zip(&self.inner.frob_basis) {
            if c.value() == 0 {
                continue;
            }
            let term = ExtElem(basis.0.iter().map(|b| *b * *c).collect());
            out = ext.add(&out, &term);
        }
        out
    }

    pub fn frobenius_pow(&self, a: &UnramifiedElement, k: usize) -> UnramifiedElement {
        let mut out = a.clone();
        for _ in 0..k % self.degree() {
            out = self.frobenius(&out);
        }
        out
    }

    /// `a * sigma(a) * ... * sigma^{r-1}(a)`.
    pub fn norm(&self, a: &UnramifiedElement) -> UnramifiedElement {
        let ext = &self.inner.ext;
        let mut acc = a.clone();
        let mut conj = a.clone();
        for _ in 1..self.degree() {
            conj = self.frobenius(&conj);
            acc = ext.mul(&acc, &conj);
        }
        acc
    }

    /// The same ring at lower precision; `m_N` reduces to `m_{N'}`.
    pub fn truncated(&self, prec: u32) -> Result<UnramifiedRing> {
        if prec == 0 || prec > self.precision() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate precision {} to {prec}",
                self.precision()
            )));
        }
        let zpn = Zpn::new(self.p(), prec)?;
        let modulus = self.lifted_modulus().iter().map(|c| c.truncate(prec)).collect();
        Self::from_parts(self.inner.field.clone(), zpn, modulus)
    }

    /// Image of `a` in a lower-precision copy of this ring.
    pub fn truncate_elem(&self, a: &UnramifiedElement, prec: u32) -> UnramifiedElement {
        ExtElem(a.0.iter().map(|c| c.truncate(prec)).collect())
    }
}

/// `prod_i (X - zeta^{p^i})` where `zeta` is the Teichmueller lift of `x` in
/// `(Z/p^N)[x]/(M)` for the naive lift `M` of `m_0`.
fn teichmueller_minimal_polynomial(zpn: &Zpn, lift: Vec<PadicInt>, q: u64, p: u64) -> Result<Vec<PadicInt>> {
    let r = lift.len();
    let ext = ExtRing::new(*zpn, lift);
    let mut zeta = ext.generator();
    for _ in 0..zpn.precision() {
        zeta = ext.pow(&zeta, q);
    }
    // poly[k] is the coefficient of X^k, low first, over the extension.
    let mut poly = vec![ext.one()];
    let mut root = zeta;
    for _ in 0..r {
        let mut next = vec![ext.zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] = ext.add(&next[k + 1], c);
            let t = ext.mul(c, &root);
            next[k] = ext.sub(&next[k], &t);
        }
        poly = next;
        root = ext.pow(&root, p);
    }
    poly.pop();
    poly.into_iter()
        .map(|c| {
            if ext.is_constant(&c) {
                Ok(c.0[0])
            } else {
                Err(Error::ConsistencyFailure("conjugate product is not rational".into()))
            }
        })
        .collect()
}

impl PartialEq for UnramifiedRing {
    fn eq(&self, other: &Self) -> bool {
        self.precision() == other.precision() && self.inner.field == other.inner.field
    }
}

impl Ring for UnramifiedRing {
    type Elem = UnramifiedElement;

    fn zero(&self) -> Self::Elem {
        self.inner.ext.zero()
    }
    fn one(&self) -> Self::Elem {
        self.inner.ext.one()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.inner.ext.add(a, b)
    }
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.inner.ext.sub(a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.inner.ext.neg(a)
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.inner.ext.mul(a, b)
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        self.inner.ext.is_zero(a)
    }
    fn from_bigint(&self, v: &BigInt) -> Self::Elem {
        self.inner.ext.from_bigint(v)
    }
    fn from_i64(&self, v: i64) -> Self::Elem {
        self.inner.ext.embed(self.inner.zpn.elem(v as i128))
    }
    fn from_rational(&self, q: &num_rational::BigRational) -> Result<Self::Elem> {
        self.inner.ext.from_rational(q)
    }
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem> {
        self.inner.ext.inv(a)
    }
    fn fmt_elem(&self, a: &Self::Elem) -> String {
        self.inner.ext.fmt_elem(a)
    }
}
