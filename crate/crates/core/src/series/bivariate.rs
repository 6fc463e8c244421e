use super::truncated::{SeriesRing, TruncatedSeries};
use crate::ring::Ring;

/// Series in `x, y` known through total degree `D - 1`; `rows[i][j]` is the
/// coefficient of `x^i y^j`, with `i + j < D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateSeries<T> {
    pub rows: Vec<Vec<T>>,
}

impl<T> BivariateSeries<T> {
    pub fn order(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug)]
pub struct BivariateRing<R: Ring> {
    base: R,
    order: usize,
}

impl<R: Ring> BivariateRing<R> {
    pub fn new(base: R, order: usize) -> Self {
        BivariateRing { base, order }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn zero(&self) -> BivariateSeries<R::Elem> {
        BivariateSeries {
            rows: (0..self.order)
                .map(|i| vec![self.base.zero(); self.order - i])
                .collect(),
        }
    }

    pub fn coefficient(&self, a: &BivariateSeries<R::Elem>, i: usize, j: usize) -> R::Elem {
        if i + j < a.order() {
            a.rows[i][j].clone()
        } else {
            self.base.zero()
        }
    }

    /// `f(x)` viewed as a series in `x, y`.
    pub fn from_x(&self, f: &TruncatedSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        let mut out = self.zero();
        for (i, c) in f.coeffs.iter().enumerate().take(self.order) {
            out.rows[i][0] = c.clone();
        }
        out
    }

    pub fn from_y(&self, f: &TruncatedSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        let mut out = self.zero();
        for (j, c) in f.coeffs.iter().enumerate().take(self.order) {
            out.rows[0][j] = c.clone();
        }
        out
    }

    pub fn add(&self, a: &BivariateSeries<R::Elem>, b: &BivariateSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        BivariateSeries {
            rows: a
                .rows
                .iter()
                .zip(&b.rows)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| self.base.add(x, y)).collect())
                .collect(),
        }
    }

    pub fn sub(&self, a: &BivariateSeries<R::Elem>, b: &BivariateSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        BivariateSeries {
            rows: a
                .rows
                .iter()
                .zip(&b.rows)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| self.base.sub(x, y)).collect())
                .collect(),
        }
    }

    pub fn mul(&self, a: &BivariateSeries<R::Elem>, b: &BivariateSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        let d = self.order;
        let base = &self.base;
        let mut out = self.zero();
        for (i1, ra) in a.rows.iter().enumerate() {
            for (j1, x) in ra.iter().enumerate() {
                if base.is_zero(x) {
                    continue;
                }
                let room = d - i1 - j1;
                for (i2, rb) in b.rows.iter().enumerate().take(room) {
                    for (j2, y) in rb.iter().enumerate().take(room - i2) {
                        if base.is_zero(y) {
                            continue;
                        }
                        let cell = &mut out.rows[i1 + i2][j1 + j2];
                        *cell = base.add(cell, &base.mul(x, y));
                    }
                }
            }
        }
        out
    }

    /// `f(s)` for a univariate `f` and `s` without constant term.
    pub fn compose(&self, f: &TruncatedSeries<R::Elem>, s: &BivariateSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        assert!(self.base.is_zero(&s.rows[0][0]), "inner series must vanish at 0");
        let mut acc = self.zero();
        for k in (0..f.order().min(self.order)).rev() {
            acc = self.mul(&acc, s);
            acc.rows[0][0] = self.base.add(&acc.rows[0][0], &f.coeffs[k]);
        }
        acc
    }

    /// `a(y, x)`.
    pub fn swap(&self, a: &BivariateSeries<R::Elem>) -> BivariateSeries<R::Elem> {
        let mut out = self.zero();
        for (i, row) in a.rows.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                out.rows[j][i] = c.clone();
            }
        }
        out
    }

    /// `a(u(s), v(s))` as a univariate series in `s`; `u, v` vanish at 0.
    pub fn substitute(
        &self,
        a: &BivariateSeries<R::Elem>,
        u: &TruncatedSeries<R::Elem>,
        v: &TruncatedSeries<R::Elem>,
    ) -> TruncatedSeries<R::Elem> {
        let d = self.order.min(u.order()).min(v.order());
        let s = SeriesRing::new(self.base.clone(), d);
        let upow = powers(&s, u, d);
        let vpow = powers(&s, v, d);
        let mut out = s.zero();
        for (i, row) in a.rows.iter().enumerate().take(d) {
            for (j, c) in row.iter().enumerate().take(d - i) {
                if self.base.is_zero(c) {
                    continue;
                }
                let term = s.mul(&upow[i], &vpow[j]);
                out = s.add(&out, &s.scale(&term, c));
            }
        }
        out
    }

    pub fn map<S: Ring>(
        &self,
        a: &BivariateSeries<R::Elem>,
        f: impl Fn(&R::Elem) -> S::Elem,
    ) -> BivariateSeries<S::Elem> {
        BivariateSeries {
            rows: a.rows.iter().map(|r| r.iter().map(&f).collect()).collect(),
        }
    }
}

fn powers<R: Ring>(s: &SeriesRing<R>, u: &TruncatedSeries<R::Elem>, d: usize) -> Vec<TruncatedSeries<R::Elem>> {
    let u = s.with_order(u.coeffs[..d].to_vec(), d);
    let mut out = vec![s.one()];
    for k in 1..d {
        out.push(s.mul(&out[k - 1], &u));
    }
    out
}
