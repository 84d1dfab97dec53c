//! Matrices over the truncated power-series ring.

use std::sync::Arc;

use super::{Coeff, Jet, Space};
use crate::error::JetError;

/// Row-major matrix of jets sharing one space.
#[derive(Clone, Debug, PartialEq)]
pub struct JetMatrix<C: Coeff> {
    rows: usize,
    cols: usize,
    entries: Vec<Jet<C>>,
}

impl<C: Coeff> JetMatrix<C> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet<C>) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        JetMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn try_from_fn<E>(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Result<Jet<C>, E>,
    ) -> Result<Self, E> {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c)?);
            }
        }
        Ok(JetMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Jet<C>>) -> Result<Self, JetError> {
        if entries.len() != rows * cols {
            return Err(JetError::Shape(format!(
                "{} entries for {rows}x{cols}",
                entries.len()
            )));
        }
        if let Some(first) = entries.first() {
            if entries.iter().any(|e| !e.space().same_as(first.space())) {
                return Err(JetError::SpaceMismatch {
                    left: format!("{:?}", first.space()),
                    right: "mixed entries".into(),
                });
            }
        }
        Ok(JetMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn identity(space: &Arc<Space>, n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Jet::one(space)
            } else {
                Jet::zero(space)
            }
        })
    }

    pub fn zeros(space: &Arc<Space>, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Jet::zero(space))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Jet<C> {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Jet<C> {
        &mut self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Jet<C>) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[Jet<C>] {
        &self.entries
    }

    pub fn map(&self, f: impl Fn(&Jet<C>) -> Jet<C>) -> Self {
        JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    pub fn column(&self, c: usize) -> Vec<Jet<C>> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, JetError> {
        if self.cols != other.rows {
            return Err(JetError::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let space = self.entries[0].space().clone();
        let mut out = Self::zeros(&space, self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let acc = out.get_mut(r, c);
                for k in 0..self.cols {
                    acc.add_product(self.get(r, k), other.get(k, c))?;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Jet<C>]) -> Result<Vec<Jet<C>>, JetError> {
        if v.len() != self.cols {
            return Err(JetError::Shape(format!(
                "{} vector for {} columns",
                v.len(),
                self.cols
            )));
        }
        let space = v[0].space().clone();
        (0..self.rows)
            .map(|r| {
                let mut acc = Jet::zero(&space);
                for (k, vk) in v.iter().enumerate() {
                    acc.add_product(self.get(r, k), vk)?;
                }
                Ok(acc)
            })
            .collect()
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, JetError> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(JetError::Shape("addition of different shapes".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<_, _>>()?;
        Ok(JetMatrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Matrix of constant terms.
    pub fn constant_terms(&self) -> Vec<Vec<C>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).constant_term().clone())
                    .collect()
            })
            .collect()
    }

    fn require_square(&self) -> Result<usize, JetError> {
        if self.rows == self.cols {
            Ok(self.rows)
        } else {
            Err(JetError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Submatrix with one row and one column removed.
    pub fn minor(&self, skip_r: usize, skip_c: usize) -> Self {
        let rows: Vec<usize> = (0..self.rows).filter(|&r| r != skip_r).collect();
        let cols: Vec<usize> = (0..self.cols).filter(|&c| c != skip_c).collect();
        Self::from_fn(rows.len(), cols.len(), |r, c| {
            self.get(rows[r], cols[c]).clone()
        })
    }

    /// Determinant over the jet ring.
    ///
    /// Small matrices use cofactor expansion; larger ones use elimination
    /// when the constant-term matrix is invertible, and fall back to
    /// cofactor expansion otherwise.
    pub fn det(&self) -> Result<Jet<C>, JetError> {
        let n = self.require_square()?;
        if n == 0 {
            return Err(JetError::Shape("determinant of an empty matrix".into()));
        }
        if n <= 3 {
            return Ok(self.det_cofactor());
        }
        match self.det_elimination() {
            Ok(d) => Ok(d),
            Err(JetError::Singular) => Ok(self.det_cofactor()),
            Err(e) => Err(e),
        }
    }

    fn det_cofactor(&self) -> Jet<C> {
        let n = self.rows;
        match n {
            1 => self.get(0, 0).clone(),
            2 => self.get(0, 0) * self.get(1, 1) - self.get(0, 1) * self.get(1, 0),
            _ => {
                let space = self.get(0, 0).space().clone();
                let mut acc = Jet::zero(&space);
                for c in 0..n {
                    let a = self.get(0, c);
                    if a.is_zero() {
                        continue;
                    }
                    let term = a * &self.minor(0, c).det_cofactor();
                    acc = if c % 2 == 0 { acc + term } else { acc - term };
                }
                acc
            }
        }
    }

    fn det_elimination(&self) -> Result<Jet<C>, JetError> {
        let n = self.rows;
        let mut m = self.clone();
        let space = m.get(0, 0).space().clone();
        let mut det = Jet::one(&space);
        for k in 0..n {
            let p = pivot_row(&m, k, k).ok_or(JetError::Singular)?;
            if p != k {
                m.swap_rows(p, k);
                det = -det;
            }
            let piv = m.get(k, k).clone();
            det = &det * &piv;
            let inv = piv.reciprocal()?;
            for r in k + 1..n {
                let f = m.get(r, k) * &inv;
                if f.is_zero() {
                    continue;
                }
                for c in k..n {
                    let v = m.get(r, c) - &(&f * m.get(k, c));
                    m.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Solve `self * x = rhs` by Gauss-Jordan elimination with pivots
    /// chosen on the constant terms.
    pub fn solve(&self, rhs: &Self) -> Result<Self, JetError> {
        let n = self.require_square()?;
        if rhs.rows != n {
            return Err(JetError::Shape(format!(
                "{} right-hand rows for {n} unknowns",
                rhs.rows
            )));
        }
        let mut a = self.clone();
        let mut b = rhs.clone();
        for k in 0..n {
            let p = pivot_row(&a, k, k).ok_or(JetError::Singular)?;
            if p != k {
                a.swap_rows(p, k);
                b.swap_rows(p, k);
            }
            let inv = a.get(k, k).reciprocal()?;
            for c in 0..n {
                let v = a.get(k, c) * &inv;
                a.set(k, c, v);
            }
            for c in 0..b.cols {
                let v = b.get(k, c) * &inv;
                b.set(k, c, v);
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a.get(r, k).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let v = a.get(r, c) - &(&f * a.get(k, c));
                    a.set(r, c, v);
                }
                for c in 0..b.cols {
                    let v = b.get(r, c) - &(&f * b.get(k, c));
                    b.set(r, c, v);
                }
            }
        }
        Ok(b)
    }

    pub fn inverse(&self) -> Result<Self, JetError> {
        let n = self.require_square()?;
        let space = self.get(0, 0).space().clone();
        self.solve(&Self::identity(&space, n))
    }

    /// Adjugate (transposed cofactor matrix), so that `A adj(A) = det(A) I`.
    pub fn adjugate(&self) -> Result<Self, JetError> {
        let n = self.require_square()?;
        if n == 1 {
            let space = self.get(0, 0).space().clone();
            return Ok(Self::identity(&space, 1));
        }
        Self::try_from_fn(n, n, |r, c| {
            let d = self.minor(c, r).det()?;
            Ok(if (r + c) % 2 == 0 { d } else { -d })
        })
    }

    /// Largest coefficient magnitude over all entries, through total degree `k`.
    pub fn max_abs_upto(&self, k: usize) -> f64 {
        self.entries
            .iter()
            .map(|e| e.max_abs_upto(k))
            .fold(0.0, f64::max)
    }
}

/// Row `>= start` in column `col` whose constant term is usable as a pivot:
/// the first nonzero one in exact mode, the largest in binary64.
fn pivot_row<C: Coeff>(m: &JetMatrix<C>, col: usize, start: usize) -> Option<usize> {
    let candidates = (start..m.rows).filter(|&r| !m.get(r, col).constant_term().is_zero());
    match C::MODE {
        super::Mode::Exact => candidates.into_iter().next(),
        super::Mode::Binary64 => candidates.max_by(|&a, &b| {
            let fa = m.get(a, col).constant_term().to_c64().norm();
            let fb = m.get(b, col).constant_term().to_c64().norm();
            fa.partial_cmp(&fb)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.cmp(&a))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::ExactComplex as Q;

    #[test]
    fn diagonal_determinant() {
        let s = Space::new(["x", "y"], 3);
        let one = Jet::<Q>::one(&s);
        let x = Jet::var(&s, 0);
        let y = Jet::var(&s, 1);
        let m = JetMatrix::from_entries(
            2,
            2,
            vec![&one + &x, Jet::zero(&s), Jet::zero(&s), &one + &y],
        )
        .unwrap();
        assert_eq!(m.det().unwrap(), &one + &x + &y + &x * &y);
        assert_eq!(JetMatrix::<Q>::identity(&s, 4).det().unwrap(), one);
    }

    #[test]
    fn singular_constant_matrix_still_has_determinant() {
        let s = Space::new(["x"], 3);
        let x = Jet::<Q>::var(&s, 0);
        let m = JetMatrix::from_fn(4, 4, |r, c| match (r, c) {
            (0, 0) => x.clone(),
            (r, c) if r == c => Jet::one(&s),
            _ => Jet::zero(&s),
        });
        assert_eq!(m.det().unwrap(), x);
        assert_eq!(
            m.solve(&JetMatrix::identity(&s, 4)),
            Err(JetError::Singular)
        );
    }

    #[test]
    fn elimination_agrees_with_cofactors() {
        let s = Space::new(["x", "y"], 3);
        let x = Jet::<Q>::var(&s, 0);
        let y = Jet::<Q>::var(&s, 1);
        let m = JetMatrix::from_fn(4, 4, |r, c| {
            let base = Jet::constant(&s, Q::from_i64(((r * 3 + c * 5) % 7) as i64 - 2));
            let bump = if (r + c) % 2 == 0 {
                x.scale_i64(r as i64 + 1)
            } else {
                &y * &x
            };
            if r == c {
                base + bump + Jet::constant(&s, Q::from_i64(9))
            } else {
                base + bump
            }
        });
        assert_eq!(m.det_elimination().unwrap(), m.det_cofactor());
    }

    #[test]
    fn adjugate_identity() {
        let s = Space::new(["x"], 3);
        let x = Jet::<Q>::var(&s, 0);
        let m = JetMatrix::from_fn(3, 3, |r, c| {
            Jet::constant(&s, Q::from_i64((r * 3 + c) as i64 % 4)) + x.scale_i64((r + 2 * c) as i64)
        });
        let prod = m.matmul(&m.adjugate().unwrap()).unwrap();
        let d = m.det().unwrap();
        let expected =
            JetMatrix::from_fn(3, 3, |r, c| if r == c { d.clone() } else { Jet::zero(&s) });
        assert_eq!(prod, expected);
    }
}
