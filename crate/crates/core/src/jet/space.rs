//! Monomial index spaces: the ranked multi-indices of total degree `<= order`
//! in a fixed list of variables.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Upper bound on the number of variables in one space.
pub const MAX_VARS: usize = 8;

const NONE: u32 = u32::MAX;

/// Graded-lexicographic enumeration of multi-indices.
///
/// Index 0 is the constant monomial; all indices of degree `d` precede those
/// of degree `d + 1`.
pub struct Space {
    vars: Vec<String>,
    order: usize,
    exps: Vec<[u8; MAX_VARS]>,
    degrees: Vec<u8>,
    /// `degree_start[d]` = first index of total degree `d`; has `order + 2` entries.
    degree_start: Vec<usize>,
    lookup: HashMap<u64, u32>,
    /// `lower[v][i]` = index of `exps[i] - e_v`, or NONE.
    lower: Vec<Vec<u32>>,
    /// `raise[v][i]` = index of `exps[i] + e_v`, or NONE when the degree would exceed `order`.
    raise: Vec<Vec<u32>>,
    products: OnceLock<ProductTable>,
}

/// For each left index, the pairs `(right, target)` with `deg(left)+deg(right) <= order`.
pub(crate) struct ProductTable {
    pub(crate) offsets: Vec<usize>,
    pub(crate) pairs: Vec<(u32, u32)>,
}

fn pack(exp: &[u8; MAX_VARS]) -> u64 {
    u64::from_le_bytes(*exp)
}

impl Space {
    /// Build a space. Panics if there are more than [`MAX_VARS`] variables or
    /// the order does not fit in a byte.
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>, order: usize) -> Arc<Space> {
        let vars: Vec<String> = vars.into_iter().map(Into::into).collect();
        assert!(
            vars.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        assert!(order < 256, "order must be below 256");
        let nv = vars.len();

        let mut exps = Vec::new();
        let mut degrees = Vec::new();
        let mut degree_start = Vec::with_capacity(order + 2);
        for d in 0..=order {
            degree_start.push(exps.len());
            let mut cur = [0u8; MAX_VARS];
            enumerate_degree(nv, d, 0, &mut cur, &mut exps);
            degrees.resize(exps.len(), d as u8);
        }
        degree_start.push(exps.len());

        let lookup: HashMap<u64, u32> = exps
            .iter()
            .enumerate()
            .map(|(i, e)| (pack(e), i as u32))
            .collect();

        let mut lower = vec![vec![NONE; exps.len()]; nv];
        let mut raise = vec![vec![NONE; exps.len()]; nv];
        for (i, e) in exps.iter().enumerate() {
            for v in 0..nv {
                if e[v] > 0 {
                    let mut f = *e;
                    f[v] -= 1;
                    lower[v][i] = lookup[&pack(&f)];
                }
                if (degrees[i] as usize) < order {
                    let mut f = *e;
                    f[v] += 1;
                    raise[v][i] = lookup[&pack(&f)];
                }
            }
        }

        Arc::new(Space {
            vars,
            order,
            exps,
            degrees,
            degree_start,
            lookup,
            lower,
            raise,
            products: OnceLock::new(),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of monomials.
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Exponent tuple of index `i` (length `nvars`).
    pub fn exponent(&self, i: usize) -> &[u8] {
        &self.exps[i][..self.vars.len()]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i] as usize
    }

    /// Number of monomials of total degree `<= d`.
    pub fn count_upto(&self, d: usize) -> usize {
        self.degree_start[d.min(self.order) + 1]
    }

    pub fn index_of(&self, exp: &[u8]) -> Option<usize> {
        if exp.len() != self.vars.len() {
            return None;
        }
        let mut key = [0u8; MAX_VARS];
        key[..exp.len()].copy_from_slice(exp);
        self.lookup.get(&pack(&key)).map(|&i| i as usize)
    }

    pub(crate) fn lower(&self, var: usize, i: usize) -> Option<usize> {
        let j = self.lower[var][i];
        (j != NONE).then_some(j as usize)
    }

    pub(crate) fn raise(&self, var: usize, i: usize) -> Option<usize> {
        let j = self.raise[var][i];
        (j != NONE).then_some(j as usize)
    }

    pub(crate) fn products(&self) -> &ProductTable {
        self.products.get_or_init(|| {
            let n = self.exps.len();
            let mut offsets = Vec::with_capacity(n + 1);
            let mut pairs = Vec::new();
            for i in 0..n {
                offsets.push(pairs.len());
                let room = self.order - self.degree(i);
                for j in 0..self.count_upto(room) {
                    let mut s = self.exps[i];
                    for (a, b) in s.iter_mut().zip(self.exps[j].iter()) {
                        *a += *b;
                    }
                    pairs.push((j as u32, self.lookup[&pack(&s)]));
                }
            }
            offsets.push(pairs.len());
            ProductTable { offsets, pairs }
        })
    }

    /// Same variables and order.
    pub fn same_as(&self, other: &Space) -> bool {
        std::ptr::eq(self, other) || (self.order == other.order && self.vars == other.vars)
    }

    /// Format a monomial such as `x1^2*t`.
    pub fn monomial_string(&self, i: usize) -> String {
        let parts: Vec<String> = self
            .exponent(i)
            .iter()
            .zip(&self.vars)
            .filter(|(e, _)| **e > 0)
            .map(|(e, v)| {
                if *e == 1 {
                    v.clone()
                } else {
                    format!("{v}^{e}")
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

fn enumerate_degree(
    nv: usize,
    remaining: usize,
    pos: usize,
    cur: &mut [u8; MAX_VARS],
    out: &mut Vec<[u8; MAX_VARS]>,
) {
    if nv == 0 {
        if remaining == 0 {
            out.push(*cur);
        }
        return;
    }
    if pos == nv - 1 {
        cur[pos] = remaining as u8;
        out.push(*cur);
        cur[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        cur[pos] = e as u8;
        enumerate_degree(nv, remaining - e, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("vars", &self.vars)
            .field("order", &self.order)
            .finish()
    }
}
