//! Exact expansion of `tr((ωⁱ M_i)^L)` into monomials in `ω`.
//!
//! The coefficient of a monomial is the sum of `tr(M_{i₁}···M_{i_L})` over all
//! index words with that letter content. Traces are invariant under cyclic
//! rotation of the word, so only the lexicographically minimal rotation of
//! each class (a necklace) is visited, weighted by the size of its class.
//! Necklaces are generated in lexicographic order (Fredricksen–Kessler–Maiorana),
//! which lets consecutive words share their prefix products.
//!
//! Matrices are scaled to a common integer denominator; products run in
//! checked `i128` and fall back to big integers on overflow.

use std::collections::{BTreeMap, HashMap};

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::rational::{QMatrix, Rational};

trait Ring: Clone + Send + Sync {
    fn r_zero() -> Self;
    fn r_one() -> Self;
    fn r_is_zero(&self) -> bool;
    /// `acc + a·b`, or `None` on overflow.
    fn mul_add(acc: &Self, a: &Self, b: &Self) -> Option<Self>;
    fn mul_small(&self, k: usize) -> Option<Self>;
    fn add(&self, other: &Self) -> Option<Self>;
    fn into_bigint(self) -> BigInt;
}

impl Ring for i128 {
    fn r_zero() -> Self {
        0
    }
    fn r_one() -> Self {
        1
    }
    fn r_is_zero(&self) -> bool {
        *self == 0
    }
    fn mul_add(acc: &Self, a: &Self, b: &Self) -> Option<Self> {
        acc.checked_add(a.checked_mul(*b)?)
    }
    fn mul_small(&self, k: usize) -> Option<Self> {
        self.checked_mul(k as i128)
    }
    fn add(&self, other: &Self) -> Option<Self> {
        self.checked_add(*other)
    }
    fn into_bigint(self) -> BigInt {
        BigInt::from(self)
    }
}

impl Ring for BigInt {
    fn r_zero() -> Self {
        <BigInt as Zero>::zero()
    }
    fn r_one() -> Self {
        <BigInt as One>::one()
    }
    fn r_is_zero(&self) -> bool {
        <BigInt as Zero>::is_zero(self)
    }
    fn mul_add(acc: &Self, a: &Self, b: &Self) -> Option<Self> {
        Some(acc + a * b)
    }
    fn mul_small(&self, k: usize) -> Option<Self> {
        Some(self * BigInt::from(k))
    }
    fn add(&self, other: &Self) -> Option<Self> {
        Some(self + other)
    }
    fn into_bigint(self) -> BigInt {
        self
    }
}

type Counts = Vec<u32>;

/// Coefficients of `tr((Σ_i ωⁱ M_i)^len)`, keyed by exponent vector.
pub fn power_trace_polynomial(mats: &[QMatrix], len: usize) -> BTreeMap<Counts, Rational> {
    let k = mats.len();
    let mut out = BTreeMap::new();
    if k == 0 {
        return out;
    }
    let dim = mats[0].rows();
    if len == 0 {
        out.insert(vec![0; k], Rational::from_integer(BigInt::from(dim)));
        return out;
    }

    let denom = mats
        .iter()
        .flat_map(|m| m.as_slice().iter())
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let scaled: Vec<Vec<BigInt>> = mats
        .iter()
        .map(|m| {
            m.as_slice()
                .iter()
                .map(|q| q.numer() * (&denom / q.denom()))
                .collect()
        })
        .collect();

    let small: Option<Vec<Vec<i128>>> = scaled
        .iter()
        .map(|m| m.iter().map(ToPrimitive::to_i128).collect())
        .collect();
    let sums: HashMap<Counts, BigInt> = small
        .and_then(|mats| enumerate(&mats, dim, len))
        .or_else(|| enumerate(&scaled, dim, len))
        .expect("big-integer enumeration cannot overflow");

    let scale = num::pow(denom, len);
    for (counts, v) in sums {
        if !v.is_zero() {
            out.insert(counts, Rational::new(v, scale.clone()));
        }
    }
    out
}

/// Number of words of length `len` over `k` letters whose necklaces are visited.
pub fn necklace_count(k: usize, len: usize) -> usize {
    let mut count = 0;
    walk_prefixes(k, len, len, &mut |_, per| {
        if len.is_multiple_of(per) {
            count += 1;
        }
    });
    count
}

fn enumerate<T: Ring>(mats: &[Vec<T>], dim: usize, len: usize) -> Option<HashMap<Counts, BigInt>> {
    let k = mats.len();
    let depth = len.saturating_sub(1).min(2);
    let mut tasks: Vec<(Vec<usize>, usize)> = Vec::new();
    walk_prefixes(k, len, depth, &mut |word, per| {
        tasks.push((word.to_vec(), per))
    });

    let partials: Vec<Option<HashMap<Counts, T>>> = tasks
        .par_iter()
        .map(|(prefix, per)| {
            let mut w = Walker::new(mats, dim, len, prefix)?;
            w.gen(prefix.len() + 1, *per)?;
            Some(w.out)
        })
        .collect();

    let mut merged: HashMap<Counts, BigInt> = HashMap::new();
    for part in partials {
        for (key, v) in part? {
            *merged.entry(key).or_insert_with(BigInt::zero) += v.into_bigint();
        }
    }
    Some(merged)
}

/// Runs the necklace recursion on indices only, stopping at `depth` letters;
/// `visit` receives each prefix `a[1..=depth]` with its current period.
fn walk_prefixes(k: usize, len: usize, depth: usize, visit: &mut impl FnMut(&[usize], usize)) {
    fn rec(
        a: &mut Vec<usize>,
        t: usize,
        per: usize,
        k: usize,
        depth: usize,
        visit: &mut impl FnMut(&[usize], usize),
    ) {
        if t > depth {
            visit(&a[1..], per);
            return;
        }
        a.push(a[t - per]);
        rec(a, t + 1, per, k, depth, visit);
        for j in a[t - per] + 1..k {
            a[t] = j;
            rec(a, t + 1, t, k, depth, visit);
        }
        a.pop();
    }
    debug_assert!(depth <= len);
    let mut a = vec![0usize];
    rec(&mut a, 1, 1, k, depth, visit);
}

struct Walker<'a, T: Ring> {
    mats: &'a [Vec<T>],
    dim: usize,
    len: usize,
    /// `a[0]` is the sentinel 0; `a[1..]` is the current word.
    a: Vec<usize>,
    counts: Counts,
    /// `prods[t]` is the product of the first `t` letters.
    prods: Vec<Vec<T>>,
    out: HashMap<Counts, T>,
}

impl<'a, T: Ring> Walker<'a, T> {
    fn new(mats: &'a [Vec<T>], dim: usize, len: usize, prefix: &[usize]) -> Option<Self> {
        let mut ident = vec![T::r_zero(); dim * dim];
        for i in 0..dim {
            ident[i * dim + i] = T::r_one();
        }
        let mut w = Walker {
            mats,
            dim,
            len,
            a: vec![0],
            counts: vec![0; mats.len()],
            prods: vec![ident],
            out: HashMap::new(),
        };
        for &j in prefix {
            w.push(j)?;
        }
        Some(w)
    }

    fn push(&mut self, j: usize) -> Option<()> {
        let next = matmul(
            self.prods.last().expect("identity at depth 0"),
            &self.mats[j],
            self.dim,
        )?;
        self.prods.push(next);
        self.a.push(j);
        self.counts[j] += 1;
        Some(())
    }

    fn pop(&mut self) {
        let j = self.a.pop().expect("non-empty word");
        self.prods.pop();
        self.counts[j] -= 1;
    }

    fn gen(&mut self, t: usize, per: usize) -> Option<()> {
        if t == self.len {
            // last letter: take the trace directly instead of forming the product
            let first = self.a[t - per];
            self.close(first, per)?;
            for j in first + 1..self.mats.len() {
                self.close(j, t)?;
            }
            return Some(());
        }
        let first = self.a[t - per];
        self.push(first)?;
        self.gen(t + 1, per)?;
        self.pop();
        for j in first + 1..self.mats.len() {
            self.push(j)?;
            self.gen(t + 1, t)?;
            self.pop();
        }
        Some(())
    }

    fn close(&mut self, j: usize, per: usize) -> Option<()> {
        if !self.len.is_multiple_of(per) {
            return Some(());
        }
        let prefix = self.prods.last().expect("prefix product");
        let m = &self.mats[j];
        let dim = self.dim;
        let mut tr = T::r_zero();
        for r in 0..dim {
            for c in 0..dim {
                let x = &prefix[r * dim + c];
                if !x.r_is_zero() {
                    tr = T::mul_add(&tr, x, &m[c * dim + r])?;
                }
            }
        }
        if tr.r_is_zero() {
            return Some(());
        }
        let contribution = tr.mul_small(per)?;
        self.counts[j] += 1;
        if !self.out.contains_key(&self.counts) {
            self.out.insert(self.counts.clone(), T::r_zero());
        }
        let slot = self.out.get_mut(&self.counts).expect("inserted above");
        *slot = slot.add(&contribution)?;
        self.counts[j] -= 1;
        Some(())
    }
}

fn matmul<T: Ring>(a: &[T], b: &[T], dim: usize) -> Option<Vec<T>> {
    let mut out = vec![T::r_zero(); dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let x = &a[r * dim + k];
            if x.r_is_zero() {
                continue;
            }
            for c in 0..dim {
                let y = &b[k * dim + c];
                if !y.r_is_zero() {
                    out[r * dim + c] = T::mul_add(&out[r * dim + c], x, y)?;
                }
            }
        }
    }
    Some(out)
}
