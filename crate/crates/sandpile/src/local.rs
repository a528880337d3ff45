//! Smith reduction over `Z/p^K` for the experiment hot path.
//!
//! The cokernel of an integer matrix tensored with `Z/p^K` is read off from
//! the valuations of the pivots. When every pivot has valuation `v` with
//! `2v < K`, the pairing on the `p`-part computed from the truncated
//! transforms agrees with the exact one; otherwise callers fall back to the
//! big-integer route.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{inv_mod, ipow};
use crate::error::{Error, Result};
use crate::groups::FinAbGroup;
use crate::linalg::IntMatrix;
use crate::pairings::PairingGram;

pub struct LocalSnf {
    pub p: u64,
    pub prec: u32,
    q: u64,
    n: usize,
    /// Pivot valuations in elimination order; `prec` marks a zero pivot.
    pub val: Vec<u32>,
    u: Vec<u64>,
    ui: Vec<u64>,
    v: Vec<u64>,
    m: Vec<u64>,
}

fn mulm(a: u64, b: u64, q: u64) -> u64 {
    (a as u128 * b as u128 % q as u128) as u64
}

fn valuation(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Largest `K` with `p^K < 2^62`.
pub fn max_precision(p: u64) -> u32 {
    let mut k = 0;
    let mut x: u64 = 1;
    while let Some(y) = x.checked_mul(p) {
        if y >= 1 << 62 {
            break;
        }
        x = y;
        k += 1;
    }
    k
}

impl LocalSnf {
    pub fn new(m: &IntMatrix, p: u64, prec: u32) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("square matrix required".into()));
        }
        if prec == 0 || prec > max_precision(p) {
            return Err(Error::InvalidParameter(format!("precision {prec} for p = {p}")));
        }
        let n = m.rows();
        let q = ipow(p, prec);
        let qb = BigInt::from(q);
        let mut a: Vec<u64> = Vec::with_capacity(n * n);
        for i in 0..n {
            for x in m.row(i) {
                a.push(x.mod_floor(&qb).to_u64().unwrap());
            }
        }
        let id = |n: usize| {
            let mut v = vec![0u64; n * n];
            for i in 0..n {
                v[i * n + i] = 1;
            }
            v
        };
        let mut s = LocalSnf { p, prec, q, n, val: Vec::with_capacity(n), u: id(n), ui: id(n), v: id(n), m: a.clone() };
        s.run(&mut a);
        Ok(s)
    }

    fn run(&mut self, a: &mut [u64]) {
        let (n, p, q) = (self.n, self.p, self.q);
        for t in 0..n {
            let mut best = (self.prec, t, t);
            'search: for i in t..n {
                for j in t..n {
                    let v = valuation(a[i * n + j], p, self.prec);
                    if v < best.0 {
                        best = (v, i, j);
                        if v == 0 {
                            break 'search;
                        }
                    }
                }
            }
            let (v, pi, pj) = best;
            if v == self.prec {
                self.val.extend(std::iter::repeat(self.prec).take(n - t));
                return;
            }
            if pi != t {
                for j in 0..n {
                    a.swap(t * n + j, pi * n + j);
                    self.u.swap(t * n + j, pi * n + j);
                    self.ui.swap(j * n + t, j * n + pi);
                }
            }
            if pj != t {
                for i in 0..n {
                    a.swap(i * n + t, i * n + pj);
                    self.v.swap(i * n + t, i * n + pj);
                }
            }
            let pv = ipow(p, v);
            let w = a[t * n + t] / pv;
            let winv = inv_mod(w % q, q).expect("unit");
            for j in 0..n {
                a[t * n + j] = mulm(a[t * n + j], winv, q);
                self.u[t * n + j] = mulm(self.u[t * n + j], winv, q);
                self.ui[j * n + t] = mulm(self.ui[j * n + t], w, q);
            }
            for i in t + 1..n {
                let x = a[i * n + t];
                if x == 0 {
                    continue;
                }
                let c = x / pv;
                for j in 0..n {
                    a[i * n + j] = (a[i * n + j] + q - mulm(c, a[t * n + j], q)) % q;
                    self.u[i * n + j] = (self.u[i * n + j] + q - mulm(c, self.u[t * n + j], q)) % q;
                    self.ui[j * n + t] = (self.ui[j * n + t] + mulm(c, self.ui[j * n + i], q)) % q;
                }
            }
            for j in t + 1..n {
                let x = a[t * n + j];
                if x == 0 {
                    continue;
                }
                let c = x / pv;
                for i in 0..n {
                    a[i * n + j] = (a[i * n + j] + q - mulm(c, a[i * n + t], q)) % q;
                    self.v[i * n + j] = (self.v[i * n + j] + q - mulm(c, self.v[i * n + t], q)) % q;
                }
            }
            self.val.push(v);
        }
    }

    /// Number of pivots that vanish modulo `p^K`.
    pub fn zero_pivots(&self) -> usize {
        self.val.iter().filter(|&&v| v == self.prec).count()
    }

    fn sorted_indices(&self, keep: impl Fn(u32) -> bool) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.n).filter(|&i| keep(self.val[i])).collect();
        idx.sort_by(|&a, &b| self.val[b].cmp(&self.val[a]).then(a.cmp(&b)));
        idx
    }

    /// The `p`-part of `cok(m)` with its torsion pairing, for `m` nonsingular
    /// over `Q_p`. `None` when the precision does not certify the answer.
    pub fn torsion_pairing(&self) -> Option<PairingGram> {
        if self.zero_pivots() > 0 {
            return None;
        }
        let vmax = self.val.iter().copied().max().unwrap_or(0);
        if 2 * vmax + 1 > self.prec {
            return None;
        }
        let (n, q) = (self.n, self.q);
        let idx = self.sorted_indices(|v| v > 0);
        let lambda: Vec<u32> = idx.iter().map(|&i| self.val[i]).collect();
        let group = FinAbGroup::from_prime_type(self.p, &lambda).ok()?;
        let r = idx.len();
        let mut num = vec![0u64; r * r];
        for a in 0..r {
            for b in 0..r {
                let (i, j) = (idx[a], idx[b]);
                let mut w = 0u64;
                for k in 0..n {
                    w = (w + mulm(self.ui[k * n + i], self.v[k * n + j], q)) % q;
                }
                let vj = self.val[j];
                let num_j = w % ipow(self.p, vj);
                num[a * r + b] = num_j * ipow(self.p, vmax - vj);
            }
        }
        PairingGram::from_numerators(group, num).ok()
    }

    /// `cok(m) (x) Z/p^k` with the dual pairing `x m y^T`, for `K = 2k`.
    pub fn tensor_dual_pairing(&self) -> Option<PairingGram> {
        if self.prec % 2 != 0 {
            return None;
        }
        let k = self.prec / 2;
        let (n, p, q) = (self.n, self.p, self.q);
        let idx = self.sorted_indices(|v| v > 0);
        let lambda: Vec<u32> = idx.iter().map(|&i| self.val[i].min(k)).collect();
        let group = FinAbGroup::from_prime_type(p, &lambda).ok()?;
        let r = idx.len();
        let emax = lambda.first().copied().unwrap_or(0);
        // rows of u m
        let um: Vec<Vec<u64>> = idx
            .iter()
            .map(|&i| {
                (0..n)
                    .map(|j| (0..n).fold(0u64, |acc, l| (acc + mulm(self.u[i * n + l], self.m[l * n + j], q)) % q))
                    .collect()
            })
            .collect();
        let mut num = vec![0u64; r * r];
        for a in 0..r {
            for b in a..r {
                let j = idx[b];
                let x = (0..n).fold(0u64, |acc, l| (acc + mulm(um[a][l], self.u[j * n + l], q)) % q);
                let ee = ipow(p, lambda[a] + lambda[b]);
                let v = (x % ee) as u128 * ipow(p, emax) as u128;
                if v % ee as u128 != 0 {
                    return None;
                }
                num[a * r + b] = (v / ee as u128) as u64;
                num[b * r + a] = num[a * r + b];
            }
        }
        PairingGram::from_numerators(group, num).ok()
    }
}

/// `p`-parts of `cok(m)` with the torsion pairing, for each prime in
/// `primes`. `None` if some prime needs the exact route.
pub fn local_torsion_pairing(m: &IntMatrix, primes: &[u64]) -> Option<PairingGram> {
    let mut out: Option<PairingGram> = None;
    for &p in primes {
        let part = LocalSnf::new(m, p, max_precision(p)).ok()?.torsion_pairing()?;
        out = Some(match out {
            None => part,
            Some(acc) => acc.direct_sum(&part).ok()?,
        });
    }
    Some(out.unwrap_or_else(|| PairingGram::zero(FinAbGroup::trivial())))
}

/// `cok(m) (x) Z/b` with the dual pairing, prime by prime.
pub fn local_tensor_dual_pairing(m: &IntMatrix, b: u64) -> Result<PairingGram> {
    let mut out = PairingGram::zero(FinAbGroup::trivial());
    for (p, k) in crate::arith::factor_u64(b) {
        if 2 * k > max_precision(p) {
            return Err(Error::InvalidParameter(format!("b = {b} too large for the word-size route")));
        }
        let part = LocalSnf::new(m, p, 2 * k)?
            .tensor_dual_pairing()
            .ok_or_else(|| Error::InvalidParameter("tensor pairing".into()))?;
        out = out.direct_sum(&part)?;
    }
    Ok(out)
}
