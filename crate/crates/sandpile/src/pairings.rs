//! Symmetric bilinear pairings into Q/Z on finite abelian groups and their duals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, gcd_u64};
use crate::error::{Error, Result};
use crate::groups::{FinAbGroup, GroupHom, MixedRadix};
use crate::linalg::{dot, smith_normal_form, smith_normal_form_with, solve_integer, Cokernel, IntMatrix, Transforms};

/// An element of Q/Z, kept as a reduced fraction in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ(BigRational);

impl QmodZ {
    pub fn zero() -> Self {
        QmodZ(BigRational::zero())
    }

    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        Ok(Self::from_rational(BigRational::new(num.into(), den)))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let fl = q.floor();
        QmodZ(q - fl)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for QmodZ {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (n, d) = s.split_once('/').unwrap_or((s, "1"));
        let n: BigInt = n.trim().parse().map_err(|_| Error::Parse(format!("fraction `{s}`")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Parse(format!("fraction `{s}`")))?;
        QmodZ::new(n, d)
    }
}

/// Gram matrix of a symmetric pairing with respect to the canonical
/// generators of `group`. Entry `(i, j)` is `num[i*r+j] / modulus`, where
/// `modulus` is the exponent of the group. Whether the generators are those
/// of the group or of its dual is up to the caller.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PairingGram {
    group: FinAbGroup,
    modulus: u64,
    num: Vec<u64>,
}

impl PairingGram {
    pub fn zero(group: FinAbGroup) -> Self {
        let r = group.rank();
        let modulus = group.exponent();
        PairingGram { group, modulus, num: vec![0; r * r] }
    }

    /// From numerators over the group exponent. Checks symmetry and that each
    /// entry is killed by the order of both generators.
    pub fn from_numerators(group: FinAbGroup, num: Vec<u64>) -> Result<Self> {
        let r = group.rank();
        let modulus = group.exponent();
        if num.len() != r * r {
            return Err(Error::DimensionMismatch(format!("{} entries for rank {r}", num.len())));
        }
        let num: Vec<u64> = num.into_iter().map(|x| x % modulus).collect();
        let ords = group.orders();
        for i in 0..r {
            for j in 0..r {
                if num[i * r + j] != num[j * r + i] {
                    return Err(Error::NotSymmetric);
                }
                let g = gcd_u64(ords[i], ords[j]);
                if arith::mul_mod(num[i * r + j], g, modulus) != 0 {
                    return Err(Error::IncompatibleEntry(i, j));
                }
            }
        }
        Ok(PairingGram { group, modulus, num })
    }

    pub fn from_values(group: FinAbGroup, values: &[Vec<QmodZ>]) -> Result<Self> {
        let r = group.rank();
        if values.len() != r || values.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch("gram shape".into()));
        }
        let modulus = group.exponent();
        let mut num = Vec::with_capacity(r * r);
        for (i, row) in values.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let scaled = v.as_rational() * BigRational::from_integer(modulus.into());
                if !scaled.is_integer() {
                    return Err(Error::IncompatibleEntry(i, j));
                }
                num.push(scaled.to_integer().to_u64().unwrap());
            }
        }
        Self::from_numerators(group, num)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn numerator(&self, i: usize, j: usize) -> u64 {
        self.num[i * self.rank() + j]
    }

    pub fn numerators(&self) -> &[u64] {
        &self.num
    }

    pub fn value(&self, i: usize, j: usize) -> QmodZ {
        QmodZ::new(self.numerator(i, j), self.modulus).unwrap()
    }

    pub fn values(&self) -> Vec<Vec<QmodZ>> {
        let r = self.rank();
        (0..r).map(|i| (0..r).map(|j| self.value(i, j)).collect()).collect()
    }

    /// The value on two elements, as a numerator over `modulus`.
    pub fn evaluate_num(&self, x: &[u64], y: &[u64]) -> u64 {
        let r = self.rank();
        let m = self.modulus as u128;
        let mut acc = 0u128;
        for i in 0..r {
            if x[i] == 0 {
                continue;
            }
            for j in 0..r {
                if y[j] != 0 {
                    acc = (acc + (x[i] as u128 * y[j] as u128 % m) * self.num[i * r + j] as u128) % m;
                }
            }
        }
        acc as u64
    }

    pub fn evaluate(&self, x: &[u64], y: &[u64]) -> QmodZ {
        QmodZ::new(self.evaluate_num(x, y), self.modulus).unwrap()
    }

    /// Image of generator `i` under `g -> <g, ->`, in coordinates of the dual basis.
    fn adjoint_images(&self) -> Vec<Vec<u64>> {
        let r = self.rank();
        let ords = self.group.orders();
        (0..r)
            .map(|i| (0..r).map(|j| self.numerator(i, j) * ords[j] / self.modulus % ords[j]).collect())
            .collect()
    }

    /// Perfect means `g -> <g, ->` is an isomorphism onto the dual.
    pub fn is_perfect(&self) -> bool {
        self.group.generated_by(&self.adjoint_images())
    }

    /// The gram of the induced pairing on the dual group, `<phi^-1 x, phi^-1 y>`.
    pub fn dual(&self) -> Result<PairingGram> {
        if !self.is_perfect() {
            return Err(Error::NotPerfect);
        }
        let r = self.rank();
        if r == 0 {
            return Ok(self.clone());
        }
        let ords = self.group.orders();
        let phi = self.adjoint_images();
        // solve phi(w_k) = e_k with the relations appended as extra columns
        let mut a = IntMatrix::zeros(r, 2 * r);
        for i in 0..r {
            for j in 0..r {
                a.set(j, i, BigInt::from(phi[i][j]));
            }
            a.set(i, r + i, BigInt::from(ords[i]));
        }
        let mut w = Vec::with_capacity(r);
        for k in 0..r {
            let mut e = vec![BigInt::zero(); r];
            e[k] = BigInt::one();
            let x = solve_integer(&a, &e)?.ok_or(Error::NotPerfect)?;
            let wk: Vec<i128> = x[..r].iter().map(|v| v.mod_floor(&BigInt::from(self.modulus)).to_i128().unwrap()).collect();
            w.push(self.group.reduce(&wk));
        }
        let mut num = vec![0; r * r];
        for k in 0..r {
            for l in 0..r {
                num[k * r + l] = self.evaluate_num(&w[k], &w[l]);
            }
        }
        Self::from_numerators(self.group.clone(), num)
    }

    /// Restriction to the generators at `primes`.
    pub fn sylow(&self, primes: &[u64]) -> PairingGram {
        let (g, idx) = self.group.sylow(primes);
        self.restrict(g, &idx)
    }

    fn restrict(&self, group: FinAbGroup, idx: &[usize]) -> PairingGram {
        let r = self.rank();
        let m = group.exponent();
        let num = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| {
                let v = self.num[i * r + j] as u128 * m as u128;
                debug_assert_eq!(v % self.modulus as u128, 0);
                (v / self.modulus as u128) as u64
            })
            .collect();
        PairingGram { group, modulus: m, num }
    }

    /// Orthogonal sum with a pairing on a group supported at other primes.
    pub fn direct_sum(&self, other: &PairingGram) -> Result<PairingGram> {
        let mut types: Vec<(u64, Vec<u32>)> = Vec::new();
        for g in [&self.group, &other.group] {
            for p in g.primes() {
                if types.iter().any(|(q, _)| *q == p) {
                    return Err(Error::InvalidGroup("summands share a prime".into()));
                }
                types.push((p, g.p_type(p)));
            }
        }
        let group = FinAbGroup::from_types(&types)?;
        let values: Vec<(usize, &PairingGram, Vec<u64>)> = [self, other]
            .into_iter()
            .map(|pg| (pg.rank(), pg, pg.group.primes()))
            .collect();
        let r = group.rank();
        let mut vals = vec![vec![QmodZ::zero(); r]; r];
        for (_, pg, primes) in &values {
            let target_idx: Vec<usize> = (0..r).filter(|&i| primes.contains(&group.gens()[i].p)).collect();
            for (a, &i) in target_idx.iter().enumerate() {
                for (b, &j) in target_idx.iter().enumerate() {
                    vals[i][j] = pg.value(a, b);
                }
            }
        }
        Self::from_values(group, &vals)
    }

    /// `row-major num/den` entries joined by commas.
    pub fn entries_text(&self) -> String {
        let r = self.rank();
        (0..r * r)
            .map(|t| self.value(t / r, t % r).to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for PairingGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.group, self.entries_text())
    }
}

impl fmt::Debug for PairingGram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PairingGram({self})")
    }
}

impl FromStr for PairingGram {
    type Err = Error;

    /// Parses `group|v11,v12,...` in canonical generator order.
    fn from_str(s: &str) -> Result<Self> {
        let (g, rest) = s.split_once('|').ok_or_else(|| Error::Parse(format!("paired group `{s}`")))?;
        let group: FinAbGroup = g.parse()?;
        if g.trim() != group.to_string() {
            return Err(Error::Parse(format!("group `{g}` is not in canonical order")));
        }
        let r = group.rank();
        let vals: Vec<QmodZ> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').map(str::parse).collect::<Result<_>>()?
        };
        if vals.len() != r * r {
            return Err(Error::DimensionMismatch(format!("{} entries for rank {r}", vals.len())));
        }
        let rows: Vec<Vec<QmodZ>> = vals.chunks(r.max(1)).map(|c| c.to_vec()).collect();
        Self::from_values(group, if r == 0 { &[] } else { &rows })
    }
}

impl TryFrom<String> for PairingGram {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<PairingGram> for String {
    fn from(g: PairingGram) -> String {
        g.to_string()
    }
}

/// A group with a symmetric pairing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairedGroup {
    pub pairing: PairingGram,
    pub perfect: bool,
}

impl PairedGroup {
    pub fn new(pairing: PairingGram) -> Self {
        let perfect = pairing.is_perfect();
        PairedGroup { pairing, perfect }
    }

    pub fn group(&self) -> &FinAbGroup {
        self.pairing.group()
    }
}

impl fmt::Display for PairedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.pairing.fmt(f)
    }
}

impl FromStr for PairedGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(PairedGroup::new(s.parse()?))
    }
}

/// Whether the pairing is a pushforward of a pairing on the dual of the
/// source, as gram matrices on dual bases: `(f^t)_* delta`.
pub fn pushforward(f: &GroupHom, delta: &PairingGram) -> Result<PairingGram> {
    if delta.group() != &f.source {
        return Err(Error::NotAPairing("pairing lives on a different group".into()));
    }
    let rs = f.source.rank();
    let rt = f.target.rank();
    let so = f.source.orders();
    let to = f.target.orders();
    let c: Vec<Vec<u128>> = (0..rt)
        .map(|k| (0..rs).map(|j| f.coeff(k, j) as u128 * so[j] as u128 / to[k] as u128).collect())
        .collect();
    let n = delta.modulus() as u128;
    let mt = f.target.exponent() as u128;
    let mut num = vec![0u64; rt * rt];
    for k in 0..rt {
        for l in k..rt {
            let mut acc = 0u128;
            for j in 0..rs {
                if c[k][j] == 0 {
                    continue;
                }
                for jj in 0..rs {
                    if c[l][jj] != 0 {
                        acc = (acc + (c[k][j] % n) * (c[l][jj] % n) % n * delta.numerator(j, jj) as u128) % n;
                    }
                }
            }
            // acc / n as a numerator over mt
            let v = acc * mt;
            if v % n != 0 {
                return Err(Error::NotAPairing("pushforward does not land in the target".into()));
            }
            num[k * rt + l] = (v / n) as u64;
            num[l * rt + k] = num[k * rt + l];
        }
    }
    PairingGram::from_numerators(f.target.clone(), num)
}

/// Every symmetric pairing on `g`, in mixed-radix order of the upper
/// triangle.
pub fn all_grams(g: &FinAbGroup) -> Vec<PairingGram> {
    let r = g.rank();
    let ords = g.orders();
    let e = g.exponent();
    let upper: Vec<(usize, usize)> = (0..r).flat_map(|i| (i..r).map(move |j| (i, j))).collect();
    let radix: Vec<u64> = upper.iter().map(|&(i, j)| arith::gcd_u64(ords[i], ords[j])).collect();
    MixedRadix::new(radix)
        .map(|digits| {
            let mut num = vec![0u64; r * r];
            for (&(i, j), &x) in upper.iter().zip(&digits) {
                let v = x * (e / arith::gcd_u64(ords[i], ords[j]));
                num[i * r + j] = v;
                num[j * r + i] = v;
            }
            PairingGram::from_numerators(g.clone(), num).expect("compatible entries")
        })
        .collect()
}

/// The Bosch-Lorenzini pairing on the torsion of `cok(m)`, on the Smith
/// generators: `<t, t'> = s^T m s' / (k k')` where `m s = k t`.
#[derive(Clone, Debug)]
pub struct TorsionPairing {
    pub invariants: Vec<BigInt>,
    pub free_rank: usize,
    /// Integer lifts of the Smith generators of the torsion.
    pub lifts: Vec<Vec<BigInt>>,
    pub gram: Vec<Vec<QmodZ>>,
}

pub fn torsion_pairing(m: &IntMatrix) -> Result<TorsionPairing> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let coker = Cokernel::new(m);
    let v = coker.snf.v.as_ref().unwrap();
    let idx = coker.torsion_indices();
    let s: Vec<Vec<BigInt>> = idx.iter().map(|&i| v.column(i)).collect();
    let ms: Vec<Vec<BigInt>> = s.iter().map(|x| m.mul_vec(x).unwrap()).collect();
    let d: Vec<BigInt> = idx.iter().map(|&i| coker.snf.d[i].clone()).collect();
    let r = idx.len();
    let mut gram = vec![vec![QmodZ::zero(); r]; r];
    for a in 0..r {
        for b in a..r {
            let q = QmodZ::from_rational(BigRational::new(dot(&s[a], &ms[b]), &d[a] * &d[b]));
            gram[a][b] = q.clone();
            gram[b][a] = q;
        }
    }
    let lifts = idx.iter().map(|&i| coker.generator_lift(i).unwrap()).collect();
    Ok(TorsionPairing { invariants: d, free_rank: coker.free_rank(), lifts, gram })
}

/// Whether a gram on cyclic generators describes the group or its dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Group,
    Dual,
}

/// Rewrites a pairing on cyclic generators of orders `orders` in the
/// canonical prime-power basis, keeping only `primes` when given.
pub fn canonicalize_cyclic(
    orders: &[BigInt],
    gram: &[Vec<QmodZ>],
    primes: Option<&[u64]>,
    orientation: Orientation,
) -> Result<PairingGram> {
    // (p, e, source index, coefficient)
    let mut parts: Vec<(u64, u32, usize, BigInt)> = Vec::new();
    for (i, d) in orders.iter().enumerate() {
        let fs: Vec<(u64, u32)> = match primes {
            Some(ps) => ps.iter().map(|&p| (p, arith::split_valuation(d, p).0)).filter(|x| x.1 > 0).collect(),
            None => arith::factor_big(d)?
                .into_iter()
                .map(|(p, e)| p.to_u64().map(|p| (p, e)).ok_or_else(|| Error::Unfactorable(d.to_string())))
                .collect::<Result<_>>()?,
        };
        for (p, e) in fs {
            let pe = BigInt::from(p).pow(e);
            let m = d / &pe;
            let coef = match orientation {
                Orientation::Group => m,
                Orientation::Dual => {
                    let pe64 = pe.to_u64().ok_or_else(|| Error::InvalidGroup(format!("{p}^{e} too large")))?;
                    let mm = m.mod_floor(&pe).to_u64().unwrap();
                    m * BigInt::from(arith::inv_mod(mm, pe64).unwrap())
                }
            };
            parts.push((p, e, i, coef));
        }
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)));
    let types: Vec<(u64, Vec<u32>)> = parts.iter().map(|x| (x.0, vec![x.1])).collect();
    let group = FinAbGroup::from_types(&types)?;
    let r = parts.len();
    let mut vals = vec![vec![QmodZ::zero(); r]; r];
    for a in 0..r {
        for b in a..r {
            let (pa, pb) = (&parts[a], &parts[b]);
            let q = gram[pa.2][pb.2].as_rational() * BigRational::from_integer(&pa.3 * &pb.3);
            let q = QmodZ::from_rational(q);
            vals[a][b] = q.clone();
            vals[b][a] = q;
        }
    }
    PairingGram::from_values(group, &vals)
}

impl TorsionPairing {
    /// Pairing on the canonical generators of the whole torsion group.
    pub fn paired_group(&self) -> Result<PairedGroup> {
        Ok(PairedGroup::new(canonicalize_cyclic(&self.invariants, &self.gram, None, Orientation::Group)?))
    }

    /// Pairing on the part of the torsion supported at `primes`.
    pub fn sylow(&self, primes: &[u64]) -> Result<PairedGroup> {
        Ok(PairedGroup::new(canonicalize_cyclic(&self.invariants, &self.gram, Some(primes), Orientation::Group)?))
    }

    pub fn order(&self) -> BigInt {
        self.invariants.iter().product()
    }
}

/// `x m y^T mod 1`, defined when `x m` is integral.
pub fn dual_cokernel_pairing_value(m: &IntMatrix, x: &[BigRational], y: &[BigRational]) -> Result<QmodZ> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch("vector length".into()));
    }
    let xm: Vec<BigRational> = (0..n)
        .map(|j| (0..n).map(|i| &x[i] * BigRational::from_integer(m.get(i, j).clone())).sum())
        .collect();
    if xm.iter().any(|v| !v.is_integer()) {
        return Err(Error::NotInDual);
    }
    let v: BigRational = xm.iter().zip(y).map(|(a, b)| a * b).sum();
    Ok(QmodZ::from_rational(v))
}

/// `cok(m) (x) Z/b` with the pairing `x m y^T` on its dual, in the canonical
/// basis. Requires only the Smith transform `u`.
pub fn cokernel_tensor_dual_pairing(m: &IntMatrix, b: u64) -> Result<PairingGram> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    if b == 0 {
        return Err(Error::InvalidParameter("b must be positive".into()));
    }
    let snf = smith_normal_form_with(m, Transforms { u: true, u_inv: false, v: false });
    let u = snf.u.as_ref().unwrap();
    let n = m.rows();
    let bb = BigInt::from(b);
    let mut idx = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        let e = match snf.d.get(i) {
            Some(d) if !d.is_zero() => d.gcd(&bb),
            _ => bb.clone(),
        };
        if !e.is_one() {
            idx.push(i);
            orders.push(e);
        }
    }
    let rows: Vec<Vec<BigInt>> = idx.iter().map(|&i| u.row(i).to_vec()).collect();
    let rm: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| (0..n).map(|j| (0..n).map(|k| &r[k] * m.get(k, j)).sum()).collect())
        .collect();
    let r = idx.len();
    let mut gram = vec![vec![QmodZ::zero(); r]; r];
    for a in 0..r {
        for c in a..r {
            let q = QmodZ::from_rational(BigRational::new(dot(&rm[a], &rows[c]), &orders[a] * &orders[c]));
            gram[a][c] = q.clone();
            gram[c][a] = q;
        }
    }
    canonicalize_cyclic(&orders, &gram, None, Orientation::Dual)
}

/// The torsion of `cok(m)` as a group, its free rank, and the pairing.
pub fn cokernel_paired_group(m: &IntMatrix) -> Result<(PairedGroup, usize)> {
    let tp = torsion_pairing(m)?;
    Ok((tp.paired_group()?, tp.free_rank))
}

/// Checks `<a, b>` against `x m^-1 y` over the rationals for invertible `m`,
/// on the integer lifts of the torsion generators.
pub fn inverse_form_gram(m: &IntMatrix, lifts: &[Vec<BigInt>]) -> Option<Vec<Vec<QmodZ>>> {
    let inv = m.rational_inverse()?;
    let n = m.rows();
    let r = lifts.len();
    let mut out = vec![vec![QmodZ::zero(); r]; r];
    for a in 0..r {
        for b in 0..r {
            let mut s = BigRational::zero();
            for i in 0..n {
                if lifts[a][i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !lifts[b][j].is_zero() {
                        s += &inv[i][j] * BigRational::from_integer(&lifts[a][i] * &lifts[b][j]);
                    }
                }
            }
            out[a][b] = QmodZ::from_rational(s);
        }
    }
    Some(out)
}

/// `k` and `s` with `m s = k t`, found by scaling a given lift; any `s` with
/// `m s = k t` gives the same pairing, which is what this is used to test.
pub fn pairing_from_lifts(m: &IntMatrix, k1: &BigInt, s1: &[BigInt], k2: &BigInt, s2: &[BigInt]) -> QmodZ {
    let ms2 = m.mul_vec(s2).unwrap();
    QmodZ::from_rational(BigRational::new(dot(s1, &ms2), k1 * k2))
}

/// Whether `x` is integral after multiplying by `m`; helper for callers
/// building dual elements by hand.
pub fn in_dual(m: &IntMatrix, x: &[BigRational]) -> bool {
    let n = m.rows();
    (0..n).all(|j| {
        let v: BigRational = (0..n).map(|i| &x[i] * BigRational::from_integer(m.get(i, j).clone())).sum();
        v.is_integer()
    })
}

/// Smith data used by the invariance tests: kernel directions of `m`.
pub fn kernel_basis(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(m);
    let v = snf.v.as_ref().unwrap();
    (0..m.cols())
        .filter(|&j| snf.d.get(j).is_none_or(|d| d.is_zero()))
        .map(|j| v.column(j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    fn q(n: i64, d: i64) -> QmodZ {
        QmodZ::new(n, d).unwrap()
    }

    fn pg(s: &str) -> PairingGram {
        s.parse().unwrap()
    }

    #[test]
    fn torsion_pairing_examples() {
        let tp = torsion_pairing(&mat(&[vec![3]])).unwrap();
        assert_eq!(tp.paired_group().unwrap().to_string(), "Z/3|1/3");
        let tp = torsion_pairing(&mat(&[vec![2, 1], vec![1, 2]])).unwrap();
        assert_eq!(tp.gram[0][0], q(2, 3));
        assert!(matches!(torsion_pairing(&mat(&[vec![1, 2], vec![0, 1]])), Err(Error::NotSymmetric)));
    }

    #[test]
    fn dual_value_examples() {
        let h = BigRational::new(1.into(), 2.into());
        assert_eq!(dual_cokernel_pairing_value(&mat(&[vec![2]]), &[h.clone()], &[h]).unwrap(), q(1, 2));
        let x = vec![BigRational::new(2.into(), 3.into()), BigRational::new((-1).into(), 3.into())];
        let m = mat(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(dual_cokernel_pairing_value(&m, &x, &x).unwrap(), q(2, 3));
        let bad = vec![BigRational::new(1.into(), 3.into()), BigRational::zero()];
        assert_eq!(dual_cokernel_pairing_value(&m, &bad, &bad), Err(Error::NotInDual));
    }

    #[test]
    fn gram_validation() {
        let g: FinAbGroup = "Z/2".parse().unwrap();
        assert!(PairingGram::from_values(g.clone(), &[vec![q(1, 3)]]).is_err());
        let g2: FinAbGroup = "Z/4+Z/2".parse().unwrap();
        // 1/4 between a Z/4 and a Z/2 generator is not killed by 2
        assert_eq!(
            PairingGram::from_values(g2, &[vec![q(1, 4), q(1, 4)], vec![q(1, 4), q(0, 1)]]),
            Err(Error::IncompatibleEntry(0, 1))
        );
        assert_eq!(pg("Z/4+Z/2|1/4,1/2,1/2,0/1").to_string(), "Z/4+Z/2|1/4,1/2,1/2,0/1");
        assert!("Z/2+Z/4|1/4,1/2,1/2,0/1".parse::<PairingGram>().is_err());
    }

    #[test]
    fn duals() {
        assert_eq!(pg("Z/3|1/3").dual().unwrap(), pg("Z/3|1/3"));
        assert_eq!(pg("Z/5|2/5").dual().unwrap(), pg("Z/5|3/5"));
        assert_eq!(pg("Z/2|0/1").dual(), Err(Error::NotPerfect));
        let h = pg("Z/2+Z/2|0/1,1/2,1/2,0/1");
        assert_eq!(h.dual().unwrap(), h);
        let d = pg("Z/4+Z/2|1/4,1/2,1/2,1/2");
        assert_eq!(d.dual().unwrap().dual().unwrap(), d);
    }

    #[test]
    fn perfectness() {
        assert!(pg("Z/4|1/4").is_perfect());
        assert!(!pg("Z/4|1/2").is_perfect());
        assert!(pg("Z/2+Z/2|0/1,1/2,1/2,0/1").is_perfect());
        assert!(!pg("Z/2+Z/2|1/2,1/2,1/2,1/2").is_perfect());
    }

    #[test]
    fn pushforward_examples() {
        let z4: FinAbGroup = "Z/4".parse().unwrap();
        let z2: FinAbGroup = "Z/2".parse().unwrap();
        let red = GroupHom::new(z4.clone(), z2, vec![vec![1]]).unwrap();
        assert!(pushforward(&red, &pg("Z/4|1/4")).unwrap().value(0, 0).is_zero());
        let z3: FinAbGroup = "Z/3".parse().unwrap();
        let two = GroupHom::new(z3.clone(), z3, vec![vec![2]]).unwrap();
        assert_eq!(pushforward(&two, &pg("Z/3|1/3")).unwrap(), pg("Z/3|1/3"));
    }

    #[test]
    fn tensor_dual_examples() {
        assert_eq!(cokernel_tensor_dual_pairing(&mat(&[vec![3]]), 3).unwrap(), pg("Z/3|1/3"));
        assert_eq!(cokernel_tensor_dual_pairing(&mat(&[vec![2, 1], vec![1, 2]]), 3).unwrap(), pg("Z/3|2/3"));
        // [2] over Z/4: cok = Z/2, dual element 1/2, value 2/4
        assert_eq!(cokernel_tensor_dual_pairing(&mat(&[vec![2]]), 4).unwrap(), pg("Z/2|1/2"));
        assert_eq!(cokernel_tensor_dual_pairing(&mat(&[vec![0]]), 2).unwrap(), pg("Z/2|0/1"));
    }

    #[test]
    fn group_and_dual_routes_agree_on_invertible() {
        let m = mat(&[vec![2, 1, 0], vec![1, 4, 1], vec![0, 1, 6]]);
        let grp = torsion_pairing(&m).unwrap().paired_group().unwrap();
        let det = m.determinant().unwrap().to_u64().unwrap();
        let dual = cokernel_tensor_dual_pairing(&m, det).unwrap();
        assert_eq!(grp.pairing.dual().unwrap(), dual);
    }
}
