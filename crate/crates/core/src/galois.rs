//! Arithmetic in finite fields GF(p^m).
//!
//! Elements are plain integers `0..q`. For extension fields an element is the
//! residue polynomial `c_0 + c_1 x + ... + c_{m-1} x^{m-1}` packed as the
//! base-p number `c_0 + c_1 p + ... `, so `x` itself is encoded as `p`.
//! Prime fields use modular arithmetic directly; extension fields multiply
//! through exp/log tables built when the field is constructed.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, always in `0..q`.
pub type Elem = u32;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

/// Handle to an immutable finite field. Cloning is cheap.
#[derive(Clone)]
pub struct Field {
    inner: Arc<FieldInner>,
}

struct FieldInner {
    p: u32,
    m: u32,
    q: u32,
    // monic, low to high, length m + 1; empty for prime fields
    modulus: Vec<u32>,
    exp: Vec<Elem>,
    log: Vec<u32>,
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `Some((p, m))` when `q = p^m` for a prime `p`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        return Some((q, 1));
    }
    let (mut r, mut m) = (q, 0u32);
    while r % p == 0 {
        r /= p;
        m += 1;
    }
    (r == 1).then_some((p, m))
}

fn checked_order(p: u32, m: u32) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if m == 0 {
        return Err(Error::UnsupportedSize { p, m });
    }
    let mut q: u64 = 1;
    for _ in 0..m {
        q *= p as u64;
        if q > MAX_ORDER as u64 {
            return Err(Error::UnsupportedSize { p, m });
        }
    }
    Ok(q as u32)
}

// Dense polynomials over GF(p), low to high. Only used while building tables.
mod fp_poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn inv_mod(a: u32, p: u32) -> u32 {
        let mut r = 1u64;
        let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p as u64;
            }
            b = b * b % p as u64;
            e >>= 1;
        }
        r as u32
    }

    /// Remainder of `a` modulo nonzero `b`.
    pub fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let shift = r.len() - 1 - db;
            let factor = (r[r.len() - 1] as u64 * lead_inv as u64 % p as u64) as u32;
            for (i, &bc) in b.iter().enumerate() {
                let sub = (factor as u64 * bc as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
            }
        }
        rem(&out, modulus, p)
    }

    /// Base-p digits of `v`, low first, trimmed.
    pub fn unpack(mut v: u32, p: u32) -> Vec<u32> {
        let mut d = Vec::new();
        while v > 0 {
            d.push(v % p);
            v /= p;
        }
        d
    }

    pub fn pack(d: &[u32], p: u32) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    /// Irreducibility by trial division with every monic polynomial of
    /// degree 1..=deg/2.
    pub fn is_irreducible(f: &[u32], p: u32) -> bool {
        let deg = f.len() - 1;
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for low in 0..count {
                let mut g = unpack(low as u32, p);
                g.resize(d, 0);
                g.push(1);
                if rem(f, &g, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

impl Field {
    /// Builds GF(p^m). Extension fields use the first primitive polynomial in
    /// the deterministic enumeration order, so `x` generates the
    /// multiplicative group.
    pub fn new(p: u32, m: u32) -> Result<Field> {
        let q = checked_order(p, m)?;
        if m == 1 {
            return Ok(Self::prime(p));
        }
        let count = (p as u64).pow(m);
        for low in 1..count {
            let mut f = fp_poly::unpack(low as u32, p);
            f.resize(m as usize, 0);
            f.push(1);
            if !fp_poly::is_irreducible(&f, p) {
                continue;
            }
            let (exp, log) = Self::tables(p, q, &f, p);
            if exp.len() == (q - 1) as usize {
                return Ok(Field {
                    inner: Arc::new(FieldInner {
                        p,
                        m,
                        q,
                        modulus: f,
                        exp,
                        log,
                    }),
                });
            }
        }
        Err(Error::NoPrimitivePoly { p, m })
    }

    /// Builds GF(p^m) with a caller-chosen monic irreducible modulus given low
    /// to high (`m + 1` coefficients).
    pub fn with_modulus(p: u32, m: u32, modulus: &[u32]) -> Result<Field> {
        let q = checked_order(p, m)?;
        if m == 1 {
            return Ok(Self::prime(p));
        }
        let bad = Error::InvalidModulus { p, m };
        if modulus.len() != m as usize + 1
            || modulus[m as usize] != 1
            || modulus.iter().any(|&c| c >= p)
            || !fp_poly::is_irreducible(modulus, p)
        {
            return Err(bad);
        }
        // find a generator of the multiplicative group
        for g in 2..q {
            let (exp, log) = Self::tables(p, q, modulus, g);
            if exp.len() == (q - 1) as usize {
                return Ok(Field {
                    inner: Arc::new(FieldInner {
                        p,
                        m,
                        q,
                        modulus: modulus.to_vec(),
                        exp,
                        log,
                    }),
                });
            }
        }
        Err(Error::NoPrimitivePoly { p, m })
    }

    fn prime(p: u32) -> Field {
        Field {
            inner: Arc::new(FieldInner {
                p,
                m: 1,
                q: p,
                modulus: Vec::new(),
                exp: Vec::new(),
                log: Vec::new(),
            }),
        }
    }

    /// Powers of `g` until they cycle back to 1. The returned exp table is
    /// shorter than `q - 1` when `g` is not a generator.
    fn tables(p: u32, q: u32, modulus: &[u32], g: Elem) -> (Vec<Elem>, Vec<u32>) {
        let gd = fp_poly::unpack(g, p);
        let mut exp = Vec::with_capacity(q as usize - 1);
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![1u32];
        loop {
            let v = fp_poly::pack(&cur, p);
            if !exp.is_empty() && v == 1 {
                break;
            }
            log[v as usize] = exp.len() as u32;
            exp.push(v);
            if exp.len() >= q as usize {
                break;
            }
            cur = fp_poly::mul_mod(&cur, &gd, modulus, p);
        }
        (exp, log)
    }

    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn degree(&self) -> u32 {
        self.inner.m
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients low to high; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.inner.q
    }

    pub fn check(&self, a: Elem) -> Result<Elem> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::InvalidElement {
                value: a,
                q: self.inner.q,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        0..self.inner.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        let FieldInner { p, m, .. } = *self.inner;
        if m == 1 {
            return (a + b) % p;
        }
        if p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut place) = (0, 1);
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        let FieldInner { p, m, .. } = *self.inner;
        if m == 1 {
            return (p - a % p) % p;
        }
        if p == 2 {
            return a;
        }
        let mut a = a;
        let (mut out, mut place) = (0, 1);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        let inner = &*self.inner;
        if inner.m == 1 {
            return ((a as u64 * b as u64) % inner.p as u64) as Elem;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (inner.log[a as usize] + inner.log[b as usize]) % (inner.q - 1);
        inner.exp[e as usize]
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self, a: Elem) -> Option<Elem> {
        if a == 0 {
            return None;
        }
        let inner = &*self.inner;
        if inner.m == 1 {
            return Some(fp_poly::inv_mod(a, inner.p));
        }
        let l = inner.log[a as usize];
        Some(inner.exp[((inner.q - 1 - l) % (inner.q - 1)) as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Option<Elem> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let (mut base, mut acc) = (a, 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: Elem) -> Option<u32> {
        if a == 0 {
            return None;
        }
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = self.mul(x, a);
            k += 1;
        }
        Some(k)
    }

    /// Number of nonzero entries.
    pub fn weight(v: &[Elem]) -> usize {
        v.iter().filter(|&&x| x != 0).count()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.m == other.inner.m
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.m == 1 {
            write!(f, "GF({})", self.inner.p)
        } else {
            write!(f, "GF({}^{})", self.inner.p, self.inner.m)
        }
    }
}
