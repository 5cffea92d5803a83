//! The finite field F_q, q = p^e, in a polynomial basis over F_p.
//!
//! Elements are stored as the integer `sum c_i p^i` of their coordinate
//! vector `(c_0, .., c_{e-1})` in `F_p[x]/(modulus)`; arithmetic goes through
//! addition and discrete-log tables built once per field. Fields are interned
//! in a process-wide registry so that elements can hold a `&'static` handle.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Mutex;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ring::{FieldLike, Ring};

/// Largest supported field order (tables are `q x q`).
pub const MAX_Q: u32 = 1024;

pub type Fq = &'static FieldConfig;

pub struct FieldConfig {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over F_p, low degree first, length e + 1.
    modulus: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    /// exp[i] = g^i for 0 <= i < 2(q-1).
    exp: Vec<u16>,
    /// log[v] for v != 0.
    log: Vec<u32>,
}

impl fmt::Debug for FieldConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}(p={}, modulus={:?})", self.q, self.p, self.modulus)
    }
}

/// Fields are interned, so identity is pointer identity.
impl PartialEq for FieldConfig {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
    }
}
impl Eq for FieldConfig {}
impl Hash for FieldConfig {
    fn hash<H: Hasher>(&self, h: &mut H) {
        (self.p, self.e, &self.modulus).hash(h)
    }
}

static REGISTRY: Mutex<Vec<Fq>> = Mutex::new(Vec::new());

/// Built-in moduli (Conway polynomials), low degree first.
fn builtin_modulus(p: u32, e: u32) -> Option<Vec<u32>> {
    let m: &[u32] = match (p, e) {
        (_, 1) => return Some(vec![0, 1]),
        (2, 2) => &[1, 1, 1],
        (2, 3) => &[1, 1, 0, 1],
        (2, 4) => &[1, 1, 0, 0, 1],
        (3, 2) => &[2, 2, 1],
        (3, 3) => &[1, 2, 0, 1],
        (5, 2) => &[2, 4, 1],
        _ => return None,
    };
    Some(m.to_vec())
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// Dense polynomial helpers over F_p on u32 vectors (low degree first).
fn fp_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn fp_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = fp_pow(m[dm], p - 2, p);
    while r.len() > dm {
        let k = r.len() - 1 - dm;
        let c = r[r.len() - 1] * inv_lead % p;
        for (i, &mi) in m.iter().enumerate() {
            r[k + i] = (r[k + i] + p * p - c * mi % p) % p;
        }
        fp_trim(&mut r);
    }
    r
}

fn fp_pow(mut b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u32;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn fp_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            r[i + j] = (r[i + j] + x * y) % p;
        }
    }
    fp_trim(&mut r);
    r
}

/// Trial division by every monic polynomial of degree <= deg/2.
fn fp_is_irreducible(m: &[u32], p: u32) -> bool {
    let d = m.len() - 1;
    if d == 0 {
        return false;
    }
    for k in 1..=d / 2 {
        let count = (p as u64).pow(k as u32);
        for code in 0..count {
            let mut f = vec![0u32; k + 1];
            let mut c = code;
            for fi in f.iter_mut().take(k) {
                *fi = (c % p as u64) as u32;
                c /= p as u64;
            }
            f[k] = 1;
            if fp_rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

fn search_modulus(p: u32, e: u32) -> Vec<u32> {
    let count = (p as u64).pow(e);
    for code in 0..count {
        let mut f = vec![0u32; e as usize + 1];
        let mut c = code;
        for fi in f.iter_mut().take(e as usize) {
            *fi = (c % p as u64) as u32;
            c /= p as u64;
        }
        f[e as usize] = 1;
        if fp_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldConfig {
    /// The field of order p^e with the built-in modulus; for orders outside
    /// the built-in table a deterministic search picks the smallest
    /// irreducible modulus.
    pub fn get(p: u32, e: u32) -> Result<Fq> {
        let m = match builtin_modulus(p, e) {
            Some(m) => m,
            None => {
                Self::check_order(p, e)?;
                search_modulus(p, e)
            }
        };
        Self::with_modulus(p, e, &m)
    }

    /// Like [`FieldConfig::get`], but only accepts orders with a built-in
    /// modulus (user-facing configuration).
    pub fn builtin(q: u32) -> Result<Fq> {
        let (p, e) = prime_power(q).ok_or_else(|| Error::Config(format!("{q} is not a prime power")))?;
        match builtin_modulus(p, e) {
            Some(m) if matches!(q, 2 | 3 | 4 | 5 | 7 | 8 | 9 | 16 | 25 | 27) || e == 1 => {
                Self::with_modulus(p, e, &m)
            }
            _ => Err(Error::Config(format!("no built-in modulus for q = {q}; pass one explicitly"))),
        }
    }

    fn check_order(p: u32, e: u32) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::Config(format!("p = {p} is not prime")));
        }
        if e == 0 {
            return Err(Error::Config("e must be positive".into()));
        }
        match p.checked_pow(e) {
            Some(q) if q <= MAX_Q => Ok(()),
            _ => Err(Error::Config(format!("field order {p}^{e} exceeds {MAX_Q}"))),
        }
    }

    pub fn with_modulus(p: u32, e: u32, modulus: &[u32]) -> Result<Fq> {
        Self::check_order(p, e)?;
        let mut m: Vec<u32> = modulus.to_vec();
        if e == 1 {
            m = vec![0, 1];
        }
        if m.len() != e as usize + 1 || m[e as usize] != 1 || m.iter().any(|&c| c >= p) {
            return Err(Error::Config(format!("modulus {modulus:?} is not monic of degree {e} over F_{p}")));
        }
        if e > 1 && !fp_is_irreducible(&m, p) {
            return Err(Error::Config(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        let mut reg = REGISTRY.lock().expect("field registry poisoned");
        if let Some(f) = reg.iter().find(|f| f.p == p && f.modulus == m) {
            return Ok(*f);
        }
        let f: Fq = Box::leak(Box::new(Self::build(p, e, m)));
        reg.push(f);
        Ok(f)
    }

    fn build(p: u32, e: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(e);
        let qs = q as usize;
        let to_vec = |v: u32| -> Vec<u32> {
            let mut c = Vec::with_capacity(e as usize);
            let mut x = v;
            for _ in 0..e {
                c.push(x % p);
                x /= p;
            }
            c
        };
        let from_vec = |c: &[u32]| -> u32 { c.iter().rev().fold(0, |acc, &d| acc * p + d) };
        let mut add = vec![0u16; qs * qs];
        let mut neg = vec![0u16; qs];
        for a in 0..q {
            let ca = to_vec(a);
            neg[a as usize] = from_vec(&ca.iter().map(|&x| (p - x) % p).collect::<Vec<_>>()) as u16;
            for b in 0..q {
                let cb = to_vec(b);
                let s: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = from_vec(&s) as u16;
            }
        }
        let slow_mul = |a: u32, b: u32| -> u32 {
            let mut r = fp_rem(&fp_mul(&to_vec(a), &to_vec(b), p), &modulus, p);
            r.resize(e as usize, 0);
            from_vec(&r)
        };
        // Primitive element: smallest element of multiplicative order q - 1.
        let order = q - 1;
        let mut prime_factors = vec![];
        let mut n = order;
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                prime_factors.push(d);
                while n.is_multiple_of(d) {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            prime_factors.push(n);
        }
        let slow_pow = |b: u32, mut k: u32| -> u32 {
            let mut acc = 1u32;
            let mut base = b;
            while k > 0 {
                if k & 1 == 1 {
                    acc = slow_mul(acc, base);
                }
                base = slow_mul(base, base);
                k >>= 1;
            }
            acc
        };
        let g = (1..q)
            .find(|&g| prime_factors.iter().all(|&r| slow_pow(g, order / r) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u16; 2 * order as usize];
        let mut log = vec![0u32; qs];
        let mut x = 1u32;
        for i in 0..order {
            exp[i as usize] = x as u16;
            exp[(i + order) as usize] = x as u16;
            log[x as usize] = i;
            x = slow_mul(x, g);
        }
        FieldConfig { p, e, q, modulus, add, neg, exp, log }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn elem(&'static self, v: u32) -> FqElem {
        assert!(v < self.q, "element code {v} out of range for F_{}", self.q);
        FqElem { field: self, v: v as u16 }
    }
    pub fn zero(&'static self) -> FqElem {
        self.elem(0)
    }
    pub fn one(&'static self) -> FqElem {
        self.elem(1)
    }
    /// Image of an integer in the prime field.
    pub fn from_int(&'static self, n: i64) -> FqElem {
        self.elem(n.rem_euclid(self.p as i64) as u32)
    }
    /// The generator of F_q^x used for the log tables.
    pub fn primitive(&'static self) -> FqElem {
        self.elem(self.exp[1] as u32)
    }
    /// Element with coordinate vector `c` (length <= e) over F_p.
    pub fn from_coeffs(&'static self, c: &[u32]) -> Result<FqElem> {
        if c.len() > self.e as usize || c.iter().any(|&x| x >= self.p) {
            return Err(Error::Config(format!("{c:?} is not an element of F_{}", self.q)));
        }
        Ok(self.elem(c.iter().rev().fold(0, |acc, &d| acc * self.p + d)))
    }
    /// All elements in increasing code order (0 first).
    pub fn elements(&'static self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(move |v| self.elem(v))
    }
    pub fn nonzero_elements(&'static self) -> impl Iterator<Item = FqElem> {
        (1..self.q).map(move |v| self.elem(v))
    }
    pub fn same(&self, other: &FieldConfig) -> bool {
        std::ptr::eq(self, other)
    }

    /// An F_p-algebra embedding of `self` into `big`, sending the class of
    /// x to the smallest root of `self.modulus` in `big`.
    pub fn embedding_into(&'static self, big: Fq) -> Result<Embedding> {
        if big.p != self.p || !big.e.is_multiple_of(self.e) {
            return Err(Error::Config(format!("F_{} does not embed in F_{}", self.q, big.q)));
        }
        let root = big
            .elements()
            .find(|r| {
                let mut acc = big.zero();
                for &c in self.modulus.iter().rev() {
                    acc = acc * *r + big.from_int(c as i64);
                }
                acc.is_zero()
            })
            .ok_or_else(|| Error::Config("no root of modulus in extension".into()))?;
        let map = self
            .elements()
            .map(|a| {
                let mut acc = big.zero();
                for &c in a.coeffs().iter().rev() {
                    acc = acc * root + big.from_int(c as i64);
                }
                acc.v
            })
            .collect();
        Ok(Embedding { src: self, dst: big, map })
    }
}

/// Returns `(p, e)` with `q = p^e`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut e = 0;
    let mut n = q;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    (n == 1).then_some((p, e))
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub src: Fq,
    pub dst: Fq,
    map: Vec<u16>,
}

impl Embedding {
    pub fn apply(&self, a: FqElem) -> FqElem {
        debug_assert!(a.field.same(self.src));
        FqElem { field: self.dst, v: self.map[a.v as usize] }
    }
}

#[derive(Clone, Copy)]
pub struct FqElem {
    field: Fq,
    v: u16,
}

impl FqElem {
    pub fn field(&self) -> Fq {
        self.field
    }
    /// Integer code `sum c_i p^i`.
    pub fn code(&self) -> u32 {
        self.v as u32
    }
    pub fn coeffs(&self) -> Vec<u32> {
        let f = self.field;
        let mut c = Vec::with_capacity(f.e as usize);
        let mut x = self.v as u32;
        for _ in 0..f.e {
            c.push(x % f.p);
            x /= f.p;
        }
        c
    }
    pub fn is_zero(&self) -> bool {
        self.v == 0
    }
    pub fn is_one(&self) -> bool {
        self.v == 1
    }
    pub fn inv(&self) -> Option<FqElem> {
        if self.v == 0 {
            return None;
        }
        let f = self.field;
        let order = f.q - 1;
        let l = f.log[self.v as usize];
        Some(FqElem { field: f, v: f.exp[((order - l) % order) as usize] })
    }
    pub fn pow(&self, e: u64) -> FqElem {
        let f = self.field;
        if e == 0 {
            return f.one();
        }
        if self.v == 0 {
            return *self;
        }
        let order = (f.q - 1) as u64;
        let l = f.log[self.v as usize] as u64;
        FqElem { field: f, v: f.exp[((l * (e % order)) % order) as usize] }
    }
    /// Discrete log base the field's primitive element.
    pub fn log(&self) -> Option<u32> {
        (self.v != 0).then(|| self.field.log[self.v as usize])
    }
    pub fn frobenius(&self) -> FqElem {
        self.pow(self.field.p as u64)
    }
}

impl PartialEq for FqElem {
    fn eq(&self, o: &Self) -> bool {
        self.v == o.v && self.field.same(o.field)
    }
}
impl Eq for FqElem {}
impl Hash for FqElem {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.v.hash(h)
    }
}
impl PartialOrd for FqElem {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for FqElem {
    fn cmp(&self, o: &Self) -> Ordering {
        self.v.cmp(&o.v)
    }
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.e == 1 {
            write!(f, "{}", self.v)
        } else {
            write!(f, "{:?}", self.coeffs())
        }
    }
}

impl Serialize for FqElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs().serialize(s)
    }
}

impl Add for FqElem {
    type Output = FqElem;
    fn add(self, o: FqElem) -> FqElem {
        let f = self.field;
        FqElem { field: f, v: f.add[self.v as usize * f.q as usize + o.v as usize] }
    }
}
impl Neg for FqElem {
    type Output = FqElem;
    fn neg(self) -> FqElem {
        FqElem { field: self.field, v: self.field.neg[self.v as usize] }
    }
}
impl Sub for FqElem {
    type Output = FqElem;
    fn sub(self, o: FqElem) -> FqElem {
        self + (-o)
    }
}
impl Mul for FqElem {
    type Output = FqElem;
    fn mul(self, o: FqElem) -> FqElem {
        if self.v == 0 || o.v == 0 {
            return FqElem { field: self.field, v: 0 };
        }
        let f = self.field;
        let s = f.log[self.v as usize] + f.log[o.v as usize];
        FqElem { field: f, v: f.exp[s as usize] }
    }
}
impl Div for FqElem {
    type Output = FqElem;
    fn div(self, o: FqElem) -> FqElem {
        self * o.inv().expect("division by zero in F_q")
    }
}

impl Ring for FqElem {
    fn zero_like(&self) -> Self {
        self.field.zero()
    }
    fn one_like(&self) -> Self {
        self.field.one()
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
    fn add_ref(&self, r: &Self) -> Self {
        *self + *r
    }
    fn sub_ref(&self, r: &Self) -> Self {
        *self - *r
    }
    fn mul_ref(&self, r: &Self) -> Self {
        *self * *r
    }
    fn neg_ref(&self) -> Self {
        -*self
    }
    fn from_int_like(&self, n: i64) -> Self {
        self.field.from_int(n)
    }
    fn pow_u(&self, e: u64) -> Self {
        self.pow(e)
    }
}

impl FieldLike for FqElem {
    fn inv_opt(&self) -> Option<Self> {
        self.inv()
    }
}
