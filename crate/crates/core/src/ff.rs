//! Prime fields F_q, the quadratic extension F_{q^2}, and their character groups.
//!
//! A [`Fq`] value is the field context: it owns the lookup tables (inverses,
//! square roots, discrete logarithms) used by everything else in the crate.
//! Scalars are plain residues; [`FieldElem`] and [`ExtFieldElem`] carry their
//! modulus so they can be used on their own.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus the packed `u8` matrix storage can hold.
pub const MAX_MODULUS: u32 = 251;

pub fn is_odd_prime(q: u32) -> bool {
    if q < 3 || q.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// `exp(2πi k / n)`.
pub fn root_of_unity(k: i64, n: u64) -> Complex64 {
    let k = k.rem_euclid(n as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / n as f64)
}

/// An element of F_q.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElem {
    value: u32,
    modulus: u32,
}

impl FieldElem {
    pub fn new(value: i64, modulus: u32) -> Self {
        FieldElem {
            value: value.rem_euclid(modulus as i64) as u32,
            modulus,
        }
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn pow(self, mut e: u64) -> Self {
        let q = self.modulus as u64;
        let mut base = self.value as u64;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        FieldElem {
            value: acc as u32,
            modulus: self.modulus,
        }
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero(self.modulus));
        }
        Ok(self.pow(self.modulus as u64 - 2))
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        self.same_field(rhs)?;
        Ok(self * rhs.inv()?)
    }

    fn same_field(self, rhs: Self) -> Result<()> {
        if self.modulus != rhs.modulus {
            return Err(Error::FieldMismatch(self.modulus, rhs.modulus));
        }
        Ok(())
    }

    /// Legendre symbol: `1` for nonzero squares, `-1` for non-squares, `0` for zero.
    pub fn legendre(self) -> i8 {
        if self.value == 0 {
            return 0;
        }
        if self.pow((self.modulus as u64 - 1) / 2).value == 1 {
            1
        } else {
            -1
        }
    }

    /// The fixed additive character `x ↦ exp(2πi x/q)`.
    pub fn psi0(self) -> Complex64 {
        root_of_unity(self.value as i64, self.modulus as u64)
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(mod {})", self.value, self.modulus)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FieldElem {
    type Output = FieldElem;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        FieldElem {
            value: (self.value + rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Sub for FieldElem {
    type Output = FieldElem;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        FieldElem {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Mul for FieldElem {
    type Output = FieldElem;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        FieldElem {
            value: self.value * rhs.value % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> Self {
        FieldElem {
            value: (self.modulus - self.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
    Inv,
}

/// Applies `op`; unary operations ignore `b`.
pub fn field_arith(a: FieldElem, b: FieldElem, op: ArithOp) -> Result<FieldElem> {
    match op {
        ArithOp::Add | ArithOp::Sub | ArithOp::Mul | ArithOp::Div => a.same_field(b)?,
        ArithOp::Neg | ArithOp::Inv => {}
    }
    match op {
        ArithOp::Add => Ok(a + b),
        ArithOp::Sub => Ok(a - b),
        ArithOp::Mul => Ok(a * b),
        ArithOp::Div => a.checked_div(b),
        ArithOp::Neg => Ok(-a),
        ArithOp::Inv => a.inv(),
    }
}

/// `a + b√δ` in F_{q^2} = F_q(√δ).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtFieldElem {
    pub a: FieldElem,
    pub b: FieldElem,
    pub delta: FieldElem,
}

impl ExtFieldElem {
    pub fn new(a: FieldElem, b: FieldElem, delta: FieldElem) -> Self {
        ExtFieldElem { a, b, delta }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn norm(&self) -> FieldElem {
        self.a * self.a - self.delta * self.b * self.b
    }

    /// Frobenius `x ↦ x^q`, i.e. `a - b√δ`.
    pub fn conj(&self) -> Self {
        ExtFieldElem {
            a: self.a,
            b: -self.b,
            delta: self.delta,
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let one = FieldElem::new(1, self.a.modulus());
        let zero = FieldElem::new(0, self.a.modulus());
        let mut acc = ExtFieldElem::new(one, zero, self.delta);
        let mut base = *self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Dense index `a + q·b` in `[0, q²)`.
    pub fn index(&self) -> usize {
        (self.a.value() + self.a.modulus() * self.b.value()) as usize
    }
}

impl Mul for ExtFieldElem {
    type Output = ExtFieldElem;
    fn mul(self, rhs: Self) -> Self {
        ExtFieldElem {
            a: self.a * rhs.a + self.delta * self.b * rhs.b,
            b: self.a * rhs.b + self.b * rhs.a,
            delta: self.delta,
        }
    }
}

/// Which cyclic group a multiplicative character lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CharGroup {
    /// F_q^×, order q − 1.
    Base,
    /// F_{q²}^×, order q² − 1.
    Ext,
}

/// The character `g^j ↦ exp(2πi·exponent·j/order)` for the fixed generator `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultChar {
    pub group: CharGroup,
    pub exponent: u32,
    pub order: u32,
}

impl MultChar {
    pub fn trivial(group: CharGroup, order: u32) -> Self {
        MultChar {
            group,
            exponent: 0,
            order,
        }
    }

    pub fn product(&self, other: &MultChar) -> MultChar {
        assert_eq!(self.group, other.group);
        MultChar {
            exponent: (self.exponent + other.exponent) % self.order,
            ..*self
        }
    }

    pub fn inverse(&self) -> MultChar {
        MultChar {
            exponent: (self.order - self.exponent) % self.order,
            ..*self
        }
    }

    pub fn power(&self, k: u32) -> MultChar {
        MultChar {
            exponent: (self.exponent as u64 * k as u64 % self.order as u64) as u32,
            ..*self
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    /// Value at the element with discrete logarithm `log`.
    pub fn at_log(&self, log: u32) -> Complex64 {
        root_of_unity(
            (self.exponent as u64 * log as u64 % self.order as u64) as i64,
            self.order as u64,
        )
    }
}

/// Field context for F_q with its quadratic extension.
#[derive(Clone, Debug)]
pub struct Fq {
    q: u32,
    delta: u32,
    inv: Vec<u8>,
    sqrt: Vec<Option<u8>>,
    base_gen: u32,
    base_log: Vec<u32>,
    ext_gen: (u32, u32),
    ext_log: Vec<u32>,
}

impl Fq {
    pub fn new(q: u32) -> Result<Self> {
        if !is_odd_prime(q) {
            return Err(Error::NotOddPrime(q));
        }
        if q > MAX_MODULUS {
            return Err(Error::UnsupportedModulus(q));
        }
        let mut inv = vec![0u8; q as usize];
        let mut sqrt = vec![None; q as usize];
        for x in 0..q {
            for y in 1..q {
                if x * y % q == 1 {
                    inv[x as usize] = y as u8;
                }
            }
            let sq = x * x % q;
            if sqrt[sq as usize].is_none() {
                sqrt[sq as usize] = Some(x as u8);
            }
        }
        let delta = (1..q)
            .find(|&x| sqrt[x as usize].is_none())
            .expect("odd prime field has a non-square");

        let base_gen = (1..q)
            .find(|&g| mult_order(g, q) == q - 1)
            .expect("F_q^× is cyclic");
        let mut base_log = vec![u32::MAX; q as usize];
        let mut x = 1u32;
        for j in 0..q - 1 {
            base_log[x as usize] = j;
            x = x * base_gen % q;
        }

        let e = |a: u32, b: u32| {
            ExtFieldElem::new(
                FieldElem::new(a as i64, q),
                FieldElem::new(b as i64, q),
                FieldElem::new(delta as i64, q),
            )
        };
        let order = q * q - 1;
        let ext_gen = (0..q * q)
            .map(|i| (i % q, i / q))
            .filter(|&(a, b)| a != 0 || b != 0)
            .find(|&(a, b)| ext_order(&e(a, b)) == order)
            .expect("F_{q^2}^× is cyclic");
        let mut ext_log = vec![u32::MAX; (q * q) as usize];
        let g = e(ext_gen.0, ext_gen.1);
        let mut z = e(1, 0);
        for j in 0..order {
            ext_log[z.index()] = j;
            z = z * g;
        }

        Ok(Fq {
            q,
            delta,
            inv,
            sqrt,
            base_gen,
            base_log,
            ext_gen,
            ext_log,
        })
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// The fixed non-square δ with F_{q²} = F_q(√δ).
    pub fn delta(&self) -> u32 {
        self.delta
    }

    pub fn elem(&self, v: i64) -> FieldElem {
        FieldElem::new(v, self.q)
    }

    pub fn ext(&self, a: u32, b: u32) -> ExtFieldElem {
        ExtFieldElem::new(
            self.elem(a as i64),
            self.elem(b as i64),
            self.elem(self.delta as i64),
        )
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.q) as u8
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        ((a as u32 + self.q - b as u32) % self.q) as u8
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        (a as u32 * b as u32 % self.q) as u8
    }

    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        ((self.q - a as u32) % self.q) as u8
    }

    /// Inverse of a nonzero residue; `inv(0)` is `0`.
    #[inline]
    pub fn inv(&self, a: u8) -> u8 {
        self.inv[a as usize]
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u8 {
        v.rem_euclid(self.q as i64) as u8
    }

    pub fn sqrt(&self, a: u8) -> Option<u8> {
        self.sqrt[a as usize]
    }

    pub fn legendre(&self, a: u8) -> i8 {
        if a == 0 {
            0
        } else if self.sqrt[a as usize].is_some() {
            1
        } else {
            -1
        }
    }

    pub fn psi0(&self, x: u8) -> Complex64 {
        root_of_unity(x as i64, self.q as u64)
    }

    /// Generator of F_q^× used for discrete logarithms.
    pub fn base_generator(&self) -> u32 {
        self.base_gen
    }

    pub fn ext_generator(&self) -> ExtFieldElem {
        self.ext(self.ext_gen.0, self.ext_gen.1)
    }

    pub fn log_base(&self, x: u8) -> u32 {
        let l = self.base_log[x as usize];
        debug_assert!(l != u32::MAX, "log of zero");
        l
    }

    pub fn log_ext(&self, z: &ExtFieldElem) -> u32 {
        let l = self.ext_log[z.index()];
        debug_assert!(l != u32::MAX, "log of zero");
        l
    }

    pub fn eval_base(&self, chi: &MultChar, x: u8) -> Complex64 {
        debug_assert_eq!(chi.group, CharGroup::Base);
        chi.at_log(self.log_base(x))
    }

    pub fn eval_ext(&self, chi: &MultChar, z: &ExtFieldElem) -> Complex64 {
        debug_assert_eq!(chi.group, CharGroup::Ext);
        chi.at_log(self.log_ext(z))
    }

    /// Embeds a residue of F_q into F_{q²}.
    pub fn lift(&self, a: u8) -> ExtFieldElem {
        self.ext(a as u32, 0)
    }

    /// Quadratic Gauss sum `Σ_t ψ0(a t²)`; equals `q` at `a = 0`.
    pub fn gauss_sum(&self, a: u8) -> Complex64 {
        (0..self.q)
            .map(|t| self.psi0(self.mul(a, self.mul(t as u8, t as u8))))
            .sum()
    }

    pub fn units(&self) -> impl Iterator<Item = u8> + '_ {
        (1..self.q).map(|x| x as u8)
    }

    pub fn elements(&self) -> impl Iterator<Item = u8> + '_ {
        (0..self.q).map(|x| x as u8)
    }

    pub fn ext_units(&self) -> impl Iterator<Item = ExtFieldElem> + '_ {
        (1..self.q * self.q).map(move |i| self.ext(i % self.q, i / self.q))
    }
}

fn mult_order(g: u32, q: u32) -> u32 {
    let mut x = g % q;
    let mut k = 1;
    while x != 1 {
        x = x * g % q;
        k += 1;
        if k > q {
            return 0;
        }
    }
    k
}

fn ext_order(z: &ExtFieldElem) -> u32 {
    let one = FieldElem::new(1, z.a.modulus());
    let mut x = *z;
    let mut k = 1;
    while !(x.a == one && x.b.is_zero()) {
        x = x * *z;
        k += 1;
    }
    k
}

/// All characters of the chosen cyclic group, indexed by exponent.
pub fn mult_char_table(fq: &Fq, group: CharGroup) -> Vec<MultChar> {
    let q = fq.q();
    let order = match group {
        CharGroup::Base => q - 1,
        CharGroup::Ext => q * q - 1,
    };
    (0..order)
        .map(|exponent| MultChar {
            group,
            exponent,
            order,
        })
        .collect()
}
