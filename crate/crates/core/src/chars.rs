//! Conjugacy classes, class functions, and irreducible character tables of
//! GL2(F_q), SL2(F_q), O2(F_q, C), T2(F_q, C) and L ≅ F_q^× × SL2(F_q).
//!
//! GL2 and SL2 characters are given by closed formulas that can be evaluated
//! at any element; tables are these formulas sampled at class representatives.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{CharGroup, ExtFieldElem, Fq, MultChar};
use crate::matgrp::{self, GroupSet, Mat, Mat2, Mat4, SubgroupName};

pub const ORTHO_TOL: f64 = 1e-9;
pub const INTEGRALITY_TOL: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Classes and class functions.

#[derive(Debug)]
pub struct ClassData<const N: usize> {
    pub group: Arc<GroupSet<N>>,
    pub class_reps: Vec<Mat<N>>,
    pub class_sizes: Vec<usize>,
    /// Class index of each element, by position in `group`.
    pub class_of: Vec<usize>,
}

impl<const N: usize> ClassData<N> {
    pub fn num_classes(&self) -> usize {
        self.class_reps.len()
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn class_index(&self, g: &Mat<N>) -> Option<usize> {
        self.group.index_of(g).map(|i| self.class_of[i])
    }

    pub fn identity_class(&self) -> usize {
        self.class_index(&Mat::identity())
            .expect("identity is in every group")
    }
}

/// Partition by conjugation. Representatives are the least elements of their
/// classes in packed order.
pub fn conjugacy_classes<const N: usize>(fq: &Fq, group: Arc<GroupSet<N>>) -> ClassData<N> {
    let elems = group.elements();
    let inverses: Vec<Mat<N>> = elems
        .iter()
        .map(|g| g.inverse(fq).expect("group elements are invertible"))
        .collect();
    let mut class_of = vec![usize::MAX; elems.len()];
    let mut class_reps = Vec::new();
    let mut class_sizes = Vec::new();
    for (i, x) in elems.iter().enumerate() {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = class_reps.len();
        let mut size = 0;
        for (h, hi) in elems.iter().zip(&inverses) {
            let y = h.mul(x, fq).mul(hi, fq);
            let j = group.index_of(&y).expect("conjugate stays in the group");
            if class_of[j] == usize::MAX {
                class_of[j] = c;
                size += 1;
            }
        }
        class_reps.push(*x);
        class_sizes.push(size);
    }
    ClassData {
        group,
        class_reps,
        class_sizes,
        class_of,
    }
}

#[derive(Clone, Debug)]
pub struct ClassFunction<const N: usize> {
    pub classes: Arc<ClassData<N>>,
    pub values: Vec<Complex64>,
}

impl<const N: usize> ClassFunction<N> {
    pub fn new(classes: Arc<ClassData<N>>, values: Vec<Complex64>) -> Self {
        assert_eq!(classes.num_classes(), values.len());
        ClassFunction { classes, values }
    }

    pub fn from_fn(classes: &Arc<ClassData<N>>, f: impl Fn(&Mat<N>) -> Complex64) -> Self {
        let values = classes.class_reps.iter().map(f).collect();
        ClassFunction {
            classes: classes.clone(),
            values,
        }
    }

    pub fn zero(classes: &Arc<ClassData<N>>) -> Self {
        Self::from_fn(classes, |_| Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, g: &Mat<N>) -> Option<Complex64> {
        self.classes.class_index(g).map(|c| self.values[c])
    }

    pub fn degree(&self) -> Complex64 {
        self.values[self.classes.identity_class()]
    }

    fn same_classes(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.classes, &other.classes)
            || (self.classes.order() == other.classes.order()
                && self.classes.class_reps == other.classes.class_reps)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.same_classes(other) {
            return Err(Error::ClassDataMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ClassFunction::new(self.classes.clone(), values))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ClassFunction::new(
            self.classes.clone(),
            self.values.iter().map(|v| v * s).collect(),
        )
    }

    /// Complex conjugate: the character of the contragredient.
    pub fn conjugate(&self) -> Self {
        ClassFunction::new(
            self.classes.clone(),
            self.values.iter().map(|v| v.conj()).collect(),
        )
    }

    /// Pointwise product: the character of the tensor product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if !self.same_classes(other) {
            return Err(Error::ClassDataMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(ClassFunction::new(self.classes.clone(), values))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if !self.same_classes(other) {
            return Err(Error::ClassDataMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// `⟨f, g⟩ = |G|⁻¹ Σ_x f(x) conj(g(x))`.
pub fn inner_product<const N: usize>(
    f: &ClassFunction<N>,
    g: &ClassFunction<N>,
) -> Result<Complex64> {
    if !f.same_classes(g) {
        return Err(Error::ClassDataMismatch);
    }
    let cd = &f.classes;
    let s: Complex64 = (0..cd.num_classes())
        .map(|c| f.values[c] * g.values[c].conj() * cd.class_sizes[c] as f64)
        .sum();
    Ok(s / cd.order() as f64)
}

/// Frobenius formula `(Ind χ)(g) = Σ_{x ∈ T, x⁻¹gx ∈ H} χ(x⁻¹gx)`.
pub fn induce<const N: usize>(
    fq: &Fq,
    chi: &ClassFunction<N>,
    target: &Arc<ClassData<N>>,
    transversal: &[Mat<N>],
) -> Result<ClassFunction<N>> {
    let h = &chi.classes.group;
    let g = &target.group;
    if transversal.len() * h.order() != g.order() {
        return Err(Error::InvalidTransversal(format!(
            "{} representatives for index {}",
            transversal.len(),
            g.order() / h.order().max(1)
        )));
    }
    if h.iter().any(|x| !g.contains(x)) {
        return Err(Error::InvalidTransversal("H is not contained in G".into()));
    }
    let inv: Vec<Mat<N>> = transversal
        .iter()
        .map(|x| x.inverse(fq))
        .collect::<Result<_>>()?;
    for (i, xi) in inv.iter().enumerate() {
        if !g.contains(&transversal[i]) {
            return Err(Error::InvalidTransversal("representative outside G".into()));
        }
        for y in &transversal[i + 1..] {
            if h.contains(&xi.mul(y, fq)) {
                return Err(Error::InvalidTransversal(
                    "two representatives share a coset".into(),
                ));
            }
        }
    }
    Ok(ClassFunction::from_fn(target, |gg| {
        transversal
            .iter()
            .zip(&inv)
            .filter_map(|(x, xi)| chi.eval(&xi.mul(gg, fq).mul(x, fq)))
            .sum()
    }))
}

pub fn restrict<const N: usize>(
    f: &ClassFunction<N>,
    sub: &Arc<ClassData<N>>,
) -> Result<ClassFunction<N>> {
    let values = sub
        .class_reps
        .iter()
        .map(|x| {
            f.eval(x)
                .ok_or_else(|| Error::NotInGroup(f.classes.group.name().to_string()))
        })
        .collect::<Result<_>>()?;
    Ok(ClassFunction::new(sub.clone(), values))
}

/// Pulls `f` back along a quotient map `G → f's group`.
pub fn inflate<const N: usize, const M: usize>(
    f: &ClassFunction<M>,
    target: &Arc<ClassData<N>>,
    quotient: impl Fn(&Mat<N>) -> Mat<M>,
) -> Result<ClassFunction<N>> {
    let values = target
        .class_reps
        .iter()
        .map(|x| {
            f.eval(&quotient(x))
                .ok_or_else(|| Error::Domain("quotient map leaves the target group".into()))
        })
        .collect::<Result<_>>()?;
    Ok(ClassFunction::new(target.clone(), values))
}

/// `[[ε, 0], [y, d]] ↦ diag(ε, d)`: the quotient O2(F_q, C) → T2(F_q, C).
pub fn o2_to_t2(g: &Mat2) -> Mat2 {
    Mat2 {
        e: [[g.e[0][0], 0], [0, g.e[1][1]]],
    }
}

// ---------------------------------------------------------------------------
// Labels.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gl2Label {
    /// `α ∘ det`.
    Linear { alpha: u32 },
    /// `(α ∘ det) ⊗ St`.
    SteinbergTwist { alpha: u32 },
    /// `Ind_B(α ⊗ β)`, `alpha < beta`.
    Principal { alpha: u32, beta: u32 },
    /// Attached to a regular character θ of F_{q²}^×, canonical exponent `min(k, kq)`.
    Cuspidal { theta: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sl2Label {
    Trivial,
    Steinberg,
    /// Restriction of `Ind_B(χ)` for `χ = (g ↦ ζ^k)` with `1 ≤ k ≤ (q−3)/2`.
    Principal {
        k: u32,
    },
    /// Attached to the character of exponent `k` of μ_{q+1}, `1 ≤ k ≤ (q−1)/2`.
    Cuspidal {
        k: u32,
    },
    Tau1,
    Tau2,
    Tau1Prime,
    Tau2Prime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum O2Label {
    /// `sgn(ε)^sign · μ(d)`, inflated from T2.
    Linear { sign: u8, mu: u32 },
    /// Induced from `{[[ε,0],[y,ε]]}` with character `sgn(ε)^sign ψ0(y/ε)`.
    Induced { sign: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    Gl2(Gl2Label),
    Sl2(Sl2Label),
    O2(O2Label),
    T2 { sign: u8, mu: u32 },
    L { eta: u32, tau: Sl2Label },
}

impl fmt::Display for Gl2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gl2Label::Linear { alpha } => write!(f, "linear({alpha})"),
            Gl2Label::SteinbergTwist { alpha } => write!(f, "steinberg({alpha})"),
            Gl2Label::Principal { alpha, beta } => write!(f, "principal({alpha},{beta})"),
            Gl2Label::Cuspidal { theta } => write!(f, "cuspidal({theta})"),
        }
    }
}

impl fmt::Display for Sl2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sl2Label::Trivial => write!(f, "trivial"),
            Sl2Label::Steinberg => write!(f, "St"),
            Sl2Label::Principal { k } => write!(f, "principal({k})"),
            Sl2Label::Cuspidal { k } => write!(f, "cuspidal({k})"),
            Sl2Label::Tau1 => write!(f, "tau1"),
            Sl2Label::Tau2 => write!(f, "tau2"),
            Sl2Label::Tau1Prime => write!(f, "tau1'"),
            Sl2Label::Tau2Prime => write!(f, "tau2'"),
        }
    }
}

impl fmt::Display for O2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            O2Label::Linear { sign, mu } => write!(f, "linear(sgn^{sign},{mu})"),
            O2Label::Induced { sign } => write!(f, "induced(sgn^{sign})"),
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Gl2(l) => write!(f, "GL2:{l}"),
            IrrepLabel::Sl2(l) => write!(f, "SL2:{l}"),
            IrrepLabel::O2(l) => write!(f, "O2:{l}"),
            IrrepLabel::T2 { sign, mu } => write!(f, "T2:(sgn^{sign},{mu})"),
            IrrepLabel::L { eta, tau } => write!(f, "L:({eta},{tau})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Element classification.

fn base_char(q: u32, alpha: u32) -> MultChar {
    MultChar {
        group: CharGroup::Base,
        exponent: alpha,
        order: q - 1,
    }
}

fn ext_char(q: u32, theta: u32) -> MultChar {
    MultChar {
        group: CharGroup::Ext,
        exponent: theta,
        order: q * q - 1,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gl2Class {
    Central(u8),
    /// Non-semisimple with eigenvalue `a`.
    Parabolic(u8),
    Split(u8, u8),
    /// Eigenvalues `z, z^q` in F_{q²} \ F_q.
    Elliptic(ExtFieldElem),
}

/// Eigenvalue data from trace and determinant.
pub fn classify_gl2(fq: &Fq, g: &Mat2) -> Gl2Class {
    let t = g.trace(fq);
    let d = g.det2(fq);
    let half = fq.inv(2);
    let disc = fq.sub(fq.mul(t, t), fq.mul(4, d));
    if disc == 0 {
        let a = fq.mul(t, half);
        if g.e[0][1] == 0 && g.e[1][0] == 0 && g.e[0][0] == g.e[1][1] {
            Gl2Class::Central(a)
        } else {
            Gl2Class::Parabolic(a)
        }
    } else if let Some(s) = fq.sqrt(disc) {
        Gl2Class::Split(fq.mul(fq.add(t, s), half), fq.mul(fq.sub(t, s), half))
    } else {
        let delta = fq.delta() as u8;
        let b2 = fq.mul(disc, fq.inv(fq.mul(4, delta)));
        let b = fq.sqrt(b2).expect("disc/4δ is a square");
        Gl2Class::Elliptic(fq.ext(fq.mul(t, half) as u32, b as u32))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sl2Class {
    Central(u8),
    /// `z·u` with `z = ±1` and `u ≠ 1` unipotent; `param` determines the class of `u`.
    Unipotent {
        z: u8,
        param: u8,
    },
    Split(u8),
    /// Eigenvalue `ζ ∈ μ_{q+1} \ {±1}`.
    Elliptic(ExtFieldElem),
}

pub fn classify_sl2(fq: &Fq, g: &Mat2) -> Sl2Class {
    match classify_gl2(fq, g) {
        Gl2Class::Central(z) => Sl2Class::Central(z),
        Gl2Class::Parabolic(z) => {
            // u = z·g, u − 1 = [[p, r], [s, −p]]
            let r = fq.mul(z, g.e[0][1]);
            let s = fq.mul(z, g.e[1][0]);
            let param = if r != 0 { r } else { fq.neg(s) };
            Sl2Class::Unipotent { z, param }
        }
        Gl2Class::Split(a, _) => Sl2Class::Split(a),
        Gl2Class::Elliptic(z) => Sl2Class::Elliptic(z),
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl Gl2Label {
    pub fn degree(&self, q: u32) -> u32 {
        match self {
            Gl2Label::Linear { .. } => 1,
            Gl2Label::SteinbergTwist { .. } => q,
            Gl2Label::Principal { .. } => q + 1,
            Gl2Label::Cuspidal { .. } => q - 1,
        }
    }

    pub fn is_cuspidal(&self) -> bool {
        matches!(self, Gl2Label::Cuspidal { .. })
    }

    /// Character value at any `g ∈ GL2(F_q)`.
    pub fn eval(&self, fq: &Fq, g: &Mat2) -> Complex64 {
        self.eval_class(fq, classify_gl2(fq, g))
    }

    pub fn eval_class(&self, fq: &Fq, cls: Gl2Class) -> Complex64 {
        let q = fq.q();
        let qf = q as f64;
        let b = |e: u32, x: u8| fq.eval_base(&base_char(q, e), x);
        let th = |e: u32, z: &ExtFieldElem| fq.eval_ext(&ext_char(q, e), z);
        match *self {
            Gl2Label::Linear { alpha } => match cls {
                Gl2Class::Central(a) | Gl2Class::Parabolic(a) => b(alpha, fq.mul(a, a)),
                Gl2Class::Split(x, y) => b(alpha, fq.mul(x, y)),
                Gl2Class::Elliptic(z) => b(alpha, z.norm().value() as u8),
            },
            Gl2Label::SteinbergTwist { alpha } => match cls {
                Gl2Class::Central(a) => b(alpha, fq.mul(a, a)) * qf,
                Gl2Class::Parabolic(_) => c(0.0),
                Gl2Class::Split(x, y) => b(alpha, fq.mul(x, y)),
                Gl2Class::Elliptic(z) => -b(alpha, z.norm().value() as u8),
            },
            Gl2Label::Principal { alpha, beta } => match cls {
                Gl2Class::Central(a) => b(alpha, a) * b(beta, a) * (qf + 1.0),
                Gl2Class::Parabolic(a) => b(alpha, a) * b(beta, a),
                Gl2Class::Split(x, y) => b(alpha, x) * b(beta, y) + b(alpha, y) * b(beta, x),
                Gl2Class::Elliptic(_) => c(0.0),
            },
            Gl2Label::Cuspidal { theta } => match cls {
                Gl2Class::Central(a) => th(theta, &fq.lift(a)) * (qf - 1.0),
                Gl2Class::Parabolic(a) => -th(theta, &fq.lift(a)),
                Gl2Class::Split(..) => c(0.0),
                Gl2Class::Elliptic(z) => -(th(theta, &z) + th(theta, &z.conj())),
            },
        }
    }
}

/// The quadratic character of μ_{q+1} and other characters of it, via the
/// restriction of F_{q²}^× characters.
fn mu_char(fq: &Fq, k: u32, z: &ExtFieldElem) -> Complex64 {
    fq.eval_ext(&ext_char(fq.q(), k), z)
}

fn legendre_c(fq: &Fq, a: u8) -> Complex64 {
    c(fq.legendre(a) as f64)
}

/// The smallest non-square ν.
pub fn nonsquare(fq: &Fq) -> u8 {
    fq.delta() as u8
}

impl Sl2Label {
    pub fn degree(&self, q: u32) -> u32 {
        match self {
            Sl2Label::Trivial => 1,
            Sl2Label::Steinberg => q,
            Sl2Label::Principal { .. } => q + 1,
            Sl2Label::Cuspidal { .. } => q - 1,
            Sl2Label::Tau1 | Sl2Label::Tau2 => q.div_ceil(2),
            Sl2Label::Tau1Prime | Sl2Label::Tau2Prime => (q - 1) / 2,
        }
    }

    pub fn is_cuspidal(&self) -> bool {
        matches!(
            self,
            Sl2Label::Cuspidal { .. } | Sl2Label::Tau1Prime | Sl2Label::Tau2Prime
        )
    }

    pub fn eval(&self, fq: &Fq, g: &Mat2) -> Complex64 {
        self.eval_class(fq, classify_sl2(fq, g))
    }

    /// Central character value `ω_τ(−1)`.
    pub fn central_sign(&self, fq: &Fq) -> Complex64 {
        let m1 = fq.neg(1);
        self.eval_class(fq, Sl2Class::Central(m1)) / self.degree(fq.q()) as f64
    }

    pub fn eval_class(&self, fq: &Fq, cls: Sl2Class) -> Complex64 {
        let q = fq.q();
        let qf = q as f64;
        let nu = nonsquare(fq);
        let principal = |k: u32, x: u8| fq.eval_base(&base_char(q, k), x);
        // exponent k of F_{q²}^× restricts to the k-th character of μ_{q+1} = ⟨g^(q−1)⟩
        let cusp = |k: u32, z: &ExtFieldElem| mu_char(fq, k, z);
        let theta0 = |z: &ExtFieldElem| cusp(q.div_ceil(2), z);
        let half = |s: f64, x: u8| (fq.gauss_sum(x) + s) * 0.5;
        match *self {
            Sl2Label::Trivial => c(1.0),
            Sl2Label::Steinberg => match cls {
                Sl2Class::Central(_) => c(qf),
                Sl2Class::Unipotent { .. } => c(0.0),
                Sl2Class::Split(_) => c(1.0),
                Sl2Class::Elliptic(_) => c(-1.0),
            },
            Sl2Label::Principal { k } => match cls {
                Sl2Class::Central(z) => principal(k, z) * (qf + 1.0),
                Sl2Class::Unipotent { z, .. } => principal(k, z),
                Sl2Class::Split(a) => principal(k, a) + principal(k, fq.inv(a)),
                Sl2Class::Elliptic(_) => c(0.0),
            },
            Sl2Label::Cuspidal { k } => match cls {
                Sl2Class::Central(z) => cusp(k, &fq.lift(z)) * (qf - 1.0),
                Sl2Class::Unipotent { z, .. } => -cusp(k, &fq.lift(z)),
                Sl2Class::Split(_) => c(0.0),
                Sl2Class::Elliptic(z) => -(cusp(k, &z) + cusp(k, &z.conj())),
            },
            Sl2Label::Tau1 | Sl2Label::Tau2 => {
                let twist = if *self == Sl2Label::Tau1 { 1 } else { nu };
                match cls {
                    Sl2Class::Central(z) => legendre_c(fq, z) * ((qf + 1.0) / 2.0),
                    Sl2Class::Unipotent { z, param } => {
                        legendre_c(fq, z) * half(1.0, fq.mul(twist, param))
                    }
                    Sl2Class::Split(a) => legendre_c(fq, a),
                    Sl2Class::Elliptic(_) => c(0.0),
                }
            }
            Sl2Label::Tau1Prime | Sl2Label::Tau2Prime => {
                let twist = if *self == Sl2Label::Tau1Prime { 1 } else { nu };
                match cls {
                    Sl2Class::Central(z) => theta0(&fq.lift(z)) * ((qf - 1.0) / 2.0),
                    Sl2Class::Unipotent { z, param } => {
                        theta0(&fq.lift(z)) * half(-1.0, fq.mul(twist, param))
                    }
                    Sl2Class::Split(_) => c(0.0),
                    Sl2Class::Elliptic(z) => -theta0(&z),
                }
            }
        }
    }
}

pub fn gl2_labels(q: u32) -> Vec<Gl2Label> {
    let mut out = Vec::new();
    for alpha in 0..q - 1 {
        out.push(Gl2Label::Linear { alpha });
    }
    for alpha in 0..q - 1 {
        out.push(Gl2Label::SteinbergTwist { alpha });
    }
    for alpha in 0..q - 1 {
        for beta in alpha + 1..q - 1 {
            out.push(Gl2Label::Principal { alpha, beta });
        }
    }
    let order = q * q - 1;
    for k in 0..order {
        let kq = k * q % order;
        if kq != k && k < kq {
            out.push(Gl2Label::Cuspidal { theta: k });
        }
    }
    out
}

pub fn sl2_labels(q: u32) -> Vec<Sl2Label> {
    let mut out = vec![Sl2Label::Trivial, Sl2Label::Steinberg];
    for k in 1..=(q - 3) / 2 {
        out.push(Sl2Label::Principal { k });
    }
    for k in 1..=(q - 1) / 2 {
        out.push(Sl2Label::Cuspidal { k });
    }
    out.extend([
        Sl2Label::Tau1,
        Sl2Label::Tau2,
        Sl2Label::Tau1Prime,
        Sl2Label::Tau2Prime,
    ]);
    out
}

pub fn o2_labels(q: u32) -> Vec<O2Label> {
    let mut out = Vec::new();
    for sign in 0..2u8 {
        for mu in 0..q - 1 {
            out.push(O2Label::Linear { sign, mu });
        }
    }
    out.push(O2Label::Induced { sign: 0 });
    out.push(O2Label::Induced { sign: 1 });
    out
}

// ---------------------------------------------------------------------------
// Tables.

#[derive(Clone, Debug)]
pub struct IrrTable<const N: usize> {
    pub group: String,
    pub classes: Arc<ClassData<N>>,
    pub rows: Vec<(IrrepLabel, ClassFunction<N>)>,
}

impl<const N: usize> IrrTable<N> {
    pub fn row(&self, label: &IrrepLabel) -> Option<&ClassFunction<N>> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, f)| f)
    }

    pub fn labels(&self) -> Vec<IrrepLabel> {
        self.rows.iter().map(|(l, _)| *l).collect()
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.rows.iter().map(|(_, f)| f.degree().re).collect()
    }

    /// Inner products of `f` against every row.
    pub fn multiplicities(&self, f: &ClassFunction<N>) -> Result<Vec<Complex64>> {
        self.rows.iter().map(|(_, r)| inner_product(f, r)).collect()
    }

    /// CSV: one row per irreducible; columns are class representatives in hex.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("label");
        for r in &self.classes.class_reps {
            s.push(',');
            s.push_str(&r.hex());
        }
        s.push('\n');
        for (label, f) in &self.rows {
            s.push_str(&format!("\"{label}\""));
            for v in &f.values {
                s.push(',');
                s.push_str(&format_complex(*v));
            }
            s.push('\n');
        }
        s
    }
}

/// Fixed-precision rendering with negative zero suppressed.
pub fn format_complex(v: Complex64) -> String {
    let clean = |x: f64| {
        let r = (x * 1e9).round() / 1e9;
        if r == 0.0 {
            0.0
        } else {
            r
        }
    };
    let (re, im) = (clean(v.re), clean(v.im));
    if im == 0.0 {
        format!("{re:.9}")
    } else {
        format!("{re:.9}{im:+.9}i")
    }
}

/// Group handles shared across tables and the verifier.
#[derive(Debug, Clone)]
pub struct Groups {
    pub gl2: Arc<ClassData<2>>,
    pub sl2: Arc<ClassData<2>>,
    pub o2: Arc<ClassData<2>>,
    pub t2: Arc<ClassData<2>>,
    pub l: Arc<ClassData<4>>,
}

impl Groups {
    pub fn new(fq: &Fq) -> Self {
        let cd2 = |name: SubgroupName, elems: Vec<Mat2>| {
            Arc::new(conjugacy_classes(
                fq,
                Arc::new(GroupSet::from_elements(name, elems)),
            ))
        };
        let l = GroupSet::from_elements(SubgroupName::L, matgrp::l_elements(fq));
        Groups {
            gl2: cd2(SubgroupName::Gl2, matgrp::gl2_elements(fq)),
            sl2: cd2(SubgroupName::Sl2, matgrp::sl2_elements(fq)),
            o2: cd2(SubgroupName::O2C, matgrp::o2c_elements(fq, 1)),
            t2: cd2(SubgroupName::T2C, matgrp::t2c_elements(fq)),
            l: Arc::new(conjugacy_classes(fq, Arc::new(l))),
        }
    }
}

pub fn gl2_irr_table(fq: &Fq, classes: &Arc<ClassData<2>>) -> IrrTable<2> {
    let rows = gl2_labels(fq.q())
        .into_iter()
        .map(|l| {
            (
                IrrepLabel::Gl2(l),
                ClassFunction::from_fn(classes, |g| l.eval(fq, g)),
            )
        })
        .collect();
    IrrTable {
        group: "GL2".into(),
        classes: classes.clone(),
        rows,
    }
}

pub fn sl2_irr_table(fq: &Fq, classes: &Arc<ClassData<2>>) -> IrrTable<2> {
    let rows = sl2_labels(fq.q())
        .into_iter()
        .map(|l| {
            (
                IrrepLabel::Sl2(l),
                ClassFunction::from_fn(classes, |g| l.eval(fq, g)),
            )
        })
        .collect();
    IrrTable {
        group: "SL2".into(),
        classes: classes.clone(),
        rows,
    }
}

fn sign_value(fq: &Fq, sign: u8, eps: u8) -> f64 {
    if sign == 1 && eps == fq.neg(1) {
        -1.0
    } else {
        1.0
    }
}

/// Value of the T2 character `sgn(ε)^sign μ(d)` at `diag(ε, d)`.
pub fn t2_char_value(fq: &Fq, sign: u8, mu: u32, t: &Mat2) -> Complex64 {
    fq.eval_base(&base_char(fq.q(), mu), t.e[1][1]) * sign_value(fq, sign, t.e[0][0])
}

pub fn t2_irr_table(fq: &Fq, classes: &Arc<ClassData<2>>) -> IrrTable<2> {
    let mut rows = Vec::new();
    for sign in 0..2u8 {
        for mu in 0..fq.q() - 1 {
            rows.push((
                IrrepLabel::T2 { sign, mu },
                ClassFunction::from_fn(classes, |t| t2_char_value(fq, sign, mu, t)),
            ));
        }
    }
    IrrTable {
        group: "T2C".into(),
        classes: classes.clone(),
        rows,
    }
}

/// Little-group construction: 2(q−1) inflations from T2 plus two rows induced
/// from `H = {[[ε,0],[y,ε]]}`.
pub fn o2_irr_table(
    fq: &Fq,
    o2: &Arc<ClassData<2>>,
    t2: &Arc<ClassData<2>>,
) -> Result<IrrTable<2>> {
    let t2_table = t2_irr_table(fq, t2);
    let mut rows = Vec::new();
    for (label, f) in &t2_table.rows {
        let IrrepLabel::T2 { sign, mu } = *label else {
            unreachable!()
        };
        rows.push((
            IrrepLabel::O2(O2Label::Linear { sign, mu }),
            inflate(f, o2, o2_to_t2)?,
        ));
    }
    let h = induced_source_group(fq);
    let transversal: Vec<Mat2> = fq
        .units()
        .map(|d| Mat2 {
            e: [[1, 0], [0, d]],
        })
        .collect();
    for sign in 0..2u8 {
        let chi = ClassFunction::from_fn(&h, |g| {
            let eps = g.e[0][0];
            fq.psi0(fq.mul(g.e[1][0], fq.inv(eps))) * sign_value(fq, sign, eps)
        });
        rows.push((
            IrrepLabel::O2(O2Label::Induced { sign }),
            induce(fq, &chi, o2, &transversal)?,
        ));
    }
    Ok(IrrTable {
        group: "O2C".into(),
        classes: o2.clone(),
        rows,
    })
}

fn induced_source_group(fq: &Fq) -> Arc<ClassData<2>> {
    let elems = [1, fq.neg(1)]
        .into_iter()
        .flat_map(|e| {
            fq.elements().map(move |y| Mat2 {
                e: [[e, 0], [y, e]],
            })
        })
        .collect();
    let g = GroupSet::from_elements(SubgroupName::Custom("Z.N11bar".into()), elems);
    Arc::new(conjugacy_classes(fq, Arc::new(g)))
}

/// Value of `η ⊗ τ` at `α(t, A)`.
pub fn l_char_value(fq: &Fq, eta: u32, tau: Sl2Label, g: &Mat4) -> Complex64 {
    let (t, a) = matgrp::klingen_levi_coords(g);
    fq.eval_base(&base_char(fq.q(), eta), t) * tau.eval(fq, &a)
}

pub fn l_irr_table(fq: &Fq, classes: &Arc<ClassData<4>>) -> IrrTable<4> {
    let mut rows = Vec::new();
    for eta in 0..fq.q() - 1 {
        for tau in sl2_labels(fq.q()) {
            rows.push((
                IrrepLabel::L { eta, tau },
                ClassFunction::from_fn(classes, |g| l_char_value(fq, eta, tau, g)),
            ));
        }
    }
    IrrTable {
        group: "L".into(),
        classes: classes.clone(),
        rows,
    }
}

/// Value of a multiplicative character of F_q^× (exponent against the fixed generator).
pub fn base_char_value(fq: &Fq, exponent: u32, x: u8) -> Complex64 {
    fq.eval_base(&base_char(fq.q(), exponent), x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrthogonalityReport {
    pub ok: bool,
    pub max_row_error: f64,
    pub max_column_error: f64,
    pub degree_sum: u64,
    pub group_order: u64,
    /// First offending pair of rows (or of class indices for column failures).
    pub offending: Option<(usize, usize)>,
}

pub fn verify_orthogonality<const N: usize>(table: &IrrTable<N>) -> OrthogonalityReport {
    let cd = &table.classes;
    let n = table.rows.len();
    let mut offending = None;
    let mut max_row: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let ip = inner_product(&table.rows[i].1, &table.rows[j].1).expect("shared classes");
            let err = (ip - if i == j { 1.0 } else { 0.0 }).norm();
            max_row = max_row.max(err);
            if err > ORTHO_TOL && offending.is_none() {
                offending = Some((i, j));
            }
        }
    }
    let mut max_col: f64 = 0.0;
    let k = cd.num_classes();
    for a in 0..k {
        for b in a..k {
            let s: Complex64 = table
                .rows
                .iter()
                .map(|(_, f)| f.values[a] * f.values[b].conj())
                .sum();
            let expect = if a == b {
                cd.order() as f64 / cd.class_sizes[a] as f64
            } else {
                0.0
            };
            let err = (s - expect).norm();
            max_col = max_col.max(err);
            if err > ORTHO_TOL && offending.is_none() {
                offending = Some((a, b));
            }
        }
    }
    let degree_sum: u64 = table
        .rows
        .iter()
        .map(|(_, f)| {
            let d = f.degree().re.round() as u64;
            d * d
        })
        .sum();
    let ok = offending.is_none() && n == k && degree_sum == cd.order() as u64;
    OrthogonalityReport {
        ok,
        max_row_error: max_row,
        max_column_error: max_col,
        degree_sum,
        group_order: cd.order() as u64,
        offending,
    }
}

/// Rounds `z` to a nonnegative integer, or reports an integrality violation.
pub fn round_multiplicity(what: &str, z: Complex64) -> Result<u64> {
    let r = z.re.round();
    if (z - r).norm() > INTEGRALITY_TOL || r < 0.0 {
        return Err(Error::Integrality {
            what: what.into(),
            value: format_complex(z),
            tol: INTEGRALITY_TOL,
        });
    }
    Ok(r as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn class_counts_q3() {
        let fq = f(3);
        let g = Groups::new(&fq);
        assert_eq!(g.gl2.num_classes(), 8);
        assert_eq!(g.sl2.num_classes(), 7);
        assert_eq!(g.o2.num_classes(), 6);
        assert_eq!(g.l.num_classes(), 14);
        assert_eq!(g.gl2.class_sizes.iter().sum::<usize>(), 48);
        for z in [1u8, 2] {
            let c = g.gl2.class_index(&Mat2::scalar(&fq, z)).unwrap();
            assert_eq!(g.gl2.class_sizes[c], 1);
        }
    }

    #[test]
    fn tables_are_orthonormal() {
        for q in [3u32, 5, 7] {
            let fq = f(q);
            let g = Groups::new(&fq);
            let gl2 = gl2_irr_table(&fq, &g.gl2);
            let sl2 = sl2_irr_table(&fq, &g.sl2);
            let o2 = o2_irr_table(&fq, &g.o2, &g.t2).unwrap();
            let t2 = t2_irr_table(&fq, &g.t2);
            let l = l_irr_table(&fq, &g.l);
            assert!(verify_orthogonality(&gl2).ok, "GL2 q={q}");
            assert!(verify_orthogonality(&sl2).ok, "SL2 q={q}");
            assert!(verify_orthogonality(&o2).ok, "O2 q={q}");
            assert!(verify_orthogonality(&t2).ok, "T2 q={q}");
            assert!(verify_orthogonality(&l).ok, "L q={q}");
            assert_eq!(sl2.rows.len() as u32, q + 4);
            assert_eq!(gl2.rows.len() as u32, q * q - 1);
        }
    }

    #[test]
    fn formulas_are_class_functions() {
        for q in [3u32, 5] {
            let fq = f(q);
            let g = Groups::new(&fq);
            for (grp, labels) in [
                (
                    &g.gl2,
                    gl2_labels(q)
                        .into_iter()
                        .map(IrrepLabel::Gl2)
                        .collect::<Vec<_>>(),
                ),
                (
                    &g.sl2,
                    sl2_labels(q).into_iter().map(IrrepLabel::Sl2).collect(),
                ),
            ] {
                for label in labels {
                    for (i, x) in grp.group.iter().enumerate() {
                        let rep = grp.class_reps[grp.class_of[i]];
                        let (a, b) = match label {
                            IrrepLabel::Gl2(l) => (l.eval(&fq, x), l.eval(&fq, &rep)),
                            IrrepLabel::Sl2(l) => (l.eval(&fq, x), l.eval(&fq, &rep)),
                            _ => unreachable!(),
                        };
                        assert!((a - b).norm() < 1e-9, "{label} at {x:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn sl2_dimensions() {
        let fq = f(3);
        let g = Groups::new(&fq);
        let dims: Vec<u32> = sl2_irr_table(&fq, &g.sl2)
            .degrees()
            .iter()
            .map(|d| d.round() as u32)
            .collect();
        assert_eq!(dims, vec![1, 3, 2, 2, 2, 1, 1]);
        let fq = f(5);
        let principal: Vec<_> = sl2_labels(5)
            .into_iter()
            .filter(|l| matches!(l, Sl2Label::Principal { .. }))
            .collect();
        assert_eq!(principal.len(), 1);
        assert_eq!(principal[0].degree(fq.q()), 6);
    }

    #[test]
    fn gl2_family_counts_q3() {
        let labels = gl2_labels(3);
        let count = |p: fn(&Gl2Label) -> bool| labels.iter().filter(|l| p(l)).count();
        assert_eq!(count(|l| matches!(l, Gl2Label::Linear { .. })), 2);
        assert_eq!(count(|l| matches!(l, Gl2Label::SteinbergTwist { .. })), 2);
        assert_eq!(count(|l| matches!(l, Gl2Label::Principal { .. })), 1);
        assert_eq!(count(|l| matches!(l, Gl2Label::Cuspidal { .. })), 3);
    }

    #[test]
    fn borel_induction_on_sl2() {
        let fq = f(5);
        let g = Groups::new(&fq);
        let b = GroupSet::from_elements(
            SubgroupName::Custom("B_SL2".into()),
            matgrp::sl2_elements(&fq)
                .into_iter()
                .filter(|m| m.e[1][0] == 0)
                .collect(),
        );
        let b = Arc::new(conjugacy_classes(&fq, Arc::new(b)));
        let mut transversal: Vec<Mat2> = fq
            .elements()
            .map(|x| Mat2 {
                e: [[1, 0], [x, 1]],
            })
            .collect();
        transversal.push(Mat2::new2(&fq, 0, -1, 1, 0));
        let one = ClassFunction::from_fn(&b, |_| c(1.0));
        let ind = induce(&fq, &one, &g.sl2, &transversal).unwrap();
        let sl2 = sl2_irr_table(&fq, &g.sl2);
        for (label, row) in &sl2.rows {
            let m = inner_product(&ind, row).unwrap();
            let expect = matches!(
                label,
                IrrepLabel::Sl2(Sl2Label::Trivial | Sl2Label::Steinberg)
            );
            assert!(
                (m - if expect { 1.0 } else { 0.0 }).norm() < 1e-9,
                "{label}"
            );
        }
        assert!(induce(&fq, &one, &g.sl2, &transversal[1..]).is_err());
        let mut dup = transversal.clone();
        dup[0] = dup[1];
        assert!(induce(&fq, &one, &g.sl2, &dup).is_err());
    }

    #[test]
    fn frobenius_reciprocity_on_o2() {
        let fq = f(3);
        let g = Groups::new(&fq);
        let o2 = o2_irr_table(&fq, &g.o2, &g.t2).unwrap();
        let t2 = t2_irr_table(&fq, &g.t2);
        let transversal: Vec<Mat2> = fq
            .elements()
            .map(|y| Mat2 {
                e: [[1, 0], [y, 1]],
            })
            .collect();
        for (_, mu) in &t2.rows {
            let ind = induce(&fq, mu, &g.o2, &transversal).unwrap();
            assert!((ind.degree() - c(3.0)).norm() < 1e-12);
            for (_, chi) in &o2.rows {
                let lhs = inner_product(&ind, chi).unwrap();
                let rhs = inner_product(mu, &restrict(chi, &g.t2).unwrap()).unwrap();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
        let one_t2 = &t2.rows[0].1;
        let ind = induce(&fq, one_t2, &g.o2, &transversal).unwrap();
        let one_o2 = inflate(one_t2, &g.o2, o2_to_t2).unwrap();
        assert!((inner_product(&ind, &one_o2).unwrap() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn class_function_ops() {
        let fq = f(3);
        let g = Groups::new(&fq);
        let o2 = o2_irr_table(&fq, &g.o2, &g.t2).unwrap();
        let gl2 = gl2_irr_table(&fq, &g.gl2);
        let nbar: Vec<Mat2> = fq
            .elements()
            .map(|y| Mat2 {
                e: [[1, 0], [y, 1]],
            })
            .collect();
        for (label, row) in &o2.rows {
            if let IrrepLabel::O2(O2Label::Linear { .. }) = label {
                for n in &nbar {
                    assert!((row.eval(n).unwrap() - 1.0).norm() < 1e-12);
                }
                assert!(row.values.iter().all(|v| v.norm() > 0.5));
            }
        }
        let st = gl2
            .row(&IrrepLabel::Gl2(Gl2Label::SteinbergTwist { alpha: 0 }))
            .unwrap();
        let r = restrict(st, &g.o2).unwrap();
        assert!((r.degree() - 3.0).norm() < 1e-12);
        assert!(st.conjugate().max_abs_diff(st).unwrap() < 1e-12);
        let reg = ClassFunction::from_fn(&g.gl2, |x| c(if x.is_identity() { 48.0 } else { 0.0 }));
        let triv = &gl2.rows[0].1;
        assert!((inner_product(&reg, triv).unwrap() - 1.0).norm() < 1e-12);
        assert_eq!(
            inner_product(&reg, &o2.rows[0].1),
            Err(Error::ClassDataMismatch)
        );
        let sq = triv.tensor(triv).unwrap();
        assert!(sq.max_abs_diff(triv).unwrap() < 1e-12);
    }

    #[test]
    fn duplicated_row_fails_orthogonality() {
        let fq = f(3);
        let g = Groups::new(&fq);
        let mut t = gl2_irr_table(&fq, &g.gl2);
        let dup = t.rows[0].clone();
        t.rows[1] = dup;
        let r = verify_orthogonality(&t);
        assert!(!r.ok);
        assert_eq!(r.offending, Some((0, 1)));
    }

    #[test]
    fn values_bounded_and_central_characters() {
        for q in [3u32, 5, 7] {
            let fq = f(q);
            let g = Groups::new(&fq);
            let sl2 = sl2_irr_table(&fq, &g.sl2);
            let gl2 = gl2_irr_table(&fq, &g.gl2);
            for t in [&sl2, &gl2] {
                for (_, row) in &t.rows {
                    let d = row.degree().norm();
                    assert!(row.values.iter().all(|v| v.norm() <= d + 1e-9));
                }
            }
            for label in sl2_labels(q) {
                let w = label.central_sign(&fq);
                assert!(
                    (w.norm() - 1.0).abs() < 1e-9 && w.im.abs() < 1e-9,
                    "{label}"
                );
            }
            let m1 = fq.neg(1);
            assert!((Sl2Label::Tau1.central_sign(&fq).re - fq.legendre(m1) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn csv_dump_is_stable() {
        let fq = f(3);
        let g = Groups::new(&fq);
        let csv = sl2_irr_table(&fq, &g.sl2).to_csv();
        assert_eq!(csv.lines().count(), 8);
        assert!(csv.starts_with("label,"));
        assert_eq!(csv, sl2_irr_table(&fq, &g.sl2).to_csv());
        assert_eq!(format_complex(Complex64::new(-0.0, 1e-15)), "0.000000000");
    }
}
