//! Matrices over F_q, the group Sp4(F_q), and explicit parametrizations of
//! the subgroups used throughout the crate.
//!
//! Coordinates are ordered `(e1, e2, e1∨, e2∨)` and the alternating form is
//! `B(v, w) = ᵗv J w` with `J = [[0, I2], [-I2, 0]]`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cosets::IsotropicSubspace;
use crate::error::{Error, Result};
use crate::ff::Fq;

/// An `N × N` matrix with reduced entries. Equality, hashing and ordering are
/// on the packed entries.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat<const N: usize> {
    pub e: [[u8; N]; N],
}

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;
pub type Vec4 = [u8; 4];

impl<const N: usize> Mat<N> {
    pub fn zero() -> Self {
        Mat { e: [[0; N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.e[i][i] = 1;
        }
        m
    }

    pub fn from_rows(fq: &Fq, rows: [[i64; N]; N]) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.e[i][j] = fq.reduce(rows[i][j]);
            }
        }
        m
    }

    pub fn scalar(fq: &Fq, s: u8) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.e[i][i] = s % fq.q() as u8;
        }
        m
    }

    #[inline]
    pub fn mul(&self, rhs: &Self, fq: &Fq) -> Self {
        let q = fq.q();
        let mut out = [[0u8; N]; N];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                let mut acc = 0u32;
                for k in 0..N {
                    acc += self.e[i][k] as u32 * rhs.e[k][j] as u32;
                }
                *cell = (acc % q) as u8;
            }
        }
        Mat { e: out }
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.e[i][j] = self.e[j][i];
            }
        }
        m
    }

    pub fn neg(&self, fq: &Fq) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for x in row.iter_mut() {
                *x = fq.neg(*x);
            }
        }
        m
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Inverse by Gauss–Jordan elimination.
    pub fn inverse(&self, fq: &Fq) -> Result<Self> {
        let mut a = self.e;
        let mut inv = Self::identity().e;
        for col in 0..N {
            let pivot = (col..N).find(|&r| a[r][col] != 0).ok_or(Error::Singular)?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let s = fq.inv(a[col][col]);
            for j in 0..N {
                a[col][j] = fq.mul(a[col][j], s);
                inv[col][j] = fq.mul(inv[col][j], s);
            }
            for r in 0..N {
                if r != col && a[r][col] != 0 {
                    let f = a[r][col];
                    for j in 0..N {
                        a[r][j] = fq.sub(a[r][j], fq.mul(f, a[col][j]));
                        inv[r][j] = fq.sub(inv[r][j], fq.mul(f, inv[col][j]));
                    }
                }
            }
        }
        Ok(Mat { e: inv })
    }

    pub fn det(&self, fq: &Fq) -> u8 {
        let mut a = self.e;
        let mut det = 1u8;
        for col in 0..N {
            let Some(pivot) = (col..N).find(|&r| a[r][col] != 0) else {
                return 0;
            };
            if pivot != col {
                a.swap(col, pivot);
                det = fq.neg(det);
            }
            det = fq.mul(det, a[col][col]);
            let s = fq.inv(a[col][col]);
            for r in col + 1..N {
                if a[r][col] != 0 {
                    let f = fq.mul(a[r][col], s);
                    for j in col..N {
                        a[r][j] = fq.sub(a[r][j], fq.mul(f, a[col][j]));
                    }
                }
            }
        }
        det
    }

    pub fn apply(&self, v: &[u8; N], fq: &Fq) -> [u8; N] {
        let mut out = [0u8; N];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0u32;
            for k in 0..N {
                acc += self.e[i][k] as u32 * v[k] as u32;
            }
            *o = (acc % fq.q()) as u8;
        }
        out
    }

    pub fn conjugate_by(&self, g: &Self, g_inv: &Self, fq: &Fq) -> Self {
        g.mul(self, fq).mul(g_inv, fq)
    }

    /// Packed entries as lowercase hex, row-major.
    pub fn hex(&self) -> String {
        let mut s = String::with_capacity(2 * N * N);
        for row in &self.e {
            for x in row {
                s.push_str(&format!("{x:02x}"));
            }
        }
        s
    }

    pub fn from_hex(hex: &str, fq: &Fq) -> Result<Self> {
        if hex.len() != 2 * N * N {
            return Err(Error::Domain(format!("bad matrix encoding `{hex}`")));
        }
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                let k = 2 * (i * N + j);
                let v = u8::from_str_radix(&hex[k..k + 2], 16)
                    .map_err(|_| Error::Domain(format!("bad matrix encoding `{hex}`")))?;
                if v as u32 >= fq.q() {
                    return Err(Error::Domain(format!(
                        "entry {v} not reduced mod {}",
                        fq.q()
                    )));
                }
                m.e[i][j] = v;
            }
        }
        Ok(m)
    }
}

impl<const N: usize> fmt::Debug for Mat<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.e.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
        }
        write!(f, "]")
    }
}

impl Mat2 {
    pub fn new2(fq: &Fq, a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat::from_rows(fq, [[a, b], [c, d]])
    }

    pub fn det2(&self, fq: &Fq) -> u8 {
        fq.sub(
            fq.mul(self.e[0][0], self.e[1][1]),
            fq.mul(self.e[0][1], self.e[1][0]),
        )
    }

    pub fn inverse2(&self, fq: &Fq) -> Result<Self> {
        let d = self.det2(fq);
        if d == 0 {
            return Err(Error::Singular);
        }
        let s = fq.inv(d);
        let [[a, b], [c, e]] = self.e;
        Ok(Mat {
            e: [
                [fq.mul(e, s), fq.mul(fq.neg(b), s)],
                [fq.mul(fq.neg(c), s), fq.mul(a, s)],
            ],
        })
    }

    pub fn trace(&self, fq: &Fq) -> u8 {
        fq.add(self.e[0][0], self.e[1][1])
    }
}

/// Builds a 4×4 matrix from 2×2 blocks `[[a, b], [c, d]]`.
pub fn blocks(a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Mat4 {
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            m.e[i][j] = a.e[i][j];
            m.e[i][j + 2] = b.e[i][j];
            m.e[i + 2][j] = c.e[i][j];
            m.e[i + 2][j + 2] = d.e[i][j];
        }
    }
    m
}

/// Block `(bi, bj)` of a 4×4 matrix, each index in `{0, 1}`.
pub fn block(m: &Mat4, bi: usize, bj: usize) -> Mat2 {
    let mut out = Mat2::zero();
    for i in 0..2 {
        for j in 0..2 {
            out.e[i][j] = m.e[2 * bi + i][2 * bj + j];
        }
    }
    out
}

pub fn j_matrix(fq: &Fq) -> Mat4 {
    Mat4::from_rows(
        fq,
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]],
    )
}

/// `B(v, w) = ᵗv J w = v0 w2 + v1 w3 - v2 w0 - v3 w1`.
pub fn form(fq: &Fq, v: &Vec4, w: &Vec4) -> u8 {
    let pos = v[0] as u32 * w[2] as u32 + v[1] as u32 * w[3] as u32;
    let neg = v[2] as u32 * w[0] as u32 + v[3] as u32 * w[1] as u32;
    fq.sub((pos % fq.q()) as u8, (neg % fq.q()) as u8)
}

pub fn is_symplectic(fq: &Fq, g: &Mat4) -> bool {
    let j = j_matrix(fq);
    g.transpose().mul(&j, fq).mul(g, fq) == j
}

/// Inverse of a symplectic matrix, `g⁻¹ = -J ᵗg J`.
pub fn sp_inverse(fq: &Fq, g: &Mat4) -> Mat4 {
    let j = j_matrix(fq);
    j.mul(&g.transpose(), fq).mul(&j, fq).neg(fq)
}

// ---------------------------------------------------------------------------
// Membership predicates (all assume nothing beyond reduced entries).

fn lower_left_zero(g: &Mat4) -> bool {
    g.e[2][0] == 0 && g.e[2][1] == 0 && g.e[3][0] == 0 && g.e[3][1] == 0
}

/// Siegel parabolic: symplectic with vanishing lower-left block.
pub fn in_p(fq: &Fq, g: &Mat4) -> bool {
    lower_left_zero(g) && is_symplectic(fq, g)
}

pub fn in_m(fq: &Fq, g: &Mat4) -> bool {
    in_p(fq, g) && g.e[0][2] == 0 && g.e[0][3] == 0 && g.e[1][2] == 0 && g.e[1][3] == 0
}

pub fn in_n(fq: &Fq, g: &Mat4) -> bool {
    in_p(fq, g) && block(g, 0, 0).is_identity() && block(g, 1, 1).is_identity()
}

/// Klingen parabolic: the stabilizer of the line `⟨e1⟩`.
pub fn in_q(fq: &Fq, g: &Mat4) -> bool {
    g.e[1][0] == 0 && g.e[2][0] == 0 && g.e[3][0] == 0 && is_symplectic(fq, g)
}

pub fn in_l(fq: &Fq, g: &Mat4) -> bool {
    in_q(fq, g)
        && g.e[0][1] == 0
        && g.e[0][2] == 0
        && g.e[0][3] == 0
        && g.e[1][2] == 0
        && g.e[3][2] == 0
}

pub fn in_u(fq: &Fq, g: &Mat4) -> bool {
    in_q(fq, g)
        && g.e[0][0] == 1
        && g.e[1][1] == 1
        && g.e[1][3] == 0
        && g.e[3][1] == 0
        && g.e[3][3] == 1
}

/// `g ∈ O2(F_q, C)`, i.e. `g = [[±1, 0], [y, d]]` with `d ≠ 0`.
pub fn in_o2c(fq: &Fq, g: &Mat2) -> bool {
    let a = g.e[0][0];
    (a == 1 || a == fq.neg(1)) && g.e[0][1] == 0 && g.e[1][1] != 0
}

/// `ᵗg C g = C` for `C = diag(γ, 0)`.
pub fn preserves_c(fq: &Fq, g: &Mat2, gamma: u8) -> bool {
    let c = Mat2::from_rows(fq, [[gamma as i64, 0], [0, 0]]);
    g.transpose().mul(&c, fq).mul(g, fq) == c
}

pub fn in_spsi(fq: &Fq, g: &Mat4) -> bool {
    in_p(fq, g) && in_o2c(fq, &block(g, 0, 0))
}

pub fn in_mpsi(fq: &Fq, g: &Mat4) -> bool {
    in_m(fq, g) && in_o2c(fq, &block(g, 0, 0))
}

// ---------------------------------------------------------------------------
// Embeddings and Weyl-type elements.

/// `α(t, A)`: the Klingen Levi embedding of F_q^× × SL2(F_q).
pub fn embed_alpha(fq: &Fq, t: u8, a: &Mat2) -> Result<Mat4> {
    if t == 0 {
        return Err(Error::Domain("α requires t ≠ 0".into()));
    }
    let d = a.det2(fq);
    if d != 1 {
        return Err(Error::NotSpecialLinear(d as u32));
    }
    Ok(alpha_unchecked(fq, t, a))
}

pub(crate) fn alpha_unchecked(fq: &Fq, t: u8, a: &Mat2) -> Mat4 {
    let mut m = Mat4::zero();
    m.e[0][0] = t;
    m.e[2][2] = fq.inv(t);
    m.e[1][1] = a.e[0][0];
    m.e[1][3] = a.e[0][1];
    m.e[3][1] = a.e[1][0];
    m.e[3][3] = a.e[1][1];
    m
}

/// `β(g) = diag(g, ᵗg⁻¹)`: the Siegel Levi embedding of GL2(F_q).
pub fn embed_beta(fq: &Fq, g: &Mat2) -> Result<Mat4> {
    let gi = g.inverse2(fq)?;
    Ok(blocks(g, &Mat2::zero(), &Mat2::zero(), &gi.transpose()))
}

pub(crate) fn beta_unchecked(fq: &Fq, g: &Mat2) -> Mat4 {
    embed_beta(fq, g).expect("β applied to a singular matrix")
}

/// `[[I, X], [0, I]]` for symmetric `X = [[x, y], [y, z]]`.
pub fn n_elem(fq: &Fq, x: u8, y: u8, z: u8) -> Mat4 {
    let xm = Mat2 {
        e: [[x, y], [y, z]],
    };
    blocks(&Mat2::identity(), &xm, &Mat2::zero(), &Mat2::identity()).mul(&Mat4::identity(), fq)
}

/// Element of the Klingen unipotent radical U.
pub fn u_elem(fq: &Fq, x: u8, y: u8, z: u8) -> Mat4 {
    let mut m = Mat4::identity();
    m.e[0][1] = x;
    m.e[0][2] = y;
    m.e[0][3] = z;
    m.e[1][2] = z;
    m.e[3][2] = fq.neg(x);
    m
}

pub fn sigma1(fq: &Fq) -> Mat4 {
    Mat4::from_rows(
        fq,
        [[0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1]],
    )
}

pub fn sigma2(fq: &Fq) -> Mat4 {
    Mat4::from_rows(
        fq,
        [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]],
    )
}

/// `h1 = [[0, 1], [1, 0]]`.
pub fn h1_swap(fq: &Fq) -> Mat2 {
    Mat2::new2(fq, 0, 1, 1, 0)
}

/// `τ1 = β(h1)`.
pub fn tau1(fq: &Fq) -> Mat4 {
    beta_unchecked(fq, &h1_swap(fq))
}

/// The Siegel double coset elements `σ0 = I, σ1, σ2`.
pub fn sigma(fq: &Fq, j: usize) -> Mat4 {
    match j {
        0 => Mat4::identity(),
        1 => sigma1(fq),
        2 => sigma2(fq),
        _ => panic!("σ_j only defined for j ≤ 2"),
    }
}

/// The Klingen double coset elements `w0 = I, w1 = σ1` (n = 2, k = 1).
pub fn weyl_w(fq: &Fq, j: usize) -> Mat4 {
    match j {
        0 => Mat4::identity(),
        1 => sigma1(fq),
        _ => panic!("w_j only defined for j ≤ 1"),
    }
}

// ---------------------------------------------------------------------------
// Levi factorization.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parabolic {
    Siegel,
    Klingen,
}

impl fmt::Display for Parabolic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parabolic::Siegel => write!(f, "siegel"),
            Parabolic::Klingen => write!(f, "klingen"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeviCoords {
    Siegel { g: Mat2, unipotent: Mat4 },
    Klingen { t: u8, a: Mat2, unipotent: Mat4 },
}

impl LeviCoords {
    pub fn unipotent(&self) -> &Mat4 {
        match self {
            LeviCoords::Siegel { unipotent, .. } | LeviCoords::Klingen { unipotent, .. } => {
                unipotent
            }
        }
    }

    pub fn levi_matrix(&self, fq: &Fq) -> Mat4 {
        match self {
            LeviCoords::Siegel { g, .. } => beta_unchecked(fq, g),
            LeviCoords::Klingen { t, a, .. } => alpha_unchecked(fq, *t, a),
        }
    }

    /// `(Levi)·(unipotent)`.
    pub fn reassemble(&self, fq: &Fq) -> Mat4 {
        self.levi_matrix(fq).mul(self.unipotent(), fq)
    }
}

/// Factors `p = (Levi part)·(unipotent part)`.
pub fn levi_part(fq: &Fq, p: &Mat4, parabolic: Parabolic) -> Result<LeviCoords> {
    match parabolic {
        Parabolic::Siegel => {
            if !in_p(fq, p) {
                return Err(Error::NotInGroup("P".into()));
            }
            let g = block(p, 0, 0);
            let unipotent = sp_inverse(fq, &beta_unchecked(fq, &g)).mul(p, fq);
            debug_assert!(in_n(fq, &unipotent));
            Ok(LeviCoords::Siegel { g, unipotent })
        }
        Parabolic::Klingen => {
            if !in_q(fq, p) {
                return Err(Error::NotInGroup("Q".into()));
            }
            let (t, a) = klingen_levi_coords(p);
            let unipotent = sp_inverse(fq, &alpha_unchecked(fq, t, &a)).mul(p, fq);
            debug_assert!(in_u(fq, &unipotent));
            Ok(LeviCoords::Klingen { t, a, unipotent })
        }
    }
}

/// Levi coordinates `(t, A)` of an element already known to lie in Q.
#[inline]
pub fn klingen_levi_coords(p: &Mat4) -> (u8, Mat2) {
    (
        p.e[0][0],
        Mat2 {
            e: [[p.e[1][1], p.e[1][3]], [p.e[3][1], p.e[3][3]]],
        },
    )
}

/// GL2 Levi block of an element already known to lie in P.
#[inline]
pub fn siegel_levi_coords(p: &Mat4) -> Mat2 {
    block(p, 0, 0)
}

// ---------------------------------------------------------------------------
// Symplectic section of Λ(k).

fn vec_from_index(fq: &Fq, mut i: u32) -> Vec4 {
    let q = fq.q();
    let mut v = [0u8; 4];
    for x in v.iter_mut() {
        *x = (i % q) as u8;
        i /= q;
    }
    v
}

fn in_span(fq: &Fq, v: &Vec4, basis: &[Vec4]) -> bool {
    let mut rows: Vec<Vec4> = basis.to_vec();
    let r0 = crate::cosets::rank(fq, &rows);
    rows.push(*v);
    crate::cosets::rank(fq, &rows) == r0
}

/// Returns `g ∈ Sp4(F_q)` with `g(X0) = X`, `X0 = ⟨e1, …, e_k⟩`, by completing
/// the echelon basis of `X` to a symplectic basis. Candidates are scanned in
/// the order of the index `v0 + q v1 + q² v2 + q³ v3`, which maps `X0` to `I4`.
pub fn symplectic_section(fq: &Fq, x: &IsotropicSubspace) -> Result<Mat4> {
    let basis = x.basis();
    for v in basis {
        for w in basis {
            if form(fq, v, w) != 0 {
                return Err(Error::NotIsotropic);
            }
        }
    }
    let total = fq.q().pow(4);
    let first = |pred: &dyn Fn(&Vec4) -> bool| -> Vec4 {
        (1..total)
            .map(|i| vec_from_index(fq, i))
            .find(|v| pred(v))
            .expect("symplectic completion exists")
    };
    let (f1, f2) = match basis.len() {
        2 => (basis[0], basis[1]),
        1 => {
            let f1 = basis[0];
            let f2 = first(&|v| form(fq, &f1, v) == 0 && !in_span(fq, v, &[f1]));
            (f1, f2)
        }
        k => return Err(Error::BadDimension(k)),
    };
    let f1d = first(&|v| form(fq, &f1, v) == 1 && form(fq, &f2, v) == 0);
    let f2d = first(&|v| form(fq, &f1, v) == 0 && form(fq, &f2, v) == 1 && form(fq, &f1d, v) == 0);
    let mut g = Mat4::zero();
    for (col, v) in [f1, f2, f1d, f2d].iter().enumerate() {
        for row in 0..4 {
            g.e[row][col] = v[row];
        }
    }
    debug_assert!(is_symplectic(fq, &g));
    Ok(g)
}

// ---------------------------------------------------------------------------
// Enumerated groups.

/// Labels for the subgroups the crate knows how to enumerate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubgroupName {
    Sp4,
    P,
    M,
    N,
    Q,
    L,
    U,
    Spsi,
    Mpsi,
    O2C,
    T2C,
    B,
    Bbar,
    N11,
    N11bar,
    N0,
    N1,
    N2,
    N3,
    N4,
    M1,
    M2,
    M3,
    D0,
    D1,
    H1,
    Gl2,
    Sl2,
    Custom(String),
}

impl SubgroupName {
    pub const CATALOG: [&'static str; 26] = [
        "Sp4", "P", "M", "N", "Q", "L", "U", "Spsi", "Mpsi", "O2C", "T2C", "B", "Bbar", "N11",
        "N11bar", "N0", "N1", "N2", "N3", "N4", "M1", "M2", "M3", "D0", "D1", "H1",
    ];

    /// Whether the group consists of 2×2 matrices.
    pub fn is_gl2_level(&self) -> bool {
        matches!(
            self,
            SubgroupName::O2C
                | SubgroupName::T2C
                | SubgroupName::B
                | SubgroupName::Bbar
                | SubgroupName::N11
                | SubgroupName::N11bar
                | SubgroupName::Gl2
                | SubgroupName::Sl2
        )
    }
}

impl fmt::Display for SubgroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupName::Custom(s) => write!(f, "{s}"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for SubgroupName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "Sp4" => SubgroupName::Sp4,
            "P" => SubgroupName::P,
            "M" => SubgroupName::M,
            "N" => SubgroupName::N,
            "Q" => SubgroupName::Q,
            "L" => SubgroupName::L,
            "U" => SubgroupName::U,
            "Spsi" => SubgroupName::Spsi,
            "Mpsi" => SubgroupName::Mpsi,
            "O2C" => SubgroupName::O2C,
            "T2C" => SubgroupName::T2C,
            "B" => SubgroupName::B,
            "Bbar" => SubgroupName::Bbar,
            "N11" => SubgroupName::N11,
            "N11bar" => SubgroupName::N11bar,
            "N0" => SubgroupName::N0,
            "N1" => SubgroupName::N1,
            "N2" => SubgroupName::N2,
            "N3" => SubgroupName::N3,
            "N4" => SubgroupName::N4,
            "M1" => SubgroupName::M1,
            "M2" => SubgroupName::M2,
            "M3" => SubgroupName::M3,
            "D0" => SubgroupName::D0,
            "D1" => SubgroupName::D1,
            "H1" => SubgroupName::H1,
            "GL2" | "Gl2" => SubgroupName::Gl2,
            "SL2" | "Sl2" => SubgroupName::Sl2,
            other => return Err(Error::UnknownSubgroup(other.to_string())),
        })
    }
}

/// An exhaustively enumerated matrix group with canonical (sorted) order.
#[derive(Clone, Debug)]
pub struct GroupSet<const N: usize> {
    name: SubgroupName,
    elements: Vec<Mat<N>>,
    index: HashMap<Mat<N>, usize>,
}

impl<const N: usize> GroupSet<N> {
    /// Deduplicates and sorts; does not check the group axioms.
    pub fn from_elements(name: SubgroupName, mut elements: Vec<Mat<N>>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let index = elements.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        GroupSet {
            name,
            elements,
            index,
        }
    }

    /// Closure of `generators` under multiplication.
    pub fn generated_by(name: SubgroupName, generators: &[Mat<N>], fq: &Fq) -> Self {
        let mut seen: HashMap<Mat<N>, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        let id = Mat::<N>::identity();
        seen.insert(id, ());
        queue.push_back(id);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = x.mul(g, fq);
                if seen.insert(y, ()).is_none() {
                    queue.push_back(y);
                }
            }
        }
        Self::from_elements(name, seen.into_keys().collect())
    }

    pub fn name(&self) -> &SubgroupName {
        &self.name
    }

    pub fn elements(&self) -> &[Mat<N>] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Mat<N>) -> bool {
        self.index.contains_key(g)
    }

    pub fn index_of(&self, g: &Mat<N>) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Mat<N>> {
        self.elements.iter()
    }

    /// Checks identity, products and inverses over all pairs.
    pub fn check_group_axioms(&self, fq: &Fq) -> bool {
        if !self.contains(&Mat::identity()) {
            return false;
        }
        self.elements.iter().all(|a| {
            a.inverse(fq).map(|ai| self.contains(&ai)).unwrap_or(false)
                && self.elements.iter().all(|b| self.contains(&a.mul(b, fq)))
        })
    }

    /// Checks identity, all inverses, and `samples` random products.
    pub fn check_group_axioms_sampled<R: Rng>(&self, fq: &Fq, samples: usize, rng: &mut R) -> bool {
        if !self.contains(&Mat::identity()) {
            return false;
        }
        let inverses = self
            .elements
            .iter()
            .all(|a| a.inverse(fq).map(|ai| self.contains(&ai)).unwrap_or(false));
        let n = self.order();
        inverses
            && (0..samples).all(|_| {
                let a = &self.elements[rng.gen_range(0..n)];
                let b = &self.elements[rng.gen_range(0..n)];
                self.contains(&a.mul(b, fq))
            })
    }
}

/// A catalog group at whichever matrix size it naturally lives in.
#[derive(Clone, Debug)]
pub enum NamedGroup {
    Gl2Level(GroupSet<2>),
    Sp4Level(GroupSet<4>),
}

impl NamedGroup {
    pub fn order(&self) -> usize {
        match self {
            NamedGroup::Gl2Level(g) => g.order(),
            NamedGroup::Sp4Level(g) => g.order(),
        }
    }

    pub fn as_sp4(&self) -> Option<&GroupSet<4>> {
        match self {
            NamedGroup::Sp4Level(g) => Some(g),
            NamedGroup::Gl2Level(_) => None,
        }
    }

    pub fn as_gl2(&self) -> Option<&GroupSet<2>> {
        match self {
            NamedGroup::Gl2Level(g) => Some(g),
            NamedGroup::Sp4Level(_) => None,
        }
    }
}

/// Parameters for catalog groups; only `Spsi`/`Mpsi` read `gamma`.
#[derive(Clone, Copy, Debug)]
pub struct GroupParams {
    pub gamma: u8,
    /// Allow enumeration of Sp4 itself.
    pub oracle: bool,
}

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            gamma: 1,
            oracle: false,
        }
    }
}

pub fn gl2_elements(fq: &Fq) -> Vec<Mat2> {
    all_mat2(fq).filter(|m| m.det2(fq) != 0).collect()
}

pub fn sl2_elements(fq: &Fq) -> Vec<Mat2> {
    all_mat2(fq).filter(|m| m.det2(fq) == 1).collect()
}

fn all_mat2(fq: &Fq) -> impl Iterator<Item = Mat2> + '_ {
    let q = fq.q() as u8;
    (0..q).flat_map(move |a| {
        (0..q).flat_map(move |b| {
            (0..q).flat_map(move |c| {
                (0..q).map(move |d| Mat2 {
                    e: [[a, b], [c, d]],
                })
            })
        })
    })
}

/// `{g ∈ GL2 : ᵗg C g = C}` for `C = diag(γ, 0)`.
pub fn o2c_elements(fq: &Fq, gamma: u8) -> Vec<Mat2> {
    all_mat2(fq)
        .filter(|m| m.det2(fq) != 0 && preserves_c(fq, m, gamma))
        .collect()
}

fn signs(fq: &Fq) -> [u8; 2] {
    [1, fq.neg(1)]
}

pub fn t2c_elements(fq: &Fq) -> Vec<Mat2> {
    signs(fq)
        .into_iter()
        .flat_map(|e| {
            fq.units().map(move |d| Mat2 {
                e: [[e, 0], [0, d]],
            })
        })
        .collect()
}

pub fn n_elements(fq: &Fq) -> Vec<Mat4> {
    let mut out = Vec::new();
    for x in fq.elements() {
        for y in fq.elements() {
            for z in fq.elements() {
                out.push(n_elem(fq, x, y, z));
            }
        }
    }
    out
}

pub fn u_elements(fq: &Fq) -> Vec<Mat4> {
    let mut out = Vec::new();
    for x in fq.elements() {
        for y in fq.elements() {
            for z in fq.elements() {
                out.push(u_elem(fq, x, y, z));
            }
        }
    }
    out
}

fn products(fq: &Fq, a: &[Mat4], b: &[Mat4]) -> Vec<Mat4> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x.mul(y, fq));
        }
    }
    out
}

pub fn m_elements(fq: &Fq) -> Vec<Mat4> {
    gl2_elements(fq)
        .iter()
        .map(|g| beta_unchecked(fq, g))
        .collect()
}

pub fn l_elements(fq: &Fq) -> Vec<Mat4> {
    let sl2 = sl2_elements(fq);
    fq.units()
        .flat_map(|t| sl2.iter().map(move |a| (t, *a)))
        .map(|(t, a)| alpha_unchecked(fq, t, &a))
        .collect()
}

pub fn mpsi_elements(fq: &Fq, gamma: u8) -> Vec<Mat4> {
    o2c_elements(fq, gamma)
        .iter()
        .map(|g| beta_unchecked(fq, g))
        .collect()
}

fn diag4(fq: &Fq, a: u8, d: u8) -> Mat4 {
    let mut m = Mat4::zero();
    m.e[0][0] = a;
    m.e[1][1] = d;
    m.e[2][2] = fq.inv(a);
    m.e[3][3] = fq.inv(d);
    m
}

/// Generators of Sp4(F_q): generators of M and N together with σ2.
pub fn sp4_generators(fq: &Fq) -> Vec<Mat4> {
    let g = fq.base_generator() as i64;
    let gl2_gens = [
        Mat2::new2(fq, g, 0, 0, 1),
        Mat2::new2(fq, 1, 1, 0, 1),
        Mat2::new2(fq, 0, 1, 1, 0),
    ];
    let mut gens: Vec<Mat4> = gl2_gens.iter().map(|m| beta_unchecked(fq, m)).collect();
    gens.push(n_elem(fq, 1, 0, 0));
    gens.push(sigma2(fq));
    gens
}

pub fn sp4_order(q: u64) -> u64 {
    q.pow(4) * (q * q - 1) * (q.pow(4) - 1)
}

/// Enumerates a catalog group by direct parametrization.
pub fn named_subgroup(fq: &Fq, name: &SubgroupName, params: GroupParams) -> Result<NamedGroup> {
    use SubgroupName as S;
    let q = fq.q() as u8;
    let gl = |v: Vec<Mat2>| {
        Ok(NamedGroup::Gl2Level(GroupSet::from_elements(
            name.clone(),
            v,
        )))
    };
    let sp = |v: Vec<Mat4>| {
        Ok(NamedGroup::Sp4Level(GroupSet::from_elements(
            name.clone(),
            v,
        )))
    };
    match name {
        S::Gl2 => gl(gl2_elements(fq)),
        S::Sl2 => gl(sl2_elements(fq)),
        S::O2C => gl(o2c_elements(fq, params.gamma)),
        S::T2C => gl(t2c_elements(fq)),
        S::B => gl(gl2_elements(fq)
            .into_iter()
            .filter(|m| m.e[1][0] == 0)
            .collect()),
        S::Bbar => gl(gl2_elements(fq)
            .into_iter()
            .filter(|m| m.e[0][1] == 0)
            .collect()),
        S::N11 => gl((0..q)
            .map(|x| Mat2 {
                e: [[1, x], [0, 1]],
            })
            .collect()),
        S::N11bar => gl((0..q)
            .map(|x| Mat2 {
                e: [[1, 0], [x, 1]],
            })
            .collect()),
        S::Sp4 => {
            if !params.oracle {
                return Err(Error::Domain("enumerating Sp4 requires oracle mode".into()));
            }
            let g = GroupSet::generated_by(S::Sp4, &sp4_generators(fq), fq);
            Ok(NamedGroup::Sp4Level(g))
        }
        S::M => sp(m_elements(fq)),
        S::N => sp(n_elements(fq)),
        S::P => sp(products(fq, &m_elements(fq), &n_elements(fq))),
        S::L => sp(l_elements(fq)),
        S::U => sp(u_elements(fq)),
        S::Q => sp(products(fq, &l_elements(fq), &u_elements(fq))),
        S::Mpsi => sp(mpsi_elements(fq, params.gamma)),
        S::Spsi => sp(products(
            fq,
            &mpsi_elements(fq, params.gamma),
            &n_elements(fq),
        )),
        S::N0 => sp(fq.elements().map(|x| n_elem(fq, 0, 0, x)).collect()),
        S::N1 => sp(fq
            .elements()
            .flat_map(|y| fq.elements().map(move |z| (y, z)))
            .map(|(y, z)| n_elem(fq, 0, y, z))
            .collect()),
        S::N2 => sp(fq.elements().map(|x| n_elem(fq, x, 0, 0)).collect()),
        S::N3 => sp(fq
            .elements()
            .flat_map(|y| fq.elements().map(move |z| (y, z)))
            .map(|(y, z)| n_elem(fq, y, z, 0))
            .collect()),
        S::N4 => sp(fq.elements().map(|y| n_elem(fq, 0, y, 0)).collect()),
        S::M1 => sp(fq
            .elements()
            .map(|y| {
                beta_unchecked(
                    fq,
                    &Mat2 {
                        e: [[1, 0], [y, 1]],
                    },
                )
            })
            .collect()),
        S::M2 => sp(signs(fq)
            .into_iter()
            .flat_map(|a| fq.units().map(move |d| (a, d)))
            .map(|(a, d)| diag4(fq, a, d))
            .collect()),
        S::M3 => sp(fq
            .units()
            .flat_map(|a| signs(fq).into_iter().map(move |d| (a, d)))
            .map(|(a, d)| diag4(fq, a, d))
            .collect()),
        S::D0 => {
            // P ∩ Q = B1·N with B1 = β(upper Borel).
            let b1: Vec<Mat4> = gl2_elements(fq)
                .into_iter()
                .filter(|m| m.e[1][0] == 0)
                .map(|m| beta_unchecked(fq, &m))
                .collect();
            sp(products(fq, &b1, &n_elements(fq)))
        }
        S::D1 => {
            let mut out = Vec::new();
            for b in fq.units() {
                for d in fq.units() {
                    for c in fq.elements() {
                        for y in fq.elements() {
                            let mut m = Mat4::zero();
                            m.e[0][0] = b;
                            m.e[1][0] = c;
                            m.e[1][1] = d;
                            m.e[1][3] = y;
                            m.e[2][2] = fq.inv(b);
                            m.e[2][3] = fq.neg(fq.mul(c, fq.inv(fq.mul(b, d))));
                            m.e[3][3] = fq.inv(d);
                            out.push(m);
                        }
                    }
                }
            }
            sp(out)
        }
        S::H1 => {
            let mut out = Vec::new();
            for b in fq.units() {
                for d in fq.units() {
                    for c in fq.elements() {
                        for y in fq.elements() {
                            for w in fq.elements() {
                                let mut m = Mat4::zero();
                                m.e[0][0] = b;
                                m.e[0][3] = y;
                                m.e[1][0] = c;
                                m.e[1][1] = d;
                                m.e[1][2] = fq.mul(fq.mul(d, y), fq.inv(b));
                                m.e[1][3] = w;
                                m.e[2][2] = fq.inv(b);
                                m.e[2][3] = fq.neg(fq.mul(c, fq.inv(fq.mul(b, d))));
                                m.e[3][3] = fq.inv(d);
                                out.push(m);
                            }
                        }
                    }
                }
            }
            sp(out)
        }
        S::Custom(s) => Err(Error::UnknownSubgroup(s.clone())),
    }
}

/// Convenience wrapper for Sp4-level catalog groups.
pub fn sp4_subgroup(fq: &Fq, name: SubgroupName, gamma: u8) -> GroupSet<4> {
    match named_subgroup(
        fq,
        &name,
        GroupParams {
            gamma,
            oracle: false,
        },
    ) {
        Ok(NamedGroup::Sp4Level(g)) => g,
        _ => panic!("{name} is not an enumerable Sp4-level subgroup"),
    }
}

pub fn gl2_subgroup(fq: &Fq, name: SubgroupName, gamma: u8) -> GroupSet<2> {
    match named_subgroup(
        fq,
        &name,
        GroupParams {
            gamma,
            oracle: false,
        },
    ) {
        Ok(NamedGroup::Gl2Level(g)) => g,
        _ => panic!("{name} is not a GL2-level subgroup"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosets::isotropic_spaces;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn symplectic_examples() {
        let fq = f(3);
        assert!(is_symplectic(&fq, &Mat4::identity()));
        assert!(is_symplectic(&fq, &j_matrix(&fq)));
        let mut d = Mat4::identity();
        d.e[3][3] = 2;
        assert!(!is_symplectic(&fq, &d));
        for j in 0..3 {
            assert!(is_symplectic(&fq, &sigma(&fq, j)));
        }
        assert!(is_symplectic(&fq, &tau1(&fq)));
    }

    #[test]
    fn catalog_orders_q3() {
        let fq = f(3);
        let q = 3usize;
        let expect = [
            ("N", q.pow(3)),
            ("O2C", 2 * q * (q - 1)),
            ("Spsi", 324),
            ("Mpsi", 12),
            ("T2C", 2 * (q - 1)),
            ("M", 48),
            ("P", 48 * 27),
            ("L", 2 * 24),
            ("U", 27),
            ("Q", 48 * 27),
            ("B", 12),
            ("Bbar", 12),
            ("N11", 3),
            ("N11bar", 3),
            ("N0", 3),
            ("N1", 9),
            ("N2", 3),
            ("N3", 9),
            ("N4", 3),
            ("M1", 3),
            ("M2", 4),
            ("M3", 4),
            ("D0", 12 * 27),
            ("D1", 2 * 2 * 3 * 3),
            ("H1", 2 * 2 * 27),
        ];
        for (name, order) in expect {
            let g = named_subgroup(&fq, &name.parse().unwrap(), GroupParams::default()).unwrap();
            assert_eq!(g.order(), order, "{name}");
        }
        assert!(named_subgroup(&fq, &SubgroupName::Sp4, GroupParams::default()).is_err());
        assert!("Foo".parse::<SubgroupName>().is_err());
    }

    #[test]
    fn sp4_oracle_q3() {
        let fq = f(3);
        let g = named_subgroup(
            &fq,
            &SubgroupName::Sp4,
            GroupParams {
                gamma: 1,
                oracle: true,
            },
        )
        .unwrap();
        assert_eq!(g.order(), 51840);
        assert_eq!(sp4_order(3), 51840);
        assert!(g.as_sp4().unwrap().iter().all(|m| is_symplectic(&fq, m)));
    }

    #[test]
    fn subgroups_are_symplectic_groups() {
        let fq = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in SubgroupName::CATALOG.iter().filter(|n| **n != "Sp4") {
            let g = named_subgroup(&fq, &name.parse().unwrap(), GroupParams::default()).unwrap();
            match g {
                NamedGroup::Sp4Level(g) => {
                    assert!(g.iter().all(|m| is_symplectic(&fq, m)), "{name}");
                    assert!(g.check_group_axioms_sampled(&fq, 2000, &mut rng), "{name}");
                }
                NamedGroup::Gl2Level(g) => assert!(g.check_group_axioms(&fq), "{name}"),
            }
        }
        let fq = f(5);
        for name in ["Spsi", "D1", "H1", "M2", "N3"] {
            let g = sp4_subgroup(&fq, name.parse().unwrap(), 1);
            assert!(
                g.check_group_axioms_sampled(&fq, 10_000, &mut rng),
                "{name}"
            );
        }
    }

    #[test]
    fn small_groups_closed_exhaustively() {
        let fq = f(3);
        for name in ["Spsi", "D1", "H1", "N1", "M2", "Mpsi"] {
            let g = sp4_subgroup(&fq, name.parse().unwrap(), 1);
            assert!(g.check_group_axioms(&fq), "{name}");
        }
    }

    #[test]
    fn alpha_is_a_homomorphism_into_l() {
        let fq = f(5);
        assert_eq!(
            embed_alpha(&fq, 1, &Mat2::identity()).unwrap(),
            Mat4::identity()
        );
        let n0 = sp4_subgroup(&fq, SubgroupName::N0, 1);
        for x in fq.elements() {
            let a = embed_alpha(
                &fq,
                1,
                &Mat2 {
                    e: [[1, x], [0, 1]],
                },
            )
            .unwrap();
            assert!(n0.contains(&a));
        }
        let sl2 = sl2_elements(&fq);
        for (i, a) in sl2.iter().enumerate().step_by(11) {
            for b in sl2.iter().skip(i % 7).step_by(13) {
                for (t, s) in [(2u8, 3u8), (4, 4)] {
                    let lhs = embed_alpha(&fq, t, a)
                        .unwrap()
                        .mul(&embed_alpha(&fq, s, b).unwrap(), &fq);
                    let rhs = embed_alpha(&fq, fq.mul(t, s), &a.mul(b, &fq)).unwrap();
                    assert_eq!(lhs, rhs);
                    assert!(in_l(&fq, &lhs));
                }
            }
        }
        assert_eq!(
            embed_alpha(&fq, 1, &Mat2::new2(&fq, 2, 0, 0, 1)),
            Err(Error::NotSpecialLinear(2))
        );
    }

    #[test]
    fn beta_examples() {
        let fq = f(3);
        assert_eq!(
            embed_beta(&fq, &Mat2::identity()).unwrap(),
            Mat4::identity()
        );
        assert_eq!(embed_beta(&fq, &Mat2::zero()), Err(Error::Singular));
        let mpsi = sp4_subgroup(&fq, SubgroupName::Mpsi, 1);
        let image: Vec<Mat4> = o2c_elements(&fq, 1)
            .iter()
            .map(|g| embed_beta(&fq, g).unwrap())
            .collect();
        let image = GroupSet::from_elements(SubgroupName::Custom("β(O2C)".into()), image);
        assert_eq!(image.elements(), mpsi.elements());
        let m1 = sp4_subgroup(&fq, SubgroupName::M1, 1);
        for y in fq.elements() {
            assert!(m1.contains(
                &embed_beta(
                    &fq,
                    &Mat2 {
                        e: [[1, 0], [y, 1]]
                    }
                )
                .unwrap()
            ));
        }
        for g in gl2_elements(&fq) {
            assert!(is_symplectic(&fq, &embed_beta(&fq, &g).unwrap()));
        }
    }

    #[test]
    fn levi_factorization() {
        let fq = f(3);
        for n in n_elements(&fq) {
            match levi_part(&fq, &n, Parabolic::Siegel).unwrap() {
                LeviCoords::Siegel { g, .. } => assert!(g.is_identity()),
                _ => unreachable!(),
            }
        }
        let g = Mat2::new2(&fq, 1, 2, 0, 2);
        let p = beta_unchecked(&fq, &g).mul(&n_elem(&fq, 1, 2, 0), &fq);
        let lc = levi_part(&fq, &p, Parabolic::Siegel).unwrap();
        assert_eq!(
            lc,
            LeviCoords::Siegel {
                g,
                unipotent: n_elem(&fq, 1, 2, 0)
            }
        );
        let qgrp = sp4_subgroup(&fq, SubgroupName::Q, 1);
        for p in qgrp.iter() {
            let lc = levi_part(&fq, p, Parabolic::Klingen).unwrap();
            assert_eq!(lc.reassemble(&fq), *p);
            assert!(in_u(&fq, lc.unipotent()));
            assert!(in_l(&fq, &lc.levi_matrix(&fq)));
        }
        assert!(levi_part(&fq, &sigma2(&fq), Parabolic::Siegel).is_err());
        assert!(levi_part(&fq, &sigma2(&fq), Parabolic::Klingen).is_err());
    }

    #[test]
    fn predicates_match_enumerations() {
        let fq = f(3);
        type Check = (&'static str, fn(&Fq, &Mat4) -> bool);
        let checks: [Check; 8] = [
            ("P", in_p),
            ("M", in_m),
            ("N", in_n),
            ("Q", in_q),
            ("L", in_l),
            ("U", in_u),
            ("Spsi", in_spsi),
            ("Mpsi", in_mpsi),
        ];
        let sp4 = GroupSet::generated_by(SubgroupName::Sp4, &sp4_generators(&fq), &fq);
        for (name, pred) in checks {
            let g = sp4_subgroup(&fq, name.parse().unwrap(), 1);
            let count = sp4.iter().filter(|m| pred(&fq, m)).count();
            assert_eq!(count, g.order(), "{name}");
            assert!(g.iter().all(|m| pred(&fq, m)), "{name}");
        }
    }

    #[test]
    fn spsi_is_the_stabilizer_of_psi_and_independent_of_gamma() {
        for q in [3u32, 5] {
            let fq = f(q);
            let base = sp4_subgroup(&fq, SubgroupName::Spsi, 1);
            for gamma in fq.units() {
                assert_eq!(
                    sp4_subgroup(&fq, SubgroupName::Spsi, gamma).elements(),
                    base.elements()
                );
            }
        }
        // direct stabilizer computation at q = 3
        let fq = f(3);
        let spsi = sp4_subgroup(&fq, SubgroupName::Spsi, 1);
        let p = sp4_subgroup(&fq, SubgroupName::P, 1);
        let n = n_elements(&fq);
        let psi = |m: &Mat4| fq.psi0(m.e[0][2]);
        let stab: Vec<Mat4> = p
            .iter()
            .filter(|g| {
                let gi = sp_inverse(&fq, g);
                n.iter()
                    .all(|x| (psi(&gi.mul(x, &fq).mul(g, &fq)) - psi(x)).norm() < 1e-9)
            })
            .copied()
            .collect();
        assert_eq!(
            GroupSet::from_elements(SubgroupName::Spsi, stab).elements(),
            spsi.elements()
        );
    }

    #[test]
    fn spsi_factors_uniquely() {
        let fq = f(3);
        let spsi = sp4_subgroup(&fq, SubgroupName::Spsi, 1);
        let mpsi = sp4_subgroup(&fq, SubgroupName::Mpsi, 1);
        let n = sp4_subgroup(&fq, SubgroupName::N, 1);
        for s in spsi.iter() {
            let count = mpsi
                .iter()
                .filter(|m| n.contains(&sp_inverse(&fq, m).mul(s, &fq)))
                .count();
            assert_eq!(count, 1);
        }
        // O2C = T2C ⋉ N̄11
        let o2 = gl2_subgroup(&fq, SubgroupName::O2C, 1);
        let t2 = gl2_subgroup(&fq, SubgroupName::T2C, 1);
        let nb = gl2_subgroup(&fq, SubgroupName::N11bar, 1);
        for g in o2.iter() {
            let count = t2
                .iter()
                .filter(|t| nb.contains(&t.inverse2(&fq).unwrap().mul(g, &fq)))
                .count();
            assert_eq!(count, 1);
        }
        for t in t2.iter() {
            for n in nb.iter() {
                let c = t.mul(n, &fq).mul(&t.inverse2(&fq).unwrap(), &fq);
                assert!(nb.contains(&c));
            }
        }
    }

    #[test]
    fn psi_triviality_and_m2_action() {
        for q in [3u32, 5] {
            let fq = f(q);
            let psi = |m: &Mat4| fq.psi0(m.e[0][2]);
            let trivial_on = |name: &str| {
                sp4_subgroup(&fq, name.parse().unwrap(), 1)
                    .iter()
                    .all(|m| (psi(m) - 1.0).norm() < 1e-12)
            };
            for name in ["N", "N2", "N3"] {
                assert!(!trivial_on(name), "{name}");
            }
            for name in ["N0", "N1"] {
                assert!(trivial_on(name), "{name}");
            }
            let m2 = sp4_subgroup(&fq, SubgroupName::M2, 1);
            for name in ["N0", "N1", "N2", "N4"] {
                let sub = sp4_subgroup(&fq, name.parse().unwrap(), 1);
                for m in m2.iter() {
                    let mi = sp_inverse(&fq, m);
                    for n in sub.iter() {
                        let c = m.mul(n, &fq).mul(&mi, &fq);
                        assert!(sub.contains(&c));
                        if name == "N2" {
                            assert_eq!(c, *n);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn section_maps_x0_and_lagrangians() {
        let fq = f(3);
        for k in [1usize, 2] {
            let spaces = isotropic_spaces(&fq, k);
            let x0 = IsotropicSubspace::standard(&fq, k);
            assert_eq!(symplectic_section(&fq, &x0).unwrap(), Mat4::identity());
            for x in &spaces {
                let g = symplectic_section(&fq, x).unwrap();
                assert!(is_symplectic(&fq, &g));
                assert_eq!(x0.act(&fq, &g), *x);
            }
        }
        let dual = IsotropicSubspace::from_vectors(&fq, &[[0, 0, 1, 0], [0, 0, 0, 1]]).unwrap();
        let g = symplectic_section(&fq, &dual).unwrap();
        assert_eq!(IsotropicSubspace::standard(&fq, 2).act(&fq, &g), dual);
    }

    #[test]
    fn hex_roundtrip() {
        let fq = f(7);
        let m = sigma1(&fq);
        assert_eq!(Mat4::from_hex(&m.hex(), &fq).unwrap(), m);
        assert!(Mat4::from_hex("zz", &fq).is_err());
    }
}
