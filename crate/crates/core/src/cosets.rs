//! Coset spaces `P_k\Sp4` modelled by isotropic subspaces, orbit decomposition,
//! double-coset extraction, and the decomposability and stabilizer checks.

use std::collections::{HashMap, HashSet, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ff::Fq;
use crate::matgrp::{
    self, beta_unchecked, block, embed_alpha, form, in_p, in_q, sp_inverse, symplectic_section,
    GroupSet, Mat2, Mat4, SubgroupName, Vec4,
};

/// Reduced row-echelon form of the given rows, zero rows dropped.
pub fn rref(fq: &Fq, rows: &[Vec4]) -> Vec<Vec4> {
    let mut m: Vec<Vec4> = rows.to_vec();
    let mut r = 0;
    for col in 0..4 {
        let Some(p) = (r..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, p);
        let s = fq.inv(m[r][col]);
        for x in m[r].iter_mut() {
            *x = fq.mul(*x, s);
        }
        for i in 0..m.len() {
            if i != r && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..4 {
                    m[i][j] = fq.sub(m[i][j], fq.mul(f, m[r][j]));
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

pub fn rank(fq: &Fq, rows: &[Vec4]) -> usize {
    rref(fq, rows).len()
}

/// A totally isotropic subspace of F_q⁴ in reduced row-echelon form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsotropicSubspace {
    rows: Vec<Vec4>,
}

impl IsotropicSubspace {
    pub fn from_vectors(fq: &Fq, vectors: &[Vec4]) -> Result<Self> {
        let rows = rref(fq, vectors);
        if !(1..=2).contains(&rows.len()) {
            return Err(Error::BadDimension(rows.len()));
        }
        for v in &rows {
            for w in &rows {
                if form(fq, v, w) != 0 {
                    return Err(Error::NotIsotropic);
                }
            }
        }
        Ok(IsotropicSubspace { rows })
    }

    /// `X0 = ⟨e1, …, e_k⟩`.
    pub fn standard(fq: &Fq, k: usize) -> Self {
        let e = [[1, 0, 0, 0], [0, 1, 0, 0]];
        Self::from_vectors(fq, &e[..k]).expect("standard subspace")
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec4] {
        &self.rows
    }

    /// `g(X)`.
    pub fn act(&self, fq: &Fq, g: &Mat4) -> Self {
        let image: Vec<Vec4> = self.rows.iter().map(|v| g.apply(v, fq)).collect();
        IsotropicSubspace {
            rows: rref(fq, &image),
        }
    }

    pub fn intersection_dim(&self, fq: &Fq, other: &Self) -> usize {
        let mut all = self.rows.clone();
        all.extend_from_slice(&other.rows);
        self.dim() + other.dim() - rank(fq, &all)
    }

    pub fn key(&self) -> Vec<u8> {
        self.rows.iter().flatten().copied().collect()
    }
}

/// All lines of F_q⁴ (every line is isotropic), normalized so the leading entry is 1.
fn lines(fq: &Fq) -> Vec<Vec4> {
    let q = fq.q();
    (1..q.pow(4))
        .map(|mut i| {
            let mut v = [0u8; 4];
            for x in v.iter_mut() {
                *x = (i % q) as u8;
                i /= q;
            }
            v
        })
        .filter(|v| v.iter().find(|&&x| x != 0) == Some(&1))
        .collect()
}

/// `Λ(k)`, sorted canonically.
pub fn isotropic_spaces(fq: &Fq, k: usize) -> Vec<IsotropicSubspace> {
    let ls = lines(fq);
    let mut out: Vec<IsotropicSubspace> = match k {
        1 => ls
            .iter()
            .map(|v| IsotropicSubspace { rows: vec![*v] })
            .collect(),
        2 => {
            let mut set = HashSet::new();
            for (i, v) in ls.iter().enumerate() {
                for w in &ls[i + 1..] {
                    if form(fq, v, w) == 0 {
                        set.insert(IsotropicSubspace {
                            rows: rref(fq, &[*v, *w]),
                        });
                    }
                }
            }
            set.into_iter().collect()
        }
        _ => Vec::new(),
    };
    out.sort();
    out
}

pub fn lambda_size(q: u64, k: usize) -> u64 {
    match k {
        1 => (q.pow(4) - 1) / (q - 1),
        2 => (q * q + 1) * (q + 1),
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// Orbits.

/// Orbits of a group acting on a finite point set, with witnesses.
#[derive(Clone, Debug)]
pub struct OrbitDecomposition<Pt, G> {
    pub space: Vec<Pt>,
    /// Point indices per orbit; the first entry is the representative.
    pub orbits: Vec<Vec<usize>>,
    pub orbit_of: Vec<usize>,
    /// `witness[i]` maps the representative of point `i`'s orbit onto point `i`.
    pub witness: Vec<G>,
}

impl<Pt: Clone + Eq + Hash, G: Clone> OrbitDecomposition<Pt, G> {
    pub fn num_orbits(&self) -> usize {
        self.orbits.len()
    }

    pub fn representatives(&self) -> Vec<&Pt> {
        self.orbits.iter().map(|o| &self.space[o[0]]).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, p: &Pt) -> Option<usize> {
        self.space.iter().position(|x| x == p)
    }
}

/// Breadth-first orbit search. `actors` must generate the acting group; the
/// orbits of a finite group coincide with those of the monoid its generators span.
pub fn orbit_decompose_with<Pt, G>(
    space: &[Pt],
    actors: &[G],
    identity: G,
    act: impl Fn(&G, &Pt) -> Pt,
    compose: impl Fn(&G, &G) -> G,
) -> Result<OrbitDecomposition<Pt, G>>
where
    Pt: Clone + Eq + Hash,
    G: Clone,
{
    let index: HashMap<&Pt, usize> = space.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = space.len();
    let mut orbit_of = vec![usize::MAX; n];
    let mut witness: Vec<Option<G>> = vec![None; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = vec![start];
        orbit_of[start] = id;
        witness[start] = Some(identity.clone());
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let wi = witness[i].clone().expect("visited");
            for g in actors {
                let image = act(g, &space[i]);
                let j = *index
                    .get(&image)
                    .ok_or_else(|| Error::Domain("action leaves the point set".into()))?;
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    witness[j] = Some(compose(g, &wi));
                    members.push(j);
                    queue.push_back(j);
                }
            }
        }
        orbits.push(members);
    }
    Ok(OrbitDecomposition {
        space: space.to_vec(),
        orbits,
        orbit_of,
        witness: witness
            .into_iter()
            .map(|w| w.expect("all visited"))
            .collect(),
    })
}

pub type SubspaceOrbits = OrbitDecomposition<IsotropicSubspace, Mat4>;

/// Orbits of `actors` (a generating set or the full group) on a set of subspaces.
pub fn orbit_decompose(
    fq: &Fq,
    actors: &[Mat4],
    space: &[IsotropicSubspace],
) -> Result<SubspaceOrbits> {
    orbit_decompose_with(
        space,
        actors,
        Mat4::identity(),
        |g, x| x.act(fq, g),
        |a, b| a.mul(b, fq),
    )
}

/// Acting elements for a group: all of it when it has at most 10⁴ elements,
/// otherwise a generating set.
pub fn actors_for(fq: &Fq, group: &GroupSet<4>) -> Vec<Mat4> {
    if group.order() <= 10_000 {
        group.elements().to_vec()
    } else {
        let gens = generating_subset(fq, group);
        debug_assert_eq!(
            GroupSet::generated_by(SubgroupName::Custom("closure".into()), &gens, fq).order(),
            group.order()
        );
        gens
    }
}

/// Greedy generating subset, scanned in canonical order.
pub fn generating_subset<const N: usize>(fq: &Fq, group: &GroupSet<N>) -> Vec<matgrp::Mat<N>> {
    let mut gens = Vec::new();
    let mut closure: HashSet<matgrp::Mat<N>> = HashSet::from([matgrp::Mat::identity()]);
    for g in group.iter() {
        if closure.len() == group.order() {
            break;
        }
        if closure.contains(g) {
            continue;
        }
        gens.push(*g);
        let mut queue: VecDeque<_> = closure.iter().copied().collect();
        while let Some(x) = queue.pop_front() {
            for s in &gens {
                let y = x.mul(s, fq);
                if closure.insert(y) {
                    queue.push_back(y);
                }
            }
        }
    }
    gens
}

/// Parametrized generators of a catalog group, without enumerating it. Each
/// generator is checked to lie in the group; the Levi and unipotent pieces are
/// checked to be generated by closure inside GL2 / SL2 / F_q³.
pub fn catalog_generators(fq: &Fq, name: &SubgroupName, gamma: u8) -> Result<Vec<Mat4>> {
    let g = fq.base_generator() as i64;
    let n_gens = vec![
        matgrp::n_elem(fq, 1, 0, 0),
        matgrp::n_elem(fq, 0, 1, 0),
        matgrp::n_elem(fq, 0, 0, 1),
    ];
    let u_gens = vec![
        matgrp::u_elem(fq, 1, 0, 0),
        matgrp::u_elem(fq, 0, 1, 0),
        matgrp::u_elem(fq, 0, 0, 1),
    ];
    let gl2_gens = vec![
        Mat2::new2(fq, g, 0, 0, 1),
        Mat2::new2(fq, 1, 1, 0, 1),
        Mat2::new2(fq, 0, 1, 1, 0),
    ];
    let sl2_gens = vec![Mat2::new2(fq, 1, 1, 0, 1), Mat2::new2(fq, 0, 1, -1, 0)];
    let o2_gens = vec![
        Mat2::new2(fq, -1, 0, 0, 1),
        Mat2::new2(fq, 1, 0, 0, g),
        Mat2::new2(fq, 1, 0, 1, 1),
    ];
    let check2 = |gens: &[Mat2], order: usize, what: &str| -> Result<()> {
        let c = GroupSet::generated_by(SubgroupName::Custom(what.into()), gens, fq);
        if c.order() == order {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "generators of {what} generate {} elements",
                c.order()
            )))
        }
    };
    let q = fq.q() as usize;
    let gl2_order = q * (q - 1) * (q - 1) * (q + 1);
    let beta = |v: &[Mat2]| v.iter().map(|m| beta_unchecked(fq, m)).collect::<Vec<_>>();
    let gens: Vec<Mat4> = match name {
        SubgroupName::P => {
            check2(&gl2_gens, gl2_order, "GL2")?;
            [beta(&gl2_gens), n_gens].concat()
        }
        SubgroupName::M => {
            check2(&gl2_gens, gl2_order, "GL2")?;
            beta(&gl2_gens)
        }
        SubgroupName::N => n_gens,
        SubgroupName::U => u_gens,
        SubgroupName::Spsi | SubgroupName::Mpsi => {
            let o2 = matgrp::o2c_elements(fq, gamma);
            check2(&o2_gens, o2.len(), "O2C")?;
            if !o2_gens.iter().all(|m| matgrp::preserves_c(fq, m, gamma)) {
                return Err(Error::Domain("O2C generator does not preserve C".into()));
            }
            if *name == SubgroupName::Spsi {
                [beta(&o2_gens), n_gens].concat()
            } else {
                beta(&o2_gens)
            }
        }
        SubgroupName::Q | SubgroupName::L => {
            check2(&sl2_gens, q * (q * q - 1), "SL2")?;
            let mut v = vec![embed_alpha(fq, g as u8, &Mat2::identity())?];
            for a in &sl2_gens {
                v.push(embed_alpha(fq, 1, a)?);
            }
            if *name == SubgroupName::Q {
                v.extend(u_gens);
            }
            v
        }
        other => {
            let grp = matgrp::sp4_subgroup(fq, other.clone(), gamma);
            return Ok(generating_subset(fq, &grp));
        }
    };
    let member: fn(&Fq, &Mat4) -> bool = match name {
        SubgroupName::P => matgrp::in_p,
        SubgroupName::M => matgrp::in_m,
        SubgroupName::N => matgrp::in_n,
        SubgroupName::U => matgrp::in_u,
        SubgroupName::Spsi => matgrp::in_spsi,
        SubgroupName::Mpsi => matgrp::in_mpsi,
        SubgroupName::Q => matgrp::in_q,
        _ => matgrp::in_l,
    };
    if let Some(bad) = gens.iter().find(|x| !member(fq, x)) {
        return Err(Error::NotInGroup(format!("{name}: {bad:?}")));
    }
    Ok(gens)
}

// ---------------------------------------------------------------------------
// Double cosets.

/// Which coset space realizes `G0\G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SpaceModel {
    /// `Λ(k)` for `P_k\Sp4`: `k = 1` is the Klingen, `k = 2` the Siegel quotient.
    Lambda(usize),
    /// Lines in F_q² for `B̄\GL2`, with base point `⟨e2⟩`.
    ProjectiveLine,
}

impl SpaceModel {
    pub fn left_label(&self) -> &'static str {
        match self {
            SpaceModel::Lambda(1) => "Q",
            SpaceModel::Lambda(_) => "P",
            SpaceModel::ProjectiveLine => "Bbar",
        }
    }

    pub fn ambient_label(&self) -> &'static str {
        match self {
            SpaceModel::ProjectiveLine => "GL2",
            _ => "Sp4",
        }
    }

    fn left_order(&self, q: u64) -> u64 {
        let gl2 = q * (q - 1) * (q - 1) * (q + 1);
        match self {
            SpaceModel::Lambda(2) => gl2 * q.pow(3),
            SpaceModel::Lambda(_) => (q - 1) * q * (q * q - 1) * q.pow(3),
            SpaceModel::ProjectiveLine => q * (q - 1) * (q - 1),
        }
    }
}

/// Double cosets `G0\G/K` with explicit representatives.
#[derive(Clone, Debug)]
pub struct DoubleCosetReport<const N: usize> {
    pub ambient: String,
    pub left: String,
    pub right: String,
    pub model: SpaceModel,
    pub representatives: Vec<matgrp::Mat<N>>,
    pub sizes: Vec<u64>,
    point_orbit: HashMap<Vec<u8>, usize>,
}

impl<const N: usize> DoubleCosetReport<N> {
    pub fn count(&self) -> usize {
        self.representatives.len()
    }

    pub fn total_size(&self) -> u64 {
        self.sizes.iter().sum()
    }
}

impl DoubleCosetReport<4> {
    /// Index of the double coset containing `g`.
    pub fn classify(&self, fq: &Fq, g: &Mat4) -> Option<usize> {
        let SpaceModel::Lambda(k) = self.model else {
            return None;
        };
        let y = IsotropicSubspace::standard(fq, k).act(fq, &sp_inverse(fq, g));
        self.point_orbit.get(&y.key()).copied()
    }
}

impl DoubleCosetReport<2> {
    pub fn classify(&self, fq: &Fq, g: &Mat2) -> Option<usize> {
        let gi = g.inverse2(fq).ok()?;
        let y = normalize_line(fq, gi.apply(&[0, 1], fq));
        self.point_orbit.get(y.as_slice()).copied()
    }
}

fn normalize_line(fq: &Fq, v: [u8; 2]) -> [u8; 2] {
    let lead = if v[0] != 0 { v[0] } else { v[1] };
    let s = fq.inv(lead);
    [fq.mul(v[0], s), fq.mul(v[1], s)]
}

/// `P_k\Sp4/K` for `K` given by acting elements (generators suffice).
pub fn double_coset_reps_sp4(
    fq: &Fq,
    k: usize,
    right_label: &str,
    right_actors: &[Mat4],
) -> Result<DoubleCosetReport<4>> {
    if !(1..=2).contains(&k) {
        return Err(Error::BadDimension(k));
    }
    let model = SpaceModel::Lambda(k);
    let space = isotropic_spaces(fq, k);
    let dec = orbit_decompose(fq, right_actors, &space)?;
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    let left_order = model.left_order(fq.q() as u64);
    for orbit in &dec.orbits {
        let s = symplectic_section(fq, &dec.space[orbit[0]])?;
        representatives.push(sp_inverse(fq, &s));
        sizes.push(left_order * orbit.len() as u64);
    }
    let point_orbit = dec
        .space
        .iter()
        .zip(&dec.orbit_of)
        .map(|(p, &o)| (p.key(), o))
        .collect();
    Ok(DoubleCosetReport {
        ambient: model.ambient_label().into(),
        left: model.left_label().into(),
        right: right_label.into(),
        model,
        representatives,
        sizes,
        point_orbit,
    })
}

/// `B̄\GL2/K` for a group `K` of 2×2 matrices.
pub fn double_coset_reps_gl2(fq: &Fq, right: &GroupSet<2>) -> Result<DoubleCosetReport<2>> {
    let q = fq.q() as u8;
    let mut space: Vec<[u8; 2]> = (0..q).map(|a| [1, a]).collect();
    space.push([0, 1]);
    space.sort();
    let dec = orbit_decompose_with(
        &space,
        right.elements(),
        Mat2::identity(),
        |g, v| normalize_line(fq, g.apply(v, fq)),
        |a, b| a.mul(b, fq),
    )?;
    let model = SpaceModel::ProjectiveLine;
    let left_order = model.left_order(fq.q() as u64);
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    for orbit in &dec.orbits {
        let y = dec.space[orbit[0]];
        // section: second column spans y, first column is the first completion
        let first = (1..(q as u32 * q as u32))
            .map(|i| [(i % q as u32) as u8, (i / q as u32) as u8])
            .find(|c| fq.sub(fq.mul(c[0], y[1]), fq.mul(y[0], c[1])) != 0)
            .expect("completion exists");
        let s = Mat2 {
            e: [[first[0], y[0]], [first[1], y[1]]],
        };
        representatives.push(s.inverse2(fq)?);
        sizes.push(left_order * orbit.len() as u64);
    }
    let point_orbit = dec
        .space
        .iter()
        .zip(&dec.orbit_of)
        .map(|(p, &o)| (p.to_vec(), o))
        .collect();
    Ok(DoubleCosetReport {
        ambient: model.ambient_label().into(),
        left: model.left_label().into(),
        right: right.name().to_string(),
        model,
        representatives,
        sizes,
        point_orbit,
    })
}

/// A double-coset count together with its match against named elements.
#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetCheck {
    pub name: String,
    pub expected: usize,
    pub count: usize,
    pub representatives: Vec<String>,
    /// For each representative, the named element sharing its double coset.
    pub matched: Vec<String>,
    pub sizes: Vec<u64>,
    pub sizes_sum_to_order: bool,
    pub pass: bool,
}

fn finish_check<const N: usize>(
    name: &str,
    expected: usize,
    report: &DoubleCosetReport<N>,
    ambient_order: u64,
    named: &[(&str, Option<usize>)],
) -> DoubleCosetCheck {
    let mut matched = vec![String::new(); report.count()];
    let mut hits = 0;
    for (label, cls) in named {
        if let Some(c) = cls {
            if matched.get(*c).is_some_and(|m| m.is_empty()) {
                matched[*c] = label.to_string();
                hits += 1;
            }
        }
    }
    let sizes_ok = report.total_size() == ambient_order;
    DoubleCosetCheck {
        name: name.into(),
        expected,
        count: report.count(),
        representatives: report.representatives.iter().map(|r| r.hex()).collect(),
        matched,
        sizes: report.sizes.clone(),
        sizes_sum_to_order: sizes_ok,
        pass: report.count() == expected && hits == expected && sizes_ok,
    }
}

/// The five double-coset decompositions with the named representatives
/// `σ_j`, `τ1σ1`, `h_j` and their inverses.
pub fn orbit_suite(fq: &Fq, gamma: u8) -> Result<Vec<DoubleCosetCheck>> {
    let q = fq.q() as u64;
    let sp4 = matgrp::sp4_order(q);
    let p_gens = catalog_generators(fq, &SubgroupName::P, gamma)?;
    let s_gens = catalog_generators(fq, &SubgroupName::Spsi, gamma)?;
    let inv = |m: Mat4| sp_inverse(fq, &m);
    let (s1, s2, t1) = (matgrp::sigma1(fq), matgrp::sigma2(fq), matgrp::tau1(fq));
    let ts = t1.mul(&s1, fq);
    let id = Mat4::identity();

    let mut out = Vec::new();
    let pp = double_coset_reps_sp4(fq, 2, "P", &p_gens)?;
    let named: Vec<_> = [("I4", id), ("sigma1", s1), ("sigma2", s2)]
        .iter()
        .map(|(l, g)| (*l, pp.classify(fq, g)))
        .collect();
    out.push(finish_check("P\\Sp4/P", 3, &pp, sp4, &named));

    let ps = double_coset_reps_sp4(fq, 2, "Spsi", &s_gens)?;
    let named: Vec<_> = [
        ("I4", id),
        ("sigma1^-1", inv(s1)),
        ("(tau1*sigma1)^-1", inv(ts)),
        ("sigma2^-1", inv(s2)),
    ]
    .iter()
    .map(|(l, g)| (*l, ps.classify(fq, g)))
    .collect();
    out.push(finish_check("P\\Sp4/Spsi", 4, &ps, sp4, &named));

    let qs = double_coset_reps_sp4(fq, 1, "Spsi", &s_gens)?;
    let named: Vec<_> = [
        ("I4", id),
        ("tau1^-1", inv(t1)),
        ("sigma1^-1", inv(s1)),
        ("(tau1*sigma1)^-1", inv(ts)),
    ]
    .iter()
    .map(|(l, g)| (*l, qs.classify(fq, g)))
    .collect();
    out.push(finish_check("Q\\Sp4/Spsi", 4, &qs, sp4, &named));

    let qp = double_coset_reps_sp4(fq, 1, "P", &p_gens)?;
    let named: Vec<_> = [("I4", id), ("sigma1", s1)]
        .iter()
        .map(|(l, g)| (*l, qp.classify(fq, g)))
        .collect();
    out.push(finish_check("Q\\Sp4/P", 2, &qp, sp4, &named));

    let o2 = matgrp::gl2_subgroup(fq, SubgroupName::O2C, gamma);
    let line = double_coset_reps_gl2(fq, &o2)?;
    let named = [
        ("I2", line.classify(fq, &Mat2::identity())),
        ("h1", line.classify(fq, &matgrp::h1_swap(fq))),
    ];
    let gl2 = q * (q - 1) * (q - 1) * (q + 1);
    out.push(finish_check("Bbar\\GL2/O2", 2, &line, gl2, &named));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Decomposability.

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionResult {
    pub holds: bool,
    /// Packed hex of an element of `H ∩ H1H2` outside `(H∩H1)(H∩H2)`.
    pub counterexample: Option<String>,
    pub lhs_size: usize,
    pub rhs_size: usize,
}

/// Checks `H ∩ (H1·H2) = (H ∩ H1)·(H ∩ H2)` by explicit enumeration.
pub fn decomposability_check(
    fq: &Fq,
    h: &GroupSet<4>,
    h1: &GroupSet<4>,
    h2: &GroupSet<4>,
) -> DecompositionResult {
    let a: Vec<Mat4> = h1.iter().filter(|x| h.contains(x)).copied().collect();
    let b: Vec<Mat4> = h2.iter().filter(|x| h.contains(x)).copied().collect();
    let mut rhs = HashSet::with_capacity(a.len() * b.len());
    for x in &a {
        for y in &b {
            rhs.insert(x.mul(y, fq));
        }
    }
    let in_product = |x: &Mat4| {
        // x ∈ H1·H2 iff some h1 ∈ H1 has h1⁻¹x ∈ H2
        h1.iter()
            .any(|g| h2.contains(&sp_inverse(fq, g).mul(x, fq)))
    };
    let (small, other_is_h) = if h.order() <= h1.order() * h2.order() {
        (h.elements().to_vec(), false)
    } else {
        let mut prod = Vec::with_capacity(h1.order() * h2.order());
        for x in h1.iter() {
            for y in h2.iter() {
                prod.push(x.mul(y, fq));
            }
        }
        (prod, true)
    };
    let mut lhs = HashSet::new();
    for x in small {
        let member = if other_is_h {
            h.contains(&x)
        } else {
            in_product(&x)
        };
        if member {
            lhs.insert(x);
        }
    }
    let mut lhs_sorted: Vec<Mat4> = lhs.iter().copied().collect();
    lhs_sorted.sort();
    let counterexample = lhs_sorted
        .iter()
        .find(|x| !rhs.contains(x))
        .or_else(|| {
            let mut extra: Vec<&Mat4> = rhs.iter().filter(|x| !lhs.contains(x)).collect();
            extra.sort();
            extra.first().copied()
        })
        .map(|m| m.hex());
    DecompositionResult {
        holds: counterexample.is_none(),
        counterexample,
        lhs_size: lhs.len(),
        rhs_size: rhs.len(),
    }
}

/// `w K w⁻¹` as an enumerated set.
pub fn conjugate_group(fq: &Fq, w: &Mat4, k: &GroupSet<4>, label: &str) -> GroupSet<4> {
    let wi = sp_inverse(fq, w);
    GroupSet::from_elements(
        SubgroupName::Custom(label.into()),
        k.iter().map(|x| w.mul(x, fq).mul(&wi, fq)).collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCase {
    pub parabolic: String,
    pub weyl: String,
    pub condition: String,
    pub result: DecompositionResult,
}

/// The named Weyl-type elements used by the decomposability conditions.
pub fn weyl_elements(fq: &Fq, parabolic: matgrp::Parabolic) -> Vec<(&'static str, Mat4)> {
    let s1 = matgrp::sigma1(fq);
    let t1 = matgrp::tau1(fq);
    let ts = t1.mul(&s1, fq);
    match parabolic {
        matgrp::Parabolic::Siegel => vec![
            ("I4", Mat4::identity()),
            ("sigma1", s1),
            ("tau1*sigma1", ts),
            ("sigma2", matgrp::sigma2(fq)),
        ],
        matgrp::Parabolic::Klingen => vec![
            ("I4", Mat4::identity()),
            ("sigma1", s1),
            ("tau1", t1),
            ("tau1*sigma1", ts),
        ],
    }
}

/// Catalog groups that occur in the decomposability conditions, each enumerated
/// as a product `A·B` with unique factorization and tested by predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Piece {
    P,
    M,
    N,
    Q,
    L,
    U,
    Spsi,
    Mpsi,
}

impl Piece {
    fn name(self) -> &'static str {
        match self {
            Piece::P => "P",
            Piece::M => "M",
            Piece::N => "N",
            Piece::Q => "Q",
            Piece::L => "L",
            Piece::U => "U",
            Piece::Spsi => "Spsi",
            Piece::Mpsi => "Mpsi",
        }
    }

    fn contains(self, fq: &Fq, x: &Mat4) -> bool {
        match self {
            Piece::P => in_p(fq, x),
            Piece::M => matgrp::in_m(fq, x),
            Piece::N => matgrp::in_n(fq, x),
            Piece::Q => in_q(fq, x),
            Piece::L => matgrp::in_l(fq, x),
            Piece::U => matgrp::in_u(fq, x),
            Piece::Spsi => matgrp::in_spsi(fq, x),
            Piece::Mpsi => matgrp::in_mpsi(fq, x),
        }
    }

    fn factors(self, fq: &Fq, gamma: u8) -> (Vec<Mat4>, Vec<Mat4>) {
        let one = || vec![Mat4::identity()];
        match self {
            Piece::P => (matgrp::m_elements(fq), matgrp::n_elements(fq)),
            Piece::M => (matgrp::m_elements(fq), one()),
            Piece::N => (one(), matgrp::n_elements(fq)),
            Piece::Q => (matgrp::l_elements(fq), matgrp::u_elements(fq)),
            Piece::L => (matgrp::l_elements(fq), one()),
            Piece::U => (one(), matgrp::u_elements(fq)),
            Piece::Spsi => (matgrp::mpsi_elements(fq, gamma), matgrp::n_elements(fq)),
            Piece::Mpsi => (matgrp::mpsi_elements(fq, gamma), one()),
        }
    }
}

/// `c K c⁻¹` for a catalog group `K`.
struct Conjugate {
    piece: Piece,
    c: Mat4,
    c_inv: Mat4,
}

impl Conjugate {
    fn contains(&self, fq: &Fq, x: &Mat4) -> bool {
        self.piece
            .contains(fq, &self.c_inv.mul(x, fq).mul(&self.c, fq))
    }
}

/// `H1·H2` with `H1 ∩ H2 = 1` and `H1` normalizing `H2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pair {
    MpsiN,
    MN,
    LU,
}

impl Pair {
    fn pieces(self) -> (Piece, Piece) {
        match self {
            Pair::MpsiN => (Piece::Mpsi, Piece::N),
            Pair::MN => (Piece::M, Piece::N),
            Pair::LU => (Piece::L, Piece::U),
        }
    }

    /// The `H1`-component of `x`, if `x ∈ H1·H2`.
    fn project(self, fq: &Fq, x: &Mat4) -> Option<Mat4> {
        match self {
            Pair::MpsiN | Pair::MN => {
                let a = block(x, 0, 0);
                let ok = in_p(fq, x) && (self == Pair::MN || matgrp::in_o2c(fq, &a));
                ok.then(|| beta_unchecked(fq, &a))
            }
            Pair::LU => in_q(fq, x).then(|| {
                let (t, a) = matgrp::klingen_levi_coords(x);
                matgrp::alpha_unchecked(fq, t, &a)
            }),
        }
    }
}

/// Predicate-based form of [`decomposability_check`] for `H = c K c⁻¹`: an
/// element of `H ∩ H1H2` lies in `(H∩H1)(H∩H2)` iff its `H1`-component lies in `H`.
fn decomposability_by_projection(
    fq: &Fq,
    h: &Conjugate,
    pair: Pair,
    gamma: u8,
) -> DecompositionResult {
    let (p1, p2) = pair.pieces();
    let (ha, hb) = h.piece.factors(fq, gamma);
    let (a1, _) = p1.factors(fq, gamma);
    let (_, b2) = p2.factors(fq, gamma);
    let count_in_h = |v: &[Mat4]| v.iter().filter(|x| h.contains(fq, x)).count();
    let rhs_size = count_in_h(&a1) * count_in_h(&b2);

    let mut lhs_size = 0usize;
    let mut counterexample: Option<Mat4> = None;
    let mut visit = |x: Mat4, proj: Option<Mat4>| {
        if let Some(m) = proj {
            lhs_size += 1;
            if counterexample.is_none() && !h.contains(fq, &m) {
                counterexample = Some(x);
            }
        }
    };
    if ha.len() * hb.len() <= a1.len() * b2.len() {
        for a in &ha {
            let ca = h.c.mul(a, fq);
            for b in &hb {
                let x = ca.mul(b, fq).mul(&h.c_inv, fq);
                visit(x, pair.project(fq, &x));
            }
        }
    } else {
        for a in &a1 {
            for b in &b2 {
                let x = a.mul(b, fq);
                if h.contains(fq, &x) {
                    visit(x, Some(*a));
                }
            }
        }
    }
    let holds = counterexample.is_none() && lhs_size == rhs_size;
    DecompositionResult {
        holds,
        counterexample: counterexample.map(|m| m.hex()),
        lhs_size,
        rhs_size,
    }
}

/// All six conditions for each Weyl element of the given parabolic.
pub fn decomposability_suite(
    fq: &Fq,
    parabolic: matgrp::Parabolic,
    gamma: u8,
) -> Vec<DecompositionCase> {
    let (k, levi_pair, names) = match parabolic {
        matgrp::Parabolic::Siegel => ([Piece::P, Piece::M, Piece::N], Pair::MN, ("M", "N")),
        matgrp::Parabolic::Klingen => ([Piece::Q, Piece::L, Piece::U], Pair::LU, ("L", "U")),
    };
    let mut out = Vec::new();
    for (wname, w) in weyl_elements(fq, parabolic) {
        let wi = sp_inverse(fq, &w);
        for piece in k {
            let h = Conjugate {
                piece,
                c: w,
                c_inv: wi,
            };
            out.push(DecompositionCase {
                parabolic: parabolic.to_string(),
                weyl: wname.into(),
                condition: format!("w({}) wrt (Mpsi,N)", piece.name()),
                result: decomposability_by_projection(fq, &h, Pair::MpsiN, gamma),
            });
        }
        for piece in [Piece::Spsi, Piece::Mpsi, Piece::N] {
            let h = Conjugate {
                piece,
                c: wi,
                c_inv: w,
            };
            out.push(DecompositionCase {
                parabolic: parabolic.to_string(),
                weyl: wname.into(),
                condition: format!("w^-1({}) wrt ({},{})", piece.name(), names.0, names.1),
                result: decomposability_by_projection(fq, &h, levi_pair, gamma),
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Stabilizers.

/// Compares `x P_k x⁻¹ ∩ P` (for `x = σ_j` or `w_j`) with its coordinate description.
pub fn verify_stabilizer(fq: &Fq, j: usize, parabolic: matgrp::Parabolic) -> Result<bool> {
    use SubgroupName as S;
    let p = matgrp::sp4_subgroup(fq, S::P, 1);
    let (x, target, member): (Mat4, S, fn(&Fq, &Mat4) -> bool) = match (parabolic, j) {
        (matgrp::Parabolic::Siegel, 0) => (Mat4::identity(), S::P, in_p),
        (matgrp::Parabolic::Siegel, 1) => (matgrp::sigma(fq, 1), S::H1, in_p),
        (matgrp::Parabolic::Siegel, 2) => (matgrp::sigma(fq, 2), S::M, in_p),
        (matgrp::Parabolic::Klingen, 0) => (Mat4::identity(), S::D0, in_q),
        (matgrp::Parabolic::Klingen, 1) => (matgrp::weyl_w(fq, 1), S::D1, in_q),
        _ => {
            return Err(Error::Domain(format!(
                "no stabilizer H_{j} for {parabolic}"
            )))
        }
    };
    let xi = sp_inverse(fq, &x);
    let found: Vec<Mat4> = p
        .iter()
        .filter(|g| member(fq, &xi.mul(g, fq).mul(&x, fq)))
        .copied()
        .collect();
    let found = GroupSet::from_elements(S::Custom("stabilizer".into()), found);
    let expected = matgrp::sp4_subgroup(fq, target, 1);
    Ok(found.elements() == expected.elements())
}

/// The P-orbit index of `Y ∈ Λ(k)`: `j` with `dim(Y ∩ V0) = k − j`, `V0 = ⟨e1, e2⟩`.
pub fn p_orbit_index(fq: &Fq, y: &IsotropicSubspace) -> usize {
    y.dim() - y.intersection_dim(fq, &IsotropicSubspace::standard(fq, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::{sigma, sigma1, sigma2, tau1, Parabolic};

    fn f(q: u32) -> Fq {
        Fq::new(q).unwrap()
    }

    #[test]
    fn lambda_counts() {
        for q in [3u32, 5] {
            let fq = f(q);
            for k in [1, 2] {
                let s = isotropic_spaces(&fq, k);
                assert_eq!(s.len() as u64, lambda_size(q as u64, k));
                let set: HashSet<_> = s.iter().collect();
                assert_eq!(set.len(), s.len());
            }
        }
        let fq = f(3);
        let x0 = IsotropicSubspace::standard(&fq, 2);
        assert!(isotropic_spaces(&fq, 2).contains(&x0));
        assert_eq!(
            IsotropicSubspace::from_vectors(&fq, &[[1, 0, 0, 0], [0, 0, 1, 0]]),
            Err(Error::NotIsotropic)
        );
    }

    #[test]
    fn p_orbits_on_lambda() {
        let fq = f(3);
        let p = matgrp::sp4_subgroup(&fq, SubgroupName::P, 1);
        let actors = actors_for(&fq, &p);
        for k in [1usize, 2] {
            let space = isotropic_spaces(&fq, k);
            let dec = orbit_decompose(&fq, &actors, &space).unwrap();
            assert_eq!(dec.num_orbits(), k + 1);
            for orbit in &dec.orbits {
                let j = p_orbit_index(&fq, &dec.space[orbit[0]]);
                assert!(orbit
                    .iter()
                    .all(|&i| p_orbit_index(&fq, &dec.space[i]) == j));
                assert_eq!(p.order() % orbit.len(), 0);
            }
            let rep = dec.representatives()[0].clone();
            for (i, w) in dec.witness.iter().enumerate() {
                let r = &dec.space[dec.orbits[dec.orbit_of[i]][0]];
                assert_eq!(r.act(&fq, w), dec.space[i]);
                let _ = &rep;
            }
            assert_eq!(dec.orbit_sizes().iter().sum::<usize>(), space.len());
        }
    }

    #[test]
    fn generators_and_full_sets_agree() {
        let fq = f(3);
        let spsi = matgrp::sp4_subgroup(&fq, SubgroupName::Spsi, 1);
        let gens = catalog_generators(&fq, &SubgroupName::Spsi, 1).unwrap();
        for k in [1, 2] {
            let space = isotropic_spaces(&fq, k);
            let a = orbit_decompose(&fq, spsi.elements(), &space).unwrap();
            let b = orbit_decompose(&fq, &gens, &space).unwrap();
            assert_eq!(a.orbit_of, b.orbit_of);
            assert_eq!(a.num_orbits(), 4);
        }
        for name in ["P", "Q", "L", "M", "Mpsi"] {
            let gens = catalog_generators(&fq, &name.parse().unwrap(), 1).unwrap();
            let grp = matgrp::sp4_subgroup(&fq, name.parse().unwrap(), 1);
            let closure = GroupSet::generated_by(SubgroupName::Custom(name.into()), &gens, &fq);
            assert_eq!(closure.elements(), grp.elements(), "{name}");
        }
    }

    #[test]
    fn double_cosets_match_explicit_elements() {
        for q in [3u32, 5] {
            let fq = f(q);
            let p_gens = catalog_generators(&fq, &SubgroupName::P, 1).unwrap();
            let s_gens = catalog_generators(&fq, &SubgroupName::Spsi, 1).unwrap();
            let pp = double_coset_reps_sp4(&fq, 2, "P", &p_gens).unwrap();
            assert_eq!(pp.count(), 3);
            assert_eq!(pp.total_size(), matgrp::sp4_order(q as u64));
            let classes: HashSet<_> = (0..3)
                .map(|j| pp.classify(&fq, &sigma(&fq, j)).unwrap())
                .collect();
            assert_eq!(classes.len(), 3);

            let qp = double_coset_reps_sp4(&fq, 1, "P", &p_gens).unwrap();
            assert_eq!(qp.count(), 2);
            assert_ne!(
                qp.classify(&fq, &Mat4::identity()),
                qp.classify(&fq, &sigma1(&fq))
            );

            let inv = |m: Mat4| sp_inverse(&fq, &m);
            let ts = tau1(&fq).mul(&sigma1(&fq), &fq);
            let ps = double_coset_reps_sp4(&fq, 2, "Spsi", &s_gens).unwrap();
            assert_eq!(ps.count(), 4);
            let named = [
                Mat4::identity(),
                inv(sigma1(&fq)),
                inv(ts),
                inv(sigma2(&fq)),
            ];
            let cls: HashSet<_> = named.iter().map(|g| ps.classify(&fq, g).unwrap()).collect();
            assert_eq!(cls.len(), 4);
            for r in &ps.representatives {
                assert!(matgrp::is_symplectic(&fq, r));
            }

            let qs = double_coset_reps_sp4(&fq, 1, "Spsi", &s_gens).unwrap();
            assert_eq!(qs.count(), 4);
            let named = [Mat4::identity(), inv(tau1(&fq)), inv(sigma1(&fq)), inv(ts)];
            let cls: HashSet<_> = named.iter().map(|g| qs.classify(&fq, g).unwrap()).collect();
            assert_eq!(cls.len(), 4);

            let o2 = matgrp::gl2_subgroup(&fq, SubgroupName::O2C, 1);
            let line = double_coset_reps_gl2(&fq, &o2).unwrap();
            assert_eq!(line.count(), 2);
            let h0 = Mat2::identity();
            let h1 = matgrp::h1_swap(&fq);
            assert_ne!(line.classify(&fq, &h0), line.classify(&fq, &h1));
            assert_eq!(line.total_size() as usize, matgrp::gl2_elements(&fq).len());
        }
    }

    #[test]
    fn orbit_suite_passes() {
        for q in [3u32, 5] {
            for gamma in [1u8, 2] {
                let checks = orbit_suite(&f(q), gamma).unwrap();
                let counts: Vec<_> = checks.iter().map(|c| c.count).collect();
                assert_eq!(counts, [3, 4, 4, 2, 2]);
                assert!(checks.iter().all(|c| c.pass), "{checks:?}");
                assert!(checks
                    .iter()
                    .all(|c| c.matched.iter().all(|m| !m.is_empty())));
            }
        }
    }

    #[test]
    fn decomposability_conditions_q3() {
        let fq = f(3);
        for parabolic in [Parabolic::Siegel, Parabolic::Klingen] {
            let cases = decomposability_suite(&fq, parabolic, 1);
            assert_eq!(cases.len(), 24);
            for c in &cases {
                assert!(c.result.holds, "{c:?}");
            }
        }
    }

    #[test]
    fn projection_check_agrees_with_enumeration() {
        let fq = f(3);
        let get = |n: SubgroupName| matgrp::sp4_subgroup(&fq, n, 1);
        let (mpsi, n, m, l, u) = (
            get(SubgroupName::Mpsi),
            get(SubgroupName::N),
            get(SubgroupName::M),
            get(SubgroupName::L),
            get(SubgroupName::U),
        );
        for parabolic in [Parabolic::Siegel, Parabolic::Klingen] {
            let fast = decomposability_suite(&fq, parabolic, 1);
            let (k, (h1, h2)) = match parabolic {
                Parabolic::Siegel => (["P", "M", "N"], (&m, &n)),
                Parabolic::Klingen => (["Q", "L", "U"], (&l, &u)),
            };
            let mut i = 0;
            for (_, w) in weyl_elements(&fq, parabolic) {
                let wi = sp_inverse(&fq, &w);
                for name in k {
                    let h = conjugate_group(&fq, &w, &get(name.parse().unwrap()), name);
                    assert_eq!(fast[i].result, decomposability_check(&fq, &h, &mpsi, &n));
                    i += 1;
                }
                for name in ["Spsi", "Mpsi", "N"] {
                    let h = conjugate_group(&fq, &wi, &get(name.parse().unwrap()), name);
                    assert_eq!(fast[i].result, decomposability_check(&fq, &h, h1, h2));
                    i += 1;
                }
            }
        }
    }

    #[test]
    fn decomposability_trivial_and_negative() {
        let fq = f(3);
        let m = matgrp::sp4_subgroup(&fq, SubgroupName::M, 1);
        let n = matgrp::sp4_subgroup(&fq, SubgroupName::N, 1);
        assert!(decomposability_check(&fq, &m, &m, &n).holds);
        let n0 = matgrp::sp4_subgroup(&fq, SubgroupName::N0, 1);
        let n2 = matgrp::sp4_subgroup(&fq, SubgroupName::N2, 1);
        let diag = GroupSet::from_elements(
            SubgroupName::Custom("diag".into()),
            fq.elements()
                .map(|x| matgrp::n_elem(&fq, x, 0, x))
                .collect(),
        );
        let r = decomposability_check(&fq, &diag, &n0, &n2);
        assert!(!r.holds);
        assert!(r.counterexample.is_some());
        assert_eq!((r.lhs_size, r.rhs_size), (3, 1));
    }

    #[test]
    fn stabilizers_match_coordinate_forms() {
        let fq = f(3);
        for j in 0..3 {
            assert!(
                verify_stabilizer(&fq, j, Parabolic::Siegel).unwrap(),
                "H{j}"
            );
        }
        for j in 0..2 {
            assert!(
                verify_stabilizer(&fq, j, Parabolic::Klingen).unwrap(),
                "D{j}"
            );
        }
        assert!(verify_stabilizer(&fq, 3, Parabolic::Siegel).is_err());
    }
}
