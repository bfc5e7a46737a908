//! Finitely generated abelian groups in invariant-factor form, their
//! homomorphisms, automorphism enumeration, and exact `Q/Z` arithmetic.
//!
//! Coordinates are always canonical: torsion generators first (moduli
//! `d_1 | d_2 | ...`), then free generators. Two groups are equal exactly
//! when they are structurally equal.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::linalg::{cokernel, kernel_basis, solve_integer, IntMatrix};

pub const DEFAULT_AUT_BOUND: u64 = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("invalid torsion moduli: {0}")]
    InvalidModuli(String),
    #[error("group is infinite")]
    NotFinite,
    #[error("group order {order} exceeds automorphism bound {bound}")]
    TooLarge { order: BigInt, bound: u64 },
    #[error("homomorphism is not well defined: {0}")]
    IllDefined(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("map is not an automorphism")]
    NotAutomorphism,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AbelianGroup {
    free_rank: usize,
    torsion: Vec<BigInt>,
}

impl AbelianGroup {
    /// Checked constructor; moduli must already form a divisibility chain of
    /// integers >= 2.
    pub fn new(free_rank: usize, torsion: Vec<BigInt>) -> Result<Self, GroupError> {
        if let Some(d) = torsion.iter().find(|d| **d < BigInt::from(2)) {
            return Err(GroupError::InvalidModuli(format!("modulus {d} < 2")));
        }
        if let Some(w) = torsion.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(GroupError::InvalidModuli(format!("{} does not divide {}", w[0], w[1])));
        }
        Ok(AbelianGroup { free_rank, torsion })
    }

    /// Canonical form of `Z^free_rank ⊕ Z/m_1 ⊕ ...` for arbitrary moduli
    /// (entries 0 and ±1 allowed).
    pub fn from_moduli(free_rank: usize, moduli: &[i64]) -> Self {
        let mut diag: Vec<BigInt> = moduli.iter().map(|&m| BigInt::from(m)).collect();
        diag.extend(std::iter::repeat_n(BigInt::zero(), free_rank));
        from_presentation(&IntMatrix::diag(&diag)).group
    }

    pub fn trivial() -> Self {
        AbelianGroup { free_rank: 0, torsion: vec![] }
    }

    pub fn cyclic(n: i64) -> Self {
        Self::from_moduli(0, &[n])
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup { free_rank: rank, torsion: vec![] }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_moduli(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn torsion_count(&self) -> usize {
        self.torsion.len()
    }

    /// Number of canonical generators.
    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.free_rank
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_free(&self) -> bool {
        self.torsion.is_empty()
    }

    /// `None` for infinite groups.
    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion.iter().product())
    }

    /// Torsion subgroup, with the same torsion coordinates.
    pub fn torsion_subgroup(&self) -> AbelianGroup {
        AbelianGroup { free_rank: 0, torsion: self.torsion.clone() }
    }

    /// Modulus of generator `i`, zero for free generators.
    pub fn modulus(&self, i: usize) -> BigInt {
        self.torsion.get(i).cloned().unwrap_or_default()
    }

    /// Diagonal relation matrix (relations as columns).
    pub fn relation_matrix(&self) -> IntMatrix {
        let diag: Vec<BigInt> = (0..self.ngens()).map(|i| self.modulus(i)).collect();
        IntMatrix::diag(&diag)
    }

    pub fn reduce(&self, coords: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coords.len(), self.ngens(), "coordinate count mismatch");
        coords
            .iter()
            .enumerate()
            .map(|(i, x)| match self.torsion.get(i) {
                Some(d) => x.mod_floor(d),
                None => x.clone(),
            })
            .collect()
    }

    pub fn element(&self, coords: &[BigInt]) -> GroupElement {
        GroupElement { coords: self.reduce(coords) }
    }

    pub fn element_i64(&self, coords: &[i64]) -> GroupElement {
        let big: Vec<BigInt> = coords.iter().map(|&x| BigInt::from(x)).collect();
        self.element(&big)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement { coords: vec![BigInt::zero(); self.ngens()] }
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut c = vec![BigInt::zero(); self.ngens()];
        c[i] = BigInt::one();
        self.element(&c)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let s: Vec<BigInt> = a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect();
        self.element(&s)
    }

    pub fn scale(&self, a: &GroupElement, k: &BigInt) -> GroupElement {
        let s: Vec<BigInt> = a.coords.iter().map(|x| x * k).collect();
        self.element(&s)
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        self.scale(a, &BigInt::from(-1))
    }

    /// All elements of a finite group, in lexicographic coordinate order.
    pub fn elements(&self) -> Result<Vec<GroupElement>, GroupError> {
        if !self.is_finite() {
            return Err(GroupError::NotFinite);
        }
        let mut out = vec![self.zero()];
        for (i, d) in self.torsion.iter().enumerate() {
            let d = d.to_u64().expect("modulus fits u64");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for e in &out {
                for k in 0..d {
                    let mut c = e.coords.clone();
                    c[i] = BigInt::from(k);
                    next.push(GroupElement { coords: c });
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Least `n >= 1` with `n x = 0`, `None` when `x` has infinite order.
    pub fn order_of(&self, x: &GroupElement) -> Option<BigInt> {
        if x.coords[self.torsion.len()..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let mut n = BigInt::one();
        for (c, d) in x.coords.iter().zip(&self.torsion) {
            n = n.lcm(&(d / c.gcd(d)));
        }
        Some(n)
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Canonical coordinates of an element (torsion coordinates reduced).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct GroupElement {
    coords: Vec<BigInt>,
}

impl GroupElement {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }
}

/// A homomorphism in canonical coordinates: `matrix` is
/// `target.ngens() x source.ngens()`, column `j` is the image of generator `j`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupHom {
    source: AbelianGroup,
    target: AbelianGroup,
    matrix: IntMatrix,
}

impl GroupHom {
    /// Checks well-definedness and reduces torsion rows.
    pub fn new(source: AbelianGroup, target: AbelianGroup, matrix: IntMatrix) -> Result<Self, GroupError> {
        if matrix.rows() != target.ngens() || matrix.cols() != source.ngens() {
            return Err(GroupError::ShapeMismatch(format!(
                "matrix {}x{} for a map {} -> {}",
                matrix.rows(),
                matrix.cols(),
                source,
                target
            )));
        }
        for (j, d) in source.torsion.iter().enumerate() {
            for i in 0..target.ngens() {
                let image = d * matrix.get(i, j);
                let ok = match target.torsion.get(i) {
                    Some(e) => image.is_multiple_of(e),
                    None => image.is_zero(),
                };
                if !ok {
                    return Err(GroupError::IllDefined(format!(
                        "generator {j} of order {d} has image of wrong order in coordinate {i}"
                    )));
                }
            }
        }
        let rows: Vec<Vec<BigInt>> = (0..matrix.rows())
            .map(|i| match target.torsion.get(i) {
                Some(e) => matrix.row(i).iter().map(|x| x.mod_floor(e)).collect(),
                None => matrix.row(i).to_vec(),
            })
            .collect();
        let matrix = IntMatrix::from_big_rows(rows, source.ngens());
        Ok(GroupHom { source, target, matrix })
    }

    pub fn identity(g: &AbelianGroup) -> Self {
        GroupHom::new(g.clone(), g.clone(), IntMatrix::identity(g.ngens())).expect("identity is well defined")
    }

    pub fn zero(source: &AbelianGroup, target: &AbelianGroup) -> Self {
        GroupHom {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.ngens(), source.ngens()),
        }
    }

    pub fn source(&self) -> &AbelianGroup {
        &self.source
    }

    pub fn target(&self) -> &AbelianGroup {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &GroupElement) -> GroupElement {
        self.target.element(&self.matrix.mul_vec(&x.coords))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom, GroupError> {
        if other.target != self.source {
            return Err(GroupError::ShapeMismatch(format!("cannot compose through {} vs {}", other.target, self.source)));
        }
        GroupHom::new(other.source.clone(), self.target.clone(), &self.matrix * &other.matrix)
    }

    /// `[matrix | target relations]`; its column lattice is the preimage
    /// of the image subgroup in target coordinates.
    fn image_lattice(&self) -> IntMatrix {
        self.matrix.hstack(&self.target.relation_matrix())
    }

    pub fn is_surjective(&self) -> bool {
        cokernel(&self.image_lattice()).invariant_factors.is_empty()
    }

    /// Generators of the kernel, as source elements (zero ones dropped).
    pub fn kernel_generators(&self) -> Vec<GroupElement> {
        let k = kernel_basis(&self.image_lattice());
        let n = self.source.ngens();
        let mut out: Vec<GroupElement> = (0..k.cols())
            .map(|c| self.source.element(&k.col(c)[..n]))
            .filter(|e| !e.is_zero())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_generators().is_empty()
    }

    pub fn is_automorphism(&self) -> bool {
        self.source == self.target && self.is_surjective() && self.is_injective()
    }

    /// Some `x` with `self(x) = y`.
    pub fn preimage(&self, y: &GroupElement) -> Option<GroupElement> {
        let sol = solve_integer(&self.image_lattice(), &y.coords).ok()?;
        Some(self.source.element(&sol[..self.source.ngens()]))
    }

    /// Inverse of a bijective homomorphism.
    pub fn inverse(&self) -> Result<GroupHom, GroupError> {
        if !(self.is_surjective() && self.is_injective()) {
            return Err(GroupError::NotAutomorphism);
        }
        let cols: Vec<Vec<BigInt>> = (0..self.target.ngens())
            .map(|i| {
                self.preimage(&self.target.generator(i))
                    .expect("surjective")
                    .coords
            })
            .collect();
        let m = IntMatrix::from_big_rows(cols, self.source.ngens()).transpose();
        GroupHom::new(self.target.clone(), self.source.clone(), m)
    }
}

/// Result of presenting a group by relations.
#[derive(Clone, Debug)]
pub struct PresentedGroup {
    pub group: AbelianGroup,
    /// From the free group on the presentation generators.
    pub projection: GroupHom,
    /// `ambient x ngens`: column `i` lifts canonical generator `i`.
    pub lift: IntMatrix,
}

/// `Z^rows / (column span of relations)` in canonical form.
pub fn from_presentation(relations: &IntMatrix) -> PresentedGroup {
    let c = cokernel(relations);
    let t = c.torsion_count();
    let group = AbelianGroup { free_rank: c.free_rank(), torsion: c.invariant_factors[..t].to_vec() };
    let ambient = AbelianGroup::free(relations.rows());
    let projection = GroupHom::new(ambient, group.clone(), c.projection).expect("projection out of a free group");
    PresentedGroup { group, projection, lift: c.lift }
}

/// A subgroup in canonical form with its inclusion.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: AbelianGroup,
    pub inclusion: GroupHom,
    /// `k x ngens`: coefficients of each canonical generator on the given generators.
    pub lift: IntMatrix,
}

/// Subgroup of `g` generated by the columns of `gens` (in `g` coordinates).
pub fn subgroup_generated(g: &AbelianGroup, gens: &IntMatrix) -> Subgroup {
    assert_eq!(gens.rows(), g.ngens(), "generator coordinates mismatch");
    let k = gens.cols();
    let kern = kernel_basis(&gens.hstack(&g.relation_matrix()));
    let idx: Vec<usize> = (0..k).collect();
    let rel = kern.transpose().select_cols(&idx).transpose();
    let pres = from_presentation(&rel);
    let inclusion = GroupHom::new(pres.group.clone(), g.clone(), gens * &pres.lift).expect("inclusion is well defined");
    Subgroup { group: pres.group, inclusion, lift: pres.lift }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

fn pow_mod_inverse(a: u64, m: u64) -> u64 {
    // modular inverse via extended gcd
    let (g, x, _) = ext_gcd(a as i128, m as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(m as i128) as u64
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Rank of a set of vectors over `F_p`.
fn rank_mod_p(vectors: &[Vec<u64>], p: u64) -> usize {
    let mut rows: Vec<Vec<u64>> = vectors.to_vec();
    let mut rank = 0;
    let width = rows.first().map_or(0, Vec::len);
    for c in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else { continue };
        rows.swap(rank, piv);
        let inv = pow_mod_inverse(rows[rank][c] % p, p);
        let pivot: Vec<u64> = rows[rank].iter().map(|x| x * inv % p).collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] % p != 0 {
                let f = row[c] % p;
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        rows[rank] = pivot;
        rank += 1;
    }
    rank
}

/// Depth-first enumeration of `Aut(⊕ Z/p^{e_i})` column by column, pruning
/// any partial assignment whose socle images are dependent mod `p`.
#[derive(Clone, Debug)]
struct PrimaryAuts {
    p: u64,
    exps: Vec<u32>,
    counts: Vec<u64>,
    choice: Vec<u64>,
    depth: usize,
    started: bool,
    done: bool,
}

impl PrimaryAuts {
    fn new(p: u64, exps: Vec<u32>) -> Self {
        let r = exps.len();
        let counts = (0..r)
            .map(|j| (0..r).map(|i| p.pow(exps[i].min(exps[j]))).product())
            .collect();
        PrimaryAuts { p, exps, counts, choice: vec![0; r], depth: 0, started: false, done: false }
    }

    /// Entries of column `j` for choice index `idx` (mixed radix).
    fn column(&self, j: usize, mut idx: u64) -> Vec<u64> {
        let p = self.p;
        let ej = self.exps[j];
        self.exps
            .iter()
            .map(|&ei| {
                let radix = p.pow(ei.min(ej));
                let k = idx % radix;
                idx /= radix;
                k * p.pow(ei.saturating_sub(ej))
            })
            .collect()
    }

    /// Image of the order-p element `p^{e_j - 1} g_j`, in socle coordinates.
    fn socle(&self, j: usize, col: &[u64]) -> Vec<u64> {
        let p = self.p;
        let ej = self.exps[j];
        col.iter()
            .zip(&self.exps)
            .map(|(&m, &ei)| {
                let pe = p.pow(ei);
                (m * p.pow(ej - 1) % pe) / p.pow(ei - 1)
            })
            .collect()
    }

    fn independent_prefix(&self, upto: usize) -> bool {
        let socles: Vec<Vec<u64>> = (0..=upto).map(|j| self.socle(j, &self.column(j, self.choice[j]))).collect();
        rank_mod_p(&socles, self.p) == upto + 1
    }

    fn current(&self) -> Vec<Vec<u64>> {
        (0..self.exps.len()).map(|j| self.column(j, self.choice[j])).collect()
    }
}

impl Iterator for PrimaryAuts {
    /// Columns of the automorphism matrix.
    type Item = Vec<Vec<u64>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let r = self.exps.len();
        if !self.started {
            self.started = true;
            if r == 0 {
                self.done = true;
                return Some(vec![]);
            }
            self.depth = 0;
        } else {
            self.depth = r - 1;
            self.choice[self.depth] += 1;
        }
        loop {
            if self.choice[self.depth] >= self.counts[self.depth] {
                if self.depth == 0 {
                    self.done = true;
                    return None;
                }
                self.choice[self.depth] = 0;
                self.depth -= 1;
                self.choice[self.depth] += 1;
                continue;
            }
            if self.independent_prefix(self.depth) {
                if self.depth == r - 1 {
                    return Some(self.current());
                }
                self.depth += 1;
                self.choice[self.depth] = 0;
            } else {
                self.choice[self.depth] += 1;
            }
        }
    }
}

/// One p-primary layer: which invariant factors contribute, with exponents,
/// and the CRT idempotent coefficient for each of them.
#[derive(Clone, Debug)]
struct Layer {
    p: u64,
    factors: Vec<usize>,
    exps: Vec<u32>,
    crt: Vec<u64>,
}

/// Restartable stream over `Aut(G)` for finite `G`.
#[derive(Clone, Debug)]
pub struct Automorphisms {
    group: AbelianGroup,
    moduli: Vec<u64>,
    layers: Vec<Layer>,
    cursors: Vec<PrimaryAuts>,
    current: Vec<Vec<Vec<u64>>>,
    started: bool,
    done: bool,
}

impl Automorphisms {
    fn assemble(&self) -> GroupHom {
        let n = self.moduli.len();
        let mut m = vec![vec![0u64; n]; n];
        for (layer, cols) in self.layers.iter().zip(&self.current) {
            for (lj, &j) in layer.factors.iter().enumerate() {
                for (li, &i) in layer.factors.iter().enumerate() {
                    let d = self.moduli[i];
                    let term = (cols[lj][li] as u128 * layer.crt[li] as u128 % d as u128) as u64;
                    m[i][j] = (m[i][j] + term) % d;
                }
            }
        }
        let rows: Vec<Vec<BigInt>> = m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
        GroupHom::new(self.group.clone(), self.group.clone(), IntMatrix::from_big_rows(rows, n))
            .expect("assembled automorphism is well defined")
    }
}

impl Iterator for Automorphisms {
    type Item = GroupHom;

    fn next(&mut self) -> Option<GroupHom> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            for c in self.cursors.iter_mut() {
                self.current.push(c.next().expect("identity exists"));
            }
            return Some(self.assemble());
        }
        let mut k = self.cursors.len();
        loop {
            if k == 0 {
                self.done = true;
                return None;
            }
            k -= 1;
            if let Some(next) = self.cursors[k].next() {
                self.current[k] = next;
                return Some(self.assemble());
            }
            let layer = &self.layers[k];
            self.cursors[k] = PrimaryAuts::new(layer.p, layer.exps.clone());
            self.current[k] = self.cursors[k].next().expect("identity exists");
        }
    }
}

/// Enumerates every automorphism of a finite group exactly once.
pub fn automorphisms(g: &AbelianGroup, bound: u64) -> Result<Automorphisms, GroupError> {
    let order = g.order().ok_or(GroupError::NotFinite)?;
    if order > BigInt::from(bound) {
        return Err(GroupError::TooLarge { order, bound });
    }
    let moduli: Vec<u64> = g.torsion.iter().map(|d| d.to_u64().expect("bounded")).collect();
    let order = order.to_u64().expect("bounded");
    let layers: Vec<Layer> = prime_factors(order)
        .into_iter()
        .map(|p| {
            let mut factors = vec![];
            let mut exps = vec![];
            let mut crt = vec![];
            for (i, &d) in moduli.iter().enumerate() {
                let e = valuation(d, p);
                if e > 0 {
                    let pe = p.pow(e);
                    let rest = d / pe;
                    factors.push(i);
                    exps.push(e);
                    crt.push(rest * pow_mod_inverse(rest % pe, pe) % d);
                }
            }
            Layer { p, factors, exps, crt }
        })
        .collect();
    let cursors = layers.iter().map(|l| PrimaryAuts::new(l.p, l.exps.clone())).collect();
    Ok(Automorphisms { group: g.clone(), moduli, layers, cursors, current: vec![], started: false, done: false })
}

/// Element of `Q/Z`, stored as its representative in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ(BigRational);

impl QmodZ {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        QmodZ::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let f = q.floor();
        QmodZ(q - f)
    }

    pub fn zero() -> Self {
        QmodZ(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn add(&self, other: &QmodZ) -> QmodZ {
        QmodZ::from_rational(&self.0 + &other.0)
    }

    pub fn neg(&self) -> QmodZ {
        QmodZ::from_rational(-&self.0)
    }

    pub fn scale(&self, k: &BigInt) -> QmodZ {
        QmodZ::from_rational(&self.0 * BigRational::from_integer(k.clone()))
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational {0:?}")]
pub struct ParseQmodZError(String);

impl FromStr for QmodZ {
    type Err = ParseQmodZError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseQmodZError(s.to_string());
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        if !d.is_positive() {
            return Err(err());
        }
        Ok(QmodZ::new(n, d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Brute force: every self-map sending generator i to an element of order
    /// dividing d_i, keeping the bijective ones.
    fn brute_force_aut_count(g: &AbelianGroup) -> usize {
        let elems = g.elements().unwrap();
        let n = g.ngens();
        let candidates: Vec<Vec<&GroupElement>> = (0..n)
            .map(|i| {
                elems
                    .iter()
                    .filter(|e| g.scale(e, &g.modulus(i)).is_zero())
                    .collect()
            })
            .collect();
        let mut count = 0;
        let mut idx = vec![0usize; n];
        loop {
            let cols: Vec<Vec<BigInt>> = (0..n).map(|j| candidates[j][idx[j]].coords().to_vec()).collect();
            let m = IntMatrix::from_big_rows(cols, n).transpose();
            let h = GroupHom::new(g.clone(), g.clone(), m).unwrap();
            let mut images: Vec<GroupElement> = elems.iter().map(|e| h.apply(e)).collect();
            images.sort();
            images.dedup();
            if images.len() == elems.len() {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == n {
                    return count;
                }
                idx[k] += 1;
                if idx[k] < candidates[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn presentation_examples() {
        assert_eq!(from_presentation(&IntMatrix::from_rows(&[[3]])).group, AbelianGroup::cyclic(3));
        assert_eq!(from_presentation(&IntMatrix::zeros(2, 2)).group, AbelianGroup::free(2));
        assert_eq!(from_presentation(&IntMatrix::from_rows(&[[2, 1], [1, 2]])).group, AbelianGroup::cyclic(3));
        assert_eq!(AbelianGroup::from_moduli(1, &[6, 4]), AbelianGroup::new(1, vec![b(2), b(12)]).unwrap());
        assert!(AbelianGroup::new(0, vec![b(4), b(6)]).is_err());
        assert!(AbelianGroup::new(0, vec![b(1)]).is_err());
    }

    #[test]
    fn order_examples() {
        let z3 = AbelianGroup::cyclic(3);
        assert_eq!(z3.order_of(&z3.zero()), Some(b(1)));
        assert_eq!(z3.order_of(&z3.generator(0)), Some(b(3)));
        let g = AbelianGroup::new(0, vec![b(2), b(4)]).unwrap();
        assert_eq!(g.order_of(&g.element_i64(&[1, 1])), Some(b(4)));
        let z = AbelianGroup::free(1);
        assert_eq!(z.order_of(&z.generator(0)), None);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&AbelianGroup::cyclic(3), 512).unwrap().count(), 2);
        let v4 = AbelianGroup::from_moduli(0, &[2, 2]);
        assert_eq!(automorphisms(&v4, 512).unwrap().count(), 6);
        let triv: Vec<GroupHom> = automorphisms(&AbelianGroup::trivial(), 512).unwrap().collect();
        assert_eq!(triv.len(), 1);
        assert_eq!(triv[0], GroupHom::identity(&AbelianGroup::trivial()));
        for moduli in [&[2, 4][..], &[4, 4], &[12], &[2, 6], &[3, 9], &[2, 2, 2], &[2, 2, 4], &[30], &[8]] {
            let g = AbelianGroup::from_moduli(0, moduli);
            let listed: Vec<GroupHom> = automorphisms(&g, 512).unwrap().collect();
            assert!(listed.iter().all(GroupHom::is_automorphism));
            let mut uniq = listed.clone();
            uniq.sort_by_key(|h| h.matrix().to_rows());
            uniq.dedup();
            assert_eq!(uniq.len(), listed.len(), "duplicates for {g}");
            assert_eq!(listed.len(), brute_force_aut_count(&g), "count for {g}");
        }
    }

    #[test]
    fn automorphism_bound() {
        let g = AbelianGroup::from_moduli(0, &[1024]);
        assert!(matches!(automorphisms(&g, 512), Err(GroupError::TooLarge { .. })));
        assert!(automorphisms(&g, 2048).is_ok());
        assert_eq!(automorphisms(&AbelianGroup::free(1), 512).unwrap_err(), GroupError::NotFinite);
    }

    #[test]
    fn automorphisms_closed_under_composition_and_inverse() {
        let g = AbelianGroup::from_moduli(0, &[2, 4]);
        let all: Vec<GroupHom> = automorphisms(&g, 512).unwrap().collect();
        for a in &all {
            assert!(all.contains(&a.inverse().unwrap()));
            for c in &all {
                assert!(all.contains(&a.compose(c).unwrap()));
            }
        }
    }

    #[test]
    fn well_definedness_matches_elementwise_check() {
        // Z/4 -> Z/6: generator must go to an element killed by 4
        let s = AbelianGroup::cyclic(4);
        let t = AbelianGroup::cyclic(6);
        for v in 0..6 {
            let by_matrix = GroupHom::new(s.clone(), t.clone(), IntMatrix::from_rows(&[[v]])).is_ok();
            // x -> v x respects x ~ x + 4 for every representative in a box
            let elementwise = (-8..8i64).all(|x| (v * (x + 4) - v * x).rem_euclid(6) == 0);
            assert_eq!(by_matrix, elementwise, "v = {v}");
        }
        // torsion cannot map to a free generator nontrivially
        assert!(GroupHom::new(s.clone(), AbelianGroup::free(1), IntMatrix::from_rows(&[[1]])).is_err());
    }

    #[test]
    fn kernel_and_surjectivity() {
        let g = AbelianGroup::from_moduli(0, &[2, 2]);
        let kill_first = GroupHom::new(g.clone(), AbelianGroup::cyclic(2), IntMatrix::from_rows(&[[0, 1]])).unwrap();
        assert!(kill_first.is_surjective());
        assert_eq!(kill_first.kernel_generators(), vec![g.element_i64(&[1, 0])]);
        let inc = GroupHom::new(AbelianGroup::cyclic(2), AbelianGroup::cyclic(4), IntMatrix::from_rows(&[[2]])).unwrap();
        assert!(!inc.is_surjective());
        assert!(inc.is_injective());
    }

    #[test]
    fn subgroup_presentation() {
        let g = AbelianGroup::from_moduli(0, &[2, 4]);
        let crate::groups::Subgroup { group: h, inclusion: incl, .. } = subgroup_generated(&g, &IntMatrix::from_rows(&[[1, 0], [2, 2]]));
        assert_eq!(h, AbelianGroup::from_moduli(0, &[2, 2]));
        assert!(incl.is_injective());
    }

    #[test]
    fn qmodz_arithmetic() {
        assert!(QmodZ::new(1, 3).add(&QmodZ::new(2, 3)).is_zero());
        assert_eq!(QmodZ::new(1, 2).add(&QmodZ::new(1, 3)), QmodZ::new(5, 6));
        assert_eq!(QmodZ::new(1, 4).scale(&b(3)), QmodZ::new(3, 4));
        assert_eq!(QmodZ::new(-2, 3), QmodZ::new(1, 3));
        assert_eq!("-2/3".parse::<QmodZ>().unwrap(), QmodZ::new(1, 3));
        assert_eq!(QmodZ::new(4, 2).to_string(), "0");
        assert!("1/0".parse::<QmodZ>().is_err());
    }

    fn arb_group() -> impl Strategy<Value = AbelianGroup> {
        prop_oneof![
            Just(vec![2i64]),
            Just(vec![6]),
            Just(vec![2, 4]),
            Just(vec![3, 3]),
            Just(vec![2, 2, 2]),
            Just(vec![4, 8]),
        ]
        .prop_map(|m| AbelianGroup::from_moduli(0, &m))
    }

    proptest! {
        #[test]
        fn lagrange(g in arb_group(), seed in proptest::collection::vec(0i64..100, 3)) {
            let coords: Vec<i64> = (0..g.ngens()).map(|i| seed[i]).collect();
            let x = g.element_i64(&coords);
            let n = g.order_of(&x).unwrap();
            prop_assert!(g.order().unwrap().is_multiple_of(&n));
            prop_assert!(g.scale(&x, &n).is_zero());
        }

        #[test]
        fn presentation_is_invariant_under_unimodular_change(
            entries in proptest::collection::vec(-6i64..=6, 9),
            ops in proptest::collection::vec((0usize..3, 0usize..3, -3i64..=3), 0..6),
        ) {
            let r = IntMatrix::new(3, 3, entries.into_iter().map(BigInt::from).collect());
            // R -> U R V via elementary operations
            let mut u = IntMatrix::identity(3);
            let mut v = IntMatrix::identity(3);
            for (i, j, c) in ops {
                if i != j {
                    u = &IntMatrix::identity(3).with_entry(i, j, b(c)) * &u;
                    v = &v * &IntMatrix::identity(3).with_entry(j, i, b(-c));
                }
            }
            let moved = &(&u * &r) * &v;
            prop_assert_eq!(from_presentation(&r).group, from_presentation(&moved).group);
        }
    }
}
