//! Characters, equivariant Hermitian forms over `Z[Z_d]`, their signatures
//! at roots of unity, and the Q/Z-valued defect invariant.
//!
//! Signatures are exact: a form evaluated at `ω^k` lives over the cyclotomic
//! field `Q(ζ_m)`, `m = d / gcd(d, k)`. It is diagonalized by Hermitian
//! congruence in that field and the sign of each (real) diagonal entry is
//! certified by fixed-point evaluation with an explicit error bound.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::groups::{AbelianGroup, GroupHom, QmodZ};
use crate::laurent::{alexander_torsion, LaurentMatrix, LaurentPoly};
use crate::linalg::IntMatrix;
use crate::seifert::{resolve_iota, validate, SeifertBundle, SeifertError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaError {
    #[error("k = {k} out of range for modulus {d}")]
    KOutOfRange { k: usize, d: usize },
    #[error("character not well defined: {0}")]
    IllDefinedCharacter(String),
    #[error("incompatible character: {0}")]
    IncompatibleCharacter(String),
    #[error("character source has torsion")]
    NotFree,
    #[error("form is not self-adjoint at ({0}, {1})")]
    NotSelfAdjoint(usize, usize),
    #[error("form shape: {0}")]
    Shape(String),
    #[error("sigma_W = {claimed} but the form has signature {computed} at 1")]
    InconsistentBounding { claimed: i64, computed: i64 },
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error(transparent)]
    Seifert(#[from] SeifertError),
}

/// Homomorphism to `Z/d`, given on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    source: AbelianGroup,
    modulus: u64,
    values: Vec<u64>,
}

impl Character {
    pub fn new(source: AbelianGroup, modulus: u64, values: &[i64]) -> Result<Self, EtaError> {
        if modulus < 2 {
            return Err(EtaError::IllDefinedCharacter(format!("modulus {modulus} < 2")));
        }
        if values.len() != source.ngens() {
            return Err(EtaError::IllDefinedCharacter(format!(
                "{} values for {} generators",
                values.len(),
                source.ngens()
            )));
        }
        let values: Vec<u64> = values.iter().map(|v| v.rem_euclid(modulus as i64) as u64).collect();
        for (i, m) in source.torsion_moduli().iter().enumerate() {
            if !(m * BigInt::from(values[i])).is_multiple_of(&BigInt::from(modulus)) {
                return Err(EtaError::IllDefinedCharacter(format!(
                    "generator {i} has order {m} but value {} in Z/{modulus}",
                    values[i]
                )));
            }
        }
        Ok(Character { source, modulus, values })
    }

    pub fn source(&self) -> &AbelianGroup {
        &self.source
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn apply(&self, x: &crate::groups::GroupElement) -> u64 {
        let d = BigInt::from(self.modulus);
        let s: BigInt = x.coords().iter().zip(&self.values).map(|(c, v)| c * BigInt::from(*v)).sum();
        s.mod_floor(&d).to_u64().unwrap()
    }

    /// `self ∘ f`.
    pub fn pullback(&self, f: &GroupHom) -> Result<Character, EtaError> {
        if f.target() != &self.source {
            return Err(EtaError::IncompatibleCharacter("pullback along a map into another group".into()));
        }
        let src = f.source();
        let vals: Vec<i64> = (0..src.ngens()).map(|j| self.apply(&f.apply(&src.generator(j))) as i64).collect();
        Character::new(src.clone(), self.modulus, &vals)
    }
}

/// Square matrix over `Z[Z_d]`; entry `(i, j)` is the coefficient list of
/// `g^0, ..., g^(d-1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantHermitianForm {
    modulus: usize,
    entries: Vec<Vec<Vec<BigInt>>>,
}

fn bar(c: &[BigInt]) -> Vec<BigInt> {
    let d = c.len();
    (0..d).map(|k| c[(d - k) % d].clone()).collect()
}

impl EquivariantHermitianForm {
    pub fn new(modulus: usize, entries: Vec<Vec<Vec<BigInt>>>) -> Result<Self, EtaError> {
        if modulus == 0 {
            return Err(EtaError::Shape("modulus 0".into()));
        }
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(EtaError::Shape("form is not square".into()));
            }
            if row.iter().any(|c| c.len() != modulus) {
                return Err(EtaError::Shape(format!("group-ring entries need {modulus} coefficients")));
            }
        }
        for i in 0..n {
            for j in i..n {
                if entries[j][i] != bar(&entries[i][j]) {
                    return Err(EtaError::NotSelfAdjoint(i, j));
                }
            }
        }
        Ok(EquivariantHermitianForm { modulus, entries })
    }

    pub fn from_i64(modulus: usize, entries: &[Vec<Vec<i64>>]) -> Result<Self, EtaError> {
        EquivariantHermitianForm::new(
            modulus,
            entries.iter().map(|r| r.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect()).collect(),
        )
    }

    /// Reduce a Hermitian Laurent matrix (`entry(j,i) = entry(i,j)(t^-1)`)
    /// modulo `t^d - 1`.
    pub fn from_laurent(modulus: usize, m: &LaurentMatrix) -> Result<Self, EtaError> {
        if m.rows() != m.cols() {
            return Err(EtaError::Shape("form is not square".into()));
        }
        let n = m.rows();
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut c = vec![BigInt::zero(); modulus];
                        for (e, x) in m.get(i, j).terms() {
                            c[e.rem_euclid(modulus as i64) as usize] += x;
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        EquivariantHermitianForm::new(modulus, entries)
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn entries(&self) -> &[Vec<Vec<BigInt>>] {
        &self.entries
    }

    pub fn block_diag(&self, other: &EquivariantHermitianForm) -> Result<Self, EtaError> {
        if self.modulus != other.modulus {
            return Err(EtaError::Shape("block sum of forms over different group rings".into()));
        }
        let (a, b) = (self.size(), other.size());
        let zero = vec![BigInt::zero(); self.modulus];
        let entries = (0..a + b)
            .map(|i| {
                (0..a + b)
                    .map(|j| match (i < a, j < a) {
                        (true, true) => self.entries[i][j].clone(),
                        (false, false) => other.entries[i - a][j - a].clone(),
                        _ => zero.clone(),
                    })
                    .collect()
            })
            .collect();
        EquivariantHermitianForm::new(self.modulus, entries)
    }

    /// Coefficient sums, i.e. the form at `g = 1`.
    pub fn augmentation(&self) -> IntMatrix {
        let n = self.size();
        IntMatrix::new(n, n, self.entries.iter().flatten().map(|c| c.iter().sum()).collect())
    }
}

/// Bounding data for `n` copies of a closed 3-manifold with character:
/// the equivariant intersection form of the cover, `n`, and `σ(W)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundingData {
    pub form: EquivariantHermitianForm,
    pub multiplicity: u64,
    pub sigma_w: i64,
}

impl BoundingData {
    pub fn new(form: EquivariantHermitianForm, multiplicity: u64, sigma_w: i64) -> Result<Self, EtaError> {
        if multiplicity == 0 {
            return Err(EtaError::ZeroMultiplicity);
        }
        let computed = omega_signature(&form, 0)?;
        if computed != sigma_w {
            return Err(EtaError::InconsistentBounding { claimed: sigma_w, computed });
        }
        Ok(BoundingData { form, multiplicity, sigma_w })
    }

    /// Empty form over `Z[Z_d]`.
    pub fn trivial(modulus: usize) -> Self {
        BoundingData::new(EquivariantHermitianForm::new(modulus, vec![]).expect("empty"), 1, 0).expect("empty form")
    }
}

/// `Q(ζ_m)` as `Q[x] / Φ_m`.
#[derive(Clone, Debug)]
struct Cyclotomic {
    m: usize,
    /// Monic, ascending.
    phi: Vec<BigInt>,
}

type Elt = Vec<BigRational>;

fn cyclotomic_poly(m: usize) -> Vec<BigInt> {
    // x^m - 1 divided by every Φ_e with e | m, e < m
    let mut p = vec![BigInt::zero(); m + 1];
    p[0] = -BigInt::one();
    p[m] = BigInt::one();
    for e in (1..m).filter(|e| m.is_multiple_of(*e)) {
        p = div_monic(&p, &cyclotomic_poly(e));
    }
    p
}

fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i].clone();
        if c.is_zero() {
            continue;
        }
        q[i - dd] = c.clone();
        for (k, dk) in den.iter().enumerate() {
            r[i - dd + k] -= &c * dk;
        }
    }
    debug_assert!(r.iter().all(Zero::is_zero), "exact division");
    q
}

impl Cyclotomic {
    fn new(m: usize) -> Self {
        Cyclotomic { m, phi: cyclotomic_poly(m) }
    }

    fn deg(&self) -> usize {
        self.phi.len() - 1
    }

    fn zero(&self) -> Elt {
        vec![BigRational::zero(); self.deg()]
    }

    fn reduce(&self, mut p: Vec<BigRational>) -> Elt {
        let n = self.deg();
        for i in (n..p.len()).rev() {
            let c = std::mem::take(&mut p[i]);
            if c.is_zero() {
                continue;
            }
            for k in 0..n {
                p[i - n + k] -= &c * BigRational::from_integer(self.phi[k].clone());
            }
        }
        p.resize(n, BigRational::zero());
        p
    }

    /// `Σ c_j ζ^(s·j)`.
    fn evaluate(&self, coeffs: &[BigInt], s: usize) -> Elt {
        let mut p = vec![BigRational::zero(); self.m.max(self.deg())];
        for (j, c) in coeffs.iter().enumerate() {
            p[(s * j) % self.m] += BigRational::from_integer(c.clone());
        }
        self.reduce(p)
    }

    fn add(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    fn sub(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        let mut p = vec![BigRational::zero(); 2 * self.deg()];
        for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.iter().enumerate() {
                p[i + j] += x * y;
            }
        }
        self.reduce(p)
    }

    fn conj(&self, a: &Elt) -> Elt {
        let mut p = vec![BigRational::zero(); self.m.max(self.deg())];
        for (j, x) in a.iter().enumerate() {
            p[(self.m - j) % self.m] += x;
        }
        self.reduce(p)
    }

    fn is_zero(a: &Elt) -> bool {
        a.iter().all(Zero::is_zero)
    }

    /// Solve `a·s = 1` through the multiplication matrix.
    fn inv(&self, a: &Elt) -> Elt {
        let n = self.deg();
        let mut basis = self.zero();
        // columns: a·x^j
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            basis.iter_mut().for_each(|x| *x = BigRational::zero());
            basis[j] = BigRational::one();
            cols.push(self.mul(a, &basis));
        }
        let mut aug: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = (0..n).map(|j| cols[j][i].clone()).collect();
                row.push(if i == 0 { BigRational::one() } else { BigRational::zero() });
                row
            })
            .collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| !aug[r][c].is_zero()).expect("nonzero field element is invertible");
            aug.swap(c, piv);
            let p = aug[c][c].clone();
            aug[c].iter_mut().for_each(|x| *x /= &p);
            for r in 0..n {
                if r != c && !aug[r][c].is_zero() {
                    let f = aug[r][c].clone();
                    let pivot_row = aug[c].clone();
                    for (x, y) in aug[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        aug.into_iter().map(|r| r[n].clone()).collect()
    }

    /// Sign of a real element, certified.
    fn sign(&self, a: &Elt) -> Ordering {
        debug_assert_eq!(&self.conj(a), a, "sign of a non-real element");
        if Cyclotomic::is_zero(a) {
            return Ordering::Equal;
        }
        let den = a.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        let ints: Vec<BigInt> = a.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
        let budget: BigInt = ints.iter().map(|x| x.abs()).sum::<BigInt>() * 2;
        let mut prec = 64u32;
        loop {
            // each cosine is within 1 unit of 2^-prec; the sum within `budget`
            let s: BigInt = ints.iter().enumerate().map(|(j, x)| x * cos_fixed(j, self.m, prec)).sum();
            if s.abs() > budget {
                return if s.is_positive() { Ordering::Greater } else { Ordering::Less };
            }
            prec *= 2;
        }
    }
}

fn atan_inv_fixed(x: u64, w: u32) -> BigInt {
    // atan(1/x)·2^w by the alternating series
    let one = BigInt::one() << w;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    sum
}

/// `cos(2π j / m)·2^prec`, within one unit.
fn cos_fixed(j: usize, m: usize, prec: u32) -> BigInt {
    let guard = 32;
    let w = prec + guard;
    let pi = atan_inv_fixed(5, w) * 16 - atan_inv_fixed(239, w) * 4;
    let j = j % m;
    let j = j.min(m - j);
    let theta = pi * BigInt::from(2 * j) / BigInt::from(m);
    let theta2 = (&theta * &theta) >> w;
    let mut term = BigInt::one() << w;
    let mut sum = term.clone();
    let mut k = 0u64;
    while !term.is_zero() {
        let next: BigInt = ((&term * &theta2) >> w) / BigInt::from((2 * k + 1) * (2 * k + 2));
        term = -next;
        sum += &term;
        k += 1;
    }
    let half = BigInt::one() << (guard - 1);
    (sum + half) >> guard
}

/// Signature of the form with `g ↦ ω^k`, `ω = e^(2πi/d)`.
pub fn omega_signature(form: &EquivariantHermitianForm, k: usize) -> Result<i64, EtaError> {
    let d = form.modulus;
    if k >= d {
        return Err(EtaError::KOutOfRange { k, d });
    }
    let g = d.gcd(&k);
    let (m, s) = if k == 0 { (1, 0) } else { (d / g, k / g) };
    let field = Cyclotomic::new(m);
    let n = form.size();
    let mut h: Vec<Vec<Elt>> =
        form.entries.iter().map(|row| row.iter().map(|c| field.evaluate(c, s)).collect()).collect();
    let mut signature = 0i64;
    for i in 0..n {
        if Cyclotomic::is_zero(&h[i][i]) {
            if let Some(j) = (i + 1..n).find(|&j| !Cyclotomic::is_zero(&h[j][j])) {
                h.swap(i, j);
                for row in h.iter_mut() {
                    row.swap(i, j);
                }
            } else if let Some(j) = (i + 1..n).find(|&j| !Cyclotomic::is_zero(&h[i][j])) {
                // r_i += c·r_j, col_i += conj(c)·col_j with c = h_ij; new diagonal 2|h_ij|^2
                let c = h[i][j].clone();
                let cb = field.conj(&c);
                let rj = h[j].clone();
                for (x, y) in h[i].iter_mut().zip(&rj) {
                    *x = field.add(x, &field.mul(&c, y));
                }
                for row in h.iter_mut() {
                    let y = row[j].clone();
                    row[i] = field.add(&row[i], &field.mul(&cb, &y));
                }
            } else {
                continue;
            }
        }
        let pivot = h[i][i].clone();
        signature += match field.sign(&pivot) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => unreachable!("pivot is nonzero"),
        };
        let pinv = field.inv(&pivot);
        for r in i + 1..n {
            if Cyclotomic::is_zero(&h[r][i]) {
                continue;
            }
            let f = field.mul(&h[r][i], &pinv);
            let fb = field.conj(&f);
            let ri = h[i].clone();
            for (x, y) in h[r].iter_mut().zip(&ri) {
                *x = field.sub(x, &field.mul(&f, y));
            }
            for row in h.iter_mut() {
                let y = row[i].clone();
                row[r] = field.sub(&row[r], &field.mul(&fb, &y));
            }
        }
    }
    Ok(signature)
}

/// `(σ_k(W) - σ(W)) / n`.
pub fn eta_tilde(b: &BoundingData, k: usize) -> Result<BigRational, EtaError> {
    let s = omega_signature(&b.form, k)?;
    Ok(BigRational::new(BigInt::from(s - b.sigma_w), BigInt::from(b.multiplicity)))
}

/// The invariant mod 1 for a character on `H1(V)` (which closing up `V`
/// leaves unchanged). Torsion values must vanish on `ker ι`.
pub fn eta_knot(bundle: &SeifertBundle, nu: &Character, bounding: &BoundingData, k: usize) -> Result<QmodZ, EtaError> {
    let report = validate(bundle);
    if !report.is_valid() {
        return Err(SeifertError::Invalid(report).into());
    }
    if nu.source() != &bundle.h1_v {
        return Err(EtaError::IncompatibleCharacter(format!(
            "character is defined on {}, H1(V) is {}",
            nu.source(),
            bundle.h1_v
        )));
    }
    if nu.modulus() as usize != bounding.form.modulus() {
        return Err(EtaError::IncompatibleCharacter(format!(
            "character modulus {} but bounding form over Z[Z_{}]",
            nu.modulus(),
            bounding.form.modulus()
        )));
    }
    if bundle.h1_v.torsion_count() > 0 {
        let (module, _) = alexander_torsion(bundle).map_err(SeifertError::from)?;
        let iota = resolve_iota(bundle, module.group())?;
        let t = bundle.h1_v.torsion_count();
        let restricted = Character::new(iota.source().clone(), nu.modulus(), &to_i64(&nu.values()[..t]))?;
        if let Some(k) = iota.kernel_generators().iter().find(|k| restricted.apply(k) != 0) {
            return Err(EtaError::IncompatibleCharacter(format!("nonzero on {k:?} in ker iota")));
        }
    }
    Ok(QmodZ::from_rational(eta_tilde(bounding, k)?))
}

fn to_i64(v: &[u64]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

/// `ν = ν' ∘ ζ` through `Z` for a character on a free group.
pub fn factor_character(nu: &Character) -> Result<(GroupHom, Character), EtaError> {
    if !nu.source().is_free() {
        return Err(EtaError::NotFree);
    }
    let z = AbelianGroup::free(1);
    let zeta = GroupHom::new(nu.source().clone(), z.clone(), IntMatrix::from_rows(&[to_i64(nu.values())]))
        .expect("maps between free groups");
    let nu_prime = Character::new(z, nu.modulus(), &[1])?;
    Ok((zeta, nu_prime))
}

/// Bounding data from a Hermitian form over `Z[t, t^-1]` reduced along
/// `ν'`: the cover is pulled back from the infinite cyclic one, so a single
/// copy bounds.
pub fn bounding_from_factorization(nu_prime: &Character, form: &LaurentMatrix) -> Result<BoundingData, EtaError> {
    if !nu_prime.source().is_free() || nu_prime.source().free_rank() != 1 {
        return Err(EtaError::NotFree);
    }
    let f = EquivariantHermitianForm::from_laurent(nu_prime.modulus() as usize, form)?;
    let sigma = omega_signature(&f, 0)?;
    BoundingData::new(f, 1, sigma)
}

/// `entry(j, i) = entry(i, j)(t^-1)`.
pub fn is_hermitian_laurent(m: &LaurentMatrix) -> bool {
    let bar = |p: &LaurentPoly| LaurentPoly::from_terms(p.terms().map(|(e, c)| (-e, c.clone())));
    m.rows() == m.cols()
        && (0..m.rows()).all(|i| (0..m.cols()).all(|j| *m.get(j, i) == bar(m.get(i, j))))
}
