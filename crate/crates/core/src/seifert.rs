//! Algebraic Seifert data: homology of the hypersurface `V` and of the cut-open
//! complement `Y`, the two pushoffs, and the linking matrix of the closed-up
//! hypersurface.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::groups::{from_presentation, AbelianGroup, GroupError, GroupHom, QmodZ};
use crate::laurent::{alexander_torsion, AlexanderError, FiniteLaurentModule, TorsionPath};
use crate::linalg::{determinant, rational_inverse, IntMatrix};
use crate::pairing::{induce, FarberLevineStructure, PairingError, TorsionPairing};

/// Identifier plus free-form description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotName {
    pub id: String,
    pub description: String,
}

impl KnotName {
    pub fn new(id: impl Into<String>, description: impl Into<String>) -> Self {
        KnotName { id: id.into(), description: description.into() }
    }
}

/// The map from `coker(Λ)` to the Alexander torsion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Iota {
    /// Identity, when the two groups are structurally equal.
    Derive,
    Given(IntMatrix),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertBundle {
    pub h1_v: AbelianGroup,
    pub h1_y: AbelianGroup,
    /// `A`
    pub pushoff_pos: GroupHom,
    /// `B`
    pub pushoff_neg: GroupHom,
    pub linking_matrix: IntMatrix,
    pub iota: Iota,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    PushoffGroups,
    LinkingNotSquare,
    LinkingNotSymmetric,
    LinkingSingular,
    LinkingTorsionMismatch { coker: AbelianGroup, torsion: AbelianGroup },
    FreeRankMismatch { v: usize, y: usize },
    SingularFreeBlock,
    IotaShape,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PushoffGroups => write!(f, "pushoff maps do not run H1(V) -> H1(Y)"),
            Violation::LinkingNotSquare => write!(f, "linking matrix not square"),
            Violation::LinkingNotSymmetric => write!(f, "linking matrix not symmetric"),
            Violation::LinkingSingular => write!(f, "linking matrix singular"),
            Violation::LinkingTorsionMismatch { coker, torsion } => {
                write!(f, "coker(linking matrix) = {coker} but Tor H1(V) = {torsion}")
            }
            Violation::FreeRankMismatch { v, y } => write!(f, "free ranks differ: H1(V) has {v}, H1(Y) has {y}"),
            Violation::SingularFreeBlock => write!(f, "det(B-A)=0 on free parts"),
            Violation::IotaShape => write!(f, "iota matrix has the wrong shape"),
        }
    }
}

/// Every violated condition; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        let lines: Vec<String> = self.violations.iter().map(ToString::to_string).collect();
        write!(f, "{}", lines.join("\n"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    #[error("invalid bundle:\n{0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
    #[error("iota cannot be derived: coker(linking matrix) = {coker}, Alexander torsion = {torsion}")]
    IotaUnresolvable { coker: AbelianGroup, torsion: AbelianGroup },
    #[error("iota is not surjective onto the Alexander torsion")]
    NotSurjective,
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

impl SeifertBundle {
    /// Bundle from raw matrices in canonical coordinates.
    pub fn from_matrices(
        h1_v: AbelianGroup,
        h1_y: AbelianGroup,
        a: IntMatrix,
        b: IntMatrix,
        linking_matrix: IntMatrix,
        iota: Iota,
    ) -> Result<Self, GroupError> {
        let pushoff_pos = GroupHom::new(h1_v.clone(), h1_y.clone(), a)?;
        let pushoff_neg = GroupHom::new(h1_v.clone(), h1_y.clone(), b)?;
        Ok(SeifertBundle { h1_v, h1_y, pushoff_pos, pushoff_neg, linking_matrix, iota })
    }

    /// The trivial knot: every group trivial, empty linking matrix.
    pub fn trivial() -> Self {
        let g = AbelianGroup::trivial();
        SeifertBundle::from_matrices(
            g.clone(),
            g,
            IntMatrix::zeros(0, 0),
            IntMatrix::zeros(0, 0),
            IntMatrix::zeros(0, 0),
            Iota::Derive,
        )
        .expect("empty maps")
    }

    /// `H1(V) = H1(Y) = Z/n` with `A = [a]`, `B = [b]` and linking matrix `[n]`.
    pub fn cyclic(n: i64, a: i64, b: i64) -> Result<Self, GroupError> {
        let g = AbelianGroup::cyclic(n);
        SeifertBundle::from_matrices(
            g.clone(),
            g,
            IntMatrix::from_rows(&[[a]]),
            IntMatrix::from_rows(&[[b]]),
            IntMatrix::from_rows(&[[n]]),
            Iota::Derive,
        )
    }

    fn block(h: &GroupHom, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IntMatrix {
        let r: Vec<usize> = rows.collect();
        let c: Vec<usize> = cols.collect();
        h.matrix().select_rows(&r).select_cols(&c)
    }

    fn torsion_block(&self, h: &GroupHom) -> GroupHom {
        let (tv, ty) = (self.h1_v.torsion_count(), self.h1_y.torsion_count());
        GroupHom::new(self.h1_v.torsion_subgroup(), self.h1_y.torsion_subgroup(), Self::block(h, 0..ty, 0..tv))
            .expect("torsion maps into torsion")
    }

    fn free_block(&self, h: &GroupHom) -> IntMatrix {
        let (tv, ty) = (self.h1_v.torsion_count(), self.h1_y.torsion_count());
        Self::block(h, ty..self.h1_y.ngens(), tv..self.h1_v.ngens())
    }

    /// `A` restricted to torsion, `Tor H1(V) -> Tor H1(Y)`.
    pub fn pushoff_pos_torsion(&self) -> GroupHom {
        self.torsion_block(&self.pushoff_pos)
    }

    pub fn pushoff_neg_torsion(&self) -> GroupHom {
        self.torsion_block(&self.pushoff_neg)
    }

    /// Free-to-free block of `A`.
    pub fn pushoff_pos_free(&self) -> IntMatrix {
        self.free_block(&self.pushoff_pos)
    }

    pub fn pushoff_neg_free(&self) -> IntMatrix {
        self.free_block(&self.pushoff_neg)
    }

    pub fn linking_group(&self) -> AbelianGroup {
        from_presentation(&self.linking_matrix).group
    }
}

pub fn validate(bundle: &SeifertBundle) -> ValidationReport {
    let mut violations = vec![];
    for h in [&bundle.pushoff_pos, &bundle.pushoff_neg] {
        if h.source() != &bundle.h1_v || h.target() != &bundle.h1_y {
            violations.push(Violation::PushoffGroups);
            break;
        }
    }
    let lam = &bundle.linking_matrix;
    if !lam.is_square() {
        violations.push(Violation::LinkingNotSquare);
    } else {
        if !lam.is_symmetric() {
            violations.push(Violation::LinkingNotSymmetric);
        }
        if determinant(lam).expect("square").is_zero() {
            violations.push(Violation::LinkingSingular);
        } else {
            let coker = bundle.linking_group();
            let torsion = bundle.h1_v.torsion_subgroup();
            if coker != torsion {
                violations.push(Violation::LinkingTorsionMismatch { coker, torsion });
            }
        }
    }
    let (fv, fy) = (bundle.h1_v.free_rank(), bundle.h1_y.free_rank());
    if fv != fy {
        violations.push(Violation::FreeRankMismatch { v: fv, y: fy });
    } else if !violations.contains(&Violation::PushoffGroups) {
        let d = &bundle.pushoff_neg_free() - &bundle.pushoff_pos_free();
        if determinant(&d).expect("square").is_zero() {
            violations.push(Violation::SingularFreeBlock);
        }
    }
    if let Iota::Given(m) = &bundle.iota {
        if lam.is_square() && m.cols() != bundle.linking_group().ngens() {
            violations.push(Violation::IotaShape);
        }
    }
    ValidationReport { violations }
}

/// `λ(x, y) = xᵀ Λ⁻¹ y mod 1` on `coker Λ`, in canonical generators.
pub fn linking_form(lam: &IntMatrix) -> Result<TorsionPairing, SeifertError> {
    let inv = rational_inverse(lam)
        .map_err(|_| SeifertError::Invalid(ValidationReport { violations: vec![Violation::LinkingNotSquare] }))?
        .ok_or(SeifertError::Invalid(ValidationReport { violations: vec![Violation::LinkingSingular] }))?;
    let pres = from_presentation(lam);
    let n = pres.group.ngens();
    let lifts: Vec<Vec<BigInt>> = (0..n).map(|i| pres.lift.col(i)).collect();
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut acc = num_rational::BigRational::zero();
                    for (r, xr) in lifts[i].iter().enumerate() {
                        if xr.is_zero() {
                            continue;
                        }
                        for (c, yc) in lifts[j].iter().enumerate() {
                            acc += &inv[r][c] * num_rational::BigRational::from_integer(xr * yc);
                        }
                    }
                    QmodZ::from_rational(acc)
                })
                .collect()
        })
        .collect();
    Ok(TorsionPairing::new(pres.group, table)?)
}

/// `ι` as a homomorphism onto the given Alexander torsion group.
pub fn resolve_iota(bundle: &SeifertBundle, torsion: &AbelianGroup) -> Result<GroupHom, SeifertError> {
    let coker = bundle.linking_group();
    match &bundle.iota {
        Iota::Derive if &coker == torsion => Ok(GroupHom::identity(&coker)),
        Iota::Derive => Err(SeifertError::IotaUnresolvable { coker, torsion: torsion.clone() }),
        Iota::Given(m) => Ok(GroupHom::new(coker, torsion.clone(), m.clone())?),
    }
}

/// The Farber–Levine structure together with the path that produced the module.
#[derive(Clone, Debug)]
pub struct FarberLevineResult {
    pub structure: FarberLevineStructure,
    pub path: TorsionPath,
    pub iota: GroupHom,
}

pub fn farber_levine(bundle: &SeifertBundle) -> Result<FarberLevineResult, SeifertError> {
    let report = validate(bundle);
    if !report.is_valid() {
        return Err(SeifertError::Invalid(report));
    }
    let (module, path) = alexander_torsion(bundle)?;
    farber_levine_with_module(bundle, module, path)
}

/// As [`farber_levine`] with a precomputed torsion module.
pub fn farber_levine_with_module(
    bundle: &SeifertBundle,
    module: FiniteLaurentModule,
    path: TorsionPath,
) -> Result<FarberLevineResult, SeifertError> {
    let iota = resolve_iota(bundle, module.group())?;
    if !iota.is_surjective() {
        return Err(SeifertError::NotSurjective);
    }
    let source = linking_form(&bundle.linking_matrix)?;
    let pairing = induce(&source, &iota)?;
    let structure = FarberLevineStructure::new(module, pairing)?;
    Ok(FarberLevineResult { structure, path, iota })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::GroupElement;

    #[test]
    fn trivial_bundle_is_valid() {
        let b = SeifertBundle::trivial();
        assert!(validate(&b).is_valid());
        let fl = farber_levine(&b).unwrap();
        assert!(fl.structure.module().group().is_trivial());
    }

    #[test]
    fn violations_are_listed() {
        let mut b = SeifertBundle::cyclic(3, 1, -1).unwrap();
        b.linking_matrix = IntMatrix::from_rows(&[[1, 1], [0, 3]]);
        let r = validate(&b);
        assert!(r.violations.contains(&Violation::LinkingNotSymmetric));
        assert!(r.to_string().contains("linking matrix not symmetric"));

        let z = AbelianGroup::free(1);
        let one = IntMatrix::from_rows(&[[1]]);
        let b = SeifertBundle::from_matrices(z.clone(), z, one.clone(), one, IntMatrix::zeros(0, 0), Iota::Derive)
            .unwrap();
        let r = validate(&b);
        assert_eq!(r.violations, vec![Violation::SingularFreeBlock]);
        assert!(r.to_string().contains("det(B-A)=0"));
    }

    #[test]
    fn cyclic_three_structure() {
        let b = SeifertBundle::cyclic(3, 1, -1).unwrap();
        let fl = farber_levine(&b).unwrap();
        let s = &fl.structure;
        assert_eq!(s.module().group(), &AbelianGroup::cyclic(3));
        assert_eq!(s.module().tau().matrix(), &IntMatrix::from_rows(&[[2]]));
        assert_eq!(s.pairing().table()[0][0], QmodZ::new(1, 3));
        assert_eq!(fl.path, TorsionPath::Exact);
    }

    #[test]
    fn collapsed_linking_form() {
        let lam = IntMatrix::from_rows(&[[2, 1], [1, 2]]);
        let p = linking_form(&lam).unwrap();
        assert_eq!(p.group(), &AbelianGroup::cyclic(3));
        assert_eq!(p.table()[0][0], QmodZ::new(2, 3));
        // brute-force descent: every pair of lifts of the same classes agrees
        let pres = from_presentation(&lam);
        let inv = rational_inverse(&lam).unwrap().unwrap();
        let amb: Vec<Vec<BigInt>> = (0..3)
            .flat_map(|a| (0..3).map(move |b| vec![BigInt::from(a), BigInt::from(b)]))
            .collect();
        for x in &amb {
            for y in &amb {
                let direct: num_rational::BigRational = (0..2)
                    .flat_map(|r| (0..2).map(move |c| (r, c)))
                    .map(|(r, c)| &inv[r][c] * num_rational::BigRational::from_integer(&x[r] * &y[c]))
                    .sum();
                let gx: GroupElement = pres.projection.apply(&AbelianGroup::free(2).element(x));
                let gy = pres.projection.apply(&AbelianGroup::free(2).element(y));
                assert_eq!(p.value(&gx, &gy), QmodZ::from_rational(direct));
            }
        }
    }

    #[test]
    fn derive_fails_on_mismatch() {
        let mut b = SeifertBundle::cyclic(3, 1, -1).unwrap();
        b.iota = Iota::Derive;
        let m = FiniteLaurentModule::trivial();
        assert!(matches!(
            farber_levine_with_module(&b, m, TorsionPath::Exact),
            Err(SeifertError::IotaUnresolvable { .. })
        ));
    }
}
