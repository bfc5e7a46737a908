//! Q/Z-valued symmetric pairings on finite abelian groups, their push-forward
//! along surjections, and equivalence of Farber–Levine structures.

use num_bigint::BigInt;
use thiserror::Error;

use crate::groups::{AbelianGroup, GroupElement, GroupError, GroupHom, QmodZ};
use crate::laurent::{module_isomorphisms, FiniteLaurentModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairingError {
    #[error("pairing group must be finite")]
    NotFinite,
    #[error("pairing table has the wrong shape")]
    Shape,
    #[error("pairing not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("pairing value at ({i}, {j}) is not killed by the modulus of generator {i}")]
    Inconsistent { i: usize, j: usize },
    #[error("map does not start at the pairing group or is not surjective")]
    NotSurjective,
    #[error("pairing does not descend: lambda({kernel:?}, {partner:?}) = {value}")]
    NoDescent { kernel: GroupElement, partner: GroupElement, value: QmodZ },
    #[error("pairing and module live on different groups")]
    GroupMismatch,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Symmetric biadditive pairing stored on generator pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionPairing {
    group: AbelianGroup,
    table: Vec<Vec<QmodZ>>,
}

impl TorsionPairing {
    pub fn new(group: AbelianGroup, table: Vec<Vec<QmodZ>>) -> Result<Self, PairingError> {
        if !group.is_finite() {
            return Err(PairingError::NotFinite);
        }
        let n = group.ngens();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(PairingError::Shape);
        }
        for i in 0..n {
            for j in 0..n {
                if table[i][j] != table[j][i] {
                    return Err(PairingError::NotSymmetric(i, j));
                }
                if !table[i][j].scale(&group.modulus(i)).is_zero() {
                    return Err(PairingError::Inconsistent { i, j });
                }
            }
        }
        Ok(TorsionPairing { group, table })
    }

    /// From `(numerator, denominator)` pairs.
    pub fn from_fractions(group: AbelianGroup, entries: &[&[(i64, i64)]]) -> Result<Self, PairingError> {
        let table = entries.iter().map(|r| r.iter().map(|&(n, d)| QmodZ::new(n, d)).collect()).collect();
        TorsionPairing::new(group, table)
    }

    pub fn zero(group: &AbelianGroup) -> Result<Self, PairingError> {
        let n = group.ngens();
        TorsionPairing::new(group.clone(), vec![vec![QmodZ::zero(); n]; n])
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn table(&self) -> &[Vec<QmodZ>] {
        &self.table
    }

    pub fn value(&self, x: &GroupElement, y: &GroupElement) -> QmodZ {
        let mut acc = QmodZ::zero();
        for (i, xi) in x.coords().iter().enumerate() {
            for (j, yj) in y.coords().iter().enumerate() {
                acc = acc.add(&self.table[i][j].scale(&(xi * yj)));
            }
        }
        acc
    }

    /// No nonzero element pairs trivially with every generator.
    pub fn is_nondegenerate(&self) -> Result<bool, GroupError> {
        let gens: Vec<GroupElement> = (0..self.group.ngens()).map(|i| self.group.generator(i)).collect();
        Ok(self.group.elements()?.iter().all(|x| x.is_zero() || gens.iter().any(|g| !self.value(x, g).is_zero())))
    }

    /// `q(f x, f y)` on the source of `f`.
    pub fn pullback(&self, f: &GroupHom) -> Result<TorsionPairing, PairingError> {
        if f.target() != &self.group {
            return Err(PairingError::GroupMismatch);
        }
        let src = f.source();
        let imgs: Vec<GroupElement> = (0..src.ngens()).map(|i| f.apply(&src.generator(i))).collect();
        let table = imgs.iter().map(|x| imgs.iter().map(|y| self.value(x, y)).collect()).collect();
        TorsionPairing::new(src.clone(), table)
    }

    /// `f` carries `self` onto `other`: `other(f g_i, f g_j) = self(g_i, g_j)`.
    pub fn is_carried_by(&self, f: &GroupHom, other: &TorsionPairing) -> bool {
        other.pullback(f).is_ok_and(|p| p.table == self.table)
    }
}

/// Push `p` forward along a surjection, or report a kernel element that pairs
/// nontrivially.
pub fn induce(p: &TorsionPairing, f: &GroupHom) -> Result<TorsionPairing, PairingError> {
    if f.source() != &p.group || !f.is_surjective() {
        return Err(PairingError::NotSurjective);
    }
    let src = &p.group;
    for k in f.kernel_generators() {
        for j in 0..src.ngens() {
            let g = src.generator(j);
            let value = p.value(&k, &g);
            if !value.is_zero() {
                return Err(PairingError::NoDescent { kernel: k, partner: g, value });
            }
        }
    }
    let tgt = f.target();
    let lifts: Vec<GroupElement> =
        (0..tgt.ngens()).map(|i| f.preimage(&tgt.generator(i)).expect("surjective")).collect();
    let table = lifts.iter().map(|x| lifts.iter().map(|y| p.value(x, y)).collect()).collect();
    TorsionPairing::new(tgt.clone(), table)
}

/// A finite module with its pairing on the same group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarberLevineStructure {
    module: FiniteLaurentModule,
    pairing: TorsionPairing,
}

impl FarberLevineStructure {
    pub fn new(module: FiniteLaurentModule, pairing: TorsionPairing) -> Result<Self, PairingError> {
        if module.group() != pairing.group() {
            return Err(PairingError::GroupMismatch);
        }
        Ok(FarberLevineStructure { module, pairing })
    }

    pub fn module(&self) -> &FiniteLaurentModule {
        &self.module
    }

    pub fn pairing(&self) -> &TorsionPairing {
        &self.pairing
    }

    /// Whether `λ(τx, τy) = λ(x, y)`. Measured, never assumed.
    pub fn is_tau_invariant(&self) -> bool {
        self.pairing.is_carried_by(self.module.tau(), &self.pairing)
    }
}

/// A module isomorphism carrying `λ1` to `λ2`, or `None` after exhausting
/// all `τ`-commuting isomorphisms.
pub fn fl_equivalent(
    f1: &FarberLevineStructure,
    f2: &FarberLevineStructure,
    bound: u64,
) -> Result<Option<GroupHom>, GroupError> {
    let mut isos = module_isomorphisms(&f1.module, &f2.module, bound)?;
    Ok(isos.find(|f| f1.pairing.is_carried_by(f, &f2.pairing)))
}

/// `x ↦ k·x` on a group.
pub fn multiplication(g: &AbelianGroup, k: i64) -> Result<GroupHom, GroupError> {
    GroupHom::new(g.clone(), g.clone(), crate::linalg::IntMatrix::identity(g.ngens()).scale(&BigInt::from(k)))
}
