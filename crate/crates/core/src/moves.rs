//! Algebraic model of one (1,2)-pass-move: a middle bundle and two children,
//! each obtained by attaching a 1-handle to `V` (a new free generator of
//! `H1(V)`) while `H1(Y)` is unchanged.
//!
//! Because the children gain a free generator of `H1(V)` and keep `H1(Y)`,
//! the middle has `rank H1(Y) = rank H1(V) + 1`. The trivial middle is
//! `H1(V) = 0`, `H1(Y) = Z`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::groups::{automorphisms, subgroup_generated, AbelianGroup, GroupError, GroupHom};
use crate::laurent::{
    alexander_torsion, build_p, det_laurent, module_isomorphic, AlexanderError, TorsionPath,
    WindowPresentation,
};
use crate::linalg::{cokernel, determinant, IntMatrix};
use crate::pairing::fl_equivalent;
use crate::seifert::{farber_levine, validate, FarberLevineResult, Iota, SeifertBundle, SeifertError, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("invalid middle: {0}")]
    InvalidMiddle(String),
    #[error("invalid decoration: {0}")]
    InvalidDecoration(String),
    #[error(transparent)]
    Seifert(#[from] SeifertError),
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Images of the new 1-handle generator under `A` and `B` for each child, in
/// `H1(Y)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveDecoration {
    pub pos_gt: Vec<BigInt>,
    pub neg_gt: Vec<BigInt>,
    pub pos_lt: Vec<BigInt>,
    pub neg_lt: Vec<BigInt>,
}

impl MoveDecoration {
    pub fn from_i64(pos_gt: &[i64], neg_gt: &[i64], pos_lt: &[i64], neg_lt: &[i64]) -> Self {
        let v = |x: &[i64]| x.iter().map(|&c| BigInt::from(c)).collect();
        MoveDecoration { pos_gt: v(pos_gt), neg_gt: v(neg_gt), pos_lt: v(pos_lt), neg_lt: v(neg_lt) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveTriple {
    pub middle: SeifertBundle,
    pub child_gt: SeifertBundle,
    pub child_lt: SeifertBundle,
    pub decoration: MoveDecoration,
}

/// Checks for a middle bundle; the free-rank condition differs from
/// [`validate`] (one more free generator in `H1(Y)`).
pub fn validate_middle(middle: &SeifertBundle) -> Result<(), MoveError> {
    let report = validate(middle);
    let rest: Vec<String> = report
        .violations
        .iter()
        .filter(|v| !matches!(v, Violation::FreeRankMismatch { .. } | Violation::SingularFreeBlock))
        .map(ToString::to_string)
        .collect();
    if !rest.is_empty() {
        return Err(MoveError::InvalidMiddle(rest.join("; ")));
    }
    let (fv, fy) = (middle.h1_v.free_rank(), middle.h1_y.free_rank());
    if fy != fv + 1 {
        return Err(MoveError::InvalidMiddle(format!(
            "rank H1(Y) must be rank H1(V) + 1, got {fy} and {fv}"
        )));
    }
    Ok(())
}

fn child(middle: &SeifertBundle, pos: &[BigInt], neg: &[BigInt]) -> Result<SeifertBundle, MoveError> {
    let ny = middle.h1_y.ngens();
    if pos.len() != ny || neg.len() != ny {
        return Err(MoveError::InvalidDecoration(format!("decoration vectors need {ny} entries")));
    }
    let h1_v = AbelianGroup::new(middle.h1_v.free_rank() + 1, middle.h1_v.torsion_moduli().to_vec())?;
    let a = middle.pushoff_pos.matrix().hstack(&IntMatrix::column(pos));
    let b = middle.pushoff_neg.matrix().hstack(&IntMatrix::column(neg));
    let c = SeifertBundle::from_matrices(
        h1_v,
        middle.h1_y.clone(),
        a,
        b,
        middle.linking_matrix.clone(),
        middle.iota.clone(),
    )?;
    let report = validate(&c);
    if !report.is_valid() {
        return Err(MoveError::InvalidDecoration(report.to_string()));
    }
    Ok(c)
}

pub fn apply_pass_move(middle: &SeifertBundle, dec: &MoveDecoration) -> Result<MoveTriple, MoveError> {
    validate_middle(middle)?;
    let t = middle.h1_y.torsion_count();
    let reduce = |v: &[BigInt]| middle.h1_y.reduce(v);
    for (name, x, y) in [("A", &dec.pos_gt, &dec.pos_lt), ("B", &dec.neg_gt, &dec.neg_lt)] {
        if x.len() == y.len() && x.len() == middle.h1_y.ngens() && reduce(x)[..t] != reduce(y)[..t] {
            return Err(MoveError::InvalidDecoration(format!(
                "torsion components of {name} differ between the children"
            )));
        }
    }
    let child_gt = child(middle, &dec.pos_gt, &dec.neg_gt)?;
    let child_lt = child(middle, &dec.pos_lt, &dec.neg_lt)?;
    Ok(MoveTriple { middle: middle.clone(), child_gt, child_lt, decoration: dec.clone() })
}

/// The trivial middle with the decoration `A = 0, B = 1` for `>` and
/// `A = 1, B = 0` for `<`.
pub fn trivial_triple() -> MoveTriple {
    let middle = SeifertBundle::from_matrices(
        AbelianGroup::trivial(),
        AbelianGroup::free(1),
        IntMatrix::zeros(1, 0),
        IntMatrix::zeros(1, 0),
        IntMatrix::zeros(0, 0),
        Iota::Derive,
    )
    .expect("empty maps");
    apply_pass_move(&middle, &MoveDecoration::from_i64(&[0], &[1], &[1], &[0])).expect("valid")
}

/// Outcome of checking both conclusions on one triple.
#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub lt: FarberLevineResult,
    pub gt: FarberLevineResult,
    /// `f: Tor(<) -> Tor(>)` commuting with `t`.
    pub module_witness: Option<GroupHom>,
    /// Same, also carrying the pairing.
    pub fl_witness: Option<GroupHom>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.module_witness.is_some() && self.fl_witness.is_some()
    }
}

pub fn verify_move_invariance(t: &MoveTriple, bound: u64) -> Result<InvarianceReport, MoveError> {
    let lt = farber_levine(&t.child_lt)?;
    let gt = farber_levine(&t.child_gt)?;
    let module_witness = module_isomorphic(lt.structure.module(), gt.structure.module(), bound)?;
    let fl_witness = fl_equivalent(&lt.structure, &gt.structure, bound)?;
    Ok(InvarianceReport { lt, gt, module_witness, fl_witness })
}

/// The three exactness checks on a truncated presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactnessReport {
    pub window: usize,
    /// Torsion of `H1(Y)` in every degree generates the torsion submodule.
    pub surjective: bool,
    /// Images of torsion relations from `H1(V)` vanish.
    pub image_in_kernel: bool,
    /// `det P(1) != 0`, `det P(t) != 0` and the free relations are independent.
    pub rationally_injective: bool,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.surjective && self.image_in_kernel && self.rationally_injective
    }
}

pub fn check_exactness(bundle: &SeifertBundle, n: usize) -> Result<ExactnessReport, MoveError> {
    let narrow = WindowPresentation::new(bundle, n);
    let wide = WindowPresentation::new(bundle, 2 * n);
    let cn = cokernel(&narrow.relations);
    let cw = cokernel(&wide.relations);
    let tw = cw.torsion_count();
    let wide_torsion = AbelianGroup::new(0, cw.invariant_factors[..tw].to_vec())?;
    let project = |v: &[BigInt]| cw.projection.mul_vec(&wide.embed(&narrow, v, 0));

    let torsion_image = |lifts: &mut dyn Iterator<Item = Vec<BigInt>>| -> Option<IntMatrix> {
        let mut cols = vec![];
        for l in lifts {
            let v = project(&l);
            if v[tw..].iter().any(|x| !x.is_zero()) {
                return None;
            }
            cols.push(v[..tw].to_vec());
        }
        Some(if cols.is_empty() { IntMatrix::zeros(tw, 0) } else { IntMatrix::from_big_rows(cols, tw).transpose() })
    };
    let h = torsion_image(&mut (0..cn.torsion_count()).map(|i| cn.lift.col(i)))
        .map(|g| subgroup_generated(&wide_torsion, &g).group);

    let ty = bundle.h1_y.torsion_count();
    let ny = bundle.h1_y.ngens();
    let w = n as i64;
    let dim = narrow.ambient_dim();
    let mut y_gens = (-w..=w).flat_map(|k| {
        (0..ty).map(move |i| {
            let mut v = vec![BigInt::zero(); dim];
            v[((k + w) as usize) * ny + i] = BigInt::one();
            v
        })
    });
    let g = torsion_image(&mut y_gens).map(|g| subgroup_generated(&wide_torsion, &g).group);
    let surjective = matches!((&g, &h), (Some(g), Some(h)) if g.order() == h.order());

    let tv = bundle.h1_v.torsion_count();
    let nv = bundle.h1_v.ngens();
    let image_in_kernel = (0..2 * n).all(|k| {
        (0..tv).all(|j| {
            let v = project(&narrow.relations.col(k * nv + j));
            v[tw..].iter().all(Zero::is_zero) && wide_torsion.reduce(&v[..tw]).iter().all(Zero::is_zero)
        })
    });

    let (af, bf) = (bundle.pushoff_pos_free(), bundle.pushoff_neg_free());
    let rationally_injective = af.is_square() && {
        let p1 = determinant(&(&bf - &af)).expect("square");
        let pt = det_laurent(&build_p(&af, &bf).map_err(AlexanderError::from)?).map_err(AlexanderError::from)?;
        let free_cols: Vec<usize> = (0..2 * n).flat_map(|k| (tv..nv).map(move |j| k * nv + j)).collect();
        let rel = narrow.relations.select_cols(&free_cols);
        !p1.is_zero() && !pt.is_zero() && rel.rank() == free_cols.len()
    };
    Ok(ExactnessReport { window: n, surjective, image_in_kernel, rationally_injective })
}

/// Bounds for [`random_move_corpus`].
#[derive(Clone, Debug)]
pub struct CorpusBounds {
    /// Free rank of `H1(V)` in the children.
    pub max_free_rank: usize,
    pub torsion_choices: Vec<Vec<i64>>,
    pub entry_bound: i64,
}

impl Default for CorpusBounds {
    fn default() -> Self {
        let mut torsion_choices: Vec<Vec<i64>> = (2..=9).map(|d| vec![d]).collect();
        torsion_choices.extend([vec![2, 2], vec![2, 4], vec![3, 3]]);
        CorpusBounds { max_free_rank: 3, torsion_choices, entry_bound: 2 }
    }
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    if n == 0 {
        return m;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let c = BigInt::from(rng.gen_range(-2i64..=2));
        let mut rows = m.to_rows();
        let rj = rows[j].clone();
        for (x, y) in rows[i].iter_mut().zip(&rj) {
            *x += &c * y;
        }
        m = IntMatrix::from_big_rows(rows, n);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let signs: Vec<BigInt> = (0..n).map(|_| BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
    &IntMatrix::diag(&signs) * &m.select_rows(&perm)
}

fn random_entries(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    IntMatrix::new(rows, cols, (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect())
}

fn random_linking(rng: &mut ChaCha8Rng, torsion: &[i64]) -> IntMatrix {
    if let [d] = torsion {
        if rng.gen_bool(0.5) {
            // [[a, 1], [1, b]] with ab - 1 = ±d presents Z/d
            let target = if rng.gen_bool(0.5) { d + 1 } else { 1 - d };
            let divisors: Vec<i64> =
                (1..=target.abs()).filter(|a| target % a == 0).flat_map(|a| [a, -a]).collect();
            let a = *divisors.choose(rng).expect("nonempty");
            return IntMatrix::from_rows(&[[a, 1], [1, target / a]]);
        }
    }
    let t = torsion.len();
    let diag: Vec<BigInt> =
        torsion.iter().map(|&d| BigInt::from(if rng.gen_bool(0.5) { d } else { -d })).collect();
    let u = random_unimodular(rng, t);
    &(&u.transpose() * &IntMatrix::diag(&diag)) * &u
}

/// Deterministic stream of valid triples. Torsion of `H1(V)` and `H1(Y)`
/// agrees, the torsion pushoff blocks are automorphisms, and every child's
/// free block `B - A` is unimodular.
pub fn random_move_corpus(seed: u64, count: usize, bounds: &CorpusBounds) -> Vec<MoveTriple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let torsion = bounds.torsion_choices.choose(&mut rng).expect("torsion choices").clone();
        let fv = rng.gen_range(0..bounds.max_free_rank.max(1));
        let fy = fv + 1;
        let t = torsion.len();
        let tg = AbelianGroup::from_moduli(0, &torsion);
        let auts: Vec<GroupHom> = automorphisms(&tg, u64::MAX).expect("small group").collect();
        let a_tt = auts.choose(&mut rng).expect("identity").matrix().clone();
        let b_tt = auts.choose(&mut rng).expect("identity").matrix().clone();
        let eb = bounds.entry_bound;
        let torsion_entries = |rng: &mut ChaCha8Rng, cols: usize| {
            IntMatrix::new(
                t,
                cols,
                (0..t * cols).map(|k| BigInt::from(rng.gen_range(0..torsion[k / cols.max(1)]))).collect(),
            )
        };
        let a_tf = torsion_entries(&mut rng, fv);
        let b_tf = torsion_entries(&mut rng, fv);
        let w = random_unimodular(&mut rng, fy);
        let first: Vec<usize> = (0..fv).collect();
        let d = w.select_cols(&first);
        let a_ff = random_entries(&mut rng, fy, fv, eb);
        let b_ff = &a_ff + &d;
        let a = a_tt.hstack(&a_tf).vstack(&IntMatrix::zeros(fy, t).hstack(&a_ff));
        let b = b_tt.hstack(&b_tf).vstack(&IntMatrix::zeros(fy, t).hstack(&b_ff));
        let h1_v = AbelianGroup::from_moduli(fv, &torsion);
        let h1_y = AbelianGroup::from_moduli(fy, &torsion);
        let lam = random_linking(&mut rng, &torsion);
        let middle = SeifertBundle::from_matrices(h1_v, h1_y, a, b, lam, Iota::Derive).expect("well defined");

        let wcol = w.col(fv);
        let c: Vec<BigInt> = (0..fv).map(|_| BigInt::from(rng.gen_range(-eb..=eb))).collect();
        let dc = d.mul_vec(&c);
        let sign = BigInt::from(if rng.gen_bool(0.5) { 1 } else { -1 });
        let lt_step: Vec<BigInt> = wcol.iter().zip(&dc).map(|(x, y)| &sign * x + y).collect();
        let tors: Vec<BigInt> = torsion.iter().map(|&m| BigInt::from(rng.gen_range(0..m))).collect();
        let tors_b: Vec<BigInt> = torsion.iter().map(|&m| BigInt::from(rng.gen_range(0..m))).collect();
        let free = |rng: &mut ChaCha8Rng| -> Vec<BigInt> { (0..fy).map(|_| BigInt::from(rng.gen_range(-eb..=eb))).collect() };
        let pos_gt = free(&mut rng);
        let pos_lt = free(&mut rng);
        let neg_gt: Vec<BigInt> = pos_gt.iter().zip(&wcol).map(|(x, y)| x + y).collect();
        let neg_lt: Vec<BigInt> = pos_lt.iter().zip(&lt_step).map(|(x, y)| x + y).collect();
        let cat = |a: &[BigInt], b: &[BigInt]| [a, b].concat();
        let dec = MoveDecoration {
            pos_gt: cat(&tors, &pos_gt),
            neg_gt: cat(&tors_b, &neg_gt),
            pos_lt: cat(&tors, &pos_lt),
            neg_lt: cat(&tors_b, &neg_lt),
        };
        let triple = apply_pass_move(&middle, &dec).expect("corpus triples are valid by construction");
        debug_assert!(triple_is_small(&triple));
        out.push(triple);
    }
    out
}

fn triple_is_small(t: &MoveTriple) -> bool {
    t.child_gt.h1_v.torsion_subgroup().order().and_then(|o| o.to_u64()).is_some_and(|o| o <= 9)
        && t.child_gt.linking_matrix.entries().iter().all(|x| x.abs() < BigInt::from(1_000_000))
}

/// Torsion path for both children, for reporting.
pub fn child_paths(t: &MoveTriple) -> Result<(TorsionPath, TorsionPath), MoveError> {
    Ok((alexander_torsion(&t.child_lt)?.1, alexander_torsion(&t.child_gt)?.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::DEFAULT_AUT_BOUND;

    fn z3_middle() -> SeifertBundle {
        let y = AbelianGroup::from_moduli(1, &[3]);
        SeifertBundle::from_matrices(
            AbelianGroup::cyclic(3),
            y,
            IntMatrix::from_rows(&[[1], [0]]),
            IntMatrix::from_rows(&[[-1], [0]]),
            IntMatrix::from_rows(&[[3]]),
            Iota::Derive,
        )
        .unwrap()
    }

    #[test]
    fn trivial_triple_children() {
        let t = trivial_triple();
        for c in [&t.child_gt, &t.child_lt] {
            assert_eq!(c.h1_v, AbelianGroup::free(1));
            assert_eq!(c.h1_y, AbelianGroup::free(1));
            assert!(validate(c).is_valid());
        }
        let r = verify_move_invariance(&t, DEFAULT_AUT_BOUND).unwrap();
        assert!(r.passed());
        assert!(r.lt.structure.module().group().is_trivial());
    }

    #[test]
    fn z3_triple() {
        let dec = MoveDecoration::from_i64(&[1, 0], &[1, 1], &[1, 2], &[1, 1]);
        let t = apply_pass_move(&z3_middle(), &dec).unwrap();
        assert_eq!(t.child_gt.pushoff_pos.matrix().col(0), t.child_lt.pushoff_pos.matrix().col(0));
        assert_ne!(t.child_gt.pushoff_pos.matrix().col(1), t.child_lt.pushoff_pos.matrix().col(1));
        let r = verify_move_invariance(&t, DEFAULT_AUT_BOUND).unwrap();
        assert!(r.passed());
        for c in [&t.child_gt, &t.child_lt] {
            assert!(check_exactness(c, 4).unwrap().passed());
        }
    }

    #[test]
    fn torsion_mismatch_is_rejected() {
        let dec = MoveDecoration::from_i64(&[1, 0], &[1, 1], &[2, 2], &[1, 1]);
        assert!(matches!(apply_pass_move(&z3_middle(), &dec), Err(MoveError::InvalidDecoration(_))));
    }

    #[test]
    fn singular_child_is_rejected() {
        let dec = MoveDecoration::from_i64(&[0, 1], &[0, 1], &[0, 1], &[0, 2]);
        assert!(matches!(apply_pass_move(&z3_middle(), &dec), Err(MoveError::InvalidDecoration(_))));
    }

    #[test]
    fn exactness_on_examples() {
        assert!(check_exactness(&SeifertBundle::trivial(), 2).unwrap().passed());
        assert!(check_exactness(&SeifertBundle::cyclic(3, 1, -1).unwrap(), 4).unwrap().passed());
        let z = AbelianGroup::free(1);
        let one = IntMatrix::from_rows(&[[1]]);
        let b = SeifertBundle::from_matrices(z.clone(), z, one.clone(), one, IntMatrix::zeros(0, 0), Iota::Derive)
            .unwrap();
        let r = check_exactness(&b, 3).unwrap();
        assert!(!r.rationally_injective);
        assert!(r.surjective && r.image_in_kernel);
    }

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let bounds = CorpusBounds::default();
        assert!(random_move_corpus(7, 0, &bounds).is_empty());
        let a = random_move_corpus(7, 12, &bounds);
        assert_eq!(a, random_move_corpus(7, 12, &bounds));
        assert_ne!(a, random_move_corpus(8, 12, &bounds));
        for t in &a {
            validate_middle(&t.middle).unwrap();
            assert!(validate(&t.child_gt).is_valid() && validate(&t.child_lt).is_valid());
            assert!(verify_move_invariance(t, DEFAULT_AUT_BOUND).unwrap().passed());
        }
    }
}
