//! JSON document format. Every document has a version, a kind, a name and a
//! kind-specific payload; unknown fields are rejected at every level.
//! Matrices are arrays of rows, rationals are `"p/q"` strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cocycle::CellComplexData;
use crate::eta::{BoundingData, EquivariantHermitianForm};
use crate::groups::{from_presentation, AbelianGroup, GroupHom, QmodZ};
use crate::laurent::FiniteLaurentModule;
use crate::linalg::IntMatrix;
use crate::moves::{apply_pass_move, MoveDecoration, MoveTriple};
use crate::pairing::{FarberLevineStructure, TorsionPairing};
use crate::seifert::{Iota, KnotName, SeifertBundle};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("unsupported format_version {0}, expected 1")]
    Version(u32),
    #[error("identifier must be nonempty")]
    EmptyId,
    #[error("{0}")]
    Invalid(String),
    #[error("integer {0} does not fit the file format")]
    Overflow(BigInt),
}

fn invalid(e: impl std::fmt::Display) -> FormatError {
    FormatError::Invalid(e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    SeifertBundle,
    LaurentModule,
    FlStructure,
    MoveTriple,
    BoundingData,
    CellComplex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    SeifertBundle(SeifertBundle),
    LaurentModule(FiniteLaurentModule),
    FlStructure(FarberLevineStructure),
    MoveTriple(MoveTriple),
    BoundingData(BoundingData),
    CellComplex { complex: CellComplexData, degrees: Option<Vec<BigInt>> },
}

impl Payload {
    pub fn kind(&self) -> Kind {
        match self {
            Payload::SeifertBundle(_) => Kind::SeifertBundle,
            Payload::LaurentModule(_) => Kind::LaurentModule,
            Payload::FlStructure(_) => Kind::FlStructure,
            Payload::MoveTriple(_) => Kind::MoveTriple,
            Payload::BoundingData(_) => Kind::BoundingData,
            Payload::CellComplex { .. } => Kind::CellComplex,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub name: KnotName,
    pub payload: Payload,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    format_version: u32,
    kind: Kind,
    name: RawName,
    payload: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawName {
    id: String,
    #[serde(default)]
    description: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    free_rank: usize,
    torsion: Vec<i64>,
}

type Rows = Vec<Vec<i64>>;

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawIota {
    Keyword(String),
    Matrix(Rows),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    h1_v: RawGroup,
    h1_y: RawGroup,
    pushoff_pos: Rows,
    pushoff_neg: Rows,
    linking_matrix: Rows,
    iota: RawIota,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModule {
    group: RawGroup,
    tau: Rows,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFl {
    group: RawGroup,
    tau: Rows,
    pairing: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecoration {
    pos_gt: Vec<i64>,
    neg_gt: Vec<i64>,
    pos_lt: Vec<i64>,
    neg_lt: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTriple {
    middle: RawBundle,
    decoration: RawDecoration,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounding {
    modulus: usize,
    multiplicity: u64,
    sigma_w: i64,
    form: Vec<Vec<Vec<i64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplex {
    cells: [usize; 3],
    boundary_2: Rows,
    boundary_1: Rows,
    cycles: Rows,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    higher_cells: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    degrees: Option<Vec<i64>>,
}

fn group_in(g: RawGroup) -> Result<AbelianGroup, FormatError> {
    AbelianGroup::new(g.free_rank, g.torsion.into_iter().map(BigInt::from).collect()).map_err(invalid)
}

fn small(x: &BigInt) -> Result<i64, FormatError> {
    x.to_i64().ok_or_else(|| FormatError::Overflow(x.clone()))
}

fn vec_out(v: &[BigInt]) -> Result<Vec<i64>, FormatError> {
    v.iter().map(small).collect()
}

fn vec_in(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn group_out(g: &AbelianGroup) -> Result<RawGroup, FormatError> {
    Ok(RawGroup { free_rank: g.free_rank(), torsion: vec_out(g.torsion_moduli())? })
}

fn matrix_in(what: &str, rows: &Rows, nrows: Option<usize>, ncols: usize) -> Result<IntMatrix, FormatError> {
    if let Some(n) = nrows {
        if rows.len() != n {
            return Err(FormatError::Invalid(format!("{what}: expected {n} rows, got {}", rows.len())));
        }
    }
    if let Some(r) = rows.iter().find(|r| r.len() != ncols) {
        return Err(FormatError::Invalid(format!("{what}: expected {ncols} columns, got {}", r.len())));
    }
    Ok(IntMatrix::from_rows_with_cols(rows, ncols))
}

fn matrix_out(m: &IntMatrix) -> Result<Rows, FormatError> {
    m.to_rows().iter().map(|r| vec_out(r)).collect()
}

fn hom_in(what: &str, src: &AbelianGroup, tgt: &AbelianGroup, rows: &Rows) -> Result<GroupHom, FormatError> {
    let m = matrix_in(what, rows, Some(tgt.ngens()), src.ngens())?;
    GroupHom::new(src.clone(), tgt.clone(), m).map_err(|e| FormatError::Invalid(format!("{what}: {e}")))
}

fn bundle_in(raw: RawBundle) -> Result<SeifertBundle, FormatError> {
    let h1_v = group_in(raw.h1_v)?;
    let h1_y = group_in(raw.h1_y)?;
    let pushoff_pos = hom_in("pushoff_pos", &h1_v, &h1_y, &raw.pushoff_pos)?;
    let pushoff_neg = hom_in("pushoff_neg", &h1_v, &h1_y, &raw.pushoff_neg)?;
    let n = raw.linking_matrix.len();
    let linking_matrix = matrix_in("linking_matrix", &raw.linking_matrix, None, n)?;
    let iota = match raw.iota {
        RawIota::Keyword(k) if k == "derive" => Iota::Derive,
        RawIota::Keyword(k) => return Err(FormatError::Invalid(format!("iota: unknown keyword {k:?}"))),
        RawIota::Matrix(rows) => {
            let cols = if linking_matrix.is_square() { from_presentation(&linking_matrix).group.ngens() } else { 0 };
            Iota::Given(matrix_in("iota", &rows, None, cols)?)
        }
    };
    Ok(SeifertBundle { h1_v, h1_y, pushoff_pos, pushoff_neg, linking_matrix, iota })
}

fn bundle_out(b: &SeifertBundle) -> Result<RawBundle, FormatError> {
    Ok(RawBundle {
        h1_v: group_out(&b.h1_v)?,
        h1_y: group_out(&b.h1_y)?,
        pushoff_pos: matrix_out(b.pushoff_pos.matrix())?,
        pushoff_neg: matrix_out(b.pushoff_neg.matrix())?,
        linking_matrix: matrix_out(&b.linking_matrix)?,
        iota: match &b.iota {
            Iota::Derive => RawIota::Keyword("derive".into()),
            Iota::Given(m) => RawIota::Matrix(matrix_out(m)?),
        },
    })
}

fn module_in(group: RawGroup, tau: &Rows) -> Result<FiniteLaurentModule, FormatError> {
    let g = group_in(group)?;
    let tau = hom_in("tau", &g, &g, tau)?;
    FiniteLaurentModule::new(g, tau).map_err(|e| FormatError::Invalid(format!("tau: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(v: Value) -> Result<T, FormatError> {
    Ok(serde_json::from_value(v)?)
}

pub fn parse_document(text: &str) -> Result<Document, FormatError> {
    let raw: RawDocument = serde_json::from_str(text)?;
    if raw.format_version != FORMAT_VERSION {
        return Err(FormatError::Version(raw.format_version));
    }
    if raw.name.id.trim().is_empty() {
        return Err(FormatError::EmptyId);
    }
    let name = KnotName::new(raw.name.id, raw.name.description);
    let payload = match raw.kind {
        Kind::SeifertBundle => Payload::SeifertBundle(bundle_in(parse(raw.payload)?)?),
        Kind::LaurentModule => {
            let m: RawModule = parse(raw.payload)?;
            Payload::LaurentModule(module_in(m.group, &m.tau)?)
        }
        Kind::FlStructure => {
            let f: RawFl = parse(raw.payload)?;
            let module = module_in(f.group, &f.tau)?;
            let table = f
                .pairing
                .iter()
                .map(|r| r.iter().map(|s| s.parse::<QmodZ>().map_err(invalid)).collect())
                .collect::<Result<Vec<Vec<QmodZ>>, _>>()?;
            let pairing = TorsionPairing::new(module.group().clone(), table).map_err(invalid)?;
            Payload::FlStructure(FarberLevineStructure::new(module, pairing).map_err(invalid)?)
        }
        Kind::MoveTriple => {
            let t: RawTriple = parse(raw.payload)?;
            let middle = bundle_in(t.middle)?;
            let d = t.decoration;
            let dec = MoveDecoration::from_i64(&d.pos_gt, &d.neg_gt, &d.pos_lt, &d.neg_lt);
            Payload::MoveTriple(apply_pass_move(&middle, &dec).map_err(invalid)?)
        }
        Kind::BoundingData => {
            let b: RawBounding = parse(raw.payload)?;
            let form = EquivariantHermitianForm::from_i64(b.modulus, &b.form).map_err(invalid)?;
            Payload::BoundingData(BoundingData::new(form, b.multiplicity, b.sigma_w).map_err(invalid)?)
        }
        Kind::CellComplex => {
            let c: RawComplex = parse(raw.payload)?;
            let [n0, n1, n2] = c.cells;
            let b2 = matrix_in("boundary_2", &c.boundary_2, Some(n1), n2)?;
            let b1 = matrix_in("boundary_1", &c.boundary_1, Some(n0), n1)?;
            let cycles = c.cycles.iter().map(|z| vec_in(z)).collect();
            let complex = CellComplexData::new(c.cells, b2, b1, cycles, c.higher_cells).map_err(invalid)?;
            Payload::CellComplex { complex, degrees: c.degrees.map(|d| vec_in(&d)) }
        }
    };
    Ok(Document { name, payload })
}

fn payload_out(p: &Payload) -> Result<Value, FormatError> {
    let v = match p {
        Payload::SeifertBundle(b) => serde_json::to_value(bundle_out(b)?)?,
        Payload::LaurentModule(m) => {
            serde_json::to_value(RawModule { group: group_out(m.group())?, tau: matrix_out(m.tau().matrix())? })?
        }
        Payload::FlStructure(f) => serde_json::to_value(RawFl {
            group: group_out(f.module().group())?,
            tau: matrix_out(f.module().tau().matrix())?,
            pairing: f.pairing().table().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        })?,
        Payload::MoveTriple(t) => {
            let d = &t.decoration;
            serde_json::to_value(RawTriple {
                middle: bundle_out(&t.middle)?,
                decoration: RawDecoration {
                    pos_gt: vec_out(&d.pos_gt)?,
                    neg_gt: vec_out(&d.neg_gt)?,
                    pos_lt: vec_out(&d.pos_lt)?,
                    neg_lt: vec_out(&d.neg_lt)?,
                },
            })?
        }
        Payload::BoundingData(b) => serde_json::to_value(RawBounding {
            modulus: b.form.modulus(),
            multiplicity: b.multiplicity,
            sigma_w: b.sigma_w,
            form: b
                .form
                .entries()
                .iter()
                .map(|r| r.iter().map(|c| vec_out(c)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?,
        })?,
        Payload::CellComplex { complex, degrees } => serde_json::to_value(RawComplex {
            cells: complex.cells(),
            boundary_2: matrix_out(complex.boundary_2())?,
            boundary_1: matrix_out(complex.boundary_1())?,
            cycles: complex.cycles().iter().map(|z| vec_out(z)).collect::<Result<_, _>>()?,
            higher_cells: complex.higher_cells().to_vec(),
            degrees: degrees.as_ref().map(|d| vec_out(d)).transpose()?,
        })?,
    };
    Ok(v)
}

/// Canonical pretty JSON with a trailing newline.
pub fn to_json(doc: &Document) -> Result<String, FormatError> {
    let raw = RawDocument {
        format_version: FORMAT_VERSION,
        kind: doc.payload.kind(),
        name: RawName { id: doc.name.id.clone(), description: doc.name.description.clone() },
        payload: payload_out(&doc.payload)?,
    };
    let mut s = serde_json::to_string_pretty(&raw)?;
    s.push('\n');
    Ok(s)
}
