//! Circle-valued maps on a cell complex up to homotopy, as integer
//! 1-cochains: a map on the 1-skeleton extends over the 2-cells exactly when
//! the cochain kills every 2-cell boundary. Cells above dimension 2 impose
//! nothing and are ignored.

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::linalg::{solve_integer, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CocycleError {
    #[error("invalid complex: {0}")]
    Invalid(String),
    #[error("expected {expected} degrees, got {got}")]
    DegreeCount { expected: usize, got: usize },
    #[error("no cochain realizes the requested degrees")]
    NoExtension,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplexData {
    cells: [usize; 3],
    boundary_2: IntMatrix,
    boundary_1: IntMatrix,
    cycles: Vec<Vec<BigInt>>,
    higher_cells: Vec<usize>,
}

impl CellComplexData {
    pub fn new(
        cells: [usize; 3],
        boundary_2: IntMatrix,
        boundary_1: IntMatrix,
        cycles: Vec<Vec<BigInt>>,
        higher_cells: Vec<usize>,
    ) -> Result<Self, CocycleError> {
        let [n0, n1, n2] = cells;
        if (boundary_2.rows(), boundary_2.cols()) != (n1, n2) {
            return Err(CocycleError::Invalid(format!("boundary_2 must be {n1}x{n2}")));
        }
        if (boundary_1.rows(), boundary_1.cols()) != (n0, n1) {
            return Err(CocycleError::Invalid(format!("boundary_1 must be {n0}x{n1}")));
        }
        if !(&boundary_1 * &boundary_2).is_zero() {
            return Err(CocycleError::Invalid("boundary_1 * boundary_2 != 0".into()));
        }
        for (i, z) in cycles.iter().enumerate() {
            if z.len() != n1 {
                return Err(CocycleError::Invalid(format!("cycle {i} needs {n1} coefficients")));
            }
            if boundary_1.mul_vec(z).iter().any(|x| !x.is_zero()) {
                return Err(CocycleError::Invalid(format!("cycle {i} has nonzero boundary")));
            }
        }
        Ok(CellComplexData { cells, boundary_2, boundary_1, cycles, higher_cells })
    }

    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    pub fn boundary_2(&self) -> &IntMatrix {
        &self.boundary_2
    }

    pub fn boundary_1(&self) -> &IntMatrix {
        &self.boundary_1
    }

    pub fn cycles(&self) -> &[Vec<BigInt>] {
        &self.cycles
    }

    pub fn higher_cells(&self) -> &[usize] {
        &self.higher_cells
    }

    /// One vertex, one edge.
    pub fn circle() -> Self {
        CellComplexData::new(
            [1, 1, 0],
            IntMatrix::zeros(1, 0),
            IntMatrix::zeros(1, 1),
            vec![vec![BigInt::from(1)]],
            vec![],
        )
        .expect("valid")
    }

    /// Standard torus with cycles `a`, `b`.
    pub fn torus() -> Self {
        CellComplexData::new(
            [1, 2, 1],
            IntMatrix::zeros(2, 1),
            IntMatrix::zeros(1, 2),
            vec![vec![1.into(), 0.into()], vec![0.into(), 1.into()]],
            vec![],
        )
        .expect("valid")
    }

    /// A 2-cell attached along `a^2`.
    pub fn projective_plane() -> Self {
        CellComplexData::new([1, 1, 1], IntMatrix::from_rows(&[[2]]), IntMatrix::zeros(1, 1), vec![vec![1.into()]], vec![])
            .expect("valid")
    }
}

/// `φ` with `φ·∂₂ = 0` and `φ(z_i) = degrees[i]`.
pub fn extend_to_circle(c: &CellComplexData, degrees: &[BigInt]) -> Result<Vec<BigInt>, CocycleError> {
    if degrees.len() != c.cycles.len() {
        return Err(CocycleError::DegreeCount { expected: c.cycles.len(), got: degrees.len() });
    }
    let n1 = c.cells[1];
    let z = if c.cycles.is_empty() {
        IntMatrix::zeros(0, n1)
    } else {
        IntMatrix::from_big_rows(c.cycles.clone(), n1)
    };
    let system = c.boundary_2.transpose().vstack(&z);
    let mut rhs = vec![BigInt::zero(); c.cells[2]];
    rhs.extend_from_slice(degrees);
    solve_integer(&system, &rhs).map_err(|_| CocycleError::NoExtension)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainReport {
    /// 2-cells whose boundary has nonzero degree.
    pub offending_cells: Vec<usize>,
    pub periods: Vec<BigInt>,
}

impl CochainReport {
    pub fn passed(&self) -> bool {
        self.offending_cells.is_empty()
    }
}

pub fn verify_cochain(c: &CellComplexData, phi: &[BigInt]) -> Result<CochainReport, CocycleError> {
    if phi.len() != c.cells[1] {
        return Err(CocycleError::Invalid(format!("cochain needs {} values", c.cells[1])));
    }
    let dot = |v: &[BigInt]| -> BigInt { v.iter().zip(phi).map(|(a, b)| a * b).sum() };
    let offending_cells = (0..c.cells[2]).filter(|&j| !dot(&c.boundary_2.col(j)).is_zero()).collect();
    let periods = c.cycles.iter().map(|z| dot(z)).collect();
    Ok(CochainReport { offending_cells, periods })
}
