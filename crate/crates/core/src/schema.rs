//! JSON state files.
//!
//! ```json
//! { "kind": "circulant", "d": 2, "a": [[[[0.25, 0], [0, 0]], [[0, 0], [0.25, 0]]], ...] }
//! ```
//!
//! Complex numbers are `[re, im]` pairs and matrices are nested row arrays.
//! Which fields are required depends on `kind`; unknown fields are rejected.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, DensityMatrix};
use crate::states::{
    bell_diagonal_state, circulant_state, commuting_group_invariant_state, isotropic_state, orthogonal_invariant_state,
    project_circulant, werner_state, BellWeights, CirculantSpec,
};

type Rows = Vec<Vec<Complex64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Circulant,
    Bell,
    Werner,
    Isotropic,
    Orthogonal,
    Commuting,
    Dense,
}

/// The on-disk form of a state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub kind: StateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Rows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abc: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a0: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dmat: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Rows>,
}

/// A parsed state together with whatever structure its family exposes.
#[derive(Clone, Debug)]
pub struct State {
    pub d: usize,
    pub density: DensityMatrix,
    /// Present whenever the state is block diagonal over the sectors.
    pub circulant: Option<CirculantSpec>,
    /// Present for Bell-diagonal input.
    pub bell: Option<BellWeights>,
}

fn rows_to_matrix(rows: &Rows, what: &str) -> Result<ComplexMatrix> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension(format!("{what} has ragged rows")));
    }
    ComplexMatrix::new(n, cols, rows.iter().flatten().copied().collect())
}

fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

fn required<'a, T>(field: &'a Option<T>, name: &str, kind: StateKind) -> Result<&'a T> {
    field.as_ref().ok_or_else(|| Error::InvalidSpec(format!("field `{name}` is required for kind {kind:?}")))
}

impl StateFile {
    fn empty(kind: StateKind) -> Self {
        Self { kind, d: None, a: None, p: None, lambda: None, abc: None, a0: None, dmat: None, rho: None }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn from_circulant(spec: &CirculantSpec) -> Self {
        Self {
            d: Some(spec.d()),
            a: Some(spec.coefficients().iter().map(matrix_to_rows).collect()),
            ..Self::empty(StateKind::Circulant)
        }
    }

    pub fn from_bell(w: &BellWeights) -> Self {
        Self { d: Some(w.d()), p: Some(w.rows()), ..Self::empty(StateKind::Bell) }
    }

    pub fn from_dense(rho: &DensityMatrix, d: usize) -> Self {
        Self { d: Some(d), rho: Some(matrix_to_rows(rho.matrix())), ..Self::empty(StateKind::Dense) }
    }

    pub fn werner(d: usize, lambda: f64) -> Self {
        Self { d: Some(d), lambda: Some(lambda), ..Self::empty(StateKind::Werner) }
    }

    pub fn isotropic(d: usize, lambda: f64) -> Self {
        Self { d: Some(d), lambda: Some(lambda), ..Self::empty(StateKind::Isotropic) }
    }

    pub fn orthogonal(d: usize, abc: [f64; 3]) -> Self {
        Self { d: Some(d), abc: Some(abc), ..Self::empty(StateKind::Orthogonal) }
    }

    pub fn commuting(a0: &ComplexMatrix, dmat: Vec<Vec<f64>>) -> Self {
        Self {
            d: Some(a0.rows()),
            a0: Some(matrix_to_rows(a0)),
            dmat: Some(dmat),
            ..Self::empty(StateKind::Commuting)
        }
    }

    fn dimension(&self, inferred: Option<usize>) -> Result<usize> {
        match (self.d, inferred) {
            (Some(d), Some(i)) if d != i => Err(Error::Dimension(format!("d = {d} but the data implies {i}"))),
            (Some(d), _) | (None, Some(d)) => Ok(d),
            (None, None) => Err(Error::InvalidSpec(format!("field `d` is required for kind {:?}", self.kind))),
        }
    }

    /// Validates the file and assembles the state.
    pub fn build(&self) -> Result<State> {
        let kind = self.kind;
        let from_spec = |spec: CirculantSpec, bell: Option<BellWeights>| -> Result<State> {
            Ok(State { d: spec.d(), density: circulant_state(&spec)?, circulant: Some(spec), bell })
        };
        let from_dense = |density: DensityMatrix, d: usize| State {
            circulant: project_circulant(&density, d).ok(),
            d,
            density,
            bell: None,
        };
        match kind {
            StateKind::Circulant => {
                let a = required(&self.a, "a", kind)?;
                let d = self.dimension(Some(a.len()))?;
                let mats = a.iter().enumerate().map(|(n, m)| rows_to_matrix(m, &format!("a[{n}]"))).collect::<Result<_>>()?;
                from_spec(CirculantSpec::new(d, mats)?, None)
            }
            StateKind::Bell => {
                let p = required(&self.p, "p", kind)?;
                self.dimension(Some(p.len()))?;
                let w = BellWeights::new(p.clone())?;
                from_spec(bell_diagonal_state(&w)?, Some(w))
            }
            StateKind::Werner => {
                let d = self.dimension(None)?;
                Ok(from_dense(werner_state(d, *required(&self.lambda, "lambda", kind)?)?, d))
            }
            StateKind::Isotropic => {
                let d = self.dimension(None)?;
                from_spec(isotropic_state(d, *required(&self.lambda, "lambda", kind)?)?, None)
            }
            StateKind::Orthogonal => {
                let d = self.dimension(None)?;
                Ok(from_dense(orthogonal_invariant_state(*required(&self.abc, "abc", kind)?, d)?, d))
            }
            StateKind::Commuting => {
                let a0 = rows_to_matrix(required(&self.a0, "a0", kind)?, "a0")?;
                self.dimension(Some(a0.rows()))?;
                from_spec(commuting_group_invariant_state(&a0, required(&self.dmat, "dmat", kind)?)?, None)
            }
            StateKind::Dense => {
                let m = rows_to_matrix(required(&self.rho, "rho", kind)?, "rho")?;
                let root = m.rows().isqrt();
                let d = self.dimension((root * root == m.rows()).then_some(root))?;
                Ok(from_dense(DensityMatrix::new(m)?, d))
            }
        }
    }
}
