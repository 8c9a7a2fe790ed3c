//! JSON file formats.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{cq_ensemble, psi_x, zeta_d, FamilyPoint, FamilyState};
use crate::linalg::{ComplexMatrix, PureState, TripartiteState};
use crate::markov::Decomposition;
use crate::optimize::{OptResult, RestartTrace};
use crate::scalar::Real;

pub type ComplexEntry = [f64; 2];

fn to_entries<T: Real>(data: &[Complex<T>]) -> Vec<ComplexEntry> {
    data.iter().map(|z| [z.re.as_f64(), z.im.as_f64()]).collect()
}

fn from_entries<T: Real>(entries: &[ComplexEntry]) -> Vec<Complex<T>> {
    entries.iter().map(|[re, im]| Complex::new(T::c(*re), T::c(*im))).collect()
}

fn parse_json<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<S: Serialize>(value: &S) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<ComplexEntry>,
}

impl MatrixFile {
    pub fn from_matrix<T: Real>(m: &ComplexMatrix<T>) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: to_entries(m.data()) }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        ComplexMatrix::from_vec(self.rows, self.cols, from_entries(&self.entries)).map_err(|e| e.in_field("entries"))
    }
}

/// A state given either as a density matrix or as a state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<ComplexEntry>>,
}

impl StateFile {
    /// Parses field by field so that type errors name the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = parse_json(text)?;
        let serde_json::Value::Object(mut map) = value else {
            return Err(Error::Parse("expected a JSON object".into()));
        };
        if let Some(key) = map.keys().find(|k| !matches!(k.as_str(), "dims" | "matrix" | "vector")) {
            return Err(Error::Field { field: key.clone(), message: "unknown field".into() });
        }
        fn field<D: serde::de::DeserializeOwned>(map: &mut serde_json::Map<String, serde_json::Value>, name: &str) -> Result<Option<D>> {
            map.remove(name)
                .map(|v| {
                    serde_json::from_value(v).map_err(|e| Error::Field { field: name.into(), message: e.to_string() })
                })
                .transpose()
        }
        let dims = field(&mut map, "dims")?
            .ok_or_else(|| Error::Field { field: "dims".into(), message: "missing".into() })?;
        Ok(Self { dims, matrix: field(&mut map, "matrix")?, vector: field(&mut map, "vector")? })
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    pub fn from_pure<T: Real>(psi: &PureState<T>) -> Self {
        Self { dims: psi.dims().to_vec(), matrix: None, vector: Some(to_entries(psi.vector())) }
    }

    pub fn from_tripartite<T: Real>(rho: &TripartiteState<T>) -> Self {
        let (a, b, c) = rho.dims();
        Self { dims: vec![a, b, c], matrix: Some(to_entries(rho.matrix().data())), vector: None }
    }

    pub fn from_family<T: Real>(state: &FamilyState<T>) -> Self {
        match state {
            FamilyState::Pure(p) => Self::from_pure(p),
            FamilyState::Mixed(m) => Self::from_tripartite(m),
        }
    }

    /// Validates the file as a tripartite state.
    pub fn to_state<T: Real>(&self) -> Result<FamilyState<T>> {
        let dims = match self.dims.as_slice() {
            &[a, b, c] if a > 0 && b > 0 && c > 0 => (a, b, c),
            other => {
                return Err(Error::Field {
                    field: "dims".into(),
                    message: format!("expected three positive subsystem dimensions, got {other:?}"),
                })
            }
        };
        let side = dims.0 * dims.1 * dims.2;
        match (&self.matrix, &self.vector) {
            (Some(_), Some(_)) => Err(Error::Field {
                field: "matrix".into(),
                message: "give exactly one of `matrix` and `vector`".into(),
            }),
            (None, None) => Err(Error::Field {
                field: "matrix".into(),
                message: "one of `matrix` or `vector` is required".into(),
            }),
            (Some(m), None) => {
                if m.len() != side * side {
                    return Err(Error::Field {
                        field: "matrix".into(),
                        message: format!("{} entries for a {side}x{side} matrix", m.len()),
                    });
                }
                let mat = ComplexMatrix::from_vec(side, side, from_entries(m)).map_err(|e| e.in_field("matrix"))?;
                TripartiteState::new(mat, dims).map(FamilyState::Mixed).map_err(|e| e.in_field("matrix"))
            }
            (None, Some(v)) => {
                if v.len() != side {
                    return Err(Error::Field {
                        field: "vector".into(),
                        message: format!("{} amplitudes for dimension {side}", v.len()),
                    });
                }
                PureState::new(from_entries(v), self.dims.clone())
                    .map(FamilyState::Pure)
                    .map_err(|e| e.in_field("vector"))
            }
        }
    }

    /// The `AC` marginal: the matrix itself for `dims = [d_A, d_C]`, or the
    /// partial trace over `B` for a tripartite file.
    pub fn to_ac_matrix<T: Real>(&self) -> Result<(ComplexMatrix<T>, (usize, usize))> {
        if let &[d_a, d_c] = self.dims.as_slice() {
            let side = d_a * d_c;
            let m = match (&self.matrix, &self.vector) {
                (Some(m), None) if m.len() == side * side => ComplexMatrix::from_vec(side, side, from_entries(m))?,
                (None, Some(v)) if v.len() == side => {
                    PureState::new(from_entries(v), self.dims.clone()).map_err(|e| e.in_field("vector"))?.projector()
                }
                _ => {
                    return Err(Error::Field {
                        field: "matrix".into(),
                        message: format!("expected one {side}x{side} matrix or one length-{side} vector"),
                    })
                }
            };
            crate::linalg::validate_density(&m).map_err(|e| e.in_field("matrix"))?;
            return Ok((m, (d_a, d_c)));
        }
        let rho = self.to_state::<T>()?.to_tripartite()?;
        let (a, b, c) = rho.dims();
        Ok((crate::linalg::partial_trace(rho.matrix(), &[a, b, c], &[0, 2])?, (a, c)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub summands: Vec<[usize; 2]>,
    pub isometry: MatrixFile,
}

impl DecompositionFile {
    pub fn from_decomposition<T: Real>(d: &Decomposition<T>) -> Self {
        Self {
            summands: d.summands().iter().map(|&(l, r)| [l, r]).collect(),
            isometry: MatrixFile::from_matrix(d.isometry()),
        }
    }

    pub fn to_decomposition<T: Real>(&self) -> Result<Decomposition<T>> {
        let w = self.isometry.to_matrix().map_err(|e| e.in_field("isometry"))?;
        Decomposition::new(self.summands.iter().map(|s| (s[0], s[1])).collect(), w).map_err(|e| e.in_field("summands"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub shape: usize,
    pub restart: usize,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResultFile {
    pub value: f64,
    pub lower_bound: f64,
    pub decomposition: DecompositionFile,
    pub shapes: Vec<Vec<[usize; 2]>>,
    pub trace: Vec<TraceFile>,
    pub converged: bool,
}

impl OptResultFile {
    pub fn from_result<T: Real>(r: &OptResult<T>) -> Self {
        let trace = |t: &RestartTrace<T>| TraceFile {
            shape: t.shape,
            restart: t.restart,
            value: t.value.as_f64(),
            iterations: t.iterations,
            converged: t.converged,
            history: t.history.iter().map(|h| h.as_f64()).collect(),
        };
        Self {
            value: r.value.as_f64(),
            lower_bound: r.lower_bound.as_f64(),
            decomposition: DecompositionFile::from_decomposition(&r.decomposition),
            shapes: r.shapes.iter().map(|s| s.iter().map(|&(l, r)| [l, r]).collect()).collect(),
            trace: r.trace.iter().map(trace).collect(),
            converged: r.converged,
        }
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// `{"family": "psi-x", "x": ..}`, `{"family": "zeta-d", "d": ..}` or
/// `{"family": "cq", "probs": [..], "states": [[[re, im], ..], ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", deny_unknown_fields)]
pub enum FamilySpec {
    #[serde(rename = "psi-x")]
    PsiX { x: f64 },
    #[serde(rename = "zeta-d")]
    ZetaD { d: usize },
    #[serde(rename = "cq")]
    Cq { probs: Vec<f64>, states: Vec<Vec<ComplexEntry>> },
}

impl FamilySpec {
    pub fn parse(text: &str) -> Result<Self> {
        parse_json(text)
    }

    pub fn build<T: Real>(&self) -> Result<FamilyPoint<T>> {
        match self {
            Self::PsiX { x } => psi_x(T::c(*x)).map_err(|e| e.in_field("x")),
            Self::ZetaD { d } => zeta_d(*d).map_err(|e| e.in_field("d")),
            Self::Cq { probs, states } => {
                let probs: Vec<T> = probs.iter().map(|&p| T::c(p)).collect();
                let states: Vec<Vec<Complex<T>>> = states.iter().map(|s| from_entries(s)).collect();
                cq_ensemble(&probs, &states)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::random_tripartite;

    #[test]
    fn state_round_trip() {
        let rho = random_tripartite::<f64>((2, 3, 2), 4, 1).unwrap();
        let text = StateFile::from_tripartite(&rho).to_json();
        let back = StateFile::parse(&text).unwrap().to_state::<f64>().unwrap();
        assert_eq!(back.to_tripartite().unwrap(), rho);
    }

    #[test]
    fn field_names_in_errors() {
        let bad = r#"{"dims": [2, 1, 1], "matrix": [[1,0],[0,0],[0,0],[1,0]]}"#;
        let err = StateFile::parse(bad).unwrap().to_state::<f64>().unwrap_err();
        assert!(err.to_string().contains("`matrix`"), "{err}");
        let err = StateFile::parse(r#"{"dims": [2, 2], "vector": [[1,0],[0,0],[0,0],[0,0]]}"#)
            .unwrap()
            .to_state::<f64>()
            .unwrap_err();
        assert!(err.to_string().contains("`dims`"), "{err}");
        let err = StateFile::parse(r#"{"matrix": []}"#).unwrap_err();
        assert!(err.to_string().contains("dims"), "{err}");
        let err = StateFile::parse(r#"{"dims":[1,1,1],"vector":[[2,0]]}"#).unwrap().to_state::<f64>().unwrap_err();
        assert!(err.to_string().contains("`vector`"), "{err}");
    }

    #[test]
    fn decomposition_round_trip() {
        let d = Decomposition::<f64>::aligned(vec![(1, 2), (1, 1)]);
        let f = DecompositionFile::from_decomposition(&d);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.starts_with(r#"{"summands":[[1,2],[1,1]],"isometry":{"rows":3,"cols":3"#));
        let back: DecompositionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_decomposition::<f64>().unwrap(), d);
    }

    #[test]
    fn family_specs() {
        let p = FamilySpec::parse(r#"{"family": "psi-x", "x": 0.5}"#).unwrap().build::<f64>().unwrap();
        assert!((p.closed_forms.s_a.unwrap() - 0.811278124459).abs() < 1e-9);
        let z = FamilySpec::parse(r#"{"family": "zeta-d", "d": 2}"#).unwrap().build::<f64>().unwrap();
        assert_eq!(z.state.dims(), (2, 3, 2));
        let cq = r#"{"family": "cq", "probs": [0.5, 0.5], "states": [[[1,0],[0,0]], [[0,0],[1,0]]]}"#;
        assert_eq!(FamilySpec::parse(cq).unwrap().build::<f64>().unwrap().state.dims(), (2, 2, 2));
        assert!(FamilySpec::parse(r#"{"family": "ghz"}"#).is_err());
        let err = FamilySpec::parse(r#"{"family": "psi-x", "x": 1.5}"#).unwrap().build::<f64>().unwrap_err();
        assert!(err.to_string().contains("`x`"));
    }
}
