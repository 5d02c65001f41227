//! JSON model files.
//!
//! Complex entries are `[re, im]` pairs written with 17 significant digits,
//! which reads back to the identical `f64`. Matrices are arrays of rows.

use std::fs;
use std::path::Path;

use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use slhkit::adiabatic::ScaledSlhFamily;
use slhkit::matrix::{c, CMatrix, C64};
use slhkit::model::DEFAULT_TOL;
use slhkit::reduction::BlockPartition;
use slhkit::stratonovich::StratonovichCoefficients;
use slhkit::SlhModel;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry(C64);

fn raw_number(x: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{x:.16e}")).expect("formatted float is valid JSON")
}

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut t = ser.serialize_tuple(2)?;
        t.serialize_element(&raw_number(self.0.re))?;
        t.serialize_element(&raw_number(self.0.im))?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(de)?;
        Ok(Entry(c(re, im)))
    }
}

type Rows = Vec<Vec<Entry>>;

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| Entry(m[(i, j)])).collect()).collect()
}

fn from_rows(field: &str, rows: &Rows, shape: (usize, usize)) -> CliResult<CMatrix> {
    if rows.len() != shape.0 {
        return Err(CliError::Invalid(format!("field `{field}`: {} rows, expected {}", rows.len(), shape.0)));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(CliError::Invalid(format!(
                "field `{field}`: row {i} has {} entries, expected {}",
                row.len(),
                shape.1
            )));
        }
        if let Some(j) = row.iter().position(|e| !e.0.re.is_finite() || !e.0.im.is_finite()) {
            return Err(CliError::Invalid(format!("field `{field}`: entry ({i},{j}) is not finite")));
        }
    }
    Ok(CMatrix::from_fn(shape.0, shape.1, |i, j| rows[i][j].0))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum Body {
    Slh {
        dim: usize,
        n_inputs: usize,
        #[serde(rename = "S")]
        s: Rows,
        #[serde(rename = "L")]
        l: Rows,
        #[serde(rename = "H")]
        h: Rows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis_labels: Option<Vec<String>>,
    },
    Family {
        dim: usize,
        n_inputs: usize,
        #[serde(rename = "S")]
        s: Rows,
        #[serde(rename = "L0")]
        l0: Rows,
        #[serde(rename = "L1")]
        l1: Rows,
        #[serde(rename = "H0")]
        h0: Rows,
        #[serde(rename = "H1")]
        h1: Rows,
        #[serde(rename = "H2")]
        h2: Rows,
        slow_indices: Vec<usize>,
    },
    Stratonovich {
        dim: usize,
        n_inputs: usize,
        #[serde(rename = "E00")]
        e00: Rows,
        #[serde(rename = "E0l")]
        e0l: Rows,
        #[serde(rename = "El0")]
        el0: Rows,
        #[serde(rename = "Ell")]
        ell: Rows,
    },
}

/// Contents of a model file. Models and families are shape-checked only;
/// callers validate with their own tolerance.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Slh(SlhModel),
    Family(ScaledSlhFamily),
    Stratonovich(StratonovichCoefficients),
}

impl ModelFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelFile::Slh(_) => "slh",
            ModelFile::Family(_) => "family",
            ModelFile::Stratonovich(_) => "stratonovich",
        }
    }

    pub fn to_json(&self) -> String {
        let body = match self {
            ModelFile::Slh(m) => Body::Slh {
                dim: m.dim(),
                n_inputs: m.n_inputs(),
                s: to_rows(m.s()),
                l: to_rows(m.l()),
                h: to_rows(m.h()),
                basis_labels: m.basis_labels().map(<[String]>::to_vec),
            },
            ModelFile::Family(f) => Body::Family {
                dim: f.dim(),
                n_inputs: f.n_inputs(),
                s: to_rows(f.s()),
                l0: to_rows(f.l0()),
                l1: to_rows(f.l1()),
                h0: to_rows(f.h0()),
                h1: to_rows(f.h1()),
                h2: to_rows(f.h2()),
                slow_indices: f.partition().slow().to_vec(),
            },
            ModelFile::Stratonovich(e) => Body::Stratonovich {
                dim: e.dim(),
                n_inputs: e.n_inputs(),
                e00: to_rows(e.e00()),
                e0l: to_rows(e.e0l()),
                el0: to_rows(e.el0()),
                ell: to_rows(e.ell()),
            },
        };
        let mut out = serde_json::to_string_pretty(&body).expect("model file serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> CliResult<Self> {
        Self::from_json_with_tol(text, DEFAULT_TOL)
    }

    /// `tol` applies to the Hermiticity checks that Stratonovich
    /// coefficients undergo on construction.
    pub fn from_json_with_tol(text: &str, tol: f64) -> CliResult<Self> {
        let body: Body = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("malformed model file: {e}")))?;
        let nonzero = |dim: usize, n: usize| {
            if dim == 0 || n == 0 {
                Err(CliError::Invalid("`dim` and `n_inputs` must be positive".into()))
            } else {
                Ok(dim * n)
            }
        };
        match body {
            Body::Slh { dim, n_inputs, s, l, h, basis_labels } => {
                let nm = nonzero(dim, n_inputs)?;
                let model = SlhModel::from_parts(
                    from_rows("S", &s, (nm, nm))?,
                    from_rows("L", &l, (nm, dim))?,
                    from_rows("H", &h, (dim, dim))?,
                )?;
                let model = match basis_labels {
                    Some(labels) => model.with_labels(labels)?,
                    None => model,
                };
                Ok(ModelFile::Slh(model))
            }
            Body::Family { dim, n_inputs, s, l0, l1, h0, h1, h2, slow_indices } => {
                let nm = nonzero(dim, n_inputs)?;
                let partition = BlockPartition::new(dim, slow_indices)
                    .map_err(|e| CliError::Invalid(format!("field `slow_indices`: {e}")))?;
                Ok(ModelFile::Family(ScaledSlhFamily::from_parts(
                    from_rows("S", &s, (nm, nm))?,
                    from_rows("L0", &l0, (nm, dim))?,
                    from_rows("L1", &l1, (nm, dim))?,
                    from_rows("H0", &h0, (dim, dim))?,
                    from_rows("H1", &h1, (dim, dim))?,
                    from_rows("H2", &h2, (dim, dim))?,
                    partition,
                )?))
            }
            Body::Stratonovich { dim, n_inputs, e00, e0l, el0, ell } => {
                let nm = nonzero(dim, n_inputs)?;
                Ok(ModelFile::Stratonovich(StratonovichCoefficients::with_tol(
                    from_rows("E00", &e00, (dim, dim))?,
                    from_rows("E0l", &e0l, (dim, nm))?,
                    from_rows("El0", &el0, (nm, dim))?,
                    from_rows("Ell", &ell, (nm, nm))?,
                    tol,
                )?))
            }
        }
    }

    pub fn read(path: &Path, tol: f64) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json_with_tol(&text, tol)
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_text(path, &self.to_json())
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use slhkit::zoo::{build, Params, ZooModel};

    #[test]
    fn seventeen_digits_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, 1.0 - f64::EPSILON] {
            let text = raw_number(x).get().to_string();
            assert_eq!(text.parse::<f64>().unwrap(), x);
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back, x, "{text}");
        }
    }

    #[test]
    fn zoo_files_round_trip() {
        let model = match build("thermal_qubit", &Params::new().with("n", 0.3).with("omega", 0.1)).unwrap() {
            ZooModel::Model(m) => m,
            ZooModel::Family(_) => unreachable!(),
        };
        let file = ModelFile::Slh(model);
        let text = file.to_json();
        assert_eq!(ModelFile::from_json(&text).unwrap(), file);
        assert_eq!(ModelFile::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn shape_errors_name_the_field_and_row() {
        let text = r#"{"kind":"slh","dim":1,"n_inputs":1,"S":[[[1,0]]],"L":[[[0,0],[1,0]]],"H":[[[0,0]]]}"#;
        let err = ModelFile::from_json(text).unwrap_err().to_string();
        assert!(err.contains("`L`") && err.contains("row 0"), "{err}");
        assert!(ModelFile::from_json(r#"{"kind":"other"}"#).is_err());
    }
}
