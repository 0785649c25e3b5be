//! JSON documents for states and matrices.
//!
//! A density matrix is `{"dims": [n, m], "matrix": rows}` where `rows` has
//! `nm` entries, each a row of `nm` `[re, im]` pairs. Real matrices are a
//! bare array of rows (optionally wrapped as `{"matrix": rows}`).
//!
//! Output matrices are written with 17 significant digits in scientific
//! notation so that identical values always serialize to identical bytes.

use num_complex::Complex64;
use serde::ser::{SerializeSeq, SerializeTuple};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, RMatrix};
use crate::states::{DensityMatrix, Validation};

#[derive(Debug, Clone, Deserialize)]
struct DensityMatrixDoc {
    dims: [usize; 2],
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RealMatrixDoc {
    Bare(Vec<Vec<f64>>),
    Wrapped { matrix: Vec<Vec<f64>> },
}

fn rectangular<T: Copy>(rows: &[Vec<T>]) -> Result<(usize, usize)> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 {
        return Err(Error::Parse("matrix must be non-empty".into()));
    }
    if let Some(bad) = rows.iter().position(|row| row.len() != c) {
        return Err(Error::Parse(format!(
            "row {bad} has {} entries, expected {c}",
            rows[bad].len()
        )));
    }
    Ok((r, c))
}

/// Parses nested `[re, im]` rows.
pub fn complex_matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix> {
    let (r, c) = rectangular(rows)?;
    Ok(CMatrix::from_fn(r, c, |i, j| {
        let [re, im] = rows[i][j];
        Complex64::new(re, im)
    }))
}

pub fn complex_matrix_to_rows(a: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    a.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Parses and validates a density-matrix document with file tolerances.
pub fn parse_density_matrix(text: &str) -> Result<DensityMatrix> {
    let doc: DensityMatrixDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let [n, m] = doc.dims;
    let mat = complex_matrix_from_rows(&doc.matrix)?;
    DensityMatrix::with_validation(mat, n, m, Validation::FILE)
}

pub fn parse_real_matrix(text: &str) -> Result<RMatrix> {
    let doc: RealMatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = match doc {
        RealMatrixDoc::Bare(rows) | RealMatrixDoc::Wrapped { matrix: rows } => rows,
    };
    let (r, c) = rectangular(&rows)?;
    Ok(RMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// `x` with 17 significant digits, e.g. `2.5000000000000000e-1`.
pub fn format_fixed(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no literal for these
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(format_fixed(x)).expect("formatted float is valid JSON")
}

/// A float serialized through [`format_fixed`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        raw(self.0).serialize(s)
    }
}

/// Complex matrix serialized as rows of `[re, im]` with fixed formatting.
#[derive(Debug, Clone, Copy)]
pub struct FixedComplexMatrix<'a>(pub &'a CMatrix);

impl Serialize for FixedComplexMatrix<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a = self.0;
        let mut rows = s.serialize_seq(Some(a.nrows()))?;
        for i in 0..a.nrows() {
            let row: Vec<ComplexPair> = (0..a.ncols()).map(|j| ComplexPair(a[(i, j)])).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

struct ComplexPair(Complex64);

impl Serialize for ComplexPair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(2)?;
        t.serialize_element(&Fixed(self.0.re))?;
        t.serialize_element(&Fixed(self.0.im))?;
        t.end()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedRealMatrix<'a>(pub &'a RMatrix);

impl Serialize for FixedRealMatrix<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let a = self.0;
        let mut rows = s.serialize_seq(Some(a.nrows()))?;
        for i in 0..a.nrows() {
            let row: Vec<Fixed> = (0..a.ncols()).map(|j| Fixed(a[(i, j)])).collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedVec<'a>(pub &'a [f64]);

impl Serialize for FixedVec<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.0.len()))?;
        for &x in self.0 {
            seq.serialize_element(&Fixed(x))?;
        }
        seq.end()
    }
}

/// Density-matrix document in output form.
#[derive(Debug, Clone, Serialize)]
pub struct DensityMatrixJson<'a> {
    pub dims: [usize; 2],
    pub matrix: FixedComplexMatrix<'a>,
}

impl<'a> DensityMatrixJson<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Self {
        let (n, m) = rho.dims();
        Self {
            dims: [n, m],
            matrix: FixedComplexMatrix(rho.matrix()),
        }
    }
}

pub fn density_matrix_to_json(rho: &DensityMatrix) -> String {
    serde_json::to_string_pretty(&DensityMatrixJson::new(rho)).expect("state serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::random_full_rank_state;
    use proptest::prelude::*;

    #[test]
    fn parses_maximally_mixed() {
        let text = r#"{"dims": [2, 2], "matrix": [
            [[0.25, 0], [0, 0], [0, 0], [0, 0]],
            [[0, 0], [0.25, 0], [0, 0], [0, 0]],
            [[0, 0], [0, 0], [0.25, 0], [0, 0]],
            [[0, 0], [0, 0], [0, 0], [0.25, 0]]]}"#;
        let rho = parse_density_matrix(text).unwrap();
        assert_eq!(rho, DensityMatrix::maximally_mixed(2, 2));
    }

    #[test]
    fn rejects_bad_trace_and_shape() {
        let text = r#"{"dims": [1, 2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.4, 0]]]}"#;
        assert!(matches!(
            parse_density_matrix(text),
            Err(Error::InvalidTrace { .. })
        ));
        let text = r#"{"dims": [2, 2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#;
        assert!(matches!(
            parse_density_matrix(text),
            Err(Error::InvalidDimensions(_))
        ));
        let text = r#"{"dims": [1, 2], "matrix": [[[0.5, 0]], [[0, 0], [0.5, 0]]]}"#;
        assert!(matches!(parse_density_matrix(text), Err(Error::Parse(_))));
        assert!(matches!(parse_density_matrix("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn file_tolerance_is_looser() {
        let text =
            r#"{"dims": [1, 2], "matrix": [[[0.500000001, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#;
        let rho = parse_density_matrix(text).unwrap();
        assert!((crate::matcore::trace(rho.matrix()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_matrix_forms() {
        let a = parse_real_matrix("[[1, 2], [3, 4]]").unwrap();
        let b = parse_real_matrix(r#"{"matrix": [[1, 2], [3, 4]]}"#).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[(1, 0)], 3.0);
        assert!(parse_real_matrix("[[1, 2], [3]]").is_err());
    }

    #[test]
    fn fixed_formatting() {
        assert_eq!(format_fixed(0.25), "2.5000000000000000e-1");
        assert_eq!(format_fixed(1.0), "1.0000000000000000e0");
        let v: serde_json::Value = serde_json::from_str(&format_fixed(-3.0e-17)).unwrap();
        assert_eq!(v.as_f64(), Some(-3.0e-17));
    }

    proptest! {
        #[test]
        fn state_json_roundtrip(seed in 0u64..500) {
            let rho = random_full_rank_state(2, 3, seed).unwrap();
            let text = density_matrix_to_json(&rho);
            let back = parse_density_matrix(&text).unwrap();
            prop_assert!((back.matrix() - rho.matrix()).norm() < 1e-15);
            prop_assert_eq!(text, density_matrix_to_json(&back));
        }
    }
}
