//! Training sets: predictor rows paired with target rows.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{sample_gaussian, Matrix, SeedState};

/// Paired predictor matrix `x` (N×p) and target matrix `y` (N×q).
/// Row `i` of each is training example `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    x: Matrix,
    y: Matrix,
}

impl Dataset {
    pub fn new(x: Matrix, y: Matrix) -> Result<Self> {
        if x.rows() != y.rows() {
            return Err(Error::dims(
                "Dataset::new",
                format!("x has {} rows, y has {}", x.rows(), y.rows()),
            ));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn y(&self) -> &Matrix {
        &self.y
    }

    /// Number of examples.
    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    pub fn q(&self) -> usize {
        self.y.cols()
    }

    pub fn into_parts(self) -> (Matrix, Matrix) {
        (self.x, self.y)
    }

    /// Parses comma-separated records: `p` predictor fields followed by `q`
    /// target fields. A single leading header is skipped when its first
    /// field is not a number. Record numbers in errors are 1-based.
    pub fn from_csv(content: &str, p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::dims("dataset_from_csv", "p and q must be positive"));
        }
        let width = p + q;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut n = 0usize;
        for (idx, line) in content
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty())
            .enumerate()
        {
            let record = idx + 1;
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if idx == 0 && fields[0].parse::<f64>().is_err() {
                continue;
            }
            if fields.len() != width {
                return Err(Error::Parse {
                    record,
                    message: format!("expected {width} fields, found {}", fields.len()),
                });
            }
            for (col, field) in fields.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| Error::Parse {
                    record,
                    message: format!("field {} is not a number: {field:?}", col + 1),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        record,
                        message: format!("field {} is not finite", col + 1),
                    });
                }
                if col < p {
                    xs.push(v);
                } else {
                    ys.push(v);
                }
            }
            n += 1;
        }
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        Dataset::new(Matrix::new(n, p, xs)?, Matrix::new(n, q, ys)?)
    }

    /// Headerless CSV with 17 significant digits, so parsing it back is exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n() {
            let fields = self.x.row(i).iter().chain(self.y.row(i));
            write_record(&mut out, fields);
        }
        out
    }
}

pub(crate) fn write_record<'a>(out: &mut String, fields: impl Iterator<Item = &'a f64>) {
    for (j, v) in fields.enumerate() {
        if j > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

/// Matrix rows as headerless CSV with 17 significant digits.
pub fn matrix_to_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        write_record(&mut out, m.row(i).iter());
    }
    out
}

/// Gaussian predictors and a Gaussian ground-truth model, with
/// `y = x·model + noise_sd·ε`. Returns the dataset and the model.
pub fn synth_dataset(
    seed: &SeedState,
    n: usize,
    p: usize,
    q: usize,
    noise_sd: f64,
) -> Result<(Dataset, Matrix)> {
    if n == 0 || p == 0 || q == 0 {
        return Err(Error::dims("synth_dataset", format!("N={n}, p={p}, q={q}")));
    }
    if !noise_sd.is_finite() || noise_sd < 0.0 {
        return Err(Error::InvalidHyperparameter(format!(
            "noise_sd = {noise_sd}"
        )));
    }
    let x = sample_gaussian(n, p, &seed.derive("x"));
    let model = sample_gaussian(p, q, &seed.derive("model"));
    let mut y = x.matmul(&model)?;
    if noise_sd > 0.0 {
        let noise = sample_gaussian(n, q, &seed.derive("noise"));
        y = y.add(&noise.scale(noise_sd))?;
    }
    Ok((Dataset::new(x, y)?, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;

    #[test]
    fn single_example_csv() {
        let d = Dataset::from_csv("1,0,1", 2, 1).unwrap();
        assert_eq!(d.x(), &Matrix::from_rows(&[[1.0, 0.0]]).unwrap());
        assert_eq!(d.y(), &Matrix::from_rows(&[[1.0]]).unwrap());
    }

    #[test]
    fn header_is_skipped() {
        let d = Dataset::from_csv("x1,y1\n2,4\n", 1, 1).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.x()[(0, 0)], 2.0);
        assert_eq!(d.y()[(0, 0)], 4.0);
    }

    #[test]
    fn malformed_record_reports_its_number() {
        let err = Dataset::from_csv("1,2\n3", 1, 1).unwrap_err();
        assert!(matches!(err, Error::Parse { record: 2, .. }), "{err:?}");
        let err = Dataset::from_csv("1,2\n3,abc", 1, 1).unwrap_err();
        assert!(matches!(err, Error::Parse { record: 2, .. }), "{err:?}");
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(Dataset::from_csv("a,b\n", 1, 1), Err(Error::EmptyDataset));
        assert_eq!(Dataset::from_csv("", 1, 1), Err(Error::EmptyDataset));
    }

    #[test]
    fn crlf_and_blank_lines() {
        let d = Dataset::from_csv("1,2\r\n\r\n3,4\r\n", 1, 1).unwrap();
        assert_eq!(d.n(), 2);
    }

    #[test]
    fn synth_is_deterministic_and_noise_free_when_asked() {
        let s = SeedState::new(3, "synth");
        let (a, model) = synth_dataset(&s, 10, 3, 2, 0.0).unwrap();
        let (b, _) = synth_dataset(&s, 10, 3, 2, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.y(), &a.x().matmul(&model).unwrap());
    }

    #[test]
    fn synth_rank_deficient_fixture() {
        let (d, _) = synth_dataset(&SeedState::new(1, "rd"), 1, 2, 1, 0.0).unwrap();
        assert_eq!(numerical_rank(d.x(), 1.0), 1);
    }

    #[test]
    fn mismatched_rows_rejected() {
        assert!(Dataset::new(Matrix::zeros(2, 1), Matrix::zeros(3, 1)).is_err());
    }
}
