//! CSV ingestion of a single numeric series and its descriptive statistics.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// A numeric column read from a file, in file order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub year: Option<Vec<i64>>,
    pub values: Vec<f64>,
    /// Rows dropped because the value was missing.
    pub skipped: usize,
}

fn is_missing(s: &str) -> bool {
    matches!(s.to_ascii_lowercase().as_str(), "" | "na" | "nan" | "null" | "-")
}

fn find_column(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    let want = name.trim().to_ascii_lowercase();
    headers
        .iter()
        .position(|h| h.trim().to_ascii_lowercase() == want)
        .ok_or_else(|| {
            Error::Schema(format!(
                "{} has no column `{name}` (columns: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
}

/// Read `value_column` (and optionally `year_column`) from a headed CSV file.
/// Rows with a missing value are skipped and counted.
pub fn read_csv(path: impl AsRef<Path>, value_column: &str, year_column: Option<&str>) -> Result<Series> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let vi = find_column(&headers, value_column, path)?;
    let yi = year_column.map(|c| find_column(&headers, c, path)).transpose()?;
    let mut values = Vec::new();
    let mut years = Vec::new();
    let mut skipped = 0;
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let raw = record.get(vi).unwrap_or("");
        if is_missing(raw) {
            skipped += 1;
            continue;
        }
        let v: f64 = raw.parse().map_err(|_| Error::Parse {
            text: raw.to_string(),
            reason: format!("row {} of column `{value_column}` is not a number", row + 1),
        })?;
        if !v.is_finite() {
            skipped += 1;
            continue;
        }
        if let Some(yi) = yi {
            let raw_year = record.get(yi).unwrap_or("");
            let y: i64 = raw_year.parse().map_err(|_| Error::Parse {
                text: raw_year.to_string(),
                reason: format!("row {} of the year column is not an integer", row + 1),
            })?;
            years.push(y);
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::Empty(path.display().to_string()));
    }
    Ok(Series {
        label: path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        year: yi.map(|_| years),
        values,
        skipped,
    })
}

/// Moment convention for variance, skewness and kurtosis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentConvention {
    /// Central moments divided by `n`.
    #[default]
    Population,
    /// Unbiased variance and the adjusted skewness and kurtosis estimators.
    Sample,
}

impl FromStr for MomentConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "population" => Ok(Self::Population),
            "sample" => Ok(Self::Sample),
            _ => Err(Error::Parse {
                text: s.to_string(),
                reason: "expected population or sample".into(),
            }),
        }
    }
}

impl fmt::Display for MomentConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Population => "population",
            Self::Sample => "sample",
        })
    }
}

/// Summary statistics; kurtosis is the non-excess (Pearson) version.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Descriptive {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    pub std_dev: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub min: f64,
    pub max: f64,
    pub convention: MomentConvention,
}

/// Most frequent exact value; ties go to the value seen first.
pub fn mode(values: &[f64]) -> Option<f64> {
    let mut counts: HashMap<u64, (usize, usize)> = HashMap::new();
    for (i, v) in values.iter().enumerate() {
        let key = if *v == 0.0 { 0.0f64.to_bits() } else { v.to_bits() };
        counts.entry(key).or_insert((0, i)).0 += 1;
    }
    counts
        .into_iter()
        .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.1 .1.cmp(&a.1 .1)))
        .map(|(_, (_, first))| values[first])
}

/// Median of unsorted values.
pub fn median(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Descriptive statistics of `values`.
pub fn describe(values: &[f64], convention: MomentConvention) -> Result<Descriptive> {
    let n = values.len();
    if n < 2 {
        return Err(Error::DegenerateSample(format!("need at least 2 values, got {n}")));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let moment = |p: i32| values.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / nf;
    let (m2, m3, m4) = (moment(2), moment(3), moment(4));
    if m2 <= 0.0 {
        return Err(Error::DegenerateSample("constant series: skewness and kurtosis are undefined".into()));
    }
    let g1 = m3 / m2.powf(1.5);
    let b2 = m4 / (m2 * m2);
    let (variance, skewness, kurtosis) = match convention {
        MomentConvention::Population => (m2, g1, b2),
        MomentConvention::Sample => {
            if n < 4 {
                return Err(Error::DegenerateSample(format!(
                    "sample skewness and kurtosis need at least 4 values, got {n}"
                )));
            }
            let skew = g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0);
            let excess = ((nf + 1.0) * (b2 - 3.0) + 6.0) * (nf - 1.0) / ((nf - 2.0) * (nf - 3.0));
            (m2 * nf / (nf - 1.0), skew, excess + 3.0)
        }
    };
    Ok(Descriptive {
        n,
        mean,
        median: median(values),
        mode: mode(values).unwrap_or(f64::NAN),
        std_dev: variance.sqrt(),
        variance,
        skewness,
        kurtosis,
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        convention,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_values_and_years() {
        let f = write("YEAR,Actual Rainfall\n1901,1\n1902,2\n1903,3\n");
        let s = read_csv(f.path(), "actual rainfall", Some("year")).unwrap();
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.year, Some(vec![1901, 1902, 1903]));
        assert_eq!(s.skipped, 0);
    }

    #[test]
    fn skips_blank_values() {
        let f = write("v\n1\n2\n\n4\n5\n");
        // csv skips fully empty lines; use an explicit empty field instead
        let g = write("k,v\na,1\nb,2\nc,\nd,4\ne,5\n");
        assert_eq!(read_csv(f.path(), "v", None).unwrap().values.len(), 4);
        let s = read_csv(g.path(), "v", None).unwrap();
        assert_eq!((s.values.len(), s.skipped), (4, 1));
    }

    #[test]
    fn schema_and_empty_errors() {
        let f = write("a,b\n1,2\n");
        assert!(matches!(read_csv(f.path(), "c", None), Err(Error::Schema(_))));
        let g = write("a,b\n1,\n");
        assert!(matches!(read_csv(g.path(), "b", None), Err(Error::Empty(_))));
        assert!(matches!(read_csv("/nonexistent/file.csv", "a", None), Err(Error::Io(_))));
    }

    #[test]
    fn small_description() {
        let d = describe(&[1.0, 2.0, 3.0], MomentConvention::Population).unwrap();
        assert_eq!((d.mean, d.median, d.min, d.max), (2.0, 2.0, 1.0, 3.0));
        assert!((d.variance - d.std_dev * d.std_dev).abs() < 1e-12);
        assert_eq!(d.skewness, 0.0);
        assert!((d.kurtosis - 1.5).abs() < 1e-12);
        assert!(describe(&[4.0; 5], MomentConvention::Population).is_err());
    }

    #[test]
    fn sample_convention() {
        let xs = [2.0, 4.0, 4.0, 5.0, 7.0, 9.0, 10.0];
        let d = describe(&xs, MomentConvention::Sample).unwrap();
        let mean = xs.iter().sum::<f64>() / 7.0;
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        assert!((d.variance - ss / 6.0).abs() < 1e-12);
        assert_eq!(d.mode, 4.0);
        // reference values from an independent statistics library
        assert!((d.skewness - 0.3102885059860313).abs() < 1e-12);
        assert!((d.kurtosis - 1.7539452089382648).abs() < 1e-12);
        let p = describe(&xs, MomentConvention::Population).unwrap();
        assert!((p.skewness - 0.23939277964188616).abs() < 1e-12);
        assert!((p.kurtosis - 1.730810503724277).abs() < 1e-12);
    }

    #[test]
    fn mode_ties_go_to_first_seen() {
        assert_eq!(mode(&[3.0, 1.0, 1.0, 3.0, 2.0]), Some(3.0));
        assert_eq!(mode(&[5.0, 6.0]), Some(5.0));
    }
}
