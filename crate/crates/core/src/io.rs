//! File formats: behaviors (JSON or one-row CSV), region masks, covers,
//! block models, certificates and extraction results.
//!
//! CSV numbers are written with 17 significant digits so that re-reading a
//! file reproduces the original values bit for bit.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::blockdiag::{BlockModel, BlockModelFile, Extraction};
use crate::envelope::{ConcaveCover, Facet, GridSpec, RegionMask};
use crate::error::{Error, Result};
use crate::hardy::{Behavior, BehaviorFile, HardyPoint};
use crate::qcore::CMat;
use crate::selftest::Certificate;

pub const SCHEMA_VERSION: u32 = 1;

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn check_schema(found: u32, what: &str) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Schema(format!(
            "{what} has schema_version {found}; this build reads version {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn behavior_to_json(b: &Behavior) -> Result<String> {
    Ok(serde_json::to_string_pretty(&BehaviorFile::from(b))?)
}

/// Parses behavior JSON without validating the probabilities.
pub fn behavior_from_json(text: &str) -> Result<Behavior> {
    let f: BehaviorFile = serde_json::from_str(text)?;
    check_schema(f.schema_version, "behavior file")?;
    Ok(Behavior::from(&f))
}

/// One header line with the 16 column names, one data row.
pub fn behavior_to_csv(b: &Behavior) -> String {
    let header = Behavior::column_names().join(",");
    let row: Vec<String> = b.as_array().iter().map(|&v| fmt_f64(v)).collect();
    format!("{header}\n{}\n", row.join(","))
}

/// Reads a one-row behavior CSV. The header is optional; when present its
/// columns may come in any order.
pub fn behavior_from_csv(text: &str) -> Result<Behavior> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().collect::<std::result::Result<_, _>>()?;
    let rows: Vec<&csv::StringRecord> = rows.iter().filter(|r| !(r.len() == 1 && r[0].is_empty())).collect();
    let names = Behavior::column_names();
    let (order, data) = match rows.as_slice() {
        [row] => ((0..16).collect::<Vec<_>>(), *row),
        [head, row] => {
            let order = names
                .iter()
                .map(|n| {
                    head.iter().position(|h| h == n).ok_or_else(|| {
                        Error::Schema(format!("behavior CSV header lacks column {n}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (order, *row)
        }
        _ => {
            return Err(Error::Schema(format!(
                "behavior CSV must hold one data row (optionally after a header), found {} rows",
                rows.len()
            )))
        }
    };
    if data.len() != 16 {
        return Err(Error::Schema(format!("behavior CSV row has {} fields, expected 16", data.len())));
    }
    let mut p = [0.0; 16];
    for (k, &col) in order.iter().enumerate() {
        p[k] = data[col]
            .parse()
            .map_err(|_| Error::Schema(format!("field {:?} is not a number", &data[col])))?;
    }
    Ok(Behavior::from_raw(p))
}

/// Reads a behavior file, CSV if the extension is `.csv`, JSON otherwise.
pub fn read_behavior(path: &Path) -> Result<Behavior> {
    let text = fs::read_to_string(path)?;
    if is_csv(path) { behavior_from_csv(&text) } else { behavior_from_json(&text) }
}

pub fn write_behavior(path: &Path, b: &Behavior) -> Result<()> {
    let text = if is_csv(path) { behavior_to_csv(b) } else { behavior_to_json(b)? + "\n" };
    fs::write(path, text)?;
    Ok(())
}

/// `r,s,in_region` rows in flat grid order.
pub fn mask_to_csv(m: &RegionMask) -> String {
    let mut out = String::from("r,s,in_region\n");
    for (k, &v) in m.mask.iter().enumerate() {
        let (r, s) = m.grid.point(k);
        out.push_str(&format!("{},{},{}\n", fmt_f64(r), fmt_f64(s), u8::from(v)));
    }
    out
}

/// Reads a mask CSV written by [`mask_to_csv`] back onto `grid`.
pub fn mask_from_csv(text: &str, grid: GridSpec) -> Result<RegionMask> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut mask = Vec::with_capacity(grid.len());
    for rec in rdr.records() {
        let rec = rec?;
        match rec.get(2) {
            Some("0") => mask.push(false),
            Some("1") => mask.push(true),
            other => return Err(Error::Schema(format!("in_region must be 0 or 1, got {other:?}"))),
        }
    }
    RegionMask::new(grid, mask)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaskFile {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub count: usize,
    pub fraction: f64,
    /// Row-major `0/1` entries, index `i * n + j` for `(r_i, s_j)`.
    pub mask: Vec<u8>,
}

impl From<&RegionMask> for MaskFile {
    fn from(m: &RegionMask) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            grid: m.grid,
            count: m.count(),
            fraction: m.fraction(),
            mask: m.mask.iter().map(|&v| u8::from(v)).collect(),
        }
    }
}

impl MaskFile {
    pub fn to_mask(&self) -> Result<RegionMask> {
        check_schema(self.schema_version, "mask file")?;
        let grid = self.grid.validated()?;
        let mask = self
            .mask
            .iter()
            .map(|&v| match v {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(Error::Schema(format!("mask entries must be 0 or 1, got {v}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        RegionMask::new(grid, mask)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub facets: Vec<Facet>,
}

impl From<&ConcaveCover> for CoverFile {
    fn from(c: &ConcaveCover) -> Self {
        Self { schema_version: SCHEMA_VERSION, grid: *c.grid(), facets: c.facets().to_vec() }
    }
}

impl CoverFile {
    pub fn to_cover(&self) -> Result<ConcaveCover> {
        check_schema(self.schema_version, "cover file")?;
        ConcaveCover::from_facets(self.grid.validated()?, self.facets.clone())
    }
}

pub fn read_model(path: &Path) -> Result<BlockModel> {
    let f: BlockModelFile = read_json(path)?;
    check_schema(f.schema_version, "block model file")?;
    BlockModel::from_file(&f)
}

pub fn write_model(path: &Path, m: &BlockModel) -> Result<()> {
    write_json(path, &m.to_file())
}

pub fn read_certificate(path: &Path) -> Result<Certificate> {
    let c: Certificate = read_json(path)?;
    check_schema(c.schema_version, "certificate")?;
    Ok(c)
}

/// Real and imaginary parts of a square matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&CMat> for MatrixFile {
    fn from(m: &CMat) -> Self {
        let n = m.dim();
        let part = |f: fn(&crate::qcore::C64) -> f64| {
            (0..n).map(|i| (0..n).map(|j| f(&m.get(i, j))).collect()).collect()
        };
        Self { re: part(|z| z.re), im: part(|z| z.im) }
    }
}

impl MatrixFile {
    pub fn to_matrix(&self) -> Result<CMat> {
        let n = self.re.len();
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|row| row.len() != n) {
            return Err(Error::Schema("matrix parts must both be square of the same size".into()));
        }
        CMat::from_fn(n, |i, j| crate::qcore::C64::new(self.re[i][j], self.im[i][j]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtractionFile {
    pub schema_version: u32,
    pub point: HardyPoint,
    pub fidelity: f64,
    pub extracted: MatrixFile,
    pub junk: MatrixFile,
}

impl From<&Extraction> for ExtractionFile {
    fn from(e: &Extraction) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            point: e.point,
            fidelity: e.fidelity,
            extracted: MatrixFile::from(&e.extracted),
            junk: MatrixFile::from(&e.junk),
        }
    }
}
