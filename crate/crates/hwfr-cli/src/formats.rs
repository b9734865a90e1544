//! On-disk formats.
//!
//! **Volume files** (`.hwv`) hold one grid-sampled function:
//! magic `HWV1` (4 bytes), the three grid dimensions as 32-bit little-endian
//! unsigned integers, one element-type tag byte (`0x01` = IEEE-754 binary64),
//! then `nu·nv·nw` 64-bit little-endian floats with the `u` index fastest,
//! then `v`, then `w`. A 1D signal of length `p` is stored as `(p, 1, 1)`.
//!
//! **CSV files** carry a header row, UTF-8 text, `.` decimal separator, and
//! shortest-round-trip float formatting, so identical numbers always produce
//! identical bytes.
//!
//! **Datasets** are directories: `predictors/x_00000.hwv`, `x_00001.hwv`, …
//! plus `responses.csv` with columns `id,y` (ids dense from 0, file order).
//!
//! Real volumetric scans are out of scope; mapping them in amounts to
//! resampling each scan onto a common power-of-two grid, writing one `.hwv`
//! per subject (u fastest), and listing the scalar outcomes in
//! `responses.csv` in the same order.

use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use hwfr::funreg::FunctionalDataset;
use hwfr::{Grid, GridDims, SignalGrid, VolumeGrid};
use serde::Serialize;

use crate::error::{CliError, Result};

pub const VOLUME_MAGIC: &[u8; 4] = b"HWV1";
pub const ELEM_F64: u8 = 0x01;
const HEADER_LEN: usize = 4 + 3 * 4 + 1;

/// Writes one grid function in the volume format described above.
pub fn write_volume(path: &Path, dims: (usize, usize, usize), values: &[f64]) -> Result<()> {
    let cells = dims
        .0
        .checked_mul(dims.1)
        .and_then(|c| c.checked_mul(dims.2));
    if cells != Some(values.len()) || values.is_empty() {
        return Err(CliError::config(format!(
            "volume payload of {} values does not fill dimensions {:?}",
            values.len(),
            dims
        )));
    }
    for d in [dims.0, dims.1, dims.2] {
        if u32::try_from(d).is_err() {
            return Err(CliError::config(format!("dimension {d} exceeds 32 bits")));
        }
    }
    let mut w = BufWriter::new(create(path)?);
    w.write_all(VOLUME_MAGIC)
        .and_then(|()| w.write_all(&(dims.0 as u32).to_le_bytes()))
        .and_then(|()| w.write_all(&(dims.1 as u32).to_le_bytes()))
        .and_then(|()| w.write_all(&(dims.2 as u32).to_le_bytes()))
        .and_then(|()| w.write_all(&[ELEM_F64]))
        .map_err(|e| write_err(path, &e))?;
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(|e| write_err(path, &e))?;
    }
    w.flush().map_err(|e| write_err(path, &e))
}

/// Reads a volume file, validating the header and exact payload length.
pub fn read_volume(path: &Path) -> Result<((usize, usize, usize), Vec<f64>)> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let bad = |what: &str| CliError::io(format!("{}: {what}", path.display()));
    if bytes.len() < HEADER_LEN {
        return Err(bad("truncated volume header"));
    }
    if &bytes[..4] != VOLUME_MAGIC {
        return Err(bad("not a volume file (bad magic)"));
    }
    let dim_at = |i: usize| {
        u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize
    };
    let dims = (dim_at(0), dim_at(1), dim_at(2));
    if bytes[16] != ELEM_F64 {
        return Err(bad("unsupported element type tag"));
    }
    let cells = dims
        .0
        .checked_mul(dims.1)
        .and_then(|c| c.checked_mul(dims.2))
        .ok_or_else(|| bad("dimension product overflows"))?;
    if bytes.len() != HEADER_LEN + 8 * cells {
        return Err(bad("payload length does not match dimensions"));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((dims, values))
}

/// One loaded grid function: signals and volumes flow through separate,
/// monomorphized pipelines.
#[derive(Debug, Clone)]
pub enum GridData {
    OneD(SignalGrid),
    ThreeD(VolumeGrid),
}

impl GridData {
    pub fn from_parts(dims: (usize, usize, usize), values: Vec<f64>) -> Result<GridData> {
        if dims.1 == 1 && dims.2 == 1 {
            Ok(GridData::OneD(SignalGrid::new(values)?))
        } else {
            Ok(GridData::ThreeD(VolumeGrid::new(dims, values)?))
        }
    }

    pub fn values(&self) -> &[f64] {
        match self {
            GridData::OneD(g) => g.values(),
            GridData::ThreeD(g) => g.values(),
        }
    }
}

/// Storage dimensions of a grid: 1D signals become `(p, 1, 1)`.
pub fn storage_dims(dims: GridDims) -> (usize, usize, usize) {
    match dims {
        GridDims::OneD(p) => (p, 1, 1),
        GridDims::ThreeD(nu, nv, nw) => (nu, nv, nw),
    }
}

/// Writes any grid function as a volume file.
pub fn write_grid<G: Grid>(path: &Path, grid: &G) -> Result<()> {
    write_volume(path, storage_dims(grid.dims()), grid.values())
}

/// Reads a volume file into a signal or volume according to its dimensions.
pub fn read_grid(path: &Path) -> Result<GridData> {
    let (dims, values) = read_volume(path)?;
    GridData::from_parts(dims, values)
}

/// Path of the `i`-th predictor inside a dataset directory.
pub fn predictor_path(dir: &Path, i: usize) -> PathBuf {
    dir.join(format!("x_{i:05}.hwv"))
}

/// Writes `responses.csv` with columns `id,y`.
pub fn write_responses(path: &Path, responses: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(create(path)?));
    w.write_record(["id", "y"])?;
    for (i, y) in responses.iter().enumerate() {
        w.write_record([i.to_string(), format!("{y}")])?;
    }
    w.flush().map_err(|e| write_err(path, &e))
}

/// Reads `responses.csv`, requiring the header `id,y` and ids dense from 0.
pub fn read_responses(path: &Path) -> Result<Vec<f64>> {
    let file =
        File::open(path).map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut r = csv::Reader::from_reader(file);
    let bad = |what: String| CliError::io(format!("{}: {what}", path.display()));
    let headers = r.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "y" {
        return Err(bad(format!("expected header id,y, found {headers:?}")));
    }
    let mut responses = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let id: usize = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("row {i}: unparsable id")))?;
        if id != i {
            return Err(bad(format!("row {i}: ids must be dense from 0, found {id}")));
        }
        let y: f64 = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad(format!("row {i}: unparsable response")))?;
        responses.push(y);
    }
    Ok(responses)
}

/// A dataset loaded from a directory, dispatched on grid dimensionality.
pub enum LoadedDataset {
    OneD(FunctionalDataset<SignalGrid>),
    ThreeD(FunctionalDataset<VolumeGrid>),
}

/// Predictors alone (for prediction, where responses may not exist).
pub enum LoadedPredictors {
    OneD(Vec<SignalGrid>),
    ThreeD(Vec<VolumeGrid>),
}

/// Loads `n` predictors `x_00000.hwv … x_{n-1}` from `dir/predictors`,
/// requiring every curve to share the first one's dimensionality.
fn load_n_predictors(dir: &Path, n: usize) -> Result<LoadedPredictors> {
    let pred_dir = dir.join("predictors");
    let mut signals = Vec::new();
    let mut volumes = Vec::new();
    for i in 0..n {
        match read_grid(&predictor_path(&pred_dir, i))? {
            GridData::OneD(g) if volumes.is_empty() => signals.push(g),
            GridData::ThreeD(g) if signals.is_empty() => volumes.push(g),
            _ => {
                return Err(CliError::io(format!(
                    "predictor {i} in {} mixes 1D and 3D grids",
                    pred_dir.display()
                )))
            }
        }
    }
    if signals.is_empty() && volumes.is_empty() {
        return Err(CliError::io(format!("no predictors in {}", pred_dir.display())));
    }
    if volumes.is_empty() {
        Ok(LoadedPredictors::OneD(signals))
    } else {
        Ok(LoadedPredictors::ThreeD(volumes))
    }
}

/// Loads predictors without responses by scanning ids upward from 0.
pub fn load_predictors(dir: &Path) -> Result<LoadedPredictors> {
    let pred_dir = dir.join("predictors");
    let mut n = 0;
    while predictor_path(&pred_dir, n).is_file() {
        n += 1;
    }
    load_n_predictors(dir, n)
}

/// Loads a full dataset: `responses.csv` fixes `n`, predictors must match.
pub fn load_dataset(dir: &Path) -> Result<LoadedDataset> {
    let responses = read_responses(&dir.join("responses.csv"))?;
    match load_n_predictors(dir, responses.len())? {
        LoadedPredictors::OneD(xs) => Ok(LoadedDataset::OneD(FunctionalDataset::new(
            xs, responses,
        )?)),
        LoadedPredictors::ThreeD(xs) => Ok(LoadedDataset::ThreeD(FunctionalDataset::new(
            xs, responses,
        )?)),
    }
}

/// Reads a JSON result file (not a config; no command-key handling).
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(create(path)?);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
    w.write_all(b"\n").map_err(|e| write_err(path, &e))?;
    w.flush().map_err(|e| write_err(path, &e))
}

/// Creates all directories up to `dir`.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))
}

fn write_err(path: &Path, e: &dyn std::fmt::Display) -> CliError {
    CliError::io(format!("cannot write {}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().expect("temp dir")
    }

    #[test]
    fn volume_roundtrip_is_identity() {
        let dir = tmp();
        let path = dir.path().join("a.hwv");
        let values: Vec<f64> = (0..24).map(|i| (i as f64).sin()).collect();
        write_volume(&path, (2, 3, 4), &values).unwrap();
        let (dims, back) = read_volume(&path).unwrap();
        assert_eq!(dims, (2, 3, 4));
        assert_eq!(back, values);
        // Byte-level layout: header is exactly 17 bytes.
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 17 + 8 * 24);
        assert_eq!(&bytes[..4], b"HWV1");
        assert_eq!(bytes[16], 0x01);
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 2);
    }

    #[test]
    fn signals_store_as_p_1_1() {
        let dir = tmp();
        let path = dir.path().join("s.hwv");
        let g = SignalGrid::new(vec![1.0, -2.0, 3.0, 4.0]).unwrap();
        write_grid(&path, &g).unwrap();
        match read_grid(&path).unwrap() {
            GridData::OneD(back) => assert_eq!(back.values(), g.values()),
            GridData::ThreeD(_) => panic!("expected a signal"),
        }
    }

    #[test]
    fn malformed_volumes_are_rejected() {
        let dir = tmp();
        let path = dir.path().join("bad.hwv");
        let values = vec![0.5; 8];
        write_volume(&path, (2, 2, 2), &values).unwrap();
        let good = std::fs::read(&path).unwrap();

        std::fs::write(&path, &good[..good.len() - 1]).unwrap();
        assert!(matches!(read_volume(&path), Err(CliError::Io(_))));

        let mut wrong_magic = good.clone();
        wrong_magic[0] = b'X';
        std::fs::write(&path, &wrong_magic).unwrap();
        assert!(matches!(read_volume(&path), Err(CliError::Io(_))));

        let mut wrong_tag = good.clone();
        wrong_tag[16] = 0x02;
        std::fs::write(&path, &wrong_tag).unwrap();
        assert!(matches!(read_volume(&path), Err(CliError::Io(_))));

        let mut trailing = good;
        trailing.push(0);
        std::fs::write(&path, &trailing).unwrap();
        assert!(matches!(read_volume(&path), Err(CliError::Io(_))));

        assert!(write_volume(&dir.path().join("m.hwv"), (2, 2, 2), &values[..7]).is_err());
    }

    #[test]
    fn responses_roundtrip_and_validation() {
        let dir = tmp();
        let path = dir.path().join("responses.csv");
        let ys = vec![0.25, -1.5, 3.0e-7];
        write_responses(&path, &ys).unwrap();
        assert_eq!(read_responses(&path).unwrap(), ys);

        std::fs::write(&path, "id,y\n1,0.5\n").unwrap();
        assert!(matches!(read_responses(&path), Err(CliError::Io(_))));
        std::fs::write(&path, "idx,y\n0,0.5\n").unwrap();
        assert!(matches!(read_responses(&path), Err(CliError::Io(_))));
        std::fs::write(&path, "id,y\n0,abc\n").unwrap();
        assert!(matches!(read_responses(&path), Err(CliError::Io(_))));
    }

    #[test]
    fn dataset_roundtrip() {
        let dir = tmp();
        ensure_dir(&dir.path().join("predictors")).unwrap();
        let xs = [vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]];
        for (i, x) in xs.iter().enumerate() {
            write_volume(&predictor_path(&dir.path().join("predictors"), i), (2, 1, 1), x)
                .unwrap();
        }
        write_responses(&dir.path().join("responses.csv"), &[1.0, 2.0, 3.0]).unwrap();
        match load_dataset(dir.path()).unwrap() {
            LoadedDataset::OneD(ds) => {
                assert_eq!(ds.len(), 3);
                assert_eq!(ds.predictors()[2].values(), &[5.0, 6.0]);
            }
            LoadedDataset::ThreeD(_) => panic!("expected signals"),
        }
        // A monkey-patched responses file shrinks the dataset consistently.
        write_responses(&dir.path().join("responses.csv"), &[1.0, 2.0]).unwrap();
        match load_dataset(dir.path()).unwrap() {
            LoadedDataset::OneD(ds) => assert_eq!(ds.len(), 2),
            LoadedDataset::ThreeD(_) => panic!("expected signals"),
        }
    }
}
