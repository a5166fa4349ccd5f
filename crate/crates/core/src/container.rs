//! Column-major binary matrix container with a JSON sidecar.
//!
//! `<base>.bin`: magic `LFMX`, `u32` version, `u64` rows, `u64` cols, then
//! `rows * cols` pairs `(re, im)` of little-endian `f64`, column by column.
//! `<base>.json`: [`ContainerMeta`].

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, FrameSpec};
use crate::galerkin::GalerkinMatrix;
use crate::linalg::{IndexSet, SeqSpaceSpec};
use crate::{CMat, CVec, C64};

pub const MAGIC: &[u8; 4] = b"LFMX";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContainerKind {
    Frame,
    Matrix,
    Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerMeta {
    pub format: String,
    pub version: u32,
    pub rows: usize,
    pub cols: usize,
    pub kind: ContainerKind,
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_spec: Option<FrameSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_set: Option<IndexSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spaces: Option<ContainerSpaces>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainerSpaces {
    pub domain: SeqSpaceSpec,
    pub codomain: SeqSpaceSpec,
}

impl ContainerMeta {
    pub fn new(kind: ContainerKind, id: impl Into<String>, m: &CMat) -> Self {
        Self {
            format: "lfmx".into(),
            version: VERSION,
            rows: m.nrows(),
            cols: m.ncols(),
            kind,
            id: id.into(),
            frame_spec: None,
            index_set: None,
            left: None,
            right: None,
            spaces: None,
        }
    }
}

/// `<base>.bin` and `<base>.json`.
pub fn paths(base: &Path) -> (PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut s = base.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    (with(".bin"), with(".json"))
}

pub fn encode(m: &CMat) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * m.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
    // nalgebra storage is column-major
    for z in m.iter() {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    out
}

fn read_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b.try_into().expect("8 bytes"))
}

fn read_f64(b: &[u8]) -> f64 {
    f64::from_le_bytes(b.try_into().expect("8 bytes"))
}

pub fn decode(bytes: &[u8]) -> Result<CMat> {
    if bytes.len() < HEADER_LEN || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing LFMX header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Format(format!("unsupported container version {version}")));
    }
    let rows = usize::try_from(read_u64(&bytes[8..16])).map_err(|_| Error::Format("row count overflows".into()))?;
    let cols = usize::try_from(read_u64(&bytes[16..24])).map_err(|_| Error::Format("column count overflows".into()))?;
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(16))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("matrix size overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!("payload is {} bytes, header implies {expected}", bytes.len())));
    }
    let data = &bytes[HEADER_LEN..];
    let entries = (0..rows * cols).map(|i| C64::new(read_f64(&data[16 * i..16 * i + 8]), read_f64(&data[16 * i + 8..16 * i + 16])));
    Ok(CMat::from_iterator(rows, cols, entries))
}

pub fn write(base: &Path, m: &CMat, meta: &ContainerMeta) -> Result<()> {
    if (meta.rows, meta.cols) != m.shape() {
        return Err(Error::Contract("sidecar shape differs from the matrix".into()));
    }
    let (bin, json) = paths(base);
    if let Some(dir) = bin.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::File::create(&bin)?.write_all(&encode(m))?;
    let mut text = serde_json::to_string_pretty(meta)?;
    text.push('\n');
    fs::write(json, text)?;
    Ok(())
}

pub fn read(base: &Path) -> Result<(CMat, ContainerMeta)> {
    let (bin, json) = paths(base);
    let mut bytes = Vec::new();
    fs::File::open(&bin)
        .map_err(|e| Error::Io(format!("{}: {e}", bin.display())))?
        .read_to_end(&mut bytes)?;
    let m = decode(&bytes)?;
    let text = fs::read_to_string(&json).map_err(|e| Error::Io(format!("{}: {e}", json.display())))?;
    let meta: ContainerMeta = serde_json::from_str(&text)?;
    if (meta.rows, meta.cols) != m.shape() {
        return Err(Error::Format("sidecar shape differs from the binary payload".into()));
    }
    Ok((m, meta))
}

pub fn save_frame(base: &Path, frame: &Frame) -> Result<()> {
    let mut meta = ContainerMeta::new(ContainerKind::Frame, frame.id(), frame.vectors());
    meta.frame_spec = frame.spec().cloned();
    meta.index_set = Some(frame.index_set().clone());
    write(base, frame.vectors(), &meta)
}

/// Vectors are taken from the payload, not rebuilt from the constructor.
pub fn load_frame(base: &Path) -> Result<Frame> {
    let (m, meta) = read(base)?;
    if meta.kind != ContainerKind::Frame {
        return Err(Error::Format(format!("{} holds a {:?}, not a frame", base.display(), meta.kind)));
    }
    let index = meta.index_set.ok_or_else(|| Error::Format("frame sidecar without index set".into()))?;
    Ok(Frame::new(m, index, meta.id)?.with_spec(meta.frame_spec))
}

pub fn save_matrix(base: &Path, g: &GalerkinMatrix) -> Result<()> {
    let mut meta = ContainerMeta::new(ContainerKind::Matrix, format!("M({}, {})", g.left_frame, g.right_frame), &g.entries);
    meta.left = Some(g.left_frame.clone());
    meta.right = Some(g.right_frame.clone());
    if let (Some(d), Some(c)) = (&g.domain_space, &g.codomain_space) {
        meta.spaces = Some(ContainerSpaces {
            domain: d.clone(),
            codomain: c.clone(),
        });
    }
    write(base, &g.entries, &meta)
}

pub fn load_matrix(base: &Path) -> Result<GalerkinMatrix> {
    let (m, meta) = read(base)?;
    if meta.kind != ContainerKind::Matrix {
        return Err(Error::Format(format!("{} holds a {:?}, not a matrix", base.display(), meta.kind)));
    }
    let (domain_space, codomain_space) = match meta.spaces {
        Some(s) => (Some(s.domain), Some(s.codomain)),
        None => (None, None),
    };
    Ok(GalerkinMatrix {
        entries: m,
        left_frame: meta.left.unwrap_or_default(),
        right_frame: meta.right.unwrap_or_default(),
        domain_space,
        codomain_space,
    })
}

/// Single column.
pub fn save_vector(base: &Path, v: &CVec, id: &str) -> Result<()> {
    let m = CMat::from_column_slice(v.len(), 1, v.as_slice());
    write(base, &m, &ContainerMeta::new(ContainerKind::Vector, id, &m))
}

pub fn load_vector(base: &Path) -> Result<CVec> {
    let (m, meta) = read(base)?;
    if meta.kind != ContainerKind::Vector || m.ncols() != 1 {
        return Err(Error::Format(format!("{} does not hold a vector", base.display())));
    }
    Ok(m.column(0).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::WindowSpec;
    use crate::galerkin::{galerkin_matrix, LinearOperator};
    use crate::linalg::dense::{random_cmat, seeded};

    #[test]
    fn encode_layout() {
        let m = CMat::from_row_slice(2, 2, &[C64::new(1.0, 2.0), C64::new(3.0, 4.0), C64::new(5.0, 6.0), C64::new(7.0, 8.0)]);
        let b = encode(&m);
        assert_eq!(&b[..4], b"LFMX");
        assert_eq!(b.len(), HEADER_LEN + 64);
        // column-major: (0,0), (1,0), (0,1), (1,1)
        assert_eq!(read_f64(&b[HEADER_LEN + 16..HEADER_LEN + 24]), 5.0);
        assert_eq!(read_f64(&b[HEADER_LEN + 32..HEADER_LEN + 40]), 3.0);
    }

    #[test]
    fn bit_exact_roundtrip() {
        let mut m = random_cmat(5, 3, &mut seeded(1));
        m[(0, 0)] = C64::new(-0.0, f64::MIN_POSITIVE);
        m[(1, 2)] = C64::new(f64::MAX, 1e-310);
        let back = decode(&encode(&m)).unwrap();
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn corrupt_payloads_rejected() {
        let m = CMat::identity(2, 2);
        let mut b = encode(&m);
        assert!(decode(&b[..b.len() - 1]).is_err());
        b[0] = b'X';
        assert!(decode(&b).is_err());
        let mut b = encode(&m);
        b[4] = 9;
        assert!(decode(&b).is_err());
    }

    #[test]
    fn frame_and_matrix_files() {
        let dir = tempfile::tempdir().unwrap();
        let f = FrameSpec::gabor(16, 4, 4, WindowSpec::Gaussian).build().unwrap();
        let base = dir.path().join("gabor");
        save_frame(&base, &f).unwrap();
        let g = load_frame(&base).unwrap();
        assert_eq!(g.vectors(), f.vectors());
        assert_eq!(g.index_set(), f.index_set());
        assert_eq!(g.spec(), f.spec());
        assert_eq!(g.id(), f.id());

        let gm = galerkin_matrix(&LinearOperator::identity(16), &f, &f).unwrap();
        let mbase = dir.path().join("sub/matrix");
        save_matrix(&mbase, &gm).unwrap();
        assert_eq!(load_matrix(&mbase).unwrap(), gm);
        assert!(load_frame(&mbase).is_err());
        assert!(matches!(load_frame(&dir.path().join("missing")), Err(Error::Io(_))));
    }
}
