//! Token tensors and the DYT1 file format.
//!
//! DYT1 layout (little-endian):
//! - bytes 0..4: magic `DYT1`
//! - byte 4: dtype code (1 = f32)
//! - byte 5: rank (2 or 3)
//! - bytes 6..8: zero padding
//! - rank x u64 dims
//! - row-major payload (frame, then token, then channel for rank 3)

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"DYT1";
pub const DTYPE_F32: u8 = 1;
const FIXED_HEADER: usize = 8;

/// Per-frame visual tokens, `n_frames x tokens_per_frame x dim`.
///
/// Token 0 of every frame is the CLS token; tokens `1..L` are patches.
#[derive(Debug, Clone, PartialEq)]
pub struct VideoTokens {
    n_frames: usize,
    tokens_per_frame: usize,
    dim: usize,
    data: Vec<f32>,
}

impl VideoTokens {
    pub fn new(n_frames: usize, tokens_per_frame: usize, dim: usize, data: Vec<f32>) -> Result<Self> {
        if n_frames == 0 {
            return Err(Error::Validation("video needs at least one frame".into()));
        }
        if tokens_per_frame < 2 {
            return Err(Error::Validation(format!(
                "tokens per frame must be >= 2 (CLS plus one patch), got {tokens_per_frame}"
            )));
        }
        if dim == 0 {
            return Err(Error::Validation("token dimension must be >= 1".into()));
        }
        let expected = n_frames * tokens_per_frame * dim;
        if data.len() != expected {
            return Err(Error::Validation(format!(
                "data length {} does not match {n_frames}x{tokens_per_frame}x{dim}",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            let per_frame = tokens_per_frame * dim;
            return Err(Error::Validation(format!(
                "non-finite value at frame {}, token {}, channel {}",
                pos / per_frame,
                (pos % per_frame) / dim,
                pos % dim
            )));
        }
        Ok(Self {
            n_frames,
            tokens_per_frame,
            dim,
            data,
        })
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn tokens_per_frame(&self) -> usize {
        self.tokens_per_frame
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    /// All `L x D` values of one frame.
    pub fn frame(&self, frame: usize) -> &[f32] {
        let stride = self.tokens_per_frame * self.dim;
        &self.data[frame * stride..(frame + 1) * stride]
    }

    pub fn token(&self, frame: usize, token: usize) -> &[f32] {
        let start = (frame * self.tokens_per_frame + token) * self.dim;
        &self.data[start..start + self.dim]
    }

    pub fn cls(&self, frame: usize) -> &[f32] {
        self.token(frame, 0)
    }

    /// The `L - 1` patch tokens of one frame, CLS excluded.
    pub fn patches(&self, frame: usize) -> &[f32] {
        &self.frame(frame)[self.dim..]
    }

    pub fn n_patches(&self) -> usize {
        self.tokens_per_frame - 1
    }
}

/// A raw DYT1 tensor of rank 2 or 3.
#[derive(Debug, Clone, PartialEq)]
pub struct DytTensor {
    pub dims: Vec<usize>,
    pub data: Vec<f32>,
}

impl DytTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        if dims.len() != 2 && dims.len() != 3 {
            return Err(Error::Format(format!("rank must be 2 or 3, got {}", dims.len())));
        }
        let numel = checked_numel(&dims)?;
        if numel != data.len() {
            return Err(Error::Validation(format!(
                "dims {dims:?} imply {numel} values, got {}",
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    /// Serialized size in bytes.
    pub fn encoded_len(&self) -> usize {
        FIXED_HEADER + 8 * self.dims.len() + 4 * self.data.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(MAGIC);
        out.push(DTYPE_F32);
        out.push(self.dims.len() as u8);
        out.extend_from_slice(&[0, 0]);
        for &d in &self.dims {
            out.extend_from_slice(&(d as u64).to_le_bytes());
        }
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < FIXED_HEADER {
            return Err(Error::Format(format!("file too short for header: {} bytes", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::Format(format!(
                "bad magic {:?}, expected \"DYT1\"",
                String::from_utf8_lossy(&bytes[0..4])
            )));
        }
        if bytes[4] != DTYPE_F32 {
            return Err(Error::Format(format!("unsupported dtype code {}", bytes[4])));
        }
        let rank = bytes[5] as usize;
        if rank != 2 && rank != 3 {
            return Err(Error::Format(format!("rank must be 2 or 3, got {rank}")));
        }
        if bytes[6] != 0 || bytes[7] != 0 {
            return Err(Error::Format("non-zero header padding".into()));
        }
        let dims_end = FIXED_HEADER + 8 * rank;
        if bytes.len() < dims_end {
            return Err(Error::Format("truncated dims".into()));
        }
        let dims = bytes[FIXED_HEADER..dims_end]
            .chunks_exact(8)
            .map(|c| {
                let d = u64::from_le_bytes(c.try_into().expect("8-byte chunk"));
                usize::try_from(d).map_err(|_| Error::Format(format!("dim {d} overflows")))
            })
            .collect::<Result<Vec<_>>>()?;
        let numel = checked_numel(&dims)?;
        let payload = &bytes[dims_end..];
        let expected = numel
            .checked_mul(4)
            .ok_or_else(|| Error::Format(format!("dims {dims:?} overflow")))?;
        if payload.len() != expected {
            return Err(Error::Format(format!(
                "payload is {} bytes, dims {dims:?} require {expected}",
                payload.len()
            )));
        }
        let data = payload
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4-byte chunk")))
            .collect();
        Ok(Self { dims, data })
    }
}

fn checked_numel(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format(format!("dims {dims:?} overflow")))
}

pub fn write_dyt(tensor: &DytTensor, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::storage(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&tensor.encode())
        .and_then(|_| w.flush())
        .map_err(|e| Error::storage(path, e))
}

pub fn read_dyt(path: impl AsRef<Path>) -> Result<DytTensor> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::storage(path, e))?;
    DytTensor::decode(&bytes)
}

pub fn save_tokens(tokens: &VideoTokens, path: impl AsRef<Path>) -> Result<()> {
    // VideoTokens cannot hold non-finite values, so nothing invalid reaches disk.
    let tensor = DytTensor {
        dims: vec![tokens.n_frames, tokens.tokens_per_frame, tokens.dim],
        data: tokens.data.clone(),
    };
    write_dyt(&tensor, path)
}

pub fn load_tokens(path: impl AsRef<Path>) -> Result<VideoTokens> {
    let tensor = read_dyt(path)?;
    tokens_from_tensor(tensor)
}

pub fn tokens_from_tensor(tensor: DytTensor) -> Result<VideoTokens> {
    match tensor.dims[..] {
        [n, l, d] => VideoTokens::new(n, l, d, tensor.data),
        _ => Err(Error::Format(format!(
            "expected a rank-3 token tensor, got rank {}",
            tensor.dims.len()
        ))),
    }
}

/// L2-normalized CLS vectors with timestamps `1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClsSequence {
    n_frames: usize,
    dim: usize,
    vectors: Vec<f64>,
}

impl ClsSequence {
    /// Normalizes each row of an `n x dim` matrix. Zero rows are rejected.
    pub fn from_rows(n_frames: usize, dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != n_frames * dim || dim == 0 {
            return Err(Error::Validation(format!(
                "expected {n_frames}x{dim} CLS values, got {}",
                rows.len()
            )));
        }
        let mut vectors = rows.to_vec();
        for (i, row) in vectors.chunks_exact_mut(dim).enumerate() {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation(format!("non-finite CLS token in frame {i}")));
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Validation(format!("zero-norm CLS token in frame {i}")));
            }
            row.iter_mut().for_each(|v| *v /= norm);
        }
        Ok(Self {
            n_frames,
            dim,
            vectors,
        })
    }

    pub fn len(&self) -> usize {
        self.n_frames
    }

    pub fn is_empty(&self) -> bool {
        self.n_frames == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// 1-based timestamp of frame `i`.
    pub fn timestamp(&self, i: usize) -> usize {
        i + 1
    }

    pub fn timestamps(&self) -> Vec<f64> {
        (1..=self.n_frames).map(|t| t as f64).collect()
    }
}

pub fn extract_cls_sequence(tokens: &VideoTokens) -> Result<ClsSequence> {
    let rows: Vec<f64> = (0..tokens.n_frames())
        .flat_map(|f| tokens.cls(f).iter().map(|&v| v as f64))
        .collect();
    ClsSequence::from_rows(tokens.n_frames(), tokens.dim(), &rows)
}
