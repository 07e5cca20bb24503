//! On-disk tensor format `RTB1`.
//!
//! Layout: bytes 0-3 magic `RTB1`; byte 4 the order `d` (u8); then `d`
//! little-endian u32 dimensions; then `prod(n_j)` little-endian IEEE-754
//! f64 values in row-major order. Round-trips are bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::{Shape, Tensor};

pub const MAGIC: [u8; 4] = *b"RTB1";

/// Serializes a tensor into the RTB1 byte layout.
pub fn tensor_to_bytes(t: &Tensor) -> Result<Vec<u8>> {
    let dims = t.shape().dims();
    if dims.len() > u8::MAX as usize {
        return Err(Error::InvalidShape(format!("order {} exceeds u8", dims.len())));
    }
    let mut out = Vec::with_capacity(5 + 4 * dims.len() + 8 * t.data().len());
    out.extend_from_slice(&MAGIC);
    out.push(dims.len() as u8);
    for &n in dims {
        let n32 = u32::try_from(n)
            .map_err(|_| Error::InvalidShape(format!("dimension {n} exceeds u32")))?;
        out.extend_from_slice(&n32.to_le_bytes());
    }
    for &x in t.data() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    Ok(out)
}

/// Parses the RTB1 byte layout back into a tensor.
pub fn tensor_from_bytes(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 5 {
        return Err(Error::MalformedHeader(format!(
            "file too short for header ({} bytes)",
            bytes.len()
        )));
    }
    if bytes[0..4] != MAGIC {
        return Err(Error::MalformedHeader(format!(
            "bad magic {:02x?}, expected {:02x?}",
            &bytes[0..4],
            MAGIC
        )));
    }
    let d = bytes[4] as usize;
    let header_len = 5 + 4 * d;
    if bytes.len() < header_len {
        return Err(Error::MalformedHeader(format!(
            "header truncated: need {header_len} bytes for order {d}"
        )));
    }
    let mut dims = Vec::with_capacity(d);
    for j in 0..d {
        let off = 5 + 4 * j;
        let n = u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
        dims.push(n as usize);
    }
    let shape = Shape::new(dims).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let count = shape.element_count();
    let expected = 8 * count as u64;
    let actual = (bytes.len() - header_len) as u64;
    if actual != expected {
        return Err(Error::LengthMismatch { expected, actual });
    }
    let mut data = Vec::with_capacity(count);
    for i in 0..count {
        let off = header_len + 8 * i;
        let x = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        if !x.is_finite() {
            return Err(Error::NonFinitePayload(i));
        }
        data.push(x);
    }
    Tensor::new(shape, data)
}

pub fn write_tensor(t: &Tensor, path: impl AsRef<Path>) -> Result<()> {
    let bytes = tensor_to_bytes(t)?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor> {
    let bytes = fs::read(path)?;
    tensor_from_bytes(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_tensor() -> Tensor {
        let mut state = 99u64;
        let data: Vec<f64> = (0..27)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 11) as f64) / ((1u64 << 53) as f64) * 4.0 - 2.0
            })
            .collect();
        Tensor::new(Shape::new(vec![3, 3, 3]).unwrap(), data).unwrap()
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let t = sample_tensor();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.rtb");
        write_tensor(&t, &path).unwrap();
        let back = read_tensor(&path).unwrap();
        assert_eq!(t.shape(), back.shape());
        for (a, b) in t.data().iter().zip(back.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // Re-serialized bytes match the file exactly.
        let file_bytes = std::fs::read(&path).unwrap();
        assert_eq!(file_bytes, tensor_to_bytes(&back).unwrap());
    }

    #[test]
    fn length_mismatch_is_detected() {
        let t = sample_tensor();
        let mut bytes = tensor_to_bytes(&t).unwrap();
        bytes.truncate(bytes.len() - 8);
        match tensor_from_bytes(&bytes) {
            Err(Error::LengthMismatch { expected, actual }) => {
                assert_eq!(expected, 27 * 8);
                assert_eq!(actual, 26 * 8);
            }
            other => panic!("expected LengthMismatch, got {other:?}"),
        }
        // Extra trailing bytes are also a length mismatch.
        let mut long = tensor_to_bytes(&t).unwrap();
        long.extend_from_slice(&[0u8; 4]);
        assert!(matches!(
            tensor_from_bytes(&long),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn bad_magic_is_malformed_header() {
        let t = sample_tensor();
        let mut bytes = tensor_to_bytes(&t).unwrap();
        bytes[0] = b'X';
        assert!(matches!(
            tensor_from_bytes(&bytes),
            Err(Error::MalformedHeader(_))
        ));
        assert!(matches!(
            tensor_from_bytes(&bytes[0..3]),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn non_finite_payload_is_rejected() {
        let t = sample_tensor();
        let mut bytes = tensor_to_bytes(&t).unwrap();
        let off = bytes.len() - 8;
        bytes[off..].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(
            tensor_from_bytes(&bytes),
            Err(Error::NonFinitePayload(26))
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            read_tensor("/nonexistent/definitely/missing.rtb"),
            Err(Error::Io(_))
        ));
    }
}
