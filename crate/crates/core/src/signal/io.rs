//! `SFFT1` binary signal files.
//!
//! Layout: ASCII magic `SFFT1`, `N` as u64 little-endian, then `N` records of
//! two little-endian f64 (real, imaginary).

use super::Signal;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

pub const SIGNAL_MAGIC: &[u8; 5] = b"SFFT1";
const HEADER_LEN: usize = 13;
const RECORD_LEN: usize = 16;

pub fn write_signal<W: Write>(x: &Signal, mut out: W) -> Result<()> {
    out.write_all(SIGNAL_MAGIC)?;
    out.write_all(&(x.len() as u64).to_le_bytes())?;
    for s in x.samples() {
        out.write_all(&s.re.to_le_bytes())?;
        out.write_all(&s.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_signal<R: Read>(mut input: R) -> Result<Signal> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn save_signal(x: &Signal, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_signal(x, std::io::BufWriter::new(file))
}

pub fn load_signal(path: impl AsRef<Path>) -> Result<Signal> {
    let bytes = std::fs::read(path)?;
    decode(&bytes)
}

fn format_err(offset: usize, message: impl Into<String>) -> Error {
    Error::Format {
        offset: offset as u64,
        message: message.into(),
    }
}

fn decode(bytes: &[u8]) -> Result<Signal> {
    if bytes.len() < SIGNAL_MAGIC.len() || &bytes[..SIGNAL_MAGIC.len()] != SIGNAL_MAGIC {
        return Err(format_err(0, "missing SFFT1 magic"));
    }
    if bytes.len() < HEADER_LEN {
        return Err(format_err(bytes.len(), "truncated length header"));
    }
    let n = u64::from_le_bytes(bytes[5..HEADER_LEN].try_into().expect("8-byte slice"));
    if n == 0 {
        return Err(format_err(5, "signal length must be at least 1"));
    }
    let payload = &bytes[HEADER_LEN..];
    let available = payload.len() / RECORD_LEN;
    if (available as u64) < n {
        let offset = HEADER_LEN + available * RECORD_LEN;
        return Err(format_err(
            offset,
            format!("truncated payload: header declares {n} samples, found {available}"),
        ));
    }
    let n = n as usize;
    if payload.len() != n * RECORD_LEN {
        return Err(format_err(
            HEADER_LEN + n * RECORD_LEN,
            "trailing bytes after payload",
        ));
    }
    let samples = payload
        .chunks_exact(RECORD_LEN)
        .map(|rec| {
            let re = f64::from_le_bytes(rec[..8].try_into().expect("8-byte slice"));
            let im = f64::from_le_bytes(rec[8..].try_into().expect("8-byte slice"));
            Complex64::new(re, im)
        })
        .collect();
    Signal::new(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{synthesize, SparseSpec, Tone};

    fn toy() -> Signal {
        synthesize(
            &SparseSpec::new(
                16,
                vec![
                    Tone::new(3, Complex64::new(5.0, 0.0)),
                    Tone::new(11, Complex64::new(3.0, 0.0)),
                ],
            )
            .unwrap(),
        )
    }

    fn encode(x: &Signal) -> Vec<u8> {
        let mut buf = Vec::new();
        write_signal(x, &mut buf).unwrap();
        buf
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let x = toy();
        let bytes = encode(&x);
        assert_eq!(bytes.len(), 13 + 16 * 16);
        let back = read_signal(bytes.as_slice()).unwrap();
        for (a, b) in x.samples().iter().zip(back.samples()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("hsfft-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("toy.sig");
        save_signal(&toy(), &path).unwrap();
        assert_eq!(load_signal(&path).unwrap(), toy());
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&Signal::zeros(2).unwrap());
        assert_eq!(&bytes[..5], b"SFFT1");
        assert_eq!(&bytes[5..13], &2u64.to_le_bytes());
    }

    #[test]
    fn wrong_magic() {
        let mut bytes = encode(&toy());
        bytes[0] = b'X';
        assert!(matches!(
            read_signal(bytes.as_slice()),
            Err(Error::Format { offset: 0, .. })
        ));
    }

    #[test]
    fn truncated_payload_reports_offset() {
        let mut bytes = b"SFFT1".to_vec();
        bytes.extend_from_slice(&4u64.to_le_bytes());
        bytes.extend(std::iter::repeat(0u8).take(3 * 16));
        match read_signal(bytes.as_slice()) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 13 + 48),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_header_and_trailing_bytes() {
        assert!(matches!(
            read_signal(&b"SFFT1\x01\x00"[..]),
            Err(Error::Format { offset: 7, .. })
        ));
        let mut bytes = encode(&toy());
        bytes.push(0);
        assert!(matches!(
            read_signal(bytes.as_slice()),
            Err(Error::Format { .. })
        ));
    }
}
