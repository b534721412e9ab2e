//! Portable graymap reading (P2/P5, up to 16 bit) and 8-bit P5 writing.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::ScalarField;

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

/// Skips whitespace and `#` comments, then reads one decimal token.
fn next_token(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while let Some(&c) = bytes.get(*pos) {
                    *pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            }
            Some(c) if c.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(Error::Parse("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(Error::Parse(format!("expected a number at byte {start}")));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse(format!("number out of range at byte {start}")))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        Some(m) => {
            return Err(Error::Parse(format!(
                "unsupported magic `{}`, expected P2 or P5",
                String::from_utf8_lossy(m)
            )))
        }
        None => return Err(Error::Parse("file too short for a PGM header".into())),
    };
    let mut pos = 2;
    let width = next_token(bytes, &mut pos)? as usize;
    let height = next_token(bytes, &mut pos)? as usize;
    let maxval = next_token(bytes, &mut pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("maxval {maxval} outside 1..=65535")));
    }
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(pos) {
            Some(c) if c.is_ascii_whitespace() => pos += 1,
            _ => return Err(Error::Parse("missing whitespace after maxval".into())),
        }
    }
    Ok(Header { binary, width, height, maxval, data_start: pos })
}

/// Decodes PGM bytes. Values keep their stored range; spacing is 1.
pub fn decode_pgm(bytes: &[u8]) -> Result<ScalarField> {
    let h = parse_header(bytes)?;
    let n = h.width * h.height;
    let mut values = Vec::with_capacity(n);
    if h.binary {
        let wide = h.maxval > 255;
        let bpp = if wide { 2 } else { 1 };
        let raster = &bytes[h.data_start..];
        if raster.len() < n * bpp {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::UnexpectedEof,
                format!("raster holds {} of {} bytes", raster.len(), n * bpp),
            )));
        }
        if wide {
            values.extend(raster.chunks_exact(2).take(n).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64));
        } else {
            values.extend(raster[..n].iter().map(|&b| b as f64));
        }
    } else {
        let mut pos = h.data_start;
        for i in 0..n {
            let v = next_token(bytes, &mut pos).map_err(|_| {
                Error::Io(std::io::Error::new(
                    std::io::ErrorKind::UnexpectedEof,
                    format!("ASCII raster ends after {i} of {n} samples"),
                ))
            })?;
            values.push(v as f64);
        }
    }
    if let Some(v) = values.iter().find(|&&v| v > h.maxval as f64) {
        return Err(Error::Parse(format!("sample {v} exceeds maxval {}", h.maxval)));
    }
    ScalarField::new(h.width, h.height, 1.0, values)
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<ScalarField> {
    let mut bytes = Vec::new();
    std::fs::File::open(path.as_ref())?.read_to_end(&mut bytes)?;
    decode_pgm(&bytes)
}

/// Encodes as binary P5 with maxval 255, clamping and rounding each value.
pub fn encode_pgm(field: &ScalarField) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", field.width(), field.height()).into_bytes();
    out.extend(field.values().iter().map(|&v| v.clamp(0.0, 255.0).round() as u8));
    out
}

pub fn save_pgm(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
    file.write_all(&encode_pgm(field))?;
    file.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_constant() {
        let f = decode_pgm(b"P2\n# comment\n3 3\n15\n7 7 7\n7 7 7\n7 7 7\n").unwrap();
        assert_eq!(f.values(), &[7.0; 9]);
        assert_eq!(f.spacing(), 1.0);
    }

    #[test]
    fn binary_identity_payload() {
        let mut bytes = b"P5 3 3 255\n".to_vec();
        bytes.extend(0u8..9);
        let f = decode_pgm(&bytes).unwrap();
        assert_eq!(f.values(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    }

    #[test]
    fn sixteen_bit_big_endian() {
        let mut bytes = b"P5\n3 3\n65535\n".to_vec();
        for v in [0u16, 256, 65535, 1, 2, 3, 4, 5, 6] {
            bytes.extend(v.to_be_bytes());
        }
        let f = decode_pgm(&bytes).unwrap();
        assert_eq!(&f.values()[..3], &[0.0, 256.0, 65535.0]);
    }

    #[test]
    fn color_magic_rejected() {
        assert!(matches!(decode_pgm(b"P3\n3 3\n255\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn truncated_payload_is_io_error() {
        assert!(matches!(decode_pgm(b"P5\n3 3\n255\n\x01\x02"), Err(Error::Io(_))));
        assert!(matches!(decode_pgm(b"P2\n3 3\n255\n1 2 3"), Err(Error::Io(_))));
    }

    #[test]
    fn malformed_header_is_parse_error() {
        assert!(matches!(decode_pgm(b"P2\n3 x\n255\n"), Err(Error::Parse(_))));
        assert!(matches!(decode_pgm(b"P5\n3 3\n70000\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn writer_clamps_and_rounds() {
        let f = ScalarField::new(3, 3, 1.0, vec![-4.0, 0.4, 0.6, 254.5, 300.0, 7.0, 8.0, 9.0, 10.0]).unwrap();
        let back = decode_pgm(&encode_pgm(&f)).unwrap();
        assert_eq!(back.values(), &[0.0, 0.0, 1.0, 255.0, 255.0, 7.0, 8.0, 9.0, 10.0]);
    }
}
