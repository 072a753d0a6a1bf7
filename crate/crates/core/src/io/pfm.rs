use std::path::Path;

use super::{io_err, IoError};

/// Row-major depth map, row 0 at the top of the image.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap {
    pub width: u32,
    pub height: u32,
    pub data: Vec<f32>,
}

/// Grayscale little-endian PFM: `Pf`, `W H`, `-1.0`, then rows bottom to top.
pub fn encode_pfm(width: u32, height: u32, data: &[f32]) -> Result<Vec<u8>, IoError> {
    if data.len() != width as usize * height as usize {
        return Err(IoError::Format {
            what: "depth map",
            message: format!("{} values for a {width}x{height} image", data.len()),
        });
    }
    if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
        return Err(IoError::InvalidDepth(i));
    }
    let header = format!("Pf\n{width} {height}\n-1.0\n");
    let mut out = Vec::with_capacity(header.len() + data.len() * 4);
    out.extend_from_slice(header.as_bytes());
    for row in data.chunks_exact(width.max(1) as usize).rev() {
        for v in row {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_pfm(bytes: &[u8]) -> Result<DepthMap, IoError> {
    let bad = |message: &str| IoError::Format {
        what: "PFM",
        message: message.to_string(),
    };
    let mut fields = Vec::with_capacity(4);
    let mut pos = 0;
    // header: four whitespace-separated tokens, the last followed by one whitespace byte
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields
            .push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header is not ASCII"))?);
    }
    pos += 1;
    if fields[0] != "Pf" {
        return Err(bad("only grayscale `Pf` files are supported"));
    }
    let width: u32 = fields[1].parse().map_err(|_| bad("bad width"))?;
    let height: u32 = fields[2].parse().map_err(|_| bad("bad height"))?;
    let scale: f64 = fields[3].parse().map_err(|_| bad("bad scale"))?;
    let n = width as usize * height as usize;
    let payload = bytes.get(pos..).ok_or_else(|| bad("missing payload"))?;
    if payload.len() != n * 4 {
        return Err(bad("payload size does not match dimensions"));
    }
    let little = scale < 0.0;
    let mut data = vec![0.0f32; n];
    for (r, row) in payload.chunks_exact(width.max(1) as usize * 4).enumerate() {
        let y = height as usize - 1 - r;
        for (x, b) in row.chunks_exact(4).enumerate() {
            let b = [b[0], b[1], b[2], b[3]];
            data[y * width as usize + x] = if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
        }
    }
    Ok(DepthMap {
        width,
        height,
        data,
    })
}

pub fn write_pfm(path: &Path, width: u32, height: u32, data: &[f32]) -> Result<(), IoError> {
    let bytes = encode_pfm(width, height, data)?;
    std::fs::write(path, bytes).map_err(io_err(path))
}

pub fn read_pfm(path: &Path) -> Result<DepthMap, IoError> {
    decode_pfm(&std::fs::read(path).map_err(io_err(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_pixel_layout() {
        let bytes = encode_pfm(1, 1, &[2.5]).unwrap();
        let header = b"Pf\n1 1\n-1.0\n";
        assert_eq!(&bytes[..header.len()], header);
        assert_eq!(&bytes[header.len()..], &2.5f32.to_le_bytes());
        assert_eq!(
            decode_pfm(&bytes).unwrap().data[0].to_bits(),
            2.5f32.to_bits()
        );
    }

    #[test]
    fn rows_are_stored_bottom_up() {
        let bytes = encode_pfm(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let payload = &bytes[bytes.len() - 16..];
        assert_eq!(&payload[..4], &3.0f32.to_le_bytes());
        assert_eq!(decode_pfm(&bytes).unwrap().data, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_nan_and_negative() {
        assert!(matches!(
            encode_pfm(2, 1, &[1.0, f32::NAN]),
            Err(IoError::InvalidDepth(1))
        ));
        assert!(matches!(
            encode_pfm(1, 1, &[-1.0]),
            Err(IoError::InvalidDepth(0))
        ));
        assert!(encode_pfm(1, 1, &[f32::INFINITY]).is_err());
    }

    #[test]
    fn big_endian_files_are_read() {
        let mut bytes = b"Pf\n1 1\n1.0\n".to_vec();
        bytes.extend_from_slice(&7.25f32.to_be_bytes());
        assert_eq!(decode_pfm(&bytes).unwrap().data, vec![7.25]);
    }
}
