//! Grayscale image loading for the near-duplicate audit.
//!
//! Binary Netpbm (`P5` gray, `P6` RGB) is always available. JPEG and PNG go
//! through the `image` crate when the `jpeg` feature is enabled. RGB input is
//! reduced to luma with integer BT.601 weights `(77 R + 150 G + 29 B + 128) >> 8`.

use std::path::Path;

use firescene_core::features::FeatureError;
use firescene_core::GrayImage;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("netpbm: {0}")]
    Netpbm(String),
    #[error("unsupported image format{0}")]
    Unsupported(&'static str),
    #[error("decode failed: {0}")]
    Decode(String),
    #[error(transparent)]
    Buffer(#[from] FeatureError),
}

/// Turns encoded bytes into a grayscale image.
pub trait ImageDecoder: Send + Sync {
    fn decode(&self, bytes: &[u8]) -> Result<GrayImage, ImageError>;
}

pub struct NetpbmDecoder;

impl ImageDecoder for NetpbmDecoder {
    fn decode(&self, bytes: &[u8]) -> Result<GrayImage, ImageError> {
        decode_netpbm(bytes)
    }
}

#[cfg(feature = "jpeg")]
pub struct ImageCrateDecoder;

#[cfg(feature = "jpeg")]
impl ImageDecoder for ImageCrateDecoder {
    fn decode(&self, bytes: &[u8]) -> Result<GrayImage, ImageError> {
        let rgb = image::load_from_memory(bytes)
            .map_err(|e| ImageError::Decode(e.to_string()))?
            .to_rgb8();
        Ok(GrayImage::from_rgb(
            rgb.width() as usize,
            rgb.height() as usize,
            rgb.as_raw(),
        )?)
    }
}

/// Picks a decoder from the leading bytes.
pub fn decode_image(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        return NetpbmDecoder.decode(bytes);
    }
    #[cfg(feature = "jpeg")]
    {
        ImageCrateDecoder.decode(bytes)
    }
    #[cfg(not(feature = "jpeg"))]
    {
        Err(ImageError::Unsupported(
            " (only binary PGM/PPM; build with `--features jpeg` for JPEG/PNG)",
        ))
    }
}

pub fn load_gray(path: &Path) -> Result<GrayImage, ImageError> {
    let bytes = std::fs::read(path).map_err(|source| ImageError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_image(&bytes)
}

struct Header {
    magic: u8,
    width: usize,
    height: usize,
    maxval: usize,
    data_at: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, ImageError> {
    let bad = |m: &str| ImageError::Netpbm(m.to_string());
    let magic = match bytes.get(..2) {
        Some(b"P5") => 5,
        Some(b"P6") => 6,
        _ => return Err(bad("expected P5 or P6 magic")),
    };
    let mut at = 2;
    let mut fields = [0usize; 3];
    for field in &mut fields {
        loop {
            match bytes.get(at) {
                Some(b'#') => {
                    while bytes.get(at).is_some_and(|&c| c != b'\n') {
                        at += 1;
                    }
                }
                Some(c) if c.is_ascii_whitespace() => at += 1,
                _ => break,
            }
        }
        let start = at;
        while bytes.get(at).is_some_and(u8::is_ascii_digit) {
            at += 1;
        }
        if start == at {
            return Err(bad("truncated header"));
        }
        *field = std::str::from_utf8(&bytes[start..at])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("header value out of range"))?;
    }
    if !bytes.get(at).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("missing whitespace after maxval"));
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 65535 {
        return Err(bad("maxval must be in 1..=65535"));
    }
    Ok(Header {
        magic,
        width,
        height,
        maxval,
        data_at: at + 1,
    })
}

pub fn decode_netpbm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let h = parse_header(bytes)?;
    let channels = if h.magic == 6 { 3 } else { 1 };
    let sample_bytes = if h.maxval > 255 { 2 } else { 1 };
    let need = h.width * h.height * channels * sample_bytes;
    let body = bytes
        .get(h.data_at..h.data_at + need)
        .ok_or_else(|| ImageError::Netpbm(format!("expected {need} data bytes")))?;
    let samples: Vec<u8> = if sample_bytes == 1 {
        body.iter()
            .map(|&v| ((v as usize * 255 + h.maxval / 2) / h.maxval) as u8)
            .collect()
    } else {
        body.chunks_exact(2)
            .map(|c| {
                ((u16::from_be_bytes([c[0], c[1]]) as usize * 255 + h.maxval / 2) / h.maxval) as u8
            })
            .collect()
    };
    Ok(if channels == 3 {
        GrayImage::from_rgb(h.width, h.height, &samples)?
    } else {
        GrayImage::new(h.width, h.height, samples)?
    })
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn encode_ppm(width: usize, height: usize, rgb: &[u8]) -> Vec<u8> {
    let mut out = format!("P6\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(rgb);
    out
}
