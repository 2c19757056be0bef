//! Minimal single-band TIFF reader and writer for radiometric rasters.
//!
//! Supported: classic TIFF in either byte order, one sample per pixel,
//! strips, no compression or Deflate (8 or 32946), float32 or uint16
//! samples. A GDAL no-data tag (42113) is honoured. Everything else is
//! rejected with the byte offset and tag of the offending field.

use std::path::Path;

use firescene_core::ThermalRaster;
use miniz_oxide::deflate::compress_to_vec_zlib;
use miniz_oxide::inflate::{decompress_to_vec_zlib_with_limit, TINFLStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ifd::{Endian, FormatError, Reader, Writer};

const IMAGE_WIDTH: u16 = 256;
const IMAGE_LENGTH: u16 = 257;
const BITS_PER_SAMPLE: u16 = 258;
const COMPRESSION: u16 = 259;
const STRIP_OFFSETS: u16 = 273;
const SAMPLES_PER_PIXEL: u16 = 277;
const ROWS_PER_STRIP: u16 = 278;
const STRIP_BYTE_COUNTS: u16 = 279;
const PREDICTOR: u16 = 317;
const TILE_WIDTH: u16 = 322;
const SAMPLE_FORMAT: u16 = 339;
const GDAL_NODATA: u16 = 42113;

#[derive(Debug, Error)]
pub enum TiffError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error(transparent)]
    Raster(#[from] firescene_core::raster::RasterError),
}

/// Linear conversion applied to integer samples: `value * scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Calibration {
    pub scale: f64,
    pub offset: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Self {
            scale: 1.0,
            offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TiffOptions {
    pub calibration: Calibration,
    /// Overrides the file's no-data tag. Compared against raw samples.
    pub nodata: Option<f64>,
}

pub fn load_thermal_tiff(path: &Path, options: &TiffOptions) -> Result<ThermalRaster, TiffError> {
    let bytes = std::fs::read(path).map_err(|source| TiffError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_thermal_tiff(&bytes, options)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SampleKind {
    F32,
    U16,
}

pub fn decode_thermal_tiff(
    bytes: &[u8],
    options: &TiffOptions,
) -> Result<ThermalRaster, TiffError> {
    let (r, first) = Reader::from_header(bytes)?;
    let (entries, _) = r.ifd(first)?;
    let find = |tag: u16| entries.iter().find(|e| e.tag == tag);
    let required = |tag: u16, name: &str| {
        find(tag).ok_or_else(|| {
            FormatError::new(first, Some(tag), format!("missing required tag {name}"))
        })
    };

    if let Some(e) = find(TILE_WIDTH) {
        return Err(
            FormatError::new(e.entry_offset, Some(TILE_WIDTH), "tiled TIFF unsupported").into(),
        );
    }
    let width = required(IMAGE_WIDTH, "ImageWidth")?.single(&r)? as usize;
    let height = required(IMAGE_LENGTH, "ImageLength")?.single(&r)? as usize;
    if let Some(e) = find(SAMPLES_PER_PIXEL) {
        let spp = e.single(&r)?;
        if spp != 1 {
            return Err(FormatError::new(
                e.entry_offset,
                Some(SAMPLES_PER_PIXEL),
                format!("multi-band unsupported ({spp} samples per pixel)"),
            )
            .into());
        }
    }
    let bits_entry = required(BITS_PER_SAMPLE, "BitsPerSample")?;
    let bits = bits_entry.unsigned(&r)?;
    let format = match find(SAMPLE_FORMAT) {
        Some(e) => e.unsigned(&r)?.first().copied().unwrap_or(1),
        None => 1,
    };
    let kind = match (bits.as_slice(), format) {
        ([32], 3) => SampleKind::F32,
        ([16], 1) => SampleKind::U16,
        (b, f) => {
            return Err(FormatError::new(
                bits_entry.entry_offset,
                Some(SAMPLE_FORMAT),
                format!("unsupported sample type: {b:?} bits with sample format {f}"),
            )
            .into())
        }
    };
    let compression_entry = find(COMPRESSION);
    let compression = match compression_entry {
        Some(e) => e.single(&r)?,
        None => 1,
    };
    let deflate = match compression {
        1 => false,
        8 | 32946 => true,
        c => {
            let at = compression_entry.map_or(first, |e| e.entry_offset);
            return Err(FormatError::new(
                at,
                Some(COMPRESSION),
                format!("unsupported compression {c}"),
            )
            .into());
        }
    };
    if let Some(e) = find(PREDICTOR) {
        if e.single(&r)? != 1 {
            return Err(
                FormatError::new(e.entry_offset, Some(PREDICTOR), "predictor unsupported").into(),
            );
        }
    }
    let offsets_entry = required(STRIP_OFFSETS, "StripOffsets")?;
    let offsets = offsets_entry.unsigned(&r)?;
    let counts_entry = required(STRIP_BYTE_COUNTS, "StripByteCounts")?;
    let counts = counts_entry.unsigned(&r)?;
    if offsets.len() != counts.len() {
        return Err(FormatError::new(
            counts_entry.entry_offset,
            Some(STRIP_BYTE_COUNTS),
            format!(
                "{} strip offsets but {} byte counts",
                offsets.len(),
                counts.len()
            ),
        )
        .into());
    }
    let nodata = match options.nodata {
        Some(v) => Some(v),
        None => match find(GDAL_NODATA) {
            Some(e) => {
                let text = e.ascii(&r)?;
                let v = text.trim().parse::<f64>().map_err(|_| {
                    FormatError::new(
                        e.entry_offset,
                        Some(GDAL_NODATA),
                        format!("unparsable no-data value {text:?}"),
                    )
                })?;
                Some(v)
            }
            None => None,
        },
    };

    let sample_size = match kind {
        SampleKind::F32 => 4,
        SampleKind::U16 => 2,
    };
    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(sample_size))
        .ok_or_else(|| FormatError::new(first, Some(IMAGE_WIDTH), "image dimensions overflow"))?;
    let mismatch = |held: String| {
        FormatError::new(
            offsets_entry.entry_offset,
            Some(STRIP_OFFSETS),
            format!("dimension/strip mismatch: strips hold {held} bytes, {width}x{height} needs {expected}"),
        )
    };
    let mut pixels = Vec::new();
    for (&off, &len) in offsets.iter().zip(&counts) {
        let raw = r
            .bytes(off, len)
            .map_err(|e| FormatError::new(e.offset, Some(STRIP_OFFSETS), e.message))?;
        let remaining = expected - pixels.len();
        if deflate {
            let inflated = decompress_to_vec_zlib_with_limit(raw, remaining).map_err(|e| {
                if e.status == TINFLStatus::HasMoreOutput {
                    mismatch(format!("more than {expected}"))
                } else {
                    FormatError::new(
                        off,
                        Some(COMPRESSION),
                        format!("Deflate stream corrupt: {:?}", e.status),
                    )
                }
            })?;
            pixels.extend_from_slice(&inflated);
        } else if raw.len() > remaining {
            return Err(mismatch(format!("more than {expected}")).into());
        } else {
            pixels.extend_from_slice(raw);
        }
    }
    if pixels.len() != expected {
        return Err(mismatch(pixels.len().to_string()).into());
    }

    let n = width * height;
    let mut temps = Vec::with_capacity(n);
    let mut measured = Vec::with_capacity(n);
    let cal = options.calibration;
    for chunk in pixels.chunks_exact(sample_size) {
        let raw = match kind {
            SampleKind::F32 => {
                let b: [u8; 4] = chunk.try_into().expect("4 bytes");
                f32::from_bits(match r.endian {
                    Endian::Little => u32::from_le_bytes(b),
                    Endian::Big => u32::from_be_bytes(b),
                }) as f64
            }
            SampleKind::U16 => {
                let b: [u8; 2] = chunk.try_into().expect("2 bytes");
                (match r.endian {
                    Endian::Little => u16::from_le_bytes(b),
                    Endian::Big => u16::from_be_bytes(b),
                }) as f64
            }
        };
        measured.push(nodata != Some(raw));
        temps.push(match kind {
            SampleKind::F32 => raw,
            SampleKind::U16 => raw * cal.scale + cal.offset,
        });
    }
    Ok(ThermalRaster::from_parts(width, height, temps, measured)?)
}

/// Sample payload for [`encode_tiff`].
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    F32(Vec<f32>),
    U16(Vec<u16>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiffWriteOptions {
    pub endian: Endian,
    pub deflate: bool,
    pub rows_per_strip: usize,
    pub nodata: Option<f64>,
}

impl Default for TiffWriteOptions {
    fn default() -> Self {
        Self {
            endian: Endian::Little,
            deflate: false,
            rows_per_strip: 16,
            nodata: None,
        }
    }
}

/// Encodes a single-band strip TIFF.
pub fn encode_tiff(
    width: usize,
    height: usize,
    samples: &Samples,
    opts: &TiffWriteOptions,
) -> Vec<u8> {
    let mut w = Writer::new(opts.endian);
    let (bits, format, size) = match samples {
        Samples::F32(_) => (32u16, 3u16, 4usize),
        Samples::U16(_) => (16, 1, 2),
    };
    let mut raw = Vec::with_capacity(width * height * size);
    match samples {
        Samples::F32(v) => v.iter().for_each(|s| {
            raw.extend_from_slice(&match opts.endian {
                Endian::Little => s.to_bits().to_le_bytes(),
                Endian::Big => s.to_bits().to_be_bytes(),
            })
        }),
        Samples::U16(v) => v.iter().for_each(|s| {
            raw.extend_from_slice(&match opts.endian {
                Endian::Little => s.to_le_bytes(),
                Endian::Big => s.to_be_bytes(),
            })
        }),
    }
    let rows = opts.rows_per_strip.max(1);
    let row_bytes = width * size;
    let mut strip_offsets = Vec::new();
    let mut strip_counts = Vec::new();
    for chunk in raw.chunks((rows * row_bytes).max(1)) {
        let data = if opts.deflate {
            compress_to_vec_zlib(chunk, 6)
        } else {
            chunk.to_vec()
        };
        strip_offsets.push(w.append(&data));
        strip_counts.push(data.len() as u32);
    }
    let long_array = |w: &mut Writer, values: &[u32]| -> [u8; 4] {
        if values.len() == 1 {
            return w.long(values[0]);
        }
        let mut bytes = Vec::with_capacity(values.len() * 4);
        for v in values {
            bytes.extend_from_slice(&w.long(*v));
        }
        let at = w.append(&bytes);
        w.long(at)
    };
    let offsets_value = long_array(&mut w, &strip_offsets);
    let counts_value = long_array(&mut w, &strip_counts);
    let mut entries = vec![
        (IMAGE_WIDTH, 4, 1, w.long(width as u32)),
        (IMAGE_LENGTH, 4, 1, w.long(height as u32)),
        (BITS_PER_SAMPLE, 3, 1, w.short(bits)),
        (COMPRESSION, 3, 1, w.short(if opts.deflate { 8 } else { 1 })),
        (262, 3, 1, w.short(1)),
        (STRIP_OFFSETS, 4, strip_offsets.len() as u32, offsets_value),
        (SAMPLES_PER_PIXEL, 3, 1, w.short(1)),
        (ROWS_PER_STRIP, 4, 1, w.long(rows as u32)),
        (
            STRIP_BYTE_COUNTS,
            4,
            strip_counts.len() as u32,
            counts_value,
        ),
        (SAMPLE_FORMAT, 3, 1, w.short(format)),
    ];
    if let Some(nd) = opts.nodata {
        let mut text = format!("{nd}").into_bytes();
        text.push(0);
        let len = text.len() as u32;
        let value = if text.len() <= 4 {
            let mut b = [0; 4];
            b[..text.len()].copy_from_slice(&text);
            b
        } else {
            let at = w.append(&text);
            w.long(at)
        };
        entries.push((GDAL_NODATA, 2, len, value));
    }
    let ifd = w.write_ifd(entries);
    w.patch_u32(4, ifd);
    w.buf
}

/// Float32 TIFF of a raster; invalid pixels are written as `nodata` when
/// given.
pub fn encode_raster(raster: &ThermalRaster, opts: &TiffWriteOptions) -> Vec<u8> {
    let samples = raster
        .temps()
        .iter()
        .zip(raster.valid_mask())
        .map(|(&t, &v)| match (v, opts.nodata) {
            (false, Some(nd)) => nd as f32,
            _ => t as f32,
        })
        .collect();
    encode_tiff(
        raster.width(),
        raster.height(),
        &Samples::F32(samples),
        opts,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> TiffOptions {
        TiffOptions::default()
    }

    #[test]
    fn constant_float_tiff() {
        let bytes = encode_tiff(
            640,
            512,
            &Samples::F32(vec![25.0; 640 * 512]),
            &TiffWriteOptions::default(),
        );
        let r = decode_thermal_tiff(&bytes, &opts()).unwrap();
        assert_eq!((r.width(), r.height()), (640, 512));
        let s = firescene_core::raster::summarize(&r).unwrap();
        assert_eq!((s.min_c, s.max_c, s.mean_c), (25.0, 25.0, 25.0));
    }

    #[test]
    fn uint16_with_calibration() {
        let bytes = encode_tiff(
            1,
            1,
            &Samples::U16(vec![11829]),
            &TiffWriteOptions::default(),
        );
        let o = TiffOptions {
            calibration: Calibration {
                scale: 0.04,
                offset: -273.15,
            },
            nodata: None,
        };
        let r = decode_thermal_tiff(&bytes, &o).unwrap();
        assert!((r.temps()[0] - 200.01).abs() < 1e-9);
    }

    #[test]
    fn big_endian_deflate_round_trip() {
        let v: Vec<f32> = (0..48 * 30).map(|i| i as f32 * 0.5 - 20.0).collect();
        for endian in [Endian::Little, Endian::Big] {
            for deflate in [false, true] {
                let o = TiffWriteOptions {
                    endian,
                    deflate,
                    rows_per_strip: 7,
                    nodata: None,
                };
                let r = decode_thermal_tiff(
                    &encode_tiff(48, 30, &Samples::F32(v.clone()), &o),
                    &opts(),
                )
                .unwrap();
                let back: Vec<f32> = r.temps().iter().map(|&t| t as f32).collect();
                assert_eq!(back, v);
            }
        }
    }

    #[test]
    fn strip_layout_does_not_change_pixels() {
        let v: Vec<f32> = (0..20 * 20).map(|i| (i % 97) as f32).collect();
        let decode = |rows| {
            let o = TiffWriteOptions {
                rows_per_strip: rows,
                ..Default::default()
            };
            decode_thermal_tiff(&encode_tiff(20, 20, &Samples::F32(v.clone()), &o), &opts())
                .unwrap()
        };
        let a = decode(1);
        for rows in [3, 7, 20, 64] {
            assert_eq!(decode(rows), a);
        }
    }

    #[test]
    fn nodata_tag_marks_invalid() {
        let o = TiffWriteOptions {
            nodata: Some(-9999.0),
            ..Default::default()
        };
        let bytes = encode_tiff(2, 2, &Samples::F32(vec![10.0, -9999.0, 20.0, 30.0]), &o);
        let r = decode_thermal_tiff(&bytes, &opts()).unwrap();
        assert_eq!(r.valid_count(), 3);
        assert!(!r.valid_mask()[1]);
    }

    fn patch_short_tag(bytes: &mut [u8], tag: u16, value: u16) {
        let (r, first) = Reader::from_header(bytes).unwrap();
        let (entries, _) = r.ifd(first).unwrap();
        let e = entries.iter().find(|e| e.tag == tag).unwrap();
        let at = e.value_offset as usize;
        bytes[at..at + 2].copy_from_slice(&value.to_le_bytes());
    }

    #[test]
    fn multi_band_rejected_with_location() {
        let mut bytes = encode_tiff(
            2,
            2,
            &Samples::F32(vec![0.0; 4]),
            &TiffWriteOptions::default(),
        );
        patch_short_tag(&mut bytes, SAMPLES_PER_PIXEL, 3);
        let err = decode_thermal_tiff(&bytes, &opts()).unwrap_err();
        match err {
            TiffError::Format(f) => {
                assert_eq!(f.tag, Some(SAMPLES_PER_PIXEL));
                assert!(f.message.contains("multi-band unsupported"));
                assert!(f.offset > 8);
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unsupported_compression_rejected() {
        let mut bytes = encode_tiff(
            2,
            2,
            &Samples::F32(vec![0.0; 4]),
            &TiffWriteOptions::default(),
        );
        patch_short_tag(&mut bytes, COMPRESSION, 5);
        let msg = decode_thermal_tiff(&bytes, &opts())
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("unsupported compression 5") && msg.contains("tag 259"),
            "{msg}"
        );
    }

    #[test]
    fn strip_mismatch_rejected() {
        let mut bytes = encode_tiff(
            4,
            4,
            &Samples::F32(vec![0.0; 16]),
            &TiffWriteOptions::default(),
        );
        let (r, first) = Reader::from_header(&bytes).unwrap();
        let (entries, _) = r.ifd(first).unwrap();
        let e = entries.iter().find(|e| e.tag == IMAGE_LENGTH).unwrap();
        let at = e.value_offset as usize;
        bytes[at..at + 4].copy_from_slice(&5u32.to_le_bytes());
        let msg = decode_thermal_tiff(&bytes, &opts())
            .unwrap_err()
            .to_string();
        assert!(msg.contains("dimension/strip mismatch"), "{msg}");
    }

    #[test]
    fn malformed_headers() {
        assert!(decode_thermal_tiff(b"XX*\0\0\0\0\0", &opts())
            .unwrap_err()
            .to_string()
            .contains("malformed header"));
        assert!(decode_thermal_tiff(b"II+\0", &opts())
            .unwrap_err()
            .to_string()
            .contains("BigTIFF"));
        assert!(decode_thermal_tiff(b"II*\0\xff\0\0\0", &opts())
            .unwrap_err()
            .to_string()
            .contains("truncated"));
    }
}
