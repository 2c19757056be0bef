//! GPS position and altitude from the Exif APP1 segment of a JPEG.

use firescene_core::geodesy::dms_to_degrees;
use firescene_core::FrameMeta;
use thiserror::Error;

use crate::ifd::{Endian, FormatError, Reader, Writer};

const GPS_IFD_POINTER: u16 = 0x8825;
const GPS_LATITUDE_REF: u16 = 1;
const GPS_LATITUDE: u16 = 2;
const GPS_LONGITUDE_REF: u16 = 3;
const GPS_LONGITUDE: u16 = 4;
const GPS_ALTITUDE_REF: u16 = 5;
const GPS_ALTITUDE: u16 = 6;

#[derive(Debug, Error)]
pub enum ExifError {
    #[error("not a JPEG: missing SOI marker")]
    NotJpeg,
    #[error("no Exif APP1 segment")]
    MissingApp1,
    #[error("no GPS metadata")]
    NoGps,
    #[error("GPS tag {0} missing")]
    MissingTag(u16),
    #[error("zero-denominator rational in GPS tag {0}")]
    ZeroDenominator(u16),
    #[error("malformed JPEG segment at byte {0}")]
    BadSegment(usize),
    #[error("Exif TIFF structure at JPEG byte {base}: {source}")]
    Format {
        base: usize,
        #[source]
        source: FormatError,
    },
}

/// Decimal position and ellipsoidal altitude read from Exif.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpsFix {
    pub lat: f64,
    pub lon: f64,
    pub alt_m: f64,
}

impl GpsFix {
    /// Frame metadata with the default camera geometry.
    pub fn to_meta(self) -> FrameMeta {
        FrameMeta::new(self.lat, self.lon, self.alt_m)
    }
}

/// Byte range of the TIFF structure inside the Exif APP1 segment.
fn find_exif(jpeg: &[u8]) -> Result<(usize, usize), ExifError> {
    if jpeg.get(..2) != Some(&[0xFF, 0xD8]) {
        return Err(ExifError::NotJpeg);
    }
    let mut at = 2;
    while at + 4 <= jpeg.len() {
        if jpeg[at] != 0xFF {
            return Err(ExifError::BadSegment(at));
        }
        let marker = jpeg[at + 1];
        if marker == 0xD9 || marker == 0xDA {
            break;
        }
        let len = u16::from_be_bytes([jpeg[at + 2], jpeg[at + 3]]) as usize;
        if len < 2 || at + 2 + len > jpeg.len() {
            return Err(ExifError::BadSegment(at));
        }
        let body = &jpeg[at + 4..at + 2 + len];
        if marker == 0xE1 && body.starts_with(b"Exif\0\0") {
            return Ok((at + 10, at + 2 + len));
        }
        at += 2 + len;
    }
    Err(ExifError::MissingApp1)
}

pub fn parse_exif_gps(jpeg: &[u8]) -> Result<GpsFix, ExifError> {
    let (start, end) = find_exif(jpeg)?;
    let fmt = |source| ExifError::Format {
        base: start,
        source,
    };
    let (r, ifd0) = Reader::from_header(&jpeg[start..end]).map_err(fmt)?;
    let (entries, _) = r.ifd(ifd0).map_err(fmt)?;
    let gps_offset = entries
        .iter()
        .find(|e| e.tag == GPS_IFD_POINTER)
        .ok_or(ExifError::NoGps)?
        .single(&r)
        .map_err(fmt)?;
    let (gps, _) = r.ifd(gps_offset).map_err(fmt)?;
    let entry = |tag: u16| {
        gps.iter()
            .find(|e| e.tag == tag)
            .ok_or(ExifError::MissingTag(tag))
    };
    if !gps.iter().any(|e| e.tag == GPS_LATITUDE) {
        return Err(ExifError::NoGps);
    }
    let rational = |tag: u16, (n, d): (u32, u32)| {
        if d == 0 {
            Err(ExifError::ZeroDenominator(tag))
        } else {
            Ok(n as f64 / d as f64)
        }
    };
    let angle = |tag: u16, ref_tag: u16| -> Result<f64, ExifError> {
        let parts = entry(tag)?.rationals(&r).map_err(fmt)?;
        if parts.len() != 3 {
            return Err(fmt(FormatError::new(
                entry(tag)?.entry_offset,
                Some(tag),
                format!("expected 3 rationals, found {}", parts.len()),
            )));
        }
        let d = rational(tag, parts[0])?;
        let m = rational(tag, parts[1])?;
        let s = rational(tag, parts[2])?;
        let reference = entry(ref_tag)?.ascii(&r).map_err(fmt)?;
        Ok(dms_to_degrees(
            d,
            m,
            s,
            reference.chars().next().unwrap_or('N'),
        ))
    };
    let lat = angle(GPS_LATITUDE, GPS_LATITUDE_REF)?;
    let lon = angle(GPS_LONGITUDE, GPS_LONGITUDE_REF)?;
    let alt_entry = entry(GPS_ALTITUDE)?;
    let alt = match alt_entry.rationals(&r).map_err(fmt)?.as_slice() {
        [v] => rational(GPS_ALTITUDE, *v)?,
        _ => {
            return Err(fmt(FormatError::new(
                alt_entry.entry_offset,
                Some(GPS_ALTITUDE),
                "expected 1 rational",
            )));
        }
    };
    let below = match gps.iter().find(|e| e.tag == GPS_ALTITUDE_REF) {
        Some(e) => e.single(&r).map_err(fmt)? == 1,
        None => false,
    };
    Ok(GpsFix {
        lat,
        lon,
        alt_m: if below { -alt } else { alt },
    })
}

fn dms(v: f64) -> [(u32, u32); 3] {
    let v = v.abs();
    let d = v.floor();
    let m = ((v - d) * 60.0).floor();
    let s = (v - d - m / 60.0) * 3600.0;
    [
        (d as u32, 1),
        (m as u32, 1),
        ((s * 10_000.0).round() as u32, 10_000),
    ]
}

/// Minimal JPEG (SOI, Exif APP1 with a GPS IFD, EOI) for fixtures.
pub fn encode_gps_jpeg(fix: &GpsFix, endian: Endian) -> Vec<u8> {
    let mut w = Writer::new(endian);
    let rationals = |w: &Writer, values: &[(u32, u32)]| -> Vec<u8> {
        values
            .iter()
            .flat_map(|&(n, d)| [w.long(n), w.long(d)])
            .flatten()
            .collect()
    };
    let lat = rationals(&w, &dms(fix.lat));
    let lat_at = w.append(&lat);
    let lon = rationals(&w, &dms(fix.lon));
    let lon_at = w.append(&lon);
    let alt = rationals(&w, &[((fix.alt_m.abs() * 1000.0).round() as u32, 1000)]);
    let alt_at = w.append(&alt);
    let ascii = |c: u8| [c, 0, 0, 0];
    let gps = vec![
        (0, 1, 4, [2, 3, 0, 0]),
        (
            GPS_LATITUDE_REF,
            2,
            2,
            ascii(if fix.lat < 0.0 { b'S' } else { b'N' }),
        ),
        (GPS_LATITUDE, 5, 3, w.long(lat_at)),
        (
            GPS_LONGITUDE_REF,
            2,
            2,
            ascii(if fix.lon < 0.0 { b'W' } else { b'E' }),
        ),
        (GPS_LONGITUDE, 5, 3, w.long(lon_at)),
        (GPS_ALTITUDE_REF, 1, 1, [u8::from(fix.alt_m < 0.0), 0, 0, 0]),
        (GPS_ALTITUDE, 5, 1, w.long(alt_at)),
    ];
    let gps_at = w.write_ifd(gps);
    let ifd0 = w.write_ifd(vec![(GPS_IFD_POINTER, 4, 1, w.long(gps_at))]);
    w.patch_u32(4, ifd0);

    let mut out = vec![0xFF, 0xD8, 0xFF, 0xE1];
    out.extend_from_slice(&((w.buf.len() + 8) as u16).to_be_bytes());
    out.extend_from_slice(b"Exif\0\0");
    out.extend_from_slice(&w.buf);
    out.extend_from_slice(&[0xFF, 0xD9]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_both_byte_orders() {
        let fix = GpsFix {
            lat: 34.21,
            lon: -118.5,
            alt_m: 200.0,
        };
        for endian in [Endian::Little, Endian::Big] {
            let got = parse_exif_gps(&encode_gps_jpeg(&fix, endian)).unwrap();
            assert!((got.lat - 34.21).abs() < 1e-6, "{got:?}");
            assert!((got.lon + 118.5).abs() < 1e-6);
            assert_eq!(got.alt_m, 200.0);
        }
    }

    #[test]
    fn dms_example() {
        assert!((dms_to_degrees(34.0, 12.0, 36.0, 'N') - 34.21).abs() < 1e-12);
    }

    #[test]
    fn altitude_below_reference_is_negative() {
        let fix = GpsFix {
            lat: 1.0,
            lon: 1.0,
            alt_m: -50.0,
        };
        assert_eq!(
            parse_exif_gps(&encode_gps_jpeg(&fix, Endian::Little))
                .unwrap()
                .alt_m,
            -50.0
        );
    }

    #[test]
    fn missing_gps_and_app1() {
        let mut w = Writer::new(Endian::Little);
        let ifd0 = w.write_ifd(vec![(0x010F, 2, 4, *b"DJI\0")]);
        w.patch_u32(4, ifd0);
        let mut jpeg = vec![0xFF, 0xD8, 0xFF, 0xE1];
        jpeg.extend_from_slice(&((w.buf.len() + 8) as u16).to_be_bytes());
        jpeg.extend_from_slice(b"Exif\0\0");
        jpeg.extend_from_slice(&w.buf);
        jpeg.extend_from_slice(&[0xFF, 0xD9]);
        assert_eq!(
            parse_exif_gps(&jpeg).unwrap_err().to_string(),
            "no GPS metadata"
        );
        assert!(matches!(
            parse_exif_gps(&[0xFF, 0xD8, 0xFF, 0xD9]),
            Err(ExifError::MissingApp1)
        ));
        assert!(matches!(parse_exif_gps(b"GIF89a"), Err(ExifError::NotJpeg)));
    }

    #[test]
    fn zero_denominator_rejected() {
        let fix = GpsFix {
            lat: 10.0,
            lon: 10.0,
            alt_m: 5.0,
        };
        let mut jpeg = encode_gps_jpeg(&fix, Endian::Little);
        // The altitude rational is the last out-of-line value before the
        // IFDs; find it by its known numerator 5000 / 1000.
        let needle: Vec<u8> = [5000u32, 1000]
            .iter()
            .flat_map(|v| v.to_le_bytes())
            .collect();
        let at = jpeg
            .windows(8)
            .position(|w| w == needle.as_slice())
            .unwrap();
        jpeg[at + 4..at + 8].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(
            parse_exif_gps(&jpeg),
            Err(ExifError::ZeroDenominator(GPS_ALTITUDE))
        ));
    }
}
