//! TIFF-structured byte streams: header, IFD entries, typed values. Shared by
//! the raster loader and the Exif parser.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatError {
    /// Byte offset from the start of the TIFF structure.
    pub offset: u64,
    pub tag: Option<u16>,
    pub message: String,
}

impl FormatError {
    pub fn new(offset: u64, tag: Option<u16>, message: impl Into<String>) -> Self {
        Self {
            offset,
            tag,
            message: message.into(),
        }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tag {
            Some(t) => write!(f, "{} (tag {t} at byte {})", self.message, self.offset),
            None => write!(f, "{} (at byte {})", self.message, self.offset),
        }
    }
}

impl std::error::Error for FormatError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endian {
    Little,
    Big,
}

#[derive(Debug, Clone, Copy)]
pub struct Reader<'a> {
    pub data: &'a [u8],
    pub endian: Endian,
}

impl<'a> Reader<'a> {
    /// Parses the 8-byte classic TIFF header; returns the reader and the
    /// offset of the first IFD.
    pub fn from_header(data: &'a [u8]) -> Result<(Self, u64), FormatError> {
        let endian = match data.get(..2) {
            Some(b"II") => Endian::Little,
            Some(b"MM") => Endian::Big,
            _ => {
                return Err(FormatError::new(
                    0,
                    None,
                    "malformed header: missing II/MM byte order",
                ))
            }
        };
        let r = Self { data, endian };
        match r.u16(2)? {
            42 => {}
            43 => return Err(FormatError::new(2, None, "BigTIFF unsupported")),
            m => {
                return Err(FormatError::new(
                    2,
                    None,
                    format!("malformed header: magic {m}"),
                ))
            }
        }
        let first = r.u32(4)? as u64;
        Ok((r, first))
    }

    pub fn bytes(&self, offset: u64, len: u64) -> Result<&'a [u8], FormatError> {
        let end = offset
            .checked_add(len)
            .filter(|&e| e <= self.data.len() as u64);
        match end {
            Some(end) => Ok(&self.data[offset as usize..end as usize]),
            None => Err(FormatError::new(
                offset,
                None,
                format!("truncated: need {len} bytes, file has {}", self.data.len()),
            )),
        }
    }

    pub fn u16(&self, offset: u64) -> Result<u16, FormatError> {
        let b: [u8; 2] = self.bytes(offset, 2)?.try_into().expect("2 bytes");
        Ok(match self.endian {
            Endian::Little => u16::from_le_bytes(b),
            Endian::Big => u16::from_be_bytes(b),
        })
    }

    pub fn u32(&self, offset: u64) -> Result<u32, FormatError> {
        let b: [u8; 4] = self.bytes(offset, 4)?.try_into().expect("4 bytes");
        Ok(match self.endian {
            Endian::Little => u32::from_le_bytes(b),
            Endian::Big => u32::from_be_bytes(b),
        })
    }

    pub fn u64(&self, offset: u64) -> Result<u64, FormatError> {
        let b: [u8; 8] = self.bytes(offset, 8)?.try_into().expect("8 bytes");
        Ok(match self.endian {
            Endian::Little => u64::from_le_bytes(b),
            Endian::Big => u64::from_be_bytes(b),
        })
    }

    /// Entries of the IFD at `offset` and the offset of the next IFD.
    pub fn ifd(&self, offset: u64) -> Result<(Vec<Entry>, u64), FormatError> {
        let n = self.u16(offset)? as u64;
        let mut entries = Vec::with_capacity(n as usize);
        for i in 0..n {
            let at = offset + 2 + 12 * i;
            let tag = self.u16(at)?;
            let field_type = self.u16(at + 2)?;
            let count = self.u32(at + 4)? as u64;
            let size = type_size(field_type).ok_or_else(|| {
                FormatError::new(
                    at + 2,
                    Some(tag),
                    format!("unknown field type {field_type}"),
                )
            })?;
            let total = size
                .checked_mul(count)
                .ok_or_else(|| FormatError::new(at + 4, Some(tag), "field size overflow"))?;
            let value_offset = if total <= 4 {
                at + 8
            } else {
                self.u32(at + 8)? as u64
            };
            entries.push(Entry {
                tag,
                field_type,
                count,
                entry_offset: at,
                value_offset,
            });
        }
        let next = self.u32(offset + 2 + 12 * n)? as u64;
        Ok((entries, next))
    }
}

fn type_size(t: u16) -> Option<u64> {
    Some(match t {
        1 | 2 | 6 | 7 => 1,
        3 | 8 => 2,
        4 | 9 | 11 => 4,
        5 | 10 | 12 => 8,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Entry {
    pub tag: u16,
    pub field_type: u16,
    pub count: u64,
    pub entry_offset: u64,
    pub value_offset: u64,
}

impl Entry {
    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::new(self.entry_offset, Some(self.tag), message)
    }

    /// Unsigned integer values (BYTE, SHORT, LONG).
    pub fn unsigned(&self, r: &Reader<'_>) -> Result<Vec<u64>, FormatError> {
        (0..self.count)
            .map(|i| match self.field_type {
                1 | 7 => Ok(r.bytes(self.value_offset + i, 1)?[0] as u64),
                3 => Ok(r.u16(self.value_offset + 2 * i)? as u64),
                4 => Ok(r.u32(self.value_offset + 4 * i)? as u64),
                t => Err(self.err(format!(
                    "expected an unsigned integer field, found type {t}"
                ))),
            })
            .collect()
    }

    pub fn single(&self, r: &Reader<'_>) -> Result<u64, FormatError> {
        match self.unsigned(r)?.as_slice() {
            [v] => Ok(*v),
            v => Err(self.err(format!("expected one value, found {}", v.len()))),
        }
    }

    pub fn ascii(&self, r: &Reader<'_>) -> Result<String, FormatError> {
        if self.field_type != 2 {
            return Err(self.err("expected an ASCII field"));
        }
        let b = r.bytes(self.value_offset, self.count)?;
        let end = b.iter().position(|&c| c == 0).unwrap_or(b.len());
        Ok(String::from_utf8_lossy(&b[..end]).into_owned())
    }

    /// Unsigned rationals as `(numerator, denominator)`.
    pub fn rationals(&self, r: &Reader<'_>) -> Result<Vec<(u32, u32)>, FormatError> {
        if self.field_type != 5 {
            return Err(self.err("expected a RATIONAL field"));
        }
        (0..self.count)
            .map(|i| {
                let at = self.value_offset + 8 * i;
                Ok((r.u32(at)?, r.u32(at + 4)?))
            })
            .collect()
    }

    pub fn floats(&self, r: &Reader<'_>) -> Result<Vec<f64>, FormatError> {
        (0..self.count)
            .map(|i| match self.field_type {
                11 => Ok(f32::from_bits(r.u32(self.value_offset + 4 * i)?) as f64),
                12 => Ok(f64::from_bits(r.u64(self.value_offset + 8 * i)?)),
                _ => Ok(self.unsigned(r)?[i as usize] as f64),
            })
            .collect()
    }
}

/// Incremental builder of a single-IFD classic TIFF structure.
pub struct Writer {
    pub endian: Endian,
    pub buf: Vec<u8>,
}

impl Writer {
    pub fn new(endian: Endian) -> Self {
        let mut w = Self {
            endian,
            buf: Vec::new(),
        };
        w.buf.extend_from_slice(match endian {
            Endian::Little => b"II",
            Endian::Big => b"MM",
        });
        w.put_u16(42);
        w.put_u32(0);
        w
    }

    pub fn put_u16(&mut self, v: u16) {
        let b = match self.endian {
            Endian::Little => v.to_le_bytes(),
            Endian::Big => v.to_be_bytes(),
        };
        self.buf.extend_from_slice(&b);
    }

    pub fn put_u32(&mut self, v: u32) {
        let b = match self.endian {
            Endian::Little => v.to_le_bytes(),
            Endian::Big => v.to_be_bytes(),
        };
        self.buf.extend_from_slice(&b);
    }

    pub fn patch_u32(&mut self, at: usize, v: u32) {
        let b = match self.endian {
            Endian::Little => v.to_le_bytes(),
            Endian::Big => v.to_be_bytes(),
        };
        self.buf[at..at + 4].copy_from_slice(&b);
    }

    /// Appends raw bytes at an even offset and returns that offset.
    pub fn append(&mut self, bytes: &[u8]) -> u32 {
        if self.buf.len() % 2 == 1 {
            self.buf.push(0);
        }
        let at = self.buf.len() as u32;
        self.buf.extend_from_slice(bytes);
        at
    }

    /// Writes an IFD whose out-of-line values must already be appended.
    /// `entries` are `(tag, type, count, value-or-offset bytes)`; they are
    /// sorted by tag. Returns the IFD offset.
    pub fn write_ifd(&mut self, mut entries: Vec<(u16, u16, u32, [u8; 4])>) -> u32 {
        entries.sort_by_key(|e| e.0);
        if self.buf.len() % 2 == 1 {
            self.buf.push(0);
        }
        let at = self.buf.len() as u32;
        self.put_u16(entries.len() as u16);
        for (tag, t, count, value) in entries {
            self.put_u16(tag);
            self.put_u16(t);
            self.put_u32(count);
            self.buf.extend_from_slice(&value);
        }
        self.put_u32(0);
        at
    }

    /// Inline SHORT value bytes.
    pub fn short(&self, v: u16) -> [u8; 4] {
        let mut out = [0; 4];
        out[..2].copy_from_slice(&match self.endian {
            Endian::Little => v.to_le_bytes(),
            Endian::Big => v.to_be_bytes(),
        });
        out
    }

    /// Inline LONG value bytes.
    pub fn long(&self, v: u32) -> [u8; 4] {
        match self.endian {
            Endian::Little => v.to_le_bytes(),
            Endian::Big => v.to_be_bytes(),
        }
    }
}
