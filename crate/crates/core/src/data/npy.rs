//! Minimal reader for the NumPy `.npy` container.
//!
//! Handles format versions 1.0 through 3.0, C-order arrays of the basic
//! integer and float dtypes in either byte order. Everything is widened to
//! `f64`. Fortran-order arrays are rejected.

use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"\x93NUMPY";

fn npy_err(message: impl Into<String>) -> Error {
    Error::Npy(message.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Float,
    Int,
    Uint,
}

/// Element type from the `descr` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dtype {
    kind: Kind,
    size: usize,
    big_endian: bool,
}

impl Dtype {
    fn parse(descr: &str) -> Result<Self> {
        let bytes = descr.as_bytes();
        if bytes.len() < 3 {
            return Err(npy_err(format!("unsupported dtype {descr:?}")));
        }
        let big_endian = match bytes[0] {
            b'<' | b'|' | b'=' => false,
            b'>' => true,
            _ => return Err(npy_err(format!("unsupported byte order in dtype {descr:?}"))),
        };
        let kind = match bytes[1] {
            b'f' => Kind::Float,
            b'i' => Kind::Int,
            b'u' => Kind::Uint,
            _ => return Err(npy_err(format!("unsupported dtype {descr:?}"))),
        };
        let size: usize = descr[2..].parse().map_err(|_| npy_err(format!("unsupported dtype {descr:?}")))?;
        let ok = match kind {
            Kind::Float => matches!(size, 4 | 8),
            Kind::Int | Kind::Uint => matches!(size, 1 | 2 | 4 | 8),
        };
        if !ok {
            return Err(npy_err(format!("unsupported dtype {descr:?}")));
        }
        Ok(Dtype { kind, size, big_endian })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn decode(&self, raw: &[u8]) -> f64 {
        let mut buf = [0u8; 8];
        buf[..self.size].copy_from_slice(raw);
        if self.big_endian {
            buf[..self.size].reverse();
        }
        match (self.kind, self.size) {
            (Kind::Float, 4) => f32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            (Kind::Float, _) => f64::from_le_bytes(buf),
            (Kind::Int, 1) => buf[0] as i8 as f64,
            (Kind::Int, 2) => i16::from_le_bytes([buf[0], buf[1]]) as f64,
            (Kind::Int, 4) => i32::from_le_bytes([buf[0], buf[1], buf[2], buf[3]]) as f64,
            (Kind::Int, _) => i64::from_le_bytes(buf) as f64,
            (Kind::Uint, _) => u64::from_le_bytes(buf) as f64,
        }
    }
}

/// Parsed header dictionary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpyHeader {
    pub dtype: Dtype,
    pub fortran_order: bool,
    pub shape: Vec<usize>,
    /// Byte offset of the payload.
    pub data_offset: usize,
}

impl NpyHeader {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 10 || &bytes[..6] != MAGIC {
            return Err(npy_err("missing NUMPY magic"));
        }
        let major = bytes[6];
        let (len, start) = match major {
            1 => (u16::from_le_bytes([bytes[8], bytes[9]]) as usize, 10usize),
            2 | 3 => {
                if bytes.len() < 12 {
                    return Err(npy_err("truncated header length"));
                }
                (u32::from_le_bytes([bytes[8], bytes[9], bytes[10], bytes[11]]) as usize, 12)
            }
            v => return Err(npy_err(format!("unsupported format version {v}"))),
        };
        let end = start.checked_add(len).filter(|&e| e <= bytes.len()).ok_or_else(|| npy_err("truncated header"))?;
        let text = std::str::from_utf8(&bytes[start..end]).map_err(|_| npy_err("header is not UTF-8"))?;
        let dict = DictParser::new(text).parse_dict()?;

        let mut descr = None;
        let mut fortran = None;
        let mut shape = None;
        for (key, value) in dict {
            match (key.as_str(), value) {
                ("descr", Literal::Str(s)) => descr = Some(s),
                ("fortran_order", Literal::Bool(b)) => fortran = Some(b),
                ("shape", Literal::Tuple(dims)) => shape = Some(dims),
                (k @ ("descr" | "fortran_order" | "shape"), _) => {
                    return Err(npy_err(format!("header key {k:?} has the wrong type")))
                }
                _ => {}
            }
        }
        Ok(NpyHeader {
            dtype: Dtype::parse(&descr.ok_or_else(|| npy_err("header lacks 'descr'"))?)?,
            fortran_order: fortran.ok_or_else(|| npy_err("header lacks 'fortran_order'"))?,
            shape: shape.ok_or_else(|| npy_err("header lacks 'shape'"))?,
            data_offset: end,
        })
    }

    pub fn element_count(&self) -> Result<usize> {
        self.shape.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| npy_err("shape overflows"))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Literal {
    Str(String),
    Bool(bool),
    Int(usize),
    Tuple(Vec<usize>),
}

/// Just enough of a Python literal parser for npy header dicts.
struct DictParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> DictParser<'a> {
    fn new(text: &'a str) -> Self {
        DictParser { src: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(npy_err(format!("header: expected {:?} at byte {}", c as char, self.pos)))
        }
    }

    fn parse_dict(&mut self) -> Result<Vec<(String, Literal)>> {
        self.expect(b'{')?;
        let mut entries = Vec::new();
        loop {
            if self.peek() == Some(b'}') {
                self.pos += 1;
                break;
            }
            let key = match self.parse_value()? {
                Literal::Str(s) => s,
                _ => return Err(npy_err("header: dict keys must be strings")),
            };
            self.expect(b':')?;
            let value = self.parse_value()?;
            entries.push((key, value));
            match self.peek() {
                Some(b',') => self.pos += 1,
                Some(b'}') => {}
                _ => return Err(npy_err(format!("header: expected ',' or '}}' at byte {}", self.pos))),
            }
        }
        Ok(entries)
    }

    fn parse_value(&mut self) -> Result<Literal> {
        match self.peek() {
            Some(q @ (b'\'' | b'"')) => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos] != q {
                    self.pos += 1;
                }
                if self.pos >= self.src.len() {
                    return Err(npy_err("header: unterminated string"));
                }
                let s = String::from_utf8_lossy(&self.src[start..self.pos]).into_owned();
                self.pos += 1;
                Ok(Literal::Str(s))
            }
            Some(b'(') => {
                self.pos += 1;
                let mut dims = Vec::new();
                loop {
                    if self.peek() == Some(b')') {
                        self.pos += 1;
                        break;
                    }
                    match self.parse_value()? {
                        Literal::Int(d) => dims.push(d),
                        _ => return Err(npy_err("header: shape entries must be integers")),
                    }
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {}
                        _ => return Err(npy_err("header: malformed shape tuple")),
                    }
                }
                Ok(Literal::Tuple(dims))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                // Python 2 era headers may carry an `L` suffix.
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                if self.src.get(self.pos) == Some(&b'L') {
                    self.pos += 1;
                }
                digits.parse().map(Literal::Int).map_err(|_| npy_err("header: integer out of range"))
            }
            Some(_) if self.src[self.pos..].starts_with(b"True") => {
                self.pos += 4;
                Ok(Literal::Bool(true))
            }
            Some(_) if self.src[self.pos..].starts_with(b"False") => {
                self.pos += 5;
                Ok(Literal::Bool(false))
            }
            _ => Err(npy_err(format!("header: unexpected token at byte {}", self.pos))),
        }
    }
}

/// A C-order array widened to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct NpyArray {
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

impl NpyArray {
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = NpyHeader::parse(bytes)?;
        if header.fortran_order {
            return Err(npy_err("Fortran-order arrays are not supported"));
        }
        let count = header.element_count()?;
        let needed = count.checked_mul(header.dtype.size()).ok_or_else(|| npy_err("shape overflows"))?;
        let payload = &bytes[header.data_offset..];
        if payload.len() < needed {
            return Err(npy_err(format!("payload has {} bytes, shape needs {needed}", payload.len())));
        }
        let data = payload[..needed].chunks_exact(header.dtype.size()).map(|raw| header.dtype.decode(raw)).collect();
        Ok(NpyArray { shape: header.shape, data })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::MissingFile(path.to_path_buf()),
            _ => Error::io(path, e),
        })?;
        Self::from_bytes(&bytes)
    }

    /// Serializes as a version 1.0, little-endian `f8` array.
    pub fn to_bytes(&self) -> Vec<u8> {
        let shape = match self.shape.len() {
            1 => format!("({},)", self.shape[0]),
            _ => format!("({})", self.shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(", ")),
        };
        let mut header = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': {shape}, }}");
        let unpadded = MAGIC.len() + 4 + header.len() + 1;
        header.push_str(&" ".repeat((64 - unpadded % 64) % 64));
        header.push('\n');
        let mut out = Vec::with_capacity(MAGIC.len() + 4 + header.len() + self.data.len() * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&[1, 0]);
        out.extend_from_slice(&(header.len() as u16).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    /// Value at a multi-dimensional index.
    pub fn get(&self, index: &[usize]) -> Option<f64> {
        if index.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0usize;
        for (&i, &d) in index.iter().zip(&self.shape) {
            if i >= d {
                return None;
            }
            flat = flat * d + i;
        }
        self.data.get(flat).copied()
    }
}
