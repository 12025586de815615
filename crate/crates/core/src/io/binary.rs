//! `HSC1` cube and `IMG1` image containers: a 4-byte magic, little-endian
//! `u32` dimensions, then little-endian `f32` payload.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, Array3};

use crate::cube::{HyperspectralCube, Measurement};
use crate::error::{Error, FormatError, Result};
use crate::psf::Psf;

pub const CUBE_MAGIC: [u8; 4] = *b"HSC1";
pub const IMAGE_MAGIC: [u8; 4] = *b"IMG1";

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> std::result::Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(
            FormatError::Truncated { needed: self.pos.saturating_add(n), available: self.bytes.len() },
        )?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn magic(&mut self, expected: [u8; 4]) -> std::result::Result<(), FormatError> {
        let found: [u8; 4] = self.take(4)?.try_into().expect("4 bytes");
        if found != expected {
            return Err(FormatError::BadMagic { expected, found });
        }
        Ok(())
    }

    fn u32(&mut self) -> std::result::Result<usize, FormatError> {
        let b: [u8; 4] = self.take(4)?.try_into().expect("4 bytes");
        Ok(u32::from_le_bytes(b) as usize)
    }

    /// `n` floats; `first_index` offsets the index reported for a non-finite value.
    fn f32s(&mut self, n: usize, first_index: usize) -> std::result::Result<Vec<f64>, FormatError> {
        let len = n
            .checked_mul(4)
            .ok_or_else(|| FormatError::InvalidHeader("payload size overflows".into()))?;
        let raw = self.take(len)?;
        raw.chunks_exact(4)
            .enumerate()
            .map(|(i, c)| {
                let v = f32::from_le_bytes(c.try_into().expect("4 bytes"));
                if v.is_finite() {
                    Ok(v as f64)
                } else {
                    Err(FormatError::NonFinite(first_index + i))
                }
            })
            .collect()
    }

    fn finish(&self) -> std::result::Result<(), FormatError> {
        match self.bytes.len() - self.pos {
            0 => Ok(()),
            extra => Err(FormatError::TrailingBytes(extra)),
        }
    }
}

fn dims_product(dims: &[usize]) -> std::result::Result<usize, FormatError> {
    if dims.contains(&0) {
        return Err(FormatError::InvalidHeader(format!("zero dimension in {dims:?}")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| FormatError::InvalidHeader(format!("dimensions {dims:?} overflow")))
}

fn push_f32(out: &mut Vec<u8>, v: f64, what: &str) -> Result<()> {
    let f = v as f32;
    if !f.is_finite() {
        return Err(Error::NonFinite(format!("{what}: {v} is not representable as f32")));
    }
    out.extend_from_slice(&f.to_le_bytes());
    Ok(())
}

fn push_dim(out: &mut Vec<u8>, d: usize) -> Result<()> {
    let d = u32::try_from(d).map_err(|_| Error::shape(format!("dimension {d} exceeds u32")))?;
    out.extend_from_slice(&d.to_le_bytes());
    Ok(())
}

pub fn encode_cube(cube: &HyperspectralCube) -> Result<Vec<u8>> {
    let (k, ny, nx) = cube.data().dim();
    let mut out = Vec::with_capacity(16 + 4 * (k + k * ny * nx));
    out.extend_from_slice(&CUBE_MAGIC);
    for d in [k, ny, nx] {
        push_dim(&mut out, d)?;
    }
    for &w in cube.wavelengths_nm() {
        push_f32(&mut out, w, "wavelength")?;
    }
    for &v in cube.data().iter() {
        push_f32(&mut out, v, "cube value")?;
    }
    Ok(out)
}

pub fn decode_cube(bytes: &[u8]) -> Result<HyperspectralCube> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(CUBE_MAGIC)?;
    let (k, ny, nx) = (r.u32()?, r.u32()?, r.u32()?);
    let n = dims_product(&[k, ny, nx])?;
    let wavelengths = r.f32s(k, 0)?;
    let data = r.f32s(n, k)?;
    r.finish()?;
    let data = Array3::from_shape_vec((k, ny, nx), data).expect("length checked");
    HyperspectralCube::new(wavelengths, data).map_err(|e| match e {
        Error::Format(f) => Error::Format(f),
        other => FormatError::InvalidHeader(other.to_string()).into(),
    })
}

pub fn encode_image(data: &Array2<f64>) -> Result<Vec<u8>> {
    let (ny, nx) = data.dim();
    let mut out = Vec::with_capacity(12 + 4 * ny * nx);
    out.extend_from_slice(&IMAGE_MAGIC);
    push_dim(&mut out, ny)?;
    push_dim(&mut out, nx)?;
    for &v in data.iter() {
        push_f32(&mut out, v, "image value")?;
    }
    Ok(out)
}

pub fn decode_image(bytes: &[u8]) -> Result<Array2<f64>> {
    let mut r = Reader { bytes, pos: 0 };
    r.magic(IMAGE_MAGIC)?;
    let (ny, nx) = (r.u32()?, r.u32()?);
    let n = dims_product(&[ny, nx])?;
    let data = r.f32s(n, 0)?;
    r.finish()?;
    Ok(Array2::from_shape_vec((ny, nx), data).expect("length checked"))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(bytes)?;
    w.flush()?;
    Ok(())
}

pub fn write_cube(path: impl AsRef<Path>, cube: &HyperspectralCube) -> Result<()> {
    write_bytes(path.as_ref(), &encode_cube(cube)?)
}

pub fn read_cube(path: impl AsRef<Path>) -> Result<HyperspectralCube> {
    decode_cube(&std::fs::read(path)?)
}

pub fn write_image(path: impl AsRef<Path>, data: &Array2<f64>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_image(data)?)
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Array2<f64>> {
    decode_image(&std::fs::read(path)?)
}

pub fn read_measurement(path: impl AsRef<Path>) -> Result<Measurement> {
    Measurement::new(read_image(path)?)
}

/// Loads a PSF image; it is renormalized to unit sum.
pub fn read_psf(path: impl AsRef<Path>) -> Result<Psf> {
    Psf::new(read_image(path)?)
}

/// Min-max normalized 8-bit grayscale pixels. A constant image maps to 0.
pub fn preview_pixels(data: &Array2<f64>) -> Vec<u8> {
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    data.iter()
        .map(|&v| {
            if range > 0.0 {
                ((v - lo) / range * 255.0).round().clamp(0.0, 255.0) as u8
            } else {
                0
            }
        })
        .collect()
}

pub fn write_png_preview(path: impl AsRef<Path>, data: &Array2<f64>) -> Result<()> {
    let (ny, nx) = data.dim();
    let (h, w) = match (u32::try_from(ny), u32::try_from(nx)) {
        (Ok(h), Ok(w)) if h > 0 && w > 0 => (h, w),
        _ => return Err(Error::shape(format!("cannot preview a {ny}x{nx} image"))),
    };
    let file = BufWriter::new(File::create(path)?);
    let mut enc = png::Encoder::new(file, w, h);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(png_err)?;
    writer.write_image_data(&preview_pixels(data)).map_err(png_err)?;
    writer.finish().map_err(png_err)?;
    Ok(())
}

fn png_err(e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(other.to_string())),
    }
}
