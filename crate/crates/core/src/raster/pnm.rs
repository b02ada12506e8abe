//! Netpbm binary graymap (P5) and pixmap (P6) I/O plus single-channel
//! PNG decode. 16-bit samples are big-endian, as netpbm requires.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::GrayImage;
use crate::scalar::Real;

/// Decode an image file, sniffing the container from its magic bytes.
///
/// Accepted containers: binary P5 graymap (8- or 16-bit) and
/// single-channel PNG (grayscale, 8- or 16-bit).
pub fn load_image<S: Real>(path: &Path) -> Result<GrayImage<S>> {
    let mut file = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    if bytes.starts_with(b"P5") {
        decode_pgm(&bytes)
    } else if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        decode_png(&bytes)
    } else if bytes.starts_with(b"P2") || bytes.starts_with(b"P3") || bytes.starts_with(b"P6") {
        Err(Error::Unsupported(
            "only binary P5 graymaps and grayscale PNG are readable".into(),
        ))
    } else {
        Err(Error::Unsupported(
            "unrecognized image container (expected P5 or PNG)".into(),
        ))
    }
}

/// Decode a binary P5 graymap from memory.
pub fn decode_pgm<S: Real>(bytes: &[u8]) -> Result<GrayImage<S>> {
    let mut cur = 0usize;
    expect_magic(bytes, &mut cur, b"P5")?;
    let width = read_header_int(bytes, &mut cur)?;
    let height = read_header_int(bytes, &mut cur)?;
    let maxval = read_header_int(bytes, &mut cur)?;
    if width == 0 || height == 0 {
        return Err(Error::Format("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("invalid maxval {maxval}")));
    }
    // Single whitespace byte separates the header from the raster.
    if cur >= bytes.len() {
        return Err(Error::Format("unexpected end of data".into()));
    }
    cur += 1;

    let n = width * height;
    let mut data = Vec::with_capacity(n);
    if maxval < 256 {
        let raster = bytes
            .get(cur..cur + n)
            .ok_or_else(|| Error::Format("unexpected end of data".into()))?;
        data.extend(raster.iter().map(|&b| S::of(b as f64)));
    } else {
        let raster = bytes
            .get(cur..cur + 2 * n)
            .ok_or_else(|| Error::Format("unexpected end of data".into()))?;
        data.extend(
            raster
                .chunks_exact(2)
                .map(|c| S::of(u16::from_be_bytes([c[0], c[1]]) as f64)),
        );
    }
    GrayImage::new(width, height, data)
}

fn expect_magic(bytes: &[u8], cur: &mut usize, magic: &[u8]) -> Result<()> {
    if bytes.len() < magic.len() || &bytes[..magic.len()] != magic {
        return Err(Error::Format("bad magic number".into()));
    }
    *cur = magic.len();
    Ok(())
}

/// Read one whitespace/comment-delimited decimal from a netpbm header.
fn read_header_int(bytes: &[u8], cur: &mut usize) -> Result<usize> {
    loop {
        match bytes.get(*cur) {
            Some(b) if b.is_ascii_whitespace() => *cur += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*cur) {
                    *cur += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_digit() => break,
            Some(_) => return Err(Error::Format("malformed header".into())),
            None => return Err(Error::Format("unexpected end of data".into())),
        }
    }
    let mut v: usize = 0;
    let mut any = false;
    while let Some(&b) = bytes.get(*cur) {
        if b.is_ascii_digit() {
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as usize))
                .ok_or_else(|| Error::Format("header value overflow".into()))?;
            *cur += 1;
            any = true;
        } else {
            break;
        }
    }
    if !any {
        return Err(Error::Format("malformed header".into()));
    }
    Ok(v)
}

fn decode_png<S: Real>(bytes: &[u8]) -> Result<GrayImage<S>> {
    let decoder = png::Decoder::new(bytes);
    let mut reader = decoder
        .read_info()
        .map_err(|e| Error::Format(format!("png: {e}")))?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::Format(format!("png: {e}")))?;
    if info.color_type != png::ColorType::Grayscale {
        return Err(Error::Unsupported(
            "png must be single-channel grayscale".into(),
        ));
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let data: Vec<S> = match info.bit_depth {
        png::BitDepth::Eight => buf[..w * h].iter().map(|&b| S::of(b as f64)).collect(),
        png::BitDepth::Sixteen => buf[..2 * w * h]
            .chunks_exact(2)
            .map(|c| S::of(u16::from_be_bytes([c[0], c[1]]) as f64))
            .collect(),
        other => {
            return Err(Error::Unsupported(format!(
                "png bit depth {other:?} not supported"
            )))
        }
    };
    GrayImage::new(w, h, data)
}

/// Write a binary P5 graymap. Intensities are rounded and clamped to
/// `[0, maxval]`; samples are 8-bit for `maxval < 256`, else 16-bit
/// big-endian.
pub fn save_pgm<S: Real>(img: &GrayImage<S>, maxval: u16, path: &Path) -> Result<()> {
    if maxval == 0 {
        return Err(Error::InvalidParam("maxval must be >= 1".into()));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P5\n{} {}\n{}\n", img.width(), img.height(), maxval)?;
    if maxval < 256 {
        let buf: Vec<u8> = img
            .data()
            .iter()
            .map(|&v| clamp_round(v, maxval as f64) as u8)
            .collect();
        out.write_all(&buf)?;
    } else {
        let mut buf = Vec::with_capacity(2 * img.data().len());
        for &v in img.data() {
            buf.extend_from_slice(&(clamp_round(v, maxval as f64) as u16).to_be_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

/// Write a binary P6 pixmap from 8-bit interleaved RGB triples.
pub fn save_ppm(width: usize, height: usize, rgb: &[u8], path: &Path) -> Result<()> {
    if rgb.len() != 3 * width * height {
        return Err(Error::InvalidParam("rgb buffer length mismatch".into()));
    }
    let mut out = BufWriter::new(File::create(path)?);
    write!(out, "P6\n{width} {height}\n255\n")?;
    out.write_all(rgb)?;
    out.flush()?;
    Ok(())
}

fn clamp_round<S: Real>(v: S, maxval: f64) -> u32 {
    let v = v.to_f64_lossy().round();
    v.clamp(0.0, maxval) as u32
}
