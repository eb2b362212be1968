use std::io::Write;
use std::path::Path;

use crate::error::{check_len, Error, Result};

/// Grayscale image, row-major, pixel values clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, mut pixels: Vec<f64>) -> Result<Self> {
        check_len(width * height, pixels.len())?;
        for (i, p) in pixels.iter_mut().enumerate() {
            if p.is_nan() {
                return Err(Error::NonFinite(i));
            }
            *p = p.clamp(0.0, 1.0);
        }
        Ok(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            pixels: vec![value.clamp(0.0, 1.0); width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }
    pub fn height(&self) -> usize {
        self.height
    }
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

/// Peak signal-to-noise ratio in dB with peak 1; `+∞` for identical images.
pub fn psnr(x: &GrayImage, reference: &GrayImage) -> Result<f64> {
    if x.width != reference.width || x.height != reference.height {
        return Err(Error::DimensionMismatch {
            expected: reference.pixels.len(),
            found: x.pixels.len(),
        });
    }
    let mse = x
        .pixels
        .iter()
        .zip(&reference.pixels)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / x.pixels.len().max(1) as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Reads a binary (P5) PGM with maxval 255.
pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    parse_pgm(&bytes).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse("truncated PGM header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    let magic = token()?;
    if magic != "P5" {
        return Err(Error::Parse(format!("unsupported PGM format {magic:?}, expected P5")));
    }
    let mut num = |what: &str| -> Result<usize> {
        token()?
            .parse()
            .map_err(|_| Error::Parse(format!("bad PGM {what}")))
    };
    let width = num("width")?;
    let height = num("height")?;
    let maxval = num("maxval")?;
    if maxval != 255 {
        return Err(Error::Parse(format!("unsupported PGM maxval {maxval}, expected 255")));
    }
    // exactly one whitespace byte separates the header from the payload
    let data = &bytes[(pos + 1).min(bytes.len())..];
    let count = width * height;
    if data.len() < count {
        return Err(Error::Parse(format!("truncated PGM payload: {} of {count} bytes", data.len())));
    }
    let pixels = data[..count].iter().map(|&b| b as f64 / 255.0).collect();
    GrayImage::new(width, height, pixels)
}

/// Writes a binary (P5) PGM, quantizing to 8 bits.
pub fn write_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.pixels.iter().map(|&p| (p * 255.0).round().clamp(0.0, 255.0) as u8));
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(&out).map_err(|e| io_err(path, e))
}

/// Piecewise-smooth test image: background gradient, a bright square, a
/// disc and thin vertical bars (sharp edges along rows show blur clearly).
pub fn synthetic_image(size: usize) -> GrayImage {
    let s = size as f64;
    let mut px = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let (u, v) = (x as f64 / s, y as f64 / s);
            let mut p = 0.15 + 0.2 * v;
            if (0.15..0.45).contains(&u) && (0.15..0.45).contains(&v) {
                p = 0.85;
            }
            let (dx, dy) = (u - 0.68, v - 0.62);
            if dx * dx + dy * dy < 0.04 {
                p = 0.6 + 0.3 * (1.0 - (dx * dx + dy * dy) / 0.04);
            }
            if v > 0.75 && (x / (size / 16).max(1)) % 2 == 0 {
                p = 1.0 - p;
            }
            px.push(p);
        }
    }
    GrayImage::new(size, size, px).expect("consistent size")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_examples() {
        let a = GrayImage::filled(2, 2, 0.0);
        let b = GrayImage::filled(2, 2, 1.0);
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!(psnr(&a, &b).unwrap().abs() < 1e-12);
        let c = GrayImage::filled(2, 2, 0.1);
        assert!((psnr(&c, &a).unwrap() - 20.0).abs() < 1e-9);
        assert!(psnr(&a, &GrayImage::filled(3, 2, 0.0)).is_err());
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let img = synthetic_image(16);
        write_pgm(&path, &img).unwrap();
        let back = read_pgm(&path).unwrap();
        assert_eq!((back.width(), back.height()), (16, 16));
        for (a, b) in img.pixels().iter().zip(back.pixels()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn pgm_single_white_pixel() {
        let img = parse_pgm(b"P5\n# c\n1 1\n255\n\xff").unwrap();
        assert_eq!(img.pixels(), &[1.0]);
    }

    #[test]
    fn pgm_rejects_ascii_and_truncation() {
        assert!(matches!(parse_pgm(b"P2\n1 1\n255\n0\n"), Err(Error::Parse(_))));
        assert!(matches!(parse_pgm(b"P5\n2 2\n255\n\x00"), Err(Error::Parse(_))));
        let err = read_pgm("/nonexistent/x.pgm").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/x.pgm"));
    }

    #[test]
    fn clamps_on_construction() {
        let img = GrayImage::new(2, 1, vec![-0.5, 1.5]).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
    }
}
