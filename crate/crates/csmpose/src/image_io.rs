//! PNG and PGM reading and writing for frames, label maps and clouds.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use csmpose_core::{Label, Raster, Rgb};

use crate::error::{CliError, CliResult};

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::at(path, e))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| CliError::at(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::at(path, e))
}

struct Decoded {
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: Vec<u8>,
}

fn decode_png(path: &Path, transformations: png::Transformations) -> CliResult<Decoded> {
    let mut decoder = png::Decoder::new(open(path)?);
    decoder.set_transformations(transformations);
    let mut reader = decoder.read_info().map_err(|e| CliError::at(path, e))?;
    let mut data = vec![0; reader.output_buffer_size()];
    let info = reader.next_frame(&mut data).map_err(|e| CliError::at(path, e))?;
    data.truncate(info.buffer_size());
    Ok(Decoded {
        width: info.width as usize,
        height: info.height as usize,
        color: info.color_type,
        depth: info.bit_depth,
        data,
    })
}

/// Reads any 8- or 16-bit PNG as sRGB, dropping alpha.
pub fn read_rgb(path: &Path) -> CliResult<Raster<Rgb>> {
    let d = decode_png(path, png::Transformations::normalize_to_color8())?;
    let px: Vec<Rgb> = match d.color {
        png::ColorType::Rgb => d.data.chunks_exact(3).map(|c| Rgb([c[0], c[1], c[2]])).collect(),
        png::ColorType::Rgba => d.data.chunks_exact(4).map(|c| Rgb([c[0], c[1], c[2]])).collect(),
        png::ColorType::Grayscale => d.data.iter().map(|&g| Rgb([g; 3])).collect(),
        png::ColorType::GrayscaleAlpha => d.data.chunks_exact(2).map(|c| Rgb([c[0]; 3])).collect(),
        png::ColorType::Indexed => return Err(CliError::at(path, "palette was not expanded")),
    };
    Ok(Raster::from_vec(d.width, d.height, px)?)
}

pub fn write_rgb(path: &Path, img: &Raster<Rgb>) -> CliResult<()> {
    let data: Vec<u8> = img.values().iter().flat_map(|p| p.0).collect();
    encode_png(path, img.width(), img.height(), png::ColorType::Rgb, None, &data)
}

/// Reads a label map: an 8-bit paletted or greyscale PNG, or an 8-bit PGM.
/// The pixel value (palette index) is the label; 0 is background.
pub fn read_labels(path: &Path) -> CliResult<Raster<Label>> {
    if is_pgm(path) {
        let (w, h, max, values) = read_pgm(path)?;
        if max > 255 {
            return Err(CliError::at(path, "label PGM must be 8-bit"));
        }
        return Ok(Raster::from_vec(w, h, values.into_iter().map(|v| v as Label).collect())?);
    }
    let d = decode_png(path, png::Transformations::IDENTITY)?;
    if d.depth != png::BitDepth::Eight || !matches!(d.color, png::ColorType::Indexed | png::ColorType::Grayscale) {
        return Err(CliError::at(path, "label maps must be 8-bit paletted or greyscale PNG"));
    }
    Ok(Raster::from_vec(d.width, d.height, d.data)?)
}

/// Display colour of a label in written masks.
pub fn label_color(l: Label) -> [u8; 3] {
    const BASE: [[u8; 3]; 7] = [
        [0, 0, 0],
        [230, 25, 75],
        [255, 225, 25],
        [60, 180, 75],
        [0, 130, 200],
        [245, 130, 48],
        [145, 30, 180],
    ];
    match BASE.get(l as usize) {
        Some(&c) => c,
        None => {
            let v = u32::from(l).wrapping_mul(2_654_435_761);
            [(v >> 24) as u8, (v >> 16) as u8, (v >> 8) as u8]
        }
    }
}

/// Writes a label map as a paletted PNG whose indices are the labels.
pub fn write_labels(path: &Path, labels: &Raster<Label>) -> CliResult<()> {
    let palette: Vec<u8> = (0..=255u8).flat_map(label_color).collect();
    encode_png(path, labels.width(), labels.height(), png::ColorType::Indexed, Some(palette), labels.values())
}

fn encode_png(
    path: &Path,
    width: usize,
    height: usize,
    color: png::ColorType,
    palette: Option<Vec<u8>>,
    data: &[u8],
) -> CliResult<()> {
    let mut enc = png::Encoder::new(create(path)?, width as u32, height as u32);
    enc.set_color(color);
    enc.set_depth(png::BitDepth::Eight);
    if let Some(p) = palette {
        enc.set_palette(p);
    }
    let mut w = enc.write_header().map_err(|e| CliError::at(path, e))?;
    w.write_image_data(data).map_err(|e| CliError::at(path, e))?;
    w.finish().map_err(|e| CliError::at(path, e))
}

fn is_pgm(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

/// Reads a binary (P5) PGM and returns width, height, maxval and samples.
pub fn read_pgm(path: &Path) -> CliResult<(usize, usize, u16, Vec<u16>)> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes).map_err(|e| CliError::at(path, e))?;
    let bad = || CliError::at(path, "malformed PGM");
    let mut pos = 0;
    let mut token = || -> Option<String> {
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
        (pos > start).then(|| String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token().as_deref() != Some("P5") {
        return Err(bad());
    }
    let mut num = || token().and_then(|t| t.parse::<usize>().ok());
    let (w, h, max) = (num().ok_or_else(bad)?, num().ok_or_else(bad)?, num().ok_or_else(bad)?);
    if max == 0 || max > 65535 {
        return Err(bad());
    }
    let body = &bytes[(pos + 1).min(bytes.len())..];
    let values: Vec<u16> = if max < 256 {
        body.iter().take(w * h).map(|&b| u16::from(b)).collect()
    } else {
        body.chunks_exact(2).take(w * h).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    if values.len() != w * h {
        return Err(CliError::at(path, "PGM data is truncated"));
    }
    Ok((w, h, max as u16, values))
}

/// Writes a 16-bit binary PGM.
pub fn write_pgm16(path: &Path, width: usize, height: usize, values: &[u16]) -> CliResult<()> {
    let mut f = create(path)?;
    let mut buf = format!("P5\n{width} {height}\n65535\n").into_bytes();
    buf.extend(values.iter().flat_map(|v| v.to_be_bytes()));
    f.write_all(&buf).and_then(|_| f.flush()).map_err(|e| CliError::at(path, e))
}
