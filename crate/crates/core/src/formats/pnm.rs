use super::{header_pixels, FormatError};
use crate::mask::{BinaryMask, SoftMask};
use crate::raster::{IntensityImage, RgbImage};

struct Header {
    width: u32,
    height: u32,
    pixels: usize,
    data_offset: usize,
}

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\n' | b'\r' | 0x0b | 0x0c)
}

fn next_token(bytes: &[u8], pos: &mut usize, field: &'static str) -> Result<u64, FormatError> {
    loop {
        match bytes.get(*pos) {
            Some(&b) if is_ws(b) => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => {
                return Err(FormatError::MalformedHeader {
                    field,
                    reason: "unexpected end of header".into(),
                })
            }
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| b.is_ascii_digit()) {
        *pos += 1;
    }
    if start == *pos {
        return Err(FormatError::MalformedHeader {
            field,
            reason: format!("expected a decimal number at byte {start}"),
        });
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).expect("ascii digits");
    text.parse::<u64>()
        .map_err(|_| FormatError::DimensionOverflow { field })
}

fn parse_header(bytes: &[u8], magic: &'static str) -> Result<Header, FormatError> {
    if bytes.len() < 2 || &bytes[..2] != magic.as_bytes() {
        return Err(FormatError::BadMagic {
            expected: magic,
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned(),
        });
    }
    let mut pos = 2;
    if !bytes.get(pos).is_some_and(|&b| is_ws(b) || b == b'#') {
        return Err(FormatError::MalformedHeader {
            field: "magic",
            reason: "magic must be followed by whitespace".into(),
        });
    }
    let width = next_token(bytes, &mut pos, "width")?;
    let height = next_token(bytes, &mut pos, "height")?;
    let maxval = next_token(bytes, &mut pos, "maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(FormatError::UnsupportedMaxval(
            maxval.min(u32::MAX as u64) as u32
        ));
    }
    match bytes.get(pos) {
        Some(&b) if is_ws(b) => pos += 1,
        _ => {
            return Err(FormatError::MalformedHeader {
                field: "maxval",
                reason: "must be followed by a single whitespace byte".into(),
            })
        }
    }
    let pixels = header_pixels(width, height)?;
    Ok(Header {
        width: width as u32,
        height: height as u32,
        pixels,
        data_offset: pos,
    })
}

fn payload<'a>(bytes: &'a [u8], header: &Header, channels: usize) -> Result<&'a [u8], FormatError> {
    let expected = header.pixels * channels;
    let found = bytes.len() - header.data_offset;
    if found < expected {
        return Err(FormatError::TruncatedPayload { expected, found });
    }
    Ok(&bytes[header.data_offset..header.data_offset + expected])
}

fn write_header(magic: &str, width: u32, height: u32, capacity: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(capacity + 32);
    out.extend_from_slice(format!("{magic}\n{width} {height}\n255\n").as_bytes());
    out
}

/// Reads a binary graymap into an intensity image (values `0..=255`).
pub fn read_pgm(bytes: &[u8]) -> Result<IntensityImage, FormatError> {
    let (w, h, raw) = read_pgm_bytes(bytes)?;
    Ok(IntensityImage::from_raw(
        w,
        h,
        raw.iter().map(|&b| b as f64).collect(),
    ))
}

fn read_pgm_bytes(bytes: &[u8]) -> Result<(u32, u32, &[u8]), FormatError> {
    let header = parse_header(bytes, "P5")?;
    let data = payload(bytes, &header, 1)?;
    Ok((header.width, header.height, data))
}

/// Writes an intensity image, rounding and clamping to `0..=255`.
pub fn write_pgm(img: &IntensityImage) -> Vec<u8> {
    let mut out = write_header("P5", img.width(), img.height(), img.data().len());
    out.extend(
        img.data()
            .iter()
            .map(|&v| v.round().clamp(0.0, 255.0) as u8),
    );
    out
}

/// Any sample `>= 128` is hair.
pub fn read_mask_pgm(bytes: &[u8]) -> Result<BinaryMask, FormatError> {
    let (w, h, raw) = read_pgm_bytes(bytes)?;
    Ok(BinaryMask::new(w, h, raw.iter().map(|&b| b >= 128).collect()).expect("checked dims"))
}

pub fn write_mask_pgm(mask: &BinaryMask) -> Vec<u8> {
    let mut out = write_header("P5", mask.width(), mask.height(), mask.bits().len());
    out.extend(mask.bits().iter().map(|&b| if b { 255u8 } else { 0 }));
    out
}

/// Sample `s` maps to membership `s / 255`.
pub fn read_soft_mask_pgm(bytes: &[u8]) -> Result<SoftMask, FormatError> {
    let (w, h, raw) = read_pgm_bytes(bytes)?;
    Ok(SoftMask::new(w, h, raw.iter().map(|&b| b as f64 / 255.0).collect()).expect("checked dims"))
}

pub fn write_soft_mask_pgm(mask: &SoftMask) -> Vec<u8> {
    let mut out = write_header("P5", mask.width(), mask.height(), mask.values().len());
    out.extend(
        mask.values()
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8),
    );
    out
}

pub fn read_ppm(bytes: &[u8]) -> Result<RgbImage, FormatError> {
    let header = parse_header(bytes, "P6")?;
    let data = payload(bytes, &header, 3)?;
    let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Ok(RgbImage::new(header.width, header.height, pixels).expect("checked dims"))
}

pub fn write_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = write_header("P6", img.width(), img.height(), img.data().len() * 3);
    for p in img.data() {
        out.extend_from_slice(p);
    }
    out
}
