use super::{header_pixels, FormatError};
use crate::orientation::{theta_to_f32, OrientationField};
use crate::raster::OrganizedCloud;

const ORF_MAGIC: &[u8; 4] = b"ORF1";
const OCD_MAGIC: &[u8; 4] = b"OCD1";
const HEADER_LEN: usize = 12;

fn parse_header<'a>(
    bytes: &'a [u8],
    magic: &'static [u8; 4],
    floats_per_pixel: usize,
) -> Result<(u32, u32, &'a [u8]), FormatError> {
    if bytes.len() < 4 || &bytes[..4] != magic {
        return Err(FormatError::BadMagic {
            expected: std::str::from_utf8(magic).expect("ascii magic"),
            found: String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned(),
        });
    }
    if bytes.len() < HEADER_LEN {
        let field = if bytes.len() < 8 { "width" } else { "height" };
        return Err(FormatError::MalformedHeader {
            field,
            reason: "header ends early".into(),
        });
    }
    let width = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    let height = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes"));
    let pixels = header_pixels(width as u64, height as u64)?;
    let expected = pixels * floats_per_pixel * 4;
    let body = &bytes[HEADER_LEN..];
    if body.len() < expected {
        return Err(FormatError::TruncatedPayload {
            expected,
            found: body.len(),
        });
    }
    if body.len() > expected {
        return Err(FormatError::TrailingBytes {
            found: body.len() - expected,
        });
    }
    Ok((width, height, body))
}

fn floats(body: &[u8]) -> impl Iterator<Item = f32> + '_ {
    body.chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
}

fn header(magic: &[u8; 4], width: u32, height: u32, floats: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 4 * floats);
    out.extend_from_slice(magic);
    out.extend_from_slice(&width.to_le_bytes());
    out.extend_from_slice(&height.to_le_bytes());
    out
}

pub fn read_orf(bytes: &[u8]) -> Result<OrientationField, FormatError> {
    let (w, h, body) = parse_header(bytes, ORF_MAGIC, 2)?;
    let n = w as usize * h as usize;
    let mut values = floats(body);
    let theta: Vec<f32> = values.by_ref().take(n).collect();
    let coherence: Vec<f32> = values.collect();
    if let Some(i) = theta
        .iter()
        .position(|&t| !(t >= 0.0 && (t as f64) < std::f64::consts::PI))
    {
        return Err(FormatError::InvalidValue {
            field: "theta",
            reason: format!("{} at index {i} is outside [0, pi)", theta[i]),
        });
    }
    if let Some(i) = coherence.iter().position(|c| !(0.0..=1.0).contains(c)) {
        return Err(FormatError::InvalidValue {
            field: "coherence",
            reason: format!("{} at index {i} is outside [0, 1]", coherence[i]),
        });
    }
    let widen = |v: Vec<f32>| v.into_iter().map(f64::from).collect();
    Ok(OrientationField::new(w, h, widen(theta), widen(coherence)).expect("validated"))
}

pub fn write_orf(field: &OrientationField) -> Vec<u8> {
    let n = field.theta().len();
    let mut out = header(ORF_MAGIC, field.width(), field.height(), 2 * n);
    for &t in field.theta() {
        out.extend_from_slice(&theta_to_f32(t).to_le_bytes());
    }
    for &c in field.coherence() {
        out.extend_from_slice(&(c as f32).to_le_bytes());
    }
    out
}

/// Any triple containing a non-finite value, or with `z <= 0`, is read as missing depth.
pub fn read_ocd(bytes: &[u8]) -> Result<OrganizedCloud, FormatError> {
    let (w, h, body) = parse_header(bytes, OCD_MAGIC, 3)?;
    let points = body
        .chunks_exact(12)
        .map(|c| {
            let mut it = floats(c);
            [0; 3].map(|_| it.next().expect("12-byte chunk"))
        })
        .collect();
    Ok(OrganizedCloud::new(w, h, points).expect("checked dims"))
}

pub fn write_ocd(cloud: &OrganizedCloud) -> Vec<u8> {
    let pts = cloud.raw_points();
    let mut out = header(OCD_MAGIC, cloud.width(), cloud.height(), 3 * pts.len());
    for p in pts {
        for c in p {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    out
}
