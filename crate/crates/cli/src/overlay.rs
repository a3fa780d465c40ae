use hairflow_core::{BinaryMask, IntensityImage, PixelPath, RgbImage};

pub const STROKE: [u8; 3] = [255, 140, 0];
const START: [u8; 3] = [0, 200, 255];

/// Grey background with hair tinted green, the stroke drawn on top.
pub fn render(background: &IntensityImage, mask: &BinaryMask, path: &PixelPath) -> RgbImage {
    let (w, h) = background.dims();
    let mut px: Vec<[u8; 3]> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let v = background.get(x, y).round().clamp(0.0, 255.0) as u8;
            if mask.get(x, y) {
                [v / 2, v / 2 + 64, v / 2]
            } else {
                [v, v, v]
            }
        })
        .collect();
    let mut put = |x: f64, y: f64, c: [u8; 3]| {
        let (xi, yi) = (x.round(), y.round());
        if xi >= 0.0 && yi >= 0.0 && xi < w as f64 && yi < h as f64 {
            px[yi as usize * w as usize + xi as usize] = c;
        }
    };
    for seg in path.points.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let n = (b.x - a.x).abs().max((b.y - a.y).abs()).ceil().max(1.0) as usize;
        for i in 0..=n {
            let t = i as f64 / n as f64;
            put(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), STROKE);
        }
    }
    if let Some(s) = path.points.first() {
        for (dx, dy) in [(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
            put(s.x + dx, s.y + dy, START);
        }
    }
    RgbImage::new(w, h, px).expect("same size as the background")
}
