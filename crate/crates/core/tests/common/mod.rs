//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use hairflow_core::shock::{CoherenceParams, ConvexityConvention};
use hairflow_core::{BinaryMask, IntensityImage, OrganizedCloud};
use nalgebra::{Matrix2, SymmetricEigen};
use rand::Rng;

fn choose(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Full 2-D Sobel-x kernel, `kernel[row][col]`.
fn sobel_x_kernel(n: usize) -> Vec<Vec<f64>> {
    let n = n as i64;
    (0..n)
        .map(|j| {
            (0..n)
                .map(|i| choose(n - 1, j) * (choose(n - 3, i - 2) - choose(n - 3, i)))
                .collect()
        })
        .collect()
}

fn transpose(k: &[Vec<f64>]) -> Vec<Vec<f64>> {
    (0..k.len())
        .map(|i| k.iter().map(|row| row[i]).collect())
        .collect()
}

fn px(img: &[Vec<f64>], x: i64, y: i64) -> f64 {
    let h = img.len() as i64;
    let w = img[0].len() as i64;
    img[y.clamp(0, h - 1) as usize][x.clamp(0, w - 1) as usize]
}

fn correlate(img: &[Vec<f64>], k: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let r = (k.len() / 2) as i64;
    let (h, w) = (img.len(), img[0].len());
    let mut out = vec![vec![0.0; w]; h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (j, row) in k.iter().enumerate() {
                for (i, kv) in row.iter().enumerate() {
                    acc += kv * px(img, x as i64 + i as i64 - r, y as i64 + j as i64 - r);
                }
            }
            out[y][x] = acc;
        }
    }
    out
}

fn window(img: &[Vec<f64>], size: usize, pick: fn(f64, f64) -> f64, init: f64) -> Vec<Vec<f64>> {
    let r = (size / 2) as i64;
    let (h, w) = (img.len(), img[0].len());
    let mut out = vec![vec![0.0; w]; h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = init;
            for dy in -r..=r {
                for dx in -r..=r {
                    acc = pick(acc, px(img, x as i64 + dx, y as i64 + dy));
                }
            }
            out[y][x] = acc;
        }
    }
    out
}

pub fn to_rows(img: &IntensityImage) -> Vec<Vec<f64>> {
    (0..img.height())
        .map(|y| (0..img.width()).map(|x| img.get(x, y)).collect())
        .collect()
}

/// One shock-filter iteration, pixel by pixel from the definitions.
pub fn shock_step_oracle(img: &IntensityImage, p: &CoherenceParams) -> Vec<Vec<f64>> {
    let rows = to_rows(img);
    let (h, w) = (rows.len(), rows[0].len());
    let kx = sobel_x_kernel(p.k_delta);
    let ky = transpose(&kx);
    let gx = correlate(&rows, &kx);
    let gy = correlate(&rows, &ky);
    let ixx = correlate(&gx, &kx);
    let ixy = correlate(&gx, &ky);
    let iyy = correlate(&gy, &ky);
    let maxed = window(&rows, p.k_m, f64::max, f64::NEG_INFINITY);
    let mined = window(&rows, p.k_m, f64::min, f64::INFINITY);
    let r = (p.k_e / 2) as i64;
    let area = (p.k_e * p.k_e) as f64;
    let mut out = vec![vec![0.0; w]; h];
    for y in 0..h {
        for x in 0..w {
            let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
            for dy in -r..=r {
                for dx in -r..=r {
                    let u = px(&gx, x as i64 + dx, y as i64 + dy);
                    let v = px(&gy, x as i64 + dx, y as i64 + dy);
                    a += u * u;
                    b += u * v;
                    c += v * v;
                }
            }
            let eig = SymmetricEigen::new(Matrix2::new(a / area, b / area, b / area, c / area));
            let k = if eig.eigenvalues[0] >= eig.eigenvalues[1] {
                0
            } else {
                1
            };
            let e = eig.eigenvectors.column(k);
            let ivv =
                e[0] * e[0] * ixx[y][x] + 2.0 * e[0] * e[1] * ixy[y][x] + e[1] * e[1] * iyy[y][x];
            let (pos, neg) = match p.convention {
                ConvexityConvention::AsWritten => (maxed[y][x], mined[y][x]),
                ConvexityConvention::Weickert => (mined[y][x], maxed[y][x]),
            };
            let v = rows[y][x];
            let t = if ivv > 0.0 {
                pos
            } else if ivv < 0.0 {
                neg
            } else {
                v
            };
            out[y][x] = v * p.c_blend + t * (1.0 - p.c_blend);
        }
    }
    out
}

/// Random mesh instance: ragged mask, holes in depth, bumpy surface with cliffs.
pub fn random_mesh_instance(rng: &mut impl Rng, size: u32) -> (BinaryMask, OrganizedCloud) {
    let mask = BinaryMask::from_fn(size, size, |_, _| rng.random_bool(0.85));
    let cloud = OrganizedCloud::from_fn(size, size, |x, y| {
        if rng.random_bool(0.05) {
            return None;
        }
        let mut z = 1.0 + rng.random_range(0.0..0.03);
        if rng.random_bool(0.05) {
            z += 0.2;
        }
        Some([x as f32 * 0.004, y as f32 * 0.004, z as f32])
    });
    (mask, cloud)
}

/// Vertex list and edge list built straight from the definition: masked
/// pixels with valid depth, 8-neighbours within `edge_max`.
pub fn oracle_graph(
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    edge_max: f64,
) -> (Vec<(u32, u32)>, Vec<Vec<(usize, f64)>>) {
    let (w, h) = mask.dims();
    let verts: Vec<(u32, u32)> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .filter(|&(x, y)| mask.get(x, y) && cloud.point(x, y).is_some())
        .collect();
    let mut adj = vec![Vec::new(); verts.len()];
    for (i, &(xi, yi)) in verts.iter().enumerate() {
        for (j, &(xj, yj)) in verts.iter().enumerate() {
            if i == j || xi.abs_diff(xj) > 1 || yi.abs_diff(yj) > 1 {
                continue;
            }
            let d = (cloud.point(xi, yi).unwrap() - cloud.point(xj, yj).unwrap()).norm();
            if d > 0.0 && d <= edge_max {
                adj[i].push((j, d));
            }
        }
    }
    (verts, adj)
}

/// Array-scan Dijkstra from a set of sources; returns every distance.
pub fn dijkstra_all(adj: &[Vec<(usize, f64)>], sources: &[usize]) -> Vec<f64> {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    for &s in sources {
        dist[s] = 0.0;
    }
    loop {
        let mut best = None;
        for v in 0..n {
            if !done[v] && dist[v].is_finite() && best.is_none_or(|b: usize| dist[v] < dist[b]) {
                best = Some(v);
            }
        }
        let Some(v) = best else { break };
        done[v] = true;
        for &(u, wgt) in &adj[v] {
            if dist[v] + wgt < dist[u] {
                dist[u] = dist[v] + wgt;
            }
        }
    }
    dist
}
