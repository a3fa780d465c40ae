//! Baseline planner: shortest path over the hair's organized point cloud to
//! the bottom of the hair, found with A*.
//!
//! The graph connects 8-neighbouring masked pixels with valid depth whose
//! 3-D distance is at most `edge_max_m`; edge weights are 3-D Euclidean
//! distances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::mask::BinaryMask;
use crate::path::{PixelPath, PlannedPath, Termination};
use crate::raster::{ensure_same_dims, OrganizedCloud, PixelPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeshParams {
    /// Longest 3-D edge kept in the graph, meters.
    pub edge_max_m: f64,
    /// Fraction of the mask bounding-box height that forms the goal band.
    pub goal_frac: f64,
}

impl Default for MeshParams {
    fn default() -> Self {
        Self {
            edge_max_m: 0.05,
            goal_frac: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
    pub xyz: Vector3<f64>,
}

#[derive(Debug, Clone)]
pub struct HairGraph {
    width: u32,
    height: u32,
    vertices: Vec<Vertex>,
    by_pixel: Vec<Option<usize>>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

const NEIGHBOURS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

pub fn build_graph(
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    edge_max_m: f64,
) -> Result<HairGraph> {
    ensure_same_dims("cloud", mask.dims(), cloud.dims())?;
    if !(edge_max_m > 0.0) {
        return Err(invalid(
            "edge_max_m",
            format!("must be positive, got {edge_max_m}"),
        ));
    }
    let (w, h) = mask.dims();
    let mut vertices = Vec::new();
    let mut by_pixel = vec![None; w as usize * h as usize];
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            if let Some(xyz) = cloud.point(x, y) {
                by_pixel[y as usize * w as usize + x as usize] = Some(vertices.len());
                vertices.push(Vertex { x, y, xyz });
            }
        }
    }
    if vertices.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let adjacency = vertices
        .iter()
        .map(|v| {
            NEIGHBOURS
                .iter()
                .filter_map(|&(dx, dy)| {
                    let (nx, ny) = (v.x as i64 + dx, v.y as i64 + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        return None;
                    }
                    let j = by_pixel[ny as usize * w as usize + nx as usize]?;
                    let d = (vertices[j].xyz - v.xyz).norm();
                    (d > 0.0 && d <= edge_max_m).then_some((j, d))
                })
                .collect()
        })
        .collect();
    Ok(HairGraph {
        width: w,
        height: h,
        vertices,
        by_pixel,
        adjacency,
    })
}

impl HairGraph {
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn vertex_at(&self, x: u32, y: u32) -> Option<usize> {
        if x >= self.width || y >= self.height {
            return None;
        }
        self.by_pixel[y as usize * self.width as usize + x as usize]
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency[a]
            .iter()
            .find(|(j, _)| *j == b)
            .map(|(_, w)| *w)
    }
}

/// Vertices in the bottom band of the mask's bounding box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSet {
    goals: Vec<usize>,
    is_goal: Vec<bool>,
}

impl GoalSet {
    /// A vertex is a goal when `y_max - y < goal_frac * bbox_height`; the
    /// bottom row is always included.
    pub fn bottom(graph: &HairGraph, mask: &BinaryMask, goal_frac: f64) -> Result<Self> {
        if !(goal_frac > 0.0 && goal_frac <= 1.0) {
            return Err(invalid(
                "goal_frac",
                format!("must lie in (0, 1], got {goal_frac}"),
            ));
        }
        let (_, y_min, _, y_max) = mask.bounding_box().ok_or(Error::EmptyMask)?;
        let band = goal_frac * (y_max - y_min + 1) as f64;
        let ids = graph
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| v.y <= y_max && ((y_max - v.y) as f64) < band)
            .map(|(i, _)| i);
        Self::from_vertices(graph, ids)
    }

    pub fn from_vertices(graph: &HairGraph, ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut is_goal = vec![false; graph.vertex_count()];
        for i in ids {
            if i >= is_goal.len() {
                return Err(invalid("goals", format!("vertex {i} does not exist")));
            }
            is_goal[i] = true;
        }
        let goals: Vec<usize> = (0..is_goal.len()).filter(|&i| is_goal[i]).collect();
        if goals.is_empty() {
            return Err(Error::EmptyGoalSet);
        }
        Ok(Self { goals, is_goal })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.goals
    }

    pub fn contains(&self, v: usize) -> bool {
        self.is_goal.get(v).copied().unwrap_or(false)
    }
}

/// Straight-line distance from `v` to the nearest goal.
pub fn heuristic(graph: &HairGraph, goals: &GoalSet, v: usize) -> f64 {
    let p = graph.vertices[v].xyz;
    goals
        .goals
        .iter()
        .map(|&g| (graph.vertices[g].xyz - p).norm())
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    /// Start to goal, inclusive.
    pub vertices: Vec<usize>,
    pub cost: f64,
    /// Vertices in the order they were closed.
    pub expanded: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    f: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on f, then on vertex index
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn astar(graph: &HairGraph, start: usize, goals: &GoalSet) -> Result<SearchResult> {
    let n = graph.vertex_count();
    if start >= n {
        return Err(invalid("start", format!("vertex {start} does not exist")));
    }
    let mut h_cache: Vec<Option<f64>> = vec![None; n];
    let mut h = |v: usize| *h_cache[v].get_or_insert_with(|| heuristic(graph, goals, v));
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let mut expanded = Vec::new();
    let mut open = BinaryHeap::new();
    g[start] = 0.0;
    open.push(Entry {
        f: h(start),
        vertex: start,
    });
    while let Some(Entry { vertex: v, .. }) = open.pop() {
        if closed[v] {
            continue;
        }
        closed[v] = true;
        expanded.push(v);
        if goals.contains(v) {
            let mut vertices = vec![v];
            while let Some(&last) = vertices.last() {
                if last == start {
                    break;
                }
                vertices.push(parent[last]);
            }
            vertices.reverse();
            return Ok(SearchResult {
                vertices,
                cost: g[v],
                expanded,
            });
        }
        for &(u, wgt) in graph.neighbours(v) {
            if closed[u] {
                continue;
            }
            let cand = g[v] + wgt;
            if cand < g[u] {
                g[u] = cand;
                parent[u] = v;
                open.push(Entry {
                    f: cand + h(u),
                    vertex: u,
                });
            }
        }
    }
    Err(Error::Unreachable)
}

pub fn to_pixel_path(vertices: &[usize], graph: &HairGraph) -> PixelPath {
    PixelPath {
        step_px: 0.0,
        points: vertices
            .iter()
            .map(|&v| {
                let vx = &graph.vertices[v];
                PixelPoint::new(vx.x as f64, vx.y as f64)
            })
            .collect(),
    }
}

/// Builds the graph and goal set, then searches from the vertex at `start`'s nearest pixel.
pub fn plan_mesh(
    mask: &BinaryMask,
    cloud: &OrganizedCloud,
    start: PixelPoint,
    params: &MeshParams,
) -> Result<PlannedPath> {
    let graph = build_graph(mask, cloud, params.edge_max_m)?;
    let goals = GoalSet::bottom(&graph, mask, params.goal_frac)?;
    plan_on_graph(&graph, &goals, start)
}

pub fn plan_on_graph(graph: &HairGraph, goals: &GoalSet, start: PixelPoint) -> Result<PlannedPath> {
    let v = start
        .nearest_pixel(graph.width, graph.height)
        .and_then(|(x, y)| graph.vertex_at(x, y))
        .ok_or(Error::StartOutsideHair {
            x: start.x,
            y: start.y,
        })?;
    let found = astar(graph, v, goals)?;
    Ok(PlannedPath {
        path: to_pixel_path(&found.vertices, graph),
        terminated_by: Termination::GoalReached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_cloud(w: u32, h: u32, spacing: f32) -> OrganizedCloud {
        OrganizedCloud::from_fn(w, h, |x, y| {
            Some([x as f32 * spacing, y as f32 * spacing, 1.0])
        })
    }

    #[test]
    fn two_by_two_block() {
        let g = build_graph(
            &BinaryMask::filled(2, 2, true),
            &flat_cloud(2, 2, 0.01),
            0.05,
        )
        .unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn depth_jump_removes_edge() {
        let cloud = OrganizedCloud::new(2, 1, vec![[0.0, 0.0, 1.0], [0.001, 0.0, 1.4]]).unwrap();
        let g = build_graph(&BinaryMask::filled(2, 1, true), &cloud, 0.05).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn invalid_center_is_excluded() {
        let cloud = OrganizedCloud::from_fn(3, 3, |x, y| {
            if (x, y) == (1, 1) {
                None
            } else {
                Some([x as f32 * 0.01, y as f32 * 0.01, 1.0])
            }
        });
        let g = build_graph(&BinaryMask::filled(3, 3, true), &cloud, 0.05).unwrap();
        assert_eq!(g.vertex_count(), 8);
        assert_eq!(g.vertex_at(1, 1), None);
        assert!(build_graph(&BinaryMask::filled(3, 3, false), &cloud, 0.05).is_err());
    }

    #[test]
    fn start_in_goal_set() {
        let mask = BinaryMask::filled(4, 4, true);
        let g = build_graph(&mask, &flat_cloud(4, 4, 0.01), 0.05).unwrap();
        let goals = GoalSet::bottom(&g, &mask, 0.1).unwrap();
        let v = g.vertex_at(2, 3).unwrap();
        let r = astar(&g, v, &goals).unwrap();
        assert_eq!(r.vertices, vec![v]);
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn straight_down_on_flat_grid() {
        let mask = BinaryMask::filled(4, 4, true);
        let g = build_graph(&mask, &flat_cloud(4, 4, 0.01), 0.05).unwrap();
        let goals = GoalSet::bottom(&g, &mask, 0.1).unwrap();
        assert_eq!(goals.vertices().len(), 4);
        let r = astar(&g, g.vertex_at(0, 0).unwrap(), &goals).unwrap();
        assert!((r.cost - 0.03).abs() < 1e-9);
        let p = to_pixel_path(&r.vertices, &g);
        assert_eq!(p.len(), r.vertices.len());
        assert!(p.points.iter().all(|q| q.x == 0.0));
        assert_eq!(p.step_px, 0.0);
    }

    #[test]
    fn unreachable_and_empty_goals() {
        let mask = BinaryMask::from_fn(3, 5, |_, y| y != 2);
        let g = build_graph(&mask, &flat_cloud(3, 5, 0.01), 0.05).unwrap();
        let goals = GoalSet::bottom(&g, &mask, 0.1).unwrap();
        assert_eq!(
            astar(&g, g.vertex_at(1, 0).unwrap(), &goals).unwrap_err(),
            Error::Unreachable
        );
        assert_eq!(
            GoalSet::from_vertices(&g, []).unwrap_err(),
            Error::EmptyGoalSet
        );
        assert!(GoalSet::bottom(&g, &mask, 0.0).is_err());
    }

    #[test]
    fn plan_mesh_rejects_background_start() {
        let mask = BinaryMask::from_fn(5, 5, |x, _| x < 3);
        let err = plan_mesh(
            &mask,
            &flat_cloud(5, 5, 0.001),
            PixelPoint::new(4.0, 0.0),
            &MeshParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::StartOutsideHair { .. }));
    }
}
