mod common;

use hairflow_core::mesh::{astar, build_graph, heuristic, plan_mesh, GoalSet, MeshParams};
use hairflow_core::synth::flat_cloud;
use hairflow_core::{BinaryMask, Error, PixelPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EDGE_MAX: f64 = 0.05;

#[test]
fn graph_matches_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let (mask, cloud) = common::random_mesh_instance(&mut rng, 16);
        let g = build_graph(&mask, &cloud, EDGE_MAX).unwrap();
        let (verts, adj) = common::oracle_graph(&mask, &cloud, EDGE_MAX);
        assert_eq!(g.vertex_count(), verts.len());
        for (i, &(x, y)) in verts.iter().enumerate() {
            let v = g.vertex_at(x, y).unwrap();
            let mut got: Vec<_> = g
                .neighbours(v)
                .iter()
                .map(|&(u, w)| (g.vertices()[u].x, g.vertices()[u].y, w))
                .collect();
            let mut want: Vec<_> = adj[i]
                .iter()
                .map(|&(j, w)| (verts[j].0, verts[j].1, w))
                .collect();
            got.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
            want.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
            assert_eq!(got, want);
        }
    }
}

#[test]
fn astar_cost_equals_dijkstra_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut solved = 0;
    for _ in 0..100 {
        let (mask, cloud) = common::random_mesh_instance(&mut rng, 16);
        let graph = build_graph(&mask, &cloud, EDGE_MAX).unwrap();
        let goals = GoalSet::bottom(&graph, &mask, 0.1).unwrap();
        let (verts, adj) = common::oracle_graph(&mask, &cloud, EDGE_MAX);
        let start = rng.random_range(0..verts.len());
        let (sx, sy) = verts[start];
        let dist = common::dijkstra_all(&adj, &[start]);
        let want = goals
            .vertices()
            .iter()
            .map(|&g| {
                let v = &graph.vertices()[g];
                dist[verts.iter().position(|&p| p == (v.x, v.y)).unwrap()]
            })
            .fold(f64::INFINITY, f64::min);
        match astar(&graph, graph.vertex_at(sx, sy).unwrap(), &goals) {
            Ok(found) => {
                assert_eq!(found.cost, want);
                solved += 1;
            }
            Err(Error::Unreachable) => assert!(want.is_infinite()),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(solved > 50, "only {solved} reachable instances");
}

#[test]
fn heuristic_never_overestimates_on_expanded_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let (mask, cloud) = common::random_mesh_instance(&mut rng, 16);
        let graph = build_graph(&mask, &cloud, EDGE_MAX).unwrap();
        let goals = GoalSet::bottom(&graph, &mask, 0.1).unwrap();
        let (verts, adj) = common::oracle_graph(&mask, &cloud, EDGE_MAX);
        let oracle_goals: Vec<usize> = goals
            .vertices()
            .iter()
            .map(|&g| {
                let v = &graph.vertices()[g];
                verts.iter().position(|&p| p == (v.x, v.y)).unwrap()
            })
            .collect();
        let to_goal = common::dijkstra_all(&adj, &oracle_goals);
        let start = rng.random_range(0..graph.vertex_count());
        let Ok(found) = astar(&graph, start, &goals) else {
            continue;
        };
        for &v in &found.expanded {
            let vx = &graph.vertices()[v];
            let exact = to_goal[verts.iter().position(|&p| p == (vx.x, vx.y)).unwrap()];
            assert!(heuristic(&graph, &goals, v) <= exact + 1e-12);
        }
    }
}

#[test]
fn flat_patch_paths_run_downward() {
    let mask = BinaryMask::from_fn(40, 60, |x, y| (5..35).contains(&x) && (5..55).contains(&y));
    let cloud = flat_cloud(40, 60);
    for sx in [5.0, 12.0, 20.0, 34.0] {
        let out = plan_mesh(
            &mask,
            &cloud,
            PixelPoint::new(sx, 5.0),
            &MeshParams::default(),
        )
        .unwrap();
        let pts = &out.path.points;
        assert!(pts.windows(2).all(|w| w[1].y >= w[0].y));
        assert!(pts.last().unwrap().y > 49.0);
        // straight down is the unique shortest route on a flat sheet
        assert!(pts.iter().all(|p| p.x == sx));
    }
}
