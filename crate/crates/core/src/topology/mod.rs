//! Node placement, unit-disk reachability and random-walk mobility.

mod mobility;

pub use mobility::{Arena, NodeKinematics, RandomWalk};

use crate::sim::RandomStream;

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Row-major grid: node `r * cols + c` sits at `(c * spacing, r * spacing)`.
pub fn grid_topology(rows: usize, cols: usize, spacing: f64) -> Vec<Position> {
    assert!(rows >= 1 && cols >= 1, "grid needs at least one row and column");
    assert!(spacing > 0.0, "spacing must be positive");
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            out.push(Position::new(c as f64 * spacing, r as f64 * spacing));
        }
    }
    out
}

/// Offsets every position by up to `amount` metres per axis, clamped to the arena.
pub fn jitter_positions(positions: &mut [Position], amount: f64, arena: &Arena, rng: &mut RandomStream) {
    if amount <= 0.0 {
        return;
    }
    for p in positions {
        p.x = (p.x + (2.0 * rng.uniform() - 1.0) * amount).clamp(0.0, arena.width);
        p.y = (p.y + (2.0 * rng.uniform() - 1.0) * amount).clamp(0.0, arena.height);
    }
}

/// Nodes on the x axis, `spacing` apart.
pub fn linear_topology(n: usize, spacing: f64) -> Vec<Position> {
    assert!(n >= 2, "a chain needs at least two nodes");
    assert!(spacing > 0.0, "spacing must be positive");
    (0..n)
        .map(|i| Position::new(i as f64 * spacing, 0.0))
        .collect()
}

/// Symmetric unit-disk adjacency: `i ~ j` iff their distance is at most
/// `tx_radius`. Neighbor lists come back sorted by node index.
pub fn neighbors(positions: &[Position], tx_radius: f64) -> Vec<Vec<usize>> {
    assert!(tx_radius > 0.0, "radius must be positive");
    let r2 = tx_radius * tx_radius;
    let n = positions.len();
    let mut adj = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if positions[i].distance_sq(&positions[j]) <= r2 {
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    adj
}

/// Nodes within `tx_radius` of `node`, excluding itself.
pub fn neighbors_of(positions: &[Position], node: usize, tx_radius: f64) -> Vec<usize> {
    let r2 = tx_radius * tx_radius;
    let p = positions[node];
    positions
        .iter()
        .enumerate()
        .filter(|&(j, q)| j != node && p.distance_sq(q) <= r2)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = grid_topology(5, 10, 100.0);
        assert_eq!(g.len(), 50);
        let max_x = g.iter().map(|p| p.x).fold(f64::MIN, f64::max);
        let max_y = g.iter().map(|p| p.y).fold(f64::MIN, f64::max);
        assert_eq!((max_x, max_y), (900.0, 400.0));
        assert_eq!(g[13], Position::new(300.0, 100.0));
    }

    #[test]
    fn single_node_grid() {
        assert_eq!(grid_topology(1, 1, 100.0), vec![Position::new(0.0, 0.0)]);
    }

    #[test]
    fn diagonal_distance() {
        let g = grid_topology(2, 2, 100.0);
        assert!((g[0].distance(&g[3]) - 141.421356).abs() < 1e-5);
    }

    #[test]
    fn grid_degree_at_most_four() {
        let adj = neighbors(&grid_topology(5, 10, 100.0), 125.0);
        assert!(adj.iter().all(|l| l.len() <= 4));
        assert_eq!(adj.iter().map(Vec::len).max(), Some(4));
        // corner node hears its two axis neighbours
        assert_eq!(adj[0], vec![1, 10]);
    }

    #[test]
    fn chain_reachability() {
        let adj = neighbors(&linear_topology(3, 100.0), 125.0);
        assert_eq!(adj[0], vec![1]);
        assert_eq!(adj[1], vec![0, 2]);

        let adj = neighbors(&linear_topology(2, 100.0), 125.0);
        assert_eq!(adj, vec![vec![1], vec![0]]);

        let adj = neighbors(&linear_topology(10, 100.0), 125.0);
        let edges: usize = adj.iter().map(Vec::len).sum::<usize>() / 2;
        assert_eq!(edges, 9);
        assert!(adj.iter().all(|l| l.len() <= 2));
    }

    #[test]
    fn small_radius_is_empty() {
        let adj = neighbors(&grid_topology(5, 10, 100.0), 50.0);
        assert!(adj.iter().all(Vec::is_empty));
    }

    #[test]
    fn neighbors_of_matches_full_map() {
        let g = grid_topology(5, 10, 100.0);
        let adj = neighbors(&g, 125.0);
        for i in 0..g.len() {
            assert_eq!(neighbors_of(&g, i, 125.0), adj[i]);
        }
    }

    #[test]
    fn jitter_bounded_and_seeded() {
        let arena = Arena::new(1500.0, 1000.0, 125.0);
        let base = grid_topology(5, 10, 100.0);
        let mut a = base.clone();
        jitter_positions(&mut a, 20.0, &arena, &mut RandomStream::derive(1, "placement.jitter"));
        let mut b = base.clone();
        jitter_positions(&mut b, 20.0, &arena, &mut RandomStream::derive(1, "placement.jitter"));
        assert_eq!(a, b);
        assert_ne!(a, base);
        for (p, q) in a.iter().zip(&base) {
            assert!((p.x - q.x).abs() <= 20.0 && (p.y - q.y).abs() <= 20.0);
            assert!(arena.contains(p));
        }
        let mut c = base.clone();
        jitter_positions(&mut c, 0.0, &arena, &mut RandomStream::derive(1, "placement.jitter"));
        assert_eq!(c, base);
    }
}
