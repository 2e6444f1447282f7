//! Uniform P1 triangulation of the unit square with Dirichlet boundary
//! elimination.

use super::FemError;

/// Uniform triangular mesh on `[0,1]^2` with `n_x` nodes per side.
///
/// Nodes are ordered lexicographically (`iy * n_x + ix`); each grid cell is
/// split along its lower-left to upper-right diagonal. Interior nodes (the
/// `(n_x - 2)^2` nodes off the Dirichlet boundary) carry a second,
/// lexicographic index used by all state-space vectors.
#[derive(Clone, Debug)]
pub struct SpaceMesh {
    n_x: usize,
    h: f64,
    coords: Vec<(f64, f64)>,
    triangles: Vec<[usize; 3]>,
    interior_of_node: Vec<Option<usize>>,
    node_of_interior: Vec<usize>,
}

impl SpaceMesh {
    pub fn uniform(n_x: usize) -> Result<Self, FemError> {
        if n_x < 3 {
            return Err(FemError::InvalidParameter {
                field: "n_x",
                message: format!("need at least 3 nodes per side, got {n_x}"),
            });
        }
        let h = 1.0 / (n_x - 1) as f64;
        let mut coords = Vec::with_capacity(n_x * n_x);
        for iy in 0..n_x {
            for ix in 0..n_x {
                coords.push((ix as f64 * h, iy as f64 * h));
            }
        }
        let mut triangles = Vec::with_capacity(2 * (n_x - 1) * (n_x - 1));
        for cy in 0..n_x - 1 {
            for cx in 0..n_x - 1 {
                let ll = cy * n_x + cx;
                let lr = ll + 1;
                let ul = ll + n_x;
                let ur = ul + 1;
                triangles.push([ll, lr, ur]);
                triangles.push([ll, ur, ul]);
            }
        }
        let mut interior_of_node = vec![None; n_x * n_x];
        let mut node_of_interior = Vec::with_capacity((n_x - 2) * (n_x - 2));
        for iy in 1..n_x - 1 {
            for ix in 1..n_x - 1 {
                let node = iy * n_x + ix;
                interior_of_node[node] = Some(node_of_interior.len());
                node_of_interior.push(node);
            }
        }
        Ok(SpaceMesh {
            n_x,
            h,
            coords,
            triangles,
            interior_of_node,
            node_of_interior,
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn n_nodes(&self) -> usize {
        self.coords.len()
    }

    pub fn n_interior(&self) -> usize {
        self.node_of_interior.len()
    }

    pub fn coord(&self, node: usize) -> (f64, f64) {
        self.coords[node]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn interior_index(&self, node: usize) -> Option<usize> {
        self.interior_of_node[node]
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.node_of_interior
    }

    /// Restricts a full node vector to the interior nodes.
    pub fn restrict_interior(&self, full: &[f64]) -> Vec<f64> {
        assert_eq!(full.len(), self.n_nodes());
        self.node_of_interior.iter().map(|&n| full[n]).collect()
    }

    /// Samples a scalar field at the interior nodes.
    pub fn sample_interior<F: Fn(f64, f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.node_of_interior
            .iter()
            .map(|&n| {
                let (x, y) = self.coords[n];
                f(x, y)
            })
            .collect()
    }

    /// Bandwidth of node-indexed P1 matrices (full mesh).
    pub fn full_bandwidth(&self) -> usize {
        self.n_x + 1
    }

    /// Bandwidth of interior-indexed P1 matrices.
    pub fn interior_bandwidth(&self) -> usize {
        self.n_x - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_counts() {
        let mesh = SpaceMesh::uniform(5).unwrap();
        assert_eq!(mesh.n_nodes(), 25);
        assert_eq!(mesh.triangles().len(), 2 * 16);
        assert_eq!(mesh.n_interior(), 9);
        assert!((mesh.spacing() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn triangles_have_positive_area() {
        let mesh = SpaceMesh::uniform(4).unwrap();
        let expected = mesh.spacing() * mesh.spacing() / 2.0;
        for tri in mesh.triangles() {
            let (x0, y0) = mesh.coord(tri[0]);
            let (x1, y1) = mesh.coord(tri[1]);
            let (x2, y2) = mesh.coord(tri[2]);
            let area = 0.5 * ((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0));
            assert!((area - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_grid() {
        assert!(SpaceMesh::uniform(2).is_err());
    }

    #[test]
    fn interior_indexing_round_trips() {
        let mesh = SpaceMesh::uniform(6).unwrap();
        for (k, &node) in mesh.interior_nodes().iter().enumerate() {
            assert_eq!(mesh.interior_index(node), Some(k));
        }
        // Boundary nodes have no interior index.
        assert_eq!(mesh.interior_index(0), None);
        assert_eq!(mesh.interior_index(5), None);
    }
}
