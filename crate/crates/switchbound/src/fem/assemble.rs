//! P1 Galerkin assembly of mass, stiffness, and load vectors.

use super::band::SymBand;
use super::mesh::SpaceMesh;

/// Mass and stiffness matrices over all nodes plus their interior-restricted
/// copies (Dirichlet boundary rows/columns eliminated).
#[derive(Clone, Debug)]
pub struct FemMatrices {
    pub mass: SymBand,
    pub stiffness: SymBand,
    pub mass_interior: SymBand,
    pub stiffness_interior: SymBand,
}

/// Exact 3x3 element matrices for a P1 triangle.
///
/// Returns `(area, mass, stiffness)` with `mass = area/12 * (1 + delta_ij)`
/// and `stiffness[i][j] = (b_i b_j + c_i c_j) / (4 area)` where `(b_i, c_i)`
/// are the edge normal components of the shape-function gradients.
fn element_matrices(p: [(f64, f64); 3]) -> (f64, [[f64; 3]; 3], [[f64; 3]; 3]) {
    let (x0, y0) = p[0];
    let (x1, y1) = p[1];
    let (x2, y2) = p[2];
    let det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    let area = 0.5 * det;
    let b = [y1 - y2, y2 - y0, y0 - y1];
    let c = [x2 - x1, x0 - x2, x1 - x0];
    let mut mass = [[0.0; 3]; 3];
    let mut stiff = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            mass[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
            stiff[i][j] = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
        }
    }
    (area, mass, stiff)
}

/// Assembles the P1 mass and stiffness matrices of the mesh.
pub fn assemble_fem(mesh: &SpaceMesh) -> FemMatrices {
    let n = mesh.n_nodes();
    let mut mass = SymBand::zeros(n, mesh.full_bandwidth());
    let mut stiffness = SymBand::zeros(n, mesh.full_bandwidth());
    let n_int = mesh.n_interior();
    let mut mass_interior = SymBand::zeros(n_int, mesh.interior_bandwidth());
    let mut stiffness_interior = SymBand::zeros(n_int, mesh.interior_bandwidth());

    for tri in mesh.triangles() {
        let coords = [
            mesh.coord(tri[0]),
            mesh.coord(tri[1]),
            mesh.coord(tri[2]),
        ];
        let (_, me, ke) = element_matrices(coords);
        for a in 0..3 {
            for b in 0..=a {
                mass.add(tri[a], tri[b], me[a][b]);
                stiffness.add(tri[a], tri[b], ke[a][b]);
                if let (Some(ia), Some(ib)) =
                    (mesh.interior_index(tri[a]), mesh.interior_index(tri[b]))
                {
                    mass_interior.add(ia, ib, me[a][b]);
                    stiffness_interior.add(ia, ib, ke[a][b]);
                }
            }
        }
    }
    FemMatrices {
        mass,
        stiffness,
        mass_interior,
        stiffness_interior,
    }
}

/// Assembles the load vector `b_i = ∫ f φ_i dx` over all nodes with the
/// 3-point edge-midpoint quadrature (exact for quadratics).
pub fn assemble_load<F: Fn(f64, f64) -> f64>(mesh: &SpaceMesh, f: F) -> Vec<f64> {
    let mut b = vec![0.0; mesh.n_nodes()];
    for tri in mesh.triangles() {
        let p = [
            mesh.coord(tri[0]),
            mesh.coord(tri[1]),
            mesh.coord(tri[2]),
        ];
        let det = (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1);
        let area = 0.5 * det;
        let w = area / 3.0;
        // Midpoint of edge (a, b) carries shape value 1/2 at both endpoints.
        for (a, bn) in [(0, 1), (1, 2), (2, 0)] {
            let mx = 0.5 * (p[a].0 + p[bn].0);
            let my = 0.5 * (p[a].1 + p[bn].1);
            let fv = f(mx, my);
            b[tri[a]] += w * 0.5 * fv;
            b[tri[bn]] += w * 0.5 * fv;
        }
    }
    b
}
