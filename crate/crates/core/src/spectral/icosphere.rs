//! Subdivided icosahedron with cotangent conductances and barycentric masses.

use std::collections::{BTreeMap, HashMap};

use super::WeightedComplex;
use crate::error::{Error, Result};

pub const MAX_SUBDIVISIONS: usize = 7;

fn normalized(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// Vertices on the unit sphere and counter-clockwise (outward) triangles.
pub fn icosphere_mesh(subdivisions: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let t = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<[f64; 3]> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .into_iter()
    .map(normalized)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<[f64; 3]>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let (p, q) = (vertices[a], vertices[b]);
                vertices.push(normalized([
                    0.5 * (p[0] + q[0]),
                    0.5 * (p[1] + q[1]),
                    0.5 * (p[2] + q[2]),
                ]));
                vertices.len() - 1
            })
        };
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
    }
    (vertices, faces)
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm3(a: &[f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

/// Cotangent-weight complex on a triangle mesh. Conductance of an edge is
/// half the sum of the cotangents opposite to it; each vertex receives a
/// third of the area of every incident triangle.
pub fn cotangent_complex(
    label: impl Into<String>,
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[usize; 3]>,
) -> Result<WeightedComplex> {
    let n = vertices.len();
    let mut weights: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut masses = vec![0.0; n];
    for tri in &triangles {
        let p = [vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]];
        let area = 0.5 * norm3(&cross(&sub(&p[1], &p[0]), &sub(&p[2], &p[0])));
        for corner in 0..3 {
            let (a, b, c) = (corner, (corner + 1) % 3, (corner + 2) % 3);
            let u = sub(&p[b], &p[a]);
            let v = sub(&p[c], &p[a]);
            let cot = dot3(&u, &v) / norm3(&cross(&u, &v));
            let key = (tri[b].min(tri[c]), tri[b].max(tri[c]));
            *weights.entry(key).or_insert(0.0) += 0.5 * cot;
            masses[tri[a]] += area / 3.0;
        }
    }
    let (edges, conductance): (Vec<[usize; 2]>, Vec<f64>) = weights.into_iter().map(|((a, b), w)| ([a, b], w)).unzip();
    let mut complex = WeightedComplex::from_parts(label, vertices, edges, conductance, masses)?;
    complex.triangles = Some(triangles);
    Ok(complex)
}

/// Unit icosphere after `subdivisions` midpoint refinements, with `φ = 0`.
pub fn build_icosphere(subdivisions: usize) -> Result<WeightedComplex> {
    if subdivisions > MAX_SUBDIVISIONS {
        return Err(Error::InvalidInput(format!(
            "subdivisions = {subdivisions} exceeds the maximum of {MAX_SUBDIVISIONS}"
        )));
    }
    let (vertices, triangles) = icosphere_mesh(subdivisions);
    cotangent_complex(format!("icosphere-s{subdivisions}"), vertices, triangles)
}
