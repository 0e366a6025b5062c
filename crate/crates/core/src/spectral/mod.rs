//! Discrete Witten-Laplacians on weighted test manifolds.
//!
//! A [`WeightedComplex`] carries an edge graph with positive conductances and
//! lumped vertex masses. Its stiffness `S` and mass `M` define the symmetric
//! Dirichlet-form realization of `-Δ_φ` in `L^2(e^{-φ} dv)`: the operator
//! `M^{-1} S` is positive semidefinite and approximates `-Δ_φ`.

mod cases;
mod diameter;
mod icosphere;
mod lanczos;
mod solve;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub use cases::{
    circle_case, sphere_case, sphere_height_case, weighted_circle_case, DEFAULT_CIRCLE_VERTICES,
    DEFAULT_SPHERE_SUBDIVISIONS,
};
pub use diameter::graph_diameter;
pub use icosphere::{build_icosphere, cotangent_complex, icosphere_mesh, MAX_SUBDIVISIONS};
pub use lanczos::{lanczos_smallest, LanczosOptions, RitzPair};
pub use solve::{
    lambda1_witten, lambda1_witten_with, smallest_nonzero_eigenpairs, Eigenpair, SolverKind, SolverOptions,
    SpectralResult,
};

/// Largest admissible `|φ|` at a vertex.
pub const POTENTIAL_GUARD: f64 = 700.0;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedComplex {
    pub vertices: Vec<[f64; 3]>,
    pub edges: Vec<[usize; 2]>,
    pub conductance: Vec<f64>,
    pub masses: Vec<f64>,
    /// Accumulated potential per vertex.
    pub phi: Vec<f64>,
    pub label: String,
    pub triangles: Option<Vec<[usize; 3]>>,
}

impl WeightedComplex {
    /// Assemble from raw parts, checking shapes and positivity.
    pub fn from_parts(
        label: impl Into<String>,
        vertices: Vec<[f64; 3]>,
        edges: Vec<[usize; 2]>,
        conductance: Vec<f64>,
        masses: Vec<f64>,
    ) -> Result<Self> {
        let n = vertices.len();
        if masses.len() != n || conductance.len() != edges.len() {
            return Err(Error::InvalidInput(format!(
                "shape mismatch: {n} vertices, {} masses, {} edges, {} conductances",
                masses.len(),
                edges.len(),
                conductance.len()
            )));
        }
        if let Some(e) = edges.iter().find(|e| e[0] >= n || e[1] >= n || e[0] == e[1]) {
            return Err(Error::InvalidInput(format!("bad edge {e:?}")));
        }
        if !conductance.iter().chain(&masses).all(|&c| c.is_finite() && c > 0.0) {
            return Err(Error::InvalidInput("conductances and masses must be positive".into()));
        }
        Ok(Self {
            vertices,
            edges,
            conductance,
            masses,
            phi: vec![0.0; n],
            label: label.into(),
            triangles: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `S u`, assembled edge by edge in difference form so constants map to zero.
    pub fn apply_stiffness(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.vertex_count()];
        for (e, &c) in self.edges.iter().zip(&self.conductance) {
            let flux = c * (u[e[0]] - u[e[1]]);
            out[e[0]] += flux;
            out[e[1]] -= flux;
        }
        out
    }

    /// `u^T S u = sum_e c_e (u_i - u_j)^2`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(&self.conductance)
            .map(|(e, c)| {
                let du = u[e[0]] - u[e[1]];
                c * du * du
            })
            .sum()
    }

    pub fn mass_norm2(&self, u: &[f64]) -> f64 {
        self.masses.iter().zip(u).map(|(m, x)| m * x * x).sum()
    }

    /// Mass-weighted mean `sum m_i u_i / sum m_i`.
    pub fn mass_mean(&self, u: &[f64]) -> f64 {
        let total: f64 = self.masses.iter().sum();
        self.masses.iter().zip(u).map(|(m, x)| m * x).sum::<f64>() / total
    }

    /// `||S u - lambda M u||_{M^{-1}} / ||u||_M`.
    pub fn residual(&self, lambda: f64, u: &[f64]) -> f64 {
        let su = self.apply_stiffness(u);
        let r2: f64 = su
            .iter()
            .zip(u)
            .zip(&self.masses)
            .map(|((s, x), m)| {
                let r = s - lambda * m * x;
                r * r / m
            })
            .sum();
        (r2 / self.mass_norm2(u)).sqrt()
    }

    /// Number of connected components of the edge graph.
    pub fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        (0..n).filter(|&i| find(&mut parent, i) == i).count()
    }

    pub fn ensure_connected(&self) -> Result<()> {
        match self.component_count() {
            1 => Ok(()),
            components => Err(Error::Disconnected { components }),
        }
    }

    /// Edge lengths as ambient chords.
    pub fn edge_lengths(&self) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| distance(&self.vertices[e[0]], &self.vertices[e[1]]))
            .collect()
    }

    /// Write the mesh in OFF format (triangles if present, else no faces).
    pub fn write_off(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        let faces = self.triangles.as_deref().unwrap_or(&[]);
        writeln!(out, "OFF")?;
        writeln!(out, "{} {} {}", self.vertex_count(), faces.len(), self.edges.len())?;
        for v in &self.vertices {
            writeln!(out, "{} {} {}", v[0], v[1], v[2])?;
        }
        for f in faces {
            writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
        }
        out.flush()?;
        Ok(())
    }

    /// CSV `vertex_index,x,y,z,phi,u`.
    pub fn write_eigenvector_csv(&self, u: &[f64], path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "vertex_index,x,y,z,phi,u")?;
        for (i, v) in self.vertices.iter().enumerate() {
            writeln!(out, "{i},{},{},{},{},{}", v[0], v[1], v[2], self.phi[i], u[i])?;
        }
        out.flush()?;
        Ok(())
    }
}

pub(crate) fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Reweight by `e^{-φ}`: conductances by the geometric edge midpoint
/// `e^{-(φ_i + φ_j)/2}`, masses by `e^{-φ_i}`.
pub fn apply_weight(complex: &WeightedComplex, phi_values: &[f64]) -> Result<WeightedComplex> {
    if phi_values.len() != complex.vertex_count() {
        return Err(Error::InvalidInput(format!(
            "{} potential values for {} vertices",
            phi_values.len(),
            complex.vertex_count()
        )));
    }
    let mut out = complex.clone();
    for (i, &p) in phi_values.iter().enumerate() {
        let total = complex.phi[i] + p;
        if !total.is_finite() || total.abs() > POTENTIAL_GUARD {
            return Err(Error::MeasureUnderflow {
                exponent: total,
                limit: POTENTIAL_GUARD,
            });
        }
        out.phi[i] = total;
        out.masses[i] *= (-p).exp();
    }
    for (c, e) in out.conductance.iter_mut().zip(&complex.edges) {
        *c *= (-0.5 * (phi_values[e[0]] + phi_values[e[1]])).exp();
    }
    Ok(out)
}

/// `M^{-1} S u`, the discrete `-Δ_φ u`.
pub fn witten_apply(complex: &WeightedComplex, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != complex.vertex_count() {
        return Err(Error::InvalidInput(format!(
            "vector of length {} for {} vertices",
            u.len(),
            complex.vertex_count()
        )));
    }
    Ok(complex
        .apply_stiffness(u)
        .into_iter()
        .zip(&complex.masses)
        .map(|(s, m)| s / m)
        .collect())
}

/// `n` equispaced vertices on a circle of the given radius in the `xy` plane,
/// weighted by `phi_fn` evaluated at each vertex.
pub fn build_weighted_circle(n: usize, radius: f64, phi_fn: impl Fn(&[f64; 3]) -> f64) -> Result<WeightedComplex> {
    if n < 8 {
        return Err(Error::InvalidInput(format!(
            "circle needs at least 8 vertices, got {n}"
        )));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput(format!("radius {radius} must be positive")));
    }
    let h = 2.0 * std::f64::consts::PI * radius / n as f64;
    let vertices: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            [radius * t.cos(), radius * t.sin(), 0.0]
        })
        .collect();
    let edges = (0..n).map(|i| [i, (i + 1) % n]).collect();
    let phi: Vec<f64> = vertices.iter().map(&phi_fn).collect();
    let base = WeightedComplex::from_parts(
        format!("circle-n{n}-r{radius}"),
        vertices,
        edges,
        vec![1.0 / h; n],
        vec![h; n],
    )?;
    apply_weight(&base, &phi)
}

/// Periodic 1D complex on sampled points with uniform spacing `h`.
pub fn build_periodic_chain(
    label: impl Into<String>,
    points: &[[f64; 3]],
    h: f64,
    phi: &[f64],
) -> Result<WeightedComplex> {
    let n = points.len();
    if n < 3 {
        return Err(Error::InvalidInput(format!(
            "periodic chain needs at least 3 nodes, got {n}"
        )));
    }
    let base = WeightedComplex::from_parts(
        label,
        points.to_vec(),
        (0..n).map(|i| [i, (i + 1) % n]).collect(),
        vec![1.0 / h; n],
        vec![h; n],
    )?;
    apply_weight(&base, phi)
}
