//! Triangle meshes of `f`, NR, `C₁`, `C₂` with singular-curve polylines,
//! written as Wavefront OBJ.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::derived::{focal_eval, focal_singular_trace, nr_eval, nr_singular_points, SurfaceTag, TraceOptions};
use crate::frontal::{Frontal, FrontalError, Result};
use crate::geom::Vec3;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Mesh {
    pub name: String,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
    pub lines: Vec<Vec<usize>>,
    /// Grid cells skipped because a corner could not be evaluated.
    pub holes: usize,
    /// Vertex index of each grid node, `None` where it was masked.
    #[serde(skip)]
    pub grid: Vec<Option<usize>>,
}

impl Mesh {
    /// Triangulates a row-major `nu × nv` grid; `None` entries punch holes.
    pub fn from_grid(name: &str, nu: usize, nv: usize, grid: &[Option<Vec3>]) -> Self {
        assert_eq!(grid.len(), nu * nv);
        let mut index = vec![None; grid.len()];
        let mut vertices = Vec::new();
        for (k, p) in grid.iter().enumerate() {
            if let Some(p) = p {
                index[k] = Some(vertices.len());
                vertices.push(*p);
            }
        }
        let mut faces = Vec::new();
        let mut holes = 0;
        for i in 0..nu.saturating_sub(1) {
            for j in 0..nv.saturating_sub(1) {
                let corners = (
                    index[i * nv + j],
                    index[(i + 1) * nv + j],
                    index[(i + 1) * nv + j + 1],
                    index[i * nv + j + 1],
                );
                let (Some(a), Some(b), Some(c), Some(d)) = corners else {
                    holes += 1;
                    continue;
                };
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            }
        }
        Self {
            name: name.to_string(),
            vertices,
            faces,
            lines: Vec::new(),
            holes,
            grid: index,
        }
    }

    /// Appends polylines through `points`, split where consecutive points
    /// are farther apart than `max_gap`.
    pub fn add_polylines(&mut self, points: &[Vec3], max_gap: f64) {
        let mut current: Vec<usize> = Vec::new();
        let mut last: Option<Vec3> = None;
        for p in points {
            if !p.is_finite() {
                continue;
            }
            if let Some(q) = last {
                if (*p - q).norm() > max_gap {
                    self.flush(&mut current);
                }
            }
            current.push(self.vertices.len());
            self.vertices.push(*p);
            last = Some(*p);
        }
        self.flush(&mut current);
    }

    fn flush(&mut self, current: &mut Vec<usize>) {
        if current.len() >= 2 {
            self.lines.push(std::mem::take(current));
        } else {
            current.clear();
        }
    }
}

/// Serializes meshes as one OBJ object per mesh.
pub fn to_obj(meshes: &[Mesh]) -> String {
    let mut out = String::new();
    let mut offset = 1;
    for m in meshes {
        let _ = writeln!(out, "o {}", m.name);
        for v in &m.vertices {
            let _ = writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2]);
        }
        for f in &m.faces {
            let _ = writeln!(out, "f {} {} {}", f[0] + offset, f[1] + offset, f[2] + offset);
        }
        for l in &m.lines {
            out.push('l');
            for i in l {
                let _ = write!(out, " {}", i + offset);
            }
            out.push('\n');
        }
        offset += m.vertices.len();
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ObjCounts {
    pub objects: usize,
    pub vertices: usize,
    pub faces: usize,
    pub lines: usize,
}

/// Minimal OBJ reader: counts and validates `o`, `v`, `f`, `l` records.
pub fn read_obj_counts(text: &str) -> std::result::Result<ObjCounts, String> {
    let mut c = ObjCounts::default();
    for (n, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        match tag {
            "o" => c.objects += 1,
            "v" => {
                if rest.len() != 3 || rest.iter().any(|x| x.parse::<f64>().is_err()) {
                    return Err(format!("line {}: bad vertex", n + 1));
                }
                c.vertices += 1;
            }
            "f" | "l" => {
                for x in &rest {
                    let i: usize = x.parse().map_err(|_| format!("line {}: bad index", n + 1))?;
                    if i == 0 || i > c.vertices {
                        return Err(format!("line {}: index {i} out of range", n + 1));
                    }
                }
                if tag == "f" {
                    c.faces += 1;
                } else {
                    c.lines += 1;
                }
            }
            "#" => {}
            other => return Err(format!("line {}: unknown record `{other}`", n + 1)),
        }
    }
    Ok(c)
}

#[derive(Debug, Clone, Copy)]
pub struct MeshOptions {
    pub nu: usize,
    pub nv: usize,
    /// Ruling parameter range for NR.
    pub w_range: (f64, f64),
    pub trace: TraceOptions,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            nu: 81,
            nv: 81,
            w_range: (-1.0, 1.0),
            trace: TraceOptions {
                cells: 120,
                ..TraceOptions::default()
            },
        }
    }
}

pub fn lin(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
    lo + (hi - lo) * k as f64 / (n - 1) as f64
}

/// Samples one surface on a grid over the internal chart (or `(u, w)` for NR).
pub fn surface_mesh(fr: &Frontal, tag: SurfaceTag, opts: &MeshOptions) -> Result<Mesh> {
    let (nu, nv) = (opts.nu, opts.nv);
    if nu < 2 || nv < 2 {
        return Err(FrontalError::Precondition("grid resolutions must be at least 2".into()));
    }
    let (slo, shi) = fr.def.s_range();
    let (tlo, thi) = fr.def.t_range();
    let (wlo, whi) = opts.w_range;
    let grid: Vec<Option<Vec3>> = (0..nu * nv)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nv, idx % nv);
            let s = lin(slo, shi, nu, i);
            match tag {
                SurfaceTag::F => fr.def.eval(s, lin(tlo, thi, nv, j)).ok(),
                SurfaceTag::Nr => nr_eval(fr, s, lin(wlo, whi, nv, j)).ok().map(|p| p.point),
                SurfaceTag::C1 | SurfaceTag::C2 => {
                    let k = if tag == SurfaceTag::C1 { 1 } else { 2 };
                    focal_eval(fr, k, s, lin(tlo, thi, nv, j)).ok().map(|p| p.c)
                }
            }
            .filter(|p| p.is_finite())
        })
        .collect();
    let mut mesh = Mesh::from_grid(tag.name(), nu, nv, &grid);
    let extent = mesh
        .vertices
        .iter()
        .fold(0.0_f64, |m, v| m.max(v.max_abs()))
        .max(1e-12);
    let gap = 0.05 * extent;
    match tag {
        SurfaceTag::F => {
            let on_grid = (0..nv).find(|&j| lin(tlo, thi, nv, j).abs() <= 1e-14 * (thi - tlo));
            if let Some(j0) = on_grid {
                // The axis is a grid row: reuse its vertices.
                let line: Vec<usize> = (0..nu).filter_map(|i| mesh.grid[i * nv + j0]).collect();
                if line.len() >= 2 {
                    mesh.lines.push(line);
                }
            } else if (tlo..=thi).contains(&0.0) {
                let axis: Vec<Vec3> = (0..nu)
                    .filter_map(|i| fr.def.eval(lin(slo, shi, nu, i), 0.0).ok())
                    .collect();
                mesh.add_polylines(&axis, f64::INFINITY);
            }
        }
        SurfaceTag::Nr => {
            if let Ok(trace) = nr_singular_points(fr, opts.trace) {
                mesh.add_polylines(&trace.points, gap);
            }
        }
        SurfaceTag::C1 | SurfaceTag::C2 => {
            let k = if tag == SurfaceTag::C1 { 1 } else { 2 };
            if let Ok(trace) = focal_singular_trace(fr, k, opts.trace) {
                mesh.add_polylines(&trace.points, gap);
            }
        }
    }
    Ok(mesh)
}
