//! Python bindings: a thin layer over the library, taking built-in example
//! names or surface-file paths.

use std::collections::BTreeMap;
use std::path::Path;

use frontal_lab::classify::{classify_focal_point, Thresholds};
use frontal_lab::derived::{axis_principal, SurfaceTag};
use frontal_lab::frontal::{Frontal, InvariantSample};
use frontal_lab::mesh::{surface_mesh, to_obj, MeshOptions};
use frontal_lab::registry;
use frontal_lab::surface::SurfaceDef;
use frontal_lab::verify;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn load(input: &str) -> PyResult<Frontal> {
    let def = match registry::find(input) {
        Some(e) => e.surface(),
        None if Path::new(input).is_file() => SurfaceDef::from_file(input).map_err(value_err)?,
        None => return Err(value_err(format!("unknown example or file `{input}`"))),
    };
    Ok(Frontal::new(def))
}

fn tag(name: &str) -> PyResult<SurfaceTag> {
    match name {
        "f" => Ok(SurfaceTag::F),
        "nr" => Ok(SurfaceTag::Nr),
        "c1" => Ok(SurfaceTag::C1),
        "c2" => Ok(SurfaceTag::C2),
        _ => Err(value_err(format!("surface must be f, nr, c1 or c2, got `{name}`"))),
    }
}

/// Names of the built-in surfaces.
#[pyfunction]
fn examples() -> Vec<&'static str> {
    registry::names()
}

/// Invariants of the singular curve at axis parameter `u`, plus the
/// principal curvatures `kappa1`, `kappa2` there.
#[pyfunction]
fn invariants(input: &str, u: f64) -> PyResult<BTreeMap<&'static str, f64>> {
    let fr = load(input)?;
    let s = fr.invariants_at(u).map_err(value_err)?;
    let mut out: BTreeMap<_, _> = InvariantSample::NAMES.into_iter().zip(s.values()).collect();
    let (k1, k2) = axis_principal(&s);
    out.insert("kappa1", k1);
    out.insert("kappa2", k2);
    Ok(out)
}

/// Gaussian and mean curvature, principal curvatures and `λ` at an
/// internal chart point.
#[pyfunction]
fn curvatures(input: &str, u: f64, v: f64) -> PyResult<BTreeMap<&'static str, f64>> {
    let p = load(input)?.evaluate_point(u, v).map_err(value_err)?;
    Ok(BTreeMap::from([
        ("lambda", p.lambda),
        ("gauss", p.gauss),
        ("mean", p.mean),
        ("kappa1", p.kappa1),
        ("kappa2", p.kappa2),
    ]))
}

/// Verdict for the focal surface `C_j` at the axis point `u`, as the
/// variant name (e.g. `"Regular"`, `"SecondKind"`).
#[pyfunction]
fn focal_verdict(input: &str, j: usize, u: f64) -> PyResult<String> {
    let fr = load(input)?;
    let r = classify_focal_point(&fr, j, u, Thresholds::default()).map_err(value_err)?;
    Ok(format!("{:?}", r.verdict))
}

/// OBJ text for one surface on an `nu × nv` grid.
#[pyfunction]
#[pyo3(signature = (input, surface = "f", nu = 41, nv = 41))]
fn mesh_obj(input: &str, surface: &str, nu: usize, nv: usize) -> PyResult<String> {
    let fr = load(input)?;
    let opts = MeshOptions {
        nu,
        nv,
        ..MeshOptions::default()
    };
    let m = surface_mesh(&fr, tag(surface)?, &opts).map_err(value_err)?;
    Ok(to_obj(&[m]))
}

/// Runs one verification criterion; returns `(passed, summary line)`.
#[pyfunction]
fn verify_criterion(number: u8) -> PyResult<(bool, String)> {
    if !(1..=13).contains(&number) {
        return Err(PyRuntimeError::new_err(format!("criteria are numbered 1 to 13, got {number}")));
    }
    let c = verify::run(number);
    Ok((c.pass, c.summary()))
}

#[pymodule]
#[pyo3(name = "frontal_lab")]
pub fn frontal_lab_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(examples, m)?)?;
    m.add_function(wrap_pyfunction!(invariants, m)?)?;
    m.add_function(wrap_pyfunction!(curvatures, m)?)?;
    m.add_function(wrap_pyfunction!(focal_verdict, m)?)?;
    m.add_function(wrap_pyfunction!(mesh_obj, m)?)?;
    m.add_function(wrap_pyfunction!(verify_criterion, m)?)?;
    Ok(())
}
