//! Built-in surfaces, surface files and OBJ output.

use std::path::Path;

use frontal_lab::derived::SurfaceTag;
use frontal_lab::frontal::Frontal;
use frontal_lab::mesh::{lin, read_obj_counts, surface_mesh, to_obj, MeshOptions};
use frontal_lab::registry::{self, EXAMPLES};
use frontal_lab::surface::SurfaceDef;
use frontal_lab::verify::helicoid_c1_closed_form;

fn surf(name: &str) -> SurfaceDef {
    SurfaceDef::from_file(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../surfaces").join(name)).unwrap()
}

#[test]
fn built_in_charts_are_valid() {
    let mut names = registry::names();
    for e in EXAMPLES {
        Frontal::new(e.surface()).validate_chart(11).unwrap();
    }
    names.sort();
    names.dedup();
    assert_eq!(names.len(), EXAMPLES.len());
    assert!(registry::find("helicoid").is_some() && registry::find("nope").is_none());
}

#[test]
fn surface_files_match_the_built_ins() {
    let file = Frontal::new(surf("paper-52.surf"));
    let built = Frontal::new(registry::find("paper-52").unwrap().surface());
    assert_eq!(file.def.sources, built.def.sources);

    // Original chart (t = u - 1) against the log chart (t = log u); the
    // invariants are parametrization independent.
    let file = Frontal::new(surf("helicoid.surf"));
    let built = Frontal::new(registry::find("helicoid").unwrap().surface());
    for s in [-1.0, 0.0, 0.7] {
        let a = file.invariants_at(s).unwrap().values();
        let b = built.invariants_at(s).unwrap().values();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-9, "{a:?} vs {b:?}");
        }
    }
}

#[test]
fn obj_round_trip() {
    let fr = Frontal::new(registry::find("paper-52").unwrap().surface());
    let opts = MeshOptions::default();
    let meshes: Vec<_> = [SurfaceTag::F, SurfaceTag::Nr, SurfaceTag::C1, SurfaceTag::C2]
        .into_iter()
        .map(|t| surface_mesh(&fr, t, &opts).unwrap())
        .collect();
    assert_eq!(meshes[0].vertices.len(), 81 * 81);
    assert_eq!(meshes[0].faces.len(), 2 * 80 * 80);
    assert_eq!(meshes[0].lines.len(), 1);
    let counts = read_obj_counts(&to_obj(&meshes)).unwrap();
    assert_eq!(counts.objects, 4);
    assert_eq!(counts.vertices, meshes.iter().map(|m| m.vertices.len()).sum::<usize>());
    assert_eq!(counts.faces, meshes.iter().map(|m| m.faces.len()).sum::<usize>());
    assert_eq!(counts.lines, meshes.iter().map(|m| m.lines.len()).sum::<usize>());
}

#[test]
fn obj_reader_rejects_bad_indices() {
    assert!(read_obj_counts("v 0 0 0\nf 1 2 1\n").is_err());
    assert!(read_obj_counts("v 0 0\n").is_err());
}

#[test]
fn helicoid_focal_mesh_matches_the_closed_form() {
    let fr = Frontal::new(registry::find("helicoid").unwrap().surface());
    let opts = MeshOptions {
        nu: 21,
        nv: 21,
        ..MeshOptions::default()
    };
    let mesh = surface_mesh(&fr, SurfaceTag::C1, &opts).unwrap();
    let (sr, tr) = (fr.def.s_range(), fr.def.t_range());
    for i in 0..opts.nu {
        for j in 0..opts.nv {
            let k = mesh.grid[i * opts.nv + j].unwrap();
            let (s, t) = (lin(sr.0, sr.1, opts.nu, i), lin(tr.0, tr.1, opts.nv, j));
            let want = helicoid_c1_closed_form(t.exp(), s);
            assert!((mesh.vertices[k] - want).max_abs() < 1e-9);
        }
    }
}

#[test]
fn masked_focal_surface_leaves_holes() {
    let fr = Frontal::new(registry::find("fold").unwrap().surface());
    let opts = MeshOptions {
        nu: 5,
        nv: 5,
        ..MeshOptions::default()
    };
    let mesh = surface_mesh(&fr, SurfaceTag::C1, &opts).unwrap();
    assert_eq!(mesh.holes, 16);
    assert!(mesh.faces.is_empty());
}
