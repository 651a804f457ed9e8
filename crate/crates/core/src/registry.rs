//! Built-in surfaces: the two worked examples and the standard germs.

use crate::surface::{Param, SurfaceDef};

#[derive(Debug, Clone, Copy)]
pub struct Example {
    pub name: &'static str,
    pub description: &'static str,
    pub components: [&'static str; 3],
    pub transverse: Param,
    pub singular_value: f64,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

impl Example {
    pub fn surface(&self) -> SurfaceDef {
        SurfaceDef::new(
            self.name,
            self.components,
            self.transverse,
            self.singular_value,
            self.u_range,
            self.v_range,
        )
        .expect("built-in surfaces parse")
    }
}

const GERM_RANGE: (f64, f64) = (-0.5, 0.5);

const fn germ(name: &'static str, description: &'static str, z: &'static str) -> Example {
    Example {
        name,
        description,
        components: ["u", "v^2", z],
        transverse: Param::V,
        singular_value: 0.0,
        u_range: GERM_RANGE,
        v_range: GERM_RANGE,
    }
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "paper-52",
        description: "5/2-cuspidal edge (u, u^2 + v^2/2, uv^2 + v^5/5)",
        components: ["u", "u^2 + v^2/2", "u*v^2 + v^5/5"],
        transverse: Param::V,
        singular_value: 0.0,
        u_range: (-0.5, 0.5),
        v_range: (-0.5, 0.5),
    },
    Example {
        name: "helicoid",
        description: "maximal helicoid with fold singularities, log chart u = log(u_orig)",
        components: ["-cosh(u)*sin(v)", "cosh(u)*cos(v)", "v"],
        transverse: Param::U,
        singular_value: 0.0,
        u_range: (-1.0, 1.0),
        v_range: (-1.5, 1.5),
    },
    Example {
        name: "ridge-fold",
        description: "(u, u^2 + v^2/2, uv^2): focal singular set along a first-order ridge",
        components: ["u", "u^2 + v^2/2", "u*v^2"],
        transverse: Param::V,
        singular_value: 0.0,
        u_range: (-0.5, 0.5),
        v_range: (-0.5, 0.5),
    },
    germ("cuspidal-edge", "cuspidal edge germ (u, v^2, v^3)", "v^3"),
    germ("ccr", "cuspidal cross cap germ (u, v^2, uv^3)", "u*v^3"),
    germ("s1-plus", "cuspidal S1+ germ (u, v^2, v^3(u^2 + v^2))", "v^3*(u^2 + v^2)"),
    germ("s1-minus", "cuspidal S1- germ (u, v^2, v^3(u^2 - v^2))", "v^3*(u^2 - v^2)"),
    germ("52-germ", "5/2-cuspidal edge germ (u, v^2, v^5)", "v^5"),
    germ("fold", "fold germ (u, v^2, 0)", "0"),
    germ("72-ccr", "7/2-cuspidal cross cap germ (u, v^2, uv^5)", "u*v^5"),
];

pub fn find(name: &str) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.name == name)
}

pub fn names() -> Vec<&'static str> {
    EXAMPLES.iter().map(|e| e.name).collect()
}
