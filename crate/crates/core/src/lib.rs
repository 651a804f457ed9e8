pub mod geom;
pub mod jet;
pub mod expr;
pub mod surface;
pub mod frontal;
pub mod derived;
pub mod frame;
pub mod classify;
pub mod registry;
pub mod mesh;
pub mod verify;
