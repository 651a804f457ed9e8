//! Calls the bindings through an embedded interpreter.

use frontal_lab_py::frontal_lab_module;
use pyo3::prelude::*;
use pyo3::types::PyModule;

#[test]
fn bindings_round_trip() {
    Python::initialize();
    Python::attach(|py| -> PyResult<()> {
        let m = PyModule::new(py, "frontal_lab")?;
        frontal_lab_module(&m)?;
        let inv = m.getattr("invariants")?.call1(("paper-52", 0.0))?;
        let r_c: f64 = inv.get_item("r_c")?.extract()?;
        assert!((r_c - 72.0).abs() < 1e-8);
        let v: String = m.getattr("focal_verdict")?.call1(("paper-52", 2, 0.0))?.extract()?;
        assert_eq!(v, "Regular");
        let err = m.getattr("invariants")?.call1(("missing", 0.0)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        Ok(())
    })
    .unwrap();
}
