//! Surface definitions: three component expressions plus chart metadata.
//!
//! Users write `f(u, v)` in whatever chart is natural and declare which
//! parameter is transverse to the singular curve and at which level the
//! curve sits. Internally every surface is evaluated in a chart `(s, t)`
//! with the singular curve on `t = 0` and `∂_t` the transverse direction.

use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse_expression, Bindings, EvalError, Expr, ParseError, Var};
use crate::geom::Vec3;
use crate::jet::{Coord, Jet2, JetVec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Param {
    U,
    V,
}

#[derive(Debug, Error)]
pub enum SurfaceError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed surface file: {0}")]
    Syntax(String),
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
    #[error("bad value for `{key}`: {message}")]
    BadValue { key: &'static str, message: String },
    #[error("cannot parse expression for `{key}`: {source}")]
    Expr {
        key: &'static str,
        #[source]
        source: ParseError,
    },
}

#[derive(Debug, Clone)]
pub struct SurfaceDef {
    pub name: String,
    pub components: [Expr; 3],
    pub sources: [String; 3],
    pub transverse: Param,
    pub singular_value: f64,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

const COMPONENT_KEYS: [&str; 3] = ["x", "y", "z"];

impl SurfaceDef {
    pub fn new(
        name: &str,
        components: [&str; 3],
        transverse: Param,
        singular_value: f64,
        u_range: (f64, f64),
        v_range: (f64, f64),
    ) -> Result<Self, SurfaceError> {
        let mut parsed = Vec::with_capacity(3);
        for (key, text) in COMPONENT_KEYS.iter().zip(components) {
            parsed.push(
                parse_expression(text).map_err(|source| SurfaceError::Expr { key, source })?,
            );
        }
        for (key, range) in [("u_range", u_range), ("v_range", v_range)] {
            if !(range.0 < range.1 && range.0.is_finite() && range.1.is_finite()) {
                return Err(SurfaceError::BadValue {
                    key,
                    message: format!("empty or non-finite interval [{}, {}]", range.0, range.1),
                });
            }
        }
        if !singular_value.is_finite() {
            return Err(SurfaceError::BadValue {
                key: "singular_value",
                message: "not finite".into(),
            });
        }
        Ok(Self {
            name: name.to_string(),
            components: parsed.try_into().expect("three components"),
            sources: components.map(str::to_string),
            transverse,
            singular_value,
            u_range,
            v_range,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, SurfaceError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| SurfaceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    /// Parses the keyed `key = value` surface format.
    pub fn from_toml_str(text: &str) -> Result<Self, SurfaceError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| SurfaceError::Syntax(e.message().to_string()))?;
        let string = |key: &'static str| -> Result<&str, SurfaceError> {
            match table.get(key) {
                None => Err(SurfaceError::MissingKey(key)),
                Some(toml::Value::String(s)) => Ok(s.as_str()),
                Some(other) => Err(SurfaceError::BadValue {
                    key,
                    message: format!("expected a quoted string, found {}", other.type_str()),
                }),
            }
        };
        let number = |key: &'static str, v: &toml::Value| -> Result<f64, SurfaceError> {
            match v {
                toml::Value::Float(x) => Ok(*x),
                toml::Value::Integer(n) => Ok(*n as f64),
                other => Err(SurfaceError::BadValue {
                    key,
                    message: format!("expected a number, found {}", other.type_str()),
                }),
            }
        };
        let interval = |key: &'static str| -> Result<(f64, f64), SurfaceError> {
            match table.get(key) {
                None => Err(SurfaceError::MissingKey(key)),
                Some(toml::Value::Array(a)) if a.len() == 2 => {
                    Ok((number(key, &a[0])?, number(key, &a[1])?))
                }
                Some(_) => Err(SurfaceError::BadValue {
                    key,
                    message: "expected an interval [lo, hi]".into(),
                }),
            }
        };

        let name = string("name")?;
        let x = string("x")?;
        let y = string("y")?;
        let z = string("z")?;
        let transverse = match string("transverse_param")? {
            "u" => Param::U,
            "v" => Param::V,
            other => {
                return Err(SurfaceError::BadValue {
                    key: "transverse_param",
                    message: format!("expected \"u\" or \"v\", found \"{other}\""),
                })
            }
        };
        let singular_value = number(
            "singular_value",
            table
                .get("singular_value")
                .ok_or(SurfaceError::MissingKey("singular_value"))?,
        )?;
        let u_range = interval("u_range")?;
        let v_range = interval("v_range")?;
        Self::new(name, [x, y, z], transverse, singular_value, u_range, v_range)
    }

    /// Serializes back to the keyed file format.
    pub fn to_file_string(&self) -> String {
        let param = match self.transverse {
            Param::U => "u",
            Param::V => "v",
        };
        format!(
            "name = {:?}\nx = {:?}\ny = {:?}\nz = {:?}\ntransverse_param = \"{param}\"\n\
             singular_value = {:?}\nu_range = [{:?}, {:?}]\nv_range = [{:?}, {:?}]\n",
            self.name,
            self.sources[0],
            self.sources[1],
            self.sources[2],
            self.singular_value,
            self.u_range.0,
            self.u_range.1,
            self.v_range.0,
            self.v_range.1,
        )
    }

    /// User coordinates of the internal point `(s, t)`.
    pub fn to_user(&self, s: f64, t: f64) -> (f64, f64) {
        match self.transverse {
            Param::V => (s, t + self.singular_value),
            Param::U => (t + self.singular_value, s),
        }
    }

    /// Internal coordinates of the user point `(u, v)`.
    pub fn to_internal(&self, u: f64, v: f64) -> (f64, f64) {
        match self.transverse {
            Param::V => (u, v - self.singular_value),
            Param::U => (v, u - self.singular_value),
        }
    }

    /// Range of the internal parameter along the singular curve.
    pub fn s_range(&self) -> (f64, f64) {
        match self.transverse {
            Param::V => self.u_range,
            Param::U => self.v_range,
        }
    }

    /// Range of the internal transverse parameter (singular level at 0).
    pub fn t_range(&self) -> (f64, f64) {
        let (lo, hi) = match self.transverse {
            Param::V => self.v_range,
            Param::U => self.u_range,
        };
        (lo - self.singular_value, hi - self.singular_value)
    }

    /// `f` at the internal point `(s, t)`.
    pub fn eval(&self, s: f64, t: f64) -> Result<Vec3, EvalError> {
        let (u, v) = self.to_user(s, t);
        let b = Bindings::uv(u, v);
        Ok(Vec3([
            self.components[0].eval(&b)?,
            self.components[1].eval(&b)?,
            self.components[2].eval(&b)?,
        ]))
    }

    /// Jets of `f` in the internal chart at `(s, t)`.
    pub fn jet(&self, s: f64, t: f64, order: usize) -> Result<JetVec3, EvalError> {
        let base = (s, t);
        let ls = Jet2::lift(Coord::U, base, order);
        let lt = Jet2::lift(Coord::V, base, order);
        let (ju, jv) = match self.transverse {
            Param::V => (ls, lt.add_scalar(self.singular_value)),
            Param::U => (lt.add_scalar(self.singular_value), ls),
        };
        let b = Bindings::new((base, order))
            .with(Var::U, ju)
            .with(Var::V, jv);
        let c = [
            self.components[0].eval(&b)?,
            self.components[1].eval(&b)?,
            self.components[2].eval(&b)?,
        ];
        let [x, y, z] = c;
        Ok(JetVec3::new(x, y, z).expect("jets share base and order"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_52: &str = r#"
name = "paper-52-example"
x = "u"
y = "u^2 + v^2/2"
z = "u*v^2 + v^5/5"
transverse_param = "v"
singular_value = 0.0
u_range = [-0.5, 0.5]
v_range = [-0.5, 0.5]
"#;

    #[test]
    fn parses_the_keyed_format() {
        let s = SurfaceDef::from_toml_str(PAPER_52).unwrap();
        assert_eq!(s.name, "paper-52-example");
        assert_eq!(s.components[2].to_string(), "u*v^2 + v^5/5");
        assert_eq!(s.transverse, Param::V);
        assert_eq!(s.singular_value, 0.0);
        assert_eq!(s.u_range, (-0.5, 0.5));
        let again = SurfaceDef::from_toml_str(&s.to_file_string()).unwrap();
        assert_eq!(again.components, s.components);
    }

    #[test]
    fn swapped_chart_is_translated() {
        let text = r#"
# original helicoid chart
name = "helicoid"
x = "-cosh(log(u))*sin(v)"
y = "cosh(log(u))*cos(v)"
z = "v"
transverse_param = "u"
singular_value = 1
u_range = [0.5, 2]
v_range = [-1, 1]
"#;
        let s = SurfaceDef::from_toml_str(text).unwrap();
        assert_eq!(s.to_user(0.3, 0.0), (1.0, 0.3));
        assert_eq!(s.t_range(), (-0.5, 1.0));
        assert_eq!(s.s_range(), (-1.0, 1.0));
        let p = s.eval(0.3, 0.0).unwrap();
        assert!((p[2] - 0.3).abs() < 1e-15);
        let j = s.jet(0.3, 0.0, 3).unwrap();
        // ∂_s of the user v is the z-component derivative.
        assert_eq!(j.partial(1, 0).unwrap()[2], 1.0);
        assert_eq!(j.partial(0, 1).unwrap()[2], 0.0);
    }

    #[test]
    fn missing_key_is_named() {
        let text = PAPER_52.replace("z = \"u*v^2 + v^5/5\"\n", "");
        let err = SurfaceDef::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, SurfaceError::MissingKey("z")));
        assert_eq!(err.to_string(), "missing key `z`");
    }

    #[test]
    fn malformed_inputs() {
        let bad_num = PAPER_52.replace("singular_value = 0.0", "singular_value = \"zero\"");
        assert!(matches!(
            SurfaceDef::from_toml_str(&bad_num),
            Err(SurfaceError::BadValue { key: "singular_value", .. })
        ));
        let bad_expr = PAPER_52.replace("x = \"u\"", "x = \"u +\"");
        assert!(matches!(
            SurfaceDef::from_toml_str(&bad_expr),
            Err(SurfaceError::Expr { key: "x", .. })
        ));
        let bad_syntax = PAPER_52.replace("v_range = [-0.5, 0.5]", "v_range = [-0.5, ");
        assert!(matches!(
            SurfaceDef::from_toml_str(&bad_syntax),
            Err(SurfaceError::Syntax(_))
        ));
    }
}
