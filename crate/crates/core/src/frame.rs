//! Singular curves synthesized from prescribed invariants.
//!
//! The frame `(γ̂', ĥ, ν̂)` of a singular curve satisfies
//!
//! ```text
//! γ̂'' =          κ_s ĥ + κ_ν ν̂
//! ĥ'  = -κ_s γ̂'        + κ_t ν̂
//! ν̂'  = -κ_ν γ̂' - κ_t ĥ
//! ```
//!
//! so any triple of functions of arc length defines a curve and its normal
//! ruled surface without a surface expression. [`FrameCurve`] integrates
//! the system with RK4 and re-orthonormalizes after every step;
//! [`FrameSeries`] expands it as a power series for exact derivatives.

use serde::Serialize;

use crate::expr::{parse_with_vars, Expr, Var};
use crate::frontal::{AxisFrame, FrontalError, InvariantSample, Result, SingularCurve};
use crate::geom::Vec3;
use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameState {
    pub point: Vec3,
    pub tangent: Vec3,
    pub h: Vec3,
    pub nu: Vec3,
}

impl FrameState {
    pub fn standard() -> Self {
        Self {
            point: Vec3::ZERO,
            tangent: Vec3::new(1.0, 0.0, 0.0),
            h: Vec3::new(0.0, 1.0, 0.0),
            nu: Vec3::new(0.0, 0.0, 1.0),
        }
    }

    fn axpy(&self, s: f64, d: &FrameState) -> FrameState {
        FrameState {
            point: self.point + d.point * s,
            tangent: self.tangent + d.tangent * s,
            h: self.h + d.h * s,
            nu: self.nu + d.nu * s,
        }
    }

    /// Gram-Schmidt on `(γ̂', ĥ)`, then `ν̂ = γ̂' × ĥ`.
    fn reorthonormalize(mut self) -> FrameState {
        self.tangent = self.tangent.normalized();
        self.h = (self.h - self.tangent * self.h.dot(self.tangent)).normalized();
        self.nu = self.tangent.cross(self.h);
        self
    }

    pub fn orthonormality_defect(&self) -> f64 {
        let (t, h, n) = (self.tangent, self.h, self.nu);
        [
            t.dot(t) - 1.0,
            h.dot(h) - 1.0,
            n.dot(n) - 1.0,
            t.dot(h),
            t.dot(n),
            h.dot(n),
        ]
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
    }
}

/// A curve defined by `κ_s(u), κ_ν(u), κ_t(u)` in arc length `u`.
#[derive(Debug, Clone)]
pub struct FrameCurve {
    pub kappa_s: Expr,
    pub kappa_nu: Expr,
    pub kappa_t: Expr,
    pub range: (f64, f64),
    pub seed_u: f64,
    pub step: f64,
    nodes: Vec<FrameState>,
    first_node: f64,
}

fn parse_u(text: &str) -> Result<Expr> {
    parse_with_vars(text, &[Var::U])
        .map_err(|e| FrontalError::Precondition(format!("cannot parse `{text}`: {e}")))
}

impl FrameCurve {
    /// Integrates from the standard frame at `u = 0` (or the nearest end
    /// of the range) with step `step`.
    pub fn new(kappa_s: &str, kappa_nu: &str, kappa_t: &str, range: (f64, f64), step: f64) -> Result<Self> {
        let seed_u = 0f64.clamp(range.0, range.1);
        Self::with_seed(
            [parse_u(kappa_s)?, parse_u(kappa_nu)?, parse_u(kappa_t)?],
            range,
            seed_u,
            FrameState::standard(),
            step,
        )
    }

    pub fn with_seed(
        invariants: [Expr; 3],
        range: (f64, f64),
        seed_u: f64,
        seed: FrameState,
        step: f64,
    ) -> Result<Self> {
        if !(range.0 < range.1) || !(step > 0.0) || !(range.0..=range.1).contains(&seed_u) {
            return Err(FrontalError::Precondition(format!(
                "bad frame synthesis window {range:?}, seed {seed_u}, step {step}"
            )));
        }
        let [kappa_s, kappa_nu, kappa_t] = invariants;
        let mut curve = Self {
            kappa_s,
            kappa_nu,
            kappa_t,
            range,
            seed_u,
            step,
            nodes: Vec::new(),
            first_node: seed_u,
        };
        let back = ((seed_u - range.0) / step).ceil() as usize + 1;
        let fwd = ((range.1 - seed_u) / step).ceil() as usize + 1;
        let seed = seed.reorthonormalize();
        let mut backward = vec![seed];
        for k in 0..back {
            let u = seed_u - k as f64 * step;
            backward.push(curve.rk4(u, &backward[k], -step)?);
        }
        let mut nodes: Vec<FrameState> = backward.into_iter().rev().collect();
        for k in 0..fwd {
            let u = seed_u + k as f64 * step;
            let next = curve.rk4(u, nodes.last().expect("seeded"), step)?;
            nodes.push(next);
        }
        curve.first_node = seed_u - back as f64 * step;
        curve.nodes = nodes;
        Ok(curve)
    }

    fn coefficients(&self, u: f64) -> Result<[f64; 3]> {
        let ev = |e: &Expr| e.eval_f64(u, 0.0).map_err(FrontalError::from);
        Ok([ev(&self.kappa_s)?, ev(&self.kappa_nu)?, ev(&self.kappa_t)?])
    }

    fn rhs(&self, u: f64, s: &FrameState) -> Result<FrameState> {
        let [ks, kn, kt] = self.coefficients(u)?;
        Ok(FrameState {
            point: s.tangent,
            tangent: s.h * ks + s.nu * kn,
            h: s.tangent * (-ks) + s.nu * kt,
            nu: s.tangent * (-kn) - s.h * kt,
        })
    }

    fn rk4(&self, u: f64, s: &FrameState, h: f64) -> Result<FrameState> {
        let k1 = self.rhs(u, s)?;
        let k2 = self.rhs(u + 0.5 * h, &s.axpy(0.5 * h, &k1))?;
        let k3 = self.rhs(u + 0.5 * h, &s.axpy(0.5 * h, &k2))?;
        let k4 = self.rhs(u + h, &s.axpy(h, &k3))?;
        let next = s
            .axpy(h / 6.0, &k1)
            .axpy(h / 3.0, &k2)
            .axpy(h / 3.0, &k3)
            .axpy(h / 6.0, &k4);
        let next = next.reorthonormalize();
        if next.orthonormality_defect() > 1e-10 || !next.point.is_finite() {
            return Err(FrontalError::Precondition(format!(
                "frame integration failed near u = {u} with step {h}"
            )));
        }
        Ok(next)
    }

    /// Frame at `u`: one RK4 step from the nearest grid node.
    pub fn state(&self, u: f64) -> Result<FrameState> {
        let k = ((u - self.first_node) / self.step).round();
        let k = (k.max(0.0) as usize).min(self.nodes.len() - 1);
        let node_u = self.first_node + k as f64 * self.step;
        let dh = u - node_u;
        if dh == 0.0 {
            return Ok(self.nodes[k]);
        }
        self.rk4(node_u, &self.nodes[k], dh)
    }

    /// The integrated frame on the grid `(u, state)`.
    pub fn samples(&self) -> Vec<(f64, FrameState)> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(k, s)| (self.first_node + k as f64 * self.step, *s))
            .filter(|(u, _)| *u >= self.range.0 - 1e-12 && *u <= self.range.1 + 1e-12)
            .collect()
    }

    /// `(κ_s, κ_ν, κ_t)` read back from the integrated frame by central
    /// differences with step `h`.
    pub fn recovered_invariants(&self, u: f64, h: f64) -> Result<[f64; 3]> {
        let s = [
            self.state(u - 2.0 * h)?,
            self.state(u - h)?,
            self.state(u + h)?,
            self.state(u + 2.0 * h)?,
        ];
        let d = |f: fn(&FrameState) -> Vec3| {
            (f(&s[0]) - f(&s[3]) + (f(&s[2]) - f(&s[1])) * 8.0) / (12.0 * h)
        };
        let dt = d(|x| x.tangent);
        let dh = d(|x| x.h);
        let c = self.state(u)?;
        Ok([dt.dot(c.h), dt.dot(c.nu), dh.dot(c.nu)])
    }

    /// Power series of the frame at `u0` up to degree `degree`.
    pub fn series(&self, u0: f64, degree: usize) -> Result<FrameSeries> {
        let coeff = |e: &Expr| -> Result<Vec<f64>> {
            let j = e.eval_jet((u0, 0.0), degree)?;
            Ok((0..=degree).map(|k| j.coeff(k, 0)).collect())
        };
        let ks = coeff(&self.kappa_s)?;
        let kn = coeff(&self.kappa_nu)?;
        let kt = coeff(&self.kappa_t)?;
        Ok(FrameSeries::solve(u0, self.state(u0)?, &ks, &kn, &kt, degree))
    }
}

impl SingularCurve for FrameCurve {
    fn curve_range(&self) -> (f64, f64) {
        self.range
    }

    /// Prescribed values; `κ_c`, `r_b` and `r_c` are not defined by the frame
    /// alone and are reported as zero.
    fn invariants(&self, u: f64) -> Result<InvariantSample> {
        let [kappa_s, kappa_nu, kappa_t] = self.coefficients(u)?;
        Ok(InvariantSample {
            u,
            kappa_s,
            kappa_nu,
            kappa_t,
            kappa_c: 0.0,
            r_b: 0.0,
            r_c: 0.0,
            residual: 0.0,
        })
    }

    fn speed(&self, _u: f64) -> Result<[f64; 3]> {
        Ok([1.0, 0.0, 0.0])
    }

    fn frame(&self, u: f64) -> Result<AxisFrame> {
        let s = self.state(u)?;
        Ok(AxisFrame {
            point: s.point,
            tangent: s.tangent,
            h: s.h,
            nu: s.nu,
        })
    }
}

/// Taylor coefficients (in `u - u0`) of the frame and the curve.
#[derive(Debug, Clone)]
pub struct FrameSeries {
    pub u0: f64,
    pub point: Vec<Vec3>,
    pub tangent: Vec<Vec3>,
    pub h: Vec<Vec3>,
    pub nu: Vec<Vec3>,
}

impl FrameSeries {
    /// Solves the frame system term by term from the coefficient series.
    pub fn solve(u0: f64, seed: FrameState, ks: &[f64], kn: &[f64], kt: &[f64], degree: usize) -> Self {
        let mut t = vec![seed.tangent];
        let mut h = vec![seed.h];
        let mut n = vec![seed.nu];
        for k in 0..degree {
            let mut dt = Vec3::ZERO;
            let mut dh = Vec3::ZERO;
            let mut dn = Vec3::ZERO;
            for i in 0..=k {
                let j = k - i;
                dt += h[j] * ks[i] + n[j] * kn[i];
                dh += t[j] * (-ks[i]) + n[j] * kt[i];
                dn += t[j] * (-kn[i]) - h[j] * kt[i];
            }
            let s = 1.0 / (k + 1) as f64;
            t.push(dt * s);
            h.push(dh * s);
            n.push(dn * s);
        }
        let mut point = vec![seed.point];
        for k in 0..degree {
            point.push(t[k] / (k + 1) as f64);
        }
        Self {
            u0,
            point,
            tangent: t,
            h,
            nu: n,
        }
    }

    pub fn degree(&self) -> usize {
        self.tangent.len() - 1
    }

    /// Component `c` of a vector series as a jet in `(u - u0, w - w0)`.
    fn jet(coeffs: &[Vec3], c: usize, w0: f64, order: usize) -> Jet2 {
        Jet2::from_fn((0.0, w0), order, |i, j| {
            if j == 0 && i < coeffs.len() {
                coeffs[i][c]
            } else {
                0.0
            }
        })
    }

    pub fn vector_jet(coeffs: &[Vec3], w0: f64, order: usize) -> crate::jet::JetVec3 {
        crate::jet::JetVec3::new(
            Self::jet(coeffs, 0, w0, order),
            Self::jet(coeffs, 1, w0, order),
            Self::jet(coeffs, 2, w0, order),
        )
        .expect("same shape")
    }

    /// `γ̂ + w ν̂` as a jet in `(u - u0, w)` at `w = w0`.
    pub fn ruled_jet(&self, w0: f64) -> crate::jet::JetVec3 {
        let order = self.degree();
        let gamma = Self::vector_jet(&self.point, w0, order);
        let nu = Self::vector_jet(&self.nu, w0, order);
        let w = Jet2::lift(crate::jet::Coord::V, (0.0, w0), order);
        gamma.add(&nu.mul_scalar(&w))
    }
}
