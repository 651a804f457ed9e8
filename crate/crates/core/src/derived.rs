//! Surfaces built from a frontal: the normal congruence `f + wν`, the
//! normal ruled surface `γ̂ + wν̂` along the singular curve, and the focal
//! surfaces `C_j = f + ρ_j ν` with `ρ_j = 1/κ_j`.

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::frontal::{
    dot, Frontal, FrontalError, FrontalPoint, InvariantDerivatives, InvariantSample, LocalJets,
    Result, SingularCurve,
};
use crate::geom::{det3, Vec3};
use crate::jet::{Coord, Jet2, JetVec3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceTag {
    F,
    Nr,
    C1,
    C2,
}

impl SurfaceTag {
    pub fn focal(j: usize) -> Self {
        if j == 1 {
            SurfaceTag::C1
        } else {
            SurfaceTag::C2
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SurfaceTag::F => "f",
            SurfaceTag::Nr => "nr",
            SurfaceTag::C1 => "c1",
            SurfaceTag::C2 => "c2",
        }
    }
}

fn check_j(j: usize) -> Result<()> {
    if j == 1 || j == 2 {
        Ok(())
    } else {
        Err(FrontalError::Precondition(format!("focal index must be 1 or 2, got {j}")))
    }
}

// ---------------------------------------------------------------------------
// Normal congruence

#[derive(Debug, Clone, Serialize)]
pub struct CongruencePoint {
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub point: Vec3,
    pub jacobian: f64,
    pub factor1: f64,
    pub factor2: f64,
    pub lambda: f64,
    /// `|det J - (1-wκ₁)(1-wκ₂)λ|` over the Hadamard bound of `J`.
    pub relative_residual: f64,
}

/// Both sides of `det J = (1-wκ₁)(1-wκ₂)λ` at each sample.
pub fn congruence_check(fr: &Frontal, samples: &[(f64, f64, f64)]) -> Result<Vec<CongruencePoint>> {
    samples
        .par_iter()
        .map(|&(u, v, w)| {
            let jets = fr.local_jets(u, v, fr.settings.order, true)?;
            let p = FrontalPoint::from_jets(&jets, &fr.settings)?;
            let nu = jets.nu.value();
            let cu = jets.fu.value() + jets.nu_u.value() * w;
            let cv = jets.fv.value() + jets.nu_v.value() * w;
            let jacobian = det3(cu, cv, nu);
            let factor1 = 1.0 - w * p.kappa1;
            let factor2 = 1.0 - w * p.kappa2;
            let rhs = factor1 * factor2 * p.lambda;
            let bound = (cu.norm() * cv.norm()).max(f64::MIN_POSITIVE);
            Ok(CongruencePoint {
                u,
                v,
                w,
                point: p.f + nu * w,
                jacobian,
                factor1,
                factor2,
                lambda: p.lambda,
                relative_residual: (jacobian - rhs).abs() / bound.max(1e-300),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Normal ruled surface

#[derive(Debug, Clone, Serialize)]
pub struct RuledPoint {
    pub u: f64,
    pub w: f64,
    pub point: Vec3,
    /// Derivative along the curve per unit arc length.
    pub nr_u: Vec3,
    pub nr_w: Vec3,
    pub singular: bool,
}

/// Threshold on `|NR_u × NR_w|` below which a ruled point is singular.
pub const NR_SINGULAR_TOL: f64 = 1e-8;

pub fn nr_eval(curve: &dyn SingularCurve, u: f64, w: f64) -> Result<RuledPoint> {
    let frame = curve.frame(u)?;
    let inv = curve.invariants(u)?;
    let nr_u = frame.tangent * (1.0 - w * inv.kappa_nu) - frame.h * (w * inv.kappa_t);
    Ok(RuledPoint {
        u,
        w,
        point: frame.point + frame.nu * w,
        nr_u,
        nr_w: frame.nu,
        singular: nr_u.cross(frame.nu).norm() < NR_SINGULAR_TOL * (1.0 + w.abs()),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    FirstKind,
    SecondKind,
    Undetermined,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularCurveTrace {
    pub surface: SurfaceTag,
    pub params: Vec<(f64, f64)>,
    pub points: Vec<Vec3>,
    pub kinds: Vec<PointKind>,
    /// Curve parameters where the singular point runs off to infinity.
    pub at_infinity: Vec<f64>,
}

impl SingularCurveTrace {
    fn empty(surface: SurfaceTag) -> Self {
        Self {
            surface,
            params: Vec::new(),
            points: Vec::new(),
            kinds: Vec::new(),
            at_infinity: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Smallest parameter-space distance from `p` to a traced point.
    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        self.params
            .iter()
            .map(|q| ((q.0 - p.0).powi(2) + (q.1 - p.1).powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Bisection on a sign change of `g` in `[a, b]`.
pub fn bisect(g: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let mut ga = g(a)?;
    if ga == 0.0 {
        return Ok(a);
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m)?;
        if gm == 0.0 {
            return Ok(m);
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section minimization of `g` on `[a, b]`.
fn golden_min(g: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c)?, g(d)?);
    while (b - a).abs() > tol {
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c)?;
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Options for the sign-scan tracers.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TraceOptions {
    pub cells: usize,
    pub tol: f64,
    /// Absolute threshold on `|κ_t|` and similar "vanishes" decisions.
    pub zero: f64,
    /// Angle (radians) below which a trace tangent is parallel to the null direction.
    pub angle_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            cells: 200,
            tol: 1e-12,
            zero: 1e-8,
            angle_tol: 1e-4,
        }
    }
}

/// Singular points of the normal ruled surface: `κ_t = 0`, `w = 1/κ_ν`.
pub fn nr_singular_points(curve: &dyn SingularCurve, opts: TraceOptions) -> Result<SingularCurveTrace> {
    let (lo, hi) = curve.curve_range();
    let grid = linspace(lo, hi, opts.cells + 1);
    let samples: Vec<InvariantSample> = grid
        .par_iter()
        .map(|&u| curve.invariants(u))
        .collect::<Result<_>>()?;
    if let Some(s) = samples
        .iter()
        .find(|s| s.kappa_nu.abs() < opts.zero && s.kappa_t.abs() < opts.zero)
    {
        return Err(FrontalError::Precondition(format!(
            "normal ruled surface is cylindrical at u = {}: κ_ν = κ_t = 0",
            s.u
        )));
    }
    let kt = |u: f64| curve.invariants(u).map(|s| s.kappa_t);
    let mut roots = Vec::new();
    let developable = samples.iter().all(|s| s.kappa_t.abs() < opts.zero);
    if developable {
        roots.extend(grid.iter().copied());
    } else {
        for i in 0..grid.len() {
            let a = samples[i].kappa_t;
            if a == 0.0 {
                roots.push(grid[i]);
                continue;
            }
            if i + 1 < grid.len() {
                let b = samples[i + 1].kappa_t;
                if a * b < 0.0 {
                    roots.push(bisect(&kt, grid[i], grid[i + 1], opts.tol)?);
                }
            }
            // Double roots: a local minimum of |κ_t| that touches zero.
            if i > 0 && i + 1 < grid.len() {
                let (p, q, r) = (samples[i - 1].kappa_t, a, samples[i + 1].kappa_t);
                if q.abs() < p.abs() && q.abs() <= r.abs() && p * q > 0.0 && q * r > 0.0 {
                    let abs = |u: f64| kt(u).map(f64::abs);
                    let m = golden_min(&abs, grid[i - 1], grid[i + 1], opts.tol)?;
                    if kt(m)?.abs() < opts.zero {
                        roots.push(m);
                    }
                }
            }
        }
    }
    let mut trace = SingularCurveTrace::empty(SurfaceTag::Nr);
    for u in roots {
        let inv = curve.invariants(u)?;
        if inv.kappa_nu.abs() < opts.zero {
            trace.at_infinity.push(u);
            continue;
        }
        let w = 1.0 / inv.kappa_nu;
        let frame = curve.frame(u)?;
        trace.params.push((u, w));
        trace.points.push(frame.point + frame.nu * w);
        trace.kinds.push(PointKind::Undetermined);
    }
    if developable {
        // Null direction of NR is ∂_u; the curve w = 1/κ_ν is tangent to it
        // exactly where κ_ν' vanishes.
        let n = trace.params.len();
        for i in 0..n {
            let (i0, i1) = (i.saturating_sub(1), (i + 1).min(n - 1));
            if i0 == i1 {
                continue;
            }
            let du = trace.params[i1].0 - trace.params[i0].0;
            let dw = trace.params[i1].1 - trace.params[i0].1;
            let angle = dw.atan2(du).abs();
            trace.kinds[i] = if angle.min(std::f64::consts::PI - angle) < opts.angle_tol {
                PointKind::SecondKind
            } else {
                PointKind::FirstKind
            };
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone, Serialize)]
pub struct DevelopableEvidence {
    pub developable: bool,
    pub max_abs_kappa_t: f64,
    /// Largest `|det(γ̂', ν̂, ν̂') - κ_t|` with derivatives per arc length.
    pub max_det_mismatch: f64,
    pub max_abs_det: f64,
    pub samples: usize,
}

/// `κ_t ≡ 0` along the curve, cross-checked against `det(γ̂', ν̂, ν̂')`.
pub fn nr_developable_test(curve: &dyn SingularCurve, samples: usize, tol: f64) -> Result<DevelopableEvidence> {
    let (lo, hi) = curve.curve_range();
    let span = hi - lo;
    let h = 1e-3 * span;
    let inner = linspace(lo + 2.0 * h, hi - 2.0 * h, samples.max(2));
    let rows: Vec<(f64, f64)> = inner
        .par_iter()
        .map(|&u| {
            let inv = curve.invariants(u)?;
            let fr = curve.frame(u)?;
            let nu_at = |x: f64| curve.frame(x).map(|f| f.nu);
            let d = (nu_at(u - 2.0 * h)? - nu_at(u + 2.0 * h)? + (nu_at(u + h)? - nu_at(u - h)?) * 8.0)
                / (12.0 * h);
            let sigma = curve.speed(u)?[0];
            let det = det3(fr.tangent, fr.nu, d / sigma);
            Ok((inv.kappa_t, det))
        })
        .collect::<Result<_>>()?;
    let max_abs_kappa_t = rows.iter().fold(0.0_f64, |m, r| m.max(r.0.abs()));
    let max_abs_det = rows.iter().fold(0.0_f64, |m, r| m.max(r.1.abs()));
    let max_det_mismatch = rows.iter().fold(0.0_f64, |m, r| m.max((r.0 - r.1).abs()));
    Ok(DevelopableEvidence {
        developable: max_abs_kappa_t < tol,
        max_abs_kappa_t,
        max_det_mismatch,
        max_abs_det,
        samples: rows.len(),
    })
}

/// Whether a developable normal ruled surface is a front at `u0` (`κ_s ≠ 0`).
pub fn nr_front_test(curve: &dyn SingularCurve, u0: f64, tol: f64) -> Result<bool> {
    let ev = nr_developable_test(curve, 41, tol)?;
    if !ev.developable {
        return Err(FrontalError::Precondition(format!(
            "normal ruled surface is not developable (max |κ_t| = {:e})",
            ev.max_abs_kappa_t
        )));
    }
    Ok(curve.invariants(u0)?.kappa_s.abs() > tol)
}

/// Least-squares plane through `points`: returns (normal, max distance).
pub fn plane_fit(points: &[Vec3]) -> (Vec3, f64) {
    let n = points.len().max(1) as f64;
    let c = points.iter().fold(Vec3::ZERO, |a, p| a + *p) / n;
    let mut cov = Matrix3::<f64>::zeros();
    for p in points {
        let d = *p - c;
        for i in 0..3 {
            for k in 0..3 {
                cov[(i, k)] += d[i] * d[k];
            }
        }
    }
    let eig = SymmetricEigen::new(cov);
    let i = eig.eigenvalues.imin();
    let col = eig.eigenvectors.column(i);
    let normal = Vec3::new(col[0], col[1], col[2]);
    let dist = points
        .iter()
        .fold(0.0_f64, |m, p| m.max((*p - c).dot(normal).abs()));
    (normal, dist)
}

// ---------------------------------------------------------------------------
// Focal surfaces

/// Jets of a focal surface and its companions at one point.
#[derive(Debug, Clone)]
pub struct FocalJets {
    pub j: usize,
    pub kappa: Jet2,
    pub rho: Jet2,
    pub c: JetVec3,
    pub x: JetVec3,
    pub e: JetVec3,
    pub nu: JetVec3,
    /// Components of the principal vector `V_j`.
    pub v1: Jet2,
    pub v2: Jet2,
    /// `V_j ρ_j`, the singularity detector.
    pub detector: Jet2,
}

/// Smallest admissible `|κ_j|` before the focal point counts as at infinity.
pub const FOCAL_KAPPA_TOL: f64 = 1e-8;

pub fn focal_jets_from(jets: &LocalJets, j: usize) -> Result<FocalJets> {
    check_j(j)?;
    let (u, v) = jets.base();
    let fund = jets.fundamentals()?;
    let (k1, k2) = fund.principal()?;
    let kappa = if j == 1 { k1 } else { k2 };
    if kappa.value().abs() < FOCAL_KAPPA_TOL {
        return Err(FrontalError::Degenerate {
            u,
            v,
            what: "κ_j (focal point at infinity)",
            value: kappa.value(),
        });
    }
    let k = kappa.order();
    let rho = kappa.recip()?;
    let nu = jets.nu.truncate(k);
    let c = jets.f.truncate(k).add(&nu.mul_scalar(&rho));
    let a = &fund.m.truncate(k) - &(&kappa * &fund.f.truncate(k));
    let b = &fund.l.truncate(k) - &(&kappa * &fund.e.truncate(k));
    let x = jets
        .fu
        .truncate(k)
        .mul_scalar(&-&a)
        .add(&jets.h.truncate(k).mul_scalar(&b));
    let e = x.normalized().map_err(|_| FrontalError::Degenerate {
        u,
        v,
        what: "|x_j|",
        value: x.value().norm(),
    })?;
    let vcoord = Jet2::lift(Coord::V, (u, v), k);
    let v1 = -&(&vcoord * &a);
    let v2 = b;
    let detector = &(&v1.truncate(k - 1) * &rho.du()) + &(&v2.truncate(k - 1) * &rho.dv());
    Ok(FocalJets {
        j,
        kappa,
        rho,
        c,
        x,
        e,
        nu,
        v1,
        v2,
        detector,
    })
}

impl FocalJets {
    /// `d e_j(V_j)` at the base point.
    pub fn de_v(&self) -> Vec3 {
        self.e.du().value() * self.v1.value() + self.e.dv().value() * self.v2.value()
    }

    /// Tangent `(1, g')` of the zero set of the detector, or the unit
    /// tangent when the curve is vertical in the chart.
    pub fn trace_tangent(&self) -> Option<(f64, f64)> {
        let gu = self.detector.coeff(1, 0);
        let gv = self.detector.coeff(0, 1);
        let n = gu.hypot(gv);
        if n < 1e-300 {
            return None;
        }
        if gv.abs() > 1e-3 * n {
            Some((1.0, -gu / gv))
        } else {
            let s = if gv < 0.0 { -1.0 } else { 1.0 };
            Some((-gv * s / n, gu * s / n))
        }
    }

    /// `ψ_{C_j} = det(β̂', ê_j, de_j(V_j))` at a point of the trace.
    pub fn psi(&self) -> Option<f64> {
        let (a, b) = self.trace_tangent()?;
        let beta = self.c.du().value() * a + self.c.dv().value() * b;
        Some(det3(beta, self.e.value(), self.de_v()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FocalPoint {
    pub j: usize,
    pub u: f64,
    pub v: f64,
    pub c: Vec3,
    pub e: Vec3,
    pub rho: f64,
    pub first: [f64; 3],
    pub second: [f64; 3],
    pub gauss: Option<f64>,
    pub mean: Option<f64>,
    pub vj_rhoj: f64,
    /// `max(|⟨x_j, C_u⟩|, |⟨x_j, C_v⟩|)` relative to `|x_j| max(|C_u|, |C_v|, 1)`.
    pub normal_residual: f64,
    /// `|dC_j(V_j) - (V_jρ_j) ν|` relative to `|V_j| max(|C_u|, |C_v|, 1)`.
    pub null_residual: f64,
}

impl FocalPoint {
    pub fn from_jets(fj: &FocalJets) -> Self {
        let (u, v) = fj.c.base();
        let cu_j = fj.c.du();
        let cv_j = fj.c.dv();
        let cu = cu_j.value();
        let cv = cv_j.value();
        let cuu = cu_j.du().value();
        let cuv = cu_j.dv().value();
        let cvv = cv_j.dv().value();
        let e = fj.e.value();
        let first = [cu.dot(cu), cu.dot(cv), cv.dot(cv)];
        let second = [cuu.dot(e), cuv.dot(e), cvv.dot(e)];
        let det = first[0] * first[2] - first[1] * first[1];
        let regular = det > 1e-10 * (first[0] * first[2]).max(1e-300);
        let (gauss, mean) = if regular {
            (
                Some((second[0] * second[2] - second[1] * second[1]) / det),
                Some(
                    (first[0] * second[2] - 2.0 * first[1] * second[1] + first[2] * second[0])
                        / (2.0 * det),
                ),
            )
        } else {
            (None, None)
        };
        let x = fj.x.value();
        let cscale = cu.norm().max(cv.norm()).max(1.0);
        let normal_residual =
            x.dot(cu).abs().max(x.dot(cv).abs()) / (x.norm() * cscale).max(1e-300);
        let (v1, v2) = (fj.v1.value(), fj.v2.value());
        let g = fj.detector.value();
        let dcv = cu * v1 + cv * v2;
        let null_residual =
            (dcv - fj.nu.value() * g).norm() / (v1.hypot(v2) * cscale).max(1e-300);
        Self {
            j: fj.j,
            u,
            v,
            c: fj.c.value(),
            e,
            rho: fj.rho.value(),
            first,
            second,
            gauss,
            mean,
            vj_rhoj: g,
            normal_residual,
            null_residual,
        }
    }
}

/// Order used for focal jets: principal curvatures then carry two
/// derivatives beyond the base order's `K - 4`.
fn focal_order(fr: &Frontal) -> usize {
    fr.settings.order.max(6)
}

pub fn focal_jets(fr: &Frontal, j: usize, u: f64, v: f64) -> Result<FocalJets> {
    let jets = fr.local_jets(u, v, focal_order(fr), true)?;
    focal_jets_from(&jets, j)
}

pub fn focal_eval(fr: &Frontal, j: usize, u: f64, v: f64) -> Result<FocalPoint> {
    Ok(FocalPoint::from_jets(&focal_jets(fr, j, u, v)?))
}

/// Detector `V_jρ_j` alone, with the cheapest jets that carry it.
pub fn focal_detector(fr: &Frontal, j: usize, u: f64, v: f64) -> Result<f64> {
    let jets = fr.local_jets(u, v, 5, true)?;
    Ok(focal_jets_from(&jets, j)?.detector.value())
}

/// Zero set of `V_jρ_j` by grid sign-scan plus bisection.
pub fn focal_singular_trace(fr: &Frontal, j: usize, opts: TraceOptions) -> Result<SingularCurveTrace> {
    check_j(j)?;
    let (slo, shi) = fr.def.s_range();
    let (tlo, thi) = fr.def.t_range();
    let n = opts.cells + 1;
    let ss = linspace(slo, shi, n);
    let mut ts = linspace(tlo, thi, n);
    // Keep the axis on the grid when it lies inside the range.
    if tlo < 0.0 && thi > 0.0 {
        let k = ts
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        ts[k] = 0.0;
    }
    let values: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, k) = (idx / n, idx % n);
            focal_detector(fr, j, ss[i], ts[k]).unwrap_or(f64::NAN)
        })
        .collect();
    let at = |i: usize, k: usize| values[i * n + k];
    let finite: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    let scale = finite.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
    let node_zero = 1e-12 * scale;

    // Candidate roots: (s, t, direction) where direction says which
    // coordinate to bisect in.
    let mut tasks: Vec<(usize, usize, bool)> = Vec::new();
    let mut nodes: Vec<(f64, f64)> = Vec::new();
    for i in 0..n {
        for k in 0..n {
            let g = at(i, k);
            if !g.is_finite() {
                continue;
            }
            if g.abs() <= node_zero {
                nodes.push((ss[i], ts[k]));
                continue;
            }
            if k + 1 < n {
                let g2 = at(i, k + 1);
                if g2.is_finite() && g2.abs() > node_zero && g * g2 < 0.0 {
                    tasks.push((i, k, true));
                }
            }
            if i + 1 < n {
                let g2 = at(i + 1, k);
                if g2.is_finite() && g2.abs() > node_zero && g * g2 < 0.0 {
                    tasks.push((i, k, false));
                }
            }
        }
    }
    let found: Vec<(f64, f64)> = tasks
        .par_iter()
        .filter_map(|&(i, k, along_t)| {
            if along_t {
                let s = ss[i];
                let g = |t: f64| focal_detector(fr, j, s, t);
                bisect(&g, ts[k], ts[k + 1], opts.tol).ok().map(|t| (s, t))
            } else {
                let t = ts[k];
                let g = |s: f64| focal_detector(fr, j, s, t);
                bisect(&g, ss[i], ss[i + 1], opts.tol).ok().map(|s| (s, t))
            }
        })
        .collect();
    let mut params: Vec<(f64, f64)> = nodes.into_iter().chain(found).collect();
    params.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    params.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);

    let rows: Vec<(Vec3, PointKind)> = params
        .par_iter()
        .map(|&(s, t)| match focal_jets(fr, j, s, t) {
            Ok(fj) => (fj.c.value(), classify_kind(&fj, opts.angle_tol)),
            Err(_) => (Vec3::new(f64::NAN, f64::NAN, f64::NAN), PointKind::Undetermined),
        })
        .collect();
    let mut trace = SingularCurveTrace::empty(SurfaceTag::focal(j));
    trace.params = params;
    for (p, kind) in rows {
        trace.points.push(p);
        trace.kinds.push(kind);
    }
    Ok(trace)
}

/// First or second kind from the angle between the trace and `V_j`.
pub fn classify_kind(fj: &FocalJets, angle_tol: f64) -> PointKind {
    let gu = fj.detector.coeff(1, 0);
    let gv = fj.detector.coeff(0, 1);
    let (v1, v2) = (fj.v1.value(), fj.v2.value());
    let gn = gu.hypot(gv);
    let vn = v1.hypot(v2);
    let scale = 1.0 + fj.detector.scale();
    if gn < 1e-9 * scale || vn < 1e-12 {
        return PointKind::Undetermined;
    }
    // The trace tangent is orthogonal to the gradient.
    let sin = ((-gv) * v2 - gu * v1).abs() / (gn * vn);
    if sin.asin() < angle_tol {
        PointKind::SecondKind
    } else {
        PointKind::FirstKind
    }
}

/// Closed-form `K^{C_j}`, `H^{C_j}` at a 5/2-cuspidal-edge point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocalCurvaturePrediction {
    pub j: usize,
    pub kappa_j: f64,
    pub gauss: f64,
    pub mean: f64,
}

/// Principal curvatures on the axis from the invariants:
/// `κ₁ + κ₂ = κ_ν + r_b/3`, `κ₁κ₂ = κ_ν r_b/3 - κ_t²`.
pub fn axis_principal(inv: &InvariantSample) -> (f64, f64) {
    let h = 0.5 * (inv.kappa_nu + inv.r_b / 3.0);
    let k = inv.kappa_nu * inv.r_b / 3.0 - inv.kappa_t * inv.kappa_t;
    let root = (h * h - k).max(0.0).sqrt();
    (h + root, h - root)
}

pub fn focal_curvature_prediction(
    d: &InvariantDerivatives,
    j: usize,
    tol: f64,
) -> Result<FocalCurvaturePrediction> {
    check_j(j)?;
    let inv = &d.sample;
    if inv.r_c.abs() <= tol || inv.kappa_t.abs() <= tol {
        return Err(FrontalError::Precondition(format!(
            "closed forms need r_c ≠ 0 and κ_t ≠ 0 (r_c = {:e}, κ_t = {:e})",
            inv.r_c, inv.kappa_t
        )));
    }
    let (k1, k2) = axis_principal(inv);
    let kj = if j == 1 { k1 } else { k2 };
    let q = inv.kappa_t.powi(2) + (inv.kappa_nu - kj).powi(2);
    let gauss = -inv.kappa_t.powi(2) * kj.powi(4) / (q * q);
    let mean = -kj
        * (inv.kappa_s * q + d.kappa_t(1) * (inv.kappa_nu - kj) - inv.kappa_t * d.kappa_nu(1))
        / (2.0 * q.powf(1.5));
    Ok(FocalCurvaturePrediction {
        j,
        kappa_j: kj,
        gauss,
        mean,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocalPsiSample {
    pub u: f64,
    pub v: f64,
    pub psi: f64,
    /// `|de_j(V_j)|`, zero where `C_j` fails to be a front.
    pub de_v_norm: f64,
}

/// `ψ_{C_j}` at every point of a focal trace.
pub fn focal_psi_profile(fr: &Frontal, j: usize, trace: &SingularCurveTrace) -> Result<Vec<FocalPsiSample>> {
    if trace.is_empty() {
        return Err(FrontalError::Precondition("focal singular trace is empty".into()));
    }
    trace
        .params
        .par_iter()
        .map(|&(u, v)| {
            let fj = focal_jets(fr, j, u, v)?;
            let psi = fj.psi().ok_or_else(|| {
                FrontalError::Precondition(format!("degenerate focal singular point at ({u}, {v})"))
            })?;
            Ok(FocalPsiSample {
                u,
                v,
                psi,
                de_v_norm: fj.de_v().norm(),
            })
        })
        .collect()
}

/// Point of `S(C_j)` over `u`, bisecting in `v` inside `[lo, hi]`.
pub fn focal_trace_point(fr: &Frontal, j: usize, u: f64, lo: f64, hi: f64) -> Result<f64> {
    let g = |t: f64| focal_detector(fr, j, u, t);
    let (a, b) = (g(lo)?, g(hi)?);
    if a * b > 0.0 {
        return Err(FrontalError::Precondition(format!(
            "no sign change of V_jρ_j over v ∈ [{lo}, {hi}] at u = {u}"
        )));
    }
    bisect(&g, lo, hi, 1e-13)
}

/// `ψ_{C_j}` and its `u`-derivative at a first-kind point `(u0, v0)` of
/// `S(C_j)` whose trace is a graph over `u`. Also returns `ρ̂_j'` along the
/// trace, all per unit arc length of the singular curve of `f`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FocalPsiSlope {
    pub psi: f64,
    pub psi_slope: f64,
    pub rho_hat_slope: f64,
}

pub fn focal_psi_slope(fr: &Frontal, j: usize, u0: f64, v0: f64, h: f64, window: f64) -> Result<FocalPsiSlope> {
    let point = |u: f64| -> Result<(f64, f64, f64)> {
        let v = focal_trace_point(fr, j, u, v0 - window, v0 + window)?;
        let fj = focal_jets(fr, j, u, v)?;
        let psi = fj
            .psi()
            .ok_or_else(|| FrontalError::Precondition("degenerate trace tangent".into()))?;
        Ok((psi, fj.rho.value(), v))
    };
    let (psi0, _, _) = point(u0)?;
    let mut psi = [0.0; 4];
    let mut rho = [0.0; 4];
    for (k, off) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
        let (p, r, _) = point(u0 + off * h)?;
        psi[k] = p;
        rho[k] = r;
    }
    let d = |f: [f64; 4]| (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h);
    let sigma = fr.speed(u0)?[0];
    Ok(FocalPsiSlope {
        psi: psi0,
        psi_slope: d(psi) / sigma,
        rho_hat_slope: d(rho) / sigma,
    })
}

/// `dot` re-exported for callers assembling their own jet quantities.
pub fn jet_dot(a: &JetVec3, b: &JetVec3) -> Jet2 {
    dot(a, b)
}
