//! Singularity criteria for the normal ruled surface and the focal
//! surfaces, evaluated on invariants and their derivatives.
//!
//! Every "≠ 0" test is three-valued: below `vanish` a quantity is zero,
//! above `nonvanish` it is nonzero, and in between the verdict is
//! `Unclassified`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::derived::{
    axis_principal, focal_psi_slope, focal_singular_trace, focal_eval, focal_psi_profile,
    nr_developable_test, SurfaceTag, TraceOptions,
};
use crate::frame::{FrameCurve, FrameSeries};
use crate::frontal::{
    fd_steps_for, invariant_derivatives, Frontal, FrontalError, InvariantDerivatives, Result,
    SingularCurve,
};
use crate::jet::{det3_jet, Coord, Jet2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub vanish: f64,
    pub nonvanish: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            vanish: 1e-6,
            nonvanish: 1e-4,
        }
    }
}

impl Thresholds {
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            vanish: self.vanish * factor,
            nonvanish: self.nonvanish * factor,
        }
    }

    pub fn state(&self, x: f64) -> State {
        if !x.is_finite() {
            State::Band
        } else if x.abs() < self.vanish {
            State::Zero
        } else if x.abs() > self.nonvanish {
            State::NonZero
        } else {
            State::Band
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum State {
    Zero,
    NonZero,
    Band,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    CuspidalEdge,
    Swallowtail,
    CuspidalCrossCap,
    CuspidalS1Plus,
    CrossCap,
    S1Plus,
    S1Minus,
    FirstKind,
    SecondKind,
    /// First-kind focal point that fails the cuspidal cross cap criterion.
    NotCuspidalCrossCap,
    /// The focal surface is regular at the point.
    Regular,
    Degenerate,
    Unclassified,
}

impl Verdict {
    pub fn is_definite(self) -> bool {
        !matches!(self, Verdict::Unclassified)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriterionValue {
    pub value: f64,
    pub threshold: f64,
    /// `|value| > threshold`.
    pub pass: bool,
    pub deciding: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Location {
    pub surface: SurfaceTag,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularityReport {
    pub location: Location,
    pub verdict: Verdict,
    pub criteria: BTreeMap<String, CriterionValue>,
    /// Smallest distance to a threshold band among the deciding
    /// quantities, as a ratio (`> 1` means outside the band).
    pub margin: f64,
}

impl SingularityReport {
    pub fn value(&self, name: &str) -> Option<f64> {
        self.criteria.get(name).map(|c| c.value)
    }
}

struct Builder {
    th: Thresholds,
    criteria: BTreeMap<String, CriterionValue>,
    margin: f64,
}

impl Builder {
    fn new(th: Thresholds) -> Self {
        Self {
            th,
            criteria: BTreeMap::new(),
            margin: f64::INFINITY,
        }
    }

    fn info(&mut self, name: &str, value: f64) {
        self.criteria.insert(
            name.to_string(),
            CriterionValue {
                value,
                threshold: self.th.nonvanish,
                pass: value.abs() > self.th.nonvanish,
                deciding: false,
            },
        );
    }

    fn decide(&mut self, name: &str, value: f64) -> State {
        let state = self.th.state(value);
        let ratio = match state {
            State::NonZero => value.abs() / self.th.nonvanish,
            State::Zero => self.th.vanish / value.abs().max(1e-300),
            State::Band => 0.0,
        };
        self.margin = self.margin.min(ratio.min(1e12));
        self.criteria.insert(
            name.to_string(),
            CriterionValue {
                value,
                threshold: self.th.nonvanish,
                pass: value.abs() > self.th.nonvanish,
                deciding: true,
            },
        );
        state
    }

    fn finish(self, location: Location, verdict: Verdict) -> SingularityReport {
        SingularityReport {
            location,
            verdict,
            criteria: self.criteria,
            margin: self.margin,
        }
    }
}

fn curve_derivatives(curve: &dyn SingularCurve, u0: f64) -> Result<InvariantDerivatives> {
    invariant_derivatives(curve, u0, fd_steps_for(curve.curve_range()))
}

fn check_noncylindrical(d: &InvariantDerivatives, th: Thresholds) -> Result<()> {
    let s = &d.sample;
    if s.kappa_nu.abs() < th.vanish && s.kappa_t.abs() < th.vanish {
        return Err(FrontalError::Precondition(format!(
            "normal ruled surface is cylindrical at u = {}",
            d.u
        )));
    }
    Ok(())
}

/// Singularity of a developable normal ruled surface at `(u0, 1/κ_ν(u0))`.
pub fn classify_nr_developable(curve: &dyn SingularCurve, u0: f64, th: Thresholds) -> Result<SingularityReport> {
    let ev = nr_developable_test(curve, 41, th.vanish)?;
    if !ev.developable {
        return Err(FrontalError::Precondition(format!(
            "normal ruled surface is not developable (max |κ_t| = {:e})",
            ev.max_abs_kappa_t
        )));
    }
    let d = curve_derivatives(curve, u0)?;
    check_noncylindrical(&d, th)?;
    let kn = d.sample.kappa_nu;
    if kn.abs() < th.vanish {
        return Err(FrontalError::Precondition(format!(
            "singular ruling at infinity: κ_ν({u0}) = {kn:e}"
        )));
    }
    let w0 = 1.0 / kn;
    let mut b = Builder::new(th);
    b.info("kappa_nu", kn);
    b.info("max_abs_kappa_t", ev.max_abs_kappa_t);
    let (ks, ks1, ks2) = (d.sample.kappa_s, d.kappa_s(1), d.kappa_s(2));
    let (kn1, kn2) = (d.kappa_nu(1), d.kappa_nu(2));
    let verdict = match b.decide("kappa_s", ks) {
        State::NonZero => match b.decide("kappa_nu'", kn1) {
            State::NonZero => Verdict::CuspidalEdge,
            State::Zero => match b.decide("kappa_nu''", kn2) {
                State::NonZero => Verdict::Swallowtail,
                _ => Verdict::Unclassified,
            },
            State::Band => Verdict::Unclassified,
        },
        State::Zero => match b.decide("kappa_nu'", kn1) {
            State::NonZero => match b.decide("kappa_s'", ks1) {
                State::NonZero => Verdict::CuspidalCrossCap,
                State::Zero => match b.decide("kappa_s''", ks2) {
                    State::NonZero => {
                        let a = -12.0 * kn1.powi(3) * ks2 / kn.powi(4);
                        let bb = -ks2 * kn1 / (kn * kn);
                        b.info("A", a);
                        b.info("B", bb);
                        b.info("AB", a * bb);
                        Verdict::CuspidalS1Plus
                    }
                    _ => Verdict::Unclassified,
                },
                State::Band => Verdict::Unclassified,
            },
            _ => Verdict::Unclassified,
        },
        State::Band => Verdict::Unclassified,
    };
    Ok(b.finish(
        Location {
            surface: SurfaceTag::Nr,
            u: u0,
            v: w0,
        },
        verdict,
    ))
}

fn require_nondevelopable(curve: &dyn SingularCurve, th: Thresholds) -> Result<()> {
    let ev = nr_developable_test(curve, 41, th.vanish)?;
    if ev.developable {
        return Err(FrontalError::Precondition(
            "normal ruled surface is developable (κ_t ≡ 0)".into(),
        ));
    }
    Ok(())
}

fn require_singular(d: &InvariantDerivatives, w0: f64, th: Thresholds) -> Result<()> {
    let s = &d.sample;
    let lambda = 1.0 - w0 * s.kappa_nu;
    if s.kappa_t.abs() > th.vanish || lambda.abs() > th.vanish * (1.0 + w0.abs()) {
        return Err(FrontalError::Precondition(format!(
            "({}, {w0}) is not a singular point of NR: κ_t = {:e}, 1 - wκ_ν = {:e}",
            d.u, s.kappa_t, lambda
        )));
    }
    Ok(())
}

/// Singularity of a nondevelopable normal ruled surface at `(u0, w0)`.
pub fn classify_nr_nondevelopable(
    curve: &dyn SingularCurve,
    u0: f64,
    w0: f64,
    th: Thresholds,
) -> Result<SingularityReport> {
    require_nondevelopable(curve, th)?;
    let d = curve_derivatives(curve, u0)?;
    check_noncylindrical(&d, th)?;
    require_singular(&d, w0, th)?;
    let mut b = Builder::new(th);
    let (ks, kn1) = (d.sample.kappa_s, d.kappa_nu(1));
    let (kt1, kt2) = (d.kappa_t(1), d.kappa_t(2));
    let verdict = match b.decide("kappa_t'", kt1) {
        State::NonZero => Verdict::CrossCap,
        State::Zero => {
            let p = kt2 * (2.0 * ks * kn1 + kt2);
            match b.decide("kappa_t''(2 kappa_s kappa_nu' + kappa_t'')", p) {
                State::NonZero if p < 0.0 => Verdict::S1Minus,
                State::NonZero => match b.decide("kappa_nu'", kn1) {
                    State::NonZero => Verdict::S1Plus,
                    _ => Verdict::Unclassified,
                },
                _ => Verdict::Unclassified,
            }
        }
        State::Band => Verdict::Unclassified,
    };
    Ok(b.finish(
        Location {
            surface: SurfaceTag::Nr,
            u: u0,
            v: w0,
        },
        verdict,
    ))
}

/// `φ = det(NR_w, NR_u, NR_uu)` and its low derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiData {
    pub phi: f64,
    pub phi_u: f64,
    pub phi_w: f64,
    pub phi_uu: f64,
    pub phi_uw: f64,
    pub phi_ww: f64,
    pub hessian: f64,
    /// `-κ_t''(2κ_sκ_ν' + κ_t'')`, valid where `κ_t = κ_t' = 0`.
    pub hessian_formula: f64,
}

impl PhiData {
    fn new(p: [f64; 6], formula: f64) -> Self {
        let [phi, phi_u, phi_w, phi_uu, phi_uw, phi_ww] = p;
        Self {
            phi,
            phi_u,
            phi_w,
            phi_uu,
            phi_uw,
            phi_ww,
            hessian: phi_uu * phi_ww - phi_uw * phi_uw,
            hessian_formula: formula,
        }
    }

    /// Cross cap by the Whitney test: `φ = 0` and `φ_w ≠ 0`.
    pub fn whitney(&self, th: Thresholds) -> State {
        match (th.state(self.phi), th.state(self.phi_w)) {
            (State::Zero, s) => s,
            (State::NonZero, _) => State::Zero,
            _ => State::Band,
        }
    }
}

/// `φ` from the closed form in the invariants and their derivatives.
pub fn phi_oracle(curve: &dyn SingularCurve, u0: f64, w0: f64, th: Thresholds) -> Result<PhiData> {
    require_nondevelopable(curve, th)?;
    let d = curve_derivatives(curve, u0)?;
    require_singular(&d, w0, th)?;
    let s = &d.sample;
    let (ks, kn, kt) = (s.kappa_s, s.kappa_nu, s.kappa_t);
    let (ks1, ks2) = (d.kappa_s(1), d.kappa_s(2));
    let (kn1, kn2, kn3) = (d.kappa_nu(1), d.kappa_nu(2), d.kappa_nu(3));
    let (kt1, kt2, kt3) = (d.kappa_t(1), d.kappa_t(2), d.kappa_t(3));
    let w = w0;
    let q = kn * kn + kt * kt;
    let a = ks * q + kn * kt1 - kn1 * kt;
    let a1 = ks1 * q + ks * (2.0 * kn * kn1 + 2.0 * kt * kt1) + kn * kt2 - kn2 * kt;
    let a2 = ks2 * q
        + 2.0 * ks1 * (2.0 * kn * kn1 + 2.0 * kt * kt1)
        + ks * (2.0 * kn1 * kn1 + 2.0 * kn * kn2 + 2.0 * kt1 * kt1 + 2.0 * kt * kt2)
        + kn1 * kt2
        + kn * kt3
        - kn3 * kt
        - kn2 * kt1;
    let bq = 2.0 * ks * kn + kt1;
    let b1 = 2.0 * ks1 * kn + 2.0 * ks * kn1 + kt2;
    let b2 = 2.0 * d.kappa_s(2) * kn + 4.0 * ks1 * kn1 + 2.0 * ks * kn2 + kt3;
    let phi = w * w * a - w * bq + ks;
    let p = [
        phi,
        w * w * a1 - w * b1 + ks1,
        2.0 * w * a - bq,
        w * w * a2 - w * b2 + ks2,
        2.0 * w * a1 - b1,
        2.0 * a,
    ];
    Ok(PhiData::new(p, -kt2 * (2.0 * ks * kn1 + kt2)))
}

/// `φ` straight from its determinant definition on the series of a
/// synthesized frame; independent of the closed form.
pub fn phi_from_series(series: &FrameSeries, w0: f64, kappa: [f64; 3]) -> PhiData {
    let nr = series.ruled_jet(w0);
    let nr_u = nr.du();
    let nr_uu = nr_u.du();
    let k = nr_uu.order();
    let phi = det3_jet(&nr.dv().truncate(k), &nr_u.truncate(k), &nr_uu);
    let p = |i: usize, j: usize| phi.partial(i, j).unwrap_or(f64::NAN);
    let [ks, kn1, kt2] = kappa;
    PhiData::new(
        [p(0, 0), p(1, 0), p(0, 1), p(2, 0), p(1, 1), p(0, 2)],
        -kt2 * (2.0 * ks * kn1 + kt2),
    )
}

/// `A` and `B` of the cuspidal `S₁` criterion computed from their
/// definitions: `B = ψ''` with `ψ = det(β̂', ĥ, ĥ')` along `w = 1/κ_ν`, and
/// `A = det(β̂', η̃²NR, 3η̃⁵NR - 10Cη̃⁴NR)` for the null field
/// `η̃ = ∂_u + κ_ν'(u0)(u-u0)²∂_w`.
pub fn ab_oracle(curve: &FrameCurve, u0: f64) -> Result<(f64, f64)> {
    const DEG: usize = 9;
    let series = curve.series(u0, DEG)?;
    let kn = curve.kappa_nu.eval_jet((u0, 0.0), DEG)?;
    let kn_t: Vec<f64> = (0..=DEG).map(|k| kn.coeff(k, 0)).collect();
    let (kn0, kn1, kn2) = (kn_t[0], kn_t[1], 2.0 * kn_t[2]);
    let w0 = 1.0 / kn0;
    let nr = series.ruled_jet(w0);
    let t = Jet2::lift(Coord::U, (0.0, 0.0), DEG);
    // β(t) = (t, 1/κ_ν(u0 + t))
    let kn_series = Jet2::from_fn((0.0, 0.0), DEG, |i, j| if j == 0 { kn_t[i] } else { 0.0 });
    let inv_kn = kn_series.recip()?;
    let beta_hat = nr.compose(&t, &inv_kn)?;
    let beta1 = beta_hat.du();
    // η̃ integral curve through q: (t, w0 + κ_ν' t³/3).
    let cube = &(&t * &t) * &t;
    let w_eta = cube.scale_by(kn1 / 3.0).add_scalar(w0);
    let along = nr.compose(&t, &w_eta)?;
    let eta_vec = |k: usize| along.partial(k, 0).expect("order suffices");
    let c = kn2 / kn1;
    let b1 = beta1.value();
    let e2 = eta_vec(2);
    let e4 = eta_vec(4);
    let e5 = eta_vec(5);
    let a = crate::geom::det3(b1, e2, e5 * 3.0 - e4 * (10.0 * c));
    let h = FrameSeries::vector_jet(&series.h, 0.0, DEG);
    let h1 = h.du();
    let k = h1.order().min(beta1.order());
    let psi = det3_jet(&beta1.truncate(k), &h.truncate(k), &h1.truncate(k));
    let b = psi.partial(2, 0)?;
    Ok((a, b))
}

/// Classification of a focal singular point on the axis.
pub fn classify_focal_point(fr: &Frontal, j: usize, u0: f64, th: Thresholds) -> Result<SingularityReport> {
    if j != 1 && j != 2 {
        return Err(FrontalError::Precondition(format!("focal index must be 1 or 2, got {j}")));
    }
    let d = fr.invariant_derivatives(u0)?;
    let s = d.sample;
    if s.kappa_t.abs() < fr.settings.umbilic_tol {
        return Err(FrontalError::Umbilic {
            u: u0,
            kappa_t: s.kappa_t,
        });
    }
    let mut b = Builder::new(th);
    let location = Location {
        surface: SurfaceTag::focal(j),
        u: u0,
        v: 0.0,
    };
    match b.decide("r_c", s.r_c) {
        State::NonZero => return Ok(b.finish(location, Verdict::Regular)),
        State::Band => return Ok(b.finish(location, Verdict::Unclassified)),
        State::Zero => {}
    }
    let ridge = fr.ridge_report(u0, j, th.vanish)?;
    let rc1 = d.r_c(1);
    let rc1_state = b.decide("r_c'", rc1);
    let ridge_state = b.decide("ridge_second_order", ridge.second_order);
    b.info("V_j kappa_j", ridge.vj_kappa_j);
    if rc1_state == State::Band || ridge_state == State::Band {
        return Ok(b.finish(location, Verdict::Unclassified));
    }
    let first_order = ridge_state == State::NonZero;
    if rc1_state == State::Zero && !first_order {
        return Ok(b.finish(location, Verdict::Degenerate));
    }
    if !first_order {
        return Ok(b.finish(location, Verdict::SecondKind));
    }
    if rc1_state == State::Zero {
        return Ok(b.finish(location, Verdict::NotCuspidalCrossCap));
    }

    let (k1, k2) = axis_principal(&s);
    let (kj, kother) = if j == 1 { (k1, k2) } else { (k2, k1) };
    let (slo, shi) = fr.def.s_range();
    let (tlo, thi) = fr.def.t_range();
    let slope = focal_psi_slope(fr, j, u0, 0.0, 1e-3 * (shi - slo), 0.05 * (thi - tlo))?;
    let jets = crate::derived::focal_jets(fr, j, u0, 0.0)?;
    let sigma = fr.speed(u0)?[0];
    let rho_u = jets.rho.coeff(1, 0) / sigma;
    let dk = kj - s.kappa_nu;
    let lhs = slope.rho_hat_slope
        * (s.kappa_t * s.kappa_t * d.kappa_nu(1)
            + 2.0 * s.kappa_t * d.kappa_t(1) * dk
            + d.r_b(1) / 3.0 * dk * dk);
    let rhs = (s.kappa_t * s.kappa_t + dk * dk) * (kother - kj) * (s.kappa_nu - kj);
    b.info("rho_hat'_trace", slope.rho_hat_slope);
    b.info("rho_hat'_jets", rho_u);
    b.info("ccr_lhs", lhs);
    b.info("ccr_rhs", rhs);
    b.info("psi_c", slope.psi);
    b.info("psi_c'", slope.psi_slope);
    let scale = 1f64.max(lhs.abs()).max(rhs.abs());
    let verdict = match b.decide("ccr_inequality", (lhs - rhs) / scale) {
        State::NonZero => Verdict::CuspidalCrossCap,
        State::Zero => Verdict::NotCuspidalCrossCap,
        State::Band => Verdict::Unclassified,
    };
    Ok(b.finish(location, verdict))
}

#[derive(Debug, Clone, Serialize)]
pub struct BandBound {
    pub band: f64,
    pub max_abs_gauss: f64,
    pub max_abs_mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PurePropagationReport {
    pub j: usize,
    pub hypotheses_met: bool,
    pub notes: Vec<String>,
    pub max_abs_r_c: f64,
    pub min_abs_ridge_second_order: f64,
    /// Largest `|v|` among traced points inside the near-axis band.
    pub max_offset_near_axis: f64,
    pub axis_points: usize,
    pub max_abs_psi: f64,
    pub bounds: Vec<BandBound>,
    pub pass: bool,
}

/// Checks that `S(C_j)` runs along the axis with `ψ_{C_j} ≡ 0` when
/// `r_c ≡ 0` and every axis point is a first-order ridge.
pub fn pure_propagation_check(fr: &Frontal, j: usize, tol: f64, opts: TraceOptions) -> Result<PurePropagationReport> {
    let (slo, shi) = fr.def.s_range();
    let (tlo, thi) = fr.def.t_range();
    let us: Vec<f64> = (0..21).map(|k| slo + (shi - slo) * (k as f64 + 0.5) / 21.0).collect();
    let mut notes = Vec::new();
    let mut max_rc = 0.0_f64;
    let mut min_second = f64::INFINITY;
    for &u in &us {
        let inv = fr.invariants_at(u)?;
        max_rc = max_rc.max(inv.r_c.abs());
        let ridge = fr.ridge_report(u, j, tol)?;
        min_second = min_second.min(ridge.second_order.abs());
    }
    if max_rc > tol {
        notes.push(format!("r_c does not vanish on the axis (max |r_c| = {max_rc:e})"));
    }
    if min_second <= tol {
        notes.push(format!("axis is not a first-order ridge (min |second order| = {min_second:e})"));
    }
    let hypotheses_met = notes.is_empty();

    let trace = focal_singular_trace(fr, j, opts)?;
    let band = 0.1 * (thi - tlo);
    let near: Vec<(f64, f64)> = trace.params.iter().copied().filter(|p| p.1.abs() < band).collect();
    let max_offset = near.iter().fold(0.0_f64, |m, p| m.max(p.1.abs()));
    let on_axis: Vec<usize> = (0..trace.len())
        .filter(|&k| trace.params[k].1.abs() <= tol)
        .collect();
    let mut axis_trace = trace.clone();
    axis_trace.params = on_axis.iter().map(|&k| trace.params[k]).collect();
    axis_trace.points = on_axis.iter().map(|&k| trace.points[k]).collect();
    axis_trace.kinds = on_axis.iter().map(|&k| trace.kinds[k]).collect();
    let max_psi = if axis_trace.is_empty() {
        notes.push("no traced points on the axis".into());
        f64::INFINITY
    } else {
        focal_psi_profile(fr, j, &axis_trace)?
            .iter()
            .fold(0.0_f64, |m, s| m.max(s.psi.abs()))
    };

    let mut bounds = Vec::new();
    for k in 0..4 {
        let b = band * 10f64.powi(-k);
        let mut mk = 0.0_f64;
        let mut mh = 0.0_f64;
        for &u in &us {
            for t in [-b, -0.5 * b, 0.5 * b, b] {
                if t < tlo || t > thi {
                    continue;
                }
                if let Ok(p) = focal_eval(fr, j, u, t) {
                    mk = mk.max(p.gauss.map_or(0.0, f64::abs));
                    mh = mh.max(p.mean.map_or(0.0, f64::abs));
                }
            }
        }
        bounds.push(BandBound {
            band: b,
            max_abs_gauss: mk,
            max_abs_mean: mh,
        });
    }
    let pass = hypotheses_met && max_offset <= tol && max_psi <= tol && !axis_trace.is_empty();
    Ok(PurePropagationReport {
        j,
        hypotheses_met,
        notes,
        max_abs_r_c: max_rc,
        min_abs_ridge_second_order: min_second,
        max_offset_near_axis: max_offset,
        axis_points: axis_trace.len(),
        max_abs_psi: max_psi,
        bounds,
        pass,
    })
}
