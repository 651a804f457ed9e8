//! Pointwise geometry of a frontal in its pre-adapted chart.
//!
//! In the internal chart the singular curve is `v = 0` and `f_v = v h`.
//! The unit normal is `ν = (f_u × h)/|f_u × h|`; at a pure-frontal point
//! also `ν_v = v ν₁`. All quantities are read off truncated jets.

use serde::Serialize;
use thiserror::Error;

use crate::expr::EvalError;
use crate::geom::{det3, Vec3};
use crate::jet::{det3_jet, Coord, Jet2, JetError, JetVec3};
use crate::surface::SurfaceDef;

#[derive(Debug, Error)]
pub enum FrontalError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("not a frontal in pre-adapted form at u = {u}: f_v is not divisible by v (offending coefficient {max_offending:e})")]
    NotFrontal { u: f64, max_offending: f64 },
    #[error("singular point at u = {u} is not pure-frontal: ν_v is not divisible by v (offending coefficient {max_offending:e})")]
    NotPureFrontal { u: f64, max_offending: f64 },
    #[error("degenerate frame at ({u}, {v}): {what} = {value:e}")]
    Degenerate {
        u: f64,
        v: f64,
        what: &'static str,
        value: f64,
    },
    #[error("negative discriminant H^2 - K = {gamma:e} at ({u}, {v})")]
    NegativeDiscriminant { u: f64, v: f64, gamma: f64 },
    #[error("umbilic risk at u = {u}: |κ_t| = {kappa_t:e} is below threshold")]
    Umbilic { u: f64, kappa_t: f64 },
    #[error("evaluation window [{lo}, {hi}] leaves the curve range [{min}, {max}]")]
    OutOfRange { lo: f64, hi: f64, min: f64, max: f64 },
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T, E = FrontalError> = std::result::Result<T, E>;

/// Numerical knobs shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    /// Jet order `K` used for `f`.
    pub order: usize,
    /// Relative threshold for divisibility by `v`.
    pub deflate_tol: f64,
    /// Relative band in which a negative `H^2 - K` is clamped to zero.
    pub gamma_tol: f64,
    /// `|v|` below this fraction of the transverse range uses axis jets.
    pub near_axis: f64,
    /// Smallest admissible `|κ_t|` for principal-direction machinery.
    pub umbilic_tol: f64,
    /// Relative threshold for ψ and its derivatives.
    pub psi_tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            order: 7,
            deflate_tol: 1e-8,
            gamma_tol: 1e-8,
            near_axis: 1e-2,
            umbilic_tol: 1e-6,
            psi_tol: 1e-8,
        }
    }
}

/// Jets of `f` and its frame at one point.
///
/// Orders relative to `K = f.order()`: `f_u, f_v` at `K-1`, `h, ν` at
/// `K-2`, `ν_u, ν_v` at `K-3`, `ν₁` at `K-4`.
#[derive(Debug, Clone)]
pub struct LocalJets {
    pub f: JetVec3,
    pub fu: JetVec3,
    pub fv: JetVec3,
    pub h: JetVec3,
    pub nu: JetVec3,
    pub nu_u: JetVec3,
    pub nu_v: JetVec3,
    pub nu1: Option<JetVec3>,
}

/// Modified fundamental quantities as jets.
#[derive(Debug, Clone)]
pub struct FundamentalJets {
    pub e: Jet2,
    pub f: Jet2,
    pub g: Jet2,
    pub l: Jet2,
    pub m: Jet2,
    pub n: Jet2,
    pub n1: Jet2,
}

impl FundamentalJets {
    /// `ẼG̃ - F̃²`.
    pub fn det(&self) -> Jet2 {
        let k = self.n1.order();
        let (e, f, g) = (self.e.truncate(k), self.f.truncate(k), self.g.truncate(k));
        &(&e * &g) - &(&f * &f)
    }

    /// Gaussian and mean curvature jets.
    pub fn curvatures(&self) -> Result<(Jet2, Jet2)> {
        let k = self.n1.order();
        let (e, f, g) = (self.e.truncate(k), self.f.truncate(k), self.g.truncate(k));
        let (l, m, n1) = (self.l.truncate(k), self.m.truncate(k), &self.n1);
        let d = &(&e * &g) - &(&f * &f);
        let kk = (&(&l * n1) - &(&m * &m)).div(&d)?;
        let num = &(&(&e * n1) - &(&f * &m).scale_by(2.0)) + &(&g * &l);
        let hh = num.div(&d)?.scale_by(0.5);
        Ok((kk, hh))
    }

    /// Principal curvature jets `(κ₁, κ₂)`, requires `H² - K > 0`.
    pub fn principal(&self) -> Result<(Jet2, Jet2)> {
        let (kk, hh) = self.curvatures()?;
        let root = (&(&hh * &hh) - &kk).sqrt()?;
        Ok((&hh + &root, &hh - &root))
    }
}

fn common(a: &JetVec3, b: &JetVec3) -> (JetVec3, JetVec3) {
    let k = a.order().min(b.order());
    (a.truncate(k), b.truncate(k))
}

/// `⟨a, b⟩` truncated to the lower order of the two.
pub fn dot(a: &JetVec3, b: &JetVec3) -> Jet2 {
    let (a, b) = common(a, b);
    a.dot(&b)
}

impl LocalJets {
    /// Frame jets from a jet of `f`.
    ///
    /// On the axis (`v0 = 0`) `h` and `ν₁` come from deflation; elsewhere
    /// from division by `v`. `ν₁` is only attempted when `pure` is set.
    pub fn from_f(f: JetVec3, tol: f64, pure: bool) -> Result<Self> {
        let k = f.order();
        if k < 4 {
            return Err(FrontalError::Precondition(format!(
                "jet order {k} is too small (need at least 4)"
            )));
        }
        let (u0, v0) = f.base();
        let fu = f.du();
        let fv = f.dv();
        let h = if v0 == 0.0 {
            fv.deflate_v(1, tol).map_err(|e| match e {
                JetError::NotDivisible { max_offending, .. } => FrontalError::NotFrontal {
                    u: u0,
                    max_offending,
                },
                other => other.into(),
            })?
        } else {
            let inv = Jet2::lift(Coord::V, (u0, v0), k - 1).recip()?;
            fv.mul_scalar(&inv).truncate(k - 2)
        };
        let cross = fu.truncate(k - 2).cross(&h);
        let len = cross.norm().map_err(|_| FrontalError::Degenerate {
            u: u0,
            v: v0,
            what: "|f_u × h|",
            value: cross.value().norm(),
        })?;
        let nu = cross.mul_scalar(&len.recip()?);
        let nu_u = nu.du();
        let nu_v = nu.dv();
        let nu1 = if !pure {
            None
        } else if v0 == 0.0 {
            Some(nu_v.deflate_v(1, tol).map_err(|e| match e {
                JetError::NotDivisible { max_offending, .. } => FrontalError::NotPureFrontal {
                    u: u0,
                    max_offending,
                },
                other => other.into(),
            })?)
        } else {
            let inv = Jet2::lift(Coord::V, (u0, v0), k - 3).recip()?;
            Some(nu_v.mul_scalar(&inv).truncate(k - 4))
        };
        Ok(Self {
            f,
            fu,
            fv,
            h,
            nu,
            nu_u,
            nu_v,
            nu1,
        })
    }

    pub fn base(&self) -> (f64, f64) {
        self.f.base()
    }

    /// Re-expands every jet about `base + (du, dv)`, truncating to `order`.
    pub fn recenter(&self, du: f64, dv: f64, order: usize) -> Self {
        let r = |j: &JetVec3, drop: usize| j.recenter(du, dv).truncate(order - drop);
        Self {
            f: r(&self.f, 0),
            fu: r(&self.fu, 1),
            fv: r(&self.fv, 1),
            h: r(&self.h, 2),
            nu: r(&self.nu, 2),
            nu_u: r(&self.nu_u, 3),
            nu_v: r(&self.nu_v, 3),
            nu1: self.nu1.as_ref().map(|j| r(j, 4)),
        }
    }

    pub fn fundamentals(&self) -> Result<FundamentalJets> {
        let nu1 = self.nu1.as_ref().ok_or_else(|| {
            FrontalError::Precondition("ν₁ unavailable (point not pure-frontal)".into())
        })?;
        let fu = &self.fu;
        let h = &self.h;
        Ok(FundamentalJets {
            e: dot(fu, fu),
            f: dot(fu, h),
            g: dot(h, h),
            l: -&dot(fu, &self.nu_u),
            m: -&dot(h, &self.nu_u),
            n: -&dot(h, &self.nu_v),
            n1: -&dot(h, nu1),
        })
    }

    /// `ψ = det(f_u, ν, ν_v)` as a jet.
    pub fn psi(&self) -> Jet2 {
        let k = self.nu_v.order();
        det3_jet(&self.fu.truncate(k), &self.nu.truncate(k), &self.nu_v)
    }
}

/// All pointwise quantities at one point of the internal chart.
#[derive(Debug, Clone, Serialize)]
pub struct FrontalPoint {
    pub u: f64,
    pub v: f64,
    pub f: Vec3,
    pub f_u: Vec3,
    pub f_v: Vec3,
    pub h: Vec3,
    pub nu: Vec3,
    pub nu1: Vec3,
    pub lambda: f64,
    pub e: f64,
    #[serde(rename = "f_tilde")]
    pub ff: f64,
    pub g: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
    pub n1: f64,
    pub gauss: f64,
    pub mean: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub gamma: f64,
    pub v1: [f64; 2],
    pub v2: [f64; 2],
    pub x1: Vec3,
    pub x2: Vec3,
    pub weingarten: [f64; 4],
}

impl FrontalPoint {
    pub fn from_jets(jets: &LocalJets, settings: &Settings) -> Result<Self> {
        let (u, v) = jets.base();
        let fund = jets.fundamentals()?;
        let val = |j: &Jet2| j.value();
        let (e, ff, g) = (val(&fund.e), val(&fund.f), val(&fund.g));
        let (l, m, n, n1) = (val(&fund.l), val(&fund.m), val(&fund.n), val(&fund.n1));
        let d = e * g - ff * ff;
        if !(d > 1e-14 * (e * g).max(1e-300)) {
            return Err(FrontalError::Degenerate {
                u,
                v,
                what: "EG - F^2",
                value: d,
            });
        }
        let gauss = (l * n1 - m * m) / d;
        let mean = (e * n1 - 2.0 * ff * m + g * l) / (2.0 * d);
        let gamma = clamp_gamma(mean, gauss, settings.gamma_tol)
            .ok_or(FrontalError::NegativeDiscriminant {
                u,
                v,
                gamma: mean * mean - gauss,
            })?;
        let root = gamma.sqrt();
        let kappa1 = mean + root;
        let kappa2 = mean - root;
        let fu = jets.fu.value();
        let h = jets.h.value();
        let fv = jets.fv.value();
        let nu = jets.nu.value();
        let principal = |k: f64| {
            let a = m - k * ff;
            let b = l - k * e;
            ([-v * a, b], fu * (-a) + h * b)
        };
        let (v1, x1) = principal(kappa1);
        let (v2, x2) = principal(kappa2);
        let weingarten = [
            (ff * m - g * l) / d,
            (ff * l - e * m) / d,
            (ff * n1 - g * m) / d,
            (ff * m - e * n1) / d,
        ];
        Ok(Self {
            u,
            v,
            f: jets.f.value(),
            f_u: fu,
            f_v: fv,
            h,
            nu,
            nu1: jets.nu1.as_ref().map(JetVec3::value).unwrap_or_default(),
            lambda: det3(fu, fv, nu),
            e,
            ff,
            g,
            l,
            m,
            n,
            n1,
            gauss,
            mean,
            kappa1,
            kappa2,
            gamma,
            v1,
            v2,
            x1,
            x2,
            weingarten,
        })
    }

    pub fn kappa(&self, j: usize) -> f64 {
        if j == 1 {
            self.kappa1
        } else {
            self.kappa2
        }
    }

    pub fn v_dir(&self, j: usize) -> [f64; 2] {
        if j == 1 {
            self.v1
        } else {
            self.v2
        }
    }

    pub fn x(&self, j: usize) -> Vec3 {
        if j == 1 {
            self.x1
        } else {
            self.x2
        }
    }
}

/// `H² - K` with small negative values clamped to zero.
pub fn clamp_gamma(mean: f64, gauss: f64, tol: f64) -> Option<f64> {
    let gamma = mean * mean - gauss;
    if gamma >= 0.0 {
        Some(gamma)
    } else if gamma > -tol * (1.0 + mean * mean + gauss.abs()) {
        Some(0.0)
    } else {
        None
    }
}

/// A surface definition together with the numerical settings it is
/// analyzed under.
#[derive(Debug, Clone)]
pub struct Frontal {
    pub def: SurfaceDef,
    pub settings: Settings,
}

/// ψ-based classification of a singular point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "tag", content = "k")]
pub enum FrontTag {
    Front,
    KNonFront(usize),
    PureFrontal(usize),
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrontClass {
    pub tag: FrontTag,
    /// `ψ(u0), ψ'(u0), …` up to the tested order.
    pub derivatives: Vec<f64>,
    pub max_abs_profile: f64,
    pub threshold: f64,
}

/// Jets in a chart normalized at one axis point.
#[derive(Debug, Clone)]
pub struct AdaptedJets {
    pub u0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub residual: f64,
    pub jets: LocalJets,
    pub fundamentals: FundamentalJets,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSample {
    pub u: f64,
    pub kappa_s: f64,
    pub kappa_nu: f64,
    pub kappa_t: f64,
    pub kappa_c: f64,
    pub r_b: f64,
    pub r_c: f64,
    pub residual: f64,
}

impl InvariantSample {
    pub const NAMES: [&'static str; 6] = ["kappa_s", "kappa_nu", "kappa_t", "kappa_c", "r_b", "r_c"];

    pub fn values(&self) -> [f64; 6] {
        [
            self.kappa_s,
            self.kappa_nu,
            self.kappa_t,
            self.kappa_c,
            self.r_b,
            self.r_c,
        ]
    }
}

/// Unit-speed frame of the singular curve at one parameter value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisFrame {
    pub point: Vec3,
    pub tangent: Vec3,
    pub h: Vec3,
    pub nu: Vec3,
}

/// Anything that carries the invariants of a singular curve.
pub trait SingularCurve: Sync {
    fn curve_range(&self) -> (f64, f64);
    fn invariants(&self, u: f64) -> Result<InvariantSample>;
    /// `|γ'|` and its first two derivatives in the curve parameter.
    fn speed(&self, u: f64) -> Result<[f64; 3]>;
    fn frame(&self, u: f64) -> Result<AxisFrame>;
}

impl Frontal {
    pub fn new(def: SurfaceDef) -> Self {
        Self {
            def,
            settings: Settings::default(),
        }
    }

    pub fn with_settings(def: SurfaceDef, settings: Settings) -> Self {
        Self { def, settings }
    }

    fn near_axis_band(&self) -> f64 {
        let (lo, hi) = self.def.t_range();
        self.settings.near_axis * (hi - lo)
    }

    /// Frame jets at `(u, v)` of the internal chart.
    pub fn local_jets(&self, u: f64, v: f64, order: usize, pure: bool) -> Result<LocalJets> {
        let tol = self.settings.deflate_tol;
        if v == 0.0 {
            return LocalJets::from_f(self.def.jet(u, 0.0, order)?, tol, pure);
        }
        if v.abs() < self.near_axis_band() {
            // Division by a tiny v is ill-conditioned: expand on the axis.
            let axis = LocalJets::from_f(self.def.jet(u, 0.0, order + 3)?, tol, pure)?;
            return Ok(axis.recenter(0.0, v, order));
        }
        LocalJets::from_f(self.def.jet(u, v, order)?, tol, pure)
    }

    pub fn evaluate_point(&self, u: f64, v: f64) -> Result<FrontalPoint> {
        let jets = self.local_jets(u, v, self.settings.order, true)?;
        FrontalPoint::from_jets(&jets, &self.settings)
    }

    /// Checks that `f_v` deflates at `samples` axis points.
    pub fn validate_chart(&self, samples: usize) -> Result<()> {
        let (lo, hi) = self.def.s_range();
        for i in 0..samples {
            let u = lo + (hi - lo) * i as f64 / (samples.max(2) - 1) as f64;
            self.local_jets(u, 0.0, 4, false)?;
        }
        Ok(())
    }

    /// `ψ(u) = det(f_u, ν, ν_v)` on the axis.
    pub fn psi(&self, u: f64) -> Result<f64> {
        Ok(self.local_jets(u, 0.0, 4, false)?.psi().value())
    }

    pub fn psi_profile(&self, samples: &[f64]) -> Result<Vec<(f64, f64)>> {
        samples.iter().map(|&u| Ok((u, self.psi(u)?))).collect()
    }

    /// ψ-classification at `u0`, testing derivatives up to `k_max`.
    pub fn classify_front(&self, u0: f64, k_max: usize) -> Result<FrontClass> {
        let order = (k_max + 3).max(self.settings.order);
        let jets = self.local_jets(u0, 0.0, order, false)?;
        let psi = jets.psi();
        let derivatives: Vec<f64> = (0..=k_max)
            .map(|i| psi.partial(i, 0))
            .collect::<Result<_, _>>()?;
        let nu_scale = (0..=jets.nu_v.order())
            .flat_map(|d| (0..=d).map(move |j| (d - j, j)))
            .fold(0.0_f64, |m, (i, j)| m.max(jets.nu_v.coeff(i, j).max_abs()));
        let threshold = self.settings.psi_tol * (jets.fu.value().norm() * nu_scale).max(1.0);
        let (lo, hi) = self.def.s_range();
        let n = 41;
        let mut max_abs_profile = 0.0_f64;
        for i in 0..n {
            let u = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            max_abs_profile = max_abs_profile.max(self.psi(u)?.abs());
        }
        let tag = match derivatives.iter().position(|d| d.abs() > threshold) {
            Some(0) => FrontTag::Front,
            Some(k) => FrontTag::KNonFront(k),
            None if max_abs_profile <= threshold => FrontTag::PureFrontal(k_max),
            None => FrontTag::Degenerate,
        };
        Ok(FrontClass {
            tag,
            derivatives,
            max_abs_profile,
            threshold,
        })
    }

    /// Normalizes the chart at `(u0, 0)` so that `Ẽ = G̃ = 1`, `F̃ = 0` there.
    ///
    /// Uses `φ(s,t) = (u0 + αs + (c/2)t², βt)`.
    pub fn adapt_at_point(&self, u0: f64) -> Result<AdaptedJets> {
        let k = self.settings.order;
        let f = self.def.jet(u0, 0.0, k)?;
        let raw = LocalJets::from_f(f.clone(), self.settings.deflate_tol, false)?;
        let fu = raw.fu.value();
        let h = raw.h.value();
        let (e0, f0, g0) = (fu.dot(fu), fu.dot(h), h.dot(h));
        let det = e0 * g0 - f0 * f0;
        if e0 < 1e-20 || det < 1e-20 * e0.max(1.0) * g0.max(1.0) {
            return Err(FrontalError::Degenerate {
                u: u0,
                v: 0.0,
                what: if e0 < 1e-20 { "|f_u|^2" } else { "EG - F^2" },
                value: if e0 < 1e-20 { e0 } else { det },
            });
        }
        let alpha = 1.0 / e0.sqrt();
        let beta = (det / e0).powf(-0.25);
        let c = -beta * beta * f0 / e0;
        let base = (0.0, 0.0);
        let s = Jet2::lift(Coord::U, base, k);
        let t = Jet2::lift(Coord::V, base, k);
        let su = &s.scale_by(alpha).add_scalar(u0) + &(&t * &t).scale_by(0.5 * c);
        let sv = t.scale_by(beta);
        let composed = f.compose(&su, &sv)?;
        // The adapted chart is centred at the origin; report the real u0.
        let jets = LocalJets::from_f(composed, self.settings.deflate_tol, true).map_err(|e| match e {
            FrontalError::NotFrontal { max_offending, .. } => FrontalError::NotFrontal { u: u0, max_offending },
            FrontalError::NotPureFrontal { max_offending, .. } => {
                FrontalError::NotPureFrontal { u: u0, max_offending }
            }
            other => other,
        })?;
        let fundamentals = jets.fundamentals()?;
        let residual = (fundamentals.e.value() - 1.0)
            .abs()
            .max(fundamentals.f.value().abs())
            .max((fundamentals.g.value() - 1.0).abs());
        Ok(AdaptedJets {
            u0,
            alpha,
            beta,
            c,
            residual,
            jets,
            fundamentals,
        })
    }

    pub fn invariants_at(&self, u0: f64) -> Result<InvariantSample> {
        Ok(self.adapt_at_point(u0)?.invariants())
    }

    /// Data needed for the principal-direction machinery at `(u0, 0)`.
    fn require_non_umbilic(&self, u0: f64, inv: &InvariantSample) -> Result<()> {
        if inv.kappa_t.abs() < self.settings.umbilic_tol {
            return Err(FrontalError::Umbilic {
                u: u0,
                kappa_t: inv.kappa_t,
            });
        }
        Ok(())
    }

    /// Ridge order of `V_j` at `(u0, 0)` and the sub-parabolic flag of `V_{j+1}`.
    pub fn ridge_report(&self, u0: f64, j: usize, tol: f64) -> Result<RidgeReport> {
        let adapted = self.adapt_at_point(u0)?;
        let inv = adapted.invariants();
        self.require_non_umbilic(u0, &inv)?;
        let fund = &adapted.fundamentals;
        let (k1, k2) = fund.principal()?;
        let (kj, kother) = if j == 1 { (&k1, &k2) } else { (&k2, &k1) };
        let kappa = kj.value();
        let l = fund.l.value();
        let e = fund.e.value();
        // g = V_j κ_j = -v(M - κF) κ_u + (L - κE) κ_v, as a jet.
        let ord = kj.order() - 1;
        let v = Jet2::lift(Coord::V, (0.0, 0.0), ord);
        let a = (&fund.m.truncate(ord) - &(kj.truncate(ord) * fund.f.truncate(ord))).scale_by(-1.0);
        let b = &fund.l.truncate(ord) - &(kj.truncate(ord) * fund.e.truncate(ord));
        let g = &(&(&v * &a) * &kj.du()) + &(&b * &kj.dv());
        let vj_kj = g.value();
        let second = g.partial(0, 1)?;
        let vj_kother = (l - kappa * e) * kother.partial(0, 1)?;
        let scale = 1.0 + kappa.abs();
        let ridge_order = if vj_kj.abs() > tol * scale {
            0
        } else if second.abs() > tol * scale * scale {
            1
        } else {
            2
        };
        // Closed form of the second-order test in the normalized chart.
        let kv = kj.partial(0, 1)?;
        let closed = (inv.kappa_nu - kappa) * kj.partial(0, 2)? - inv.kappa_t * kj.partial(1, 0)?;
        Ok(RidgeReport {
            u: u0,
            j,
            kappa_j: kappa,
            vj_kappa_j: vj_kj,
            second_order: second,
            second_order_closed_form: closed,
            kappa_j_v: kv,
            ridge_order,
            sub_parabolic: vj_kother.abs() <= tol * scale,
            vj_kappa_other: vj_kother,
        })
    }

    /// `(κ₁)_v` and `(κ₂)_v` at `(u0, 0)` in the normalized chart.
    pub fn principal_v_derivatives(&self, u0: f64) -> Result<[f64; 2]> {
        let adapted = self.adapt_at_point(u0)?;
        let (k1, k2) = adapted.fundamentals.principal()?;
        Ok([k1.partial(0, 1)?, k2.partial(0, 1)?])
    }

    fn fd_steps(&self) -> [f64; 3] {
        fd_steps_for(self.def.s_range())
    }
}

/// Step sizes used for `u`-derivatives over a curve range, one per
/// derivative order.
pub fn fd_steps_for(range: (f64, f64)) -> [f64; 3] {
    let span = range.1 - range.0;
    [1e-3 * span, 5e-3 * span, 2e-2 * span]
}

/// Result of the ridge test along one principal direction.
#[derive(Debug, Clone, Serialize)]
pub struct RidgeReport {
    pub u: f64,
    pub j: usize,
    pub kappa_j: f64,
    pub vj_kappa_j: f64,
    pub second_order: f64,
    pub second_order_closed_form: f64,
    pub kappa_j_v: f64,
    /// 0: not a ridge point, 1: first-order ridge, 2: order at least two.
    pub ridge_order: usize,
    pub sub_parabolic: bool,
    pub vj_kappa_other: f64,
}

impl AdaptedJets {
    pub fn invariants(&self) -> InvariantSample {
        let fund = &self.fundamentals;
        let n1 = &fund.n1;
        let r_c = 24.0
            * (n1.coeff(0, 1) - 2.0 * fund.f.coeff(0, 1) * fund.m.value()
                - fund.g.coeff(0, 1) * n1.value());
        let fu = &self.jets.fu;
        let speed = fu.norm().expect("f_u nonzero after normalization");
        let tangent = fu.mul_scalar(&speed.recip().expect("f_u nonzero"));
        let kappa_s = tangent.du().value().dot(self.jets.h.value()) / speed.value();
        InvariantSample {
            u: self.u0,
            kappa_s,
            kappa_nu: fund.l.value(),
            kappa_t: fund.m.value(),
            kappa_c: 2.0 * fund.n.value(),
            r_b: 3.0 * n1.value(),
            r_c,
            residual: self.residual,
        }
    }
}

impl SingularCurve for Frontal {
    fn curve_range(&self) -> (f64, f64) {
        self.def.s_range()
    }

    fn invariants(&self, u: f64) -> Result<InvariantSample> {
        self.invariants_at(u)
    }

    fn speed(&self, u: f64) -> Result<[f64; 3]> {
        let jets = self.local_jets(u, 0.0, 4, false)?;
        let sigma = jets.fu.norm()?;
        Ok([sigma.value(), sigma.partial(1, 0)?, sigma.partial(2, 0)?])
    }

    fn frame(&self, u: f64) -> Result<AxisFrame> {
        let jets = self.local_jets(u, 0.0, 4, false)?;
        let tangent = jets.fu.value().normalized();
        let nu = jets.nu.value();
        Ok(AxisFrame {
            point: jets.f.value(),
            tangent,
            h: nu.cross(tangent),
            nu,
        })
    }
}

/// A derivative estimate with its Richardson error estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Arc-length derivatives of the six invariants at one point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InvariantDerivatives {
    pub u: f64,
    pub sample: InvariantSample,
    /// `d[i][k]`: derivative of order `k + 1` of invariant `i`
    /// (order as in [`InvariantSample::NAMES`]).
    pub d: [[Estimate; 3]; 6],
}

impl InvariantDerivatives {
    fn get(&self, i: usize, k: usize) -> f64 {
        self.d[i][k - 1].value
    }
    pub fn kappa_s(&self, k: usize) -> f64 {
        self.get(0, k)
    }
    pub fn kappa_nu(&self, k: usize) -> f64 {
        self.get(1, k)
    }
    pub fn kappa_t(&self, k: usize) -> f64 {
        self.get(2, k)
    }
    pub fn r_b(&self, k: usize) -> f64 {
        self.get(4, k)
    }
    pub fn r_c(&self, k: usize) -> f64 {
        self.get(5, k)
    }
}

/// Fourth-order central stencils, `k`-th derivative, step `h`.
fn central(f: &dyn Fn(f64) -> Result<[f64; 6]>, x: f64, h: f64, k: usize) -> Result<[f64; 6]> {
    let (weights, denom): (&[(f64, f64)], f64) = match k {
        1 => (&[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)], 12.0 * h),
        2 => (
            &[(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)],
            12.0 * h * h,
        ),
        _ => (
            &[
                (-3.0, 1.0),
                (-2.0, -8.0),
                (-1.0, 13.0),
                (1.0, -13.0),
                (2.0, 8.0),
                (3.0, -1.0),
            ],
            8.0 * h * h * h,
        ),
    };
    let mut acc = [0.0; 6];
    for (off, w) in weights {
        let vals = f(x + off * h)?;
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += w * v;
        }
    }
    Ok(acc.map(|a| a / denom))
}

/// Derivatives of a vector-valued function by central differences plus
/// one Richardson level; returns `[order][component]`.
pub fn richardson_derivatives(
    f: &dyn Fn(f64) -> Result<[f64; 6]>,
    x: f64,
    steps: [f64; 3],
) -> Result<[[Estimate; 6]; 3]> {
    let mut out = [[Estimate::default(); 6]; 3];
    for k in 1..=3 {
        let h = steps[k - 1];
        let coarse = central(f, x, h, k)?;
        let fine = central(f, x, h / 2.0, k)?;
        for c in 0..6 {
            let value = (16.0 * fine[c] - coarse[c]) / 15.0;
            out[k - 1][c] = Estimate {
                value,
                error: (value - fine[c]).abs(),
            };
        }
    }
    Ok(out)
}

/// Arc-length derivatives (orders 1 to 3) of the invariants along a curve.
pub fn invariant_derivatives(
    curve: &dyn SingularCurve,
    u0: f64,
    steps: [f64; 3],
) -> Result<InvariantDerivatives> {
    let (lo, hi) = curve.curve_range();
    let reach = (steps[0] * 2.0).max(steps[1] * 2.0).max(steps[2] * 3.0);
    if u0 - reach < lo - 1e-12 || u0 + reach > hi + 1e-12 {
        return Err(FrontalError::OutOfRange {
            lo: u0 - reach,
            hi: u0 + reach,
            min: lo,
            max: hi,
        });
    }
    let sample = curve.invariants(u0)?;
    let f = |u: f64| curve.invariants(u).map(|s| s.values());
    let raw = richardson_derivatives(&f, u0, steps)?;
    let [s, s1, s2] = curve.speed(u0)?;
    let mut d = [[Estimate::default(); 3]; 6];
    for i in 0..6 {
        let k1 = raw[0][i];
        let k2 = raw[1][i];
        let k3 = raw[2][i];
        // Chain rule from the curve parameter to arc length.
        let d1 = k1.value / s;
        let d2 = k2.value / (s * s) - k1.value * s1 / s.powi(3);
        let d3 = k3.value / s.powi(3) - 3.0 * k2.value * s1 / s.powi(4) - k1.value * s2 / s.powi(4)
            + 3.0 * k1.value * s1 * s1 / s.powi(5);
        d[i] = [
            Estimate {
                value: d1,
                error: k1.error / s,
            },
            Estimate {
                value: d2,
                error: k2.error / (s * s) + k1.error * (s1 / s.powi(3)).abs(),
            },
            Estimate {
                value: d3,
                error: k3.error / s.powi(3)
                    + 3.0 * k2.error * (s1 / s.powi(4)).abs()
                    + k1.error * ((s2 / s.powi(4)).abs() + 3.0 * (s1 * s1 / s.powi(5)).abs()),
            },
        ];
    }
    Ok(InvariantDerivatives { u: u0, sample, d })
}

impl Frontal {
    pub fn invariant_derivatives(&self, u0: f64) -> Result<InvariantDerivatives> {
        invariant_derivatives(self, u0, self.fd_steps())
    }
}
