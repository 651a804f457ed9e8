//! Acceptance checks: each criterion evaluates independent quantities and
//! compares them against known values at stated tolerances.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{
    ab_oracle, classify_focal_point, classify_nr_developable, classify_nr_nondevelopable, phi_from_series,
    phi_oracle, pure_propagation_check, State, Thresholds, Verdict,
};
use crate::derived::{
    congruence_check, focal_curvature_prediction, focal_eval, focal_jets_from, focal_singular_trace, PointKind,
    TraceOptions,
};
use crate::expr::parse_expression;
use crate::frame::FrameCurve;
use crate::frontal::{FrontTag, Frontal, FrontalPoint, Result};
use crate::geom::Vec3;
use crate::jet::{Coord, Jet2};
use crate::registry;
use crate::surface::{Param, SurfaceDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|computed - expected| < tolerance`
    Within,
    /// `computed < expected`
    Below,
    /// `computed > expected`
    Above,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub id: String,
    pub anchor: String,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    /// Reported but not counted towards the criterion.
    pub informational: bool,
    pub note: Option<String>,
}

impl CheckRow {
    pub fn within(id: impl Into<String>, anchor: &str, computed: f64, expected: f64, tolerance: f64) -> Self {
        Self::make(id, anchor, computed, expected, tolerance, Relation::Within)
    }

    pub fn below(id: impl Into<String>, anchor: &str, computed: f64, bound: f64) -> Self {
        Self::make(id, anchor, computed, bound, 0.0, Relation::Below)
    }

    pub fn above(id: impl Into<String>, anchor: &str, computed: f64, bound: f64) -> Self {
        Self::make(id, anchor, computed, bound, 0.0, Relation::Above)
    }

    /// Boolean check shown as 1 (holds) or 0.
    pub fn flag(id: impl Into<String>, anchor: &str, holds: bool) -> Self {
        Self::within(id, anchor, if holds { 1.0 } else { 0.0 }, 1.0, 0.5)
    }

    pub fn failed(id: impl Into<String>, anchor: &str, err: impl fmt::Display) -> Self {
        Self::make(id, anchor, f64::NAN, f64::NAN, 0.0, Relation::Within).with_note(err.to_string())
    }

    fn make(id: impl Into<String>, anchor: &str, computed: f64, expected: f64, tolerance: f64, relation: Relation) -> Self {
        let pass = match relation {
            Relation::Within => (computed - expected).abs() < tolerance,
            Relation::Below => computed < expected,
            Relation::Above => computed > expected,
        };
        Self {
            id: id.into(),
            anchor: anchor.to_string(),
            computed,
            expected,
            tolerance,
            relation,
            pass,
            informational: false,
            note: None,
        }
    }

    pub fn informational(mut self) -> Self {
        self.informational = true;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub number: u8,
    pub title: &'static str,
    pub rows: Vec<CheckRow>,
    /// Documented reason a criterion is expected to stay red.
    pub known_issue: Option<&'static str>,
    pub pass: bool,
    pub seconds: f64,
}

impl Criterion {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.informational && !r.pass)
    }

    /// One-line summary, e.g. `criterion  3 PASS  12/12 ...`.
    pub fn summary(&self) -> String {
        let counted: Vec<&CheckRow> = self.rows.iter().filter(|r| !r.informational).collect();
        let ok = counted.iter().filter(|r| r.pass).count();
        let mut line = format!(
            "criterion {:>2} {}  {:>3}/{:<3} {} ({:.2}s)",
            self.number,
            if self.pass { "PASS" } else { "FAIL" },
            ok,
            counted.len(),
            self.title,
            self.seconds
        );
        if let (false, Some(issue)) = (self.pass, self.known_issue) {
            line.push_str(&format!(" [known issue: {issue}]"));
        }
        line
    }
}

pub const CRITERIA: [(u8, &str); 13] = [
    (1, "5/2-cuspidal edge invariants"),
    (2, "5/2-cuspidal edge principal curvatures"),
    (3, "focal curvatures, direct and closed form"),
    (4, "helicoid closed forms and symmetry"),
    (5, "normal congruence Jacobian factorization"),
    (6, "structural identities on grids"),
    (7, "psi classification of germs"),
    (8, "v-derivative of the principal curvature"),
    (9, "normal ruled surface classifier suite"),
    (10, "focal singular set"),
    (11, "cuspidal cross cap inequality consistency"),
    (12, "pure-frontal propagation on the helicoid"),
    (13, "jet engine partials and deflation"),
];

const HELICOID_K_ISSUE: &str = "the printed K^{C1} = 4u^4/(1+6u^2+u^4) disagrees with the \
                                computed surface, which matches 4u^4/(1+6u^2+u^4)^2";

/// Named selections of criteria: example names and suite names.
pub fn select(name: &str) -> Option<Vec<u8>> {
    let v = match name {
        "all" => (1..=13).collect(),
        "paper-52" => vec![1, 2, 3, 8, 10],
        "helicoid" => vec![4, 12],
        "ridge-fold" => vec![10],
        "classifiers" => vec![9, 11],
        "germs" => vec![7],
        "structure" => vec![5, 6],
        "jets" => vec![13],
        _ => return None,
    };
    Some(v)
}

pub fn suite_names() -> [&'static str; 8] {
    ["all", "paper-52", "helicoid", "ridge-fold", "classifiers", "germs", "structure", "jets"]
}

pub fn run(number: u8) -> Criterion {
    let start = Instant::now();
    let (rows, known_issue) = match number {
        1 => (criterion_1(), None),
        2 => (criterion_2(), None),
        3 => (criterion_3(), None),
        4 => (criterion_4(), Some(HELICOID_K_ISSUE)),
        5 => (criterion_5(), None),
        6 => (criterion_6(), None),
        7 => (criterion_7(), None),
        8 => (criterion_8(), None),
        9 => (criterion_9(), None),
        10 => (criterion_10(), None),
        11 => (criterion_11(), None),
        12 => (criterion_12(), None),
        13 => (criterion_13(), None),
        n => (vec![CheckRow::failed("unknown", "", format!("no criterion {n}"))], None),
    };
    let title = CRITERIA
        .iter()
        .find(|c| c.0 == number)
        .map_or("unknown", |c| c.1);
    let pass = !rows.is_empty() && rows.iter().all(|r| r.informational || r.pass);
    Criterion {
        number,
        title,
        rows,
        known_issue,
        pass,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<Criterion> {
    (1..=13).map(run).collect()
}

fn example(name: &str) -> Frontal {
    Frontal::new(registry::find(name).expect("built-in example").surface())
}

/// Radical-inverse (Halton) sequence: deterministic, well-spread samples.
pub fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

fn lerp(range: (f64, f64), x: f64) -> f64 {
    range.0 + (range.1 - range.0) * x
}

macro_rules! try_row {
    ($rows:expr, $id:expr, $anchor:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => {
                $rows.push(CheckRow::failed($id, $anchor, err));
                return $rows;
            }
        }
    };
}

fn criterion_1() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let fr = example("paper-52");
    let a = "5/2 example invariants";
    let d = try_row!(rows, "invariants", a, fr.invariant_derivatives(0.0));
    let expected = [2.0, 0.0, 2.0, 0.0, 0.0, 72.0];
    for ((name, value), e) in crate::frontal::InvariantSample::NAMES
        .iter()
        .zip(d.sample.values())
        .zip(expected)
    {
        rows.push(CheckRow::within(*name, a, value, e, 1e-8));
    }
    rows.push(CheckRow::within("kappa_t'", a, d.kappa_t(1), 0.0, 1e-6));
    rows.push(CheckRow::within("kappa_nu'", a, d.kappa_nu(1), -4.0, 1e-6));
    rows
}

fn criterion_2() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let fr = example("paper-52");
    let a = "5/2 example curvatures";
    let p = try_row!(rows, "point", a, fr.evaluate_point(0.0, 0.0));
    rows.push(CheckRow::within("kappa_1", a, p.kappa1, 2.0, 1e-8));
    rows.push(CheckRow::within("kappa_2", a, p.kappa2, -2.0, 1e-8));
    rows.push(CheckRow::within("K", a, p.gauss, -4.0, 1e-8));
    rows.push(CheckRow::within("H", a, p.mean, 0.0, 1e-8));
    rows
}

fn criterion_3() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let fr = example("paper-52");
    let d = try_row!(rows, "invariants", "", fr.invariant_derivatives(0.0));
    let h = 3.0 / (2.0 * SQRT_2);
    for (j, mean_expected) in [(1, -h), (2, h)] {
        let a = if j == 1 { "focal curvature of C1" } else { "focal curvature of C2" };
        let direct = try_row!(rows, format!("C{j} direct"), a, focal_eval(&fr, j, 0.0, 0.0));
        let pred = try_row!(rows, format!("C{j} closed form"), a, focal_curvature_prediction(&d, j, 1e-8));
        let (dk, dh) = (direct.gauss.unwrap_or(f64::NAN), direct.mean.unwrap_or(f64::NAN));
        rows.push(CheckRow::within(format!("K^C{j} direct"), a, dk, -1.0, 1e-8));
        rows.push(CheckRow::within(format!("H^C{j} direct"), a, dh, mean_expected, 1e-8));
        rows.push(CheckRow::within(format!("K^C{j} closed form"), a, pred.gauss, -1.0, 1e-8));
        rows.push(CheckRow::within(format!("H^C{j} closed form"), a, pred.mean, mean_expected, 1e-8));
        rows.push(CheckRow::within(format!("K^C{j} direct - closed"), a, dk - pred.gauss, 0.0, 1e-8));
        rows.push(CheckRow::within(format!("H^C{j} direct - closed"), a, dh - pred.mean, 0.0, 1e-8));
    }
    rows
}

fn delta(u: f64) -> f64 {
    (1.0 + 6.0 * u * u + u.powi(4)).sqrt()
}

/// Unit normal of the helicoid in the original chart `(u, v)`.
fn helicoid_normal(u: f64, v: f64) -> Vec3 {
    Vec3::new(2.0 * u * v.cos(), 2.0 * u * v.sin(), 1.0 + u * u) * (1.0 / delta(u))
}

/// Unit normal of `C₁`, used only to fix an orientation. The first
/// component has `+ δ sin v`; with `-` the field is neither unit nor normal.
fn helicoid_c1_normal(u: f64, v: f64) -> Vec3 {
    let d = delta(u);
    let p = 1.0 + u * u;
    Vec3::new(
        -(p * v.cos() + d * v.sin()) / (SQRT_2 * d),
        -(p * v.sin() - d * v.cos()) / (SQRT_2 * d),
        SQRT_2 * u / d,
    )
}

pub fn helicoid_c1_closed_form(u: f64, v: f64) -> Vec3 {
    let d = delta(u);
    let p = 1.0 + u * u;
    Vec3::new(
        -(d * v.cos() + p * v.sin()) / (2.0 * u),
        -(d * v.sin() - p * v.cos()) / (2.0 * u),
        -d / 4.0 * (1.0 + 1.0 / (u * u)) + v,
    )
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn criterion_4() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let fr = example("helicoid");
    let s = 0.3;
    let a = "helicoid kappa_1";
    for u in [0.5_f64, 1.0, 2.0] {
        let p = try_row!(rows, format!("kappa_1({u})"), a, fr.evaluate_point(s, u.ln()));
        let aligned = sign(p.nu.dot(helicoid_normal(u, s))) * p.kappa1;
        let d = delta(u);
        rows.push(CheckRow::within(format!("kappa_1({u})"), a, aligned, -4.0 * u * u / (d * d), 1e-9));
    }
    let a = "helicoid focal curvatures";
    for u in [0.5_f64, 2.0] {
        let fp = try_row!(rows, format!("C1({u})"), a, focal_eval(&fr, 1, s, u.ln()));
        let d = delta(u);
        let k = fp.gauss.unwrap_or(f64::NAN);
        rows.push(
            CheckRow::within(format!("K^C1({u}) printed"), a, k, 4.0 * u.powi(4) / (d * d), 1e-8)
                .with_note("printed formula; see known issue"),
        );
        rows.push(
            CheckRow::within(format!("K^C1({u}) corrected"), a, k, 4.0 * u.powi(4) / d.powi(4), 1e-8)
                .informational(),
        );
        let n = helicoid_c1_normal(u, s);
        rows.push(CheckRow::within(format!("|<nu, nu^C1>|({u})"), "helicoid C1 normal", fp.e.dot(n).abs(), 1.0, 1e-9));
        let aligned = sign(fp.e.dot(n)) * fp.mean.unwrap_or(f64::NAN);
        rows.push(CheckRow::within(
            format!("H^C1({u})"),
            a,
            aligned,
            -u / (SQRT_2 * (1.0 + u * u)),
            1e-8,
        ));
    }
    let a = "C1(1/u, v) = C1(u, v)";
    let srange = fr.def.s_range();
    let results: Vec<Result<(f64, f64)>> = (1..=50)
        .into_par_iter()
        .map(|i| {
            let s = lerp(srange, halton(i, 2));
            let t = lerp((0.05, 1.0), halton(i, 3));
            let plus = focal_eval(&fr, 1, s, t)?.c;
            let minus = focal_eval(&fr, 1, s, -t)?.c;
            let closed = helicoid_c1_closed_form(t.exp(), s);
            Ok(((plus - minus).max_abs(), (plus - closed).max_abs()))
        })
        .collect();
    let pairs = try_row!(rows, "symmetry", a, results.into_iter().collect::<Result<Vec<_>>>());
    let sym = pairs.iter().fold(0.0_f64, |m, p| m.max(p.0));
    let closed = pairs.iter().fold(0.0_f64, |m, p| m.max(p.1));
    rows.push(CheckRow::below("symmetry max |diff| (50 pts)", a, sym, 1e-12));
    rows.push(CheckRow::below("closed-form C1 max |diff|", "helicoid C1 formula", closed, 1e-9).informational());
    rows
}

/// Examples whose whole axis is pure-frontal, so every derived object exists.
pub const PURE_EXAMPLES: [&str; 6] = ["paper-52", "helicoid", "ridge-fold", "52-germ", "fold", "72-ccr"];

fn criterion_5() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let a = "det J = (1 - w k1)(1 - w k2) lambda";
    for name in PURE_EXAMPLES {
        let fr = example(name);
        let (sr, tr) = (fr.def.s_range(), fr.def.t_range());
        let samples: Vec<(f64, f64, f64)> = (1..=100)
            .map(|i| {
                (
                    lerp(sr, halton(i, 2)),
                    lerp(tr, halton(i, 3)),
                    lerp((-2.0, 2.0), halton(i, 5)),
                )
            })
            .collect();
        match congruence_check(&fr, &samples) {
            Ok(points) => {
                let worst = points.iter().fold(0.0_f64, |m, p| m.max(p.relative_residual));
                rows.push(CheckRow::below(format!("{name}: max relative residual"), a, worst, 1e-8));
            }
            Err(e) => rows.push(CheckRow::failed(name, a, e)),
        }
    }
    rows
}

#[derive(Debug, Default, Clone, Copy)]
struct GridResiduals {
    frontal: f64,
    weingarten: f64,
    focal_normal: f64,
    focal_null: f64,
    rod_axis: f64,
    rod_off_axis: f64,
    points: usize,
    focal_points: usize,
    rod_axis_points: usize,
}

impl GridResiduals {
    fn merge(mut self, o: Self) -> Self {
        self.frontal = self.frontal.max(o.frontal);
        self.weingarten = self.weingarten.max(o.weingarten);
        self.focal_normal = self.focal_normal.max(o.focal_normal);
        self.focal_null = self.focal_null.max(o.focal_null);
        self.rod_axis = self.rod_axis.max(o.rod_axis);
        self.rod_off_axis = self.rod_off_axis.max(o.rod_off_axis);
        self.points += o.points;
        self.focal_points += o.focal_points;
        self.rod_axis_points += o.rod_axis_points;
        self
    }
}

/// `dν(V_j) + κ_j df(V_j)` with the common factor `v` removed:
/// `-(M - κF)ν_u + (L - κE)ν₁ + κ x_j`, relative to the size of its terms.
fn rodrigues_residual(p: &FrontalPoint, nu_u: Vec3, j: usize) -> Option<f64> {
    let k = p.kappa(j);
    let a = p.m - k * p.ff;
    let b = p.l - k * p.e;
    let scale = a.abs() * (nu_u.norm() + k.abs() * p.f_u.norm()) + b.abs() * (p.nu1.norm() + k.abs() * p.h.norm());
    if scale < 1e-10 {
        return None;
    }
    let lhs = nu_u * (-a) + p.nu1 * b;
    Some((lhs + p.x(j) * k).norm() / scale)
}

fn grid_point(fr: &Frontal, s: f64, t: f64) -> GridResiduals {
    let mut r = GridResiduals::default();
    let order = fr.settings.order.max(6);
    let Ok(jets) = fr.local_jets(s, t, order, true) else {
        return r;
    };
    let Ok(p) = FrontalPoint::from_jets(&jets, &fr.settings) else {
        return r;
    };
    r.points = 1;
    let scale = p.f_u.norm().max(p.f_v.norm()).max(1.0);
    r.frontal = p.f_u.dot(p.nu).abs().max(p.f_v.dot(p.nu).abs()) / scale;
    let nu_u = jets.nu_u.value();
    let [x1, x2, y1, y2] = p.weingarten;
    let wscale = 1f64.max(nu_u.norm()).max(p.nu1.norm());
    let w1 = (nu_u - (p.f_u * x1 + p.h * x2)).norm();
    let w2 = (p.nu1 - (p.f_u * y1 + p.h * y2)).norm();
    r.weingarten = w1.max(w2) / wscale;
    for j in 1..=2 {
        if let Some(res) = rodrigues_residual(&p, nu_u, j) {
            if t == 0.0 {
                r.rod_axis = r.rod_axis.max(res);
                r.rod_axis_points += 1;
            } else {
                r.rod_off_axis = r.rod_off_axis.max(res);
            }
        }
        if let Ok(fj) = focal_jets_from(&jets, j) {
            let fp = crate::derived::FocalPoint::from_jets(&fj);
            r.focal_normal = r.focal_normal.max(fp.normal_residual);
            r.focal_null = r.focal_null.max(fp.null_residual);
            r.focal_points += 1;
        }
    }
    r
}

fn criterion_6() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    const N: usize = 41;
    let mut total = GridResiduals::default();
    for name in PURE_EXAMPLES {
        let fr = example(name);
        let (sr, tr) = (fr.def.s_range(), fr.def.t_range());
        let g = (0..N * N)
            .into_par_iter()
            .map(|k| {
                let s = lerp(sr, (k / N) as f64 / (N - 1) as f64);
                let mut t = lerp(tr, (k % N) as f64 / (N - 1) as f64);
                if t.abs() < 1e-14 {
                    t = 0.0;
                }
                grid_point(&fr, s, t)
            })
            .reduce(GridResiduals::default, GridResiduals::merge);
        if g.points < N * N / 2 {
            rows.push(CheckRow::failed(
                format!("{name}: grid"),
                "grid evaluation",
                format!("only {} of {} grid points evaluated", g.points, N * N),
            ));
        }
        total = total.merge(g);
    }
    let n = format!(
        "{} frontal points, {} focal points, {} axis points",
        total.points, total.focal_points, total.rod_axis_points
    );
    rows.push(CheckRow::below("frontal condition", "<f_u, nu> = <f_v, nu> = 0", total.frontal, 1e-8).with_note(n));
    rows.push(CheckRow::below("Weingarten", "nu_u, nu_1 in span(f_u, h)", total.weingarten, 1e-8));
    rows.push(CheckRow::below("<x_j, dC_j> = 0", "focal normal", total.focal_normal, 1e-8));
    rows.push(CheckRow::below("dC_j(V_j) = (V_j rho_j) nu", "null vector field", total.focal_null, 1e-8));
    rows.push(CheckRow::below(
        "dnu(V_j) = -k_j df(V_j) on the axis",
        "Rodrigues along the axis, common factor v removed",
        total.rod_axis,
        1e-8,
    ));
    rows.push(
        CheckRow::below("dnu(V_j) = -k_j df(V_j) off the axis", "Rodrigues", total.rod_off_axis, 1e-8)
            .informational(),
    );
    rows
}

fn criterion_7() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let a = "psi classification";
    let ce = try_row!(rows, "cuspidal-edge", a, example("cuspidal-edge").classify_front(0.0, 3));
    rows.push(CheckRow::flag("cuspidal-edge is Front", a, ce.tag == FrontTag::Front));
    rows.push(CheckRow::within("cuspidal-edge psi(0)", a, ce.derivatives[0], 1.5, 1e-9));
    let ccr = try_row!(rows, "ccr", a, example("ccr").classify_front(0.0, 3));
    rows.push(
        CheckRow::flag("ccr is KNonFront(1)", a, ccr.tag == FrontTag::KNonFront(1))
            .with_note(format!("{:?}", ccr.tag)),
    );
    for name in ["52-germ", "fold", "72-ccr"] {
        let c = try_row!(rows, name, a, example(name).classify_front(0.0, 3));
        rows.push(
            CheckRow::flag(format!("{name} is PureFrontal"), a, matches!(c.tag, FrontTag::PureFrontal(_)))
                .with_note(format!("{:?}", c.tag)),
        );
        rows.push(CheckRow::below(format!("{name} max |psi| on axis"), a, c.max_abs_profile, 1e-10));
    }
    rows
}

fn criterion_8() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let a = "(k_1)_v = r_c (k_1 - k_nu) / (48 sqrt(Gamma))";
    let fr = example("paper-52");
    let dv = try_row!(rows, "jets", a, fr.principal_v_derivatives(0.0));
    let inv = try_row!(rows, "invariants", a, fr.invariants_at(0.0));
    let p = try_row!(rows, "point", a, fr.evaluate_point(0.0, 0.0));
    let formula = inv.r_c * (p.kappa1 - inv.kappa_nu) / (48.0 * p.gamma.sqrt());
    rows.push(CheckRow::within("jet (k_1)_v - formula", a, dv[0] - formula, 0.0, 1e-7));
    rows.push(CheckRow::within("jet (k_1)_v", a, dv[0], 1.5, 1e-7));
    rows.push(CheckRow::within("formula", a, formula, 1.5, 1e-7));
    rows
}

/// Synthesized frame curves `(κ_s, κ_ν, κ_t)` per classifier branch.
pub const DEVELOPABLE_SUITE: [(Verdict, [&str; 2]); 12] = [
    (Verdict::CuspidalEdge, ["1", "1 + u"]),
    (Verdict::CuspidalEdge, ["2", "1 - u"]),
    (Verdict::CuspidalEdge, ["-1", "2 + u + u^2"]),
    (Verdict::Swallowtail, ["1", "1 + u^2"]),
    (Verdict::Swallowtail, ["-1", "2 - u^2"]),
    (Verdict::Swallowtail, ["2", "1 + 2*u^2 + u^3"]),
    (Verdict::CuspidalCrossCap, ["u", "1 + u"]),
    (Verdict::CuspidalCrossCap, ["-u", "2 - u"]),
    (Verdict::CuspidalCrossCap, ["u + u^2", "1 + 2*u"]),
    (Verdict::CuspidalS1Plus, ["u^2", "1 + u"]),
    (Verdict::CuspidalS1Plus, ["-u^2", "2 - u"]),
    (Verdict::CuspidalS1Plus, ["2*u^2 + u^3", "1 + u + u^2"]),
];

pub const NONDEVELOPABLE_SUITE: [(Verdict, [&str; 3]); 9] = [
    (Verdict::CrossCap, ["1", "1", "u"]),
    (Verdict::CrossCap, ["2", "1 + u", "-u"]),
    (Verdict::CrossCap, ["-1", "2", "u + u^2"]),
    (Verdict::S1Plus, ["1", "1 + u", "u^2"]),
    (Verdict::S1Plus, ["2", "1 + u", "u^2"]),
    (Verdict::S1Plus, ["1", "2 - u", "-u^2"]),
    (Verdict::S1Minus, ["-2", "1 + u", "u^2"]),
    (Verdict::S1Minus, ["1", "1 - 2*u", "u^2"]),
    (Verdict::S1Minus, ["3", "1 + u", "-u^2"]),
];

pub fn suite_curve(ks: &str, kn: &str, kt: &str) -> Result<FrameCurve> {
    FrameCurve::new(ks, kn, kt, (-0.5, 0.5), 1e-3)
}

fn criterion_9() -> Vec<CheckRow> {
    let th = Thresholds::default();
    let mut rows: Vec<Vec<CheckRow>> = DEVELOPABLE_SUITE
        .par_iter()
        .map(|(expected, [ks, kn])| {
            let mut rows = Vec::new();
            let id = format!("({ks}, {kn}, 0)");
            let a = "developable NR branch";
            let curve = try_row!(rows, id.clone(), a, suite_curve(ks, kn, "0"));
            let report = try_row!(rows, id.clone(), a, classify_nr_developable(&curve, 0.0, th));
            rows.push(
                CheckRow::flag(format!("{id} -> {expected:?}"), a, report.verdict == *expected)
                    .with_note(format!("{:?}", report.verdict)),
            );
            if report.verdict == Verdict::CuspidalS1Plus {
                let (ab_a, ab_b) = try_row!(rows, id.clone(), "AB oracle", ab_oracle(&curve, 0.0));
                rows.push(CheckRow::above(format!("{id} AB"), "AB > 0 for cuspidal S1+", ab_a * ab_b, 0.0));
            }
            rows
        })
        .collect();
    let nondev: Vec<Vec<CheckRow>> = NONDEVELOPABLE_SUITE.par_iter().map(|(expected, [ks, kn, kt])| {
        let mut rows = Vec::new();
        let id = format!("({ks}, {kn}, {kt})");
        let a = "nondevelopable NR branch";
        let curve = try_row!(rows, id.clone(), a, suite_curve(ks, kn, kt));
        let kn0 = try_row!(rows, id.clone(), a, curve.kappa_nu.eval_f64(0.0, 0.0));
        let w0 = 1.0 / kn0;
        let report = try_row!(rows, id.clone(), a, classify_nr_nondevelopable(&curve, 0.0, w0, th));
        rows.push(
            CheckRow::flag(format!("{id} -> {expected:?}"), a, report.verdict == *expected)
                .with_note(format!("{:?}", report.verdict)),
        );
        let closed = try_row!(rows, id.clone(), "phi oracle", phi_oracle(&curve, 0.0, w0, th));
        let exact = {
            let series = try_row!(rows, id.clone(), "phi series", curve.series(0.0, 6));
            let jet = |e: &crate::expr::Expr| e.eval_jet((0.0, 0.0), 3);
            let (ks_j, kn_j, kt_j) = (
                try_row!(rows, id.clone(), a, jet(&curve.kappa_s)),
                try_row!(rows, id.clone(), a, jet(&curve.kappa_nu)),
                try_row!(rows, id.clone(), a, jet(&curve.kappa_t)),
            );
            phi_from_series(&series, w0, [ks_j.value(), kn_j.coeff(1, 0), 2.0 * kt_j.coeff(2, 0)])
        };
        for (label, phi) in [("closed form", closed), ("series", exact)] {
            let agrees = match expected {
                Verdict::CrossCap => phi.whitney(th) == State::NonZero,
                Verdict::S1Plus => phi.whitney(th) == State::Zero && phi.hessian < -th.nonvanish,
                Verdict::S1Minus => phi.whitney(th) == State::Zero && phi.hessian > th.nonvanish,
                _ => false,
            };
            rows.push(
                CheckRow::flag(format!("{id} phi {label} Whitney/Hessian"), "phi oracle", agrees).with_note(format!(
                    "phi_w = {:.6e}, Hessian = {:.6e}",
                    phi.phi_w, phi.hessian
                )),
            );
        }
        if *expected != Verdict::CrossCap {
            rows.push(
                CheckRow::within(
                    format!("{id} Hessian series - formula"),
                    "phi oracle",
                    exact.hessian - exact.hessian_formula,
                    0.0,
                    1e-9,
                )
                .informational(),
            );
        }
        rows
    }).collect();
    rows.extend(nondev);
    rows.into_iter().flatten().collect()
}

fn criterion_10() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let opts = TraceOptions::default();
    let a = "zero set of V_j rho_j";
    let fr = example("ridge-fold");
    let j = 1;
    let trace = try_row!(rows, "ridge-fold trace", a, focal_singular_trace(&fr, j, opts));
    let dist = trace.distance_to((0.0, 0.0));
    rows.push(CheckRow::below("ridge-fold: distance of S(C1) to (0,0)", a, dist, 1e-10));
    let ridge = try_row!(rows, "ridge order", a, fr.ridge_report(0.0, j, 1e-6));
    let nearest = (0..trace.len()).min_by(|&x, &y| {
        let d = |k: usize| trace.params[k].0.hypot(trace.params[k].1);
        d(x).total_cmp(&d(y))
    });
    let predicted = if ridge.ridge_order == 1 {
        PointKind::FirstKind
    } else {
        PointKind::SecondKind
    };
    let kind = nearest.map(|k| trace.kinds[k]);
    rows.push(
        CheckRow::flag("ridge-fold: kind matches ridge order", "kind from ridge order", kind == Some(predicted))
            .with_note(format!("ridge order {}, kind {kind:?}", ridge.ridge_order)),
    );
    let fr = example("paper-52");
    for j in 1..=2 {
        let trace = try_row!(rows, format!("paper-52 C{j} trace"), a, focal_singular_trace(&fr, j, opts));
        rows.push(
            CheckRow::above(
                format!("paper-52: distance of S(C{j}) to 0"),
                a,
                trace.distance_to((0.0, 0.0)),
                0.05,
            )
            .with_note(format!("{} traced points", trace.len())),
        );
    }
    rows
}

/// Surface in the normal form with the listed polynomial coefficients:
/// `(u, u²a₂ + v²/2, u²a₃ + v²c₂ + v⁴c₄ + v⁵c₅)`.
pub fn normal_form(name: &str, a2: &str, a3: &str, c2: &str, c4: &str, c5: &str) -> Result<SurfaceDef> {
    let y = format!("u^2*({a2}) + v^2/2");
    let z = format!("u^2*({a3}) + v^2*({c2}) + v^4*({c4}) + v^5*({c5})");
    SurfaceDef::new(name, ["u", &y, &z], Param::V, 0.0, (-0.5, 0.5), (-0.5, 0.5))
        .map_err(|e| crate::frontal::FrontalError::Precondition(e.to_string()))
}

pub const CCR_SUITE: [[&str; 5]; 5] = [
    ["1", "0", "u", "0", "u"],
    ["1", "1/2", "u", "1/4", "u"],
    ["1/2", "1", "u + u^2", "1/8 + u", "2*u"],
    ["1", "-1", "2*u", "1/3", "u/5"],
    ["2", "1/2", "u", "u", "3*u"],
];

fn criterion_11() -> Vec<CheckRow> {
    let th = Thresholds::default();
    CCR_SUITE
        .par_iter()
        .enumerate()
        .map(|(i, [a2, a3, c2, c4, c5])| {
            let mut rows = Vec::new();
            let id = format!("normal form {}", i + 1);
            let a = "cuspidal cross cap inequality vs psi'";
            let def = try_row!(rows, id.clone(), a, normal_form(&id, a2, a3, c2, c4, c5));
            let fr = Frontal::new(def);
            let report = try_row!(rows, id.clone(), a, classify_focal_point(&fr, 1, 0.0, th));
            let value = |k: &str| report.value(k).unwrap_or(f64::NAN);
            rows.push(CheckRow::below(format!("{id}: |r_c(0)|"), a, value("r_c").abs(), th.vanish));
            rows.push(CheckRow::above(format!("{id}: |r_c'(0)|"), a, value("r_c'").abs(), th.nonvanish));
            rows.push(CheckRow::above(
                format!("{id}: |ridge second order|"),
                a,
                value("ridge_second_order").abs(),
                th.nonvanish,
            ));
            let inequality = report.verdict == Verdict::CuspidalCrossCap;
            let psi_nonzero = value("psi_c'").abs() > 1e-6;
            rows.push(
                CheckRow::flag(format!("{id}: verdict agrees with psi'"), a, inequality == psi_nonzero).with_note(
                    format!("{:?}, psi' = {:.6e}", report.verdict, value("psi_c'")),
                ),
            );
            rows
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Largest closed-form `|K^{C₁}|`, `|H^{C₁}|` of the helicoid over the internal
/// `t` range with the band `|e^t - 1| < band` removed.
fn helicoid_focal_bounds(t_range: (f64, f64), band: f64) -> (f64, f64) {
    let mut mk = 0.0_f64;
    let mut mh = 0.0_f64;
    let edges = [(1.0 - band).ln(), (1.0 + band).ln()];
    let scan = (0..=10_000).map(|k| lerp(t_range, k as f64 / 10_000.0));
    for t in scan.chain(edges) {
        let u = t.exp();
        if (u - 1.0).abs() < band || t < t_range.0 || t > t_range.1 {
            continue;
        }
        mk = mk.max(4.0 * u.powi(4) / delta(u).powi(4));
        mh = mh.max(u / (SQRT_2 * (1.0 + u * u)));
    }
    (mk, mh)
}

pub const HELICOID_BAND: f64 = 0.02;

fn criterion_12() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let fr = example("helicoid");
    let a = "pure-frontal propagation";
    let rep = try_row!(rows, "propagation", a, pure_propagation_check(&fr, 1, 1e-8, TraceOptions::default()));
    rows.push(CheckRow::flag("hypotheses (r_c = 0, first-order ridge)", a, rep.hypotheses_met).with_note(rep.notes.join("; ")));
    rows.push(CheckRow::below("S(C1) offset from the axis", a, rep.max_offset_near_axis, 1e-8));
    rows.push(
        CheckRow::below("max |psi_C1| on the axis", a, rep.max_abs_psi, 1e-8)
            .with_note(format!("{} axis points", rep.axis_points)),
    );
    let (sr, tr) = (fr.def.s_range(), fr.def.t_range());
    const N: usize = 41;
    let (mk, mh) = (0..N * N)
        .into_par_iter()
        .filter_map(|k| {
            let s = lerp(sr, (k / N) as f64 / (N - 1) as f64);
            let t = lerp(tr, (k % N) as f64 / (N - 1) as f64);
            if (t.exp() - 1.0).abs() < HELICOID_BAND {
                return None;
            }
            let p = focal_eval(&fr, 1, s, t).ok()?;
            Some((p.gauss?.abs(), p.mean?.abs()))
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0.max(y.0), x.1.max(y.1)));
    let (bk, bh) = helicoid_focal_bounds(tr, HELICOID_BAND);
    rows.push(
        CheckRow::below("max |K^C1| on the mesh", "bounded focal curvature", mk, bk + 1e-6)
            .with_note("bound from 4u^4/(1+6u^2+u^4)^2"),
    );
    rows.push(CheckRow::below("max |H^C1| on the mesh", "bounded focal curvature", mh, bh + 1e-6));
    rows
}

/// Expressions exercised by the jet checks.
pub const EXPR_CORPUS: [&str; 14] = [
    "u*v^2 + v^5/5",
    "u^2 + v^2/2",
    "-cosh(u)*sin(v)",
    "cosh(u)*cos(v)",
    "v^3*(u^2 - v^2)",
    "u*v^5",
    "sin(u)*cos(v)",
    "exp(u*v) - 1",
    "log(2 + u^2 + v)",
    "sqrt(1 + u^2 + v^2)",
    "tan(u/2 + v/3)",
    "sinh(u - v)*tanh(u + v)",
    "atan(2*u - v)",
    "u/(1 + v^2) + pi*v",
];

/// Central-difference weights `(offset, weight)` and the power of `h` in the
/// denominator for derivatives 0..3, all fourth order.
fn stencil(k: usize) -> (&'static [(f64, f64)], f64, i32) {
    match k {
        0 => (&[(0.0, 1.0)], 1.0, 0),
        1 => (&[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)], 12.0, 1),
        2 => (&[(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)], 12.0, 2),
        _ => (
            &[(-3.0, 1.0), (-2.0, -8.0), (-1.0, 13.0), (1.0, -13.0), (2.0, 8.0), (3.0, -1.0)],
            8.0,
            3,
        ),
    }
}

/// `∂^{i+j} g / ∂u^i ∂v^j` by tensor-product stencils and one Richardson level.
pub fn fd_partial(g: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, i: usize, j: usize, h: f64) -> f64 {
    let at = |h: f64| {
        let (su, du, pu) = stencil(i);
        let (sv, dv, pv) = stencil(j);
        let mut acc = 0.0;
        for (ou, wu) in su {
            for (ov, wv) in sv {
                acc += wu * wv * g(u + ou * h, v + ov * h);
            }
        }
        acc / (du * dv * h.powi(pu + pv))
    };
    let (coarse, fine) = (at(h), at(h / 2.0));
    (16.0 * fine - coarse) / 15.0
}

fn criterion_13() -> Vec<CheckRow> {
    let mut rows = Vec::new();
    let a = "jet partials vs finite differences";
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    for src in EXPR_CORPUS {
        let e = try_row!(rows, src, a, parse_expression(src));
        for k in 1..=5 {
            let (u, v) = (lerp((-0.5, 0.5), halton(k, 2)), lerp((-0.5, 0.5), halton(k, 3)));
            let jet = try_row!(rows, src, a, e.eval_jet((u, v), 3));
            let g = |x: f64, y: f64| e.eval_f64(x, y).unwrap_or(f64::NAN);
            for d in 0..=3 {
                for i in 0..=d {
                    let jp = jet.partial(i, d - i).unwrap_or(f64::NAN);
                    let fd = fd_partial(&g, u, v, i, d - i, 2e-2);
                    let err = (jp - fd).abs() / fd.abs().max(1.0);
                    if !(err <= worst) {
                        worst = err;
                        worst_at = format!("{src} at ({u:.3}, {v:.3}), d^{i}_u d^{}_v", d - i);
                    }
                }
            }
        }
    }
    rows.push(CheckRow::below("max relative error, total order <= 3", a, worst, 1e-5).with_note(worst_at));

    let a = "deflate(p v^k) = p";
    let mut exact = true;
    for src in EXPR_CORPUS {
        let e = try_row!(rows, src, a, parse_expression(src));
        for u0 in [-0.3, 0.0, 0.4] {
            let p = try_row!(rows, src, a, e.eval_jet((u0, 0.0), 7));
            let v = Jet2::lift(Coord::V, (u0, 0.0), 7);
            let mut q = p.clone();
            for k in 1..=3 {
                q = &q * &v;
                let back = try_row!(rows, src, a, q.deflate_v(k, 1e-12));
                let want = p.truncate(7 - k);
                exact &= (0..=7 - k).all(|d| (0..=d).all(|j| back.coeff(d - j, j) == want.coeff(d - j, j)));
            }
        }
    }
    rows.push(CheckRow::flag("deflate/mul round trip is exact", a, exact));
    rows
}
