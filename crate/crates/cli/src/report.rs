//! Report assembly for `analyze` and `verify`.

use frontal_lab::classify::{classify_focal_point, classify_nr_developable, classify_nr_nondevelopable, SingularityReport, Verdict};
use frontal_lab::derived::{axis_principal, focal_jets, nr_developable_test};
use frontal_lab::frontal::{FrontClass, Frontal, FrontalError, FrontalPoint, InvariantSample, Result, RidgeReport};
use frontal_lab::surface::Param;
use frontal_lab::verify::{CheckRow, Criterion};
use serde::Serialize;

use crate::RunConfig;

const TOOL: &str = "frontal-lab";
const VERSION: &str = env!("CARGO_PKG_VERSION");
const PROFILE_SAMPLES: usize = 21;

pub fn hint(e: &FrontalError) -> &'static str {
    match e {
        FrontalError::NotFrontal { .. } => {
            "check transverse_param and singular_value: f_v must vanish on the singular level"
        }
        FrontalError::NotPureFrontal { .. } => "only pure-frontal singular points are supported; fronts are out of scope",
        FrontalError::Umbilic { .. } => "pick a point with kappa_t != 0, or lower --tol",
        FrontalError::Degenerate { .. } | FrontalError::NegativeDiscriminant { .. } => {
            "move the evaluation point or raise --order"
        }
        FrontalError::OutOfRange { .. } => "move --at away from the ends of the singular curve",
        FrontalError::Eval(_) | FrontalError::Jet(_) => "check that the expressions are defined on u_range x v_range",
        FrontalError::Precondition(_) => "see the message; the quantity does not apply at this point",
    }
}

/// A section that may fail without sinking the whole report.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Ok(T),
    Err { error: String, hint: &'static str },
}

impl<T> From<Result<T>> for Outcome<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(x) => Outcome::Ok(x),
            Err(e) => Outcome::Err {
                error: e.to_string(),
                hint: hint(&e),
            },
        }
    }
}

impl<T> Outcome<T> {
    fn ok(&self) -> Option<&T> {
        match self {
            Outcome::Ok(x) => Some(x),
            Outcome::Err { .. } => None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SurfaceInfo {
    name: String,
    x: String,
    y: String,
    z: String,
    transverse_param: Param,
    singular_value: f64,
    u_range: (f64, f64),
    v_range: (f64, f64),
}

#[derive(Debug, Serialize)]
pub struct FocalAxis {
    kappa_j: f64,
    /// `V_j ρ_j` on the axis; zero when the axis lies in `S(C_j)`.
    detector: f64,
    axis_singular: bool,
    psi: Option<f64>,
    psi_vanishes: Option<bool>,
}

#[derive(Debug, Serialize)]
pub struct FocalSection {
    j: usize,
    axis: Outcome<FocalAxis>,
    classification: Outcome<SingularityReport>,
}

#[derive(Debug, Serialize)]
pub struct NrSection {
    developable: bool,
    /// Ruling parameter of the singular point, when there is one.
    w: Option<f64>,
    classification: Option<Outcome<SingularityReport>>,
    note: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    u: f64,
    /// The same point in the surface's own coordinates.
    chart: (f64, f64),
    frontal_point: FrontalPoint,
    invariants: Outcome<InvariantSample>,
    principal_curvatures: Option<(f64, f64)>,
    front_class: Outcome<FrontClass>,
    ridges: Vec<Outcome<RidgeReport>>,
    focal: Vec<FocalSection>,
    nr: Outcome<NrSection>,
    summary: Vec<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct ProfileRow {
    pub u: f64,
    pub kappa_s: Option<f64>,
    pub kappa_nu: Option<f64>,
    pub kappa_t: Option<f64>,
    pub kappa_c: Option<f64>,
    pub r_b: Option<f64>,
    pub r_c: Option<f64>,
    pub psi: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport<'a> {
    tool: &'static str,
    version: &'static str,
    timestamp: u64,
    config: &'a RunConfig,
    surface: SurfaceInfo,
    points: Vec<PointReport>,
    pub profile: Vec<ProfileRow>,
}

pub fn analyze<'a>(fr: &Frontal, config: &'a RunConfig, timestamp: u64) -> Result<AnalyzeReport<'a>> {
    let def = &fr.def;
    let surface = SurfaceInfo {
        name: def.name.clone(),
        x: def.sources[0].clone(),
        y: def.sources[1].clone(),
        z: def.sources[2].clone(),
        transverse_param: def.transverse,
        singular_value: def.singular_value,
        u_range: def.u_range,
        v_range: def.v_range,
    };
    let points = config
        .at
        .iter()
        .map(|&u| analyze_point(fr, config, u))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnalyzeReport {
        tool: TOOL,
        version: VERSION,
        timestamp,
        config,
        surface,
        points,
        profile: profile(fr),
    })
}

fn analyze_point(fr: &Frontal, config: &RunConfig, u: f64) -> Result<PointReport> {
    let th = config.thresholds;
    let frontal_point = fr.evaluate_point(u, 0.0)?;
    let invariants: Outcome<_> = fr.invariants_at(u).into();
    let principal_curvatures = invariants.ok().map(axis_principal);
    let focal: Vec<FocalSection> = [1, 2]
        .into_iter()
        .map(|j| FocalSection {
            j,
            axis: focal_axis(fr, j, u, th.vanish).into(),
            classification: classify_focal_point(fr, j, u, th).into(),
        })
        .collect();
    let nr: Outcome<_> = nr_section(fr, u, config).into();
    let summary = summarize(u, &focal, &nr);
    Ok(PointReport {
        u,
        chart: fr.def.to_user(u, 0.0),
        frontal_point,
        invariants,
        principal_curvatures,
        front_class: fr.classify_front(u, 3).into(),
        ridges: [1, 2].into_iter().map(|j| fr.ridge_report(u, j, th.vanish).into()).collect(),
        focal,
        nr,
        summary,
    })
}

fn focal_axis(fr: &Frontal, j: usize, u: f64, tol: f64) -> Result<FocalAxis> {
    let fj = focal_jets(fr, j, u, 0.0)?;
    let detector = fj.detector.value();
    let axis_singular = detector.abs() < tol;
    let psi = if axis_singular { fj.psi() } else { None };
    Ok(FocalAxis {
        kappa_j: fj.kappa.value(),
        detector,
        axis_singular,
        psi,
        psi_vanishes: psi.map(|p| p.abs() < tol),
    })
}

fn nr_section(fr: &Frontal, u: f64, config: &RunConfig) -> Result<NrSection> {
    let th = config.thresholds;
    let developable = nr_developable_test(fr, 41, th.vanish)?.developable;
    let inv = fr.invariants_at(u)?;
    let w = (inv.kappa_nu.abs() > th.vanish).then(|| 1.0 / inv.kappa_nu);
    if developable {
        return Ok(NrSection {
            developable,
            w,
            classification: Some(classify_nr_developable(fr, u, th).into()),
            note: None,
        });
    }
    if inv.kappa_t.abs() > th.vanish {
        return Ok(NrSection {
            developable,
            w: None,
            classification: None,
            note: Some(format!("NR is regular along the ruling at u = {u}: kappa_t != 0")),
        });
    }
    let Some(w0) = w else {
        return Ok(NrSection {
            developable,
            w: None,
            classification: None,
            note: Some(format!("the singular point of the ruling at u = {u} is at infinity: kappa_nu = 0")),
        });
    };
    Ok(NrSection {
        developable,
        w,
        classification: Some(classify_nr_nondevelopable(fr, u, w0, th).into()),
        note: None,
    })
}

pub fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::CuspidalEdge => "cuspidal edge",
        Verdict::Swallowtail => "swallowtail",
        Verdict::CuspidalCrossCap => "cuspidal cross cap",
        Verdict::CuspidalS1Plus => "cuspidal S1+",
        Verdict::CrossCap => "cross cap",
        Verdict::S1Plus => "S1+ singularity",
        Verdict::S1Minus => "S1- singularity",
        Verdict::FirstKind => "singular point of the first kind",
        Verdict::SecondKind => "singular point of the second kind",
        Verdict::NotCuspidalCrossCap => "first kind, not a cuspidal cross cap",
        Verdict::Regular => "regular",
        Verdict::Degenerate => "degenerate",
        Verdict::Unclassified => "unclassified (inside the threshold band)",
    }
}

const FOCAL_NAMES: [&str; 2] = ["C₁", "C₂"];

fn summarize(u: f64, focal: &[FocalSection], nr: &Outcome<NrSection>) -> Vec<String> {
    let mut out = Vec::new();
    let verdicts: Vec<Option<Verdict>> = focal.iter().map(|s| s.classification.ok().map(|r| r.verdict)).collect();
    if verdicts.iter().all(|v| *v == Some(Verdict::Regular)) {
        out.push(format!("C₁, C₂ regular at {u}"));
    } else {
        for (name, (section, v)) in FOCAL_NAMES.iter().zip(focal.iter().zip(&verdicts)) {
            match v {
                Some(v) => out.push(format!("{name}: {} at {u}", verdict_name(*v))),
                None => out.push(format!("{name}: not classified at {u}")),
            }
            if let Some(axis) = section.axis.ok() {
                if axis.axis_singular {
                    out.push(format!("S({name}) contains the axis point at {u}"));
                }
                if axis.psi_vanishes == Some(true) {
                    out.push(format!("ψ_{name} ≈ 0 at {u}"));
                }
            }
        }
    }
    match nr.ok() {
        Some(NrSection {
            classification: Some(Outcome::Ok(r)),
            ..
        }) => out.push(format!("NR: {} at {u}", verdict_name(r.verdict))),
        Some(NrSection { note: Some(n), .. }) => out.push(n.clone()),
        _ => {}
    }
    out
}

fn profile(fr: &Frontal) -> Vec<ProfileRow> {
    let (lo, hi) = fr.def.s_range();
    (0..PROFILE_SAMPLES)
        .map(|i| {
            let u = lo + (hi - lo) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
            let psi = fr.psi(u).ok();
            match fr.invariants_at(u) {
                Ok(s) => ProfileRow {
                    u,
                    kappa_s: Some(s.kappa_s),
                    kappa_nu: Some(s.kappa_nu),
                    kappa_t: Some(s.kappa_t),
                    kappa_c: Some(s.kappa_c),
                    r_b: Some(s.r_b),
                    r_c: Some(s.r_c),
                    psi,
                    error: None,
                },
                Err(e) => ProfileRow {
                    u,
                    psi,
                    error: Some(e.to_string()),
                    ..ProfileRow::default()
                },
            }
        })
        .collect()
}

/// Tolerance columns repeated on every CSV row so the file stands alone.
fn tol_columns(config: &RunConfig) -> [(&'static str, String); 8] {
    let s = config.settings;
    [
        ("order", s.order.to_string()),
        ("deflate_tol", format!("{:?}", s.deflate_tol)),
        ("gamma_tol", format!("{:?}", s.gamma_tol)),
        ("near_axis", format!("{:?}", s.near_axis)),
        ("umbilic_tol", format!("{:?}", s.umbilic_tol)),
        ("psi_tol", format!("{:?}", s.psi_tol)),
        ("vanish", format!("{:?}", config.thresholds.vanish)),
        ("nonvanish", format!("{:?}", config.thresholds.nonvanish)),
    ]
}

pub fn csv_string<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<String>>, config: &RunConfig) -> String {
    let tol = tol_columns(config);
    let mut w = csv::Writer::from_writer(Vec::new());
    let full: Vec<&str> = header.iter().copied().chain(tol.iter().map(|(k, _)| *k)).collect();
    w.write_record(&full).expect("in-memory writer");
    for mut row in rows {
        row.extend(tol.iter().map(|(_, v)| v.clone()));
        w.write_record(&row).expect("in-memory writer");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8")
}

fn cell(x: Option<f64>) -> String {
    x.map(|x| x.to_string()).unwrap_or_default()
}

pub fn profile_csv(rows: &[ProfileRow], config: &RunConfig) -> String {
    let header = ["u", "kappa_s", "kappa_nu", "kappa_t", "kappa_c", "r_b", "r_c", "psi", "error"];
    let rows = rows.iter().map(|r| {
        vec![
            r.u.to_string(),
            cell(r.kappa_s),
            cell(r.kappa_nu),
            cell(r.kappa_t),
            cell(r.kappa_c),
            cell(r.r_b),
            cell(r.r_c),
            cell(r.psi),
            r.error.clone().unwrap_or_default(),
        ]
    });
    csv_table(&header, rows, config)
}

/// A criterion without its wall-clock time, so reruns serialize identically.
#[derive(Serialize)]
struct CriterionOut<'a> {
    number: u8,
    title: &'static str,
    pass: bool,
    known_issue: Option<&'static str>,
    rows: &'a [CheckRow],
}

#[derive(Serialize)]
pub struct VerifyReport<'a> {
    tool: &'static str,
    version: &'static str,
    timestamp: u64,
    config: &'a RunConfig,
    pass: bool,
    criteria: Vec<CriterionOut<'a>>,
}

impl<'a> VerifyReport<'a> {
    pub fn new(config: &'a RunConfig, timestamp: u64, criteria: &'a [Criterion]) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            timestamp,
            config,
            pass: criteria.iter().all(|c| c.pass),
            criteria: criteria
                .iter()
                .map(|c| CriterionOut {
                    number: c.number,
                    title: c.title,
                    pass: c.pass,
                    known_issue: c.known_issue,
                    rows: &c.rows,
                })
                .collect(),
        }
    }
}

fn verdict(r: &CheckRow) -> &'static str {
    match (r.informational, r.pass) {
        (true, _) => "info",
        (false, true) => "pass",
        (false, false) => "FAIL",
    }
}

pub fn verify_table(criteria: &[Criterion]) -> String {
    let mut out = format!(
        "{:<44} {:<28} {:>14} {:>14} {:>9} {}\n",
        "check", "anchor", "computed", "expected", "tol", "verdict"
    );
    for c in criteria {
        for r in &c.rows {
            let rel = match r.relation {
                frontal_lab::verify::Relation::Within => format!("{:.1e}", r.tolerance),
                frontal_lab::verify::Relation::Below => "<".into(),
                frontal_lab::verify::Relation::Above => ">".into(),
            };
            out.push_str(&format!(
                "{:<44} {:<28} {:>14.6e} {:>14.6e} {:>9} {}\n",
                format!("{}/{}", c.number, r.id),
                r.anchor,
                r.computed,
                r.expected,
                rel,
                verdict(r)
            ));
        }
    }
    out
}

pub fn verify_csv(criteria: &[Criterion], config: &RunConfig) -> String {
    let header = ["criterion", "id", "anchor", "computed", "expected", "tolerance", "relation", "verdict"];
    let rows = criteria.iter().flat_map(|c| {
        c.rows.iter().map(move |r| {
            vec![
                c.number.to_string(),
                r.id.clone(),
                r.anchor.clone(),
                r.computed.to_string(),
                r.expected.to_string(),
                r.tolerance.to_string(),
                format!("{:?}", r.relation).to_lowercase(),
                verdict(r).to_string(),
            ]
        })
    });
    csv_table(&header, rows, config)
}
