//! Batch property suites. Cases are generated from `(seed, index)`, run
//! independently (in parallel when allowed), and reduced in index order, so
//! the summary depends only on the inputs.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classify::{is_tetrablock_isometry, is_tetrablock_isometry_on, stampfli_check, unitary_criteria};
use crate::config::RunConfig;
use crate::dilation::{
    block_spectral_radii, build_dilation, e1_block, minimality_rank, recover_fundamental_from_dilation,
    verify_model_identities, verify_moments, IsometryModelSpec,
};
use crate::domains::{
    beta_pair, gamma_boundary, gamma_margin, neat_slice, sample_near_boundary, sample_tetrablock, tetrablock_boundary,
    tetrablock_membership, Criterion, Point3, SampleMode,
};
use crate::error::{Error, Result};
use crate::families::{
    analytic_contraction, certified_triple, isometry_candidate, non_contraction, tetrablock_unitary,
};
use crate::linalg::{commutator, defect, golden_min, normality_residual, numerical_radius_with, CMatrix, C64};
use crate::tetra::{
    chain_check, check_t_and_f, check_twoneweqns, solve_fundamental_pair, OperatorTriple, SpectralBattery,
};

/// Closed-form criteria are compared only when every margin clears this.
pub const AGREEMENT_BAND: f64 = 1e-6;
pub const NEAT_GRID: usize = 64;
pub const MAX_FAILURES: usize = 20;
/// Largest matrix size drawn by the triple families.
pub const FAMILY_MAX_N: usize = 8;
/// Depth and moment degree of the dilation suite.
pub const DILATION_DEPTH: usize = 6;
pub const DILATION_DEGREE: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    AwyEquiv,
    Chain,
    Dilation,
    Classify,
}

impl FromStr for SuiteKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "awy-equiv" => Ok(SuiteKind::AwyEquiv),
            "chain" => Ok(SuiteKind::Chain),
            "dilation" => Ok(SuiteKind::Dilation),
            "classify" => Ok(SuiteKind::Classify),
            _ => Err(format!("unknown suite {s:?} (awy-equiv, chain, dilation, classify)")),
        }
    }
}

impl fmt::Display for SuiteKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SuiteKind::AwyEquiv => "awy-equiv",
            SuiteKind::Chain => "chain",
            SuiteKind::Dilation => "dilation",
            SuiteKind::Classify => "classify",
        })
    }
}

/// Parallelism cap from `TETRAKIT_THREADS`: `Some(0)` runs serially.
pub fn thread_cap() -> Option<usize> {
    std::env::var("TETRAKIT_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
}

/// `(0..n).map(f)` honouring the thread cap; results come back in index
/// order.
pub fn map_cases<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match thread_cap() {
        Some(0) => (0..n).map(f).collect(),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
            Err(_) => (0..n).map(f).collect(),
        },
        None => (0..n).into_par_iter().map(f).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseFailure {
    pub index: usize,
    pub family: String,
    pub reasons: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub n: usize,
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    /// Event counts summed over cases.
    pub counts: BTreeMap<String, usize>,
    /// Largest value of each recorded quantity over cases.
    pub worst: BTreeMap<String, f64>,
    /// First failures by index, at most `MAX_FAILURES`.
    pub failures: Vec<CaseFailure>,
}

impl SuiteSummary {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn count(&self, key: &str) -> usize {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn worst(&self, key: &str) -> Option<f64> {
        self.worst.get(key).copied()
    }
}

/// What one case observed.
#[derive(Debug, Default)]
pub struct Case {
    family: &'static str,
    reasons: Vec<String>,
    counts: BTreeMap<&'static str, usize>,
    worst: BTreeMap<&'static str, f64>,
    witness: Option<Value>,
}

impl Case {
    fn new(family: &'static str) -> Self {
        Case {
            family,
            ..Case::default()
        }
    }

    fn count(&mut self, key: &'static str) {
        *self.counts.entry(key).or_default() += 1;
    }

    fn record(&mut self, key: &'static str, v: f64) {
        let e = self.worst.entry(key).or_insert(f64::NEG_INFINITY);
        if v > *e || v.is_nan() {
            *e = v;
        }
    }

    fn fail(&mut self, reason: String) {
        self.reasons.push(reason);
    }

    fn require(&mut self, cond: bool, reason: impl FnOnce() -> String) {
        if !cond {
            self.fail(reason());
        }
    }

    fn below(&mut self, key: &'static str, v: f64, bound: f64) {
        self.record(key, v);
        if v.is_nan() || v > bound {
            self.fail(format!("{key} = {v:e} exceeds {bound:e}"));
        }
    }

    fn error(&mut self, e: Error) {
        self.count("errors");
        self.fail(e.to_string());
    }

    fn witness<T: Serialize>(&mut self, w: &T) {
        self.witness = serde_json::to_value(w).ok();
    }
}

fn reduce(kind: &str, n: usize, seed: u64, cases: Vec<Case>) -> SuiteSummary {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    let mut failures = Vec::new();
    let mut failed = 0;
    let total = cases.len();
    for (index, c) in cases.into_iter().enumerate() {
        *counts.entry(format!("family.{}", c.family)).or_default() += 1;
        for (k, v) in c.counts {
            *counts.entry(k.to_string()).or_default() += v;
        }
        for (k, v) in c.worst {
            let e = worst.entry(k.to_string()).or_insert(f64::NEG_INFINITY);
            if v > *e || v.is_nan() {
                *e = v;
            }
        }
        if !c.reasons.is_empty() {
            failed += 1;
            if failures.len() < MAX_FAILURES {
                failures.push(CaseFailure {
                    index,
                    family: c.family.to_string(),
                    reasons: c.reasons,
                    witness: c.witness,
                });
            }
        }
    }
    SuiteSummary {
        suite: kind.to_string(),
        n,
        seed,
        cases: total,
        passed: total - failed,
        failed,
        counts,
        worst,
        failures,
    }
}

pub fn run_suite(kind: SuiteKind, n: usize, cfg: &RunConfig) -> Result<SuiteSummary> {
    cfg.validate()?;
    Ok(match kind {
        SuiteKind::AwyEquiv => awy_equiv_suite(n, cfg),
        SuiteKind::Chain => chain_suite(n, cfg),
        SuiteKind::Dilation => dilation_suite(n, cfg),
        SuiteKind::Classify => classify_suite(n, cfg),
    })
}

// ---------------------------------------------------------------- points

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointClass {
    Interior,
    Boundary,
    Exterior,
    NearBoundary,
}

impl PointClass {
    const ALL: [PointClass; 4] = [
        PointClass::Interior,
        PointClass::Boundary,
        PointClass::Exterior,
        PointClass::NearBoundary,
    ];

    fn name(self) -> &'static str {
        match self {
            PointClass::Interior => "interior",
            PointClass::Boundary => "boundary",
            PointClass::Exterior => "exterior",
            PointClass::NearBoundary => "near_boundary",
        }
    }
}

/// `n` points cycling through the four classes; class `k` draws from its
/// own seed so the lists do not share streams.
pub fn point_cases(n: usize, seed: u64) -> Vec<(PointClass, Point3)> {
    let per = n.div_ceil(4);
    let lists: Vec<Vec<Point3>> = PointClass::ALL
        .iter()
        .enumerate()
        .map(|(k, class)| {
            let s = seed.wrapping_add(0x5151_0000 + k as u64);
            match class {
                PointClass::Interior => sample_tetrablock(per, SampleMode::Interior, s),
                PointClass::Boundary => sample_tetrablock(per, SampleMode::Boundary, s),
                PointClass::Exterior => sample_tetrablock(per, SampleMode::Exterior, s),
                PointClass::NearBoundary => sample_near_boundary(per, s),
            }
        })
        .collect();
    (0..n).map(|i| (PointClass::ALL[i % 4], lists[i % 4][i / 4])).collect()
}

fn awy_case(class: PointClass, x: &Point3, tol: f64, c: &mut Case) {
    let v = match tetrablock_membership(x, &Criterion::CLOSED_FORM, tol) {
        Ok(v) => v,
        Err(e @ Error::InternalInconsistency(_)) => {
            c.count("internalInconsistency");
            c.error(e);
            return;
        }
        Err(e) => return c.error(e),
    };
    let clear = v.min_abs_margin() > AGREEMENT_BAND;
    if clear {
        c.count("clearOfBand");
        let closed: Vec<bool> = v.per_criterion.values().map(|r| r.pass_closed).collect();
        let open: Vec<bool> = v.per_criterion.values().map(|r| r.pass_open).collect();
        if closed.iter().any(|&b| b != closed[0]) || open.iter().any(|&b| b != open[0]) {
            c.count("disagreements");
            c.fail("closed-form criteria disagree outside the band".into());
        }
        let expected = match class {
            PointClass::Interior => Some(v.in_open),
            PointClass::Boundary => Some(v.in_closed && !v.in_open),
            PointClass::Exterior => Some(!v.in_closed),
            PointClass::NearBoundary => None,
        };
        if expected == Some(false) {
            c.count("classMismatches");
            c.fail(format!(
                "{} sample got inOpen={} inClosed={}",
                class.name(),
                v.in_open,
                v.in_closed
            ));
        }
        match tetrablock_membership(&x.swapped(), &Criterion::CLOSED_FORM, tol) {
            Ok(w) => c.require(w.in_closed == v.in_closed, || {
                "verdict changes under (x1, x2) swap".into()
            }),
            Err(e) => c.error(e),
        }
    } else {
        c.count("insideBand");
    }
    if class == PointClass::Boundary {
        let b = tetrablock_boundary(x, tol);
        c.record("boundaryViolation", -b.margin);
        c.require(b.on_boundary, || "boundary sample fails the bE test".into());
    }

    let beta_ok = v.per_criterion.get(&Criterion::Awy9).is_some_and(|r| r.pass_closed);
    if beta_ok && x.x3.norm() < 1.0 - 1e-3 {
        let (b1, b2) = beta_pair(x);
        let r1 = (x.x1 - b1 - b2.conj() * x.x3).norm();
        let r2 = (x.x2 - b2 - b1.conj() * x.x3).norm();
        c.below("betaResidual", r1.max(r2), 1e-10);
        c.below("betaSumExcess", b1.norm() + b2.norm() - 1.0, 1e-8);
    }
}

fn neat_case(class: PointClass, x: &Point3, tol: f64, c: &mut Case) {
    let member = match tetrablock_membership(x, &Criterion::CLOSED_FORM, tol) {
        Ok(v) => v,
        Err(e) => return c.error(e),
    };
    let slice_margin = |t: f64| {
        let q = neat_slice(x, C64::from_polar(1.0, t)).expect("unimodular");
        gamma_margin(&q)
    };
    let step = std::f64::consts::TAU / NEAT_GRID as f64;
    let mut worst = (f64::INFINITY, 0.0);
    let mut all_bdry = true;
    for k in 0..NEAT_GRID {
        let t = k as f64 * step;
        let q = neat_slice(x, C64::from_polar(1.0, t)).expect("unimodular");
        let m = gamma_margin(&q);
        if m < worst.0 {
            worst = (m, t);
        }
        all_bdry &= gamma_boundary(&q, tol);
    }
    let grid_in = worst.0 >= -tol;
    // The grid can step over a short arc of bad slices; refine around the
    // worst one.
    let (_, refined) = golden_min(&slice_margin, worst.1 - step, worst.1 + step, 1e-12);
    let all_in = worst.0.min(refined) >= -tol;
    if member.min_abs_margin() > AGREEMENT_BAND {
        c.count("neatCompared");
        if grid_in != member.in_closed {
            c.count("neatGridMisses");
        }
        if all_in != member.in_closed {
            c.count("neatMismatches");
            c.fail(format!("x in closure: {}, all slices in Γ: {all_in}", member.in_closed));
        }
    }
    if matches!(class, PointClass::Interior | PointClass::Boundary) {
        let on = tetrablock_boundary(x, tol).on_boundary;
        c.require(on == all_bdry, || {
            format!("x in bE: {on}, all slices in bΓ: {all_bdry}")
        });
    }
}

pub fn awy_equiv_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let pts = point_cases(n, cfg.seed);
    let tol = cfg.tol;
    let cases = map_cases(pts.len(), |i| {
        let (class, x) = pts[i];
        let mut c = Case::new(class.name());
        awy_case(class, &x, tol, &mut c);
        neat_case(class, &x, tol, &mut c);
        if !c.reasons.is_empty() {
            c.witness(&x);
        }
        c
    });
    reduce("awy-equiv", n, cfg.seed, cases)
}

/// Slice round trip alone, on `n` points cycling through the classes.
pub fn neat_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let pts = point_cases(n, cfg.seed.wrapping_add(1));
    let tol = cfg.tol;
    let cases = map_cases(pts.len(), |i| {
        let (class, x) = pts[i];
        let mut c = Case::new(class.name());
        neat_case(class, &x, tol, &mut c);
        let v = tetrablock_membership(&x, &[Criterion::Awy9], tol);
        if let Ok(v) = v {
            if v.in_closed && x.x3.norm() < 1.0 - 1e-3 {
                let (b1, b2) = beta_pair(&x);
                let r = (x.x1 - b1 - b2.conj() * x.x3)
                    .norm()
                    .max((x.x2 - b2 - b1.conj() * x.x3).norm());
                c.below("betaResidual", r, 1e-10);
            }
        }
        if !c.reasons.is_empty() {
            c.witness(&x);
        }
        c
    });
    reduce("neat", n, cfg.seed, cases)
}

// ---------------------------------------------------------------- triples

fn fundamental_checks(t: &OperatorTriple, cfg: &RunConfig, c: &mut Case) {
    let dd = match defect(&t.p, cfg.clamp_for(&t.p)) {
        Ok(d) => d,
        Err(e) => return c.error(e),
    };
    let fp = match solve_fundamental_pair(t, &dd) {
        Ok(fp) => fp,
        Err(e) => return c.error(e),
    };
    c.below("fundamentalResidual", fp.residual1.max(fp.residual2), 1e-8);
    c.below("crossRouteGap", fp.cross_route_gap, 1e-8);
    c.below("wSweepMax", fp.w_sweep_max, 1.0 + 1e-6);
    let (ra, rb) = check_twoneweqns(t, &dd, &fp.f1, &fp.f2);
    c.below("twoEquationResidual", ra.max(rb), 1e-8);
    let comm = commutator(&fp.f1, &fp.f2).norm();
    c.record("fCommutator", comm);
    if comm < 1e-8 {
        match check_t_and_f(t, &fp) {
            Ok(r) => {
                c.count("tAndFChecked");
                c.below("tAndFResidual", r, 1e-8);
            }
            Err(Error::HypothesisFailed(_)) => c.count("tAndFSkipped"),
            Err(e) => c.error(e),
        }
    } else {
        c.count("tAndFSkipped");
    }
}

/// Fundamental-equation checks on `n` certified triples.
pub fn fundamental_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let cases = map_cases(n, |i| {
        let t = certified_triple(cfg.seed, i as u64, FAMILY_MAX_N);
        let mut c = Case::new("certified");
        fundamental_checks(&t, cfg, &mut c);
        if !c.reasons.is_empty() {
            c.witness(&t);
        }
        c
    });
    reduce("fundamental", n, cfg.seed, cases)
}

fn stage_key(stages: &[bool; 4]) -> &'static str {
    const KEYS: [&str; 16] = [
        "stages.0000",
        "stages.1000",
        "stages.0100",
        "stages.1100",
        "stages.0010",
        "stages.1010",
        "stages.0110",
        "stages.1110",
        "stages.0001",
        "stages.1001",
        "stages.0101",
        "stages.1101",
        "stages.0011",
        "stages.1011",
        "stages.0111",
        "stages.1111",
    ];
    let idx = stages
        .iter()
        .enumerate()
        .map(|(k, &b)| (b as usize) << k)
        .sum::<usize>();
    KEYS[idx]
}

/// Implication chain on `n` certified triples followed by `n`
/// non-contractions. Certified cases also run the fundamental checks.
pub fn chain_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let battery = SpectralBattery::new(cfg.battery());
    let cases = map_cases(2 * n, |i| {
        let certified = i < n;
        let t = if certified {
            certified_triple(cfg.seed, i as u64, FAMILY_MAX_N)
        } else {
            non_contraction(cfg.seed, (i - n) as u64, FAMILY_MAX_N)
        };
        let mut c = Case::new(if certified { "certified" } else { "non_contraction" });
        match chain_check(&t, &battery) {
            Ok(r) => {
                c.count(stage_key(&r.stages));
                if let Some(k) = r.violation {
                    c.count("violations");
                    c.fail(format!("stage {k} holds but stage {} fails", k + 1));
                }
                if certified {
                    c.require(r.stages.iter().all(|&s| s), || {
                        format!("certified triple has stages {:?}", r.stages)
                    });
                } else if r.battery.is_refuted() {
                    c.count("refuted");
                } else {
                    c.count("notRefuted");
                }
            }
            Err(e) => c.error(e),
        }
        if certified {
            fundamental_checks(&t, cfg, &mut c);
        }
        if !c.reasons.is_empty() {
            c.witness(&t);
        }
        c
    });
    reduce("chain", n, cfg.seed, cases)
}

fn dilation_checks(t: &OperatorTriple, cfg: &RunConfig, c: &mut Case) {
    let dd = match defect(&t.p, cfg.clamp_for(&t.p)) {
        Ok(d) => d,
        Err(e) => return c.error(e),
    };
    let fp = match solve_fundamental_pair(t, &dd) {
        Ok(fp) => fp,
        Err(e) => return c.error(e),
    };
    let m = match build_dilation(t, &fp, DILATION_DEPTH) {
        Ok(m) => m,
        Err(e) => return c.error(e),
    };
    c.record("conditionCommutator", m.commutator_residual);
    c.record("conditionNormalDifference", m.normal_difference);
    if !m.conditions_ok {
        c.count("conditionsFailed");
        c.witness(&serde_json::json!({
            "triple": t,
            "commutator": m.commutator_residual,
            "normalDifference": m.normal_difference,
        }));
        return;
    }
    c.count("conditionsOK");
    match verify_moments(&m, t, DILATION_DEGREE) {
        Ok(r) => c.below("momentResidual", r, 1e-10),
        Err(e) => c.error(e),
    }
    let ids = verify_model_identities(&m);
    let worst_id = ids.values().fold(0.0f64, |a, &b| a.max(b));
    c.below("identityResidual", worst_id, 1e-8);
    match recover_fundamental_from_dilation(&m, t, Some(&fp)) {
        Ok(rec) => {
            c.below("recoveryAgreement", rec.agreement.unwrap_or(f64::NAN), 1e-8);
            c.below(
                "recoveryEquationResidual",
                rec.equation_residuals[0].max(rec.equation_residuals[1]),
                1e-8,
            );
        }
        Err(e) => c.error(e),
    }
    let n = m.h_dim;
    let coinv = [&m.v1, &m.v2, &m.v3]
        .iter()
        .map(|v| v.block(0, n, n, m.dim() - n).norm())
        .fold(0.0, f64::max);
    c.below("coInvariance", coinv, 1e-12);
    let (r1, r2) = block_spectral_radii(&m);
    c.below("spectralRadiusV", r1.max(r2), 1.0 + 1e-6);
    let (rank, dim) = minimality_rank(&m);
    c.below("minimalityDeficit", (dim - rank) as f64, 0.0);
    if fp.w_sweep_max <= 1.0 && m.defect_rank > 0 {
        let w = numerical_radius_with(&e1_block(&m), 32).value;
        c.below("numericalRadiusE1", w, 1.0 + 1e-6);
    }
}

/// Dilation checks on `n` certified triples, then a search over `n`
/// non-normal contractions for triples whose fundamental operators fail
/// the commutativity conditions (recorded, not failures).
pub fn dilation_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let cases = map_cases(2 * n, |i| {
        let certified = i < n;
        let t = if certified {
            certified_triple(cfg.seed, i as u64, FAMILY_MAX_N)
        } else {
            analytic_contraction(cfg.seed, (i - n) as u64, 4)
        };
        let mut c = Case::new(if certified { "certified" } else { "analytic" });
        dilation_checks(&t, cfg, &mut c);
        if !c.reasons.is_empty() && c.witness.is_none() {
            c.witness(&t);
        }
        if c.reasons.is_empty() {
            c.witness = None;
        }
        c
    });
    reduce("dilation", n, cfg.seed, cases)
}

/// First `n` condition-failing analytic contractions' witnesses, for the CLI
/// fuzz example.
pub fn find_condition_failure(cfg: &RunConfig, attempts: usize) -> Option<OperatorTriple> {
    (0..attempts as u64)
        .map(|i| analytic_contraction(cfg.seed, i, 4))
        .find(|t| {
            defect(&t.p, cfg.clamp_for(&t.p))
                .and_then(|dd| solve_fundamental_pair(t, &dd))
                .and_then(|fp| build_dilation(t, &fp, 2))
                .is_ok_and(|m| !m.conditions_ok)
        })
}

fn classify_unitary(t: &OperatorTriple, battery: &SpectralBattery, c: &mut Case) {
    match unitary_criteria(t, battery) {
        Ok(u) => {
            c.require(
                u.normal_spectrum && u.relation && u.unitary_contraction && u.slices,
                || format!("unitary criteria {u:?}"),
            );
            if !u.consistent() {
                c.count("inconsistentUnitaryCriteria");
            }
        }
        Err(e) => c.error(e),
    }
    c.below("n2Normality", normality_residual(&t.b), 1e-8);
    let s = stampfli_check(&t.a, &t.b, &t.p);
    c.below("stampfliGap", s.norm_b1 - s.r_b1, 1e-6);
    c.record("hyponormalDeficit", -s.hyponormal_residual);
}

fn classify_isometry(t: &OperatorTriple, c: &mut Case) {
    match is_tetrablock_isometry(t) {
        Ok(cls) => {
            let (f3, f4) = (cls.criteria["normForm"], cls.criteria["spectralRadiusForm"]);
            c.count(if f4 { "isometries" } else { "nonIsometries" });
            c.require(f3 == f4, || format!("norm form {f3} but spectral-radius form {f4}"));
            if f4 {
                let s = stampfli_check(&t.a, &t.b, &t.p);
                c.below("stampfliGap", s.norm_b1 - s.r_b1, 1e-6);
                c.record("hyponormalDeficit", -s.hyponormal_residual);
            }
        }
        Err(e) => c.error(e),
    }
}

fn pure_model(seed: u64, index: u64) -> IsometryModelSpec {
    use crate::random::{random_unitary, stream};
    use rand::Rng;
    let mut rng = stream(seed ^ 0x7a11_0000, index);
    let e = rng.random_range(1..=3);
    let u = random_unitary(e, &mut rng);
    let mut d1 = Vec::with_capacity(e);
    let mut d2 = Vec::with_capacity(e);
    for _ in 0..e {
        let total: f64 = rng.random_range(0.0..1.0);
        let split: f64 = rng.random_range(0.0..1.0);
        d1.push(C64::from_polar(
            total * split,
            rng.random_range(0.0..std::f64::consts::TAU),
        ));
        d2.push(C64::from_polar(
            total * (1.0 - split),
            rng.random_range(0.0..std::f64::consts::TAU),
        ));
    }
    let conj = |d: &[C64]| &u * CMatrix::from_diag(d) * u.adjoint();
    IsometryModelSpec {
        tau1: conj(&d1),
        tau2: conj(&d2),
        depth: 6,
    }
}

fn classify_pure(spec: &IsometryModelSpec, c: &mut Case) {
    let t = match crate::dilation::build_pure_isometry_model(spec) {
        Ok(t) => t,
        Err(e) => return c.error(e),
    };
    let e = spec.tau1.rows();
    let keep = (spec.depth - 1) * e;
    match is_tetrablock_isometry_on(&t, keep) {
        Ok(cls) => {
            c.require(cls.criteria.values().all(|&b| b), || {
                format!("pure model criteria {:?}", cls.criteria)
            });
            c.record(
                "pureModelRelation",
                cls.evidence["relation"].max(cls.evidence["relationSwap"]),
            );
        }
        Err(err) => c.error(err),
    }
}

/// `n` tetrablock unitaries, `n` isometry-family candidates and `n` pure
/// isometry models.
pub fn classify_suite(n: usize, cfg: &RunConfig) -> SuiteSummary {
    let battery = SpectralBattery::new(cfg.battery());
    let cases = map_cases(3 * n, |i| {
        let k = (i % n.max(1)) as u64;
        match i / n.max(1) {
            0 => {
                let g = tetrablock_unitary(cfg.seed, k, 6);
                let mut c = Case::new("unitary");
                classify_unitary(&g.triple, &battery, &mut c);
                if !c.reasons.is_empty() {
                    c.witness(&g.triple);
                }
                c
            }
            1 => {
                let t = isometry_candidate(cfg.seed, k, 6);
                let mut c = Case::new("isometry_candidate");
                classify_isometry(&t, &mut c);
                if !c.reasons.is_empty() {
                    c.witness(&t);
                }
                c
            }
            _ => {
                let spec = pure_model(cfg.seed, k);
                let mut c = Case::new("pure_model");
                classify_pure(&spec, &mut c);
                if !c.reasons.is_empty() {
                    c.witness(&spec);
                }
                c
            }
        }
    });
    reduce("classify", n, cfg.seed, cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> RunConfig {
        RunConfig {
            sup_samples: 1000,
            n_polys: 16,
            ..RunConfig::default()
        }
    }

    #[test]
    fn suites_pass_small() {
        for kind in [
            SuiteKind::AwyEquiv,
            SuiteKind::Chain,
            SuiteKind::Dilation,
            SuiteKind::Classify,
        ] {
            let n = if kind == SuiteKind::AwyEquiv { 200 } else { 6 };
            let s = run_suite(kind, n, &small()).unwrap();
            assert!(s.ok(), "{kind}: {:#?}", s.failures);
        }
    }

    #[test]
    fn analytic_contractions_pass_the_chain() {
        let battery = SpectralBattery::new(small().battery());
        let mut failing_conditions = 0;
        for i in 0..12 {
            let t = analytic_contraction(3, i, 4);
            let r = chain_check(&t, &battery).unwrap();
            assert!(r.stages.iter().all(|&s| s), "{i}: {r:?}");
            let fp = crate::tetra::fundamental_pair(&t).unwrap();
            if commutator(&fp.f1, &fp.f2).norm() > 1e-6 {
                failing_conditions += 1;
            }
        }
        assert!(failing_conditions > 0);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in ["awy-equiv", "chain", "dilation", "classify"] {
            assert_eq!(s.parse::<SuiteKind>().unwrap().to_string(), s);
        }
        assert!("nope".parse::<SuiteKind>().is_err());
    }
}
