//! Acceptance gate: one PASS/FAIL line per criterion. Runs as a plain
//! binary so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tetrakit::config::RunConfig;
use tetrakit::dilation::{build_dilation, verify_moments};
use tetrakit::domains::{tetrablock_membership, Criterion, Point3, MEMBERSHIP_TOL};
use tetrakit::json::to_canonical_string;
use tetrakit::suite::{
    awy_equiv_suite, chain_suite, classify_suite, dilation_suite, fundamental_suite, neat_suite, SuiteSummary,
};
use tetrakit::tetra::{fundamental_pair, OperatorTriple};

type SuiteFn = fn(usize, &RunConfig) -> SuiteSummary;

struct Gate {
    failed: usize,
    reruns: Vec<(&'static str, String, SuiteFn, usize)>,
}

impl Gate {
    fn report(&mut self, id: usize, name: &str, pass: bool, elapsed: Duration, limit: Option<f64>, detail: String) {
        let secs = elapsed.as_secs_f64();
        let in_time = limit.is_none_or(|l| secs < l);
        let ok = pass && in_time;
        if !ok {
            self.failed += 1;
        }
        let budget = limit.map(|l| format!(" (limit {l:.0}s)")).unwrap_or_default();
        println!(
            "{} [{id}] {name}: {secs:.2}s{budget}; {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
    }

    fn suite(
        &mut self,
        id: usize,
        name: &'static str,
        run: SuiteFn,
        n: usize,
        limit: f64,
        extra: impl Fn(&SuiteSummary) -> (bool, String),
    ) {
        let cfg = RunConfig::default();
        let start = Instant::now();
        let s = run(n, &cfg);
        let elapsed = start.elapsed();
        let (pass, detail) = extra(&s);
        let mut detail = format!("{} cases, {} failed; {detail}", s.cases, s.failed);
        if let Some(f) = s.failures.first() {
            detail.push_str(&format!(
                "; first failure #{} {}: {}",
                f.index,
                f.family,
                f.reasons.join(", ")
            ));
        }
        self.report(id, name, s.ok() && pass, elapsed, Some(limit), detail);
        self.reruns.push((name, to_canonical_string(&s).unwrap(), run, n));
    }
}

fn worst(s: &SuiteSummary, key: &str) -> String {
    s.worst(key)
        .map(|w| format!("{key} {w:.2e}"))
        .unwrap_or_else(|| format!("{key} n/a"))
}

fn scalar_goldens() -> (bool, String) {
    let t = OperatorTriple::real_scalar(0.5, 0.5, 0.25);
    let fp = match fundamental_pair(&t) {
        Ok(fp) => fp,
        Err(e) => return (false, e.to_string()),
    };
    let f1 = fp.dd.embed(&fp.f1).get(0, 0);
    let f2 = fp.dd.embed(&fp.f2).get(0, 0);
    let f_err = (f1.re - 0.4)
        .abs()
        .max((f2.re - 0.4).abs())
        .max(f1.im.abs())
        .max(f2.im.abs());

    let margin = tetrablock_membership(&Point3::real(0.5, 0.5, 0.25), &Criterion::ALL, MEMBERSHIP_TOL)
        .ok()
        .and_then(|v| v.margin(Criterion::Awy3))
        .unwrap_or(f64::NAN);
    let margin_err = (margin - 0.375).abs();

    let moments = build_dilation(&t, &fp, 5)
        .and_then(|m| Ok((m.dim(), verify_moments(&m, &t, 4)?)))
        .unwrap_or((0, f64::NAN));

    let pass = f_err < 1e-12 && margin_err < 1e-12 && moments.0 == 6 && moments.1 < 1e-12;
    let detail = format!(
        "|F - 0.4| {f_err:.1e}, criterion (3) margin {margin} (3/4 - 3/8), {0}x{0} moments {1:.1e}",
        moments.0, moments.1
    );
    (pass, detail)
}

fn main() -> ExitCode {
    let mut gate = Gate {
        failed: 0,
        reruns: Vec::new(),
    };

    gate.suite(1, "awy equivalence", awy_equiv_suite, 10_000, 10.0, |s| {
        let pass = s.count("disagreements") == 0 && s.count("internalInconsistency") == 0;
        let detail = format!(
            "disagreements {}, internalInconsistency {}, insideBand {}",
            s.count("disagreements"),
            s.count("internalInconsistency"),
            s.count("insideBand")
        );
        (pass, detail)
    });

    gate.suite(2, "neat round trip", neat_suite, 1_000, 5.0, |s| {
        let pass = s.count("neatMismatches") == 0;
        let detail = format!(
            "mismatches {}, grid-only misses {}, {}",
            s.count("neatMismatches"),
            s.count("neatGridMisses"),
            worst(s, "betaResidual")
        );
        (pass, detail)
    });

    gate.suite(3, "fundamental equations", fundamental_suite, 500, 60.0, |s| {
        let detail = [
            "fundamentalResidual",
            "crossRouteGap",
            "wSweepMax",
            "twoEquationResidual",
            "tAndFResidual",
        ]
        .iter()
        .map(|k| worst(s, k))
        .collect::<Vec<_>>()
        .join(", ");
        (true, format!("{detail}, tAndF checked {}", s.count("tAndFChecked")))
    });

    gate.suite(4, "implication chain", chain_suite, 500, 60.0, |s| {
        let pass = s.count("violations") == 0;
        let detail = format!(
            "violations {}, refuted {}, notRefuted {}",
            s.count("violations"),
            s.count("refuted"),
            s.count("notRefuted")
        );
        (pass, detail)
    });

    gate.suite(5, "dilation", dilation_suite, 500, 120.0, |s| {
        let detail = format!(
            "conditionsOK {}, conditionsFailed {}, {}, {}, {}",
            s.count("conditionsOK"),
            s.count("conditionsFailed"),
            worst(s, "momentResidual"),
            worst(s, "identityResidual"),
            worst(s, "recoveryAgreement")
        );
        (s.count("conditionsOK") >= 500, detail)
    });

    gate.suite(6, "classification", classify_suite, 500, 60.0, |s| {
        let pass = s.count("inconsistentUnitaryCriteria") == 0;
        let detail = format!(
            "isometries {}, nonIsometries {}, {}, {}",
            s.count("isometries"),
            s.count("nonIsometries"),
            worst(s, "n2Normality"),
            worst(s, "stampfliGap")
        );
        (pass, detail)
    });

    let start = Instant::now();
    let (pass, detail) = scalar_goldens();
    gate.report(7, "scalar goldens", pass, start.elapsed(), None, detail);

    let start = Instant::now();
    let cfg = RunConfig::default();
    let mut differing = Vec::new();
    for (name, first, run, n) in &gate.reruns {
        if to_canonical_string(&run(*n, &cfg)).unwrap() != *first {
            differing.push(*name);
        }
    }
    let detail = if differing.is_empty() {
        format!("{} suites byte-identical on rerun", gate.reruns.len())
    } else {
        format!("differs: {}", differing.join(", "))
    };
    gate.report(8, "determinism", differing.is_empty(), start.elapsed(), None, detail);

    if gate.failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria failed", gate.failed);
        ExitCode::FAILURE
    }
}
