//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p spectral-action --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use spectral_action::clifford::Dims;
use spectral_action::report::{Record, Status};
use spectral_action::torus::TorusSpec;
use spectral_action::verify::{
    suite_boundary, suite_closed_densities, suite_cutoff, suite_exact_traces, suite_internal,
    suite_oracle_words, suite_potential_traces, suite_sm, suite_torus, SuiteConfig,
};

const SEED: u64 = 1;
const TOL: f64 = 1e-9;
const ALL_DIMS: [(usize, usize); 3] = [(1, 2), (1, 4), (2, 2)];

fn dims(p: usize, q: usize) -> Dims {
    Dims::new(p, q).expect("valid dims")
}

fn cfg(d: Dims, trials: usize) -> SuiteConfig {
    SuiteConfig::new(d, SEED, trials, TOL)
}

struct Outcome {
    records: Vec<Record>,
    extra: Vec<(String, bool)>,
}

impl Outcome {
    fn new(records: Vec<Record>) -> Self {
        Outcome { records, extra: Vec::new() }
    }

    fn require(&mut self, what: impl Into<String>, ok: bool) {
        self.extra.push((what.into(), ok));
    }

    fn find(&self, prefix: &str) -> Vec<&Record> {
        self.records.iter().filter(|r| r.id.starts_with(prefix)).collect()
    }
}

fn criterion(
    n: usize,
    title: &str,
    budget: Duration,
    body: impl FnOnce() -> spectral_action::Result<Outcome>,
) -> bool {
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Err(e) => (false, format!("error: {e}")),
        Ok(o) => {
            let failed: Vec<&Record> =
                o.records.iter().filter(|r| r.status == Status::Fail).collect();
            let audits = o.records.iter().filter(|r| r.status == Status::Audit).count();
            let extra_failed: Vec<&String> =
                o.extra.iter().filter(|(_, ok)| !ok).map(|(w, _)| w).collect();
            let mut detail = format!("{} records, {} audit", o.records.len(), audits);
            for r in &failed {
                detail.push_str(&format!(
                    "\n    FAIL {}: lhs {:e} rhs {:e} rel {:e}",
                    r.id, r.lhs, r.rhs, r.rel_dev
                ));
            }
            for w in &extra_failed {
                detail.push_str(&format!("\n    FAIL {w}"));
            }
            (failed.is_empty() && extra_failed.is_empty() && !o.records.is_empty(), detail)
        }
    };
    let in_time = elapsed <= budget;
    let pass = ok && in_time;
    println!(
        "criterion {n} ({title}): {} [{:.3} s of {} s; {detail}]",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs(),
    );
    if !in_time {
        println!("    FAIL runtime budget exceeded");
    }
    pass
}

fn main() -> ExitCode {
    let mut results = Vec::new();

    results.push(criterion(1, "exact trace identities", Duration::from_secs(1), || {
        let mut records = Vec::new();
        for (p, q) in ALL_DIMS {
            records.extend(suite_exact_traces(dims(p, q)));
        }
        let mut o = Outcome::new(records);
        for name in ["trace.identity", "trace.vanishing", "trace.hat_contraction"] {
            let n = o.find(name).len();
            o.require(format!("{name} present for all dims"), n == 3);
        }
        let exact = o.records.iter().all(|r| r.criterion == spectral_action::report::Criterion::Exact);
        o.require("all comparisons exact", exact);
        Ok(o)
    }));

    results.push(criterion(2, "oracle equivalence on random words", Duration::from_secs(30), || {
        let mut records = Vec::new();
        for (p, q) in ALL_DIMS {
            records.extend(suite_oracle_words(dims(p, q), SEED, 1000)?);
        }
        let mut o = Outcome::new(records);
        let samples: Vec<usize> = o.find("oracle.word_trace").iter().map(|r| r.samples).collect();
        o.require(">= 1000 words per dims", samples.len() == 3 && samples.iter().all(|&s| s >= 2000));
        Ok(o)
    }));

    results.push(criterion(3, "potential traces", Duration::from_secs(120), || {
        let mut records = Vec::new();
        for (p, q) in ALL_DIMS {
            records.extend(suite_potential_traces(&cfg(dims(p, q), 100))?);
        }
        let mut o = Outcome::new(records);
        for name in [
            "potential.trace_e[",
            "potential.trace_e_sq.oracle",
            "potential.trace_omega_sq.oracle",
            "potential.trace_i1_sq",
            "potential.trace_i2_sq",
            "potential.trace_i3_sq",
        ] {
            let found = o.find(name);
            o.require(
                format!("{name} on 100 points for all dims"),
                found.len() == 3 && found.iter().all(|r| r.samples >= 100),
            );
        }
        Ok(o)
    }));

    results.push(criterion(4, "generic Gilkey a_4 = closed form", Duration::from_secs(120), || {
        let mut records = Vec::new();
        for (p, q) in ALL_DIMS {
            records.extend(suite_closed_densities(&cfg(dims(p, q), 100))?);
        }
        let mut o = Outcome::new(records);
        let a4 = o.find("closed.a4[");
        o.require("a_4 on >= 100 points for all dims", a4.len() == 3 && a4.iter().all(|r| r.samples > 100));
        let fixture = o.find("closed.a4.constant_curvature_value[p=1,q=2]");
        o.require("constant-curvature fixture value", fixture.len() == 1);
        Ok(o)
    }));

    results.push(criterion(5, "Dirichlet boundary coefficients", Duration::from_secs(120), || {
        let mut o = Outcome::new(suite_boundary(&cfg(dims(1, 2), 100))?);
        let audit = o.find("boundary.a4.r_normal_printed");
        let ok = audit.len() == 1
            && audit[0].status == Status::Audit
            && (audit[0].lhs - 12.0).abs() < 1e-9
            && audit[0].rhs == -51.0;
        o.require("audit record with generic 12 and printed -51", ok);
        let orders = (0..5).all(|k| !o.find(&format!("boundary.a{k}.boundary")).is_empty());
        o.require("orders 0..4 compared", orders);
        Ok(o)
    }));

    results.push(criterion(6, "internal space", Duration::from_secs(120), || {
        let mut records = Vec::new();
        for (p, q) in [(1, 2), (2, 2)] {
            records.extend(suite_internal(&cfg(dims(p, q), 50))?);
        }
        let mut o = Outcome::new(records);
        let isolated = o.find("internal.trace_e_phi_sq.");
        o.require(
            "term-isolated Tr E_Φ² on 50 spaces per dims",
            isolated.len() == 12 && isolated.iter().all(|r| r.samples >= 50),
        );
        let audit = o.find("internal.trace_e_phi.printed_sign");
        o.require("Tr E_Φ sign audit", audit.len() == 2 && audit.iter().all(|r| r.status == Status::Audit));
        o.require("twisted Ω identity", o.find("internal.trace_twisted_omega_sq").len() == 2);
        Ok(o)
    }));

    results.push(criterion(7, "Standard-Model evaluators", Duration::from_secs(10), || {
        let mut o = Outcome::new(suite_sm(SEED, 100, TOL)?);
        for name in ["sm.a0_coefficient", "sm.i_new_coefficient", "sm.a4.reassembled"] {
            let r = o.find(name);
            o.require(format!("{name} passes"), r.len() == 1 && r[0].status == Status::Pass);
        }
        Ok(o)
    }));

    results.push(criterion(8, "flat torus benchmark", Duration::from_secs(120), || {
        let spec = TorusSpec::unit(dims(1, 2));
        let mut o = Outcome::new(suite_torus(&spec, 0.01, 200.0, TOL)?);
        for name in ["torus.heat_trace_a0", "torus.count_leading", "torus.zero_modes"] {
            o.require(format!("{name} present"), o.find(name).len() == 1);
        }
        Ok(o)
    }));

    results.push(criterion(9, "cut-off moments", Duration::from_secs(1), || {
        let mut o = Outcome::new(suite_cutoff());
        o.require("F_3 by quadrature", o.find("cutoff.sharp.f3_quadrature").len() == 1);
        Ok(o)
    }));

    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
