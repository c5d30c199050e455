//! Wall-clock benchmarking of the checkers and differential testing of
//! their verdicts.

use std::fmt::{self, Write as _};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocontextual::{check_program_with, VarGen};
use crate::contextual;
use crate::incremental::Session;
use crate::requirements::Tuning;
use crate::syntax::{balance, ProgramNode};
use crate::synth::{synthesize, SynthConfig, NAT_CLASSES};

/// Benchmark repetition policy.
#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    pub repetitions: usize,
    /// Upper bound on warm-up batches.
    pub max_warmup_batches: usize,
    pub tuning: Tuning,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repetitions: 30,
            max_warmup_batches: 10,
            tuning: Tuning::default(),
        }
    }
}

/// Samples of one measured phase, in nanoseconds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub samples: Vec<u64>,
}

impl Timing {
    pub fn median(&self) -> u64 {
        median(&self.samples)
    }

    /// Median absolute deviation from the median.
    pub fn mad(&self) -> u64 {
        let m = self.median();
        median(&self.samples.iter().map(|s| s.abs_diff(m)).collect::<Vec<_>>())
    }
}

fn median(samples: &[u64]) -> u64 {
    if samples.is_empty() {
        return 0;
    }
    let mut v = samples.to_vec();
    v.sort_unstable();
    let mid = v.len() / 2;
    if v.len().is_multiple_of(2) {
        (v[mid - 1] + v[mid]) / 2
    } else {
        v[mid]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Contextual,
    CoInit,
    CoInc,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Contextual => "contextual",
            Phase::CoInit => "co-init",
            Phase::CoInc => "co-inc",
        })
    }
}

/// Measurements for one synthesized program.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchRow {
    pub config: SynthConfig,
    pub classes: usize,
    pub nodes: usize,
    pub contextual: Timing,
    pub co_init: Timing,
    pub co_inc: Timing,
    /// Nodes recomputed by one incremental recheck after invalidating the
    /// `Nat` classes.
    pub recomputed: usize,
}

impl BenchRow {
    pub fn speedup_init(&self) -> f64 {
        ratio(self.contextual.median(), self.co_init.median())
    }

    pub fn speedup_inc(&self) -> f64 {
        ratio(self.contextual.median(), self.co_inc.median())
    }

    /// Smallest edit count `n` with `init + n * inc < n * baseline`; `None`
    /// if incremental checks are not faster than the baseline.
    pub fn break_even(&self) -> Option<u64> {
        break_even(self.contextual.median(), self.co_init.median(), self.co_inc.median())
    }
}

fn ratio(baseline: u64, measured: u64) -> f64 {
    baseline as f64 / measured.max(1) as f64
}

pub fn break_even(baseline: u64, init: u64, inc: u64) -> Option<u64> {
    let gain = baseline.checked_sub(inc).filter(|g| *g > 0)?;
    Some(init / gain + 1)
}

/// One line of the machine-readable report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub config: String,
    pub phase: Phase,
    pub nanos: u64,
    pub recomputed: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Human-readable table of medians in milliseconds with speedups.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<40} {:>7} {:>12} {:>12} {:>8} {:>12} {:>8} {:>10} {:>10}",
            "config", "classes", "contextual", "co-init", "speedup", "co-inc", "speedup", "recomputed", "break-even"
        );
        for r in &self.rows {
            let ms = |t: &Timing| format!("{:.3}", t.median() as f64 / 1e6);
            let _ = writeln!(
                out,
                "{:<40} {:>7} {:>12} {:>12} {:>8.2} {:>12} {:>8.2} {:>10} {:>10}",
                r.config.to_string(),
                r.classes,
                ms(&r.contextual),
                ms(&r.co_init),
                r.speedup_init(),
                ms(&r.co_inc),
                r.speedup_inc(),
                format!("{}/{}", r.recomputed, r.nodes),
                r.break_even().map_or("-".to_string(), |n| n.to_string()),
            );
        }
        out
    }

    /// One record per sample.
    pub fn records(&self) -> Vec<Record> {
        let mut out = Vec::new();
        for r in &self.rows {
            let config = r.config.to_string();
            for (phase, timing, recomputed) in [
                (Phase::Contextual, &r.contextual, 0),
                (Phase::CoInit, &r.co_init, r.nodes),
                (Phase::CoInc, &r.co_inc, r.recomputed),
            ] {
                out.extend(timing.samples.iter().map(|&nanos| Record {
                    config: config.clone(),
                    phase,
                    nanos,
                    recomputed,
                }));
            }
        }
        out
    }
}

/// Runs `f` in batches until two consecutive batch medians are within 10%.
fn warm_up(max_batches: usize, mut f: impl FnMut()) {
    let mut prev: Option<u64> = None;
    for _ in 0..max_batches {
        let batch: Vec<u64> = (0..3).map(|_| time(&mut f)).collect();
        let m = median(&batch);
        if prev.is_some_and(|p| p.abs_diff(m) * 10 <= p.max(1)) {
            return;
        }
        prev = Some(m);
    }
}

fn time(f: &mut impl FnMut()) -> u64 {
    let start = Instant::now();
    f();
    u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX)
}

fn measure(opts: &BenchOptions, mut f: impl FnMut()) -> Timing {
    warm_up(opts.max_warmup_batches, &mut f);
    Timing {
        samples: (0..opts.repetitions).map(|_| time(&mut f)).collect(),
    }
}

/// Invalidates the memoized results of the `Nat` classes and their
/// ancestors. Returns the number of removed entries.
pub fn invalidate_nat(session: &mut Session) -> usize {
    let paths: Vec<_> = NAT_CLASSES
        .iter()
        .filter_map(|c| session.program().find_class(c))
        .collect();
    paths.iter().map(|p| session.invalidate(p).unwrap_or(0)).sum()
}

/// Times one configuration. Phases run sequentially.
pub fn bench_config(config: &SynthConfig, opts: &BenchOptions) -> BenchRow {
    let program = synthesize(config);
    let tuning = opts.tuning;
    let contextual = measure(opts, || {
        std::hint::black_box(contextual::check_program(&program));
    });
    let co_init = measure(opts, || {
        let mut s = Session::with_vars(program.clone(), tuning, VarGen::new());
        std::hint::black_box(s.check());
    });
    let mut session = Session::with_vars(program.clone(), tuning, VarGen::new());
    session.check();
    let mut recomputed = 0;
    let co_inc = measure(opts, || {
        invalidate_nat(&mut session);
        recomputed = std::hint::black_box(session.check()).recomputed;
    });
    BenchRow {
        config: *config,
        classes: program.classes().len(),
        nodes: program.node_count(),
        contextual,
        co_init,
        co_inc,
        recomputed,
    }
}

/// Benchmarks every configuration. Zero repetitions yield an empty report.
pub fn run_benchmark(configs: &[SynthConfig], opts: &BenchOptions) -> BenchReport {
    if opts.repetitions == 0 {
        return BenchReport::default();
    }
    BenchReport {
        rows: configs.iter().map(|c| bench_config(c, opts)).collect(),
    }
}

/// One differential-testing input.
#[derive(Clone, Debug)]
pub struct Case {
    pub name: String,
    pub program: ProgramNode,
    /// Verdict the case is known to have, if any.
    pub expect_accept: Option<bool>,
}

/// A case on which the two checkers disagree.
#[derive(Clone, Debug)]
pub struct Disagreement {
    pub name: String,
    pub contextual_accepts: bool,
    /// Smallest program found that still shows the disagreement.
    pub reproducer: ProgramNode,
}

/// A case where both checkers agree but contradict the expected verdict.
#[derive(Clone, Debug)]
pub struct Unexpected {
    pub name: String,
    pub accepted: bool,
}

#[derive(Clone, Debug, Default)]
pub struct DiffReport {
    pub total: usize,
    pub disagreements: Vec<Disagreement>,
    pub unexpected: Vec<Unexpected>,
}

impl DiffReport {
    pub fn agreement_percent(&self) -> f64 {
        if self.total == 0 {
            return 100.0;
        }
        100.0 * (self.total - self.disagreements.len()) as f64 / self.total as f64
    }

    pub fn is_clean(&self) -> bool {
        self.disagreements.is_empty() && self.unexpected.is_empty()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cases {}", self.total)?;
        writeln!(f, "agreement {:.0}%", self.agreement_percent())?;
        for d in &self.disagreements {
            writeln!(
                f,
                "disagree {}: contextual {}, co-contextual {}; reproducer:",
                d.name,
                verdict_word(d.contextual_accepts),
                verdict_word(!d.contextual_accepts)
            )?;
            write!(f, "{}", crate::syntax::render(&d.reproducer))?;
        }
        for u in &self.unexpected {
            writeln!(f, "unexpected {}: both checkers {}", u.name, verdict_word(u.accepted))?;
        }
        Ok(())
    }
}

fn verdict_word(accept: bool) -> &'static str {
    if accept {
        "accept"
    } else {
        "reject"
    }
}

/// Verdicts of the contextual and co-contextual checker.
pub fn verdicts(program: &ProgramNode, tuning: Tuning) -> (bool, bool) {
    let ctx = contextual::check_program(program).is_accept();
    let co = check_program_with(program, &mut VarGen::new(), tuning)
        .verdict
        .is_accept();
    (ctx, co)
}

/// Runs both checkers on every case in parallel.
pub fn diff_check(cases: &[Case], tuning: Tuning) -> DiffReport {
    let outcomes: Vec<(Option<Disagreement>, Option<Unexpected>)> = cases
        .par_iter()
        .map(|case| {
            let (ctx, co) = verdicts(&case.program, tuning);
            if ctx != co {
                let reproducer = minimize(&case.program, tuning);
                let d = Disagreement {
                    name: case.name.clone(),
                    contextual_accepts: ctx,
                    reproducer,
                };
                (Some(d), None)
            } else {
                let u = case.expect_accept.filter(|e| *e != ctx).map(|_| Unexpected {
                    name: case.name.clone(),
                    accepted: ctx,
                });
                (None, u)
            }
        })
        .collect();
    let mut report = DiffReport {
        total: cases.len(),
        ..DiffReport::default()
    };
    for (d, u) in outcomes {
        report.disagreements.extend(d);
        report.unexpected.extend(u);
    }
    report
}

/// Greedily deletes classes, then methods, while the checkers still
/// disagree.
pub fn minimize(program: &ProgramNode, tuning: Tuning) -> ProgramNode {
    let disagrees = |p: &ProgramNode| {
        let (a, b) = verdicts(p, tuning);
        a != b
    };
    let mut classes: Vec<_> = program.classes().into_iter().cloned().collect();
    let rebuild = |cs: &[crate::syntax::ClassDecl]| balance(cs.to_vec(), 2);
    if !disagrees(&rebuild(&classes)) {
        return program.clone();
    }
    let mut changed = true;
    while changed {
        changed = false;
        let mut i = 0;
        while i < classes.len() {
            let mut trial = classes.clone();
            trial.remove(i);
            if disagrees(&rebuild(&trial)) {
                classes = trial;
                changed = true;
            } else {
                i += 1;
            }
        }
        for c in 0..classes.len() {
            let mut m = 0;
            while m < classes[c].methods.len() {
                let mut trial = classes.clone();
                trial[c].methods.remove(m);
                if disagrees(&rebuild(&trial)) {
                    classes = trial;
                    changed = true;
                } else {
                    m += 1;
                }
            }
        }
    }
    rebuild(&classes)
}
