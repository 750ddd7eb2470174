//! End-to-end acceptance checks, one function per criterion. Shared by the
//! `acceptance` test target and the CLI `verify` subcommand.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adaptive::{chain_and, execute_all, tree_and, validate};
use crate::boolfn::BoolFn;
use crate::compiler::{
    clifford_level, compile_delta, compile_general, compile_quadratic, lempel_factor, scheme_output_oracle,
    MeasurementScheme,
};
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::qcount::{mismatch_certificate, r_ghz_exact, r_ghz_upper_symmetric};
use crate::quditext::{qudit_delta_scheme, qudit_run_all};
use crate::simulator::{expectation, ghz_state, run, run_stabilizer, stabilizer_verify, DEFAULT_TOL};
use crate::stabilizer::{nearest_quadratic, non_quadraticity, q_matrix, success_from_distance};

pub const SAMPLE_SEED: u64 = 0x6d62_7163;
pub const SAMPLE_SIZE: usize = 500;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {} ({} ms): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_ms,
            self.detail
        )
    }
}

type Check = fn() -> Result<(bool, String)>;

pub const CRITERIA: [(usize, &str, Check); 10] = [
    (1, "two-input OR scheme", criterion_1),
    (2, "delta completeness and optimality", criterion_2),
    (3, "oracle and simulator agree", criterion_3),
    (4, "half-integer phases give quadratics", criterion_4),
    (5, "success probability of nearest quadratic", criterion_5),
    (6, "degree bounded by Clifford level", criterion_6),
    (7, "quadratic resource count", criterion_7),
    (8, "symmetric function bounds", criterion_8),
    (9, "qudit delta", criterion_9),
    (10, "adaptive composition", criterion_10),
];

pub fn run_criterion(id: usize) -> Option<CriterionResult> {
    let &(id, name, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (passed, detail) = match check() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    Some(CriterionResult { id, name, passed, detail, elapsed_ms: start.elapsed().as_millis() })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0)).collect()
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn simulates_exactly(s: &MeasurementScheme, f: &BoolFn) -> Result<bool> {
    let r = run(s, Some(f), DEFAULT_TOL)?;
    let tight = r.records.iter().all(|x| (x.expectation.norm() - 1.0).abs() < DEFAULT_TOL);
    Ok(tight && r.output_fn.as_ref() == Some(f))
}

pub fn criterion_1() -> Result<(bool, String)> {
    let start = Instant::now();
    let f = BoolFn::from_anf(2, "x1*x2 + x1 + x2")?;
    let s = compile_general(&f)?;
    let half = s.qubits().iter().all(|q| q.theta.log2den() == 1);
    let sim = simulates_exactly(&s, &f)?;
    let ok = s.num_qubits() == 3 && half && sim && within(start, Duration::from_secs(1));
    Ok((ok, format!("{} qubits, half-integer phases {half}, simulated match {sim}", s.num_qubits())))
}

pub fn criterion_2() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in 2..=4 {
        let s = compile_delta(n)?;
        let delta = BoolFn::delta(n)?;
        let theta = Dyadic::new(1, n as u32 - 1);
        let shape = s.num_qubits() == (1 << n) - 1 && s.qubits().iter().all(|q| q.theta == theta);
        let sim = simulates_exactly(&s, &delta)?;
        let start = Instant::now();
        let exact = r_ghz_exact(&delta, None)?.count;
        let fast = within(start, Duration::from_secs(120));
        ok &= shape && sim && exact == (1 << n) - 1 && fast;
        detail.push(format!("n={n}: N={} exact={exact} ({} ms)", s.num_qubits(), start.elapsed().as_millis()));
    }
    Ok((ok, detail.join("; ")))
}

/// The seeded sample shared by criteria 3, 4 and 6: arity `1..=3`, up to 7
/// qubits, and phases `u/2^K` with one `K ∈ 0..=3` per scheme.
pub fn random_sample() -> Vec<MeasurementScheme> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    (0..SAMPLE_SIZE)
        .map(|_| {
            let n = rng.gen_range(1..=3usize);
            let nq = rng.gen_range(1..=7usize);
            let k = rng.gen_range(0..=3u32);
            let qubits: Vec<(usize, Dyadic)> = (0..nq)
                .map(|_| (rng.gen_range(1..1usize << n), Dyadic::new(rng.gen_range(0..2i64 << k), k)))
                .collect();
            MeasurementScheme::new(n, qubits, rng.gen_range(0..=1u8)).expect("valid by construction")
        })
        .collect()
}

pub fn criterion_3() -> Result<(bool, String)> {
    let sample = random_sample();
    let mut disagreements = 0;
    let mut inputs = 0;
    let mut deterministic = 0;
    for s in &sample {
        let psi = ghz_state(s.num_qubits())?;
        for i in 0..1usize << s.n() {
            inputs += 1;
            let v = s.phase_sum(i);
            let e = expectation(s, i, Some(&psi))?;
            let sim_det = (e.norm() - 1.0).abs() < DEFAULT_TOL;
            let agree = if v.is_integer() {
                deterministic += 1;
                let sign = if v.num() == 1 { -1.0 } else { 1.0 };
                sim_det && (e.re - sign).abs() < DEFAULT_TOL
            } else {
                !sim_det
            };
            disagreements += usize::from(!agree);
        }
    }
    Ok((
        disagreements == 0,
        format!("{} schemes, {inputs} inputs ({deterministic} deterministic), {disagreements} disagreements", sample.len()),
    ))
}

fn half_integer(s: &MeasurementScheme) -> bool {
    s.qubits().iter().all(|q| q.theta.log2den() <= 1)
}

pub fn criterion_4() -> Result<(bool, String)> {
    let mut checked = 0;
    let mut full = 0;
    let mut violations = Vec::new();
    for (idx, s) in random_sample().iter().enumerate().filter(|(_, s)| half_integer(s)) {
        checked += 1;
        let r = run(s, None, DEFAULT_TOL)?;
        let ternary = r.records.iter().all(|x| {
            x.expectation.im.abs() < DEFAULT_TOL
                && [-1.0, 0.0, 1.0].iter().any(|&t| (x.expectation.re - t).abs() < DEFAULT_TOL)
        });
        let det: Vec<usize> = r.records.iter().filter(|x| x.deterministic).map(|x| x.input).collect();
        let closed = det.iter().all(|&x| det.iter().all(|&y| det.iter().all(|&z| det.contains(&(x ^ y ^ z)))));
        let quadratic = match &r.output_fn {
            Some(f) => {
                full += 1;
                f.degree() <= 2
            }
            None => true,
        };
        if !(ternary && closed && quadratic) {
            violations.push(idx);
        }
    }
    Ok((
        violations.is_empty() && checked > 0,
        format!("{checked} half-integer schemes ({full} fully deterministic), violations {violations:?}"),
    ))
}

pub fn criterion_5() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut mismatches = 0;
    for bits in 0u32..256 {
        let f = BoolFn::from_fn(3, |x| (bits >> x) & 1 == 1)?;
        let q = nearest_quadratic(&f)?;
        let r = run_stabilizer(&compile_quadratic(&q)?, Some(&f), DEFAULT_TOL)?;
        let correct = r.records.iter().filter(|x| x.deterministic && x.output_bit == Some(f.bit(x.input))).count();
        let simulated = Rational64::new(correct as i64, 8);
        let expected = Rational64::from_integer(1) - Rational64::new(non_quadraticity(&f)? as i64, 8);
        let all_det = r.all_deterministic();
        mismatches += usize::from(simulated != expected || !all_det);
    }
    let arithmetic = success_from_distance(68, 8) == Rational64::new(47, 64);
    let fast = within(start, Duration::from_secs(60));
    Ok((
        mismatches == 0 && arithmetic && fast,
        format!("256 functions, {mismatches} mismatches; 1 - 68/256 = 47/64 {arithmetic}"),
    ))
}

pub fn criterion_6() -> Result<(bool, String)> {
    let mut checked = 0;
    let mut violations = 0;
    for s in random_sample() {
        if let Ok(f) = scheme_output_oracle(&s) {
            checked += 1;
            violations += usize::from(f.degree() > clifford_level(&s));
        }
    }
    let levels: Vec<usize> = (1..=4).map(|n| compile_delta(n).map(|s| clifford_level(&s))).collect::<Result<_>>()?;
    let tight = levels == vec![1, 2, 3, 4];
    Ok((
        violations == 0 && tight,
        format!("{checked} deterministic schemes, {violations} violations; delta levels {levels:?}"),
    ))
}

/// Every `f = l·x + Σ q_ij x_i x_j` on `n` variables, constants dropped.
pub fn quadratics(n: usize) -> Vec<BoolFn> {
    let pairs: Vec<usize> = (0..n).flat_map(|i| (i + 1..n).map(move |j| 1 << i | 1 << j)).collect();
    let total = 1usize << (n + pairs.len());
    (0..total)
        .map(|code| {
            let mono = (0..n)
                .filter(|i| (code >> i) & 1 == 1)
                .map(|i| 1 << i)
                .chain(pairs.iter().enumerate().filter(|(t, _)| (code >> (n + t)) & 1 == 1).map(|(_, &b)| b));
            crate::boolfn::Anf::from_monomials(n, mono).expect("arity small").to_bool_fn()
        })
        .collect()
}

/// Per-quadratic outcome for criterion 7.
struct QuadraticCheck {
    structural_ok: bool,
    /// Exact GHZ count minus `rk + 1`.
    excess: isize,
    is_zero: bool,
    matches_compiled: bool,
}

fn check_quadratic(f: &BoolFn) -> Result<QuadraticCheck> {
    let qf = q_matrix(f)?;
    let rk = qf.rank();
    let p = lempel_factor(&qf.q)?;
    let even = (0..f.n()).all(|i| p.column(i).count_ones() % 2 == 0);
    let factor_ok = p.transpose().mul(&p) == qf.q && even && p.nrows() == rk + 1;
    let compiled = compile_quadratic(f)?;
    let verified = stabilizer_verify(&compiled, f)?.ok;
    let count = r_ghz_exact(f, None)?.count;
    Ok(QuadraticCheck {
        structural_ok: factor_ok && verified,
        excess: count as isize - (rk as isize + 1),
        is_zero: f.weight() == 0,
        matches_compiled: count == compiled.num_qubits(),
    })
}

pub fn criterion_7() -> Result<(bool, String)> {
    let all: Vec<BoolFn> = (1..=4).flat_map(quadratics).collect();
    let checks = all.par_iter().map(check_quadratic).collect::<Result<Vec<_>>>()?;
    let total = checks.len();
    let structural_failures = checks.iter().filter(|c| !c.structural_ok).count();
    let agree = checks.iter().filter(|c| c.excess == 0).count();
    let zero = checks.iter().filter(|c| c.excess != 0 && c.is_zero).count();
    let plus_one = checks.iter().filter(|c| c.excess == 1 && !c.is_zero).count();
    let other = total - agree - zero - plus_one;
    let matches_compiled = checks.iter().filter(|c| c.matches_compiled).count();
    let or2 = BoolFn::from_anf(2, "x1*x2 + x1 + x2")?;
    let or_ok = q_matrix(&or2)?.rank() == 2 && compile_quadratic(&or2)?.num_qubits() == 3;
    let ok = structural_failures == 0 && or_ok && agree == total;
    Ok((
        ok,
        format!(
            "{total} quadratics (n<=4): factorization and stabilizer checks failed on {structural_failures}; \
             exact GHZ count equals rk+1 on {agree}, exceeds it by one on {plus_one}, \
             is 0 for the zero function on {zero}, other {other}; equals the compiled stabilizer size on \
             {matches_compiled}; OR_2 rank 2 on 3 qubits {or_ok}"
        ),
    ))
}

pub fn criterion_8() -> Result<(bool, String)> {
    let mut ok = true;
    for n in 2..=10 {
        ok &= r_ghz_upper_symmetric(n, 2)?.count == n + 1;
        ok &= r_ghz_upper_symmetric(n, n)?.count == (1 << n) - 1;
    }
    let c = mismatch_certificate()?;
    let witness = simulates_exactly(&c.f_witness, &c.f)?;
    ok &= c.counts == (7, 8) && c.degrees == (3, 2) && witness;
    Ok((
        ok,
        format!("k=2 and k=n bounds for n<=10; certificate counts {:?} degrees {:?}; witness simulated {witness}", c.counts, c.degrees),
    ))
}

pub fn criterion_9() -> Result<(bool, String)> {
    let start = Instant::now();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut detail = Vec::new();
    for n in 1..=2 {
        let s = qudit_delta_scheme(n, 3)?;
        let runs = qudit_run_all(&s, DEFAULT_TOL)?;
        for r in &runs {
            let zero = r.input.iter().all(|&v| v == 0);
            ok &= r.deterministic && r.delta == u32::from(zero);
            worst = worst.max(r.deviation);
        }
        detail.push(format!("n={n}: N={} inputs={}", s.num_qudits(), runs.len()));
    }
    ok &= worst < 1e-9 && within(start, Duration::from_secs(10));
    Ok((ok, format!("{}; max deviation {worst:.1e}", detail.join(", "))))
}

pub fn criterion_10() -> Result<(bool, String)> {
    let chain = chain_and(10)?;
    let cm = validate(&chain)?;
    let non_adaptive = compile_general(&BoolFn::and_n(10)?)?.num_qubits();
    let tree = tree_and(8)?;
    let tm = validate(&tree)?;
    let chain_fn = execute_all(&chain)?;
    let tree_fn = execute_all(&tree)?;
    let correct = chain_fn == BoolFn::and_n(10)? && tree_fn == BoolFn::and_n(8)?;
    let level_two = chain.nodes.iter().chain(&tree.nodes).all(|node| clifford_level(&node.scheme) == 2);
    let degrees = (chain_fn.degree(), tree_fn.degree());
    let ok = cm.width == 3
        && cm.volume == 27
        && non_adaptive == 1023
        && tm.depth == 3
        && correct
        && level_two
        && degrees == (10, 8);
    Ok((
        ok,
        format!(
            "chain_and(10): width {} volume {} depth {} vs non-adaptive {non_adaptive}; tree_and(8) depth {}; \
             exhaustive execution correct {correct}; components level 2 {level_two}; output degrees {degrees:?}",
            cm.width, cm.volume, cm.depth, tm.depth
        ),
    ))
}
