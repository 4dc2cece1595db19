//! The random-instance property harness behind `crjoin check`.
//!
//! Every case draws from its own generator, seeded from the run seed, the
//! corpus the suite samples from and the case index, so a failing case can be
//! reproduced alone. The `join` and `bounds` suites share a corpus.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crjoin_core::bounds::{BoundCalc, BoundValue, DEFAULT_BIT_CAP};
use crjoin_core::join::{
    crossed_point, join_all, join_improved, join_main, join_peak_left_star, join_peak_source_star,
    join_reduction_peak, join_refined, reach_backward, JoinCertificate,
};
use crjoin_core::reduction::{
    cofinal_step, count_new_redex_contractions, gross_knuth_path, mono_lift, mono_lift_path,
    star_checked, star_iter, Limits,
};
use crjoin_core::{Direction, EqualityChain, Error};

use crate::gen::{TermGen, FREE_POOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    All,
    Lemma1,
    Redexcount,
    Sizes,
    Star,
    Cofinal,
    Mono,
    Join,
    Improved,
    Bounds,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Lemma1,
        Suite::Redexcount,
        Suite::Sizes,
        Suite::Star,
        Suite::Cofinal,
        Suite::Mono,
        Suite::Join,
        Suite::Improved,
        Suite::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Lemma1 => "lemma1",
            Suite::Redexcount => "redexcount",
            Suite::Sizes => "sizes",
            Suite::Star => "star",
            Suite::Cofinal => "cofinal",
            Suite::Mono => "mono",
            Suite::Join => "join",
            Suite::Improved => "improved",
            Suite::Bounds => "bounds",
        }
    }

    fn corpus(self) -> u64 {
        match self {
            Suite::Join | Suite::Bounds => 100,
            s => s as u64,
        }
    }

    fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Suite::EACH.to_vec()
        } else {
            vec![self]
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarnessConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_term_size: u64,
    pub max_chain_length: usize,
    /// Size cap for the source terms of chains and peaks, whose joins iterate
    /// the star and so grow much faster than single reductions.
    pub max_source_size: u64,
    /// Longest random path, and the step budget of peak paths.
    pub step_fuel: usize,
    pub limits: Limits,
    pub bit_cap: u64,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            seed: 1,
            cases: 100,
            max_term_size: 20,
            max_chain_length: 6,
            max_source_size: 12,
            step_fuel: 6,
            limits: Limits {
                max_term_size: 1 << 16,
                max_path_len: 1 << 16,
            },
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

impl HarnessConfig {
    fn calc(&self) -> BoundCalc {
        BoundCalc::new(self.bit_cap)
    }

    /// The generator for one case.
    pub fn case_gen(&self, suite: Suite, case: usize) -> TermGen {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.seed.to_le_bytes());
        seed[8..16].copy_from_slice(&suite.corpus().to_le_bytes());
        seed[16..24].copy_from_slice(&(case as u64).to_le_bytes());
        let mut g = TermGen::new(ChaCha8Rng::from_seed(seed));
        g.growth_cap = self.limits.max_term_size.min(1 << 12);
        g
    }
}

enum CaseError {
    Fail(String),
    /// The case hit a resource cap or drew an unusable instance.
    Skip,
}

impl From<Error> for CaseError {
    fn from(e: Error) -> Self {
        if e.is_resource_cap() {
            CaseError::Skip
        } else {
            CaseError::Fail(e.to_string())
        }
    }
}

type Case = Result<(), CaseError>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(CaseError::Fail(format!($($msg)+)));
        }
    };
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CaseFailure {
    pub case: usize,
    pub message: String,
    /// Command line that replays the run up to and including this case.
    pub reproduce: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub failures: Vec<CaseFailure>,
    /// Suite-specific tallies, e.g. how many peaks improved on the corollary.
    pub tallies: BTreeMap<String, usize>,
}

impl SuiteReport {
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.passed + self.failed + self.skipped;
        if total == 0 {
            0.0
        } else {
            self.skipped as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub cases: usize,
    pub suites: Vec<SuiteReport>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.suites.iter().all(|s| s.failed == 0)
    }

    pub fn suite(&self, suite: Suite) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.suite == suite)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed {} cases {}", self.seed, self.cases);
        for s in &self.suites {
            let _ = write!(
                out,
                "{:<10} passed {:>5}  failed {:>3}  skipped {:>3} ({:.1}%)",
                s.suite.name(),
                s.passed,
                s.failed,
                s.skipped,
                100.0 * s.skipped_fraction()
            );
            for (k, v) in &s.tallies {
                let _ = write!(out, "  {k} {v}");
            }
            out.push('\n');
            for f in &s.failures {
                let _ = writeln!(
                    out,
                    "  case {}: {}\n    rerun: {}",
                    f.case, f.message, f.reproduce
                );
            }
        }
        let _ = writeln!(
            out,
            "{}",
            if self.ok() {
                "all checks passed"
            } else {
                "CHECKS FAILED"
            }
        );
        out
    }
}

pub fn run(config: &HarnessConfig, suite: Suite) -> CheckReport {
    let suites = suite
        .expand()
        .into_iter()
        .map(|s| run_suite(config, s))
        .collect();
    CheckReport {
        seed: config.seed,
        cases: config.cases,
        suites,
    }
}

pub fn run_suite(config: &HarnessConfig, suite: Suite) -> SuiteReport {
    let mut report = SuiteReport {
        suite,
        passed: 0,
        failed: 0,
        skipped: 0,
        failures: Vec::new(),
        tallies: BTreeMap::new(),
    };
    for case in 0..config.cases {
        let mut g = config.case_gen(suite, case);
        let outcome = match suite {
            Suite::All => unreachable!("expanded before running"),
            Suite::Lemma1 => lemma1(config, &mut g),
            Suite::Redexcount => redex_count(config, &mut g),
            Suite::Sizes => sizes(config, &mut g),
            Suite::Star => star(config, &mut g),
            Suite::Cofinal => cofinal(config, &mut g),
            Suite::Mono => mono(config, &mut g),
            Suite::Join => join(config, &mut g),
            Suite::Improved => improved(config, &mut g, &mut report.tallies),
            Suite::Bounds => bounds(config, &mut g),
        };
        match outcome {
            Ok(()) => report.passed += 1,
            Err(CaseError::Skip) => report.skipped += 1,
            Err(CaseError::Fail(message)) => {
                report.failed += 1;
                report.failures.push(CaseFailure {
                    case,
                    message,
                    reproduce: format!(
                        "crjoin check --suite {} --seed {} --cases {} --max-size {} --fuel {}",
                        suite.name(),
                        config.seed,
                        case + 1,
                        config.max_term_size,
                        config.step_fuel
                    ),
                });
            }
        }
    }
    report
}

fn half_minus_one(size: u64) -> u64 {
    if size >= 4 {
        size / 2 - 1
    } else {
        0
    }
}

fn lemma1(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let m = g.term(c.max_term_size);
    let n = g.term(c.max_term_size);
    let x = FREE_POOL[g.rng.gen_range(0..FREE_POOL.len())];
    let lhs = m.substitute(x, &n).size();
    let rhs = m.size() + m.free_occurrences(x) * (n.size() - 1);
    ensure!(lhs == rhs, "|m[{x}:=n]| = {lhs}, identity gives {rhs}");
    Ok(())
}

fn redex_count(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let t = g.term(c.max_term_size);
    let n = t.redex_count();
    ensure!(
        n <= half_minus_one(t.size()),
        "{n} redexes in a term of size {}",
        t.size()
    );
    Ok(())
}

fn sizes(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let t = g.reducible_term(c.max_term_size);
    let len = g.rng.gen_range(1..=c.step_fuel.max(1));
    let p = g.path(&t, len);
    if p.is_empty() {
        return Err(CaseError::Skip);
    }
    let v = c.calc().size_after_steps(t.size(), p.len() as u64);
    ensure!(
        v.exceeds(p.end().size()),
        "size {} after {} steps from size {} is not below {v}",
        p.end().size(),
        p.len(),
        t.size()
    );
    Ok(())
}

fn star(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let t = g.term(c.max_term_size);
    let s = star_checked(&t, &c.limits)?;
    ensure!(
        c.calc().star_size_bound(t.size()).admits(s.size()),
        "|M*| = {} for |M| = {}",
        s.size(),
        t.size()
    );
    let p = gross_knuth_path(&t, &c.limits)?;
    ensure!(*p.end() == s, "complete development misses M*");
    ensure!(
        p.len() as u64 <= half_minus_one(t.size()),
        "development of length {} from size {}",
        p.len(),
        t.size()
    );
    Ok(())
}

fn single_step(c: &HarnessConfig, g: &mut TermGen) -> Result<crjoin_core::Step, CaseError> {
    let t = g.reducible_term(c.max_term_size);
    g.random_step(&t).ok_or(CaseError::Skip)
}

fn cofinal(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let s = single_step(c, g)?;
    let p = cofinal_step(&s, &c.limits)?;
    p.validate()?;
    ensure!(*p.start() == s.target, "cofinal path does not start at N");
    ensure!(
        *p.end() == star_checked(&s.source, &c.limits)?,
        "cofinal path misses M*"
    );
    ensure!(
        p.len() as u64 <= half_minus_one(s.target.size()),
        "cofinal path of length {} from |N| = {}",
        p.len(),
        s.target.size()
    );
    Ok(())
}

fn mono(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let s = single_step(c, g)?;
    let p = mono_lift(&s, &c.limits)?;
    p.validate()?;
    let m_star = star_checked(&s.source, &c.limits)?;
    ensure!(*p.start() == m_star, "lift does not start at M*");
    ensure!(
        *p.end() == star_checked(&s.target, &c.limits)?,
        "lift misses N*"
    );
    ensure!(
        (p.len() as u64) < m_star.size(),
        "lift of length {} from |M*| = {}",
        p.len(),
        m_star.size()
    );
    Ok(())
}

fn replays(cert: &JoinCertificate, c: &EqualityChain) -> Case {
    cert.verify_between(c.first(), c.last())
        .map_err(|e| CaseError::Fail(format!("{} does not replay: {e}", cert.descriptor)))
}

fn join(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let k = g.rng.gen_range(0..=c.max_chain_length);
    let chain = g.chain(c.max_source_size, k);
    chain.validate()?;
    let lim = &c.limits;
    let (r, l) = (chain.right_count(), chain.left_count());

    let (a, b) = join_main(&chain, lim)?;
    replays(&a, &chain)?;
    replays(&b, &chain)?;
    ensure!(
        a.reduct == star_iter(chain.first(), r, lim)?,
        "main join misses M_0^(r*)"
    );
    ensure!(
        b.reduct == star_iter(chain.last(), l, lim)?,
        "main join misses M_k^(l*)"
    );

    let refined = join_refined(&chain, lim)?;
    replays(&refined, &chain)?;
    let (pivot, m_l) = crossed_point(&chain);
    ensure!(m_l <= r.min(l), "m_l = {m_l} exceeds min(l, r)");
    ensure!(
        refined.reduct == star_iter(&chain.terms()[pivot], m_l, lim)?,
        "refined join misses M_r^(m_l*)"
    );
    let valley = chain
        .arrows()
        .skip_while(|d| *d == Direction::Right)
        .all(|d| d == Direction::Left);
    if valley {
        ensure!(
            m_l == 0 && refined.reduct == chain.terms()[r],
            "valley not joined at M_r"
        );
    }

    let all = join_all(&chain, lim)?;
    for cert in all.before.iter().chain(&all.after) {
        replays(cert, &chain)?;
    }
    ensure!(
        all.before[0].reduct == refined.reduct,
        "theorem join (0, 0) is not the crossed point"
    );
    ensure!(
        all.after[0].reduct == refined.reduct,
        "theorem join (0, 0) is not the crossed point"
    );
    ensure!(
        all.before[r].reduct == a.reduct,
        "theorem join (r, l) differs from the main lemma"
    );
    ensure!(
        all.after[l].reduct == b.reduct,
        "theorem join (r, l) differs from the main lemma"
    );
    Ok(())
}

/// `(left, right)` components of CR-eq for a chain, with its TermSize.
fn cr_eq(calc: &BoundCalc, c: &EqualityChain) -> (BoundValue, BoundValue) {
    let arrows: Vec<Direction> = c.arrows().collect();
    let t = calc.cr_eq_bound(&arrows, c.first().size(), &calc.term_size_chain(c));
    (t.left, t.right)
}

/// Path-length checks of the main and refined joins of `chain`, as
/// `(name, actual, bound)`.
pub fn chain_bound_checks(
    calc: &BoundCalc,
    chain: &EqualityChain,
    main: &(JoinCertificate, JoinCertificate),
    refined: &JoinCertificate,
) -> crjoin_core::Result<Vec<(&'static str, usize, BoundValue)>> {
    let (a, b) = main;
    let r = chain.right_count();
    let (gk, back) = cr_eq(calc, chain);
    let (gk_rev, back_rev) = cr_eq(calc, &chain.reverse());
    let (_, fwd) = cr_eq(calc, &chain.slice(0, r)?.reverse());
    let (_, bwd) = cr_eq(calc, &chain.slice(r, chain.len())?);
    Ok(vec![
        ("main M_0 side, left", a.left.len(), gk),
        ("main M_0 side, right", a.right.len(), back),
        ("main M_k side, left", b.left.len(), back_rev),
        ("main M_k side, right", b.right.len(), gk_rev),
        ("refined, left", refined.left.len(), fwd),
        ("refined, right", refined.right.len(), bwd),
    ])
}

fn bounds(c: &HarnessConfig, g: &mut TermGen) -> Case {
    let calc = c.calc();
    let lim = &c.limits;
    let k = g.rng.gen_range(0..=c.max_chain_length);
    let chain = g.chain(c.max_source_size, k);
    let main = join_main(&chain, lim)?;
    let refined = join_refined(&chain, lim)?;
    for (name, actual, bound) in chain_bound_checks(&calc, &chain, &main, &refined)? {
        ensure!(
            bound.admits(actual as u64),
            "{name}: length {actual} above CR-eq {bound}"
        );
    }
    let cap = calc.term_size_chain(&chain);
    for t in chain.terms() {
        ensure!(
            cap.admits(t.size()),
            "term of size {} above TermSize {cap}",
            t.size()
        );
    }

    // peaks drawn after the chain, from the same case generator
    let (left, right) = g.peak(c.max_source_size, 2, 3);
    let (n, m) = (left.len() as u64, right.len() as u64);
    let s = left.start().size();
    if m >= 1 {
        let j = join_peak_left_star(&left, &right, lim)?;
        let b = calc.cr_red_bound(n, s, m)?;
        ensure!(
            b.left.admits(j.left.len() as u64) && b.right.admits(j.right.len() as u64),
            "CR-red ({n}, {s}, {m}) exceeded: {} / {}",
            j.left.len(),
            j.right.len()
        );
    }
    if 1 <= n && n <= m {
        let j = join_peak_source_star(&left, &right, lim)?;
        let b = calc.v_size_bound(n, s, m)?;
        ensure!(
            b.left.admits(j.left.len() as u64) && b.right.admits(j.right.len() as u64),
            "V-size ({n}, {s}, {m}) exceeded: {} / {}",
            j.left.len(),
            j.right.len()
        );
    }

    // Mon for a lifted path and Rev for a reversed one
    if m >= 1 {
        let levels = g.rng.gen_range(1..=2);
        let lifted = mono_lift_path(&right, levels, lim)?;
        let bound = calc.mon_bound(s, m, levels as u64);
        ensure!(
            bound.admits(lifted.len() as u64),
            "Mon exceeded by {}",
            lifted.len()
        );
        let back = reach_backward(&EqualityChain::from_path(&right), lim)?;
        let bound = calc.rev_bound(s, m)?;
        ensure!(
            bound.admits(back.len() as u64),
            "Rev exceeded by {}",
            back.len()
        );
    }
    Ok(())
}

fn improved(c: &HarnessConfig, g: &mut TermGen, tallies: &mut BTreeMap<String, usize>) -> Case {
    let lim = &c.limits;
    let m = g.rng.gen_range(1..=4);
    let n = g.rng.gen_range(0..=m);
    // half the sources create redexes on their first root contraction
    let source = if g.rng.gen_bool(0.5) {
        g.creating_term(c.max_source_size)
    } else {
        g.reducible_term(c.max_source_size)
    };
    let (left, right) = g.peak_from(&source, n, m);
    let n = left.len();
    let j = join_improved(&left, &right, lim)?;
    ensure!(
        j.a == count_new_redex_contractions(&left)?,
        "a disagrees with the new-redex count"
    );
    if n >= 1 {
        ensure!(j.a < n, "a = {} with n = {n}", j.a);
    }
    j.at_right.verify_between(left.end(), right.end())?;
    j.at_left.verify_between(left.end(), right.end())?;
    ensure!(
        j.at_right.reduct == star_iter(right.end(), j.a + 1, lim)?,
        "improved join misses Q_m^((a+1)*)"
    );
    ensure!(
        j.at_left.reduct == star_iter(left.end(), j.b + 1, lim)?,
        "improved join misses P_n^((b+1)*)"
    );
    if j.a > 0 {
        *tallies.entry("new-redex-peaks".into()).or_default() += 1;
    }
    if n >= 1 && j.a + 1 < n {
        let (corollary, _) = join_reduction_peak(&left, &right, lim)?;
        ensure!(
            j.at_right.descriptor.stars < corollary.descriptor.stars,
            "{} does not improve on {}",
            j.at_right.descriptor,
            corollary.descriptor
        );
        *tallies.entry("improved".into()).or_default() += 1;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_a_small_run() {
        let config = HarnessConfig {
            cases: 25,
            ..HarnessConfig::default()
        };
        let report = run(&config, Suite::All);
        assert_eq!(report.suites.len(), 9);
        assert!(report.ok(), "{}", report.to_text());
    }

    #[test]
    fn zero_cases_is_an_empty_success() {
        let config = HarnessConfig {
            cases: 0,
            ..HarnessConfig::default()
        };
        let report = run(&config, Suite::Join);
        assert!(report.ok());
        assert_eq!(report.suites[0].passed + report.suites[0].skipped, 0);
    }

    #[test]
    fn runs_are_reproducible() {
        let config = HarnessConfig {
            cases: 10,
            seed: 42,
            ..HarnessConfig::default()
        };
        assert_eq!(run(&config, Suite::Bounds), run(&config, Suite::Bounds));
        assert_eq!(
            config.case_gen(Suite::Join, 3).chain(12, 6),
            config.case_gen(Suite::Bounds, 3).chain(12, 6)
        );
    }
}
