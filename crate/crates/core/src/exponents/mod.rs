//! Exponent lattice of the Hardy–Hénon problem.
//!
//! All decisions here are made in exact rational arithmetic: the critical
//! exponents, the criticality classification of a Herz index, and the
//! hypothesis checks that gate the numerical experiments.

mod ext_rat;

pub use ext_rat::{canonical_pair, fmt_rational, int, rat, ratio_to_f64, ExtRat, ExtRatError, Rational};

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExponentError {
    #[error("invalid Herz index: {0}")]
    InvalidIndex(String),
    #[error("standing assumption `{clause}` violated: {detail}")]
    StandingAssumption { clause: &'static str, detail: String },
    #[error("division by zero while computing {0}")]
    DivisionByZero(&'static str),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error(transparent)]
    Arithmetic(#[from] ExtRatError),
}

/// Index `(s, q, r)` of the homogeneous Herz space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HerzIndex {
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    pub q: ExtRat,
    pub r: ExtRat,
}

pub(crate) fn ser_rational<S: serde::Serializer>(v: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(&fmt_rational(v))
}

impl HerzIndex {
    pub fn new(s: Rational, q: ExtRat, r: ExtRat) -> Result<Self, ExponentError> {
        if q < ExtRat::one() {
            return Err(ExponentError::InvalidIndex(format!("q = {q} must be >= 1")));
        }
        if r <= ExtRat::zero() {
            return Err(ExponentError::InvalidIndex(format!("r = {r} must be > 0")));
        }
        Ok(Self { s, q, r })
    }

    /// `s/n + 1/q`, the position of the index on the regularity line.
    pub fn regularity(&self, n: u32) -> Rational {
        self.s / int(n as i128) + self.q.recip_finite()
    }
}

/// Dimension, nonlinearity power, weight exponent and the working Herz index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProblemParams {
    pub n: u32,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub gamma: Rational,
    pub index: HerzIndex,
}

impl ProblemParams {
    /// Builds the parameter set, rejecting anything outside the standing
    /// assumptions of the well-posedness theory.
    pub fn new(n: u32, alpha: Rational, gamma: Rational, index: HerzIndex) -> Result<Self, ExponentError> {
        if n == 0 {
            return Err(ExponentError::StandingAssumption { clause: "n >= 1", detail: "n = 0".into() });
        }
        let nn = int(n as i128);
        if alpha <= Rational::one() {
            return Err(ExponentError::StandingAssumption {
                clause: "alpha > 1",
                detail: format!("alpha = {}", fmt_rational(&alpha)),
            });
        }
        let min2n = int(2.min(n) as i128);
        if gamma <= -min2n {
            return Err(ExponentError::StandingAssumption {
                clause: "gamma > -min(2, n)",
                detail: format!("gamma = {}", fmt_rational(&gamma)),
            });
        }
        if alpha < Rational::one() + gamma / nn {
            return Err(ExponentError::StandingAssumption {
                clause: "alpha >= max(1, 1 + gamma/n)",
                detail: format!("alpha = {}, gamma = {}", fmt_rational(&alpha), fmt_rational(&gamma)),
            });
        }
        let s = index.s;
        let lower = gamma / (alpha - Rational::one());
        if s < lower || s > nn {
            return Err(ExponentError::StandingAssumption {
                clause: "gamma/(alpha-1) <= s <= n",
                detail: format!("s = {}, gamma/(alpha-1) = {}", fmt_rational(&s), fmt_rational(&lower)),
            });
        }
        if index.q < ExtRat::Finite(alpha) {
            return Err(ExponentError::StandingAssumption {
                clause: "alpha <= q <= inf",
                detail: format!("q = {}, alpha = {}", index.q, fmt_rational(&alpha)),
            });
        }
        Ok(Self { n, alpha, gamma, index })
    }

    pub fn regularity(&self) -> Rational {
        self.index.regularity(self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CriticalityCase {
    DoubleSubcritical,
    SingleCriticalI,
    SingleCriticalII,
    DoubleCritical,
    Supercritical,
    NonIntegrableNonlinearity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Clause {
    pub name: String,
    pub holds: bool,
}

impl Clause {
    pub fn new(name: impl Into<String>, holds: bool) -> Self {
        Self { name: name.into(), holds }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriticalityReport {
    pub q_c: ExtRat,
    #[serde(rename = "Q_c")]
    pub big_q_c: ExtRat,
    pub case: CriticalityCase,
    pub clause_trace: Vec<Clause>,
}

/// `(q_c, Q_c) = (n(α−1)/(2+γ), nα/(n+γ))`.
pub fn critical_exponents(params: &ProblemParams) -> Result<(ExtRat, ExtRat), ExponentError> {
    let n = int(params.n as i128);
    let two_gamma = int(2) + params.gamma;
    let n_gamma = n + params.gamma;
    if two_gamma.is_zero() {
        return Err(ExponentError::DivisionByZero("q_c"));
    }
    if n_gamma.is_zero() {
        return Err(ExponentError::DivisionByZero("Q_c"));
    }
    let q_c = n * (params.alpha - Rational::one()) / two_gamma;
    let big_q_c = n * params.alpha / n_gamma;
    Ok((ExtRat::Finite(q_c), ExtRat::Finite(big_q_c)))
}

fn inverse_criticals(params: &ProblemParams) -> Result<(Rational, Rational), ExponentError> {
    let (q_c, big_q_c) = critical_exponents(params)?;
    Ok((q_c.recip_finite(), big_q_c.recip_finite()))
}

/// Places the index relative to the scale-critical and integrability lines.
///
/// Precedence: supercritical first, then non-integrable nonlinearity (which
/// includes `v = 1/Q_c` with `r > α`), then the four critical cases.
pub fn classify(params: &ProblemParams) -> Result<CriticalityReport, ExponentError> {
    let (q_c, big_q_c) = critical_exponents(params)?;
    let (inv_q, inv_big_q) = inverse_criticals(params)?;
    let v = params.regularity();
    let r_gt_alpha = params.index.r > ExtRat::Finite(params.alpha);
    let mut trace = Vec::new();

    let supercritical = v > inv_q;
    trace.push(Clause::new("s/n+1/q > 1/q_c", supercritical));
    let case = if supercritical {
        CriticalityCase::Supercritical
    } else {
        let above = v > inv_big_q;
        let on_line_bad_r = v == inv_big_q && r_gt_alpha;
        trace.push(Clause::new("s/n+1/q > 1/Q_c", above));
        trace.push(Clause::new("s/n+1/q = 1/Q_c and r > alpha", on_line_bad_r));
        if above || on_line_bad_r {
            CriticalityCase::NonIntegrableNonlinearity
        } else {
            let at_q = v == inv_q;
            let at_big_q = v == inv_big_q;
            trace.push(Clause::new("s/n+1/q = 1/q_c", at_q));
            trace.push(Clause::new("s/n+1/q = 1/Q_c", at_big_q));
            match (at_q, at_big_q) {
                (false, false) => CriticalityCase::DoubleSubcritical,
                (false, true) => CriticalityCase::SingleCriticalI,
                (true, false) => CriticalityCase::SingleCriticalII,
                (true, true) => CriticalityCase::DoubleCritical,
            }
        }
    };
    Ok(CriticalityReport { q_c, big_q_c, case, clause_trace: trace })
}

/// Whether the Herz space contains test functions and whether it embeds in
/// `L^1_loc`.
pub fn check_inclusions(index: &HerzIndex, n: u32) -> (bool, bool) {
    let v = index.regularity(n);
    let zero = Rational::zero();
    let one = Rational::one();
    let contains_test_functions = v > zero || (v == zero && index.r.is_infinite());
    let locally_integrable = v < one || (v == one && index.r <= ExtRat::one());
    (contains_test_functions, locally_integrable)
}

/// The two unconditional-uniqueness statements: uniqueness among bounded
/// solutions in the subcritical regime, and among continuous solutions in the
/// closure of test functions in the scale-critical regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UniquenessClass {
    /// `L^∞(0,T; K^s_{q,r})`.
    Bounded,
    /// `C([0,T]; closure of C_c^∞ in K^s_{q,r})`, requires `n ≥ 3`.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    pub statement: String,
    pub clauses: Vec<Clause>,
    pub verdict: bool,
    pub via: Option<String>,
    pub notes: Vec<String>,
}

impl HypothesisReport {
    fn new(statement: &str) -> Self {
        Self { statement: statement.into(), clauses: Vec::new(), verdict: false, via: None, notes: Vec::new() }
    }

    fn clause(&mut self, name: impl Into<String>, holds: bool) -> bool {
        self.clauses.push(Clause::new(name, holds));
        holds
    }

    pub fn failed_clauses(&self) -> Vec<&str> {
        self.clauses.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

pub const BRACE_RESOLUTION: &str =
    "critical case: the two (q, r) sub-cases are read as alternatives (q < inf and r <= alpha-1) OR (r <= min(1, alpha-1))";

pub fn check_uniqueness_hypotheses(
    params: &ProblemParams,
    which: UniquenessClass,
) -> Result<HypothesisReport, ExponentError> {
    let (inv_q, inv_big_q) = inverse_criticals(params)?;
    let v = params.regularity();
    let idx = params.index;
    let alpha = ExtRat::Finite(params.alpha);
    let (test_fns, loc_int) = check_inclusions(&idx, params.n);

    match which {
        UniquenessClass::Bounded => {
            let mut rep = HypothesisReport::new("uniqueness in L^inf(0,T; K^s_{q,r})");
            rep.clause("contains test functions", test_fns);
            rep.clause("locally integrable", loc_int);
            let c1 = rep.clause("(i) s/n+1/q < min(1/q_c, 1/Q_c)", v < inv_q && v < inv_big_q);
            let c2 = rep.clause(
                "(ii) s/n+1/q = 1/Q_c < 1/q_c and r <= alpha",
                v == inv_big_q && inv_big_q < inv_q && idx.r <= alpha,
            );
            // auxiliary exponent of the Gronwall step, r0 = r/alpha
            let r0 = idx.r.try_div(&alpha)?;
            rep.notes.push(format!("auxiliary exponent r0 = r/alpha = {r0}"));
            let (_, delta) = sigma_delta(params)?;
            rep.notes.push(format!("delta = {}", fmt_rational(&delta)));
            rep.verdict = test_fns && loc_int && (c1 || c2);
            rep.via = if c1 {
                Some("(i)".into())
            } else if c2 {
                Some("(ii)".into())
            } else {
                None
            };
            Ok(rep)
        }
        UniquenessClass::Continuous => {
            let mut rep = HypothesisReport::new("uniqueness in C([0,T]; closure of test functions)");
            let s = idx.s;
            let lower = params.gamma / (params.alpha - Rational::one());
            let pre = [
                rep.clause("n >= 3", params.n >= 3),
                rep.clause("gamma/(alpha-1) < s", lower < s),
                rep.clause("s/n+1/q > 0", v > Rational::zero()),
                rep.clause("locally integrable", loc_int),
            ]
            .iter()
            .all(|&b| b);
            let c1 = rep.clause(
                "(i) s/n+1/q = 1/q_c < 1/Q_c, q < inf, r = inf",
                v == inv_q && inv_q < inv_big_q && idx.q.is_finite() && idx.r.is_infinite(),
            );
            let alpha_m1 = ExtRat::Finite(params.alpha - Rational::one());
            let double = v == inv_q && inv_q == inv_big_q;
            let sub_a = idx.q.is_finite() && idx.r <= alpha_m1;
            let sub_b = idx.r <= alpha_m1.min(ExtRat::one());
            let c2 = rep.clause("(ii) s/n+1/q = 1/q_c = 1/Q_c with an admissible (q, r) sub-case", double && (sub_a || sub_b));
            rep.notes.push(BRACE_RESOLUTION.into());
            rep.verdict = pre && (c1 || c2);
            rep.via = if !pre {
                None
            } else if c1 {
                Some("(i)".into())
            } else if c2 {
                Some(if sub_a { "(ii) q < inf, r <= alpha-1".into() } else { "(ii) r <= min(1, alpha-1)".into() })
            } else {
                None
            };
            Ok(rep)
        }
    }
}

/// `σ = αs − γ` and `δ = 1 − (n/2)[(σ/n + α/q) − (s/n + 1/q)]`.
///
/// Also re-derives the two equivalences that translate the critical lines
/// into the `(σ, q/α)` index and fails loudly if either breaks.
pub fn sigma_delta(params: &ProblemParams) -> Result<(Rational, Rational), ExponentError> {
    let n = int(params.n as i128);
    let alpha = params.alpha;
    let sigma = alpha * params.index.s - params.gamma;
    let inv_q = params.index.q.recip_finite();
    let v = params.regularity();
    let w = sigma / n + alpha * inv_q;
    let delta = Rational::one() - n / int(2) * (w - v);

    let (inv_qc, inv_big_qc) = inverse_criticals(params)?;
    let lhs1 = v <= inv_qc;
    let rhs1 = v >= w - int(2) / n;
    if lhs1 != rhs1 {
        return Err(ExponentError::InternalConsistency(format!(
            "v <= 1/q_c is {lhs1} but v >= (sigma/n + alpha/q) - 2/n is {rhs1}"
        )));
    }
    let lhs2 = v <= inv_big_qc;
    let rhs2 = w <= Rational::one();
    if lhs2 != rhs2 {
        return Err(ExponentError::InternalConsistency(format!(
            "v <= 1/Q_c is {lhs2} but sigma/n + alpha/q <= 1 is {rhs2}"
        )));
    }
    Ok((sigma, delta))
}

/// Exponent `e` with `‖f(λ·)‖ ≍ λ^e ‖f‖` on `K^s_{q,r}`: `e = −(s + n/q)`.
pub fn scaling_exponent(index: &HerzIndex, n: u32) -> Rational {
    -(index.s + int(n as i128) * index.q.recip_finite())
}

/// Exponent tuple of a heat-semigroup smoothing estimate
/// `K^μ_{p,r0} → K^ν_{q,r}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmoothingTuple {
    pub n: u32,
    #[serde(serialize_with = "ser_rational")]
    pub mu: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub nu: Rational,
    pub p: ExtRat,
    pub q: ExtRat,
    pub r: ExtRat,
    pub r0: ExtRat,
}

impl SmoothingTuple {
    pub fn source_regularity(&self) -> Rational {
        self.mu / int(self.n as i128) + self.p.recip_finite()
    }

    pub fn target_regularity(&self) -> Rational {
        self.nu / int(self.n as i128) + self.q.recip_finite()
    }

    /// `(n/2)[(μ/n+1/p) − (ν/n+1/q)]`; the estimate decays like `t^{-rate}`.
    pub fn rate(&self) -> Rational {
        int(self.n as i128) / int(2) * (self.source_regularity() - self.target_regularity())
    }
}

/// Hypotheses of the Herz-space `L^p`–`L^q` smoothing estimate.
pub fn check_smoothing_hypotheses(t: &SmoothingTuple) -> HypothesisReport {
    let mut rep = HypothesisReport::new("heat semigroup smoothing K^mu_{p,r0} -> K^nu_{q,r}");
    let one = ExtRat::one();
    let (vm, vn) = (t.source_regularity(), t.target_regularity());
    let zero = Rational::zero();
    let mut ok = rep.clause("1 <= p, q", t.p >= one && t.q >= one);
    ok &= rep.clause("r, r0 > 0", t.r > ExtRat::zero() && t.r0 > ExtRat::zero());
    ok &= rep.clause("mu >= nu", t.mu >= t.nu);
    ok &= rep.clause("0 <= nu/n+1/q <= mu/n+1/p <= 1", zero <= vn && vn <= vm && vm <= Rational::one());
    ok &= rep.clause("r0 = inf if mu/n+1/p = 0", vm != zero || t.r0.is_infinite());
    ok &= rep.clause("r = inf if nu/n+1/q = 0", vn != zero || t.r.is_infinite());
    let finite_pq = t.p.is_finite() && t.q.is_finite();
    let c1 = rep.clause(
        "case 1: mu > nu, p,q < inf, r0 = inf, nu/n+1/q < mu/n+1/p < 1",
        t.mu > t.nu && finite_pq && t.r0.is_infinite() && vn < vm && vm < Rational::one(),
    );
    let c2 = rep.clause("case 2: p,q < inf, r0 <= r, mu/n+1/p < 1", finite_pq && t.r0 <= t.r && vm < Rational::one());
    let c3 = rep.clause("case 3: r0 <= min(1, r)", t.r0 <= one.min(t.r));
    rep.verdict = ok && (c1 || c2 || c3);
    rep.via = [(c1, "case 1"), (c2, "case 2"), (c3, "case 3")]
        .iter()
        .find(|(c, _)| *c)
        .map(|(_, name)| name.to_string());
    rep
}

/// Exponents of the time-uniform Duhamel bound `K^μ_{p,r} → K^ν_{q,∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DuhamelTuple {
    pub n: u32,
    #[serde(serialize_with = "ser_rational")]
    pub mu: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub nu: Rational,
    pub p: ExtRat,
    pub q: ExtRat,
    pub r: ExtRat,
}

impl DuhamelTuple {
    pub fn source_regularity(&self) -> Rational {
        self.mu / int(self.n as i128) + self.p.recip_finite()
    }

    pub fn target_regularity(&self) -> Rational {
        self.nu / int(self.n as i128) + self.q.recip_finite()
    }
}

pub fn check_duhamel_hypotheses(t: &DuhamelTuple) -> HypothesisReport {
    let mut rep = HypothesisReport::new("time-uniform Duhamel bound K^mu_{p,r} -> K^nu_{q,inf}");
    let one = ExtRat::one();
    let (vm, vn) = (t.source_regularity(), t.target_regularity());
    let n = int(t.n as i128);
    let mut ok = rep.clause("n >= 3", t.n >= 3);
    ok &= rep.clause("1 <= p, q", t.p >= one && t.q >= one);
    ok &= rep.clause("mu > nu", t.mu > t.nu);
    ok &= rep.clause("0 < nu/n+1/q < mu/n+1/p <= 1", Rational::zero() < vn && vn < vm && vm <= Rational::one());
    ok &= rep.clause("nu/n+1/q = (mu/n+1/p) - 2/n", vn == vm - int(2) / n);
    let c1 = rep.clause("case 1: p,q < inf, mu/n+1/p < 1", t.p.is_finite() && t.q.is_finite() && vm < Rational::one());
    let c2 = rep.clause("case 2: mu/n+1/p <= 1, r <= 1", vm <= Rational::one() && t.r <= one);
    rep.verdict = ok && (c1 || c2);
    rep.via = if c1 { Some("case 1".into()) } else if c2 { Some("case 2".into()) } else { None };
    rep
}

/// Hypotheses for `e^{tΔ}f → f` in `K^s_{q,r}` as `t ↓ 0`.
pub fn check_continuity_hypotheses(index: &HerzIndex) -> HypothesisReport {
    let mut rep = HypothesisReport::new("continuity of the heat semigroup at t = 0");
    let c1 = rep.clause("q < inf", index.q.is_finite());
    let c2 = rep.clause("q = inf and r <= 1", index.q.is_infinite() && index.r <= ExtRat::one());
    rep.verdict = c1 || c2;
    rep
}

/// Hypotheses for `t^β ‖e^{tΔ}f‖_{K^{s̃}_{q̃,r̃}} → 0` on the closure of test
/// functions in `K^s_{q,r}`. Returns the report and `β`.
pub fn check_decay_hypotheses(n: u32, source: &HerzIndex, target: &HerzIndex) -> (HypothesisReport, Rational) {
    let mut rep = HypothesisReport::new("small-time decay of t^beta ||e^{t Delta} f||");
    let (v, vt) = (source.regularity(n), target.regularity(n));
    let beta = int(n as i128) / int(2) * (v - vt);
    let zero = Rational::zero();
    let one = ExtRat::one();
    let mut ok = rep.clause("beta > 0", beta > zero);
    ok &= rep.clause("s >= s~", source.s >= target.s);
    ok &= rep.clause("0 <= s~/n+1/q~ <= s/n+1/q <= 1", zero <= vt && vt <= v && v <= Rational::one());
    ok &= rep.clause("r = inf if s/n+1/q = 0", v != zero || source.r.is_infinite());
    ok &= rep.clause("r~ = inf if s~/n+1/q~ = 0", vt != zero || target.r.is_infinite());
    let finite = source.q.is_finite() && target.q.is_finite();
    let c1 = rep.clause(
        "case 1: s > s~, q,q~ < inf, r = inf, strict regularity gap, s/n+1/q < 1",
        source.s > target.s && finite && source.r.is_infinite() && vt < v && v < Rational::one(),
    );
    let c2 = rep.clause("case 2: q,q~ < inf, r = r~, s/n+1/q < 1", finite && source.r == target.r && v < Rational::one());
    let c3 = rep.clause("case 3: r <= 1", source.r <= one);
    rep.verdict = ok && (c1 || c2 || c3);
    (rep, beta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, alpha: Rational, gamma: Rational, s: Rational, q: ExtRat, r: ExtRat) -> ProblemParams {
        ProblemParams::new(n, alpha, gamma, HerzIndex::new(s, q, r).unwrap()).unwrap()
    }

    fn p(n: u32, a: i128, g: i128, s: Rational, q: ExtRat) -> ProblemParams {
        params(n, int(a), int(g), s, q, ExtRat::one())
    }

    #[test]
    fn critical_exponent_examples() {
        let cases = [
            (3, int(3), int(0), ExtRat::integer(3), ExtRat::integer(3)),
            (3, int(3), int(1), ExtRat::integer(2), ExtRat::new(9, 4)),
            (3, int(2), int(-1), ExtRat::integer(3), ExtRat::integer(3)),
        ];
        for (n, a, g, qc, big) in cases {
            let s = (g / (a - int(1))).max(int(0));
            let pr = params(n, a, g, s, ExtRat::integer(3), ExtRat::one());
            assert_eq!(critical_exponents(&pr).unwrap(), (qc, big));
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&p(3, 3, 0, int(0), ExtRat::integer(3))).unwrap().case, CriticalityCase::DoubleCritical);
        assert_eq!(classify(&p(3, 2, 0, int(0), ExtRat::integer(3))).unwrap().case, CriticalityCase::DoubleSubcritical);
        assert_eq!(classify(&p(3, 4, 0, int(0), ExtRat::new(9, 2))).unwrap().case, CriticalityCase::SingleCriticalII);
    }

    #[test]
    fn classify_r_above_alpha_on_integrability_line() {
        // v = 1/Q_c = 1/3 = 1/q_c with r = 4 > alpha = 3
        let pr = params(3, int(3), int(0), int(0), ExtRat::integer(3), ExtRat::integer(4));
        assert_eq!(classify(&pr).unwrap().case, CriticalityCase::NonIntegrableNonlinearity);
    }

    #[test]
    fn standing_assumptions_rejected() {
        let idx = HerzIndex::new(int(0), ExtRat::integer(3), ExtRat::one()).unwrap();
        assert!(matches!(
            ProblemParams::new(3, int(2), int(-2), idx),
            Err(ExponentError::StandingAssumption { clause: "gamma > -min(2, n)", .. })
        ));
        let idx = HerzIndex::new(int(0), ExtRat::one(), ExtRat::one()).unwrap();
        assert!(ProblemParams::new(3, int(2), int(0), idx).is_err());
        assert!(HerzIndex::new(int(0), ExtRat::new(1, 2), ExtRat::one()).is_err());
        assert!(HerzIndex::new(int(0), ExtRat::one(), ExtRat::zero()).is_err());
    }

    #[test]
    fn inclusion_examples() {
        let idx = |s, q, r| HerzIndex::new(s, q, r).unwrap();
        assert_eq!(check_inclusions(&idx(int(0), ExtRat::integer(2), ExtRat::Infinity), 3), (true, true));
        assert_eq!(check_inclusions(&idx(int(0), ExtRat::integer(1), ExtRat::integer(2)), 3), (true, false));
        assert_eq!(check_inclusions(&idx(rat(-3, 2), ExtRat::integer(2), ExtRat::Infinity), 3), (true, true));
        assert_eq!(check_inclusions(&idx(rat(-3, 2), ExtRat::integer(2), ExtRat::integer(5)), 3), (false, true));
    }

    #[test]
    fn bounded_uniqueness_examples() {
        let pr = params(3, int(2), int(0), int(0), ExtRat::integer(3), ExtRat::one());
        let rep = check_uniqueness_hypotheses(&pr, UniquenessClass::Bounded).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.via.as_deref(), Some("(i)"));
        let pr = params(3, int(3), int(0), int(0), ExtRat::integer(3), ExtRat::integer(4));
        assert!(!check_uniqueness_hypotheses(&pr, UniquenessClass::Bounded).unwrap().verdict);
    }

    #[test]
    fn continuous_uniqueness_examples() {
        // s = 0 = gamma/(alpha-1) fails the strict lower bound on s.
        let pr = params(3, int(4), int(0), int(0), ExtRat::new(9, 2), ExtRat::Infinity);
        let rep = check_uniqueness_hypotheses(&pr, UniquenessClass::Continuous).unwrap();
        assert!(!rep.verdict);
        assert_eq!(rep.failed_clauses(), vec!["gamma/(alpha-1) < s", "(ii) s/n+1/q = 1/q_c = 1/Q_c with an admissible (q, r) sub-case"]);
        // s = 1/3, q = 9 sits on the same line 1/q_c = 2/9 with s > 0.
        let pr = params(3, int(4), int(0), rat(1, 3), ExtRat::integer(9), ExtRat::Infinity);
        let rep = check_uniqueness_hypotheses(&pr, UniquenessClass::Continuous).unwrap();
        assert!(rep.verdict);
        assert_eq!(rep.via.as_deref(), Some("(i)"));
        assert!(rep.notes.iter().any(|n| n == BRACE_RESOLUTION));
    }

    #[test]
    fn continuous_uniqueness_double_critical_subcases() {
        // n = 3, alpha = 3, gamma = 1: 1/q_c = 1/2, 1/Q_c = 4/9; choose gamma = 0:
        // 1/q_c = 1/3 = 1/Q_c. s = 1/2 > 0, q: 1/6 + 1/q = 1/3 -> q = 6.
        let base = |r| params(3, int(3), int(0), rat(1, 2), ExtRat::integer(6), r);
        let rep = check_uniqueness_hypotheses(&base(ExtRat::integer(2)), UniquenessClass::Continuous).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert_eq!(rep.via.as_deref(), Some("(ii) q < inf, r <= alpha-1"));
        let rep = check_uniqueness_hypotheses(&base(ExtRat::integer(3)), UniquenessClass::Continuous).unwrap();
        assert!(!rep.verdict);
    }

    #[test]
    fn sigma_delta_examples() {
        assert_eq!(sigma_delta(&p(3, 3, 0, int(0), ExtRat::integer(3))).unwrap(), (int(0), int(0)));
        assert_eq!(sigma_delta(&p(3, 2, 0, int(0), ExtRat::integer(3))).unwrap(), (int(0), rat(1, 2)));
        // supercritical configuration: 1 - (3/2)[(1/3 + 1) - 1/2] = -1/4
        assert_eq!(sigma_delta(&p(3, 2, -1, int(0), ExtRat::integer(2))).unwrap(), (int(1), rat(-1, 4)));
    }

    #[test]
    fn scaling_exponent_examples() {
        let idx = HerzIndex::new(int(0), ExtRat::integer(3), ExtRat::one()).unwrap();
        assert_eq!(scaling_exponent(&idx, 3), int(-1));
        let idx = HerzIndex::new(int(1), ExtRat::Infinity, ExtRat::one()).unwrap();
        assert_eq!(scaling_exponent(&idx, 3), int(-1));
        // (2 + gamma)/(alpha - 1) = 1 = s + n/q at alpha = 3, gamma = 0, q = 3
        let pr = p(3, 3, 0, int(0), ExtRat::integer(3));
        assert_eq!((int(2) + pr.gamma) / (pr.alpha - int(1)), -scaling_exponent(&pr.index, 3));
    }

    #[test]
    fn smoothing_hypotheses() {
        let t = SmoothingTuple {
            n: 3,
            mu: int(0),
            nu: int(0),
            p: ExtRat::one(),
            q: ExtRat::integer(3),
            r: ExtRat::one(),
            r0: ExtRat::one(),
        };
        let rep = check_smoothing_hypotheses(&t);
        assert!(rep.verdict);
        assert_eq!(t.rate(), int(1));
        let bad = SmoothingTuple { mu: int(-1), ..t };
        assert!(!check_smoothing_hypotheses(&bad).verdict);
    }

    #[test]
    fn duhamel_hypotheses() {
        let t = DuhamelTuple { n: 3, mu: int(0), nu: rat(-1, 2), p: ExtRat::one(), q: ExtRat::integer(2), r: ExtRat::one() };
        let rep = check_duhamel_hypotheses(&t);
        assert!(rep.verdict, "{rep:?}");
        assert_eq!(rep.via.as_deref(), Some("case 2"));
        let equal_weights = DuhamelTuple { nu: int(0), q: ExtRat::integer(3), ..t };
        assert!(!check_duhamel_hypotheses(&equal_weights).verdict);
    }

    #[test]
    fn decay_hypotheses() {
        let src = HerzIndex::new(int(0), ExtRat::integer(2), ExtRat::integer(2)).unwrap();
        let tgt = HerzIndex::new(int(0), ExtRat::integer(6), ExtRat::integer(2)).unwrap();
        let (rep, beta) = check_decay_hypotheses(3, &src, &tgt);
        assert!(rep.verdict);
        assert_eq!(beta, rat(1, 2));
        assert!(check_continuity_hypotheses(&src).verdict);
        let sup = HerzIndex::new(int(0), ExtRat::Infinity, ExtRat::integer(2)).unwrap();
        assert!(!check_continuity_hypotheses(&sup).verdict);
    }
}
