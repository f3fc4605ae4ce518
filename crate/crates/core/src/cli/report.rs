use std::fmt::Write;

use serde::Serialize;

use crate::algebra::{as_string, Rational};
use crate::auditor::{check_pir_privacy, check_udiq, pir_correctness, Correctness, PirPrivacy, Udiq, DEFAULT_BUDGET};
use crate::bounds::{lower_bound, pir_capacity, recovery_sets, LowerBound, RecoverySets};
use crate::pir::{PirScheme, Server};

use super::UsageError;

#[derive(Clone, Debug, Serialize)]
pub struct RecoverySummary {
    pub n1_space: usize,
    pub n2_space: usize,
    pub n1: usize,
    pub n2: usize,
    pub part2_holds: bool,
    pub uniform_queries: bool,
    pub all_pairs_recovering: Vec<usize>,
}

impl From<&RecoverySets> for RecoverySummary {
    fn from(r: &RecoverySets) -> Self {
        RecoverySummary {
            n1_space: r.n1_space,
            n2_space: r.n2_space,
            n1: r.n1,
            n2: r.n2,
            part2_holds: r.part2_holds,
            uniform_queries: r.uniform_queries,
            all_pairs_recovering: r.all_pairs_recovering.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PirReport {
    pub scheme: String,
    pub messages: usize,
    pub field: u32,
    pub subpacketization: usize,
    #[serde(with = "as_string")]
    pub rd1: Rational,
    #[serde(with = "as_string")]
    pub rd2: Rational,
    #[serde(with = "as_string")]
    pub total: Rational,
    /// Capacity of two-server PIR with N messages.
    #[serde(with = "as_string")]
    pub capacity: Rational,
    pub server1_answers: Vec<String>,
    pub server2_answers: Vec<String>,
    pub correctness: Correctness,
    pub privacy: PirPrivacy,
    pub udiq: Udiq,
    /// Recovery-set structure, or why it is not uniform.
    pub recovery: Result<RecoverySummary, String>,
    /// Meaningful only for UDIQ schemes with uniform queries.
    pub in_hypothesis: bool,
    pub lower_bound: Option<Result<LowerBound, String>>,
    /// Correctness and privacy; independence and the bound are reported only.
    pub passed: bool,
}

pub fn pir_report(scheme: &dyn PirScheme, budget: Option<u128>) -> Result<PirReport, UsageError> {
    let (rd1, rd2) = scheme.download_costs();
    let (n1, n2) = scheme.query_space();
    let correctness = pir_correctness(scheme, budget.unwrap_or(DEFAULT_BUDGET))?;
    let privacy = check_pir_privacy(scheme)?;
    let udiq = check_udiq(scheme)?;
    let rs = recovery_sets(scheme);
    let in_hypothesis = udiq.marginal_zero && rs.as_ref().is_ok_and(|r| r.uniform_queries);
    let lower = match &rs {
        Ok(r) if in_hypothesis => Some(lower_bound(r, &rd1, &rd2).map_err(|e| e.to_string())),
        _ => None,
    };
    let passed = correctness.passed && privacy.passed();
    Ok(PirReport {
        scheme: scheme.name(),
        messages: scheme.messages(),
        field: scheme.field().modulus(),
        subpacketization: scheme.subpacketization(),
        total: &rd1 + &rd2,
        capacity: pir_capacity(scheme.messages(), 2),
        rd1,
        rd2,
        server1_answers: (0..n1).map(|q| scheme.describe_query(Server::One, q)).collect(),
        server2_answers: (0..n2).map(|q| scheme.describe_query(Server::Two, q)).collect(),
        correctness,
        privacy,
        udiq,
        recovery: rs.as_ref().map(RecoverySummary::from).map_err(|e| e.to_string()),
        in_hypothesis,
        lower_bound: lower,
        passed,
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "FAIL"
    }
}

impl PirReport {
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scheme: {}", self.scheme);
        let _ = writeln!(s, "messages N = {}, field GF({})", self.messages, self.field);
        let _ = writeln!(
            s,
            "(R_D1, R_D2, F') = ({}, {}, {})",
            self.rd1,
            self.rd2,
            self.subpacketization
        );
        let _ = writeln!(
            s,
            "total download cost = {} (two-server capacity {})",
            self.total,
            self.capacity
        );
        if self.server1_answers.len() <= 16 && self.server2_answers.len() <= 16 {
            for (i, a) in self.server1_answers.iter().enumerate() {
                let _ = writeln!(s, "  server 1, query {}: {}", i + 1, a);
            }
            for (i, a) in self.server2_answers.iter().enumerate() {
                let _ = writeln!(s, "  server 2, query {}: {}", i + 1, a);
            }
        }
        let c = &self.correctness;
        let _ = writeln!(
            s,
            "correctness ({}, {} libraries x {} (demand, randomness) pairs): {} ({} failures)",
            c.method,
            c.libraries,
            c.pairs,
            yes(c.passed),
            c.failures
        );
        let _ = writeln!(
            s,
            "privacy: server 1 {}, server 2 {}",
            yes(self.privacy.server1),
            yes(self.privacy.server2)
        );
        let per: Vec<String> = self.udiq.per_demand_bits.iter().map(|b| format!("{b:.6}")).collect();
        let _ = writeln!(
            s,
            "UDIQ (I(Q1;Q2) = 0): {} ({:.6} bits); I(Q1;Q2|d=n) = [{}]",
            yes(self.udiq.marginal_zero),
            self.udiq.marginal_bits,
            per.join(", ")
        );
        match &self.recovery {
            Ok(r) => {
                let _ = writeln!(
                    s,
                    "recovery sets: N1 = {}, N2 = {}, n1 = {}, n2 = {}, N1/n1 <= N and N2/n2 <= N: {}, uniform queries: {}",
                    r.n1_space,
                    r.n2_space,
                    r.n1,
                    r.n2,
                    r.part2_holds,
                    r.uniform_queries
                );
                let _ = writeln!(s, "all recovering query pairs per message: {:?}", r.all_pairs_recovering);
            }
            Err(e) => {
                let _ = writeln!(s, "recovery sets: {e}");
            }
        }
        match &self.lower_bound {
            Some(Ok(b)) => {
                let _ = writeln!(
                    s,
                    "lower bound: min a1*R_D1 + a2*R_D2 = {} at (a1, a2) = ({}, {}), N = {}: {}{}",
                    b.lhs_min,
                    b.alpha1,
                    b.alpha2,
                    b.n,
                    yes(b.passes),
                    if b.tight { ", tight" } else { "" }
                );
            }
            Some(Err(e)) => {
                let _ = writeln!(s, "lower bound: {e}");
            }
            None => {
                let _ = writeln!(s, "lower bound: not applicable (scheme is not UDIQ with uniform queries)");
            }
        }
        let _ = writeln!(s, "result: {}", if self.passed { "pass" } else { "FAIL" });
        s
    }
}
