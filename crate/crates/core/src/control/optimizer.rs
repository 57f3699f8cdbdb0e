//! Candidate generation and selection.
//!
//! For each modulation the optimizer derives one MDPC and one RS candidate
//! whose expected error count per generation stays within the fixed
//! correction capability, then keeps the candidate with the highest
//! throughput `R_F * D`.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::config::{LinkConfig, Scheme};
use super::ComplexityCounter;
use crate::channel::{default_rates, symbol_error_prob, Modulation, PerModulation};

/// Units charged per candidate: constraint check, code rate and throughput.
const UNITS_PER_CANDIDATE: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerParams {
    /// Correctable bits per MDPC block; fixes the dimension `n`.
    pub t_mdpc: usize,
    /// Correctable symbols per RS codeword.
    pub t_rs: usize,
    pub s_range: RangeInclusive<u32>,
    /// Upper bound on the MDPC side length when the constraint is vacuous.
    pub m_max: usize,
    pub rates: PerModulation<f64>,
}

impl Default for OptimizerParams {
    fn default() -> Self {
        OptimizerParams {
            t_mdpc: 1,
            t_rs: 1,
            s_range: 3..=12,
            m_max: 1024,
            rates: default_rates(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CodingFamily {
    Mdpc,
    Rs,
}

/// One of the eight (family, modulation) candidates. `scheme` is `None` when
/// no parameters satisfy the constraint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub family: CodingFamily,
    pub modulation: Modulation,
    pub p_e: f64,
    pub scheme: Option<Scheme>,
}

impl Candidate {
    pub fn code_rate(&self) -> Option<f64> {
        self.scheme.map(|s| s.code_rate())
    }

    pub fn throughput_gbps(&self, rates: &PerModulation<f64>) -> Option<f64> {
        self.code_rate().map(|r| r * rates[self.modulation])
    }
}

/// Result of one optimizer pass.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimization {
    pub candidates: Vec<Candidate>,
    pub selected: LinkConfig,
    /// True when every candidate was infeasible.
    pub fallback: bool,
}

/// Largest `n` with `2^(n-1) - 1 <= t_mdpc`; exact when `t_mdpc` has that form.
pub fn mdpc_dimension(t_mdpc: usize) -> u32 {
    assert!(t_mdpc >= 1, "t_mdpc must be at least 1");
    (t_mdpc + 1).ilog2() + 1
}

/// `(m + 1)^n * p_e <= t`.
pub fn mdpc_constraint_holds(m: usize, n: u32, p_e: f64, t_mdpc: usize) -> bool {
    ((m + 1) as f64).powi(n as i32) * p_e <= t_mdpc as f64
}

/// Largest `m` in `[2, m_max]` satisfying the MDPC constraint.
pub fn mdpc_candidate(p_e: f64, t_mdpc: usize, m_max: usize) -> Option<Scheme> {
    let n = mdpc_dimension(t_mdpc);
    if m_max < 2 {
        return None;
    }
    let mut m = if p_e <= 0.0 {
        m_max
    } else {
        let guess = (t_mdpc as f64 / p_e).powf(1.0 / n as f64).floor() - 1.0;
        guess.clamp(2.0, m_max as f64) as usize
    };
    while m < m_max && mdpc_constraint_holds(m + 1, n, p_e, t_mdpc) {
        m += 1;
    }
    while m >= 2 && !mdpc_constraint_holds(m, n, p_e, t_mdpc) {
        m -= 1;
    }
    (m >= 2).then_some(Scheme::Mdpc { m, n })
}

/// `L * P_s <= t` and `max(2^(s-1), 2t + 1) <= L <= 2^s - 1`.
pub fn rs_constraint_holds(s: u32, codeword: usize, p_e: f64, t_rs: usize) -> bool {
    let lo = (1usize << (s - 1)).max(2 * t_rs + 1);
    let hi = (1usize << s) - 1;
    (lo..=hi).contains(&codeword) && codeword as f64 * symbol_error_prob(p_e, s) <= t_rs as f64
}

/// Longest admissible RS codeword for symbol size `s`.
pub fn rs_candidate_for_symbol(p_e: f64, t_rs: usize, s: u32) -> Option<Scheme> {
    let hi = (1usize << s) - 1;
    let lo = (1usize << (s - 1)).max(2 * t_rs + 1);
    if lo > hi {
        return None;
    }
    let ps = symbol_error_prob(p_e, s);
    let mut len = if ps <= 0.0 {
        hi
    } else {
        (t_rs as f64 / ps).floor().min(hi as f64) as usize
    };
    while len < hi && rs_constraint_holds(s, len + 1, p_e, t_rs) {
        len += 1;
    }
    while len >= lo && !rs_constraint_holds(s, len, p_e, t_rs) {
        len -= 1;
    }
    (len >= lo).then_some(Scheme::Rs {
        s,
        codeword: len,
        t: t_rs,
    })
}

/// Best RS code over the symbol-size range by code rate; smaller `s` wins ties.
pub fn rs_candidate(p_e: f64, t_rs: usize, s_range: RangeInclusive<u32>) -> Option<Scheme> {
    s_range
        .filter_map(|s| rs_candidate_for_symbol(p_e, t_rs, s))
        .fold(None, |best: Option<Scheme>, c| match best {
            Some(b) if b.code_rate() >= c.code_rate() => Some(b),
            _ => Some(c),
        })
}

pub fn mdpc_candidates(p_e: &PerModulation<f64>, t_mdpc: usize, m_max: usize) -> PerModulation<Option<Scheme>> {
    PerModulation::from_fn(|m| mdpc_candidate(p_e[m], t_mdpc, m_max))
}

pub fn rs_candidates(
    p_e: &PerModulation<f64>,
    t_rs: usize,
    s_range: RangeInclusive<u32>,
) -> PerModulation<Option<Scheme>> {
    PerModulation::from_fn(|m| rs_candidate(p_e[m], t_rs, s_range.clone()))
}

/// Orders feasible candidates: throughput, then code rate, then RS over
/// MDPC, then higher-order modulation.
pub fn compare_candidates(a: &Candidate, b: &Candidate, rates: &PerModulation<f64>) -> Ordering {
    let key = |c: &Candidate| {
        (
            c.throughput_gbps(rates).unwrap_or(f64::NEG_INFINITY),
            c.code_rate().unwrap_or(f64::NEG_INFINITY),
        )
    };
    let (ta, ra) = key(a);
    let (tb, rb) = key(b);
    ta.total_cmp(&tb)
        .then(ra.total_cmp(&rb))
        .then(a.family.cmp(&b.family))
        .then(a.modulation.cmp(&b.modulation))
}

/// Maximum-redundancy configuration used when nothing is feasible.
pub fn fallback_config(rates: &PerModulation<f64>) -> LinkConfig {
    LinkConfig {
        scheme: Scheme::Mdpc { m: 2, n: 2 },
        modulation: Modulation::Bpsk,
        data_rate_gbps: rates[Modulation::Bpsk],
    }
}

/// Picks the best feasible candidate. Returns the config and whether the
/// fallback was used.
pub fn select_config(candidates: &[Candidate], rates: &PerModulation<f64>) -> (LinkConfig, bool) {
    candidates
        .iter()
        .filter(|c| c.scheme.is_some())
        .max_by(|a, b| compare_candidates(a, b, rates))
        .map(|c| {
            (
                LinkConfig {
                    scheme: c.scheme.unwrap(),
                    modulation: c.modulation,
                    data_rate_gbps: rates[c.modulation],
                },
                false,
            )
        })
        .unwrap_or_else(|| (fallback_config(rates), true))
}

#[derive(Debug, Clone, Default)]
pub struct Optimizer {
    pub params: OptimizerParams,
}

impl Optimizer {
    pub fn new(params: OptimizerParams) -> Self {
        Optimizer { params }
    }

    /// Builds all eight candidates for the given per-modulation error
    /// probabilities and selects one, charging the work to `counter`.
    pub fn optimize(&self, p_e: &PerModulation<f64>, counter: &mut ComplexityCounter) -> Optimization {
        let p = &self.params;
        let mut candidates = Vec::with_capacity(8);
        for modulation in Modulation::ALL {
            candidates.push(Candidate {
                family: CodingFamily::Mdpc,
                modulation,
                p_e: p_e[modulation],
                scheme: mdpc_candidate(p_e[modulation], p.t_mdpc, p.m_max),
            });
            counter.charge(UNITS_PER_CANDIDATE);
        }
        for modulation in Modulation::ALL {
            candidates.push(Candidate {
                family: CodingFamily::Rs,
                modulation,
                p_e: p_e[modulation],
                scheme: rs_candidate(p_e[modulation], p.t_rs, p.s_range.clone()),
            });
            counter.charge(UNITS_PER_CANDIDATE);
        }
        let (selected, fallback) = select_config(&candidates, &p.rates);
        Optimization {
            candidates,
            selected,
            fallback,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain scan from m = 2 upward; independent of the closed-form start.
    fn scan_m(p: f64, n: u32, t: usize, m_max: usize) -> Option<usize> {
        (2..=m_max)
            .take_while(|&m| ((m + 1) as f64).powi(n as i32) * p <= t as f64)
            .last()
    }

    #[test]
    fn dimension_from_capability() {
        assert_eq!(mdpc_dimension(1), 2);
        assert_eq!(mdpc_dimension(3), 3);
        assert_eq!(mdpc_dimension(7), 4);
        assert_eq!(mdpc_dimension(2), 2);
    }

    #[test]
    fn mdpc_examples() {
        assert_eq!(mdpc_candidate(0.0, 1, 1024), Some(Scheme::Mdpc { m: 1024, n: 2 }));
        let c = mdpc_candidate(1e-4, 1, 1024).unwrap();
        assert_eq!(c, Scheme::Mdpc { m: 99, n: 2 });
        assert_eq!((c.k_bits(), c.r_bits()), (9801, 199));
        assert_eq!(mdpc_candidate(0.2, 1, 1024), None);
        assert_eq!(mdpc_candidate(1.0 / 9.0, 1, 1024), Some(Scheme::Mdpc { m: 2, n: 2 }));
    }

    #[test]
    fn mdpc_matches_scan() {
        for i in 0..400 {
            let p = 10f64.powf(-7.0 + i as f64 * 0.0165);
            for t in [1, 3] {
                let n = mdpc_dimension(t);
                let expected = scan_m(p, n, t, 1024);
                assert_eq!(mdpc_candidate(p, t, 1024).map(|s| match s {
                    Scheme::Mdpc { m, .. } => m,
                    _ => unreachable!(),
                }), expected, "p = {p}, t = {t}");
            }
        }
    }

    #[test]
    fn rs_examples() {
        let c = rs_candidate_for_symbol(0.0, 1, 8).unwrap();
        assert_eq!(c, Scheme::Rs { s: 8, codeword: 255, t: 1 });
        assert_eq!((c.k_bits(), c.r_bits()), (2024, 16));
        assert!((c.code_rate() - 2024.0 / 2040.0).abs() < 1e-15);

        // P_s ~ 0.0773 caps L at 12 < 128.
        assert_eq!(rs_candidate_for_symbol(0.01, 1, 8), None);
        let best = rs_candidate(0.01, 1, 3..=12).unwrap();
        assert_eq!(best, Scheme::Rs { s: 5, codeword: 20, t: 1 });
    }

    #[test]
    fn rs_matches_exhaustive_scan() {
        for i in 0..300 {
            let p = 10f64.powf(-9.0 + i as f64 * 0.028);
            let mut best: Option<(f64, u32, usize)> = None;
            for s in 3..=12u32 {
                let ps = 1.0 - (1.0 - p).powi(s as i32);
                for len in (1usize << (s - 1))..(1usize << s) {
                    if len as f64 * ps <= 1.0 && len > 2 {
                        let rate = (len - 2) as f64 / len as f64;
                        if best.is_none_or(|b| rate > b.0) {
                            best = Some((rate, s, len));
                        }
                    }
                }
            }
            let got = rs_candidate(p, 1, 3..=12);
            match (best, got) {
                (None, None) => {}
                (Some((_, s, len)), Some(Scheme::Rs { s: gs, codeword, .. })) => {
                    assert_eq!((s, len), (gs, codeword), "p = {p}");
                }
                other => panic!("mismatch at p = {p}: {other:?}"),
            }
        }
    }

    #[test]
    fn selection_rules() {
        let rates = default_rates();
        let rs = |m, s, codeword| Candidate {
            family: CodingFamily::Rs,
            modulation: m,
            p_e: 0.0,
            scheme: Some(Scheme::Rs { s, codeword, t: 1 }),
        };
        let only = [rs(Modulation::Qpsk, 5, 20)];
        assert_eq!(select_config(&only, &rates).0.modulation, Modulation::Qpsk);

        let pair = [rs(Modulation::Bpsk, 8, 255), rs(Modulation::Qam16, 8, 255)];
        assert_eq!(select_config(&pair, &rates).0.modulation, Modulation::Qam16);

        let infeasible = [Candidate {
            scheme: None,
            ..rs(Modulation::Qam16, 8, 255)
        }];
        let (cfg, fallback) = select_config(&infeasible, &rates);
        assert!(fallback);
        assert_eq!(cfg, fallback_config(&rates));
        assert_eq!(cfg.code_rate(), 4.0 / 9.0);
    }

    #[test]
    fn equal_throughput_prefers_rs() {
        // MDPC m=2 (R_F 4/9) vs an RS code of identical rate is impossible
        // with t = 1, so force equal keys through the comparator directly.
        let rates = PerModulation([1.0; 4]);
        let mdpc = Candidate {
            family: CodingFamily::Mdpc,
            modulation: Modulation::Bpsk,
            p_e: 0.0,
            scheme: Some(Scheme::Mdpc { m: 2, n: 2 }),
        };
        let rs = Candidate {
            family: CodingFamily::Rs,
            ..mdpc
        };
        assert_eq!(compare_candidates(&rs, &mdpc, &rates), Ordering::Greater);
        let higher = Candidate {
            modulation: Modulation::Qam16,
            ..mdpc
        };
        assert_eq!(compare_candidates(&higher, &mdpc, &rates), Ordering::Greater);
    }

    #[test]
    fn optimizer_charges_three_units_per_candidate() {
        let mut counter = ComplexityCounter::default();
        let opt = Optimizer::default();
        let out = opt.optimize(&PerModulation([1e-3; 4]), &mut counter);
        assert_eq!(out.candidates.len(), 8);
        assert_eq!(counter.pending(), 24);
    }
}
