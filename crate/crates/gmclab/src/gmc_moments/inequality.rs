use crate::rng::substream;
use rand::Rng;

/// Joint law of two nonnegative variables with finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePair {
    pub atoms: Vec<(f64, f64)>,
    pub probs: Vec<f64>,
}

impl DiscretePair {
    pub fn expect<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.atoms.iter().zip(&self.probs).map(|(&(a, b), p)| p * f(a, b)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityOutcome {
    pub trials: usize,
    pub first_violations: usize,
    pub second_violations: usize,
    /// Violations of (i) with `k >= 1`.
    pub first_violations_in_scope: usize,
    /// Violations of (ii) with `eta <= 1`.
    pub second_violations_in_scope: usize,
}

impl InequalityOutcome {
    /// No counterexample to either implication as stated for all `k > 0` and `eta > 0`.
    pub fn holds(&self) -> bool {
        self.first_violations == 0 && self.second_violations == 0
    }

    /// No counterexample within `k >= 1` for (i) and `eta <= 1` for (ii).
    pub fn holds_in_scope(&self) -> bool {
        self.first_violations_in_scope == 0 && self.second_violations_in_scope == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCheck {
    pub first: bool,
    pub second: bool,
    /// Tightest `eta` in the hypothesis of (ii).
    pub eta_second: f64,
}

const REL_TOL: f64 = 1e-10;

/// Checks both moment-comparison implications for one pair with the tightest `eta`.
///
/// (i) `E(A+B)^k <= (1+eta) E B^k` implies `E A^k <= max(eta, (eta/k)^k) E B^k`;
/// (ii) `E A^k <= eta E B^k` implies `E(A+B)^k <= [1 + max(eta, k 2^k eta^{1/k})] E B^k`.
pub fn check_pair(pair: &DiscretePair, k: f64) -> PairCheck {
    let ab = pair.expect(|a, b| (a + b).powf(k));
    let bk = pair.expect(|_, b| b.powf(k));
    let ak = pair.expect(|a, _| a.powf(k));
    let eta1 = (ab / bk - 1.0).max(0.0);
    let first = ak <= eta1.max((eta1 / k).powf(k)) * bk * (1.0 + REL_TOL) + REL_TOL * bk;
    let eta2 = ak / bk;
    let bound = 1.0 + eta2.max(k * 2f64.powf(k) * eta2.powf(1.0 / k));
    let second = ab <= bound * bk * (1.0 + REL_TOL);
    PairCheck { first, second, eta_second: eta2 }
}

pub fn random_pair<R: Rng>(rng: &mut R) -> DiscretePair {
    let m = rng.random_range(1..=6);
    let zero_a = rng.random_bool(0.2);
    let scale_a = 10f64.powf(rng.random_range(-3.0..1.0));
    let mut atoms = Vec::with_capacity(m);
    let mut probs = Vec::with_capacity(m);
    for _ in 0..m {
        let a = if zero_a || rng.random_bool(0.2) { 0.0 } else { scale_a * rng.random::<f64>() };
        let b = 10f64.powf(rng.random_range(-2.0..1.0));
        atoms.push((a, b));
        probs.push(rng.random::<f64>() + 1e-3);
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    DiscretePair { atoms, probs }
}

/// Randomised check of both implications over `trials` finite-support pairs.
pub fn elementary_inequality_check(k: f64, trials: usize, seed: u64) -> InequalityOutcome {
    let mut rng = substream(seed, crate::rng::tag("elementary-inequality"), k.to_bits());
    let mut out = InequalityOutcome {
        trials,
        first_violations: 0,
        second_violations: 0,
        first_violations_in_scope: 0,
        second_violations_in_scope: 0,
    };
    for _ in 0..trials {
        let c = check_pair(&random_pair(&mut rng), k);
        out.first_violations += usize::from(!c.first);
        out.second_violations += usize::from(!c.second);
        out.first_violations_in_scope += usize::from(!c.first && k >= 1.0);
        out.second_violations_in_scope += usize::from(!c.second && c.eta_second <= 1.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_variables_square() {
        let pair = DiscretePair { atoms: vec![(1.0, 1.0), (2.0, 2.0)], probs: vec![0.5, 0.5] };
        let ab = pair.expect(|a, b| (a + b).powi(2));
        let bb = pair.expect(|_, b| b * b);
        assert!((ab / bb - 4.0).abs() < 1e-14);
        let c = check_pair(&pair, 2.0);
        assert!(c.first && c.second);
    }

    #[test]
    fn first_implication_fails_below_one() {
        let pair = DiscretePair { atoms: vec![(1.0, 1.0)], probs: vec![1.0] };
        assert!(!check_pair(&pair, 0.5).first);
    }

    #[test]
    fn second_implication_fails_for_large_eta() {
        // (1 + 10)^3 = 1331 against 1 + max(1000, 24 * 10)
        let pair = DiscretePair { atoms: vec![(1.0, 0.1)], probs: vec![1.0] };
        let c = check_pair(&pair, 3.0);
        assert!(!c.second && c.eta_second > 1.0);
    }

    #[test]
    fn zero_first_variable() {
        let pair = DiscretePair { atoms: vec![(0.0, 1.0), (0.0, 3.0)], probs: vec![0.3, 0.7] };
        let c = check_pair(&pair, 1.5);
        assert!(c.first && c.second);
    }

    #[test]
    fn random_pairs_hold() {
        for &k in &[0.5, 1.5, 3.0] {
            assert!(elementary_inequality_check(k, 1000, 42).holds_in_scope(), "k = {k}");
        }
    }
}
