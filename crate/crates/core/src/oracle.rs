//! Brute-force ground truth: local optima, hill-climber endpoint
//! distributions, the dependency matrix they induce, and population sizes
//! that make fixed hybrid optima likely to appear.

use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;

use crate::dependency::{fihc, Vig};
use crate::error::{Error, Result};
use crate::eval::{Evaluator, FnObjective, Objective};
use crate::rng::RngStream;
use crate::sll::{normalized_information, Dsm};
use crate::solution::{bits_to_index, Solution};
use crate::FITNESS_EPS;

/// Largest problem the enumeration routines accept.
pub const ENUMERATION_LIMIT: usize = 24;
/// Largest problem the exact endpoint computation accepts.
pub const EXACT_ENDPOINT_LIMIT: usize = 12;

fn guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooLarge { n, limit });
    }
    Ok(())
}

fn value_table(objective: &dyn Objective) -> Vec<f64> {
    let n = objective.num_vars();
    (0..1u64 << n)
        .into_par_iter()
        .map(|i| objective.value(Solution::from_index(i, n).bits()))
        .collect()
}

/// Whether no single-bit flip strictly improves `s`.
pub fn is_local_optimum(objective: &dyn Objective, s: &Solution) -> bool {
    let f = objective.value(s.bits());
    let mut t = s.clone();
    (0..s.len()).all(|i| {
        t.flip(i);
        let better = objective.value(t.bits()) > f + FITNESS_EPS;
        t.flip(i);
        !better
    })
}

/// Every solution without a strictly improving single-bit flip, in index
/// order.
pub fn enumerate_local_optima(objective: &dyn Objective) -> Result<Vec<Solution>> {
    let n = objective.num_vars();
    guard(n, ENUMERATION_LIMIT)?;
    let table = value_table(objective);
    let optima = (0..1u64 << n)
        .into_par_iter()
        .filter(|&x| (0..n).all(|i| table[(x ^ (1 << i)) as usize] <= table[x as usize] + FITNESS_EPS))
        .map(|x| Solution::from_index(x, n))
        .collect();
    Ok(optima)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointMode {
    /// Exact probabilities, propagated over every start and every visiting
    /// order of every sweep.
    Exhaustive,
    MonteCarlo {
        samples: u64,
    },
}

/// Probability of each hill-climbing endpoint, keyed by solution index.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointDistribution {
    n: usize,
    probs: BTreeMap<u64, f64>,
}

impl EndpointDistribution {
    pub fn from_probabilities(n: usize, probs: BTreeMap<u64, f64>) -> Self {
        EndpointDistribution { n, probs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probability(&self, s: &Solution) -> f64 {
        self.probs.get(&s.to_index()).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn endpoints(&self) -> impl Iterator<Item = (Solution, f64)> + '_ {
        self.probs.iter().map(|(&i, &p)| (Solution::from_index(i, self.n), p))
    }

    /// `[p00, p01, p10, p11]` for variables `a` and `b`.
    pub fn pair_joint(&self, a: usize, b: usize) -> [f64; 4] {
        let mut joint = [0.0; 4];
        for (&x, &p) in &self.probs {
            let k = (((x >> a) & 1) << 1 | ((x >> b) & 1)) as usize;
            joint[k] += p;
        }
        joint
    }
}

/// Distribution of the endpoints of [`fihc`] from a uniform random start
/// with uniformly reshuffled visiting orders.
pub fn fihc_endpoint_distribution(
    objective: &dyn Objective,
    mode: EndpointMode,
    rng: &RngStream,
) -> Result<EndpointDistribution> {
    let n = objective.num_vars();
    match mode {
        EndpointMode::Exhaustive => {
            guard(n, EXACT_ENDPOINT_LIMIT)?;
            Ok(exact_endpoints(&value_table(objective), n))
        }
        EndpointMode::MonteCarlo { samples } => {
            if samples == 0 {
                return Err(Error::InvalidParameter("sample count must be positive".into()));
            }
            Ok(sampled_endpoints(objective, samples, rng))
        }
    }
}

fn exact_endpoints(table: &[f64], n: usize) -> EndpointDistribution {
    let states = 1usize << n;
    let local_opt: Vec<bool> = (0..states)
        .map(|x| (0..n).all(|i| table[x ^ (1 << i)] <= table[x] + FITNESS_EPS))
        .collect();
    let mut mass = vec![1.0 / states as f64; states];
    let mut ends = vec![0.0; states];
    loop {
        // absorb mass that starts a sweep at a local optimum
        let mut live = 0.0;
        for x in 0..states {
            if local_opt[x] {
                ends[x] += mass[x];
                mass[x] = 0.0;
            } else {
                live += mass[x];
            }
        }
        if live < 1e-15 {
            break;
        }
        // one sweep: the next position is uniform among the unvisited ones
        let mut layer: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (x, &m) in mass.iter().enumerate() {
            if m > 0.0 {
                layer.insert((x, 0), m);
            }
        }
        for visited in 0..n {
            let share = 1.0 / (n - visited) as f64;
            let mut next: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for (&(x, used), &m) in &layer {
                for i in (0..n).filter(|i| used >> i & 1 == 0) {
                    let y = x ^ (1 << i);
                    let to = if table[y] > table[x] + FITNESS_EPS { y } else { x };
                    *next.entry((to, used | 1 << i)).or_insert(0.0) += m * share;
                }
            }
            layer = next;
        }
        mass = vec![0.0; states];
        for ((x, _), m) in layer {
            mass[x] += m;
        }
    }
    let probs = ends
        .into_iter()
        .enumerate()
        .filter(|&(_, p)| p > 0.0)
        .map(|(x, p)| (x as u64, p))
        .collect();
    EndpointDistribution { n, probs }
}

const CHUNK: u64 = 10_000;

fn sampled_endpoints(objective: &dyn Objective, samples: u64, rng: &RngStream) -> EndpointDistribution {
    let n = objective.num_vars();
    let table = (n <= 20).then(|| value_table(objective));
    let chunks = samples.div_ceil(CHUNK);
    let counts: Vec<BTreeMap<u64, u64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng.child(c);
            let todo = CHUNK.min(samples - c * CHUNK);
            let mut counts = BTreeMap::new();
            let tabled;
            let obj: &dyn Objective = match &table {
                Some(t) => {
                    tabled = FnObjective::new(n, move |b: &[bool]| t[bits_to_index(b) as usize]);
                    &tabled
                }
                None => objective,
            };
            for _ in 0..todo {
                let mut eval = Evaluator::unlimited(obj);
                let mut s = Solution::random(n, &mut r);
                fihc(&mut eval, &mut s, &mut r).expect("unlimited budget");
                *counts.entry(s.to_index()).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut merged: BTreeMap<u64, u64> = BTreeMap::new();
    for c in counts {
        for (k, v) in c {
            *merged.entry(k).or_insert(0) += v;
        }
    }
    let probs = merged
        .into_iter()
        .map(|(k, v)| (k, v as f64 / samples as f64))
        .collect();
    EndpointDistribution { n, probs }
}

/// Normalized information of every pair under the endpoint distribution.
pub fn theoretical_dsm(dist: &EndpointDistribution) -> Dsm {
    let mut d = Dsm::new(dist.n());
    for a in 0..dist.n() {
        for b in a + 1..dist.n() {
            d.set(a, b, normalized_information(dist.pair_joint(a, b)));
        }
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridTarget {
    One,
    Two,
    AllThree,
}

impl HybridTarget {
    pub fn count(self) -> u32 {
        match self {
            HybridTarget::One => 1,
            HybridTarget::Two => 2,
            HybridTarget::AllThree => 3,
        }
    }
}

/// Probability that `t` fixed endpoints, each drawn with probability `ph`
/// per member, all appear in a population of `m`.
pub fn hybrid_presence_probability(ph: f64, t: u32, m: u64) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0;
    for j in 0..=t {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * binom * (1.0 - j as f64 * ph).max(0.0).powf(m as f64);
        binom = binom * (t - j) as f64 / (j + 1) as f64;
    }
    total
}

/// Smallest population in which the target hybrids are all present with
/// at least the given confidence.
pub fn hybrid_presence_population_size(ph: f64, confidence: f64, target: HybridTarget) -> Result<u64> {
    if !(ph > 0.0 && ph < 1.0 && ph * target.count() as f64 <= 1.0) {
        return Err(Error::InvalidParameter(format!("hybrid probability {ph} out of range")));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidParameter(format!("confidence {confidence} out of range")));
    }
    let t = target.count();
    (1..=10_000_000u64)
        .find(|&m| hybrid_presence_probability(ph, t, m) >= confidence)
        .ok_or_else(|| Error::InvalidParameter("population size above ten million".into()))
}

/// A matrix that is perfect for `vig`: dependent pairs drawn from
/// `(theta, 1]`, independent pairs from `[0, theta)`.
pub fn synthetic_perfect_dsm<R: Rng + ?Sized>(vig: &Vig, theta: f64, rng: &mut R) -> Dsm {
    assert!(
        (0.0..1.0).contains(&theta) && theta > 0.0,
        "threshold must lie in (0, 1)"
    );
    let mut d = Dsm::new(vig.n());
    for a in 0..vig.n() {
        for b in a + 1..vig.n() {
            let v = if vig.has_edge(a, b) {
                1.0 - rng.gen::<f64>() * (1.0 - theta)
            } else {
                rng.gen::<f64>() * theta
            };
            d.set(a, b, v);
        }
    }
    d
}

/// Interaction graph of `subfunctions` random subfunctions, each over
/// 2..=k distinct variables out of `n`.
pub fn random_additive_vig<R: Rng + ?Sized>(n: usize, k: usize, subfunctions: usize, rng: &mut R) -> Vig {
    assert!(k >= 2 && k <= n, "need 2 <= k <= n");
    let groups: Vec<Vec<usize>> = (0..subfunctions)
        .map(|_| {
            let size = rng.gen_range(2..=k);
            sample(rng, n, size).into_vec()
        })
        .collect();
    Vig::from_cliques(n, &groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::ProblemInstance;

    fn names(v: &[Solution]) -> Vec<String> {
        let mut s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        s.sort();
        s
    }

    #[test]
    fn dec3_ring_local_optima() {
        let optima = enumerate_local_optima(&ProblemInstance::dec3_ring()).unwrap();
        assert_eq!(names(&optima), ["000000", "001110", "100011", "111000", "111111"]);
    }

    #[test]
    fn onemax_has_one_local_optimum() {
        let optima = enumerate_local_optima(&ProblemInstance::onemax(10)).unwrap();
        assert_eq!(names(&optima), ["1111111111"]);
    }

    #[test]
    fn fe6_keeps_the_block_optima() {
        let optima = names(&enumerate_local_optima(&ProblemInstance::fe6()).unwrap());
        for s in ["00000000", "00001111", "11110000", "11111111"] {
            assert!(optima.contains(&s.to_string()), "{s}");
        }
    }

    #[test]
    fn enumeration_refuses_large_problems() {
        assert!(enumerate_local_optima(&ProblemInstance::onemax(25)).is_err());
        let r = fihc_endpoint_distribution(
            &ProblemInstance::onemax(13),
            EndpointMode::Exhaustive,
            &RngStream::new(0),
        );
        assert!(r.is_err());
    }

    #[test]
    fn exact_distribution_on_the_dec3_ring() {
        let d = fihc_endpoint_distribution(
            &ProblemInstance::dec3_ring(),
            EndpointMode::Exhaustive,
            &RngStream::new(0),
        )
        .unwrap();
        assert!((d.total() - 1.0).abs() < 1e-9);
        let p = |s: &str| d.probability(&Solution::from_str_bits(s).unwrap());
        let hybrids = [p("111000"), p("001110"), p("100011")];
        assert!((hybrids[0] - hybrids[1]).abs() < 1e-12 && (hybrids[1] - hybrids[2]).abs() < 1e-12);
        let ph = hybrids[0];
        assert!((p("000000") + p("111111") + 3.0 * ph - 1.0).abs() < 1e-9);
        assert_eq!(d.endpoints().count(), 5);
        let joint = d.pair_joint(0, 1);
        assert!((joint[0] - (p("000000") + ph)).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let p = ProblemInstance::dec3_ring();
        let exact = fihc_endpoint_distribution(&p, EndpointMode::Exhaustive, &RngStream::new(0)).unwrap();
        let mc =
            fihc_endpoint_distribution(&p, EndpointMode::MonteCarlo { samples: 200_000 }, &RngStream::new(4)).unwrap();
        for (s, q) in exact.endpoints() {
            assert!((mc.probability(&s) - q).abs() < 0.01);
        }
        let again =
            fihc_endpoint_distribution(&p, EndpointMode::MonteCarlo { samples: 200_000 }, &RngStream::new(4)).unwrap();
        assert_eq!(mc, again);
    }

    #[test]
    fn single_endpoint_gives_zero_matrix() {
        let d = fihc_endpoint_distribution(
            &ProblemInstance::onemax(5),
            EndpointMode::Exhaustive,
            &RngStream::new(0),
        )
        .unwrap();
        assert_eq!(d.probability(&Solution::ones(5)), 1.0);
        assert_eq!(theoretical_dsm(&d).max_entry(), 0.0);
    }

    #[test]
    fn theoretical_dsm_of_the_ring_is_perfect() {
        let p = ProblemInstance::dec3_ring();
        let d = fihc_endpoint_distribution(&p, EndpointMode::Exhaustive, &RngStream::new(0)).unwrap();
        let dsm = theoretical_dsm(&d);
        assert!(crate::sll::is_perfect(&dsm, p.ground_truth_vig().unwrap()).is_some());
    }

    #[test]
    fn presence_sizes() {
        assert_eq!(
            hybrid_presence_population_size(0.5, 0.99, HybridTarget::One).unwrap(),
            7
        );
        assert!(hybrid_presence_population_size(0.5, 0.99, HybridTarget::AllThree).is_err());
        assert!(hybrid_presence_population_size(0.1, 1.0, HybridTarget::One).is_err());
        // two targets: 1 - 2(1-p)^m + (1-2p)^m
        let p = 0.2;
        let direct = 1.0 - 2.0 * 0.8f64.powi(10) + 0.6f64.powi(10);
        assert!((hybrid_presence_probability(p, 2, 10) - direct).abs() < 1e-12);
    }

    #[test]
    fn synthetic_matrix_is_perfect() {
        let mut rng = RngStream::new(6);
        for _ in 0..50 {
            let vig = random_additive_vig(16, 4, 6, &mut rng);
            let d = synthetic_perfect_dsm(&vig, 0.5, &mut rng);
            assert!(crate::sll::is_perfect(&d, &vig).is_some());
        }
    }
}
