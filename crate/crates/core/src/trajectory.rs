//! Outcome trajectories of the sequentially measured chain: samplers and
//! exact small-instance probabilities.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, CVec, C64, ZERO};
use crate::patterns::Pattern;
use crate::qmc::{DensityMatrix, KrausFamily, Superoperator};

/// Where a sampled trajectory came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub master_seed: u64,
    pub index: u64,
}

/// Binary outcome sequence, stored as the sorted positions of its ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    len: usize,
    ones: Vec<usize>,
    provenance: Option<Provenance>,
}

impl Trajectory {
    pub fn zeros(len: usize) -> Self {
        Self { len, ones: Vec::new(), provenance: None }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let ones = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
        Self { len: bits.len(), ones, provenance: None }
    }

    pub fn from_ones(len: usize, ones: Vec<usize>) -> Result<Self> {
        if ones.windows(2).any(|w| w[1] <= w[0]) || ones.last().is_some_and(|&p| p >= len) {
            return Err(Error::Config("one positions must be increasing and inside the trajectory".into()));
        }
        Ok(Self { len, ones, provenance: None })
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn ones(&self) -> &[usize] {
        &self.ones
    }

    pub fn count_ones(&self) -> usize {
        self.ones.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.ones.binary_search(&i).is_ok()
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut bits = vec![false; self.len];
        for &p in &self.ones {
            bits[p] = true;
        }
        bits
    }

    /// Index into [`exact_distribution`]: the first outcome is the most
    /// significant bit.
    pub fn to_index(&self) -> usize {
        self.ones.iter().fold(0, |acc, &p| acc | 1 << (self.len - 1 - p))
    }
}

/// ChaCha8 stream `index` of the generator seeded with `master_seed`.
pub fn trajectory_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Initial state of the joint chain.
#[derive(Debug, Clone)]
pub enum InitialState {
    Pure(CVec),
    /// Sampled as a mixture of its eigenvectors.
    Mixed(DensityMatrix),
}

impl InitialState {
    pub fn density(&self) -> Result<DensityMatrix> {
        match self {
            InitialState::Pure(v) => DensityMatrix::pure(v),
            InitialState::Mixed(rho) => Ok(rho.clone()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            InitialState::Pure(v) => v.len(),
            InitialState::Mixed(rho) => rho.dim(),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> CVec {
        match self {
            InitialState::Pure(v) => v / C64::new(linalg::vec_norm(v), 0.0),
            InitialState::Mixed(rho) => {
                let (vals, vecs) = rho.eigen_mixture();
                let r: f64 = rng.gen();
                let mut acc = 0.0;
                let mut pick = vals.len() - 1;
                for (i, w) in vals.iter().enumerate() {
                    acc += w.max(0.0);
                    if r < acc {
                        pick = i;
                        break;
                    }
                }
                vecs.column(pick).into_owned()
            }
        }
    }
}

fn check_initial(kraus: &KrausFamily, initial: &InitialState) -> Result<()> {
    if initial.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch { expected: kraus.dim(), got: initial.dim() });
    }
    if !kraus.is_binary() {
        return Err(Error::InvalidKraus("sampling needs a binary family".into()));
    }
    Ok(())
}

/// Step-by-step sampling: `p(1|ψ) = ‖K_1ψ‖²`, then `ψ ← K_ω ψ / ‖K_ω ψ‖`.
pub fn sample_trajectory<R: Rng + ?Sized>(
    kraus: &KrausFamily,
    initial: &InitialState,
    n: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    let mut ones = Vec::new();
    step_sequential(kraus, initial, n, rng, |i| ones.push(i))?;
    Ok(Trajectory { len: n, ones, provenance: None })
}

/// Number of ones in a sequentially sampled trajectory, without storing it.
pub fn count_ones_sequential<R: Rng + ?Sized>(
    kraus: &KrausFamily,
    initial: &InitialState,
    n: usize,
    rng: &mut R,
) -> Result<u64> {
    let mut count = 0;
    step_sequential(kraus, initial, n, rng, |_| count += 1)?;
    Ok(count)
}

fn step_sequential<R: Rng + ?Sized>(
    kraus: &KrausFamily,
    initial: &InitialState,
    n: usize,
    rng: &mut R,
    mut on_one: impl FnMut(usize),
) -> Result<()> {
    check_initial(kraus, initial)?;
    let (k0, k1) = (kraus.k0(), kraus.k1());
    let mut psi = initial.draw(rng);
    let mut next = CVec::zeros(psi.len());
    for i in 0..n {
        next.gemv(C64::new(1.0, 0.0), k1, &psi, ZERO);
        let p1 = next.norm_squared();
        let r: f64 = rng.gen();
        let norm2 = if r < p1 {
            on_one(i);
            p1
        } else {
            next.gemv(C64::new(1.0, 0.0), k0, &psi, ZERO);
            next.norm_squared()
        };
        if norm2 < TOLERANCES.norm_collapse * TOLERANCES.norm_collapse {
            return Err(Error::NormCollapse(norm2.sqrt()));
        }
        next /= C64::new(norm2.sqrt(), 0.0);
        std::mem::swap(&mut psi, &mut next);
    }
    Ok(())
}

/// Samples by jumping straight to the next one: with `r` uniform, the next
/// one occurs at the first `k` where `‖K_0^k ψ‖² < r`, found by binary
/// search over the powers `K_0^{2^j}`. Equal in law to
/// [`sample_trajectory`] and much faster when ones are rare.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    k1: CMat,
    powers: Vec<CMat>,
    n: usize,
}

impl JumpSampler {
    pub fn new(kraus: &KrausFamily, n: usize) -> Result<Self> {
        if !kraus.is_binary() {
            return Err(Error::InvalidKraus("sampling needs a binary family".into()));
        }
        let mut powers = vec![kraus.k0().clone()];
        while (1usize << powers.len()) <= n.max(1) {
            let last = powers.last().unwrap();
            powers.push(last * last);
        }
        Ok(Self { k1: kraus.k1().clone(), powers, n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn sample<R: Rng + ?Sized>(&self, initial: &InitialState, rng: &mut R) -> Result<Trajectory> {
        if initial.dim() != self.k1.nrows() {
            return Err(Error::DimensionMismatch { expected: self.k1.nrows(), got: initial.dim() });
        }
        let mut psi = initial.draw(rng);
        let mut pos = 0usize;
        let mut ones = Vec::new();
        let mut trial = CVec::zeros(psi.len());
        while pos < self.n {
            let r = 1.0 - rng.gen::<f64>();
            let remaining = self.n - pos;
            let mut k = 0usize;
            for j in (0..self.powers.len()).rev() {
                let step = 1usize << j;
                if k + step > remaining {
                    continue;
                }
                trial.gemv(C64::new(1.0, 0.0), &self.powers[j], &psi, ZERO);
                if trial.norm_squared() >= r {
                    std::mem::swap(&mut psi, &mut trial);
                    k += step;
                }
            }
            if k == remaining {
                break;
            }
            pos += k;
            ones.push(pos);
            pos += 1;
            trial.gemv(C64::new(1.0, 0.0), &self.k1, &psi, ZERO);
            let norm = trial.norm();
            if norm < TOLERANCES.norm_collapse {
                return Err(Error::NormCollapse(norm));
            }
            trial /= C64::new(norm, 0.0);
            std::mem::swap(&mut psi, &mut trial);
        }
        Ok(Trajectory { len: self.n, ones, provenance: None })
    }
}

/// Largest `n` accepted by [`exact_distribution`].
pub const EXACT_MAX_LEN: usize = 12;

/// All `2^n` outcome probabilities, indexed as in [`Trajectory::to_index`].
pub fn exact_distribution(kraus: &KrausFamily, initial: &DensityMatrix, n: usize) -> Result<Vec<f64>> {
    if n > EXACT_MAX_LEN {
        return Err(Error::TooLarge(format!("exact distribution needs n <= {EXACT_MAX_LEN}, got {n}")));
    }
    if initial.dim() != kraus.dim() {
        return Err(Error::DimensionMismatch { expected: kraus.dim(), got: initial.dim() });
    }
    let mut out = vec![0.0; 1 << n];
    fn walk(kraus: &KrausFamily, rho: &CMat, depth: usize, n: usize, index: usize, out: &mut [f64]) {
        if depth == n {
            out[index] = rho.trace().re;
            return;
        }
        for (bit, k) in kraus.ops().iter().enumerate().take(2) {
            let next = k * rho * k.adjoint();
            walk(kraus, &next, depth + 1, n, index << 1 | bit, out);
        }
    }
    walk(kraus, initial.matrix(), 0, n, 0, &mut out);
    let total: f64 = out.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InternalInconsistency(format!("probabilities sum to {total}")));
    }
    Ok(out)
}

fn multinomial(counts: &[u64]) -> u64 {
    let mut total = 0u64;
    let mut acc = 1u128;
    for &m in counts {
        for i in 1..=m {
            total += 1;
            acc = acc * total as u128 / i as u128;
            if acc > u64::MAX as u128 {
                return u64::MAX;
            }
        }
    }
    acc as u64
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Exact probability that the trajectory consists of exactly the given
/// pattern counts, in any order, separated by at least `s` zeros and with
/// any number of leading and trailing zeros.
///
/// Every distinct ordering of the pattern multiset is propagated through a
/// dynamic programme over positions in the vectorised Schrödinger picture,
/// so the cost is `O(orderings · k · n · D⁴)`.
pub fn pattern_event_probability(
    kraus: &KrausFamily,
    initial: &DensityMatrix,
    n: usize,
    counts: &[(Pattern, u64)],
    s: usize,
    ordering_budget: u64,
) -> Result<f64> {
    let dim = kraus.dim();
    if initial.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: initial.dim() });
    }
    let s = s.max(1);
    let counts: Vec<(Pattern, u64)> = counts.iter().filter(|(_, m)| *m > 0).cloned().collect();
    for (p, _) in &counts {
        if p.max_gap() >= s {
            return Err(Error::InvalidPattern(format!("{p} has an internal gap of at least {s}")));
        }
    }
    let k: u64 = counts.iter().map(|(_, m)| m).sum();
    let b0 = Superoperator::sandwich(kraus.k0(), &kraus.k0().adjoint());
    let b1 = Superoperator::sandwich(kraus.k1(), &kraus.k1().adjoint());
    let rho = linalg::vectorize(initial.matrix());
    let trace = |v: &CVec| -> f64 { (0..dim).map(|i| v[i * dim + i].re).sum() };
    if k == 0 {
        let mut v = rho;
        for _ in 0..n {
            v = b0.matrix() * v;
        }
        return Ok(trace(&v));
    }
    let needed: u64 = counts.iter().map(|(p, m)| m * p.len() as u64).sum::<u64>() + (k - 1) * s as u64;
    if (n as u64) < needed {
        return Ok(0.0);
    }
    let orderings = multinomial(&counts.iter().map(|(_, m)| *m).collect::<Vec<_>>());
    if orderings > ordering_budget {
        return Err(Error::TooManyPatterns(orderings));
    }
    let blocks: Vec<CMat> = counts
        .iter()
        .map(|(p, _)| {
            p.bits().iter().fold(linalg::identity(dim * dim), |acc, &b| {
                let step = if b { b1.matrix() } else { b0.matrix() };
                step * acc
            })
        })
        .collect();
    let b0_gap = {
        let mut acc = linalg::identity(dim * dim);
        for _ in 0..s {
            acc = b0.matrix() * acc;
        }
        acc
    };
    let mut order: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, (_, m))| std::iter::repeat_n(i, *m as usize))
        .collect();
    let zero = CVec::zeros(dim * dim);
    let mut total = 0.0;
    loop {
        let mut f: Vec<CVec> = vec![zero.clone(); n + 1];
        f[0] = rho.clone();
        for (j, &pi) in order.iter().enumerate() {
            let len = counts[pi].0.len();
            let gap = if j == 0 { 0 } else { s };
            let mut next = vec![zero.clone(); n + 1];
            let mut h = zero.clone();
            for t in 0..=n {
                if t > 0 {
                    h = b0.matrix() * &h;
                }
                if t >= gap {
                    let src = &f[t - gap];
                    if gap == 0 {
                        h += src;
                    } else {
                        h += &b0_gap * src;
                    }
                }
                if t + len <= n {
                    next[t + len] += &blocks[pi] * &h;
                }
            }
            f = next;
        }
        let mut h = zero.clone();
        for v in &f {
            h = b0.matrix() * &h + v;
        }
        total += trace(&h);
        if !next_permutation(&mut order) {
            break;
        }
    }
    Ok(total)
}

/// Stationary state of `kraus` as an initial state for the exact oracles.
pub fn stationary_initial(kraus: &KrausFamily) -> Result<DensityMatrix> {
    crate::qmc::stationary_state(kraus)
}

/// Schrödinger-picture map of one outcome, `ρ ↦ K_i ρ K_i†`.
pub fn outcome_map(kraus: &KrausFamily, i: usize) -> Superoperator {
    let k = &kraus.ops()[i];
    Superoperator::sandwich(k, &k.adjoint())
}

/// `Tr(K_1 ρ K_1†)`.
pub fn one_step_click_probability(kraus: &KrausFamily, rho: &DensityMatrix) -> f64 {
    rho.expect(&(kraus.k1().adjoint() * kraus.k1())).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::amplitude_damping;

    #[test]
    fn bits_round_trip() {
        let bits = [true, false, false, true, true];
        let t = Trajectory::from_bits(&bits);
        assert_eq!(t.to_bits(), bits);
        assert_eq!(t.ones(), &[0, 3, 4]);
        assert_eq!(t.to_index(), 0b10011);
        assert!(Trajectory::from_ones(3, vec![1, 1]).is_err());
        assert!(Trajectory::from_ones(3, vec![3]).is_err());
    }

    #[test]
    fn exact_distribution_one_step() {
        let k = amplitude_damping(0.3);
        let rho = DensityMatrix::maximally_mixed(2);
        let p = exact_distribution(&k, &rho, 1).unwrap();
        assert!((p[1] - 0.15).abs() < 1e-12);
        assert!((p[1] - one_step_click_probability(&k, &rho)).abs() < 1e-12);
        assert!(matches!(exact_distribution(&k, &rho, 13), Err(Error::TooLarge(_))));
    }

    #[test]
    fn jump_and_sequential_agree_on_one_counts() {
        let k = amplitude_damping(0.3);
        let excited = InitialState::Pure(CVec::from_vec(vec![ZERO, C64::new(1.0, 0.0)]));
        let js = JumpSampler::new(&k, 7).unwrap();
        let mut rng = trajectory_rng(1, 0);
        let mut a = [0usize; 8];
        let mut b = [0usize; 8];
        for _ in 0..20_000 {
            a[js.sample(&excited, &mut rng).unwrap().ones().first().map_or(7, |&p| p)] += 1;
            b[sample_trajectory(&k, &excited, 7, &mut rng).unwrap().ones().first().map_or(7, |&p| p)] += 1;
        }
        // First click is geometric with parameter 0.3.
        for i in 0..7 {
            let expected = 20_000.0 * 0.3 * 0.7f64.powi(i as i32);
            let sigma = expected.sqrt();
            assert!((a[i] as f64 - expected).abs() < 5.0 * sigma, "jump {i}: {}", a[i]);
            assert!((b[i] as f64 - expected).abs() < 5.0 * sigma, "seq {i}: {}", b[i]);
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = trajectory_rng(42, 3);
        let mut b = trajectory_rng(42, 3);
        let mut c = trajectory_rng(42, 4);
        let (x, y, z): (u64, u64, u64) = (a.gen(), b.gen(), c.gen());
        assert_eq!(x, y);
        assert_ne!(x, z);
    }
}
