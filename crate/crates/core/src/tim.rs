//! Translationally invariant modes of the output chain at small `n`:
//! sparse creation operators, approximate Fock states and exact mode
//! expectations in the output state.
//!
//! Chain position `i` (1-based) is bit `i − 1` of a basis index; `σ⁺` sets
//! the bit.

use std::collections::BTreeMap;
use std::io::Write;

use sprs::{CsMat, TriMat};

use crate::absorber::JointParametric;
use crate::error::{Error, Result};
use crate::linalg::{c, CMat, C64, ZERO};
use crate::patterns::Pattern;
use crate::qmc::{stationary_state, KrausFamily, ParametricModel};

/// Largest chain for sparse operators.
pub const MAX_OPERATOR_LEN: usize = 18;
/// Largest chain for exact output states.
pub const MAX_STATE_LEN: usize = 16;

/// Sparse operator on `(C²)^{⊗n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    n: usize,
    mat: CsMat<C64>,
}

fn check_len(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::TooLarge(format!("chain length {n} outside 1..={max}")));
    }
    Ok(())
}

impl ChainOperator {
    fn from_triplets(n: usize, entries: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let dim = 1usize << n;
        let mut tri = TriMat::new((dim, dim));
        for (r, col, v) in entries {
            tri.add_triplet(r, col, v);
        }
        Self { n, mat: tri.to_csr() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CsMat<C64> {
        &self.mat
    }

    pub fn nnz(&self) -> usize {
        self.mat.nnz()
    }

    fn triplets(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::with_capacity(self.mat.nnz());
        for (r, row) in self.mat.outer_iterator().enumerate() {
            for (col, &v) in row.iter() {
                out.push((r, col, v));
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.n, self.triplets().into_iter().map(|(r, col, v)| (col, r, v.conj())))
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { n: self.n, mat: self.mat.map(|v| v * z) }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_triplets(self.n, self.triplets().into_iter().chain(other.triplets()))
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        let dim = 1usize << self.n;
        let mut entries = Vec::new();
        let other_rows: Vec<Vec<(usize, C64)>> = other
            .mat
            .outer_iterator()
            .map(|row| row.iter().map(|(col, &v)| (col, v)).collect())
            .collect();
        for (r, row) in self.mat.outer_iterator().enumerate() {
            let mut acc: BTreeMap<usize, C64> = BTreeMap::new();
            for (k, &a) in row.iter() {
                for &(col, b) in &other_rows[k] {
                    *acc.entry(col).or_insert(ZERO) += a * b;
                }
            }
            entries.extend(acc.into_iter().map(|(col, v)| (r, col, v)));
        }
        debug_assert!(entries.iter().all(|(r, col, _)| *r < dim && *col < dim));
        Self::from_triplets(self.n, entries)
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; x.len()];
        for (r, row) in self.mat.outer_iterator().enumerate() {
            let mut acc = ZERO;
            for (col, &v) in row.iter() {
                acc += v * x[col];
            }
            out[r] = acc;
        }
        out
    }

    /// Largest entry of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.adjoint();
        let mut diff: BTreeMap<(usize, usize), C64> = BTreeMap::new();
        for (r, col, v) in self.triplets() {
            *diff.entry((r, col)).or_insert(ZERO) += v;
        }
        for (r, col, v) in adj.triplets() {
            *diff.entry((r, col)).or_insert(ZERO) -= v;
        }
        diff.values().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `A*_α(n) = n^{-1/2} Σ_i σ^α_i`, the sum running over the `n − |α| + 1`
/// placements of α.
pub fn creation_operator(alpha: &Pattern, n: usize) -> Result<ChainOperator> {
    check_len(n, MAX_OPERATOR_LEN)?;
    if alpha.len() > n {
        return Err(Error::TooLarge(format!("pattern {alpha} longer than chain {n}")));
    }
    let scale = c(1.0 / (n as f64).sqrt(), 0.0);
    let base: usize = alpha.bits().iter().enumerate().filter(|(_, b)| **b).map(|(j, _)| 1 << j).sum();
    let dim = 1usize << n;
    let mut entries = Vec::new();
    for shift in 0..=(n - alpha.len()) {
        let mask = base << shift;
        for x in 0..dim {
            if x & mask == 0 {
                entries.push((x | mask, x, scale));
            }
        }
    }
    Ok(ChainOperator::from_triplets(n, entries))
}

pub fn annihilation_operator(alpha: &Pattern, n: usize) -> Result<ChainOperator> {
    Ok(creation_operator(alpha, n)?.adjoint())
}

/// `(A + A*) / √2`.
pub fn quadrature_q(alpha: &Pattern, n: usize) -> Result<ChainOperator> {
    let a_star = creation_operator(alpha, n)?;
    Ok(a_star.adjoint().add(&a_star).scale(c(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// `(A − A*) / (√2 i)`.
pub fn quadrature_p(alpha: &Pattern, n: usize) -> Result<ChainOperator> {
    let a_star = creation_operator(alpha, n)?;
    let diff = a_star.adjoint().add(&a_star.scale(c(-1.0, 0.0)));
    Ok(diff.scale(c(0.0, -std::f64::consts::FRAC_1_SQRT_2)))
}

/// `A* A`.
pub fn number_operator(alpha: &Pattern, n: usize) -> Result<ChainOperator> {
    let a_star = creation_operator(alpha, n)?;
    Ok(a_star.compose(&a_star.adjoint()))
}

/// Pattern occupation numbers of an approximate Fock state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockSpec {
    pub counts: BTreeMap<Pattern, u64>,
}

impl FockSpec {
    pub fn new(counts: impl IntoIterator<Item = (Pattern, u64)>) -> Self {
        Self { counts: counts.into_iter().filter(|(_, m)| *m > 0).collect() }
    }

    /// `Π n_α!`.
    pub fn factorial(&self) -> f64 {
        self.counts.values().map(|&m| (1..=m).map(|k| k as f64).product::<f64>()).product()
    }

    /// Creation operators in application order: last pattern first.
    fn sequence(&self) -> Vec<Pattern> {
        let mut seq = Vec::new();
        for (p, &m) in self.counts.iter().rev() {
            seq.extend(std::iter::repeat_n(p.clone(), m as usize));
        }
        seq
    }
}

fn vacuum(n: usize) -> Vec<C64> {
    let mut v = vec![ZERO; 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

/// `(n!)^{-1/2} Π_α A*_α(n)^{n_α} |Ω_n⟩`, the product ordered by pattern
/// value from left to right.
pub fn fock_state(spec: &FockSpec, n: usize) -> Result<Vec<C64>> {
    fock_state_ordered(spec, &spec.sequence(), n)
}

/// Same state with the creation operators applied in the given order
/// (first element applied first).
pub fn fock_state_ordered(spec: &FockSpec, order: &[Pattern], n: usize) -> Result<Vec<C64>> {
    check_len(n, MAX_OPERATOR_LEN)?;
    let mut v = vacuum(n);
    let mut cache: BTreeMap<Pattern, ChainOperator> = BTreeMap::new();
    for p in order {
        if !cache.contains_key(p) {
            cache.insert(p.clone(), creation_operator(p, n)?);
        }
        v = cache[p].apply(&v);
    }
    let norm = c(spec.factorial().sqrt(), 0.0);
    Ok(v.into_iter().map(|z| z / norm).collect())
}

fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨n;n|m;n⟩`.
pub fn fock_overlap(a: &FockSpec, b: &FockSpec, n: usize) -> Result<C64> {
    Ok(inner(&fock_state(a, n)?, &fock_state(b, n)?))
}

/// `max |⟨n;n|m;n⟩ − δ_{nm}|` over all pairs of `specs`.
pub fn gram_deviation(specs: &[FockSpec], n: usize) -> Result<f64> {
    let states = specs.iter().map(|s| fock_state(s, n)).collect::<Result<Vec<_>>>()?;
    let mut worst: f64 = 0.0;
    for i in 0..states.len() {
        for j in i..states.len() {
            let g = inner(&states[i], &states[j]);
            let target = if i == j { c(1.0, 0.0) } else { ZERO };
            worst = worst.max((g - target).norm());
        }
    }
    Ok(worst)
}

/// Mode expectations in the exact output state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeExpectations {
    pub number: f64,
    pub q: f64,
    pub p: f64,
    pub annihilation: C64,
}

/// Output state of `n` steps of a `D`-dimensional Kraus pair from the pure
/// state `psi0`, as one length-`2^n` output vector per system basis state
/// (index `sys · 2^n + out`).
pub fn output_state(k: &[CMat; 2], psi0: &[C64], n: usize) -> Result<Vec<C64>> {
    check_len(n, MAX_STATE_LEN)?;
    let dim = psi0.len();
    let width = 1usize << n;
    let mut psi = vec![ZERO; dim * width];
    for (s, &z) in psi0.iter().enumerate() {
        psi[s * width] = z;
    }
    for step in 0..n {
        let mut next = vec![ZERO; dim * width];
        let filled = 1usize << step;
        for out in 0..filled {
            for (b, kb) in k.iter().enumerate() {
                let target = out | b << step;
                for sp in 0..dim {
                    let mut acc = ZERO;
                    for s in 0..dim {
                        acc += kb[(sp, s)] * psi[s * width + out];
                    }
                    next[sp * width + target] = acc;
                }
            }
        }
        psi = next;
    }
    Ok(psi)
}

/// ⟨N_α⟩, ⟨Q_α⟩, ⟨P_α⟩ in the output of `n` steps of `kraus` started in
/// the mixture `Σ_k w_k |ψ_k⟩⟨ψ_k|`.
pub fn mode_expectations(
    kraus: &KrausFamily,
    mixture: &[(f64, Vec<C64>)],
    n: usize,
    alpha: &Pattern,
) -> Result<ModeExpectations> {
    check_len(n, MAX_STATE_LEN)?;
    if kraus.ops().len() != 2 {
        return Err(Error::Config("mode expectations need a two-outcome chain".into()));
    }
    let k = [kraus.ops()[0].clone(), kraus.ops()[1].clone()];
    let a = annihilation_operator(alpha, n)?;
    let width = 1usize << n;
    let mut number = 0.0;
    let mut amp = ZERO;
    for (w, psi0) in mixture {
        if *w <= 1e-15 {
            continue;
        }
        let psi = output_state(&k, psi0, n)?;
        for block in psi.chunks(width) {
            let ab = a.apply(block);
            number += w * ab.iter().map(|z| z.norm_sqr()).sum::<f64>();
            amp += c(*w, 0.0) * inner(block, &ab);
        }
    }
    let s2 = std::f64::consts::SQRT_2;
    Ok(ModeExpectations { number, q: s2 * amp.re, p: s2 * amp.im, annihilation: amp })
}

/// Mode expectations for the joint chain at `θ = θ_abs + u/√n`, started in
/// its stationary state.
pub fn exact_mode_expectations<M: ParametricModel>(
    joint: &JointParametric<M>,
    u: f64,
    n: usize,
    alpha: &Pattern,
) -> Result<ModeExpectations> {
    check_len(n, MAX_STATE_LEN)?;
    let kraus = joint.kraus_local(u, n as f64)?;
    let (weights, vecs) = stationary_state(&kraus)?.eigen_mixture();
    let mixture: Vec<(f64, Vec<C64>)> =
        weights.into_iter().zip(vecs.column_iter()).map(|(w, col)| (w, col.iter().copied().collect())).collect();
    mode_expectations(&kraus, &mixture, n, alpha)
}

type SiteOp = [[f64; 2]; 2];

const IDENTITY_OP: SiteOp = [[1.0, 0.0], [0.0, 1.0]];
const RAISE_OP: SiteOp = [[0.0, 0.0], [1.0, 0.0]];
const LOWER_OP: SiteOp = [[0.0, 1.0], [0.0, 0.0]];

fn op_product(a: &SiteOp, b: &SiteOp) -> SiteOp {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Placement progress after one more site: `0` not started, `1..len` part
/// way, `len` done. Yields `(offset used at this site, next progress)`.
fn placement_moves(progress: usize, len: usize, remaining: usize) -> Vec<(Option<usize>, usize)> {
    match progress {
        0 if remaining >= len => vec![(None, 0), (Some(0), 1)],
        0 => vec![(None, 0)],
        p if p == len => vec![(None, len)],
        p => vec![(Some(p), p + 1)],
    }
}

/// `⟨A_α⟩` and `⟨A*_α A_α⟩` in the output of `n` steps started from `rho0`,
/// by transfer matrices. Linear in `n`.
pub fn transfer_mode_moments(kraus: &KrausFamily, rho0: &CMat, n: usize, alpha: &Pattern) -> Result<(C64, f64)> {
    if kraus.ops().len() != 2 {
        return Err(Error::Config("mode expectations need a two-outcome chain".into()));
    }
    if n == 0 || alpha.len() > n {
        return Err(Error::TooLarge(format!("pattern {alpha} longer than chain {n}")));
    }
    let k = kraus.ops();
    let k_adj = [k[0].adjoint(), k[1].adjoint()];
    let bits = alpha.bits();
    let len = alpha.len();
    let offset_op = |offset: Option<usize>, op: &SiteOp| match offset {
        Some(j) if bits[j] => *op,
        _ => IDENTITY_OP,
    };
    let apply = |x: &CMat, o: &SiteOp| {
        let mut out = CMat::zeros(x.nrows(), x.ncols());
        for bp in 0..2 {
            for b in 0..2 {
                if o[bp][b] != 0.0 {
                    out += (&k[b] * x * &k_adj[bp]) * c(o[bp][b], 0.0);
                }
            }
        }
        out
    };
    let states = len + 1;
    let zero = CMat::zeros(rho0.nrows(), rho0.ncols());
    // single placement for ⟨A⟩, placement pairs (plus, minus) for ⟨A*A⟩
    let mut single = vec![zero.clone(); states];
    let mut pair = vec![zero.clone(); states * states];
    single[0] = rho0.clone();
    pair[0] = rho0.clone();
    for step in 0..n {
        let remaining = n - step;
        let mut next_single = vec![zero.clone(); states];
        for (pm, x) in single.iter().enumerate() {
            if x.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (off, to) in placement_moves(pm, len, remaining) {
                next_single[to] += apply(x, &offset_op(off, &LOWER_OP));
            }
        }
        let mut next_pair = vec![zero.clone(); states * states];
        for pp in 0..states {
            for pm in 0..states {
                let x = &pair[pp * states + pm];
                if x.iter().all(|z| *z == ZERO) {
                    continue;
                }
                for (off_p, to_p) in placement_moves(pp, len, remaining) {
                    for (off_m, to_m) in placement_moves(pm, len, remaining) {
                        let o = op_product(&offset_op(off_p, &RAISE_OP), &offset_op(off_m, &LOWER_OP));
                        if o.iter().flatten().all(|v| *v == 0.0) {
                            continue;
                        }
                        next_pair[to_p * states + to_m] += apply(x, &o);
                    }
                }
            }
        }
        single = next_single;
        pair = next_pair;
    }
    let nf = n as f64;
    let amp = crate::linalg::trace(&single[len]) / c(nf.sqrt(), 0.0);
    let number = crate::linalg::trace(&pair[len * states + len]).re / nf;
    Ok((amp, number))
}

/// One row of a trend report.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendRow {
    pub n: usize,
    pub quantity: String,
    pub exact: f64,
    pub limit: f64,
}

/// Columns `n,quantity,exact,limit`.
pub fn write_trend_csv<W: Write>(rows: &[TrendRow], w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(["n", "quantity", "exact", "limit"])?;
    for r in rows {
        wr.write_record([r.n.to_string(), r.quantity.clone(), format!("{:.12e}", r.exact), format!("{:.12e}", r.limit)])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    #[test]
    fn single_creation_at_two_sites() {
        let a = creation_operator(&p("1"), 2).unwrap();
        let v = a.apply(&vacuum(2));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[1] - c(h, 0.0)).norm() < 1e-15);
        assert!((v[2] - c(h, 0.0)).norm() < 1e-15);
        assert!(v[0].norm() + v[3].norm() < 1e-15);
    }

    #[test]
    fn vacuum_commutator_counts_placements() {
        for n in [4, 7, 10] {
            for alpha in ["1", "11", "101"] {
                let a_star = creation_operator(&p(alpha), n).unwrap();
                let v = a_star.apply(&vacuum(n));
                let norm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let expected = (n - p(alpha).len() + 1) as f64 / n as f64;
                assert!((norm2 - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratures_and_number_are_hermitian() {
        for alpha in ["1", "11", "101"] {
            assert!(quadrature_q(&p(alpha), 6).unwrap().hermiticity_defect() < 1e-15);
            assert!(quadrature_p(&p(alpha), 6).unwrap().hermiticity_defect() < 1e-15);
            assert!(number_operator(&p(alpha), 6).unwrap().hermiticity_defect() < 1e-15);
        }
    }

    #[test]
    fn fock_norms_match_closed_forms() {
        for n in [6, 9, 12] {
            let nf = n as f64;
            let one = FockSpec::new([(p("1"), 1)]);
            assert!((fock_overlap(&one, &one, n).unwrap().re - 1.0).abs() < 1e-12);
            let two = FockSpec::new([(p("1"), 2)]);
            assert!((fock_overlap(&two, &two, n).unwrap().re - (nf - 1.0) / nf).abs() < 1e-12);
            let pair = FockSpec::new([(p("11"), 1)]);
            assert!((fock_overlap(&pair, &pair, n).unwrap().re - (nf - 1.0) / nf).abs() < 1e-12);
        }
        assert!(gram_deviation(&[FockSpec::new([(p("1"), 1)])], 8).unwrap() < 1e-14);
    }

    #[test]
    fn transfer_moments_match_state_vector() {
        use crate::absorber::{joint_parametric, Completion};
        use crate::models::RotationQubit;
        let jp = joint_parametric(RotationQubit::default(), 0.2, Completion::default()).unwrap();
        let (u, n) = (0.7, 9);
        let k = jp.kraus_local(u, n as f64).unwrap();
        let rho = stationary_state(&k).unwrap();
        for alpha in ["1", "11", "101"] {
            let exact = exact_mode_expectations(&jp, u, n, &p(alpha)).unwrap();
            let (amp, number) = transfer_mode_moments(&k, rho.matrix(), n, &p(alpha)).unwrap();
            assert!((amp - exact.annihilation).norm() < 1e-12);
            assert!((number - exact.number).abs() < 1e-12);
        }
    }

    #[test]
    fn size_limits() {
        assert!(matches!(creation_operator(&p("1"), 19), Err(Error::TooLarge(_))));
        assert!(matches!(creation_operator(&p("111"), 2), Err(Error::TooLarge(_))));
    }
}
