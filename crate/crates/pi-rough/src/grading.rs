//! Multi-index combinatorics for inhomogeneous gradings.
//!
//! A grading assigns each of `k` coordinate blocks a roughness parameter
//! `p_i >= 1`. Words over the block alphabet carry the weighted degree
//! `sum_j n_j / p_j`; everything downstream (truncation, variation
//! exponents, derivative level sets) is driven by this degree and by the
//! ordered set of attainable degree values.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num::rational::Rational64;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::ratio::{format_ratio, ratio_to_f64, rational_from_f64};

/// A finite sequence of block labels in `1..=k`. The empty sequence is the
/// scalar slot.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn new(labels: impl Into<Vec<usize>>) -> Self {
        MultiIndex(labels.into())
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of occurrences of label `j`.
    pub fn count_of(&self, j: usize) -> usize {
        self.0.iter().filter(|&&r| r == j).count()
    }

    /// Drop the last label.
    pub fn parent(&self) -> Option<MultiIndex> {
        if self.0.is_empty() {
            None
        } else {
            Some(MultiIndex(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn concat(&self, other: &MultiIndex) -> MultiIndex {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MultiIndex(v)
    }

    pub fn extended(&self, label: usize) -> MultiIndex {
        let mut v = self.0.clone();
        v.push(label);
        MultiIndex(v)
    }

    /// Count of labels lying in `blocks`.
    pub fn count_in(&self, blocks: &[usize]) -> usize {
        self.0.iter().filter(|r| blocks.contains(r)).count()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// Graded lexicographic order: by length, then by labels. Fixing this order
// fixes every summation order in the tensor algebra.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The grading data: roughness tuple, block dimensions and truncation degree.
///
/// Construction precomputes the (finite) set of admissible multi-indices of
/// degree `<= q` together with the dense coefficient layout used by tensor
/// elements.
#[derive(Debug)]
pub struct GradingSpec {
    p: Vec<Rational64>,
    dims: Vec<usize>,
    q: Rational64,
    p_max: Rational64,
    admissible: Vec<MultiIndex>,
    component_ids: HashMap<MultiIndex, usize>,
    component_sizes: Vec<usize>,
    /// Offset of each block in the flat coordinate vector.
    block_offsets: Vec<usize>,
}

impl PartialEq for GradingSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.dims == other.dims && self.q == other.q
    }
}
impl Eq for GradingSpec {}

pub type Spec = Arc<GradingSpec>;

impl GradingSpec {
    pub fn new(p: Vec<Rational64>, dims: Vec<usize>, q: Rational64) -> Result<Spec> {
        if p.is_empty() || p.len() != dims.len() {
            return Err(Error::InvalidGrading(format!(
                "p has {} entries, dims has {}",
                p.len(),
                dims.len()
            )));
        }
        if let Some(bad) = p.iter().find(|&&pi| pi < Rational64::one()) {
            return Err(Error::InvalidGrading(format!(
                "roughness parameter {} < 1",
                format_ratio(*bad)
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidGrading("zero block dimension".into()));
        }
        if q <= Rational64::zero() {
            return Err(Error::InvalidGrading(format!(
                "truncation degree {} <= 0",
                format_ratio(q)
            )));
        }
        let p_max = *p.iter().max().unwrap();
        let mut spec = GradingSpec {
            p,
            dims,
            q,
            p_max,
            admissible: Vec::new(),
            component_ids: HashMap::new(),
            component_sizes: Vec::new(),
            block_offsets: Vec::new(),
        };
        let mut offset = 0;
        for &d in &spec.dims {
            spec.block_offsets.push(offset);
            offset += d;
        }
        spec.admissible = spec.enumerate_multi_indices(q);
        for (i, r) in spec.admissible.iter().enumerate() {
            spec.component_ids.insert(r.clone(), i);
            spec.component_sizes
                .push(r.labels().iter().map(|&b| spec.dims[b - 1]).product());
        }
        Ok(Arc::new(spec))
    }

    /// Build from floats, snapping each parameter to a nearby rational.
    pub fn from_f64(p: &[f64], dims: &[usize], q: f64) -> Result<Spec> {
        let p = p
            .iter()
            .map(|&x| {
                rational_from_f64(x, 1e-12).ok_or_else(|| {
                    Error::InvalidGrading(format!("{x} is not close to a small rational"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let q = rational_from_f64(q, 1e-12).ok_or_else(|| {
            Error::InvalidGrading(format!("{q} is not close to a small rational"))
        })?;
        GradingSpec::new(p, dims.to_vec(), q)
    }

    pub fn num_blocks(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[Rational64] {
        &self.p
    }

    pub fn p_f64(&self, i: usize) -> f64 {
        ratio_to_f64(self.p[i])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block_dim(&self, block: usize) -> usize {
        self.dims[block - 1]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn block_offset(&self, block: usize) -> usize {
        self.block_offsets[block - 1]
    }

    /// Flat coordinate of `(block, coord)`, both 1-based.
    pub fn flat_coord(&self, block: usize, coord: usize) -> usize {
        self.block_offsets[block - 1] + coord - 1
    }

    /// Inverse of `flat_coord`.
    pub fn block_coord(&self, flat: usize) -> (usize, usize) {
        let mut b = self.dims.len();
        for (i, &off) in self.block_offsets.iter().enumerate() {
            if flat < off {
                b = i;
                break;
            }
        }
        (b, flat - self.block_offsets[b - 1] + 1)
    }

    pub fn q(&self) -> Rational64 {
        self.q
    }

    pub fn q_f64(&self) -> f64 {
        ratio_to_f64(self.q)
    }

    pub fn p_max(&self) -> Rational64 {
        self.p_max
    }

    pub fn p_max_f64(&self) -> f64 {
        ratio_to_f64(self.p_max)
    }

    fn check_labels(&self, r: &MultiIndex) -> Result<()> {
        for &label in r.labels() {
            if label == 0 || label > self.p.len() {
                return Err(Error::InvalidMultiIndex {
                    label,
                    blocks: self.p.len(),
                });
            }
        }
        Ok(())
    }

    /// Weighted degree `sum_j n_j(R) / p_j`, exact.
    pub fn deg(&self, r: &MultiIndex) -> Result<Rational64> {
        self.check_labels(r)?;
        Ok(self.deg_unchecked(r))
    }

    pub(crate) fn deg_unchecked(&self, r: &MultiIndex) -> Rational64 {
        let mut d = Rational64::zero();
        for &label in r.labels() {
            d += self.p[label - 1].recip();
        }
        d
    }

    pub fn deg_f64(&self, r: &MultiIndex) -> f64 {
        ratio_to_f64(self.deg_unchecked(r))
    }

    /// Product of real-argument factorials `prod_j (n_j / p_j)!`.
    pub fn gamma_weight(&self, r: &MultiIndex) -> Result<f64> {
        self.check_labels(r)?;
        let mut g = 1.0;
        for j in 1..=self.num_blocks() {
            let n = r.count_of(j);
            if n > 0 {
                let x = n as f64 / self.p_f64(j - 1);
                g *= statrs::function::gamma::gamma(x + 1.0);
            }
        }
        Ok(g)
    }

    /// All attainable degrees in `(0, upto]`, strictly ascending.
    pub fn degree_set(&self, upto: Rational64) -> Vec<Rational64> {
        let mut degrees: BTreeSet<Rational64> = BTreeSet::new();
        degrees.insert(Rational64::zero());
        for &pi in &self.p {
            let step = pi.recip();
            let mut next = Vec::new();
            for &d in &degrees {
                let mut v = d + step;
                while v <= upto {
                    next.push(v);
                    v += step;
                }
            }
            degrees.extend(next);
        }
        degrees.remove(&Rational64::zero());
        degrees.into_iter().collect()
    }

    /// All nonempty multi-indices of degree `<= s`, in graded-lex order.
    pub fn multi_indices(&self, s: Rational64) -> Vec<MultiIndex> {
        self.enumerate_multi_indices(s)
    }

    // Breadth-first word extension, pruning as soon as the degree exceeds
    // the bound (every extension only increases the degree).
    fn enumerate_multi_indices(&self, s: Rational64) -> Vec<MultiIndex> {
        let mut out: Vec<MultiIndex> = Vec::new();
        let mut frontier: Vec<(MultiIndex, Rational64)> = vec![(MultiIndex::empty(), Rational64::zero())];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for (r, d) in frontier {
                for j in 1..=self.num_blocks() {
                    let dj = d + self.p[j - 1].recip();
                    if dj <= s {
                        let rj = r.extended(j);
                        out.push(rj.clone());
                        next.push((rj, dj));
                    }
                }
            }
            frontier = next;
        }
        out.sort();
        out
    }

    /// The admissible set for the truncation degree `q`, cached.
    pub fn admissible(&self) -> &[MultiIndex] {
        &self.admissible
    }

    pub fn component_id(&self, r: &MultiIndex) -> Option<usize> {
        self.component_ids.get(r).copied()
    }

    pub fn component_size(&self, r: &MultiIndex) -> Option<usize> {
        self.component_ids.get(r).map(|&i| self.component_sizes[i])
    }

    pub fn is_admissible(&self, r: &MultiIndex) -> bool {
        self.component_ids.contains_key(r)
    }

    /// Longest admissible word length.
    pub fn max_len(&self) -> usize {
        self.admissible.last().map_or(0, MultiIndex::len)
    }

    /// Largest attainable degree `<= 1`.
    pub fn degree_at_most_one(&self) -> Rational64 {
        *self
            .degree_set(Rational64::one())
            .last()
            .expect("1/p_max <= 1 is always attainable")
    }

    /// Smallest attainable degree `> 1`.
    pub fn degree_above_one(&self) -> Rational64 {
        // S contains m/p_max for every m >= 1, so (1, 2] is inhabited.
        *self
            .degree_set(Rational64::from_integer(2))
            .iter()
            .find(|&&d| d > Rational64::one())
            .expect("degree set has an element above 1")
    }

    /// Lower bound for the extension-certificate constant:
    /// `(p_1^2 ... p_k^2 (1 + sum_{r>=3} (2/(r-2))^s))^(1/k)` with `s` the
    /// smallest attainable degree above 1.
    pub fn beta_lower_bound(&self) -> f64 {
        let s = ratio_to_f64(self.degree_above_one());
        debug_assert!(s > 1.0);
        let series = two_power_zeta(s, 1e-10);
        let prod: f64 = self.p.iter().map(|&pi| ratio_to_f64(pi).powi(2)).product();
        (prod * (1.0 + series)).powf(1.0 / self.num_blocks() as f64)
    }
}

/// `sum_{j>=1} (2/j)^s = 2^s * zeta(s)` for `s > 1`, to absolute tolerance
/// `tol`. Partial sums plus an Euler-Maclaurin tail, doubling the cut until
/// the magnitude of the first omitted correction drops below `tol`.
fn two_power_zeta(s: f64, tol: f64) -> f64 {
    let scale = 2f64.powf(s);
    let mut n = 64usize;
    loop {
        let nf = n as f64;
        let err = scale * s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0)
            * nf.powf(-s - 5.0)
            / 30240.0;
        if err < tol || n >= 1 << 22 {
            let mut partial = 0.0;
            for j in 1..n {
                partial += (j as f64).powf(-s);
            }
            let zeta = partial
                + nf.powf(1.0 - s) / (s - 1.0)
                + nf.powf(-s) / 2.0
                + s * nf.powf(-s - 1.0) / 12.0
                - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
            return scale * zeta;
        }
        n *= 2;
    }
}

/// Permutation of `{0..K-1}` in image form: `perm[pos] = image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w ∘ σ`: position `i` collects `w[σ(i)]`.
    pub fn precompose<T: Copy>(&self, w: &[T]) -> Vec<T> {
        self.0.iter().map(|&j| w[j]).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }
}

/// Ordered shuffles `OS(k_1, ..., k_n)`: permutations of `{1..K}` that are
/// increasing within each block of positions and whose block-end images
/// increase across blocks.
///
/// Such a permutation is an ordered set partition of the image values into
/// parts of the given sizes with strictly increasing maxima; generation
/// walks that structure directly instead of filtering `S_K`.
pub fn ordered_shuffles(sizes: &[usize]) -> Result<Vec<Permutation>> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::ZeroBlock);
    }
    let total: usize = sizes.iter().sum();
    let values: Vec<usize> = (0..total).collect();
    let mut out = Vec::new();
    let mut parts: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    assign(&values, sizes, sizes.len(), &mut parts, &mut out);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    return Ok(out);

    // Fill parts from the last one backwards; the running maximum of the
    // remaining values must land in the last unfilled part, which forces
    // the maxima to increase across parts.
    fn assign(
        remaining: &[usize],
        sizes: &[usize],
        unfilled: usize,
        parts: &mut Vec<Vec<usize>>,
        out: &mut Vec<Permutation>,
    ) {
        if unfilled == 0 {
            let mut sigma = Vec::with_capacity(parts.iter().map(Vec::len).sum());
            for part in parts.iter() {
                let mut sorted = part.clone();
                sorted.sort_unstable();
                sigma.extend(sorted);
            }
            out.push(Permutation(sigma));
            return;
        }
        let last = unfilled - 1;
        let max = *remaining.last().unwrap();
        let pool = &remaining[..remaining.len() - 1];
        let choose = sizes[last] - 1;
        let mut picked = Vec::with_capacity(choose);
        combinations(pool, choose, 0, &mut picked, &mut |subset| {
            let mut part = subset.to_vec();
            part.push(max);
            let rest: Vec<usize> = pool.iter().copied().filter(|v| !subset.contains(v)).collect();
            parts[last] = part;
            assign(&rest, sizes, last, parts, out);
        });
    }

    fn combinations(
        pool: &[usize],
        k: usize,
        start: usize,
        acc: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if acc.len() == k {
            f(acc);
            return;
        }
        for i in start..pool.len() {
            acc.push(pool[i]);
            combinations(pool, k, i + 1, acc, f);
            acc.pop();
        }
    }
}
