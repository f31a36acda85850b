//! Truncated tensor algebra over a block-graded coordinate space.
//!
//! Elements are finitely supported coefficient maps on words whose block
//! pattern has weighted degree at most the truncation degree. Coefficients
//! are stored densely per block pattern in row-major coordinate order, and
//! every summation runs in that fixed order, so results do not depend on
//! scheduling.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num::rational::Rational64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grading::{MultiIndex, Spec};
use crate::json::{ratio_from_value, ratio_value};
use crate::par;
use crate::ratio::format_ratio;

/// One tensor factor: a coordinate of one block, both indices 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub block: usize,
    pub coord: usize,
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.block, self.coord)
    }
}

/// A basis word: a sequence of letters. Empty = scalar slot.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn blocks(&self) -> MultiIndex {
        MultiIndex::new(self.0.iter().map(|l| l.block).collect::<Vec<_>>())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Dense index of this word inside its block-pattern component.
    pub fn component_index(&self, spec: &Spec) -> usize {
        let mut idx = 0;
        for l in &self.0 {
            idx = idx * spec.block_dim(l.block) + (l.coord - 1);
        }
        idx
    }

    /// Word for position `idx` of component `r`.
    pub fn from_component(spec: &Spec, r: &MultiIndex, mut idx: usize) -> Word {
        let mut coords = vec![0usize; r.len()];
        for (i, &b) in r.labels().iter().enumerate().rev() {
            let d = spec.block_dim(b);
            coords[i] = idx % d + 1;
            idx /= d;
        }
        Word(
            r.labels()
                .iter()
                .zip(coords)
                .map(|(&block, coord)| Letter { block, coord })
                .collect(),
        )
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for l in &self.0 {
            write!(f, "{l:?}")?;
        }
        write!(f, "]")
    }
}

/// All interleavings of `u` and `v` preserving the order within each,
/// listed with multiplicity.
pub fn shuffle_words(u: &Word, v: &Word) -> Vec<Word> {
    fn rec(u: &[Letter], v: &[Letter], acc: &mut Vec<Letter>, out: &mut Vec<Word>) {
        match (u.first(), v.first()) {
            (None, None) => out.push(Word(acc.clone())),
            (Some(&a), None) => {
                acc.push(a);
                rec(&u[1..], v, acc, out);
                acc.pop();
            }
            (None, Some(&b)) => {
                acc.push(b);
                rec(u, &v[1..], acc, out);
                acc.pop();
            }
            (Some(&a), Some(&b)) => {
                acc.push(a);
                rec(&u[1..], v, acc, out);
                acc.pop();
                acc.push(b);
                rec(u, &v[1..], acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(&u.0, &v.0, &mut Vec::new(), &mut out);
    out
}

/// An element of the truncated algebra: dense coefficients per admissible
/// block pattern (plus the scalar slot), zero components pruned.
#[derive(Clone, PartialEq)]
pub struct TensorElement {
    spec: Spec,
    comps: std::collections::BTreeMap<MultiIndex, Vec<f64>>,
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TensorElement {{")?;
        for (r, arr) in &self.comps {
            writeln!(f, "  {r}: {arr:?}")?;
        }
        write!(f, "}}")
    }
}

impl TensorElement {
    pub fn zero(spec: Spec) -> Self {
        TensorElement {
            spec,
            comps: Default::default(),
        }
    }

    pub fn one(spec: Spec) -> Self {
        let mut t = Self::zero(spec);
        t.comps.insert(MultiIndex::empty(), vec![1.0]);
        t
    }

    /// Element supported on length-1 words, from a flat coordinate vector.
    pub fn from_level1(spec: Spec, v: &[f64]) -> Result<Self> {
        if v.len() != spec.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.total_dim(),
                got: v.len(),
            });
        }
        let mut t = Self::zero(spec.clone());
        for block in 1..=spec.num_blocks() {
            let off = spec.block_offset(block);
            let d = spec.block_dim(block);
            let slice = &v[off..off + d];
            if slice.iter().any(|&x| x != 0.0) {
                t.comps
                    .insert(MultiIndex::new(vec![block]), slice.to_vec());
            }
        }
        Ok(t)
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn scalar(&self) -> f64 {
        self.comps
            .get(&MultiIndex::empty())
            .map_or(0.0, |a| a[0])
    }

    pub fn set_scalar(&mut self, v: f64) {
        if v == 0.0 {
            self.comps.remove(&MultiIndex::empty());
        } else {
            self.comps.insert(MultiIndex::empty(), vec![v]);
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&MultiIndex, &[f64])> {
        self.comps.iter().map(|(r, a)| (r, a.as_slice()))
    }

    pub fn component(&self, r: &MultiIndex) -> Option<&[f64]> {
        self.comps.get(r).map(Vec::as_slice)
    }

    fn component_capacity(&self, r: &MultiIndex) -> Result<usize> {
        if r.is_empty() {
            return Ok(1);
        }
        self.spec
            .component_size(r)
            .ok_or_else(|| Error::InvalidArgument(format!("{r} is not admissible")))
    }

    /// Overwrite one component; the array length must match the dense size.
    pub fn set_component(&mut self, r: MultiIndex, arr: Vec<f64>) -> Result<()> {
        let want = self.component_capacity(&r)?;
        if arr.len() != want {
            return Err(Error::DimensionMismatch {
                expected: want,
                got: arr.len(),
            });
        }
        if arr.iter().any(|&x| x != 0.0) {
            self.comps.insert(r, arr);
        } else {
            self.comps.remove(&r);
        }
        Ok(())
    }

    pub fn coeff(&self, w: &Word) -> f64 {
        let r = w.blocks();
        match self.comps.get(&r) {
            Some(arr) => arr[w.component_index(&self.spec)],
            None => 0.0,
        }
    }

    pub fn set_coeff(&mut self, w: &Word, v: f64) -> Result<()> {
        let r = w.blocks();
        let size = self.component_capacity(&r)?;
        let idx = w.component_index(&self.spec);
        let arr = self.comps.entry(r.clone()).or_insert_with(|| vec![0.0; size]);
        arr[idx] = v;
        if arr.iter().all(|&x| x == 0.0) {
            self.comps.remove(&r);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    fn check_spec(&self, other: &TensorElement) -> Result<()> {
        if Arc::ptr_eq(&self.spec, &other.spec) || self.spec == other.spec {
            Ok(())
        } else {
            Err(Error::SpecMismatch)
        }
    }

    pub fn add(&self, other: &TensorElement) -> Result<TensorElement> {
        self.check_spec(other)?;
        let mut out = self.clone();
        for (r, arr) in &other.comps {
            match out.comps.get_mut(r) {
                Some(dst) => {
                    for (d, s) in dst.iter_mut().zip(arr) {
                        *d += s;
                    }
                }
                None => {
                    out.comps.insert(r.clone(), arr.clone());
                }
            }
        }
        out.prune();
        Ok(out)
    }

    pub fn sub(&self, other: &TensorElement) -> Result<TensorElement> {
        self.add(&other.scaled(-1.0))
    }

    pub fn scaled(&self, f: f64) -> TensorElement {
        let mut out = self.clone();
        for arr in out.comps.values_mut() {
            for x in arr.iter_mut() {
                *x *= f;
            }
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.comps.retain(|_, arr| arr.iter().any(|&x| x != 0.0));
    }

    /// Truncated concatenation product. Output components are computed
    /// independently (possibly in parallel); within a component the splits
    /// are accumulated in ascending split-position order.
    pub fn mul(&self, other: &TensorElement) -> Result<TensorElement> {
        self.check_spec(other)?;
        let mut targets: BTreeSet<MultiIndex> = BTreeSet::new();
        for ra in self.comps.keys() {
            for rb in other.comps.keys() {
                let r = ra.concat(rb);
                if r.is_empty() || self.spec.is_admissible(&r) {
                    targets.insert(r);
                }
            }
        }
        let targets: Vec<MultiIndex> = targets.into_iter().collect();
        let arrays = par::map_slice(&targets, |r| self.mul_component(other, r));
        let mut out = TensorElement::zero(self.spec.clone());
        for (r, arr) in targets.into_iter().zip(arrays) {
            if arr.iter().any(|&x| x != 0.0) {
                out.comps.insert(r, arr);
            }
        }
        Ok(out)
    }

    fn mul_component(&self, other: &TensorElement, r: &MultiIndex) -> Vec<f64> {
        let size = if r.is_empty() {
            1
        } else {
            self.spec.component_size(r).unwrap()
        };
        let mut out = vec![0.0; size];
        for split in 0..=r.len() {
            let pre = MultiIndex::new(r.labels()[..split].to_vec());
            let suf = MultiIndex::new(r.labels()[split..].to_vec());
            let (Some(a), Some(b)) = (self.comps.get(&pre), other.comps.get(&suf)) else {
                continue;
            };
            let nb = b.len();
            for (i, &av) in a.iter().enumerate() {
                if av == 0.0 {
                    continue;
                }
                let base = i * nb;
                for (j, &bv) in b.iter().enumerate() {
                    out[base + j] += av * bv;
                }
            }
        }
        out
    }

    /// Exponential of a level-1 element, truncated by the grading.
    pub fn exp(v: &TensorElement) -> Result<TensorElement> {
        if v.comps.keys().any(|r| r.len() != 1) {
            return Err(Error::NotLevelOne);
        }
        let mut out = TensorElement::one(v.spec.clone());
        let mut term = TensorElement::one(v.spec.clone());
        for n in 1..=v.spec.max_len() {
            term = term.mul(v)?.scaled(1.0 / n as f64);
            if term.is_zero() {
                break;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Logarithm of an element with scalar slot exactly 1.
    pub fn log(&self) -> Result<TensorElement> {
        let s = self.scalar();
        if s != 1.0 {
            return Err(Error::NotGroupLike { scalar: s });
        }
        let mut u = self.clone();
        u.set_scalar(0.0);
        let mut power = u.clone();
        let mut out = u.clone();
        for n in 2..=self.spec.max_len() {
            power = power.mul(&u)?;
            if power.is_zero() {
                break;
            }
            let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
            out = out.add(&power.scaled(sign / n as f64))?;
        }
        Ok(out)
    }

    /// Keep exactly the component with block pattern `r`.
    pub fn project(&self, r: &MultiIndex) -> TensorElement {
        let mut out = TensorElement::zero(self.spec.clone());
        if let Some(arr) = self.comps.get(r) {
            out.comps.insert(r.clone(), arr.clone());
        }
        out
    }

    /// Scale the coefficient of every word by `eps^m` where `m` counts the
    /// word's letters lying in `blocks`. Powers come from one running
    /// product so equal counts scale identically.
    pub fn dilate(&self, blocks: &[usize], eps: f64) -> TensorElement {
        let mut pows = vec![1.0; self.spec.max_len() + 1];
        for m in 1..pows.len() {
            pows[m] = pows[m - 1] * eps;
        }
        let mut out = self.clone();
        for (r, arr) in out.comps.iter_mut() {
            let m = r.count_in(blocks);
            if m > 0 {
                for x in arr.iter_mut() {
                    *x *= pows[m];
                }
            }
        }
        out.prune();
        out
    }

    /// Euclidean norm of one component.
    pub fn pi_norm(&self, r: &MultiIndex) -> f64 {
        self.comps
            .get(r)
            .map_or(0.0, |arr| arr.iter().map(|x| x * x).sum::<f64>().sqrt())
    }

    /// Max over components of the Euclidean norm.
    pub fn max_component_norm(&self) -> f64 {
        self.comps
            .keys()
            .map(|r| self.pi_norm(r))
            .fold(0.0, f64::max)
    }

    /// Max over components of the Euclidean norm of the difference,
    /// the convergence metric of the sewing iterations.
    pub fn component_sup_distance(&self, other: &TensorElement) -> f64 {
        let mut d = 0.0f64;
        let keys: BTreeSet<&MultiIndex> = self.comps.keys().chain(other.comps.keys()).collect();
        for r in keys {
            let a = self.comps.get(r);
            let b = other.comps.get(r);
            let size = a.or(b).map_or(0, |v| v.len());
            let mut acc = 0.0;
            for i in 0..size {
                let x = a.map_or(0.0, |v| v[i]) - b.map_or(0.0, |v| v[i]);
                acc += x * x;
            }
            d = d.max(acc.sqrt());
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .values()
            .flat_map(|a| a.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Flat level-1 coordinate vector.
    pub fn level1_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.spec.total_dim()];
        for block in 1..=self.spec.num_blocks() {
            if let Some(arr) = self.comps.get(&MultiIndex::new(vec![block])) {
                let off = self.spec.block_offset(block);
                v[off..off + arr.len()].copy_from_slice(arr);
            }
        }
        v
    }

    /// Drop every component of degree strictly above `bound`.
    pub fn truncate_above(&self, bound: Rational64) -> TensorElement {
        let mut out = self.clone();
        out.comps
            .retain(|r, _| r.is_empty() || self.spec.deg_unchecked(r) <= bound);
        out
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Vec::new();
        for (r, arr) in &self.comps {
            for (idx, &v) in arr.iter().enumerate() {
                if v != 0.0 {
                    let w = Word::from_component(&self.spec, r, idx);
                    let word: Vec<Value> =
                        w.letters().iter().map(|l| json!([l.block, l.coord])).collect();
                    terms.push(json!({"word": word, "value": v}));
                }
            }
        }
        json!({
            "pi": self.spec.p().iter().map(|&r| Value::String(format_ratio(r))).collect::<Vec<_>>(),
            "dims": self.spec.dims(),
            "q": ratio_value(self.spec.q()),
            "terms": terms,
        })
    }

    pub fn from_json(v: &Value) -> Result<TensorElement> {
        let spec = spec_from_json(v)?;
        Self::terms_from_json(spec, v)
    }

    /// Read the `terms` array of `v` into an element over `spec`.
    pub fn terms_from_json(spec: Spec, v: &Value) -> Result<TensorElement> {
        let mut out = TensorElement::zero(spec);
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing terms array".into()))?;
        for t in terms {
            let word = t
                .get("word")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("term without word".into()))?;
            let value = t
                .get("value")
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Parse("term without numeric value".into()))?;
            let mut letters = Vec::with_capacity(word.len());
            for l in word {
                let pair = l
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| Error::Parse("letter must be [block, coord]".into()))?;
                let block = pair[0]
                    .as_u64()
                    .ok_or_else(|| Error::Parse("bad block".into()))? as usize;
                let coord = pair[1]
                    .as_u64()
                    .ok_or_else(|| Error::Parse("bad coord".into()))? as usize;
                if block == 0 || block > out.spec.num_blocks() {
                    return Err(Error::InvalidMultiIndex {
                        label: block,
                        blocks: out.spec.num_blocks(),
                    });
                }
                if coord == 0 || coord > out.spec.block_dim(block) {
                    return Err(Error::Parse(format!(
                        "coord {coord} outside block {block} of dimension {}",
                        out.spec.block_dim(block)
                    )));
                }
                letters.push(Letter { block, coord });
            }
            let w = Word(letters);
            out.set_coeff(&w, value)?;
        }
        Ok(out)
    }
}

/// Parse the `pi`/`dims`/`q` header fields of a tensor-style JSON object.
pub fn spec_from_json(v: &Value) -> Result<Spec> {
    let pi = v
        .get("pi")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing pi".into()))?
        .iter()
        .map(ratio_from_value)
        .collect::<Result<Vec<_>>>()?;
    let dims = v
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing dims".into()))?
        .iter()
        .map(|d| {
            d.as_u64()
                .map(|d| d as usize)
                .ok_or_else(|| Error::Parse("bad dims entry".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let q = ratio_from_value(
        v.get("q")
            .ok_or_else(|| Error::Parse("missing q".into()))?,
    )?;
    crate::grading::GradingSpec::new(pi, dims, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingSpec;
    use crate::ratio::parse_ratio;
    use proptest::prelude::*;

    fn spec(p: &[&str], dims: &[usize], q: &str) -> Spec {
        GradingSpec::new(
            p.iter().map(|s| parse_ratio(s).unwrap()).collect(),
            dims.to_vec(),
            parse_ratio(q).unwrap(),
        )
        .unwrap()
    }

    fn letter(block: usize, coord: usize) -> Letter {
        Letter { block, coord }
    }

    fn basis(s: &Spec, letters: &[(usize, usize)], v: f64) -> TensorElement {
        let mut t = TensorElement::zero(s.clone());
        t.set_coeff(
            &Word(letters.iter().map(|&(b, c)| letter(b, c)).collect()),
            v,
        )
        .unwrap();
        t
    }

    #[test]
    fn identity_is_exact() {
        let s = spec(&["2"], &[2], "1");
        let one = TensorElement::one(s.clone());
        let mut a = basis(&s, &[(1, 1)], 0.3);
        a.set_scalar(1.0);
        a.set_coeff(&Word(vec![letter(1, 1), letter(1, 2)]), -0.7)
            .unwrap();
        assert_eq!(one.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&one).unwrap(), a);
    }

    #[test]
    fn distributes_over_level_one() {
        // (1+x)(1+y) = 1 + x + y + xy when degree admits length 2
        let s = spec(&["2"], &[2], "1");
        let mut a = basis(&s, &[(1, 1)], 2.0);
        a.set_scalar(1.0);
        let mut b = basis(&s, &[(1, 2)], 3.0);
        b.set_scalar(1.0);
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.scalar(), 1.0);
        assert_eq!(prod.coeff(&Word(vec![letter(1, 1)])), 2.0);
        assert_eq!(prod.coeff(&Word(vec![letter(1, 2)])), 3.0);
        assert_eq!(prod.coeff(&Word(vec![letter(1, 1), letter(1, 2)])), 6.0);
        assert_eq!(prod.coeff(&Word(vec![letter(1, 2), letter(1, 1)])), 0.0);
    }

    #[test]
    fn exp_of_axis_pair() {
        // exp(e1) exp(e2) at degree two: coefficient 1 on (1,2), 0 on (2,1),
        // one half on the squares
        let s = spec(&["2"], &[2], "1");
        let e1 = TensorElement::from_level1(s.clone(), &[1.0, 0.0]).unwrap();
        let e2 = TensorElement::from_level1(s.clone(), &[0.0, 1.0]).unwrap();
        let prod = TensorElement::exp(&e1)
            .unwrap()
            .mul(&TensorElement::exp(&e2).unwrap())
            .unwrap();
        assert!((prod.coeff(&Word(vec![letter(1, 1), letter(1, 2)])) - 1.0).abs() < 1e-15);
        assert_eq!(prod.coeff(&Word(vec![letter(1, 2), letter(1, 1)])), 0.0);
        assert!((prod.coeff(&Word(vec![letter(1, 1), letter(1, 1)])) - 0.5).abs() < 1e-15);
        assert!((prod.coeff(&Word(vec![letter(1, 2), letter(1, 2)])) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn exp_edge_cases() {
        let s = spec(&["2"], &[1], "1");
        let zero = TensorElement::zero(s.clone());
        assert_eq!(TensorElement::exp(&zero).unwrap(), TensorElement::one(s.clone()));

        let c = 0.75;
        let v = TensorElement::from_level1(s.clone(), &[c]).unwrap();
        let e = TensorElement::exp(&v).unwrap();
        assert_eq!(e.scalar(), 1.0);
        assert_eq!(e.coeff(&Word(vec![letter(1, 1)])), c);
        assert_eq!(e.coeff(&Word(vec![letter(1, 1), letter(1, 1)])), c * c / 2.0);

        let mut bad = TensorElement::one(s.clone());
        bad.set_coeff(&Word(vec![letter(1, 1), letter(1, 1)]), 1.0)
            .unwrap();
        assert!(matches!(TensorElement::exp(&bad), Err(Error::NotLevelOne)));
    }

    #[test]
    fn log_inverts_exp() {
        let s = spec(&["3"], &[2], "1");
        let v = TensorElement::from_level1(s.clone(), &[0.4, -0.2]).unwrap();
        let g = TensorElement::exp(&v).unwrap();
        let l = g.log().unwrap();
        assert!(l.sub(&v).unwrap().max_abs() < 1e-14);
        assert!(matches!(
            TensorElement::zero(s).log(),
            Err(Error::NotGroupLike { .. })
        ));
    }

    #[test]
    fn projection_examples() {
        let s = spec(&["1", "2"], &[1, 1], "1");
        let mut a = TensorElement::one(s.clone());
        a.set_coeff(&Word(vec![letter(1, 1)]), 2.0).unwrap();
        a.set_coeff(&Word(vec![letter(2, 1)]), 3.0).unwrap();
        let p = a.project(&MultiIndex::new(vec![1]));
        assert_eq!(p.coeff(&Word(vec![letter(1, 1)])), 2.0);
        assert_eq!(p.coeff(&Word(vec![letter(2, 1)])), 0.0);
        assert_eq!(p.scalar(), 0.0);
        // idempotence
        assert_eq!(p.project(&MultiIndex::new(vec![1])), p);
    }

    #[test]
    fn projections_resolve_identity() {
        let s = spec(&["1", "2"], &[2, 1], "2");
        let mut a = TensorElement::one(s.clone());
        a.set_coeff(&Word(vec![letter(1, 2)]), -1.25).unwrap();
        a.set_coeff(&Word(vec![letter(2, 1), letter(2, 1)]), 0.5)
            .unwrap();
        a.set_coeff(&Word(vec![letter(1, 1), letter(2, 1)]), 2.0)
            .unwrap();
        let mut sum = TensorElement::zero(s.clone());
        sum.set_scalar(a.scalar());
        for r in s.admissible() {
            sum = sum.add(&a.project(r)).unwrap();
        }
        assert_eq!(sum, a);
    }

    #[test]
    fn dilate_examples() {
        let s = spec(&["1", "2"], &[1, 1], "3/2");
        let v = TensorElement::from_level1(s.clone(), &[0.7, -1.3]).unwrap();
        let g = TensorElement::exp(&v).unwrap();
        assert_eq!(g.dilate(&[2], 1.0), g);
        let killed = g.dilate(&[2], 0.0);
        for (r, _) in killed.components() {
            assert_eq!(r.count_of(2), 0);
        }
        // group-like: dilating the exponential = exponential of the dilated
        let eps = 0.37;
        let lhs = g.dilate(&[2], eps);
        let rhs = TensorElement::exp(&v.dilate(&[2], eps)).unwrap();
        assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn pi_norm_examples() {
        let s = spec(&["2"], &[2], "1");
        let z = TensorElement::zero(s.clone());
        assert_eq!(z.pi_norm(&MultiIndex::new(vec![1])), 0.0);
        let a = basis(&s, &[(1, 2)], -2.5);
        assert_eq!(a.pi_norm(&MultiIndex::new(vec![1])), 2.5);
    }

    #[test]
    fn shuffle_identity_for_exponentials() {
        let s = spec(&["2"], &[2], "3/2");
        let v = TensorElement::from_level1(s.clone(), &[0.8, -0.45]).unwrap();
        let g = TensorElement::exp(&v).unwrap();
        for u in [
            Word(vec![letter(1, 1)]),
            Word(vec![letter(1, 2)]),
            Word(vec![letter(1, 1), letter(1, 2)]),
        ] {
            for w in [Word(vec![letter(1, 1)]), Word(vec![letter(1, 2)])] {
                let combined = u.blocks().concat(&w.blocks());
                if !s.is_admissible(&combined) {
                    continue;
                }
                let lhs = g.coeff(&u) * g.coeff(&w);
                let rhs: f64 = shuffle_words(&u, &w).iter().map(|x| g.coeff(x)).sum();
                assert!((lhs - rhs).abs() < 1e-10, "{u:?} {w:?}");
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let s = spec(&["1", "3/2"], &[1, 2], "2");
        let mut a = TensorElement::one(s.clone());
        a.set_coeff(&Word(vec![letter(2, 2)]), 0.125).unwrap();
        a.set_coeff(&Word(vec![letter(1, 1), letter(2, 1)]), -3.5)
            .unwrap();
        let v = a.to_json();
        let b = TensorElement::from_json(&v).unwrap();
        assert_eq!(a, b);
        // numeric pi / q also accepted
        let w: Value = serde_json::from_str(
            r#"{"pi":[1, 1.5], "dims":[1,2], "q":2, "terms":[{"word":[[2,2]],"value":0.125}]}"#,
        )
        .unwrap();
        let c = TensorElement::from_json(&w).unwrap();
        assert_eq!(c.coeff(&Word(vec![letter(2, 2)])), 0.125);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn mul_associates_to_float_precision(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let s = spec(&["2", "1"], &[2, 1], "3/2");
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_el = || {
                let mut t = TensorElement::one(s.clone());
                for r in s.admissible() {
                    let size = s.component_size(r).unwrap();
                    let arr: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    t.set_component(r.clone(), arr).unwrap();
                }
                t
            };
            let (a, b, c) = (rand_el(), rand_el(), rand_el());
            let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
            let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-12);
        }

        #[test]
        fn dilate_is_multiplicative(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let s = spec(&["1", "2"], &[1, 1], "2");
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rand_el = || {
                let mut t = TensorElement::one(s.clone());
                for r in s.admissible() {
                    let size = s.component_size(r).unwrap();
                    let arr: Vec<f64> = (0..size).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    t.set_component(r.clone(), arr).unwrap();
                }
                t
            };
            let (a, b) = (rand_el(), rand_el());
            // power-of-two dilation scales exactly, so equality is bitwise
            let lhs = a.mul(&b).unwrap().dilate(&[2], 0.5);
            let rhs = a.dilate(&[2], 0.5).mul(&b.dilate(&[2], 0.5)).unwrap();
            prop_assert_eq!(&lhs, &rhs);
            // generic dilation agrees to machine precision
            let eps = rng.gen_range(0.1..1.9);
            let lhs = a.mul(&b).unwrap().dilate(&[2], eps);
            let rhs = a.dilate(&[2], eps).mul(&b.dilate(&[2], eps)).unwrap();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-13 * (1.0 + lhs.max_abs()));
        }

        #[test]
        fn cross_norm_inequality(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let s = spec(&["2"], &[2], "1");
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let a = basis(&s, &[(1, 1)], rng.gen_range(-2.0..2.0))
                .add(&basis(&s, &[(1, 2)], rng.gen_range(-2.0..2.0)))
                .unwrap();
            let b = basis(&s, &[(1, 1)], rng.gen_range(-2.0..2.0))
                .add(&basis(&s, &[(1, 2)], rng.gen_range(-2.0..2.0)))
                .unwrap();
            let prod = a.mul(&b).unwrap();
            let r1 = MultiIndex::new(vec![1]);
            let rr = MultiIndex::new(vec![1, 1]);
            prop_assert!(prod.pi_norm(&rr) <= a.pi_norm(&r1) * b.pi_norm(&r1) + 1e-12);
        }
    }
}
