//! Sampled paths, their signatures on grids, variation functionals and
//! control functions.
//!
//! A grid rough path stores one group-like increment per grid interval;
//! increments over longer spans are ordered products, so the algebraic
//! consistency relation across grid points holds by construction. Off-grid
//! evaluation splits an interval increment geodesically (fractional power
//! through the tensor logarithm), which for lifts of piecewise-linear paths
//! is linear reparametrization.

use std::collections::HashMap;
use std::io::{Read, Write as IoWrite};
use std::sync::{Mutex, OnceLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grading::{MultiIndex, Spec};
use crate::par;
use crate::ratio::ratio_to_f64;
use crate::tensor::{spec_from_json, TensorElement, Word};

/// A path sampled on a strictly increasing time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl SampledPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidArgument(
                "a path needs at least two samples".into(),
            ));
        }
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(Error::NonIncreasingTimes { index: i });
            }
        }
        let dim = values[0].len();
        if dim == 0 || values.iter().any(|v| v.len() != dim) {
            return Err(Error::InvalidArgument(
                "inconsistent sample dimensions".into(),
            ));
        }
        Ok(SampledPath { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Piecewise-linear value at `t` (clamped to the time span).
    pub fn value_at(&self, t: f64) -> Vec<f64> {
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= *self.times.last().unwrap() {
            return self.values.last().unwrap().clone();
        }
        let i = match self.times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return self.values[i].clone(),
            Err(i) => i - 1,
        };
        let lam = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
        self.values[i]
            .iter()
            .zip(&self.values[i + 1])
            .map(|(a, b)| a + lam * (b - a))
            .collect()
    }

    /// Insert `k - 1` equispaced samples in every interval.
    pub fn refine_uniform(&self, k: usize) -> SampledPath {
        assert!(k >= 1);
        let mut times = Vec::new();
        let mut values = Vec::new();
        for i in 0..self.times.len() - 1 {
            for m in 0..k {
                let lam = m as f64 / k as f64;
                let t = self.times[i] + lam * (self.times[i + 1] - self.times[i]);
                times.push(t);
                values.push(
                    self.values[i]
                        .iter()
                        .zip(&self.values[i + 1])
                        .map(|(a, b)| a + lam * (b - a))
                        .collect(),
                );
            }
        }
        times.push(*self.times.last().unwrap());
        values.push(self.values.last().unwrap().clone());
        SampledPath { times, values }
    }

    /// Read `t,x1,...,xD` rows.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = rdr
                .headers()
                .map_err(|e| Error::Parse(format!("csv header: {e}")))?;
            if headers.iter().next() != Some("t") {
                return Err(Error::Parse("first csv column must be t".into()));
            }
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::Parse(format!("csv row: {e}")))?;
            let mut fields = rec.iter();
            let t: f64 = fields
                .next()
                .ok_or_else(|| Error::Parse("empty csv row".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad time: {e}")))?;
            let row: Vec<f64> = fields
                .map(|f| {
                    f.parse()
                        .map_err(|e| Error::Parse(format!("bad value: {e}")))
                })
                .collect::<Result<_>>()?;
            times.push(t);
            values.push(row);
        }
        SampledPath::new(times, values)
    }

    pub fn to_csv<W: IoWrite>(&self, mut writer: W) -> Result<()> {
        write!(writer, "t")?;
        for i in 1..=self.dim() {
            write!(writer, ",x{i}")?;
        }
        writeln!(writer)?;
        for (t, row) in self.times.iter().zip(&self.values) {
            write!(writer, "{t:.17e}")?;
            for v in row {
                write!(writer, ",{v:.17e}")?;
            }
            writeln!(writer)?;
        }
        Ok(())
    }
}

/// Signature of the linear segment from `from` to `to`: the coefficient of
/// a length-`l` word is the product of displacement coordinates over `l!`.
pub fn segment_signature(from: &[f64], to: &[f64], spec: &Spec) -> Result<TensorElement> {
    let d = spec.total_dim();
    if from.len() != d || to.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if from.len() != d { from.len() } else { to.len() },
        });
    }
    let v: Vec<f64> = from.iter().zip(to).map(|(a, b)| b - a).collect();
    let mut out = TensorElement::one(spec.clone());
    let mut factorial = 1.0;
    let mut last_len = 0usize;
    for r in spec.admissible() {
        if r.len() != last_len {
            last_len = r.len();
            factorial = (1..=last_len).map(|n| n as f64).product();
        }
        let size = spec.component_size(r).unwrap();
        let mut arr = vec![0.0; size];
        let mut any = false;
        for (idx, slot) in arr.iter_mut().enumerate() {
            let w = Word::from_component(spec, r, idx);
            let mut prod = 1.0;
            for l in w.letters() {
                prod *= v[spec.flat_coord(l.block, l.coord)];
            }
            let c = prod / factorial;
            if c != 0.0 {
                any = true;
            }
            *slot = c;
        }
        if any {
            out.set_component(r.clone(), arr)?;
        }
    }
    Ok(out)
}

/// A two-parameter multiplicative functional stored as per-interval
/// group-like increments on a grid.
#[derive(Debug)]
pub struct GridRoughPath {
    spec: Spec,
    times: Vec<f64>,
    increments: Vec<TensorElement>,
    basepoint: Vec<f64>,
    /// Path values at grid points: basepoint plus level-1 partial sums.
    values: Vec<Vec<f64>>,
    logs: OnceLock<Vec<TensorElement>>,
    /// Fractional powers of interval increments, keyed by (interval,
    /// fraction bits). The sewing ladders ask for the same fraction across
    /// every piece of a refinement level.
    frac_cache: Mutex<HashMap<(usize, u64), TensorElement>>,
}

impl Clone for GridRoughPath {
    fn clone(&self) -> Self {
        GridRoughPath {
            spec: self.spec.clone(),
            times: self.times.clone(),
            increments: self.increments.clone(),
            basepoint: self.basepoint.clone(),
            values: self.values.clone(),
            logs: OnceLock::new(),
            frac_cache: Mutex::new(HashMap::new()),
        }
    }
}

impl GridRoughPath {
    pub fn new(
        spec: Spec,
        times: Vec<f64>,
        increments: Vec<TensorElement>,
        basepoint: Vec<f64>,
    ) -> Result<Self> {
        if times.len() < 2 || increments.len() + 1 != times.len() {
            return Err(Error::InvalidArgument(format!(
                "{} times with {} increments",
                times.len(),
                increments.len()
            )));
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(Error::NonIncreasingTimes { index: i });
            }
        }
        if basepoint.len() != spec.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.total_dim(),
                got: basepoint.len(),
            });
        }
        for inc in &increments {
            if !std::sync::Arc::ptr_eq(inc.spec(), &spec) && inc.spec() != &spec {
                return Err(Error::SpecMismatch);
            }
            if inc.scalar() != 1.0 {
                return Err(Error::NotGroupLike {
                    scalar: inc.scalar(),
                });
            }
        }
        let mut values = vec![basepoint.clone()];
        for inc in &increments {
            let prev = values.last().unwrap();
            let lvl = inc.level1_vector();
            values.push(prev.iter().zip(&lvl).map(|(a, b)| a + b).collect());
        }
        Ok(GridRoughPath {
            spec,
            times,
            increments,
            basepoint,
            values,
            logs: OnceLock::new(),
            frac_cache: Mutex::new(HashMap::new()),
        })
    }

    /// Lift a sampled path: one segment signature per interval.
    pub fn lift(path: &SampledPath, spec: &Spec) -> Result<Self> {
        if path.dim() != spec.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.total_dim(),
                got: path.dim(),
            });
        }
        let increments = par::map_range(path.len() - 1, |i| {
            segment_signature(&path.values()[i], &path.values()[i + 1], spec)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        GridRoughPath::new(
            spec.clone(),
            path.times().to_vec(),
            increments,
            path.values()[0].clone(),
        )
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn num_intervals(&self) -> usize {
        self.increments.len()
    }

    pub fn increment(&self, i: usize) -> &TensorElement {
        &self.increments[i]
    }

    pub fn increments(&self) -> &[TensorElement] {
        &self.increments
    }

    pub fn basepoint(&self) -> &[f64] {
        &self.basepoint
    }

    pub fn value_at_index(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Piecewise-linear value at arbitrary `t` within the span.
    pub fn value_at_time(&self, t: f64) -> Vec<f64> {
        if t <= self.times[0] {
            return self.values[0].clone();
        }
        if t >= *self.times.last().unwrap() {
            return self.values.last().unwrap().clone();
        }
        match self
            .times
            .binary_search_by(|x| x.partial_cmp(&t).unwrap())
        {
            Ok(i) => self.values[i].clone(),
            Err(i) => {
                let i = i - 1;
                let lam = (t - self.times[i]) / (self.times[i + 1] - self.times[i]);
                self.values[i]
                    .iter()
                    .zip(&self.values[i + 1])
                    .map(|(a, b)| a + lam * (b - a))
                    .collect()
            }
        }
    }

    pub fn index_of(&self, t: f64) -> Result<usize> {
        self.times
            .iter()
            .position(|&x| x == t)
            .ok_or(Error::OffGrid { time: t })
    }

    /// Increment over `[s, t]` for grid points `s <= t`: the left-to-right
    /// product of the interval increments.
    pub fn chen_eval(&self, s: f64, t: f64) -> Result<TensorElement> {
        let i = self.index_of(s)?;
        let j = self.index_of(t)?;
        if i > j {
            return Err(Error::InvalidArgument(format!("{s} > {t}")));
        }
        let mut out = TensorElement::one(self.spec.clone());
        for m in i..j {
            out = out.mul(&self.increments[m])?;
        }
        Ok(out)
    }

    /// All grid-pair increments, each row folded left-to-right.
    pub fn pair_table(&self) -> PairTable {
        let n = self.times.len();
        let rows = par::map_range(n - 1, |i| {
            let mut row = Vec::with_capacity(n - 1 - i);
            let mut cur = self.increments[i].clone();
            row.push(cur.clone());
            for j in i + 1..n - 1 {
                cur = cur.mul(&self.increments[j]).expect("same spec");
                row.push(cur.clone());
            }
            row
        });
        PairTable {
            spec: self.spec.clone(),
            rows,
        }
    }

    fn log_table(&self) -> Result<&[TensorElement]> {
        if self.logs.get().is_none() {
            let logs = self
                .increments
                .iter()
                .map(TensorElement::log)
                .collect::<Result<Vec<_>>>()?;
            let _ = self.logs.set(logs);
        }
        Ok(self.logs.get().unwrap().as_slice())
    }

    /// Geodesic fraction of interval `i` between absolute times `a <= b`.
    fn fractional_increment(&self, i: usize, a: f64, b: f64) -> Result<TensorElement> {
        if a == self.times[i] && b == self.times[i + 1] {
            return Ok(self.increments[i].clone());
        }
        if a == b {
            return Ok(TensorElement::one(self.spec.clone()));
        }
        let lam = (b - a) / (self.times[i + 1] - self.times[i]);
        let key = (i, lam.to_bits());
        if let Some(hit) = self.frac_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let logs = self.log_table()?;
        let out = exp_general(&logs[i].scaled(lam))?;
        self.frac_cache
            .lock()
            .unwrap()
            .insert(key, out.clone());
        Ok(out)
    }

    /// Increment over arbitrary `t0 <= u <= v <= tN`, splitting interval
    /// increments geodesically where `u` or `v` falls inside an interval.
    pub fn interp_eval(&self, u: f64, v: f64) -> Result<TensorElement> {
        let t0 = self.times[0];
        let tn = *self.times.last().unwrap();
        if !(t0 <= u && u <= v && v <= tn) {
            return Err(Error::InvalidArgument(format!(
                "[{u}, {v}] outside [{t0}, {tn}]"
            )));
        }
        if u == v {
            return Ok(TensorElement::one(self.spec.clone()));
        }
        let mut idx = match self
            .times
            .binary_search_by(|x| x.partial_cmp(&u).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        if idx == self.times.len() - 1 {
            idx -= 1;
        }
        let mut out: Option<TensorElement> = None;
        let mut pos = u;
        while pos < v {
            let end = self.times[idx + 1].min(v);
            let piece = self.fractional_increment(idx, pos, end)?;
            out = Some(match out {
                None => piece,
                Some(acc) => acc.mul(&piece)?,
            });
            pos = end;
            idx += 1;
        }
        Ok(out.unwrap_or_else(|| TensorElement::one(self.spec.clone())))
    }

    /// New grid containing `extra` as additional points, interval
    /// increments split geodesically.
    pub fn refine_insert(&self, extra: &[f64]) -> Result<GridRoughPath> {
        let t0 = self.times[0];
        let tn = *self.times.last().unwrap();
        let mut times = self.times.clone();
        for &t in extra {
            if !(t0 <= t && t <= tn) {
                return Err(Error::InvalidArgument(format!(
                    "refinement point {t} outside [{t0}, {tn}]"
                )));
            }
            if !times.contains(&t) {
                times.push(t);
            }
        }
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let increments = (0..times.len() - 1)
            .map(|m| self.interp_eval(times[m], times[m + 1]))
            .collect::<Result<Vec<_>>>()?;
        GridRoughPath::new(self.spec.clone(), times, increments, self.basepoint.clone())
    }

    /// Split every interval into `k` equal parts.
    pub fn refine_uniform(&self, k: usize) -> Result<GridRoughPath> {
        let mut extra = Vec::new();
        for i in 0..self.times.len() - 1 {
            for m in 1..k {
                extra.push(
                    self.times[i] + (m as f64 / k as f64) * (self.times[i + 1] - self.times[i]),
                );
            }
        }
        self.refine_insert(&extra)
    }

    /// Replace every interval increment through `f` (keeps grid and base).
    pub fn map_increments(
        &self,
        f: impl Fn(usize, &TensorElement) -> Result<TensorElement> + Sync,
    ) -> Result<GridRoughPath> {
        let incs = par::map_range(self.increments.len(), |i| f(i, &self.increments[i]))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        GridRoughPath::new(
            self.spec.clone(),
            self.times.clone(),
            incs,
            self.basepoint.clone(),
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "pi": self.spec.p().iter().map(|&r| Value::String(crate::ratio::format_ratio(r))).collect::<Vec<_>>(),
            "dims": self.spec.dims(),
            "q": crate::json::ratio_value(self.spec.q()),
            "times": self.times,
            "basepoint": self.basepoint,
            "increments": self.increments.iter().map(TensorElement::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<GridRoughPath> {
        let spec = spec_from_json(v)?;
        let times = v
            .get("times")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing times".into()))?
            .iter()
            .map(|t| t.as_f64().ok_or_else(|| Error::Parse("bad time".into())))
            .collect::<Result<Vec<_>>>()?;
        let basepoint = match v.get("basepoint") {
            Some(b) => b
                .as_array()
                .ok_or_else(|| Error::Parse("bad basepoint".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Parse("bad basepoint".into())))
                .collect::<Result<Vec<_>>>()?,
            None => vec![0.0; spec.total_dim()],
        };
        let increments = v
            .get("increments")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing increments".into()))?
            .iter()
            .map(|inc| TensorElement::terms_from_json(spec.clone(), inc))
            .collect::<Result<Vec<_>>>()?;
        GridRoughPath::new(spec, times, increments, basepoint)
    }
}

/// Exponential of an arbitrary element with zero scalar slot (series over
/// word lengths; terminates by truncation).
pub(crate) fn exp_general(a: &TensorElement) -> Result<TensorElement> {
    if a.scalar() != 0.0 {
        return Err(Error::InvalidArgument(
            "exponential input must have zero scalar slot".into(),
        ));
    }
    let spec = a.spec().clone();
    let mut out = TensorElement::one(spec.clone());
    let mut term = TensorElement::one(spec.clone());
    for n in 1..=spec.max_len() {
        term = term.mul(a)?.scaled(1.0 / n as f64);
        if term.is_zero() {
            break;
        }
        out = out.add(&term)?;
    }
    Ok(out)
}

/// Dense table of all grid-pair increments.
pub struct PairTable {
    spec: Spec,
    rows: Vec<Vec<TensorElement>>,
}

impl PairTable {
    /// Increment from grid index `i` to `j`.
    pub fn get(&self, i: usize, j: usize) -> TensorElement {
        if i == j {
            TensorElement::one(self.spec.clone())
        } else {
            self.rows[i][j - i - 1].clone()
        }
    }

    pub fn get_ref(&self, i: usize, j: usize) -> Option<&TensorElement> {
        (i < j).then(|| &self.rows[i][j - i - 1])
    }

    pub fn num_points(&self) -> usize {
        self.rows.len() + 1
    }
}

/// A super-additive control on grid pairs: either a linear rate or a dense
/// table built from variation functionals.
#[derive(Clone, Debug)]
pub enum ControlFunction {
    Linear { rate: f64 },
    Grid { times: Vec<f64>, table: Vec<f64> },
}

impl ControlFunction {
    pub fn linear(rate: f64) -> Self {
        ControlFunction::Linear { rate }
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            ControlFunction::Linear { rate } => (rate * (t - s)).max(0.0),
            ControlFunction::Grid { times, table } => {
                let n = times.len();
                let lookup = |i: usize, j: usize| table[i * n + j];
                let (i, fi) = locate(times, s);
                let (j, fj) = locate(times, t);
                // bilinear between the four bracketing grid pairs
                let v00 = lookup(i, j);
                let v01 = lookup(i, (j + 1).min(n - 1));
                let v10 = lookup((i + 1).min(n - 1), j);
                let v11 = lookup((i + 1).min(n - 1), (j + 1).min(n - 1));
                let a = v00 + fj * (v01 - v00);
                let b = v10 + fj * (v11 - v10);
                (a + fi * (b - a)).max(0.0)
            }
        }
    }

    /// Pointwise multiple `c * omega` (preserves super-additivity for c >= 0).
    pub fn scaled(&self, c: f64) -> ControlFunction {
        match self {
            ControlFunction::Linear { rate } => ControlFunction::Linear { rate: c * rate },
            ControlFunction::Grid { times, table } => ControlFunction::Grid {
                times: times.clone(),
                table: table.iter().map(|v| c * v).collect(),
            },
        }
    }
}

fn locate(times: &[f64], t: f64) -> (usize, f64) {
    if t <= times[0] {
        return (0, 0.0);
    }
    if t >= *times.last().unwrap() {
        return (times.len() - 1, 0.0);
    }
    match times.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
        Ok(i) => (i, 0.0),
        Err(i) => {
            let i = i - 1;
            (i, (t - times[i]) / (times[i + 1] - times[i]))
        }
    }
}

/// Per-component variation over grid partitions of `[start, end]`:
/// dynamic program maximizing the sum of `norm^(1/deg)`, reported raised to
/// `deg`.
fn variation_dp(
    diff_norm: &dyn Fn(usize, usize) -> f64,
    start: usize,
    end: usize,
    deg: f64,
) -> f64 {
    let e = 1.0 / deg;
    let mut best = vec![0.0f64; end - start + 1];
    for j in 1..=end - start {
        let mut b = f64::NEG_INFINITY;
        for i in 0..j {
            b = b.max(best[i] + diff_norm(start + i, start + j).powf(e));
        }
        best[j] = b;
    }
    best[end - start].powf(deg)
}

/// Variation distance over a common grid: max over base components of the
/// partition-maximized increment-difference sums.
pub fn pi_variation_distance(x: &GridRoughPath, y: &GridRoughPath) -> Result<f64> {
    if x.spec() != y.spec() {
        return Err(Error::SpecMismatch);
    }
    if x.times() != y.times() {
        return Err(Error::IncompatibleGrids);
    }
    let tx = x.pair_table();
    let ty = y.pair_table();
    let comps = x.spec().multi_indices(num::rational::Rational64::one());
    let n = x.times().len();
    let values = par::map_slice(&comps, |r| {
        let deg = ratio_to_f64(x.spec().deg_unchecked(r));
        let diff = |i: usize, j: usize| -> f64 {
            match (tx.get_ref(i, j), ty.get_ref(i, j)) {
                (Some(a), Some(b)) => a
                    .component(r)
                    .unwrap_or(&[])
                    .iter()
                    .chain(std::iter::repeat(&0.0))
                    .zip(b.component(r).unwrap_or(&[]).iter().chain(std::iter::repeat(&0.0)))
                    .take(x.spec().component_size(r).unwrap())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt(),
                _ => 0.0,
            }
        };
        variation_dp(&diff, 0, n - 1, deg)
    });
    Ok(values.into_iter().fold(0.0, f64::max))
}

use num::One;

/// Control built from a path: the sum over base components of their grid
/// variation sums `sup sum norm^(1/deg)`, restricted to each subinterval.
/// Each summand is super-additive (partitions concatenate and the sums are
/// taken before any outer power), hence so is the sum.
pub fn control_from_path(x: &GridRoughPath) -> ControlFunction {
    let table = control_table(x, &x.spec().multi_indices(num::rational::Rational64::one()));
    ControlFunction::Grid {
        times: x.times().to_vec(),
        table,
    }
}

fn control_table(x: &GridRoughPath, comps: &[MultiIndex]) -> Vec<f64> {
    let tx = x.pair_table();
    let n = x.times().len();
    let partials = par::map_slice(comps, |r| {
        let deg = ratio_to_f64(x.spec().deg_unchecked(r));
        let norm = |i: usize, j: usize| tx.get_ref(i, j).map_or(0.0, |el| el.pi_norm(r));
        let mut table = vec![0.0; n * n];
        for start in 0..n - 1 {
            // one DP per start index fills the whole row
            let e = 1.0 / deg;
            let mut best = vec![0.0f64; n - start];
            for j in 1..n - start {
                let mut b = f64::NEG_INFINITY;
                for i in 0..j {
                    b = b.max(best[i] + norm(start + i, start + j).powf(e));
                }
                best[j] = b;
                table[start * n + (start + j)] = best[j];
            }
        }
        table
    });
    let mut table = vec![0.0; n * n];
    for part in partials {
        for (dst, src) in table.iter_mut().zip(part) {
            *dst += src;
        }
    }
    table
}

/// Ratio report for the factorial-weighted variation bound.
#[derive(Clone, Debug)]
pub struct VariationCertificate {
    pub pass: bool,
    pub worst_ratio: f64,
    pub worst_component: MultiIndex,
    pub worst_pair: (f64, f64),
    /// Grid pairs where the control vanishes but the increment does not.
    pub violations: usize,
}

/// Check `norm(increment component) * beta^k * gamma_weight <= omega^deg`
/// for every admissible component and grid pair.
pub fn check_finite_pi_variation(
    x: &GridRoughPath,
    omega: &ControlFunction,
    beta: f64,
) -> VariationCertificate {
    let tx = x.pair_table();
    let spec = x.spec();
    let k = spec.num_blocks() as i32;
    let n = x.times().len();
    let comps: Vec<&MultiIndex> = spec.admissible().iter().collect();
    let per = par::map_slice(&comps, |&r| {
        let deg = ratio_to_f64(spec.deg_unchecked(r));
        let weight = spec.gamma_weight(r).expect("admissible labels") * beta.powi(k);
        let mut worst = 0.0f64;
        let mut worst_pair = (x.times()[0], x.times()[0]);
        let mut violations = 0usize;
        for i in 0..n - 1 {
            for j in i + 1..n {
                let norm = tx.get_ref(i, j).map_or(0.0, |el| el.pi_norm(r));
                if norm == 0.0 {
                    continue;
                }
                let w = omega.eval(x.times()[i], x.times()[j]);
                let ratio = if w > 0.0 {
                    norm * weight / w.powf(deg)
                } else {
                    violations += 1;
                    f64::INFINITY
                };
                if ratio > worst {
                    worst = ratio;
                    worst_pair = (x.times()[i], x.times()[j]);
                }
            }
        }
        (worst, worst_pair, violations)
    });
    let mut cert = VariationCertificate {
        pass: true,
        worst_ratio: 0.0,
        worst_component: MultiIndex::empty(),
        worst_pair: (x.times()[0], x.times()[0]),
        violations: 0,
    };
    for (r, (worst, pair, violations)) in comps.iter().zip(per) {
        cert.violations += violations;
        if worst > cert.worst_ratio {
            cert.worst_ratio = worst;
            cert.worst_component = (*r).clone();
            cert.worst_pair = pair;
        }
    }
    cert.pass = cert.worst_ratio <= 1.0 && cert.violations == 0;
    cert
}
