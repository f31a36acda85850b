//! Sewing almost-multiplicative functionals and extending signatures.
//!
//! An almost functional evaluates on time pairs with a multiplicativity
//! defect of order `omega^theta`, `theta > 1`. Per grid interval the sewing
//! iteration takes ordered products over refining partitions; the raw level
//! products converge geometrically with ratio `arity^(1-theta)` per level,
//! which is far too slow near `theta = 1`, so the limit is taken by
//! Richardson extrapolation of the level sequence using the observed ratio.
//! Two series are logged per interval: the distance between successive
//! level products, and the worst single-piece defect seen at each level
//! (which decays with the faster ratio `arity^(-theta)`).

use num::rational::Rational64;
use num::One;

use crate::error::{Error, Result};
use crate::grading::{GradingSpec, MultiIndex, Spec};
use crate::par;
use crate::path::{control_from_path, ControlFunction, GridRoughPath};
use crate::ratio::ratio_to_f64;
use crate::tensor::TensorElement;

type Evaluator = Box<dyn Fn(f64, f64) -> Result<TensorElement> + Sync + Send>;

/// A two-parameter functional with small multiplicativity defect. The
/// evaluator must accept any pair inside the time span (sewing refines
/// below the grid).
pub struct AlmostFunctional {
    spec: Spec,
    times: Vec<f64>,
    basepoint: Vec<f64>,
    theta: f64,
    omega: ControlFunction,
    eval: Evaluator,
}

impl AlmostFunctional {
    pub fn new(
        spec: Spec,
        times: Vec<f64>,
        basepoint: Vec<f64>,
        theta: f64,
        omega: ControlFunction,
        eval: Evaluator,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::InvalidArgument("need at least two times".into()));
        }
        for i in 1..times.len() {
            if !(times[i] > times[i - 1]) {
                return Err(Error::NonIncreasingTimes { index: i });
            }
        }
        Ok(AlmostFunctional {
            spec,
            times,
            basepoint,
            theta,
            omega,
            eval,
        })
    }

    /// Wrap a grid path (exactly multiplicative, defect zero).
    pub fn from_grid_path(x: &GridRoughPath, theta: f64, omega: ControlFunction) -> Self {
        let owned = x.clone();
        AlmostFunctional {
            spec: x.spec().clone(),
            times: x.times().to_vec(),
            basepoint: x.basepoint().to_vec(),
            theta,
            omega,
            eval: Box::new(move |u, v| owned.interp_eval(u, v)),
        }
    }

    pub fn eval(&self, s: f64, t: f64) -> Result<TensorElement> {
        (self.eval)(s, t)
    }

    pub fn spec(&self) -> &Spec {
        &self.spec
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn omega(&self) -> &ControlFunction {
        &self.omega
    }
}

/// Worst multiplicativity defect over grid triples.
#[derive(Clone, Debug)]
pub struct DefectReport {
    pub max_ratio: f64,
    pub max_defect: f64,
    pub worst_triple: (f64, f64, f64),
    pub worst_component: MultiIndex,
    pub finite: bool,
}

/// Scan all grid triples `s < u < t` and all components for the largest
/// `norm(Y(s,u) Y(u,t) - Y(s,t)) / omega(s,t)^theta`.
pub fn multiplicativity_defect(y: &AlmostFunctional) -> Result<DefectReport> {
    let times = y.times();
    let n = times.len();
    if n < 3 {
        return Err(Error::InvalidArgument(
            "defect scan needs at least three grid points".into(),
        ));
    }
    let pair: Vec<Vec<TensorElement>> = times
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            times[i + 1..]
                .iter()
                .map(|&t| y.eval(s, t))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let lookup = |i: usize, j: usize| &pair[i][j - i - 1];

    let rows = par::map_range(n - 2, |i| {
        let mut worst = DefectReport {
            max_ratio: 0.0,
            max_defect: 0.0,
            worst_triple: (times[0], times[0], times[0]),
            worst_component: MultiIndex::empty(),
            finite: true,
        };
        for u in i + 1..n - 1 {
            for t in u + 1..n {
                let prod = lookup(i, u).mul(lookup(u, t)).expect("same spec");
                let diff = prod.sub(lookup(i, t)).expect("same spec");
                let mut defect = 0.0f64;
                let mut comp = MultiIndex::empty();
                for (r, _) in diff.components() {
                    let norm = diff.pi_norm(r);
                    if norm > defect {
                        defect = norm;
                        comp = r.clone();
                    }
                }
                if defect == 0.0 {
                    continue;
                }
                let w = y.omega().eval(times[i], times[t]);
                let ratio = if w > 0.0 {
                    defect / w.powf(y.theta())
                } else {
                    worst.finite = false;
                    f64::INFINITY
                };
                if ratio > worst.max_ratio || (ratio == worst.max_ratio && defect > worst.max_defect)
                {
                    worst.max_ratio = ratio;
                    worst.max_defect = defect;
                    worst.worst_triple = (times[i], times[u], times[t]);
                    worst.worst_component = comp;
                }
            }
        }
        worst
    });
    let mut out = DefectReport {
        max_ratio: 0.0,
        max_defect: 0.0,
        worst_triple: (times[0], times[0], times[0]),
        worst_component: MultiIndex::empty(),
        finite: true,
    };
    for row in rows {
        out.finite &= row.finite;
        if row.max_ratio > out.max_ratio {
            out.max_ratio = row.max_ratio;
            out.max_defect = row.max_defect;
            out.worst_triple = row.worst_triple;
            out.worst_component = row.worst_component;
        }
    }
    Ok(out)
}

/// How each sewing level refines the previous one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefinementSchedule {
    Dyadic,
    Trisection,
}

impl RefinementSchedule {
    fn arity(self) -> usize {
        match self {
            RefinementSchedule::Dyadic => 2,
            RefinementSchedule::Trisection => 3,
        }
    }
}

#[derive(Debug)]
pub struct SewReport {
    pub path: GridRoughPath,
    /// Largest `norm(sewn - input) / omega^theta` over grid pairs.
    pub k: f64,
    /// Per interval: distance between successive level products.
    pub level_diffs: Vec<Vec<f64>>,
    /// Per interval: worst single-piece defect at each level.
    pub defect_monitor: Vec<Vec<f64>>,
    pub depths: Vec<usize>,
}

/// Knobs for the sewing iteration.
#[derive(Clone, Copy, Debug)]
pub struct SewOptions {
    pub tol: f64,
    pub max_depth: usize,
    /// Refine at least this deep even once converged (diagnostics runs
    /// that want several logged levels).
    pub min_depth: usize,
    pub schedule: RefinementSchedule,
}

impl SewOptions {
    pub fn new(tol: f64, max_depth: usize) -> Self {
        SewOptions {
            tol,
            max_depth,
            min_depth: 0,
            schedule: RefinementSchedule::Dyadic,
        }
    }

    pub fn with_schedule(mut self, schedule: RefinementSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_min_depth(mut self, min_depth: usize) -> Self {
        self.min_depth = min_depth;
        self
    }
}

pub fn sew(y: &AlmostFunctional, tol: f64, max_depth: usize) -> Result<SewReport> {
    sew_with_options(y, SewOptions::new(tol, max_depth))
}

pub fn sew_with_schedule(
    y: &AlmostFunctional,
    tol: f64,
    max_depth: usize,
    schedule: RefinementSchedule,
) -> Result<SewReport> {
    sew_with_options(y, SewOptions::new(tol, max_depth).with_schedule(schedule))
}

pub fn sew_with_options(y: &AlmostFunctional, opts: SewOptions) -> Result<SewReport> {
    if y.theta() <= 1.0 {
        return Err(Error::NonconvergentExponent { theta: y.theta() });
    }
    let times = y.times().to_vec();
    let n = times.len();
    let per_interval = par::map_range(n - 1, |m| sew_interval(y, m, opts));
    let mut increments = Vec::with_capacity(n - 1);
    let mut level_diffs = Vec::with_capacity(n - 1);
    let mut defect_monitor = Vec::with_capacity(n - 1);
    let mut depths = Vec::with_capacity(n - 1);
    for r in per_interval {
        let r = r?;
        increments.push(r.0);
        level_diffs.push(r.1);
        defect_monitor.push(r.2);
        depths.push(r.3);
    }
    let path = GridRoughPath::new(
        y.spec().clone(),
        times.clone(),
        increments,
        y.basepoint.clone(),
    )?;
    // distance to the input, relative to omega^theta, over grid pairs
    let table = path.pair_table();
    let mut k = 0.0f64;
    for i in 0..n - 1 {
        for j in i + 1..n {
            let input = y.eval(times[i], times[j])?;
            let d = table.get(i, j).component_sup_distance(&input);
            if d == 0.0 {
                continue;
            }
            let w = y.omega().eval(times[i], times[j]);
            if w > 0.0 {
                k = k.max(d / w.powf(y.theta()));
            } else {
                k = f64::INFINITY;
            }
        }
    }
    Ok(SewReport {
        path,
        k,
        level_diffs,
        defect_monitor,
        depths,
    })
}

type IntervalResult = (TensorElement, Vec<f64>, Vec<f64>, usize);

/// One geometric-tail extrapolation stage: consumes a sequence, estimates
/// the decay ratio from its own successive differences, and emits the
/// tail-summed values.
struct ExtrapStage {
    prev_in: Option<TensorElement>,
    prev_diff: f64,
    fallback_ratio: f64,
}

struct StageOut {
    corrected: TensorElement,
    input_diff: f64,
    tail_estimate: f64,
}

impl ExtrapStage {
    fn new(fallback_ratio: f64) -> Self {
        ExtrapStage {
            prev_in: None,
            prev_diff: f64::NAN,
            fallback_ratio,
        }
    }

    fn push(&mut self, value: &TensorElement) -> Result<Option<StageOut>> {
        let Some(prev) = &self.prev_in else {
            self.prev_in = Some(value.clone());
            return Ok(None);
        };
        let diff = value.component_sup_distance(prev);
        let ratio = if self.prev_diff.is_finite() && self.prev_diff > 0.0 {
            (diff / self.prev_diff).clamp(1e-6, 0.95)
        } else {
            self.fallback_ratio.clamp(1e-6, 0.95)
        };
        let corrected = value.add(&value.sub(prev)?.scaled(ratio / (1.0 - ratio)))?;
        self.prev_in = Some(value.clone());
        self.prev_diff = diff;
        Ok(Some(StageOut {
            corrected,
            input_diff: diff,
            tail_estimate: diff * ratio / (1.0 - ratio),
        }))
    }
}

fn sew_interval(y: &AlmostFunctional, m: usize, opts: SewOptions) -> Result<IntervalResult> {
    let (a, b) = (y.times()[m], y.times()[m + 1]);
    let arity = opts.schedule.arity();
    let fallback_ratio = (arity as f64).powf(1.0 - y.theta());

    let mut parents = vec![y.eval(a, b)?];
    let mut prev_product = parents[0].clone();
    let scale = prev_product.max_component_norm().max(1.0);
    let mut diffs: Vec<f64> = Vec::new();
    let mut monitor: Vec<f64> = Vec::new();
    // two stages: the first removes the leading decay mode, the second the
    // next one (ratio estimated from the first stage's output)
    let mut stage1 = ExtrapStage::new(fallback_ratio);
    let mut stage2 = ExtrapStage::new(fallback_ratio * fallback_ratio);
    let mut best: Option<(TensorElement, usize)> = None;

    for depth in 1..=opts.max_depth {
        let pieces = arity.pow(depth as u32);
        let pts: Vec<f64> = (0..=pieces)
            .map(|i| a + (b - a) * i as f64 / pieces as f64)
            .collect();
        let children: Vec<TensorElement> = par::map_range(pieces, |i| y.eval(pts[i], pts[i + 1]))
            .into_iter()
            .collect::<Result<_>>()?;
        let mut worst_local = 0.0f64;
        let mut parent_products = Vec::with_capacity(parents.len());
        for (j, parent) in parents.iter().enumerate() {
            let mut prod = children[j * arity].clone();
            for c in &children[j * arity + 1..(j + 1) * arity] {
                prod = prod.mul(c)?;
            }
            worst_local = worst_local.max(prod.component_sup_distance(parent));
            parent_products.push(prod);
        }
        let mut product = parent_products[0].clone();
        for p in &parent_products[1..] {
            product = product.mul(p)?;
        }
        let diff = product.component_sup_distance(&prev_product);
        diffs.push(diff);
        monitor.push(worst_local);

        let mut converged = None;
        if diff <= 1e-3 * opts.tol * scale {
            converged = Some(product.clone());
        } else if let Some(out1) = stage1.push(&product)? {
            if out1.tail_estimate <= opts.tol * scale {
                converged = Some(out1.corrected.clone());
            }
            if let Some(out2) = stage2.push(&out1.corrected)? {
                if out2.input_diff <= opts.tol * scale || out2.tail_estimate <= opts.tol * scale {
                    converged = Some(out2.corrected);
                }
            }
        }
        if let Some(result) = converged {
            if best.is_none() {
                best = Some((result, depth));
            }
            if depth >= opts.min_depth {
                let (result, at) = best.unwrap();
                return Ok((result, diffs, monitor, at));
            }
        }
        prev_product = product;
        parents = children;
    }
    if let Some((result, at)) = best {
        return Ok((result, diffs, monitor, at));
    }
    let last = *diffs.last().unwrap_or(&f64::NAN);
    let previous = if diffs.len() >= 2 {
        diffs[diffs.len() - 2]
    } else {
        f64::NAN
    };
    Err(Error::SewDiverged {
        max_depth: opts.max_depth,
        previous,
        last,
    })
}

#[derive(Debug)]
pub struct ExtensionReport {
    pub path: GridRoughPath,
    /// Smallest constant making the factorial-weighted variation bound hold
    /// for the extension with its own grid control.
    pub beta_empirical: f64,
    pub beta_lower_bound: f64,
    pub levels_built: Vec<Rational64>,
}

/// Extend a multiplicative functional to truncation degree `q`, building
/// the new components degree level by degree level: each level sews the
/// functional that keeps everything already built and sets the new
/// components to zero. Components at or below the input degree are kept
/// bit-identical.
pub fn extend_signature(
    x: &GridRoughPath,
    q: Rational64,
    tol: f64,
    max_depth: usize,
) -> Result<ExtensionReport> {
    let spec0 = x.spec();
    let target = GradingSpec::new(spec0.p().to_vec(), spec0.dims().to_vec(), q)?;
    let start_deg = spec0.q().min(q);

    // re-embed the increments into the target truncation
    let mut increments: Vec<TensorElement> = x
        .increments()
        .iter()
        .map(|inc| {
            let mut t = TensorElement::one(target.clone());
            for (r, arr) in inc.components() {
                if r.is_empty() {
                    continue;
                }
                if target.is_admissible(r) && spec0.deg_unchecked(r) <= start_deg {
                    t.set_component(r.clone(), arr.to_vec())?;
                }
            }
            Ok(t)
        })
        .collect::<Result<_>>()?;

    let levels: Vec<Rational64> = target
        .degree_set(q)
        .into_iter()
        .filter(|&d| d > start_deg)
        .collect();
    let omega = control_from_path(x);

    let mut built = Vec::new();
    let mut prev_deg = start_deg;
    for &level in &levels {
        if level <= Rational64::one() {
            // Below degree one the generic defect exponent equals the level
            // and gives sewing nothing to work with; these components are
            // input data, so fill them with the minimal geometric
            // completion: the exponential of the truncated logarithm.
            for inc in increments.iter_mut() {
                let l = inc.log()?.truncate_above(prev_deg);
                let filled = crate::path::exp_general(&l)?;
                for (r, arr) in filled.components() {
                    if !r.is_empty() && target.deg_unchecked(r) == level {
                        inc.set_component(r.clone(), arr.to_vec())?;
                    }
                }
            }
            built.push(level);
            prev_deg = level;
            continue;
        }
        let cur = GridRoughPath::new(
            target.clone(),
            x.times().to_vec(),
            increments.clone(),
            x.basepoint().to_vec(),
        )?;
        let bound = prev_deg;
        let owned = cur.clone();
        let almost = AlmostFunctional::new(
            target.clone(),
            x.times().to_vec(),
            x.basepoint().to_vec(),
            ratio_to_f64(level),
            omega.clone(),
            Box::new(move |u, v| owned.interp_eval(u, v).map(|t| t.truncate_above(bound))),
        )?;
        let sewn = sew(&almost, tol, max_depth)?;
        // adopt only the new level; keep everything below bit-identical
        for (inc, new_inc) in increments.iter_mut().zip(sewn.path.increments()) {
            for (r, arr) in new_inc.components() {
                if !r.is_empty() && target.deg_unchecked(r) == level {
                    inc.set_component(r.clone(), arr.to_vec())?;
                }
            }
        }
        built.push(level);
        prev_deg = level;
    }

    let path = GridRoughPath::new(
        target.clone(),
        x.times().to_vec(),
        increments,
        x.basepoint().to_vec(),
    )?;
    let beta_empirical = empirical_beta(&path, &omega);
    Ok(ExtensionReport {
        path,
        beta_empirical,
        beta_lower_bound: target.beta_lower_bound(),
        levels_built: built,
    })
}

/// Smallest `beta` for which the factorial-weighted bound holds:
/// `(max over components and pairs of norm * weight / omega^deg)^(1/k)`.
pub fn empirical_beta(x: &GridRoughPath, omega: &ControlFunction) -> f64 {
    let cert = crate::path::check_finite_pi_variation(x, omega, 1.0);
    cert.worst_ratio.powf(1.0 / x.spec().num_blocks() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::GradingSpec;
    use crate::path::SampledPath;
    use crate::ratio::parse_ratio;
    use crate::tensor::{Letter, Word};

    fn spec(p: &[&str], dims: &[usize], q: &str) -> Spec {
        GradingSpec::new(
            p.iter().map(|s| parse_ratio(s).unwrap()).collect(),
            dims.to_vec(),
            parse_ratio(q).unwrap(),
        )
        .unwrap()
    }

    fn word(letters: &[(usize, usize)]) -> Word {
        Word(
            letters
                .iter()
                .map(|&(block, coord)| Letter { block, coord })
                .collect(),
        )
    }

    fn random_lift(seed: u64, s: &Spec, n: usize) -> GridRoughPath {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let values: Vec<Vec<f64>> = (0..=n)
            .map(|_| (0..s.total_dim()).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        GridRoughPath::lift(&SampledPath::new(times, values).unwrap(), s).unwrap()
    }

    #[test]
    fn exact_path_has_zero_defect() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(3, &s, 6);
        let y = AlmostFunctional::from_grid_path(&x, 1.5, ControlFunction::linear(1.0));
        let report = multiplicativity_defect(&y).unwrap();
        assert!(report.max_ratio < 1e-13, "{}", report.max_ratio);
    }

    fn perturbed(
        x: &GridRoughPath,
        c: f64,
        theta: f64,
    ) -> AlmostFunctional {
        let owned = x.clone();
        let spec = x.spec().clone();
        AlmostFunctional::new(
            x.spec().clone(),
            x.times().to_vec(),
            x.basepoint().to_vec(),
            theta,
            ControlFunction::linear(1.0),
            Box::new(move |u, v| {
                let mut t = owned.interp_eval(u, v)?;
                let w = word(&[(1, 1), (1, 2)]);
                let cur = t.coeff(&w);
                t.set_coeff(&w, cur + c * (v - u).powf(theta))?;
                let _ = &spec;
                Ok(t)
            }),
        )
        .unwrap()
    }

    #[test]
    fn perturbation_defect_ratio() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(5, &s, 8);
        let c = 0.7;
        let theta = 1.5;
        let y = perturbed(&x, c, theta);
        let report = multiplicativity_defect(&y).unwrap();
        // the perturbation contributes |c| |l^t + (1-l)^t - 1| at split
        // fraction l; scan the same grid triples for the exact maximum
        let times = x.times();
        let mut want = 0.0f64;
        for i in 0..times.len() {
            for u in i + 1..times.len() {
                for t in u + 1..times.len() {
                    let span = times[t] - times[i];
                    let l = (times[u] - times[i]) / span;
                    want = want
                        .max(c * (l.powf(theta) + (1.0 - l).powf(theta) - 1.0).abs());
                }
            }
        }
        assert!(
            (report.max_ratio - want).abs() < 1e-10,
            "{} vs {}",
            report.max_ratio,
            want
        );
    }

    #[test]
    fn sew_is_identity_on_multiplicative_input() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(7, &s, 5);
        let y = AlmostFunctional::from_grid_path(&x, 1.5, ControlFunction::linear(1.0));
        let report = sew(&y, 1e-10, 20).unwrap();
        assert!(report.depths.iter().all(|&d| d == 1));
        for i in 0..x.num_intervals() {
            let d = report.path.increment(i).component_sup_distance(x.increment(i));
            assert!(d < 1e-13);
        }
        assert!(report.k < 1e-12);
    }

    #[test]
    fn sew_recovers_perturbed_lift() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(11, &s, 4);
        let y = perturbed(&x, 1.0, 1.5);
        let report = sew_with_options(&y, SewOptions::new(1e-10, 22).with_min_depth(9)).unwrap();
        for i in 0..x.num_intervals() {
            let d = report.path.increment(i).component_sup_distance(x.increment(i));
            assert!(d < 1e-8, "interval {i}: {d}");
        }
        // raw level differences decay like 2^(1-theta), the local defect
        // monitor like 2^(-theta)
        let diffs = &report.level_diffs[0];
        assert!(diffs.len() >= 6, "{diffs:?}");
        let mut ratios = Vec::new();
        for w in diffs.windows(2) {
            if w[0] > 1e-13 && w[1] > 1e-13 {
                ratios.push(w[1] / w[0]);
            }
        }
        let mid = ratios.len() / 2;
        let tail_ratio = ratios[mid..].iter().sum::<f64>() / (ratios.len() - mid) as f64;
        assert!(
            (tail_ratio - 2f64.powf(1.0 - 1.5)).abs() < 0.08,
            "raw ratio {tail_ratio}"
        );
        let monitor = &report.defect_monitor[0];
        let mut ratios = Vec::new();
        for w in monitor.windows(2) {
            if w[0] > 1e-13 && w[1] > 1e-13 {
                ratios.push(w[1] / w[0]);
            }
        }
        let mid = ratios.len() / 2;
        let tail_ratio = ratios[mid..].iter().sum::<f64>() / (ratios.len() - mid) as f64;
        assert!(
            (tail_ratio - 2f64.powf(-1.5)).abs() < 0.08,
            "monitor ratio {tail_ratio}"
        );
    }

    #[test]
    fn sew_reports_nonconvergence() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(13, &s, 3);
        // defect exponent below one: the level products drift apart and the
        // iteration must give up at max_depth
        let y = perturbed(&x, 1.0, 0.8);
        let bad = AlmostFunctional::new(
            s.clone(),
            x.times().to_vec(),
            x.basepoint().to_vec(),
            1.5,
            ControlFunction::linear(1.0),
            Box::new({
                let inner = y;
                move |u, v| inner.eval(u, v)
            }),
        )
        .unwrap();
        match sew(&bad, 1e-10, 6) {
            Err(Error::SewDiverged { max_depth, last, .. }) => {
                assert_eq!(max_depth, 6);
                assert!(last.is_finite());
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        assert!(matches!(
            sew(
                &AlmostFunctional::from_grid_path(&x, 1.0, ControlFunction::linear(1.0)),
                1e-10,
                5
            ),
            Err(Error::NonconvergentExponent { .. })
        ));
    }

    #[test]
    fn extend_one_dim_level_two_is_half_square() {
        let s1 = spec(&["2"], &[1], "1/2");
        let p = SampledPath::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![vec![0.0], vec![0.8], vec![0.5], vec![1.7]],
        )
        .unwrap();
        let x = GridRoughPath::lift(&p, &s1).unwrap();
        let report = extend_signature(&x, parse_ratio("1").unwrap(), 1e-10, 20).unwrap();
        for (i, delta) in [0.8f64, -0.3, 1.2].iter().enumerate() {
            let got = report.path.increment(i).coeff(&word(&[(1, 1), (1, 1)]));
            assert!((got - delta * delta / 2.0).abs() < 1e-9, "{got}");
        }
    }

    #[test]
    fn mixed_extension_matches_direct_lift() {
        let s_low = spec(&["1", "2"], &[1, 1], "1");
        let s_high = spec(&["1", "2"], &[1, 1], "3/2");
        let p = SampledPath::new(
            vec![0.0, 0.25, 0.5, 0.75, 1.0],
            vec![
                vec![0.0, 0.0],
                vec![0.25, 0.4],
                vec![0.5, -0.1],
                vec![0.75, 0.3],
                vec![1.0, 0.9],
            ],
        )
        .unwrap();
        let x_low = GridRoughPath::lift(&p, &s_low).unwrap();
        let direct = GridRoughPath::lift(&p, &s_high).unwrap();
        let report = extend_signature(&x_low, parse_ratio("3/2").unwrap(), 1e-10, 24).unwrap();
        let ta = report.path.pair_table();
        let tb = direct.pair_table();
        for i in 0..p.len() - 1 {
            for j in i + 1..p.len() {
                let d = ta.get(i, j).component_sup_distance(&tb.get(i, j));
                let scale = tb.get(i, j).max_component_norm().max(1e-3);
                assert!(d / scale < 1e-8, "pair ({i},{j}): rel {}", d / scale);
            }
        }
        assert!(report.beta_empirical.is_finite());
    }

    #[test]
    fn extension_is_idempotent() {
        let s = spec(&["2"], &[1], "1");
        let x = random_lift(17, &s, 4);
        let once = extend_signature(&x, parse_ratio("3/2").unwrap(), 1e-10, 20).unwrap();
        let twice = extend_signature(&once.path, parse_ratio("3/2").unwrap(), 1e-10, 20).unwrap();
        for i in 0..x.num_intervals() {
            let d = once
                .path
                .increment(i)
                .component_sup_distance(twice.path.increment(i));
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn schedules_agree() {
        let s = spec(&["2"], &[2], "1");
        let x = random_lift(19, &s, 3);
        let tol = 1e-10;
        let ya = perturbed(&x, 0.5, 1.5);
        let da = sew_with_schedule(&ya, tol, 22, RefinementSchedule::Dyadic).unwrap();
        let yb = perturbed(&x, 0.5, 1.5);
        let db = sew_with_schedule(&yb, tol, 14, RefinementSchedule::Trisection).unwrap();
        for i in 0..x.num_intervals() {
            let d = da.path.increment(i).component_sup_distance(db.path.increment(i));
            assert!(d < 10.0 * tol, "interval {i}: {d}");
        }
    }
}
