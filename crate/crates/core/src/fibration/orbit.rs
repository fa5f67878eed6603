//! Orbits of a surface point under words in the two translations.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::numerics::{BigComplex, Ring};

use super::double::{DoubleFibration, Generator};
use super::surface::{QuarticSurface, SurfacePoint};

/// One requested word: apply `generator` to the point at index `parent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub parent: usize,
    pub generator: Generator,
    pub chain: usize,
}

/// Word generator. Index 0 is the seed; the `k`-th call to `next` produces
/// index `k`.
pub trait Schedule {
    fn next(&mut self) -> Option<Step>;
    /// Stop extending `chain`.
    fn close(&mut self, chain: usize);
    /// The word at `index` is undefined; drop everything built on it.
    fn prune(&mut self, index: usize);
}

/// Built-in schedules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleKind {
    /// `s^m t^n` by increasing `m + n`, then increasing `m`.
    Diagonal,
    /// `p, s p, t s p, s t s p, ...`
    Alternating,
    /// The rays `s^k p` and `t^k p`, interleaved.
    AlternatingRays,
}

impl ScheduleKind {
    pub fn build(self) -> Box<dyn Schedule + Send> {
        match self {
            ScheduleKind::Diagonal => Box::new(Diagonal::default()),
            ScheduleKind::Alternating => Box::new(Alternating::default()),
            ScheduleKind::AlternatingRays => Box::new(Rays::default()),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "diagonal" => Some(ScheduleKind::Diagonal),
            "alternating" => Some(ScheduleKind::Alternating),
            "alternating-rays" => Some(ScheduleKind::AlternatingRays),
            _ => None,
        }
    }
}

#[derive(Default)]
struct Diagonal {
    index: HashMap<(u32, u32), usize>,
    dead: Vec<bool>,
    d: u32,
    m: u32,
    produced: usize,
    closed: bool,
}

impl Schedule for Diagonal {
    fn next(&mut self) -> Option<Step> {
        if self.closed {
            return None;
        }
        if self.index.is_empty() {
            self.index.insert((0, 0), 0);
            self.dead.push(false);
            self.d = 1;
            self.m = 0;
        }
        // Skip words whose parent is undefined; give up after a full empty diagonal.
        let mut empty_run = 0;
        loop {
            let (m, n) = (self.m, self.d - self.m);
            let (pm, pn, g) = if m > 0 { (m - 1, n, Generator::Sigma) } else { (0, n - 1, Generator::Tau) };
            if self.m == self.d {
                self.d += 1;
                self.m = 0;
            } else {
                self.m += 1;
            }
            match self.index.get(&(pm, pn)) {
                Some(&parent) if !self.dead[parent] => {
                    self.produced += 1;
                    self.index.insert((m, n), self.produced);
                    self.dead.push(false);
                    return Some(Step { parent, generator: g, chain: 0 });
                }
                _ => {
                    empty_run += 1;
                    if empty_run > 2 * self.d as usize + 2 {
                        return None;
                    }
                }
            }
        }
    }

    fn close(&mut self, _chain: usize) {
        self.closed = true;
    }

    fn prune(&mut self, index: usize) {
        self.dead[index] = true;
    }
}

#[derive(Default)]
struct Alternating {
    produced: usize,
    done: bool,
}

impl Schedule for Alternating {
    fn next(&mut self) -> Option<Step> {
        if self.done {
            return None;
        }
        let g = if self.produced % 2 == 0 { Generator::Sigma } else { Generator::Tau };
        let parent = self.produced;
        self.produced += 1;
        Some(Step { parent, generator: g, chain: 0 })
    }

    fn close(&mut self, _chain: usize) {
        self.done = true;
    }

    fn prune(&mut self, _index: usize) {
        self.done = true;
    }
}

#[derive(Default)]
struct Rays {
    last: [usize; 2],
    open: [bool; 2],
    turn: usize,
    produced: usize,
    started: bool,
}

impl Schedule for Rays {
    fn next(&mut self) -> Option<Step> {
        if !self.started {
            self.started = true;
            self.open = [true, true];
        }
        let c = if self.open[self.turn] {
            self.turn
        } else if self.open[1 - self.turn] {
            1 - self.turn
        } else {
            return None;
        };
        self.turn = 1 - c;
        self.produced += 1;
        let parent = self.last[c];
        self.last[c] = self.produced;
        let generator = if c == 0 { Generator::Sigma } else { Generator::Tau };
        Some(Step { parent, generator, chain: c })
    }

    fn close(&mut self, chain: usize) {
        self.open[chain] = false;
    }

    fn prune(&mut self, index: usize) {
        for c in 0..2 {
            if self.last[c] == index {
                self.open[c] = false;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OrbitStatus {
    CycleFound { period: usize },
    BudgetExhausted,
    Indeterminate { step: usize },
    SingularFiber { step: usize },
    /// Rounding error pushed an iterate off the surface.
    PrecisionLost { step: usize },
}

/// One visited word. `point` is `None` when the word is undefined at the seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitStep {
    pub index: usize,
    pub parent: Option<usize>,
    pub generator: Option<Generator>,
    pub chain: usize,
    /// Run-length word, leftmost generator applied last, e.g. `s^2t`.
    pub word: String,
    pub point: Option<Vec<String>>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub seed: Vec<String>,
    pub schedule: ScheduleKind,
    pub precision: u32,
    pub budget: usize,
    pub match_tol: f64,
    pub steps: Vec<OrbitStep>,
    pub status: OrbitStatus,
    /// Verified period of each chain that closed.
    pub chain_periods: BTreeMap<usize, usize>,
    #[serde(skip)]
    pub points: Vec<Option<SurfacePoint<BigComplex>>>,
}

impl OrbitRecord {
    pub fn failures(&self) -> impl Iterator<Item = &OrbitStep> {
        self.steps.iter().filter(|s| s.failure.is_some())
    }

    /// Step log with one row per word.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,parent,generator,word,status,x,y,z,w\n");
        for s in &self.steps {
            let parent = s.parent.map_or(String::new(), |p| p.to_string());
            let g = match s.generator {
                Some(Generator::Sigma) => "s",
                Some(Generator::Tau) => "t",
                None => "",
            };
            let (status, coords) = match (&s.point, &s.failure) {
                (Some(p), _) => ("ok".to_string(), p.clone()),
                (None, Some(f)) => (f.clone(), vec![String::new(); 4]),
                (None, None) => (String::new(), vec![String::new(); 4]),
            };
            out.push_str(&format!("{},{},{},{},{},{}\n", s.index, parent, g, s.word, csv_field(&status), coords.join(",")));
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Default matching tolerance `2^(-prec/3)`.
pub fn default_match_tol(prec: u32) -> f64 {
    (-(prec as f64) / 3.0).exp2()
}

fn word_string(runs: &[(Generator, u32)]) -> String {
    let mut s = String::new();
    for (g, k) in runs {
        s.push(if *g == Generator::Sigma { 's' } else { 't' });
        if *k > 1 {
            s.push_str(&format!("^{}", k));
        }
    }
    s
}

fn push_run(runs: &[(Generator, u32)], g: Generator) -> Vec<(Generator, u32)> {
    let mut out = Vec::with_capacity(runs.len() + 1);
    match runs.first() {
        Some((h, k)) if *h == g => {
            out.push((g, k + 1));
            out.extend_from_slice(&runs[1..]);
        }
        _ => {
            out.push((g, 1));
            out.extend_from_slice(runs);
        }
    }
    out
}

/// Projective invariant used to bucket points: `sum |c_i|^2 / max |c_i|^2`.
fn key(p: &SurfacePoint<BigComplex>) -> f64 {
    let n: Vec<f64> = p.coords().iter().map(|c| c.norm_sqr().to_f64()).collect();
    let m = n.iter().cloned().fold(0.0, f64::max);
    n.iter().sum::<f64>() / m
}

/// Gauss-Newton projection onto the surface at `prec` bits.
pub fn refine_to_surface(surface: &QuarticSurface, p: &SurfacePoint<BigComplex>, prec: u32) -> SurfacePoint<BigComplex> {
    let mut c = p.with_prec(prec).coords().clone();
    let form = surface.form().to_field(&c[0]);
    for _ in 0..8 {
        let f = form.eval(&c);
        if f.is_zero() || f.log2_abs_approx() < -(prec as f64) + 4.0 {
            break;
        }
        let g = form.gradient(&c);
        let mut n = g[0].norm_sqr();
        for gi in &g[1..] {
            n += gi.norm_sqr();
        }
        let t = f.div_real(&n);
        for i in 0..4 {
            c[i] = c[i].sub_ref(&t.mul_ref(&g[i].conj()));
        }
    }
    SurfacePoint::new_unchecked(c)
}

fn classify(e: &Error) -> &'static str {
    match e {
        Error::SingularFiber(_) => "singular-fiber",
        Error::NumericFailure(_) => "precision-lost",
        _ => "indeterminate",
    }
}

impl DoubleFibration {
    pub fn apply(&self, g: Generator, p: &SurfacePoint<BigComplex>) -> crate::Result<SurfacePoint<BigComplex>> {
        match g {
            Generator::Sigma => self.apply_sigma(p),
            Generator::Tau => self.apply_tau(p),
        }
    }

    /// Iterates the words of `schedule` from `seed` until a verified cycle
    /// closes every chain or `budget` points (seed included) are visited.
    pub fn orbit(
        &self,
        seed: &SurfacePoint<BigComplex>,
        schedule: ScheduleKind,
        budget: usize,
        match_tol: f64,
    ) -> OrbitRecord {
        let prec = seed.prec();
        let mut sched = schedule.build();
        let mut points: Vec<Option<SurfacePoint<BigComplex>>> = vec![Some(seed.clone())];
        let mut parents: Vec<Option<(usize, Generator)>> = vec![None];
        let mut depth = vec![0usize];
        let mut runs: Vec<Vec<(Generator, u32)>> = vec![vec![]];
        let mut steps = vec![OrbitStep {
            index: 0,
            parent: None,
            generator: None,
            chain: 0,
            word: String::new(),
            point: Some(seed.to_strings()),
            failure: None,
        }];
        let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        buckets.entry(key(seed).to_bits()).or_default().push(0);
        let mut chain_periods = BTreeMap::new();
        let mut first_failure: Option<OrbitStatus> = None;
        let mut live_chains: Vec<usize> = vec![];
        let window = 64.0 * match_tol + 1e-14;

        while points.len() < budget {
            let Some(step) = sched.next() else { break };
            let i = points.len();
            if !live_chains.contains(&step.chain) {
                live_chains.push(step.chain);
            }
            let word = push_run(&runs[step.parent], step.generator);
            let result = match &points[step.parent] {
                Some(p) => self.apply(step.generator, p),
                None => Err(Error::Indeterminate("parent word undefined".into())),
            };
            parents.push(Some((step.parent, step.generator)));
            depth.push(depth[step.parent] + 1);
            let mut record = OrbitStep {
                index: i,
                parent: Some(step.parent),
                generator: Some(step.generator),
                chain: step.chain,
                word: word_string(&word),
                point: None,
                failure: None,
            };
            runs.push(word);
            match result {
                Err(e) => {
                    let kind = classify(&e);
                    record.failure = Some(format!("{}: {}", kind, e));
                    if first_failure.is_none() {
                        first_failure = Some(match kind {
                            "singular-fiber" => OrbitStatus::SingularFiber { step: i },
                            "precision-lost" => OrbitStatus::PrecisionLost { step: i },
                            _ => OrbitStatus::Indeterminate { step: i },
                        });
                    }
                    points.push(None);
                    steps.push(record);
                    sched.prune(i);
                }
                Ok(q) => {
                    record.point = Some(q.to_strings());
                    let k = key(&q);
                    let lo = (k - window).max(0.0).to_bits();
                    let hi = (k + window).to_bits();
                    let mut hit = None;
                    'search: for (_, ids) in buckets.range(lo..=hi) {
                        for &j in ids {
                            let p = points[j].as_ref().unwrap();
                            if p.distance(&q) < match_tol && is_ancestor(&parents, j, step.parent) {
                                hit = Some(j);
                                break 'search;
                            }
                        }
                    }
                    buckets.entry(k.to_bits()).or_default().push(i);
                    points.push(Some(q));
                    steps.push(record);
                    if let Some(j) = hit {
                        let path = path_to(&parents, i);
                        let period = depth[i] - depth[j];
                        if self.verify_cycle(seed, &path, depth[j], period, 2 * prec) {
                            chain_periods.insert(step.chain, period);
                            sched.close(step.chain);
                        }
                    }
                }
            }
        }

        let all_closed = !live_chains.is_empty() && live_chains.iter().all(|c| chain_periods.contains_key(c));
        let status = if all_closed {
            OrbitStatus::CycleFound { period: chain_periods.values().fold(1, |a, &b| lcm(a, b)) }
        } else if points.len() < budget && first_failure.is_some() {
            first_failure.unwrap()
        } else {
            OrbitStatus::BudgetExhausted
        };
        OrbitRecord {
            seed: seed.to_strings(),
            schedule,
            precision: prec,
            budget,
            match_tol,
            steps,
            status,
            chain_periods,
            points,
        }
    }

    /// Replays `path` from the seed at `prec` bits, checks that the point at
    /// depth `start + period` returns to the one at depth `start`, and that
    /// one more pass of the loop returns again.
    fn verify_cycle(&self, seed: &SurfacePoint<BigComplex>, path: &[Generator], start: usize, period: usize, prec: u32) -> bool {
        let tol = default_match_tol(prec);
        let mut p = refine_to_surface(&self.surface, seed, prec);
        let mut anchor = None;
        for (d, g) in path.iter().enumerate() {
            if d == start {
                anchor = Some(p.clone());
            }
            match self.apply(*g, &p) {
                Ok(q) => p = q,
                Err(_) => return false,
            }
        }
        let anchor = anchor.unwrap_or_else(|| p.clone());
        if anchor.distance(&p) >= tol {
            return false;
        }
        for g in &path[start..start + period] {
            match self.apply(*g, &p) {
                Ok(q) => p = q,
                Err(_) => return false,
            }
        }
        anchor.distance(&p) < tol
    }

    /// Independent orbits of several seeds, computed in parallel.
    pub fn orbits(
        &self,
        seeds: &[SurfacePoint<BigComplex>],
        schedule: ScheduleKind,
        budget: usize,
        match_tol: f64,
    ) -> Vec<OrbitRecord> {
        seeds.par_iter().map(|s| self.orbit(s, schedule, budget, match_tol)).collect()
    }
}

fn is_ancestor(parents: &[Option<(usize, Generator)>], j: usize, mut i: usize) -> bool {
    loop {
        if i == j {
            return true;
        }
        match parents[i] {
            Some((p, _)) => i = p,
            None => return false,
        }
    }
}

/// Generators from the seed to `i`, in application order.
fn path_to(parents: &[Option<(usize, Generator)>], mut i: usize) -> Vec<Generator> {
    let mut out = vec![];
    while let Some((p, g)) = parents[i] {
        out.push(g);
        i = p;
    }
    out.reverse();
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fibration::fermat_double_fibration;

    fn seed(prec: u32) -> SurfacePoint<BigComplex> {
        let x = fermat_double_fibration();
        let s = BigComplex::from_f64(2.0, 0.0, prec);
        x.sample_point(Generator::Sigma, &s, &BigComplex::from_f64(0.3, 0.7, prec)).unwrap()
    }

    #[test]
    fn schedules_enumerate_words() {
        let mut d = ScheduleKind::Diagonal.build();
        let got: Vec<_> = (0..5).map(|_| d.next().unwrap()).collect();
        // t, s, t^2, st, s^2
        assert_eq!(got.iter().map(|s| s.parent).collect::<Vec<_>>(), vec![0, 0, 1, 1, 2]);
        assert_eq!(got[0].generator, Generator::Tau);
        assert_eq!(got[3].generator, Generator::Sigma);
        let mut r = ScheduleKind::AlternatingRays.build();
        let got: Vec<_> = (0..4).map(|_| r.next().unwrap()).collect();
        assert_eq!(got.iter().map(|s| (s.parent, s.chain)).collect::<Vec<_>>(), vec![(0, 0), (0, 1), (1, 0), (2, 1)]);
        r.close(0);
        assert_eq!(r.next().unwrap().chain, 1);
        assert_eq!(r.next().unwrap().chain, 1);
        assert_eq!(word_string(&push_run(&push_run(&[], Generator::Tau), Generator::Sigma)), "st");
    }

    #[test]
    fn budget_one_is_the_seed() {
        let x = fermat_double_fibration();
        let p = seed(128);
        let r = x.orbit(&p, ScheduleKind::Diagonal, 1, default_match_tol(128));
        assert_eq!(r.status, OrbitStatus::BudgetExhausted);
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.steps[0].word, "");
    }

    #[test]
    fn deterministic_and_serializable() {
        let x = fermat_double_fibration();
        let p = seed(96);
        let a = x.orbit(&p, ScheduleKind::Diagonal, 30, default_match_tol(96));
        let b = x.orbit(&p, ScheduleKind::Diagonal, 30, default_match_tol(96));
        assert_eq!(a.status, OrbitStatus::BudgetExhausted);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.steps[4].word, "st");
    }

    #[test]
    fn refinement_reaches_the_surface() {
        let x = fermat_double_fibration();
        let p = refine_to_surface(&x.surface, &seed(64), 256);
        assert!(x.surface.eval(p.coords()).log2_abs_approx() < -240.0);
    }
}
