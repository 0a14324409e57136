//! The IDLA aggregate on ℤ.
//!
//! Occupied sites are stored as a contiguous core `[-left, right]` around the
//! origin plus a hash set of the occupied sites outside it. Whenever a walker
//! settles next to the core, the core absorbs it together with any run of
//! outlying sites it now touches, so the inner radius is `min(left, right)`.
//! For finite-variance laws almost every site lives in the core and the set
//! stays tiny; for heavy-tailed laws the set holds the scattered outliers.

use std::collections::BTreeMap;

use rand::RngCore;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::IncrementLaw;
use crate::walker::DEFAULT_STEP_CAP;

/// Blocks shorter than this are stepped one at a time.
const MIN_BLOCK: u64 = 32;

/// Release builds check the invariants once per this many dispatches.
const RELEASE_CHECK_PERIOD: u64 = 1 << 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterLimits {
    /// Per-walker step cap.
    pub step_cap: u64,
    /// Total steps over the whole run; `None` for unlimited.
    pub step_budget: Option<u64>,
    /// Exact block stepping inside the core (bounded laws only).
    pub blocking: bool,
}

impl Default for ClusterLimits {
    fn default() -> Self {
        Self {
            step_cap: DEFAULT_STEP_CAP,
            step_budget: None,
            blocking: true,
        }
    }
}

/// One walker of a recording window, extended past its settling step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordedWalk {
    /// Index `j` of the walker (the cluster had `j - 1` walkers before it).
    pub index: u64,
    pub settled: i64,
    /// Settling time `τ_j`.
    pub tau: u64,
    /// `S_0, S_1, …` up to `max(τ_j, η_[-R,R])`.
    pub path: Vec<i64>,
}

impl RecordedWalk {
    /// First exit time from `[lo, hi]`, if the recorded path reaches it.
    pub fn exit_time(&self, lo: i64, hi: i64) -> Option<usize> {
        self.path.iter().position(|&p| p < lo || p > hi)
    }

    pub fn hitting_time(&self, t: i64) -> Option<usize> {
        self.path.iter().position(|&p| p == t)
    }
}

/// Walks recorded for the diagnostic counters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Recording {
    /// Walks are extended at least until they leave `[-radius, radius]`.
    pub radius: i64,
    pub walks: Vec<RecordedWalk>,
}

#[derive(Debug, Clone)]
pub struct Cluster {
    left: i64,
    right: i64,
    outliers: FxHashSet<i64>,
    m: u64,
    /// `sigma[x]` is the coverage time of radius `x`.
    sigma: Vec<u64>,
    steps_total: u64,
    recording: Option<Recording>,
}

impl Default for Cluster {
    fn default() -> Self {
        Self::new()
    }
}

impl Cluster {
    /// The germ `{0}`.
    pub fn new() -> Self {
        Self {
            left: 0,
            right: 0,
            outliers: FxHashSet::default(),
            m: 0,
            sigma: vec![0],
            steps_total: 0,
            recording: None,
        }
    }

    pub fn walkers(&self) -> u64 {
        self.m
    }

    pub fn size(&self) -> u64 {
        (self.left + self.right + 1) as u64 + self.outliers.len() as u64
    }

    pub fn inner_radius(&self) -> u64 {
        self.left.min(self.right) as u64
    }

    /// The contiguous block `[-left, right]` containing the origin.
    pub fn core(&self) -> (i64, i64) {
        (-self.left, self.right)
    }

    pub fn is_interval(&self) -> bool {
        self.outliers.is_empty()
    }

    pub fn contains(&self, site: i64) -> bool {
        (-self.left..=self.right).contains(&site) || self.outliers.contains(&site)
    }

    /// Sorted list of occupied sites.
    pub fn occupied(&self) -> Vec<i64> {
        let mut v: Vec<i64> = (-self.left..=self.right).chain(self.outliers.iter().copied()).collect();
        v.sort_unstable();
        v
    }

    /// Coverage time `σ_x`, if radius `x` has been reached.
    pub fn sigma(&self, x: u64) -> Option<u64> {
        self.sigma.get(x as usize).copied()
    }

    /// `(x, σ_x)` for every radius reached so far.
    pub fn coverage_log(&self) -> Vec<(u64, u64)> {
        self.sigma.iter().enumerate().map(|(x, &s)| (x as u64, s)).collect()
    }

    pub fn steps_total(&self) -> u64 {
        self.steps_total
    }

    /// `k_x(m, A)`: occupied sites strictly outside `[-A·x, A·x]`.
    pub fn lost_particles(&self, x: u64, a: f64) -> u64 {
        let bound = a * x as f64;
        let outside = |z: i64| (z as f64).abs() > bound;
        // core sites strictly beyond ±bound
        let b = bound.floor() as i64;
        let core_right = (self.right - b).max(0) as u64;
        let core_left = (self.left - b).max(0) as u64;
        core_right + core_left + self.outliers.iter().filter(|&&z| outside(z)).count() as u64
    }

    /// Start recording subsequent walkers, extending each walk until it has
    /// both settled and left `[-radius, radius]`.
    pub fn start_recording(&mut self, radius: i64) {
        self.recording = Some(Recording {
            radius,
            walks: Vec::new(),
        });
    }

    pub fn take_recording(&mut self) -> Option<Recording> {
        self.recording.take()
    }

    /// Check the structural invariants.
    pub fn check_invariants(&self) -> Result<(), String> {
        if self.size() != self.m + 1 {
            return Err(format!("|C_m| = {} but m = {}", self.size(), self.m));
        }
        if self.outliers.contains(&(self.right + 1)) || self.outliers.contains(&(-self.left - 1)) {
            return Err("core not maximal".into());
        }
        if self.outliers.iter().any(|z| (-self.left..=self.right).contains(z)) {
            return Err("outlier inside core".into());
        }
        let r = self.inner_radius();
        if 2 * r > self.m {
            return Err(format!("r_m = {r} exceeds m/2 at m = {}", self.m));
        }
        if self.sigma.len() as u64 != r + 1 || self.sigma[r as usize] > self.m {
            return Err("coverage log out of step with the inner radius".into());
        }
        Ok(())
    }

    fn settle(&mut self, site: i64) {
        debug_assert!(!self.contains(site));
        self.m += 1;
        if site == self.right + 1 {
            self.right += 1;
            while self.outliers.remove(&(self.right + 1)) {
                self.right += 1;
            }
        } else if site == -self.left - 1 {
            self.left += 1;
            while self.outliers.remove(&(-self.left - 1)) {
                self.left += 1;
            }
        } else {
            self.outliers.insert(site);
        }
        let r = self.inner_radius();
        while (self.sigma.len() as u64) <= r {
            self.sigma.push(self.m);
        }
    }

    fn budget_check(&self, limits: &ClusterLimits, steps: u64) -> Result<()> {
        if let Some(budget) = limits.step_budget {
            if self.steps_total + steps > budget {
                return Err(Error::BudgetExhausted {
                    budget,
                    walkers: self.m,
                });
            }
        }
        Ok(())
    }

    /// Release one walker from the origin and add the first site it visits
    /// outside the cluster. Returns the settled site.
    pub fn dispatch_one<R: RngCore + ?Sized>(
        &mut self,
        law: &IncrementLaw,
        rng: &mut R,
        limits: &ClusterLimits,
    ) -> Result<i64> {
        if self.recording.is_some() {
            return self.dispatch_recorded(law, rng, limits);
        }
        let block_unit = if limits.blocking { law.max_jump() } else { None };
        let mut pos = 0i64;
        let mut steps = 0u64;
        loop {
            if steps >= limits.step_cap {
                return Err(Error::CapExceeded {
                    cap: limits.step_cap,
                    steps,
                    position: pos,
                });
            }
            let in_core = -self.left <= pos && pos <= self.right;
            if in_core {
                if let Some(k) = block_unit {
                    let room = (self.right - pos).min(pos + self.left);
                    let n = (room / k) as u64;
                    if n >= MIN_BLOCK {
                        let n = n.min(limits.step_cap - steps);
                        pos += law.sample_sum(n, rng).expect("bounded law");
                        steps += n;
                        continue;
                    }
                }
            }
            pos += law.sample(rng);
            steps += 1;
            if (-self.left <= pos && pos <= self.right) || self.outliers.contains(&pos) {
                continue;
            }
            self.budget_check(limits, steps)?;
            self.steps_total += steps;
            self.settle(pos);
            self.after_dispatch()?;
            return Ok(pos);
        }
    }

    fn dispatch_recorded<R: RngCore + ?Sized>(
        &mut self,
        law: &IncrementLaw,
        rng: &mut R,
        limits: &ClusterLimits,
    ) -> Result<i64> {
        let radius = self.recording.as_ref().map_or(0, |r| r.radius);
        let mut path = vec![0i64];
        let mut pos = 0i64;
        let mut settled = None;
        let mut left_ball = false;
        while settled.is_none() || !left_ball {
            if path.len() as u64 > limits.step_cap {
                return Err(Error::CapExceeded {
                    cap: limits.step_cap,
                    steps: path.len() as u64 - 1,
                    position: pos,
                });
            }
            pos += law.sample(rng);
            path.push(pos);
            if settled.is_none() && !self.contains(pos) {
                settled = Some((pos, path.len() as u64 - 1));
            }
            left_ball |= pos.abs() > radius;
        }
        let (site, tau) = settled.unwrap();
        let steps = path.len() as u64 - 1;
        self.budget_check(limits, steps)?;
        self.steps_total += steps;
        self.settle(site);
        let index = self.m;
        if let Some(rec) = self.recording.as_mut() {
            rec.walks.push(RecordedWalk {
                index,
                settled: site,
                tau,
                path,
            });
        }
        self.after_dispatch()?;
        Ok(site)
    }

    fn after_dispatch(&self) -> Result<()> {
        if cfg!(debug_assertions) || self.m.is_multiple_of(RELEASE_CHECK_PERIOD) {
            self.check_invariants().map_err(|e| Error::Domain(format!("cluster invariant broken: {e}")))?;
        }
        Ok(())
    }

    /// Dispatch walkers until `m_total` have been released, recording
    /// `(m, r_m)` at each checkpoint (checkpoints beyond `m_total` are
    /// ignored; a checkpoint at or below the current `m` records the
    /// current state).
    pub fn run<R: RngCore + ?Sized>(
        &mut self,
        law: &IncrementLaw,
        m_total: u64,
        rng: &mut R,
        checkpoints: &[u64],
        limits: &ClusterLimits,
    ) -> Result<Vec<(u64, u64)>> {
        if m_total == 0 {
            return Err(Error::Domain("m_total must be at least 1".into()));
        }
        let mut marks: Vec<u64> = checkpoints.iter().copied().filter(|&c| c <= m_total).collect();
        marks.sort_unstable();
        marks.dedup();
        let mut out = Vec::with_capacity(marks.len());
        let mut next = marks.into_iter().peekable();
        loop {
            while let Some(&c) = next.peek() {
                if c > self.m {
                    break;
                }
                out.push((self.m.max(c), self.inner_radius()));
                next.next();
            }
            if self.m >= m_total {
                break;
            }
            self.dispatch_one(law, rng, limits)?;
        }
        Ok(out)
    }

    /// Dispatch walkers until the inner radius reaches `x`; returns `σ_x`.
    pub fn run_until_radius<R: RngCore + ?Sized>(
        &mut self,
        law: &IncrementLaw,
        x: u64,
        rng: &mut R,
        limits: &ClusterLimits,
    ) -> Result<u64> {
        while self.inner_radius() < x {
            self.dispatch_one(law, rng, limits)?;
        }
        Ok(self.sigma(x).expect("radius reached"))
    }
}

/// Result of a single IDLA run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub replica: u64,
    pub m_total: u64,
    pub checkpoints: Vec<(u64, u64)>,
    pub coverage: Vec<(u64, u64)>,
    pub steps: u64,
    /// Largest number of occupied sites outside the core seen at a checkpoint.
    pub max_outliers: u64,
    /// Whether the cluster was an interval after every dispatch.
    pub always_interval: bool,
}

/// Counters of the over-filling argument, evaluated on a recording window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Counters {
    pub n_plus: u64,
    pub n_minus: u64,
    pub n_total: u64,
    pub k_plus: u64,
    pub k_minus: u64,
}

/// Evaluate `N^±_{m,k}(t; x)`, `N_{m,k}(t)`, `K^+_{m,k}(t, x, s)` and
/// `K^-_{m,k}(t, x, s)` on the recorded walkers `m+1, …, m+k`.
///
/// `K^-` is evaluated at the site given, so the lemma's `K^-(-t, x, s)` is
/// `counters(.., -t, ..).k_minus`.
pub fn counters(rec: &Recording, m: u64, k: u64, t: i64, x: i64, s: f64) -> Result<Counters> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("s = {s} must exceed 1")));
    }
    let sx = (s * x as f64).floor() as i64;
    if sx > rec.radius {
        return Err(Error::Domain(format!(
            "s·x = {} exceeds recorded radius {}",
            s * x as f64,
            rec.radius
        )));
    }
    let first = rec.walks.first().map_or(u64::MAX, |w| w.index);
    let last = rec.walks.last().map_or(0, |w| w.index);
    if m + 1 < first || m + k > last {
        return Err(Error::Domain(format!(
            "window ({m}, {}] outside recorded walkers [{first}, {last}]",
            m + k
        )));
    }
    let mut c = Counters {
        n_plus: 0,
        n_minus: 0,
        n_total: 0,
        k_plus: 0,
        k_minus: 0,
    };
    for w in &rec.walks[(m + 1 - first) as usize..=(m + k - first) as usize] {
        let eta = w.exit_time(-x, x).expect("recorded past the ball");
        let right = w.path[eta] > x;
        let hit = w.hitting_time(t);
        if hit.is_some_and(|h| h as u64 <= w.tau) {
            c.n_total += 1;
            if right {
                c.n_plus += 1;
            } else {
                c.n_minus += 1;
            }
        }
        if right {
            let exit = w.exit_time(-x, sx).expect("recorded past the ball");
            c.k_plus += u64::from(hit.is_some_and(|h| h < exit));
        } else {
            let exit = w.exit_time(-sx, x).expect("recorded past the ball");
            c.k_minus += u64::from(hit.is_some_and(|h| h < exit));
        }
    }
    Ok(c)
}

/// Map of `x → σ_x` restricted to radii at least `from`.
pub fn coverage_from(log: &[(u64, u64)], from: u64) -> BTreeMap<u64, u64> {
    log.iter().filter(|(x, _)| *x >= from).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::increments::LawSpec;
    use crate::rng::replica_stream;

    fn laws() -> Vec<IncrementLaw> {
        ["simple", "two-step", "skip-free", "stable"]
            .iter()
            .map(|p| IncrementLaw::new(LawSpec::preset(p, Some(1.5)).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn germ() {
        let c = Cluster::new();
        assert_eq!(c.size(), 1);
        assert_eq!(c.inner_radius(), 0);
        assert_eq!(c.sigma(0), Some(0));
        assert_eq!(c.lost_particles(3, 2.0), 0);
        c.check_invariants().unwrap();
    }

    #[test]
    fn first_simple_walker_lands_next_to_origin() {
        for seed in 0..20 {
            let mut c = Cluster::new();
            let s = c
                .dispatch_one(&IncrementLaw::simple(), &mut replica_stream(seed, 0), &ClusterLimits::default())
                .unwrap();
            assert!(s == 1 || s == -1);
        }
    }

    #[test]
    fn invariants_every_dispatch() {
        for (i, law) in laws().iter().enumerate() {
            let mut c = Cluster::new();
            let mut rng = replica_stream(11, i as u64);
            let mut prev = c.occupied();
            for m in 1..=300u64 {
                c.dispatch_one(law, &mut rng, &ClusterLimits::default()).unwrap();
                c.check_invariants().unwrap();
                assert_eq!(c.size(), m + 1);
                let now = c.occupied();
                assert!(prev.iter().all(|z| now.binary_search(z).is_ok()));
                prev = now;
                // inner radius by brute force
                let r = (0..).find(|&r: &i64| !(c.contains(r + 1) && c.contains(-r - 1))).unwrap();
                assert_eq!(r as u64, c.inner_radius());
                assert!(2 * c.inner_radius() <= m);
            }
            for (x, s) in c.coverage_log() {
                assert!(s >= 2 * x);
            }
        }
    }

    #[test]
    fn simple_walk_clusters_are_intervals() {
        let mut c = Cluster::new();
        let mut rng = replica_stream(12, 0);
        for m in 1..=2000u64 {
            c.dispatch_one(&IncrementLaw::simple(), &mut rng, &ClusterLimits::default()).unwrap();
            assert!(c.is_interval());
            let (lo, hi) = c.core();
            assert_eq!((hi - lo) as u64, m);
        }
    }

    #[test]
    fn inversion_holds_at_checkpoints() {
        let law = IncrementLaw::new(LawSpec::stable(1.5)).unwrap();
        let mut c = Cluster::new();
        let marks: Vec<u64> = (1..=40).map(|i| i * 25).collect();
        let traj = c
            .run(&law, 1000, &mut replica_stream(13, 0), &marks, &ClusterLimits::default())
            .unwrap();
        assert_eq!(traj.len(), marks.len());
        for &(m, r) in &traj {
            for (x, s) in c.coverage_log() {
                assert_eq!(s <= m, r >= x, "x = {x}, σ = {s}, m = {m}, r = {r}");
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let law = IncrementLaw::new(LawSpec::two_step()).unwrap();
        let go = || {
            let mut c = Cluster::new();
            c.run(&law, 500, &mut replica_stream(14, 3), &[100, 500], &ClusterLimits::default())
                .unwrap();
            (c.occupied(), c.coverage_log())
        };
        assert_eq!(go(), go());
    }

    #[test]
    fn lost_particles_partition() {
        let law = IncrementLaw::new(LawSpec::stable(1.5)).unwrap();
        let mut c = Cluster::new();
        c.run(&law, 400, &mut replica_stream(15, 0), &[], &ClusterLimits::default())
            .unwrap();
        let occ = c.occupied();
        let mut prev = u64::MAX;
        for a in [1.0, 1.5, 2.0, 3.0, 5.0, 10.0] {
            let x = 10;
            let lost = c.lost_particles(x, a);
            let inside = occ.iter().filter(|&&z| (z as f64).abs() <= a * x as f64).count() as u64;
            assert_eq!(lost + inside, c.size());
            assert!(lost <= prev);
            prev = lost;
        }
    }

    #[test]
    fn budget_and_cap() {
        let law = IncrementLaw::simple();
        let mut c = Cluster::new();
        let limits = ClusterLimits {
            step_budget: Some(1000),
            ..ClusterLimits::default()
        };
        let err = c.run(&law, 10_000, &mut replica_stream(16, 0), &[], &limits).unwrap_err();
        assert!(matches!(err, Error::BudgetExhausted { budget: 1000, .. }));
        let mut c = Cluster::new();
        c.run(&law, 50, &mut replica_stream(16, 1), &[], &ClusterLimits::default()).unwrap();
        let limits = ClusterLimits {
            step_cap: 3,
            ..ClusterLimits::default()
        };
        let mut rng = replica_stream(16, 2);
        assert!((0..50).any(|_| matches!(c.dispatch_one(&law, &mut rng, &limits), Err(Error::CapExceeded { .. }))));
    }

    #[test]
    fn recorded_counters() {
        let law = IncrementLaw::new(LawSpec::stable(1.5)).unwrap();
        let mut c = Cluster::new();
        let mut rng = replica_stream(17, 0);
        let x = 8u64;
        let s = 2.0;
        let sigma_x = c.run_until_radius(&law, x, &mut rng, &ClusterLimits::default()).unwrap();
        let before = c.clone();
        c.start_recording((s * x as f64).ceil() as i64);
        let k = 60;
        for _ in 0..k {
            c.dispatch_one(&law, &mut rng, &ClusterLimits::default()).unwrap();
        }
        let rec = c.take_recording().unwrap();
        assert_eq!(rec.walks.len() as u64, k);
        for w in &rec.walks {
            assert_eq!(w.path[w.tau as usize], w.settled);
        }
        for t in -30..=30i64 {
            let ct = counters(&rec, sigma_x, k, t, x as i64, s).unwrap();
            assert_eq!(ct.n_total, ct.n_plus + ct.n_minus);
            for x2 in [1, 4, 8] {
                let c2 = counters(&rec, sigma_x, k, t, x2, s).unwrap();
                assert_eq!(c2.n_total, ct.n_total);
            }
            if !before.contains(t) {
                assert_eq!(c.contains(t), ct.n_total > 0, "t = {t}");
            }
        }
        assert!(counters(&rec, sigma_x, k + 1, 0, x as i64, s).is_err());
        assert!(counters(&rec, sigma_x, k, 0, x as i64, 3.0).is_err());
    }
}
