//! Single walks under stopping rules: exit from an interval, hitting a target
//! before exit, and first passage over a level.
//!
//! For laws with bounded support the walker advances in exact blocks: when
//! the current position is at least `n · max_jump` away from every stopping
//! boundary, the next `n` steps cannot trigger the stopping rule, so their sum
//! is drawn in one go from the multinomial split of the law (see
//! [`IncrementLaw::sample_sum`]). Step counts remain exact. Blocking consumes
//! randomness differently from step-by-step simulation, so it is switched off
//! whenever a path is traced or replayed.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::increments::IncrementLaw;

/// Default per-walk step cap.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000_000;

/// Blocks shorter than this are not worth the multinomial draw.
const MIN_BLOCK: u64 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ExitedLeft,
    ExitedRight,
    HitTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkOutcome {
    pub terminal_site: i64,
    pub steps: u64,
    pub verdict: Verdict,
    /// Distance past the crossed endpoint; zero for [`Verdict::HitTarget`].
    pub overshoot: u64,
    /// Full path `S_0, …, S_steps` in trace mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<i64>>,
}

/// Closed integer interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// Integer points of `[-c·n, n]`; the real endpoint `-c·n` is rounded
    /// toward the interior.
    pub fn scaled(c: f64, n: i64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::Domain(format!("c = {c} must be a nonnegative real")));
        }
        Self::new((-c * n as f64).ceil() as i64, n)
    }

    /// `[-r, r]`.
    pub fn symmetric(r: i64) -> Self {
        Self { lo: -r, hi: r }
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOptions {
    pub step_cap: u64,
    /// Allow exact block stepping for bounded laws.
    pub blocking: bool,
    /// Record the full path (implies no blocking).
    pub trace: bool,
}

impl Default for WalkOptions {
    fn default() -> Self {
        Self {
            step_cap: DEFAULT_STEP_CAP,
            blocking: true,
            trace: false,
        }
    }
}

impl WalkOptions {
    pub fn with_cap(step_cap: u64) -> Self {
        Self {
            step_cap,
            ..Self::default()
        }
    }

    /// Plain step-by-step simulation, so equal seeds give equal paths
    /// regardless of the stopping rule.
    pub fn stepwise() -> Self {
        Self {
            blocking: false,
            ..Self::default()
        }
    }

    pub fn traced() -> Self {
        Self {
            blocking: false,
            trace: true,
            ..Self::default()
        }
    }

    fn block_len(&self, law: &IncrementLaw, room: i64, steps: u64) -> u64 {
        if !self.blocking || self.trace || room <= 0 {
            return 1;
        }
        match law.max_jump() {
            Some(k) if k > 0 => {
                let n = (room / k) as u64;
                if n >= MIN_BLOCK {
                    n.min(self.step_cap - steps)
                } else {
                    1
                }
            }
            _ => 1,
        }
    }
}

struct Cursor<'a, R: RngCore + ?Sized> {
    law: &'a IncrementLaw,
    rng: &'a mut R,
    pos: i64,
    steps: u64,
    path: Option<Vec<i64>>,
    opts: WalkOptions,
}

impl<'a, R: RngCore + ?Sized> Cursor<'a, R> {
    fn new(law: &'a IncrementLaw, start: i64, rng: &'a mut R, opts: WalkOptions) -> Self {
        Self {
            law,
            rng,
            pos: start,
            steps: 0,
            path: opts.trace.then(|| vec![start]),
            opts,
        }
    }

    /// Advance by one step, or by an exact block when `room` allows it.
    #[inline]
    fn advance(&mut self, room: i64) -> Result<()> {
        if self.steps >= self.opts.step_cap {
            return Err(Error::CapExceeded {
                cap: self.opts.step_cap,
                steps: self.steps,
                position: self.pos,
            });
        }
        let n = self.opts.block_len(self.law, room, self.steps);
        if n > 1 {
            self.pos += self
                .law
                .sample_sum(n, self.rng)
                .expect("blocking only for bounded laws");
            self.steps += n;
        } else {
            self.pos += self.law.sample(self.rng);
            self.steps += 1;
            if let Some(p) = self.path.as_mut() {
                p.push(self.pos);
            }
        }
        Ok(())
    }

    fn exit_outcome(self, interval: Interval) -> WalkOutcome {
        let (verdict, overshoot) = if self.pos > interval.hi {
            (Verdict::ExitedRight, (self.pos - interval.hi) as u64)
        } else {
            (Verdict::ExitedLeft, (interval.lo - self.pos) as u64)
        };
        WalkOutcome {
            terminal_site: self.pos,
            steps: self.steps,
            verdict,
            overshoot,
            path: self.path,
        }
    }
}

/// Walk from `start` until the first time it leaves `interval`.
pub fn run_until_exit<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    start: i64,
    interval: Interval,
    rng: &mut R,
    opts: WalkOptions,
) -> Result<WalkOutcome> {
    let mut c = Cursor::new(law, start, rng, opts);
    while interval.contains(c.pos) {
        let room = (interval.hi - c.pos).min(c.pos - interval.lo);
        c.advance(room)?;
    }
    Ok(c.exit_outcome(interval))
}

/// Walk from `start` until it either visits `target` or leaves `interval`,
/// whichever comes first. Starting on the target counts as a hit at step 0.
pub fn run_hit_or_exit<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    start: i64,
    target: i64,
    interval: Interval,
    rng: &mut R,
    opts: WalkOptions,
) -> Result<WalkOutcome> {
    if !interval.contains(target) {
        return Err(Error::Domain(format!(
            "target {target} outside [{}, {}]",
            interval.lo, interval.hi
        )));
    }
    let mut c = Cursor::new(law, start, rng, opts);
    loop {
        if c.pos == target {
            return Ok(WalkOutcome {
                terminal_site: c.pos,
                steps: c.steps,
                verdict: Verdict::HitTarget,
                overshoot: 0,
                path: c.path,
            });
        }
        if !interval.contains(c.pos) {
            return Ok(c.exit_outcome(interval));
        }
        let room = (interval.hi - c.pos)
            .min(c.pos - interval.lo)
            .min((c.pos - target).abs() - 1);
        c.advance(room)?;
    }
}

/// First passage strictly above `level`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Passage {
    /// `S_ρ - level ≥ 1`.
    pub overshoot: u64,
    pub steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<i64>>,
}

/// Walk from `start ≤ level` until the first `n` with `S_n > level`.
pub fn first_passage_over<R: RngCore + ?Sized>(
    law: &IncrementLaw,
    start: i64,
    level: i64,
    rng: &mut R,
    opts: WalkOptions,
) -> Result<Passage> {
    if start > level {
        return Err(Error::Domain(format!("start {start} above level {level}")));
    }
    let up = law.max_up_jump().unwrap_or(1).max(1);
    let mut c = Cursor::new(law, start, rng, opts);
    while c.pos <= level {
        // only upward jumps can cross, so the room is measured in units of the largest one
        let room = (level - c.pos) / up * law.max_jump().unwrap_or(1);
        c.advance(room)?;
    }
    Ok(Passage {
        overshoot: (c.pos - level) as u64,
        steps: c.steps,
        path: c.path,
    })
}
