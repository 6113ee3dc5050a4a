//! CTC beam search with bounded storage.
//!
//! The retained beam `b_hat` holds at most `W` sentences. Candidates for the
//! next step live in `b`, which stores probabilities and the language-model
//! pointer but no sentence: each candidate instead remembers the `b_hat` slot
//! it grew from (`a1`) and the label it appended (`a2`, 0 for none). After
//! both phases of a step, [`BeamState::update_bhat`] rewrites `b_hat` in place
//! from those two arrays, copying as few sentences as possible.
//!
//! A step runs four phases:
//!
//! 1. every retained sentence is extended by every label; extensions enter
//!    `b` by replacing the current minimum when strictly larger. Extensions
//!    that reproduce another retained sentence are also parked in `b3`;
//! 2. every retained sentence is carried over (blank or repeated last
//!    label), merging into its extension twin in `b` when one survived;
//! 3. `b_hat` is rebuilt from `b`;
//! 4. all probabilities are scaled by a common power of two so the largest
//!    stays at or above `P_l`.

mod arith;

pub use arith::{Arith, ExactArith, FixedArith};

use crate::dict::CompiledDict;
use crate::error::DecodeError;
use crate::fixedpoint::DEFAULT_Q;
use crate::lm::{extend_probs_into, DictPtr, ExtensionVerdict};

const HASH_MUL: u64 = 0x9E37_79B9_7F4A_7C15;

fn hash_append(h: u64, label: u16) -> u64 {
    h.wrapping_mul(HASH_MUL).wrapping_add(label as u64 + 1)
}

/// Slot choice among equal minima when a candidate replaces the minimum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    LowestSlot,
    HighestSlot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeConfig {
    /// Beam width `W`.
    pub w: usize,
    /// Fractional bits of fixed-point probabilities.
    pub q: u8,
    /// Optional cap on the number of frames.
    pub t_max: Option<usize>,
    /// Number of labels `K`, separator included, blank excluded.
    pub k: usize,
    pub adjust: bool,
    pub use_lm: bool,
    /// `P_l = 2^pl_exponent`.
    pub pl_exponent: i32,
    pub tie_break: TieBreak,
}

impl DecodeConfig {
    pub fn new(k: usize, w: usize) -> Self {
        Self {
            w,
            q: DEFAULT_Q,
            t_max: None,
            k,
            adjust: true,
            use_lm: false,
            pl_exponent: pl_exponent_for(w),
            tie_break: TieBreak::LowestSlot,
        }
    }

    pub fn with_lm(mut self, use_lm: bool) -> Self {
        self.use_lm = use_lm;
        self
    }

    pub fn with_adjust(mut self, adjust: bool) -> Self {
        self.adjust = adjust;
        self
    }

    pub fn with_q(mut self, q: u8) -> Self {
        self.q = q;
        self
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |m: String| Err(DecodeError::Config(m));
        if self.w == 0 || self.w > u16::MAX as usize {
            return bad(format!("beam width {} out of range", self.w));
        }
        if self.k < 1 || self.k > u16::MAX as usize - 1 {
            return bad(format!("label count {} out of range", self.k));
        }
        if self.q == 0 || self.q > 31 {
            return bad(format!("q = {} must lie in 1..=31", self.q));
        }
        let n = self.pl_exponent;
        // 1/(4W) < 2^n <= 1/(2W), n <= -1
        let ok = (-62..=-1).contains(&n) && {
            let inv = 1u64 << (-n);
            (2 * self.w as u64) <= inv && inv < 4 * self.w as u64
        };
        if !ok {
            return bad(format!(
                "pl_exponent {n} violates 1/(4W) < 2^n <= 1/(2W) for W = {}",
                self.w
            ));
        }
        if self.t_max == Some(0) {
            return bad("t_max must be positive".into());
        }
        Ok(())
    }
}

/// The unique `n` with `1/(4W) < 2^n <= 1/(2W)`.
pub fn pl_exponent_for(w: usize) -> i32 {
    -(crate::alphabet::ceil_log2(2 * w as u64) as i32)
}

/// One retained hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamSlot<P> {
    pub pr: P,
    pub pr_plus: P,
    pub pr_minus: P,
    pub sl: DictPtr,
    pub sentence: Vec<u16>,
    pub occupied: bool,
    hash: u64,
    prefix_hash: u64,
}

impl<P: Copy> BeamSlot<P> {
    fn empty(zero: P) -> Self {
        Self {
            pr: zero,
            pr_plus: zero,
            pr_minus: zero,
            sl: DictPtr::ROOT,
            sentence: Vec::new(),
            occupied: false,
            hash: 0,
            prefix_hash: 0,
        }
    }

    pub fn last_label(&self) -> Option<u16> {
        self.sentence.last().copied()
    }

    fn push_label(&mut self, label: u16) {
        self.prefix_hash = self.hash;
        self.hash = hash_append(self.hash, label);
        self.sentence.push(label);
    }

    fn clear(&mut self, zero: P) {
        self.pr = zero;
        self.pr_plus = zero;
        self.pr_minus = zero;
        self.sl = DictPtr::ROOT;
        self.sentence.clear();
        self.occupied = false;
        self.hash = 0;
        self.prefix_hash = 0;
    }

    /// Builds an occupied slot holding `sentence`.
    pub fn with_sentence(sentence: &[u16], pr_plus: P, pr_minus: P, pr: P) -> Self {
        let mut slot = Self::empty(pr);
        slot.pr_plus = pr_plus;
        slot.pr_minus = pr_minus;
        for &l in sentence {
            slot.push_label(l);
        }
        slot.occupied = true;
        slot
    }
}

/// Sentence-free candidate in `b`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Candidate<P> {
    pub pr: P,
    pub pr_plus: P,
    pub pr_minus: P,
    pub sl: DictPtr,
    pub occupied: bool,
}

/// The complete decoder storage. Slot indices are 0-based; in `a2`, `b2`
/// and `pending_append` the label 0 means "none".
#[derive(Clone, Debug)]
pub struct BeamState<P> {
    pub b_hat: Vec<BeamSlot<P>>,
    pub b: Vec<Candidate<P>>,
    /// Slot holding this slot's sentence minus its last label.
    pub b1: Vec<Option<usize>>,
    /// Last label of the slot's sentence when `b1` is set.
    pub b2: Vec<u16>,
    /// Extension probability of `b_hat[b1[i]]` by `b2[i]`.
    pub b3: Vec<P>,
    /// Source slot of each candidate.
    pub a1: Vec<usize>,
    /// Label each candidate appended, or 0.
    pub a2: Vec<u16>,
    /// Candidate `i` was written back in place.
    pub c: Vec<bool>,
    /// Slot `i` has been claimed during the current update.
    pub d: Vec<bool>,
    pub pending_append: Vec<u16>,
    pub t: usize,
}

impl<P: Copy + PartialOrd> BeamState<P> {
    pub fn new(w: usize, zero: P, one: P) -> Self {
        let empty = Candidate {
            pr: zero,
            pr_plus: zero,
            pr_minus: zero,
            sl: DictPtr::ROOT,
            occupied: false,
        };
        let mut b_hat = vec![BeamSlot::empty(zero); w];
        // the empty sentence, all of its mass on blank-ending paths
        b_hat[0].pr = one;
        b_hat[0].pr_minus = one;
        b_hat[0].occupied = true;
        Self {
            b_hat,
            b: vec![empty; w],
            b1: vec![None; w],
            b2: vec![0; w],
            b3: vec![zero; w],
            a1: vec![0; w],
            a2: vec![0; w],
            c: vec![false; w],
            d: vec![false; w],
            pending_append: vec![0; w],
            t: 0,
        }
    }

    pub fn width(&self) -> usize {
        self.b_hat.len()
    }

    /// Fills `b1`/`b2`: slot `i` gets `b1[i] = j` when its sentence is slot
    /// `j`'s sentence plus one label.
    pub fn prefix_scan(&mut self) {
        let w = self.width();
        for i in 0..w {
            self.b1[i] = None;
            self.b2[i] = 0;
        }
        if w <= 32 {
            for i in 0..w {
                let si = &self.b_hat[i];
                if !si.occupied || si.sentence.is_empty() {
                    continue;
                }
                let len = si.sentence.len();
                for j in 0..w {
                    let sj = &self.b_hat[j];
                    if j == i || !sj.occupied || sj.sentence.len() + 1 != len {
                        continue;
                    }
                    if si.prefix_hash == sj.hash && si.sentence[..len - 1] == sj.sentence[..] {
                        self.b1[i] = Some(j);
                        self.b2[i] = si.sentence[len - 1];
                        break;
                    }
                }
            }
        } else {
            let mut by_hash: std::collections::HashMap<(usize, u64), Vec<usize>> =
                std::collections::HashMap::with_capacity(w);
            for (j, s) in self.b_hat.iter().enumerate() {
                if s.occupied {
                    by_hash.entry((s.sentence.len(), s.hash)).or_default().push(j);
                }
            }
            for i in 0..w {
                let si = &self.b_hat[i];
                if !si.occupied || si.sentence.is_empty() {
                    continue;
                }
                let len = si.sentence.len();
                if let Some(js) = by_hash.get(&(len - 1, si.prefix_hash)) {
                    if let Some(&j) = js
                        .iter()
                        .find(|&&j| self.b_hat[j].sentence[..] == si.sentence[..len - 1])
                    {
                        self.b1[i] = Some(j);
                        self.b2[i] = si.sentence[len - 1];
                    }
                }
            }
        }
    }

    /// Rebuilds `b_hat` from the candidates in `b`, `a1` and `a2`.
    pub fn update_bhat(&mut self, zero: P) {
        self.claim_in_place();
        self.relocate(zero);
    }

    /// First pass: every candidate whose source slot is still unclaimed is
    /// written back into that slot. Appends are deferred to
    /// `pending_append` so later candidates still see the base sentence.
    pub fn claim_in_place(&mut self) {
        let w = self.width();
        self.c.iter_mut().for_each(|x| *x = false);
        self.d.iter_mut().for_each(|x| *x = false);
        self.pending_append.iter_mut().for_each(|x| *x = 0);
        for i in 0..w {
            if !self.b[i].occupied {
                continue;
            }
            let src = self.a1[i];
            if !self.d[src] {
                self.write_probs(src, i);
                if self.a2[i] > 0 {
                    self.pending_append[src] = self.a2[i];
                }
                self.d[src] = true;
                self.c[i] = true;
            }
        }
    }

    /// Second pass: remaining candidates go to the lowest unclaimed slots,
    /// copying their source's base sentence. Then deferred appends are
    /// applied and unclaimed slots are released.
    pub fn relocate(&mut self, zero: P) {
        let w = self.width();
        // the lowest free slot only moves upward during this loop
        let mut free = 0;
        for i in 0..w {
            if !self.b[i].occupied || self.c[i] {
                continue;
            }
            while self.d[free] {
                free += 1;
            }
            let j = free;
            let src = self.a1[i];
            self.write_probs(j, i);
            let base = std::mem::take(&mut self.b_hat[src].sentence);
            self.b_hat[j].sentence.clone_from(&base);
            self.b_hat[j].hash = self.b_hat[src].hash;
            self.b_hat[j].prefix_hash = self.b_hat[src].prefix_hash;
            self.b_hat[src].sentence = base;
            if self.a2[i] > 0 {
                self.b_hat[j].push_label(self.a2[i]);
            }
            self.d[j] = true;
        }
        for j in 0..w {
            if self.pending_append[j] > 0 {
                let label = self.pending_append[j];
                self.b_hat[j].push_label(label);
                self.pending_append[j] = 0;
            }
            if !self.d[j] {
                self.b_hat[j].clear(zero);
            }
        }
    }

    fn write_probs(&mut self, slot: usize, cand: usize) {
        let c = self.b[cand];
        let s = &mut self.b_hat[slot];
        s.pr = c.pr;
        s.pr_plus = c.pr_plus;
        s.pr_minus = c.pr_minus;
        s.sl = c.sl;
        s.occupied = true;
    }

    /// Index of the most probable occupied slot; lowest index on ties.
    pub fn best_slot(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, s) in self.b_hat.iter().enumerate() {
            if s.occupied && best.is_none_or(|b| s.pr > self.b_hat[b].pr) {
                best = Some(i);
            }
        }
        best
    }

    pub fn occupied(&self) -> impl Iterator<Item = (usize, &BeamSlot<P>)> {
        self.b_hat.iter().enumerate().filter(|(_, s)| s.occupied)
    }
}

/// Extension probability of `slot` by `label`: the label's frame
/// probability times `Pr-` when the label repeats the slot's last label,
/// otherwise times `Pr`. Zero when the language model forbids the label.
pub fn extension_probability<A: Arith>(
    arith: &A,
    label: u16,
    slot: &BeamSlot<A::P>,
    p_label: A::P,
    lm_allowed: bool,
) -> A::P {
    if !lm_allowed {
        return arith.zero();
    }
    let base = if slot.last_label() == Some(label) {
        slot.pr_minus
    } else {
        slot.pr
    };
    arith.mul(p_label, base)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Left shift applied by the adjustment at each step.
    pub shifts: Vec<i32>,
    pub saturations: u64,
}

impl Diagnostics {
    /// `log2` of the common scale factor accumulated so far.
    pub fn total_shift(&self) -> i64 {
        self.shifts.iter().map(|&s| s as i64).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutput {
    pub sentence: Vec<u16>,
    /// Probability of the returned sentence as stored (after any scaling).
    pub score: f64,
    pub diagnostics: Diagnostics,
}

/// Streaming decoder: feed one probability vector per frame.
pub struct BeamDecoder<'d, A: Arith> {
    config: DecodeConfig,
    arith: A,
    dict: Option<&'d CompiledDict>,
    state: BeamState<A::P>,
    verdict: ExtensionVerdict,
    ext: Vec<A::P>,
    scratch: Scratch,
    diagnostics: Diagnostics,
}

/// Per-step bookkeeping that only speeds up lookups otherwise done by
/// linear search: the slots whose prefix is a given slot, and where in `b`
/// each slot's extension twin currently sits.
#[derive(Clone, Debug)]
struct Scratch {
    child_head: Vec<Option<usize>>,
    child_next: Vec<Option<usize>>,
    twin: Vec<Option<usize>>,
    owner: Vec<Option<usize>>,
    filled: usize,
}

impl Scratch {
    fn new(w: usize) -> Self {
        Self {
            child_head: vec![None; w],
            child_next: vec![None; w],
            twin: vec![None; w],
            owner: vec![None; w],
            filled: 0,
        }
    }
}

impl<'d, A: Arith> BeamDecoder<'d, A> {
    pub fn new(
        config: DecodeConfig,
        arith: A,
        dict: Option<&'d CompiledDict>,
    ) -> Result<Self, DecodeError> {
        config.validate()?;
        if config.use_lm {
            let dict =
                dict.ok_or_else(|| DecodeError::Config("use_lm requires a dictionary".into()))?;
            if dict.k() != config.k {
                return Err(DecodeError::Config(format!(
                    "dictionary has K = {}, frames have K = {}",
                    dict.k(),
                    config.k
                )));
            }
        }
        let state = BeamState::new(config.w, arith.zero(), arith.one());
        let inv = dict.map_or(u32::MAX, |d| d.inv());
        Ok(Self {
            verdict: ExtensionVerdict::new(config.k, inv),
            ext: vec![arith.zero(); config.k],
            scratch: Scratch::new(config.w),
            config,
            arith,
            dict,
            state,
            diagnostics: Diagnostics::default(),
        })
    }

    pub fn config(&self) -> &DecodeConfig {
        &self.config
    }

    pub fn arith(&self) -> &A {
        &self.arith
    }

    pub fn state(&self) -> &BeamState<A::P> {
        &self.state
    }

    pub fn diagnostics(&self) -> &Diagnostics {
        &self.diagnostics
    }

    /// Consumes one frame: `K` label probabilities followed by the blank.
    pub fn step(&mut self, probs: &[A::P]) -> Result<(), DecodeError> {
        self.step_phases(probs)?;
        let zero = self.arith.zero();
        self.state.update_bhat(zero);
        self.finish_step()
    }

    /// Phases 1 and 2 only; `b`, `a1` and `a2` are left for inspection.
    /// Follow with [`BeamState::update_bhat`] on [`Self::state_mut`] and
    /// then [`Self::finish_step`].
    pub fn step_phases(&mut self, probs: &[A::P]) -> Result<(), DecodeError> {
        let k = self.config.k;
        if probs.len() != k + 1 {
            return Err(DecodeError::FrameWidth {
                step: self.state.t,
                got: probs.len(),
                expected: k + 1,
            });
        }
        if let Some(max) = self.config.t_max {
            if self.state.t >= max {
                return Err(DecodeError::TooLong {
                    got: self.state.t + 1,
                    max,
                });
            }
        }
        self.state.prefix_scan();
        self.extend(probs)?;
        self.carry_over(probs);
        Ok(())
    }

    pub fn state_mut(&mut self) -> &mut BeamState<A::P> {
        &mut self.state
    }

    /// Adjustment and bookkeeping after the update of `b_hat`.
    pub fn finish_step(&mut self) -> Result<(), DecodeError> {
        let shift = if self.config.adjust {
            self.adjust_probs()?
        } else {
            if self.state.best_slot().is_none() {
                return Err(DecodeError::BeamCollapse { step: self.state.t });
            }
            0
        };
        self.diagnostics.shifts.push(shift);
        self.diagnostics.saturations = self.arith.saturations();
        self.state.t += 1;
        Ok(())
    }

    /// Slot of `min(Pr)` over `b`. Occupied candidates always have a
    /// positive probability, so while `b` has room the minimum is the next
    /// free slot.
    fn min_candidate(&self) -> usize {
        let w = self.config.w;
        let filled = self.scratch.filled;
        if filled < w {
            return match self.config.tie_break {
                TieBreak::LowestSlot => filled,
                TieBreak::HighestSlot => w - 1 - filled,
            };
        }
        let b = &self.state.b;
        let mut mi = 0;
        for j in 1..w {
            let better = match self.config.tie_break {
                TieBreak::LowestSlot => b[j].pr < b[mi].pr,
                TieBreak::HighestSlot => b[j].pr <= b[mi].pr,
            };
            if better {
                mi = j;
            }
        }
        mi
    }

    fn place(&mut self, m: usize, cand: Candidate<A::P>, src: usize, label: u16) {
        if let Some(j) = self.scratch.owner[m].take() {
            self.scratch.twin[j] = None;
        }
        if !self.state.b[m].occupied {
            self.scratch.filled += 1;
        }
        self.state.b[m] = cand;
        self.state.a1[m] = src;
        self.state.a2[m] = label;
    }

    /// Phase 1: every retained sentence extended by every label.
    fn extend(&mut self, probs: &[A::P]) -> Result<(), DecodeError> {
        let zero = self.arith.zero();
        let w = self.config.w;
        let k = self.config.k;
        let empty = Candidate {
            pr: zero,
            pr_plus: zero,
            pr_minus: zero,
            sl: DictPtr::ROOT,
            occupied: false,
        };
        let sc = &mut self.scratch;
        sc.filled = 0;
        for j in 0..w {
            self.state.b[j] = empty;
            self.state.b3[j] = zero;
            self.state.a1[j] = 0;
            self.state.a2[j] = 0;
            sc.twin[j] = None;
            sc.owner[j] = None;
            sc.child_head[j] = None;
            sc.child_next[j] = None;
        }
        for j in (0..w).rev() {
            if let Some(p) = self.state.b1[j] {
                sc.child_next[j] = sc.child_head[p];
                sc.child_head[p] = Some(j);
            }
        }

        let mut mi = self.min_candidate();
        for i in 0..w {
            if !self.state.b_hat[i].occupied {
                continue;
            }
            if self.config.use_lm {
                let dict = self.dict.expect("checked at construction");
                extend_probs_into(dict, self.state.b_hat[i].sl, &mut self.verdict)?;
            }
            for label in 1..=k as u16 {
                let allowed = !self.config.use_lm || self.verdict.is_allowed(label);
                let temp = extension_probability(
                    &self.arith,
                    label,
                    &self.state.b_hat[i],
                    probs[label as usize - 1],
                    allowed,
                );
                self.ext[label as usize - 1] = temp;
                if temp > self.state.b[mi].pr {
                    let sl = if self.config.use_lm {
                        self.verdict.next(label)
                    } else {
                        DictPtr::ROOT
                    };
                    let cand = Candidate {
                        pr: temp,
                        pr_plus: temp,
                        pr_minus: zero,
                        sl,
                        occupied: true,
                    };
                    self.place(mi, cand, i, label);
                    let mut c = self.scratch.child_head[i];
                    while let Some(j) = c {
                        if self.state.b2[j] == label {
                            self.scratch.twin[j] = Some(mi);
                            self.scratch.owner[mi] = Some(j);
                            break;
                        }
                        c = self.scratch.child_next[j];
                    }
                    mi = self.min_candidate();
                }
            }
            let mut c = self.scratch.child_head[i];
            while let Some(j) = c {
                self.state.b3[j] = self.ext[self.state.b2[j] as usize - 1];
                c = self.scratch.child_next[j];
            }
        }
        Ok(())
    }

    /// Phase 2: every retained sentence continued without a new label.
    fn carry_over(&mut self, probs: &[A::P]) {
        let w = self.config.w;
        let blank = probs[self.config.k];
        let mut mi = self.min_candidate();
        for i in 0..w {
            let slot = &self.state.b_hat[i];
            if !slot.occupied {
                continue;
            }
            let temp_minus = self.arith.mul(slot.pr, blank);
            let repeat = match slot.last_label() {
                Some(l) => self.arith.mul(slot.pr_plus, probs[l as usize - 1]),
                None => self.arith.zero(),
            };
            let temp_plus = self.arith.add(repeat, self.state.b3[i]);
            let temp = self.arith.add(temp_minus, temp_plus);
            let sl = slot.sl;

            if let Some(m) = self.scratch.twin[i] {
                debug_assert_eq!(Some(self.state.a1[m]), self.state.b1[i]);
                debug_assert_eq!(self.state.a2[m], self.state.b2[i]);
                let c = &mut self.state.b[m];
                c.pr_minus = temp_minus;
                c.pr_plus = temp_plus;
                c.pr = temp;
                c.sl = sl;
                if m == mi {
                    mi = self.min_candidate();
                }
            } else if temp > self.state.b[mi].pr {
                let cand = Candidate {
                    pr: temp,
                    pr_plus: temp_plus,
                    pr_minus: temp_minus,
                    sl,
                    occupied: true,
                };
                self.place(mi, cand, i, 0);
                mi = self.min_candidate();
            }
        }
    }

    /// Phase 4: scales every probability by `2^s` so the maximum reaches
    /// `[P_l, 2 P_l)` whenever it has fallen below `P_l`. Returns `s`.
    pub fn adjust_probs(&mut self) -> Result<i32, DecodeError> {
        let collapse = DecodeError::BeamCollapse { step: self.state.t };
        let best = self.state.best_slot().ok_or(collapse.clone())?;
        let lead = self
            .arith
            .leading_one(self.state.b_hat[best].pr)
            .ok_or(collapse)?;
        if lead >= self.config.pl_exponent {
            return Ok(0);
        }
        let s = self.config.pl_exponent - lead;
        for slot in self.state.b_hat.iter_mut().filter(|s| s.occupied) {
            slot.pr = self.arith.shift(slot.pr, s);
            slot.pr_plus = self.arith.shift(slot.pr_plus, s);
            slot.pr_minus = self.arith.shift(slot.pr_minus, s);
        }
        Ok(s)
    }

    /// Current best hypothesis.
    pub fn best(&self) -> Option<(&[u16], A::P)> {
        self.state
            .best_slot()
            .map(|i| (&self.state.b_hat[i].sentence[..], self.state.b_hat[i].pr))
    }

    pub fn finish(self) -> Result<DecodeOutput, DecodeError> {
        let i = self
            .state
            .best_slot()
            .ok_or(DecodeError::BeamCollapse { step: self.state.t })?;
        let slot = &self.state.b_hat[i];
        Ok(DecodeOutput {
            sentence: slot.sentence.clone(),
            score: self.arith.to_f64(slot.pr),
            diagnostics: self.diagnostics,
        })
    }
}

/// Runs a full decode over `frames`.
pub fn decode<A: Arith, F: AsRef<[A::P]>>(
    frames: &[F],
    dict: Option<&CompiledDict>,
    config: &DecodeConfig,
    arith: A,
) -> Result<DecodeOutput, DecodeError> {
    if frames.is_empty() {
        return Err(DecodeError::NoFrames);
    }
    if let Some(max) = config.t_max {
        if frames.len() > max {
            return Err(DecodeError::TooLong {
                got: frames.len(),
                max,
            });
        }
    }
    let mut dec = BeamDecoder::new(config.clone(), arith, dict)?;
    for f in frames {
        dec.step(f.as_ref())?;
    }
    dec.finish()
}
