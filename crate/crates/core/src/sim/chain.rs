//! Event-skipping engine for an N-level repeater chain.
//!
//! Each time unit `t` is processed in four phases:
//!
//! 1. idle links older than `tau` are dropped and their elements return to
//!    vacuum;
//! 2. every vacuum element pair of every segment attempts generation with
//!    probability `P_0` (unless generation is paused, see
//!    [`RepeaterParams::concurrent_generation`]); new links are usable at once;
//! 3. connection attempts whose classical signal arrives at `t` resolve: on
//!    success the outer elements carry a link one level up, which becomes
//!    eligible for the next level at `t + 1`; on failure all four elements
//!    return to vacuum. Released elements attempt generation from `t + 1`;
//! 4. at every node, eligible links meeting there are paired by the policy
//!    and a connection attempt is launched that resolves `level_latency`
//!    units later.
//!
//! Only the two end elements of a link still hold quantum state; inner
//! elements were measured out by the connections that built it. Each end
//! element keeps the time it was first entangled, and a link is usable at
//! `t` iff both ends are, i.e. `t - created_at <= tau` with `created_at`
//! the older of the two. A link consumed by a connection attempt is no
//! longer subject to expiry.
//!
//! Between steps where something can change the state is frozen, so the
//! engine jumps straight to the next step with a generation success, an
//! expiry, a resolution or a newly eligible link. Generation is sampled by
//! geometric skips over the sequence of `(step, free pair)` trials.

use alloc::collections::BinaryHeap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt::Write as _;

use crate::model::{Architecture, ElementState, MemoryElement, RepeaterParams, TimeUnits};
use crate::rng::CounterRng;

const NONE: u32 = u32::MAX;

type LinkId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LinkState {
    /// Created by a connection this step; eligible from `eligible_from`.
    Pending,
    /// Registered at its block, waiting for a partner.
    Idle,
    /// Consumed by an in-flight connection attempt.
    InFlight,
    Free,
}

/// A live entangled link between two end elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    /// Doubling level; spans `2^level` segments.
    pub level: u32,
    /// Block index at this level: segments `block << level ..`.
    pub block: u32,
    /// Address of the left end element (in the first segment of the block).
    pub left_addr: u32,
    /// Address of the right end element (in the last segment of the block).
    pub right_addr: u32,
    /// Entanglement times of the left and right end elements.
    pub left_created: TimeUnits,
    pub right_created: TimeUnits,
    /// The older of the two end times; the link expires with it.
    pub created_at: TimeUnits,
    pub eligible_from: TimeUnits,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    link: Link,
    state: LinkState,
    stamp: u32,
}

/// One fundamental segment: `n` element pairs.
#[derive(Debug, Clone)]
pub struct Segment {
    pub left: Vec<MemoryElement>,
    pub right: Vec<MemoryElement>,
    free: Vec<u32>,
    free_pos: Vec<u32>,
}

impl Segment {
    fn new(n: u32) -> Self {
        Segment {
            left: (0..n).map(MemoryElement::vacuum).collect(),
            right: (0..n).map(MemoryElement::vacuum).collect(),
            free: (0..n).collect(),
            free_pos: (0..n).collect(),
        }
    }

    /// Number of element pairs that are both vacuum.
    pub fn free_pairs(&self) -> usize {
        self.free.len()
    }

    fn take_pair(&mut self, addr: u32) {
        let pos = self.free_pos[addr as usize];
        debug_assert_ne!(pos, NONE);
        let last = *self.free.last().unwrap();
        self.free.swap_remove(pos as usize);
        if last != addr {
            self.free_pos[last as usize] = pos;
        }
        self.free_pos[addr as usize] = NONE;
    }

    fn maybe_free_pair(&mut self, addr: u32) -> bool {
        let a = addr as usize;
        if self.left[a].is_vacuum() && self.right[a].is_vacuum() && self.free_pos[a] == NONE {
            self.free_pos[a] = self.free.len() as u32;
            self.free.push(addr);
            true
        } else {
            false
        }
    }
}

/// Idle links of one block at one level.
#[derive(Debug, Clone)]
enum Registry {
    /// Keyed by the address of the end element at the shared node.
    Parallel(Vec<LinkId>),
    Multiplexed(Vec<LinkId>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Connection {
    finish: TimeUnits,
    seq: u64,
    level: u32,
    block: u32,
    left: LinkId,
    right: LinkId,
}

/// A terminal link delivered at `time`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub time: TimeUnits,
    /// Outcome of the final projection, when one is configured.
    pub projection: Option<bool>,
}

impl Delivery {
    /// Counts toward the rate unless a projection was applied and failed.
    pub fn usable(&self) -> bool {
        self.projection != Some(false)
    }
}

/// What happened during one processed time step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepReport {
    pub time: TimeUnits,
    pub deliveries: Vec<Delivery>,
}

/// Evolving state of one simulated chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    params: RepeaterParams,
    rng: CounterRng,
    clock: TimeUnits,
    segments: Vec<Segment>,
    slots: Vec<Slot>,
    free_slots: Vec<LinkId>,
    /// `registry[level][block]` for levels `0..N`.
    registry: Vec<Vec<Registry>>,
    /// Per level: nodes (pair index at level + 1) touched since last matching.
    dirty: Vec<Vec<u32>>,
    dirty_flag: Vec<Vec<bool>>,
    /// Parallel mode: addresses newly registered per dirty node.
    arrivals: Vec<Vec<Vec<u32>>>,
    pending: Vec<LinkId>,
    expiry: BinaryHeap<Reverse<(u64, LinkId, u32)>>,
    inflight: BinaryHeap<Reverse<Connection>>,
    next_seq: u64,
    /// Next step with a generation success, and the index of the first
    /// successful trial among that step's free pairs.
    gen_cursor: Option<(u64, u64)>,
    gen_free_total: u64,
    gen_allowed: bool,
    /// Last step whose generation attempts were counted.
    attempts_accounted: u64,
    pub(crate) attempts_by_level: Vec<u64>,
    pub(crate) expiries: u64,
}

impl ChainState {
    /// All-vacuum chain at time 0. `params` must already be validated.
    pub fn new(params: RepeaterParams, seed: u64) -> Self {
        let n = params.elements;
        let levels = params.levels as usize;
        let segments = (0..params.segments()).map(|_| Segment::new(n)).collect();
        let registry = (0..levels)
            .map(|k| {
                let blocks = 1usize << (levels - k);
                (0..blocks)
                    .map(|_| match params.architecture {
                        Architecture::Parallel => Registry::Parallel(vec![NONE; n as usize]),
                        Architecture::Multiplexed => Registry::Multiplexed(Vec::new()),
                    })
                    .collect()
            })
            .collect();
        let dirty = (0..levels).map(|_| Vec::new()).collect();
        let dirty_flag = (0..levels)
            .map(|k| vec![false; 1usize << (levels - k - 1)])
            .collect();
        let arrivals = (0..levels)
            .map(|k| vec![Vec::new(); 1usize << (levels - k - 1)])
            .collect();
        let mut state = ChainState {
            rng: CounterRng::new(seed),
            clock: TimeUnits::ZERO,
            segments,
            slots: Vec::new(),
            free_slots: Vec::new(),
            registry,
            dirty,
            dirty_flag,
            arrivals,
            pending: Vec::new(),
            expiry: BinaryHeap::new(),
            inflight: BinaryHeap::new(),
            next_seq: 0,
            gen_cursor: None,
            gen_free_total: 0,
            gen_allowed: true,
            attempts_accounted: 0,
            attempts_by_level: vec![0; levels + 1],
            expiries: 0,
            params,
        };
        state.resample_generation();
        state
    }

    pub fn params(&self) -> &RepeaterParams {
        &self.params
    }

    /// Time of the last processed step.
    pub fn clock(&self) -> TimeUnits {
        self.clock
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Connection attempts launched per level (index 0 counts generation
    /// attempts).
    pub fn attempts_by_level(&self) -> &[u64] {
        &self.attempts_by_level
    }

    pub fn expiries(&self) -> u64 {
        self.expiries
    }

    /// Links that are waiting for a partner (or for eligibility), by level.
    pub fn live_links(&self) -> impl Iterator<Item = &Link> {
        self.slots
            .iter()
            .filter(|s| matches!(s.state, LinkState::Idle | LinkState::Pending))
            .map(|s| &s.link)
    }

    pub fn in_flight(&self) -> usize {
        self.inflight.len()
    }

    /// Earliest step after the current clock at which the state can change.
    pub fn next_event(&self) -> Option<TimeUnits> {
        let mut next: Option<u64> = None;
        let mut consider = |t: u64| {
            next = Some(next.map_or(t, |n: u64| n.min(t)));
        };
        if let Some((step, _)) = self.gen_cursor {
            consider(step);
        }
        if let Some(Reverse(c)) = self.inflight.peek() {
            consider(c.finish.0);
        }
        if let Some(&Reverse((t, _, _))) = self.expiry.peek() {
            consider(t.max(self.clock.0 + 1));
        }
        if !self.pending.is_empty() {
            consider(self.clock.0 + 1);
        }
        next.map(TimeUnits)
    }

    /// Processes the next step at which anything can happen, provided it is
    /// not later than `limit`. Returns `None` (leaving the clock at `limit`
    /// accounting-wise untouched) when there is no such step.
    pub fn advance(&mut self, limit: TimeUnits) -> Option<StepReport> {
        let t = self.next_event()?;
        if t > limit {
            return None;
        }
        Some(self.process(t))
    }

    fn process(&mut self, t: TimeUnits) -> StepReport {
        let mut report = StepReport {
            time: t,
            deliveries: Vec::new(),
        };
        // Generation attempts over the skipped steps prev+1 ..= t-1.
        if self.gen_allowed {
            let skipped = t.0.saturating_sub(self.attempts_accounted + 1);
            self.attempts_by_level[0] += skipped * self.gen_free_total;
        }
        self.clock = t;

        // 1. expiry
        let freed = self.expire(t);

        // 2. generation
        self.gen_allowed = self.params.concurrent_generation || self.inflight.is_empty();
        if self.gen_allowed {
            let total = self.total_free();
            self.attempts_by_level[0] += total;
            let first = if freed {
                // The free set changed this step: draw the step afresh.
                self.rng
                    .geometric_failures(self.params.p_gen.get())
                    .filter(|&k| k < total)
            } else {
                match self.gen_cursor {
                    Some((step, index)) if step == t.0 => Some(index),
                    _ => None,
                }
            };
            if let Some(first) = first {
                self.generate(t, first, total);
            }
        }
        self.attempts_accounted = t.0;

        // 3. resolution
        while let Some(Reverse(c)) = self.inflight.peek().copied() {
            if c.finish > t {
                break;
            }
            self.inflight.pop();
            self.resolve(c, t, &mut report);
        }

        // 4. matching
        self.promote_pending(t);
        self.match_all(t);

        self.gen_allowed = self.params.concurrent_generation || self.inflight.is_empty();
        self.resample_generation();
        self.purge_stale_expiry();
        report
    }

    /// Pops expiry entries of links that were consumed or replaced.
    fn purge_stale_expiry(&mut self) {
        while let Some(&Reverse((_, id, stamp))) = self.expiry.peek() {
            let slot = &self.slots[id as usize];
            let live =
                slot.stamp == stamp && matches!(slot.state, LinkState::Idle | LinkState::Pending);
            if live {
                break;
            }
            self.expiry.pop();
        }
    }

    fn total_free(&self) -> u64 {
        self.segments.iter().map(|s| s.free.len() as u64).sum()
    }

    fn resample_generation(&mut self) {
        self.gen_free_total = self.total_free();
        self.gen_cursor = None;
        if !self.gen_allowed || self.gen_free_total == 0 {
            return;
        }
        let m = self.gen_free_total;
        if let Some(k) = self.rng.geometric_failures(self.params.p_gen.get()) {
            let step = self.clock.0.checked_add(1 + k / m);
            self.gen_cursor = step.map(|s| (s, k % m));
        }
    }

    /// Realizes generation at step `t` given the first successful trial
    /// index among the `total` free pairs (in segment order).
    fn generate(&mut self, t: TimeUnits, first: u64, total: u64) {
        let p = self.params.p_gen.get();
        let mut hits: Vec<u64> = Vec::new();
        let mut idx = first;
        while idx < total {
            hits.push(idx);
            match self.rng.geometric_failures(p) {
                Some(k) => idx = idx.saturating_add(k + 1),
                None => break,
            }
        }
        // Map trial indices to (segment, address) before mutating free lists.
        let mut chosen: Vec<(usize, u32)> = Vec::with_capacity(hits.len());
        let mut seg = 0usize;
        let mut base = 0u64;
        for &h in &hits {
            while h >= base + self.segments[seg].free.len() as u64 {
                base += self.segments[seg].free.len() as u64;
                seg += 1;
            }
            chosen.push((seg, self.segments[seg].free[(h - base) as usize]));
        }
        for (seg, addr) in chosen {
            self.segments[seg].take_pair(addr);
            let state = ElementState::Entangled {
                created_at: t,
                level: 0,
            };
            self.segments[seg].left[addr as usize].state = state;
            self.segments[seg].right[addr as usize].state = state;
            let link = Link {
                level: 0,
                block: seg as u32,
                left_addr: addr,
                right_addr: addr,
                left_created: t,
                right_created: t,
                created_at: t,
                eligible_from: t,
            };
            let id = self.alloc(link, LinkState::Idle);
            self.register(id);
        }
    }

    fn alloc(&mut self, link: Link, state: LinkState) -> LinkId {
        let id = match self.free_slots.pop() {
            Some(id) => {
                let slot = &mut self.slots[id as usize];
                slot.link = link;
                slot.state = state;
                slot.stamp = slot.stamp.wrapping_add(1);
                id
            }
            None => {
                self.slots.push(Slot {
                    link,
                    state,
                    stamp: 0,
                });
                (self.slots.len() - 1) as LinkId
            }
        };
        let expire_at = link
            .created_at
            .0
            .saturating_add(self.params.tau.0)
            .saturating_add(1);
        self.expiry
            .push(Reverse((expire_at, id, self.slots[id as usize].stamp)));
        id
    }

    fn release_slot(&mut self, id: LinkId) {
        self.slots[id as usize].state = LinkState::Free;
        self.free_slots.push(id);
    }

    /// Address key of a link at the node it would be joined at.
    fn junction_addr(link: &Link) -> u32 {
        if link.block.is_multiple_of(2) {
            link.right_addr
        } else {
            link.left_addr
        }
    }

    fn register(&mut self, id: LinkId) {
        let link = self.slots[id as usize].link;
        let level = link.level as usize;
        let node = (link.block / 2) as usize;
        match &mut self.registry[level][link.block as usize] {
            Registry::Parallel(by_addr) => {
                let a = Self::junction_addr(&link);
                debug_assert_eq!(by_addr[a as usize], NONE);
                by_addr[a as usize] = id;
                self.arrivals[level][node].push(a);
            }
            Registry::Multiplexed(list) => list.push(id),
        }
        self.slots[id as usize].state = LinkState::Idle;
        if !self.dirty_flag[level][node] {
            self.dirty_flag[level][node] = true;
            self.dirty[level].push(node as u32);
        }
    }

    fn unregister(&mut self, id: LinkId) {
        let link = self.slots[id as usize].link;
        match &mut self.registry[link.level as usize][link.block as usize] {
            Registry::Parallel(by_addr) => {
                by_addr[Self::junction_addr(&link) as usize] = NONE;
            }
            Registry::Multiplexed(list) => {
                if let Some(pos) = list.iter().position(|&x| x == id) {
                    list.remove(pos);
                }
            }
        }
    }

    /// Drops idle and pending links that are older than `tau` at `t`.
    /// Returns true if any element pair became free.
    fn expire(&mut self, t: TimeUnits) -> bool {
        let mut freed = false;
        while let Some(&Reverse((at, id, stamp))) = self.expiry.peek() {
            if at > t.0 {
                break;
            }
            self.expiry.pop();
            let slot = self.slots[id as usize];
            if slot.stamp != stamp {
                continue;
            }
            match slot.state {
                LinkState::Idle => self.unregister(id),
                LinkState::Pending => self.pending.retain(|&x| x != id),
                LinkState::InFlight | LinkState::Free => continue,
            }
            self.expiries += 1;
            freed |= self.release_left_end(&slot.link);
            freed |= self.release_right_end(&slot.link);
            self.release_slot(id);
        }
        freed
    }

    fn first_segment(link: &Link) -> usize {
        (link.block as usize) << link.level
    }

    fn last_segment(link: &Link) -> usize {
        ((link.block as usize + 1) << link.level) - 1
    }

    fn release_left_end(&mut self, link: &Link) -> bool {
        let seg = &mut self.segments[Self::first_segment(link)];
        seg.left[link.left_addr as usize].state = ElementState::Vacuum;
        seg.maybe_free_pair(link.left_addr)
    }

    fn release_right_end(&mut self, link: &Link) -> bool {
        let seg = &mut self.segments[Self::last_segment(link)];
        seg.right[link.right_addr as usize].state = ElementState::Vacuum;
        seg.maybe_free_pair(link.right_addr)
    }

    fn resolve(&mut self, c: Connection, t: TimeUnits, report: &mut StepReport) {
        let left = self.slots[c.left as usize].link;
        let right = self.slots[c.right as usize].link;
        self.release_slot(c.left);
        self.release_slot(c.right);
        // Inner elements at the joining node are measured out.
        self.release_right_end(&left);
        self.release_left_end(&right);

        let p = self.params.p_conn[c.level as usize - 1].get();
        if !self.rng.bernoulli(p) {
            self.release_left_end(&left);
            self.release_right_end(&right);
            return;
        }
        let joined = Link {
            level: c.level,
            block: c.block,
            left_addr: left.left_addr,
            right_addr: right.right_addr,
            left_created: left.left_created,
            right_created: right.right_created,
            created_at: left.left_created.min(right.right_created),
            eligible_from: TimeUnits(t.0 + 1),
        };
        if c.level == self.params.levels {
            let projection = self
                .params
                .final_projection
                .map(|eps| self.rng.bernoulli(eps.get()));
            report.deliveries.push(Delivery {
                time: t,
                projection,
            });
            self.release_left_end(&joined);
            self.release_right_end(&joined);
            return;
        }
        self.segments[Self::first_segment(&joined)].left[joined.left_addr as usize].state =
            ElementState::Entangled {
                created_at: joined.left_created,
                level: c.level,
            };
        self.segments[Self::last_segment(&joined)].right[joined.right_addr as usize].state =
            ElementState::Entangled {
                created_at: joined.right_created,
                level: c.level,
            };
        let id = self.alloc(joined, LinkState::Pending);
        self.pending.push(id);
    }

    fn promote_pending(&mut self, t: TimeUnits) {
        if self.pending.is_empty() {
            return;
        }
        let pending = core::mem::take(&mut self.pending);
        let mut keep = Vec::new();
        for id in pending {
            if self.slots[id as usize].link.eligible_from <= t {
                self.register(id);
            } else {
                keep.push(id);
            }
        }
        self.pending = keep;
    }

    fn match_all(&mut self, t: TimeUnits) {
        let levels = self.params.levels as usize;
        for level in 0..levels {
            if self.dirty[level].is_empty() {
                continue;
            }
            let mut nodes = core::mem::take(&mut self.dirty[level]);
            nodes.sort_unstable();
            for &node in &nodes {
                self.dirty_flag[level][node as usize] = false;
                self.match_node(level, node as usize, t);
            }
            nodes.clear();
            self.dirty[level] = nodes;
        }
    }

    fn match_node(&mut self, level: usize, node: usize, t: TimeUnits) {
        let (lb, rb) = (2 * node, 2 * node + 1);
        let mut pairs: Vec<(LinkId, LinkId)> = Vec::new();
        let parallel = matches!(self.registry[level][lb], Registry::Parallel(_));
        if parallel {
            let mut addrs = core::mem::take(&mut self.arrivals[level][node]);
            addrs.sort_unstable();
            addrs.dedup();
            for &a in &addrs {
                let l = self.parallel_slot(level, lb, a);
                let r = self.parallel_slot(level, rb, a);
                if l != NONE && r != NONE {
                    pairs.push((l, r));
                }
            }
            addrs.clear();
            self.arrivals[level][node] = addrs;
        } else {
            let mut left = self.multiplexed_list(level, lb);
            let mut right = self.multiplexed_list(level, rb);
            let m = left.len().min(right.len());
            if m == 0 {
                return;
            }
            // Oldest first.
            let key = |slots: &[Slot], id: &LinkId| (slots[*id as usize].link.created_at, *id);
            left.sort_unstable_by_key(|id| key(&self.slots, id));
            right.sort_unstable_by_key(|id| key(&self.slots, id));
            pairs.extend(left.into_iter().zip(right).take(m));
        }
        let next_level = level as u32 + 1;
        let latency = self.params.level_latency[level];
        for (l, r) in pairs {
            self.unregister(l);
            self.unregister(r);
            self.slots[l as usize].state = LinkState::InFlight;
            self.slots[r as usize].state = LinkState::InFlight;
            self.attempts_by_level[next_level as usize] += 1;
            let seq = self.next_seq;
            self.next_seq += 1;
            self.inflight.push(Reverse(Connection {
                finish: t.saturating_add(latency),
                seq,
                level: next_level,
                block: node as u32,
                left: l,
                right: r,
            }));
        }
    }

    fn parallel_slot(&self, level: usize, block: usize, addr: u32) -> LinkId {
        match &self.registry[level][block] {
            Registry::Parallel(by_addr) => by_addr[addr as usize],
            Registry::Multiplexed(_) => NONE,
        }
    }

    fn multiplexed_list(&self, level: usize, block: usize) -> Vec<LinkId> {
        match &self.registry[level][block] {
            Registry::Multiplexed(list) => list.clone(),
            Registry::Parallel(_) => Vec::new(),
        }
    }

    /// Checks the structural invariants of the state; returns a description
    /// of the first violation.
    pub fn check_conservation(&self) -> Result<(), String> {
        let n = self.params.elements as usize;
        let segs = self.segments.len();
        // Element ownership: (segment, side, addr) -> owner count.
        let mut owner = vec![0u8; segs * 2 * n];
        let mut mark = |seg: usize, side: usize, addr: u32| -> bool {
            let i = (seg * 2 + side) * n + addr as usize;
            owner[i] += 1;
            owner[i] == 1
        };
        let mut err = String::new();
        let mut per_block: Vec<Vec<usize>> = (0..=self.params.levels as usize)
            .map(|k| vec![0; segs >> k])
            .collect();
        for (id, slot) in self.slots.iter().enumerate() {
            if slot.state == LinkState::Free {
                continue;
            }
            let link = &slot.link;
            if (link.block as usize) >= (segs >> link.level) {
                let _ = write!(err, "link {id} outside the chain");
                return Err(err);
            }
            per_block[link.level as usize][link.block as usize] += 1;
            let ok = mark(Self::first_segment(link), 0, link.left_addr)
                & mark(Self::last_segment(link), 1, link.right_addr);
            if !ok {
                let _ = write!(err, "element shared by two links (link {id})");
                return Err(err);
            }
            if slot.state == LinkState::Idle && self.clock.since(link.created_at) > self.params.tau
            {
                let _ = write!(err, "expired link {id} still idle");
                return Err(err);
            }
        }
        for (k, blocks) in per_block.iter().enumerate() {
            if let Some(b) = blocks.iter().position(|&c| c > n) {
                let _ = write!(err, "level {k} block {b} holds more than {n} links");
                return Err(err);
            }
        }
        for (s, seg) in self.segments.iter().enumerate() {
            for a in 0..n {
                let left_owned = owner[(s * 2) * n + a] > 0;
                let right_owned = owner[(s * 2 + 1) * n + a] > 0;
                if left_owned == seg.left[a].is_vacuum() {
                    let _ = write!(err, "segment {s} left element {a} state mismatch");
                    return Err(err);
                }
                if right_owned == seg.right[a].is_vacuum() {
                    let _ = write!(err, "segment {s} right element {a} state mismatch");
                    return Err(err);
                }
                let free = seg.free_pos[a] != NONE;
                if free != (seg.left[a].is_vacuum() && seg.right[a].is_vacuum()) {
                    let _ = write!(err, "segment {s} pair {a} free-list mismatch");
                    return Err(err);
                }
            }
        }
        Ok(())
    }
}
