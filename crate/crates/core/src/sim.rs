//! Discrete-event emulation of the decentralized variants. Every robot is a
//! process with its own trajectory store; robots exchange INFORM broadcasts
//! carrying their announced space-time region. Compute time is charged to a
//! virtual clock through a [`CostModel`].

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::{CostModel, Work};
use crate::error::CoreError;
use crate::geometry::{Point, RegionSet};
use crate::planner::{best_traj_with_stats, PlanQuery, DEFAULT_DT};
use crate::prioritized::{lower_priority_starts, Solution, Solver};
use crate::problem::ProblemInstance;
use crate::trajectory::{consistent, consistent_from, earliest_overlap, first_conflict_from, AnnouncedRegion, Trajectory, TrajectoryStore, Waypoint};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// One of the decentralized solvers.
    pub variant: Solver,
    pub latency: f64,
    /// Broadcast loss probability (closed loop only).
    pub loss: f64,
    /// Seconds between unconditional rebroadcasts (closed loop only).
    pub rebroadcast_period: f64,
    /// Closed-loop runs stop here.
    pub end_time: f64,
    pub seed: u64,
    pub dt: f64,
    pub horizon_steps: Option<usize>,
}

impl SimConfig {
    pub fn new(variant: Solver) -> Self {
        Self {
            variant,
            latency: 0.0,
            loss: 0.0,
            rebroadcast_period: 1.0,
            end_time: 60.0,
            seed: 0,
            dt: DEFAULT_DT,
            horizon_steps: None,
        }
    }

    fn check(&self, allowed: &[Solver]) -> Result<(), CoreError> {
        let bad = |m: &str| Err(CoreError::InvalidConfig(String::from(m)));
        if !allowed.contains(&self.variant) {
            return bad("variant not supported by this runner");
        }
        if !(self.latency >= 0.0) || !self.latency.is_finite() {
            return bad("latency must be finite and non-negative");
        }
        if !(0.0..=1.0).contains(&self.loss) {
            return bad("loss probability must lie in [0, 1]");
        }
        if self.variant != Solver::CladPp && self.loss != 0.0 {
            return bad("only the closed-loop variant tolerates message loss");
        }
        if !(self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if self.variant == Solver::CladPp && (!(self.rebroadcast_period > 0.0) || !(self.end_time >= 0.0)) {
            return bad("closed loop needs a positive rebroadcast period and an end time");
        }
        Ok(())
    }
}

/// One broadcast, as seen by the omniscient kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MessageRecord {
    pub sender: usize,
    pub t_send: f64,
    pub t_deliver: f64,
    pub dropped: bool,
    /// Periodic closed-loop rebroadcast rather than a replanning.
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformMessage {
    pub sender: usize,
    pub payload: AnnouncedRegion,
    pub t_send: f64,
    pub t_deliver: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProcessState {
    Idle,
    Computing,
    Failed,
    Terminated,
}

#[derive(Debug, Clone)]
pub struct RobotProcess {
    pub id: usize,
    /// Priority position, 0 highest.
    pub priority: usize,
    pub radius: f64,
    pub speed: f64,
    pub start: usize,
    pub goal: usize,
    pub trajectory: Option<Arc<Trajectory>>,
    pub store: TrajectoryStore,
    pub blocked: RegionSet,
    pub state: ProcessState,
    inbox: VecDeque<InformMessage>,
}

impl RobotProcess {
    fn new(inst: &ProblemInstance, i: usize, revised: bool) -> Self {
        let r = inst.robots()[i];
        Self {
            id: r.id,
            priority: i,
            radius: r.radius,
            speed: r.speed,
            start: r.start,
            goal: r.goal,
            trajectory: None,
            store: TrajectoryStore::new(),
            blocked: if revised { lower_priority_starts(inst, i) } else { RegionSet::new() },
            state: ProcessState::Idle,
            inbox: VecDeque::new(),
        }
    }

    fn region(&self) -> Option<AnnouncedRegion> {
        self.trajectory.as_ref().map(|t| AnnouncedRegion {
            robot: self.priority,
            radius: self.radius,
            trajectory: t.clone(),
        })
    }

    pub fn pending_messages(&self) -> usize {
        self.inbox.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SimStatus {
    Success,
    /// Id of the robot whose `Find-consistent` returned nothing.
    Failure { robot: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub variant: Solver,
    pub status: SimStatus,
    /// Final joint solution on success (for the closed loop: the
    /// trajectories held at the end time, whenever they are conflict-free).
    pub solution: Option<Solution>,
    pub time_to_solution: f64,
    /// Broadcasts caused by a changed trajectory (= replannings).
    pub messages: usize,
    /// Replannings per robot, in priority order.
    pub replans: Vec<usize>,
    pub rounds: Option<usize>,
    pub log: Vec<MessageRecord>,
}

impl SimOutcome {
    pub fn succeeded(&self) -> bool {
        self.status == SimStatus::Success
    }

    /// Messages broadcast by the robot at priority position `p`.
    pub fn messages_from(&self, p: usize) -> usize {
        self.log.iter().filter(|m| m.sender == p && !m.periodic).count()
    }
}

enum Found {
    Keep,
    Adopt(Trajectory),
    Fail,
}

/// Open-loop `Find-consistent`: keep the current trajectory if it agrees with
/// the store, otherwise plan from the start at time zero.
fn find_consistent(inst: &ProblemInstance, p: &RobotProcess, dt: f64, horizon: Option<usize>) -> Result<(Found, Work), CoreError> {
    if let Some(tr) = &p.trajectory {
        if consistent(tr, p.radius, &p.store) {
            return Ok((Found::Keep, Work::Check { regions: p.store.len() }));
        }
    }
    let dynamic: Vec<AnnouncedRegion> = p.store.regions().cloned().collect();
    let mut q = PlanQuery::new(inst.roadmap(), p.radius, p.speed, p.start, p.goal, &dynamic, &p.blocked);
    q.dt = dt;
    q.max_steps = horizon;
    let (found, stats) = best_traj_with_stats(&q)?;
    let work = Work::Plan { expansions: stats.expansions, regions: dynamic.len(), lattice: stats.lattice };
    Ok(match found {
        Some(t) => (Found::Adopt(t), work),
        None => (Found::Fail, work),
    })
}

fn solution_from(procs: &[RobotProcess], solver: Solver, runtime: f64) -> Solution {
    Solution {
        trajectories: procs
            .iter()
            .map(|p| (p.id, p.trajectory.clone().expect("every robot holds a trajectory on success")))
            .collect(),
        solver,
        runtime,
    }
}

/// Synchronized rounds. In each round every robot runs `Find-consistent`
/// against the store contents from the end of the previous round; changed
/// trajectories are broadcast and delivered at the barrier.
pub fn run_sd<C: CostModel>(inst: &ProblemInstance, cfg: &SimConfig, costs: &mut C) -> Result<SimOutcome, CoreError> {
    cfg.check(&[Solver::SdPp, Solver::SdRpp])?;
    inst.ensure_valid()?;
    let revised = cfg.variant.revised();
    let n = inst.robots().len();
    let mut procs: Vec<RobotProcess> = (0..n).map(|i| RobotProcess::new(inst, i, revised)).collect();
    let mut replans = vec![0usize; n];
    let mut log = Vec::new();
    let mut now = 0.0f64;
    let mut rounds = 0usize;
    loop {
        rounds += 1;
        let mut barrier = now;
        let mut sent = Vec::new();
        let mut failed = None;
        for i in 0..n {
            let (found, c) = costs.charge(procs[i].id, || match find_consistent(inst, &procs[i], cfg.dt, cfg.horizon_steps) {
                Ok((f, w)) => (Ok(f), w),
                Err(e) => (Err(e), Work::Plan { expansions: 0, regions: 0, lattice: 0 }),
            });
            let done = now + c;
            barrier = barrier.max(done);
            match found? {
                Found::Keep => {}
                Found::Adopt(t) => {
                    procs[i].trajectory = Some(Arc::new(t));
                    replans[i] += 1;
                    sent.push(i);
                    log.push(MessageRecord {
                        sender: i,
                        t_send: done,
                        t_deliver: done + cfg.latency,
                        dropped: false,
                        periodic: false,
                    });
                    barrier = barrier.max(done + cfg.latency);
                }
                Found::Fail => {
                    procs[i].state = ProcessState::Failed;
                    failed.get_or_insert((procs[i].id, done));
                }
            }
        }
        if let Some((robot, t)) = failed {
            return Ok(SimOutcome {
                variant: cfg.variant,
                status: SimStatus::Failure { robot },
                solution: None,
                time_to_solution: t,
                messages: log.len(),
                replans,
                rounds: Some(rounds),
                log,
            });
        }
        now = barrier;
        if sent.is_empty() {
            for p in &mut procs {
                p.state = ProcessState::Terminated;
            }
            let messages = log.len();
            return Ok(SimOutcome {
                variant: cfg.variant,
                status: SimStatus::Success,
                solution: Some(solution_from(&procs, cfg.variant, now)),
                time_to_solution: now,
                messages,
                replans,
                rounds: Some(rounds),
                log,
            });
        }
        for &s in &sent {
            let region = procs[s].region().expect("sender just adopted a trajectory");
            for p in &mut procs[s + 1..] {
                p.store.insert(region.clone());
            }
        }
    }
}

/// External closed-loop event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalEvent {
    pub time: f64,
    /// Robot id.
    pub robot: usize,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EventKind {
    /// New goal position (snapped to the nearest roadmap vertex).
    Retask(Point),
    /// The robot is found at this position (snapped to the nearest vertex).
    Divergence(Point),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Action {
    ComputeDone { robot: usize },
    Deliver { to: usize, msg: usize },
    Rebroadcast { robot: usize },
    External { idx: usize },
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    priority: usize,
    seq: u64,
    action: Action,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on (time, priority, seq)
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.priority.cmp(&self.priority))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Event-driven kernel shared by the asynchronous and the closed-loop runs.
/// It is exposed so that tests can single-step a run and inspect processes.
pub struct Kernel<'a, C: CostModel> {
    inst: &'a ProblemInstance,
    cfg: SimConfig,
    costs: C,
    procs: Vec<RobotProcess>,
    queue: BinaryHeap<Event>,
    messages: Vec<InformMessage>,
    log: Vec<MessageRecord>,
    /// Result of the computation in progress, committed at completion.
    pending: Vec<Option<Found>>,
    events: Vec<ExternalEvent>,
    replans: Vec<usize>,
    rng: ChaCha8Rng,
    now: f64,
    last_activity: f64,
    seq: u64,
    initialized: bool,
    failure: Option<(usize, f64)>,
    /// Closed loop: an external event demands a replan once the robot is free.
    force_pending: Vec<bool>,
    last_change: f64,
}

impl<'a, C: CostModel> Kernel<'a, C> {
    pub fn new(inst: &'a ProblemInstance, cfg: &SimConfig, costs: C) -> Result<Self, CoreError> {
        cfg.check(&[Solver::AdPp, Solver::AdRpp, Solver::CladPp])?;
        inst.ensure_valid()?;
        let n = inst.robots().len();
        let revised = cfg.variant.revised();
        Ok(Self {
            inst,
            cfg: cfg.clone(),
            costs,
            procs: (0..n).map(|i| RobotProcess::new(inst, i, revised)).collect(),
            queue: BinaryHeap::new(),
            messages: Vec::new(),
            log: Vec::new(),
            pending: (0..n).map(|_| None).collect(),
            events: Vec::new(),
            replans: vec![0; n],
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            now: 0.0,
            last_activity: 0.0,
            seq: 0,
            initialized: false,
            failure: None,
            force_pending: vec![false; n],
            last_change: 0.0,
        })
    }

    fn closed_loop(&self) -> bool {
        self.cfg.variant == Solver::CladPp
    }

    fn push(&mut self, time: f64, priority: usize, action: Action) {
        self.seq += 1;
        self.queue.push(Event { time, priority, seq: self.seq, action });
    }

    /// Schedules closed-loop external events; call before [`Kernel::initialize`].
    pub fn add_events(&mut self, events: &[ExternalEvent]) -> Result<(), CoreError> {
        for ev in events {
            let p = self
                .procs
                .iter()
                .position(|p| p.id == ev.robot)
                .ok_or_else(|| CoreError::InvalidConfig(alloc::format!("event for unknown robot {}", ev.robot)))?;
            self.events.push(*ev);
            let idx = self.events.len() - 1;
            self.push(ev.time, p, Action::External { idx });
        }
        Ok(())
    }

    /// Every robot starts computing its initial trajectory at time zero.
    pub fn initialize(&mut self) -> Result<(), CoreError> {
        if self.initialized {
            return Ok(());
        }
        self.initialized = true;
        for p in 0..self.procs.len() {
            self.start_compute(p, true)?;
            if self.closed_loop() {
                let t = self.cfg.rebroadcast_period;
                self.push(t, p, Action::Rebroadcast { robot: p });
            }
        }
        Ok(())
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn processes(&self) -> &[RobotProcess] {
        &self.procs
    }

    pub fn log(&self) -> &[MessageRecord] {
        &self.log
    }

    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Robot's position at virtual time `t` under its current trajectory.
    pub fn position_of(&self, p: usize, t: f64) -> Point {
        match &self.procs[p].trajectory {
            Some(tr) => tr.position_at(t),
            None => self.inst.roadmap().vertex(self.procs[p].start),
        }
    }

    fn start_compute(&mut self, p: usize, force: bool) -> Result<(), CoreError> {
        let (inst, proc_, cfg, now) = (self.inst, &self.procs[p], &self.cfg, self.now);
        let closed = self.closed_loop();
        let (found, c) = self.costs.charge(proc_.id, || {
            let r = if closed {
                closed_loop_find(inst, proc_, cfg, now, force)
            } else {
                find_consistent(inst, proc_, cfg.dt, cfg.horizon_steps)
            };
            match r {
                Ok((f, w)) => (Ok(f), w),
                Err(e) => (Err(e), Work::Plan { expansions: 0, regions: 0, lattice: 0 }),
            }
        });
        self.pending[p] = Some(found?);
        self.procs[p].state = ProcessState::Computing;
        self.push(now + c, p, Action::ComputeDone { robot: p });
        Ok(())
    }

    fn broadcast(&mut self, p: usize, periodic: bool) {
        let Some(payload) = self.procs[p].region() else { return };
        let t_send = self.now;
        let t_deliver = t_send + self.cfg.latency;
        let dropped = self.closed_loop() && self.rng.gen::<f64>() < self.cfg.loss;
        self.log.push(MessageRecord { sender: p, t_send, t_deliver, dropped, periodic });
        if dropped {
            return;
        }
        self.messages.push(InformMessage { sender: p, payload, t_send, t_deliver });
        let msg = self.messages.len() - 1;
        for to in p + 1..self.procs.len() {
            self.push(t_deliver, p, Action::Deliver { to, msg });
        }
    }

    /// Starts handling the next queued message if the robot is free.
    fn serve(&mut self, p: usize) -> Result<(), CoreError> {
        if self.procs[p].state != ProcessState::Idle {
            return Ok(());
        }
        if self.force_pending[p] {
            self.force_pending[p] = false;
            return self.start_compute(p, true);
        }
        if let Some(msg) = self.procs[p].inbox.pop_front() {
            debug_assert!(msg.sender < p);
            self.procs[p].store.insert(msg.payload);
            self.start_compute(p, false)?;
        }
        Ok(())
    }

    /// Test hook: puts an INFORM from `sender` (a priority position) in flight.
    pub fn inject(&mut self, sender: usize, payload: AnnouncedRegion, t_deliver: f64) {
        let t_send = self.now;
        self.messages.push(InformMessage { sender, payload, t_send, t_deliver });
        let msg = self.messages.len() - 1;
        for to in sender + 1..self.procs.len() {
            self.push(t_deliver, sender, Action::Deliver { to, msg });
        }
    }

    /// Time of the next scheduled event.
    pub fn peek_time(&self) -> Option<f64> {
        self.queue.peek().map(|e| e.time)
    }

    /// Processes one event; `false` once nothing is left to do or a robot
    /// has failed.
    pub fn step(&mut self) -> Result<bool, CoreError> {
        if self.failure.is_some() {
            return Ok(false);
        }
        let Some(ev) = self.queue.pop() else { return Ok(false) };
        self.now = ev.time;
        match ev.action {
            Action::ComputeDone { robot: p } => {
                self.last_activity = self.now;
                match self.pending[p].take().expect("a computation was in progress") {
                    Found::Keep => {}
                    Found::Adopt(t) => {
                        self.procs[p].trajectory = Some(Arc::new(t));
                        self.replans[p] += 1;
                        self.last_change = self.now;
                        self.broadcast(p, false);
                    }
                    Found::Fail => {
                        self.procs[p].state = ProcessState::Failed;
                        self.failure = Some((self.procs[p].id, self.now));
                        return Ok(false);
                    }
                }
                self.procs[p].state = ProcessState::Idle;
                self.serve(p)?;
            }
            Action::Deliver { to, msg } => {
                self.last_activity = self.now;
                if self.procs[to].state != ProcessState::Failed {
                    let m = self.messages[msg].clone();
                    self.procs[to].inbox.push_back(m);
                    self.serve(to)?;
                }
            }
            Action::Rebroadcast { robot: p } => {
                self.broadcast(p, true);
                let next = self.now + self.cfg.rebroadcast_period;
                if next <= self.cfg.end_time {
                    self.push(next, p, Action::Rebroadcast { robot: p });
                }
            }
            Action::External { idx } => {
                let ev = self.events[idx];
                let p = ev.priority_of(&self.procs);
                let rm = self.inst.roadmap();
                match ev.kind {
                    EventKind::Retask(g) => self.procs[p].goal = rm.nearest_vertex(g),
                    EventKind::Divergence(pos) => {
                        let v = rm.vertex(rm.nearest_vertex(pos));
                        self.procs[p].trajectory = Some(Arc::new(Trajectory::stationary(v, self.now)));
                    }
                }
                self.force_pending[p] = true;
                self.serve(p)?;
            }
        }
        Ok(true)
    }

    /// True iff no message is in flight or queued and no robot is computing.
    /// A kernel that has not been initialized is never quiescent.
    pub fn is_quiescent(&self) -> bool {
        self.initialized
            && !self.queue.iter().any(|e| matches!(e.action, Action::Deliver { .. } | Action::ComputeDone { .. }))
            && self.procs.iter().all(|p| {
                matches!(p.state, ProcessState::Idle | ProcessState::Terminated) && p.inbox.is_empty()
            })
            && !self.force_pending.iter().any(|&f| f)
    }

    fn outcome(mut self, status: SimStatus, time: f64, solution: Option<Solution>) -> SimOutcome {
        if status == SimStatus::Success && !self.closed_loop() {
            for p in &mut self.procs {
                p.state = ProcessState::Terminated;
            }
        }
        SimOutcome {
            variant: self.cfg.variant,
            status,
            solution,
            time_to_solution: time,
            messages: self.log.iter().filter(|m| !m.periodic).count(),
            replans: self.replans,
            rounds: None,
            log: self.log,
        }
    }
}

impl ExternalEvent {
    fn priority_of(&self, procs: &[RobotProcess]) -> usize {
        procs.iter().position(|p| p.id == self.robot).expect("validated in add_events")
    }
}

/// Closed-loop `Find-consistent`: checks consistency from the current time
/// on and replans from the robot's current position. Motion already under
/// way is not revoked: the robot keeps following its trajectory to the next
/// roadmap vertex, or turns back to the previous one, and the new plan
/// starts there. Legs that are known to be conflict-free are preferred.
fn closed_loop_find(
    inst: &ProblemInstance,
    p: &RobotProcess,
    cfg: &SimConfig,
    now: f64,
    force: bool,
) -> Result<(Found, Work), CoreError> {
    if !force {
        if let Some(tr) = &p.trajectory {
            if consistent_from(tr, p.radius, &p.store, now) {
                return Ok((Found::Keep, Work::Check { regions: p.store.len() }));
            }
        }
    }
    let rm = inst.roadmap();
    let dynamic: Vec<AnnouncedRegion> = p.store.regions().cloned().collect();
    // Ways to reach a roadmap vertex from where the robot is now: stay put
    // on a vertex, or finish / reverse the edge it is on.
    let mut options: Vec<(usize, Vec<Waypoint>)> = Vec::new();
    match &p.trajectory {
        None => options.push((p.start, vec![Waypoint::new(rm.vertex(p.start), now)])),
        Some(tr) => {
            let here = tr.position_at(now);
            if let Some(v) = rm.vertex_at(here) {
                options.push((v, vec![Waypoint::new(here, now)]));
            } else {
                let wps = tr.waypoints();
                let next = wps
                    .iter()
                    .find(|w| w.t > now && rm.vertex_at(w.pos).is_some())
                    .copied()
                    .unwrap_or(Waypoint::new(tr.end_pos(), tr.end_time()));
                let mut ahead = vec![Waypoint::new(here, now)];
                ahead.extend(wps.iter().copied().filter(|w| w.t > now && w.t <= next.t));
                options.push((rm.nearest_vertex(next.pos), ahead));
                if let Some(prev) = wps.iter().rev().find(|w| w.t <= now && rm.vertex_at(w.pos).is_some()) {
                    let back = now + here.dist(prev.pos) / p.speed;
                    options.push((rm.nearest_vertex(prev.pos), vec![Waypoint::new(here, now), Waypoint::new(prev.pos, back)]));
                }
            }
        }
    }
    let mut best: Option<(bool, f64, Trajectory)> = None;
    let mut expansions = 0;
    let mut lattice = 0;
    for (v, lead) in options {
        let t_from = lead[lead.len() - 1].t;
        let lead_clear = lead.len() < 2
            || dynamic.iter().all(|d| earliest_overlap(&lead, p.radius, d.trajectory.waypoints(), d.radius, now, t_from).is_none());
        let mut q = PlanQuery::new(rm, p.radius, p.speed, v, p.goal, &dynamic, &p.blocked);
        q.start_time = t_from;
        q.dt = cfg.dt;
        q.max_steps = cfg.horizon_steps;
        let (found, stats) = best_traj_with_stats(&q)?;
        expansions += stats.expansions;
        lattice += stats.lattice;
        let Some(plan) = found else { continue };
        let arrival = plan.arrival_time(rm.vertex(p.goal))?;
        let better = match &best {
            None => true,
            Some((clear, t, _)) => (lead_clear && !clear) || (lead_clear == *clear && arrival < *t),
        };
        if better {
            let mut wps = lead;
            wps.pop();
            wps.extend_from_slice(plan.waypoints());
            best = Some((lead_clear, arrival, Trajectory::new(wps)?));
        }
    }
    Ok(match best {
        Some((_, _, t)) => (Found::Adopt(t), Work::Plan { expansions, regions: dynamic.len(), lattice }),
        None => (Found::Fail, Work::Plan { expansions, regions: dynamic.len(), lattice }),
    })
}

/// Asynchronous decentralized run: robots react to each INFORM as it
/// arrives; success is declared at quiescence.
pub fn run_ad<C: CostModel>(inst: &ProblemInstance, cfg: &SimConfig, costs: &mut C) -> Result<SimOutcome, CoreError> {
    if cfg.variant == Solver::CladPp {
        return Err(CoreError::InvalidConfig(String::from("use run_clad for the closed-loop variant")));
    }
    let mut k = Kernel::new(inst, cfg, costs)?;
    k.initialize()?;
    while k.step()? {}
    if let Some((robot, t)) = k.failure {
        return Ok(k.outcome(SimStatus::Failure { robot }, t, None));
    }
    debug_assert!(k.is_quiescent());
    let t = k.last_activity;
    let sol = solution_from(&k.procs, cfg.variant, t);
    Ok(k.outcome(SimStatus::Success, t, Some(sol)))
}

/// Closed-loop run up to `cfg.end_time` with periodic rebroadcasts, lossy
/// broadcasts and external events. Success means no robot failed and the
/// trajectories held at the end are mutually conflict-free.
pub fn run_clad<C: CostModel>(
    inst: &ProblemInstance,
    cfg: &SimConfig,
    events: &[ExternalEvent],
    costs: &mut C,
) -> Result<SimOutcome, CoreError> {
    if cfg.variant != Solver::CladPp {
        return Err(CoreError::InvalidConfig(String::from("run_clad needs the closed-loop variant")));
    }
    let mut k = Kernel::new(inst, cfg, costs)?;
    k.add_events(events)?;
    k.initialize()?;
    while k.peek_time().is_some_and(|t| t <= cfg.end_time) && k.step()? {}
    if let Some((robot, t)) = k.failure {
        return Ok(k.outcome(SimStatus::Failure { robot }, t, None));
    }
    let held: Vec<&RobotProcess> = k.procs.iter().collect();
    let mut clean = held.iter().all(|p| p.trajectory.is_some());
    'outer: for a in 0..held.len() {
        for b in a + 1..held.len() {
            let (Some(ta), Some(tb)) = (&held[a].trajectory, &held[b].trajectory) else { continue };
            if first_conflict_from(ta, held[a].radius, tb, held[b].radius, 0.0).is_some() {
                clean = false;
                break 'outer;
            }
        }
    }
    let t = k.last_change;
    if clean {
        let sol = solution_from(&k.procs, cfg.variant, t);
        Ok(k.outcome(SimStatus::Success, t, Some(sol)))
    } else {
        Ok(k.outcome(SimStatus::Failure { robot: usize::MAX }, t, None))
    }
}

/// Omniscient termination check used by the kernel.
pub fn detect_quiescence<C: CostModel>(kernel: &Kernel<'_, C>) -> bool {
    kernel.is_quiescent()
}
