//! The standard chase under three fair schedulers.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use log::{debug, trace};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    active_triggers, chase_step, format_assignment, is_active, Assignment, ChaseError, Dependency, Elem, Instance,
    StepResult,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// Saturate EGDs before every TGD step.
    EgdFair,
    /// Round-based FIFO over all discovered active triggers.
    Fifo,
    /// Like `Fifo`, but each round is shuffled with the given seed.
    Random(u64),
}

impl fmt::Display for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheduler::EgdFair => f.write_str("egd_fair"),
            Scheduler::Fifo => f.write_str("fifo"),
            Scheduler::Random(seed) => write!(f, "random({seed})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChaseConfig {
    pub scheduler: Scheduler,
    /// Maximum number of chase steps.
    pub budget: usize,
}

impl ChaseConfig {
    pub fn new(scheduler: Scheduler, budget: usize) -> Self {
        ChaseConfig { scheduler, budget }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChaseStatus {
    Terminated,
    Failed,
    BudgetExceeded,
}

impl fmt::Display for ChaseStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChaseStatus::Terminated => "terminated",
            ChaseStatus::Failed => "failed",
            ChaseStatus::BudgetExceeded => "budget",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub dep: usize,
    pub trigger: Assignment,
    pub egd: bool,
}

impl fmt::Display for StepRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "dep={} trigger={} kind={}",
            self.dep,
            format_assignment(&self.trigger),
            if self.egd { "egd" } else { "tgd" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct ChaseOutcome {
    pub status: ChaseStatus,
    pub instance: Instance,
    pub steps: Vec<StepRecord>,
}

impl ChaseOutcome {
    /// `step=<i> dep=<j> trigger={…} kind=tgd|egd` per step.
    pub fn trace(&self) -> String {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, s)| format!("step={} {s}\n", i + 1))
            .collect()
    }
}

struct Run<'a> {
    deps: &'a [Dependency],
    instance: Instance,
    next_null: u32,
    steps: Vec<StepRecord>,
    budget: usize,
    /// Null replacements made by EGD steps, applied to queued triggers.
    renamed: BTreeMap<Elem, Elem>,
}

enum Fired {
    Ok,
    Failed,
}

impl Run<'_> {
    fn resolve(&self, e: &Elem) -> Elem {
        let mut cur = e.clone();
        while let Some(next) = self.renamed.get(&cur) {
            cur = next.clone();
        }
        cur
    }

    fn refresh(&self, h: &Assignment) -> Assignment {
        h.iter().map(|(v, e)| (v.clone(), self.resolve(e))).collect()
    }

    fn exhausted(&self) -> bool {
        self.steps.len() >= self.budget
    }

    /// Fire `h` if it is still active after renaming.
    fn try_fire(&mut self, dep: usize, h: &Assignment) -> Result<Option<Fired>, ChaseError> {
        let h = self.refresh(h);
        let d = &self.deps[dep];
        if !is_active(&self.instance, d, &h) {
            return Ok(None);
        }
        let res = chase_step(&mut self.instance, d, &h, &mut self.next_null)?;
        let rec = StepRecord {
            dep,
            trigger: h,
            egd: !d.is_tgd(),
        };
        trace!("step={} {rec}", self.steps.len() + 1);
        self.steps.push(rec);
        match res {
            StepResult::Failure => Ok(Some(Fired::Failed)),
            StepResult::Applied { replaced } => {
                if let Some((old, new)) = replaced {
                    self.renamed.insert(old, new);
                }
                Ok(Some(Fired::Ok))
            }
        }
    }

    fn discover(&self, egds: bool, tgds: bool) -> Vec<(usize, Assignment)> {
        let mut out = Vec::new();
        for (j, d) in self.deps.iter().enumerate() {
            if (d.is_tgd() && tgds) || (!d.is_tgd() && egds) {
                out.extend(active_triggers(&self.instance, d).into_iter().map(|h| (j, h)));
            }
        }
        out
    }

    fn finish(self, status: ChaseStatus) -> ChaseOutcome {
        debug!("chase {status} after {} steps", self.steps.len());
        ChaseOutcome {
            status,
            instance: self.instance,
            steps: self.steps,
        }
    }
}

/// Run the standard chase from `start`.
pub fn run_standard_chase(
    deps: &[Dependency],
    start: &Instance,
    config: ChaseConfig,
) -> Result<ChaseOutcome, ChaseError> {
    run_standard_chase_observed(deps, start, config, &mut |_| {})
}

/// As [`run_standard_chase`], calling `at_egd_fixpoint` whenever the
/// `EgdFair` scheduler finishes saturating EGDs.
pub fn run_standard_chase_observed(
    deps: &[Dependency],
    start: &Instance,
    config: ChaseConfig,
    at_egd_fixpoint: &mut dyn FnMut(&Instance),
) -> Result<ChaseOutcome, ChaseError> {
    for d in deps {
        d.validate()?;
    }
    let mut run = Run {
        deps,
        instance: start.clone(),
        next_null: start.max_null().map_or(1, |n| n + 1),
        steps: Vec::new(),
        budget: config.budget,
        renamed: BTreeMap::new(),
    };
    let mut rng = match config.scheduler {
        Scheduler::Random(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        _ => None,
    };
    let egd_fair = config.scheduler == Scheduler::EgdFair;
    let mut queue: VecDeque<(usize, Assignment)> = VecDeque::new();
    loop {
        if egd_fair {
            // EGDs to fixpoint, one trigger at a time
            while let Some((j, h)) = run.discover(true, false).into_iter().next() {
                if run.exhausted() {
                    return Ok(run.finish(ChaseStatus::BudgetExceeded));
                }
                if let Some(Fired::Failed) = run.try_fire(j, &h)? {
                    return Ok(run.finish(ChaseStatus::Failed));
                }
            }
            at_egd_fixpoint(&run.instance);
        }
        let Some((j, h)) = queue.pop_front() else {
            let mut round = run.discover(!egd_fair, true);
            if round.is_empty() {
                // with egd_fair the EGDs were just saturated above
                return Ok(run.finish(ChaseStatus::Terminated));
            }
            if let Some(rng) = rng.as_mut() {
                round.shuffle(rng);
            }
            queue.extend(round);
            continue;
        };
        if run.exhausted() {
            return Ok(run.finish(ChaseStatus::BudgetExceeded));
        }
        if let Some(Fired::Failed) = run.try_fire(j, &h)? {
            return Ok(run.finish(ChaseStatus::Failed));
        }
    }
}
