use std::collections::BTreeSet;

use snn_core::{BuildError, Raster, StimulusSchedule};
use thiserror::Error;

use crate::cam::{CamNetwork, INPUT, OUTPUT};
use crate::config::CamConfig;

/// Content bits of one stored pattern.
pub type ContentSet = BTreeSet<usize>;
/// A set of cue lines.
pub type CueSet = BTreeSet<usize>;

/// Steps from an operation's start to its first output echo.
const ECHO_OFFSET: usize = 5;
/// Steps from an operation's start to its result on the output layer.
const RESULT_OFFSET: usize = 6;
/// Steps from a learn's start to its second (confirming) echo.
const SECOND_ECHO_OFFSET: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemoryPattern {
    pub cue: usize,
    pub content: ContentSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Operation {
    /// Store `content` under `cue`, superseding whatever the cue held.
    Learn(MemoryPattern),
    /// Retrieve the content stored under a cue.
    RecallByCue(usize),
    /// Retrieve every cue whose content intersects the fragment.
    RecallByContent(ContentSet),
}

/// How long operations take and how densely they may be pipelined.
///
/// An operation's results occupy the output layer through `start +
/// latency`; the next operation may start at that very step, since its
/// input wave only reaches the output five steps later.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimingContract {
    /// Steps a learn's pattern is held on the input.
    pub learn_repeat: usize,
    pub learn_latency: usize,
    pub recall_latency: usize,
}

impl Default for TimingContract {
    fn default() -> Self {
        TimingContract {
            learn_repeat: 3,
            learn_latency: SECOND_ECHO_OFFSET,
            recall_latency: RESULT_OFFSET,
        }
    }
}

impl TimingContract {
    pub fn latency(&self, op: &Operation) -> usize {
        match op {
            Operation::Learn(_) => self.learn_latency,
            _ => self.recall_latency,
        }
    }

    fn repeat(&self, op: &Operation) -> usize {
        match op {
            Operation::Learn(_) => self.learn_repeat,
            _ => 1,
        }
    }
}

/// An operation with an optional explicit start step. Without one, the
/// operation starts as early as the timing contract allows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpRequest {
    pub op: Operation,
    pub start: Option<usize>,
}

impl OpRequest {
    pub fn auto(op: Operation) -> Self {
        OpRequest { op, start: None }
    }

    pub fn at(op: Operation, start: usize) -> Self {
        OpRequest {
            op,
            start: Some(start),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedOp {
    pub op: Operation,
    pub start: usize,
}

/// A batch of operations lowered to a single stimulus schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledPlan {
    pub schedule: StimulusSchedule,
    pub planned: Vec<PlannedOp>,
    /// Last step that must execute to complete every operation; also the
    /// earliest start for a subsequent operation.
    pub until: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("operation {index}: cue {cue} out of range ({cue_count} cues)")]
    CueOutOfRange {
        index: usize,
        cue: usize,
        cue_count: usize,
    },
    #[error("operation {index}: content bit {bit} out of range ({cont_size} bits)")]
    ContentBitOutOfRange {
        index: usize,
        bit: usize,
        cont_size: usize,
    },
    #[error("operation {index}: a pattern needs at least one content bit")]
    EmptyContent { index: usize },
    #[error("operation {index}: a content fragment needs at least one bit")]
    EmptyFragment { index: usize },
    #[error("operation {index}: start {given} is before step {minimum}, the earliest the previous operation allows")]
    StartTooEarly {
        index: usize,
        given: usize,
        minimum: usize,
    },
}

impl OpError {
    /// Position of the offending operation in the request list.
    pub fn index(&self) -> usize {
        match self {
            OpError::CueOutOfRange { index, .. }
            | OpError::ContentBitOutOfRange { index, .. }
            | OpError::EmptyContent { index }
            | OpError::EmptyFragment { index }
            | OpError::StartTooEarly { index, .. } => *index,
        }
    }
}

fn check_cue(config: &CamConfig, index: usize, cue: usize) -> Result<(), OpError> {
    if cue >= config.cue_count {
        return Err(OpError::CueOutOfRange {
            index,
            cue,
            cue_count: config.cue_count,
        });
    }
    Ok(())
}

fn check_bits(config: &CamConfig, index: usize, bits: &ContentSet) -> Result<(), OpError> {
    if let Some(&bit) = bits.iter().find(|&&b| b >= config.cont_size) {
        return Err(OpError::ContentBitOutOfRange {
            index,
            bit,
            cont_size: config.cont_size,
        });
    }
    Ok(())
}

fn input_neurons(config: &CamConfig, op: &Operation) -> Vec<usize> {
    match op {
        Operation::Learn(p) => std::iter::once(config.cue_input(p.cue))
            .chain(p.content.iter().map(|&b| config.content_input(b)))
            .collect(),
        Operation::RecallByCue(cue) => vec![config.cue_input(*cue)],
        Operation::RecallByContent(frag) => {
            frag.iter().map(|&b| config.content_input(b)).collect()
        }
    }
}

/// Lowers an operation stream to one stimulus schedule, assigning start
/// steps. `base` is the earliest step the first operation may use. Explicit
/// starts must respect both `base` and the spacing after the previous
/// operation; automatic starts pack operations as densely as the contract
/// allows.
pub fn compile(
    config: &CamConfig,
    base: usize,
    requests: &[OpRequest],
    contract: &TimingContract,
) -> Result<CompiledPlan, OpError> {
    let mut schedule = StimulusSchedule::new();
    let mut planned = Vec::with_capacity(requests.len());
    let mut cursor = base;
    for (index, req) in requests.iter().enumerate() {
        match &req.op {
            Operation::Learn(p) => {
                check_cue(config, index, p.cue)?;
                check_bits(config, index, &p.content)?;
                if p.content.is_empty() {
                    return Err(OpError::EmptyContent { index });
                }
            }
            Operation::RecallByCue(cue) => check_cue(config, index, *cue)?,
            Operation::RecallByContent(frag) => {
                check_bits(config, index, frag)?;
                if frag.is_empty() {
                    return Err(OpError::EmptyFragment { index });
                }
            }
        }
        let start = match req.start {
            None => cursor,
            Some(s) if s < cursor => {
                return Err(OpError::StartTooEarly {
                    index,
                    given: s,
                    minimum: cursor,
                })
            }
            Some(s) => s,
        };
        let neurons = input_neurons(config, &req.op);
        for r in 0..contract.repeat(&req.op) {
            schedule.fire(start + r, INPUT, neurons.iter().copied());
        }
        planned.push(PlannedOp {
            op: req.op.clone(),
            start,
        });
        cursor = start + contract.latency(&req.op);
    }
    Ok(CompiledPlan {
        schedule,
        planned,
        until: cursor,
    })
}

/// What an operation produced on the output layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Learned {
        pattern: MemoryPattern,
        /// Content bits the cue used to hold and no longer does.
        forgotten: ContentSet,
    },
    RecalledByCue {
        cue: usize,
        content: ContentSet,
    },
    RecalledByContent {
        fragment: ContentSet,
        cues: CueSet,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationResult {
    pub start: usize,
    pub outcome: Outcome,
    /// True when the echo and quiet-region checks for this operation held:
    /// the injected pattern came back on schedule and nothing fired in the
    /// output region that must stay silent.
    pub valid: bool,
}

/// Interprets the output-layer fires of a completed run. The raster must
/// cover every operation through `start + latency`.
pub fn decode(raster: &Raster, config: &CamConfig, planned: &[PlannedOp]) -> Vec<OperationResult> {
    let out = raster
        .population(OUTPUT)
        .expect("raster from a memory network");
    planned
        .iter()
        .map(|p| {
            let echo = raster.neurons_at(p.start + ECHO_OFFSET, out);
            let fired = raster.neurons_at(p.start + RESULT_OFFSET, out);
            let (cues, bits) = config.split_output(&fired);
            match &p.op {
                Operation::Learn(pattern) => {
                    let expected: BTreeSet<usize> = input_neurons(config, &p.op)
                        .into_iter()
                        .collect();
                    let second = raster.neurons_at(p.start + SECOND_ECHO_OFFSET, out);
                    OperationResult {
                        start: p.start,
                        valid: echo == expected && second == expected && cues.is_empty(),
                        outcome: Outcome::Learned {
                            pattern: pattern.clone(),
                            forgotten: bits,
                        },
                    }
                }
                Operation::RecallByCue(cue) => OperationResult {
                    start: p.start,
                    valid: echo == [config.cue_input(*cue)].into_iter().collect()
                        && cues.is_empty(),
                    outcome: Outcome::RecalledByCue {
                        cue: *cue,
                        content: bits,
                    },
                },
                Operation::RecallByContent(frag) => {
                    let expected: BTreeSet<usize> =
                        frag.iter().map(|&b| config.content_input(b)).collect();
                    OperationResult {
                        start: p.start,
                        valid: echo == expected && bits.is_empty(),
                        outcome: Outcome::RecalledByContent {
                            fragment: frag.clone(),
                            cues,
                        },
                    }
                }
            }
        })
        .collect()
}

/// Eagerly runs operations one at a time on an owned memory network.
///
/// Each call compiles, runs and decodes immediately, so the next operation
/// starts one step after the previous one's latency window instead of
/// overlapping with it; batch [`compile`] is the way to pipeline at the
/// contract's minimum spacing.
#[derive(Debug)]
pub struct CamSession {
    cam: CamNetwork,
    contract: TimingContract,
}

impl CamSession {
    pub fn new(config: CamConfig) -> Result<Self, BuildError> {
        Ok(CamSession {
            cam: CamNetwork::new(config)?,
            contract: TimingContract::default(),
        })
    }

    pub fn cam(&self) -> &CamNetwork {
        &self.cam
    }

    pub fn contract(&self) -> &TimingContract {
        &self.contract
    }

    /// Compiles and runs a whole request batch, returning one result per
    /// operation, in order.
    pub fn run_script(&mut self, requests: &[OpRequest]) -> Result<Vec<OperationResult>, OpError> {
        let plan = compile(self.cam.config(), self.cam.now(), requests, &self.contract)?;
        self.cam
            .schedule(&plan.schedule)
            .expect("compiled plans schedule cleanly");
        self.cam.run_to(plan.until);
        Ok(decode(&self.cam.raster(), self.cam.config(), &plan.planned))
    }

    pub fn run_one(&mut self, op: Operation) -> Result<OperationResult, OpError> {
        let mut results = self.run_script(&[OpRequest::auto(op)])?;
        Ok(results.pop().expect("one request, one result"))
    }

    pub fn learn(&mut self, cue: usize, content: ContentSet) -> Result<OperationResult, OpError> {
        self.run_one(Operation::Learn(MemoryPattern { cue, content }))
    }

    pub fn recall_by_cue(&mut self, cue: usize) -> Result<OperationResult, OpError> {
        self.run_one(Operation::RecallByCue(cue))
    }

    pub fn recall_by_content(
        &mut self,
        fragment: ContentSet,
    ) -> Result<OperationResult, OpError> {
        self.run_one(Operation::RecallByContent(fragment))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn learn_req(cue: usize, bits: &[usize]) -> OpRequest {
        OpRequest::auto(Operation::Learn(MemoryPattern {
            cue,
            content: bits.iter().copied().collect(),
        }))
    }

    #[test]
    fn automatic_starts_pack_at_contract_spacing() {
        let config = CamConfig::new(5, 10);
        let reqs = vec![
            learn_req(0, &[0, 1]),
            OpRequest::auto(Operation::RecallByCue(0)),
            OpRequest::auto(Operation::RecallByContent([1].into())),
            learn_req(1, &[2]),
        ];
        let plan = compile(&config, 0, &reqs, &TimingContract::default()).unwrap();
        let starts: Vec<usize> = plan.planned.iter().map(|p| p.start).collect();
        assert_eq!(starts, vec![0, 7, 13, 19]);
        assert_eq!(plan.until, 26);
    }

    #[test]
    fn learn_inputs_repeat_three_steps() {
        let config = CamConfig::new(5, 10);
        let plan = compile(
            &config,
            4,
            &[learn_req(2, &[0, 9])],
            &TimingContract::default(),
        )
        .unwrap();
        let entries = plan.schedule.entries();
        assert_eq!(entries.len(), 3);
        let steps: Vec<usize> = entries.iter().map(|e| e.step).collect();
        assert_eq!(steps, vec![4, 5, 6]);
        for e in entries {
            assert_eq!(e.neurons, vec![2, 5, 14]);
        }
    }

    #[test]
    fn explicit_starts_are_validated_against_spacing() {
        let config = CamConfig::new(5, 10);
        let reqs = vec![
            OpRequest::at(Operation::RecallByCue(0), 0),
            OpRequest::at(Operation::RecallByCue(1), 3),
        ];
        let err = compile(&config, 0, &reqs, &TimingContract::default()).unwrap_err();
        assert_eq!(
            err,
            OpError::StartTooEarly {
                index: 1,
                given: 3,
                minimum: 6
            }
        );
        let reqs = vec![OpRequest::at(Operation::RecallByCue(0), 2)];
        let err = compile(&config, 5, &reqs, &TimingContract::default()).unwrap_err();
        assert!(matches!(err, OpError::StartTooEarly { minimum: 5, .. }));
    }

    #[test]
    fn malformed_operations_are_rejected() {
        let config = CamConfig::new(2, 3);
        let contract = TimingContract::default();
        assert!(matches!(
            compile(&config, 0, &[learn_req(2, &[0])], &contract),
            Err(OpError::CueOutOfRange { cue: 2, .. })
        ));
        assert!(matches!(
            compile(&config, 0, &[learn_req(0, &[3])], &contract),
            Err(OpError::ContentBitOutOfRange { bit: 3, .. })
        ));
        assert!(matches!(
            compile(&config, 0, &[learn_req(0, &[])], &contract),
            Err(OpError::EmptyContent { index: 0 })
        ));
        assert!(matches!(
            compile(
                &config,
                0,
                &[OpRequest::auto(Operation::RecallByContent(
                    ContentSet::new()
                ))],
                &contract
            ),
            Err(OpError::EmptyFragment { index: 0 })
        ));
    }
}
