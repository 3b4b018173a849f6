//! Occupancy mapping on top of the spiking memory: grid cells are cues,
//! cell states are content bits. Recording an observation overwrites the
//! cell's stored state; asking "which cells are in one of these states"
//! is a recall by content fragment.

use std::collections::BTreeSet;
use std::fmt;

use snn_core::{BuildError, Raster};
use thiserror::Error;

use crate::config::{CamConfig, CamParams};
use crate::ops::{
    compile, decode, CamSession, MemoryPattern, OpError, OpRequest, Operation, OperationResult,
    Outcome, TimingContract,
};
use crate::CamNetwork;

/// Cell states, in content-bit order.
pub const STATE_LABELS: [&str; 6] = ["unknown", "initial", "goal", "free", "visited", "obstacle"];
pub const STATE_COUNT: usize = STATE_LABELS.len();

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub width: usize,
    pub height: usize,
    pub params: CamParams,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            width: 4,
            height: 4,
            params: CamParams::default(),
        }
    }
}

impl GridConfig {
    pub fn cell_count(&self) -> usize {
        self.width * self.height
    }

    /// One cue per cell, one content bit per state.
    pub fn cam_config(&self) -> CamConfig {
        let mut config = CamConfig::new(self.cell_count(), STATE_COUNT);
        config.params = self.params;
        config
    }
}

/// A mapping session script: observations first, then queries.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Scenario {
    /// `(cell, state)` pairs, applied in order; later observations of a
    /// cell replace earlier ones.
    pub observations: Vec<(usize, usize)>,
    /// Each query asks for all cells whose state is in the set.
    pub queries: Vec<BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {0}: expected `obs <cell> <state>` or `query <state>[,<state>...]`")]
    UnknownDirective(usize),
    #[error("line {0}: obs takes a cell index and a state label")]
    MalformedObservation(usize),
    #[error("line {0}: `{1}` is not a cell index")]
    BadCell(usize, String),
    #[error("line {0}: `{1}` is not a state; expected one of unknown, initial, goal, free, visited, obstacle")]
    BadState(usize, String),
    #[error("line {0}: query takes a comma-separated list of states")]
    MalformedQuery(usize),
    #[error("line {0}: observations must come before the first query")]
    ObservationAfterQuery(usize),
}

fn parse_state(label: &str) -> Option<usize> {
    STATE_LABELS.iter().position(|&s| s == label)
}

/// Parses the scenario format: one directive per line, `#` starts a
/// comment, blank lines are skipped.
///
/// ```text
/// obs 2 initial
/// obs 14 goal
/// query free,visited
/// ```
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let mut scenario = Scenario::default();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        match words.next() {
            Some("obs") => {
                if !scenario.queries.is_empty() {
                    return Err(ScenarioError::ObservationAfterQuery(lineno));
                }
                let (cell, state) = match (words.next(), words.next(), words.next()) {
                    (Some(c), Some(s), None) => (c, s),
                    _ => return Err(ScenarioError::MalformedObservation(lineno)),
                };
                let cell: usize = cell
                    .parse()
                    .map_err(|_| ScenarioError::BadCell(lineno, cell.to_string()))?;
                let state = parse_state(state)
                    .ok_or_else(|| ScenarioError::BadState(lineno, state.to_string()))?;
                scenario.observations.push((cell, state));
            }
            Some("query") => {
                let (list, extra) = (words.next(), words.next());
                let list = match (list, extra) {
                    (Some(l), None) => l,
                    _ => return Err(ScenarioError::MalformedQuery(lineno)),
                };
                let mut states = BTreeSet::new();
                for label in list.split(',') {
                    let state = parse_state(label)
                        .ok_or_else(|| ScenarioError::BadState(lineno, label.to_string()))?;
                    states.insert(state);
                }
                scenario.queries.push(states);
            }
            _ => return Err(ScenarioError::UnknownDirective(lineno)),
        }
    }
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Op(#[from] OpError),
    #[error("network response at step {0} failed integrity checks")]
    Garbled(usize),
}

/// Everything a scenario run produces.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    /// Per-cell state after all observations, replayed symbolically with
    /// last write winning; `None` for never-observed cells.
    pub state_map: Vec<Option<usize>>,
    /// Cells returned for each query, in query order.
    pub answers: Vec<BTreeSet<usize>>,
    /// Step by which the last observation is fully stored.
    pub observation_end: usize,
    /// Last simulation step the scenario needed.
    pub final_step: usize,
    pub results: Vec<OperationResult>,
    pub raster: Raster,
}

/// Renders a state map as a grid of one-letter cell codes, row by row,
/// `.` for never-observed cells.
pub fn render_map(map: &[Option<usize>], grid: GridConfig) -> String {
    let mut out = String::new();
    for row in 0..grid.height {
        for col in 0..grid.width {
            let code = match map[row * grid.width + col] {
                None => '.',
                Some(s) => STATE_LABELS[s]
                    .chars()
                    .next()
                    .expect("labels are nonempty")
                    .to_ascii_uppercase(),
            };
            out.push(code);
        }
        out.push('\n');
    }
    out
}

fn scenario_requests(scenario: &Scenario) -> Vec<OpRequest> {
    scenario
        .observations
        .iter()
        .map(|&(cell, state)| {
            OpRequest::auto(Operation::Learn(MemoryPattern {
                cue: cell,
                content: [state].into(),
            }))
        })
        .chain(
            scenario
                .queries
                .iter()
                .map(|states| OpRequest::auto(Operation::RecallByContent(states.clone()))),
        )
        .collect()
}

/// Runs a whole scenario as one pipelined batch on a fresh memory sized
/// for the grid. Observation cells and query states are validated by the
/// operation compiler; a cell index outside the grid comes back as an
/// [`OpError`].
pub fn run_scenario(grid: GridConfig, scenario: &Scenario) -> Result<ScenarioOutcome, GridError> {
    let config = grid.cam_config();
    let mut cam = CamNetwork::new(config.clone())?;
    let requests = scenario_requests(scenario);
    let contract = TimingContract::default();
    let plan = compile(&config, 0, &requests, &contract)?;
    cam.schedule(&plan.schedule)
        .expect("compiled plans schedule cleanly");
    cam.run_to(plan.until);
    let raster = cam.raster();
    let results = decode(&raster, &config, &plan.planned);

    let mut state_map = vec![None; grid.cell_count()];
    for &(cell, state) in &scenario.observations {
        state_map[cell] = Some(state);
    }
    let mut answers = Vec::with_capacity(scenario.queries.len());
    for res in &results[scenario.observations.len()..] {
        if !res.valid {
            return Err(GridError::Garbled(res.start));
        }
        match &res.outcome {
            Outcome::RecalledByContent { cues, .. } => answers.push(cues.clone()),
            _ => unreachable!("queries decode to RecalledByContent"),
        }
    }
    let observation_end = results
        .get(scenario.observations.len().wrapping_sub(1))
        .map_or(0, |last_obs| last_obs.start + contract.learn_latency);
    Ok(ScenarioOutcome {
        state_map,
        answers,
        observation_end,
        final_step: plan.until,
        results,
        raster,
    })
}

/// An interactive mapping frontend: record observations and pose queries
/// one at a time, each running to completion before returning.
#[derive(Debug)]
pub struct GridMapApp {
    session: CamSession,
    grid: GridConfig,
    map: Vec<Option<usize>>,
}

impl fmt::Display for GridMapApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_map(&self.map, self.grid))
    }
}

impl GridMapApp {
    pub fn new(grid: GridConfig) -> Result<Self, BuildError> {
        Ok(GridMapApp {
            session: CamSession::new(grid.cam_config())?,
            grid,
            map: vec![None; grid.cell_count()],
        })
    }

    pub fn grid(&self) -> GridConfig {
        self.grid
    }

    /// The map as observed so far, one entry per cell.
    pub fn believed(&self) -> &[Option<usize>] {
        &self.map
    }

    /// Stores `state` for `cell`, replacing whatever was recorded before.
    pub fn record_state(&mut self, cell: usize, state: usize) -> Result<(), GridError> {
        let res = self.session.learn(cell, [state].into())?;
        if !res.valid {
            return Err(GridError::Garbled(res.start));
        }
        self.map[cell] = Some(state);
        Ok(())
    }

    /// All cells whose recorded state is in `states`, straight from the
    /// network.
    pub fn cells_in_states(&mut self, states: BTreeSet<usize>) -> Result<BTreeSet<usize>, GridError> {
        let res = self.session.recall_by_content(states)?;
        if !res.valid {
            return Err(GridError::Garbled(res.start));
        }
        match res.outcome {
            Outcome::RecalledByContent { cues, .. } => Ok(cues),
            _ => unreachable!("content recalls decode to RecalledByContent"),
        }
    }
}

/// A 4x4 exploration transcript: a start cell, a goal, a visited trail,
/// known-free and blocked cells, and three cells never observed, followed
/// by the four queries a planner would ask.
pub fn reference_scenario_text() -> &'static str {
    "\
# 4x4 exploration transcript. Cells are indexed row-major from the
# north-west corner.
obs 0 unknown
obs 1 obstacle
obs 2 initial
obs 3 free
obs 4 unknown
obs 5 free
obs 6 visited
obs 7 obstacle
obs 8 unknown
obs 9 obstacle
obs 10 visited
obs 11 free
obs 12 visited
obs 13 visited
obs 14 goal
obs 15 free

query initial,goal,visited
query free
query obstacle
query unknown
"
}

pub fn reference_scenario() -> Scenario {
    parse_scenario(reference_scenario_text()).expect("the built-in scenario parses")
}
