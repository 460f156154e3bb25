use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::data::{rational, Value, RAT_DENOMINATOR};

use super::BeswError;

/// Ballast compartments of the desk-scale wall.
pub const COMPARTMENTS: usize = 3;
/// Dock pumps `0..DOCK_PUMPS`.
pub const DOCK_PUMPS: u8 = 3;
/// Ballast pump `c` is the primary pump of compartment `c`; pump
/// `COMPARTMENTS + c` is its rest pump.
pub const BALLAST_PUMPS: u8 = 2 * COMPARTMENTS as u8;

pub const MAX_FAILED_DOCK_PUMPS: usize = 1;
pub const MAX_FAILED_BALLAST_PUMPS: usize = 2;
pub const MAX_FAILED_VALVES: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PumpId {
    Dock(u8),
    Ballast(u8),
}

impl fmt::Display for PumpId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PumpId::Dock(n) => write!(f, "dock{n}"),
            PumpId::Ballast(n) => write!(f, "ballast{n}"),
        }
    }
}

impl FromStr for PumpId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |rest: &str, max: u8| rest.parse::<u8>().ok().filter(|n| *n < max);
        if let Some(n) = s.strip_prefix("dock").and_then(|r| parse(r, DOCK_PUMPS)) {
            return Ok(PumpId::Dock(n));
        }
        if let Some(n) = s.strip_prefix("ballast").and_then(|r| parse(r, BALLAST_PUMPS)) {
            return Ok(PumpId::Ballast(n));
        }
        Err(format!("unknown pump `{s}` (expected dock0..dock{} or ballast0..ballast{})", DOCK_PUMPS - 1, BALLAST_PUMPS - 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Operational,
    Rest,
    Ito,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Bos,
    Hi,
    Wsp,
    Das,
    Mcc,
}

macro_rules! keyword_enum {
    ($t:ty, $($v:ident => $s:literal),+) => {
        impl $t {
            pub const ALL: &'static [$t] = &[$(<$t>::$v),+];

            pub fn name(self) -> &'static str {
                match self { $(<$t>::$v => $s),+ }
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $t {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($s => Ok(<$t>::$v),)+
                    _ => Err(format!("unknown {} `{s}`", stringify!($t).to_lowercase())),
                }
            }
        }
    };
}

keyword_enum!(Phase, Operational => "operational", Rest => "rest", Ito => "ito");
keyword_enum!(Source, Bos => "bos", Hi => "hi", Wsp => "wsp", Das => "das", Mcc => "mcc");

/// Scenario parameters of a generated model. Levels are fixed-point
/// numerators over 100.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub dock_levels: Vec<i64>,
    pub river_levels: Vec<i64>,
    pub wall_slits: Vec<i64>,
    pub failed_pumps: BTreeSet<PumpId>,
    pub failed_valves: BTreeSet<u8>,
    pub pump_budget: u64,
    pub phases: BTreeSet<Phase>,
    pub command_sources: BTreeSet<Source>,
}

pub const DEFAULT_LEVELS: [i64; 6] = [-300, -240, -200, -170, 0, 100];
pub const DEFAULT_WALL_SLITS: [i64; 5] = [0, 100, 340, 350, 500];
pub const DEFAULT_PUMP_BUDGET: u64 = 3;

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            dock_levels: DEFAULT_LEVELS.to_vec(),
            river_levels: DEFAULT_LEVELS.to_vec(),
            wall_slits: DEFAULT_WALL_SLITS.to_vec(),
            failed_pumps: BTreeSet::new(),
            failed_valves: BTreeSet::new(),
            pump_budget: DEFAULT_PUMP_BUDGET,
            phases: Phase::ALL.iter().copied().collect(),
            command_sources: Source::ALL.iter().copied().collect(),
        }
    }
}

impl ScenarioConfig {
    pub fn pump_failed(&self, p: PumpId) -> bool {
        self.failed_pumps.contains(&p)
    }

    pub fn valve_failed(&self, v: usize) -> bool {
        self.failed_valves.contains(&(v as u8))
    }

    pub fn has_phase(&self, p: Phase) -> bool {
        self.phases.contains(&p)
    }

    pub fn has_source(&self, s: Source) -> bool {
        self.command_sources.contains(&s)
    }

    /// Every configuration with exactly one failed pump or valve.
    pub fn single_failures(&self) -> Vec<ScenarioConfig> {
        let mut out = Vec::new();
        let pumps = (0..DOCK_PUMPS).map(PumpId::Dock).chain((0..BALLAST_PUMPS).map(PumpId::Ballast));
        for p in pumps {
            let mut c = self.clone();
            c.failed_pumps = [p].into();
            c.failed_valves.clear();
            out.push(c);
        }
        for v in 0..COMPARTMENTS as u8 {
            let mut c = self.clone();
            c.failed_pumps.clear();
            c.failed_valves = [v].into();
            out.push(c);
        }
        out
    }

    /// Short description of the injected faults.
    pub fn fault_summary(&self) -> String {
        let mut parts: Vec<String> = self.failed_pumps.iter().map(|p| p.to_string()).collect();
        parts.extend(self.failed_valves.iter().map(|v| format!("valve{v}")));
        if parts.is_empty() {
            "no faults".into()
        } else {
            parts.join(", ")
        }
    }
}

/// Checks the configuration invariants.
pub fn validate_config(c: &ScenarioConfig) -> Result<(), BeswError> {
    let invalid = |m: String| Err(BeswError::InvalidConfig(m));
    for (name, list) in [("dockLevelList", &c.dock_levels), ("riverLevelList", &c.river_levels), ("wallSlitList", &c.wall_slits)]
    {
        if list.is_empty() {
            return invalid(format!("{name} is empty"));
        }
        if list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!("{name} is not strictly ascending"));
        }
    }
    let dock = c.failed_pumps.iter().filter(|p| matches!(p, PumpId::Dock(_))).count();
    let ballast = c.failed_pumps.len() - dock;
    if dock > MAX_FAILED_DOCK_PUMPS {
        return invalid(format!("{dock} failed dock pumps, at most {MAX_FAILED_DOCK_PUMPS} allowed"));
    }
    if ballast > MAX_FAILED_BALLAST_PUMPS {
        return invalid(format!("{ballast} failed ballast pumps, at most {MAX_FAILED_BALLAST_PUMPS} allowed"));
    }
    if c.failed_valves.len() > MAX_FAILED_VALVES {
        return invalid(format!("{} failed valves, at most {MAX_FAILED_VALVES} allowed", c.failed_valves.len()));
    }
    if let Some(v) = c.failed_valves.iter().find(|v| **v as usize >= COMPARTMENTS) {
        return invalid(format!("unknown valve {v}"));
    }
    if c.pump_budget == 0 {
        return invalid("pumpBudget must be positive".into());
    }
    if !c.has_phase(Phase::Operational) {
        return invalid("phases must include operational".into());
    }
    Ok(())
}

fn parse_level(s: &str) -> Result<i64, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: i64 = num.parse().map_err(|_| format!("bad number `{s}`"))?;
    let den: i64 = den.parse().map_err(|_| format!("bad number `{s}`"))?;
    match rational(num, den) {
        Ok(Value::Rat(r)) => Ok(r),
        _ => Err(format!("`{s}` is not a multiple of 1/{RAT_DENOMINATOR}")),
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

/// Reads a `.scn` file: `key = value` lines, `#` comments, comma-separated
/// lists. Absent keys keep their defaults.
pub fn parse_scenario(src: &str) -> Result<ScenarioConfig, BeswError> {
    let mut c = ScenarioConfig::default();
    for (i, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| BeswError::Scenario { line: i + 1, message };
        let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
        let value = value.trim();
        match key.trim() {
            "dockLevelList" => c.dock_levels = parse_list(value, parse_level).map_err(err)?,
            "riverLevelList" => c.river_levels = parse_list(value, parse_level).map_err(err)?,
            "wallSlitList" => c.wall_slits = parse_list(value, parse_level).map_err(err)?,
            "failedPumps" => c.failed_pumps = parse_list(value, str::parse).map_err(err)?.into_iter().collect(),
            "failedValves" => {
                c.failed_valves = parse_list(value, |s| {
                    s.strip_prefix("valve").and_then(|n| n.parse().ok()).ok_or(format!("unknown valve `{s}`"))
                })
                .map_err(err)?
                .into_iter()
                .collect()
            }
            "pumpBudget" => c.pump_budget = value.parse().map_err(|_| err(format!("bad pumpBudget `{value}`")))?,
            "phases" => c.phases = parse_list(value, str::parse).map_err(err)?.into_iter().collect(),
            "commandSources" => c.command_sources = parse_list(value, str::parse).map_err(err)?.into_iter().collect(),
            other => return Err(err(format!("unknown key `{other}`"))),
        }
    }
    validate_config(&c)?;
    Ok(c)
}

fn join<T: fmt::Display>(xs: impl IntoIterator<Item = T>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn levels(xs: &[i64]) -> String {
    join(xs.iter().map(|x| Value::Rat(*x)))
}

/// Writes the configuration in `.scn` syntax.
impl fmt::Display for ScenarioConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dockLevelList = {}", levels(&self.dock_levels))?;
        writeln!(f, "riverLevelList = {}", levels(&self.river_levels))?;
        writeln!(f, "wallSlitList = {}", levels(&self.wall_slits))?;
        writeln!(f, "failedPumps = {}", join(&self.failed_pumps))?;
        writeln!(f, "failedValves = {}", join(self.failed_valves.iter().map(|v| format!("valve{v}"))))?;
        writeln!(f, "pumpBudget = {}", self.pump_budget)?;
        writeln!(f, "phases = {}", join(&self.phases))?;
        writeln!(f, "commandSources = {}", join(&self.command_sources))
    }
}
