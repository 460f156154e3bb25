use super::config::{Phase, ScenarioConfig};

/// Which generated model a property is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    /// Uncorrected ballast drain rows, with a failed primary ballast pump.
    DsoTable,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property {
    pub id: &'static str,
    pub title: &'static str,
    pub text: String,
    pub expected: bool,
    /// Phases the scenario must enable for the property to apply.
    pub requires: Vec<Phase>,
    pub variant: Variant,
}

impl Property {
    pub fn applies_to(&self, c: &ScenarioConfig) -> bool {
        self.requires.iter().all(|p| c.has_phase(*p))
    }
}

const OPEN_DOOR_FINISHING: &str = "\
[ true*.
  internal_controlStart(operational, processOpenDoor, active).
  (!internal_controlEnd)*
]
(forall doorOpenedSensors: List(List(Bool)). val(#doorOpenedSensors == 3 &&
     (forall i: Nat. i < 3 => #(doorOpenedSensors.i) == 2)) =>
  [
    input_dockDoorOpened(doorOpenedSensors) .
    (!internal_controlEnd)* .
    internal_controlEnd .
    (!internal_controlEnd)*
  ]
  (forall processMode: ProcessMode.
    [internal_controlStart(operational, processOpenDoor, processMode)]
    val(
      (processMode == finished)
      ==
      (exists i,j,i',j': Nat. (i < 3 && j < 2 && i' < 3 && j' < 2 && i != i' && doorOpenedSensors.i.j && doorOpenedSensors.i'.j')
) ) ) )
";

const MOVE_OUT_TRIMMING: &str = "\
[
  true* .
  internal_controlStart(operational, processMoveOut, active) .
  (!internal_controlEnd)* .
  internal_trimmingActive
]
false
";

const SUBMERGE_SPRING: &str = "\
[
  true* .
  internal_controlStart(operational, processSubmerge, active) .
  (!internal_controlEnd)*
]
(forall wallSlitIndex: Nat. val(wallSlitIndex < #wallSlitList) =>
  [
    input_wallSlit(wallSlitList.wallSlitIndex) .
    (!internal_controlEnd)*
  ]
  (forall springSetting: SpringSetting.
    [output_beslSpringSetting(springSetting)]
    val(wallSlitList.wallSlitIndex < 350/100 => (springSetting == K2))
) )
";

const REST_LEVEL_GATES: &str = "\
[ true* .
  internal_controlStart(operational, processReachRestLevel, active) .
  (!internal_controlEnd)*
]
(forall gatesOpened: List(Bool). val(#gatesOpened == 4) =>
  [
    input_dockGatesOpened(gatesOpened) .
    (!internal_controlEnd)*
  ]
  (forall dockLevelIndex: Nat. val(dockLevelIndex < #dockLevelList) =>
    [
      input_dockLevel(dockLevelList.dockLevelIndex) .
      (!internal_controlEnd)*
    ]
    (forall jackZero: Bool.
      [
        input_jointJackZero(jackZero) .
        (!internal_controlEnd)*
      ]
      (forall gatesOpen: List(Bool). val(#gatesOpen == 4) =>
        [output_dockGatesOpen(gatesOpen)]
        val(dockLevelList.dockLevelIndex <= -240/100 => (forall g: Nat. g < 4
            => (jackZero && !(gatesOpened.g) => gatesOpen.g)
) ) ) ) ) )
";

const EQUALISE_FINISHING: &str = "\
pred dockLevelEqualised(dockLevel: Rat, riverLevel: Rat) =
  dockLevel - riverLevel <= 10/100 && riverLevel - dockLevel <= 10/100;

[
  true* .
  internal_controlStart(operational, processEqualiseLevel, active) .
  (!internal_controlEnd)*
]
(forall riverLevelIndex: Nat. val(riverLevelIndex < #riverLevelList) =>
  [
    internal_riverLevel(riverLevelList.riverLevelIndex) .
    (!internal_controlEnd)*
  ]
  (forall dockLevelIndex: Nat. val(dockLevelIndex < #dockLevelList) =>
    [
      input_dockLevel(dockLevelList.dockLevelIndex) .
      (!internal_controlEnd)*
    ]
    (forall stateTimerEqualiseLevel: TimerState.
      [
        state''(timer_equalise, stateTimerEqualiseLevel) .
        (!internal_controlEnd)* .
        internal_controlEnd .
        (!internal_controlEnd)*
      ]
      (forall processMode: ProcessMode.
        [internal_controlStart(operational, processEqualiseLevel, processMode)]
        val(
          (processMode == finished)
          ==
          (stateTimerEqualiseLevel == expired || dockLevelEqualised(dockLevelList.dockLevelIndex, riverLevelList.riverLevelIndex))
) ) ) ) )
";

const CATCH_PREFIX: &str = "\
[true*]
(forall process: Process, processMode: ProcessMode.
  [
    internal_controlStart(operational, process, processMode) .
    (!internal_controlEnd)*
  ]
  (forall riverLevelIndex: Nat. val(riverLevelIndex < #riverLevelList) =>
    [
      internal_riverLevel(riverLevelList.riverLevelIndex) .
      (!internal_controlEnd)*
    ]
    (forall dc: List(Bool). val(#dc == 2) =>
      [
        input_dockDoorClosed(dc) .
        (!internal_controlEnd)*
      ]
      (forall dockLevelIndex: Nat. val(dockLevelIndex < #dockLevelList) =>
        [
          input_dockLevel(dockLevelList.dockLevelIndex) .
          (!internal_controlEnd)*
        ]
        (forall catchFasten: Bool.
          [output_dockCatchFasten(catchFasten)]
          val(
            (
              process == processEqualiseLevel ||
              process == processReachRestLevel ||
              (process == processCloseDoor && processMode == finished)
            )
            =>
            (
";

const CATCH_DOOR_CLOSED: &str = "\
              (dc.0 || dc.1)
              &&
";

const CATCH_SUFFIX: &str = "\
              (riverLevelList.riverLevelIndex - dockLevelList.dockLevelIndex < 70/100)
              =>
              catchFasten
            )
            &&
            (
              (riverLevelList.riverLevelIndex - dockLevelList.dockLevelIndex > 100/100)
              =>
              !catchFasten
) ) ) ) ) ) )
";

const FINE_POSITIONED_PUMPS: &str = "\
[true*]
(forall process: Process, processMode: ProcessMode.
  [
    internal_controlStart(operational, process, processMode) .
    (!internal_controlEnd)* .
    input_beslFinePositioned(false) .
    (!internal_controlEnd)*
  ]
  (forall p: Nat. val(p < 3) =>
    [output_dockPumpEnable(p, true)] false
  )
)
";

const SINGLE_ACTIVE_PROCESS: &str = "\
[true* . internal_controlStart . (!internal_controlEnd)* . internal_controlStart] false
";

const PUMP_BUDGET: &str = "\
pred withinBudget(ps: List(Bool)) =
  if(ps.0, 1, 0) + if(ps.1, 1, 0) + if(ps.2, 1, 0) + if(ps.3, 1, 0) + if(ps.4, 1, 0) + if(ps.5, 1, 0) <= pumpBudget;

[true*]
(forall ps: List(Bool). val(#ps == 6) =>
  [output_ballastPumps(ps)] val(withinBudget(ps))
)
";

const DEADLOCK_FREEDOM: &str = "[true*]<true>true\n";

const MOVE_OUT_SEQUENCING: &str = "\
[ true* .
  internal_controlStart(operational, processFloodDock, active) .
  (!internal_controlStart(operational, processOpenDoor, active))* .
  internal_controlStart(operational, processMoveOut, active)
] false
";

const MODE_TRANSITIONS: &str = "\
forall phase: Phase, process: Process.
  [ true* .
    internal_controlStart(phase, process, stopped) .
    (!internal_controlStart)* .
    internal_controlStart(phase, process, finished)
  ] false
  &&
  [ true* .
    internal_controlStart(phase, process, finished) .
    (!internal_controlStart)* .
    internal_controlStart(phase, process, stopped)
  ] false
";

const ITO_PROCESSES: &str = "\
[true*]
(forall process: Process, processMode: ProcessMode.
  [internal_controlStart(ito, process, processMode)]
  val(process == processOpenDoor || process == processCloseDoor)
)
";

/// The verified properties with their expected verdicts on every
/// admissible scenario.
pub fn property_corpus() -> Vec<Property> {
    let p = |id, title, text: &str, expected| Property {
        id,
        title,
        text: text.to_string(),
        expected,
        requires: Vec::new(),
        variant: Variant::Standard,
    };
    vec![
        p("P1", "OpenDoor finishes iff two switch groups report open", OPEN_DOOR_FINISHING, true),
        p("P2", "no trimming while MoveOut is active", MOVE_OUT_TRIMMING, true),
        p("P3", "Submerge sets spring K2 below a 3.5 m wall slit", SUBMERGE_SPRING, true),
        p("P4", "ReachRestLevel opens unopened gates (refined)", REST_LEVEL_GATES, true),
        p("P5", "EqualiseLevel finishes iff timer expired or levels equal", EQUALISE_FINISHING, true),
        p("P6", "catch control (refined, door closed)", &format!("{CATCH_PREFIX}{CATCH_DOOR_CLOSED}{CATCH_SUFFIX}"), true),
        p("P6-naive", "catch control without the door-closed condition", &format!("{CATCH_PREFIX}{CATCH_SUFFIX}"), false),
        p("P7", "no dock pumps after fine-positioned false", FINE_POSITIONED_PUMPS, false),
        p("P8", "one process per scan cycle", SINGLE_ACTIVE_PROCESS, true),
        p("P9", "ballast pumps within the electricity budget", PUMP_BUDGET, true),
        Property { variant: Variant::DsoTable, ..p("P9-dso", "pump budget under the uncorrected table", PUMP_BUDGET, false) },
        p("P10", "deadlock freedom", DEADLOCK_FREEDOM, true),
        p("P11", "MoveOut only after an OpenDoor cycle", MOVE_OUT_SEQUENCING, true),
        p("P12", "no direct stopped/finished transitions", MODE_TRANSITIONS, true),
        Property { requires: vec![Phase::Ito], ..p("P13", "ITO runs only door processes", ITO_PROCESSES, true) },
    ]
}
