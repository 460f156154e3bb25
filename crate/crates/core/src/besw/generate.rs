use std::fmt::Write;

use crate::data::Value;

use super::ballast::{ballast_table, BallastRow, Closure};
use super::config::{Phase, PumpId, ScenarioConfig, Source, DOCK_PUMPS};

/// Generator switches that alter the controller logic. The defaults give
/// the corrected controller.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GenOptions {
    /// Use the uncorrected ballast drain row for failed primary pumps.
    pub dso_table: bool,
    /// Seeded fault: trimming may run while MoveOut is active.
    pub trim_during_move_out: bool,
}

/// Operational processes in sequence order.
pub const PROCESSES: [&str; 9] = [
    "processFloodDock",
    "processOpenDoor",
    "processMoveOut",
    "processSubmerge",
    "processEmerge",
    "processMoveIn",
    "processEqualiseLevel",
    "processReachRestLevel",
    "processCloseDoor",
];

fn rat_list(xs: &[i64]) -> String {
    xs.iter().map(|x| Value::Rat(*x).to_string()).collect::<Vec<_>>().join(", ")
}

fn bools(xs: &[bool]) -> String {
    format!("[{}]", xs.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", "))
}

/// Guarded alternatives `g1 -> p1 <> g2 -> p2 <> ... <> default`.
fn cases(arms: &[(String, String)], default: &str) -> String {
    let mut s = String::new();
    for (i, (g, p)) in arms.iter().enumerate() {
        let lead = if i == 0 { "    " } else { " <> " };
        let _ = writeln!(s, "{lead}({g}) -> ({p})");
    }
    let lead = if arms.is_empty() { "    " } else { " <> " };
    let _ = write!(s, "{lead}{default}");
    s
}

/// Per-mode behaviour of one subsystem.
struct ByMode {
    active: &'static str,
    stopped: &'static str,
    finished: &'static str,
}

impl ByMode {
    const fn all(p: &'static str) -> ByMode {
        ByMode { active: p, stopped: p, finished: p }
    }

    const fn active(p: &'static str) -> ByMode {
        ByMode { active: p, stopped: "skip", finished: "skip" }
    }

    fn render(&self) -> String {
        if self.active == self.stopped && self.stopped == self.finished {
            return self.active.to_string();
        }
        format!(
            "(mode == active) -> {} <> (mode == stopped) -> {} <> {}",
            self.active, self.stopped, self.finished
        )
    }
}

struct ProcessBehaviour {
    name: &'static str,
    dock: ByMode,
    besl: ByMode,
    ballast: ByMode,
}

fn behaviours(o: &GenOptions) -> Vec<ProcessBehaviour> {
    let move_out_ballast = if o.trim_during_move_out { ByMode::all("Ballast_Trim") } else {
        ByMode { active: "Ballast_Monitor", stopped: "Ballast_Trim", finished: "Ballast_Trim" }
    };
    vec![
        ProcessBehaviour {
            name: "FloodDock",
            dock: ByMode::active("Dock_Flood"),
            besl: ByMode::all("skip"),
            ballast: ByMode::all("skip"),
        },
        ProcessBehaviour {
            name: "OpenDoor",
            dock: ByMode { active: "Dock_Door_Open", stopped: "output_dockDoorOpenStop", finished: "skip" },
            besl: ByMode::all("skip"),
            ballast: ByMode::active("Ballast_Drain"),
        },
        ProcessBehaviour {
            name: "MoveOut",
            dock: ByMode::all("skip"),
            besl: ByMode { active: "Besl_Move(directionOut)", stopped: "output_beslStop", finished: "skip" },
            ballast: move_out_ballast,
        },
        ProcessBehaviour {
            name: "Submerge",
            dock: ByMode::all("skip"),
            besl: ByMode::active("Besl_Submerge"),
            ballast: ByMode::active("Ballast_Fill"),
        },
        ProcessBehaviour {
            name: "Emerge",
            dock: ByMode::all("skip"),
            besl: ByMode::active("Besl_Emerge"),
            ballast: ByMode::active("Ballast_Drain"),
        },
        ProcessBehaviour {
            name: "MoveIn",
            dock: ByMode::all("skip"),
            besl: ByMode { active: "Besl_Move(directionIn)", stopped: "output_beslStop", finished: "skip" },
            ballast: ByMode::all("skip"),
        },
        ProcessBehaviour {
            name: "EqualiseLevel",
            dock: ByMode { active: "Dock_Equalise", stopped: "Dock_Catch_Control", finished: "Dock_Catch_Control" },
            besl: ByMode::all("skip"),
            ballast: ByMode::all("skip"),
        },
        ProcessBehaviour {
            name: "ReachRestLevel",
            dock: ByMode { active: "Dock_Rest", stopped: "Dock_Catch_Control", finished: "Dock_Catch_Control" },
            besl: ByMode::all("skip"),
            ballast: ByMode::all("skip"),
        },
        ProcessBehaviour {
            name: "CloseDoor",
            dock: ByMode {
                active: "Dock_Door_Close",
                stopped: "output_dockDoorCloseStop",
                finished: "Dock_Catch_Control",
            },
            besl: ByMode::all("skip"),
            ballast: ByMode::all("skip"),
        },
    ]
}

fn table_proc(name: &str, rows: &[BallastRow]) -> String {
    let arms: Vec<(String, String)> = rows
        .iter()
        .map(|r| {
            (
                format!("ti == {} && b == {}", r.tilt.name(), r.band.name()),
                format!("output_ballastPumps({}) . output_ballastValves({})", bools(&r.pumps), bools(&r.valves)),
            )
        })
        .collect();
    let (last, init) = arms.split_last().expect("table has rows");
    format!("proc {name}(ti: Tilt, b: Band) =\n{};\n", cases(init, &format!("({})", last.1)))
}

/// One generated command branch: a guard over the controller globals and
/// the alternatives it enables.
struct CommandArm {
    guard: String,
    options: Vec<String>,
}

fn begin(sources: &[Source], next: &str) -> Vec<String> {
    sources.iter().map(|s| format!("Begin({s}, {next})")).collect()
}

fn enter(sources: &[Source], phase: Phase, next: &str, mode: &str) -> Vec<String> {
    sources.iter().map(|s| format!("Enter({s}, {phase}, {next}, {mode})")).collect()
}

fn command_arms(c: &ScenarioConfig) -> Vec<CommandArm> {
    let pick = |xs: &[Source]| -> Vec<Source> { xs.iter().copied().filter(|s| c.has_source(*s)).collect() };
    let operators = pick(&[Source::Bos, Source::Hi, Source::Wsp]);
    let testers = pick(&[Source::Das, Source::Hi]);
    let rest = c.has_phase(Phase::Rest);
    let ito = c.has_phase(Phase::Ito);
    let idle = "processMode != active";
    let mut arms = Vec::new();

    for (i, p) in PROCESSES.iter().enumerate() {
        let next = PROCESSES[(i + 1) % PROCESSES.len()];
        let mut finished = begin(&operators, next);
        if *p == "processReachRestLevel" {
            if rest {
                finished.extend(enter(&operators, Phase::Rest, "processReachRestLevel", "active"));
            } else if ito {
                finished.extend(enter(&testers, Phase::Ito, "processOpenDoor", "active"));
            }
        }
        arms.push(CommandArm {
            guard: format!("phase == operational && process == {p} && processMode == finished"),
            options: finished,
        });
        let mut stopped = begin(&operators, p);
        if *p == "processOpenDoor" {
            stopped.extend(begin(&operators, "processCloseDoor"));
        }
        if *p == "processReachRestLevel" && rest {
            stopped.extend(enter(&operators, Phase::Rest, "processReachRestLevel", "active"));
        }
        arms.push(CommandArm {
            guard: format!("phase == operational && process == {p} && processMode == stopped"),
            options: stopped,
        });
    }
    if rest {
        let mut options = begin(&operators, "processReachRestLevel");
        options.extend(enter(&operators, Phase::Operational, "processFloodDock", "active"));
        if ito {
            options.extend(enter(&testers, Phase::Ito, "processOpenDoor", "active"));
        }
        arms.push(CommandArm { guard: format!("phase == rest && {idle}"), options });
    }
    if ito {
        let (back, mode) = if rest { (Phase::Rest, "active") } else { (Phase::Operational, "finished") };
        for (p, other) in [("processOpenDoor", "processCloseDoor"), ("processCloseDoor", "processOpenDoor")] {
            let mut options = begin(&testers, other);
            options.extend(enter(&testers, back, "processReachRestLevel", mode));
            arms.push(CommandArm {
                guard: format!("phase == ito && process == {p} && processMode == finished"),
                options: options.clone(),
            });
            options.extend(begin(&testers, p));
            arms.push(CommandArm { guard: format!("phase == ito && process == {p} && processMode == stopped"), options });
        }
    }
    arms.retain(|a| !a.options.is_empty());
    arms
}

fn dock_pumps(c: &ScenarioConfig) -> String {
    let on: Vec<String> = (0..DOCK_PUMPS)
        .filter(|p| !c.pump_failed(PumpId::Dock(*p)))
        .map(|p| format!("output_dockPumpEnable({p}, true)"))
        .collect();
    on.join(" . ")
}

/// The controller model for a scenario, in the process specification
/// language. The text assumes a validated configuration.
pub fn generate_model(c: &ScenarioConfig, o: &GenOptions) -> String {
    let mut m = String::new();
    let w = &mut m;
    let min_dock = c.dock_levels[0];
    let min_slit = c.wall_slits[0];
    let max_slit = *c.wall_slits.last().expect("validated");
    let initial_phase = if c.has_phase(Phase::Rest) { Phase::Rest } else { Phase::Operational };

    let _ = writeln!(w, "% Desk-scale retaining wall controller. Scenario faults: {}.", c.fault_summary());
    let _ = writeln!(w, "sort Phase = struct operational | rest | ito;");
    let _ = writeln!(w, "sort Process = struct {};", PROCESSES.join(" | "));
    let _ = writeln!(w, "sort ProcessMode = struct active | stopped | finished;");
    let _ = writeln!(w, "sort MainSystem = struct dock | besl | joint | ballast;");
    let _ = writeln!(w, "sort Source = struct bos | hi | wsp | das | mcc;");
    let _ = writeln!(w, "sort TimerId = struct timer_equalise;");
    let _ = writeln!(w, "sort TimerState = struct running | expired;");
    let _ = writeln!(w, "sort SpringSetting = struct K1 | K2;");
    let _ = writeln!(w, "sort Direction = struct directionOut | directionIn;");
    let _ = writeln!(w, "sort Tilt = struct level | tiltNorthLow | tiltSouthLow;");
    let _ = writeln!(w, "sort Band = struct bandLow | bandHigh;");
    let _ = writeln!(w, "sort DockLevel = Rat{{{}}};", rat_list(&c.dock_levels));
    let _ = writeln!(w, "sort RiverLevel = Rat{{{}}};", rat_list(&c.river_levels));
    let _ = writeln!(w, "sort WallSlit = Rat{{{}}};", rat_list(&c.wall_slits));
    let _ = writeln!(w, "sort DoorSensors = List(List(Bool, 2), 3);");
    let _ = writeln!(w);
    let _ = writeln!(w, "const dockLevelList: List(Rat) = [{}];", rat_list(&c.dock_levels));
    let _ = writeln!(w, "const riverLevelList: List(Rat) = [{}];", rat_list(&c.river_levels));
    let _ = writeln!(w, "const wallSlitList: List(Rat) = [{}];", rat_list(&c.wall_slits));
    let _ = writeln!(w, "const pumpBudget: Nat = {};", c.pump_budget);
    let _ = writeln!(w, "const restLevel: Rat = {};", Value::Rat(min_dock));
    let _ = writeln!(w, "const landedSlit: Rat = {};", Value::Rat(min_slit));
    let _ = writeln!(w, "const emergedSlit: Rat = {};", Value::Rat(max_slit));
    let _ = writeln!(w);
    let _ = writeln!(w, "act internal_controlStart: Phase # Process # ProcessMode;");
    let _ = writeln!(w, "act internal_controlEnd, internal_trimmingActive;");
    let _ = writeln!(w, "act internal_riverLevel: RiverLevel;");
    let _ = writeln!(w, "act input_dockLevel: DockLevel;");
    let _ = writeln!(w, "act input_dockDoorOpened: DoorSensors;");
    let _ = writeln!(w, "act input_dockDoorClosed: List(Bool, 2);");
    let _ = writeln!(w, "act input_dockGatesOpened: List(Bool, 4);");
    let _ = writeln!(w, "act input_wallSlit: WallSlit;");
    let _ = writeln!(w, "act input_wallTilt: Tilt;");
    let _ = writeln!(w, "act input_ballastLevel: Band;");
    let _ = writeln!(w, "act input_jointJackZero, input_beslFinePositioned: Bool;");
    let _ = writeln!(w, "act state'': TimerId # TimerState;");
    let _ = writeln!(w, "act output_dockGatesOpen: List(Bool, 4);");
    let _ = writeln!(w, "act output_dockCatchFasten: Bool;");
    let _ = writeln!(w, "act output_dockPumpEnable: Nat({}) # Bool;", DOCK_PUMPS - 1);
    let _ = writeln!(w, "act output_dockDoorOpen, output_dockDoorOpenStop, output_dockDoorClose, output_dockDoorCloseStop;");
    let _ = writeln!(w, "act output_beslMove: Direction;");
    let _ = writeln!(w, "act output_beslStop;");
    let _ = writeln!(w, "act output_beslSpringSetting: SpringSetting;");
    let _ = writeln!(w, "act output_jointJacksLower;");
    let _ = writeln!(w, "act output_ballastPumps: List(Bool, 6);");
    let _ = writeln!(w, "act output_ballastValves: List(Bool, 3);");
    let _ = writeln!(w, "act input_processCommand: Source # Process;");
    let _ = writeln!(w, "act input_phaseCommand: Source # Phase;");
    let _ = writeln!(w, "act input_stopCommand: Source;");
    let _ = writeln!(w, "act input_mccPermission: Bool;");
    let _ = writeln!(w);
    let _ = writeln!(w, "glob phase: Phase = {initial_phase};");
    let _ = writeln!(w, "glob process: Process = processReachRestLevel;");
    let _ = writeln!(w, "glob processMode: ProcessMode = finished;");
    let _ = writeln!(w, "glob mccAllowed: Bool = false;");
    let _ = writeln!(w);

    // Scan cycle: report the current process, run every subsystem once
    // with the mode the cycle started in, then accept at most one command.
    let _ = writeln!(w, "proc BesW =");
    let _ = writeln!(w, "    internal_controlStart(phase, process, processMode) .");
    let _ = writeln!(w, "    Scan(process, processMode) .");
    let _ = writeln!(w, "    internal_controlEnd .");
    let _ = writeln!(w, "    Commands .");
    let _ = writeln!(w, "    BesW;");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Scan(p: Process, mode: ProcessMode) =");
    let _ = writeln!(w, "    Step(p, mode, dock) . Step(p, mode, besl) . Step(p, mode, joint) . Step(p, mode, ballast);");
    let _ = writeln!(w);
    let arms: Vec<(String, String)> = PROCESSES[..PROCESSES.len() - 1]
        .iter()
        .map(|p| (format!("p == {p}"), format!("Process_{}(mode, system)", &p["process".len()..])))
        .collect();
    let last = &PROCESSES[PROCESSES.len() - 1]["process".len()..];
    let _ = writeln!(
        w,
        "proc Step(p: Process, mode: ProcessMode, system: MainSystem) =\n{};\n",
        cases(&arms, &format!("Process_{last}(mode, system)"))
    );

    for b in behaviours(o) {
        let _ = writeln!(w, "proc Process_{}(mode: ProcessMode, system: MainSystem) =", b.name);
        let _ = writeln!(w, "    (system == dock) -> ({})", b.dock.render());
        let _ = writeln!(w, " <> (system == besl) -> ({})", b.besl.render());
        let _ = writeln!(w, " <> (system == joint) -> Joint_Jack_Control");
        let _ = writeln!(w, " <> ({});", b.ballast.render());
        let _ = writeln!(w);
    }

    let two_groups = "((dos[0][0] || dos[0][1]) && (dos[1][0] || dos[1][1])) \
        || ((dos[0][0] || dos[0][1]) && (dos[2][0] || dos[2][1])) \
        || ((dos[1][0] || dos[1][1]) && (dos[2][0] || dos[2][1]))";
    let equalised = "d - r <= 10/100 && r - d <= 10/100";

    // Dock.
    let _ = writeln!(w, "proc Dock_Flood =");
    let _ = writeln!(w, "    sum r: RiverLevel . internal_riverLevel(r) .");
    let _ = writeln!(w, "    sum d: DockLevel . input_dockLevel(d) .");
    let _ = writeln!(w, "    (({equalised}) -> processMode := finished <> output_dockGatesOpen([true, true, true, true]));");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Dock_Door_Open =");
    let _ = writeln!(w, "    output_dockCatchFasten(false) . output_dockDoorOpen .");
    let _ = writeln!(w, "    sum dos: DoorSensors . input_dockDoorOpened(dos) .");
    let _ = writeln!(w, "    (({two_groups}) -> processMode := finished <> done);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Dock_Door_Close =");
    let _ = writeln!(w, "    output_dockDoorClose .");
    let _ = writeln!(w, "    sum dc: List(Bool, 2) . input_dockDoorClosed(dc) .");
    let _ = writeln!(w, "    ((dc[0] && dc[1]) -> processMode := finished <> done);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Dock_Catch_Control =");
    let _ = writeln!(w, "    sum r: RiverLevel . internal_riverLevel(r) .");
    let _ = writeln!(w, "    sum dc: List(Bool, 2) . input_dockDoorClosed(dc) .");
    let _ = writeln!(w, "    sum d: DockLevel . input_dockLevel(d) .");
    let _ = writeln!(w, "    Catch(r, d, dc);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Catch(r: Rat, d: Rat, dc: List(Bool, 2)) =");
    let _ = writeln!(w, "    ((dc[0] || dc[1]) && r - d < 70/100) -> output_dockCatchFasten(true)");
    let _ = writeln!(w, " <> (r - d < 70/100 || r - d > 100/100) -> output_dockCatchFasten(false)");
    let _ = writeln!(w, " <> done;");
    let _ = writeln!(w);
    // The fine-positioned input is read but deliberately has no effect on
    // the dock pumps.
    let _ = writeln!(w, "proc Dock_Equalise =");
    let _ = writeln!(w, "    sum r: RiverLevel . internal_riverLevel(r) .");
    let _ = writeln!(w, "    sum dc: List(Bool, 2) . input_dockDoorClosed(dc) .");
    let _ = writeln!(w, "    sum d: DockLevel . input_dockLevel(d) .");
    let _ = writeln!(w, "    Catch(r, d, dc) .");
    let _ = writeln!(w, "    sum fp: Bool . input_beslFinePositioned(fp) .");
    let _ = writeln!(w, "    sum t: TimerState . state''(timer_equalise, t) .");
    let _ = writeln!(w, "    Equalise(r, d, t);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Equalise(r: Rat, d: Rat, t: TimerState) =");
    let _ = writeln!(w, "    (t == expired || ({equalised})) -> processMode := finished");
    let _ = writeln!(w, " <> (d > r) -> ({})", dock_pumps(c));
    let _ = writeln!(w, " <> output_dockGatesOpen([true, true, true, true]);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Dock_Rest =");
    let _ = writeln!(w, "    sum r: RiverLevel . internal_riverLevel(r) .");
    let _ = writeln!(w, "    sum dc: List(Bool, 2) . input_dockDoorClosed(dc) .");
    let _ = writeln!(w, "    sum go: List(Bool, 4) . input_dockGatesOpened(go) .");
    let _ = writeln!(w, "    sum d: DockLevel . input_dockLevel(d) .");
    let _ = writeln!(w, "    Catch(r, d, dc) .");
    let _ = writeln!(w, "    sum z: Bool . input_jointJackZero(z) .");
    let _ = writeln!(w, "    Gates(d, z, go) .");
    let _ = writeln!(w, "    ((d <= restLevel) -> processMode := finished <> done);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Gates(d: Rat, z: Bool, go: List(Bool, 4)) =");
    let _ = writeln!(w, "    (d <= -240/100 && z) -> output_dockGatesOpen([!go[0], !go[1], !go[2], !go[3]])");
    let _ = writeln!(w, " <> output_dockGatesOpen([false, false, false, false]);");
    let _ = writeln!(w);

    // BesL.
    let _ = writeln!(w, "proc Besl_Move(dir: Direction) =");
    let _ = writeln!(w, "    output_beslMove(dir) .");
    let _ = writeln!(w, "    sum fp: Bool . input_beslFinePositioned(fp) .");
    let _ = writeln!(w, "    ((fp) -> processMode := finished <> done);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Besl_Submerge =");
    let _ = writeln!(w, "    sum w: WallSlit . input_wallSlit(w) .");
    let _ = writeln!(w, "    ((w < 350/100) -> output_beslSpringSetting(K2) <> output_beslSpringSetting(K1)) .");
    let _ = writeln!(w, "    ((w <= landedSlit) -> processMode := finished <> done);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Besl_Emerge =");
    let _ = writeln!(w, "    sum w: WallSlit . input_wallSlit(w) .");
    let _ = writeln!(w, "    ((w >= emergedSlit) -> processMode := finished <> done);");
    let _ = writeln!(w);

    // Ball joint: six jacks observed as one zero-position signal.
    let _ = writeln!(w, "proc Joint_Jack_Control =");
    let _ = writeln!(w, "    sum z: Bool . input_jointJackZero(z) . ((z) -> skip <> output_jointJacksLower);");
    let _ = writeln!(w);

    // Ballast.
    let _ = writeln!(w, "proc Ballast_Monitor = sum ti: Tilt . input_wallTilt(ti);");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Ballast_Trim =");
    let _ = writeln!(w, "    sum ti: Tilt . input_wallTilt(ti) . ((ti != level) -> internal_trimmingActive <> done);");
    let _ = writeln!(w);
    for (name, table) in [("Drain", "Ballast_Drain_Table"), ("Fill", "Ballast_Fill_Table")] {
        let _ = writeln!(w, "proc Ballast_{name} =");
        let _ = writeln!(w, "    sum ti: Tilt . input_wallTilt(ti) .");
        let _ = writeln!(w, "    sum b: Band . input_ballastLevel(b) .");
        let _ = writeln!(w, "    ((ti != level) -> internal_trimmingActive <> done) .");
        let _ = writeln!(w, "    {table}(ti, b);");
        let _ = writeln!(w);
    }
    let _ = writeln!(w, "{}", table_proc("Ballast_Drain_Table", &ballast_table(c, Closure::Drain, o.dso_table)));
    let _ = writeln!(w, "{}", table_proc("Ballast_Fill_Table", &ballast_table(c, Closure::Fill, o.dso_table)));

    // Commands, accepted between scan cycles.
    let permission = c.has_source(Source::Hi) && c.has_source(Source::Mcc);
    let _ = writeln!(w, "proc Commands =");
    let _ = writeln!(w, "    (processMode == active) -> Stop_Commands <> Start_Commands");
    if permission {
        let _ = writeln!(w, "  + input_mccPermission(!mccAllowed) . mccAllowed := (!mccAllowed)");
    }
    let _ = writeln!(w, "  + done;");
    let _ = writeln!(w);
    let mut stops: Vec<String> = Vec::new();
    for s in [Source::Bos, Source::Hi, Source::Wsp] {
        if c.has_source(s) {
            let guard = if s == Source::Hi { String::new() } else { "(phase != ito) -> ".into() };
            stops.push(format!("{guard}input_stopCommand({s}) . processMode := stopped"));
        }
    }
    if c.has_source(Source::Das) && c.has_phase(Phase::Ito) {
        stops.push("(phase == ito) -> input_stopCommand(das) . processMode := stopped".into());
    }
    if permission {
        stops.push("(mccAllowed) -> input_stopCommand(mcc) . processMode := stopped".into());
    }
    stops.push("done".into());
    let _ = writeln!(w, "proc Stop_Commands =\n    {};\n", stops.join("\n  + "));
    let arms = command_arms(c);
    let mut starts: Vec<String> =
        arms.iter().map(|a| format!("({}) -> ({})", a.guard, a.options.join("\n        + "))).collect();
    starts.push("done".into());
    let _ = writeln!(w, "proc Start_Commands =\n    {};\n", starts.join("\n  + "));
    let _ = writeln!(w, "proc Begin(src: Source, next: Process) =");
    let _ = writeln!(w, "    input_processCommand(src, next) . process := next . processMode := active;");
    let _ = writeln!(w);
    let _ = writeln!(w, "proc Enter(src: Source, ph: Phase, next: Process, m: ProcessMode) =");
    let _ = writeln!(w, "    input_phaseCommand(src, ph) . phase := ph . process := next . processMode := m;");
    let _ = writeln!(w);
    let _ = writeln!(w, "init BesW;");
    m
}
