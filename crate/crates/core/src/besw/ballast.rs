use super::config::{PumpId, ScenarioConfig, BALLAST_PUMPS, COMPARTMENTS};

/// Whether the wall is being lowered (compartments filled) or raised
/// (compartments drained).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Closure {
    Fill,
    Drain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tilt {
    Level,
    NorthLow,
    SouthLow,
}

impl Tilt {
    pub const ALL: [Tilt; 3] = [Tilt::Level, Tilt::NorthLow, Tilt::SouthLow];

    pub fn name(self) -> &'static str {
        match self {
            Tilt::Level => "level",
            Tilt::NorthLow => "tiltNorthLow",
            Tilt::SouthLow => "tiltSouthLow",
        }
    }
}

/// Water level band of the compartments that the row acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Low,
    High,
}

impl Band {
    pub const ALL: [Band; 2] = [Band::Low, Band::High];

    pub fn name(self) -> &'static str {
        match self {
            Band::Low => "bandLow",
            Band::High => "bandHigh",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallastRow {
    pub closure: Closure,
    pub tilt: Tilt,
    pub band: Band,
    pub pumps: [bool; BALLAST_PUMPS as usize],
    pub valves: [bool; COMPARTMENTS],
}

impl BallastRow {
    pub fn pumps_on(&self) -> usize {
        self.pumps.iter().filter(|p| **p).count()
    }
}

/// Compartments acted on: draining removes water from the heavy (low)
/// side, filling adds water to the light side.
fn selected(closure: Closure, tilt: Tilt) -> &'static [usize] {
    match (closure, tilt) {
        (_, Tilt::Level) => &[0, 1, 2],
        (Closure::Drain, Tilt::NorthLow) | (Closure::Fill, Tilt::SouthLow) => &[0, 1],
        (Closure::Drain, Tilt::SouthLow) | (Closure::Fill, Tilt::NorthLow) => &[1, 2],
    }
}

/// The control table for one closure direction. Draining uses each
/// compartment's primary pump, falling back to its rest pump and then to
/// gravity through the valve. Filling opens valves, falling back to the
/// primary pump. No row switches on more than `pump_budget` pumps.
///
/// With `dso_row`, draining with a failed primary pump instead switches on
/// every working rest pump next to the working primaries, as the
/// uncorrected control table did.
pub fn ballast_table(c: &ScenarioConfig, closure: Closure, dso_row: bool) -> Vec<BallastRow> {
    let working = |p: usize| !c.pump_failed(PumpId::Ballast(p as u8));
    let budget = c.pump_budget as usize;
    let mut rows = Vec::new();
    for tilt in Tilt::ALL {
        for band in Band::ALL {
            let mut row = BallastRow { closure, tilt, band, pumps: [false; 6], valves: [false; 3] };
            let active = match closure {
                Closure::Drain => band == Band::High,
                Closure::Fill => band == Band::Low,
            };
            if active {
                let comps = selected(closure, tilt);
                match closure {
                    Closure::Drain if dso_row && comps.iter().any(|c| !working(*c)) => {
                        for &k in comps {
                            row.pumps[k] = working(k);
                        }
                        for k in 0..COMPARTMENTS {
                            row.pumps[COMPARTMENTS + k] = working(COMPARTMENTS + k);
                        }
                    }
                    Closure::Drain => {
                        for &k in comps {
                            let pump = [k, COMPARTMENTS + k].into_iter().find(|p| working(*p));
                            match pump {
                                Some(p) if row.pumps_on() < budget => row.pumps[p] = true,
                                Some(_) => {}
                                None => row.valves[k] = !c.valve_failed(k),
                            }
                        }
                    }
                    Closure::Fill => {
                        for &k in comps {
                            if !c.valve_failed(k) {
                                row.valves[k] = true;
                            } else if let Some(p) = [k, COMPARTMENTS + k].into_iter().find(|p| working(*p)) {
                                if row.pumps_on() < budget {
                                    row.pumps[p] = true;
                                }
                            }
                        }
                    }
                }
            }
            rows.push(row);
        }
    }
    rows
}
