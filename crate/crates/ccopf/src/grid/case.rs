use super::GridError;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BusKind {
    Slack,
    Pv,
    Pq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: usize,
    pub kind: BusKind,
    pub p_d_nom: f64,
    pub q_d_nom: f64,
    pub g_sh: f64,
    pub b_sh: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// Branch with per-unit series impedance, total line-charging susceptance
/// (half stamped at each end), off-nominal tap ratio (0 means none), and a
/// per-unit current magnitude limit (0 means unlimited).
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub from: usize,
    pub to: usize,
    pub r: f64,
    pub x: f64,
    pub b_sh: f64,
    pub tap: f64,
    pub i_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub bus: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub c2: f64,
    pub c1: f64,
}

/// Parsed network case. Bus ids are the external identifiers from the case
/// file; `bus_index` maps them to dense indices used everywhere else.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCase {
    pub name: String,
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
}

impl NetworkCase {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    /// Dense index of an external bus id.
    pub fn bus_index(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn slack_index(&self) -> usize {
        self.buses
            .iter()
            .position(|b| b.kind == BusKind::Slack)
            .expect("validated case has a slack bus")
    }

    /// Generators attached to the dense bus index.
    pub fn generators_at(&self, bus_idx: usize) -> Vec<usize> {
        let id = self.buses[bus_idx].id;
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| g.bus == id)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn line_between(&self, from_id: usize, to_id: usize) -> Option<usize> {
        self.lines
            .iter()
            .position(|l| (l.from == from_id && l.to == to_id) || (l.from == to_id && l.to == from_id))
    }

    fn validate(&self) -> Result<(), GridError> {
        let slack_count = self
            .buses
            .iter()
            .filter(|b| b.kind == BusKind::Slack)
            .count();
        if slack_count != 1 {
            return Err(GridError::Invalid(format!(
                "case must have exactly one slack bus, found {slack_count}"
            )));
        }
        for b in &self.buses {
            if !(b.v_min > 0.0 && b.v_min <= b.v_max) {
                return Err(GridError::Invalid(format!(
                    "bus {}: voltage bounds must satisfy 0 < v_min <= v_max",
                    b.id
                )));
            }
        }
        for l in &self.lines {
            if l.r == 0.0 && l.x == 0.0 {
                return Err(GridError::Invalid(format!(
                    "line {}-{}: zero impedance",
                    l.from, l.to
                )));
            }
            for end in [l.from, l.to] {
                if self.bus_index(end).is_none() {
                    return Err(GridError::Invalid(format!(
                        "line {}-{} references unknown bus {end}",
                        l.from, l.to
                    )));
                }
            }
            if l.i_max < 0.0 {
                return Err(GridError::Invalid(format!(
                    "line {}-{}: negative current limit",
                    l.from, l.to
                )));
            }
        }
        for g in &self.generators {
            if self.bus_index(g.bus).is_none() {
                return Err(GridError::Invalid(format!(
                    "generator references unknown bus {}",
                    g.bus
                )));
            }
            if g.p_min > g.p_max || g.q_min > g.q_max {

            return Err(GridError::Invalid(format!(
                    "generator at bus {}: bounds must be ordered",
                    g.bus
                )));
            }
            if g.c2 <= 0.0 {
                return Err(GridError::Invalid(format!(
                    "generator at bus {}: quadratic cost coefficient must be positive",
                    g.bus
                )));
            }
        }
        Ok(())
    }
}

/// Run-config overrides applied on top of a parsed case, keeping the case
/// file itself untouched.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CaseModifications {
    /// Zero all bus shunts and line-charging susceptances.
    #[serde(default)]
    pub zero_shunts: bool,
    /// Replacement per-unit current limits, keyed by external bus ids.
    #[serde(default)]
    pub line_ratings: Vec<LineRatingOverride>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineRatingOverride {
    pub from: usize,
    pub to: usize,
    pub i_max: f64,
}

pub fn apply_modifications(
    case: &NetworkCase,
    mods: &CaseModifications,
) -> Result<NetworkCase, GridError> {
    let mut out = case.clone();
    if mods.zero_shunts {
        for b in &mut out.buses {
            b.g_sh = 0.0;
            b.b_sh = 0.0;
        }
        for l in &mut out.lines {
            l.b_sh = 0.0;
        }
    }
    for o in &mods.line_ratings {
        let idx = out.line_between(o.from, o.to).ok_or_else(|| {
            GridError::Invalid(format!("rating override: no line {}-{}", o.from, o.to))
        })?;
        out.lines[idx].i_max = o.i_max;
    }
    Ok(out)
}

pub fn parse_case(path: impl AsRef<Path>) -> Result<NetworkCase, GridError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GridError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_case_str(&text, &path.display().to_string())
}

/// Parses the tabular case format: `base_mva`, `bus`, `branch`, and `gen`
/// records, whitespace separated, `#` comments. All quantities per-unit.
pub fn parse_case_str(text: &str, path: &str) -> Result<NetworkCase, GridError> {
    let err = |line: usize, message: String| GridError::Parse {
        path: path.to_string(),
        line,
        message,
    };
    let mut name = String::new();
    let mut base_mva = None;
    let mut buses: Vec<Bus> = Vec::new();
    let mut lines = Vec::new();
    let mut generators = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            if name.is_empty() {
                if let Some(stripped) = raw.trim().strip_prefix('#') {
                    name = stripped.trim().to_string();
                }
            }
            continue;
        }
        let mut tok = content.split_whitespace();
        let tag = tok.next().unwrap();
        let rest: Vec<&str> = tok.collect();
        let f = |s: &str, what: &str| -> Result<f64, GridError> {
            s.parse::<f64>()
                .map_err(|_| err(lineno, format!("invalid {what}: {s:?}")))
        };
        let u = |s: &str, what: &str| -> Result<usize, GridError> {
            s.parse::<usize>()
                .map_err(|_| err(lineno, format!("invalid {what}: {s:?}")))
        };
        match tag {
            "base_mva" => {
                let v = rest
                    .first()
                    .ok_or_else(|| err(lineno, "base_mva needs a value".into()))?;
                base_mva = Some(f(v, "base_mva")?);
            }
            "bus" => {
                if rest.len() != 8 {
                    return Err(err(
                        lineno,
                        format!("bus record needs 8 fields, got {}", rest.len()),
                    ));
                }
                let id = u(rest[0], "bus id")?;
                if buses.iter().any(|b: &Bus| b.id == id) {
                    return Err(err(lineno, format!("duplicate bus id {id}")));
                }
                let kind = match rest[1] {
                    "slack" => BusKind::Slack,
                    "pv" => BusKind::Pv,
                    "pq" => BusKind::Pq,
                    other => return Err(err(lineno, format!("unknown bus kind {other:?}"))),
                };
                buses.push(Bus {
                    id,
                    kind,
                    p_d_nom: f(rest[2], "pd")?,
                    q_d_nom: f(rest[3], "qd")?,
                    g_sh: f(rest[4], "gs")?,
                    b_sh: f(rest[5], "bs")?,
                    v_min: f(rest[6], "vmin")?,
                    v_max: f(rest[7], "vmax")?,
                });
            }
            "branch" => {
                if rest.len() != 7 {
                    return Err(err(
                        lineno,
                        format!("branch record needs 7 fields, got {}", rest.len()),
                    ));
                }
                lines.push(Line {
                    from: u(rest[0], "from bus")?,
                    to: u(rest[1], "to bus")?,
                    r: f(rest[2], "r")?,
                    x: f(rest[3], "x")?,
                    b_sh: f(rest[4], "b")?,
                    tap: f(rest[5], "tap")?,
                    i_max: f(rest[6], "imax")?,
                });
            }
            "gen" => {
                if rest.len() != 7 {
                    return Err(err(
                        lineno,
                        format!("gen record needs 7 fields, got {}", rest.len()),
                    ));
                }
                generators.push(Generator {
                    bus: u(rest[0], "gen bus")?,
                    p_min: f(rest[1], "pmin")?,
                    p_max: f(rest[2], "pmax")?,
                    q_min: f(rest[3], "qmin")?,
                    q_max: f(rest[4], "qmax")?,
                    c2: f(rest[5], "c2")?,
                    c1: f(rest[6], "c1")?,
                });
            }
            other => return Err(err(lineno, format!("unknown record type {other:?}"))),
        }
    }

    if buses.is_empty() {
        return Err(GridError::Parse {
            path: path.to_string(),
            line: 0,
            message: "no bus records found".into(),
        });
    }
    let case = NetworkCase {
        name,
        base_mva: base_mva.unwrap_or(100.0),
        buses,
        lines,
        generators,
    };
    case.validate()?;
    Ok(case)
}

/// Writes a case back out in the same tabular format. Numeric fields use the
/// shortest round-trip representation, so parse(serialize(case)) is
/// bit-exact.
pub fn serialize_case(case: &NetworkCase) -> String {
    let mut s = String::new();
    if !case.name.is_empty() {
        let _ = writeln!(s, "# {}", case.name);
    }
    let _ = writeln!(s, "base_mva {}", case.base_mva);
    let _ = writeln!(s, "\n# bus <id> <kind> <pd> <qd> <gs> <bs> <vmin> <vmax>");
    for b in &case.buses {
        let kind = match b.kind {
            BusKind::Slack => "slack",
            BusKind::Pv => "pv",
            BusKind::Pq => "pq",
        };
        let _ = writeln!(
            s,
            "bus {} {} {} {} {} {} {} {}",
            b.id, kind, b.p_d_nom, b.q_d_nom, b.g_sh, b.b_sh, b.v_min, b.v_max
        );
    }
    let _ = writeln!(s, "\n# branch <from> <to> <r> <x> <b> <tap> <imax>");
    for l in &case.lines {
        let _ = writeln!(
            s,
            "branch {} {} {} {} {} {} {}",
            l.from, l.to, l.r, l.x, l.b_sh, l.tap, l.i_max
        );
    }
    let _ = writeln!(s, "\n# gen <bus> <pmin> <pmax> <qmin> <qmax> <c2> <c1>");
    for g in &case.generators {
        let _ = writeln!(
            s,
            "gen {} {} {} {} {} {} {}",
            g.bus, g.p_min, g.p_max, g.q_min, g.q_max, g.c2, g.c1
        );
    }
    s
}
