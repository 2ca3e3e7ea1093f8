//! Network data model: case-file parsing, validation and per-unit handling.
//!
//! Case files are JSON documents. Impedances (`r`, `x`, `b_sh`) are already in
//! per unit on `base_mva`; power quantities (`p`, `q`, `p_min`, `p_max`,
//! `rating_mva`) are physical (MW / MVAr / MVA) until [`Network::to_per_unit`]
//! is applied.

use std::borrow::Cow;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// External bus label as it appears in the case file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for BusId {
    fn from(id: u32) -> Self {
        BusId(id)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bus {
    pub id: BusId,
    pub is_slack: bool,
}

/// A π-model branch. Positive flow runs from `from` to `to`.
#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub from: BusId,
    pub to: BusId,
    /// Series resistance, p.u.
    pub r: f64,
    /// Series reactance, p.u.
    pub x: f64,
    /// Total shunt susceptance, p.u. Half of it sits at each end.
    pub b_sh: f64,
    /// Thermal limit. `None` means unbounded.
    pub rating: Option<f64>,
}

impl Line {
    /// DC susceptance `1/x`. Resistance and shunts play no role here.
    pub fn susceptance(&self) -> f64 {
        1.0 / self.x
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub bus: BusId,
    /// Marginal cost, currency/MWh.
    pub cost: f64,
    pub p_min: f64,
    pub p_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Load {
    pub bus: BusId,
    pub p: f64,
    pub q: f64,
}

#[derive(Clone, Debug)]
pub struct Network {
    pub base_mva: f64,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
    pub loads: Vec<Load>,
    /// True once all power quantities are expressed in p.u. on `base_mva`.
    pub normalized: bool,
    /// Power values as they were before [`Network::to_per_unit`].
    origin: Option<Box<PhysicalValues>>,
}

/// Ignores the values remembered for the per-unit round trip.
impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.base_mva == other.base_mva
            && self.buses == other.buses
            && self.lines == other.lines
            && self.generators == other.generators
            && self.loads == other.loads
            && self.normalized == other.normalized
    }
}

#[derive(Clone, Debug)]
struct PhysicalValues {
    ratings: Vec<Option<f64>>,
    p_min: Vec<f64>,
    p_max: Vec<f64>,
    load_p: Vec<f64>,
    load_q: Vec<f64>,
}

// Wire format of the case document.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseDoc {
    base_mva: f64,
    buses: Vec<CaseBus>,
    lines: Vec<CaseLine>,
    #[serde(default)]
    generators: Vec<CaseGen>,
    #[serde(default)]
    loads: Vec<CaseLoad>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseBus {
    id: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    slack: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseLine {
    from: u32,
    to: u32,
    #[serde(default)]
    r: f64,
    x: f64,
    #[serde(default)]
    b_sh: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rating_mva: Option<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseGen {
    bus: u32,
    cost: f64,
    #[serde(default)]
    p_min: f64,
    p_max: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseLoad {
    bus: u32,
    p: f64,
    #[serde(default)]
    q: f64,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Parses a case document. The result keeps physical units (`normalized == false`).
pub fn parse_case(text: &str) -> Result<Network> {
    let doc: CaseDoc = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Syntax | Category::Eof | Category::Io => Error::Syntax {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            },
            Category::Data => Error::InvalidCase(e.to_string()),
        }
    })?;

    let net = Network {
        origin: None,
        base_mva: doc.base_mva,
        buses: doc
            .buses
            .into_iter()
            .map(|b| Bus {
                id: BusId(b.id),
                is_slack: b.slack,
            })
            .collect(),
        lines: doc
            .lines
            .into_iter()
            .map(|l| Line {
                from: BusId(l.from),
                to: BusId(l.to),
                r: l.r,
                x: l.x,
                b_sh: l.b_sh,
                rating: l.rating_mva,
            })
            .collect(),
        generators: doc
            .generators
            .into_iter()
            .map(|g| Generator {
                bus: BusId(g.bus),
                cost: g.cost,
                p_min: g.p_min,
                p_max: g.p_max,
            })
            .collect(),
        loads: doc
            .loads
            .into_iter()
            .map(|l| Load {
                bus: BusId(l.bus),
                p: l.p,
                q: l.q,
            })
            .collect(),
        normalized: false,
    };
    net.check_invariants()?;
    Ok(net)
}

/// Serializes a network back into the case format (physical units).
pub fn to_case_json(net: &Network) -> Result<String> {
    let phys = if net.normalized {
        Cow::Owned(net.clone().from_per_unit()?)
    } else {
        Cow::Borrowed(net)
    };
    let doc = CaseDoc {
        base_mva: phys.base_mva,
        buses: phys
            .buses
            .iter()
            .map(|b| CaseBus {
                id: b.id.0,
                slack: b.is_slack,
            })
            .collect(),
        lines: phys
            .lines
            .iter()
            .map(|l| CaseLine {
                from: l.from.0,
                to: l.to.0,
                r: l.r,
                x: l.x,
                b_sh: l.b_sh,
                rating_mva: l.rating,
            })
            .collect(),
        generators: phys
            .generators
            .iter()
            .map(|g| CaseGen {
                bus: g.bus.0,
                cost: g.cost,
                p_min: g.p_min,
                p_max: g.p_max,
            })
            .collect(),
        loads: phys
            .loads
            .iter()
            .map(|l| CaseLoad {
                bus: l.bus.0,
                p: l.p,
                q: l.q,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidCase(e.to_string()))
}

/// Recovers the physical value behind a per-unit quantity.
///
/// `pu * base` can land one or two ulps away from the value that was divided.
/// Among the neighbours that divide back to exactly `pu`, the one with the
/// shortest decimal form is taken, which is the literal written in the case file.
/// The remembered physical value if it still maps to `pu`, else a reconstruction.
fn restore(pu: f64, base: f64, original: Option<f64>) -> f64 {
    match original {
        Some(o) if o / base == pu => o,
        _ => restore_physical(pu, base),
    }
}

fn restore_physical(pu: f64, base: f64) -> f64 {
    let guess = pu * base;
    if !guess.is_finite() || guess == 0.0 {
        return guess;
    }
    let mut best = guess;
    let mut best_len = usize::MAX;
    let mut candidates = vec![guess];
    let (mut down, mut up) = (guess, guess);
    for _ in 0..3 {
        down = down.next_down();
        up = up.next_up();
        candidates.push(down);
        candidates.push(up);
    }
    for c in candidates {
        if c / base == pu {
            let len = format!("{c}").len();
            if len < best_len {
                best = c;
                best_len = len;
            }
        }
    }
    best
}

impl Network {
    fn check_invariants(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidCase(m));
        if !(self.base_mva.is_finite() && self.base_mva > 0.0) {
            return bad(format!("base_mva must be positive, got {}", self.base_mva));
        }
        let mut seen = HashSet::new();
        for b in &self.buses {
            if b.id.0 == 0 {
                return bad("bus ids must be positive".into());
            }
            if !seen.insert(b.id) {
                return bad(format!("duplicate bus id {}", b.id));
            }
        }
        if self.buses.iter().filter(|b| b.is_slack).count() > 1 {
            return bad("multiple slack buses".into());
        }
        let known = |id: BusId| -> Result<()> {
            if seen.contains(&id) {
                Ok(())
            } else {
                Err(Error::UnknownBus(id.0))
            }
        };
        for (k, l) in self.lines.iter().enumerate() {
            known(l.from)?;
            known(l.to)?;
            if l.from == l.to {
                return bad(format!("line {k} connects bus {} to itself", l.from));
            }
            if !(l.x.is_finite() && l.x > 0.0) {
                return bad(format!("line {k}: non-positive reactance {}", l.x));
            }
            if !(l.r.is_finite() && l.r >= 0.0) {
                return bad(format!("line {k}: negative resistance {}", l.r));
            }
            if !(l.b_sh.is_finite() && l.b_sh >= 0.0) {
                return bad(format!("line {k}: negative shunt susceptance {}", l.b_sh));
            }
            if let Some(r) = l.rating {
                if !(r.is_finite() && r > 0.0) {
                    return bad(format!("line {k}: non-positive rating {r}"));
                }
            }
        }
        for (k, g) in self.generators.iter().enumerate() {
            known(g.bus)?;
            if !g.cost.is_finite() {
                return bad(format!("generator {k}: cost not finite"));
            }
            if !(g.p_min.is_finite() && g.p_max.is_finite() && 0.0 <= g.p_min && g.p_min <= g.p_max)
            {
                return bad(format!(
                    "generator {k}: limits must satisfy 0 <= p_min <= p_max, got [{}, {}]",
                    g.p_min, g.p_max
                ));
            }
        }
        for (k, l) in self.loads.iter().enumerate() {
            known(l.bus)?;
            if !(l.p.is_finite() && l.p >= 0.0) {
                return bad(format!("load {k}: negative demand {}", l.p));
            }
            if !l.q.is_finite() {
                return bad(format!("load {k}: q not finite"));
            }
        }
        Ok(())
    }

    /// A network in physical units (MW, MVA). Use [`parse_case`] for validation.
    pub fn new(base_mva: f64, buses: Vec<Bus>, lines: Vec<Line>, generators: Vec<Generator>, loads: Vec<Load>) -> Self {
        Network {
            base_mva,
            buses,
            lines,
            generators,
            loads,
            normalized: false,
            origin: None,
        }
    }

    /// Divides every power quantity by `base_mva`. Impedances and costs are untouched.
    pub fn to_per_unit(mut self) -> Result<Network> {
        if self.normalized {
            return Err(Error::AlreadyNormalized);
        }
        let base = self.base_mva;
        self.origin = Some(Box::new(PhysicalValues {
            ratings: self.lines.iter().map(|l| l.rating).collect(),
            p_min: self.generators.iter().map(|g| g.p_min).collect(),
            p_max: self.generators.iter().map(|g| g.p_max).collect(),
            load_p: self.loads.iter().map(|l| l.p).collect(),
            load_q: self.loads.iter().map(|l| l.q).collect(),
        }));
        for l in &mut self.lines {
            l.rating = l.rating.map(|r| r / base);
        }
        for g in &mut self.generators {
            g.p_min /= base;
            g.p_max /= base;
        }
        for l in &mut self.loads {
            l.p /= base;
            l.q /= base;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Inverse of [`Network::to_per_unit`]; reproduces the original values exactly.
    pub fn from_per_unit(mut self) -> Result<Network> {
        if !self.normalized {
            return Err(Error::InvalidArgument("network is not in per unit".into()));
        }
        let base = self.base_mva;
        let origin = self.origin.take();
        let orig = |v: Option<&Vec<f64>>, k: usize| v.and_then(|v| v.get(k).copied());
        for (k, l) in self.lines.iter_mut().enumerate() {
            let o = origin.as_ref().and_then(|o| o.ratings.get(k).copied().flatten());
            l.rating = l.rating.map(|r| restore(r, base, o));
        }
        for (k, g) in self.generators.iter_mut().enumerate() {
            g.p_min = restore(g.p_min, base, orig(origin.as_ref().map(|o| &o.p_min), k));
            g.p_max = restore(g.p_max, base, orig(origin.as_ref().map(|o| &o.p_max), k));
        }
        for (k, l) in self.loads.iter_mut().enumerate() {
            l.p = restore(l.p, base, orig(origin.as_ref().map(|o| &o.load_p), k));
            l.q = restore(l.q, base, orig(origin.as_ref().map(|o| &o.load_q), k));
        }
        self.normalized = false;
        Ok(self)
    }

    /// Borrowed if already per unit, converted copy otherwise.
    pub fn per_unit(&self) -> Cow<'_, Network> {
        if self.normalized {
            Cow::Borrowed(self)
        } else {
            Cow::Owned(
                self.clone()
                    .to_per_unit()
                    .expect("physical network converts to per unit"),
            )
        }
    }

    /// Factor converting this network's power fields to MW.
    pub fn mw_scale(&self) -> f64 {
        if self.normalized {
            self.base_mva
        } else {
            1.0
        }
    }

    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_lines(&self) -> usize {
        self.lines.len()
    }

    /// Position of `id` in `buses`.
    pub fn bus_index(&self, id: BusId) -> Result<usize> {
        self.buses
            .iter()
            .position(|b| b.id == id)
            .ok_or(Error::UnknownBus(id.0))
    }

    pub(crate) fn index_map(&self) -> HashMap<BusId, usize> {
        self.buses.iter().enumerate().map(|(k, b)| (b.id, k)).collect()
    }

    /// `(from_index, to_index)` per line.
    pub fn line_endpoints(&self) -> Vec<(usize, usize)> {
        let idx = self.index_map();
        self.lines.iter().map(|l| (idx[&l.from], idx[&l.to])).collect()
    }

    pub fn bus_ids(&self) -> Vec<BusId> {
        self.buses.iter().map(|b| b.id).collect()
    }

    /// The bus marked as slack in the case, if any.
    pub fn slack(&self) -> Option<BusId> {
        self.buses.iter().find(|b| b.is_slack).map(|b| b.id)
    }

    /// Moves the slack designation to `id`.
    pub fn with_slack(mut self, id: BusId) -> Result<Network> {
        self.bus_index(id)?;
        for b in &mut self.buses {
            b.is_slack = b.id == id;
        }
        Ok(self)
    }

    /// Line labels of the form `from-to#k`, where `k` counts parallel lines from 1.
    pub fn line_keys(&self) -> Vec<String> {
        let mut count: HashMap<(BusId, BusId), usize> = HashMap::new();
        self.lines
            .iter()
            .map(|l| {
                let pair = if l.from < l.to { (l.from, l.to) } else { (l.to, l.from) };
                let k = count.entry(pair).or_insert(0);
                *k += 1;
                format!("{}-{}#{}", l.from, l.to, k)
            })
            .collect()
    }

    /// Active demand per bus, in bus order, in this network's units.
    pub fn demand_by_bus(&self) -> Vec<f64> {
        let idx = self.index_map();
        let mut d = vec![0.0; self.buses.len()];
        for l in &self.loads {
            d[idx[&l.bus]] += l.p;
        }
        d
    }

    pub fn total_demand(&self) -> f64 {
        self.loads.iter().map(|l| l.p).sum()
    }

    pub fn total_capacity(&self) -> f64 {
        self.generators.iter().map(|g| g.p_max).sum()
    }

    /// Bus position of each generator.
    pub fn generator_bus_indices(&self) -> Vec<usize> {
        let idx = self.index_map();
        self.generators.iter().map(|g| idx[&g.bus]).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "code")]
pub enum DiagnosticKind {
    Disconnected { bus: BusId },
    NoSlack,
    MultipleSlack,
    InvalidData,
    InsufficientCapacity { capacity: f64, demand: f64 },
    NoBuses,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    #[serde(flatten)]
    pub kind: DiagnosticKind,
    pub severity: Severity,
    pub message: String,
}

/// Lists every structural problem of a network. An empty list means the
/// network is connected, has exactly one slack bus and satisfies all field
/// invariants.
pub fn validate_network(net: &Network) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if net.buses.is_empty() {
        out.push(Diagnostic {
            kind: DiagnosticKind::NoBuses,
            severity: Severity::Error,
            message: "network has no buses".into(),
        });
        return out;
    }
    if let Err(e) = net.check_invariants() {
        let kind = if e.to_string().contains("multiple slack") {
            DiagnosticKind::MultipleSlack
        } else {
            DiagnosticKind::InvalidData
        };
        out.push(Diagnostic {
            kind,
            severity: Severity::Error,
            message: e.to_string(),
        });
        // Connectivity needs resolvable references.
        return out;
    }
    if net.slack().is_none() {
        out.push(Diagnostic {
            kind: DiagnosticKind::NoSlack,
            severity: Severity::Error,
            message: "no bus is marked as slack".into(),
        });
    }

    let n = net.buses.len();
    let mut adj = vec![Vec::new(); n];
    for (i, j) in net.line_endpoints() {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        for &j in &adj[i] {
            if !seen[j] {
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    for (k, bus) in net.buses.iter().enumerate() {
        if !seen[k] {
            out.push(Diagnostic {
                kind: DiagnosticKind::Disconnected { bus: bus.id },
                severity: Severity::Error,
                message: format!("bus {} is not connected to bus {}", bus.id, net.buses[0].id),
            });
        }
    }

    let capacity = net.total_capacity();
    let demand = net.total_demand();
    if capacity < demand {
        let s = net.mw_scale();
        out.push(Diagnostic {
            kind: DiagnosticKind::InsufficientCapacity {
                capacity: capacity * s,
                demand: demand * s,
            },
            severity: Severity::Warning,
            message: format!(
                "total capacity {} MW is below total demand {} MW",
                capacity * s,
                demand * s
            ),
        });
    }
    out
}
