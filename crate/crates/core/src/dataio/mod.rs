//! Labeled datasets: flow conditions, polar files, oracle labels, flip
//! augmentation, feature encoding and persistence.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{base_name, flip_geometry, is_flipped_name, AirfoilGeometry};

mod features;
mod oracle;
mod polar;
mod store;

pub use features::{encode_dataset, encode_features, flow_features, input_spec, FeatureBundle};
pub use oracle::{oracle_cl, oracle_dataset, OracleGrid};
pub use polar::{parse_polar, write_polar, Polar};
pub use store::{
    geometry_path, load_dataset, parse_dataset, save_dataset, DATASET_FORMAT_VERSION, DATASET_HEADER,
};

pub const ALPHA_RANGE: (f64, f64) = (-10.0, 30.0);
pub const MACH_RANGE: (f64, f64) = (0.3, 0.8);
pub const REYNOLDS_RANGE: (f64, f64) = (3e4, 6.5e6);
/// Labels beyond this magnitude are treated as diverged solver output.
pub const CL_LIMIT: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowCondition {
    /// Degrees.
    pub alpha: f64,
    pub mach: f64,
    pub reynolds: f64,
}

impl FlowCondition {
    pub fn new(alpha: f64, mach: f64, reynolds: f64) -> Self {
        Self {
            alpha,
            mach,
            reynolds,
        }
    }

    /// Same condition at `-alpha`.
    pub fn mirrored(&self) -> Self {
        Self {
            alpha: negate(self.alpha),
            ..*self
        }
    }

    /// One message per quantity outside the sampled flow box.
    pub fn box_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let check = |name: &str, v: f64, (lo, hi): (f64, f64), out: &mut Vec<String>| {
            if !(v >= lo && v <= hi) {
                out.push(format!("{name} {v} outside [{lo}, {hi}]"));
            }
        };
        check("alpha", self.alpha, ALPHA_RANGE, &mut out);
        check("mach", self.mach, MACH_RANGE, &mut out);
        check("reynolds", self.reynolds, REYNOLDS_RANGE, &mut out);
        out
    }

    pub fn in_box(&self) -> bool {
        self.box_violations().is_empty()
    }
}

// Negation that maps 0 to +0, so mirrored keys compare bitwise.
pub(crate) fn negate(x: f64) -> f64 {
    -x + 0.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Solver,
    Oracle,
    Flipped,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Solver => "solver",
            Origin::Oracle => "oracle",
            Origin::Flipped => "flipped",
        })
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solver" => Ok(Origin::Solver),
            "oracle" => Ok(Origin::Oracle),
            "flipped" => Ok(Origin::Flipped),
            other => Err(Error::InvalidEntry(format!("unknown origin {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DataEntry {
    /// Key into [`Dataset::airfoils`].
    pub airfoil: String,
    pub flow: FlowCondition,
    pub cl: f64,
    pub origin: Origin,
}

type EntryKey = (String, u64, u64, u64);

fn entry_key(airfoil: &str, flow: &FlowCondition) -> EntryKey {
    (
        airfoil.to_string(),
        (flow.alpha + 0.0).to_bits(),
        flow.mach.to_bits(),
        flow.reynolds.to_bits(),
    )
}

/// Entries plus the geometry table they reference. No two entries share an
/// (airfoil, alpha, mach, reynolds) key.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    entries: Vec<DataEntry>,
    airfoils: BTreeMap<String, AirfoilGeometry>,
    keys: HashSet<EntryKey>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries && self.airfoils == other.airfoils
    }
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[DataEntry] {
        &self.entries
    }

    pub fn airfoils(&self) -> &BTreeMap<String, AirfoilGeometry> {
        &self.airfoils
    }

    pub fn geometry(&self, name: &str) -> Option<&AirfoilGeometry> {
        self.airfoils.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Registers a geometry. Re-adding an identical geometry is a no-op; a
    /// different geometry under a taken name is rejected.
    pub fn add_airfoil(&mut self, g: AirfoilGeometry) -> Result<()> {
        match self.airfoils.get(&g.name) {
            Some(existing) if *existing == g => Ok(()),
            Some(_) => Err(Error::InvalidEntry(format!(
                "airfoil {:?} registered twice with different coordinates",
                g.name
            ))),
            None => {
                self.airfoils.insert(g.name.clone(), g);
                Ok(())
            }
        }
    }

    pub fn contains(&self, airfoil: &str, flow: &FlowCondition) -> bool {
        self.keys.contains(&entry_key(airfoil, flow))
    }

    /// Adds an entry after checking its label, flow box and uniqueness.
    /// Flipped entries are checked against the box at their mirrored angle.
    pub fn push(&mut self, entry: DataEntry) -> Result<()> {
        if !self.airfoils.contains_key(&entry.airfoil) {
            return Err(Error::InvalidEntry(format!("unknown airfoil {:?}", entry.airfoil)));
        }
        if !entry.cl.is_finite() || entry.cl.abs() > CL_LIMIT {
            return Err(Error::InvalidEntry(format!("cl {} outside [-{CL_LIMIT}, {CL_LIMIT}]", entry.cl)));
        }
        let boxed = match entry.origin {
            Origin::Flipped => entry.flow.mirrored(),
            _ => entry.flow,
        };
        if let Some(why) = boxed.box_violations().into_iter().next() {
            return Err(Error::InvalidEntry(why));
        }
        if !self.keys.insert(entry_key(&entry.airfoil, &entry.flow)) {
            return Err(Error::InvalidEntry(format!(
                "duplicate entry for {} at alpha {}, mach {}, Re {}",
                entry.airfoil, entry.flow.alpha, entry.flow.mach, entry.flow.reynolds
            )));
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Sorts entries by (airfoil, alpha, mach, reynolds).
    pub fn sort_canonical(&mut self) {
        self.entries.sort_by(|a, b| {
            a.airfoil
                .cmp(&b.airfoil)
                .then(a.flow.alpha.total_cmp(&b.flow.alpha))
                .then(a.flow.mach.total_cmp(&b.flow.mach))
                .then(a.flow.reynolds.total_cmp(&b.flow.reynolds))
        });
    }

    /// Entries satisfying `keep`, with the geometry table pruned to match.
    pub fn filter(&self, mut keep: impl FnMut(&DataEntry) -> bool) -> Dataset {
        let mut out = Dataset::new();
        for e in self.entries.iter().filter(|e| keep(e)) {
            if !out.airfoils.contains_key(&e.airfoil) {
                out.airfoils.insert(e.airfoil.clone(), self.airfoils[&e.airfoil].clone());
            }
            out.keys.insert(entry_key(&e.airfoil, &e.flow));
            out.entries.push(e.clone());
        }
        out
    }

    /// Split group per entry. An entry and its mirror image (the flipped
    /// geometry at the negated angle) share a group.
    pub fn split_groups(&self) -> Vec<usize> {
        let mut ids: HashMap<EntryKey, usize> = HashMap::new();
        self.entries
            .iter()
            .map(|e| {
                let g = &self.airfoils[&e.airfoil];
                let alpha = if g.is_symmetric() {
                    e.flow.alpha.abs()
                } else if is_flipped_name(&e.airfoil) {
                    negate(e.flow.alpha)
                } else {
                    e.flow.alpha
                };
                let key = entry_key(base_name(&e.airfoil), &FlowCondition { alpha, ..e.flow });
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect()
    }

    /// Name under which the mirror image of `name` is (or would be) stored:
    /// an existing airfoil with identical coordinates wins, so symmetric
    /// sections map to themselves.
    fn flip_target(&self, name: &str) -> AirfoilGeometry {
        let flipped = flip_geometry(&self.airfoils[name]);
        self.airfoils
            .values()
            .find(|g| g.y_upper == flipped.y_upper && g.y_lower == flipped.y_lower)
            .cloned()
            .unwrap_or(flipped)
    }
}

/// Adds the upside-down twin `(flip(g), -alpha, M, Re, -cl)` of every entry,
/// skipping twins whose key already exists. Idempotent.
pub fn augment_flip(data: &Dataset) -> Dataset {
    let mut out = data.clone();
    let mut targets: HashMap<String, String> = HashMap::new();
    for e in &data.entries {
        let name = match targets.get(&e.airfoil) {
            Some(n) => n.clone(),
            None => {
                let g = out.flip_target(&e.airfoil);
                let n = g.name.clone();
                out.airfoils.entry(n.clone()).or_insert(g);
                targets.insert(e.airfoil.clone(), n.clone());
                n
            }
        };
        let flow = e.flow.mirrored();
        if out.contains(&name, &flow) {
            continue;
        }
        let twin = DataEntry {
            airfoil: name,
            flow,
            cl: negate(e.cl),
            origin: Origin::Flipped,
        };
        // Mirrors of in-box entries stay in the box, so this cannot fail.
        out.push(twin).expect("mirrored entry is valid");
    }
    out
}
