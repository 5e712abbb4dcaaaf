//! Declarative run configuration.
//!
//! Every dimensional field is written as `{"value": 3.58, "unit": "eV"}`.
//! Missing sections and fields fall back to the defaults below, and the
//! deserialized struct (defaults included) is what gets embedded in output
//! headers, so a header alone is enough to repeat a run.

use std::path::{Path, PathBuf};

use reflectal_core::curves::{
    parse_table, Curve, CurveSet, DipoleParams, ExcitedParams, MorseParams, SurrogateParams, ValueKind,
};
use reflectal_core::tdse::{Cap, FieldSpec, PropagationConfig};
use reflectal_core::units::{Dimension, Unit, UnitSystem};
use reflectal_core::RadialGrid;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// A number with its unit name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    #[serde(with = "unit_name")]
    pub unit: Unit,
}

impl Quantity {
    pub fn new(value: f64, unit: Unit) -> Self {
        Self { value, unit }
    }

    /// Value in atomic units after checking the dimension.
    pub fn au(&self, dimension: Dimension, what: &str) -> Result<f64, CliError> {
        if self.unit.dimension() != dimension {
            return Err(CliError::Config(format!(
                "{what}: unit `{}` is not a {dimension:?} unit",
                self.unit
            )));
        }
        if !self.value.is_finite() {
            return Err(CliError::Config(format!("{what}: value {} is not finite", self.value)));
        }
        Ok(UnitSystem::CODATA.to_au(self.value, self.unit))
    }

    fn from_au(value: f64, unit: Unit) -> Self {
        Self { value: UnitSystem::CODATA.from_au(value, unit), unit }
    }
}

// units travel by name so configs stay human readable
mod unit_name {
    use reflectal_core::units::Unit;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(unit: &Unit, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(unit.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Unit, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Unit>().map_err(D::Error::custom)
    }
}

const EV: Unit = Unit::ElectronVolt;
const BOHR: Unit = Unit::Bohr;
const FS: Unit = Unit::Femtosecond;

fn q(value: f64, unit: Unit) -> Quantity {
    Quantity::new(value, unit)
}

/// Top-level configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub curves: CurveSource,
    pub grid: GridConfig,
    pub field: FieldConfig,
    /// Vibrational level the wavepacket starts in.
    pub initial_v: usize,
    pub propagation: PropagationSection,
    pub eigen: EigenSection,
    pub manifold: ManifoldSection,
    /// Output directory; `--out` overrides it.
    pub output: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            curves: CurveSource::default(),
            grid: GridConfig::default(),
            field: FieldConfig::default(),
            initial_v: 0,
            propagation: PropagationSection::default(),
            eigen: EigenSection::default(),
            manifold: ManifoldSection::default(),
            output: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSource {
    Surrogate(SurrogateConfig),
    Tables(TableConfig),
}

impl Default for CurveSource {
    fn default() -> Self {
        CurveSource::Surrogate(SurrogateConfig::default())
    }
}

/// Analytic surrogate; any omitted field keeps its built-in value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateConfig {
    pub mass: Quantity,
    pub ground: MorseConfig,
    /// Channels 2, 3, 4 in order.
    pub excited: [ExcitedConfig; 3],
    /// mu_12, mu_13, mu_14 in order.
    pub dipoles: [DipoleConfig; 3],
    pub range: [Quantity; 2],
    /// Switch off mu_13 and mu_14, leaving a ground + channel 2 system.
    pub two_channel: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseConfig {
    pub de: Quantity,
    pub a_per_bohr: f64,
    pub re: Quantity,
}

/// `A exp(-b R) + C`, given by its value at the ground equilibrium distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitedConfig {
    pub vertical: Quantity,
    pub decay_per_bohr: f64,
    pub asymptote: Quantity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    pub mu0_au: f64,
    pub center: Quantity,
    pub width: Quantity,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        Self::from_params(&SurrogateParams::default())
    }
}

impl SurrogateConfig {
    pub fn from_params(p: &SurrogateParams) -> Self {
        let re = p.ground.re;
        Self {
            mass: Quantity::from_au(p.mass, Unit::Amu),
            ground: MorseConfig {
                de: Quantity::from_au(p.ground.de, EV),
                a_per_bohr: p.ground.a,
                re: q(re, BOHR),
            },
            excited: p.excited.map(|e| ExcitedConfig {
                vertical: Quantity::from_au(e.at(re), EV),
                decay_per_bohr: e.decay,
                asymptote: Quantity::from_au(e.asymptote, EV),
            }),
            dipoles: p.dipoles.map(|d| DipoleConfig {
                mu0_au: d.mu0,
                center: q(d.center, BOHR),
                width: q(d.width, BOHR),
            }),
            range: [q(p.range.0, BOHR), q(p.range.1, BOHR)],
            two_channel: false,
        }
    }

    pub fn params(&self) -> Result<SurrogateParams, CliError> {
        let re = self.ground.re.au(Dimension::Length, "curves.surrogate.ground.re")?;
        let mut excited = [ExcitedParams { amplitude: 0.0, decay: 0.0, asymptote: 0.0 }; 3];
        for (k, e) in self.excited.iter().enumerate() {
            let what = format!("curves.surrogate.excited[{k}]");
            excited[k] = ExcitedParams::through(
                e.vertical.au(Dimension::Energy, &what)?,
                re,
                e.decay_per_bohr,
                e.asymptote.au(Dimension::Energy, &what)?,
            );
        }
        let mut dipoles = [DipoleParams { mu0: 0.0, center: 0.0, width: 1.0 }; 3];
        for (k, d) in self.dipoles.iter().enumerate() {
            let what = format!("curves.surrogate.dipoles[{k}]");
            dipoles[k] = DipoleParams {
                mu0: d.mu0_au,
                center: d.center.au(Dimension::Length, &what)?,
                width: d.width.au(Dimension::Length, &what)?,
            };
        }
        let p = SurrogateParams {
            mass: self.mass.au(Dimension::Mass, "curves.surrogate.mass")?,
            ground: MorseParams {
                de: self.ground.de.au(Dimension::Energy, "curves.surrogate.ground.de")?,
                a: self.ground.a_per_bohr,
                re,
            },
            excited,
            dipoles,
            range: (
                self.range[0].au(Dimension::Length, "curves.surrogate.range")?,
                self.range[1].au(Dimension::Length, "curves.surrogate.range")?,
            ),
        };
        Ok(if self.two_channel { p.two_channel() } else { p })
    }
}

/// Tabulated curves; relative paths are taken from the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableConfig {
    pub mass: Quantity,
    /// V1..V4.
    pub potentials: [PathBuf; 4],
    /// mu_12, mu_13, mu_14.
    pub dipoles: [PathBuf; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<[String; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub r_min: Quantity,
    pub r_max: Quantity,
    /// Point count (rounded up to a power of two); takes precedence over `spacing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    pub spacing: Quantity,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { r_min: q(1.5, BOHR), r_max: q(10.0, BOHR), points: None, spacing: q(7.8e-3, BOHR) }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<RadialGrid, CliError> {
        let lo = self.r_min.au(Dimension::Length, "grid.r_min")?;
        let hi = self.r_max.au(Dimension::Length, "grid.r_max")?;
        let grid = match self.points {
            Some(n) => RadialGrid::new(lo, hi, n.next_power_of_two())?,
            None => RadialGrid::with_spacing(lo, hi, self.spacing.au(Dimension::Length, "grid.spacing")?)?,
        };
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRange {
    pub from: Quantity,
    pub to: Quantity,
    pub samples: usize,
}

impl ScanRange {
    /// Sample photon energies in hartree, endpoints included.
    pub fn omegas(&self, what: &str) -> Result<Vec<f64>, CliError> {
        let a = self.from.au(Dimension::Energy, what)?;
        let b = self.to.au(Dimension::Energy, what)?;
        if !(b > a) || self.samples == 0 {
            return Err(CliError::Config(format!("{what}: range is empty")));
        }
        if self.samples == 1 {
            return Ok(vec![a]);
        }
        let n = self.samples - 1;
        Ok((0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FieldConfig {
    /// Peak field; exclusive with `intensity`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_field: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intensity: Option<Quantity>,
    /// Single photon energy for `propagate`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Quantity>,
    /// Photon-energy grid for `scan`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_scan: Option<ScanRange>,
    pub duration: Quantity,
    /// Envelope ramp length in optical cycles.
    pub ramp_cycles: f64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        Self {
            peak_field: None,
            intensity: None,
            omega: None,
            omega_scan: None,
            duration: q(3.5, Unit::Picosecond),
            ramp_cycles: FieldSpec::DEFAULT_RAMP_CYCLES,
        }
    }
}

/// 2.8e9 V/m, the field strength of the HI control runs.
pub const DEFAULT_PEAK_FIELD: Quantity = Quantity { value: 2.8e9, unit: Unit::VoltPerMetre };

impl FieldConfig {
    pub fn f0(&self) -> Result<f64, CliError> {
        match (self.peak_field, self.intensity) {
            (Some(_), Some(_)) => Err(CliError::Config("field: give peak_field or intensity, not both".into())),
            (Some(f), None) => f.au(Dimension::Field, "field.peak_field"),
            (None, Some(i)) => {
                if i.unit.dimension() != Dimension::Intensity {
                    return Err(CliError::Config(format!("field.intensity: unit `{}` is not an intensity", i.unit)));
                }
                Ok(UnitSystem::CODATA.peak_field(i.value, i.unit)?)
            }
            (None, None) => DEFAULT_PEAK_FIELD.au(Dimension::Field, "field.peak_field"),
        }
    }

    pub fn duration(&self) -> Result<f64, CliError> {
        let t = self.duration.au(Dimension::Time, "field.duration")?;
        if t < 0.0 {
            return Err(CliError::Config("field.duration must not be negative".into()));
        }
        Ok(t)
    }

    pub fn spec(&self, omega: f64) -> Result<FieldSpec, CliError> {
        if !(self.ramp_cycles >= 0.0) {
            return Err(CliError::Config("field.ramp_cycles must not be negative".into()));
        }
        let mut spec = FieldSpec::new(self.f0()?, omega, self.duration()?);
        spec.ramp = self.ramp_cycles * spec.optical_period();
        Ok(spec)
    }

    /// The single photon energy of a `propagate` run.
    pub fn single_omega(&self) -> Result<f64, CliError> {
        match (self.omega, self.omega_scan) {
            (Some(w), None) => positive(w.au(Dimension::Energy, "field.omega")?, "field.omega"),
            (None, Some(_)) => Err(CliError::Config("propagate needs field.omega, found field.omega_scan".into())),
            (Some(_), Some(_)) => Err(CliError::Config("field: give omega or omega_scan, not both".into())),
            (None, None) => Err(CliError::Config("propagate needs field.omega".into())),
        }
    }

    /// The photon-energy grid of a `scan` run.
    pub fn scan_omegas(&self) -> Result<Vec<f64>, CliError> {
        match (self.omega, self.omega_scan) {
            (None, Some(s)) => {
                let w = s.omegas("field.omega_scan")?;
                positive(w[0], "field.omega_scan.from")?;
                Ok(w)
            }
            (Some(_), None) => Err(CliError::Config("scan needs field.omega_scan, found field.omega".into())),
            (Some(_), Some(_)) => Err(CliError::Config("field: give omega or omega_scan, not both".into())),
            (None, None) => Err(CliError::Config("scan needs field.omega_scan".into())),
        }
    }
}

fn positive(x: f64, what: &str) -> Result<f64, CliError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("{what} must be positive")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationSection {
    pub dt: Quantity,
    pub probe: Quantity,
    pub stride: usize,
    pub cap: CapConfig,
}

impl Default for PropagationSection {
    fn default() -> Self {
        let d = PropagationConfig::default();
        Self {
            dt: q(0.043, FS),
            probe: q(d.probe, BOHR),
            stride: d.stride,
            cap: CapConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapConfig {
    pub enabled: bool,
    pub onset: Quantity,
    pub width: Quantity,
    pub strength: Quantity,
    /// Channels (1..=4) the absorber acts on.
    pub channels: Vec<usize>,
}

impl Default for CapConfig {
    fn default() -> Self {
        let c = Cap::default();
        Self {
            enabled: true,
            onset: q(c.onset, BOHR),
            width: q(c.width, BOHR),
            strength: q(c.strength, Unit::Hartree),
            channels: vec![2, 3, 4],
        }
    }
}

impl PropagationSection {
    pub fn build(&self) -> Result<PropagationConfig, CliError> {
        let cap = if self.cap.enabled {
            let mut channels = [false; 4];
            for &c in &self.cap.channels {
                if !(1..=4).contains(&c) {
                    return Err(CliError::Config(format!("propagation.cap.channels: no channel {c}")));
                }
                channels[c - 1] = true;
            }
            Cap {
                onset: self.cap.onset.au(Dimension::Length, "propagation.cap.onset")?,
                width: self.cap.width.au(Dimension::Length, "propagation.cap.width")?,
                strength: self.cap.strength.au(Dimension::Energy, "propagation.cap.strength")?,
                channels,
            }
        } else {
            Cap::disabled()
        };
        Ok(PropagationConfig {
            dt: self.dt.au(Dimension::Time, "propagation.dt")?,
            cap,
            probe: self.probe.au(Dimension::Length, "propagation.probe")?,
            stride: self.stride,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenSection {
    pub n_states: usize,
}

impl Default for EigenSection {
    fn default() -> Self {
        Self { n_states: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ManifoldSection {
    pub levels: Vec<usize>,
    pub channels: Vec<usize>,
    pub window: [Quantity; 2],
    pub samples: usize,
    /// Largest separation of two roots reported as one control frequency.
    pub alignment_tolerance: Quantity,
    /// The two H + I channels searched for simultaneous suppression.
    pub pair: [usize; 2],
}

impl Default for ManifoldSection {
    fn default() -> Self {
        Self {
            levels: vec![3, 4, 5],
            channels: vec![2, 3, 4],
            window: [q(2.5, EV), q(5.5, EV)],
            samples: 2000,
            alignment_tolerance: q(0.01, EV),
            pair: [2, 4],
        }
    }
}

impl ManifoldSection {
    pub fn window(&self) -> Result<(f64, f64), CliError> {
        let a = self.window[0].au(Dimension::Energy, "manifold.window")?;
        let b = self.window[1].au(Dimension::Energy, "manifold.window")?;
        if !(b > a) || !(a > 0.0) || self.samples < 2 {
            return Err(CliError::Config("manifold.window must be a nonempty positive range with samples >= 2".into()));
        }
        Ok((a, b))
    }

    pub fn check_channels(&self) -> Result<(), CliError> {
        for &c in self.channels.iter().chain(&self.pair) {
            CurveSet::check_excited(c)?;
        }
        if self.pair[0] == self.pair[1] {
            return Err(CliError::Config("manifold.pair must name two different channels".into()));
        }
        Ok(())
    }
}

impl RunConfig {
    /// Read and parse a config file, resolving table paths against its directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let CurveSource::Tables(t) = &mut config.curves {
            for p in t.potentials.iter_mut().chain(t.dipoles.iter_mut()) {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(config)
    }

    /// Build the four-channel curve set.
    pub fn curve_set(&self) -> Result<CurveSet, CliError> {
        match &self.curves {
            CurveSource::Surrogate(s) => Ok(s.params()?.build()?),
            CurveSource::Tables(t) => t.build(),
        }
    }

    /// Compact single-line JSON of the resolved config.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

impl TableConfig {
    pub fn build(&self) -> Result<CurveSet, CliError> {
        let read = |p: &PathBuf, kind| -> Result<Curve, CliError> {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read curve table {}: {e}", p.display())))?;
            let table = parse_table(&text, kind).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            Ok(Curve::Spline(table.spline()?))
        };
        let mut potentials = Vec::with_capacity(4);
        for p in &self.potentials {
            potentials.push(read(p, ValueKind::Energy)?);
        }
        let mut dipoles = Vec::with_capacity(3);
        for p in &self.dipoles {
            dipoles.push(read(p, ValueKind::Dipole)?);
        }
        let (lo, hi) = potentials.iter().chain(&dipoles).fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), c| match c {
            Curve::Spline(s) => (lo.max(s.x_min()), hi.min(s.x_max())),
            _ => (lo, hi),
        });
        let potentials: [Curve; 4] = potentials.try_into().expect("four potentials");
        let dipoles: [Curve; 3] = dipoles.try_into().expect("three dipoles");
        let set = CurveSet::new(self.mass.au(Dimension::Mass, "curves.tables.mass")?, potentials, dipoles, (lo, hi))?;
        Ok(match &self.labels {
            Some(l) => set.with_labels(l.clone()),
            None => set,
        })
    }
}
