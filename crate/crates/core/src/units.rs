//! Units and conversion factors.
//!
//! Everything inside the crate is in atomic units. Conversions happen at the
//! edges (configuration, table ingestion, CSV export) through [`convert`].

use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;
// libm-backed math; shadowed by inherent methods whenever std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Energy,
    Length,
    Time,
    Mass,
    Field,
    Intensity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Hartree,
    ElectronVolt,
    Wavenumber,
    Bohr,
    Angstrom,
    AuTime,
    Femtosecond,
    Picosecond,
    Amu,
    ElectronMass,
    AuField,
    VoltPerMetre,
    WattPerCm2,
    TerawattPerCm2,
    WattPerM2,
}

impl Unit {
    pub const ALL: [Unit; 15] = [
        Unit::Hartree,
        Unit::ElectronVolt,
        Unit::Wavenumber,
        Unit::Bohr,
        Unit::Angstrom,
        Unit::AuTime,
        Unit::Femtosecond,
        Unit::Picosecond,
        Unit::Amu,
        Unit::ElectronMass,
        Unit::AuField,
        Unit::VoltPerMetre,
        Unit::WattPerCm2,
        Unit::TerawattPerCm2,
        Unit::WattPerM2,
    ];

    pub fn dimension(self) -> Dimension {
        use Unit::*;
        match self {
            Hartree | ElectronVolt | Wavenumber => Dimension::Energy,
            Bohr | Angstrom => Dimension::Length,
            AuTime | Femtosecond | Picosecond => Dimension::Time,
            Amu | ElectronMass => Dimension::Mass,
            AuField | VoltPerMetre => Dimension::Field,
            WattPerCm2 | TerawattPerCm2 | WattPerM2 => Dimension::Intensity,
        }
    }

    pub fn name(self) -> &'static str {
        use Unit::*;
        match self {
            Hartree => "hartree",
            ElectronVolt => "eV",
            Wavenumber => "cm-1",
            Bohr => "bohr",
            Angstrom => "angstrom",
            AuTime => "au_time",
            Femtosecond => "fs",
            Picosecond => "ps",
            Amu => "amu",
            ElectronMass => "au_mass",
            AuField => "au_field",
            VoltPerMetre => "V/m",
            WattPerCm2 => "W/cm2",
            TerawattPerCm2 => "TW/cm2",
            WattPerM2 => "W/m2",
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Unit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unit = match s.trim() {
            "hartree" | "Eh" | "au_energy" => Unit::Hartree,
            "eV" | "ev" => Unit::ElectronVolt,
            "cm-1" | "cm^-1" | "wavenumber" => Unit::Wavenumber,
            "bohr" | "a0" | "au_length" => Unit::Bohr,
            "angstrom" | "Angstrom" | "A" => Unit::Angstrom,
            "au_time" => Unit::AuTime,
            "fs" => Unit::Femtosecond,
            "ps" => Unit::Picosecond,
            "amu" | "u" | "Da" => Unit::Amu,
            "au_mass" | "me" => Unit::ElectronMass,
            "au_field" => Unit::AuField,
            "V/m" => Unit::VoltPerMetre,
            "W/cm2" | "W/cm^2" => Unit::WattPerCm2,
            "TW/cm2" | "TW/cm^2" => Unit::TerawattPerCm2,
            "W/m2" | "W/m^2" => Unit::WattPerM2,
            other => return Err(Error::UnknownUnit(other.to_string())),
        };
        Ok(unit)
    }
}

/// Conversion factors from laboratory units to atomic units.
///
/// Intensities are kept in SI-derived units (W/m^2 as the base); the
/// field-intensity relation lives in [`UnitSystem::peak_field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitSystem {
    pub hartree_per_ev: f64,
    pub hartree_per_wavenumber: f64,
    pub bohr_per_angstrom: f64,
    pub au_time_per_fs: f64,
    pub au_mass_per_amu: f64,
    pub volt_per_metre_per_au_field: f64,
}

impl UnitSystem {
    pub const CODATA: UnitSystem = UnitSystem {
        hartree_per_ev: 3.674_932_217_565_5e-2,
        hartree_per_wavenumber: 4.556_335_252_912e-6,
        bohr_per_angstrom: 1.0 / 0.529_177_210_903,
        au_time_per_fs: 41.341_373_335_8,
        au_mass_per_amu: 1_822.888_486_209,
        volt_per_metre_per_au_field: 5.142_206_747_63e11,
    };

    /// Size of one `unit` expressed in the base unit of its dimension
    /// (atomic units, or W/m^2 for intensities).
    pub fn factor(&self, unit: Unit) -> f64 {
        use Unit::*;
        match unit {
            Hartree | Bohr | AuTime | ElectronMass | AuField | WattPerM2 => 1.0,
            ElectronVolt => self.hartree_per_ev,
            Wavenumber => self.hartree_per_wavenumber,
            Angstrom => self.bohr_per_angstrom,
            Femtosecond => self.au_time_per_fs,
            Picosecond => 1000.0 * self.au_time_per_fs,
            Amu => self.au_mass_per_amu,
            VoltPerMetre => 1.0 / self.volt_per_metre_per_au_field,
            WattPerCm2 => 1.0e4,
            TerawattPerCm2 => 1.0e16,
        }
    }

    pub fn convert(&self, value: f64, from: Unit, to: Unit) -> Result<f64> {
        if from.dimension() != to.dimension() {
            return Err(Error::DimensionMismatch { from, to });
        }
        if from == to {
            return Ok(value);
        }
        Ok(value * self.factor(from) / self.factor(to))
    }

    /// Express `value` (in `unit`) in atomic units.
    pub fn to_au(&self, value: f64, unit: Unit) -> f64 {
        value * self.factor(unit)
    }

    pub fn from_au(&self, value: f64, unit: Unit) -> f64 {
        value / self.factor(unit)
    }

    /// Peak field amplitude F0 (atomic units) of a CW field of cycle-averaged
    /// intensity `intensity` in `unit`, from I = eps0 c F0^2 / 2.
    pub fn peak_field(&self, intensity: f64, unit: Unit) -> Result<f64> {
        if unit.dimension() != Dimension::Intensity {
            return Err(Error::DimensionMismatch { from: unit, to: Unit::WattPerM2 });
        }
        let si = intensity * self.factor(unit);
        let volts_per_metre = (2.0 * si / (EPSILON_0 * SPEED_OF_LIGHT)).sqrt();
        Ok(volts_per_metre / self.volt_per_metre_per_au_field)
    }

    /// Intensity in W/m^2 of a CW field with peak amplitude `field_au`.
    pub fn intensity(&self, field_au: f64) -> f64 {
        let f = field_au * self.volt_per_metre_per_au_field;
        0.5 * EPSILON_0 * SPEED_OF_LIGHT * f * f
    }
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self::CODATA
    }
}

pub fn convert(value: f64, from: Unit, to: Unit) -> Result<f64> {
    UnitSystem::CODATA.convert(value, from, to)
}

pub fn ev(value: f64) -> f64 {
    value * UnitSystem::CODATA.hartree_per_ev
}

pub fn to_ev(hartree: f64) -> f64 {
    hartree / UnitSystem::CODATA.hartree_per_ev
}

pub fn fs(value: f64) -> f64 {
    value * UnitSystem::CODATA.au_time_per_fs
}

pub fn amu(value: f64) -> f64 {
    value * UnitSystem::CODATA.au_mass_per_amu
}
