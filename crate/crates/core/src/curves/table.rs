use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spline::CubicSpline;
use crate::units::{Dimension, Unit, UnitSystem};

/// What a table's value column holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// Potential energy; converted to hartree.
    Energy,
    /// Transition dipole; converted to atomic units (e a0).
    Dipole,
}

const DEBYE_IN_AU: f64 = 0.393_430_2;

/// Tabulated curve samples in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
    /// Units declared in the source file, e.g. `("angstrom", "cm-1")`.
    pub source_units: (String, String),
}

impl CurveTable {
    pub fn spline(&self) -> Result<CubicSpline> {
        CubicSpline::new(self.r.clone(), self.values.clone())
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Parse a curve table.
///
/// Format: `#` starts a comment line; a `# units: <length> <value>` directive
/// is required before the first data row; data rows are `R value` separated
/// by whitespace with strictly increasing R.
pub fn parse_table(text: &str, kind: ValueKind) -> Result<CurveTable> {
    let units = UnitSystem::CODATA;
    let mut declared: Option<(Unit, f64, String, String)> = None;
    let mut r = Vec::new();
    let mut values = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(spec) = comment.strip_prefix("units:") {
                declared = Some(parse_units(spec, kind, line_no)?);
            }
            continue;
        }
        let Some((length_unit, value_scale, _, _)) = declared.as_ref() else {
            return Err(Error::Parse {
                line: line_no,
                message: "data row before the `# units: <length> <value>` directive".to_string(),
            });
        };
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected two columns, got `{line}`"),
            });
        };
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("`{s}` is not a number"),
            })
        };
        let rv = units.to_au(parse(a)?, *length_unit);
        let vv = parse(b)? * value_scale;
        if let Some(&prev) = r.last() {
            if !(rv > prev) {
                return Err(Error::NonMonotone { line: line_no });
            }
        }
        r.push(rv);
        values.push(vv);
    }

    if r.len() < CubicSpline::MIN_KNOTS {
        return Err(Error::TooFewPoints { found: r.len(), needed: CubicSpline::MIN_KNOTS });
    }
    let (_, _, lu, vu) = declared.expect("rows imply a units directive");
    Ok(CurveTable { r, values, source_units: (lu, vu) })
}

fn parse_units(spec: &str, kind: ValueKind, line: usize) -> Result<(Unit, f64, String, String)> {
    let mut parts = spec.split_whitespace();
    let (Some(lu), Some(vu), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse {
            line,
            message: "units directive must be `# units: <length> <value>`".to_string(),
        });
    };
    let length: Unit = lu.parse()?;
    if length.dimension() != Dimension::Length {
        return Err(Error::DimensionMismatch { from: length, to: Unit::Bohr });
    }
    let scale = match kind {
        ValueKind::Energy => {
            let u: Unit = vu.parse()?;
            if u.dimension() != Dimension::Energy {
                return Err(Error::DimensionMismatch { from: u, to: Unit::Hartree });
            }
            UnitSystem::CODATA.factor(u)
        }
        ValueKind::Dipole => match vu {
            "au" | "ea0" => 1.0,
            "debye" | "D" => DEBYE_IN_AU,
            other => return Err(Error::UnknownUnit(other.to_string())),
        },
    };
    Ok((length, scale, lu.to_string(), vu.to_string()))
}
