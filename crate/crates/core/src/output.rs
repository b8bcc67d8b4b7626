//! CSV artifacts: one header line, `.` decimals, 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use crate::phase::BinodalPoint;
use crate::singularity::{Caustic, PhaseCrossing, PhaseCurvePoint, ShockFront};
use crate::solution::Profile;

/// Round-trip formatting for a float.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Accumulates rows in memory and writes the file in one go.
#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: usize,
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        Self {
            columns: header.len(),
            text: format!("{}\n", header.join(",")),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(
            fields.len(),
            self.columns,
            "row width does not match header"
        );
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn write(&self, dir: &Path, name: &str) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let path = dir.join(name);
        fs::write(&path, &self.text)?;
        Ok(path)
    }
}

pub fn binodal_table(points: &[BinodalPoint]) -> CsvTable {
    let mut t = CsvTable::new(&["T", "p", "rho_gas", "rho_liq"]);
    for b in points {
        t.row(&[
            num(b.temperature),
            num(b.pressure),
            num(b.rho_gas),
            num(b.rho_liq),
        ]);
    }
    t
}

pub fn profile_table(profiles: &[Profile]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "branch_id", "rho", "x", "u"]);
    for p in profiles {
        for q in &p.points {
            t.row(&[
                num(p.t),
                q.branch_id.to_string(),
                num(q.rho),
                num(q.x),
                num(q.u),
            ]);
        }
    }
    t
}

pub fn profile_excluded_table(profiles: &[Profile]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "rho", "reason"]);
    for p in profiles {
        for e in &p.excluded {
            t.row(&[
                num(p.t),
                num(e.rho),
                format!("\"{}\"", e.reason.replace('"', "'")),
            ]);
        }
    }
    t
}

pub fn caustic_table(caustic: &Caustic) -> CsvTable {
    let mut t = CsvTable::new(&["sign", "rho", "t", "x"]);
    for branch in [&caustic.plus, &caustic.minus] {
        for p in &branch.points {
            t.row(&[
                branch.sign.label().to_string(),
                num(p.rho),
                num(p.t),
                num(p.x),
            ]);
        }
    }
    t
}

pub fn caustic_excluded_table(caustic: &Caustic) -> CsvTable {
    let mut t = CsvTable::new(&["rho_lo", "rho_hi"]);
    for &(a, b) in &caustic.excluded {
        t.row(&[num(a), num(b)]);
    }
    t
}

pub fn shock_table(front: &ShockFront) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x_s", "rho1", "rho2"]);
    for p in &front.points {
        t.row(&[num(p.t), num(p.x), num(p.rho1), num(p.rho2)]);
    }
    t
}

pub fn shock_alternatives_table(front: &ShockFront) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x_s", "rho1", "rho2"]);
    for p in &front.alternatives {
        t.row(&[num(p.t), num(p.x), num(p.rho1), num(p.rho2)]);
    }
    t
}

pub fn phase_curve_table(points: &[PhaseCurvePoint]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x", "rho", "side"]);
    for p in points {
        t.row(&[num(p.t), num(p.x), num(p.rho), p.side.label().to_string()]);
    }
    t
}

pub fn crossing_table(crossings: &[PhaseCrossing]) -> CsvTable {
    let mut t = CsvTable::new(&["t", "x", "rho_onset", "side", "distance"]);
    for c in crossings {
        t.row(&[
            num(c.t),
            num(c.x),
            num(c.rho_onset),
            c.side.label().to_string(),
            num(c.distance),
        ]);
    }
    t
}
