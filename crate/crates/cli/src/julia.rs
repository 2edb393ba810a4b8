//! Escape-time picture of the filled Julia set of `P`.

use branchdens::exec::{map_range, Execution};
use branchdens::pgf::OffspringPgf;
use num_complex::Complex64;

use crate::report::{Cell, Report, Table};
use crate::{base_meta, CliResult, RunConfig};

pub const ESCAPE_RADIUS: f64 = 1e3;
/// Orbits entering this disk are captured by the attracting fixed point 0.
pub const INTERIOR_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    /// Captured by 0 after this many steps.
    Interior(usize),
    /// Left the escape disk after this many steps.
    Exterior(usize),
    Undecided,
}

impl PointClass {
    /// `k + 1` for exterior, `-(k + 1)` for interior, 0 when undecided.
    pub fn code(self) -> i64 {
        match self {
            PointClass::Exterior(k) => k as i64 + 1,
            PointClass::Interior(k) => -(k as i64 + 1),
            PointClass::Undecided => 0,
        }
    }
}

pub fn classify_point(pgf: &OffspringPgf, z: Complex64, max_iter: usize) -> PointClass {
    let mut w = z;
    for k in 0..=max_iter {
        let r = w.norm();
        if r < INTERIOR_RADIUS {
            return PointClass::Interior(k);
        }
        if !(r <= ESCAPE_RADIUS) {
            return PointClass::Exterior(k);
        }
        w = pgf.evaluate(w);
    }
    PointClass::Undecided
}

#[derive(Debug, Clone, PartialEq)]
pub struct JuliaGrid {
    pub meta: serde_json::Value,
    pub width: usize,
    pub height: usize,
    pub bounds: [f64; 4],
    pub max_iter: usize,
    /// Row-major, top row (largest imaginary part) first.
    pub classes: Vec<PointClass>,
}

impl JuliaGrid {
    /// Center of pixel `(col, row)`.
    pub fn point(&self, col: usize, row: usize) -> Complex64 {
        pixel(self.bounds, self.width, self.height, col, row)
    }

    pub fn to_report(&self) -> Report {
        let rows = (0..self.height)
            .flat_map(|row| (0..self.width).map(move |col| (col, row)))
            .map(|(col, row)| {
                let z = self.point(col, row);
                vec![
                    Cell::Num(z.re),
                    Cell::Num(z.im),
                    Cell::Int(self.classes[row * self.width + col].code()),
                ]
            })
            .collect();
        Report {
            meta: self.meta.clone(),
            table: Table {
                columns: vec!["re".into(), "im".into(), "code".into()],
                rows,
            },
        }
    }

    /// ASCII graymap: interior and undecided black, exterior brighter the
    /// faster it escapes.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n# {}\n{} {}\n255\n", self.meta, self.width, self.height);
        for row in self.classes.chunks(self.width) {
            let line: Vec<String> = row
                .iter()
                .map(|c| match c {
                    PointClass::Exterior(k) => {
                        let shade = 255.0 * (1.0 - *k as f64 / (self.max_iter + 1) as f64);
                        (shade.round() as u32).max(1).to_string()
                    }
                    _ => "0".to_string(),
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

fn pixel(bounds: [f64; 4], width: usize, height: usize, col: usize, row: usize) -> Complex64 {
    let [re0, re1, im0, im1] = bounds;
    let re = re0 + (col as f64 + 0.5) * (re1 - re0) / width as f64;
    let im = im1 - (row as f64 + 0.5) * (im1 - im0) / height as f64;
    Complex64::new(re, im)
}

pub fn cmd_julia(cfg: &RunConfig) -> CliResult<JuliaGrid> {
    let pgf = cfg.build_pgf()?;
    let (w, h) = (cfg.width, cfg.height);
    let rows = map_range(Execution::Parallel, h, |row| {
        (0..w)
            .map(|col| classify_point(&pgf, pixel(cfg.bounds, w, h, col, row), cfg.max_iter))
            .collect::<Vec<_>>()
    });
    let mut meta = base_meta("julia", cfg, &pgf);
    meta["escape_radius"] = ESCAPE_RADIUS.into();
    meta["interior_radius"] = INTERIOR_RADIUS.into();
    Ok(JuliaGrid {
        meta,
        width: w,
        height: h,
        bounds: cfg.bounds,
        max_iter: cfg.max_iter,
        classes: rows.into_iter().flatten().collect(),
    })
}
