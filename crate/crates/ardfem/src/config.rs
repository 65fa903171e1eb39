//! Key-value run configuration: parsing, canonical serialization, and
//! conversion into a [`Problem`].
//!
//! The format is line based: `key = value`, `#` starts a comment, blank
//! lines are ignored. The key set is fixed:
//!
//! ```text
//! mode            convergence | simulate            (default simulate)
//! scheme          dbe | dbdf2                       (default dbdf2)
//! mesh.nx         cells along x                     (default 32)
//! mesh.ny         cells along y                     (default 32)
//! dt              time step                         (default 0.1)
//! T               final time                        (default 80)
//! boundary        noflux | dirichlet-mms            (default noflux)
//! environment.K   nonstationary-gaussian | stationary-gaussian | mms
//!                 | expression over t,x,y           (default nonstationary-gaussian)
//! output.dir      output directory                  (default ".")
//! output.stride   snapshot stride in steps          (default 100)
//! species[i].d      diffusion, > 0                  (default 0.1)
//! species[i].beta   advection                       (default 0)
//! species[i].gamma  harvesting (<1; negative stocks) (default 0)
//! species[i].r      growth rate expression          (default 1)
//! ```
//!
//! Species indices are 1-based and must be contiguous. The domain is the
//! unit square and simulations start from the constant density 1.6 with
//! quadratic elements.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::coeffs::ScalarField;
use crate::error::{Error, Result};
use crate::expr::{self, Expression};
use crate::mesh::Mesh;
use crate::mms::ManufacturedCase;
use crate::presets;
use crate::space::FESpace;
use crate::stepping::{Boundary, Problem, Scheme, SpeciesParams};

pub const DEFAULT_MESH: usize = 32;
pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_T: f64 = 80.0;
pub const DEFAULT_STRIDE: usize = 100;
pub const INITIAL_DENSITY: f64 = 1.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Convergence,
    Simulate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySpec {
    NoFlux,
    /// Dirichlet values taken from the manufactured solution; requires
    /// `environment.K = mms`.
    DirichletMms,
}

/// Carrying-capacity selector.
#[derive(Debug, Clone)]
pub enum KSpec {
    NonstationaryGaussian,
    StationaryGaussian,
    /// The manufactured verification environment (K, r, forcing, exact
    /// initial data); requires exactly three species.
    Mms,
    Expr(Expression),
}

impl PartialEq for KSpec {
    fn eq(&self, other: &Self) -> bool {
        use KSpec::*;
        match (self, other) {
            (NonstationaryGaussian, NonstationaryGaussian) => true,
            (StationaryGaussian, StationaryGaussian) => true,
            (Mms, Mms) => true,
            (Expr(a), Expr(b)) => a.source() == b.source(),
            _ => false,
        }
    }
}

/// Growth-rate selector for one species.
#[derive(Debug, Clone)]
pub struct RSpec(Expression);

impl RSpec {
    pub fn parse(src: &str) -> Result<RSpec> {
        Ok(RSpec(expr::parse(src)?))
    }

    pub fn source(&self) -> &str {
        self.0.source()
    }

    pub fn to_field(&self) -> ScalarField {
        self.0.to_field()
    }
}

impl PartialEq for RSpec {
    fn eq(&self, other: &Self) -> bool {
        self.source() == other.source()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesSpec {
    pub d: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: RSpec,
}

impl Default for SpeciesSpec {
    fn default() -> SpeciesSpec {
        SpeciesSpec {
            d: 0.1,
            beta: 0.0,
            gamma: 0.0,
            r: RSpec::parse("1").unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub scheme: Scheme,
    pub nx: usize,
    pub ny: usize,
    pub dt: f64,
    pub t_end: f64,
    pub boundary: BoundarySpec,
    pub k_spec: KSpec,
    pub output_dir: String,
    pub output_stride: usize,
    pub species: Vec<SpeciesSpec>,
}

impl RunConfig {
    /// All defaults with `n` species.
    pub fn with_species(n: usize) -> RunConfig {
        RunConfig {
            mode: Mode::Simulate,
            scheme: Scheme::Dbdf2,
            nx: DEFAULT_MESH,
            ny: DEFAULT_MESH,
            dt: DEFAULT_DT,
            t_end: DEFAULT_T,
            boundary: BoundarySpec::NoFlux,
            k_spec: KSpec::NonstationaryGaussian,
            output_dir: ".".to_string(),
            output_stride: DEFAULT_STRIDE,
            species: vec![SpeciesSpec::default(); n],
        }
    }

    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Canonical text form; `parse_config` of the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "mode = {}",
            match self.mode {
                Mode::Convergence => "convergence",
                Mode::Simulate => "simulate",
            }
        );
        let _ = writeln!(
            out,
            "scheme = {}",
            match self.scheme {
                Scheme::Dbe => "dbe",
                Scheme::Dbdf2 => "dbdf2",
            }
        );
        let _ = writeln!(out, "mesh.nx = {}", self.nx);
        let _ = writeln!(out, "mesh.ny = {}", self.ny);
        let _ = writeln!(out, "dt = {}", self.dt);
        let _ = writeln!(out, "T = {}", self.t_end);
        let _ = writeln!(
            out,
            "boundary = {}",
            match self.boundary {
                BoundarySpec::NoFlux => "noflux",
                BoundarySpec::DirichletMms => "dirichlet-mms",
            }
        );
        let _ = writeln!(
            out,
            "environment.K = {}",
            match &self.k_spec {
                KSpec::NonstationaryGaussian => "nonstationary-gaussian",
                KSpec::StationaryGaussian => "stationary-gaussian",
                KSpec::Mms => "mms",
                KSpec::Expr(e) => e.source(),
            }
        );
        let _ = writeln!(out, "output.dir = {}", self.output_dir);
        let _ = writeln!(out, "output.stride = {}", self.output_stride);
        for (i, s) in self.species.iter().enumerate() {
            let i = i + 1;
            let _ = writeln!(out, "species[{i}].d = {}", s.d);
            let _ = writeln!(out, "species[{i}].beta = {}", s.beta);
            let _ = writeln!(out, "species[{i}].gamma = {}", s.gamma);
            let _ = writeln!(out, "species[{i}].r = {}", s.r.source());
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::config(msg));
        if self.nx == 0 || self.ny == 0 {
            return fail("mesh.nx and mesh.ny must be positive".into());
        }
        if !(self.dt > 0.0) {
            return fail(format!("dt must be positive (got {})", self.dt));
        }
        if !(self.t_end > 0.0) {
            return fail(format!("T must be positive (got {})", self.t_end));
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
            return fail(format!(
                "T must be an integer multiple of dt (T/dt = {steps})"
            ));
        }
        if self.output_stride == 0 {
            return fail("output.stride must be positive".into());
        }
        if self.species.is_empty() {
            return fail("config defines no species (add a species[1] key)".into());
        }
        for (i, s) in self.species.iter().enumerate() {
            let i = i + 1;
            if !(s.d > 0.0) {
                return fail(format!("species[{i}].d must be positive (got {})", s.d));
            }
            if !(s.gamma < 1.0) {
                return fail(format!(
                    "species[{i}].gamma must be < 1 (got {})",
                    s.gamma
                ));
            }
            if !s.beta.is_finite() {
                return fail(format!("species[{i}].beta must be finite"));
            }
        }
        if self.boundary == BoundarySpec::DirichletMms && self.k_spec != KSpec::Mms {
            return fail("boundary = dirichlet-mms requires environment.K = mms".into());
        }
        if self.k_spec == KSpec::Mms {
            if self.species.len() != ManufacturedCase::N {
                return fail(format!(
                    "environment.K = mms requires exactly {} species (got {})",
                    ManufacturedCase::N,
                    self.species.len()
                ));
            }
            if self.nx != self.ny {
                return fail("environment.K = mms requires a square mesh (mesh.nx = mesh.ny)".into());
            }
        }
        Ok(())
    }

    /// Builds the simulation problem this configuration describes.
    pub fn problem(&self) -> Result<Problem> {
        self.validate()?;
        let mesh = Mesh::rectangle(0.0, 1.0, 0.0, 1.0, self.nx, self.ny);
        let space = FESpace::new(mesh, 2);

        if self.k_spec == KSpec::Mms {
            let case = ManufacturedCase {
                d: [self.species[0].d, self.species[1].d, self.species[2].d],
                beta: [
                    self.species[0].beta,
                    self.species[1].beta,
                    self.species[2].beta,
                ],
                gamma: [
                    self.species[0].gamma,
                    self.species[1].gamma,
                    self.species[2].gamma,
                ],
            };
            let mut problem = case.problem(self.nx, 2, self.dt, self.t_end, false);
            if self.boundary == BoundarySpec::NoFlux {
                problem.boundary = Boundary::NoFlux;
            }
            return Ok(problem);
        }

        let k = match &self.k_spec {
            KSpec::NonstationaryGaussian => presets::nonstationary_gaussian(),
            KSpec::StationaryGaussian => presets::stationary_gaussian(),
            KSpec::Expr(e) => e.to_field(),
            KSpec::Mms => unreachable!(),
        };
        // Species with textually identical growth rates share one field, so
        // the stepper assembles their reaction matrices once.
        let mut r_fields: BTreeMap<&str, ScalarField> = BTreeMap::new();
        let species = self
            .species
            .iter()
            .map(|s| SpeciesParams {
                d: s.d,
                beta: s.beta,
                gamma: s.gamma,
                r: r_fields
                    .entry(s.r.source())
                    .or_insert_with(|| s.r.to_field())
                    .clone(),
            })
            .collect();
        let n = self.species.len();
        let initial = (0..n)
            .map(|_| crate::space::Field::constant(space.n_dofs(), INITIAL_DENSITY))
            .collect();
        Ok(Problem {
            space,
            species,
            k,
            forcing: vec![ScalarField::constant(0.0); n],
            boundary: Boundary::NoFlux,
            initial,
            second_level: None,
            dt: self.dt,
            t_end: self.t_end,
        })
    }
}

/// Parses a configuration document, reporting 1-based line numbers.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    // Raw keyed values; species settings keyed by (index, field).
    let mut scalars: BTreeMap<&str, (usize, String)> = BTreeMap::new();
    let mut species: BTreeMap<(usize, &'static str), (usize, String)> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config(format!("line {lineno}: expected 'key = value'"))
        })?;
        let (key, value) = (key.trim(), value.trim().to_string());
        if value.is_empty() {
            return Err(Error::config(format!("line {lineno}: '{key}' has no value")));
        }

        if let Some(rest) = key.strip_prefix("species[") {
            let (idx, field) = rest.split_once("].").ok_or_else(|| {
                Error::config(format!(
                    "line {lineno}: malformed species key '{key}' (want species[i].field)"
                ))
            })?;
            let idx: usize = idx.parse().map_err(|_| {
                Error::config(format!("line {lineno}: bad species index in '{key}'"))
            })?;
            if idx == 0 {
                return Err(Error::config(format!(
                    "line {lineno}: species indices are 1-based"
                )));
            }
            let field = match field {
                "d" => "d",
                "beta" => "beta",
                "gamma" => "gamma",
                "r" => "r",
                other => {
                    return Err(Error::config(format!(
                        "line {lineno}: unknown species field '{other}' (want d, beta, gamma or r)"
                    )))
                }
            };
            if let Some((first, _)) = species.insert((idx, field), (lineno, value)) {
                return Err(Error::config(format!(
                    "line {lineno}: duplicate key 'species[{idx}].{field}' (first set on line {first})"
                )));
            }
        } else {
            const KEYS: [&str; 10] = [
                "mode",
                "scheme",
                "mesh.nx",
                "mesh.ny",
                "dt",
                "T",
                "boundary",
                "environment.K",
                "output.dir",
                "output.stride",
            ];
            let key = *KEYS
                .iter()
                .find(|k| **k == key)
                .ok_or_else(|| Error::config(format!("line {lineno}: unknown key '{key}'")))?;
            if let Some((first, _)) = scalars.insert(key, (lineno, value)) {
                return Err(Error::config(format!(
                    "line {lineno}: duplicate key '{key}' (first set on line {first})"
                )));
            }
        }
    }

    let n_species = species.keys().map(|(i, _)| *i).max().unwrap_or(0);
    for i in 1..=n_species {
        if !species.keys().any(|(j, _)| *j == i) {
            return Err(Error::config(format!(
                "species indices must be contiguous from 1 (species[{i}] is missing)"
            )));
        }
    }

    let mut config = RunConfig::with_species(n_species);

    let parse_f64 = |key: &str, (lineno, v): &(usize, String)| -> Result<f64> {
        let x: f64 = v.parse().map_err(|_| {
            Error::config(format!("line {lineno}: '{key}' is not a number: '{v}'"))
        })?;
        if !x.is_finite() {
            return Err(Error::config(format!(
                "line {lineno}: '{key}' must be finite"
            )));
        }
        Ok(x)
    };
    let parse_usize = |key: &str, (lineno, v): &(usize, String)| -> Result<usize> {
        v.parse().map_err(|_| {
            Error::config(format!(
                "line {lineno}: '{key}' is not a non-negative integer: '{v}'"
            ))
        })
    };

    for (key, entry) in &scalars {
        let (lineno, value) = entry;
        match *key {
            "mode" => {
                config.mode = match value.as_str() {
                    "convergence" => Mode::Convergence,
                    "simulate" => Mode::Simulate,
                    v => {
                        return Err(Error::config(format!(
                            "line {lineno}: mode must be 'convergence' or 'simulate' (got '{v}')"
                        )))
                    }
                }
            }
            "scheme" => {
                config.scheme = match value.as_str() {
                    "dbe" => Scheme::Dbe,
                    "dbdf2" => Scheme::Dbdf2,
                    v => {
                        return Err(Error::config(format!(
                            "line {lineno}: scheme must be 'dbe' or 'dbdf2' (got '{v}')"
                        )))
                    }
                }
            }
            "mesh.nx" => config.nx = parse_usize(key, entry)?,
            "mesh.ny" => config.ny = parse_usize(key, entry)?,
            "dt" => config.dt = parse_f64(key, entry)?,
            "T" => config.t_end = parse_f64(key, entry)?,
            "boundary" => {
                config.boundary = match value.as_str() {
                    "noflux" => BoundarySpec::NoFlux,
                    "dirichlet-mms" => BoundarySpec::DirichletMms,
                    v => {
                        return Err(Error::config(format!(
                            "line {lineno}: boundary must be 'noflux' or 'dirichlet-mms' (got '{v}')"
                        )))
                    }
                }
            }
            "environment.K" => {
                config.k_spec = match value.as_str() {
                    "nonstationary-gaussian" => KSpec::NonstationaryGaussian,
                    "stationary-gaussian" => KSpec::StationaryGaussian,
                    "mms" => KSpec::Mms,
                    src => KSpec::Expr(expr::parse(src).map_err(|e| {
                        Error::config(format!("line {lineno}: environment.K: {e}"))
                    })?),
                }
            }
            "output.dir" => config.output_dir = value.clone(),
            "output.stride" => config.output_stride = parse_usize(key, entry)?,
            _ => unreachable!(),
        }
    }

    for ((idx, field), entry) in &species {
        let (lineno, value) = entry;
        let s = &mut config.species[idx - 1];
        let key = format!("species[{idx}].{field}");
        match *field {
            "d" => s.d = parse_f64(&key, entry)?,
            "beta" => s.beta = parse_f64(&key, entry)?,
            "gamma" => s.gamma = parse_f64(&key, entry)?,
            "r" => {
                s.r = RSpec::parse(value)
                    .map_err(|e| Error::config(format!("line {lineno}: {key}: {e}")))?
            }
            _ => unreachable!(),
        }
    }

    config.validate()?;
    Ok(config)
}
