//! Time series for the `dephase`, `transition` and `entangle` subcommands.

use std::io::Write;

use rayon::prelude::*;

use cellbath::dephasing::coherence_series;
use cellbath::entanglement::{detect_death_revival, pair_state, DeathInterval};
use cellbath::linalg::{c, CMatrix};
use cellbath::mean_field::CellEnvironment;
use cellbath::model::uniform_grid;
use cellbath::oracle::{full_evolve, FullCellModel};
use cellbath::transitions::{build_sectors, channel_tomography, evolve_atom};

use crate::config::{InitialState, RunConfig};
use crate::recipes::RunKind;
use crate::CliError;

pub const DEPHASE_COLUMNS: &[&str] = &[
    "t",
    "re_F",
    "im_F",
    "abs_F_eta",
    "re_rho12",
    "im_rho12",
    "r1",
    "r2",
    "r3",
    "kappa",
];
pub const TRANSITION_COLUMNS: &[&str] = &["t", "rho11", "rho22", "re_rho12", "im_rho12"];
pub const ENTANGLE_COLUMNS: &[&str] = &["t", "concurrence"];

/// A numeric table; `None` marks a missing value.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    /// Diagnostics for stderr.
    pub notes: Vec<String>,
    pub death_intervals: Vec<DeathInterval>,
}

/// Seventeen significant digits, enough to round-trip an `f64`.
pub fn format_value(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.16e}"),
        None => String::new(),
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format_value(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<(Vec<String>, Vec<Vec<Option<f64>>>), CliError> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse::<f64>()
                        .map(Some)
                        .map_err(|_| CliError::Config(format!("bad number '{f}' in CSV")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

pub fn environment(cfg: &RunConfig) -> Result<CellEnvironment, CliError> {
    cfg.validate()?;
    Ok(CellEnvironment::resolve(cfg.lattice()?, cfg.field, cfg.thermal()?)?)
}

fn atom_state(initial: InitialState) -> Result<CMatrix, CliError> {
    match initial {
        InitialState::Ground => {
            let mut m = CMatrix::zeros(2, 2);
            m[(1, 1)] = c(1.0);
            Ok(m)
        }
        InitialState::Plus => Ok(CMatrix::from_element(2, 2, c(0.5))),
        InitialState::BellPair => Err(CliError::Config(
            "the bell-pair initial state only applies to `entangle`".into(),
        )),
    }
}

fn grid(cfg: &RunConfig) -> Vec<f64> {
    uniform_grid(cfg.t_max, cfg.n_points)
}

pub fn run_dephase(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let env = environment(cfg)?;
    let rho0 = atom_state(cfg.initial.unwrap_or(InitialState::Plus))?;
    let res = coherence_series(&grid(cfg), &rho0, &env, &cfg.atom())?;
    let rows = (0..res.times.len())
        .map(|k| {
            let [r1, r2, r3] = res.bloch[k];
            vec![
                Some(res.times[k]),
                Some(res.f_values[k].re),
                Some(res.f_values[k].im),
                Some(res.f_eta[k].norm()),
                Some(res.coherence[k].re),
                Some(res.coherence[k].im),
                Some(r1),
                Some(r2),
                Some(r3),
                res.kappa[k],
            ]
        })
        .collect();
    let missing = res.kappa.iter().filter(|k| k.is_none()).count();
    let mut notes = Vec::new();
    if missing > 0 {
        notes.push(format!("{missing} kappa values left empty where |F| < 1e-12"));
    }
    Ok(RunOutput {
        table: Table {
            columns: DEPHASE_COLUMNS,
            rows,
        },
        notes,
        death_intervals: Vec::new(),
    })
}

fn density_row(t: f64, rho: &CMatrix) -> Vec<Option<f64>> {
    vec![
        Some(t),
        Some(rho[(0, 0)].re),
        Some(rho[(1, 1)].re),
        Some(rho[(0, 1)].re),
        Some(rho[(0, 1)].im),
    ]
}

pub fn run_transition(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let env = environment(cfg)?;
    let atom = cfg.atom();
    let rho0 = atom_state(cfg.initial.unwrap_or(InitialState::Ground))?;
    let times = grid(cfg);
    let mut notes = Vec::new();
    let rows = if atom.is_isotropic() {
        let set = build_sectors(&env, &atom)?;
        times
            .par_iter()
            .map(|&t| Ok(density_row(t, &evolve_atom(&rho0, t, &set)?)))
            .collect::<Result<Vec<_>, CliError>>()?
    } else {
        notes.push("anisotropic coupling: evolving the full cell product space".to_string());
        let model = FullCellModel::new(&env, &atom)?;
        times
            .par_iter()
            .map(|&t| Ok(density_row(t, &full_evolve(&model, &rho0, t)?)))
            .collect::<Result<Vec<_>, CliError>>()?
    };
    Ok(RunOutput {
        table: Table {
            columns: TRANSITION_COLUMNS,
            rows,
        },
        notes,
        death_intervals: Vec::new(),
    })
}

pub fn run_entangle(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let env = environment(cfg)?;
    if let Some(init) = cfg.initial {
        if init != InitialState::BellPair {
            return Err(CliError::Config("`entangle` always starts from the bell pair".into()));
        }
    }
    let set = build_sectors(&env, &cfg.atom())?;
    let times = grid(cfg);
    let values = times
        .par_iter()
        .map(|&t| Ok(pair_state(&channel_tomography(t, &set)).concurrence()?))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let deaths = detect_death_revival(&times, &values);
    let mut notes = vec![format!("death intervals: {}", deaths.len())];
    for d in &deaths {
        notes.push(match d.revival {
            Some(r) => format!("  c = 0 on [{}, {}], revives at t = {r}", d.start, d.end),
            None => format!("  c = 0 on [{}, {}], no revival within the grid", d.start, d.end),
        });
    }
    let rows = times
        .iter()
        .zip(&values)
        .map(|(&t, &v)| vec![Some(t), Some(v)])
        .collect();
    Ok(RunOutput {
        table: Table {
            columns: ENTANGLE_COLUMNS,
            rows,
        },
        notes,
        death_intervals: deaths,
    })
}

pub fn run(kind: RunKind, cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match kind {
        RunKind::Dephase => run_dephase(cfg),
        RunKind::Transition => run_transition(cfg),
        RunKind::Entangle => run_entangle(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let cfg = RunConfig {
            n_points: 101,
            ..RunConfig::default()
        };
        let out = run_dephase(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&out.table, &mut buf).unwrap();
        let (header, rows) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(header, DEPHASE_COLUMNS);
        assert_eq!(rows, out.table.rows);
        assert!(rows.iter().flatten().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn extreme_values_round_trip() {
        for x in [
            f64::MIN_POSITIVE,
            1.0 / 3.0,
            -2.5e-300,
            123_456_789.123_456_79,
            f64::MAX,
        ] {
            assert_eq!(format_value(Some(x)).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_value(None), "");
    }

    #[test]
    fn transition_routes() {
        let iso = RunConfig {
            alpha: 1.0,
            gamma: 1.0,
            lambda: 1.0,
            eta: 3,
            n_points: 11,
            ..RunConfig::default()
        };
        let out = run_transition(&iso).unwrap();
        assert!(out.notes.is_empty());
        let first: Vec<f64> = out.table.rows[0].iter().map(|v| v.unwrap()).collect();
        for (got, want) in first.iter().zip([0.0, 0.0, 1.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-13, "{first:?}");
        }
        let aniso = RunConfig { gamma: 0.3, ..iso };
        let out = run_transition(&aniso).unwrap();
        assert_eq!(out.notes.len(), 1);
    }

    #[test]
    fn entangle_rejects_single_atom_states() {
        let cfg = RunConfig {
            alpha: 1.0,
            gamma: 1.0,
            initial: Some(InitialState::Ground),
            ..RunConfig::default()
        };
        assert!(run_entangle(&cfg).is_err());
        let bad = RunConfig {
            initial: Some(InitialState::BellPair),
            ..RunConfig::default()
        };
        assert!(run_dephase(&bad).is_err());
    }
}
