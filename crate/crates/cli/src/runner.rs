//! Experiment runners: each turns a validated configuration into an
//! [`Outcome`] table.
//!
//! Runners are pure functions of the configuration (plus the seed it
//! carries), so identical inputs give identical outputs and sweeps can
//! run them in parallel.

use realclock::evolution::{self, EvolutionResult};
use realclock::hilbert::evolve_state;
use realclock::undecidability;
use realclock::Result;

use crate::config::{config_err, ExperimentKind, Loaded, MethodSpec, RawConfig};
use crate::output::Outcome;
use crate::sweep;

pub fn run(loaded: &Loaded) -> Result<Outcome> {
    match loaded.raw.experiment {
        ExperimentKind::Sweep => sweep::run_sweep(loaded),
        _ => run_single(&loaded.raw),
    }
}

/// Runs a non-sweep experiment.
pub fn run_single(raw: &RawConfig) -> Result<Outcome> {
    match raw.experiment {
        ExperimentKind::Evolve => run_evolve(raw),
        ExperimentKind::Zurek => run_zurek(raw),
        ExperimentKind::Chamber => run_chamber(raw),
        ExperimentKind::Undecide => run_undecide(raw),
        ExperimentKind::Conditional => run_conditional(raw),
        ExperimentKind::Sweep => Err(config_err("a sweep cannot run as a single experiment")),
    }
}

fn grid_of(raw: &RawConfig) -> Result<Vec<f64>> {
    raw.grid
        .as_ref()
        .ok_or_else(|| config_err("missing grid"))?
        .materialize()
}

fn coherence_series(result: &EvolutionResult) -> Vec<f64> {
    result.states.iter().map(|s| s.mat()[(0, 1)].norm()).collect()
}

fn last(values: &[f64]) -> f64 {
    *values.last().expect("the grid is non-empty")
}

fn run_evolve(raw: &RawConfig) -> Result<Outcome> {
    let units = raw.unit_context()?;
    let section = raw.evolve.as_ref().ok_or_else(|| config_err("missing evolve section"))?;
    let (h, rho0, clock) = section.build(&units)?;
    let grid = grid_of(raw)?;

    let closed = |grid: &[f64]| -> Result<EvolutionResult> {
        let states = grid
            .iter()
            .map(|&t| evolution::closed_form_clock(&h, &rho0, &clock, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvolutionResult {
            times: grid.to_vec(),
            states,
            method: evolution::Method::ClosedForm,
        })
    };

    let mut series = Vec::new();
    let mut scalars = Vec::new();
    match section.method {
        MethodSpec::Compare => {
            let exact = closed(&grid)?;
            let master = evolution::integrate_master(&h, &rho0, &clock, &grid)?;
            let deviation: Vec<f64> = exact
                .states
                .iter()
                .zip(&master.states)
                .map(|(a, b)| evolution::max_deviation(a, b))
                .collect();
            let coh = coherence_series(&exact);
            let pur = exact.purity_series();
            scalars.push(("final_coherence".into(), last(&coh)));
            scalars.push(("final_purity".into(), last(&pur)));
            scalars.push(("max_deviation".into(), deviation.iter().fold(0.0f64, |m, &d| m.max(d))));
            series.push(("coherence_closed".into(), coh));
            series.push(("coherence_master".into(), coherence_series(&master)));
            series.push(("purity_closed".into(), pur));
            series.push(("purity_master".into(), master.purity_series()));
            series.push(("deviation".into(), deviation));
        }
        method => {
            let result = match method {
                MethodSpec::ClosedForm => closed(&grid)?,
                MethodSpec::Master => evolution::integrate_master(&h, &rho0, &clock, &grid)?,
                MethodSpec::Quadrature => {
                    evolution::effective_density_series(&h, &rho0, &clock, &grid)?
                }
                MethodSpec::Compare => unreachable!(),
            };
            let coh = coherence_series(&result);
            let pur = result.purity_series();
            scalars.push(("final_coherence".into(), last(&coh)));
            scalars.push(("final_purity".into(), last(&pur)));
            series.push(("coherence".into(), coh));
            series.push(("purity".into(), pur));
        }
    }
    Ok(Outcome {
        experiment: ExperimentKind::Evolve,
        grid_label: "time".into(),
        grid,
        series,
        scalars,
    })
}

fn run_zurek(raw: &RawConfig) -> Result<Outcome> {
    let units = raw.unit_context()?;
    let section = raw.zurek.as_ref().ok_or_else(|| config_err("missing zurek section"))?;
    let (bath, clock) = section.build(&units, raw.seed)?;
    let grid = grid_of(raw)?;

    let exact: Vec<f64> = grid.iter().map(|&t| bath.coherence_z(t).norm()).collect();
    let corrected = grid
        .iter()
        .map(|&t| Ok(bath.clock_corrected_coherence(&clock, t)?.norm()))
        .collect::<Result<Vec<f64>>>()?;

    let mut scalars = vec![
        ("final_coherence_exact".to_string(), last(&exact)),
        ("final_coherence_corrected".to_string(), last(&corrected)),
    ];
    if let Some(spec) = &section.revival_search {
        let revivals = bath.revival_search(spec.t_max, spec.step, spec.threshold.unwrap_or(0.5))?;
        scalars.push(("revival_count".into(), revivals.len() as f64));
        let (t, m) = revivals
            .first()
            .map_or((f64::NAN, f64::NAN), |r| (r.time, r.magnitude));
        scalars.push(("first_revival_time".into(), t));
        scalars.push(("first_revival_magnitude".into(), m));
    }
    Ok(Outcome {
        experiment: ExperimentKind::Zurek,
        grid_label: "time".into(),
        grid,
        series: vec![
            ("coherence_exact".into(), exact),
            ("coherence_corrected".into(), corrected),
        ],
        scalars,
    })
}

fn run_chamber(raw: &RawConfig) -> Result<Outcome> {
    let units = raw.unit_context()?;
    let section = raw.chamber.as_ref().ok_or_else(|| config_err("missing chamber section"))?;
    let base = section.build(&units)?;
    let grid = grid_of(raw)?;
    if grid[0] <= 0.0 {
        return Err(config_err("the chamber duration grid must be positive"));
    }

    let m_unitary = base.expectation_m_unitary()?;
    let corrected = grid
        .iter()
        .map(|&t| {
            let mut cfg = base.clone();
            cfg.t_total = t;
            cfg.expectation_m_corrected()
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut end_cfg = base.clone();
    end_cfg.t_total = last(&grid);
    let feas = end_cfg.feasibility_with(
        section.aperture,
        section.ratio_threshold.unwrap_or(0.1),
    )?;
    let flag = |s: bool| if s { 1.0 } else { 0.0 };
    let scalars = vec![
        ("m_unitary".to_string(), m_unitary),
        ("m_corrected_end".to_string(), last(&corrected)),
        ("theta".to_string(), base.theta()),
        ("feasible_dipole".to_string(), flag(feas.cond_a.satisfied)),
        ("feasible_collimation".to_string(), flag(feas.cond_b.satisfied)),
        ("feasible_coupling".to_string(), flag(feas.cond_c.satisfied)),
        ("feasible_damping".to_string(), flag(feas.cond_d.satisfied)),
        ("margin_dipole".to_string(), feas.cond_a.margin),
        ("margin_collimation".to_string(), feas.cond_b.margin),
        ("margin_coupling".to_string(), feas.cond_c.margin),
        ("margin_damping".to_string(), feas.cond_d.margin),
    ];
    let series = vec![
        ("m_corrected".to_string(), corrected),
        ("m_unitary".to_string(), vec![m_unitary; grid.len()]),
    ];
    Ok(Outcome {
        experiment: ExperimentKind::Chamber,
        grid_label: "t_total".into(),
        grid,
        series,
        scalars,
    })
}

fn run_undecide(raw: &RawConfig) -> Result<Outcome> {
    let units = raw.unit_context()?;
    let section = raw.undecide.as_ref().ok_or_else(|| config_err("missing undecide section"))?;
    let input = section.build(&units)?;
    let grid = grid_of(raw)?;

    let sizes = grid
        .iter()
        .map(|&v| {
            if v.fract() != 0.0 || v < 1.0 || v > 1e9 {
                Err(config_err(format!(
                    "the undecide grid holds environment sizes, which must be positive integers; got {v}"
                )))
            } else {
                Ok(v as usize)
            }
        })
        .collect::<Result<Vec<usize>>>()?;

    // The damping exponent is linear in the environment size, so the
    // configured chamber fixes the per-spin rate and the grid rescales it.
    let k_per_spin =
        undecidability::damping_exponent_k(&input.chamber)? / input.chamber.n as f64;
    let mut signal_log = Vec::with_capacity(sizes.len());
    let mut noise_log = Vec::with_capacity(sizes.len());
    for &n in &sizes {
        signal_log.push(-k_per_spin * n as f64 * std::f64::consts::LOG10_E);
        noise_log.push(undecidability::noise_floor_log10(&input, n)?);
    }

    let report = undecidability::report(&input)?;
    let scalars = vec![
        ("k".to_string(), report.k),
        ("signal".to_string(), report.signal),
        ("signal_log10".to_string(), report.signal_log10),
        ("delta_theta".to_string(), report.delta_theta),
        ("noise_floor".to_string(), report.noise_floor),
        ("noise_floor_log10".to_string(), report.noise_floor_log10),
        ("n_threshold_formula".to_string(), report.n_threshold_formula),
        ("n_threshold_crossover".to_string(), report.n_threshold_crossover),
        ("undecidable".to_string(), if report.undecidable { 1.0 } else { 0.0 }),
    ];
    Ok(Outcome {
        experiment: ExperimentKind::Undecide,
        grid_label: "n".into(),
        grid,
        series: vec![
            ("signal_log10".into(), signal_log),
            ("noise_floor_log10".into(), noise_log),
        ],
        scalars,
    })
}

fn run_conditional(raw: &RawConfig) -> Result<Outcome> {
    let units = raw.unit_context()?;
    let section = raw
        .conditional
        .as_ref()
        .ok_or_else(|| config_err("missing conditional section"))?;
    let setup = section.build(&units)?;

    let probabilities = setup
        .queries
        .iter()
        .map(|q| setup.model.conditional_probability_pure(q, &setup.joint))
        .collect::<Result<Vec<f64>>>()?;

    let centers: Vec<f64> = setup.bands.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect();
    let los: Vec<f64> = setup.bands.iter().map(|[lo, _]| *lo).collect();
    let his: Vec<f64> = setup.bands.iter().map(|[_, hi]| *hi).collect();
    let total: f64 = probabilities.iter().sum();

    let mut series = vec![
        ("band_lo".to_string(), los),
        ("band_hi".to_string(), his),
        ("probability".to_string(), probabilities.clone()),
    ];
    let mut scalars = vec![("total_probability".to_string(), total)];

    if let Some(born_time) = section.born_time {
        let grid_s = setup.model.grid_system();
        let h_s = grid_s.free_hamiltonian(setup.model.mass_system())?;
        let evolved = evolve_state(&setup.system_state, &h_s, born_time)?;
        let born = setup
            .bands
            .iter()
            .map(|[lo, hi]| {
                let mask = grid_s.interval_mask(*lo, *hi)?;
                Ok(evolved
                    .amps()
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &m)| m)
                    .map(|(a, _)| a.norm_sqr())
                    .sum())
            })
            .collect::<Result<Vec<f64>>>()?;
        let tv = 0.5
            * probabilities
                .iter()
                .zip(&born)
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>();
        scalars.push(("tv_distance".into(), tv));
        series.push(("born".into(), born));
    }

    Ok(Outcome {
        experiment: ExperimentKind::Conditional,
        grid_label: "band_center".into(),
        grid: centers,
        series,
        scalars,
    })
}
