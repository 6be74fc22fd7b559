use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{
    self, bare_label, compare_with_ideal, dressed_basis, CircuitComparison, CircuitParams, DressedBasis, DriveMode,
    Frame, TRANSITIONS,
};
use crate::dirac::{self, DiracParams, NamedState, SphereGrid};
use crate::evolution::{
    evolve_chirped_with, evolve_static, manifold_population, ChirpSchedule, ChirpTarget, SchwingerConvention,
    StepperOptions, TimeGrid, ADOPTED_SCHWINGER_CONVENTION,
};

use super::analysis::dominant_frequency_mhz;
use super::config::*;
use super::output::{num, ResultBundle, Table};
use super::svg::{line_plot, quiver_plot, Series};
use super::{Model, ScenarioConfig, ScenarioError, ScenarioKind, ScenarioResult};

pub(super) fn run(config: &ScenarioConfig, svg: bool) -> ScenarioResult<ResultBundle> {
    let mut bundle = match config {
        ScenarioConfig::FreeDiracScan(c) => free_dirac_scan(c)?,
        ScenarioConfig::SpinTexture(c) => spin_texture(c)?,
        ScenarioConfig::PairProduction(c) => pair_production(c)?,
        ScenarioConfig::SchwingerScan(c) => schwinger_scan(c)?,
        ScenarioConfig::CircuitValidation(c) => circuit_validation(c)?,
        ScenarioConfig::BellCheck(c) => bell_check(c)?,
    };
    if !svg {
        bundle.plots.clear();
    }
    Ok(bundle)
}

fn config_error(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Config(msg.into())
}

fn require_model(kind: ScenarioKind, model: Model, allowed: &[Model]) -> ScenarioResult<()> {
    if allowed.contains(&model) {
        Ok(())
    } else {
        Err(config_error(format!(
            "scenario {kind} does not support model {model:?}"
        )))
    }
}

fn stepper(s: &StepperSection) -> ScenarioResult<StepperOptions<f64>> {
    if !(s.tolerance.is_finite() && s.tolerance > 0.0) {
        return Err(config_error("stepper.tolerance must be positive"));
    }
    Ok(StepperOptions {
        method: s.method,
        tolerance: s.tolerance,
        max_refinements: s.max_refinements,
        base_step: None,
    })
}

fn grid(g: &GridSection) -> ScenarioResult<TimeGrid<f64>> {
    Ok(TimeGrid::new(g.t_start_us, g.t_end_us, g.samples)?)
}

fn circuit_setup(c: &CircuitSection) -> ScenarioResult<(DressedBasis<f64>, Frame<f64>)> {
    let params = CircuitParams::new(c.omega0_ghz, c.kappa_mhz, c.g_mhz)?;
    let basis = dressed_basis(&params)?;
    let frame = match c.frame {
        FrameKind::Lab => Frame::Lab,
        FrameKind::Rotating => {
            if !c.frame_mhz.is_finite() {
                return Err(config_error("circuit.frame_mhz must be finite"));
            }
            Frame::Rotating(c.frame_mhz)
        }
    };
    Ok((basis, frame))
}

fn drive_mode(mode: ModeKind, c: &CircuitSection) -> DriveMode<f64> {
    match mode {
        ModeKind::Calibrated => DriveMode::Calibrated,
        ModeKind::Naive => DriveMode::Naive(c.naive_scale),
    }
}

fn nonempty<T>(v: &[T], what: &str) -> ScenarioResult<()> {
    if v.is_empty() {
        Err(config_error(format!("{what} must not be empty")))
    } else {
        Ok(())
    }
}

/// P₀(t) of the two-level reduction onto span{|0⟩, bright}: cos²(|H|0⟩|·t).
fn two_level_p0(params: &DiracParams<f64>, t: f64) -> ScenarioResult<f64> {
    let h = dirac::build_dirac_hamiltonian(params)?;
    let ground = NamedState::Level(0).state::<f64>()?;
    let coupling = h
        .matrix()
        .matvec(ground.amplitudes())
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    Ok((coupling * t).cos().powi(2))
}

fn free_dirac_scan(c: &FreeDiracScanConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::FreeDiracScan, c.model, &[Model::Ideal4, Model::Circuit9])?;
    nonempty(&c.dirac.masses_mhz, "dirac.masses_mhz")?;
    let grid = grid(&c.grid)?;
    let opts = stepper(&c.stepper)?;
    let params: Vec<DiracParams<f64>> = c
        .dirac
        .masses_mhz
        .iter()
        .map(|&m| DiracParams::new(m, c.dirac.momentum_mhz))
        .collect::<crate::Result<_>>()?;

    // (times, level populations, leakage) per mass
    type Run = (Vec<f64>, Vec<[f64; 4]>, Vec<f64>);
    let mut warnings = Vec::new();
    let runs: Vec<Run> = match c.model {
        Model::Ideal4 => params
            .par_iter()
            .map(|p| {
                let h = dirac::build_dirac_hamiltonian(p)?;
                let traj = evolve_static(&h, &NamedState::Level(0).state()?, &grid)?;
                let n = traj.len();
                Ok((traj.times.clone(), traj.level_populations(), vec![0.0; n]))
            })
            .collect::<ScenarioResult<_>>()?,
        Model::Circuit9 => {
            let (basis, frame) = circuit_setup(&c.circuit)?;
            warnings.extend(basis.params.warnings());
            params
                .par_iter()
                .map(|p| {
                    let cmp = compare_with_ideal(
                        &basis,
                        p,
                        DriveMode::Calibrated,
                        c.circuit.drive_target,
                        0,
                        &grid,
                        frame,
                        &opts,
                    )?;
                    Ok((cmp.diamond.times, cmp.diamond.populations, cmp.diamond.leakage))
                })
                .collect::<ScenarioResult<_>>()?
        }
    };

    let mut pops = Table::new("populations", &["mass_mhz", "t_us", "p0", "p1", "p2", "p3", "leakage"]);
    let mut freqs = Table::new(
        "frequencies",
        &[
            "mass_mhz",
            "energy_mhz",
            "oracle_p0_frequency_mhz",
            "measured_p0_frequency_mhz",
            "max_p3",
            "max_p0_oracle_error",
        ],
    );
    let mut series = Vec::new();
    let mut summary = Vec::new();
    for (p, (times, levels, leakage)) in params.iter().zip(&runs) {
        let mut max_p3 = 0.0f64;
        let mut oracle_err = 0.0f64;
        for ((t, l), leak) in times.iter().zip(levels).zip(leakage) {
            pops.push_numbers(&[p.mass_mhz, *t, l[0], l[1], l[2], l[3], *leak]);
            max_p3 = max_p3.max(l[3]);
            oracle_err = oracle_err.max((l[0] - two_level_p0(p, *t)?).abs());
        }
        let p0: Vec<f64> = levels.iter().map(|l| l[0]).collect();
        let measured = dominant_frequency_mhz(times, &p0);
        let energy = p.energy_mhz();
        freqs.push(vec![
            num(p.mass_mhz),
            num(energy),
            num(2.0 * energy),
            measured.map(num).unwrap_or_default(),
            num(max_p3),
            num(oracle_err),
        ]);
        summary.push(format!(
            "m = {} MHz: P0 frequency {} MHz (oracle {} MHz), max P3 {:e}",
            p.mass_mhz,
            measured.map(|f| format!("{f:.4}")).unwrap_or_else(|| "n/a".into()),
            2.0 * energy,
            max_p3
        ));
        series.push(Series::new(
            format!("m = {} MHz", p.mass_mhz),
            times.iter().copied().zip(p0).collect(),
        ));
    }
    Ok(ResultBundle {
        plots: vec![(
            "p0".into(),
            line_plot("Ground-state population", "t (µs)", "P0", &series),
        )],
        tables: vec![pops, freqs],
        summary,
        warnings,
    })
}

fn spin_texture(c: &SpinTextureConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::SpinTexture, c.model, &[Model::Ideal4])?;
    let grid = SphereGrid {
        n_polar: c.texture.n_polar,
        n_azimuthal: c.texture.n_azimuthal,
    };
    let points = dirac::spin_texture(c.texture.energy_mhz, &grid)?;
    let mut table = Table::new(
        "texture",
        &[
            "theta",
            "phi",
            "nx",
            "ny",
            "nz",
            "sx",
            "sy",
            "sz",
            "spin_norm",
            "radial",
            "helicity",
            "stereo_x",
            "stereo_y",
        ],
    );
    let mut arrows = Vec::new();
    let (mut pole_dev, mut equator_radial, mut radial_vs_helicity) = (0.0f64, 0.0f64, 0.0f64);
    for p in &points {
        let s = p.spin.as_array();
        let (x, y) = match p.stereographic {
            Some((x, y)) => {
                arrows.push((x, y, s[0], s[1]));
                (num(x), num(y))
            }
            None => (String::new(), String::new()),
        };
        let mut row: Vec<String> = [p.theta, p.phi]
            .iter()
            .chain(&p.direction)
            .chain(&s)
            .chain(&[p.spin.magnitude(), p.radial, p.helicity])
            .map(|&v| num(v))
            .collect();
        row.push(x);
        row.push(y);
        table.push(row);
        if p.direction[2].abs() > 1.0 - 1e-12 {
            pole_dev = pole_dev
                .max((s[0].powi(2) + s[1].powi(2)).sqrt())
                .max((p.spin.direction()[2] - 1.0).abs());
        }
        if p.direction[2].abs() < 1e-12 {
            equator_radial = equator_radial.max(p.radial.abs());
        }
        radial_vs_helicity = radial_vs_helicity.max((p.radial - p.helicity).abs());
    }
    let mut checks = Table::new("checks", &["check", "value", "tolerance", "pass"]);
    for (name, value, tol) in [
        ("pole_spin_up_deviation", pole_dev, 1e-9),
        ("equator_max_abs_radial", equator_radial, 1e-9),
        ("max_abs_radial_minus_helicity", radial_vs_helicity, 1e-8),
    ] {
        checks.push(vec![name.into(), num(value), num(tol), (value <= tol).to_string()]);
    }
    Ok(ResultBundle {
        plots: vec![(
            "texture".into(),
            quiver_plot("Bright-state spin, stereographic projection", "X", "Y", &arrows),
        )],
        summary: vec![
            format!("{} sphere points", points.len()),
            format!("pole deviation {pole_dev:e}, equator radial {equator_radial:e}, radial-helicity {radial_vs_helicity:e}"),
        ],
        tables: vec![table, checks],
        warnings: Vec::new(),
    })
}

fn chirp_schedule(c: &ChirpSection) -> ScenarioResult<ChirpSchedule<f64>> {
    Ok(ChirpSchedule::new(c.target, c.start_mhz, c.end_mhz, c.rate_mhz_per_us)?)
}

fn chirp_base(mass: f64, schedule: &ChirpSchedule<f64>) -> ScenarioResult<DiracParams<f64>> {
    let p = DiracParams::new(mass, [0.0; 3])?;
    let p = schedule.apply(&p, 0.0);
    p.validate()?;
    Ok(p)
}

fn final_p01(mass: f64, schedule: &ChirpSchedule<f64>, opts: &StepperOptions<f64>) -> ScenarioResult<f64> {
    let grid = TimeGrid::new(0.0, schedule.duration(), 2)?;
    let traj = evolve_chirped_with(
        &chirp_base(mass, schedule)?,
        schedule,
        &NamedState::Level(0).state()?,
        &grid,
        opts,
    )?;
    Ok(manifold_population(traj.final_state(), &[0, 1])?)
}

fn pair_production(c: &PairProductionConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::PairProduction, c.model, &[Model::Ideal4])?;
    let schedule = chirp_schedule(&c.chirp)?;
    if c.chirp.target == ChirpTarget::Mass {
        return Err(config_error(
            "pair-production sweeps a momentum component, not the mass",
        ));
    }
    let opts = stepper(&c.stepper)?;
    if !(c.scan.mass_step_mhz > 0.0) || c.scan.mass_end_mhz < c.scan.mass_start_mhz || c.scan.mass_start_mhz < 0.0 {
        return Err(config_error(
            "scan needs 0 <= mass_start <= mass_end and a positive step",
        ));
    }
    let states: Vec<NamedState> = c
        .trajectories
        .initial_states
        .iter()
        .map(|s| NamedState::parse(s))
        .collect::<crate::Result<_>>()?;
    let grid = TimeGrid::new(0.0, schedule.duration(), c.trajectories.samples)?;

    let tasks: Vec<(f64, NamedState)> = c
        .trajectories
        .masses_mhz
        .iter()
        .flat_map(|&m| states.iter().map(move |&s| (m, s)))
        .collect();
    let trajectories = tasks
        .par_iter()
        .map(|&(m, s)| {
            Ok(evolve_chirped_with(
                &chirp_base(m, &schedule)?,
                &schedule,
                &s.state()?,
                &grid,
                &opts,
            )?)
        })
        .collect::<ScenarioResult<Vec<_>>>()?;

    let observables = ["p_plus01", "p_minus01", "p_plus23", "p_minus23"];
    let mut traj_table = Table::new(
        "trajectories",
        &[
            "mass_mhz",
            "initial_state",
            "t_us",
            "sweep_mhz",
            "p0",
            "p1",
            "p2",
            "p3",
            "p_plus01",
            "p_minus01",
            "p_plus23",
            "p_minus23",
        ],
    );
    let mut summary = Vec::new();
    let mut series = Vec::new();
    for (&(m, s), traj) in tasks.iter().zip(&trajectories) {
        let levels = traj.level_populations();
        for (k, t) in traj.times.iter().enumerate() {
            let mut row = vec![num(m), s.label(), num(*t), num(schedule.value_at(*t))];
            row.extend(levels[k].iter().map(|&x| num(x)));
            row.extend(observables.iter().map(|o| num(traj.observables[*o][k])));
            traj_table.push(row);
        }
        let last = traj.len() - 1;
        summary.push(format!(
            "m = {m} MHz from |{}>: final |+>01 {:.6}, |->01 {:.6}, |+>23 {:.6}, |->23 {:.6}",
            s.label(),
            traj.observables["p_plus01"][last],
            traj.observables["p_minus01"][last],
            traj.observables["p_plus23"][last],
            traj.observables["p_minus23"][last],
        ));
        series.push(Series::new(
            format!("m={m}, |{}>", s.label()),
            traj.times
                .iter()
                .copied()
                .zip(traj.observables["p_01"].iter().copied())
                .collect(),
        ));
    }

    let masses = c.scan.masses();
    let finals = masses
        .par_iter()
        .map(|&m| final_p01(m, &schedule, &opts))
        .collect::<ScenarioResult<Vec<_>>>()?;
    let mut scan = Table::new("scan", &["mass_mhz", "final_p01", "schwinger", "abs_deviation"]);
    let mut numeric = Vec::new();
    let mut formula = Vec::new();
    for (&m, &p) in masses.iter().zip(&finals) {
        let s = ADOPTED_SCHWINGER_CONVENTION.probability(m, schedule.rate_mhz2);
        scan.push_numbers(&[m, p, s, (p - s).abs()]);
        numeric.push((m, p));
        formula.push((m, s));
    }
    summary.push(format!(
        "scan: {} masses, max |final P01 - Schwinger| = {:.4}",
        masses.len(),
        finals
            .iter()
            .zip(&formula)
            .map(|(p, (_, s))| (p - s).abs())
            .fold(0.0, f64::max)
    ));
    Ok(ResultBundle {
        tables: vec![traj_table, scan],
        plots: vec![
            (
                "scan".into(),
                line_plot(
                    "Final {0,1} population after the sweep",
                    "m (MHz)",
                    "P01",
                    &[
                        Series::new("simulation", numeric),
                        Series::new("exp(-pi m^2/eps)", formula).dashed(),
                    ],
                ),
            ),
            (
                "trajectories".into(),
                line_plot("{0,1} population during the sweep", "t (µs)", "P01", &series),
            ),
        ],
        summary,
        warnings: Vec::new(),
    })
}

fn schwinger_scan(c: &SchwingerScanConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::SchwingerScan, c.model, &[Model::Ideal4])?;
    nonempty(&c.calibration.masses_mhz, "calibration.masses_mhz")?;
    nonempty(&c.calibration.rates_mhz_per_us, "calibration.rates_mhz_per_us")?;
    let opts = stepper(&c.stepper)?;
    let schedules: Vec<ChirpSchedule<f64>> = c
        .calibration
        .rates_mhz_per_us
        .iter()
        .map(|&r| ChirpSchedule::new(ChirpTarget::Px, c.calibration.start_mhz, c.calibration.end_mhz, r))
        .collect::<crate::Result<_>>()?;
    let tasks: Vec<(usize, f64)> = (0..schedules.len())
        .flat_map(|k| c.calibration.masses_mhz.iter().map(move |&m| (k, m)))
        .collect();
    let numeric = tasks
        .par_iter()
        .map(|&(k, m)| final_p01(m, &schedules[k], &opts))
        .collect::<ScenarioResult<Vec<_>>>()?;

    let conventions = [SchwingerConvention::Angular, SchwingerConvention::Ordinary];
    let mut table = Table::new(
        "calibration",
        &["rate_mhz_per_us", "mass_mhz", "numeric", "angular", "ordinary"],
    );
    let mut worst = [0.0f64; 2];
    for (&(k, m), &p) in tasks.iter().zip(&numeric) {
        let rate = schedules[k].rate_mhz2;
        let preds = conventions.map(|conv| conv.probability(m, rate));
        for (w, q) in worst.iter_mut().zip(preds) {
            *w = w.max((p - q).abs());
        }
        table.push_numbers(&[rate, m, p, preds[0], preds[1]]);
    }
    let adopted = if worst[0] <= worst[1] {
        conventions[0]
    } else {
        conventions[1]
    };
    let mut summary_table = Table::new("summary", &["convention", "max_abs_deviation", "adopted"]);
    for (conv, w) in conventions.iter().zip(worst) {
        summary_table.push(vec![
            format!("{conv:?}").to_lowercase(),
            num(w),
            (*conv == adopted).to_string(),
        ]);
    }
    let mut warnings = Vec::new();
    if adopted != ADOPTED_SCHWINGER_CONVENTION {
        warnings.push(format!(
            "calibration prefers {adopted:?} but the library uses {ADOPTED_SCHWINGER_CONVENTION:?}"
        ));
    }
    let mut series = Vec::new();
    for (k, s) in schedules.iter().enumerate() {
        let pts: Vec<(f64, f64)> = tasks
            .iter()
            .zip(&numeric)
            .filter(|((j, _), _)| *j == k)
            .map(|((_, m), p)| (*m, *p))
            .collect();
        let curve: Vec<(f64, f64)> = pts
            .iter()
            .map(|(m, _)| (*m, adopted.probability(*m, s.rate_mhz2)))
            .collect();
        series.push(Series::new(format!("rate {}", s.rate_mhz2), pts));
        series.push(Series::new(format!("formula, rate {}", s.rate_mhz2), curve).dashed());
    }
    Ok(ResultBundle {
        tables: vec![table, summary_table],
        plots: vec![(
            "calibration".into(),
            line_plot("Schwinger calibration", "m (MHz)", "P01", &series),
        )],
        summary: vec![format!(
            "max deviation: angular {:.4}, ordinary {:.4}; adopted {adopted:?}",
            worst[0], worst[1]
        )],
        warnings,
    })
}

fn circuit_validation(c: &CircuitValidationConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::CircuitValidation, c.model, &[Model::Circuit9])?;
    nonempty(&c.modes, "modes")?;
    if c.dirac.initial_level > 3 {
        return Err(config_error("dirac.initial_level must be 0..=3"));
    }
    let (basis, frame) = circuit_setup(&c.circuit)?;
    let grid = grid(&c.grid)?;
    let opts = stepper(&c.stepper)?;
    let params = DiracParams::new(c.dirac.mass_mhz, c.dirac.momentum_mhz)?;

    let mut spectrum = Table::new("spectrum", &["energy_mhz", "excitation", "diamond_level"]);
    for (i, s) in basis.states.iter().enumerate() {
        let label = basis
            .diamond_indices
            .iter()
            .position(|&d| d == i)
            .map(|l| l.to_string())
            .unwrap_or_default();
        spectrum.push(vec![num(s.energy_mhz), s.excitation.to_string(), label]);
    }
    let elements = basis.transition_matrix_elements(&c.circuit.drive_target.raising_operator());
    let mut transitions = Table::new(
        "transitions",
        &["transition", "frequency_mhz", "matrix_element_re", "matrix_element_im"],
    );
    for ((lo, hi), (f, m)) in TRANSITIONS
        .iter()
        .zip(basis.transition_frequencies_mhz.iter().zip(elements))
    {
        transitions.push(vec![format!("{lo}-{hi}"), num(*f), num(m.re), num(m.im)]);
    }

    let run = |mode: ModeKind, frame: Frame<f64>| -> ScenarioResult<CircuitComparison<f64>> {
        Ok(compare_with_ideal(
            &basis,
            &params,
            drive_mode(mode, &c.circuit),
            c.circuit.drive_target,
            c.dirac.initial_level,
            &grid,
            frame,
            &opts,
        )?)
    };
    let other = match frame {
        Frame::Lab => Frame::Rotating(c.circuit.frame_mhz),
        Frame::Rotating(_) => Frame::Lab,
    };
    let mut jobs: Vec<(ModeKind, Frame<f64>)> = c.modes.iter().map(|&m| (m, frame)).collect();
    if c.frame_check {
        jobs.push((c.modes[0], other));
    }
    let results = jobs
        .par_iter()
        .map(|&(m, f)| run(m, f))
        .collect::<ScenarioResult<Vec<_>>>()?;

    let frame_name = |f: Frame<f64>| match f {
        Frame::Lab => "lab".to_string(),
        Frame::Rotating(w) => format!("rotating@{w}"),
    };
    let mut tables = vec![spectrum, transitions];
    let mut plots = Vec::new();
    let mut summary_table = Table::new("summary", &["mode", "frame", "rms_error", "max_error", "max_leakage"]);
    let mut summary = Vec::new();
    let bare_header: Vec<String> = std::iter::once("t_us".to_string())
        .chain((0..circuit::DIM).map(|i| format!("p{}", bare_label(i))))
        .collect();
    for (&(mode, f), r) in jobs.iter().zip(&results).take(c.modes.len()) {
        let name = format!("{mode:?}").to_lowercase();
        let mut bare = Table {
            name: format!("bare_populations_{name}"),
            header: bare_header.clone(),
            rows: Vec::new(),
        };
        for (t, p) in r.trajectory.times.iter().zip(&r.trajectory.populations) {
            bare.push(std::iter::once(*t).chain(p.iter().copied()).map(num).collect());
        }
        let mut diamond = Table::new(
            &format!("diamond_{name}"),
            &[
                "t_us", "d0", "d1", "d2", "d3", "leakage", "ideal0", "ideal1", "ideal2", "ideal3",
            ],
        );
        for ((t, d), (leak, i)) in r
            .diamond
            .times
            .iter()
            .zip(&r.diamond.populations)
            .zip(r.diamond.leakage.iter().zip(&r.ideal))
        {
            let mut row = vec![*t];
            row.extend(d);
            row.push(*leak);
            row.extend(i);
            diamond.push_numbers(&row);
        }
        summary_table.push(vec![
            name.clone(),
            frame_name(f),
            num(r.rms_error),
            num(r.max_error),
            num(r.max_leakage),
        ]);
        summary.push(format!(
            "{name}: RMS error {:.4}, max error {:.4}, max leakage {:.4}",
            r.rms_error, r.max_error, r.max_leakage
        ));
        let mut series: Vec<Series> = (0..4)
            .map(|k| {
                Series::new(
                    format!("D{k}"),
                    r.diamond
                        .times
                        .iter()
                        .copied()
                        .zip(r.diamond.populations.iter().map(|p| p[k]))
                        .collect(),
                )
            })
            .collect();
        series.extend((0..4).map(|k| {
            Series::new(
                format!("ideal {k}"),
                r.diamond
                    .times
                    .iter()
                    .copied()
                    .zip(r.ideal.iter().map(|p| p[k]))
                    .collect(),
            )
            .dashed()
        }));
        plots.push((
            format!("diamond_{name}"),
            line_plot(&format!("Diamond populations ({name})"), "t (µs)", "P", &series),
        ));
        tables.push(bare);
        tables.push(diamond);
    }
    tables.push(summary_table);
    if c.frame_check {
        let (a, b) = (&results[0], &results[results.len() - 1]);
        let diff = a
            .trajectory
            .populations
            .iter()
            .zip(&b.trajectory.populations)
            .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max);
        let mut fc = Table::new(
            "frame_check",
            &["mode", "frame_a", "frame_b", "max_population_difference"],
        );
        fc.push(vec![
            format!("{:?}", c.modes[0]).to_lowercase(),
            frame_name(frame),
            frame_name(other),
            num(diff),
        ]);
        summary.push(format!("frame check: max population difference {diff:e}"));
        tables.push(fc);
    }
    Ok(ResultBundle {
        tables,
        plots,
        summary,
        warnings: basis.params.warnings(),
    })
}

fn bell_check(c: &BellCheckConfig) -> ScenarioResult<ResultBundle> {
    require_model(ScenarioKind::BellCheck, c.model, &[Model::Ideal4])?;
    let b = &c.bell;
    if !(b.mass_max_mhz >= 0.0 && b.px_max_mhz >= 0.0 && b.tolerance > 0.0) || b.draws == 0 {
        return Err(config_error(
            "bell section needs draws > 0, non-negative ranges and a positive tolerance",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let draws: Vec<(f64, f64)> = (0..b.draws)
        .map(|_| {
            (
                rng.gen::<f64>() * b.mass_max_mhz,
                (2.0 * rng.gen::<f64>() - 1.0) * b.px_max_mhz,
            )
        })
        .collect();
    let mut table = Table::new("residuals", &["draw", "mass_mhz", "px_mhz", "residual", "pass"]);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for (k, &(m, px)) in draws.iter().enumerate() {
        let r = dirac::factored_residual(&DiracParams::new(m, [px, 0.0, 0.0])?)?;
        worst = worst.max(r);
        let pass = r <= b.tolerance;
        failures += usize::from(!pass);
        table.push(vec![k.to_string(), num(m), num(px), num(r), pass.to_string()]);
    }
    Ok(ResultBundle {
        tables: vec![table],
        plots: Vec::new(),
        summary: vec![format!(
            "{} draws, max residual {worst:e} (tolerance {:e}), {failures} failures",
            b.draws, b.tolerance
        )],
        warnings: Vec::new(),
    })
}
