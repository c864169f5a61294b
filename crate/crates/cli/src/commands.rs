use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use snakevqe::oracle::MAX_ORACLE_QUBITS;
use snakevqe::{
    builtin, default_h2_family, gd_run, ground_energy, snake_run, st_basin, trajectory_csv, Ansatz,
    Builtin, FamilyPoint, GdConfig, HamiltonianFamily, Landscape, ObjectiveFamily, RunOutcome,
    RunReport, SnakeConfig, SnakeState, StBasin, StFamily, VqeFamily,
};

use crate::config::{
    family_source, output_dir, resolve_run, AnsatzFlags, Defaults, FamilyFlags, FamilySource,
    FileConfig, Optimizer, RunFlags, RunSettings,
};
use crate::plot::plot_file;
use crate::table::{num, Table};

/// Outcome of a successful command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Converged,
    BudgetExhausted,
}

impl Status {
    fn from_converged(all: bool) -> Self {
        if all {
            Status::Converged
        } else {
            Status::BudgetExhausted
        }
    }
}

fn load_family(source: FamilySource) -> Result<HamiltonianFamily> {
    match source {
        FamilySource::File(path) => Ok(HamiltonianFamily::load(&path)?),
        FamilySource::Synthetic(_) => Ok(default_h2_family()),
    }
}

fn default_ansatz_for(n_qubits: usize) -> Result<Ansatz> {
    let b = match n_qubits {
        2 => Builtin::H2Ucc,
        3 => Builtin::LihUcc,
        4 => Builtin::HehpUcc,
        n => bail!("no default ansatz for {n} qubits; pass --ansatz"),
    };
    Ok(b.ansatz())
}

fn resolve_ansatz(flags: &AnsatzFlags, file: &FileConfig, n_qubits: usize) -> Result<Ansatz> {
    let ansatz = match flags.ansatz.as_ref().or(file.ansatz.as_ref()) {
        None => default_ansatz_for(n_qubits)?,
        Some(spec) => match spec.parse::<Builtin>() {
            Ok(b) => b.ansatz(),
            Err(_) if Path::new(spec).exists() => Ansatz::load(spec)?,
            Err(e) => bail!(e),
        },
    };
    match flags.reference.as_ref().or(file.reference.as_ref()) {
        Some(bits) => Ok(ansatz.with_reference(bits)?),
        None => Ok(ansatz),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn exact_energies(family: &HamiltonianFamily) -> Result<Option<Vec<f64>>> {
    if family.n_qubits() > MAX_ORACLE_QUBITS {
        return Ok(None);
    }
    family
        .points()
        .iter()
        .map(|p| Ok(ground_energy(&p.hamiltonian)?))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

fn run_optimizer<F: ObjectiveFamily>(
    optimizer: Optimizer,
    family: &F,
    config: &SnakeConfig,
    init: Option<SnakeState>,
    stride: usize,
) -> Result<RunOutcome> {
    Ok(match optimizer {
        Optimizer::Snake => snake_run(family, config, init, stride)?,
        Optimizer::Gd => gd_run(family, &GdConfig::from(config), init, stride)?,
    })
}

fn plot_outputs(out: &Path, files: &[&str]) -> Result<()> {
    for f in files {
        plot_file(&out.join(f), out)?;
    }
    Ok(())
}

pub struct SolveArgs<'a> {
    pub family: &'a FamilyFlags,
    pub ansatz: &'a AnsatzFlags,
    pub optimizer: Option<Optimizer>,
    pub run: &'a RunFlags,
}

pub fn solve(args: SolveArgs) -> Result<Status> {
    let file = FileConfig::load(args.run.config.as_deref())?;
    let Some(source) = family_source(args.family, &file) else {
        bail!("solve needs exactly one of --family PATH or --synthetic h2");
    };
    let optimizer = args
        .optimizer
        .or(file.optimizer)
        .unwrap_or(Optimizer::Snake);
    let settings = resolve_run(
        args.run,
        &file,
        Defaults {
            snake: SnakeConfig::default(),
            snapshot_stride: 100,
        },
    )?;
    let family = load_family(source)?;
    let ansatz = resolve_ansatz(args.ansatz, &file, family.n_qubits())?;
    let vqe = VqeFamily::new(family, ansatz)?;
    let exact = exact_energies(vqe.family())?;

    let outcome = run_optimizer(
        optimizer,
        &vqe,
        &settings.snake,
        None,
        settings.snapshot_stride,
    )?;
    let out = &settings.out;
    prepare_out(out)?;

    let dim = vqe.dim();
    let mut header: Vec<String> = vec!["lambda".into(), "energy".into(), "exact_energy".into()];
    header.extend((0..dim).map(|i| format!("theta_{i}")));
    header.push("grad_norm".into());
    let mut table = Table::new(header);
    for m in 0..vqe.members() {
        let mut row = vec![
            num(vqe.label(m)),
            num(outcome.values[m]),
            exact.as_ref().map_or(String::new(), |e| num(e[m])),
        ];
        row.extend(outcome.state.row(m).iter().map(|&x| num(x)));
        row.push(num(outcome.grad_norms[m]));
        table.push(row);
    }
    table.write(&out.join("results.csv"))?;
    let report = RunReport::new(
        optimizer.name(),
        &settings.snake,
        &vqe,
        &outcome,
        settings.wall_time,
    );
    write_text(&out.join("report.json"), &report.to_json())?;
    write_text(&out.join("trajectory.csv"), &trajectory_csv(&vqe, &outcome))?;
    if settings.plot {
        plot_outputs(out, &["results.csv", "trajectory.csv"])?;
    }

    let gap = exact.as_ref().map(|e| {
        outcome
            .values
            .iter()
            .zip(e)
            .map(|(v, x)| (v - x).abs())
            .fold(0.0, f64::max)
    });
    println!(
        "{}: {} members, {} iterations, converged {}, max grad {:.3e}{}",
        optimizer.name(),
        vqe.members(),
        outcome.iterations(),
        outcome.converged,
        outcome.max_grad_norm(),
        gap.map_or(String::new(), |g| format!(", max |E - E_exact| {g:.3e}")),
    );
    Ok(Status::from_converged(outcome.converged))
}

#[derive(Serialize)]
struct StSummary {
    seed: u64,
    members: usize,
    counted_members: usize,
    init_global_fraction: f64,
    snake_global_fraction: f64,
    gd_global_fraction: f64,
    snake_iterations: usize,
    gd_iterations: usize,
    snake_converged: bool,
    gd_converged: bool,
    config: SnakeConfig,
}

fn global_fraction(family: &StFamily, xs: impl Iterator<Item = f64>) -> (usize, f64) {
    let labels: Vec<StBasin> = xs
        .enumerate()
        .filter_map(|(m, x)| st_basin(x, family.t(m)))
        .collect();
    let global = labels.iter().filter(|&&b| b == StBasin::Global).count();
    (labels.len(), global as f64 / labels.len().max(1) as f64)
}

fn basin_name(x: f64, t: f64) -> &'static str {
    st_basin(x, t).map_or("tie", StBasin::name)
}

pub fn benchmark_st(members: Option<usize>, run: &RunFlags) -> Result<Status> {
    let file = FileConfig::load(run.config.as_deref())?;
    let settings = resolve_run(
        run,
        &file,
        Defaults {
            snake: SnakeConfig {
                alpha: 20.0,
                beta: 3.0,
                eta: 0.02,
                ..SnakeConfig::default()
            },
            snapshot_stride: 0,
        },
    )?;
    let members = members
        .or(file.members)
        .unwrap_or(StFamily::DEFAULT_MEMBERS);
    let family = StFamily::uniform(members)?;
    let init = SnakeState::random_for(&family, settings.snake.seed)?;
    let snake = snake_run(
        &family,
        &settings.snake,
        Some(init.clone()),
        settings.snapshot_stride,
    )?;
    let gd = gd_run(
        &family,
        &GdConfig::from(&settings.snake),
        Some(init.clone()),
        settings.snapshot_stride,
    )?;
    let out = &settings.out;
    prepare_out(out)?;

    let mut table = Table::new(["t", "init_x", "snake_x", "snake_basin", "gd_x", "gd_basin"]);
    for m in 0..members {
        let t = family.t(m);
        let (s, g) = (snake.state.row(m)[0], gd.state.row(m)[0]);
        table.push(vec![
            num(t),
            num(init.row(m)[0]),
            num(s),
            basin_name(s, t).into(),
            num(g),
            basin_name(g, t).into(),
        ]);
    }
    table.write(&out.join("st.csv"))?;

    let column = |state: &SnakeState| {
        (0..members)
            .map(move |m| state.row(m)[0])
            .collect::<Vec<_>>()
    };
    let (counted, init_frac) = global_fraction(&family, column(&init).into_iter());
    let (_, snake_frac) = global_fraction(&family, column(&snake.state).into_iter());
    let (_, gd_frac) = global_fraction(&family, column(&gd.state).into_iter());
    let summary = StSummary {
        seed: settings.snake.seed,
        members,
        counted_members: counted,
        init_global_fraction: init_frac,
        snake_global_fraction: snake_frac,
        gd_global_fraction: gd_frac,
        snake_iterations: snake.iterations(),
        gd_iterations: gd.iterations(),
        snake_converged: snake.converged,
        gd_converged: gd.converged,
        config: settings.snake.clone(),
    };
    write_json(&out.join("st_summary.json"), &summary)?;
    let mut plots = vec!["st.csv"];
    if settings.snapshot_stride > 0 {
        write_text(
            &out.join("st_trajectory_snake.csv"),
            &trajectory_csv(&family, &snake),
        )?;
        write_text(
            &out.join("st_trajectory_gd.csv"),
            &trajectory_csv(&family, &gd),
        )?;
        plots.extend(["st_trajectory_snake.csv", "st_trajectory_gd.csv"]);
    }
    if settings.plot {
        plot_outputs(out, &plots)?;
    }
    println!(
        "global basin fraction over {counted} members with t > 0: snake {snake_frac:.3}, gd {gd_frac:.3} (inits {init_frac:.3})"
    );
    Ok(Status::from_converged(snake.converged && gd.converged))
}

#[derive(Serialize)]
struct Trap {
    member: usize,
    lambda: f64,
    start_theta: Vec<f64>,
    final_theta: Vec<f64>,
    final_energy: f64,
    global_grid_energy: f64,
    converged: bool,
}

#[derive(Serialize)]
struct NonconvexSummary {
    seed: u64,
    members: usize,
    snake_max_abs_theta_2: f64,
    gd_max_abs_theta_2: f64,
    snake_iterations: usize,
    gd_iterations: usize,
    snake_converged: bool,
    gd_converged: bool,
    trap: Option<Trap>,
    config: SnakeConfig,
}

/// Grid resolution per axis for the trap search.
const TRAP_SCAN_RESOLUTION: usize = 256;

/// Runs GD on one member from the deepest off-axis grid-local minimum.
fn trap_probe(vqe: &VqeFamily, member: usize, settings: &RunSettings) -> Result<Option<Trap>> {
    let h = vqe.family().hamiltonian(member);
    let land = Landscape::scan(vqe.ansatz(), h, TRAP_SCAN_RESOLUTION)?;
    let minima = land.local_minima();
    let global = minima[0].energy;
    let Some(start) = minima
        .iter()
        .find(|p| p.theta[1].abs() > 0.5 && p.energy > global + 1e-3)
    else {
        return Ok(None);
    };
    let single = HamiltonianFamily::new(
        vqe.family().parameter_name(),
        vec![FamilyPoint {
            lambda: vqe.label(member),
            hamiltonian: h.clone(),
        }],
    )?;
    let single = VqeFamily::new(single, vqe.ansatz().clone())?;
    let init = SnakeState::new(1, 2, start.theta.clone())?;
    let out = gd_run(&single, &GdConfig::from(&settings.snake), Some(init), 0)?;
    Ok(Some(Trap {
        member,
        lambda: vqe.label(member),
        start_theta: start.theta.clone(),
        final_theta: out.state.row(0).to_vec(),
        final_energy: out.values[0],
        global_grid_energy: global,
        converged: out.converged,
    }))
}

pub fn nonconvex_h2(family_flags: &FamilyFlags, run: &RunFlags) -> Result<Status> {
    let file = FileConfig::load(run.config.as_deref())?;
    let settings = resolve_run(
        run,
        &file,
        Defaults {
            snake: SnakeConfig {
                alpha: 5.0,
                beta: 3.0,
                eta: 0.2,
                ..SnakeConfig::default()
            },
            snapshot_stride: 100,
        },
    )?;
    let family = match family_source(family_flags, &file) {
        Some(source) => load_family(source)?,
        None => default_h2_family(),
    };
    let vqe = VqeFamily::new(family, builtin("h2_nonconvex")?)?;
    let init = SnakeState::random_for(&vqe, settings.snake.seed)?;
    let snake = snake_run(
        &vqe,
        &settings.snake,
        Some(init.clone()),
        settings.snapshot_stride,
    )?;
    let gd = gd_run(
        &vqe,
        &GdConfig::from(&settings.snake),
        Some(init),
        settings.snapshot_stride,
    )?;
    let exact = exact_energies(vqe.family())?;
    let out = &settings.out;
    prepare_out(out)?;

    let mut table = Table::new([
        "lambda",
        "snake_theta_1",
        "snake_theta_2",
        "snake_energy",
        "gd_theta_1",
        "gd_theta_2",
        "gd_energy",
        "exact_energy",
    ]);
    for m in 0..vqe.members() {
        let (s, g) = (snake.state.row(m), gd.state.row(m));
        table.push(vec![
            num(vqe.label(m)),
            num(s[0]),
            num(s[1]),
            num(snake.values[m]),
            num(g[0]),
            num(g[1]),
            num(gd.values[m]),
            exact.as_ref().map_or(String::new(), |e| num(e[m])),
        ]);
    }
    table.write(&out.join("nonconvex.csv"))?;
    write_text(
        &out.join("trajectory_snake.csv"),
        &trajectory_csv(&vqe, &snake),
    )?;
    write_text(&out.join("trajectory_gd.csv"), &trajectory_csv(&vqe, &gd))?;

    let max_theta_2 = |o: &RunOutcome| o.state.rows().map(|r| r[1].abs()).fold(0.0, f64::max);
    let summary = NonconvexSummary {
        seed: settings.snake.seed,
        members: vqe.members(),
        snake_max_abs_theta_2: max_theta_2(&snake),
        gd_max_abs_theta_2: max_theta_2(&gd),
        snake_iterations: snake.iterations(),
        gd_iterations: gd.iterations(),
        snake_converged: snake.converged,
        gd_converged: gd.converged,
        trap: trap_probe(&vqe, vqe.members() / 2, &settings)?,
        config: settings.snake.clone(),
    };
    write_json(&out.join("nonconvex_summary.json"), &summary)?;
    if settings.plot {
        plot_outputs(
            out,
            &["nonconvex.csv", "trajectory_snake.csv", "trajectory_gd.csv"],
        )?;
    }
    println!(
        "max |theta_2| over {} members: snake {:.3e}, gd {:.3e}",
        vqe.members(),
        summary.snake_max_abs_theta_2,
        summary.gd_max_abs_theta_2
    );
    Ok(Status::from_converged(snake.converged && gd.converged))
}

pub fn oracle(
    family_flags: &FamilyFlags,
    config: Option<&Path>,
    out: Option<&PathBuf>,
) -> Result<Status> {
    let file = FileConfig::load(config)?;
    let Some(source) = family_source(family_flags, &file) else {
        bail!("oracle needs exactly one of --family PATH or --synthetic h2");
    };
    let family = load_family(source)?;
    if family.n_qubits() > MAX_ORACLE_QUBITS {
        bail!(
            "{} qubits exceeds the oracle limit of {MAX_ORACLE_QUBITS}",
            family.n_qubits()
        );
    }
    let out = output_dir(out, &file);
    prepare_out(&out)?;
    let mut table = Table::new(["lambda", "exact_energy"]);
    for p in family.points() {
        table.push(vec![num(p.lambda), num(ground_energy(&p.hamiltonian)?)]);
    }
    table.write(&out.join("oracle.csv"))?;
    println!("{} exact energies written", family.len());
    Ok(Status::Converged)
}

pub fn plot(inputs: &[PathBuf], out: Option<&PathBuf>) -> Result<Status> {
    if inputs.is_empty() {
        bail!("plot needs at least one CSV file");
    }
    for input in inputs {
        if !input.is_file() {
            bail!("{}: no such file", input.display());
        }
        let dir = match out {
            Some(d) => d.clone(),
            None => input.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        prepare_out(&dir)?;
        let written = plot_file(input, &dir)?;
        println!("{}", written.display());
    }
    Ok(Status::Converged)
}
