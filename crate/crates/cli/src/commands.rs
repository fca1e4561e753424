//! Subcommand implementations: library call, table assembly, output.

use crate::models;
use crate::output::{self, Table};
use crate::{Cli, CliError, Command};
use statmech::chemical;
use statmech::ensembles::{self, LevelSpectrum, PowerLawDos, ThermoPoint};
use statmech::gases::{self, GasKind};
use statmech::interactions::PairPotential;
use statmech::ising;
use statmech::linalg::CMat;
use statmech::master;
use statmech::noneq;
use statmech::numerics::{RandomStream, Tolerance};
use statmech::response;
use statmech::stochastic::{self, RateMatrix};
use statmech::transport;
use num_complex::Complex64;

fn read(path: &std::path::Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &std::path::Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::Config(format!("bad JSON in {}: {e}", path.display())))
}

fn sweep(min: f64, max: f64, steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![min];
    }
    (0..steps)
        .map(|i| min + (max - min) * i as f64 / (steps - 1) as f64)
        .collect()
}

pub fn run(cli: &Cli, hash: u64) -> Result<(), CliError> {
    let tol = Tolerance::new(cli.tol_abs, cli.tol_rel, 4_000_000)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let table = dispatch(cli, tol)?;
    let write = |w: &mut dyn std::io::Write| -> std::io::Result<()> {
        match cli.format.as_str() {
            "json" => output::write_json(w, &table, hash, cli.seed),
            _ => output::write_csv(w, &table, hash, cli.seed),
        }
    };
    let io_result = match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| CliError::Config(format!("cannot create {}: {e}", path.display())))?;
            write(&mut f)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    };
    io_result.map_err(|e| CliError::Compute(format!("write failed: {e}")))
}

fn dispatch(cli: &Cli, tol: Tolerance) -> Result<Table, CliError> {
    match &cli.command {
        Command::Ensemble { spectrum, t_min, t_max, steps } => {
            let spec = LevelSpectrum::from_csv(&read(spectrum)?)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let mut table = Table::new(&["T", "beta", "lnZ", "F", "E", "S", "C", "varE"]);
            for t in sweep(*t_min, *t_max, *steps) {
                let pt = ThermoPoint::from_temperature(t)?;
                let obs = ensembles::partition(&spec, &pt)?;
                table.push(vec![
                    t,
                    pt.beta,
                    obs.ln_z,
                    obs.free_energy,
                    obs.energy,
                    obs.entropy,
                    obs.heat_capacity,
                    obs.var_energy,
                ]);
            }
            Ok(table)
        }
        Command::Gas { kind, alpha, c, density, t_min, t_max, steps } => {
            let kind = match kind.as_str() {
                "bose" => GasKind::Bose,
                "fermi" => GasKind::Fermi,
                _ => GasKind::Boltzmann,
            };
            let dos = PowerLawDos::new(*c, *alpha, 1.0)?;
            let mut table = Table::new(&["T", "mu", "n", "e", "P", "condensate_fraction"]);
            if kind == GasKind::Bose {
                if let Ok(tc) = gases::bec_tc(&dos, *density) {
                    table.scalar("Tc", tc);
                }
            }
            for t in sweep(*t_min, *t_max, *steps) {
                let st = gases::invert_mu(&dos, kind, *density, t, tol)?;
                table.push(vec![t, st.mu, st.n, st.e, st.pressure, st.condensate_fraction]);
            }
            Ok(table)
        }
        Command::Chem { reaction } => {
            let rx: chemical::Reaction = parse_json(reaction)?;
            let eq = chemical::equilibrium_coordinate(&rx, tol)?;
            let mut cols = vec!["n_bar".to_string()];
            cols.extend(eq.counts.iter().map(|(n, _)| n.clone()));
            let mut table = Table {
                columns: cols,
                rows: Vec::new(),
                scalars: Vec::new(),
            };
            let mut row = vec![eq.coordinate];
            row.extend(eq.counts.iter().map(|(_, v)| *v));
            table.push(row);
            Ok(table)
        }
        Command::Ising {
            mode,
            n,
            beta_eps,
            beta_h,
            open_chain,
            coordination,
            eps,
            h,
            temperature,
            sweep: sweep_file,
            eps_tilde,
            geometry,
        } => match mode.as_str() {
            "1d" => {
                let params = ising::IsingParams::new(*beta_eps, *beta_h, 1.0, 2)?;
                let sol = ising::ising1d_solve(&params, *n, !*open_chain)?;
                let mut table = Table::new(&["lnZ", "F_per_site", "M", "chi", "xi"]);
                table.push(vec![
                    sol.ln_z,
                    sol.free_energy_per_site,
                    sol.magnetization,
                    sol.chi_zero_field,
                    sol.xi,
                ]);
                Ok(table)
            }
            "mean-field" => {
                let mut t_values = vec![*temperature];
                let mut h_values = vec![*h];
                if let Some(path) = sweep_file {
                    let doc: toml::Table = read(path)?
                        .parse()
                        .map_err(|e| CliError::Config(format!("bad sweep TOML: {e}")))?;
                    let range = |name: &str, fallback: &Vec<f64>| -> Vec<f64> {
                        doc.get(name)
                            .and_then(|v| v.as_table())
                            .map(|t| {
                                let min = t.get("min").and_then(|v| v.as_float()).unwrap_or(0.0);
                                let max = t.get("max").and_then(|v| v.as_float()).unwrap_or(min);
                                let steps =
                                    t.get("steps").and_then(|v| v.as_integer()).unwrap_or(1) as usize;
                                sweep(min, max, steps)
                            })
                            .unwrap_or_else(|| fallback.clone())
                    };
                    t_values = range("t", &t_values);
                    h_values = range("h", &h_values);
                }
                let mut table = Table::new(&["T", "h", "m", "E_per_site", "C_per_site"]);
                for &t in &t_values {
                    for &hh in &h_values {
                        let params = ising::IsingParams::new(*eps, hh, t, *coordination)?;
                        let sol = ising::mean_field_magnetization(&params)?;
                        table.push(vec![t, hh, sol.magnetization, sol.energy_per_site, sol.heat_capacity]);
                    }
                }
                Ok(table)
            }
            "onsager" => {
                let (eps_c, tc) = ising::onsager2d_tc();
                let result = ising::onsager2d(*eps_tilde, tol)?;
                let mut table = Table::new(&["eps_tilde", "lnZ_per_site", "kappa"]);
                table.scalar("eps_tilde_critical", eps_c);
                table.scalar("Tc_over_eps", tc);
                table.push(vec![*eps_tilde, result.ln_z_per_site, result.kappa]);
                Ok(table)
            }
            "lee-yang" => {
                let geom = match geometry.as_str() {
                    "chain" => ising::Geometry::Chain,
                    "complete" => ising::Geometry::Complete,
                    _ => ising::Geometry::Ring,
                };
                let roots = ising::lee_yang_zeros(*n, *beta_eps, geom)?;
                let mut table = Table::new(&["re", "im", "abs"]);
                for r in roots {
                    table.push(vec![r.re, r.im, r.norm()]);
                }
                Ok(table)
            }
            other => Err(CliError::Config(format!("unknown ising mode {other}"))),
        },
        Command::Rg { d, r0, u0, tau_end, step } => {
            let fp = ising::rg_fixed_points(*d)?;
            let start = ising::RgPoint::new(*r0, *u0, *d)?;
            let traj = ising::rg_flow(&start, *tau_end, *step)?;
            let mut table = Table::new(&["tau", "r", "u"]);
            table.scalar("r_fixed", fp.nontrivial.0);
            table.scalar("u_fixed", fp.nontrivial.1);
            table.scalar("relevant_eigenvalue", fp.linearization.relevant);
            table.scalar("irrelevant_eigenvalue", fp.linearization.irrelevant);
            table.scalar("nu", fp.linearization.nu);
            // keep the emitted trajectory at a plottable density
            let stride = (traj.len() / 500).max(1);
            for p in traj.iter().step_by(stride) {
                table.push(vec![p.tau, p.r, p.u]);
            }
            Ok(table)
        }
        Command::Virial {
            potential,
            radius,
            depth,
            lambda,
            sigma,
            t_min,
            t_max,
            steps,
        } => {
            let pot = match potential.as_str() {
                "hard-sphere" => PairPotential::hard_sphere(*radius),
                "square-well" => PairPotential::square_well(*radius, *depth, *lambda),
                _ => PairPotential::lennard_jones(*depth, *sigma),
            };
            let mut table = Table::new(&["T", "b2", "a2"]);
            for t in sweep(*t_min, *t_max, *steps) {
                let (b2, a2) = statmech::interactions::mayer_b2(&pot, t, tol)?;
                table.push(vec![t, b2, a2]);
            }
            Ok(table)
        }
        Command::Langevin { mass, eta, nu, dt, n_traj, n_steps } => {
            let params = stochastic::LangevinParams {
                mass: *mass,
                eta: *eta,
                nu: *nu,
                force: |_| 0.0,
                dt: *dt,
            };
            let stream = RandomStream::new(cli.seed, 0);
            let stats = stochastic::langevin_simulate(&params, *n_traj, *n_steps, &stream)?;
            let mut table = Table::new(&["lag", "msd"]);
            table.scalar("mean_kinetic", stats.mean_kinetic);
            table.scalar("mean_kinetic_sigma", stats.mean_kinetic_sigma);
            table.scalar("vv_decay_rate", stats.vv_decay_rate);
            table.scalar("d_msd", stats.d_msd);
            table.scalar("d_green_kubo", stats.d_green_kubo);
            table.scalar("temperature", params.temperature());
            for (lag, msd) in &stats.msd {
                table.push(vec![*lag, *msd]);
            }
            Ok(table)
        }
        Command::Rates { matrix, n, p0, t_max, steps, steady } => {
            let w = RateMatrix::from_csv(*n, &read(matrix)?)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let mut cols = vec!["t".to_string()];
            cols.extend((0..*n).map(|i| format!("p{i}")));
            let mut table = Table {
                columns: cols,
                rows: Vec::new(),
                scalars: Vec::new(),
            };
            if *steady {
                let p = stochastic::rate_steady_state(&w)?;
                let mut row = vec![f64::INFINITY];
                row.extend(p);
                table.push(row);
                return Ok(table);
            }
            let p0: Vec<f64> = match p0 {
                Some(s) => s
                    .split(',')
                    .map(|x| x.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Config(format!("bad --p0: {e}")))?,
                None => vec![1.0 / *n as f64; *n],
            };
            if p0.len() != *n {
                return Err(CliError::Config("--p0 length mismatch".into()));
            }
            for t in sweep(0.0, *t_max, *steps) {
                let p = stochastic::rate_evolve(&w, &p0, t)?;
                let mut row = vec![t];
                row.extend(p);
                table.push(row);
            }
            Ok(table)
        }
        Command::Master { model, t_max, steps } => {
            let m: models::MasterModel = parse_json(model)?;
            let h = models::to_cmat(&m.h).map_err(CliError::Config)?;
            let dim = h.nrows();
            let ws: Vec<CMat> = m
                .w
                .iter()
                .map(|j| models::to_cmat(j).map_err(CliError::Config))
                .collect::<Result<_, _>>()?;
            let rho0 = match &m.rho0 {
                Some(j) => master::DensityMatrix::new(models::to_cmat(j).map_err(CliError::Config)?)
                    .map_err(|e| CliError::Config(e.to_string()))?,
                None => {
                    let mut v = vec![Complex64::new(0.0, 0.0); dim];
                    v[dim - 1] = Complex64::new(1.0, 0.0); // highest matrix index
                    master::DensityMatrix::pure(&v)
                }
            };
            let gen: Box<dyn master::Liouvillian> = match m.generator.as_str() {
                "lindblad" => Box::new(master::LindbladGenerator::new(h, ws)?),
                "white" => {
                    let w = ws.first().cloned().ok_or_else(|| {
                        CliError::Config("white generator needs one coupling in w".into())
                    })?;
                    Box::new(master::WhiteNoiseGenerator::new(
                        h,
                        w,
                        m.nu.ok_or_else(|| CliError::Config("white generator needs nu".into()))?,
                    )?)
                }
                "qfp" => {
                    let w = ws.first().cloned().ok_or_else(|| {
                        CliError::Config("qfp generator needs one coupling in w".into())
                    })?;
                    Box::new(master::QuantumFokkerPlanck::new(
                        h,
                        w,
                        m.nu.ok_or_else(|| CliError::Config("qfp needs nu".into()))?,
                        m.eta.ok_or_else(|| CliError::Config("qfp needs eta".into()))?,
                    )?)
                }
                "secular" => {
                    let w = ws.first().cloned().ok_or_else(|| {
                        CliError::Config("secular generator needs one coupling in w".into())
                    })?;
                    let bath = m
                        .bath
                        .as_ref()
                        .ok_or_else(|| CliError::Config("secular generator needs a bath".into()))?
                        .build()
                        .map_err(CliError::Config)?;
                    Box::new(master::secular_generator(&h, &w, &bath, 1e-12)?)
                }
                other => return Err(CliError::Config(format!("unknown generator {other}"))),
            };
            let mut cols = vec!["t".to_string()];
            cols.extend((0..dim).map(|i| format!("p{i}")));
            if dim >= 2 {
                cols.push("coh01_re".into());
                cols.push("coh01_im".into());
            }
            let mut table = Table {
                columns: cols,
                rows: Vec::new(),
                scalars: Vec::new(),
            };
            let mut max_drift = 0.0_f64;
            for t in sweep(0.0, *t_max, *steps) {
                let out = master::propagate(gen.as_ref(), &rho0, t, None)?;
                max_drift = max_drift.max(out.max_trace_drift);
                let mut row = vec![t];
                for i in 0..dim {
                    row.push(out.rho.0[(i, i)].re);
                }
                if dim >= 2 {
                    row.push(out.rho.0[(0, 1)].re);
                    row.push(out.rho.0[(0, 1)].im);
                }
                table.push(row);
            }
            table.scalar("max_trace_drift", max_drift);
            Ok(table)
        }
        Command::Response { model, n_grid } => {
            let m: models::ResponseModel = parse_json(model)?;
            let h = models::to_cmat(&m.h).map_err(CliError::Config)?;
            let a = models::to_cmat(&m.a).map_err(CliError::Config)?;
            let prep = m.preparation.build().map_err(CliError::Config)?;
            let mut sys = response::PreparedSystem::new(h, prep, a)?;
            if let Some(b) = &m.b {
                sys = sys.with_b(models::to_cmat(b).map_err(CliError::Config)?);
            }
            if let Some(s) = m.sigma {
                sys = sys.with_sigma(s);
            }
            if m.include_diagonal == Some(false) {
                sys = sys.without_diagonal();
            }
            let triple = response::spectral_functions(&sys, *n_grid)?;
            let mut table = Table::new(&["omega", "S_re", "S_im", "C_re", "K_im"]);
            for g in 0..triple.omega.len() {
                table.push(vec![
                    triple.omega[g],
                    triple.s[g].re,
                    triple.s[g].im,
                    triple.c[g].re,
                    triple.k[g].im,
                ]);
            }
            Ok(table)
        }
        Command::Transport { smatrix, from, to, cycle } => {
            if let Some(path) = cycle {
                let c: models::CycleModel = parse_json(path)?;
                let lead = c.lead.clone().unwrap_or_else(|| "A".into());
                let leads = vec![
                    ("A".to_string(), vec![0usize]),
                    ("B".to_string(), vec![1usize]),
                ];
                let xs: Vec<f64> = (0..=c.samples)
                    .map(|i| 2.0 * std::f64::consts::PI * i as f64 / c.samples as f64)
                    .collect();
                let q = match c.model.as_str() {
                    "phase-winding" => {
                        let s_of_x = |x: f64| {
                            let mut s = CMat::zeros(2, 2);
                            s[(0, 1)] = Complex64::from_polar(1.0, -x);
                            s[(1, 0)] = Complex64::from_polar(1.0, x);
                            s
                        };
                        transport::pumped_charge(s_of_x, &xs, &lead, &leads)?
                    }
                    "modulated" => {
                        let g0 = c.g0.unwrap_or(0.5);
                        let g1 = c.g1.unwrap_or(0.3);
                        let phi1 = c.phi1.unwrap_or(0.4);
                        let s_of_x = move |x: f64| {
                            let g = (g0 + g1 * x.sin()).clamp(1e-6, 1.0 - 1e-6);
                            let t = g.sqrt();
                            let r = (1.0 - g).sqrt();
                            let phase = Complex64::from_polar(1.0, phi1 * x.cos());
                            CMat::from_row_slice(
                                2,
                                2,
                                &[
                                    Complex64::new(r, 0.0),
                                    Complex64::new(t, 0.0) * phase.conj(),
                                    Complex64::new(t, 0.0) * phase,
                                    Complex64::new(-r, 0.0),
                                ],
                            )
                        };
                        transport::pumped_charge(s_of_x, &xs, &lead, &leads)?
                    }
                    other => return Err(CliError::Config(format!("unknown cycle model {other}"))),
                };
                let mut table = Table::new(&["pumped_charge"]);
                table.push(vec![q]);
                return Ok(table);
            }
            let path = smatrix
                .as_ref()
                .ok_or_else(|| CliError::Config("need --smatrix or --cycle".into()))?;
            let m: models::SMatrixModel = parse_json(path)?;
            let s = models::to_cmat(&m.s).map_err(CliError::Config)?;
            let leads: Vec<(String, Vec<usize>)> =
                m.leads.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
            let sm = transport::ScatteringMatrix::new(s, leads)?;
            let g = transport::landauer_conductance(&sm, from, to)?;
            let mut table = Table::new(&["conductance"]);
            table.push(vec![g]);
            Ok(table)
        }
        Command::Noneq { protocol, t0, heat_ft } => {
            if let Some(path) = heat_ft {
                let m: models::HeatFtModel = parse_json(path)?;
                let model = noneq::TwoBathModel {
                    energies: m.energies.clone(),
                    baths: vec![
                        ("H".into(), m.coupling.unwrap_or(0.5), m.t_hot),
                        ("C".into(), m.coupling.unwrap_or(0.5), m.t_cold),
                    ],
                };
                let stream = RandomStream::new(cli.seed, 0);
                let out = noneq::heat_conduction_ft(&model, m.t_end, m.n_traj, &stream)?;
                let mut table = Table::new(&["q", "count"]);
                table.scalar("ft_slope", out.ft_slope);
                table.scalar("ft_slope_expected", out.ft_slope_expected);
                table.scalar("conductance", out.conductance);
                table.scalar("nu", out.nu);
                table.scalar("conductance_fd", out.conductance_fd);
                for (q, count) in &out.histogram {
                    table.push(vec![*q, *count as f64]);
                }
                return Ok(table);
            }
            let path = protocol
                .as_ref()
                .ok_or_else(|| CliError::Config("need --protocol or --heat-ft".into()))?;
            let m: models::ProtocolModel = parse_json(path)?;
            if let Some(kind) = &m.interpolation {
                if kind != "linear" {
                    return Err(CliError::Config(format!(
                        "only linear interpolation is defined, got {kind}"
                    )));
                }
            }
            let h_a = models::to_cmat(&m.h_a).map_err(CliError::Config)?;
            let h_b = models::to_cmat(&m.h_b).map_err(CliError::Config)?;
            let steps = m.steps.unwrap_or(800);
            let build = |a: CMat, b: CMat| -> Result<noneq::Protocol, CliError> {
                let mut p = noneq::Protocol::linear(a, b, m.t_final, steps);
                match m.schedule.as_deref() {
                    None | Some("cosine") => {}
                    Some("uniform") => p.schedule = Box::new(|u| u),
                    Some(other) => {
                        return Err(CliError::Config(format!("unknown schedule {other}")))
                    }
                }
                Ok(p)
            };
            let forward = noneq::work_distribution(&build(h_a.clone(), h_b.clone())?, *t0)?;
            let est = noneq::jarzynski_from_kernel(&forward);
            let mut table = Table::new(&["work", "probability"]);
            table.scalar("delta_f_exact", forward.delta_f_exact);
            table.scalar("delta_f_jarzynski", est.delta_f);
            table.scalar("mean_work", est.mean_work);
            if m.reverse.unwrap_or(true) {
                let reverse = noneq::work_distribution(&build(h_b, h_a)?, *t0)?;
                let crooks = noneq::crooks_check(&forward, &reverse, forward.delta_f_exact)?;
                table.scalar("crooks_residual", crooks);
            }
            for &(w, p) in &forward.support {
                table.push(vec![w, p]);
            }
            Ok(table)
        }
    }
}
