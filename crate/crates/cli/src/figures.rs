//! Figure data: entropy curves and weak values of the qubit model, and the
//! hybrid model against the mixing weight.

use std::f64::consts::LN_2;

use qsmooth_core::experiments::{
    entropy_row, hybrid_report, log_grid, unit_grid, weak_value_row, HybridConfig, QubitGaussianConfig,
};
use qsmooth_core::quad::QuadratureSpec;
use qsmooth_core::BlochVector;
use rayon::prelude::*;

use crate::args::{Format, HybridArgs, QubitArgs};
use crate::{output, CliError, EXIT_OK, EXIT_VIOLATION};

pub const FIG2_COLUMNS: [&str; 5] = ["a", "s_nonselective", "s_retro_avg", "s_selective_avg", "s_initial"];
pub const FIG3_COLUMNS: [&str; 8] = [
    "a",
    "v_omega",
    "v_plus",
    "v_minus",
    "s_rho_plus",
    "s_rho_minus",
    "s_nonselective",
    "s_selective_avg",
];
pub const FIG4_COLUMNS: [&str; 9] = [
    "q",
    "s_a_nonsel",
    "s_a_retro",
    "s_a_sel",
    "i_nonsel",
    "i_retro",
    "i_sel",
    "holevo_chi",
    "h_my",
];

fn unit(bits: bool) -> f64 {
    if bits {
        1.0 / LN_2
    } else {
        1.0
    }
}

fn qubit_configs(args: &QubitArgs) -> Result<Vec<QubitGaussianConfig>, CliError> {
    if !(args.a_max >= args.a_min) {
        return Err(CliError::Usage(format!(
            "--a-max {} is below --a-min {}",
            args.a_max, args.a_min
        )));
    }
    let initial = BlochVector::new(args.r, args.theta_i, args.phi_i).map_err(CliError::invalid)?;
    let grid = log_grid(args.a_min, args.a_max, args.grid).map_err(CliError::invalid)?;
    grid.into_iter()
        .map(|a| QubitGaussianConfig::new(initial, a, args.theta, args.phi).map_err(CliError::invalid))
        .collect()
}

pub fn fig2(args: &QubitArgs) -> Result<u8, CliError> {
    let configs = qubit_configs(args)?;
    let spec = QuadratureSpec::default();
    let k = unit(args.bits);
    let rows = configs
        .par_iter()
        .map(|cfg| {
            entropy_row(cfg, &spec).map(|r| {
                vec![
                    r.a,
                    k * r.s_nonselective,
                    k * r.s_retro_avg,
                    k * r.s_selective_avg,
                    k * r.s_initial,
                ]
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit(&args.output.out, args.output.format, &FIG2_COLUMNS, &rows)?;
    Ok(EXIT_OK)
}

pub fn fig3(args: &QubitArgs) -> Result<u8, CliError> {
    let configs = qubit_configs(args)?;
    let spec = QuadratureSpec::default();
    let k = unit(args.bits);
    let rows = configs
        .par_iter()
        .map(|cfg| {
            weak_value_row(cfg, &spec).map(|r| {
                vec![
                    r.a,
                    r.v_omega,
                    r.v_plus,
                    r.v_minus,
                    k * r.s_rho_plus,
                    k * r.s_rho_minus,
                    k * r.s_nonselective,
                    k * r.s_selective_avg,
                ]
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    emit(&args.output.out, args.output.format, &FIG3_COLUMNS, &rows)?;
    Ok(EXIT_OK)
}

pub fn fig4(args: &HybridArgs) -> Result<u8, CliError> {
    let first = BlochVector::new(0.0, 0.0, 0.0).map_err(CliError::invalid)?;
    let second = BlochVector::new(args.r, args.theta_i, args.phi_i).map_err(CliError::invalid)?;
    let qs = unit_grid(args.q_grid).map_err(CliError::invalid)?;
    let k = unit(args.bits);
    let outcomes = qs
        .par_iter()
        .map(|&q| {
            let cfg = HybridConfig::two_state(q, first, second)?;
            hybrid_report(&cfg).map(|o| (q, o))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut status = EXIT_OK;
    let mut rows = Vec::with_capacity(outcomes.len());
    for (q, o) in &outcomes {
        if !o.report.all_hold() {
            eprintln!("violation at q = {q}:");
            for r in o.report.reports.iter().filter(|r| !r.satisfied) {
                eprintln!("  {} margin {:e}", r.name, r.margin);
            }
            for r in o.report.identities.iter().filter(|r| !r.holds) {
                eprintln!("  {} defect {:e}", r.name, r.defect);
            }
            status = EXIT_VIOLATION;
        }
        let r = o.row;
        rows.push(vec![
            *q,
            k * r.s_a_nonsel,
            k * r.s_a_retro,
            k * r.s_a_sel,
            k * r.i_nonsel,
            k * r.i_retro,
            k * r.i_sel,
            k * r.holevo_chi,
            k * r.h_my,
        ]);
    }
    emit(&args.output.out, args.output.format, &FIG4_COLUMNS, &rows)?;
    Ok(status)
}

fn emit(
    path: &Option<std::path::PathBuf>,
    format: Option<Format>,
    columns: &[&str],
    rows: &[Vec<f64>],
) -> Result<(), CliError> {
    let mut out = output::open(path.as_deref())?;
    output::write_table(&mut *out, format.unwrap_or(Format::Csv), columns, rows)
}
