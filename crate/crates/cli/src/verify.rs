//! Seeded fuzz run over the sampling families.

use std::io::Write;

use qsmooth_core::info::{IdentityReport, InequalityReport};
use qsmooth_core::sampling::{check_case, min_margins, Case, CaseOutcome, Family};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{Format, VerifyArgs};
use crate::{output, CliError, EXIT_OK, EXIT_VIOLATION};

#[derive(Serialize)]
struct Line<'a, R: Serialize> {
    family: Family,
    case: u64,
    seed: u64,
    kind: &'static str,
    #[serde(flatten)]
    report: &'a R,
}

const CSV_COLUMNS: [&str; 10] = [
    "family", "case", "seed", "kind", "name", "lhs", "rhs", "margin", "ok", "context",
];

pub fn run(args: &VerifyArgs) -> Result<u8, CliError> {
    let families: Vec<Family> = if args.family.is_empty() {
        Family::ALL.to_vec()
    } else {
        let mut f: Vec<Family> = args.family.iter().map(|&f| f.into()).collect();
        f.sort();
        f.dedup();
        f
    };
    let jobs: Vec<(Family, u64)> = families
        .iter()
        .flat_map(|&f| (0..args.cases).map(move |i| (f, i)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(family, index)| {
            let case = Case::generate(family, args.seed, index)?;
            let outcome = check_case(&case)?;
            Ok((case, outcome))
        })
        .collect::<Result<Vec<(Case, CaseOutcome)>, qsmooth_core::Error>>()?;

    let mut out = output::open(args.output.out.as_deref())?;
    write_reports(&mut *out, args.output.format.unwrap_or(Format::Json), &results)?;

    let mut status = EXIT_OK;
    for (case, outcome) in results.iter().filter(|(_, o)| !o.all_hold()) {
        status = EXIT_VIOLATION;
        eprintln!("violation in {} case {} (seed {}):", case.family, case.index, case.seed);
        for r in outcome.inequalities.iter().filter(|r| !r.satisfied) {
            eprintln!("  {} lhs {:e} rhs {:e} margin {:e}", r.name, r.lhs, r.rhs, r.margin);
        }
        for r in outcome.identities.iter().filter(|r| !r.holds) {
            eprintln!("  {} lhs {:e} rhs {:e} defect {:e}", r.name, r.lhs, r.rhs, r.defect);
        }
        eprintln!("  configuration: {}", serde_json::to_string(&case.record())?);
    }
    for family in families {
        let reports: Vec<&InequalityReport> = results
            .iter()
            .filter(|(c, _)| c.family == family)
            .flat_map(|(_, o)| &o.inequalities)
            .collect();
        let summary: Vec<String> = min_margins(reports.iter().copied())
            .into_iter()
            .map(|(name, m)| format!("{name}={m:.3e}"))
            .collect();
        eprintln!("{family}: {} cases, minimum margins {}", args.cases, summary.join(" "));
    }
    Ok(status)
}

fn write_reports(out: &mut dyn Write, format: Format, results: &[(Case, CaseOutcome)]) -> Result<(), CliError> {
    let io = |e| CliError::Io("write failed".into(), e);
    match format {
        Format::Json => {
            for (case, outcome) in results {
                for r in &outcome.identities {
                    json_line(out, case, "identity", r)?;
                }
                for r in &outcome.inequalities {
                    json_line(out, case, "inequality", r)?;
                }
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(CSV_COLUMNS)?;
            for (case, outcome) in results {
                for r in &outcome.identities {
                    w.write_record(identity_record(case, r))?;
                }
                for r in &outcome.inequalities {
                    w.write_record(inequality_record(case, r))?;
                }
            }
            w.flush().map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

fn json_line<R: Serialize>(out: &mut dyn Write, case: &Case, kind: &'static str, report: &R) -> Result<(), CliError> {
    let line = Line {
        family: case.family,
        case: case.index,
        seed: case.seed,
        kind,
        report,
    };
    serde_json::to_writer(&mut *out, &line)?;
    out.write_all(b"\n").map_err(|e| CliError::Io("write failed".into(), e))
}

fn identity_record(case: &Case, r: &IdentityReport) -> Vec<String> {
    vec![
        case.family.to_string(),
        case.index.to_string(),
        case.seed.to_string(),
        "identity".into(),
        r.name.clone(),
        output::fmt_f64(r.lhs),
        output::fmt_f64(r.rhs),
        output::fmt_f64(r.defect),
        r.holds.to_string(),
        r.context.clone(),
    ]
}

fn inequality_record(case: &Case, r: &InequalityReport) -> Vec<String> {
    vec![
        case.family.to_string(),
        case.index.to_string(),
        case.seed.to_string(),
        "inequality".into(),
        r.name.clone(),
        output::fmt_f64(r.lhs),
        output::fmt_f64(r.rhs),
        output::fmt_f64(r.margin),
        r.satisfied.to_string(),
        r.context.clone(),
    ]
}
