use std::path::Path;
use std::time::Instant;

use grassdyn::delta::{delta_poly, expected_delta_leading};
use grassdyn::jordan::{
    bounds, example_operator, example_structure, recover_structure, JordanStructure, RecoveryOptions,
};
use grassdyn::matrix::Matrix;
use grassdyn::orbit::{
    circular_distance, duality_check, esp2sup_membership, kronecker_find_with, norm_ratio_invariant,
    orbit_grassmann_density, orbit_point_density, projection_rank_lock, DensityOptions, DensityReport,
};
use grassdyn::par::Exec;
use grassdyn::recipes::{run_recipe, RecipeOptions, Verdict, RECIPES};
use grassdyn::reduction::{reduce, verify_reduction, ChiView};
use grassdyn::sampling::{random_subspace, rng, unit_vector};
use grassdyn::subspace::Subspace;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::io::{parse_list, read_matrix, read_structure, read_subspace, read_subspaces, read_vectors};
use crate::report::{to_value, Report};
use crate::{Cli, CliError, Command, InvariantCheck, OperatorSource, ScanArgs, SubspaceSource};

fn verdict(check: &str, passed: bool, detail: String) -> Verdict {
    Verdict {
        check: check.to_string(),
        passed,
        detail,
    }
}

fn operator(src: &OperatorSource) -> Result<Matrix, CliError> {
    match (&src.op, &src.example) {
        (Some(path), _) => read_matrix(path),
        (None, Some(angles)) => Ok(example_operator(&parse_list("--example", angles)?, src.odd)?),
        (None, None) => Err(CliError::Input(
            "an operator is required: pass --op FILE or --example ANGLES".into(),
        )),
    }
}

fn subspace(src: &SubspaceSource, n: usize) -> Result<Subspace, CliError> {
    let s = match (&src.subspace, &src.axes) {
        (Some(path), _) => read_subspace(path)?,
        (None, Some(axes)) => {
            let idx = axes
                .split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(i) if (1..=n).contains(&i) => Ok(i - 1),
                    _ => Err(CliError::Input(format!(
                        "--axes: '{}' is not an axis in 1..={n}",
                        t.trim()
                    ))),
                })
                .collect::<Result<Vec<usize>, CliError>>()?;
            Subspace::coordinate(n, &idx)?
        }
        (None, None) => {
            return Err(CliError::Input(
                "a subspace is required: pass --subspace FILE or --axes I,J".into(),
            ))
        }
    };
    if s.ambient_dim() != n {
        return Err(CliError::Input(format!(
            "shape mismatch: expected a subspace of R^{n}, got vectors of length {}",
            s.ambient_dim()
        )));
    }
    Ok(s)
}

fn structure(src: &OperatorSource, file: Option<&Path>, tol: f64) -> Result<JordanStructure, CliError> {
    if let Some(path) = file {
        return read_structure(path);
    }
    if let (None, Some(angles)) = (&src.op, &src.example) {
        return Ok(example_structure(&parse_list("--example", angles)?, src.odd)?);
    }
    Ok(recover_structure(&operator(src)?, &RecoveryOptions::with_tol(tol))?)
}

fn write_traces(path: &Path, report: &DensityReport) -> Result<(), CliError> {
    let err = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    w.write_record(["target", "k", "distance"]).map_err(err)?;
    for (i, t) in report.per_target.iter().enumerate() {
        for &(k, d) in &t.trace {
            w.write_record([i.to_string(), k.to_string(), format!("{d:e}")])
                .map_err(err)?;
        }
    }
    w.flush()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn density_verdict(scan: &ScanArgs, mut report: DensityReport) -> Result<(Vec<Verdict>, Value), CliError> {
    if let Some(path) = &scan.plot_data {
        write_traces(path, &report)?;
        report.per_target.iter_mut().for_each(|t| t.trace.clear());
    }
    let need = scan.min_hits.unwrap_or(report.targets);
    let v = verdict(
        "hits",
        report.hits >= need,
        format!(
            "{} of {} targets within {} by K = {} (need {need})",
            report.hits, report.targets, report.epsilon, report.k_max
        ),
    );
    Ok((vec![v], to_value(&report)?))
}

fn scan_options(scan: &ScanArgs, eps: f64, exec: Exec) -> DensityOptions {
    let mut opts = DensityOptions::new(scan.k, eps);
    opts.exec = exec;
    opts.traces = scan.plot_data.is_some();
    opts
}

/// Runs the parsed command, writes its report and returns whether it passed.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let start = Instant::now();
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let mut seed = None;

    let (name, verdicts, payload) = match &cli.command {
        Command::Jordan(a) => {
            let t = operator(&a.operator)?;
            let s = recover_structure(&t, &RecoveryOptions::with_tol(a.tol))?;
            (
                "jordan",
                vec![],
                json!({ "structure": to_value(&s)?, "bounds": to_value(&bounds(&s))? }),
            )
        }
        Command::Bounds(a) => {
            let s = structure(&a.operator, a.structure.as_deref(), a.tol)?;
            ("bounds", vec![], to_value(&bounds(&s))?)
        }
        Command::Reduce(a) => {
            let mut basis = read_vectors(&a.basis)?;
            let s = structure(&a.operator, a.structure.as_deref(), 1e-8)?;
            let coordinates = match s.transform() {
                // express the basis in the coordinates where the operator is in block form
                Some(p) => {
                    let inv = p
                        .as_dmatrix()
                        .clone()
                        .try_inverse()
                        .ok_or_else(|| CliError::Input("recovered transform is singular".into()))?;
                    for v in &mut basis {
                        if v.len() != inv.ncols() {
                            return Err(CliError::Input(format!(
                                "shape mismatch: expected basis vectors of length {}, got {}",
                                inv.ncols(),
                                v.len()
                            )));
                        }
                        *v = (&inv * nalgebra::DVector::from_column_slice(v))
                            .iter()
                            .copied()
                            .collect();
                    }
                    "block"
                }
                None => "input",
            };
            let view = ChiView::new(s);
            let rb = reduce(&view, &basis, a.tol)?;
            let check = verify_reduction(&rb, &view, &basis, a.tol);
            let v = verdict("reduction-properties", check.passed, format!("kappa = {:?}", rb.kappa));
            let payload = json!({
                "vectors": rb.vectors,
                "kappa": rb.kappa,
                "lambda_dims": rb.lambda_dims,
                "near_threshold": rb.near_threshold,
                "coordinates": coordinates,
                "report": to_value(&check)?,
            });
            ("reduce", vec![v], payload)
        }
        Command::Delta(a) => {
            let p = delta_poly(a.n);
            let mut verdicts = vec![];
            if a.n >= 1 {
                let expected = expected_delta_leading(a.n);
                let ok = p.degree() == Some(a.n) && p.leading_coefficient() == expected;
                verdicts.push(verdict(
                    "leading-coefficient",
                    ok,
                    format!(
                        "degree {:?}, leading {} (expected {expected})",
                        p.degree(),
                        p.leading_coefficient()
                    ),
                ));
            }
            let value = a
                .eval
                .map(|i| p.eval(&BigRational::from_integer(BigInt::from(i))).to_string());
            let payload = json!({
                "n": a.n,
                "coefficients": p.coefficient_strings(),
                "degree": p.degree(),
                "eval": a.eval,
                "value": value,
            });
            ("delta", verdicts, payload)
        }
        Command::Density(a) => {
            let t = operator(&a.operator)?;
            let m = subspace(&a.subspace, t.nrows())?;
            let targets = match &a.scan.target_file {
                Some(path) => read_vectors(path)?,
                None => {
                    seed = Some(a.scan.seed);
                    let mut r = rng(a.scan.seed);
                    (0..a.scan.targets.unwrap_or(100))
                        .map(|_| unit_vector(&mut r, t.nrows()))
                        .collect()
                }
            };
            let report = orbit_point_density(&t, &m, &targets, &scan_options(&a.scan, a.eps, exec))?;
            let (v, p) = density_verdict(&a.scan, report)?;
            ("density", v, p)
        }
        Command::GrassDensity(a) => {
            let t = operator(&a.operator)?;
            let m = subspace(&a.subspace, t.nrows())?;
            let targets = match &a.scan.target_file {
                Some(path) => read_subspaces(path)?,
                None => {
                    seed = Some(a.scan.seed);
                    let mut r = rng(a.scan.seed);
                    (0..a.scan.targets.unwrap_or(100))
                        .map(|_| random_subspace(&mut r, t.nrows(), m.dim()))
                        .collect::<grassdyn::Result<Vec<_>>>()?
                }
            };
            let report = orbit_grassmann_density(&t, &m, &targets, &scan_options(&a.scan, a.eps, exec))?;
            let (v, p) = density_verdict(&a.scan, report)?;
            ("grass-density", v, p)
        }
        Command::Kronecker(a) => {
            let angles = parse_list("--angles", &a.angles)?;
            let phases = parse_list("--phases", &a.phases)?;
            let found = kronecker_find_with(&angles, &phases, a.eps, a.k, exec)?;
            let distances: Option<Vec<f64>> = found.map(|k| {
                angles
                    .iter()
                    .zip(&phases)
                    .map(|(th, ph)| circular_distance(k as f64 * th, *ph))
                    .collect()
            });
            let detail = match found {
                Some(k) => format!("k = {k}"),
                None => format!("no k <= {} within {}", a.k, a.eps),
            };
            let payload = json!({ "k": found, "circular_distances": distances, "K": a.k, "epsilon": a.eps });
            (
                "kronecker",
                vec![verdict("iterate-found", found.is_some(), detail)],
                payload,
            )
        }
        Command::Duality(a) => {
            let t = operator(&a.operator)?;
            let m = subspace(&a.subspace, t.nrows())?;
            let rep = duality_check(&t, &m, a.imax)?;
            let v = verdict(
                "complements-agree",
                rep.worst_residual <= a.max_residual,
                format!("worst residual {:e} at i = {}", rep.worst_residual, rep.worst_iterate),
            );
            ("duality", vec![v], to_value(&rep)?)
        }
        Command::Invariants(a) => match &a.check {
            InvariantCheck::Lock {
                operator: o,
                subspace: s,
                k,
            } => {
                let t = operator(o)?;
                let m = subspace(s, t.nrows())?;
                let rep = projection_rank_lock(&t, &m, *k)?;
                let v = verdict(
                    "projection-rank-lock",
                    rep.holds,
                    format!(
                        "worst sigma_2 {:e}, worst angle gap {:e}",
                        rep.worst_second_singular_value, rep.worst_angle_gap
                    ),
                );
                ("invariants lock", vec![v], to_value(&rep)?)
            }
            InvariantCheck::NormRatio { operator: o, vector, k } => {
                let t = operator(o)?;
                let x = parse_list("--vector", vector)?;
                let rep = norm_ratio_invariant(&t, &x, *k)?;
                let v = verdict(
                    "norm-ratio",
                    rep.holds,
                    format!("worst relative error {:e}", rep.worst_relative_error),
                );
                ("invariants norm-ratio", vec![v], to_value(&rep)?)
            }
            InvariantCheck::Membership { subspace: s } => {
                let m = subspace(s, 4)?;
                ("invariants membership", vec![], to_value(&esp2sup_membership(&m)?)?)
            }
        },
        Command::Recipe(a) => {
            if a.list {
                for (name, pinned) in RECIPES {
                    match pinned {
                        Some(s) => println!("{name}\tseed {s}"),
                        None => println!("{name}"),
                    }
                }
                return Ok(true);
            }
            let name = a.name.as_deref().unwrap_or_default();
            let rep = run_recipe(name, &RecipeOptions { seed: a.seed, exec })?;
            seed = rep.seed;
            let payload = json!({
                "recipe": rep.recipe,
                "exploratory": rep.exploratory,
                "elapsed": rep.elapsed,
                "results": rep.payload,
            });
            ("recipe", rep.verdicts, payload)
        }
    };

    let report = Report {
        command: name.to_string(),
        config: to_value(cli)?,
        seed,
        verdicts,
        payload,
        elapsed: start.elapsed().as_secs_f64(),
    };
    report.write(cli.out.as_deref())?;
    Ok(report.passed())
}
