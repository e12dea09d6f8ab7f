//! Command-line front end: parse one instance file, dispatch to the engine,
//! re-check the operation's postconditions, and emit a deterministic JSON
//! run report.
//!
//! Exit codes: 0 success, 1 domain error, 2 malformed input or usage,
//! 3 postcondition self-check failure.

use clap::{Parser, Subcommand};
use desing::belyi::{belyi_run, critical_values};
use desing::cone::Cone;
use desing::exactmath::format_rational;
use desing::fan::{
    check_compatible_family, is_projective_subdivision, is_refinement, resolve,
    toric_from_monomials, Fan, ProjectivityOutcome, StepKind,
};
use desing::fibration::{fiber_tree_check, separate_all};
use desing::json::{
    family_from_docs, BelyiDoc, ConeDoc, FanDoc, InstanceFile, JsonError, SeparationDoc,
};
use desing::verify;
use num_traits::Signed;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "desing", version, about = "Exact toric, branch-descent and separation engines")]
struct Cli {
    /// Include the full step trace in the report.
    #[arg(long, global = true)]
    trace: bool,
    /// Also run the expensive independent oracles as postcondition checks.
    #[arg(long, global = true)]
    check: bool,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dual cone of a cone instance.
    Dual { input: PathBuf },
    /// Hilbert basis of a pointed cone instance.
    Hilbert { input: PathBuf },
    /// Smoothness, simpliciality and multiplicity of a cone instance.
    Smooth { input: PathBuf },
    /// Resolve a fan instance to a smooth refinement.
    ResolveFan { input: PathBuf },
    /// Decide projectivity of a fan instance against its support cone.
    CheckProjective { input: PathBuf },
    /// Build the affine toric model of a toric-model instance.
    Toric { input: PathBuf },
    /// Run the branch-degree descent on a belyi instance.
    BelyiRun { input: PathBuf },
    /// Run the section separation loop on a separation instance.
    Separate { input: PathBuf },
    /// Check a compatible family over a strata instance.
    CheckFamily { input: PathBuf },
    /// Run the bundled verification corpus.
    VerifyCorpus,
}

#[derive(Serialize)]
struct CheckVerdict {
    name: String,
    ok: bool,
}

#[derive(Serialize)]
struct RunReport {
    command: String,
    artifact_version: &'static str,
    tie_break_seed: u64,
    input_digest: String,
    outputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Value>,
    checks: Vec<CheckVerdict>,
    wall_time_ms: u128,
}

enum CliError {
    Domain(String),
    Malformed(String),
}

impl From<JsonError> for CliError {
    fn from(e: JsonError) -> Self {
        match e {
            JsonError::Malformed(m) => CliError::Malformed(m),
            JsonError::Domain(m) => CliError::Domain(m),
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

struct Outcome {
    outputs: Value,
    trace: Option<Value>,
    checks: Vec<CheckVerdict>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let (command_name, input_path) = match &cli.command {
        Command::Dual { input } => ("dual", Some(input.clone())),
        Command::Hilbert { input } => ("hilbert", Some(input.clone())),
        Command::Smooth { input } => ("smooth", Some(input.clone())),
        Command::ResolveFan { input } => ("resolve-fan", Some(input.clone())),
        Command::CheckProjective { input } => ("check-projective", Some(input.clone())),
        Command::Toric { input } => ("toric", Some(input.clone())),
        Command::BelyiRun { input } => ("belyi-run", Some(input.clone())),
        Command::Separate { input } => ("separate", Some(input.clone())),
        Command::CheckFamily { input } => ("check-family", Some(input.clone())),
        Command::VerifyCorpus => ("verify-corpus", None),
    };

    let (digest, instance) = match &input_path {
        None => (String::from("-"), None),
        Some(path) => {
            let bytes = match std::fs::read(path) {
                Ok(b) => b,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            let digest = hex_digest(&bytes);
            let text = match String::from_utf8(bytes) {
                Ok(t) => t,
                Err(_) => {
                    eprintln!("error: {} is not UTF-8", path.display());
                    return ExitCode::from(2);
                }
            };
            match InstanceFile::parse(&text) {
                Ok(i) => (digest, Some(i)),
                Err(JsonError::Malformed(m)) => {
                    eprintln!("error: malformed instance: {m}");
                    return ExitCode::from(2);
                }
                Err(JsonError::Domain(m)) => {
                    eprintln!("error: {m}");
                    return ExitCode::from(1);
                }
            }
        }
    };

    let result = dispatch(&cli, instance);
    match result {
        Ok(outcome) => {
            let all_ok = outcome.checks.iter().all(|c| c.ok);
            let report = RunReport {
                command: command_name.to_string(),
                artifact_version: env!("CARGO_PKG_VERSION"),
                tie_break_seed: verify::TIE_BREAK_SEED,
                input_digest: digest,
                outputs: outcome.outputs,
                trace: outcome.trace,
                checks: outcome.checks,
                wall_time_ms: started.elapsed().as_millis(),
            };
            let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
            match &cli.out {
                None => println!("{rendered}"),
                Some(path) => {
                    if let Err(e) = std::fs::write(path, rendered + "\n") {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
            }
            if all_ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: postcondition self-check failed");
                ExitCode::from(3)
            }
        }
        Err(CliError::Domain(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(CliError::Malformed(m)) => {
            eprintln!("error: malformed input: {m}");
            ExitCode::from(2)
        }
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

fn expect_kind(instance: Option<InstanceFile>, kind: &str) -> Result<InstanceFile, CliError> {
    let instance = instance.ok_or_else(|| CliError::Malformed("an input file is required".into()))?;
    if instance.kind() != kind {
        return Err(CliError::Malformed(format!(
            "command needs a `{kind}` instance, got `{}`",
            instance.kind()
        )));
    }
    Ok(instance)
}

fn dispatch(cli: &Cli, instance: Option<InstanceFile>) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Dual { .. } => {
            let InstanceFile::Cone(doc) = expect_kind(instance, "cone")? else {
                unreachable!()
            };
            let cone = doc.to_cone()?;
            run_dual(&cone)
        }
        Command::Hilbert { .. } => {
            let InstanceFile::Cone(doc) = expect_kind(instance, "cone")? else {
                unreachable!()
            };
            let cone = doc.to_cone()?;
            run_hilbert(&cone, cli.check)
        }
        Command::Smooth { .. } => {
            let InstanceFile::Cone(doc) = expect_kind(instance, "cone")? else {
                unreachable!()
            };
            let cone = doc.to_cone()?;
            run_smooth(&cone)
        }
        Command::ResolveFan { .. } => {
            let InstanceFile::Fan(doc) = expect_kind(instance, "fan")? else {
                unreachable!()
            };
            let fan = doc.to_fan()?;
            run_resolve(&fan, cli.trace)
        }
        Command::CheckProjective { .. } => {
            let InstanceFile::Fan(doc) = expect_kind(instance, "fan")? else {
                unreachable!()
            };
            let fan = doc.to_fan()?;
            run_check_projective(&fan)
        }
        Command::Toric { .. } => {
            let InstanceFile::ToricModel(doc) = expect_kind(instance, "toric-model")? else {
                unreachable!()
            };
            run_toric(&doc)
        }
        Command::BelyiRun { .. } => {
            let InstanceFile::Belyi(doc) = expect_kind(instance, "belyi")? else {
                unreachable!()
            };
            run_belyi(&doc, cli.trace)
        }
        Command::Separate { .. } => {
            let InstanceFile::Separation(doc) = expect_kind(instance, "separation")? else {
                unreachable!()
            };
            run_separate(&doc, cli.trace)
        }
        Command::CheckFamily { .. } => {
            let InstanceFile::Strata { system, family } = expect_kind(instance, "strata")? else {
                unreachable!()
            };
            run_check_family(&system, &family)
        }
        Command::VerifyCorpus => run_verify_corpus(),
    }
}

fn run_dual(cone: &Cone) -> Result<Outcome, CliError> {
    let dual = cone.dual_cone();
    let pairings_ok = dual
        .rays()
        .iter()
        .all(|n| cone.rays().iter().all(|m| !n.dot(m).is_negative()));
    let mut checks = vec![CheckVerdict {
        name: "dual pairings are nonnegative".into(),
        ok: pairings_ok,
    }];
    if cone.is_pointed() && cone.dim() == cone.rank() {
        checks.push(CheckVerdict {
            name: "dual involution returns the input".into(),
            ok: dual.dual_cone() == *cone,
        });
    }
    Ok(Outcome {
        outputs: json!({
            "dual": ConeDoc::from_cone(&dual),
            "pointed": dual.is_pointed(),
        }),
        trace: None,
        checks,
    })
}

fn run_hilbert(cone: &Cone, heavy: bool) -> Result<Outcome, CliError> {
    let basis = cone.hilbert_basis().map_err(domain)?;
    let elements: Vec<Vec<String>> = basis
        .elements
        .iter()
        .map(|v| v.entries().iter().map(|e| e.to_string()).collect())
        .collect();
    let mut checks = vec![
        CheckVerdict {
            name: "every element lies in the cone".into(),
            ok: basis.elements.iter().all(|v| cone.contains(v)),
        },
        CheckVerdict {
            name: "no element is a sum of two others".into(),
            ok: basis.elements.iter().all(|v| {
                basis.elements.iter().all(|u| {
                    let diff = v.sub(u);
                    diff.is_zero() || !cone.contains(&diff) || diff == *v
                })
            }),
        },
    ];
    if heavy {
        checks.push(hilbert_box_check(cone, &basis.elements));
    }
    Ok(Outcome {
        outputs: json!({ "elements": elements }),
        trace: None,
        checks,
    })
}

fn hilbert_box_check(cone: &Cone, elements: &[desing::LatticeVector]) -> CheckVerdict {
    let rays: Option<Vec<Vec<i64>>> = cone
        .rays()
        .iter()
        .map(|r| {
            r.entries()
                .iter()
                .map(|e| i64::try_from(e).ok())
                .collect::<Option<Vec<i64>>>()
        })
        .collect();
    let Some(rays) = rays else {
        return CheckVerdict {
            name: "box-enumeration oracle (skipped: entries too large)".into(),
            ok: true,
        };
    };
    let span: i64 = rays.iter().flatten().map(|v| v.abs()).sum();
    if span > 200 {
        return CheckVerdict {
            name: "box-enumeration oracle (skipped: box too large)".into(),
            ok: true,
        };
    }
    let expected = verify::oracles::hilbert_basis_box(&rays);
    let got: std::collections::BTreeSet<Vec<i64>> = elements
        .iter()
        .map(|v| {
            v.entries()
                .iter()
                .map(|e| i64::try_from(e).expect("checked above"))
                .collect()
        })
        .collect();
    CheckVerdict {
        name: "box-enumeration oracle".into(),
        ok: got == expected,
    }
}

fn run_smooth(cone: &Cone) -> Result<Outcome, CliError> {
    let simplicial = cone.is_simplicial();
    let smooth = cone.is_smooth();
    let multiplicity = cone.multiplicity().ok().map(|m| m.to_string());
    let consistent = match &multiplicity {
        Some(m) => smooth == (simplicial && m == "1"),
        None => !smooth && !simplicial,
    };
    Ok(Outcome {
        outputs: json!({
            "simplicial": simplicial,
            "smooth": smooth,
            "multiplicity": multiplicity,
        }),
        trace: None,
        checks: vec![CheckVerdict {
            name: "smooth iff simplicial with multiplicity one".into(),
            ok: consistent,
        }],
    })
}

fn run_resolve(fan: &Fan, with_trace: bool) -> Result<Outcome, CliError> {
    fan.validate()
        .map_err(|v| CliError::Domain(format!("input fan is invalid: {v}")))?;
    let resolution = resolve(fan).map_err(domain)?;
    let trace: Vec<Value> = resolution
        .trace
        .iter()
        .map(|s| {
            json!({
                "step": s.step,
                "kind": match s.kind {
                    StepKind::Barycentric => "barycentric",
                    StepKind::Stellar => "stellar",
                },
                "ray": s
                    .ray
                    .as_ref()
                    .map(|r| r.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>())
                    .unwrap_or_default(),
                "max_multiplicity": s.max_multiplicity.to_string(),
            })
        })
        .collect();
    let checks = vec![
        CheckVerdict {
            name: "every output cone is smooth".into(),
            ok: resolution.fan.cones().iter().all(|c| c.is_smooth()),
        },
        CheckVerdict {
            name: "output is a valid fan".into(),
            ok: resolution.fan.validate().is_ok(),
        },
        CheckVerdict {
            name: "output refines the input".into(),
            ok: is_refinement(&resolution.fan, fan).map_err(domain)?,
        },
    ];
    Ok(Outcome {
        outputs: json!({ "fan": FanDoc::from_fan(&resolution.fan) }),
        trace: with_trace.then(|| Value::Array(trace)),
        checks,
    })
}

fn run_check_projective(fan: &Fan) -> Result<Outcome, CliError> {
    let support = fan
        .support()
        .ok_or_else(|| CliError::Domain("fan instance needs a support cone".into()))?
        .clone();
    let outcome = is_projective_subdivision(fan, &support).map_err(domain)?;
    match outcome {
        ProjectivityOutcome::Certified(cert) => {
            let revalidated = cert.validate(fan).is_ok();
            let functionals: Vec<Vec<String>> = cert
                .functionals
                .iter()
                .map(|f| f.iter().map(format_rational).collect())
                .collect();
            Ok(Outcome {
                outputs: json!({
                    "certified": true,
                    "functionals": functionals,
                    "min_wall_slack": format_rational(&cert.min_wall_slack),
                }),
                trace: None,
                checks: vec![CheckVerdict {
                    name: "certificate revalidates independently".into(),
                    ok: revalidated,
                }],
            })
        }
        ProjectivityOutcome::None { optimum, dual } => {
            let bound_ok = dual.verify(Some(&-optimum.clone()));
            Ok(Outcome {
                outputs: json!({
                    "certified": false,
                    "optimum": format_rational(&optimum),
                }),
                trace: None,
                checks: vec![CheckVerdict {
                    name: "negative verdict carries a dual bound certificate".into(),
                    ok: bound_ok,
                }],
            })
        }
    }
}

fn run_toric(doc: &desing::json::ToricDoc) -> Result<Outcome, CliError> {
    let monomials = doc.monomial_vectors()?;
    let model =
        toric_from_monomials(doc.rank, monomials, doc.extra_affine_rank).map_err(domain)?;
    let m_plus: Vec<Vec<String>> = model
        .m_plus
        .elements
        .iter()
        .map(|v| v.entries().iter().map(|e| e.to_string()).collect())
        .collect();
    let duality_ok = model.n_plus.rays().iter().all(|n| {
        model
            .m_plus
            .elements
            .iter()
            .all(|m| !n.dot(m).is_negative())
    });
    let mono_cone = Cone::new(doc.rank, model.monomials.clone()).map_err(domain)?;
    let decompose_ok = model.monomials.iter().all(|m| {
        let mut rest = m.clone();
        let mut guard = 0usize;
        while !rest.is_zero() {
            let Some(h) = model
                .m_plus
                .elements
                .iter()
                .find(|h| mono_cone.contains(&rest.sub(h)))
            else {
                return false;
            };
            rest = rest.sub(h);
            guard += 1;
            if guard > 100_000 {
                return false;
            }
        }
        true
    });
    Ok(Outcome {
        outputs: json!({
            "m_lattice_rank": model.m_lattice_rank,
            "m_plus": m_plus,
            "n_plus": ConeDoc::from_cone(&model.n_plus),
            "extra_affine_rank": model.extra_affine_rank,
            "smooth": model.smooth,
        }),
        trace: None,
        checks: vec![
            CheckVerdict {
                name: "monoid duality pairings are nonnegative".into(),
                ok: duality_ok,
            },
            CheckVerdict {
                name: "monomials decompose over the Hilbert basis".into(),
                ok: decompose_ok,
            },
        ],
    })
}

fn run_belyi(doc: &BelyiDoc, with_trace: bool) -> Result<Outcome, CliError> {
    let state = doc.to_state()?;
    let (final_state, trace) = belyi_run(&state).map_err(domain)?;
    let steps: Vec<Value> = trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "chosen": s.chosen.coeffs().iter().map(format_rational).collect::<Vec<_>>(),
                "measure_before": { "d": s.before.d, "m": s.before.m },
                "measure_after": { "d": s.after.d, "m": s.after.m },
            })
        })
        .collect();
    let mut descent_ok = true;
    let mut critical_ok = true;
    for s in &trace.steps {
        if s.after >= s.before {
            descent_ok = false;
        }
        let d = s.chosen.degree().unwrap_or(0);
        match critical_values(&s.chosen) {
            Ok(c) if c.degree().unwrap_or(0) + 1 <= d => {}
            _ => critical_ok = false,
        }
    }
    Ok(Outcome {
        outputs: json!({ "final": BelyiDoc::from_state(&final_state) }),
        trace: with_trace.then(|| Value::Array(steps)),
        checks: vec![
            CheckVerdict {
                name: "all components end as rational sections".into(),
                ok: final_state.factors().is_empty(),
            },
            CheckVerdict {
                name: "measure strictly lex-decreases per step".into(),
                ok: descent_ok,
            },
            CheckVerdict {
                name: "critical degree stays below the map degree".into(),
                ok: critical_ok,
            },
        ],
    })
}

fn run_separate(doc: &SeparationDoc, with_trace: bool) -> Result<Outcome, CliError> {
    let state = doc.to_state()?;
    let initial_total = state.measure().total;
    let run = separate_all(&state).map_err(domain)?;
    let ledger: Vec<Value> = run
        .ledger
        .entries
        .iter()
        .map(|e| {
            let table = |m: &std::collections::BTreeMap<(u32, u32), u64>| {
                m.iter()
                    .map(|(&(i, j), &v)| (format!("{i},{j}"), json!(v)))
                    .collect::<serde_json::Map<String, Value>>()
            };
            json!({
                "step": e.step,
                "component": e.component,
                "members": e.members,
                "before": table(&e.before),
                "after": table(&e.after),
                "exceptional": e.exceptional,
            })
        })
        .collect();
    let trees: Vec<Value> = run
        .trees
        .iter()
        .map(|t| {
            json!({
                "component": t.component,
                "vertices": t.vertices,
                "edges": t.edges,
                "assignment": t
                    .assignment
                    .iter()
                    .map(|(s, v)| (s.to_string(), json!(v)))
                    .collect::<serde_json::Map<String, Value>>(),
            })
        })
        .collect();
    let mut monotone_ok = true;
    for w in run.measures.windows(2) {
        if w[1].total >= w[0].total
            || (w[1].n_p, w[1].count_at_max) > (w[0].n_p, w[0].count_at_max)
        {
            monotone_ok = false;
        }
    }
    let checks = vec![
        CheckVerdict {
            name: "final state is fully separated".into(),
            ok: run.final_state.measure().n_p == 1,
        },
        CheckVerdict {
            name: "step count bounded by the initial total multiplicity".into(),
            ok: run.ledger.entries.len() as u64 <= initial_total,
        },
        CheckVerdict {
            name: "measures decrease monotonically".into(),
            ok: monotone_ok,
        },
        CheckVerdict {
            name: "every intermediate state validates".into(),
            ok: run.states.iter().all(|s| s.validate().is_ok()),
        },
        CheckVerdict {
            name: "fiber trees stay consistent".into(),
            ok: run
                .states
                .iter()
                .zip(&run.tree_history)
                .all(|(s, ts)| ts.iter().all(|t| fiber_tree_check(t, s))),
        },
    ];
    Ok(Outcome {
        outputs: json!({
            "final": SeparationDoc::from_state(&run.final_state),
            "trees": trees,
        }),
        trace: with_trace.then(|| Value::Array(ledger)),
        checks,
    })
}

fn run_check_family(
    system_doc: &desing::json::StrataDoc,
    family_docs: &std::collections::BTreeMap<String, FanDoc>,
) -> Result<Outcome, CliError> {
    let system = system_doc.to_system()?;
    let family = family_from_docs(family_docs)?;
    let verdict = check_compatible_family(&system, &family).map_err(domain)?;
    let outputs = match &verdict {
        Ok(()) => json!({ "compatible": true }),
        Err(v) => json!({
            "compatible": false,
            "violation": { "small": v.small, "big": v.big, "reason": v.reason },
        }),
    };
    Ok(Outcome {
        outputs,
        trace: None,
        checks: Vec::new(),
    })
}

fn run_verify_corpus() -> Result<Outcome, CliError> {
    let reports = verify::run_all();
    for r in &reports {
        eprintln!("{r}");
    }
    let all = reports.iter().all(|r| r.pass);
    let items: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "id": r.id,
                "name": r.name,
                "pass": r.pass,
                "details": r.details,
            })
        })
        .collect();
    Ok(Outcome {
        outputs: json!({ "criteria": items, "all_pass": all }),
        trace: None,
        checks: vec![CheckVerdict {
            name: "all acceptance criteria pass".into(),
            ok: all,
        }],
    })
}
