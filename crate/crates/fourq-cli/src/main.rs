// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Command line front end: classification, verdicts, standard forms,
//! symmetries, LU equivalence, separability checks, protocol synthesis and
//! fixture generation, all over a JSON state format.

use clap::{Parser, Subcommand};
use fourq::classify::{classify_tol, ClassifyError};
use fourq::family::{seed, Family};
use fourq::fixtures::random_in_family;
use fourq::json::{parse_state, write_state, StateFile, SCHEMA_VERSION};
use fourq::linalg::DEFAULT_EIG_TOL;
use fourq::standard_form::{lu_equivalent, standard_form_with};
use fourq::state::PureState4;
use fourq::symmetry::{sample_continuous, symmetry_group, SamplePolicy};
use fourq::transform::{
    sep_feasible, sep_feasible_scan, synthesize_protocol, synthesize_protocol_auto,
    verdict_of_form, verify_protocol, ProtocolError, SepInstance,
};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "fourq",
    about = "Four-qubit entanglement families, standard forms and LOCC transformation analysis",
    version
)]
struct Cli {
    /// Relative degeneracy tolerance scale (default 1e-7).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Pretty-print the JSON report.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify a state into its SLOCC family.
    Classify {
        /// State file path, or - for stdin.
        path: String,
        /// Permutation search policy: auto (default), all, none.
        #[arg(long, default_value = "auto")]
        perms: String,
    },
    /// Transformation verdict: reachable / convertible / isolated / MES.
    Verdict {
        /// State file path, - for stdin, or a directory with --dir.
        path: String,
        /// Treat the path as a directory of .json state files.
        #[arg(long)]
        dir: bool,
    },
    /// Synthesize and verify a protocol transforming source into target.
    Protocol {
        /// Source state file, or "auto" to pick the parent automatically.
        source: String,
        target: String,
    },
    /// Print the seed state of a family.
    Seed {
        family: String,
        /// Parameters as a JSON array of [re, im] pairs.
        #[arg(long)]
        params: Option<String>,
    },
    /// List the symmetry group of a state's family.
    Symmetries {
        path: String,
        /// Also list discretized samples of the continuous parts.
        #[arg(long)]
        samples: bool,
    },
    /// LU standard form of a state.
    StandardForm { path: String },
    /// Decide LU equivalence of two states.
    LuEq { a: String, b: String },
    /// Separable-map feasibility between two states of one family.
    SepCheck {
        source: String,
        target: String,
        /// Include non-unitary symmetry samples (falsification mode).
        #[arg(long)]
        include_nonunitary_symmetries: bool,
        /// Scan r over [0.1, 10] (64 log-spaced points).
        #[arg(long)]
        r_scan: bool,
    },
    /// Generate a reproducible random state inside a family.
    Random {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Condition bound for the dressing operator.
        #[arg(long, default_value_t = 10.0)]
        cond: f64,
        #[arg(long)]
        params: Option<String>,
    },
}

fn read_input(path: &str) -> Result<String, String> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
    }
}

fn load_state(path: &str) -> Result<PureState4, String> {
    let text = read_input(path)?;
    parse_state(&text).map_err(|e| format!("{path}: {e}"))
}

fn parse_params(s: &Option<String>, family: Family) -> Result<Vec<C64>, String> {
    match s {
        None => Ok(family.default_params()),
        Some(text) => {
            let pairs: Vec<[f64; 2]> =
                serde_json::from_str(text).map_err(|e| format!("params: {e}"))?;
            Ok(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
        }
    }
}

fn complex_pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    command: String,
    tolerance: f64,
    result: Value,
}

fn emit(report: &Report, pretty: bool) {
    let text = if pretty {
        serde_json::to_string_pretty(report)
    } else {
        serde_json::to_string(report)
    }
    .expect("serializable report");
    println!("{text}");
}

fn classify_result(psi: &PureState4, tol: f64) -> Result<(Value, fourq::ClassDescriptor), u8> {
    match classify_tol(psi, tol) {
        Ok(d) => {
            let v = json!({
                "family": d.family.name(),
                "params": complex_pairs(&d.params),
                "perm": d.perm.iter().map(|p| p + 1).collect::<Vec<_>>(),
                "margin": d.margin,
            });
            Ok((v, d))
        }
        Err(ClassifyError::Biseparable { partition }) => Ok((
            json!({"family": "BISEPARABLE", "partition": partition}),
            fourq::ClassDescriptor {
                family: Family::Biseparable,
                params: vec![],
                perm: [0, 1, 2, 3],
                z_slots: vec![],
                zt_slots: vec![],
                margin: 0.0,
            },
        )),
        Err(e) => {
            eprintln!("{e}");
            Err(3)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol.unwrap_or(DEFAULT_EIG_TOL);
    let pretty = cli.pretty;
    match run(cli, tol, pretty) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}

fn run(cli: Cli, tol: f64, pretty: bool) -> Result<(), u8> {
    match cli.cmd {
        Cmd::Classify { path, perms } => {
            let psi = load_state(&path).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let (result, d) = classify_result(&psi, tol)?;
            if perms == "none" && d.family != Family::Biseparable && d.perm != [0, 1, 2, 3] {
                eprintln!("state matches only after relabeling {:?}", d.perm);
                return Err(3);
            }
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("classify {path}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::Verdict { path, dir } => {
            let paths: Vec<PathBuf> = if dir {
                let mut v: Vec<PathBuf> = std::fs::read_dir(&path)
                    .map_err(|e| {
                        eprintln!("{path}: {e}");
                        2u8
                    })?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| p.extension().map(|x| x == "json").unwrap_or(false))
                    .collect();
                v.sort();
                v
            } else {
                vec![PathBuf::from(&path)]
            };
            let mut results = Vec::new();
            for p in paths {
                let pstr = p.to_string_lossy().to_string();
                let psi = load_state(&pstr).map_err(|e| {
                    eprintln!("{e}");
                    2u8
                })?;
                let (_, d) = classify_result(&psi, tol)?;
                if d.family == Family::Biseparable {
                    results.push(json!({"path": pstr, "family": "BISEPARABLE"}));
                    continue;
                }
                let sf = standard_form_with(&psi, &d).map_err(|e| {
                    eprintln!("{pstr}: {e}");
                    3u8
                })?;
                let v = verdict_of_form(&psi, &sf).map_err(|e| {
                    eprintln!("{pstr}: {e}");
                    3u8
                })?;
                results.push(json!({
                    "path": pstr,
                    "family": v.family,
                    "in_mes": v.in_mes,
                    "reachable": v.reachable,
                    "convertible": v.convertible,
                    "isolated": v.isolated,
                    "basis": v.basis,
                    "unresolved": v.unresolved,
                    "mixed_marginals_fast_path": v.mixed_marginals_fast_path,
                    "notes": v.notes,
                }));
            }
            let result = if dir {
                json!(results)
            } else {
                results.pop().unwrap_or(Value::Null)
            };
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("verdict {path}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::Protocol { source, target } => {
            let tgt = load_state(&target).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let proto = if source == "auto" {
                synthesize_protocol_auto(&tgt)
            } else {
                let src = load_state(&source).map_err(|e| {
                    eprintln!("{e}");
                    2u8
                })?;
                synthesize_protocol(&src, &tgt)
            };
            let proto = match proto {
                Ok(p) => p,
                Err(
                    e @ (ProtocolError::NoProtocolFound(_)
                    | ProtocolError::SynthesisResidual { .. }),
                ) => {
                    eprintln!("{e}");
                    return Err(4);
                }
                Err(e) => {
                    eprintln!("{e}");
                    return Err(2);
                }
            };
            let report = verify_protocol(&proto);
            if !report.all_pass {
                eprintln!("internal invariant violation: synthesized protocol failed verification");
                return Err(5);
            }
            let branches: Vec<Value> = proto
                .branches
                .iter()
                .map(|b| {
                    let ops: Vec<Vec<[f64; 2]>> = b
                        .ops
                        .ops
                        .iter()
                        .map(|m| {
                            vec![
                                [m.0[0][0].re, m.0[0][0].im],
                                [m.0[0][1].re, m.0[0][1].im],
                                [m.0[1][0].re, m.0[1][0].im],
                                [m.0[1][1].re, m.0[1][1].im],
                            ]
                        })
                        .collect();
                    json!({"label": b.label, "weight": b.weight, "ops_row_major": ops})
                })
                .collect();
            let result = json!({
                "basis": proto.basis,
                "measuring_party": proto.measuring_party + 1,
                "r": proto.r,
                "branches": branches,
                "source_state": StateFile::from_state(&proto.source, None),
                "target_state": StateFile::from_state(&proto.target, None),
                "verification": report,
            });
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("protocol {source} {target}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::Seed { family, params } => {
            let fam = Family::from_name(&family).ok_or_else(|| {
                eprintln!("unknown family {family}");
                2u8
            })?;
            let p = parse_params(&params, fam).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let s = seed(fam, &p).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            println!("{}", write_state(&s.state, Some(fam.name().to_string())));
            Ok(())
        }
        Cmd::Symmetries { path, samples } => {
            let psi = load_state(&path).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let (_, d) = classify_result(&psi, tol)?;
            let group = symmetry_group(&d).map_err(|e| {
                eprintln!("{e}");
                3u8
            })?;
            let finite: Vec<Value> = group
                .finite_elements
                .iter()
                .map(|e| {
                    json!({
                        "label": e.label,
                        "unitary": e.unitary,
                        "scalar": [e.scalar.re, e.scalar.im],
                    })
                })
                .collect();
            let continuous: Vec<Value> = group
                .continuous
                .iter()
                .map(|c| json!({"label": c.label, "params": c.param_names, "domain": c.domain}))
                .collect();
            let sampled: Vec<Value> = if samples {
                sample_continuous(&group, &SamplePolicy::default())
                    .iter()
                    .map(|e| json!({"label": e.label, "unitary": e.unitary}))
                    .collect()
            } else {
                vec![]
            };
            let result = json!({
                "family": d.family.name(),
                "finite_count": finite.len(),
                "finite": finite,
                "continuous": continuous,
                "closure_note": group.closure_note,
                "samples": sampled,
            });
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("symmetries {path}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::StandardForm { path } => {
            let psi = load_state(&path).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let (_, d) = classify_result(&psi, tol)?;
            let sf = standard_form_with(&psi, &d).map_err(|e| {
                eprintln!("{e}");
                3u8
            })?;
            let grams: Vec<Value> = sf
                .grams
                .iter()
                .map(|g| json!({ "bloch": g.bloch }))
                .collect();
            let result = json!({
                "family": d.family.name(),
                "params": complex_pairs(&d.params),
                "perm": d.perm.iter().map(|p| p + 1).collect::<Vec<_>>(),
                "grams": grams,
                "fixings": sf.fixings,
                "w_coefficients": sf.w_coeffs,
            });
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("standard-form {path}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::LuEq { a, b } => {
            let pa = load_state(&a).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let pb = load_state(&b).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let (eq, dist) = lu_equivalent(&pa, &pb).map_err(|e| {
                eprintln!("{e}");
                3u8
            })?;
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("lu-eq {a} {b}"),
                    tolerance: tol,
                    result: json!({"equivalent": eq, "distance": dist}),
                },
                pretty,
            );
            Ok(())
        }
        Cmd::SepCheck {
            source,
            target,
            include_nonunitary_symmetries,
            r_scan,
        } => {
            let src = load_state(&source).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let tgt = load_state(&target).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let (_, ds) = classify_result(&src, tol)?;
            let (_, dt) = classify_result(&tgt, tol)?;
            if ds.family != dt.family {
                eprintln!(
                    "states are in different classes: {} vs {}",
                    ds.family.name(),
                    dt.family.name()
                );
                return Err(3);
            }
            let mut dsa = ds.clone();
            dsa.params = dt.params.clone();
            let sfs = standard_form_with(&src, &dsa)
                .or_else(|_| standard_form_with(&src, &ds))
                .map_err(|e| {
                    eprintln!("{e}");
                    3u8
                })?;
            let sft = standard_form_with(&tgt, &dt).map_err(|e| {
                eprintln!("{e}");
                3u8
            })?;
            let group = symmetry_group(&dt).map_err(|e| {
                eprintln!("{e}");
                3u8
            })?;
            let policy = SamplePolicy {
                include_nonunitary: include_nonunitary_symmetries,
                ..SamplePolicy::default()
            };
            let symmetries: Vec<_> = sample_continuous(&group, &policy)
                .into_iter()
                .map(|e| e.op)
                .collect();
            let inst = SepInstance {
                g: sfs.grams,
                h: sft.grams,
                symmetries,
                r: 1.0,
            };
            let (r_used, res) = if r_scan {
                sep_feasible_scan(&inst, 0.1, 10.0, 64)
            } else {
                (1.0, sep_feasible(&inst))
            };
            let result = json!({
                "family": dt.family.name(),
                "symmetry_samples": inst.symmetries.len(),
                "unitary_only": !include_nonunitary_symmetries,
                "necessary_condition_only": !group.continuous.is_empty(),
                "r": r_used,
                "feasible": res.feasible,
                "residual": res.residual,
                "probabilities": res.probabilities,
            });
            emit(
                &Report {
                    schema: SCHEMA_VERSION,
                    command: format!("sep-check {source} {target}"),
                    tolerance: tol,
                    result,
                },
                pretty,
            );
            Ok(())
        }
        Cmd::Random {
            family,
            rng_seed,
            cond,
            params,
        } => {
            let fam = Family::from_name(&family).ok_or_else(|| {
                eprintln!("unknown family {family}");
                2u8
            })?;
            let p = parse_params(&params, fam).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(rng_seed);
            let psi = random_in_family(fam, &p, &mut rng, cond).map_err(|e| {
                eprintln!("{e}");
                2u8
            })?;
            println!(
                "{}",
                write_state(&psi, Some(format!("{} rng_seed={rng_seed}", fam.name())))
            );
            Ok(())
        }
    }
}
