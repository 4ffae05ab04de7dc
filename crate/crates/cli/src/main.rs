mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ratekit::conjugate::{rate_eval, restriction_identity_check, RateOptions};
use ratekit::convgeo::{convex_support, positive_mass_faces, Hyperplane, Polyhedron};
use ratekit::criteria::{
    domain_decomposition, extreme_points, has_projection_property, is_totally_steep,
    strict_convexity_verdict,
};
use ratekit::exact::{parse_rational, QVec, Rational};
use ratekit::logmgf::{k_domain, steepness};
use ratekit::verify::{box_polyhedron, cramer_mc_bound, prop11_check, strictness_probe, SampleSet};
use ratekit::{DistributionSpec, Error};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use report::{exact, exact_vec, extended, float, float_vec};

#[derive(Parser)]
#[command(name = "ratekit", version, about = "Rate functions of random vectors and strict convexity of I_X")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Gradient tolerance of the conjugate solver.
    #[arg(long, default_value_t = 1e-8, global = true)]
    tol: f64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Effective domain of K_X and the convex support C_X.
    Domain { spec: PathBuf },
    /// Facets of C_X and their masses.
    Faces { spec: PathBuf },
    /// I_X at a point.
    Rate {
        spec: PathBuf,
        /// Coordinates, as integers, fractions or decimals.
        #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
        at: Vec<String>,
    },
    /// Decision procedures with witnesses.
    Check {
        #[arg(value_enum)]
        what: CheckKind,
        spec: PathBuf,
    },
    /// Face-chain decomposition of D(I_X).
    Decompose { spec: PathBuf },
    /// Extreme points of D(I_X) with their rates.
    Extremes { spec: PathBuf },
    /// Numerical checks.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckKind {
    Steep,
    Projection,
    TotallySteep,
    Strict,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// rint C_X ⊂ D(I_X) ⊂ cl C_X by sampling.
    Prop11 {
        spec: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// I_X = I_{X|L} − log P(X ∈ L) on a supporting hyperplane L.
    Eq12 {
        spec: PathBuf,
        /// `n1,…,nd=c` for the hyperplane n·v = c.
        #[arg(long, allow_hyphen_values = true)]
        hyperplane: String,
        /// Test points `v1,…,vd` on L; defaults to points of C_X ∩ L.
        #[arg(long, num_args = 1.., allow_hyphen_values = true)]
        at: Vec<String>,
        #[arg(long, default_value_t = 1e-6)]
        identity_tol: f64,
    },
    /// Cramér upper bound by simulation.
    Cramer {
        spec: PathBuf,
        /// Box `lo..hi` per coordinate, comma separated; omit an end for ∞.
        #[arg(long, allow_hyphen_values = true)]
        region: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Strictness probe along a segment.
    Probe {
        spec: PathBuf,
        /// Endpoints `v1,…,vd` `w1,…,wd`.
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        segment: Vec<String>,
        #[arg(long, default_value_t = 21)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        affine_tol: f64,
    },
}

/// What went wrong, and with which exit code.
struct Failure {
    code: u8,
    status: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let refusal = matches!(
            e,
            Error::Refused(_)
                | Error::NotSupporting
                | Error::ZeroMass
                | Error::FullMass
                | Error::EmptyInterior
                | Error::Quadrature(_)
                | Error::NotInterior(_)
        );
        Failure {
            code: if refusal { 1 } else { 2 },
            status: if refusal { "refused" } else { "error" },
            message: e.to_string(),
        }
    }
}

fn input_error(message: String) -> Failure {
    Failure {
        code: 2,
        status: "error",
        message,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = &argv[1..];
    let spec_path = spec_path(&cli.cmd).display().to_string();

    let loaded = std::fs::read(&spec_path)
        .map_err(|e| input_error(format!("cannot read {spec_path}: {e}")))
        .and_then(|bytes| {
            let digest = Sha256::digest(&bytes);
            let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
            let text = String::from_utf8(bytes).map_err(|e| input_error(e.to_string()))?;
            let spec = DistributionSpec::from_json(&text).map_err(Failure::from)?;
            Ok((spec, hex))
        });
    let (sha, outcome) = match loaded {
        Ok((spec, hex)) => (hex, run(&cli, &spec)),
        Err(f) => (String::new(), Err(f)),
    };
    let (doc, code) = match outcome {
        Ok(results) => (report::document(command, &spec_path, &sha, "ok", ("results", results)), 0),
        Err(f) => {
            eprintln!("ratekit: {}", f.message);
            let body = json!({ "message": f.message });
            (report::document(command, &spec_path, &sha, f.status, ("error", body)), f.code)
        }
    };
    match cli.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&doc).expect("report serializes")),
        Format::Text => print!("{}", report::render_text(&doc)),
    }
    ExitCode::from(code)
}

fn spec_path(cmd: &Cmd) -> &PathBuf {
    match cmd {
        Cmd::Domain { spec }
        | Cmd::Faces { spec }
        | Cmd::Rate { spec, .. }
        | Cmd::Check { spec, .. }
        | Cmd::Decompose { spec }
        | Cmd::Extremes { spec } => spec,
        Cmd::Verify { what } => match what {
            VerifyCmd::Prop11 { spec, .. }
            | VerifyCmd::Eq12 { spec, .. }
            | VerifyCmd::Cramer { spec, .. }
            | VerifyCmd::Probe { spec, .. } => spec,
        },
    }
}

fn parse_point(s: &str, d: usize) -> Result<QVec, Failure> {
    let v = s
        .split(',')
        .map(parse_rational)
        .collect::<Result<QVec, _>>()
        .map_err(Failure::from)?;
    check_len(v, d)
}

fn check_len(v: QVec, d: usize) -> Result<QVec, Failure> {
    if v.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: v.len(),
        }
        .into());
    }
    Ok(v)
}

fn parse_hyperplane(s: &str, d: usize) -> Result<Hyperplane, Failure> {
    let (n, c) = s
        .split_once('=')
        .ok_or_else(|| input_error(format!("hyperplane {s:?} is not of the form n1,…,nd=c")))?;
    let normal = parse_point(n, d)?;
    let offset = parse_rational(c).map_err(Failure::from)?;
    Ok(Hyperplane::new(normal, offset)?)
}

fn parse_region(s: &str, d: usize) -> Result<Polyhedron, Failure> {
    let end = |t: &str| -> Result<Option<Rational>, Failure> {
        let t = t.trim();
        if t.is_empty() {
            Ok(None)
        } else {
            parse_rational(t).map(Some).map_err(Failure::from)
        }
    };
    let bounds = s
        .split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once("..")
                .ok_or_else(|| input_error(format!("region part {part:?} is not lo..hi")))?;
            Ok((end(lo)?, end(hi)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    if bounds.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: bounds.len(),
        }
        .into());
    }
    Ok(box_polyhedron(&bounds)?)
}

fn poly_json(p: &Polyhedron) -> Value {
    let (pts, rays) = p.generators();
    json!({
        "set": p.render_closed(),
        "dim": p.dim(),
        "points": pts.iter().map(|x| exact_vec(x)).collect::<Vec<_>>(),
        "rays": rays.iter().map(|x| exact_vec(x)).collect::<Vec<_>>(),
        "facets": p.facets().iter().map(|f| json!({
            "hyperplane": f.hyperplane.to_string(),
            "outward": exact_vec(&f.outward),
        })).collect::<Vec<_>>(),
    })
}

fn samples_json(s: &SampleSet) -> Value {
    json!({
        "samples": s.samples,
        "as_expected": s.as_expected,
        "failures": s.failures.iter().map(|p| float_vec(p, 0.0)).collect::<Vec<_>>(),
    })
}

fn run(cli: &Cli, spec: &DistributionSpec) -> Result<Value, Failure> {
    let d = spec.dimension();
    let opts = RateOptions {
        tol: cli.tol,
        ..RateOptions::default()
    };
    let out = match &cli.cmd {
        Cmd::Domain { .. } => {
            let dom = k_domain(spec);
            json!({
                "k_domain": {
                    "set": dom.to_string(),
                    "intervals": dom.intervals.iter().map(|iv| json!({
                        "lo": iv.lo.value().map(exact),
                        "lo_closed": iv.lo.is_closed(),
                        "hi": iv.hi.value().map(exact),
                        "hi_closed": iv.hi.is_closed(),
                    })).collect::<Vec<_>>(),
                    "has_interior": dom.has_interior(),
                },
                "convex_support": poly_json(&convex_support(spec)),
            })
        }
        Cmd::Faces { .. } => {
            let cx = convex_support(spec);
            json!({
                "facets": cx.facets().iter().map(|f| json!({
                    "face": f.geometry.render_closed(),
                    "hyperplane": f.hyperplane.to_string(),
                    "mass": exact(&spec.mass_in_hyperplane(&f.hyperplane)),
                })).collect::<Vec<_>>(),
                "positive_mass_faces": positive_mass_faces(spec).iter().map(|f| json!({
                    "face": f.geometry.render_closed(),
                    "hyperplane": f.hyperplane.to_string(),
                    "mass": exact(&f.mass),
                })).collect::<Vec<_>>(),
            })
        }
        Cmd::Rate { at, .. } => {
            let v = at
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<QVec, _>>()
                .map_err(Failure::from)?;
            let v = check_len(v, d)?;
            let r = rate_eval(spec, &v, &opts)?;
            json!({
                "point": exact_vec(&v),
                "value": extended(&r.value, opts.tol),
                "status": r.status,
                "iterations": r.iterations,
                "maximizer": r.maximizer.as_ref().map(|m| float_vec(m, opts.tol)),
                "route": r.route,
            })
        }
        Cmd::Check { what, .. } => match what {
            CheckKind::Steep => {
                let rep = steepness(spec)?;
                json!({
                    "steep": rep.steep,
                    "facets": rep.facets.iter().map(|f| json!({
                        "coordinate": f.coordinate,
                        "side": f.side,
                        "endpoint": exact(&f.endpoint),
                        "binding": f.binding,
                        "steep": f.steep,
                        "numerically_steep": f.numerically_steep,
                        "agrees": f.agrees,
                        "probe_gradient_norms": f.probe_gradient_norms.iter()
                            .map(|s| float_vec(s, 0.0)).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })
            }
            CheckKind::Projection => serde_json::to_value(has_projection_property(spec)?).expect("report serializes"),
            CheckKind::TotallySteep => serde_json::to_value(is_totally_steep(spec)?).expect("report serializes"),
            CheckKind::Strict => serde_json::to_value(strict_convexity_verdict(spec)?).expect("report serializes"),
        },
        Cmd::Decompose { .. } => {
            let dec = domain_decomposition(spec)?;
            json!({
                "cells": dec.cells.iter().map(|c| json!({
                    "face_chain": c.face_chain.iter().map(Polyhedron::render_closed).collect::<Vec<_>>(),
                    "piece": c.piece.render_closed(),
                    "cell": c.piece.render_rint(),
                    "dim": c.piece.dim(),
                })).collect::<Vec<_>>(),
            })
        }
        Cmd::Extremes { .. } => {
            let pts = extreme_points(spec)?;
            json!({
                "extreme_points": pts.iter().map(|p| json!({
                    "point": exact_vec(&p.point),
                    "mass": exact(&p.mass),
                    "value": float(p.value, f64::EPSILON),
                })).collect::<Vec<_>>(),
            })
        }
        Cmd::Verify { what } => verify(what, spec, &opts)?,
    };
    Ok(out)
}

/// Points of `C_X ∩ L` for the restriction check when none are given.
fn default_points_on(spec: &DistributionSpec, l: &Hyperplane) -> Vec<QVec> {
    let cx = convex_support(spec);
    let Some(face) = cx.faces().into_iter().find(|f| {
        let (pts, rays) = f.generators();
        pts.iter().all(|p| l.contains(p)) && rays.iter().all(|r| l.is_parallel(r))
    }) else {
        return Vec::new();
    };
    let c = face.relative_interior_point();
    let (pts, rays) = face.generators();
    let half = Rational::new(1.into(), 2.into());
    let mut out = vec![c.clone()];
    for p in &pts {
        out.push(c.iter().zip(p).map(|(a, b)| (a + b) * &half).collect());
    }
    for r in &rays {
        for k in [1, 2] {
            let s = Rational::from_integer(k.into());
            out.push(c.iter().zip(r).map(|(a, b)| a + b * &s).collect());
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

fn verify(what: &VerifyCmd, spec: &DistributionSpec, opts: &RateOptions) -> Result<Value, Failure> {
    let d = spec.dimension();
    Ok(match what {
        VerifyCmd::Prop11 { samples, seed, .. } => {
            let r = prop11_check(spec, *samples, *seed, opts)?;
            json!({
                "seed": seed,
                "interior": samples_json(&r.interior),
                "outside": samples_json(&r.outside),
                "zero_mass_facets": samples_json(&r.zero_mass),
                "passes": r.passes,
            })
        }
        VerifyCmd::Eq12 {
            hyperplane,
            at,
            identity_tol,
            ..
        } => {
            let l = parse_hyperplane(hyperplane, d)?;
            let points = if at.is_empty() {
                default_points_on(spec, &l)
            } else {
                at.iter().map(|s| parse_point(s, d)).collect::<Result<_, _>>()?
            };
            let r = restriction_identity_check(spec, &l, &points, *identity_tol, opts)?;
            json!({
                "hyperplane": r.hyperplane.to_string(),
                "mass": exact(&r.mass),
                "identity_tol": identity_tol,
                "holds": r.holds,
                "points": r.points.iter().map(|p| json!({
                    "v": exact_vec(&p.v),
                    "via_k_tilde": extended(&p.lhs, opts.tol),
                    "via_conditional": extended(&p.rhs, opts.tol),
                    "delta": float(p.delta, opts.tol),
                    "holds": p.holds,
                })).collect::<Vec<_>>(),
            })
        }
        VerifyCmd::Cramer {
            region,
            n,
            trials,
            seed,
            ..
        } => {
            let b = parse_region(region, d)?;
            let r = cramer_mc_bound(spec, &b, *n, *trials, *seed, opts)?;
            let se = (r.p_hat * (1.0 - r.p_hat) / r.trials as f64).sqrt();
            json!({
                "region": b.render_closed(),
                "n": r.n,
                "trials": r.trials,
                "seed": r.seed,
                "hits": r.hits,
                "p_hat": float(r.p_hat, se),
                "empirical": r.empirical.map(|x| float(x, r.slack)),
                "rate_inf": extended(&r.rate_inf, opts.tol),
                "inf_method": r.inf_method,
                "bound": float(r.bound, opts.tol),
                "slack": float(r.slack, 0.0),
                "vacuous": r.vacuous,
                "holds": r.holds,
                "acceptance_rate": r.acceptance_rate.map(|x| float(x, 0.0)),
            })
        }
        VerifyCmd::Probe {
            segment,
            points,
            affine_tol,
            ..
        } => {
            let a = parse_point(&segment[0], d)?;
            let b = parse_point(&segment[1], d)?;
            let r = strictness_probe(spec, &a, &b, *points, *affine_tol, opts)?;
            json!({
                "a": exact_vec(&a),
                "b": exact_vec(&b),
                "affine_tol": affine_tol,
                "verdict": r.verdict,
                "witness": r.witness.as_ref().map(|(p, q)| json!([float_vec(p, 0.0), float_vec(q, 0.0)])),
                "max_deviation": r.max_deviation.map(|x| float(x, opts.tol)),
                "min_chord_gap": float(r.min_chord_gap, opts.tol),
                "values": float_vec(&r.values, opts.tol),
            })
        }
    })
}
