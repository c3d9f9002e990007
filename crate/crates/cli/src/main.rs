use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qweyl::autos::{aut_group_shape, formal_isomorphism, isomorphic, verify_homomorphism, AutSpecJson};
use qweyl::center::{center_spanning_monomials, is_central, scan_center, verify_specz};
use qweyl::discriminant::{discriminant_with, verify_discriminant, BasisConvention, DiscriminantReport, Formula};
use qweyl::expr::{parse_element, parse_scalar};
use qweyl::poisson::{verify_prop33, PoissonContext};
use qweyl::suite::{run_all, run_criterion};
use qweyl::{Associate, Error, Mode, WeylAlgebra, WeylParams};

#[derive(Parser)]
#[command(name = "qweyl", version, about = "Quantized Weyl algebras at roots of unity")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Omit wall-clock times so reports are byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CMode {
    /// `x_1 y_1 - eps_1 y_1 x_1 = c` with `c` formal.
    C,
    Unit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Basis {
    YFirst,
    XFirst,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    TheoremB,
    #[value(name = "theorem-71")]
    Theorem71,
    Prop33,
    Specz,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a parameter file and print the derived data.
    Validate {
        #[arg(long)]
        params: PathBuf,
    },
    /// Spanning monomials of the center up to a degree bound.
    CenterBasis {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 4)]
        bound: u32,
        /// Also compare with a brute-force scan of central elements.
        #[arg(long)]
        scan: bool,
    },
    /// Decide whether an element is central.
    IsCentral {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        element: String,
        #[arg(long, value_enum, default_value_t = CMode::Unit)]
        mode: CMode,
    },
    /// Discriminant over the central subalgebra generated by `x^L, y^L`.
    Discriminant {
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "L")]
        l: Option<String>,
        #[arg(long, value_enum, default_value_t = CMode::Unit)]
        mode: CMode,
        #[arg(long, value_enum, default_value_t = Basis::YFirst)]
        basis: Basis,
    },
    /// Check a closed form or identity.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[arg(long)]
        params: PathBuf,
        #[arg(long = "L")]
        l: Option<String>,
    },
    /// Poisson brackets on the center.
    Poisson {
        #[arg(long)]
        params: PathBuf,
        /// First argument, a polynomial in X_j, Y_j (default: full table).
        #[arg(long, requires = "g")]
        f: Option<String>,
        #[arg(long, requires = "f")]
        g: Option<String>,
    },
    /// Check an isomorphism given by tau and scalars, or by a spec file.
    AutCheck {
        #[arg(long, required_unless_present = "spec")]
        params: Option<PathBuf>,
        /// Target parameters (default: the source).
        #[arg(long)]
        params2: Option<PathBuf>,
        /// Signs, e.g. "1,-1". Scalars default to formal units.
        #[arg(long, allow_hyphen_values = true, required_unless_present = "spec")]
        tau: Option<String>,
        /// JSON spec with source, target, tau, units, mu, nu.
        #[arg(long, conflicts_with_all = ["params", "params2", "tau"])]
        spec: Option<PathBuf>,
    },
    /// Search for an isomorphism between two parameter sets.
    Isomorphic {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        params2: PathBuf,
    },
    /// Run the acceptance criteria.
    Acceptance {
        /// A single criterion (1 to 10).
        #[arg(long)]
        criterion: Option<usize>,
    },
}

/// Exit codes: 0 verified, 1 verification failed, 2 bad input.
enum Failure {
    Input(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_)
            | Error::DescentFailure
            | Error::Divisibility(_)
            | Error::IdentityViolation { .. } => Failure::Verification(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

struct Report {
    json: Value,
    text: String,
    ok: bool,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<WeylParams, Failure> {
    let text = read(path)?;
    WeylParams::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn with_c(p: &WeylParams, mode: CMode) -> Result<WeylParams, Failure> {
    Ok(p.with_mode(Mode {
        c_formal: mode == CMode::C,
        ..p.mode().clone()
    })?)
}

fn parse_l(s: Option<&str>, p: &WeylParams) -> Result<Vec<u32>, Failure> {
    let Some(s) = s else {
        return Ok((0..p.n()).map(|j| p.d(j)).collect());
    };
    let l: Vec<u32> = s
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure::Input(format!("--L: {e}")))?;
    if l.len() != p.n() {
        return Err(Failure::Input(format!("--L needs {} entries", p.n())));
    }
    p.check_central_powers(&l)?;
    Ok(l)
}

fn parse_tau(s: &str) -> Result<Vec<i8>, Failure> {
    s.split(',')
        .map(|t| match t.trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            other => Err(Failure::Input(format!("--tau: bad sign `{other}`"))),
        })
        .collect()
}

fn unit_text(u: &Option<Associate>) -> String {
    match u {
        None => "none".into(),
        Some(a) => match a.root {
            Some(r) => {
                let order = a.scalar.order();
                // e^{D/2} = -1
                let (neg, k) = if 2 * r.exponent == order { (!r.negated, 0) } else { (r.negated, r.exponent) };
                let sign = if neg { '-' } else { '+' };
                if k == 0 {
                    format!("{sign}1")
                } else {
                    format!("{sign}e^{k}")
                }
            }
            None => format!("{} (not certified)", a.scalar),
        },
    }
}

fn discriminant_report(r: DiscriminantReport, timing: bool) -> Report {
    let ok = r.associate && r.certified_unit && r.c_power_divisible != Some(false);
    let mut text = format!(
        "{}, unit {}, Λ={}",
        if r.associate { "associate" } else { "not associate" },
        unit_text(&r.unit),
        r.lambda
    );
    if let Some(d) = r.c_power_divisible {
        write!(text, ", polynomial in c^gcd(L): {d}").unwrap();
    }
    write!(text, "\ncomputed: {}\nformula:  {}", r.lhs, r.rhs).unwrap();
    let mut json = serde_json::to_value(&r).expect("serializable");
    json["pass"] = json!(ok);
    if !timing {
        json["elapsed_ms"] = Value::Null;
    } else if let Some(ms) = r.elapsed_ms {
        write!(text, "\nelapsed: {ms} ms").unwrap();
    }
    Report { json, text, ok }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let timing = !cli.no_timing;
    match &cli.command {
        Command::Validate { params } => {
            let p = load(params)?;
            let n = p.n();
            let d: Vec<u32> = (0..n).map(|j| p.d(j)).collect();
            let free = p.is_free_over_center();
            let mut dprime = Vec::new();
            for j in 0..n {
                for k in j + 1..n {
                    dprime.push(json!({"j": j + 1, "k": k + 1, "d_prime": p.d_prime(j, k)?}));
                }
            }
            let text = format!("valid: n={n}, d={d:?}, D={}, free over center: {free}", p.big_d());
            Ok(Report {
                json: json!({"valid": true, "n": n, "d": d, "D": p.big_d(), "free": free, "d_prime": dprime, "params": p.to_raw()}),
                text,
                ok: true,
            })
        }
        Command::CenterBasis { params, bound, scan } => {
            let p = load(params)?;
            let monos = center_spanning_monomials(&p, *bound)?;
            let mut text = format!("{} spanning elements of degree <= {bound}", monos.len());
            let mut items = Vec::new();
            for m in &monos {
                write!(text, "\n  b={:?} a={:?}: {}", m.exp.b, m.exp.a, m.element).unwrap();
                items.push(json!({"b": m.exp.b, "a": m.exp.a, "element": m.element.to_string()}));
            }
            let mut json = json!({"bound": bound, "free": p.is_free_over_center(), "elements": items});
            let mut ok = true;
            if *scan {
                let r = scan_center(&p, *bound)?;
                write!(text, "\nscan agrees with C(E,B): {}", r.agree).unwrap();
                ok = r.agree;
                json["scan"] = serde_json::to_value(&r).expect("serializable");
            }
            Ok(Report { json, text, ok })
        }
        Command::IsCentral { params, element, mode } => {
            let p = with_c(&load(params)?, *mode)?;
            let alg = WeylAlgebra::new(&p)?;
            let u = parse_element(element, &alg)?;
            let central = is_central(&u);
            Ok(Report {
                json: json!({"element": u.to_string(), "central": central}),
                text: format!("central: {central}"),
                ok: true,
            })
        }
        Command::Discriminant { params, l, mode, basis } => {
            let p = with_c(&load(params)?, *mode)?;
            let l = parse_l(l.as_deref(), &p)?;
            let conv = match basis {
                Basis::YFirst => BasisConvention::YFirst,
                Basis::XFirst => BasisConvention::XFirst,
            };
            let d = discriminant_with(&p, &l, conv)?;
            Ok(Report {
                json: json!({"L": l, "basis": conv, "discriminant": d}),
                text: d.to_string(),
                ok: true,
            })
        }
        Command::Verify { check, params, l } => {
            let p = load(params)?;
            match check {
                Check::TheoremB | Check::Theorem71 => {
                    let l = parse_l(l.as_deref(), &p)?;
                    let f = if *check == Check::TheoremB { Formula::TheoremB } else { Formula::Theorem71 };
                    Ok(discriminant_report(verify_discriminant(&p, &l, f)?, timing))
                }
                Check::Prop33 => {
                    let r = verify_prop33(&p)?;
                    let mut text = format!("prop33: {}", if r.pass { "pass" } else { "FAIL" });
                    for c in &r.checks {
                        let mark = if c.pass { "ok" } else { "FAIL" };
                        write!(text, "\n  {{{}, {}}} = {} [{mark}]", c.left, c.right, c.computed).unwrap();
                        if !c.pass {
                            write!(text, " expected {}", c.expected).unwrap();
                        }
                    }
                    Ok(Report {
                        json: serde_json::to_value(&r).expect("serializable"),
                        ok: r.pass,
                        text,
                    })
                }
                Check::Specz => {
                    let mut rows = Vec::new();
                    let mut text = String::new();
                    let mut ok = true;
                    for j in 1..=p.n() {
                        let pass = verify_specz(&p, j)?;
                        ok &= pass;
                        rows.push(json!({"j": j, "pass": pass}));
                        writeln!(text, "z_{j}^d_{j} = Z_{j}: {pass}").unwrap();
                    }
                    Ok(Report {
                        json: json!({"checks": rows, "pass": ok}),
                        text: text.trim_end().into(),
                        ok,
                    })
                }
            }
        }
        Command::Poisson { params, f, g } => {
            let p = load(params)?;
            let ctx = PoissonContext::new(&p)?;
            let order = ctx.order();
            let mut pairs: Vec<(String, String)> = Vec::new();
            if let (Some(f), Some(g)) = (f, g) {
                pairs.push((f.clone(), g.clone()));
            } else {
                let names: Vec<String> = ctx.ring().names().to_vec();
                for (i, a) in names.iter().enumerate() {
                    for b in &names[i + 1..] {
                        pairs.push((a.clone(), b.clone()));
                    }
                }
            }
            let mut rows = Vec::new();
            let mut text = String::new();
            for (a, b) in pairs {
                let fa = ctx.poly(parse_scalar(&a, ctx.ring(), order)?);
                let fb = ctx.poly(parse_scalar(&b, ctx.ring(), order)?);
                let v = ctx.bracket(&fa, &fb)?;
                writeln!(text, "{{{a}, {b}}} = {v}").unwrap();
                rows.push(json!({"left": a, "right": b, "bracket": v}));
            }
            Ok(Report {
                json: json!({"brackets": rows}),
                text: text.trim_end().into(),
                ok: true,
            })
        }
        Command::AutCheck { params, params2, tau, spec } => {
            let spec = match spec {
                Some(path) => AutSpecJson::parse(&read(path)?)?,
                None => {
                    let source = load(params.as_ref().expect("clap requires params"))?;
                    let target = match params2 {
                        Some(p2) => load(p2)?,
                        None => source.clone(),
                    };
                    let tau = parse_tau(tau.as_deref().expect("clap requires tau"))?;
                    formal_isomorphism(&source, &target, &tau)?
                }
            };
            let pass = verify_homomorphism(&spec)?;
            let mut json = serde_json::to_value(&spec).expect("serializable");
            json["homomorphism"] = json!(pass);
            Ok(Report {
                json,
                text: format!("tau={:?}: homomorphism: {pass}", spec.tau),
                ok: pass,
            })
        }
        Command::Isomorphic { params, params2 } => {
            let (p1, p2) = (load(params)?, load(params2)?);
            let tau = isomorphic(&p1, &p2)?;
            let shape = aut_group_shape(&p1);
            let text = match &tau {
                Some(t) => format!("isomorphic: tau={t:?}"),
                None => "not isomorphic".into(),
            };
            Ok(Report {
                json: json!({"isomorphic": tau.is_some(), "tau": tau, "aut_shape": shape}),
                text,
                ok: true,
            })
        }
        Command::Acceptance { criterion } => {
            let results = match criterion {
                Some(id) => vec![run_criterion(*id, cli.seed, timing)?],
                None => run_all(cli.seed, timing),
            };
            let ok = results.iter().all(|r| r.pass);
            let text = results.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("\n");
            Ok(Report {
                json: json!({"seed": cli.seed, "pass": ok, "criteria": results}),
                text,
                ok,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(r) => {
            let out = match cli.format {
                Format::Json => serde_json::to_string_pretty(&r.json).expect("json"),
                Format::Text => r.text,
            };
            // a closed pipe is not an error
            let _ = writeln!(std::io::stdout().lock(), "{out}");
            if r.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
    }
}
