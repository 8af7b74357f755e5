use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use positroid_core::affperm::{self, BoundedAffinePermutation};
use positroid_core::necklace::{self, Necklace};
use positroid_core::quiver::{self, SegmentRep};
use positroid_core::{desing, fforacle, gkm, momentgraph, Error, KSubset};

#[derive(Parser)]
#[command(
    name = "positroid",
    version,
    about = "Necklaces, moment graphs and point counts for X(k, n)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Clone, Copy)]
struct Kn {
    #[arg(short = 'k', long = "k")]
    k: usize,
    #[arg(short = 'n', long = "n")]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// List the Grassmann necklaces of type (k, n)
    Necklaces(Kn),
    /// Cover relations of the closure order
    Poset(Kn),
    /// Bounded affine permutations and their lengths
    Perm {
        #[arg(short = 'k', long = "k", requires = "n")]
        k: Option<usize>,
        #[arg(short = 'n', long = "n", requires = "k")]
        n: Option<usize>,
        /// A single necklace, e.g. 13|34|34|14
        #[arg(long, conflicts_with = "window")]
        necklace: Option<String>,
        /// A single window, e.g. 4,2,5,7
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<i64>>,
    },
    /// The labelled moment graph
    MomentGraph(Kn),
    /// Poincaré polynomial and its totally nonnegative dual
    Poincare(Kn),
    /// Check the X(1,3) Knutson-Tao tuples, or a tuple read from a JSON file
    GkmVerify {
        #[arg(long)]
        tuple: Option<PathBuf>,
        /// Use the tuples with the corrected last entry
        #[arg(long, conflicts_with = "tuple")]
        corrected: bool,
    },
    /// Dimension grid and fibration tower for a component X_J
    Desing {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(short = 'J', value_delimiter = ',', required = true)]
        j: Vec<usize>,
    },
    /// dim Hom(M, N) for sums of segments given as i:l lists
    HomDim {
        #[arg(short = 'n', long = "n")]
        n: usize,
        /// e.g. 1:3,2:3 or "full" for U_[n]
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
    /// Dimension of the quiver Grassmannian of the r-th degeneration
    DegenerationDim {
        #[command(flatten)]
        kn: Kn,
        #[arg(short = 'r')]
        r: usize,
    },
    /// Count F_p-points, optionally per isomorphism class
    CountPoints {
        #[command(flatten)]
        kn: Kn,
        #[arg(short = 'p', long = "prime")]
        p: u32,
        #[arg(long)]
        classes: bool,
    },
    /// Run the consistency checks for the given bounds
    Verify {
        #[command(flatten)]
        kn: Kn,
        #[arg(short = 'p', long = "prime", default_value_t = 2)]
        p: u32,
    },
}

enum Failure {
    Usage(String),
    Verification(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::NoGaleMinimum { .. } => {
                Failure::Usage(e.to_string())
            }
            Error::Inconsistent(_) => Failure::Internal(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(t) = std::env::var("POSITROID_THREADS") {
        match t.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: POSITROID_THREADS must be a positive integer, got {t:?}");
                return ExitCode::from(2);
            }
        }
    }
    let (text, code) = match run(&cli) {
        Ok(s) => (s, 0),
        Err(Failure::Verification(s)) => (s, 1),
        Err(Failure::Internal(s)) => {
            eprintln!("internal error: {s}");
            return ExitCode::from(1);
        }
        Err(Failure::Usage(s)) => {
            eprintln!("error: {s}");
            return ExitCode::from(2);
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(code)
}

fn run(cli: &Cli) -> Outcome {
    let fmt = cli.format;
    match &cli.command {
        Command::Necklaces(kn) => necklaces(*kn, fmt),
        Command::Poset(kn) => poset(*kn, fmt),
        Command::Perm {
            k,
            n,
            necklace,
            window,
        } => {
            let kn = k.zip(*n).map(|(k, n)| Kn { k, n });
            perm(kn, necklace.as_deref(), window.as_deref(), fmt)
        }
        Command::MomentGraph(kn) => moment_graph(*kn, fmt),
        Command::Poincare(kn) => poincare(*kn, fmt),
        Command::GkmVerify { tuple, corrected } => gkm_verify(tuple.as_ref(), *corrected, fmt),
        Command::Desing { n, j } => desing_cmd(*n, j, fmt),
        Command::HomDim { n, source, target } => hom_dim(*n, source, target, fmt),
        Command::DegenerationDim { kn, r } => {
            let d = quiver::degeneration_dim(kn.n, kn.k, *r)?;
            Ok(match fmt {
                Format::Json => {
                    json_line(serde_json::json!({"n": kn.n, "k": kn.k, "r": r, "dim": d}))
                }
                _ => format!("{d}\n"),
            })
        }
        Command::CountPoints { kn, p, classes } => count_points(*kn, *p, *classes, fmt),
        Command::Verify { kn, p } => verify(*kn, *p),
    }
}

fn json_line(v: serde_json::Value) -> String {
    format!("{v}\n")
}

fn necklaces(kn: Kn, fmt: Format) -> Outcome {
    let all = necklace::enumerate_necklaces(kn.k, kn.n)?;
    Ok(match fmt {
        Format::Json => json_line(serde_json::to_value(&all).expect("necklaces serialize")),
        _ => all.iter().map(|v| format!("{v}\n")).collect(),
    })
}

fn poset(kn: Kn, fmt: Format) -> Outcome {
    let (vs, p) = quiver::closure_poset(kn.k, kn.n)?;
    let covers = p.covers();
    Ok(match fmt {
        Format::Json => json_line(serde_json::json!({
            "vertices": vs,
            "covers": covers.iter().map(|&(hi, lo)| [hi, lo]).collect::<Vec<_>>(),
        })),
        Format::Dot => {
            let mut s = format!("digraph \"GN({},{})\" {{\n", kn.k, kn.n);
            for (i, v) in vs.iter().enumerate() {
                let _ = writeln!(s, "  v{i} [label=\"{v}\"];");
            }
            for (hi, lo) in covers {
                let _ = writeln!(s, "  v{hi} -> v{lo};");
            }
            s + "}\n"
        }
        Format::Text => covers
            .iter()
            .map(|&(hi, lo)| format!("{} > {}\n", vs[hi], vs[lo]))
            .collect(),
    })
}

fn perm_row(v: &Necklace) -> Result<(BoundedAffinePermutation, usize, String), Failure> {
    let f = affperm::from_necklace(v)?;
    let l = affperm::length(&f);
    let jp = necklace::necklace_to_juggling(v);
    let j = jp
        .entries()
        .iter()
        .map(|s| s.to_string())
        .collect::<Vec<_>>()
        .join("|");
    Ok((f, l, j))
}

fn perm(kn: Option<Kn>, nk: Option<&str>, window: Option<&[i64]>, fmt: Format) -> Outcome {
    let vs: Vec<Necklace> = match (kn, nk, window) {
        (_, Some(s), _) => vec![s.parse::<Necklace>()?],
        (_, None, Some(w)) => vec![affperm::to_necklace(
            &BoundedAffinePermutation::from_window(w.to_vec())?,
        )?],
        (Some(kn), None, None) => necklace::enumerate_necklaces(kn.k, kn.n)?,
        (None, None, None) => {
            return Err(Failure::Usage("give -k/-n, --necklace or --window".into()))
        }
    };
    let mut rows = Vec::new();
    for v in &vs {
        rows.push((v, perm_row(v)?));
    }
    Ok(match fmt {
        Format::Json => json_line(serde_json::Value::Array(
            rows.iter()
                .map(|(v, (f, l, _))| serde_json::json!({"necklace": v, "permutation": f, "length": l}))
                .collect(),
        )),
        _ => rows
            .iter()
            .map(|(v, (f, l, j))| {
                let w = f.window().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
                format!("{v}\t[{w}]\tlength {l}\tjuggling {j}\n")
            })
            .collect(),
    })
}

fn moment_graph(kn: Kn, fmt: Format) -> Outcome {
    let g = momentgraph::build(kn.k, kn.n)?;
    Ok(match fmt {
        Format::Dot => momentgraph::export_dot(&g),
        Format::Json => momentgraph::export_json(&g) + "\n",
        Format::Text => {
            let vs = g.vertices();
            g.edges()
                .iter()
                .map(|e| format!("{} -> {} : {}\n", vs[e.src], vs[e.dst], e.label))
                .collect()
        }
    })
}

fn poincare(kn: Kn, fmt: Format) -> Outcome {
    let p = momentgraph::poincare(kn.k, kn.n)?;
    let dual = momentgraph::reversed(&p);
    Ok(match fmt {
        Format::Json => json_line(serde_json::json!({"poincare": p, "tnn_dual": dual})),
        _ => format!(
            "{} | tnn dual: {}\n",
            momentgraph::format_poly(&p),
            momentgraph::format_poly(&dual)
        ),
    })
}

fn gkm_verify(tuple: Option<&PathBuf>, corrected: bool, fmt: Format) -> Outcome {
    if let Some(path) = tuple {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let t = gkm::GkmTuple::from_json(&text)?;
        let g = momentgraph::build(t.k(), t.n())?;
        let bad = gkm::gkm_violations(&t, &g)?;
        let out = match fmt {
            Format::Json => {
                json_line(serde_json::json!({"gkm": bad.is_empty(), "violations": bad}))
            }
            _ if bad.is_empty() => "GKM class: yes\n".to_string(),
            _ => {
                bad.iter()
                    .map(|v| format!("violated at {v}\n"))
                    .collect::<String>()
                    + "GKM class: no\n"
            }
        };
        return if bad.is_empty() {
            Ok(out)
        } else {
            Err(Failure::Verification(out))
        };
    }
    let tuples = if corrected {
        gkm::kt_basis_corrected()
    } else {
        gkm::kt_basis_printed()
    };
    let r = gkm::verify_kt_tuples(&tuples)?;
    let out = match fmt {
        Format::Json => json_line(serde_json::to_value(&r).expect("report serializes")),
        _ => {
            let mut s = String::new();
            for t in &r.tuples {
                let gkm_ok = t.violations.is_empty();
                let _ = write!(
                    s,
                    "tuple {}: degree {}, gkm {}, distinguished entry {}",
                    t.index,
                    t.degree,
                    if gkm_ok { "ok" } else { "FAIL" },
                    if t.distinguished_ok { "ok" } else { "FAIL" }
                );
                for v in &t.violations {
                    let _ = write!(s, " [{v}]");
                }
                s.push('\n');
            }
            let _ = writeln!(
                s,
                "degree histogram {:?} {}",
                r.degree_histogram,
                if r.histogram_ok { "ok" } else { "FAIL" }
            );
            let _ = writeln!(s, "{}", if r.passed { "PASS" } else { "FAIL" });
            s
        }
    };
    if r.passed {
        Ok(out)
    } else {
        Err(Failure::Verification(out))
    }
}

fn desing_cmd(n: usize, j: &[usize], fmt: Format) -> Outcome {
    let j = KSubset::new(n, j.to_vec())?;
    let d = desing::d_vector(&j)?;
    let t = desing::tower(&j)?;
    let k = j.k();
    Ok(match fmt {
        Format::Json => json_line(serde_json::json!({
            "grid": serde_json::from_str::<serde_json::Value>(&d.to_json()).expect("grid is JSON"),
            "tower": t,
            "dim": t.dim(),
            "expected": k * (n - k),
        })),
        _ => {
            let mut s = String::from("d^(i,r)");
            for r in 1..=n {
                let _ = write!(s, " r={r}");
            }
            s.push('\n');
            for i in 1..=n {
                let _ = write!(s, "i={i:<5}");
                for r in 1..=n {
                    let _ = write!(s, " {:>3}", d.get(i as i64, r));
                }
                s.push('\n');
            }
            let _ = writeln!(s, "\n{t}");
            let _ = writeln!(s, "k(n-k) = {}", k * (n - k));
            s
        }
    })
}

fn parse_segments(n: usize, s: &str) -> Result<SegmentRep, Failure> {
    if s == "full" {
        return Ok(SegmentRep::full(n));
    }
    let segs = s
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let (i, l) = t
                .split_once(':')
                .ok_or_else(|| Failure::Usage(format!("segment {t:?} is not of the form i:l")))?;
            let parse = |x: &str| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Usage(format!("bad number in {t:?}")))
            };
            Ok((parse(i)?, parse(l)?))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(SegmentRep::new(n, segs)?)
}

fn hom_dim(n: usize, source: &str, target: &str, fmt: Format) -> Outcome {
    let m = parse_segments(n, source)?;
    let t = parse_segments(n, target)?;
    let d = quiver::hom_dim(&m, &t)?;
    Ok(match fmt {
        Format::Json => json_line(serde_json::json!({"source": m, "target": t, "dim": d})),
        _ => format!("{d}\n"),
    })
}

fn count_points(kn: Kn, p: u32, classes: bool, fmt: Format) -> Outcome {
    if !classes {
        let c = fforacle::count_points(kn.k, kn.n, p)?;
        return Ok(match fmt {
            Format::Json => json_line(serde_json::json!({"points": c})),
            _ => format!("{c}\n"),
        });
    }
    let r = fforacle::verify_cellularity(kn.k, kn.n, p)?;
    Ok(match fmt {
        Format::Json => r.to_json() + "\n",
        _ => {
            let mut s = format!("{} points\n", r.points);
            for c in &r.classes {
                let _ = writeln!(s, "{}\t{}\t(expected {})", c.necklace, c.size, c.expected);
            }
            s
        }
    })
}

struct Report {
    text: String,
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let _ = writeln!(
            self.text,
            "{} {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed += 1;
        }
    }
}

/// Checks every invariant that depends on `(k, n, p)`.
fn verify(kn: Kn, p: u32) -> Outcome {
    let (k, n) = (kn.k, kn.n);
    positroid_core::error::check_kn(k, n)?;
    if !fforacle::is_prime(p) {
        return Err(Failure::Usage(format!("{p} is not prime")));
    }
    let mut rep = Report {
        text: String::new(),
        failed: 0,
    };

    let vs = necklace::enumerate_necklaces(k, n)?;
    let scq = quiver::enumerate_sc_subquivers(k, n)?;
    rep.check(
        "necklaces",
        scq.len() == vs.len() && (k != 1 || vs.len() == (1 << n) - 1),
        format!(
            "{} necklaces, {} successor-closed subquivers",
            vs.len(),
            scq.len()
        ),
    );

    let mut roundtrip = true;
    for v in &vs {
        let f = affperm::from_necklace(v)?;
        let jp = necklace::necklace_to_juggling(v);
        roundtrip &= affperm::to_necklace(&f)? == *v
            && necklace::juggling_to_necklace(&jp)? == *v
            && quiver::psi(&quiver::psi_inverse(v)) == *v;
    }
    rep.check(
        "roundtrips",
        roundtrip,
        "juggling, affine permutation and subquiver".into(),
    );

    let g = momentgraph::build(k, n)?;
    let dims = match momentgraph::cell_dims(&g) {
        Ok(d) => {
            rep.check(
                "dimensions",
                true,
                "outdegree = length for every vertex".into(),
            );
            d
        }
        Err(e) => {
            rep.check("dimensions", false, e.to_string());
            return Err(Failure::Verification(rep.text));
        }
    };

    let poly = momentgraph::poincare_of(&g)?;
    let top = k * (n - k);
    let binom = (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i as u64 + 1));
    rep.check(
        "poincare",
        poly.len() == top + 1 && poly[top] == binom && poly[0] == 1,
        momentgraph::format_poly(&poly),
    );

    let (pvs, closure) = quiver::closure_poset(k, n)?;
    let mut iso = pvs == vs;
    for i in 0..vs.len() {
        for j in 0..vs.len() {
            iso &= closure.leq(i, j) == necklace::necklace_leq(&vs[i], &vs[j])?;
        }
    }
    let covers = closure.covers();
    let gap_ok = covers.iter().all(|&(hi, lo)| dims[hi] == dims[lo] + 1);
    rep.check(
        "closure order",
        iso && gap_ok,
        format!("{} covers, all with dimension gap 1", covers.len()),
    );

    let mut euler_ok = true;
    for v in g.vertices() {
        let e = gkm::euler_class(&g, v)?;
        euler_ok &= e.degree() == Some(2 * momentgraph::cell_dim(&g, v)? as u32);
    }
    let constant = gkm::is_gkm_class(&gkm::GkmTuple::constant(k, n, 1)?, &g)?;
    rep.check(
        "gkm",
        euler_ok && constant,
        "Euler class degrees and the unit class".into(),
    );

    let subsets = necklace::k_subsets(n, k);
    let mut desing_ok = true;
    for j in &subsets {
        desing_ok &= desing::desing_dim(j)? == top;
    }
    rep.check(
        "desingularization",
        desing_ok,
        format!("{} towers of dimension {top}", subsets.len()),
    );

    let mut degen_ok = true;
    for r in 0..=n {
        let d = quiver::degeneration_dim(n, k, r)?;
        degen_ok &= if r == 0 || r == n {
            d == top as i64
        } else {
            d < top as i64
        };
    }
    rep.check(
        "degenerations",
        degen_ok,
        "maximal exactly at r = 0 and r = n".into(),
    );

    let full = SegmentRep::full(n);
    let end = quiver::hom_dim(&full, &full)?;
    rep.check(
        "endomorphisms",
        end == n * n,
        format!("dim End(U_[n]) = {end}"),
    );

    let cell = fforacle::verify_cellularity(k, n, p)?;
    let detail = if cell.passed {
        format!(
            "{} points over F_{p}, every class of size p^dim",
            cell.points
        )
    } else {
        cell.mismatches.join("; ")
    };
    rep.check("point count", cell.passed, detail);

    if rep.failed == 0 {
        Ok(rep.text)
    } else {
        Err(Failure::Verification(rep.text))
    }
}
