mod dot;

use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use pbc_core::ratio::{self, parse_rational};
use pbc_core::{
    decide_equal, denote, distance_series, hom_distance, instantiate, lemma_demo, negligibility_report, normalize, parse_program,
    synthesize_tight_derivation, typecheck, Lemma, Rational, StochMap, Term, Verdict,
};

/// Exact checker for probabilistic Boolean circuits.
#[derive(Parser)]
#[command(name = "pbc", version)]
struct Cli {
    /// Add rounded decimal columns next to the exact ones.
    #[arg(long, global = true)]
    decimal: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and typecheck a circuit file.
    Check { file: PathBuf },
    /// Print the stochastic map as TSV.
    Eval {
        file: PathBuf,
        #[arg(long)]
        k: Option<KRange>,
    },
    /// Print the normal form of a star-free circuit.
    Normalize { file: PathBuf },
    /// Decide equality; star circuits are compared for every k in range.
    Eq {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        k: Option<KRange>,
    },
    /// Exact hom distance, with a tight derivation for star-free circuits.
    Dist {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        k: Option<KRange>,
    },
    /// Distance series with a negligibility report.
    Series {
        left: PathBuf,
        right: PathBuf,
        #[arg(long)]
        k: KRange,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long, default_value = "1/100", value_parser = prob_arg)]
        eps: Rational,
    },
    /// Run a built-in lemma: otp, all1, keyguess or vonneumann.
    Demo {
        name: String,
        #[arg(long, value_parser = prob_arg)]
        p: Option<Rational>,
        #[arg(long)]
        k: Option<KRange>,
        #[arg(long, default_value_t = 3)]
        a: u32,
        #[arg(long, default_value = "1/100", value_parser = prob_arg)]
        eps: Rational,
    },
    /// Graphviz rendering of a circuit.
    Dot { file: PathBuf },
}

/// `K` or an inclusive `LO..HI`.
#[derive(Clone, Copy, Debug)]
struct KRange {
    lo: usize,
    hi: usize,
}

impl FromStr for KRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| format!("`{s}` is not K or LO..HI"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => (num(s)?, num(s)?),
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(KRange { lo, hi })
    }
}

fn prob_arg(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow::anyhow!(msg.into())
}

fn load(path: &Path) -> anyhow::Result<Term> {
    let src = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let prog = parse_program(&src).map_err(|e| usage(format!("{}:{e}", path.display())))?;
    Ok(prog.main)
}

fn load_pair(l: &Path, r: &Path) -> anyhow::Result<(Term, Term)> {
    let (f, g) = (load(l)?, load(r)?);
    let (jf, jg) = (typecheck(&f)?, typecheck(&g)?);
    if jf != jg {
        return Err(usage(format!("the circuits have different types: {jf} vs {jg}")));
    }
    Ok((f, g))
}

fn at_k(t: &Term, k: usize) -> anyhow::Result<StochMap> {
    Ok(denote(&instantiate(k, t)?)?)
}

fn decimal(r: &Rational) -> String {
    format!("{:.6}", ratio::to_f64(r))
}

/// Output and exit status of one command.
struct Done {
    out: String,
    status: u8,
}

fn ok(out: String) -> anyhow::Result<Done> {
    Ok(Done { out, status: 0 })
}

fn run(cli: Cli) -> anyhow::Result<Done> {
    let dec = cli.decimal;
    match cli.cmd {
        Cmd::Check { file } => {
            let t = load(&file)?;
            let j = typecheck(&t)?;
            ok(format!("OK {} -> {}\n", j.domain, j.codomain))
        }
        Cmd::Eval { file, k } => {
            let t = load(&file)?;
            match k {
                None if !t.is_star_free() => Err(usage("the circuit has star objects; pass --k K or --k LO..HI")),
                None => ok(denote(&t)?.to_tsv_with(dec)),
                Some(r) => {
                    let mut out = String::new();
                    for k in r.lo..=r.hi {
                        if r.lo != r.hi {
                            let _ = writeln!(out, "# k={k}");
                        }
                        out.push_str(&at_k(&t, k)?.to_tsv_with(dec));
                    }
                    ok(out)
                }
            }
        }
        Cmd::Normalize { file } => {
            let t = load(&file)?;
            if !t.is_star_free() {
                return Err(usage("the circuit has star objects; normal forms exist only for star-free circuits"));
            }
            ok(normalize(&t)?.to_string())
        }
        Cmd::Eq { left, right, k } => {
            let (f, g) = load_pair(&left, &right)?;
            if f.is_star_free() && g.is_star_free() && k.is_none() {
                if decide_equal(&f, &g)? {
                    return ok("EQUAL\n".into());
                }
                let (mf, mg) = (denote(&f)?, denote(&g)?);
                let i = (0..mf.rows().len()).find(|&i| mf.rows()[i] != mg.rows()[i]).unwrap_or(0);
                let input = pbc_core::BitString::new(mf.in_arity(), i as u64);
                return Ok(Done {
                    out: format!("UNEQUAL at input {input}\n"),
                    status: 1,
                });
            }
            let r = k.unwrap_or(KRange { lo: 0, hi: 6 });
            for k in r.lo..=r.hi {
                let (mf, mg) = (at_k(&f, k)?, at_k(&g, k)?);
                if let Some(i) = (0..mf.rows().len()).find(|&i| mf.rows()[i] != mg.rows()[i]) {
                    let input = pbc_core::BitString::new(mf.in_arity(), i as u64);
                    return Ok(Done {
                        out: format!("UNEQUAL at k={k}, input {input}\n"),
                        status: 1,
                    });
                }
            }
            if r.lo == 0 {
                ok(format!("EQUAL up to k={}\n", r.hi))
            } else {
                ok(format!("EQUAL for k={}..{}\n", r.lo, r.hi))
            }
        }
        Cmd::Dist { left, right, k } => {
            let (f, g) = load_pair(&left, &right)?;
            if f.is_star_free() && g.is_star_free() && k.is_none() {
                let d = hom_distance(&denote(&f)?, &denote(&g)?)?;
                let proof = synthesize_tight_derivation(&f, &g)?;
                let mut out = format!("distance={}", ratio::fmt_exact(&d));
                if dec {
                    let _ = write!(out, " ({})", decimal(&d));
                }
                let _ = write!(out, "\nderivation:\n{}", proof.to_text());
                return ok(out);
            }
            let r = k.unwrap_or(KRange { lo: 0, hi: 6 });
            let series = distance_series(&f, &g, r.lo, r.hi)?;
            let mut out = String::from(if dec { "k,d_num,d_den,d_decimal\n" } else { "k,d_num,d_den\n" });
            for (k, d) in &series.pairs {
                let _ = write!(out, "{k},{},{}", d.numer(), d.denom());
                if dec {
                    let _ = write!(out, ",{}", decimal(d));
                }
                out.push('\n');
            }
            ok(out)
        }
        Cmd::Series { left, right, k, a, eps } => {
            let (f, g) = load_pair(&left, &right)?;
            let report = negligibility_report(&distance_series(&f, &g, k.lo, k.hi)?, a, &eps);
            let status = u8::from(report.verdict == Verdict::NotDecreasing);
            Ok(Done {
                out: report.to_csv(dec),
                status,
            })
        }
        Cmd::Demo { name, p, k, a, eps } => {
            let lemma = Lemma::from_name(&name, p).map_err(|e| usage(e.to_string()))?;
            let r = k.unwrap_or(match lemma {
                Lemma::KeyGuess => KRange { lo: 1, hi: 8 },
                Lemma::VonNeumann(_) => KRange { lo: 1, hi: 10 },
                _ => KRange { lo: 0, hi: 10 },
            });
            let rep = lemma_demo(&lemma, r.lo, r.hi, a, &eps)?;
            let mut out = rep.report.to_csv(dec);
            let rel = if matches!(lemma, Lemma::Otp | Lemma::VonNeumann(_)) { "=" } else { "<=" };
            for (k, cf, holds) in &rep.closed_form {
                let _ = writeln!(out, "k={k} d_k {rel} {} holds={holds}", ratio::fmt_exact(cf));
            }
            if let Some(b) = rep.base_equal {
                let _ = writeln!(out, "base_equal={b}");
            }
            let status = u8::from(!rep.all_hold() || rep.report.verdict == Verdict::NotDecreasing);
            Ok(Done { out, status })
        }
        Cmd::Dot { file } => ok(dot::emit_dot(&load(&file)?)),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(done) => {
            print!("{}", done.out);
            ExitCode::from(done.status)
        }
        // every error is a usage, file, parse or type problem, or an input
        // beyond the arity guard
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
