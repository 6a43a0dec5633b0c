//! `kmlab`: runs the verification families and computations of `kmlab-core`,
//! writing one JSON object per line to stdout.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 bad input, 3 resource limit.

mod args;
mod parse;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use kmlab_core::budget::TermBudget;
use kmlab_core::field::{rat, Coefficient, QI2};
use kmlab_core::gausspoly::ExactPG;
use kmlab_core::howe_km::{
    km_form, km_form_expansion, laguerre_closed, laguerre_recursive, sort_sign, sort_sign_closed_form, uniform_sign, SignRule,
};
use kmlab_core::ikeda::{ikeda_map, mixed_model_origin, verify_fab_vanishing, verify_fk_vanishing, verify_ikeda_kills, SplitFrame};
use kmlab_core::numlat::{beta_grouping_check, fiber_product_decomposition, trace_identity_samples, FiniteActionModel};
use kmlab_core::perm::perm_tuples;
use kmlab_core::weil::{generating_series, q_expansion_csv, Embedding, VolumeTable};
use kmlab_core::KmError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, Format, KmCmd, LatticeCmd, SeriesCmd, Sign, VerifyCmd};

enum Failure {
    Input(String),
    Resource(String),
}

impl From<KmError> for Failure {
    fn from(e: KmError) -> Self {
        match e {
            KmError::ResourceLimit { .. } | KmError::CapExceeded { .. } => Failure::Resource(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

struct Reporter {
    out: std::io::StdoutLock<'static>,
}

impl Reporter {
    fn emit<T: Serialize>(&mut self, value: &T) {
        let line = serde_json::to_string(value).expect("reports serialize");
        // a closed pipe is not worth a panic
        let _ = writeln!(self.out, "{}", line);
    }

    fn raw(&mut self, text: &str) {
        let _ = self.out.write_all(text.as_bytes());
    }
}

fn sign_rule(s: Sign) -> SignRule {
    match s {
        Sign::Canonical => SignRule::Canonical,
        Sign::Uniform => SignRule::Uniform,
    }
}

fn verify(cmd: VerifyCmd, budget: &TermBudget, r: &mut Reporter) -> Outcome {
    match cmd {
        VerifyCmd::Laguerre { max_k } => {
            let mut ok = true;
            for k in 0..=max_k {
                let equal = laguerre_closed(k) == laguerre_recursive(k);
                ok &= equal;
                r.emit(&json!({ "k": k, "status": if equal { "exact-equal" } else { "mismatch" } }));
            }
            Ok(ok)
        }
        VerifyCmd::Fab { max } => {
            let mut ok = true;
            for a in 0..=max {
                for b in 0..=max {
                    if a == b {
                        continue;
                    }
                    let rep = verify_fab_vanishing(a, b)?;
                    ok &= rep.is_zero && rep.gap_witness();
                    r.emit(&rep);
                }
            }
            Ok(ok)
        }
        VerifyCmd::Fk { max_k } => {
            let mut ok = true;
            for k in 1..=max_k {
                let rep = verify_fk_vanishing(k)?;
                ok &= rep.is_zero && rep.binomial_shape && rep.binomial_sum == 0;
                r.emit(&rep);
            }
            Ok(ok)
        }
        VerifyCmd::Ikeda { p, q, sign } => {
            let rep = verify_ikeda_kills(p, q, sign_rule(sign), budget)?;
            r.emit(&rep);
            Ok(rep.passed())
        }
        VerifyCmd::Signs { p, q } => {
            let tuples_len = (1..=p as u128).product::<u128>().saturating_pow(q as u32);
            budget.charge(tuples_len.saturating_mul(tuples_len))?;
            let tuples = perm_tuples(p, q);
            let expected = uniform_sign(p, q);
            let (mut checked, mut uniform_agree, mut closed_agree) = (0u64, 0u64, 0u64);
            let mut first = None;
            for s in &tuples {
                for sp in &tuples {
                    let sign = sort_sign(s, sp);
                    checked += 1;
                    closed_agree += (sign == sort_sign_closed_form(s, sp)) as u64;
                    if sign == expected {
                        uniform_agree += 1;
                    } else if first.is_none() {
                        let show = |t: &[kmlab_core::perm::Perm]| t.iter().map(|x| x.images().to_vec()).collect::<Vec<_>>();
                        first = Some(json!({ "sigma": show(s), "sigma_prime": show(sp), "sort_sign": sign }));
                    }
                }
            }
            r.emit(&json!({
                "p": p, "q": q, "expected": expected, "checked": checked,
                "agree_expected": uniform_agree, "agree_closed_form": closed_agree, "first_mismatch": first,
            }));
            Ok(uniform_agree == checked && closed_agree == checked)
        }
        VerifyCmd::Fourier { max_degree, trials, seed } => {
            let mut ok = true;
            let mut count = 0;
            for a in 0..=max_degree {
                for b in 0..=max_degree - a {
                    let f = ExactPG::monomial(&[(a, b)], Coefficient::one());
                    let ff = f.fourier_transform(0)?.fourier_transform(0)?;
                    let parity = if (a + b) % 2 == 0 { f.clone() } else { f.neg() };
                    ok &= ff == parity;
                    count += 1;
                }
            }
            r.emit(&json!({ "check": "fourier-squared-parity", "monomials": count, "passed": ok }));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let frame = SplitFrame::new(3, 1)?;
            for trial in 0..trials {
                let copies = 1 + trial % 2;
                let n = 3 * copies;
                let mut f = ExactPG::zero(n);
                for _ in 0..4 {
                    let mono: Vec<(u16, u16)> = (0..n).map(|_| (rng.gen_range(0..=2), rng.gen_range(0..=2))).collect();
                    let c = QI2::gaussian(rat(rng.gen_range(-5..=5), 1), rat(rng.gen_range(-5..=5), 1));
                    f.add_assign(&ExactPG::monomial(&mono, Coefficient::from_field(c)))?;
                }
                let equal = mixed_model_origin(&f, &frame, copies)? == ikeda_map(&f, &frame, copies)?;
                ok &= equal;
                r.emit(&json!({ "check": "mixed-model-origin", "trial": trial, "copies": copies, "equal": equal }));
            }
            Ok(ok)
        }
        VerifyCmd::Trace { field, ring, samples, seed, basis } => {
            let f = parse::field_file(&field)?;
            let k = parse::ring(&ring)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let rep = trace_identity_samples(&f, k, samples, basis.into(), &mut rng);
            r.emit(&rep);
            Ok(rep.passed())
        }
        VerifyCmd::Fiber { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ok = true;
            for trial in 0..trials {
                let model = FiniteActionModel::random(&mut rng);
                let rep = fiber_product_decomposition(&model);
                ok &= rep.passed();
                r.emit(&json!({ "trial": trial, "report": rep, "passed": rep.passed() }));
            }
            Ok(ok)
        }
    }
}

fn run(command: Command, budget: &TermBudget, r: &mut Reporter) -> Outcome {
    match command {
        Command::Verify { cmd } => verify(cmd, budget, r),
        Command::Km { cmd: KmCmd::Expand { p, q } } => {
            let built = km_form(p, q, budget)?;
            let matches = built == km_form_expansion(p, q)?;
            r.emit(&json!({ "p": p, "q": q, "components": built.len(), "matches_expansion": matches, "form": built.to_json() }));
            Ok(matches)
        }
        Command::Lattice { cmd: LatticeCmd::Theta { lattice, bound } } => {
            let l = parse::lattice_file(&lattice)?;
            let bound = parse::rational(&bound)?;
            for (norm, count) in l.theta_coefficients(&bound)? {
                r.emit(&json!({ "norm": norm.to_string(), "count": count }));
            }
            Ok(true)
        }
        Command::Lattice { cmd: LatticeCmd::Grouping { field, lattice, b, bound } } => {
            let f = parse::field_file(&field)?;
            let l = parse::lattice_file(&lattice)?;
            let b = parse::rational_list(&b)?;
            let rep = beta_grouping_check(&f, &l, &b, &parse::rational(&bound)?)?;
            r.emit(&rep);
            Ok(rep.passed())
        }
        Command::Series { cmd: SeriesCmd::Assemble { volumes, tau, m, c0, field, format } } => {
            let text = parse::read(&volumes)?;
            let table = VolumeTable::from_json_str(&text)?;
            let tau = parse::complex_list(&tau)?;
            let c0 = parse::complex(&c0)?;
            let f = field.as_deref().map(parse::field_file).transpose()?;
            let emb = f.as_ref().map_or(Embedding::Direct, Embedding::Field);
            match format {
                Format::Json => {
                    let s = generating_series(&table, &tau, m, c0, emb)?;
                    r.emit(&s);
                    Ok(s.prefactor_cancels)
                }
                Format::Csv => {
                    r.raw(&q_expansion_csv(&table, &tau, m, emb)?);
                    Ok(true)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = match cli.term_budget {
        Some(n) => TermBudget::new(n),
        None => TermBudget::from_env(),
    };
    let name = cli.command.name();
    let csv = cli.command.is_csv();
    let start = Instant::now();
    let mut r = Reporter { out: std::io::stdout().lock() };
    let outcome = run(cli.command, &budget, &mut r);
    let mut summary = serde_json::Map::new();
    summary.insert("command".into(), json!(name));
    let code = match outcome {
        Ok(passed) => {
            summary.insert("passed".into(), json!(passed));
            if passed {
                0
            } else {
                1
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("kmlab: input error: {}", msg);
            summary.insert("error".into(), json!({ "kind": "input", "message": msg }));
            2
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("kmlab: resource limit: {}", msg);
            summary.insert("error".into(), json!({ "kind": "resource", "message": msg }));
            3
        }
    };
    summary.insert("terms_used".into(), json!(budget.used().to_string()));
    if cli.timings {
        summary.insert("elapsed_ms".into(), json!(start.elapsed().as_secs_f64() * 1e3));
    }
    // CSV output stays a pure table; the summary goes to stderr instead
    if csv && code == 0 {
        eprintln!("{}", serde_json::Value::Object(summary));
    } else {
        r.emit(&serde_json::Value::Object(summary));
    }
    ExitCode::from(code)
}
