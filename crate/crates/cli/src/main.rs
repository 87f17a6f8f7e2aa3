//! Batch front end: every subcommand reads flags (or JSON files), writes
//! JSON (stdout or --out) and communicates failure through the exit code.
//! Exit 2 means malformed input, exit 1 a computation or verification
//! failure.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nahm_core::characters::{self, CharacterLabel};
use nahm_core::error::Error;
use nahm_core::liealg::{DynkinSpec, Family, MatrixJson, MatrixQ};
use nahm_core::nahmsum::{nahm_sum, NahmDatum, NahmDatumJson};
use nahm_core::qseries::{fmt_rat, parse_rat, PuiseuxSeries, Rat, SeriesJson};
use nahm_core::search::{
    dual_transform, infinite_family_identity, known_b_coset, known_b_minimal, run_search_streaming,
    verify_record, FamilyVariant, MatchRecord, MatchRecordJson, SearchConfig, SearchFamily,
};
use nahm_core::tba::{tba_report, tba_solution, PrecisionConfig};

mod parse;

use parse::{parse_denoms, parse_matrix, parse_range, parse_vector};

#[derive(Parser)]
#[command(
    name = "nahm",
    about = "Exact Nahm sums, CFT characters, TBA asymptotics and B-value searches",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand f_{A,B,C} as an exact q-series.
    Series(SeriesArgs),
    /// Dump character series for one model.
    Characters(CharactersArgs),
    /// Grid-search B vectors whose Nahm sum matches a character combination.
    Search(SearchArgs),
    /// Solve the constant TBA equations and report the central charge.
    Tba(TbaArgs),
    /// Apply the duality transform to a triple (A, B, C).
    Dual(DualArgs),
    /// Replay the golden checks end to end.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SeriesArgs {
    /// Matrix A as nested rational lists, e.g. "[[3/2,1],[1,2]]".
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    /// Vector B as a comma list, e.g. "-1/2,-1,-1/2".
    #[arg(long = "B", allow_hyphen_values = true)]
    b: Option<String>,
    /// Scalar C, e.g. "-1/60".
    #[arg(long = "C", allow_hyphen_values = true)]
    c: Option<String>,
    /// Read the whole datum from a JSON file instead of flags.
    #[arg(long, conflicts_with_all = ["a", "b", "c"])]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    order: u32,
    /// Human-readable "q^e: c" lines instead of JSON.
    #[arg(long)]
    pretty: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CharactersArgs {
    /// minimal | coset | affine | u1
    #[arg(long)]
    model: String,
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// Restrict the dump to one label.
    #[arg(long)]
    l: Option<u32>,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long)]
    s: Option<u32>,
    #[arg(long, default_value_t = 20)]
    order: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// minimal | coset | explicit
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// Matrix A for --family explicit.
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    /// Search interval "lo:hi" per coordinate.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Grid denominators, e.g. "1,2,4".
    #[arg(long)]
    denoms: Option<String>,
    #[arg(long, default_value_t = 20)]
    order: u32,
    #[arg(long, default_value_t = 60)]
    digits: u32,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV summary next to the JSON.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct TbaArgs {
    /// minimal | coset (with --n / --k), or give --A directly.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long = "A", allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, default_value_t = 60)]
    digits: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DualArgs {
    #[arg(long = "A", allow_hyphen_values = true)]
    a: String,
    #[arg(long = "B", allow_hyphen_values = true)]
    b: String,
    #[arg(long = "C", allow_hyphen_values = true)]
    c: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// all | tba | families | search
    #[arg(long, default_value = "all")]
    suite: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Series(args) => cmd_series(args),
        Command::Characters(args) => cmd_characters(args),
        Command::Search(args) => cmd_search(args),
        Command::Tba(args) => cmd_tba(args),
        Command::Dual(args) => cmd_dual(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

/// Input-shaped problems exit 2; computation failures exit 1.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::LabelOutOfRange(_)
        | Error::ParityViolation { .. }
        | Error::DimensionMismatch(_)
        | Error::NotPositiveDefinite
        | Error::Json(_) => 2,
        _ => 1,
    }
}

fn validated_digits(digits: u32) -> Result<u32, Error> {
    if digits < 30 {
        return Err(Error::invalid("--digits must be at least 30"));
    }
    Ok(digits)
}

fn emit(text: String, out: &Option<PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_series(args: SeriesArgs) -> Result<ExitCode, Error> {
    let datum = match &args.json {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let json: NahmDatumJson = serde_json::from_str(&text)?;
            NahmDatum::try_from(&json)?
        }
        None => {
            let (Some(a), Some(b), Some(c)) = (&args.a, &args.b, &args.c) else {
                return Err(Error::invalid("provide --A, --B and --C (or --json FILE)"));
            };
            NahmDatum::new(parse_matrix(a)?, parse_vector(b)?, parse_rat(c)?)?
        }
    };
    let series = nahm_sum(&datum, args.order)?;
    let text = if args.pretty {
        format!("{series}")
    } else {
        serde_json::to_string_pretty(&SeriesJson::from(&series))?
    };
    emit(text, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn series_dump(label: String, series: &PuiseuxSeries) -> Result<String, Error> {
    Ok(format!(
        "{label}\n{}",
        serde_json::to_string(&SeriesJson::from(series))?
    ))
}

fn cmd_characters(args: CharactersArgs) -> Result<ExitCode, Error> {
    let order = args.order as usize;
    let mut blocks: Vec<String> = Vec::new();
    match args.model.as_str() {
        "minimal" => {
            let p = args
                .p
                .ok_or_else(|| Error::invalid("--model minimal needs --p"))?;
            let labels: Vec<u32> = match args.s {
                Some(s) => vec![s],
                None => {
                    CharacterLabel::Minimal { p, s: 1 }.validate()?;
                    (1..=(p - 1) / 2).collect()
                }
            };
            for s in labels {
                let chi = characters::minimal_character(p, s, order)?;
                blocks.push(series_dump(format!("minimal:p={p},s={s}"), &chi)?);
            }
        }
        "coset" => {
            let k = args
                .k
                .ok_or_else(|| Error::invalid("--model coset needs --k"))?;
            match (args.l, args.m) {
                (Some(l), Some(m)) => {
                    let chi = characters::coset_character(k, l, m, order)?;
                    blocks.push(series_dump(format!("coset:k={k},l={l},m={m}"), &chi)?);
                }
                (None, None) => {
                    for (l, m) in distinct_coset_labels(k) {
                        let chi = characters::coset_character(k, l, m, order)?;
                        blocks.push(series_dump(format!("coset:k={k},l={l},m={m}"), &chi)?);
                    }
                }
                _ => return Err(Error::invalid("give both --l and --m, or neither")),
            }
        }
        "affine" => {
            let k = args
                .k
                .ok_or_else(|| Error::invalid("--model affine needs --k"))?;
            let l = args
                .l
                .ok_or_else(|| Error::invalid("--model affine needs --l"))?;
            let chi = characters::affine_su2_character(k, l, order)?.eval_z_one();
            blocks.push(series_dump(format!("affine:k={k},l={l} (z=1)"), &chi)?);
        }
        "u1" => {
            let k = args
                .k
                .ok_or_else(|| Error::invalid("--model u1 needs --k"))?;
            let m = args
                .m
                .ok_or_else(|| Error::invalid("--model u1 needs --m"))?;
            let chi = characters::u1_character(k, m, order)?.eval_z_one();
            blocks.push(series_dump(format!("u1:k={k},m={m} (z=1)"), &chi)?);
        }
        other => return Err(Error::invalid(format!("unknown model {other:?}"))),
    }
    emit(blocks.join("\n"), &args.out)?;
    Ok(ExitCode::SUCCESS)
}

/// Canonical coset labels of level k, in display order.
fn distinct_coset_labels(k: u32) -> Vec<(u32, i64)> {
    let mut out = Vec::new();
    for l in 0..=k {
        let mut m = -(k as i64) + 1;
        while m <= k as i64 {
            if (l as i64 + m).rem_euclid(2) == 0
                && characters::coset_canonical(k, l, m) == (l, m)
                && !out.contains(&(l, m))
            {
                out.push((l, m));
            }
            m += 1;
        }
    }
    out
}

fn build_search_config(args: &SearchArgs) -> Result<SearchConfig, Error> {
    let family = match args.family.as_str() {
        "minimal" => SearchFamily::Minimal {
            n: args
                .n
                .ok_or_else(|| Error::invalid("--family minimal needs --n"))?,
        },
        "coset" => {
            let k = args
                .k
                .ok_or_else(|| Error::invalid("--family coset needs --k"))?;
            if k < 2 {
                return Err(Error::invalid("--family coset needs k >= 2"));
            }
            SearchFamily::Coset { k }
        }
        "explicit" => {
            let a = args
                .a
                .as_ref()
                .ok_or_else(|| Error::invalid("--family explicit needs --A"))?;
            let a = parse_matrix(a)?;
            // Explicit searches match against the coset targets of the same
            // rank by default; a curated target file can come later.
            let k = a.rows() as u32 + 1;
            SearchFamily::Explicit {
                a,
                targets: characters::predicted_combinations(k),
            }
        }
        other => return Err(Error::invalid(format!("unknown family {other:?}"))),
    };
    let mut cfg = SearchConfig::new(family);
    if let Some(range) = &args.range {
        cfg.range = Some(parse_range(range)?);
    }
    if let Some(denoms) = &args.denoms {
        cfg.denominators = parse_denoms(denoms)?;
    }
    cfg.order = args.order;
    cfg.precision = PrecisionConfig::with_digits(validated_digits(args.digits)?);
    cfg.jobs = args.jobs;
    Ok(cfg)
}

fn cmd_search(args: SearchArgs) -> Result<ExitCode, Error> {
    let cfg = build_search_config(&args)?;
    let mut records: Vec<MatchRecord> = Vec::new();
    let outcome = run_search_streaming(&cfg, &mut |batch| records.extend_from_slice(batch));
    let json: Vec<MatchRecordJson> = records.iter().map(MatchRecordJson::from).collect();
    let text = serde_json::to_string_pretty(&json)?;
    emit(text, &args.out)?;
    if let Some(csv_path) = &args.csv {
        fs::write(csv_path, nahm_core::search::records_to_csv(&records))?;
    }
    // Partial results are flushed above even when the sweep failed.
    outcome?;
    Ok(ExitCode::SUCCESS)
}

fn family_matrix_for_tba(args: &TbaArgs) -> Result<(MatrixQ, Option<Rat>), Error> {
    let a1 = DynkinSpec::new(Family::A, 1)?;
    match (&args.family, &args.a) {
        (Some(fam), None) => match fam.as_str() {
            "minimal" => {
                let n = args
                    .n
                    .ok_or_else(|| Error::invalid("--family minimal needs --n"))?;
                let y = DynkinSpec::new(Family::T, n)?;
                Ok((
                    nahm_core::liealg::nahm_matrix(a1, y),
                    Some(nahm_core::liealg::effective_central_charge(a1, y)),
                ))
            }
            "coset" => {
                let k = args
                    .k
                    .ok_or_else(|| Error::invalid("--family coset needs --k"))?;
                if k < 2 {
                    return Err(Error::invalid("--family coset needs k >= 2"));
                }
                let y = DynkinSpec::new(Family::A, k - 1)?;
                Ok((
                    nahm_core::liealg::nahm_matrix(a1, y),
                    Some(nahm_core::liealg::effective_central_charge(a1, y)),
                ))
            }
            other => Err(Error::invalid(format!("unknown family {other:?}"))),
        },
        (None, Some(a)) => Ok((parse_matrix(a)?, None)),
        _ => Err(Error::invalid("give either --family (with --n/--k) or --A")),
    }
}

fn cmd_tba(args: TbaArgs) -> Result<ExitCode, Error> {
    let (a, ceff) = family_matrix_for_tba(&args)?;
    let cfg = PrecisionConfig::with_digits(validated_digits(args.digits)?);
    let sol = tba_solution(&a, &cfg)?;
    let report = tba_report(&sol, &cfg, ceff.as_ref());
    emit(serde_json::to_string_pretty(&report)?, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_dual(args: DualArgs) -> Result<ExitCode, Error> {
    let a = parse_matrix(&args.a)?;
    let b = parse_vector(&args.b)?;
    let c = parse_rat(&args.c)?;
    let (a_star, b_star, c_star) = dual_transform(&a, &b, &c)?;
    let json = NahmDatumJson {
        a: MatrixJson::from(&a_star),
        b: b_star.iter().map(fmt_rat).collect(),
        c: fmt_rat(&c_star),
    };
    emit(serde_json::to_string_pretty(&json)?, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

struct VerifyReport {
    failures: u32,
}

impl VerifyReport {
    fn check(&mut self, name: &str, ok: bool) {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures += 1;
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode, Error> {
    let suite = args.suite.as_str();
    if !matches!(suite, "all" | "tba" | "families" | "search") {
        return Err(Error::invalid(format!("unknown suite {suite:?}")));
    }
    let mut report = VerifyReport { failures: 0 };
    let precision = PrecisionConfig::default();

    if matches!(suite, "all" | "tba") {
        let a1 = DynkinSpec::new(Family::A, 1)?;
        for n in 1..=6u32 {
            for fam in [Family::A, Family::T] {
                let y = DynkinSpec::new(fam, n)?;
                let a = nahm_core::liealg::nahm_matrix(a1, y);
                let sol = tba_solution(&a, &precision)?;
                let expect = nahm_core::liealg::effective_central_charge(a1, y);
                let ok = nahm_core::tba::ceff_deviation(&sol.x, &expect) < 1e-30;
                let name = match fam {
                    Family::A => format!("dilog-ceff coset k={}", n + 1),
                    Family::T => format!("dilog-ceff minimal n={n}"),
                };
                report.check(&name, ok);
            }
        }
    }

    if matches!(suite, "all" | "families") {
        for j in -2..=2i64 {
            for (variant, tag) in [(FamilyVariant::Even, "even"), (FamilyVariant::Odd, "odd")] {
                let check = infinite_family_identity(j, variant, 15, &precision)?;
                report.check(&format!("infinite-family {tag} j={j}"), check.equal);
            }
        }
    }

    if matches!(suite, "all" | "search") {
        // Known-B catalogues rediscovered by small searches.
        let mut cfg = SearchConfig::new(SearchFamily::Minimal { n: 1 });
        cfg.range = Some((parse_rat("-5")?, parse_rat("5")?));
        cfg.denominators = vec![1];
        let records = nahm_core::search::run_search(&cfg)?;
        let expect = known_b_minimal(1);
        report.check(
            "search minimal n=1 rediscovers catalogue",
            records.len() == 2 && records.iter().map(|r| &r.b).eq(expect.iter()),
        );
        for rec in &records {
            report.check(
                &format!(
                    "re-verify minimal B={:?}",
                    rec.b.iter().map(fmt_rat).collect::<Vec<_>>()
                ),
                verify_record(&cfg.family.matrix(), rec, &cfg, 5)?,
            );
        }

        let mut cfg = SearchConfig::new(SearchFamily::Coset { k: 2 });
        cfg.range = Some((parse_rat("-2")?, parse_rat("2")?));
        cfg.denominators = vec![1, 2];
        let records = nahm_core::search::run_search(&cfg)?;
        let expect = known_b_coset(2);
        report.check(
            "search coset k=2 rediscovers catalogue",
            records.len() == 2 && records.iter().map(|r| &r.b).eq(expect.iter()),
        );

        // Duality catalogue shape: columns of -(1/2) identity.
        let mut ok = true;
        for k in 2..=6u32 {
            let a = SearchFamily::Coset { k }.matrix();
            for (col, b) in known_b_coset(k).iter().enumerate().skip(1) {
                let (_, b_star, _) = dual_transform(&a, b, &parse_rat("0")?)?;
                for (i, v) in b_star.iter().enumerate() {
                    let expect = if i + 1 == col {
                        parse_rat("-1/2")?
                    } else {
                        Rat::new()
                    };
                    ok &= *v == expect;
                }
            }
        }
        report.check("dual coset catalogue is -(1/2) identity columns", ok);
    }

    if report.failures > 0 {
        eprintln!("{} check(s) failed", report.failures);
        return Ok(ExitCode::FAILURE);
    }
    Ok(ExitCode::SUCCESS)
}
