//! One handler per subcommand. Each reads its inputs, calls the library and
//! renders the result; none of them computes anything itself.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use padist::amice::{self, AmiceSeries};
use padist::binomial::{audit_csv, audit_sweep, default_depth, AuditRow};
use padist::groups::bch::BchSeries;
use padist::groups::limits::{limit_add, limit_bracket, ConvergenceTrace};
use padist::groups::powerful::{
    heisenberg_basis, matrix_lattice_basis, powerful_check, scaled_diagonal_basis, scaled_sl2_basis,
};
use padist::groups::{bch_with, group_law_check, lower_p_series_level, GroupElement};
use padist::hopf::{comult_report, StructureConstants, StructureJson};
use padist::mahler::{self, FunctionTable, KValuation, MahlerSeries};
use padist::padic::json::{MatrixJson, ScalarJson, TableJson};
use padist::poly::IntPoly;
use padist::validation::{CriterionReport, CRITERIA};
use padist::{PadicError, PadicMatrix, PadicScalar};

use crate::config::{Format, RunConfig};

pub enum Failure {
    Padic(PadicError),
    Parse(String),
    Io(String),
    Criteria,
}

impl From<PadicError> for Failure {
    fn from(e: PadicError) -> Self {
        Failure::Padic(e)
    }
}

type Result<T> = std::result::Result<T, Failure>;

pub struct Output {
    pub text: String,
    pub criteria_failed: bool,
}

#[derive(Debug, Clone, Args)]
pub struct FunctionInput {
    /// JSON value table `{"p", "precision", "values"}` holding f(0..=K).
    #[arg(long, conflicts_with = "poly")]
    pub table: Option<PathBuf>,
    /// Integer polynomial such as "3x^2 - x + 1".
    #[arg(long)]
    pub poly: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct DistributionInput {
    /// Dirac distribution at an integer.
    #[arg(long, conflicts_with_all = ["derivative", "dist"])]
    pub dirac: Option<i64>,
    /// The derivative at 0.
    #[arg(long, conflicts_with = "dist")]
    pub derivative: bool,
    /// JSON coefficient table of an Amice transform.
    #[arg(long)]
    pub dist: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PairInput {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residue search for binomial valuations against the closed form (CSV by default).
    BinomAudit {
        #[arg(short = 'n', long, default_value_t = 0)]
        level: u32,
        #[arg(long)]
        kmax: u64,
        #[arg(long, default_value_t = 0)]
        kmin: u64,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Mahler coefficients and decay report of a function.
    Mahler {
        #[command(flatten)]
        input: FunctionInput,
    },
    /// Decay report plus membership verdicts for levels 0..=n.
    Classify {
        #[command(flatten)]
        input: FunctionInput,
        #[arg(long)]
        level: u32,
    },
    /// Amice transform of a distribution, with an overconvergence verdict.
    Amice {
        #[command(flatten)]
        input: DistributionInput,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Pair a distribution with a function.
    Pair {
        #[command(flatten)]
        dist: DistributionInput,
        #[arg(long = "fn", conflicts_with = "poly")]
        function: Option<PathBuf>,
        #[arg(long)]
        poly: Option<String>,
    },
    /// Divided-power norm of sum a_i d^i.
    Dmn {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// JSON coefficient table of the a_i.
        #[arg(long)]
        coeffs: PathBuf,
    },
    /// Limit formula for the sum of logarithms.
    GroupAdd {
        #[command(flatten)]
        pair: PairInput,
        #[arg(long)]
        t_max: Option<u32>,
    },
    /// Limit formula for the bracket of logarithms.
    GroupBracket {
        #[command(flatten)]
        pair: PairInput,
        #[arg(long)]
        t_max: Option<u32>,
    },
    /// Truncated BCH of log x and log y against log(xy).
    Bch {
        #[command(flatten)]
        pair: PairInput,
    },
    /// Is [L, L] inside p^e L?
    PowerfulCheck {
        /// JSON array of basis matrices.
        #[arg(long, conflicts_with = "lattice")]
        basis: Option<PathBuf>,
        /// One of pM2, pM3, M2, heisenberg, sl2, diagonal3.
        #[arg(long)]
        lattice: Option<String>,
    },
    /// Lower p-series level of a group element.
    LpsLevel {
        #[arg(long)]
        x: PathBuf,
    },
    /// Coassociativity, counit, antipode and integrality of the coordinate group law.
    ComultCheck {
        #[arg(long, conflicts_with = "lattice")]
        structure: Option<PathBuf>,
        /// One of abelian:<d>, heisenberg, sl2.
        #[arg(long)]
        lattice: Option<String>,
        #[arg(long, default_value_t = 0)]
        scale: u32,
    },
    /// Run the acceptance suite.
    Acceptance {
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::BinomAudit { .. } => "binom-audit",
            Command::Mahler { .. } => "mahler",
            Command::Classify { .. } => "classify",
            Command::Amice { .. } => "amice",
            Command::Pair { .. } => "pair",
            Command::Dmn { .. } => "dmn",
            Command::GroupAdd { .. } => "group-add",
            Command::GroupBracket { .. } => "group-bracket",
            Command::Bch { .. } => "bch",
            Command::PowerfulCheck { .. } => "powerful-check",
            Command::LpsLevel { .. } => "lps-level",
            Command::ComultCheck { .. } => "comult-check",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn check_prime(cfg: &RunConfig, p: u64, what: &str) -> Result<()> {
    if p != cfg.ctx.p() as u64 {
        return Err(Failure::Parse(format!(
            "{what} is over p = {p} but -p is {}",
            cfg.ctx.p()
        )));
    }
    Ok(())
}

fn read_matrix(cfg: &RunConfig, path: &Path) -> Result<PadicMatrix> {
    let m: MatrixJson = read_json(path)?;
    check_prime(cfg, m.p, &path.display().to_string())?;
    Ok(m.to_matrix()?)
}

fn read_table(cfg: &RunConfig, path: &Path) -> Result<Vec<PadicScalar>> {
    let t: TableJson = read_json(path)?;
    check_prime(cfg, t.p, &path.display().to_string())?;
    Ok(t.to_scalars()?.1)
}

fn parse_poly(s: &str) -> Result<IntPoly> {
    Ok(s.parse::<IntPoly>()?)
}

fn function_table(cfg: &RunConfig, input: &FunctionInput) -> Result<FunctionTable> {
    match (&input.table, &input.poly) {
        (Some(path), None) => Ok(FunctionTable::new(cfg.ctx, read_table(cfg, path)?)?),
        (None, Some(p)) => Ok(FunctionTable::from_poly(
            cfg.ctx,
            &parse_poly(p)?,
            cfg.trunc,
            cfg.precision,
        )?),
        _ => Err(Failure::Parse("give exactly one of --table, --poly".into())),
    }
}

fn distribution(cfg: &RunConfig, input: &DistributionInput) -> Result<AmiceSeries> {
    match (input.dirac, input.derivative, &input.dist) {
        (Some(a), false, None) => Ok(amice::amice_of_dirac(cfg.ctx, a, cfg.trunc, cfg.precision)),
        (None, true, None) => Ok(amice::derivative_distribution(
            cfg.ctx,
            cfg.trunc,
            cfg.precision,
        )?),
        (None, false, Some(path)) => Ok(AmiceSeries::new(cfg.ctx, read_table(cfg, path)?)?),
        _ => Err(Failure::Parse(
            "give exactly one of --dirac, --derivative, --dist".into(),
        )),
    }
}

fn scalars_json(xs: &[PadicScalar]) -> Vec<ScalarJson> {
    xs.iter().map(ScalarJson::from_scalar).collect()
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| Failure::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Failure::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("utf8"))
}

fn coefficient_csv(xs: &[PadicScalar]) -> Result<String> {
    csv_text(
        &["k", "value", "valuation", "precision"],
        xs.iter().enumerate().map(|(k, x)| {
            let j = ScalarJson::from_scalar(x);
            vec![
                k.to_string(),
                j.value,
                j.valuation.unwrap_or_default(),
                j.precision.unwrap_or_default(),
            ]
        }),
    )
}

fn no_csv(cmd: &Command) -> Failure {
    Failure::Parse(format!(
        "{} has no CSV output; use --format json",
        cmd.name()
    ))
}

fn trace_json(trace: &ConvergenceTrace) -> Value {
    serde_json::to_value(trace).expect("serializable")
}

fn render(
    format: Format,
    cmd: &Command,
    json: Value,
    csv: Option<Result<String>>,
) -> Result<Output> {
    let text = match (format, csv) {
        (Format::Json, _) => to_json(&json),
        (Format::Csv, Some(c)) => c?,
        (Format::Csv, None) => return Err(no_csv(cmd)),
    };
    Ok(Output {
        text,
        criteria_failed: false,
    })
}

fn named_basis(cfg: &RunConfig, name: &str) -> Result<Vec<PadicMatrix>> {
    let (ctx, m) = (cfg.ctx, cfg.precision);
    Ok(match name {
        "pM2" => matrix_lattice_basis(ctx, 2, 1, m),
        "pM3" => matrix_lattice_basis(ctx, 3, 1, m),
        "M2" => matrix_lattice_basis(ctx, 2, 0, m),
        "heisenberg" => heisenberg_basis(ctx, m),
        "sl2" => scaled_sl2_basis(ctx, m),
        "diagonal3" => scaled_diagonal_basis(ctx, 3, m),
        other => return Err(Failure::Parse(format!("unknown lattice {other:?}"))),
    })
}

fn named_structure(cfg: &RunConfig, name: &str) -> Result<StructureConstants> {
    match name {
        "heisenberg" => Ok(StructureConstants::heisenberg(cfg.ctx)),
        "sl2" => Ok(StructureConstants::scaled_sl2(cfg.ctx)),
        other => match other.strip_prefix("abelian:").map(str::parse::<usize>) {
            Some(Ok(d)) if d > 0 => Ok(StructureConstants::abelian(cfg.ctx, d)),
            _ => Err(Failure::Parse(format!("unknown lattice {other:?}"))),
        },
    }
}

fn group_pair(cfg: &RunConfig, pair: &PairInput) -> Result<(GroupElement, GroupElement)> {
    let x = GroupElement::new(read_matrix(cfg, &pair.x)?)?;
    let y = GroupElement::new(read_matrix(cfg, &pair.y)?)?;
    Ok((x, y))
}

fn acceptance(reports: &[CriterionReport], format: Format) -> Result<Output> {
    let text = match format {
        Format::Json => to_json(&reports),
        Format::Csv => csv_text(
            &["id", "title", "passed", "summary", "elapsed_ms"],
            reports.iter().map(|r| {
                vec![
                    r.id.to_string(),
                    r.title.to_string(),
                    r.passed.to_string(),
                    r.summary.clone(),
                    r.elapsed_ms.to_string(),
                ]
            }),
        )?,
    };
    for r in reports {
        eprintln!("{}", r.line());
    }
    Ok(Output {
        text,
        criteria_failed: reports.iter().any(|r| !r.passed),
    })
}

pub fn run(cmd: &Command, cfg: &RunConfig, format: Option<Format>) -> Result<Output> {
    let default = if matches!(cmd, Command::BinomAudit { .. }) {
        Format::Csv
    } else {
        Format::Json
    };
    let format = format.unwrap_or(default);
    match cmd {
        Command::BinomAudit {
            level,
            kmax,
            kmin,
            depth,
        } => {
            let rows: Vec<AuditRow> = audit_sweep(
                &cfg.ctx,
                *level,
                *kmax,
                depth.unwrap_or(default_depth(*level)),
            )?
            .into_iter()
            .filter(|r| r.k >= *kmin)
            .collect();
            let text = match format {
                Format::Csv => audit_csv(&rows),
                Format::Json => to_json(&rows),
            };
            Ok(Output {
                text,
                criteria_failed: false,
            })
        }
        Command::Mahler { input } => {
            let series = mahler::mahler_coefficients(&function_table(cfg, input)?);
            let report = decay(&series)?;
            let json = json!({"coefficients": scalars_json(series.coeffs()), "decay": report});
            render(format, cmd, json, Some(coefficient_csv(series.coeffs())))
        }
        Command::Classify { input, level } => {
            let series = mahler::mahler_coefficients(&function_table(cfg, input)?);
            let report = mahler::decay_slope(&series, mahler::DEFAULT_WINDOW_FRACTION)?;
            let verdicts = classify_levels(&series, *level);
            let rows: Vec<Vec<String>> = verdicts
                .iter()
                .map(|(n, v)| vec![n.to_string(), v.clone()])
                .collect();
            let json = json!({
                "decay": report,
                "levels": verdicts.iter().map(|(n, v)| json!({"n": n, "member": v})).collect::<Vec<_>>(),
            });
            render(format, cmd, json, Some(csv_text(&["n", "member"], rows)))
        }
        Command::Amice { input, level } => {
            let lambda = distribution(cfg, input)?;
            let verdict = match level {
                Some(n) => {
                    let (member, slope) = amice::member_gn(&lambda, *n, None)?;
                    json!({"n": n, "member": member, "slope": slope})
                }
                None => Value::Null,
            };
            let json =
                json!({"coefficients": scalars_json(lambda.coeffs()), "overconvergence": verdict});
            render(format, cmd, json, Some(coefficient_csv(lambda.coeffs())))
        }
        Command::Pair {
            dist,
            function,
            poly,
        } => {
            let lambda = distribution(cfg, dist)?;
            let table = function_table(
                cfg,
                &FunctionInput {
                    table: function.clone(),
                    poly: poly.clone(),
                },
            )?;
            let value = amice::pair(&lambda, &mahler::mahler_coefficients(&table))?;
            let j = ScalarJson::from_scalar(&value);
            let csv = csv_text(
                &["value", "valuation", "precision"],
                [vec![
                    j.value.clone(),
                    j.valuation.clone().unwrap_or_default(),
                    j.precision.clone().unwrap_or_default(),
                ]],
            );
            render(
                format,
                cmd,
                serde_json::to_value(&j).expect("serializable"),
                Some(csv),
            )
        }
        Command::Dmn { m, n, coeffs } => {
            let a = read_table(cfg, coeffs)?;
            let report = amice::dmn_report(&a, *m, *n)?;
            let rows: Vec<Vec<String>> = report
                .b_valuations
                .iter()
                .enumerate()
                .map(|(i, b)| vec![i.to_string(), kval(b)])
                .collect();
            render(
                format,
                cmd,
                serde_json::to_value(&report).expect("serializable"),
                Some(csv_text(&["i", "b_valuation"], rows)),
            )
        }
        Command::GroupAdd { pair, t_max } | Command::GroupBracket { pair, t_max } => {
            let (x, y) = group_pair(cfg, pair)?;
            let t = t_max.unwrap_or(cfg.precision as u32);
            let (limit, trace) = if matches!(cmd, Command::GroupAdd { .. }) {
                limit_add(&x, &y, t)?
            } else {
                limit_bracket(&x, &y, t)?
            };
            let json = json!({"limit": MatrixJson::from_matrix(limit.matrix()), "trace": trace_json(&trace)});
            let rows = trace
                .discrepancy_valuations
                .iter()
                .enumerate()
                .map(|(t, d)| vec![t.to_string(), d.to_string()]);
            render(
                format,
                cmd,
                json,
                Some(csv_text(&["t", "discrepancy_valuation"], rows)),
            )
        }
        Command::Bch { pair } => {
            let (x, y) = group_pair(cfg, pair)?;
            let series = BchSeries::new(cfg.degree)?;
            let z = bch_with(&series, &x.log()?, &y.log()?)?;
            let discrepancy = group_law_check(&series, &x, &y)?;
            let json = json!({
                "degree": cfg.degree,
                "bch": MatrixJson::from_matrix(z.matrix()),
                "discrepancy_valuation": discrepancy,
            });
            render(format, cmd, json, None)
        }
        Command::PowerfulCheck { basis, lattice } => {
            let b = match (basis, lattice) {
                (Some(path), None) => {
                    let ms: Vec<MatrixJson> = read_json(path)?;
                    ms.iter()
                        .map(|m| {
                            check_prime(cfg, m.p, "basis matrix")?;
                            Ok(m.to_matrix()?)
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                (None, Some(name)) => named_basis(cfg, name)?,
                _ => {
                    return Err(Failure::Parse(
                        "give exactly one of --basis, --lattice".into(),
                    ))
                }
            };
            let report = powerful_check(cfg.ctx, &b)?;
            render(
                format,
                cmd,
                serde_json::to_value(&report).expect("serializable"),
                None,
            )
        }
        Command::LpsLevel { x } => {
            let g = GroupElement::new(read_matrix(cfg, x)?)?;
            let json = json!({
                "distance_to_identity": g.distance_to_identity(),
                "level": lower_p_series_level(&g),
            });
            render(format, cmd, json, None)
        }
        Command::ComultCheck {
            structure,
            lattice,
            scale,
        } => {
            let sc = match (structure, lattice) {
                (Some(path), None) => {
                    let s: StructureJson = read_json(path)?;
                    check_prime(cfg, s.p, &path.display().to_string())?;
                    s.to_constants()?
                }
                (None, Some(name)) => named_structure(cfg, name)?,
                _ => {
                    return Err(Failure::Parse(
                        "give exactly one of --structure, --lattice".into(),
                    ))
                }
            };
            let report = comult_report(&sc, cfg.degree as u32, *scale)?;
            let rows: Vec<Vec<String>> = report
                .coassociativity
                .iter()
                .enumerate()
                .map(|(j, v)| vec![j.to_string(), v.map_or("inf".into(), |v| v.to_string())])
                .collect();
            render(
                format,
                cmd,
                serde_json::to_value(&report).expect("serializable"),
                Some(csv_text(&["generator", "discrepancy_valuation"], rows)),
            )
        }
        Command::Acceptance { only } => {
            if let Some(bad) = only
                .iter()
                .find(|&&i| i == 0 || i as usize > CRITERIA.len())
            {
                return Err(Failure::Parse(format!("no criterion {bad}")));
            }
            let reports: Vec<CriterionReport> = CRITERIA
                .iter()
                .enumerate()
                .filter(|(i, _)| only.is_empty() || only.contains(&(*i as u8 + 1)))
                .map(|(_, c)| c(cfg.seed))
                .collect();
            acceptance(&reports, format)
        }
    }
}

/// The decay report, or `null` when the truncation is too short to have a tail.
fn decay(series: &MahlerSeries) -> Result<Value> {
    if series.truncation() < mahler::MIN_TAIL_TRUNCATION {
        return Ok(Value::Null);
    }
    let report = mahler::decay_slope(series, mahler::DEFAULT_WINDOW_FRACTION)?;
    Ok(serde_json::to_value(report).expect("serializable"))
}

fn kval(v: &KValuation) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Verdict per level; undecidable levels are reported as "indeterminate".
fn classify_levels(series: &MahlerSeries, level: u32) -> Vec<(u32, String)> {
    (0..=level)
        .map(|n| {
            let v = match mahler::member_fn(series, n, None) {
                Ok(b) => b.to_string(),
                Err(_) => "indeterminate".to_string(),
            };
            (n, v)
        })
        .collect()
}
