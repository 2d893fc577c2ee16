use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use qog::enumerate::{survey, WeakOrders, DEFAULT_CAP};
use qog::field::{
    check_field_order_samples, classical_bk, epsilon_from_eta, evaluation_sign, random_corpus, sign_under,
    FieldOrderTag, QSection, RatFunc,
};
use qog::formats::{load_family, load_order, load_qo, load_valuation, read_json, FamilyFile, OrderFile, QoFile, ValuationFile};
use qog::groups::{Carrier, GroupElement, Subgroup};
use qog::orders::{check_order, cone_from_qo, omega, omega_preimage, order_from_cone};
use qog::qo::{check_axiom, classify, passes, AxiomId, QuasiOrder};
use qog::quotient::{
    all_c_families, bk_roundtrip, coarsening_decompose, induce_family, induce_on_quotient, lift_family,
    QoFamily, RoundTrip, Side,
};
use qog::report::RunReport;
use qog::valuation::{chain_valuations, check_v_compatible, check_valuation, valuational_qo, Valuation};

#[derive(Parser)]
#[command(name = "qog", version, about = "Verification workbench for quasi-ordered and valued abelian groups")]
struct Cli {
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupArg {
    /// Group spec such as `Z/4`, `Z/2xZ/2` or `Z^2[B=6]`.
    #[arg(long)]
    group: String,
}

#[derive(Subcommand)]
enum Command {
    /// Check axioms of a quasi-order, and optionally a valuation against it.
    Check {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        qo: PathBuf,
        /// Comma-separated axiom groups: TOTAL, Q1, Q2, STAR, C.
        #[arg(long, default_value = "TOTAL,Q1,Q2,STAR,C")]
        axioms: String,
        #[arg(long)]
        valuation: Option<PathBuf>,
    },
    /// Census of all total quasi-orders on a finite group.
    Enumerate {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated axiom filters, applied in order.
        #[arg(long, default_value = "C")]
        filter: String,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Induce a quasi-order on a quotient, or on every level of a valuation.
    Induce {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        qo: PathBuf,
        /// Generators separated by `;`, e.g. `(2)`, or `mask:01` for a
        /// coordinate subgroup.
        #[arg(long, conflicts_with = "valuation", required_unless_present = "valuation")]
        subgroup: Option<String>,
        #[arg(long)]
        valuation: Option<PathBuf>,
    },
    /// Lift a family of quasi-orders on the level quotients.
    Lift {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        family: PathBuf,
    },
    /// Round trips between C-q.o.s and families of C-q.o.s.
    BkVerify {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        valuation: PathBuf,
        #[arg(long, group = "side")]
        family: Option<PathBuf>,
        #[arg(long, group = "side")]
        qo: Option<PathBuf>,
        #[arg(long, group = "side")]
        all_families: bool,
    },
    /// Decompose a valuation `w` along a coarsening `v`.
    Coarsen {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// The map from C-q.o.s to orders and its right inverse.
    Omega {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long, conflicts_with = "order", required_unless_present = "order")]
        qo: Option<PathBuf>,
        #[arg(long)]
        order: Option<PathBuf>,
    },
    /// Compatible orders on Q(t) with the t-adic valuation.
    FieldDemo {
        /// Seed of the random sample corpus.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// JSON list of rational function literals, used instead of a
        /// random corpus.
        #[arg(long, conflicts_with = "seed")]
        corpus: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command: Vec<String> = std::env::args().skip(1).collect();
    let mut report = RunReport::new(command);
    if let Err(e) = run(cli.command, &mut report) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    // A closed pipe (e.g. `| head`) is not an error worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{report}");
    if let Some(path) = cli.json {
        if let Err(e) = report.write_json(&path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read<T: DeserializeOwned>(report: &mut RunReport, path: &Path) -> Result<T> {
    let (value, digest) = read_json(path)?;
    report.input(path, digest);
    Ok(value)
}

fn carrier(g: &GroupArg) -> Result<Arc<Carrier>> {
    Carrier::parse(&g.group).with_context(|| format!("bad group spec {:?}", g.group))
}

fn axiom_list(s: &str) -> Result<Vec<AxiomId>> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| p.parse().map_err(anyhow::Error::msg)).collect()
}

fn read_qo(report: &mut RunReport, c: &Arc<Carrier>, path: &Path) -> Result<QuasiOrder> {
    let file: QoFile = read(report, path)?;
    load_qo(&file, c).with_context(|| format!("invalid quasi-order in {}", path.display()))
}

fn read_valuation(report: &mut RunReport, c: &Arc<Carrier>, path: &Path) -> Result<Valuation> {
    let file: ValuationFile = read(report, path)?;
    load_valuation(&file, c).with_context(|| format!("invalid valuation in {}", path.display()))
}

fn read_family(report: &mut RunReport, c: &Arc<Carrier>, path: &Path) -> Result<QoFamily> {
    let file: FamilyFile = read(report, path)?;
    load_family(&file, c).with_context(|| format!("invalid family in {}", path.display()))
}

fn parse_subgroup(c: &Carrier, s: &str) -> Result<Subgroup> {
    if let Some(mask) = s.strip_prefix("mask:") {
        let bits = mask
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => bail!("mask digits must be 0 or 1"),
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok(Subgroup::coordinate(c, &bits)?);
    }
    let gens = s
        .split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| Ok(c.lookup(&p.parse::<GroupElement>()?)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Subgroup::closure(c, &gens)?)
}

fn family_detail(fam: &QoFamily) -> Vec<String> {
    fam.levels().iter().zip(fam.members()).map(|(l, m)| format!("{}: {m}", l.label)).collect()
}

fn record_roundtrip(report: &mut RunReport, prefix: &str, rt: &RoundTrip) {
    for l in &rt.levels {
        let w = l.difference.as_ref().map(|(a, b)| format!("first difference at ({a}, {b})"));
        report.check(format!("{prefix}level {} restored", l.label), l.equal, w);
    }
    if rt.direction.starts_with("quasi") {
        let w = rt.qo_difference.as_ref().map(|(a, b)| format!("first difference at ({a}, {b})"));
        report.check(format!("{prefix}lift of induced family equals input"), w.is_none(), w);
    }
    report.check(format!("{prefix}lifted relation is a C-q.o."), rt.lifted_is_cqo, None);
    report.check(format!("{prefix}type transfer"), rt.type_transfer, None);
}

fn run(command: Command, report: &mut RunReport) -> Result<()> {
    match command {
        Command::Check { group, qo, axioms, valuation } => {
            let c = carrier(&group)?;
            let q = read_qo(report, &c, &qo)?;
            for axiom in axiom_list(&axioms)? {
                report.verdict(format!("axiom {axiom}"), &check_axiom(&q, axiom));
            }
            report.detail("classes", q.to_string());
            report.detail("type", classify(&q));
            if let Some(path) = valuation {
                let v = read_valuation(report, &c, &path)?;
                report.verdict("valuation axioms", &check_valuation(&v));
                report.verdict("valuation compatible", &check_v_compatible(&v, &q));
            }
        }
        Command::Enumerate { group, filter, cap } => {
            let c = carrier(&group)?;
            let filters = axiom_list(&filter)?;
            let census = survey(&c, &filters, cap)?;
            if filters == [AxiomId::CAxioms] {
                let chains = chain_valuations(&c)?;
                let mut first = None;
                for v in &chains {
                    let q = valuational_qo(v)?;
                    if let Some(w) = check_axiom(&q, AxiomId::CAxioms).witness {
                        first.get_or_insert(format!("valuational q.o. {q}: {w}"));
                    }
                }
                report.check("every valuational q.o. passes C_AXIOMS", first.is_none(), first);
                report.detail("chain valuations", chains.len());
                report.detail("strict inclusion", census.row.passes > census.row.valuational);
            }
            report.detail("census", &census.row);
            report.detail("witnesses", &census.witnesses);
        }
        Command::Induce { group, qo, subgroup, valuation } => {
            let c = carrier(&group)?;
            let q = read_qo(report, &c, &qo)?;
            if let Some(spec) = subgroup {
                let h = parse_subgroup(&c, &spec).with_context(|| format!("bad subgroup {spec:?}"))?;
                report.detail("subgroup", h.describe(&c));
                match induce_on_quotient(&q, &c.quotient(&h)) {
                    Ok(ind) => {
                        report.check("induce on quotient", true, None);
                        report.detail("induced", ind.to_string());
                    }
                    Err(e) => report.check("induce on quotient", false, Some(e.to_string())),
                }
            } else if let Some(path) = valuation {
                let v = read_valuation(report, &c, &path)?;
                match induce_family(&q, &v) {
                    Ok(fam) => {
                        report.check("induce on every level", true, None);
                        report.detail("family", family_detail(&fam));
                    }
                    Err(e) => report.check("induce on every level", false, Some(e.to_string())),
                }
            }
        }
        Command::Lift { group, family } => {
            let c = carrier(&group)?;
            let fam = read_family(report, &c, &family)?;
            match lift_family(&fam) {
                Ok(lifted) => {
                    report.check("lift is a quasi-order", true, None);
                    report.verdict("lift compatible with v", &check_v_compatible(fam.valuation(), &lifted));
                    match induce_family(&lifted, fam.valuation()) {
                        Ok(back) => {
                            let d = fam.first_difference(&back).map(|(gamma, i, j)| {
                                let lc = fam.levels()[gamma].carrier();
                                format!(
                                    "level {}: ({}, {})",
                                    fam.levels()[gamma].label,
                                    lc.element(i),
                                    lc.element(j)
                                )
                            });
                            report.check("inducing the lift restores the family", d.is_none(), d);
                        }
                        Err(e) => report.check("inducing the lift restores the family", false, Some(e.to_string())),
                    }
                    report.detail("lifted", lifted.to_string());
                    report.detail("lifted is C-q.o.", passes(&lifted, &[AxiomId::CAxioms]));
                }
                Err(e) => report.check("lift is a quasi-order", false, Some(e.to_string())),
            }
        }
        Command::BkVerify { group, valuation, family, qo, all_families } => {
            let c = carrier(&group)?;
            let v = read_valuation(report, &c, &valuation)?;
            if let Some(path) = family {
                let fam = read_family(report, &c, &path)?;
                match bk_roundtrip(&v, Side::FromFamily(&fam)) {
                    Ok(rt) => record_roundtrip(report, "", &rt),
                    Err(e) => report.check("round trip", false, Some(e.to_string())),
                }
            } else if let Some(path) = qo {
                let q = read_qo(report, &c, &path)?;
                match bk_roundtrip(&v, Side::FromQo(&q)) {
                    Ok(rt) => record_roundtrip(report, "", &rt),
                    Err(e) => report.check("round trip", false, Some(e.to_string())),
                }
            } else if all_families {
                let families = all_c_families(&v)?;
                for (k, fam) in families.iter().enumerate() {
                    match bk_roundtrip(&v, Side::FromFamily(fam)) {
                        Ok(rt) => record_roundtrip(report, &format!("family {k}: "), &rt),
                        Err(e) => report.check(format!("family {k}: round trip"), false, Some(e.to_string())),
                    }
                }
                report.detail("family count", families.len());
                if !c.is_windowed() && c.len() <= DEFAULT_CAP {
                    let oracle = WeakOrders::of(&c)?
                        .map(|wo| wo.to_qo(&c))
                        .filter(|q| passes(q, &[AxiomId::CAxioms]) && check_v_compatible(&v, q).passed())
                        .count();
                    report.check(
                        "family count equals compatible C-q.o. count",
                        oracle == families.len(),
                        (oracle != families.len()).then(|| format!("{oracle} compatible C-q.o.s")),
                    );
                }
            } else {
                bail!("bk-verify needs one of --family, --qo or --all-families");
            }
        }
        Command::Coarsen { group, v, w } => {
            let c = carrier(&group)?;
            let v = read_valuation(report, &c, &v)?;
            let w = read_valuation(report, &c, &w)?;
            match coarsening_decompose(&v, &w) {
                Ok(dec) => {
                    for (level, verdict) in dec.levels.iter().zip(&dec.member_verdicts) {
                        report.verdict(format!("w_{} is a valuation", level.label), verdict);
                    }
                    let d = dec.reconstruction.as_ref().map(|(a, b)| format!("first difference at ({a}, {b})"));
                    report.check("lifting the w_γ recovers w", d.is_none(), d);
                    let tables: Vec<String> = dec
                        .levels
                        .iter()
                        .zip(&dec.members)
                        .map(|(l, m)| {
                            let lc = l.carrier();
                            let entries: Vec<String> =
                                (0..lc.len()).map(|i| format!("{}→{}", lc.element(i), m.label(m.value(i)))).collect();
                            format!("{}: {}", l.label, entries.join(" "))
                        })
                        .collect();
                    report.detail("members", tables);
                }
                Err(e) => report.check("decomposition", false, Some(e.to_string())),
            }
        }
        Command::Omega { group, qo, order } => {
            let c = carrier(&group)?;
            if let Some(path) = qo {
                let q = read_qo(report, &c, &path)?;
                match omega(&q) {
                    Ok(ord) => {
                        report.check("cone of the quasi-order", true, None);
                        report.detail("order", ord.spec());
                        for (name, verdict) in check_order(&ord, None)? {
                            report.verdict(format!("order {name}"), &verdict);
                        }
                    }
                    Err(e) => report.check("cone of the quasi-order", false, Some(e.to_string())),
                }
            } else if let Some(path) = order {
                let file: OrderFile = read(report, &path)?;
                let ord = load_order(&file, &c).with_context(|| format!("invalid order in {}", path.display()))?;
                let pre = omega_preimage(&ord)?;
                report.verdict("preimage passes C_AXIOMS", &check_axiom(&pre, AxiomId::CAxioms));
                report.check("preimage is all o-type", classify(&pre).all_o, None);
                match cone_from_qo(&pre).map_err(anyhow::Error::from).and_then(|p| Ok(order_from_cone(p)?)) {
                    Ok(back) => report.check("Ω of the preimage is the order", back == ord, None),
                    Err(e) => report.check("Ω of the preimage is the order", false, Some(e.to_string())),
                }
                report.detail("order", ord.spec());
                report.detail("preimage", pre.to_string());
            }
        }
        Command::FieldDemo { seed, count, corpus } => {
            let corpus: Vec<RatFunc> = match corpus {
                Some(path) => read(report, &path)?,
                None => {
                    report.seed = Some(seed);
                    random_corpus(seed, count)
                }
            };
            report.detail("corpus size", corpus.len());
            let bk = classical_bk(&corpus);
            report.check("exactly two compatible orders, recovered by the sign of t", bk.passed(), None);
            report.detail("count", bk.count);
            report.detail("candidates", &bk.candidates);
            for tag in FieldOrderTag::ALL {
                let mismatch = corpus
                    .iter()
                    .find(|f| evaluation_sign(f, tag.eta) != Some(sign_under(f, tag)))
                    .map(|f| f.to_string());
                report.check(format!("η={:+}: agrees with evaluation near 0", tag.eta), mismatch.is_none(), mismatch);
                let samples = check_field_order_samples(|f| sign_under(f, tag), &corpus);
                for chk in &samples.checks {
                    let w = chk.witness.as_ref().map(|(f, g)| format!("({f}, {g})"));
                    report.check(format!("η={:+}: {}", tag.eta, chk.rule), w.is_none(), w);
                }
            }
            let probes: Vec<i64> = (-6..=6).collect();
            let qs = QSection.check(&probes);
            report.check("q-section axioms", qs.is_none(), qs.map(|(m, n)| format!("({m}, {n})")));
            for eta in [1i8, -1] {
                let hom = epsilon_from_eta(1, &[eta])?;
                let w = hom.check_multiplicative(8).map(|(g, h)| format!("({g:?}, {h:?})"));
                report.check(format!("ε from η={eta:+} is multiplicative"), w.is_none(), w);
            }
        }
    }
    Ok(())
}

