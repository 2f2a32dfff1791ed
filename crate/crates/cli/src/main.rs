//! `pcs`: enumeration scans, rank/unrank, encode/decode, PMEPR and BLER runs.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use pcs_core::channel::ChannelProfile;
use pcs_core::codec::{Codec, CodecConfig, Payload, DEFAULT_N_BEST, DEFAULT_N_MAX};
use pcs_core::construct::SeparationVector;
use pcs_core::enumerate::{code_card, rank_sep_dist, unrank_sep_dist, CardinalityTable, CodeCard};
use pcs_core::seq::{ComplexSeq, DEFAULT_OVERSAMPLE};
use pcs_core::sim::{bler_curve, ccdf, codeword_pmepr, random_qpsk_pmepr, StopRule};

use output::{write_object, write_table, Format, Table};

#[derive(Parser)]
#[command(
    name = "pcs",
    version,
    about = "Partitioned complementary sequence toolkit"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format of sweeps; single objects are always JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Code cardinalities over a grid of (M, m, l).
    Enumerate(GridArgs),
    /// Distance figures over a grid of (M, m, l).
    DminScan(GridArgs),
    /// Canonical 1-based rank of a separation vector.
    Rank(RankArgs),
    /// Separation vector of a 1-based rank.
    Unrank(UnrankArgs),
    /// Codeword of a payload.
    Encode(EncodeArgs),
    /// Payload detected from a received block.
    Decode(DecodeArgs),
    /// PMEPR distribution of random codewords.
    Pmepr(PmeprArgs),
    /// Block error rate over an Eb/N0 sweep.
    Bler(BlerArgs),
}

#[derive(Args)]
struct GridArgs {
    /// Subcarrier counts.
    #[arg(long = "M", value_delimiter = ',', required = true)]
    big_m: Vec<usize>,
    /// Numbers of variables.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    /// Distance levels (all `l < m` when absent).
    #[arg(long, value_delimiter = ',')]
    l: Option<Vec<usize>>,
    /// Alphabet size.
    #[arg(long = "H", default_value_t = 4)]
    h: u32,
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long = "M")]
    big_m: usize,
    #[arg(long)]
    m: usize,
    #[arg(long = "H", default_value_t = 4)]
    h: u32,
    #[arg(long, default_value_t = 0)]
    l: usize,
    /// Separation hypotheses kept after preparation.
    #[arg(long, default_value_t = DEFAULT_N_MAX)]
    nmax: usize,
    /// Survivors kept per combining level.
    #[arg(long, default_value_t = DEFAULT_N_BEST)]
    nbest: usize,
}

impl CodeArgs {
    fn codec(&self) -> Result<Codec> {
        let cfg = CodecConfig::new(self.big_m, self.m, self.h, self.l)?
            .with_budgets(self.nmax, self.nbest)?;
        Ok(Codec::new(cfg)?)
    }

    fn meta(&self, m: &mut Map<String, Value>) {
        for (k, v) in [
            ("M", json!(self.big_m)),
            ("m", json!(self.m)),
            ("H", json!(self.h)),
            ("l", json!(self.l)),
            ("nmax", json!(self.nmax)),
            ("nbest", json!(self.nbest)),
        ] {
            m.insert(k.into(), v);
        }
    }
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long = "M")]
    big_m: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    l: usize,
}

impl FamilyArgs {
    fn zeros(&self) -> Result<usize> {
        if self.m == 0 || self.m > 30 || self.big_m < 1 << self.m {
            bail!(pcs_core::Error::InvalidConfig(format!(
                "M = {} cannot hold 2^{} elements",
                self.big_m, self.m
            )));
        }
        Ok(self.big_m - (1 << self.m))
    }
}

#[derive(Args)]
struct RankArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Prefix offset `s'`.
    #[arg(long)]
    offset: usize,
    /// Cluster gaps `s^_1..s^_m`.
    #[arg(long, value_delimiter = ',', required = true)]
    gaps: Vec<usize>,
}

#[derive(Args)]
struct UnrankArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// 1-based rank (decimal).
    #[arg(long)]
    rank: String,
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Phase bits as hex (`k'` then `c_1..c_m`, MSB first).
    #[arg(long)]
    nonzero: String,
    /// Index bits as hex.
    #[arg(long)]
    index: String,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Received block as a sequence JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Channel gains as a sequence JSON file (unit gains when absent).
    #[arg(long)]
    gains: Option<PathBuf>,
}

#[derive(Args)]
struct PmeprArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Number of random codewords.
    #[arg(long, default_value_t = 10_000)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    oversample: usize,
    /// Measure uncoded random QPSK on all M subcarriers instead.
    #[arg(long)]
    qpsk_control: bool,
}

#[derive(Args)]
struct BlerArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Eb/N0 points in dB.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    ebn0: Vec<f64>,
    /// Trial limit per point.
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    /// A point stops once this many block errors occurred.
    #[arg(long, default_value_t = 200)]
    max_errors: usize,
    /// `flat`, `iid-rayleigh`, or a TOML/JSON profile file.
    #[arg(long, default_value = "flat")]
    profile: String,
}

fn base_meta(cli: &Cli, command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("pcs".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("command".into(), json!(command));
    m.insert("seed".into(), json!(cli.seed));
    m
}

fn card_row(c: &CodeCard) -> Vec<Value> {
    vec![
        json!(c.subcarriers),
        json!(c.m),
        json!(c.alphabet),
        json!(c.level),
        json!(c.zeros),
        json!(c.codewords.to_string()),
        json!(c.n_total),
        json!(c.n_supp),
        json!(c.n_nonzero),
        json!(c.info_bits),
        json!(c.rho),
        json!(c.d_lb),
        json!(c.d_nonzero),
        json!(c.d_min_bound()),
    ]
}

const CARD_COLUMNS: [&str; 14] = [
    "M",
    "m",
    "H",
    "l",
    "Z",
    "codewords",
    "n_total",
    "n_supp",
    "n_nonzero",
    "info_bits",
    "rho",
    "d_lb",
    "d_nonzero",
    "d_min",
];

fn grid(cli: &Cli, args: &GridArgs, command: &str) -> Result<()> {
    let mut table = Table::new(CARD_COLUMNS.to_vec());
    for &big_m in &args.big_m {
        for &m in &args.m {
            if m == 0 || m > 30 || big_m < 1 << m {
                continue;
            }
            let levels = args.l.clone().unwrap_or_else(|| (0..m).collect());
            for l in levels.into_iter().filter(|&l| l < m) {
                table.push(card_row(&code_card(big_m, m, args.h, l)?));
            }
        }
    }
    if table.rows.is_empty() {
        bail!(pcs_core::Error::InvalidConfig(
            "no feasible (M, m, l) combination in the grid".into()
        ));
    }
    let mut meta = base_meta(cli, command);
    meta.insert("H".into(), json!(args.h));
    write_table(&meta, &table, cli.format, cli.out.as_deref())
}

fn rank(cli: &Cli, a: &RankArgs) -> Result<()> {
    let f = &a.family;
    let z = f.zeros()?;
    let sep = SeparationVector::new(a.offset, a.gaps.clone());
    let t = CardinalityTable::new(f.m, z.max(1));
    let r = rank_sep_dist(&t, &sep, z, f.m, f.l)?;
    let count = t.d(f.m, f.l, z)?;
    write_object(
        &json!({ "separation": sep, "rank": r.to_string(), "count": count.to_string() }),
        cli.out.as_deref(),
    )
}

fn unrank(cli: &Cli, a: &UnrankArgs) -> Result<()> {
    let f = &a.family;
    let z = f.zeros()?;
    let n: BigUint = a.rank.parse().map_err(|_| {
        pcs_core::Error::InvalidParams(format!("rank {:?} is not a decimal integer", a.rank))
    })?;
    let t = CardinalityTable::new(f.m, z.max(1));
    let sep = unrank_sep_dist(&t, &n, z, f.m, f.l)?;
    let (s, d) = pcs_core::construct::shifts_from_separations(&sep);
    write_object(
        &json!({ "rank": n.to_string(), "separation": sep, "shifts": s, "prepad": d }),
        cli.out.as_deref(),
    )
}

fn payload_json(p: &Payload) -> Value {
    let (nz, idx) = p.to_hex();
    json!({ "nonzero": nz, "index": idx, "bits": p.len() })
}

fn encode(cli: &Cli, a: &EncodeArgs) -> Result<()> {
    let codec = a.code.codec()?;
    let payload = Payload::from_hex(&codec, &a.nonzero, &a.index)?;
    let (params, seq) = codec.encode(&payload)?;
    write_object(
        &json!({ "payload": payload_json(&payload), "params": params, "sequence": seq }),
        cli.out.as_deref(),
    )
}

fn read_seq(path: &Path) -> Result<ComplexSeq> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text)
        .map_err(|e| pcs_core::Error::InvalidParams(format!("{}: {e}", path.display())).into())
}

fn decode(cli: &Cli, a: &DecodeArgs) -> Result<()> {
    let codec = a.code.codec()?;
    let y = read_seq(&a.input)?;
    let gains = match &a.gains {
        Some(p) => read_seq(p)?.into_elements(),
        None => vec![Complex64::new(1.0, 0.0); y.len()],
    };
    let det = codec.detect(y.elements(), &gains)?;
    let payload = codec.payload_of(&det.params)?;
    write_object(
        &json!({
            "payload": payload_json(&payload),
            "params": det.params,
            "separation_rank": det.separation_rank + 1,
            "metric": det.metric,
        }),
        cli.out.as_deref(),
    )
}

fn pmepr(cli: &Cli, a: &PmeprArgs) -> Result<()> {
    if a.count == 0 {
        bail!(pcs_core::Error::InvalidParams("count must be >= 1".into()));
    }
    let samples = if a.qpsk_control {
        random_qpsk_pmepr(a.code.big_m, a.count, cli.seed, a.oversample)?
    } else {
        codeword_pmepr(&a.code.codec()?, a.count, cli.seed, a.oversample)?
    };
    let mut table = Table::new(vec!["pmepr_db", "ccdf"]);
    for (x, p) in ccdf(&samples) {
        table.push(vec![json!(x), json!(p)]);
    }
    let mut meta = base_meta(cli, "pmepr");
    a.code.meta(&mut meta);
    meta.insert("count".into(), json!(a.count));
    meta.insert("oversample".into(), json!(a.oversample));
    meta.insert(
        "source".into(),
        json!(if a.qpsk_control {
            "random-qpsk"
        } else {
            "codewords"
        }),
    );
    write_table(&meta, &table, cli.format, cli.out.as_deref())
}

fn load_profile(spec: &str) -> Result<ChannelProfile> {
    match spec {
        "flat" => return Ok(ChannelProfile::Flat),
        "iid-rayleigh" => return Ok(ChannelProfile::IidRayleigh),
        _ => {}
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| pcs_core::Error::Profile(format!("cannot read {spec}: {e}")))?;
    let profile: ChannelProfile = if spec.ends_with(".toml") {
        toml::from_str(&text).map_err(|e| pcs_core::Error::Profile(e.to_string()))?
    } else {
        serde_json::from_str(&text).map_err(|e| pcs_core::Error::Profile(e.to_string()))?
    };
    profile.validate()?;
    Ok(profile)
}

fn bler(cli: &Cli, a: &BlerArgs) -> Result<()> {
    let codec = a.code.codec()?;
    let profile = load_profile(&a.profile)?;
    let stop = StopRule {
        max_trials: a.trials,
        max_errors: a.max_errors,
    };
    let points = bler_curve(&codec, &profile, &a.ebn0, stop, cli.seed)?;
    let mut table = Table::new(vec!["ebn0_db", "n0", "trials", "block_errors", "bler"]);
    for p in points {
        table.push(vec![
            json!(p.ebn0_db),
            json!(p.n0),
            json!(p.trials),
            json!(p.block_errors),
            json!(p.bler),
        ]);
    }
    let mut meta = base_meta(cli, "bler");
    a.code.meta(&mut meta);
    meta.insert("bits".into(), json!(codec.n_bits()));
    meta.insert("profile".into(), json!(a.profile));
    meta.insert("trials".into(), json!(a.trials));
    meta.insert("max_errors".into(), json!(a.max_errors));
    write_table(&meta, &table, cli.format, cli.out.as_deref())
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Enumerate(a) => grid(cli, a, "enumerate"),
        Command::DminScan(a) => grid(cli, a, "dmin-scan"),
        Command::Rank(a) => rank(cli, a),
        Command::Unrank(a) => unrank(cli, a),
        Command::Encode(a) => encode(cli, a),
        Command::Decode(a) => decode(cli, a),
        Command::Pmepr(a) => pmepr(cli, a),
        Command::Bler(a) => bler(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<pcs_core::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
