use decoupler_core::channels::ChannelJson;
use decoupler_core::decoupling::{run_experiment, DecouplingExperiment, DecouplingReport};
use decoupler_core::entropy::{hmax, tilde_h2_cond, tilde_hmax_delta, EntropyReport};
use decoupler_core::qmac::{
    control_state, ent_gen_region, rate_region, ControlState, EntGenRegion, RateRegion,
};
use decoupler_core::random::{random_hermitian, seeded_rng};
use decoupler_core::twirl::{bit_label, monte_carlo_twirl, swap_pullback, twirl2_tensor};
use decoupler_core::{MultipartiteOperator, SystemLabel};
use serde::Serialize;

use crate::builtins::{self, build_channel, build_control, build_state, sender_labels, CatalogEntry};
use crate::config::{ExperimentConfig, Mode};
use crate::error::{at, CliError, CliResult};

/// Output file name and contents.
pub type Artifact = (String, String);

/// Files to write and text for standard output.
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub listing: Option<String>,
}

#[derive(Debug, Serialize)]
struct SystemInfo {
    name: String,
    dim: usize,
}

fn systems_info(s: &[SystemLabel]) -> Vec<SystemInfo> {
    s.iter()
        .map(|l| SystemInfo {
            name: l.name().to_owned(),
            dim: l.dim(),
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct Alpha {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct TwirlCheck {
    source: &'static str,
    norm: f64,
    mc_error: f64,
    tolerance: f64,
    pass: bool,
    alphas: Vec<Alpha>,
}

#[derive(Debug, Serialize)]
struct TwirlCheckReport {
    mode: &'static str,
    dims: Vec<usize>,
    samples: usize,
    seed: u64,
    pass: bool,
    checks: Vec<TwirlCheck>,
}

#[derive(Debug, Serialize)]
struct DecoupleReport {
    mode: &'static str,
    channel: ChannelJson,
    systems: Vec<SystemInfo>,
    #[serde(flatten)]
    result: DecouplingReport,
}

#[derive(Debug, Serialize)]
struct RegionReport {
    mode: &'static str,
    delta: f64,
    e_a: f64,
    e_b: f64,
    control: Vec<SystemInfo>,
    channel: ChannelJson,
    #[serde(flatten)]
    region: RateRegion,
}

#[derive(Debug, Serialize)]
struct EntGenReport {
    mode: &'static str,
    delta: f64,
    control: Vec<SystemInfo>,
    channel: ChannelJson,
    #[serde(flatten)]
    region: EntGenRegion,
}

#[derive(Debug, Serialize)]
struct EntropyModeReport {
    mode: &'static str,
    delta: f64,
    systems: Vec<SystemInfo>,
    cond: Vec<String>,
    h2: EntropyReport,
    hmax_delta: f64,
    hmax: f64,
}

#[derive(Debug, Serialize)]
struct CatalogReport {
    mode: &'static str,
    entries: Vec<CatalogEntry>,
}

fn json<T: Serialize>(mode: Mode, report: &T) -> CliResult<Artifact> {
    let mut s =
        serde_json::to_string_pretty(report).map_err(|e| CliError::invalid(format!("report: {e}")))?;
    s.push('\n');
    Ok((format!("{}.json", mode.name()), s))
}

pub fn run(mode: Mode, cfg: &ExperimentConfig) -> CliResult<Outcome> {
    cfg.validate(mode)?;
    let artifacts = match mode {
        Mode::TwirlCheck => twirl_check(cfg)?,
        Mode::Decouple => decouple(cfg)?,
        Mode::RateRegion => region(cfg, false)?,
        Mode::EntGen => region(cfg, true)?,
        Mode::Entropy => entropy(cfg)?,
        Mode::Catalog => {
            let entries = builtins::catalog(&cfg.sender_dims()?)?;
            let listing = entries
                .iter()
                .map(|e| {
                    let (extra, count) = match e.kind {
                        "channel" => ("output", "kraus"),
                        _ => ("reference", "rank"),
                    };
                    format!(
                        "{:<8}{:<28}{extra}={} {count}={}\n",
                        e.kind, e.label, e.extra_dim, e.count
                    )
                })
                .collect();
            let report = CatalogReport {
                mode: mode.name(),
                entries,
            };
            return Ok(Outcome {
                artifacts: vec![json(mode, &report)?],
                listing: Some(listing),
            });
        }
    };
    Ok(Outcome {
        artifacts,
        listing: None,
    })
}

fn twirl_check(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let (samples, seed) = (cfg.samples.expect("validated"), cfg.seed.expect("validated"));
    let dims = cfg.sender_dims()?;
    let senders = sender_labels("A", &dims)?;
    let mut ops: Vec<(&'static str, MultipartiteOperator, Vec<(String, String)>)> = Vec::new();
    if let Some(spec) = &cfg.channel {
        if cfg.operators.is_some() {
            return Err(CliError::invalid("operators: not used when a channel is given"));
        }
        let ch = build_channel(spec, senders, "E")?;
        let (m, pairs) = swap_pullback(&ch).map_err(at("channel"))?;
        ops.push(("channel-swap-pullback", m, pairs));
    } else {
        let mut layout = Vec::new();
        let mut pairs = Vec::new();
        for s in &senders {
            layout.push(s.clone());
            layout.push(s.primed());
            pairs.push((s.name().to_owned(), s.primed().name().to_owned()));
        }
        let d: usize = layout.iter().map(SystemLabel::dim).product();
        let mut rng = seeded_rng(seed);
        for _ in 0..cfg.operators.unwrap_or(1) {
            let m = MultipartiteOperator::new(layout.clone(), random_hermitian(d, &mut rng))
                .map_err(at("dims"))?;
            ops.push(("random-hermitian", m, pairs.clone()));
        }
    }
    let k = dims.len();
    let mut checks = Vec::new();
    for (i, (source, m, pairs)) in ops.iter().enumerate() {
        let exact = twirl2_tensor(m, pairs).map_err(at("dims"))?;
        let mc = monte_carlo_twirl(m, pairs, samples, seed.wrapping_add(i as u64)).map_err(at("samples"))?;
        let mc_error = mc.sub(&exact.reconstructed).map_err(at("dims"))?.matrix().norm();
        let norm = m.matrix().norm();
        let tolerance = 6.0 * norm / (samples as f64).sqrt();
        checks.push(TwirlCheck {
            source,
            norm,
            mc_error,
            tolerance,
            pass: mc_error <= tolerance,
            alphas: exact
                .alphas
                .iter()
                .enumerate()
                .map(|(a, z)| Alpha {
                    bits: bit_label(a, k),
                    re: z.re,
                    im: z.im,
                })
                .collect(),
        });
    }
    let report = TwirlCheckReport {
        mode: Mode::TwirlCheck.name(),
        dims,
        samples,
        seed,
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    Ok(vec![json(Mode::TwirlCheck, &report)?])
}

fn decouple(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let dims = cfg.sender_dims()?;
    let senders = sender_labels("A", &dims)?;
    let ch = build_channel(cfg.channel.as_ref().expect("validated"), senders.clone(), "E")?;
    let rho = build_state(cfg.state.as_ref().expect("validated"), &senders)?;
    let systems = systems_info(rho.systems());
    let exp = DecouplingExperiment::new(
        ch,
        rho,
        cfg.delta.expect("validated"),
        cfg.samples.expect("validated"),
        cfg.seed.expect("validated"),
    )
    .map_err(at("state"))?;
    let result = run_experiment(&exp).map_err(at("delta"))?;
    let report = DecoupleReport {
        mode: Mode::Decouple.name(),
        channel: ChannelJson::from_channel(&exp.channel),
        systems,
        result,
    };
    Ok(vec![json(Mode::Decouple, &report)?])
}

fn qmac_control(cfg: &ExperimentConfig) -> CliResult<ControlState> {
    let dims = cfg.sender_dims()?;
    let a = SystemLabel::try_new("A'", dims[0]).map_err(at("dims"))?;
    let b = SystemLabel::try_new("B'", dims[1]).map_err(at("dims"))?;
    let ch = build_channel(
        cfg.channel.as_ref().expect("validated"),
        vec![a.clone(), b.clone()],
        "C",
    )?;
    let omega = build_control(cfg.control.as_ref(), &a, "A''", 0)?;
    let delta = build_control(cfg.control.as_ref(), &b, "B''", 1)?;
    control_state(&ch, &omega, &delta).map_err(at("channel"))
}

fn region(cfg: &ExperimentConfig, ent_gen: bool) -> CliResult<Vec<Artifact>> {
    let cs = qmac_control(cfg)?;
    let delta = cfg.delta.expect("validated");
    let control = systems_info(&[cs.a2().clone(), cs.b2().clone()]);
    let channel = ChannelJson::from_channel(&cs.channel);
    let (mode, csv, report) = if ent_gen {
        let region = ent_gen_region(&cs, delta, cfg.epsilon.expect("validated")).map_err(at("delta"))?;
        let csv = region.region.vertices_csv();
        let report = EntGenReport {
            mode: Mode::EntGen.name(),
            delta,
            control,
            channel,
            region,
        };
        (Mode::EntGen, csv, json(Mode::EntGen, &report)?)
    } else {
        let (e_a, e_b) = (cfg.e_a.unwrap_or(0.0), cfg.e_b.unwrap_or(0.0));
        let region = rate_region(&cs, delta, e_a, e_b).map_err(at("delta"))?;
        let csv = region.vertices_csv();
        let report = RegionReport {
            mode: Mode::RateRegion.name(),
            delta,
            e_a,
            e_b,
            control,
            channel,
            region,
        };
        (Mode::RateRegion, csv, json(Mode::RateRegion, &report)?)
    };
    Ok(vec![report, (format!("{}.csv", mode.name()), csv)])
}

fn entropy(cfg: &ExperimentConfig) -> CliResult<Vec<Artifact>> {
    let dims = cfg.sender_dims()?;
    let senders = sender_labels("A", &dims)?;
    let rho = build_state(cfg.state.as_ref().expect("validated"), &senders)?;
    let delta = cfg.delta.expect("validated");
    let cond = match &cfg.cond {
        Some(c) => c.clone(),
        None => rho
            .names()
            .into_iter()
            .filter(|n| !senders.iter().any(|s| s.name() == *n))
            .map(str::to_owned)
            .collect(),
    };
    let h2 = tilde_h2_cond(&rho, &cond, delta).map_err(at("cond"))?;
    let report = EntropyModeReport {
        mode: Mode::Entropy.name(),
        delta,
        systems: systems_info(rho.systems()),
        h2,
        hmax_delta: tilde_hmax_delta(&rho, delta).map_err(at("delta"))?,
        hmax: hmax(&rho).map_err(at("state"))?,
        cond,
    };
    Ok(vec![json(Mode::Entropy, &report)?])
}
