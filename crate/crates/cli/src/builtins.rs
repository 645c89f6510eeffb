use decoupler_core::channels::{self, ChannelJson, QuantumChannel};
use decoupler_core::random::{random_density, random_pure, seeded_rng, stream_rng};
use decoupler_core::tensor::max_entangled;
use decoupler_core::{MultipartiteOperator, PureState, SystemLabel, C64};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{at, CliError, CliResult};

pub const CHANNELS: &[&str] = &["identity", "depolarizing", "dephasing", "erasure", "random"];
pub const STATES: &[&str] = &["max-entangled", "maximally-mixed", "ghz-like", "random"];
pub const CONTROLS: &[&str] = &["max-entangled", "random"];

/// Name of the reference system of builtin states.
pub const REFERENCE: &str = "R";

fn canonical(name: &str) -> &str {
    match name {
        "erasure-to-E" | "erasure-to-e" => "erasure",
        "maximally mixed" | "max-mixed" => "maximally-mixed",
        "ghz" => "ghz-like",
        other => other,
    }
}

fn unknown(field: &str, name: &str, known: &[&str]) -> CliError {
    let mut close: Vec<(f64, &str)> = known
        .iter()
        .map(|k| (strsim::normalized_damerau_levenshtein(name, k), *k))
        .filter(|(s, _)| *s >= 0.5)
        .collect();
    close.sort_by(|a, b| b.0.total_cmp(&a.0));
    let hint = match close.first() {
        Some((_, k)) => format!("; did you mean `{k}`?"),
        None => String::new(),
    };
    CliError::invalid(format!(
        "{field}: unknown builtin `{name}`{hint} (known: {})",
        known.join(", ")
    ))
}

/// A builtin reference with its parameters.
#[derive(Debug, Clone)]
struct Named {
    name: String,
    params: Map<String, Value>,
}

impl Named {
    fn check_params(&self, field: &str, allowed: &[&str]) -> CliResult<()> {
        for key in self.params.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::invalid(format!(
                    "{field}.{key}: not a parameter of `{}` (expected one of: {})",
                    self.name,
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn uint(&self, field: &str, key: &str, default: u64) -> CliResult<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| {
                CliError::invalid(format!("{field}.{key}: expected a non-negative integer, got {v}"))
            }),
        }
    }

    fn dim(&self, field: &str, key: &str, default: usize) -> CliResult<usize> {
        let d = self.uint(field, key, default as u64)? as usize;
        if d == 0 {
            return Err(CliError::invalid(format!("{field}.{key}: must be positive")));
        }
        Ok(d)
    }

    fn real(&self, field: &str, key: &str, default: f64) -> CliResult<f64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v
                .as_f64()
                .ok_or_else(|| CliError::invalid(format!("{field}.{key}: expected a number, got {v}"))),
        }
    }
}

/// `Some` for builtin references, `None` for explicit data.
fn parse_named(v: &Value, field: &str, known: &[&str]) -> CliResult<Option<Named>> {
    let (raw, mut params) = match v {
        Value::String(s) => (s.trim().to_owned(), Map::new()),
        Value::Object(o) => match o.get("builtin") {
            None => return Ok(None),
            Some(Value::String(s)) => {
                let mut p = o.clone();
                p.remove("builtin");
                (s.trim().to_owned(), p)
            }
            Some(other) => {
                return Err(CliError::invalid(format!(
                    "{field}.builtin: expected a name, got {other}"
                )))
            }
        },
        other => {
            return Err(CliError::invalid(format!(
                "{field}: expected a builtin name or an object, got {other}"
            )))
        }
    };
    let name = match raw.strip_suffix(')').and_then(|s| s.split_once('(')) {
        Some((n, arg)) => {
            let seed: u64 = arg.trim().parse().map_err(|_| {
                CliError::invalid(format!("{field}: `{raw}` needs an integer seed in parentheses"))
            })?;
            if params.insert("seed".into(), Value::from(seed)).is_some() {
                return Err(CliError::invalid(format!("{field}.seed: given twice")));
            }
            n.trim().to_owned()
        }
        None => raw.clone(),
    };
    let name = canonical(&name).to_owned();
    if !known.contains(&name.as_str()) {
        return Err(unknown(field, &raw, known));
    }
    Ok(Some(Named { name, params }))
}

pub fn sender_labels(prefix: &str, dims: &[usize]) -> CliResult<Vec<SystemLabel>> {
    dims.iter()
        .enumerate()
        .map(|(i, &d)| SystemLabel::try_new(format!("{prefix}{}", i + 1), d))
        .collect::<decoupler_core::Result<_>>()
        .map_err(at("dims"))
}

fn product(dims: &[SystemLabel]) -> usize {
    dims.iter().map(SystemLabel::dim).product()
}

/// Builds a channel on `senders` with a single output system named `output`
/// (or `output1..` for explicit multi-output data).
pub fn build_channel(spec: &Value, senders: Vec<SystemLabel>, output: &str) -> CliResult<QuantumChannel> {
    const F: &str = "channel";
    let Some(n) = parse_named(spec, F, CHANNELS)? else {
        let json: ChannelJson =
            serde_json::from_value(spec.clone()).map_err(|e| CliError::invalid(format!("{F}: {e}")))?;
        let given: Vec<usize> = senders.iter().map(SystemLabel::dim).collect();
        if json.inputs != given {
            return Err(CliError::invalid(format!(
                "{F}.inputs: {:?} disagrees with sender dims {given:?}",
                json.inputs
            )));
        }
        let outputs = match &json.outputs {
            None => vec![SystemLabel::try_new(output, json.output).map_err(at(F))?],
            Some(ds) => ds
                .iter()
                .enumerate()
                .map(|(i, &d)| SystemLabel::try_new(format!("{output}{}", i + 1), d))
                .collect::<decoupler_core::Result<_>>()
                .map_err(at(F))?,
        };
        return json.to_channel_named(senders, outputs).map_err(at(F));
    };
    let din = product(&senders);
    let out = |d: usize| SystemLabel::try_new(output, d).map_err(at(F));
    match n.name.as_str() {
        "identity" => {
            n.check_params(F, &[])?;
            channels::identity(senders, out(din)?)
        }
        "depolarizing" => {
            n.check_params(F, &["output"])?;
            channels::depolarizing(senders, out(n.dim(F, "output", din)?)?)
        }
        "dephasing" => {
            n.check_params(F, &[])?;
            channels::dephasing(senders, out(din)?)
        }
        "erasure" => {
            n.check_params(F, &["p"])?;
            channels::erasure(senders, out(din + 1)?, n.real(F, "p", 0.5)?)
        }
        "random" => {
            n.check_params(F, &["seed", "output", "env"])?;
            let dout = n.dim(F, "output", 2)?;
            let env = n.dim(F, "env", din.div_ceil(dout))?;
            channels::random_channel(senders, out(dout)?, env, n.uint(F, "seed", 0)?)
        }
        _ => unreachable!("name checked by parse_named"),
    }
    .map_err(at(F))
}

fn complex_entry(v: &Value, field: &str) -> CliResult<C64> {
    match v {
        Value::Number(x) => Ok(C64::new(x.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(p) if p.len() == 2 => match (p[0].as_f64(), p[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(CliError::invalid(format!("{field}: expected [re, im], got {v}"))),
        },
        _ => Err(CliError::invalid(format!(
            "{field}: expected a number or [re, im], got {v}"
        ))),
    }
}

/// Systems for an explicit state: the senders, then `R` (or `R1..`).
fn explicit_systems(obj: &Map<String, Value>, senders: &[SystemLabel]) -> CliResult<Vec<SystemLabel>> {
    let dims: Vec<usize> = serde_json::from_value(obj.get("dims").cloned().unwrap_or(Value::Null))
        .map_err(|e| CliError::invalid(format!("state.dims: {e}")))?;
    let k = senders.len();
    if dims.len() < k || dims[..k].iter().zip(senders).any(|(&d, s)| d != s.dim()) {
        return Err(CliError::invalid(format!(
            "state.dims: {dims:?} must start with the sender dims {:?}",
            senders.iter().map(SystemLabel::dim).collect::<Vec<_>>()
        )));
    }
    let rest = &dims[k..];
    let mut systems = senders.to_vec();
    for (i, &d) in rest.iter().enumerate() {
        let name = if rest.len() == 1 {
            REFERENCE.to_owned()
        } else {
            format!("{REFERENCE}{}", i + 1)
        };
        systems.push(SystemLabel::try_new(name, d).map_err(at("state.dims"))?);
    }
    Ok(systems)
}

fn explicit_state(obj: &Map<String, Value>, senders: &[SystemLabel]) -> CliResult<MultipartiteOperator> {
    for key in obj.keys() {
        if !["dims", "matrix", "amplitudes"].contains(&key.as_str()) {
            return Err(CliError::invalid(format!(
                "state.{key}: unknown field (expected dims with matrix or amplitudes)"
            )));
        }
    }
    let systems = explicit_systems(obj, senders)?;
    let d = product(&systems);
    match (obj.get("matrix"), obj.get("amplitudes")) {
        (Some(Value::Array(rows)), None) => {
            if rows.len() != d {
                return Err(CliError::invalid(format!(
                    "state.matrix: {} rows, expected {d}",
                    rows.len()
                )));
            }
            let mut m = DMatrix::<C64>::zeros(d, d);
            for (r, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .filter(|x| x.len() == d)
                    .ok_or_else(|| CliError::invalid(format!("state.matrix[{r}]: expected {d} entries")))?;
                for (c, v) in row.iter().enumerate() {
                    m[(r, c)] = complex_entry(v, &format!("state.matrix[{r}][{c}]"))?;
                }
            }
            MultipartiteOperator::new(systems, m).map_err(at("state.matrix"))
        }
        (None, Some(Value::Array(amps))) => {
            if amps.len() != d {
                return Err(CliError::invalid(format!(
                    "state.amplitudes: {} entries, expected {d}",
                    amps.len()
                )));
            }
            let v = amps
                .iter()
                .enumerate()
                .map(|(i, a)| complex_entry(a, &format!("state.amplitudes[{i}]")))
                .collect::<CliResult<Vec<_>>>()?;
            let psi = PureState::new(systems, DVector::from_vec(v)).map_err(at("state.amplitudes"))?;
            Ok(psi.density())
        }
        _ => Err(CliError::invalid(
            "state: give exactly one of `matrix` or `amplitudes` as an array",
        )),
    }
}

/// Uniform superposition of `|i...i>` for `i < terms`.
fn diagonal_superposition(systems: Vec<SystemLabel>, terms: usize) -> decoupler_core::Result<PureState> {
    let d = product(&systems);
    let mut v = DVector::<C64>::zeros(d);
    for i in 0..terms {
        let idx = systems.iter().fold(0, |acc, s| acc * s.dim() + i);
        v[idx] = C64::new(1.0, 0.0);
    }
    PureState::normalized(systems, v)
}

/// Input state on the senders and a reference `R`.
pub fn build_state(spec: &Value, senders: &[SystemLabel]) -> CliResult<MultipartiteOperator> {
    const F: &str = "state";
    let Some(n) = parse_named(spec, F, STATES)? else {
        let obj = spec
            .as_object()
            .expect("parse_named accepts only strings and objects");
        return explicit_state(obj, senders);
    };
    let din = product(senders);
    let with_ref = |r: usize| -> CliResult<Vec<SystemLabel>> {
        let mut s = senders.to_vec();
        s.push(SystemLabel::try_new(REFERENCE, r).map_err(at("state.r_dim"))?);
        Ok(s)
    };
    match n.name.as_str() {
        "max-entangled" => {
            n.check_params(F, &[])?;
            let systems = with_ref(din)?;
            max_entangled(&SystemLabel::new("joint", din), &systems[systems.len() - 1])
                .and_then(|phi| PureState::new(systems, phi.amplitudes().clone()))
                .map(|p| p.density())
        }
        "maximally-mixed" => {
            n.check_params(F, &["r_dim"])?;
            MultipartiteOperator::maximally_mixed(with_ref(n.dim(F, "r_dim", 1)?)?)
        }
        "ghz-like" => {
            n.check_params(F, &["r_dim"])?;
            let dmin = senders.iter().map(SystemLabel::dim).min().unwrap_or(1);
            let r = n.dim(F, "r_dim", dmin)?;
            diagonal_superposition(with_ref(r)?, dmin.min(r)).map(|p| p.density())
        }
        "random" => {
            n.check_params(F, &["seed", "r_dim", "rank"])?;
            let systems = with_ref(n.dim(F, "r_dim", 2)?)?;
            let full = product(&systems);
            let rank = n.dim(F, "rank", full)?;
            random_density(systems, rank, &mut seeded_rng(n.uint(F, "seed", 0)?))
        }
        _ => unreachable!("name checked by parse_named"),
    }
    .map_err(at(F))
}

/// Pure control state on `input` and a partner system named `partner`;
/// `stream` separates the two senders' random draws.
pub fn build_control(
    spec: Option<&Value>,
    input: &SystemLabel,
    partner: &str,
    stream: u64,
) -> CliResult<PureState> {
    const F: &str = "control";
    let default = Value::from("max-entangled");
    let n = parse_named(spec.unwrap_or(&default), F, CONTROLS)?
        .ok_or_else(|| CliError::invalid("control: expected a builtin name"))?;
    let pd = || n.dim(F, "dim", input.dim());
    let partner = |d: usize| SystemLabel::try_new(partner, d).map_err(at(F));
    match n.name.as_str() {
        "max-entangled" => {
            n.check_params(F, &[])?;
            let p = partner(input.dim())?;
            max_entangled(&p, input)
        }
        "random" => {
            n.check_params(F, &["seed", "dim"])?;
            let p = partner(pd()?)?;
            random_pure(
                vec![p, input.clone()],
                &mut stream_rng(n.uint(F, "seed", 0)?, stream),
            )
        }
        _ => unreachable!("name checked by parse_named"),
    }
    .map_err(at(F))
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub kind: &'static str,
    pub name: &'static str,
    pub label: String,
    pub dims: Vec<usize>,
    /// Output dimension of a channel, reference dimension of a state.
    pub extra_dim: usize,
    /// Kraus count of a channel, rank of a state.
    pub count: usize,
    pub parameters: &'static [&'static str],
}

/// Every builtin instantiated at the given sender dims.
pub fn catalog(dims: &[usize]) -> CliResult<Vec<CatalogEntry>> {
    let senders = sender_labels("A", dims)?;
    let dims_txt = dims.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    let mut out = Vec::new();
    for &name in CHANNELS {
        let ch = build_channel(&Value::from(name), senders.clone(), "E")?;
        let parameters: &[&str] = match name {
            "depolarizing" => &["output"],
            "erasure" => &["p"],
            "random" => &["seed", "output", "env"],
            _ => &[],
        };
        out.push(CatalogEntry {
            kind: "channel",
            name,
            label: format!("{name} d={dims_txt}"),
            dims: dims.to_vec(),
            extra_dim: ch.output_dim(),
            count: ch.kraus().len(),
            parameters,
        });
    }
    for &name in STATES {
        let rho = build_state(&Value::from(name), &senders)?;
        let parameters: &[&str] = match name {
            "maximally-mixed" | "ghz-like" => &["r_dim"],
            "random" => &["seed", "r_dim", "rank"],
            _ => &[],
        };
        let r = rho.system(REFERENCE).map(SystemLabel::dim).unwrap_or(1);
        let rank = decoupler_core::tensor::HermitianSpectrum::of(rho.matrix()).rank();
        out.push(CatalogEntry {
            kind: "state",
            name,
            label: format!("{name} d={dims_txt}"),
            dims: dims.to_vec(),
            extra_dim: r,
            count: rank,
            parameters,
        });
    }
    Ok(out)
}
