use crate::{Result, SimError, SpikeData};
use std::io::{BufRead, Write};

/// Spike raster of several layers sharing a duration and layer size.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    /// Free-form configuration text carried in the header comment.
    pub config: String,
    pub layers: Vec<(usize, SpikeData)>,
}

/// Writes `# duration_ms=.. n=.. layers=.. config=..`, a column line, then
/// one `layer,neuron_id,time_ms` line per spike with 3 decimals.
pub fn write_raster<W: Write>(mut out: W, config: &str, layers: &[(usize, &SpikeData)]) -> Result<()> {
    let Some((_, first)) = layers.first() else {
        return Err(SimError::Argument("no layers to write".into()));
    };
    let (duration, n) = (first.duration, first.n());
    if layers.iter().any(|(_, s)| s.duration != duration || s.n() != n) {
        return Err(SimError::Argument("layers differ in duration or size".into()));
    }
    if config.contains('\n') {
        return Err(SimError::Argument("config text must be a single line".into()));
    }
    let ids: Vec<String> = layers.iter().map(|(k, _)| k.to_string()).collect();
    writeln!(out, "# duration_ms={duration} n={n} layers={} config={config}", ids.join(","))?;
    writeln!(out, "layer,neuron_id,time_ms")?;
    for (k, s) in layers {
        for (i, tr) in s.trains.iter().enumerate() {
            for t in tr {
                writeln!(out, "{k},{i},{t:.3}")?;
            }
        }
    }
    Ok(())
}

pub fn read_raster<R: BufRead>(input: R) -> Result<Raster> {
    let perr = |line: usize, msg: &str| SimError::Parse { line, msg: msg.to_string() };
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, l)) => l?,
        None => return Err(perr(1, "empty input")),
    };
    let body = header.strip_prefix("# ").ok_or_else(|| perr(1, "missing header comment"))?;
    let (fields, config) = match body.split_once(" config=") {
        Some((f, c)) => (f, c.to_string()),
        None => return Err(perr(1, "header lacks config field")),
    };
    let mut duration = None;
    let mut n = None;
    let mut ids: Option<Vec<usize>> = None;
    for kv in fields.split(' ') {
        let (k, v) = kv.split_once('=').ok_or_else(|| perr(1, "malformed header field"))?;
        match k {
            "duration_ms" => duration = Some(v.parse::<f64>().map_err(|_| perr(1, "bad duration"))?),
            "n" => n = Some(v.parse::<usize>().map_err(|_| perr(1, "bad n"))?),
            "layers" => {
                ids = Some(v.split(',').map(|x| x.parse::<usize>()).collect::<std::result::Result<_, _>>().map_err(|_| perr(1, "bad layer list"))?)
            }
            _ => return Err(perr(1, &format!("unknown header field {k}"))),
        }
    }
    let (Some(duration), Some(n), Some(ids)) = (duration, n, ids) else {
        return Err(perr(1, "header is missing duration_ms, n or layers"));
    };
    let columns = match lines.next() {
        Some((_, l)) => l?,
        None => String::new(),
    };
    if columns != "layer,neuron_id,time_ms" {
        return Err(perr(2, "missing column line"));
    }
    let mut layers: Vec<(usize, SpikeData)> = ids.iter().map(|&k| (k, SpikeData::silent(n, duration))).collect();
    let mut last = (0usize, 0usize);
    for (idx, line) in lines {
        let line = line?;
        let ln = idx + 1;
        let mut parts = line.split(',');
        let (Some(a), Some(b), Some(c), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
            return Err(perr(ln, "expected three fields"));
        };
        let k: usize = a.parse().map_err(|_| perr(ln, "bad layer"))?;
        let i: usize = b.parse().map_err(|_| perr(ln, "bad neuron id"))?;
        let t: f64 = c.parse().map_err(|_| perr(ln, "bad time"))?;
        let pos = ids.iter().position(|&x| x == k).ok_or_else(|| perr(ln, "layer not declared in header"))?;
        if i >= n {
            return Err(perr(ln, "neuron id out of range"));
        }
        if (pos, i) < last {
            return Err(perr(ln, "lines out of order"));
        }
        last = (pos, i);
        if !(t >= 0.0 && t < duration) {
            return Err(perr(ln, "time outside the recording"));
        }
        let tr = &mut layers[pos].1.trains[i];
        if tr.last().is_some_and(|&p| t <= p) {
            return Err(perr(ln, "times not strictly increasing"));
        }
        tr.push(t);
    }
    Ok(Raster { config, layers })
}
