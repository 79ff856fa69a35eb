use crate::{LayerSynapses, NetworkError, NetworkTopology, TopologyConfig};
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Writes the header line and one `layer,target,source,weight` line per synapse.
pub fn write_topology<W: Write>(t: &NetworkTopology, mut out: W) -> std::io::Result<()> {
    let c = &t.cfg;
    writeln!(
        out,
        "# N={} W={} lambda={} r={} w0={} layers={} seed={} shared={}",
        c.n, c.w, c.lambda, c.r, c.w0, c.layers, c.seed, t.shared_weights
    )?;
    for k in 0..t.n_layers() {
        let l = t.layer(k);
        for i in 0..t.n() {
            for (slot, s) in l.row(i).iter().enumerate() {
                writeln!(out, "{k},{i},{s},{}", t.unit_weight(slot))?;
            }
        }
    }
    Ok(())
}

fn perr(line: usize, msg: impl Into<String>) -> NetworkError {
    NetworkError::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<(TopologyConfig, bool), NetworkError> {
    let body = line.strip_prefix('#').ok_or_else(|| perr(1, "missing header"))?;
    let mut cfg = TopologyConfig { n: 0, w: 0, lambda: 0.0, r: 0.0, w0: 0.0, layers: 0, seed: 0 };
    let mut shared = false;
    let mut seen = 0;
    for tok in body.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| perr(1, format!("bad field {tok}")))?;
        let bad = |_| perr(1, format!("bad value for {k}"));
        match k {
            "N" => cfg.n = v.parse().map_err(|_| perr(1, "bad N"))?,
            "W" => cfg.w = v.parse().map_err(|_| perr(1, "bad W"))?,
            "lambda" => cfg.lambda = v.parse().map_err(bad)?,
            "r" => cfg.r = v.parse().map_err(bad)?,
            "w0" => cfg.w0 = v.parse().map_err(bad)?,
            "layers" => cfg.layers = v.parse().map_err(|_| perr(1, "bad layers"))?,
            "seed" => cfg.seed = v.parse().map_err(|_| perr(1, "bad seed"))?,
            "shared" => shared = v.parse().map_err(|_| perr(1, "bad shared flag"))?,
            _ => return Err(perr(1, format!("unknown header field {k}"))),
        }
        seen += 1;
    }
    if seen != 8 {
        return Err(perr(1, "header must carry N, W, lambda, r, w0, layers, seed, shared"));
    }
    Ok((cfg, shared))
}

/// Reads a topology written by [`write_topology`] and checks it against the header.
pub fn read_topology<R: BufRead>(input: R) -> Result<NetworkTopology, NetworkError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| perr(1, "empty input"))?.map_err(|e| perr(1, e.to_string()))?;
    let (cfg, shared) = parse_header(&header)?;
    cfg.validate()?;
    let (k_e, k_i) = (cfg.k_e(), cfg.k_i());
    let degree = k_e + k_i;
    let per_layer = cfg.n * degree;
    let mut all: Vec<Vec<u32>> = vec![Vec::with_capacity(per_layer); cfg.layers];
    let w_inh = -crate::G * cfg.r;
    for (idx, line) in lines.enumerate() {
        let no = idx + 2;
        let line = line.map_err(|e| perr(no, e.to_string()))?;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(perr(no, "expected layer,target,source,weight"));
        }
        let k: usize = f[0].parse().map_err(|_| perr(no, "bad layer"))?;
        let i: usize = f[1].parse().map_err(|_| perr(no, "bad target"))?;
        let s: u32 = f[2].parse().map_err(|_| perr(no, "bad source"))?;
        let wt: f64 = f[3].parse().map_err(|_| perr(no, "bad weight"))?;
        if k >= cfg.layers || i >= cfg.n || s as usize >= cfg.n {
            return Err(perr(no, "index out of range"));
        }
        let rows = &mut all[k];
        if i != rows.len() / degree {
            return Err(perr(no, "synapses must be listed in row order"));
        }
        let slot = rows.len() - i * degree;
        if slot != 0 && slot != k_e && rows.last().is_some_and(|&p| p >= s) {
            return Err(perr(no, "sources within a group must be strictly increasing"));
        }
        let want = if slot < k_e { 1.0 } else { w_inh };
        if wt.to_bits() != want.to_bits() {
            return Err(perr(no, format!("weight {wt} does not match slot sign/magnitude {want}")));
        }
        rows.push(s);
    }
    let layers: Vec<Arc<LayerSynapses>> = all
        .into_iter()
        .enumerate()
        .map(|(k, rows)| {
            if rows.len() != per_layer {
                Err(perr(0, format!("layer {k} has {} synapses, expected {per_layer}", rows.len())))
            } else {
                Ok(Arc::new(LayerSynapses::from_rows(k_e, k_i, rows)))
            }
        })
        .collect::<Result<_, _>>()?;
    if shared && layers.windows(2).any(|p| p[0] != p[1]) {
        return Err(perr(0, "shared topology has differing layers"));
    }
    let t = NetworkTopology::from_parts(cfg, layers, shared);
    if !crate::empirical_degree_report(&t).totals_exact {
        return Err(perr(0, "in-degree constraint violated"));
    }
    for k in 0..t.n_layers() {
        for i in t.packet() {
            // Recurrent rows skip the neuron itself.
            let expected = (0..cfg.w).filter(|&j| !shared || j != i);
            let listed = &t.layer(k).excitatory(i)[..cfg.w - shared as usize];
            if listed.iter().zip(expected).any(|(&s, j)| s as usize != j) {
                return Err(perr(0, format!("packet neuron {i} in layer {k} lacks a packet source")));
            }
        }
    }
    Ok(t)
}
