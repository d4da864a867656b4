//! Plain-text tables.

use std::fmt::Write as _;

use convnec::convcode::CodeMetrics;
use convnec::nec::ConstructionReport;
use convnec::network::TransferSet;
use convnec::polymat::PolyMatrix;
use convnec::sim::{ExhaustiveSummary, RandomSummary, SinkTally};
use convnec::Elem;

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                let _ = write!(s, "{c:<w$}  ");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn vector(v: &[Elem]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn transfer(t: &TransferSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "field {}", t.field);
    let _ = writeln!(s, "A = {}", t.a);
    let _ = writeln!(s, "K = {}", t.k);
    let _ = writeln!(s, "F = {}", t.f);
    for sink in &t.sinks {
        let _ = writeln!(s, "sink {}", sink.name);
        let _ = writeln!(s, "  F_T = {}", sink.f_t);
        let _ = writeln!(s, "  M_T = {}", sink.m_t);
        let _ = writeln!(s, "  M_T^-1 = {}", sink.m_t_inv);
    }
    s
}

pub fn catastrophic(g: &PolyMatrix) -> String {
    format!("generator {g} over {}\ncatastrophic: yes\n", g.field())
}

pub fn analysis(g: &PolyMatrix, m: &CodeMetrics, singleton: Option<u64>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "generator {g} over {}", g.field());
    let _ = writeln!(s, "catastrophic: no");
    let _ = writeln!(s, "dfree: {}", m.dfree);
    let _ = writeln!(s, "T_dfree: {}", m.tdfree);
    let _ = writeln!(s, "degree: {}", m.degree);
    let degs: Vec<String> = m.row_degrees.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(s, "row degrees: {}", degs.join(" "));
    if let Some(b) = singleton {
        let _ = writeln!(s, "Singleton bound: {b}");
    }
    for w in &m.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}

pub fn construction(r: &ConstructionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "field {}, {} edges, n = {}, k = {}",
        r.field, r.num_edges, r.num_inputs, r.rate_k
    );
    let _ = writeln!(s, "|W_phi| = {}", r.w_phi_size);
    let w_s: Vec<String> = r.w_s.iter().map(|v| vector(v)).collect();
    let _ = writeln!(s, "W_s = {{{}}}", w_s.join(", "));
    let _ = writeln!(s, "t_s = {}, required dfree = {}", r.t_s, r.required_dfree);
    let source = match r.code_source {
        convnec::nec::CodeSource::Supplied => "supplied",
        convnec::nec::CodeSource::Search => "search",
    };
    let _ = writeln!(
        s,
        "input code {} ({source}): dfree {}, T_dfree {}, degree {}",
        r.code, r.code_metrics.dfree, r.code_metrics.tdfree, r.code_metrics.degree
    );
    for w in &r.code_metrics.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s.push('\n');
    let rows: Vec<Vec<String>> = r
        .plans
        .iter()
        .map(|p| {
            vec![
                p.sink.clone(),
                p.output_code.to_string(),
                format!("{},{}", p.output_metrics.dfree, p.output_metrics.tdfree),
                p.max_error_weight.to_string(),
                p.mode.to_string(),
            ]
        })
        .collect();
    s.push_str(&table(
        &["Sink", "Output code", "dfree,T_dfree", "max w_H(W_T)", "Decoding"],
        &rows,
    ));
    s
}

fn tallies(t: &[SinkTally]) -> String {
    let rows: Vec<Vec<String>> = t
        .iter()
        .map(|s| vec![s.sink.clone(), s.trials.to_string(), s.failures.to_string()])
        .collect();
    table(&["Sink", "Trials", "Failures"], &rows)
}

pub fn exhaustive(s: &ExhaustiveSummary) -> String {
    let mut out = format!(
        "exhaustive {:?}: {} messages of length {} ({} network uses), {} error vectors, spacing {}, seed {}\n",
        s.mode, s.num_messages, s.message_len, s.num_uses, s.error_vectors, s.spacing, s.seed
    );
    out.push_str(&tallies(&s.sinks));
    out
}

pub fn random(s: &RandomSummary) -> String {
    let mut out = format!(
        "random: {} trials, messages of length {}, spacing {}, seed {}\n",
        s.trials, s.message_len, s.spacing, s.seed
    );
    out.push_str(&tallies(&s.sinks));
    out
}

pub struct Bounds {
    pub singleton: u64,
    pub q_min: u64,
    pub tdfree: Option<u64>,
    pub mds: Option<u64>,
    pub bnecc: Option<String>,
}

pub fn bounds(b: &Bounds) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Singleton bound on dfree: {}", b.singleton);
    let _ = writeln!(s, "sufficient field size: {}", b.q_min);
    if let Some(t) = b.tdfree {
        let _ = writeln!(s, "T_dfree cap: {t}");
    }
    if let Some(t) = b.mds {
        let _ = writeln!(s, "T_dfree cap for MDS codes: {t}");
    }
    if let Some(q) = &b.bnecc {
        let _ = writeln!(s, "block network code field bound: q > {q}");
    }
    s
}
