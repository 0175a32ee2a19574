use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::sgraph::Sign;
use crate::switched::{Scenario, SimulationTrace};

/// Column layout shared by every row of a trace file: the union of nodes and
/// of edges over all modes, in order of first appearance. An edge column is
/// identified by tail, head and sign, so an edge that keeps its identity
/// across a switch keeps its column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceColumns {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String, Sign)>,
    /// Per mode: column of each node, then column of each edge.
    node_cols: Vec<Vec<usize>>,
    edge_cols: Vec<Vec<usize>>,
}

impl TraceColumns {
    pub fn new(scenario: &Scenario) -> Self {
        let mut nodes: Vec<String> = Vec::new();
        let mut edges: Vec<(String, String, Sign)> = Vec::new();
        let mut node_idx: HashMap<String, usize> = HashMap::new();
        let mut edge_idx: HashMap<(String, String, Sign), usize> = HashMap::new();
        let mut node_cols = Vec::new();
        let mut edge_cols = Vec::new();
        for m in &scenario.modes {
            let g = &m.graph;
            node_cols.push(
                g.labels()
                    .iter()
                    .map(|l| {
                        *node_idx.entry(l.clone()).or_insert_with(|| {
                            nodes.push(l.clone());
                            nodes.len() - 1
                        })
                    })
                    .collect(),
            );
            edge_cols.push(
                g.edges()
                    .iter()
                    .map(|e| {
                        let key = (g.label(e.tail).to_owned(), g.label(e.head).to_owned(), e.sign);
                        *edge_idx.entry(key.clone()).or_insert_with(|| {
                            edges.push(key);
                            edges.len() - 1
                        })
                    })
                    .collect(),
            );
        }
        Self {
            nodes,
            edges,
            node_cols,
            edge_cols,
        }
    }

    pub fn header(&self) -> String {
        let mut cols = vec!["t".to_owned(), "mode".to_owned()];
        cols.extend(self.nodes.iter().map(|n| format!("x:{n}")));
        cols.extend((1..=self.edges.len()).map(|k| format!("e:{k}")));
        cols.extend((1..=self.edges.len()).map(|k| format!("ebar:{k}")));
        cols.push("V".into());
        cols.join(",")
    }
}

/// Writes one CSV row per `sample_every` samples; the final sample is always
/// written. Entries for nodes or edges absent from a sample's mode are empty.
pub fn write_trace<W: Write>(
    mut w: W,
    scenario: &Scenario,
    trace: &SimulationTrace,
    sample_every: usize,
) -> io::Result<()> {
    let cols = TraceColumns::new(scenario);
    writeln!(w, "{}", cols.header())?;
    let stride = sample_every.max(1);
    let (nn, ne) = (cols.nodes.len(), cols.edges.len());
    let last = trace.samples.len().saturating_sub(1);
    for (i, s) in trace.samples.iter().enumerate() {
        if i % stride != 0 && i != last {
            continue;
        }
        let mut x = vec![None; nn];
        let mut e = vec![None; ne];
        let mut eb = vec![None; ne];
        for (k, &c) in cols.node_cols[s.mode].iter().enumerate() {
            x[c] = Some(s.x[k]);
        }
        for (k, &c) in cols.edge_cols[s.mode].iter().enumerate() {
            e[c] = Some(s.e[k]);
            eb[c] = Some(s.ebar[k]);
        }
        let mut row = format!("{},{}", s.t, s.mode + 1);
        for v in x.iter().chain(&e).chain(&eb) {
            row.push(',');
            if let Some(v) = v {
                row.push_str(&v.to_string());
            }
        }
        row.push_str(&format!(",{}", s.v));
        writeln!(w, "{row}")?;
    }
    w.flush()
}

pub fn write_trace_file(
    path: &Path,
    scenario: &Scenario,
    trace: &SimulationTrace,
    sample_every: usize,
) -> io::Result<()> {
    write_trace(BufWriter::new(File::create(path)?), scenario, trace, sample_every)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_io::parse_scenario;
    use crate::switched::simulate;

    fn two_node() -> Scenario {
        parse_scenario("scenario k1 1 dt 0.01\nmode a duration 0.05\n join 1 1\n join 2 0\n edge 1 -> 2 +\n").unwrap()
    }

    #[test]
    fn two_node_columns() {
        assert_eq!(TraceColumns::new(&two_node()).header(), "t,mode,x:1,x:2,e:1,ebar:1,V");
    }

    #[test]
    fn stride_keeps_final_row() {
        let s = two_node();
        let trace = simulate(&s, &s.certify().unwrap()).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &s, &trace, 4).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().skip(1).collect();
        // samples 0..=5, stride 4 -> 0, 4, 5
        assert_eq!(rows.len(), 3);
        assert!(rows[2].starts_with(&format!("{},", trace.last().unwrap().t)));
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace(&mut buf, &two_node(), &SimulationTrace::default(), 1).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,mode,x:1,x:2,e:1,ebar:1,V\n");
    }
}
