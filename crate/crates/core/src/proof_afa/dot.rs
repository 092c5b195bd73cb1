use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::ProofAfa;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

impl ProofAfa {
    /// Graphviz rendering: the state formula inside each node, the remaining
    /// trace and the derived formula beside it.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!(
            "digraph \"{}\" {{\n  rankdir=RL;\n  node [fontname=\"Helvetica\"];\n  init [shape=point];\n",
            escape(name)
        );
        for (s, st) in self.states.iter().enumerate() {
            let kind = if st.universal { "∀" } else { "∃" };
            let shape = match (st.universal, st.accepting) {
                (true, false) => "shape=box, peripheries=2",
                (true, true) => "shape=box, peripheries=3",
                (false, true) => "shape=doublecircle",
                (false, false) => "shape=ellipse",
            };
            let rmap: String = self
                .rmap(s)
                .iter()
                .map(|&a| self.alphabet[a].as_str())
                .collect::<Vec<_>>()
                .join("");
            let rmap = if rmap.is_empty() { "ε".to_string() } else { rmap };
            let hmap = st
                .hmap
                .as_ref()
                .map(|h| format!("\\nH: {}", escape(&h.to_string())))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  s{s} [{shape}, label=\"{kind} {}\", xlabel=\"s{s}\\nR: {}{hmap}\"];",
                escape(&st.amap.to_string()),
                escape(&rmap)
            );
        }
        if !self.is_empty() {
            out.push_str("  init -> s0;\n");
        }
        for (s, st) in self.states.iter().enumerate() {
            let mut by_target: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
            for (&a, ts) in &st.letters {
                for &t in ts {
                    by_target.entry(t).or_default().push(&self.alphabet[a]);
                }
            }
            for (t, labels) in by_target {
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"{}\"];", escape(&labels.join(",")));
            }
            for &t in &st.eps {
                let style = if st.universal { ", style=dashed" } else { "" };
                let _ = writeln!(out, "  s{s} -> s{t} [label=\"ε\"{style}];");
            }
        }
        out.push_str("}\n");
        out
    }
}
