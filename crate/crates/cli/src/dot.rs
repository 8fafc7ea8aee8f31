//! Graphviz export. One record node per generator, ports in wire order,
//! iterations drawn as clusters.

use std::fmt::Write;

use pbc_core::syntax::Generator;
use pbc_core::{typecheck, Term};

/// `(node, output port)`.
type Port = (usize, usize);

#[derive(Default)]
struct Dot {
    lines: Vec<String>,
    edges: Vec<String>,
    next: usize,
    clusters: usize,
    depth: usize,
}

fn escape(s: &str) -> String {
    let mut out = String::new();
    for c in s.chars() {
        if matches!(c, '<' | '>' | '{' | '}' | '|' | '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

fn ports(prefix: char, n: usize) -> String {
    (0..n).map(|i| format!("<{prefix}{i}>")).collect::<Vec<_>>().join("|")
}

fn wires(t: &Term, codomain: bool) -> usize {
    let j = typecheck(t).expect("subterms of a typed term typecheck");
    if codomain {
        j.codomain.len()
    } else {
        j.domain.len()
    }
}

impl Dot {
    fn pad(&self) -> String {
        "  ".repeat(self.depth + 1)
    }

    fn node(&mut self, label: &str, n_in: usize, n_out: usize, ins: &[Port]) -> usize {
        let id = self.next;
        self.next += 1;
        let mut parts = Vec::new();
        if n_in > 0 {
            parts.push(format!("{{{}}}", ports('i', n_in)));
        }
        parts.push(escape(label));
        if n_out > 0 {
            parts.push(format!("{{{}}}", ports('o', n_out)));
        }
        let line = format!("{}n{id} [label=\"{{{}}}\"];", self.pad(), parts.join("|"));
        self.lines.push(line);
        for (q, (from, p)) in ins.iter().enumerate() {
            self.edges.push(format!("n{from}:o{p} -> n{id}:i{q};"));
        }
        id
    }

    fn go(&mut self, t: &Term, ins: Vec<Port>) -> Vec<Port> {
        match t {
            Term::Id(_) => ins,
            Term::Swap(a, _) => {
                let (l, r) = ins.split_at(a.len());
                r.iter().chain(l).copied().collect()
            }
            Term::Gen(g) => {
                let label = match g {
                    Generator::Copy(a) => format!("copy {a}"),
                    Generator::Discard(a) => format!("del {a}"),
                    Generator::Coin(p) => format!("coin {p}"),
                    Generator::Phi(a) => format!("if {a}"),
                };
                let n_out = wires(t, true);
                let id = self.node(&label, ins.len(), n_out, &ins);
                (0..n_out).map(|j| (id, j)).collect()
            }
            Term::Seq(f, g) => {
                let mid = self.go(f, ins);
                self.go(g, mid)
            }
            Term::Par(f, g) => {
                let mut rest = ins;
                let right = rest.split_off(wires(f, false));
                let mut out = self.go(f, rest);
                out.extend(self.go(g, right));
                out
            }
            Term::TauStar { spec, body } => {
                let c = self.clusters;
                self.clusters += 1;
                let pad = self.pad();
                self.lines.push(format!("{pad}subgraph cluster_{c} {{"));
                self.lines.push(format!("{pad}  label=\"τ★ [{spec}]\";"));
                self.depth += 1;
                let n_in = wires(body, false);
                let enter = self.node("unroll", ins.len(), n_in, &ins);
                let out = self.go(body, (0..n_in).map(|j| (enter, j)).collect());
                let n_out = wires(t, true);
                let leave = self.node("collect", out.len(), n_out, &out);
                self.depth -= 1;
                self.lines.push(format!("{pad}}}"));
                (0..n_out).map(|j| (leave, j)).collect()
            }
        }
    }
}

/// Deterministic dot text for a well-typed term.
pub fn emit_dot(t: &Term) -> String {
    let j = typecheck(t).expect("emit_dot needs a well-typed term");
    let mut d = Dot::default();
    let input = d.node("in", 0, j.domain.len(), &[]);
    let outs = d.go(t, (0..j.domain.len()).map(|i| (input, i)).collect());
    d.node("out", outs.len(), 0, &outs);
    let mut s = String::from("digraph pbc {\n  rankdir=LR;\n  node [shape=record];\n");
    for l in &d.lines {
        let _ = writeln!(s, "{l}");
    }
    for e in &d.edges {
        let _ = writeln!(s, "  {e}");
    }
    s.push_str("}\n");
    s
}
