use std::fmt::Write as _;

use super::Dfa;

impl Dfa {
    /// Graphviz rendering with guards printed as propositional formulas.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  init [shape=point];\n");
        for q in 0..self.state_count() {
            let shape = if self.is_accepting(q) {
                "doublecircle"
            } else {
                "circle"
            };
            let _ = writeln!(out, "  q{q} [shape={shape},label=\"{q}\"];");
        }
        let _ = writeln!(out, "  init -> q{};", self.initial());
        for q in 0..self.state_count() {
            for e in self.edges(q) {
                let label = self.guard_text(q, e.target).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "  q{q} -> q{} [label=\"{}\"];",
                    e.target,
                    label.replace('"', "\\\"")
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::cost_example;

    #[test]
    fn dot_lists_states_and_guards() {
        let dot = cost_example().to_dot();
        assert!(dot.starts_with("digraph dfa {"));
        assert!(dot.contains("q3 [shape=doublecircle"));
        assert!(dot.contains("q0 -> q2 [label=\"c1 & !g & !h\"];"));
        assert!(dot.contains("init -> q0;"));
    }
}
