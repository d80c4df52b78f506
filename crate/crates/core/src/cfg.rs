//! Statement-level control flow graph and program dependence graph.
//!
//! Every statement (declaration, assignment, branch or loop condition, output, return,
//! print) is one node, plus a unique entry and exit. The entry node defines the
//! parameters. Loop conditions always carry both a true and a false edge, including
//! `while (true)`, so the exit is reachable from every node built from a program.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use serde::Serialize;

use crate::bitset::BitSet;
use crate::lang::{print_expr, Diagnostic, Program, Rhs, Span, Stmt, StmtId, StmtKind, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    pub const ENTRY: NodeId = NodeId(0);
    pub const EXIT: NodeId = NodeId(1);

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn of_stmt(id: StmtId) -> NodeId {
        NodeId(id.0 + 2)
    }

    pub fn stmt(self) -> Option<StmtId> {
        self.0.checked_sub(2).map(StmtId)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Entry,
    Exit,
    Decl,
    Assign,
    Read,
    Condition,
    Output,
    Return,
    Print,
    /// Node of a hand-built graph with no source statement.
    Synthetic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    Seq,
    True,
    False,
}

#[derive(Clone, Debug, Serialize)]
pub struct CfgNode {
    pub kind: NodeKind,
    /// Sorted, deduplicated.
    pub defs: Vec<VarId>,
    /// Sorted, deduplicated.
    pub uses: Vec<VarId>,
    pub label: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Cfg {
    pub nodes: Vec<CfgNode>,
    pub succs: Vec<Vec<(NodeId, EdgeLabel)>>,
    pub preds: Vec<Vec<NodeId>>,
}

impl Cfg {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &CfgNode {
        &self.nodes[id.index()]
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn condition_nodes(&self) -> Vec<NodeId> {
        self.node_ids()
            .filter(|n| self.nodes[n.index()].kind == NodeKind::Condition)
            .collect()
    }

    fn add_edge(&mut self, from: NodeId, to: NodeId, label: EdgeLabel) {
        self.succs[from.index()].push((to, label));
        self.preds[to.index()].push(from);
    }

    /// A graph with `n` synthetic nodes; node 0 is the entry and node 1 the exit.
    /// A node with two successors gets a true and a false edge, in the given order.
    pub fn synthetic(n: usize, edges: &[(u32, u32)]) -> Cfg {
        assert!(n >= 2, "a graph needs an entry and an exit");
        let mut cfg = Cfg {
            nodes: (0..n)
                .map(|i| CfgNode {
                    kind: match i {
                        0 => NodeKind::Entry,
                        1 => NodeKind::Exit,
                        _ => NodeKind::Synthetic,
                    },
                    defs: Vec::new(),
                    uses: Vec::new(),
                    label: format!("n{i}"),
                    span: Span::default(),
                })
                .collect(),
            succs: vec![Vec::new(); n],
            preds: vec![Vec::new(); n],
        };
        for &(a, b) in edges {
            cfg.add_edge(NodeId(a), NodeId(b), EdgeLabel::Seq);
        }
        for (i, out) in cfg.succs.iter_mut().enumerate() {
            if out.len() == 2 {
                out[0].1 = EdgeLabel::True;
                out[1].1 = EdgeLabel::False;
                if i >= 2 {
                    cfg.nodes[i].kind = NodeKind::Condition;
                }
            }
        }
        cfg
    }

    /// Nodes from which the exit is reachable.
    pub(crate) fn reaches_exit(&self) -> BitSet {
        let mut seen = BitSet::new(self.len());
        let mut queue = VecDeque::from([NodeId::EXIT]);
        seen.insert(NodeId::EXIT.index());
        while let Some(n) = queue.pop_front() {
            for &p in &self.preds[n.index()] {
                if seen.insert(p.index()) {
                    queue.push_back(p);
                }
            }
        }
        seen
    }

    pub fn to_dot(&self, title: &str) -> String {
        let mut out = format!("digraph \"{}\" {{\n  node [shape=box];\n", escape(title));
        for (i, n) in self.nodes.iter().enumerate() {
            let shape = match n.kind {
                NodeKind::Condition => ", shape=diamond",
                NodeKind::Entry | NodeKind::Exit => ", shape=ellipse",
                _ => "",
            };
            let _ = writeln!(out, "  n{i} [label=\"{}\"{shape}];", escape(&n.label));
        }
        for (i, succ) in self.succs.iter().enumerate() {
            for (t, label) in succ {
                let attr = match label {
                    EdgeLabel::Seq => String::new(),
                    EdgeLabel::True => " [label=\"T\"]".into(),
                    EdgeLabel::False => " [label=\"F\"]".into(),
                };
                let _ = writeln!(out, "  n{i} -> n{}{attr};", t.0);
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builds the statement-level control flow graph of a program.
pub fn build_cfg(program: &Program) -> Cfg {
    let n = program.stmt_count() + 2;
    let name = |v: VarId| program.var_name(v).to_string();
    let mut nodes: Vec<CfgNode> = Vec::with_capacity(n);
    nodes.push(CfgNode {
        kind: NodeKind::Entry,
        defs: program.params().collect(),
        uses: Vec::new(),
        label: "entry".into(),
        span: Span::default(),
    });
    nodes.push(CfgNode {
        kind: NodeKind::Exit,
        defs: Vec::new(),
        uses: Vec::new(),
        label: "exit".into(),
        span: Span::default(),
    });
    let mut placeholders = vec![None; program.stmt_count()];
    program.walk(&mut |s| {
        let (kind, label) = match &s.kind {
            StmtKind::Decl { var, init } | StmtKind::Assign { target: var, value: init } => {
                let rhs = match init {
                    Rhs::Expr(e) => print_expr(e, &name),
                    Rhs::Input => "input()".into(),
                };
                let kind = match (&s.kind, init) {
                    (_, Rhs::Input) => NodeKind::Read,
                    (StmtKind::Decl { .. }, _) => NodeKind::Decl,
                    _ => NodeKind::Assign,
                };
                (kind, format!("{} := {rhs}", name(*var)))
            }
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => {
                (NodeKind::Condition, print_expr(cond, &name))
            }
            StmtKind::Output(e) => (NodeKind::Output, format!("output {}", print_expr(e, &name))),
            StmtKind::Return(e) => (NodeKind::Return, format!("return {}", print_expr(e, &name))),
            StmtKind::Print(e) => (NodeKind::Print, format!("print {}", print_expr(e, &name))),
        };
        let uses: BTreeSet<VarId> = s.kind.uses().into_iter().collect();
        placeholders[s.id.index()] = Some(CfgNode {
            kind,
            defs: s.kind.def().into_iter().collect(),
            uses: uses.into_iter().collect(),
            label,
            span: program.span(s.id),
        });
    });
    nodes.extend(placeholders.into_iter().map(|n| n.expect("every statement visited")));

    let mut cfg = Cfg {
        nodes,
        succs: vec![Vec::new(); n],
        preds: vec![Vec::new(); n],
    };
    let first = lower_seq(&mut cfg, &program.body, NodeId::EXIT);
    cfg.add_edge(NodeId::ENTRY, first, EdgeLabel::Seq);
    cfg
}

/// Wires `stmts` so that normal completion continues at `follow`; returns the first node.
fn lower_seq(cfg: &mut Cfg, stmts: &[Stmt], follow: NodeId) -> NodeId {
    let mut next = follow;
    for s in stmts.iter().rev() {
        let node = NodeId::of_stmt(s.id);
        match &s.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                let t = lower_seq(cfg, then_branch, next);
                let f = lower_seq(cfg, else_branch, next);
                cfg.add_edge(node, t, EdgeLabel::True);
                cfg.add_edge(node, f, EdgeLabel::False);
            }
            StmtKind::While { body, .. } => {
                let b = lower_seq(cfg, body, node);
                cfg.add_edge(node, b, EdgeLabel::True);
                cfg.add_edge(node, next, EdgeLabel::False);
            }
            StmtKind::Return(_) => cfg.add_edge(node, NodeId::EXIT, EdgeLabel::Seq),
            _ => cfg.add_edge(node, next, EdgeLabel::Seq),
        }
        next = node;
    }
    next
}

/// Post-dominator sets, reflexive. Nodes that cannot reach the exit have no set.
#[derive(Clone, Debug)]
pub struct PostDominators {
    sets: Vec<Option<BitSet>>,
    pub unreachable_exit: Vec<NodeId>,
}

impl PostDominators {
    /// `a` post-dominates `b`: every path from `b` to the exit passes through `a`.
    pub fn post_dominates(&self, a: NodeId, b: NodeId) -> bool {
        self.sets[b.index()]
            .as_ref()
            .is_some_and(|s| s.contains(a.index()))
    }

    pub fn of(&self, n: NodeId) -> Option<Vec<NodeId>> {
        self.sets[n.index()]
            .as_ref()
            .map(|s| s.iter().map(|i| NodeId(i as u32)).collect())
    }

    pub fn diagnostics(&self, cfg: &Cfg) -> Vec<Diagnostic> {
        self.unreachable_exit
            .iter()
            .map(|&n| {
                Diagnostic::warning(
                    format!(
                        "`{}` cannot reach the procedure exit; excluded from post-dominance",
                        cfg.node(n).label
                    ),
                    cfg.node(n).span,
                )
            })
            .collect()
    }
}

pub fn post_dominators(cfg: &Cfg) -> PostDominators {
    let n = cfg.len();
    let live = cfg.reaches_exit();
    let mut sets: Vec<Option<BitSet>> = (0..n)
        .map(|i| live.contains(i).then(|| live.clone()))
        .collect();
    let mut exit_set = BitSet::new(n);
    exit_set.insert(NodeId::EXIT.index());
    sets[NodeId::EXIT.index()] = Some(exit_set);

    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            if i == NodeId::EXIT.index() || !live.contains(i) {
                continue;
            }
            let mut acc: Option<BitSet> = None;
            for (s, _) in &cfg.succs[i] {
                if let Some(ss) = &sets[s.index()] {
                    match &mut acc {
                        None => acc = Some(ss.clone()),
                        Some(a) => a.intersect_with(ss),
                    }
                }
            }
            let mut new = acc.unwrap_or_else(|| BitSet::new(n));
            new.insert(i);
            if sets[i].as_ref() != Some(&new) {
                sets[i] = Some(new);
                changed = true;
            }
        }
    }
    let unreachable_exit = (0..n)
        .filter(|&i| !live.contains(i))
        .map(|i| NodeId(i as u32))
        .collect();
    PostDominators {
        sets,
        unreachable_exit,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ControlEdge {
    pub condition: NodeId,
    pub dependent: NodeId,
    pub label: EdgeLabel,
}

/// `s` is control dependent on `c` when `c` has a successor `u` that `s`
/// post-dominates while `s` does not strictly post-dominate `c`. A loop condition is
/// therefore control dependent on itself.
pub fn control_dependence(cfg: &Cfg) -> Vec<ControlEdge> {
    control_dependence_with(cfg, &post_dominators(cfg))
}

pub fn control_dependence_with(cfg: &Cfg, pdom: &PostDominators) -> Vec<ControlEdge> {
    let mut edges = BTreeSet::new();
    for c in cfg.node_ids() {
        let succs = &cfg.succs[c.index()];
        if succs.len() < 2 {
            continue;
        }
        for &(u, label) in succs {
            let Some(us) = &pdom.sets[u.index()] else {
                continue;
            };
            for s in us.iter().map(|i| NodeId(i as u32)) {
                if s == c || !pdom.post_dominates(s, c) {
                    edges.insert(ControlEdge {
                        condition: c,
                        dependent: s,
                        label,
                    });
                }
            }
        }
    }
    edges.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DataEdge {
    pub def: NodeId,
    pub use_site: NodeId,
    pub var: VarId,
}

/// Def-use edges from iterative reaching definitions, loop-carried edges included.
pub fn data_dependence(cfg: &Cfg) -> Vec<DataEdge> {
    let defs: Vec<(NodeId, VarId)> = cfg
        .node_ids()
        .flat_map(|n| cfg.node(n).defs.iter().map(move |&v| (n, v)))
        .collect();
    let nd = defs.len();
    let n = cfg.len();

    let mut gen = vec![BitSet::new(nd); n];
    let mut kill = vec![BitSet::new(nd); n];
    for (i, &(node, var)) in defs.iter().enumerate() {
        gen[node.index()].insert(i);
        for (j, &(other, v)) in defs.iter().enumerate() {
            if v == var && other != node {
                kill[node.index()].insert(j);
            }
        }
    }

    let mut out_sets = gen.clone();
    let mut in_sets = vec![BitSet::new(nd); n];
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            let mut inp = BitSet::new(nd);
            for p in &cfg.preds[i] {
                inp.union_with(&out_sets[p.index()]);
            }
            let mut out = inp.clone();
            out.subtract(&kill[i]);
            out.union_with(&gen[i]);
            in_sets[i] = inp;
            if out != out_sets[i] {
                out_sets[i] = out;
                changed = true;
            }
        }
    }

    let mut edges = BTreeSet::new();
    for b in cfg.node_ids() {
        for &v in &cfg.node(b).uses {
            for d in in_sets[b.index()].iter() {
                let (a, dv) = defs[d];
                if dv == v {
                    edges.insert(DataEdge {
                        def: a,
                        use_site: b,
                        var: v,
                    });
                }
            }
        }
    }
    edges.into_iter().collect()
}

/// Definitions of `var` that reach the start of `node`.
pub fn reaching_definitions_of(cfg: &Cfg, node: NodeId, var: VarId) -> Vec<NodeId> {
    // One-variable reaching-definitions search backwards from `node`.
    let mut found = BTreeSet::new();
    let mut seen = BitSet::new(cfg.len());
    let mut stack: Vec<NodeId> = cfg.preds[node.index()].clone();
    while let Some(p) = stack.pop() {
        if !seen.insert(p.index()) {
            continue;
        }
        if cfg.node(p).defs.contains(&var) {
            found.insert(p);
        } else {
            stack.extend(cfg.preds[p.index()].iter().copied());
        }
    }
    found.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Dependence {
    Data { var: VarId },
    Control { label: EdgeLabel },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PdgEdge {
    pub from: NodeId,
    pub to: NodeId,
    pub dep: Dependence,
}

/// Program dependence graph over the CFG's node set.
#[derive(Clone, Debug)]
pub struct Pdg {
    pub cfg: Cfg,
    /// Canonically ordered.
    pub edges: Vec<PdgEdge>,
    preds: Vec<Vec<usize>>,
    pub warnings: Vec<Diagnostic>,
}

impl Pdg {
    pub fn len(&self) -> usize {
        self.cfg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cfg.is_empty()
    }

    /// Edges entering `n`.
    pub fn incoming(&self, n: NodeId) -> impl Iterator<Item = &PdgEdge> {
        self.preds[n.index()].iter().map(|&i| &self.edges[i])
    }

    /// Whether a dependence path leads from `from` to `to`.
    pub fn has_path(&self, from: NodeId, to: NodeId) -> bool {
        let mut seen = BitSet::new(self.len());
        let mut stack = vec![to];
        while let Some(n) = stack.pop() {
            if n == from {
                return true;
            }
            if seen.insert(n.index()) {
                stack.extend(self.incoming(n).map(|e| e.from));
            }
        }
        false
    }

    pub fn to_dot(&self, title: &str, var_name: &dyn Fn(VarId) -> String) -> String {
        let mut out = format!("digraph \"{}\" {{\n  node [shape=box];\n", escape(title));
        for (i, n) in self.cfg.nodes.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", escape(&n.label));
        }
        for e in &self.edges {
            let attr = match e.dep {
                Dependence::Data { var } => format!("label=\"{}\"", escape(&var_name(var))),
                Dependence::Control { label } => {
                    let l = match label {
                        EdgeLabel::True => "T",
                        EdgeLabel::False => "F",
                        EdgeLabel::Seq => "",
                    };
                    format!("label=\"{l}\", style=dashed")
                }
            };
            let _ = writeln!(out, "  n{} -> n{} [{attr}];", e.from.0, e.to.0);
        }
        out.push_str("}\n");
        out
    }
}

pub fn build_pdg(cfg: &Cfg) -> Pdg {
    let pdom = post_dominators(cfg);
    let mut edges: Vec<PdgEdge> = data_dependence(cfg)
        .into_iter()
        .map(|d| PdgEdge {
            from: d.def,
            to: d.use_site,
            dep: Dependence::Data { var: d.var },
        })
        .chain(
            control_dependence_with(cfg, &pdom)
                .into_iter()
                .map(|c| PdgEdge {
                    from: c.condition,
                    to: c.dependent,
                    dep: Dependence::Control { label: c.label },
                }),
        )
        .collect();
    edges.sort();
    edges.dedup();
    let mut preds = vec![Vec::new(); cfg.len()];
    for (i, e) in edges.iter().enumerate() {
        preds[e.to.index()].push(i);
    }
    Pdg {
        warnings: pdom.diagnostics(cfg),
        cfg: cfg.clone(),
        edges,
        preds,
    }
}

/// Convenience: CFG and PDG of a program.
pub fn pdg_of(program: &Program) -> Pdg {
    build_pdg(&build_cfg(program))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse;

    const MOTIVATING: &str = include_str!("../../../benchmarks/motivating_example.ctl");

    fn node_by_label(cfg: &Cfg, label: &str) -> NodeId {
        let found: Vec<_> = cfg.node_ids().filter(|&n| cfg.node(n).label == label).collect();
        assert_eq!(found.len(), 1, "label {label:?}");
        found[0]
    }

    /// Post-dominance straight from the definition: `a` post-dominates `b` iff
    /// removing `a` disconnects `b` from the exit.
    fn brute_pdom(cfg: &Cfg, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return true;
        }
        let mut seen = vec![false; cfg.len()];
        let mut stack = vec![b];
        while let Some(n) = stack.pop() {
            if n == a || std::mem::replace(&mut seen[n.index()], true) {
                continue;
            }
            if n == NodeId::EXIT {
                return false;
            }
            stack.extend(cfg.succs[n.index()].iter().map(|(s, _)| *s));
        }
        true
    }

    #[test]
    fn motivating_has_three_conditions() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        assert_eq!(cfg.len(), p.stmt_count() + 2);
        let mut conds: Vec<_> = cfg
            .condition_nodes()
            .into_iter()
            .map(|n| cfg.node(n).label.clone())
            .collect();
        conds.sort();
        assert_eq!(conds, vec!["count < 7", "x > 10", "y == 1"]);
        for c in cfg.condition_nodes() {
            let labels: Vec<_> = cfg.succs[c.index()].iter().map(|e| e.1).collect();
            assert_eq!(labels, vec![EdgeLabel::True, EdgeLabel::False]);
        }
    }

    #[test]
    fn straight_line_is_a_path() {
        let p = parse("int f() { int a = 1; int b = a; int c = b; return c; }").unwrap();
        let cfg = build_cfg(&p);
        assert_eq!(cfg.len(), 6);
        for n in cfg.node_ids().filter(|&n| n != NodeId::EXIT) {
            assert_eq!(cfg.succs[n.index()].len(), 1);
        }
        assert!(control_dependence(&cfg).is_empty());
    }

    #[test]
    fn empty_infinite_loop_points_at_itself() {
        let p = parse("void g() { while (true) { } }");
        // no output on the looping path is vacuous; the parser accepts it
        let p = p.unwrap();
        let cfg = build_cfg(&p);
        let c = NodeId::of_stmt(StmtId(0));
        assert_eq!(cfg.succs[c.index()], vec![(c, EdgeLabel::True), (NodeId::EXIT, EdgeLabel::False)]);
    }

    #[test]
    fn motivating_post_dominance() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        let pdom = post_dominators(&cfg);
        assert!(pdom.unreachable_exit.is_empty());
        let inc = node_by_label(&cfg, "count := count + 1");
        let two = node_by_label(&cfg, "output := 2");
        assert!(pdom.post_dominates(inc, two));
        assert!(brute_pdom(&cfg, inc, two));
        for a in cfg.node_ids() {
            assert!(pdom.post_dominates(NodeId::EXIT, a));
            for b in cfg.node_ids() {
                assert_eq!(pdom.post_dominates(a, b), brute_pdom(&cfg, a, b), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn path_and_diamond_post_dominance() {
        // entry(0) -> 2 -> 3 -> exit(1)
        let cfg = Cfg::synthetic(4, &[(0, 2), (2, 3), (3, 1)]);
        let pdom = post_dominators(&cfg);
        let set = pdom.of(NodeId(2)).unwrap();
        assert!(set.contains(&NodeId(2)) && set.contains(&NodeId(3)) && set.contains(&NodeId(1)));

        let p = parse("int f(int x) { int a = 0; if (x > 0) { a = 1; } else { a = 2; } return a; }")
            .unwrap();
        let cfg = build_cfg(&p);
        let pdom = post_dominators(&cfg);
        let cond = node_by_label(&cfg, "x > 0");
        let join = node_by_label(&cfg, "return a");
        assert!(pdom.post_dominates(join, cond));
    }

    #[test]
    fn unreachable_exit_is_reported() {
        // 2 <-> 3 cycle never reaches the exit
        let cfg = Cfg::synthetic(5, &[(0, 4), (4, 2), (4, 1), (2, 3), (3, 2)]);
        let pdom = post_dominators(&cfg);
        assert_eq!(pdom.unreachable_exit, vec![NodeId(2), NodeId(3)]);
        assert_eq!(pdom.diagnostics(&cfg).len(), 2);
        assert!(control_dependence(&cfg).iter().all(|e| e.dependent != NodeId(2)));
    }

    #[test]
    fn motivating_control_dependence_chain() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        let cd = control_dependence(&cfg);
        let has = |c: &str, s: &str| {
            let (c, s) = (node_by_label(&cfg, c), node_by_label(&cfg, s));
            cd.iter().any(|e| e.condition == c && e.dependent == s)
        };
        assert!(has("y == 1", "output := 2"));
        assert!(has("x > 10", "y == 1"));
        assert!(has("count < 7", "x > 10"));
        assert!(!has("x > 10", "count := count + 1"));
        assert!(!has("count < 7", "return output"));
        assert!(has("count < 7", "count < 7"));
        assert!(!has("x > 10", "x > 10"));
    }

    #[test]
    fn single_if_has_one_control_edge() {
        let p = parse("int f(int x) { int a = 0; if (x > 0) { a = 1; } return a; }").unwrap();
        let cd = control_dependence(&build_cfg(&p));
        assert_eq!(cd.len(), 1);
    }

    #[test]
    fn data_dependence_examples() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        let dd = data_dependence(&cfg);
        let output = p.find_var("output").unwrap();
        let inc = node_by_label(&cfg, "output := output + 1");
        let ret = node_by_label(&cfg, "return output");
        assert!(dd.contains(&DataEdge { def: inc, use_site: ret, var: output }));
        // loop-carried: the increment reads its own previous value
        assert!(dd.contains(&DataEdge { def: inc, use_site: inc, var: output }));

        let p = parse("int f() { int a = 1; int b = a; return b; }").unwrap();
        let dd = data_dependence(&build_cfg(&p));
        let a = p.find_var("a").unwrap();
        assert_eq!(dd.iter().filter(|e| e.var == a).count(), 1);

        let p = parse("int f() { int a = 1; a = 2; int b = a; return b; }").unwrap();
        let dd = data_dependence(&build_cfg(&p));
        let a_edges: Vec<_> = dd.iter().filter(|e| e.var == a).collect();
        assert_eq!(a_edges.len(), 1);
        assert_eq!(a_edges[0].def, NodeId::of_stmt(StmtId(1)));
    }

    #[test]
    fn pdg_examples() {
        let p = parse(MOTIVATING).unwrap();
        let pdg = pdg_of(&p);
        let alarm_true = node_by_label(&pdg.cfg, "alarm := true");
        let ret = node_by_label(&pdg.cfg, "return output");
        assert!(!pdg.has_path(alarm_true, ret));
        assert!(pdg.has_path(node_by_label(&pdg.cfg, "y == 1"), ret));

        let empty = parse("void g() { while (true) { } }").unwrap();
        let _ = empty;
        let p = parse("void g() { int a = input(); output a; }").unwrap();
        let pdg = pdg_of(&p);
        assert_eq!(pdg.edges.len(), 1);
        assert!(matches!(pdg.edges[0].dep, Dependence::Data { .. }));
    }

    #[test]
    fn reaching_definitions_at_a_node() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        let ret = node_by_label(&cfg, "return output");
        let output = p.find_var("output").unwrap();
        assert_eq!(reaching_definitions_of(&cfg, ret, output).len(), 4);
    }

    #[test]
    fn dot_output_mentions_every_node() {
        let p = parse(MOTIVATING).unwrap();
        let cfg = build_cfg(&p);
        let dot = cfg.to_dot("f");
        assert!(dot.starts_with("digraph"));
        assert_eq!(dot.matches("[label=\"T\"]").count(), 3);
    }
}
