//! Backward static slicing over the program dependence graph.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::cfg::{reaching_definitions_of, NodeId, NodeKind, Pdg};
use crate::lang::{Program, VarId};

/// Where the slice starts: a node and the variables observed there.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SlicingCriterion {
    pub location: NodeId,
    pub variables: BTreeSet<VarId>,
}

impl SlicingCriterion {
    pub fn new(location: NodeId, variables: impl IntoIterator<Item = VarId>) -> Self {
        SlicingCriterion {
            location,
            variables: variables.into_iter().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Slice {
    pub statements: BTreeSet<NodeId>,
    pub relevant_variables: BTreeSet<VarId>,
}

impl Slice {
    pub fn contains(&self, node: NodeId) -> bool {
        self.statements.contains(&node)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SliceError {
    #[error("slicing location n{0} is not a node of the dependence graph")]
    LocationNotInGraph(u32),
}

/// Predecessor closure from the criterion node and the definitions of the criterion
/// variables that reach it.
pub fn backward_slice(pdg: &Pdg, criterion: &SlicingCriterion) -> Result<Slice, SliceError> {
    backward_slice_multi(pdg, std::slice::from_ref(criterion))
}

/// Union of the slices of several criteria, e.g. one per output point.
pub fn backward_slice_multi(
    pdg: &Pdg,
    criteria: &[SlicingCriterion],
) -> Result<Slice, SliceError> {
    let cfg = &pdg.cfg;
    let mut work = Vec::new();
    let mut relevant = BTreeSet::new();
    for c in criteria {
        if c.location.index() >= pdg.len() {
            return Err(SliceError::LocationNotInGraph(c.location.0));
        }
        work.push(c.location);
        for &v in &c.variables {
            relevant.insert(v);
            work.extend(reaching_definitions_of(cfg, c.location, v));
        }
    }

    let mut statements = BTreeSet::new();
    while let Some(n) = work.pop() {
        if statements.insert(n) {
            work.extend(pdg.incoming(n).map(|e| e.from));
        }
    }
    for &n in &statements {
        let node = cfg.node(n);
        if node.kind == NodeKind::Entry {
            continue;
        }
        relevant.extend(node.uses.iter().chain(&node.defs).copied());
    }
    Ok(Slice {
        statements,
        relevant_variables: relevant,
    })
}

pub fn relevant_variables(slice: &Slice) -> &BTreeSet<VarId> {
    &slice.relevant_variables
}

/// One criterion per output point of the program, observing `var`.
pub fn output_criteria(program: &Program, var: VarId) -> Vec<SlicingCriterion> {
    program
        .output_points()
        .into_iter()
        .map(|s| SlicingCriterion::new(NodeId::of_stmt(s), [var]))
        .collect()
}

/// The source text with a gutter: `  |` for lines that hold a slice statement,
/// `- |` for lines whose statements were all sliced away, and a blank gutter for
/// lines with no statement.
pub fn render_slice(source: &str, program: &Program, slice: &Slice) -> String {
    let lines: Vec<&str> = source.lines().collect();
    let mut kept = vec![false; lines.len() + 1];
    let mut dropped = vec![false; lines.len() + 1];
    program.walk(&mut |s| {
        let line = program.span(s.id).line as usize;
        if line == 0 || line > lines.len() {
            return;
        }
        if slice.contains(NodeId::of_stmt(s.id)) {
            kept[line] = true;
        } else {
            dropped[line] = true;
        }
    });
    let mut out = String::new();
    for (i, text) in lines.iter().enumerate() {
        let gutter = if kept[i + 1] {
            "  |"
        } else if dropped[i + 1] {
            "- |"
        } else {
            "   "
        };
        out.push_str(gutter);
        if !text.is_empty() {
            out.push(' ');
            out.push_str(text);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::pdg_of;
    use crate::lang::parse;

    const MOTIVATING: &str = include_str!("../../../benchmarks/motivating_example.ctl");

    fn names(p: &Program, vars: &BTreeSet<VarId>) -> Vec<String> {
        let mut v: Vec<String> = vars.iter().map(|v| p.var_name(*v).to_string()).collect();
        v.sort();
        v
    }

    fn node_by_label(pdg: &Pdg, label: &str) -> NodeId {
        pdg.cfg
            .node_ids()
            .find(|&n| pdg.cfg.node(n).label == label)
            .unwrap()
    }

    #[test]
    fn motivating_slice_at_return() {
        let p = parse(MOTIVATING).unwrap();
        let pdg = pdg_of(&p);
        let out = p.find_var("output").unwrap();
        let slice = backward_slice_multi(&pdg, &output_criteria(&p, out)).unwrap();
        assert_eq!(names(&p, &slice.relevant_variables), ["count", "output", "x", "y"]);
        assert!(!slice.contains(node_by_label(&pdg, "alarm := true")));
        assert!(!slice.contains(node_by_label(&pdg, "print alarm")));
    }

    #[test]
    fn motivating_slice_at_print() {
        let p = parse(MOTIVATING).unwrap();
        let pdg = pdg_of(&p);
        let alarm = p.find_var("alarm").unwrap();
        let c = SlicingCriterion::new(node_by_label(&pdg, "print alarm"), [alarm]);
        let slice = backward_slice(&pdg, &c).unwrap();
        assert_eq!(names(&p, relevant_variables(&slice)), ["alarm", "count", "x"]);
    }

    #[test]
    fn read_then_output() {
        let p = parse("void g() { int a = input(); output a; }").unwrap();
        let pdg = pdg_of(&p);
        let a = p.find_var("a").unwrap();
        let slice = backward_slice_multi(&pdg, &output_criteria(&p, a)).unwrap();
        assert!(slice.contains(NodeId(2)) && slice.contains(NodeId(3)));
        assert_eq!(names(&p, &slice.relevant_variables), ["a"]);
    }

    #[test]
    fn constant_output_keeps_only_criterion_variable() {
        let p = parse("int f(int x) { int a = x; return 3; }").unwrap();
        let pdg = pdg_of(&p);
        let a = p.find_var("a").unwrap();
        let ret = NodeId::of_stmt(crate::lang::StmtId(1));
        let slice = backward_slice(&pdg, &SlicingCriterion::new(ret, [])).unwrap();
        assert!(slice.relevant_variables.is_empty());
        let slice = backward_slice(&pdg, &SlicingCriterion::new(ret, [a])).unwrap();
        assert_eq!(names(&p, &slice.relevant_variables), ["a", "x"]);
    }

    #[test]
    fn bad_location_is_an_error() {
        let p = parse("int f() { return 3; }").unwrap();
        let pdg = pdg_of(&p);
        assert_eq!(
            backward_slice(&pdg, &SlicingCriterion::new(NodeId(99), [])),
            Err(SliceError::LocationNotInGraph(99))
        );
    }

    #[test]
    fn slice_is_predecessor_closed() {
        let p = parse(MOTIVATING).unwrap();
        let pdg = pdg_of(&p);
        let out = p.find_var("output").unwrap();
        let slice = backward_slice_multi(&pdg, &output_criteria(&p, out)).unwrap();
        for e in &pdg.edges {
            assert!(!slice.contains(e.to) || slice.contains(e.from), "{e:?}");
        }
    }

    #[test]
    fn rendering_marks_excluded_lines() {
        let p = parse(MOTIVATING).unwrap();
        let pdg = pdg_of(&p);
        let out = p.find_var("output").unwrap();
        let slice = backward_slice_multi(&pdg, &output_criteria(&p, out)).unwrap();
        let text = render_slice(MOTIVATING, &p, &slice);
        assert!(text.contains("- |   print alarm;"));
        assert!(text.contains("- |       alarm = true;"));
        assert!(text.contains("  |   return output;"));
    }
}
