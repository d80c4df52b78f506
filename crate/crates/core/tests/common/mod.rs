//! Random programs and graphs for the differential and property tests.
#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use seuguard_core::cfg::Cfg;
use seuguard_core::oracle::{run_concrete, Limits, RunStatus};
use seuguard_core::{
    parse, parse_spec, AnalysisConfig, BitRange, Bounds, EngineConfig, InputDomain, InputVector,
    IntRange, Manifest, Program, SafetySpec, Trigger,
};

pub fn manifest() -> Manifest {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/manifest.toml");
    Manifest::load(&path).expect("benchmark manifest loads")
}

/// A generated program together with everything needed to analyze it.
#[derive(Clone, Debug)]
pub struct Generated {
    pub seed: u64,
    pub source: String,
    pub property: String,
    pub domains: Vec<(String, IntRange)>,
    pub unwind: u32,
    pub max_reads: usize,
}

impl Generated {
    pub fn program(&self) -> Program {
        parse(&self.source).unwrap_or_else(|e| panic!("seed {}: {e:?}\n{}", self.seed, self.source))
    }

    pub fn spec(&self) -> SafetySpec {
        parse_spec(&self.property).unwrap()
    }

    pub fn engine_config(&self) -> EngineConfig {
        let p = self.program();
        let mut domain = InputDomain::uniform(&p, IntRange { lo: 0, hi: 1 })
            .with_overrides(&p, &self.domains)
            .unwrap();
        domain.max_reads = self.max_reads;
        EngineConfig {
            domain,
            bounds: Bounds {
                unwind: self.unwind,
                ..Bounds::default()
            },
            bits: BitRange::ALL,
            trigger: Trigger::NondetAnywhere,
        }
    }

    pub fn analysis_config(&self) -> AnalysisConfig {
        let mut c = AnalysisConfig::new(format!("random-{}", self.seed), &self.source, &self.property);
        c.default_range = IntRange { lo: 0, hi: 1 };
        c.domains = self.domains.clone();
        c.max_reads = self.max_reads;
        c.bounds.unwind = self.unwind;
        c
    }
}

struct Gen {
    rng: ChaCha8Rng,
    out: String,
    /// Statements emitted so far.
    stmts: usize,
    budget: usize,
    counters: usize,
}

impl Gen {
    fn line(&mut self, depth: usize, text: &str) {
        for _ in 0..=depth {
            self.out.push_str("  ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn atom(&mut self, vars: &[String]) -> String {
        if self.rng.gen_bool(0.7) {
            vars.choose(&mut self.rng).unwrap().clone()
        } else {
            self.rng.gen_range(0..10).to_string()
        }
    }

    fn expr(&mut self, vars: &[String], depth: u32) -> String {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return self.atom(vars);
        }
        let l = self.expr(vars, depth - 1);
        match self.rng.gen_range(0..6) {
            0 | 1 => format!("{l} + {}", self.atom(vars)),
            2 => format!("{l} - {}", self.atom(vars)),
            3 => format!("({l}) * {}", self.rng.gen_range(0..4)),
            4 => format!("({l}) / {}", self.rng.gen_range(1..4)),
            _ => format!("({l}) % {}", self.rng.gen_range(2..5)),
        }
    }

    fn cond(&mut self, vars: &[String]) -> String {
        let cmp = *["<", "<=", ">", ">=", "==", "!="].choose(&mut self.rng).unwrap();
        let c = format!("{} {cmp} {}", self.atom(vars), self.expr(vars, 1));
        match self.rng.gen_range(0..8) {
            0 => format!("{c} && {} > {}", self.atom(vars), self.rng.gen_range(0..6)),
            1 => format!("{c} || {} == {}", self.atom(vars), self.rng.gen_range(0..6)),
            _ => c,
        }
    }

    /// Statements assigning only to `targets`, reading `vars`.
    fn block(&mut self, vars: &[String], targets: &[String], depth: usize, nest: usize) {
        let n = self.rng.gen_range(1..=3);
        for _ in 0..n {
            if self.stmts >= self.budget {
                return;
            }
            self.stmts += 1;
            let choice = if nest >= 2 { 0 } else { self.rng.gen_range(0..7) };
            match choice {
                0..=3 => {
                    let t = targets.choose(&mut self.rng).unwrap().clone();
                    let e = self.expr(vars, 2);
                    self.line(depth, &format!("{t} = {e};"));
                }
                4 | 5 => {
                    let c = self.cond(vars);
                    self.line(depth, &format!("if({c}) {{"));
                    self.block(vars, targets, depth + 1, nest + 1);
                    if self.rng.gen_bool(0.5) {
                        self.line(depth, "}");
                        self.line(depth, "else {");
                        self.block(vars, targets, depth + 1, nest + 1);
                    }
                    self.line(depth, "}");
                }
                _ => {
                    let i = format!("i{}", self.counters);
                    self.counters += 1;
                    let bound = self.rng.gen_range(1..=4);
                    self.stmts += 2;
                    self.line(depth, &format!("int {i} = 0;"));
                    self.line(depth, &format!("while({i} < {bound}) {{"));
                    let mut inner = vars.to_vec();
                    inner.push(i.clone());
                    self.block(&inner, targets, depth + 1, nest + 1);
                    self.line(depth + 1, &format!("{i} = {i} + 1;"));
                    self.line(depth, "}");
                }
            }
        }
    }
}

fn param_domains(rng: &mut ChaCha8Rng, params: &[String]) -> Vec<(String, IntRange)> {
    params
        .iter()
        .map(|p| {
            let size = rng.gen_range(2..=8);
            let lo = rng.gen_range(-3..=3);
            (p.clone(), IntRange { lo, hi: lo + size - 1 })
        })
        .collect()
}

/// A property bound near the middle of the fault-free outputs, so that both safe and
/// unsafe runs tend to exist.
fn pick_property(rng: &mut ChaCha8Rng, out: &str, values: &mut [i32]) -> String {
    values.sort_unstable();
    let bound = if values.is_empty() {
        0
    } else {
        values[rng.gen_range(0..values.len())]
    };
    let cmp = *["<=", ">=", "<", "!="].choose(rng).unwrap();
    format!("always {out} {cmp} {bound}")
}

/// A terminating program: up to 3 parameters, at most 20 statements, bounded loops of
/// at most 4 iterations, nesting depth at most 2, division only by nonzero constants.
pub fn random_program(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nparams = rng.gen_range(1..=3);
    let params: Vec<String> = ["a", "b", "c"][..nparams].iter().map(|s| s.to_string()).collect();
    let nlocals = rng.gen_range(1..=3);
    let locals: Vec<String> = (0..nlocals).map(|i| format!("v{i}")).collect();
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0x5eed),
        out: String::new(),
        stmts: 0,
        budget: 16,
        counters: 0,
    };
    let sig: Vec<String> = params.iter().map(|p| format!("int {p}")).collect();
    g.out.push_str(&format!("int gen({}) {{\n", sig.join(", ")));
    let mut vars = params.clone();
    for l in &locals {
        let e = g.expr(&vars, 1);
        g.line(0, &format!("int {l} = {e};"));
        g.stmts += 1;
        vars.push(l.clone());
    }
    g.block(&vars, &locals, 0, 0);
    if g.rng.gen_bool(0.3) {
        let v = vars.choose(&mut g.rng).unwrap().clone();
        g.line(0, &format!("print {v};"));
    }
    let out = locals.choose(&mut g.rng).unwrap().clone();
    g.line(0, &format!("return {out};"));
    g.out.push_str("}\n");

    let mut generated = Generated {
        seed,
        source: g.out,
        property: String::new(),
        domains: param_domains(&mut rng, &params),
        unwind: 8,
        max_reads: InputDomain::DEFAULT_MAX_READS,
    };
    let program = generated.program();
    let placeholder = parse_spec(&format!("always {out} <= 0")).unwrap();
    generated.property = placeholder.to_source();
    let cfg = generated.engine_config();
    let limits = Limits::new(cfg.bounds, &cfg.domain);
    let mut values: Vec<i32> = cfg
        .domain
        .param_vectors()
        .filter_map(|pv| {
            let r = run_concrete(&program, &placeholder, &InputVector::new(pv), None, &limits);
            (r.status == RunStatus::Completed).then(|| r.outputs.last().map(|o| o.value)).flatten()
        })
        .collect();
    generated.property = pick_property(&mut rng, &out, &mut values);
    generated
}

/// A small control loop reading one `input()` per cycle, with a window or instant
/// property over the emitted output. Domains are tiny and the loop runs 3 cycles.
pub fn random_control_loop(seed: u64) -> Generated {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed ^ 0xc7c1e),
        out: String::new(),
        stmts: 0,
        budget: 6,
        counters: 0,
    };
    g.out.push_str("void ctl(int k) {\n");
    g.line(0, "int acc = 0;");
    g.line(0, "int aux = k;");
    g.line(0, "while(true) {");
    g.line(1, "int r = input();");
    let vars: Vec<String> = ["k", "acc", "aux", "r"].iter().map(|s| s.to_string()).collect();
    let targets = vec!["acc".to_string(), "aux".to_string()];
    g.block(&vars, &targets, 1, 1);
    g.line(1, "output acc;");
    g.line(0, "}");
    g.out.push_str("}\n");
    let property = if rng.gen_bool(0.5) {
        let lo = rng.gen_range(-2..=1);
        format!("window acc in ({lo},{}) persist 2", lo + rng.gen_range(1..=4))
    } else {
        format!("always acc <= {}", rng.gen_range(0..=4))
    };
    Generated {
        seed,
        source: g.out,
        property,
        domains: vec![
            ("k".to_string(), IntRange { lo: 0, hi: 1 }),
            ("input".to_string(), IntRange { lo: 0, hi: 2 }),
        ],
        unwind: 3,
        max_reads: 1,
    }
}

/// A connected CFG with `n` nodes: the chain entry, 2, 3, ..., exit plus random extra
/// edges, at most two successors per node.
pub fn random_cfg(seed: u64, max_nodes: usize) -> Cfg {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=max_nodes);
    let mut order: Vec<u32> = (2..n as u32).collect();
    order.shuffle(&mut rng);
    let mut chain = vec![0u32];
    chain.extend(&order);
    chain.push(1);
    let mut edges: Vec<(u32, u32)> = chain.windows(2).map(|w| (w[0], w[1])).collect();
    for &a in &chain[..chain.len() - 1] {
        if rng.gen_bool(0.5) {
            let b = rng.gen_range(1..n as u32);
            if b != a && !edges.contains(&(a, b)) {
                edges.push((a, b));
            }
        }
    }
    Cfg::synthetic(n, &edges)
}
