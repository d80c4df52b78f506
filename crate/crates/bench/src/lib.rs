//! Shared fixtures for the engine benchmarks.

use seuguard_core::{parse, parse_spec, Bounds, EngineConfig, InputDomain, IntRange, Program, SafetySpec};

/// A benchmark program with the configuration it is analyzed under.
pub struct Fixture {
    pub name: &'static str,
    pub program: Program,
    pub spec: SafetySpec,
    pub config: EngineConfig,
}

fn fixture(name: &'static str, source: &str, property: &str, range: IntRange) -> Fixture {
    let program = parse(source).expect("benchmark parses");
    let config = EngineConfig {
        domain: InputDomain::uniform(&program, range),
        bounds: Bounds {
            unwind: 8,
            ..Bounds::default()
        },
        bits: seuguard_core::BitRange::ALL,
        trigger: seuguard_core::Trigger::NondetAnywhere,
    };
    Fixture {
        name,
        spec: parse_spec(property).expect("property parses"),
        program,
        config,
    }
}

pub fn motivating_example() -> Fixture {
    fixture(
        "motivating_example",
        include_str!("../../../benchmarks/motivating_example.ctl"),
        "always output <= 10",
        IntRange { lo: 0, hi: 20 },
    )
}

pub fn fan_speed_control() -> Fixture {
    fixture(
        "fan_speed_control",
        include_str!("../../../benchmarks/fan_speed_control.ctl"),
        "always fan_speed <= 100",
        IntRange { lo: -10, hi: 60 },
    )
}
