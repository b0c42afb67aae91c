//! Example configurations compiled into the binary.

use crate::config::RunConfig;

macro_rules! shipped {
    ($($name:literal),* $(,)?) => {
        /// `(name, JSON text)` for every shipped example.
        pub const SHIPPED: &[(&str, &str)] = &[
            $(($name, include_str!(concat!("../../../configs/", $name, ".json")))),*
        ];
    };
}

shipped!(
    "two_end_path",
    "two_end_cone",
    "three_end_cone",
    "four_end_star",
    "quadratic_decay_cone",
    "quadratic_decay_path",
    "three_end_mixed",
    "tiny_demo",
    "gaussian",
    "cylinder",
    "conical",
);

pub fn config_text(name: &str) -> Option<&'static str> {
    SHIPPED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

pub fn shipped_config(name: &str) -> Option<RunConfig> {
    config_text(name).map(|t| RunConfig::from_json(t, name).expect("shipped configs are valid"))
}

/// One line per shipped example: name, kind, and description.
pub fn list_examples() -> String {
    let mut out = String::new();
    for (name, _) in SHIPPED {
        let cfg = shipped_config(name).expect("listed");
        let kind = match &cfg.model {
            crate::config::ModelChoice::Manifold(spec) => {
                format!("manifold, {} ends, r_max {}", spec.ends.len(), spec.r_max)
            }
            crate::config::ModelChoice::Soliton(s) => format!("soliton, n = {}", s.n),
        };
        out.push_str(&format!("{name:<22} {kind:<32} {}\n", cfg.description));
    }
    out
}
