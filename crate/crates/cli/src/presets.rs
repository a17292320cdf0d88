//! Built-in scenarios, written in the same INI dialect as config files.

use crate::config::{ConfigError, Origin, RawConfig};

const DLINE_SYSTEM: &str = "\
[system]
kind = fine
j_b = 3/2
j_c = 1/2
j_d = 1/2
omega_bd = 1
omega_cd = 1
dipole = uniform
s = 1
";

const DLINE_RUN: &str = "\
[run]
dt = 0.01
t_final = 10
stride = 10
initial = level-uniform
initial_level = b
";

pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    pub body: fn() -> String,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "dline-vacuum",
        summary: "alkali D line (3/2, 1/2 -> 1/2) in free space",
        body: || {
            format!("{DLINE_SYSTEM}\n[environment]\nmodifier = vacuum\nfield = none\n\n{DLINE_RUN}")
        },
    },
    Preset {
        name: "dline-isotropic",
        summary: "D line with an isotropic stimulating field, N = 1",
        body: || {
            format!("{DLINE_SYSTEM}\n[environment]\nmodifier = vacuum\nfield = isotropic\nn_mean = 1\n\n{DLINE_RUN}")
        },
    },
    Preset {
        name: "dline-cos2",
        summary: "D line with an N cos^2(theta) stimulating field, N = 1",
        body: || {
            format!("{DLINE_SYSTEM}\n[environment]\nmodifier = vacuum\nfield = cos2\nn_mean = 1\n\n{DLINE_RUN}")
        },
    },
    Preset {
        name: "dline-paper-k",
        summary: "D line with injected K = diag(4/75, 4/15, 4/75)",
        body: || {
            format!(
                "{DLINE_SYSTEM}\n[environment]\nmodifier = vacuum\nfield = injected\n\
                 k_minus = 4/75\nk_zero = 4/15\nk_plus = 4/75\n\n{DLINE_RUN}"
            )
        },
    },
    Preset {
        name: "dline-cavity",
        summary: "D line between planar mirrors, r = 0.5 (override with --r)",
        body: || {
            format!("{DLINE_SYSTEM}\n[environment]\nmodifier = cavity\nreflectivity = 0.5\nfield = none\n\n{DLINE_RUN}")
        },
    },
    Preset {
        name: "cavity-sweep",
        summary: "D line interference degree over r = 0, 0.3, 0.6, 0.9, 0.99",
        body: || {
            format!(
                "{DLINE_SYSTEM}\n[environment]\nmodifier = cavity\nreflectivity = 0\nfield = none\n\n{DLINE_RUN}\
                 sweep = reflectivity\nsweep_values = 0, 0.3, 0.6, 0.9, 0.99\n"
            )
        },
    },
    Preset {
        name: "dline-photonic",
        summary: "D line with a sigma=+1 band edge between the two transitions",
        body: || PHOTONIC.to_string(),
    },
    Preset {
        name: "photonic-sweep",
        summary: "band edge swept across both transition frequencies",
        body: || {
            format!(
                "{PHOTONIC}sweep = band_edge\n\
                 sweep_values = 3.18e15, 3.2e15, 3.208e15, 3.216e15, 3.224e15, 3.232e15, 3.24e15\n"
            )
        },
    },
    Preset {
        name: "sodium-hyperfine",
        summary: "D line with nuclear spin 3/2 in free space",
        body: || {
            let sys = DLINE_SYSTEM.replace("kind = fine", "kind = hyperfine");
            format!("{sys}nuclear_spin = 3/2\n\n[environment]\nmodifier = vacuum\nfield = none\n\n{DLINE_RUN}")
        },
    },
    Preset {
        name: "single-channel",
        summary: "J = 1 -> 0 decay through one bright level, rate 2/3",
        body: || SINGLE_CHANNEL.to_string(),
    },
];

const PHOTONIC: &str = "\
[system]
kind = fine
j_b = 3/2
j_c = 1/2
j_d = 1/2
omega_bd = 3.232e15
omega_cd = 3.2e15
dipole = uniform
s = 1e13

[environment]
modifier = photonic
band_edge = 3.216e15
curvature = 3
gapped = +1
field = none

[run]
dt = 1e-15
t_final = 1e-12
stride = 10
initial = level-uniform
initial_level = b
";

const SINGLE_CHANNEL: &str = "\
[system]
kind = fine
j_b = 1
j_c = 1
j_d = 0
omega_bd = 1
omega_cd = 1
dipole = explicit
mu_b = 3
mu_c = 0
prefactor = 1/3

[environment]
modifier = vacuum
field = none

[run]
dt = 0.001
t_final = 10
stride = 100
initial = single-sublevel
initial_state = b M=0
operators = relaxation
";

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.name).collect()
}

pub fn load(name: &str) -> Result<RawConfig, ConfigError> {
    let p = find(name).ok_or_else(|| {
        ConfigError::bare(format!(
            "unknown preset `{name}` (available: {})",
            names().join(", ")
        ))
    })?;
    RawConfig::parse(&(p.body)(), |line| Origin::Preset {
        name: name.to_string(),
        line,
    })
}
