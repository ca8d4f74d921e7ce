//! Network files shipped with the binary.

pub struct Example {
    pub name: &'static str,
    pub summary: &'static str,
    pub text: &'static str,
}

pub const EXAMPLES: &[Example] = &[
    Example {
        name: "fig1",
        summary: "beamsplitter, squeezer and cavity in a delayed optical loop",
        text: include_str!("../networks/fig1.qnet"),
    },
    Example {
        name: "fig3",
        summary: "in-loop squeezer network at eps = 1/4, cosh r = 2, gamma = 1",
        text: include_str!("../networks/fig3.qnet"),
    },
    Example {
        name: "fig4",
        summary: "beamsplitter loop with delay tau = eps/gamma, eps = 1/2",
        text: include_str!("../networks/fig4.qnet"),
    },
    Example {
        name: "dpa",
        summary: "degenerate parametric amplifier, kappa = 2, eps = 1",
        text: include_str!("../networks/dpa.qnet"),
    },
    Example {
        name: "cavity",
        summary: "detuned cavity, gamma = 2, omega = 1",
        text: include_str!("../networks/cavity.qnet"),
    },
    Example {
        name: "squeezed_cavity",
        summary: "cavity driven through a squeezer with r = ln 2",
        text: include_str!("../networks/squeezed_cavity.qnet"),
    },
];

/// Looks up `name` or `name.qnet`.
pub fn find(name: &str) -> Option<&'static Example> {
    let stem = name.strip_suffix(".qnet").unwrap_or(name);
    EXAMPLES.iter().find(|e| e.name == stem)
}
