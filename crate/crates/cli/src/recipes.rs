//! Named parameter presets, one or more per figure number.
//!
//! Panels that differ only in which matrix element is plotted share one
//! recipe; panels with different parameters get their own suffix. A bare
//! `figN` resolves to the first recipe of that figure.

use cellbath::model::FieldVector;
use cellbath::spin::SpinMagnitude;

use crate::config::{InitialState, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    Dephase,
    Transition,
    Entangle,
}

impl RunKind {
    pub fn name(self) -> &'static str {
        match self {
            RunKind::Dephase => "dephase",
            RunKind::Transition => "transition",
            RunKind::Entangle => "entangle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recipe {
    pub name: &'static str,
    pub figure: u32,
    pub kind: RunKind,
    pub spin: SpinMagnitude,
    pub field: [f64; 3],
    pub temperature: f64,
    pub omega0: f64,
    /// `(alpha, gamma, lambda)`
    pub couplings: [f64; 3],
    pub initial: InitialState,
    pub caption: &'static str,
}

impl Recipe {
    pub fn config(&self) -> RunConfig {
        RunConfig {
            spin: self.spin,
            temperature: self.temperature,
            field: FieldVector::from(self.field),
            omega0: self.omega0,
            alpha: self.couplings[0],
            gamma: self.couplings[1],
            lambda: self.couplings[2],
            initial: Some(self.initial),
            ..RunConfig::default()
        }
    }
}

const HALF: SpinMagnitude = SpinMagnitude::HALF;
const ONE: SpinMagnitude = SpinMagnitude::ONE;
const ISING: [f64; 3] = [0.0, 0.0, 1.0];
const ISO: [f64; 3] = [1.0, 1.0, 1.0];
// |h| = 0.5 split evenly over three and two axes
const H3: f64 = 0.288_675_134_594_812_9;
const H2: f64 = 0.353_553_390_593_273_8;

macro_rules! recipe {
    ($name:expr, $fig:expr, $kind:ident, $s:expr, $h:expr, $t:expr, $w:expr, $cpl:expr, $init:ident, $cap:expr) => {
        Recipe {
            name: $name,
            figure: $fig,
            kind: RunKind::$kind,
            spin: $s,
            field: $h,
            temperature: $t,
            omega0: $w,
            couplings: $cpl,
            initial: InitialState::$init,
            caption: $cap,
        }
    };
}

pub const RECIPES: &[Recipe] = &[
    recipe!(
        "fig2",
        2,
        Dephase,
        HALF,
        [0.0, 0.0, 0.5],
        2.0,
        2.0,
        ISING,
        Plus,
        "h_z=0.5J, h_x=h_y=0, T=2J, S=1/2, w0=2J, alpha=gamma=0, lambda=J (panels a, b)"
    ),
    recipe!(
        "fig2c",
        2,
        Dephase,
        HALF,
        [0.0, 0.0, 0.5],
        2.5,
        2.0,
        ISING,
        Plus,
        "h_z=0.5J, h_x=h_y=0, T=2.5J, S=1/2, w0=2J, alpha=gamma=0, lambda=J (panels c, d)"
    ),
    recipe!(
        "fig3",
        3,
        Dephase,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        2.0,
        ISING,
        Plus,
        "h_x=0.5J, h_z=h_y=0, w0=2J, S=1/2, T=2J, alpha=gamma=0, lambda=J (panels a, b)"
    ),
    recipe!(
        "fig3c",
        3,
        Dephase,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        1.0,
        ISING,
        Plus,
        "h_x=0.5J, h_z=h_y=0, w0=J, S=1/2, T=2J, alpha=gamma=0, lambda=J (panels c, d)"
    ),
    recipe!(
        "fig4",
        4,
        Dephase,
        HALF,
        [H3, H3, H3],
        2.0,
        2.0,
        ISING,
        Plus,
        "h_x=h_y=h_z=J/(2√3), T=2J, S=1/2, w0=2J, alpha=gamma=0, lambda=J (panels a, b)"
    ),
    recipe!(
        "fig4c",
        4,
        Dephase,
        HALF,
        [H3, H3, H3],
        2.5,
        2.0,
        ISING,
        Plus,
        "h_x=h_y=h_z=J/(2√3), T=2.5J, S=1/2, w0=2J, alpha=gamma=0, lambda=J (panels c, d)"
    ),
    recipe!(
        "fig5",
        5,
        Dephase,
        HALF,
        [H2, H2, 0.0],
        2.0,
        2.0,
        ISING,
        Plus,
        "h_x=h_y=J/(2√2), h_z=0, T=2J, S=1/2, w0=2J, alpha=gamma=0, lambda=J"
    ),
    recipe!(
        "fig6",
        6,
        Dephase,
        ONE,
        [0.0, 0.0, 0.5],
        7.0,
        2.0,
        ISING,
        Plus,
        "h_z=0.5J, h_x=h_y=0, T=7J, S=1, w0=2J, alpha=gamma=0, lambda=J (panels a, b)"
    ),
    recipe!(
        "fig6c",
        6,
        Dephase,
        ONE,
        [0.0, 0.0, 0.5],
        7.8,
        2.0,
        ISING,
        Plus,
        "h_z=0.5J, h_x=h_y=0, T=7.8J, S=1, w0=2J, alpha=gamma=0, lambda=J (panels c, d)"
    ),
    recipe!(
        "fig7",
        7,
        Dephase,
        ONE,
        [0.5, 0.0, 0.0],
        7.0,
        2.0,
        ISING,
        Plus,
        "h_x=0.5J, h_z=h_y=0, w0=2J, S=1, T=7J, alpha=gamma=0, lambda=J (panels a, b)"
    ),
    recipe!(
        "fig7c",
        7,
        Dephase,
        ONE,
        [0.5, 0.0, 0.0],
        7.0,
        1.0,
        ISING,
        Plus,
        "h_x=0.5J, h_z=h_y=0, w0=J, S=1, T=7J, alpha=gamma=0, lambda=J (panels c, d)"
    ),
    recipe!(
        "fig8a",
        8,
        Dephase,
        HALF,
        [0.0, 0.0, 0.5],
        2.0,
        2.0,
        ISING,
        Plus,
        "S=1/2, h_z=0.5J, T=2J, h_y=0, alpha=gamma=0, lambda=J (panel a, slow curve)"
    ),
    recipe!(
        "fig8a-x",
        8,
        Dephase,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        2.0,
        ISING,
        Plus,
        "S=1/2, h_x=0.5J, T=2J, h_y=0, alpha=gamma=0, lambda=J (panel a, fast curve)"
    ),
    recipe!(
        "fig8b",
        8,
        Dephase,
        HALF,
        [0.0, 0.0, 0.5],
        2.5,
        2.0,
        ISING,
        Plus,
        "S=1/2, h_z=0.5J, T=2.5J, h_y=0, alpha=gamma=0, lambda=J (panel b, slow curve)"
    ),
    recipe!(
        "fig8b-x",
        8,
        Dephase,
        HALF,
        [0.5, 0.0, 0.0],
        2.5,
        2.0,
        ISING,
        Plus,
        "S=1/2, h_x=0.5J, T=2.5J, h_y=0, alpha=gamma=0, lambda=J (panel b, fast curve)"
    ),
    recipe!(
        "fig8c",
        8,
        Dephase,
        ONE,
        [0.0, 0.0, 0.5],
        7.0,
        2.0,
        ISING,
        Plus,
        "S=1, h_z=0.5J, T=7J, h_y=0, alpha=gamma=0, lambda=J (panel c, slow curve)"
    ),
    recipe!(
        "fig8c-x",
        8,
        Dephase,
        ONE,
        [0.5, 0.0, 0.0],
        7.0,
        2.0,
        ISING,
        Plus,
        "S=1, h_x=0.5J, T=7J, h_y=0, alpha=gamma=0, lambda=J (panel c, fast curve)"
    ),
    recipe!(
        "fig8d",
        8,
        Dephase,
        ONE,
        [0.0, 0.0, 0.5],
        7.8,
        2.0,
        ISING,
        Plus,
        "S=1, h_z=0.5J, T=7.8J, h_y=0, alpha=gamma=0, lambda=J (panel d, slow curve)"
    ),
    recipe!(
        "fig8d-x",
        8,
        Dephase,
        ONE,
        [0.5, 0.0, 0.0],
        7.8,
        2.0,
        ISING,
        Plus,
        "S=1, h_x=0.5J, T=7.8J, h_y=0, alpha=gamma=0, lambda=J (panel d, fast curve)"
    ),
    recipe!(
        "fig9",
        9,
        Transition,
        HALF,
        [0.0, 0.0, 0.5],
        2.0,
        2.0,
        ISO,
        Ground,
        "initial ground state, h_z=0.5J, h_x=h_y=0, T=2J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig10",
        10,
        Transition,
        HALF,
        [0.0, 0.0, 0.5],
        2.5,
        2.0,
        ISO,
        Ground,
        "initial ground state, h_z=0.5J, h_x=h_y=0, T=2.5J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig11a",
        11,
        Transition,
        ONE,
        [0.0, 0.0, 0.5],
        5.0,
        2.0,
        ISO,
        Ground,
        "initial ground state, h_z=0.5J, h_x=h_y=0, T=5J, S=1, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig11b",
        11,
        Transition,
        ONE,
        [0.0, 0.0, 0.5],
        7.0,
        2.0,
        ISO,
        Ground,
        "initial ground state, h_z=0.5J, h_x=h_y=0, T=7J, S=1, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig12",
        12,
        Transition,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        2.0,
        ISO,
        Ground,
        "initial ground state, h_x=0.5J, h_z=h_y=0, T=2J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig13",
        13,
        Transition,
        HALF,
        [1.0, 0.0, 0.0],
        2.0,
        2.0,
        ISO,
        Ground,
        "as fig12 with h_x=J, T=2J"
    ),
    recipe!(
        "fig14",
        14,
        Transition,
        HALF,
        [1.0, 0.0, 0.0],
        2.5,
        2.0,
        ISO,
        Ground,
        "as fig13 with T=2.5J"
    ),
    recipe!(
        "fig15a",
        15,
        Transition,
        HALF,
        [0.0, 0.0, 0.5],
        2.0,
        2.0,
        ISO,
        Plus,
        "initial (|g>+|e>)/√2, h_z=0.5J, h_x=h_y=0, T=2J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig15b",
        15,
        Transition,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        2.0,
        ISO,
        Plus,
        "initial (|g>+|e>)/√2, h_x=0.5J, h_y=h_z=0, T=2J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig16a",
        16,
        Transition,
        HALF,
        [0.0, 0.5, 0.0],
        2.0,
        2.0,
        ISO,
        Plus,
        "initial (|g>+|e>)/√2, h_y=0.5J, h_x=h_z=0, T=2J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig16b",
        16,
        Transition,
        HALF,
        [0.0, 0.5, 0.0],
        2.5,
        2.0,
        ISO,
        Plus,
        "initial (|g>+|e>)/√2, h_y=0.5J, h_x=h_z=0, T=2.5J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig17a",
        17,
        Transition,
        ONE,
        [0.5, 0.0, 0.0],
        5.0,
        0.0,
        ISO,
        Ground,
        "initial ground state, h_x=0.5J, h_y=h_z=0, T=5J, S=1, w0=0, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig17b",
        17,
        Transition,
        ONE,
        [0.5, 0.0, 0.0],
        7.0,
        0.0,
        ISO,
        Ground,
        "initial ground state, h_x=0.5J, h_y=h_z=0, T=7J, S=1, w0=0, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig18a",
        18,
        Entangle,
        HALF,
        [0.0, 0.0, 0.5],
        2.0,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_z=0.5J, T=2J, h_x=h_y=0, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig18b",
        18,
        Entangle,
        HALF,
        [0.0, 0.0, 0.5],
        2.5,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_z=0.5J, h_x=h_y=0, T=2.5J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig19a",
        19,
        Entangle,
        HALF,
        [0.5, 0.0, 0.0],
        2.0,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_x=0.5J, T=2J, h_y=h_z=0, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig19b",
        19,
        Entangle,
        HALF,
        [0.5, 0.0, 0.0],
        2.5,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_x=0.5J, h_y=h_z=0, T=2.5J, S=1/2, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig20a",
        20,
        Entangle,
        ONE,
        [0.0, 0.0, 0.5],
        5.0,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_z=0.5J, T=5J, h_x=h_y=0, S=1, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig20b",
        20,
        Entangle,
        ONE,
        [0.0, 0.0, 0.5],
        7.0,
        2.0,
        ISO,
        BellPair,
        "Bell pair, h_z=0.5J, T=7J, h_x=h_y=0, S=1, w0=2J, alpha=gamma=lambda=J"
    ),
    recipe!(
        "fig21",
        21,
        Entangle,
        ONE,
        [0.5, 0.0, 0.0],
        7.0,
        0.0,
        ISO,
        BellPair,
        "Bell pair, h_x=0.5J, T=7J, h_y=h_z=0, S=1, w0=0, alpha=gamma=lambda=J"
    ),
];

/// Exact recipe name, or `figN` for the first recipe of figure `N`.
pub fn lookup(name: &str) -> Result<&'static Recipe, CliError> {
    let name = name.trim().to_ascii_lowercase();
    if let Some(r) = RECIPES.iter().find(|r| r.name == name) {
        return Ok(r);
    }
    name.strip_prefix("fig")
        .and_then(|n| n.parse::<u32>().ok())
        .and_then(|n| RECIPES.iter().find(|r| r.figure == n))
        .ok_or_else(|| CliError::Config(format!("unknown recipe '{name}'; try `recipe --list`")))
}
