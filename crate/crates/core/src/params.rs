//! Named constants of every algorithm, with paper defaults and desk presets.
//!
//! Logarithms are base 2 unless they appear inside an exponential, where
//! they are natural.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Paper,
    Desk,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper-faithful",
            Mode::Desk => "desk-scaled",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-faithful" => Ok(Mode::Paper),
            "desk" | "desk-scaled" | "scaled" => Ok(Mode::Desk),
            _ => Err(Error::InvalidParams(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Sequential,
    Colored,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Sequential => "sequential",
            Engine::Colored => "colored",
        })
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sequential" => Ok(Engine::Sequential),
            "colored" => Ok(Engine::Colored),
            _ => Err(Error::InvalidParams(format!("unknown rounding engine {s:?}"))),
        }
    }
}

macro_rules! params {
    ($( $(#[$doc:meta])* $name:ident : $ty:ty = $paper:expr, $desk:expr; )*) => {
        #[derive(Clone, Debug, PartialEq)]
        pub struct Params {
            pub mode: Mode,
            $( $(#[$doc])* pub $name: $ty, )*
        }

        impl Params {
            pub fn paper() -> Self {
                Params { mode: Mode::Paper, $( $name: $paper, )* }
            }

            pub fn desk() -> Self {
                Params { mode: Mode::Desk, $( $name: $desk, )* }
            }

            /// Overrides one constant by name.
            pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
                let bad = || Error::InvalidParams(format!("bad value {value:?} for {key}"));
                match key {
                    "mode" => {
                        let mode: Mode = value.parse()?;
                        let mut fresh = match mode { Mode::Paper => Params::paper(), Mode::Desk => Params::desk() };
                        std::mem::swap(self, &mut fresh);
                        Ok(())
                    }
                    $( stringify!($name) => { self.$name = value.parse().map_err(|_| bad())?; Ok(()) } )*
                    _ => Err(Error::InvalidParams(format!("unknown parameter {key:?}"))),
                }
            }

            /// Every constant as `(name, value)`, in declaration order.
            pub fn entries(&self) -> Vec<(&'static str, String)> {
                let mut out = vec![("mode", self.mode.to_string())];
                $( out.push((stringify!($name), self.$name.to_string())); )*
                out
            }

            pub fn keys() -> Vec<&'static str> {
                vec!["mode", $( stringify!($name), )*]
            }
        }
    };
}

params! {
    /// Rounding engine for every derandomized step.
    engine: Engine = Engine::Sequential, Engine::Sequential;
    /// Defective coloring uses `defect_colors * R` colors.
    defect_colors: usize = 2, 2;
    /// Target defect parameter R of the colored engine.
    defect_r: usize = 10, 10;

    /// Single-step bad nodes need |Γ(u)| ≥ (1/ε)^gate_exponent; only such
    /// nodes enter the single-step cost.
    gate_exponent: f64 = 7.0, 1.0;
    /// Degree exponent constant of the e^{c·T} preconditions.
    c_exp: f64 = 100.0, 0.0;
    /// Smallest admissible Δ_U of the main sampling routine.
    c_min_delta: f64 = 16.0, 4.0;
    /// Bad importance bound IMP/Δ_U^badness_exponent.
    badness_exponent: f64 = 5.0, 5.0;
    /// Bad importance bound δ·IMP used instead in desk mode.
    sample_delta: f64 = 0.1, 0.1;
    /// T_inner = ⌈(log log Δ_U)^t_inner_exponent⌉, at least t_inner_min.
    t_inner_exponent: f64 = 10.0, 1.0;
    t_inner_min: u32 = 10, 4;
    /// T_outer = ⌈t_outer_factor · ln Δ_U / T_inner⌉.
    t_outer_factor: f64 = 0.5, 0.5;
    /// T_rep = ⌈t_rep_factor · log Δ_U⌉.
    t_rep_factor: f64 = 10.0, 0.3;
    /// Cap on Σ_u |Γ(u)| of any materialized bipartite instance.
    virtual_cap: usize = 200_000_000, 60_000_000;

    /// Sparsification stops once Δ_W ≤ rs_min_degree.
    rs_min_degree: f64 = 16.0, 32.0;
    rs_delta: f64 = 0.1, 0.1;

    /// d = ⌈log N · (log log N)^nd_d_exponent⌉.
    nd_d_exponent: f64 = 1.0, 0.0;
    /// Base case once B ≤ max((log N)^nd_base_exponent, nd_base_floor).
    nd_base_exponent: f64 = 10.0, 1.5;
    nd_base_floor: f64 = 0.0, 256.0;
    /// Lower end of the admissible B range, (log N)^nd_low_exponent.
    nd_low_exponent: f64 = 5.0, 1.0;
    /// C(B) = color_scale·max(1, ⌈(1 − loglog_slack/log log B)·log B⌉); the
    /// same slack appears in the head-start cap.
    color_scale: u64 = 50, 50;
    loglog_slack: f64 = 100.0, 1.9;
    /// The base case runs ⌈base_color_factor · log log N⌉ clustering rounds.
    base_color_factor: f64 = 100.0, 4.5;
    /// Base-case head starts are multiplied by ⌈(log log N)^headstart_scale_exponent⌉.
    headstart_scale_exponent: f64 = 20.0, 1.0;
    /// Frontier slack of the original head starts, ⌈(log log N)^frontier_wide_exponent⌉.
    frontier_wide_exponent: f64 = 10.0, 2.0;
    /// Frontier slack of the evolving head starts, ⌈(log log N)^frontier_narrow_exponent⌉.
    frontier_narrow_exponent: f64 = 2.0, 1.0;
    /// Frontier-reduction rounds, ⌈(log log N)^reduce_rounds_exponent⌉.
    reduce_rounds_exponent: f64 = 2.0, 1.0;
    /// Frontier size cap (log log N)^frontier_cap_exponent.
    frontier_cap_exponent: f64 = 3.0, 3.0;
    /// Admissible wide frontier size, (log N)^frontier_size_exponent.
    frontier_size_exponent: f64 = 100.0, 100.0;
    /// Head-start bump per reduction round, ⌈bump_factor·(log log N)^frontier_narrow_exponent⌉.
    bump_factor: f64 = 10.0, 1.0;
    /// Separation used by the small-boundary clustering is at least this.
    s_min: usize = 100, 12;
    /// Rounds of the small-boundary clustering: low_degree_factor · DEG.
    low_degree_factor: usize = 1000, 1000;
    /// Every emitted component has strong diameter ≤ c_diam · log n.
    c_diam: f64 = 20.0, 20.0;
    nd_delta: f64 = 0.1, 0.1;

    /// k = ⌈(log N)^{2/3}⌉ unless overridden (0 = formula).
    mis_k: u64 = 0, 0;
    /// Copies per node in the MIS head-start refinement: mis_radius_factor · k.
    mis_radius_factor: u64 = 100, 10;
    /// MIS base case once B ≤ N^{mis_base_exponent / k}, and at least mis_base_floor.
    mis_base_exponent: f64 = 1.0, 1.0;
    mis_base_floor: f64 = 1.0, 256.0;
    /// Base case runs ⌈luby_rounds_factor · log N / k⌉ halving rounds.
    luby_rounds_factor: f64 = 200.0, 200.0;
    mis_delta: f64 = 0.1, 0.1;
    /// Seed of the Las Vegas partial rounding.
    seed: u64 = 1, 1;
    /// Retry cap of the Las Vegas partial rounding.
    max_tries: usize = 1000, 1000;
}

impl Default for Params {
    fn default() -> Self {
        Params::desk()
    }
}

impl Params {
    pub fn for_mode(mode: Mode) -> Self {
        match mode {
            Mode::Paper => Params::paper(),
            Mode::Desk => Params::desk(),
        }
    }

    /// Constants whose value differs from the paper default.
    pub fn overrides(&self) -> Vec<(&'static str, String, String)> {
        let paper = Params::paper().entries();
        self.entries()
            .into_iter()
            .zip(paper)
            .filter(|(a, b)| a.1 != b.1)
            .map(|(a, b)| (a.0, b.1, a.1))
            .collect()
    }
}

/// log₂ x, clamped below at 1 so iterated logarithms stay defined.
pub fn lg(x: f64) -> f64 {
    x.max(2.0).log2()
}

/// log₂ log₂ x, clamped below at 1.
pub fn lglg(x: f64) -> f64 {
    lg(lg(x))
}

/// Iterated logarithm log* x.
pub fn log_star(mut x: f64) -> u64 {
    let mut k = 0;
    while x > 1.0 {
        x = x.log2();
        k += 1;
    }
    k
}
