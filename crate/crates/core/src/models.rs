//! Bundled benchmark models.
//!
//! The handshake family models a connection initiator with exponential
//! backoff. Locations are encoded in one variable so that `Wait` is a single
//! inequality: `loc = 0` Closed, `1` Established, `2` Exhausted, `3` Wait.
//! `delay` is the remaining waiting time and `done` the number of retransmissions.

use std::fmt::Write;

/// Parameters of a handshake model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Handshake {
    /// Initial waiting times are drawn from `[0, 2·scale − 1]`, doubling per retry.
    pub scale: i64,
    /// Number of transmission attempts before giving up.
    pub attempts: i64,
    /// Upper end of the declared `done` range; defaults to `attempts − 1`.
    pub done_max: Option<i64>,
    /// Rank of Closed states in the accepting automaton state; defaults to the q0 constant.
    pub closed_rank: Option<i64>,
}

impl Handshake {
    pub fn new(scale: i64, attempts: i64) -> Self {
        assert!(scale >= 1 && attempts >= 1);
        Handshake { scale, attempts, done_max: None, closed_rank: None }
    }

    /// Largest waiting time: `scale · 2^attempts − 1`.
    pub fn delay_max(&self) -> i64 {
        self.scale * (1 << self.attempts) - 1
    }

    /// Number of states of the declared box.
    pub fn box_size(&self) -> i64 {
        4 * (self.delay_max() + 1) * (self.done_max.unwrap_or(self.attempts - 1) + 1)
    }

    /// Full `.zkgc` unit: system, automaton for "eventually always Wait", ranking.
    pub fn source(&self) -> String {
        let a = self.attempts;
        let d = self.scale;
        let dmax = self.delay_max();
        let done_max = self.done_max.unwrap_or(a - 1);
        let slope = dmax + 1;
        let base = slope * (a - 1) + 1;
        let top = slope * a;
        let closed = self.closed_rank.unwrap_or(top);

        let mut s = String::new();
        s.push_str("system {\n");
        s.push_str("  var loc in [0, 3];\n");
        let _ = writeln!(s, "  var delay in [0, {dmax}];");
        let _ = writeln!(s, "  var done in [0, {done_max}];");
        s.push_str("  init: loc = 0, delay = 0, done = 0;\n");
        s.push_str("  command idle: guard loc = 0 update skip;\n");
        let _ = writeln!(s, "  command syn: guard loc = 0 update loc' = 3, delay' >= 0, delay' <= {}, done' = 0;", 2 * d - 1);
        let _ = writeln!(
            s,
            "  command tick: guard loc = 3, delay >= 1, delay <= {dmax}, done >= 0, done <= {} update delay' = delay - 1;",
            a - 1
        );
        for k in 0..a - 1 {
            let _ = writeln!(
                s,
                "  command retry{k}: guard loc = 3, delay = 0, done = {k} update done' = {}, delay' >= 0, delay' <= {};",
                k + 1,
                d * (1 << (k + 2)) - 1
            );
        }
        let _ = writeln!(s, "  command give_up: guard loc = 3, delay = 0, done = {} update loc' = 2;", a - 1);
        s.push_str("  command synack: guard loc = 3 update loc' = 1;\n");
        s.push_str("  command settled: guard loc >= 1, loc <= 2 update skip;\n");
        s.push_str("}\n\n");

        s.push_str("automaton {\n");
        s.push_str("  vars: loc, delay, done;\n");
        s.push_str("  states: q0, q1;\n");
        s.push_str("  init: q0;\n");
        s.push_str("  aps: Wait := loc >= 3;\n");
        s.push_str("  trans:\n");
        s.push_str("    q0 -- true --> q0;\n");
        s.push_str("    q0 -- {Wait} --> q1;\n");
        s.push_str("    q1 -- {Wait} --> q1 fair;\n");
        s.push_str("}\n\n");

        s.push_str("ranking {\n");
        s.push_str("  at q0:\n");
        let _ = writeln!(s, "    case loc <= 2 => {top};");
        let _ = writeln!(s, "    case loc >= 3, done <= {} => {top};", a - 1);
        let _ = writeln!(s, "    inf loc >= 3, done >= {a};");
        s.push_str("  at q1:\n");
        let _ = writeln!(s, "    case loc <= 0 => {closed};");
        s.push_str("    case loc >= 1, loc <= 2 => 0;\n");
        let _ = writeln!(
            s,
            "    case loc >= 3, done >= 0, done <= {}, delay >= 0 => {base} - {slope}*done + delay;",
            a - 1
        );
        let _ = writeln!(s, "    inf loc >= 3, done >= {a};");
        s.push_str("    inf loc >= 3, done <= -1;\n");
        let _ = writeln!(s, "    inf loc >= 3, done >= 0, done <= {}, delay <= -1;", a - 1);
        s.push_str("}\n");
        s
    }
}

/// The 32-state instance (`scale = 1`, two attempts) used for the explicit benchmark.
///
/// Closed states rank 3 at q1; their value there is unconstrained by the
/// conditions, and this choice gives 104 batch elements in total.
pub fn handshake_small() -> Handshake {
    Handshake { closed_rank: Some(3), ..Handshake::new(1, 2) }
}

/// The figure-sized instance: 8-bit delay, 2-bit retransmission counter,
/// waiting times starting in `[0, 63]`.
pub fn handshake_figure() -> Handshake {
    Handshake { done_max: Some(3), ..Handshake::new(32, 3) }
}
