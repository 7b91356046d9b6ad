//! Sign-change detection on sampled trajectories.

use serde::Serialize;

use crate::schedule::ImpulseSchedule;
use crate::trajectory::{snap_tol, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Oscillatory,
    #[serde(rename = "nonoscillatory-on-horizon")]
    Nonoscillatory,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillationOptions {
    /// Only sign changes at or after this time count.
    pub t_min: f64,
    pub min_changes: usize,
    /// A nonoscillatory verdict needs `|x| > floor` on the window.
    pub floor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Oscillation {
    pub verdict: Verdict,
    /// Sign-change times in the window, strictly increasing.
    pub xi: Vec<f64>,
    pub count: usize,
    /// Sign of the last sampled value: 1, −1 or 0.
    pub eventual_sign: i8,
    pub min_abs: f64,
    pub window: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// One node of a flattened solution. `jump` means the node is reached from
/// the previous one by a jump at the node's time rather than along a
/// straight segment.
#[derive(Debug, Clone, Copy)]
struct Node {
    t: f64,
    v: f64,
    jump: bool,
}

fn events(nodes: &[Node]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    let push = |t: f64, out: &mut Vec<f64>| {
        if out.last().is_none_or(|&last| t > last) {
            out.push(t);
        }
    };
    let mut in_zero = nodes.first().is_some_and(|n| n.v == 0.0);
    if in_zero {
        push(nodes[0].t, &mut out);
    }
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.v == 0.0 {
            if !in_zero {
                push(b.t, &mut out);
                in_zero = true;
            }
            continue;
        }
        in_zero = false;
        if a.v * b.v < 0.0 {
            let t = if b.jump || b.t == a.t { b.t } else { a.t + (b.t - a.t) * a.v / (a.v - b.v) };
            push(t, &mut out);
        }
    }
    out
}

fn flatten(x: &Trajectory) -> Vec<Node> {
    let (g, r, l) = (x.grid(), x.values_right(), x.values_left());
    let mut nodes = Vec::with_capacity(g.len() + x.marks().len());
    for j in 0..g.len() {
        if l[j].to_bits() != r[j].to_bits() {
            nodes.push(Node { t: g[j], v: l[j], jump: false });
            nodes.push(Node { t: g[j], v: r[j], jump: true });
        } else {
            nodes.push(Node { t: g[j], v: r[j], jump: false });
        }
    }
    nodes
}

fn classify(nodes: &[Node], opts: &OscillationOptions, end: f64) -> Oscillation {
    let window = (opts.t_min, end);
    let in_window: Vec<&Node> = nodes.iter().filter(|n| n.t >= opts.t_min).collect();
    if in_window.is_empty() {
        return Oscillation {
            verdict: Verdict::Indeterminate,
            xi: Vec::new(),
            count: 0,
            eventual_sign: 0,
            min_abs: f64::NAN,
            window,
            note: Some(format!("no samples at or after t_min = {}", opts.t_min)),
        };
    }
    let xi: Vec<f64> = events(nodes).into_iter().filter(|&t| t >= opts.t_min).collect();
    let min_abs = in_window.iter().fold(f64::INFINITY, |m, n| m.min(n.v.abs()));
    let last = in_window[in_window.len() - 1].v;
    let eventual_sign = if last > 0.0 { 1 } else if last < 0.0 { -1 } else { 0 };
    let count = xi.len();
    let verdict = if count >= opts.min_changes.max(1) {
        Verdict::Oscillatory
    } else if count == 0 && min_abs > opts.floor {
        Verdict::Nonoscillatory
    } else {
        Verdict::Indeterminate
    };
    Oscillation { verdict, xi, count, eventual_sign, min_abs, window, note: None }
}

/// Sign changes of `x` on `[t_min, end]`: interior zeros of the linear
/// interpolant, flips across jumps, and runs of exact zeros (counted once).
pub fn detect_oscillation(x: &Trajectory, opts: &OscillationOptions) -> Oscillation {
    classify(&flatten(x), opts, x.end())
}

/// As [`detect_oscillation`], for `x` restricted to the union of the
/// residue-`i` blocks `[θ_{m(ℓ+1)+i}, θ_{m(ℓ+1)+i+1})`, m ≥ 0. Consecutive
/// blocks are glued together, so passing from one block to the next counts
/// as a jump at the start of the later block.
pub fn detect_oscillation_on_residue(
    x: &Trajectory,
    sched: &ImpulseSchedule,
    i: usize,
    opts: &OscillationOptions,
) -> Oscillation {
    let period = sched.period() as i64;
    let all = flatten(x);
    let mut nodes = Vec::new();
    let mut m = 0;
    loop {
        let k = m * period + i as i64;
        let (Some(s), Some(e)) = (sched.theta(k), sched.theta(k + 1)) else { break };
        if s > x.end() + snap_tol(s) {
            break;
        }
        let (ts, te) = (snap_tol(s), snap_tol(e));
        let mut lo = all.partition_point(|n| n.t < s - ts);
        if lo + 1 < all.len() && (all[lo].t - s).abs() <= ts && (all[lo + 1].t - s).abs() <= ts {
            lo += 1;
        }
        let glue = !nodes.is_empty();
        for (j, n) in all[lo..].iter().enumerate() {
            if n.t > e + te {
                break;
            }
            nodes.push(Node { t: n.t, v: n.v, jump: if j == 0 { glue } else { n.jump } });
            if n.t >= e - te {
                break;
            }
        }
        m += 1;
    }
    let end = nodes.last().map_or(x.end(), |n| n.t);
    let mut out = classify(&nodes, opts, end);
    if nodes.is_empty() {
        out.note = Some(format!("residue {i} blocks do not meet the trajectory"));
    }
    out
}
