//! Antenna position optimizer: a Dinkelbach outer loop around successive
//! convex approximation (SCA) steps.
//!
//! For a fixed ratio estimate `α` the Dinkelbach subproblem maximizes
//! `R(x) − α E(x)`, which up to the constant `α P_t T` reads
//!
//! ```text
//! T log₂(1 + h(x)/σ²) − δ γ / v − (δ / v) α (P − P_t)
//! ```
//!
//! with `h(x) = P_t ‖h(x)‖²`, `γ = log₂(1 + h(x)/σ²)` and `δ = |x − x⁰|`. Each
//! SCA step replaces the bilinear term by its arithmetic-geometric upper bound
//! and `h` by quadratic Taylor bounds around the current iterate. Because the
//! position is scalar, the slacks `β, γ, δ` can be eliminated in closed form
//! (each constraint binds), which leaves a concave 1-D problem solved by
//! golden-section search inside a trust window.

use std::fmt;
use std::io::Write;

use crate::channel::GainExpansion;
use crate::ee::{self, EeBreakdown};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::search;

/// Floor on the local rate slack γⁱ used in surrogate coefficients.
const GAMMA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Dinkelbach iterations.
    pub max_outer: usize,
    /// SCA steps per Dinkelbach iteration.
    pub max_inner: usize,
    /// Half-width of the window each SCA step may move in (m).
    pub trust_radius: f64,
    /// Floor on δⁱ in the bilinear surrogate (m).
    pub delta_floor: f64,
    /// Golden-section bracket tolerance (m).
    pub search_tol: f64,
    /// Relative increase of α below which the outer loop stops.
    pub tolerance: f64,
    /// Absolute increase of the subproblem objective below which the SCA
    /// loop stops.
    pub inner_tolerance: f64,
    /// Grid step used to find a feasible restart point when x⁰ violates the
    /// throughput requirement (m).
    pub restart_resolution: f64,
}

impl SolverOptions {
    pub fn for_params(params: &SystemParams) -> Self {
        let lambda = params.wavelength;
        Self {
            max_outer: 100,
            max_inner: 50,
            trust_radius: lambda / 4.0,
            delta_floor: lambda * 1e-6,
            search_tol: lambda * 1e-9,
            tolerance: params.tolerance,
            inner_tolerance: params.tolerance * 1e-3,
            restart_resolution: lambda / 500.0,
        }
    }
}

/// Iterate of the SCA/Dinkelbach scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverState {
    pub iter: usize,
    pub x: f64,
    /// Gain-power slack, `β ≤ h(x)`.
    pub beta: f64,
    /// Rate slack, `γ ≥ log₂(1 + h(x)/σ²)`.
    pub gamma: f64,
    /// Distance slack, `δ ≥ |x − x⁰|`.
    pub delta: f64,
    pub alpha: f64,
    /// Surrogate objective at the iterate, built around the iterate itself.
    pub objective: f64,
    pub converged: bool,
}

impl SolverState {
    /// State at `x` with exact slacks: `β = h(x)`, `γ = log₂(1 + h(x)/σ²)`,
    /// `δ = |x − x⁰|`.
    pub fn at(
        x: f64,
        e: &GainExpansion,
        params: &SystemParams,
        alpha: f64,
        opts: &SolverOptions,
    ) -> Self {
        let h = h_of_x(e, params, x);
        let mut state = Self {
            iter: 0,
            x,
            beta: h,
            gamma: (1.0 + h / params.noise_power).log2(),
            delta: (x - params.initial_position).abs(),
            alpha,
            objective: 0.0,
            converged: false,
        };
        let s = Surrogate::new(&state, e, params, alpha, opts);
        state.objective = s.value(x).unwrap_or(f64::NEG_INFINITY);
        state
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    IterationCap,
    Infeasible,
}

impl fmt::Display for SolverStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverStatus::Converged => "converged",
            SolverStatus::IterationCap => "iteration-cap",
            SolverStatus::Infeasible => "infeasible",
        })
    }
}

/// One accepted step of the optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub outer: usize,
    pub inner: usize,
    pub x: f64,
    pub alpha: f64,
    pub objective: f64,
    pub ee: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub x: f64,
    /// Efficiency at `x`, recomputed from scratch.
    pub ee: EeBreakdown,
    /// Dinkelbach iterations used.
    pub iterations: usize,
    /// SCA subproblems solved in total.
    pub sca_steps: usize,
    pub trace: Vec<TraceRow>,
    pub status: SolverStatus,
    /// x⁰ was infeasible and the search started from the best feasible grid point.
    pub restarted: bool,
    /// Driver power below transmit power; the distance slack then no longer
    /// binds automatically.
    pub outside_power_assumption: bool,
}

impl SolverReport {
    /// The Dinkelbach ratio α after each outer iteration.
    pub fn alphas(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::new();
        for row in &self.trace {
            if row.inner == 0 {
                out.push(row.alpha);
            }
        }
        out
    }

    pub fn write_trace_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "outer,inner,x,alpha,objective,ee")?;
        for r in &self.trace {
            writeln!(
                w,
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.outer, r.inner, r.x, r.alpha, r.objective, r.ee
            )?;
        }
        Ok(())
    }
}

/// `h(x) = P_t ‖h(x)‖²`.
pub fn h_of_x(e: &GainExpansion, params: &SystemParams, x: f64) -> f64 {
    params.max_tx_power * e.gain(x)
}

/// Dinkelbach ratio at `x`: the energy efficiency itself.
pub fn dinkelbach_update(x: f64, e: &GainExpansion, params: &SystemParams) -> Result<f64> {
    Ok(ee::evaluate(e, x, params)?.ee)
}

/// `½ (γⁱ/δⁱ · δ² + δⁱ/γⁱ · γ²)`, an upper bound on `δγ` that is tight at
/// `(δⁱ, γⁱ)`. Local values must be positive.
pub fn bilinear_upper(delta: f64, gamma: f64, delta_i: f64, gamma_i: f64) -> f64 {
    debug_assert!(delta_i > 0.0 && gamma_i > 0.0);
    0.5 * (gamma_i / delta_i * delta * delta + delta_i / gamma_i * gamma * gamma)
}

/// Quadratic bounds `h(xⁱ) + h'(xⁱ)(x − xⁱ) ∓ (ε/2)(x − xⁱ)²` on `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaylorBounds {
    pub center: f64,
    pub value: f64,
    pub slope: f64,
    pub curvature: f64,
}

impl TaylorBounds {
    pub fn lower(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.value + self.slope * d - 0.5 * self.curvature * d * d
    }

    pub fn upper(&self, x: f64) -> f64 {
        let d = x - self.center;
        self.value + self.slope * d + 0.5 * self.curvature * d * d
    }
}

pub fn taylor_bounds(e: &GainExpansion, params: &SystemParams, x_i: f64) -> TaylorBounds {
    TaylorBounds {
        center: x_i,
        value: h_of_x(e, params, x_i),
        slope: e.derivative(params.max_tx_power, x_i),
        curvature: e.curvature(params.max_tx_power),
    }
}

/// Optimal slack values for a fixed position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slacks {
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// The convexified subproblem around one local point.
struct Surrogate<'a> {
    params: &'a SystemParams,
    bounds: TaylorBounds,
    gamma_i: f64,
    delta_i: f64,
    alpha: f64,
}

impl<'a> Surrogate<'a> {
    fn new(
        locals: &SolverState,
        e: &GainExpansion,
        params: &'a SystemParams,
        alpha: f64,
        opts: &SolverOptions,
    ) -> Self {
        Self {
            params,
            bounds: taylor_bounds(e, params, locals.x),
            gamma_i: locals.gamma.max(GAMMA_FLOOR),
            delta_i: locals.delta.max(opts.delta_floor),
            alpha,
        }
    }

    /// Slacks that maximize the surrogate objective at `x`.
    ///
    /// The objective grows with β and shrinks with γ and δ (for `P ≥ P_t`), so
    /// the bounds `β ≤ h_lb(x)`, `δ ≥ |x − x⁰|` and the linearized rate bound
    /// on γ all bind; γ is additionally kept at or above the unconstrained
    /// maximizer 0 of its quadratic.
    fn slacks(&self, x: f64) -> Slacks {
        let sigma2 = self.params.noise_power;
        let beta = self.bounds.lower(x).max(0.0);
        let delta = (x - self.params.initial_position).abs();
        let lin = sigma2 * self.gamma_i.exp2();
        let gamma_min =
            self.gamma_i + (self.bounds.upper(x) - (lin - sigma2)) / (lin * std::f64::consts::LN_2);
        Slacks {
            beta,
            gamma: gamma_min.max(0.0),
            delta,
        }
    }

    /// Left side of the convexified throughput constraint.
    fn rate_lhs(&self, s: &Slacks) -> f64 {
        let p = self.params;
        p.block_duration * (1.0 + s.beta / p.noise_power).log2()
            - bilinear_upper(s.delta, s.gamma, self.delta_i, self.gamma_i) / p.speed
    }

    fn objective(&self, s: &Slacks) -> f64 {
        let p = self.params;
        self.rate_lhs(s) - s.delta / p.speed * self.alpha * (p.movement_power - p.max_tx_power)
    }

    fn feasible(&self, s: &Slacks) -> bool {
        self.rate_lhs(s) >= self.params.min_throughput
    }

    fn value(&self, x: f64) -> Option<f64> {
        let s = self.slacks(x);
        self.feasible(&s).then(|| self.objective(&s))
    }
}

/// Closed-form optimal slacks of the convexified subproblem at position `x`,
/// or `None` when the convexified throughput constraint cannot hold there.
pub fn eliminate_slacks(
    x: f64,
    locals: &SolverState,
    e: &GainExpansion,
    params: &SystemParams,
) -> Option<Slacks> {
    let opts = SolverOptions::for_params(params);
    let s = Surrogate::new(locals, e, params, locals.alpha, &opts);
    let slacks = s.slacks(x);
    s.feasible(&slacks).then_some(slacks)
}

/// Value of the convexified objective at `(x, slacks)` around `locals`, with
/// Dinkelbach ratio `alpha`. Exposed for oracle checks.
pub fn surrogate_objective(
    slacks: &Slacks,
    locals: &SolverState,
    params: &SystemParams,
    alpha: f64,
    opts: &SolverOptions,
) -> f64 {
    let gamma_i = locals.gamma.max(GAMMA_FLOOR);
    let delta_i = locals.delta.max(opts.delta_floor);
    let p = params;
    p.block_duration * (1.0 + slacks.beta / p.noise_power).log2()
        - bilinear_upper(slacks.delta, slacks.gamma, delta_i, gamma_i) / p.speed
        - slacks.delta / p.speed * alpha * (p.movement_power - p.max_tx_power)
}

/// True Dinkelbach objective `R(x) − α E(x) + α P_t T` at `x`.
pub fn parametric_objective(
    e: &GainExpansion,
    params: &SystemParams,
    alpha: f64,
    x: f64,
) -> Option<f64> {
    let b = ee::evaluate(e, x, params).ok()?;
    Some(b.throughput - alpha * b.energy + alpha * params.max_tx_power * params.block_duration)
}

/// Solves one convexified subproblem around `locals` for the ratio `alpha`.
///
/// Returns `None` if the convexified throughput constraint already fails at
/// the local point. Otherwise the returned state is the best position in the
/// trust window, with slacks re-tightened to their exact values there; if no
/// position improves on the local one, the local position is returned.
pub fn solve_subproblem(
    locals: &SolverState,
    e: &GainExpansion,
    params: &SystemParams,
    alpha: f64,
    opts: &SolverOptions,
) -> Option<SolverState> {
    let s = Surrogate::new(locals, e, params, alpha, opts);
    let here = s.value(locals.x)?;

    let reach = params.speed * params.block_duration;
    let x0 = params.initial_position;
    let lo = (locals.x - opts.trust_radius).max(0.0).max(x0 - reach);
    let hi = (locals.x + opts.trust_radius)
        .min(params.region_length)
        .min(x0 + reach);

    // The convexified constraint is concave in x, so its feasible part of the
    // window is an interval around the local point.
    let feasible = |x: f64| s.value(x).is_some();
    let left = if feasible(lo) {
        lo
    } else {
        boundary(&feasible, locals.x, lo, opts.search_tol)
    };
    let right = if feasible(hi) {
        hi
    } else {
        boundary(&feasible, locals.x, hi, opts.search_tol)
    };

    let best = search::golden_section_max(
        |x| s.value(x).unwrap_or(f64::NEG_INFINITY),
        left,
        right,
        opts.search_tol,
    );
    let x = if best.value > here { best.x } else { locals.x };
    let mut next = SolverState::at(x, e, params, alpha, opts);
    next.iter = locals.iter + 1;
    Some(next)
}

/// Last feasible point walking from `inside` towards `outside`.
fn boundary<F: Fn(f64) -> bool>(feasible: &F, inside: f64, outside: f64, tol: f64) -> f64 {
    let (mut good, mut bad) = (inside, outside);
    for _ in 0..200 {
        if (bad - good).abs() <= tol {
            break;
        }
        let mid = 0.5 * (good + bad);
        if feasible(mid) {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Runs the optimizer with default options.
pub fn optimize(e: &GainExpansion, params: &SystemParams) -> Result<SolverReport> {
    optimize_with(e, params, &SolverOptions::for_params(params))
}

pub fn optimize_with(
    e: &GainExpansion,
    params: &SystemParams,
    opts: &SolverOptions,
) -> Result<SolverReport> {
    params.validate()?;
    if (e.wavelength() - params.wavelength).abs() > 1e-12 * params.wavelength {
        return Err(Error::invalid(
            "wavelength",
            "expansion was built for a different wavelength",
        ));
    }
    let outside_power_assumption = params.movement_cheaper_than_tx();
    let x0 = params.initial_position;

    let start = ee::evaluate(e, x0, params)?;
    let (x_start, restarted) = if start.feasible {
        (x0, false)
    } else {
        match best_feasible_on_grid(e, params, opts.restart_resolution) {
            Some(x) => (x, true),
            None => {
                return Ok(SolverReport {
                    x: x0,
                    ee: start,
                    iterations: 0,
                    sca_steps: 0,
                    trace: Vec::new(),
                    status: SolverStatus::Infeasible,
                    restarted: false,
                    outside_power_assumption,
                });
            }
        }
    };

    let mut alpha = dinkelbach_update(x_start, e, params)?;
    let mut state = SolverState::at(x_start, e, params, alpha, opts);
    let mut trace = vec![TraceRow {
        outer: 0,
        inner: 0,
        x: state.x,
        alpha,
        objective: state.objective,
        ee: alpha,
    }];
    let mut status = SolverStatus::IterationCap;
    let mut iterations = 0;
    let mut sca_steps = 0;

    for outer in 1..=opts.max_outer {
        iterations = outer;
        state.alpha = alpha;
        for inner in 1..=opts.max_inner {
            sca_steps += 1;
            let Some(next) = solve_subproblem(&state, e, params, alpha, opts) else {
                break;
            };
            let before = parametric_objective(e, params, alpha, state.x);
            let after = parametric_objective(e, params, alpha, next.x);
            let gain = match (before, after) {
                (Some(b), Some(a)) => a - b,
                _ => break,
            };
            if next.x == state.x || gain <= 0.0 {
                break;
            }
            state = next;
            trace.push(TraceRow {
                outer,
                inner,
                x: state.x,
                alpha,
                objective: state.objective,
                ee: dinkelbach_update(state.x, e, params)?,
            });
            if gain < opts.inner_tolerance {
                break;
            }
        }

        let updated = dinkelbach_update(state.x, e, params)?;
        let increase = updated - alpha;
        alpha = updated;
        state = SolverState::at(state.x, e, params, alpha, opts);
        state.iter = outer;
        trace.push(TraceRow {
            outer,
            inner: 0,
            x: state.x,
            alpha,
            objective: state.objective,
            ee: updated,
        });
        if increase <= opts.tolerance * alpha.abs() {
            status = SolverStatus::Converged;
            state.converged = true;
            break;
        }
    }

    let ee = ee::evaluate(e, state.x, params)?;
    Ok(SolverReport {
        x: state.x,
        ee,
        iterations,
        sca_steps,
        trace,
        status,
        restarted,
        outside_power_assumption,
    })
}

/// Best feasible position on a uniform grid, smallest position on ties.
fn best_feasible_on_grid(e: &GainExpansion, params: &SystemParams, step: f64) -> Option<f64> {
    let grid = search::uniform_grid(0.0, params.region_length, step);
    let values: Vec<f64> = grid
        .iter()
        .map(|&x| match ee::ee_at(e, x, params) {
            Some(b) if b.feasible => b.ee,
            _ => f64::NAN,
        })
        .collect();
    search::argmax_first(&values).map(|i| grid[i])
}
