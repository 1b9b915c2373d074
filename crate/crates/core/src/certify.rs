//! Certified global maximization over axis-aligned boxes.
//!
//! The driver owns the wave schedule: it tiles the domain, evaluates cell
//! centers, discards cells whose supplied upper bound cannot beat the
//! incumbent, and halves every axis of the survivors. The objective only
//! has to provide an exact point evaluation and a bound that is sound on
//! any box; the quality of that bound decides how fast waves shrink, never
//! whether the final `sup_bound` is trustworthy.
//!
//! Minimization callers negate their objective and bounds.

use num_complex::Complex64;
use rayon::prelude::*;

/// Exact maximum of `Re(w (e^{i d} - 1))` over `|d| <= h`.
///
/// Writing `Re(w e^{i d}) = |w| cos(arg w + d)`, the box maximum sits at
/// `d = -arg w` when that is inside the interval and at an endpoint
/// otherwise.
pub fn re_increment_max(w: Complex64, h: f64) -> f64 {
    let r = w.norm();
    if r == 0.0 {
        return 0.0;
    }
    let omega = w.arg();
    let peak = if omega.abs() <= h {
        r
    } else {
        r * f64::max((omega + h).cos(), (omega - h).cos())
    };
    peak - w.re
}

/// Exact minimum of `Re(w (e^{i d} - 1))` over `|d| <= h`.
pub fn re_increment_min(w: Complex64, h: f64) -> f64 {
    -re_increment_max(-w, h)
}

/// Length of the chord subtended by an angle of `2h`; bounds
/// `|e^{i d} - 1|` over `|d| <= h`.
pub fn chord(h: f64) -> f64 {
    2.0 * (h.min(std::f64::consts::PI) / 2.0).sin()
}

pub trait CellObjective: Sync {
    fn dim(&self) -> usize;

    /// Exact objective value at a point.
    fn eval(&self, x: &[f64]) -> f64;

    /// Upper bound for the supremum of `eval` over the box
    /// `[center - half, center + half]`, sound for every box inside the
    /// domain handed to the search plan.
    fn cell_upper(&self, center: &[f64], half: &[f64]) -> f64;
}

#[derive(Debug, Clone)]
pub struct SearchPlan {
    pub domain: Vec<(f64, f64)>,
    pub initial_per_axis: usize,
    /// How many times every axis may be halved after the initial tiling.
    pub max_doublings: usize,
    /// Stop once `sup_bound - best_value` falls to this.
    pub target_gap: f64,
    /// Cells whose upper bound does not exceed this are discarded even when
    /// the incumbent is lower; used to decide threshold questions.
    pub prune_above: Option<f64>,
    /// Stop as soon as an evaluated point reaches this value.
    pub stop_at_value: Option<f64>,
    pub max_cells_per_wave: usize,
}

impl SearchPlan {
    pub fn new(domain: Vec<(f64, f64)>) -> Self {
        SearchPlan {
            domain,
            initial_per_axis: 64,
            max_doublings: 6,
            target_gap: 1e-6,
            prune_above: None,
            stop_at_value: None,
            max_cells_per_wave: 4_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    /// Certified upper bound for the supremum over the whole domain.
    pub sup_bound: f64,
    /// True when the search ended by gap target or exhaustion rather than
    /// by hitting a resolution or cell budget.
    pub resolved: bool,
    pub stopped_early: bool,
    pub doublings_used: usize,
    pub cells_seen: usize,
    pub per_axis_resolution: usize,
}

struct Wave {
    centers: Vec<f64>, // flat, stride = dim
    half: Vec<f64>,
}

pub fn branch_and_bound(obj: &dyn CellObjective, plan: &SearchPlan) -> SearchOutcome {
    let d = obj.dim();
    assert_eq!(plan.domain.len(), d, "domain dimension mismatch");
    assert!(d >= 1, "use direct evaluation for zero-dimensional objectives");

    let mut per_axis = plan.initial_per_axis.max(1);
    // Shrink the initial tiling if it would blow the wave budget.
    while per_axis > 1 && per_axis.pow(d as u32) > plan.max_cells_per_wave {
        per_axis /= 2;
    }

    let mut wave = initial_wave(&plan.domain, per_axis, d);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_point = vec![0.0; d];
    let mut pruned_sup = f64::NEG_INFINITY;
    let mut cells_seen = 0usize;
    let mut doublings = 0usize;

    loop {
        let ncells = wave.centers.len() / d;
        cells_seen += ncells;
        let half = wave.half.clone();
        let scored: Vec<(f64, f64)> = (0..ncells)
            .into_par_iter()
            .map(|i| {
                let c = &wave.centers[i * d..(i + 1) * d];
                (obj.eval(c), obj.cell_upper(c, &half))
            })
            .collect();

        for (i, &(value, _)) in scored.iter().enumerate() {
            if value > best_value {
                best_value = value;
                best_point.copy_from_slice(&wave.centers[i * d..(i + 1) * d]);
            }
        }

        let stop_hit = plan.stop_at_value.is_some_and(|s| best_value >= s);
        let threshold = match plan.prune_above {
            Some(p) => p.max(best_value),
            None => best_value,
        };

        let mut open_sup = f64::NEG_INFINITY;
        let mut survivors: Vec<usize> = Vec::new();
        for (i, &(_, ub)) in scored.iter().enumerate() {
            if ub <= threshold {
                pruned_sup = pruned_sup.max(ub);
            } else {
                open_sup = open_sup.max(ub);
                survivors.push(i);
            }
        }

        let sup_bound = open_sup.max(pruned_sup).max(best_value);
        let gap = sup_bound - best_value;

        if stop_hit {
            return SearchOutcome {
                best_point,
                best_value,
                sup_bound,
                resolved: false,
                stopped_early: true,
                doublings_used: doublings,
                cells_seen,
                per_axis_resolution: per_axis << doublings,
            };
        }
        if survivors.is_empty() || gap <= plan.target_gap {
            return SearchOutcome {
                best_point,
                best_value,
                sup_bound,
                resolved: true,
                stopped_early: false,
                doublings_used: doublings,
                cells_seen,
                per_axis_resolution: per_axis << doublings,
            };
        }
        if doublings == plan.max_doublings
            || survivors.len() << d > plan.max_cells_per_wave
        {
            return SearchOutcome {
                best_point,
                best_value,
                sup_bound,
                resolved: false,
                stopped_early: false,
                doublings_used: doublings,
                cells_seen,
                per_axis_resolution: per_axis << doublings,
            };
        }

        wave = split_wave(&wave, &survivors, d);
        doublings += 1;
    }
}

fn initial_wave(domain: &[(f64, f64)], per_axis: usize, d: usize) -> Wave {
    let half: Vec<f64> = domain
        .iter()
        .map(|&(lo, hi)| (hi - lo) / (2.0 * per_axis as f64))
        .collect();
    let total = per_axis.pow(d as u32);
    let mut centers = Vec::with_capacity(total * d);
    for idx in 0..total {
        let mut rem = idx;
        for (axis, &(lo, _)) in domain.iter().enumerate() {
            let slot = rem % per_axis;
            rem /= per_axis;
            centers.push(lo + (2 * slot + 1) as f64 * half[axis]);
        }
    }
    Wave { centers, half }
}

fn split_wave(wave: &Wave, survivors: &[usize], d: usize) -> Wave {
    let half: Vec<f64> = wave.half.iter().map(|h| h / 2.0).collect();
    let children = 1usize << d;
    let mut centers = Vec::with_capacity(survivors.len() * children * d);
    for &i in survivors {
        let c = &wave.centers[i * d..(i + 1) * d];
        for mask in 0..children {
            for axis in 0..d {
                let sign = if mask >> axis & 1 == 1 { 1.0 } else { -1.0 };
                centers.push(c[axis] + sign * half[axis]);
            }
        }
    }
    Wave { centers, half }
}

/// Golden-section ascent along one axis at a time, clamped to the domain.
/// Deterministic: fixed iteration counts, fixed axis order.
pub fn coordinate_ascent(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    domain: &[(f64, f64)],
    rounds: usize,
) -> (Vec<f64>, f64) {
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut width: Vec<f64> = domain.iter().map(|&(lo, hi)| (hi - lo) / 8.0).collect();
    for _ in 0..rounds {
        for axis in 0..x.len() {
            let (lo, hi) = domain[axis];
            let a = (x[axis] - width[axis]).max(lo);
            let b = (x[axis] + width[axis]).min(hi);
            let (t, ft) = golden_max(
                &|t| {
                    let mut y = x.clone();
                    y[axis] = t;
                    f(&y)
                },
                a,
                b,
                48,
            );
            if ft > fx {
                x[axis] = t;
                fx = ft;
            }
        }
        for w in width.iter_mut() {
            *w *= 0.35;
        }
    }
    (x, fx)
}

/// Shrinking-box grid refinement around a point, clamped to the domain.
///
/// Each stage lays a full `per_axis`-wide grid over the current box,
/// recenters on the best sample (earliest index on ties) and halves the
/// radius. Unlike descent methods this keeps working at conical optima,
/// where max-of-moduli objectives kink; convergence is linear in the radius
/// with a factor of two per stage.
pub fn pattern_search_max(
    f: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    domain: &[(f64, f64)],
    radius: &[f64],
    stages: usize,
    per_axis: usize,
) -> (Vec<f64>, f64) {
    assert!(per_axis >= 3 && per_axis % 2 == 1, "odd grid keeps the center");
    let d = start.len();
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut r = radius.to_vec();
    let mut offsets = vec![0usize; d];
    for _ in 0..stages {
        let mut best = (x.clone(), fx);
        offsets.iter_mut().for_each(|o| *o = 0);
        'grid: loop {
            let mut y = vec![0.0; d];
            for axis in 0..d {
                let t = x[axis] + r[axis] * (2.0 * offsets[axis] as f64 / (per_axis - 1) as f64 - 1.0);
                let (lo, hi) = domain[axis];
                y[axis] = t.clamp(lo, hi);
            }
            let fy = f(&y);
            if fy > best.1 {
                best = (y, fy);
            }
            // Odometer increment.
            let mut axis = 0;
            loop {
                offsets[axis] += 1;
                if offsets[axis] < per_axis {
                    break;
                }
                offsets[axis] = 0;
                axis += 1;
                if axis == d {
                    break 'grid;
                }
            }
        }
        x = best.0;
        fx = best.1;
        for ri in r.iter_mut() {
            *ri *= 0.5;
        }
    }
    (x, fx)
}

/// Golden-section maximization on an interval; returns the best probe.
pub fn golden_max(f: &dyn Fn(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for _ in 0..iters {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        let cand = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if cand.1 > best.1 {
            best = cand;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn increment_bounds_dominate_samples() {
        let w = Complex64::new(0.3, -1.1);
        let h = 0.4;
        for k in 0..=200 {
            let d = -h + 2.0 * h * (k as f64) / 200.0;
            let delta = (w * Complex64::new(0.0, d).exp() - w).re;
            assert!(delta <= re_increment_max(w, h) + 1e-12);
            assert!(delta >= re_increment_min(w, h) - 1e-12);
        }
        // Interior peak: w real positive maximises at d = 0.
        assert!(re_increment_max(Complex64::new(2.0, 0.0), 0.5).abs() < 1e-15);
        assert!(chord(0.0) == 0.0 && (chord(std::f64::consts::PI) - 2.0).abs() < 1e-15);
    }

    /// Smooth concave bump with its peak inside the domain.
    struct Bump;

    impl CellObjective for Bump {
        fn dim(&self) -> usize {
            2
        }

        fn eval(&self, x: &[f64]) -> f64 {
            10.0 - (x[0] - 0.3).powi(2) - (x[1] + 0.4).powi(2)
        }

        fn cell_upper(&self, c: &[f64], h: &[f64]) -> f64 {
            // Exact box supremum of the separable quadratic.
            let sup_term = |center: f64, half: f64, peak: f64| {
                let lo = center - half;
                let hi = center + half;
                let closest = peak.clamp(lo, hi);
                -(closest - peak).powi(2)
            };
            10.0 + sup_term(c[0], h[0], 0.3) + sup_term(c[1], h[1], -0.4)
        }
    }

    #[test]
    fn finds_the_bump_with_a_tight_bracket() {
        let mut plan = SearchPlan::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        plan.initial_per_axis = 8;
        plan.max_doublings = 14;
        plan.target_gap = 1e-9;
        let out = branch_and_bound(&Bump, &plan);
        assert!(out.resolved);
        assert!(out.sup_bound >= out.best_value);
        assert!(out.sup_bound - out.best_value <= 1e-9);
        assert!((out.best_value - 10.0).abs() < 1e-6);
        assert!((out.best_point[0] - 0.3).abs() < 1e-3);
        assert!((out.best_point[1] + 0.4).abs() < 1e-3);
    }

    #[test]
    fn prune_above_discards_the_whole_domain_when_nothing_clears_it() {
        let mut plan = SearchPlan::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        plan.initial_per_axis = 8;
        plan.prune_above = Some(11.0);
        plan.target_gap = 0.0;
        let out = branch_and_bound(&Bump, &plan);
        assert!(out.resolved);
        assert!(out.sup_bound <= 11.0);
        assert!(out.sup_bound >= 10.0);
    }

    #[test]
    fn stop_at_value_exits_early() {
        let mut plan = SearchPlan::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        plan.initial_per_axis = 16;
        plan.stop_at_value = Some(9.9);
        let out = branch_and_bound(&Bump, &plan);
        assert!(out.stopped_early);
        assert!(out.best_value >= 9.9);
    }

    #[test]
    fn pattern_search_handles_conical_peaks() {
        // Max-of-moduli objectives kink at their optima; descent methods
        // stall there but the shrinking grid keeps converging.
        let f = |x: &[f64]| -f64::max((x[0] - 0.3).abs(), (x[1] + 0.1).abs());
        let domain = [(-1.0, 1.0), (-1.0, 1.0)];
        let (x, fx) = pattern_search_max(&f, &[0.28, -0.13], &domain, &[0.1, 0.1], 40, 9);
        assert!(fx > -1e-10, "fx = {fx}");
        assert!((x[0] - 0.3).abs() < 1e-10);
        assert!((x[1] + 0.1).abs() < 1e-10);
    }

    #[test]
    fn coordinate_ascent_polishes_to_the_peak() {
        let domain = [(-1.0, 1.0), (-1.0, 1.0)];
        let f = |x: &[f64]| 10.0 - (x[0] - 0.3).powi(2) - (x[1] + 0.4).powi(2);
        let (x, fx) = coordinate_ascent(&f, &[0.25, -0.5], &domain, 4);
        assert!((fx - 10.0).abs() < 1e-12);
        assert!((x[0] - 0.3).abs() < 1e-6);
        assert!((x[1] + 0.4).abs() < 1e-6);
    }

    #[test]
    fn deterministic_outcomes() {
        let mut plan = SearchPlan::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        plan.initial_per_axis = 8;
        plan.max_doublings = 10;
        plan.target_gap = 1e-9;
        let a = branch_and_bound(&Bump, &plan);
        let b = branch_and_bound(&Bump, &plan);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.sup_bound.to_bits(), b.sup_bound.to_bits());
        assert_eq!(a.best_point, b.best_point);
    }
}
