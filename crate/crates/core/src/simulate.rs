//! Benchmark PDE fields and seeded noise injection.
//!
//! Three generators: the transport equation through its closed form,
//! the inviscid Burgers equation through the method of characteristics
//! (pre-shock), and the viscous Burgers equation through a refined
//! method-of-lines reference solve sampled onto the requested grid.
//! Gaussian noise comes from a ChaCha8 stream seeded per experiment, so
//! every field is a pure function of (grid, parameters, seed).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::parallel::map_indices;
use crate::terms::TermLabel;
use crate::{Error, Field, Grid1D, Result};

/// Hard cap on reference time steps for the viscous solve.
const MAX_STEPS: u64 = 10_000_000;

/// Additive i.i.d. Gaussian noise: standard deviation and generator
/// seed. `sigma` must be nonnegative.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    sigma: f64,
    seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidParam(format!("sigma must be >= 0, got {sigma}")));
        }
        Ok(Self { sigma, seed })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Which benchmark PDE to generate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PdeKind {
    /// u_t = a u_x with initial profile amplitude * sin(wavenumber x).
    Transport { a: f64, amplitude: f64, wavenumber: f64 },
    /// u_t = -1/2 u u_x with initial profile sin(2 pi x).
    InviscidBurgers,
    /// u_t = -1/2 u u_x + nu u_xx with initial profile
    /// sin^2(4 pi x) + sin^3(2 pi x).
    ViscousBurgers { nu: f64 },
}

impl PdeKind {
    /// Paper-benchmark defaults for the transport case: 2 sin(4x - 8t).
    pub fn transport_default() -> Self {
        PdeKind::Transport { a: -2.0, amplitude: 2.0, wavenumber: 4.0 }
    }

    pub fn viscous_default() -> Self {
        PdeKind::ViscousBurgers { nu: 0.1 }
    }
}

/// A benchmark experiment: the PDE kind plus its domain extent.
#[derive(Debug, Clone)]
pub struct PdeSpec {
    pub kind: PdeKind,
    pub x_max: f64,
    pub t_max: f64,
}

impl PdeSpec {
    pub fn new(kind: PdeKind, x_max: f64, t_max: f64) -> Result<Self> {
        if !(x_max > 0.0) || !(t_max > 0.0) {
            return Err(Error::InvalidParam("domain extents must be positive".into()));
        }
        if matches!(kind, PdeKind::InviscidBurgers) {
            // Pre-shock requirement: t_max * max|f'/2| < 1 with
            // f = sin(2 pi x), i.e. t_max < 1/pi.
            if t_max * std::f64::consts::PI >= 1.0 {
                return Err(Error::InvalidParam(format!(
                    "inviscid horizon t_max = {t_max} reaches the shock time 1/pi"
                )));
            }
        }
        if let PdeKind::ViscousBurgers { nu } = kind {
            if !(nu > 0.0) {
                return Err(Error::InvalidParam(format!("nu must be positive, got {nu}")));
            }
        }
        Ok(Self { kind, x_max, t_max })
    }

    /// Generate the clean field on a grid inside the spec's domain.
    pub fn generate(&self, grid: &Grid1D) -> Result<Field> {
        match self.kind {
            PdeKind::Transport { a, amplitude, wavenumber } => {
                transport_field(grid, a, amplitude, wavenumber)
            }
            PdeKind::InviscidBurgers => inviscid_burgers_field(grid),
            PdeKind::ViscousBurgers { nu } => viscous_burgers_field(grid, nu),
        }
    }

    /// The dictionary terms genuinely present in the generating PDE.
    pub fn true_support(&self) -> Vec<TermLabel> {
        match self.kind {
            PdeKind::Transport { .. } => vec![TermLabel::new(vec![(1, 1)]).unwrap()],
            PdeKind::InviscidBurgers => {
                vec![TermLabel::new(vec![(0, 1), (1, 1)]).unwrap()]
            }
            PdeKind::ViscousBurgers { .. } => vec![
                TermLabel::new(vec![(0, 1), (1, 1)]).unwrap(),
                TermLabel::new(vec![(2, 1)]).unwrap(),
            ],
        }
    }
}

/// Travelling wave `amplitude * sin(wavenumber * (x + a t))`, the exact
/// solution of u_t = a u_x for that initial profile. Defaults
/// (amplitude 2, wavenumber 4, a = -2) give 2 sin(4x - 8t).
pub fn transport_field(grid: &Grid1D, a: f64, amplitude: f64, wavenumber: f64) -> Result<Field> {
    Field::from_fn(grid.clone(), |x, t| amplitude * (wavenumber * (x + a * t)).sin())
}

/// Pre-shock solution of u_t = -1/2 u u_x, u(x, 0) = sin(2 pi x), with
/// u(0, t) = u(1, t) = 0, via characteristics: u(x, t) = f(x0) where
/// x = x0 + f(x0) t / 2, solved by safeguarded Newton iteration to a
/// residual of 1e-12. The grid must lie in [0, 1] x [0, 0.1].
pub fn inviscid_burgers_field(grid: &Grid1D) -> Result<Field> {
    check_domain(grid, 1.0, 0.1)?;
    let m = grid.m();
    let f = |x0: f64| (2.0 * std::f64::consts::PI * x0).sin();
    let fp = |x0: f64| 2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * x0).cos();

    let columns: Vec<Result<Vec<f64>>> = map_indices(grid.n(), true, |n| {
        let t = grid.t()[n];
        let mut col = Vec::with_capacity(m);
        for &x in grid.x() {
            if x == 0.0 || x == 1.0 {
                col.push(0.0);
                continue;
            }
            let x0 = solve_characteristic(x, t, &f, &fp)?;
            col.push(f(x0));
        }
        Ok(col)
    });
    let mut values = Vec::with_capacity(m * grid.n());
    for col in columns {
        values.extend(col?);
    }
    Field::new(grid.clone(), values)
}

/// Root of g(x0) = x0 + f(x0) t / 2 - x, Newton with a bisection
/// safeguard on the bracket [x - t/2, x + t/2].
fn solve_characteristic(
    x: f64,
    t: f64,
    f: &impl Fn(f64) -> f64,
    fp: &impl Fn(f64) -> f64,
) -> Result<f64> {
    let g = |x0: f64| x0 + 0.5 * f(x0) * t - x;
    let mut lo = x - 0.5 * t - 1e-12;
    let mut hi = x + 0.5 * t + 1e-12;
    let mut x0 = x;
    for _ in 0..200 {
        let gv = g(x0);
        if gv.abs() <= 1e-12 {
            return Ok(x0);
        }
        if gv > 0.0 {
            hi = x0;
        } else {
            lo = x0;
        }
        let gpv = 1.0 + 0.5 * fp(x0) * t;
        let newton = x0 - gv / gpv;
        x0 = if gpv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::RootFind(format!("characteristic solve stalled at x = {x}, t = {t}")))
}

/// Reference solution of u_t = -1/2 u u_x + nu u_xx with Dirichlet zero
/// boundaries and initial profile sin^2(4 pi x) + sin^3(2 pi x), by
/// central differences on a spatial grid refined 8x beyond the request
/// and explicit stepping under the diffusive bound
/// dt <= 0.4 dx^2 / nu, then restriction onto the requested (nested,
/// uniform) grid.
pub fn viscous_burgers_field(grid: &Grid1D, nu: f64) -> Result<Field> {
    viscous_burgers_field_refined(grid, nu, 8)
}

/// [`viscous_burgers_field`] with an explicit refinement factor;
/// exposed so convergence checks can double the reference resolution.
pub fn viscous_burgers_field_refined(grid: &Grid1D, nu: f64, refine: usize) -> Result<Field> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidParam(format!("nu must be positive, got {nu}")));
    }
    if refine == 0 {
        return Err(Error::InvalidParam("refinement factor must be at least 1".into()));
    }
    check_domain(grid, 1.0, 0.1)?;
    let x = grid.x();
    let h = x[1] - x[0];
    let span = x[x.len() - 1] - x[0];
    for w in x.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * span {
            return Err(Error::InvalidGrid(
                "viscous reference solve requires a uniform spatial grid".into(),
            ));
        }
    }
    let dx = h / refine as f64;
    let n_cells = (1.0 / dx).round() as usize;
    if ((n_cells as f64) * dx - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidGrid(
            "spatial grid does not embed in a uniform reference lattice over [0, 1]".into(),
        ));
    }
    // Map every requested knot to a reference node.
    let mut sample_idx = Vec::with_capacity(x.len());
    for &xi in x {
        let j = (xi / dx).round() as usize;
        if (j as f64 * dx - xi).abs() > 1e-7 {
            return Err(Error::InvalidGrid(format!(
                "knot {xi} does not lie on the reference lattice (spacing {dx})"
            )));
        }
        sample_idx.push(j);
    }

    let init = |xv: f64| {
        let s4 = (4.0 * std::f64::consts::PI * xv).sin();
        let s2 = (2.0 * std::f64::consts::PI * xv).sin();
        s4 * s4 + s2 * s2 * s2
    };
    let mut u: Vec<f64> = (0..=n_cells).map(|j| init(j as f64 * dx)).collect();
    u[0] = 0.0;
    u[n_cells] = 0.0;

    let dt_max = 0.4 * dx * dx / nu;
    let total_steps: u64 = {
        let mut cur = 0.0;
        let mut steps = 0u64;
        for &tn in grid.t() {
            let gap = tn - cur;
            steps += (gap / dt_max).ceil() as u64;
            cur = tn;
        }
        steps
    };
    if total_steps > MAX_STEPS {
        return Err(Error::StepLimit { steps: total_steps, limit: MAX_STEPS });
    }

    let mut values = Vec::with_capacity(grid.m() * grid.n());
    let mut next = vec![0.0; u.len()];
    let mut cur_t = 0.0;
    for &tn in grid.t() {
        let gap = tn - cur_t;
        let n_sub = (gap / dt_max).ceil().max(1.0) as usize;
        let dt = gap / n_sub as f64;
        for _ in 0..n_sub {
            next[0] = 0.0;
            next[n_cells] = 0.0;
            for j in 1..n_cells {
                let adv = -0.5 * u[j] * (u[j + 1] - u[j - 1]) / (2.0 * dx);
                let diff = nu * (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (dx * dx);
                next[j] = u[j] + dt * (adv + diff);
            }
            std::mem::swap(&mut u, &mut next);
        }
        cur_t = tn;
        values.extend(sample_idx.iter().map(|&j| u[j]));
    }
    Field::new(grid.clone(), values)
}

fn check_domain(grid: &Grid1D, x_max: f64, t_max: f64) -> Result<()> {
    let eps = 1e-12;
    let x = grid.x();
    let t = grid.t();
    if x[0] < -eps || x[x.len() - 1] > x_max + eps {
        return Err(Error::InvalidGrid(format!(
            "spatial knots must lie in [0, {x_max}] for this generator"
        )));
    }
    if t[0] < -eps || t[t.len() - 1] > t_max + eps {
        return Err(Error::InvalidGrid(format!(
            "temporal knots must lie in [0, {t_max}] for this generator"
        )));
    }
    Ok(())
}

/// Add i.i.d. N(0, sigma^2) draws to every sample, in flat storage
/// order, from a ChaCha8 stream seeded by the spec. Bit-reproducible
/// for a fixed (field, spec).
pub fn add_noise(field: &Field, spec: &NoiseSpec) -> Field {
    if spec.sigma == 0.0 {
        return field.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values: Vec<f64> = field
        .values()
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + spec.sigma * z
        })
        .collect();
    Field::new(field.grid().clone(), values).expect("noise injection keeps values finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn transport_matches_closed_form() {
        let grid = Grid1D::uniform(20, 10, 1.0, 0.1).unwrap();
        let f = transport_field(&grid, -2.0, 2.0, 4.0).unwrap();
        for (n, &t) in grid.t().iter().enumerate() {
            for (i, &x) in grid.x().iter().enumerate() {
                assert_abs_diff_eq!(f.get(i, n), 2.0 * (4.0 * x - 8.0 * t).sin(), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn transport_at_origin_is_zero() {
        let grid = Grid1D::new(
            vec![0.0, 0.25, 0.5, 0.75],
            vec![0.0, 0.03, 0.06, 0.1],
        )
        .unwrap();
        let f = transport_field(&grid, -2.0, 2.0, 4.0).unwrap();
        assert_eq!(f.get(0, 0), 0.0);
    }

    #[test]
    fn inviscid_initial_condition_is_exact() {
        let grid = Grid1D::new(
            vec![0.0, 0.2, 0.45, 0.7, 1.0],
            vec![0.0, 0.02, 0.05, 0.1],
        )
        .unwrap();
        let f = inviscid_burgers_field(&grid).unwrap();
        for (i, &x) in grid.x().iter().enumerate() {
            assert_abs_diff_eq!(
                f.get(i, 0),
                (2.0 * std::f64::consts::PI * x).sin(),
                epsilon = 1e-11
            );
        }
        // Boundaries stay pinned at all times.
        for n in 0..grid.n() {
            assert_eq!(f.get(0, n), 0.0);
            assert_eq!(f.get(4, n), 0.0);
        }
    }

    #[test]
    fn inviscid_characteristic_map_is_monotone_pre_shock() {
        let f = |x0: f64| (2.0 * std::f64::consts::PI * x0).sin();
        for &t in &[0.02, 0.05, 0.1] {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=5000 {
                let x0 = k as f64 / 5000.0;
                let mapped = x0 + 0.5 * f(x0) * t;
                assert!(mapped > prev, "characteristics cross at t = {t}");
                prev = mapped;
            }
        }
    }

    #[test]
    fn inviscid_rejects_out_of_domain_grids() {
        let grid = Grid1D::uniform(10, 5, 2.0, 0.1).unwrap();
        assert!(inviscid_burgers_field(&grid).is_err());
        let late = Grid1D::uniform(10, 5, 1.0, 0.5).unwrap();
        assert!(inviscid_burgers_field(&late).is_err());
    }

    #[test]
    fn viscous_initial_condition_and_boundaries() {
        let grid = Grid1D::uniform(50, 6, 1.0, 0.1).unwrap();
        let f = viscous_burgers_field(&grid, 0.1).unwrap();
        for n in 0..grid.n() {
            assert_eq!(f.get(49, n), 0.0, "right boundary at step {n}");
        }
        // t = 0 exactly: use a custom grid containing 0.
        let g0 = Grid1D::new(
            (0..50).map(|i| (i + 1) as f64 / 50.0).collect(),
            vec![0.0, 0.02, 0.05, 0.1],
        )
        .unwrap();
        let f0 = viscous_burgers_field(&g0, 0.1).unwrap();
        for (i, &x) in g0.x().iter().enumerate() {
            let s4 = (4.0 * std::f64::consts::PI * x).sin();
            let s2 = (2.0 * std::f64::consts::PI * x).sin();
            let expect = if x == 1.0 { 0.0 } else { s4 * s4 + s2 * s2 * s2 };
            assert_abs_diff_eq!(f0.get(i, 0), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn viscous_step_limit_guards_fine_requests() {
        let grid = Grid1D::uniform(400, 4, 1.0, 0.1).unwrap();
        match viscous_burgers_field_refined(&grid, 0.1, 64) {
            Err(Error::StepLimit { .. }) => {}
            other => panic!("expected a step-limit error, got {other:?}"),
        }
    }

    #[test]
    fn noise_is_deterministic_and_sigma_zero_is_identity() {
        let grid = Grid1D::uniform(12, 8, 1.0, 0.1).unwrap();
        let clean = transport_field(&grid, -2.0, 2.0, 4.0).unwrap();
        let spec = NoiseSpec::new(0.5, 42).unwrap();
        let a = add_noise(&clean, &spec);
        let b = add_noise(&clean, &spec);
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), clean.values());
        let id = add_noise(&clean, &NoiseSpec::new(0.0, 42).unwrap());
        assert_eq!(id.values(), clean.values());
    }

    #[test]
    fn noise_moments_with_frozen_seed() {
        // MN = 10^4 standard normals with the fixed test seed; the
        // bands below were computed once with this generator and frozen.
        let grid = Grid1D::uniform(100, 100, 1.0, 0.1).unwrap();
        let zero = Field::from_fn(grid, |_, _| 0.0).unwrap();
        let noisy = add_noise(&zero, &NoiseSpec::new(1.0, 20240817).unwrap());
        let n = noisy.values().len() as f64;
        let mean: f64 = noisy.values().iter().sum::<f64>() / n;
        let var: f64 = noisy.values().iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        assert!(mean.abs() <= 0.05, "mean {mean}");
        assert!((0.94..=1.06).contains(&var), "variance {var}");
    }

    #[test]
    fn negative_sigma_is_rejected() {
        assert!(NoiseSpec::new(-0.1, 1).is_err());
    }

    #[test]
    fn true_supports_match_the_generators() {
        let spec = PdeSpec::new(PdeKind::transport_default(), 1.0, 0.1).unwrap();
        let labels: Vec<String> =
            spec.true_support().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["u_x"]);
        let spec = PdeSpec::new(PdeKind::ViscousBurgers { nu: 0.1 }, 1.0, 0.1).unwrap();
        let labels: Vec<String> =
            spec.true_support().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["u*u_x", "u_xx"]);
    }

    #[test]
    fn inviscid_shock_horizon_is_rejected_in_spec() {
        assert!(PdeSpec::new(PdeKind::InviscidBurgers, 1.0, 0.4).is_err());
        assert!(PdeSpec::new(PdeKind::InviscidBurgers, 1.0, 0.1).is_ok());
    }
}
