use magtun::fields::*;
use magtun::planar::*;
use magtun::radial;
use magtun::Error;
use num_complex::Complex64;

fn small_well() -> RadialFieldSpec {
    RadialFieldSpec::new(1.0, 0.45, 0.5, ProfileKind::SmoothBump).unwrap()
}

fn cfg(min_field: f64) -> SolveConfig {
    SolveConfig {
        min_field,
        ..SolveConfig::default()
    }
}

fn solve(src: &FieldSource, gauge: Gauge, grid: Grid2D, h: f64, k: usize, c: &SolveConfig) -> Vec<Eigenpair2D> {
    let op = assemble_link_operator(src, gauge, grid, h).unwrap();
    lowest_eigenpairs(&op, k, c).unwrap()
}

#[test]
fn constant_field_lowest_landau_level() {
    // The lattice level sits O((δ/ℓ)²) below h·b1; one refinement with
    // Richardson extrapolation recovers the continuum value.
    let flat = RadialFieldSpec::new(1.0, 0.1, 0.0, ProfileKind::SmoothBump).unwrap();
    let src = FieldSource::single(&flat, [0.0, 0.0]).unwrap();
    let h = 0.1;
    let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
    // The level is a near-degenerate cluster split only by the box; a
    // residual r still places λ within r of the spectrum.
    let c = SolveConfig {
        tol: 1e-6,
        ..cfg(1.0)
    };
    let coarse = solve(&src, Gauge::LandauSeam, grid, h, 1, &c)[0].lambda;
    let fine = solve(&src, Gauge::LandauSeam, grid.refined(), h, 1, &c)[0].lambda;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    assert!(coarse < fine && fine < 0.1);
    assert!(extrapolated >= 0.1 * (1.0 - 1e-6) && extrapolated <= 0.1 * (1.0 + 1e-3), "{extrapolated}");
}

#[test]
fn refinement_is_second_order() {
    let src = FieldSource::single(&small_well(), [0.0, 0.0]).unwrap();
    let h = 0.2;
    let g = Grid2D::for_source(&src, h, MIN_POINTS_PER_LENGTH).unwrap();
    let l: Vec<f64> = [g, g.refined(), g.refined().refined()]
        .into_iter()
        .map(|grid| solve(&src, Gauge::LandauSeam, grid, h, 1, &cfg(0.5))[0].lambda)
        .collect();
    let ratio = (l[0] - l[1]) / (l[1] - l[2]);
    assert!(ratio >= 3.0, "ratio {ratio}, {l:?}");
    assert!(l.iter().all(|&x| x >= -1e-12));
}

#[test]
fn gauge_transform_preserves_spectrum_and_rotates_eigenvectors() {
    // Four bound states well below the Landau level h·b1.
    let spec = RadialFieldSpec::new(1.0, 1.0, 0.5, ProfileKind::SmoothBump).unwrap();
    let src = FieldSource::single(&spec, [0.0, 0.0]).unwrap();
    let h = 0.1;
    let grid = Grid2D::for_source(&src, h, MIN_POINTS_PER_LENGTH).unwrap();
    let op = assemble_link_operator(&src, Gauge::LandauSeam, grid, h).unwrap();
    let chi: Vec<f64> = (0..grid.len())
        .map(|k| {
            let [x, y] = grid.point(k);
            0.7 * (1.3 * x + 0.4).sin() * (0.9 * y).cos() + 0.2 * x * y
        })
        .collect();
    let op2 = gauge_transform(&op, &chi).unwrap();
    let c = cfg(0.5);
    let a = lowest_eigenpairs(&op, 4, &c).unwrap();
    let b = lowest_eigenpairs(&op2, 4, &c).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!((p.lambda - q.lambda).abs() <= 1e-10 * p.lambda, "{} vs {}", p.lambda, q.lambda);
        assert!(p.lambda >= -1e-12 && p.residual <= 1e-8);
    }
    // The ground state is simple: Ψ' = e^{iχ/h}Ψ up to a global phase.
    let rotated: Vec<Complex64> = a[0]
        .psi
        .iter()
        .zip(&chi)
        .map(|(z, x)| z * Complex64::from_polar(1.0, x / h))
        .collect();
    let overlap: Complex64 = b[0].psi.iter().zip(&rotated).map(|(u, v)| v.conj() * u).sum();
    let phase = overlap / overlap.norm();
    let d2 = grid.spacing().powi(2);
    let diff: f64 = b[0]
        .psi
        .iter()
        .zip(&rotated)
        .map(|(u, v)| (u - phase * v).norm_sqr())
        .sum::<f64>()
        * d2;
    assert!(diff.sqrt() <= 1e-6, "{}", diff.sqrt());
}

#[test]
fn circular_and_seam_gauges_agree() {
    let spec = small_well();
    let src = FieldSource::single(&spec, [0.0, 0.0]).unwrap();
    let h = 0.2;
    let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
    let a = solve(&src, Gauge::LandauSeam, grid, h, 2, &cfg(0.5));
    let b = solve(&src, Gauge::CircularLeft, grid, h, 2, &cfg(0.5));
    for (p, q) in a.iter().zip(&b) {
        // Both gauges discretize the same flux up to per-edge quadrature error.
        assert!((p.lambda - q.lambda).abs() <= 1e-8 * p.lambda);
    }
}

#[test]
fn single_well_tracks_the_radial_ground_state() {
    let spec = small_well();
    let src = FieldSource::single(&spec, [0.0, 0.0]).unwrap();
    let h = 0.1;
    let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
    let l = solve(&src, Gauge::LandauSeam, grid, h, 1, &cfg(0.5))[0].lambda;
    let mu = radial::ground_state(&spec, h).unwrap().mu_extrapolated;
    assert!((l - mu).abs() <= 2e-3 * mu, "{l} vs {mu}");
    assert!(l < mu);
}

#[test]
fn symmetric_double_well_splits_evenly() {
    let dw = DoubleWellSpec::symmetric(small_well(), 2.1).unwrap();
    let src = FieldSource::double(&dw).unwrap();
    let h = 0.2;
    let grid = Grid2D::for_source(&src, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
    let p = solve(&src, Gauge::LandauSeam, grid, h, 2, &cfg(0.5));
    assert!(p[1].lambda - p[0].lambda > 0.0);
    assert!(p[1].lambda < h * dw.b1());
    for q in &p {
        assert!((localization_fraction(&q.psi, &grid) - 0.5).abs() <= 0.02);
        let norm: f64 = q.psi.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.spacing().powi(2);
        assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lone_well_in_a_double_box_stays_on_its_side() {
    let dw = DoubleWellSpec::symmetric(small_well(), 2.1).unwrap();
    let double = FieldSource::double(&dw).unwrap();
    let lone = FieldSource::single(&small_well(), dw.right_center()).unwrap();
    let mut rates = Vec::new();
    for h in [0.2, 0.15, 0.1] {
        let grid = Grid2D::for_source(&double, h, DEFAULT_POINTS_PER_LENGTH).unwrap();
        let p = solve(&lone, Gauge::LandauSeam, grid, h, 1, &cfg(0.5));
        let leak = 1.0 - localization_fraction(&p[0].psi, &grid);
        assert!(leak > 0.0 && leak < 1e-2, "h = {h}: {leak}");
        rates.push((h, -h * leak.ln()));
    }
    // 1 - p = e^{-c/h}: the fitted c is positive and the leak shrinks with h.
    assert!(rates.iter().all(|&(_, c)| c > 0.0), "{rates:?}");
    let leaks: Vec<f64> = rates.iter().map(|&(h, c)| (-c / h).exp()).collect();
    assert!(leaks[0] > leaks[1] && leaks[1] > leaks[2]);
}

#[test]
fn solver_is_deterministic_and_reports_failure() {
    let src = FieldSource::single(&small_well(), [0.0, 0.0]).unwrap();
    let h = 0.2;
    let grid = Grid2D::for_source(&src, h, MIN_POINTS_PER_LENGTH).unwrap();
    let op = assemble_link_operator(&src, Gauge::LandauSeam, grid, h).unwrap();
    let a = lowest_eigenpairs(&op, 3, &cfg(0.5)).unwrap();
    let b = lowest_eigenpairs(&op, 3, &cfg(0.5)).unwrap();
    assert_eq!(a, b);
    let starved = SolveConfig {
        max_iter: 2,
        preconditioner: Preconditioner::None,
        ..cfg(0.5)
    };
    match lowest_eigenpairs(&op, 2, &starved) {
        Err(Error::NoConvergence { iterations, history, .. }) => {
            assert_eq!(iterations, 2);
            assert_eq!(history.len(), 2);
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
    assert!(matches!(lowest_eigenpairs(&op, 9, &cfg(0.5)), Err(Error::InvalidParameter(_))));
}

#[test]
fn jacobi_preconditioner_converges() {
    let src = FieldSource::single(&small_well(), [0.0, 0.0]).unwrap();
    let h = 0.2;
    let grid = Grid2D::for_source(&src, h, MIN_POINTS_PER_LENGTH).unwrap();
    let jac = SolveConfig {
        preconditioner: Preconditioner::Jacobi,
        ..cfg(0.5)
    };
    let a = solve(&src, Gauge::LandauSeam, grid, h, 1, &jac);
    let b = solve(&src, Gauge::LandauSeam, grid, h, 1, &cfg(0.5));
    assert!((a[0].lambda - b[0].lambda).abs() <= 1e-9 * b[0].lambda);
}
