//! Structural certification of the exact resolvent kernels: closed-form
//! values, symmetry, homogeneity, diagonal jump, boundary conditions,
//! off-diagonal annihilation, and the kk remainder algebra.

use radlap::logval::FunValue;
use radlap::operators::{
    apply_resolvent, delta_pole_bracket, delta_potential_d, dx_resolvent_kernel,
    rank_one_correction, resolvent_kernel, FamilyKind, KernelCtx, OperatorSpec,
};
use radlap::specfun::{ratios, Dimension};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ctx_plain(kind: FamilyKind, d: f64) -> KernelCtx {
    KernelCtx::new(OperatorSpec::plain(kind, d).unwrap()).unwrap()
}

fn kernel(ctx: &KernelCtx, lambda: f64, x: f64, y: f64) -> f64 {
    resolvent_kernel(ctx, lambda, x, y).unwrap().value.value()
}

fn sample_point(rng: &mut ChaCha8Rng, kind: FamilyKind) -> f64 {
    let mag = 10f64.powf(rng.gen_range(-1.2f64..1.5f64));
    match kind {
        FamilyKind::HalfLineNeumann | FamilyKind::HalfLineDirichlet | FamilyKind::HalfLineNeumannIsq => mag,
        FamilyKind::RayDirichlet | FamilyKind::RayNeumann => 1.0 + mag,
        FamilyKind::FullLineDirichlet => {
            if rng.gen_bool(0.5) { mag } else { -mag }
        }
        _ => {
            let v = 1.0 + mag;
            if rng.gen_bool(0.5) { v } else { -v }
        }
    }
}

fn all_test_specs() -> Vec<OperatorSpec> {
    vec![
        OperatorSpec::plain(FamilyKind::HalfLineNeumann, 3.0).unwrap(),
        OperatorSpec::plain(FamilyKind::HalfLineNeumann, 1.5).unwrap(),
        OperatorSpec::plain(FamilyKind::HalfLineDirichlet, 1.5).unwrap(),
        OperatorSpec::plain(FamilyKind::RayDirichlet, 3.0).unwrap(),
        OperatorSpec::plain(FamilyKind::RayNeumann, 2.0).unwrap(),
        OperatorSpec::plain(FamilyKind::BrokenLine, 3.0).unwrap(),
        OperatorSpec::plain(FamilyKind::BrokenLine, 2.0).unwrap(),
        OperatorSpec::plain(FamilyKind::BrokenLine, 1.5).unwrap(),
        OperatorSpec::plain(FamilyKind::FullLineDirichlet, 1.5).unwrap(),
        OperatorSpec::isq(FamilyKind::HalfLineNeumannIsq, 4.0, 1.25).unwrap(),
        OperatorSpec::isq(FamilyKind::BrokenLineIsq, 4.0, 1.25).unwrap(),
        OperatorSpec::delta(5.0, -6.0).unwrap(),
    ]
}

#[test]
fn half_line_neumann_closed_form_value() {
    // K(1, 2) at lambda = 1, d = 3: k_3(2) l_3(1) with unit coupling,
    // which reduces to e^{-2} sinh(1) / 2.
    let ctx = ctx_plain(FamilyKind::HalfLineNeumann, 3.0);
    assert!((ctx.nu + 1.0).abs() < 1e-12, "nu(3) = {}", ctx.nu);
    let got = kernel(&ctx, 1.0, 1.0, 2.0);
    let want = (-2.0f64).exp() * 1.0f64.sinh() / 2.0;
    assert!(((got - want) / want).abs() < 1e-12, "got {got}, want {want}");
    assert!(got > 0.0);
}

#[test]
fn kernels_are_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for spec in all_test_specs() {
        let ctx = KernelCtx::new(spec).unwrap();
        for _ in 0..40 {
            let x = sample_point(&mut rng, spec.kind());
            let y = sample_point(&mut rng, spec.kind());
            let lambda = 10f64.powf(rng.gen_range(-1.0f64..0.7f64));
            let v = kernel(&ctx, lambda, x, y);
            assert!(v > 0.0, "kernel not positive: {:?} K({x},{y}；{lambda}) = {v}", spec.kind());
        }
    }
}

#[test]
fn symmetry_in_x_y() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for spec in all_test_specs() {
        let ctx = KernelCtx::new(spec).unwrap();
        for _ in 0..60 {
            let x = sample_point(&mut rng, spec.kind());
            let y = sample_point(&mut rng, spec.kind());
            let lambda = 10f64.powf(rng.gen_range(-1.0f64..0.7f64));
            let a = resolvent_kernel(&ctx, lambda, x, y).unwrap().value;
            let b = resolvent_kernel(&ctx, lambda, y, x).unwrap().value;
            assert!(
                FunValue::rel_diff(a, b) < 1e-9,
                "asymmetry {:?} at ({x},{y}): {:.2e}",
                spec.kind(),
                FunValue::rel_diff(a, b)
            );
        }
    }
}

#[test]
fn mirror_symmetry_two_sided() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for spec in [
        OperatorSpec::plain(FamilyKind::BrokenLine, 2.5).unwrap(),
        OperatorSpec::plain(FamilyKind::FullLineDirichlet, 1.4).unwrap(),
        OperatorSpec::delta(5.0, -6.0).unwrap(),
    ] {
        let ctx = KernelCtx::new(spec).unwrap();
        for _ in 0..30 {
            let x = sample_point(&mut rng, spec.kind());
            let y = sample_point(&mut rng, spec.kind());
            let a = resolvent_kernel(&ctx, 0.8, x, y).unwrap().value;
            let b = resolvent_kernel(&ctx, 0.8, -x, -y).unwrap().value;
            assert!(FunValue::rel_diff(a, b) < 1e-12);
        }
    }
}

#[test]
fn homogeneity_half_line() {
    // K_lambda(x, y) = lambda^{d-2} K_1(lambda x, lambda y) for the
    // scale-invariant families.
    let (d, lambda, x, y) = (2.5, 0.7, 1.3, 3.1);
    for kind in [FamilyKind::HalfLineNeumann, FamilyKind::HalfLineDirichlet] {
        let spec = if kind == FamilyKind::HalfLineDirichlet {
            OperatorSpec::plain(kind, 1.5).unwrap()
        } else {
            OperatorSpec::plain(kind, d).unwrap()
        };
        let dd = spec.dimension().get();
        let ctx = KernelCtx::new(spec).unwrap();
        let lhs = kernel(&ctx, lambda, x, y);
        let rhs = lambda.powf(dd - 2.0) * kernel(&ctx, 1.0, lambda * x, lambda * y);
        assert!(((lhs - rhs) / rhs).abs() < 1e-9, "{kind:?}: {lhs} vs {rhs}");
    }
    // And for the full-line collapsed-junction family.
    let ctx = ctx_plain(FamilyKind::FullLineDirichlet, 1.5);
    let lhs = kernel(&ctx, lambda, -x, y);
    let rhs = lambda.powf(1.5 - 2.0) * kernel(&ctx, 1.0, -lambda * x, lambda * y);
    assert!(((lhs - rhs) / rhs).abs() < 1e-9);
}

#[test]
fn delta_at_zero_strength_reduces_to_broken_line() {
    let broken = ctx_plain(FamilyKind::BrokenLine, 3.0);
    let delta = KernelCtx::new(OperatorSpec::delta(3.0 + 1e-12, 0.0).unwrap()).unwrap();
    for (x, y) in [(1.5, 2.5), (-1.2, 4.0), (3.0, 1.01)] {
        let a = kernel(&broken, 1.0, x, y);
        let b = kernel(&delta, 1.0, x, y);
        assert!(((a - b) / a).abs() < 1e-9, "a={a} b={b} at ({x},{y})");
    }
}

#[test]
fn continuity_across_diagonal() {
    for spec in all_test_specs() {
        let ctx = KernelCtx::new(spec).unwrap();
        let y = match spec.domain() {
            radlap::operators::DomainShape::HalfLine => 1.7,
            _ => 2.3,
        };
        let eps = 1e-9 * y;
        let below = kernel(&ctx, 0.9, y - eps, y);
        let above = kernel(&ctx, 0.9, y + eps, y);
        assert!(
            ((below - above) / below).abs() < 1e-7,
            "{:?}: discontinuity {below} vs {above}",
            spec.kind()
        );
    }
}

#[test]
fn derivative_jump_is_weighted_delta() {
    // lim_{x->y-} dK/dx - lim_{x->y+} dK/dx = y^{1-d}, for every family.
    for spec in all_test_specs() {
        let ctx = KernelCtx::new(spec).unwrap();
        let d = spec.dimension().get();
        let (lambda, y) = (1.3, 2.0);
        let jump_at = |eps: f64| {
            let minus = dx_resolvent_kernel(&ctx, lambda, y - eps, y).unwrap().value();
            let plus = dx_resolvent_kernel(&ctx, lambda, y + eps, y).unwrap().value();
            minus - plus
        };
        // Linear-in-eps Richardson.
        let j = 2.0 * jump_at(1e-6 * y) - jump_at(2e-6 * y);
        let want = y.powf(1.0 - d);
        assert!(
            ((j - want) / want).abs() < 1e-6,
            "{:?}: jump {j} vs {want}",
            spec.kind()
        );
    }
}

#[test]
fn half_line_neumann_dx_closed_form() {
    // d=3, lambda=1, x=2 > y=1: dK/dx = cpl * lambda^{d-1} l(y) k'(x).
    let ctx = ctx_plain(FamilyKind::HalfLineNeumann, 3.0);
    let got = dx_resolvent_kernel(&ctx, 1.0, 2.0, 1.0).unwrap().value();
    let l1 = (2.0 / std::f64::consts::PI).sqrt() * 1f64.sinh();
    let k2p = -(std::f64::consts::PI / 2.0).sqrt() * (-2.0f64).exp() * (0.5 + 0.25);
    let want = l1 * k2p;
    assert!(((got - want) / want).abs() < 1e-12, "got {got} want {want}");
}

#[test]
fn off_diagonal_annihilation() {
    // (L + lambda^2) K(., y0) = 0 away from y0: check with an analytic first
    // derivative and a finite-difference second derivative.
    for spec in all_test_specs() {
        let ctx = KernelCtx::new(spec).unwrap();
        let d = spec.dimension().get();
        let c_over_r2 = spec.coupling().unwrap_or(0.0);
        let lambda = 0.9;
        let y0 = 3.0;
        for &x in &[1.4f64, 2.0, 5.0, -1.8, -4.0] {
            if !spec.contains(x) || (x - y0).abs() < 0.3 {
                continue;
            }
            let k = |t: f64| kernel(&ctx, lambda, t, y0);
            let kp = dx_resolvent_kernel(&ctx, lambda, x, y0).unwrap().value();
            let h = 1e-3 * x.abs();
            let k2 = (-k(x + 2.0 * h) + 16.0 * k(x + h) - 30.0 * k(x) + 16.0 * k(x - h)
                - k(x - 2.0 * h))
                / (12.0 * h * h);
            let resid = -k2 - (d - 1.0) / x * kp + c_over_r2 / (x * x) * k(x)
                + lambda * lambda * k(x);
            let scale = k(x).abs().max(k2.abs());
            assert!(
                resid.abs() < 1e-4 * scale,
                "{:?} at x={x}: residual {resid:.2e} vs scale {scale:.2e}",
                spec.kind()
            );
        }
    }
}

#[test]
fn boundary_conditions_at_junction() {
    let lambda = 1.1;
    let y = 2.7;

    // Dirichlet ray: kernel vanishes at x = 1 (relative to nearby scale).
    let ray_d = ctx_plain(FamilyKind::RayDirichlet, 3.0);
    let scale = kernel(&ray_d, lambda, 1.5, y);
    assert!(kernel(&ray_d, lambda, 1.0, y).abs() < 1e-9 * scale);

    // Neumann ray: normal derivative vanishes at x = 1.
    let ray_n = ctx_plain(FamilyKind::RayNeumann, 3.0);
    let dscale = dx_resolvent_kernel(&ray_n, lambda, 1.5, y).unwrap().value().abs();
    let d1 = dx_resolvent_kernel(&ray_n, lambda, 1.0, y).unwrap().value();
    assert!(d1.abs() < 1e-6 * dscale.max(1.0), "Neumann derivative {d1}");

    // Broken line: value and slope transmit across the junction.
    let broken = ctx_plain(FamilyKind::BrokenLine, 2.5);
    let v_neg = kernel(&broken, lambda, -1.0, y);
    let v_pos = kernel(&broken, lambda, 1.0, y);
    assert!(((v_neg - v_pos) / v_pos).abs() < 1e-9);
    let s_neg = dx_resolvent_kernel(&broken, lambda, -1.0, y).unwrap().value();
    let s_pos = dx_resolvent_kernel(&broken, lambda, 1.0, y).unwrap().value();
    assert!(((s_neg - s_pos) / s_pos).abs() < 1e-9);

    // Delta junction: slope jumps by a * K(1, y).
    let a = -6.0;
    let delta = KernelCtx::new(OperatorSpec::delta(5.0, a).unwrap()).unwrap();
    let v1 = kernel(&delta, lambda, 1.0, y);
    let sp = dx_resolvent_kernel(&delta, lambda, 1.0, y).unwrap().value();
    let sm = dx_resolvent_kernel(&delta, lambda, -1.0, y).unwrap().value();
    assert!(
        ((sp - sm - a * v1) / (a * v1)).abs() < 1e-9,
        "delta jump: {} vs {}",
        sp - sm,
        a * v1
    );
}

#[test]
fn narrow_band_origin_asymptotics() {
    // For 1 < d < 2: Dirichlet kernel vanishes like x^{2-d} at the origin
    // (so the fitted exponent clears the (2-d)/2 envelope), while the
    // Neumann kernel has x^{d-1} dK/dx -> 0.
    let d = 1.5;
    let lambda = 1.0;
    let y = 2.0;
    let dir = ctx_plain(FamilyKind::HalfLineDirichlet, d);
    let xs: Vec<f64> = (0..9).map(|i| 1e-4 * 10f64.powf(i as f64 / 8.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| kernel(&dir, lambda, x, y)).collect();
    let slope = radlap::quad::fit_loglog_slope(&xs, &ys);
    assert!(
        slope >= (2.0 - d) / 2.0 - 0.02,
        "Dirichlet origin exponent {slope}"
    );
    assert!((slope - (2.0 - d)).abs() < 0.02, "sharp exponent {slope}");

    let neu = ctx_plain(FamilyKind::HalfLineNeumann, d);
    let flux: Vec<f64> = xs
        .iter()
        .map(|&x| x.powf(d - 1.0) * dx_resolvent_kernel(&neu, lambda, x, y).unwrap().value())
        .collect();
    // x^{d-1} dK/dx ~ x^d -> 0: positive fitted exponent and tiny first value.
    let fslope = radlap::quad::fit_loglog_slope(&xs, &flux);
    assert!(fslope > 0.5, "Neumann flux slope {fslope}");
    assert!(flux[0].abs() < 1e-4);
}

#[test]
fn rank_one_correction_structure() {
    let lambda = 0.8;

    // Neumann half line: identically zero.
    let neu = ctx_plain(FamilyKind::HalfLineNeumann, 3.0);
    assert_eq!(rank_one_correction(&neu, lambda, 1.0, 2.0).unwrap().value(), 0.0);

    // Dirichlet half line: correction / (k k) is (x, y)-independent and
    // equals -cpl lambda^{d-2} A(0).
    let dir = ctx_plain(FamilyKind::HalfLineDirichlet, 1.5);
    let a0 = radlap::specfun::a_zero_limit(Dimension::new(1.5).unwrap()).unwrap();
    let ratio_at = |x: f64, y: f64| {
        let corr = rank_one_correction(&dir, lambda, x, y).unwrap();
        let kk = dir.basis.eval(lambda * x).unwrap().k * dir.basis.eval(lambda * y).unwrap().k;
        (corr / kk).value()
    };
    let r1 = ratio_at(0.7, 2.0);
    let r2 = ratio_at(3.0, 5.5);
    assert!(((r1 - r2) / r1).abs() < 1e-10);
    let want = -dir.cpl * lambda.powf(1.5 - 2.0) * a0;
    assert!(((r1 - want) / want).abs() < 1e-9);

    // Ray Neumann vs ray Dirichlet: corrections differ by
    // cpl lambda^{d-2} D(lambda) k(lambda x) k(lambda y).
    let (d, x, y) = (3.0, 2.0, 3.0);
    let rn = ctx_plain(FamilyKind::RayNeumann, d);
    let rd = ctx_plain(FamilyKind::RayDirichlet, d);
    let cn = rank_one_correction(&rn, lambda, x, y).unwrap().value();
    let cd = rank_one_correction(&rd, lambda, x, y).unwrap().value();
    let rr = ratios(Dimension::new(d).unwrap(), lambda).unwrap();
    let kk = (rn.basis.eval(lambda * x).unwrap().k * rn.basis.eval(lambda * y).unwrap().k).value();
    let want = rn.cpl * lambda.powf(d - 2.0) * rr.d.value() * kk;
    assert!((((cn - cd) - want) / want).abs() < 1e-10, "{} vs {want}", cn - cd);

    // Across the junction the correction is the whole kernel.
    let broken = ctx_plain(FamilyKind::BrokenLine, 3.0);
    let corr = rank_one_correction(&broken, lambda, -1.5, 2.0).unwrap().value();
    let full = kernel(&broken, lambda, -1.5, 2.0);
    assert!(((corr - full) / full).abs() < 1e-12);

    // Resolvent = baseline + correction on the same side.
    let base = {
        let v_lo = broken.basis.eval(lambda * 1.5).unwrap();
        let v_hi = broken.basis.eval(lambda * 2.0).unwrap();
        broken.cpl * lambda.powf(3.0 - 2.0) * (v_hi.k * v_lo.l).value()
    };
    let same = kernel(&broken, lambda, 1.5, 2.0);
    let corr_same = rank_one_correction(&broken, lambda, 1.5, 2.0).unwrap().value();
    assert!(((base + corr_same - same) / same).abs() < 1e-10);
}

#[test]
fn delta_coupling_ratio() {
    // a = 0 reproduces D(lambda) exactly.
    let d0 = KernelCtx::new(OperatorSpec::delta(5.0, 0.0).unwrap()).unwrap();
    for &lambda in &[0.1, 1.0, 4.0] {
        let da = delta_potential_d(&d0, lambda).unwrap();
        let dd = ratios(Dimension::new(5.0).unwrap(), lambda).unwrap().d;
        assert!(FunValue::rel_diff(da, dd) < 1e-12);
    }

    // Resonant strength a = -2(d-2): small-lambda exponent drops to d-4.
    let res = KernelCtx::new(OperatorSpec::delta(5.0, -6.0).unwrap()).unwrap();
    let xs: Vec<f64> = (0..9).map(|i| 1e-3 * 10f64.powf(i as f64 / 8.0)).collect();
    let ys: Vec<f64> = xs.iter().map(|&l| delta_potential_d(&res, l).unwrap().value()).collect();
    let slope = radlap::quad::fit_loglog_slope(&xs, &ys);
    assert!((slope - 1.0).abs() < 0.02, "resonant D_a exponent {slope}");

    // Non-resonant keeps the plain d-2 exponent.
    let plain = KernelCtx::new(OperatorSpec::delta(5.0, -3.0).unwrap()).unwrap();
    let ys: Vec<f64> = xs.iter().map(|&l| delta_potential_d(&plain, l).unwrap().value()).collect();
    let slope = radlap::quad::fit_loglog_slope(&xs, &ys);
    assert!((slope - 3.0).abs() < 0.02, "non-resonant D_a exponent {slope}");

    // Below the resonant strength a pole appears and is detected, not crossed.
    let poley = KernelCtx::new(OperatorSpec::delta(5.0, -7.0).unwrap()).unwrap();
    let bracket = delta_pole_bracket(&poley, 1e-3, 10.0, 400).unwrap();
    assert!(bracket.is_some(), "expected a pole bracket for a < -2(d-2)");
    assert!(delta_pole_bracket(&res, 1e-3, 10.0, 400).unwrap().is_none());
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> (Vec<f64>, Vec<f64>) {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize;
    let mut nodes = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(n + 1);
    for i in 0..=n {
        edges.push(lo * (hi / lo).powf(i as f64 / n as f64));
    }
    for i in 0..n {
        nodes.push((edges[i] * edges[i + 1]).sqrt());
    }
    (nodes, edges)
}

fn weights_for(d: f64, edges: &[f64]) -> Vec<f64> {
    edges.windows(2).map(|e| (e[1].powf(d) - e[0].powf(d)) / d).collect()
}

fn kink_correction(nodes: &[f64], f: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    (0..n)
        .map(|i| {
            let h = if i == 0 {
                nodes[1] - nodes[0]
            } else if i == n - 1 {
                nodes[n - 1] - nodes[n - 2]
            } else if nodes[i - 1].signum() != nodes[i + 1].signum() {
                (nodes[i] - nodes[i - 1]).min(nodes[i + 1] - nodes[i])
            } else {
                0.5 * (nodes[i + 1] - nodes[i - 1])
            };
            -h * h / 8.0 * f[i]
        })
        .collect()
}

#[test]
fn apply_resolvent_matches_direct_sum() {
    // The O(n) prefix-sum application against the naive double loop plus the
    // documented diagonal-cell correction, including two-sided block algebra.
    for spec in [
        OperatorSpec::plain(FamilyKind::RayNeumann, 2.5).unwrap(),
        OperatorSpec::plain(FamilyKind::BrokenLine, 3.0).unwrap(),
    ] {
        let ctx = KernelCtx::new(spec).unwrap();
        let d = spec.dimension().get();
        let (pos, edges) = log_grid(1.0, 30.0, 24);
        let wpos = weights_for(d, &edges);
        let (nodes, weights): (Vec<f64>, Vec<f64>) = if spec.domain().two_sided() {
            let mut nodes: Vec<f64> = pos.iter().rev().map(|&x| -x).collect();
            nodes.extend(&pos);
            let mut w: Vec<f64> = wpos.iter().rev().copied().collect();
            w.extend(&wpos);
            (nodes, w)
        } else {
            (pos.clone(), wpos.clone())
        };
        let f: Vec<f64> = nodes.iter().map(|&x| (1.0 + x.abs()).powf(-1.2) * x.signum()).collect();
        let lambda = 0.7;
        let fast = apply_resolvent(&ctx, lambda, &nodes, &weights, &f).unwrap();
        let corr = kink_correction(&nodes, &f);
        for (i, &xi) in nodes.iter().enumerate() {
            let direct: f64 = nodes
                .iter()
                .zip(&weights)
                .zip(&f)
                .map(|((&yj, &wj), &fj)| kernel(&ctx, lambda, xi, yj) * wj * fj)
                .sum::<f64>()
                + corr[i];
            assert!(
                (fast[i] - direct).abs() <= 1e-12 * direct.abs().max(1e-8),
                "{:?} row {i}: {} vs {direct}",
                spec.kind(),
                fast[i]
            );
        }
    }
}

#[test]
fn apply_resolvent_eigenprobe_delta_zero_mode() {
    // For d = 5, a = -2(d-2) = -6 the function |x|^{-3} is annihilated by
    // the operator, so the resolvent sends it to f / lambda^2.
    let ctx = KernelCtx::new(OperatorSpec::delta(5.0, -6.0).unwrap()).unwrap();
    let d = 5.0;
    let (pos, edges) = log_grid(1.0, 400.0, 192);
    let wpos = weights_for(d, &edges);
    let mut nodes: Vec<f64> = pos.iter().rev().map(|&x| -x).collect();
    nodes.extend(&pos);
    let mut weights: Vec<f64> = wpos.iter().rev().copied().collect();
    weights.extend(&wpos);
    let f: Vec<f64> = nodes.iter().map(|&x| x.abs().powf(-3.0)).collect();
    let lambda = 1.0;
    let out = apply_resolvent(&ctx, lambda, &nodes, &weights, &f).unwrap();
    // Relative L2 error against f / lambda^2, weighted, away from the last
    // decade (truncation tail).
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..nodes.len() {
        if nodes[i].abs() > 40.0 {
            continue;
        }
        let want = f[i] / (lambda * lambda);
        num += weights[i] * (out[i] - want) * (out[i] - want);
        den += weights[i] * want * want;
    }
    let rel = (num / den).sqrt();
    assert!(rel < 1e-3, "eigen-probe relative L2 error {rel:.2e}");

    // Doubling lambda rescales per homogeneity for the Neumann half line.
    let neu = ctx_plain(FamilyKind::HalfLineNeumann, 2.5);
    let (hnodes, hedges) = log_grid(0.05, 60.0, 96);
    let hw = weights_for(2.5, &hedges);
    let hf: Vec<f64> = hnodes.iter().map(|&x| (-x).exp()).collect();
    let out1 = apply_resolvent(&neu, 1.0, &hnodes, &hw, &hf).unwrap();
    let out2 = apply_resolvent(&neu, 2.0, &hnodes, &hw, &hf).unwrap();
    // (L + 4)^{-1} vs (L + 1)^{-1}: no exact pointwise relation without
    // rescaling f too, so check the kernel identity instead at sample pairs.
    let _ = (out1, out2);
    for &(x, y) in &[(0.3, 1.0), (2.0, 5.0)] {
        let lhs = kernel(&neu, 2.0, x, y);
        let rhs = 2f64.powf(2.5 - 2.0) * kernel(&neu, 1.0, 2.0 * x, 2.0 * y);
        assert!(((lhs - rhs) / rhs).abs() < 1e-10);
    }
}
