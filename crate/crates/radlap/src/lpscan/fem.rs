//! P1 finite-element discretization of the operator families on weighted
//! meshes, with banded solves, eigen tools, and the closed-form-vs-discrete
//! resolvent cross-check gate.

use crate::error::Error;
use crate::operators::{apply_resolvent, DomainShape, FamilyKind, KernelCtx, OperatorSpec};
use crate::quad::GaussRule;
use crate::Result;
use nalgebra::{DMatrix, SymmetricEigen};

/// Symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct Tridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl Tridiag {
    pub fn zeros(n: usize) -> Self {
        Tridiag { diag: vec![0.0; n], off: vec![0.0; n.saturating_sub(1)] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: f64, other: &Tridiag) -> Tridiag {
        Tridiag {
            diag: self.diag.iter().zip(&other.diag).map(|(a, b)| a + c * b).collect(),
            off: self.off.iter().zip(&other.off).map(|(a, b)| a + c * b).collect(),
        }
    }

    /// LDL^T factorization (SPD expected).
    pub fn factor(&self) -> Result<TridiagFactor> {
        let n = self.len();
        let mut d = vec![0.0; n];
        let mut l = vec![0.0; n.saturating_sub(1)];
        d[0] = self.diag[0];
        for i in 1..n {
            if d[i - 1] <= 0.0 {
                return Err(Error::NoConvergence(format!(
                    "non-positive pivot {} at row {i} in tridiagonal factorization",
                    d[i - 1]
                )));
            }
            l[i - 1] = self.off[i - 1] / d[i - 1];
            d[i] = self.diag[i] - l[i - 1] * self.off[i - 1];
        }
        if n > 0 && d[n - 1] <= 0.0 {
            return Err(Error::NoConvergence("non-positive final pivot".into()));
        }
        Ok(TridiagFactor { d, l })
    }
}

/// LDL^T factors of a tridiagonal SPD matrix.
#[derive(Debug, Clone)]
pub struct TridiagFactor {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagFactor {
    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut x = rhs.to_vec();
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
        x
    }
}

/// A discretized operator: the quadratic form matrices on a node chain.
///
/// The chain is ordered by position along the domain; for the broken line
/// the two junction points are glued into a single degree of freedom, so
/// everything stays tridiagonal.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub spec: OperatorSpec,
    /// Signed coordinate of each DOF along the chain.
    pub coords: Vec<f64>,
    /// Stiffness (including potential and junction-delta terms).
    pub stiff: Tridiag,
    /// Consistent mass matrix.
    pub mass: Tridiag,
    /// Lumped node weights (cell mass around each DOF).
    pub node_weights: Vec<f64>,
    /// Index of the glued junction DOF, when one exists.
    pub junction_dof: Option<usize>,
}

fn weight_antiderivative(d: f64, r: f64) -> f64 {
    r.signum() * r.abs().powf(d) / d
}

impl DiscreteOperator {
    /// Assemble on `n_per_side` log-spaced mesh points per component,
    /// spanning `[inner, r_max]` in `|r|`, natural (Neumann) outer boundary.
    pub fn assemble(spec: OperatorSpec, inner: f64, r_max: f64, n_per_side: usize) -> Result<Self> {
        Self::assemble_with_outer(spec, inner, r_max, n_per_side, false)
    }

    /// Like [`DiscreteOperator::assemble`] but with a Dirichlet condition at
    /// the outer truncation; this pins decaying solutions and keeps the
    /// truncation from feeding near-constant artifacts into the bottom of
    /// the spectrum.
    pub fn assemble_with_outer(
        spec: OperatorSpec,
        inner: f64,
        r_max: f64,
        n_per_side: usize,
        outer_dirichlet: bool,
    ) -> Result<Self> {
        let d = spec.dimension().get();
        let dom = spec.domain();
        let inner = match dom {
            DomainShape::Ray | DomainShape::BrokenLine => 1.0,
            _ => inner,
        };
        if !(inner > 0.0 && r_max > inner) {
            return Err(Error::GridMismatch("mesh needs 0 < inner < r_max".into()));
        }
        let side: Vec<f64> = (0..n_per_side)
            .map(|i| inner * (r_max / inner).powf(i as f64 / (n_per_side - 1) as f64))
            .collect();

        // Chain coordinates and the glued-junction bookkeeping.
        let (coords, junction_dof) = match dom {
            DomainShape::HalfLine | DomainShape::Ray => (side.clone(), None),
            DomainShape::BrokenLine => {
                // -R .. -1, then the glued junction (+1), then 1+ .. R.
                let mut c: Vec<f64> = side.iter().rev().map(|&x| -x).collect();
                let j = c.len() - 1;
                c.extend(side.iter().skip(1));
                (c, Some(j))
            }
            DomainShape::FullLine => {
                let mut c: Vec<f64> = side.iter().rev().map(|&x| -x).collect();
                c.extend(side.iter());
                (c, None)
            }
        };
        let n = coords.len();
        let mut stiff = Tridiag::zeros(n);
        let mut mass = Tridiag::zeros(n);
        let rule = GaussRule::new(6);

        let c_isq = spec.coupling().unwrap_or(0.0);
        for e in 0..n - 1 {
            // For the glued broken-line junction the positive-side cell
            // starts at +1 even though the DOF coordinate reads -1-side.
            let (a, b) = if Some(e) == junction_dof {
                (1.0, coords[e + 1])
            } else {
                (coords[e], coords[e + 1])
            };
            let h = b - a;
            let cell_mass = weight_antiderivative(d, b) - weight_antiderivative(d, a);
            // Stiffness: phi' = -/+ 1/h on the cell.
            let s = cell_mass / (h * h);
            stiff.diag[e] += s;
            stiff.diag[e + 1] += s;
            stiff.off[e] -= s;
            // Consistent mass and ISQ potential via quadrature.
            let phi0 = |r: f64| (b - r) / h;
            let phi1 = |r: f64| (r - a) / h;
            let rho = |r: f64| r.abs().powf(d - 1.0);
            let m00 = rule.integrate(a, b, |r| phi0(r) * phi0(r) * rho(r));
            let m11 = rule.integrate(a, b, |r| phi1(r) * phi1(r) * rho(r));
            let m01 = rule.integrate(a, b, |r| phi0(r) * phi1(r) * rho(r));
            mass.diag[e] += m00;
            mass.diag[e + 1] += m11;
            mass.off[e] += m01;
            if c_isq != 0.0 {
                let v = |r: f64| c_isq * rho(r) / (r * r);
                stiff.diag[e] += rule.integrate(a, b, |r| phi0(r) * phi0(r) * v(r));
                stiff.diag[e + 1] += rule.integrate(a, b, |r| phi1(r) * phi1(r) * v(r));
                stiff.off[e] += rule.integrate(a, b, |r| phi0(r) * phi1(r) * v(r));
            }
        }

        // Junction delta: form gains a * f(1) g(1).
        if let (Some(j), Some(a)) = (junction_dof, spec.strength()) {
            stiff.diag[j] += a;
        }

        // Dirichlet boundaries: eliminate by a huge penalty on the
        // constrained DOF (keeps indices stable).
        let penalty = 1e12 * (1.0 + stiff.diag.iter().fold(0.0f64, |m, &v| m.max(v.abs())));
        match spec.kind() {
            FamilyKind::HalfLineDirichlet | FamilyKind::RayDirichlet => {
                stiff.diag[0] += penalty;
            }
            _ => {}
        }
        if outer_dirichlet {
            stiff.diag[n - 1] += penalty;
            if dom.two_sided() {
                stiff.diag[0] += penalty;
            }
        }

        let node_weights = mass_lump(&mass);
        Ok(DiscreteOperator { spec, coords, stiff, mass, node_weights, junction_dof })
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Factor `S + lambda^2 M`.
    pub fn shifted_factor(&self, lambda: f64) -> Result<TridiagFactor> {
        self.stiff.add_scaled(lambda * lambda, &self.mass).factor()
    }

    /// `(L_h + lambda^2)^{-1} g` for nodal values `g` (integral-operator
    /// normalization: the right-hand side is `M g`).
    pub fn resolvent_apply(&self, fac: &TridiagFactor, g: &[f64]) -> Vec<f64> {
        let mut rhs = vec![0.0; g.len()];
        self.mass.apply(g, &mut rhs);
        fac.solve(&rhs)
    }

    /// Smallest generalized eigenpair of `S v = theta M v` by shifted
    /// inverse iteration. Returns `(theta, v)` with `v` M-normalized.
    /// The shift grows automatically until `S + shift M` is positive
    /// definite (the spectrum may dip slightly below zero).
    pub fn smallest_eigenpair(&self, shift: f64, iters: usize) -> Result<(f64, Vec<f64>)> {
        let n = self.len();
        let mut shift = shift;
        let fac = loop {
            match self.stiff.add_scaled(shift, &self.mass).factor() {
                Ok(f) => break f,
                Err(_) if shift < 1e6 => shift *= 10.0,
                Err(e) => return Err(e),
            }
        };
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        let mut theta = 0.0;
        for _ in 0..iters {
            let mut mv = vec![0.0; n];
            self.mass.apply(&v, &mut mv);
            let w = fac.solve(&mv);
            // M-normalize.
            let mut mw = vec![0.0; n];
            self.mass.apply(&w, &mut mw);
            let norm = w.iter().zip(&mw).map(|(a, b)| a * b).sum::<f64>().sqrt();
            v = w.iter().map(|x| x / norm).collect();
            let mut sv = vec![0.0; n];
            self.stiff.apply(&v, &mut sv);
            theta = v.iter().zip(&sv).map(|(a, b)| a * b).sum::<f64>();
        }
        Ok((theta, v))
    }

    /// Dense generalized symmetric eigendecomposition `S V = M V Theta`
    /// with `V` M-orthonormal. Meant for moderate sizes.
    pub fn eigendecompose(&self) -> Result<(Vec<f64>, DMatrix<f64>)> {
        let n = self.len();
        // Cholesky of tridiagonal M: lower bidiagonal.
        let mut ld = vec![0.0; n];
        let mut ll = vec![0.0; n - 1];
        ld[0] = self.mass.diag[0].sqrt();
        for i in 1..n {
            ll[i - 1] = self.mass.off[i - 1] / ld[i - 1];
            let t = self.mass.diag[i] - ll[i - 1] * ll[i - 1];
            if t <= 0.0 {
                return Err(Error::NoConvergence("mass matrix not positive definite".into()));
            }
            ld[i] = t.sqrt();
        }
        let fwd = |rhs: &mut [f64]| {
            rhs[0] /= ld[0];
            for i in 1..n {
                rhs[i] = (rhs[i] - ll[i - 1] * rhs[i - 1]) / ld[i];
            }
        };
        let bwd = |rhs: &mut [f64]| {
            rhs[n - 1] /= ld[n - 1];
            for i in (0..n - 1).rev() {
                rhs[i] = (rhs[i] - ll[i] * rhs[i + 1]) / ld[i];
            }
        };

        // C = L^{-1} S L^{-T}, built column by column.
        let mut c = DMatrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for v in col.iter_mut() {
                *v = 0.0;
            }
            col[j] = 1.0;
            bwd(&mut col); // L^{-T} e_j
            let mut sc = vec![0.0; n];
            self.stiff.apply(&col, &mut sc);
            fwd(&mut sc); // L^{-1} S L^{-T} e_j
            for i in 0..n {
                c[(i, j)] = sc[i];
            }
        }
        // Symmetrize rounding.
        for i in 0..n {
            for j in 0..i {
                let v = 0.5 * (c[(i, j)] + c[(j, i)]);
                c[(i, j)] = v;
                c[(j, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(c);
        let mut vecs = DMatrix::zeros(n, n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = eig.eigenvectors[(i, j)];
            }
            bwd(&mut col);
            for i in 0..n {
                vecs[(i, j)] = col[i];
            }
        }
        Ok((eig.eigenvalues.as_slice().to_vec(), vecs))
    }
}

fn mass_lump(mass: &Tridiag) -> Vec<f64> {
    let n = mass.len();
    (0..n)
        .map(|i| {
            let mut acc = mass.diag[i];
            if i > 0 {
                acc += mass.off[i - 1];
            }
            if i + 1 < n {
                acc += mass.off[i];
            }
            acc
        })
        .collect()
}

/// Relative weighted-L2 operator-norm difference between the discretized
/// resolvent and the closed-form kernel at the given `lambda`, compared on
/// the window `|x| <= r_cmp` of a mesh padded out to `r_pad`.
pub fn resolvent_cross_check(
    spec: OperatorSpec,
    lambda: f64,
    inner: f64,
    r_cmp: f64,
    r_pad: f64,
    n_per_side: usize,
) -> Result<f64> {
    let ctx = KernelCtx::new(spec)?;
    let disc = DiscreteOperator::assemble(spec, inner, r_pad, n_per_side)?;
    let fac = disc.shifted_factor(lambda)?;
    let n = disc.len();

    let window: Vec<usize> =
        (0..n).filter(|&i| disc.coords[i].abs() <= r_cmp).collect();
    let m = window.len();
    let wts: Vec<f64> = window.iter().map(|&i| disc.node_weights[i]).collect();
    let xs: Vec<f64> = window.iter().map(|&i| disc.coords[i]).collect();

    let embed = |g: &[f64]| {
        let mut full = vec![0.0; n];
        for (slot, &i) in window.iter().enumerate() {
            full[i] = g[slot];
        }
        full
    };
    let restrict =
        |full: &[f64]| window.iter().map(|&i| full[i]).collect::<Vec<f64>>();

    // A g: discrete resolvent compressed to the window.
    let apply_a = |g: &[f64]| restrict(&disc.resolvent_apply(&fac, &embed(g)));
    // B g: closed-form kernel quadrature on the window nodes.
    let apply_b = |g: &[f64]| apply_resolvent(&ctx, lambda, &xs, &wts, g).unwrap();

    // Power iteration on the w-symmetrized difference. Both terms are
    // self-adjoint in (their) weighted inner products, so a straight
    // two-sided iteration on D^T D with the w-conjugation is enough.
    let sqrt_w: Vec<f64> = wts.iter().map(|w| w.sqrt()).collect();
    let sym = |apply: &dyn Fn(&[f64]) -> Vec<f64>, v: &[f64]| -> Vec<f64> {
        let scaled: Vec<f64> = v.iter().zip(&sqrt_w).map(|(x, s)| x / s).collect();
        let out = apply(&scaled);
        out.iter().zip(&sqrt_w).map(|(x, s)| x * s).collect()
    };

    let diff = |v: &[f64]| -> Vec<f64> {
        let a = sym(&apply_a, v);
        let b = sym(&apply_b, v);
        a.iter().zip(&b).map(|(x, y)| x - y).collect()
    };
    let bnorm_op = |v: &[f64]| sym(&apply_b, v);

    let norm_of = |op: &dyn Fn(&[f64]) -> Vec<f64>| -> f64 {
        let mut v: Vec<f64> = (0..m).map(|i| ((i as f64) * 0.37).sin() + 1.2).collect();
        let nrm = |u: &[f64]| u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s0 = nrm(&v);
        for x in v.iter_mut() {
            *x /= s0;
        }
        let mut sigma = 0.0;
        for _ in 0..60 {
            // v <- Op^T Op v; both Op here are symmetric after conjugation.
            let u = op(&v);
            let w = op(&u);
            sigma = nrm(&w).sqrt();
            let s = nrm(&w);
            if s == 0.0 {
                return 0.0;
            }
            for (x, y) in v.iter_mut().zip(&w) {
                *x = y / s;
            }
        }
        sigma
    };

    let dn = norm_of(&diff);
    let bn = norm_of(&bnorm_op);
    Ok(dn / bn)
}
