//! Operator families as runtime-selectable strategies.
//!
//! Every operator here is a self-adjoint extension of
//! `-f'' - (d-1)/r f'` on some subset of the line with the measure
//! `|r|^{d-1} dr`, possibly with an inverse-square or junction-delta
//! potential. All resolvent kernels share one piecewise template
//! (see [`super::resolvent`]); what distinguishes the families is
//!
//! * the underlying set (half line, ray, broken line, full line),
//! * which solution basis backs the kernel (plain or potential-shifted),
//! * the scalar coupling `F(lambda)` multiplying the `k k` term.
//!
//! Each family is a unit struct implementing [`FamilyStrategy`], registered
//! by name in [`REGISTRY`] and selectable at runtime (`--family` on the CLI).

use crate::error::Error;
use crate::logval::FunValue;
use crate::specfun::{
    a_zero_limit, ratios_of, wronskian_constant, Dimension, PotentialParams, SolutionBasis,
};
use crate::Result;

/// Tags for the nine operator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    HalfLineNeumann,
    HalfLineDirichlet,
    RayDirichlet,
    RayNeumann,
    BrokenLine,
    FullLineDirichlet,
    HalfLineNeumannIsq,
    BrokenLineIsq,
    BrokenLineDelta,
}

impl FamilyKind {
    pub fn name(&self) -> &'static str {
        self.strategy().name()
    }

    pub fn strategy(&self) -> &'static dyn FamilyStrategy {
        lookup_kind(*self)
    }

    pub fn all() -> impl Iterator<Item = FamilyKind> {
        REGISTRY.iter().map(|s| s.kind())
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        lookup(s).map(|st| st.kind()).ok_or_else(|| {
            let names: Vec<&str> = REGISTRY.iter().map(|s| s.name()).collect();
            Error::InvalidOperator(format!("unknown family '{s}'; known: {}", names.join(", ")))
        })
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The set an operator lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DomainShape {
    /// `(0, inf)`
    HalfLine,
    /// `[1, inf)`
    Ray,
    /// `(-inf, -1] U [1, inf)`
    BrokenLine,
    /// all of `R` (junction at the origin)
    FullLine,
}

impl DomainShape {
    pub fn contains(&self, x: f64) -> bool {
        match self {
            DomainShape::HalfLine => x > 0.0,
            DomainShape::Ray => x >= 1.0,
            DomainShape::BrokenLine => x.abs() >= 1.0,
            DomainShape::FullLine => x.is_finite(),
        }
    }

    /// Junction coordinate: where the boundary/transmission condition sits.
    pub fn junction(&self) -> f64 {
        match self {
            DomainShape::HalfLine | DomainShape::FullLine => 0.0,
            DomainShape::Ray | DomainShape::BrokenLine => 1.0,
        }
    }

    /// Whether the set has a mirror component at negative coordinates.
    pub fn two_sided(&self) -> bool {
        matches!(self, DomainShape::BrokenLine | DomainShape::FullLine)
    }
}

/// A validated operator: family tag, dimension and potential parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OperatorSpec {
    kind: FamilyKind,
    d: Dimension,
    /// Inverse-square coupling `c` (ISQ families only).
    coupling: Option<f64>,
    /// Junction delta strength `a` (delta family only).
    strength: Option<f64>,
}

impl OperatorSpec {
    pub fn new(kind: FamilyKind, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<Self> {
        let strat = kind.strategy();
        strat.validate(d, c, a)?;
        Ok(OperatorSpec { kind, d, coupling: c, strength: a })
    }

    /// Plain family without potential parameters.
    pub fn plain(kind: FamilyKind, d: f64) -> Result<Self> {
        Self::new(kind, Dimension::new(d)?, None, None)
    }

    /// Inverse-square family.
    pub fn isq(kind: FamilyKind, d: f64, c: f64) -> Result<Self> {
        Self::new(kind, Dimension::new(d)?, Some(c), None)
    }

    /// Junction-delta family.
    pub fn delta(d: f64, a: f64) -> Result<Self> {
        Self::new(FamilyKind::BrokenLineDelta, Dimension::new(d)?, None, Some(a))
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn dimension(&self) -> Dimension {
        self.d
    }

    pub fn coupling(&self) -> Option<f64> {
        self.coupling
    }

    pub fn strength(&self) -> Option<f64> {
        self.strength
    }

    pub fn strategy(&self) -> &'static dyn FamilyStrategy {
        self.kind.strategy()
    }

    pub fn domain(&self) -> DomainShape {
        self.strategy().domain()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.domain().contains(x)
    }
}

/// Per-lambda coupling of the `k k` term in the kernel template.
#[derive(Debug, Clone, Copy)]
pub struct Couplings {
    /// Coefficient of `-k(lambda x) k(lambda y)` on the same side.
    pub same: FunValue,
    /// Coefficient of `+k(lambda |x|) k(lambda |y|)` across the junction,
    /// absent for one-component domains.
    pub opposite: Option<FunValue>,
}

/// Precomputed per-operator context: solution basis, Wronskian coupling and
/// any constant coefficients. Build once, evaluate anywhere.
#[derive(Debug, Clone)]
pub struct KernelCtx {
    pub spec: OperatorSpec,
    pub basis: SolutionBasis,
    /// The computed Wronskian constant `nu` (negative).
    pub nu: f64,
    /// `-nu > 0`: the prefactor making every kernel positive.
    pub cpl: f64,
    /// Constant coupling for families whose `F` does not depend on lambda.
    pub const_f: Option<f64>,
}

impl KernelCtx {
    pub fn new(spec: OperatorSpec) -> Result<Self> {
        let strat = spec.strategy();
        let basis = strat.basis(&spec)?;
        let nu = wronskian_constant(&basis)?;
        if nu >= 0.0 {
            return Err(Error::PropertyViolation(format!(
                "expected negative Wronskian constant, got {nu}"
            )));
        }
        let const_f = strat.constant_coupling(&spec)?;
        Ok(KernelCtx { spec, basis, nu, cpl: -nu, const_f })
    }

    pub fn dimension(&self) -> f64 {
        self.spec.dimension().get()
    }

    pub fn couplings(&self, lambda: f64) -> Result<Couplings> {
        self.spec.strategy().couplings(self, lambda)
    }
}

/// Behaviour each operator family plugs into the shared kernel template.
pub trait FamilyStrategy: Send + Sync {
    fn kind(&self) -> FamilyKind;

    /// Registry key, e.g. `half-line-neumann`.
    fn name(&self) -> &'static str;

    fn domain(&self) -> DomainShape;

    /// Admissibility of `(d, c, a)` for this family.
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()>;

    /// Which solution pair backs the kernel.
    fn basis(&self, spec: &OperatorSpec) -> Result<SolutionBasis> {
        Ok(SolutionBasis::Plain(spec.dimension()))
    }

    /// Lambda-independent coupling, when the family has one (evaluated once
    /// at context build).
    fn constant_coupling(&self, _spec: &OperatorSpec) -> Result<Option<f64>> {
        Ok(None)
    }

    /// The kk-term couplings at this `lambda`.
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings>;

    /// Predicted open interval of `L^p` boundedness for the Riesz transform
    /// of this operator, when the theory pins one down. The `bool` marks an
    /// upper endpoint that is itself bounded (the `d = 2` broken-line case).
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)>;
}

fn require_no_params(name: &str, c: Option<f64>, a: Option<f64>) -> Result<()> {
    if c.is_some() || a.is_some() {
        return Err(Error::InvalidOperator(format!("{name} takes no potential parameters")));
    }
    Ok(())
}

fn require_narrow_band(name: &str, d: Dimension) -> Result<()> {
    let dd = d.get();
    if !(dd < 2.0) {
        return Err(Error::InvalidOperator(format!(
            "{name} is only admitted for 1 < d < 2, got d = {dd}"
        )));
    }
    Ok(())
}

/// Threshold interval shared by the plain Dirichlet-type families:
/// `(1, d)` above dimension 2, `(1, 2]` at 2, `(1, d/(d-1))` below.
fn dirichlet_type_window(d: f64) -> (f64, f64, bool) {
    if d > 2.0 {
        (1.0, d, false)
    } else if d == 2.0 {
        (1.0, 2.0, true)
    } else {
        (1.0, d / (d - 1.0), false)
    }
}

/// The inverse-square window from the potential-shifted envelopes:
/// `( d/min(d, d/2+1+s), d/max(0, d/2-s) )` with `s = sqrt((d/2-1)^2+c)`,
/// reading `d/0` as infinity.
pub fn isq_window(d: f64, c: f64) -> (f64, f64) {
    let s = ((d / 2.0 - 1.0).powi(2) + c).sqrt();
    let lo = d / f64::min(d, d / 2.0 + 1.0 + s);
    let denom = f64::max(0.0, d / 2.0 - s);
    let hi = if denom == 0.0 { f64::INFINITY } else { d / denom };
    (lo, hi)
}

/// Boundedness window of the projected Riesz transform for the resonant
/// junction delta `a = -2(d-2)`: `( d/(d-2), d/3 )`, empty unless `d > 6`.
pub fn projected_delta_window(d: f64) -> (f64, f64) {
    (d / (d - 2.0), d / 3.0)
}

// ---------------------------------------------------------------------------
// The nine families.
// ---------------------------------------------------------------------------

macro_rules! ratio_couplings {
    ($ctx:expr, $lambda:expr, $pick:ident, $half:expr) => {{
        let r = ratios_of(&$ctx.basis, $lambda)?;
        let scale = if $half { FunValue::from_value(0.5) } else { FunValue::ONE };
        scale * r.$pick
    }};
}

struct HalfLineNeumann;

impl FamilyStrategy for HalfLineNeumann {
    fn kind(&self) -> FamilyKind {
        FamilyKind::HalfLineNeumann
    }
    fn name(&self) -> &'static str {
        "half-line-neumann"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::HalfLine
    }
    fn validate(&self, _d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)
    }
    fn couplings(&self, _ctx: &KernelCtx, _lambda: f64) -> Result<Couplings> {
        Ok(Couplings { same: FunValue::ZERO, opposite: None })
    }
    fn predicted_window(&self, _spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        Some((1.0, f64::INFINITY, false))
    }
}

struct HalfLineDirichlet;

impl FamilyStrategy for HalfLineDirichlet {
    fn kind(&self) -> FamilyKind {
        FamilyKind::HalfLineDirichlet
    }
    fn name(&self) -> &'static str {
        "half-line-dirichlet"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::HalfLine
    }
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)?;
        require_narrow_band(self.name(), d)
    }
    fn constant_coupling(&self, spec: &OperatorSpec) -> Result<Option<f64>> {
        Ok(Some(a_zero_limit(spec.dimension())?))
    }
    fn couplings(&self, ctx: &KernelCtx, _lambda: f64) -> Result<Couplings> {
        Ok(Couplings { same: FunValue::from_value(ctx.const_f.unwrap()), opposite: None })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        let d = spec.dimension().get();
        Some((1.0, d / (d - 1.0), false))
    }
}

struct RayDirichlet;

impl FamilyStrategy for RayDirichlet {
    fn kind(&self) -> FamilyKind {
        FamilyKind::RayDirichlet
    }
    fn name(&self) -> &'static str {
        "ray-dirichlet"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::Ray
    }
    fn validate(&self, _d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)
    }
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings> {
        Ok(Couplings { same: ratio_couplings!(ctx, lambda, a, false), opposite: None })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        Some(dirichlet_type_window(spec.dimension().get()))
    }
}

struct RayNeumann;

impl FamilyStrategy for RayNeumann {
    fn kind(&self) -> FamilyKind {
        FamilyKind::RayNeumann
    }
    fn name(&self) -> &'static str {
        "ray-neumann"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::Ray
    }
    fn validate(&self, _d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)
    }
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings> {
        Ok(Couplings { same: ratio_couplings!(ctx, lambda, b, false), opposite: None })
    }
    fn predicted_window(&self, _spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        Some((1.0, f64::INFINITY, false))
    }
}

struct BrokenLine;

impl FamilyStrategy for BrokenLine {
    fn kind(&self) -> FamilyKind {
        FamilyKind::BrokenLine
    }
    fn name(&self) -> &'static str {
        "broken-line"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::BrokenLine
    }
    fn validate(&self, _d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)
    }
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings> {
        let r = ratios_of(&ctx.basis, lambda)?;
        let half = FunValue::from_value(0.5);
        Ok(Couplings { same: half * r.c, opposite: Some(half * r.d) })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        Some(dirichlet_type_window(spec.dimension().get()))
    }
}

struct FullLineDirichlet;

impl FamilyStrategy for FullLineDirichlet {
    fn kind(&self) -> FamilyKind {
        FamilyKind::FullLineDirichlet
    }
    fn name(&self) -> &'static str {
        "full-line-dirichlet"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::FullLine
    }
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        require_no_params(self.name(), c, a)?;
        require_narrow_band(self.name(), d)
    }
    fn constant_coupling(&self, spec: &OperatorSpec) -> Result<Option<f64>> {
        // D(0)/2 = C(0)/2, the collapsed-junction limit of the broken line.
        Ok(Some(0.5 * crate::specfun::d_zero_limit(spec.dimension())?))
    }
    fn couplings(&self, ctx: &KernelCtx, _lambda: f64) -> Result<Couplings> {
        let f = FunValue::from_value(ctx.const_f.unwrap());
        Ok(Couplings { same: f, opposite: Some(f) })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        let d = spec.dimension().get();
        Some((1.0, d / (d - 1.0), false))
    }
}

struct HalfLineNeumannIsq;

impl FamilyStrategy for HalfLineNeumannIsq {
    fn kind(&self) -> FamilyKind {
        FamilyKind::HalfLineNeumannIsq
    }
    fn name(&self) -> &'static str {
        "half-line-neumann-isq"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::HalfLine
    }
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        if a.is_some() {
            return Err(Error::InvalidOperator("ISQ families take no delta strength".into()));
        }
        let c = c.ok_or_else(|| Error::InvalidOperator("ISQ family requires coupling c".into()))?;
        PotentialParams::new(d, c).map(|_| ())
    }
    fn basis(&self, spec: &OperatorSpec) -> Result<SolutionBasis> {
        let pot = PotentialParams::new(spec.dimension(), spec.coupling().unwrap())?;
        Ok(SolutionBasis::Potential(spec.dimension(), pot))
    }
    fn couplings(&self, _ctx: &KernelCtx, _lambda: f64) -> Result<Couplings> {
        Ok(Couplings { same: FunValue::ZERO, opposite: None })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        let c = spec.coupling().unwrap();
        if c == 0.0 {
            return Some((1.0, f64::INFINITY, false));
        }
        let (lo, hi) = isq_window(spec.dimension().get(), c);
        Some((lo, hi, false))
    }
}

struct BrokenLineIsq;

impl FamilyStrategy for BrokenLineIsq {
    fn kind(&self) -> FamilyKind {
        FamilyKind::BrokenLineIsq
    }
    fn name(&self) -> &'static str {
        "broken-line-isq"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::BrokenLine
    }
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        if a.is_some() {
            return Err(Error::InvalidOperator("ISQ families take no delta strength".into()));
        }
        let c = c.ok_or_else(|| Error::InvalidOperator("ISQ family requires coupling c".into()))?;
        PotentialParams::new(d, c).map(|_| ())
    }
    fn basis(&self, spec: &OperatorSpec) -> Result<SolutionBasis> {
        let pot = PotentialParams::new(spec.dimension(), spec.coupling().unwrap())?;
        Ok(SolutionBasis::Potential(spec.dimension(), pot))
    }
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings> {
        let r = ratios_of(&ctx.basis, lambda)?;
        let half = FunValue::from_value(0.5);
        Ok(Couplings { same: half * r.c, opposite: Some(half * r.d) })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        let c = spec.coupling().unwrap();
        if c == 0.0 {
            return Some(dirichlet_type_window(spec.dimension().get()));
        }
        let (lo, hi) = isq_window(spec.dimension().get(), c);
        Some((lo, hi, false))
    }
}

struct BrokenLineDelta;

/// Stable pieces of the junction-delta coupling at one `lambda`.
///
/// The coupling divides by `2 lambda k' - a k`. At the resonant strength
/// `a* = -2(d-2)` that denominator degenerates to
/// `2 [lambda k' + (d-2) k]`, a combination whose naive evaluation cancels
/// catastrophically as `lambda -> 0`; it is computed through the exact
/// single-Bessel-term identity instead (see
/// [`crate::specfun::kl::junction_flux_combo`]).
pub(crate) struct DeltaCoupling {
    /// `2 lambda k'(lambda) - a k(lambda)`.
    pub num: FunValue,
    /// `lambda k'(lambda)`.
    pub lam_kp: FunValue,
    /// `t = a k / (lambda k')`.
    pub t: FunValue,
}

pub(crate) fn delta_coupling_parts(ctx: &KernelCtx, lambda: f64) -> Result<DeltaCoupling> {
    let a = ctx
        .spec
        .strength()
        .ok_or_else(|| Error::InvalidOperator("delta coupling requires the delta family".into()))?;
    let d = ctx.dimension();
    let a_star = -2.0 * (d - 2.0);
    let v = ctx.basis.eval(lambda)?;
    let q = crate::specfun::kl::junction_flux_combo(ctx.spec.dimension(), lambda)?;
    let lam_kp = FunValue::from_value(lambda) * v.kprime;
    let num = FunValue::from_value(2.0) * q - FunValue::from_value(a - a_star) * v.k;
    let t = FunValue::from_value(a) * v.k / lam_kp;
    Ok(DeltaCoupling { num, lam_kp, t })
}

impl FamilyStrategy for BrokenLineDelta {
    fn kind(&self) -> FamilyKind {
        FamilyKind::BrokenLineDelta
    }
    fn name(&self) -> &'static str {
        "broken-line-delta"
    }
    fn domain(&self) -> DomainShape {
        DomainShape::BrokenLine
    }
    fn validate(&self, d: Dimension, c: Option<f64>, a: Option<f64>) -> Result<()> {
        if c.is_some() {
            return Err(Error::InvalidOperator("delta family takes no ISQ coupling".into()));
        }
        if a.is_none() {
            return Err(Error::InvalidOperator("delta family requires strength a".into()));
        }
        if d.get() <= 2.0 {
            return Err(Error::InvalidOperator(format!(
                "delta family requires d > 2, got d = {}",
                d.get()
            )));
        }
        Ok(())
    }
    fn couplings(&self, ctx: &KernelCtx, lambda: f64) -> Result<Couplings> {
        let parts = delta_coupling_parts(ctx, lambda)?;
        if parts.num.is_zero() {
            return Err(Error::Pole { lambda });
        }
        let r = ratios_of(&ctx.basis, lambda)?;
        // D_a = 2 D / (2 - t) = 2 D lambda k' / (2 lambda k' - a k).
        let d_a = FunValue::from_value(2.0) * r.d * parts.lam_kp / parts.num;
        let half = FunValue::from_value(0.5);
        let c_a = r.c - half * parts.t * d_a;
        Ok(Couplings { same: half * c_a, opposite: Some(half * d_a) })
    }
    fn predicted_window(&self, spec: &OperatorSpec) -> Option<(f64, f64, bool)> {
        let d = spec.dimension().get();
        let a = spec.strength().unwrap();
        if (a + 2.0 * (d - 2.0)).abs() < 1e-12 {
            let (lo, hi) = projected_delta_window(d);
            Some((lo, hi, false))
        } else {
            Some(dirichlet_type_window(d))
        }
    }
}

/// The name-keyed strategy registry.
pub static REGISTRY: &[&dyn FamilyStrategy] = &[
    &HalfLineNeumann,
    &HalfLineDirichlet,
    &RayDirichlet,
    &RayNeumann,
    &BrokenLine,
    &FullLineDirichlet,
    &HalfLineNeumannIsq,
    &BrokenLineIsq,
    &BrokenLineDelta,
];

/// Look a strategy up by its registry name.
pub fn lookup(name: &str) -> Option<&'static dyn FamilyStrategy> {
    REGISTRY.iter().copied().find(|s| s.name() == name)
}

fn lookup_kind(kind: FamilyKind) -> &'static dyn FamilyStrategy {
    REGISTRY.iter().copied().find(|s| s.kind() == kind).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_roundtrip() {
        for strat in REGISTRY {
            let found = lookup(strat.name()).unwrap();
            assert_eq!(found.kind(), strat.kind());
            assert_eq!(strat.name().parse::<FamilyKind>().unwrap(), strat.kind());
        }
        assert!("no-such-family".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn admissibility_rules() {
        // Dirichlet half/full line only below dimension 2.
        assert!(OperatorSpec::plain(FamilyKind::HalfLineDirichlet, 1.5).is_ok());
        assert!(OperatorSpec::plain(FamilyKind::HalfLineDirichlet, 2.5).is_err());
        assert!(OperatorSpec::plain(FamilyKind::FullLineDirichlet, 3.0).is_err());
        // ISQ needs d > 2 and supercritical coupling.
        assert!(OperatorSpec::isq(FamilyKind::HalfLineNeumannIsq, 4.0, 1.25).is_ok());
        assert!(OperatorSpec::isq(FamilyKind::HalfLineNeumannIsq, 4.0, -1.5).is_err());
        assert!(OperatorSpec::isq(FamilyKind::BrokenLineIsq, 1.5, 0.5).is_err());
        // Delta needs d > 2 and a strength.
        assert!(OperatorSpec::delta(5.0, -6.0).is_ok());
        assert!(OperatorSpec::delta(1.5, -6.0).is_err());
        assert!(OperatorSpec::new(
            FamilyKind::BrokenLineDelta,
            Dimension::new(5.0).unwrap(),
            None,
            None
        )
        .is_err());
        // Plain families reject stray parameters.
        assert!(OperatorSpec::new(
            FamilyKind::BrokenLine,
            Dimension::new(3.0).unwrap(),
            Some(1.0),
            None
        )
        .is_err());
    }

    #[test]
    fn domain_membership() {
        let ray = OperatorSpec::plain(FamilyKind::RayDirichlet, 3.0).unwrap();
        assert!(ray.contains(1.0) && ray.contains(10.0) && !ray.contains(0.5));
        let broken = OperatorSpec::plain(FamilyKind::BrokenLine, 3.0).unwrap();
        assert!(broken.contains(-2.0) && !broken.contains(0.3));
        let half = OperatorSpec::plain(FamilyKind::HalfLineNeumann, 3.0).unwrap();
        assert!(half.contains(0.1) && !half.contains(-0.1));
    }

    #[test]
    fn predicted_windows() {
        let w = |spec: OperatorSpec| spec.strategy().predicted_window(&spec).unwrap();
        let b3 = w(OperatorSpec::plain(FamilyKind::BrokenLine, 3.0).unwrap());
        assert_eq!(b3, (1.0, 3.0, false));
        let b2 = w(OperatorSpec::plain(FamilyKind::BrokenLine, 2.0).unwrap());
        assert_eq!(b2, (1.0, 2.0, true));
        let b15 = w(OperatorSpec::plain(FamilyKind::BrokenLine, 1.5).unwrap());
        assert!((b15.1 - 3.0).abs() < 1e-14);
        // ISQ at d=4, c=5/4: (1, 8).
        let isq = w(OperatorSpec::isq(FamilyKind::HalfLineNeumannIsq, 4.0, 1.25).unwrap());
        assert!((isq.0 - 1.0).abs() < 1e-14 && (isq.1 - 8.0).abs() < 1e-12);
        // Projected delta at d=6: (1.5, 2).
        let pd = w(OperatorSpec::delta(6.0, -8.0).unwrap());
        assert!((pd.0 - 1.5).abs() < 1e-14 && (pd.1 - 2.0).abs() < 1e-14);
        // Projected delta at d=5: empty window (5/3, 5/3).
        let pd5 = w(OperatorSpec::delta(5.0, -6.0).unwrap());
        assert!((pd5.0 - 5.0 / 3.0).abs() < 1e-14 && (pd5.1 - 5.0 / 3.0).abs() < 1e-14);
    }
}
