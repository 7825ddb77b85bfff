//! A concrete realization of the test-function space `S(R \ {a, b})`.
//!
//! Every function is kept in the normal form
//!
//! ```text
//! f(x) = Σ coeff · χ_region(x) · x^m · g^{(n)}(x)
//! ```
//!
//! where each generator `g` is a Gaussian packet multiplied by the window
//! `w_s(x - a) w_s(x - b)`. This form is closed under `Q` (raise `m`), `d/dx`
//! (product rule on `x^m g^{(n)}`) and multiplication by the piecewise
//! constant potential (restrict the region). Region indicators commute with
//! `d/dx` here because every generator vanishes to all orders at `a` and `b`.

mod generator;

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use generator::{Generator, PacketShape, HARD_ORDER_LIMIT};

use crate::error::{domain, Error, Result};
use crate::model::{BarrierModel, Observable};
use crate::quadrature::{build_partition, integrate_partition, integrate_line_with, QuadratureSpec};

pub const DEFAULT_ORDER_CAP: usize = 16;
pub const DEFAULT_TERM_BUDGET: usize = 1_000_000;

/// Window sharpness as a fraction of the barrier width.
pub const WINDOW_FRACTION: f64 = 0.1;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Serialized description of a test-function family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyDescriptor {
    GaussianPacket {
        center: f64,
        width: f64,
        momentum: f64,
        #[serde(default)]
        poly_degree: u32,
    },
}

impl FamilyDescriptor {
    pub fn packet(center: f64, width: f64, momentum: f64, poly_degree: u32) -> Self {
        FamilyDescriptor::GaussianPacket {
            center,
            width,
            momentum,
            poly_degree,
        }
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyDescriptor::GaussianPacket {
                center,
                width,
                momentum,
                poly_degree,
            } => write!(f, "gaussian_packet(c={center}, σ={width}, q={momentum}, deg={poly_degree})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    Everywhere,
    /// Open interval `(a, b)`.
    Inside,
    /// `x < a` or `x > b`.
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct TermKey {
    generator: usize,
    region: Region,
    power: u32,
    order: u32,
}

/// Element of the test-function space (or, for diagnostics, a flagged non-member).
#[derive(Debug, Clone)]
pub struct TestFunction {
    model: BarrierModel,
    generators: Vec<Generator>,
    terms: BTreeMap<TermKey, Complex64>,
    order_cap: usize,
    term_budget: usize,
    label: String,
}

/// `p(u) e^{iqx} e^{-u²} w_s(x - a) w_s(x - b)` with `u = (x - c)/σ`, `p(u) = u^d`.
pub fn build_test_function(kind: &FamilyDescriptor, model: &BarrierModel) -> Result<TestFunction> {
    let FamilyDescriptor::GaussianPacket {
        center,
        width,
        momentum,
        poly_degree,
    } = *kind;
    if !(width > 0.0) || !width.is_finite() {
        return Err(domain(format!("packet width must be positive, got {width}")));
    }
    if !center.is_finite() || !momentum.is_finite() {
        return Err(domain("packet center and momentum must be finite"));
    }
    if poly_degree as usize > HARD_ORDER_LIMIT {
        return Err(Error::Capability(format!(
            "polynomial degree {poly_degree} exceeds the limit {HARD_ORDER_LIMIT}"
        )));
    }
    let shape = PacketShape {
        center,
        width,
        momentum,
        degree: poly_degree,
    };
    let generator = Generator::Windowed {
        shape,
        a: model.a(),
        b: model.b(),
        sharpness: WINDOW_FRACTION * model.width(),
    };
    Ok(TestFunction::from_generator(model, generator, kind.to_string()))
}

impl TestFunction {
    fn from_generator(model: &BarrierModel, generator: Generator, label: String) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            TermKey {
                generator: 0,
                region: Region::Everywhere,
                power: 0,
                order: 0,
            },
            Complex64::new(1.0, 0.0),
        );
        Self {
            model: *model,
            generators: vec![generator],
            terms,
            order_cap: DEFAULT_ORDER_CAP,
            term_budget: DEFAULT_TERM_BUDGET,
            label,
        }
    }

    pub fn zero(model: &BarrierModel) -> Self {
        Self {
            model: *model,
            generators: Vec::new(),
            terms: BTreeMap::new(),
            order_cap: DEFAULT_ORDER_CAP,
            term_budget: DEFAULT_TERM_BUDGET,
            label: "0".into(),
        }
    }

    /// `e^{-x²}` with no window; a Schwartz function that is not in the space.
    pub fn bare_gaussian(model: &BarrierModel) -> Self {
        let shape = PacketShape {
            center: 0.0,
            width: 1.0,
            momentum: 0.0,
            degree: 0,
        };
        Self::from_generator(model, Generator::Bare(shape), "e^{-x^2}".into())
    }

    /// Unwindowed packet with the same shape as `kind`.
    pub fn bare_packet(kind: &FamilyDescriptor, model: &BarrierModel) -> Result<Self> {
        let windowed = build_test_function(kind, model)?;
        let Generator::Windowed { shape, .. } = windowed.generators[0] else {
            unreachable!("packets are built windowed");
        };
        Ok(Self::from_generator(model, Generator::Bare(shape), format!("bare {kind}")))
    }

    /// `1/(x + i)`: square integrable but outside the domain of `Q`.
    pub fn lorentzian(model: &BarrierModel) -> Self {
        Self::from_generator(model, Generator::Lorentzian, "1/(x+i)".into())
    }

    /// Same function with a different derivative-order cap (at most [`HARD_ORDER_LIMIT`]).
    pub fn with_order_cap(mut self, cap: usize) -> Result<Self> {
        if cap > HARD_ORDER_LIMIT || cap < self.max_order() {
            return Err(Error::Capability(format!(
                "order cap {cap} must lie in [{}, {HARD_ORDER_LIMIT}]",
                self.max_order()
            )));
        }
        self.order_cap = cap;
        Ok(self)
    }

    pub fn with_term_budget(mut self, budget: usize) -> Self {
        self.term_budget = budget;
        self
    }

    pub fn model(&self) -> &BarrierModel {
        &self.model
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order_cap(&self) -> usize {
        self.order_cap
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Whether every generator carries the window factors.
    pub fn is_member(&self) -> bool {
        self.terms.keys().all(|k| self.generators[k.generator].is_member())
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Largest generator derivative order among the terms.
    pub fn max_order(&self) -> usize {
        self.terms.keys().map(|k| k.order as usize).max().unwrap_or(0)
    }

    /// Largest `deg p + m` among the terms.
    pub fn poly_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| self.generators[k.generator].degree() + k.power)
            .max()
            .unwrap_or(0)
    }

    /// Quadrature breakpoints: barrier edges and packet landmarks.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![self.model.a(), self.model.b()];
        for g in &self.generators {
            g.breakpoints(&mut out);
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn region_contains(&self, region: Region, x: f64) -> bool {
        let (a, b) = (self.model.a(), self.model.b());
        match region {
            Region::Everywhere => true,
            Region::Inside => x > a && x < b,
            Region::Outside => x < a || x > b,
        }
    }

    /// Exact `n`-th derivative at `x`.
    pub fn evaluate(&self, x: f64, n: usize) -> Result<Complex64> {
        if n > self.order_cap {
            return Err(Error::Capability(format!(
                "derivative order {n} exceeds the order cap {}",
                self.order_cap
            )));
        }
        if self.max_order() + n > HARD_ORDER_LIMIT {
            return Err(Error::Capability(format!(
                "derivative order {} exceeds the hard limit {HARD_ORDER_LIMIT}",
                self.max_order() + n
            )));
        }
        Ok(self.eval_unchecked(x, n))
    }

    /// `f(x)`.
    pub fn value(&self, x: f64) -> Complex64 {
        self.eval_unchecked(x, 0)
    }

    fn eval_unchecked(&self, x: f64, n: usize) -> Complex64 {
        if self.terms.is_empty() {
            return ZERO;
        }
        let top = self.max_order() + n;
        let mut current = usize::MAX;
        let mut ladder = [ZERO; HARD_ORDER_LIMIT + 1];
        let mut acc = ZERO;
        // Terms are ordered by generator, so each ladder is built once.
        for (key, coeff) in &self.terms {
            if !self.region_contains(key.region, x) {
                continue;
            }
            if key.generator != current {
                current = key.generator;
                ladder = self.generators[current].ladder(x, top);
            }
            // (x^m g^{(k)})^{(n)} = Σ_j C(n,j) m!/(m-j)! x^{m-j} g^{(k+n-j)}
            let m = key.power as usize;
            let k = key.order as usize;
            let mut binom = 1.0;
            let mut falling = 1.0;
            let mut term = ZERO;
            for j in 0..=n.min(m) {
                let xp = x.powi((m - j) as i32);
                term += (binom * falling * xp) * ladder[k + n - j];
                binom = binom * (n - j) as f64 / (j + 1) as f64;
                falling *= (m - j) as f64;
            }
            acc += coeff * term;
        }
        acc
    }

    fn insert(terms: &mut BTreeMap<TermKey, Complex64>, key: TermKey, c: Complex64) {
        if c == ZERO {
            return;
        }
        let slot = terms.entry(key).or_insert(ZERO);
        *slot += c;
        if *slot == ZERO {
            terms.remove(&key);
        }
    }

    fn with_terms(&self, terms: BTreeMap<TermKey, Complex64>, label: String, operation: &str) -> Result<Self> {
        if terms.len() > self.term_budget {
            return Err(Error::Capability(format!(
                "{operation} produces {} terms, beyond the budget of {}",
                terms.len(),
                self.term_budget
            )));
        }
        let out = Self {
            model: self.model,
            generators: self.generators.clone(),
            terms,
            order_cap: self.order_cap,
            term_budget: self.term_budget,
            label,
        };
        if out.max_order() > self.order_cap {
            return Err(Error::Capability(format!(
                "{operation} needs derivative order {}, beyond the order cap {}",
                out.max_order(),
                self.order_cap
            )));
        }
        Ok(out)
    }

    fn derivative_terms(&self, operation: &str) -> Result<BTreeMap<TermKey, Complex64>> {
        let mut out = BTreeMap::new();
        for (key, &c) in &self.terms {
            if key.region != Region::Everywhere && !self.generators[key.generator].is_member() {
                return Err(Error::Capability(format!(
                    "{operation} of a piecewise term requires a generator vanishing at the barrier edges"
                )));
            }
            if key.power > 0 {
                let lowered = TermKey {
                    power: key.power - 1,
                    ..*key
                };
                Self::insert(&mut out, lowered, c * key.power as f64);
            }
            let raised = TermKey {
                order: key.order + 1,
                ..*key
            };
            Self::insert(&mut out, raised, c);
        }
        Ok(out)
    }

    /// `f'` as a test function.
    pub fn derivative(&self) -> Result<Self> {
        let terms = self.derivative_terms("d/dx")?;
        self.with_terms(terms, format!("d({})", self.label), "d/dx")
    }

    /// `Q f`, `P f` or `H f`.
    pub fn apply(&self, obs: Observable) -> Result<Self> {
        let label = format!("{}({})", obs.symbol(), self.label);
        match obs {
            Observable::Position => {
                let mut terms = BTreeMap::new();
                for (key, &c) in &self.terms {
                    let raised = TermKey {
                        power: key.power + 1,
                        ..*key
                    };
                    Self::insert(&mut terms, raised, c);
                }
                self.with_terms(terms, label, "Q")
            }
            Observable::Momentum => {
                let scale = Complex64::new(0.0, -self.model.hbar());
                let terms = self
                    .derivative_terms("P")?
                    .into_iter()
                    .map(|(k, c)| (k, c * scale))
                    .collect();
                self.with_terms(terms, label, "P")
            }
            Observable::Hamiltonian => {
                let once = self.with_terms(self.derivative_terms("H")?, String::new(), "H")?;
                let twice = once.derivative_terms("H")?;
                let kinetic = -self.model.kinetic_scale();
                let mut terms = BTreeMap::new();
                for (k, c) in twice {
                    Self::insert(&mut terms, k, c * kinetic);
                }
                let v0 = self.model.v0();
                if v0 != 0.0 {
                    for (key, &c) in &self.terms {
                        if key.region == Region::Outside {
                            continue;
                        }
                        let inside = TermKey {
                            region: Region::Inside,
                            ..*key
                        };
                        Self::insert(&mut terms, inside, c * v0);
                    }
                }
                self.with_terms(terms, label, "H")
            }
        }
    }

    /// Applies the word right to left: `[P, Q]` yields `P(Q f)`.
    pub fn apply_word(&self, word: &[Observable]) -> Result<Self> {
        let mut out = self.clone();
        for obs in word.iter().rev() {
            out = out.apply(*obs)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let terms = if c == ZERO {
            BTreeMap::new()
        } else {
            self.terms.iter().map(|(k, v)| (*k, v * c)).collect()
        };
        Self {
            terms,
            ..self.clone()
        }
    }

    /// `α f + β g`; both must share the barrier model.
    pub fn linear_combination(&self, alpha: Complex64, other: &Self, beta: Complex64) -> Result<Self> {
        if self.model != other.model {
            return Err(domain("cannot combine test functions over different barrier models"));
        }
        let mut generators = self.generators.clone();
        let mut remap = Vec::with_capacity(other.generators.len());
        for g in &other.generators {
            let idx = match generators.iter().position(|h| h == g) {
                Some(i) => i,
                None => {
                    generators.push(*g);
                    generators.len() - 1
                }
            };
            remap.push(idx);
        }
        let mut terms = BTreeMap::new();
        for (k, &c) in &self.terms {
            Self::insert(&mut terms, *k, alpha * c);
        }
        for (k, &c) in &other.terms {
            let key = TermKey {
                generator: remap[k.generator],
                ..*k
            };
            Self::insert(&mut terms, key, beta * c);
        }
        let out = Self {
            model: self.model,
            generators,
            terms,
            order_cap: self.order_cap.max(other.order_cap),
            term_budget: self.term_budget.max(other.term_budget),
            label: format!("{alpha}·{} + {beta}·{}", self.label, other.label),
        };
        if out.terms.len() > out.term_budget {
            return Err(Error::Capability("linear combination exceeds the term budget".into()));
        }
        Ok(out)
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

pub fn apply_observable(obs: Observable, f: &TestFunction) -> Result<TestFunction> {
    f.apply(obs)
}

fn joint_breakpoints(f: &TestFunction, g: &TestFunction) -> Vec<f64> {
    let mut bp = f.breakpoints();
    bp.extend(g.breakpoints());
    bp
}

/// `(f, g) = ∫ conj(f) g dx` over `[-R, R]`.
pub fn inner_product(f: &TestFunction, g: &TestFunction, spec: &QuadratureSpec) -> Result<Complex64> {
    if f.is_zero() || g.is_zero() {
        return Ok(ZERO);
    }
    let est = integrate_line_with(
        |x| Ok([f.value(x).conj() * g.value(x)]),
        spec,
        &joint_breakpoints(f, g),
    )?;
    Ok(est.value[0])
}

/// `‖f‖ = sqrt((f, f))`.
pub fn norm(f: &TestFunction, spec: &QuadratureSpec) -> Result<f64> {
    Ok(inner_product(f, f, spec)?.re.max(0.0).sqrt())
}

/// `f / ‖f‖`.
pub fn normalized(f: &TestFunction, spec: &QuadratureSpec) -> Result<TestFunction> {
    let n = norm(f, spec)?;
    if n == 0.0 {
        return Err(domain("cannot normalize the zero function"));
    }
    Ok(f.scale(Complex64::new(1.0 / n, 0.0)))
}

/// `‖P^n Q^m H^l f‖`.
pub fn seminorm(f: &TestFunction, n: usize, m: usize, l: usize, spec: &QuadratureSpec) -> Result<f64> {
    if n + m + 2 * l > f.order_cap() {
        return Err(Error::Capability(format!(
            "seminorm order n + m + 2l = {} exceeds the order cap {}",
            n + m + 2 * l,
            f.order_cap()
        )));
    }
    let mut g = f.clone();
    for _ in 0..l {
        g = g.apply(Observable::Hamiltonian)?;
    }
    for _ in 0..m {
        g = g.apply(Observable::Position)?;
    }
    for _ in 0..n {
        g = g.apply(Observable::Momentum)?;
    }
    norm(&g, spec)
}

/// `∫_{r_lo < |x| < r_hi} |f|² dx`, used to detect mass escaping to infinity.
pub fn tail_mass(f: &TestFunction, r_lo: f64, r_hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !(r_hi > r_lo) || r_lo < 0.0 {
        return Err(domain(format!("tail shell [{r_lo}, {r_hi}] is invalid")));
    }
    let bp = f.breakpoints();
    let width = (r_hi - r_lo) / 20.0;
    let mut total = 0.0;
    for (lo, hi) in [(-r_hi, -r_lo), (r_lo, r_hi)] {
        let partition = build_partition(lo, hi, &bp, width);
        let est = integrate_partition(|x| Ok([Complex64::new(f.value(x).norm_sqr(), 0.0)]), &partition, spec)?;
        total += est.value[0].re;
    }
    Ok(total)
}
