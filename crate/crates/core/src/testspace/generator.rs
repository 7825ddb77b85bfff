//! Generators of the test-function algebra and their exact derivative ladders.

use num_complex::Complex64;

/// Derivative orders beyond this are never materialized.
pub const HARD_ORDER_LIMIT: usize = 32;

pub(crate) type Ladder = [Complex64; HARD_ORDER_LIMIT + 1];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Gaussian packet shape `u^d e^{iqx} e^{-u²}` with `u = (x - c)/σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketShape {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub degree: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    /// Packet times `w_s(x - a) w_s(x - b)`, `w_s(t) = e^{-s²/t²}`.
    Windowed { shape: PacketShape, a: f64, b: f64, sharpness: f64 },
    /// Packet without window factors; not a member of the test space.
    Bare(PacketShape),
    /// `1/(x + i)`; square integrable but outside the domain of `Q`.
    Lorentzian,
}

impl Generator {
    pub fn is_member(&self) -> bool {
        matches!(self, Generator::Windowed { .. })
    }

    pub fn degree(&self) -> u32 {
        match self {
            Generator::Windowed { shape, .. } | Generator::Bare(shape) => shape.degree,
            Generator::Lorentzian => 0,
        }
    }

    /// Points where the integrand changes character.
    pub fn breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            Generator::Windowed { shape, a, b, .. } => {
                out.extend([*a, *b]);
                packet_breakpoints(shape, out);
            }
            Generator::Bare(shape) => packet_breakpoints(shape, out),
            Generator::Lorentzian => out.push(0.0),
        }
    }

    /// `g^{(j)}(x)` for `j = 0..=order`; entries beyond `order` are unspecified.
    pub(crate) fn ladder(&self, x: f64, order: usize) -> Ladder {
        debug_assert!(order <= HARD_ORDER_LIMIT);
        match self {
            Generator::Windowed { shape, a, b, sharpness } => {
                let packet = packet_ladder(shape, x, order);
                if packet.iter().take(order + 1).all(|z| *z == ZERO) {
                    return packet;
                }
                let wa = window_ladder(x - a, *sharpness, order);
                let wb = window_ladder(x - b, *sharpness, order);
                let w = leibniz_real(&wa, &wb, order);
                leibniz_mixed(&packet, &w, order)
            }
            Generator::Bare(shape) => packet_ladder(shape, x, order),
            Generator::Lorentzian => {
                let z = 1.0 / Complex64::new(x, 1.0);
                let mut out = [ZERO; HARD_ORDER_LIMIT + 1];
                out[0] = z;
                for n in 0..order {
                    out[n + 1] = -(n as f64 + 1.0) * z * out[n];
                }
                out
            }
        }
    }
}

fn packet_breakpoints(shape: &PacketShape, out: &mut Vec<f64>) {
    for k in [-6.0, -3.0, 0.0, 3.0, 6.0] {
        out.push(shape.center + k * shape.width);
    }
    out.push(0.0);
}

fn packet_ladder(shape: &PacketShape, x: f64, order: usize) -> Ladder {
    let mut out = [ZERO; HARD_ORDER_LIMIT + 1];
    let sigma = shape.width;
    let u = (x - shape.center) / sigma;
    let envelope = (-u * u).exp();
    if envelope == 0.0 {
        return out;
    }

    // G = e^{iqx - u²}: G' = h G with h = iq - 2u/σ, h' = -2/σ².
    let mut g = [ZERO; HARD_ORDER_LIMIT + 1];
    g[0] = Complex64::from_polar(envelope, shape.momentum * x);
    let h = Complex64::new(-2.0 * u / sigma, shape.momentum);
    let dh = -2.0 / (sigma * sigma);
    if order >= 1 {
        g[1] = h * g[0];
    }
    for n in 1..order {
        g[n + 1] = h * g[n] + (n as f64 * dh) * g[n - 1];
    }

    let d = shape.degree as usize;
    if d == 0 {
        return g;
    }
    // p = u^d: p^{(j)} = d!/(d-j)! u^{d-j} / σ^j.
    let mut p = [0.0; HARD_ORDER_LIMIT + 1];
    let mut falling = 1.0;
    for j in 0..=d.min(order) {
        p[j] = falling * u.powi((d - j) as i32) / sigma.powi(j as i32);
        falling *= (d - j) as f64;
    }
    for n in 0..=order {
        let mut acc = ZERO;
        let mut c = 1.0;
        for k in 0..=n.min(d) {
            acc += c * p[k] * g[n - k];
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        out[n] = acc;
    }
    out
}

/// Derivatives of `w_s(t) = e^{-s²/t²}`, all exactly zero at `t = 0` and
/// wherever `w_s` underflows.
fn window_ladder(t: f64, s: f64, order: usize) -> [f64; HARD_ORDER_LIMIT + 1] {
    let mut w = [0.0; HARD_ORDER_LIMIT + 1];
    if t == 0.0 {
        return w;
    }
    w[0] = (-(s * s) / (t * t)).exp();
    if w[0] == 0.0 {
        return w;
    }
    // w' = v w with v = 2s²/t³, v^{(k)} = 2s² (-1)^k (k+2)!/2 t^{-3-k}.
    let mut v = [0.0; HARD_ORDER_LIMIT + 1];
    v[0] = 2.0 * s * s / (t * t * t);
    for k in 1..order {
        v[k] = -v[k - 1] * (k + 2) as f64 / t;
    }
    for n in 0..order {
        let mut acc = 0.0;
        let mut c = 1.0;
        for k in 0..=n {
            acc += c * v[k] * w[n - k];
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        w[n + 1] = acc;
    }
    w
}

fn leibniz_real(f: &[f64; HARD_ORDER_LIMIT + 1], g: &[f64; HARD_ORDER_LIMIT + 1], order: usize) -> [f64; HARD_ORDER_LIMIT + 1] {
    let mut out = [0.0; HARD_ORDER_LIMIT + 1];
    for n in 0..=order {
        let mut acc = 0.0;
        let mut c = 1.0;
        for k in 0..=n {
            acc += c * f[k] * g[n - k];
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        out[n] = acc;
    }
    out
}

fn leibniz_mixed(f: &Ladder, g: &[f64; HARD_ORDER_LIMIT + 1], order: usize) -> Ladder {
    let mut out = [ZERO; HARD_ORDER_LIMIT + 1];
    for n in 0..=order {
        let mut acc = ZERO;
        let mut c = 1.0;
        for k in 0..=n {
            acc += (c * g[n - k]) * f[k];
            c = c * (n - k) as f64 / (k + 1) as f64;
        }
        out[n] = acc;
    }
    out
}
