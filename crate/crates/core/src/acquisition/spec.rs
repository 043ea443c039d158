use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest dimension for which knowledge gradient is allowed.
pub const KG_MAX_DIM: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AfKind {
    Ei,
    Pi,
    Ucb,
    Mes,
    Ts,
    Kg,
    Rs,
    Dm,
}

impl AfKind {
    pub const ALL: [AfKind; 8] = [AfKind::Ei, AfKind::Pi, AfKind::Ucb, AfKind::Mes, AfKind::Ts, AfKind::Kg, AfKind::Rs, AfKind::Dm];

    pub fn name(self) -> &'static str {
        match self {
            AfKind::Ei => "ei",
            AfKind::Pi => "pi",
            AfKind::Ucb => "ucb",
            AfKind::Mes => "mes",
            AfKind::Ts => "ts",
            AfKind::Kg => "kg",
            AfKind::Rs => "rs",
            AfKind::Dm => "dm",
        }
    }

    /// Whether selection needs a fitted surrogate.
    pub fn uses_model(self) -> bool {
        !matches!(self, AfKind::Rs | AfKind::Dm)
    }

    fn batchable(self) -> bool {
        matches!(self, AfKind::Ei | AfKind::Ucb | AfKind::Ts | AfKind::Kg | AfKind::Rs)
    }
}

impl FromStr for AfKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AfKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown acquisition function {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    TrustRegion,
    Raasp,
}

impl Variant {
    pub fn short(self) -> &'static str {
        match self {
            Variant::TrustRegion => "tr",
            Variant::Raasp => "raasp",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: AfKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default = "one")]
    q: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    variant: Vec<Variant>,
}

fn one() -> usize {
    1
}

/// Which acquisition function to use and how its search is modulated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct AcquisitionSpec {
    kind: AfKind,
    beta: Option<f64>,
    q: usize,
    variants: Vec<Variant>,
}

impl TryFrom<RawSpec> for AcquisitionSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let mut spec = match (raw.kind, raw.beta) {
            (AfKind::Ucb, Some(b)) => AcquisitionSpec::ucb(b)?,
            (AfKind::Ucb, None) => return Err(Error::InvalidConfig("ucb needs beta".into())),
            (k, Some(_)) => return Err(Error::InvalidConfig(format!("beta is only valid for ucb, not {}", k.name()))),
            (k, None) => AcquisitionSpec::new(k)?,
        };
        spec = spec.with_batch(raw.q)?;
        for v in raw.variant {
            spec = spec.with_variant(v);
        }
        Ok(spec)
    }
}

impl From<AcquisitionSpec> for RawSpec {
    fn from(s: AcquisitionSpec) -> Self {
        RawSpec { kind: s.kind, beta: s.beta, q: s.q, variant: s.variants }
    }
}

impl AcquisitionSpec {
    /// Any kind except UCB, which needs [`AcquisitionSpec::ucb`].
    pub fn new(kind: AfKind) -> Result<Self> {
        if kind == AfKind::Ucb {
            return Err(Error::InvalidConfig("ucb needs beta; use AcquisitionSpec::ucb".into()));
        }
        Ok(Self { kind, beta: None, q: 1, variants: Vec::new() })
    }

    pub fn ucb(beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("ucb beta must be finite and nonnegative, got {beta}")));
        }
        Ok(Self { kind: AfKind::Ucb, beta: Some(beta), q: 1, variants: Vec::new() })
    }

    pub fn with_batch(mut self, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidConfig("batch size must be at least 1".into()));
        }
        if q > 1 && !self.kind.batchable() {
            return Err(Error::InvalidConfig(format!("{} does not support batching", self.kind.name())));
        }
        self.q = q;
        Ok(self)
    }

    pub fn with_variant(mut self, v: Variant) -> Self {
        if !self.variants.contains(&v) {
            self.variants.push(v);
            self.variants.sort();
        }
        self
    }

    pub fn kind(&self) -> AfKind {
        self.kind
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn variants(&self) -> &[Variant] {
        &self.variants
    }

    pub fn has(&self, v: Variant) -> bool {
        self.variants.contains(&v)
    }

    /// Check the spec against a problem dimension.
    pub fn validate_for_dim(&self, d: usize) -> Result<()> {
        if self.kind == AfKind::Kg && d > KG_MAX_DIM {
            return Err(Error::InvalidConfig(format!("knowledge gradient is limited to d <= {KG_MAX_DIM}, got d = {d}")));
        }
        Ok(())
    }

    /// Short name of the acquisition function, e.g. `ei` or `ucb0.1`.
    pub fn af_label(&self) -> String {
        match self.beta {
            Some(b) => format!("ucb{b}"),
            None => self.kind.name().to_string(),
        }
    }

    /// Search modifiers joined by `-`, or `plain`.
    pub fn variant_label(&self) -> String {
        let mut parts: Vec<String> = self.variants.iter().map(|v| v.short().to_string()).collect();
        if self.q > 1 {
            parts.push(format!("q{}", self.q));
        }
        if parts.is_empty() {
            "plain".into()
        } else {
            parts.join("-")
        }
    }
}

impl fmt::Display for AcquisitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.variant_label();
        if v == "plain" {
            write!(f, "{}", self.af_label())
        } else {
            write!(f, "{}+{}", self.af_label(), v)
        }
    }
}

/// Axis-aligned box inside the unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Bounds {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return invalid(format!("bounds need matching nonempty corners, got {} and {}", lo.len(), hi.len()));
        }
        for (j, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if !(0.0..=1.0).contains(&l) || !(0.0..=1.0).contains(&h) || !(l < h) {
                return invalid(format!("bounds coordinate {j}: [{l}, {h}] is empty or outside [0, 1]"));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn unit(d: usize) -> Self {
        Self { lo: vec![0.0; d], hi: vec![1.0; d] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lo).zip(&self.hi).all(|((v, l), h)| (*l..=*h).contains(v))
    }

    pub fn clip(&self, x: &mut [f64]) {
        for ((v, &l), &h) in x.iter_mut().zip(&self.lo).zip(&self.hi) {
            *v = v.clamp(l, h);
        }
    }
}
