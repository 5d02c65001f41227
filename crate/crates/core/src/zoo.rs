//! Catalogue of worked models and scaled families, with closed-form
//! characteristic operators for use as test oracles.
//!
//! Two flavours of closed form are provided. [`closed_form_char`] evaluates
//! the formulas as they are usually quoted for these models;
//! [`corrected_closed_form_char`] evaluates forms re-derived from the model
//! definitions. They differ for `thermal_qubit` (sign of `ω` in the
//! denominators) and `lambda_system` (coupling rate and channel ordering).

use std::collections::BTreeMap;

use crate::adiabatic::ScaledSlhFamily;
use crate::error::{Result, SlhError};
use crate::matrix::{c, re, CMatrix, C64, I, ONE};
use crate::model::{realize_passive, LinearPassiveSpec, SlhModel};
use crate::operators::{embed, hermitian_function, ket_bra, pauli, Pauli, TruncatedMode};
use crate::reduction::BlockPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZooKind {
    Model,
    Family,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: C64,
    pub doc: &'static str,
}

const fn p(name: &'static str, default: f64, doc: &'static str) -> ParamSpec {
    ParamSpec { name, default: C64::new(default, 0.0), doc }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZooEntry {
    pub name: &'static str,
    pub kind: ZooKind,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    pub has_closed_form: bool,
}

pub const ENTRIES: [ZooEntry; 8] = [
    ZooEntry {
        name: "lossless",
        kind: ZooKind::Model,
        summary: "no coupling, L = 0; T(s) = S",
        params: &[
            p("n_inputs", 1.0, "number of input fields"),
            p("dim", 2.0, "plant dimension"),
            p("phi", 0.0, "global scattering phase"),
            p("omega", 1.0, "H = omega * diag(0, 1, ..., dim-1)"),
        ],
        has_closed_form: false,
    },
    ZooEntry {
        name: "linear_passive",
        kind: ZooKind::Model,
        summary: "single cavity mode, L = sqrt(gamma) a, H = delta a*a",
        params: &[
            p("gamma", 1.0, "damping rate (> 0)"),
            p("delta", 0.0, "detuning"),
            p("n_max", 8.0, "Fock cutoff (>= 1)"),
        ],
        has_closed_form: false,
    },
    ZooEntry {
        name: "thermal_qubit",
        kind: ZooKind::Model,
        summary: "qubit in a thermal bath with polarisation-dependent phase scattering",
        params: &[
            p("gamma", 1.0, "damping rate (> 0)"),
            p("n", 0.0, "thermal occupancy in [0, 1]"),
            p("omega", 0.0, "H = omega sigma_z"),
            p("phi_plus", 0.0, "scattering phase on |up>"),
            p("phi_minus", 0.0, "scattering phase on |down>"),
        ],
        has_closed_form: true,
    },
    ZooEntry {
        name: "optomech",
        kind: ZooKind::Model,
        summary: "cavity (outer factor) with a mirror (inner factor) under radiation pressure",
        params: &[
            p("gamma", 1.0, "cavity damping (> 0)"),
            p("delta", 0.0, "cavity detuning"),
            p("omega0", 0.0, "mirror frequency"),
            p("g", 0.5, "radiation-pressure coupling"),
            p("n_cav", 4.0, "cavity Fock cutoff (>= 1)"),
            p("n_mirror", 6.0, "mirror Fock cutoff (>= 1)"),
        ],
        has_closed_form: false,
    },
    ZooEntry {
        name: "detuned_two_level",
        kind: ZooKind::Family,
        summary: "two-level atom, basis (e, g), strongly detuned and driven; slow = {g}",
        params: &[
            p("gamma", 1.0, "dephasing-type coupling sqrt(gamma) sigma_z (> 0)"),
            p("kappa", 1.0, "decay coupling sqrt(kappa) sigma_- (> 0)"),
            p("omega0", 0.0, "frequency offset"),
            p("beta", 1.0, "drive amplitude (complex)"),
            p("delta", 1.0, "detuning (> 0)"),
        ],
        has_closed_form: true,
    },
    ZooEntry {
        name: "three_input_qubit",
        kind: ZooKind::Model,
        summary: "driven qubit with three input fields, basis (|0>, |1>)",
        params: &[
            p("kappa1", 1.0, "rate of channel 1 (> 0)"),
            p("kappa2", 1.0, "rate of channel 2 (> 0)"),
            p("kappa3", 1.0, "rate of channel 3 (> 0)"),
            p("delta", 0.0, "detuning"),
            p("alpha", 1.0, "drive amplitude on channel 1 (complex)"),
        ],
        has_closed_form: true,
    },
    ZooEntry {
        name: "kerr_qubit",
        kind: ZooKind::Family,
        summary: "Kerr cavity with two inputs reducing to a qubit; slow = {|0>, |1>}",
        params: &[
            p("kappa1", 1.0, "rate of channel 1 (> 0)"),
            p("kappa2", 1.0, "rate of channel 2 (> 0)"),
            p("delta", 0.0, "detuning"),
            p("alpha", 1.0, "drive amplitude on channel 1 (complex)"),
            p("chi0", 1.0, "Kerr strength (> 0)"),
            p("n_max", 8.0, "Fock cutoff (>= 2)"),
        ],
        has_closed_form: true,
    },
    ZooEntry {
        name: "lambda_system",
        kind: ZooKind::Family,
        summary: "three-level atom (g1, g2, e) in a lossy cavity; slow = {|g1,0>, |g2,0>}",
        params: &[
            p("gamma", 1.0, "cavity damping (> 0)"),
            p("alpha", 1.0, "classical drive on e <-> g2 (complex)"),
            p("g", 1.0, "atom-cavity coupling (non-zero)"),
            p("n_max", 8.0, "Fock cutoff (>= 2)"),
        ],
        has_closed_form: true,
    },
];

pub fn entry(name: &str) -> Result<&'static ZooEntry> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| SlhError::BadParam(format!("unknown zoo entry `{name}`")))
}

/// Named parameter values. Real parameters are stored with zero imaginary
/// part.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, C64>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<C64>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn insert(&mut self, key: &str, value: C64) {
        self.0.insert(key.to_string(), value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &C64)> {
        self.0.iter()
    }

    /// Parses `key=value` where value is `x` or `re,im`.
    pub fn parse_assignment(text: &str) -> Result<(String, C64)> {
        let (k, v) = text
            .split_once('=')
            .ok_or_else(|| SlhError::BadParam(format!("expected key=value, got `{text}`")))?;
        let num = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| SlhError::BadParam(format!("bad number `{s}` in `{text}`")))
        };
        let value = match v.split_once(',') {
            Some((a, b)) => c(num(a)?, num(b)?),
            None => re(num(v)?),
        };
        Ok((k.trim().to_string(), value))
    }
}

/// Resolved parameters of one entry, with defaults filled in.
struct Resolved<'a> {
    entry: &'a ZooEntry,
    values: BTreeMap<&'static str, C64>,
}

impl Resolved<'_> {
    fn complex(&self, key: &str) -> C64 {
        self.values[key]
    }

    fn real(&self, key: &str) -> Result<f64> {
        let v = self.values[key];
        if v.im != 0.0 {
            return Err(SlhError::BadParam(format!("{}: `{key}` must be real", self.entry.name)));
        }
        Ok(v.re)
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.real(key)?;
        if !(v > 0.0) {
            return Err(SlhError::BadParam(format!("{}: `{key}` must be positive, got {v}", self.entry.name)));
        }
        Ok(v)
    }

    fn count(&self, key: &str, min: usize) -> Result<usize> {
        let v = self.real(key)?;
        if v.fract() != 0.0 || v < min as f64 {
            return Err(SlhError::BadParam(format!(
                "{}: `{key}` must be an integer >= {min}, got {v}",
                self.entry.name
            )));
        }
        Ok(v as usize)
    }
}

fn resolve<'a>(entry: &'a ZooEntry, params: &Params) -> Result<Resolved<'a>> {
    for key in params.0.keys() {
        if !entry.params.iter().any(|p| p.name == key) {
            return Err(SlhError::BadParam(format!("{}: unknown parameter `{key}`", entry.name)));
        }
    }
    let values = entry
        .params
        .iter()
        .map(|spec| (spec.name, params.0.get(spec.name).copied().unwrap_or(spec.default)))
        .collect();
    Ok(Resolved { entry, values })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZooModel {
    Model(SlhModel),
    Family(ScaledSlhFamily),
}

pub fn build(name: &str, params: &Params) -> Result<ZooModel> {
    let e = entry(name)?;
    let r = resolve(e, params)?;
    match name {
        "lossless" => lossless(&r).map(ZooModel::Model),
        "linear_passive" => linear_passive(&r).map(ZooModel::Model),
        "thermal_qubit" => thermal_qubit(&r).map(ZooModel::Model),
        "optomech" => optomech(&r).map(ZooModel::Model),
        "detuned_two_level" => detuned_two_level(&r).map(ZooModel::Family),
        "three_input_qubit" => three_input_qubit(&r).map(ZooModel::Model),
        "kerr_qubit" => kerr_qubit(&r).map(ZooModel::Family),
        "lambda_system" => lambda_system(&r).map(ZooModel::Family),
        _ => unreachable!("entry table and builders agree"),
    }
}

/// Convenience wrapper for entries that build an [`SlhModel`].
pub fn build_model(name: &str, params: &Params) -> Result<SlhModel> {
    match build(name, params)? {
        ZooModel::Model(m) => Ok(m),
        ZooModel::Family(_) => Err(SlhError::BadParam(format!("`{name}` is a scaled family"))),
    }
}

/// Convenience wrapper for entries that build a [`ScaledSlhFamily`].
pub fn build_family(name: &str, params: &Params) -> Result<ScaledSlhFamily> {
    match build(name, params)? {
        ZooModel::Family(f) => Ok(f),
        ZooModel::Model(_) => Err(SlhError::BadParam(format!("`{name}` is a single model"))),
    }
}

fn lossless(r: &Resolved) -> Result<SlhModel> {
    let n = r.count("n_inputs", 1)?;
    let dim = r.count("dim", 1)?;
    let phase = C64::from_polar(1.0, r.real("phi")?);
    let omega = r.real("omega")?;
    let h = CMatrix::diag_real(&(0..dim).map(|i| omega * i as f64).collect::<Vec<_>>());
    SlhModel::new(CMatrix::identity(n * dim).scale(phase), CMatrix::zeros(n * dim, dim), h)
}

fn linear_passive(r: &Resolved) -> Result<SlhModel> {
    realize_passive(&LinearPassiveSpec {
        d: CMatrix::identity(1),
        c: CMatrix::from_real_rows(&[&[r.positive("gamma")?.sqrt()]]),
        omega: CMatrix::from_real_rows(&[&[r.real("delta")?]]),
        cutoffs: vec![TruncatedMode::new(r.count("n_max", 1)?)?],
    })
}

fn thermal_qubit(r: &Resolved) -> Result<SlhModel> {
    let gamma = r.positive("gamma")?;
    let n = r.real("n")?;
    if !(0.0..=1.0).contains(&n) {
        return Err(SlhError::BadParam(format!("thermal_qubit: `n` must lie in [0, 1], got {n}")));
    }
    let l = &pauli(Pauli::Minus).scale_real((gamma * (n + 1.0)).sqrt())
        + &pauli(Pauli::Plus).scale_real((gamma * n).sqrt());
    let s = CMatrix::diag(&[
        C64::from_polar(1.0, r.real("phi_plus")?),
        C64::from_polar(1.0, r.real("phi_minus")?),
    ]);
    SlhModel::new(s, l, pauli(Pauli::Z).scale_real(r.real("omega")?))
}

fn optomech(r: &Resolved) -> Result<SlhModel> {
    let cav = TruncatedMode::new(r.count("n_cav", 1)?)?;
    let mir = TruncatedMode::new(r.count("n_mirror", 1)?)?;
    let dims = [cav.dim(), mir.dim()];
    let a = embed(&cav.annihilator(), 0, &dims);
    let b = embed(&mir.annihilator(), 1, &dims);
    let na = &a.dagger() * &a;
    let x = &b + &b.dagger();
    let h = &(&na.scale_real(r.real("delta")?) + &(&b.dagger() * &b).scale_real(r.real("omega0")?))
        + &(&x * &na).scale_real(r.real("g")?);
    let m = cav.dim() * mir.dim();
    SlhModel::new(CMatrix::identity(m), a.scale_real(r.positive("gamma")?.sqrt()), h)
}

fn detuned_two_level(r: &Resolved) -> Result<ScaledSlhFamily> {
    let delta = r.positive("delta")?;
    let beta = r.complex("beta");
    let sp = pauli(Pauli::Plus);
    let sm = pauli(Pauli::Minus);
    let l0 = &pauli(Pauli::Z).scale_real(r.positive("gamma")?.sqrt()) + &sm.scale_real(r.positive("kappa")?.sqrt());
    ScaledSlhFamily::new(
        CMatrix::identity(2),
        l0,
        CMatrix::zeros(2, 2),
        CMatrix::identity(2).scale_real(r.real("omega0")?),
        &sp.scale(beta) + &sm.scale(beta.conj()),
        (&sp * &sm).scale_real(delta),
        BlockPartition::new(2, vec![1])?,
    )
}

/// Lowering operator `|0⟩⟨1|` in the basis `(|0⟩, |1⟩)`.
pub fn qubit_lowering() -> CMatrix {
    ket_bra(0, 1, 2)
}

fn three_input_qubit(r: &Resolved) -> Result<SlhModel> {
    let kap = [r.positive("kappa1")?, r.positive("kappa2")?, r.positive("kappa3")?];
    let sigma = qubit_lowering();
    let parts: Vec<CMatrix> = kap.iter().map(|k| sigma.scale_real(k.sqrt())).collect();
    let l = CMatrix::vstack(&parts.iter().collect::<Vec<_>>());
    let alpha = r.complex("alpha");
    let sd = sigma.dagger();
    let drive = &sd.scale(alpha) - &sigma.scale(alpha.conj());
    let h = &(&sd * &sigma).scale_real(r.real("delta")?) + &drive.scale(-I * kap[0].sqrt());
    SlhModel::new(CMatrix::identity(6), l, h)
}

/// Kerr family at the `t = 0` snapshot of the rotating frame.
fn kerr_qubit(r: &Resolved) -> Result<ScaledSlhFamily> {
    let mode = TruncatedMode::new(r.count("n_max", 2)?)?;
    let kap = [r.positive("kappa1")?, r.positive("kappa2")?];
    let a = mode.annihilator();
    let ad = mode.creator();
    let d = mode.dim();
    let l0 = CMatrix::vstack(&[&a.scale_real(kap[0].sqrt()), &a.scale_real(kap[1].sqrt())]);
    let alpha = r.complex("alpha");
    let drive = &ad.scale(alpha) - &a.scale(alpha.conj());
    let h0 = &mode.number().scale_real(r.real("delta")?) + &drive.scale(-I * kap[0].sqrt());
    let h2 = (&(&ad * &ad) * &(&a * &a)).scale_real(r.positive("chi0")?);
    ScaledSlhFamily::new(
        CMatrix::identity(2 * d),
        l0,
        CMatrix::zeros(2 * d, d),
        h0,
        CMatrix::zeros(d, d),
        h2,
        BlockPartition::new(d, vec![0, 1])?,
    )
}

/// Level order `(g1, g2, e)`, level factor outermost.
fn lambda_system(r: &Resolved) -> Result<ScaledSlhFamily> {
    let mode = TruncatedMode::new(r.count("n_max", 2)?)?;
    let gamma = r.positive("gamma")?;
    let g = r.real("g")?;
    if g == 0.0 {
        return Err(SlhError::BadParam("lambda_system: `g` must be non-zero".into()));
    }
    let alpha = r.complex("alpha");
    let d = mode.dim();
    let a = mode.annihilator();
    let id_mode = CMatrix::identity(d);
    let (g1, g2, e) = (0, 1, 2);
    let l1 = CMatrix::identity(3).kron(&a).scale_real(gamma.sqrt());
    let x2 = ket_bra(e, g1, 3).kron(&a);
    let h2 = (&x2 - &x2.dagger()).scale(I * g);
    let x1 = ket_bra(e, g2, 3).kron(&id_mode).scale(alpha);
    let h1 = (&x1 - &x1.dagger()).scale(I);
    let m = 3 * d;
    ScaledSlhFamily::new(
        CMatrix::identity(m),
        CMatrix::zeros(m, m),
        l1,
        CMatrix::zeros(m, m),
        h1,
        h2,
        BlockPartition::new(m, vec![g1 * d, g2 * d])?,
    )
}

/// Which space a closed form lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormSpace {
    /// The full `nm × nm` characteristic operator.
    Full,
    /// The limit operator restricted to the slow subspace lifted to all
    /// inputs, slow indices in partition order.
    Slow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    pub matrix: CMatrix,
    pub space: FormSpace,
    /// Plant dimension of each operator block.
    pub block_dim: usize,
}

fn ratio(num: C64, den: C64) -> C64 {
    num / den
}

/// Closed forms as usually quoted for these models. For families they
/// describe the `k → ∞` limit.
pub fn closed_form_char(name: &str, params: &Params, s: C64) -> Result<ClosedForm> {
    let e = entry(name)?;
    let r = resolve(e, params)?;
    match name {
        "thermal_qubit" => {
            let (g, n, w) = (r.positive("gamma")?, r.real("n")?, r.real("omega")?);
            let up = ratio(s - 0.5 * g * n - I * w, s + 0.5 * g * n + I * w) * C64::from_polar(1.0, r.real("phi_plus")?);
            let down = ratio(s - 0.5 * g * (n + 1.0) + I * w, s + 0.5 * g * (n + 1.0) - I * w)
                * C64::from_polar(1.0, r.real("phi_minus")?);
            Ok(ClosedForm { matrix: CMatrix::diag(&[up, down]), space: FormSpace::Full, block_dim: 2 })
        }
        "lambda_system" => {
            let (g, a, cpl) = (r.positive("gamma")?, r.complex("alpha"), r.real("g")?);
            let rate = g * g * a.norm_sqr() / (2.0 * cpl * cpl);
            let entry = ratio(s - rate, s + rate);
            Ok(ClosedForm { matrix: CMatrix::diag(&[ONE, entry]), space: FormSpace::Slow, block_dim: 2 })
        }
        "detuned_two_level" | "three_input_qubit" | "kerr_qubit" => corrected_closed_form_char(name, params, s),
        other => Err(SlhError::NoClosedForm(other.to_string())),
    }
}

/// Closed forms re-derived from the model definitions. Also covers
/// `linear_passive`, whose Fock-diagonal form has no quoted counterpart.
pub fn corrected_closed_form_char(name: &str, params: &Params, s: C64) -> Result<ClosedForm> {
    let e = entry(name)?;
    let r = resolve(e, params)?;
    match name {
        "thermal_qubit" => {
            let (g, n, w) = (r.positive("gamma")?, r.real("n")?, r.real("omega")?);
            let up = ratio(s - 0.5 * g * n - I * w, s + 0.5 * g * n - I * w) * C64::from_polar(1.0, r.real("phi_plus")?);
            let down = ratio(s - 0.5 * g * (n + 1.0) + I * w, s + 0.5 * g * (n + 1.0) + I * w)
                * C64::from_polar(1.0, r.real("phi_minus")?);
            Ok(ClosedForm { matrix: CMatrix::diag(&[up, down]), space: FormSpace::Full, block_dim: 2 })
        }
        "linear_passive" => {
            // T|n⟩ = (s - (γ/2 - iΔ)(n+1)) / (s + (γ/2 + iΔ)(n+1)) |n⟩ below the
            // cutoff; the top state has no one-photon-up partner and scatters trivially
            let (g, d, n_max) = (r.positive("gamma")?, r.real("delta")?, r.count("n_max", 1)?);
            let diag: Vec<C64> = (0..=n_max)
                .map(|n| {
                    if n == n_max {
                        return ONE;
                    }
                    let q = (n + 1) as f64;
                    ratio(s - (0.5 * g - I * d) * q, s + (0.5 * g + I * d) * q)
                })
                .collect();
            Ok(ClosedForm { matrix: CMatrix::diag(&diag), space: FormSpace::Full, block_dim: n_max + 1 })
        }
        "detuned_two_level" => {
            let (g, w0, beta, delta) = (r.positive("gamma")?, r.real("omega0")?, r.complex("beta"), r.positive("delta")?);
            let w = w0 - beta.norm_sqr() / delta;
            let tg = ratio(s - 0.5 * g + I * w, s + 0.5 * g + I * w);
            Ok(ClosedForm { matrix: CMatrix::diag(&[ONE, tg]), space: FormSpace::Full, block_dim: 2 })
        }
        "three_input_qubit" => {
            let kap = [r.positive("kappa1")?, r.positive("kappa2")?, r.positive("kappa3")?];
            let kappa: f64 = kap.iter().sum();
            let alpha = r.complex("alpha");
            let den = s * s + (0.5 * kappa + I * r.real("delta")?) * s + kap[0] * alpha.norm_sqr();
            let ssd = &qubit_lowering() * &qubit_lowering().dagger();
            Ok(ClosedForm { matrix: channel_form(&kap, &ssd, s / den), space: FormSpace::Full, block_dim: 2 })
        }
        "kerr_qubit" => {
            let kap = [r.positive("kappa1")?, r.positive("kappa2")?];
            let kappa = kap[0] + kap[1];
            let alpha = r.complex("alpha");
            let id = I * r.real("delta")?;
            let drive = kap[0] * alpha.norm_sqr();
            let rr = ratio(s * s - 0.5 * kappa * s + id * s + drive, s * s + 0.5 * kappa * s + id * s + drive);
            // on |0⟩ the channel direction v ∝ (√κ₁, √κ₂) picks up rr, the
            // orthogonal direction and the |1⟩ sector pass unchanged
            let ssd = &qubit_lowering() * &qubit_lowering().dagger();
            Ok(ClosedForm {
                matrix: channel_form(&kap, &ssd, (1.0 - rr) / kappa),
                space: FormSpace::Slow,
                block_dim: 2,
            })
        }
        "lambda_system" => {
            let (g, a, cpl) = (r.positive("gamma")?, r.complex("alpha"), r.real("g")?);
            let half_rate = g * a.norm_sqr() / (2.0 * cpl * cpl);
            let entry = ratio(s - half_rate, s + half_rate);
            Ok(ClosedForm { matrix: CMatrix::diag(&[entry, -ONE]), space: FormSpace::Slow, block_dim: 2 })
        }
        other => Err(SlhError::NoClosedForm(other.to_string())),
    }
}

/// `T_jk = δ_jk I - √(κ_jκ_k)·f·P` for a fixed plant operator `P`.
fn channel_form(kap: &[f64], proj: &CMatrix, f: C64) -> CMatrix {
    let d = proj.rows();
    let n = kap.len();
    let mut out = CMatrix::identity(n * d);
    for j in 0..n {
        for k in 0..n {
            let blk = proj.scale(f * (kap[j] * kap[k]).sqrt());
            for a in 0..d {
                for b in 0..d {
                    out[(j * d + a, k * d + b)] -= blk[(a, b)];
                }
            }
        }
    }
    out
}

/// Three-input qubit with `α = 0` after cancelling the common factor `s`:
/// `T_jk = δ_jk - √(κ_jκ_k)/(s + ½κ + iΔ)·σσ*`.
pub fn three_input_cancelled(params: &Params, s: C64) -> Result<CMatrix> {
    let r = resolve(entry("three_input_qubit")?, params)?;
    let kap = [r.positive("kappa1")?, r.positive("kappa2")?, r.positive("kappa3")?];
    let kappa: f64 = kap.iter().sum();
    let ssd = &qubit_lowering() * &qubit_lowering().dagger();
    Ok(channel_form(&kap, &ssd, 1.0 / (s + 0.5 * kappa + I * r.real("delta")?)))
}

/// Cavity-vacuum block of the optomechanical characteristic operator for
/// `ω₀ = 0`, as an operator on the mirror:
/// `(s - ½γ + i(Δ + gX))(s + ½γ + i(Δ + gX))⁻¹`, evaluated by diagonalising
/// the truncated position `X = b + b*`.
pub fn optomech_vacuum_form(params: &Params, s: C64) -> Result<CMatrix> {
    let r = resolve(entry("optomech")?, params)?;
    let (g, d, cpl) = (r.positive("gamma")?, r.real("delta")?, r.real("g")?);
    let mir = TruncatedMode::new(r.count("n_mirror", 1)?)?;
    let x = &mir.annihilator() + &mir.creator();
    Ok(hermitian_function(&x, |xv| {
        let w = d + cpl * xv;
        (s - 0.5 * g + I * w) / (s + 0.5 * g + I * w)
    }))
}
