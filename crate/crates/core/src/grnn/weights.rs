//! JSON weight files.
//!
//! Tap arrays are flattened row-major as `[L][F_in][F_out]`; `theta_action`
//! is `[G][G]`. Every number is written with 17 significant digits so that
//! loading reproduces the stored `f64` bit for bit.

use std::path::Path;

use nalgebra::DMatrix;
use serde::ser::{Error as _, SerializeSeq};
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Activation, GraphFilter, Grnn, GrnnDims, GrnnWeights};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[allow(non_snake_case)]
struct BlockFile {
    F: usize,
    H: usize,
    G: usize,
    T: usize,
    L: usize,
    #[serde(serialize_with = "fixed_digits")]
    B: Vec<f64>,
    #[serde(serialize_with = "fixed_digits")]
    C: Vec<f64>,
    #[serde(serialize_with = "fixed_digits")]
    D: Vec<f64>,
    #[serde(default = "default_rho1")]
    rho1: String,
    #[serde(default = "default_rho2")]
    rho2: String,
}

#[derive(Serialize, Deserialize)]
struct WeightFile {
    format_version: u32,
    #[serde(flatten)]
    actor: BlockFile,
    #[serde(serialize_with = "fixed_digits")]
    theta_action: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    critic: Option<BlockFile>,
}

fn default_rho1() -> String {
    "tanh".into()
}

fn default_rho2() -> String {
    "identity".into()
}

fn fixed_digits<S: Serializer>(values: &[f64], serializer: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for &v in values {
        if !v.is_finite() {
            return Err(S::Error::custom(format!("non-finite weight {v}")));
        }
        let raw = RawValue::from_string(format!("{v:.16e}")).map_err(S::Error::custom)?;
        seq.serialize_element(&raw)?;
    }
    seq.end()
}

fn flatten(filter: &GraphFilter) -> Vec<f64> {
    let mut out = Vec::with_capacity(filter.order() * filter.fin() * filter.fout());
    for tap in filter.taps() {
        for r in 0..tap.nrows() {
            for c in 0..tap.ncols() {
                out.push(tap[(r, c)]);
            }
        }
    }
    out
}

fn unflatten(field: &str, data: &[f64], order: usize, fin: usize, fout: usize) -> Result<GraphFilter> {
    let per = fin * fout;
    if order == 0 || data.len() != order * per {
        return Err(Error::weights(
            field,
            format!("expected {order}x{fin}x{fout} = {} values, got {}", order * per, data.len()),
        ));
    }
    let taps = data
        .chunks(per)
        .map(|chunk| DMatrix::from_row_slice(fin, fout, chunk))
        .collect();
    GraphFilter::new(taps)
}

fn activation(field: &str, name: &str) -> Result<Activation> {
    Activation::from_name(name).ok_or_else(|| Error::weights(field, format!("unknown activation {name:?}")))
}

impl BlockFile {
    fn from_grnn(net: &Grnn) -> Self {
        let d = net.dims;
        Self {
            F: d.f,
            H: d.h,
            G: d.g,
            T: d.t,
            L: d.l,
            B: flatten(&net.b),
            C: flatten(&net.c),
            D: flatten(&net.d),
            rho1: net.rho1.name().into(),
            rho2: net.rho2.name().into(),
        }
    }

    fn to_grnn(&self, prefix: &str) -> Result<Grnn> {
        let name = |f: &str| format!("{prefix}{f}");
        let dims = GrnnDims {
            f: self.F,
            h: self.H,
            g: self.G,
            t: self.T,
            l: self.L,
        };
        for (f, v) in [("F", dims.f), ("H", dims.h), ("G", dims.g), ("T", dims.t), ("L", dims.l)] {
            if v == 0 {
                return Err(Error::weights(name(f), "must be >= 1"));
            }
        }
        Grnn::new(
            dims,
            unflatten(&name("B"), &self.B, dims.l, dims.f, dims.h)?,
            unflatten(&name("C"), &self.C, dims.l, dims.h, dims.h)?,
            unflatten(&name("D"), &self.D, dims.l, dims.h, dims.g)?,
            activation(&name("rho1"), &self.rho1)?,
            activation(&name("rho2"), &self.rho2)?,
        )
    }
}

pub fn save_weights(w: &GrnnWeights) -> Result<Vec<u8>> {
    let g = w.theta_action.nrows();
    let theta: Vec<f64> = (0..g)
        .flat_map(|r| (0..g).map(move |c| (r, c)))
        .map(|(r, c)| w.theta_action[(r, c)])
        .collect();
    let file = WeightFile {
        format_version: FORMAT_VERSION,
        actor: BlockFile::from_grnn(&w.actor),
        theta_action: theta,
        critic: w.critic.as_ref().map(BlockFile::from_grnn),
    };
    let mut bytes = serde_json::to_vec_pretty(&file)?;
    bytes.push(b'\n');
    Ok(bytes)
}

pub fn load_weights(bytes: &[u8]) -> Result<GrnnWeights> {
    let file: WeightFile = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: Some(e.line() as u32),
        message: e.to_string(),
    })?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::weights(
            "format_version",
            format!("unsupported version {}", file.format_version),
        ));
    }
    let actor = file.actor.to_grnn("")?;
    let g = actor.dims.g;
    if file.theta_action.len() != g * g {
        return Err(Error::weights(
            "theta_action",
            format!("expected {} values, got {}", g * g, file.theta_action.len()),
        ));
    }
    let theta = DMatrix::from_row_slice(g, g, &file.theta_action);
    let critic = file.critic.as_ref().map(|c| c.to_grnn("critic.")).transpose()?;
    GrnnWeights::new(actor, theta, critic)
}

pub fn save_weights_file(w: &GrnnWeights, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_weights(w)?)?;
    Ok(())
}

pub fn load_weights_file(path: impl AsRef<Path>) -> Result<GrnnWeights> {
    load_weights(&std::fs::read(path)?)
}
