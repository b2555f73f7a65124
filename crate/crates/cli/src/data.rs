//! Dataset ingestion.

use std::path::Path;

use bayeschi::models::{
    ChainSettings, ExchangeableSettings, Model, NormalRefPrior, PoissonLogLinear, PoissonVariant,
};

use crate::config::ModelSettings;
use crate::error::CliError;

pub struct Dataset {
    pub y: Vec<f64>,
    pub offsets: Option<Vec<f64>>,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = sha256_hex(&bytes);
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(&bytes[..]);
    let headers = rdr
        .headers()
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let iy = col("y").ok_or_else(|| CliError::data(format!("{}: missing column `y`", path.display())))?;
    let ie = col("E");

    let mut y = Vec::new();
    let mut offsets = ie.map(|_| Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let line = row + 2;
        let rec = rec.map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
        let field = |i: usize, name: &str| -> Result<f64, CliError> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::data(format!("{}: line {line}: column `{name}` value `{s}` is not a finite number", path.display())))
        };
        y.push(field(iy, "y")?);
        if let (Some(i), Some(o)) = (ie, offsets.as_mut()) {
            let e = field(i, "E")?;
            if !(e > 0.0) {
                return Err(CliError::data(format!("{}: line {line}: offset `E` must be > 0, got {e}", path.display())));
            }
            o.push(e);
        }
    }
    if y.is_empty() {
        return Err(CliError::data(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset { y, offsets, sha256 })
}

pub fn as_counts(y: &[f64]) -> Result<Vec<u64>, CliError> {
    y.iter()
        .enumerate()
        .map(|(i, &v)| {
            if v >= 0.0 && v.fract() == 0.0 && v < 9.0e15 {
                Ok(v as u64)
            } else {
                Err(CliError::data(format!(
                    "row {}: count `y` = {v} is not a non-negative integer",
                    i + 1
                )))
            }
        })
        .collect()
}

/// A model paired with data of the matching observation type.
pub enum Fitted {
    Normal(NormalRefPrior, Vec<f64>),
    Poisson(PoissonLogLinear, Vec<u64>),
}

pub fn poisson_variant(m: &ModelSettings) -> Result<PoissonVariant, CliError> {
    Ok(match m.model.as_str() {
        "poisson-common" => PoissonVariant::Common,
        "poisson-saturated" => PoissonVariant::Saturated {
            prior_exponent: m.prior_exponent,
        },
        "poisson-exchangeable" => PoissonVariant::Exchangeable(ExchangeableSettings {
            hyper_shape: m.hyper_shape,
            hyper_scale: m.hyper_scale,
            chain: ChainSettings {
                burn_in: m.burn_in,
                thin: m.thin,
                ..Default::default()
            },
            ..Default::default()
        }),
        other => return Err(CliError::usage(format!("`{other}` is not a Poisson model"))),
    })
}

pub fn fit(ds: &Dataset, m: &ModelSettings) -> Result<Fitted, CliError> {
    let fitted = if m.is_poisson() {
        let offsets = ds
            .offsets
            .clone()
            .ok_or_else(|| CliError::data(format!("model {} needs the offset column `E`", m.model)))?;
        let counts = as_counts(&ds.y)?;
        let model = PoissonLogLinear::new(poisson_variant(m)?, offsets).map_err(CliError::from_data)?;
        model.validate_data(&counts).map_err(CliError::from_data)?;
        Fitted::Poisson(model, counts)
    } else {
        NormalRefPrior.validate_data(&ds.y).map_err(CliError::from_data)?;
        Fitted::Normal(NormalRefPrior, ds.y.clone())
    };
    Ok(fitted)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_must_be_integers() {
        assert_eq!(as_counts(&[0.0, 3.0]).unwrap(), vec![0, 3]);
        assert!(as_counts(&[1.5]).is_err());
        assert!(as_counts(&[-1.0]).is_err());
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }
}
