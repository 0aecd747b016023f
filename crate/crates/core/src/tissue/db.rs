//! Line-oriented tissue parameter database.
//!
//! ```text
//! # comment
//! name=muscle eps_inf=4.0 sigma_ionic=0.2 term.1.delta_eps=50 term.1.tau=7.234e-12 term.1.alpha=0.1 ...
//! ```
//!
//! Every record carries `name`, `eps_inf`, `sigma_ionic` and four complete
//! `term.N.{delta_eps,tau,alpha}` groups.

use super::{ColeColeModel, RelaxationTerm};
use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::OnceLock;

/// The tissue set shipped with the crate.
pub const DEFAULT_TISSUE_DB: &str = include_str!("../../data/tissues.db");

const TERMS: usize = 4;

#[derive(Debug, Clone, Default)]
pub struct TissueDb {
    models: Vec<ColeColeModel>,
}

impl TissueDb {
    pub fn get(&self, name: &str) -> Result<&ColeColeModel> {
        self.models
            .iter()
            .find(|m| m.name() == name)
            .ok_or_else(|| Error::UnknownTissue {
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.models.iter().map(|m| m.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ColeColeModel> {
        self.models.iter()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

pub fn default_tissue_db() -> &'static TissueDb {
    static DB: OnceLock<TissueDb> = OnceLock::new();
    DB.get_or_init(|| parse_tissue_db(DEFAULT_TISSUE_DB).expect("shipped tissue database is valid"))
}

pub fn load_tissue_db(path: impl AsRef<Path>) -> Result<TissueDb> {
    let text = std::fs::read_to_string(path)?;
    parse_tissue_db(&text)
}

pub fn parse_tissue_db(text: &str) -> Result<TissueDb> {
    let mut models: Vec<ColeColeModel> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let model = parse_record(line, line_no)?;
        if models.iter().any(|m| m.name() == model.name()) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate tissue `{}`", model.name()),
            });
        }
        models.push(model);
    }
    if models.is_empty() {
        return Err(Error::Parse {
            line: last_line.max(1),
            message: "no tissue records".into(),
        });
    }
    Ok(TissueDb { models })
}

fn parse_record(line: &str, line_no: usize) -> Result<ColeColeModel> {
    let err = |message: String| Error::Parse { line: line_no, message };
    let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found `{token}`")))?;
        if fields.insert(key, value).is_some() {
            return Err(err(format!("repeated key `{key}`")));
        }
    }

    let mut take = |key: &str| -> Result<&str> {
        fields
            .remove(key)
            .ok_or_else(|| err(format!("missing `{key}`")))
    };
    let name = take("name")?.to_string();
    let mut number = |key: &str| -> Result<f64> {
        let v = take(key)?;
        v.parse::<f64>()
            .map_err(|_| err(format!("`{key}`: `{v}` is not a number")))
    };
    let eps_inf = number("eps_inf")?;
    let sigma_ionic = number("sigma_ionic")?;
    let mut terms = Vec::with_capacity(TERMS);
    for n in 1..=TERMS {
        terms.push(RelaxationTerm {
            delta_eps: number(&format!("term.{n}.delta_eps"))?,
            tau: number(&format!("term.{n}.tau"))?,
            alpha: number(&format!("term.{n}.alpha"))?,
        });
    }
    if let Some(extra) = fields.keys().next() {
        return Err(err(format!("unknown key `{extra}`")));
    }
    ColeColeModel::new(name, eps_inf, terms, sigma_ionic)
}
