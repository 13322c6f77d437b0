//! JSON instance files: either a two-source function pair
//! (`x_alphabet`/`y_alphabet`/`pmf`/`f`/`g`) or a multi-source index
//! coding problem under the `index_coding` key.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use zecast::confusion::{FunctionPair, FunctionTable, IndexCodingInstance};
use zecast::pmf::{JointPmf, MultiPmf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    name: Option<String>,
    #[allow(dead_code)]
    description: Option<String>,
    x_alphabet: Option<usize>,
    y_alphabet: Option<usize>,
    pmf: Option<Vec<Vec<f64>>>,
    f: Option<Vec<Vec<Option<usize>>>>,
    g: Option<Vec<Vec<Option<usize>>>>,
    index_coding: Option<IndexCodingFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexCodingFile {
    shape: Vec<usize>,
    /// Joint probabilities, flattened row-major over `shape`.
    pmf: Vec<f64>,
    receivers: Vec<ReceiverFile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReceiverFile {
    has: Vec<usize>,
}

/// A validated instance, ready for the library.
pub enum Instance {
    Pair {
        name: Option<String>,
        pmf: JointPmf,
        fp: FunctionPair,
    },
    Index {
        name: Option<String>,
        inst: IndexCodingInstance,
    },
}

pub fn load(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read instance file {}", path.display()))?;
    let file: InstanceFile = serde_json::from_str(&text)
        .with_context(|| format!("{}: not a valid instance file", path.display()))?;

    if let Some(ic) = file.index_coding {
        if file.x_alphabet.is_some()
            || file.y_alphabet.is_some()
            || file.pmf.is_some()
            || file.f.is_some()
            || file.g.is_some()
        {
            bail!(
                "{}: index_coding instances must not carry pair fields",
                path.display()
            );
        }
        let sources = MultiPmf::new(ic.shape, ic.pmf)
            .with_context(|| format!("{}: index_coding.pmf", path.display()))?;
        let receivers = ic.receivers.into_iter().map(|r| r.has).collect();
        let inst = IndexCodingInstance::new(sources, receivers)
            .with_context(|| format!("{}: index_coding.receivers", path.display()))?;
        return Ok(Instance::Index {
            name: file.name,
            inst,
        });
    }

    let (Some(xs), Some(ys)) = (file.x_alphabet, file.y_alphabet) else {
        bail!(
            "{}: expected x_alphabet/y_alphabet/pmf/f/g or index_coding",
            path.display()
        );
    };
    let rows = file
        .pmf
        .with_context(|| format!("{}: missing pmf", path.display()))?;
    if rows.len() != xs || rows.iter().any(|r| r.len() != ys) {
        bail!(
            "{}: pmf must be a {} x {} array to match the alphabets",
            path.display(),
            xs,
            ys
        );
    }
    let pmf =
        JointPmf::new(rows).with_context(|| format!("{}: pmf rejected", path.display()))?;
    let f: FunctionTable = file
        .f
        .with_context(|| format!("{}: missing f table", path.display()))?;
    let g: FunctionTable = file
        .g
        .with_context(|| format!("{}: missing g table", path.display()))?;
    let fp = FunctionPair::new(f, g);
    fp.validate(&pmf)
        .with_context(|| format!("{}: function tables rejected", path.display()))?;
    Ok(Instance::Pair {
        name: file.name,
        pmf,
        fp,
    })
}
