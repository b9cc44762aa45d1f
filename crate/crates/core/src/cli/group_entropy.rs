use std::io::Write;
use std::path::PathBuf;

use clap::Args;

use super::{io_err, parse_pmf_file};
use crate::algebra::GroupSpec;
use crate::error::{invalid, Error, Result};
use crate::info::{
    group_mi_channel_zpr, group_mi_source_abelian, group_mi_source_zpr, JointPmf,
    DEFAULT_WEIGHT_GRID,
};

#[derive(Debug, Clone, Args)]
pub struct GroupEntropyArgs {
    /// Group of V, e.g. `Z4` or `Z2xZ4`.
    #[arg(long)]
    pub group: String,
    /// Joint pmf file.
    #[arg(long)]
    pub pmf: PathBuf,
    /// Variable carrying the group element (default: the first one in the file).
    #[arg(long)]
    pub var: Option<String>,
    /// Use the general Abelian-group formula even for a cyclic group.
    #[arg(long)]
    pub abelian: bool,
    /// Grid points per dimension of the weight simplex.
    #[arg(long, default_value_t = DEFAULT_WEIGHT_GRID)]
    pub resolution: usize,
}

/// One row of the table: the conditioning variables and the three quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupEntropyRow {
    pub conditioning: Vec<String>,
    pub i_s: f64,
    pub h_s: f64,
    /// Only defined for a cyclic group Z_{p^r}.
    pub i_c: Option<f64>,
}

pub(super) fn table(args: &GroupEntropyArgs, pmf: &JointPmf) -> Result<Vec<GroupEntropyRow>> {
    let g = GroupSpec::parse(&args.group)?;
    let v = match &args.var {
        Some(v) => v.clone(),
        None => pmf.names()[0].clone(),
    };
    pmf.var_index(&v)?;
    if pmf.size_of(&v)? != g.order() {
        return invalid(format!(
            "--group {} has order {}, but {v} takes {} values",
            args.group,
            g.order(),
            pmf.size_of(&v)?
        ));
    }
    let others: Vec<String> = pmf.names().iter().filter(|n| **n != v).cloned().collect();
    if others.is_empty() {
        return invalid("the pmf needs at least one variable besides the group variable");
    }
    let mut choices: Vec<Vec<String>> = others.iter().map(|o| vec![o.clone()]).collect();
    if others.len() > 1 {
        choices.push(others.clone());
    }
    let log_v = (g.order() as f64).log2();
    choices
        .into_iter()
        .map(|cond| {
            let c: Vec<&str> = cond.iter().map(String::as_str).collect();
            let i_s = if g.is_cyclic_p_group() && !args.abelian {
                group_mi_source_zpr(pmf, &v, &c, &g)?
            } else {
                group_mi_source_abelian(pmf, &v, &c, &g, args.resolution)?
            };
            let i_c = if g.is_cyclic_p_group() {
                Some(group_mi_channel_zpr(pmf, &v, &c, &g)?)
            } else {
                None
            };
            Ok(GroupEntropyRow {
                conditioning: cond,
                i_s,
                h_s: log_v - i_s,
                i_c,
            })
        })
        .collect()
}

pub(super) fn run(args: &GroupEntropyArgs, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(&args.pmf)
        .map_err(|e| Error::Validation(format!("--pmf {}: {e}", args.pmf.display())))?;
    let pmf = parse_pmf_file(&text).map_err(|e| match e {
        Error::Validation(msg) => Error::Validation(format!("--pmf {}: {msg}", args.pmf.display())),
        other => other,
    })?;
    let rows = table(args, &pmf)?;
    writeln!(out, "conditioning,i_s,h_s,i_c").map_err(io_err)?;
    for r in rows {
        let i_c = r.i_c.map(|x| x.to_string()).unwrap_or_else(|| "n/a".into());
        writeln!(
            out,
            "{},{},{},{}",
            r.conditioning.join(" "),
            r.i_s,
            r.h_s,
            i_c
        )
        .map_err(io_err)?;
    }
    Ok(())
}
