//! Information quantities that measure the rate cost of binning and decoding
//! with group codes instead of linear codes.

use super::pmf::JointPmf;
use crate::algebra::{GroupSpec, SubgroupIndex};
use crate::error::{invalid, Result};

/// Grid resolution per simplex dimension used by [`group_mi_source_abelian`].
pub const DEFAULT_WEIGHT_GRID: usize = 201;

const ZERO_MI: f64 = 1e-12;

fn check_group_var(pmf: &JointPmf, v: &str, g: &GroupSpec) -> Result<()> {
    let size = pmf.size_of(v)?;
    if size != g.order() {
        return invalid(format!(
            "variable '{v}' has {size} symbols but the group has order {}",
            g.order()
        ));
    }
    Ok(())
}

fn coset_name(theta: &SubgroupIndex) -> String {
    format!("__coset{:?}", theta.0)
}

/// The pmf extended with the coset label [V]_theta.
fn with_coset(
    pmf: &JointPmf,
    v: &str,
    g: &GroupSpec,
    theta: &SubgroupIndex,
) -> Result<(JointPmf, String)> {
    let vi = pmf.var_index(v)?;
    let name = coset_name(theta);
    let ext = pmf.with_derived(&name, g.coset_count(theta), |idx| {
        g.coset_label_of_index(theta, idx[vi])
    })?;
    Ok((ext, name))
}

/// I([V]_theta; S).
pub fn coset_mi(
    pmf: &JointPmf,
    v: &str,
    s: &[&str],
    g: &GroupSpec,
    theta: &SubgroupIndex,
) -> Result<f64> {
    g.check_theta(theta)?;
    let (ext, name) = with_coset(pmf, v, g, theta)?;
    ext.mutual_information(&[&name], s)
}

fn single_factor(g: &GroupSpec) -> Result<(u32, u32)> {
    match g.factors() {
        [f] => Ok((f.p, f.r)),
        _ => invalid("expected a cyclic group Z_{p^r}"),
    }
}

/// Source-side group mutual information for V over Z_{p^r}:
/// max over theta in 1..=r of (r/theta) I([V]_theta; S).
pub fn group_mi_source_zpr(pmf: &JointPmf, v: &str, s: &[&str], g: &GroupSpec) -> Result<f64> {
    check_group_var(pmf, v, g)?;
    let (_, r) = single_factor(g)?;
    let mut best: f64 = 0.0;
    for t in 1..=r {
        let mi = coset_mi(pmf, v, s, g, &SubgroupIndex(vec![t]))?;
        best = best.max(r as f64 / t as f64 * mi);
    }
    Ok(best)
}

/// Weight vectors on the probability simplex with coordinates in steps of 1/(resolution-1).
pub fn simplex_grid(dims: usize, resolution: usize) -> Vec<Vec<f64>> {
    let total = resolution.saturating_sub(1).max(1);
    let mut out = Vec::new();
    let mut current = vec![0usize; dims];
    fn rec(i: usize, left: usize, total: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.iter().map(|&c| c as f64 / total as f64).collect());
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            rec(i + 1, left - c, total, cur, out);
        }
    }
    if dims > 0 {
        rec(0, total, total, &mut current, &mut out);
    }
    out
}

/// Source-side group mutual information for a general Abelian group:
/// min over simplex weights w of max over theta != 0 of I([V]_theta; S) / (1 - w_theta).
///
/// A term with w_theta = 1 is infinite unless its mutual information vanishes.
/// With a single factor the simplex is the point w = 1 and this reduces to
/// [`group_mi_source_zpr`].
pub fn group_mi_source_abelian(
    pmf: &JointPmf,
    v: &str,
    s: &[&str],
    g: &GroupSpec,
    resolution: usize,
) -> Result<f64> {
    check_group_var(pmf, v, g)?;
    if resolution < 2 && g.factors().len() > 1 {
        return invalid("weight grid needs at least two points per dimension");
    }
    let terms: Vec<(SubgroupIndex, f64)> = g
        .subgroup_indices()
        .into_iter()
        .filter(|th| th.0.iter().any(|&t| t > 0))
        .map(|th| {
            let mi = coset_mi(pmf, v, s, g, &th)?;
            Ok((th, mi))
        })
        .collect::<Result<_>>()?;
    let mut best = f64::INFINITY;
    for w in simplex_grid(g.factors().len(), resolution) {
        let mut worst: f64 = 0.0;
        for (th, mi) in &terms {
            let denom = 1.0 - g.theta_weight(th, &w);
            let term = if *mi <= ZERO_MI {
                0.0
            } else if denom <= 1e-12 {
                f64::INFINITY
            } else {
                mi / denom
            };
            worst = worst.max(term);
            if worst >= best {
                break;
            }
        }
        best = best.min(worst);
    }
    Ok(best)
}

/// Channel-side group mutual information for V over Z_{p^r}:
/// min over theta in 0..r of (r/(r - theta)) I(V; Y | [V]_theta).
pub fn group_mi_channel_zpr(pmf: &JointPmf, v: &str, y: &[&str], g: &GroupSpec) -> Result<f64> {
    check_group_var(pmf, v, g)?;
    let (_, r) = single_factor(g)?;
    let mut best = f64::INFINITY;
    for t in 0..r {
        let theta = SubgroupIndex(vec![t]);
        let (ext, name) = with_coset(pmf, v, g, &theta)?;
        let mi = ext.conditional_mi(&[v], y, &[&name])?;
        best = best.min(r as f64 / (r - t) as f64 * mi);
    }
    Ok(best)
}

/// Group analogue of conditional entropy: log|V| minus the source-side group
/// mutual information between V and the conditioning variables.
pub fn group_entropy_source(pmf: &JointPmf, v: &str, cond: &[&str], g: &GroupSpec) -> Result<f64> {
    check_group_var(pmf, v, g)?;
    let mi = if cond.is_empty() {
        0.0
    } else if g.is_cyclic_p_group() {
        group_mi_source_zpr(pmf, v, cond, g)?
    } else {
        group_mi_source_abelian(pmf, v, cond, g, DEFAULT_WEIGHT_GRID)?
    };
    Ok((g.order() as f64).log2() - mi)
}
