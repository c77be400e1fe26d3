use stablab_core::foliation::{foliation_report, LeafOptions};

use super::{min_of, Produced};
use crate::config::Foliation;
use crate::report::Check;
use crate::RunError;

pub(crate) fn run(p: &Foliation) -> Result<Produced, RunError> {
    let mut s0 = p.s0.clone();
    s0.sort_by(f64::total_cmp);
    s0.dedup();
    let annulus = (p.annulus[0], p.annulus[1]);
    let mut checks = Vec::new();
    let mut csv = String::from("m,s0,crossings,termination,side_occupancy,samples\n");
    for &m in &p.m_values {
        let n = 2 * m;
        let (rep, _) = foliation_report(m, &s0, LeafOptions::new(p.tau_max, p.tol), annulus)?;
        let (half, _) = foliation_report(m, &s0, LeafOptions::new(p.tau_max, 0.5 * p.tol), annulus)?;
        for l in &rep.leaves {
            csv.push_str(&format!(
                "{m},{:.16e},{},{},{:.16e},{}\n",
                l.s0,
                l.crossings,
                l.termination.as_str(),
                l.side_occupancy,
                l.samples
            ));
        }
        let counts: Vec<usize> = rep.leaves.iter().map(|l| l.crossings).collect();
        let mut c = Check::new(
            format!("leaf-crossings-n{n}"),
            if n >= 8 { "foliation:leaves-avoid-cone" } else { "foliation:leaves-cross-cone" },
        );
        for (l, k) in rep.leaves.iter().zip(&counts) {
            c = c.count(&format!("crossings_s0_{}", l.s0), *k);
        }
        if n >= 8 {
            let dist = min_of(rep.pairs.iter().map(|q| q.min_distance.unwrap_or(0.0)));
            c = c.value("min_pair_distance", dist);
            let separated = rep.pairs.iter().all(|q| q.min_distance.is_some_and(|d| d > 0.0));
            checks.push(c.holds(counts.iter().all(|&k| k == 0) && separated));
        } else {
            checks.push(c.count("min_required", p.min_crossings).holds(counts.iter().all(|&k| k >= p.min_crossings)));
        }
        let halved: Vec<usize> = half.leaves.iter().map(|l| l.crossings).collect();
        checks.push(
            Check::new(format!("crossing-count-stability-n{n}"), "foliation:tolerance-stability")
                .value("tol", p.tol)
                .count("total_crossings", counts.iter().sum())
                .count("total_crossings_half_tol", halved.iter().sum())
                .holds(counts == halved),
        );
    }
    let art = crate::Artifact { name: "foliation_leaves.csv".into(), contents: csv.into_bytes() };
    Ok((checks, vec![art]))
}
