//! The generate -> reduce -> solve -> oracle -> compare harness behind the
//! `verify` command and the acceptance suite. Trials run concurrently with
//! per-trial isolated random streams; aggregation is order-independent.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generate::{
    random_aemono_instance, random_cnf_grammar, random_ov_instance, random_subdivision_graph,
    random_triangle_instance, random_word, trial_rng,
};
use crate::oracles::{aemono_oracle, led_oracle, ov_oracle, triangle_oracle, LedOutcome};
use crate::pds::pds_reach;
use crate::reductions::{
    aemono_to_pds, aemono_to_subdivision_cflr, led_to_weighted_cflr, ov_to_dyck2,
    subdivision_preprocess, triangle_to_dyck1, triangle_to_pds, LedInstance, Payload, Query,
};
use crate::solvers::{all_pairs_reach, prepare_instance, st_reach, weighted_st_reach};
use crate::graph::WeightedLabeledGraph;
use crate::Symbol;

#[derive(Debug, Clone)]
pub struct VerifyFailure {
    pub trial: u32,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub reduction: String,
    pub trials: u32,
    pub agreements: u32,
    pub failures: Vec<VerifyFailure>,
}

/// Runs `trials` seeded trials of the named reduction against its oracle.
pub fn run_verify(reduction: &str, trials: u32, seed: u64, max_n: usize) -> Result<VerifyReport> {
    let trial_fn: fn(u64, u64, usize) -> Result<Option<String>> = match reduction {
        "triangle-dyck1" => trial_triangle_dyck1,
        "ov-dyck2" => trial_ov_dyck2,
        "triangle-pds" => trial_triangle_pds,
        "aemono-pds" => trial_aemono_pds,
        "aemono-sub" => trial_aemono_sub,
        "led-wcflr" => trial_led_wcflr,
        "subdiv" => trial_subdiv,
        other => {
            return Err(Error::Invalid(format!(
                "unknown reduction `{other}`; expected one of triangle-dyck1, ov-dyck2, \
                 triangle-pds, aemono-pds, aemono-sub, led-wcflr, subdiv"
            )))
        }
    };
    let mut failures: Vec<VerifyFailure> = (0..trials)
        .into_par_iter()
        .filter_map(|t| {
            let outcome = trial_fn(seed, u64::from(t), max_n);
            match outcome {
                Ok(None) => None,
                Ok(Some(detail)) => Some(VerifyFailure { trial: t, detail }),
                Err(e) => Some(VerifyFailure {
                    trial: t,
                    detail: format!("trial error: {e}"),
                }),
            }
        })
        .collect();
    failures.sort_by_key(|f| f.trial);
    Ok(VerifyReport {
        reduction: reduction.to_string(),
        trials,
        agreements: trials - failures.len() as u32,
        failures,
    })
}

fn disagree(detail: String) -> Result<Option<String>> {
    Ok(Some(detail))
}

fn trial_triangle_dyck1(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(1..=max_n.max(1));
    let density = rng.gen_range(0.1..0.9);
    let inst = random_triangle_instance(&mut rng, n, density);
    let expected = triangle_oracle(&inst).answer;
    let red = triangle_to_dyck1(&inst)?;
    let Payload::Cfl { grammar, graph, labels } = &red.payload else {
        unreachable!()
    };
    let Query::St { source, target } = red.query else {
        unreachable!()
    };
    let (cnf, d) = prepare_instance(grammar, graph, labels)?;
    let got = st_reach(&cnf, &d, source, target)?;
    if got != expected {
        return disagree(format!(
            "triangle n={n}: gadget answered {got}, oracle {expected}"
        ));
    }
    Ok(None)
}

fn trial_ov_dyck2(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(1..=max_n.max(1));
    let d = rng.gen_range(2..=6);
    let inst = random_ov_instance(&mut rng, n, d);
    let expected = ov_oracle(&inst)?.answer;
    let red = ov_to_dyck2(&inst)?;
    let Payload::Cfl { grammar, graph, labels } = &red.payload else {
        unreachable!()
    };
    let Query::St { source, target } = red.query else {
        unreachable!()
    };
    let (cnf, dd) = prepare_instance(grammar, graph, labels)?;
    let got = st_reach(&cnf, &dd, source, target)?;
    if got != expected {
        return disagree(format!(
            "OV n={n} d={d}: gadget answered {got}, oracle {expected}"
        ));
    }
    Ok(None)
}

fn trial_triangle_pds(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(2..=max_n.max(2));
    let density = rng.gen_range(0.1..0.9);
    let inst = random_triangle_instance(&mut rng, n, density);
    let expected = triangle_oracle(&inst).answer;
    let red = triangle_to_pds(&inst)?;
    let Payload::Pds(pds) = &red.payload else {
        unreachable!()
    };
    let Query::St { source, target } = red.query else {
        unreachable!()
    };
    if !pds.is_sparse(4) {
        return disagree(format!("triangle-PDS n={n} failed the sparsity check"));
    }
    let got = pds_reach(pds, source, target)?;
    if got != expected {
        return disagree(format!(
            "triangle-PDS n={n}: gadget answered {got}, oracle {expected}"
        ));
    }
    Ok(None)
}

fn trial_aemono_pds(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(2..=max_n.max(2));
    let density = rng.gen_range(0.2..0.9);
    let colors = rng.gen_range(1..=(n * n) as u64);
    let inst = random_aemono_instance(&mut rng, n, density, colors);
    let expected = aemono_oracle(&inst).answer;
    let red = aemono_to_pds(&inst)?;
    let Payload::Pds(pds) = &red.payload else {
        unreachable!()
    };
    let Query::PerEdge(queries) = &red.query else {
        unreachable!()
    };
    if !pds.is_sparse(4) {
        return disagree(format!("AE-Mono-PDS n={n} failed the sparsity check"));
    }
    for q in queries {
        let got = pds_reach(pds, q.from, q.to)?;
        let want = expected[&q.edge];
        if got != want {
            return disagree(format!(
                "AE-Mono-PDS n={n} edge {:?}: gadget answered {got}, oracle {want}",
                q.edge
            ));
        }
    }
    Ok(None)
}

fn trial_aemono_sub(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(2..=max_n.max(2));
    let density = rng.gen_range(0.2..0.9);
    let colors = rng.gen_range(1..=(n * n) as u64);
    let inst = random_aemono_instance(&mut rng, n, density, colors);
    let expected = aemono_oracle(&inst).answer;
    let red = aemono_to_subdivision_cflr(&inst)?;
    let Payload::SubdivisionCfl { grammar, graph, labels } = &red.payload else {
        unreachable!()
    };
    let Query::PerEdge(queries) = &red.query else {
        unreachable!()
    };
    let (cnf, d) = prepare_instance(grammar, &graph.base, labels)?;
    let reach = all_pairs_reach(&cnf, &d)?;
    for q in queries {
        let got = reach.contains(q.from, cnf.start(), q.to);
        let want = expected[&q.edge];
        if got != want {
            return disagree(format!(
                "AE-Mono subdivision n={n} edge {:?}: gadget answered {got}, oracle {want}",
                q.edge
            ));
        }
    }
    Ok(None)
}

/// Shared LED comparison: exact equality inside the oracle radius; beyond it
/// the solver must be absent or more expensive than the radius.
pub fn led_matches_oracle(inst: &LedInstance, radius: u64) -> Result<Option<String>> {
    let expected = led_oracle(inst, radius)?.answer;
    let red = led_to_weighted_cflr(inst)?;
    let Payload::WeightedCfl { grammar, graph, labels } = &red.payload else {
        unreachable!()
    };
    let Query::WeightedSt { source, target } = red.query else {
        unreachable!()
    };
    let (cnf, base) = prepare_instance(grammar, &graph.base, labels)?;
    let weighted = WeightedLabeledGraph::new(base, graph.weights.clone())?;
    let got = weighted_st_reach(&cnf, &weighted, source, target)?;
    let agree = match expected {
        LedOutcome::Exact(d) => got == Some(d),
        LedOutcome::ExceedsRadius => got.is_none() || got.is_some_and(|w| w > radius),
    };
    if !agree {
        return Ok(Some(format!(
            "LED word length {}: gadget answered {:?}, oracle {:?} (radius {radius})",
            inst.word.len(),
            got,
            expected
        )));
    }
    Ok(None)
}

fn trial_led_wcflr(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let grammar = random_cnf_grammar(&mut rng, 3, 2, 6);
    let terminals: Vec<Symbol> = grammar.terminals().iter().copied().collect();
    let word = random_word(&mut rng, &terminals, max_n.min(4));
    let costs = (
        rng.gen_range(1..=2),
        rng.gen_range(1..=2),
        rng.gen_range(1..=2),
    );
    let ops = (rng.gen_bool(0.7), rng.gen_bool(0.7), rng.gen_bool(0.7));
    let inst = LedInstance::new(word, grammar, costs, ops)?;
    led_matches_oracle(&inst, 8)
}

fn trial_subdiv(seed: u64, trial: u64, max_n: usize) -> Result<Option<String>> {
    let mut rng = trial_rng(seed, trial);
    let n = rng.gen_range(1..=max_n.max(1).min(5));
    let k = rng.gen_range(1..=4);
    let grammar = random_cnf_grammar(&mut rng, 3, 2, 5);
    let terminals: Vec<Symbol> = grammar.terminals().iter().copied().collect();
    let sd = random_subdivision_graph(&mut rng, n, 0.35, k, &terminals);
    let pre = subdivision_preprocess(&sd, &grammar, grammar.symbols(), 4)?;
    let (before_g, before_d) = prepare_instance(&grammar, &sd.base, grammar.symbols())?;
    let before = all_pairs_reach(&before_g, &before_d)?;
    let (after_g, after_d) = prepare_instance(&pre.grammar, &pre.graph, &pre.labels)?;
    let after = all_pairs_reach(&after_g, &after_d)?;
    for (new_u, &old_u) in pre.ordinary_map.iter().enumerate() {
        for (new_v, &old_v) in pre.ordinary_map.iter().enumerate() {
            let want = before.contains(old_u, before_g.start(), old_v);
            let got = after.contains(new_u, after_g.start(), new_v);
            if want != got {
                return disagree(format!(
                    "subdivision n={n} k={k}: pair ({old_u},{old_v}) answered {got}, \
                     direct solve {want}"
                ));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_verify_runs_agree() {
        for kind in ["triangle-dyck1", "ov-dyck2", "triangle-pds"] {
            let report = run_verify(kind, 8, 99, 6).unwrap();
            assert_eq!(report.agreements, 8, "{kind}: {:?}", report.failures);
        }
    }

    #[test]
    fn unknown_reduction_is_rejected() {
        assert!(run_verify("nope", 1, 0, 4).is_err());
    }
}
