//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use fitzgerald::builtin::{self, ALTERNATING_PRESENTATION, FITZGERALD_PRESENTATION};
use fitzgerald::corpus::{self, abelian_groups_up_to, all_gsets, gset_groups, small_corpus};
use fitzgerald::hom::endomorphisms;
use fitzgerald::karoubi::{is_idempotent_completion, karoubi_audit, karoubi_envelope};
use fitzgerald::monoid::monoid_isomorphic;
use fitzgerald::props::{bridge_audit, Analysis, PropsConfig};
use fitzgerald::search::{enumerate_monoids, find_counterexamples, is_counterexample, SearchConfig};
use fitzgerald::FiniteMonoid;

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fitzgerald"))
        .args(args)
        .output()
        .expect("run the fitzgerald binary");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).expect("utf-8 output"),
    )
}

fn shipped_s_path() -> String {
    format!("{}/../core/data/fitzgerald_s.json", env!("CARGO_MANIFEST_DIR"))
}

fn names(v: &Value) -> Vec<String> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_str().map(String::from)).collect())
        .unwrap_or_default()
}

fn blocks(v: &Value) -> Vec<Vec<String>> {
    v.as_array().map(|a| a.iter().map(names).collect()).unwrap_or_default()
}

fn realization() -> Outcome {
    let (code, out) = cli(&["presentation", FITZGERALD_PRESENTATION]);
    ensure(code == 0, format!("exit code {code}"))?;
    let m = FiniteMonoid::from_json(out.trim()).map_err(|e| e.to_string())?;
    ensure(m.order() == 6, format!("order {}", m.order()))?;
    let idem: Vec<String> = m.idempotents().into_iter().map(|i| m.name(i)).collect();
    ensure(idem == ["1", "e", "f", "g"], format!("idempotents {idem:?}"))?;
    let e = m.element("e").ok_or("no e")?;
    let f = m.element("f").ok_or("no f")?;
    ensure(m.mul(e, f) != m.mul(f, e), "e and f commute")
}

fn prop_3_1() -> Outcome {
    let (code, out) = cli(&["--json", "report", &shipped_s_path()]);
    ensure(code == 2, format!("exit code {code}, expected 2"))?;
    let r: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    for key in ["ri", "ur", "ri_star", "ur_star"] {
        ensure(r[key] == Value::Bool(true), format!("{key} is not true"))?;
    }
    ensure(r["idempotents_commute"] == Value::Bool(false), "idempotents commute")?;
    let w = &r["witnesses"];
    let meet = w["intersections"].as_array().ok_or("no intersections")?.iter().any(|i| {
        names(&i["left"]) == ["e", "g", "ef"]
            && names(&i["right"]) == ["f", "g", "fe"]
            && names(&i["intersection"]) == ["g"]
    });
    ensure(meet, "eS ∩ fS = gS not reported")?;
    let rho_e = vec![vec!["1", "e"], vec!["f", "ef"], vec!["g", "fe"]];
    let rho_f = vec![vec!["1", "f"], vec!["e", "fe"], vec!["g", "ef"]];
    let join = w["joins"].as_array().ok_or("no joins")?.iter().any(|j| {
        blocks(&j["left"]) == rho_e
            && blocks(&j["right"]) == rho_f
            && blocks(&j["join"]) == [vec!["1", "e", "f", "g", "ef", "fe"]]
    });
    ensure(join, "ρ_e ∨ ρ_f = total not reported")
}

fn end_identification() -> Outcome {
    let s = builtin::fitzgerald_monoid();
    let end = endomorphisms(&builtin::fitzgerald_algebra()).map_err(|e| e.to_string())?;
    ensure(end.len() == 6, format!("{} endomorphisms", end.len()))?;
    let phi = monoid_isomorphic(&end.monoid, &s).ok_or("End(A) is not isomorphic to S")?;
    for a in 0..6 {
        for b in 0..6 {
            ensure(phi[end.monoid.mul(a, b)] == s.mul(phi[a], phi[b]), "isomorphism check failed")?;
        }
    }
    Ok(())
}

fn transfer_audit() -> Outcome {
    let mut counts = Vec::new();
    let mut violators = Vec::new();
    for n in 1..=4 {
        let ms = enumerate_monoids(n).map_err(|e| e.to_string())?;
        counts.push(ms.len());
        for m in ms {
            let audit = bridge_audit(&m.canonical_right_mset(), &PropsConfig::default()).map_err(|e| e.to_string())?;
            if !audit.violations.is_empty() {
                violators.push(format!("monoid {}", m.to_json()));
            }
        }
    }
    ensure(counts == [1, 2, 7, 35], format!("monoid counts {counts:?}"))?;
    for (label, a) in small_corpus(4) {
        let audit = bridge_audit(&a, &PropsConfig::default()).map_err(|e| e.to_string())?;
        for v in &audit.violations {
            violators.push(format!("{label}: {} {:?}", v.property, v.direction));
        }
    }
    ensure(violators.is_empty(), format!("{} violations: {}", violators.len(), violators.join("; ")))
}

fn lemma_4_4() -> Outcome {
    let s = builtin::fitzgerald_monoid();
    ensure(s.ri_sufficient().holds, "ri_sufficient(S) is false")?;
    let (e, f) = (s.element("e").ok_or("no e")?, s.element("f").ok_or("no f")?);
    ensure(s.ri_exponent(e, f) == Some(2), format!("exponent {:?}", s.ri_exponent(e, f)))?;
    let mut algebras = small_corpus(5);
    algebras.push(("builtin:fitzgerald".into(), builtin::fitzgerald_algebra()));
    for (label, a) in &algebras {
        let analysis = Analysis::new(a, 10).map_err(|e| format!("{label}: {e}"))?;
        if analysis.end.monoid.ri_sufficient().holds && !analysis.check_ri().holds {
            return Err(format!("{label}: sufficient condition holds but RI fails"));
        }
    }
    Ok(())
}

fn families() -> Outcome {
    let report = |a: &fitzgerald::FiniteAlgebra| Analysis::new(a, 10).map(|x| x.report()).map_err(|e| e.to_string());
    for n in 0..=5 {
        let r = report(&corpus::gen_set(n))?;
        ensure(r.ri == (n <= 1), format!("set of size {n}: RI = {}", r.ri))?;
    }
    for n in 1..=5 {
        let r = report(&corpus::gen_pointed_set(n))?;
        ensure(r.ur == (n <= 2), format!("pointed set of size {n}: UR = {}", r.ur))?;
    }
    for g in gset_groups() {
        for a in all_gsets(&g, 5) {
            corpus::check_action_laws(&g, &a).map_err(|e| e.to_string())?;
            let r = report(&a)?;
            ensure(!(r.ri && r.ur) || r.idempotents_commute, format!("{g}-set of size {} breaks RI ∧ UR ⇒ commuting", a.size()))?;
        }
    }
    for g in abelian_groups_up_to(8) {
        let a = corpus::gen_abelian(&g);
        corpus::check_group_laws(&a).map_err(|e| e.to_string())?;
        let r = report(&a)?;
        ensure(!(r.ur && r.ur_star) || r.idempotents_commute, format!("{g} breaks UR ∧ UR* ⇒ commuting"))?;
    }
    Ok(())
}

fn karoubi() -> Outcome {
    let s = builtin::fitzgerald_monoid();
    let env = karoubi_envelope(&s);
    ensure(env.objects() == ["1", "e", "f", "g"], format!("objects {:?}", env.objects()))?;
    let one = env.object("1").ok_or("no object 1")?;
    ensure(is_idempotent_completion(&env, &[one]).holds(), "not an idempotent completion of {1}")?;
    let (e, f) = (env.object("e").ok_or("no e")?, env.object("f").ok_or("no f")?);
    ensure(env.hom(e, f).len() == 2, format!("|hom(e, f)| = {}", env.hom(e, f).len()))?;

    let a = builtin::fitzgerald_algebra();
    let audit = karoubi_audit(&a, 10).map_err(|e| e.to_string())?;
    ensure(audit.consistent(), "hom cardinalities differ")?;
    ensure(audit.envelope_objects == 4 && audit.retract_objects == 4, "object counts differ from 4")?;
    let end = endomorphisms(&a).map_err(|e| e.to_string())?;
    let phi = monoid_isomorphic(&end.monoid, &s).ok_or("End(A) is not S")?;
    let to_s = |label: &str| (0..end.len()).find(|&i| end.monoid.name(i) == label).map(|i| s.name(phi[i]));
    let row = audit
        .rows
        .iter()
        .find(|r| to_s(&r.source).as_deref() == Some("e") && to_s(&r.target).as_deref() == Some("f"))
        .ok_or("no e → f row")?;
    ensure(row.envelope == 2 && row.retracts == 2, format!("e → f: {} vs {}", row.envelope, row.retracts))
}

fn search_regression() -> Outcome {
    let (found, stats) = find_counterexamples(&SearchConfig::new(4), |_| {}).map_err(|e| e.to_string())?;
    ensure(found.is_empty(), format!("{} counterexamples at order ≤ 4", found.len()))?;
    ensure(stats.total_monoids == 45, format!("{} monoids", stats.total_monoids))?;
    let s = FiniteMonoid::from_json(&std::fs::read_to_string(shipped_s_path()).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    ensure(is_counterexample(&s), "shipped S is not a counterexample")
}

fn infiniteness() -> Outcome {
    let (code, out) = cli(&["--json", "presentation", ALTERNATING_PRESENTATION, "--max-elements", "64", "--max-word-length", "8"]);
    ensure(code == 3, format!("exit code {code}, expected 3"))?;
    let d: Value = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    let forms = names(&d["normal_forms"]);
    for len in 1..=8 {
        for start in ['e', 'f'] {
            let other = if start == 'e' { 'f' } else { 'e' };
            let w: String = (0..len).map(|i| if i % 2 == 0 { start } else { other }).collect();
            ensure(forms.contains(&w), format!("missing normal form {w}"))?;
        }
    }
    Ok(())
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 presentation realizes the order-6 monoid", Duration::from_secs(1), realization),
        ("2 property report of the canonical right S-set", Duration::from_secs(1), prop_3_1),
        ("3 End(A) has 6 maps and is isomorphic to S", Duration::from_secs(1), end_identification),
        ("4 transfer audit over monoids and corpus of size ≤ 4", Duration::from_secs(300), transfer_audit),
        ("5 sufficient condition for RI", Duration::from_secs(60), lemma_4_4),
        ("6 example families", Duration::from_secs(300), families),
        ("7 Karoubi envelope against retracts", Duration::from_secs(10), karoubi),
        ("8 counterexample search regression", Duration::from_secs(600), search_regression),
        ("9 alternating presentation does not close", Duration::from_secs(10), infiniteness),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            ensure(elapsed <= limit, format!("took {elapsed:.2?}, limit {limit:?}"))
        });
        match outcome {
            Ok(()) => println!("[PASS] {name} ({elapsed:.2?})"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
