use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use polyop::dendroidal::{
    active_inert_factorize, classify, inert_generators, nerve, nerve_presheaf, omega_compose, omega_hom,
    segal_check, segal_domain, segal_to_monad, segal_to_monad_requirements, OmegaMor, Presheaf,
};
use polyop::freemonad::{
    adamek_wtype, check_pca, enumerate_ptrees, free_monad_poly, monad_laws_check, partial_laws_check,
    pn_chain, LambekAlgebra, LambekCoalgebra, WType,
};
use polyop::poly::{compose_poly, evaluate_with, Family, Polynomial};
use polyop::species::{compose_card, compose_card_via_series, egf, htpy_eval_card, set_eval_card, SymSeq};
use polyop::tree::{canonical_form, enumerate_trees, Tree};
use polyop::Guard;

use crate::input::{self, Monad};
use crate::{Command, Failure, Kind, OmegaAction, Report};

pub fn run(command: &Command, guard: Guard) -> Result<Report, Failure> {
    match command {
        Command::Validate { file, kind } => validate(file, *kind, guard),
        Command::Eval { poly, family } => {
            let p = input::polynomial(poly)?;
            let x = family_from(input::read_value(family)?)?;
            let ev = evaluate_with(&p, &x, guard)?;
            Ok(Report::ok(family_json(&ev.family)))
        }
        Command::Compose { q, p } => {
            let (q, p) = (input::polynomial(q)?, input::polynomial(p)?);
            let qp = compose_poly(&q, &p)?;
            Ok(Report::ok(json!({"sizes": sizes(&qp), "poly": qp})))
        }
        Command::Trees { max_nodes, max_arity } => {
            let trees = enumerate_trees(*max_nodes, *max_arity, guard)?;
            let forms: Vec<String> = trees.iter().map(|t| canonical_form(t).0).collect();
            Ok(Report::ok(json!({"count": forms.len(), "trees": forms})))
        }
        Command::Ptrees { poly, height } => {
            let p = input::polynomial(poly)?;
            let trees = enumerate_ptrees(&p, *height, guard)?;
            let mut per_colour = vec![0usize; p.j().size];
            for t in &trees {
                per_colour[t.term().root_colour(&p)] += 1;
            }
            let terms: Vec<String> = trees.iter().map(|t| t.canonical()).collect();
            Ok(Report::ok(json!({"count": terms.len(), "per_colour": per_colour, "trees": terms})))
        }
        Command::Freemonad { poly, height } => {
            let p = input::polynomial(poly)?;
            let trees = free_monad_poly(&p, *height, guard)?;
            let chain = pn_chain(&p, *height, guard)?;
            let agree = trees.signature_multiset() == chain.signature_multiset();
            Ok(Report::check(
                json!({
                    "count": trees.b().size,
                    "chain_count": chain.b().size,
                    "agree": agree,
                }),
                agree,
            ))
        }
        Command::Wtype { poly, max_iter } => {
            let p = input::polynomial(poly)?;
            let w = adamek_wtype(&p, *max_iter, guard)?;
            let body = match &w {
                WType::Stabilized { iterations, sizes, .. } => json!({
                    "stabilized": true,
                    "size": sizes.last().copied().unwrap_or(0),
                    "iterations": iterations,
                    "sizes": sizes,
                }),
                WType::Unbounded { iterations, sizes } => json!({
                    "stabilized": false,
                    "iterations": iterations,
                    "sizes": sizes,
                }),
            };
            Ok(Report::ok(body))
        }
        Command::Twist { instance } => twist(instance, guard),
        Command::Laws { monad } => match input::monad(monad, guard)? {
            Monad::Total(m) => {
                let r = monad_laws_check(&m)?;
                let passed = r.passed();
                Ok(Report::check(json!({"passed": passed, "report": r}), passed))
            }
            Monad::Truncated(m) => {
                let r = partial_laws_check(&m, guard)?;
                let passed = r.passed();
                Ok(Report::check(json!({"passed": passed, "partial": true, "report": r}), passed))
            }
        },
        Command::Omega { action } => omega(action, guard),
        Command::Nerve {
            monad,
            tree,
            max_nodes,
            max_arity,
            rebuild_data,
        } => {
            let m = input::monad(monad, guard)?;
            if let Some(t) = tree {
                let t = input::tree(t)?;
                let values = nerve(m.as_mult(), &t, guard)?;
                let elements: Vec<_> = values.iter().map(|x| x.tables()).collect();
                return Ok(Report::ok(json!({
                    "tree": canonical_form(&t).0,
                    "size": values.len(),
                    "elements": elements,
                })));
            }
            let base = enumerate_trees(max_nodes.unwrap_or(0), *max_arity, guard)?;
            let mut trees = segal_domain(&base);
            let mut extra = Vec::new();
            if *rebuild_data {
                let (req, maps) = segal_to_monad_requirements(1)?;
                for t in req {
                    if !trees.contains(&t) {
                        trees.push(t);
                    }
                }
                extra = maps;
            }
            let mut maps = inert_generators(&trees)?;
            maps.extend(extra);
            let phi = nerve_presheaf(m.as_mult(), &trees, &maps, guard)?;
            Ok(Report::ok(json!({"values": phi.values, "presheaf": phi})))
        }
        Command::Segal { presheaf, tree, to_monad } => segal(presheaf, tree.as_deref(), *to_monad, guard),
        Command::Egf { symseq, order } => {
            let s: SymSeq = input::parse(input::read_value(symseq)?, "symmetric sequence")?;
            let mut series = egf(&s);
            if let Some(n) = order {
                series = series.truncate(*n);
            }
            let coeffs: Vec<Value> = series.coeffs().iter().map(rational_json).collect();
            Ok(Report::ok(json!({"order": series.order(), "coefficients": coeffs})))
        }
        Command::Card { symseq, x, compose, n } => {
            let g: SymSeq = input::parse(input::read_value(symseq)?, "symmetric sequence")?;
            if let Some(f) = compose {
                let f: SymSeq = input::parse(input::read_value(f)?, "symmetric sequence")?;
                let n = n.expect("clap requires --n with --compose");
                let direct = compose_card(&g, &f, n)?;
                let via_series = compose_card_via_series(&g, &f, n)?;
                let agree = via_series.to_string() == direct.to_string();
                return Ok(Report::check(
                    json!({
                        "n": n,
                        "count": integer_json(&direct.to_string()),
                        "series_count": rational_json(&via_series),
                        "agree": agree,
                    }),
                    agree,
                ));
            }
            let x = x.expect("clap requires --x without --compose");
            Ok(Report::ok(json!({
                "x": x,
                "set_count": set_eval_card(&g, x, guard)?,
                "groupoid_count": rational_json(&htpy_eval_card(&g, x)),
            })))
        }
    }
}

fn sizes(p: &Polynomial) -> Value {
    json!({"I": p.i().size, "E": p.e().size, "B": p.b().size, "J": p.j().size})
}

#[derive(Deserialize)]
#[serde(untagged)]
enum FamilyInput {
    Sizes { sizes: Vec<usize> },
    Full(Family),
}

fn family_from(v: Value) -> Result<Family, Failure> {
    match input::parse::<FamilyInput>(v, "family")? {
        FamilyInput::Full(f) => Ok(f),
        FamilyInput::Sizes { sizes } => {
            let proj = sizes.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n)).collect();
            Ok(Family::new(sizes.len(), proj)?)
        }
    }
}

fn family_json(x: &Family) -> Value {
    let elements: Vec<String> = x.tags().iter().map(ToString::to_string).collect();
    json!({
        "size": x.len(),
        "fiber_sizes": x.fiber_sizes(),
        "elements": elements,
        "proj": x.proj().table,
    })
}

fn validate(file: &Path, kind: Kind, guard: Guard) -> Result<Report, Failure> {
    let v = input::read_value(file)?;
    let outcome: Result<Value, Failure> = match kind {
        Kind::Poly => input::polynomial_from(v).map(|p| json!({"sizes": sizes(&p), "arities": p.arities()})),
        Kind::Tree => input::tree_from(v).map(|t| tree_json(&t)),
        Kind::Monad => input::monad_from(v, guard).map(|m| match m {
            Monad::Total(m) => json!({"laws_verified": m.laws_verified()}),
            Monad::Truncated(m) => json!({"truncated_at": m.height(), "operations": m.terms().len()}),
        }),
        Kind::Presheaf => input::presheaf_from(v).map(|p| json!({"trees": p.trees.len(), "values": p.values})),
        Kind::Symseq => input::parse::<SymSeq>(v, "symmetric sequence").map(|s| json!({"sizes": s.sizes()})),
    };
    match outcome {
        Ok(summary) => Ok(Report::ok(json!({"valid": true, "summary": summary}))),
        Err(f) if f.code == 3 => Ok(Report::check(json!({"valid": false, "reason": f.message}), false)),
        Err(f) => Err(f),
    }
}

fn tree_json(t: &Tree) -> Value {
    json!({
        "canonical": canonical_form(t).0,
        "edges": t.edges(),
        "nodes": t.nodes(),
        "height": t.height(),
        "root": t.root(),
        "leaves": t.leaves().members,
    })
}

#[derive(Deserialize)]
struct StructureInput {
    carrier: Value,
    structure: Vec<usize>,
}

#[derive(Deserialize)]
struct TwistInput {
    poly: Value,
    coalgebra: StructureInput,
    algebra: StructureInput,
}

fn twist(path: &Path, guard: Guard) -> Result<Report, Failure> {
    let raw: TwistInput = input::parse(input::read_value(path)?, "twisting instance")?;
    let p = input::polynomial_from(raw.poly)?;
    let c = LambekCoalgebra::new(&p, family_from(raw.coalgebra.carrier)?, raw.coalgebra.structure)?;
    let a = LambekAlgebra::new(&p, family_from(raw.algebra.carrier)?, raw.algebra.structure)?;
    let r = check_pca(&p, &c, &a, guard)?;
    let passed = r.passed();
    Ok(Report::check(json!({"passed": passed, "report": r}), passed))
}

fn mor_json(f: &OmegaMor) -> Value {
    json!({
        "src": canonical_form(&f.src).0,
        "dst": canonical_form(&f.dst).0,
        "edge_map": f.edge_map.table,
        "class": classify(f).label(),
    })
}

fn omega(action: &OmegaAction, guard: Guard) -> Result<Report, Failure> {
    match action {
        OmegaAction::Hom { s, t } => {
            let (s, t) = (input::tree(s)?, input::tree(t)?);
            let maps = omega_hom(&s, &t, guard)?;
            let listed: Vec<Value> = maps.iter().map(mor_json).collect();
            Ok(Report::ok(json!({"count": maps.len(), "morphisms": listed})))
        }
        OmegaAction::Compose { g, f } => {
            let (g, f) = (input::omega_mor(g)?, input::omega_mor(f)?);
            Ok(Report::ok(mor_json(&omega_compose(&g, &f)?)))
        }
        OmegaAction::Factorize { f } => {
            let f = input::omega_mor(f)?;
            let (active, inert) = active_inert_factorize(&f)?;
            let recomposes = omega_compose(&inert, &active)? == f;
            Ok(Report::check(
                json!({
                    "middle": tree_json(&active.dst),
                    "active": mor_json(&active),
                    "inert": mor_json(&inert),
                    "recomposes": recomposes,
                }),
                recomposes,
            ))
        }
    }
}

fn segal(path: &Path, tree: Option<&Path>, to_monad: bool, guard: Guard) -> Result<Report, Failure> {
    let phi: Presheaf = input::presheaf(path)?;
    let trees: Vec<Tree> = match tree {
        Some(t) => vec![input::tree(t)?],
        None => phi.trees.clone(),
    };
    let mut all = true;
    let mut reports = Vec::new();
    for t in &trees {
        let r = segal_check(&phi, t, guard)?;
        all &= r.segal;
        reports.push(json!({"tree": canonical_form(t).0, "report": r}));
    }
    let mut body = json!({"segal": all, "checked": reports});
    if to_monad {
        let m = segal_to_monad(&phi, guard)?;
        body["monad"] = json!({"laws_verified": m.laws_verified(), "tables": m});
    }
    Ok(Report::check(body, all))
}

fn integer_json(x: &str) -> Value {
    x.parse::<i64>().map(Value::from).unwrap_or_else(|_| json!(x))
}

/// `{"num", "den"}`, with numbers that overflow `i64` kept as strings.
fn rational_json<T: ToString>(r: &T) -> Value {
    let s = r.to_string();
    let (num, den) = s.split_once('/').unwrap_or((&s, "1"));
    json!({"num": integer_json(num), "den": integer_json(den)})
}
