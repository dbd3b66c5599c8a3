use std::collections::HashSet;
use std::path::Path;

use anyhow::{Context, Result};
use ordbij::bijection::{find_group_bijection, Matched, OrderMultiset};
use ordbij::catalog::{builtin, lookup, CatalogEntry};
use ordbij::group::{
    conjugacy_classes, normal_subgroups_with_cap, structural_predicates, FiniteGroup, Source,
    DEFAULT_LATTICE_CAP,
};
use ordbij::io::{load_catalog_file, load_group_file, load_weight_csv};
use ordbij::lab::{
    batch_verify, catalog_items, check_min, classify, verify_group, BatchItem, BatchOptions,
    Outcome, Property, ReportStore,
};
use ordbij::solutions::{build_chain, verify_chain};
use ordbij::symmetric::{
    compare_with_cyclic, newton_check, psi_values, rational_string, Monotonicity, WeightFunction,
};
use ordbij::topology::{
    cyclic_base, homeomorphism_check, induce_topology, integer_projection_continuity,
    separation_report,
};
use ordbij::Error;
use serde_json::json;

use crate::{Cli, Command, MonotonicityArg, Verdict, WeightArgs};

pub fn run(cli: &Cli) -> Result<Verdict> {
    match &cli.command {
        Command::VerifyBijection { group } => verify_bijection(cli, group),
        Command::VerifyMin { group } => verify_min(cli, group),
        Command::Classify { group } => classify_group(cli, group),
        Command::Psi {
            group,
            weight,
            k,
            compare,
        } => psi(cli, group, weight, *k, *compare),
        Command::NewtonCheck { group, weight, k } => newton(cli, group, weight, *k),
        Command::Sweep {
            max_order,
            min_order,
            property,
            psi_k,
        } => sweep(cli, *min_order, *max_order, property, *psi_k),
        Command::Chain { group, bases } => chain(cli, group, bases),
        Command::Topology { group, opens } => topology(cli, group, *opens),
        Command::Show { group } => show(cli, group),
    }
}

fn extra_entries(cli: &Cli) -> Result<Vec<CatalogEntry>> {
    match &cli.catalog {
        Some(path) => Ok(load_catalog_file(path)?),
        None => Ok(Vec::new()),
    }
}

/// A catalog name, a name from the grammar, or a path to a group file.
fn resolve(cli: &Cli, name: &str) -> Result<FiniteGroup> {
    let path = Path::new(name);
    let group = if path.is_file() {
        load_group_file(path, cli.cap)?
    } else {
        lookup(name, &extra_entries(cli)?, cli.cap)?
    };
    if group.source() != Source::Constructor {
        group
            .check_axioms()
            .with_context(|| format!("{name} fails the group axioms"))?;
    }
    Ok(group)
}

fn options(cli: &Cli, psi_k: usize) -> Result<BatchOptions> {
    Ok(BatchOptions {
        lattice_cap: DEFAULT_LATTICE_CAP,
        seed: cli.seed,
        jobs: cli.jobs,
        psi_k,
        fixed_timestamp: None,
    }
    .with_env_timestamp()?)
}

/// Appends reports for `properties` when `--report` is set.
fn record(cli: &Cli, group: &FiniteGroup, properties: &[Property]) -> Result<()> {
    if let Some(path) = &cli.report {
        let store = ReportStore::open(path)?;
        let reports = verify_group(&BatchItem::Group(group.clone()), properties, &options(cli, 6)?)?;
        store.append(&reports)?;
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn label(group: &FiniteGroup, x: usize) -> String {
    match group.permutation(x) {
        Some(p) => p.to_string(),
        None => x.to_string(),
    }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Verified
    } else {
        Verdict::Refuted
    }
}

fn verify_bijection(cli: &Cli, name: &str) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let n = group.order();
    let matched = find_group_bijection(&group, cli.seed);
    record(cli, &group, &[Property::Bij])?;
    if cli.json {
        print_json(&json!(matched))?;
        return Ok(verdict(matched.is_found()));
    }
    match &matched {
        Matched::Found(b) => {
            println!("{} -> C{n}: bijection found", group.name());
            for ((x, k), (a, c)) in b.pairs().zip(b.certificate()) {
                println!("  {x:>5} {:<24} -> {k:>5}   {a} | {c}", label(&group, x as usize));
            }
        }
        Matched::Blocked(v) => {
            println!("{} -> C{n}: no bijection", group.name());
            println!(
                "  right orders {:?} need {} partners, only {} left elements divide them",
                v.blocking_orders, v.demand, v.supply
            );
        }
    }
    Ok(verdict(matched.is_found()))
}

fn verify_min(cli: &Cli, name: &str) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let m = check_min(&group, DEFAULT_LATTICE_CAP)?;
    record(cli, &group, &[Property::Min])?;
    if cli.json {
        print_json(&json!({
            "group": group.name(),
            "order": group.order(),
            "in_min": m.in_min,
            "in_min_existential": m.in_min_existential,
            "normals": m.normals,
            "cosets": m.cosets,
            "matchings": m.cases.len(),
            "failed": m.cases.iter().filter(|c| !c.found).count(),
            "counterexample": m.counterexample,
        }))?;
        return Ok(verdict(m.in_min));
    }
    println!("{} (order {})", group.name(), group.order());
    println!("  normal subgroups: {}", m.normals);
    println!("  cosets: {}", m.cosets);
    println!(
        "  coset matchings: {} ({} failed)",
        m.cases.len(),
        m.cases.iter().filter(|c| !c.found).count()
    );
    println!("  in Min (all u): {}", m.in_min);
    println!("  in Min (some u): {}", m.in_min_existential);
    if let Some(c) = &m.counterexample {
        println!("  counterexample: {}", serde_json::to_string(c)?);
    }
    Ok(verdict(m.in_min))
}

fn classify_group(cli: &Cli, name: &str) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let c = classify(&group, DEFAULT_LATTICE_CAP, cli.seed)?;
    record(cli, &group, &[Property::Bij, Property::Min, Property::Am])?;
    let in_am = c.am.in_am_strict() || c.am.in_am_loose();
    let ok = c.in_bij && (!in_am || c.min.in_min);
    if cli.json {
        print_json(&json!({
            "group": c.group,
            "order": c.order,
            "in_bij": c.in_bij,
            "in_min": c.min.in_min,
            "in_min_existential": c.min.in_min_existential,
            "in_am_strict": c.am.in_am_strict(),
            "in_am_loose": c.am.in_am_loose(),
            "am_strict_witness": c.am.strict,
            "am_loose_witness": c.am.loose,
            "is_semisimple": c.is_semisimple,
            "min_counterexample": c.min.counterexample,
        }))?;
        return Ok(verdict(ok));
    }
    println!("{} (order {})", c.group, c.order);
    println!("  Bij: {}", c.in_bij);
    println!("  Min: {} (some-u reading: {})", c.min.in_min, c.min.in_min_existential);
    println!("  semisimple: {}", c.is_semisimple);
    for (reading, w) in [("o(y) prime", &c.am.strict), ("y unrestricted", &c.am.loose)] {
        match w {
            Some(w) => println!(
                "  AM ({reading}): true, y = {} of order {}, N of order {} ({})",
                label(&group, w.y),
                w.y_order,
                w.normal_order,
                serde_json::to_value(&w.shape)?["shape"].as_str().unwrap_or("")
            ),
            None => println!("  AM ({reading}): false"),
        }
    }
    Ok(verdict(ok))
}

fn weight_function(args: &WeightArgs, n: usize) -> Result<WeightFunction> {
    let n = n as u64;
    Ok(match args.weight.as_str() {
        "identity" => WeightFunction::identity(n),
        "reciprocal" => WeightFunction::reciprocal(n),
        path => {
            let monotonicity = match args.monotonicity {
                MonotonicityArg::Increasing => Monotonicity::Increasing,
                MonotonicityArg::Decreasing => Monotonicity::Decreasing,
                MonotonicityArg::None => Monotonicity::None,
            };
            load_weight_csv(Path::new(path), monotonicity)?
        }
    })
}

fn psi(cli: &Cli, name: &str, args: &WeightArgs, k: usize, compare: bool) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let f = weight_function(args, group.order())?;
    let values = psi_values(&group, &f, k)?;
    let comparisons = if compare {
        compare_with_cyclic(&group, &f, k)?
    } else {
        Vec::new()
    };
    if args.weight == "identity" {
        record(cli, &group, &[Property::Psi])?;
    }
    let ok = comparisons.iter().all(|c| c.holds);
    if cli.json {
        print_json(&json!({ "values": values, "comparisons": comparisons }))?;
        return Ok(verdict(ok));
    }
    for e in &values.e {
        println!("{}", rational_string(e));
    }
    for c in &comparisons {
        println!(
            "k={}: {}={} C{}={} ({}) {}",
            c.k,
            c.group,
            rational_string(&c.group_value),
            c.order,
            rational_string(&c.cyclic_value),
            c.expected,
            if c.holds { "holds" } else { "FAILS" }
        );
    }
    Ok(verdict(ok))
}

fn newton(cli: &Cli, name: &str, args: &WeightArgs, k: usize) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let f = weight_function(args, group.order())?;
    let rows = newton_check(&group, &f, k)?;
    let ok = rows.iter().all(|r| r.equal);
    if cli.json {
        print_json(&json!(rows))?;
        return Ok(verdict(ok));
    }
    for r in &rows {
        println!(
            "k={} p_k={} det={} {}",
            r.k,
            rational_string(&r.power_sum),
            rational_string(&r.determinant),
            if r.equal { "equal" } else { "DIFFER" }
        );
    }
    Ok(verdict(ok))
}

fn sweep(
    cli: &Cli,
    min_order: usize,
    max_order: usize,
    properties: &[Property],
    psi_k: usize,
) -> Result<Verdict> {
    let mut seen = HashSet::new();
    let entries: Vec<CatalogEntry> = extra_entries(cli)?
        .into_iter()
        .chain(builtin())
        .filter(|e| (min_order..=max_order).contains(&e.order))
        .filter(|e| seen.insert(e.name.clone()))
        .collect();
    let mut props = properties.to_vec();
    props.dedup();
    let items = catalog_items(&entries, cli.cap)?;
    let store = cli.report.as_deref().map(ReportStore::open).transpose()?;
    let summary = batch_verify(&items, &props, &options(cli, psi_k)?, store.as_ref())?;
    if cli.json {
        print_json(&json!({
            "verified": summary.verified,
            "refuted": summary.refuted,
            "skipped": summary.skipped,
            "wall_ms": summary.wall_ms,
        }))?;
    } else {
        for r in &summary.reports {
            let outcome = match r.outcome {
                Outcome::Verified => "verified",
                Outcome::Refuted => "refuted",
                Outcome::SkippedCap => "skipped-cap",
            };
            println!("{:>5} {:<12} {:<4} {outcome}", r.order, r.group, r.property);
        }
        println!(
            "verified {}, refuted {}, skipped {} in {} ms",
            summary.verified, summary.refuted, summary.skipped, summary.wall_ms
        );
    }
    Ok(verdict(summary.refuted == 0))
}

fn chain(cli: &Cli, name: &str, bases: &[u64]) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let bases = if bases.is_empty() {
        vec![group.order() as u64]
    } else {
        bases.to_vec()
    };
    let chain = match build_chain(&group, &bases) {
        Ok(chain) => chain,
        Err(err @ Error::NoChain { .. }) => {
            println!("{}: {err}", group.name());
            return Ok(Verdict::Refuted);
        }
        Err(err) => return Err(err.into()),
    };
    let check = verify_chain(&group, &chain);
    if cli.json {
        print_json(&json!({ "chain": chain, "verified": check.is_ok() }))?;
    } else {
        println!("{} over Div{:?}", group.name(), bases);
        for (d, members) in &chain.assignment {
            println!("  A({d}) = {members:?}");
        }
        match &check {
            Ok(()) => println!("  verified"),
            Err(e) => println!("  verification failed: {e}"),
        }
    }
    Ok(verdict(check.is_ok()))
}

fn topology(cli: &Cli, name: &str, show_opens: bool) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let n = group.order() as u64;
    let f = match find_group_bijection(&group, cli.seed) {
        Matched::Found(b) => b,
        Matched::Blocked(v) => {
            println!("{}: no bijection onto C{n} ({:?})", group.name(), v.blocking_orders);
            return Ok(Verdict::Refuted);
        }
    };
    let t_g = induce_topology(&f)?;
    let t_c = cyclic_base(n)?;
    let axioms = t_g.check_axioms();
    let separation = separation_report(&t_g, 0);
    let homeomorphic = homeomorphism_check(&f, &t_g, &t_c);
    let projection = integer_projection_continuity(&f)?;
    let separation_ok = n == 1 || (!separation.hausdorff && !separation.regular);
    let ok = axioms.holds() && homeomorphic && projection.all_certified() && separation_ok;
    if cli.json {
        print_json(&json!({
            "group": group.name(),
            "base": t_g.base_sets(),
            "opens": if show_opens { t_g.opens() } else { None },
            "open_count": t_g.open_count(),
            "axioms": axioms,
            "separation": separation,
            "homeomorphic": homeomorphic,
            "projection": projection,
        }))?;
        return Ok(verdict(ok));
    }
    println!("tau_c({}) pulled back from C{n}", group.name());
    for (d, b) in t_g.base_labels().iter().zip(t_g.base_sets()) {
        println!("  f^-1(C{n},{d}) = {b:?}");
    }
    match t_g.open_count() {
        Some(c) => println!("  opens: {c}"),
        None => println!("  opens: not materialized ({} base sets)", t_g.base_labels().len()),
    }
    if show_opens {
        for o in t_g.opens().unwrap_or_default() {
            println!("    {o:?}");
        }
    }
    match &axioms.failure {
        None => println!("  axioms: hold ({} pairs checked)", axioms.pairs_checked),
        Some(e) => println!("  axioms: FAIL {e}"),
    }
    println!(
        "  countable base: {}, hausdorff: {}, regular: {}",
        separation.countable_base, separation.hausdorff, separation.regular
    );
    println!("  homeomorphic to tau(C{n}): {homeomorphic}");
    for row in &projection.rows {
        let moduli: Vec<String> = row.preimage.moduli().iter().map(|m| format!("{m}Z")).collect();
        println!(
            "  theta^-1(f^-1(C{n},{})) = {} {}",
            row.d,
            moduli.join(" u "),
            if row.certified { "certified" } else { "NOT CERTIFIED" }
        );
    }
    Ok(verdict(ok))
}

fn show(cli: &Cli, name: &str) -> Result<Verdict> {
    let group = resolve(cli, name)?;
    let normals = normal_subgroups_with_cap(&group, DEFAULT_LATTICE_CAP)?;
    let predicates = structural_predicates(&group, &normals);
    let orders = OrderMultiset::of_group(&group);
    let classes = conjugacy_classes(&group).len();
    if cli.json {
        print_json(&json!({
            "group": group.name(),
            "order": group.order(),
            "exponent": group.exponent(),
            "source": group.source(),
            "generators": group.generators(),
            "element_orders": orders,
            "conjugacy_classes": classes,
            "normal_subgroups": normals.len(),
            "is_cyclic": group.is_cyclic(),
            "predicates": predicates,
        }))?;
        return Ok(Verdict::Verified);
    }
    println!("{} (order {}, exponent {})", group.name(), group.order(), group.exponent());
    let gens: Vec<String> = group.generators().iter().map(|&x| label(&group, x)).collect();
    println!("  generators: {}", gens.join(", "));
    let counts: Vec<String> = orders.counts.iter().map(|(o, c)| format!("{o}:{c}")).collect();
    println!("  element orders: {}", counts.join(" "));
    println!("  conjugacy classes: {classes}");
    println!("  normal subgroups: {}", normals.len());
    println!(
        "  cyclic: {}, abelian: {}, solvable: {}, simple: {}, semisimple: {}",
        group.is_cyclic(),
        predicates.is_abelian,
        predicates.is_solvable,
        predicates.is_simple,
        predicates.is_semisimple
    );
    Ok(Verdict::Verified)
}
