use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use crnbal_core::balance::{
    check_mcdb, check_rndb, classify, classify_cycle, enumerate_cycle_types, equilibrium_from_ratios,
    find_base_state, mcdb_analysis, wsdb_holds, GeneratorDecision, GeneratorKind, McdbConfig,
};
use crnbal_core::parser::{parse_rates, parse_rational};
use crnbal_core::stochastic::{
    check_complex_balance, check_complex_balance_exact, find_positive_steady_state, simulate_with,
    stationary_anderson, stationary_birth_death, stationary_rndb, Distribution, StochasticError,
};
use crnbal_core::{parse_network, RateAssignment, ReactionNetwork, State};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::output::{rationals, read, vector, write_atomic, write_to, yes_no};
use crate::{
    AnalyzeArgs, CheckArgs, CyclesArgs, Format, Input, Method, Outcome, Requirement, SimulateArgs,
    StationaryArgs,
};

const EQUIVALENT: &str = "RNDB ⟺ MCDB";
const IMPLIES: &str = "RNDB ⟹ MCDB";

fn load(input: &Input) -> Result<(ReactionNetwork, RateAssignment)> {
    let path = &input.network;
    let text = read(path)?;
    let (net, rates) = parse_network(&text).with_context(|| format!("parsing {}", path.display()))?;
    let rates = match &input.rates {
        Some(p) => {
            let extra = parse_rates(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            let labels = net.label_order();
            if let Some((unknown, _)) = extra.iter().find(|(l, _)| !labels.contains(l)) {
                bail!("{}: rate label `{unknown}` is not used by the network", p.display());
            }
            rates.overridden_by(&extra)
        }
        None => rates,
    };
    Ok((net, rates))
}

fn parse_init(text: Option<&str>, net: &ReactionNetwork) -> Result<State> {
    let s = net.num_species();
    let Some(text) = text else {
        return Ok(vec![0; s]);
    };
    let values: Vec<i64> = text
        .split(',')
        .map(|v| v.trim().parse::<i64>().with_context(|| format!("bad population `{v}`")))
        .collect::<Result<_>>()?;
    if values.len() != s || values.iter().any(|&x| x < 0) {
        bail!(
            "--init needs {s} nonnegative populations ({}), got `{text}`",
            net.species_names().join(", ")
        );
    }
    Ok(values)
}

/// Writes the report to `--out` (atomically) or stdout.
fn emit(out: Option<&std::path::Path>, text: &str) -> Result<()> {
    write_to(out, |w| w.write_all(text.as_bytes()))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn class_label(net: &ReactionNetwork, idx: usize) -> String {
    let c = &net.classes()[idx];
    let pairs: Vec<String> = c
        .forward_labels
        .iter()
        .zip(&c.backward_labels)
        .map(|(f, b)| format!("{f}/{b}"))
        .collect();
    format!("u{idx} = {}  r = {}  {}", vector(&c.u), c.r(), pairs.join(", "))
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Outcome> {
    let (net, _) = load(&args.input)?;
    let classification = classify(&net);
    let config = McdbConfig {
        max_len: args.max_cycle_len,
        seed: args.seed,
        ..McdbConfig::default()
    };
    let report = mcdb_analysis(&net, &config)?;
    let verdict = if report.rndb == report.mcdb { EQUIVALENT } else { IMPLIES };
    let order = net.label_order();

    let text = match args.input.format {
        Format::Json => {
            let classes: Vec<Value> = net
                .classes()
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    json!({
                        "index": i,
                        "u": c.u,
                        "r": c.r(),
                        "reactants": c.reactants,
                        "forward_labels": c.forward_labels,
                        "backward_labels": c.backward_labels,
                    })
                })
                .collect();
            let cycles: Vec<Value> = report
                .cycles
                .iter()
                .map(|c| json!({"steps": c.describe(), "length": c.len(), "base": c.base}))
                .collect();
            json_text(&json!({
                "species": net.species_names(),
                "classes": classes,
                "classification": classification,
                "rndb": report.rndb,
                "mcdb": report.mcdb,
                "generators": report.verdicts,
                "max_cycle_len": args.max_cycle_len,
                "cycle_types": report.cycles.len(),
                "cycles": cycles,
                "seed": args.seed,
                "verdict": verdict,
            }))
        }
        Format::Text => {
            let mut t = String::new();
            writeln!(t, "species: {}", net.species_names().join(", "))?;
            writeln!(t, "reaction pairs: {}", net.reactions().len())?;
            writeln!(t, "reaction vectors: {}", net.classes().len())?;
            for i in 0..net.classes().len() {
                writeln!(t, "  {}", class_label(&net, i))?;
            }
            writeln!(t, "classification:")?;
            writeln!(
                t,
                "  one reaction per vector: {}",
                yes_no(classification.single_reaction_per_vector)
            )?;
            writeln!(t, "  single reaction vector (birth-death): {}", yes_no(classification.birth_death))?;
            writeln!(
                t,
                "  MCDB for all rates (verified on box of width {}): {}",
                classification.box_width,
                yes_no(classification.unconditional_mcdb)
            )?;
            let gap: Vec<String> = classification
                .strict_gap_classes
                .iter()
                .map(|i| format!("u{i}"))
                .collect();
            writeln!(
                t,
                "  vectors whose ratio conditions MCDB does not need: {}",
                if gap.is_empty() { "none".into() } else { gap.join(", ") }
            )?;
            for (name, system) in [("RNDB", &report.rndb), ("MCDB", &report.mcdb)] {
                writeln!(t, "{name} holds when:")?;
                if system.is_empty() {
                    writeln!(t, "  (no conditions)")?;
                }
                for c in system.constraints() {
                    writeln!(t, "  {}", c.product_form(&order))?;
                }
            }
            writeln!(t, "RNDB generators:")?;
            for v in &report.verdicts {
                let kind = match v.generator.kind {
                    GeneratorKind::Ratio => "ratio",
                    GeneratorKind::Circuit => "circuit",
                };
                let decision = match &v.decision {
                    GeneratorDecision::Necessary { cycle, state, value } => {
                        format!("needed: cycle {cycle} at {} gives {value}", vector(state))
                    }
                    GeneratorDecision::NoWitnessCycle => "dropped: no cycle uses all its labels".into(),
                    GeneratorDecision::NotForced => "dropped: violating it never broke a cycle".into(),
                };
                writeln!(t, "  [{kind}] {}  {decision}", v.relation)?;
            }
            writeln!(
                t,
                "cycle types (length <= {}): {}",
                args.max_cycle_len,
                report.cycles.len()
            )?;
            writeln!(t, "verdict: {verdict}")?;
            t
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(Outcome::Success)
}

fn box_states(s: usize, width: i64) -> Vec<State> {
    let mut out = vec![Vec::new()];
    for _ in 0..s {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (0..=width).map(move |x| {
                    let mut q = p.clone();
                    q.push(x);
                    q
                })
            })
            .collect();
    }
    out
}

pub fn check(args: &CheckArgs) -> Result<Outcome> {
    let (net, rates) = load(&args.input)?;
    rates.require_complete(&net)?;
    let config = McdbConfig {
        max_len: args.max_cycle_len,
        seed: args.seed,
        ..McdbConfig::default()
    };
    let rndb = check_rndb(&net, &rates)?;
    let order = net.label_order();
    let violated: Vec<String> = crnbal_core::balance::rndb_constraints(&net)
        .constraints()
        .iter()
        .filter(|c| c.holds(rates.lookup()) == Some(false))
        .map(|c| c.product_form(&order))
        .collect();
    let mcdb = check_mcdb(&net, &rates, &config)?;
    let n_cycles = enumerate_cycle_types(&net, args.max_cycle_len).len();
    let equilibrium = equilibrium_from_ratios(&net, &rates)?;
    let states = box_states(net.num_species(), net.max_degree() + 2);
    let wsdb = wsdb_holds(&net, &rates, &states)?;

    // complex balance at the product-form equilibrium when it is rational,
    // otherwise at a numerically located steady state
    let (complex, complex_at, complex_exact) = match equilibrium.as_ref().and_then(|e| e.as_rational()) {
        Some(x) => (check_complex_balance_exact(&net, &rates, &x)?, rationals(&x), true),
        None => {
            let x0 = vec![1.0; net.num_species()];
            match find_positive_steady_state(&net, &rates, &x0, 1e-9, 200) {
                Ok(x) => {
                    let shown: Vec<String> = x.iter().map(|v| format!("{v:.6}")).collect();
                    (
                        check_complex_balance(&net, &rates, &x, 1e-9)?,
                        format!("({})", shown.join(", ")),
                        false,
                    )
                }
                Err(_) => (false, "no steady state found".into(), false),
            }
        }
    };
    let required = match args.require {
        Requirement::Rndb => rndb,
        Requirement::Mcdb => mcdb,
        Requirement::Wsdb => wsdb,
        Requirement::ComplexBalance => complex,
    };
    let equilibrium_text = equilibrium.as_ref().map(|e| match e.as_rational() {
        Some(x) => rationals(&x),
        None => format!("(x*)^{} = {}", e.root, rationals(&e.power)),
    });

    let text = match args.input.format {
        Format::Json => json_text(&json!({
            "rndb": rndb,
            "rndb_violated": violated,
            "mcdb": mcdb,
            "mcdb_cycle_types": n_cycles,
            "mcdb_states_per_cycle": config.n_states,
            "wsdb": wsdb,
            "equilibrium": equilibrium_text,
            "complex_balanced": complex,
            "complex_balance_point": complex_at,
            "complex_balance_exact": complex_exact,
            "required": format!("{:?}", args.require).to_lowercase(),
            "passed": required,
        })),
        Format::Text => {
            let mut t = String::new();
            writeln!(t, "RNDB: {}", if rndb { "holds" } else { "fails" })?;
            for v in &violated {
                writeln!(t, "  violated: {v}")?;
            }
            writeln!(
                t,
                "MCDB: {} ({n_cycles} cycle types up to length {}, {} states each)",
                if mcdb { "holds" } else { "fails" },
                args.max_cycle_len,
                config.n_states
            )?;
            match &equilibrium_text {
                Some(x) if wsdb => writeln!(t, "product-form detailed balance: holds at x* = {x}")?,
                _ => writeln!(t, "product-form detailed balance: fails")?,
            }
            writeln!(
                t,
                "complex balance at {complex_at}{}: {}",
                if complex_exact { "" } else { " (numeric)" },
                yes_no(complex)
            )?;
            writeln!(
                t,
                "required {:?}: {}",
                args.require,
                if required { "pass" } else { "FAIL" }
            )?;
            t
        }
    };
    emit(args.out.as_deref(), &text)?;
    Ok(if required { Outcome::Success } else { Outcome::CheckFailed })
}

fn parse_point(text: &str) -> Result<Vec<BigRational>> {
    text.split(',')
        .map(|v| parse_rational(v.trim()).with_context(|| format!("bad coordinate `{v}`")))
        .collect()
}

pub fn stationary(args: &StationaryArgs) -> Result<Outcome> {
    let (net, rates) = load(&args.input)?;
    rates.require_complete(&net)?;
    let a0 = parse_init(args.init.as_deref(), &net)?;
    let method = match args.method {
        Method::Auto if check_rndb(&net, &rates)? => Method::Rndb,
        Method::Auto if net.num_species() == 1 && net.classes().len() == 1 => Method::BirthDeath,
        Method::Auto => {
            eprintln!("no closed-form stationary distribution: rates are not RNDB and the network is not a one-species birth-death chain");
            return Ok(Outcome::CheckFailed);
        }
        m => m,
    };
    let result: Result<Distribution, StochasticError> = match method {
        Method::Rndb => stationary_rndb(&net, &rates, &a0, args.cap),
        Method::BirthDeath => stationary_birth_death(&net, &rates, args.cap),
        Method::ProductForm => {
            let Some(x) = args.x_star.as_deref() else {
                bail!("--method product-form needs --x-star");
            };
            let x = parse_point(x)?;
            stationary_anderson(&net, &rates, &x, &a0, args.cap)
        }
        Method::Auto => unreachable!("resolved above"),
    };
    let dist = match result {
        Ok(d) => d,
        Err(e @ (StochasticError::NotDetailedBalanced | StochasticError::NotComplexBalanced)) => {
            eprintln!("{e}");
            return Ok(Outcome::CheckFailed);
        }
        Err(e) => return Err(e.into()),
    };
    write_to(args.out.as_deref(), |w| dist.write_csv(w, args.exact))?;
    if let Some(p) = &args.plot_data {
        write_atomic(p, |w| dist.write_plot_data(w))?;
    }

    let method_name = match method {
        Method::Rndb => "rndb",
        Method::BirthDeath => "birth-death",
        _ => "product-form",
    };
    let (maxima, minima) = if net.num_species() == 1 {
        (dist.local_maxima(), dist.local_minima())
    } else {
        (Vec::new(), Vec::new())
    };
    let summary = match args.input.format {
        Format::Json => json_text(&json!({
            "method": method_name,
            "states": dist.len(),
            "cap": args.cap,
            "tail_bound": dist.tail_bound,
            "local_maxima": maxima,
            "local_minima": minima,
        })),
        Format::Text => {
            let mut t = String::new();
            writeln!(t, "method: {method_name}")?;
            writeln!(t, "states: {} (cap {})", dist.len(), args.cap)?;
            writeln!(t, "tail bound: {:.3e}", dist.tail_bound)?;
            if net.num_species() == 1 {
                writeln!(t, "local maxima: {maxima:?}")?;
                writeln!(t, "local minima: {minima:?}")?;
            }
            t
        }
    };
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(Outcome::Success)
}

pub fn simulate(args: &SimulateArgs) -> Result<Outcome> {
    let (net, rates) = load(&args.input)?;
    rates.require_complete(&net)?;
    let a0 = parse_init(args.init.as_deref(), &net)?;
    if !(args.t_end > 0.0 && args.t_end.is_finite()) {
        bail!("--t-end must be positive");
    }
    let interval = Some(args.sample_interval.unwrap_or(args.t_end / 10_000.0));
    let mut rows = 0u64;
    let mut run = None;
    write_to(args.out.as_deref(), |w| {
        writeln!(w, "t,{}", net.species_names().join(","))?;
        let mut failure = None;
        let result = simulate_with(&net, &rates, &a0, args.t_end, args.seed, interval, args.burn_in, |t, a| {
            if failure.is_some() {
                return;
            }
            let cells: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            if let Err(e) = writeln!(w, "{t},{}", cells.join(",")) {
                failure = Some(e);
            }
            rows += 1;
        });
        if let Some(e) = failure {
            return Err(e);
        }
        run = Some(result);
        Ok(())
    })?;
    let run = run.expect("simulation ran")?;
    if let Some(p) = &args.occupation {
        write_atomic(p, |w| run.distribution.write_csv(w, false))?;
    }
    let summary = match args.input.format {
        Format::Json => json_text(&json!({
            "events": run.events,
            "absorbed": run.absorbed,
            "rows": rows,
            "t_end": args.t_end,
            "seed": run.seed,
            "rng": run.rng,
        })),
        Format::Text => {
            let mut t = format!(
                "{} jumps, {rows} rows, t_end {}, seed {} ({})\n",
                run.events, args.t_end, run.seed, run.rng
            );
            if run.absorbed {
                t.push_str("reached a state with no outgoing reactions; held there until t_end\n");
            }
            t
        }
    };
    if args.out.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(Outcome::Success)
}

pub fn cycles(args: &CyclesArgs) -> Result<Outcome> {
    let (net, _) = load(&args.input)?;
    let cycles = enumerate_cycle_types(&net, args.max_cycle_len);
    let mut entries = Vec::new();
    for c in &cycles {
        let base = find_base_state(&net, c)?;
        let flags = classify_cycle(&net, c);
        let labels: Vec<&str> = c.labels(&net).into_iter().collect();
        entries.push((c, base, flags, labels));
    }
    let text = match args.input.format {
        Format::Json => {
            let list: Vec<Value> = entries
                .iter()
                .map(|(c, base, flags, labels)| {
                    json!({
                        "steps": c.describe(),
                        "length": c.len(),
                        "base": base,
                        "irreducible": flags.irreducible,
                        "trivial": flags.trivial,
                        "labels": labels,
                    })
                })
                .collect();
            json_text(&json!({"max_cycle_len": args.max_cycle_len, "cycles": list}))
        }
        Format::Text => {
            let mut t = String::new();
            for i in 0..net.classes().len() {
                writeln!(t, "{}", class_label(&net, i))?;
            }
            writeln!(t, "{} cycle types up to length {}", cycles.len(), args.max_cycle_len)?;
            for (c, base, _, labels) in &entries {
                writeln!(t, "  {}  base {}  labels {}", c.describe(), vector(base), labels.join(" "))?;
            }
            t
        }
    };
    print!("{text}");
    Ok(Outcome::Success)
}
