use critnet::coherent::DEFAULT_KAPPA;
use critnet::dynamics::{
    default_time_grid, ground_peak_fraction, recall_exact, recall_meanfield, RecallOptions, RecallRun,
};
use critnet::fock::{required_cap, COHERENT_TAIL_BOUND};
use critnet::presets::{matrix_g, matrix_g_excitations};
use critnet::{
    decoherence_bound, entropy_estimate, enumerate_patterns, gap_between, pack_patterns, parse_model, pattern_count,
    recall_fidelity, search_critical_splits, solve_critical_split, thermalization_time, write_model, BigRational,
    BigUint, CriticalSolution, EnumerateOptions, Error, Initial, InputPattern, NetworkModel, PackOptions, Scalar,
    SolveOptions,
};
use serde_json::{json, Value};

use crate::config::{Engine, Params, Start, Task};
use crate::report::{cell, labels, num, nums, CliError, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub dimension: u128,
    pub enumeration: u128,
}

pub struct Output {
    pub report: Value,
    pub table: Option<Table>,
}

pub fn run(task: Task, params: &Params, limits: &Limits) -> Result<Output, CliError> {
    match task {
        Task::Analyze if params.exact == Some(true) => analyze::<BigRational>(params, limits),
        Task::Analyze => analyze::<f64>(params, limits),
        Task::Evolve => evolve(params, limits),
        Task::Compare => compare(params, limits),
        Task::Pack => pack(params),
        Task::PaperExample => paper_example(limits),
    }
}

fn required<T: Copy>(value: Option<T>, flag: &'static str, task: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::validation("missing_argument", format!("{task} needs --{flag}")))
}

/// Decimal text of an `f64`, read exactly by rational models.
fn decimal<T: Scalar>(x: f64, what: &str) -> Result<T, CliError> {
    if !x.is_finite() {
        return Err(CliError::validation("invalid", format!("{what} must be finite")));
    }
    T::parse_literal(&x.to_string()).ok_or_else(|| CliError::validation("invalid", format!("cannot read {what} {x}")))
}

fn zero_based(list: &[usize], n: usize, what: &str) -> Result<Vec<usize>, CliError> {
    let mut out = Vec::with_capacity(list.len());
    for &label in list {
        if label == 0 || label > n {
            return Err(CliError::validation("invalid", format!("{what} neuron {label} outside 1..={n}")));
        }
        if out.contains(&(label - 1)) {
            return Err(CliError::validation("invalid", format!("{what} neuron {label} listed twice")));
        }
        out.push(label - 1);
    }
    Ok(out)
}

fn load_model<T: Scalar>(p: &Params) -> Result<NetworkModel<T>, CliError> {
    let sources = [p.model.is_some(), p.inline_model.is_some(), p.uniform.is_some()];
    if sources.iter().filter(|s| **s).count() != 1 {
        return Err(CliError::validation(
            "model_source",
            "give exactly one model: --model, --uniform or an inline model in the scenario",
        ));
    }
    let mut model = if let Some(path) = &p.model {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation("model_file", format!("cannot read {}: {e}", path.display())))?;
        parse_model::<T>(&text)?
    } else if let Some(file) = &p.inline_model {
        file.to_model::<T>()?
    } else {
        let n = p.uniform.unwrap_or_default();
        let g = required(p.g, "g", "--uniform")?;
        NetworkModel::uniform(n, decimal(g, "g")?)?
    };
    if p.q.is_some() || p.input_gap.is_some() {
        let existing = model.input_layer().cloned();
        let q = match (p.q, &existing) {
            (Some(q), _) => decimal(q, "q")?,
            (None, Some(layer)) => layer.coupling.clone(),
            (None, None) => return Err(CliError::validation("missing_argument", "--input-gap needs --q")),
        };
        let gap = match (p.input_gap, existing) {
            (Some(x), _) => decimal(x, "input gap")?,
            (None, Some(layer)) => layer.input_gap,
            (None, None) => T::of(0.0),
        };
        model = model.with_input_layer(q, gap)?;
    }
    Ok(model)
}

fn model_summary<T: Scalar>(model: &NetworkModel<T>) -> Value {
    let f = |v: &[T]| v.iter().map(|x| x.as_f64()).collect::<Vec<_>>();
    json!({
        "n": model.n(),
        "thresholds": nums(&f(model.thresholds())),
        "weights": model.weights().iter().map(|row| nums(&f(row))).collect::<Vec<_>>(),
        "input_layer": model.input_layer().map(|l| json!({
            "q": num(l.coupling.as_f64()),
            "input_gap": num(l.input_gap.as_f64()),
        })),
    })
}

/// `g` when every threshold is 1 and every coupling is the same `g/2`.
fn uniform_coupling<T: Scalar>(model: &NetworkModel<T>) -> Option<f64> {
    let n = model.n();
    if n < 2 || model.thresholds().iter().any(|e| e.as_f64() != 1.0) {
        return None;
    }
    let w = model.weight(0, 1).clone();
    let same = (0..n).all(|j| (0..n).all(|k| j == k || *model.weight(j, k) == w));
    same.then(|| 2.0 * w.as_f64())
}

fn exact_strings<T: Scalar>(values: &[T]) -> Value {
    json!(values.iter().map(|v| v.to_string()).collect::<Vec<_>>())
}

fn capacity_phrase(m: usize) -> String {
    format!("(d+1)^{m} patterns for gapless set of size {m}")
}

fn analyze<T: Scalar>(p: &Params, limits: &Limits) -> Result<Output, CliError> {
    let model = load_model::<T>(p)?;
    if let Some(path) = &p.write_model {
        std::fs::write(path, write_model(&model)).map_err(|e| CliError::io(path, e))?;
    }
    let n = model.n();
    let options = SolveOptions { integer: p.integer.unwrap_or(false), ..SolveOptions::default() };
    let solutions = match &p.gapless {
        Some(list) => vec![solve_critical_split(&model, &zero_based(list, n, "gapless")?, &options)?],
        None => {
            let max_excited = p.max_excited.unwrap_or(3.min(n.saturating_sub(1)));
            search_critical_splits(&model, max_excited, &options)?
        }
    };
    let levels = p.levels.unwrap_or(1);
    let budget = p.budget.map(|b| decimal::<T>(b, "budget")).transpose()?;

    let mut table = Table::new(
        "analyze",
        ["excited", "gapless", "residual", "degeneracy", "closed_form", "count"].map(String::from).to_vec(),
    );
    let mut splits = Vec::with_capacity(solutions.len());
    for s in &solutions {
        let m = s.gapless.len();
        let closed_form = pattern_count(m, levels);
        let mut capacity = json!({
            "levels": levels,
            "closed_form": closed_form.to_string(),
            "formula": capacity_phrase(m),
        });
        let mut count = String::new();
        if let Some(budget) = &budget {
            let opts = EnumerateOptions { limit: limits.enumeration, ..EnumerateOptions::default() };
            let library = enumerate_patterns(&model, s, levels, budget.clone(), &opts)?;
            count = library.count.as_ref().map(BigUint::to_string).unwrap_or_default();
            capacity["budget"] = num(budget.as_f64());
            capacity["count"] = json!(count);
            capacity["bound_holds"] = json!(library.bound_holds);
        }
        let mut entry = json!({
            "excited": labels(&s.excited),
            "gapless": labels(&s.gapless),
            "xi": nums(&s.xi.iter().map(Scalar::as_f64).collect::<Vec<_>>()),
            "residual": num(s.residual.as_f64()),
            "degeneracy": s.degeneracy,
            "effective_gaps": nums(&s.effective_gaps.iter().map(Scalar::as_f64).collect::<Vec<_>>()),
            "excited_gaps": nums(&s.excited_gaps.iter().map(Scalar::as_f64).collect::<Vec<_>>()),
            "capacity": capacity,
        });
        if T::is_exact() {
            entry["xi_exact"] = exact_strings(&s.xi);
            entry["effective_gaps_exact"] = exact_strings(&s.effective_gaps);
            entry["excited_gaps_exact"] = exact_strings(&s.excited_gaps);
        }
        splits.push(entry);
        let join = |v: &[usize]| v.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(" ");
        table.rows.push(vec![
            join(&s.excited),
            join(&s.gapless),
            cell(s.residual.as_f64()),
            s.degeneracy.to_string(),
            closed_form.to_string(),
            count,
        ]);
    }

    let mut report = json!({
        "task": "analyze",
        "arithmetic": if T::is_exact() { "exact" } else { "f64" },
        "model": model_summary(&model),
        "splits": splits,
    });
    if let Some(g) = uniform_coupling(&model) {
        let mut estimates = json!({
            "g": num(g),
            "entropy_per_neuron": num(entropy_estimate(g)?),
            "decoherence_at_critical_occupation": num(decoherence_bound(g, 1.0 / g)?),
        });
        if let Some(temperature) = p.temperature {
            estimates["thermalization_time"] = num(thermalization_time(g, temperature)?);
        }
        report["estimates"] = estimates;
    }
    Ok(Output { report, table: Some(table) })
}

struct Dynamics {
    model: NetworkModel<f64>,
    q: f64,
    stimulus: InputPattern<f64>,
    times: Vec<f64>,
    engine: Engine,
    options: RecallOptions,
}

fn dynamics_setup(p: &Params, limits: &Limits, task: &str, default_points: usize) -> Result<Dynamics, CliError> {
    let model = load_model::<f64>(p)?;
    let q = model
        .input_layer()
        .map(|l| l.coupling)
        .ok_or_else(|| CliError::validation("missing_argument", format!("{task} needs --q or a model input layer")))?;
    let values = p
        .stimulus
        .clone()
        .ok_or_else(|| CliError::validation("missing_argument", format!("{task} needs --stimulus")))?;
    let stimulus = InputPattern::for_model(&model, values)?;
    let points = p.points.unwrap_or(default_points);
    let times = match p.t_end {
        Some(t_end) => {
            if !(t_end > 0.0 && t_end.is_finite()) || points < 2 {
                return Err(CliError::validation("invalid", "--t-end must be positive and --points at least 2"));
            }
            let mut times: Vec<f64> = (0..points).map(|i| t_end * i as f64 / (points - 1) as f64).collect();
            times[points - 1] = t_end;
            times
        }
        None if q > 0.0 => default_time_grid(q, points)?,
        None => return Err(CliError::validation("missing_argument", "q = 0 needs an explicit --t-end")),
    };
    let largest = stimulus.values().iter().cloned().fold(0.0, f64::max);
    let cap = p.cap.unwrap_or_else(|| required_cap(largest, COHERENT_TAIL_BOUND).max(6));
    let options = RecallOptions { cap, dimension_limit: limits.dimension, ..RecallOptions::default() };
    Ok(Dynamics { model, q, stimulus, times, engine: p.engine.unwrap_or(Engine::Exact), options })
}

fn initial_state(
    model: &NetworkModel<f64>,
    start: Start,
    excited: Option<&[usize]>,
) -> Result<Initial<f64>, CliError> {
    let n = model.n();
    match (start, excited) {
        (Start::Ground, Some(_)) => Err(CliError::validation("invalid", "--excited needs --initial critical")),
        (Start::Ground, None) => Ok(Initial::Ground),
        (Start::Critical, Some(list)) => {
            let excited = zero_based(list, n, "excited")?;
            let gapless: Vec<usize> = (0..n).filter(|j| !excited.contains(j)).collect();
            Ok(Initial::Critical(solve_critical_split(model, &gapless, &SolveOptions::default())?))
        }
        (Start::Critical, None) => {
            let found = search_critical_splits(model, 1, &SolveOptions::default())?;
            found.into_iter().next().map(Initial::Critical).ok_or_else(|| CliError {
                class: critnet::ErrorClass::Numerical,
                code: "infeasible",
                message: "no split with one excited neuron closes the other gaps; pass --excited".into(),
            })
        }
    }
}

fn simulate(d: &Dynamics, initial: &Initial<f64>, stimulus: &InputPattern<f64>) -> Result<RecallRun<f64>, Error> {
    match d.engine {
        Engine::Exact => recall_exact(&d.model, initial, stimulus, &d.times, &d.options),
        Engine::Meanfield => recall_meanfield(&d.model, initial, stimulus, &d.times, &d.options),
    }
}

fn fidelities(run: &RecallRun<f64>) -> Result<Vec<f64>, CliError> {
    (0..run.result.len()).map(|i| Ok(recall_fidelity(&run.response(i), &run.stimulus)?)).collect()
}

fn peaks(run: &RecallRun<f64>) -> Vec<f64> {
    (0..run.result.len()).fold(vec![0.0; run.n], |acc, i| {
        acc.iter().zip(run.response(i)).map(|(a, y)| a.max(y)).collect()
    })
}

fn solution_of(initial: &Initial<f64>) -> Option<&CriticalSolution<f64>> {
    match initial {
        Initial::Critical(s) => Some(s),
        Initial::Ground => None,
    }
}

fn engine_name(engine: Engine) -> &'static str {
    match engine {
        Engine::Exact => "exact",
        Engine::Meanfield => "meanfield",
    }
}

fn run_summary(d: &Dynamics, run: &RecallRun<f64>) -> Value {
    let drift = run.result.norm_drift.iter().cloned().fold(0.0, f64::max);
    let mut out = json!({
        "engine": engine_name(d.engine),
        "simulated": labels(&run.active),
        "max_norm_drift": num(drift),
        "steps": run.result.steps,
    });
    if d.engine == Engine::Exact {
        out["cap"] = json!(d.options.cap);
    }
    out
}

fn evolve(p: &Params, limits: &Limits) -> Result<Output, CliError> {
    let d = dynamics_setup(p, limits, "evolve", 64)?;
    let start = p.initial.unwrap_or(Start::Critical);
    let initial = initial_state(&d.model, start, p.excited.as_deref())?;
    let run = simulate(&d, &initial, &d.stimulus)?;
    let fidelity = fidelities(&run)?;
    let n = run.n;

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("Y_{j}")));
    header.extend((1..=n).map(|j| format!("X_{j}")));
    header.extend(["norm_drift".to_string(), "fidelity".to_string()]);
    let mut table = Table::new("evolve", header);
    for (i, f) in fidelity.iter().enumerate() {
        let mut row = vec![run.result.times[i]];
        row.extend(run.y_full(i));
        row.extend(run.x_full(i));
        row.extend([run.result.norm_drift[i], *f]);
        table.push_floats(&row);
    }

    let mut report = json!({
        "task": "evolve",
        "initial": match start { Start::Critical => "critical", Start::Ground => "ground" },
        "model": model_summary(&d.model),
        "stimulus": nums(run.stimulus.values()),
        "samples": run.result.len(),
        "t_end": num(*d.times.last().unwrap_or(&0.0)),
        "peak_response": nums(&peaks(&run)),
        "final_fidelity": num(*fidelity.last().unwrap_or(&0.0)),
        "max_fidelity": num(fidelity.iter().cloned().fold(0.0, f64::max)),
        "run": run_summary(&d, &run),
    });
    if let Some(s) = solution_of(&initial) {
        report["excited"] = labels(&s.excited);
        report["xi"] = nums(&s.xi);
    }
    Ok(Output { report, table: Some(table) })
}

fn compare(p: &Params, limits: &Limits) -> Result<Output, CliError> {
    if p.initial.is_some() {
        return Err(CliError::validation("invalid", "compare always runs both initial states; drop --initial"));
    }
    let d = dynamics_setup(p, limits, "compare", 1025)?;
    let critical = initial_state(&d.model, Start::Critical, p.excited.as_deref())?;
    let crit_run = simulate(&d, &critical, &d.stimulus)?;
    let ground_run = simulate(&d, &Initial::Ground, &crit_run.stimulus)?;
    let (crit_fid, ground_fid) = (fidelities(&crit_run)?, fidelities(&ground_run)?);
    let n = crit_run.n;

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|j| format!("Y_critical_{j}")));
    header.extend((1..=n).map(|j| format!("Y_ground_{j}")));
    header.extend(["fidelity_critical".to_string(), "fidelity_ground".to_string()]);
    let mut table = Table::new("compare", header);
    for i in 0..crit_run.result.len() {
        let mut row = vec![crit_run.result.times[i]];
        row.extend(crit_run.y_full(i));
        row.extend(ground_run.y_full(i));
        row.extend([crit_fid[i], ground_fid[i]]);
        table.push_floats(&row);
    }

    let (crit_peak, ground_peak) = (peaks(&crit_run), peaks(&ground_run));
    let mut per_neuron = Vec::new();
    let mut ratios = Vec::new();
    for j in 0..n {
        if crit_run.stimulus.values()[j] > 0.0 && crit_peak[j] > 0.0 {
            let ratio = ground_peak[j] / crit_peak[j];
            ratios.push(ratio);
            per_neuron.push(json!({
                "neuron": j + 1,
                "peak_critical": num(crit_peak[j]),
                "peak_ground": num(ground_peak[j]),
                "ratio": num(ratio),
            }));
        }
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    let s = solution_of(&critical).expect("critical initial state");
    let report = json!({
        "task": "compare",
        "model": model_summary(&d.model),
        "excited": labels(&s.excited),
        "xi": nums(&s.xi),
        "stimulus": nums(crit_run.stimulus.values()),
        "samples": crit_run.result.len(),
        "t_end": num(*d.times.last().unwrap_or(&0.0)),
        "peak_ratio": num(mean),
        "peaks": per_neuron,
        "uniform_prediction": num(ground_peak_fraction(d.q)),
        "final_fidelity_critical": num(*crit_fid.last().unwrap_or(&0.0)),
        "final_fidelity_ground": num(*ground_fid.last().unwrap_or(&0.0)),
        "run_critical": run_summary(&d, &crit_run),
        "run_ground": run_summary(&d, &ground_run),
    });
    Ok(Output { report, table: Some(table) })
}

/// Decimal logarithm of a big count.
fn log10(count: &BigUint) -> f64 {
    let digits = count.to_string();
    let lead = &digits[..digits.len().min(15)];
    let mantissa: f64 = lead.parse().unwrap_or(0.0);
    mantissa.log10() + (digits.len() - lead.len()) as f64
}

fn pack(p: &Params) -> Result<Output, CliError> {
    let g = required(p.g, "g", "pack")?;
    let modes = required(p.modes, "modes", "pack")?;
    let budget = required(p.budget, "budget", "pack")?;
    let threshold = p.threshold.unwrap_or(1.0);
    let options = PackOptions { kappa: p.kappa.unwrap_or(DEFAULT_KAPPA), sample_limit: p.samples.unwrap_or(16) };
    let packing = pack_patterns(g, modes, budget, threshold, &options)?;
    let samples: Vec<Value> = packing
        .samples
        .iter()
        .map(|s| json!(s.alphas().iter().map(|a| nums(&[a.re, a.im])).collect::<Vec<_>>()))
        .collect();
    let report = json!({
        "task": "pack",
        "g": num(g),
        "modes": modes,
        "budget": num(budget),
        "threshold": num(threshold),
        "kappa": num(options.kappa),
        "count": packing.count.to_string(),
        "count_log10": num(log10(&packing.count)),
        "pitch": num(packing.pitch),
        "total_level": packing.total_level,
        "mode_level": packing.mode_level,
        "sample_patterns": samples,
    });

    let mut table = Table::new(
        "pack",
        ["g", "count", "count_log10", "total_level", "mode_level"].map(String::from).to_vec(),
    );
    for &gs in p.sweep.as_deref().unwrap_or(&[g]) {
        let point = pack_patterns(gs, modes, budget, threshold, &PackOptions { sample_limit: 0, ..options })?;
        table.rows.push(vec![
            cell(gs),
            point.count.to_string(),
            cell(log10(&point.count)),
            point.total_level.to_string(),
            point.mode_level.to_string(),
        ]);
    }
    Ok(Output { report, table: Some(table) })
}

/// Top levels shown in the capacity table of the bundled example.
const EXAMPLE_LEVELS: [u32; 6] = [1, 10, 100, 1_000, 10_000, 100_000];

fn paper_example(limits: &Limits) -> Result<Output, CliError> {
    let model = matrix_g::<BigRational>();
    let gapless = [3, 4, 5];
    let s = solve_critical_split(&model, &gapless, &SolveOptions::default())?;
    let expected = matrix_g_excitations::<BigRational>();
    let f = |v: &[BigRational]| v.iter().map(Scalar::as_f64).collect::<Vec<_>>();

    let mut table = Table::new("paper-example", ["d", "closed_form", "top_gap"].map(String::from).to_vec());
    let mut levels = Vec::new();
    for d in EXAMPLE_LEVELS {
        let top = gap_between(&model, &s, &vec![BigRational::of(d as f64); gapless.len()])?;
        let closed_form = pattern_count(gapless.len(), d);
        levels.push(json!({
            "d": d,
            "closed_form": closed_form.to_string(),
            "top_gap": num(top.as_f64()),
            "top_gap_exact": top.to_string(),
        }));
        table.rows.push(vec![d.to_string(), closed_form.to_string(), cell(top.as_f64())]);
    }

    let unit = gap_between(&model, &s, &vec![BigRational::of(1.0); gapless.len()])?;
    let opts = EnumerateOptions { limit: limits.enumeration, keep_patterns: true, ..EnumerateOptions::default() };
    let library = enumerate_patterns(&model, &s, 1, unit.clone(), &opts)?;
    let patterns = library.patterns.clone().unwrap_or_default();

    let report = json!({
        "task": "paper-example",
        "model": model_summary(&model),
        "excited": labels(&s.excited),
        "gapless": labels(&s.gapless),
        "xi": nums(&f(&s.xi)),
        "xi_exact": exact_strings(&s.xi),
        "xi_matches_reference": s.xi == expected,
        "residual_exact": s.residual.to_string(),
        "effective_gaps": nums(&f(&s.effective_gaps)),
        "effective_gaps_exact": exact_strings(&s.effective_gaps),
        "excited_gaps": nums(&f(&s.excited_gaps)),
        "capacity": capacity_phrase(gapless.len()),
        "levels": levels,
        "unit_patterns": {
            "budget": num(unit.as_f64()),
            "budget_exact": unit.to_string(),
            "count": library.count.map(|c| c.to_string()),
            "patterns": patterns,
        },
    });
    Ok(Output { report, table: Some(table) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log10_of_big_counts() {
        assert_eq!(log10(&BigUint::from(1000u32)), 3.0);
        let big = num_pow(10, 40) * BigUint::from(2u32);
        assert!((log10(&big) - (40.0 + 2f64.log10())).abs() < 1e-12);
    }

    fn num_pow(base: u32, exp: u32) -> BigUint {
        (0..exp).fold(BigUint::from(1u32), |acc, _| acc * base)
    }

    #[test]
    fn labels_are_one_based() {
        assert_eq!(zero_based(&[1, 3], 3, "x").unwrap(), vec![0, 2]);
        assert!(zero_based(&[0], 3, "x").is_err());
        assert!(zero_based(&[4], 3, "x").is_err());
        assert!(zero_based(&[2, 2], 3, "x").is_err());
    }

    #[test]
    fn uniform_coupling_is_recognized() {
        let model = NetworkModel::<f64>::uniform(4, 0.01).unwrap();
        assert_eq!(uniform_coupling(&model), Some(0.01));
        let g = matrix_g::<f64>();
        assert_eq!(uniform_coupling(&g), None);
    }
}
