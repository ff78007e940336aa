use std::fs;
use std::io::{BufRead, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use vigil_core::decompose::build_subgame;
use vigil_core::document::{canonical_json, print_world, subgame_document};
use vigil_core::runtime::{
    simulate, trace_record, verify_closed_loop, Adversary, AdversaryPolicy, Composition,
};
use vigil_core::solver::{
    extract_strategy, load_strategy, solve_subgame, strategy_file_name, zielonka, Arena, BeliefStrategy, Owner,
};
use vigil_core::{fixtures, parse_world, Loc, SurveillanceWorld, TriggerMode};

use crate::report::{SubgameReport, SubgameTiming, SynthesisReport, Timings};
use crate::{exit, Command, SessionArgs};

/// Reads a world file, falling back to a bundled fixture of that name.
pub fn load_world(arg: &str) -> Result<SurveillanceWorld> {
    let path = Path::new(arg);
    let text = if path.exists() {
        fs::read_to_string(path).with_context(|| format!("reading {arg}"))?
    } else if let Some(text) = fixtures::by_name(arg) {
        text.to_string()
    } else {
        bail!("no world file or bundled fixture named `{arg}`");
    };
    parse_world(&text).with_context(|| format!("world {arg}"))
}

/// Reads `strategy_<i>.json` for every subgame. Missing files are errors
/// unless `allow_partial`, in which case the entry is `None`.
pub fn load_strategies(
    world: &SurveillanceWorld,
    dir: &Path,
    allow_partial: bool,
) -> Result<Vec<Option<BeliefStrategy>>> {
    (0..world.partition().len())
        .map(|i| {
            let path = dir.join(strategy_file_name(i));
            match fs::read_to_string(&path) {
                Ok(text) => load_strategy(world, i, &text)
                    .map(Some)
                    .with_context(|| format!("strategy file {}", path.display())),
                Err(_) if allow_partial => Ok(None),
                Err(e) => Err(e).with_context(|| format!("reading {}", path.display())),
            }
        })
        .collect()
}

pub struct SynthesisOutput {
    pub report: SynthesisReport,
    pub timings: Timings,
}

/// Solves the selected subgames (all if `only` is `None`) on a pool of
/// `jobs` threads, handing each strategy to `sink` (with its 0-based
/// subgame index) as soon as it is solved. Report rows are ordered by
/// subgame whatever the pool size.
pub fn synthesize(
    world: &SurveillanceWorld,
    only: Option<usize>,
    mode: TriggerMode,
    cap: usize,
    jobs: usize,
    sink: &(dyn Fn(usize, &BeliefStrategy) -> Result<()> + Sync),
) -> Result<SynthesisOutput> {
    let n = world.partition().len();
    let selected: Vec<usize> = match only {
        Some(i) if (1..=n).contains(&i) => vec![i - 1],
        Some(i) => bail!("no subgame {i}: the world has {n}"),
        None => (0..n).collect(),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
    let start = Instant::now();
    let solved: Vec<Result<(SubgameReport, SubgameTiming)>> = pool.install(|| {
        selected
            .par_iter()
            .map(|&i| {
                let t = Instant::now();
                let s = solve_subgame(world, i, mode, cap).with_context(|| format!("subgame {}", i + 1))?;
                let ms = t.elapsed().as_millis() as u64;
                log::info!(
                    "subgame {}: {} ({} belief states, {} ms)",
                    i + 1,
                    if s.realizable { "realizable" } else { "unrealizable" },
                    s.stats.belief_states,
                    ms
                );
                sink(i, &s)?;
                Ok((SubgameReport::new(i + 1, s.realizable, &s.stats), SubgameTiming { subgame: i + 1, wall_ms: ms }))
            })
            .collect()
    });
    let (rows, timings): (Vec<_>, Vec<_>) = solved.into_iter().collect::<Result<Vec<_>>>()?.into_iter().unzip();
    Ok(SynthesisOutput {
        report: SynthesisReport::new(mode, cap, rows),
        timings: Timings { subgames: timings, total_ms: start.elapsed().as_millis() as u64 },
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn composition(world: SurveillanceWorld, dir: &Path, session: &SessionArgs) -> Result<Composition> {
    let strategies = load_strategies(&world, dir, session.allow_partial)?;
    Ok(Composition::new(world, strategies, session.mode, session.allow_partial)?)
}

/// Target cells from whitespace-separated text.
fn read_moves(stdin: &mut dyn BufRead) -> Result<Vec<Loc>> {
    let mut text = String::new();
    stdin.read_to_string(&mut text)?;
    text.split_whitespace()
        .map(|tok| {
            let raw: i32 = tok.parse().with_context(|| format!("bad target cell `{tok}`"))?;
            Loc::from_raw(raw).with_context(|| format!("bad target cell `{tok}`"))
        })
        .collect()
}

pub(crate) fn dispatch(
    command: Command,
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<i32> {
    match command {
        Command::Validate { world } => {
            let w = load_world(&world)?;
            write!(stdout, "{}", print_world(&w))?;
            Ok(exit::OK)
        }
        Command::Decompose { world, output } => {
            let w = load_world(&world)?;
            let docs = (0..w.partition().len())
                .map(|i| Ok(subgame_document(&w, &build_subgame(&w, i)?)))
                .collect::<Result<Vec<_>>>()?;
            match output {
                Some(dir) => {
                    fs::create_dir_all(&dir)?;
                    for (i, doc) in docs.iter().enumerate() {
                        write_file(&dir.join(format!("subgame_{}.json", i + 1)), &canonical_json(doc))?;
                    }
                }
                None => write!(stdout, "{}", canonical_json(&docs))?,
            }
            Ok(exit::OK)
        }
        Command::Synthesize { world, subgame, trigger_mode, cap, jobs, output } => {
            let w = load_world(&world)?;
            let cap = cap.resolve()?;
            fs::create_dir_all(&output)?;
            let sink = |i: usize, s: &BeliefStrategy| -> Result<()> {
                let path = output.join(strategy_file_name(i));
                let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
                s.write_json(&w, BufWriter::new(file)).with_context(|| format!("writing {}", path.display()))
            };
            let out = synthesize(&w, subgame, trigger_mode, cap, jobs, &sink)?;
            write_file(&output.join("report.json"), &canonical_json(&out.report))?;
            write_file(&output.join("timings.json"), &canonical_json(&out.timings))?;
            for row in &out.report.subgames {
                writeln!(
                    stderr,
                    "subgame {}: {} (region {}, {} belief states)",
                    row.subgame,
                    if row.realizable { "realizable" } else { "unrealizable" },
                    row.region_size,
                    row.belief_states
                )?;
            }
            Ok(if out.report.totals.realizable { exit::OK } else { exit::UNREALIZABLE })
        }
        Command::Verify { world, strategies, mode, cap, output } => {
            let w = load_world(&world)?;
            let cap = cap.resolve()?;
            let session = SessionArgs { mode, allow_partial: false, seed: 0 };
            let comp = composition(w, &strategies, &session)?;
            let verdict = verify_closed_loop(&comp, cap)?;
            let text = canonical_json(&verdict);
            match output {
                Some(path) => write_file(&path, &text)?,
                None => write!(stdout, "{text}")?,
            }
            writeln!(stderr, "{} ({} closed-loop states)", if verdict.holds() { "holds" } else { "violated" }, verdict.states)?;
            Ok(if verdict.holds() { exit::OK } else { exit::VIOLATED })
        }
        Command::Simulate { world, strategies, session, adversary, steps, output } => {
            let w = load_world(&world)?;
            let comp = composition(w, &strategies, &session)?;
            let script = if adversary == AdversaryPolicy::Interactive { read_moves(stdin)? } else { Vec::new() };
            let mut adv = Adversary::new(adversary, session.seed);
            let trace = simulate(&comp, &mut adv, steps, &script)?;
            let mut text = String::new();
            for sim in &trace {
                text.push_str(&trace_record(comp.world(), sim).to_line());
                text.push('\n');
            }
            match output {
                Some(path) => write_file(&path, &text)?,
                None => write!(stdout, "{text}")?,
            }
            Ok(exit::OK)
        }
        Command::Serve { world, strategies, session, port, assets } => {
            let w = load_world(&world)?;
            let comp = composition(w, &strategies, &session)?;
            let state = crate::service::Session::new(comp, session.seed);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::service::serve(state, port, assets))?;
            Ok(exit::OK)
        }
        Command::SolveArena { arena } => {
            let text = fs::read_to_string(&arena).with_context(|| format!("reading {}", arena.display()))?;
            let a = Arena::parse(&text)?;
            let regions = zielonka(&a);
            let strategy = extract_strategy(&a, &regions);
            let nodes = |o: Owner| -> Vec<usize> { (0..a.len()).filter(|&v| regions.winner[v] == o).collect() };
            let moves: serde_json::Map<String, serde_json::Value> =
                strategy.moves.iter().map(|(v, w)| (v.to_string(), (*w).into())).collect();
            let doc = serde_json::json!({
                "realizable": strategy.realizable,
                "protagonist": nodes(Owner::Protagonist),
                "antagonist": nodes(Owner::Antagonist),
                "moves": moves,
            });
            write!(stdout, "{}", canonical_json(&doc))?;
            Ok(exit::OK)
        }
    }
}
