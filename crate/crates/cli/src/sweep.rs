//! `sweep`: one table row per grid point, analytic and numeric columns side by side.

use std::io::Write;

use fermient::corpus::pair_slater_mixture;
use fermient::entmeasures::{ef_optimize, mutual_info_bounds, yang_analytics, EfOptions, Entropy};
use fermient::fockbasis::binomial;
use fermient::rdmcore::{embed_wedge_to_tensor, reduce_mixed, reduce_pure};
use fermient::statekit::{check_state_dim, random_pure_state, slater_state, yang_state};
use fermient::{ModeSet, RankedBasis, YangParams};
use rayon::prelude::*;

use crate::output::{sink, write_header, Cell, Table};
use crate::{Cli, CliError, CliResult, Command, Format, Quantity, Span};

fn random_seed(seed: u64, m: usize, n: usize, i: usize) -> u64 {
    seed.wrapping_mul(1_000_003)
        .wrapping_add((m * 64 + n) as u64 * 10_007)
        .wrapping_add(i as u64)
}

fn shapes(cli: &Cli, modes: Option<Span>, particles: Option<Span>, default_n: Span) -> CliResult<Vec<(usize, usize)>> {
    let ns = particles.unwrap_or(default_n);
    let mut out = Vec::new();
    for n in ns.values() {
        let ms: Vec<usize> = match modes {
            Some(s) => s.values().collect(),
            None => vec![n + 2],
        };
        for m in ms {
            if n == 0 || n > m {
                continue;
            }
            check_state_dim(&RankedBasis::new(m, n)?, &cli.limits())?;
            out.push((m, n));
        }
    }
    Ok(out)
}

fn s2_table(cli: &Cli, grid: &[(usize, usize)], random: usize) -> CliResult<Table> {
    let rows: Vec<CliResult<Vec<Cell>>> = grid
        .par_iter()
        .map(|&(m, n)| {
            let basis = RankedBasis::new(m, n)?;
            let s = slater_state(&basis, ModeSet::first(n))?;
            let numeric = reduce_pure(&s, 2)?.entropy()?;
            let analytic = (binomial(n, 2) as f64).ln();
            let min_random = (0..random)
                .map(|i| Ok(reduce_pure(&random_pure_state(&basis, random_seed(cli.seed, m, n, i))?, 2)?.entropy()?))
                .collect::<CliResult<Vec<f64>>>()?
                .into_iter()
                .reduce(f64::min);
            Ok(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::Real(cli.show_entropy(numeric)),
                Cell::Real(cli.show_entropy(analytic)),
                Cell::Real((numeric - analytic).abs()),
                min_random.map_or(Cell::Empty, |v| Cell::Real(cli.show_entropy(v))),
            ])
        })
        .collect();
    Ok(Table {
        columns: vec![
            ("M", "modes"),
            ("N", "particles"),
            ("slater_s2", "2-RDM entropy of the Slater determinant on modes 0..N"),
            ("ln_binom_N_2", "ln binomial(N, 2)"),
            ("abs_diff", "|slater_s2 - ln_binom_N_2|"),
            ("random_min_s2", "smallest 2-RDM entropy over the seeded random states"),
        ],
        rows: rows.into_iter().collect::<CliResult<_>>()?,
    })
}

fn mutual_table(cli: &Cli, grid: &[(usize, usize)], random: usize) -> CliResult<Table> {
    let tol = cli.tolerances().bound;
    let rows: Vec<CliResult<Vec<Cell>>> = grid
        .par_iter()
        .filter(|&&(_, n)| n >= 2)
        .map(|&(m, n)| {
            let basis = RankedBasis::new(m, n)?;
            let slater = mutual_info_bounds(&slater_state(&basis, ModeSet::first(n))?, tol)?.0.slack;
            let yang = if m % 2 == 0 && n % 2 == 0 {
                let y = yang_state(YangParams::new(m / 2, n / 2)?)?;
                Some(mutual_info_bounds(&y, tol)?.0.slack)
            } else {
                None
            };
            let min_random = (0..random)
                .map(|i| Ok(mutual_info_bounds(&random_pure_state(&basis, random_seed(cli.seed, m, n, i))?, tol)?.0.slack))
                .collect::<CliResult<Vec<f64>>>()?
                .into_iter()
                .reduce(f64::min);
            Ok(vec![
                Cell::Int(m),
                Cell::Int(n),
                Cell::Real(slater),
                yang.map_or(Cell::Empty, Cell::Real),
                min_random.map_or(Cell::Empty, Cell::Real),
                Cell::Int(random),
            ])
        })
        .collect();
    Ok(Table {
        columns: vec![
            ("M", "modes"),
            ("N", "particles"),
            ("slater_slack", "2 S1 - S12 - ln(2/(1 - Tr rho1^2)) for the Slater determinant"),
            ("yang_slack", "same slack for the pairing state m=M/2, n=N/2"),
            ("random_min_slack", "smallest slack over the seeded random states"),
            ("random_count", "number of random states"),
        ],
        rows: rows.into_iter().collect::<CliResult<_>>()?,
    })
}

fn ef_table(cli: &Cli, modes: Option<Span>, restarts: usize) -> CliResult<Table> {
    let ms: Vec<usize> = modes.unwrap_or(Span { lo: 4, hi: 8 }).values().filter(|m| m % 2 == 0).collect();
    let mut points = Vec::new();
    for m in ms {
        for pairs in 2..=m / 2 {
            points.push((m, pairs));
        }
    }
    let ln2 = 2f64.ln();
    let rows: Vec<CliResult<Vec<Cell>>> = points
        .par_iter()
        .map(|&(m, count)| {
            let pairs: Vec<[usize; 2]> = (0..count).map(|i| [2 * i, 2 * i + 1]).collect();
            let total = (count * (count + 1) / 2) as f64;
            let weights: Vec<f64> = (1..=count).map(|i| i as f64 / total).collect();
            let mix = pair_slater_mixture(m, &pairs, &weights)?;
            let rho = embed_wedge_to_tensor(&reduce_mixed(&mix, 2)?)?;
            let opts = EfOptions {
                restarts,
                seed: cli.seed,
                ..EfOptions::default()
            };
            let r = ef_optimize(&rho, &opts)?;
            Ok(vec![
                Cell::Int(m),
                Cell::Int(count),
                Cell::Real(cli.show_entropy(r.value)),
                Cell::Real(cli.show_entropy(ln2)),
                Cell::Real((r.value - ln2).abs()),
                Cell::Int(restarts),
                Cell::Real(r.decomposition.reconstruction_error(&rho)),
            ])
        })
        .collect();
    Ok(Table {
        columns: vec![
            ("M", "modes"),
            ("pairs", "orthogonal pair determinants {2i,2i+1} mixed with weights proportional to 1..pairs"),
            ("ef", "entanglement of formation found by the optimizer"),
            ("ln2", "fermionic lower bound ln 2"),
            ("abs_diff", "|ef - ln2|"),
            ("restarts", "optimizer restarts"),
            ("reconstruction_error", "max entry deviation of the returned ensemble from the input"),
        ],
        rows: rows.into_iter().collect::<CliResult<_>>()?,
    })
}

fn yang_table(cli: &Cli, pairs: Option<Span>, occupied: Option<Span>) -> CliResult<Table> {
    let mut points = Vec::new();
    for m in pairs.unwrap_or(Span { lo: 2, hi: 5 }).values() {
        let ns = occupied.unwrap_or(Span { lo: 1, hi: m });
        for n in ns.values().filter(|&n| n >= 1 && n <= m) {
            let p = YangParams::new(m, n)?;
            check_state_dim(&RankedBasis::new(p.modes(), p.particles())?, &cli.limits())?;
            points.push(p);
        }
    }
    let rows: Vec<CliResult<Vec<Cell>>> = points
        .par_iter()
        .filter(|p| p.particles() >= 2)
        .map(|&p| {
            let a = yang_analytics(p)?;
            let r = reduce_pure(&yang_state(p)?, 2)?;
            let numeric_max = r.spectrum()?.max();
            let numeric_s = r.entropy()?;
            Ok(vec![
                Cell::Int(p.m()),
                Cell::Int(p.n()),
                Cell::Int(p.modes()),
                Cell::Int(p.particles()),
                Cell::Real(a.max_eigenvalue()),
                Cell::Real(numeric_max),
                Cell::Real((a.max_eigenvalue() - numeric_max).abs()),
                Cell::Real(cli.show_entropy(a.entropy)),
                Cell::Real(cli.show_entropy(numeric_s)),
                Cell::Real((a.entropy - numeric_s).abs()),
            ])
        })
        .collect();
    Ok(Table {
        columns: vec![
            ("m", "mode pairs"),
            ("n", "occupied pairs"),
            ("M", "modes"),
            ("N", "particles"),
            ("analytic_max", "closed-form largest 2-RDM eigenvalue"),
            ("numeric_max", "largest eigenvalue of the computed 2-RDM"),
            ("max_diff", "|analytic_max - numeric_max|"),
            ("analytic_s2", "closed-form 2-RDM entropy"),
            ("numeric_s2", "entropy of the computed 2-RDM"),
            ("s2_diff", "|analytic_s2 - numeric_s2| in nats"),
        ],
        rows: rows.into_iter().collect::<CliResult<_>>()?,
    })
}

pub fn run(cli: &Cli) -> CliResult<bool> {
    let Command::Sweep {
        quantity,
        modes,
        particles,
        pairs,
        occupied_pairs,
        random,
        restarts,
    } = &cli.command
    else {
        unreachable!()
    };
    if *restarts == 0 {
        return Err(CliError::Usage("--restarts must be at least 1".into()));
    }
    let table = match quantity {
        Quantity::S2 => {
            let grid = shapes(cli, *modes, *particles, Span { lo: 2, hi: 6 })?;
            s2_table(cli, &grid, *random)?
        }
        Quantity::MutualSlack => {
            let grid = shapes(cli, *modes, *particles, Span { lo: 2, hi: 4 })?;
            mutual_table(cli, &grid, *random)?
        }
        Quantity::Ef => ef_table(cli, *modes, *restarts)?,
        Quantity::YangSpectrum => yang_table(cli, *pairs, *occupied_pairs)?,
    };
    let format = cli.format_or(Format::Csv);
    let mut w = sink(cli)?;
    write_header(&mut w, cli, format)?;
    if format != Format::Json && cli.bits {
        writeln!(w, "# entropy columns in bits")?;
    }
    table.write(&mut w, format)?;
    w.flush()?;
    Ok(true)
}
