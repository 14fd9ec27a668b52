use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use fermient::entmeasures::{yang_analytics, Entropy};
use fermient::rdmcore::{read_rdm, reduce_pure, rescale, write_rdm};
use fermient::statekit::{
    check_state_dim, chi_pair_vector, random_pure_state, read_state, slater_state, write_state,
    yang_state_with_limits,
};
use fermient::{ModeSet, Normalization, PureStateN, RankedBasis, ReducedDM, YangParams};
use serde_json::json;

use crate::output::{real, sink, write_header};
use crate::{Cli, CliError, CliResult, Command, Format, NormArg, StateKind};

fn need(v: Option<usize>, flag: &str, kind: &str) -> CliResult<usize> {
    v.ok_or_else(|| CliError::Usage(format!("`state {kind}` needs {flag}")))
}

fn build_state(cli: &Cli) -> CliResult<PureStateN> {
    let Command::State {
        kind,
        modes,
        particles,
        pairs,
        occupied_pairs,
        occ,
    } = &cli.command
    else {
        unreachable!()
    };
    let limits = cli.limits();
    let state = match kind {
        StateKind::Slater => {
            let m = need(*modes, "--M", "slater")?;
            if occ.is_empty() {
                return Err(CliError::Usage("`state slater` needs --occ".into()));
            }
            if let Some(n) = particles {
                if *n != occ.len() {
                    return Err(CliError::Usage(format!(
                        "--N {n} disagrees with {} occupied modes",
                        occ.len()
                    )));
                }
            }
            let basis = RankedBasis::new(m, occ.len())?;
            check_state_dim(&basis, &limits)?;
            slater_state(&basis, ModeSet::from_modes(occ)?)?
        }
        StateKind::Yang => {
            let p = YangParams::new(need(*pairs, "--m", "yang")?, need(*occupied_pairs, "--n", "yang")?)?;
            yang_state_with_limits(p, &limits)?
        }
        StateKind::Chi => chi_pair_vector(need(*pairs, "--m", "chi")?)?,
        StateKind::Random => {
            let basis = RankedBasis::new(need(*modes, "--M", "random")?, need(*particles, "--N", "random")?)?;
            check_state_dim(&basis, &limits)?;
            random_pure_state(&basis, cli.seed)?
        }
    };
    Ok(state)
}

pub fn state(cli: &Cli) -> CliResult<()> {
    let s = build_state(cli)?;
    let mut file = sink(cli)?;
    write_state(&mut file, &s, &crate::output::header_comments(cli))?;
    file.flush()?;
    let dim = s.basis().dim();
    let support = s.support_size();
    // the file itself goes to stdout when no --out is given
    let mut summary: Box<dyn Write> = if cli.out.is_some() {
        Box::new(std::io::stdout())
    } else {
        Box::new(std::io::stderr())
    };
    match cli.format_or(Format::Text) {
        Format::Json => writeln!(
            summary,
            "{}",
            json!({"record": "state", "modes": s.modes(), "particles": s.particles(), "dimension": dim, "support": support})
        )?,
        Format::Csv => writeln!(summary, "modes,particles,dimension,support\n{},{},{dim},{support}", s.modes(), s.particles())?,
        Format::Text => writeln!(summary, "dimension {dim}\nsupport {support}")?,
    }
    Ok(())
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn first_word(path: &Path) -> CliResult<String> {
    let f = open(path)?;
    for line in f.lines() {
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            return Ok(t.split_whitespace().next().unwrap_or_default().to_string());
        }
    }
    Err(CliError::Usage(format!("{} is empty", path.display())))
}

pub fn load_state(path: &Path) -> CliResult<PureStateN> {
    Ok(read_state(open(path)?)?)
}

fn check_k(state: &PureStateN, k: usize) -> CliResult<()> {
    if k < 1 || k > state.particles() {
        return Err(CliError::Usage(format!(
            "--k must lie in 1..={}, got {k}",
            state.particles()
        )));
    }
    Ok(())
}

fn unit_entropy(r: &ReducedDM) -> CliResult<f64> {
    Ok(rescale(r, Normalization::UnitTrace).entropy()?)
}

pub fn rdm(cli: &Cli) -> CliResult<()> {
    let Command::Rdm { input, k, norm } = &cli.command else {
        unreachable!()
    };
    let s = load_state(input)?;
    check_k(&s, *k)?;
    let dim = RankedBasis::new(s.modes(), *k)?.dim();
    if dim > cli.max_tensor_dim {
        return Err(fermient::Error::Capacity {
            what: "RDM dimension",
            requested: dim as u128,
            limit: cli.max_tensor_dim as u128,
        }
        .into());
    }
    let unit = reduce_pure(&s, *k)?;
    let target = match norm {
        NormArg::Unit => Normalization::UnitTrace,
        NormArg::Physics => Normalization::Physics,
    };
    let r = rescale(&unit, target);
    if let Some(path) = &cli.out {
        let mut f = std::io::BufWriter::new(File::create(path)?);
        let mut comments = crate::output::header_comments(cli);
        comments.push(format!("input {}", input.display()));
        write_rdm(&mut f, &r, &comments)?;
        f.flush()?;
    }
    let spec = r.spectrum()?;
    let top: Vec<f64> = spec.values.iter().take(5).copied().collect();
    let entropy = cli.show_entropy(unit_entropy(&unit)?);
    let mut out = std::io::stdout().lock();
    match cli.format_or(Format::Text) {
        Format::Json => writeln!(
            out,
            "{}",
            json!({
                "record": "rdm",
                "modes": s.modes(),
                "particles": s.particles(),
                "k": k,
                "normalization": r.normalization.tag(),
                "trace": r.trace(),
                "top_eigenvalues": top,
                "entropy": entropy,
                "entropy_unit": cli.entropy_unit(),
            })
        )?,
        Format::Csv => {
            writeln!(out, "quantity,value")?;
            writeln!(out, "trace,{}", real(r.trace()))?;
            for (i, v) in top.iter().enumerate() {
                writeln!(out, "eigenvalue_{},{}", i + 1, real(*v))?;
            }
            writeln!(out, "entropy_{},{}", cli.entropy_unit(), real(entropy))?;
        }
        Format::Text => {
            writeln!(out, "{k}-RDM of M={} N={} ({} normalization)", s.modes(), s.particles(), r.normalization.tag())?;
            writeln!(out, "trace {}", real(r.trace()))?;
            let shown: Vec<String> = top.iter().map(|v| real(*v)).collect();
            writeln!(out, "top eigenvalues {}", shown.join(" "))?;
            writeln!(out, "entropy {} {}", real(entropy), cli.entropy_unit())?;
        }
    }
    Ok(())
}

pub fn entropy(cli: &Cli) -> CliResult<()> {
    let Command::Entropy { input, k } = &cli.command else {
        unreachable!()
    };
    let rows: Vec<(usize, f64)> = match first_word(input)?.as_str() {
        "fermirdm" => {
            let r = read_rdm(open(input)?)?;
            if k.is_some_and(|k| k != r.k) {
                return Err(CliError::Usage(format!("file holds a {}-RDM", r.k)));
            }
            vec![(r.k, unit_entropy(&r)?)]
        }
        "fermistate" => {
            let s = load_state(input)?;
            let ks: Vec<usize> = match k {
                Some(k) => {
                    check_k(&s, *k)?;
                    vec![*k]
                }
                None => (1..=s.particles()).collect(),
            };
            ks.into_iter()
                .map(|k| Ok((k, reduce_pure(&s, k)?.entropy()?)))
                .collect::<CliResult<_>>()?
        }
        other => {
            return Err(CliError::Usage(format!(
                "{}: unknown file type `{other}`",
                input.display()
            )))
        }
    };
    let mut w = sink(cli)?;
    let format = cli.format_or(Format::Text);
    match format {
        Format::Json => {
            for (k, s) in rows {
                writeln!(
                    w,
                    "{}",
                    json!({"record": "entropy", "k": k, "entropy": cli.show_entropy(s), "unit": cli.entropy_unit()})
                )?;
            }
        }
        Format::Csv | Format::Text => {
            let sep = if format == Format::Csv { "," } else { " " };
            writeln!(w, "k{sep}entropy_{}", cli.entropy_unit())?;
            for (k, s) in rows {
                writeln!(w, "{k}{sep}{}", real(cli.show_entropy(s)))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Prints the closed forms next to the numeric 2-RDM; false if they disagree.
pub fn yang(cli: &Cli) -> CliResult<bool> {
    let Command::Yang {
        pairs,
        occupied_pairs,
    } = &cli.command
    else {
        unreachable!()
    };
    let p = YangParams::new(*pairs, *occupied_pairs)?;
    let a = yang_analytics(p)?;
    let state = yang_state_with_limits(p, &cli.limits())?;
    let numeric = if p.particles() >= 2 {
        let r = reduce_pure(&state, 2)?;
        let spec = r.spectrum()?;
        let exact = a.eigenvalues();
        let dev = spec
            .values
            .iter()
            .zip(&exact)
            .map(|(x, e)| (x - e).abs())
            .fold(0.0, f64::max);
        Some((spec.max(), r.entropy()?, dev))
    } else {
        None
    };
    let tol = 1e-10;
    let ok = numeric.is_none_or(|(_, s, dev)| dev <= tol && (s - a.entropy).abs() <= tol);
    let mut w = sink(cli)?;
    let format = cli.format_or(Format::Text);
    let sh = |x: f64| cli.show_entropy(x);
    match format {
        Format::Json => {
            write_header(&mut w, cli, format)?;
            writeln!(
                w,
                "{}",
                json!({
                    "record": "yang",
                    "m": a.m,
                    "n": a.n,
                    "spectrum": a.spectrum.iter().map(|(v, k)| json!({"value": v, "multiplicity": k})).collect::<Vec<_>>(),
                    "entropy": sh(a.entropy),
                    "ef_closed_form": sh(a.ef_closed_form),
                    "ef_variant": sh(a.ef_variant),
                    "esq_bound_closed_form": a.esq_bound_closed_form.map(sh),
                    "esq_bound_variant": a.esq_bound_variant.map(sh),
                    "numeric_max_eigenvalue": numeric.map(|n| n.0),
                    "numeric_entropy": numeric.map(|n| sh(n.1)),
                    "numeric_spectrum_deviation": numeric.map(|n| n.2),
                    "unit": cli.entropy_unit(),
                    "matches": ok,
                })
            )?;
        }
        Format::Csv | Format::Text => {
            write_header(&mut w, cli, format)?;
            let sep = if format == Format::Csv { "," } else { " " };
            writeln!(w, "quantity{sep}value")?;
            let mut row = |name: &str, v: String| writeln!(w, "{name}{sep}{v}");
            for (i, (v, k)) in a.spectrum.iter().enumerate() {
                row(&format!("eigenvalue_{}", i + 1), real(*v))?;
                row(&format!("multiplicity_{}", i + 1), k.to_string())?;
            }
            row("entropy", real(sh(a.entropy)))?;
            row("ef_closed_form", real(sh(a.ef_closed_form)))?;
            row("ef_variant", real(sh(a.ef_variant)))?;
            if let Some(b) = a.esq_bound_closed_form {
                row("esq_bound_closed_form", real(sh(b)))?;
            }
            if let Some(b) = a.esq_bound_variant {
                row("esq_bound_variant", real(sh(b)))?;
            }
            if let Some((mx, s, dev)) = numeric {
                row("numeric_max_eigenvalue", real(mx))?;
                row("numeric_entropy", real(sh(s)))?;
                row("numeric_spectrum_deviation", real(dev))?;
            }
            row("unit", cli.entropy_unit().to_string())?;
            row("matches", ok.to_string())?;
        }
    }
    w.flush()?;
    Ok(ok)
}
