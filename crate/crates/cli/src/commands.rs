//! One function per subcommand. Numeric commands are generic over the
//! scalar and instantiated for complex doubles and exact complex rationals.

use std::collections::HashMap;
use std::f64::consts::PI;

use netkit::admittance::{build, check_structure};
use netkit::kirchhoff::{count_trees, kappa_trees};
use netkit::laplace::{
    is_positive_real, is_reactance_function, is_strictly_positive_real, network_impedance_s, poles_zeros,
};
use netkit::linalg::Matrix;
use netkit::modify::{augment, augment_cofactor1, contract, contract_cofactor1, expand, expand_cofactor};
use netkit::netlist::{format_complex, parse_complex, parse_real, ElementValue};
use netkit::netprops::{assign_phase_angles, branch_power, check_metric, rayleigh_fd, rayleigh_sensitivity};
use netkit::solve::{
    check_foster, check_tellegen, common_cofactor, driving_point_impedance, impedance_table, jacobi_residual,
    solve_grounded, solve_network, transfer_from_dp, transfer_impedance, transfer_matrix,
};
use netkit::sources::{
    build_with_dependents, eliminate_voltage_source, find_one_port, norton_to_thevenin, one_port_equivalent,
    replace_with_norton, solve_pinned_voltage, voltage_source_current, Side,
};
use netkit::{BigRational, CofactorIndex, Complex64, Error, ExactComplex, Netlist, Network, Scalar, Tolerance};
use serde_json::{json, Value};

use crate::render::{matrix_json, matrix_text, CliScalar, Report};
use crate::{Command, Mode, SideArg};

pub struct Options {
    pub mode: Mode,
    pub omega: Option<String>,
    pub sigma: Option<String>,
    pub tol: Tolerance,
}

type Out<T> = Result<T, String>;

/// Message for a library error, with the file and line when the error has one.
fn located(path: &str, e: &Error) -> String {
    match e {
        Error::Syntax { line, col, message } => format!("{path}:{line}:{col}: {message}"),
        Error::DuplicateName { line, name } => format!("{path}:{line}: duplicate name '{name}'"),
        Error::UnknownNode { line, name } => format!("{path}:{line}: unknown node '{name}'"),
        Error::InvalidGcrl { line, name, message } => format!("{path}:{line}: branch '{name}': {message}"),
        other => format!("{path}: {other}"),
    }
}

fn read_input(path: &str) -> Out<String> {
    if path == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s).map_err(|e| format!("stdin: {e}"))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

pub fn run(cmd: &Command, opts: &Options) -> Out<Report> {
    let path = cmd.file();
    let nl = netkit::parse(&read_input(path)?).map_err(|e| located(path, &e))?;
    let ctx = Ctx { path, nl: &nl, opts };
    let mut report = match cmd {
        Command::Parse { .. } => parse_cmd(&ctx),
        Command::Prcheck { j, k, .. } => prcheck(&ctx, j, k),
        Command::Phase { ground, .. } => phase(&ctx, ground.as_deref()),
        _ => match opts.mode {
            Mode::Float64 => numeric::<Complex64>(cmd, &ctx),
            Mode::Exact => numeric::<ExactComplex>(cmd, &ctx),
        },
    }?;
    report.command = cmd.name().to_string();
    let mut inputs = serde_json::Map::new();
    inputs.insert("file".into(), json!(path));
    inputs.insert("mode".into(), json!(mode_name(opts.mode)));
    inputs.insert("tolerance".into(), json!(opts.tol.rel));
    inputs.append(&mut report.inputs);
    report.inputs = inputs;
    Ok(report)
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Float64 => "float64",
        Mode::Exact => "exact",
    }
}

struct Ctx<'a> {
    path: &'a str,
    nl: &'a Netlist,
    opts: &'a Options,
}

impl Ctx<'_> {
    fn err(&self, e: Error) -> String {
        located(self.path, &e)
    }

    /// `sigma + j omega`, from the flags first and the file second.
    fn frequency(&self) -> Out<Option<ExactComplex>> {
        let parse = |flag: &Option<String>, what: &str| -> Out<Option<BigRational>> {
            flag.as_deref()
                .map(|s| parse_real(s).ok_or_else(|| format!("--{what}: not a real number: '{s}'")))
                .transpose()
        };
        let omega = parse(&self.opts.omega, "omega")?;
        let sigma = parse(&self.opts.sigma, "sigma")?;
        if omega.is_none() && sigma.is_none() {
            return Ok(self.nl.frequency());
        }
        let zero = || BigRational::from_integer(0.into());
        Ok(Some(ExactComplex::new(
            sigma.or_else(|| self.nl.sigma.clone()).unwrap_or_else(zero),
            omega.or_else(|| self.nl.omega.clone()).unwrap_or_else(zero),
        )))
    }

    /// The netlist with every (g, c, r, l) branch evaluated at the frequency.
    fn direct_netlist(&self) -> Out<Netlist> {
        if !self.nl.has_gcrl() {
            return Ok(self.nl.clone());
        }
        let s = self.frequency()?.ok_or_else(|| {
            format!("{}: (g, c, r, l) branches need a frequency: add an omega line or --omega", self.path)
        })?;
        self.nl.eval_elements(&s).map_err(|e| self.err(e))
    }

    fn network<T: Scalar>(&self) -> Out<Network<T>> {
        Network::from_netlist(&self.direct_netlist()?).map_err(|e| self.err(e))
    }
}

/// Resolves a node by name, falling back to a 1-based index.
fn node(names: &[String], text: &str) -> Out<usize> {
    if let Some(i) = names.iter().position(|n| n == text) {
        return Ok(i + 1);
    }
    match text.parse::<usize>() {
        Ok(k) if k >= 1 && k <= names.len() => Ok(k),
        _ => Err(format!("unknown node '{text}'")),
    }
}

fn branch(names: &[&str], text: &str) -> Out<usize> {
    names.iter().position(|n| *n == text).ok_or_else(|| format!("unknown branch '{text}'"))
}

fn value<T: Scalar>(text: &str) -> Out<T> {
    let v = parse_complex(text).ok_or_else(|| format!("not a number: '{text}'"))?;
    T::from_exact_complex(&v).ok_or_else(|| format!("value '{text}' is not representable in this mode"))
}

fn parse_cmd(ctx: &Ctx) -> Out<Report> {
    let nl = ctx.nl;
    let mut r = Report::new("parse");
    let branches: Vec<Value> = nl
        .branches
        .iter()
        .map(|b| {
            let v = match &b.value {
                ElementValue::Direct(y) => json!({ "y": format_complex(y) }),
                ElementValue::Gcrl { g, c, r, l } => json!({
                    "g": netkit::netlist::format_real(g),
                    "c": netkit::netlist::format_real(c),
                    "r": netkit::netlist::format_real(r),
                    "l": netkit::netlist::format_real(l),
                }),
            };
            json!({ "name": b.name, "head": nl.nodes[b.head - 1], "tail": nl.nodes[b.tail - 1], "value": v })
        })
        .collect();
    let sources: Vec<Value> = nl.sources.iter().map(|s| json!(s.name)).collect();
    r.result("nodes", nl.nodes.clone())
        .result("branches", branches)
        .result("sources", sources)
        .result("text", nl.to_text());
    r.line(format!("nodes: {}, branches: {}, sources: {}", nl.nodes.len(), nl.branches.len(), nl.sources.len()));
    r.line(nl.to_text().trim_end().to_string());
    let round = netkit::parse(&nl.to_text()).map_err(|e| ctx.err(e))?;
    if &round != nl {
        r.violation("round_trip", json!(null), "printed netlist does not parse back to the same model".into());
    }
    Ok(r)
}

fn numeric<T: CliScalar>(cmd: &Command, ctx: &Ctx) -> Out<Report> {
    let net: Network<T> = ctx.network()?;
    let names = net.node_names.clone();
    let tol = ctx.opts.tol;
    let e = |err: Error| ctx.err(err);
    let mut r = Report::new(cmd.name());
    match cmd {
        Command::Ymatrix { .. } => {
            let y = if net.dependent_sources.is_empty() {
                build(&net)
            } else {
                r.note("dependent sources are stamped into the matrix");
                build_with_dependents(&net).map_err(e)?
            };
            r.result("nodes", names.clone()).result("matrix", matrix_json(&y));
            r.line(format!("nodes: {}", names.join("\t")));
            r.lines.extend(matrix_text(&y));
        }
        Command::Solve { ground, .. } => {
            let g = ground.as_deref().map(|s| node(&names, s)).transpose()?.unwrap_or(1);
            let solved = solve_any(&net, g, &tol).map_err(e)?;
            let v: Vec<Value> =
                names.iter().zip(&solved.v).map(|(n, v)| json!({ "node": n, "voltage": v.to_json() })).collect();
            r.input("ground", names[g - 1].clone()).result("voltages", v);
            for (n, v) in names.iter().zip(&solved.v) {
                r.line(format!("v({n}) = {}", v.to_text()));
            }
            if !solved.source_currents.is_empty() {
                let cur: Vec<Value> = solved
                    .source_currents
                    .iter()
                    .map(|(n, i)| json!({ "source": n, "current": i.to_json() }))
                    .collect();
                r.result("voltage_source_currents", cur);
                for (n, i) in &solved.source_currents {
                    r.line(format!("i({n}) = {}", i.to_text()));
                }
            }
            r.residual("kcl", solved.residual.to_json());
            r.diagnostics.extend(solved.notes);
            if !solved.residual.is_zero_within(&tol, solved.scale) {
                r.violation(
                    "kcl",
                    solved.residual.to_json(),
                    format!("node equations residual {}", solved.residual.size_text()),
                );
            }
        }
        Command::Impedance { j, k, .. } => {
            let (j, k) = (node(&names, j)?, node(&names, k)?);
            let y = build(&net);
            let z = driving_point_impedance(&y, j, k).map_err(e)?;
            let via_t = transfer_matrix(&y, 1).map_err(e)?.impedance(j, k);
            let gap = z.clone() - via_t;
            r.input("j", names[j - 1].clone()).input("k", names[k - 1].clone());
            r.result("impedance", z.to_json()).residual("transfer_matrix_route", gap.to_json());
            r.line(format!("Z({},{}) = {}", names[j - 1], names[k - 1], z.to_text()));
            if !gap.is_zero_within(&tol, z.magnitude()) {
                r.violation(
                    "routes",
                    gap.to_json(),
                    format!("cofactor and inverse routes differ by {}", gap.size_text()),
                );
            }
        }
        Command::Transfer { p, q, j, k, .. } => {
            let idx = [node(&names, p)?, node(&names, q)?, node(&names, j)?, node(&names, k)?];
            let y = build(&net);
            let [p, q, j, k] = idx;
            let tz = transfer_impedance(&y, p, q, j, k).map_err(e)?;
            let z = |a, b| driving_point_impedance(&y, a, b);
            let dp = transfer_from_dp(
                &z(p, k).map_err(e)?,
                &z(q, j).map_err(e)?,
                &z(p, j).map_err(e)?,
                &z(q, k).map_err(e)?,
            );
            let gap = tz.clone() - dp;
            for (key, x) in ["p", "q", "j", "k"].iter().zip(idx) {
                r.input(key, names[x - 1].clone());
            }
            r.result("transfer_impedance", tz.to_json()).residual("driving_point_route", gap.to_json());
            r.line(format!(
                "tz({},{};{},{}) = {}",
                names[p - 1],
                names[q - 1],
                names[j - 1],
                names[k - 1],
                tz.to_text()
            ));
            if !gap.is_zero_within(&tol, tz.magnitude()) {
                r.violation("routes", gap.to_json(), format!("driving-point route differs by {}", gap.size_text()));
            }
        }
        Command::Kirchhoff { trees, .. } => {
            let y = build(&net);
            let kappa = common_cofactor(&y).map_err(e)?;
            r.result("kappa", kappa.to_json());
            r.line(format!("kappa: {}", kappa.to_text()));
            if *trees {
                let g = net.graph();
                let mut list: Vec<Vec<String>> = g
                    .spanning_trees()
                    .map_err(e)?
                    .iter()
                    .map(|t| {
                        let mut v: Vec<String> = t.iter().map(|&id| net.branches[id].name.clone()).collect();
                        v.sort();
                        v
                    })
                    .collect();
                list.sort();
                let by_trees = kappa_trees(&net).map_err(e)?.value;
                let counted = count_trees(&g).map_err(e)?;
                let gap = by_trees.clone() - kappa.clone();
                r.result("trees", list.clone())
                    .result("tree_count", list.len())
                    .result("laplacian_tree_count", counted.to_string())
                    .residual("tree_sum_minus_cofactor", gap.to_json());
                r.line(format!("trees: {}", list.len()));
                for t in &list {
                    r.line(format!("  {{{}}}", t.join(", ")));
                }
                if counted.to_string() != list.len().to_string() {
                    r.violation(
                        "tree_count",
                        json!(counted.to_string()),
                        "Laplacian cofactor disagrees with enumeration".into(),
                    );
                }
                if !gap.is_zero_within(&tol, kappa.magnitude()) {
                    r.violation(
                        "kappa",
                        gap.to_json(),
                        format!("tree sum differs from cofactor by {}", gap.size_text()),
                    );
                }
            }
        }
        Command::Check { foster, jacobi, tellegen, metric, structure, ground, .. } => {
            let y = build(&net);
            let n = net.n();
            let none = !foster && !jacobi && !tellegen && metric.is_empty() && !structure;
            if *foster || none {
                let rep = check_foster(&y).map_err(e)?;
                let worst = rep.node_residuals.iter().map(|(_, v)| v.magnitude()).fold(0.0, f64::max);
                r.residual("foster", rep.residual.to_json()).residual("foster_node_max", worst);
                r.line(format!("foster residual: {}, expected n-1={}", rep.residual.size_text(), n - 1));
                if !rep.residual.is_zero_within(&tol, n as f64) {
                    r.violation(
                        "foster",
                        rep.residual.to_json(),
                        format!("Foster sum misses n-1 by {}", rep.residual.size_text()),
                    );
                }
                for ((j, p), v) in &rep.node_residuals {
                    if !v.is_zero_within(&tol, 1.0) {
                        r.violation(
                            "foster_node",
                            json!([names[j - 1], names[p - 1]]),
                            format!(
                                "node law at {} for source at {} misses by {}",
                                names[j - 1],
                                names[p - 1],
                                v.size_text()
                            ),
                        );
                    }
                }
            }
            if *jacobi {
                let mut worst = 0.0f64;
                let mut bad = Vec::new();
                for p in 1..=n {
                    for q in 1..=n {
                        for j in 1..=n {
                            for k in 1..=n {
                                let v = jacobi_residual(&y, p, q, j, k).map_err(e)?;
                                worst = worst.max(v.magnitude());
                                if !v.is_zero_within(&tol, 1.0) {
                                    bad.push([p, q, j, k]);
                                }
                            }
                        }
                    }
                }
                r.residual("jacobi_max", worst);
                r.line(format!("jacobi residual: {:e} over {} index tuples", worst, n.pow(4)));
                for t in bad {
                    let nm: Vec<&str> = t.iter().map(|x| names[x - 1].as_str()).collect();
                    r.violation("jacobi", json!(nm), format!("cyclic sum nonzero at {:?}", nm));
                }
            }
            if *structure || none {
                let rep = check_structure(&y, &tol);
                let connected = net.graph().is_connected(&[]);
                r.result(
                    "structure",
                    json!({
                        "symmetric": rep.symmetric,
                        "zero_row_sums": rep.zero_row_sums,
                        "zero_col_sums": rep.zero_col_sums,
                        "diag_dominant": rep.diag_dominant,
                        "rank": rep.rank,
                        "connected": connected,
                    }),
                );
                r.line(format!(
                    "structure: symmetric={} zero_row_sums={} zero_col_sums={} diag_dominant={} rank={}",
                    rep.symmetric, rep.zero_row_sums, rep.zero_col_sums, rep.diag_dominant, rep.rank
                ));
                for (ok, what) in [
                    (rep.symmetric, "symmetric"),
                    (rep.zero_row_sums, "zero_row_sums"),
                    (rep.zero_col_sums, "zero_col_sums"),
                ] {
                    if !ok {
                        r.violation("structure", json!(what), format!("admittance matrix is not {what}"));
                    }
                }
                if connected && rep.rank + 1 != n.max(1) {
                    r.violation(
                        "structure",
                        json!(rep.rank),
                        format!("rank {} of a connected network, expected {}", rep.rank, n - 1),
                    );
                }
            }
            if *tellegen {
                let g = ground.as_deref().map(|s| node(&names, s)).transpose()?.unwrap_or(1);
                let target = if net.voltage_sources.is_empty() {
                    net.clone()
                } else {
                    r.note("voltage sources are eliminated before the Tellegen sums");
                    eliminate_all(&net).map_err(e)?.0
                };
                let g2 = node(&target.node_names, &names[g - 1]).unwrap_or(1);
                let sol = solve_network(&target, g2, &tol).map_err(e)?;
                let rep = check_tellegen(&target, &sol, &tol).map_err(e)?;
                let scale = rep.total_power.magnitude().max(1.0);
                r.residual("tellegen", rep.residual.to_json())
                    .residual("tellegen_conj_v", rep.residual_conj_v.to_json())
                    .residual("tellegen_conj_i", rep.residual_conj_i.to_json());
                r.line(format!(
                    "tellegen residuals: {} {} {}",
                    rep.residual.size_text(),
                    rep.residual_conj_v.size_text(),
                    rep.residual_conj_i.size_text()
                ));
                for (v, what) in
                    [(&rep.residual, "v i"), (&rep.residual_conj_v, "conj(v) i"), (&rep.residual_conj_i, "v conj(i)")]
                {
                    if !v.is_zero_within(&tol, scale) {
                        r.violation("tellegen", v.to_json(), format!("sum of {what} is {}", v.size_text()));
                    }
                }
            }
            if !metric.is_empty() {
                let z = impedance_table(&y).map_err(e)?;
                let mut scans = Vec::new();
                for text in metric {
                    let theta = parse_angle(text)?;
                    let rep = check_metric(&z, theta, &tol).map_err(e)?;
                    // d(p,q) + d(q,r) < d(p,r) is the same inequality read from either end.
                    let mut triples: Vec<_> = rep.violations.iter().copied().filter(|&(p, _, s)| p < s).collect();
                    triples.sort();
                    triples.dedup();
                    let named: Vec<Vec<&str>> = triples
                        .iter()
                        .map(|&(p, q, s)| vec![names[p - 1].as_str(), names[q - 1].as_str(), names[s - 1].as_str()])
                        .collect();
                    scans.push(json!({ "theta": theta, "violations": named, "nonpositive": rep.nonpositive, "asymmetric": rep.asymmetric }));
                    r.line(format!("metric theta={theta}: {} violation(s)", triples.len()));
                    for t in &named {
                        r.violation(
                            "metric",
                            json!({ "theta": theta, "triple": t }),
                            format!("theta={theta}: d({0},{1}) + d({1},{2}) < d({0},{2})", t[0], t[1], t[2]),
                        );
                    }
                    for (p, q) in &rep.nonpositive {
                        r.violation(
                            "metric",
                            json!({ "theta": theta, "pair": [names[p - 1], names[q - 1]] }),
                            format!("theta={theta}: d({},{}) is not positive", names[p - 1], names[q - 1]),
                        );
                    }
                }
                r.result("metric", scans);
            }
        }
        Command::Sensitivity { j, k, branch: b, .. } => {
            let (j, k) = (node(&names, j)?, node(&names, k)?);
            let bnames: Vec<&str> = net.branches.iter().map(|x| x.name.as_str()).collect();
            let alpha = branch(&bnames, b)?;
            let (p, q) = (net.branches[alpha].head, net.branches[alpha].tail);
            let y = build(&net);
            let d = rayleigh_sensitivity(&y, j, k, p, q).map_err(e)?;
            r.input("branch", b.clone());
            r.result("derivative", d.to_json());
            r.line(format!("dZ({},{})/dy({b}) = {}", names[j - 1], names[k - 1], d.to_text()));
            if !T::EXACT {
                let h = value::<T>("1e-7")?;
                let fd = rayleigh_fd(&net, j, k, alpha, h).map_err(e)?;
                let rel = (fd.clone() - d.clone()).magnitude() / d.magnitude().max(f64::MIN_POSITIVE);
                r.result("finite_difference", fd.to_json()).residual("relative_gap", rel);
                r.line(format!("central difference: {} (relative gap {rel:e})", fd.to_text()));
                if rel > 1e-5 && d.magnitude() > tol.abs {
                    r.violation("sensitivity", json!(rel), format!("finite difference differs by {rel:e} relative"));
                }
            }
        }
        Command::Modify { contract: con, delete, augment: aug, expand: exp, .. } => {
            let chosen = [con.is_some(), delete.is_some(), aug.is_some(), exp.is_some()].iter().filter(|x| **x).count();
            if chosen != 1 {
                return Err("choose exactly one of --contract, --delete, --augment, --expand".into());
            }
            let y = build(&net);
            let before = common_cofactor(&y).map_err(e)?;
            let (after, predicted, label) = if let Some(v) = con {
                let (j, k) = (node(&names, &v[0])?, node(&names, &v[1])?);
                let (m, _) = contract(&y, j, k).map_err(e)?;
                (m, contract_cofactor1(&y, j, k).map_err(e)?, format!("contract {} {}", names[j - 1], names[k - 1]))
            } else if let Some(b) = delete {
                let bnames: Vec<&str> = net.branches.iter().map(|x| x.name.as_str()).collect();
                let a = branch(&bnames, b)?;
                let (j, k, ya) = (net.branches[a].head, net.branches[a].tail, net.branches[a].y.clone());
                let direct = build(&net.delete_branch(a).map_err(e)?);
                let (m, _) = augment(&y, j, k, -ya.clone()).map_err(e)?;
                if m != direct && T::EXACT {
                    r.violation("delete", json!(b), "augmenting by -y does not reproduce the deleted network".into());
                }
                (direct, augment_cofactor1(&y, j, k, &-ya).map_err(e)?, format!("delete {b}"))
            } else if let Some(v) = aug {
                let (j, k) = (node(&names, &v[0])?, node(&names, &v[1])?);
                let yn: T = value(&v[2])?;
                let (m, _) = augment(&y, j, k, yn.clone()).map_err(e)?;
                (
                    m,
                    augment_cofactor1(&y, j, k, &yn).map_err(e)?,
                    format!("augment {} {} {}", names[j - 1], names[k - 1], v[2]),
                )
            } else {
                let v = exp.as_ref().expect("one option chosen");
                let k = node(&names, &v[0])?;
                let yn: T = value(&v[1])?;
                let (m, rec) = expand(&y, k, yn).map_err(e)?;
                let n1 = m.rows();
                let idx = CofactorIndex::new(vec![n1], vec![n1]).map_err(e)?;
                (m, expand_cofactor(&y, &rec, &idx).map_err(e)?, format!("expand {} {}", names[k - 1], v[1]))
            };
            let direct = common_cofactor(&after).map_err(e)?;
            let gap = predicted.clone() - direct.clone();
            r.input("operation", label.clone());
            r.result("kappa_before", before.to_json())
                .result("kappa_after", direct.to_json())
                .result("kappa_predicted", predicted.to_json())
                .result("matrix", matrix_json(&after))
                .residual("kappa", gap.to_json());
            r.line(format!("{label}: kappa {} -> {}", before.to_text(), direct.to_text()));
            r.line(format!("predicted: {} (residual {})", predicted.to_text(), gap.size_text()));
            r.lines.extend(matrix_text(&after));
            if !gap.is_zero_within(&tol, direct.magnitude()) {
                r.violation("modify", gap.to_json(), format!("update formula misses by {}", gap.size_text()));
            }
        }
        Command::Reduce { port, side, vsrc, .. } => match (port, vsrc) {
            (Some(pq), None) => reduce_port(&mut r, ctx, &net, &pq[0], &pq[1], *side)?,
            (None, Some(name)) => reduce_vsrc(&mut r, ctx, &net, name)?,
            _ => return Err("choose exactly one of --port or --vsrc".into()),
        },
        Command::Parse { .. } | Command::Prcheck { .. } | Command::Phase { .. } => unreachable!("handled in run"),
    }
    Ok(r)
}

/// Angles such as `0`, `0.5`, `pi/4`, `-3pi/4`, `-pi`.
pub fn parse_angle(text: &str) -> Out<f64> {
    let t = text.trim().to_ascii_lowercase();
    let bad = || format!("not an angle: '{text}'");
    let Some(at) = t.find("pi") else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let (head, tail) = (&t[..at], &t[at + 2..]);
    let coef = match head.trim_end_matches('*') {
        "" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let div = match tail {
        "" => 1.0,
        d => d.strip_prefix('/').and_then(|x| x.parse::<f64>().ok()).ok_or_else(bad)?,
    };
    Ok(coef * PI / div)
}

struct Solved<T> {
    v: Vec<T>,
    residual: T,
    scale: f64,
    source_currents: Vec<(String, T)>,
    notes: Vec<String>,
}

/// `(positive, negative, value)` of an eliminated source, by node name.
type Eliminated<T> = (String, String, T);

/// Eliminates voltage sources one at a time. Returns the reduced network and
/// the trail of eliminated sources.
fn eliminate_all<T: Scalar>(net: &Network<T>) -> netkit::Result<(Network<T>, Vec<Eliminated<T>>)> {
    let mut cur = net.clone();
    let mut trail = Vec::new();
    while let Some(s) = cur.voltage_sources.first().cloned() {
        trail.push((cur.node_names[s.pos - 1].clone(), cur.node_names[s.neg - 1].clone(), s.value.clone()));
        cur = eliminate_voltage_source(&cur, &s.name)?;
    }
    Ok((cur, trail))
}

fn max_residual<T: Scalar>(y: &Matrix<T>, v: &[T], i: &[T]) -> netkit::Result<(T, f64)> {
    let yv = y.mul_vec(v)?;
    let scale = yv.iter().chain(i).map(|x| x.magnitude()).fold(0.0, f64::max);
    let worst = yv
        .into_iter()
        .zip(i)
        .map(|(a, b)| a - b.clone())
        .max_by(|a, b| a.magnitude().total_cmp(&b.magnitude()))
        .unwrap_or_else(T::zero);
    Ok((worst, scale))
}

/// Node voltages under every source in the network, grounded at `ground`.
fn solve_any<T: Scalar>(net: &Network<T>, ground: usize, tol: &Tolerance) -> netkit::Result<Solved<T>> {
    let mut notes = Vec::new();
    if !net.dependent_sources.is_empty() {
        if !net.voltage_sources.is_empty() {
            return Err(Error::PreconditionViolated(
                "independent voltage sources cannot be combined with dependent sources".into(),
            ));
        }
        let y = build_with_dependents(net)?;
        let i = net.injections();
        let sol = solve_grounded(&y, &i, ground, tol)?;
        let (residual, scale) = max_residual(&y, &sol.v, &i)?;
        notes.push("dependent sources stamped into the admittance matrix".into());
        return Ok(Solved { v: sol.v, residual, scale, source_currents: vec![], notes });
    }
    if net.voltage_sources.is_empty() {
        let y = build(net);
        let i = net.injections();
        let sol = solve_grounded(&y, &i, ground, tol)?;
        let (residual, scale) = max_residual(&y, &sol.v, &i)?;
        return Ok(Solved { v: sol.v, residual, scale, source_currents: vec![], notes });
    }
    let (reduced, trail) = eliminate_all(net)?;
    notes.push(format!("{} voltage source(s) eliminated by contraction", trail.len()));
    let y = build(&reduced);
    let i = reduced.injections();
    let sol = solve_grounded(&y, &i, 1, tol)?;
    let (residual, scale) = max_residual(&y, &sol.v, &i)?;
    let mut by_name: HashMap<String, T> = reduced.node_names.iter().cloned().zip(sol.v).collect();
    for (pos, neg, val) in trail.iter().rev() {
        let base = by_name.get(neg).cloned().ok_or_else(|| Error::PreconditionViolated(format!("lost node {neg}")))?;
        by_name.insert(pos.clone(), base + val.clone());
    }
    let offset = by_name[&net.node_names[ground - 1]].clone();
    let v: Vec<T> = net.node_names.iter().map(|n| by_name[n].clone() - offset.clone()).collect();
    let full = netkit::solve::GroundedSolution { ground, v: v.clone() };
    let mut source_currents = Vec::new();
    for s in &net.voltage_sources {
        let shared = net.voltage_sources.iter().filter(|o| o.pos == s.pos || o.neg == s.pos).count() > 1;
        if !shared {
            source_currents.push((s.name.clone(), voltage_source_current(net, &s.name, &full)?));
        }
    }
    Ok(Solved { v, residual, scale, source_currents, notes })
}

fn network_json<T: CliScalar>(net: &Network<T>) -> Value {
    let nm = |k: usize| net.node_names[k - 1].clone();
    json!({
        "nodes": net.node_names,
        "branches": net.branches.iter().map(|b| json!({ "name": b.name, "head": nm(b.head), "tail": nm(b.tail), "y": b.y.to_json() })).collect::<Vec<_>>(),
        "current_sources": net.current_sources.iter().map(|s| json!({ "name": s.name, "from": nm(s.from), "to": nm(s.to), "value": s.value.to_json() })).collect::<Vec<_>>(),
        "voltage_sources": net.voltage_sources.iter().map(|s| json!({ "name": s.name, "pos": nm(s.pos), "neg": nm(s.neg), "value": s.value.to_json() })).collect::<Vec<_>>(),
    })
}

fn network_text<T: CliScalar>(net: &Network<T>) -> Vec<String> {
    let nm = |k: usize| net.node_names[k - 1].as_str();
    let mut out = Vec::new();
    for b in &net.branches {
        out.push(format!("branch {} {} {} y={}", b.name, nm(b.head), nm(b.tail), b.y.to_text()));
    }
    for s in &net.current_sources {
        out.push(format!("isrc {} {} {} i={}", s.name, nm(s.from), nm(s.to), s.value.to_text()));
    }
    for s in &net.voltage_sources {
        out.push(format!("vsrc {} {} {} v={}", s.name, nm(s.pos), nm(s.neg), s.value.to_text()));
    }
    out
}

fn reduce_port<T: CliScalar>(r: &mut Report, ctx: &Ctx, net: &Network<T>, p: &str, q: &str, side: SideArg) -> Out<()> {
    let e = |err: Error| ctx.err(err);
    let names = &net.node_names;
    let (p, q) = (node(names, p)?, node(names, q)?);
    let side = match side {
        SideArg::A => Side::A,
        SideArg::B => Side::B,
    };
    r.input("port", vec![names[p - 1].clone(), names[q - 1].clone()]).input("side", format!("{side:?}"));
    let Some(dec) = find_one_port(net, p, q).map_err(e)? else {
        r.result("decomposition", Value::Null);
        r.violation(
            "one_port",
            json!([names[p - 1], names[q - 1]]),
            format!("nodes {} and {} separate no two nonempty sides", names[p - 1], names[q - 1]),
        );
        return Ok(());
    };
    let nm = |v: &[usize]| v.iter().map(|k| names[k - 1].clone()).collect::<Vec<_>>();
    let eq = one_port_equivalent(net, &dec, side).map_err(e)?;
    r.result("decomposition", json!({ "a": nm(&dec.a), "b": nm(&dec.b) }))
        .result("short_circuit_current", eq.short_circuit_current.to_json())
        .result("admittance", eq.admittance.to_json())
        .result("open_circuit_voltage", eq.open_circuit_voltage.as_ref().map_or(Value::Null, |v| v.to_json()))
        .residual("admittance_identity", eq.identity_residual.to_json());
    r.line(format!("A = {{{}}}, B = {{{}}}", nm(&dec.a).join(", "), nm(&dec.b).join(", ")));
    r.line(format!("norton: I = {}, y = {}", eq.short_circuit_current.to_text(), eq.admittance.to_text()));
    match &eq.open_circuit_voltage {
        Some(v) => r.line(format!("thevenin: V = {}, y = {}", v.to_text(), eq.admittance.to_text())),
        None => r.note("the side presents no admittance across the port, so it has no Thévenin form"),
    };
    if let Some(m) = &eq.merged {
        let t = norton_to_thevenin(m).map_err(e)?;
        r.result("merged_norton", json!({ "current": m.current.to_json(), "y": m.y.to_json() }))
            .result("merged_thevenin", json!({ "voltage": t.voltage.to_json(), "y": t.y.to_json() }));
    }
    if eq.is_degenerate() {
        r.note("the side carries no net source and reduces to an admittance");
    }
    let ident_scale = eq.admittance.magnitude().max(1.0);
    if !eq.identity_residual.is_zero_within(&ctx.opts.tol, ident_scale) {
        r.violation(
            "one_port",
            eq.identity_residual.to_json(),
            format!("admittance identity misses by {}", eq.identity_residual.size_text()),
        );
    }
    // Voltages on the kept side must be unchanged by the replacement.
    let (reduced, map) = replace_with_norton(net, &dec, side).map_err(e)?;
    let q_new = map[q].expect("port kept");
    let full = solve_network(net, q, &ctx.opts.tol).map_err(e)?;
    let small = solve_network(&reduced, q_new, &ctx.opts.tol).map_err(e)?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for (k, slot) in map.iter().enumerate().skip(1) {
        if let Some(kn) = slot {
            worst = worst.max((full.at(k).clone() - small.at(*kn).clone()).magnitude());
            scale = scale.max(full.at(k).magnitude());
        }
    }
    r.result("reduced_network", network_json(&reduced)).residual("kept_side_voltage_gap", worst);
    r.lines.extend(network_text(&reduced));
    let limit = if T::EXACT { 0.0 } else { ctx.opts.tol.threshold(scale) };
    if worst > limit {
        r.violation("one_port", json!(worst), format!("kept-side voltages change by {worst:e}"));
    }
    Ok(())
}

fn reduce_vsrc<T: CliScalar>(r: &mut Report, ctx: &Ctx, net: &Network<T>, name: &str) -> Out<()> {
    let e = |err: Error| ctx.err(err);
    let out = eliminate_voltage_source(net, name).map_err(e)?;
    r.input("vsrc", name);
    r.result("reduced_network", network_json(&out));
    r.lines.extend(network_text(&out));
    if net.voltage_sources.len() == 1 && net.dependent_sources.is_empty() {
        let src = &net.voltage_sources[0];
        let (p, q) = (src.pos, src.neg);
        let oracle = solve_pinned_voltage(net, name, &ctx.opts.tol).map_err(e)?;
        let q_new = Network::<T>::contracted_index(q, p, q);
        let sol = solve_network(&out, q_new, &ctx.opts.tol).map_err(e)?;
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for k in (1..=net.n()).filter(|&k| k != p) {
            let kn = Network::<T>::contracted_index(q, p, k);
            worst = worst.max((sol.at(kn).clone() - oracle.at(k).clone()).magnitude());
            scale = scale.max(oracle.at(k).magnitude());
        }
        r.residual("pinned_solve_gap", worst);
        r.line(format!("largest gap to the pinned-voltage solve: {worst:e}"));
        let limit = if T::EXACT { 0.0 } else { ctx.opts.tol.threshold(scale) };
        if worst > limit {
            r.violation("eliminate", json!(worst), format!("surviving node voltages change by {worst:e}"));
        }
    } else {
        r.note("the pinned-voltage comparison needs exactly one voltage source and no dependent sources");
    }
    Ok(())
}

fn prcheck(ctx: &Ctx, j: &str, k: &str) -> Out<Report> {
    let nl = ctx.nl;
    let e = |err: Error| ctx.err(err);
    let (j, k) = (node(&nl.nodes, j)?, node(&nl.nodes, k)?);
    let mut r = Report::new("prcheck");
    r.input("j", nl.nodes[j - 1].clone()).input("k", nl.nodes[k - 1].clone());
    let z = network_impedance_s(nl, j, k).map_err(e)?;
    let verdict = is_positive_real(&z).map_err(e)?;
    let pz = poles_zeros(&z).map_err(e)?;
    let c = |v: &Complex64| json!({ "re": v.re, "im": v.im });
    let roots = |v: &[netkit::laplace::Root]| {
        v.iter().map(|x| json!({ "value": c(&x.value), "multiplicity": x.multiplicity })).collect::<Vec<_>>()
    };
    r.result("impedance", z.to_string())
        .result("numerator", z.num().coeffs().iter().map(netkit::netlist::format_real).collect::<Vec<_>>())
        .result("denominator", z.den().coeffs().iter().map(netkit::netlist::format_real).collect::<Vec<_>>())
        .result("positive_real", verdict.positive_real)
        .result("poles", roots(&pz.poles))
        .result("zeros", roots(&pz.zeros))
        .result(
            "residues",
            pz.residues.iter().map(|(p, v)| json!({ "pole": c(p), "residue": c(v) })).collect::<Vec<_>>(),
        )
        .result("degree_gap", pz.degree_gap);
    r.line(format!("Z({},{})(s) = {z}", nl.nodes[j - 1], nl.nodes[k - 1]));
    r.line(format!("positive real: {}", if verdict.positive_real { "yes" } else { "no" }));
    if !verdict.positive_real {
        let reason = verdict.reason.clone().unwrap_or_default();
        r.violation(
            "positive_real",
            json!({ "reason": reason, "witness": verdict.witness.as_ref().map(c) }),
            format!("not positive real: {reason}"),
        );
        return Ok(r);
    }
    let spr = is_strictly_positive_real(nl, j, k).map_err(e)?;
    r.result("strictly_positive_real", json!({ "criteria": spr.criteria, "direct": spr.direct, "reason": spr.reason }));
    r.line(format!("strictly positive real: {}", if spr.direct { "yes" } else { "no" }));
    if spr.criteria != spr.direct {
        r.violation(
            "strict",
            json!({ "criteria": spr.criteria, "direct": spr.direct }),
            "branch criteria and direct test disagree".into(),
        );
    }
    let lossless = nl.branches.iter().all(|b| match &b.value {
        ElementValue::Gcrl { g, r, .. } => num_traits::Zero::is_zero(g) || num_traits::Zero::is_zero(r),
        ElementValue::Direct(_) => false,
    });
    if lossless {
        let rep = is_reactance_function(&z).map_err(e)?;
        r.result("reactance", json!({ "reactance": rep.reactance, "poles": rep.poles, "zeros": rep.zeros, "interleaved": rep.interleaved, "increasing": rep.increasing }));
        r.line(format!("reactance function: {} (poles {:?}, zeros {:?})", rep.reactance, rep.poles, rep.zeros));
        if !rep.reactance {
            r.violation(
                "reactance",
                json!(rep.reason),
                format!("lossless network but not a reactance function: {}", rep.reason.unwrap_or_default()),
            );
        }
    }
    Ok(r)
}

fn phase(ctx: &Ctx, ground: Option<&str>) -> Out<Report> {
    let e = |err: Error| ctx.err(err);
    let net: Network<Complex64> = ctx.network()?;
    let names = net.node_names.clone();
    let g = ground.map(|s| node(&names, s)).transpose()?.unwrap_or(1);
    let tol = ctx.opts.tol;
    let mut r = Report::new("phase");
    r.input("ground", names[g - 1].clone());
    if ctx.opts.mode == Mode::Exact {
        r.note("phase angles are computed in float64");
    }
    let sol = solve_network(&net, g, &tol).map_err(e)?;
    let flow = branch_power(&net, &sol, &tol).map_err(e)?;
    r.residual("node_power_balance", flow.max_node_residual())
        .residual("branch_identities", flow.max_identity_residual());
    r.result(
        "branches",
        flow.branches
            .iter()
            .map(
                |b| json!({ "name": b.name, "s_plus": b.s_plus.to_json(), "s_minus": b.s_minus.to_json(), "mu": b.mu }),
            )
            .collect::<Vec<_>>(),
    );
    let scale = flow.scale.max(1.0);
    if flow.max_node_residual() > tol.threshold(scale) {
        r.violation(
            "power_balance",
            json!(flow.max_node_residual()),
            format!("complex power misses balance by {:e}", flow.max_node_residual()),
        );
    }
    match assign_phase_angles(&net, &sol, &tol) {
        Ok(pa) => {
            let deltas: Vec<Value> =
                names.iter().zip(&pa.delta).map(|(n, d)| json!({ "node": n, "delta": d })).collect();
            r.result("delta", deltas)
                .result("max_nodes", pa.max_nodes.iter().map(|k| names[k - 1].clone()).collect::<Vec<_>>())
                .result("generators", pa.generators.iter().map(|k| names[k - 1].clone()).collect::<Vec<_>>())
                .residual("angle_congruence", pa.congruence_residual);
            for (n, d) in names.iter().zip(&pa.delta) {
                match d {
                    Some(d) => r.line(format!("delta({n}) = {d}")),
                    None => r.line(format!("delta({n}) = undefined (zero voltage)")),
                };
            }
            if !pa.max_at_generator {
                r.violation("phase", json!(pa.max_nodes), "largest angle is not at a generator terminal".into());
            }
            for b in &pa.sign_violations {
                r.violation("phase", json!(b), format!("branch {b}: angle drop disagrees with active power"));
            }
            for (m, path) in pa.max_nodes.iter().zip(&pa.zero_flow_paths) {
                if path.is_empty() {
                    r.violation(
                        "phase",
                        json!(names[m - 1]),
                        format!("node {} holds the largest angle with no lossless path to a source", names[m - 1]),
                    );
                }
            }
        }
        Err(Error::NotInductivelyLoaded(list)) => {
            for b in list {
                r.violation("inductive", json!(b), format!("branch {b} is not inductively loaded"));
            }
        }
        Err(other) => return Err(e(other)),
    }
    Ok(r)
}
