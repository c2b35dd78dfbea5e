use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::session::{parse_session, Item, Session};
use super::{Cli, Command, Report};
use crate::automorphisms::{AbelianizationMatrix, BasisMap};
use crate::burnside::{
    burnside_oracle, common_descendant_search, find_elementary_moves, induced_order, parse_ratio,
    todd_coxeter, InducedOrder, MoveParams, SearchBudget, SearchOutcome,
};
use crate::error::{Error, Result};
use crate::graphmap::{EdgePath, StratifiedGraphMap, PF_TOLERANCE};
use crate::matrices::NonnegIntMatrix;
use crate::substitutions::{PeriodicityVerdict, Substitution};
use crate::words::{max_power_index, reduce, Color, InverseAlphabet, Letter, Word};

pub(super) fn dispatch(cli: &Cli, cap: usize, warnings: &mut Vec<String>) -> Result<Report> {
    let mut load = || load_session(&cli.session, warnings);
    match &cli.command {
        Command::Classify { name } => classify(&load()?, name),
        Command::Orbit { map, word, depth } => orbit(&load()?, map, word, *depth, cap),
        Command::PowerIndex { map, seed, depth } => power_index(&load()?, map, seed, *depth, cap),
        Command::Pf { name } => pf(&load()?, name),
        Command::Period {
            subst,
            letter,
            bound,
        } => period(&load()?, subst, letter, *bound),
        Command::Red {
            graphmap,
            word,
            depth,
        } => red(&load()?, graphmap, word, *depth, cap),
        Command::AuditYellow {
            graphmap,
            edge,
            depth,
        } => audit_yellow(&load()?, graphmap, edge, *depth),
        Command::Moves {
            word,
            n,
            xi,
            min_exponent,
            over,
            join,
            budget,
            max_depth,
        } => {
            let alphabet = match over {
                Some(name) => load()?.alphabet(name)?.clone(),
                None => implicit_alphabet(word, join.as_deref())?,
            };
            let mut params = MoveParams::new(*n, parse_ratio(xi)?)?;
            if let Some(m) = min_exponent {
                params = params.with_min_exponent(*m);
            }
            let budget = SearchBudget {
                max_states: *budget,
                max_depth: *max_depth,
            };
            moves(&alphabet, word, join.as_deref(), &params, budget)
        }
        Command::BurnsideOrder {
            autom,
            rank,
            exp,
            max_k,
        } => burnside_order(&load()?, autom, *rank, *exp, *max_k),
        Command::Tc {
            rank,
            relators,
            over,
            max_cosets,
            csv,
        } => {
            let alphabet = match over {
                Some(name) => load()?.alphabet(name)?.clone(),
                None => generator_alphabet(*rank)?,
            };
            tc(&alphabet, *rank, relators, *max_cosets, csv.as_deref())
        }
        Command::Dump => {
            let s = load()?;
            let text = s.dump();
            Ok(Report::definite(
                text.clone(),
                json!({ "command": "dump", "session": text }),
            ))
        }
    }
}

fn load_session(path: &Path, warnings: &mut Vec<String>) -> Result<Session> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let session = parse_session(&text)?;
    warnings.extend(session.warnings().iter().cloned());
    Ok(session)
}

/// Single-letter names `a`, `b`, ... for the first `rank` generators.
fn generator_alphabet(rank: usize) -> Result<InverseAlphabet> {
    if rank == 0 || rank > 26 {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} needs --over with a session alphabet"
        )));
    }
    let names: String = (b'a'..).take(rank).map(char::from).collect();
    InverseAlphabet::from_chars(&names)
}

/// Lowercase letters occurring in the words, in alphabetical order.
fn implicit_alphabet(word: &str, other: Option<&str>) -> Result<InverseAlphabet> {
    let mut letters: Vec<char> = [Some(word), other]
        .into_iter()
        .flatten()
        .flat_map(|w| {
            w.replace("inv(", " ")
                .replace("^-1", " ")
                .chars()
                .filter(|c| c.is_alphabetic())
                .flat_map(char::to_lowercase)
                .collect::<Vec<_>>()
        })
        .collect();
    letters.sort_unstable();
    letters.dedup();
    if letters.is_empty() {
        letters.push('a');
    }
    InverseAlphabet::from_chars(&letters.into_iter().collect::<String>())
}

fn rows_text(rows: &[Vec<i64>]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| {
            let r: Vec<String> = r.iter().map(i64::to_string).collect();
            format!("[{}]", r.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn matrix_rows(m: &NonnegIntMatrix) -> Vec<Vec<i64>> {
    m.rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| i64::try_from(x).unwrap_or(i64::MAX))
                .collect()
        })
        .collect()
}

fn edge_names(alphabet: &InverseAlphabet, symbols: &[usize]) -> Vec<String> {
    symbols
        .iter()
        .map(|&s| alphabet.name(Letter::new(s, false)))
        .collect()
}

fn rank2_summary(map: &BasisMap, text: &mut String) -> Result<Value> {
    let m: AbelianizationMatrix = map.abelianization();
    let det = m.determinant();
    let trace = m.square().trace();
    let growth = map.growth_rank2()?;
    let _ = writeln!(text, "abelianization={}", rows_text(&m.0));
    let _ = writeln!(text, "det={det}");
    let _ = writeln!(text, "trace_square={trace}");
    Ok(json!({
        "abelianization": m.0,
        "det": det,
        "trace_square": trace,
        "growth": growth,
    }))
}

fn strata_summary(f: &StratifiedGraphMap, text: &mut String) -> Result<(Value, bool)> {
    let edges = f.graph().edges();
    let mut rows = Vec::new();
    for s in f.classify_strata()? {
        let names = edge_names(edges, &s.edges);
        let kind = serde_json::to_value(s.kind).expect("kind serializes");
        let _ = write!(
            text,
            "height={} kind={} edges={}",
            s.height,
            kind.as_str().unwrap_or_default(),
            names.join(",")
        );
        if let (Some(lambda), Some(residual)) = (s.lambda, s.residual) {
            let _ = write!(text, " lambda={lambda:.6} residual={residual:.1e}");
        }
        if let Some(aperiodic) = s.aperiodic {
            let _ = write!(text, " aperiodic={aperiodic}");
        }
        if let Some(u) = &s.suffix {
            let _ = write!(text, " suffix={}", edges.format(u));
        }
        text.push('\n');
        rows.push(json!({
            "height": s.height,
            "kind": kind,
            "edges": names,
            "matrix": matrix_rows(&s.matrix),
            "lambda": s.lambda,
            "residual": s.residual,
            "aperiodic": s.aperiodic,
            "suffix": s.suffix.as_ref().map(|u| edges.format(u)),
        }));
    }
    let mut value = json!({ "strata": rows });
    let decided = match f.growth_classify() {
        Ok(g) => {
            let _ = writeln!(text, "growth={g:?}");
            value["growth"] = json!(g);
            true
        }
        Err(Error::RequiresRefinement(h)) => {
            let _ = writeln!(
                text,
                "growth=undetermined (stratum {h} requires refinement)"
            );
            value["growth"] = Value::Null;
            value["requires_refinement"] = json!(h);
            false
        }
        Err(e) => return Err(e),
    };
    Ok((value, decided))
}

fn classify(s: &Session, name: &str) -> Result<Report> {
    let mut text = String::new();
    let (mut value, decided) = match s.get(name)? {
        Item::Autom(d) if d.heights.is_none() => {
            if d.map.rank() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "`{name}` has rank {}: declare `heights` to classify through its strata",
                    d.map.rank()
                )));
            }
            let v = rank2_summary(&d.map, &mut text)?;
            let _ = writeln!(text, "growth={:?}", d.map.growth_rank2()?);
            (v, true)
        }
        Item::Autom(d) => {
            let f = d.rose()?;
            let (mut v, decided) = strata_summary(&f, &mut text)?;
            if d.map.rank() == 2 {
                let mut extra = String::new();
                let r2 = rank2_summary(&d.map, &mut extra)?;
                text.push_str(&extra);
                v["rank2"] = r2;
            }
            (v, decided)
        }
        Item::GraphMap(d) => strata_summary(&d.map, &mut text)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "`{}` is not an autom or graphmap",
                other.name()
            )))
        }
    };
    value["command"] = json!("classify");
    value["name"] = json!(name);
    Ok(if decided {
        Report::definite(text, value)
    } else {
        Report::undecided(text, value)
    })
}

/// A map whose iterates can be listed: σ, an automorphism, or `f_#`.
enum Iterable {
    Subst(Substitution),
    Autom(BasisMap),
    Graph(StratifiedGraphMap),
}

impl Iterable {
    fn lookup(s: &Session, name: &str) -> Result<Self> {
        Ok(match s.get(name)? {
            Item::Subst(d) => Iterable::Subst(d.substitution.clone()),
            Item::Autom(d) => Iterable::Autom(d.map.clone()),
            Item::GraphMap(d) => Iterable::Graph(d.map.clone()),
            Item::Alphabet(_) => {
                return Err(Error::InvalidArgument(format!(
                    "`{name}` is an alphabet, not a map"
                )))
            }
        })
    }

    fn alphabet(&self) -> &InverseAlphabet {
        match self {
            Iterable::Subst(s) => s.alphabet(),
            Iterable::Autom(m) => m.alphabet(),
            Iterable::Graph(f) => f.graph().edges(),
        }
    }

    /// The word and its iterates up to `depth`.
    fn orbit(&self, word: &str, depth: usize, cap: usize) -> Result<Vec<Word>> {
        let mut out = Vec::with_capacity(depth + 1);
        match self {
            Iterable::Subst(s) => {
                let mut cur = s.alphabet().parse_word(word)?;
                out.push(cur.clone());
                for _ in 0..depth {
                    cur = s.iterate_capped(&cur, 1, cap)?;
                    out.push(cur.clone());
                }
            }
            Iterable::Autom(m) => {
                let mut cur = reduce(&m.alphabet().parse_word(word)?);
                out.push(cur.as_word().clone());
                for _ in 0..depth {
                    cur = m.apply_capped(&cur, cap)?;
                    out.push(cur.as_word().clone());
                }
            }
            Iterable::Graph(f) => {
                let mut cur: EdgePath = f.graph().parse_path(word)?;
                out.push(cur.edges().clone());
                for _ in 0..depth {
                    cur = f.f_sharp_capped(&cur, 1, cap)?;
                    out.push(cur.edges().clone());
                }
            }
        }
        Ok(out)
    }
}

fn orbit(s: &Session, name: &str, word: &str, depth: usize, cap: usize) -> Result<Report> {
    let map = Iterable::lookup(s, name)?;
    let words = map.orbit(word, depth, cap)?;
    let alphabet = map.alphabet();
    let mut text = String::new();
    let mut rows = Vec::new();
    for (p, w) in words.iter().enumerate().skip(1) {
        let shown = alphabet.format(w);
        let _ = writeln!(text, "{name}^{p}({word}) = {shown}");
        rows.push(json!({ "power": p, "word": shown, "length": w.len() }));
    }
    Ok(Report::definite(
        text,
        json!({ "command": "orbit", "map": name, "word": word, "depth": depth, "orbit": rows }),
    ))
}

fn power_index(s: &Session, name: &str, seed: &str, depth: usize, cap: usize) -> Result<Report> {
    let map = Iterable::lookup(s, name)?;
    let words = map.orbit(seed, depth, cap)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut max = 0;
    for (p, w) in words.iter().enumerate() {
        let index = max_power_index(w);
        max = max.max(index);
        let _ = writeln!(text, "p={p} length={} index={index}", w.len());
        rows.push(json!({ "power": p, "length": w.len(), "index": index }));
    }
    let _ = writeln!(text, "max={max}");
    Ok(Report::definite(
        text,
        json!({ "command": "power-index", "map": name, "seed": seed, "depth": depth, "profile": rows, "max": max }),
    ))
}

fn pf(s: &Session, name: &str) -> Result<Report> {
    let (alphabet, symbols, lambda, residual, vector) = match s.get(name)? {
        Item::Subst(d) => {
            let a = d.substitution.alphabet();
            let r = d
                .substitution
                .transition_matrix()
                .pf_eigenvalue(PF_TOLERANCE)?;
            (
                a.clone(),
                (0..a.rank()).collect(),
                r.lambda,
                r.residual,
                r.eigvec,
            )
        }
        Item::Autom(_) | Item::GraphMap(_) => {
            let f = s.graph_map(name)?;
            let m = f.pf_metric()?;
            (
                f.graph().edges().clone(),
                m.red_edges,
                m.lambda,
                m.residual,
                m.lengths,
            )
        }
        Item::Alphabet(_) => {
            return Err(Error::InvalidArgument(format!(
                "`{name}` is an alphabet, not a map"
            )))
        }
    };
    let names = edge_names(&alphabet, &symbols);
    let shown: Vec<String> = names
        .iter()
        .zip(&vector)
        .map(|(n, v)| format!("{n}:{v:.6}"))
        .collect();
    let text = format!(
        "lambda={lambda:.6}\nresidual={residual:.1e}\neigenvector={}\n",
        shown.join(" ")
    );
    let entries: Vec<Value> = names
        .iter()
        .zip(&vector)
        .map(|(n, v)| json!({ "letter": n, "weight": v }))
        .collect();
    Ok(Report::definite(
        text,
        json!({ "command": "pf", "name": name, "lambda": lambda, "residual": residual, "eigenvector": entries }),
    ))
}

fn period(s: &Session, name: &str, letter: &str, bound: usize) -> Result<Report> {
    let sigma = &s.subst(name)?.substitution;
    let a = sigma
        .alphabet()
        .letter(letter)
        .ok_or_else(|| Error::UnknownLetter(letter.to_string()))?;
    let base = json!({ "command": "period", "subst": name, "letter": letter, "bound": bound });
    let mut value = base;
    match sigma.detect_shift_period(a, bound)? {
        PeriodicityVerdict::Periodic { period, q } => {
            let u = sigma.alphabet().format(&period);
            value["verdict"] = json!("periodic");
            value["period"] = json!(u);
            value["q"] = json!(q);
            Ok(Report::definite(
                format!("periodic period={u} q={q}\n"),
                value,
            ))
        }
        PeriodicityVerdict::NoPeriodUpTo { bound } => {
            match sigma.irrational_pf_certificate(PF_TOLERANCE).ok().flatten() {
                Some(c) => {
                    value["verdict"] = json!("aperiodic");
                    value["lambda_lower"] = json!(c.lower);
                    value["lambda_upper"] = json!(c.upper);
                    Ok(Report::definite(
                        format!(
                            "aperiodic certified lambda_lower={:.6} lambda_upper={:.6}\n",
                            c.lower, c.upper
                        ),
                        value,
                    ))
                }
                None => {
                    value["verdict"] = json!("no_period_up_to");
                    Ok(Report::undecided(
                        format!("no period up to {bound}\n"),
                        value,
                    ))
                }
            }
        }
    }
}

fn red(s: &Session, name: &str, word: &str, depth: usize, cap: usize) -> Result<Report> {
    let f = s.graph_map(name)?;
    let k = f.top_exponential_stratum()?.height;
    let edges = f.graph().edges();
    let alpha = f.graph().parse_path(word)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    for p in 0..=depth {
        let image = f.f_sharp_capped(&alpha, p, cap)?;
        let path = edges.format(image.edges());
        let red_word = edges.format(&f.red_projection(image.edges(), k));
        let (split, colors) = match f.yellow_red_split(&image, k) {
            Ok(pieces) => {
                let split: Vec<String> = pieces
                    .iter()
                    .map(|(_, piece)| edges.format(piece.edges()))
                    .collect();
                let colors: String = pieces
                    .iter()
                    .map(|(c, _)| if *c == Color::Red { 'R' } else { 'Y' })
                    .collect();
                (Some(split), Some(colors))
            }
            Err(Error::NotLegal(_)) => (None, None),
            Err(e) => return Err(e),
        };
        let commutes = match f.red_commutation_check(&alpha, p) {
            Ok(b) => Some(b),
            Err(Error::NotLegal(_)) => None,
            Err(e) => return Err(e),
        };
        let _ = writeln!(
            text,
            "p={p} length={} path={path} split={} colors={} red={red_word} commutes={}",
            image.len(),
            split
                .as_ref()
                .map_or("not_legal".to_string(), |s| s.join("|")),
            colors.as_deref().unwrap_or("-"),
            commutes.map_or("not_legal".to_string(), |b| b.to_string()),
        );
        rows.push(json!({
            "power": p,
            "length": image.len(),
            "path": path,
            "split": split,
            "colors": colors,
            "red": red_word,
            "commutes": commutes,
        }));
    }
    Ok(Report::definite(
        text,
        json!({ "command": "red", "graphmap": name, "word": word, "height": k, "iterates": rows }),
    ))
}

fn audit_yellow(s: &Session, name: &str, edge: &str, depth: usize) -> Result<Report> {
    let f = s.graph_map(name)?;
    let edges = f.graph().edges();
    let e = edges
        .letter(edge)
        .ok_or_else(|| Error::UnknownLetter(edge.to_string()))?;
    let audit = f.yellow_loop_audit(e, depth)?;
    let vertices = f.graph().vertices();
    let mut text = String::new();
    let mut rows = Vec::new();
    for piece in &audit.pieces {
        let w = edges.format(piece.path.edges());
        let _ = writeln!(
            text,
            "p={} offset={} piece={w} from={} to={} loop={}",
            piece.power,
            piece.offset,
            vertices[piece.path.start()],
            vertices[piece.path.end()],
            piece.path.is_loop()
        );
        rows.push(json!({
            "power": piece.power,
            "offset": piece.offset,
            "piece": w,
            "from": vertices[piece.path.start()],
            "to": vertices[piece.path.end()],
            "loop": piece.path.is_loop(),
        }));
    }
    let witness = audit.witness().map(|p| edges.format(p.path.edges()));
    match &witness {
        Some(w) => {
            let _ = writeln!(text, "verdict=fail witness={w}");
        }
        None => {
            let _ = writeln!(text, "verdict=pass");
        }
    }
    Ok(Report::definite(
        text,
        json!({
            "command": "audit-yellow",
            "graphmap": name,
            "edge": edge,
            "depth": depth,
            "pieces": rows,
            "passed": audit.passed(),
            "witness": witness,
        }),
    ))
}

fn moves(
    alphabet: &InverseAlphabet,
    word: &str,
    join: Option<&str>,
    params: &MoveParams,
    budget: SearchBudget,
) -> Result<Report> {
    let w = reduce(&alphabet.parse_word(word)?);
    let mut value = json!({
        "command": "moves",
        "word": alphabet.format(&w),
        "n": params.n(),
        "xi": params.xi().to_string(),
        "min_exponent": params.min_exponent(),
    });
    let Some(other) = join else {
        let mut text = String::new();
        let mut rows = Vec::new();
        for mv in find_elementary_moves(&w, params) {
            let period = alphabet.format(&mv.run.period);
            let result = alphabet.format(&mv.result);
            let _ = writeln!(
                text,
                "position={} period={period} m={} result={result} length={}",
                mv.position(),
                mv.multiplicity(),
                mv.result.len()
            );
            rows.push(json!({
                "position": mv.position(),
                "period": period,
                "m": mv.multiplicity(),
                "result": result,
                "length": mv.result.len(),
            }));
        }
        value["moves"] = json!(rows);
        return Ok(Report::definite(text, value));
    };
    let v = reduce(&alphabet.parse_word(other)?);
    value["join"] = json!(alphabet.format(&v));
    let outcome = common_descendant_search(&w, &v, params, budget);
    let text = outcome.trace(alphabet);
    let side = |moves: &[crate::burnside::MoveRecord]| -> Vec<Value> {
        moves
            .iter()
            .map(|m| {
                json!({
                    "position": m.position,
                    "period": alphabet.format(&m.period),
                    "m": m.multiplicity,
                    "length": m.result_len(),
                })
            })
            .collect()
    };
    match &outcome {
        SearchOutcome::Joined {
            witness,
            left,
            right,
        } => {
            value["verdict"] = json!("joined");
            value["witness"] = json!(alphabet.format(witness));
            value["left"] = json!(side(left));
            value["right"] = json!(side(right));
            Ok(Report::definite(text, value))
        }
        SearchOutcome::Undecided {
            explored_left,
            explored_right,
            budget_exhausted,
        } => {
            value["verdict"] = json!("undecided");
            value["explored_left"] = json!(explored_left);
            value["explored_right"] = json!(explored_right);
            value["budget_exhausted"] = json!(budget_exhausted);
            Ok(Report::undecided(text, value))
        }
    }
}

fn burnside_order(s: &Session, name: &str, rank: usize, exp: u32, max_k: u64) -> Result<Report> {
    let map = &s.autom(name)?.map;
    if map.rank() != rank {
        return Err(Error::InvalidArgument(format!(
            "`{name}` has rank {}, not {rank}",
            map.rank()
        )));
    }
    let q = burnside_oracle(rank, exp)?;
    let verdict = induced_order(map, &q, max_k)?;
    let mut value = json!({
        "command": "burnside-order",
        "autom": name,
        "rank": rank,
        "exp": exp,
        "group_order": q.order(),
        "certified": q.is_certified(),
    });
    match verdict {
        InducedOrder::Order { k } => {
            value["order"] = json!(k);
            Ok(Report::definite(format!("{k}\n"), value))
        }
        InducedOrder::ExceedsBound { max_k } => {
            value["order"] = Value::Null;
            value["max_k"] = json!(max_k);
            Ok(Report::undecided(
                format!("exceeds bound max_k={max_k}\n"),
                value,
            ))
        }
    }
}

fn tc(
    alphabet: &InverseAlphabet,
    rank: usize,
    relators: &Path,
    max_cosets: usize,
    csv: Option<&Path>,
) -> Result<Report> {
    if alphabet.rank() < rank {
        return Err(Error::InvalidArgument(format!(
            "alphabet has {} letters, fewer than rank {rank}",
            alphabet.rank()
        )));
    }
    let text = std::fs::read_to_string(relators)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", relators.display())))?;
    let mut words = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let w = alphabet.parse_word(line).map_err(|e| Error::Parse {
            line: i + 1,
            column: 1,
            message: format!("{}: {e}", relators.display()),
        })?;
        words.push(reduce(&w).cyclic_reduce());
    }
    let mut value = json!({
        "command": "tc",
        "rank": rank,
        "relators": words.len(),
        "max_cosets": max_cosets,
    });
    match todd_coxeter(rank, &words, max_cosets) {
        Ok(table) => {
            let stats = table.stats();
            if let Some(path) = csv {
                std::fs::write(path, table.to_csv(alphabet)).map_err(|e| {
                    Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
                })?;
            }
            value["cosets"] = json!(table.len());
            value["defined"] = json!(stats.defined);
            value["max_live"] = json!(stats.max_live);
            Ok(Report::definite(
                format!(
                    "cosets={} defined={} max_live={}\n",
                    table.len(),
                    stats.defined,
                    stats.max_live
                ),
                value,
            ))
        }
        Err(Error::CosetLimit {
            limit,
            defined,
            live,
        }) => {
            value["cosets"] = Value::Null;
            value["defined"] = json!(defined);
            value["live"] = json!(live);
            Ok(Report::undecided(
                format!("coset limit {limit} reached defined={defined} live={live}\n"),
                value,
            ))
        }
        Err(e) => Err(e),
    }
}
