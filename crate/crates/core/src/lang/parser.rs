use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::lexer::{Tok, Token};
use super::{Diagnostic, SourceMap, Span, Unit};
use crate::model::{
    AutomatonEdge, BuchiSpec, Command, ExplicitRanking, FiniteCase, Label, Letter, LinSys, PiecewiseRanking,
    Proposition, Rank, Ranking, StateCases, SymbolicSystem, VarDecl, MAX_PROPOSITIONS,
};

type PResult<T> = Result<T, Diagnostic>;

/// Affine expression: coefficient per (variable, primed) plus a constant.
#[derive(Default, Clone)]
struct Affine {
    terms: BTreeMap<(usize, bool), BigInt>,
    constant: BigInt,
}

impl Affine {
    fn add(&mut self, other: Affine, sign: i32) {
        for (k, v) in other.terms {
            let e = self.terms.entry(k).or_default();
            if sign < 0 {
                *e -= v;
            } else {
                *e += v;
            }
        }
        if sign < 0 {
            self.constant -= other.constant;
        } else {
            self.constant += other.constant;
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Rel {
    Le,
    Ge,
    Eq,
}

/// Which variables an expression may mention.
struct Scope<'a> {
    names: &'a [String],
    primed: bool,
}

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    bound: u64,
}

/// Raw ranking items before the form (table or piecewise) is known.
enum RankItem {
    Case(FiniteCase),
    Inf(LinSys),
    Table(Vec<Rank>),
}

impl Parser {
    pub fn new(toks: Vec<Token>, bound: u64) -> Self {
        Parser { toks, pos: 0, bound }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == kw)
    }

    fn unexpected(&self, expected: &[&str]) -> Diagnostic {
        let mut d = Diagnostic::new(self.span(), format!("unexpected {}", self.peek().describe()));
        d.expected = expected.iter().map(|s| format!("`{s}`")).collect();
        d
    }

    fn sym(&mut self, s: &str) -> PResult<Span> {
        if self.is_sym(s) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[s]))
        }
    }

    fn kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[kw]))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => {
                let mut d = self.unexpected(&[]);
                d.expected = vec!["identifier".into()];
                Err(d)
            }
        }
    }

    fn signed_int(&mut self) -> PResult<(BigInt, Span)> {
        let span = self.span();
        let neg = if self.is_sym("-") {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok((if neg { -v } else { v }, span))
            }
            _ => {
                let mut d = self.unexpected(&[]);
                d.expected = vec!["integer".into()];
                Err(d)
            }
        }
    }

    fn small_int(&mut self) -> PResult<i64> {
        let (v, span) = self.signed_int()?;
        v.to_i64().ok_or_else(|| Diagnostic::new(span, format!("integer {v} out of range")))
    }

    fn check_bound(&self, v: &BigInt, span: Span) -> PResult<i64> {
        if v.abs() > BigInt::from(self.bound) {
            return Err(Diagnostic::new(span, format!("coefficient overflow: {v} exceeds bound {}", self.bound)));
        }
        Ok(v.to_i64().expect("bounded value fits i64"))
    }

    pub fn unit(mut self) -> Result<(Unit, SourceMap), Vec<Diagnostic>> {
        self.unit_inner().map_err(|d| vec![d])
    }

    fn unit_inner(&mut self) -> PResult<(Unit, SourceMap)> {
        let mut map = SourceMap::default();
        let system = if self.is_kw("system") { Some(self.system(&mut map)?) } else { None };
        if !self.is_kw("automaton") {
            return Err(self.unexpected(if system.is_some() { &["automaton"] } else { &["system", "automaton"] }));
        }
        let spec = self.automaton(system.as_ref(), &mut map)?;
        let ranking = self.ranking(&spec, &mut map)?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected(&["end of input"]));
        }
        Ok((Unit { system, spec, ranking }, map))
    }

    // ---- expressions -------------------------------------------------------

    fn var_ref(&mut self, scope: &Scope) -> PResult<(usize, bool)> {
        let (name, span) = self.ident()?;
        let idx = scope
            .names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Diagnostic::new(span, format!("unknown variable `{name}`")))?;
        let primed = if self.is_sym("'") {
            self.bump();
            if !scope.primed {
                return Err(Diagnostic::new(span, format!("primed variable `{name}'` not allowed here")));
            }
            true
        } else {
            false
        };
        Ok((idx, primed))
    }

    fn term(&mut self, scope: &Scope) -> PResult<Affine> {
        let mut a = Affine::default();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                if self.is_sym("*") {
                    self.bump();
                    let key = self.var_ref(scope)?;
                    a.terms.insert(key, v);
                } else {
                    a.constant = v;
                }
            }
            Tok::Ident(_) => {
                let key = self.var_ref(scope)?;
                a.terms.insert(key, BigInt::from(1));
            }
            _ => {
                let mut d = self.unexpected(&[]);
                d.expected = vec!["integer".into(), "variable".into()];
                return Err(d);
            }
        }
        Ok(a)
    }

    fn affine(&mut self, scope: &Scope) -> PResult<Affine> {
        let mut sign = 1;
        if self.is_sym("-") {
            self.bump();
            sign = -1;
        } else if self.is_sym("+") {
            self.bump();
        }
        let mut acc = Affine::default();
        let t = self.term(scope)?;
        acc.add(t, sign);
        loop {
            let sign = if self.is_sym("+") {
                1
            } else if self.is_sym("-") {
                -1
            } else {
                break;
            };
            self.bump();
            let t = self.term(scope)?;
            acc.add(t, sign);
        }
        Ok(acc)
    }

    fn relation(&mut self) -> PResult<Rel> {
        match self.peek() {
            Tok::Sym("<=") => {
                self.bump();
                Ok(Rel::Le)
            }
            Tok::Sym(">=") => {
                self.bump();
                Ok(Rel::Ge)
            }
            Tok::Sym("=") => {
                self.bump();
                Ok(Rel::Eq)
            }
            Tok::Sym("<") | Tok::Sym(">") => {
                Err(Diagnostic::new(self.span(), "strict inequalities unsupported; use <= or >="))
            }
            _ => Err(self.unexpected(&["<=", ">=", "="])),
        }
    }

    /// One constraint as rows over `width` columns (`n` unprimed, then primed).
    fn constraint(&mut self, scope: &Scope, n: usize) -> PResult<Vec<(Vec<i64>, i64)>> {
        let span = self.span();
        let lhs = self.affine(scope)?;
        let rel = self.relation()?;
        let rhs = self.affine(scope)?;
        let mut diff = lhs;
        diff.add(rhs, -1);
        let width = if scope.primed { 2 * n } else { n };
        let mut row = vec![0i64; width];
        for ((idx, primed), v) in &diff.terms {
            if v.is_zero() {
                continue;
            }
            row[idx + if *primed { n } else { 0 }] = self.check_bound(v, span)?;
        }
        let b = self.check_bound(&-diff.constant.clone(), span)?;
        let neg: Vec<i64> = row.iter().map(|v| -v).collect();
        Ok(match rel {
            Rel::Le => vec![(row, b)],
            Rel::Ge => vec![(neg, -b)],
            Rel::Eq => vec![(row, b), (neg, -b)],
        })
    }

    fn linsys(&mut self, scope: &Scope, n: usize) -> PResult<LinSys> {
        let width = if scope.primed { 2 * n } else { n };
        let mut sys = LinSys::new(width);
        if self.is_kw("true") {
            self.bump();
            return Ok(sys);
        }
        loop {
            for (row, b) in self.constraint(scope, n)? {
                sys.push(row, b);
            }
            if !self.is_sym(",") {
                break;
            }
            self.bump();
        }
        Ok(sys)
    }

    // ---- system ------------------------------------------------------------

    fn system(&mut self, map: &mut SourceMap) -> PResult<SymbolicSystem> {
        self.kw("system")?;
        self.sym("{")?;
        let mut vars: Vec<VarDecl> = Vec::new();
        while self.is_kw("var") {
            self.bump();
            let (name, span) = self.ident()?;
            if vars.iter().any(|v| v.name == name) {
                return Err(Diagnostic::new(span, format!("variable `{name}` declared twice")));
            }
            self.kw("in")?;
            self.sym("[")?;
            let lo = self.small_int()?;
            self.sym(",")?;
            let hi = self.small_int()?;
            self.sym("]")?;
            self.sym(";")?;
            if lo > hi {
                return Err(Diagnostic::new(span, format!("empty range [{lo}, {hi}] for `{name}`")));
            }
            vars.push(VarDecl { name, lo, hi });
            map.vars.push(span);
        }
        let names: Vec<String> = vars.iter().map(|v| v.name.clone()).collect();
        let n = names.len();
        self.kw("init")?;
        self.sym(":")?;
        let init = self.linsys(&Scope { names: &names, primed: false }, n)?;
        self.sym(";")?;

        let mut commands: Vec<Command> = Vec::new();
        while self.is_kw("command") {
            self.bump();
            let (name, span) = self.ident()?;
            if commands.iter().any(|c| c.name == name) {
                return Err(Diagnostic::new(span, format!("command `{name}` defined twice")));
            }
            self.sym(":")?;
            self.kw("guard")?;
            let guard = self.linsys(&Scope { names: &names, primed: false }, n)?;
            self.kw("update")?;
            let relation = self.update(&names, guard)?;
            self.sym(";")?;
            commands.push(Command { name, relation });
            map.commands.push(span);
        }
        self.sym("}")?;
        Ok(SymbolicSystem { vars, init, commands })
    }

    fn update(&mut self, names: &[String], guard: LinSys) -> PResult<LinSys> {
        let n = names.len();
        let mut rel = guard.embed(2 * n, 0);
        let mut mentioned = vec![false; n];
        if self.is_kw("skip") {
            self.bump();
        } else {
            loop {
                if self.is_kw("havoc") {
                    self.bump();
                    let (idx, _) = self.var_ref(&Scope { names, primed: true })?;
                    mentioned[idx] = true;
                } else {
                    for (row, b) in self.constraint(&Scope { names, primed: true }, n)? {
                        for (k, m) in mentioned.iter_mut().enumerate() {
                            *m |= row[n + k] != 0;
                        }
                        rel.push(row, b);
                    }
                }
                if !self.is_sym(",") {
                    break;
                }
                self.bump();
            }
        }
        for k in (0..n).filter(|&k| !mentioned[k]) {
            let mut row = vec![0i64; 2 * n];
            row[n + k] = 1;
            row[k] = -1;
            let neg: Vec<i64> = row.iter().map(|v| -v).collect();
            rel.push(row, 0);
            rel.push(neg, 0);
        }
        Ok(rel)
    }

    // ---- automaton ---------------------------------------------------------

    fn id_list(&mut self) -> PResult<Vec<(String, Span)>> {
        let mut out = Vec::new();
        if self.is_sym(";") {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if !self.is_sym(",") {
                break;
            }
            self.bump();
        }
        Ok(out)
    }

    fn automaton(&mut self, system: Option<&SymbolicSystem>, map: &mut SourceMap) -> PResult<BuchiSpec> {
        self.kw("automaton")?;
        self.sym("{")?;
        let mut vars: Vec<String> = system.map(|s| s.var_names()).unwrap_or_default();
        if self.is_kw("vars") {
            let span = self.bump().span;
            self.sym(":")?;
            let listed: Vec<String> = self.id_list()?.into_iter().map(|(s, _)| s).collect();
            self.sym(";")?;
            if system.is_some() && listed != vars {
                return Err(Diagnostic::new(span, "automaton vars differ from the system's variables"));
            }
            vars = listed;
        }
        self.kw("states")?;
        self.sym(":")?;
        let states = self.id_list()?;
        self.sym(";")?;
        if states.is_empty() {
            return Err(Diagnostic::new(self.span(), "automaton needs at least one state"));
        }
        for (i, (s, span)) in states.iter().enumerate() {
            if states[..i].iter().any(|(t, _)| t == s) {
                return Err(Diagnostic::new(*span, format!("state `{s}` declared twice")));
            }
        }
        map.states = states.iter().map(|(_, s)| *s).collect();
        let state_names: Vec<String> = states.into_iter().map(|(s, _)| s).collect();
        let lookup = |name: &str, span: Span| {
            state_names
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Diagnostic::new(span, format!("unknown automaton state `{name}`")))
        };

        self.kw("init")?;
        self.sym(":")?;
        let mut init = Vec::new();
        for (name, span) in self.id_list()? {
            let q = lookup(&name, span)?;
            if !init.contains(&q) {
                init.push(q);
            }
        }
        self.sym(";")?;

        self.kw("aps")?;
        self.sym(":")?;
        let mut props: Vec<Proposition> = Vec::new();
        if !self.is_sym(";") {
            loop {
                let (name, span) = self.ident()?;
                if props.iter().any(|p| p.name == name) {
                    return Err(Diagnostic::new(span, format!("proposition `{name}` declared twice")));
                }
                let predicate = if self.is_sym(":=") {
                    self.bump();
                    let rows = self.constraint(&Scope { names: &vars, primed: false }, vars.len())?;
                    if rows.len() != 1 {
                        return Err(Diagnostic::new(span, "a predicate must be a single inequality"));
                    }
                    rows.into_iter().next()
                } else {
                    None
                };
                props.push(Proposition { name, predicate });
                if !self.is_sym(",") {
                    break;
                }
                self.bump();
            }
        }
        self.sym(";")?;
        if props.len() > MAX_PROPOSITIONS {
            return Err(Diagnostic::new(self.span(), format!("at most {MAX_PROPOSITIONS} propositions supported")));
        }

        self.kw("trans")?;
        self.sym(":")?;
        let mut edges = Vec::new();
        while !self.is_sym("}") {
            let (from, span) = self.ident()?;
            let from = lookup(&from, span)?;
            self.sym("--")?;
            let label = if self.is_kw("true") {
                self.bump();
                Label::True
            } else {
                self.sym("{")?;
                let mut letter = Letter::empty();
                for (name, span) in self.id_list_until("}")? {
                    let i = props
                        .iter()
                        .position(|p| p.name == name)
                        .ok_or_else(|| Diagnostic::new(span, format!("unknown proposition `{name}`")))?;
                    letter.0 |= 1 << i;
                }
                self.sym("}")?;
                Label::Exactly(letter)
            };
            self.sym("-->")?;
            let (to, tspan) = self.ident()?;
            let to = lookup(&to, tspan)?;
            let fair = if self.is_kw("fair") {
                self.bump();
                true
            } else {
                false
            };
            self.sym(";")?;
            edges.push(AutomatonEdge { from, label, to, fair });
            map.edges.push(span);
        }
        self.sym("}")?;
        Ok(BuchiSpec { vars, states: state_names, init, props, edges })
    }

    fn id_list_until(&mut self, end: &str) -> PResult<Vec<(String, Span)>> {
        let mut out = Vec::new();
        if self.is_sym(end) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if !self.is_sym(",") {
                break;
            }
            self.bump();
        }
        Ok(out)
    }

    // ---- ranking -----------------------------------------------------------

    fn ranking(&mut self, spec: &BuchiSpec, map: &mut SourceMap) -> PResult<Ranking> {
        self.kw("ranking")?;
        self.sym("{")?;
        let nq = spec.num_states();
        let n = spec.vars.len();
        let scope = Scope { names: &spec.vars, primed: false };
        let mut blocks: Vec<Option<Vec<RankItem>>> = (0..nq).map(|_| None).collect();
        map.ranking = vec![None; nq];
        while self.is_kw("at") {
            self.bump();
            let (name, span) = self.ident()?;
            let q = spec
                .state_index(&name)
                .ok_or_else(|| Diagnostic::new(span, format!("unknown automaton state `{name}`")))?;
            if blocks[q].is_some() {
                return Err(Diagnostic::new(span, format!("ranking for `{name}` given twice")));
            }
            map.ranking[q] = Some(span);
            self.sym(":")?;
            let mut items = Vec::new();
            loop {
                if self.is_kw("case") {
                    let span = self.bump().span;
                    let guard = self.linsys(&scope, n)?;
                    self.sym("=>")?;
                    let value = self.affine(&scope)?;
                    self.sym(";")?;
                    let mut weights = vec![0i64; n];
                    for ((idx, _), v) in &value.terms {
                        weights[*idx] = self.check_bound(v, span)?;
                    }
                    let offset = self.check_bound(&value.constant, span)?;
                    items.push(RankItem::Case(FiniteCase { weights, offset, guard }));
                } else if self.is_kw("inf") {
                    self.bump();
                    let region = self.linsys(&scope, n)?;
                    self.sym(";")?;
                    items.push(RankItem::Inf(region));
                } else if self.is_kw("table") {
                    self.bump();
                    self.sym("[")?;
                    let mut values = Vec::new();
                    if !self.is_sym("]") {
                        loop {
                            if self.is_kw("inf") {
                                self.bump();
                                values.push(Rank::Infinite);
                            } else {
                                let (v, span) = self.signed_int()?;
                                let v = v
                                    .to_u64()
                                    .ok_or_else(|| Diagnostic::new(span, format!("rank {v} is not a natural number")))?;
                                values.push(Rank::Finite(v));
                            }
                            if !self.is_sym(",") {
                                break;
                            }
                            self.bump();
                        }
                    }
                    self.sym("]")?;
                    self.sym(";")?;
                    items.push(RankItem::Table(values));
                } else {
                    break;
                }
            }
            blocks[q] = Some(items);
        }
        let end = self.sym("}")?;

        let has_table = blocks.iter().flatten().flatten().any(|i| matches!(i, RankItem::Table(_)));
        if has_table {
            let mut columns = Vec::with_capacity(nq);
            for (q, block) in blocks.into_iter().enumerate() {
                let items = block.ok_or_else(|| {
                    Diagnostic::new(end, format!("missing table for automaton state `{}`", spec.states[q]))
                })?;
                match <[RankItem; 1]>::try_from(items) {
                    Ok([RankItem::Table(values)]) => columns.push(values),
                    _ => {
                        return Err(Diagnostic::new(
                            map.ranking[q].unwrap_or(end),
                            "a table ranking needs exactly one `table` per automaton state",
                        ))
                    }
                }
            }
            let len = columns[0].len();
            if columns.iter().any(|c| c.len() != len) {
                return Err(Diagnostic::new(end, "ranking tables have different lengths"));
            }
            let table = (0..len).map(|s| columns.iter().map(|c| c[s]).collect()).collect();
            Ok(Ranking::Table(ExplicitRanking { table }))
        } else {
            let cases = blocks
                .into_iter()
                .map(|block| {
                    let mut at = StateCases::default();
                    for item in block.unwrap_or_default() {
                        match item {
                            RankItem::Case(c) => at.finite.push(c),
                            RankItem::Inf(r) => at.infinite.push(r),
                            RankItem::Table(_) => unreachable!(),
                        }
                    }
                    at
                })
                .collect();
            Ok(Ranking::Piecewise(PiecewiseRanking { cases }))
        }
    }
}
