use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ast::Expr;
use super::parser::{parse_expression, ParseError};
use crate::java::{is_keyword, is_primitive, tokenize, LexError, Token, TokenKind};

/// Requires/ensures clauses of one method. An empty list means `true`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Contract {
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
    pub raw_text: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContractError {
    #[error("no JML annotation found above method `{0}`")]
    NoContractFound(String),
    #[error("method `{0}` not found")]
    MethodNotFound(String),
    #[error("method name `{name}` is declared {count} times")]
    AmbiguousMethod { name: String, count: usize },
    #[error("in clause `{clause}`: {error}")]
    Syntax { clause: String, error: ParseError },
    #[error("unknown JML clause keyword `{0}`")]
    UnknownClause(String),
    #[error("{0}")]
    Scope(String),
    #[error(transparent)]
    Lex(#[from] LexError),
}

impl Contract {
    /// `requires true; ensures true;`
    pub fn vacuous() -> Contract {
        Contract::default()
    }

    /// Builds a contract from clause texts (no keywords, no `;`).
    pub fn from_clauses(requires: &[&str], ensures: &[&str]) -> Result<Contract, ContractError> {
        let parse = |text: &&str| {
            parse_expression(text).map_err(|error| ContractError::Syntax { clause: text.to_string(), error })
        };
        let mut raw = String::new();
        for r in requires {
            raw.push_str(&format!("requires {r};\n"));
        }
        for e in ensures {
            raw.push_str(&format!("ensures {e};\n"));
        }
        Ok(Contract {
            requires: requires.iter().map(parse).collect::<Result<_, _>>()?,
            ensures: ensures.iter().map(parse).collect::<Result<_, _>>()?,
            raw_text: raw,
        })
    }

    /// Conjunction of the requires clauses in source order.
    pub fn precondition(&self) -> Expr {
        Expr::conjunction(self.requires.iter().cloned())
    }

    /// Conjunction of the ensures clauses in source order.
    pub fn postcondition(&self) -> Expr {
        Expr::conjunction(self.ensures.iter().cloned())
    }

    /// Checks that clauses only mention `params` (plus `\result`/`\old` in
    /// ensures clauses).
    pub fn check_scope(&self, params: &[String]) -> Result<(), ContractError> {
        for r in &self.requires {
            if r.mentions_result() {
                return Err(ContractError::Scope(format!("\\result used in precondition `{r}`")));
            }
            if r.mentions_old() {
                return Err(ContractError::Scope(format!("\\old used in precondition `{r}`")));
            }
        }
        for clause in self.requires.iter().chain(&self.ensures) {
            if let Some(name) = clause.free_identifiers().into_iter().find(|n| !params.contains(n)) {
                return Err(ContractError::Scope(format!("`{name}` in `{clause}` is not a parameter")));
            }
        }
        Ok(())
    }

    /// JML block comment carrying these clauses, one per line.
    pub fn to_annotation(&self, indent: &str) -> String {
        let mut out = format!("{indent}/*@\n");
        for r in &self.requires {
            out.push_str(&format!("{indent}  @ requires {r};\n"));
        }
        for e in &self.ensures {
            out.push_str(&format!("{indent}  @ ensures {e};\n"));
        }
        out.push_str(&format!("{indent}  @*/\n"));
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct ContractRepr {
    requires: Vec<String>,
    ensures: Vec<String>,
    raw_text: String,
}

impl Serialize for Contract {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ContractRepr {
            requires: self.requires.iter().map(Expr::to_string).collect(),
            ensures: self.ensures.iter().map(Expr::to_string).collect(),
            raw_text: self.raw_text.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Contract {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ContractRepr::deserialize(d)?;
        let req: Vec<&str> = r.requires.iter().map(String::as_str).collect();
        let ens: Vec<&str> = r.ensures.iter().map(String::as_str).collect();
        let mut c = Contract::from_clauses(&req, &ens).map_err(serde::de::Error::custom)?;
        c.raw_text = r.raw_text;
        Ok(c)
    }
}

/// A method declaration located in Java source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub return_type: String,
    /// (type, name) in declaration order.
    pub params: Vec<(String, String)>,
    /// Index of the name token in the token stream.
    pub name_token: usize,
    /// Index of the first token of the declaration (modifiers included).
    pub first_token: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedContract {
    pub contract: Contract,
    pub method: MethodDecl,
    /// Byte ranges of every JML comment that makes up the contract.
    pub annotation_spans: Vec<Range<usize>>,
}

const MODIFIERS: &[&str] = &[
    "public", "private", "protected", "static", "final", "synchronized", "abstract", "native",
    "strictfp", "default",
];

fn prev_code(tokens: &[Token], mut i: usize) -> Option<usize> {
    while i > 0 {
        i -= 1;
        if !tokens[i].is_comment() {
            return Some(i);
        }
    }
    None
}

fn next_code(tokens: &[Token], mut i: usize) -> Option<usize> {
    i += 1;
    while i < tokens.len() {
        if !tokens[i].is_comment() {
            return Some(i);
        }
        i += 1;
    }
    None
}

fn is_punct(tokens: &[Token], src: &str, i: usize, p: &str) -> bool {
    tokens[i].kind == TokenKind::Punct && tokens[i].text(src) == p
}

// Index of the token closing the bracket opened at `open`.
fn matching_close(tokens: &[Token], src: &str, open: usize, o: &str, c: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in tokens.iter().enumerate().skip(open) {
        if t.kind != TokenKind::Punct {
            continue;
        }
        let text = t.text(src);
        if text == o {
            depth += 1;
        } else if text == c {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

fn matching_open(tokens: &[Token], src: &str, close: usize, o: &str, c: &str) -> Option<usize> {
    let mut depth = 0usize;
    for i in (0..=close).rev() {
        let t = &tokens[i];
        if t.kind != TokenKind::Punct {
            continue;
        }
        let text = t.text(src);
        if text == c || (c == ">" && text == ">>") {
            depth += if text == ">>" { 2 } else { 1 };
        } else if text == o {
            depth = depth.saturating_sub(1);
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// All declarations of methods named `name`.
pub fn find_method_declarations(src: &str, tokens: &[Token], name: &str) -> Vec<MethodDecl> {
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if t.kind != TokenKind::Ident || t.text(src) != name {
            continue;
        }
        let Some(open) = next_code(tokens, i).filter(|&j| is_punct(tokens, src, j, "(")) else { continue };
        let Some(prev) = prev_code(tokens, i) else { continue };
        let prev_text = tokens[prev].text(src);
        let type_like = match tokens[prev].kind {
            TokenKind::Ident => !is_keyword(prev_text) || is_primitive(prev_text),
            TokenKind::Punct => prev_text == "]" || prev_text == ">" || prev_text == ">>",
            _ => false,
        };
        if !type_like {
            continue;
        }
        let Some(close) = matching_close(tokens, src, open, "(", ")") else { continue };
        let Some(after) = next_code(tokens, close) else { continue };
        let after_text = tokens[after].text(src);
        if !(after_text == "{" || after_text == "throws" || after_text == ";") {
            continue;
        }
        let (return_type, type_start) = read_type_backwards(tokens, src, prev);
        let first_token = skip_modifiers_backwards(tokens, src, type_start);
        out.push(MethodDecl {
            name: name.to_string(),
            return_type,
            params: read_params(tokens, src, open, close),
            name_token: i,
            first_token,
        });
    }
    out
}

// Returns the type text ending at `end` and the index of its first token.
fn read_type_backwards(tokens: &[Token], src: &str, end: usize) -> (String, usize) {
    let mut i = end;
    loop {
        let text = tokens[i].text(src);
        if text == "]" {
            match prev_code(tokens, i) {
                Some(j) if is_punct(tokens, src, j, "[") => match prev_code(tokens, j) {
                    Some(k) => {
                        i = k;
                        continue;
                    }
                    None => break,
                },
                _ => break,
            }
        }
        if text == ">" || text == ">>" {
            if let Some(j) = matching_open(tokens, src, i, "<", ">").and_then(|j| prev_code(tokens, j)) {
                i = j;
                continue;
            }
        }
        // Qualified names: a.b.C
        match prev_code(tokens, i) {
            Some(j) if is_punct(tokens, src, j, ".") => match prev_code(tokens, j) {
                Some(k) => i = k,
                None => break,
            },
            _ => break,
        }
    }
    let text: String = tokens[i..=end].iter().filter(|t| !t.is_comment()).map(|t| t.text(src)).collect();
    (text, i)
}

fn skip_modifiers_backwards(tokens: &[Token], src: &str, start: usize) -> usize {
    let mut first = start;
    let mut i = start;
    while let Some(j) = prev_code(tokens, i) {
        let text = tokens[j].text(src);
        if tokens[j].kind == TokenKind::Ident && MODIFIERS.contains(&text) {
            first = j;
            i = j;
            continue;
        }
        // Type parameters of a generic method: <T extends X>
        if text == ">" {
            if let Some(open) = matching_open(tokens, src, j, "<", ">") {
                first = open;
                i = open;
                continue;
            }
        }
        // Java annotations: @Name or @Name(...)
        if text == ")" {
            if let Some(open) = matching_open(tokens, src, j, "(", ")") {
                if let Some(name) = prev_code(tokens, open) {
                    if let Some(at) = prev_code(tokens, name).filter(|&a| is_punct(tokens, src, a, "@")) {
                        first = at;
                        i = at;
                        continue;
                    }
                }
            }
        }
        if tokens[j].kind == TokenKind::Ident {
            if let Some(at) = prev_code(tokens, j).filter(|&a| is_punct(tokens, src, a, "@")) {
                first = at;
                i = at;
                continue;
            }
        }
        break;
    }
    first
}

fn read_params(tokens: &[Token], src: &str, open: usize, close: usize) -> Vec<(String, String)> {
    let mut params = Vec::new();
    let mut current: Vec<&str> = Vec::new();
    let mut depth = 0i32;
    let mut flush = |current: &mut Vec<&str>| {
        // Drop `final` and annotations.
        let mut parts: Vec<&str> = Vec::new();
        let mut k = 0;
        while k < current.len() {
            if current[k] == "@" {
                k += 2;
                continue;
            }
            if current[k] != "final" {
                parts.push(current[k]);
            }
            k += 1;
        }
        let mut suffix = String::new();
        while parts.len() >= 2 && parts[parts.len() - 1] == "]" && parts[parts.len() - 2] == "[" {
            // C-style `int a[]`
            parts.truncate(parts.len() - 2);
            suffix.push_str("[]");
        }
        if let Some(name) = parts.pop() {
            let mut ty: String = parts.concat();
            if let Some(base) = ty.strip_suffix("...") {
                ty = format!("{base}[]");
            }
            ty.push_str(&suffix);
            params.push((ty, name.to_string()));
        }
        current.clear();
    };
    for t in &tokens[open + 1..close] {
        if t.is_comment() {
            continue;
        }
        let text = t.text(src);
        match text {
            "<" => depth += 1,
            ">" => depth -= 1,
            ">>" => depth -= 2,
            "," if depth == 0 => {
                flush(&mut current);
                continue;
            }
            _ => {}
        }
        current.push(text);
    }
    flush(&mut current);
    params
}

/// Locates `method_name` and parses the JML annotations directly above it.
pub fn extract_contract(src: &str, method_name: &str) -> Result<ExtractedContract, ContractError> {
    let tokens = tokenize(src)?;
    let mut decls = find_method_declarations(src, &tokens, method_name);
    let method = match decls.len() {
        0 => return Err(ContractError::MethodNotFound(method_name.to_string())),
        1 => decls.remove(0),
        count => return Err(ContractError::AmbiguousMethod { name: method_name.to_string(), count }),
    };
    // JML comments between the previous declaration and the method header.
    let mut spans = Vec::new();
    let mut i = method.first_token;
    while i > 0 {
        i -= 1;
        match tokens[i].kind {
            TokenKind::Comment { jml: true, .. } => spans.push(tokens[i].span.clone()),
            TokenKind::Comment { jml: false, .. } => {}
            _ => break,
        }
    }
    // Annotations interleaved with modifiers, e.g. `public /*@ pure @*/ int`.
    for t in &tokens[method.first_token..method.name_token] {
        if t.is_jml() {
            spans.push(t.span.clone());
        }
    }
    if spans.is_empty() {
        return Err(ContractError::NoContractFound(method_name.to_string()));
    }
    spans.sort_by_key(|s| s.start);
    let raw_text = spans.iter().map(|s| &src[s.clone()]).collect::<Vec<_>>().join("\n");
    let body: String = spans.iter().map(|s| annotation_body(&src[s.clone()])).collect::<Vec<_>>().join("\n");
    let mut contract = parse_clauses(&body)?;
    contract.raw_text = raw_text;
    let names: Vec<String> = method.params.iter().map(|(_, n)| n.clone()).collect();
    contract.check_scope(&names)?;
    Ok(ExtractedContract { contract, method, annotation_spans: spans })
}

/// Text of a `//@` or `/*@ ... @*/` comment without markers and `@` gutters.
pub fn annotation_body(comment: &str) -> String {
    let inner = if let Some(rest) = comment.strip_prefix("//") {
        rest
    } else {
        let rest = comment.strip_prefix("/*").unwrap_or(comment);
        rest.strip_suffix("*/").unwrap_or(rest)
    };
    let inner = inner.trim_end().trim_end_matches('@');
    inner
        .lines()
        .map(|line| line.trim_start().trim_start_matches('@'))
        .collect::<Vec<_>>()
        .join("\n")
}

// Keywords that open a clause whose contents are ignored.
const IGNORED_CLAUSES: &[&str] = &[
    "assignable", "modifies", "modifiable", "assignable_redundantly", "signals", "signals_only",
    "signals_redundantly", "exsures", "diverges", "when", "measured_by", "accessible", "callable",
    "captures", "working_space", "duration", "loop_invariant", "maintaining", "decreases",
    "decreasing", "loop_modifies", "invariant", "constraint", "initially", "represents",
    "assert", "assume", "set", "ghost", "model", "in", "maps",
];

const PREFIX_WORDS: &[&str] = &[
    "public", "private", "protected", "also", "normal_behavior", "normal_behaviour", "behavior",
    "behaviour", "pure", "spec_public", "spec_protected", "helper", "non_null", "nullable",
    "nullable_by_default", "non_null_by_default", "strictly_pure", "code_java_math",
    "spec_java_math", "spec_bigint_math", "code_bigint_math", "code_safe_math", "spec_safe_math",
    "static", "instance", "final", "skipesc", "skiprac", "inline", "function", "query",
];

/// Splits annotation text into clauses and parses requires/ensures ones.
/// Clauses inside an `exceptional_behavior` case are skipped; every other
/// spec case is flattened into one clause list.
pub fn parse_clauses(body: &str) -> Result<Contract, ContractError> {
    let mut contract = Contract { raw_text: body.to_string(), ..Contract::default() };
    let mut exceptional = false;
    for piece in split_clauses(body) {
        let mut rest = piece.trim();
        loop {
            let word_end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
            let word = &rest[..word_end];
            if word.is_empty() {
                break;
            }
            if word == "also" {
                exceptional = false;
            }
            if word == "exceptional_behavior" || word == "exceptional_behaviour" {
                exceptional = true;
            } else if word == "normal_behavior" || word == "normal_behaviour" || word == "behavior" || word == "behaviour" {
                exceptional = false;
            } else if !PREFIX_WORDS.contains(&word) {
                break;
            }
            rest = rest[word_end..].trim_start();
        }
        if rest.is_empty() {
            continue;
        }
        let word_end = rest.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(rest.len());
        let (keyword, expr_text) = (&rest[..word_end], rest[word_end..].trim());
        let target = match keyword {
            "requires" | "pre" | "requires_redundantly" | "pre_redundantly" => &mut contract.requires,
            "ensures" | "post" | "ensures_redundantly" | "post_redundantly" => &mut contract.ensures,
            k if IGNORED_CLAUSES.contains(&k) => continue,
            other => return Err(ContractError::UnknownClause(if other.is_empty() { rest.to_string() } else { other.to_string() })),
        };
        if exceptional {
            continue;
        }
        if expr_text == "\\not_specified" {
            continue;
        }
        let expr = parse_expression(expr_text)
            .map_err(|error| ContractError::Syntax { clause: expr_text.to_string(), error })?;
        target.push(expr);
    }
    Ok(contract)
}

// Splits on `;` outside parentheses and literals. A trailing fragment
// without `;` is kept so a missing terminator surfaces as an error.
fn split_clauses(body: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut quote: Option<char> = None;
    let mut escaped = false;
    let mut start = 0;
    for (i, ch) in body.char_indices() {
        if let Some(q) = quote {
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == q {
                quote = None;
            }
            continue;
        }
        match ch {
            '\'' | '"' => quote = Some(ch),
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ';' if depth <= 0 => {
                out.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    let tail = body[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

/// Removes every JML comment. Lines that held nothing but an annotation are
/// removed entirely; all other bytes are kept. Idempotent. Sources that do
/// not tokenize are returned unchanged.
pub fn strip_annotations(src: &str) -> String {
    let Ok(tokens) = tokenize(src) else { return src.to_string() };
    let spans: Vec<Range<usize>> =
        tokens.iter().filter(|t| t.is_jml()).map(|t| removal_span(src, t.span.clone())).collect();
    let mut out = String::with_capacity(src.len());
    let mut cursor = 0;
    for s in spans {
        let start = s.start.max(cursor);
        out.push_str(&src[cursor..start]);
        cursor = cursor.max(s.end);
    }
    out.push_str(&src[cursor..]);
    out
}

fn removal_span(src: &str, span: Range<usize>) -> Range<usize> {
    let line_start = src[..span.start].rfind('\n').map_or(0, |i| i + 1);
    let line_end = src[span.end..].find('\n').map_or(src.len(), |i| span.end + i);
    let head_blank = src[line_start..span.start].chars().all(|c| c == ' ' || c == '\t');
    let tail_blank = src[span.end..line_end].chars().all(|c| c == ' ' || c == '\t' || c == '\r');
    match (head_blank, tail_blank) {
        (true, true) => line_start..(line_end + 1).min(src.len()),
        (false, true) => span.start..line_end,
        _ => span,
    }
}

/// Declared classes, interfaces, enums and records at nesting depth 0.
pub(crate) fn top_level_type_names(src: &str, tokens: &[Token]) -> Vec<(usize, String)> {
    let mut depth = 0i32;
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if t.is_comment() {
            continue;
        }
        match t.text(src) {
            "{" if t.kind == TokenKind::Punct => depth += 1,
            "}" if t.kind == TokenKind::Punct => depth -= 1,
            "class" | "interface" | "enum" | "record" if depth == 0 && t.kind == TokenKind::Ident => {
                if let Some(j) = next_code(tokens, i) {
                    if tokens[j].kind == TokenKind::Ident {
                        out.push((j, tokens[j].text(src).to_string()));
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Finds the single method carrying a JML contract, for callers that do not
/// name one.
pub fn find_annotated_method(src: &str) -> Result<String, ContractError> {
    let tokens = tokenize(src)?;
    let mut names = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        if !t.is_jml() {
            continue;
        }
        // First `name (` after the annotation that is a declaration.
        let mut j = i + 1;
        while j + 1 < tokens.len() {
            if tokens[j].is_comment() {
                j += 1;
                continue;
            }
            let text = tokens[j].text(src);
            if text == "{" || text == ";" || text == "}" || text == "=" {
                break;
            }
            if tokens[j].kind == TokenKind::Ident && next_code(&tokens, j).is_some_and(|k| is_punct(&tokens, src, k, "(")) {
                if !find_method_declarations(src, &tokens, text).is_empty() && !names.contains(&text.to_string()) {
                    names.push(text.to_string());
                }
                break;
            }
            j += 1;
        }
    }
    match names.len() {
        0 => Err(ContractError::NoContractFound("<any>".into())),
        1 => Ok(names.remove(0)),
        count => Err(ContractError::AmbiguousMethod { name: names.join(", "), count }),
    }
}
