//! Minimal Java source tokenizer.
//!
//! Only as much of the Java lexical grammar as the annotation extractor, the
//! code-alteration guard and task normalization need: identifiers, literals,
//! operators and comments, each carrying its byte span.

mod lexer;

pub use lexer::{tokenize, CommentKind, LexError, Token, TokenKind};

/// Java keywords that can never name a type, variable or method.
pub const KEYWORDS: &[&str] = &[
    "abstract", "assert", "break", "case", "catch", "class", "const", "continue", "default", "do",
    "else", "enum", "extends", "final", "finally", "for", "goto", "if", "implements", "import",
    "instanceof", "interface", "native", "new", "package", "private", "protected", "public",
    "return", "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "try", "volatile", "while", "true", "false", "null", "var", "record", "yield",
];

pub const PRIMITIVE_TYPES: &[&str] =
    &["boolean", "byte", "char", "short", "int", "long", "float", "double", "void"];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn is_primitive(word: &str) -> bool {
    PRIMITIVE_TYPES.contains(&word)
}
