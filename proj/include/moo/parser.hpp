#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "moo/ast.hpp"
#include "moo/diagnostic.hpp"

namespace moo {

enum class TokenKind {
    Ident, IntLit, StringLit,
    // keywords
    KwClass, KwInterface, KwAbstract, KwExtends, KwImplements, KwPublic, KwProtected, KwPrivate,
    KwVoid, KwNew, KwThis, KwSuper, KwNull, KwTrue, KwFalse, KwIf, KwElse, KwWhile, KwReturn,
    KwPrint, KwDriver, KwForall,
    // punctuation
    LBrace, RBrace, LParen, RParen, Lt, Gt, Le, Ge, EqEq, NotEq, Assign, Plus, Minus, Star, Slash, Percent,
    Bang, AndAnd, OrOr, Semi, Comma, Dot, At, Colon,
    End,
};

std::string_view describe(TokenKind k);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;
    SourcePos pos;
};

/// Splits MiniOO source into tokens. `//` and `/* */` comments are skipped.
/// Throws CompileError (`lex-error`) on an unterminated string or comment, or
/// a stray character.
std::vector<Token> tokenize(std::string_view source);

/// Parses one `.moo` file and checks the unit's structural invariants:
/// unique declaration names, unique member names, at most one constructor,
/// an acyclic extends/implements graph. Throws CompileError with code
/// `syntax-error`, `duplicate-name` or `inheritance-cycle`.
SourceUnit parse_unit(std::string_view source);

/// Parses one invariant predicate: a side-effect-free boolean expression over
/// field paths, literals and operators, optionally a `forall` quantifier.
/// Throws CompileError (`syntax-error`, `impure-predicate`).
Expr parse_predicate(std::string_view text);

/// Structural checks run by `parse_unit`; exposed for units assembled in
/// memory (merged files, generated artifacts).
Diagnostics check_structure(const SourceUnit& unit);

} // namespace moo
