#include "moo/parser.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>

namespace moo {

std::string_view describe(TokenKind k) {
    switch (k) {
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::StringLit: return "string literal";
    case TokenKind::KwClass: return "'class'";
    case TokenKind::KwInterface: return "'interface'";
    case TokenKind::KwAbstract: return "'abstract'";
    case TokenKind::KwExtends: return "'extends'";
    case TokenKind::KwImplements: return "'implements'";
    case TokenKind::KwPublic: return "'public'";
    case TokenKind::KwProtected: return "'protected'";
    case TokenKind::KwPrivate: return "'private'";
    case TokenKind::KwVoid: return "'void'";
    case TokenKind::KwNew: return "'new'";
    case TokenKind::KwThis: return "'this'";
    case TokenKind::KwSuper: return "'super'";
    case TokenKind::KwNull: return "'null'";
    case TokenKind::KwTrue: return "'true'";
    case TokenKind::KwFalse: return "'false'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwWhile: return "'while'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::KwPrint: return "'print'";
    case TokenKind::KwDriver: return "'driver'";
    case TokenKind::KwForall: return "'forall'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Ge: return "'>='";
    case TokenKind::EqEq: return "'=='";
    case TokenKind::NotEq: return "'!='";
    case TokenKind::Assign: return "'='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Bang: return "'!'";
    case TokenKind::AndAnd: return "'&&'";
    case TokenKind::OrOr: return "'||'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::At: return "'@'";
    case TokenKind::Colon: return "':'";
    case TokenKind::End: return "end of input";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

namespace {

const std::unordered_map<std::string_view, TokenKind>& keywords() {
    static const std::unordered_map<std::string_view, TokenKind> table{
        {"class", TokenKind::KwClass},         {"interface", TokenKind::KwInterface},
        {"abstract", TokenKind::KwAbstract},   {"extends", TokenKind::KwExtends},
        {"implements", TokenKind::KwImplements}, {"public", TokenKind::KwPublic},
        {"protected", TokenKind::KwProtected}, {"private", TokenKind::KwPrivate},
        {"void", TokenKind::KwVoid},           {"new", TokenKind::KwNew},
        {"this", TokenKind::KwThis},           {"super", TokenKind::KwSuper},
        {"null", TokenKind::KwNull},           {"true", TokenKind::KwTrue},
        {"false", TokenKind::KwFalse},         {"if", TokenKind::KwIf},
        {"else", TokenKind::KwElse},           {"while", TokenKind::KwWhile},
        {"return", TokenKind::KwReturn},       {"print", TokenKind::KwPrint},
        {"driver", TokenKind::KwDriver},       {"forall", TokenKind::KwForall},
    };
    return table;
}

[[noreturn]] void lex_fail(SourcePos pos, std::string msg) {
    throw CompileError(Diagnostic{"lex-error", std::move(msg), pos});
}

} // namespace

std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    int line = 1;
    int col = 1;

    auto advance = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto peek = [&](std::size_t off = 0) -> char { return i + off < src.size() ? src[i + off] : '\0'; };

    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
            continue;
        }
        if (c == '/' && peek(1) == '/') {
            while (i < src.size() && src[i] != '\n') advance();
            continue;
        }
        if (c == '/' && peek(1) == '*') {
            SourcePos start{line, col};
            advance(2);
            while (i < src.size() && !(src[i] == '*' && peek(1) == '/')) advance();
            if (i >= src.size()) lex_fail(start, "unterminated comment");
            advance(2);
            continue;
        }

        SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i;
            while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                advance();
            std::string_view word = src.substr(start, i - start);
            auto kw = keywords().find(word);
            out.push_back({kw == keywords().end() ? TokenKind::Ident : kw->second, std::string(word), pos});
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = i;
            while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) advance();
            out.push_back({TokenKind::IntLit, std::string(src.substr(start, i - start)), pos});
            continue;
        }
        if (c == '"') {
            advance();
            std::string value;
            while (true) {
                if (i >= src.size() || src[i] == '\n') lex_fail(pos, "unterminated string literal");
                char ch = src[i];
                if (ch == '"') {
                    advance();
                    break;
                }
                if (ch == '\\') {
                    char e = peek(1);
                    switch (e) {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '"': value += '"'; break;
                    case '\\': value += '\\'; break;
                    default: lex_fail({line, col}, "unknown escape sequence");
                    }
                    advance(2);
                    continue;
                }
                value += ch;
                advance();
            }
            out.push_back({TokenKind::StringLit, std::move(value), pos});
            continue;
        }

        auto two = [&](char a, char b) { return c == a && peek(1) == b; };
        TokenKind kind;
        std::size_t len = 1;
        if (two('<', '=')) { kind = TokenKind::Le; len = 2; }
        else if (two('>', '=')) { kind = TokenKind::Ge; len = 2; }
        else if (two('=', '=')) { kind = TokenKind::EqEq; len = 2; }
        else if (two('!', '=')) { kind = TokenKind::NotEq; len = 2; }
        else if (two('&', '&')) { kind = TokenKind::AndAnd; len = 2; }
        else if (two('|', '|')) { kind = TokenKind::OrOr; len = 2; }
        else {
            switch (c) {
            case '{': kind = TokenKind::LBrace; break;
            case '}': kind = TokenKind::RBrace; break;
            case '(': kind = TokenKind::LParen; break;
            case ')': kind = TokenKind::RParen; break;
            case '<': kind = TokenKind::Lt; break;
            case '>': kind = TokenKind::Gt; break;
            case '=': kind = TokenKind::Assign; break;
            case '+': kind = TokenKind::Plus; break;
            case '-': kind = TokenKind::Minus; break;
            case '*': kind = TokenKind::Star; break;
            case '/': kind = TokenKind::Slash; break;
            case '%': kind = TokenKind::Percent; break;
            case '!': kind = TokenKind::Bang; break;
            case ';': kind = TokenKind::Semi; break;
            case ',': kind = TokenKind::Comma; break;
            case '.': kind = TokenKind::Dot; break;
            case '@': kind = TokenKind::At; break;
            case ':': kind = TokenKind::Colon; break;
            default: lex_fail(pos, std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back({kind, std::string(src.substr(i, len)), pos});
        advance(len);
    }
    out.push_back({TokenKind::End, "", {line, col}});
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Backtrack {};

class Parser {
public:
    Parser(std::vector<Token> tokens, bool predicate_mode)
        : toks_(std::move(tokens)), predicate_mode_(predicate_mode) {}

    SourceUnit unit() {
        SourceUnit u;
        while (!at(TokenKind::End)) {
            if (at(TokenKind::KwDriver)) {
                SourcePos pos = cur().pos;
                if (u.driver) fail_at(pos, "a unit declares at most one driver block");
                next();
                u.driver = DriverBlock{block(), pos};
            } else if (at(TokenKind::KwInterface)) {
                u.interfaces.push_back(interface_decl());
            } else if (at(TokenKind::KwClass) || at(TokenKind::KwAbstract)) {
                u.classes.push_back(class_decl());
            } else {
                expected({TokenKind::KwClass, TokenKind::KwAbstract, TokenKind::KwInterface,
                          TokenKind::KwDriver});
            }
        }
        return u;
    }

    Expr predicate() {
        Expr e = expression();
        expect(TokenKind::End);
        return e;
    }

private:
    // -- token helpers ------------------------------------------------------
    const Token& cur() const { return toks_[pos_]; }
    const Token& look(std::size_t off) const {
        return toks_[std::min(pos_ + off, toks_.size() - 1)];
    }
    bool at(TokenKind k) const { return cur().kind == k; }
    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool accept(TokenKind k) {
        if (!at(k)) return false;
        next();
        return true;
    }
    const Token& expect(TokenKind k) {
        if (!at(k)) expected({k});
        return next();
    }

    [[noreturn]] void fail_at(SourcePos pos, std::string msg) {
        if (speculating_) throw Backtrack{};
        throw CompileError(Diagnostic{"syntax-error", std::move(msg), pos});
    }

    [[noreturn]] void expected(std::initializer_list<TokenKind> kinds) {
        std::string msg = "expected ";
        if (kinds.size() > 1) msg += "one of ";
        bool first = true;
        for (auto k : kinds) {
            if (!first) msg += ", ";
            msg += describe(k);
            first = false;
        }
        msg += " but found ";
        msg += at(TokenKind::End) ? std::string("end of input") : "'" + cur().text + "'";
        fail_at(cur().pos, std::move(msg));
    }

    // -- types --------------------------------------------------------------
    bool is_type_var(const std::string& n) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (std::find(it->begin(), it->end(), n) != it->end()) return true;
        return false;
    }

    TypeExpr type() {
        const Token& name = expect(TokenKind::Ident);
        std::vector<TypeExpr> args;
        if (accept(TokenKind::Lt)) {
            args.push_back(type());
            while (accept(TokenKind::Comma)) args.push_back(type());
            expect(TokenKind::Gt);
        }
        if (args.empty() && is_type_var(name.text)) return TypeExpr::var(name.text);
        return TypeExpr::named(name.text, std::move(args));
    }

    std::vector<std::string> type_params() {
        std::vector<std::string> ps;
        if (!accept(TokenKind::Lt)) return ps;
        ps.push_back(expect(TokenKind::Ident).text);
        while (accept(TokenKind::Comma)) ps.push_back(expect(TokenKind::Ident).text);
        expect(TokenKind::Gt);
        return ps;
    }

    std::vector<TypeExpr> type_list() {
        std::vector<TypeExpr> ts{type()};
        while (accept(TokenKind::Comma)) ts.push_back(type());
        return ts;
    }

    // -- declarations -------------------------------------------------------
    std::optional<Visibility> visibility() {
        if (accept(TokenKind::KwPublic)) return Visibility::Public;
        if (accept(TokenKind::KwProtected)) return Visibility::Protected;
        if (accept(TokenKind::KwPrivate)) return Visibility::Private;
        return std::nullopt;
    }

    std::vector<Param> params() {
        std::vector<Param> ps;
        expect(TokenKind::LParen);
        if (!at(TokenKind::RParen)) {
            do {
                TypeExpr t = type();
                ps.push_back(Param{expect(TokenKind::Ident).text, std::move(t)});
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        return ps;
    }

    InterfaceDecl interface_decl() {
        InterfaceDecl d;
        d.pos = expect(TokenKind::KwInterface).pos;
        d.name = expect(TokenKind::Ident).text;
        d.type_params = type_params();
        scopes_.push_back(d.type_params);
        if (accept(TokenKind::KwExtends)) d.extends = type_list();
        expect(TokenKind::LBrace);
        while (!accept(TokenKind::RBrace)) {
            SourcePos pos = cur().pos;
            auto vis = visibility();
            if (vis && *vis != Visibility::Public) fail_at(pos, "interface members are public");
            MethodDecl m = method_header(pos);
            expect(TokenKind::Semi);
            d.methods.push_back(std::move(m));
        }
        scopes_.pop_back();
        return d;
    }

    /// `[<U,...>] (void | type) name (params)`; leaves the method's type
    /// parameters out of scope.
    MethodDecl method_header(SourcePos pos) {
        MethodDecl m;
        m.pos = pos;
        m.type_params = type_params();
        scopes_.push_back(m.type_params);
        if (!accept(TokenKind::KwVoid)) m.return_type = type();
        m.name = expect(TokenKind::Ident).text;
        m.params = params();
        scopes_.pop_back();
        return m;
    }

    ClassDecl class_decl() {
        ClassDecl d;
        d.pos = cur().pos;
        d.is_abstract = accept(TokenKind::KwAbstract);
        expect(TokenKind::KwClass);
        d.name = expect(TokenKind::Ident).text;
        d.type_params = type_params();
        scopes_.push_back(d.type_params);
        if (accept(TokenKind::KwExtends)) d.super_class = type();
        if (accept(TokenKind::KwImplements)) d.interfaces = type_list();
        expect(TokenKind::LBrace);
        while (!accept(TokenKind::RBrace)) member(d);
        scopes_.pop_back();
        return d;
    }

    void member(ClassDecl& d) {
        SourcePos pos = cur().pos;
        Visibility vis = visibility().value_or(Visibility::Public);
        bool is_abstract = accept(TokenKind::KwAbstract);

        if (at(TokenKind::Ident) && cur().text == d.name && look(1).kind == TokenKind::LParen) {
            if (is_abstract) fail_at(pos, "constructors cannot be abstract");
            if (d.constructor) throw CompileError(Diagnostic{
                "duplicate-name", "class '" + d.name + "' declares more than one constructor", pos});
            next();
            ConstructorDecl c;
            c.pos = pos;
            c.visibility = vis;
            c.params = params();
            c.body = block(/*constructor=*/true);
            d.constructor = std::move(c);
            return;
        }

        bool method_like = at(TokenKind::Lt) || at(TokenKind::KwVoid);
        if (!method_like) {
            // `type name (` is a method, `type name [, name]* ;` a field list
            std::size_t save = pos_;
            speculating_ = true;
            try {
                type();
                expect(TokenKind::Ident);
                method_like = at(TokenKind::LParen);
            } catch (const Backtrack&) {
            }
            speculating_ = false;
            pos_ = save;
        }

        if (method_like) {
            MethodDecl m = method_header(pos);
            m.visibility = vis;
            m.is_abstract = is_abstract;
            if (is_abstract) {
                if (!d.is_abstract)
                    fail_at(pos, "abstract method '" + m.name + "' in non-abstract class '" + d.name + "'");
                expect(TokenKind::Semi);
            } else {
                scopes_.push_back(m.type_params);
                m.body = block();
                scopes_.pop_back();
            }
            d.methods.push_back(std::move(m));
            return;
        }

        if (is_abstract) fail_at(pos, "fields cannot be abstract");
        TypeExpr t = type();
        do {
            const Token& n = expect(TokenKind::Ident);
            d.fields.push_back(FieldDecl{n.text, t, vis, n.pos});
        } while (accept(TokenKind::Comma));
        expect(TokenKind::Semi);
    }

    // -- statements ---------------------------------------------------------
    Block block(bool constructor = false) {
        expect(TokenKind::LBrace);
        Block b;
        bool first = true;
        while (!accept(TokenKind::RBrace)) {
            if (at(TokenKind::KwSuper) && look(1).kind == TokenKind::LParen) {
                SourcePos pos = cur().pos;
                if (!constructor || !first)
                    fail_at(pos, "'super(...)' is only allowed as the first statement of a constructor");
                next();
                std::vector<Expr> args = arguments();
                expect(TokenKind::Semi);
                b.push_back(Stmt{SuperCtorStmt{std::move(args)}, pos});
            } else {
                b.push_back(statement());
            }
            first = false;
        }
        return b;
    }

    Block branch() {
        if (at(TokenKind::LBrace)) return block();
        Block b;
        b.push_back(statement());
        return b;
    }

    bool starts_local_decl() {
        if (!at(TokenKind::Ident)) return false;
        if (look(1).kind == TokenKind::Ident) return true;
        if (look(1).kind != TokenKind::Lt) return false;
        std::size_t save = pos_;
        bool ok = false;
        speculating_ = true;
        try {
            type();
            ok = at(TokenKind::Ident);
        } catch (const Backtrack&) {
        }
        speculating_ = false;
        pos_ = save;
        return ok;
    }

    Stmt statement() {
        SourcePos pos = cur().pos;
        if (accept(TokenKind::KwIf)) {
            expect(TokenKind::LParen);
            Expr cond = expression();
            expect(TokenKind::RParen);
            IfStmt s{std::move(cond), branch(), std::nullopt};
            if (accept(TokenKind::KwElse)) s.else_branch = branch();
            return Stmt{std::move(s), pos};
        }
        if (accept(TokenKind::KwWhile)) {
            expect(TokenKind::LParen);
            Expr cond = expression();
            expect(TokenKind::RParen);
            return Stmt{WhileStmt{std::move(cond), branch()}, pos};
        }
        if (accept(TokenKind::KwReturn)) {
            ReturnStmt r;
            if (!at(TokenKind::Semi)) r.value = expression();
            expect(TokenKind::Semi);
            return Stmt{std::move(r), pos};
        }
        if (accept(TokenKind::KwPrint)) {
            expect(TokenKind::LParen);
            Expr v = expression();
            expect(TokenKind::RParen);
            expect(TokenKind::Semi);
            return Stmt{PrintStmt{std::move(v)}, pos};
        }
        if (starts_local_decl()) {
            TypeExpr t = type();
            std::string n = expect(TokenKind::Ident).text;
            std::optional<Expr> init;
            if (accept(TokenKind::Assign)) init = expression();
            expect(TokenKind::Semi);
            return Stmt{LocalDecl{std::move(t), std::move(n), std::move(init)}, pos};
        }

        Expr e = expression();
        if (accept(TokenKind::Assign)) {
            if (!e.as<NameExpr>() && !e.as<FieldAccess>())
                fail_at(pos, "left-hand side of '=' must be a variable or a field path");
            Expr v = expression();
            expect(TokenKind::Semi);
            return Stmt{AssignStmt{std::move(e), std::move(v)}, pos};
        }
        if (!e.as<CallExpr>() && !e.as<NewExpr>() && !e.as<IntrinsicExpr>())
            fail_at(pos, "expression statement must be a call");
        expect(TokenKind::Semi);
        return Stmt{ExprStmt{std::move(e)}, pos};
    }

    // -- expressions --------------------------------------------------------
    std::vector<Expr> arguments() {
        std::vector<Expr> args;
        expect(TokenKind::LParen);
        if (!at(TokenKind::RParen)) {
            do {
                args.push_back(expression());
            } while (accept(TokenKind::Comma));
        }
        expect(TokenKind::RParen);
        return args;
    }

    Expr expression() { return or_expr(); }

    Expr binary_level(const std::function<Expr()>& operand,
                      std::initializer_list<std::pair<TokenKind, BinaryOp>> ops) {
        Expr lhs = operand();
        while (true) {
            auto it = std::find_if(ops.begin(), ops.end(), [&](auto& p) { return at(p.first); });
            if (it == ops.end()) return lhs;
            SourcePos pos = next().pos;
            Expr rhs = operand();
            lhs = Expr{BinaryExpr{it->second, Box<Expr>(std::move(lhs)), Box<Expr>(std::move(rhs))}, pos};
        }
    }

    Expr or_expr() { return binary_level([this] { return and_expr(); }, {{TokenKind::OrOr, BinaryOp::Or}}); }
    Expr and_expr() {
        return binary_level([this] { return equality(); }, {{TokenKind::AndAnd, BinaryOp::And}});
    }
    Expr equality() {
        return binary_level([this] { return relational(); },
                            {{TokenKind::EqEq, BinaryOp::Eq}, {TokenKind::NotEq, BinaryOp::Ne}});
    }
    Expr relational() {
        return binary_level([this] { return additive(); },
                            {{TokenKind::Lt, BinaryOp::Lt},
                             {TokenKind::Le, BinaryOp::Le},
                             {TokenKind::Gt, BinaryOp::Gt},
                             {TokenKind::Ge, BinaryOp::Ge}});
    }
    Expr additive() {
        return binary_level([this] { return multiplicative(); },
                            {{TokenKind::Plus, BinaryOp::Add}, {TokenKind::Minus, BinaryOp::Sub}});
    }
    Expr multiplicative() {
        return binary_level([this] { return unary(); },
                            {{TokenKind::Star, BinaryOp::Mul}, {TokenKind::Slash, BinaryOp::Div}, {TokenKind::Percent, BinaryOp::Mod}});
    }

    Expr unary() {
        SourcePos pos = cur().pos;
        if (accept(TokenKind::Bang)) return Expr{UnaryExpr{UnaryOp::Not, Box<Expr>(unary())}, pos};
        if (accept(TokenKind::Minus)) {
            if (at(TokenKind::IntLit)) {
                // fold so that renders of negative literals reparse identically
                Expr lit = postfix();
                if (auto* i = lit.as<IntLit>()) {
                    i->value = -i->value;
                    lit.pos = pos;
                    return lit;
                }
                return Expr{UnaryExpr{UnaryOp::Neg, Box<Expr>(std::move(lit))}, pos};
            }
            return Expr{UnaryExpr{UnaryOp::Neg, Box<Expr>(unary())}, pos};
        }
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (at(TokenKind::Dot)) {
            SourcePos pos = next().pos;
            std::string name = expect(TokenKind::Ident).text;
            if (at(TokenKind::LParen)) {
                CallExpr c;
                c.receiver = Box<Expr>(std::move(e));
                c.method = std::move(name);
                c.args = arguments();
                e = Expr{std::move(c), pos};
            } else {
                e = Expr{FieldAccess{Box<Expr>(std::move(e)), std::move(name)}, pos};
            }
        }
        return e;
    }

    Expr primary() {
        const Token& t = cur();
        SourcePos pos = t.pos;
        switch (t.kind) {
        case TokenKind::IntLit: {
            std::int64_t v = 0;
            for (char ch : t.text) {
                if (v > (INT64_MAX - (ch - '0')) / 10) fail_at(pos, "integer literal out of range");
                v = v * 10 + (ch - '0');
            }
            next();
            return Expr{IntLit{v}, pos};
        }
        case TokenKind::StringLit: {
            std::string v = t.text;
            next();
            return Expr{StringLit{std::move(v)}, pos};
        }
        case TokenKind::KwTrue: next(); return Expr{BoolLit{true}, pos};
        case TokenKind::KwFalse: next(); return Expr{BoolLit{false}, pos};
        case TokenKind::KwNull: next(); return Expr{NullLit{}, pos};
        case TokenKind::KwThis: next(); return Expr{ThisExpr{}, pos};
        case TokenKind::LParen: {
            next();
            Expr e = expression();
            expect(TokenKind::RParen);
            return e;
        }
        case TokenKind::KwNew: {
            next();
            TypeExpr ty = type();
            if (ty.is_var()) fail_at(pos, "cannot instantiate type variable '" + ty.name + "'");
            return Expr{NewExpr{std::move(ty), arguments()}, pos};
        }
        case TokenKind::KwSuper: {
            next();
            expect(TokenKind::Dot);
            CallExpr c;
            c.is_super = true;
            c.method = expect(TokenKind::Ident).text;
            c.args = arguments();
            return Expr{std::move(c), pos};
        }
        case TokenKind::At: {
            next();
            const Token& n = expect(TokenKind::Ident);
            if (!intrinsic::is_known(n.text)) fail_at(n.pos, "unknown intrinsic '@" + n.text + "'");
            IntrinsicExpr in;
            in.name = n.text;
            if (accept(TokenKind::Lt)) {
                in.type_args = type_list();
                expect(TokenKind::Gt);
            }
            in.args = arguments();
            return Expr{std::move(in), pos};
        }
        case TokenKind::KwForall: {
            if (!predicate_mode_) fail_at(pos, "'forall' is only allowed in invariant predicates");
            next();
            expect(TokenKind::LParen);
            std::string var = expect(TokenKind::Ident).text;
            expect(TokenKind::Assign);
            Expr init = expression();
            expect(TokenKind::Semi);
            Expr cond = expression();
            expect(TokenKind::Semi);
            const Token& sv = expect(TokenKind::Ident);
            if (sv.text != var)
                fail_at(sv.pos, "quantifier step must assign the bound variable '" + var + "'");
            expect(TokenKind::Assign);
            Expr step = expression();
            expect(TokenKind::RParen);
            expect(TokenKind::Colon);
            Expr body = expression();
            return Expr{ForallExpr{std::move(var), Box<Expr>(std::move(init)), Box<Expr>(std::move(cond)),
                                   Box<Expr>(std::move(step)), Box<Expr>(std::move(body))},
                        pos};
        }
        case TokenKind::Ident: {
            std::string n = t.text;
            next();
            if (at(TokenKind::LParen)) {
                CallExpr c;
                c.method = std::move(n);
                c.args = arguments();
                return Expr{std::move(c), pos};
            }
            return Expr{NameExpr{std::move(n)}, pos};
        }
        default:
            expected({TokenKind::Ident, TokenKind::IntLit, TokenKind::StringLit, TokenKind::KwTrue,
                      TokenKind::KwFalse, TokenKind::KwNull, TokenKind::KwThis, TokenKind::KwNew,
                      TokenKind::LParen});
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    bool predicate_mode_ = false;
    bool speculating_ = false;
    std::vector<std::vector<std::string>> scopes_;
};

// Predicates admit field paths, quantifier variables, literals and operators.
void check_predicate_shape(const Expr& e, bool top, Diagnostics& out) {
    auto bad = [&](const std::string& what) {
        out.push_back(Diagnostic{"impure-predicate", what + " is not allowed in an invariant predicate", e.pos});
    };
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, FieldAccess>) {
                check_predicate_shape(*n.object, false, out);
            } else if constexpr (std::is_same_v<T, BinaryExpr>) {
                check_predicate_shape(*n.lhs, false, out);
                check_predicate_shape(*n.rhs, false, out);
            } else if constexpr (std::is_same_v<T, UnaryExpr>) {
                check_predicate_shape(*n.operand, false, out);
            } else if constexpr (std::is_same_v<T, ForallExpr>) {
                if (!top) bad("a nested 'forall' outside quantifier-body position");
                check_predicate_shape(*n.init, false, out);
                check_predicate_shape(*n.cond, false, out);
                check_predicate_shape(*n.step, false, out);
                check_predicate_shape(*n.body, true, out);
            } else if constexpr (std::is_same_v<T, CallExpr>) {
                bad("a method call");
            } else if constexpr (std::is_same_v<T, NewExpr>) {
                bad("object creation");
            } else if constexpr (std::is_same_v<T, ThisExpr>) {
                bad("'this'");
            } else if constexpr (std::is_same_v<T, IntrinsicExpr>) {
                bad("an intrinsic");
            }
        },
        e.node);
}

} // namespace

SourceUnit parse_unit(std::string_view source) {
    Parser p(tokenize(source), /*predicate_mode=*/false);
    SourceUnit u = p.unit();
    Diagnostics ds = check_structure(u);
    if (!ds.empty()) throw CompileError(std::move(ds));
    return u;
}

Expr parse_predicate(std::string_view text) {
    Parser p(tokenize(text), /*predicate_mode=*/true);
    Expr e = p.predicate();
    Diagnostics ds;
    check_predicate_shape(e, true, ds);
    if (!ds.empty()) throw CompileError(std::move(ds));
    return e;
}

Diagnostics check_structure(const SourceUnit& unit) {
    Diagnostics out;
    std::map<std::string, SourcePos> decls;
    auto declare = [&](const std::string& name, SourcePos pos) {
        if (!decls.emplace(name, pos).second)
            out.push_back(Diagnostic{"duplicate-name", "type '" + name + "' is declared more than once", pos});
    };
    for (const auto& c : unit.classes) {
        declare(c.name, c.pos);
        std::set<std::string> seen;
        for (const auto& f : c.fields)
            if (!seen.insert(f.name).second)
                out.push_back(Diagnostic{"duplicate-name",
                                         "field '" + f.name + "' is declared twice in '" + c.name + "'", f.pos});
        seen.clear();
        for (const auto& m : c.methods)
            if (!seen.insert(m.name).second)
                out.push_back(Diagnostic{"duplicate-name",
                                         "method '" + m.name + "' is declared twice in '" + c.name +
                                             "' (overloading is not supported)",
                                         m.pos});
    }
    for (const auto& i : unit.interfaces) {
        declare(i.name, i.pos);
        std::set<std::string> seen;
        for (const auto& m : i.methods)
            if (!seen.insert(m.name).second)
                out.push_back(Diagnostic{"duplicate-name",
                                         "method '" + m.name + "' is declared twice in '" + i.name + "'", m.pos});
    }

    // extends/implements graph over declared names
    std::map<std::string, std::vector<std::string>> edges;
    std::map<std::string, SourcePos> where;
    for (const auto& c : unit.classes) {
        auto& e = edges[c.name];
        where[c.name] = c.pos;
        if (c.super_class) e.push_back(c.super_class->name);
        for (const auto& i : c.interfaces) e.push_back(i.name);
    }
    for (const auto& i : unit.interfaces) {
        auto& e = edges[i.name];
        where[i.name] = i.pos;
        for (const auto& s : i.extends) e.push_back(s.name);
    }
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::set<std::string> reported;
    std::function<void(const std::string&)> dfs = [&](const std::string& n) {
        mark[n] = Mark::Active;
        for (const auto& m : edges[n]) {
            if (!edges.count(m)) continue;
            if (mark[m] == Mark::Active) {
                if (reported.insert(m).second)
                    out.push_back(Diagnostic{"inheritance-cycle",
                                             "inheritance cycle through '" + m + "'", where[m]});
            } else if (mark[m] == Mark::None) {
                dfs(m);
            }
        }
        mark[n] = Mark::Done;
    };
    for (const auto& [n, _] : edges)
        if (mark[n] == Mark::None) dfs(n);
    return out;
}

} // namespace moo
