#include <algorithm>
#include <cctype>
#include <map>
#include <vector>

#include "veil/cfg/io.hpp"
#include "veil/errors.hpp"

namespace veil::cfg {
namespace {

enum class Tok { Id, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Equal, Colon, Arrow,
                 UndirectedArrow, Plus, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    bool quoted = false;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = column_;
            if (pos_ >= text_.size()) {
                tokens.push_back(t);
                return tokens;
            }
            const char c = text_[pos_];
            switch (c) {
            case '{': t.kind = Tok::LBrace; advance(); break;
            case '}': t.kind = Tok::RBrace; advance(); break;
            case '[': t.kind = Tok::LBracket; advance(); break;
            case ']': t.kind = Tok::RBracket; advance(); break;
            case ';': t.kind = Tok::Semi; advance(); break;
            case ',': t.kind = Tok::Comma; advance(); break;
            case '=': t.kind = Tok::Equal; advance(); break;
            case ':': t.kind = Tok::Colon; advance(); break;
            case '+': t.kind = Tok::Plus; advance(); break;
            case '"':
                t.kind = Tok::Id;
                t.quoted = true;
                t.text = read_quoted();
                break;
            case '<':
                t.kind = Tok::Id;
                t.quoted = true;
                t.text = read_html();
                break;
            default:
                if (c == '-' && peek(1) == '>') {
                    t.kind = Tok::Arrow;
                    advance();
                    advance();
                } else if (c == '-' && peek(1) == '-') {
                    t.kind = Tok::UndirectedArrow;
                    advance();
                    advance();
                } else if (is_id_start(c) || c == '-' || c == '.' ||
                           std::isdigit(static_cast<unsigned char>(c))) {
                    t.kind = Tok::Id;
                    t.text = read_bare();
                } else {
                    throw ParseError(std::string("unexpected character '") + c + "'", line_,
                                     column_);
                }
            }
            tokens.push_back(std::move(t));
        }
    }

private:
    static bool is_id_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
               static_cast<unsigned char>(c) >= 0x80;
    }

    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void skip_space_and_comments() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '#' && column_ == 1) {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                const auto line = line_;
                const auto col = column_;
                advance();
                advance();
                while (pos_ < text_.size() && !(text_[pos_] == '*' && peek(1) == '/')) advance();
                if (pos_ >= text_.size()) throw ParseError("unterminated comment", line, col);
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    std::string read_quoted() {
        const auto line = line_;
        const auto col = column_;
        advance();
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) {
                const char next = text_[pos_ + 1];
                advance();
                if (next == '"') {
                    out += '"';
                    advance();
                } else if (next == '\n') {
                    advance();
                } else {
                    out += '\\';
                }
                continue;
            }
            out += text_[pos_];
            advance();
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated string", line, col);
        advance();
        return out;
    }

    std::string read_html() {
        const auto line = line_;
        const auto col = column_;
        int depth = 0;
        std::string out;
        do {
            if (pos_ >= text_.size()) throw ParseError("unterminated HTML string", line, col);
            const char c = text_[pos_];
            if (c == '<') ++depth;
            if (c == '>') --depth;
            out += c;
            advance();
        } while (depth > 0);
        return out.substr(1, out.size() - 2);
    }

    std::string read_bare() {
        std::string out;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '-' && !out.empty() && (peek(1) == '>' || peek(1) == '-')) break;
            if (is_id_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                (c == '-' && out.empty())) {
                out += c;
                advance();
            } else {
                break;
            }
        }
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool keyword(const Token& t, std::string_view kw) {
    if (t.kind != Tok::Id || t.quoted || t.text.size() != kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
    }
    return true;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    CfgGraph run() {
        if (keyword(cur(), "strict")) next();
        if (keyword(cur(), "graph")) {
            fail("undirected graphs are not supported; expected 'digraph'");
        }
        if (!keyword(cur(), "digraph")) fail("expected 'digraph'");
        next();
        if (cur().kind == Tok::Id) next();
        expect(Tok::LBrace, "'{'");
        stmt_list();
        expect(Tok::RBrace, "'}'");
        if (cur().kind != Tok::End) fail("unexpected content after closing '}'");
        return std::move(graph_);
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    const Token& lookahead(std::size_t n) const {
        return tokens_[std::min(pos_ + n, tokens_.size() - 1)];
    }
    void next() {
        if (pos_ + 1 < tokens_.size()) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(msg, cur().line, cur().column);
    }
    void expect(Tok kind, const char* what) {
        if (cur().kind != kind) fail(std::string("expected ") + what);
        next();
    }

    std::string id() {
        if (cur().kind != Tok::Id) fail("expected identifier");
        std::string text = cur().text;
        const bool quoted = cur().quoted;
        next();
        while (quoted && cur().kind == Tok::Plus) {
            next();
            if (cur().kind != Tok::Id || !cur().quoted) fail("expected string after '+'");
            text += cur().text;
            next();
        }
        return text;
    }

    void stmt_list() {
        while (cur().kind != Tok::RBrace && cur().kind != Tok::End) {
            stmt();
            if (cur().kind == Tok::Semi) next();
        }
    }

    void stmt() {
        const Token& t = cur();
        if (t.kind == Tok::LBrace || keyword(t, "subgraph")) {
            fail("subgraphs are not supported");
        }
        if (keyword(t, "node") || keyword(t, "edge") || keyword(t, "graph")) {
            next();
            attr_lists();
            return;
        }
        if (t.kind != Tok::Id) fail("expected statement");
        if (lookahead(1).kind == Tok::Equal) {
            id();
            next();
            id();
            return;
        }
        std::vector<std::string> chain;
        chain.push_back(node_ref());
        while (cur().kind == Tok::Arrow || cur().kind == Tok::UndirectedArrow) {
            if (cur().kind == Tok::UndirectedArrow) fail("undirected edge '--' in digraph");
            next();
            if (cur().kind == Tok::LBrace || keyword(cur(), "subgraph")) {
                fail("subgraphs are not supported");
            }
            chain.push_back(node_ref());
        }
        auto attrs = attr_lists();
        if (chain.size() == 1) {
            const NodeId n = graph_.add_node(chain.front());
            if (auto it = attrs.find("label"); it != attrs.end()) {
                graph_.node(n).label = it->second;
            }
            return;
        }
        std::vector<NodeId> ids;
        for (const auto& name : chain) ids.push_back(graph_.add_node(name));
        for (std::size_t i = 0; i + 1 < ids.size(); ++i) graph_.add_edge(ids[i], ids[i + 1]);
    }

    std::string node_ref() {
        std::string name = id();
        // Ports and compass points do not affect the graph structure.
        for (int i = 0; i < 2 && cur().kind == Tok::Colon; ++i) {
            next();
            id();
        }
        return name;
    }

    std::map<std::string, std::string> attr_lists() {
        std::map<std::string, std::string> attrs;
        while (cur().kind == Tok::LBracket) {
            next();
            while (cur().kind != Tok::RBracket) {
                std::string key = id();
                std::string value = "true";
                if (cur().kind == Tok::Equal) {
                    next();
                    value = id();
                }
                attrs[key] = value;
                if (cur().kind == Tok::Semi || cur().kind == Tok::Comma) next();
            }
            next();
        }
        return attrs;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    CfgGraph graph_;
};

} // namespace

CfgGraph parse_dot(std::string_view text, const std::optional<std::string>& entry_override) {
    CfgGraph g = Parser(Lexer(text).run()).run();
    if (g.node_count() == 0) {
        throw ParseError("digraph has no nodes");
    }
    if (entry_override) {
        auto id = g.find(*entry_override);
        if (!id) throw ParseError("entry override '" + *entry_override + "' is not a node");
        g.set_entry(*id);
        return g;
    }
    std::vector<NodeId> sources;
    for (std::uint32_t i = 0; i < g.node_count(); ++i) {
        const NodeId n{i};
        const auto in = g.in_edges(n);
        const bool has_foreign_pred = std::any_of(in.begin(), in.end(), [&](EdgeId e) {
            return g.edge(e).src != n;
        });
        if (!has_foreign_pred) sources.push_back(n);
    }
    if (sources.size() != 1) {
        std::string list;
        for (NodeId n : sources) {
            if (!list.empty()) list += ", ";
            list += g.node(n).name;
        }
        throw ParseError("cannot determine entry: expected exactly one node without "
                         "predecessors, found " +
                         std::to_string(sources.size()) + " {" + list +
                         "}; pass an entry override");
    }
    g.set_entry(sources.front());
    return g;
}

} // namespace veil::cfg
