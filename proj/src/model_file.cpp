#include "hodgelab/model_file.hpp"

#include <cctype>
#include <set>

#include "hodgelab/error.hpp"

namespace hodgelab {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
    throw input_error("model file line " + std::to_string(line) + ": " + msg);
}

struct Token {
    enum class Kind { punct, str, integer, bare, newline, end } kind;
    char punct = 0;
    std::string text;
    long num = 0;
    int line = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : s_(text) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '#') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
            } else {
                break;
            }
        }
        tok_ = Token{};
        tok_.line = line_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::Kind::end;
            return;
        }
        char c = s_[pos_];
        if (c == '\n') {
            ++pos_;
            ++line_;
            tok_.kind = Token::Kind::newline;
            return;
        }
        if (c == '[' || c == ']' || c == '{' || c == '}' || c == '=' || c == ',' || c == '.') {
            ++pos_;
            tok_.kind = Token::Kind::punct;
            tok_.punct = c;
            return;
        }
        if (c == '"') {
            ++pos_;
            std::string out;
            while (pos_ < s_.size() && s_[pos_] != '"') {
                if (s_[pos_] == '\n') fail(line_, "unterminated string");
                out += s_[pos_++];
            }
            if (pos_ >= s_.size()) fail(line_, "unterminated string");
            ++pos_;
            tok_.kind = Token::Kind::str;
            tok_.text = out;
            return;
        }
        if (std::isalnum((unsigned char)c) || c == '_' || c == '-' || c == '+') {
            std::string out;
            while (pos_ < s_.size()) {
                char d = s_[pos_];
                if (std::isalnum((unsigned char)d) || d == '_' || d == '-' || d == '+') {
                    out += d;
                    ++pos_;
                } else
                    break;
            }
            bool numeric = true;
            for (size_t i = 0; i < out.size(); ++i) {
                char d = out[i];
                if (i == 0 && (d == '-' || d == '+')) continue;
                if (!std::isdigit((unsigned char)d)) numeric = false;
            }
            if (numeric && out != "-" && out != "+") {
                tok_.kind = Token::Kind::integer;
                try {
                    tok_.num = std::stol(out);
                } catch (const std::exception&) {
                    fail(line_, "integer out of range: " + out);
                }
            } else {
                tok_.kind = Token::Kind::bare;
            }
            tok_.text = out;
            return;
        }
        fail(line_, std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1;
    Token tok_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lex_(text) {}

    TomlValue parse_document() {
        TomlValue root;
        root.kind = TomlValue::Kind::table;
        TomlValue* current = &root;
        for (;;) {
            skip_newlines();
            const Token& t = lex_.peek();
            if (t.kind == Token::Kind::end) break;
            if (t.kind == Token::Kind::punct && t.punct == '[') {
                current = parse_section_header(root);
            } else if (t.kind == Token::Kind::bare || t.kind == Token::Kind::str) {
                parse_key_value(*current);
            } else {
                fail(t.line, "expected a section header or key");
            }
        }
        return root;
    }

private:
    void skip_newlines() {
        while (lex_.peek().kind == Token::Kind::newline) lex_.take();
    }

    std::string take_key() {
        Token t = lex_.take();
        if (t.kind != Token::Kind::bare && t.kind != Token::Kind::str &&
            t.kind != Token::Kind::integer)
            fail(t.line, "expected a key");
        return t.text;
    }

    TomlValue* parse_section_header(TomlValue& root) {
        Token open = lex_.take(); // '['
        TomlValue* cur = &root;
        for (;;) {
            std::string key = take_key();
            auto [it, fresh] =
                cur->tab.try_emplace(key, TomlValue{TomlValue::Kind::table, open.line, {}, 0, {}, {}});
            TomlValue* next = &it->second;
            if (!fresh && next->kind != TomlValue::Kind::table)
                fail(open.line, "section name '" + key + "' clashes with an existing key");
            cur = next;
            Token t = lex_.take();
            if (t.kind == Token::Kind::punct && t.punct == '.') continue;
            if (t.kind == Token::Kind::punct && t.punct == ']') break;
            fail(t.line, "malformed section header");
        }
        Token nl = lex_.take();
        if (nl.kind != Token::Kind::newline && nl.kind != Token::Kind::end)
            fail(nl.line, "junk after section header");
        return cur;
    }

    void parse_key_value(TomlValue& table) {
        Token keytok = lex_.peek();
        std::string key = take_key();
        Token eq = lex_.take();
        if (eq.kind != Token::Kind::punct || eq.punct != '=')
            fail(eq.line, "expected '=' after key '" + key + "'");
        TomlValue v = parse_value();
        if (!table.tab.emplace(key, std::move(v)).second)
            fail(keytok.line, "duplicate key '" + key + "'");
        Token nl = lex_.take();
        if (nl.kind != Token::Kind::newline && nl.kind != Token::Kind::end)
            fail(nl.line, "junk after value for key '" + key + "'");
    }

    TomlValue parse_value() {
        const Token& t = lex_.peek();
        TomlValue v;
        v.line = t.line;
        if (t.kind == Token::Kind::str) {
            v.kind = TomlValue::Kind::str;
            v.str = lex_.take().text;
            return v;
        }
        if (t.kind == Token::Kind::integer) {
            v.kind = TomlValue::Kind::integer;
            v.integer = lex_.take().num;
            return v;
        }
        if (t.kind == Token::Kind::punct && t.punct == '[') {
            lex_.take();
            v.kind = TomlValue::Kind::array;
            for (;;) {
                skip_newlines();
                if (match_punct(']')) break;
                v.arr.push_back(parse_value());
                skip_newlines();
                if (match_punct(',')) continue;
                skip_newlines();
                if (match_punct(']')) break;
                fail(lex_.peek().line, "expected ',' or ']' in array");
            }
            return v;
        }
        if (t.kind == Token::Kind::punct && t.punct == '{') {
            lex_.take();
            v.kind = TomlValue::Kind::table;
            for (;;) {
                skip_newlines();
                if (match_punct('}')) break;
                std::string key = take_key();
                Token eq = lex_.take();
                if (eq.kind != Token::Kind::punct || eq.punct != '=')
                    fail(eq.line, "expected '=' in inline table");
                if (!v.tab.emplace(key, parse_value()).second)
                    fail(eq.line, "duplicate key '" + key + "' in inline table");
                skip_newlines();
                if (match_punct(',')) continue;
                skip_newlines();
                if (match_punct('}')) break;
                fail(lex_.peek().line, "expected ',' or '}' in inline table");
            }
            return v;
        }
        fail(t.line, "expected a value");
    }

    bool match_punct(char c) {
        const Token& t = lex_.peek();
        if (t.kind == Token::Kind::punct && t.punct == c) {
            lex_.take();
            return true;
        }
        return false;
    }

    Lexer lex_;
};

} // namespace

const TomlValue* TomlValue::find(const std::string& key) const {
    auto it = tab.find(key);
    return it == tab.end() ? nullptr : &it->second;
}

const TomlValue& TomlValue::expect(const std::string& key) const {
    const TomlValue* v = find(key);
    if (!v) fail(line, "missing required key '" + key + "'");
    return *v;
}

const std::string& TomlValue::as_str() const {
    if (kind != Kind::str) fail(line, "expected a string");
    return str;
}

long TomlValue::as_int() const {
    if (kind != Kind::integer) fail(line, "expected an integer");
    return integer;
}

const std::vector<TomlValue>& TomlValue::as_array() const {
    if (kind != Kind::array) fail(line, "expected an array");
    return arr;
}

TomlValue parse_toml(const std::string& text) { return Parser(text).parse_document(); }

namespace {

ExactC coeff_at(const TomlValue& v) {
    try {
        return parse_exact(v.as_str());
    } catch (const input_error& e) {
        fail(v.line, e.what());
    }
}

} // namespace

ModelFile parse_model_file(const std::string& text) {
    TomlValue doc = parse_toml(text);
    for (const auto& [key, val] : doc.tab) {
        if (key != "model" && key != "d" && key != "metric" && key != "foliation" &&
            key != "witten")
            fail(val.line, "unknown section '" + key + "'");
    }

    const TomlValue& model = doc.expect("model");
    long n = model.expect("n").as_int();
    if (n < 1 || n > 12) fail(model.expect("n").line, "n out of supported range 1..12");

    ModelFile out;
    out.eq.n = (int)n;
    const auto& gens = model.expect("generators").as_array();
    if ((long)gens.size() != n)
        fail(model.expect("generators").line, "expected exactly n generator labels");
    std::map<std::string, int> label_index;
    for (const auto& g : gens) {
        std::string name = g.as_str();
        if (name.empty()) fail(g.line, "empty generator label");
        if (!label_index.emplace(name, (int)out.eq.names.size()).second)
            fail(g.line, "duplicate generator label '" + name + "'");
        out.eq.names.push_back(name);
    }
    out.eq.a2.resize(out.eq.n);
    out.eq.a11.resize(out.eq.n);

    // resolve "wj" / "wjbar" to (index, conjugated?)
    auto resolve = [&](const TomlValue& v) -> std::pair<int, bool> {
        const std::string& label = v.as_str();
        auto it = label_index.find(label);
        if (it != label_index.end()) return {it->second, false};
        if (label.size() > 3 && label.compare(label.size() - 3, 3, "bar") == 0) {
            auto base = label_index.find(label.substr(0, label.size() - 3));
            if (base != label_index.end()) return {base->second, true};
        }
        fail(v.line, "unknown label '" + label + "'");
    };

    if (const TomlValue* d = doc.find("d")) {
        for (const auto& [gen, terms] : d->tab) {
            auto it = label_index.find(gen);
            if (it == label_index.end()) fail(terms.line, "unknown generator '" + gen + "'");
            int i = it->second;
            for (const TomlValue& term : terms.as_array()) {
                ExactC c = coeff_at(term.expect("coeff"));
                const auto& wedge = term.expect("wedge").as_array();
                if (wedge.size() != 2)
                    fail(term.expect("wedge").line, "wedge must list exactly two factors");
                auto [ja, abar] = resolve(wedge[0]);
                auto [jb, bbar] = resolve(wedge[1]);
                if (abar && bbar)
                    fail(wedge[0].line, "term of type (0,2) in d('" + gen + "') is not allowed");
                if (ja == jb && abar == bbar)
                    fail(wedge[0].line, "repeated factor makes the term vanish");
                StructureEquations::CoeffMap* dst;
                std::pair<int, int> key;
                if (!abar && !bbar) {
                    if (ja > jb) {
                        std::swap(ja, jb);
                        c = -c;
                    }
                    dst = &out.eq.a2[i];
                    key = {ja, jb};
                } else {
                    if (abar) { // conj factor listed first
                        std::swap(ja, jb);
                        c = -c;
                    }
                    dst = &out.eq.a11[i];
                    key = {ja, jb};
                }
                if (!dst->emplace(key, c).second)
                    fail(term.expect("coeff").line,
                         "duplicate term in d('" + gen + "')");
            }
        }
    }

    if (const TomlValue* metric = doc.find("metric")) {
        const auto& rows = metric->expect("g").as_array();
        if ((long)rows.size() != n) fail(metric->expect("g").line, "metric g must be n x n");
        MatQ G(out.eq.n, out.eq.n);
        for (int i = 0; i < out.eq.n; ++i) {
            const auto& row = rows[i].as_array();
            if ((long)row.size() != n) fail(rows[i].line, "metric g must be n x n");
            for (int j = 0; j < out.eq.n; ++j) G(i, j) = coeff_at(row[j]);
        }
        out.metric_g = std::move(G);
    }

    if (const TomlValue* fol = doc.find("foliation")) {
        auto read_set = [&](const char* key) {
            std::vector<int> v;
            for (const TomlValue& e : fol->expect(key).as_array()) {
                long i = e.as_int();
                if (i < 1 || i > n) fail(e.line, "foliation index out of range 1..n");
                v.push_back((int)i - 1);
            }
            return v;
        };
        auto N = read_set("N"), F = read_set("F");
        std::set<int> seen(N.begin(), N.end());
        if (seen.size() != N.size()) fail(fol->line, "repeated index in foliation set N");
        for (int i : F)
            if (!seen.insert(i).second)
                fail(fol->line, "foliation sets N and F must be disjoint");
        if ((long)seen.size() != n) fail(fol->line, "foliation sets must cover 1..n");
        out.foliation = {std::move(N), std::move(F)};
    }

    if (const TomlValue* w = doc.find("witten")) out.witten = *w;

    return out;
}

} // namespace hodgelab
